//! Small abstract Hölder graphs: enumeration up to isomorphism, the search
//! for square-free shapes with `g ∈ {6, 7}`, and realization as integers.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::arithmetic::factorize;
use crate::graph::EdgeProfile;
use crate::holder::{g_holder, AbstractGraph, Label};
use crate::pattern::Pattern;

/// Largest vertex count [`enumerate_graphs`] accepts.
pub const MAX_CENSUS_VERTICES: usize = 6;

/// Primes tried for vertices of out-degree at least 2.
pub const LABEL_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

/// Search limit used when confirming census entries by realization.
pub const REALIZE_BOUND: u64 = 10_000_000;

/// Named shapes.
pub mod shapes {
    use crate::holder::AbstractGraph;

    fn build(n: usize, edges: &[(usize, usize)]) -> AbstractGraph {
        AbstractGraph::unlabeled(n, edges.to_vec()).expect("valid shape")
    }

    /// `u → w1 → v ← w2`.
    pub fn q() -> AbstractGraph {
        build(4, &[(0, 1), (1, 3), (2, 3)])
    }

    /// `w1 → v ← w2`.
    pub fn k() -> AbstractGraph {
        build(3, &[(0, 2), (1, 2)])
    }

    /// `p → v1`, `p → v2`; vertex 0 needs a label.
    pub fn star() -> AbstractGraph {
        build(3, &[(0, 1), (0, 2)])
    }

    /// [`star`] with a tail `v1 → w`.
    pub fn star_tail() -> AbstractGraph {
        build(4, &[(0, 1), (0, 2), (1, 3)])
    }

    /// `u → v1`, `u → v2`, `v1 → v2`.
    pub fn triangle() -> AbstractGraph {
        build(3, &[(0, 1), (0, 2), (1, 2)])
    }

    pub fn path(k: usize) -> AbstractGraph {
        AbstractGraph::path(k)
    }
}

/// Adjacency bitmask of `g` relabeled by `perm` (old index → new index).
fn code(n: usize, edges: &[(usize, usize)], perm: &[usize]) -> u64 {
    edges
        .iter()
        .fold(0u64, |acc, &(a, b)| acc | 1 << (perm[a] * n + perm[b]))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn decode(n: usize, code: u64) -> Vec<(usize, usize)> {
    (0..n * n)
        .filter(|bit| code >> bit & 1 == 1)
        .map(|bit| (bit / n, bit % n))
        .collect()
}

/// Canonical form of an unlabeled graph: the relabeling with the smallest
/// adjacency code. Labels are dropped.
pub fn canonical(g: &AbstractGraph) -> AbstractGraph {
    let n = g.len();
    let best = permutations(n)
        .iter()
        .map(|p| code(n, g.edges(), p))
        .min()
        .unwrap_or(0);
    AbstractGraph::unlabeled(n, decode(n, best)).expect("relabeling keeps a DAG")
}

pub fn isomorphic(a: &AbstractGraph, b: &AbstractGraph) -> bool {
    a.len() == b.len() && a.edges().len() == b.edges().len() && canonical(a) == canonical(b)
}

fn weakly_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = 1u32;
    loop {
        let before = seen;
        for &(a, b) in edges {
            if seen >> a & 1 == 1 || seen >> b & 1 == 1 {
                seen |= 1 << a | 1 << b;
            }
        }
        if seen == before {
            return seen.count_ones() as usize == n;
        }
    }
}

/// All weakly connected DAGs with `2..=max_v` vertices and the given degree
/// bounds, one per isomorphism class, in canonical form. Ordered by vertex
/// count, then edge count, then adjacency code.
///
/// # Panics
/// If `max_v > 6`.
pub fn enumerate_graphs(max_v: usize, max_in: usize, max_out: usize) -> Vec<AbstractGraph> {
    assert!(
        max_v <= MAX_CENSUS_VERTICES,
        "census is limited to 6 vertices"
    );
    let mut out = Vec::new();
    for n in 2..=max_v {
        let perms = permutations(n);
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        let mut found: HashSet<u64> = HashSet::new();
        let mut shapes: Vec<(usize, u64)> = Vec::new();
        for mask in 0u32..1 << pairs.len() {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let within = (0..n).all(|v| {
                edges.iter().filter(|e| e.0 == v).count() <= max_out
                    && edges.iter().filter(|e| e.1 == v).count() <= max_in
            });
            if !within || !weakly_connected(n, &edges) {
                continue;
            }
            let c = perms
                .iter()
                .map(|p| code(n, &edges, p))
                .min()
                .expect("n >= 2");
            if found.insert(c) {
                shapes.push((edges.len(), c));
            }
        }
        shapes.sort_unstable();
        out.extend(
            shapes
                .into_iter()
                .map(|(_, c)| AbstractGraph::unlabeled(n, decode(n, c)).expect("canonical DAG")),
        );
    }
    out
}

/// Smallest `n ≤ bound` whose Hölder graph is exactly `g`, labeled vertices
/// taking their labels.
pub fn realize(g: &AbstractGraph, bound: u64) -> Option<u64> {
    pattern_of(g).realize(bound).map(|(n, _)| n)
}

fn vertex_name(v: usize) -> String {
    format!("v{v}")
}

/// `g` as an exact pattern over first powers.
pub fn pattern_of(g: &AbstractGraph) -> Pattern {
    let mut p = Pattern::new(false);
    for (v, label) in g.labels().iter().enumerate() {
        p = match label {
            Label::Prime(x) => p.fixed(&vertex_name(v), 1, *x),
            Label::Irrelevant => p.vertex(&vertex_name(v), 1),
        };
    }
    for &(a, b) in g.edges() {
        p = p.edge(
            &vertex_name(a),
            &vertex_name(b),
            EdgeProfile::from_pairs([(1, 1)]),
        );
    }
    p
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusParams {
    pub max_vertices: usize,
    pub max_in: usize,
    pub max_out: usize,
    pub targets: Vec<u64>,
    pub label_primes: Vec<u64>,
    pub realize_bound: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusGraph {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusEntry {
    pub graph: CensusGraph,
    /// Labels of the vertices of out-degree at least 2; `p` when there is
    /// one such vertex, `p<index>` otherwise.
    pub labels: Option<BTreeMap<String, u64>>,
    pub g: u64,
    pub name: Option<String>,
    /// Smallest integer realizing the entry.
    pub witness: u64,
    #[serde(skip)]
    pub shape: AbstractGraph,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub params: CensusParams,
    pub entries: Vec<CensusEntry>,
    /// Along every label sweep `g` was nondecreasing and already exceeded the
    /// largest target at the last prime, so larger labels cannot qualify.
    pub sweep_conclusive: bool,
}

impl CensusReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Name of a known shape, with its label where one is needed.
pub fn shape_name(g: &AbstractGraph) -> Option<String> {
    let c = canonical(g);
    let label = g.labels().iter().find_map(|l| l.prime());
    let with = |base: &str| match label {
        Some(p) => format!("{base}({p})"),
        None => base.to_string(),
    };
    let named = [
        ("Q", shapes::q()),
        ("K", shapes::k()),
        ("star", shapes::star()),
        ("star+tail", shapes::star_tail()),
        ("triangle", shapes::triangle()),
    ];
    for (name, s) in named {
        if s.len() == c.len() && canonical(&s) == c {
            return Some(with(name));
        }
    }
    (c.len() >= 2 && canonical(&shapes::path(c.len())) == c).then(|| format!("Phi{}", c.len()))
}

/// Whether a labeling could come from an actual integer with more than two
/// prime factors: 2 points at every other prime, and a labeled `L` with `c`
/// in-neighbours needs `c` distinct odd primes dividing `L - 1`.
fn labels_plausible(g: &AbstractGraph) -> bool {
    let n = g.len();
    let labeled: Vec<(usize, u64)> = g
        .labels()
        .iter()
        .enumerate()
        .filter_map(|(v, l)| Some((v, l.prime()?)))
        .collect();
    for &(v, p) in &labeled {
        let (inn, out) = g.degrees(v);
        if p == 2 && (inn != 0 || out != n - 1) {
            return false;
        }
        let odd_divisors = factorize(p - 1)
            .map(|f| f.primes().filter(|&q| q != 2).count())
            .unwrap_or(0);
        if inn > odd_divisors {
            return false;
        }
    }
    for &(a, p) in &labeled {
        for &(b, q) in &labeled {
            if a != b && g.has_edge(a, b) != ((q - 1) % p == 0) {
                return false;
            }
        }
    }
    true
}

fn evaluate(g: &AbstractGraph) -> u64 {
    g_holder(g).expect("census graphs are small and labeled where needed")
}

/// The connected square-free shapes (at most 5 vertices, degrees at most 2)
/// with `g = target`, each confirmed by an integer realizing it.
pub fn admissible_squarefree(target: u64) -> CensusReport {
    census(&[target], 5, 2, 2)
}

/// [`admissible_squarefree`] over several targets and explicit bounds.
pub fn census(targets: &[u64], max_v: usize, max_in: usize, max_out: usize) -> CensusReport {
    let top = targets.iter().copied().max().unwrap_or(0);
    let mut entries = Vec::new();
    let mut conclusive = true;
    for shape in enumerate_graphs(max_v, max_in, max_out) {
        let high: Vec<usize> = (0..shape.len())
            .filter(|&v| shape.degrees(v).1 >= 2)
            .collect();
        let mut candidates: Vec<(AbstractGraph, Option<BTreeMap<String, u64>>)> = Vec::new();
        if high.is_empty() {
            candidates.push((shape.clone(), None));
        } else {
            // Every combination of labels for the high vertices.
            let combos = LABEL_PRIMES.len().pow(high.len() as u32);
            let mut values: Vec<u64> = Vec::with_capacity(combos);
            for mut c in 0..combos {
                let mut g = shape.clone();
                let mut labels = BTreeMap::new();
                for &v in &high {
                    let p = LABEL_PRIMES[c % LABEL_PRIMES.len()];
                    c /= LABEL_PRIMES.len();
                    g = g.with_label(v, p).expect("label primes are prime");
                    let key = if high.len() == 1 {
                        "p".to_string()
                    } else {
                        format!("p{v}")
                    };
                    labels.insert(key, p);
                }
                values.push(evaluate(&g));
                candidates.push((g, Some(labels)));
            }
            if high.len() == 1 {
                conclusive &= values.windows(2).all(|w| w[0] <= w[1])
                    && values.last().is_some_and(|&v| v > top);
            } else {
                // The all-smallest labeling bounds every other one from below.
                conclusive &= values[0] > top || values.iter().all(|&v| v > top);
            }
        }
        for (g, labels) in candidates {
            let value = evaluate(&g);
            if !targets.contains(&value) || !labels_plausible(&g) {
                continue;
            }
            let Some(witness) = realize(&g, REALIZE_BOUND) else {
                continue;
            };
            entries.push(CensusEntry {
                graph: CensusGraph {
                    vertices: g.len(),
                    edges: g.edges().iter().map(|&(a, b)| [a, b]).collect(),
                },
                labels,
                g: value,
                name: shape_name(&g),
                witness,
                shape: g,
            });
        }
    }
    CensusReport {
        params: CensusParams {
            max_vertices: max_v,
            max_in,
            max_out,
            targets: targets.to_vec(),
            label_primes: LABEL_PRIMES.to_vec(),
            realize_bound: REALIZE_BOUND,
        },
        entries,
        sweep_conclusive: conclusive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holder::central_count;

    #[test]
    fn small_enumerations() {
        let two = enumerate_graphs(2, 2, 2);
        assert_eq!(two.len(), 1);
        assert!(isomorphic(&two[0], &shapes::path(2)));
        // Three vertices: path, in-star, out-star, triangle.
        assert_eq!(enumerate_graphs(3, 2, 2).len(), 1 + 4);
        let four = enumerate_graphs(4, 2, 2);
        assert!(four.iter().any(|g| isomorphic(g, &shapes::q())));
        assert!(four.iter().any(|g| isomorphic(g, &shapes::path(3))));
    }

    #[test]
    fn enumeration_has_no_duplicates() {
        let all = enumerate_graphs(5, 2, 2);
        let set: HashSet<_> = all.iter().map(canonical).collect();
        assert_eq!(set.len(), all.len());
        assert!(all.iter().all(|g| canonical(g) == *g));
    }

    #[test]
    fn regular_graphs_count_central_subsets() {
        for g in enumerate_graphs(5, 2, 2).iter().filter(|g| g.is_regular()) {
            assert_eq!(g_holder(g).unwrap(), central_count(g).unwrap());
        }
    }

    #[test]
    fn admissible_six_and_seven() {
        let six = admissible_squarefree(6);
        assert!(six.sweep_conclusive);
        let names: Vec<_> = six
            .entries
            .iter()
            .map(|e| e.name.clone().unwrap())
            .collect();
        assert_eq!(names.len(), 2, "{names:?}");
        assert!(names.contains(&"Q".to_string()));
        assert!(names.contains(&"triangle(2)".to_string()));

        let seven = admissible_squarefree(7);
        let mut names: Vec<_> = seven
            .entries
            .iter()
            .map(|e| e.name.clone().unwrap())
            .collect();
        names.sort();
        assert_eq!(names, ["star(5)", "star+tail(3)", "triangle(3)"]);
    }

    #[test]
    fn realize_examples() {
        assert_eq!(realize(&shapes::q(), 10_000), Some(7455));
        assert_eq!(realize(&shapes::path(2), 10), Some(6));
        let tri2 = shapes::triangle().with_label(0, 2).unwrap();
        assert_eq!(realize(&tri2, 50), Some(42));
    }
}
