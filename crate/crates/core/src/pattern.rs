//! Annotated graph patterns: exact matching against `Γ(n)` and search for the
//! smallest `n` whose graph is a given pattern.
//!
//! A pattern fixes the exponent of every vertex, optionally its prime, and
//! the complete [`EdgeProfile`] of every ordered pair. Matching is exact: an
//! extra edge, a missing edge or a different profile (a strong arrow where a
//! weak one is required, say) all reject.

use std::collections::BTreeMap;

use crate::arithmetic::is_prime;
use crate::graph::{EdgeProfile, HolderGraph, PrimePower};

pub type Assignment = BTreeMap<String, u64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternVertex {
    pub name: String,
    pub exponent: u32,
    pub fixed: Option<u64>,
    /// Must be an odd prime unless fixed.
    pub odd: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternEdge {
    pub from: usize,
    pub to: usize,
    pub profile: EdgeProfile,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Pattern {
    pub vertices: Vec<PatternVertex>,
    pub edges: Vec<PatternEdge>,
    /// Default for vertices added later.
    pub odd: bool,
}

/// Profiles for the arrow kinds used by the classification rules.
pub mod arrow {
    use crate::graph::EdgeProfile;

    /// `p → q` between first powers: `q ≡ 1 (mod p)`.
    pub fn plain() -> EdgeProfile {
        EdgeProfile::from_pairs([(1, 1)])
    }
    /// `p^2 ⇢ q`: `p ∥ q - 1`.
    pub fn weak_from_square() -> EdgeProfile {
        EdgeProfile::from_pairs([(1, 1)])
    }
    /// `p^2 → q`: `p^2 | q - 1`.
    pub fn strong_from_square() -> EdgeProfile {
        EdgeProfile::from_pairs([(1, 1), (2, 1)])
    }
    /// `q ⇢ p^2`: `q | p + 1`, `q ∤ p - 1`.
    pub fn weak_into_square() -> EdgeProfile {
        EdgeProfile::from_pairs([(1, 2)])
    }
    /// `q → p^2`: `q | p - 1`.
    pub fn strong_into_square() -> EdgeProfile {
        EdgeProfile::from_pairs([(1, 1), (1, 2)])
    }
    /// `q → p^3` with `q | p^2 + p + 1` only.
    pub fn cube_order_three() -> EdgeProfile {
        EdgeProfile::from_pairs([(1, 3)])
    }
    /// `q → p^3` with `q | p + 1` only.
    pub fn cube_minus_one() -> EdgeProfile {
        EdgeProfile::from_pairs([(1, 2)])
    }
    /// `p^2 → q^2` with `p ∥ q + 1`.
    pub fn squares_plus_one() -> EdgeProfile {
        EdgeProfile::from_pairs([(1, 2)])
    }
    /// `p^2 → q^2` with `p^2 | q + 1`.
    pub fn squares_plus_one_strong() -> EdgeProfile {
        EdgeProfile::from_pairs([(1, 2), (2, 2)])
    }
}

impl Pattern {
    pub fn new(odd: bool) -> Self {
        Pattern {
            vertices: Vec::new(),
            edges: Vec::new(),
            odd,
        }
    }

    pub fn vertex(mut self, name: &str, exponent: u32) -> Self {
        self.vertices.push(PatternVertex {
            name: name.to_string(),
            exponent,
            fixed: None,
            odd: self.odd,
        });
        self
    }

    pub fn fixed(mut self, name: &str, exponent: u32, prime: u64) -> Self {
        self.vertices.push(PatternVertex {
            name: name.to_string(),
            exponent,
            fixed: Some(prime),
            odd: self.odd,
        });
        self
    }

    fn index(&self, name: &str) -> usize {
        self.vertices
            .iter()
            .position(|v| v.name == name)
            .unwrap_or_else(|| panic!("unknown pattern vertex {name}"))
    }

    pub fn edge(mut self, from: &str, to: &str, profile: EdgeProfile) -> Self {
        let (from, to) = (self.index(from), self.index(to));
        self.edges.push(PatternEdge { from, to, profile });
        self
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Union with `other`; `other`'s names get `prefix` prepended.
    pub fn disjoint_union(&self, other: &Pattern, prefix: &str) -> Pattern {
        let off = self.len();
        let mut out = self.clone();
        out.odd = self.odd && other.odd;
        out.vertices
            .extend(other.vertices.iter().map(|v| PatternVertex {
                name: format!("{prefix}{}", v.name),
                ..v.clone()
            }));
        out.edges.extend(other.edges.iter().map(|e| PatternEdge {
            from: e.from + off,
            to: e.to + off,
            profile: e.profile.clone(),
        }));
        out
    }

    fn profile_matrix(&self) -> Vec<Vec<Option<&EdgeProfile>>> {
        let mut m = vec![vec![None; self.len()]; self.len()];
        for e in &self.edges {
            m[e.from][e.to] = Some(&e.profile);
        }
        m
    }

    fn admits(&self, v: &PatternVertex, prime: u64) -> bool {
        match v.fixed {
            Some(p) => p == prime,
            None => !(v.odd && prime == 2),
        }
    }

    /// Assignment of pattern names to primes under which `g` is exactly this
    /// pattern, if any.
    pub fn matches(&self, g: &HolderGraph) -> Option<Assignment> {
        if g.len() != self.len() {
            return None;
        }
        let pat = self.profile_matrix();
        let mut graph = vec![vec![None; g.len()]; g.len()];
        for e in g.edges() {
            graph[e.from][e.to] = Some(&e.profile);
        }
        let mut chosen: Vec<usize> = Vec::with_capacity(self.len());
        let mut used = vec![false; g.len()];

        fn go(
            i: usize,
            pattern: &Pattern,
            g: &HolderGraph,
            pat: &[Vec<Option<&EdgeProfile>>],
            graph: &[Vec<Option<&EdgeProfile>>],
            chosen: &mut Vec<usize>,
            used: &mut [bool],
        ) -> bool {
            if i == pattern.len() {
                return true;
            }
            let pv = &pattern.vertices[i];
            for j in 0..g.len() {
                let gv = g.vertices()[j];
                if used[j] || gv.exponent != pv.exponent || !pattern.admits(pv, gv.prime) {
                    continue;
                }
                let consistent = chosen
                    .iter()
                    .enumerate()
                    .all(|(k, &gk)| pat[k][i] == graph[gk][j] && pat[i][k] == graph[j][gk]);
                if !consistent {
                    continue;
                }
                used[j] = true;
                chosen.push(j);
                if go(i + 1, pattern, g, pat, graph, chosen, used) {
                    return true;
                }
                chosen.pop();
                used[j] = false;
            }
            false
        }

        if !go(0, self, g, &pat, &graph, &mut chosen, &mut used) {
            return None;
        }
        Some(
            self.vertices
                .iter()
                .zip(&chosen)
                .map(|(pv, &j)| (pv.name.clone(), g.vertices()[j].prime))
                .collect(),
        )
    }

    /// Vertex order for the search: sources of `≡ 1` arrows first.
    fn search_order(&self) -> Vec<usize> {
        let n = self.len();
        let mut indeg = vec![0usize; n];
        for e in &self.edges {
            indeg[e.to] += 1;
        }
        let mut done = vec![false; n];
        let mut order = Vec::with_capacity(n);
        while order.len() < n {
            // Fixed vertices first, then any vertex with no pending in-edges.
            let next = (0..n)
                .filter(|&v| !done[v])
                .min_by_key(|&v| (self.vertices[v].fixed.is_none(), indeg[v], v))
                .expect("vertices remain");
            done[next] = true;
            order.push(next);
            for e in &self.edges {
                if e.from == next && !done[e.to] {
                    indeg[e.to] -= 1;
                }
            }
        }
        order
    }

    /// Smallest `n ≤ bound` with `Γ(n)` exactly this pattern.
    pub fn realize(&self, bound: u64) -> Option<(u64, Assignment)> {
        let order = self.search_order();
        let pat = self.profile_matrix();
        let mut state = Search {
            pattern: self,
            pat: &pat,
            order: &order,
            primes: vec![0; self.len()],
            best: None,
            bound,
        };
        state.descend(0, 1);
        let (n, primes) = state.best?;
        let assignment = self
            .vertices
            .iter()
            .zip(primes)
            .map(|(v, p)| (v.name.clone(), p))
            .collect();
        debug_assert!(self.matches(&HolderGraph::of(n).ok()?).is_some());
        Some((n, assignment))
    }
}

struct Search<'a> {
    pattern: &'a Pattern,
    pat: &'a [Vec<Option<&'a EdgeProfile>>],
    order: &'a [usize],
    primes: Vec<u64>,
    best: Option<(u64, Vec<u64>)>,
    bound: u64,
}

impl Search<'_> {
    fn min_rest(&self, depth: usize) -> u64 {
        self.order[depth..]
            .iter()
            .map(|&v| {
                let pv = &self.pattern.vertices[v];
                pv.fixed
                    .unwrap_or(if pv.odd { 3 } else { 2 })
                    .saturating_pow(pv.exponent)
            })
            .fold(1u64, u64::saturating_mul)
    }

    fn descend(&mut self, depth: usize, product: u64) {
        if depth == self.order.len() {
            if product <= self.bound {
                self.best = Some((product, self.primes.clone()));
                // Later finds must be strictly smaller.
                self.bound = product - 1;
            }
            return;
        }
        let v = self.order[depth];
        let pv = &self.pattern.vertices[v];
        let rest = self.min_rest(depth + 1);
        let limit = self.bound / product / rest.max(1);

        // Arrows u → v from assigned u with a (i, 1) pair force v ≡ 1 (mod u^i).
        let mut modulus = 1u64;
        for (u, row) in self.pat.iter().enumerate() {
            let (Some(profile), p) = (row[v], self.primes[u]) else {
                continue;
            };
            if p == 0 {
                continue;
            }
            let i = profile
                .pairs()
                .filter(|&(_, j)| j == 1)
                .map(|(i, _)| i)
                .max();
            if let Some(i) = i {
                modulus = lcm(modulus, p.saturating_pow(i));
            }
        }

        let candidates: Box<dyn Iterator<Item = u64>> = match pv.fixed {
            Some(p) => Box::new(std::iter::once(p)),
            None if modulus > 1 => Box::new((1..).map(move |k: u64| k.saturating_mul(modulus) + 1)),
            None => Box::new(2..),
        };
        for x in candidates {
            let Some(power) = x.checked_pow(pv.exponent) else {
                break;
            };
            if power > limit {
                if pv.fixed.is_some() {
                    return;
                }
                break;
            }
            if !is_prime(x) || !self.pattern.admits(pv, x) || self.primes.contains(&x) {
                continue;
            }
            if !self.consistent(v, x) {
                continue;
            }
            self.primes[v] = x;
            self.descend(depth + 1, product * power);
            self.primes[v] = 0;
            // The bound may have shrunk.
            if power > self.bound / product / rest.max(1) {
                break;
            }
        }
    }

    fn consistent(&self, v: usize, x: u64) -> bool {
        let me = PrimePower::new(x, self.pattern.vertices[v].exponent);
        (0..self.pattern.len()).all(|u| {
            let p = self.primes[u];
            if p == 0 {
                return true;
            }
            let other = PrimePower::new(p, self.pattern.vertices[u].exponent);
            let out = EdgeProfile::between(me, other);
            let inn = EdgeProfile::between(other, me);
            profile_eq(self.pat[v][u], &out) && profile_eq(self.pat[u][v], &inn)
        })
    }
}

fn profile_eq(expected: Option<&EdgeProfile>, actual: &EdgeProfile) -> bool {
    match expected {
        Some(e) => e == actual,
        None => actual.is_empty(),
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    (a / crate::arithmetic::gcd(a, b)).saturating_mul(b)
}

#[cfg(test)]
mod tests {
    use super::arrow::*;
    use super::*;

    fn q_pattern() -> Pattern {
        Pattern::new(false)
            .vertex("u", 1)
            .vertex("w1", 1)
            .vertex("w2", 1)
            .vertex("v", 1)
            .edge("u", "w1", plain())
            .edge("w1", "v", plain())
            .edge("w2", "v", plain())
    }

    #[test]
    fn exact_matching() {
        let pat = Pattern::new(true)
            .vertex("p", 2)
            .vertex("q", 1)
            .vertex("r", 1)
            .edge("p", "q", weak_from_square())
            .edge("q", "r", plain());
        let m = pat.matches(&HolderGraph::of(1827).unwrap()).unwrap();
        assert_eq!(m["p"], 3);
        assert_eq!(m["q"], 7);
        assert_eq!(m["r"], 29);
        // Strong instead of weak.
        assert!(pat.matches(&HolderGraph::of(32661).unwrap()).is_none());
    }

    #[test]
    fn fixed_labels() {
        let pat =
            Pattern::new(true)
                .fixed("q", 1, 3)
                .vertex("p", 2)
                .edge("q", "p", strong_into_square());
        assert!(pat.matches(&HolderGraph::of(3 * 49).unwrap()).is_some());
        assert!(pat.matches(&HolderGraph::of(5 * 121).unwrap()).is_none());
    }

    #[test]
    fn realize_smallest() {
        assert_eq!(q_pattern().realize(10_000).unwrap().0, 7455);
        assert!(q_pattern().realize(7454).is_none());
        let phi2 = Pattern::new(false)
            .vertex("a", 1)
            .vertex("b", 1)
            .edge("a", "b", plain());
        assert_eq!(phi2.realize(10).unwrap().0, 6);
    }

    #[test]
    fn realize_agrees_with_scan() {
        let target = q_pattern();
        let scanned =
            (1..=10_000u64).find(|&n| target.matches(&HolderGraph::of(n).unwrap()).is_some());
        assert_eq!(scanned, Some(7455));
    }
}
