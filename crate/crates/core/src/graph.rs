//! Hölder graphs of integers.
//!
//! The vertices of `Γ(n)` are the maximal prime powers `p^α` dividing `n`.
//! There is an edge `p^α → q^β` when `q^j ≡ 1 (mod p^i)` for some
//! `1 ≤ i ≤ α` and `1 ≤ j ≤ β`; the edge carries the full set of such
//! `(i, j)` pairs as its [`EdgeProfile`]. For square-free `n` this is the
//! classical graph with `p → q` exactly when `q ≡ 1 (mod p)`.
//!
//! Vertex naming follows the original source: a vertex is *initial* when its
//! out-degree is 0 and *terminal* when its in-degree is 0. This is the
//! reverse of the usual source/sink reading.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::arithmetic::{factorize, pow_mod, ArithmeticError, Factorization};

/// Largest vertex count for which subsets are enumerated.
pub const MAX_SUBSET_VERTICES: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph is not square-free")]
    NotSquareFree,
    #[error("{0} vertices exceed the subset enumeration limit of {MAX_SUBSET_VERTICES}")]
    TooManyVertices(usize),
    #[error("no vertex with prime {0}")]
    NoSuchVertex(u64),
    #[error("edge {from} -> {to} is not between a square and a first power")]
    NotSquareEdge { from: String, to: String },
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PrimePower {
    pub prime: u64,
    pub exponent: u32,
}

impl PrimePower {
    pub fn new(prime: u64, exponent: u32) -> Self {
        PrimePower { prime, exponent }
    }

    pub fn value(&self) -> u64 {
        self.prime.pow(self.exponent)
    }

    pub fn name(&self) -> String {
        format!("{}^{}", self.prime, self.exponent)
    }
}

/// The pairs `(i, j)` with `q^j ≡ 1 (mod p^i)` for an edge `p^α → q^β`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct EdgeProfile(BTreeSet<(u32, u32)>);

impl EdgeProfile {
    /// Computes the profile from `from` to `to`; empty when there is no edge.
    pub fn between(from: PrimePower, to: PrimePower) -> Self {
        let mut pairs = BTreeSet::new();
        if from.prime == to.prime {
            return EdgeProfile(pairs);
        }
        let mut modulus = 1u64;
        for i in 1..=from.exponent {
            modulus *= from.prime;
            for j in 1..=to.exponent {
                if pow_mod(to.prime, u64::from(j), modulus) == 1 % modulus {
                    pairs.insert((i, j));
                }
            }
        }
        EdgeProfile(pairs)
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        EdgeProfile(pairs.into_iter().collect())
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, pair: (u32, u32)) -> bool {
        self.0.contains(&pair)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Holds for every profile produced by [`EdgeProfile::between`].
    pub fn is_downward_closed(&self) -> bool {
        self.0
            .iter()
            .all(|&(i, j)| (1..i).all(|k| self.0.contains(&(k, j))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strength {
    Weak,
    Strong,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub profile: EdgeProfile,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HolderGraph {
    n: u64,
    vertices: Vec<PrimePower>,
    edges: Vec<Edge>,
}

/// Generalized Hölder graph of the number with factorization `f`.
pub fn build_graph(f: &Factorization) -> HolderGraph {
    let vertices: Vec<PrimePower> = f
        .entries()
        .iter()
        .map(|&(p, a)| PrimePower::new(p, a))
        .collect();
    let mut edges = Vec::new();
    for (a, &from) in vertices.iter().enumerate() {
        for (b, &to) in vertices.iter().enumerate() {
            if a == b {
                continue;
            }
            let profile = EdgeProfile::between(from, to);
            if !profile.is_empty() {
                edges.push(Edge {
                    from: a,
                    to: b,
                    profile,
                });
            }
        }
    }
    HolderGraph {
        n: f.value().unwrap_or(0),
        vertices,
        edges,
    }
}

impl HolderGraph {
    pub fn of(n: u64) -> Result<Self, GraphError> {
        Ok(build_graph(&factorize(n)?))
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn vertices(&self) -> &[PrimePower] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_square_free(&self) -> bool {
        self.vertices.iter().all(|v| v.exponent == 1)
    }

    pub fn index_of(&self, prime: u64) -> Option<usize> {
        self.vertices.iter().position(|v| v.prime == prime)
    }

    pub fn edge(&self, from: usize, to: usize) -> Option<&Edge> {
        self.edges.iter().find(|e| e.from == from && e.to == to)
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edge(from, to).is_some()
    }

    pub fn factorization(&self) -> Factorization {
        Factorization::from_pairs(self.vertices.iter().map(|v| (v.prime, v.exponent)))
            .expect("vertices are primes")
    }

    /// `(in-degree, out-degree)` of vertex `v`.
    pub fn degrees(&self, v: usize) -> (usize, usize) {
        let inn = self.edges.iter().filter(|e| e.to == v).count();
        let out = self.edges.iter().filter(|e| e.from == v).count();
        (inn, out)
    }

    /// Vertices of out-degree 0.
    pub fn initial_vertices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&v| self.degrees(v).1 == 0)
            .collect()
    }

    /// Vertices of in-degree 0.
    pub fn terminal_vertices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&v| self.degrees(v).0 == 0)
            .collect()
    }

    /// Weak/strong classification of an edge between `p^2` and `q`.
    pub fn edge_strength(&self, edge: &Edge) -> Result<Strength, GraphError> {
        let from = self.vertices[edge.from];
        let to = self.vertices[edge.to];
        let p = &edge.profile;
        match (from.exponent, to.exponent) {
            // p^2 -> q: weak iff p || q - 1.
            (2, 1) if p.contains((2, 1)) => Ok(Strength::Strong),
            (2, 1) => Ok(Strength::Weak),
            // q -> p^2: strong iff q | p - 1, weak iff only q | p + 1.
            (1, 2) if p.contains((1, 1)) => Ok(Strength::Strong),
            (1, 2) => Ok(Strength::Weak),
            _ => Err(GraphError::NotSquareEdge {
                from: from.name(),
                to: to.name(),
            }),
        }
    }

    /// Induced subgraph on `keep` (indices into [`vertices`](Self::vertices)).
    pub fn induced(&self, keep: &[usize]) -> HolderGraph {
        let mut map = vec![usize::MAX; self.len()];
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for (new, &old) in sorted.iter().enumerate() {
            map[old] = new;
        }
        let vertices: Vec<PrimePower> = sorted.iter().map(|&v| self.vertices[v]).collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| map[e.from] != usize::MAX && map[e.to] != usize::MAX)
            .map(|e| Edge {
                from: map[e.from],
                to: map[e.to],
                profile: e.profile.clone(),
            })
            .collect();
        let n = vertices
            .iter()
            .try_fold(1u64, |acc, v| acc.checked_mul(v.value()))
            .unwrap_or(0);
        HolderGraph { n, vertices, edges }
    }

    /// Out-neighbour bitmask per vertex.
    pub(crate) fn out_masks(&self) -> Vec<u32> {
        let mut masks = vec![0u32; self.len()];
        for e in &self.edges {
            masks[e.from] |= 1 << e.to;
        }
        masks
    }

    /// Subsets `π` such that every vertex outside `π` has an edge into `π`.
    pub fn central_subsets(&self) -> Result<Vec<Vec<u64>>, GraphError> {
        if !self.is_square_free() {
            return Err(GraphError::NotSquareFree);
        }
        if self.len() > MAX_SUBSET_VERTICES {
            return Err(GraphError::TooManyVertices(self.len()));
        }
        let out = self.out_masks();
        let full = (1u32 << self.len()) - 1;
        Ok((0..=full)
            .filter(|&pi| (0..self.len()).all(|v| pi >> v & 1 == 1 || out[v] & pi != 0))
            .map(|pi| {
                (0..self.len())
                    .filter(|v| pi >> v & 1 == 1)
                    .map(|v| self.vertices[v].prime)
                    .collect()
            })
            .collect())
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph holder {\n");
        for v in &self.vertices {
            let _ = writeln!(out, "  \"{}\";", v.name());
        }
        for e in &self.edges {
            let style = match self.edge_strength(e) {
                Ok(Strength::Weak) => " [style=dashed]",
                _ => "",
            };
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\"{};",
                self.vertices[e.from].name(),
                self.vertices[e.to].name(),
                style
            );
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.n,
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexJson {
                    p: v.prime,
                    a: v.exponent,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson {
                    from: self.vertices[e.from].name(),
                    to: self.vertices[e.to].name(),
                    strength: match self.edge_strength(e) {
                        Ok(Strength::Weak) => "weak",
                        Ok(Strength::Strong) => "strong",
                        Err(_) => "n/a",
                    },
                    pairs: e.profile.pairs().map(|(i, j)| [i, j]).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphJson {
    pub n: u64,
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexJson {
    pub p: u64,
    pub a: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeJson {
    pub from: String,
    pub to: String,
    pub strength: &'static str,
    pub pairs: Vec<[u32; 2]>,
}

/// Connected components (weak connectivity) of a Hölder graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    /// Components with at least two vertices, ordered by smallest prime.
    pub components: Vec<HolderGraph>,
    /// Isolated vertices, ascending by prime.
    pub isolated: Vec<PrimePower>,
}

impl Decomposition {
    /// Product of all isolated vertex values.
    pub fn isolated_product(&self) -> u64 {
        self.isolated.iter().map(PrimePower::value).product()
    }

    /// Product of the isolated primes to the first power; every group of
    /// this order is cyclic. Isolated higher powers are not included.
    pub fn cyclic_part(&self) -> u64 {
        self.isolated
            .iter()
            .filter(|v| v.exponent == 1)
            .map(PrimePower::value)
            .product()
    }

    /// Isolated prime powers with exponent at least 2.
    pub fn isolated_powers(&self) -> impl Iterator<Item = PrimePower> + '_ {
        self.isolated.iter().copied().filter(|v| v.exponent >= 2)
    }
}

pub fn decompose(g: &HolderGraph) -> Decomposition {
    let n = g.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in g.edges() {
        let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; n];
    for v in 0..n {
        let r = find(&mut parent, v);
        if root_slot[r] == usize::MAX {
            root_slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[r]].push(v);
    }
    let mut components = Vec::new();
    let mut isolated = Vec::new();
    for group in groups {
        if group.len() == 1 {
            isolated.push(g.vertices()[group[0]]);
        } else {
            components.push(g.induced(&group));
        }
    }
    Decomposition {
        components,
        isolated,
    }
}
