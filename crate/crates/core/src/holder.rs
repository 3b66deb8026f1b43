//! Square-free group counting on abstract Hölder graphs.
//!
//! For a square-free `n` with prime set `Γ`,
//!
//! ```text
//! g(n) = Σ_{π ⊆ Γ} Π_{p ∉ π} (p^{v(p,π)} - 1) / (p - 1)
//! ```
//!
//! where `v(p, π)` counts the members of `π` that `p` points to. A factor is
//! 0 when `v = 0` and 1 when `v = 1`, so only vertices of out-degree at least
//! 2 ever need their numeric label.

use serde::Serialize;
use thiserror::Error;

use crate::arithmetic::Factorization;
use crate::cubefree::g_prime_power;
use crate::graph::{HolderGraph, MAX_SUBSET_VERTICES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HolderError {
    #[error("vertex {0} has out-degree >= 2 but no prime label")]
    MissingLabel(usize),
    #[error("the label of vertex {0} does not affect g and cannot be read")]
    IrrelevantLabel(usize),
    #[error("{0} vertices exceed the subset enumeration limit of {MAX_SUBSET_VERTICES}")]
    TooManyVertices(usize),
    #[error("vertex index {0} out of range")]
    NoSuchVertex(usize),
    #[error("edge {0} -> {1} would be a self-loop or duplicate")]
    BadEdge(usize, usize),
    #[error("graph contains a directed cycle")]
    Cyclic,
    #[error("graph is not square-free")]
    NotSquareFree,
    #[error("splice vertex {0} must have out-degree 0")]
    NotSinkVertex(usize),
    #[error("label {0} is not prime")]
    NotPrime(u64),
    #[error("exponent {0} has no prime-power count")]
    FourthPower(u32),
    #[error("arithmetic overflow evaluating g")]
    Overflow,
}

/// Numeric label of a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Label {
    Prime(u64),
    /// The vertex's value never enters the count.
    Irrelevant,
}

impl Label {
    pub fn prime(&self) -> Option<u64> {
        match *self {
            Label::Prime(p) => Some(p),
            Label::Irrelevant => None,
        }
    }
}

/// A directed acyclic graph with optional prime labels. Edges are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbstractGraph {
    labels: Vec<Label>,
    edges: Vec<(usize, usize)>,
}

impl AbstractGraph {
    pub fn new(labels: Vec<Label>, edges: Vec<(usize, usize)>) -> Result<Self, HolderError> {
        let n = labels.len();
        for &l in &labels {
            if let Label::Prime(p) = l {
                if !crate::arithmetic::is_prime(p) {
                    return Err(HolderError::NotPrime(p));
                }
            }
        }
        let mut seen = std::collections::HashSet::new();
        for &(a, b) in &edges {
            if a >= n {
                return Err(HolderError::NoSuchVertex(a));
            }
            if b >= n {
                return Err(HolderError::NoSuchVertex(b));
            }
            if a == b || !seen.insert((a, b)) {
                return Err(HolderError::BadEdge(a, b));
            }
        }
        let mut edges = edges;
        edges.sort_unstable();
        let g = AbstractGraph { labels, edges };
        if g.topological_order().is_none() {
            return Err(HolderError::Cyclic);
        }
        Ok(g)
    }

    /// All labels irrelevant.
    pub fn unlabeled(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, HolderError> {
        Self::new(vec![Label::Irrelevant; n], edges)
    }

    pub fn empty() -> Self {
        AbstractGraph {
            labels: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn single() -> Self {
        AbstractGraph {
            labels: vec![Label::Irrelevant],
            edges: Vec::new(),
        }
    }

    /// Directed path `0 → 1 → … → k-1`.
    pub fn path(k: usize) -> Self {
        AbstractGraph {
            labels: vec![Label::Irrelevant; k],
            edges: (1..k).map(|i| (i - 1, i)).collect(),
        }
    }

    /// The square-free Hölder graph with vertex labels set to the primes.
    pub fn from_holder(g: &HolderGraph) -> Result<Self, HolderError> {
        if !g.is_square_free() {
            return Err(HolderError::NotSquareFree);
        }
        Ok(AbstractGraph {
            labels: g.vertices().iter().map(|v| Label::Prime(v.prime)).collect(),
            edges: g.edges().iter().map(|e| (e.from, e.to)).collect(),
        })
    }

    pub fn with_label(mut self, v: usize, p: u64) -> Result<Self, HolderError> {
        if v >= self.len() {
            return Err(HolderError::NoSuchVertex(v));
        }
        if !crate::arithmetic::is_prime(p) {
            return Err(HolderError::NotPrime(p));
        }
        self.labels[v] = Label::Prime(p);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a, b))
    }

    /// `(in-degree, out-degree)`.
    pub fn degrees(&self, v: usize) -> (usize, usize) {
        let inn = self.edges.iter().filter(|e| e.1 == v).count();
        let out = self.edges.iter().filter(|e| e.0 == v).count();
        (inn, out)
    }

    /// Out-degree at most 1 everywhere, so `g` is label-independent.
    pub fn is_regular(&self) -> bool {
        (0..self.len()).all(|v| self.degrees(v).1 <= 1)
    }

    pub fn out_masks(&self) -> Vec<u32> {
        let mut masks = vec![0u32; self.len()];
        for &(a, b) in &self.edges {
            masks[a] |= 1 << b;
        }
        masks
    }

    fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.len();
        let mut indeg = vec![0usize; n];
        for &(_, b) in &self.edges {
            indeg[b] += 1;
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).rev().collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = stack.pop() {
            order.push(v);
            for &(a, b) in &self.edges {
                if a == v {
                    indeg[b] -= 1;
                    if indeg[b] == 0 {
                        stack.push(b);
                    }
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Deletes `v` and its incident edges; later indices shift down by one.
    pub fn remove_vertex(&self, v: usize) -> Result<Self, HolderError> {
        if v >= self.len() {
            return Err(HolderError::NoSuchVertex(v));
        }
        let shift = |x: usize| if x > v { x - 1 } else { x };
        let mut labels = self.labels.clone();
        labels.remove(v);
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| a != v && b != v)
            .map(|&(a, b)| (shift(a), shift(b)))
            .collect();
        Ok(AbstractGraph { labels, edges })
    }

    /// Disjoint union; `other`'s vertices are appended after `self`'s.
    pub fn disjoint_union(&self, other: &AbstractGraph) -> AbstractGraph {
        let off = self.len();
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(a, b)| (a + off, b + off)));
        AbstractGraph { labels, edges }
    }

    fn add_edge_unchecked(mut self, a: usize, b: usize) -> Self {
        self.edges.push((a, b));
        self.edges.sort_unstable();
        self
    }
}

/// `v(p, π)`: the number of members of `subset` that `v` points to.
pub fn multiplicity(g: &AbstractGraph, v: usize, subset: u32) -> u32 {
    (g.out_masks()[v] & subset).count_ones()
}

/// `(p^k - 1) / (p - 1)` for a vertex with `k` out-neighbours inside `π`.
fn factor(g: &AbstractGraph, v: usize, k: u32) -> Result<u64, HolderError> {
    match k {
        0 => Ok(0),
        1 => Ok(1),
        _ => match g.labels[v] {
            Label::Prime(p) => geometric(p, k).ok_or(HolderError::Overflow),
            Label::Irrelevant => Err(HolderError::IrrelevantLabel(v)),
        },
    }
}

/// `1 + p + … + p^(k-1)`.
fn geometric(p: u64, k: u32) -> Option<u64> {
    let mut total = 0u64;
    let mut term = 1u64;
    for i in 0..k {
        total = total.checked_add(term)?;
        if i + 1 < k {
            term = term.checked_mul(p)?;
        }
    }
    Some(total)
}

fn check_evaluable(g: &AbstractGraph) -> Result<Vec<u32>, HolderError> {
    if g.len() > MAX_SUBSET_VERTICES {
        return Err(HolderError::TooManyVertices(g.len()));
    }
    let masks = g.out_masks();
    for (v, m) in masks.iter().enumerate() {
        if m.count_ones() >= 2 && g.labels[v] == Label::Irrelevant {
            return Err(HolderError::MissingLabel(v));
        }
    }
    Ok(masks)
}

fn summand_with(g: &AbstractGraph, masks: &[u32], subset: u32) -> Result<u64, HolderError> {
    let mut prod = 1u64;
    for (v, &m) in masks.iter().enumerate() {
        if subset >> v & 1 == 1 {
            continue;
        }
        let f = factor(g, v, (m & subset).count_ones())?;
        if f == 0 {
            return Ok(0);
        }
        prod = prod.checked_mul(f).ok_or(HolderError::Overflow)?;
    }
    Ok(prod)
}

/// The summand `S(π, Γ)` for the subset encoded as a bitmask.
pub fn summand(g: &AbstractGraph, subset: u32) -> Result<u64, HolderError> {
    let masks = check_evaluable(g)?;
    summand_with(g, &masks, subset)
}

fn subset_sum(g: &AbstractGraph, required: u32) -> Result<u64, HolderError> {
    let masks = check_evaluable(g)?;
    let full: u32 = if g.is_empty() {
        0
    } else {
        u32::MAX >> (32 - g.len())
    };
    let mut total = 0u64;
    let mut subset = 0u32;
    loop {
        if subset & required == required {
            let s = summand_with(g, &masks, subset)?;
            total = total.checked_add(s).ok_or(HolderError::Overflow)?;
        }
        if subset == full {
            break;
        }
        subset += 1;
    }
    Ok(total)
}

/// Hölder's sum over all subsets of the vertex set.
pub fn g_holder(g: &AbstractGraph) -> Result<u64, HolderError> {
    subset_sum(g, 0)
}

/// Hölder's sum restricted to subsets containing `v`.
pub fn g_rooted(g: &AbstractGraph, v: usize) -> Result<u64, HolderError> {
    if v >= g.len() {
        return Err(HolderError::NoSuchVertex(v));
    }
    subset_sum(g, 1 << v)
}

/// Number of central subsets: those whose summand is nonzero.
pub fn central_count(g: &AbstractGraph) -> Result<u64, HolderError> {
    if g.len() > MAX_SUBSET_VERTICES {
        return Err(HolderError::TooManyVertices(g.len()));
    }
    let masks = g.out_masks();
    let count = (0..1u64 << g.len())
        .filter(|&s| {
            let s = s as u32;
            (0..g.len()).all(|v| s >> v & 1 == 1 || masks[v] & s != 0)
        })
        .count();
    Ok(count as u64)
}

/// `Γ → Λ`: the disjoint union plus an arrow from `gamma_sink` (a vertex of
/// out-degree 0 in `gamma`) to `lambda_vertex`. Then
/// `g(Γ → Λ) = g(Γ) g(Λ) + g(Γ - {gamma_sink}) g(Λ; lambda_vertex)`.
///
/// `lambda`'s vertices follow `gamma`'s in the result.
pub fn splice(
    gamma: &AbstractGraph,
    gamma_sink: usize,
    lambda: &AbstractGraph,
    lambda_vertex: usize,
) -> Result<AbstractGraph, HolderError> {
    if gamma_sink >= gamma.len() {
        return Err(HolderError::NoSuchVertex(gamma_sink));
    }
    if lambda_vertex >= lambda.len() {
        return Err(HolderError::NoSuchVertex(lambda_vertex));
    }
    if gamma.degrees(gamma_sink).1 != 0 {
        return Err(HolderError::NotSinkVertex(gamma_sink));
    }
    Ok(gamma
        .disjoint_union(lambda)
        .add_edge_unchecked(gamma_sink, gamma.len() + lambda_vertex))
}

/// `Γ → v`: a new vertex after `sink`. `g(Γ → v) = g(Γ) + g(Γ - {sink})`.
pub fn extend_forward(g: &AbstractGraph, sink: usize) -> Result<AbstractGraph, HolderError> {
    splice(g, sink, &AbstractGraph::single(), 0)
}

/// `v → Γ`: a new vertex pointing at `target`. `g(v → Γ) = g(Γ) + g(Γ; target)`.
///
/// The new vertex is index 0; the old vertices shift up by one.
pub fn extend_backward(g: &AbstractGraph, target: usize) -> Result<AbstractGraph, HolderError> {
    splice(&AbstractGraph::single(), 0, g, target)
}

/// `g(Φ_k) = F_{k+1}` with `F_1 = F_2 = 1`; `k = 0` is the empty graph.
///
/// # Panics
/// If the result does not fit in `u128` (`k > 184`).
pub fn path_count(k: u32) -> u128 {
    let (mut prev, mut cur) = (0u128, 1u128); // F_0, F_1
    for _ in 0..k {
        let next = prev.checked_add(cur).expect("Fibonacci overflow");
        prev = cur;
        cur = next;
    }
    cur
}

/// `2^r + (p^s - 1)/(p - 1)`: a lower bound on `g(Γ)` for any graph with a
/// vertex labeled `p` of in-degree `r` and out-degree `s`.
pub fn lower_bound_degree(p: u64, r: u32, s: u32) -> u64 {
    (1u64 << r) + geometric(p, s).expect("lower bound overflow")
}

/// `g(p_1^{α_1}) ⋯ g(p_s^{α_s}) + s - 1` for a connected order.
pub fn lower_bound_connected(f: &Factorization) -> Result<u64, HolderError> {
    let mut prod = 1u64;
    for &(p, a) in f.entries() {
        match g_prime_power(p, a).value() {
            Some(v) => prod *= v,
            None => return Err(HolderError::FourthPower(a)),
        }
    }
    Ok(prod + f.len().saturating_sub(1) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::HolderGraph;

    fn star(p: u64) -> AbstractGraph {
        AbstractGraph::unlabeled(3, vec![(0, 1), (0, 2)])
            .unwrap()
            .with_label(0, p)
            .unwrap()
    }

    /// `K`: two arrows into vertex 2.
    fn k_graph() -> AbstractGraph {
        AbstractGraph::unlabeled(3, vec![(0, 2), (1, 2)]).unwrap()
    }

    #[test]
    fn holder_examples() {
        let g = AbstractGraph::from_holder(&HolderGraph::of(30).unwrap()).unwrap();
        assert_eq!(g_holder(&g), Ok(4));
        assert_eq!(g_holder(&AbstractGraph::single()), Ok(1));
        assert_eq!(g_holder(&star(5)), Ok(7));
        assert_eq!(g_holder(&AbstractGraph::empty()), Ok(1));
    }

    #[test]
    fn summands_of_30() {
        let g = AbstractGraph::from_holder(&HolderGraph::of(30).unwrap()).unwrap();
        // Vertex order 2, 3, 5.
        assert_eq!(summand(&g, 0b111), Ok(1));
        assert_eq!(summand(&g, 0b110), Ok(3));
        assert_eq!(summand(&g, 0b100), Ok(0));
        assert_eq!(multiplicity(&g, 0, 0b110), 2);
        assert_eq!(multiplicity(&g, 0, 0b010), 1);
    }

    #[test]
    fn missing_label() {
        let g = AbstractGraph::unlabeled(3, vec![(0, 1), (0, 2)]).unwrap();
        assert_eq!(g_holder(&g), Err(HolderError::MissingLabel(0)));
    }

    #[test]
    fn rejects_cycles_and_bad_edges() {
        assert_eq!(
            AbstractGraph::unlabeled(2, vec![(0, 1), (1, 0)]),
            Err(HolderError::Cyclic)
        );
        assert_eq!(
            AbstractGraph::unlabeled(2, vec![(0, 0)]),
            Err(HolderError::BadEdge(0, 0))
        );
        assert_eq!(
            AbstractGraph::unlabeled(2, vec![(0, 2)]),
            Err(HolderError::NoSuchVertex(2))
        );
        assert_eq!(
            AbstractGraph::single().with_label(0, 9),
            Err(HolderError::NotPrime(9))
        );
    }

    #[test]
    fn too_many_vertices() {
        let g = AbstractGraph::unlabeled(25, vec![]).unwrap();
        assert_eq!(g_holder(&g), Err(HolderError::TooManyVertices(25)));
    }

    #[test]
    fn rooted_examples() {
        let p2 = AbstractGraph::path(2);
        assert_eq!(g_rooted(&p2, 0), Ok(1));
        assert_eq!(g_rooted(&p2, 1), Ok(2));
        assert_eq!(g_rooted(&AbstractGraph::single(), 0), Ok(1));
    }

    #[test]
    fn splice_examples() {
        let s = splice(&AbstractGraph::single(), 0, &AbstractGraph::single(), 0).unwrap();
        assert_eq!(s, AbstractGraph::path(2));
        assert_eq!(g_holder(&s), Ok(2));

        // K from a single vertex spliced onto the sink of Φ_2.
        let k = splice(&AbstractGraph::single(), 0, &AbstractGraph::path(2), 1).unwrap();
        assert_eq!(g_holder(&k), Ok(4));
        assert_eq!(g_holder(&k), g_holder(&k_graph()));

        // Φ_m → Φ_{n-1} = Φ_{m+n-1}.
        for m in 1..8u32 {
            for n in 2..8u32 {
                let a = AbstractGraph::path(m as usize);
                let b = AbstractGraph::path(n as usize - 1);
                let s = splice(&a, m as usize - 1, &b, 0).unwrap();
                assert_eq!(s, AbstractGraph::path((m + n - 1) as usize));
                let lhs = path_count(m + n - 1);
                let rhs = path_count(m) * path_count(n - 1) + path_count(m - 1) * path_count(n - 2);
                assert_eq!(lhs, rhs);
                assert_eq!(u128::from(g_holder(&s).unwrap()), lhs);
            }
        }

        let p2 = AbstractGraph::path(2);
        assert_eq!(splice(&p2, 0, &p2, 0), Err(HolderError::NotSinkVertex(0)));
    }

    #[test]
    fn extension_examples() {
        // Q: a new vertex pointing at w_1 in K.
        let q = extend_backward(&k_graph(), 0).unwrap();
        assert_eq!(g_holder(&q), Ok(6));
        assert_eq!(
            g_holder(&k_graph()).unwrap() + g_rooted(&k_graph(), 0).unwrap(),
            6
        );

        // K → f_1.
        let kf = extend_forward(&k_graph(), 2).unwrap();
        assert_eq!(g_holder(&kf), Ok(5));
        assert_eq!(
            extend_forward(&k_graph(), 0),
            Err(HolderError::NotSinkVertex(0))
        );

        let p = extend_forward(&AbstractGraph::single(), 0).unwrap();
        assert_eq!(g_holder(&p), Ok(2));

        // (K → f_1) → f_2.
        let kff = extend_forward(&kf, 3).unwrap();
        assert_eq!(g_holder(&kff), Ok(9));
    }

    #[test]
    fn fibonacci() {
        assert_eq!(path_count(5), 8);
        assert_eq!(path_count(1), 1);
        assert_eq!(path_count(0), 1);
        assert_eq!(path_count(10), 89);
        for k in 0..=20 {
            assert_eq!(
                u128::from(g_holder(&AbstractGraph::path(k)).unwrap()),
                path_count(k as u32)
            );
        }
    }

    #[test]
    fn degree_bound() {
        assert_eq!(lower_bound_degree(7, 2, 0), 4);
        assert_eq!(lower_bound_degree(7, 0, 0), 1);
        assert_eq!(lower_bound_degree(3, 1, 2), 6);
    }

    #[test]
    fn connected_bound() {
        let f = Factorization::from_pairs([(3, 2), (5, 1), (7, 1)]).unwrap();
        assert_eq!(lower_bound_connected(&f), Ok(4));
        let f = Factorization::from_pairs([(5, 1)]).unwrap();
        assert_eq!(lower_bound_connected(&f), Ok(1));
        let f = Factorization::from_pairs([(3, 3), (5, 1), (7, 1)]).unwrap();
        assert_eq!(lower_bound_connected(&f), Ok(7));
        let f = Factorization::from_pairs([(3, 4)]).unwrap();
        assert_eq!(lower_bound_connected(&f), Err(HolderError::FourthPower(4)));
    }
}
