//! Closed forms for small cube-free families and the `g(n)` dispatcher.
//!
//! The family formulas are stated for odd primes. They are evaluated for
//! every odd input; inputs with an even prime in a squared position are
//! reported as unsupported rather than guessed.

use serde::Serialize;
use thiserror::Error;

use crate::arithmetic::{factorize, is_prime, w, ArithmeticError, Factorization};
use crate::graph::{build_graph, decompose, HolderGraph, Strength};
use crate::holder::{g_holder, lower_bound_connected, AbstractGraph};

/// Proven lower bound on `g(p^α)` for `α ≥ 4`.
pub const FOURTH_POWER_BOUND: u64 = 14;

/// Lower bound for the `p^2 q r s` shapes shown to exceed 7 groups.
pub const INADMISSIBLE_BOUND: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnsupportedReason {
    FourthPower,
    EvenSquareForm,
    UnclassifiedShape,
    TooLarge,
}

impl UnsupportedReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            UnsupportedReason::FourthPower => "fourth-power",
            UnsupportedReason::EvenSquareForm => "even-square-form",
            UnsupportedReason::UnclassifiedShape => "unclassified-shape",
            UnsupportedReason::TooLarge => "too-large",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum CountResult {
    Exact {
        value: u64,
    },
    Unsupported {
        reason: UnsupportedReason,
        lower_bound: Option<u64>,
    },
}

impl CountResult {
    pub fn exact(value: u64) -> Self {
        CountResult::Exact { value }
    }

    pub fn unsupported(reason: UnsupportedReason, lower_bound: Option<u64>) -> Self {
        CountResult::Unsupported {
            reason,
            lower_bound,
        }
    }

    pub fn value(&self) -> Option<u64> {
        match *self {
            CountResult::Exact { value } => Some(value),
            CountResult::Unsupported { .. } => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.value().is_some()
    }

    /// The exact value, or the proven lower bound when unsupported.
    pub fn lower_bound(&self) -> Option<u64> {
        match *self {
            CountResult::Exact { value } => Some(value),
            CountResult::Unsupported { lower_bound, .. } => lower_bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("the formula needs odd primes")]
    EvenPrime,
    #[error("invalid arguments: {0}")]
    InvalidArguments(&'static str),
}

impl FormulaError {
    fn into_count(self) -> CountResult {
        match self {
            FormulaError::EvenPrime => {
                CountResult::unsupported(UnsupportedReason::EvenSquareForm, None)
            }
            FormulaError::InvalidArguments(_) => {
                CountResult::unsupported(UnsupportedReason::UnclassifiedShape, None)
            }
        }
    }
}

fn require_odd_distinct(primes: &[u64]) -> Result<(), FormulaError> {
    if primes.iter().any(|&p| !is_prime(p)) {
        return Err(FormulaError::InvalidArguments("not prime"));
    }
    for (i, p) in primes.iter().enumerate() {
        if primes[..i].contains(p) {
            return Err(FormulaError::InvalidArguments("primes must be distinct"));
        }
    }
    if primes.contains(&2) {
        return Err(FormulaError::EvenPrime);
    }
    Ok(())
}

/// `g(p^a)` for `a ≤ 3`; unsupported with bound 14 beyond.
pub fn g_prime_power(_p: u64, a: u32) -> CountResult {
    match a {
        0 | 1 => CountResult::exact(1),
        2 => CountResult::exact(2),
        3 => CountResult::exact(5),
        _ => CountResult::unsupported(UnsupportedReason::FourthPower, Some(FOURTH_POWER_BOUND)),
    }
}

/// `g(2p^2)` for odd `p`.
pub fn g_2p2(p: u64) -> Result<u64, FormulaError> {
    require_odd_distinct(&[p])?;
    Ok(5)
}

/// `g(p^2 q)` for distinct odd primes.
pub fn g_p2q(p: u64, q: u64) -> Result<u64, FormulaError> {
    require_odd_distinct(&[p, q])?;
    let (p, q) = (p as i128, q as i128);
    let total = 2
        + (q + 5) / 2 * w(p - 1, q) as i128
        + w(p + 1, q) as i128
        + 2 * w(q - 1, p) as i128
        + w(q - 1, p * p) as i128;
    Ok(total as u64)
}

/// `g(p^3 q)` for distinct odd primes.
///
/// Two of the coefficients are thirds and sixths; the sum is accumulated in
/// sixths and must come out integral.
pub fn g_p3q(p: u64, q: u64) -> Result<u64, FormulaError> {
    require_odd_distinct(&[p, q])?;
    let (p, q) = (p as i128, q as i128);
    let wi = |r: i128, s: i128| w(r, s) as i128;
    let q_divides_pm1 = wi(p - 1, q);
    let sixths = 6 * 5
        + (q * q + 13 * q + 36) * q_divides_pm1
        + 6 * (p + 5) * wi(q - 1, p)
        + 4 * wi(q - 1, 3) * q_divides_pm1
        + 6 * wi((p + 1) * (p * p + p + 1), q) * (1 - q_divides_pm1)
        + 6 * wi(p + 1, q)
        + 12 * wi(q - 1, p * p)
        + 6 * wi(q - 1, p * p * p);
    assert_eq!(sixths % 6, 0, "g(p^3 q) not integral for p = {p}, q = {q}");
    Ok((sixths / 6) as u64)
}

/// `g(p^2 q^2)` for odd primes `p < q`.
pub fn g_p2q2(p: u64, q: u64) -> Result<u64, FormulaError> {
    require_odd_distinct(&[p, q])?;
    if p >= q {
        return Err(FormulaError::InvalidArguments("g(p^2 q^2) needs p < q"));
    }
    let (p, q) = (p as i128, q as i128);
    let wi = |r: i128, s: i128| w(r, s) as i128;
    let total = 4
        + (p * p + p + 4) / 2 * wi(q - 1, p * p)
        + (p + 6) * wi(q - 1, p)
        + 2 * wi(q + 1, p)
        + wi(q + 1, p * p);
    Ok(total as u64)
}

/// `g(p^2 q r) = h + k` for distinct odd primes with `q < r`.
pub fn g_p2qr(p: u64, q: u64, r: u64) -> Result<u64, FormulaError> {
    require_odd_distinct(&[p, q, r])?;
    if q >= r {
        return Err(FormulaError::InvalidArguments("g(p^2 q r) needs q < r"));
    }
    let (p, q, r) = (p as i128, q as i128, r as i128);
    let wi = |a: i128, b: i128| w(a, b) as i128;
    let p2 = p * p;

    let h = 2
        + wi(p2 - 1, q * r)
        + 2 * wi(r - 1, p * q)
        + wi(r - 1, p) * wi(p - 1, q)
        + wi(r - 1, p2 * q)
        + wi(r - 1, p) * wi(q - 1, p)
        + 2 * wi(q - 1, p)
        + 3 * wi(p - 1, q)
        + 2 * wi(r - 1, p)
        + 2 * wi(r - 1, q)
        + wi(r - 1, p2)
        + wi(q - 1, p2)
        + wi(p + 1, r)
        + wi(p + 1, q);

    let k = (q * r + 1) / 2 * wi(p - 1, q * r)
        + (r + 5) / 2 * wi(p - 1, r) * (1 + wi(p - 1, q))
        + (p2 - p) * wi(q - 1, p2) * wi(r - 1, p2)
        + (p - 1)
            * (wi(q - 1, p2) * wi(r - 1, p)
                + wi(r - 1, p2) * wi(q - 1, p)
                + 2 * wi(r - 1, p) * wi(q - 1, p))
        + (q - 1) * (q + 4) / 2 * wi(p - 1, q) * wi(r - 1, q)
        + (q - 1) / 2
            * (wi(p + 1, q) * wi(r - 1, q)
                + wi(p - 1, q)
                + wi(p - 1, q * r)
                + 2 * wi(r - 1, p * q) * wi(p - 1, q));

    Ok((h + k) as u64)
}

/// `g(p^2 q r s)`: exact only for the shape with two weak arrows into `p^2`
/// and one weak arrow out of it, which gives 7.
pub fn g_p2qrs(p: u64, q: u64, r: u64, s: u64) -> CountResult {
    if let Err(e) = require_odd_distinct(&[p, q, r, s]) {
        return e.into_count();
    }
    let f = Factorization::from_pairs([(p, 2), (q, 1), (r, 1), (s, 1)]).expect("primes");
    let g = build_graph(&f);
    let sq = g.index_of(p).expect("p is a vertex");
    let others: Vec<usize> = (0..4).filter(|&v| v != sq).collect();
    let among = g
        .edges()
        .iter()
        .filter(|e| e.from != sq && e.to != sq)
        .count();
    let connected = decompose(&g).components.len() == 1;
    let fallback = |bound| CountResult::unsupported(UnsupportedReason::UnclassifiedShape, bound);

    if !connected {
        return fallback(None);
    }
    if among >= 1 {
        return fallback(Some(INADMISSIBLE_BOUND));
    }
    // q r s has no edges: inspect the arrows at p^2.
    let weak_in = others
        .iter()
        .filter(|&&v| {
            g.edge(v, sq)
                .is_some_and(|e| g.edge_strength(e) == Ok(Strength::Weak))
        })
        .count();
    let out: Vec<_> = others.iter().filter_map(|&v| g.edge(sq, v)).collect();
    if g.edges().len() == 3 && weak_in == 2 && out.len() == 1 {
        return match g.edge_strength(out[0]) {
            Ok(Strength::Weak) => CountResult::exact(7),
            _ => fallback(Some(INADMISSIBLE_BOUND)),
        };
    }
    fallback(lower_bound_connected(&f).ok())
}

pub fn count(n: u64) -> Result<CountResult, ArithmeticError> {
    Ok(count_factored(&factorize(n)?))
}

/// `g(n)` as the product over the independent parts of `Γ(n)`.
pub fn count_factored(f: &Factorization) -> CountResult {
    if f.max_exponent() >= 4 {
        return CountResult::unsupported(UnsupportedReason::FourthPower, Some(FOURTH_POWER_BOUND));
    }
    let d = decompose(&build_graph(f));
    let mut product = Some(1u64);
    let mut bound = Some(1u64);
    let mut failure: Option<UnsupportedReason> = None;
    let parts = d
        .isolated
        .iter()
        .map(|v| g_prime_power(v.prime, v.exponent))
        .chain(d.components.iter().map(count_component));
    for part in parts {
        match part {
            CountResult::Exact { value } => {
                product = product.and_then(|x| x.checked_mul(value));
                bound = bound.and_then(|x| x.checked_mul(value));
            }
            CountResult::Unsupported {
                reason,
                lower_bound,
            } => {
                failure.get_or_insert(reason);
                bound = bound.and_then(|x| x.checked_mul(lower_bound.unwrap_or(1)));
            }
        }
    }
    match (failure, product) {
        (None, Some(v)) => CountResult::exact(v),
        (None, None) => CountResult::unsupported(UnsupportedReason::TooLarge, None),
        (Some(reason), _) => CountResult::unsupported(reason, bound.filter(|&b| b > 1)),
    }
}

/// Counts one connected component of a generalized Hölder graph.
pub fn count_component(c: &HolderGraph) -> CountResult {
    let f = c.factorization();
    let connected_bound = || lower_bound_connected(&f).ok();
    if c.is_square_free() {
        let g = AbstractGraph::from_holder(c).expect("square-free");
        return match g_holder(&g) {
            Ok(v) => CountResult::exact(v),
            Err(_) => CountResult::unsupported(UnsupportedReason::TooLarge, connected_bound()),
        };
    }
    let squares: Vec<(u64, u32)> = f
        .entries()
        .iter()
        .copied()
        .filter(|&(_, a)| a >= 2)
        .collect();
    let singles: Vec<u64> = f
        .entries()
        .iter()
        .filter(|&&(_, a)| a == 1)
        .map(|&(p, _)| p)
        .collect();
    let result = match (squares.as_slice(), singles.as_slice()) {
        (&[(p, 2)], &[2]) => g_2p2(p),
        (&[(p, 2)], &[q]) => g_p2q(p, q),
        (&[(p, 3)], &[q]) => g_p3q(p, q),
        (&[(p, 2), (q, 2)], &[]) => g_p2q2(p, q),
        (&[(p, 2)], &[q, r]) => g_p2qr(p, q, r),
        (&[(p, 2)], &[q, r, s]) => return g_p2qrs(p, q, r, s),
        _ => Err(FormulaError::InvalidArguments("no formula for this shape")),
    };
    match result {
        Ok(v) => CountResult::exact(v),
        Err(e) => match e.into_count() {
            CountResult::Unsupported { reason, .. } => {
                CountResult::unsupported(reason, connected_bound())
            }
            exact => exact,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(n: u64) -> u64 {
        count(n)
            .unwrap()
            .value()
            .unwrap_or_else(|| panic!("count({n}) unsupported"))
    }

    #[test]
    fn prime_powers() {
        assert_eq!(g_prime_power(7, 1), CountResult::exact(1));
        assert_eq!(g_prime_power(5, 2), CountResult::exact(2));
        assert_eq!(g_prime_power(3, 3), CountResult::exact(5));
        assert_eq!(
            g_prime_power(2, 4),
            CountResult::unsupported(UnsupportedReason::FourthPower, Some(14))
        );
    }

    #[test]
    fn p2q_values() {
        assert_eq!(g_p2q(7, 3), Ok(6));
        assert_eq!(g_p2q(5, 3), Ok(3));
        assert_eq!(g_p2q(3, 5), Ok(2));
        assert_eq!(g_p2q(2, 3), Err(FormulaError::EvenPrime));
        assert_eq!(g_2p2(3), Ok(5));
        // q | p - 1 gives 4 + (q + 1) / 2.
        assert_eq!(g_p2q(11, 5), Ok(7));
    }

    #[test]
    fn p3q_values() {
        assert_eq!(g_p3q(5, 3), Ok(7));
        assert_eq!(g_p3q(7, 19), Ok(6));
        assert_eq!(g_p3q(3, 13), Ok(14));
        assert_eq!(g_p3q(2, 3), Err(FormulaError::EvenPrime));
    }

    #[test]
    fn p3q_fractional_terms_combine() {
        // q = 7 ≡ 1 (mod 3) with q | p - 1: (49 + 91 + 36)/6 + 2/3 = 30.
        assert_eq!(g_p3q(29, 7), Ok(5 + 30));
    }

    #[test]
    fn p2q2_values() {
        assert_eq!(g_p2q2(3, 5), Ok(6));
        assert_eq!(g_p2q2(3, 17), Ok(7));
        assert_eq!(g_p2q2(5, 7), Ok(4));
        assert!(g_p2q2(7, 5).is_err());
        assert_eq!(g_p2q2(2, 5), Err(FormulaError::EvenPrime));
    }

    #[test]
    fn p2qr_shape_values() {
        assert_eq!(g_p2qr(3, 7, 29), Ok(6));
        assert_eq!(g_p2qr(5, 3, 11), Ok(5));
        assert_eq!(g_p2qr(5, 7, 71), Ok(8));
        assert_eq!(g_p2qr(5, 3, 101), Ok(6));
        assert_eq!(g_p2qr(3, 19, 191), Ok(7));
        assert_eq!(g_p2qr(43, 5, 11), Ok(5));
        assert_eq!(g_p2qr(29, 3, 5), Ok(5));
        assert!(g_p2qr(3, 29, 7).is_err());
    }

    #[test]
    fn p2qrs_shapes() {
        assert_eq!(29 * 29 * 3 * 5 * 59, 744_285);
        assert_eq!(g_p2qrs(29, 3, 5, 59), CountResult::exact(7));
        // 13457 = 16 * 841 + 1, so the arrow out of 29^2 is strong.
        assert_eq!(
            g_p2qrs(29, 3, 5, 13457),
            CountResult::unsupported(UnsupportedReason::UnclassifiedShape, Some(8))
        );
        assert_eq!(
            g_p2qrs(2, 3, 5, 7),
            CountResult::unsupported(UnsupportedReason::EvenSquareForm, None)
        );
    }

    #[test]
    fn dispatcher_examples() {
        assert_eq!(count(1).unwrap(), CountResult::exact(1));
        assert_eq!(count(1155).unwrap(), CountResult::exact(4));
        assert_eq!(
            count(16).unwrap(),
            CountResult::unsupported(UnsupportedReason::FourthPower, Some(14))
        );
        assert_eq!(count(0), Err(ArithmeticError::Zero));
        assert_eq!(exact(18), 5);
        assert_eq!(exact(1827), 6);
        assert_eq!(exact(744_285), 7);
    }

    #[test]
    fn even_square_forms_unsupported() {
        // 4 * 3: a two-cycle between 2^2 and 3.
        match count(12).unwrap() {
            CountResult::Unsupported {
                reason,
                lower_bound,
            } => {
                assert_eq!(reason, UnsupportedReason::EvenSquareForm);
                assert_eq!(lower_bound, Some(3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn isolated_parts_multiply() {
        // 9 * 5: two isolated vertices.
        assert_eq!(exact(45), 2);
    }

    #[test]
    fn serialization() {
        let v = serde_json::to_value(CountResult::exact(6)).unwrap();
        assert_eq!(v, serde_json::json!({"status": "exact", "value": 6}));
        let v = serde_json::to_value(count(16).unwrap()).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"status": "unsupported", "reason": "fourth-power", "lower_bound": 14})
        );
    }
}
