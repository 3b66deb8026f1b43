//! Classification of the orders `n` with `g(n) ∈ {1, 2, 3, 6, 7}`.
//!
//! Every clause is an annotated graph [`Pattern`]. A clause applies to a
//! connected part of `n` when the generalized Hölder graph of that part is
//! exactly the pattern, weak and strong arrows included, with no further
//! relation `α ≡ ±1 (mod β)` between its prime powers. Orders are first split
//! into independent parts; the isolated first powers form the cyclic part
//! and are dropped.
//!
//! Rule ids: `C1` for cyclic numbers, `P2.*` / `P3.*` for the `g = 2, 3`
//! clauses, `T6.*` / `T7.*` for the `g = 6, 7` clauses. A trailing letter
//! (`T6.V.a`) marks one of several shapes sharing a clause.

use std::thread;

use once_cell::sync::Lazy;
use serde::Serialize;
use thiserror::Error;

use crate::arithmetic::factorize;
use crate::graph::{build_graph, decompose, HolderGraph};
use crate::pattern::arrow::*;
use crate::pattern::{Assignment, Pattern};

/// Largest range accepted by [`solve`].
pub const SOLVE_LIMIT: u64 = 10_000_000;

/// The values of `k` that the rule set classifies.
pub const CLASSIFIED: [u8; 5] = [1, 2, 3, 6, 7];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleShape {
    /// `n` has no part with nontrivial groups.
    Cyclic,
    /// One connected part with exactly this graph.
    Connected(Pattern),
    /// Two independent parts, one matching a rule from each list.
    Product {
        first: &'static [&'static str],
        second: &'static [&'static str],
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationRule {
    pub id: &'static str,
    /// Theorem clause the rule encodes, e.g. `T6.V` for `T6.V.b`.
    pub clause: &'static str,
    pub target_k: u8,
    pub statement: &'static str,
    pub shape: RuleShape,
    /// No relations beyond the pattern's may hold.
    pub exclusive: bool,
}

impl ClassificationRule {
    pub fn pattern(&self) -> Option<&Pattern> {
        match &self.shape {
            RuleShape::Connected(p) => Some(p),
            _ => None,
        }
    }

    /// Smallest `n ≤ bound` satisfying the rule.
    pub fn witness(&self, bound: u64) -> Option<(u64, Assignment)> {
        match &self.shape {
            RuleShape::Cyclic => (bound >= 1).then(|| (1, Assignment::new())),
            RuleShape::Connected(p) => p.realize(bound),
            RuleShape::Product { first, second } => {
                let mut best: Option<(u64, Assignment)> = None;
                for a in first.iter().filter_map(|id| rule(id)?.pattern()) {
                    for b in second.iter().filter_map(|id| rule(id)?.pattern()) {
                        let prefixed = rename(&a.disjoint_union(b, "n2."), a.len());
                        let cap = best.as_ref().map_or(bound, |(n, _)| n - 1);
                        if let Some(found) = prefixed.realize(cap) {
                            best = Some(found);
                        }
                    }
                }
                best
            }
        }
    }
}

/// Prefixes the first `split` vertex names with `n1.`.
fn rename(p: &Pattern, split: usize) -> Pattern {
    let mut out = p.clone();
    for v in out.vertices.iter_mut().take(split) {
        v.name = format!("n1.{}", v.name);
    }
    out
}

fn connected(
    id: &'static str,
    clause: &'static str,
    target_k: u8,
    statement: &'static str,
    pattern: Pattern,
) -> ClassificationRule {
    ClassificationRule {
        id,
        clause,
        target_k,
        statement,
        shape: RuleShape::Connected(pattern),
        exclusive: true,
    }
}

static RULES: Lazy<Vec<ClassificationRule>> = Lazy::new(|| {
    let odd = || Pattern::new(true);
    vec![
        ClassificationRule {
            id: "C1",
            clause: "C1",
            target_k: 1,
            statement: "n is cyclic: gcd(n, phi(n)) = 1",
            shape: RuleShape::Cyclic,
            exclusive: true,
        },
        connected(
            "P2.I",
            "P2.I",
            2,
            "n = p^2",
            Pattern::new(false).vertex("p", 2),
        ),
        connected(
            "P2.II",
            "P2.II",
            2,
            "n = pq where q = 1 (mod p)",
            Pattern::new(false)
                .vertex("p", 1)
                .vertex("q", 1)
                .edge("p", "q", plain()),
        ),
        connected(
            "P3.I",
            "P3.I",
            3,
            "n = p^2 q odd, q | p + 1",
            odd()
                .vertex("p", 2)
                .vertex("q", 1)
                .edge("q", "p", weak_into_square()),
        ),
        connected(
            "P3.II",
            "P3.II",
            3,
            "n = pqr odd, q = 1 (mod p), r = 1 (mod q), r != 1 (mod p)",
            odd()
                .vertex("p", 1)
                .vertex("q", 1)
                .vertex("r", 1)
                .edge("p", "q", plain())
                .edge("q", "r", plain()),
        ),
        connected(
            "T6.I",
            "T6.I",
            6,
            "n = pqrs where r = 1 (mod qs) and q = 1 (mod p)",
            odd()
                .vertex("p", 1)
                .vertex("q", 1)
                .vertex("r", 1)
                .vertex("s", 1)
                .edge("p", "q", plain())
                .edge("q", "r", plain())
                .edge("s", "r", plain()),
        ),
        connected(
            "T6.II",
            "T6.II",
            6,
            "n = 2pq where q = 1 (mod p)",
            odd()
                .fixed("two", 1, 2)
                .vertex("p", 1)
                .vertex("q", 1)
                .edge("two", "p", plain())
                .edge("two", "q", plain())
                .edge("p", "q", plain()),
        ),
        connected(
            "T6.III",
            "T6.III",
            6,
            "n = 3p^2 where p = 1 (mod 3)",
            odd()
                .fixed("three", 1, 3)
                .vertex("p", 2)
                .edge("three", "p", strong_into_square()),
        ),
        connected(
            "T6.IV",
            "T6.IV",
            6,
            "n = p^3 q where p^3 = 1 (mod q)",
            odd()
                .vertex("p", 3)
                .vertex("q", 1)
                .edge("q", "p", cube_order_three()),
        ),
        connected(
            "T6.V.a",
            "T6.V",
            6,
            "n = p^2 q r where p || q - 1 and r = 1 (mod q)",
            odd()
                .vertex("p", 2)
                .vertex("q", 1)
                .vertex("r", 1)
                .edge("p", "q", weak_from_square())
                .edge("q", "r", plain()),
        ),
        connected(
            "T6.V.b",
            "T6.V",
            6,
            "n = p^2 q r where q = 3, p = -1 (mod 3) and r = 1 (mod 3)",
            odd()
                .fixed("q", 1, 3)
                .vertex("p", 2)
                .vertex("r", 1)
                .edge("q", "p", weak_into_square())
                .edge("q", "r", plain()),
        ),
        connected(
            "T6.V.c",
            "T6.V",
            6,
            "n = p^2 q r where p^2 | r - 1 and p = -1 (mod q)",
            odd()
                .vertex("p", 2)
                .vertex("q", 1)
                .vertex("r", 1)
                .edge("p", "r", strong_from_square())
                .edge("q", "p", weak_into_square()),
        ),
        connected(
            "T6.VI",
            "T6.VI",
            6,
            "n = p^2 q^2 where p || q + 1",
            odd()
                .vertex("p", 2)
                .vertex("q", 2)
                .edge("p", "q", squares_plus_one()),
        ),
        ClassificationRule {
            id: "T6.VII",
            clause: "T6.VII",
            target_k: 6,
            statement: "n = n1 n2 independent with g(n1) = 2 and g(n2) = 3",
            shape: RuleShape::Product {
                first: &["P2.I", "P2.II"],
                second: &["P3.I", "P3.II"],
            },
            exclusive: true,
        },
        connected(
            "T7.I",
            "T7.I",
            7,
            "n = 5pq where p = q = 1 (mod 5)",
            odd()
                .fixed("five", 1, 5)
                .vertex("p", 1)
                .vertex("q", 1)
                .edge("five", "p", plain())
                .edge("five", "q", plain()),
        ),
        connected(
            "T7.II",
            "T7.II",
            7,
            "n = 3qr where q = r = 1 (mod 3) and r = 1 (mod q)",
            odd()
                .fixed("three", 1, 3)
                .vertex("q", 1)
                .vertex("r", 1)
                .edge("three", "q", plain())
                .edge("three", "r", plain())
                .edge("q", "r", plain()),
        ),
        connected(
            "T7.III",
            "T7.III",
            7,
            "n = 3pqr where p = q = 1 (mod 3) and r = 1 (mod q)",
            odd()
                .fixed("three", 1, 3)
                .vertex("p", 1)
                .vertex("q", 1)
                .vertex("r", 1)
                .edge("three", "p", plain())
                .edge("three", "q", plain())
                .edge("q", "r", plain()),
        ),
        connected(
            "T7.IV",
            "T7.IV",
            7,
            "n = 5p^2 where p = 1 (mod 5)",
            odd()
                .fixed("five", 1, 5)
                .vertex("p", 2)
                .edge("five", "p", strong_into_square()),
        ),
        connected(
            "T7.V",
            "T7.V",
            7,
            "n = p^3 q where p = -1 (mod q)",
            odd()
                .vertex("p", 3)
                .vertex("q", 1)
                .edge("q", "p", cube_minus_one()),
        ),
        connected(
            "T7.VI",
            "T7.VI",
            7,
            "n = 5p^2 q where q = 1 (mod 5) and p = -1 (mod 5)",
            odd()
                .fixed("five", 1, 5)
                .vertex("p", 2)
                .vertex("q", 1)
                .edge("five", "p", weak_into_square())
                .edge("five", "q", plain()),
        ),
        connected(
            "T7.VII",
            "T7.VII",
            7,
            "n = p^2 q r where p^2 | q - 1 and r = 1 (mod q)",
            odd()
                .vertex("p", 2)
                .vertex("q", 1)
                .vertex("r", 1)
                .edge("p", "q", strong_from_square())
                .edge("q", "r", plain()),
        ),
        connected(
            "T7.VIII",
            "T7.VIII",
            7,
            "n = p^2 q^2 where p^2 | q + 1",
            odd()
                .vertex("p", 2)
                .vertex("q", 2)
                .edge("p", "q", squares_plus_one_strong()),
        ),
        connected(
            "T7.IX",
            "T7.IX",
            7,
            "n = p^2 q r s where p = -1 (mod qr) and p || s - 1",
            odd()
                .vertex("p", 2)
                .vertex("q", 1)
                .vertex("r", 1)
                .vertex("s", 1)
                .edge("q", "p", weak_into_square())
                .edge("r", "p", weak_into_square())
                .edge("p", "s", weak_from_square()),
        ),
    ]
});

pub fn rules() -> &'static [ClassificationRule] {
    &RULES
}

pub fn rule(id: &str) -> Option<&'static ClassificationRule> {
    RULES.iter().find(|r| r.id == id)
}

/// Distinct theorem clauses with the given target.
pub fn clauses(k: u8) -> Vec<&'static str> {
    let mut out: Vec<&'static str> = Vec::new();
    for r in RULES
        .iter()
        .filter(|r| r.target_k == k && r.id.starts_with('T'))
    {
        if !out.contains(&r.clause) {
            out.push(r.clause);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub n: u64,
    /// `None` when no rule applies.
    pub k: Option<u8>,
    pub matched_rule: Option<&'static str>,
    pub witness: Assignment,
    /// Every rule that applied, in rule order.
    pub matches: Vec<&'static str>,
}

impl Verdict {
    fn unknown(n: u64) -> Self {
        Verdict {
            n,
            k: None,
            matched_rule: None,
            witness: Assignment::new(),
            matches: Vec::new(),
        }
    }
}

fn connected_matches(part: &HolderGraph) -> Vec<(&'static ClassificationRule, Assignment)> {
    RULES
        .iter()
        .filter_map(|r| Some((r, r.pattern()?.matches(part)?)))
        .collect()
}

pub fn classify(n: u64) -> Verdict {
    let Ok(f) = factorize(n) else {
        return Verdict::unknown(n);
    };
    let g = build_graph(&f);
    let d = decompose(&g);
    let mut parts: Vec<HolderGraph> = d.components;
    for v in d.isolated.iter().filter(|v| v.exponent >= 2) {
        let idx = g.index_of(v.prime).expect("isolated vertex in graph");
        parts.push(g.induced(&[idx]));
    }

    let mut verdict = Verdict::unknown(n);
    match parts.as_slice() {
        [] => {
            verdict.k = Some(1);
            verdict.matched_rule = Some("C1");
            verdict.matches = vec!["C1"];
        }
        [part] => {
            let found = connected_matches(part);
            if let Some((first, assignment)) = found.first() {
                verdict.k = Some(first.target_k);
                verdict.matched_rule = Some(first.id);
                verdict.witness = assignment.clone();
                verdict.matches = found.iter().map(|(r, _)| r.id).collect();
            }
        }
        [a, b] => {
            let (ma, mb) = (connected_matches(a), connected_matches(b));
            let pick = |m: &[(&'static ClassificationRule, Assignment)], k| {
                m.iter().find(|(r, _)| r.target_k == k).cloned()
            };
            let pair = match (pick(&ma, 2), pick(&mb, 3)) {
                (Some(x), Some(y)) => Some((x, y)),
                _ => pick(&mb, 2).zip(pick(&ma, 3)),
            };
            if let Some(((_, first), (_, second))) = pair {
                verdict.k = Some(6);
                verdict.matched_rule = Some("T6.VII");
                verdict.matches = vec!["T6.VII"];
                verdict.witness = first
                    .into_iter()
                    .map(|(k, v)| (format!("n1.{k}"), v))
                    .chain(second.into_iter().map(|(k, v)| (format!("n2.{k}"), v)))
                    .collect();
            }
        }
        _ => {}
    }
    verdict
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("g(n) = {0} is not classified here (the cases k = 4, 5 are Miller's)")]
    NotClassified(u8),
    #[error("k = {0} is outside 1..=7")]
    InvalidK(u8),
    #[error("range limit {0} exceeds {SOLVE_LIMIT}")]
    RangeTooLarge(u64),
}

/// Applies `f` to `1..=max_n` on `jobs` threads with contiguous shards and
/// concatenates the results in ascending order of `n`.
pub fn scan_range<T, F>(max_n: u64, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync,
{
    let jobs = jobs.max(1) as u64;
    if max_n == 0 {
        return Vec::new();
    }
    let chunk = max_n.div_ceil(jobs);
    let f = &f;
    thread::scope(|s| {
        let handles: Vec<_> = (0..jobs)
            .map(|i| {
                let lo = i * chunk + 1;
                let hi = ((i + 1) * chunk).min(max_n);
                s.spawn(move || (lo..=hi).filter_map(f).collect::<Vec<T>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("scan worker panicked"))
            .collect()
    })
}

/// All `n ≤ max_n` classified with `g(n) = k`.
pub fn solve(k: u8, max_n: u64, jobs: usize) -> Result<Vec<u64>, SolveError> {
    match k {
        4 | 5 => return Err(SolveError::NotClassified(k)),
        1..=7 => {}
        _ => return Err(SolveError::InvalidK(k)),
    }
    if max_n > SOLVE_LIMIT {
        return Err(SolveError::RangeTooLarge(max_n));
    }
    Ok(scan_range(max_n, jobs, |n| {
        (classify(n).k == Some(k)).then_some(n)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_counts() {
        assert_eq!(clauses(6).len(), 7);
        assert_eq!(clauses(7).len(), 9);
        assert!(matches!(
            rule("T6.VII").unwrap().shape,
            RuleShape::Product { .. }
        ));
        let ids: Vec<_> = rules().iter().map(|r| r.id).collect();
        let mut dedup = ids.clone();
        dedup.dedup();
        assert_eq!(ids, dedup);
    }

    #[test]
    fn classify_examples() {
        let v = classify(32661);
        assert_eq!(v.k, Some(7));
        assert_eq!(v.matched_rule, Some("T7.VII"));
        assert_eq!(v.witness["p"], 3);
        assert_eq!(v.witness["q"], 19);
        assert_eq!(v.witness["r"], 191);

        let v = classify(42);
        assert_eq!(v.k, Some(6));
        assert_eq!(v.matched_rule, Some("T6.II"));

        assert_eq!(classify(30).k, None);
        assert_eq!(classify(1).k, Some(1));
        assert_eq!(classify(1827).matched_rule, Some("T6.V.a"));
        assert_eq!(classify(7575).matched_rule, Some("T6.V.c"));
        assert_eq!(classify(375).matched_rule, Some("T7.V"));
        assert_eq!(classify(744_285).matched_rule, Some("T7.IX"));
    }

    #[test]
    fn cyclic_part_is_stripped() {
        // 1827 * 11: 11 is unrelated to 3, 7 and 29.
        let v = classify(1827 * 11);
        assert_eq!(v.matched_rule, Some("T6.V.a"));
    }

    #[test]
    fn product_rule() {
        // 3^2 next to the path 5 -> 11 -> 23.
        let (n, w) = rule("T6.VII").unwrap().witness(10_000_000).unwrap();
        assert_eq!(n, 9 * 5 * 11 * 23);
        assert_eq!(crate::cubefree::count(n).unwrap().value(), Some(6));
        let v = classify(n);
        assert_eq!(v.k, Some(6));
        assert_eq!(v.matched_rule, Some("T6.VII"));
        assert_eq!(v.witness, w);
    }

    #[test]
    fn solve_examples() {
        let six = solve(6, 2000, 3).unwrap();
        assert!(six.contains(&42) && six.contains(&1827));
        assert_eq!(
            solve(1, 30, 2).unwrap(),
            vec![1, 2, 3, 5, 7, 11, 13, 15, 17, 19, 23, 29]
        );
        assert!(solve(7, 400, 1).unwrap().contains(&375));
        assert_eq!(solve(4, 100, 1), Err(SolveError::NotClassified(4)));
        assert_eq!(solve(5, 100, 1), Err(SolveError::NotClassified(5)));
        assert_eq!(solve(8, 100, 1), Err(SolveError::InvalidK(8)));
        assert_eq!(
            solve(6, SOLVE_LIMIT + 1, 1),
            Err(SolveError::RangeTooLarge(SOLVE_LIMIT + 1))
        );
    }

    #[test]
    fn solve_is_independent_of_jobs() {
        let one = solve(6, 5000, 1).unwrap();
        for jobs in [2, 3, 7, 16] {
            assert_eq!(solve(6, 5000, jobs).unwrap(), one);
        }
    }

    #[test]
    fn witnesses_small() {
        assert_eq!(rule("P2.II").unwrap().witness(100).unwrap().0, 6);
        assert_eq!(rule("T6.II").unwrap().witness(100).unwrap().0, 42);
        let (n, _) = rule("T6.VII").unwrap().witness(1_000_000).unwrap();
        assert_eq!(classify(n).matched_rule, Some("T6.VII"));
    }
}
