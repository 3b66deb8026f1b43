//! Exact integer number theory on `u64`: primality, factorization, the
//! totient, divisibility indicators and prime search in progressions.

use std::fmt;

use once_cell::sync::Lazy;
use serde::Serialize;
use thiserror::Error;

/// Primes used for trial division before falling back to Pollard rho.
const TRIAL_LIMIT: u64 = 1_000_000;

static SMALL_PRIMES: Lazy<Vec<u64>> = Lazy::new(|| sieve(TRIAL_LIMIT));

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithmeticError {
    #[error("zero has no factorization")]
    Zero,
    #[error("residue {residue} is not coprime to modulus {modulus}")]
    NotCoprime { residue: i64, modulus: u64 },
    #[error("modulus must be positive")]
    ZeroModulus,
}

/// Primes up to and including `limit`.
pub fn sieve(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    if limit < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m` for any `m >= 1`.
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    result
}

// These bases make Miller-Rabin deterministic for every 64-bit input.
const MR_BASES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'bases: for &a in &MR_BASES {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard rho. `n` must be odd and composite.
fn pollard_brent(n: u64) -> u64 {
    let f = |x: u64, c: u64| (mul_mod(x, x, n) + c) % n;
    for c in 1..n {
        let (mut x, mut y, mut ys) = (2u64, 2u64, 2u64);
        let mut g = 1u64;
        let mut q = 1u64;
        let mut r = 1u64;
        const BLOCK: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y, c);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BLOCK.min(r - k) {
                    y = f(y, c);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BLOCK;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys, c);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("pollard rho exhausted every constant for {n}")
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    split_large(d, out);
    split_large(n / d, out);
}

/// Prime factorization as ascending `(prime, exponent)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Factorization {
    entries: Vec<(u64, u32)>,
}

impl Factorization {
    /// Builds from arbitrary pairs, merging repeated primes. Every prime is
    /// checked; exponents of zero are dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, u32)>) -> Option<Self> {
        let mut entries: Vec<(u64, u32)> = Vec::new();
        for (p, a) in pairs {
            if !is_prime(p) {
                return None;
            }
            if a > 0 {
                entries.push((p, a));
            }
        }
        entries.sort_unstable();
        let mut merged: Vec<(u64, u32)> = Vec::with_capacity(entries.len());
        for (p, a) in entries {
            match merged.last_mut() {
                Some((q, b)) if *q == p => *b += a,
                _ => merged.push((p, a)),
            }
        }
        Some(Factorization { entries: merged })
    }

    pub fn entries(&self) -> &[(u64, u32)] {
        &self.entries
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|&(p, _)| p)
    }

    /// Number of distinct primes.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Product of the prime powers; `None` on overflow.
    pub fn value(&self) -> Option<u64> {
        self.entries
            .iter()
            .try_fold(1u64, |acc, &(p, a)| acc.checked_mul(p.checked_pow(a)?))
    }

    /// Total number of prime factors counted with multiplicity.
    pub fn lambda(&self) -> u32 {
        self.entries.iter().map(|&(_, a)| a).sum()
    }

    pub fn is_square_free(&self) -> bool {
        self.entries.iter().all(|&(_, a)| a == 1)
    }

    pub fn max_exponent(&self) -> u32 {
        self.entries.iter().map(|&(_, a)| a).max().unwrap_or(0)
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "1");
        }
        for (i, &(p, a)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if a == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{a}")?;
            }
        }
        Ok(())
    }
}

pub fn factorize(n: u64) -> Result<Factorization, ArithmeticError> {
    if n == 0 {
        return Err(ArithmeticError::Zero);
    }
    let mut m = n;
    let mut entries = Vec::new();
    for &p in SMALL_PRIMES.iter() {
        if p * p > m {
            break;
        }
        if m.is_multiple_of(p) {
            let mut a = 0;
            while m.is_multiple_of(p) {
                m /= p;
                a += 1;
            }
            entries.push((p, a));
        }
    }
    if m > 1 {
        // Either prime, or every factor exceeds the trial limit.
        let mut large = Vec::new();
        split_large(m, &mut large);
        large.sort_unstable();
        for p in large {
            match entries.last_mut() {
                Some((q, a)) if *q == p => *a += 1,
                _ => entries.push((p, 1)),
            }
        }
    }
    Ok(Factorization { entries })
}

/// Euler's totient. `euler_phi(0)` is defined as 0.
pub fn euler_phi(n: u64) -> u64 {
    match factorize(n) {
        Ok(f) => f
            .entries()
            .iter()
            .map(|&(p, a)| (p - 1) * p.pow(a - 1))
            .product(),
        Err(_) => 0,
    }
}

pub fn lambda(n: u64) -> u32 {
    factorize(n).map(|f| f.lambda()).unwrap_or(0)
}

/// `gcd(n, φ(n)) = 1`, i.e. every group of order `n` is cyclic.
pub fn is_cyclic_number(n: u64) -> bool {
    n >= 1 && gcd(n, euler_phi(n)) == 1
}

/// Divisibility indicator: 1 if `s | r`, else 0.
///
/// # Panics
/// If `s < 1`.
pub fn w(r: i128, s: i128) -> u64 {
    assert!(s >= 1, "w(r, s) needs s >= 1, got {s}");
    u64::from(r.rem_euclid(s) == 0)
}

/// A constraint `p ≢ residue (mod modulus)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Avoid {
    pub residue: u64,
    pub modulus: u64,
}

impl Avoid {
    pub fn new(residue: u64, modulus: u64) -> Self {
        Avoid { residue, modulus }
    }

    fn allows(&self, p: u64) -> bool {
        p % self.modulus != self.residue % self.modulus
    }
}

/// Smallest prime `p <= bound` with `p ≡ residue (mod modulus)` that avoids
/// every listed residue class.
pub fn prime_in_progression(
    residue: i64,
    modulus: u64,
    avoid: &[Avoid],
    bound: u64,
) -> Result<Option<u64>, ArithmeticError> {
    if modulus == 0 || avoid.iter().any(|a| a.modulus == 0) {
        return Err(ArithmeticError::ZeroModulus);
    }
    let r = residue.rem_euclid(modulus as i64) as u64;
    if gcd(r, modulus) != 1 {
        return Err(ArithmeticError::NotCoprime { residue, modulus });
    }
    let mut x = if r == 0 { modulus } else { r };
    while x <= bound {
        if is_prime(x) && avoid.iter().all(|a| a.allows(x)) {
            return Ok(Some(x));
        }
        x = match x.checked_add(modulus) {
            Some(next) => next,
            None => break,
        };
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_is_prime(n: u64) -> bool {
        n >= 2
            && (2..)
                .take_while(|d| d * d <= n)
                .all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime(2));
        assert!(!is_prime(1));
        assert_eq!(32661 / 9 / 19, 191);
        assert!(is_prime(191));
        assert!(trial_is_prime(191));
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 0..50_000 {
            assert_eq!(is_prime(n), trial_is_prime(n), "n = {n}");
        }
    }

    #[test]
    fn primality_large() {
        // 2^61 - 1 is a Mersenne prime; 2^63 - 25 is the largest prime below 2^63.
        assert!(is_prime((1 << 61) - 1));
        assert!(is_prime((1 << 63) - 25));
        // Strong pseudoprime to many small bases.
        assert!(!is_prime(3_215_031_751));
        assert!(!is_prime(((1u64 << 31) - 1) * ((1u64 << 31) - 1)));
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(
            factorize(1827).unwrap().entries(),
            &[(3, 2), (7, 1), (29, 1)]
        );
        assert!(factorize(1).unwrap().is_empty());
        assert_eq!(factorize(1024).unwrap().entries(), &[(2, 10)]);
        assert_eq!(factorize(0), Err(ArithmeticError::Zero));
    }

    #[test]
    fn factorize_large_cofactors() {
        let p = 1_000_003u64;
        let q = 2_147_483_647u64;
        let f = factorize(p * q).unwrap();
        assert_eq!(f.entries(), &[(p, 1), (q, 1)]);
        let f = factorize(p * p * 7).unwrap();
        assert_eq!(f.entries(), &[(7, 1), (p, 2)]);
        let big = (1u64 << 63) - 25;
        assert_eq!(factorize(big).unwrap().entries(), &[(big, 1)]);
    }

    #[test]
    fn totient_and_lambda() {
        let direct = (1..15u64).filter(|&k| gcd(k, 15) == 1).count() as u64;
        assert_eq!(direct, 8);
        assert_eq!(euler_phi(15), 8);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(lambda(1827), 4);
        assert_eq!(lambda(1), 0);
    }

    #[test]
    fn cyclic_numbers() {
        assert!(is_cyclic_number(15));
        assert!(!is_cyclic_number(6));
        assert!(is_cyclic_number(255));
        assert!(is_cyclic_number(1));
    }

    #[test]
    fn divisibility_indicator() {
        assert_eq!(w(6, 3), 1);
        assert_eq!(w(4, 3), 0);
        assert_eq!(w(7 - 1, 3), 1);
        assert_eq!(w(0, 5), 1);
        assert_eq!(w(-6, 3), 1);
    }

    #[test]
    fn progression_examples() {
        let found = prime_in_progression(1, 35, &[Avoid::new(1, 3)], 1000).unwrap();
        assert_eq!(found, Some(71));
        assert_eq!(prime_in_progression(1, 2, &[], 100).unwrap(), Some(3));
        assert_eq!(prime_in_progression(1, 5, &[], 100).unwrap(), Some(11));
        assert_eq!(prime_in_progression(1, 5, &[], 10).unwrap(), None);
        assert!(matches!(
            prime_in_progression(3, 6, &[], 100),
            Err(ArithmeticError::NotCoprime { .. })
        ));
    }

    #[test]
    fn display() {
        assert_eq!(factorize(1827).unwrap().to_string(), "3^2 * 7 * 29");
        assert_eq!(factorize(1).unwrap().to_string(), "1");
    }
}
