//! Exact integer and modular arithmetic shared by the analytic modules.

use std::fmt;

use crate::error::{Error, Result};

/// Largest integer accepted by [`factorize`].
pub const FACTOR_LIMIT: u64 = 1_000_000_000_000;

/// Prime factorization `n = ∏ pᵢ^eᵢ` with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    /// `(prime, exponent)` pairs, primes ascending.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> u32 {
        self.factors.len() as u32
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn is_prime(&self) -> bool {
        matches!(self.factors.as_slice(), [(_, 1)])
    }

    /// Prime-power blocks `pᵢ^eᵢ`, pairwise coprime, in ascending order of `pᵢ`.
    pub fn prime_powers(&self) -> Vec<u64> {
        self.factors.iter().map(|&(p, e)| p.pow(e)).collect()
    }

    /// Euler's totient.
    pub fn phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }

    pub fn largest_prime(&self) -> Option<u64> {
        self.factors.last().map(|&(p, _)| p)
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, &(p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Trial division with a 2·3·5 wheel.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 || n > FACTOR_LIMIT {
        return Err(Error::Range {
            what: "n",
            value: n.to_string(),
            range: "[1, 10^12]",
        });
    }
    let mut rest = n;
    let mut factors = Vec::new();
    let mut take = |p: u64, rest: &mut u64| {
        let mut e = 0;
        while *rest % p == 0 {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    for p in [2, 3, 5] {
        take(p, &mut rest);
    }
    // Offsets of residues coprime to 30, starting from 7.
    const WHEEL: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut p = 7u64;
    let mut i = 0;
    while p * p <= rest {
        take(p, &mut rest);
        p += WHEEL[i];
        i = (i + 1) % WHEEL.len();
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Factorization { n, factors })
}

pub fn omega(n: u64) -> Result<u32> {
    Ok(factorize(n)?.omega())
}

pub fn is_squarefree(n: u64) -> Result<bool> {
    Ok(factorize(n)?.is_squarefree())
}

pub fn is_prime(n: u64) -> Result<bool> {
    Ok(factorize(n)?.is_prime())
}

pub fn euler_phi(n: u64) -> Result<u64> {
    Ok(factorize(n)?.phi())
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Least nonnegative residue of `x` modulo `c`.
pub fn reduce(x: i128, c: u64) -> u64 {
    x.rem_euclid(c as i128) as u64
}

/// Inverse of `x` modulo `c`, normalized to `[1, c]` (so `c = 1` yields 1).
pub fn mod_inverse(x: i128, c: u64) -> Result<u64> {
    if c == 0 {
        return Err(Error::precondition("modulus must be positive"));
    }
    if c == 1 {
        return Ok(1);
    }
    let (mut r0, mut r1) = (c as i128, reduce(x, c) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return Err(Error::NotInvertible {
            value: x,
            modulus: c,
        });
    }
    Ok(reduce(s0, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).unwrap().factors().is_empty());
        assert_eq!(factorize(12).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert_eq!(factorize(9973).unwrap().factors(), &[(9973, 1)]);
        assert_eq!(
            factorize(999_999_999_989).unwrap().factors(),
            &[(999_999_999_989, 1)]
        );
        assert_eq!(
            factorize(2 * 3 * 5 * 7 * 11 * 13 * 49).unwrap().to_string(),
            "2 * 3 * 5 * 7^3 * 11 * 13"
        );
    }

    #[test]
    fn factorize_range() {
        assert!(matches!(factorize(0), Err(Error::Range { .. })));
        assert!(matches!(
            factorize(FACTOR_LIMIT + 1),
            Err(Error::Range { .. })
        ));
        assert!(factorize(FACTOR_LIMIT).is_ok());
    }

    #[test]
    fn omega_and_squarefree() {
        assert_eq!(omega(1).unwrap(), 0);
        assert_eq!(omega(30).unwrap(), 3);
        assert_eq!(omega(49).unwrap(), 1);
        assert!(is_squarefree(1).unwrap());
        assert!(is_squarefree(30).unwrap());
        assert!(!is_squarefree(12).unwrap());
    }

    #[test]
    fn phi_values() {
        let expect = [1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4];
        for (n, &e) in (1..=12).zip(expect.iter()) {
            assert_eq!(euler_phi(n).unwrap(), e, "phi({n})");
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(2, 3).unwrap(), 2);
        assert_eq!(mod_inverse(3, 7).unwrap(), 5);
        assert_eq!(mod_inverse(-1, 7).unwrap(), 6);
        assert_eq!(mod_inverse(5, 1).unwrap(), 1);
        assert!(matches!(
            mod_inverse(4, 6),
            Err(Error::NotInvertible {
                value: 4,
                modulus: 6
            })
        ));
    }

    #[test]
    fn reconstructs_small_integers() {
        for n in 1..=10_000u64 {
            let f = factorize(n).unwrap();
            let prod: u64 = f.factors().iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(prod, n);
            assert!(f.factors().windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f
                .factors()
                .iter()
                .all(|&(p, e)| e >= 1 && is_prime(p).unwrap()));
        }
    }

    #[test]
    fn inverses_for_small_moduli() {
        for c in 1..=1000u64 {
            for x in 0..c {
                if gcd(x, c) == 1 {
                    let inv = mod_inverse(x as i128, c).unwrap();
                    assert!((1..=c).contains(&inv));
                    assert_eq!((x * inv) % c, 1 % c);
                }
            }
        }
    }

    #[test]
    fn omega_is_additive_on_coprime_pairs() {
        for a in 1..=1000u64 {
            for b in (1..=1000u64).step_by(7) {
                if gcd(a, b) == 1 {
                    assert_eq!(omega(a * b).unwrap(), omega(a).unwrap() + omega(b).unwrap());
                }
            }
        }
    }
}
