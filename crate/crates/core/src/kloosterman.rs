//! Kloosterman sums `K(a, b, c) = Σ_{x ∈ (Z/cZ)^*} e((a x + b x̄) / c)`.
//!
//! The phase `t = a x + b x̄ mod c` is reduced exactly in integers, so every
//! term is `cos(2π t / c)` for some `t ∈ [0, c)`. Evaluation goes through a
//! per-modulus [`KloostermanTable`] holding the units with their inverses and
//! a fixed-point cosine table; the sum itself is then exact integer
//! arithmetic, so the only rounding is one bounded error per table entry.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use rug::float::{Constant, Round};
use rug::{Assign, Float, Integer};

use crate::arith::{factorize, gcd, mod_inverse, reduce, Factorization};
use crate::error::{Error, Result};
use crate::real::{exact, up, CertifiedReal, MIN_PREC, RAD_PREC};

/// Largest modulus accepted by the table-based evaluator.
pub const MAX_MODULUS: u64 = u32::MAX as u64;

/// Largest level accepted by [`epsilon_n`] (the scan is quadratic in `N`).
pub const EPSILON_SCAN_LIMIT: u64 = 10_000;

/// Extra fractional bits kept in the fixed-point cosine table.
const TABLE_GUARD_BITS: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    Direct,
    Factored,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Direct => "direct",
            Route::Factored => "factored",
        })
    }
}

/// A certified Kloosterman sum. `K` is real (the terms for `x` and `c - x`
/// are conjugate), so only the real part is carried.
#[derive(Debug, Clone)]
pub struct KloostermanValue {
    pub a: i64,
    pub b: i64,
    pub c: u64,
    pub value: CertifiedReal,
    pub route: Route,
}

enum CosTable {
    /// Entries scaled by `2^frac_bits` with `frac_bits <= 62`.
    Small(Vec<i64>),
    Big(Vec<Integer>),
}

/// Units modulo `c`, their inverses and `cos(2π t / c)` in fixed point.
pub struct KloostermanTable {
    c: u64,
    precision: u32,
    frac_bits: u32,
    /// Units `x` with `2x < c`, paired with `x̄`. Each stands for itself and
    /// its conjugate partner `c - x`.
    half_units: Vec<(u32, u32)>,
    /// The unit with `2x = c` (only `c = 2`), which has no distinct partner.
    self_paired: Option<(u32, u32)>,
    phi: u64,
    /// `cos(2π t / c)` for `0 <= t <= c / 2`.
    cos: CosTable,
}

/// Inverse of `x` modulo `c` for `c < 2^32`, or `None` when `gcd(x, c) > 1`.
fn small_inverse(x: u64, c: u64) -> Option<u64> {
    let (mut r0, mut r1) = (c as i64, x as i64);
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(c as i64) as u64)
}

impl KloostermanTable {
    pub fn new(c: u64, precision: u32) -> Result<Self> {
        if c == 0 || c > MAX_MODULUS {
            return Err(Error::Range {
                what: "modulus",
                value: c.to_string(),
                range: "[1, 2^32 - 1]",
            });
        }
        if precision < MIN_PREC {
            return Err(Error::Range {
                what: "precision",
                value: precision.to_string(),
                range: ">= 53 bits",
            });
        }
        let frac_bits = precision + TABLE_GUARD_BITS;

        let mut half_units = Vec::new();
        let mut self_paired = None;
        let mut phi = 0u64;
        if c == 1 {
            self_paired = Some((0, 0));
            phi = 1;
        } else {
            for x in 1..c {
                if 2 * x > c {
                    break;
                }
                if let Some(inv) = small_inverse(x, c) {
                    if 2 * x == c {
                        self_paired = Some((x as u32, inv as u32));
                        phi += 1;
                    } else {
                        half_units.push((x as u32, inv as u32));
                        phi += 2;
                    }
                }
            }
        }

        let cos = build_cos_table(c, frac_bits);
        Ok(KloostermanTable {
            c,
            precision,
            frac_bits,
            half_units,
            self_paired,
            phi,
            cos,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.c
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Euler's totient of the modulus.
    pub fn phi(&self) -> u64 {
        self.phi
    }

    /// `K(a, b, c)` for this table's modulus.
    pub fn eval(&self, a: i64, b: i64) -> CertifiedReal {
        let c = self.c;
        if c == 1 {
            return CertifiedReal::one(self.precision);
        }
        let a = reduce(a as i128, c);
        let b = reduce(b as i128, c);
        let phase = |x: u32, inv: u32| -> usize {
            let t = (a * x as u64 % c + b * inv as u64 % c) % c;
            t.min(c - t) as usize
        };
        let sum = match &self.cos {
            CosTable::Small(tab) => {
                let mut acc: i128 = 0;
                for &(x, inv) in &self.half_units {
                    acc += tab[phase(x, inv)] as i128;
                }
                acc *= 2;
                if let Some((x, inv)) = self.self_paired {
                    acc += tab[phase(x, inv)] as i128;
                }
                Integer::from(acc)
            }
            CosTable::Big(tab) => {
                let mut acc = Integer::new();
                for &(x, inv) in &self.half_units {
                    acc += &tab[phase(x, inv)];
                }
                acc <<= 1;
                if let Some((x, inv)) = self.self_paired {
                    acc += &tab[phase(x, inv)];
                }
                acc
            }
        };
        let mut value = CertifiedReal::from_integer(&sum, self.precision + 2 * TABLE_GUARD_BITS)
            .mul_pow2(-(self.frac_bits as i32));
        // One unit in the last fixed-point place per term.
        let mut per_term = up(self.phi);
        per_term >>= self.frac_bits;
        value.add_error(&per_term);
        value.with_prec(self.precision)
    }

    pub fn eval_value(&self, a: i64, b: i64) -> KloostermanValue {
        KloostermanValue {
            a,
            b,
            c: self.c,
            value: self.eval(a, b),
            route: Route::Direct,
        }
    }
}

/// Steps of the rotation recurrence between exact restarts.
const ROTATION_BLOCK: usize = 256;
/// Extra fixed-point bits carried by the recurrence.
const ROTATION_GUARD_BITS: u32 = 12;

/// `round(cos(2π t / c) · 2^frac_bits)` for `t ∈ [0, c/2]`, each entry within
/// one unit of the exact scaled cosine.
///
/// Entries come from repeated multiplication by `e(1/c)` in fixed point with
/// `g = 12` guard bits, restarted from a directly evaluated `e(t/c)` every 256
/// steps. A restart is within one guard unit; each step adds at most 2.2
/// (the error of `e(1/c)` plus one truncation per component), so the drift
/// stays below `2^10` guard units, a quarter of an output unit. Rounding to
/// the output adds at most one half.
fn build_cos_table(c: u64, frac_bits: u32) -> CosTable {
    let len = (c / 2 + 1) as usize;
    let g = frac_bits + ROTATION_GUARD_BITS;
    // The argument 2πt/c carries relative error below 2^(2-w) and has modulus
    // at most π, so with w = g + 16 the cosine and sine are accurate to well
    // under 2^-(g + 8); rounding to an integer adds at most 1/2.
    let work = g + 16;
    let two_pi_over_c = {
        let mut v = Float::with_val(work, Constant::Pi);
        v <<= 1;
        v / c
    };
    let to_fixed = |v: Float| -> Integer {
        (v << g)
            .to_integer_round(Round::Nearest)
            .map(|(i, _)| i)
            .expect("finite")
    };
    let exact_point = |t: usize| -> (Integer, Integer) {
        let arg = Float::with_val(work, &two_pi_over_c * t as u64);
        let (sin, cos) = arg.sin_cos(Float::new(work));
        (to_fixed(cos), to_fixed(sin))
    };
    let (wr, wi) = exact_point(1);
    let half = Integer::from(1) << (ROTATION_GUARD_BITS - 1);

    let mut out = Vec::with_capacity(len);
    let (mut re, mut im) = (Integer::new(), Integer::new());
    let (mut t1, mut t2) = (Integer::new(), Integer::new());
    for t in 0..len {
        if t % ROTATION_BLOCK == 0 {
            (re, im) = exact_point(t);
        } else {
            t1.assign(&re * &wr);
            t2.assign(&im * &wi);
            t1 -= &t2;
            t2.assign(&re * &wi);
            im *= &wr;
            im += &t2;
            im >>= g;
            re.assign(&t1 >> g);
        }
        let mut entry = Integer::from(&re + &half);
        entry >>= ROTATION_GUARD_BITS;
        out.push(entry);
    }
    if frac_bits <= 62 {
        CosTable::Small(out.iter().map(|v| v.to_i64().expect("fits i64")).collect())
    } else {
        CosTable::Big(out)
    }
}

/// Direct evaluation of `K(a, b, c)` over all units modulo `c`.
pub fn kloosterman_direct(a: i64, b: i64, c: u64, precision: u32) -> Result<KloostermanValue> {
    Ok(KloostermanTable::new(c, precision)?.eval_value(a, b))
}

/// Evaluation through twisted multiplicativity: `c` is split into prime-power
/// blocks and, peeling one block `q` off the remaining modulus `q r` at a
/// time, `K(a, b, q r) = K(a r̄², b, q) · K(a q̄², b, r)`.
pub fn kloosterman_factored(a: i64, b: i64, c: u64, precision: u32) -> Result<KloostermanValue> {
    let blocks = factorize(c)?.prime_powers();
    let mut value = CertifiedReal::one(precision);
    let mut twist = a as i128;
    let mut remaining = c;
    for q in blocks {
        let rest = remaining / q;
        let a_block = if rest == 1 {
            reduce(twist, q)
        } else {
            let r_inv = mod_inverse(rest as i128, q)? as i128;
            reduce(twist * (r_inv * r_inv % q as i128), q)
        };
        let block = KloostermanTable::new(q, precision)?.eval(a_block as i64, b);
        value = &value * &block;
        if rest > 1 {
            let q_inv = mod_inverse(q as i128, rest)? as i128;
            twist = reduce(twist * (q_inv * q_inv % rest as i128), rest) as i128;
        }
        remaining = rest;
    }
    Ok(KloostermanValue {
        a,
        b,
        c,
        value: value.with_prec(precision),
        route: Route::Factored,
    })
}

/// `S₂(m; N) = Σ_{n ∈ (Z/NZ)^*} K(m, n, N)²`.
pub fn second_moment(m: i64, n_mod: u64, precision: u32) -> Result<CertifiedReal> {
    let table = KloostermanTable::new(n_mod, precision)?;
    let units: Vec<u64> = (1..=n_mod).filter(|&n| gcd(n, n_mod) == 1).collect();
    let squares: Vec<CertifiedReal> = units
        .par_iter()
        .map(|&n| table.eval(m, n as i64).square())
        .collect();
    Ok(squares
        .iter()
        .fold(CertifiedReal::zero(precision), |acc, s| acc + s))
}

fn squarefree_level(n_mod: u64) -> Result<Factorization> {
    let f = factorize(n_mod)?;
    if !f.is_squarefree() {
        return Err(Error::precondition(format!(
            "level {n_mod} is not square-free"
        )));
    }
    Ok(f)
}

/// `ε_N = min_{1 <= m <= N} |K(m, 1, N)|` as a certified interval.
pub fn epsilon_n(n_mod: u64, precision: u32) -> Result<CertifiedReal> {
    squarefree_level(n_mod)?;
    if n_mod > EPSILON_SCAN_LIMIT {
        return Err(Error::Range {
            what: "N",
            value: n_mod.to_string(),
            range: "[1, 10^4]",
        });
    }
    let table = KloostermanTable::new(n_mod, precision)?;
    let values: Vec<CertifiedReal> = (1..=n_mod as i64)
        .into_par_iter()
        .map(|m| table.eval(m, 1))
        .collect();
    let lo = values
        .iter()
        .map(|v| v.abs_lower())
        .min_by(|x, y| x.partial_cmp(y).unwrap());
    let hi = values
        .iter()
        .map(|v| v.abs_upper())
        .min_by(|x, y| x.partial_cmp(y).unwrap());
    let (lo, hi) = (lo.expect("N >= 1"), hi.expect("N >= 1"));
    CertifiedReal::from_endpoints(&lo, &hi, precision)
}

/// Lower bound `√N / 2^(ω(N)/2 + 1)` guaranteed for some `|K(m, n, N)|`.
pub fn large_value_threshold(n_mod: u64, omega: u32, precision: u32) -> CertifiedReal {
    let scaled =
        CertifiedReal::exact(Float::with_val(precision.max(64), n_mod)).mul_pow2(-(omega as i32));
    scaled.sqrt().expect("positive argument").mul_pow2(-1)
}

/// First `n` in `[1, 2N]` with `gcd(n, N) = 1`, `n ≠ m` and a certified
/// `|K(m, n, N)| >= √N / 2^(ω(N)/2 + 1)`.
pub fn find_large_n(m: i64, n_mod: u64, precision: u32) -> Result<(u64, KloostermanValue)> {
    let level = squarefree_level(n_mod)?;
    if gcd(m.unsigned_abs(), n_mod) != 1 {
        return Err(Error::precondition(format!("gcd({m}, {n_mod}) != 1")));
    }
    let threshold = large_value_threshold(n_mod, level.omega(), precision).upper();
    let table = KloostermanTable::new(n_mod, precision)?;
    for n in 1..=2 * n_mod {
        if n as i64 == m || gcd(n, n_mod) != 1 {
            continue;
        }
        let v = table.eval_value(m, n as i64);
        if v.value.abs_lower() >= threshold {
            return Ok((n, v));
        }
    }
    Err(Error::Contradiction(format!(
        "no n <= {} with |K({m}, n, {n_mod})| >= sqrt(N)/2^(omega/2+1)",
        2 * n_mod
    )))
}

/// Kloosterman angles `θ_{p,mn}` for `1 <= n <= I`, `p ∤ n`.
#[derive(Debug, Clone)]
pub struct AngleSample {
    pub p: u64,
    pub m: i64,
    pub range_end: u64,
    pub ns: Vec<u64>,
    pub angles: Vec<f64>,
}

impl AngleSample {
    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn ks_distance(&self) -> Result<f64> {
        ks_distance(&self.angles)
    }
}

fn check_weil_args(p: u64, a: i64, b: i64) -> Result<()> {
    if !factorize(p)?.is_prime() {
        return Err(Error::precondition(format!("{p} is not prime")));
    }
    if reduce(a as i128, p) == 0 || reduce(b as i128, p) == 0 {
        return Err(Error::precondition(format!("{p} divides {a}·{b}")));
    }
    Ok(())
}

fn angle_from(value: &CertifiedReal, p: u64, a: i64, b: i64) -> Result<f64> {
    let prec = value.prec();
    let two_sqrt_p = CertifiedReal::exact(Float::with_val(prec, 4 * p))
        .sqrt()
        .expect("positive");
    let ratio = value.checked_div(&two_sqrt_p)?;
    let one = exact(1.0);
    if ratio.lower() > one || ratio.upper() < -one.clone() {
        return Err(Error::Contradiction(format!(
            "|K({a}, {b}, {p})| exceeds 2√p beyond its radius: {value}"
        )));
    }
    let c = ratio.mid().clone().clamp(&-one.clone(), &one);
    Ok(c.acos().to_f64())
}

/// Angle `θ ∈ [0, π]` with `K(a, b, p) = 2√p cos θ`.
pub fn angle(p: u64, a: i64, b: i64, precision: u32) -> Result<f64> {
    check_weil_args(p, a, b)?;
    let v = kloosterman_direct(a, b, p, precision)?;
    angle_from(&v.value, p, a, b)
}

pub fn angle_sample(p: u64, m: i64, range_end: u64, precision: u32) -> Result<AngleSample> {
    check_weil_args(p, m, 1)?;
    if range_end == 0 || range_end >= p {
        return Err(Error::Range {
            what: "I",
            value: range_end.to_string(),
            range: "[1, p - 1]",
        });
    }
    let table = KloostermanTable::new(p, precision)?;
    let ns: Vec<u64> = (1..=range_end).filter(|n| n % p != 0).collect();
    let angles = ns
        .par_iter()
        .map(|&n| angle_from(&table.eval(m, n as i64), p, m, n as i64))
        .collect::<Result<Vec<f64>>>()?;
    Ok(AngleSample {
        p,
        m,
        range_end,
        ns,
        angles,
    })
}

/// Cumulative distribution of the Sato-Tate measure `(2/π) sin²θ dθ`.
pub fn sato_tate_cdf(theta: f64) -> f64 {
    let t = theta.clamp(0.0, std::f64::consts::PI);
    (t - t.sin() * t.cos()) / std::f64::consts::PI
}

/// Two-sided Kolmogorov-Smirnov distance between the empirical distribution
/// of `angles` and the Sato-Tate law.
pub fn ks_distance(angles: &[f64]) -> Result<f64> {
    if angles.is_empty() {
        return Err(Error::Empty("angle sample"));
    }
    let mut sorted = angles.to_vec();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    let n = sorted.len() as f64;
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let f = sato_tate_cdf(t);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0f64, f64::max);
    Ok(d)
}

/// Search for `n <= n_limit`, `n ≠ m`, coprime to `N`, such that every local
/// factor in `K(m, n, N) = ∏ K(mᵢ, n, pᵢ)` satisfies `|K(mᵢ, n, pᵢ)| >= 2 δ √pᵢ`,
/// where `mᵢ = m · ((N/pᵢ)⁻¹)² mod pᵢ`. The returned value is the product of
/// the local factors, so `|K(m, n, N)| >= (2δ)^r √N`.
pub fn search_st_witness(
    m: i64,
    n_mod: u64,
    delta: f64,
    n_limit: u64,
    precision: u32,
) -> Result<Option<(u64, KloostermanValue)>> {
    let level = squarefree_level(n_mod)?;
    if gcd(m.unsigned_abs(), n_mod) != 1 {
        return Err(Error::precondition(format!("gcd({m}, {n_mod}) != 1")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::precondition("delta must be positive"));
    }
    struct Local {
        p: u64,
        m_local: i64,
        table: KloostermanTable,
        threshold: Float,
    }
    let locals = level
        .primes()
        .map(|p| {
            let cofactor_inv = mod_inverse((n_mod / p) as i128, p)? as i128;
            let m_local = reduce(m as i128 * (cofactor_inv * cofactor_inv % p as i128), p) as i64;
            let threshold = (CertifiedReal::exact(Float::with_val(precision, 4 * p)).sqrt()?
                * CertifiedReal::from_f64(delta))
            .upper();
            Ok(Local {
                p,
                m_local,
                table: KloostermanTable::new(p, precision)?,
                threshold,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    'scan: for n in 1..=n_limit {
        if n as i64 == m || gcd(n, n_mod) != 1 {
            continue;
        }
        let mut product = CertifiedReal::one(precision);
        for local in &locals {
            debug_assert_eq!(local.table.modulus(), local.p);
            let k = local.table.eval(local.m_local, n as i64);
            if k.abs_lower() < local.threshold {
                continue 'scan;
            }
            product = &product * &k;
        }
        return Ok(Some((
            n,
            KloostermanValue {
                a: m,
                b: n as i64,
                c: n_mod,
                value: product,
                route: Route::Factored,
            },
        )));
    }
    Ok(None)
}

/// Weil-type bound `2^(ω(N) + 1/2) c √N √gcd(n, N)` on `|K(m, n, N c)|`,
/// rounded up.
pub fn weil_type_bound(n: i64, level: u64, c: u64) -> Result<Float> {
    let omega = factorize(level)?.omega();
    let g = gcd(n.unsigned_abs(), level);
    // 2^(ω + 1/2) c √(N g) = 2^ω c √(2 N g)
    let root = up(Float::with_val_round(RAD_PREC, 2 * level * g, Round::Up)
        .0
        .sqrt());
    let mut bound = up(root * c);
    bound <<= omega;
    Ok(bound)
}
