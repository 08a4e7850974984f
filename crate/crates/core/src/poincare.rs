//! Fourier coefficients of the Poincaré series `P_{k,m,N}` and the
//! non-vanishing certificates built on them.
//!
//! The n-th coefficient is
//!
//! ```text
//! p_{k,N}(m; n) = δ_{m,n} + 2π i^k (n/m)^((k-1)/2)
//!                 Σ_{c >= 1} K(m, n, cN) / (cN) · J_{k-1}(4π √(mn) / (cN))
//! ```
//!
//! The c-sum is truncated at `C` and the remainder enclosed with the trivial
//! bound `|K(m, n, cN)| <= cN` and the explicit Bessel tail majorant. A
//! coefficient is reported nonzero only when its enclosure excludes zero; an
//! enclosure straddling zero is reported as undetermined, never as zero.

use std::cmp::Ordering;
use std::fmt;

use rug::{Float, Integer};

use crate::arith::{factorize, gcd};
use crate::bessel::{bessel_j, envelope, tail_majorant};
use crate::error::{Error, Result};
use crate::kloosterman::KloostermanTable;
use crate::real::{down, exact, up, CertifiedReal, MIN_PREC};

/// Largest truncation point of the c-sum.
pub const MAX_TRUNCATION: u64 = 1_000_000;

/// Default budget for `Σ_{c <= C} cN`, the number of Kloosterman terms summed.
/// Low weights converge like `C^(2-k)` and would otherwise run to
/// [`MAX_TRUNCATION`].
pub const WORK_LIMIT: u64 = 50_000_000;

pub const DEFAULT_PRECISION: u32 = 128;
pub const DEFAULT_MAX_PRECISION: u32 = 1024;
pub const DEFAULT_TARGET_RADIUS: f64 = 1e-30;

/// Largest `n_max` accepted by [`tau_oracle`].
pub const TAU_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoefficientQuery {
    pub k: u32,
    pub m: u64,
    pub level: u64,
    pub n: u64,
}

impl CoefficientQuery {
    pub fn new(k: u32, m: u64, level: u64, n: u64) -> Result<Self> {
        let q = CoefficientQuery { k, m, level, n };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k % 2 != 0 || self.k < 4 {
            return Err(Error::precondition(format!(
                "weight k = {} must be even and >= 4",
                self.k
            )));
        }
        if self.m == 0 || self.n == 0 || self.level == 0 {
            return Err(Error::precondition("m, n and N must be positive"));
        }
        Ok(())
    }

    /// Bessel order `ν = k - 1`.
    pub fn nu(&self) -> u32 {
        self.k - 1
    }
}

impl fmt::Display for CoefficientQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p_{{{},{}}}({}; {})", self.k, self.level, self.m, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
    Undetermined,
}

impl Sign {
    pub fn is_determined(self) -> bool {
        self != Sign::Undetermined
    }

    fn of(value: &CertifiedReal) -> Self {
        match value.sign() {
            Some(Ordering::Greater) => Sign::Positive,
            Some(Ordering::Less) => Sign::Negative,
            _ => Sign::Undetermined,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Positive => "positive",
            Sign::Negative => "negative",
            Sign::Undetermined => "undetermined",
        })
    }
}

#[derive(Debug, Clone)]
pub struct CoefficientResult {
    pub query: CoefficientQuery,
    /// Encloses the exact coefficient; the radius includes `tail_radius`.
    pub value: CertifiedReal,
    pub truncation_c: u64,
    pub tail_radius: Float,
    pub sign: Sign,
    pub precision: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyOptions {
    /// Starting working precision in bits.
    pub precision: u32,
    pub max_precision: u32,
    /// Initial absolute target for the enclosure radius.
    pub target_radius: f64,
    /// Truncation cap; `None` applies [`default_truncation_cap`].
    pub max_truncation: Option<u64>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            precision: DEFAULT_PRECISION,
            max_precision: DEFAULT_MAX_PRECISION,
            target_radius: DEFAULT_TARGET_RADIUS,
            max_truncation: None,
        }
    }
}

impl CertifyOptions {
    fn validate(&self) -> Result<()> {
        if self.precision < MIN_PREC || self.max_precision < self.precision {
            return Err(Error::precondition(format!(
                "need 53 <= precision ({}) <= max precision ({})",
                self.precision, self.max_precision
            )));
        }
        if !(self.target_radius > 0.0 && self.target_radius.is_finite()) {
            return Err(Error::precondition("target radius must be positive"));
        }
        Ok(())
    }
}

/// Pieces of the coefficient formula that do not depend on `c`.
struct Setup {
    nu: u32,
    /// `4π √(mn) / N`, the Bessel argument at `c = 1`.
    scale: CertifiedReal,
    /// `2π i^k (n/m)^((k-1)/2)`.
    factor: CertifiedReal,
}

fn setup(q: &CoefficientQuery, precision: u32) -> Result<Setup> {
    q.validate()?;
    let nu = q.nu();
    let pi = CertifiedReal::pi(precision);
    let mn = CertifiedReal::from_integer(&(Integer::from(q.m) * q.n), precision);
    let scale = (mn.sqrt()? * &pi).mul_i64(4).div_u64(q.level);
    let limit = envelope(nu);
    if scale.upper() > limit {
        return Err(Error::Range {
            what: "4π√(mn)/N",
            value: format!("{:.4}", scale.to_f64()),
            range: "[0, 4(k-1) + 40]; raise k or lower m·n",
        });
    }

    let two_pi = pi.mul_i64(2);
    let magnitude = if q.m == q.n {
        two_pi
    } else {
        let ln_n = CertifiedReal::from_i64(q.n as i64, precision).ln()?;
        let ln_m = CertifiedReal::from_i64(q.m as i64, precision).ln()?;
        let exponent = (ln_n - ln_m).mul_i64(nu as i64).mul_pow2(-1);
        two_pi * exponent.exp()
    };
    // i^k = (-1)^(k/2) for even k.
    let factor = if (q.k / 2) % 2 == 0 {
        magnitude
    } else {
        -magnitude
    };
    Ok(Setup { nu, scale, factor })
}

/// Largest `C <= MAX_TRUNCATION` with `N · C(C+1)/2 <= WORK_LIMIT`.
pub fn default_truncation_cap(level: u64) -> u64 {
    let per = (2 * WORK_LIMIT / level.max(1)) as f64;
    let mut c = per.sqrt() as u64;
    while c > 1 && c * (c + 1) > 2 * WORK_LIMIT / level.max(1) {
        c -= 1;
    }
    c.clamp(1, MAX_TRUNCATION)
}

/// Smallest `C` whose tail enclosure `|factor| · Σ_{c > C} |J_ν(scale/c)|`
/// is below `budget`, or `cap` if none is.
fn choose_truncation(s: &Setup, budget: &Float, cap: u64) -> Result<(u64, Float)> {
    let factor_up = s.factor.abs_upper();
    let scale_up = s.scale.upper();
    let tail_at =
        |c: u64| -> Result<Float> { Ok(up(&factor_up * tail_majorant(s.nu, &scale_up, c + 1)?)) };
    let mut hi = 1u64;
    let mut tail_hi = tail_at(hi)?;
    while tail_hi >= *budget && hi < cap {
        hi = (hi * 2).min(cap);
        tail_hi = tail_at(hi)?;
    }
    if tail_hi >= *budget {
        return Ok((hi, tail_hi));
    }
    // The tail is decreasing in C; bisect down to the smallest admissible C.
    let mut lo = hi / 2;
    if lo == 0 {
        return Ok((hi, tail_hi));
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let t = tail_at(mid)?;
        if t < *budget {
            hi = mid;
            tail_hi = t;
        } else {
            lo = mid;
        }
    }
    Ok((hi, tail_hi))
}

/// Certified `p_{k,N}(m; n)` at `precision` bits, truncating the c-sum where
/// the tail enclosure drops below `target_radius / 2` or at
/// [`default_truncation_cap`], whichever comes first.
pub fn coefficient(
    query: &CoefficientQuery,
    precision: u32,
    target_radius: f64,
) -> Result<CoefficientResult> {
    coefficient_capped(query, precision, target_radius, None)
}

/// [`coefficient`] with an explicit truncation cap (at most [`MAX_TRUNCATION`]).
pub fn coefficient_capped(
    query: &CoefficientQuery,
    precision: u32,
    target_radius: f64,
    max_truncation: Option<u64>,
) -> Result<CoefficientResult> {
    if precision < MIN_PREC {
        return Err(Error::Range {
            what: "precision",
            value: precision.to_string(),
            range: ">= 53 bits",
        });
    }
    if !(target_radius > 0.0 && target_radius.is_finite()) {
        return Err(Error::precondition("target radius must be positive"));
    }
    let s = setup(query, precision)?;
    let mut budget = down(exact(target_radius));
    budget >>= 1;
    let cap = match max_truncation {
        Some(c) if c >= 1 => c.min(MAX_TRUNCATION),
        Some(_) => return Err(Error::precondition("truncation cap must be >= 1")),
        None => default_truncation_cap(query.level),
    };
    let (truncation_c, tail_radius) = choose_truncation(&s, &budget, cap)?;

    let mut sum = CertifiedReal::zero(precision);
    for c in 1..=truncation_c {
        let modulus = c * query.level;
        let table = KloostermanTable::new(modulus, precision)?;
        let k = table.eval(query.m as i64, query.n as i64);
        let j = bessel_j(s.nu, &s.scale.div_u64(c), precision)?;
        sum = sum + (k * j).div_u64(modulus);
    }

    let mut value = &s.factor * &sum;
    if query.m == query.n {
        value = value + CertifiedReal::one(precision);
    }
    value.add_error(&tail_radius);
    let sign = Sign::of(&value);
    Ok(CoefficientResult {
        query: *query,
        value,
        truncation_c,
        tail_radius,
        sign,
        precision,
    })
}

/// Rough magnitude of the coefficient: the `c = 1` summand, or 1 when the
/// Kronecker delta is present.
fn leading_magnitude(q: &CoefficientQuery) -> Result<f64> {
    if q.m == q.n {
        return Ok(1.0);
    }
    let prec = 64;
    let s = setup(q, prec)?;
    let k = KloostermanTable::new(q.level, prec)?.eval(q.m as i64, q.n as i64);
    let j = bessel_j(s.nu, &s.scale, prec)?;
    let lead = (s.factor * k * j).div_u64(q.level);
    Ok(lead.to_f64().abs())
}

/// Evaluates with growing precision and shrinking target radius until the
/// sign is certified or `max_precision` is exhausted. An exhausted search
/// returns the last result with [`Sign::Undetermined`].
pub fn certify_nonzero(
    query: &CoefficientQuery,
    opts: &CertifyOptions,
) -> Result<CoefficientResult> {
    opts.validate()?;
    query.validate()?;
    let mut precision = opts.precision;
    let mut target = opts.target_radius;
    let lead = leading_magnitude(query)?;
    if lead > 0.0 && lead.is_finite() {
        target = target.min(lead * 2f64.powi(-20));
    }
    loop {
        let r = coefficient_capped(query, precision, target, opts.max_truncation)?;
        if r.sign.is_determined() || precision >= opts.max_precision {
            return Ok(r);
        }
        // An undetermined ball has |mid| <= rad; aim well below |mid| so the
        // next radius can separate it from zero.
        let mid = r.value.mid().to_f64().abs();
        target = if mid > 0.0 {
            (target * 2f64.powi(-16)).min(mid * 2f64.powi(-8))
        } else {
            target * 2f64.powi(-32)
        }
        .max(f64::MIN_POSITIVE);
        precision = (precision * 2).min(opts.max_precision);
    }
}

#[derive(Debug, Clone)]
pub struct VanishingReport {
    pub k: u32,
    pub m: u64,
    pub level: u64,
    pub scanned_to: u64,
    pub first_nonzero_n: Option<u64>,
    pub v_infinity_upper: Option<u64>,
    pub undetermined_indices: Vec<u64>,
    /// Certificate for `first_nonzero_n`, or the last undetermined attempt.
    pub witness: Option<CoefficientResult>,
}

impl VanishingReport {
    pub fn is_determined(&self) -> bool {
        self.first_nonzero_n.is_some()
    }
}

/// Scans `n = 1..=n_max` for the first coefficient with certified sign. Since
/// `v_∞(P) = min{n : p(m; n) ≠ 0}`, that index bounds `v_∞` from above.
pub fn order_of_vanishing(
    k: u32,
    m: u64,
    level: u64,
    n_max: u64,
    opts: &CertifyOptions,
) -> Result<VanishingReport> {
    if n_max == 0 {
        return Err(Error::precondition("n_max must be >= 1"));
    }
    let mut report = VanishingReport {
        k,
        m,
        level,
        scanned_to: 0,
        first_nonzero_n: None,
        v_infinity_upper: None,
        undetermined_indices: Vec::new(),
        witness: None,
    };
    for n in 1..=n_max {
        let q = CoefficientQuery::new(k, m, level, n)?;
        let r = certify_nonzero(&q, opts)?;
        report.scanned_to = n;
        let determined = r.sign.is_determined();
        report.witness = Some(r);
        if determined {
            report.first_nonzero_n = Some(n);
            report.v_infinity_upper = Some(n);
            break;
        }
        report.undetermined_indices.push(n);
    }
    Ok(report)
}

/// The non-vanishing statements checked by [`verify_theorem_range`] and
/// [`verify_vanishing_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem {
    /// Level 1, `m <= (k-1)² / (16π²)`: `v_∞ = 1`.
    LevelOne,
    /// Square-free `N`, `m <= (k-1)² N² / (16π²)`: `v_∞ = 1`.
    SquareFree,
    /// Prime `N = p`: `v_∞ << p^(1/2+ε)`.
    PrimeLevel,
    /// Square-free `N` with largest prime `p_r`: `v_∞ << p_r^(1/2+ε)`.
    LargestPrime,
    /// Square-free `N`, `m <= N (k-1)² / (32π²)`, `gcd(m, N) = 1`: `v_∞ <= 2N`.
    SecondMoment,
}

impl Theorem {
    pub fn from_id(id: u8) -> Result<Self> {
        Ok(match id {
            1 => Theorem::LevelOne,
            2 => Theorem::SquareFree,
            3 => Theorem::PrimeLevel,
            4 => Theorem::LargestPrime,
            5 => Theorem::SecondMoment,
            _ => return Err(Error::precondition(format!("unknown theorem id {id}"))),
        })
    }

    pub fn id(self) -> u8 {
        match self {
            Theorem::LevelOne => 1,
            Theorem::SquareFree => 2,
            Theorem::PrimeLevel => 3,
            Theorem::LargestPrime => 4,
            Theorem::SecondMoment => 5,
        }
    }

    /// Whether the statement ranges over an explicit interval of `m`.
    pub fn has_explicit_range(self) -> bool {
        matches!(
            self,
            Theorem::LevelOne | Theorem::SquareFree | Theorem::SecondMoment
        )
    }

    /// Checks the level against the theorem's hypotheses.
    pub fn check_level(self, level: u64) -> Result<()> {
        let f = factorize(level)?;
        match self {
            Theorem::LevelOne if level != 1 => {
                Err(Error::precondition("theorem 1 is stated for N = 1"))
            }
            Theorem::PrimeLevel if !f.is_prime() => Err(Error::precondition(format!(
                "theorem 3 needs prime N, got {level}"
            ))),
            Theorem::LargestPrime if level == 1 => {
                Err(Error::precondition("theorem 4 needs N > 1"))
            }
            _ if !f.is_squarefree() => Err(Error::precondition(format!(
                "N = {level} is not square-free"
            ))),
            _ => Ok(()),
        }
    }
}

/// Every `m` certainly inside the theorem's range for weight `k` and level
/// `N` (the bound is compared with a certified enclosure of π).
pub fn theorem_m_range(theorem: Theorem, k: u32, level: u64) -> Result<Vec<u64>> {
    theorem.check_level(level)?;
    if k % 2 != 0 || k < 4 {
        return Err(Error::precondition(format!(
            "weight k = {k} must be even and >= 4"
        )));
    }
    let prec = 128;
    let nu_sq = Integer::from(k - 1).square();
    let pi_sq = CertifiedReal::pi(prec).square();
    let (numer, denom) = match theorem {
        Theorem::LevelOne => (nu_sq, 16),
        Theorem::SquareFree => (nu_sq * Integer::from(level).square(), 16),
        Theorem::SecondMoment => (nu_sq * level, 32),
        _ => {
            return Err(Error::precondition(format!(
                "theorem {} has no explicit m-range",
                theorem.id()
            )))
        }
    };
    let bound = CertifiedReal::from_integer(&numer, prec).checked_div(&pi_sq.mul_i64(denom))?;
    let m_max = bound
        .lower()
        .to_integer_round(rug::float::Round::Down)
        .map(|(i, _)| i)
        .and_then(|i| i.to_u64())
        .unwrap_or(0);
    Ok((1..=m_max)
        .filter(|&m| theorem != Theorem::SecondMoment || gcd(m, level) == 1)
        .collect())
}

/// Largest `n` scanned for a theorem with an explicit range.
pub fn theorem_n_max(theorem: Theorem, level: u64) -> u64 {
    match theorem {
        Theorem::SecondMoment => 2 * level,
        _ => 1,
    }
}

/// Runs [`order_of_vanishing`] for every admissible `m` of theorem 1, 2 or 5.
pub fn verify_theorem_range(
    theorem_id: u8,
    k: u32,
    level: u64,
    opts: &CertifyOptions,
) -> Result<Vec<VanishingReport>> {
    let theorem = Theorem::from_id(theorem_id)?;
    let n_max = theorem_n_max(theorem, level);
    theorem_m_range(theorem, k, level)?
        .into_iter()
        .map(|m| order_of_vanishing(k, m, level, n_max, opts))
        .collect()
}

pub const DEFAULT_WINDOW_SLACK: u64 = 4;

/// Scan window `⌈p_r^(1/2+ε)⌉ · slack` for the largest prime `p_r | N`.
pub fn vanishing_window(level: u64, epsilon: f64, slack: u64) -> Result<u64> {
    let f = factorize(level)?;
    let p = f
        .largest_prime()
        .ok_or_else(|| Error::precondition("N must have a prime factor"))?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::precondition("epsilon must be positive"));
    }
    if slack == 0 {
        return Err(Error::precondition("window slack must be >= 1"));
    }
    let window = (p as f64).powf(0.5 + epsilon).ceil() as u64;
    Ok(window.max(1) * slack)
}

/// Looks for a certified nonzero coefficient within the window
/// `n <= ⌈p_r^(1/2+ε)⌉ · slack`.
pub fn verify_vanishing_bound(
    k: u32,
    m: u64,
    level: u64,
    epsilon: f64,
    slack: u64,
    opts: &CertifyOptions,
) -> Result<VanishingReport> {
    let f = factorize(level)?;
    if !f.is_squarefree() {
        return Err(Error::precondition(format!(
            "N = {level} is not square-free"
        )));
    }
    if gcd(m, level) != 1 {
        return Err(Error::precondition(format!("gcd({m}, {level}) != 1")));
    }
    let n_max = vanishing_window(level, epsilon, slack)?;
    order_of_vanishing(k, m, level, n_max, opts)
}

/// `τ(1), …, τ(n_max)` from `q ∏_{j >= 1} (1 - q^j)^24`, using 24 successive
/// multiplications by the Euler product written as the pentagonal series
/// `Σ_k (-1)^k q^(k(3k-1)/2)`.
pub fn tau_oracle(n_max: usize) -> Result<Vec<Integer>> {
    if n_max == 0 || n_max > TAU_LIMIT {
        return Err(Error::Range {
            what: "n_max",
            value: n_max.to_string(),
            range: "[1, 10^4]",
        });
    }
    // Coefficients of q^0 .. q^(n_max - 1) of the product are τ(1) .. τ(n_max).
    let len = n_max;
    let mut pentagonal: Vec<(usize, bool)> = vec![(0, true)];
    for j in 1i64.. {
        let e1 = (j * (3 * j - 1) / 2) as usize;
        if e1 >= len {
            break;
        }
        let negative = j % 2 == 1;
        pentagonal.push((e1, !negative));
        let e2 = (j * (3 * j + 1) / 2) as usize;
        if e2 < len {
            pentagonal.push((e2, !negative));
        }
    }
    pentagonal.sort_unstable();

    let mut poly = vec![Integer::new(); len];
    poly[0] = Integer::from(1);
    for _ in 0..24 {
        let mut next = vec![Integer::new(); len];
        for (i, out) in next.iter_mut().enumerate() {
            for &(e, positive) in &pentagonal {
                if e > i {
                    break;
                }
                if positive {
                    *out += &poly[i - e];
                } else {
                    *out -= &poly[i - e];
                }
            }
        }
        poly = next;
    }
    Ok(poly)
}
