//! Bessel functions of the first kind `J_ν` for integer order.
//!
//! Values come from the ascending series
//! `J_ν(x) = Σ_j (-1)^j (x/2)^(ν+2j) / (j! (ν+j)!)`,
//! summed in ball arithmetic and truncated once the geometric majorant of
//! the remaining terms is below the target. The bounds used by the
//! non-vanishing arguments are explicit:
//!
//! * `|J_ν(x)| <= (x/2)^ν / ν! · exp(x²/4)` (termwise domination of the series),
//! * `J_ν(νδ) >= J_ν(ν) δ^ν` for `0 < δ <= 1`,
//! * `Σ_{c >= c₀} |J_ν(νδ/c)| <= (νδ/2)^ν / ν! · exp((νδ/c₀)²/4) · (c₀^-ν + c₀^(1-ν)/(ν-1))`.

use std::cmp::Ordering;

use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::real::{down, exact, up, CertifiedReal, MIN_PREC, RAD_PREC};

/// Series evaluation is supported for `0 <= x <= 4ν + ENVELOPE_SLACK`.
pub const ENVELOPE_SLACK: u32 = 40;

const MAX_TERMS: u64 = 1 << 20;
const MAX_RETRIES: u32 = 8;

/// Largest argument accepted by [`bessel_j`] for order `nu`.
pub fn envelope(nu: u32) -> f64 {
    4.0 * nu as f64 + ENVELOPE_SLACK as f64
}

/// An order and argument, optionally recorded as `x = ν δ`.
#[derive(Debug, Clone)]
pub struct BesselQuery {
    pub nu: u32,
    pub x: CertifiedReal,
    pub delta: Option<CertifiedReal>,
}

impl BesselQuery {
    pub fn new(nu: u32, x: CertifiedReal) -> Self {
        BesselQuery { nu, x, delta: None }
    }

    /// `x = ν δ`.
    pub fn scaled(nu: u32, delta: CertifiedReal) -> Self {
        let x = delta.mul_i64(nu as i64);
        BesselQuery {
            nu,
            x,
            delta: Some(delta),
        }
    }

    pub fn eval(&self, precision: u32) -> Result<CertifiedReal> {
        bessel_j(self.nu, &self.x, precision)
    }
}

fn check_precision(precision: u32) -> Result<()> {
    if precision < MIN_PREC {
        return Err(Error::Range {
            what: "precision",
            value: precision.to_string(),
            range: ">= 53 bits",
        });
    }
    Ok(())
}

/// Certified `J_ν(x)` for `x` in `[0, 4ν + 40]`. The radius of `x` is
/// propagated with a bound on `|J_ν'|`.
pub fn bessel_j(nu: u32, x: &CertifiedReal, precision: u32) -> Result<CertifiedReal> {
    check_precision(precision)?;
    if x.mid().is_sign_negative() && !x.mid().is_zero() {
        return Err(Error::Range {
            what: "x",
            value: x.to_string(),
            range: "x >= 0",
        });
    }
    let hi = x.abs_upper();
    if hi > envelope(nu) {
        return Err(Error::Range {
            what: "x",
            value: format!("{:.6e}", hi.to_f64()),
            range: "[0, 4ν + 40]",
        });
    }

    let mut value = series_adaptive(nu, x.mid(), precision);
    if !x.is_exact() {
        value.add_error(&up(x.rad() * derivative_bound(nu, &hi)));
    }
    Ok(value)
}

/// Bound on `|J_ν'(ξ)|` for `0 <= ξ <= hi`, from `J_ν' = (J_{ν-1} - J_{ν+1}) / 2`,
/// `|J_n| <= 1` and the series majorant.
fn derivative_bound(nu: u32, hi: &Float) -> Float {
    let one = Float::with_val(RAD_PREC, 1);
    let majorant = if nu == 0 {
        upper_bound_j(1, hi)
    } else {
        let mut m = up(upper_bound_j(nu - 1, hi) + upper_bound_j(nu + 1, hi));
        m >>= 1;
        m
    };
    if majorant < one {
        majorant
    } else {
        one
    }
}

fn log2_abs_term(nu: u32, x: f64, j: f64) -> f64 {
    let half = (x / 2.0).ln();
    let lg = |v: f64| Float::with_val(53, v).ln_gamma().to_f64();
    ((nu as f64 + 2.0 * j) * half - lg(j + 1.0) - lg(nu as f64 + j + 1.0)) / std::f64::consts::LN_2
}

/// Bits lost to cancellation between the largest series term and the first.
fn cancellation_estimate(nu: u32, x: f64) -> u32 {
    if x <= 0.0 {
        return 0;
    }
    let n = nu as f64;
    let peak = ((n * n + x * x).sqrt() - (n + 2.0)) / 2.0;
    if peak <= 0.0 {
        return 0;
    }
    let j = peak.floor();
    let top = log2_abs_term(nu, x, j).max(log2_abs_term(nu, x, j + 1.0));
    (top - log2_abs_term(nu, x, 0.0)).max(0.0).ceil() as u32
}

/// Evaluates the series at an exact point, raising the working precision
/// until the relative radius reaches `2^-precision` (or retries run out).
fn series_adaptive(nu: u32, x: &Float, precision: u32) -> CertifiedReal {
    if x.is_zero() {
        return if nu == 0 {
            CertifiedReal::one(precision)
        } else {
            CertifiedReal::zero(precision)
        };
    }
    let mut work = precision + cancellation_estimate(nu, x.to_f64()) + 32;
    let mut tol_bits = precision + 8;
    let mut best: Option<CertifiedReal> = None;
    for _ in 0..MAX_RETRIES {
        let v = series_at(nu, x, work, tol_bits);
        let done = v.sign().is_some() && {
            let mut allowed = up(v.mid().clone().abs());
            allowed >>= precision;
            v.rad() <= &allowed
        };
        let deficit = if v.sign().is_some() {
            // log2(rad / |mid|) + precision
            let ratio = up(v.rad() / down(v.mid().clone().abs()));
            (ratio.get_exp().unwrap_or(0) + precision as i32).max(0) as u32
        } else {
            work
        };
        best = Some(match best {
            Some(b) if b.rad() <= v.rad() => b,
            _ => v,
        });
        if done {
            break;
        }
        work += deficit + 32;
        tol_bits += deficit + 32;
    }
    best.expect("at least one pass").with_prec(precision)
}

/// One pass of the ascending series at working precision `work`, stopping
/// when the tail majorant drops below `|sum| · 2^-tol_bits` or below the
/// rounding floor of the largest term.
fn series_at(nu: u32, x: &Float, work: u32, tol_bits: u32) -> CertifiedReal {
    let mut half = Float::with_val(work.max(x.prec()), x);
    half >>= 1;
    let half = CertifiedReal::exact(half);
    let q = half.square();
    let q_hi = q.upper();
    let factorial = CertifiedReal::from_integer(&Integer::from(Integer::factorial(nu)), work);
    let mut term = half
        .pow_u(nu)
        .checked_div(&factorial)
        .expect("factorial is positive")
        .with_prec(work);
    let mut sum = term.clone();
    let mut largest = term.abs_upper();
    let one = Float::with_val(RAD_PREC, 1);
    let mut j: u64 = 0;
    loop {
        let den = (j + 1) * (nu as u64 + j + 1);
        let ratio = up(&q_hi / den);
        if ratio < one {
            // Σ_{i > j} |t_i| <= |t_j| ρ / (1 - ρ) with ρ the current ratio bound.
            let tail = up(up(term.abs_upper() * &ratio) / down(&one - &ratio));
            let mut rel_target = down(sum.abs_lower());
            rel_target >>= tol_bits;
            let mut floor = down(&largest);
            floor >>= work;
            if tail <= rel_target || tail <= floor || j >= MAX_TERMS {
                sum.add_error(&tail);
                return sum;
            }
        }
        term = (&term * &q).div_u64(den);
        term = -term;
        let t_abs = term.abs_upper();
        if t_abs > largest {
            largest = t_abs;
        }
        sum = &sum + &term;
        j += 1;
    }
}

/// `J_ν(ν)` with the leading asymptotic `Γ(1/3) / (48^(1/6) π) ν^(-1/3)` kept
/// alongside as an uncertified diagnostic.
#[derive(Debug, Clone)]
pub struct JNuAtNu {
    pub nu: u32,
    pub value: CertifiedReal,
    pub predictor: f64,
}

/// `Γ(1/3) / (48^(1/6) π)`.
pub fn transition_constant() -> f64 {
    let prec = 80;
    let third = Float::with_val(prec, 1) / 3u32;
    let gamma = Float::with_val(prec, third.gamma_ref());
    let root = Float::with_val(prec, 48u32).pow(Float::with_val(prec, 1) / 6u32);
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    (gamma / root / pi).to_f64()
}

pub fn j_nu_at_nu(nu: u32, precision: u32) -> Result<JNuAtNu> {
    if nu == 0 {
        return Err(Error::precondition("J_ν(ν) needs ν >= 1"));
    }
    let x = CertifiedReal::exact(Float::with_val(64, nu));
    let value = bessel_j(nu, &x, precision)?;
    let predictor = transition_constant() * (nu as f64).powf(-1.0 / 3.0);
    Ok(JNuAtNu {
        nu,
        value,
        predictor,
    })
}

/// Certified lower bound `J_ν(ν)·δ^ν <= J_ν(νδ)` for `0 < δ <= 1`, rounded
/// toward zero.
pub fn lower_bound_j(nu: u32, delta: &Float, precision: u32) -> Result<Float> {
    if !(delta.is_sign_positive() && !delta.is_zero() && *delta <= 1) {
        return Err(Error::precondition(format!("δ = {delta} is not in (0, 1]")));
    }
    let at_nu = j_nu_at_nu(nu, precision)?.value.lower();
    if at_nu.cmp0() != Some(Ordering::Greater) {
        return Ok(Float::new(precision));
    }
    let power = Float::with_val_round(precision, delta.pow(nu), Round::Down).0;
    Ok(Float::with_val_round(precision, at_nu * power, Round::Down).0)
}

/// `(|x|/2)^ν / ν! · exp(x²/4)`, rounded up; dominates `|J_ν(x)|` termwise.
pub fn upper_bound_j(nu: u32, x: &Float) -> Float {
    let mut half = up(x.clone().abs());
    half >>= 1;
    if half.is_zero() {
        return if nu == 0 {
            Float::with_val(RAD_PREC, 1)
        } else {
            Float::new(RAD_PREC)
        };
    }
    let power = up((&half).pow(nu));
    let factorial = down(&Integer::from(Integer::factorial(nu)));
    let lead = up(power / factorial);
    let mut sq = up(x.clone().square());
    sq >>= 2;
    up(lead * up(sq.exp()))
}

/// Explicit majorant of `Σ_{c >= c0} |J_ν(scale / c)|` for `scale >= 0`.
pub(crate) fn tail_majorant(nu: u32, scale: &Float, c0: u64) -> Result<Float> {
    if nu < 2 {
        return Err(Error::precondition("tail bound needs ν >= 2"));
    }
    if c0 == 0 {
        return Err(Error::precondition("c0 must be >= 1"));
    }
    let c0f = Float::with_val(RAD_PREC, c0);
    // |J_ν(s/c)| <= (s/2)^ν/ν! · exp((s/c0)²/4) · c^-ν for every c >= c0.
    let mut half = up(scale.clone().abs());
    half >>= 1;
    let lead = up(up((&half).pow(nu)) / down(&Integer::from(Integer::factorial(nu))));
    let mut arg = up(up(scale.clone().abs() / down(&c0f)).square());
    arg >>= 2;
    let growth = up(arg.exp());
    // Σ_{c >= c0} c^-ν <= c0^-ν + ∫_{c0}^∞ t^-ν dt = c0^-ν + c0^(1-ν)/(ν-1)
    let c_pow = down((&c0f).pow(nu));
    let first = up(Float::with_val(RAD_PREC, 1) / &c_pow);
    let integral = up(up(&c0f / &c_pow) / (nu - 1));
    let series = up(first + integral);
    Ok(up(up(lead * growth) * series))
}

/// Explicit majorant of `Σ_{c >= c0} |J_ν(ν δ / c)|`.
pub fn tail_bound(nu: u32, delta: &Float, c0: u64) -> Result<Float> {
    if !(delta.is_sign_positive() && !delta.is_zero()) {
        return Err(Error::precondition("δ must be positive"));
    }
    let scale = up(Float::with_val(RAD_PREC, nu) * delta);
    tail_majorant(nu, &scale, c0)
}

/// Convenience for exact `f64` arguments.
pub fn bessel_j_f64(nu: u32, x: f64, precision: u32) -> Result<CertifiedReal> {
    bessel_j(nu, &CertifiedReal::exact(exact(x)), precision)
}
