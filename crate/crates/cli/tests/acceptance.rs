//! Acceptance gate: one line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test -p poincare-cli --test acceptance`.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use poincare_cli::config::ConfigFile;
use poincare_cli::report::{read_json_rows, Status};
use poincare_cli::sweep;
use poincare_core::arith::{factorize, gcd, is_prime};
use poincare_core::bessel::{bessel_j, j_nu_at_nu, lower_bound_j, upper_bound_j};
use poincare_core::kloosterman::{
    angle_sample, find_large_n, kloosterman_factored, second_moment, weil_type_bound,
    KloostermanTable,
};
use poincare_core::poincare::{
    certify_nonzero, coefficient, tau_oracle, CertifyOptions, CoefficientQuery,
};
use poincare_core::CertifiedReal;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::float::Round;
use rug::Float;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn squarefree_up_to(n: u64) -> Vec<u64> {
    (1..=n)
        .filter(|&c| factorize(c).unwrap().is_squarefree())
        .collect()
}

fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| is_prime(p).unwrap()).collect()
}

fn within(elapsed: Duration, limit_secs: u64, detail: String) -> Outcome {
    let secs = elapsed.as_secs_f64();
    if secs < limit_secs as f64 {
        Ok(format!("{detail}, {secs:.1}s"))
    } else {
        Err(format!(
            "{detail}, {secs:.1}s exceeds the {limit_secs}s limit"
        ))
    }
}

fn route_equivalence() -> Outcome {
    let start = Instant::now();
    let moduli = squarefree_up_to(1000);
    let failures: Vec<String> = moduli
        .par_iter()
        .flat_map_iter(|&c| {
            let mut rng = ChaCha8Rng::seed_from_u64(c);
            let table = KloostermanTable::new(c, 64).unwrap();
            (0..50)
                .filter_map(|_| {
                    let a = rng.gen_range(-10_000i64..=10_000);
                    let b = rng.gen_range(-10_000i64..=10_000);
                    let direct = table.eval(a, b);
                    let factored = kloosterman_factored(a, b, c, 64).unwrap().value;
                    (!direct.overlaps(&factored)).then(|| format!("K({a},{b},{c})"))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    if !failures.is_empty() {
        return Err(format!(
            "{} failures, first {}",
            failures.len(),
            failures[0]
        ));
    }
    within(
        start.elapsed(),
        60,
        format!("{} moduli x 50 pairs, 0 failures", moduli.len()),
    )
}

fn second_moment_identity() -> Outcome {
    let mut checked = 0;
    for p in primes_up_to(199) {
        let ms: Vec<i64> = (1..).filter(|m| m % p as i64 != 0).take(5).collect();
        for m in ms {
            let s = second_moment(m, p, 96).map_err(|e| e.to_string())?;
            let want = (p * p - p - 1) as f64;
            let err = (s.to_f64() - want).abs() + s.rad().to_f64();
            if err >= 1e-6 {
                return Err(format!("S_2({m}; {p}) = {s}, expected {want}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} (p, m) pairs within 1e-6"))
}

fn squarefree_nonvanishing() -> Outcome {
    let mut checked = 0;
    let mut weakest = f64::INFINITY;
    for n in squarefree_up_to(60) {
        let table = KloostermanTable::new(n, 64).unwrap();
        for a in 1..=n as i64 {
            for b in 1..=n as i64 {
                let lo = table.eval(a, b).abs_lower().to_f64();
                if lo <= 1e-8 {
                    return Err(format!("|K({a},{b},{n})| lower endpoint {lo:e}"));
                }
                weakest = weakest.min(lo);
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{checked} sums, smallest lower endpoint {weakest:.3e}"
    ))
}

fn weil_type_bound_samples() -> Outcome {
    let levels = squarefree_up_to(100);
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut samples: Vec<(u64, u64, i64, i64)> = (0..10_000)
        .map(|_| {
            let level = levels[rng.gen_range(0..levels.len())];
            let c = rng.gen_range(1..=50u64);
            (
                level,
                c,
                rng.gen_range(1..=1000i64),
                rng.gen_range(1..=1000i64),
            )
        })
        .collect();
    samples.sort_by_key(|&(level, c, _, _)| level * c);
    let chunks: Vec<&[(u64, u64, i64, i64)]> =
        samples.chunk_by(|x, y| x.0 * x.1 == y.0 * y.1).collect();
    let violations: Vec<String> = chunks
        .par_iter()
        .flat_map_iter(|chunk| {
            let table = KloostermanTable::new(chunk[0].0 * chunk[0].1, 64).unwrap();
            chunk
                .iter()
                .filter_map(|&(level, c, m, n)| {
                    let v = table.eval(m, n);
                    let bound = weil_type_bound(n, level, c).unwrap();
                    (v.abs_upper() > bound)
                        .then(|| format!("K({m},{n},{level}*{c}) = {v} > {bound}"))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    match violations.first() {
        None => Ok("10000 samples, 0 violations".into()),
        Some(v) => Err(format!("{} violations, first {v}", violations.len())),
    }
}

fn weil_normalization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for p in primes_up_to(500) {
        let table = KloostermanTable::new(p, 64).unwrap();
        let mut bound = Float::with_val_round(64, p, Round::Up).0;
        bound.sqrt_round(Round::Up);
        bound *= 2u32;
        let mut done = 0;
        while done < 20 {
            let a = rng.gen_range(1..=1_000_000i64);
            let b = rng.gen_range(1..=1_000_000i64);
            if a % p as i64 == 0 || b % p as i64 == 0 {
                continue;
            }
            let v = table.eval(a, b);
            if v.abs_lower() > bound {
                return Err(format!("|K({a},{b},{p})| = {v} exceeds 2√p"));
            }
            done += 1;
            checked += 1;
        }
    }
    Ok(format!("{checked} sums, 0 violations"))
}

fn sato_tate() -> Outcome {
    let start = Instant::now();
    let big = angle_sample(9973, 1, 9972, 64).map_err(|e| e.to_string())?;
    let small = angle_sample(101, 1, 100, 64).map_err(|e| e.to_string())?;
    let ks_big = big.ks_distance().map_err(|e| e.to_string())?;
    let ks_small = small.ks_distance().map_err(|e| e.to_string())?;
    let detail = format!("KS(9973) = {ks_big:.4}, KS(101) = {ks_small:.4}");
    if ks_big >= 0.05 || ks_big >= ks_small {
        return Err(detail);
    }
    within(start.elapsed(), 30, detail)
}

fn bessel_accuracy() -> Outcome {
    let j = bessel_j(1, &CertifiedReal::from_f64(1.0), 96).map_err(|e| e.to_string())?;
    let err = (j.to_f64() - 0.4400505857449335).abs();
    if err >= 1e-12 {
        return Err(format!("J_1(1) = {j}"));
    }
    let cells: Vec<(u32, u32)> = (4..=128u32)
        .flat_map(|nu| (1..=10u32).map(move |t| (nu, t)))
        .collect();
    let violations: Vec<String> = cells
        .par_iter()
        .filter_map(|&(nu, tenths)| {
            let delta = Float::with_val(64, tenths) / 10u32;
            let x = Float::with_val(64, &delta * nu);
            let j = bessel_j(nu, &CertifiedReal::exact(x.clone()), 96).unwrap();
            let lo = lower_bound_j(nu, &delta, 96).unwrap();
            let hi = upper_bound_j(nu, &x);
            (lo > j.lower() || j.upper() > hi).then(|| format!("nu = {nu}, delta = {delta}"))
        })
        .collect();
    match violations.first() {
        None => Ok(format!(
            "|J_1(1) - ref| = {err:.1e}, {} grid cells sandwiched",
            cells.len()
        )),
        Some(v) => Err(format!(
            "{} sandwich violations, first {v}",
            violations.len()
        )),
    }
}

fn transition_constant() -> Outcome {
    let v = j_nu_at_nu(512, 128).map_err(|e| e.to_string())?;
    let scaled = v.value.to_f64() * 512f64.cbrt();
    let detail = format!("512^(1/3) J_512(512) = {scaled:.6}");
    if (scaled - 0.44730).abs() < 0.01 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn tau_reproduction() -> Outcome {
    let start = Instant::now();
    let tau = tau_oracle(12).map_err(|e| e.to_string())?;
    let opts = CertifyOptions {
        precision: 128,
        max_precision: 256,
        target_radius: 1e-12,
        max_truncation: None,
    };
    let values: Vec<CertifiedReal> = (1..=12u64)
        .into_par_iter()
        .map(|n| {
            let q = CoefficientQuery::new(12, 1, 1, n).unwrap();
            certify_nonzero(&q, &opts).unwrap().value
        })
        .collect();
    let mut worst = 0f64;
    for n in 1..=12usize {
        let ratio = values[n - 1]
            .checked_div(&values[0])
            .map_err(|e| e.to_string())?;
        let t = tau[n - 1].to_f64();
        let rel = ((ratio.to_f64() - t).abs() + ratio.rad().to_f64()) / t.abs();
        if rel >= 1e-6 {
            return Err(format!("p(1;{n})/p(1;1) = {ratio}, tau = {t}"));
        }
        worst = worst.max(rel);
    }
    within(
        start.elapsed(),
        10,
        format!("n <= 12, worst relative error {worst:.1e}"),
    )
}

fn theorem_1_sweep() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_poincare"))
        .args([
            "verify",
            "--theorem",
            "1",
            "--k-start",
            "16",
            "--k-end",
            "60",
            "--format",
            "json",
        ])
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "exit {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let rows = read_json_rows(&String::from_utf8_lossy(&out.stdout)).map_err(|e| e.to_string())?;
    if rows.is_empty() {
        return Err("no rows".into());
    }
    if let Some(r) = rows
        .iter()
        .find(|r| r.status != Status::Nonzero || r.n_first != Some(1) || r.sign == "undetermined")
    {
        return Err(format!("row k = {}, m = {}: {:?}", r.k, r.m, r));
    }
    within(
        start.elapsed(),
        300,
        format!("{} rows, all n_first = 1", rows.len()),
    )
}

fn theorem_5_sweep() -> Outcome {
    let cfg = ConfigFile::parse("theorem = 5\nk_start = 40\nlevels = [2, 3, 5, 6]\n")
        .and_then(ConfigFile::resolve)
        .map_err(|e| e.to_string())?;
    let report = sweep::run(&cfg).map_err(|e| e.to_string())?;
    for r in &report.rows {
        match r.n_first {
            Some(n) if n <= 2 * r.level && r.status == Status::Nonzero => {}
            _ => return Err(format!("N = {}, m = {}: {:?}", r.level, r.m, r)),
        }
    }
    let mut per_level = Vec::new();
    for &level in &cfg.levels {
        let count = report.rows.iter().filter(|r| r.level == level).count();
        if count == 0 {
            return Err(format!("no admissible m for N = {level}"));
        }
        per_level.push(format!("N={level}:{count}"));
    }
    Ok(format!(
        "{} rows ({}), all n_first <= 2N",
        report.rows.len(),
        per_level.join(" ")
    ))
}

fn weighted(x: &CertifiedReal, a: u64, b: u64, k: u32) -> CertifiedReal {
    let prec = x.prec();
    let ratio = CertifiedReal::from_i64(a as i64, prec)
        .checked_div(&CertifiedReal::from_i64(b as i64, prec))
        .unwrap();
    &ratio.sqrt().unwrap().pow_u(k - 1) * x
}

fn symmetry() -> Outcome {
    let mut cases = Vec::new();
    for k in [12u32, 16, 20] {
        for level in [1u64, 2, 3] {
            for m in 1..=5u64 {
                for n in 1..=5u64 {
                    cases.push((k, level, m, n));
                }
            }
        }
    }
    let failures: Vec<String> = cases
        .par_iter()
        .filter_map(|&(k, level, m, n)| {
            let eval = |a: u64, b: u64| {
                let q = CoefficientQuery::new(k, a, level, b).unwrap();
                let mut v = coefficient(&q, 128, 1e-15).unwrap().value;
                if a == b {
                    v = v - CertifiedReal::one(128);
                }
                weighted(&v, a, b, k)
            };
            let lhs = eval(m, n);
            let rhs = eval(n, m);
            (!lhs.overlaps(&rhs))
                .then(|| format!("k = {k}, N = {level}, ({m}, {n}): {lhs} vs {rhs}"))
        })
        .collect();
    match failures.first() {
        None => Ok(format!("{} (k, N, m, n) cases overlap", cases.len())),
        Some(f) => Err(format!("{} failures, first {f}", failures.len())),
    }
}

fn large_value_witness() -> Outcome {
    let pairs: Vec<(u64, u64)> = squarefree_up_to(100)
        .into_iter()
        .flat_map(|n| {
            (1..=20u64)
                .filter(move |&m| gcd(m, n) == 1)
                .map(move |m| (n, m))
        })
        .collect();
    let failures: Vec<String> = pairs
        .par_iter()
        .filter_map(|&(n, m)| {
            find_large_n(m as i64, n, 64)
                .err()
                .map(|e| format!("N = {n}, m = {m}: {e}"))
        })
        .collect();
    match failures.first() {
        None => Ok(format!("{} (N, m) pairs found a witness", pairs.len())),
        Some(f) => Err(format!("{} failures, first {f}", failures.len())),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("route equivalence", route_equivalence),
        ("second-moment identity", second_moment_identity),
        ("Kloosterman sums mod square-free N are nonzero", squarefree_nonvanishing),
        ("Weil-type bound on random samples", weil_type_bound_samples),
        ("Weil normalization at primes", weil_normalization),
        ("Sato-Tate desk check", sato_tate),
        ("Bessel accuracy and sandwich grid", bessel_accuracy),
        ("transition constant at nu = 512", transition_constant),
        ("tau reproduction", tau_reproduction),
        ("theorem 1 desk run", theorem_1_sweep),
        ("theorem 5 desk run", theorem_5_sweep),
        ("coefficient symmetry", symmetry),
        ("large Kloosterman value witness", large_value_witness),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("[PASS] {:>2}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {:>2}. {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
