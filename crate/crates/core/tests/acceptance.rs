//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Reference values are recomputed here from closed forms rather than taken
//! from the library.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sle_coset::affine::{admissible_pq, sugawara_check};
use sle_coset::coset::{branching_check, commutant_check, coset_central_charge, omega_com_check};
use sle_coset::internal::{internal_consistency, InternalScheme};
use sle_coset::loewner::{compose, q_operator, sle_ensemble, AutSeries};
use sle_coset::martingale::{corollary_projection_check, theorem2_drift_check, vacuum_drift_check};
use sle_coset::montecarlo::{mc_simulate, McConfig, McTarget};
use sle_coset::scalar::{int, rat};
use sle_coset::sl2::Spin;
use sle_coset::virasoro::{
    level_two_vector, minimal_central_charge, minimal_constants, partitions, sle_constants, singular_vector_check,
    Partition, VermaModule,
};
use sle_coset::{LinComb, Rational};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fmt(x: &Rational) -> String {
    sle_coset::format_rational(x)
}

fn coprime_pairs() -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for p in 3..=12i64 {
        for q in 3..=12i64 {
            if p.gcd(&q) == 1 {
                out.push((p, q));
            }
        }
    }
    out
}

fn oracle_c(p: i64, q: i64) -> Rational {
    int(1) - rat(6 * (p - q) * (p - q), p * q)
}

fn oracle_h(p: i64, q: i64, r: i64, s: i64) -> Rational {
    rat((r * q - s * p).pow(2) - (p - q).pow(2), 4 * p * q)
}

fn admissible_levels() -> Vec<Rational> {
    vec![int(1), int(2), int(3), rat(-1, 2), rat(-2, 3), int(4)]
}

fn critical(k: &Rational) -> (Rational, Rational) {
    (int(4) * (k + int(2)) / (k + int(3)), int(2) / (k + int(3)))
}

fn criterion_1() -> Outcome {
    let pairs = coprime_pairs();
    for &(p, q) in &pairs {
        let report = singular_vector_check(p, q, Some(&rat(1, 10))).map_err(|e| e.to_string())?;
        ensure(report.status.is_verified(), || format!("({p},{q}): {:?}", report.witness))?;

        // L_1 chi = (-6 + (kappa/2)(4h+2)) L_{-1}|h>, L_2 chi = (3 kappa h - 8h - c)|h>.
        let c = oracle_c(p, q);
        let h = oracle_h(p, q, 2, 1);
        let module = VermaModule::new(c.clone(), h.clone(), 2);
        for kappa in [rat(4 * p, q), rat(4 * p, q) + rat(1, 10)] {
            let chi = level_two_vector(&kappa);
            let l1 = module.apply(1, &chi).map_err(|e| e.to_string())?;
            let l2 = module.apply(2, &chi).map_err(|e| e.to_string())?;
            let a1 = int(-6) + &kappa / int(2) * (int(4) * &h + int(2));
            let a2 = int(3) * &kappa * &h - int(8) * &h - &c;
            let e1 = LinComb::term(Partition::new(vec![1]).unwrap(), a1.clone());
            let e2 = LinComb::term(Partition::empty(), a2.clone());
            ensure(l1 == e1 && l2 == e2, || format!("({p},{q}) kappa={}: action disagrees with closed form", fmt(&kappa)))?;
            let exact = kappa == rat(4 * p, q);
            ensure(exact == (a1.is_zero() && a2.is_zero()), || format!("({p},{q}) kappa={}: unexpected vanishing", fmt(&kappa)))?;
        }
    }
    Ok(format!("{} coprime pairs, perturbation 1/10 detected", pairs.len()))
}

fn criterion_2() -> Outcome {
    let pairs = coprime_pairs();
    for &(p, q) in &pairs {
        let a = sle_constants(&rat(4 * p, q)).map_err(|e| e.to_string())?;
        let b = minimal_constants(p, q, 2, 1).map_err(|e| e.to_string())?;
        let oracle = (oracle_c(p, q), oracle_h(p, q, 2, 1));
        ensure(a == b && a == oracle, || format!("({p},{q}): {:?} vs {:?} vs {:?}", a, b, oracle))?;
    }
    Ok(format!("{} pairs agree with c = 1 - 6(p-q)^2/pq, h = h_(2,1)", pairs.len()))
}

fn criterion_3() -> Outcome {
    let levels = [int(1), int(2), int(3), rat(-1, 2), rat(-2, 3)];
    for k in &levels {
        let c = int(3) * k / (k + int(2));
        for j in [Spin::ZERO, Spin::HALF] {
            let r = sugawara_check(k, j, 4, 4).map_err(|e| e.to_string())?;
            ensure(r.status.is_verified(), || format!("k={} j={j}: {:?}", fmt(k), r.witness))?;
            ensure(r.parameters["central_charge"] == fmt(&c), || format!("k={}: c mismatch", fmt(k)))?;
            let extracted = r.checks.iter().find(|s| s.name.starts_with("central charge")).and_then(|s| s.witness.clone());
            ensure(extracted.map(|w| w.value) == Some(fmt(&c)), || format!("k={}: extracted c differs", fmt(k)))?;
            let h = r.checks.iter().find(|s| s.name.starts_with("L_0")).and_then(|s| s.witness.clone());
            let expected = if j == Spin::HALF { rat(3, 4) / (k + int(2)) } else { Rational::zero() };
            ensure(h.map(|w| w.value) == Some(fmt(&expected)), || format!("k={} j={j}: weight differs", fmt(k)))?;
        }
    }
    Ok("brackets on grades <= 4, |m|,|n| <= 4, five levels".into())
}

fn criterion_4() -> Outcome {
    for k in admissible_levels() {
        let (p, q) = admissible_pq(&k).map_err(|e| e.to_string())?;
        let c = coset_central_charge(&k).map_err(|e| e.to_string())?;
        let oracle = int(1) - int(6) / ((&k + int(2)) * (&k + int(3)));
        ensure(c == oracle && c == minimal_central_charge(p, p + q) && c == oracle_c(p, p + q), || {
            format!("k={}: c^Com = {}", fmt(&k), fmt(&c))
        })?;
        let r = omega_com_check(&k).map_err(|e| e.to_string())?;
        ensure(r.status.is_verified(), || format!("k={}: omega^Com {:?}", fmt(&k), r.witness))?;
    }
    for (k, j) in [(int(1), Spin::HALF), (int(1), Spin::ZERO), (rat(-1, 2), Spin::ZERO)] {
        let r = commutant_check(&k, j, Spin::HALF, 3, 3).map_err(|e| e.to_string())?;
        ensure(r.status.is_verified(), || format!("k={} commutant: {:?}", fmt(&k), r.witness))?;
    }
    Ok("central charges, omega^Com, [L^Com_n, X(m)] = 0 on grades <= 3".into())
}

fn criterion_5() -> Outcome {
    let mut cells = 0;
    for (k, j, eps) in [(int(1), Spin::HALF, Spin::HALF), (int(1), Spin::HALF, Spin::ZERO), (int(2), Spin::HALF, Spin::HALF)] {
        let r = branching_check(&k, j, eps, 3).map_err(|e| e.to_string())?;
        ensure(r.status.is_verified(), || format!("({}, {j}, {eps}): {:?}", fmt(&k), r.witness))?;
        ensure(r.cells.iter().all(|c| c.matches && c.lhs_dim == c.rhs_dim), || "cell mismatch".into())?;
        cells += r.cells.len();
    }
    Ok(format!("three cases, {cells} refined cells up to grade 3"))
}

fn criterion_6() -> Outcome {
    for k in [int(1), int(2), int(3), rat(-1, 2)] {
        let tau0 = int(2) / (&k + int(3));
        for kappa in [int(2), int(3), rat(8, 3), int(6)] {
            let r = vacuum_drift_check(&k, &kappa, &tau0).map_err(|e| e.to_string())?;
            ensure(r.status.is_verified(), || format!("k={} kappa={}: {:?}", fmt(&k), fmt(&kappa), r.witness))?;
            for tau in [&tau0 + rat(1, 7), &tau0 / int(2), Rational::zero()] {
                let r = vacuum_drift_check(&k, &kappa, &tau).map_err(|e| e.to_string())?;
                ensure(!r.status.is_verified(), || format!("k={} tau={}: drift vanished", fmt(&k), fmt(&tau)))?;
            }
        }
    }
    Ok("vanishes exactly at tau = 2/(k+3) for four kappa values".into())
}

fn criterion_7() -> Outcome {
    for k in admissible_levels() {
        let (kappa, tau) = critical(&k);
        let r = theorem2_drift_check(&k, &kappa, &tau, 2).map_err(|e| e.to_string())?;
        ensure(r.status.is_verified(), || format!("k={}: {:?}", fmt(&k), r.witness))?;
    }
    let k = int(1);
    let (kappa0, tau0) = critical(&k);
    let mut off = 0;
    for kappa in [int(2), rat(5, 2), int(3), rat(7, 2), int(4)] {
        for tau in [rat(1, 4), rat(1, 2), int(1)] {
            if kappa == kappa0 && tau == tau0 {
                continue;
            }
            let r = theorem2_drift_check(&k, &kappa, &tau, 2).map_err(|e| e.to_string())?;
            ensure(!r.status.is_verified() && r.witness.is_some(), || format!("kappa={} tau={}: drift vanished", fmt(&kappa), fmt(&tau)))?;
            let expected = match (kappa == kappa0, tau == tau0) {
                (true, false) => "casimir",
                (false, true) => "coset_virasoro",
                _ => "mixed",
            };
            ensure(r.direction.as_deref() == Some(expected), || format!("kappa={} tau={}: direction {:?}", fmt(&kappa), fmt(&tau), r.direction))?;
            off += 1;
        }
    }
    Ok(format!("zero at six critical points, nonzero at {off} sweep points"))
}

fn criterion_8() -> Outcome {
    for k in admissible_levels() {
        let (kappa, tau) = critical(&k);
        let r = corollary_projection_check(&k, &kappa, &tau).map_err(|e| e.to_string())?;
        ensure(r.status.is_verified(), || format!("k={}: {:?}", fmt(&k), r.checks))?;
    }
    let r = corollary_projection_check(&int(1), &int(3), &int(1)).map_err(|e| e.to_string())?;
    ensure(!r.status.is_verified(), || "projection vanished off the critical point".into())?;
    Ok("both projections vanish, projected |s> spans L(1/2)".into())
}

fn random_series(rng: &mut ChaCha8Rng, order: usize) -> AutSeries<Rational> {
    AutSeries::from_coeffs((0..=order).map(|_| rat(rng.random_range(-9..=9), rng.random_range(1..=5))).collect())
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let module = VermaModule::new(rat(-22, 5), rat(-1, 5), 6);
    let dim: usize = (0..=6).map(|g| partitions(g).len()).sum();
    for i in 0..50 {
        let rho = random_series(&mut rng, 6);
        let mu = random_series(&mut rng, 6);
        let qr = q_operator(&rho, &module).map_err(|e| e.to_string())?;
        let qm = q_operator(&mu, &module).map_err(|e| e.to_string())?;
        let prod = compose(&rho, &mu).map_err(|e| e.to_string())?;
        let qp = q_operator(&prod, &module).map_err(|e| e.to_string())?;
        ensure(qp.rows() == dim && qp == qr.mul(&qm), || format!("pair {i}: Q(rho*mu) != Q(rho)Q(mu)"))?;
        ensure((0..dim).all(|d| qp.get(d, d).is_one()), || format!("pair {i}: not unipotent"))?;
    }
    Ok(format!("50 random pairs, {dim}-dimensional truncation"))
}

fn criterion_10() -> Outcome {
    let mut lines = Vec::new();
    for (kappa, seed) in [(3.0, 11u64), (6.0, 12)] {
        let e = sle_ensemble(kappa, 1e-3, 1.0, 6, 10_000, seed).map_err(|e| e.to_string())?;
        ensure(e.max_hydrodynamic_error == 0.0, || format!("kappa={kappa}: |a_-1 - 2t| = {}", e.max_hydrodynamic_error))?;
        let a2 = e.coefficients[2];
        ensure(a2.mean.abs() < 3.0 * a2.stderr, || format!("kappa={kappa}: E a_-2 = {} +- {}", a2.mean, a2.stderr))?;
        lines.push(format!("kappa={kappa}: E a_-2 = {:.4} +- {:.4}", a2.mean, a2.stderr));
    }
    Ok(lines.join("; "))
}

fn criterion_11() -> Outcome {
    let mut cfg = McConfig::new(McTarget::Tensor { k: int(1) }, int(3), rat(1, 2));
    cfg.seed = 20;
    let good = mc_simulate(&cfg).map_err(|e| e.to_string())?;
    ensure(good.status.is_verified(), || format!("max |z| = {:.2} at {:?}", good.max_abs_z, good.worst_component))?;
    ensure(good.components.iter().all(|c| c.grade <= 3) && good.components.iter().any(|c| c.grade == 3), || "grade coverage".into())?;
    cfg.tau = int(1);
    let bad = mc_simulate(&cfg).map_err(|e| e.to_string())?;
    ensure(bad.drift_detected, || format!("tau=1 max |z| only {:.2}", bad.max_abs_z))?;
    Ok(format!(
        "{} components, max |z| {:.2} at tau=1/2, {:.1} at tau=1",
        good.components.len(),
        good.max_abs_z,
        bad.max_abs_z
    ))
}

fn criterion_12() -> Outcome {
    let r = internal_consistency(3.0, 0.5, 0.2, &[4e-4, 2e-4, 1e-4], 6, 32, 5, InternalScheme::Milstein)
        .map_err(|e| e.to_string())?;
    ensure(r.ratios.iter().all(|x| (1.6..=2.4).contains(x)), || format!("error ratios {:?}", r.ratios))?;
    ensure(r.max_det_deviation <= 1e-3, || format!("|det - 1| = {:e}", r.max_det_deviation))?;
    Ok(format!(
        "errors {:?}, ratios {:.2?}, max |det - 1| {:.1e}",
        r.errors.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>(),
        r.ratios,
        r.max_det_deviation
    ))
}

fn main() {
    type Criterion = (&'static str, u64, fn() -> Outcome);
    let criteria: [Criterion; 12] = [
        ("singular vector", 1, criterion_1),
        ("SLE constants", 1, criterion_2),
        ("Sugawara central charge", 30, criterion_3),
        ("coset identities", 60, criterion_4),
        ("branching", 120, criterion_5),
        ("vacuum drift", 10, criterion_6),
        ("drift of |s>", 120, criterion_7),
        ("corollary projections", 10, criterion_8),
        ("Q multiplicativity", 60, criterion_9),
        ("SLE series integrator", 60, criterion_10),
        ("Monte Carlo martingale", 300, criterion_11),
        ("internal process", 120, criterion_12),
    ];
    let mut failures = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|d| {
            if elapsed <= Duration::from_secs(*limit) {
                Ok(d)
            } else {
                Err(format!("{d}; exceeded {limit} s"))
            }
        });
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d.clone()),
            Err(d) => ("FAIL", d.clone()),
        };
        if outcome.is_err() {
            failures += 1;
        }
        println!(
            "criterion {:>2} {tag} {name} [{:.2} s / {limit} s]: {detail}",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of 12 criteria passed", 12 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
