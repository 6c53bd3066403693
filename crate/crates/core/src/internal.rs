//! The internal process `|lambda(z)>_t` in `L(1/2)[[z^-1]]`, integrated
//! directly and through the evaluation-representation matrix `Theta_t(z)`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::loewner::{step_count, SleSeriesState};
use crate::report::Status;
use crate::series::Laurent;
use crate::stats::{sample_rng, with_pool};

type C = Complex64;
type Series = Laurent<C>;
pub type SeriesMatrix = [[Series; 2]; 2];
pub type SeriesVector = [Series; 2];

/// Value of `sum_a X_a^2` on `L(1/2)` for the trace-orthonormal basis.
pub const FUNDAMENTAL_CASIMIR: f64 = 1.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InternalScheme {
    /// `Theta <- Theta (1 + A + A^2/2)`, `lambda <- (1 - A + A^2/2) lambda`.
    Milstein,
    /// `Theta <- Theta (1 + D dt + A)`, `lambda <- (1 + D dt - A) lambda`.
    EulerMaruyama,
}

/// `sqrt(1/2) (H dW1 + E (dW2 + i dW3) + F (dW2 - i dW3))`, i.e.
/// `sum_a X_a dW^a` on `C^2 = L(1/2)`.
pub fn noise_matrix(dw: [f64; 3]) -> [[C; 2]; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        [C::new(s * dw[0], 0.0), C::new(s * dw[1], s * dw[2])],
        [C::new(s * dw[1], -s * dw[2]), C::new(-s * dw[0], 0.0)],
    ]
}

fn cmul(a: &[[C; 2]; 2], b: &[[C; 2]; 2]) -> [[C; 2]; 2] {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]))
}

fn zero(order: usize) -> Series {
    Laurent::new(0, vec![C::new(0.0, 0.0); order + 1])
}

fn constant(c: C, order: usize) -> Series {
    Laurent::constant(c, -(order as i32))
}

/// `M (K (x) g)` for a scalar matrix `K` and a scalar series `g`.
fn times_scalar_matrix(m: &SeriesMatrix, k: &[[C; 2]; 2], g: &Series, lowest: i32) -> SeriesMatrix {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            m[i][0]
                .scale(&k[0][j])
                .add(&m[i][1].scale(&k[1][j]))
                .mul(g)
                .truncate(lowest)
        })
    })
}

/// `(K (x) g) v`.
fn scalar_matrix_times(k: &[[C; 2]; 2], g: &Series, v: &SeriesVector, lowest: i32) -> SeriesVector {
    std::array::from_fn(|i| {
        v[0].scale(&k[i][0])
            .add(&v[1].scale(&k[i][1]))
            .mul(g)
            .truncate(lowest)
    })
}

/// Both formulations of the internal process, truncated below `z^-order`.
#[derive(Clone, Debug)]
pub struct InternalState {
    pub order: usize,
    pub theta: SeriesMatrix,
    pub lambda: SeriesVector,
    pub initial: [C; 2],
}

impl InternalState {
    /// `Theta_0 = 1`, `|lambda>_0 = initial`.
    pub fn new(order: usize, initial: [C; 2]) -> Self {
        let one = constant(C::new(1.0, 0.0), order);
        let z = zero(order);
        Self {
            order,
            theta: [[one.clone(), z.clone()], [z.clone(), one]],
            lambda: initial.map(|c| constant(c, order)),
            initial,
        }
    }

    pub fn det(&self) -> Series {
        let t = &self.theta;
        t[0][0].mul(&t[1][1]).sub(&t[0][1].mul(&t[1][0]))
    }

    /// `Theta^{-1} |initial>` via the adjugate.
    pub fn theta_inverse_initial(&self) -> SeriesVector {
        let t = &self.theta;
        let inv_det = self.det().recip();
        let minus = C::new(-1.0, 0.0);
        let [a, b] = self.initial;
        let v0 = t[1][1].scale(&a).add(&t[0][1].scale(&(minus * b)));
        let v1 = t[1][0].scale(&(minus * a)).add(&t[0][0].scale(&b));
        [v0.mul(&inv_det), v1.mul(&inv_det)]
    }

    /// Largest coefficient of `|lambda> - Theta^{-1}|initial>`.
    pub fn mismatch(&self) -> f64 {
        let other = self.theta_inverse_initial();
        self.lambda
            .iter()
            .zip(&other)
            .flat_map(|(x, y)| x.sub(y).coeffs().to_vec())
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Largest coefficient of `det Theta - 1`.
    pub fn det_deviation(&self) -> f64 {
        self.det()
            .sub(&constant(C::new(1.0, 0.0), self.order))
            .coeffs()
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

/// Advances both formulations by one step driven by `dw`, using `f` at the
/// start of the step. `f` must share the truncation order.
pub fn internal_process_step(
    state: &mut InternalState,
    f: &SleSeriesState,
    tau: f64,
    dt: f64,
    dw: [f64; 3],
    scheme: InternalScheme,
) -> Result<()> {
    if f.f.order() != state.order {
        return Err(Error::InvalidParameter(format!(
            "series order mismatch: process {} vs Loewner {}",
            state.order,
            f.f.order()
        )));
    }
    let lowest = -(state.order as i32);
    let g = f.f.reciprocal().map(|x| C::new(*x, 0.0)).truncate(lowest);
    let g2 = g.mul(&g).truncate(lowest);
    let n = noise_matrix(dw);
    let a = n.map(|r| r.map(|x| x * tau.sqrt()));
    let minus_a = a.map(|r| r.map(|x| -x));
    let id = [[C::new(1.0, 0.0), C::new(0.0, 0.0)], [C::new(0.0, 0.0), C::new(1.0, 0.0)]];
    let second = match scheme {
        InternalScheme::Milstein => cmul(&a, &a).map(|r| r.map(|x| x * 0.5)),
        InternalScheme::EulerMaruyama => id.map(|r| r.map(|x| x * (0.5 * tau * FUNDAMENTAL_CASIMIR * dt))),
    };

    let th = &state.theta;
    let d1 = times_scalar_matrix(th, &a, &g, lowest);
    let d2 = times_scalar_matrix(th, &second, &g2, lowest);
    let theta: SeriesMatrix =
        std::array::from_fn(|i| std::array::from_fn(|j| th[i][j].add(&d1[i][j]).add(&d2[i][j])));

    let l = &state.lambda;
    let e1 = scalar_matrix_times(&minus_a, &g, l, lowest);
    let e2 = scalar_matrix_times(&second, &g2, l, lowest);
    let lambda: SeriesVector = std::array::from_fn(|i| l[i].add(&e1[i]).add(&e2[i]));

    if theta.iter().flatten().chain(&lambda).any(|s| s.coeffs().iter().any(|c| !c.is_finite())) {
        return Err(Error::NonFinite(format!("internal process at t = {}", f.t)));
    }
    state.theta = theta;
    state.lambda = lambda;
    Ok(())
}

/// Mismatch between the two formulations at several step sizes sharing
/// each Brownian path.
#[derive(Clone, Debug, Serialize)]
pub struct InternalConsistency {
    pub kappa: f64,
    pub tau: f64,
    pub t_end: f64,
    pub order: usize,
    pub paths: usize,
    pub scheme: InternalScheme,
    pub dts: Vec<f64>,
    /// Path-averaged final mismatch per step size.
    pub errors: Vec<f64>,
    /// `errors[i] / errors[i+1]`.
    pub ratios: Vec<f64>,
    /// Largest `|det Theta_t - 1|` over all paths and times at the finest step.
    pub max_det_deviation: f64,
    pub status: Status,
}

/// Runs `paths` paths on the finest grid in `dts` (each a multiple of the
/// finest) and compares the formulations at time `t_end`.
#[allow(clippy::too_many_arguments)]
pub fn internal_consistency(
    kappa: f64,
    tau: f64,
    t_end: f64,
    dts: &[f64],
    order: usize,
    paths: usize,
    seed: u64,
    scheme: InternalScheme,
) -> Result<InternalConsistency> {
    let fine = dts
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if dts.is_empty() || !(fine.is_finite() && fine > 0.0) || paths == 0 {
        return Err(Error::InvalidParameter("need positive step sizes and at least one path".into()));
    }
    let fine_steps = step_count(fine, t_end)?;
    let factors: Vec<usize> = dts.iter().map(|dt| (dt / fine).round() as usize).collect();
    if factors.iter().zip(dts).any(|(&m, dt)| m == 0 || ((m as f64) * fine - dt).abs() > 1e-9 * dt || fine_steps % m != 0) {
        return Err(Error::InvalidParameter("step sizes must be multiples of the finest one dividing T".into()));
    }
    let start = [C::new(1.0, 0.0), C::new(0.0, 0.0)];

    let per_path: Vec<Result<(Vec<f64>, f64)>> = with_pool(|| {
        (0..paths)
            .into_par_iter()
            .map(|p| {
                let mut rng = sample_rng(seed, p as u64);
                let incs: Vec<[f64; 4]> = (0..fine_steps)
                    .map(|_| std::array::from_fn(|_| fine.sqrt() * rng.sample::<f64, _>(StandardNormal)))
                    .collect();
                let mut errs = Vec::with_capacity(dts.len());
                let mut det_dev = 0.0f64;
                for (&m, &dt) in factors.iter().zip(dts) {
                    let mut f = SleSeriesState::new(kappa, order)?;
                    let mut s = InternalState::new(order, start);
                    for (n, chunk) in incs.chunks(m).enumerate() {
                        let mut w = [0.0; 4];
                        for inc in chunk {
                            for (a, b) in w.iter_mut().zip(inc) {
                                *a += b;
                            }
                        }
                        internal_process_step(&mut s, &f, tau, dt, [w[1], w[2], w[3]], scheme)?;
                        f.step(dt, w[0])?;
                        if m == 1 && (n + 1) % 20 == 0 {
                            det_dev = det_dev.max(s.det_deviation());
                        }
                    }
                    if m == 1 {
                        det_dev = det_dev.max(s.det_deviation());
                    }
                    errs.push(s.mismatch());
                }
                Ok((errs, det_dev))
            })
            .collect()
    });
    let mut errors = vec![0.0; dts.len()];
    let mut max_det = 0.0f64;
    for r in per_path {
        let (e, d) = r?;
        for (x, y) in errors.iter_mut().zip(e) {
            *x += y / paths as f64;
        }
        max_det = max_det.max(d);
    }
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
    let halving = dts.windows(2).all(|w| ((w[0] / w[1]) - 2.0).abs() < 1e-9);
    let ok = halving && ratios.iter().all(|r| (1.6..=2.4).contains(r)) && max_det <= 1e-3;
    Ok(InternalConsistency {
        kappa,
        tau,
        t_end,
        order,
        paths,
        scheme,
        dts: dts.to_vec(),
        errors,
        ratios,
        max_det_deviation: max_det,
        status: Status::from_bool(ok),
    })
}
