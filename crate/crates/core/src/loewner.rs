//! The group of normalized series `z + a0 + a_{-1} z^-1 + ...`, its
//! derivation coordinates `v_j`, the operators `Q(rho)` on Verma modules,
//! and the series form of chordal SLE.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::scalar::Rational;
use crate::series::{Coefficient, Laurent};
use crate::stats::{sample_rng, with_pool, Estimate, Moments};
use crate::virasoro::VermaModule;

/// Default number of stored coefficients below `z`.
pub const DEFAULT_ORDER: usize = 8;

/// `z + a0 + a_{-1} z^-1 + ... + a_{-N} z^-N + O(z^{-N-1})`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AutSeries<T> {
    /// `[a0, a_{-1}, ..., a_{-N}]`.
    coeffs: Vec<T>,
}

impl<T: Coefficient> AutSeries<T> {
    pub fn identity(order: usize) -> Self {
        Self {
            coeffs: vec![T::zero(); order + 1],
        }
    }

    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "need at least a0");
        Self { coeffs }
    }

    /// `z + a`.
    pub fn translation(a: T, order: usize) -> Self {
        let mut s = Self::identity(order);
        s.coeffs[0] = a;
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `z^{-i}`, `i >= 0`.
    pub fn a(&self, i: usize) -> &T {
        &self.coeffs[i]
    }

    pub fn a_mut(&mut self, i: usize) -> &mut T {
        &mut self.coeffs[i]
    }

    pub fn to_laurent(&self) -> Laurent<T> {
        let mut c = Vec::with_capacity(self.coeffs.len() + 1);
        c.push(T::one());
        c.extend(self.coeffs.iter().cloned());
        Laurent::new(1, c)
    }

    fn from_laurent(l: &Laurent<T>, order: usize) -> Self {
        Self {
            coeffs: (0..=order as i32).map(|i| l.coeff(-i)).collect(),
        }
    }

    /// `1/f = z^-1 + ...`, known through `z^{-N-2}`.
    pub fn reciprocal(&self) -> Laurent<T> {
        self.to_laurent().recip()
    }

    /// Powers `f^{-i}` for `i = 0..=order`, each known through `z^{-N-2}`.
    fn inverse_powers(&self) -> Vec<Laurent<T>> {
        let n = self.order();
        let r = self.reciprocal();
        let mut out = vec![Laurent::constant(T::one(), -(n as i32) - 2)];
        for i in 1..=n {
            let next = out[i - 1].mul(&r);
            out.push(next);
        }
        out
    }
}

/// `(mu * rho)(z) = rho(mu(z))`.
pub fn compose<T: Coefficient>(mu: &AutSeries<T>, rho: &AutSeries<T>) -> Result<AutSeries<T>> {
    let n = mu.order();
    if rho.order() != n {
        return Err(Error::InvalidParameter(format!(
            "truncation orders differ: {} vs {}",
            n,
            rho.order()
        )));
    }
    let powers = mu.inverse_powers();
    let mut out = mu.clone();
    for (i, p) in powers.iter().enumerate() {
        let a = rho.a(i);
        for e in 0..=n {
            let c = p.coeff(-(e as i32));
            *out.a_mut(e) = out.a(e).clone() + a.clone() * c;
        }
    }
    Ok(out)
}

/// The group inverse: `compose(rho, invert(rho))` is `z`.
pub fn invert<T: Coefficient>(rho: &AutSeries<T>) -> AutSeries<T> {
    let n = rho.order();
    let powers = rho.inverse_powers();
    let mut b = vec![T::zero(); n + 1];
    // sigma(rho(z)) = rho(z) + sum_i b_i rho(z)^{-i}; solve z^{-e} coefficients in order.
    for e in 0..=n {
        let mut acc = rho.a(e).clone();
        for (i, bi) in b.iter().enumerate().take(e) {
            acc = acc + bi.clone() * powers[i].coeff(-(e as i32));
        }
        b[e] = T::zero() - acc;
    }
    AutSeries { coeffs: b }
}

/// `D f` for `D = sum_{j=1}^{M} v_{-j} z^{1-j} d/dz`, keeping exponents `>= lowest`.
fn apply_derivation<T: Coefficient>(v: &[T], f: &Laurent<T>, lowest: i32) -> Laurent<T> {
    let lead = f.lead() - 1;
    let len = (lead - lowest + 1).max(0) as usize;
    let mut out = vec![T::zero(); len];
    for m in f.lowest()..=f.lead() {
        let c = f.coeff(m);
        if c.is_zero() || m == 0 {
            continue;
        }
        let cm = c * T::from_i32(m).expect("small integer");
        for (j1, vj) in v.iter().enumerate() {
            let e = m - 1 - j1 as i32;
            if e < lowest {
                break;
            }
            let idx = (lead - e) as usize;
            out[idx] = out[idx].clone() + cm.clone() * vj.clone();
        }
    }
    Laurent::new(lead, out)
}

/// `exp(D) z` for `D = sum_j v_{-j} z^{1-j} d/dz` with `v = [v_{-1}, v_{-2}, ...]`,
/// truncated to an element of order `order`.
pub fn exp_derivation<T: Coefficient>(v: &[T], order: usize) -> AutSeries<T> {
    let lowest = -(order as i32);
    let mut term = Laurent::new(1, {
        let mut c = vec![T::zero(); order + 2];
        c[0] = T::one();
        c
    });
    let mut total = term.clone();
    // D lowers the z-degree by at least one, so order + 2 steps exhaust it.
    for n in 1..=order + 2 {
        term = apply_derivation(v, &term, lowest);
        if term.is_empty() {
            break;
        }
        term = term.scale(&(T::one() / T::from_usize(n).expect("small integer")));
        total = total.add(&term);
    }
    AutSeries::from_laurent(&total, order)
}

/// The numbers `v_{-1}, ..., v_{-N-1}` with `exp(sum v_j z^{j+1} d/dz) z = rho(z)`.
pub fn der_coefficients<T: Coefficient>(rho: &AutSeries<T>) -> Vec<T> {
    let n = rho.order();
    let mut v = vec![T::zero(); n + 1];
    for j in 0..=n {
        let current = exp_derivation(&v, n);
        v[j] = rho.a(j).clone() - current.a(j).clone();
    }
    v
}

/// `Q(rho) = exp(-sum_{j<=-1} v_j L_j)` on `M(c,h)` modulo grades above the cutoff.
pub fn q_operator(rho: &AutSeries<Rational>, module: &VermaModule) -> Result<QMatrix> {
    let cutoff = module.cutoff();
    if cutoff > rho.order() + 1 {
        return Err(Error::TruncationOverflow(format!(
            "series of order {} determines v_j only for j >= {}, module cutoff is {cutoff}",
            rho.order(),
            -(rho.order() as i64) - 1
        )));
    }
    let v = der_coefficients(rho);
    let dim = module.dim_up_to_cutoff();
    let mut x = QMatrix::zeros(dim, dim);
    for (j1, vj) in v.iter().enumerate().take(cutoff) {
        if num_traits::Zero::is_zero(vj) {
            continue;
        }
        let l = module.truncated_matrix(-(j1 as i64) - 1);
        x = x.add(&l.scaled(vj));
    }
    x.scaled(&num_traits::FromPrimitive::from_i64(-1).unwrap())
        .exp_nilpotent()
        .ok_or_else(|| Error::NonFinite("sum of lowering-grade operators was not nilpotent".into()))
}

/// State of the shifted series SLE `f_t(z) = z + a0 + a_{-1} z^-1 + ...`.
#[derive(Clone, Debug, Serialize)]
pub struct SleSeriesState {
    pub t: f64,
    pub b: f64,
    pub kappa: f64,
    pub f: AutSeries<f64>,
}

impl SleSeriesState {
    pub fn new(kappa: f64, order: usize) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::InvalidParameter(format!("kappa = {kappa} must be positive")));
        }
        Ok(Self {
            t: 0.0,
            b: 0.0,
            kappa,
            f: AutSeries::identity(order),
        })
    }

    /// One Euler-Maruyama step of `df = 2/f dt + sqrt(kappa) dB`.
    pub fn step(&mut self, dt: f64, db: f64) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt = {dt} must be positive")));
        }
        let r = self.f.reciprocal();
        for i in 1..=self.f.order() {
            let drift = 2.0 * r.coeff(-(i as i32)) * dt;
            *self.f.a_mut(i) += drift;
        }
        *self.f.a_mut(0) += self.kappa.sqrt() * db;
        self.t += dt;
        self.b += db;
        if self.f.coeffs().iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("series coefficient at t = {}", self.t)));
        }
        Ok(())
    }
}

/// Functional form of [`SleSeriesState::step`].
pub fn sle_step(state: &SleSeriesState, dt: f64, db: f64) -> Result<SleSeriesState> {
    let mut s = state.clone();
    s.step(dt, db)?;
    Ok(s)
}

/// Number of whole steps of size `dt` in `[0, t_end]`.
pub fn step_count(dt: f64, t_end: f64) -> Result<usize> {
    if !(dt > 0.0 && t_end >= 0.0 && dt.is_finite() && t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!("need dt > 0 and T >= 0 (dt = {dt}, T = {t_end})")));
    }
    Ok((t_end / dt).round() as usize)
}

/// One sampled path, recorded every `every` steps: `(t, B_t, a0, a_{-1}, ...)`.
pub fn sle_trajectory(kappa: f64, dt: f64, t_end: f64, order: usize, seed: u64, every: usize) -> Result<Vec<Vec<f64>>> {
    let steps = step_count(dt, t_end)?;
    let mut rng = sample_rng(seed, 0);
    let mut s = SleSeriesState::new(kappa, order)?;
    let row = |s: &SleSeriesState| {
        let mut r = vec![s.t, s.b];
        r.extend_from_slice(s.f.coeffs());
        r
    };
    let mut out = vec![row(&s)];
    let every = every.max(1);
    for n in 1..=steps {
        let z: f64 = rng.sample(StandardNormal);
        s.step(dt, z * dt.sqrt())?;
        if n % every == 0 || n == steps {
            out.push(row(&s));
        }
    }
    Ok(out)
}

/// Ensemble statistics of the coefficients at the final time.
#[derive(Clone, Debug, Serialize)]
pub struct SleEnsemble {
    pub samples: usize,
    pub t_end: f64,
    /// `coefficients[i]` estimates `a_{-i}(T)`.
    pub coefficients: Vec<Estimate>,
    /// Largest `|a_{-1}(t) - 2t|` seen over all steps of all paths.
    pub max_hydrodynamic_error: f64,
}

const CHUNK: usize = 256;

/// Runs `samples` independent paths; sample `i` uses stream `i` of `seed`.
pub fn sle_ensemble(kappa: f64, dt: f64, t_end: f64, order: usize, samples: usize, seed: u64) -> Result<SleEnsemble> {
    let steps = step_count(dt, t_end)?;
    SleSeriesState::new(kappa, order)?;
    let chunks: Vec<Result<(Vec<Moments>, f64)>> = with_pool(|| {
        (0..samples.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut moments = vec![Moments::default(); order + 1];
                let mut worst = 0.0f64;
                for i in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                    let mut rng = sample_rng(seed, i as u64);
                    let mut s = SleSeriesState::new(kappa, order)?;
                    for _ in 0..steps {
                        let z: f64 = rng.sample(StandardNormal);
                        s.step(dt, z * dt.sqrt())?;
                        if order >= 1 {
                            worst = worst.max((s.f.a(1) - 2.0 * s.t).abs());
                        }
                    }
                    for (m, x) in moments.iter_mut().zip(s.f.coeffs()) {
                        m.push(*x);
                    }
                }
                Ok((moments, worst))
            })
            .collect()
    });
    let mut total = vec![Moments::default(); order + 1];
    let mut worst = 0.0f64;
    for chunk in chunks {
        let (m, w) = chunk?;
        for (t, x) in total.iter_mut().zip(&m) {
            t.merge(x);
        }
        worst = worst.max(w);
    }
    Ok(SleEnsemble {
        samples,
        t_end: steps as f64 * dt,
        coefficients: total.iter().map(Estimate::from).collect(),
        max_hydrodynamic_error: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn ser(c: Vec<Rational>) -> AutSeries<Rational> {
        AutSeries::from_coeffs(c)
    }

    #[test]
    fn translations_compose_additively() {
        let mu = AutSeries::translation(rat(1, 3), 3);
        let rho = AutSeries::translation(rat(2, 5), 3);
        assert_eq!(compose(&mu, &rho).unwrap(), AutSeries::translation(rat(11, 15), 3));
        assert_eq!(compose(&AutSeries::identity(3), &rho).unwrap(), rho);
    }

    #[test]
    fn substitution_truncates() {
        let (a, c) = (rat(2, 1), rat(3, 1));
        let mu = ser(vec![a.clone(), int(0)]);
        let rho = ser(vec![int(0), c.clone()]);
        assert_eq!(compose(&mu, &rho).unwrap(), ser(vec![a.clone(), c.clone()]));
        // At order 2 the z^-2 term -ac appears.
        let mu = ser(vec![a.clone(), int(0), int(0)]);
        let rho = ser(vec![int(0), c.clone(), int(0)]);
        assert_eq!(compose(&mu, &rho).unwrap(), ser(vec![a.clone(), c.clone(), -(&a * &c)]));
    }

    #[test]
    fn inverse_examples() {
        let t = AutSeries::translation(rat(4, 7), 4);
        assert_eq!(invert(&t), AutSeries::translation(rat(-4, 7), 4));
        let id = AutSeries::<Rational>::identity(4);
        assert_eq!(invert(&id), id);
        let rho = ser(vec![int(0), rat(5, 2), int(0), int(0)]);
        assert_eq!(compose(&rho, &invert(&rho)).unwrap(), AutSeries::identity(3));
        assert_eq!(compose(&invert(&rho), &rho).unwrap(), AutSeries::identity(3));
    }

    #[test]
    fn derivation_coordinates() {
        let a = rat(3, 4);
        let v = der_coefficients(&AutSeries::translation(a.clone(), 3));
        assert_eq!(v, vec![a, int(0), int(0), int(0)]);
        let c = rat(2, 3);
        let v = der_coefficients(&ser(vec![int(0), c.clone(), int(0), int(0)]));
        assert_eq!(v, vec![int(0), c.clone(), int(0), &c * &c / int(2)]);
        assert!(der_coefficients(&AutSeries::<Rational>::identity(5)).iter().all(|x| *x == int(0)));
    }

    #[test]
    fn reciprocal_examples() {
        let r = AutSeries::<Rational>::identity(3).reciprocal();
        assert_eq!(r.lead(), -1);
        assert_eq!(r.coeffs(), &[int(1), int(0), int(0), int(0), int(0)]);
        let c = rat(1, 2);
        let r = ser(vec![int(0), c.clone(), int(0), int(0)]).reciprocal();
        assert_eq!(r.coeff(-1), int(1));
        assert_eq!(r.coeff(-2), int(0));
        assert_eq!(r.coeff(-3), -c);
    }

    #[test]
    fn q_of_translation() {
        let m = VermaModule::new(rat(1, 2), rat(1, 16), 3);
        let a = rat(1, 3);
        let q = q_operator(&AutSeries::translation(a.clone(), 3), &m).unwrap();
        let expected = m.truncated_matrix(-1).scaled(&-a).exp_nilpotent().unwrap();
        assert_eq!(q, expected);
        let id = q_operator(&AutSeries::identity(3), &m).unwrap();
        assert_eq!(id, QMatrix::identity(m.dim_up_to_cutoff()));
        assert!(q_operator(&AutSeries::identity(1), &m).is_err());
    }

    #[test]
    fn q_is_multiplicative() {
        let m = VermaModule::new(rat(-2, 5), rat(3, 7), 4);
        let rho = ser(vec![rat(1, 2), rat(-1, 3), int(2), rat(1, 5), int(0)]);
        let mu = ser(vec![rat(-3, 2), int(1), rat(1, 7), int(0), rat(2, 3)]);
        let lhs = q_operator(&compose(&rho, &mu).unwrap(), &m).unwrap();
        let rhs = q_operator(&rho, &m).unwrap().mul(&q_operator(&mu, &m).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn one_sle_step() {
        let mut s = SleSeriesState::new(3.0, 4).unwrap();
        s.step(0.01, 0.2).unwrap();
        assert_eq!(*s.f.a(0), 3f64.sqrt() * 0.2);
        assert_eq!(*s.f.a(1), 0.02);
        assert!(s.step(0.0, 0.1).is_err());
    }

    #[test]
    fn hydrodynamic_coefficient_is_exact() {
        let path = sle_trajectory(2.5, 1e-3, 0.3, 5, 11, 1).unwrap();
        for row in path {
            assert_eq!(row[3], 2.0 * row[0]);
        }
    }
}
