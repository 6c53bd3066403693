//! The Ito generator `-2L_{-2} + (kappa/2)L_{-1}^2 + (tau/2) sum_a X_a(-1)^2`
//! on truncated targets and the exact drift checks built from it.

use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use crate::affine::{admissible_pq, casimir_minus_one, AffineModule, AffineMonomial};
use crate::coset::{coset_central_charge, TensorKey, TensorModule, TensorVector};
use crate::error::{Error, Result};
use crate::linalg::LinComb;
use crate::report::{Status, SubCheck, Witness};
use crate::scalar::{format_rational, int, rat, Rational};
use crate::sl2::{casimir_tensor, Generator, Spin};
use crate::virasoro::{sle_constants, Partition, VermaModule};

/// Grade-raising operators appearing in the generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Letter {
    LMinus1,
    LMinus2,
    Current(Generator),
}

impl Letter {
    pub fn degree(self) -> usize {
        match self {
            Letter::LMinus2 => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::LMinus1 => f.write_str("L_{-1}"),
            Letter::LMinus2 => f.write_str("L_{-2}"),
            Letter::Current(g) => write!(f, "{g}(-1)"),
        }
    }
}

/// A module on which the generator acts, together with its initial vector.
pub trait Target: Sync {
    type Key: Ord + Clone + Send + Sync;

    fn cutoff(&self) -> usize;
    fn has_currents(&self) -> bool;
    fn initial(&self) -> Result<LinComb<Self::Key>>;
    /// Exact action of one letter.
    fn apply_letter(&self, letter: Letter, v: &LinComb<Self::Key>) -> Result<LinComb<Self::Key>>;
    /// Coordinates on the irreducible quotient; all zero iff `v` vanishes there.
    fn components(&self, v: &LinComb<Self::Key>) -> Result<Vec<(String, Rational)>>;
    fn describe(&self) -> String;

    fn letters(&self) -> Vec<Letter> {
        let mut out = vec![Letter::LMinus1, Letter::LMinus2];
        if self.has_currents() {
            out.extend(Generator::ALL.map(Letter::Current));
        }
        out
    }

    /// Applies `l_1 l_2 ... l_r` with `l_r` acting first.
    fn apply_word(&self, word: &[Letter], v: &LinComb<Self::Key>) -> Result<LinComb<Self::Key>> {
        let mut w = v.clone();
        for &l in word.iter().rev() {
            w = self.apply_letter(l, &w)?;
        }
        Ok(w)
    }

    fn null_witness(&self, v: &LinComb<Self::Key>) -> Result<Option<Witness>> {
        Ok(self
            .components(v)?
            .into_iter()
            .find(|(_, x)| !x.is_zero())
            .map(|(l, x)| Witness::new(l, &x)))
    }
}

/// `L(c,h)` with `|c,h>`.
pub struct VirasoroTarget {
    pub module: VermaModule,
}

impl VirasoroTarget {
    pub fn new(c: Rational, h: Rational, cutoff: usize) -> Self {
        Self {
            module: VermaModule::new(c, h, cutoff),
        }
    }

    /// `(c_kappa, h_kappa)`.
    pub fn for_kappa(kappa: &Rational, cutoff: usize) -> Result<Self> {
        let (c, h) = sle_constants(kappa)?;
        Ok(Self::new(c, h, cutoff))
    }
}

impl Target for VirasoroTarget {
    type Key = Partition;

    fn cutoff(&self) -> usize {
        self.module.cutoff()
    }

    fn has_currents(&self) -> bool {
        false
    }

    fn initial(&self) -> Result<LinComb<Partition>> {
        Ok(self.module.highest_weight())
    }

    fn apply_letter(&self, letter: Letter, v: &LinComb<Partition>) -> Result<LinComb<Partition>> {
        match letter {
            Letter::LMinus1 => Ok(self.module.apply_raw(-1, v)),
            Letter::LMinus2 => Ok(self.module.apply_raw(-2, v)),
            Letter::Current(_) => Err(Error::InvalidParameter("no currents on a Virasoro target".into())),
        }
    }

    fn components(&self, v: &LinComb<Partition>) -> Result<Vec<(String, Rational)>> {
        if let Some((p, _)) = v.iter().find(|(p, _)| p.grade() > self.module.cutoff()) {
            return Err(Error::TruncationOverflow(format!("{p} lies above cutoff {}", self.module.cutoff())));
        }
        Ok(self.module.quotient_components(v))
    }

    fn describe(&self) -> String {
        format!(
            "L(c={}, h={})",
            format_rational(self.module.central_charge()),
            format_rational(self.module.weight())
        )
    }
}

/// `L_k(j)` with `|j>`, Virasoro action by Sugawara.
pub struct AffineTarget {
    pub module: AffineModule,
}

impl AffineTarget {
    pub fn new(k: &Rational, j: Spin, cutoff: usize) -> Self {
        Self {
            module: AffineModule::irreducible(k.clone(), j, cutoff),
        }
    }
}

impl Target for AffineTarget {
    type Key = AffineMonomial;

    fn cutoff(&self) -> usize {
        self.module.cutoff()
    }

    fn has_currents(&self) -> bool {
        true
    }

    fn initial(&self) -> Result<LinComb<AffineMonomial>> {
        Ok(self.module.highest_weight())
    }

    fn apply_letter(&self, letter: Letter, v: &LinComb<AffineMonomial>) -> Result<LinComb<AffineMonomial>> {
        match letter {
            Letter::LMinus1 => self.module.sugawara_raw(-1, v),
            Letter::LMinus2 => self.module.sugawara_raw(-2, v),
            Letter::Current(g) => Ok(self.module.apply_raw(g, -1, v)),
        }
    }

    fn components(&self, v: &LinComb<AffineMonomial>) -> Result<Vec<(String, Rational)>> {
        self.module.components(v)
    }

    fn describe(&self) -> String {
        format!(
            "L_k(j) with k={}, j={}",
            format_rational(self.module.level()),
            self.module.spin()
        )
    }
}

/// `L_k(1/2) (x) L_1(1/2)` with `|s>`; Virasoro action by the total
/// Sugawara operators, currents diagonal.
pub struct TensorTarget {
    pub module: TensorModule,
}

impl TensorTarget {
    pub fn new(k: &Rational, cutoff: usize) -> Self {
        Self {
            module: TensorModule::irreducible(k, Spin::HALF, Spin::HALF, cutoff),
        }
    }
}

impl Target for TensorTarget {
    type Key = TensorKey;

    fn cutoff(&self) -> usize {
        self.module.cutoff()
    }

    fn has_currents(&self) -> bool {
        true
    }

    fn initial(&self) -> Result<TensorVector> {
        self.module.s_vector()
    }

    fn apply_letter(&self, letter: Letter, v: &TensorVector) -> Result<TensorVector> {
        match letter {
            Letter::LMinus1 => self.module.total_sugawara(-1, v),
            Letter::LMinus2 => self.module.total_sugawara(-2, v),
            Letter::Current(g) => Ok(self.module.diag_apply(g, -1, v)),
        }
    }

    fn components(&self, v: &TensorVector) -> Result<Vec<(String, Rational)>> {
        self.module.components(v)
    }

    fn describe(&self) -> String {
        format!(
            "L_k(1/2) (x) L_1(1/2) with k={}",
            format_rational(self.module.first().level())
        )
    }
}

/// The generator as weighted words. `drift` already contains the Ito
/// correction; `noise` lists each driver's letters.
#[derive(Clone, Debug, Serialize)]
pub struct GeneratorSpec {
    pub kappa: String,
    pub tau: Option<String>,
    /// `(coefficient, word)` with the last letter acting first.
    pub drift: Vec<(String, Vec<Letter>)>,
    /// Noise letters; `L_{-1}` is driven by `sqrt(kappa) dB`, the currents by
    /// `sqrt(tau) sum_a X_a(-1) dW^a`.
    pub noise: Vec<Letter>,
    /// `C[a][b]` with `sum_a X_a (x) X_a = sum C[a][b] g_a (x) g_b` (E, H, F order).
    pub noise_covariance: Option<[[String; 3]; 3]>,
    #[serde(skip)]
    drift_exact: Vec<(Rational, Vec<Letter>)>,
}

impl GeneratorSpec {
    pub fn drift_terms(&self) -> &[(Rational, Vec<Letter>)] {
        &self.drift_exact
    }

    /// `A_drift v`.
    pub fn apply_drift<T: Target>(&self, target: &T, v: &LinComb<T::Key>) -> Result<LinComb<T::Key>> {
        let mut out = LinComb::zero();
        for (c, word) in &self.drift_exact {
            out.add_scaled(&target.apply_word(word, v)?, c);
        }
        Ok(out)
    }
}

/// Builds the generator on `target`. `tau` is ignored (and may be `None`)
/// on targets without currents.
pub fn assemble_generator<T: Target>(target: &T, kappa: &Rational, tau: Option<&Rational>) -> Result<GeneratorSpec> {
    if target.cutoff() < 2 {
        return Err(Error::InvalidParameter(format!(
            "generator needs module cutoff >= 2 (got {})",
            target.cutoff()
        )));
    }
    let mut drift = vec![
        (int(-2), vec![Letter::LMinus2]),
        (kappa / int(2), vec![Letter::LMinus1, Letter::LMinus1]),
    ];
    let mut noise = vec![Letter::LMinus1];
    let mut cov = None;
    let tau = if target.has_currents() {
        let tau = tau.ok_or_else(|| Error::InvalidParameter("tau is required for affine targets".into()))?;
        for (c, x, y) in crate::sl2::casimir_terms() {
            drift.push((tau / int(2) * c, vec![Letter::Current(x), Letter::Current(y)]));
        }
        noise.extend(Generator::ALL.map(Letter::Current));
        cov = Some(casimir_tensor().map(|row| row.map(|x| format_rational(&x))));
        Some(format_rational(tau))
    } else {
        None
    };
    Ok(GeneratorSpec {
        kappa: format_rational(kappa),
        tau,
        drift: drift.iter().map(|(c, w)| (format_rational(c), w.clone())).collect(),
        noise,
        noise_covariance: cov,
        drift_exact: drift,
    })
}

/// Result of an exact drift computation.
#[derive(Clone, Debug, Serialize)]
pub struct DriftReport {
    pub theorem: String,
    pub k: String,
    pub kappa: String,
    pub tau: String,
    pub grade: usize,
    pub status: Status,
    pub witness: Option<Witness>,
    /// `"none"`, `"coset_virasoro"`, `"casimir"` or `"mixed"` when relevant.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<String>,
    pub checks: Vec<SubCheck>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// `kappa = 4(k+2)/(k+3)`, `tau = 2/(k+3)`.
pub fn critical_parameters(k: &Rational) -> Result<(Rational, Rational)> {
    coset_central_charge(k)?;
    let k3 = k + int(3);
    Ok((int(4) * (k + int(2)) / &k3, int(2) / k3))
}

fn first_nonzero(components: &[(String, Rational)]) -> Option<Witness> {
    components
        .iter()
        .find(|(_, x)| !x.is_zero())
        .map(|(l, x)| Witness::new(l.clone(), x))
}

/// Drift of the generator on the vacuum of `L_{k+1}(0)`; vanishes iff
/// `tau = 2/(k+3)`, for any `kappa`.
pub fn vacuum_drift_check(k: &Rational, kappa: &Rational, tau: &Rational) -> Result<DriftReport> {
    let k1 = k + int(1);
    if (&k1 + int(2)).is_zero() {
        return Err(Error::CriticalLevel("level k+1 = -2".into()));
    }
    let target = AffineTarget::new(&k1, Spin::ZERO, 2);
    let vac = target.initial()?;
    let gen = assemble_generator(&target, kappa, Some(tau))?;
    let drift = gen.apply_drift(&target, &vac)?;
    let comps = target.components(&drift)?;
    let witness = first_nonzero(&comps);

    let l1 = target.apply_letter(Letter::LMinus1, &vac)?;
    let cas = casimir_minus_one(&vac, |g, m, w| target.module.apply_raw(g, m, w));
    let tau0 = int(2) / (k + int(3));
    let predicted = cas.scaled(&((tau - &tau0) / int(2)));
    let other_kappa = assemble_generator(&target, &(kappa + int(1)), Some(tau))?.apply_drift(&target, &vac)?;
    let checks = vec![
        SubCheck::vanishing("L_{-1}|0> = 0", target.null_witness(&l1)?),
        SubCheck::vanishing(
            "drift = (tau/2 - 1/(k+3)) Cas|0>",
            first_nonzero(&target.components(&drift.sub(&predicted))?),
        ),
        SubCheck::nonvanishing("Cas|0> != 0", target.null_witness(&cas)?),
        SubCheck::vanishing(
            "drift independent of kappa",
            first_nonzero(&target.components(&drift.sub(&other_kappa))?),
        ),
    ];
    let consistent = checks.iter().all(|c| c.status.is_verified());
    let status = Status::from_bool(consistent && witness.is_none());
    Ok(DriftReport {
        theorem: "vacuum".into(),
        k: format_rational(k),
        kappa: format_rational(kappa),
        tau: format_rational(tau),
        grade: 2,
        status,
        witness: witness.or_else(|| {
            checks
                .iter()
                .find(|c| !c.status.is_verified())
                .map(|c| Witness {
                    component: c.name.clone(),
                    value: "failed".into(),
                })
        }),
        direction: None,
        checks,
        notes: vec![format!("drift vanishes iff tau = {}", format_rational(&tau0))],
    })
}

/// `A_drift |s>` in `L_k(1/2) (x) L_1(1/2)` truncated at `grade`.
pub fn theorem2_drift_check(k: &Rational, kappa: &Rational, tau: &Rational, grade: usize) -> Result<DriftReport> {
    admissible_pq(k)?;
    let (kappa0, tau0) = critical_parameters(k)?;
    if grade < 2 {
        return Err(Error::InvalidParameter(format!("grade must be >= 2 (got {grade})")));
    }
    let target = TensorTarget::new(k, grade);
    let s = target.initial()?;
    let gen = assemble_generator(&target, kappa, Some(tau))?;
    let drift = gen.apply_drift(&target, &s)?;
    let comps = target.components(&drift)?;
    let witness = first_nonzero(&comps);

    let t = &target.module;
    let l1 = t.coset_apply(-1, &s)?;
    let vir_part = t
        .coset_apply(-2, &s)?
        .scaled(&int(-2))
        .sub(&t.coset_apply(-1, &l1)?.scaled(&(kappa / int(-2))));
    let cas_part = t.diag_casimir(&s).scaled(&((tau - &tau0) / int(2)));
    let mut rest = drift.sub(&vir_part);
    rest = rest.sub(&cas_part);
    let vir_zero = t.null_witness(&vir_part)?.is_none();
    let cas_zero = t.null_witness(&cas_part)?.is_none();
    let direction = match (vir_zero, cas_zero) {
        (true, true) => "none",
        (false, true) => "coset_virasoro",
        (true, false) => "casimir",
        (false, false) => "mixed",
    };
    let checks = vec![SubCheck::vanishing(
        "drift = chi^Com(kappa)|s> + (tau/2 - 1/(k+3)) Cas^diag|s>",
        rest.iter()
            .next()
            .map(|((a, b), c)| Witness::new(format!("{a} (x) {b}"), c)),
    )];
    let consistent = checks[0].status.is_verified();
    Ok(DriftReport {
        theorem: "thm2".into(),
        k: format_rational(k),
        kappa: format_rational(kappa),
        tau: format_rational(tau),
        grade,
        status: Status::from_bool(consistent && witness.is_none()),
        witness,
        direction: Some(direction.into()),
        checks,
        notes: vec![format!(
            "critical point kappa = {}, tau = {}",
            format_rational(&kappa0),
            format_rational(&tau0)
        )],
    })
}

/// `(1 (x) <1/2|) v` and `(1 (x) <1/2|E) v`.
pub fn corollary_projections(t: &TensorModule, v: &TensorVector) -> (LinComb<AffineMonomial>, LinComb<AffineMonomial>) {
    let second = t.second();
    let hw = second.highest_weight();
    let mut p1 = LinComb::zero();
    let mut p2 = LinComb::zero();
    for ((a, b), c) in v.iter() {
        let bv = LinComb::basis(b.clone());
        let x = second.pair(&hw, &bv);
        if !x.is_zero() {
            p1.add_term(a.clone(), c * x);
        }
        let y = second.pair(&hw, &second.apply_raw(Generator::E, 0, &bv));
        if !y.is_zero() {
            p2.add_term(a.clone(), c * y);
        }
    }
    (p1, p2)
}

/// Projects `|s>` and `A_drift|s>` with `1 (x) <1/2|` and `1 (x) <1/2|E`.
pub fn corollary_projection_check(k: &Rational, kappa: &Rational, tau: &Rational) -> Result<DriftReport> {
    admissible_pq(k)?;
    let target = TensorTarget::new(k, 2);
    let t = &target.module;
    let s = target.initial()?;
    let gen = assemble_generator(&target, kappa, Some(tau))?;
    let drift = gen.apply_drift(&target, &s)?;
    let first = t.first();

    let (s1, s2) = corollary_projections(t, &s);
    let (d1, d2) = corollary_projections(t, &drift);
    let w1 = first.components(&d1)?;
    let w2 = first.components(&d2)?;
    // Span of the projected initial vectors inside L(1/2) = C|1/2> + C F|1/2>.
    let coords = |v: &LinComb<AffineMonomial>| [v.coeff(&AffineMonomial::highest(0)), v.coeff(&AffineMonomial::highest(1))];
    let (a, b) = (coords(&s1), coords(&s2));
    let det = &a[0] * &b[1] - &a[1] * &b[0];
    let expected_s1 = first.zero_mode_vector(1).scaled(&int(-1));
    let checks = vec![
        SubCheck::vanishing("(1 (x) <1/2|) A|s> = 0", first_nonzero(&w1)),
        SubCheck::vanishing("(1 (x) <1/2|E) A|s> = 0", first_nonzero(&w2)),
        SubCheck::new(
            "projected initial vectors span L(1/2)",
            !det.is_zero(),
            Some(Witness::new("det", &det)),
        ),
        SubCheck::new("(1 (x) <1/2|)|s> = -F|1/2>", s1 == expected_s1, None),
        SubCheck::new("(1 (x) <1/2|E)|s> = |1/2>", s2 == first.highest_weight(), None),
    ];
    let witness = checks
        .iter()
        .find(|c| !c.status.is_verified())
        .map(|c| c.witness.clone().unwrap_or(Witness { component: c.name.clone(), value: "failed".into() }));
    Ok(DriftReport {
        theorem: "corollary".into(),
        k: format_rational(k),
        kappa: format_rational(kappa),
        tau: format_rational(tau),
        grade: 2,
        status: Status::from_bool(witness.is_none()),
        witness,
        direction: None,
        checks,
        notes: vec![format!("projected |s>: {:?} and {:?}", s1, s2)],
    })
}

/// The `kappa` values `{2, 5/2, 3, 7/2, 4}` and `tau` values `{1/4, 1/2, 1}`
/// swept around the `k = 1` point.
pub fn sweep_grid() -> (Vec<Rational>, Vec<Rational>) {
    (
        vec![int(2), rat(5, 2), int(3), rat(7, 2), int(4)],
        vec![rat(1, 4), rat(1, 2), int(1)],
    )
}
