//! Truncated Virasoro Verma modules, their invariant form, and the
//! minimal-series constants.
//!
//! A vector of `M(c,h)` is a [`LinComb`] of [`Partition`]s, the partition
//! `(l1 >= l2 >= ... )` standing for `L_{-l1} L_{-l2} ... |c,h>`. Generators
//! act by commuting positive modes to the right until they hit the highest
//! weight vector. The action is computed on the universal module, so the
//! cutoff only bounds which grades are stored and queried.

use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{LinComb, QMatrix};
use crate::report::{params, SubCheck, VerificationReport, Witness};
use crate::scalar::{format_rational, int, rat, Rational};

/// A partition `l1 >= l2 >= ... >= 1` labelling `L_{-l1} ... L_{-lk}|c,h>`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    /// Sorts the parts into non-increasing order. Zero parts are rejected.
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidParameter("partition parts must be >= 1".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn grade(&self) -> usize {
        self.0.iter().map(|&p| p as usize).sum()
    }

    fn prepend(&self, part: u32) -> Self {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(part);
        v.extend_from_slice(&self.0);
        Partition(v)
    }

    fn tail(&self) -> Self {
        Partition(self.0[1..].to_vec())
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("|h>");
        }
        for p in &self.0 {
            write!(f, "L_{{-{p}}}")?;
        }
        Ok(())
    }
}

/// Partitions of `n` in lexicographically decreasing order.
pub fn partitions(n: usize) -> Vec<Partition> {
    fn rec(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if n == 0 {
            out.push(Partition(prefix.clone()));
            return;
        }
        for part in (1..=max.min(n)).rev() {
            prefix.push(part);
            rec(n - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n as u32, n as u32, &mut Vec::new(), &mut out);
    out
}

pub type VirVector = LinComb<Partition>;

/// Per-grade Gram matrix of the invariant form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramBlock {
    pub grade: usize,
    pub matrix: QMatrix,
}

/// `M(c,h)` stored up to grade `cutoff`.
pub struct VermaModule {
    c: Rational,
    h: Rational,
    cutoff: usize,
    bases: Vec<Vec<Partition>>,
    index: HashMap<Partition, usize>,
    grams: Vec<QMatrix>,
    pivots: Vec<Vec<usize>>,
    cache: RwLock<HashMap<(i64, Partition), VirVector>>,
}

impl fmt::Debug for VermaModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VermaModule")
            .field("c", &format_rational(&self.c))
            .field("h", &format_rational(&self.h))
            .field("cutoff", &self.cutoff)
            .finish()
    }
}

impl VermaModule {
    pub fn new(c: Rational, h: Rational, cutoff: usize) -> Self {
        let bases: Vec<Vec<Partition>> = (0..=cutoff).map(partitions).collect();
        let index = bases
            .iter()
            .flat_map(|b| b.iter().enumerate().map(|(i, p)| (p.clone(), i)))
            .collect();
        let mut m = Self {
            c,
            h,
            cutoff,
            bases,
            index,
            grams: Vec::new(),
            pivots: Vec::new(),
            cache: RwLock::new(HashMap::new()),
        };
        m.grams = (0..=cutoff).map(|g| m.compute_gram(g)).collect();
        m.pivots = m.grams.iter().map(QMatrix::pivot_columns).collect();
        m
    }

    pub fn central_charge(&self) -> &Rational {
        &self.c
    }

    pub fn weight(&self) -> &Rational {
        &self.h
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn basis(&self, grade: usize) -> &[Partition] {
        &self.bases[grade]
    }

    pub fn dim_up_to_cutoff(&self) -> usize {
        self.bases.iter().map(Vec::len).sum()
    }

    pub fn highest_weight(&self) -> VirVector {
        VirVector::basis(Partition::empty())
    }

    /// `L_n` on a single monomial, in the universal module.
    fn apply_monomial(&self, n: i64, mono: &Partition) -> VirVector {
        if n == 0 {
            let e = &self.h + int(mono.grade() as i64);
            return VirVector::term(mono.clone(), e);
        }
        if mono.0.is_empty() {
            return if n > 0 {
                VirVector::zero()
            } else {
                VirVector::basis(Partition(vec![(-n) as u32]))
            };
        }
        let first = mono.0[0] as i64;
        if n < 0 && -n >= first {
            return VirVector::basis(mono.prepend((-n) as u32));
        }
        let key = (n, mono.clone());
        if let Some(v) = self.cache.read().unwrap().get(&key) {
            return v.clone();
        }
        // L_n L_{-m} R = L_{-m} L_n R + (n+m) L_{n-m} R + delta_{n,m} (n^3-n)/12 c R
        let rest = mono.tail();
        let inner = self.apply_monomial(n, &rest);
        let mut out = self.apply_raw(-first, &inner);
        let coeff = int(n + first);
        out.add_scaled(&self.apply_monomial(n - first, &rest), &coeff);
        if n == first {
            let central = rat(n * n * n - n, 12) * &self.c;
            out.add_term(rest, central);
        }
        self.cache.write().unwrap().insert(key, out.clone());
        out
    }

    /// `L_n v` computed exactly without any grade check.
    pub fn apply_raw(&self, n: i64, v: &VirVector) -> VirVector {
        let mut out = VirVector::zero();
        for (mono, c) in v.iter() {
            out.add_scaled(&self.apply_monomial(n, mono), c);
        }
        out
    }

    /// `L_n v`; errors if `|n|` exceeds the cutoff or the image leaves the
    /// stored grades.
    pub fn apply(&self, n: i64, v: &VirVector) -> Result<VirVector> {
        if n.unsigned_abs() as usize > self.cutoff {
            return Err(Error::TruncationOverflow(format!(
                "mode L_{n} exceeds cutoff {}",
                self.cutoff
            )));
        }
        for (mono, _) in v.iter() {
            let target = mono.grade() as i64 - n;
            if target > self.cutoff as i64 {
                return Err(Error::TruncationOverflow(format!(
                    "L_{n} maps grade {} to {target} > cutoff {}",
                    mono.grade(),
                    self.cutoff
                )));
            }
        }
        Ok(self.apply_raw(n, v))
    }

    /// Applies `L_{n_1} L_{n_2} ... ` with the last mode acting first.
    pub fn apply_word(&self, modes: &[i64], v: &VirVector) -> VirVector {
        modes
            .iter()
            .rev()
            .fold(v.clone(), |acc, &n| self.apply_raw(n, &acc))
    }

    /// `<u|v>` for the form with `<c,h|c,h> = 1` and `L_n` adjoint to `L_{-n}`.
    pub fn pair(&self, u: &VirVector, v: &VirVector) -> Rational {
        let mut total = Rational::zero();
        for (mono, cu) in u.iter() {
            let mut w = v.clone();
            w.retain(|k| k.grade() == mono.grade());
            if w.is_zero() {
                continue;
            }
            for &p in mono.parts() {
                w = self.apply_raw(p as i64, &w);
            }
            total += cu * w.coeff(&Partition::empty());
        }
        total
    }

    fn compute_gram(&self, grade: usize) -> QMatrix {
        let basis = &self.bases[grade];
        let n = basis.len();
        let mut g = QMatrix::zeros(n, n);
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate().skip(i) {
                let x = self.pair(&VirVector::basis(u.clone()), &VirVector::basis(v.clone()));
                g.set(i, j, x.clone());
                g.set(j, i, x);
            }
        }
        g
    }

    pub fn gram_matrix(&self, grade: usize) -> Result<GramBlock> {
        if grade > self.cutoff {
            return Err(Error::TruncationOverflow(format!(
                "grade {grade} exceeds cutoff {}",
                self.cutoff
            )));
        }
        Ok(GramBlock {
            grade,
            matrix: self.grams[grade].clone(),
        })
    }

    /// Grade dimensions of the irreducible quotient `L(c,h)`.
    pub fn irreducible_graded_dims(&self) -> Vec<usize> {
        self.pivots.iter().map(Vec::len).collect()
    }

    /// Coordinates of `v` restricted to one grade, in basis order.
    pub fn coordinates(&self, v: &VirVector, grade: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.bases[grade].len()];
        for (mono, c) in v.iter() {
            if mono.grade() == grade {
                out[self.index[mono]] = c.clone();
            }
        }
        out
    }

    /// The functionals `u -> <b_p|u>` for the pivot basis vectors `b_p` of
    /// each grade. They vanish exactly on the radical and give coordinates
    /// on `L(c,h)`.
    pub fn quotient_components(&self, v: &VirVector) -> Vec<(String, Rational)> {
        let mut out = Vec::new();
        for grade in 0..=self.cutoff {
            let x = self.coordinates(v, grade);
            let gx = self.grams[grade].mul_vec(&x);
            for &p in &self.pivots[grade] {
                out.push((format!("<{}|", self.bases[grade][p]), gx[p].clone()));
            }
        }
        out
    }

    /// `None` if `v` vanishes in `L(c,h)`, else the first nonzero component.
    pub fn null_witness(&self, v: &VirVector) -> Option<Witness> {
        self.quotient_components(v)
            .into_iter()
            .find(|(_, x)| !x.is_zero())
            .map(|(label, x)| Witness::new(label, &x))
    }

    /// Matrix of `L_n` on the quotient `M / M_{>cutoff}`, in the basis of all
    /// grades `0..=cutoff` concatenated. Images above the cutoff are dropped.
    pub fn truncated_matrix(&self, n: i64) -> QMatrix {
        let offsets: Vec<usize> = self
            .bases
            .iter()
            .scan(0, |acc, b| {
                let o = *acc;
                *acc += b.len();
                Some(o)
            })
            .collect();
        let dim = self.dim_up_to_cutoff();
        let mut m = QMatrix::zeros(dim, dim);
        for (g, basis) in self.bases.iter().enumerate() {
            for (j, mono) in basis.iter().enumerate() {
                let image = self.apply_monomial(n, mono);
                for (k, c) in image.iter() {
                    let tg = k.grade();
                    if tg <= self.cutoff {
                        m.set(offsets[tg] + self.index[k], offsets[g] + j, c.clone());
                    }
                }
            }
        }
        m
    }

    /// Offset of each grade in the concatenated basis of [`Self::truncated_matrix`].
    pub fn grade_offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.bases
            .iter()
            .map(|b| {
                let o = acc;
                acc += b.len();
                o
            })
            .collect()
    }
}

fn coprime(p: i64, q: i64) -> bool {
    p.gcd(&q) == 1
}

/// `c_{p,q} = 1 - 6(p-q)^2/(pq)`, no validation.
pub fn minimal_central_charge(p: i64, q: i64) -> Rational {
    int(1) - rat(6 * (p - q) * (p - q), p * q)
}

/// `h_{p,q;r,s} = ((rq - sp)^2 - (p-q)^2) / (4pq)`, no validation.
pub fn kac_weight(p: i64, q: i64, r: i64, s: i64) -> Rational {
    let a = r * q - s * p;
    rat(a * a - (p - q) * (p - q), 4 * p * q)
}

/// Minimal-series `(c, h)` for coprime `p, q`.
///
/// Indices outside `1 <= r < p`, `1 <= s < q` are accepted with a warning;
/// coset branching uses them with `q` replaced by `p+q`.
pub fn minimal_constants(p: i64, q: i64, r: i64, s: i64) -> Result<(Rational, Rational)> {
    if p < 1 || q < 1 {
        return Err(Error::InvalidParameter(format!("p = {p}, q = {q} must be positive")));
    }
    if !coprime(p, q) {
        return Err(Error::InvalidParameter(format!("p = {p} and q = {q} are not coprime")));
    }
    if p < 3 || q < 3 {
        log::warn!("(p, q) = ({p}, {q}) lies outside the unitary-range minimal series p, q >= 3");
    }
    if !(1..p).contains(&r) || !(1..q).contains(&s) {
        log::warn!("Kac indices (r, s) = ({r}, {s}) outside 1..{p} x 1..{q}");
    }
    Ok((minimal_central_charge(p, q), kac_weight(p, q, r, s)))
}

/// `(c_kappa, h_kappa) = (1 - 3(kappa-4)^2/(2 kappa), (6-kappa)/(2 kappa))`.
pub fn sle_constants(kappa: &Rational) -> Result<(Rational, Rational)> {
    if kappa.is_zero() {
        return Err(Error::InvalidParameter("kappa must be nonzero".into()));
    }
    let two_k = int(2) * kappa;
    let d = kappa - int(4);
    let c = int(1) - int(3) * &d * &d / &two_k;
    let h = (int(6) - kappa) / two_k;
    Ok((c, h))
}

/// The level-2 vector `(-2 L_{-2} + (kappa/2) L_{-1}^2)|c,h>`.
pub fn level_two_vector(kappa: &Rational) -> VirVector {
    let mut v = VirVector::term(Partition(vec![2]), int(-2));
    v.add_term(Partition(vec![1, 1]), kappa / int(2));
    v
}

/// Checks that `(-2L_{-2} + (kappa/2)L_{-1}^2)|c_{p,q}, h_{p,q;2,1}>` with
/// `kappa = 4p/q` is annihilated by `L_1` and `L_2`, and optionally that the
/// same vector with `kappa + perturbation` is not.
pub fn singular_vector_check(p: i64, q: i64, perturbation: Option<&Rational>) -> Result<VerificationReport> {
    if p < 1 || q < 1 || !coprime(p, q) {
        return Err(Error::InvalidParameter(format!(
            "singular vector check needs coprime positive p, q (got {p}, {q})"
        )));
    }
    let kappa = rat(4 * p, q);
    let c = minimal_central_charge(p, q);
    let h = kac_weight(p, q, 2, 1);
    let module = VermaModule::new(c.clone(), h.clone(), 2);
    let first_nonzero = |v: &VirVector| {
        v.iter()
            .next()
            .map(|(k, x)| Witness::new(k.to_string(), x))
    };
    let mut checks = Vec::new();
    let chi = level_two_vector(&kappa);
    for n in [1, 2] {
        let image = module.apply(n, &chi)?;
        checks.push(SubCheck::vanishing(format!("L_{n} chi = 0"), first_nonzero(&image)));
    }
    let mut parameters = params([
        ("p", p.to_string()),
        ("q", q.to_string()),
        ("kappa", format_rational(&kappa)),
        ("c", format_rational(&c)),
        ("h", format_rational(&h)),
    ]);
    if let Some(eps) = perturbation {
        let kp = &kappa + eps;
        parameters.insert("kappa_perturbed".into(), format_rational(&kp));
        let chi_p = level_two_vector(&kp);
        let l1 = module.apply(1, &chi_p)?;
        let l2 = module.apply(2, &chi_p)?;
        let witness = first_nonzero(&l1).or_else(|| first_nonzero(&l2));
        checks.push(SubCheck::nonvanishing(
            "perturbed kappa breaks singularity",
            witness,
        ));
    }
    Ok(VerificationReport::from_checks("singular", parameters, checks))
}

/// One `(p, q, r, s)` entry of a minimal-model Kac table.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct MinimalRow {
    pub p: i64,
    pub q: i64,
    pub r: i64,
    pub s: i64,
    pub c: String,
    pub h: String,
    /// `(p-r, q-s)` when that entry is listed first.
    pub duplicate_of: Option<String>,
}

/// Kac tables for coprime `2 <= p <= pmax`, `2 <= q <= qmax`, `p != q`,
/// with `1 <= r < p`, `1 <= s < q`.
pub fn minimal_table(pmax: i64, qmax: i64) -> Vec<MinimalRow> {
    let mut rows = Vec::new();
    for p in 2..=pmax {
        for q in 2..=qmax {
            if !coprime(p, q) {
                continue;
            }
            let c = format_rational(&minimal_central_charge(p, q));
            for r in 1..p {
                for s in 1..q {
                    let mirror = (p - r, q - s);
                    rows.push(MinimalRow {
                        p,
                        q,
                        r,
                        s,
                        c: c.clone(),
                        h: format_rational(&kac_weight(p, q, r, s)),
                        duplicate_of: ((r, s) > mirror).then(|| format!("({},{})", mirror.0, mirror.1)),
                    });
                }
            }
        }
    }
    rows
}

/// `det` of the grade-2 Gram matrix, `2h(16h^2 + 2(c-5)h + c)`.
pub fn level_two_determinant(c: &Rational, h: &Rational) -> Rational {
    VermaModule::new(c.clone(), h.clone(), 2).grams[2].determinant()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(parts: &[u32]) -> VirVector {
        VirVector::basis(Partition::new(parts.to_vec()).unwrap())
    }

    #[test]
    fn partition_counts_and_order() {
        let counts: Vec<usize> = (0..=8).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22]);
        let p4: Vec<Vec<u32>> = partitions(4).into_iter().map(|p| p.0).collect();
        assert_eq!(p4, vec![vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]]);
    }

    #[test]
    fn single_commutators() {
        let (c, h) = (rat(7, 3), rat(5, 11));
        let m = VermaModule::new(c.clone(), h.clone(), 4);
        let hw = m.highest_weight();
        assert_eq!(m.apply(1, &mono(&[1])).unwrap(), hw.scaled(&(int(2) * &h)));
        assert_eq!(
            m.apply(2, &mono(&[2])).unwrap(),
            hw.scaled(&(int(4) * &h + &c / int(2)))
        );
        assert!(m.apply(1, &hw).unwrap().is_zero());
        assert_eq!(m.apply(0, &mono(&[2, 1])).unwrap(), mono(&[2, 1]).scaled(&(&h + int(3))));
    }

    #[test]
    fn truncation_overflow_is_explicit() {
        let m = VermaModule::new(int(1), int(1), 2);
        assert!(matches!(m.apply(-1, &mono(&[2])), Err(Error::TruncationOverflow(_))));
        assert!(matches!(m.apply(3, &mono(&[1])), Err(Error::TruncationOverflow(_))));
        assert!(m.apply(-1, &mono(&[1])).is_ok());
    }

    #[test]
    fn grade_two_gram() {
        let (c, h) = (rat(3, 7), rat(2, 5));
        let m = VermaModule::new(c.clone(), h.clone(), 2);
        let g = m.gram_matrix(2).unwrap().matrix;
        let expected = QMatrix::from_rows(vec![
            vec![int(4) * &h + &c / int(2), int(6) * &h],
            vec![int(6) * &h, int(4) * &h * (int(2) * &h + int(1))],
        ]);
        assert_eq!(g, expected);
        assert_eq!(m.gram_matrix(1).unwrap().matrix, QMatrix::from_rows(vec![vec![int(2) * &h]]));
        assert_eq!(level_two_determinant(&rat(1, 2), &rat(1, 2)), int(0));
    }

    #[test]
    fn irreducible_dims() {
        let generic = VermaModule::new(int(7), int(5), 6);
        assert_eq!(generic.irreducible_graded_dims(), vec![1, 1, 2, 3, 5, 7, 11]);
        let ising = VermaModule::new(rat(1, 2), rat(1, 2), 2);
        assert_eq!(ising.irreducible_graded_dims()[2], 1);
        let vac = VermaModule::new(rat(1, 2), int(0), 2);
        assert_eq!(vac.irreducible_graded_dims()[1], 0);
    }

    #[test]
    fn minimal_series_values() {
        assert_eq!(minimal_constants(3, 4, 1, 1).unwrap(), (rat(1, 2), int(0)));
        assert_eq!(minimal_constants(3, 4, 2, 1).unwrap(), (rat(1, 2), rat(1, 2)));
        assert_eq!(minimal_constants(3, 4, 1, 3).unwrap().1, minimal_constants(3, 4, 2, 1).unwrap().1);
        assert!(minimal_constants(4, 6, 1, 1).is_err());
    }

    #[test]
    fn sle_constant_values() {
        assert_eq!(sle_constants(&int(4)).unwrap(), (int(1), rat(1, 4)));
        assert_eq!(sle_constants(&int(6)).unwrap(), (int(0), int(0)));
        assert_eq!(sle_constants(&int(3)).unwrap(), minimal_constants(3, 4, 2, 1).unwrap());
        assert!(sle_constants(&int(0)).is_err());
    }

    #[test]
    fn ising_singular_vector() {
        let r = singular_vector_check(3, 4, Some(&int(1))).unwrap();
        assert!(r.status.is_verified(), "{r:?}");
        let m = VermaModule::new(rat(1, 2), rat(1, 2), 2);
        let bad = m.apply(1, &level_two_vector(&int(4))).unwrap();
        assert!(!bad.is_zero());
    }

    #[test]
    fn invariance_of_the_form() {
        let m = VermaModule::new(rat(-22, 5), rat(-1, 5), 5);
        for g in 0..=3 {
            for u in m.basis(g) {
                for n in 1..=2i64 {
                    let ug = g + n as usize;
                    for v in m.basis(ug) {
                        let (u, v) = (VirVector::basis(u.clone()), VirVector::basis(v.clone()));
                        let lhs = m.pair(&m.apply_raw(-n, &u), &v);
                        let rhs = m.pair(&u, &m.apply_raw(n, &v));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }
}
