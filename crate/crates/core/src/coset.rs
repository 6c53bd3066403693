//! Tensor products `L_k(j) (x) L_1(eps)` with the diagonal level-(k+1)
//! action, the coset Virasoro operators and the branching identity.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::RwLock;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::affine::{admissible_pq, casimir_minus_one, sugawara_action, AffVector, AffineModule, AffineMonomial};
use crate::error::{Error, Result};
use crate::linalg::{LinComb, QMatrix};
use crate::report::{params, Status, SubCheck, VerificationReport, Witness};
use crate::scalar::{format_rational, int, is_nonnegative_integer, Rational};
use crate::sl2::{casimir_tensor, Generator, Spin};
use crate::virasoro::{kac_weight, minimal_central_charge, VermaModule};

pub type TensorKey = (AffineMonomial, AffineMonomial);
pub type TensorVector = LinComb<TensorKey>;

/// `c^Com_k = 1 - 6/((k+2)(k+3))`.
pub fn coset_central_charge(k: &Rational) -> Result<Rational> {
    let a = k + int(2);
    let b = k + int(3);
    if a.is_zero() || b.is_zero() {
        return Err(Error::CriticalLevel(format!(
            "coset central charge has poles at k = -2, -3 (got {})",
            format_rational(k)
        )));
    }
    Ok(int(1) - int(6) / (a * b))
}

/// `L_k(j) (x) L_1(eps)` (or the universal analogue) truncated at total
/// grade `cutoff`.
pub struct TensorModule {
    first: AffineModule,
    second: AffineModule,
    cutoff: usize,
    coset_cache: RwLock<HashMap<(i32, TensorKey), TensorVector>>,
}

impl fmt::Debug for TensorModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TensorModule")
            .field("first", &self.first)
            .field("second", &self.second)
            .field("cutoff", &self.cutoff)
            .finish()
    }
}

impl TensorModule {
    /// Tensor of irreducible quotients.
    pub fn irreducible(k: &Rational, j: Spin, eps: Spin, cutoff: usize) -> Self {
        Self::from_factors(
            AffineModule::irreducible(k.clone(), j, cutoff),
            AffineModule::irreducible(int(1), eps, cutoff),
        )
    }

    /// Tensor of universal modules.
    pub fn universal(k: &Rational, j: Spin, eps: Spin, cutoff: usize) -> Self {
        Self::from_factors(
            AffineModule::universal(k.clone(), j, cutoff),
            AffineModule::universal(int(1), eps, cutoff),
        )
    }

    pub fn from_factors(first: AffineModule, second: AffineModule) -> Self {
        let cutoff = first.cutoff().min(second.cutoff());
        Self {
            first,
            second,
            cutoff,
            coset_cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn first(&self) -> &AffineModule {
        &self.first
    }

    pub fn second(&self) -> &AffineModule {
        &self.second
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Level of the diagonal action.
    pub fn diagonal_level(&self) -> Rational {
        self.first.level() + self.second.level()
    }

    pub fn tensor(u: &AffVector, v: &AffVector) -> TensorVector {
        let mut out = TensorVector::zero();
        for (a, ca) in u.iter() {
            for (b, cb) in v.iter() {
                out.add_term((a.clone(), b.clone()), ca * cb);
            }
        }
        out
    }

    pub fn vacuum(&self) -> TensorVector {
        Self::tensor(&self.first.highest_weight(), &self.second.highest_weight())
    }

    /// Applies `f (x) 1`.
    pub fn map_first(&self, v: &TensorVector, f: impl Fn(&AffVector) -> Result<AffVector>) -> Result<TensorVector> {
        let mut out = TensorVector::zero();
        for ((a, b), c) in v.iter() {
            let image = f(&AffVector::basis(a.clone()))?;
            for (x, cx) in image.iter() {
                out.add_term((x.clone(), b.clone()), cx * c);
            }
        }
        Ok(out)
    }

    /// Applies `1 (x) f`.
    pub fn map_second(&self, v: &TensorVector, f: impl Fn(&AffVector) -> Result<AffVector>) -> Result<TensorVector> {
        let mut out = TensorVector::zero();
        for ((a, b), c) in v.iter() {
            let image = f(&AffVector::basis(b.clone()))?;
            for (y, cy) in image.iter() {
                out.add_term((a.clone(), y.clone()), cy * c);
            }
        }
        Ok(out)
    }

    /// `X(n) (x) 1 + 1 (x) X(n)`.
    pub fn diag_apply(&self, x: Generator, n: i32, v: &TensorVector) -> TensorVector {
        let mut out = self
            .map_first(v, |a| Ok(self.first.apply_raw(x, n, a)))
            .expect("infallible");
        out.add_assign(
            &self
                .map_second(v, |b| Ok(self.second.apply_raw(x, n, b)))
                .expect("infallible"),
        );
        out
    }

    fn max_grade(v: &TensorVector) -> usize {
        v.iter()
            .map(|((a, b), _)| a.grade() + b.grade())
            .max()
            .unwrap_or(0)
    }

    /// `L^(k)_n (x) 1 + 1 (x) L^(1)_n`.
    pub fn total_sugawara(&self, n: i32, v: &TensorVector) -> Result<TensorVector> {
        let mut out = self.map_first(v, |a| self.first.sugawara_raw(n, a))?;
        out.add_assign(&self.map_second(v, |b| self.second.sugawara_raw(n, b))?);
        Ok(out)
    }

    /// Sugawara operator of the diagonal action at level `k+1`.
    pub fn diag_sugawara(&self, n: i32, v: &TensorVector) -> Result<TensorVector> {
        sugawara_action(&self.diagonal_level(), n, v, Self::max_grade(v), |g, m, w| {
            self.diag_apply(g, m, w)
        })
    }

    /// `L^Com_n = L^(k)_n + L^(1)_n - L^diag_n`.
    pub fn coset_apply(&self, n: i32, v: &TensorVector) -> Result<TensorVector> {
        coset_central_charge(self.first.level())?;
        let mut out = TensorVector::zero();
        for (key, c) in v.iter() {
            let cache_key = (n, key.clone());
            let cached = self.coset_cache.read().unwrap().get(&cache_key).cloned();
            let image = match cached {
                Some(x) => x,
                None => {
                    let b = TensorVector::basis(key.clone());
                    let x = self.total_sugawara(n, &b)?.sub(&self.diag_sugawara(n, &b)?);
                    self.coset_cache.write().unwrap().insert(cache_key, x.clone());
                    x
                }
            };
            out.add_scaled(&image, c);
        }
        Ok(out)
    }

    /// `sum_a X_a(-1)^2` in the diagonal action.
    pub fn diag_casimir(&self, v: &TensorVector) -> TensorVector {
        casimir_minus_one(v, |g, m, w| self.diag_apply(g, m, w))
    }

    /// Product basis of total grade `grade` and total weight `weight`.
    pub fn basis(&self, grade: usize, weight: i32) -> Vec<TensorKey> {
        let mut out = Vec::new();
        for g1 in 0..=grade {
            for b1 in self.first.blocks().filter(|b| b.grade == g1) {
                for b2 in self.second.blocks().filter(|b| b.grade == grade - g1 && b.weight == weight - b1.weight) {
                    for a in &b1.basis {
                        for b in &b2.basis {
                            out.push((a.clone(), b.clone()));
                        }
                    }
                }
            }
        }
        out
    }

    /// Matrix of `L^Com_n` from the `(grade, weight)` product block to the
    /// `(grade - n, weight)` block, in product-basis coordinates.
    pub fn coset_virasoro(&self, n: i32, grade: usize, weight: i32) -> Result<QMatrix> {
        let target = grade as i64 - n as i64;
        if target > self.cutoff as i64 {
            return Err(Error::TruncationOverflow(format!(
                "L_{n} maps grade {grade} beyond cutoff {}",
                self.cutoff
            )));
        }
        let src = self.basis(grade, weight);
        let dst = if target < 0 {
            Vec::new()
        } else {
            self.basis(target as usize, weight)
        };
        let pos: BTreeMap<&TensorKey, usize> = dst.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let mut m = QMatrix::zeros(dst.len(), src.len());
        for (j, key) in src.iter().enumerate() {
            let image = self.coset_apply(n, &TensorVector::basis(key.clone()))?;
            for (k, c) in image.iter() {
                m.set(pos[k], j, c.clone());
            }
        }
        Ok(m)
    }

    /// Coordinates of `v` on the stored tensor product, block pair by block
    /// pair; all vanish iff `v` is zero there.
    pub fn components(&self, v: &TensorVector) -> Result<Vec<(String, Rational)>> {
        type Cell = BTreeMap<(usize, usize), Rational>;
        type BlockPair = ((usize, i32), (usize, i32));
        let mut grouped: BTreeMap<BlockPair, Cell> = BTreeMap::new();
        for ((a, b), c) in v.iter() {
            let overflow = |m: &AffineMonomial| Error::TruncationOverflow(format!("{m} lies above cutoff {}", self.cutoff));
            let (ka, ia) = self.first.locate(a).ok_or_else(|| overflow(a))?;
            let (kb, ib) = self.second.locate(b).ok_or_else(|| overflow(b))?;
            grouped.entry((ka, kb)).or_default().insert((ia, ib), c.clone());
        }
        let mut out = Vec::new();
        for ((ka, kb), cells) in grouped {
            let p1 = self.first.block_functionals(ka.0, ka.1);
            let p2 = self.second.block_functionals(kb.0, kb.1);
            let l1 = self.first.functional_labels(self.first.block(ka.0, ka.1).unwrap());
            let l2 = self.second.functional_labels(self.second.block(kb.0, kb.1).unwrap());
            for (r1, lab1) in l1.iter().enumerate() {
                for (r2, lab2) in l2.iter().enumerate() {
                    let mut x = Rational::zero();
                    for (&(i, j), c) in &cells {
                        let a = p1.get(r1, i);
                        let b = p2.get(r2, j);
                        if !a.is_zero() && !b.is_zero() {
                            x += c * a * b;
                        }
                    }
                    out.push((format!("{lab1} (x) {lab2}"), x));
                }
            }
        }
        Ok(out)
    }

    /// First nonzero component, or `None` if `v` vanishes.
    pub fn null_witness(&self, v: &TensorVector) -> Result<Option<Witness>> {
        Ok(self
            .components(v)?
            .into_iter()
            .find(|(_, x)| !x.is_zero())
            .map(|(l, x)| Witness::new(l, &x)))
    }

    /// `|1/2> (x) F|1/2> - F|1/2> (x) |1/2>`.
    pub fn s_vector(&self) -> Result<TensorVector> {
        if self.first.spin() != Spin::HALF || self.second.spin() != Spin::HALF {
            return Err(Error::InvalidParameter("the vector |s> needs j = eps = 1/2".into()));
        }
        let hw1 = self.first.highest_weight();
        let f1 = self.first.zero_mode_vector(1);
        let hw2 = self.second.highest_weight();
        let f2 = self.second.zero_mode_vector(1);
        Ok(Self::tensor(&hw1, &f2).sub(&Self::tensor(&f1, &hw2)))
    }

    /// All basis vectors of total grade `<= grade`.
    pub fn basis_up_to(&self, grade: usize) -> Vec<TensorKey> {
        let mut out = Vec::new();
        for g1 in 0..=grade {
            for b1 in self.first.blocks().filter(|b| b.grade == g1) {
                for b2 in self.second.blocks().filter(|b| b.grade + g1 <= grade) {
                    for a in &b1.basis {
                        for b in &b2.basis {
                            out.push((a.clone(), b.clone()));
                        }
                    }
                }
            }
        }
        out
    }
}

/// `Omega = sum_a X_a(-1)|0> (x) X_a(-1)|0> - omega_k (x) |0> - k |0> (x) omega_1`
/// with `omega_k` the Sugawara vector at level `k`.
fn omega_vector(t: &TensorModule) -> Result<TensorVector> {
    let k = t.first.level().clone();
    let v1 = t.first.highest_weight();
    let v2 = t.second.highest_weight();
    let mut cross = TensorVector::zero();
    let c = casimir_tensor();
    for a in Generator::ALL {
        for b in Generator::ALL {
            let coeff = &c[a.index()][b.index()];
            if coeff.is_zero() {
                continue;
            }
            let x = t.first.apply_raw(a, -1, &v1);
            let y = t.second.apply_raw(b, -1, &v2);
            cross.add_scaled(&TensorModule::tensor(&x, &y), coeff);
        }
    }
    let omega_k = t.first.sugawara_raw(-2, &v1)?;
    let omega_1 = t.second.sugawara_raw(-2, &v2)?;
    let mut out = cross;
    out.add_scaled(&TensorModule::tensor(&omega_k, &v2), &int(-1));
    out.add_scaled(&TensorModule::tensor(&v1, &omega_1), &-k);
    Ok(out)
}

/// Checks `omega^Com = L^Com_{-2}|0>(x)|0> = -Omega/(k+3)` componentwise
/// in the universal tensor of vacuum modules.
pub fn omega_com_check(k: &Rational) -> Result<VerificationReport> {
    coset_central_charge(k)?;
    let t = TensorModule::universal(k, Spin::ZERO, Spin::ZERO, 2);
    let vac = t.vacuum();
    let omega_com = t.coset_apply(-2, &vac)?;
    let omega = omega_vector(&t)?;
    let expected = omega.scaled(&(int(-1) / (k + int(3))));
    let diff = omega_com.sub(&expected);
    let witness = diff.iter().next().map(|(key, c)| Witness::new(format!("{} (x) {}", key.0, key.1), c));
    let checks = vec![
        SubCheck::vanishing("omega^Com + Omega/(k+3) = 0", witness),
        SubCheck::nonvanishing(
            "Omega != 0",
            omega.iter().next().map(|(key, c)| Witness::new(format!("{} (x) {}", key.0, key.1), c)),
        ),
    ];
    Ok(VerificationReport::from_checks(
        "omega-com",
        params([("k", format_rational(k))]),
        checks,
    ))
}

/// `[L^Com_n, X(m)^diag] = 0` on the tensor truncated at `grade`: every
/// product basis vector `v` and every `|n|, |m| <= modes` for which `v`,
/// `X(m)v`, `L_n v` and `L_n X(m) v` all stay within grade `<= grade`.
/// Exact, in the universal tensor.
pub fn commutant_check(k: &Rational, j: Spin, eps: Spin, grade: usize, modes: i32) -> Result<VerificationReport> {
    coset_central_charge(k)?;
    let t = TensorModule::universal(k, j, eps, grade);
    let basis = t.basis_up_to(grade);
    let top = grade as i64;
    let mut failure: Option<Witness> = None;
    let mut tested = 0usize;
    'outer: for key in &basis {
        let g = (key.0.grade() + key.1.grade()) as i64;
        let v = TensorVector::basis(key.clone());
        for n in -modes..=modes {
            let n64 = n as i64;
            if g - n64 > top {
                continue;
            }
            let lv = t.coset_apply(n, &v)?;
            for m in -modes..=modes {
                let m64 = m as i64;
                if g - m64 > top || g - m64 - n64 > top {
                    continue;
                }
                for x in Generator::ALL {
                    tested += 1;
                    let a = t.coset_apply(n, &t.diag_apply(x, m, &v))?;
                    let b = t.diag_apply(x, m, &lv);
                    let d = a.sub(&b);
                    let first = d.iter().next().map(|(kk, c)| {
                        Witness::new(
                            format!("[L_{n}, {x}({m})] on {} (x) {}: {} (x) {}", key.0, key.1, kk.0, kk.1),
                            c,
                        )
                    });
                    if first.is_some() {
                        failure = first;
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(VerificationReport::from_checks(
        "coset",
        params([
            ("k", format_rational(k)),
            ("j", j.to_string()),
            ("eps", eps.to_string()),
            ("grade", grade.to_string()),
            ("modes", modes.to_string()),
            ("vectors", basis.len().to_string()),
            ("commutators", tested.to_string()),
        ]),
        vec![SubCheck::vanishing("[L^Com_n, X(m)^diag] = 0", failure)],
    ))
}

/// Verifies `[L^Com_m, L^Com_n] = (m-n) L^Com_{m+n} + (m^3-m)/12 delta c^Com`
/// on the tensor truncated at `grade`, with the same window rule as
/// [`commutant_check`].
pub fn coset_bracket_check(k: &Rational, j: Spin, eps: Spin, grade: usize, modes: i32) -> Result<VerificationReport> {
    let c = coset_central_charge(k)?;
    let t = TensorModule::universal(k, j, eps, grade);
    let top = grade as i64;
    let mut failure = None;
    'outer: for key in t.basis_up_to(grade) {
        let g = (key.0.grade() + key.1.grade()) as i64;
        let v = TensorVector::basis(key.clone());
        for m in -modes..=modes {
            for n in -modes..=modes {
                let (m64, n64) = (m as i64, n as i64);
                if [g - m64, g - n64, g - m64 - n64].iter().any(|&x| x > top) {
                    continue;
                }
                let lhs = t
                    .coset_apply(m, &t.coset_apply(n, &v)?)?
                    .sub(&t.coset_apply(n, &t.coset_apply(m, &v)?)?);
                let mut rhs = t.coset_apply(m + n, &v)?.scaled(&int((m - n) as i64));
                if m + n == 0 {
                    let mm = m as i64;
                    rhs.add_scaled(&v, &(crate::scalar::rat(mm * mm * mm - mm, 12) * &c));
                }
                let d = lhs.sub(&rhs);
                let first = d
                    .iter()
                    .next()
                    .map(|(kk, x)| Witness::new(format!("[L_{m}, L_{n}]: {} (x) {}", kk.0, kk.1), x));
                if first.is_some() {
                    failure = first;
                    break 'outer;
                }
            }
        }
    }
    Ok(VerificationReport::from_checks(
        "coset-bracket",
        params([
            ("k", format_rational(k)),
            ("c", format_rational(&c)),
            ("grade", grade.to_string()),
        ]),
        vec![SubCheck::vanishing("coset Virasoro bracket", failure)],
    ))
}

/// One summand `L(c, h_{r,s}) (x) L_{k+1}((s-1)/2)` of the decomposition.
#[derive(Clone, Debug, Serialize)]
pub struct Summand {
    pub s: i64,
    pub h_virasoro: String,
    pub diagonal_spin: String,
    /// Grade at which the summand's lowest states appear.
    pub offset: String,
}

/// One `(L_0 eigenvalue, weight)` cell of the branching comparison.
#[derive(Clone, Debug, Serialize)]
pub struct BranchingCell {
    pub l0: String,
    pub grade: usize,
    pub weight: i32,
    pub lhs_dim: usize,
    pub rhs_dim: usize,
    #[serde(rename = "match")]
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchingReport {
    pub check: String,
    pub parameters: BTreeMap<String, String>,
    pub status: Status,
    pub witness: Option<Witness>,
    pub summands: Vec<Summand>,
    pub cells: Vec<BranchingCell>,
}

/// Spins `s` allowed in the decomposition: `1 <= s <= p+q-1`, `r - s = 2 eps mod 2`.
pub fn allowed_s(p: i64, q: i64, j: Spin, eps: Spin) -> Vec<i64> {
    let r = j.twice() as i64 + 1;
    (1..p + q)
        .filter(|s| (r - s - eps.twice() as i64).rem_euclid(2) == 0)
        .collect()
}

/// Compares `(L_0, weight)`-refined dimensions of `L_k(j) (x) L_1(eps)`
/// with those of `sum_s L(c, h_{r,s}) (x) L_{k+1}((s-1)/2)` up to total grade `max_grade`.
pub fn branching_check(k: &Rational, j: Spin, eps: Spin, max_grade: usize) -> Result<BranchingReport> {
    let (p, q) = admissible_pq(k)?;
    if eps.twice() > 1 {
        return Err(Error::InvalidParameter("eps must be 0 or 1/2".into()));
    }
    if j.twice() as i64 > p - 2 {
        return Err(Error::InvalidParameter(format!(
            "spin {j} outside 0 <= j <= (p-2)/2 = {}",
            crate::scalar::rat(p - 2, 2)
        )));
    }
    let big_q = p + q;
    let c = minimal_central_charge(p, big_q);
    let r = j.twice() as i64 + 1;
    let k1 = k + int(1);
    let h_j = spin_weight(k, j)?;
    let h_eps = spin_weight(&int(1), eps)?;
    let base = &h_j + &h_eps;

    let m1 = AffineModule::irreducible(k.clone(), j, max_grade);
    let m2 = AffineModule::irreducible(int(1), eps, max_grade);
    let mut lhs: BTreeMap<(usize, i32), usize> = BTreeMap::new();
    for b1 in m1.blocks() {
        for b2 in m2.blocks() {
            if b1.grade + b2.grade <= max_grade {
                *lhs.entry((b1.grade + b2.grade, b1.weight + b2.weight)).or_default() +=
                    b1.dim_irreducible() * b2.dim_irreducible();
            }
        }
    }

    let s_values = allowed_s(p, q, j, eps);
    type Contribution = (Summand, BTreeMap<(usize, i32), usize>);
    let contributions: Vec<Result<Contribution>> = s_values
        .par_iter()
        .map(|&s| {
            let h_vir = kac_weight(p, big_q, r, s);
            let diag_spin = Spin::from_twice((s - 1) as u32);
            let h_diag = spin_weight(&k1, diag_spin)?;
            let offset = &h_vir + &h_diag - &base;
            let summand = Summand {
                s,
                h_virasoro: format_rational(&h_vir),
                diagonal_spin: diag_spin.to_string(),
                offset: format_rational(&offset),
            };
            let mut cells = BTreeMap::new();
            if !is_nonnegative_integer(&offset) {
                return Err(Error::InvalidParameter(format!(
                    "summand s = {s} has L_0 offset {} which is not a non-negative integer",
                    format_rational(&offset)
                )));
            }
            let off = crate::scalar::as_integer(&offset).unwrap() as usize;
            if off > max_grade {
                return Ok((summand, cells));
            }
            let room = max_grade - off;
            let vir = VermaModule::new(c.clone(), h_vir, room).irreducible_graded_dims();
            let diag = AffineModule::irreducible(k1.clone(), diag_spin, room);
            for (a, &da) in vir.iter().enumerate() {
                for b in diag.blocks().filter(|b| b.grade + a <= room) {
                    *cells.entry((off + a + b.grade, b.weight)).or_default() += da * b.dim_irreducible();
                }
            }
            Ok((summand, cells))
        })
        .collect();

    let mut summands = Vec::new();
    let mut rhs: BTreeMap<(usize, i32), usize> = BTreeMap::new();
    let mut misaligned = None;
    for res in contributions {
        match res {
            Ok((summand, cells)) => {
                summands.push(summand);
                for (key, d) in cells {
                    *rhs.entry(key).or_default() += d;
                }
            }
            Err(Error::InvalidParameter(msg)) => {
                misaligned.get_or_insert(msg);
            }
            Err(e) => return Err(e),
        }
    }

    let mut keys: Vec<(usize, i32)> = lhs.keys().chain(rhs.keys()).copied().collect();
    keys.sort();
    keys.dedup();
    let cells: Vec<BranchingCell> = keys
        .into_iter()
        .map(|(g, w)| {
            let l = lhs.get(&(g, w)).copied().unwrap_or(0);
            let r = rhs.get(&(g, w)).copied().unwrap_or(0);
            BranchingCell {
                l0: format_rational(&(&base + int(g as i64))),
                grade: g,
                weight: w,
                lhs_dim: l,
                rhs_dim: r,
                matches: l == r,
            }
        })
        .collect();
    let bad = cells.iter().find(|c| !c.matches);
    let witness = match (&misaligned, bad) {
        (Some(msg), _) => Some(Witness {
            component: msg.clone(),
            value: "misaligned".into(),
        }),
        (None, Some(cell)) => Some(Witness {
            component: format!("L0 = {}, weight {}", cell.l0, cell.weight),
            value: format!("lhs {} != rhs {}", cell.lhs_dim, cell.rhs_dim),
        }),
        (None, None) => None,
    };
    Ok(BranchingReport {
        check: "branching".into(),
        parameters: params([
            ("k", format_rational(k)),
            ("j", j.to_string()),
            ("eps", eps.to_string()),
            ("grade", max_grade.to_string()),
            ("c", format_rational(&c)),
            ("s", format!("{s_values:?}")),
        ]),
        status: Status::from_bool(witness.is_none()),
        witness,
        summands,
        cells,
    })
}

/// `j(j+1)/(k+2)`.
pub fn spin_weight(k: &Rational, j: Spin) -> Result<Rational> {
    let s = k + int(2);
    if s.is_zero() {
        return Err(Error::CriticalLevel("k = -2".into()));
    }
    let jv = j.value();
    Ok(&jv * (&jv + int(1)) / s)
}
