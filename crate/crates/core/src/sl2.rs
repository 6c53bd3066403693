//! The Lie algebra sl2 in its standard basis E, H, F, the trace form, and
//! the finite-dimensional irreducible modules L(j).

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::scalar::{int, parse_rational, rat, Rational};

/// Standard basis element of sl2. The derived order `E < H < F` is the
/// tie-break used by PBW monomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Generator {
    E,
    H,
    F,
}

impl Generator {
    pub const ALL: [Generator; 3] = [Generator::E, Generator::H, Generator::F];

    /// Eigenvalue of ad H.
    pub fn weight(self) -> i32 {
        match self {
            Generator::E => 2,
            Generator::H => 0,
            Generator::F => -2,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// The image under the anti-involution E <-> F, H -> H.
    pub fn adjoint(self) -> Generator {
        match self {
            Generator::E => Generator::F,
            Generator::H => Generator::H,
            Generator::F => Generator::E,
        }
    }

    pub fn element(self) -> Sl2Element {
        let mut x = Sl2Element::zero();
        *x.coeff_mut(self) = Rational::one();
        x
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Generator::E => "E",
            Generator::H => "H",
            Generator::F => "F",
        };
        f.write_str(s)
    }
}

/// An element `e E + h H + f F` of sl2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sl2Element {
    pub e: Rational,
    pub h: Rational,
    pub f: Rational,
}

impl Sl2Element {
    pub fn zero() -> Self {
        Self {
            e: Rational::zero(),
            h: Rational::zero(),
            f: Rational::zero(),
        }
    }

    pub fn new(e: Rational, h: Rational, f: Rational) -> Self {
        Self { e, h, f }
    }

    pub fn coeff(&self, g: Generator) -> &Rational {
        match g {
            Generator::E => &self.e,
            Generator::H => &self.h,
            Generator::F => &self.f,
        }
    }

    pub fn coeff_mut(&mut self, g: Generator) -> &mut Rational {
        match g {
            Generator::E => &mut self.e,
            Generator::H => &mut self.h,
            Generator::F => &mut self.f,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (Generator, &Rational)> {
        Generator::ALL
            .into_iter()
            .map(|g| (g, self.coeff(g)))
            .filter(|(_, c)| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.e.is_zero() && self.h.is_zero() && self.f.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(&self.e + &other.e, &self.h + &other.h, &self.f + &other.f)
    }

    pub fn scaled(&self, s: &Rational) -> Self {
        Self::new(&self.e * s, &self.h * s, &self.f * s)
    }

    /// The defining 2x2 matrix.
    pub fn matrix(&self) -> QMatrix {
        QMatrix::from_rows(vec![
            vec![self.h.clone(), self.e.clone()],
            vec![self.f.clone(), -self.h.clone()],
        ])
    }
}

/// `[a, b]` for basis elements.
pub fn generator_bracket(a: Generator, b: Generator) -> Sl2Element {
    use Generator::*;
    let z = Sl2Element::zero();
    match (a, b) {
        (H, E) => E.element().scaled(&int(2)),
        (E, H) => E.element().scaled(&int(-2)),
        (H, F) => F.element().scaled(&int(-2)),
        (F, H) => F.element().scaled(&int(2)),
        (E, F) => H.element(),
        (F, E) => H.element().scaled(&int(-1)),
        _ => z,
    }
}

/// `(a|b) = Tr(ab)` on basis elements.
pub fn generator_form(a: Generator, b: Generator) -> i64 {
    use Generator::*;
    match (a, b) {
        (E, F) | (F, E) => 1,
        (H, H) => 2,
        _ => 0,
    }
}

pub fn sl2_bracket(x: &Sl2Element, y: &Sl2Element) -> Sl2Element {
    let mut out = Sl2Element::zero();
    for (a, ca) in x.terms() {
        for (b, cb) in y.terms() {
            out = out.add(&generator_bracket(a, b).scaled(&(ca * cb)));
        }
    }
    out
}

/// The invariant form `(X|Y) = Tr(XY)`.
pub fn killing_form(x: &Sl2Element, y: &Sl2Element) -> Rational {
    &x.e * &y.f + &x.f * &y.e + int(2) * &x.h * &y.h
}

/// A non-negative half-integer spin, stored as `2j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Spin {
    twice: u32,
}

impl Spin {
    pub const ZERO: Spin = Spin { twice: 0 };
    pub const HALF: Spin = Spin { twice: 1 };

    pub fn from_twice(twice: u32) -> Self {
        Self { twice }
    }

    pub fn from_rational(j: &Rational) -> Result<Self> {
        let two_j = j * int(2);
        if !two_j.is_integer() || two_j < Rational::zero() {
            return Err(Error::InvalidParameter(format!(
                "spin {} is not a non-negative half-integer",
                crate::scalar::format_rational(j)
            )));
        }
        let twice = crate::scalar::as_integer(&two_j)
            .and_then(|v| u32::try_from(v).ok())
            .ok_or_else(|| Error::InvalidParameter("spin too large".into()))?;
        Ok(Self { twice })
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::from_rational(&parse_rational(s)?)
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn dim(self) -> usize {
        self.twice as usize + 1
    }

    pub fn value(self) -> Rational {
        rat(self.twice as i64, 2)
    }

    /// Eigenvalue of the Casimir `(1/2)H^2 + EF + FE` on L(j), namely `2j(j+1)`.
    pub fn casimir(self) -> Rational {
        let j = self.value();
        int(2) * &j * (j + int(1))
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice.is_multiple_of(2) {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl Serialize for Spin {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The irreducible module L(j) with basis `F^m |j>`, `m = 0..=2j`.
#[derive(Clone, Debug)]
pub struct FiniteModule {
    spin: Spin,
    e: QMatrix,
    h: QMatrix,
    f: QMatrix,
}

impl FiniteModule {
    pub fn new(spin: Spin) -> Self {
        let n = spin.dim();
        let two_j = spin.twice() as i64;
        let mut e = QMatrix::zeros(n, n);
        let mut h = QMatrix::zeros(n, n);
        let mut f = QMatrix::zeros(n, n);
        for m in 0..n {
            let mi = m as i64;
            h.set(m, m, int(two_j - 2 * mi));
            if m + 1 < n {
                f.set(m + 1, m, int(1));
            }
            if m > 0 {
                // E F^m|j> = m (2j - m + 1) F^{m-1}|j>
                e.set(m - 1, m, int(mi * (two_j - mi + 1)));
            }
        }
        Self { spin, e, h, f }
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    pub fn generator_matrix(&self, g: Generator) -> &QMatrix {
        match g {
            Generator::E => &self.e,
            Generator::H => &self.h,
            Generator::F => &self.f,
        }
    }

    pub fn action_matrix(&self, x: &Sl2Element) -> QMatrix {
        let n = self.dim();
        x.terms().fold(QMatrix::zeros(n, n), |acc, (g, c)| {
            acc.add(&self.generator_matrix(g).scaled(c))
        })
    }

    /// Image of the basis vector `F^m|j>` under a generator, as `(m', coeff)`.
    pub fn apply_generator(&self, g: Generator, m: u32) -> Option<(u32, Rational)> {
        let two_j = self.spin.twice() as i64;
        let mi = m as i64;
        match g {
            Generator::H => {
                let c = two_j - 2 * mi;
                (c != 0).then(|| (m, int(c)))
            }
            Generator::F => (m < self.spin.twice()).then(|| (m + 1, Rational::one())),
            Generator::E => (m > 0).then(|| (m - 1, int(mi * (two_j - mi + 1)))),
        }
    }

    pub fn apply(&self, x: &Sl2Element, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.dim() {
            return Err(Error::InvalidParameter(format!(
                "vector of length {} does not lie in L({})",
                v.len(),
                self.spin
            )));
        }
        Ok(self.action_matrix(x).mul_vec(v))
    }

    /// `<F^m j | F^m j>` for the form with `<j|j> = 1` and `E` adjoint to `F`.
    pub fn norm(&self, m: u32) -> Rational {
        let two_j = self.spin.twice() as i64;
        (1..=m as i64).fold(Rational::one(), |acc, i| acc * int(i * (two_j - i + 1)))
    }
}

/// Applies `g` to `v` in L(j), validating the spin.
pub fn finite_module_action(j: &Rational, g: &Sl2Element, v: &[Rational]) -> Result<Vec<Rational>> {
    FiniteModule::new(Spin::from_rational(j)?).apply(g, v)
}

/// An element `sqrt(norm_factor) * direction` of sl2 tensored with C.
///
/// `norm_factor` may be negative, which encodes a factor of `i`; products of
/// two such elements with each other stay rational, which is all the
/// Casimir-type expressions ever need.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthonormalElement {
    pub norm_factor: Rational,
    pub direction: Sl2Element,
}

impl OrthonormalElement {
    /// `(self|self)`, which is rational.
    pub fn self_pairing(&self) -> Rational {
        &self.norm_factor * killing_form(&self.direction, &self.direction)
    }
}

/// `H/sqrt2, (E+F)/sqrt2, i(E-F)/sqrt2`, orthonormal for `Tr(XY)`.
pub fn orthonormal_basis() -> [OrthonormalElement; 3] {
    let half = rat(1, 2);
    [
        OrthonormalElement {
            norm_factor: half.clone(),
            direction: Generator::H.element(),
        },
        OrthonormalElement {
            norm_factor: half.clone(),
            direction: Sl2Element::new(int(1), int(0), int(1)),
        },
        OrthonormalElement {
            norm_factor: -half,
            direction: Sl2Element::new(int(1), int(0), int(-1)),
        },
    ]
}

/// Coefficients `C[a][b]` with `sum_a X_a (x) X_a = sum_{a,b} C[a][b] g_a (x) g_b`
/// in the E, H, F basis.
pub fn casimir_tensor() -> [[Rational; 3]; 3] {
    let mut c: [[Rational; 3]; 3] = Default::default();
    for x in orthonormal_basis() {
        for (a, ca) in x.direction.terms() {
            for (b, cb) in x.direction.terms() {
                c[a.index()][b.index()] += &x.norm_factor * ca * cb;
            }
        }
    }
    c
}

/// The closed real form of `sum_a X_a X_a`: `(1/2)H H + E F + F E`, as
/// `(coefficient, left, right)` triples.
pub fn casimir_terms() -> [(Rational, Generator, Generator); 3] {
    [
        (rat(1, 2), Generator::H, Generator::H),
        (int(1), Generator::E, Generator::F),
        (int(1), Generator::F, Generator::E),
    ]
}
