use num_traits::{One, Zero};
use proptest::prelude::*;

use sle_coset::affine::AffineModule;
use sle_coset::coset::coset_central_charge;
use sle_coset::linalg::QMatrix;
use sle_coset::loewner::{compose, der_coefficients, exp_derivation, invert, q_operator, AutSeries};
use sle_coset::scalar::{format_rational, int, parse_rational, rat};
use sle_coset::series::Laurent;
use sle_coset::sl2::{generator_bracket, generator_form, Generator, Spin};
use sle_coset::stats::Moments;
use sle_coset::virasoro::{kac_weight, minimal_central_charge, partitions, VermaModule, VirVector};
use sle_coset::{LinComb, Rational};

fn rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn series(order: usize) -> impl Strategy<Value = AutSeries<Rational>> {
    prop::collection::vec(rational(), order + 1).prop_map(AutSeries::from_coeffs)
}

fn generator() -> impl Strategy<Value = Generator> {
    prop::sample::select(Generator::ALL.to_vec())
}

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 40,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn virasoro_relations_hold_in_verma(c in rational(), h in rational(), m in -3i64..=3, n in -3i64..=3, grade in 0usize..=3, pick in 0usize..8) {
        let module = VermaModule::new(c.clone(), h, 8);
        let basis = partitions(grade);
        let v = VirVector::basis(basis[pick % basis.len()].clone());
        let lhs = module.apply_raw(m, &module.apply_raw(n, &v)).sub(&module.apply_raw(n, &module.apply_raw(m, &v)));
        let mut rhs = module.apply_raw(m + n, &v).scaled(&int(m - n));
        if m + n == 0 {
            rhs.add_scaled(&v, &(c * int(m * m * m - m) / int(12)));
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn shapovalov_form_is_contravariant(c in rational(), h in rational(), n in 1i64..=3, pick_u in 0usize..8, pick_v in 0usize..8, grade in 0usize..=3) {
        let module = VermaModule::new(c, h, 6);
        let lower = partitions(grade);
        let upper = partitions(grade + n as usize);
        let u = VirVector::basis(lower[pick_u % lower.len()].clone());
        let v = VirVector::basis(upper[pick_v % upper.len()].clone());
        prop_assert_eq!(module.pair(&module.apply_raw(-n, &u), &v), module.pair(&u, &module.apply_raw(n, &v)));
    }

    #[test]
    fn affine_currents_satisfy_bracket(k in rational(), x in generator(), y in generator(), m in -2i32..=2, n in -2i32..=2, half in any::<bool>()) {
        let spin = if half { Spin::HALF } else { Spin::ZERO };
        let module = AffineModule::universal(k.clone(), spin, 6);
        let mut v = module.highest_weight();
        v = module.apply_raw(Generator::F, -1, &v);
        v = module.apply_raw(Generator::H, -1, &v);
        let lhs = module.apply_raw(x, m, &module.apply_raw(y, n, &v)).sub(&module.apply_raw(y, n, &module.apply_raw(x, m, &v)));
        let mut rhs = LinComb::zero();
        for (g, c) in generator_bracket(x, y).terms() {
            if !c.is_zero() {
                rhs.add_scaled(&module.apply_raw(g, m + n, &v), c);
            }
        }
        if m + n == 0 {
            rhs.add_scaled(&v, &(int(m as i64 * generator_form(x, y)) * &k));
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn composition_is_associative(a in series(4), b in series(4), c in series(4)) {
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inverse_is_two_sided(a in series(5)) {
        let inv = invert(&a);
        let id = AutSeries::identity(5);
        prop_assert_eq!(compose(&a, &inv).unwrap(), id.clone());
        prop_assert_eq!(compose(&inv, &a).unwrap(), id);
    }

    #[test]
    fn derivation_coefficients_reexponentiate(a in series(5)) {
        let v = der_coefficients(&a);
        prop_assert_eq!(exp_derivation(&v, 5), a);
    }

    #[test]
    fn q_is_a_representation(a in series(3), b in series(3), c in rational(), h in rational()) {
        let module = VermaModule::new(c, h, 4);
        let prod = compose(&a, &b).unwrap();
        let q = q_operator(&prod, &module).unwrap();
        prop_assert_eq!(q, q_operator(&a, &module).unwrap().mul(&q_operator(&b, &module).unwrap()));
        let id = q_operator(&AutSeries::identity(3), &module).unwrap();
        prop_assert_eq!(id, QMatrix::identity(module.dim_up_to_cutoff()));
    }

    #[test]
    fn laurent_reciprocal_inverts(coeffs in prop::collection::vec(rational(), 1..7), lead in -3i32..=3) {
        prop_assume!(!coeffs[0].is_zero());
        let f = Laurent::new(lead, coeffs.clone());
        let one = f.mul(&f.recip());
        prop_assert_eq!(one.lead(), 0);
        for (i, x) in one.coeffs().iter().enumerate() {
            prop_assert_eq!(x.is_one(), i == 0);
            prop_assert!(i == 0 || x.is_zero());
        }
    }

    #[test]
    fn coset_charge_is_minimal(p in 2i64..=12, q in 1i64..=8) {
        prop_assume!(num_integer::gcd(p, q) == 1);
        let k = rat(p, q) - int(2);
        prop_assert_eq!(coset_central_charge(&k).unwrap(), minimal_central_charge(p, p + q));
    }

    #[test]
    fn kac_table_symmetry(p in 2i64..=9, q in 2i64..=9, r in 1i64..=8, s in 1i64..=8) {
        prop_assume!(num_integer::gcd(p, q) == 1 && r < p && s < q);
        prop_assert_eq!(kac_weight(p, q, r, s), kac_weight(p, q, p - r, q - s));
    }

    #[test]
    fn rational_strings_round_trip(x in rational()) {
        prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
    }

    #[test]
    fn moment_merge_matches_sequential(xs in prop::collection::vec(-1e3f64..1e3, 2..60), split in 0usize..60) {
        let split = split % xs.len();
        let mut all = Moments::default();
        xs.iter().for_each(|&x| all.push(x));
        let (mut a, mut b) = (Moments::default(), Moments::default());
        xs[..split].iter().for_each(|&x| a.push(x));
        xs[split..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        prop_assert_eq!(a.n, all.n);
        prop_assert!((a.mean() - all.mean()).abs() <= 1e-9 * (1.0 + all.mean().abs()));
        prop_assert!((a.variance() - all.variance()).abs() <= 1e-7 * (1.0 + all.variance()));
    }
}
