//! Randomized algebraic laws for the arithmetic kernel: field axioms,
//! series ring axioms to tracked precision, derivation identities, the
//! blow-up substitution homomorphism, O-linearity of the p-curvature
//! operator, and the closed-form dimension bookkeeping.

use std::collections::BTreeMap;

use proptest::prelude::*;

use germ_core::biseries::BiSeries;
use germ_core::conn::ConnectionGerm;
use germ_core::dims::rr_dim;
use germ_core::parabolic::{classify_germ, Partition};
use germ_core::{FieldCtx, FieldElt, Series1};

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------

fn small_field() -> impl Strategy<Value = FieldCtx> {
    (prop_oneof![Just(5u64), Just(7u64)], 1usize..=2)
        .prop_map(|(p, m)| FieldCtx::canonical(p, m).expect("small fields exist"))
}

fn prime_field() -> impl Strategy<Value = FieldCtx> {
    prop_oneof![Just(5u64), Just(7u64)]
        .prop_map(|p| FieldCtx::prime(p).expect("prime fields exist"))
}

fn elt_in(ctx: &FieldCtx) -> impl Strategy<Value = FieldElt> {
    let ctx = ctx.clone();
    let order = ctx.order() as u64;
    (0..order).prop_map(move |i| ctx.element_from_index(i as u128))
}

fn series_in(ctx: &FieldCtx) -> impl Strategy<Value = Series1> {
    let ctx = ctx.clone();
    let order = ctx.order() as u64;
    (
        0i64..3,
        prop::collection::vec(0..order, 0..6),
        10i64..16,
    )
        .prop_map(move |(val, idx, prec)| {
            let coeffs: Vec<FieldElt> = idx
                .iter()
                .map(|&i| ctx.element_from_index(i as u128))
                .collect();
            Series1::new(ctx.clone(), val, coeffs, prec)
        })
}

fn biseries_in(ctx: &FieldCtx) -> impl Strategy<Value = BiSeries> {
    let ctx = ctx.clone();
    let order = ctx.order() as u64;
    (
        prop::collection::vec(((0i64..5, 0i64..5), 0..order), 0..8),
        8i64..14,
    )
        .prop_map(move |(entries, prec)| {
            let mut terms = BTreeMap::new();
            for ((i, j), c) in entries {
                terms.insert((i, j), ctx.element_from_index(c as u128));
            }
            BiSeries::new(ctx.clone(), terms, prec)
        })
}

fn s1_zero(s: &Series1) -> bool {
    s.is_zero_to_prec()
}

fn b_zero(b: &BiSeries) -> bool {
    b.is_zero_to_prec()
}

// ---------------------------------------------------------------------------
// Field axioms
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn field_inverse_roundtrip(ctx in small_field(), seed in any::<prop::sample::Index>()) {
        let order = ctx.order();
        let i = 1 + (seed.index((order - 1) as usize) as u128);
        let a = ctx.element_from_index(i);
        prop_assert!(!a.is_zero());
        let inv = a.inv().expect("nonzero elements invert");
        prop_assert!(a.mul(&inv).is_one());
    }

    #[test]
    fn frobenius_is_a_field_automorphism(ctx in small_field(),
                                         ia in any::<prop::sample::Index>(),
                                         ib in any::<prop::sample::Index>()) {
        let order = ctx.order() as usize;
        let a = ctx.element_from_index(ia.index(order) as u128);
        let b = ctx.element_from_index(ib.index(order) as u128);
        prop_assert_eq!(a.mul(&b).frobenius(), a.frobenius().mul(&b.frobenius()));
        prop_assert_eq!(a.add(&b).frobenius(), a.frobenius().add(&b.frobenius()));
        prop_assert_eq!(a.frobenius().frobenius_inv(), a);
    }
}

// ---------------------------------------------------------------------------
// Series ring axioms and derivations
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn series_ring_axioms(ctx in prime_field().prop_flat_map(|c| {
        (Just(c.clone()), series_in(&c), series_in(&c), series_in(&c))
    })) {
        let (_, a, b, c) = ctx;
        prop_assert!(s1_zero(&a.mul(&b).sub(&b.mul(&a))));
        prop_assert!(s1_zero(&a.mul(&b).mul(&c).sub(&a.mul(&b.mul(&c)))));
        prop_assert!(s1_zero(&a.mul(&b.add(&c)).sub(&a.mul(&b).add(&a.mul(&c)))));
    }

    #[test]
    fn biseries_ring_axioms(data in small_field().prop_flat_map(|c| {
        (Just(c.clone()), biseries_in(&c), biseries_in(&c), biseries_in(&c))
    })) {
        let (_, a, b, c) = data;
        prop_assert!(b_zero(&a.mul(&b).sub(&b.mul(&a))));
        prop_assert!(b_zero(&a.mul(&b).mul(&c).sub(&a.mul(&b.mul(&c)))));
        prop_assert!(b_zero(&a.mul(&b.add(&c)).sub(&a.mul(&b).add(&a.mul(&c)))));
    }

    #[test]
    fn leibniz_rule_one_variable(data in prime_field().prop_flat_map(|c| {
        (Just(c.clone()), series_in(&c), series_in(&c))
    })) {
        let (_, s, t) = data;
        let lhs = s.mul(&t).derive_x();
        let rhs = s.derive_x().mul(&t).add(&s.mul(&t.derive_x()));
        prop_assert!(s1_zero(&lhs.sub(&rhs)));
    }

    #[test]
    fn leibniz_rule_two_variables(data in small_field().prop_flat_map(|c| {
        (Just(c.clone()), biseries_in(&c), biseries_in(&c))
    })) {
        let (_, f, g) = data;
        let dx = f.mul(&g).derive_x();
        let dx_rhs = f.derive_x().mul(&g).add(&f.mul(&g.derive_x()));
        prop_assert!(b_zero(&dx.sub(&dx_rhs)));
        let dy = f.mul(&g).derive_y();
        let dy_rhs = f.derive_y().mul(&g).add(&f.mul(&g.derive_y()));
        prop_assert!(b_zero(&dy.sub(&dy_rhs)));
    }

    #[test]
    fn p_fold_derivative_vanishes(data in prime_field().prop_flat_map(|c| {
        (Just(c.clone()), series_in(&c), biseries_in(&c))
    })) {
        let (ctx, s, f) = data;
        let p = ctx.p() as usize;
        let mut ds = s;
        let mut df = f;
        for _ in 0..p {
            ds = ds.derive_x();
            df = df.derive_x();
        }
        prop_assert!(s1_zero(&ds));
        prop_assert!(b_zero(&df));
    }

    #[test]
    fn blowup_substitution_is_a_ring_map(data in small_field().prop_flat_map(|c| {
        (Just(c.clone()), biseries_in(&c), biseries_in(&c))
    })) {
        let (_, f, g) = data;
        let prod = f.mul(&g).substitute_blowup();
        let rhs = f.substitute_blowup().mul(&g.substitute_blowup());
        prop_assert!(b_zero(&prod.sub(&rhs)));
        let sum = f.add(&g).substitute_blowup();
        let sum_rhs = f.substitute_blowup().add(&g.substitute_blowup());
        prop_assert!(b_zero(&sum.sub(&sum_rhs)));
    }

    #[test]
    fn unit_inversion_round_trips(data in small_field().prop_flat_map(|c| {
        (Just(c.clone()), series_in(&c), biseries_in(&c), 1..u64::MAX)
    })) {
        let (ctx, s, f, raw) = data;
        let unit = ctx.element_from_index(1 + (raw as u128 % (ctx.order() - 1)));
        let s = Series1::from_poly(&ctx, vec![unit.clone()]).add(&s.shift(1).truncate(12));
        let f = BiSeries::constant(unit).add(&f.mul_monomial(1, 0).truncate(10));
        let si = s.invert_unit().expect("unit constant term");
        prop_assert!(s1_zero(&s.mul(&si).sub(&Series1::one(&ctx))));
        let fi = f.invert_unit().expect("unit constant term");
        prop_assert!(b_zero(&f.mul(&fi).sub(&BiSeries::constant(ctx.one()))));
    }

    #[test]
    fn char_p_power_is_the_frobenius_endomorphism(data in small_field().prop_flat_map(|c| {
        (Just(c.clone()), biseries_in(&c), biseries_in(&c))
    })) {
        let (ctx, f, g) = data;
        let p = ctx.p() as usize;
        // Endomorphism laws.
        prop_assert!(b_zero(&f.add(&g).pow_char().sub(&f.pow_char().add(&g.pow_char()))));
        prop_assert!(b_zero(&f.mul(&g).pow_char().sub(&f.pow_char().mul(&g.pow_char()))));
        // Agreement with the p-fold product.
        let mut plain = BiSeries::constant(ctx.one());
        for _ in 0..p {
            plain = plain.mul(&f);
        }
        prop_assert!(b_zero(&f.pow_char().sub(&plain)));
    }
}

// ---------------------------------------------------------------------------
// p-curvature is O-linear (the matrix extraction depends on it)
// ---------------------------------------------------------------------------

fn poly_series(ctx: &FieldCtx, idx: &[u64], prec: i64) -> Series1 {
    let coeffs: Vec<FieldElt> = idx
        .iter()
        .map(|&i| ctx.element_from_index(i as u128 % ctx.order()))
        .collect();
    Series1::new(ctx.clone(), 0, coeffs, prec)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn p_curvature_commutes_with_function_multiplication(
        p in prop_oneof![Just(5u64), Just(7u64)],
        entries in prop::collection::vec(prop::collection::vec(0u64..49, 4), 4),
        fcoeffs in prop::collection::vec(0u64..49, 1..5),
        col in 0usize..2,
    ) {
        let ctx = FieldCtx::prime(p).expect("prime field");
        let prec = 12i64;
        let a: Vec<Vec<Series1>> = (0..2)
            .map(|i| (0..2).map(|j| poly_series(&ctx, &entries[2 * i + j], prec)).collect())
            .collect();
        let conn = ConnectionGerm::from_log(ctx.clone(), a).expect("log-form input");
        let f = poly_series(&ctx, &fcoeffs, prec);
        // (D^p - D) applied to f * e_col, computed operator-side.
        let mut v: Vec<Series1> = (0..2).map(|_| Series1::zero(&ctx, prec)).collect();
        v[col] = f.clone();
        let mut w = v.clone();
        for _ in 0..p {
            w = conn.apply_log_derivation(&w);
        }
        let dv = conn.apply_log_derivation(&v);
        // f * (matrix column), matrix-side.
        let psi = conn.p_curvature().psi;
        for i in 0..2 {
            let op_side = w[i].sub(&dv[i]);
            let mat_side = psi[i][col].mul(&f);
            prop_assert!(s1_zero(&op_side.sub(&mat_side)));
        }
    }

    #[test]
    fn rank_one_constant_curvature_is_the_artin_schreier_image(
        ctx_a in small_field().prop_flat_map(|c| (Just(c.clone()), elt_in(&c)))
    ) {
        let (ctx, a) = ctx_a;
        let p = ctx.p();
        let mat = vec![vec![Series1::from_poly(&ctx, vec![a.clone()]).truncate(10)]];
        let conn = ConnectionGerm::from_log(ctx.clone(), mat).expect("constant connection");
        let pc = conn.p_curvature();
        let expected = a.pow(p as u128).sub(&a);
        prop_assert_eq!(pc.residue[0][0].clone(), expected.clone());
        prop_assert!(s1_zero(&pc.psi[0][0].sub(&Series1::from_poly(&ctx, vec![expected]))));
    }
}

// ---------------------------------------------------------------------------
// Partitions, classification closure, and dimension bookkeeping
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn conjugation_is_an_involution(mut parts in prop::collection::vec(1usize..6, 1..5)) {
        parts.sort_unstable_by(|x, y| y.cmp(x));
        let lam = Partition::new(parts).expect("sorted positive parts");
        prop_assert_eq!(lam.conjugate().conjugate(), lam);
    }

    #[test]
    fn products_of_unit_branches_land_in_the_class(
        p in prop_oneof![Just(5u64), Just(7u64)],
        mut parts in prop::collection::vec(1usize..4, 1..4),
        consts in prop::collection::vec(1u64..5, 4),
    ) {
        parts.sort_unstable_by(|x, y| y.cmp(x));
        let ctx = FieldCtx::prime(p).expect("prime field");
        let lam = Partition::new(parts.clone()).expect("sorted positive parts");
        let mut f = BiSeries::constant(ctx.one());
        for (k, &l) in parts.iter().enumerate() {
            let c = ctx.from_scalar(consts[k]);
            let branch = BiSeries::monomial(ctx.one(), 0, l as i64)
                .add(&BiSeries::monomial(c, 1, 0));
            f = f.mul(&branch);
        }
        let class = classify_germ(&f.truncate(16), &lam).expect("staircase classification");
        prop_assert!(class.in_class);
    }

    #[test]
    fn dimension_drop_is_one_off_the_special_range(g in 2i64..7, d in 0i64..40) {
        // Away from the special range both consecutive values exist and
        // the difference is exactly one.
        if d > 2 * g - 2 && d - 1 > 2 * g - 2 {
            prop_assert_eq!(rr_dim(g, d).unwrap() - rr_dim(g, d - 1).unwrap(), 1);
        }
    }
}
