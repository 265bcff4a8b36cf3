use aromakit::acceptance::{leibniz_failures, FormSampler};
use aromakit::algebra::{d_h, d_v, euler_estar, interior_euler, FormCombo, Q};
use aromakit::evaldiff::{elementary_differential, random_field};
use aromakit::forest::generate;
use aromakit::homotopy::{h_h, h_v, ibp_homotopy_with, PickOrder};
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 32, ..ProptestConfig::default() }
}

fn sample(seed: u64, order: usize, roots: usize, p: usize) -> Option<FormCombo> {
    FormSampler::new(seed).form(order, roots, p, false).filter(|c| !c.is_zero())
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn dh_squares_to_zero(seed: u64, order in 2usize..=5, roots in 2usize..=3, p in 0usize..=1) {
        if let Some(c) = sample(seed, order, roots, p) {
            let once = d_h(&c).unwrap();
            prop_assert!(once.is_zero() || d_h(&once).unwrap().is_zero());
        }
    }

    #[test]
    fn dv_squares_to_zero(seed: u64, order in 1usize..=5, roots in 0usize..=2, p in 0usize..=2) {
        if let Some(c) = sample(seed, order, roots, p) {
            let once = d_v(&c).unwrap();
            prop_assert!(once.is_zero() || d_v(&once).unwrap().is_zero());
        }
    }

    #[test]
    fn derivatives_commute(seed: u64, order in 1usize..=5, roots in 1usize..=2, p in 0usize..=1) {
        if let Some(c) = sample(seed, order, roots, p) {
            let hv = d_h(&c).unwrap();
            let lhs = if hv.is_zero() { hv } else { d_v(&hv).unwrap() };
            let vh = d_v(&c).unwrap();
            let rhs = if vh.is_zero() { vh } else { d_h(&vh).unwrap() };
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn vertical_homotopy(seed: u64, order in 1usize..=5, roots in 0usize..=2, p in 1usize..=2) {
        if let Some(c) = sample(seed, order, roots, p) {
            let a = d_v(&h_v(&c).unwrap()).unwrap();
            let b = h_v(&d_v(&c).unwrap()).unwrap();
            prop_assert_eq!(&a + &b, c);
        }
    }

    #[test]
    fn horizontal_homotopy(seed: u64, order in 1usize..=5, roots in 1usize..=2, p in 0usize..=2) {
        if let Some(c) = sample(seed, order, roots, p) {
            let a = d_h(&h_h(&c).unwrap()).unwrap();
            let b = h_h(&d_h(&c).unwrap()).unwrap();
            prop_assert_eq!(&a + &b, c);
        }
    }

    #[test]
    fn variational_derivative_kills_divergences(seed: u64, order in 1usize..=5) {
        if let Some(c) = sample(seed, order, 1, 0) {
            prop_assert!(euler_estar(&d_h(&c).unwrap()).unwrap().is_zero());
        }
    }

    #[test]
    fn interior_euler_is_a_projection(seed: u64, order in 1usize..=5, p in 1usize..=2) {
        if let Some(c) = sample(seed, order, 0, p) {
            let i = interior_euler(&c).unwrap();
            prop_assert_eq!(interior_euler(&i).unwrap(), i);
        }
        if let Some(c) = sample(seed, order, 1, p) {
            let d = d_h(&c).unwrap();
            prop_assert!(d.is_zero() || interior_euler(&d).unwrap().is_zero());
        }
    }

    #[test]
    fn integration_by_parts_strategies(seed: u64, order in 1usize..=4, p in 0usize..=1) {
        if let Some(c) = sample(seed, order, 0, p) {
            let (first, rest1) = ibp_homotopy_with(&c, PickOrder::First).unwrap();
            let (last, rest2) = ibp_homotopy_with(&c, PickOrder::Last).unwrap();
            prop_assert!(rest1.is_zero() && rest2.is_zero());
            let gap = &first - &last;
            prop_assert!(gap.is_zero() || d_h(&gap).unwrap().is_zero());
        }
    }

    #[test]
    fn leibniz_rules(seed: u64, order in 2usize..=5, roots in 0usize..=2, p in 0usize..=1, pick: prop::sample::Index) {
        let pool = generate(order, roots.min(order), p, false).unwrap();
        prop_assume!(!pool.is_empty());
        let f = &pool[(seed as usize) % pool.len()];
        let nodes: Vec<usize> = (0..f.len()).filter(|&v| (1..=4).contains(&f.preds(v).len())).collect();
        prop_assume!(!nodes.is_empty());
        let v = nodes[pick.index(nodes.len())];
        let failures = leibniz_failures(f, v);
        prop_assert!(failures.is_empty(), "{} at {}: {:?}", f, v, failures);
    }

    #[test]
    fn elementary_differentials_are_linear(seed: u64, order in 1usize..=3, a in -3i64..=3) {
        let c1 = sample(seed, order, 1, 0);
        let c2 = sample(seed.wrapping_add(1), order, 1, 0);
        if let (Some(c1), Some(c2)) = (c1, c2) {
            let f = random_field(2, 2, seed).unwrap();
            let alpha = Q::from_integer(a.into());
            let combo = &c1.scale(&alpha) + &c2;
            let lhs = elementary_differential(&combo, &f).unwrap();
            let x = elementary_differential(&c1, &f).unwrap();
            let y = elementary_differential(&c2, &f).unwrap();
            for i in 0..2 {
                let want = x.get(&[i]).scale(&alpha).add(y.get(&[i]));
                prop_assert_eq!(lhs.get(&[i]), &want);
            }
        }
    }

    #[test]
    fn elementary_differentials_multiply(seed: u64, s1 in 1usize..=3, s2 in 1usize..=2) {
        let a = generate(s1, 0, 0, false).unwrap();
        let t = generate(s2, 1, 0, false).unwrap();
        let a = &a[(seed as usize) % a.len()];
        let t = &t[(seed as usize / 7) % t.len()];
        let f = random_field(2, 2, seed).unwrap();
        let joint = elementary_differential(&FormCombo::from_forest(&a.juxtapose(t)), &f).unwrap();
        let fa = elementary_differential(&FormCombo::from_forest(a), &f).unwrap();
        let ft = elementary_differential(&FormCombo::from_forest(t), &f).unwrap();
        for i in 0..2 {
            prop_assert_eq!(joint.get(&[i]), &fa.get(&[]).mul(ft.get(&[i])));
        }
    }
}
