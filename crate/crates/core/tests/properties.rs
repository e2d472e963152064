use freeconv::catalog::{atomic_moments, MeasureSpec};
use freeconv::conv::{commutator, free_add_seq, free_mult_seq, MultMethod};
use freeconv::idclass::{bp_boolean, cfp_seq, lambda_inv, lambda_map, main3_factor, ClassicalTriplet, FreeTriplet, LevyMeasure};
use freeconv::ncpart::{
    boolean_cumulants_from_moments, catalan, enumerate_nc, free_cumulants_from_moments, free_mult_moments, kreweras,
    moments_from_boolean_cumulants, moments_from_free_cumulants,
};
use freeconv::verify::gen;
use freeconv::{rat, Rational, SeqN};
use num_traits::Zero;
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| rat(p, q))
}

fn rat_seq(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec(small_rat(), n)
}

fn squared(atoms: &[(Rational, Rational)]) -> Vec<(Rational, Rational)> {
    atoms.iter().map(|(x, w)| (x.clone() * x.clone(), w.clone())).collect()
}

fn free_moments(kappa: &SeqN<Rational>) -> SeqN<Rational> {
    moments_from_free_cumulants(kappa).unwrap()
}

#[test]
fn nc_counts_and_kreweras_sizes() {
    let cat = catalan(8);
    for n in 1..=8 {
        let all = enumerate_nc(n).unwrap();
        assert_eq!(all.len() as u128, cat[n]);
        for p in &all {
            let k = kreweras(p).unwrap();
            assert!(k.is_noncrossing());
            assert_eq!(p.len() + k.len(), n + 1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn free_and_boolean_round_trips(k in rat_seq(9), r in rat_seq(9)) {
        let k = SeqN::free_cumulants(k);
        prop_assert_eq!(free_cumulants_from_moments(&free_moments(&k)).unwrap(), k);
        let r = SeqN::boolean_cumulants(r);
        prop_assert_eq!(boolean_cumulants_from_moments(&moments_from_boolean_cumulants(&r).unwrap()).unwrap(), r);
    }

    #[test]
    fn free_addition_is_commutative_on_moments(a in rat_seq(7), b in rat_seq(7)) {
        let (a, b) = (SeqN::free_cumulants(a), SeqN::free_cumulants(b));
        prop_assert_eq!(free_add_seq(&a, &b).unwrap(), free_add_seq(&b, &a).unwrap());
    }

    #[test]
    fn commutator_ignores_odd_cumulants(seed in any::<u64>(), odd1 in rat_seq(4), odd2 in rat_seq(4)) {
        let mut rng = gen::rng(seed);
        let n = 8;
        let k1 = gen::even_cumulants(&mut rng, n);
        let k2 = gen::even_cumulants(&mut rng, n);
        let base = commutator(&k1, &k2, n).unwrap();
        let (mut p1, mut p2) = (k1.clone(), k2.clone());
        for (i, j) in (0..n).step_by(2).enumerate() {
            p1.values[j] = odd1[i].clone();
            p2.values[j] = odd2[i].clone();
        }
        prop_assert_eq!(&commutator(&p1, &p2, n).unwrap(), &base);
        prop_assert!(base.values.iter().step_by(2).all(|v| v.is_zero()));
        prop_assert_eq!(commutator(&k2, &k1, n).unwrap(), base);
    }

    #[test]
    fn boolean_bercovici_pata_is_multiplicative(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let n = 6;
        let mu = atomic_moments(&gen::positive_atomic(&mut rng), n);
        let nu = atomic_moments(&gen::positive_atomic(&mut rng), n);
        let lhs = free_moments(&bp_boolean(&free_mult_moments(&mu, &nu).unwrap()).unwrap());
        let rhs = free_mult_moments(
            &free_moments(&bp_boolean(&mu).unwrap()),
            &free_moments(&bp_boolean(&nu).unwrap()),
        )
        .unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn main3_recovers_squared_jump_law(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let lambda = gen::rate(&mut rng);
        let rho = gen::symmetric_atomic(&mut rng);
        let n = 6;
        let kappa = cfp_seq(&lambda, &atomic_moments(&rho, 2 * n)).unwrap();
        let want = cfp_seq(&lambda, &atomic_moments(&squared(&rho), n)).unwrap();
        prop_assert_eq!(main3_factor(&kappa).unwrap(), want);
    }

    #[test]
    fn square_of_semicircle_product(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let n = 6;
        let nu = atomic_moments(&gen::positive_atomic(&mut rng), 2 * n);
        let w = SeqN::moments((1..=2 * n).map(|k| if k % 2 == 1 { rat(0, 1) } else { rat(catalan(n)[k / 2] as i64, 1) }).collect());
        let prod = free_mult_moments(&nu, &w).unwrap();
        let sq = SeqN::moments(prod.values.iter().skip(1).step_by(2).cloned().collect());
        let nu_n = nu.truncate(n).unwrap();
        let m = SeqN::moments((1..=n).map(|k| rat(catalan(n)[k] as i64, 1)).collect());
        let rhs = free_mult_moments(&free_mult_moments(&nu_n, &nu_n).unwrap(), &m).unwrap();
        prop_assert_eq!(sq, rhs);
    }

    #[test]
    fn mult_methods_agree(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let n = 6;
        let mu = atomic_moments(&gen::positive_atomic(&mut rng), n);
        let nu = atomic_moments(&gen::positive_atomic(&mut rng), n);
        prop_assert_eq!(
            free_mult_seq(&mu, &nu, MultMethod::Combinatorial).unwrap(),
            free_mult_seq(&mu, &nu, MultMethod::Series).unwrap()
        );
    }

    #[test]
    fn lambda_is_a_bijection(eta in -5.0f64..5.0, a in 0.0f64..3.0, x in 0.1f64..4.0, w in 0.1f64..2.0) {
        let t = ClassicalTriplet { eta, a, levy: LevyMeasure::atomic(vec![(x, w), (-x, w)]).unwrap() };
        prop_assert_eq!(lambda_inv(&lambda_map(&t)), t.clone());
        let f = FreeTriplet::new(eta, a, t.levy.clone()).unwrap();
        prop_assert_eq!(lambda_map(&lambda_inv(&f)), f);
    }

    #[test]
    fn measure_spec_json_round_trip(start in -5.0f64..5.0, steps in proptest::collection::vec((0.01f64..2.0, 0.1f64..1.0), 1..5)) {
        let total: f64 = steps.iter().map(|a| a.1).sum();
        let mut x = start;
        let atoms: Vec<(f64, f64)> = steps.into_iter().map(|(dx, w)| { x += dx; (x, w / total) }).collect();
        let spec = MeasureSpec::atomic(atoms).unwrap();
        let back: MeasureSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        prop_assert_eq!(back, spec);
    }
}
