//! Property tests for the decomposition algorithms, the classic problems,
//! the multivariate reconstruction and the instance generator.

use num_traits::Zero;
use proptest::prelude::*;

use affpow::classic::{expand_waring, WaringResult};
use affpow::decompose::decompose_with;
use affpow::multi::AffineChange;
use affpow::{
    check_conditions, decompose_auto, decompose_distinct_nodes, expand, find_min_sde, generate, multi_build,
    project_to_axis, waring_decompose, AffineTerm, AlgorithmTag, BlackBox, Decomposition, Error, InstanceSpec,
    LinearForm, MultiDecomposition, MultiTerm, Rational, Regime, Sde, UniPoly,
};

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn regime_and_tag() -> impl Strategy<Value = (Regime, AlgorithmTag, usize, bool)> {
    prop_oneof![
        (1usize..=3).prop_map(|s| (Regime::BigExponents, AlgorithmTag::BigExponents, s, false)),
        (1usize..=2).prop_map(|s| (Regime::DistinctNodes, AlgorithmTag::DistinctNodes, s, false)),
        (2usize..=3).prop_map(|s| (Regime::BigGaps, AlgorithmTag::BigGaps, s, true)),
        (0usize..=2).prop_map(|d| (Regime::SmallIntervals { delta: d }, AlgorithmTag::SmallIntervals, 2, d > 0)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn planted_round_trip((regime, tag, s, rep) in regime_and_tag(), seed in 0u64..10_000) {
        let spec = InstanceSpec::new(s, seed).with_exponents(0, 70, 0).with_repeated_nodes(rep);
        let inst = generate(&spec, regime).unwrap();
        prop_assert!(check_conditions(&inst.truth, &[regime.criterion()]).all_passed());
        let got = decompose_with(&inst.poly, tag).unwrap();
        prop_assert_eq!(&got, &inst.truth);
        // returned exponents stay below deg f + s²/2
        let deg = inst.poly.degree().unwrap();
        let n = got.len();
        prop_assert!(got.terms().iter().all(|t| 2 * t.exponent < 2 * deg + n * n));
    }

    #[test]
    fn every_success_reexpands(c in prop::collection::vec(-4i64..=4, 2..=14)) {
        let f = UniPoly::from_ints(&c);
        prop_assume!(!f.is_zero());
        for tag in [AlgorithmTag::BigExponents, AlgorithmTag::BigGaps, AlgorithmTag::DistinctNodes, AlgorithmTag::SmallIntervals] {
            if let Ok(d) = decompose_with(&f, tag) {
                prop_assert_eq!(expand(&d), f.clone());
            }
        }
        if let Ok((d, _)) = decompose_auto(&f) {
            prop_assert_eq!(expand(&d), f.clone());
        }
    }

    #[test]
    fn distinct_nodes_stays_rational(seed in 0u64..10_000, s in 1usize..=2) {
        let inst = generate(&InstanceSpec::new(s, seed).with_exponents(0, 60, 0), Regime::DistinctNodes).unwrap();
        let r = decompose_distinct_nodes(&inst.poly);
        prop_assert!(!matches!(r, Err(Error::IrrationalNodeDetected)));
        prop_assert_eq!(r.unwrap(), inst.truth);
    }

    #[test]
    fn decomposition_json_round_trip(ts in prop::collection::vec((-20i64..20, -9i64..9, 1i64..4, 0usize..30), 0..6)) {
        let d = Decomposition::new(ts.into_iter().map(|(c, n, den, e)| {
            AffineTerm::new(q(c), Rational::new(n.into(), den.into()), e)
        }));
        let s = serde_json::to_string(&d).unwrap();
        prop_assert_eq!(serde_json::from_str::<Decomposition>(&s).unwrap(), d);
    }

    #[test]
    fn sde_json_round_trip(c in prop::collection::vec(-5i64..=5, 2..=10), shift in 0usize..=1) {
        let f = UniPoly::from_ints(&c);
        prop_assume!(f.degree().unwrap_or(0) >= 1);
        let s = find_min_sde(&f, shift, f.degree().unwrap() + 1).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        prop_assert_eq!(serde_json::from_str::<Sde>(&j).unwrap(), s);
    }
}

fn waring_instance() -> impl Strategy<Value = (UniPoly, usize)> {
    (6usize..=24).prop_flat_map(|d| {
        let max_s = (1..=d).take_while(|s| 3 * s * s <= 2 * d).last().unwrap();
        (Just(d), prop::sample::subsequence((-9i64..=9).collect::<Vec<_>>(), 1..=max_s), prop::collection::vec(1i64..=9, max_s))
            .prop_map(|(d, nodes, cs)| {
                let f = nodes.iter().zip(&cs).fold(UniPoly::zero(), |acc, (&a, &c)| &acc + &UniPoly::affine_power(&q(a), d).scale(&q(c)));
                (f, nodes.len())
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn waring_minimal_order_is_rank((f, s) in waring_instance()) {
        let d = f.degree().unwrap();
        prop_assert_eq!(find_min_sde(&f, 0, d + 1).unwrap().order(), s);
        let r = waring_decompose(&f).unwrap();
        prop_assert_eq!(r.rank(), Some(s));
        prop_assert_eq!(expand_waring(&r).unwrap(), f.clone());
        // inside the big-exponents regime too: both routes agree
        if 2 * d > 5 * s * s {
            let (auto, _) = decompose_auto(&f).unwrap();
            let WaringResult::Decomposed { terms, degree } = r else { unreachable!() };
            let as_dec = Decomposition::new(terms.into_iter().map(|t| AffineTerm::new(t.coeff, t.node, degree)));
            prop_assert_eq!(auto, as_dec);
        }
    }
}

fn form_strategy(n: usize) -> impl Strategy<Value = LinearForm> {
    (-4i64..=4, prop::collection::vec(-4i64..=4, n))
        .prop_filter_map("nonconstant", |(c, a)| {
            let f = LinearForm::new(q(c), a.into_iter().map(q).collect());
            f.is_nonconstant().then_some(f)
        })
}

fn multi_instance() -> impl Strategy<Value = MultiDecomposition> {
    (2usize..=3).prop_flat_map(|n| {
        (form_strategy(n), form_strategy(n), 11usize..=14, 11usize..=14, 1i64..=4, 1i64..=4)
            .prop_filter_map("independent forms", move |(a, b, ea, eb, ca, cb)| {
                if a.is_proportional(&b) {
                    return None;
                }
                let ts = vec![MultiTerm::new(q(ca), a, ea).ok()?, MultiTerm::new(q(-cb), b, eb).ok()?];
                MultiDecomposition::new(n, ts).ok()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn multi_essential_round_trip(truth in multi_instance(), seed in 0u64..1000) {
        let f = truth.expand();
        let bb = BlackBox::from_multipoly(f.clone());
        let got = multi_build(&bb, seed, AlgorithmTag::BigExponents, 5).unwrap();
        prop_assert_eq!(&got, &truth);
        prop_assert_eq!(got.expand(), f);
        let again = multi_build(&bb, seed, AlgorithmTag::BigExponents, 5).unwrap();
        prop_assert_eq!(&again, &got);
        let j = serde_json::to_string(&got).unwrap();
        prop_assert_eq!(serde_json::from_str::<MultiDecomposition>(&j).unwrap(), got);
    }
}

proptest! {
    #[test]
    fn projection_query_count(truth in multi_instance(), axis in 0usize..2) {
        let bb = BlackBox::from_multipoly(truth.expand());
        let before = bb.queries();
        let g = project_to_axis(&bb, &AffineChange::identity(truth.nvars()), axis).unwrap();
        prop_assert_eq!(bb.queries() - before, bb.degree_bound() as u64 + 1);
        // x ↦ f(x e_axis) evaluated directly
        for x in [-2i64, 3, 7] {
            let mut p = vec![Rational::zero(); truth.nvars()];
            p[axis] = q(x);
            prop_assert_eq!(g.eval(&q(x)), truth.eval(&p).unwrap());
        }
    }

    #[test]
    fn generator_certifies((regime, _, s, rep) in regime_and_tag(), seed in 0u64..100_000) {
        let inst = generate(&InstanceSpec::new(s, seed).with_exponents(0, 90, 0).with_repeated_nodes(rep), regime).unwrap();
        prop_assert!(check_conditions(&inst.truth, &[regime.criterion()]).all_passed());
        prop_assert_eq!(inst.truth.len(), s);
        prop_assert_eq!(expand(&inst.truth), inst.poly);
    }
}
