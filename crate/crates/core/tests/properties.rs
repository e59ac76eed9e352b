use fuzzysum::fuzzy::{eps_order_check, FuzzyNumber, Interval, LevelGrid};
use fuzzysum::schemes::{BetaGammaScheme, BuiltinScheme, LacunaryFormula, WeightSequence};
use fuzzysum::sequences::{
    AlternatingCrisp, CubeTriangularDecaying, Domain, FnSequence, FuzzyFunctionSequence,
    SquareIndicator, TriangularGrowing, TruncatedSquareIndicator,
};
use fuzzysum::summability::{
    absolute_partial, ordinary_partial, sp_count, sp_density, window_total, ModeParams,
};
use fuzzysum::tauberian::{
    identity_check, slowly_decreasing_check, slowly_decreasing_check_backward,
};
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 1000,
        ..ProptestConfig::default()
    }
}

// Multiples of 2^-10 below 2^12 in magnitude: sums and differences of a few
// of them are exact in f64.
fn dyadic(bound: i64) -> impl Strategy<Value = f64> {
    (-bound..=bound).prop_map(|v| v as f64 / 1024.0)
}

fn spread() -> impl Strategy<Value = f64> {
    (0i64..=4096).prop_map(|v| v as f64 / 1024.0)
}

fn ladder(levels: usize) -> impl Strategy<Value = FuzzyNumber> {
    (
        dyadic(1 << 22),
        spread(),
        prop::collection::vec((spread(), spread()), levels - 1),
    )
        .prop_map(|(lo, width, steps)| {
            let mut cuts = vec![Interval::new(lo, lo + width)];
            for (dl, dh) in steps {
                let top = *cuts.last().unwrap();
                cuts.push(Interval::new(top.lo - dl, top.hi + dh));
            }
            cuts.reverse();
            FuzzyNumber::from_cuts(cuts).unwrap()
        })
}

fn triple() -> impl Strategy<Value = (FuzzyNumber, FuzzyNumber, FuzzyNumber)> {
    prop_oneof![Just(2usize), Just(11), Just(101)]
        .prop_flat_map(|l| (ladder(l), ladder(l), ladder(l)))
}

fn quad() -> impl Strategy<Value = [FuzzyNumber; 4]> {
    prop_oneof![Just(2usize), Just(11), Just(101)]
        .prop_flat_map(|l| (ladder(l), ladder(l), ladder(l), ladder(l)))
        .prop_map(|(a, b, c, d)| [a, b, c, d])
}

fn is_valid(x: &FuzzyNumber) -> bool {
    FuzzyNumber::from_cuts(x.cuts().to_vec()).is_ok()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn metric_axioms((x, y, z) in triple()) {
        let dxy = x.distance(&y);
        prop_assert_eq!(dxy, y.distance(&x));
        prop_assert!(dxy >= 0.0);
        prop_assert_eq!(x.distance(&x), 0.0);
        prop_assert_eq!(dxy == 0.0, x.cuts() == y.cuts());
        prop_assert!(x.distance(&z) <= dxy + y.distance(&z));
    }

    #[test]
    fn scaling_multiplies_distance((x, y, _z) in triple(), c in -8.0f64..8.0) {
        let lhs = x.scale(c).distance(&y.scale(c));
        let rhs = c.abs() * x.distance(&y);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(f64::MIN_POSITIVE), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn translation_invariance_is_exact((x, y, z) in triple()) {
        prop_assert_eq!(x.add(&z).distance(&y.add(&z)), x.distance(&y));
    }

    #[test]
    fn subadditivity([x, y, z, w] in quad()) {
        prop_assert!(x.add(&z).distance(&y.add(&w)) <= x.distance(&y) + z.distance(&w));
    }

    #[test]
    fn eps_order_sides_agree((x, y, _z) in triple(), eps in 1i64..4096, at_boundary in any::<bool>()) {
        let eps = if at_boundary && x.distance(&y) > 0.0 { x.distance(&y) } else { eps as f64 / 1024.0 };
        let check = eps_order_check(&x, &y, eps).unwrap();
        prop_assert!(check.agrees(), "{:?} at eps {}", check, eps);
    }

    #[test]
    fn partial_order_laws((x, y, z) in triple(), shift in spread()) {
        prop_assert!(x.partial_leq(&x));
        if x.partial_leq(&y) && y.partial_leq(&x) {
            prop_assert_eq!(x.cuts(), y.cuts());
        }
        if x.partial_leq(&y) && y.partial_leq(&z) {
            prop_assert!(x.partial_leq(&z));
        }
        let up = x.translate(shift);
        let upper = up.translate(shift);
        prop_assert!(x.partial_leq(&up) && up.partial_leq(&upper) && x.partial_leq(&upper));
    }

    #[test]
    fn constructors_and_arithmetic_keep_nesting(
        (x, y, _z) in triple(),
        c in -8.0f64..8.0,
        r in -100.0f64..100.0,
        spreads in (0.0f64..10.0, 0.0f64..10.0),
    ) {
        prop_assert!(is_valid(&x.add(&y)));
        prop_assert!(is_valid(&x.scale(c)));
        prop_assert!(is_valid(&FuzzyNumber::crisp(r).unwrap()));
        prop_assert!(is_valid(&FuzzyNumber::triangular(r, spreads.0, spreads.1).unwrap()));
    }
}

fn scheme_pool() -> Vec<BetaGammaScheme> {
    vec![
        BetaGammaScheme::classical(),
        BetaGammaScheme::power(2).unwrap(),
        BetaGammaScheme::builtin(BuiltinScheme::Lacunary(LacunaryFormula::Pow2)).unwrap(),
        fuzzysum::parse_scheme("lambda:sqrt").unwrap(),
    ]
}

fn weight_pool() -> Vec<WeightSequence> {
    vec![
        WeightSequence::constant(1.0).unwrap(),
        fuzzysum::parse_weights("recip5").unwrap(),
        WeightSequence::harmonic_plus(),
    ]
}

fn family_pool() -> Vec<Box<dyn FuzzyFunctionSequence>> {
    vec![
        Box::new(SquareIndicator { m: 1.0 }),
        Box::new(TriangularGrowing),
        Box::new(CubeTriangularDecaying),
        Box::new(AlternatingCrisp),
        Box::new(TruncatedSquareIndicator { n: 16, m: 1.0 }),
    ]
}

/// Largest n whose window stays small enough for dense sums.
fn n_cap(scheme: &BetaGammaScheme) -> u64 {
    match scheme.label() {
        "pow:2" => 40,
        "lacunary:pow2" => 11,
        _ => 1500,
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn weighted_total_is_additive(w in 0usize..3, lo in 1u64..5000, len in 1u64..5000, cut in 0u64..5000) {
        let weights = &weight_pool()[w];
        let hi = lo + len;
        let m = lo + cut % len;
        let whole = weights.range_sum(lo, hi).unwrap();
        let split = weights.range_sum(lo, m).unwrap() + weights.range_sum(m + 1, hi).unwrap();
        prop_assert!((whole - split).abs() <= 1e-12 * whole);
    }

    #[test]
    fn unit_weights_count_the_window(s in 0usize..4, n in 1u64..5000) {
        let scheme = &scheme_pool()[s];
        let n = n.min(n_cap(scheme).max(40));
        let w = scheme.window(n).unwrap();
        let t = fuzzysum::weighted_total(scheme, &WeightSequence::constant(1.0).unwrap(), n).unwrap();
        prop_assert_eq!(t, (w.hi - w.lo + 1) as f64);
        prop_assert_eq!(scheme.dilate(1.0).unwrap().window(n).unwrap(), w);
    }

    #[test]
    fn order_monotonicity_in_theta(
        f in 0usize..5, s in 0usize..4, w in 0usize..3, n in 1u64..2000, xi in 0usize..5, pair in any::<bool>(),
    ) {
        let (theta, delta) = if pair { (0.3, 0.6) } else { (0.5, 1.0) };
        let fam = &family_pool()[f];
        let scheme = scheme_pool()[s].clone();
        let n = 1 + n % n_cap(&scheme);
        let x = 1.0 + xi as f64 * 0.25;
        let lim = fam.claimed_limit(x).unwrap();
        let p = ModeParams::new(theta, 0.1, scheme.clone(), weight_pool()[w].clone()).unwrap();
        let q = p.with_theta(delta).unwrap();
        let (_, total) = window_total(&p, n).unwrap();
        prop_assume!(total >= 1.0);
        let low = absolute_partial(fam.as_ref(), &lim, &q, n, x).unwrap();
        let high = absolute_partial(fam.as_ref(), &lim, &p, n, x).unwrap();
        prop_assert!(low <= high, "{} > {}", low, high);
    }

    #[test]
    fn ordinary_mean_is_dominated_by_absolute_mean(
        f in 0usize..5, s in 0usize..4, w in 0usize..3, n in 1u64..2000, xi in 0usize..5,
    ) {
        let fam = &family_pool()[f];
        let scheme = scheme_pool()[s].clone();
        let n = 1 + n % n_cap(&scheme);
        let x = 1.0 + xi as f64 * 0.25;
        let lim = fam.claimed_limit(x).unwrap();
        let p = ModeParams::new(1.0, 0.1, scheme, weight_pool()[w].clone()).unwrap();
        let mean = ordinary_partial(fam.as_ref(), &p, n, x).unwrap();
        let abs = absolute_partial(fam.as_ref(), &lim, &p, n, x).unwrap();
        let dist = mean.distance(&lim);
        prop_assert!(dist <= abs + 1e-12 * (1.0 + abs), "{} > {}", dist, abs);
    }

    #[test]
    fn linearity_bounds(
        f in 0usize..5, g in 0usize..5, c in -4.0f64..4.0, n in 1u64..400, xi in 0usize..5, theta in 0.1f64..=1.0,
    ) {
        let pool = family_pool();
        let x = 1.0 + xi as f64 * 0.25;
        let (ff, gg) = (&pool[f], &pool[g]);
        let (lf, lg) = (ff.claimed_limit(x).unwrap(), gg.claimed_limit(x).unwrap());
        let p = ModeParams::new(theta, 0.1, BetaGammaScheme::classical(), WeightSequence::harmonic_plus()).unwrap();
        let sf = absolute_partial(ff.as_ref(), &lf, &p, n, x).unwrap();
        let sg = absolute_partial(gg.as_ref(), &lg, &p, n, x).unwrap();
        let (fa, fb) = (f, g);
        let sum = FnSequence::new("f+g", Domain::default(), move |k, x| {
            let pool = family_pool();
            pool[fa].value(k, x).add(&pool[fb].value(k, x))
        });
        let ssum = absolute_partial(&sum, &lf.add(&lg), &p, n, x).unwrap();
        prop_assert!(ssum <= sf + sg + 1e-12 * (1.0 + sf + sg));
        let scaled = FnSequence::new("c·f", Domain::default(), move |k, x| family_pool()[fa].value(k, x).scale(c));
        let sc = absolute_partial(&scaled, &lf.scale(c), &p, n, x).unwrap();
        prop_assert!((sc - c.abs() * sf).abs() <= 1e-12 * (1.0 + sc));
    }

    #[test]
    fn density_bounds(f in 0usize..5, s in 0usize..4, w in 0usize..3, n in 1u64..2000, theta in 0.05f64..=1.0) {
        let fam = &family_pool()[f];
        let scheme = scheme_pool()[s].clone();
        let n = 1 + n % n_cap(&scheme);
        let p = ModeParams::new(theta, 0.1, scheme, weight_pool()[w].clone()).unwrap();
        let lim = fam.claimed_limit(1.5).unwrap();
        let (_, total) = window_total(&p, n).unwrap();
        let d = sp_density(fam.as_ref(), &lim, &p, n, 1.5).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert!(d <= total.floor() / total.powf(theta) * (1.0 + 1e-15));
        prop_assert!(absolute_partial(fam.as_ref(), &lim, &p, n, 1.5).unwrap() >= 0.0);
    }

    #[test]
    fn absolute_sum_dominates_eps_times_count(
        f in 0usize..5, n in 1u64..60, xi in 0usize..5, eps in 0.01f64..2.0,
    ) {
        // β ≡ 1 and γ_n = n² > T = n²/5.
        let fam = &family_pool()[f];
        let x = 1.0 + xi as f64 * 0.25;
        let lim = fam.claimed_limit(x).unwrap();
        let p = ModeParams::new(1.0, eps, BetaGammaScheme::power(2).unwrap(), fuzzysum::parse_weights("recip5").unwrap()).unwrap();
        let (_, total) = window_total(&p, n).unwrap();
        let count = sp_count(fam.as_ref(), &lim, &p, n, x).unwrap() as f64;
        let sum = absolute_partial(fam.as_ref(), &lim, &p, n, x).unwrap() * total;
        prop_assert!(eps * count <= sum + 1e-12 * (1.0 + sum), "{} > {}", eps * count, sum);
    }

    #[test]
    fn bounded_family_sum_is_split_by_count(
        f in prop_oneof![Just(0usize), Just(2), Just(3), Just(4)], n in 1u64..1500, xi in 0usize..5, eps in 0.01f64..2.0,
    ) {
        // t_k = 1 + 1/k ≤ 2 and γ_n = n ≤ ⌊T⌋.
        let fam = &family_pool()[f];
        let x = 1.0 + xi as f64 * 0.25;
        let lim = fam.claimed_limit(x).unwrap();
        let p = ModeParams::new(1.0, eps, BetaGammaScheme::classical(), WeightSequence::harmonic_plus()).unwrap();
        let (w, total) = window_total(&p, n).unwrap();
        prop_assume!(w.hi <= total.floor() as u64);
        let m2 = (w.lo..=w.hi)
            .map(|k| p.weights.weight(k).unwrap() * fam.value(k, x).distance(&lim))
            .fold(0.0, f64::max);
        let count = sp_count(fam.as_ref(), &lim, &p, n, x).unwrap() as f64;
        let sum = absolute_partial(fam.as_ref(), &lim, &p, n, x).unwrap() * total;
        let bound = m2 * count + (w.hi + 1) as f64 * eps;
        prop_assert!(sum <= bound + 1e-12 * (1.0 + bound), "{} > {}", sum, bound);
    }

    #[test]
    fn splitting_identities(
        f in 0usize..5, lac in any::<bool>(), w in 0usize..3, l in prop_oneof![Just(1.5), Just(2.0), Just(0.5)],
        n in 1u64..300, xi in 0usize..5,
    ) {
        let scheme = if lac {
            BetaGammaScheme::builtin(BuiltinScheme::Lacunary(LacunaryFormula::Pow2)).unwrap()
        } else {
            BetaGammaScheme::classical()
        };
        let n = if lac { 1 + n % 9 } else { n };
        let x = 1.0 + xi as f64 * 0.25;
        let check = identity_check(family_pool()[f].as_ref(), &scheme, &weight_pool()[w], l, n, x);
        match check {
            Ok(c) => prop_assert!(c.holds, "{:?}", c),
            Err(fuzzysum::Error::DegenerateWindow { .. }) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn slow_decrease_monotone_in_eps(
        seed in prop::collection::vec(-1.0f64..1.0, 80), e1 in 0.01f64..0.5, de in 0.0f64..0.5, l in prop_oneof![Just(1.25), Just(1.5), Just(2.0)],
    ) {
        let e2 = e1 + de;
        let fam = FnSequence::new("walk", Domain::default(), move |k, _| FuzzyNumber::crisp(seed[k as usize - 1]).unwrap());
        let v1 = slowly_decreasing_check(&fam, 1.0, e1, l, 0, 80).unwrap().violations;
        let v2 = slowly_decreasing_check(&fam, 1.0, e2, l, 0, 80).unwrap().violations;
        prop_assert!(v2.iter().all(|v| v1.contains(v)));
    }

    #[test]
    fn forward_form_implies_backward_form(
        base in -1.0f64..1.0, decay in prop_oneof![Just(0.5), Just(1.0), Just(2.0)], wiggle in 0.0f64..0.2,
        eps in 0.02f64..0.3, l in prop_oneof![Just(1.25), Just(1.5), Just(2.0)], n0 in 0u64..40,
    ) {
        let fam = FnSequence::new("damped", Domain::default(), move |k, _| {
            let k = k as f64;
            FuzzyNumber::triangular(base + (k * 1.3).sin() * wiggle / k.powf(decay), 0.1, 0.2).unwrap()
        });
        let forward = slowly_decreasing_check(&fam, 1.0, eps, l, n0, 120).unwrap();
        prop_assume!(forward.holds());
        let backward = slowly_decreasing_check_backward(&fam, 1.0, eps, 1.0 / l, n0, 120).unwrap();
        prop_assert!(backward.holds(), "{:?}", backward.violations);
    }

    #[test]
    fn builtin_families_are_valid_and_match_their_definitions(k in 1u64..100_000, xi in 0usize..5, n in 1u64..5000) {
        let x = 1.0 + xi as f64 * 0.25;
        for fam in family_pool() {
            prop_assert!(is_valid(&fam.eval(k, x).unwrap()));
        }
        let r = k.isqrt();
        if r * r == k {
            prop_assert_eq!(TriangularGrowing.eval(k, x).unwrap().distance(&FuzzyNumber::zero()), k as f64 * x);
        }
        let sq = SquareIndicator { m: 1.0 };
        let rm = TruncatedSquareIndicator { n, m: 1.0 };
        if k <= n {
            prop_assert_eq!(rm.eval(k, x).unwrap().cuts().to_vec(), sq.eval(k, x).unwrap().cuts().to_vec());
        } else {
            prop_assert_eq!(rm.eval(k, x).unwrap().cuts().to_vec(), FuzzyNumber::crisp(1.0).unwrap().cuts().to_vec());
        }
        let late = TruncatedSquareIndicator { n: k + n, m: 1.0 };
        prop_assert_eq!(late.eval(k, x).unwrap().cuts().to_vec(), sq.eval(k, x).unwrap().cuts().to_vec());
    }
}

#[test]
fn mixed_grids_are_resampled() {
    let coarse = FuzzyNumber::triangular_on(1.0, 0.5, 0.5, LevelGrid::new(2).unwrap()).unwrap();
    let fine = FuzzyNumber::triangular(1.0, 0.5, 0.5).unwrap();
    assert!(coarse.distance(&fine) <= 1e-12);
    assert_eq!(coarse, fine);
    assert_eq!(coarse.add(&fine).grid(), fine.grid());
}
