mod common;

use std::f64::consts::SQRT_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rough_metric::families::{self, MAX_N};
use rough_metric::lab::{
    evaluate_pairs, lipschitz_witness_search, rate_fit, run_convergence, squeeze_check, sup_norm_estimate,
    verify_comparison, write_csv, AnalyticLimit, Experiment, SampleSpec,
};
use rough_metric::{
    euclid_dist, pointwise_leq, ConformalMetric, Direction, FamilyId, Geodesic, LabError, LimitKind, MetricFamily,
    PairSample, Point, SolverConfig,
};

use common::{pt, random_ordered_pair};

const TOL: f64 = 1e-4;

fn geodesic(m: ConformalMetric) -> Geodesic {
    Geodesic::new(m, SolverConfig::default()).unwrap()
}

fn euclid() -> AnalyticLimit {
    AnalyticLimit(LimitKind::Euclidean)
}

fn witness_sample(p: Point, q: Point) -> PairSample {
    PairSample::from_pairs(vec![(p, q)], rough_metric::SampleStrategy::PaperWitnesses).unwrap()
}

#[test]
fn sample_strategies() {
    assert_eq!(PairSample::uniform_grid(10).unwrap().len(), 4950);
    let a = PairSample::random(30, 7).unwrap();
    assert_eq!(a.pairs(), PairSample::random(30, 7).unwrap().pairs());
    assert_ne!(a.pairs(), PairSample::random(30, 8).unwrap().pairs());
    assert!(matches!(PairSample::random(0, 1), Err(LabError::EmptySample)));

    let m = families::shortcut_square(4, 1.0).unwrap();
    let delta = 0.01;
    let s = PairSample::feature_adjacent(&m, delta, 40, 3).unwrap();
    let cuts = [0.375, 0.625];
    let near = |v: f64| cuts.iter().any(|c| (v - c).abs() <= 2.0 * delta);
    for &(p, q) in s.pairs() {
        assert!(near(p.x()) || near(p.y()));
        assert!(near(q.x()) || near(q.y()));
    }
}

#[test]
fn sup_norm_examples() {
    let s = PairSample::random(40, 1).unwrap();
    let f = geodesic(families::shortcut_square(4, 1.0).unwrap());
    assert_eq!(sup_norm_estimate(&f, &f, &s).unwrap(), 0.0);

    for n in [1, 4, 16] {
        let line = geodesic(families::blowup_center_line(n, 2.0).unwrap());
        assert!(sup_norm_estimate(&line, &euclid(), &s).unwrap() <= 2.0 * TOL);
    }

    let n = 8.0;
    let g = geodesic(families::blowup_square(8, 1.0).unwrap());
    let w = witness_sample(pt(0.5, 0.5), pt((n + 1.0) / (2.0 * n), 0.5));
    assert!(sup_norm_estimate(&g, &euclid(), &w).unwrap() >= 7.0 / 16.0 - 1e-12);
}

#[test]
fn sup_norm_grows_with_the_sample() {
    let f = geodesic(families::shortcut_rectangle(8).unwrap());
    let base = AnalyticLimit(LimitKind::Quotient);
    let mut sample = PairSample::random(10, 2).unwrap();
    let mut last = sup_norm_estimate(&f, &base, &sample).unwrap();
    for seed in 3..8 {
        sample.extend(&PairSample::random(10, seed).unwrap());
        let next = sup_norm_estimate(&f, &base, &sample).unwrap();
        assert!(next >= last);
        last = next;
    }
}

#[test]
fn squeeze_examples() {
    let grid = PairSample::uniform_grid(6).unwrap();
    let square = MetricFamily::new(FamilyId::ShortcutSquare, 1.0).unwrap();
    let build = |family: MetricFamily| {
        move |n: u32| -> Result<Geodesic, LabError> {
            Ok(Geodesic::new(family.build(n)?, SolverConfig::default())?)
        }
    };
    assert!(squeeze_check(build(square), &euclid(), |n| SQRT_2 / f64::from(n), &grid, &[2, 4, 8, 16], TOL)
        .unwrap());

    let rect = MetricFamily::new(FamilyId::ShortcutRect, 1.0).unwrap();
    let random = PairSample::random(60, 4).unwrap();
    let quotient = AnalyticLimit(LimitKind::Quotient);
    assert!(squeeze_check(build(rect), &quotient, |n| 2.0 / f64::from(n), &random, &[4, 8, 16, 32], TOL).unwrap());

    let blowup = MetricFamily::new(FamilyId::BlowupSquare, 1.0).unwrap();
    let with_witness = PairSample::mixed(vec![random.clone(), PairSample::paper_witnesses(&blowup, 8).unwrap()]).unwrap();
    assert!(!squeeze_check(build(blowup), &euclid(), |n| 1.0 / f64::from(n), &with_witness, &[2, 4, 8], TOL).unwrap());
}

#[test]
fn squeeze_bounds_the_sup_norm() {
    let square = MetricFamily::new(FamilyId::ShortcutSquare, 1.0).unwrap();
    let s = PairSample::random(50, 6).unwrap();
    let rate = |n: u32| SQRT_2 / f64::from(n);
    let d_seq = |n: u32| -> Result<Geodesic, LabError> { Ok(geodesic(square.build(n)?)) };
    assert!(squeeze_check(d_seq, &euclid(), rate, &s, &[4, 8], TOL).unwrap());
    let sup = sup_norm_estimate(&geodesic(square.build(8).unwrap()), &euclid(), &s).unwrap();
    assert!(sup <= rate(8) + 3.0 * TOL);
}

#[test]
fn comparison_examples() {
    let s = PairSample::random(60, 9).unwrap();
    let g = geodesic(families::blowup_square(4, 0.5).unwrap());
    assert!(!verify_comparison(&g, &euclid(), 1.0, 0.0, Direction::Lower, &s, 3.0 * TOL).unwrap().violated);
    let rect = geodesic(families::shortcut_rectangle(4).unwrap());
    assert!(!verify_comparison(&rect, &euclid(), 1.0, 0.0, Direction::Upper, &s, 3.0 * TOL).unwrap().violated);

    let f4 = geodesic(families::shortcut_square(4, 1.0).unwrap());
    let square = MetricFamily::new(FamilyId::ShortcutSquare, 1.0).unwrap();
    let with_witness = PairSample::mixed(vec![s.clone(), PairSample::paper_witnesses(&square, 4).unwrap()]).unwrap();
    let ok = verify_comparison(&f4, &euclid(), 1.0, SQRT_2 / 4.0, Direction::Lower, &with_witness, 3.0 * TOL).unwrap();
    assert!(!ok.violated);
    let tight = verify_comparison(&f4, &euclid(), 1.0, 1.0 / 64.0, Direction::Lower, &with_witness, 3.0 * TOL).unwrap();
    assert!(tight.violated);
    assert!(tight.margin < -3.0 * TOL);

    assert!(verify_comparison(&f4, &euclid(), 0.0, 0.0, Direction::Lower, &s, TOL).is_err());
    assert!(verify_comparison(&f4, &euclid(), 1.0, -1.0, Direction::Lower, &s, TOL).is_err());
}

#[test]
fn comparison_agrees_with_pointwise_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let s = PairSample::random(15, 13).unwrap();
    for _ in 0..10 {
        let (lo, hi) = random_ordered_pair(&mut rng);
        assert!(pointwise_leq(&lo, &hi));
        let report = verify_comparison(&geodesic(lo), &geodesic(hi), 1.0, 0.0, Direction::Upper, &s, 3.0 * TOL);
        assert!(!report.unwrap().violated);
    }
}

#[test]
fn witness_search_examples() {
    let f4 = geodesic(families::shortcut_square(4, 1.0).unwrap());
    let square = MetricFamily::new(FamilyId::ShortcutSquare, 1.0).unwrap();
    let hit = lipschitz_witness_search(&f4, &euclid(), 0.5, Direction::Lower, &PairSample::paper_witnesses(&square, 4).unwrap())
        .unwrap()
        .unwrap();
    assert_eq!((hit.p, hit.q), (pt(0.5, 0.5), pt(0.375, 0.5)));
    assert!(0.5 * hit.d_base > hit.d_metric);

    let g4 = geodesic(families::blowup_square(4, 0.5).unwrap());
    let blowup = MetricFamily::new(FamilyId::BlowupSquare, 0.5).unwrap();
    let hit = lipschitz_witness_search(&g4, &euclid(), 1.0, Direction::Upper, &PairSample::paper_witnesses(&blowup, 4).unwrap())
        .unwrap()
        .unwrap();
    assert_eq!((hit.p, hit.q), (pt(0.5, 0.5), pt(0.625, 0.5)));

    let unit = geodesic(ConformalMetric::unit());
    let s = PairSample::random(30, 5).unwrap();
    for c in [0.25, 1.0] {
        assert!(lipschitz_witness_search(&unit, &euclid(), c, Direction::Lower, &s).unwrap().is_none());
    }
}

#[test]
fn paper_witnesses_reproduce_for_every_supported_index() {
    let cases: Vec<(MetricFamily, std::ops::RangeInclusive<u32>)> = vec![
        (MetricFamily::new(FamilyId::ShortcutSquare, 1.0).unwrap(), 2..=MAX_N),
        (MetricFamily::new(FamilyId::ShortcutSquare, 0.5).unwrap(), 2..=MAX_N),
        (MetricFamily::new(FamilyId::BlowupSquare, 0.5).unwrap(), 2..=MAX_N),
        (MetricFamily::new(FamilyId::BlowupSquare, 1.0).unwrap(), 2..=MAX_N),
        (MetricFamily::new(FamilyId::DyadicDense, 1.0).unwrap(), 1..=12),
        (MetricFamily::new(FamilyId::DyadicMiddle, 1.0).unwrap(), 1..=12),
        (MetricFamily::new(FamilyId::DyadicExtreme, 1.0).unwrap(), 1..=12),
    ];
    for (family, indices) in cases {
        for index in indices {
            let (direction, c) = family.lipschitz_failure(index).unwrap();
            let w = family.witnesses(index)[0];
            let g = geodesic(family.build(index).unwrap());
            let hit = lipschitz_witness_search(&g, &euclid(), c, direction, &PairSample::paper_witnesses(&family, index).unwrap())
                .unwrap()
                .unwrap_or_else(|| panic!("{} {index}: no witness", family.name()));
            assert_eq!((hit.p, hit.q), (w.p, w.q), "{} {index}", family.name());
            assert!((hit.d_metric - w.metric_value).abs() <= 1e-3 * w.metric_value, "{} {index}", family.name());
        }
    }
}

#[test]
fn rate_fit_examples() {
    let exact: Vec<(u32, f64)> = [2, 4, 8, 16].iter().map(|&n| (n, 3.0 / f64::from(n))).collect();
    let fit = rate_fit(&exact).unwrap();
    assert!((fit.exponent - 1.0).abs() < 1e-9);
    assert!((fit.coefficient - 3.0).abs() < 1e-9);
    let flat = rate_fit(&[(2, 0.1), (4, 0.1), (8, 0.1)]).unwrap();
    assert!(flat.exponent.abs() < 1e-12);
    assert!(rate_fit(&[(2, 0.1), (4, 0.0), (8, 0.1)]).is_err());
    assert!(rate_fit(&[(2, 0.1), (4, 0.05)]).is_err());
}

#[test]
fn shortcut_square_rate_fit_pipeline() {
    // The grid contains the corners of the shortcut square, so the sampled
    // sup is the exact sup √2/n·(1 − 1/n) and the fit has a closed form.
    let square = MetricFamily::new(FamilyId::ShortcutSquare, 1.0).unwrap();
    let exp = Experiment {
        family: square,
        indices: vec![2, 4, 8, 16],
        base: None,
        sample: SampleSpec::Mixed { parts: vec![SampleSpec::UniformGrid { side: 10 }, SampleSpec::PaperWitnesses] },
        solver: SolverConfig::default(),
        force: false,
    };
    let run = run_convergence(&exp).unwrap();
    let gaps = &run.summary.sup_gaps;
    assert!(gaps.windows(2).all(|w| w[1] < w[0]));
    let exact: Vec<(u32, f64)> = [2u32, 4, 8, 16]
        .iter()
        .map(|&n| {
            let n_f = f64::from(n);
            (n, SQRT_2 / n_f * (1.0 - 1.0 / n_f))
        })
        .collect();
    for (g, (_, e)) in gaps.iter().zip(&exact) {
        assert!((g - e).abs() < 1e-9);
    }
    let fit = run.summary.fitted_rate.unwrap();
    let oracle = rate_fit(&exact).unwrap();
    assert!((fit.exponent - oracle.exponent).abs() < 1e-6);
    assert!((fit.exponent - 0.7057).abs() < 1e-4);
}

#[test]
fn convergence_run_is_deterministic() {
    let exp = Experiment {
        family: MetricFamily::new(FamilyId::ShortcutRect, 1.0).unwrap(),
        indices: vec![4, 8, 16],
        base: None,
        sample: SampleSpec::Mixed {
            parts: vec![SampleSpec::Random { count: 20, seed: 5 }, SampleSpec::FeatureAdjacent { count: 10, seed: 5 }],
        },
        solver: SolverConfig::default(),
        force: false,
    };
    let render = |exp: &Experiment| {
        let run = run_convergence(exp).unwrap();
        let mut out = Vec::new();
        write_csv(&run.rows, &mut out).unwrap();
        (out, run.summary)
    };
    let (a, summary) = render(&exp);
    let (b, _) = render(&exp);
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("family,index,pair_id,px,py,qx,qy,d_metric,d_base,gap\n"));
    assert_eq!(text.lines().count(), 1 + 3 * 30);
    assert_eq!(summary.indices, vec![4, 8, 16]);
    assert!(summary.witnesses.is_empty());
    let json = serde_json::to_value(&summary).unwrap();
    for key in ["family", "indices", "sup_gaps", "fitted_rate", "witnesses"] {
        assert!(json.get(key).is_some(), "{key}");
    }
}

#[test]
fn convergence_records_witnesses() {
    let exp = Experiment {
        family: MetricFamily::new(FamilyId::DyadicMiddle, 1.0).unwrap(),
        indices: vec![2, 3],
        base: None,
        sample: SampleSpec::PaperWitnesses,
        solver: SolverConfig::default(),
        force: false,
    };
    let run = run_convergence(&exp).unwrap();
    assert_eq!(run.summary.witnesses.len(), 2);
    let w = run.summary.witnesses[1];
    assert!((w.d_metric - 1.0 / 48.0).abs() < 1e-12);
    assert!((w.d_base - euclid_dist(w.p, w.q)).abs() < 1e-15);
    let evals = evaluate_pairs(&geodesic(families::shortcut_rectangle(4).unwrap()), &euclid(), &PairSample::random(5, 1).unwrap()).unwrap();
    assert_eq!(evals.iter().map(|e| e.pair_id).collect::<Vec<_>>(), vec![0, 1, 2, 3, 4]);
}
