use anapt::calibration;
use anapt::estimator::{analyze, AnaptConfig};
use anapt::noise::{self, CutoffQuery, Family, NoiseModel};
use anapt::persistence::sublevel_persistence;
use anapt::signals::{self, SignalKind, SignalSpec};
use anapt::TimeSeries;
use proptest::prelude::*;

fn family() -> impl Strategy<Value = Family> {
    prop::sample::select(Family::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The estimate scales with the data for every family.
    #[test]
    fn estimate_is_scale_equivariant(f in family(), seed in 0u64..1000, k in 0.1f64..20.0) {
        let x = noise::sample(&NoiseModel::standard(f), 2000, seed).unwrap();
        let config = AnaptConfig::new(f);
        let a = analyze(&x, &config).unwrap();
        let b = analyze(&x.map(|v| k * v).unwrap(), &config).unwrap();
        prop_assert!((b.compensated_scale / a.compensated_scale / k - 1.0).abs() < 1e-9);
        prop_assert!((b.compensated_cutoff / a.compensated_cutoff / k - 1.0).abs() < 1e-9);
        prop_assert_eq!(a.signal_pairs.len(), b.signal_pairs.len());
    }

    /// Signal and noise labels partition the finite pairs.
    #[test]
    fn labels_partition_pairs(f in family(), seed in 0u64..1000, amp in 0.0f64..20.0) {
        let clean = signals::generate(&SignalSpec::standard(SignalKind::Wood2, amp)).unwrap();
        let x = signals::add_noise(&clean, &NoiseModel::standard(f), seed).unwrap();
        let r = analyze(&x, &AnaptConfig::new(f)).unwrap();
        let dgm = sublevel_persistence(&x).unwrap();
        prop_assert_eq!(r.total_pairs(), dgm.len());
        prop_assert!(r.signal_pairs.iter().all(|p| p.lifetime() > r.compensated_cutoff));
        prop_assert!(r.noise_pairs.iter().all(|p| p.lifetime() <= r.compensated_cutoff));
        prop_assert!(r.r >= 1.0 && r.compensated_cutoff >= r.raw_cutoff);
    }

    /// A constant offset changes nothing but the Gaussian mean.
    #[test]
    fn offset_invariance(seed in 0u64..1000, c in -100.0f64..100.0) {
        let x = noise::sample(&NoiseModel::standard(Family::Gaussian), 1500, seed).unwrap();
        let config = AnaptConfig::new(Family::Gaussian);
        let a = analyze(&x, &config).unwrap();
        let b = analyze(&x.map(|v| v + c).unwrap(), &config).unwrap();
        prop_assert!((a.median_lifetime - b.median_lifetime).abs() < 1e-9);
        prop_assert_eq!(a.signal_pairs.len(), b.signal_pairs.len());
    }
}

#[test]
fn known_parameter_cutoff_covers_pure_noise() {
    // one trial in a thousand may exceed the cutoff; 40 trials per family
    // should essentially never produce more than two
    for family in Family::ALL {
        let model = NoiseModel::standard(family);
        let c = noise::cutoff(&model, CutoffQuery::new(0.001, 4000).unwrap()).unwrap();
        let exceed = (0..40)
            .filter(|&s| {
                let x = noise::sample(&model, 4000, 500 + s).unwrap();
                sublevel_persistence(&x).unwrap().lifetimes().iter().any(|&l| l > c)
            })
            .count();
        assert!(exceed <= 2, "{family}: {exceed}");
    }
}

#[test]
fn calibration_is_reproducible() {
    let a = calibration::estimate_rho(Family::Rayleigh, 5000, 4, 21).unwrap();
    let b = calibration::estimate_rho(Family::Rayleigh, 5000, 4, 21).unwrap();
    let c = calibration::estimate_rho(Family::Rayleigh, 5000, 4, 22).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);

    let protocol = calibration::CompensationProtocol {
        delta_grid: vec![0.0, 0.25, 0.5, 0.75],
        ..calibration::CompensationProtocol::standard(10)
    };
    let s1 = calibration::compensation_sweep(Family::Uniform, &protocol, 3).unwrap();
    let s2 = calibration::compensation_sweep(Family::Uniform, &protocol, 3).unwrap();
    assert_eq!(s1, s2);
    assert_eq!(s1.len(), 12);
}

#[test]
fn sampled_mean_lifetime_matches_quadrature() {
    for family in Family::ALL {
        let (mc, exact) = calibration::validate_mean_lifetime(family, 200_000, 8).unwrap();
        assert!((mc / exact - 1.0).abs() < 0.01, "{family}: {mc} vs {exact}");
    }
}

#[test]
fn sample_rate_does_not_affect_diagram() {
    let x = noise::sample(&NoiseModel::standard(Family::Exponential), 500, 1).unwrap();
    let y = TimeSeries::new(x.values().to_vec(), 123.0).unwrap();
    assert_eq!(sublevel_persistence(&x).unwrap().sorted_points(), sublevel_persistence(&y).unwrap().sorted_points());
}
