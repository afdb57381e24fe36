mod common;

use common::*;
use fovstat::cardinality::*;
use fovstat::fov::FieldOfView;
use fovstat::gmix::GaussianMixture;
use fovstat::models::*;
use fovstat::Error;
use nalgebra::dvector;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    (0..a.len().max(b.len()))
        .map(|i| (a.get(i).unwrap_or(&0.0) - b.get(i).unwrap_or(&0.0)).abs())
        .fold(0.0, f64::max)
}

fn random_mb(g: &mut ChaCha8Rng, m: usize) -> MultiBernoulli<f64> {
    let comps = (0..m)
        .map(|_| {
            let existence = g.random_range(0.0..0.99);
            let k = g.random_range(1..3);
            Bernoulli {
                existence,
                density: diagonal_mixture(g, 2, k),
            }
        })
        .collect();
    MultiBernoulli::new(comps).unwrap()
}

fn random_glmb(g: &mut ChaCha8Rng) -> GlmbDistribution<f64> {
    let k = g.random_range(1..5);
    let raw: Vec<f64> = (0..k).map(|_| g.random_range(0.05..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    let comps = raw
        .iter()
        .map(|w| {
            let n = g.random_range(0..5);
            GlmbComponent {
                weight: w / sum,
                labels: (0..n as u64).collect(),
                densities: (0..n).map(|_| diagonal_mixture(g, 2, 1)).collect(),
            }
        })
        .collect();
    GlmbDistribution::new(comps, 2).unwrap()
}

/// Sum over every subset of each component's labels of the probability
/// that exactly that subset lies inside.
fn glmb_subset_oracle(components: &[(f64, Vec<f64>)]) -> Vec<f64> {
    let n_max = components.iter().map(|(_, q)| q.len()).max().unwrap_or(0);
    let mut out = vec![0.0; n_max + 1];
    for (w, q) in components {
        for mask in 0u32..(1 << q.len()) {
            let p: f64 = q
                .iter()
                .enumerate()
                .map(|(i, qi)| if mask >> i & 1 == 1 { *qi } else { 1.0 - qi })
                .product();
            out[mask.count_ones() as usize] += w * p;
        }
    }
    out
}

#[test]
fn mb_methods_agree() {
    let mut g = rng(21);
    let method = FovMassMethod::ExactBoxDiagonal;
    for _ in 0..10 {
        let m = g.random_range(1..13);
        let mb = random_mb(&mut g, m);
        let fov = random_box(&mut g, 2);
        let exact = mb_fov_pmf_exact(&mb, &fov, &method).unwrap();
        let dp = mb_fov_pmf_dp(&mb, &fov, &method).unwrap();
        assert!(max_dev(exact.probs(), dp.probs()) <= 1e-10);
        let samples = 200_000;
        let mc = mb_fov_pmf_mc(&mb, &fov, &method, samples, 7).unwrap();
        assert!(max_dev(mc.probs(), dp.probs()) <= 4.0 * (0.25 / samples as f64).sqrt());
        assert!((dp.total() - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn glmb_matches_subset_enumeration() {
    let mut g = rng(22);
    let method = FovMassMethod::ExactBoxDiagonal;
    for _ in 0..25 {
        let glmb = random_glmb(&mut g);
        let fov = random_box(&mut g, 2);
        let pmf = glmb_fov_pmf(&glmb, &fov, &method).unwrap();
        let masses: Vec<(f64, Vec<f64>)> = glmb
            .components()
            .iter()
            .map(|c| (c.weight, c.densities.iter().map(|p| fov_mass(p, &fov, &method).unwrap()).collect()))
            .collect();
        assert!(max_dev(pmf.probs(), &glmb_subset_oracle(&masses)) <= 1e-12);
        assert_eq!(void_probability(&pmf), pmf.probs()[0]);
    }
}

#[test]
fn iidc_with_poisson_cardinality_matches_poisson() {
    let mut g = rng(23);
    for _ in 0..10 {
        let spatial = diagonal_mixture(&mut g, 2, 3);
        let expected = g.random_range(0.2..12.0);
        let fov = random_box(&mut g, 2);
        let n = poisson_n_max(expected) + 40;
        let rho = poisson_pmf(expected, n);
        let rho_sum: f64 = rho.iter().sum();
        let rho: Vec<f64> = rho.iter().map(|p| p / rho_sum).collect();
        let method = FovMassMethod::ExactBoxDiagonal;
        let iidc = iidc_fov_pmf(&IidcRfs::new(rho, spatial.clone()).unwrap(), &fov, &method).unwrap();
        let poisson = poisson_fov_pmf(&PoissonRfs::new(spatial.scaled(expected)), &fov, &method).unwrap();
        assert!(max_dev(iidc.probs(), poisson.probs()) <= 1e-9);
    }
}

#[test]
fn dilating_the_box_never_lowers_the_mean() {
    let mut g = rng(24);
    let method = FovMassMethod::ExactBoxDiagonal;
    for _ in 0..20 {
        let m = g.random_range(1..20);
        let mb = random_mb(&mut g, m);
        let FieldOfView::Box { lo, hi } = random_box(&mut g, 2) else { unreachable!() };
        let mut last = 0.0;
        for pad in [0.0, 0.1, 0.5, 1.0, 3.0] {
            let fov = FieldOfView::new_box(lo.add_scalar(-pad), hi.add_scalar(pad)).unwrap();
            let (mean, _) = pmf_moments(&mb_fov_pmf_dp(&mb, &fov, &method).unwrap());
            assert!(mean >= last - 1e-12, "{mean} < {last}");
            last = mean;
        }
    }
}

#[test]
fn poisson_thinning_composes() {
    let mut g = rng(25);
    for _ in 0..20 {
        let inside = g.random_range(0.0..10.0);
        let summary = MassSummary::Poisson { inside, total: inside + g.random_range(0.0..5.0) };
        let (a, b) = (g.random_range(0.0..=1.0), g.random_range(0.0..=1.0));
        let twice = detection_count_pmf::<f64>(&summary.thinned(a).unwrap(), b, PmfMethod::Dp).unwrap();
        let once = detection_count_pmf::<f64>(&summary, a * b, PmfMethod::Dp).unwrap();
        assert!(max_dev(twice.probs(), once.probs()) <= 1e-12);
    }
}

#[test]
fn detection_limits() {
    let mut g = rng(26);
    let mb = random_mb(&mut g, 6);
    let fov = random_box(&mut g, 2);
    let summary = mass_summary(&RfsModel::MultiBernoulli(mb), &fov, &FovMassMethod::ExactBoxDiagonal).unwrap();
    let presence = pmf_from_masses::<f64>(&summary, PmfMethod::Dp).unwrap();
    assert_eq!(detection_count_pmf::<f64>(&summary, 1.0, PmfMethod::Dp).unwrap().probs(), presence.probs());
    assert_eq!(detection_count_pmf::<f64>(&summary, 0.0, PmfMethod::Dp).unwrap().probs()[0], 1.0);
    assert!(detection_count_pmf::<f64>(&summary, 1.5, PmfMethod::Dp).is_err());
}

#[test]
fn hundred_component_dp_is_fast_and_normalized() {
    let roi = FieldOfView::new_box(dvector![0.0, 0.0], dvector![100.0, 100.0]).unwrap();
    let cov = CovSpec { min_eigenvalue: 1.0, max_eigenvalue: 25.0 };
    let mb = sample_mb_scenario(100, &roi, (0.0, 1.0), &cov, 3).unwrap();
    let fov = FieldOfView::new_box(dvector![20.0, 20.0], dvector![60.0, 60.0]).unwrap();
    let method = FovMassMethod::MonteCarlo { samples: 2_000, seed: 1 };
    let prepared = PreparedModel::new(&RfsModel::MultiBernoulli(mb), &method).unwrap();
    let start = std::time::Instant::now();
    let pmf: CardinalityPmf<f64> = prepared.pmf(&fov, PmfMethod::Dp).unwrap();
    assert!(start.elapsed().as_secs_f64() < 1.0);
    assert!((pmf.total() - 1.0).abs() <= 1e-9);
    assert_eq!(pmf.n_max(), 100);
}

#[test]
fn exact_enumeration_is_capped() {
    let mut g = rng(27);
    let mb = random_mb(&mut g, MAX_EXACT_COMPONENTS + 1);
    let fov = random_box(&mut g, 2);
    let err = mb_fov_pmf_exact(&mb, &fov, &FovMassMethod::ExactBoxDiagonal).unwrap_err();
    assert!(matches!(err, Error::TooLarge { .. }));
    assert!(mb_fov_pmf_dp(&mb, &fov, &FovMassMethod::ExactBoxDiagonal).is_ok());
}

#[test]
fn sampled_pmf_is_reproducible() {
    let mut g = rng(28);
    let mb = random_mb(&mut g, 8);
    let fov = random_box(&mut g, 2);
    let method = FovMassMethod::ExactBoxDiagonal;
    let a = mb_fov_pmf_mc(&mb, &fov, &method, 100_000, 5).unwrap();
    let b = mb_fov_pmf_mc(&mb, &fov, &method, 100_000, 5).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.truncation().samples, Some(100_000));
}

#[test]
fn empty_fov_is_void() {
    let mut g = rng(29);
    let mb = random_mb(&mut g, 5);
    let far = FieldOfView::new_box(dvector![1e3, 1e3], dvector![1e3 + 1.0, 1e3 + 1.0]).unwrap();
    let pmf = mb_fov_pmf_dp(&mb, &far, &FovMassMethod::ExactBoxDiagonal).unwrap();
    assert_eq!(void_probability(&pmf), 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pmfs_are_normalized(seed in any::<u64>()) {
        let mut g = rng(seed);
        let fov = random_box(&mut g, 2);
        let method = FovMassMethod::ExactBoxDiagonal;
        let m = g.random_range(1..30);
        let mb = random_mb(&mut g, m);
        let glmb = random_glmb(&mut g);
        let spatial: GaussianMixture<f64> = diagonal_mixture(&mut g, 2, 2);
        let raw: Vec<f64> = (0..6).map(|_| g.random_range(0.0..1.0)).collect();
        let sum: f64 = raw.iter().sum();
        let rho: Vec<f64> = raw.iter().map(|x| x / sum).collect();
        let models = [
            RfsModel::MultiBernoulli(mb),
            RfsModel::Glmb(glmb),
            RfsModel::Iidc(IidcRfs::new(rho, spatial.clone()).unwrap()),
            RfsModel::Poisson(PoissonRfs::new(spatial.scaled(g.random_range(0.0..20.0)))),
        ];
        for m in &models {
            let pmf = fov_pmf(m, &fov, &method, PmfMethod::Dp).unwrap();
            prop_assert!((pmf.total() - 1.0).abs() <= 1e-9, "{}", m.family());
            prop_assert!(pmf.probs().iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn mean_is_expected_count_in_fov(seed in any::<u64>()) {
        let mut g = rng(seed);
        let m = g.random_range(1..15);
        let mb = random_mb(&mut g, m);
        let fov = random_box(&mut g, 2);
        let method = FovMassMethod::ExactBoxDiagonal;
        let (mean, _) = pmf_moments(&mb_fov_pmf_dp(&mb, &fov, &method).unwrap());
        let phd = RfsModel::MultiBernoulli(mb).phd().unwrap();
        prop_assert!((mean - fov_mass(&phd, &fov, &method).unwrap()).abs() <= 1e-10);
    }
}
