#![allow(dead_code)]

use fovstat::fov::FieldOfView;
use fovstat::gmix::{GaussianComponent, GaussianMixture};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_spd(g: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| g.random_range(-1.0..1.0));
    &a * a.transpose() + DMatrix::identity(n, n) * 0.1
}

pub fn random_mixture(g: &mut ChaCha8Rng, n: usize, n_p: usize, k: usize) -> GaussianMixture<f64> {
    let comps: Vec<_> = (0..k)
        .map(|_| {
            let w = g.random_range(0.1..1.0);
            let m = DVector::from_fn(n, |_, _| g.random_range(-2.0..2.0));
            GaussianComponent::new(w, m, random_spd(g, n)).unwrap()
        })
        .collect();
    GaussianMixture::new(comps, n, n_p).unwrap().normalized().unwrap()
}

pub fn diagonal_mixture(g: &mut ChaCha8Rng, n_p: usize, k: usize) -> GaussianMixture<f64> {
    let comps: Vec<_> = (0..k)
        .map(|_| {
            let w = g.random_range(0.1..1.0);
            let m = DVector::from_fn(n_p, |_, _| g.random_range(-1.5..1.5));
            let d = DVector::from_fn(n_p, |_, _| g.random_range(0.2..1.5));
            GaussianComponent::new(w, m, DMatrix::from_diagonal(&d)).unwrap()
        })
        .collect();
    GaussianMixture::new(comps, n_p, n_p).unwrap().normalized().unwrap()
}

pub fn random_box(g: &mut ChaCha8Rng, n_p: usize) -> FieldOfView<f64> {
    let lo = DVector::from_fn(n_p, |_, _| g.random_range(-2.5..0.5));
    let hi = DVector::from_fn(n_p, |i, _| lo[i] + g.random_range(0.5..3.0));
    FieldOfView::new_box(lo, hi).unwrap()
}

pub fn random_polytope(g: &mut ChaCha8Rng, n_p: usize) -> FieldOfView<f64> {
    let faces = g.random_range(n_p + 1..n_p + 4);
    let normals = DMatrix::from_fn(faces, n_p, |_, _| g.random_range(-1.0..1.0));
    let offsets = DVector::from_fn(faces, |i, _| normals.row(i).norm() * g.random_range(0.3..2.0));
    FieldOfView::new_polytope(normals, offsets).unwrap()
}

/// `∫_a^b N(x; 0, 1) dx` by composite Simpson on a truncated interval.
pub fn std_normal_interval(a: f64, b: f64) -> f64 {
    let (a, b) = (a.max(-12.0), b.min(12.0));
    if a >= b {
        return 0.0;
    }
    let n = 20_000;
    let h = (b - a) / n as f64;
    let f = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Mass of a diagonal-covariance mixture in a box, by quadrature.
pub fn box_mass_oracle(p: &GaussianMixture<f64>, fov: &FieldOfView<f64>) -> f64 {
    let FieldOfView::Box { lo, hi } = fov else { panic!("box expected") };
    p.components()
        .iter()
        .map(|c| {
            let mut m = c.weight();
            for i in 0..lo.len() {
                let s = c.covariance()[(i, i)].sqrt();
                m *= std_normal_interval((lo[i] - c.mean()[i]) / s, (hi[i] - c.mean()[i]) / s);
            }
            m
        })
        .sum()
}

/// Monte Carlo estimate of the FoV mass and its standard error.
pub fn mc_mass(p: &GaussianMixture<f64>, fov: &FieldOfView<f64>, samples: usize, seed: u64) -> (f64, f64) {
    let mut g = rng(seed);
    let n_p = p.position_dim();
    let weights: Vec<f64> = p.components().iter().map(|c| c.weight()).collect();
    let total: f64 = weights.iter().sum();
    let samplers: Vec<_> = p
        .components()
        .iter()
        .map(|c| c.position_marginal(n_p).sampler().unwrap())
        .collect();
    let mut hits = 0usize;
    for _ in 0..samples {
        let mut u = g.random_range(0.0..total);
        let mut j = 0;
        while j + 1 < weights.len() && u >= weights[j] {
            u -= weights[j];
            j += 1;
        }
        if fov.contains(&samplers[j].sample(&mut g)).unwrap() {
            hits += 1;
        }
    }
    let q = hits as f64 / samples as f64;
    (q * total, total * (q * (1.0 - q) / samples as f64).sqrt())
}
