//! Optimal univariate splits of the standard normal.
//!
//! A split replaces `q = N(0, 1)` by `q̃ = Σ_j w̃_j N(m̃_j, σ̃²)` with `R`
//! components sharing one standard deviation. Parameters minimize
//!
//! ```text
//! J = L2(q, q̃) + λ σ̃²,   Σ w̃_j = 1
//! ```
//!
//! over a symmetric family (`m̃_j = -m̃_{R+1-j}`, `w̃_j = w̃_{R+1-j}`), which
//! makes every split mean-preserving. The library is generated offline by a
//! seeded multi-start Nelder-Mead search and shipped as JSON; library values
//! are always `f64` and are cast when applied to other scalar types.

use std::path::Path;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gmix::{l2_distance, GaussianComponent, GaussianMixture};
use crate::rng;

pub const LIBRARY_VERSION: u32 = 1;
pub const MIN_COMPONENTS: usize = 2;
pub const MAX_COMPONENTS: usize = 9;
pub const DEFAULT_COMPONENTS: [usize; 4] = [2, 3, 4, 5];
pub const DEFAULT_LAMBDAS: [f64; 3] = [1e-4, 1e-3, 1e-2];

const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;
const FRAC_1_2_SQRT_PI: f64 = 0.282_094_791_773_878_14;

static BUILTIN: OnceLock<SplitLibrary> = OnceLock::new();

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitParameters {
    #[serde(rename = "R")]
    pub components: usize,
    pub lambda: f64,
    pub weights: Vec<f64>,
    pub means: Vec<f64>,
    pub sigma: f64,
    pub achieved_cost: f64,
    pub converged: bool,
}

impl SplitParameters {
    pub fn validate(&self) -> Result<()> {
        let r = self.components;
        let bad = |msg: String| Err(Error::InvalidSplit(format!("R={r}, lambda={}: {msg}", self.lambda)));
        if r < MIN_COMPONENTS || self.weights.len() != r || self.means.len() != r {
            return bad("component count and vector lengths disagree or R < 2".into());
        }
        if !(self.lambda > 0.0) {
            return bad("lambda must be positive".into());
        }
        if self.weights.iter().any(|w| !(*w >= 0.0)) {
            return bad("negative weight".into());
        }
        let sum: f64 = self.weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return bad(format!("weights sum to {sum}"));
        }
        for j in 0..r {
            if self.means[j] != -self.means[r - 1 - j] || self.weights[j] != self.weights[r - 1 - j] {
                return bad("parameters are not symmetric".into());
            }
        }
        if self.means.windows(2).any(|w| !(w[0] < w[1])) {
            return bad("means are not strictly increasing".into());
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return bad(format!("sigma {} outside (0, 1)", self.sigma));
        }
        Ok(())
    }

    /// Closed-form `L2(q, q̃)` through the mixture inner products of `gmix`.
    pub fn l2_error(&self) -> f64 {
        let q = GaussianMixture::single(
            GaussianComponent::new(1.0, DVector::from_element(1, 0.0), DMatrix::from_element(1, 1, 1.0))
                .expect("standard normal"),
            1,
        )
        .expect("1-D mixture");
        let var = self.sigma * self.sigma;
        let comps = self
            .weights
            .iter()
            .zip(&self.means)
            .map(|(&w, &m)| {
                GaussianComponent::new(w, DVector::from_element(1, m), DMatrix::from_element(1, 1, var))
            })
            .collect::<Result<Vec<_>>>();
        match comps.and_then(|c| GaussianMixture::new(c, 1, 1)) {
            Ok(split) => l2_distance(&q, &split).unwrap_or(f64::INFINITY),
            Err(_) => f64::INFINITY,
        }
    }

    /// `J = L2(q, q̃) + λ σ̃²`.
    pub fn evaluate_cost(&self, lambda: f64) -> f64 {
        self.l2_error() + lambda * self.sigma * self.sigma
    }

    /// Variance of the split mixture, `σ̃² + Σ w̃ m̃²`.
    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
            + self
                .weights
                .iter()
                .zip(&self.means)
                .map(|(w, m)| w * m * m)
                .sum::<f64>()
    }

    pub fn mean(&self) -> f64 {
        self.weights.iter().zip(&self.means).map(|(w, m)| w * m).sum()
    }
}

/// Split cost for arbitrary (possibly unsplit) parameters, evaluated with the
/// scalar closed form. Used by the optimizer and for the unsplit baseline.
pub fn split_cost(weights: &[f64], means: &[f64], sigma: f64, lambda: f64) -> f64 {
    split_l2(weights, means, sigma) + lambda * sigma * sigma
}

fn normal_pdf(x: f64, var: f64) -> f64 {
    (-0.5 * x * x / var).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

fn split_l2(weights: &[f64], means: &[f64], sigma: f64) -> f64 {
    let var = sigma * sigma;
    let mut cross = 0.0;
    for (w, m) in weights.iter().zip(means) {
        cross += w * normal_pdf(*m, 1.0 + var);
    }
    let mut own = 0.0;
    for (wi, mi) in weights.iter().zip(means) {
        for (wj, mj) in weights.iter().zip(means) {
            own += wi * wj * normal_pdf(mi - mj, 2.0 * var);
        }
    }
    (FRAC_1_2_SQRT_PI - 2.0 * cross + own).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSettings {
    pub starts: usize,
    pub max_iterations: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Relative spread of simplex costs at which a run counts as converged.
    pub ftol: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            starts: 16,
            max_iterations: 10_000,
            restarts: 4,
            seed: 20_190_601,
            ftol: 1e-12,
        }
    }
}

/// Symmetric family in unconstrained coordinates:
/// `[log gaps of positive means (h), logits, sigma logit]`. The logits cover
/// the pairs and, for odd `R`, the center; the last of them is pinned to zero
/// and not stored.
#[derive(Debug, Clone, Copy)]
struct Family {
    pairs: usize,
    odd: bool,
}

impl Family {
    fn new(r: usize) -> Self {
        Self {
            pairs: r / 2,
            odd: r % 2 == 1,
        }
    }

    fn logits(&self) -> usize {
        self.pairs + usize::from(self.odd) - 1
    }

    fn dim(&self) -> usize {
        self.pairs + self.logits() + 1
    }

    fn decode(&self, theta: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
        let h = self.pairs;
        let mut positive = Vec::with_capacity(h);
        let mut acc = 0.0;
        for g in &theta[..h] {
            acc += g.exp();
            positive.push(acc);
        }
        let mut logits = theta[h..h + self.logits()].to_vec();
        logits.push(0.0);
        let top = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = logits.iter().map(|a| (a - top).exp()).collect();
        let z = 2.0 * e[..h].iter().sum::<f64>() + if self.odd { e[h] } else { 0.0 };
        let pair_w: Vec<f64> = e[..h].iter().map(|v| v / z).collect();
        let sigma = 1.0 / (1.0 + (-theta[theta.len() - 1]).exp());

        let mut means = Vec::with_capacity(2 * h + 1);
        let mut weights = Vec::with_capacity(2 * h + 1);
        for k in (0..h).rev() {
            means.push(-positive[k]);
            weights.push(pair_w[k]);
        }
        if self.odd {
            means.push(0.0);
            weights.push(e[h] / z);
        }
        for k in 0..h {
            means.push(positive[k]);
            weights.push(pair_w[k]);
        }
        (weights, means, sigma)
    }

    fn encode(&self, positive: &[f64], pair_w: &[f64], center_w: Option<f64>, sigma: f64) -> Vec<f64> {
        let mut theta = Vec::with_capacity(self.dim());
        let mut prev = 0.0;
        for &m in positive {
            theta.push((m - prev).max(1e-12).ln());
            prev = m;
        }
        let mut logits: Vec<f64> = pair_w.iter().map(|w| w.max(1e-300).ln()).collect();
        if self.odd {
            logits.push(center_w.unwrap_or(1e-6).max(1e-300).ln());
        }
        let pinned = logits.pop().expect("at least one logit");
        theta.extend(logits.iter().map(|l| l - pinned));
        theta.push((sigma / (1.0 - sigma)).ln());
        theta
    }

    /// Embeds an `R - 1` solution into this family: an odd parent's center
    /// becomes a narrow pair, an even parent gains a light center.
    fn warm_start(&self, parent: &SplitParameters) -> Vec<f64> {
        let r = parent.components;
        let positive_parent: Vec<f64> = parent.means[r.div_ceil(2)..].to_vec();
        let pair_parent: Vec<f64> = parent.weights[r.div_ceil(2)..].to_vec();
        if self.odd {
            let delta = 1e-6;
            let pair: Vec<f64> = pair_parent.iter().map(|w| w * (1.0 - delta)).collect();
            self.encode(&positive_parent, &pair, Some(delta), parent.sigma)
        } else {
            let center = parent.weights[r / 2];
            let eps = 1e-3 * positive_parent.first().copied().unwrap_or(1.0);
            let mut positive = vec![eps];
            positive.extend(&positive_parent);
            let mut pair = vec![center / 2.0];
            pair.extend(&pair_parent);
            self.encode(&positive, &pair, None, parent.sigma)
        }
    }
}

fn cost_of(family: &Family, theta: &[f64], lambda: f64) -> f64 {
    let (w, m, s) = family.decode(theta);
    let j = split_cost(&w, &m, s, lambda);
    if j.is_finite() {
        j
    } else {
        f64::INFINITY
    }
}

struct Minimum {
    x: Vec<f64>,
    fx: f64,
    converged: bool,
}

fn nelder_mead(f: &(dyn Fn(&[f64]) -> f64 + Sync), x0: &[f64], step: f64, max_iter: usize, ftol: f64) -> Minimum {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        simplex.push(x);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| f(x)).collect();
    let mut converged = false;
    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        let size = (1..=n)
            .map(|i| {
                simplex[i]
                    .iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        // L2 is a difference of O(0.3) terms; costs below ~1e-15 apart are noise.
        if spread <= ftol * values[0].abs() + 1e-15 && size < 1e-6 {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|x| x[k]).sum::<f64>() / n as f64)
            .collect();
        let towards = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + coef * (w - c))
                .collect()
        };
        let reflected = towards(-1.0);
        let fr = f(&reflected);
        if fr < values[0] {
            let expanded = towards(-2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            let (contracted, fc) = if fr < values[n] {
                let c = towards(-0.5);
                let fc = f(&c);
                (c, fc)
            } else {
                let c = towards(0.5);
                let fc = f(&c);
                (c, fc)
            };
            if fc < values[n].min(fr) {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    simplex[i] = best
                        .iter()
                        .zip(&simplex[i])
                        .map(|(b, x)| b + 0.5 * (x - b))
                        .collect();
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }
    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)))
        .expect("nonempty simplex");
    Minimum {
        x: simplex[best].clone(),
        fx: values[best],
        converged,
    }
}

fn polish(f: &(dyn Fn(&[f64]) -> f64 + Sync), x0: &[f64], opts: &OptimizerSettings) -> Minimum {
    let mut best = nelder_mead(f, x0, 0.5, opts.max_iterations, opts.ftol);
    for _ in 0..opts.restarts {
        let next = nelder_mead(f, &best.x, 0.05, opts.max_iterations, opts.ftol);
        let improved = next.fx < best.fx;
        let gain = best.fx - next.fx;
        if improved {
            best = next;
        } else {
            best.converged = best.converged || next.converged;
        }
        if gain <= opts.ftol * best.fx.abs() {
            break;
        }
    }
    best
}

fn validate_request(r: usize, lambda: f64) -> Result<()> {
    if !(MIN_COMPONENTS..=MAX_COMPONENTS).contains(&r) {
        return Err(Error::InvalidArgument(format!(
            "split component count must be in [{MIN_COMPONENTS}, {MAX_COMPONENTS}], got {r}"
        )));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
    }
    Ok(())
}

/// Finds locally optimal split parameters for `R` components and
/// regularizer `λ`. Non-convergence is reported through `converged = false`
/// on the best parameters found.
pub fn generate_split(r: usize, lambda: f64, opts: &OptimizerSettings) -> Result<SplitParameters> {
    generate_split_from(r, lambda, opts, None)
}

fn generate_split_from(
    r: usize,
    lambda: f64,
    opts: &OptimizerSettings,
    parent: Option<&SplitParameters>,
) -> Result<SplitParameters> {
    validate_request(r, lambda)?;
    let family = Family::new(r);
    let f = |theta: &[f64]| cost_of(&family, theta, lambda);

    let mut starts: Vec<Vec<f64>> = Vec::new();
    // Evenly spread means with near-unit variance.
    let h = family.pairs;
    let spacing = 2.0 / r as f64;
    let positive: Vec<f64> = (0..h)
        .map(|k| spacing * (k as f64 + if family.odd { 1.0 } else { 0.5 }))
        .collect();
    let even_w = 1.0 / r as f64;
    starts.push(family.encode(&positive, &vec![even_w; h], Some(even_w), 0.7));
    if let Some(p) = parent {
        starts.push(family.warm_start(p));
    }
    let mut gen = rng::stream(rng::derive_seed(opts.seed, r as u64), lambda.to_bits());
    for _ in 0..opts.starts {
        let mut theta = Vec::with_capacity(family.dim());
        for _ in 0..h {
            theta.push(gen.random_range(0.2f64.ln()..1.2f64.ln()));
        }
        for _ in 0..family.logits() {
            theta.push(gen.random_range(-1.0..1.0));
        }
        let sigma: f64 = gen.random_range(0.3..0.95);
        theta.push((sigma / (1.0 - sigma)).ln());
        starts.push(theta);
    }

    // Ties resolve to the earliest start, so the result is independent of
    // thread scheduling.
    let best = starts
        .par_iter()
        .map(|start| polish(&f, start, opts))
        .collect::<Vec<_>>()
        .into_iter()
        .reduce(|best, m| if m.fx < best.fx { m } else { best })
        .expect("at least one start");
    let (weights, means, sigma) = family.decode(&best.x);
    let params = SplitParameters {
        components: r,
        lambda,
        achieved_cost: split_cost(&weights, &means, sigma, lambda),
        weights,
        means,
        sigma,
        converged: best.converged,
    };
    params.validate()?;
    Ok(params)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub generator: String,
    pub optimizer: OptimizerSettings,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitLibrary {
    pub version: u32,
    pub entries: Vec<SplitParameters>,
    pub provenance: Provenance,
}

impl SplitLibrary {
    /// Generates every `(R, λ)` pair. For each `λ` the search runs over `R`
    /// in increasing order, seeding each size with the previous solution.
    pub fn generate(components: &[usize], lambdas: &[f64], opts: &OptimizerSettings) -> Result<Self> {
        let mut rs = components.to_vec();
        rs.sort_unstable();
        rs.dedup();
        for &r in &rs {
            validate_request(r, 1.0)?;
        }
        for &l in lambdas {
            validate_request(MIN_COMPONENTS, l)?;
        }
        let per_lambda: Vec<Vec<SplitParameters>> = lambdas
            .par_iter()
            .map(|&lambda| {
                let mut out: Vec<SplitParameters> = Vec::with_capacity(rs.len());
                let mut parent: Option<SplitParameters> = None;
                for r in MIN_COMPONENTS..=*rs.last().unwrap_or(&MIN_COMPONENTS) {
                    let warm = parent.as_ref().filter(|p| p.components + 1 == r);
                    let p = generate_split_from(r, lambda, opts, warm)?;
                    if rs.contains(&r) {
                        out.push(p.clone());
                    }
                    parent = Some(p);
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let mut entries: Vec<SplitParameters> = per_lambda.into_iter().flatten().collect();
        entries.sort_by(|a, b| a.components.cmp(&b.components).then(a.lambda.total_cmp(&b.lambda)));
        Ok(Self {
            version: LIBRARY_VERSION,
            entries,
            provenance: Provenance {
                generator: format!("fovstat {} multi-start Nelder-Mead", env!("CARGO_PKG_VERSION")),
                optimizer: *opts,
                note: "symmetric family; J = L2(q, q~) + lambda sigma^2".into(),
            },
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != LIBRARY_VERSION {
            return Err(Error::InvalidSplit(format!("unsupported library version {}", self.version)));
        }
        self.entries.iter().try_for_each(SplitParameters::validate)
    }

    /// Entry for `R` components and regularizer `λ`. `R` must match exactly;
    /// a missing `λ` falls back to the entry nearest in `log λ` with a warning.
    pub fn get(&self, r: usize, lambda: f64) -> Result<&SplitParameters> {
        let candidates = self.entries.iter().filter(|e| e.components == r);
        let mut best: Option<(&SplitParameters, f64)> = None;
        for e in candidates {
            let d = (e.lambda.ln() - lambda.ln()).abs();
            if best.is_none_or(|(b, bd)| d < bd || (d == bd && e.lambda < b.lambda)) {
                best = Some((e, d));
            }
        }
        let (entry, _) = best.ok_or(Error::MissingSplitEntry { r })?;
        if (entry.lambda - lambda).abs() > 1e-12 * lambda.abs() {
            log::warn!(
                "split library has no entry for R = {r}, lambda = {lambda}; using lambda = {}",
                entry.lambda
            );
        }
        Ok(entry)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let lib: Self = serde_json::from_str(text)?;
        lib.validate()?;
        Ok(lib)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// The library shipped with the crate (`data/split_library.json`).
    pub fn builtin() -> &'static Self {
        BUILTIN.get_or_init(|| {
            Self::from_json(BUILTIN_JSON).expect("shipped split library is valid")
        })
    }
}

pub const BUILTIN_JSON: &str = include_str!("../data/split_library.json");

pub fn load_library(path: impl AsRef<Path>) -> Result<SplitLibrary> {
    SplitLibrary::load(path)
}

pub fn save_library(lib: &SplitLibrary, path: impl AsRef<Path>) -> Result<()> {
    lib.save(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn quick() -> OptimizerSettings {
        OptimizerSettings {
            starts: 6,
            ..OptimizerSettings::default()
        }
    }

    #[test]
    fn baseline_cost_is_lambda() {
        assert_eq!(split_cost(&[1.0], &[0.0], 1.0, 0.37), 0.37);
        assert_eq!(split_cost(&[1.0], &[0.0], 1.0, 0.0), 0.0);
    }

    #[test]
    fn family_round_trip() {
        let fam = Family::new(5);
        let theta = fam.encode(&[0.5, 1.25], &[0.2, 0.1], Some(0.4), 0.6);
        let (w, m, s) = fam.decode(&theta);
        assert_relative_eq!(s, 0.6, epsilon = 1e-14);
        assert_relative_eq!(m[3], 0.5, epsilon = 1e-14);
        assert_relative_eq!(m[4], 1.25, epsilon = 1e-14);
        assert_relative_eq!(w[2], 0.4, epsilon = 1e-14);
        assert_relative_eq!(w.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn two_way_split_is_symmetric_pair() {
        let p = generate_split(2, 1e-3, &quick()).unwrap();
        assert_eq!(p.weights, vec![0.5, 0.5]);
        assert_eq!(p.means[0], -p.means[1]);
        assert!(p.means[1] > 0.0);
    }

    #[test]
    fn three_way_split_beats_baseline() {
        let p = generate_split(3, 1e-3, &quick()).unwrap();
        assert!(p.converged);
        assert!(p.achieved_cost <= 1e-3);
        assert_eq!(p.mean(), 0.0);
        assert_relative_eq!(p.evaluate_cost(1e-3), p.achieved_cost, epsilon = 1e-15);
    }

    #[test]
    fn sigma_shrinks_as_lambda_grows() {
        let sigmas: Vec<f64> = [1e-4, 1e-3, 1e-2, 1e-1]
            .iter()
            .map(|&l| generate_split(3, l, &quick()).unwrap().sigma)
            .collect();
        for w in sigmas.windows(2) {
            assert!(w[0] >= w[1], "{sigmas:?}");
        }
    }

    #[test]
    fn rejects_bad_requests() {
        assert!(generate_split(1, 1e-3, &quick()).is_err());
        assert!(generate_split(10, 1e-3, &quick()).is_err());
        assert!(generate_split(3, 0.0, &quick()).is_err());
    }

    #[test]
    fn l2_matches_quadrature() {
        let p = SplitParameters {
            components: 3,
            lambda: 1e-3,
            weights: vec![0.25, 0.5, 0.25],
            means: vec![-1.1, 0.0, 1.1],
            sigma: 0.65,
            achieved_cost: 0.0,
            converged: true,
        };
        p.validate().unwrap();
        let f = |x: f64| {
            let q = normal_pdf(x, 1.0);
            let qt: f64 = p
                .weights
                .iter()
                .zip(&p.means)
                .map(|(w, m)| w * normal_pdf(x - m, p.sigma * p.sigma))
                .sum();
            (q - qt) * (q - qt)
        };
        let (lo, hi, n) = (-14.0, 14.0, 40_000);
        let h = (hi - lo) / n as f64;
        let mut s = f(lo) + f(hi);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(lo + i as f64 * h);
        }
        let quad = s * h / 3.0;
        assert_relative_eq!(p.l2_error(), quad, epsilon = 1e-8);
        assert_relative_eq!(split_l2(&p.weights, &p.means, p.sigma), p.l2_error(), epsilon = 1e-15);
        assert_eq!(p.evaluate_cost(0.0), p.l2_error());
    }

    #[test]
    fn validation_catches_violations() {
        let good = SplitParameters {
            components: 2,
            lambda: 1e-3,
            weights: vec![0.5, 0.5],
            means: vec![-1.0, 1.0],
            sigma: 0.5,
            achieved_cost: 0.0,
            converged: true,
        };
        good.validate().unwrap();
        let mut bad = good.clone();
        bad.weights = vec![0.45, 0.45];
        assert!(bad.validate().is_err());
        let mut bad = good.clone();
        bad.means = vec![-1.0, 1.0 + 1e-15];
        assert!(bad.validate().is_err());
        let mut bad = good.clone();
        bad.sigma = 1.0;
        assert!(bad.validate().is_err());
        let mut bad = good;
        bad.means = vec![1.0, -1.0];
        assert!(bad.validate().is_err());
    }

    #[test]
    fn lookup_rules() {
        let lib = SplitLibrary::builtin();
        assert_eq!(lib.get(3, 1e-3).unwrap().lambda, 1e-3);
        assert_eq!(lib.get(3, 2e-3).unwrap().lambda, 1e-3);
        assert_eq!(lib.get(3, 5e-2).unwrap().lambda, 1e-2);
        assert!(matches!(lib.get(7, 1e-3), Err(Error::MissingSplitEntry { r: 7 })));
    }
}
