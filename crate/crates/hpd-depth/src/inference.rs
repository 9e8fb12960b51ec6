//! Percentile-bootstrap depth-based confidence regions for the intrinsic
//! mean, and membership testing.
//!
//! The region is the set of matrices whose depth with respect to the
//! empirical distribution of the bootstrap intrinsic means reaches the
//! `beta_star` cutoff: the largest realized depth value attained by at least
//! a `1 - alpha` fraction of the bootstrap means. Resampling index streams
//! are derived deterministically from (seed, replicate index), so runs with a
//! shared seed draw identical resamples; that is what makes the congruence
//! equivariance check exact.

use rand::Rng;
use rayon::prelude::*;

use crate::centers::{intrinsic_mean, SolverConfig};
use crate::depth::{beta_star_cutoff, gdd, zonoid_depth, DepthMethod, HpdSample};
use crate::error::{Error, Result};
use crate::hermitian::{congruence_hpd, ComplexMatrix, HpdMatrix};
use crate::manifold::{dist, exp_map};
use crate::sampling::{rng_for, RngSeed};

/// Stream offset for auxiliary draws (test points in the equivariance check),
/// clear of the replicate streams `0..B`.
const AUX_STREAM_BASE: u64 = 1 << 32;

/// Minimum number of bootstrap replicates.
pub const MIN_BOOTSTRAP: usize = 50;

/// A percentile bootstrap confidence region for the intrinsic mean.
#[derive(Clone, Debug)]
pub struct BootstrapCR {
    /// Bootstrap intrinsic means (failed replicates dropped; see `n_failures`).
    boot_means: HpdSample,
    /// In-sample depth of each bootstrap mean w.r.t. their empirical
    /// distribution.
    pub depth_values: Vec<f64>,
    /// Depth cutoff defining membership.
    pub beta_star: f64,
    pub alpha: f64,
    pub method: DepthMethod,
    pub seed: RngSeed,
    /// Intrinsic mean of the original sample (center of the confidence ball).
    pub center: HpdMatrix,
    /// Number of requested replicates.
    pub requested_b: usize,
    /// Replicates whose mean solver failed to converge (dropped).
    pub n_failures: usize,
}

impl BootstrapCR {
    pub fn boot_means(&self) -> &HpdSample {
        &self.boot_means
    }

    /// Indices of bootstrap means inside the region.
    pub fn members(&self) -> Vec<usize> {
        (0..self.depth_values.len())
            .filter(|&i| self.depth_values[i] >= self.beta_star)
            .collect()
    }

    /// Size statistic: distance from the center of the confidence ball to the
    /// furthest member, `max_{i: depth_i >= beta_star} dist(center, mean_i)`.
    pub fn ball_size(&self) -> f64 {
        self.members()
            .into_iter()
            .map(|i| dist(&self.center, self.boot_means.get(i)))
            .fold(0.0, f64::max)
    }
}

fn depth_of(method: DepthMethod, cloud: &HpdSample, y: &HpdMatrix) -> Result<f64> {
    match method {
        DepthMethod::Zonoid => zonoid_depth(cloud, y),
        DepthMethod::Gdd => Ok(gdd(cloud, y)),
        other => Err(Error::Domain(format!(
            "confidence regions support the zonoid and gdd methods, not {other}"
        ))),
    }
}

/// Bootstrap intrinsic means of `b` resamples (with replacement, size n) of
/// the sample. Returns the means that converged and the failure count.
/// Replicate `i` draws its indices from stream `i` of `seed`.
pub fn bootstrap_means(
    sample: &HpdSample,
    b: usize,
    cfg: &SolverConfig,
    seed: RngSeed,
) -> Result<(Vec<HpdMatrix>, usize)> {
    let n = sample.len();
    // Warm the pairwise-distance cache once; every replicate's initialization
    // reads from it.
    sample.distance_matrix();
    let results: Vec<Result<HpdMatrix>> = (0..b)
        .into_par_iter()
        .map(|rep| {
            let mut rng = rng_for(seed, rep as u64);
            let mut counts = vec![0usize; n];
            for _ in 0..n {
                counts[rng.gen_range(0..n)] += 1;
            }
            let weights: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
            intrinsic_mean(sample, Some(&weights), cfg)
        })
        .collect();

    let mut means = Vec::with_capacity(b);
    let mut failures = 0usize;
    for r in results {
        match r {
            Ok(m) => means.push(m),
            Err(Error::Convergence { .. }) => failures += 1,
            Err(e) => return Err(e),
        }
    }
    Ok((means, failures))
}

/// Builds the percentile `100(1 - alpha)%` confidence region for the
/// intrinsic mean: `b` bootstrap intrinsic means, their in-sample depths, and
/// the `beta_star` cutoff. Aborts when more than 1% of replicates fail to
/// converge.
pub fn bootstrap_cr(
    sample: &HpdSample,
    b: usize,
    alpha: f64,
    method: DepthMethod,
    cfg: &SolverConfig,
    seed: RngSeed,
) -> Result<BootstrapCR> {
    if b < MIN_BOOTSTRAP {
        return Err(Error::Domain(format!(
            "bootstrap requires at least {MIN_BOOTSTRAP} replicates (got {b})"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain("alpha must lie in (0, 1)".into()));
    }
    let d2 = sample.dim() * sample.dim();
    if method == DepthMethod::Zonoid && sample.len() <= d2 {
        return Err(Error::Domain(format!(
            "zonoid requires n > d^2 (n = {}, d^2 = {d2})",
            sample.len()
        )));
    }

    let center = intrinsic_mean(sample, None, cfg)?;
    let (means, n_failures) = bootstrap_means(sample, b, cfg, seed)?;
    if n_failures * 100 > b {
        return Err(Error::NumericalFailure(format!(
            "{n_failures} of {b} bootstrap replicates failed to converge (> 1%)"
        )));
    }
    let boot_means = HpdSample::new(means)?;
    from_means(boot_means, alpha, method, seed, center, b, n_failures)
}

/// Assembles a region from precomputed bootstrap means (shared-means path
/// for the coverage experiment, which evaluates several methods on one set of
/// resamples).
pub(crate) fn from_means(
    boot_means: HpdSample,
    alpha: f64,
    method: DepthMethod,
    seed: RngSeed,
    center: HpdMatrix,
    requested_b: usize,
    n_failures: usize,
) -> Result<BootstrapCR> {
    if method == DepthMethod::Zonoid && boot_means.len() <= boot_means.dim() * boot_means.dim() {
        return Err(Error::Domain(
            "zonoid membership needs more bootstrap means than d^2".into(),
        ));
    }
    let depth_values = crate::depth::in_sample_depths(&boot_means, method)?;
    let (beta_star, _) = beta_star_cutoff(&depth_values, alpha);
    Ok(BootstrapCR {
        boot_means,
        depth_values,
        beta_star,
        alpha,
        method,
        seed,
        center,
        requested_b,
        n_failures,
    })
}

/// Membership test: depth of `theta` with respect to the empirical
/// distribution of the bootstrap means, compared against `beta_star`.
pub fn cr_contains(cr: &BootstrapCR, theta: &HpdMatrix) -> Result<bool> {
    if theta.dim() != cr.boot_means.dim() {
        return Err(Error::Dimension(
            "test matrix dimension differs from the bootstrap means".into(),
        ));
    }
    let d = depth_of(cr.method, &cr.boot_means, theta)?;
    Ok(d >= cr.beta_star)
}

/// Outcome of the congruence-equivariance check.
#[derive(Clone, Debug, serde::Serialize)]
pub struct EquivarianceReport {
    pub agreements: usize,
    pub total: usize,
    /// (membership in CR(sample), membership of transformed point in
    /// CR(transformed sample)) per test point.
    pub decisions: Vec<(bool, bool)>,
}

/// Verifies that confidence regions are equivariant under congruence
/// transformation: membership of `theta` in the region of the sample agrees
/// with membership of `a * theta` in the region of `a * sample`, with
/// identical resampling index streams. Test points are drawn around the
/// sample mean from dedicated streams of the same seed.
pub fn cr_equivariance_check(
    sample: &HpdSample,
    a: &ComplexMatrix,
    b: usize,
    alpha: f64,
    method: DepthMethod,
    cfg: &SolverConfig,
    seed: RngSeed,
    n_test: usize,
) -> Result<EquivarianceReport> {
    let transformed = HpdSample::new(
        sample
            .observations()
            .iter()
            .map(|x| congruence_hpd(a, x))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let cr = bootstrap_cr(sample, b, alpha, method, cfg, seed)?;
    let cr_t = bootstrap_cr(&transformed, b, alpha, method, cfg, seed)?;

    // Spread of the bootstrap cloud sets the probe scale so test points fall
    // both inside and outside the region.
    let spread = cr.ball_size().max(1e-3);
    let mut decisions = Vec::with_capacity(n_test);
    let mut agreements = 0usize;
    for j in 0..n_test {
        let mut rng = rng_for(seed, AUX_STREAM_BASE + j as u64);
        let d = sample.dim();
        let coords: Vec<f64> = (0..d * d).map(|_| rng.gen::<f64>() - 0.5).collect();
        let h = crate::hermitian::from_coordinates(&crate::hermitian::BasisCoordinates {
            dim: d,
            coords,
        })?;
        let r = 2.5 * spread * rng.gen::<f64>();
        let h = h.scale(r / h.fro_norm().max(1e-300));
        let theta = exp_map(&cr.center, &h)?;
        let theta_t = congruence_hpd(a, &theta)?;
        let inside = cr_contains(&cr, &theta)?;
        let inside_t = cr_contains(&cr_t, &theta_t)?;
        if inside == inside_t {
            agreements += 1;
        }
        decisions.push((inside, inside_t));
    }
    Ok(EquivarianceReport {
        agreements,
        total: n_test,
        decisions,
    })
}
