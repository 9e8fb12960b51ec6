//! Intrinsic depth functions over finite samples of HPD matrices (the
//! empirical measure stands in for the population distribution throughout),
//! center-to-outward ranking, and central depth regions.
//!
//! In-sample depths include the observation itself. The geodesic distance
//! depth uses the mean (not the sum) of distances in the exponent so values
//! are comparable across sample sizes; rankings, regions, and maximizers are
//! unchanged by that monotone reparametrization. Integrated depths divide by
//! the grid length for the same reason.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{to_coordinates, HpdMatrix};
use crate::lp::{zonoid_alpha, ZonoidLp};
use crate::manifold::{dist, whitened_log};

/// Distance below which a query is treated as coinciding with an observation
/// (its singular unit-tangent term is dropped, as in the median solver).
pub(crate) const EPS_COINCIDE: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Samples
// ---------------------------------------------------------------------------

/// Ordered sample of HPD matrices sharing a dimension, with a lazily built
/// matrix of pairwise Riemannian distances (packed lower triangle).
#[derive(Debug)]
pub struct HpdSample {
    dim: usize,
    obs: Vec<HpdMatrix>,
    dist_cache: OnceLock<Vec<f64>>,
}

impl Clone for HpdSample {
    fn clone(&self) -> Self {
        let cache = OnceLock::new();
        if let Some(d) = self.dist_cache.get() {
            let _ = cache.set(d.clone());
        }
        Self {
            dim: self.dim,
            obs: self.obs.clone(),
            dist_cache: cache,
        }
    }
}

impl HpdSample {
    pub fn new(obs: Vec<HpdMatrix>) -> Result<Self> {
        let Some(first) = obs.first() else {
            return Err(Error::Invalid("sample must contain at least one observation".into()));
        };
        let dim = first.dim();
        if obs.iter().any(|m| m.dim() != dim) {
            return Err(Error::Dimension(
                "all observations in a sample must share one dimension".into(),
            ));
        }
        Ok(Self {
            dim,
            obs,
            dist_cache: OnceLock::new(),
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.obs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.obs.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize) -> &HpdMatrix {
        &self.obs[i]
    }

    pub fn observations(&self) -> &[HpdMatrix] {
        &self.obs
    }

    /// Pairwise distance matrix as a packed lower triangle
    /// (`d(i, j) = tri[i (i - 1) / 2 + j]` for `j < i`), built once on first
    /// use, in parallel.
    pub fn distance_matrix(&self) -> &[f64] {
        self.dist_cache.get_or_init(|| {
            let n = self.obs.len();
            (1..n)
                .into_par_iter()
                .flat_map_iter(|i| {
                    let row: Vec<f64> = (0..i).map(|j| dist(&self.obs[i], &self.obs[j])).collect();
                    row
                })
                .collect()
        })
    }

    /// Cached pairwise distance.
    pub fn dist_between(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (hi, lo) = if i > j { (i, j) } else { (j, i) };
        self.distance_matrix()[hi * (hi - 1) / 2 + lo]
    }

    /// Index of an observation bit-identical to `y`, if any.
    pub fn find_exact(&self, y: &HpdMatrix) -> Option<usize> {
        self.obs.iter().position(|x| x == y)
    }
}

/// Rectangular sample of n curves of HPD matrices over a shared ascending
/// grid of T curve indices.
#[derive(Clone, Debug)]
pub struct HpdCurveSample {
    dim: usize,
    grid: Vec<f64>,
    /// n x T
    curves: Vec<Vec<HpdMatrix>>,
}

impl HpdCurveSample {
    pub fn new(grid: Vec<f64>, curves: Vec<Vec<HpdMatrix>>) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::Invalid("curve grid must be non-empty".into()));
        }
        if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("curve grid must be finite and strictly ascending".into()));
        }
        let t_len = grid.len();
        let Some(first_curve) = curves.first() else {
            return Err(Error::Invalid("curve sample must contain at least one curve".into()));
        };
        let Some(first) = first_curve.first() else {
            return Err(Error::Invalid("curves must be non-empty".into()));
        };
        let dim = first.dim();
        if curves.iter().any(|c| c.len() != t_len) {
            return Err(Error::Dimension(
                "every curve must be defined on the full grid".into(),
            ));
        }
        if curves.iter().flatten().any(|m| m.dim() != dim) {
            return Err(Error::Dimension("all curve matrices must share one dimension".into()));
        }
        Ok(Self { dim, grid, curves })
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn t_len(&self) -> usize {
        self.grid.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn curve(&self, i: usize) -> &[HpdMatrix] {
        &self.curves[i]
    }

    /// Marginal sample at grid index `t`.
    pub fn sample_at(&self, t: usize) -> HpdSample {
        HpdSample::new(self.curves.iter().map(|c| c[t].clone()).collect())
            .expect("marginal of a valid curve sample")
    }
}

/// A single curve of HPD matrices on its own grid (query object for the
/// integrated depths).
#[derive(Clone, Debug)]
pub struct HpdCurve {
    grid: Vec<f64>,
    points: Vec<HpdMatrix>,
}

impl HpdCurve {
    pub fn new(grid: Vec<f64>, points: Vec<HpdMatrix>) -> Result<Self> {
        if grid.len() != points.len() || grid.is_empty() {
            return Err(Error::Dimension(
                "curve grid and points must have equal positive length".into(),
            ));
        }
        if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("curve grid must be finite and strictly ascending".into()));
        }
        Ok(Self { grid, points })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn points(&self) -> &[HpdMatrix] {
        &self.points
    }
}

// ---------------------------------------------------------------------------
// Depth methods, reports, regions
// ---------------------------------------------------------------------------

/// Depth function selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DepthMethod {
    Zonoid,
    Gdd,
    Spatial,
    #[serde(rename = "izonoid")]
    IntegratedZonoid,
    #[serde(rename = "igdd")]
    IntegratedGdd,
}

impl DepthMethod {
    pub fn is_integrated(self) -> bool {
        matches!(self, DepthMethod::IntegratedZonoid | DepthMethod::IntegratedGdd)
    }
}

impl std::fmt::Display for DepthMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DepthMethod::Zonoid => "zonoid",
            DepthMethod::Gdd => "gdd",
            DepthMethod::Spatial => "spatial",
            DepthMethod::IntegratedZonoid => "izonoid",
            DepthMethod::IntegratedGdd => "igdd",
        };
        f.write_str(s)
    }
}

/// How equal depth values are ranked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TiePolicy {
    /// Tied observations share the rank of the deepest position in the group.
    Shared,
    /// Ties broken by ascending `|| Log(x) ||_F` (smaller norm ranks deeper).
    Frobenius,
}

/// Per-observation depth values and center-to-outward ranks (1 = deepest).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DepthReport {
    pub method: DepthMethod,
    pub tie_policy: TiePolicy,
    pub values: Vec<f64>,
    pub ranks: Vec<usize>,
}

/// Central depth region: observations whose depth reaches the cutoff.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DepthRegion {
    pub alpha: f64,
    pub beta_star: f64,
    pub member_indices: Vec<usize>,
}

// ---------------------------------------------------------------------------
// Pointwise depths
// ---------------------------------------------------------------------------

/// Tangent coordinate rows of the sample at `y`: coordinates of
/// `Log(y^{-1/2} * x_i)` in the canonical Hermitian basis. By the isometry
/// `<Log_y(x), y^{1/2} * e_i>_y = <Log(y^{-1/2} * x), e_i>_F` these are the
/// basis components of `Log_y(x_i)` in an orthonormal basis of the tangent
/// space at `y`.
fn tangent_coordinate_rows(sample: &HpdSample, y: &HpdMatrix) -> Vec<Vec<f64>> {
    let w = y.inv_sqrt();
    sample
        .observations()
        .iter()
        .map(|x| to_coordinates(&whitened_log(&w, x)).coords)
        .collect()
}

/// Intrinsic zonoid depth of `y` with respect to the empirical distribution
/// of the sample. Requires `n > d^2` (the LP is rejected in the
/// underdetermined regime).
pub fn zonoid_depth(sample: &HpdSample, y: &HpdMatrix) -> Result<f64> {
    let d = sample.dim();
    if y.dim() != d {
        return Err(Error::Dimension("query dimension differs from sample".into()));
    }
    if sample.len() <= d * d {
        return Err(Error::Domain(format!(
            "zonoid depth requires n > d^2 (n = {}, d^2 = {})",
            sample.len(),
            d * d
        )));
    }
    let rows = tangent_coordinate_rows(sample, y);
    zonoid_alpha(&ZonoidLp::new(&rows)?)
}

/// Geodesic distance depth `exp(-mean_i dist(y, x_i))`, in (0, 1].
/// Uses the cached distance matrix when `y` is an in-sample point.
pub fn gdd(sample: &HpdSample, y: &HpdMatrix) -> f64 {
    assert_eq!(sample.dim(), y.dim(), "gdd: dimension mismatch");
    let n = sample.len() as f64;
    let total: f64 = match sample.find_exact(y) {
        Some(i) => (0..sample.len()).map(|j| sample.dist_between(i, j)).sum(),
        None => sample.observations().iter().map(|x| dist(y, x)).sum(),
    };
    (-total / n).exp()
}

/// Intrinsic spatial depth `1 - || mean_i Log(y^{-1/2} * x_i) / dist(y, x_i) ||_F`,
/// in [0, 1]. Terms with `dist < 1e-12` (y coinciding with an observation)
/// are dropped from the sum; the average keeps the full n in the denominator.
pub fn spatial_depth(sample: &HpdSample, y: &HpdMatrix) -> f64 {
    assert_eq!(sample.dim(), y.dim(), "spatial_depth: dimension mismatch");
    let d = sample.dim();
    let n = sample.len() as f64;
    let w = y.inv_sqrt();
    let mut acc = crate::hermitian::HermitianMatrix::zeros(d);
    for x in sample.observations() {
        let l = whitened_log(&w, x);
        let dist_yx = l.fro_norm();
        if dist_yx < EPS_COINCIDE {
            continue;
        }
        acc = acc.add(&l.scale(1.0 / dist_yx));
    }
    (1.0 - acc.fro_norm() / n).clamp(0.0, 1.0)
}

// ---------------------------------------------------------------------------
// Integrated depths
// ---------------------------------------------------------------------------

/// Trapezoidal average of `f(t)` over the grid, normalized by grid length;
/// a single grid point degenerates to the pointwise value.
fn trapezoid_average(grid: &[f64], values: &[f64]) -> f64 {
    debug_assert_eq!(grid.len(), values.len());
    if grid.len() == 1 {
        return values[0];
    }
    let mut integral = 0.0;
    for i in 1..grid.len() {
        integral += 0.5 * (values[i - 1] + values[i]) * (grid[i] - grid[i - 1]);
    }
    integral / (grid[grid.len() - 1] - grid[0])
}

fn check_grids(curves: &HpdCurveSample, y: &HpdCurve) -> Result<()> {
    if curves.grid() != y.grid() {
        return Err(Error::Domain(
            "query curve grid does not match the sample grid".into(),
        ));
    }
    if y.points().iter().any(|m| m.dim() != curves.dim()) {
        return Err(Error::Dimension("query curve dimension differs from sample".into()));
    }
    Ok(())
}

/// Integrated intrinsic zonoid depth: grid-length-normalized trapezoidal
/// average of the pointwise zonoid depths of `y(t)` against the marginal
/// samples.
pub fn integrated_zonoid_depth(curves: &HpdCurveSample, y: &HpdCurve) -> Result<f64> {
    check_grids(curves, y)?;
    let per_t: Result<Vec<f64>> = (0..curves.t_len())
        .map(|t| zonoid_depth(&curves.sample_at(t), &y.points()[t]))
        .collect();
    Ok(trapezoid_average(curves.grid(), &per_t?))
}

/// Integrated geodesic distance depth:
/// `exp(-(grid-normalized integral of the mean distance at each t))`.
pub fn integrated_gdd(curves: &HpdCurveSample, y: &HpdCurve) -> Result<f64> {
    check_grids(curves, y)?;
    let n = curves.len() as f64;
    let mean_dists: Vec<f64> = (0..curves.t_len())
        .map(|t| {
            (0..curves.len())
                .map(|i| dist(&y.points()[t], &curves.curve(i)[t]))
                .sum::<f64>()
                / n
        })
        .collect();
    Ok((-trapezoid_average(curves.grid(), &mean_dists)).exp())
}

// ---------------------------------------------------------------------------
// Ranking and regions
// ---------------------------------------------------------------------------

/// In-sample depth of every observation (observation included in the
/// empirical measure), for a pointwise method.
pub fn in_sample_depths(sample: &HpdSample, method: DepthMethod) -> Result<Vec<f64>> {
    match method {
        DepthMethod::Zonoid => {
            // Shared precondition check before parallel fan-out.
            if sample.len() <= sample.dim() * sample.dim() {
                return Err(Error::Domain(format!(
                    "zonoid depth requires n > d^2 (n = {}, d^2 = {})",
                    sample.len(),
                    sample.dim() * sample.dim()
                )));
            }
            sample
                .observations()
                .par_iter()
                .map(|y| zonoid_depth(sample, y))
                .collect()
        }
        DepthMethod::Gdd => {
            // one pass over the cached distance matrix
            sample.distance_matrix();
            let n = sample.len();
            Ok((0..n)
                .map(|i| {
                    let total: f64 = (0..n).map(|j| sample.dist_between(i, j)).sum();
                    (-total / n as f64).exp()
                })
                .collect())
        }
        DepthMethod::Spatial => Ok(sample
            .observations()
            .par_iter()
            .map(|y| spatial_depth(sample, y))
            .collect()),
        _ => Err(Error::Domain(format!(
            "method {method} applies to curve samples, not point samples"
        ))),
    }
}

/// In-sample integrated depth of every curve, for an integrated method.
pub fn in_sample_curve_depths(curves: &HpdCurveSample, method: DepthMethod) -> Result<Vec<f64>> {
    let t_len = curves.t_len();
    let n = curves.len();
    match method {
        DepthMethod::IntegratedZonoid => {
            let d2 = curves.dim() * curves.dim();
            if n <= d2 {
                return Err(Error::Domain(format!(
                    "integrated zonoid depth requires n > d^2 (n = {n}, d^2 = {d2})"
                )));
            }
            // depth matrix per (t, i), then trapezoid per curve
            let per_t: Result<Vec<Vec<f64>>> = (0..t_len)
                .into_par_iter()
                .map(|t| {
                    let marginal = curves.sample_at(t);
                    in_sample_depths(&marginal, DepthMethod::Zonoid)
                })
                .collect();
            let per_t = per_t?;
            Ok((0..n)
                .map(|i| {
                    let vals: Vec<f64> = (0..t_len).map(|t| per_t[t][i]).collect();
                    trapezoid_average(curves.grid(), &vals)
                })
                .collect())
        }
        DepthMethod::IntegratedGdd => {
            let per_t: Vec<Vec<f64>> = (0..t_len)
                .into_par_iter()
                .map(|t| {
                    let marginal = curves.sample_at(t);
                    marginal.distance_matrix();
                    (0..n)
                        .map(|i| (0..n).map(|j| marginal.dist_between(i, j)).sum::<f64>() / n as f64)
                        .collect()
                })
                .collect();
            Ok((0..n)
                .map(|i| {
                    let vals: Vec<f64> = (0..t_len).map(|t| per_t[t][i]).collect();
                    (-trapezoid_average(curves.grid(), &vals)).exp()
                })
                .collect())
        }
        _ => Err(Error::Domain(format!(
            "method {method} applies to point samples, not curve samples"
        ))),
    }
}

/// Assigns center-to-outward ranks from depth values. `log_norms` supplies
/// the `|| Log(x) ||_F` tie-break for [`TiePolicy::Frobenius`].
fn assign_ranks(values: &[f64], log_norms: &[f64], tie_policy: TiePolicy) -> Vec<usize> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    match tie_policy {
        TiePolicy::Shared => {
            order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).unwrap().then(i.cmp(&j)));
            let mut ranks = vec![0usize; n];
            let mut pos = 0;
            while pos < n {
                let mut end = pos + 1;
                while end < n && values[order[end]] == values[order[pos]] {
                    end += 1;
                }
                for &idx in &order[pos..end] {
                    ranks[idx] = pos + 1;
                }
                pos = end;
            }
            ranks
        }
        TiePolicy::Frobenius => {
            order.sort_by(|&i, &j| {
                values[j]
                    .partial_cmp(&values[i])
                    .unwrap()
                    .then(log_norms[i].partial_cmp(&log_norms[j]).unwrap())
                    .then(i.cmp(&j))
            });
            let mut ranks = vec![0usize; n];
            for (r, &idx) in order.iter().enumerate() {
                ranks[idx] = r + 1;
            }
            ranks
        }
    }
}

/// Center-to-outward ranking of a point sample under a pointwise method.
pub fn rank(sample: &HpdSample, method: DepthMethod, tie_policy: TiePolicy) -> Result<DepthReport> {
    let values = in_sample_depths(sample, method)?;
    let log_norms: Vec<f64> = sample.observations().iter().map(|x| x.log_norm()).collect();
    let ranks = assign_ranks(&values, &log_norms, tie_policy);
    Ok(DepthReport {
        method,
        tie_policy,
        values,
        ranks,
    })
}

/// Center-to-outward ranking of a curve sample under an integrated method.
/// The Frobenius tie-break uses the grid-averaged `|| Log(x(t)) ||_F`.
pub fn rank_curves(
    curves: &HpdCurveSample,
    method: DepthMethod,
    tie_policy: TiePolicy,
) -> Result<DepthReport> {
    let values = in_sample_curve_depths(curves, method)?;
    let log_norms: Vec<f64> = (0..curves.len())
        .map(|i| {
            let norms: Vec<f64> = curves.curve(i).iter().map(|m| m.log_norm()).collect();
            trapezoid_average(curves.grid(), &norms)
        })
        .collect();
    let ranks = assign_ranks(&values, &log_norms, tie_policy);
    Ok(DepthReport {
        method,
        tie_policy,
        values,
        ranks,
    })
}

/// The largest realized cutoff such that at least `ceil((1 - alpha) n)`
/// values reach it, and the indices that do.
pub(crate) fn beta_star_cutoff(values: &[f64], alpha: f64) -> (f64, Vec<usize>) {
    let n = values.len();
    let need = (((1.0 - alpha) * n as f64).ceil() as usize).clamp(1, n);
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let beta_star = sorted[need - 1];
    let members: Vec<usize> = (0..n).filter(|&i| values[i] >= beta_star).collect();
    (beta_star, members)
}

/// Central `100(1 - alpha)%` depth region of the sample under a pointwise
/// method.
pub fn depth_region(sample: &HpdSample, method: DepthMethod, alpha: f64) -> Result<DepthRegion> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain("alpha must lie in (0, 1)".into()));
    }
    let values = in_sample_depths(sample, method)?;
    let (beta_star, member_indices) = beta_star_cutoff(&values, alpha);
    Ok(DepthRegion {
        alpha,
        beta_star,
        member_indices,
    })
}
