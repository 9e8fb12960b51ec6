//! Scripted simulation harnesses: depth-rank breakdown under contamination,
//! relative efficiency of the depth medians, depth computation timing
//! profiles, and bootstrap coverage studies.
//!
//! Every report embeds its full parameters and seed; re-running a report's
//! parameters reproduces its results bit-exactly apart from wall-clock timing
//! cells. Replicates draw from seeds derived with a splitmix64 chain, so they
//! are independent and order-stable under data-parallel execution.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::centers::{intrinsic_mean, intrinsic_median, SolverConfig};
use crate::depth::{
    gdd, rank, spatial_depth, zonoid_depth, DepthMethod, DepthReport, HpdSample, TiePolicy,
};
use crate::error::{Error, Result};
use crate::hermitian::{eigh, hermitian_basis, HpdMatrix};
use crate::inference::{bootstrap_means, from_means};
use crate::manifold::{dist, exp_map};
use crate::sampling::{sample_lognormal, sample_pgnd, RngSeed};

impl RngSeed {
    /// Derived child seed (splitmix64 of seed xor index), for independent
    /// replicate streams.
    pub fn child(self, index: u64) -> RngSeed {
        let mut z = self
            .0
            .wrapping_add(0x9E3779B97F4A7C15u64.wrapping_mul(index.wrapping_add(1)));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        RngSeed(z ^ (z >> 31))
    }
}

/// Tangent standard deviation of the clean log-normal samples used by the
/// breakdown and timing harnesses (the variance-1/2 construction).
pub const CLEAN_SIGMA: f64 = std::f64::consts::FRAC_1_SQRT_2;

// ---------------------------------------------------------------------------
// Breakdown experiment
// ---------------------------------------------------------------------------

/// How the contaminating observations are placed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContaminationScheme {
    /// m identical far points `Exp(s e1)`.
    Identical,
    /// m - 1 identical far points plus a final contaminant placed at the
    /// intrinsic mean of the already-contaminated sample (the two-point
    /// attack that breaks the zonoid ranking).
    AdversarialMeanSecond,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BreakdownParams {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    /// Requested tangent-space Frobenius norm of the contamination.
    pub contamination_norm: f64,
    pub scheme: ContaminationScheme,
    pub seed: RngSeed,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BreakdownMethodOutcome {
    pub method: DepthMethod,
    pub tie_policy: TiePolicy,
    /// rank of each observation, clean first (indices 0..n), then contaminants
    pub ranks: Vec<usize>,
    pub contaminant_ranks: Vec<usize>,
    /// Largest `|| Log(z) ||_F` among observations ranked in the first n.
    pub max_lognorm_first_n: f64,
    pub rank1_lognorm: f64,
    /// Entrywise Frobenius norm of the rank-1 observation.
    pub rank1_fro_norm: f64,
    pub all_contaminants_ranked_last: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BreakdownReport {
    pub params: BreakdownParams,
    /// Requested contamination norm clipped to what the matrix exponential
    /// can represent (eigenvalue cap ~700).
    pub applied_contamination_norm: f64,
    pub clean_max_lognorm: f64,
    pub outcomes: Vec<BreakdownMethodOutcome>,
}

/// Ranks a contaminated sample under every pointwise method and tie policy,
/// reporting how far contamination travels up the center-to-outward order.
///
/// Clean data are log-normal around the identity; contaminants sit at
/// `Exp(s e1)` along the first canonical tangent direction, with `s` clipped
/// so the exponential stays representable. Under the adversarial scheme the
/// final contaminant is placed at the intrinsic mean of the contaminated
/// sample, which maximizes the zonoid depth by construction.
pub fn breakdown_rank_experiment(params: &BreakdownParams) -> Result<BreakdownReport> {
    if params.m < 1 {
        return Err(Error::Domain("breakdown requires m >= 1".into()));
    }
    if params.scheme == ContaminationScheme::AdversarialMeanSecond && params.m < 2 {
        return Err(Error::Domain(
            "the adversarial scheme places two or more contaminants".into(),
        ));
    }
    if !(params.contamination_norm > 0.0) {
        return Err(Error::Domain("contamination norm must be positive".into()));
    }
    let d = params.d;
    let clean = sample_lognormal(
        &HpdMatrix::identity(d),
        CLEAN_SIGMA,
        params.n,
        params.seed.child(0),
    )?;

    // direction e1 = E_11; cap the travel so Exp stays inside f64 range
    let direction = hermitian_basis(d)[0].clone();
    let max_eig = eigh(&direction)?
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, &l| m.max(l.abs()));
    let applied = params
        .contamination_norm
        .min(crate::hermitian::EXP_EIG_CAP / max_eig);
    let far = exp_map(&HpdMatrix::identity(d), &direction.scale(applied))?;

    let mut obs = clean.observations().to_vec();
    match params.scheme {
        ContaminationScheme::Identical => {
            obs.extend(std::iter::repeat(far).take(params.m));
        }
        ContaminationScheme::AdversarialMeanSecond => {
            obs.extend(std::iter::repeat(far).take(params.m - 1));
            let partial = HpdSample::new(obs.clone())?;
            let dragged_mean = intrinsic_mean(&partial, None, &SolverConfig::default())?;
            obs.push(dragged_mean);
        }
    }
    let contaminated = HpdSample::new(obs)?;
    let clean_max_lognorm = clean
        .observations()
        .iter()
        .map(|x| x.log_norm())
        .fold(0.0, f64::max);

    let methods = [DepthMethod::Zonoid, DepthMethod::Gdd, DepthMethod::Spatial];
    let policies = [TiePolicy::Shared, TiePolicy::Frobenius];
    let mut outcomes = Vec::new();
    for method in methods {
        if method == DepthMethod::Zonoid && contaminated.len() <= d * d {
            continue;
        }
        for tie_policy in policies {
            let report = rank(&contaminated, method, tie_policy)?;
            outcomes.push(summarize_breakdown(
                &contaminated,
                params.n,
                params.m,
                &report,
            ));
        }
    }
    Ok(BreakdownReport {
        params: params.clone(),
        applied_contamination_norm: applied,
        clean_max_lognorm,
        outcomes,
    })
}

fn summarize_breakdown(
    sample: &HpdSample,
    n: usize,
    m: usize,
    report: &DepthReport,
) -> BreakdownMethodOutcome {
    let lognorms: Vec<f64> = sample.observations().iter().map(|x| x.log_norm()).collect();
    let max_lognorm_first_n = (0..n + m)
        .filter(|&i| report.ranks[i] <= n)
        .map(|i| lognorms[i])
        .fold(0.0, f64::max);
    let rank1 = (0..n + m)
        .min_by_key(|&i| report.ranks[i])
        .expect("non-empty sample");
    let contaminant_ranks: Vec<usize> = (n..n + m).map(|i| report.ranks[i]).collect();
    BreakdownMethodOutcome {
        method: report.method,
        tie_policy: report.tie_policy,
        ranks: report.ranks.clone(),
        all_contaminants_ranked_last: contaminant_ranks.iter().all(|&r| r > n),
        contaminant_ranks,
        max_lognorm_first_n,
        rank1_lognorm: lognorms[rank1],
        rank1_fro_norm: sample.get(rank1).fro_norm(),
    }
}

// ---------------------------------------------------------------------------
// Efficiency experiment
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EfficiencyParams {
    pub d: usize,
    pub n: usize,
    pub p: f64,
    pub replications: usize,
    pub seed: RngSeed,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub params: EfficiencyParams,
    /// `E[dist(median, Id)^2] / E[dist(mean, Id)^2]`: above 1 means the
    /// intrinsic mean (zonoid depth-median) is the more efficient estimator.
    pub relative_efficiency: f64,
    pub re_standard_error: f64,
    pub mean_mse: f64,
    pub median_mse: f64,
}

/// Monte-Carlo relative efficiency of the geodesic-distance depth-median
/// (the intrinsic median) against the zonoid depth-median (the intrinsic
/// mean), under p-GND tangent noise centered at the identity.
pub fn efficiency_experiment(params: &EfficiencyParams) -> Result<EfficiencyReport> {
    if params.replications < 2 {
        return Err(Error::Domain("efficiency needs at least 2 replications".into()));
    }
    let id = HpdMatrix::identity(params.d);
    let cfg = SolverConfig::default();
    let pairs: Vec<(f64, f64)> = (0..params.replications)
        .into_par_iter()
        .map(|rep| -> Result<(f64, f64)> {
            let s = sample_pgnd(&id, params.p, params.n, params.seed.child(rep as u64))?;
            let mean = intrinsic_mean(&s, None, &cfg)?;
            let median = intrinsic_median(&s, &cfg)?;
            Ok((dist(&median, &id).powi(2), dist(&mean, &id).powi(2)))
        })
        .collect::<Result<Vec<_>>>()?;

    let nrep = pairs.len() as f64;
    let a_mean = pairs.iter().map(|p| p.0).sum::<f64>() / nrep; // median squared errors
    let b_mean = pairs.iter().map(|p| p.1).sum::<f64>() / nrep; // mean squared errors
    let re = a_mean / b_mean;
    // delta-method standard error of the ratio of paired means
    let var_a = pairs.iter().map(|p| (p.0 - a_mean).powi(2)).sum::<f64>() / (nrep - 1.0);
    let var_b = pairs.iter().map(|p| (p.1 - b_mean).powi(2)).sum::<f64>() / (nrep - 1.0);
    let cov = pairs
        .iter()
        .map(|p| (p.0 - a_mean) * (p.1 - b_mean))
        .sum::<f64>()
        / (nrep - 1.0);
    let var_re = (re * re) * (var_a / (a_mean * a_mean) + var_b / (b_mean * b_mean)
        - 2.0 * cov / (a_mean * b_mean))
        / nrep;
    Ok(EfficiencyReport {
        params: params.clone(),
        relative_efficiency: re,
        re_standard_error: var_re.max(0.0).sqrt(),
        mean_mse: b_mean,
        median_mse: a_mean,
    })
}

// ---------------------------------------------------------------------------
// Timing profile
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TimingParams {
    pub d_list: Vec<usize>,
    pub n_list: Vec<usize>,
    pub methods: Vec<DepthMethod>,
    /// Wall-clock repetitions per cell (at least 20).
    pub reps: usize,
    pub seed: RngSeed,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TimingCell {
    pub method: DepthMethod,
    pub d: usize,
    pub n: usize,
    /// Median wall time of one depth evaluation; `None` for skipped cells.
    pub median_ms: Option<f64>,
    /// Zonoid cells with `d^2 >= n` are infeasible and skipped.
    pub skipped: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TimingReport {
    pub params: TimingParams,
    pub cells: Vec<TimingCell>,
}

/// Median wall time of a single depth evaluation of one matrix against a
/// sample, per (method, d, n) cell. Runs on one thread; timing cells are not
/// parallelized to avoid contention noise.
pub fn timing_profile(params: &TimingParams) -> Result<TimingReport> {
    if params.reps < 20 {
        return Err(Error::Domain("timing needs at least 20 repetitions per cell".into()));
    }
    let mut cells = Vec::new();
    let mut cell_index = 0u64;
    for &method in &params.methods {
        if method.is_integrated() {
            return Err(Error::Domain(
                "timing profiles cover the pointwise methods".into(),
            ));
        }
        for &d in &params.d_list {
            for &n in &params.n_list {
                cell_index += 1;
                if method == DepthMethod::Zonoid && d * d >= n {
                    cells.push(TimingCell {
                        method,
                        d,
                        n,
                        median_ms: None,
                        skipped: true,
                    });
                    continue;
                }
                let seed = params.seed.child(cell_index);
                let sample = sample_lognormal(&HpdMatrix::identity(d), CLEAN_SIGMA, n, seed)?;
                let query = sample_lognormal(
                    &HpdMatrix::identity(d),
                    CLEAN_SIGMA,
                    1,
                    seed.child(u64::MAX),
                )?
                .get(0)
                .clone();
                let mut times_ms = Vec::with_capacity(params.reps);
                for _ in 0..params.reps {
                    let t0 = std::time::Instant::now();
                    match method {
                        DepthMethod::Zonoid => {
                            std::hint::black_box(zonoid_depth(&sample, &query)?);
                        }
                        DepthMethod::Gdd => {
                            std::hint::black_box(gdd(&sample, &query));
                        }
                        DepthMethod::Spatial => {
                            std::hint::black_box(spatial_depth(&sample, &query));
                        }
                        _ => unreachable!(),
                    }
                    times_ms.push(t0.elapsed().as_secs_f64() * 1e3);
                }
                times_ms.sort_by(|a, b| a.partial_cmp(b).unwrap());
                cells.push(TimingCell {
                    method,
                    d,
                    n,
                    median_ms: Some(times_ms[times_ms.len() / 2]),
                    skipped: false,
                });
            }
        }
    }
    Ok(TimingReport {
        params: params.clone(),
        cells,
    })
}

// ---------------------------------------------------------------------------
// Coverage experiment
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverageParams {
    pub d: usize,
    pub n: usize,
    pub p: f64,
    pub b: usize,
    pub simulations: usize,
    pub alphas: Vec<f64>,
    pub seed: RngSeed,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverageRow {
    pub method: DepthMethod,
    pub alpha: f64,
    pub ave_beta_star: f64,
    /// Average distance from the sample mean to the furthest member of the
    /// confidence region.
    pub ave_size: f64,
    /// Fraction of simulations whose region contains the population mean
    /// (the identity).
    pub coverage: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverageReport {
    pub params: CoverageParams,
    pub rows: Vec<CoverageRow>,
    pub solver_failures: usize,
}

/// Empirical coverage of the percentile bootstrap confidence regions for the
/// intrinsic mean under p-GND data centered at the identity: per (method,
/// alpha), the average depth cutoff, the average region size, and how often
/// the identity is covered. Both the zonoid and gdd regions are evaluated on
/// the same bootstrap means within each simulation.
pub fn coverage_experiment(params: &CoverageParams) -> Result<CoverageReport> {
    if params.simulations < 1 {
        return Err(Error::Domain("coverage needs at least one simulation".into()));
    }
    if params.alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
        return Err(Error::Domain("alphas must lie in (0, 1)".into()));
    }
    let methods = [DepthMethod::Zonoid, DepthMethod::Gdd];
    let id = HpdMatrix::identity(params.d);
    let cfg = SolverConfig::default();

    struct SimOutcome {
        /// per method, per alpha: (beta_star, size, covered)
        stats: Vec<Vec<(f64, f64, bool)>>,
        failures: usize,
    }

    let sims: Vec<SimOutcome> = (0..params.simulations)
        .into_par_iter()
        .map(|s| -> Result<SimOutcome> {
            let sim_seed = params.seed.child(s as u64);
            let sample = sample_pgnd(&id, params.p, params.n, sim_seed.child(0))?;
            let center = intrinsic_mean(&sample, None, &cfg)?;
            let boot_seed = sim_seed.child(1);
            let (means, failures) = bootstrap_means(&sample, params.b, &cfg, boot_seed)?;
            if failures * 100 > params.b {
                return Err(Error::NumericalFailure(format!(
                    "simulation {s}: {failures} of {} bootstrap replicates failed",
                    params.b
                )));
            }
            let means = HpdSample::new(means)?;
            let mut stats = Vec::with_capacity(methods.len());
            for method in methods {
                let mut per_alpha = Vec::with_capacity(params.alphas.len());
                // one region object per alpha over the same means and depths
                let depth_id = match method {
                    DepthMethod::Zonoid => zonoid_depth(&means, &id)?,
                    DepthMethod::Gdd => gdd(&means, &id),
                    _ => unreachable!(),
                };
                for &alpha in &params.alphas {
                    let cr = from_means(
                        means.clone(),
                        alpha,
                        method,
                        boot_seed,
                        center.clone(),
                        params.b,
                        failures,
                    )?;
                    per_alpha.push((cr.beta_star, cr.ball_size(), depth_id >= cr.beta_star));
                }
                stats.push(per_alpha);
            }
            Ok(SimOutcome { stats, failures })
        })
        .collect::<Result<Vec<_>>>()?;

    let nsim = sims.len() as f64;
    let mut rows = Vec::new();
    for (mi, &method) in methods.iter().enumerate() {
        for (ai, &alpha) in params.alphas.iter().enumerate() {
            let mut beta_sum = 0.0;
            let mut size_sum = 0.0;
            let mut covered = 0usize;
            for sim in &sims {
                let (b, s, c) = sim.stats[mi][ai];
                beta_sum += b;
                size_sum += s;
                covered += c as usize;
            }
            rows.push(CoverageRow {
                method,
                alpha,
                ave_beta_star: beta_sum / nsim,
                ave_size: size_sum / nsim,
                coverage: covered as f64 / nsim,
            });
        }
    }
    Ok(CoverageReport {
        params: params.clone(),
        rows,
        solver_failures: sims.iter().map(|s| s.failures).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_chain_is_deterministic_and_spread() {
        let s = RngSeed(7);
        assert_eq!(s.child(0), s.child(0));
        assert_ne!(s.child(0), s.child(1));
        assert_ne!(s.child(0), RngSeed(8).child(0));
    }

    #[test]
    fn breakdown_m0_is_rejected_m1_runs() {
        let params = BreakdownParams {
            n: 10,
            m: 0,
            d: 2,
            contamination_norm: 1e4,
            scheme: ContaminationScheme::Identical,
            seed: RngSeed(1),
        };
        assert!(breakdown_rank_experiment(&params).is_err());

        let params = BreakdownParams {
            m: 1,
            ..params
        };
        let report = breakdown_rank_experiment(&params).unwrap();
        assert!(report.applied_contamination_norm <= 700.0);
        assert!(!report.outcomes.is_empty());
    }

    #[test]
    fn breakdown_gdd_ranks_contaminants_last() {
        let params = BreakdownParams {
            n: 20,
            m: 9,
            d: 2,
            contamination_norm: 1e4,
            scheme: ContaminationScheme::Identical,
            seed: RngSeed(2),
        };
        let report = breakdown_rank_experiment(&params).unwrap();
        let gdd_outcome = report
            .outcomes
            .iter()
            .find(|o| o.method == DepthMethod::Gdd && o.tie_policy == TiePolicy::Shared)
            .unwrap();
        assert!(gdd_outcome.all_contaminants_ranked_last);
        assert!(gdd_outcome.max_lognorm_first_n <= report.clean_max_lognorm + 1e-12);
    }

    #[test]
    fn breakdown_zonoid_adversary_takes_rank_one() {
        let params = BreakdownParams {
            n: 20,
            m: 2,
            d: 2,
            contamination_norm: 1e4,
            scheme: ContaminationScheme::AdversarialMeanSecond,
            seed: RngSeed(3),
        };
        let report = breakdown_rank_experiment(&params).unwrap();
        let z = report
            .outcomes
            .iter()
            .find(|o| o.method == DepthMethod::Zonoid && o.tie_policy == TiePolicy::Frobenius)
            .unwrap();
        // the dragged-mean contaminant (last observation) sits at rank 1
        assert_eq!(*z.ranks.last().unwrap(), 1);
        assert!(z.rank1_lognorm > report.clean_max_lognorm);
        assert!(z.rank1_fro_norm > 1e3);
    }

    #[test]
    fn efficiency_is_reproducible() {
        let params = EfficiencyParams {
            d: 2,
            n: 20,
            p: 2.0,
            replications: 30,
            seed: RngSeed(4),
        };
        let a = efficiency_experiment(&params).unwrap();
        let b = efficiency_experiment(&params).unwrap();
        assert_eq!(a.relative_efficiency.to_bits(), b.relative_efficiency.to_bits());
        assert!(a.relative_efficiency.is_finite() && a.relative_efficiency > 0.0);
        assert!(a.re_standard_error >= 0.0);
    }

    #[test]
    fn timing_skips_infeasible_zonoid_cells() {
        let params = TimingParams {
            d_list: vec![2, 4],
            n_list: vec![10, 40],
            methods: vec![DepthMethod::Zonoid, DepthMethod::Gdd],
            reps: 20,
            seed: RngSeed(5),
        };
        let report = timing_profile(&params).unwrap();
        for cell in &report.cells {
            if cell.method == DepthMethod::Zonoid && cell.d * cell.d >= cell.n {
                assert!(cell.skipped && cell.median_ms.is_none());
            } else {
                assert!(!cell.skipped && cell.median_ms.is_some());
            }
        }
    }

    #[test]
    fn coverage_desk_scale_smoke() {
        let params = CoverageParams {
            d: 2,
            n: 30,
            p: 2.0,
            b: 60,
            simulations: 10,
            alphas: vec![0.2, 0.05],
            seed: RngSeed(6),
        };
        let report = coverage_experiment(&params).unwrap();
        assert_eq!(report.rows.len(), 4);
        for row in &report.rows {
            assert!((0.0..=1.0).contains(&row.coverage));
            assert!(row.ave_size > 0.0);
        }
        // nesting: coverage at alpha = 0.05 is at least coverage at 0.2
        for mi in 0..2 {
            let wide = &report.rows[mi * 2 + 1];
            let narrow = &report.rows[mi * 2];
            assert!(wide.coverage >= narrow.coverage);
        }
        // reproducibility
        let again = coverage_experiment(&params).unwrap();
        for (a, b) in report.rows.iter().zip(again.rows.iter()) {
            assert_eq!(a.coverage.to_bits(), b.coverage.to_bits());
            assert_eq!(a.ave_size.to_bits(), b.ave_size.to_bits());
        }
    }
}
