//! Intrinsic (Karcher/Frechet) mean and intrinsic (geometric) median of a
//! sample of HPD matrices.
//!
//! Both solvers iterate in the whitened frame: with `w = mu^{-1/2}` and
//! `s = mu^{1/2}`, the gradient direction `sum_i w_i Log_mu(x_i)` equals
//! `s * (sum_i w_i Log(w * x_i)) * s`, so one eigendecomposition per
//! observation per iteration suffices and the update is
//! `mu <- s * Exp(step * g_hat) * s`. Initialization is the observation with
//! the smallest (weighted) sum of distances to the rest, which is
//! deterministic and robust. Steps start at the configured value and halve
//! whenever the objective fails to decrease.

use crate::depth::HpdSample;
use crate::error::{Error, Result};
use crate::hermitian::{congruence_unchecked, eigh, HermitianMatrix, HpdMatrix};
use crate::manifold::whitened_log;

/// Distance below which the median's Weiszfeld kernel treats an iterate as
/// sitting on an observation and drops that observation's term.
pub const EPS_MEDIAN: f64 = 1e-12;

/// Iteration controls for the center solvers.
#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    pub max_iter: usize,
    /// Threshold on the tangent-update norm, relative to the sample scale.
    pub tol: f64,
    /// Initial step size.
    pub step: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iter: 200,
            tol: 1e-10,
            step: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter < 1 {
            return Err(Error::Domain("max_iter must be at least 1".into()));
        }
        if !(self.tol > 0.0) || !(self.step > 0.0) {
            return Err(Error::Domain("tol and step must be positive".into()));
        }
        Ok(())
    }
}

fn validate_weights(sample: &HpdSample, weights: Option<&[f64]>) -> Result<Vec<f64>> {
    let n = sample.len();
    match weights {
        None => Ok(vec![1.0 / n as f64; n]),
        Some(w) => {
            if w.len() != n {
                return Err(Error::Dimension(format!(
                    "expected {n} weights, got {}",
                    w.len()
                )));
            }
            if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::Invalid("weights must be finite and nonnegative".into()));
            }
            let total: f64 = w.iter().sum();
            if !(total > 0.0) || (total - 1.0).abs() > 1e-9 {
                return Err(Error::Invalid(format!(
                    "weights must sum to 1 (got {total})"
                )));
            }
            Ok(w.iter().map(|v| v / total).collect())
        }
    }
}

/// Observation index minimizing the weighted sum of distances to the sample:
/// the deterministic starting point for both solvers.
fn deepest_proxy_index(sample: &HpdSample, weights: &[f64], support: &[usize]) -> usize {
    let mut best = support[0];
    let mut best_sum = f64::INFINITY;
    for &i in support {
        let s: f64 = support
            .iter()
            .map(|&j| weights[j] * sample.dist_between(i, j))
            .sum();
        if s < best_sum {
            best_sum = s;
            best = i;
        }
    }
    best
}

/// Weighted mean pairwise distance over the support; the convergence
/// tolerance is relative to this scale.
fn pairwise_scale(sample: &HpdSample, weights: &[f64], support: &[usize]) -> f64 {
    let mut acc = 0.0;
    let mut mass = 0.0;
    for &i in support {
        for &j in support {
            if i == j {
                continue;
            }
            let w = weights[i] * weights[j];
            acc += w * sample.dist_between(i, j);
            mass += w;
        }
    }
    if mass > 0.0 {
        acc / mass
    } else {
        0.0
    }
}

struct GradientEval {
    /// whitened gradient direction (frame of the current iterate)
    direction: HermitianMatrix,
    /// `|| sum_i w_i Log_mu(x_i) ||_F` in the ambient frame
    residual: f64,
    /// current objective value
    objective: f64,
}

/// Intrinsic mean: the minimizer of the weighted sum of squared Riemannian
/// distances, found by the fixed-point iteration
/// `mu <- Exp_mu(step * sum_i w_i Log_mu(x_i))`. Returns once
/// `|| sum_i w_i Log_mu(x_i) ||_F <= tol x (mean pairwise distance)`.
/// `weights` default to uniform; zero-weight observations are skipped,
/// which is how bootstrap resamples reuse one sample.
pub fn intrinsic_mean(
    sample: &HpdSample,
    weights: Option<&[f64]>,
    cfg: &SolverConfig,
) -> Result<HpdMatrix> {
    cfg.validate()?;
    let weights = validate_weights(sample, weights)?;
    let support: Vec<usize> = (0..sample.len()).filter(|&i| weights[i] > 0.0).collect();
    if support.is_empty() {
        return Err(Error::Domain("all weights are zero".into()));
    }

    let scale = pairwise_scale(sample, &weights, &support);
    if scale == 0.0 {
        return Ok(sample.get(support[0]).clone());
    }
    let threshold = cfg.tol * scale;

    let eval = |mu: &HpdMatrix| -> GradientEval {
        let w = mu.inv_sqrt();
        let s = mu.sqrt();
        let mut g = HermitianMatrix::zeros(sample.dim());
        let mut objective = 0.0;
        for &i in &support {
            let l = whitened_log(&w, sample.get(i));
            let d = l.fro_norm();
            objective += weights[i] * d * d;
            g = g.add(&l.scale(weights[i]));
        }
        let residual = congruence_unchecked(s.as_complex(), &g).fro_norm();
        GradientEval {
            direction: g,
            residual,
            objective,
        }
    };

    let mut mu = sample.get(deepest_proxy_index(sample, &weights, &support)).clone();
    let mut cur = eval(&mu);
    for _ in 0..cfg.max_iter {
        if cur.residual <= threshold {
            return Ok(mu);
        }
        let s = mu.sqrt();
        let mut step = cfg.step;
        loop {
            let update = eigh(&cur.direction.scale(step))?.reconstruct_with(f64::exp);
            let candidate =
                HpdMatrix::from_hermitian_unchecked(congruence_unchecked(s.as_complex(), &update))?;
            let next = eval(&candidate);
            if next.objective <= cur.objective * (1.0 + 1e-14) || next.residual <= threshold {
                mu = candidate;
                cur = next;
                break;
            }
            step *= 0.5;
            if step < 1e-8 {
                return Err(Error::Convergence {
                    iterations: cfg.max_iter,
                    residual: cur.residual,
                    last: Box::new(mu),
                });
            }
        }
    }
    if cur.residual <= threshold {
        return Ok(mu);
    }
    Err(Error::Convergence {
        iterations: cfg.max_iter,
        residual: cur.residual,
        last: Box::new(mu),
    })
}

/// Intrinsic median: the minimizer of the sum of Riemannian distances, found
/// by a guarded manifold Weiszfeld iteration
/// `m <- Exp_m(t_k (sum_i Log_m(x_i)/d_i) / (sum_i 1/d_i))` with terms at
/// `d_i < 1e-12` dropped. Returns once
/// `|| sum_i Log_m(x_i)/d_i ||_F <= tol x n` (skipped terms excluded).
pub fn intrinsic_median(sample: &HpdSample, cfg: &SolverConfig) -> Result<HpdMatrix> {
    cfg.validate()?;
    let n = sample.len();
    let weights = vec![1.0 / n as f64; n];
    let support: Vec<usize> = (0..n).collect();
    let threshold = cfg.tol * n as f64;

    struct MedianEval {
        direction: Option<HermitianMatrix>,
        residual: f64,
        objective: f64,
    }

    let eval = |m: &HpdMatrix| -> MedianEval {
        let w = m.inv_sqrt();
        let s = m.sqrt();
        let mut num = HermitianMatrix::zeros(sample.dim());
        let mut den = 0.0;
        let mut objective = 0.0;
        for x in sample.observations() {
            let l = whitened_log(&w, x);
            let d = l.fro_norm();
            objective += d;
            if d < EPS_MEDIAN {
                continue;
            }
            num = num.add(&l.scale(1.0 / d));
            den += 1.0 / d;
        }
        let residual = congruence_unchecked(s.as_complex(), &num).fro_norm();
        let direction = (den > 0.0).then(|| num.scale(1.0 / den));
        MedianEval {
            direction,
            residual,
            objective,
        }
    };

    let mut m = sample.get(deepest_proxy_index(sample, &weights, &support)).clone();
    let mut cur = eval(&m);
    for _ in 0..cfg.max_iter {
        if cur.residual <= threshold {
            return Ok(m);
        }
        let Some(direction) = cur.direction.clone() else {
            return Ok(m); // every observation coincides with the iterate
        };
        let s = m.sqrt();
        let mut step = cfg.step;
        loop {
            let update = eigh(&direction.scale(step))?.reconstruct_with(f64::exp);
            let candidate =
                HpdMatrix::from_hermitian_unchecked(congruence_unchecked(s.as_complex(), &update))?;
            let next = eval(&candidate);
            if next.objective <= cur.objective * (1.0 + 1e-14) || next.residual <= threshold {
                m = candidate;
                cur = next;
                break;
            }
            step *= 0.5;
            if step < 1e-8 {
                return Err(Error::Convergence {
                    iterations: cfg.max_iter,
                    residual: cur.residual,
                    last: Box::new(m),
                });
            }
        }
    }
    if cur.residual <= threshold {
        return Ok(m);
    }
    Err(Error::Convergence {
        iterations: cfg.max_iter,
        residual: cur.residual,
        last: Box::new(m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{from_coordinates, hermitian_exp, BasisCoordinates};
    use crate::manifold::{dist, exp_map, log_map};
    use crate::sampling::{sample_lognormal, RngSeed};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hpd_1d(x: f64) -> HpdMatrix {
        hermitian_exp(&HermitianMatrix::identity(1).scale(x.ln())).unwrap()
    }

    fn diag2(a: f64, b: f64) -> HpdMatrix {
        let h = from_coordinates(&BasisCoordinates {
            dim: 2,
            coords: vec![a.ln(), b.ln(), 0.0, 0.0],
        })
        .unwrap();
        hermitian_exp(&h).unwrap()
    }

    #[test]
    fn mean_of_single_point_is_that_point() {
        let p = diag2(2.0, 0.5);
        let s = HpdSample::new(vec![p.clone()]).unwrap();
        let mu = intrinsic_mean(&s, None, &SolverConfig::default()).unwrap();
        assert!(mu.base().sub(p.base()).fro_norm() < 1e-12);
    }

    #[test]
    fn mean_of_commuting_pair_is_geometric_midpoint() {
        let e2 = std::f64::consts::E.powi(2);
        let s = HpdSample::new(vec![diag2(1.0, 1.0), diag2(e2, e2)]).unwrap();
        let mu = intrinsic_mean(&s, None, &SolverConfig::default()).unwrap();
        let want = diag2(std::f64::consts::E, std::f64::consts::E);
        assert!(dist(&mu, &want) < 1e-9);
    }

    #[test]
    fn mean_1d_is_geometric_mean() {
        let vals = [0.5, 2.0, 3.0, 10.0];
        let s = HpdSample::new(vals.iter().map(|&v| hpd_1d(v)).collect()).unwrap();
        let mu = intrinsic_mean(&s, None, &SolverConfig::default()).unwrap();
        let want = (vals.iter().map(|v| v.ln()).sum::<f64>() / vals.len() as f64).exp();
        assert!((mu.entry(0, 0).re - want).abs() < 1e-9);
    }

    #[test]
    fn mean_residual_is_small_at_solution() {
        let s = sample_lognormal(&HpdMatrix::identity(2), 0.8, 20, RngSeed(13)).unwrap();
        let mu = intrinsic_mean(&s, None, &SolverConfig::default()).unwrap();
        let mut g = HermitianMatrix::zeros(2);
        for x in s.observations() {
            g = g.add(&log_map(&mu, x).scale(1.0 / 20.0));
        }
        assert!(g.fro_norm() < 1e-9);
    }

    #[test]
    fn mean_locally_minimizes_objective() {
        let s = sample_lognormal(&HpdMatrix::identity(2), 0.8, 15, RngSeed(14)).unwrap();
        let mu = intrinsic_mean(&s, None, &SolverConfig::default()).unwrap();
        let objective = |p: &HpdMatrix| -> f64 {
            s.observations().iter().map(|x| dist(p, x).powi(2)).sum()
        };
        let f0 = objective(&mu);
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..20 {
            let coords: Vec<f64> = (0..4).map(|_| rng.gen::<f64>() - 0.5).collect();
            let h = from_coordinates(&BasisCoordinates { dim: 2, coords }).unwrap();
            let h = h.scale(1e-3 / h.fro_norm());
            let perturbed = exp_map(&mu, &h).unwrap();
            assert!(objective(&perturbed) >= f0 - 1e-8);
        }
    }

    #[test]
    fn weighted_mean_matches_duplicated_sample() {
        let s = HpdSample::new(vec![diag2(1.0, 2.0), diag2(4.0, 0.5), diag2(2.0, 2.0)]).unwrap();
        let dup = HpdSample::new(vec![
            s.get(0).clone(),
            s.get(0).clone(),
            s.get(1).clone(),
            s.get(2).clone(),
        ])
        .unwrap();
        let weighted =
            intrinsic_mean(&s, Some(&[0.5, 0.25, 0.25]), &SolverConfig::default()).unwrap();
        let duplicated = intrinsic_mean(&dup, None, &SolverConfig::default()).unwrap();
        assert!(dist(&weighted, &duplicated) < 1e-8);
    }

    #[test]
    fn weights_are_validated() {
        let s = HpdSample::new(vec![diag2(1.0, 2.0), diag2(4.0, 0.5)]).unwrap();
        assert!(intrinsic_mean(&s, Some(&[0.5]), &SolverConfig::default()).is_err());
        assert!(intrinsic_mean(&s, Some(&[0.9, 0.5]), &SolverConfig::default()).is_err());
        assert!(intrinsic_mean(&s, Some(&[-0.1, 1.1]), &SolverConfig::default()).is_err());
    }

    #[test]
    fn median_of_identical_points() {
        let p = diag2(3.0, 0.7);
        let s = HpdSample::new(vec![p.clone(), p.clone(), p.clone()]).unwrap();
        let m = intrinsic_median(&s, &SolverConfig::default()).unwrap();
        assert!(m.base().sub(p.base()).fro_norm() < 1e-12);
    }

    #[test]
    fn median_1d_is_log_scale_median() {
        let e = std::f64::consts::E;
        let s = HpdSample::new(vec![hpd_1d(1.0), hpd_1d(e), hpd_1d(e.powi(4))]).unwrap();
        let m = intrinsic_median(&s, &SolverConfig::default()).unwrap();
        assert!((m.entry(0, 0).re - e).abs() < 1e-9);
    }

    #[test]
    fn median_equals_mean_for_centrally_symmetric_sample() {
        // pair tangent draws z and -z so the empirical measure is centrally
        // symmetric around the identity
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let mut obs = Vec::new();
        for _ in 0..15 {
            let coords: Vec<f64> = (0..4).map(|_| rng.gen::<f64>() - 0.5).collect();
            let h = from_coordinates(&BasisCoordinates { dim: 2, coords }).unwrap();
            obs.push(hermitian_exp(&h).unwrap());
            obs.push(hermitian_exp(&h.scale(-1.0)).unwrap());
        }
        let s = HpdSample::new(obs).unwrap();
        let mu = intrinsic_mean(&s, None, &SolverConfig::default()).unwrap();
        let m = intrinsic_median(&s, &SolverConfig::default()).unwrap();
        assert!(dist(&mu, &m) < 1e-6);
        assert!(dist(&mu, &HpdMatrix::identity(2)) < 1e-9);
    }

    #[test]
    fn median_residual_condition_holds() {
        let s = sample_lognormal(&HpdMatrix::identity(2), 0.8, 21, RngSeed(17)).unwrap();
        let m = intrinsic_median(&s, &SolverConfig::default()).unwrap();
        let mut g = HermitianMatrix::zeros(2);
        for x in s.observations() {
            let d = dist(&m, x);
            if d >= EPS_MEDIAN {
                g = g.add(&log_map(&m, x).scale(1.0 / d));
            }
        }
        assert!(g.fro_norm() <= 1e-10 * 21.0 + 1e-12);
    }

    #[test]
    fn congruence_equivariance_of_centers() {
        use num_complex::Complex64;
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let s = sample_lognormal(&HpdMatrix::identity(2), 0.7, 12, RngSeed(19)).unwrap();
        let mut a = crate::hermitian::ComplexMatrix::identity(2);
        for i in 0..2 {
            for j in 0..2 {
                let z = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                a.set(i, j, a.get(i, j) + z);
            }
        }
        let transformed = HpdSample::new(
            s.observations()
                .iter()
                .map(|x| crate::hermitian::congruence_hpd(&a, x).unwrap())
                .collect(),
        )
        .unwrap();
        let cfg = SolverConfig::default();
        let mu = intrinsic_mean(&s, None, &cfg).unwrap();
        let mu_t = intrinsic_mean(&transformed, None, &cfg).unwrap();
        assert!(dist(&crate::hermitian::congruence_hpd(&a, &mu).unwrap(), &mu_t) < 1e-7);

        let med = intrinsic_median(&s, &cfg).unwrap();
        let med_t = intrinsic_median(&transformed, &cfg).unwrap();
        assert!(dist(&crate::hermitian::congruence_hpd(&a, &med).unwrap(), &med_t) < 1e-7);
    }

    #[test]
    fn solver_config_validation() {
        let s = HpdSample::new(vec![diag2(1.0, 2.0)]).unwrap();
        let bad = SolverConfig {
            max_iter: 0,
            ..SolverConfig::default()
        };
        assert!(intrinsic_mean(&s, None, &bad).is_err());
    }
}
