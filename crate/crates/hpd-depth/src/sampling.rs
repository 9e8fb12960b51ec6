//! Random generators on the manifold: Riemannian log-normal, p-generalized
//! normal tangent noise, and the bias-corrected rescaled complex Wishart.
//!
//! Streams are ChaCha8 counter-based generators: one seed plus a stream index
//! give bit-identical output for a fixed parameter set, and independently
//! seeded instances parallelize cleanly. Normal variates come from
//! `rand_distr` (ziggurat), gamma variates from `rand_distr::Gamma`
//! (Marsaglia-Tsang); both are recorded in report provenance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::depth::HpdSample;
use crate::error::{Error, Result};
use crate::hermitian::{
    congruence_unchecked, from_coordinates, BasisCoordinates, ComplexMatrix, HermitianMatrix,
    HpdMatrix,
};
use num_complex::Complex64;

/// Identifier string for the generator stack, embedded in report provenance.
pub const RNG_DESCRIPTION: &str = "chacha8(seed,stream); normal: rand_distr ziggurat; gamma: rand_distr marsaglia-tsang";

/// Seed for a reproducible generator stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

/// Deterministic generator for (seed, stream index). Stream 0 is the default
/// sampling stream; experiment replicates use their replicate index.
pub fn rng_for(seed: RngSeed, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    rng.set_stream(stream);
    rng
}

/// Riemannian log-normal sample around `mu`: draws
/// `X = Exp_mu(mu^{1/2} * H)` with `H = sum_k Z_k e^k` and `Z_k` iid
/// `N(0, sigma^2)` in the canonical basis. Centrally symmetric around `mu`,
/// so `mu` is both the intrinsic mean and median of the population.
pub fn sample_lognormal(mu: &HpdMatrix, sigma: f64, n: usize, seed: RngSeed) -> Result<HpdSample> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Domain("sigma must be finite and nonnegative".into()));
    }
    let mut rng = rng_for(seed, 0);
    let d = mu.dim();
    let s_mu = mu.sqrt();
    let mut obs = Vec::with_capacity(n);
    for _ in 0..n {
        let coords: Vec<f64> = (0..d * d)
            .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
            .collect();
        obs.push(point_from_tangent_coords(&s_mu, d, coords)?);
    }
    HpdSample::new(obs)
}

/// p-generalized normal sample around `mu`: tangent coordinates are iid
/// draws from the standard p-GND (density proportional to
/// `exp(-|z|^p / p)`), whose standard deviation is
/// `sigma_p = p^{1/p} sqrt(Gamma(3/p)/Gamma(1/p))`, so `sigma_2 = 1` and
/// p = 2 is distributionally the log-normal with sigma = 1. Draws are exact
/// and rejection-free: `Z = sign x (p G)^{1/p}` with `G ~ Gamma(1/p, 1)`.
pub fn sample_pgnd(mu: &HpdMatrix, p: f64, n: usize, seed: RngSeed) -> Result<HpdSample> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Domain("p must be finite and at least 1".into()));
    }
    let mut rng = rng_for(seed, 0);
    let d = mu.dim();
    let s_mu = mu.sqrt();
    let gamma = Gamma::new(1.0 / p, 1.0)
        .map_err(|e| Error::Domain(format!("gamma parameterization: {e}")))?;
    let mut obs = Vec::with_capacity(n);
    for _ in 0..n {
        let coords: Vec<f64> = (0..d * d)
            .map(|_| {
                let g: f64 = gamma.sample(&mut rng);
                let z = (p * g).powf(1.0 / p);
                if rng.gen_bool(0.5) {
                    z
                } else {
                    -z
                }
            })
            .collect();
        obs.push(point_from_tangent_coords(&s_mu, d, coords)?);
    }
    HpdSample::new(obs)
}

fn point_from_tangent_coords(
    s_mu: &HermitianMatrix,
    d: usize,
    coords: Vec<f64>,
) -> Result<HpdMatrix> {
    let h = from_coordinates(&BasisCoordinates { dim: d, coords })?;
    let e = crate::hermitian::eigh(&h)?.reconstruct_with(f64::exp);
    HpdMatrix::from_hermitian_unchecked(congruence_unchecked(s_mu.as_complex(), &e))
}

/// Standard deviation of the standard p-GND:
/// `sigma_p = p^{1/p} sqrt(Gamma(3/p)/Gamma(1/p))`.
pub fn pgnd_sigma(p: f64) -> f64 {
    p.powf(1.0 / p) * (0.5 * (ln_gamma(3.0 / p) - ln_gamma(1.0 / p))).exp()
}

/// Rescaled complex Wishart sample with intrinsic mean `mu`: raw draws
/// `W ~ CW_d(B, mu/B)` built as sums of outer products of circular complex
/// Gaussian vectors, rescaled by `exp(-c(d, B))` with the intrinsic bias
/// correction `c(d, B) = -log B + (1/d) sum_i psi(B - (d - i))`.
pub fn sample_wishart_rescaled(
    mu: &HpdMatrix,
    dof: usize,
    n: usize,
    seed: RngSeed,
) -> Result<HpdSample> {
    let d = mu.dim();
    if dof + 1 <= d {
        return Err(Error::Domain(format!(
            "Wishart degrees of freedom must exceed d - 1 (B = {dof}, d = {d})"
        )));
    }
    let mut rng = rng_for(seed, 0);
    // v = (mu/B)^{1/2} z with z circular complex standard Gaussian
    let scale_sqrt = mu.sqrt().scale(1.0 / (dof as f64).sqrt());
    let correction = (-wishart_bias_correction(d, dof)).exp();
    let half = std::f64::consts::FRAC_1_SQRT_2;

    let mut obs = Vec::with_capacity(n);
    for _ in 0..n {
        let mut w = ComplexMatrix::zeros(d);
        for _ in 0..dof {
            let z: Vec<Complex64> = (0..d)
                .map(|_| {
                    Complex64::new(
                        half * rng.sample::<f64, _>(StandardNormal),
                        half * rng.sample::<f64, _>(StandardNormal),
                    )
                })
                .collect();
            // v = scale_sqrt z ; accumulate v v*
            let v: Vec<Complex64> = (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| scale_sqrt.entry(i, j) * z[j])
                        .sum::<Complex64>()
                })
                .collect();
            for i in 0..d {
                for j in 0..d {
                    let cur = w.get(i, j);
                    w.set(i, j, cur + v[i] * v[j].conj());
                }
            }
        }
        let herm = HermitianMatrix::symmetrize(w.scale(correction));
        obs.push(HpdMatrix::from_hermitian_unchecked(herm)?);
    }
    HpdSample::new(obs)
}

/// Intrinsic bias correction of the rescaled complex Wishart:
/// `c(d, B) = -log B + (1/d) sum_{i=1..d} psi(B - (d - i))`.
pub fn wishart_bias_correction(d: usize, dof: usize) -> f64 {
    let sum: f64 = (1..=d).map(|i| digamma((dof - (d - i)) as f64)).sum();
    -(dof as f64).ln() + sum / d as f64
}

/// Digamma function for positive arguments: recurrence below 6, asymptotic
/// Bernoulli series above. Absolute error below 1e-12 on the domain used
/// here.
pub fn digamma(mut x: f64) -> f64 {
    debug_assert!(x > 0.0, "digamma requires a positive argument");
    let mut acc = 0.0;
    while x < 6.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0))))));
    acc + x.ln() - 0.5 * inv - series
}

/// Natural log of the gamma function (Lanczos, g = 7, 9 terms), with the
/// reflection formula below 1/2.
pub fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // ln Gamma(x) = ln(pi / sin(pi x)) - ln Gamma(1 - x)
        return (std::f64::consts::PI / (std::f64::consts::PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = 0.99999999999980993;
    for (i, &c) in COEFFS.iter().enumerate() {
        a += c / (x + (i + 1) as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centers::{intrinsic_mean, intrinsic_median, SolverConfig};
    use crate::manifold::dist;

    const EULER_GAMMA: f64 = 0.5772156649015329;

    #[test]
    fn digamma_matches_harmonic_numbers() {
        // psi(n) = H_{n-1} - gamma
        let mut harmonic = 0.0;
        for n in 1..=20u32 {
            let want = harmonic - EULER_GAMMA;
            assert!(
                (digamma(n as f64) - want).abs() < 1e-12,
                "psi({n}) = {} vs {want}",
                digamma(n as f64)
            );
            harmonic += 1.0 / n as f64;
        }
        // psi(1/2) = -gamma - 2 ln 2
        let want_half = -EULER_GAMMA - 2.0 * 2.0f64.ln();
        assert!((digamma(0.5) - want_half).abs() < 1e-12);
    }

    #[test]
    fn wishart_correction_frozen_value() {
        // c(1, 8) = psi(8) - ln 8; psi(8) = H_7 - gamma with H_7 = 363/140
        let psi8 = 363.0 / 140.0 - EULER_GAMMA;
        let want = psi8 - 8.0f64.ln();
        assert!((want - (-0.0638000637242257)).abs() < 1e-12);
        assert!((wishart_bias_correction(1, 8) - want).abs() < 1e-12);
    }

    #[test]
    fn ln_gamma_reference_points() {
        let pi = std::f64::consts::PI;
        assert!((ln_gamma(0.5) - 0.5 * pi.ln()).abs() < 1e-12);
        assert!(ln_gamma(1.0).abs() < 1e-13);
        assert!((ln_gamma(1.5).exp() - pi.sqrt() / 2.0).abs() < 1e-12);
        assert!((ln_gamma(5.0).exp() - 24.0).abs() < 1e-10);
    }

    #[test]
    fn pgnd_sigma_at_two_is_one() {
        assert!((pgnd_sigma(2.0) - 1.0).abs() < 1e-12);
        // heavier tails have larger sigma_p under this normalization at p<2
        assert!(pgnd_sigma(1.5) > 1.0);
        assert!(pgnd_sigma(5.0) < 1.3);
    }

    #[test]
    fn determinism_and_distinct_seeds() {
        let mu = HpdMatrix::identity(2);
        let a = sample_lognormal(&mu, 0.7, 5, RngSeed(42)).unwrap();
        let b = sample_lognormal(&mu, 0.7, 5, RngSeed(42)).unwrap();
        for i in 0..5 {
            assert_eq!(a.get(i).base(), b.get(i).base());
        }
        let c = sample_lognormal(&mu, 0.7, 5, RngSeed(43)).unwrap();
        assert_ne!(a.get(0).base(), c.get(0).base());
    }

    #[test]
    fn lognormal_sigma_zero_collapses_to_mu() {
        let mu = sample_lognormal(&HpdMatrix::identity(2), 0.5, 3, RngSeed(1))
            .unwrap()
            .get(0)
            .clone();
        let s = sample_lognormal(&mu, 0.0, 4, RngSeed(2)).unwrap();
        for x in s.observations() {
            assert!(dist(x, &mu) < 1e-12);
        }
    }

    #[test]
    fn lognormal_mean_is_mu_and_symmetric() {
        let s = sample_lognormal(
            &HpdMatrix::identity(2),
            std::f64::consts::FRAC_1_SQRT_2,
            500,
            RngSeed(7),
        )
        .unwrap();
        let cfg = SolverConfig::default();
        let mean = intrinsic_mean(&s, None, &cfg).unwrap();
        assert!(dist(&mean, &HpdMatrix::identity(2)) < 0.15);
        let median = intrinsic_median(&s, &cfg).unwrap();
        assert!(dist(&mean, &median) < 0.1);
    }

    #[test]
    fn lognormal_congruence_pushforward() {
        use num_complex::Complex64;
        let mut a = ComplexMatrix::identity(2);
        a.set(0, 0, Complex64::new(1.4, 0.0));
        a.set(0, 1, Complex64::new(0.3, 0.2));
        a.set(1, 0, Complex64::new(0.1, -0.4));
        a.set(1, 1, Complex64::new(0.9, 0.0));
        let mu_t = crate::hermitian::congruence_hpd(&a, &HpdMatrix::identity(2)).unwrap();

        let cfg = SolverConfig::default();
        let direct = sample_lognormal(&mu_t, 0.7, 2000, RngSeed(8)).unwrap();
        let pushed = sample_lognormal(&HpdMatrix::identity(2), 0.7, 2000, RngSeed(9)).unwrap();
        let pushed = HpdSample::new(
            pushed
                .observations()
                .iter()
                .map(|x| crate::hermitian::congruence_hpd(&a, x).unwrap())
                .collect(),
        )
        .unwrap();
        let m1 = intrinsic_mean(&direct, None, &cfg).unwrap();
        let m2 = intrinsic_mean(&pushed, None, &cfg).unwrap();
        assert!(dist(&m1, &m2) < 0.1, "means {} apart", dist(&m1, &m2));
    }

    #[test]
    fn pgnd_p2_matches_lognormal_distribution() {
        // two-sample KS on the first tangent coordinate
        let n = 5000;
        let a = sample_pgnd(&HpdMatrix::identity(1), 2.0, n, RngSeed(11)).unwrap();
        let b = sample_lognormal(&HpdMatrix::identity(1), 1.0, n, RngSeed(12)).unwrap();
        let coord = |s: &HpdSample| -> Vec<f64> {
            let mut v: Vec<f64> = s.observations().iter().map(|x| x.entry(0, 0).re.ln()).collect();
            v.sort_by(|x, y| x.partial_cmp(y).unwrap());
            v
        };
        let xa = coord(&a);
        let xb = coord(&b);
        let mut ks = 0.0f64;
        let (mut i, mut j) = (0usize, 0usize);
        while i < n && j < n {
            if xa[i] <= xb[j] {
                i += 1;
            } else {
                j += 1;
            }
            ks = ks.max((i as f64 / n as f64 - j as f64 / n as f64).abs());
        }
        assert!(ks < 0.03, "KS statistic {ks}");
    }

    #[test]
    fn pgnd_heavy_tails_have_positive_excess_kurtosis() {
        let s = sample_pgnd(&HpdMatrix::identity(1), 1.5, 4000, RngSeed(13)).unwrap();
        let z: Vec<f64> = s.observations().iter().map(|x| x.entry(0, 0).re.ln()).collect();
        let mean = z.iter().sum::<f64>() / z.len() as f64;
        let m2 = z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / z.len() as f64;
        let m4 = z.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / z.len() as f64;
        let excess = m4 / (m2 * m2) - 3.0;
        assert!(excess > 0.2, "excess kurtosis {excess}");
    }

    #[test]
    fn pgnd_sample_std_matches_sigma_p() {
        for p in [1.5, 2.0, 5.0] {
            let s = sample_pgnd(&HpdMatrix::identity(1), p, 20000, RngSeed(14)).unwrap();
            let z: Vec<f64> = s.observations().iter().map(|x| x.entry(0, 0).re.ln()).collect();
            let var = z.iter().map(|v| v * v).sum::<f64>() / z.len() as f64;
            let want = pgnd_sigma(p);
            assert!(
                (var.sqrt() - want).abs() < 0.05 * want,
                "p = {p}: sample std {} vs sigma_p {want}",
                var.sqrt()
            );
        }
    }

    #[test]
    fn wishart_rejects_singular_dof() {
        assert!(sample_wishart_rescaled(&HpdMatrix::identity(3), 2, 4, RngSeed(15)).is_err());
    }

    #[test]
    fn wishart_euclidean_mean_of_raw_draws() {
        // E[W] = mu for the raw (unrescaled) Wishart; undo the rescaling.
        let mu = {
            let mut m = ComplexMatrix::zeros(2);
            m.set(0, 0, Complex64::new(0.5, 0.0));
            m.set(0, 1, Complex64::new(0.25, 0.0));
            m.set(1, 0, Complex64::new(0.25, 0.0));
            m.set(1, 1, Complex64::new(0.5, 0.0));
            HpdMatrix::new(HermitianMatrix::new(m).unwrap()).unwrap()
        };
        let dof = 8;
        let n = 20000;
        let s = sample_wishart_rescaled(&mu, dof, n, RngSeed(16)).unwrap();
        let undo = wishart_bias_correction(2, dof).exp();
        let mut acc = HermitianMatrix::zeros(2);
        for x in s.observations() {
            acc = acc.add(x.base());
        }
        let avg = acc.scale(undo / n as f64);
        let err = avg.sub(mu.base()).fro_norm() / mu.fro_norm();
        assert!(err < 0.02, "relative error {err}");
    }

    #[test]
    fn wishart_intrinsic_mean_is_mu() {
        let mu = {
            let mut m = ComplexMatrix::zeros(2);
            m.set(0, 0, Complex64::new(0.5, 0.0));
            m.set(0, 1, Complex64::new(0.25, 0.0));
            m.set(1, 0, Complex64::new(0.25, 0.0));
            m.set(1, 1, Complex64::new(0.5, 0.0));
            HpdMatrix::new(HermitianMatrix::new(m).unwrap()).unwrap()
        };
        let s = sample_wishart_rescaled(&mu, 8, 10000, RngSeed(17)).unwrap();
        let mean = intrinsic_mean(&s, None, &SolverConfig::default()).unwrap();
        assert!(
            dist(&mean, &mu) < 0.05,
            "intrinsic mean {} away from mu",
            dist(&mean, &mu)
        );
    }
}
