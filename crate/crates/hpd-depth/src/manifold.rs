//! The affine-invariant Riemannian structure on HPD matrices: metric,
//! distance, exponential and logarithmic maps, geodesics.
//!
//! Conventions follow the congruence notation `y * x := y^* x y`. The inverse
//! square root of the base point is computed once per call and reused; the
//! distance works directly on the eigenvalues of `p1^{-1/2} p2 p1^{-1/2}`
//! (sum of squared log-eigenvalues), which halves the eigendecompositions.
//! No caching across calls happens here; pairwise-distance caching lives in
//! `HpdSample`.

use crate::error::{Error, Result};
use crate::hermitian::{
    congruence_unchecked, eigh, HermitianMatrix, HpdMatrix, EXP_EIG_CAP,
};

/// Riemannian inner product of two tangent vectors at `p`:
/// `Tr((p^{-1/2} * h1)(p^{-1/2} * h2))`.
pub fn inner(p: &HpdMatrix, h1: &HermitianMatrix, h2: &HermitianMatrix) -> f64 {
    assert_eq!(p.dim(), h1.dim(), "inner: dimension mismatch");
    assert_eq!(p.dim(), h2.dim(), "inner: dimension mismatch");
    let w = p.inv_sqrt();
    let a = congruence_unchecked(w.as_complex(), h1);
    let b = congruence_unchecked(w.as_complex(), h2);
    a.fro_inner(&b)
}

/// Riemannian norm of a tangent vector at `p`.
pub fn norm_at(p: &HpdMatrix, h: &HermitianMatrix) -> f64 {
    inner(p, h, h).max(0.0).sqrt()
}

/// Eigenvalues of a whitened product are positive in exact arithmetic; clamp
/// rounding casualties to the entrywise noise floor instead of propagating
/// NaN or a wildly overestimated log.
fn noise_floor(eigenvalues: &[f64]) -> f64 {
    let max = eigenvalues.last().copied().unwrap_or(0.0);
    if max > 0.0 {
        max * f64::EPSILON
    } else {
        f64::MIN_POSITIVE
    }
}

/// Affine-invariant Riemannian distance `|| Log(p1^{-1/2} * p2) ||_F`.
pub fn dist(p1: &HpdMatrix, p2: &HpdMatrix) -> f64 {
    assert_eq!(p1.dim(), p2.dim(), "dist: dimension mismatch");
    let w = p1.inv_sqrt();
    let m = congruence_unchecked(w.as_complex(), p2.base());
    let eig = eigh(&m).expect("eigh of whitened HPD matrix");
    let floor = noise_floor(&eig.eigenvalues);
    eig.eigenvalues
        .iter()
        .map(|&l| {
            let x = l.max(floor).ln();
            x * x
        })
        .sum::<f64>()
        .sqrt()
}

/// `Log(p^{-1/2} * q)`: the logarithmic map expressed in the whitened frame
/// at `p`. Its Frobenius norm equals `dist(p, q)` and its Frobenius-basis
/// coordinates are the tangent coordinates used by the zonoid depth.
pub(crate) fn whitened_log(p_inv_sqrt: &HermitianMatrix, q: &HpdMatrix) -> HermitianMatrix {
    let m = congruence_unchecked(p_inv_sqrt.as_complex(), q.base());
    let eig = eigh(&m).expect("eigh of whitened HPD matrix");
    let floor = noise_floor(&eig.eigenvalues);
    eig.reconstruct_with(|l| l.max(floor).ln())
}

/// Exponential map `Exp_p(h) = p^{1/2} * Exp(p^{-1/2} * h)`.
///
/// Errors when the whitened argument has an eigenvalue beyond the exp
/// overflow cap (~700).
pub fn exp_map(p: &HpdMatrix, h: &HermitianMatrix) -> Result<HpdMatrix> {
    assert_eq!(p.dim(), h.dim(), "exp_map: dimension mismatch");
    let w = p.inv_sqrt();
    let s = p.sqrt();
    let inner_arg = congruence_unchecked(w.as_complex(), h);
    let eig = eigh(&inner_arg)?;
    let max_abs = eig.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    if max_abs > EXP_EIG_CAP {
        return Err(Error::NumericalFailure(format!(
            "exp_map overflow: whitened eigenvalue magnitude {max_abs:.3e} exceeds {EXP_EIG_CAP}"
        )));
    }
    let e = eig.reconstruct_with(f64::exp);
    HpdMatrix::from_hermitian_unchecked(congruence_unchecked(s.as_complex(), &e))
}

/// Logarithmic map `Log_p(q) = p^{1/2} * Log(p^{-1/2} * q)`, a tangent vector
/// at `p` with `|| Log_p(q) ||_p = dist(p, q)`.
pub fn log_map(p: &HpdMatrix, q: &HpdMatrix) -> HermitianMatrix {
    assert_eq!(p.dim(), q.dim(), "log_map: dimension mismatch");
    let w = p.inv_sqrt();
    let s = p.sqrt();
    let l = whitened_log(&w, q);
    congruence_unchecked(s.as_complex(), &l)
}

/// Point at parameter `t` on the unique geodesic from `p` (t = 0) to `q`
/// (t = 1): `p^{1/2} * (p^{-1/2} * q)^t`.
pub fn geodesic(p: &HpdMatrix, q: &HpdMatrix, t: f64) -> HpdMatrix {
    assert_eq!(p.dim(), q.dim(), "geodesic: dimension mismatch");
    let w = p.inv_sqrt();
    let s = p.sqrt();
    let m = congruence_unchecked(w.as_complex(), q.base());
    let eig = eigh(&m).expect("eigh of whitened HPD matrix");
    let floor = noise_floor(&eig.eigenvalues);
    let powed = eig.reconstruct_with(|l| l.max(floor).powf(t));
    HpdMatrix::from_hermitian_unchecked(congruence_unchecked(s.as_complex(), &powed))
        .expect("geodesic point is positive definite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{from_coordinates, BasisCoordinates, ComplexMatrix, HpdMatrix};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_tangent(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> HermitianMatrix {
        let coords: Vec<f64> = (0..d * d)
            .map(|_| scale * 2.0 * (rng.gen::<f64>() - 0.5))
            .collect();
        from_coordinates(&BasisCoordinates { dim: d, coords }).unwrap()
    }

    pub(crate) fn random_hpd(rng: &mut ChaCha8Rng, d: usize) -> HpdMatrix {
        let h = random_tangent(rng, d, 1.0);
        crate::hermitian::hermitian_exp(&h).unwrap()
    }

    fn random_invertible(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
        loop {
            let mut a = ComplexMatrix::identity(d);
            for i in 0..d {
                for j in 0..d {
                    let z = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                    a.set(i, j, a.get(i, j) + z * Complex64::new(0.8, 0.0));
                }
            }
            let gram = HermitianMatrix::symmetrize(a.adjoint().mul(&a));
            let eig = crate::hermitian::eigh(&gram).unwrap();
            if eig.eigenvalues[0] > 1e-3 {
                return a;
            }
        }
    }

    fn diag_hpd(entries: &[f64]) -> HpdMatrix {
        let d = entries.len();
        let mut m = ComplexMatrix::zeros(d);
        for (i, &v) in entries.iter().enumerate() {
            m.set(i, i, Complex64::new(v, 0.0));
        }
        HpdMatrix::new(HermitianMatrix::new(m).unwrap()).unwrap()
    }

    #[test]
    fn inner_at_identity_is_frobenius() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let id = HpdMatrix::identity(3);
        for _ in 0..10 {
            let h = random_tangent(&mut rng, 3, 2.0);
            let f2 = h.fro_norm().powi(2);
            assert!((inner(&id, &h, &h) - f2).abs() < 1e-10 * f2.max(1.0));
            let zero = HermitianMatrix::zeros(3);
            assert!(inner(&id, &zero, &h).abs() < 1e-14);
        }
    }

    #[test]
    fn inner_affine_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let p = random_hpd(&mut rng, 2);
            let h = random_tangent(&mut rng, 2, 1.0);
            let a = random_invertible(&mut rng, 2);
            let pa = crate::hermitian::congruence_hpd(&a, &p).unwrap();
            let ha = crate::hermitian::congruence(&a, &h).unwrap();
            let before = inner(&p, &h, &h);
            let after = inner(&pa, &ha, &ha);
            assert!(
                (before - after).abs() < 1e-9 * before.abs().max(1.0),
                "{before} vs {after}"
            );
        }
    }

    #[test]
    fn dist_zero_and_scalar_case() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_hpd(&mut rng, 3);
        assert!(dist(&p, &p) < 1e-12);

        // dist(a Id, b Id) = sqrt(d) |log(a/b)|
        for d in [1usize, 2, 5] {
            let a = 0.7;
            let b = 3.1;
            let pa = diag_hpd(&vec![a; d]);
            let pb = diag_hpd(&vec![b; d]);
            let want = (d as f64).sqrt() * (a / b).ln().abs();
            assert!((dist(&pa, &pb) - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn dist_isometry_under_congruence() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let p1 = random_hpd(&mut rng, 3);
            let p2 = random_hpd(&mut rng, 3);
            let a = random_invertible(&mut rng, 3);
            let q1 = crate::hermitian::congruence_hpd(&a, &p1).unwrap();
            let q2 = crate::hermitian::congruence_hpd(&a, &p2).unwrap();
            let d0 = dist(&p1, &p2);
            assert!((d0 - dist(&q1, &q2)).abs() < 1e-9 * d0.max(1.0));
        }
    }

    #[test]
    fn exp_map_at_identity_and_zero_tangent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_tangent(&mut rng, 2, 1.0);
        let id = HpdMatrix::identity(2);
        let via_map = exp_map(&id, &h).unwrap();
        let direct = crate::hermitian::hermitian_exp(&h).unwrap();
        assert!(via_map.base().sub(direct.base()).fro_norm() < 1e-11);

        let p = random_hpd(&mut rng, 2);
        let back = exp_map(&p, &HermitianMatrix::zeros(2)).unwrap();
        assert!(back.base().sub(p.base()).fro_norm() < 1e-11);
    }

    #[test]
    fn exp_map_overflow_errors() {
        let id = HpdMatrix::identity(2);
        let h = HermitianMatrix::identity(2).scale(800.0);
        assert!(matches!(
            exp_map(&id, &h),
            Err(crate::Error::NumericalFailure(_))
        ));
    }

    #[test]
    fn log_exp_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let p = random_hpd(&mut rng, 3);
            let h = random_tangent(&mut rng, 3, 1.5);
            let q = exp_map(&p, &h).unwrap();
            let back = log_map(&p, &q);
            assert!(back.sub(&h).fro_norm() < 1e-8 * h.fro_norm().max(1.0));
        }
    }

    #[test]
    fn log_map_diagonal_case() {
        // Log_Id(diag(e, e)) = Id
        let e = std::f64::consts::E;
        let q = diag_hpd(&[e, e]);
        let id = HpdMatrix::identity(2);
        let l = log_map(&id, &q);
        assert!(l.sub(&HermitianMatrix::identity(2)).fro_norm() < 1e-12);
    }

    #[test]
    fn norm_identity_matches_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let p = random_hpd(&mut rng, 2);
            let q = random_hpd(&mut rng, 2);
            let d0 = dist(&p, &q);
            let n0 = norm_at(&p, &log_map(&p, &q));
            assert!((d0 - n0).abs() < 1e-10 * d0.max(1.0), "{d0} vs {n0}");
        }
    }

    #[test]
    fn geodesic_endpoints_and_midpoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = random_hpd(&mut rng, 2);
        let q = random_hpd(&mut rng, 2);
        assert!(geodesic(&p, &q, 0.0).base().sub(p.base()).fro_norm() < 1e-11);
        assert!(geodesic(&p, &q, 1.0).base().sub(q.base()).fro_norm() < 1e-10);

        // commuting case: midpoint of Id and diag(e^2, e^2) is diag(e, e)
        let e = std::f64::consts::E;
        let target = diag_hpd(&[e * e, e * e]);
        let mid = geodesic(&HpdMatrix::identity(2), &target, 0.5);
        let want = diag_hpd(&[e, e]);
        assert!(mid.base().sub(want.base()).fro_norm() < 1e-12 * e);
    }

    #[test]
    fn geodesic_parametrization_is_proportional() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let p = random_hpd(&mut rng, 3);
            let q = random_hpd(&mut rng, 3);
            let d0 = dist(&p, &q);
            for t in [0.25, 0.5, 0.75] {
                let mid = geodesic(&p, &q, t);
                assert!((dist(&p, &mid) / d0 - t).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn congruence_equivariance_of_exp_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..10 {
            let p = random_hpd(&mut rng, 2);
            let h = random_tangent(&mut rng, 2, 1.0);
            let a = random_invertible(&mut rng, 2);
            let lhs = crate::hermitian::congruence_hpd(&a, &exp_map(&p, &h).unwrap()).unwrap();
            let rhs = exp_map(
                &crate::hermitian::congruence_hpd(&a, &p).unwrap(),
                &crate::hermitian::congruence(&a, &h).unwrap(),
            )
            .unwrap();
            let scale = lhs.fro_norm().max(1.0);
            assert!(lhs.base().sub(rhs.base()).fro_norm() < 1e-8 * scale);
        }
    }

    #[test]
    fn one_dimensional_reduction() {
        let x = diag_hpd(&[2.5]);
        let y = diag_hpd(&[0.3]);
        let want = (2.5f64.ln() - 0.3f64.ln()).abs();
        assert!((dist(&x, &y) - want).abs() < 1e-14);
    }
}
