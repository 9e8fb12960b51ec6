//! Dense Hermitian matrix arithmetic: complex storage, a cyclic Jacobi
//! eigensolver, spectral matrix functions, and the orthonormal basis
//! coordinates of the real vector space of Hermitian matrices.
//!
//! Matrices here are small (d up to a few dozen) and dense; everything is
//! O(d^3) spectral calculus. Real symmetric input is the zero-imaginary
//! special case, there is no separate code path.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for accepting a nearly-Hermitian matrix on construction.
const HERMITIAN_TOL: f64 = 1e-12;

/// Relative positive-definiteness floor: smallest eigenvalue must exceed
/// `EPS_PD` times the largest.
pub const EPS_PD: f64 = 1e-10;

/// Jacobi sweep cap is `MAX_SWEEPS_PER_DIM * d`.
const MAX_SWEEPS_PER_DIM: usize = 30;

/// Largest admissible eigenvalue magnitude for a matrix exponential argument.
pub(crate) const EXP_EIG_CAP: f64 = 700.0;

// ---------------------------------------------------------------------------
// ComplexMatrix
// ---------------------------------------------------------------------------

/// Dense square complex matrix, row-major storage.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_entries(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = self.dim;
        debug_assert_eq!(d, other.dim);
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= s;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|z| z.re.abs().max(z.im.abs()))
            .fold(0.0, f64::max)
    }

    /// Frobenius norm, scaled to avoid overflow for very large entries.
    pub fn fro_norm(&self) -> f64 {
        let m = self.data.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
        if m == 0.0 {
            return 0.0;
        }
        let s = m.sqrt();
        let mut acc = 0.0;
        for z in &self.data {
            let r = z.re / s;
            let i = z.im / s;
            acc += r * r + i * i;
        }
        s * acc.sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  [")?;
            for j in 0..self.dim {
                let z = self.get(i, j);
                write!(f, " {:+.4e}{:+.4e}i", z.re, z.im)?;
            }
            writeln!(f, " ]")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// HermitianMatrix
// ---------------------------------------------------------------------------

/// A d x d Hermitian matrix. Entries satisfy `m[i][j] == conj(m[j][i])`;
/// construction re-symmetrizes via `(m + m*)/2` after checking the deviation
/// is within tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    mat: ComplexMatrix,
}

impl HermitianMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: ComplexMatrix::zeros(dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(dim),
        }
    }

    /// Validates finiteness and near-Hermitian symmetry, then re-symmetrizes.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if mat.dim == 0 {
            return Err(Error::Invalid("matrix dimension must be positive".into()));
        }
        if !mat.is_finite() {
            return Err(Error::Invalid("matrix has non-finite entries".into()));
        }
        let scale = mat.max_abs().max(1.0);
        let mut dev: f64 = 0.0;
        for i in 0..mat.dim {
            for j in i..mat.dim {
                let z = mat.get(i, j) - mat.get(j, i).conj();
                dev = dev.max(z.re.abs().max(z.im.abs()));
            }
        }
        if dev > HERMITIAN_TOL * scale {
            return Err(Error::Invalid(format!(
                "matrix is not Hermitian: max deviation {dev:.3e} exceeds {:.1e} x scale",
                HERMITIAN_TOL
            )));
        }
        Ok(Self::symmetrize(mat))
    }

    /// Builds from real and optional imaginary parts (row-major nested rows).
    pub fn from_re_im(re: &[Vec<f64>], im: Option<&[Vec<f64>]>) -> Result<Self> {
        let d = re.len();
        if d == 0 || re.iter().any(|row| row.len() != d) {
            return Err(Error::Dimension("'re' must be a non-empty square array".into()));
        }
        if let Some(im) = im {
            if im.len() != d || im.iter().any(|row| row.len() != d) {
                return Err(Error::Dimension("'im' must match the shape of 're'".into()));
            }
        }
        let mut mat = ComplexMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let imv = im.map_or(0.0, |im| im[i][j]);
                mat.set(i, j, Complex64::new(re[i][j], imv));
            }
        }
        Self::new(mat)
    }

    /// `(m + m*)/2` without the tolerance check, for matrices that are
    /// Hermitian up to rounding from internal computations.
    pub(crate) fn symmetrize(mat: ComplexMatrix) -> Self {
        let d = mat.dim;
        let mut out = mat;
        for i in 0..d {
            let z = out.get(i, i);
            out.set(i, i, Complex64::new(z.re, 0.0));
            for j in (i + 1)..d {
                let a = out.get(i, j);
                let b = out.get(j, i);
                let avg = Complex64::new(0.5 * (a.re + b.re), 0.5 * (a.im - b.im));
                out.set(i, j, avg);
                out.set(j, i, avg.conj());
            }
        }
        Self { mat: out }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.mat.dim
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.mat.get(i, j)
    }

    pub fn as_complex(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn fro_norm(&self) -> f64 {
        self.mat.fro_norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            mat: self.mat.scale(s),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        let mut mat = self.mat.clone();
        for (v, w) in mat.data.iter_mut().zip(other.mat.data.iter()) {
            *v += *w;
        }
        Self { mat }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        let mut mat = self.mat.clone();
        for (v, w) in mat.data.iter_mut().zip(other.mat.data.iter()) {
            *v -= *w;
        }
        Self { mat }
    }

    /// Real Frobenius inner product `Re Tr(other* self)`.
    pub fn fro_inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        let mut acc = 0.0;
        for (a, b) in self.mat.data.iter().zip(other.mat.data.iter()) {
            acc += a.re * b.re + a.im * b.im;
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Eigensystem and the cyclic Jacobi eigensolver
// ---------------------------------------------------------------------------

/// Eigendecomposition `m = U diag(eigenvalues) U*` of a Hermitian matrix.
/// Eigenvalues are real and sorted ascending; `eigenvectors` holds the
/// corresponding unitary matrix column by column.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Eigensystem {
    /// Rebuilds `U diag(f(lambda)) U*`, re-symmetrized.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let d = self.eigenvalues.len();
        let u = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(d);
        // out[i][j] = sum_k U[i][k] f(l_k) conj(U[j][k])
        for k in 0..d {
            let fl = f(self.eigenvalues[k]);
            if fl == 0.0 {
                continue;
            }
            for i in 0..d {
                let uik = u.get(i, k) * fl;
                for j in 0..d {
                    let v = out.get(i, j) + uik * u.get(j, k).conj();
                    out.set(i, j, v);
                }
            }
        }
        HermitianMatrix::symmetrize(out)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Off-diagonal entries are annihilated pairwise with unitary plane rotations
/// until every `|a_pq|` is negligible relative to `sqrt(|a_pp a_qq|)` (the
/// pair-relative criterion keeps small eigenvalues of positive definite
/// matrices accurate, which matters because they get logarithms taken later).
/// Deterministic for a fixed input: fixed cyclic order, ascending eigenvalue
/// sort with index tie-break.
pub fn eigh(m: &HermitianMatrix) -> Result<Eigensystem> {
    let d = m.dim();
    let mut a = m.mat.clone();
    let mut v = ComplexMatrix::identity(d);

    if d == 1 {
        return Ok(Eigensystem {
            eigenvalues: vec![a.get(0, 0).re],
            eigenvectors: v,
        });
    }

    let abs_floor = 1e-15 * a.max_abs();
    if abs_floor == 0.0 {
        // zero matrix
        return Ok(Eigensystem {
            eigenvalues: vec![0.0; d],
            eigenvectors: v,
        });
    }

    let rel_tol = 1e-15;
    let max_sweeps = MAX_SWEEPS_PER_DIM * d;
    let mut converged = false;

    for _sweep in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..d - 1 {
            for q in (p + 1)..d {
                let g = a.get(p, q);
                let r = g.norm();
                if r == 0.0 {
                    continue;
                }
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let pair_scale = (app.abs() * aqq.abs()).sqrt();
                if r <= rel_tol * pair_scale || r <= abs_floor {
                    continue;
                }
                rotated = true;

                // Absorb the phase of a_pq, then a real Jacobi rotation.
                let phase = g / r;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_ph = phase * s; // J[p][q] = s * e^{i phi}
                let s_ph_c = s_ph.conj();

                // A <- J* A J ; J differs from identity in rows/cols p,q:
                // J[p][p] = c, J[p][q] = s e^{i phi}, J[q][p] = -s e^{-i phi}, J[q][q] = c.
                a.set(p, p, Complex64::new(app - t * r, 0.0));
                a.set(q, q, Complex64::new(aqq + t * r, 0.0));
                a.set(p, q, Complex64::new(0.0, 0.0));
                a.set(q, p, Complex64::new(0.0, 0.0));
                for k in 0..d {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    let new_kp = akp * c - akq * s_ph_c;
                    let new_kq = akp * s_ph + akq * c;
                    a.set(k, p, new_kp);
                    a.set(p, k, new_kp.conj());
                    a.set(k, q, new_kq);
                    a.set(q, k, new_kq.conj());
                }
                for k in 0..d {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * c - vkq * s_ph_c);
                    v.set(k, q, vkp * s_ph + vkq * c);
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NumericalFailure(format!(
            "Jacobi eigensolver did not converge within {max_sweeps} sweeps (d = {d})"
        )));
    }

    // Sort ascending, stable in the original diagonal order.
    let mut order: Vec<usize> = (0..d).collect();
    let evals: Vec<f64> = (0..d).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| evals[i].partial_cmp(&evals[j]).unwrap().then(i.cmp(&j)));

    let mut eigenvalues = Vec::with_capacity(d);
    let mut eigenvectors = ComplexMatrix::zeros(d);
    for (new_col, &old_col) in order.iter().enumerate() {
        eigenvalues.push(evals[old_col]);
        for k in 0..d {
            eigenvectors.set(k, new_col, v.get(k, old_col));
        }
    }
    Ok(Eigensystem {
        eigenvalues,
        eigenvectors,
    })
}

/// Applies a scalar function to a Hermitian matrix through its spectrum:
/// `U diag(f(lambda)) U*`. Errors if `f` is undefined (non-finite) at some
/// eigenvalue.
pub fn matrix_function(m: &HermitianMatrix, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
    let eig = eigh(m)?;
    for &l in &eig.eigenvalues {
        let fl = f(l);
        if !fl.is_finite() {
            return Err(Error::Domain(format!(
                "matrix function undefined at eigenvalue {l:.6e}"
            )));
        }
    }
    Ok(eig.reconstruct_with(f))
}

// ---------------------------------------------------------------------------
// HpdMatrix
// ---------------------------------------------------------------------------

/// Hermitian positive definite matrix: a point on the manifold. Carries its
/// eigendecomposition (computed once at construction) so square roots and
/// logarithms are cheap reconstructions.
#[derive(Clone, Debug)]
pub struct HpdMatrix {
    base: HermitianMatrix,
    eig: Eigensystem,
}

impl PartialEq for HpdMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
    }
}

impl HpdMatrix {
    /// Validating constructor: rejects matrices whose smallest eigenvalue is
    /// at most `EPS_PD` times the largest. Intended for matrices built from
    /// raw entries (files, user input).
    pub fn new(base: HermitianMatrix) -> Result<Self> {
        let eig = eigh(&base)?;
        let min = eig.eigenvalues[0];
        let max = *eig.eigenvalues.last().unwrap();
        if max <= 0.0 || min <= EPS_PD * max {
            return Err(Error::Domain(format!(
                "matrix is not positive definite: eigenvalue range [{min:.3e}, {max:.3e}]"
            )));
        }
        Ok(Self { base, eig })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            base: HermitianMatrix::identity(dim),
            eig: Eigensystem {
                eigenvalues: vec![1.0; dim],
                eigenvectors: ComplexMatrix::identity(dim),
            },
        }
    }

    /// Constructor for matrices produced by internal spectral builds
    /// (exponential maps, samplers): the relative `EPS_PD` floor is not
    /// applied, so points far out on the manifold (huge eigenvalue ratios)
    /// remain representable. Such matrices are positive definite in exact
    /// arithmetic, but once the eigenvalue ratio passes ~1/eps the small
    /// eigenvalues drown in the rounding noise of the entries; they are
    /// clamped to the noise floor `eps x lambda_max` so downstream logarithms
    /// stay finite.
    pub(crate) fn from_hermitian_unchecked(base: HermitianMatrix) -> Result<Self> {
        let mut eig = eigh(&base)?;
        let max = *eig.eigenvalues.last().unwrap();
        if !max.is_finite() || max <= 0.0 {
            return Err(Error::NumericalFailure(format!(
                "spectral construction left the positive definite cone: largest eigenvalue {max:.3e}"
            )));
        }
        let floor = max * f64::EPSILON;
        for l in &mut eig.eigenvalues {
            if *l < floor {
                *l = floor;
            }
        }
        Ok(Self { base, eig })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn base(&self) -> &HermitianMatrix {
        &self.base
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.base.entry(i, j)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.eigenvalues
    }

    pub fn fro_norm(&self) -> f64 {
        self.base.fro_norm()
    }

    /// `|| Log(p) ||_F = sqrt(sum log^2 lambda_i)`, the Riemannian distance
    /// to the identity.
    pub fn log_norm(&self) -> f64 {
        self.eig
            .eigenvalues
            .iter()
            .map(|&l| {
                let x = l.ln();
                x * x
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn sqrt(&self) -> HermitianMatrix {
        self.eig.reconstruct_with(f64::sqrt)
    }

    pub fn inv_sqrt(&self) -> HermitianMatrix {
        self.eig.reconstruct_with(|l| 1.0 / l.sqrt())
    }

    pub fn log(&self) -> HermitianMatrix {
        self.eig.reconstruct_with(f64::ln)
    }
}

/// Matrix exponential of a Hermitian matrix; always Hermitian positive
/// definite. Errors when an eigenvalue exceeds the overflow cap (~700).
pub fn hermitian_exp(h: &HermitianMatrix) -> Result<HpdMatrix> {
    let eig = eigh(h)?;
    let max_abs = eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, &l| m.max(l.abs()));
    if max_abs > EXP_EIG_CAP {
        return Err(Error::NumericalFailure(format!(
            "matrix exponential overflow: eigenvalue magnitude {max_abs:.3e} exceeds {EXP_EIG_CAP}"
        )));
    }
    HpdMatrix::from_hermitian_unchecked(eig.reconstruct_with(f64::exp))
}

// ---------------------------------------------------------------------------
// Orthonormal basis of the Hermitian vector space and coordinates
// ---------------------------------------------------------------------------

/// Real coordinates of a Hermitian matrix in the canonical orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisCoordinates {
    pub dim: usize,
    pub coords: Vec<f64>,
}

/// The canonical orthonormal basis of d x d Hermitian matrices under the
/// Frobenius inner product: `E_ii` for each i, then for each pair i < j the
/// pair `(E_ij + E_ji)/sqrt(2)` and `i (E_ij - E_ji)/sqrt(2)`.
pub fn hermitian_basis(dim: usize) -> Vec<HermitianMatrix> {
    assert!(dim >= 1, "basis requires dim >= 1");
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        let mut m = ComplexMatrix::zeros(dim);
        m.set(i, i, Complex64::new(1.0, 0.0));
        out.push(HermitianMatrix { mat: m });
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            let mut sym = ComplexMatrix::zeros(dim);
            sym.set(i, j, Complex64::new(inv_sqrt2, 0.0));
            sym.set(j, i, Complex64::new(inv_sqrt2, 0.0));
            out.push(HermitianMatrix { mat: sym });

            let mut asym = ComplexMatrix::zeros(dim);
            asym.set(i, j, Complex64::new(0.0, inv_sqrt2));
            asym.set(j, i, Complex64::new(0.0, -inv_sqrt2));
            out.push(HermitianMatrix { mat: asym });
        }
    }
    out
}

/// Coordinates of `m` in the canonical basis; a linear isometry between
/// `(H, <.,.>_F)` and Euclidean `R^{d^2}`.
pub fn to_coordinates(m: &HermitianMatrix) -> BasisCoordinates {
    let d = m.dim();
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut coords = Vec::with_capacity(d * d);
    for i in 0..d {
        coords.push(m.entry(i, i).re);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let z = m.entry(i, j);
            coords.push(sqrt2 * z.re);
            coords.push(sqrt2 * z.im);
        }
    }
    BasisCoordinates { dim: d, coords }
}

/// Inverse of [`to_coordinates`].
pub fn from_coordinates(c: &BasisCoordinates) -> Result<HermitianMatrix> {
    let d = c.dim;
    if c.coords.len() != d * d {
        return Err(Error::Dimension(format!(
            "expected {} coordinates for dim {d}, got {}",
            d * d,
            c.coords.len()
        )));
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut mat = ComplexMatrix::zeros(d);
    for i in 0..d {
        mat.set(i, i, Complex64::new(c.coords[i], 0.0));
    }
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let re = c.coords[k] * inv_sqrt2;
            let im = c.coords[k + 1] * inv_sqrt2;
            k += 2;
            mat.set(i, j, Complex64::new(re, im));
            mat.set(j, i, Complex64::new(re, -im));
        }
    }
    Ok(HermitianMatrix { mat })
}

// ---------------------------------------------------------------------------
// Congruence transformation
// ---------------------------------------------------------------------------

/// Congruence transformation `a* m a` by an invertible complex matrix.
/// Rejects singular or badly conditioned `a` (condition estimate above 1e12,
/// from the spectrum of `a* a`).
pub fn congruence(a: &ComplexMatrix, m: &HermitianMatrix) -> Result<HermitianMatrix> {
    if a.dim() != m.dim() {
        return Err(Error::Dimension(format!(
            "congruence: transform is {}x{} but matrix is {}x{}",
            a.dim(),
            a.dim(),
            m.dim(),
            m.dim()
        )));
    }
    if !a.is_finite() {
        return Err(Error::Invalid("congruence transform has non-finite entries".into()));
    }
    let gram = HermitianMatrix::symmetrize(a.adjoint().mul(a));
    let eig = eigh(&gram)?;
    let smin = eig.eigenvalues[0];
    let smax = *eig.eigenvalues.last().unwrap();
    if smax <= 0.0 || smin <= 0.0 || (smax / smin).sqrt() > 1e12 {
        return Err(Error::Domain(
            "congruence transform is singular or near-singular".into(),
        ));
    }
    Ok(congruence_unchecked(a, m))
}

/// `a* m a` without the invertibility check, for internal use where `a` is a
/// Hermitian square root or similar well-conditioned factor.
pub(crate) fn congruence_unchecked(a: &ComplexMatrix, m: &HermitianMatrix) -> HermitianMatrix {
    HermitianMatrix::symmetrize(a.adjoint().mul(&m.mat).mul(a))
}

/// Congruence of an HPD matrix stays HPD (Sylvester inertia).
pub fn congruence_hpd(a: &ComplexMatrix, p: &HpdMatrix) -> Result<HpdMatrix> {
    let h = congruence(a, p.base())?;
    HpdMatrix::from_hermitian_unchecked(h)
}

// ---------------------------------------------------------------------------


trait ComplexScale {
    fn scale(&self, s: f64) -> Self;
}

impl ComplexScale for Complex64 {
    fn scale(&self, s: f64) -> Self {
        Complex64::new(self.re * s, self.im * s)
    }
}
