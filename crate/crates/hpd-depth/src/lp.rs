//! Self-contained dense linear program solver for the zonoid depth of the
//! origin with respect to a finite point cloud in R^k.
//!
//! The depth is `sup { alpha : exists lambda in [0,1]^n, sum lambda_i = 1,
//! sum lambda_i x_i = 0, lambda_i <= 1/(n alpha) }`, i.e. `1/(n gamma*)` with
//! `gamma* = min max_i lambda_i` over the feasible simplex. Substituting
//! `beta_i = lambda_i / gamma` turns that program into the equivalent
//! bounded-variable form actually solved here:
//!
//! ```text
//!   maximize   sum_i beta_i
//!   subject to sum_i beta_i x_i = 0,   0 <= beta_i <= 1,
//! ```
//!
//! whose optimum S* satisfies `alpha = S*/n` (and `S* = 0` exactly when the
//! origin lies outside the convex hull of the cloud). The equality system has
//! only k rows, so one solve is O(iterations * k * n) instead of carrying the
//! upper bounds `lambda_i <= gamma` as n explicit rows. Pivoting uses Bland's
//! rule throughout, which makes the solver deterministic and cycle-free;
//! redundant equality rows (rank-deficient clouds) are harmless because their
//! artificial variables simply stay basic at zero past the 1e-9 pivot
//! threshold.

use crate::error::{Error, Result};

const COST_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;

/// The zonoid-depth feasibility/optimization problem: `n` points in R^k
/// (rows of `points`) and the target the depth is taken at (the origin
/// throughout this crate).
#[derive(Clone, Debug)]
pub struct ZonoidLp {
    n: usize,
    k: usize,
    /// row-major n x k
    points: Vec<f64>,
    target: Vec<f64>,
}

impl ZonoidLp {
    /// Builds the program from point rows; the target defaults to the origin.
    pub fn new(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Invalid("zonoid LP needs at least one point".into()));
        }
        let k = rows[0].len();
        if k == 0 || rows.iter().any(|r| r.len() != k) {
            return Err(Error::Dimension(
                "zonoid LP points must share a positive dimension".into(),
            ));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("zonoid LP points must be finite".into()));
        }
        Ok(Self {
            n,
            k,
            points: rows.iter().flatten().copied().collect(),
            target: vec![0.0; k],
        })
    }

    pub fn with_target(mut self, target: Vec<f64>) -> Result<Self> {
        if target.len() != self.k {
            return Err(Error::Dimension("target length must equal point dimension".into()));
        }
        if target.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("target must be finite".into()));
        }
        self.target = target;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

#[derive(Clone, Copy, PartialEq, Debug)]
enum VarStatus {
    Basic(usize),
    AtLower,
    AtUpper,
}

/// Empirical zonoid depth of the target with respect to the cloud, in [0,1].
///
/// Returns 0 when the origin (after centering by the target) lies outside the
/// convex hull of the points, 1 exactly when it is their barycenter.
pub fn zonoid_alpha(lp: &ZonoidLp) -> Result<f64> {
    let n = lp.n;
    let k = lp.k;

    // Centered cloud, sign-canonicalized so that negating every point yields
    // bit-identical output (the program is invariant under beta -> beta).
    let mut pts = vec![0.0; n * k];
    for i in 0..n {
        for j in 0..k {
            pts[i * k + j] = lp.points[i * k + j] - lp.target[j];
        }
    }
    if let Some(first) = pts.iter().find(|v| **v != 0.0) {
        if *first < 0.0 {
            for v in &mut pts {
                *v = -*v;
            }
        }
    }

    // Tableau T = B^{-1} [A | I], A = k x n with columns = points.
    let ncols = n + k;
    let mut t = vec![0.0; k * ncols];
    for r in 0..k {
        for j in 0..n {
            t[r * ncols + j] = pts[j * k + r];
        }
        t[r * ncols + n + r] = 1.0;
    }
    let mut basis: Vec<usize> = (n..n + k).collect();
    let mut status = vec![VarStatus::AtLower; ncols];
    for (r, &b) in basis.iter().enumerate() {
        status[b] = VarStatus::Basic(r);
    }
    let mut x_basic = vec![0.0; k];
    let upper = |j: usize| if j < n { 1.0 } else { 0.0 };
    let cost = |j: usize| if j < n { 1.0 } else { 0.0 };

    let max_iter = 50 * (n + k);
    for _iter in 0..max_iter {
        // Simplex multipliers y_r = cost of basic variable in row r, then
        // reduced costs z_j = c_j - y^T T_j for nonbasic structural columns.
        let y: Vec<f64> = basis.iter().map(|&b| cost(b)).collect();

        let mut entering = None;
        'search: for j in 0..n {
            let (sigma, eligible) = match status[j] {
                VarStatus::Basic(_) => continue,
                VarStatus::AtLower => (1.0, true),
                VarStatus::AtUpper => (-1.0, true),
            };
            if !eligible {
                continue;
            }
            let mut z = cost(j);
            for r in 0..k {
                if y[r] != 0.0 {
                    z -= y[r] * t[r * ncols + j];
                }
            }
            let improves = match status[j] {
                VarStatus::AtLower => z > COST_TOL,
                VarStatus::AtUpper => z < -COST_TOL,
                VarStatus::Basic(_) => false,
            };
            if improves {
                entering = Some((j, sigma));
                break 'search;
            }
        }
        let Some((j, sigma)) = entering else {
            // Optimal: collect the structural mass.
            let mut total = 0.0;
            for jj in 0..n {
                total += match status[jj] {
                    VarStatus::AtLower => 0.0,
                    VarStatus::AtUpper => 1.0,
                    VarStatus::Basic(r) => x_basic[r],
                };
            }
            return Ok((total / n as f64).clamp(0.0, 1.0));
        };

        // Ratio test: how far can x_j travel (by sigma * delta) before a basic
        // variable hits one of its bounds or x_j hits its own opposite bound?
        let mut best_delta = upper(j); // bound flip
        let mut leaving: Option<(usize, bool)> = None; // (row, leaves_at_upper)
        let mut leaving_var = j; // Bland tie-break index for the flip
        for r in 0..k {
            let coeff = sigma * t[r * ncols + j];
            if coeff > PIVOT_TOL {
                let delta = (x_basic[r] / coeff).max(0.0);
                if delta < best_delta - PIVOT_TOL
                    || (delta < best_delta + PIVOT_TOL && basis[r] < leaving_var)
                {
                    best_delta = delta.min(best_delta);
                    leaving = Some((r, false));
                    leaving_var = basis[r];
                }
            } else if coeff < -PIVOT_TOL {
                let room = upper(basis[r]) - x_basic[r];
                let delta = (room / -coeff).max(0.0);
                if delta < best_delta - PIVOT_TOL
                    || (delta < best_delta + PIVOT_TOL && basis[r] < leaving_var)
                {
                    best_delta = delta.min(best_delta);
                    leaving = Some((r, true));
                    leaving_var = basis[r];
                }
            }
        }

        // Move the solution.
        for r in 0..k {
            x_basic[r] -= sigma * best_delta * t[r * ncols + j];
        }
        match leaving {
            None => {
                // Bound flip, no basis change.
                status[j] = match status[j] {
                    VarStatus::AtLower => VarStatus::AtUpper,
                    VarStatus::AtUpper => VarStatus::AtLower,
                    VarStatus::Basic(_) => unreachable!(),
                };
            }
            Some((r, leaves_at_upper)) => {
                let old = basis[r];
                status[old] = if leaves_at_upper {
                    VarStatus::AtUpper
                } else {
                    VarStatus::AtLower
                };
                basis[r] = j;
                let entering_value = match status[j] {
                    VarStatus::AtLower => best_delta,
                    VarStatus::AtUpper => 1.0 - best_delta,
                    VarStatus::Basic(_) => unreachable!(),
                };
                status[j] = VarStatus::Basic(r);
                x_basic[r] = entering_value;

                // Pivot the tableau on (r, j).
                let piv = t[r * ncols + j];
                let inv = 1.0 / piv;
                for c in 0..ncols {
                    t[r * ncols + c] *= inv;
                }
                for rr in 0..k {
                    if rr == r {
                        continue;
                    }
                    let f = t[rr * ncols + j];
                    if f != 0.0 {
                        for c in 0..ncols {
                            t[rr * ncols + c] -= f * t[r * ncols + c];
                        }
                        t[rr * ncols + j] = 0.0;
                    }
                }
            }
        }
    }

    Err(Error::NumericalFailure(format!(
        "zonoid simplex hit the iteration cap {} (n = {n}, k = {k})",
        max_iter
    )))
}
