//! Numerical layer for the Hilbert space `F^2_alpha`.
//!
//! The reproducing kernel is `K(z, w) = exp(alpha z conj(w))` and the
//! normalised kernel at `w` is `k_w(z) = exp(alpha z conj(w) - alpha |w|^2 / 2)`.
//! Every stored quantity is a weighted one: Gram entries
//! `<k_n, k_m> = exp(alpha z_m conj(z_n) - alpha (|z_m|^2 + |z_n|^2) / 2)` are
//! assembled as `exp(-alpha |z_m - z_n|^2 / 2 + i alpha Im(z_m conj(z_n)))`,
//! which has modulus at most one and no overflow for any node positions.
//!
//! Eigenvalues of a patch Gram matrix are finite-section Riesz-bound
//! proxies, not frame bounds of the infinite system.

pub mod linalg;

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::geometry::{Point, PointSet};
use crate::lattice::hexagonal_patch;
pub use linalg::HermitianMatrix;
use linalg::{jacobi_eigenvalues, solve_hpd};

pub type ComplexValue = Complex64;

/// Largest real part `exp` accepts without overflowing.
const EXP_LIMIT: f64 = 709.78;

/// Below this `lambda_min` a finite interpolation problem is declared
/// ill-posed.
pub const SINGULAR_LAMBDA: f64 = 1e-12;

pub const DEFAULT_EIG_TOL: f64 = 1e-13;

fn as_complex(p: Point) -> Complex64 {
    Complex64::new(p.x, p.y)
}

fn checked_exp(z: Complex64) -> Result<Complex64> {
    if z.re > EXP_LIMIT {
        return Err(Error::KernelOverflow(z.re));
    }
    Ok(z.exp())
}

/// `exp(alpha z conj(w))`.
pub fn kernel(alpha: f64, z: Point, w: Point) -> Result<ComplexValue> {
    check_positive("alpha", alpha)?;
    checked_exp(as_complex(z) * as_complex(w).conj() * alpha)
}

/// Exponent of `k_w(z) exp(-alpha |z|^2 / 2)`, written so that the real part
/// is `-alpha |z - w|^2 / 2` exactly.
#[inline]
fn weighted_exponent(alpha: f64, z: Point, w: Point) -> Complex64 {
    Complex64::new(-0.5 * alpha * z.dist2(w), alpha * (z.y * w.x - z.x * w.y))
}

/// Gram matrix of the normalised kernels at the points of a set.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    pub alpha: f64,
    pub points: PointSet,
    pub entries: HermitianMatrix,
}

impl GramMatrix {
    pub fn n(&self) -> usize {
        self.entries.dim()
    }

    pub fn get(&self, m: usize, n: usize) -> ComplexValue {
        self.entries.get(m, n)
    }

    /// Largest off-diagonal absolute row sum.
    pub fn max_off_diagonal_row_sum(&self) -> f64 {
        (0..self.n())
            .map(|m| {
                self.entries
                    .row(m)
                    .iter()
                    .enumerate()
                    .filter(|&(n, _)| n != m)
                    .map(|(_, z)| z.norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

pub fn gram(alpha: f64, ps: &PointSet) -> Result<GramMatrix> {
    check_positive("alpha", alpha)?;
    if ps.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let pts = ps.points();
    let n = pts.len();
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|m| (0..n).map(|k| weighted_exponent(alpha, pts[m], pts[k]).exp()).collect())
        .collect();
    let entries = HermitianMatrix::from_fn(n, |i, j| rows[i][j]);
    Ok(GramMatrix {
        alpha,
        points: ps.clone(),
        entries,
    })
}

/// `1 - max_m sum_{n != m} |G[m][n]|`. When positive it is a lower bound on
/// the smallest eigenvalue (Gershgorin discs around the unit diagonal).
pub fn gershgorin_riesz_lower_bound(g: &GramMatrix) -> f64 {
    1.0 - g.max_off_diagonal_row_sum()
}

/// Smallest and largest eigenvalue of a Gram matrix.
pub fn eig_extremes(g: &GramMatrix, tol: f64) -> Result<(f64, f64)> {
    check_positive("eigenvalue tolerance", tol)?;
    g.entries.check_hermitian(0.0)?;
    let eig = jacobi_eigenvalues(&g.entries, tol)?;
    Ok((eig[0], eig[eig.len() - 1]))
}

/// `f(z) = sum_n c_n k_{z_n}(z)`.
pub fn evaluate(alpha: f64, ps: &PointSet, coefficients: &[ComplexValue], z: Point) -> Result<ComplexValue> {
    check_positive("alpha", alpha)?;
    check_len(ps, coefficients)?;
    let zc = as_complex(z);
    let mut acc = Complex64::new(0.0, 0.0);
    for (p, c) in ps.points().iter().zip(coefficients) {
        let w = as_complex(*p);
        let e = zc * w.conj() * alpha - 0.5 * alpha * w.norm_sqr();
        acc += c * checked_exp(e)?;
    }
    Ok(acc)
}

/// `f(z) exp(-alpha |z|^2 / 2)`, the bounded readout used for residuals.
pub fn evaluate_weighted(alpha: f64, ps: &PointSet, coefficients: &[ComplexValue], z: Point) -> Result<ComplexValue> {
    check_positive("alpha", alpha)?;
    check_len(ps, coefficients)?;
    Ok(ps
        .points()
        .iter()
        .zip(coefficients)
        .map(|(p, c)| c * weighted_exponent(alpha, z, *p).exp())
        .sum())
}

fn check_len(ps: &PointSet, coefficients: &[ComplexValue]) -> Result<()> {
    if coefficients.len() != ps.len() {
        return Err(Error::LengthMismatch {
            expected: ps.len(),
            got: coefficients.len(),
        });
    }
    Ok(())
}

/// `lambda_max / lambda_min`, infinite once `lambda_min` has rounded to zero
/// or below. Infinite values serialise to JSON as `null`.
pub fn condition_number(lambda_min: f64, lambda_max: f64) -> f64 {
    if lambda_min > 0.0 {
        lambda_max / lambda_min
    } else {
        f64::INFINITY
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolationSolution {
    pub coefficients: Vec<ComplexValue>,
    pub residual_inf: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub condition: f64,
    pub coeff_norm: f64,
}

/// Finds `f = sum c_n k_{z_n}` with `f(z_n) = v_n`.
///
/// Solves `G c = w`, `w_m = v_m exp(-alpha |z_m|^2 / 2)`, by Cholesky with
/// refinement. The residual is recomputed by evaluating `f` at the nodes.
pub fn interpolate(alpha: f64, ps: &PointSet, targets: &[ComplexValue]) -> Result<InterpolationSolution> {
    check_positive("alpha", alpha)?;
    check_len(ps, targets)?;
    let weighted: Vec<Complex64> = ps
        .points()
        .iter()
        .zip(targets)
        .map(|(p, v)| v * (-0.5 * alpha * p.dist2(Point::ORIGIN)).exp())
        .collect();
    if let Some(i) = weighted.iter().position(|w| !(w.re.is_finite() && w.im.is_finite())) {
        return Err(Error::InvalidParameter {
            name: "weighted target",
            value: i as f64,
            reason: "must be finite (value is the node index)",
        });
    }
    let g = gram(alpha, ps)?;
    let (lambda_min, lambda_max) = eig_extremes(&g, DEFAULT_EIG_TOL)?;
    if lambda_min < SINGULAR_LAMBDA {
        return Err(Error::IllPosed { lambda_min });
    }
    let coefficients = solve_hpd(&g.entries, &weighted, 2)?;
    let residual_inf = ps
        .points()
        .par_iter()
        .zip(&weighted)
        .map(|(p, w)| evaluate_weighted(alpha, ps, &coefficients, *p).map(|f| (f - w).norm()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let coeff_norm = coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    Ok(InterpolationSolution {
        coefficients,
        residual_inf,
        lambda_min,
        lambda_max,
        condition: condition_number(lambda_min, lambda_max),
        coeff_norm,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditioningRow {
    pub sigma: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub condition: f64,
}

/// Finite-section extremes of hexagonal patches with `rings` rings, one row
/// per spacing, sorted by ascending spacing.
pub fn conditioning_sweep(alpha: f64, spacings: &[f64], rings: u32) -> Result<Vec<ConditioningRow>> {
    check_positive("alpha", alpha)?;
    for &s in spacings {
        check_positive("spacing", s)?;
    }
    let mut sorted = spacings.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
        .par_iter()
        .map(|&sigma| {
            let g = gram(alpha, &hexagonal_patch(sigma, rings)?)?;
            let (lambda_min, lambda_max) = eig_extremes(&g, DEFAULT_EIG_TOL)?;
            Ok(ConditioningRow {
                sigma,
                lambda_min,
                lambda_max,
                condition: condition_number(lambda_min, lambda_max),
            })
        })
        .collect()
}

/// CSV with header `sigma,lambda_min,lambda_max,condition`.
pub fn write_conditioning_csv<W: Write>(rows: &[ConditioningRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["sigma", "lambda_min", "lambda_max", "condition"])?;
    for r in rows {
        w.write_record([
            r.sigma.to_string(),
            format!("{:e}", r.lambda_min),
            format!("{:e}", r.lambda_max),
            format!("{:e}", r.condition),
        ])?;
    }
    w.flush()?;
    Ok(())
}
