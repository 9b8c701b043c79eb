//! Small dense complex linear algebra used throughout the crate.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Condition number above which a dense system is reported as singular.
pub const SINGULAR_CONDITION: f64 = 1e13;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// All-ones matrix `J^(rows, cols)`.
pub fn ones(rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_element(rows, cols, C64::new(1.0, 0.0))
}

/// Largest entrywise modulus of `a - b`. Shapes must agree.
pub fn max_entry_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_entry_distance");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_entry_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |(U^dagger U - I)_ij|`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.ncols();
    max_entry_distance(&(u.adjoint() * u), &identity(n))
}

/// `max |(H - H^dagger)_ij|`.
pub fn hermiticity_defect(h: &CMatrix) -> f64 {
    max_entry_distance(h, &h.adjoint())
}

/// Ratio of extreme singular values; `inf` for an exactly singular matrix.
pub fn condition_estimate(a: &CMatrix) -> f64 {
    let sv = a.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Numerical rank from singular values, relative to the largest one.
pub fn rank(a: &CMatrix, rel_tol: f64) -> usize {
    let sv = a.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Solves `a X = rhs` by LU with partial pivoting. One factorization serves
/// every right-hand-side column.
pub fn solve_dense(a: &CMatrix, rhs: &CMatrix) -> Result<CMatrix> {
    let condition = condition_estimate(a);
    if !condition.is_finite() || condition > SINGULAR_CONDITION {
        return Err(Error::SingularSystem { condition });
    }
    a.clone()
        .lu()
        .solve(rhs)
        .ok_or(Error::SingularSystem { condition })
}

/// Solves `h X = rhs` for Hermitian positive definite `h` via Cholesky.
///
/// Panics if `h` is not positive definite; callers only pass matrices of the
/// form `I + M M^dagger`.
pub fn solve_hpd(h: &CMatrix, rhs: &CMatrix) -> CMatrix {
    let chol = h
        .clone()
        .cholesky()
        .expect("matrix of the form I + M M^dagger must be positive definite");
    chol.solve(rhs)
}

/// Principal argument in `(-pi, pi]`.
pub fn principal_arg(z: C64) -> f64 {
    let a = z.arg();
    if a == -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        a
    }
}

/// Wraps an angle into `[0, 2 pi)`.
pub fn wrap_phase(x: f64) -> f64 {
    let w = x.rem_euclid(std::f64::consts::TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= std::f64::consts::TAU {
        0.0
    } else {
        w
    }
}
