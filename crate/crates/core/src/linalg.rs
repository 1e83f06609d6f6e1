//! Dense complex solves via partial-pivot LU.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Solution of a dense system with a cheap conditioning indicator.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    pub x: DVector<Complex64>,
    /// max |U_ii| / min |U_ii| of the LU factor. A lower bound on the true
    /// condition number, good enough to flag resonant configurations.
    pub condition: f64,
    pub min_pivot: f64,
}

/// Solves `matrix * x = rhs`. Fails only when a pivot is exactly zero or the
/// result is not finite; callers apply their own conditioning thresholds.
pub fn solve_dense(matrix: DMatrix<Complex64>, rhs: &DVector<Complex64>) -> Result<DenseSolution> {
    let n = matrix.nrows();
    if n != matrix.ncols() || n != rhs.len() {
        return Err(Error::Precondition(format!(
            "dimension mismatch: {}x{} matrix, rhs of length {}",
            matrix.nrows(),
            matrix.ncols(),
            rhs.len()
        )));
    }
    let lu = matrix.lu();
    let u = lu.u();
    let (mut max_pivot, mut min_pivot) = (0.0f64, f64::INFINITY);
    for i in 0..n {
        let p = u[(i, i)].norm();
        max_pivot = max_pivot.max(p);
        min_pivot = min_pivot.min(p);
    }
    let condition = if min_pivot > 0.0 {
        max_pivot / min_pivot
    } else {
        f64::INFINITY
    };
    let x = lu
        .solve(rhs)
        .filter(|x| x.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
        .ok_or(Error::SingularSystem { condition })?;
    Ok(DenseSolution {
        x,
        condition,
        min_pivot,
    })
}
