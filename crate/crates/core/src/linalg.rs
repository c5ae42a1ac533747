//! Minimal dense linear algebra for small systems.
//!
//! The chains handled here have at most a few dozen states, so a textbook
//! partial-pivoting elimination is all the solver machinery the crate needs.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Solves `A x = b` in place for square `A` (row-major, `n x n`).
///
/// Returns `Err(Error::NoConvergence)` when a pivot collapses, which for the
/// callers in this crate means the system was singular.
pub fn solve<F: Scalar>(a: &mut [F], b: &mut [F], n: usize) -> Result<Vec<F>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col * n + col].abs();
        for row in col + 1..n {
            let cand = a[row * n + col].abs();
            if cand > best {
                best = cand;
                pivot = row;
            }
        }
        if !(best > F::zero()) || !best.is_finite() {
            return Err(Error::NoConvergence { residual: best.as_f64() });
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let inv = F::one() / a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] * inv;
            if factor != F::zero() {
                for k in col..n {
                    let upd = a[col * n + k] * factor;
                    a[row * n + k] -= upd;
                }
                let upd = b[col] * factor;
                b[row] -= upd;
            }
        }
    }
    let mut x = vec![F::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row * n + k] * x[k];
        }
        x[row] = acc / a[row * n + row];
    }
    Ok(x)
}
