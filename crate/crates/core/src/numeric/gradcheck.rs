//! Central-difference gradient checker.

use super::{DenseMatrix, Scalar};
use crate::error::{Error, Result};

pub const FD_STEP: f64 = 1e-5;

/// Maximum over coordinates of `|fd - an| / max(1, |fd|, |an|)`, where `fd` is
/// the central difference of `f` at `x` with step `1e-5`.
pub fn grad_check<T, F>(mut f: F, x: &DenseMatrix<T>, analytic: &DenseMatrix<T>) -> Result<T>
where
    T: Scalar,
    F: FnMut(&DenseMatrix<T>) -> Result<T>,
{
    if x.shape() != analytic.shape() {
        return Err(Error::Shape {
            op: "grad_check",
            left: x.shape(),
            right: analytic.shape(),
        });
    }
    let base = f(x)?;
    if !base.is_finite() {
        return Err(Error::NonFinite(format!("f(x) = {base}")));
    }
    let h = T::of(FD_STEP);
    let two_h = h + h;
    let mut probe = x.clone();
    let mut worst = T::zero();
    for k in 0..x.as_slice().len() {
        let orig = probe.as_slice()[k];
        probe.as_mut_slice()[k] = orig + h;
        let plus = f(&probe)?;
        probe.as_mut_slice()[k] = orig - h;
        let minus = f(&probe)?;
        probe.as_mut_slice()[k] = orig;
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::NonFinite(format!("f(x ± h) at coordinate {k}")));
        }
        let fd = (plus - minus) / two_h;
        let an = analytic.as_slice()[k];
        let denom = T::one().max(fd.abs()).max(an.abs());
        worst = worst.max((fd - an).abs() / denom);
    }
    Ok(worst)
}
