//! Bracketed bisection.

/// Why a bisection could not produce a root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BisectError {
    /// `f(lo)` and `f(hi)` share a sign.
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    NotConverged { iterations: usize },
    /// The function returned NaN inside the bracket.
    NotFinite { x: f64 },
}

/// Finds a root of `f` in `[lo, hi]`, stopping once the bracket is narrower
/// than `tol`. An endpoint where `f` is exactly zero is returned as is.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<f64, BisectError>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    if fa.is_nan() {
        return Err(BisectError::NotFinite { x: a });
    }
    if fb.is_nan() {
        return Err(BisectError::NotFinite { x: b });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(BisectError::NoSignChange {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }
    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        if (b - a).abs() < tol || m == a || m == b {
            return Ok(m);
        }
        let fm = f(m);
        if fm.is_nan() {
            return Err(BisectError::NotFinite { x: m });
        }
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    if (b - a).abs() < tol {
        Ok(0.5 * (a + b))
    } else {
        Err(BisectError::NotConverged {
            iterations: max_iter,
        })
    }
}
