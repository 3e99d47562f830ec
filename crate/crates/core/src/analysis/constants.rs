use crate::error::{check_beta, invalid, Error, Result};

/// Default tolerance on `|alpha(beta*) - 1|`.
pub const DEFAULT_TOL: f64 = 1e-9;

pub(crate) fn check_m(m: f64) -> Result<()> {
    if !(m.is_finite() && m > -1.0) {
        return Err(invalid("M", format!("must be a finite number above -1, got {m}")));
    }
    Ok(())
}

/// `alpha(beta) = 8 e^{-beta (M + 1)} / (1 - e^{-beta})^2`.
pub fn alpha(beta: f64, m: f64) -> Result<f64> {
    check_beta(beta)?;
    check_m(m)?;
    let gap = -(-beta).exp_m1();
    Ok(8.0 * (-beta * (m + 1.0)).exp() / (gap * gap))
}

/// Total rate `sum_s 4 s e^{-beta s - beta M}` of rectangles whose basis
/// contains a fixed vertex; equal to `alpha / 2`.
pub fn vertex_rate(beta: f64, m: f64) -> Result<f64> {
    Ok(0.5 * alpha(beta, m)?)
}

/// Root of `alpha(beta) = 1` by bisection.
pub fn beta_star(m: f64, tol: f64) -> Result<f64> {
    check_m(m)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(invalid("tol", format!("must be positive, got {tol}")));
    }
    let f = |b: f64| alpha(b, m).map(|a| a - 1.0);
    let mut lo = 1e-6;
    if f(lo)? <= 0.0 {
        return Err(Error::Bracket(format!("alpha({lo}) <= 1 for M = {m}")));
    }
    let mut hi = 1.0;
    let mut doublings = 0;
    while f(hi)? >= 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 60 {
            return Err(Error::Bracket(format!("no beta with alpha < 1 below {hi} for M = {m}")));
        }
    }
    loop {
        let mid = 0.5 * (lo + hi);
        let v = f(mid)?;
        if v.abs() < tol || hi - lo <= f64::EPSILON * hi {
            return Ok(mid);
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Errors unless `alpha(beta, M) < 1`.
pub fn check_subcritical(beta: f64, m: f64) -> Result<()> {
    if alpha(beta, m)? >= 1.0 {
        return Err(Error::Subcritical { beta, beta_star: beta_star(m, DEFAULT_TOL)?, m });
    }
    Ok(())
}
