//! The entropy function `f(x, y) = y*ln(1 + x/y)`, its gradient, and the
//! first-order expansion machinery behind the convexified subproblem.
//!
//! The secrecy expression is a difference of two entropy terms, one per
//! channel. Expanding them at the current iterate turns the difference into
//! an affine model whose coefficients feed both the subproblem objective and
//! its total-bits constraint.

use crate::error::{Error, Result};
use crate::model::DecisionPoint;

/// `y*ln(1 + x/y)`, extended by continuity to 0 at `y = 0`.
///
/// Jointly concave on the nonnegative orthant (it is the perspective of
/// `ln(1 + x)`), and linear along rays from the origin.
pub fn entropy(x: f64, y: f64) -> Result<f64> {
    if !(x.is_finite() && y.is_finite()) || x < 0.0 || y < 0.0 {
        return Err(Error::domain(
            "entropy",
            format!("inputs must be finite and >= 0, got ({x}, {y})"),
        ));
    }
    if y == 0.0 || x == 0.0 {
        return Ok(0.0);
    }
    Ok(y * (1.0 + x / y).ln())
}

/// Gradient of [`entropy`] at `(x0, y0)` with `y0 > 0`:
/// `d/dx = y0/(x0+y0)`, `d/dy = ln(1 + x0/y0) - x0/(x0+y0)`.
pub fn entropy_gradient(x0: f64, y0: f64) -> Result<(f64, f64)> {
    if !(x0.is_finite() && y0.is_finite()) || x0 < 0.0 {
        return Err(Error::domain(
            "entropy_gradient",
            format!("invalid expansion point ({x0}, {y0})"),
        ));
    }
    if y0 <= 0.0 {
        return Err(Error::domain(
            "entropy_gradient",
            format!("y0 = {y0} must be strictly positive"),
        ));
    }
    let dx = y0 / (x0 + y0);
    let dy = (1.0 + x0 / y0).ln() - x0 / (x0 + y0);
    Ok((dx, dy))
}

/// Expansion state for one user: the point `(t0, N0, tau0)` and the derived
/// affine-model coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserExpansion {
    /// Offload time at the expansion point (s), strictly positive.
    pub t: f64,
    /// Legitimate-channel auxiliary value at the expansion point.
    pub legit_aux: f64,
    /// Eavesdropper-channel auxiliary value at the expansion point.
    pub eve_aux: f64,
    /// Time derivative of the legitimate entropy term.
    pub legit_dt: f64,
    /// Time derivative of the eavesdropper entropy term.
    pub eve_dt: f64,
    /// Argument derivative of the legitimate entropy term, `t/(t + N)` in `(0, 1]`.
    pub legit_dx: f64,
    /// Argument derivative of the eavesdropper entropy term, `t/(t + tau)` in `(0, 1]`.
    pub eve_dx: f64,
    /// Exact secrecy value at the expansion point (per unit bandwidth).
    pub offset: f64,
}

impl UserExpansion {
    /// `offset - (legit_dt - eve_dt)*t - legit_dx*N + eve_dx*tau`: the constant
    /// part of the affine secrecy model when written in absolute coordinates.
    pub fn affine_constant(&self) -> f64 {
        self.offset - (self.legit_dt - self.eve_dt) * self.t - self.legit_dx * self.legit_aux
            + self.eve_dx * self.eve_aux
    }
}

/// Expansion state for all users, refreshed once per inner iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Linearization {
    pub users: Vec<UserExpansion>,
}

/// Builds the expansion at `point`. Every user must have `offload_time`
/// strictly above `t_floor`; the coefficients divide by it.
pub fn make_linearization(point: &DecisionPoint, t_floor: f64) -> Result<Linearization> {
    let mut users = Vec::with_capacity(point.users.len());
    for (k, dec) in point.users.iter().enumerate() {
        let t = dec.offload_time;
        if !(t.is_finite() && t >= t_floor) || t <= 0.0 {
            return Err(Error::ExpansionFloor {
                user: k,
                t,
                floor: t_floor,
            });
        }
        let n0 = dec.legit_aux.max(0.0);
        let tau0 = dec.eve_aux.max(0.0);
        let (legit_dx, legit_dt) = entropy_gradient(n0, t)?;
        let (eve_dx, eve_dt) = entropy_gradient(tau0, t)?;
        let offset = entropy(n0, t)? - entropy(tau0, t)?;
        users.push(UserExpansion {
            t,
            legit_aux: n0,
            eve_aux: tau0,
            legit_dt,
            eve_dt,
            legit_dx,
            eve_dx,
            offset,
        });
    }
    Ok(Linearization { users })
}

/// The affine secrecy-bits model at `(t, N, tau)` around `exp`, scaled by the
/// bandwidth. At the expansion point it reproduces the exact value.
pub fn linearized_secrecy_bits(
    t: f64,
    legit_aux: f64,
    eve_aux: f64,
    exp: &UserExpansion,
    bandwidth: f64,
) -> f64 {
    bandwidth
        * ((exp.legit_dt - exp.eve_dt) * (t - exp.t) + exp.legit_dx * (legit_aux - exp.legit_aux)
            - exp.eve_dx * (eve_aux - exp.eve_aux)
            + exp.offset)
}
