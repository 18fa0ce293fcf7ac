//! Scalar model functions: the double-well potential, degeneracy factor,
//! mobilities, the surface-tension constant, and the Lipschitz transforms
//! used by the lower-bound diagnostics.

use crate::quad;
use crate::{Error, Result};

pub const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Physical and analytic parameters of the energy family.
///
/// `u_minus`/`u_plus` are the pure-phase values, `gamma` the potential
/// prefactor, `p` the exponent of the singular coefficient form, `alpha` the
/// regularization strength and `epsilon` the interface-thickness parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub u_minus: f64,
    pub u_plus: f64,
    pub gamma: f64,
    pub p: f64,
    pub alpha: f64,
    pub epsilon: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            u_minus: -1.0,
            u_plus: 1.0,
            gamma: 1.0,
            p: 1.0,
            alpha: 1.0,
            epsilon: 0.1,
        }
    }
}

impl ModelParams {
    /// Checks the form-independent invariants.
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.u_minus,
            self.u_plus,
            self.gamma,
            self.p,
            self.alpha,
            self.epsilon,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Params("non-finite model parameter".into()));
        }
        if self.u_minus >= self.u_plus {
            return Err(Error::Params(format!(
                "u_minus = {} must be < u_plus = {}",
                self.u_minus, self.u_plus
            )));
        }
        if self.gamma < 0.0 {
            return Err(Error::Params("gamma must be >= 0".into()));
        }
        if self.epsilon <= 0.0 {
            return Err(Error::Params("epsilon must be > 0".into()));
        }
        Ok(())
    }

    /// Distance between the pure phases.
    pub fn phase_gap(&self) -> f64 {
        self.u_plus - self.u_minus
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.u_plus + self.u_minus)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }
}

/// Double-well potential `gamma (u - u_plus)^2 (u - u_minus)^2`.
pub fn potential_w(u: f64, mp: &ModelParams) -> f64 {
    let a = u - mp.u_plus;
    let b = u - mp.u_minus;
    mp.gamma * a * a * b * b
}

/// Derivative of the double-well potential.
pub fn potential_w_prime(u: f64, mp: &ModelParams) -> f64 {
    2.0 * mp.gamma * (u - mp.u_plus) * (u - mp.u_minus) * (2.0 * u - mp.u_plus - mp.u_minus)
}

/// Degeneracy factor `q(u) = (u - u_minus)(u - u_plus)`; strictly negative
/// between the phases, zero at them.
pub fn degeneracy_q(u: f64, mp: &ModelParams) -> f64 {
    (u - mp.u_minus) * (u - mp.u_plus)
}

/// Derivative of the degeneracy factor.
pub fn degeneracy_q_prime(u: f64, mp: &ModelParams) -> f64 {
    2.0 * u - mp.u_plus - mp.u_minus
}

/// Mobility `q(u)^2`, bounded below by `alpha * epsilon` in the regularized
/// variant.
pub fn mobility(u: f64, regularized: bool, mp: &ModelParams) -> f64 {
    let q = degeneracy_q(u, mp);
    let base = q * q;
    if regularized {
        base + mp.alpha * mp.epsilon
    } else {
        base
    }
}

/// Surface-tension constant
/// `sigma(p) = sqrt(2) * Int_{u_minus}^{u_plus} ((s-u_minus)(u_plus-s))^{1-p} ds`.
///
/// The substitution `s = u_minus + L sin^2(theta)` absorbs the endpoint
/// singularities for p > 1, so the quadrature stays accurate up to p < 2.
pub fn surface_tension_sigma(p: f64, mp: &ModelParams) -> Result<f64> {
    if !(p < 2.0) {
        return Err(Error::Domain(format!(
            "surface tension integral diverges for p = {p} (requires p < 2)"
        )));
    }
    let gap = mp.phase_gap();
    let expo = 3.0 - 2.0 * p;
    // sigma = sqrt(2) * gap^(3-2p) * 2 * Int_0^{pi/2} (sin t cos t)^(3-2p) dt
    let r = quad::integrate(
        |t| (t.sin() * t.cos()).powf(expo),
        0.0,
        std::f64::consts::FRAC_PI_2,
        1e-12,
        1e-12,
    );
    Ok(SQRT_2 * gap.powf(expo) * 2.0 * r.value)
}

/// Closed form of the surface-tension constant via the Beta function:
/// `sqrt(2) * (u_plus - u_minus)^{3-2p} * B(2-p, 2-p)`.
pub fn surface_tension_sigma_closed(p: f64, mp: &ModelParams) -> Result<f64> {
    if !(p < 2.0) {
        return Err(Error::Domain(format!(
            "surface tension closed form diverges for p = {p} (requires p < 2)"
        )));
    }
    let gap = mp.phase_gap();
    Ok(SQRT_2 * gap.powf(3.0 - 2.0 * p) * statrs::function::beta::beta(2.0 - p, 2.0 - p))
}

/// Capped transform `h_K(t) = sqrt(2) Int_{u_minus}^t min(|q(s)|^{1-p}, K) ds`.
///
/// Strictly increasing in `t`, Lipschitz with constant `sqrt(2) K`, and
/// monotone in `K`.
pub fn liminf_transform_h(t: f64, cap: f64, mp: &ModelParams) -> f64 {
    assert!(cap > 0.0, "cap K must be positive");
    let expo = 1.0 - mp.p;
    let f = |s: f64| SQRT_2 * degeneracy_q(s, mp).abs().powf(expo).min(cap);
    // The integrand has kinks where the cap activates and (for p > 1) steep
    // growth at the phases; adaptive refinement handles both.
    let r = quad::integrate_with_breaks(f, mp.u_minus, t, &[mp.midpoint(), mp.u_plus], 1e-11, 1e-11);
    r.value
}

/// Uncapped transform for the regularized form:
/// `F(s) = Int_{u_minus}^s sqrt(2 q(t)^2 / (q(t)^2 + alpha eps^2)) dt`.
///
/// Lipschitz with constant `sqrt(2)`; `F(u_plus) -> sqrt(2)(u_plus - u_minus)`
/// as `epsilon -> 0`.
pub fn liminf_transform_f(s: f64, mp: &ModelParams) -> f64 {
    assert!(mp.alpha > 0.0, "alpha must be positive");
    assert!(mp.epsilon > 0.0, "epsilon must be positive");
    let ae2 = mp.alpha * mp.epsilon * mp.epsilon;
    let f = |t: f64| {
        let q2 = degeneracy_q(t, mp).powi(2);
        (2.0 * q2 / (q2 + ae2)).sqrt()
    };
    let r = quad::integrate_with_breaks(f, mp.u_minus, s, &[mp.midpoint(), mp.u_plus], 1e-11, 1e-11);
    r.value
}
