//! The de Gennes coefficient family behind a common strategy trait.
//!
//! Each variant of the weight `g(u)` (power-law singular forms and the
//! non-degenerate regularization) implements [`CoeffForm`]. Variants are
//! registered by name so configuration files and the CLI can select one at
//! runtime; numeric parameters (`p`, `alpha`, `epsilon`) come from
//! [`ModelParams`], the strategies themselves are stateless.

use crate::model::{degeneracy_q, degeneracy_q_prime, potential_w, ModelParams};
use crate::{Error, Result};

/// Strategy interface for the coefficient `g(u)` weighting the energy
/// integrand as `1/g`.
///
/// The `w_over_g` and `bv_weight` evaluators cancel the common powers of
/// `|q(u)|` analytically, so the ratios stay finite where both numerator and
/// denominator vanish.
pub trait CoeffForm: std::fmt::Debug + Send + Sync {
    /// Registry name, also used in CSV output.
    fn name(&self) -> &'static str;

    /// `g(u)`.
    fn g(&self, u: f64, mp: &ModelParams) -> f64;

    /// `g'(u) / g(u)^2`.
    ///
    /// Degenerate forms are only defined strictly between the phases and
    /// return a domain error at or outside them.
    fn g_prime_over_g_sq(&self, u: f64, mp: &ModelParams) -> Result<f64>;

    /// Fused ratio `W(u) / g(u)` with the removable singularity canceled.
    fn w_over_g(&self, u: f64, mp: &ModelParams) -> f64;

    /// Fused ratio `sqrt(2 W(u)) / g(u)`, the per-point weight of the
    /// gradient in the lower-bound diagnostics.
    fn bv_weight(&self, u: f64, mp: &ModelParams) -> f64;

    /// Positive lower bound of `g` over all of `u`, zero for degenerate
    /// forms.
    fn g_lower_bound(&self, mp: &ModelParams) -> f64;

    /// Whether `g` vanishes at the pure phases.
    fn vanishes_at_pure_phases(&self, mp: &ModelParams) -> bool;

    /// Form-specific parameter checks on top of [`ModelParams::validate`].
    fn validate(&self, mp: &ModelParams) -> Result<()>;
}

/// `g(u) = |q(u)|^p` with the exponent taken from `ModelParams::p`.
#[derive(Debug)]
pub struct SingularP;

/// `g(u) = |q(u)|`, the hardwired `p = 1` case of [`SingularP`].
#[derive(Debug)]
pub struct SingularOne;

/// `g(u) = sqrt(q(u)^2 + alpha^2 epsilon^2)`, bounded below by
/// `alpha * epsilon`.
#[derive(Debug)]
pub struct Regularized;

pub static SINGULAR_P: SingularP = SingularP;
pub static SINGULAR_ONE: SingularOne = SingularOne;
pub static REGULARIZED: Regularized = Regularized;

/// All registered coefficient forms.
pub fn all_forms() -> [&'static dyn CoeffForm; 3] {
    [&SINGULAR_P, &SINGULAR_ONE, &REGULARIZED]
}

/// Runtime lookup by registry name.
pub fn form_by_name(name: &str) -> Option<&'static dyn CoeffForm> {
    match name {
        "singular-p" | "singular" => Some(&SINGULAR_P),
        "singular-1" | "singular-one" => Some(&SINGULAR_ONE),
        "regularized" => Some(&REGULARIZED),
        _ => None,
    }
}

fn singular_domain_err(u: f64, mp: &ModelParams) -> Error {
    Error::Domain(format!(
        "g'/g^2 of a degenerate form requires u strictly in ({}, {}); got {u}",
        mp.u_minus, mp.u_plus
    ))
}

impl CoeffForm for SingularP {
    fn name(&self) -> &'static str {
        "singular-p"
    }

    fn g(&self, u: f64, mp: &ModelParams) -> f64 {
        degeneracy_q(u, mp).abs().powf(mp.p)
    }

    fn g_prime_over_g_sq(&self, u: f64, mp: &ModelParams) -> Result<f64> {
        if mp.p == 0.0 {
            return Ok(0.0); // g is constant
        }
        if !(u > mp.u_minus && u < mp.u_plus) {
            return Err(singular_domain_err(u, mp));
        }
        let a = u - mp.u_minus;
        let b = mp.u_plus - u;
        Ok(-mp.p * degeneracy_q_prime(u, mp) / (a.powf(mp.p + 1.0) * b.powf(mp.p + 1.0)))
    }

    fn w_over_g(&self, u: f64, mp: &ModelParams) -> f64 {
        mp.gamma * degeneracy_q(u, mp).abs().powf(2.0 - mp.p)
    }

    fn bv_weight(&self, u: f64, mp: &ModelParams) -> f64 {
        (2.0 * mp.gamma).sqrt() * degeneracy_q(u, mp).abs().powf(1.0 - mp.p)
    }

    fn g_lower_bound(&self, mp: &ModelParams) -> f64 {
        if mp.p == 0.0 {
            1.0
        } else {
            0.0
        }
    }

    fn vanishes_at_pure_phases(&self, mp: &ModelParams) -> bool {
        mp.p > 0.0
    }

    fn validate(&self, mp: &ModelParams) -> Result<()> {
        if !(0.0..=1.5).contains(&mp.p) {
            return Err(Error::Params(format!(
                "singular-p form requires 0 <= p <= 1.5, got p = {}",
                mp.p
            )));
        }
        Ok(())
    }
}

impl CoeffForm for SingularOne {
    fn name(&self) -> &'static str {
        "singular-1"
    }

    fn g(&self, u: f64, mp: &ModelParams) -> f64 {
        degeneracy_q(u, mp).abs()
    }

    fn g_prime_over_g_sq(&self, u: f64, mp: &ModelParams) -> Result<f64> {
        if !(u > mp.u_minus && u < mp.u_plus) {
            return Err(singular_domain_err(u, mp));
        }
        let a = u - mp.u_minus;
        let b = mp.u_plus - u;
        Ok(-degeneracy_q_prime(u, mp) / (a * a * b * b))
    }

    fn w_over_g(&self, u: f64, mp: &ModelParams) -> f64 {
        mp.gamma * degeneracy_q(u, mp).abs()
    }

    fn bv_weight(&self, _u: f64, mp: &ModelParams) -> f64 {
        (2.0 * mp.gamma).sqrt()
    }

    fn g_lower_bound(&self, _mp: &ModelParams) -> f64 {
        0.0
    }

    fn vanishes_at_pure_phases(&self, _mp: &ModelParams) -> bool {
        true
    }

    fn validate(&self, _mp: &ModelParams) -> Result<()> {
        Ok(())
    }
}

impl CoeffForm for Regularized {
    fn name(&self) -> &'static str {
        "regularized"
    }

    fn g(&self, u: f64, mp: &ModelParams) -> f64 {
        let q = degeneracy_q(u, mp);
        let ae = mp.alpha * mp.epsilon;
        (q * q + ae * ae).sqrt()
    }

    fn g_prime_over_g_sq(&self, u: f64, mp: &ModelParams) -> Result<f64> {
        // g' = q q' / g, so g'/g^2 = q q' / g^3
        let q = degeneracy_q(u, mp);
        let g = self.g(u, mp);
        Ok(q * degeneracy_q_prime(u, mp) / (g * g * g))
    }

    fn w_over_g(&self, u: f64, mp: &ModelParams) -> f64 {
        potential_w(u, mp) / self.g(u, mp)
    }

    fn bv_weight(&self, u: f64, mp: &ModelParams) -> f64 {
        (2.0 * mp.gamma).sqrt() * degeneracy_q(u, mp).abs() / self.g(u, mp)
    }

    fn g_lower_bound(&self, mp: &ModelParams) -> f64 {
        mp.alpha * mp.epsilon
    }

    fn vanishes_at_pure_phases(&self, _mp: &ModelParams) -> bool {
        false
    }

    fn validate(&self, mp: &ModelParams) -> Result<()> {
        if mp.alpha <= 0.0 {
            return Err(Error::Params(format!(
                "regularized form requires alpha > 0, got alpha = {}",
                mp.alpha
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mp() -> ModelParams {
        ModelParams::default()
    }

    #[test]
    fn registry_lookup() {
        assert_eq!(form_by_name("singular-p").unwrap().name(), "singular-p");
        assert_eq!(form_by_name("singular-1").unwrap().name(), "singular-1");
        assert_eq!(form_by_name("regularized").unwrap().name(), "regularized");
        assert!(form_by_name("nope").is_none());
        assert_eq!(all_forms().len(), 3);
    }

    #[test]
    fn g_values() {
        let mp = mp();
        // regularized at a pure phase: q = 0, so g = alpha * epsilon
        assert_relative_eq!(
            REGULARIZED.g(mp.u_plus, &mp),
            mp.alpha * mp.epsilon,
            max_relative = 1e-15
        );
        // |q(0)| = 1 for any exponent
        assert_relative_eq!(SINGULAR_P.g(0.0, &mp), 1.0, max_relative = 1e-15);
        let mut mph = mp;
        mph.p = 0.5;
        assert_relative_eq!(SINGULAR_P.g(0.0, &mph), 1.0, max_relative = 1e-15);
        assert_eq!(SINGULAR_P.g(mp.u_minus, &mp), 0.0);
    }

    #[test]
    fn singular_one_matches_singular_p_at_p1() {
        let mp = mp(); // p = 1
        for i in 0..=200 {
            let u = -2.0 + 4.0 * i as f64 / 200.0;
            assert_eq!(SINGULAR_P.g(u, &mp), SINGULAR_ONE.g(u, &mp));
            assert_eq!(SINGULAR_P.w_over_g(u, &mp), SINGULAR_ONE.w_over_g(u, &mp));
            if u > mp.u_minus && u < mp.u_plus {
                let a = SINGULAR_P.g_prime_over_g_sq(u, &mp).unwrap();
                let b = SINGULAR_ONE.g_prime_over_g_sq(u, &mp).unwrap();
                assert_relative_eq!(a, b, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn regularized_lower_bound_everywhere() {
        let mp = mp();
        for i in 0..=400 {
            let u = -3.0 + 6.0 * i as f64 / 400.0;
            assert!(REGULARIZED.g(u, &mp) >= mp.alpha * mp.epsilon);
        }
    }

    #[test]
    fn g_prime_over_g_sq_values() {
        let mp = mp();
        // midpoint: numerator 2u - u_plus - u_minus = 0 for either form
        assert_eq!(SINGULAR_P.g_prime_over_g_sq(0.0, &mp).unwrap(), 0.0);
        assert_eq!(REGULARIZED.g_prime_over_g_sq(0.0, &mp).unwrap(), 0.0);
        // p=1, u=0.5: -1 / ((1.5)^2 (0.5)^2) = -16/9
        assert_relative_eq!(
            SINGULAR_P.g_prime_over_g_sq(0.5, &mp).unwrap(),
            -16.0 / 9.0,
            max_relative = 1e-13
        );
        // regularized at the pure phase: q = 0 makes g' = 0
        assert_eq!(REGULARIZED.g_prime_over_g_sq(mp.u_plus, &mp).unwrap(), 0.0);
    }

    #[test]
    fn singular_form_domain_errors() {
        let mp = mp();
        assert!(SINGULAR_P.g_prime_over_g_sq(mp.u_plus, &mp).is_err());
        assert!(SINGULAR_P.g_prime_over_g_sq(mp.u_minus, &mp).is_err());
        assert!(SINGULAR_ONE.g_prime_over_g_sq(1.7, &mp).is_err());
    }

    #[test]
    fn g_prime_over_g_sq_matches_fd_of_reciprocal() {
        // d/du (1/g) = -g'/g^2, checked by centered differences away from
        // the phases.
        let forms = all_forms();
        let mut mp = mp();
        mp.p = 1.25;
        let us = [-0.7, -0.2, 0.33, 0.8];
        for form in forms {
            for &u in &us {
                let mut errs = Vec::new();
                for &h in &[1e-3, 1e-4] {
                    let fd = (1.0 / form.g(u + h, &mp) - 1.0 / form.g(u - h, &mp)) / (2.0 * h);
                    errs.push((fd + form.g_prime_over_g_sq(u, &mp).unwrap()).abs());
                }
                if errs[1] > 1e-12 {
                    let order = (errs[0] / errs[1]).log10();
                    assert!(order >= 1.9, "{} at u={u}: order {order}", form.name());
                }
            }
        }
    }

    #[test]
    fn fused_ratio_extends_continuously() {
        // W/g = gamma |q|^{2-p}: zero at the phases, matches the naive
        // quotient strictly inside.
        for &p in &[0.5, 1.0, 1.5] {
            let mut mp = mp();
            mp.p = p;
            assert_eq!(SINGULAR_P.w_over_g(mp.u_plus, &mp), 0.0);
            assert_eq!(SINGULAR_P.w_over_g(mp.u_minus, &mp), 0.0);
            for &u in &[-0.9, -0.1, 0.6, 0.999] {
                let naive = potential_w(u, &mp) / SINGULAR_P.g(u, &mp);
                assert_relative_eq!(SINGULAR_P.w_over_g(u, &mp), naive, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn validation_rules() {
        let mut mp = mp();
        mp.p = 1.6;
        assert!(SINGULAR_P.validate(&mp).is_err());
        mp.p = 1.5;
        assert!(SINGULAR_P.validate(&mp).is_ok());
        mp.p = 0.0;
        assert!(SINGULAR_P.validate(&mp).is_ok());

        let mut mp = ModelParams::default();
        mp.alpha = 0.0;
        assert!(REGULARIZED.validate(&mp).is_err());
    }
}
