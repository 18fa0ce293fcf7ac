//! One-dimensional transition profiles and recovery fields.
//!
//! The profile is the inverse of the strictly increasing map
//! `Phi(s) = Int_{u_minus}^s eps / sqrt(2 W + shift) ds` where the shift is
//! `2 eps` by default (so the inverse satisfies
//! `dphi/dt = sqrt(2 (W(phi) + eps)) / eps`) or `eps` for the alternative
//! variant with derivative `sqrt(2 W(phi) + eps) / eps`. Composing the
//! inverse with a signed distance yields a field that transitions from
//! `u_minus` to `u_plus` across a band of width `Phi(u_plus)` inside the
//! region.

use crate::grid::{Field, Grid};
use crate::model::{potential_w, ModelParams};
use crate::quad;
use crate::region::Region;
use crate::{Error, Result};

/// Which constant is added under the square root of the profile integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProfileVariant {
    /// Integrand `eps / sqrt(2 W + 2 eps)`.
    #[default]
    TwoWPlusTwoEps,
    /// Integrand `eps / sqrt(2 W + eps)`.
    TwoWPlusEps,
}

impl ProfileVariant {
    pub fn name(&self) -> &'static str {
        match self {
            ProfileVariant::TwoWPlusTwoEps => "two-w-plus-two-eps",
            ProfileVariant::TwoWPlusEps => "two-w-plus-eps",
        }
    }

    pub fn by_name(name: &str) -> Option<ProfileVariant> {
        match name {
            "two-w-plus-two-eps" => Some(ProfileVariant::TwoWPlusTwoEps),
            "two-w-plus-eps" => Some(ProfileVariant::TwoWPlusEps),
            _ => None,
        }
    }

    fn shift(&self, eps: f64) -> f64 {
        match self {
            ProfileVariant::TwoWPlusTwoEps => 2.0 * eps,
            ProfileVariant::TwoWPlusEps => eps,
        }
    }
}

/// Monotone sample table of the transition profile `phi` on `[0, width]`,
/// extended by the pure phases outside.
#[derive(Debug, Clone)]
pub struct Profile {
    eps: f64,
    variant: ProfileVariant,
    ts: Vec<f64>,
    us: Vec<f64>,
    width: f64,
}

const INTERP_TOL_FRACTION: f64 = 5e-10;
const MAX_NODES: usize = 400_000;

impl Profile {
    pub fn build(mp: &ModelParams) -> Result<Profile> {
        Profile::build_with_variant(mp, ProfileVariant::default())
    }

    pub fn build_with_variant(mp: &ModelParams, variant: ProfileVariant) -> Result<Profile> {
        mp.validate()?;
        let eps = mp.epsilon;
        let shift = variant.shift(eps);
        let integrand = |s: f64| eps / (2.0 * potential_w(s, mp) + shift).sqrt();

        // Subdivide in u so that linear interpolation of the inverse in t
        // meets the tolerance; the inverse has second derivative
        // W'(phi) / eps^2 for either variant.
        let tol_u = INTERP_TOL_FRACTION * mp.phase_gap();
        let mut us: Vec<f64> = Vec::with_capacity(8192);
        us.push(mp.u_minus);
        // seeded uniform grading, then adaptive refinement
        let seeds = 2048usize;
        let mut stack: Vec<(f64, f64)> = (0..seeds)
            .rev()
            .map(|k| {
                let a = mp.u_minus + mp.phase_gap() * k as f64 / seeds as f64;
                let b = mp.u_minus + mp.phase_gap() * (k + 1) as f64 / seeds as f64;
                (a, b)
            })
            .collect();
        while let Some((a, b)) = stack.pop() {
            let mid = 0.5 * (a + b);
            let wp = crate::model::potential_w_prime(a, mp)
                .abs()
                .max(crate::model::potential_w_prime(b, mp).abs())
                .max(crate::model::potential_w_prime(mid, mp).abs())
                * 1.5;
            // Delta t across the interval, bounded via the largest integrand value
            let dt_bound = (b - a)
                * integrand(a).max(integrand(b)).max(integrand(mid));
            let err = dt_bound * dt_bound / 8.0 * wp / (eps * eps);
            if err > tol_u && b - a > 1e-12 && us.len() + stack.len() < MAX_NODES {
                stack.push((mid, b));
                stack.push((a, mid));
            } else {
                us.push(b);
            }
        }

        let mut ts = Vec::with_capacity(us.len());
        ts.push(0.0);
        let mut acc = 0.0;
        for w in us.windows(2) {
            let inc = quad::integrate(integrand, w[0], w[1], 1e-15, 1e-13).value;
            if !(inc > 0.0) {
                return Err(Error::Params(format!(
                    "profile map not strictly increasing near u = {}",
                    w[0]
                )));
            }
            acc += inc;
            ts.push(acc);
        }
        let width = acc;
        // pin the exact endpoints
        *us.first_mut().unwrap() = mp.u_minus;
        *us.last_mut().unwrap() = mp.u_plus;

        Ok(Profile {
            eps,
            variant,
            ts,
            us,
            width,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.eps
    }

    pub fn variant(&self) -> ProfileVariant {
        self.variant
    }

    /// Transition width `Phi(u_plus)`; always below
    /// `sqrt(eps) * (u_plus - u_minus)`.
    pub fn width(&self) -> f64 {
        self.width
    }

    /// Raw table nodes `(t_k, phi(t_k))`.
    pub fn nodes(&self) -> (&[f64], &[f64]) {
        (&self.ts, &self.us)
    }

    /// `phi(t)`: `u_minus` for `t <= 0`, `u_plus` for `t >= width`, monotone
    /// interpolation in between.
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.us[0];
        }
        if t >= self.width {
            return *self.us.last().unwrap();
        }
        let k = self.ts.partition_point(|&v| v <= t) - 1;
        let frac = (t - self.ts[k]) / (self.ts[k + 1] - self.ts[k]);
        self.us[k] + frac * (self.us[k + 1] - self.us[k])
    }
}

/// Recovery field `u = phi(d_A)` for a region on a grid.
///
/// Requires the region boundary to clear the domain boundary by at least the
/// transition width, so the band never touches the domain edge.
pub fn build_recovery_field(
    region: &Region,
    grid: &Grid,
    mp: &ModelParams,
) -> Result<Field> {
    build_recovery_field_with_profile(region, grid, &Profile::build(mp)?)
}

pub fn build_recovery_field_with_profile(
    region: &Region,
    grid: &Grid,
    profile: &Profile,
) -> Result<Field> {
    region.validate(grid)?;
    let clearance = region.clearance(grid);
    if clearance < profile.width() {
        return Err(Error::Config(format!(
            "region clearance {clearance} is below the transition width {}",
            profile.width()
        )));
    }
    let d = region.signed_distance(grid);
    let values = d.values().iter().map(|&t| profile.eval(t)).collect();
    Field::new(*grid, values)
}
