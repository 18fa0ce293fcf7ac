//! Explicit time integration of the regularized conservative gradient flow
//!
//!   du/dt = (1/eps) div(M_alpha(u) grad mu),
//!   mu    = -eps div((1/g_alpha) grad u) + W'(u)/(eps g_alpha)
//!           - (g_alpha'/g_alpha^2) (eps/2 |grad u|^2 + W(u)/eps).
//!
//! `mu` is assembled as the exact gradient of the discrete collocated
//! energy: the transport term is the centered divergence of the
//! cell-collocated flux `grad u / g` (the adjoint of the energy's centered
//! gradient quadrature), and the `g'/g^2` term multiplies the same
//! cell-centered squared gradient the energy uses. Steps are accepted only
//! if the energy does not increase; rejected steps halve dt.
//!
//! State updates use per-cell compensated accumulation. Face fluxes cancel
//! pairwise in exact arithmetic, so the compensated mass stays at its
//! initial value to roundoff over arbitrarily many steps.

use crate::coeff::{CoeffForm, REGULARIZED};
use crate::energy::energy_dgch;
use crate::grid::{
    divergence_of_cell_flux, divergence_of_flux, gradient_centered, gradient_sq, integrate,
    neumaier_sum, Field,
};
use crate::model::{mobility, potential_w, potential_w_prime, ModelParams};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct FlowConfig {
    pub params: ModelParams,
    pub dt_init: f64,
    pub t_end: f64,
    pub dt_min: f64,
    pub save_every: usize,
    /// Fraction of `dt_init` used for the very first attempted step.
    pub safety: f64,
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        REGULARIZED.validate(&self.params)?;
        if !(self.dt_init > 0.0) {
            return Err(Error::Params("dt_init must be > 0".into()));
        }
        if !(self.dt_min > 0.0 && self.dt_min < self.dt_init) {
            return Err(Error::Params("need 0 < dt_min < dt_init".into()));
        }
        if !(self.t_end >= 0.0) {
            return Err(Error::Params("t_end must be >= 0".into()));
        }
        if self.save_every == 0 {
            return Err(Error::Params("save_every must be >= 1".into()));
        }
        if !(self.safety > 0.0 && self.safety < 1.0) {
            return Err(Error::Params("safety must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Snapshot of the flow at an accepted step.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub t: f64,
    pub dt: f64,
    pub u: Field,
    pub energy: f64,
    pub mass: f64,
    pub overshoot: f64,
}

/// Step failure report: the message plus the trajectory up to and including
/// the last accepted state.
#[derive(Debug)]
pub struct StepFailure {
    pub message: String,
    pub trajectory: Vec<FlowState>,
}

/// Per-run stepper counters.
#[derive(Debug, Clone, Copy, Default)]
pub struct FlowStats {
    pub accepted: usize,
    pub rejected: usize,
    /// Largest relative energy change over accepted steps; at most 1e-12 by
    /// the acceptance rule.
    pub max_rel_uptick: f64,
}

#[derive(Debug)]
pub enum FlowError {
    Config(Error),
    Step(StepFailure),
}

impl From<Error> for FlowError {
    fn from(e: Error) -> Self {
        FlowError::Config(e)
    }
}

/// Chemical potential of the regularized energy; the exact discrete
/// variational derivative of `energy_dgch(u, regularized)` divided by the
/// cell volume.
pub fn chemical_potential(u: &Field, mp: &ModelParams) -> Field {
    let form: &dyn CoeffForm = &REGULARIZED;
    let eps = mp.epsilon;
    let grid = *u.grid();

    let gs = gradient_sq(u);
    let g: Vec<f64> = u.values().iter().map(|&v| form.g(v, mp)).collect();

    // cell-collocated flux components grad_a(u) / g
    let mut fluxes = Vec::with_capacity(grid.axes().len());
    for &a in grid.axes() {
        let mut d = gradient_centered(u, a);
        for (dv, gv) in d.values_mut().iter_mut().zip(&g) {
            *dv /= gv;
        }
        fluxes.push(d);
    }
    let transport = divergence_of_cell_flux(&fluxes);

    let mut mu = vec![0.0; grid.total_cells()];
    for (i, m) in mu.iter_mut().enumerate() {
        let v = u.values()[i];
        let gpg2 = REGULARIZED
            .g_prime_over_g_sq(v, mp)
            .expect("regularized form is defined everywhere");
        let density = 0.5 * eps * gs.values()[i] + potential_w(v, mp) / eps;
        *m = -gpg2 * density + potential_w_prime(v, mp) / (eps * g[i])
            - eps * transport.values()[i];
    }
    Field::new(grid, mu).expect("chemical potential of a finite field is finite")
}

/// Owns the evolving state; produces [`FlowState`] snapshots.
pub struct Stepper {
    cfg: FlowConfig,
    u: Field,
    comp: Vec<f64>,
    t: f64,
    dt: f64,
    energy: f64,
    accepted: usize,
    rejected: usize,
    max_rel_uptick: f64,
}

impl Stepper {
    pub fn new(u0: Field, cfg: FlowConfig) -> Result<Stepper> {
        cfg.validate()?;
        let energy = energy_dgch(&u0, &REGULARIZED, &cfg.params).total;
        if !energy.is_finite() {
            return Err(Error::Params("initial state has non-finite energy".into()));
        }
        let dt = cfg.safety * cfg.dt_init;
        let comp = vec![0.0; u0.grid().total_cells()];
        Ok(Stepper {
            cfg,
            u: u0,
            comp,
            t: 0.0,
            dt,
            energy,
            accepted: 0,
            rejected: 0,
            max_rel_uptick: 0.0,
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn accepted_steps(&self) -> usize {
        self.accepted
    }

    pub fn rejected_steps(&self) -> usize {
        self.rejected
    }

    pub fn stats(&self) -> FlowStats {
        FlowStats {
            accepted: self.accepted,
            rejected: self.rejected,
            max_rel_uptick: self.max_rel_uptick,
        }
    }

    /// Compensated mass `Int u`; exact to roundoff along the flow.
    fn mass(&self) -> f64 {
        neumaier_sum(
            self.u
                .values()
                .iter()
                .copied()
                .chain(self.comp.iter().copied()),
        ) * self.u.grid().cell_volume()
    }

    pub fn state(&self) -> FlowState {
        let mp = &self.cfg.params;
        let over_hi = self.u.max() - mp.u_plus;
        let over_lo = mp.u_minus - self.u.min();
        FlowState {
            t: self.t,
            dt: self.dt,
            u: self.u.clone(),
            energy: self.energy,
            mass: self.mass(),
            overshoot: over_hi.max(over_lo).max(0.0),
        }
    }

    /// Advances by one accepted step of size at most `dt_cap`, halving on
    /// energy increase. Errors when dt underflows `dt_min`.
    pub fn advance(&mut self, dt_cap: f64) -> std::result::Result<(), String> {
        let mp = self.cfg.params;
        let eps = mp.epsilon;

        // mu and the mobility depend only on the current state; reuse them
        // across dt rejections
        let mu = chemical_potential(&self.u, &mp);
        let mob = Field::new(
            *self.u.grid(),
            self.u
                .values()
                .iter()
                .map(|&v| mobility(v, true, &mp))
                .collect(),
        )
        .expect("mobility of a finite field is finite");
        let div = divergence_of_flux(&mob, &mu);

        let mut dt = self.dt.min(dt_cap);
        loop {
            let mut u_new = self.u.clone();
            let mut comp_new = self.comp.clone();
            let scale = dt / eps;
            let mut finite = true;
            for ((uv, cv), dv) in u_new
                .values_mut()
                .iter_mut()
                .zip(comp_new.iter_mut())
                .zip(div.values())
            {
                let inc = scale * dv;
                // Neumaier accumulation keeps the lost low-order bits in comp
                let t = *uv + inc;
                if uv.abs() >= inc.abs() {
                    *cv += (*uv - t) + inc;
                } else {
                    *cv += (inc - t) + *uv;
                }
                *uv = t;
                if !t.is_finite() {
                    finite = false;
                }
            }

            let e_new = if finite {
                energy_dgch(&u_new, &REGULARIZED, &mp).total
            } else {
                f64::INFINITY
            };
            if finite && e_new <= self.energy + 1e-12 * self.energy.abs() {
                let scale = self.energy.abs().max(f64::MIN_POSITIVE);
                self.max_rel_uptick = self.max_rel_uptick.max((e_new - self.energy) / scale);
                self.u = u_new;
                self.comp = comp_new;
                self.energy = e_new;
                // The final step of a run may land within one rounding of
                // the requested end time; the run loop tolerates that.
                self.t += dt;
                self.accepted += 1;
                self.dt = (dt * 1.2).min(self.cfg.dt_init);
                return Ok(());
            }

            self.rejected += 1;
            dt *= 0.5;
            self.dt = dt;
            if dt < self.cfg.dt_min {
                return Err(format!(
                    "dt underflow at t = {}: dt = {dt} < dt_min = {} (energy {} -> {e_new})",
                    self.t, self.cfg.dt_min, self.energy
                ));
            }
        }
    }
}

/// Runs the flow to `t_end`, saving every `save_every` accepted steps; the
/// trajectory includes the initial and final states.
pub fn run(u0: Field, cfg: &FlowConfig) -> std::result::Result<Vec<FlowState>, FlowError> {
    run_with_stats(u0, cfg).map(|(t, _)| t)
}

pub fn run_with_stats(
    u0: Field,
    cfg: &FlowConfig,
) -> std::result::Result<(Vec<FlowState>, FlowStats), FlowError> {
    let mut stepper = Stepper::new(u0, cfg.clone())?;
    let mut trajectory = vec![stepper.state()];
    let t_end = cfg.t_end;
    while stepper.t < t_end {
        let cap = t_end - stepper.t;
        if let Err(message) = stepper.advance(cap) {
            return Err(FlowError::Step(StepFailure {
                message,
                trajectory,
            }));
        }
        if stepper.accepted % cfg.save_every == 0 && stepper.t < t_end {
            trajectory.push(stepper.state());
        }
    }
    if stepper.accepted > 0 && trajectory.last().map(|s| s.t) != Some(stepper.t) {
        trajectory.push(stepper.state());
    }
    Ok((trajectory, stepper.stats()))
}

/// Relative drift of the trajectory's mass column, scaled by the L1 norm of
/// the initial state (the mass itself may be near zero).
pub fn mass_drift(trajectory: &[FlowState]) -> f64 {
    let m0 = trajectory[0].mass;
    let scale = integrate(&Field::new(
        *trajectory[0].u.grid(),
        trajectory[0].u.values().iter().map(|v| v.abs()).collect(),
    )
    .expect("finite"))
    .max(f64::MIN_POSITIVE);
    trajectory
        .iter()
        .map(|s| (s.mass - m0).abs())
        .fold(0.0_f64, f64::max)
        / scale
}
