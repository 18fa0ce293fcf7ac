//! Epsilon-sweep harness: builds recovery fields on a width-coupled grid
//! policy, evaluates the weighted energy and its diagnostics per sweep
//! point, extrapolates the sharp-interface limit with a power-law fit, and
//! compares it against `sigma(p) * Per(A)`.

use std::io::Write;

use rayon::prelude::*;

use crate::coeff::CoeffForm;
use crate::energy::{
    diag_bv_lower_bound, diag_transform_w_grad_l1, diag_w_over_g_integral, energy_dgch,
    EnergyBreakdown,
};
use crate::fieldio::fmt_g17;
use crate::grid::{l1_distance, Bc, Dim, Field, Grid};
use crate::model::{surface_tension_sigma, ModelParams};
use crate::profile::{build_recovery_field_with_profile, Profile, ProfileVariant};
use crate::region::Region;
use crate::runtime;
use crate::{Error, Result};

/// Domain description; the cell count per axis is derived from the sweep's
/// resolution policy.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub dim: Dim,
    pub length: [f64; 2],
    pub bc: Bc,
}

impl GridSpec {
    pub fn build(&self, n: usize) -> Result<Grid> {
        match self.dim {
            Dim::One => Grid::new_1d(n, self.length[0], self.bc),
            Dim::Two => Grid::new_2d([n, n], self.length, self.bc),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub region: Region,
    pub form: &'static dyn CoeffForm,
    pub params: ModelParams,
    pub eps_list: Vec<f64>,
    pub grid: GridSpec,
    /// Cells per transition width; the grid refines so `h <= width / this`.
    pub cells_per_width: usize,
    /// Resolution of the steepest profile slope: the largest per-cell jump
    /// of `u` stays below `phase_gap / jump_resolution`.
    pub jump_resolution: usize,
    /// For forms with `g` bounded below, limits the spurious energy of the
    /// clamp-kink cells: `h <= g_min * phase_gap / kink_resolution`.
    pub kink_resolution: usize,
    /// Hard cap on cells per axis.
    pub n_max: usize,
    pub profile_variant: ProfileVariant,
    /// Cap K of the transform used by the gradient-L1 diagnostic.
    pub diag_cap: f64,
    /// Edge snap distance in multiples of the potential-crossover scale
    /// `sqrt(eps/gamma) / phase_gap` (where `W` falls to `eps`). Values
    /// closer to a phase snap onto it exactly.
    pub snap_rel: f64,
}

impl SweepConfig {
    pub fn new(
        region: Region,
        form: &'static dyn CoeffForm,
        params: ModelParams,
        eps_list: Vec<f64>,
        grid: GridSpec,
    ) -> SweepConfig {
        SweepConfig {
            region,
            form,
            params,
            eps_list,
            grid,
            cells_per_width: 8,
            jump_resolution: 16,
            kink_resolution: 20,
            n_max: match grid.dim {
                Dim::One => 262_144,
                Dim::Two => 1024,
            },
            profile_variant: ProfileVariant::default(),
            diag_cap: 10.0,
            snap_rel: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub epsilon: f64,
    pub n: usize,
    pub h: f64,
    pub width: f64,
    pub energy: EnergyBreakdown,
    pub w_over_g_integral: f64,
    pub l1_gap: f64,
    pub bv_lhs: f64,
    pub bv_rhs: f64,
    pub w_grad_l1: f64,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub points: Vec<SweepPoint>,
    pub e0: f64,
    pub fit_coeff: f64,
    pub fit_rate: f64,
    pub sigma: f64,
    pub perimeter: f64,
    pub target: f64,
    pub rel_gap: f64,
    pub any_singular: bool,
}

impl SweepReport {
    /// Number of increases in the relative gap |E - target|/target along the
    /// sweep; the approach tolerates at most one (resolution changes).
    pub fn gap_monotonicity_violations(&self) -> usize {
        let gaps: Vec<f64> = self
            .points
            .iter()
            .map(|p| (p.energy.total - self.target).abs() / self.target)
            .collect();
        gaps.windows(2).filter(|w| w[1] >= w[0]).count()
    }

    /// CSV rows per sweep point plus a footer block with the fit results.
    pub fn write_csv<W: Write>(&self, header_comment: &str, mut w: W) -> Result<()> {
        if !header_comment.is_empty() {
            writeln!(w, "# {header_comment}")?;
        }
        writeln!(
            w,
            "epsilon,h,energy_total,gradient_part,potential_part,W_over_g_integral,L1_gap"
        )?;
        for p in &self.points {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                fmt_g17(p.epsilon),
                fmt_g17(p.h),
                fmt_g17(p.energy.total),
                fmt_g17(p.energy.gradient_part),
                fmt_g17(p.energy.potential_part),
                fmt_g17(p.w_over_g_integral),
                fmt_g17(p.l1_gap)
            )?;
        }
        writeln!(w, "# E0_fit = {}", fmt_g17(self.e0))?;
        writeln!(w, "# r_fit = {}", fmt_g17(self.fit_rate))?;
        writeln!(w, "# target_sigma_Per = {}", fmt_g17(self.target))?;
        writeln!(w, "# rel_gap = {}", fmt_g17(self.rel_gap))?;
        Ok(())
    }
}

fn resolve_n(cfg: &SweepConfig, mp: &ModelParams, profile: &Profile) -> Result<usize> {
    let width = profile.width();
    let gap = mp.phase_gap();
    let (ts, us) = profile.nodes();
    let max_slope = ts
        .windows(2)
        .zip(us.windows(2))
        .map(|(t, u)| (u[1] - u[0]) / (t[1] - t[0]))
        .fold(0.0_f64, f64::max);

    let mut h_target = width / cfg.cells_per_width as f64;
    // resolve the steepest part of the profile, not just its overall width
    h_target = h_target.min(gap / (cfg.jump_resolution as f64 * max_slope));
    // forms with g bounded below still see the clamp-kink stencil artifact;
    // keep its O(h / g_min) energy below the budget
    let g_min = cfg.form.g_lower_bound(mp);
    if g_min > 0.0 {
        h_target = h_target.min(g_min * gap / cfg.kink_resolution as f64);
    }

    let len = match cfg.grid.dim {
        Dim::One => cfg.grid.length[0],
        Dim::Two => cfg.grid.length[0].max(cfg.grid.length[1]),
    };
    let mut n = (len / h_target).ceil() as usize;
    n = n.max(4);
    // multiples of four keep the acceptance interfaces on cell faces
    n = (n + 3) / 4 * 4;
    if n > cfg.n_max {
        return Err(Error::Config(format!(
            "resolution policy needs n = {n} > n_max = {}; raise n_max or drop the smallest epsilon",
            cfg.n_max
        )));
    }
    Ok(n)
}

/// Snaps values near a pure phase onto that phase.
///
/// The snap distance is the larger of half a cell's clamp increment (cell
/// centers otherwise sample the clamp kink at arbitrary, heavy-tailed
/// offsets) and `snap_rel` multiples of the potential-crossover scale where
/// `W` falls below `eps` (where the shifted profile flattens into the
/// clamp). Both cuts are deterministic, so the sweep energies vary smoothly
/// with epsilon.
fn snap_edges(
    u: &mut Field,
    profile: &Profile,
    h: f64,
    snap_rel: f64,
    degenerate: bool,
    mp: &ModelParams,
) {
    let (ts, us) = profile.nodes();
    let k = ts.len() - 1;
    let slope_lo = (us[1] - us[0]) / (ts[1] - ts[0]);
    let slope_hi = (us[k] - us[k - 1]) / (ts[k] - ts[k - 1]);
    // The crossover cut leaves a visible value jump at the clamp. Degenerate
    // forms skip the exact-phase cell carrying that jump, but forms with g
    // bounded below count it, so they only get the half-cell snap.
    let crossover = if degenerate && mp.gamma > 0.0 {
        snap_rel * (mp.epsilon / mp.gamma).sqrt() / mp.phase_gap()
    } else {
        0.0
    };
    let theta_lo = mp.u_minus + (slope_lo * h * 0.5).max(crossover);
    let theta_hi = mp.u_plus - (slope_hi * h * 0.5).max(crossover);
    for v in u.values_mut() {
        if *v < theta_lo {
            *v = mp.u_minus;
        } else if *v > theta_hi {
            *v = mp.u_plus;
        }
    }
}

fn prepare_field(cfg: &SweepConfig, eps: f64) -> Result<(Field, ModelParams, f64)> {
    let mp = cfg.params.with_epsilon(eps);
    let profile = Profile::build_with_variant(&mp, cfg.profile_variant)?;
    let n = resolve_n(cfg, &mp, &profile)?;
    let grid = cfg.grid.build(n)?;
    let mut u = build_recovery_field_with_profile(&cfg.region, &grid, &profile)?;
    snap_edges(
        &mut u,
        &profile,
        grid.h()[0],
        cfg.snap_rel,
        cfg.form.vanishes_at_pure_phases(&mp),
        &mp,
    );
    Ok((u, mp, profile.width()))
}

/// Builds the prepared (edge-snapped) recovery field a sweep point
/// evaluates, along with the parameters at that epsilon.
pub fn sweep_field(cfg: &SweepConfig, eps: f64) -> Result<(Field, ModelParams)> {
    let (u, mp, _) = prepare_field(cfg, eps)?;
    Ok((u, mp))
}

fn sweep_point(cfg: &SweepConfig, eps: f64) -> Result<SweepPoint> {
    let (u, mp, width) = prepare_field(cfg, eps)?;
    let grid = *u.grid();
    let n = grid.n()[0];

    let energy = energy_dgch(&u, cfg.form, &mp);
    let sharp = cfg.region.sharp_field(&grid, &mp);
    let (bv_lhs, bv_rhs) = diag_bv_lower_bound(&u, cfg.form, &mp);
    Ok(SweepPoint {
        epsilon: eps,
        n,
        h: grid.h()[0],
        width,
        energy,
        w_over_g_integral: diag_w_over_g_integral(&u, cfg.form, &mp),
        l1_gap: l1_distance(&u, &sharp),
        bv_lhs,
        bv_rhs,
        w_grad_l1: diag_transform_w_grad_l1(&u, cfg.diag_cap, &mp),
    })
}

/// Runs the sweep, fits `E(eps) = E0 + c * eps^r` on the last three finite
/// points, and reports the extrapolated limit against the target.
pub fn gamma_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.params.validate()?;
    cfg.form.validate(&cfg.params)?;
    if cfg.eps_list.len() < 3 {
        return Err(Error::Config("eps_list needs at least 3 entries".into()));
    }
    if !cfg.eps_list.windows(2).all(|w| w[1] < w[0]) {
        return Err(Error::Config("eps_list must be strictly decreasing".into()));
    }
    if cfg.cells_per_width == 0 || cfg.jump_resolution == 0 || cfg.kink_resolution == 0 {
        return Err(Error::Config("resolution knobs must be positive".into()));
    }
    // validate the region against a coarse instance of the domain
    let probe = cfg.grid.build(4)?;
    cfg.region.validate(&probe)?;

    // clearance rule: five times the widest transition band must stay clear
    // of the domain boundary
    let widest = Profile::build_with_variant(
        &cfg.params.with_epsilon(cfg.eps_list[0]),
        cfg.profile_variant,
    )?
    .width();
    let clearance = cfg.region.clearance(&probe);
    if clearance < 5.0 * widest {
        return Err(Error::Config(format!(
            "region clearance {clearance} is below 5x the widest transition width {widest}"
        )));
    }

    let results: Vec<Result<SweepPoint>> = runtime::pool().install(|| {
        cfg.eps_list
            .par_iter()
            .map(|&eps| sweep_point(cfg, eps))
            .collect()
    });
    let mut points = Vec::with_capacity(results.len());
    for r in results {
        points.push(r?);
    }

    let any_singular = points.iter().any(|p| p.energy.singular);
    let finite: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.energy.total.is_finite())
        .map(|p| (p.epsilon, p.energy.total))
        .collect();
    if finite.len() < 3 {
        return Err(Error::Singular(format!(
            "only {} finite sweep points; need 3 for extrapolation",
            finite.len()
        )));
    }
    let tail = &finite[finite.len() - 3..];
    let (e0, fit_coeff, fit_rate) = fit_power_law(tail);

    let p_eff = if cfg.form.name() == "regularized" {
        1.0
    } else {
        cfg.params.p
    };
    let sigma = surface_tension_sigma(p_eff, &cfg.params)?;
    let perimeter = cfg.region.perimeter(&probe);
    let target = sigma * perimeter;
    let rel_gap = (e0 - target).abs() / target;

    Ok(SweepReport {
        points,
        e0,
        fit_coeff,
        fit_rate,
        sigma,
        perimeter,
        target,
        rel_gap,
        any_singular,
    })
}

/// Least-squares fit of `E = e0 + c * eps^r` over `pts`; `r` by scan plus
/// golden-section refinement, `(e0, c)` by normal equations per candidate.
pub fn fit_power_law(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    assert!(pts.len() >= 3);

    let solve = |r: f64| -> (f64, f64, f64) {
        let n = pts.len() as f64;
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for &(eps, e) in pts {
            let x = eps.powf(r);
            sx += x;
            sy += e;
            sxx += x * x;
            sxy += x * e;
        }
        let det = n * sxx - sx * sx;
        if det.abs() < 1e-300 {
            return (sy / n, 0.0, f64::INFINITY);
        }
        let c = (n * sxy - sx * sy) / det;
        let e0 = (sy - c * sx) / n;
        let mut resid = 0.0;
        for &(eps, e) in pts {
            let d = e0 + c * eps.powf(r) - e;
            resid += d * d;
        }
        (e0, c, resid)
    };

    let mut best_r = 1.0;
    let mut best = solve(1.0);
    let steps = 240;
    for k in 0..=steps {
        let r = 0.05 * (3.0_f64 / 0.05).powf(k as f64 / steps as f64);
        let cand = solve(r);
        if cand.2 < best.2 {
            best = cand;
            best_r = r;
        }
    }
    // golden-section refinement around the best grid point
    let (mut lo, mut hi) = (best_r / 1.2, best_r * 1.2);
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if solve(m1).2 < solve(m2).2 {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let r = 0.5 * (lo + hi);
    let refined = solve(r);
    if refined.2 <= best.2 {
        (refined.0, refined.1, r)
    } else {
        (best.0, best.1, best_r)
    }
}
