//! Discrete energies and the lower-bound diagnostics.
//!
//! Both energies use collocated midpoint quadrature: the squared gradient is
//! the centered-difference value at the cell and the coefficient `g` is
//! evaluated at the same cell's `u`. This keeps the pointwise AM-GM
//! inequality between the energy integrand and the weighted gradient exact
//! cell by cell.
//!
//! Cells whose value sits exactly at a pure phase contribute nothing when
//! the coefficient form degenerates there: the fused ratios vanish and the
//! discrete gradient across a clamped kink is a stencil artifact (the
//! continuum gradient vanishes a.e. on level sets). The +inf sentinel is
//! reserved for cells that are genuinely singular: `g` below the floor with
//! a non-negligible gradient, at a value not exactly equal to a phase.

use crate::coeff::CoeffForm;
use crate::fieldio::fmt_g17;
use crate::grid::{gradient_sq, neumaier_sum, Field};
use crate::model::{potential_w, ModelParams};

/// Energy split into its gradient and potential integrals.
///
/// `total = gradient_part + potential_part` unless `singular`, in which case
/// `total` is the +inf sentinel and the parts hold the finite remainder.
#[derive(Debug, Clone, Copy)]
pub struct EnergyBreakdown {
    pub gradient_part: f64,
    pub potential_part: f64,
    pub total: f64,
    pub singular: bool,
}

impl EnergyBreakdown {
    /// CSV row: epsilon, p, alpha, form, gradient_part, potential_part,
    /// total, singular.
    pub fn csv_row(&self, mp: &ModelParams, form: &dyn CoeffForm) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            fmt_g17(mp.epsilon),
            fmt_g17(mp.p),
            fmt_g17(mp.alpha),
            form.name(),
            fmt_g17(self.gradient_part),
            fmt_g17(self.potential_part),
            fmt_g17(self.total),
            if self.singular { 1 } else { 0 }
        )
    }
}

fn sentinel_floors(form: &dyn CoeffForm, mp: &ModelParams, h_min: f64) -> (f64, f64) {
    let gap = mp.phase_gap();
    let p_eff = if form.name() == "singular-1" { 1.0 } else { mp.p };
    let g_floor = 1e-12 * gap.powf(2.0 * p_eff);
    let grad_floor = 1e-12 * (gap / h_min).powi(2);
    (g_floor, grad_floor)
}

#[inline]
fn at_pure_phase(u: f64, mp: &ModelParams) -> bool {
    u == mp.u_minus || u == mp.u_plus
}

/// Plain Cahn-Hilliard energy `Int eps/2 |grad u|^2 + W(u)/eps`.
pub fn energy_ch(u: &Field, mp: &ModelParams) -> f64 {
    energy_ch_breakdown(u, mp).total
}

pub fn energy_ch_breakdown(u: &Field, mp: &ModelParams) -> EnergyBreakdown {
    let gs = gradient_sq(u);
    let vol = u.grid().cell_volume();
    let eps = mp.epsilon;
    let gradient_part = neumaier_sum(gs.values().iter().map(|&g| 0.5 * eps * g)) * vol;
    let potential_part =
        neumaier_sum(u.values().iter().map(|&v| potential_w(v, mp) / eps)) * vol;
    EnergyBreakdown {
        gradient_part,
        potential_part,
        total: gradient_part + potential_part,
        singular: false,
    }
}

/// Weighted energy `Int (1/g(u)) (eps/2 |grad u|^2 + W(u)/eps)` for the
/// selected coefficient form.
pub fn energy_dgch(u: &Field, form: &dyn CoeffForm, mp: &ModelParams) -> EnergyBreakdown {
    let gs = gradient_sq(u);
    let vol = u.grid().cell_volume();
    let h_min = if u.grid().axes().len() == 2 {
        u.grid().h()[0].min(u.grid().h()[1])
    } else {
        u.grid().h()[0]
    };
    let (g_floor, grad_floor) = sentinel_floors(form, mp, h_min);
    let degenerate = form.vanishes_at_pure_phases(mp);
    let eps = mp.epsilon;

    let mut singular = false;
    let grad_terms: Vec<f64> = u
        .values()
        .iter()
        .zip(gs.values())
        .map(|(&v, &g2)| {
            if degenerate && at_pure_phase(v, mp) {
                return 0.0;
            }
            let g = form.g(v, mp);
            let term = 0.5 * eps * g2 / g;
            if !term.is_finite() || (g < g_floor && g2 > grad_floor) {
                singular = true;
                return 0.0;
            }
            term
        })
        .collect();
    let gradient_part = neumaier_sum(grad_terms) * vol;
    let potential_part = neumaier_sum(u.values().iter().map(|&v| {
        if degenerate && at_pure_phase(v, mp) {
            0.0
        } else {
            form.w_over_g(v, mp) / eps
        }
    })) * vol;

    EnergyBreakdown {
        gradient_part,
        potential_part,
        total: if singular {
            f64::INFINITY
        } else {
            gradient_part + potential_part
        },
        singular,
    }
}

/// `Int W(u)/g(u)` via the fused ratio; along recovery sweeps this decays
/// like O(epsilon).
pub fn diag_w_over_g_integral(u: &Field, form: &dyn CoeffForm, mp: &ModelParams) -> f64 {
    neumaier_sum(u.values().iter().map(|&v| form.w_over_g(v, mp))) * u.grid().cell_volume()
}

/// AM-GM lower bound pair: `lhs = Int sqrt(2 W(u))/g(u) |grad u|` against
/// `rhs = energy_dgch(u).total`. The bound holds cell by cell, so
/// `lhs <= rhs` up to summation roundoff.
pub fn diag_bv_lower_bound(
    u: &Field,
    form: &dyn CoeffForm,
    mp: &ModelParams,
) -> (f64, f64) {
    let gs = gradient_sq(u);
    let degenerate = form.vanishes_at_pure_phases(mp);
    let lhs = neumaier_sum(u.values().iter().zip(gs.values()).map(|(&v, &g2)| {
        if degenerate && at_pure_phase(v, mp) {
            0.0
        } else {
            form.bv_weight(v, mp) * g2.sqrt()
        }
    })) * u.grid().cell_volume();
    let rhs = energy_dgch(u, form, mp).total;
    (lhs, rhs)
}

/// Builds an interpolation table for the capped transform h_K on `[lo, hi]`
/// by adaptive subdivision; returns (nodes, values).
fn transform_h_table(lo: f64, hi: f64, cap: f64, mp: &ModelParams) -> (Vec<f64>, Vec<f64>) {
    use crate::model::SQRT_2;
    let expo = 1.0 - mp.p;
    let rho = |s: f64| SQRT_2 * crate::model::degeneracy_q(s, mp).abs().powf(expo).min(cap);

    // Seed with the kink candidates: the phases and the midpoint.
    let mut seeds = vec![lo, mp.u_minus, mp.midpoint(), mp.u_plus, hi];
    seeds.retain(|&s| s >= lo && s <= hi);
    seeds.sort_by(f64::total_cmp);
    seeds.dedup();

    let tol = 1e-10 * mp.phase_gap().max(hi - lo);
    let mut xs = vec![seeds[0]];
    let mut stack: Vec<(f64, f64)> = seeds.windows(2).rev().map(|w| (w[0], w[1])).collect();
    while let Some((a, b)) = stack.pop() {
        // linear-interpolation error of the antiderivative is bounded by
        // |delta rho| * |b - a| / 8 on monotone pieces
        let err = (rho(b) - rho(a)).abs() * (b - a) / 8.0;
        if err > tol && b - a > 1e-11 && xs.len() + stack.len() < 200_000 {
            let m = 0.5 * (a + b);
            stack.push((m, b));
            stack.push((a, m));
        } else {
            xs.push(b);
        }
    }
    let mut ys = Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    ys.push(0.0);
    for w in xs.windows(2) {
        acc += crate::quad::integrate(rho, w[0], w[1], 1e-13, 1e-12).value;
        ys.push(acc);
    }
    // shift so the antiderivative is zero at u_minus
    let base = interp(&xs, &ys, mp.u_minus);
    for y in ys.iter_mut() {
        *y -= base;
    }
    (xs, ys)
}

fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    if x >= *xs.last().unwrap() {
        return *ys.last().unwrap();
    }
    let k = xs.partition_point(|&v| v <= x) - 1;
    let t = (x - xs[k]) / (xs[k + 1] - xs[k]);
    ys[k] + t * (ys[k + 1] - ys[k])
}

/// Cellwise capped transform `w = h_K(u)`.
///
/// Values come from an adaptively refined interpolation table so large
/// fields do not re-run the quadrature per cell.
pub fn diag_transform_w(u: &Field, cap: f64, mp: &ModelParams) -> Field {
    assert!(cap > 0.0, "cap K must be positive");
    let lo = u.min().min(mp.u_minus);
    let hi = u.max().max(mp.u_plus);
    let (xs, ys) = transform_h_table(lo, hi, cap, mp);
    let values = u.values().iter().map(|&v| interp(&xs, &ys, v)).collect();
    Field::new(*u.grid(), values).expect("transform of a finite field is finite")
}

/// `Int |grad w|` for `w = h_K(u)`, skipping cells where `u` sits exactly at
/// a pure phase (their discrete gradient is the clamped-kink artifact).
/// Bounded by `diag_bv_lower_bound(u).lhs` up to O(h) quadrature slack.
pub fn diag_transform_w_grad_l1(u: &Field, cap: f64, mp: &ModelParams) -> f64 {
    let w = diag_transform_w(u, cap, mp);
    let gs = gradient_sq(&w);
    neumaier_sum(
        u.values()
            .iter()
            .zip(gs.values())
            .map(|(&v, &g2)| if at_pure_phase(v, mp) { 0.0 } else { g2.sqrt() }),
    ) * u.grid().cell_volume()
}
