//! Geometric phase regions with exact perimeters and signed distances.
//!
//! The sign convention is positive inside the region. Signed distances are
//! analytic per shape; unions of positively separated shapes combine by
//! taking the maximum, which is exact in that case.

use crate::grid::{Bc, Dim, Field, Grid};
use crate::model::ModelParams;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    /// `{ x : x[axis] >= offset }`; Neumann domains only.
    HalfSpace { axis: usize, offset: f64 },
    /// 1D interval `[a, b]`.
    Interval { a: f64, b: f64 },
    /// 2D disk.
    Disk { center: [f64; 2], radius: f64 },
    /// 2D axis-aligned rectangle.
    Rectangle { min: [f64; 2], max: [f64; 2] },
    /// Disjoint union of primitive shapes.
    Union(Vec<Region>),
}

impl Region {
    /// Signed distance to the region boundary, positive inside.
    pub fn signed_distance_at(&self, x: [f64; 2]) -> f64 {
        match self {
            Region::HalfSpace { axis, offset } => x[*axis] - offset,
            Region::Interval { a, b } => (x[0] - a).min(b - x[0]),
            Region::Disk { center, radius } => {
                let dx = x[0] - center[0];
                let dy = x[1] - center[1];
                radius - (dx * dx + dy * dy).sqrt()
            }
            Region::Rectangle { min, max } => {
                let ox = (min[0] - x[0]).max(x[0] - max[0]);
                let oy = (min[1] - x[1]).max(x[1] - max[1]);
                if ox <= 0.0 && oy <= 0.0 {
                    -ox.max(oy)
                } else {
                    -(ox.max(0.0).hypot(oy.max(0.0)))
                }
            }
            Region::Union(members) => members
                .iter()
                .map(|m| m.signed_distance_at(x))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Cellwise signed distance field on `grid`.
    pub fn signed_distance(&self, grid: &Grid) -> Field {
        Field::from_fn(*grid, |x| self.signed_distance_at(x))
            .expect("signed distances of valid regions are finite")
    }

    /// Sharp two-phase field `u_minus + (u_plus - u_minus) * chi_A`.
    pub fn sharp_field(&self, grid: &Grid, mp: &ModelParams) -> Field {
        Field::from_fn(*grid, |x| {
            if self.signed_distance_at(x) > 0.0 {
                mp.u_plus
            } else {
                mp.u_minus
            }
        })
        .expect("finite")
    }

    /// Exact perimeter of the region boundary measured inside the domain.
    pub fn perimeter(&self, grid: &Grid) -> f64 {
        match self {
            Region::HalfSpace { axis, .. } => match grid.dim() {
                Dim::One => 1.0,
                Dim::Two => grid.length()[1 - axis],
            },
            Region::Interval { .. } => 2.0,
            Region::Disk { radius, .. } => 2.0 * std::f64::consts::PI * radius,
            Region::Rectangle { min, max } => 2.0 * ((max[0] - min[0]) + (max[1] - min[1])),
            Region::Union(members) => members.iter().map(|m| m.perimeter(grid)).sum(),
        }
    }

    /// Distance from the region boundary to the domain boundary (the
    /// fundamental-cell boundary under periodic conditions). Half-spaces
    /// measure along their axis only.
    pub fn clearance(&self, grid: &Grid) -> f64 {
        let len = grid.length();
        match self {
            Region::HalfSpace { axis, offset } => offset.min(len[*axis] - offset),
            Region::Interval { a, b } => a.min(len[0] - b),
            Region::Disk { center, radius } => {
                let cx = (center[0] - radius).min(len[0] - center[0] - radius);
                let cy = (center[1] - radius).min(len[1] - center[1] - radius);
                cx.min(cy)
            }
            Region::Rectangle { min, max } => {
                let cx = min[0].min(len[0] - max[0]);
                let cy = min[1].min(len[1] - max[1]);
                cx.min(cy)
            }
            Region::Union(members) => members
                .iter()
                .map(|m| m.clearance(grid))
                .fold(f64::INFINITY, f64::min),
        }
    }

    fn dimensionality_ok(&self, dim: Dim) -> bool {
        match self {
            Region::HalfSpace { axis, .. } => match dim {
                Dim::One => *axis == 0,
                Dim::Two => *axis < 2,
            },
            Region::Interval { .. } => dim == Dim::One,
            Region::Disk { .. } | Region::Rectangle { .. } => dim == Dim::Two,
            Region::Union(members) => members.iter().all(|m| m.dimensionality_ok(dim)),
        }
    }

    /// Structural checks against a grid: shape/dimension agreement, strict
    /// containment, half-space boundary-condition restriction, and positive
    /// pairwise separation of union members.
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if !self.dimensionality_ok(grid.dim()) {
            return Err(Error::Config(format!(
                "region {self:?} does not match grid dimensionality {:?}",
                grid.dim()
            )));
        }
        self.validate_shape(grid)?;
        if let Region::Union(members) = self {
            for m in members {
                if matches!(m, Region::Union(_) | Region::HalfSpace { .. }) {
                    return Err(Error::Config(
                        "union members must be primitive bounded shapes".into(),
                    ));
                }
                m.validate_shape(grid)?;
            }
            for i in 0..members.len() {
                for j in i + 1..members.len() {
                    let sep = pair_separation(&members[i], &members[j]);
                    if !(sep > 0.0) {
                        return Err(Error::Config(format!(
                            "union members {i} and {j} are not positively separated (sep = {sep})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn validate_shape(&self, grid: &Grid) -> Result<()> {
        let len = grid.length();
        let inside = |v: f64, l: f64| v > 0.0 && v < l;
        match self {
            Region::HalfSpace { axis, offset } => {
                if grid.bc() == Bc::Periodic {
                    return Err(Error::Config(
                        "half-space regions wrap around under periodic conditions; use a bounded shape".into(),
                    ));
                }
                if !inside(*offset, len[*axis]) {
                    return Err(Error::Config(format!(
                        "half-space offset {offset} outside the domain"
                    )));
                }
            }
            Region::Interval { a, b } => {
                if !(a < b) {
                    return Err(Error::Config(format!("interval needs a < b, got [{a}, {b}]")));
                }
                if !inside(*a, len[0]) || !inside(*b, len[0]) {
                    return Err(Error::Config(format!(
                        "interval [{a}, {b}] not strictly inside [0, {}]",
                        len[0]
                    )));
                }
            }
            Region::Disk { center, radius } => {
                if !(*radius > 0.0) {
                    return Err(Error::Config("disk radius must be positive".into()));
                }
                for a in 0..2 {
                    if !inside(center[a] - radius, len[a]) || !inside(center[a] + radius, len[a]) {
                        return Err(Error::Config("disk not strictly inside the domain".into()));
                    }
                }
            }
            Region::Rectangle { min, max } => {
                for a in 0..2 {
                    if !(min[a] < max[a]) {
                        return Err(Error::Config("rectangle needs min < max per axis".into()));
                    }
                    if !inside(min[a], len[a]) || !inside(max[a], len[a]) {
                        return Err(Error::Config(
                            "rectangle not strictly inside the domain".into(),
                        ));
                    }
                }
            }
            Region::Union(members) => {
                if members.len() < 2 {
                    return Err(Error::Config("union needs at least two members".into()));
                }
            }
        }
        Ok(())
    }
}

/// Exact separation distance between two primitive shapes (boundary to
/// boundary, negative when overlapping).
fn pair_separation(a: &Region, b: &Region) -> f64 {
    use Region::*;
    match (a, b) {
        (Interval { a: a1, b: b1 }, Interval { a: a2, b: b2 }) => (a2 - b1).max(a1 - b2),
        (Disk { center: c1, radius: r1 }, Disk { center: c2, radius: r2 }) => {
            (c1[0] - c2[0]).hypot(c1[1] - c2[1]) - r1 - r2
        }
        (Rectangle { min: m1, max: x1 }, Rectangle { min: m2, max: x2 }) => {
            let dx = (m2[0] - x1[0]).max(m1[0] - x2[0]);
            let dy = (m2[1] - x1[1]).max(m1[1] - x2[1]);
            if dx < 0.0 && dy < 0.0 {
                dx.max(dy)
            } else {
                dx.max(0.0).hypot(dy.max(0.0))
            }
        }
        (Disk { center, radius }, Rectangle { min, max })
        | (Rectangle { min, max }, Disk { center, radius }) => {
            let ox = (min[0] - center[0]).max(center[0] - max[0]);
            let oy = (min[1] - center[1]).max(center[1] - max[1]);
            let d = if ox <= 0.0 && oy <= 0.0 {
                ox.max(oy)
            } else {
                ox.max(0.0).hypot(oy.max(0.0))
            };
            d - radius
        }
        _ => f64::NEG_INFINITY,
    }
}
