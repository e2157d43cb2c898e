use std::fmt;
use std::str::FromStr;

use super::{Cell, Layout, Point, Role, DEFAULT_CELL_SIZE};
use crate::error::{Error, Result};

/// Edge-to-edge spacing used by the standard layouts, nm.
pub const DEFAULT_GAP: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuiltinLayout {
    /// `n` collinear cells driven from the left.
    Wire(usize),
    /// Three input arms around a center cell, output to the right.
    Majority,
    /// Driver plus a diagonally adjacent output cell.
    Inv2,
    /// Driver, output diagonally adjacent to it, and a second cell diagonally
    /// adjacent to the output on the far side.
    Inv3,
}

impl BuiltinLayout {
    pub const NAMES: [&'static str; 4] = ["wire<n>", "majority", "inv2", "inv3"];
}

impl fmt::Display for BuiltinLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinLayout::Wire(n) => write!(f, "wire{n}"),
            BuiltinLayout::Majority => f.write_str("majority"),
            BuiltinLayout::Inv2 => f.write_str("inv2"),
            BuiltinLayout::Inv3 => f.write_str("inv3"),
        }
    }
}

impl FromStr for BuiltinLayout {
    type Err = Error;

    /// Accepts `inv2`, `inv3`, `majority`, and `wire<n>` / `wire(<n>)` / `wire:<n>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inv2" => return Ok(BuiltinLayout::Inv2),
            "inv3" => return Ok(BuiltinLayout::Inv3),
            "majority" => return Ok(BuiltinLayout::Majority),
            _ => {}
        }
        let n = s
            .strip_prefix("wire")
            .map(|rest| {
                rest.strip_prefix('(')
                    .and_then(|r| r.strip_suffix(')'))
                    .or_else(|| rest.strip_prefix(':'))
                    .unwrap_or(rest)
            })
            .and_then(|n| n.parse::<usize>().ok());
        match n {
            Some(n) => Ok(BuiltinLayout::Wire(n)),
            None => Err(Error::UnknownLayout(s.to_string())),
        }
    }
}

fn driver(id: &str, x: f64, y: f64) -> Result<Cell> {
    Cell::builder(id, x, y).role(Role::Fixed).polarization(1.0).build()
}

fn cell(id: &str, x: f64, y: f64, role: Role) -> Result<Cell> {
    Cell::builder(id, x, y).role(role).build()
}

/// Builds one of the standard layouts with 18 nm cells spaced `gap` apart
/// edge to edge on each axis.
pub fn builtin_layout(kind: BuiltinLayout, gap: f64) -> Result<Layout> {
    if !(gap.is_finite() && gap > 0.0) {
        return Err(Error::InvalidParameter(format!("gap must be positive, got {gap}")));
    }
    let p = DEFAULT_CELL_SIZE + gap;
    let cells = match kind {
        BuiltinLayout::Wire(n) => {
            if n < 2 {
                return Err(Error::InvalidParameter(format!(
                    "a wire needs at least 2 cells, got {n}"
                )));
            }
            let mut cells = vec![driver("in", 0.0, 0.0)?];
            for i in 1..n - 1 {
                cells.push(cell(&format!("w{i}"), i as f64 * p, 0.0, Role::Normal)?);
            }
            cells.push(cell("out", (n - 1) as f64 * p, 0.0, Role::Output)?);
            cells
        }
        BuiltinLayout::Majority => vec![
            cell("a", 0.0, p, Role::Input)?,
            cell("b", -p, 0.0, Role::Input)?,
            cell("c", 0.0, -p, Role::Input)?,
            cell("center", 0.0, 0.0, Role::Normal)?,
            cell("out", p, 0.0, Role::Output)?,
        ],
        BuiltinLayout::Inv2 => vec![driver("in", 0.0, 0.0)?, cell("out", p, p, Role::Output)?],
        BuiltinLayout::Inv3 => vec![
            driver("in", 0.0, 0.0)?,
            cell("mid", 2.0 * p, 0.0, Role::Normal)?,
            cell("out", p, p, Role::Output)?,
        ],
    };
    Layout::new(kind.to_string(), cells)
}

/// The cell nearest to `id` by center distance; ties go to the lowest id.
pub fn previous_neighbor<'a>(layout: &'a Layout, id: &str) -> Result<&'a Cell> {
    let target = layout.cell(id)?;
    layout
        .cells()
        .iter()
        .filter(|c| c.id() != id)
        .min_by(|a, b| {
            let da = a.center().distance(target.center());
            let db = b.center().distance(target.center());
            da.total_cmp(&db).then_with(|| a.id().cmp(b.id()))
        })
        .ok_or_else(|| {
            Error::InvalidParameter(format!("cell `{id}` has no neighbor to measure a gap against"))
        })
}

/// A unit direction in the layout plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    dx: f64,
    dy: f64,
}

impl Axis {
    pub const X: Axis = Axis { dx: 1.0, dy: 0.0 };
    pub const Y: Axis = Axis { dx: 0.0, dy: 1.0 };

    pub fn new(dx: f64, dy: f64) -> Result<Self> {
        let n = dx.hypot(dy);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter("axis must be a non-zero vector".into()));
        }
        Ok(Axis { dx: dx / n, dy: dy / n })
    }

    /// Direction from `from` to `to`, snapped to the nearest multiple of 45°.
    pub fn toward(from: Point, to: Point) -> Result<Self> {
        let angle = (to.y - from.y).atan2(to.x - from.x);
        let octant = (angle / std::f64::consts::FRAC_PI_4).round();
        let (dx, dy) = match octant as i64 {
            0 => (1.0, 0.0),
            1 => (1.0, 1.0),
            2 => (0.0, 1.0),
            3 => (-1.0, 1.0),
            4 | -4 => (-1.0, 0.0),
            -3 => (-1.0, -1.0),
            -2 => (0.0, -1.0),
            -1 => (1.0, -1.0),
            _ => unreachable!("atan2 range"),
        };
        Axis::new(dx, dy)
    }

    pub fn dx(self) -> f64 {
        self.dx
    }

    pub fn dy(self) -> f64 {
        self.dy
    }
}

/// Moves cell `id` along `axis` until its per-axis edge gap to its previous
/// neighbor equals `new_gap`. The gap is measured on the axis component with
/// the larger magnitude (x on a tie).
pub fn displace_cell(layout: &Layout, id: &str, new_gap: f64, axis: Axis) -> Result<Layout> {
    if !(new_gap.is_finite() && new_gap > 0.0) {
        return Err(Error::Overlap(id.to_string(), format!("(gap {new_gap})")));
    }
    let idx = layout
        .index_of(id)
        .ok_or_else(|| Error::UnknownCell(id.to_string()))?;
    let target = &layout.cells()[idx];
    let prev = previous_neighbor(layout, id)?;

    let (d, a) = if axis.dx.abs() >= axis.dy.abs() {
        (target.center().x - prev.center().x, axis.dx)
    } else {
        (target.center().y - prev.center().y, axis.dy)
    };
    if d == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "cell `{id}` is aligned with `{}` along the displacement axis",
            prev.id()
        )));
    }
    let half = 0.5 * (target.size() + prev.size());
    let t = (d.signum() * (new_gap + half) - d) / a;
    if t == 0.0 {
        return Ok(layout.clone());
    }
    let c = target.center();
    let moved = target.with_center(Point::new(c.x + t * axis.dx, c.y + t * axis.dy));
    layout.replace_cell(idx, moved)
}
