//! Cells, dot geometry and validated layouts.
//!
//! All lengths in this module are nanometers. A cell is a square of side
//! `size` holding four point-like dots at distance `dot_offset` from the
//! center along each axis. Dots are numbered 1..4 starting at the dot with
//! the greatest `x + y` and proceeding counterclockwise; a polarization of
//! +1 puts the two electrons on dots 1 and 3, -1 on dots 2 and 4.

mod builtin;
mod qcl;

pub use builtin::{builtin_layout, displace_cell, previous_neighbor, Axis, BuiltinLayout, DEFAULT_GAP};
pub use qcl::{format_real, parse_layout, serialize_layout};

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::electrostatics::ConstantsMode;
use crate::error::{Error, Result};

pub const DEFAULT_CELL_SIZE: f64 = 18.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rotation {
    /// Dots on the diagonals of the square.
    Deg0,
    /// Dots at the edge midpoints.
    Deg45,
}

impl Rotation {
    pub fn degrees(self) -> u32 {
        match self {
            Rotation::Deg0 => 0,
            Rotation::Deg45 => 45,
        }
    }

    pub fn from_degrees(deg: i64) -> Option<Self> {
        match deg {
            0 => Some(Rotation::Deg0),
            45 => Some(Rotation::Deg45),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Normal,
    Input,
    Output,
    Fixed,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Normal => "normal",
            Role::Input => "input",
            Role::Output => "output",
            Role::Fixed => "fixed",
        }
    }

    /// Input and fixed cells take their polarization from outside.
    pub fn is_driver(self) -> bool {
        matches!(self, Role::Input | Role::Fixed)
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "normal" => Ok(Role::Normal),
            "input" => Ok(Role::Input),
            "output" => Ok(Role::Output),
            "fixed" => Ok(Role::Fixed),
            other => Err(format!("unknown role `{other}`")),
        }
    }
}

/// Which diagonal pair of dots the two electrons occupy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    /// Dots 1 and 3, P = +1.
    Positive,
    /// Dots 2 and 4, P = -1.
    Negative,
}

impl Polarity {
    pub const BOTH: [Polarity; 2] = [Polarity::Positive, Polarity::Negative];

    pub fn from_sign(p: f64) -> Self {
        if p < 0.0 {
            Polarity::Negative
        } else {
            Polarity::Positive
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Polarity::Positive => 1.0,
            Polarity::Negative => -1.0,
        }
    }
}

/// The two occupied dots of one cell, as 1-based dot numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElectronConfiguration {
    pub cell_id: String,
    pub dots: [usize; 2],
}

impl ElectronConfiguration {
    pub fn new(cell_id: impl Into<String>, polarity: Polarity) -> Self {
        let dots = match polarity {
            Polarity::Positive => [1, 3],
            Polarity::Negative => [2, 4],
        };
        ElectronConfiguration {
            cell_id: cell_id.into(),
            dots,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    id: String,
    center: Point,
    size: f64,
    dot_offset: f64,
    rotation: Rotation,
    role: Role,
    clock_zone: u8,
    fixed_polarization: Option<f64>,
}

impl Cell {
    /// Starts a cell with the default geometry (18 nm, offset size/4,
    /// unrotated, normal role, clock zone 0).
    pub fn builder(id: impl Into<String>, x: f64, y: f64) -> CellBuilder {
        CellBuilder {
            id: id.into(),
            center: Point::new(x, y),
            size: DEFAULT_CELL_SIZE,
            dot_offset: None,
            rotation: Rotation::Deg0,
            role: Role::Normal,
            clock_zone: 0,
            fixed_polarization: None,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn size(&self) -> f64 {
        self.size
    }

    pub fn dot_offset(&self) -> f64 {
        self.dot_offset
    }

    pub fn rotation(&self) -> Rotation {
        self.rotation
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn clock_zone(&self) -> u8 {
        self.clock_zone
    }

    pub fn fixed_polarization(&self) -> Option<f64> {
        self.fixed_polarization
    }

    /// The four dot centers in dot-number order.
    pub fn dot_positions(&self) -> [Point; 4] {
        let o = self.dot_offset;
        let rel = match self.rotation {
            Rotation::Deg0 => [(o, o), (-o, o), (-o, -o), (o, -o)],
            Rotation::Deg45 => [(o, 0.0), (0.0, o), (-o, 0.0), (0.0, -o)],
        };
        rel.map(|(dx, dy)| Point::new(self.center.x + dx, self.center.y + dy))
    }

    /// Positions of the two electrons for the given polarity.
    pub fn electron_positions(&self, polarity: Polarity) -> [Point; 2] {
        let dots = self.dot_positions();
        match polarity {
            Polarity::Positive => [dots[0], dots[2]],
            Polarity::Negative => [dots[1], dots[3]],
        }
    }

    /// Per-axis edge-to-edge gap between the bounding squares; positive when
    /// the squares are separated along at least one axis.
    pub fn edge_gap(&self, other: &Cell) -> f64 {
        let half = 0.5 * (self.size + other.size);
        let dx = (self.center.x - other.center.x).abs() - half;
        let dy = (self.center.y - other.center.y).abs() - half;
        dx.max(dy)
    }

    pub fn overlaps(&self, other: &Cell) -> bool {
        self.edge_gap(other) <= 0.0
    }

    pub(crate) fn with_center(&self, center: Point) -> Cell {
        Cell {
            center,
            ..self.clone()
        }
    }

    pub(crate) fn with_id(&self, id: impl Into<String>) -> Cell {
        Cell {
            id: id.into(),
            ..self.clone()
        }
    }

    pub(crate) fn into_fixed(self, polarization: f64) -> Result<Cell> {
        CellBuilder::from(self)
            .role(Role::Fixed)
            .polarization(polarization)
            .build()
    }
}

/// Free-function form of [`Cell::dot_positions`].
pub fn dot_positions(cell: &Cell) -> [Point; 4] {
    cell.dot_positions()
}

#[derive(Clone, Debug)]
pub struct CellBuilder {
    id: String,
    center: Point,
    size: f64,
    dot_offset: Option<f64>,
    rotation: Rotation,
    role: Role,
    clock_zone: i64,
    fixed_polarization: Option<f64>,
}

impl From<Cell> for CellBuilder {
    fn from(c: Cell) -> Self {
        CellBuilder {
            id: c.id,
            center: c.center,
            size: c.size,
            dot_offset: Some(c.dot_offset),
            rotation: c.rotation,
            role: c.role,
            clock_zone: c.clock_zone as i64,
            fixed_polarization: c.fixed_polarization,
        }
    }
}

impl CellBuilder {
    pub fn size(mut self, size: f64) -> Self {
        self.size = size;
        self
    }

    pub fn dot_offset(mut self, offset: f64) -> Self {
        self.dot_offset = Some(offset);
        self
    }

    pub fn rotation(mut self, rotation: Rotation) -> Self {
        self.rotation = rotation;
        self
    }

    pub fn role(mut self, role: Role) -> Self {
        self.role = role;
        self
    }

    pub fn clock_zone(mut self, zone: i64) -> Self {
        self.clock_zone = zone;
        self
    }

    pub fn polarization(mut self, p: f64) -> Self {
        self.fixed_polarization = Some(p);
        self
    }

    pub fn build(self) -> Result<Cell> {
        let id = self.id;
        if id.is_empty() || id.chars().any(|c| c.is_whitespace() || c == ',' || c == '=') {
            return Err(Error::cell(&id, "id must be non-empty without whitespace, ',' or '='"));
        }
        if !(self.center.x.is_finite() && self.center.y.is_finite()) {
            return Err(Error::cell(&id, "center must be finite"));
        }
        if !(self.size.is_finite() && self.size > 0.0) {
            return Err(Error::cell(&id, format!("size must be positive, got {}", self.size)));
        }
        let dot_offset = self.dot_offset.unwrap_or(self.size / 4.0);
        if !(dot_offset > 0.0 && dot_offset <= self.size / 2.0) {
            return Err(Error::cell(
                &id,
                format!("dot offset {dot_offset} outside (0, size/2]"),
            ));
        }
        if !(0..=3).contains(&self.clock_zone) {
            return Err(Error::ClockZone {
                id,
                zone: self.clock_zone,
            });
        }
        match (self.role, self.fixed_polarization) {
            (Role::Fixed, None) => return Err(Error::MissingPolarization(id)),
            (Role::Fixed, Some(p)) if !(-1.0..=1.0).contains(&p) => {
                return Err(Error::cell(&id, format!("polarization {p} outside [-1, 1]")));
            }
            (Role::Fixed, Some(_)) => {}
            (_, Some(_)) => return Err(Error::UnexpectedPolarization(id)),
            (_, None) => {}
        }
        Ok(Cell {
            id,
            center: self.center,
            size: self.size,
            dot_offset,
            rotation: self.rotation,
            role: self.role,
            clock_zone: self.clock_zone as u8,
            fixed_polarization: self.fixed_polarization,
        })
    }
}

/// A validated set of cells: unique ids, no overlapping squares, and at least
/// one driver whenever there is anything to drive.
#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    name: String,
    cells: Vec<Cell>,
    constants: Option<ConstantsMode>,
}

impl Layout {
    pub fn new(name: impl Into<String>, cells: Vec<Cell>) -> Result<Self> {
        let mut seen = HashSet::new();
        for c in &cells {
            if !seen.insert(c.id()) {
                return Err(Error::DuplicateId(c.id().to_string()));
            }
        }
        for (i, a) in cells.iter().enumerate() {
            for b in &cells[i + 1..] {
                if a.overlaps(b) {
                    return Err(Error::Overlap(a.id().to_string(), b.id().to_string()));
                }
            }
        }
        let needs_driver = cells
            .iter()
            .any(|c| matches!(c.role(), Role::Normal | Role::Output));
        if needs_driver && !cells.iter().any(|c| c.role().is_driver()) {
            return Err(Error::Undriven);
        }
        Ok(Layout {
            name: name.into(),
            cells,
            constants: None,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Constants mode requested by the layout file, if any.
    pub fn constants(&self) -> Option<ConstantsMode> {
        self.constants
    }

    pub fn with_constants(mut self, mode: Option<ConstantsMode>) -> Self {
        self.constants = mode;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.cells.iter().position(|c| c.id() == id)
    }

    pub fn cell(&self, id: &str) -> Result<&Cell> {
        self.cells
            .iter()
            .find(|c| c.id() == id)
            .ok_or_else(|| Error::UnknownCell(id.to_string()))
    }

    pub fn outputs(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| c.role() == Role::Output)
    }

    /// The single output cell, or an error naming the problem.
    pub fn sole_output(&self) -> Result<&Cell> {
        let mut outs = self.outputs();
        match (outs.next(), outs.next()) {
            (Some(c), None) => Ok(c),
            (None, _) => Err(Error::InvalidParameter(format!(
                "layout `{}` has no output cell",
                self.name
            ))),
            (Some(_), Some(_)) => Err(Error::InvalidParameter(format!(
                "layout `{}` has more than one output cell",
                self.name
            ))),
        }
    }

    /// Copy of the layout with `id` turned into a fixed cell of the given
    /// polarization.
    pub fn with_fixed(&self, id: &str, polarization: f64) -> Result<Layout> {
        let idx = self
            .index_of(id)
            .ok_or_else(|| Error::UnknownCell(id.to_string()))?;
        let mut cells = self.cells.clone();
        cells[idx] = cells[idx].clone().into_fixed(polarization)?;
        Ok(Layout::new(self.name.clone(), cells)?.with_constants(self.constants))
    }

    /// Copy of the layout with every cell shifted by `(dx, dy)`.
    pub fn translated(&self, dx: f64, dy: f64) -> Result<Layout> {
        let cells = self
            .cells
            .iter()
            .map(|c| {
                let p = c.center();
                c.with_center(Point::new(p.x + dx, p.y + dy))
            })
            .collect();
        Ok(Layout::new(self.name.clone(), cells)?.with_constants(self.constants))
    }

    /// Copy of the layout with cell ids replaced through `rename`.
    pub fn relabeled(&self, mut rename: impl FnMut(&str) -> String) -> Result<Layout> {
        let cells = self.cells.iter().map(|c| c.with_id(rename(c.id()))).collect();
        Ok(Layout::new(self.name.clone(), cells)?.with_constants(self.constants))
    }

    pub(crate) fn replace_cell(&self, idx: usize, cell: Cell) -> Result<Layout> {
        let mut cells = self.cells.clone();
        cells[idx] = cell;
        Ok(Layout::new(self.name.clone(), cells)?.with_constants(self.constants))
    }
}
