//! The line-oriented `.qcl` layout format.
//!
//! ```text
//! qcl 1
//! # comment
//! constants paper
//! cell id=in1 x=0 y=0 size=18 offset=4.5 rot=0 role=fixed clock=0 pol=1
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{Cell, Layout, Role, Rotation};
use crate::electrostatics::ConstantsMode;
use crate::error::{Error, Result};

const CELL_KEYS: [&str; 9] = ["id", "x", "y", "size", "offset", "rot", "role", "clock", "pol"];

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        message: message.into(),
    }
}

pub fn parse_layout(text: &str) -> Result<Layout> {
    let mut header_seen = false;
    let mut constants = None;
    let mut cells = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut words = line.split_whitespace();
        let keyword = words.next().unwrap_or_default();
        if !header_seen {
            if keyword != "qcl" {
                return Err(syntax(lineno, "expected `qcl 1` header"));
            }
            match (words.next(), words.next()) {
                (Some("1"), None) => {}
                _ => return Err(syntax(lineno, "unsupported qcl version")),
            }
            header_seen = true;
            continue;
        }
        match keyword {
            "constants" => {
                if constants.is_some() || !cells.is_empty() {
                    return Err(syntax(lineno, "`constants` must appear once, before any cell"));
                }
                let mode = match (words.next(), words.next()) {
                    (Some(m), None) => m
                        .parse::<ConstantsMode>()
                        .map_err(|e| syntax(lineno, e))?,
                    _ => return Err(syntax(lineno, "expected `constants paper|codata`")),
                };
                constants = Some(mode);
            }
            "cell" => cells.push(parse_cell(lineno, words)?),
            other => return Err(syntax(lineno, format!("unknown directive `{other}`"))),
        }
    }
    if !header_seen {
        return Err(syntax(1, "missing `qcl 1` header"));
    }
    Ok(Layout::new("layout", cells)?.with_constants(constants))
}

fn parse_cell<'a>(lineno: usize, words: impl Iterator<Item = &'a str>) -> Result<Cell> {
    let mut kv = BTreeMap::new();
    for w in words {
        let (k, v) = w
            .split_once('=')
            .ok_or_else(|| syntax(lineno, format!("expected key=value, got `{w}`")))?;
        if !CELL_KEYS.contains(&k) {
            return Err(syntax(lineno, format!("unknown key `{k}`")));
        }
        if kv.insert(k, v).is_some() {
            return Err(syntax(lineno, format!("duplicate key `{k}`")));
        }
    }
    let real = |key: &str| -> Result<Option<f64>> {
        kv.get(key)
            .map(|v| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| syntax(lineno, format!("`{key}`: invalid number `{v}`")))
            })
            .transpose()
    };
    let integer = |key: &str| -> Result<Option<i64>> {
        kv.get(key)
            .map(|v| {
                v.parse::<i64>()
                    .map_err(|_| syntax(lineno, format!("`{key}`: invalid integer `{v}`")))
            })
            .transpose()
    };
    let required = |key: &str| syntax(lineno, format!("missing required key `{key}`"));

    let id = *kv.get("id").ok_or_else(|| required("id"))?;
    let x = real("x")?.ok_or_else(|| required("x"))?;
    let y = real("y")?.ok_or_else(|| required("y"))?;
    let role = kv
        .get("role")
        .ok_or_else(|| required("role"))?
        .parse::<Role>()
        .map_err(|e| syntax(lineno, e))?;

    let mut b = Cell::builder(id, x, y).role(role);
    if let Some(size) = real("size")? {
        b = b.size(size);
    }
    if let Some(offset) = real("offset")? {
        b = b.dot_offset(offset);
    }
    if let Some(rot) = integer("rot")? {
        let r = Rotation::from_degrees(rot)
            .ok_or_else(|| syntax(lineno, format!("`rot` must be 0 or 45, got {rot}")))?;
        b = b.rotation(r);
    }
    if let Some(zone) = integer("clock")? {
        b = b.clock_zone(zone);
    }
    if let Some(p) = real("pol")? {
        b = b.polarization(p);
    }
    b.build()
}

/// Canonical decimal text: at most six decimals, trailing zeros trimmed.
pub fn format_real(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".to_string()
    } else {
        s
    }
}

pub fn serialize_layout(layout: &Layout) -> String {
    let mut out = String::from("qcl 1\n");
    let _ = writeln!(out, "# {}", layout.name());
    if let Some(mode) = layout.constants() {
        let _ = writeln!(out, "constants {mode}");
    }
    for c in layout.cells() {
        let p = c.center();
        let _ = write!(
            out,
            "cell id={} x={} y={} size={} offset={} rot={} role={} clock={}",
            c.id(),
            format_real(p.x),
            format_real(p.y),
            format_real(c.size()),
            format_real(c.dot_offset()),
            c.rotation().degrees(),
            c.role(),
            c.clock_zone()
        );
        if let Some(pol) = c.fixed_polarization() {
            let _ = write!(out, " pol={}", format_real(pol));
        }
        out.push('\n');
    }
    out
}
