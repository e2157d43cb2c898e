//! Coulomb configuration energies and kink energies between cells.
//!
//! Each cell carries two point electrons (charge `-e`) on the diagonal
//! selected by its polarity; there is no neutralizing background charge.
//! Energies are in joules, distances enter in meters.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Cell, Layout, Polarity};

const NM: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum ConstantsMode {
    /// Rounded constants: k = 9e9, e = 1.6e-19, so k·e² = 23.04e-29 J·m.
    #[default]
    Paper,
    /// CODATA 2018 exact/recommended values.
    Codata,
}

impl fmt::Display for ConstantsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstantsMode::Paper => "paper",
            ConstantsMode::Codata => "codata",
        })
    }
}

impl FromStr for ConstantsMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "paper" => Ok(ConstantsMode::Paper),
            "codata" => Ok(ConstantsMode::Codata),
            other => Err(format!("unknown constants mode `{other}` (expected paper|codata)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalConstants {
    /// N·m²/C²
    pub coulomb_k: f64,
    /// C
    pub electron_charge: f64,
    pub relative_permittivity: f64,
    /// J/K
    pub boltzmann_k: f64,
    /// J·s
    pub hbar: f64,
    pub mode: ConstantsMode,
}

impl PhysicalConstants {
    const BOLTZMANN: f64 = 1.380649e-23;
    const HBAR: f64 = 1.054571817e-34;

    pub const PAPER: PhysicalConstants = PhysicalConstants {
        coulomb_k: 9e9,
        electron_charge: 1.6e-19,
        relative_permittivity: 1.0,
        boltzmann_k: Self::BOLTZMANN,
        hbar: Self::HBAR,
        mode: ConstantsMode::Paper,
    };

    pub const CODATA: PhysicalConstants = PhysicalConstants {
        coulomb_k: 8.987_551_787_368_176e9,
        electron_charge: 1.602_176_634e-19,
        relative_permittivity: 1.0,
        boltzmann_k: Self::BOLTZMANN,
        hbar: Self::HBAR,
        mode: ConstantsMode::Codata,
    };

    pub fn for_mode(mode: ConstantsMode) -> Self {
        match mode {
            ConstantsMode::Paper => Self::PAPER,
            ConstantsMode::Codata => Self::CODATA,
        }
    }

    pub fn with_relative_permittivity(self, eps_r: f64) -> Result<Self> {
        let c = PhysicalConstants {
            relative_permittivity: eps_r,
            ..self
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            ("coulomb_k", self.coulomb_k),
            ("electron_charge", self.electron_charge),
            ("relative_permittivity", self.relative_permittivity),
            ("boltzmann_k", self.boltzmann_k),
            ("hbar", self.hbar),
        ];
        for (name, v) in all {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::PAPER
    }
}

/// Potential energy of two point charges `r` meters apart.
pub fn coulomb_pair(q1: f64, q2: f64, r: f64, constants: &PhysicalConstants) -> Result<f64> {
    if r.is_nan() || r <= 0.0 {
        return Err(Error::Domain(format!("charge separation must be positive, got {r}")));
    }
    Ok(constants.coulomb_k * q1 * q2 / (constants.relative_permittivity * r))
}

/// Unevaluated sum `hi + lo` carrying roughly twice the precision of f64.
///
/// Kink energies are small differences of configuration energies (about
/// 1e-5 of them at 80 nm), so the four configurations are accumulated in
/// this form and rounded once at the end.
#[derive(Clone, Copy, Debug, Default)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

impl Dd {
    fn from_f64(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let r = quick_two_sum(s, e + t);
        quick_two_sum(r.hi, r.lo + f)
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p) + (self.hi * o.lo + self.lo * o.hi);
        quick_two_sum(p, e)
    }

    fn scale(self, f: f64) -> Dd {
        self.mul(Dd::from_f64(f))
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// `1/√(dx² + dy²)`: the square sum is formed exactly, then one Newton step
/// refines the f64 inverse square root.
fn inv_distance(dx: f64, dy: f64) -> Dd {
    let (px, py) = (dx * dx, dy * dy);
    let (ex, ey) = (dx.mul_add(dx, -px), dy.mul_add(dy, -py));
    let (s, e) = two_sum(px, py);
    let r2 = quick_two_sum(s, e + ex + ey);
    let y = Dd::from_f64(1.0 / r2.hi.sqrt());
    let residual = Dd::from_f64(1.0).add(r2.mul(y).mul(y).neg());
    y.add(y.mul(residual).scale(0.5))
}

/// Sum of `1/r` (nm⁻¹) over the four electron pairs, lower id outermost.
fn inverse_distance_sum(a: &Cell, pa: Polarity, b: &Cell, pb: Polarity) -> Result<Dd> {
    if a.overlaps(b) {
        return Err(Error::Domain(format!(
            "cells `{}` and `{}` overlap",
            a.id(),
            b.id()
        )));
    }
    let ((first, pf), (second, ps)) = if b.id() < a.id() {
        ((b, pb), (a, pa))
    } else {
        ((a, pa), (b, pb))
    };
    let mut sum = Dd::default();
    for ea in first.electron_positions(pf) {
        for eb in second.electron_positions(ps) {
            let (dx, dy) = (ea.x - eb.x, ea.y - eb.y);
            if dx == 0.0 && dy == 0.0 {
                return Err(Error::Domain(format!(
                    "cells `{}` and `{}` have coincident dots",
                    a.id(),
                    b.id()
                )));
            }
            sum = sum.add(inv_distance(dx, dy));
        }
    }
    Ok(sum)
}

/// `k·q²/ε_r` per nanometer of inverse separation.
fn energy_per_inverse_nm(constants: &PhysicalConstants) -> f64 {
    let q = constants.electron_charge;
    constants.coulomb_k * q * q / (constants.relative_permittivity * NM)
}

/// Electron-electron energy between two cells in the given polarities.
///
/// Terms are summed with the lower-id cell in the outer loop and dots in
/// ascending order, so the result is bit-identical under argument swap.
pub fn config_energy(
    a: &Cell,
    pa: Polarity,
    b: &Cell,
    pb: Polarity,
    constants: &PhysicalConstants,
) -> Result<f64> {
    constants.validate()?;
    let sum = inverse_distance_sum(a, pa, b, pb)?;
    Ok(sum.scale(energy_per_inverse_nm(constants)).to_f64())
}

/// Kink energy: opposite-polarization energy minus same-polarization energy,
/// each averaged over the two global polarity assignments.
///
/// For pairs that map onto themselves under global polarity reversal (e.g.
/// two collinear unrotated cells) both averaged terms reduce to the single
/// `(+1,-1)` and `(+1,+1)` configurations.
pub fn kink_energy_pair(a: &Cell, b: &Cell, constants: &PhysicalConstants) -> Result<f64> {
    use Polarity::{Negative as N, Positive as P};
    constants.validate()?;
    let (a, b) = if b.id() < a.id() { (b, a) } else { (a, b) };
    let opp = inverse_distance_sum(a, P, b, N)?.add(inverse_distance_sum(a, N, b, P)?);
    let same = inverse_distance_sum(a, P, b, P)?.add(inverse_distance_sum(a, N, b, N)?);
    let diff = opp.add(same.neg()).scale(0.5);
    Ok(diff.scale(energy_per_inverse_nm(constants)).to_f64())
}

/// Symmetric pairwise kink energies within a radius of effect.
#[derive(Clone, Debug, PartialEq)]
pub struct KinkMatrix {
    radius_of_effect: f64,
    entries: BTreeMap<(String, String), f64>,
}

fn key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl KinkMatrix {
    pub fn radius_of_effect(&self) -> f64 {
        self.radius_of_effect
    }

    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        self.entries.get(&key(a, b)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Pairs in lexicographic order, each with the smaller id first.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, f64)> {
        self.entries
            .iter()
            .map(|((a, b), &e)| (a.as_str(), b.as_str(), e))
    }
}

pub fn kink_matrix(
    layout: &Layout,
    radius_of_effect: f64,
    constants: &PhysicalConstants,
) -> Result<KinkMatrix> {
    if !(radius_of_effect.is_finite() && radius_of_effect > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "radius of effect must be positive, got {radius_of_effect}"
        )));
    }
    constants.validate()?;
    let cells = layout.cells();
    let pairs: Vec<(&Cell, &Cell)> = cells
        .iter()
        .enumerate()
        .flat_map(|(i, a)| cells[i + 1..].iter().map(move |b| (a, b)))
        .filter(|(a, b)| a.center().distance(b.center()) <= radius_of_effect)
        .collect();
    let energies = pairs
        .par_iter()
        .map(|(a, b)| kink_energy_pair(a, b, constants))
        .collect::<Result<Vec<f64>>>()?;
    let entries = pairs
        .iter()
        .zip(energies)
        .map(|((a, b), e)| (key(a.id(), b.id()), e))
        .collect();
    Ok(KinkMatrix {
        radius_of_effect,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{builtin_layout, BuiltinLayout, Rotation};

    const PAPER: PhysicalConstants = PhysicalConstants::PAPER;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs())
    }

    fn cell(id: &str, x: f64, y: f64) -> Cell {
        Cell::builder(id, x, y).build().unwrap()
    }

    /// Sum of k·e²/r over the listed separations (nm), paper constants.
    fn hand_sum(distances_nm: &[f64]) -> f64 {
        distances_nm.iter().map(|d| 23.04e-29 / (d * 1e-9)).sum()
    }

    #[test]
    fn paper_constant_product() {
        for r in [0.5e-9, 1e-9, 2e-9, 3e-9] {
            let e = coulomb_pair(PAPER.electron_charge, PAPER.electron_charge, r, &PAPER).unwrap();
            assert!(close(e * r, 23.04e-29, 1e-12));
        }
        let e = coulomb_pair(1.6e-19, 1.6e-19, 1e-9, &PAPER).unwrap();
        assert!(close(e, 2.304e-19, 1e-12));
    }

    #[test]
    fn coulomb_sign_and_scaling() {
        let q = PAPER.electron_charge;
        let e1 = coulomb_pair(q, q, 1e-9, &PAPER).unwrap();
        let e2 = coulomb_pair(q, q, 2e-9, &PAPER).unwrap();
        assert!(close(e2, e1 / 2.0, 1e-15));
        assert!(coulomb_pair(q, -q, 1e-9, &PAPER).unwrap() < 0.0);
        assert!(coulomb_pair(q, q, 0.0, &PAPER).is_err());
        assert!(coulomb_pair(q, q, -1.0, &PAPER).is_err());
    }

    #[test]
    fn permittivity_divides_energy() {
        let c = PAPER.with_relative_permittivity(4.0).unwrap();
        let q = c.electron_charge;
        let e = coulomb_pair(q, q, 1e-9, &c).unwrap();
        assert!(close(e * 4.0, 2.304e-19, 1e-12));
        assert!(PAPER.with_relative_permittivity(0.0).is_err());
    }

    #[test]
    fn collinear_configuration_energies() {
        let a = cell("a", 0.0, 0.0);
        let b = cell("b", 20.0, 0.0);
        let same = config_energy(&a, Polarity::Positive, &b, Polarity::Positive, &PAPER).unwrap();
        let s202 = 202f64.sqrt();
        let s922 = 922f64.sqrt();
        assert!(close(same, hand_sum(&[20.0, s202, s922, 20.0]), 1e-12));
        assert!(close(same, 4.684e-20, 1e-3));

        let opp = config_energy(&a, Polarity::Positive, &b, Polarity::Negative, &PAPER).unwrap();
        let s481 = 481f64.sqrt();
        assert!(close(opp, hand_sum(&[11.0, s481, s481, 29.0]), 1e-12));
        assert!(close(opp, 4.990e-20, 1e-3));

        let k = kink_energy_pair(&a, &b, &PAPER).unwrap();
        assert!(close(k, 3.062_246e-21, 1e-6), "{k:e}");
    }

    #[test]
    fn config_energy_is_swap_symmetric() {
        let a = cell("a", 0.0, 0.0);
        let b = Cell::builder("b", 40.0, 20.0).rotation(Rotation::Deg45).build().unwrap();
        for pa in Polarity::BOTH {
            for pb in Polarity::BOTH {
                let ab = config_energy(&a, pa, &b, pb, &PAPER).unwrap();
                let ba = config_energy(&b, pb, &a, pa, &PAPER).unwrap();
                assert_eq!(ab.to_bits(), ba.to_bits());
            }
        }
    }

    #[test]
    fn diagonal_kink_is_negative() {
        let a = cell("a", 0.0, 0.0);
        let b = cell("b", 20.0, 20.0);
        let k = kink_energy_pair(&a, &b, &PAPER).unwrap();
        assert!(k < 0.0);
        // Polarity-averaged value for this geometry.
        assert!(close(k, -6.658_097e-22, 1e-6), "{k:e}");
        assert_eq!(k.to_bits(), kink_energy_pair(&b, &a, &PAPER).unwrap().to_bits());
    }

    #[test]
    fn mixed_rotation_in_line_does_not_couple() {
        // A rotated cell level with an unrotated one sees both of the
        // latter's polarities as mirror images.
        let a = cell("a", 0.0, 0.0);
        let b = Cell::builder("b", 20.0, 0.0).rotation(Rotation::Deg45).build().unwrap();
        let k = kink_energy_pair(&a, &b, &PAPER).unwrap();
        assert!(k.abs() < 1e-12 * 3e-21, "{k:e}");
    }

    #[test]
    fn energy_decays_with_separation() {
        let a = cell("a", 0.0, 0.0);
        let mut last = f64::INFINITY;
        for x in [20.0, 30.0, 60.0, 200.0, 2000.0, 2e6] {
            let e = config_energy(&a, Polarity::Positive, &cell("b", x, 0.0), Polarity::Positive, &PAPER)
                .unwrap();
            assert!(e < last);
            last = e;
        }
        assert!(last < 1e-24);
    }

    #[test]
    fn overlap_is_a_domain_error() {
        let a = cell("a", 0.0, 0.0);
        let b = cell("b", 10.0, 0.0);
        assert!(matches!(
            config_energy(&a, Polarity::Positive, &b, Polarity::Positive, &PAPER),
            Err(Error::Domain(_))
        ));
        assert!(kink_energy_pair(&a, &b, &PAPER).is_err());
    }

    #[test]
    fn matrix_cutoff() {
        let w = builtin_layout(BuiltinLayout::Wire(3), 2.0).unwrap();
        assert_eq!(kink_matrix(&w, 80.0, &PAPER).unwrap().len(), 3);
        let m = kink_matrix(&w, 25.0, &PAPER).unwrap();
        assert_eq!(m.len(), 2);
        assert!(m.get("in", "out").is_none());
        assert_eq!(m.get("w1", "in"), m.get("in", "w1"));

        let single = Layout::new("one", vec![w.cells()[0].clone()]).unwrap();
        assert!(kink_matrix(&single, 80.0, &PAPER).unwrap().is_empty());
        assert!(kink_matrix(&w, 0.0, &PAPER).is_err());
    }

    #[test]
    fn matrix_iterates_sorted() {
        let m = kink_matrix(&builtin_layout(BuiltinLayout::Majority, 2.0).unwrap(), 80.0, &PAPER)
            .unwrap();
        let keys: Vec<(String, String)> =
            m.iter().map(|(a, b, _)| (a.to_string(), b.to_string())).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert!(keys.iter().all(|(a, b)| a < b));
    }

    #[test]
    fn codata_differs_slightly() {
        let a = cell("a", 0.0, 0.0);
        let b = cell("b", 20.0, 0.0);
        let kp = kink_energy_pair(&a, &b, &PAPER).unwrap();
        let kc = kink_energy_pair(&a, &b, &PhysicalConstants::CODATA).unwrap();
        assert!(kc != kp && close(kc, kp, 0.01));
    }
}
