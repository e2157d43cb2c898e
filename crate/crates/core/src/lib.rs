//! Quantum-dot cellular automata: cell geometry, electrostatic coupling,
//! bistable and coherence-vector engines, and parameter sweeps.

pub mod electrostatics;
pub mod engines;
pub mod error;
pub mod geometry;
pub mod sweeps;

pub use electrostatics::{
    config_energy, coulomb_pair, kink_energy_pair, kink_matrix, ConstantsMode, KinkMatrix,
    PhysicalConstants,
};
pub use engines::{
    bistable_relax, clock_gamma, simulate_coherence, steady_state_polarization, truth_table_check,
    BistableParams, CoherenceParams, Drives, Engine, LogicFunction, Polarizations, SimulationTrace,
    TruthTable,
};
pub use error::{Error, Result};
pub use geometry::{
    builtin_layout, displace_cell, parse_layout, serialize_layout, Axis, BuiltinLayout, Cell,
    Layout, Point, Polarity, Role, Rotation,
};
pub use sweeps::{
    compare_to_reference, emit_csv, sweep_gap, sweep_temperature, ReferenceTable, SweepResult,
    TableId,
};
