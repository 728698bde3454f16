//! Measurement quantities computed from state snapshots and trajectories.

mod intensity;
mod occupation;
mod rate;
mod scan;
mod signatures;

pub use crate::series::{IntensityMode, SpatialProfile, TimeSeries};
pub use intensity::{intensity, raw_grid_points, uniform_grid, FieldIntensity, DEFAULT_GRID_POINTS};
pub use occupation::{
    interaction_energy_one, interaction_energy_two, population, spectrum, total_excitation, ModeOccupation,
    Population,
};
pub use rate::{decay_rate, DecayRate, RateOptions, POPULATION_FLOOR};
pub use scan::{phase_grid, phase_scan, scan_periodic, Extremum, PhaseScan, PhaseScanSetup};
pub use signatures::{induced_packet, intensity_differences, InducedPacket, IntensityDifferences};
