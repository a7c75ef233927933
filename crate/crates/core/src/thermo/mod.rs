//! Thermodynamic formalism on cylinder spaces.

mod potential;
mod pressure;
mod transfer;


pub use potential::{truncate_potential, Potential, PotentialKind, ProbabilityModel, TruncatedPotential};
#[allow(unused_imports)]
pub(crate) use potential::cylinder_points;
pub use pressure::{
    bowen_root, partition_sum, pressure, pressure_drop_check, BowenOptions, BowenRoot, PressureDropReport,
    PressureEstimate, PressureMethod, SumMode, WordDerivatives, ENUMERATION_CAP,
};
pub use transfer::{
    entropy, gibbs_cylinder_measure, lyapunov_dimension, lyapunov_exponent, transfer_spectrum, CylinderMeasure,
    EntropyEstimate, LyapunovDimension, TransferSpectrum, MAX_ITERATIONS, TOLERANCE,
};
