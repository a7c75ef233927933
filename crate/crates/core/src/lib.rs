//! Gibbs measures, pressure and dimension estimates for parametrized
//! iterated function systems on the line, with transversality checks.
// `!(x > 0.0)` deliberately rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod applications;
pub mod error;
pub mod ifs;
pub mod measure_stats;
pub mod report;
pub mod symbolic;
pub mod thermo;
pub mod transversality;

pub use error::{Error, Result};
pub use ifs::{
    AuditVerdict, ContractionBounds, Curve, CustomMap, DerivativeMethod, FrozenIfs, IfsFamily, Interval,
    LambdaDerivative, MapEval, MapKind, Mobius, Projection, RegularityReport,
};
pub use symbolic::{common_prefix, CylinderIndex, SymbolWord};
pub use applications::{
    bernoulli_entropy_bounds, bernoulli_family, bernoulli_moments, bernoulli_potential, bernoulli_region_scan,
    blackwell_family, blackwell_ratio, blackwell_region_scan, cf_family, cf_overlap, similarity_dimension,
    similarity_family, Axis, BlackwellSystem, CellVerdict, CfOverlap, EntropyBounds, RegionGrid,
};
pub use measure_stats::{
    chaos_game_sample, correlation_dimension, energy, m_condition_probe, sobolev_estimate, CorrelationDimension,
    EmpiricalSample, EnergyReport, MConditionReport, SobolevEstimate, SobolevOptions,
};
pub use thermo::{
    bowen_root, entropy, gibbs_cylinder_measure, lyapunov_dimension, lyapunov_exponent, partition_sum, pressure,
    pressure_drop_check, transfer_spectrum, BowenOptions, BowenRoot, CylinderMeasure, Potential, PressureMethod,
    ProbabilityModel, SumMode, TransferSpectrum,
};
pub use transversality::{
    build_pm_translation, greedy_partition, mc_transversality_probe, Partition, ProbeOptions, ProbeReport,
    ProbeVerdict, TranslationFamily, TransversalityReport, Verdict,
};
