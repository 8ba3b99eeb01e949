//! Regenerative quantum Stirling engines and refrigerators with bosonic
//! (harmonic) or fermionic (two-level) oscillator working media.
//!
//! Units are natural (ħ = k_B = 1). Heats are per oscillator and positive
//! when they enter the working medium.

// `!(a > b)` is used deliberately so NaN inputs fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;
mod numeric;

pub mod cycle;
pub mod performance;
pub mod quadrature;
pub mod relaxation;
pub mod statistics;
pub mod timing;

pub use cycle::{
    engine_ledger, fridge_ledger, isochoric_heat, isothermal_heat, EngineCycle, EngineSpec, FridgeCycle, FridgeSpec,
    Status, StrokeLedger,
};
pub use error::{Error, Result};
pub use numeric::relative_deviation;
pub use performance::{
    engine_performance, equivalence_report, fridge_performance, power_sweep, reference_sweep_template, Deviation,
    EquivalenceReport, Machine, MachineKind, Mode, Numerics, PerformanceReport, RegimeTag, Sweep, SweepRecord,
    SweepSummary, SweepTemplate,
};
pub use quadrature::{integrate, Estimate, QuadratureConfig};
pub use relaxation::{
    conduction_ratio, heat_current, limit_heat_current, rates, relax, GevaKosloff, HeatRegime, LimitHeatCurrent,
    LimitParams, RateModel, Rates, RelaxationSetup, SpectralClass, ThermalField,
};
pub use statistics::{
    integrate_path, internal_energy, inverse_population, population, OscillatorState, PathIntegral, PathSpec,
    Statistics,
};
pub use timing::{
    closed_form_cycle_time, closed_form_strokes, engine_cycle_time, fridge_cycle_time, isochoric_time, isothermal_time,
    x_range, ClosedForm, CycleSpec, RegeneratorModel, Regime, RegimeWindow, StrokeTime, TimingReport,
};
