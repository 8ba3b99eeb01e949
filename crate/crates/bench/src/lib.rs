//! Fixtures shared by the benchmarks in `benches/`.

use stirling::{EngineSpec, FridgeSpec, GevaKosloff, Machine, RegeneratorModel, Statistics};

/// Engine at the efficiency/power curve ratios with `beta1 * omega1 = x`.
pub fn engine(stat: Statistics, x: f64) -> Machine {
    let spec =
        EngineSpec { stat, omega1: 1.0, omega2: 2.0, beta_h: 0.6 * x, beta1: x, beta2: 2.0 * x, beta_c: 2.8 * x };
    Machine::engine(spec, GevaKosloff { a: 1.0, q: -0.05 }, RegeneratorModel::LinearEngine { gamma1: 1.4, gamma2: 0.6 })
}

pub fn fridge(stat: Statistics, x: f64) -> Machine {
    let spec =
        FridgeSpec { stat, omega1: 1.0, omega2: 2.0, beta1p: x, beta_h: 1.4 * x, beta_c: 1.8 * x, beta2p: 3.0 * x };
    Machine::fridge(spec, GevaKosloff { a: 1.0, q: -0.05 }, RegeneratorModel::LinearFridge { b: 1.4, bp: 0.6 })
}
