//! Quasistatic heat and work bookkeeping for the regenerative Stirling
//! engine and refrigerator.
//!
//! Engine states: `A = (omega2, T1)`, `B = (omega1, T1)`, `C = (omega1, T2)`,
//! `D = (omega2, T2)`, traversed A→B→C→D→A. The hot isotherm A→B lowers the
//! frequency so the population rises and heat is absorbed.
//!
//! Refrigerator states: `B = (omega1, T'1)`, `A = (omega2, T'1)`,
//! `D = (omega2, T'2)`, `C = (omega1, T'2)`, traversed B→A→D→C→B.
//!
//! All quantities are per oscillator; heat is positive when it enters the
//! working medium and `work` is the work done on the medium.

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::statistics::Statistics;

/// Heat absorbed along an isotherm at `temperature` while the frequency
/// moves from `omega_i` to `omega_f`.
pub fn isothermal_heat(stat: Statistics, temperature: f64, omega_i: f64, omega_f: f64) -> Result<f64> {
    require_positive("temperature", temperature)?;
    require_positive("omega_i", omega_i)?;
    require_positive("omega_f", omega_f)?;
    let (xi, xf) = (omega_i / temperature, omega_f / temperature);
    let energy_term = omega_f * stat.occupation(xf) - omega_i * stat.occupation(xi);
    Ok(energy_term + isothermal_log_term(stat, temperature, omega_i, omega_f))
}

/// The `±T ln[(1 ± e^{-x_f}) / (1 ± e^{-x_i})]` part of the isothermal heat.
/// Around a closed cycle the `omega n` parts cancel and only these remain.
fn isothermal_log_term(stat: Statistics, temperature: f64, omega_i: f64, omega_f: f64) -> f64 {
    let delta = stat.log_partition(omega_f / temperature) - stat.log_partition(omega_i / temperature);
    match stat {
        Statistics::Bosonic => -temperature * delta,
        Statistics::Fermionic => temperature * delta,
    }
}

/// Heat absorbed at fixed frequency while the temperature moves from
/// `t_i` to `t_f`.
pub fn isochoric_heat(stat: Statistics, omega: f64, t_i: f64, t_f: f64) -> Result<f64> {
    require_positive("omega", omega)?;
    require_positive("t_i", t_i)?;
    require_positive("t_f", t_f)?;
    Ok(omega * (stat.occupation(omega / t_f) - stat.occupation(omega / t_i)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineSpec {
    pub stat: Statistics,
    pub omega1: f64,
    pub omega2: f64,
    pub beta_h: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta_c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FridgeSpec {
    pub stat: Statistics,
    pub omega1: f64,
    pub omega2: f64,
    pub beta1p: f64,
    pub beta_h: f64,
    pub beta_c: f64,
    pub beta2p: f64,
}

fn check_positive(values: &[(&'static str, f64)]) -> Result<()> {
    for &(name, v) in values {
        require_positive(name, v)?;
    }
    Ok(())
}

fn check_chain(links: &[(&'static str, f64, f64)]) -> Result<()> {
    let violated: Vec<&'static str> = links.iter().filter(|(_, lo, hi)| !(lo < hi)).map(|(name, _, _)| *name).collect();
    if violated.is_empty() {
        Ok(())
    } else {
        Err(Error::Ordering(violated))
    }
}

impl EngineSpec {
    pub fn validate(&self) -> Result<()> {
        check_positive(&[
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("beta_h", self.beta_h),
            ("beta1", self.beta1),
            ("beta2", self.beta2),
            ("beta_c", self.beta_c),
        ])?;
        check_chain(&[
            ("omega1 < omega2", self.omega1, self.omega2),
            ("beta_h < beta1", self.beta_h, self.beta1),
            ("beta1 < beta2", self.beta1, self.beta2),
            ("beta2 < beta_c", self.beta2, self.beta_c),
        ])
    }

    pub fn with_statistics(mut self, stat: Statistics) -> Self {
        self.stat = stat;
        self
    }

    /// Bath inverse temperatures of the hot and cold reservoirs.
    pub fn baths(&self) -> (f64, f64) {
        (self.beta_h, self.beta_c)
    }
}

impl FridgeSpec {
    pub fn validate(&self) -> Result<()> {
        check_positive(&[
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("beta1p", self.beta1p),
            ("beta_h", self.beta_h),
            ("beta_c", self.beta_c),
            ("beta2p", self.beta2p),
        ])?;
        check_chain(&[
            ("omega1 < omega2", self.omega1, self.omega2),
            ("beta1p < beta_h", self.beta1p, self.beta_h),
            ("beta_h < beta_c", self.beta_h, self.beta_c),
            ("beta_c < beta2p", self.beta_c, self.beta2p),
        ])
    }

    pub fn with_statistics(mut self, stat: Statistics) -> Self {
        self.stat = stat;
        self
    }

    pub fn baths(&self) -> (f64, f64) {
        (self.beta_h, self.beta_c)
    }
}

/// Per-stroke heats plus regenerator accounting.
///
/// `delta` is 1 when the regenerator imbalance is compensated by the bath
/// on the opposite side of the default (hot bath for an engine with
/// `delta_q > 0`, cold bath for a refrigerator with `delta_q < 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrokeLedger {
    /// Isotherm in contact with the hot bath (engine A→B, fridge B→A).
    pub q_iso_hot: f64,
    /// Isotherm in contact with the cold bath (engine C→D, fridge D→C).
    pub q_iso_cold: f64,
    /// Isochore at `omega1` (engine B→C, fridge C→B).
    pub q_isochore_low: f64,
    /// Isochore at `omega2` (engine D→A, fridge A→D).
    pub q_isochore_high: f64,
    pub delta_q: f64,
    pub delta: u8,
    /// Heat entering the medium from the hot bath per cycle.
    pub q_h: f64,
    /// Heat entering the medium from the cold bath per cycle.
    pub q_c: f64,
    /// Work done on the medium per cycle (negative for an engine).
    pub work: f64,
}

impl StrokeLedger {
    /// Applies the engine regenerator rule: an excess `delta_q > 0` is drawn
    /// from the hot bath, otherwise the surplus goes to the cold bath.
    pub fn engine(q_iso_hot: f64, q_isochore_low: f64, q_iso_cold: f64, q_isochore_high: f64, work: f64) -> Self {
        let delta = u8::from(q_isochore_low + q_isochore_high > 0.0);
        Self::engine_with(delta, q_iso_hot, q_isochore_low, q_iso_cold, q_isochore_high, work)
    }

    /// Engine bookkeeping with the regenerator switch forced to `delta`.
    pub(crate) fn engine_with(
        delta: u8,
        q_iso_hot: f64,
        q_isochore_low: f64,
        q_iso_cold: f64,
        q_isochore_high: f64,
        work: f64,
    ) -> Self {
        let delta_q = q_isochore_low + q_isochore_high;
        let (q_h, q_c) = if delta == 1 { (q_iso_hot + delta_q, q_iso_cold) } else { (q_iso_hot, q_iso_cold + delta_q) };
        Self { q_iso_hot, q_iso_cold, q_isochore_low, q_isochore_high, delta_q, delta, q_h, q_c, work }
    }

    /// Refrigerator rule: a deficit `delta_q < 0` reduces the heat drawn from
    /// the cold bath, a surplus reduces the heat rejected to the hot bath.
    pub fn fridge(q_iso_hot: f64, q_isochore_low: f64, q_iso_cold: f64, q_isochore_high: f64, work: f64) -> Self {
        let delta = u8::from(q_isochore_low + q_isochore_high < 0.0);
        Self::fridge_with(delta, q_iso_hot, q_isochore_low, q_iso_cold, q_isochore_high, work)
    }

    pub(crate) fn fridge_with(
        delta: u8,
        q_iso_hot: f64,
        q_isochore_low: f64,
        q_iso_cold: f64,
        q_isochore_high: f64,
        work: f64,
    ) -> Self {
        let delta_q = q_isochore_low + q_isochore_high;
        let (q_h, q_c) =
            if delta == 1 { (q_iso_hot, q_iso_cold - delta_q.abs()) } else { (q_iso_hot + delta_q, q_iso_cold) };
        Self { q_iso_hot, q_iso_cold, q_isochore_low, q_isochore_high, delta_q, delta, q_h, q_c, work }
    }

    pub fn stroke_sum(&self) -> f64 {
        self.q_iso_hot + self.q_isochore_low + self.q_iso_cold + self.q_isochore_high
    }

    /// `|sum of stroke heats + work|` relative to the largest stroke heat.
    pub fn closure_defect(&self) -> f64 {
        let scale = [self.q_iso_hot, self.q_isochore_low, self.q_iso_cold, self.q_isochore_high, self.work]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            0.0
        } else {
            (self.stroke_sum() + self.work).abs() / scale
        }
    }

    pub(crate) fn scaled(&self, factor: f64) -> Self {
        Self {
            q_iso_hot: self.q_iso_hot * factor,
            q_iso_cold: self.q_iso_cold * factor,
            q_isochore_low: self.q_isochore_low * factor,
            q_isochore_high: self.q_isochore_high * factor,
            delta_q: self.delta_q * factor,
            delta: self.delta,
            q_h: self.q_h * factor,
            q_c: self.q_c * factor,
            work: self.work * factor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum Status {
    Operational,
    NotAnEngine(String),
    NotARefrigerator(String),
}

impl Status {
    pub fn is_operational(&self) -> bool {
        matches!(self, Status::Operational)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Status::Operational => "ok",
            Status::NotAnEngine(_) => "not_an_engine",
            Status::NotARefrigerator(_) => "not_a_refrigerator",
        }
    }
}

pub(crate) fn engine_status(q_h: f64, work: f64) -> Status {
    if !(q_h > 0.0) {
        Status::NotAnEngine(format!("heat drawn from the hot bath is {q_h:e} (must be positive)"))
    } else if !(work < 0.0) {
        Status::NotAnEngine(format!("net work output is {:e} (must be positive)", -work))
    } else {
        Status::Operational
    }
}

pub(crate) fn fridge_status(q_c: f64, work: f64) -> Status {
    if !(q_c > 0.0) {
        Status::NotARefrigerator(format!("heat extracted from the cold bath is {q_c:e} (must be positive)"))
    } else if !(work > 0.0) {
        Status::NotARefrigerator(format!("work input is {work:e} (must be positive)"))
    } else {
        Status::Operational
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineCycle {
    pub ledger: StrokeLedger,
    /// `-W / Q_h`.
    pub efficiency: f64,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FridgeCycle {
    pub ledger: StrokeLedger,
    /// `Q_c / |W|`.
    pub cop: f64,
    pub status: Status,
}

/// Exact quasistatic heats, work and efficiency of the engine cycle.
pub fn engine_ledger(spec: &EngineSpec) -> Result<EngineCycle> {
    spec.validate()?;
    Ok(engine_ledger_unchecked(spec))
}

pub(crate) fn engine_ledger_unchecked(spec: &EngineSpec) -> EngineCycle {
    let EngineSpec { stat, omega1, omega2, beta1, beta2, .. } = *spec;
    let (t1, t2) = (1.0 / beta1, 1.0 / beta2);
    let n = |omega: f64, t: f64| stat.occupation(omega / t);
    // A→B at T1, omega2 → omega1
    let q_ab = omega1 * n(omega1, t1) - omega2 * n(omega2, t1) + isothermal_log_term(stat, t1, omega2, omega1);
    // C→D at T2, omega1 → omega2
    let q_cd = omega2 * n(omega2, t2) - omega1 * n(omega1, t2) + isothermal_log_term(stat, t2, omega1, omega2);
    let q_bc = omega1 * (n(omega1, t2) - n(omega1, t1));
    let q_da = omega2 * (n(omega2, t1) - n(omega2, t2));
    let output = isothermal_log_term(stat, t1, omega2, omega1) + isothermal_log_term(stat, t2, omega1, omega2);
    let ledger = StrokeLedger::engine(q_ab, q_bc, q_cd, q_da, -output);
    EngineCycle { efficiency: output / ledger.q_h, status: engine_status(ledger.q_h, ledger.work), ledger }
}

/// Exact quasistatic heats, work and coefficient of performance of the
/// refrigerator cycle.
pub fn fridge_ledger(spec: &FridgeSpec) -> Result<FridgeCycle> {
    spec.validate()?;
    Ok(fridge_ledger_unchecked(spec))
}

pub(crate) fn fridge_ledger_unchecked(spec: &FridgeSpec) -> FridgeCycle {
    let FridgeSpec { stat, omega1, omega2, beta1p, beta2p, .. } = *spec;
    let (t1, t2) = (1.0 / beta1p, 1.0 / beta2p);
    let n = |omega: f64, t: f64| stat.occupation(omega / t);
    // B→A at T'1, omega1 → omega2
    let q_ba = omega2 * n(omega2, t1) - omega1 * n(omega1, t1) + isothermal_log_term(stat, t1, omega1, omega2);
    // D→C at T'2, omega2 → omega1
    let q_dc = omega1 * n(omega1, t2) - omega2 * n(omega2, t2) + isothermal_log_term(stat, t2, omega2, omega1);
    let q_cb = omega1 * (n(omega1, t1) - n(omega1, t2));
    let q_ad = omega2 * (n(omega2, t2) - n(omega2, t1));
    let input = -(isothermal_log_term(stat, t1, omega1, omega2) + isothermal_log_term(stat, t2, omega2, omega1));
    let ledger = StrokeLedger::fridge(q_ba, q_cb, q_dc, q_ad, input);
    FridgeCycle { cop: ledger.q_c / ledger.work.abs(), status: fridge_status(ledger.q_c, ledger.work), ledger }
}
