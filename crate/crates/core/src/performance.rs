//! Power, cooling rate, entropy production and efficiency-at-maximum-power
//! sweeps, combining the cycle ledgers with the stroke timings.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cycle::{
    engine_ledger, engine_status, fridge_ledger, fridge_status, EngineSpec, FridgeSpec, Status, StrokeLedger,
};
use crate::error::{Error, Result};
use crate::numeric::relative_deviation;
use crate::quadrature::QuadratureConfig;
use crate::relaxation::GevaKosloff;
use crate::statistics::Statistics;
use crate::timing::{
    closed_form_strokes, engine_cycle_time, fridge_cycle_time, x_range, ClosedForm, CycleSpec, RegeneratorModel,
    Regime, RegimeWindow, TimingReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    LowTemp,
    HighTemp,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "low" | "low_temp" | "low-temp" => Ok(Mode::LowTemp),
            "high" | "high_temp" | "high-temp" => Ok(Mode::HighTemp),
            other => Err(Error::Argument(format!("unknown regime mode '{other}', expected exact, low or high"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeTag {
    Exact,
    LowTempClosedForm,
    HighTempClosedForm,
}

impl RegimeTag {
    pub fn label(self) -> &'static str {
        match self {
            RegimeTag::Exact => "exact",
            RegimeTag::LowTempClosedForm => "low_temp_closed_form",
            RegimeTag::HighTempClosedForm => "high_temp_closed_form",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MachineKind {
    Engine,
    Fridge,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct Numerics {
    pub quadrature: QuadratureConfig,
    pub window: RegimeWindow,
}

/// Everything needed to evaluate one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Machine {
    pub spec: CycleSpec,
    pub model: GevaKosloff,
    pub regen: RegeneratorModel,
}

impl Machine {
    pub fn engine(spec: EngineSpec, model: GevaKosloff, regen: RegeneratorModel) -> Self {
        Self { spec: spec.into(), model, regen }
    }

    pub fn fridge(spec: FridgeSpec, model: GevaKosloff, regen: RegeneratorModel) -> Self {
        Self { spec: spec.into(), model, regen }
    }

    pub fn kind(&self) -> MachineKind {
        match self.spec {
            CycleSpec::Engine(_) => MachineKind::Engine,
            CycleSpec::Fridge(_) => MachineKind::Fridge,
        }
    }

    pub fn stat(&self) -> Statistics {
        self.spec.stat()
    }

    pub fn with_statistics(mut self, stat: Statistics) -> Self {
        self.spec = match self.spec {
            CycleSpec::Engine(s) => CycleSpec::Engine(s.with_statistics(stat)),
            CycleSpec::Fridge(s) => CycleSpec::Fridge(s.with_statistics(stat)),
        };
        self
    }

    pub fn x_range(&self) -> (f64, f64) {
        x_range(&self.spec, &self.regen)
    }

    pub fn evaluate(&self, numerics: &Numerics, mode: Mode) -> Result<PerformanceReport> {
        match self.spec {
            CycleSpec::Engine(s) => engine_performance(&s, &self.model, &self.regen, numerics, mode),
            CycleSpec::Fridge(s) => fridge_performance(&s, &self.model, &self.regen, numerics, mode),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceReport {
    pub kind: MachineKind,
    pub regime_tag: RegimeTag,
    pub status: Status,
    pub ledger: StrokeLedger,
    /// Efficiency `-W / Q_h` for an engine, coefficient of performance
    /// `Q_c / |W|` for a refrigerator.
    pub efficiency: f64,
    /// `|W| / tau`: power output (engine) or input (refrigerator).
    pub power: f64,
    /// `Q_c / tau`, refrigerator only.
    pub cooling_rate: Option<f64>,
    /// `-(beta_h Q_h + beta_c Q_c) / tau`.
    pub entropy_rate: f64,
    pub timing: TimingReport,
    pub x_min: f64,
    pub x_max: f64,
    /// Regime the parameters actually fall in, independent of the mode used.
    pub regime: Regime,
}

impl PerformanceReport {
    pub fn tau(&self) -> f64 {
        self.timing.tau
    }

    /// Report for `n` independent oscillators: heats, work and rates scale,
    /// efficiencies and times do not.
    pub fn for_particles(&self, n: u64) -> Self {
        let f = n as f64;
        Self {
            ledger: self.ledger.scaled(f),
            power: self.power * f,
            cooling_rate: self.cooling_rate.map(|r| r * f),
            entropy_rate: self.entropy_rate * f,
            ..self.clone()
        }
    }
}

/// `(omega_f + T) e^{-omega_f/T} - (omega_i + T) e^{-omega_i/T}`: the
/// isothermal heat with only the leading Boltzmann factor kept, identical
/// for both statistics.
fn low_isothermal_heat(temperature: f64, omega_i: f64, omega_f: f64) -> f64 {
    (omega_f + temperature) * (-omega_f / temperature).exp() - (omega_i + temperature) * (-omega_i / temperature).exp()
}

fn low_isochoric_heat(omega: f64, beta_i: f64, beta_f: f64) -> f64 {
    omega * ((-beta_f * omega).exp() - (-beta_i * omega).exp())
}

/// Work-generating part of a low-temperature isotherm.
fn low_isothermal_log_term(temperature: f64, omega_i: f64, omega_f: f64) -> f64 {
    temperature * ((-omega_f / temperature).exp() - (-omega_i / temperature).exp())
}

fn engine_low_ledger(s: &EngineSpec) -> StrokeLedger {
    let (t1, t2) = (1.0 / s.beta1, 1.0 / s.beta2);
    let q_ab = low_isothermal_heat(t1, s.omega2, s.omega1);
    let q_bc = low_isochoric_heat(s.omega1, s.beta1, s.beta2);
    let q_cd = low_isothermal_heat(t2, s.omega1, s.omega2);
    let q_da = low_isochoric_heat(s.omega2, s.beta2, s.beta1);
    let output = low_isothermal_log_term(t1, s.omega2, s.omega1) + low_isothermal_log_term(t2, s.omega1, s.omega2);
    // the closed forms keep the whole regenerator imbalance on the cold side
    StrokeLedger::engine_with(0, q_ab, q_bc, q_cd, q_da, -output)
}

fn fridge_low_ledger(s: &FridgeSpec) -> StrokeLedger {
    let (t1, t2) = (1.0 / s.beta1p, 1.0 / s.beta2p);
    let q_ba = low_isothermal_heat(t1, s.omega1, s.omega2);
    let q_cb = low_isochoric_heat(s.omega1, s.beta2p, s.beta1p);
    let q_dc = low_isothermal_heat(t2, s.omega2, s.omega1);
    let q_ad = low_isochoric_heat(s.omega2, s.beta1p, s.beta2p);
    let input = -(low_isothermal_log_term(t1, s.omega1, s.omega2) + low_isothermal_log_term(t2, s.omega2, s.omega1));
    StrokeLedger::fridge_with(0, q_ba, q_cb, q_dc, q_ad, input)
}

fn engine_high_ledger(s: &EngineSpec) -> StrokeLedger {
    let EngineSpec { omega1, omega2, beta1, beta2, .. } = *s;
    match s.stat {
        Statistics::Bosonic => {
            let log_ratio = (omega2 / omega1).ln();
            let cooling = 1.0 / beta1 - 1.0 / beta2;
            StrokeLedger::engine(log_ratio / beta1, -cooling, -log_ratio / beta2, cooling, -cooling * log_ratio)
        }
        Statistics::Fermionic => {
            let spread = omega2 * omega2 - omega1 * omega1;
            let gap = beta2 - beta1;
            StrokeLedger::engine(
                beta1 * spread / 8.0,
                -gap * omega1 * omega1 / 4.0,
                -beta2 * spread / 8.0,
                gap * omega2 * omega2 / 4.0,
                -gap * spread / 8.0,
            )
        }
    }
}

fn entropy_rate(beta_h: f64, beta_c: f64, ledger: &StrokeLedger, tau: f64) -> f64 {
    -(beta_h * ledger.q_h + beta_c * ledger.q_c) / tau
}

pub fn engine_performance(
    spec: &EngineSpec,
    model: &GevaKosloff,
    regen: &RegeneratorModel,
    numerics: &Numerics,
    mode: Mode,
) -> Result<PerformanceReport> {
    spec.validate()?;
    regen.validate()?;
    numerics.window.validate()?;
    let cycle: CycleSpec = (*spec).into();
    let (ledger, timing, regime_tag) = match mode {
        Mode::Exact => (
            engine_ledger(spec)?.ledger,
            engine_cycle_time(spec, model, regen, &numerics.quadrature)?,
            RegimeTag::Exact,
        ),
        Mode::LowTemp => (
            engine_low_ledger(spec),
            closed_form_strokes(ClosedForm::EngineLow, &cycle, model, regen)?,
            RegimeTag::LowTempClosedForm,
        ),
        Mode::HighTemp => {
            let kind = match spec.stat {
                Statistics::Bosonic => ClosedForm::EngineHighBosonic,
                Statistics::Fermionic => ClosedForm::EngineHighFermionic,
            };
            (engine_high_ledger(spec), closed_form_strokes(kind, &cycle, model, regen)?, RegimeTag::HighTempClosedForm)
        }
    };
    let (x_min, x_max) = x_range(&cycle, regen);
    let tau = timing.tau;
    Ok(PerformanceReport {
        kind: MachineKind::Engine,
        regime_tag,
        status: engine_status(ledger.q_h, ledger.work),
        efficiency: -ledger.work / ledger.q_h,
        power: ledger.work.abs() / tau,
        cooling_rate: None,
        entropy_rate: entropy_rate(spec.beta_h, spec.beta_c, &ledger, tau),
        ledger,
        timing,
        x_min,
        x_max,
        regime: numerics.window.classify(x_min, x_max),
    })
}

pub fn fridge_performance(
    spec: &FridgeSpec,
    model: &GevaKosloff,
    regen: &RegeneratorModel,
    numerics: &Numerics,
    mode: Mode,
) -> Result<PerformanceReport> {
    spec.validate()?;
    regen.validate()?;
    numerics.window.validate()?;
    let cycle: CycleSpec = (*spec).into();
    let (ledger, timing, regime_tag) = match mode {
        Mode::Exact => (
            fridge_ledger(spec)?.ledger,
            fridge_cycle_time(spec, model, regen, &numerics.quadrature)?,
            RegimeTag::Exact,
        ),
        Mode::LowTemp => (
            fridge_low_ledger(spec),
            closed_form_strokes(ClosedForm::FridgeLow, &cycle, model, regen)?,
            RegimeTag::LowTempClosedForm,
        ),
        Mode::HighTemp => {
            return Err(Error::Unsupported("high-temperature closed forms for the refrigerator".into()));
        }
    };
    let (x_min, x_max) = x_range(&cycle, regen);
    let tau = timing.tau;
    Ok(PerformanceReport {
        kind: MachineKind::Fridge,
        regime_tag,
        status: fridge_status(ledger.q_c, ledger.work),
        efficiency: ledger.q_c / ledger.work.abs(),
        power: ledger.work.abs() / tau,
        cooling_rate: Some(ledger.q_c / tau),
        entropy_rate: entropy_rate(spec.beta_h, spec.beta_c, &ledger, tau),
        ledger,
        timing,
        x_min,
        x_max,
        regime: numerics.window.classify(x_min, x_max),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deviation {
    pub quantity: &'static str,
    pub bosonic: f64,
    pub fermionic: f64,
    /// `|fermionic - bosonic| / |bosonic|`.
    pub relative: f64,
    pub within_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub kind: MachineKind,
    pub x_min: f64,
    /// `2 e^{-x_min}`.
    pub bound: f64,
    pub deviations: Vec<Deviation>,
}

impl EquivalenceReport {
    pub fn all_within_bound(&self) -> bool {
        self.deviations.iter().all(|d| d.within_bound)
    }

    pub fn max_relative(&self) -> f64 {
        self.deviations.iter().map(|d| d.relative).fold(0.0, f64::max)
    }

    pub fn get(&self, quantity: &str) -> Option<&Deviation> {
        self.deviations.iter().find(|d| d.quantity == quantity)
    }
}

fn report_quantities(r: &PerformanceReport) -> Vec<(&'static str, f64)> {
    let mut v = vec![
        ("Q_h", r.ledger.q_h),
        ("Q_c", r.ledger.q_c),
        ("W_tot", r.ledger.work),
        (if r.kind == MachineKind::Engine { "eta" } else { "epsilon" }, r.efficiency),
        ("P", r.power),
    ];
    if let Some(rate) = r.cooling_rate {
        v.push(("R", rate));
    }
    v.extend([("sigma", r.entropy_rate), ("tau", r.timing.tau)]);
    v
}

/// Compares the exact pipelines of two machines that differ only in the
/// statistics of the working medium. `first` is treated as the reference.
pub fn equivalence_report(first: &Machine, second: &Machine, numerics: &Numerics) -> Result<EquivalenceReport> {
    if first.with_statistics(second.stat()) != *second {
        return Err(Error::Argument("equivalence report needs machines that differ only in statistics".into()));
    }
    let (x_min, _) = first.x_range();
    let bound = 2.0 * (-x_min).exp();
    let a = first.evaluate(numerics, Mode::Exact)?;
    let b = second.evaluate(numerics, Mode::Exact)?;
    let deviations = report_quantities(&a)
        .into_iter()
        .zip(report_quantities(&b))
        .map(|((quantity, x), (_, y))| {
            let relative = relative_deviation(x, y);
            Deviation { quantity, bosonic: x, fermionic: y, relative, within_bound: relative <= bound }
        })
        .collect();
    let mut report = EquivalenceReport { kind: first.kind(), x_min, bound, deviations };
    if first.stat() == Statistics::Fermionic && second.stat() == Statistics::Bosonic {
        for d in &mut report.deviations {
            std::mem::swap(&mut d.bosonic, &mut d.fermionic);
        }
    }
    Ok(report)
}

/// Engine family parametrised by `x = beta1 * omega1`, with `omega1 = 1`
/// and every other inverse temperature and frequency held in fixed ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepTemplate {
    pub stat: Statistics,
    pub omega_ratio: f64,
    pub beta_ratio: f64,
    pub alpha_h: f64,
    pub alpha_c: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub model: GevaKosloff,
}

impl SweepTemplate {
    pub fn machine_at(&self, x: f64) -> Result<Machine> {
        let beta2 = self.beta_ratio * x;
        let spec = EngineSpec {
            stat: self.stat,
            omega1: 1.0,
            omega2: self.omega_ratio,
            beta_h: self.alpha_h * x,
            beta1: x,
            beta2,
            beta_c: self.alpha_c * beta2,
        };
        spec.validate()?;
        Ok(Machine::engine(spec, self.model, RegeneratorModel::engine(self.gamma1, self.gamma2)?))
    }

    /// `1 - sqrt(beta_h / beta_c)`, independent of `x`.
    pub fn ca_bound(&self) -> f64 {
        1.0 - (self.alpha_h / (self.alpha_c * self.beta_ratio)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub x: f64,
    pub eta: f64,
    /// `P / (a T1)`.
    pub p_star: f64,
    pub ca_bound: f64,
    /// `1 / (1 + x)`.
    pub ref_curve: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub x_star: f64,
    pub eta_star: f64,
    pub p_star_max: f64,
    pub ca_bound: f64,
    pub ref_at_x_star: f64,
    pub eta_below_ref: bool,
    pub eta_below_ca: bool,
    /// The grid maximum is not at either end of the grid.
    pub interior_maximum: bool,
    /// `p_star` strictly increases up to the grid maximum and strictly
    /// decreases after it.
    pub unimodal: bool,
    pub eta_decreasing: bool,
    /// Grid index of the maximum before refinement.
    pub grid_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub records: Vec<SweepRecord>,
    pub summary: SweepSummary,
}

pub fn sweep_point(template: &SweepTemplate, x: f64) -> Result<SweepRecord> {
    let machine = template.machine_at(x)?;
    let CycleSpec::Engine(spec) = machine.spec else { unreachable!("sweep machines are engines") };
    let report = engine_performance(&spec, &machine.model, &machine.regen, &Numerics::default(), Mode::LowTemp)?;
    Ok(SweepRecord {
        x,
        eta: report.efficiency,
        p_star: report.power * x / template.model.a,
        ca_bound: template.ca_bound(),
        ref_curve: 1.0 / (1.0 + x),
    })
}

/// Low-temperature closed-form sweep of efficiency and dimensionless power
/// over a strictly increasing grid of `x`, evaluated in parallel.
pub fn power_sweep(template: &SweepTemplate, grid: &[f64]) -> Result<Sweep> {
    if grid.is_empty() {
        return Err(Error::Argument("power sweep grid is empty".into()));
    }
    if let Some(bad) = grid.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(Error::Argument(format!("sweep points must be positive and finite, got {bad}")));
    }
    if let Some(w) = grid.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(Error::Argument(format!("sweep grid must be strictly increasing ({} then {})", w[0], w[1])));
    }
    let records = grid.par_iter().map(|&x| sweep_point(template, x)).collect::<Result<Vec<_>>>()?;

    let mut best = 0;
    for (i, r) in records.iter().enumerate() {
        if r.p_star > records[best].p_star {
            best = i;
        }
    }
    let mut peak = records[best];
    // one bisection pass on each side of the grid maximum
    let mut candidates = Vec::with_capacity(2);
    if best > 0 {
        candidates.push(0.5 * (records[best - 1].x + peak.x));
    }
    if best + 1 < records.len() {
        candidates.push(0.5 * (peak.x + records[best + 1].x));
    }
    for x in candidates {
        let r = sweep_point(template, x)?;
        if r.p_star > peak.p_star || (r.p_star == peak.p_star && r.x < peak.x) {
            peak = r;
        }
    }

    let unimodal = records[..=best].windows(2).all(|w| w[0].p_star < w[1].p_star)
        && records[best..].windows(2).all(|w| w[0].p_star > w[1].p_star);
    let summary = SweepSummary {
        x_star: peak.x,
        eta_star: peak.eta,
        p_star_max: peak.p_star,
        ca_bound: template.ca_bound(),
        ref_at_x_star: peak.ref_curve,
        eta_below_ref: peak.eta < peak.ref_curve,
        eta_below_ca: peak.eta < template.ca_bound(),
        interior_maximum: best > 0 && best + 1 < records.len(),
        unimodal,
        eta_decreasing: records.windows(2).all(|w| w[1].eta < w[0].eta),
        grid_index: best,
    };
    Ok(Sweep { records, summary })
}

/// Reference parameter set for the efficiency and power sweep.
pub fn reference_sweep_template(stat: Statistics) -> SweepTemplate {
    SweepTemplate {
        stat,
        omega_ratio: 2.0,
        beta_ratio: 2.0,
        alpha_h: 0.6,
        alpha_c: 1.4,
        gamma1: 1.4,
        gamma2: 0.6,
        model: GevaKosloff { a: 1.0, q: -0.05 },
    }
}
