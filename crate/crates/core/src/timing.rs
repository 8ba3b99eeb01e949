//! Finite-time stroke durations.
//!
//! Each stroke keeps the medium at an internal temperature `beta_s` while it
//! exchanges heat with a bath at `beta`. Inverting the population rate
//! equation gives `dt = C dv / D` with
//!
//! `D = e^{q beta omega} (e^{beta omega} - e^{beta_s omega}) (1 ± e^{-beta_s omega})`
//!
//! where `v` is `omega` (prefactor `C = beta_s / 2a`) on an isotherm and
//! `beta_s` (prefactor `C = omega / 2a`) on an isochore. Integrals run in
//! the physical direction of the stroke so a consistent stroke has `t > 0`.

use serde::{Deserialize, Serialize};

use crate::cycle::{EngineSpec, FridgeSpec};
use crate::error::{require_positive, Error, Result};
use crate::quadrature::{integrate, Estimate, QuadratureConfig};
use crate::relaxation::GevaKosloff;
use crate::statistics::Statistics;

/// Linear regenerator: the bath seen on an isochore sits at `c * beta_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegeneratorModel {
    /// `gamma1` on the `omega1` isochore (B→C), `gamma2` on the `omega2`
    /// isochore (D→A).
    LinearEngine { gamma1: f64, gamma2: f64 },
    /// `b` on the `omega2` isochore (A→D), `bp` on the `omega1` isochore
    /// (C→B).
    LinearFridge { b: f64, bp: f64 },
}

impl RegeneratorModel {
    pub fn engine(gamma1: f64, gamma2: f64) -> Result<Self> {
        let m = RegeneratorModel::LinearEngine { gamma1, gamma2 };
        m.validate()?;
        Ok(m)
    }

    pub fn fridge(b: f64, bp: f64) -> Result<Self> {
        let m = RegeneratorModel::LinearFridge { b, bp };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            RegeneratorModel::LinearEngine { gamma1, gamma2 } => {
                if !(gamma1.is_finite() && gamma1 > 1.0) {
                    return Err(Error::Parameter(format!("gamma1 must exceed 1, got {gamma1}")));
                }
                if !(gamma2 > 0.0 && gamma2 < 1.0) {
                    return Err(Error::Parameter(format!("gamma2 must lie in (0, 1), got {gamma2}")));
                }
            }
            RegeneratorModel::LinearFridge { b, bp } => {
                require_positive("b", b).map_err(|e| Error::Parameter(e.to_string()))?;
                require_positive("bp", bp).map_err(|e| Error::Parameter(e.to_string()))?;
            }
        }
        Ok(())
    }

    fn engine_factors(&self) -> Result<(f64, f64)> {
        match *self {
            RegeneratorModel::LinearEngine { gamma1, gamma2 } => Ok((gamma1, gamma2)),
            _ => Err(Error::Argument("engine timing needs an engine regenerator (gamma1, gamma2)".into())),
        }
    }

    fn fridge_factors(&self) -> Result<(f64, f64)> {
        match *self {
            RegeneratorModel::LinearFridge { b, bp } => Ok((b, bp)),
            _ => Err(Error::Argument("refrigerator timing needs a refrigerator regenerator (b, bp)".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrokeTime {
    pub duration: f64,
    /// Estimated absolute quadrature error; zero for closed forms.
    pub error: f64,
}

/// Stroke times in cycle order (engine A→B, B→C, C→D, D→A; refrigerator
/// D→C, C→B, B→A, A→D).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub t1: StrokeTime,
    pub t2: StrokeTime,
    pub t3: StrokeTime,
    pub t4: StrokeTime,
    pub tau: f64,
}

impl TimingReport {
    fn from_strokes(t: [StrokeTime; 4]) -> Self {
        Self { t1: t[0], t2: t[1], t3: t[2], t4: t[3], tau: t.iter().map(|s| s.duration).sum() }
    }

    pub fn strokes(&self) -> [StrokeTime; 4] {
        [self.t1, self.t2, self.t3, self.t4]
    }
}

/// `ln |1/D|` and the sign of `1/D`, computed without forming `e^{beta omega}`.
fn log_inverse_denominator(stat: Statistics, q: f64, beta: f64, beta_s: f64, omega: f64) -> (f64, f64) {
    let gap = (beta - beta_s) * omega;
    let top = beta.max(beta_s) * omega;
    let magnitude =
        -q * beta * omega - top - (-(-gap.abs()).exp_m1()).ln() - stat.occupation_factor(beta_s * omega).ln();
    (magnitude, gap.signum())
}

/// Integrates `prefactor(v) / D(v)` from `from` to `to`, with the integrand
/// rescaled by its largest endpoint magnitude so tolerances are relative to
/// the size of the stroke time rather than absolute.
fn stroke_integral<P, B>(
    stat: Statistics,
    model: &GevaKosloff,
    from: f64,
    to: f64,
    cfg: &QuadratureConfig,
    point: P,
    prefactor: B,
) -> Result<StrokeTime>
where
    P: Fn(f64) -> (f64, f64, f64),
    B: Fn(f64) -> f64,
{
    cfg.validate()?;
    if from == to {
        return Ok(StrokeTime { duration: 0.0, error: 0.0 });
    }
    let log_at = |v: f64| {
        let (beta, beta_s, omega) = point(v);
        log_inverse_denominator(stat, model.q, beta, beta_s, omega)
    };
    let (lo, hi) = (from.min(to), from.max(to));
    let (l_lo, s_lo) = log_at(lo);
    let (l_hi, _) = log_at(hi);
    let scale = l_lo.max(l_hi);
    if !scale.is_finite() {
        return Err(Error::Singular(format!("stroke integrand is not finite at its endpoints [{lo}, {hi}]")));
    }
    let f = |v: f64| {
        let (l, s) = log_at(v);
        s * prefactor(v) * (l - scale).exp()
    };
    let orientation = if to > from { 1.0 } else { -1.0 };
    let factor = orientation * scale.exp() / (2.0 * model.a);
    let Estimate { value, error, .. } = integrate(f, lo, hi, cfg).map_err(|e| match e {
        Error::Convergence { partial, error, subdivisions } => {
            Error::Convergence { partial: partial * factor, error: error * factor.abs(), subdivisions }
        }
        other => other,
    })?;
    let duration = value * factor;
    if !duration.is_finite() {
        return Err(Error::Singular(format!("stroke time overflowed (log scale {scale})")));
    }
    if !(duration > 0.0) {
        return Err(Error::HeatFlow(format!(
            "stroke time evaluates to {duration:e}; the bath at this side of the stroke drives heat the wrong way (sign {s_lo})"
        )));
    }
    Ok(StrokeTime { duration, error: error * factor.abs() })
}

/// Time to move the frequency from `omega_i` to `omega_f` at fixed system
/// inverse temperature `beta_s` in contact with a bath at `beta`.
pub fn isothermal_time(
    stat: Statistics,
    model: &GevaKosloff,
    beta: f64,
    beta_s: f64,
    omega_i: f64,
    omega_f: f64,
    cfg: &QuadratureConfig,
) -> Result<StrokeTime> {
    require_positive("beta", beta)?;
    require_positive("beta_s", beta_s)?;
    require_positive("omega_i", omega_i)?;
    require_positive("omega_f", omega_f)?;
    if beta == beta_s {
        return Err(Error::Singular(format!("bath and system share beta = {beta}: infinite relaxation time")));
    }
    stroke_integral(stat, model, omega_i, omega_f, cfg, |w| (beta, beta_s, w), |_| beta_s)
}

/// Time to move the system inverse temperature from `beta_i` to `beta_f` at
/// fixed `omega`, with the bath following `bath(beta_s)`.
///
/// `bath` must not cross the diagonal `bath(beta_s) = beta_s` on the stroke;
/// this is checked on a sample grid.
pub fn isochoric_time<M: Fn(f64) -> f64>(
    stat: Statistics,
    model: &GevaKosloff,
    bath: M,
    omega: f64,
    beta_i: f64,
    beta_f: f64,
    cfg: &QuadratureConfig,
) -> Result<StrokeTime> {
    require_positive("omega", omega)?;
    require_positive("beta_i", beta_i)?;
    require_positive("beta_f", beta_f)?;
    let (lo, hi) = (beta_i.min(beta_f), beta_i.max(beta_f));
    const SAMPLES: usize = 64;
    let mut reference = 0.0;
    for k in 0..=SAMPLES {
        let b = lo + (hi - lo) * k as f64 / SAMPLES as f64;
        let r = bath(b);
        require_positive("regenerator inverse temperature", r)?;
        let s = (r - b).signum();
        if r == b || (k > 0 && s != reference) {
            return Err(Error::Singular(format!("regenerator crosses the system temperature near beta_s = {b}")));
        }
        reference = s;
    }
    stroke_integral(stat, model, beta_i, beta_f, cfg, |b| (bath(b), b, omega), |_| omega)
}

fn linear(c: f64) -> impl Fn(f64) -> f64 {
    move |b| c * b
}

/// Quadrature stroke times for the engine, strokes A→B, B→C, C→D, D→A.
pub fn engine_cycle_time(
    spec: &EngineSpec,
    model: &GevaKosloff,
    regen: &RegeneratorModel,
    cfg: &QuadratureConfig,
) -> Result<TimingReport> {
    spec.validate()?;
    regen.validate()?;
    let (gamma1, gamma2) = regen.engine_factors()?;
    let EngineSpec { stat, omega1, omega2, beta_h, beta1, beta2, beta_c } = *spec;
    let t1 = isothermal_time(stat, model, beta_h, beta1, omega2, omega1, cfg).map_err(|e| e.in_stroke("A->B"))?;
    let t2 = isochoric_time(stat, model, linear(gamma1), omega1, beta1, beta2, cfg).map_err(|e| e.in_stroke("B->C"))?;
    let t3 = isothermal_time(stat, model, beta_c, beta2, omega1, omega2, cfg).map_err(|e| e.in_stroke("C->D"))?;
    let t4 = isochoric_time(stat, model, linear(gamma2), omega2, beta2, beta1, cfg).map_err(|e| e.in_stroke("D->A"))?;
    Ok(TimingReport::from_strokes([t1, t2, t3, t4]))
}

/// Quadrature stroke times for the refrigerator, strokes D→C, C→B, B→A, A→D.
pub fn fridge_cycle_time(
    spec: &FridgeSpec,
    model: &GevaKosloff,
    regen: &RegeneratorModel,
    cfg: &QuadratureConfig,
) -> Result<TimingReport> {
    spec.validate()?;
    regen.validate()?;
    let (b, bp) = regen.fridge_factors()?;
    let FridgeSpec { stat, omega1, omega2, beta1p, beta_h, beta_c, beta2p } = *spec;
    let t1 = isothermal_time(stat, model, beta_c, beta2p, omega2, omega1, cfg).map_err(|e| e.in_stroke("D->C"))?;
    let t2 = isochoric_time(stat, model, linear(bp), omega1, beta2p, beta1p, cfg).map_err(|e| e.in_stroke("C->B"))?;
    let t3 = isothermal_time(stat, model, beta_h, beta1p, omega1, omega2, cfg).map_err(|e| e.in_stroke("B->A"))?;
    let t4 = isochoric_time(stat, model, linear(b), omega2, beta1p, beta2p, cfg).map_err(|e| e.in_stroke("A->D"))?;
    Ok(TimingReport::from_strokes([t1, t2, t3, t4]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClosedForm {
    EngineLow,
    FridgeLow,
    EngineHighBosonic,
    EngineHighFermionic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CycleSpec {
    Engine(EngineSpec),
    Fridge(FridgeSpec),
}

impl CycleSpec {
    pub fn stat(&self) -> Statistics {
        match self {
            CycleSpec::Engine(s) => s.stat,
            CycleSpec::Fridge(s) => s.stat,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CycleSpec::Engine(s) => s.validate(),
            CycleSpec::Fridge(s) => s.validate(),
        }
    }
}

impl From<EngineSpec> for CycleSpec {
    fn from(s: EngineSpec) -> Self {
        CycleSpec::Engine(s)
    }
}

impl From<FridgeSpec> for CycleSpec {
    fn from(s: FridgeSpec) -> Self {
        CycleSpec::Fridge(s)
    }
}

fn low_term(a: f64, k: f64, x_lo: f64, x_hi: f64) -> Result<f64> {
    if k == 0.0 || !k.is_finite() {
        return Err(Error::Singular(format!("low-temperature time prefactor has vanishing rate factor {k}")));
    }
    Ok(((-k * x_lo).exp() - (-k * x_hi).exp()) / (2.0 * a * k))
}

/// Closed-form stroke times in a limiting regime, same stroke order as the
/// quadrature reports. Validity of the regime is not checked.
pub fn closed_form_strokes(
    kind: ClosedForm,
    spec: &CycleSpec,
    model: &GevaKosloff,
    regen: &RegeneratorModel,
) -> Result<TimingReport> {
    spec.validate()?;
    regen.validate()?;
    let GevaKosloff { a, q } = *model;
    let exact = |d: f64| StrokeTime { duration: d, error: 0.0 };
    let times = match (kind, spec) {
        (ClosedForm::EngineLow, CycleSpec::Engine(s)) => {
            let (gamma1, gamma2) = regen.engine_factors()?;
            let alpha_h = s.beta_h / s.beta1;
            let alpha_c = s.beta_c / s.beta2;
            [
                low_term(a, 1.0 + alpha_h * q, s.beta1 * s.omega1, s.beta1 * s.omega2)?,
                low_term(a, gamma1 * (1.0 + q), s.beta1 * s.omega1, s.beta2 * s.omega1)?,
                low_term(a, alpha_c * (1.0 + q), s.beta2 * s.omega1, s.beta2 * s.omega2)?,
                low_term(a, 1.0 + gamma2 * q, s.beta1 * s.omega2, s.beta2 * s.omega2)?,
            ]
        }
        (ClosedForm::FridgeLow, CycleSpec::Fridge(s)) => {
            let (b, bp) = regen.fridge_factors()?;
            let alpha_h = s.beta_h / s.beta1p;
            let alpha_c = s.beta_c / s.beta2p;
            [
                low_term(a, 1.0 + q * alpha_c, s.beta2p * s.omega1, s.beta2p * s.omega2)?,
                low_term(a, 1.0 + q * bp, s.beta1p * s.omega1, s.beta2p * s.omega1)?,
                low_term(a, (1.0 + q) * alpha_h, s.beta1p * s.omega1, s.beta1p * s.omega2)?,
                low_term(a, (1.0 + q) * b, s.beta1p * s.omega2, s.beta2p * s.omega2)?,
            ]
        }
        (ClosedForm::EngineHighBosonic, CycleSpec::Engine(s)) => {
            let (gamma1, gamma2) = regen.engine_factors()?;
            let span = (s.omega2 - s.omega1) / (2.0 * a * s.omega1 * s.omega2);
            let cooling = 1.0 / s.beta1 - 1.0 / s.beta2;
            [
                span / (s.beta1 - s.beta_h),
                cooling / (2.0 * a * s.omega1 * (gamma1 - 1.0)),
                span / (s.beta_c - s.beta2),
                cooling / (2.0 * a * s.omega2 * (1.0 - gamma2)),
            ]
        }
        (ClosedForm::EngineHighFermionic, CycleSpec::Engine(s)) => {
            let (gamma1, gamma2) = regen.engine_factors()?;
            let compression = (s.omega2 / s.omega1).ln() / (4.0 * a);
            let cooling = (s.beta2 / s.beta1).ln() / (4.0 * a);
            [
                s.beta1 * compression / (s.beta1 - s.beta_h),
                cooling / (gamma1 - 1.0),
                s.beta2 * compression / (s.beta_c - s.beta2),
                cooling / (1.0 - gamma2),
            ]
        }
        (kind, _) => {
            return Err(Error::Argument(format!("closed form {kind:?} does not apply to this cycle kind")));
        }
    };
    for t in times {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Singular(format!("closed-form stroke time {t:e} is not positive and finite")));
        }
    }
    Ok(TimingReport::from_strokes(times.map(exact)))
}

pub fn closed_form_cycle_time(
    kind: ClosedForm,
    spec: &CycleSpec,
    model: &GevaKosloff,
    regen: &RegeneratorModel,
) -> Result<f64> {
    closed_form_strokes(kind, spec, model, regen).map(|r| r.tau)
}

/// Smallest and largest `beta * omega` reached anywhere on the cycle,
/// counting bath, system and regenerator temperatures at both frequencies.
pub fn x_range(spec: &CycleSpec, regen: &RegeneratorModel) -> (f64, f64) {
    let mut xs = Vec::with_capacity(12);
    match (spec, *regen) {
        (CycleSpec::Engine(s), RegeneratorModel::LinearEngine { gamma1, gamma2 }) => {
            for beta in [s.beta_h, s.beta1, s.beta2, s.beta_c] {
                xs.extend([beta * s.omega1, beta * s.omega2]);
            }
            xs.extend([gamma1 * s.beta1 * s.omega1, gamma1 * s.beta2 * s.omega1]);
            xs.extend([gamma2 * s.beta1 * s.omega2, gamma2 * s.beta2 * s.omega2]);
        }
        (CycleSpec::Fridge(s), RegeneratorModel::LinearFridge { b, bp }) => {
            for beta in [s.beta1p, s.beta_h, s.beta_c, s.beta2p] {
                xs.extend([beta * s.omega1, beta * s.omega2]);
            }
            xs.extend([bp * s.beta1p * s.omega1, bp * s.beta2p * s.omega1]);
            xs.extend([b * s.beta1p * s.omega2, b * s.beta2p * s.omega2]);
        }
        (CycleSpec::Engine(s), _) => {
            for beta in [s.beta_h, s.beta1, s.beta2, s.beta_c] {
                xs.extend([beta * s.omega1, beta * s.omega2]);
            }
        }
        (CycleSpec::Fridge(s), _) => {
            for beta in [s.beta1p, s.beta_h, s.beta_c, s.beta2p] {
                xs.extend([beta * s.omega1, beta * s.omega2]);
            }
        }
    }
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}

/// Thresholds deciding which limiting regime a cycle lies in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeWindow {
    /// Low temperature when every `beta * omega` is at least this.
    pub x_low: f64,
    /// High temperature when every `beta * omega` is at most this.
    pub x_high: f64,
}

impl Default for RegimeWindow {
    fn default() -> Self {
        Self { x_low: 8.0, x_high: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Low,
    High,
    Intermediate,
}

impl RegimeWindow {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_high > 0.0 && self.x_low > self.x_high && self.x_low.is_finite()) {
            return Err(Error::Parameter(format!(
                "regime thresholds need 0 < x_high < x_low (got x_high = {}, x_low = {})",
                self.x_high, self.x_low
            )));
        }
        Ok(())
    }

    pub fn classify(&self, x_min: f64, x_max: f64) -> Regime {
        if x_min >= self.x_low {
            Regime::Low
        } else if x_max <= self.x_high {
            Regime::High
        } else {
            Regime::Intermediate
        }
    }
}
