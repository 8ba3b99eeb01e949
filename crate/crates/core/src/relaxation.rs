//! Markovian (semigroup) relaxation of the oscillator population and the
//! resulting heat currents.

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::statistics::Statistics;

/// Geva-Kosloff rates `gamma_+ = a e^{q x}`, `gamma_- = a e^{(1+q) x}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevaKosloff {
    pub a: f64,
    pub q: f64,
}

impl GevaKosloff {
    pub fn new(a: f64, q: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::Parameter(format!("relaxation rate a must be positive, got {a}")));
        }
        if !(q > -1.0 && q < 0.0) {
            return Err(Error::Parameter(format!("q must lie in (-1, 0), got {q}")));
        }
        Ok(Self { a, q })
    }
}

/// Spectral classification of a power-law bath density of states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectralClass {
    SubOhmic,
    Ohmic,
    SuperOhmic,
}

/// Thermal-field bath with density of states `rho0 * omega^m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalField {
    pub rho0: f64,
    pub m: f64,
    /// Statistics of the bath field quanta.
    pub field: Statistics,
}

impl ThermalField {
    pub fn new(rho0: f64, m: f64, field: Statistics) -> Result<Self> {
        if !(rho0.is_finite() && rho0 > 0.0) {
            return Err(Error::Parameter(format!("rho0 must be positive, got {rho0}")));
        }
        if !m.is_finite() {
            return Err(Error::Parameter(format!("spectral exponent must be finite, got {m}")));
        }
        Ok(Self { rho0, m, field })
    }

    pub fn class(&self) -> SpectralClass {
        if self.m == 1.0 {
            SpectralClass::Ohmic
        } else if self.m > 1.0 {
            SpectralClass::SuperOhmic
        } else {
            SpectralClass::SubOhmic
        }
    }

    pub fn density_of_states(&self, omega: f64) -> f64 {
        self.rho0 * omega.powf(self.m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RateModel {
    GevaKosloff(GevaKosloff),
    ThermalField(ThermalField),
}

impl From<GevaKosloff> for RateModel {
    fn from(m: GevaKosloff) -> Self {
        RateModel::GevaKosloff(m)
    }
}

impl From<ThermalField> for RateModel {
    fn from(m: ThermalField) -> Self {
        RateModel::ThermalField(m)
    }
}

/// Excitation and decay rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub gamma_plus: f64,
    pub gamma_minus: f64,
}

impl Rates {
    /// Exponential relaxation rate of the population.
    pub fn relaxation_rate(&self, stat: Statistics) -> f64 {
        match stat {
            Statistics::Bosonic => 2.0 * (self.gamma_minus - self.gamma_plus),
            Statistics::Fermionic => 2.0 * (self.gamma_minus + self.gamma_plus),
        }
    }
}

/// Rates at bath inverse temperature `beta` and frequency `omega`.
///
/// `gamma_minus` is formed as `gamma_plus * e^{beta omega}` so detailed
/// balance holds to rounding.
pub fn rates(model: &RateModel, beta: f64, omega: f64) -> Result<Rates> {
    require_positive("beta", beta)?;
    require_positive("omega", omega)?;
    let x = beta * omega;
    let boltzmann = x.exp();
    let gamma_plus = match model {
        RateModel::GevaKosloff(GevaKosloff { a, q }) => a * (q * x).exp(),
        RateModel::ThermalField(field) => {
            let rho = field.density_of_states(omega);
            match field.field {
                Statistics::Bosonic => rho / x.exp_m1(),
                Statistics::Fermionic => rho / (boltzmann + 1.0),
            }
        }
    };
    let gamma_minus = gamma_plus * boltzmann;
    if !(gamma_plus > 0.0 && gamma_minus.is_finite()) {
        return Err(Error::Domain(format!(
            "rates are not representable at beta*omega = {x} (gamma+ = {gamma_plus:e}, gamma- = {gamma_minus:e})"
        )));
    }
    Ok(Rates { gamma_plus, gamma_minus })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxationSetup {
    pub stat: Statistics,
    pub model: RateModel,
    pub beta: f64,
    pub omega: f64,
    pub n0: f64,
}

impl RelaxationSetup {
    pub fn new(stat: Statistics, model: RateModel, beta: f64, omega: f64, n0: f64) -> Result<Self> {
        require_positive("beta", beta)?;
        require_positive("omega", omega)?;
        let n0_ok = match stat {
            Statistics::Bosonic => n0.is_finite() && n0 >= 0.0,
            Statistics::Fermionic => (0.0..=1.0).contains(&n0),
        };
        if !n0_ok {
            return Err(Error::Domain(format!("initial occupation {n0} outside the {stat} domain")));
        }
        let setup = Self { stat, model, beta, omega, n0 };
        let rate = setup.rates()?.relaxation_rate(stat);
        if !(rate > 0.0) {
            return Err(Error::Parameter(format!("relaxation rate {rate:e} is not positive")));
        }
        Ok(setup)
    }

    pub fn rates(&self) -> Result<Rates> {
        rates(&self.model, self.beta, self.omega)
    }

    pub fn relaxation_rate(&self) -> f64 {
        self.rates().map(|r| r.relaxation_rate(self.stat)).unwrap_or(f64::NAN)
    }

    pub fn equilibrium(&self) -> f64 {
        self.stat.occupation(self.beta * self.omega)
    }

    /// `dn/dt = 2 gamma_+ - k n` with `k` the relaxation rate.
    pub fn population_derivative(&self, n: f64) -> f64 {
        let r = self.rates().expect("validated at construction");
        2.0 * r.gamma_plus - r.relaxation_rate(self.stat) * n
    }
}

/// Occupation after relaxing for time `t` from `setup.n0`.
pub fn relax(setup: &RelaxationSetup, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Argument(format!("time must be non-negative, got {t}")));
    }
    let k = setup.rates()?.relaxation_rate(setup.stat);
    let n_eq = setup.equilibrium();
    Ok(n_eq + (setup.n0 - n_eq) * (-k * t).exp())
}

/// Heat current into a medium at inverse temperature `beta_s` from a bath
/// at `beta`, under Geva-Kosloff rates.
pub fn heat_current(stat: Statistics, model: &GevaKosloff, beta: f64, beta_s: f64, omega: f64) -> Result<f64> {
    require_positive("beta", beta)?;
    require_positive("beta_s", beta_s)?;
    require_positive("omega", omega)?;
    let x = beta * omega;
    let gap = ((beta - beta_s) * omega).exp_m1();
    Ok(-2.0 * omega * model.a * (model.q * x).exp() * gap / stat.occupation_factor(beta_s * omega))
}

/// Limiting regime of the heat current.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HeatRegime {
    HighTempBosonic,
    HighTempFermionic,
    LowTemp,
    LowTempLinear,
}

impl std::str::FromStr for HeatRegime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "high-bosonic" | "HighTempBosonic" => Ok(HeatRegime::HighTempBosonic),
            "high-fermionic" | "HighTempFermionic" => Ok(HeatRegime::HighTempFermionic),
            "low" | "LowTemp" => Ok(HeatRegime::LowTemp),
            "low-linear" | "LowTempLinear" => Ok(HeatRegime::LowTempLinear),
            other => Err(Error::Argument(format!("unknown heat-conduction regime '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitParams {
    pub model: GevaKosloff,
    pub beta: f64,
    pub beta_s: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitHeatCurrent {
    pub heat_current: f64,
    /// Conduction coefficient `L` of the regime's transport law.
    pub conduction: f64,
    /// Expansion parameter of the regime: `max(beta, beta_s) omega` for the
    /// high-temperature forms (should be << 1), `min(beta, beta_s) omega` for
    /// the low-temperature forms (should be >> 1).
    pub validity: f64,
}

pub fn limit_heat_current(regime: HeatRegime, p: &LimitParams) -> Result<LimitHeatCurrent> {
    require_positive("beta", p.beta)?;
    require_positive("beta_s", p.beta_s)?;
    require_positive("omega", p.omega)?;
    let LimitParams { model: GevaKosloff { a, q }, beta, beta_s, omega } = *p;
    let x = beta * omega;
    let hi = beta.max(beta_s) * omega;
    let lo = beta.min(beta_s) * omega;
    let out = match regime {
        HeatRegime::HighTempBosonic => {
            let conduction = 2.0 * a * omega * beta;
            LimitHeatCurrent { heat_current: 2.0 * omega * a * (beta_s - beta) / beta_s, conduction, validity: hi }
        }
        HeatRegime::HighTempFermionic => {
            let conduction = a * omega * omega;
            LimitHeatCurrent { heat_current: conduction * (beta_s - beta), conduction, validity: hi }
        }
        HeatRegime::LowTemp => LimitHeatCurrent {
            heat_current: -2.0 * omega * a * (q * x).exp() * ((beta - beta_s) * omega).exp_m1(),
            conduction: low_temperature_conduction(a, q, x, omega),
            validity: lo,
        },
        HeatRegime::LowTempLinear => {
            let conduction = low_temperature_conduction(a, q, x, omega);
            LimitHeatCurrent { heat_current: conduction * (beta_s - beta), conduction, validity: lo }
        }
    };
    Ok(out)
}

fn low_temperature_conduction(a: f64, q: f64, x: f64, omega: f64) -> f64 {
    2.0 * a * omega * omega * (q * x).exp()
}

/// Ratio of low- to high-temperature conduction coefficients of the
/// fermionic medium, `2 e^{q x}`.
pub fn conduction_ratio(q: f64, x: f64) -> f64 {
    2.0 * (q * x).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn gk(a: f64, q: f64) -> RateModel {
        GevaKosloff::new(a, q).unwrap().into()
    }

    #[test]
    fn geva_kosloff_reference_rates() {
        let r = rates(&gk(1.0, -0.5), 1.0, 2.0 * LN_2).unwrap();
        assert_relative_eq!(r.gamma_plus, 0.5, max_relative = 1e-15);
        assert_relative_eq!(r.gamma_minus, 2.0, max_relative = 1e-15);
    }

    #[test]
    fn thermal_field_reference_rates() {
        let field = ThermalField::new(1.0, 1.0, Statistics::Fermionic).unwrap();
        assert_eq!(field.class(), SpectralClass::Ohmic);
        let r = rates(&field.into(), 3.0f64.ln(), 1.0).unwrap();
        assert_relative_eq!(r.gamma_plus, 0.25, max_relative = 1e-15);
        assert_relative_eq!(r.gamma_minus, 0.75, max_relative = 1e-15);
    }

    #[test]
    fn parameter_validation() {
        assert!(GevaKosloff::new(0.0, -0.5).is_err());
        assert!(GevaKosloff::new(1.0, 0.5).is_err());
        assert!(GevaKosloff::new(1.0, -1.0).is_err());
        assert!(ThermalField::new(-1.0, 1.0, Statistics::Bosonic).is_err());
        assert_eq!(ThermalField::new(1.0, 2.0, Statistics::Bosonic).unwrap().class(), SpectralClass::SuperOhmic);
        assert_eq!(ThermalField::new(1.0, 0.5, Statistics::Bosonic).unwrap().class(), SpectralClass::SubOhmic);
    }

    #[test]
    fn relax_fixed_point_and_start() {
        let model = gk(1.0, -0.3);
        for stat in [Statistics::Bosonic, Statistics::Fermionic] {
            let n_eq = stat.occupation(1.3);
            let s = RelaxationSetup::new(stat, model, 1.0, 1.3, n_eq).unwrap();
            for t in [0.0, 0.5, 10.0] {
                assert_relative_eq!(relax(&s, t).unwrap(), n_eq, max_relative = 1e-15);
            }
            let s = RelaxationSetup::new(stat, model, 1.0, 1.3, 0.05).unwrap();
            assert_relative_eq!(relax(&s, 0.0).unwrap(), 0.05, max_relative = 1e-15);
            assert!(relax(&s, -1.0).is_err());
        }
    }

    #[test]
    fn fermionic_relaxation_example() {
        let s = RelaxationSetup::new(Statistics::Fermionic, gk(1.0, -0.5), 1.0, 2.0 * LN_2, 0.0).unwrap();
        assert_relative_eq!(s.relaxation_rate(), 5.0, max_relative = 1e-15);
        let expected = 0.2 * (1.0 - (-5.0f64).exp());
        assert_relative_eq!(relax(&s, 1.0).unwrap(), expected, max_relative = 1e-14);
    }

    #[test]
    fn relax_matches_rate_equation_by_central_difference() {
        let model = gk(0.7, -0.2);
        for stat in [Statistics::Bosonic, Statistics::Fermionic] {
            let s = RelaxationSetup::new(stat, model, 0.8, 1.5, 0.9).unwrap();
            let a = 0.7;
            let x: f64 = 0.8 * 1.5;
            for t in [0.05, 0.3, 1.0] {
                let h = 1e-5;
                let numeric = (relax(&s, t + h).unwrap() - relax(&s, t - h).unwrap()) / (2.0 * h);
                let n = relax(&s, t).unwrap();
                let stat_sign = match stat {
                    Statistics::Bosonic => -1.0,
                    Statistics::Fermionic => 1.0,
                };
                let rhs = -2.0 * a * (-0.2 * x).exp() * ((x.exp() + stat_sign) * n - 1.0);
                assert!(((numeric - rhs) / rhs).abs() <= 1e-6, "{stat} t={t}: {numeric} vs {rhs}");
            }
        }
    }

    #[test]
    fn relaxation_half_life() {
        let s = RelaxationSetup::new(Statistics::Bosonic, gk(1.0, -0.4), 1.0, 0.7, 2.0).unwrap();
        let k = s.relaxation_rate();
        let n_eq = s.equilibrium();
        let gap = |t| (relax(&s, t).unwrap() - n_eq).abs();
        let half = LN_2 / k;
        assert_relative_eq!(gap(half), 0.5 * gap(0.0), max_relative = 1e-12);
        assert_relative_eq!(gap(3.0 * half), 0.125 * gap(0.0), max_relative = 1e-12);
    }

    #[test]
    fn heat_current_signs() {
        let m = GevaKosloff::new(1.0, -0.3).unwrap();
        for stat in [Statistics::Bosonic, Statistics::Fermionic] {
            assert_eq!(heat_current(stat, &m, 1.0, 1.0, 2.0).unwrap(), 0.0);
            assert!(heat_current(stat, &m, 1.0, 2.0, 1.0).unwrap() > 0.0);
            assert!(heat_current(stat, &m, 2.0, 1.0, 1.0).unwrap() < 0.0);
        }
    }

    #[test]
    fn bosonic_current_has_newtonian_limit() {
        let m = GevaKosloff::new(1.0, -0.05).unwrap();
        let exact = heat_current(Statistics::Bosonic, &m, 1e-3, 1.1e-3, 1.0).unwrap();
        let p = LimitParams { model: m, beta: 1e-3, beta_s: 1.1e-3, omega: 1.0 };
        let approx = limit_heat_current(HeatRegime::HighTempBosonic, &p).unwrap();
        assert!(((exact - approx.heat_current) / exact).abs() < 0.01);
        assert_relative_eq!(approx.conduction, 2e-3);
    }

    #[test]
    fn limit_forms_reference_values() {
        let m = GevaKosloff::new(1.0, -0.5).unwrap();
        let p = LimitParams { model: m, beta: 3.0, beta_s: 3.0, omega: 1.0 };
        assert_eq!(limit_heat_current(HeatRegime::LowTemp, &p).unwrap().heat_current, 0.0);
        let p = LimitParams { model: m, beta: 0.2, beta_s: 0.3, omega: 1.0 };
        assert_relative_eq!(
            limit_heat_current(HeatRegime::HighTempFermionic, &p).unwrap().heat_current,
            0.1,
            max_relative = 1e-14
        );
        let p = LimitParams { model: m, beta: 25.0, beta_s: 26.0, omega: 1.0 };
        for stat in [Statistics::Bosonic, Statistics::Fermionic] {
            let exact = heat_current(stat, &m, 25.0, 26.0, 1.0).unwrap();
            let low = limit_heat_current(HeatRegime::LowTemp, &p).unwrap();
            assert!(((exact - low.heat_current) / exact).abs() <= 1e-6);
            assert_relative_eq!(low.conduction, 2.0 * (-12.5f64).exp(), max_relative = 1e-14);
            assert_eq!(low.validity, 25.0);
        }
        assert!("sideways".parse::<HeatRegime>().is_err());
        assert_eq!("low-linear".parse::<HeatRegime>().unwrap(), HeatRegime::LowTempLinear);
    }

    #[test]
    fn conduction_ratio_reference_values() {
        assert_relative_eq!(conduction_ratio(-0.5, 2.0 * LN_2), 1.0, max_relative = 1e-15);
        // 2 * 2^{-0.1} at 50 digits
        assert_relative_eq!(conduction_ratio(-0.1, LN_2), 1.866_065_983_073_614_8, max_relative = 1e-15);
        assert_relative_eq!(conduction_ratio(-1e-300, 17.0), 2.0);
    }

    /// Relative error of a limiting form against the exact current.
    fn limit_error(stat: Statistics, regime: HeatRegime, x: f64, ratio: f64) -> f64 {
        let m = GevaKosloff::new(1.0, -0.3).unwrap();
        let exact = heat_current(stat, &m, x, x * ratio, 1.0).unwrap();
        let p = LimitParams { model: m, beta: x, beta_s: x * ratio, omega: 1.0 };
        let approx = limit_heat_current(regime, &p).unwrap().heat_current;
        ((exact - approx) / exact).abs()
    }

    #[test]
    fn high_temperature_forms_converge_at_first_order() {
        for (stat, regime) in
            [(Statistics::Bosonic, HeatRegime::HighTempBosonic), (Statistics::Fermionic, HeatRegime::HighTempFermionic)]
        {
            let e1 = limit_error(stat, regime, 1e-3, 1.1);
            let e2 = limit_error(stat, regime, 5e-4, 1.1);
            let order = (e1 / e2).log2();
            assert!((0.8..1.3).contains(&order), "{stat}: order {order}");
        }
    }

    #[test]
    fn low_temperature_form_converges_in_boltzmann_factor() {
        for stat in [Statistics::Bosonic, Statistics::Fermionic] {
            let e1 = limit_error(stat, HeatRegime::LowTemp, 10.0, 1.05);
            let e2 = limit_error(stat, HeatRegime::LowTemp, 11.0, 1.05);
            // error ~ e^{-beta_s omega}; the expansion parameter shrinks by e^{-1.05}
            let order = (e1 / e2).ln() / 1.05;
            assert!((0.9..1.1).contains(&order), "{stat}: order {order}");
        }
    }

    proptest! {
        #[test]
        fn detailed_balance(beta in 0.01f64..10.0, omega in 0.01f64..5.0, a in 0.1f64..10.0, q in -0.99f64..-0.01, field_bosonic in any::<bool>()) {
            let field = if field_bosonic { Statistics::Bosonic } else { Statistics::Fermionic };
            for model in [gk(a, q), ThermalField::new(a, q + 2.0, field).unwrap().into()] {
                let r = rates(&model, beta, omega).unwrap();
                let expected = (beta * omega).exp();
                let ratio = r.gamma_minus / r.gamma_plus;
                prop_assert!(((ratio - expected) / expected).abs() <= 4.0 * f64::EPSILON);
                prop_assert!(r.gamma_plus > 0.0 && r.gamma_minus > 0.0);
            }
        }

        #[test]
        fn relaxation_is_monotone(n0 in 0.0f64..0.9, t1 in 0.0f64..5.0, dt in 1e-3f64..5.0, x in 0.1f64..5.0) {
            for stat in [Statistics::Bosonic, Statistics::Fermionic] {
                let s = RelaxationSetup::new(stat, gk(1.0, -0.4), 1.0, x, n0).unwrap();
                let n_eq = s.equilibrium();
                let a = relax(&s, t1).unwrap();
                let b = relax(&s, t1 + dt).unwrap();
                prop_assert!((b - n_eq).abs() <= (a - n_eq).abs());
                prop_assert!((a - n_eq) * (n0 - n_eq) >= 0.0);
            }
        }

        #[test]
        fn regime_map_signs(q in -0.999f64..-0.001, x in 0.001f64..15.0) {
            let lr = conduction_ratio(q, x);
            let margin = LN_2 - q.abs() * x;
            prop_assume!(margin.abs() > 1e-12);
            prop_assert_eq!(lr > 1.0, margin > 0.0);
        }
    }
}
