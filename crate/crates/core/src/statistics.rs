//! Single-oscillator statistical thermodynamics.
//!
//! Everything is in natural units (ħ = k_B = 1): frequencies are energies and
//! `x = beta * omega` is the dimensionless argument of the occupation number.
//! Formulas are written out per [`Statistics`] variant rather than through a
//! shared sign, because the two families flip sign conventions between the
//! Hamiltonian and the occupation number.

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::numeric::NeumaierSum;

/// Above this argument the occupation is evaluated from `e^{-x}` to avoid
/// overflowing `e^x`.
const LARGE_ARGUMENT: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    /// Harmonic oscillator, Bose-Einstein occupation, unbounded spectrum.
    Bosonic,
    /// Fermionic oscillator (two-level), Fermi-Dirac occupation.
    Fermionic,
}

impl Statistics {
    pub fn other(self) -> Self {
        match self {
            Statistics::Bosonic => Statistics::Fermionic,
            Statistics::Fermionic => Statistics::Bosonic,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Statistics::Bosonic => "bosonic",
            Statistics::Fermionic => "fermionic",
        }
    }

    /// Occupation for `x > 0`, without argument checking.
    pub(crate) fn occupation(self, x: f64) -> f64 {
        match self {
            Statistics::Bosonic => {
                if x > LARGE_ARGUMENT {
                    let e = (-x).exp();
                    e / (1.0 - e)
                } else {
                    1.0 / x.exp_m1()
                }
            }
            Statistics::Fermionic => {
                let e = (-x).exp();
                e / (1.0 + e)
            }
        }
    }

    /// `ln(1 - e^{-x})` for bosons, `ln(1 + e^{-x})` for fermions.
    pub(crate) fn log_partition(self, x: f64) -> f64 {
        match self {
            Statistics::Bosonic => {
                if x < std::f64::consts::LN_2 {
                    (-(-x).exp_m1()).ln()
                } else {
                    (-(-x).exp()).ln_1p()
                }
            }
            Statistics::Fermionic => (-x).exp().ln_1p(),
        }
    }

    /// `1 - e^{-x}` for bosons, `1 + e^{-x}` for fermions.
    pub(crate) fn occupation_factor(self, x: f64) -> f64 {
        match self {
            Statistics::Bosonic => -(-x).exp_m1(),
            Statistics::Fermionic => 1.0 + (-x).exp(),
        }
    }

    /// Zero-point offset in `E = omega (n + offset)`.
    pub(crate) fn zero_point(self) -> f64 {
        match self {
            Statistics::Bosonic => 0.5,
            Statistics::Fermionic => -0.5,
        }
    }
}

impl std::fmt::Display for Statistics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Statistics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bosonic" | "boson" | "bose" => Ok(Statistics::Bosonic),
            "fermionic" | "fermion" | "fermi" => Ok(Statistics::Fermionic),
            other => Err(Error::Argument(format!("unknown statistics '{other}', expected bosonic or fermionic"))),
        }
    }
}

/// Mean occupation at `x = beta_s * omega`.
pub fn population(stat: Statistics, x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::Domain(format!("occupation argument must be positive, got {x}")));
    }
    Ok(stat.occupation(x))
}

/// Frequency at which an oscillator at temperature `temperature` has mean
/// occupation `n`. Inverse of [`population`].
pub fn inverse_population(stat: Statistics, n: f64, temperature: f64) -> Result<f64> {
    require_positive("temperature", temperature)?;
    let x = match stat {
        Statistics::Bosonic => {
            if !(n.is_finite() && n > 0.0) {
                return Err(Error::Domain(format!("bosonic occupation must be positive, got {n}")));
            }
            (1.0 / n).ln_1p()
        }
        Statistics::Fermionic => {
            if !(n > 0.0 && n < 0.5) {
                return Err(Error::Domain(format!("fermionic occupation must lie in (0, 1/2), got {n}")));
            }
            ((1.0 - 2.0 * n) / n).ln_1p()
        }
    };
    Ok(temperature * x)
}

/// Mean energy `omega (n ± 1/2)` of one oscillator.
pub fn internal_energy(stat: Statistics, omega: f64, n: f64) -> Result<f64> {
    require_positive("omega", omega)?;
    let in_domain = match stat {
        Statistics::Bosonic => n.is_finite() && n >= 0.0,
        Statistics::Fermionic => (0.0..=0.5).contains(&n),
    };
    if !in_domain {
        return Err(Error::Domain(format!("occupation {n} outside the {stat} domain")));
    }
    Ok(omega * (n + stat.zero_point()))
}

/// Thermal state of one oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorState {
    pub stat: Statistics,
    pub omega: f64,
    pub beta_s: f64,
}

impl OscillatorState {
    pub fn new(stat: Statistics, omega: f64, beta_s: f64) -> Result<Self> {
        require_positive("omega", omega)?;
        require_positive("beta_s", beta_s)?;
        Ok(Self { stat, omega, beta_s })
    }

    pub fn x(&self) -> f64 {
        self.beta_s * self.omega
    }

    pub fn occupation(&self) -> f64 {
        self.stat.occupation(self.x())
    }

    pub fn energy(&self) -> f64 {
        self.omega * (self.occupation() + self.stat.zero_point())
    }
}

type Curve = dyn Fn(f64) -> (f64, f64) + Send + Sync;

/// A curve `u -> (omega(u), beta_s(u))` on `u in [0, 1]`, discretised into
/// `step_count` midpoint-rule cells.
pub struct PathSpec {
    pub stat: Statistics,
    pub step_count: usize,
    curve: Box<Curve>,
}

impl std::fmt::Debug for PathSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PathSpec")
            .field("stat", &self.stat)
            .field("step_count", &self.step_count)
            .field("start", &(self.curve)(0.0))
            .field("end", &(self.curve)(1.0))
            .finish()
    }
}

impl PathSpec {
    pub fn new<F>(stat: Statistics, step_count: usize, curve: F) -> Self
    where
        F: Fn(f64) -> (f64, f64) + Send + Sync + 'static,
    {
        Self { stat, step_count, curve: Box::new(curve) }
    }

    /// Constant temperature, frequency moved linearly from `omega_i` to `omega_f`.
    pub fn isothermal(stat: Statistics, temperature: f64, omega_i: f64, omega_f: f64, step_count: usize) -> Self {
        let beta = 1.0 / temperature;
        Self::new(stat, step_count, move |u| (omega_i + (omega_f - omega_i) * u, beta))
    }

    /// Constant frequency, inverse temperature moved linearly.
    pub fn isochoric(stat: Statistics, omega: f64, beta_i: f64, beta_f: f64, step_count: usize) -> Self {
        Self::new(stat, step_count, move |u| (omega, beta_i + (beta_f - beta_i) * u))
    }

    /// Piecewise-linear path through `(omega, beta_s)` vertices, each segment
    /// taking an equal share of the parameter range.
    pub fn polyline(stat: Statistics, vertices: Vec<(f64, f64)>, step_count: usize) -> Self {
        assert!(vertices.len() >= 2, "a polyline needs at least two vertices");
        let segments = (vertices.len() - 1) as f64;
        Self::new(stat, step_count, move |u| {
            let s = (u.clamp(0.0, 1.0) * segments).min(segments - 1e-15);
            let k = s.floor() as usize;
            let t = s - k as f64;
            let (w0, b0) = vertices[k];
            let (w1, b1) = vertices[k + 1];
            (w0 + (w1 - w0) * t, b0 + (b1 - b0) * t)
        })
    }

    pub fn point(&self, u: f64) -> (f64, f64) {
        (self.curve)(u)
    }
}

/// Heat and work accumulated along a path, `delta_e = heat + work`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathIntegral {
    pub delta_e: f64,
    pub heat: f64,
    pub work: f64,
}

/// Integrates `dQ = omega dn` and `dW = (n ± 1/2) d omega` along the path
/// with the midpoint rule.
pub fn integrate_path(path: &PathSpec) -> Result<PathIntegral> {
    if path.step_count < 2 {
        return Err(Error::Argument(format!("path needs at least 2 steps, got {}", path.step_count)));
    }
    let stat = path.stat;
    let steps = path.step_count as f64;
    let state = |u: f64| -> Result<(f64, f64)> {
        let (omega, beta) = path.point(u);
        if !(omega > 0.0 && beta > 0.0) {
            return Err(Error::Domain(format!(
                "path leaves the physical domain at u = {u}: omega = {omega}, beta_s = {beta}"
            )));
        }
        Ok((omega, stat.occupation(beta * omega)))
    };

    let mut heat = NeumaierSum::default();
    let mut work = NeumaierSum::default();
    let (mut omega_prev, mut n_prev) = state(0.0)?;
    for k in 0..path.step_count {
        let u_mid = (k as f64 + 0.5) / steps;
        let u_next = (k + 1) as f64 / steps;
        let (omega_mid, n_mid) = state(u_mid)?;
        let (omega_next, n_next) = state(u_next)?;
        heat.add(omega_mid * (n_next - n_prev));
        work.add((n_mid + stat.zero_point()) * (omega_next - omega_prev));
        omega_prev = omega_next;
        n_prev = n_next;
    }
    let (heat, work) = (heat.total(), work.total());
    Ok(PathIntegral { delta_e: heat + work, heat, work })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    #[test]
    fn population_reference_values() {
        assert_relative_eq!(population(Statistics::Fermionic, LN_2).unwrap(), 1.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(population(Statistics::Bosonic, LN_2).unwrap(), 1.0, max_relative = 1e-15);
        // 1/(e^30 + 1) at 50 digits
        assert_relative_eq!(
            population(Statistics::Fermionic, 30.0).unwrap(),
            9.357_622_968_839_299e-14,
            max_relative = 1e-15
        );
        let near_zero = population(Statistics::Fermionic, 1e-12).unwrap();
        assert!(near_zero < 0.5 && 0.5 - near_zero < 1e-12);
    }

    #[test]
    fn population_rejects_non_positive_argument() {
        for stat in [Statistics::Bosonic, Statistics::Fermionic] {
            assert!(matches!(population(stat, 0.0), Err(Error::Domain(_))));
            assert!(matches!(population(stat, -1.0), Err(Error::Domain(_))));
            assert!(population(stat, f64::NAN).is_err());
        }
    }

    #[test]
    fn huge_arguments_do_not_overflow() {
        let b = population(Statistics::Bosonic, 720.0).unwrap();
        assert!(b.is_finite() && b >= 0.0);
        assert_relative_eq!(population(Statistics::Bosonic, 701.0).unwrap(), (-701.0f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn inverse_population_reference_values() {
        assert_relative_eq!(
            inverse_population(Statistics::Fermionic, 1.0 / 3.0, 1.0).unwrap(),
            LN_2,
            max_relative = 1e-15
        );
        assert_relative_eq!(inverse_population(Statistics::Bosonic, 1.0, 1.0).unwrap(), LN_2, max_relative = 1e-15);
        assert_relative_eq!(
            inverse_population(Statistics::Bosonic, 2.0, 1.0).unwrap(),
            1.5f64.ln(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn inverse_population_domain() {
        assert!(inverse_population(Statistics::Fermionic, 0.5, 1.0).is_err());
        assert!(inverse_population(Statistics::Fermionic, 0.0, 1.0).is_err());
        assert!(inverse_population(Statistics::Bosonic, 0.0, 1.0).is_err());
        assert!(inverse_population(Statistics::Bosonic, 5.0, -1.0).is_err());
        // bosonic occupations are unbounded
        assert!(inverse_population(Statistics::Bosonic, 1e6, 1.0).is_ok());
    }

    #[test]
    fn internal_energy_reference_values() {
        assert_eq!(internal_energy(Statistics::Bosonic, 1.0, 1.0).unwrap(), 1.5);
        assert_relative_eq!(
            internal_energy(Statistics::Fermionic, 1.0, 1.0 / 3.0).unwrap(),
            -1.0 / 6.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(internal_energy(Statistics::Fermionic, 2.0, 1e-300).unwrap(), -1.0);
        assert!(internal_energy(Statistics::Fermionic, 1.0, 0.7).is_err());
        assert!(internal_energy(Statistics::Bosonic, 0.0, 1.0).is_err());
    }

    #[test]
    fn point_path_is_zero() {
        let path = PathSpec::new(Statistics::Bosonic, 100, |_| (1.0, 1.0));
        let r = integrate_path(&path).unwrap();
        assert_eq!((r.delta_e, r.heat, r.work), (0.0, 0.0, 0.0));
    }

    #[test]
    fn isochoric_path_heat() {
        let path = PathSpec::isochoric(Statistics::Bosonic, 1.0, LN_2, 1.5f64.ln(), 1_000_000);
        let r = integrate_path(&path).unwrap();
        assert_relative_eq!(r.heat, 1.0, max_relative = 1e-12);
        assert_eq!(r.work, 0.0);
        assert_relative_eq!(r.delta_e, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn path_needs_two_steps() {
        let path = PathSpec::isochoric(Statistics::Bosonic, 1.0, 1.0, 2.0, 1);
        assert!(matches!(integrate_path(&path), Err(Error::Argument(_))));
    }

    #[test]
    fn path_outside_domain_is_rejected() {
        let path = PathSpec::new(Statistics::Fermionic, 10, |u| (1.0 - 2.0 * u, 1.0));
        assert!(matches!(integrate_path(&path), Err(Error::Domain(_))));
    }

    #[test]
    fn first_law_closure_converges_at_second_order() {
        let vertices = vec![(1.0, 2.0), (2.5, 1.2), (1.7, 0.6), (3.0, 0.9)];
        for stat in [Statistics::Bosonic, Statistics::Fermionic] {
            let exact = {
                let e = |(w, b): (f64, f64)| w * (stat.occupation(b * w) + stat.zero_point());
                e(vertices[3]) - e(vertices[0])
            };
            let defect = |steps| {
                let r = integrate_path(&PathSpec::polyline(stat, vertices.clone(), steps)).unwrap();
                (r.delta_e - exact).abs()
            };
            let coarse = defect(300);
            let fine = defect(600);
            let order = (coarse / fine).log2();
            assert!(order >= 1.9, "{stat}: convergence order {order}");
        }
    }

    fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
        (lo.ln()..hi.ln()).prop_map(f64::exp)
    }

    proptest! {
        #[test]
        fn occupation_is_strictly_decreasing(a in log_uniform(1e-3, 40.0), b in log_uniform(1e-3, 40.0)) {
            prop_assume!((a - b).abs() > 1e-9 * a.max(b));
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            for stat in [Statistics::Bosonic, Statistics::Fermionic] {
                prop_assert!(population(stat, lo).unwrap() > population(stat, hi).unwrap());
            }
        }

        #[test]
        fn occupation_bounds(x in log_uniform(1e-6, 700.0)) {
            let nf = population(Statistics::Fermionic, x).unwrap();
            let nb = population(Statistics::Bosonic, x).unwrap();
            prop_assert!(nf > 0.0 && nf < 0.5);
            prop_assert!(nb >= nf * (1.0 - 4.0 * f64::EPSILON));
            if x < 30.0 {
                prop_assert!(nb > nf);
            }
        }

        #[test]
        fn inverse_round_trip(x in log_uniform(1e-3, 30.0), t in log_uniform(1e-2, 1e2)) {
            for stat in [Statistics::Bosonic, Statistics::Fermionic] {
                let n = population(stat, x).unwrap();
                let omega = inverse_population(stat, n, t).unwrap();
                let back = population(stat, omega / t).unwrap();
                prop_assert!(((back - n) / n).abs() <= 1e-12, "{} x={} n={} back={}", stat, x, n, back);
            }
        }

        #[test]
        fn work_sign_on_compression(w0 in 0.1f64..3.0, dw in 0.1f64..3.0, b0 in 0.1f64..3.0, b1 in 0.1f64..3.0) {
            // omega strictly increasing along the whole path
            let bos = integrate_path(&PathSpec::new(Statistics::Bosonic, 2000, move |u| (w0 + dw * u, b0 + (b1 - b0) * u))).unwrap();
            let fer = integrate_path(&PathSpec::new(Statistics::Fermionic, 2000, move |u| (w0 + dw * u, b0 + (b1 - b0) * u))).unwrap();
            prop_assert!(bos.work > 0.0);
            prop_assert!(fer.work < 0.0);
        }
    }
}
