use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use stirling::{
    conduction_ratio, engine_cycle_time, equivalence_report, fridge_cycle_time, integrate_path, isochoric_heat,
    isothermal_heat, power_sweep, CycleSpec, MachineKind, Mode, PathSpec, PerformanceReport, QuadratureConfig,
    Statistics, SweepSummary, TimingReport,
};

use crate::config::{self, Format, RunConfig};
use crate::error::CliError;
use crate::output::{emit, float, json, Csv};

/// Flags shared by every command.
#[derive(Debug, Clone, Default)]
pub struct Common {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, CliError> {
        let path = self.config.as_deref().ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
        config::load(path)
    }

    fn format(&self, cfg: Option<&RunConfig>) -> Format {
        self.format.or(cfg.and_then(|c| c.output.format)).unwrap_or(Format::Csv)
    }

    fn out(&self, cfg: Option<&RunConfig>) -> Option<PathBuf> {
        self.out.clone().or(cfg.and_then(|c| c.output.path.clone()))
    }
}

#[derive(Serialize)]
struct MachineRecord<'a> {
    command: &'static str,
    statistics: Statistics,
    particle_count: u64,
    report: &'a PerformanceReport,
}

fn stroke_columns(t: &TimingReport) -> [String; 4] {
    t.strokes().map(|s| float(s.duration))
}

pub fn run_machine(common: &Common, kind: MachineKind) -> Result<(), CliError> {
    let cfg = common.load()?;
    let command = match kind {
        MachineKind::Engine => "engine",
        MachineKind::Fridge => "fridge",
    };
    if cfg.machine.kind() != kind {
        return Err(CliError::Config(format!("cycle.kind: the {command} command needs kind = \"{command}\"")));
    }
    let report = cfg.machine.evaluate(&cfg.numerics, cfg.mode)?.for_particles(cfg.output.particle_count);
    if !report.status.is_operational() {
        if let stirling::Status::NotAnEngine(why) | stirling::Status::NotARefrigerator(why) = &report.status {
            eprintln!("warning: {}: {why}", report.status.label());
        }
    }
    let text = match common.format(Some(&cfg)) {
        Format::Json => json(&MachineRecord {
            command,
            statistics: cfg.machine.stat(),
            particle_count: cfg.output.particle_count,
            report: &report,
        })?,
        Format::Csv => {
            let l = &report.ledger;
            let mut row = vec![
                report.status.label().to_string(),
                report.regime_tag.label().to_string(),
                float(l.q_h),
                float(l.q_c),
                float(l.work),
                float(l.delta_q),
                float(report.efficiency),
                float(report.power),
            ];
            let mut header = vec!["status", "regime", "Q_h", "Q_c", "W_tot", "delta_Q"];
            match kind {
                MachineKind::Engine => header.extend(["eta", "P"]),
                MachineKind::Fridge => {
                    header.extend(["epsilon", "P", "R"]);
                    row.push(float(report.cooling_rate.unwrap_or(f64::NAN)));
                }
            }
            header.extend(["sigma", "tau", "t1", "t2", "t3", "t4"]);
            row.push(float(report.entropy_rate));
            row.push(float(report.tau()));
            row.extend(stroke_columns(&report.timing));
            let mut csv = Csv::new(header);
            csv.push(row);
            csv.render()
        }
    };
    emit(&text, common.out(Some(&cfg)).as_deref())
}

#[derive(Debug, Clone)]
pub struct RegimeMapArgs {
    pub q_min: f64,
    pub q_max: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub grid: usize,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect()
}

/// Tolerance on `|q| x - ln 2` for a grid point to count as on the curve.
const ON_CURVE: f64 = 1e-12;

pub fn region(q: f64, x: f64) -> &'static str {
    let margin = std::f64::consts::LN_2 - q.abs() * x;
    if margin.abs() <= ON_CURVE {
        "on"
    } else if margin > 0.0 {
        "above"
    } else {
        "below"
    }
}

#[derive(Serialize)]
struct RegimeRow {
    q: f64,
    x: f64,
    l_r: f64,
    region: &'static str,
}

pub fn run_regime_map(common: &Common, args: &RegimeMapArgs) -> Result<(), CliError> {
    let RegimeMapArgs { q_min, q_max, x_min, x_max, grid } = *args;
    if !(q_min > -1.0 && q_max < 0.0 && q_min < q_max) {
        return Err(CliError::Config(format!("q range must satisfy -1 < q-min < q-max < 0 (got {q_min}, {q_max})")));
    }
    if !(x_min > 0.0 && x_min < x_max && x_max.is_finite()) {
        return Err(CliError::Config(format!("x range must satisfy 0 < x-min < x-max (got {x_min}, {x_max})")));
    }
    if grid < 2 {
        return Err(CliError::Config(format!("--grid must be at least 2, got {grid}")));
    }
    let qs = linspace(q_min, q_max, grid);
    let xs = linspace(x_min, x_max, grid);
    let rows: Vec<RegimeRow> = qs
        .par_iter()
        .flat_map_iter(|&q| {
            xs.iter().map(move |&x| RegimeRow { q, x, l_r: conduction_ratio(q, x), region: region(q, x) })
        })
        .collect();
    let text = match common.format(None) {
        Format::Json => json(&rows)?,
        Format::Csv => {
            let mut csv = Csv::new(vec!["q", "x", "L_r", "region"]);
            for r in &rows {
                csv.push(vec![float(r.q), float(r.x), float(r.l_r), r.region.to_string()]);
            }
            csv.render()
        }
    };
    emit(&text, common.out.as_deref())
}

/// `start:stop:count` (inclusive, evenly spaced) or a comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |m: String| CliError::Config(format!("--x-grid: {m}"));
    let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(format!("'{s}' is not a number")));
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [start, stop, count] => {
            let count: usize = count.trim().parse().map_err(|_| bad(format!("'{count}' is not a point count")))?;
            if count == 0 {
                return Err(bad("point count must be at least 1".into()));
            }
            Ok(linspace(number(start)?, number(stop)?, count))
        }
        [list] => list.split(',').map(number).collect(),
        _ => Err(bad(format!("expected start:stop:count or a comma list, got '{spec}'"))),
    }
}

#[derive(Serialize)]
struct SummaryRecord {
    #[serde(flatten)]
    summary: SweepSummary,
    ca_bound_definition: &'static str,
    ref_curve_definition: &'static str,
}

#[derive(Serialize)]
struct SweepOutput<'a> {
    records: &'a [stirling::SweepRecord],
    summary: &'a SummaryRecord,
}

pub fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.json")
}

pub fn run_power_sweep(common: &Common, grid: &str) -> Result<(), CliError> {
    let cfg = common.load()?;
    let template = cfg
        .template
        .ok_or_else(|| CliError::Config("cycle.kind: the power sweep needs an engine configuration".into()))?;
    let grid = parse_grid(grid)?;
    let sweep = power_sweep(&template, &grid)?;
    let summary = SummaryRecord {
        summary: sweep.summary,
        ca_bound_definition: "1 - sqrt(beta_h / beta_c)",
        ref_curve_definition: "1 / (1 + x)",
    };
    let out = common.out(Some(&cfg));
    match common.format(Some(&cfg)) {
        Format::Json => emit(&json(&SweepOutput { records: &sweep.records, summary: &summary })?, out.as_deref()),
        Format::Csv => {
            let mut csv = Csv::new(vec!["x", "eta", "P_star", "ca_bound", "ref_curve"]);
            for r in &sweep.records {
                csv.push(vec![float(r.x), float(r.eta), float(r.p_star), float(r.ca_bound), float(r.ref_curve)]);
            }
            emit(&csv.render(), out.as_deref())?;
            let summary_text = json(&summary)?;
            match out {
                Some(p) => emit(&summary_text, Some(&summary_path(&p))),
                None => {
                    eprint!("{summary_text}");
                    Ok(())
                }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self { name: name.into(), passed: value <= limit, value, limit }
    }
}

fn heat_oracle_checks(spec: &CycleSpec) -> Result<Vec<Check>, CliError> {
    const STEPS: usize = 200_000;
    const TOL: f64 = 1e-8;
    // (label, isotherm temperature or None for an isochore, omega/T endpoints)
    let (stat, isotherms, isochores) = match *spec {
        CycleSpec::Engine(s) => (
            s.stat,
            [("A->B", 1.0 / s.beta1, s.omega2, s.omega1), ("C->D", 1.0 / s.beta2, s.omega1, s.omega2)],
            [("B->C", s.omega1, s.beta1, s.beta2), ("D->A", s.omega2, s.beta2, s.beta1)],
        ),
        CycleSpec::Fridge(s) => (
            s.stat,
            [("B->A", 1.0 / s.beta1p, s.omega1, s.omega2), ("D->C", 1.0 / s.beta2p, s.omega2, s.omega1)],
            [("C->B", s.omega1, s.beta2p, s.beta1p), ("A->D", s.omega2, s.beta1p, s.beta2p)],
        ),
    };
    let mut checks = Vec::new();
    for (label, t, wi, wf) in isotherms {
        let closed = isothermal_heat(stat, t, wi, wf)?;
        let path = integrate_path(&PathSpec::isothermal(stat, t, wi, wf, STEPS))?.heat;
        checks.push(Check::at_most(format!("heat_oracle_{label}"), stirling::relative_deviation(closed, path), TOL));
    }
    for (label, w, bi, bf) in isochores {
        let closed = isochoric_heat(stat, w, 1.0 / bi, 1.0 / bf)?;
        let path = integrate_path(&PathSpec::isochoric(stat, w, bi, bf, STEPS))?.heat;
        checks.push(Check::at_most(format!("heat_oracle_{label}"), stirling::relative_deviation(closed, path), TOL));
    }
    Ok(checks)
}

fn timing_at(cfg: &RunConfig, quadrature: &QuadratureConfig) -> Result<TimingReport, CliError> {
    let m = &cfg.machine;
    Ok(match m.spec {
        CycleSpec::Engine(s) => engine_cycle_time(&s, &m.model, &m.regen, quadrature)?,
        CycleSpec::Fridge(s) => fridge_cycle_time(&s, &m.model, &m.regen, quadrature)?,
    })
}

pub fn validation_checks(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let machine = &cfg.machine;
    let report = machine.evaluate(&cfg.numerics, Mode::Exact)?;
    let mut checks = vec![Check::at_most("first_law_closure", report.ledger.closure_defect(), 1e-12)];
    checks.extend(heat_oracle_checks(&machine.spec)?);

    let stroke_sum: f64 = report.timing.strokes().iter().map(|s| s.duration).sum();
    checks.push(Check::at_most("tau_is_stroke_sum", stirling::relative_deviation(report.tau(), stroke_sum), 1e-15));
    let mut finer = cfg.numerics.quadrature;
    finer.rel_tol /= 2.0;
    let refined = timing_at(cfg, &finer)?;
    for (k, (coarse, fine)) in report.timing.strokes().iter().zip(refined.strokes()).enumerate() {
        let limit = coarse.error.max(1e-15 * coarse.duration);
        checks.push(Check::at_most(
            format!("quadrature_refinement_t{}", k + 1),
            (coarse.duration - fine.duration).abs(),
            limit,
        ));
    }
    let work = report.ledger.work.abs();
    checks.push(Check::at_most(
        "power_period_identity",
        stirling::relative_deviation(work, report.power * report.tau()),
        1e-12,
    ));
    let operational = report.status.is_operational();
    checks.push(Check {
        name: "second_law".into(),
        passed: report.entropy_rate >= 0.0 || !operational,
        value: report.entropy_rate,
        limit: 0.0,
    });
    if let CycleSpec::Engine(s) = machine.spec {
        let carnot = 1.0 - s.beta_h / s.beta_c;
        checks.push(Check {
            name: "carnot_ceiling".into(),
            passed: report.efficiency < carnot || !operational,
            value: report.efficiency,
            limit: carnot,
        });
    }

    let mirror = machine.with_statistics(machine.stat().other());
    let eq = equivalence_report(machine, &mirror, &cfg.numerics)?;
    let enforce = eq.x_min >= cfg.numerics.window.x_low;
    for d in &eq.deviations {
        checks.push(Check {
            name: format!("equivalence_{}", d.quantity),
            passed: d.within_bound || !enforce,
            value: d.relative,
            limit: eq.bound,
        });
    }
    Ok(checks)
}

pub fn run_validate(common: &Common) -> Result<(), CliError> {
    let cfg = common.load()?;
    let checks = validation_checks(&cfg)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    let text = match common.format(Some(&cfg)) {
        Format::Json => json(&checks)?,
        Format::Csv => {
            let mut csv = Csv::new(vec!["check", "passed", "value", "limit"]);
            for c in &checks {
                csv.push(vec![c.name.clone(), c.passed.to_string(), float(c.value), float(c.limit)]);
            }
            csv.render()
        }
    };
    emit(&text, common.out(Some(&cfg)).as_deref())?;
    eprintln!("{} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        Err(CliError::ChecksFailed(failed))
    } else {
        Ok(())
    }
}
