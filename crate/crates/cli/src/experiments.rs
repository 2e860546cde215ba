//! One function per experiment. Sweep points run on the configured thread
//! pool; results are collected in grid order, so output never depends on
//! scheduling.

use grover_noise::collision::{dilation_unitary, extract_m, kraus_step, thermal_weights, verify_dilation, StepKind};
use grover_noise::grover::{grover_operator, ideal_success_series};
use grover_noise::markov::{history_oracle, markov_evolve, EvolveOptions};
use grover_noise::measures::{n_blp, n_cp};
use grover_noise::noise::{build_chi, noisy_grover};
use grover_noise::quantum_core::assert_density;
use grover_noise::{Error, GroverInstance, MarkovNoiseParams, NoiseSpec};
use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig, Layout};
use crate::table::{format_g, ResultTable};
use crate::CliError;

/// Registers up to this size get a density check of `rho_t` at every step.
pub const DENSE_CHECK_QUBITS: usize = 6;
pub const DENSITY_TOL: f64 = 1e-9;
pub const DILATION_TOL: f64 = 1e-12;
pub const FACTOR_TOL: f64 = 1e-8;
pub const ORACLE_TOL: f64 = 1e-10;

/// A finished table plus the name of any verification that failed on it.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub table: ResultTable,
    pub failure: Option<String>,
}

impl Outcome {
    fn ok(table: ResultTable) -> Self {
        Outcome { table, failure: None }
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    pool.install(|| match cfg.experiment {
        Experiment::Ideal => ideal(cfg).map(Outcome::ok),
        Experiment::Noisy => noisy(cfg).map(Outcome::ok),
        Experiment::Invariance => invariance(cfg).map(Outcome::ok),
        Experiment::Firstmax => firstmax(cfg).map(Outcome::ok),
        Experiment::Blp => blp(cfg).map(Outcome::ok),
        Experiment::Cpdiv => cpdiv(cfg).map(Outcome::ok),
        Experiment::Thermal => thermal(cfg).map(Outcome::ok),
        Experiment::DilationCheck => dilation_check(cfg),
        Experiment::OracleCheck => oracle_check(cfg),
    })
}

fn par_map<I: Sync, O: Send>(items: &[I], f: impl Fn(&I) -> Result<O, CliError> + Sync + Send) -> Result<Vec<O>, CliError> {
    items.par_iter().map(f).collect()
}

fn point_tag(params: &MarkovNoiseParams) -> String {
    format!("p{}_mu{}", format_g(params.p()), format_g(params.mu()))
}

fn spec_for(cfg: &ExperimentConfig, positions: &[usize]) -> Result<NoiseSpec, CliError> {
    NoiseSpec::new(cfg.unitary(), positions.to_vec(), cfg.n).map_err(CliError::from_config)
}

fn success_series(
    cfg: &ExperimentConfig,
    inst: &GroverInstance,
    positions: &[usize],
    params: &MarkovNoiseParams,
) -> Result<Vec<f64>, CliError> {
    let check = cfg.n <= DENSE_CHECK_QUBITS;
    let options = EvolveOptions {
        keep_states: check,
        ..Default::default()
    };
    let spec = spec_for(cfg, positions)?;
    let trace = markov_evolve(inst, &spec, params, cfg.steps, options)?;
    for r in trace.records.iter().filter(|_| check) {
        let rho = r.state.as_ref().expect("kept");
        if let Some((what, deviation)) = assert_density(rho.matrix(), DENSITY_TOL).violation() {
            return Err(CliError::Invariant(format!(
                "register state {what} at t={} (deviation {deviation:e})",
                r.t
            )));
        }
    }
    Ok(trace.success_series())
}

/// `t` column followed by one column per series.
fn time_table(cfg: &ExperimentConfig, t0: usize, columns: Vec<String>, series: &[Vec<f64>]) -> ResultTable {
    let mut table = ResultTable::new(cfg.meta(), std::iter::once("t".to_string()).chain(columns).collect());
    for t in t0..=cfg.steps {
        let mut row = vec![t as f64];
        row.extend(series.iter().map(|s| s[t - t0]));
        table.push(row);
    }
    table
}

fn strength(layout: &Layout) -> f64 {
    layout.positions.len() as f64
}

fn ideal(cfg: &ExperimentConfig) -> Result<ResultTable, CliError> {
    let p = ideal_success_series::<f64>(&cfg.instance(), cfg.steps);
    Ok(time_table(cfg, 0, vec!["P".into()], &[p]))
}

fn noisy(cfg: &ExperimentConfig) -> Result<ResultTable, CliError> {
    let inst = cfg.instance();
    let layouts = cfg.layouts();
    let points: Vec<(MarkovNoiseParams, &Layout)> =
        cfg.grid().into_iter().flat_map(|g| layouts.iter().map(move |l| (g, l))).collect();
    let series = par_map(&points, |(params, layout)| success_series(cfg, &inst, &layout.positions, params))?;
    let columns = points
        .iter()
        .map(|(params, layout)| format!("P_{}_{}", point_tag(params), layout.label))
        .collect();
    Ok(time_table(cfg, 0, columns, &series))
}

/// Runs every non-empty position subset. Per grid point the table holds the
/// prefix layout of each strength, the spread over all layouts, and the
/// largest spread within a strength-parity class.
fn invariance(cfg: &ExperimentConfig) -> Result<ResultTable, CliError> {
    let inst = cfg.instance();
    let n = cfg.n;
    let grid = cfg.grid();
    let masks: Vec<usize> = (1..1usize << n).collect();
    let jobs: Vec<(usize, usize)> = (0..grid.len()).flat_map(|g| masks.iter().map(move |&m| (g, m))).collect();
    let runs = par_map(&jobs, |&(g, mask)| {
        let positions: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 1).collect();
        success_series(cfg, &inst, &positions, &grid[g])
    })?;
    let mut columns = Vec::new();
    let mut series = Vec::new();
    for (g, params) in grid.iter().enumerate() {
        let block = &runs[g * masks.len()..(g + 1) * masks.len()];
        let tag = point_tag(params);
        for k in 1..=n {
            columns.push(format!("P_m{k}_{tag}"));
            series.push(block[(1 << k) - 2].clone());
        }
        let spread = |filter: &dyn Fn(usize) -> bool| -> Vec<f64> {
            (0..=cfg.steps)
                .map(|t| {
                    let vals = masks.iter().zip(block).filter(|(&m, _)| filter(m)).map(|(_, s)| s[t]);
                    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
                    hi - lo
                })
                .collect()
        };
        columns.push(format!("dev_all_{tag}"));
        series.push(spread(&|_| true));
        let even = spread(&|m| m.count_ones() % 2 == 0);
        let odd = spread(&|m| m.count_ones() % 2 == 1);
        columns.push(format!("dev_parity_{tag}"));
        series.push(even.iter().zip(&odd).map(|(a, b)| a.max(*b)).collect());
    }
    Ok(time_table(cfg, 0, columns, &series))
}

/// First `t >= 1` with `P(t-1) < P(t) >= P(t+1)`.
pub fn first_local_max(p: &[f64]) -> Option<usize> {
    (1..p.len().saturating_sub(1)).find(|&t| p[t] > p[t - 1] && p[t] >= p[t + 1])
}

fn firstmax(cfg: &ExperimentConfig) -> Result<ResultTable, CliError> {
    let inst = cfg.instance();
    let layouts = cfg.layouts();
    let points: Vec<(MarkovNoiseParams, &Layout)> =
        cfg.grid().into_iter().flat_map(|g| layouts.iter().map(move |l| (g, l))).collect();
    let rows = par_map(&points, |(params, layout)| {
        let p = success_series(cfg, &inst, &layout.positions, params)?;
        let (t, v) = first_local_max(&p).map_or((f64::NAN, f64::NAN), |t| (t as f64, p[t]));
        Ok(vec![params.p(), params.mu(), strength(layout), t, v])
    })?;
    let mut table = ResultTable::new(cfg.meta(), ["p", "mu", "m", "t_star", "P_star"].map(String::from).to_vec());
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

fn measure_table(
    cfg: &ExperimentConfig,
    name: &str,
    f: impl Fn(&GroverInstance, &NoiseSpec, &MarkovNoiseParams) -> Result<f64, Error> + Sync + Send,
) -> Result<ResultTable, CliError> {
    let inst = cfg.instance();
    let layouts = cfg.layouts();
    let points: Vec<(MarkovNoiseParams, &Layout)> =
        cfg.grid().into_iter().flat_map(|g| layouts.iter().map(move |l| (g, l))).collect();
    let rows = par_map(&points, |(params, layout)| {
        let value = f(&inst, &spec_for(cfg, &layout.positions)?, params)?;
        Ok(vec![params.p(), params.mu(), strength(layout), value])
    })?;
    let mut table = ResultTable::new(cfg.meta(), vec!["p".into(), "mu".into(), "m".into(), name.into()]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

fn blp(cfg: &ExperimentConfig) -> Result<ResultTable, CliError> {
    measure_table(cfg, "n_blp", |inst, spec, params| Ok(n_blp(inst, spec, params, cfg.steps, None)?.value))
}

fn cpdiv(cfg: &ExperimentConfig) -> Result<ResultTable, CliError> {
    measure_table(cfg, "n_cp", |inst, spec, params| Ok(n_cp(inst, spec, params, cfg.steps)?.value))
}

fn thermal(cfg: &ExperimentConfig) -> Result<ResultTable, CliError> {
    let inst = cfg.instance();
    let layouts = cfg.layouts();
    let mut points = Vec::new();
    for params in cfg.grid() {
        for layout in &layouts {
            for &temp in &cfg.temps {
                points.push((params, layout, temp));
            }
        }
    }
    let rows = par_map(&points, |&(params, layout, temp)| {
        let bath = thermal_weights(temp).map_err(CliError::from_config)?;
        let spec = spec_for(cfg, &layout.positions)?;
        let value = n_blp(&inst, &spec, &params, cfg.steps, Some(&bath))?.value;
        Ok(vec![params.p(), params.mu(), strength(layout), temp, value])
    })?;
    let mut table = ResultTable::new(cfg.meta(), ["p", "mu", "m", "temperature", "n_blp"].map(String::from).to_vec());
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

/// For both step kinds: partial-trace vs Kraus evolution, block mismatch,
/// unitarity, and the residual of the controlled-noise factorization
/// (`nan` where a transition probability vanishes).
fn dilation_check(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let inst = cfg.instance();
    let g = grover_operator::<f64>(&inst);
    let layouts = cfg.layouts();
    let mut points = Vec::new();
    for params in cfg.grid() {
        for layout in &layouts {
            for kind in [StepKind::Initial, StepKind::Steady] {
                points.push((params, layout, kind));
            }
        }
    }
    let rows = par_map(&points, |&(params, layout, kind)| {
        let chi = build_chi(cfg.n, &spec_for(cfg, &layout.positions)?)?;
        let gp = noisy_grover(&g, &chi)?;
        let u = dilation_unitary(kind, &params, &g, &gp)?;
        let kraus = kraus_step(kind, &params, &g, &gp)?;
        let report = verify_dilation(&u, &kraus, cfg.trials, cfg.seed)?;
        let residual = match extract_m(&u, &params, &chi, &g) {
            Ok(d) => d.residual,
            Err(Error::FactorizationFailed { residual }) => residual,
            Err(_) => f64::NAN,
        };
        let passed = report.passed(DILATION_TOL) && !(residual > FACTOR_TOL);
        let step = if kind == StepKind::Initial { 0.0 } else { 1.0 };
        Ok(vec![
            params.p(),
            params.mu(),
            strength(layout),
            step,
            report.max_deviation,
            report.kraus_mismatch,
            report.unitarity_defect,
            residual,
            if passed { 1.0 } else { 0.0 },
        ])
    })?;
    let columns = [
        "p",
        "mu",
        "m",
        "step",
        "max_deviation",
        "kraus_mismatch",
        "unitarity_defect",
        "factor_residual",
        "passed",
    ];
    let mut table = ResultTable::new(cfg.meta(), columns.map(String::from).to_vec());
    let failed: Vec<String> = rows
        .iter()
        .filter(|r| r[8] == 0.0)
        .map(|r| format!("p={} mu={} m={} step={}", format_g(r[0]), format_g(r[1]), r[2], r[3]))
        .collect();
    rows.into_iter().for_each(|r| table.push(r));
    Ok(Outcome {
        table,
        failure: (!failed.is_empty()).then(|| format!("dilation consistency failed at {}", failed.join("; "))),
    })
}

/// Max entrywise deviation between the history sum and the walker evolution
/// for `t = 1..=steps`.
fn oracle_check(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let inst = cfg.instance();
    let layouts = cfg.layouts();
    let points: Vec<(MarkovNoiseParams, &Layout)> =
        cfg.grid().into_iter().flat_map(|g| layouts.iter().map(move |l| (g, l))).collect();
    let series = par_map(&points, |(params, layout)| {
        let spec = spec_for(cfg, &layout.positions)?;
        let options = EvolveOptions {
            keep_states: true,
            ..Default::default()
        };
        let trace = markov_evolve(&inst, &spec, params, cfg.steps, options)?;
        (1..=cfg.steps)
            .map(|t| {
                let oracle = history_oracle(&inst, &spec, params, t)?;
                let state = trace.records[t].state.as_ref().expect("kept");
                Ok(oracle.matrix().max_abs_diff(state.matrix()))
            })
            .collect()
    })?;
    let columns: Vec<String> = points
        .iter()
        .map(|(params, layout)| format!("dev_{}_{}", point_tag(params), layout.label))
        .collect();
    let worst = series.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
    let failure = (!(worst <= ORACLE_TOL)).then(|| format!("history oracle mismatch {worst:e} exceeds {ORACLE_TOL:e}"));
    Ok(Outcome {
        table: time_table(cfg, 1, columns, &series),
        failure,
    })
}
