#![allow(clippy::needless_range_loop)]

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::Deserialize;

use chainrisk::equilibrium::solve_equilibrium_observed;
use chainrisk::icio::{
    compute_fir, compute_fmr, load_table, reliance_change, resolve_sectors, RelianceKind, RelianceMatrix,
};
use chainrisk::simulate::{monte_carlo_survival, run_matrix, run_scenario};
use chainrisk::trade::enumerate_paths;
use chainrisk::{EconomyParams, EconomySpec, ScenarioConfig, SolverConfig, TimeSeries};

use crate::chart::supplier_chart;
use crate::error::{CliError, Result};
use crate::manifest::{ensure_dir, Recorder};
use crate::{EquilibriumArgs, RelianceArgs, SimulateArgs};

pub const TIMESERIES_FILE: &str = "timeseries.csv";
pub const SURVIVAL_FILE: &str = "survival.csv";
pub const EQUILIBRIUM_FILE: &str = "equilibrium.csv";
pub const PATH_SHARES_FILE: &str = "path_shares.csv";

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

fn command_line() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

fn timeseries_csv(series: &TimeSeries) -> String {
    let mut out = String::from("period,suppliers_east,suppliers_south,suppliers_total,chain_alive,welfare\n");
    for r in &series.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.period, r.suppliers_east, r.suppliers_south, r.suppliers_total, r.chain_alive, r.welfare
        );
    }
    out
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let bytes = read(&args.config)?;
    let mut config: ScenarioConfig = serde_json::from_slice(&bytes).map_err(|e| CliError::json(&args.config, e))?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    config
        .validate()
        .map_err(|e| CliError::model(args.config.display().to_string(), e))?;
    ensure_dir(&args.out)?;
    let mut rec = Recorder::new(&args.out, &command_line(), &[(&args.config, &bytes)], Some(config.seed));
    let context = |e| CliError::model("simulate", e);

    let cells: Vec<TimeSeries> = if args.matrix {
        run_matrix(&config).map_err(context)?.iter().cloned().collect()
    } else {
        vec![run_scenario(&config).map_err(context)?]
    };
    let base = cells
        .iter()
        .find(|c| c.realization == config.realization && c.info_env == config.info_env)
        .expect("configured cell is always run");
    rec.write(TIMESERIES_FILE, timeseries_csv(base).as_bytes())?;
    if args.matrix {
        for cell in &cells {
            rec.write(&format!("{}.csv", cell.cell_name()), timeseries_csv(cell).as_bytes())?;
        }
    }
    if args.plot {
        let run_id = rec.run_id().to_string();
        for cell in &cells {
            rec.write(
                &format!("{}.svg", cell.cell_name()),
                supplier_chart(cell, &run_id).as_bytes(),
            )?;
        }
    }
    if let Some(runs) = args.runs {
        let est = monte_carlo_survival(&config, runs, config.seed).map_err(context)?;
        let csv = format!(
            "runs,survival_rate,mean_welfare,stderr\n{},{},{},{}\n",
            est.runs, est.survival_rate, est.mean_welfare, est.stderr
        );
        rec.write(SURVIVAL_FILE, csv.as_bytes())?;
    }
    rec.finish()?;
    Ok(())
}

fn reliance_matrix(args: &RelianceArgs, path: &Path, kind: RelianceKind) -> Result<RelianceMatrix> {
    let context = |e| CliError::model(path.display().to_string(), e);
    let table = load_table(path).map_err(context)?;
    let sectors = resolve_sectors(&table, &args.sector).map_err(context)?;
    let m = match kind {
        RelianceKind::Input => compute_fir(&table, &sectors, args.measure),
        RelianceKind::Market => compute_fmr(&table, &sectors, args.measure),
    }
    .map_err(context)?;
    if args.focus.is_empty() {
        Ok(m)
    } else {
        m.focused(&args.focus).map_err(context)
    }
}

pub fn reliance(args: &RelianceArgs, kind: RelianceKind) -> Result<()> {
    let first = reliance_matrix(args, &args.table, kind)?;
    let out = match (&args.table2, args.diff) {
        (Some(t2), true) => {
            let second = reliance_matrix(args, t2, kind)?;
            reliance_change(&first, &second).map_err(|e| CliError::model("--diff", e))?
        }
        (Some(t2), false) => reliance_matrix(args, t2, kind)?,
        (None, _) => first,
    };
    let csv = out.to_csv();
    match &args.out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                ensure_dir(dir)?;
            }
            fs::write(path, csv).map_err(|e| CliError::io(path, e))
        }
        None => std::io::stdout()
            .write_all(csv.as_bytes())
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

#[derive(Deserialize)]
struct EquilibriumInput {
    #[serde(flatten)]
    economy: EconomySpec,
    #[serde(default)]
    solver: SolverConfig,
}

/// Reads the `wage` column of a previously written equilibrium.csv.
fn read_initial_wages(path: &Path) -> Result<Vec<f64>> {
    let text = String::from_utf8(read(path)?).map_err(|_| CliError::Usage(format!("{}: not UTF-8", path.display())))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    let col = header
        .split(',')
        .position(|h| h.trim() == "wage")
        .ok_or_else(|| CliError::Usage(format!("{}:1: no wage column", path.display())))?;
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.split(',')
                .nth(col)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| CliError::Usage(format!("{}:{}: bad wage value", path.display(), i + 2)))
        })
        .collect()
}

pub fn equilibrium(args: &EquilibriumArgs) -> Result<()> {
    let bytes = read(&args.params)?;
    let input: EquilibriumInput = serde_json::from_slice(&bytes).map_err(|e| CliError::json(&args.params, e))?;
    let context = |e| CliError::model(args.params.display().to_string(), e);
    let params = EconomyParams::new(input.economy).map_err(context)?;
    let mut solver = input.solver;
    if let Some(n) = args.max_iterations {
        solver.max_iterations = n;
    }
    if let Some(t) = args.tolerance {
        solver.tolerance = t;
    }
    let mut inputs: Vec<(&Path, Vec<u8>)> = vec![(&args.params, bytes.clone())];
    if let Some(path) = &args.initial {
        solver.initial_wages = Some(read_initial_wages(path)?);
        inputs.push((path, read(path)?));
    }

    let solution = solve_equilibrium_observed(&params, &solver, |it| {
        log::debug!(
            "iteration {} damping {} residuals {:?}",
            it.iteration,
            it.damping,
            it.residuals
        );
    })
    .map_err(|e| CliError::model("equilibrium", e))?;
    log::info!(
        "converged in {} iterations, residual {:e}",
        solution.iterations,
        solution.residual_norm
    );

    ensure_dir(&args.out)?;
    let refs: Vec<(&Path, &[u8])> = inputs.iter().map(|(p, b)| (*p, b.as_slice())).collect();
    let mut rec = Recorder::new(&args.out, &command_line(), &refs, None);

    let mut csv = String::from("location,wage,price,composite_cost,real_wage,residual_norm,iterations\n");
    let real = solution.real_wages();
    for j in 0..params.locations() {
        let _ = writeln!(
            csv,
            "{j},{},{},{},{},{:e},{}",
            solution.wages.values[j],
            solution.prices[j],
            solution.composite_costs[j],
            real[j],
            solution.residual_norm,
            solution.iterations
        );
    }
    rec.write(EQUILIBRIUM_FILE, csv.as_bytes())?;

    match enumerate_paths(params.locations(), params.tiers()) {
        Ok(paths) => {
            let model = solution.chain_model(&params).map_err(context)?;
            let mut out = String::from("destination,path,share\n");
            for dest in 0..params.locations() {
                let shares = model.path_shares(dest).map_err(context)?;
                debug_assert_eq!(shares.len(), paths.len());
                for (path, share) in shares {
                    let label: Vec<String> = path.tiers().iter().map(|i| i.to_string()).collect();
                    let _ = writeln!(out, "{dest},{},{share}", label.join("-"));
                }
            }
            rec.write(PATH_SHARES_FILE, out.as_bytes())?;
        }
        Err(e) => log::warn!("path share table skipped: {e}"),
    }
    rec.finish()?;
    Ok(())
}
