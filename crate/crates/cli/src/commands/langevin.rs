use std::fs;
use std::path::PathBuf;

use polariton_core::langevin::{
    heat_work_rates, polariton_mode, simulate_bare, simulate_driven, simulate_polariton, InitialState, ModeNoise,
    NoiseSpec, SimulationOptions, Stepper, TrajectoryEnsemble,
};
use polariton_core::spectrum::polariton_spectrum;
use polariton_core::sta::SampledSchedule;
use polariton_core::thermo::bose_occupation;

use super::{baths, parse_branch, template};
use crate::config::{InitialInput, Kind, LangevinBlock};
use crate::output::{Cell, CsvData, Table};
use crate::plot::PlotSpec;
use crate::{CliError, Context};

fn parse_stepper(s: Option<&str>) -> Result<Stepper, CliError> {
    match s.unwrap_or("euler-maruyama") {
        "euler-maruyama" => Ok(Stepper::EulerMaruyama),
        "exact" => Ok(Stepper::Exact),
        other => Err(CliError::Validation(format!("unknown stepper `{other}` (expected euler-maruyama or exact)"))),
    }
}

fn parse_initial(s: Option<&InitialInput>) -> Result<InitialState<f64>, CliError> {
    match s {
        None => Ok(InitialState::Stationary),
        Some(InitialInput::Named(n)) if n == "stationary" => Ok(InitialState::Stationary),
        Some(InitialInput::Named(n)) if n == "vacuum" => Ok(InitialState::Vacuum),
        Some(InitialInput::Named(n)) => Err(CliError::Validation(format!("unknown initial state `{n}`"))),
        Some(InitialInput::Thermal { thermal }) => Ok(InitialState::Thermal(thermal.clone())),
    }
}

/// Reads a (t, omega) CSV on a uniform grid starting at t = 0.
fn read_schedule(path: &str) -> Result<SampledSchedule<f64>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Validation(format!("schedule {path}: {e}")))?;
    let data = CsvData::parse(&text)?;
    let t = data.column("t")?;
    let omega = data.column("omega")?;
    if t.len() < 2 || t[0] != 0.0 {
        return Err(CliError::Validation("schedule needs at least two rows starting at t = 0".into()));
    }
    let h = t[1] - t[0];
    let uniform = t.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1.0));
    if !(h > 0.0) || !uniform {
        return Err(CliError::Validation("schedule times must be increasing and uniformly spaced".into()));
    }
    if omega.iter().any(|w| !w.is_finite()) {
        return Err(CliError::Validation("schedule frequencies must be finite".into()));
    }
    Ok(SampledSchedule::new(*t.last().unwrap(), omega)?)
}

fn bare_modes(ctx: &Context, block: &LangevinBlock, detuning: f64) -> Result<Vec<ModeNoise<f64>>, CliError> {
    if block.damping.is_some() || block.occupation.is_some() || block.branch.is_some() {
        return Err(CliError::Validation("damping, occupation and branch apply to polariton runs only".into()));
    }
    let b = baths(ctx);
    let (wc, wd) = (ctx.resolved.omega_c(), ctx.resolved.omega_d());
    Ok(vec![
        ModeNoise { frequency: detuning, damping: b.photon_decay, occupation: b.photon_occupation(detuning)? },
        ModeNoise { frequency: wc, damping: b.phonon_decay, occupation: bose_occupation(wc, b.phonon_thermal)? },
        ModeNoise { frequency: wd, damping: b.phonon_decay, occupation: bose_occupation(wd, b.phonon_thermal)? },
    ])
}

pub fn langevin(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    ctx.config.check_blocks("langevin", &["langevin"], &[])?;
    let block = ctx.config.langevin.as_ref().unwrap();
    let u = &ctx.resolved.units;
    let detuning = u.resolve(&block.detuning, Kind::Frequency, "langevin.detuning")?;
    let dt = u.resolve(&block.dt, Kind::Time, "langevin.dt")?;
    let horizon = u.resolve(&block.horizon, Kind::Time, "langevin.horizon")?;
    if !(dt > 0.0 && horizon > 0.0) {
        return Err(CliError::Validation("dt and horizon must be positive".into()));
    }
    let steps = (horizon / dt).round() as usize;
    let opts = SimulationOptions {
        dt,
        steps,
        trajectories: block.trajectories,
        record_every: block.record_every.unwrap_or((steps / 100).max(1)),
        stepper: parse_stepper(block.stepper.as_deref())?,
    };
    let init = parse_initial(block.initial.as_ref())?;
    let seed = ctx.seed.or(block.seed).unwrap_or(0);

    let (labels, ensemble): (Vec<String>, TrajectoryEnsemble<f64>) = match block.modes.as_deref().unwrap_or("polariton") {
        "polariton" => {
            let branch = parse_branch(block.branch.as_deref())?;
            let s = polariton_spectrum(&template(ctx, detuning, ctx.resolved.scaled.coupling)?)?;
            let mut mode = polariton_mode(&s, branch, &baths(ctx))?;
            if let Some(q) = &block.damping {
                mode.damping = u.resolve(q, Kind::Frequency, "langevin.damping")?;
            }
            if let Some(n) = block.occupation {
                mode.occupation = n;
            }
            let e = match &block.schedule {
                Some(path) => simulate_driven(mode, seed, &read_schedule(path)?, &opts, &init)?,
                None => simulate_polariton(mode, seed, &opts, &init)?,
            };
            (vec![branch.label().to_string()], e)
        }
        "bare" => {
            if block.schedule.is_some() {
                return Err(CliError::Validation("a frequency schedule drives a single polariton mode".into()));
            }
            let modes = bare_modes(ctx, block, detuning)?;
            (vec!["a".into(), "c".into(), "d".into()], simulate_bare(&NoiseSpec { modes, seed }, &opts, &init)?)
        }
        other => return Err(CliError::Validation(format!("unknown mode set `{other}` (expected polariton or bare)"))),
    };

    let mut columns = vec!["t".to_string()];
    for l in &labels {
        columns.push(format!("n_{l}"));
        columns.push(format!("n_{l}_err"));
    }
    for c in ["dW_dt", "dQ_dt", "dE_dt"] {
        columns.push(c.into());
        columns.push(format!("{c}_err"));
    }
    let rates = heat_work_rates(&ensemble);
    let mut table = Table::new(&columns);
    for (r, t) in ensemble.times.iter().enumerate() {
        let mut row = vec![Cell::from(*t)];
        for occ in &ensemble.occupation {
            row.push(occ[r].mean.into());
            row.push(occ[r].std_err.into());
        }
        match r.checked_sub(1).map(|k| &rates[k]) {
            Some(rate) => {
                for s in [rate.work_rate, rate.heat_rate, rate.energy_rate] {
                    row.push(s.mean.into());
                    row.push(s.std_err.into());
                }
            }
            None => row.extend(std::iter::repeat_n(Cell::Num(f64::NAN), 6)),
        }
        table.push(row);
    }

    let mut summary = Table::new(&[
        "trajectories",
        "dt",
        "steps",
        "W",
        "W_err",
        "Q",
        "Q_err",
        "first_law_residual",
        "first_law_residual_err",
    ]);
    summary.push(vec![
        ensemble.trajectories.into(),
        dt.into(),
        steps.into(),
        ensemble.total_work.mean.into(),
        ensemble.total_work.std_err.into(),
        ensemble.total_heat.mean.into(),
        ensemble.total_heat.std_err.into(),
        ensemble.first_law_residual.mean.into(),
        ensemble.first_law_residual.std_err.into(),
    ]);

    let meta = ctx.metadata("langevin").with("seed", seed);
    let occ_cols: Vec<String> = labels.iter().map(|l| format!("n_{l}")).collect();
    let occ_refs: Vec<&str> = occ_cols.iter().map(String::as_str).collect();
    let mut files = ctx.emit(&table, "langevin", &meta, &[("", PlotSpec::lines("t", &occ_refs))])?;
    files.extend(ctx.emit(&summary, "langevin_summary", &meta, &[])?);
    Ok(files)
}
