use std::path::PathBuf;

use polariton_core::sta::{
    adiabaticity_parameter, detuning_protocol, lower_branch_frequency, minimum_feasible_duration, sample_protocol, Ansatz,
    LinearRamp,
};
use polariton_core::Error as CoreError;

use super::template;
use crate::config::Kind;
use crate::output::{Cell, Table};
use crate::plot::PlotSpec;
use crate::{warn, CliError, Context};

pub(crate) fn parse_ansatz(s: Option<&str>) -> Result<Ansatz, CliError> {
    match s.unwrap_or("polynomial") {
        "polynomial" => Ok(Ansatz::Polynomial),
        "trigonometric" => Ok(Ansatz::Trigonometric),
        other => Err(CliError::Validation(format!("unknown ansatz `{other}` (expected polynomial or trigonometric)"))),
    }
}

pub fn sta(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    ctx.config.check_blocks("sta", &["sta"], &[])?;
    let block = ctx.config.sta.as_ref().unwrap();
    let u = &ctx.resolved.units;
    let ansatz = parse_ansatz(block.ansatz.as_deref())?;
    let tau = u.resolve(
        block.tau.as_ref().ok_or_else(|| CliError::Validation("`sta.tau` is required".into()))?,
        Kind::Time,
        "sta.tau",
    )?;
    let samples = block.samples.unwrap_or(1001);

    let (wi, wf, det_i, det_f, base) = match (&block.omega_i, &block.omega_f, &block.detuning_i, &block.detuning_f) {
        (Some(a), Some(b), None, None) => {
            let (wi, wf) = (u.resolve(a, Kind::Frequency, "sta.omega_i")?, u.resolve(b, Kind::Frequency, "sta.omega_f")?);
            // Template detuning only sets the inversion bracket.
            let base = template(ctx, 1.0, ctx.resolved.scaled.coupling)?;
            (wi, wf, f64::NAN, f64::NAN, base)
        }
        (None, None, Some(a), Some(b)) => {
            let di = u.resolve(a, Kind::Frequency, "sta.detuning_i")?;
            let df = u.resolve(b, Kind::Frequency, "sta.detuning_f")?;
            let base = template(ctx, di.max(df), ctx.resolved.scaled.coupling)?;
            (lower_branch_frequency(&base, di)?, lower_branch_frequency(&base, df)?, di, df, base)
        }
        _ => {
            return Err(CliError::Validation(
                "`sta` needs either omega_i and omega_f or detuning_i and detuning_f".into(),
            ))
        }
    };

    let protocol = sample_protocol(ansatz, tau, wi, wf, samples)?;
    let with_detuning = if protocol.feasible {
        match detuning_protocol(&protocol, &base) {
            Ok(p) => p,
            Err(e) => {
                warn(&format!("detuning column left empty: {e}"));
                protocol.clone()
            }
        }
    } else {
        protocol.clone()
    };

    let mut table = Table::new(&["t", "rho", "omega", "detuning"]);
    for s in &with_detuning.samples {
        table.push(vec![s.t.into(), s.rho.into(), s.omega().into(), s.detuning.unwrap_or(f64::NAN).into()]);
    }

    let want_q = block.q_star.unwrap_or(true);
    let q_star = if want_q && protocol.feasible { adiabaticity_parameter(&protocol.schedule())?.q_star } else { f64::NAN };
    let q_linear = if block.linear_reference.unwrap_or(false) {
        adiabaticity_parameter(&LinearRamp { tau, omega_i: wi, omega_f: wf })?.q_star
    } else {
        f64::NAN
    };
    let tau_min = minimum_feasible_duration(ansatz, wi, wf, 4001)?;
    let (min_sq, _) = protocol.min_omega_sq();

    let mut summary = Table::new(&[
        "ansatz",
        "tau",
        "omega_i",
        "omega_f",
        "detuning_i",
        "detuning_f",
        "feasible",
        "min_omega_sq",
        "tau_min",
        "q_star",
        "q_star_linear",
        "ermakov_pinney_residual",
    ]);
    summary.push(vec![
        Cell::from(ansatz.name()),
        tau.into(),
        wi.into(),
        wf.into(),
        det_i.into(),
        det_f.into(),
        protocol.feasible.into(),
        min_sq.into(),
        tau_min.into(),
        q_star.into(),
        q_linear.into(),
        protocol.ermakov_pinney_residual().into(),
    ]);

    let meta = ctx.metadata("sta");
    let mut detuning_plot = PlotSpec::lines("t", &["detuning"]);
    detuning_plot.log_y = true;
    let mut files = ctx.emit(&table, "sta", &meta, &[("", PlotSpec::lines("t", &["omega"])), ("_detuning", detuning_plot)])?;
    files.extend(ctx.emit(&summary, "sta_summary", &meta, &[])?);
    if !protocol.feasible {
        let (min, at) = protocol.min_omega_sq();
        return Err(CoreError::InfeasibleProtocol { min_omega_sq: min, at }.into());
    }
    Ok(files)
}
