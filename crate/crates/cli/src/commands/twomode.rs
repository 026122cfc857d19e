use std::path::PathBuf;

use rayon::prelude::*;

use polariton_core::spectrum::{polariton_spectrum, Branch};
use polariton_core::thermo::{CycleBranch, OttoCycleSpec};
use polariton_core::twomode::{eliminate_c, two_mode_frequencies, two_mode_otto, ValidityGuard};

use super::template;
use crate::config::Kind;
use crate::output::{Cell, Table};
use crate::plot::PlotSpec;
use crate::{warn, CliError, Context};

pub fn twomode(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    ctx.config.check_blocks("twomode", &["twomode"], &[])?;
    let block = ctx.config.twomode.as_ref().unwrap();
    let u = &ctx.resolved.units;
    let guard = match block.max_detuning_ratio {
        Some(r) => ValidityGuard::with_detuning_ratio(r),
        None => ValidityGuard::default(),
    };
    let coupling = ctx.resolved.scaled.coupling;
    let meta = ctx.metadata("twomode");
    let mut files = Vec::new();

    if let Some(axis) = &block.detuning {
        let detunings = axis.values(u, Kind::Frequency, "twomode.detuning")?;
        let base = template(ctx, detunings[0], coupling)?;
        let rows = detunings
            .par_iter()
            .map(|&d| {
                let m = base.at_detuning(d);
                let (lower, upper) = two_mode_frequencies(&eliminate_c(&m, &guard)?);
                let exact = polariton_spectrum(&m)?.frequency(Branch::A);
                Ok(vec![Cell::from(d), lower.into(), upper.into(), exact.into()])
            })
            .collect::<Result<Vec<_>, polariton_core::Error>>()?;
        let mut table = Table::new(&["detuning", "Omega_minus", "Omega_plus", "omega_A"]);
        rows.into_iter().for_each(|r| table.push(r));
        let plot = PlotSpec::lines("detuning", &["Omega_minus", "Omega_plus", "omega_A"]);
        files.extend(ctx.emit(&table, "twomode_spectrum", &meta, &[("", plot)])?);
    }

    match (&block.detuning_i, &block.detuning_f, &block.coupling) {
        (Some(di), Some(df_axis), Some(g_axis)) => {
            let det_i = u.resolve(di, Kind::Frequency, "twomode.detuning_i")?;
            let dfs = df_axis.values(u, Kind::Frequency, "twomode.detuning_f")?;
            let gs = g_axis.values(u, Kind::Frequency, "twomode.coupling")?;
            let points: Vec<(f64, f64)> = dfs.iter().flat_map(|d| gs.iter().map(move |g| (*d, *g))).collect();
            let rows: Vec<Vec<Cell>> = points
                .par_iter()
                .map(|&(df, g)| {
                    let mut spec = OttoCycleSpec::from_config(&ctx.resolved.scaled, det_i, df);
                    spec.coupling = g;
                    spec.branch = CycleBranch::LowerTwoMode;
                    match two_mode_otto(&spec, &guard) {
                        Ok(r) => vec![df.into(), g.into(), r.efficiency.into(), 0usize.into()],
                        Err(e) => {
                            let code = CliError::from(e).exit_code() as i64;
                            vec![df.into(), g.into(), f64::NAN.into(), code.into()]
                        }
                    }
                })
                .collect();
            let failed = rows.iter().filter(|r| r[3] != Cell::Int(0)).count();
            if failed > 0 {
                warn(&format!("{failed} of {} grid points failed; see the status column", rows.len()));
            }
            let mut table = Table::new(&["detuning_f", "G", "eta", "status"]);
            rows.into_iter().for_each(|r| table.push(r));
            files.extend(ctx.emit(&table, "twomode_efficiency", &meta, &[("", PlotSpec::heatmap("detuning_f", "G", "eta"))])?);
        }
        (None, None, None) => {}
        _ => {
            return Err(CliError::Validation(
                "the two-mode efficiency grid needs detuning_i, detuning_f and coupling together".into(),
            ))
        }
    }
    if files.is_empty() {
        return Err(CliError::Validation("`twomode` needs a `detuning` axis or an efficiency grid".into()));
    }
    Ok(files)
}
