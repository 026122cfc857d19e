mod cycle;
mod langevin;
mod sta;
mod twomode;

pub use cycle::{finite, otto, sweep};
pub use langevin::langevin;
pub use sta::sta;
pub use twomode::twomode;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use polariton_core::spectrum::{polariton_spectrum, Branch, CouplingMatrix};
use polariton_core::thermo::{polariton_occupation, BathSpec};

use crate::config::Kind;
use crate::output::{CsvData, Table};
use crate::plot::{render_svg, PlotSpec};
use crate::{write_file, CliError, Context, PlotArgs};

pub(crate) fn parse_branch(s: Option<&str>) -> Result<Branch, CliError> {
    match s.unwrap_or("A") {
        "A" | "a" => Ok(Branch::A),
        "C" | "c" => Ok(Branch::C),
        "B" | "b" => Ok(Branch::B),
        other => Err(CliError::Validation(format!("unknown branch `{other}` (expected A, C or B)"))),
    }
}

pub(crate) fn baths(ctx: &Context) -> BathSpec<f64> {
    BathSpec::from_config(&ctx.resolved.scaled)
}

pub(crate) fn template(ctx: &Context, detuning: f64, coupling: f64) -> Result<CouplingMatrix<f64>, CliError> {
    Ok(CouplingMatrix::new(detuning, ctx.resolved.omega_c(), ctx.resolved.omega_d(), coupling)?)
}

pub fn spectrum(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    ctx.config.check_blocks("spectrum", &["spectrum"], &[])?;
    let block = ctx.config.spectrum.as_ref().unwrap();
    let units = &ctx.resolved.units;
    let detunings = block.detuning.values(units, Kind::Frequency, "spectrum.detuning")?;
    let coupling = match &block.coupling {
        Some(q) => units.resolve(q, Kind::Frequency, "spectrum.coupling")?,
        None => ctx.resolved.scaled.coupling,
    };
    let base = template(ctx, detunings[0], coupling)?;

    let mut columns = vec!["detuning".to_string()];
    columns.extend(Branch::ALL.iter().map(|b| format!("omega_{}", b.label())));
    for b in Branch::ALL {
        for mode in ["a", "c", "d"] {
            columns.push(format!("X_{mode}_{}", b.label()));
        }
    }
    let rows = detunings
        .par_iter()
        .map(|&d| {
            let s = polariton_spectrum(&base.at_detuning(d))?;
            let mut row = vec![d.into()];
            row.extend(Branch::ALL.iter().map(|b| s.frequency(*b).into()));
            for b in Branch::ALL {
                row.extend(s.weights(b).iter().map(|w| (*w).into()));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, polariton_core::Error>>()?;
    let mut table = Table::new(&columns);
    rows.into_iter().for_each(|r| table.push(r));

    let mut plot = PlotSpec::lines("detuning", &["omega_A", "omega_C", "omega_B"]);
    plot.log_x = block.detuning.scale == crate::config::Scale::Log;
    plot.log_y = plot.log_x;
    ctx.emit(&table, "spectrum", &ctx.metadata("spectrum"), &[("", plot)])
}

pub fn hopfield(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    ctx.config.check_blocks("hopfield", &["hopfield"], &[])?;
    let block = ctx.config.hopfield.as_ref().unwrap();
    let d = ctx.resolved.units.resolve(&block.detuning, Kind::Frequency, "hopfield.detuning")?;
    let s = polariton_spectrum(&template(ctx, d, ctx.resolved.scaled.coupling)?)?;
    let baths = baths(ctx);
    let mut table = Table::new(&["branch", "detuning", "omega", "X_a", "X_c", "X_d", "occupation"]);
    for b in Branch::ALL {
        let [xa, xc, xd] = s.weights(b);
        let n = match polariton_occupation(&s, &baths, b) {
            Ok(n) => n,
            Err(e) => {
                crate::warn(&format!("branch {}: {e}", b.label()));
                f64::NAN
            }
        };
        table.push(vec![b.label().into(), d.into(), s.frequency(b).into(), xa.into(), xc.into(), xd.into(), n.into()]);
    }
    ctx.emit(&table, "hopfield", &ctx.metadata("hopfield"), &[])
}

pub fn plot(args: &PlotArgs, out: Option<&Path>) -> Result<Vec<PathBuf>, CliError> {
    let text = fs::read_to_string(&args.csv).map_err(|e| CliError::Validation(format!("{}: {e}", args.csv.display())))?;
    let data = CsvData::parse(&text)?;
    let spec = PlotSpec {
        x: args.x.clone(),
        y: args.y.clone(),
        z: args.z.clone(),
        log_x: args.log_x,
        log_y: args.log_y,
        title: args.title.clone(),
    };
    let provenance = match &data.metadata {
        Some(m) => format!("plot of {m}"),
        None => format!("plot csv_sha256={}", crate::output::sha256_hex(text.as_bytes())),
    };
    let svg = render_svg(&data, &spec, &provenance)?;
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| args.csv.parent().map(Path::to_path_buf).unwrap_or_default());
    fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let name = args.name.clone().unwrap_or_else(|| {
        let stem = args.csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "plot".into());
        format!("{stem}.svg")
    });
    Ok(vec![write_file(&dir.join(name), &svg)?])
}
