use std::path::PathBuf;

use rayon::prelude::*;

use polariton_core::finitetime::{relax_cycle, IsochoreTiming};
use polariton_core::langevin::effective_damping;
use polariton_core::spectrum::{polariton_spectrum, Branch};
use polariton_core::sta::{adiabaticity_parameter, sample_protocol};
use polariton_core::thermo::{cycle_endpoints, CycleBranch, CycleResult, OttoCycleSpec, PhotonOccupation, ReservoirModel};
use polariton_core::twomode::{two_mode_endpoints, ValidityGuard};

use super::sta::parse_ansatz;
use crate::config::{FiniteBlock, Kind, OttoBlock, PhotonOccupationInput, Resolved, StaBlock};
use crate::output::{Cell, Table};
use crate::plot::PlotSpec;
use crate::{warn, CliError, Context};

const CYCLE_COLUMNS: [&str; 8] = ["W", "Q_in", "Q_out", "eta", "Omega_i", "Omega_f", "n_i", "n_f"];
const SWEEP_AXES: [&str; 7] = ["detuning_f", "detuning_i", "coupling", "oam", "tau_bc", "tau_da", "tau"];

/// Cycle spec plus the two-mode guard it is evaluated with.
#[derive(Clone, Copy, Debug)]
pub(crate) struct CycleSetup {
    pub spec: OttoCycleSpec<f64>,
    pub guard: ValidityGuard<f64>,
}

impl CycleSetup {
    pub fn from_block(resolved: &Resolved, block: &OttoBlock) -> Result<Self, CliError> {
        let u = &resolved.units;
        let det_i = u.resolve(&block.detuning_i, Kind::Frequency, "otto.detuning_i")?;
        let det_f = u.resolve(&block.detuning_f, Kind::Frequency, "otto.detuning_f")?;
        let mut spec = OttoCycleSpec::from_config(&resolved.scaled, det_i, det_f);
        spec.branch = match block.branch.as_deref().unwrap_or("A") {
            "A" | "a" => CycleBranch::Polariton(Branch::A),
            "two-mode" | "lower-two-mode" => CycleBranch::LowerTwoMode,
            other => return Err(CliError::Validation(format!("unknown cycle branch `{other}` (expected A or two-mode)"))),
        };
        spec.reservoir = match block.reservoir.as_deref().unwrap_or("stroke") {
            "stroke" => ReservoirModel::Stroke,
            "shared" => ReservoirModel::Shared,
            other => return Err(CliError::Validation(format!("unknown reservoir model `{other}`"))),
        };
        spec.baths.photon_occupation = match &block.photon_occupation {
            None => PhotonOccupation::Zero,
            Some(PhotonOccupationInput::Named(s)) if s == "zero" => PhotonOccupation::Zero,
            Some(PhotonOccupationInput::Named(s)) if s == "thermal" => PhotonOccupation::Thermal,
            Some(PhotonOccupationInput::Fixed(n)) => PhotonOccupation::Fixed(*n),
            Some(PhotonOccupationInput::Named(s)) => {
                return Err(CliError::Validation(format!("unknown photon occupation `{s}`")))
            }
        };
        let guard = match block.max_detuning_ratio {
            Some(r) => ValidityGuard::with_detuning_ratio(r),
            None => ValidityGuard::default(),
        };
        Ok(Self { spec, guard })
    }

    pub fn endpoints(&self) -> polariton_core::Result<(f64, f64, f64, f64)> {
        match self.spec.branch {
            CycleBranch::LowerTwoMode => two_mode_endpoints(&self.spec, &self.guard),
            CycleBranch::Polariton(_) => cycle_endpoints(&self.spec),
        }
    }

    pub fn ideal(&self) -> polariton_core::Result<CycleResult<f64>> {
        let (wi, wf, ni, nf) = self.endpoints()?;
        CycleResult::evaluate(wi, wf, ni, nf)
    }
}

fn cycle_cells(r: &CycleResult<f64>) -> Vec<Cell> {
    [r.work, r.heat_in, r.heat_out, r.efficiency, r.omega_i, r.omega_f, r.n_i, r.n_f].map(Cell::from).to_vec()
}

/// Same columns from raw endpoints, without the engine check.
fn raw_cycle_cells(wi: f64, wf: f64, ni: f64, nf: f64) -> Vec<Cell> {
    let contrast = ni - nf;
    let (w, q_in, q_out) = ((wi - wf) * contrast, wi * contrast, -wf * contrast);
    let eta = if q_in != 0.0 { w / q_in } else { f64::NAN };
    [w, q_in, q_out, eta, wi, wf, ni, nf].map(Cell::from).to_vec()
}

pub fn otto(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    ctx.config.check_blocks("otto", &["otto"], &[])?;
    let block = ctx.config.otto.as_ref().unwrap();
    let setup = CycleSetup::from_block(&ctx.resolved, block)?;
    for w in setup.spec.regime_warnings() {
        warn(&w);
    }
    let result = setup.ideal()?;
    let meta = ctx.metadata("otto");
    let mut table = Table::new(&CYCLE_COLUMNS);
    table.push(cycle_cells(&result));
    let mut files = ctx.emit(&table, "otto", &meta, &[])?;

    if block.branch_b_diagnostic.unwrap_or(false) {
        let b = OttoCycleSpec { branch: CycleBranch::Polariton(Branch::B), ..setup.spec };
        let (wi, wf, ni, nf) = cycle_endpoints(&b)?;
        let mut diag = Table::new(&CYCLE_COLUMNS);
        diag.push(raw_cycle_cells(wi, wf, ni, nf));
        files.extend(ctx.emit(&diag, "otto_branch_b", &meta, &[])?);
    }
    Ok(files)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum RateModel {
    Bare,
    Hopfield,
}

#[derive(Clone, Copy, Debug)]
struct FiniteSetup {
    tau_bc: f64,
    tau_da: f64,
    rates: RateModel,
}

impl FiniteSetup {
    fn from_block(resolved: &Resolved, block: &FiniteBlock) -> Result<Self, CliError> {
        let u = &resolved.units;
        let rates = match block.rates.as_deref().unwrap_or("bare") {
            "bare" => RateModel::Bare,
            "hopfield" => RateModel::Hopfield,
            other => return Err(CliError::Validation(format!("unknown rate model `{other}`"))),
        };
        Ok(Self {
            tau_bc: u.resolve(&block.tau_bc, Kind::Time, "finite.tau_bc")?,
            tau_da: u.resolve(&block.tau_da, Kind::Time, "finite.tau_da")?,
            rates,
        })
    }

    fn timing(&self, cycle: &CycleSetup) -> polariton_core::Result<IsochoreTiming<f64>> {
        let baths = &cycle.spec.baths;
        let (photon_rate, phonon_rate) = match self.rates {
            RateModel::Bare => (baths.photon_decay, baths.phonon_decay),
            RateModel::Hopfield => {
                let CycleBranch::Polariton(branch) = cycle.spec.branch else {
                    return Err(polariton_core::Error::InvalidParameter {
                        name: "finite.rates",
                        reason: "Hopfield rates need a three-mode branch".into(),
                    });
                };
                let rate = |m| -> polariton_core::Result<f64> {
                    let s = polariton_spectrum(&m)?;
                    Ok(effective_damping(s.weights(branch), baths.photon_decay, baths.phonon_decay))
                };
                (rate(cycle.spec.final_matrix()?)?, rate(cycle.spec.initial_matrix()?)?)
            }
        };
        Ok(IsochoreTiming { tau_bc: self.tau_bc, tau_da: self.tau_da, photon_rate, phonon_rate })
    }
}

pub fn finite(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    ctx.config.check_blocks("finite", &["finite", "otto"], &[])?;
    let cycle = CycleSetup::from_block(&ctx.resolved, ctx.config.otto.as_ref().unwrap())?;
    let setup = FiniteSetup::from_block(&ctx.resolved, ctx.config.finite.as_ref().unwrap())?;
    let timing = setup.timing(&cycle)?;
    let r = relax_cycle(cycle.endpoints()?, &timing)?;
    if r.lifetime_warning {
        warn(&format!("phonon isochore τ_da = {} exceeds the condensate lifetime 1/γ_m", timing.tau_da));
    }
    let mut table =
        Table::new(&["tau_bc", "tau_da", "W", "Q_in", "eta", "eta_ideal", "n_a", "n_b", "n_c", "n_d", "lifetime_warning"]);
    let mut row: Vec<Cell> = vec![
        timing.tau_bc.into(),
        timing.tau_da.into(),
        r.cycle.work.into(),
        r.cycle.heat_in.into(),
        r.cycle.efficiency.into(),
        r.ideal.efficiency.into(),
    ];
    row.extend(r.state.corners.iter().map(|n| Cell::from(*n)));
    row.push(r.lifetime_warning.into());
    table.push(row);
    ctx.emit(&table, "finite", &ctx.metadata("finite"), &[])
}

struct StaSetup {
    ansatz: polariton_core::sta::Ansatz,
    samples: usize,
}

fn sweep_sta(block: Option<&StaBlock>) -> Result<StaSetup, CliError> {
    let block = block.ok_or_else(|| CliError::Validation("a `tau` axis needs an `sta` block".into()))?;
    if block.tau.is_some() || block.omega_i.is_some() || block.omega_f.is_some() {
        return Err(CliError::Validation("in a sweep, `sta` takes τ from the axis and Ω from the cycle".into()));
    }
    Ok(StaSetup { ansatz: parse_ansatz(block.ansatz.as_deref())?, samples: block.samples.unwrap_or(1001) })
}

pub fn sweep(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    ctx.config.check_blocks("sweep", &["sweep", "otto"], &["finite", "sta"])?;
    let axes = &ctx.config.sweep.as_ref().unwrap().axes;
    if axes.is_empty() || axes.len() > 2 {
        return Err(CliError::Validation(format!("sweep needs 1 or 2 axes, got {}", axes.len())));
    }
    let mut names = Vec::new();
    let mut values = Vec::new();
    for axis in axes {
        let name = axis.name.clone().ok_or_else(|| CliError::Validation("every sweep axis needs a `name`".into()))?;
        if !SWEEP_AXES.contains(&name.as_str()) {
            return Err(CliError::Validation(format!("unknown sweep axis `{name}`; allowed: {}", SWEEP_AXES.join(", "))));
        }
        if names.contains(&name) {
            return Err(CliError::Validation(format!("duplicate sweep axis `{name}`")));
        }
        let kind = match name.as_str() {
            "oam" => Kind::Number,
            "tau_bc" | "tau_da" | "tau" => Kind::Time,
            _ => Kind::Frequency,
        };
        let mut v = axis.values(&ctx.resolved.units, kind, &format!("sweep.{name}"))?;
        if name == "oam" {
            v.iter_mut().for_each(|x| *x = x.round());
            if v.iter().any(|x| *x < 1.0) {
                return Err(CliError::Validation("oam axis values must be >= 1".into()));
            }
        }
        names.push(name);
        values.push(v);
    }

    let base = CycleSetup::from_block(&ctx.resolved, ctx.config.otto.as_ref().unwrap())?;
    let has = |n: &str| names.iter().any(|x| x == n);
    let finite = match &ctx.config.finite {
        Some(b) => Some(FiniteSetup::from_block(&ctx.resolved, b)?),
        None if has("tau_bc") || has("tau_da") => {
            return Err(CliError::Validation("tau_bc/tau_da axes need a `finite` block".into()))
        }
        None => None,
    };
    let sta = if has("tau") {
        Some(sweep_sta(ctx.config.sta.as_ref())?)
    } else if ctx.config.sta.is_some() {
        return Err(CliError::Validation("`sta` block is only used with a `tau` axis".into()));
    } else {
        None
    };

    let points: Vec<Vec<f64>> = match values.as_slice() {
        [a] => a.iter().map(|x| vec![*x]).collect(),
        [a, b] => a.iter().flat_map(|x| b.iter().map(move |y| vec![*x, *y])).collect(),
        _ => unreachable!(),
    };

    let mut columns: Vec<String> = names.clone();
    columns.extend(CYCLE_COLUMNS.iter().map(|s| s.to_string()));
    if finite.is_some() {
        columns.push("eta_ideal".into());
    }
    if sta.is_some() {
        columns.extend(["sta_feasible".to_string(), "q_star".to_string()]);
    }
    columns.push("status".into());
    let width = columns.len();

    let evaluate = |point: &Vec<f64>| -> Result<Vec<Cell>, CliError> {
        let mut cycle = base;
        let mut fin = finite;
        let mut tau = f64::NAN;
        for (name, &v) in names.iter().zip(point) {
            match name.as_str() {
                "detuning_f" => cycle.spec.final_detuning = v,
                "detuning_i" => cycle.spec.initial_detuning = v,
                "coupling" => cycle.spec.coupling = v,
                "oam" => {
                    let r = ctx.resolved.with_oam(v as u32)?;
                    cycle.spec.omega_c = r.omega_c();
                    cycle.spec.omega_d = r.omega_d();
                }
                "tau_bc" => fin.as_mut().unwrap().tau_bc = v,
                "tau_da" => fin.as_mut().unwrap().tau_da = v,
                "tau" => tau = v,
                _ => unreachable!(),
            }
        }
        let mut row: Vec<Cell> = point.iter().map(|x| Cell::from(*x)).collect();
        let endpoints = cycle.endpoints()?;
        let (wi, wf, ni, nf) = endpoints;
        match &fin {
            Some(f) => {
                let r = relax_cycle(endpoints, &f.timing(&cycle)?)?;
                row.extend(cycle_cells(&r.cycle));
                row.push(r.ideal.efficiency.into());
            }
            None => row.extend(cycle_cells(&CycleResult::evaluate(wi, wf, ni, nf)?)),
        }
        if let Some(s) = &sta {
            let p = sample_protocol(s.ansatz, tau, wi, wf, s.samples)?;
            let q = if p.feasible { adiabaticity_parameter(&p.schedule())?.q_star } else { f64::NAN };
            row.push(p.feasible.into());
            row.push(q.into());
        }
        row.push(0usize.into());
        Ok(row)
    };

    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|p| {
            evaluate(p).unwrap_or_else(|e| {
                let mut row: Vec<Cell> = p.iter().map(|x| Cell::from(*x)).collect();
                row.resize(width - 1, Cell::Num(f64::NAN));
                row.push(Cell::Int(e.exit_code() as i64));
                row
            })
        })
        .collect();
    let failed = rows.iter().filter(|r| r.last() != Some(&Cell::Int(0))).count();
    if failed > 0 {
        warn(&format!("{failed} of {} grid points failed; see the status column", rows.len()));
    }
    let mut table = Table::new(&columns);
    rows.into_iter().for_each(|r| table.push(r));

    let plot = match names.as_slice() {
        [x] => PlotSpec::lines(x, &["eta"]),
        [x, y] => PlotSpec::heatmap(x, y, "eta"),
        _ => unreachable!(),
    };
    ctx.emit(&table, "sweep", &ctx.metadata("sweep"), &[("", plot)])
}
