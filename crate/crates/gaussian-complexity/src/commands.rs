use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::{fs, thread};

use gaussian_complexity_core::coherent::{coherent_complexity, coherent_geodesic};
use gaussian_complexity_core::complexity::{relative_complex_structure, RelativeComplexStructure};
use gaussian_complexity_core::nonreversible::{
    cost_breakdown, lorentz_geodesic, SingleModeChart, SingleModeMetric, TrajectoryStatus,
    VectorPotential,
};
use gaussian_complexity_core::oracle::{minimize_to_target, OracleOptions};
use gaussian_complexity_core::phase_space::GaussianState;
use gaussian_complexity_core::weyl::{weyl_complexity, WeylFactor};
use gaussian_complexity_core::{DMatrix, Error};
use serde::Serialize;

use crate::config::{CommandKind, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::float;

#[derive(Debug, Serialize)]
pub struct ComplexityReport {
    pub complexity: f64,
    pub generator: Vec<Vec<f64>>,
    pub delta_eigenvalues: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize)]
pub struct CoherentReport {
    pub complexity: f64,
    pub generator: Vec<Vec<f64>>,
    pub delta_eigenvalues: Vec<[f64; 2]>,
    pub z_target: Vec<f64>,
    #[serde(rename = "N_matrix")]
    pub n_matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
pub struct WeylReport {
    pub complexity: f64,
    pub base_complexity: f64,
    pub quad_steps: usize,
}

#[derive(Debug, Serialize)]
pub struct OracleReport {
    pub closed_form: f64,
    pub oracle_length: f64,
    pub relative_gap: f64,
    pub residual: f64,
    pub segments: usize,
    pub restart_lengths: Vec<f64>,
}

/// Result of one reference/target command.
#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum PairReport {
    Complexity(ComplexityReport),
    Coherent(CoherentReport),
    Weyl(WeylReport),
    Oracle(OracleReport),
}

impl PairReport {
    /// Scalar fields, in CSV column order.
    pub fn scalars(&self) -> Vec<(&'static str, f64)> {
        match self {
            PairReport::Complexity(r) => vec![("complexity", r.complexity)],
            PairReport::Coherent(r) => vec![("complexity", r.complexity)],
            PairReport::Weyl(r) => vec![
                ("complexity", r.complexity),
                ("base_complexity", r.base_complexity),
            ],
            PairReport::Oracle(r) => vec![
                ("closed_form", r.closed_form),
                ("oracle_length", r.oracle_length),
                ("relative_gap", r.relative_gap),
                ("residual", r.residual),
            ],
        }
    }
}

pub fn scalar_header(kind: CommandKind) -> &'static [&'static str] {
    match kind {
        CommandKind::Weyl => &["complexity", "base_complexity"],
        CommandKind::OracleVerify => &["closed_form", "oracle_length", "relative_gap", "residual"],
        _ => &["complexity"],
    }
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn sorted_eigenvalues(d: &RelativeComplexStructure) -> CliResult<Vec<[f64; 2]>> {
    let mut ev: Vec<[f64; 2]> = d.eigenvalues()?.iter().map(|l| [l.re, l.im]).collect();
    ev.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    Ok(ev)
}

fn metric_of(
    reference: &GaussianState,
    cfg: &RunConfig,
) -> CliResult<gaussian_complexity_core::phase_space::CovarianceMatrix> {
    Ok(reference.metric_covariance(cfg.tol)?)
}

fn complexity(
    reference: &GaussianState,
    target: &GaussianState,
    cfg: &RunConfig,
) -> CliResult<ComplexityReport> {
    if reference.is_displaced() || target.is_displaced() {
        return Err(Error::DisplacementPresent.into());
    }
    let sigma = metric_of(reference, cfg)?;
    let d = relative_complex_structure(reference, target, cfg.tol)?;
    Ok(ComplexityReport {
        complexity: d.complexity(&sigma)?,
        generator: rows(d.generator().matrix()),
        delta_eigenvalues: sorted_eigenvalues(&d)?,
    })
}

fn coherent(
    reference: &GaussianState,
    target: &GaussianState,
    cfg: &RunConfig,
) -> CliResult<CoherentReport> {
    let sigma = metric_of(reference, cfg)?;
    let geo = coherent_geodesic(reference, target, &sigma, cfg.tol)?;
    Ok(CoherentReport {
        complexity: coherent_complexity(&geo),
        generator: rows(geo.delta().generator().matrix()),
        delta_eigenvalues: sorted_eigenvalues(geo.delta())?,
        z_target: geo.z_target().iter().copied().collect(),
        n_matrix: rows(geo.n_matrix()),
    })
}

fn weyl(
    reference: &GaussianState,
    target: &GaussianState,
    omega: &WeylFactor,
    cfg: &RunConfig,
) -> CliResult<WeylReport> {
    let base = complexity(reference, target, cfg)?.complexity;
    Ok(WeylReport {
        complexity: weyl_complexity(base, omega, cfg.quad_steps)?,
        base_complexity: base,
        quad_steps: cfg.quad_steps + cfg.quad_steps % 2,
    })
}

fn oracle(
    reference: &GaussianState,
    target: &GaussianState,
    cfg: &RunConfig,
) -> CliResult<OracleReport> {
    let options = OracleOptions {
        segments: cfg.segments,
        restarts: cfg.restarts,
        seed: cfg.seed,
        ..OracleOptions::default()
    };
    // The oracle runs first so that an unreachable target reports the
    // search failure rather than the closed form's domain error.
    let sol = minimize_to_target(reference, target, &options, cfg.tol)?.into_result()?;
    let closed_form = if target.is_displaced() {
        coherent(reference, target, cfg)?.complexity
    } else {
        complexity(reference, target, cfg)?.complexity
    };
    let diff = (sol.length - closed_form).abs();
    Ok(OracleReport {
        closed_form,
        oracle_length: sol.length,
        relative_gap: if closed_form > 0.0 {
            diff / closed_form
        } else {
            diff
        },
        residual: sol.residual,
        segments: cfg.segments,
        restart_lengths: sol.restart_lengths,
    })
}

/// Inputs of the reference/target commands beyond the two states.
pub enum PairCommand {
    Complexity,
    Coherent,
    Weyl(WeylFactor),
    OracleVerify,
}

impl PairCommand {
    pub fn run(
        &self,
        reference: &GaussianState,
        target: &GaussianState,
        cfg: &RunConfig,
    ) -> CliResult<PairReport> {
        Ok(match self {
            PairCommand::Complexity => PairReport::Complexity(complexity(reference, target, cfg)?),
            PairCommand::Coherent => PairReport::Coherent(coherent(reference, target, cfg)?),
            PairCommand::Weyl(omega) => PairReport::Weyl(weyl(reference, target, omega, cfg)?),
            PairCommand::OracleVerify => PairReport::Oracle(oracle(reference, target, cfg)?),
        })
    }
}

/// `*.json` files of `dir` other than `exclude`, sorted by name.
pub fn batch_files(dir: &Path, exclude: &Path) -> CliResult<Vec<PathBuf>> {
    let exclude = fs::canonicalize(exclude).ok();
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        if path.extension().is_some_and(|e| e == "json")
            && path.is_file()
            && fs::canonicalize(&path).ok() != exclude
        {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Runs `job` over `items` on up to `available_parallelism` threads,
/// returning results in input order.
pub fn parallel_map<T: Sync, R: Send>(items: &[T], job: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(items.len())
        .max(1);
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(item) = items.get(i) else { break };
                let r = job(item);
                slots
                    .lock()
                    .expect("no worker panics while holding the lock")[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("workers have finished")
        .into_iter()
        .map(|r| r.expect("every slot is filled"))
        .collect()
}

#[derive(Debug, Serialize)]
pub struct NonrevReport {
    pub forward_cost: f64,
    pub reverse_cost: f64,
    pub length: f64,
    pub status: &'static str,
    pub end: [f64; 2],
    pub speed_drift: f64,
    pub samples: usize,
}

#[derive(Debug)]
pub struct NonrevRun {
    pub report: NonrevReport,
    pub header: [&'static str; 4],
    pub rows: Vec<Vec<String>>,
}

pub struct NonrevInput {
    pub start: (f64, f64),
    pub velocity: (f64, f64),
    pub potential: VectorPotential,
    pub length: f64,
}

/// Integrates the Lorentz-force trajectory and prices it in both
/// directions.
pub fn nonrev(input: &NonrevInput, cfg: &RunConfig) -> CliResult<NonrevRun> {
    let start = SingleModeChart::new(input.start.0, input.start.1)?;
    let traj = lorentz_geodesic(
        start,
        input.velocity,
        &input.potential,
        input.length,
        cfg.rk_steps,
    )?;
    let forward = cost_breakdown(&traj.path, &SingleModeMetric, &input.potential)?;
    let reverse = cost_breakdown(&traj.path.reversed(), &SingleModeMetric, &input.potential)?;
    let pts = traj.path.points();
    let end = &pts[pts.len() - 1];
    let status = match traj.status {
        TrajectoryStatus::Complete => "complete",
        TrajectoryStatus::ChartBoundary { .. } => "chart_boundary",
    };
    let rows = traj
        .path
        .params()
        .iter()
        .zip(pts)
        .zip(&forward.accumulated)
        .map(|((tau, p), c)| vec![float(*tau), float(p[0]), float(p[1]), float(*c)])
        .collect();
    Ok(NonrevRun {
        report: NonrevReport {
            forward_cost: forward.total(),
            reverse_cost: reverse.total(),
            length: forward.length,
            status,
            end: [end[0], end[1]],
            speed_drift: traj.speed_drift,
            samples: pts.len(),
        },
        header: ["tau", "r", "phi", "cost_accumulated"],
        rows,
    })
}
