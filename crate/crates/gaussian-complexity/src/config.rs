use gaussian_complexity_core::Tolerance;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Complexity,
    Coherent,
    Weyl,
    Nonrev,
    OracleVerify,
}

pub const QUAD_STEPS: (usize, usize) = (2, 1 << 24);
pub const RK_STEPS: (usize, usize) = (8, 1 << 24);
pub const SEGMENTS: (usize, usize) = (4, 1024);
pub const RESTARTS: (usize, usize) = (1, 64);

/// Validated settings of one invocation.
#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub command: CommandKind,
    pub tol: Tolerance,
    pub quad_steps: usize,
    pub rk_steps: usize,
    pub segments: usize,
    pub restarts: usize,
    pub seed: u64,
    pub format: Format,
}

fn in_range(name: &str, value: usize, (lo, hi): (usize, usize)) -> CliResult<usize> {
    if (lo..=hi).contains(&value) {
        Ok(value)
    } else {
        Err(CliError::InvalidConfig(format!(
            "{name} must lie in [{lo}, {hi}], got {value}"
        )))
    }
}

impl RunConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        command: CommandKind,
        tol: f64,
        quad_steps: usize,
        rk_steps: usize,
        segments: usize,
        restarts: usize,
        seed: u64,
        format: Format,
    ) -> CliResult<Self> {
        if !(tol.is_finite() && tol > 0.0 && tol < 1.0) {
            return Err(CliError::InvalidConfig(format!(
                "tol must lie in (0, 1), got {tol}"
            )));
        }
        Ok(Self {
            command,
            tol: Tolerance::new(tol)?,
            quad_steps: in_range("quad-steps", quad_steps, QUAD_STEPS)?,
            rk_steps: in_range("rk-steps", rk_steps, RK_STEPS)?,
            segments: in_range("segments", segments, SEGMENTS)?,
            restarts: in_range("restarts", restarts, RESTARTS)?,
            seed,
            format,
        })
    }
}
