//! Scenario execution: configs in, CSV files out.

pub mod config;
pub mod figures;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::control::TwoTimeKernel;
use crate::error::{Error, Result};
use crate::oracle::{compare_reduced, evolve_amplitudes, sample_bath, BathRealization, ErrorReport};
use crate::propagator::{solve_volterra, PropagatorSeries, TimeGrid};
use crate::tcl::{coefficients, evolve_exact, QubitState, TclCoefficients};

pub use config::ScenarioConfig;

/// Column order of every per-node result file.
pub const RUN_HEADER: &str = "t,re_G,im_G,fidelity,gamma,S,rho11,rho00,re_rho10,im_rho10,valid";

/// Env var holding the sweep/figure worker count.
pub const WORKERS_ENV: &str = "CENTRAL_SPIN_WORKERS";

/// Everything computed for one scenario.
#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub series: PropagatorSeries,
    pub coeffs: TclCoefficients,
    pub states: Vec<QubitState>,
}

impl ScenarioResult {
    pub fn from_series(series: PropagatorSeries, rho0: &QubitState) -> Self {
        let coeffs = coefficients(&series);
        let states = evolve_exact(rho0, &series);
        ScenarioResult { series, coeffs, states }
    }

    pub fn fidelity(&self) -> Vec<f64> {
        self.series.fidelity()
    }

    /// CSV in the [`RUN_HEADER`] layout, with optional extra columns.
    pub fn to_csv(&self, extra: Option<(&str, &[f64])>) -> String {
        let lab = self.series.to_lab_frame();
        let fid = self.fidelity();
        let mut out = String::with_capacity(self.series.grid.len() * 200);
        out.push_str(RUN_HEADER);
        if let Some((name, _)) = extra {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (k, t) in self.series.grid.times().enumerate() {
            let rho = &self.states[k];
            let _ = write!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                t,
                lab[k].re,
                lab[k].im,
                fid[k],
                self.coeffs.gamma[k],
                self.coeffs.shift[k],
                rho.rho11(),
                rho.rho00(),
                rho.rho10().re,
                rho.rho10().im,
                u8::from(self.coeffs.valid[k]),
            );
            if let Some((_, values)) = extra {
                let _ = write!(out, ",{}", values[k]);
            }
            out.push('\n');
        }
        out
    }
}

/// Write `contents` to a sibling temp file, then rename over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Solve the scenario without touching the filesystem.
pub fn compute_scenario(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    cfg.validate()?;
    let kernel = TwoTimeKernel::new(cfg.kernel_spec()?, cfg.pulses()?)?;
    let series = solve_volterra(&kernel, cfg.grid()?)?.with_overhauser(cfg.overhauser_shift()?);
    Ok(ScenarioResult::from_series(series, &cfg.initial_state()?))
}

/// Solve the scenario and write its CSV to `cfg.output`.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<PathBuf> {
    let result = compute_scenario(cfg)?;
    write_atomic(&cfg.output, &result.to_csv(None))?;
    Ok(cfg.output.clone())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    path.with_file_name(format!("{stem}_{suffix}"))
}

/// Output of a sweep: per-value files plus a summary.
#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub files: Vec<PathBuf>,
    pub summary: PathBuf,
}

/// Run every value of the `[sweep]` axis. Values run in parallel on the
/// current rayon pool; file names and contents depend only on the index.
pub fn run_sweep(cfg: &ScenarioConfig) -> Result<SweepOutput> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| Error::Config("missing [sweep] table".into()))?;
    let runs: Vec<(PathBuf, f64, f64)> = sweep
        .values
        .par_iter()
        .enumerate()
        .map(|(i, &value)| {
            let mut one = cfg.with_parameter(&sweep.parameter, value)?;
            one.sweep = None;
            one.output = sibling(&cfg.output, &format!("{i:03}.csv"));
            let result = compute_scenario(&one)?;
            write_atomic(&one.output, &result.to_csv(None))?;
            let fid = result.fidelity();
            Ok((one.output, time_average(&fid, result.series.grid), fid[fid.len() - 1]))
        })
        .collect::<Result<_>>()?;

    let mut summary = String::from("index,value,mean_fidelity,final_fidelity\n");
    for (i, ((_, mean, last), value)) in runs.iter().zip(&sweep.values).enumerate() {
        let _ = writeln!(summary, "{i},{value},{mean},{last}");
    }
    let summary_path = sibling(&cfg.output, "sweep.csv");
    write_atomic(&summary_path, &summary)?;
    Ok(SweepOutput { files: runs.into_iter().map(|r| r.0).collect(), summary: summary_path })
}

/// Trapezoidal time average over the whole grid.
pub fn time_average(values: &[f64], grid: TimeGrid) -> f64 {
    let dt = grid.dt();
    let n = values.len();
    let inner: f64 = values[1..n - 1].iter().sum();
    (inner + 0.5 * (values[0] + values[n - 1])) * dt / grid.t_max()
}

/// Result of `oracle-compare`.
#[derive(Debug, Clone)]
pub struct OracleComparison {
    pub report: ErrorReport,
    pub oracle_csv: PathBuf,
    pub reduced_csv: PathBuf,
    pub report_path: PathBuf,
}

/// Build the explicit bath described by `[bath]`.
pub fn bath_from_config(cfg: &ScenarioConfig) -> Result<(BathRealization, f64)> {
    let (dist, omega0) = cfg.bath_distribution()?;
    let bath = if dist.coupling_spread == 0.0 && dist.freq_spread == 0.0 {
        BathRealization::homogeneous(dist.coupling_mean * dist.n as f64, dist.n, dist.freq_mean)?
    } else {
        sample_bath(dist.n, dist.coupling_mean, dist.coupling_spread, dist.freq_mean, dist.freq_spread, cfg.seed)?
    };
    Ok((bath, omega0))
}

/// Run the finite-bath oracle and the reduced solver on the same grid and
/// write both series plus the discrepancy report next to `cfg.output`.
pub fn oracle_compare(cfg: &ScenarioConfig) -> Result<OracleComparison> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let pulses = cfg.pulses()?;
    let rho0 = cfg.initial_state()?;
    let (bath, omega0) = bath_from_config(cfg)?;

    let traj = evolve_amplitudes(&bath, omega0, grid, &pulses)?;
    let kernel = TwoTimeKernel::new(cfg.kernel_spec()?, pulses)?;
    let reduced = solve_volterra(&kernel, grid)?.with_overhauser(cfg.overhauser_shift()?);
    let report = compare_reduced(&traj, &reduced)?;

    let oracle_result = ScenarioResult::from_series(traj.as_series(), &rho0);
    let reduced_result = ScenarioResult::from_series(reduced, &rho0);
    let oracle_csv = sibling(&cfg.output, "oracle.csv");
    let reduced_csv = sibling(&cfg.output, "reduced.csv");
    let report_path = sibling(&cfg.output, "report.toml");
    write_atomic(&oracle_csv, &oracle_result.to_csv(Some(("norm", &traj.norm))))?;
    write_atomic(&reduced_csv, &reduced_result.to_csv(None))?;
    let text = format!(
        "bath_size = {}\nmax_abs = {:e}\nrms = {:e}\nmax_norm_drift = {:e}\n",
        bath.len(),
        report.max_abs,
        report.rms,
        traj.max_norm_drift()
    );
    write_atomic(&report_path, &text)?;
    Ok(OracleComparison { report, oracle_csv, reduced_csv, report_path })
}
