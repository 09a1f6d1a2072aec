use std::fmt::Write as _;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use deltacpt::sensing::{fit, with_noise, FitProblem, FitResult};
use deltacpt::spectra::{
    lineshape_metrics, power_map, read_spectrum_csv, shift_vs_power, sweep, write_power_map_csv, write_shift_table_csv,
    write_spectrum_csv, write_spectrum_jsonl, LineshapeMetrics, Spectrum,
};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

/// Failure of a command, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Exit code 2.
    #[error("{0}")]
    Input(String),
    /// Exit code 3.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<deltacpt::Error> for CliError {
    fn from(e: deltacpt::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

/// Header lines for every output file. Only the timestamp line differs
/// between runs of the same command on the same inputs.
#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub version: String,
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
    pub timestamp: u64,
}

impl Provenance {
    /// `config_text` plus every override that changes results is hashed.
    pub fn new(command: &str, config_text: &str, overrides: &[String], seed: u64) -> Self {
        let mut h = Sha256::new();
        h.update(config_text.as_bytes());
        for o in overrides {
            h.update(b"\0");
            h.update(o.as_bytes());
        }
        let digest = h.finalize();
        let mut hex = String::with_capacity(64);
        for b in digest.iter() {
            let _ = write!(hex, "{b:02x}");
        }
        Provenance {
            version: format!("deltacpt {}", env!("CARGO_PKG_VERSION")),
            command: command.into(),
            config_sha256: hex,
            seed,
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        }
    }

    pub fn lines(&self) -> Vec<String> {
        vec![
            self.version.clone(),
            format!("command={}", self.command),
            format!("config_sha256={}", self.config_sha256),
            format!("seed={}", self.seed),
            format!("timestamp={}", self.timestamp),
        ]
    }
}

pub struct Context {
    pub config: RunConfig,
    pub provenance: Provenance,
    pub out_dir: PathBuf,
}

impl Context {
    fn write(&self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(&self.out_dir)
            .map_err(|e| CliError::Input(format!("cannot create {}: {e}", self.out_dir.display())))?;
        let path = self.out_dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

fn format_metrics(m: &LineshapeMetrics) -> String {
    format!(
        "center={:e} peak={:e} baseline={:e} contrast={:e} fwhm={:e} polarity={:?}",
        m.center, m.peak, m.baseline, m.contrast, m.fwhm, m.polarity
    )
}

fn metrics_line(s: &Spectrum) -> String {
    match lineshape_metrics(s) {
        Ok(m) => format_metrics(&m),
        Err(e) => format!("metrics unavailable: {e}"),
    }
}

/// One sweep, written as CSV and JSON lines. Returns the text for stdout.
pub fn cmd_spectrum(ctx: &Context) -> Result<String, CliError> {
    let c = &ctx.config;
    let mut s = sweep(&c.spec)?;
    if c.noise_sigma > 0.0 {
        s = with_noise(&s, c.noise_sigma, c.seed)?;
    }
    let mut csv = Vec::new();
    write_spectrum_csv(&s, &ctx.provenance.lines(), &mut csv)?;
    let mut jsonl = Vec::new();
    write_spectrum_jsonl(&s, None, &mut jsonl)?;
    let a = ctx.write("spectrum.csv", &csv)?;
    let b = ctx.write("spectrum.jsonl", &jsonl)?;
    Ok(format!("{}\nwrote {} and {}\n", metrics_line(&s), a.display(), b.display()))
}

/// Spectra at every configured power, sorted ascending.
pub fn cmd_power_map(ctx: &Context) -> Result<String, CliError> {
    let c = &ctx.config;
    let powers = match &c.powers {
        Some(p) if !p.is_empty() => p,
        _ => return Err(CliError::Input("power_map.powers: the power list is empty".into())),
    };
    let map = power_map(powers, &c.spec)?;
    let mut csv = Vec::new();
    write_power_map_csv(&map, &ctx.provenance.lines(), &mut csv)?;
    let mut jsonl = Vec::new();
    for (p, s) in &map {
        write_spectrum_jsonl(s, Some(*p), &mut jsonl)?;
    }
    let a = ctx.write("power_map.csv", &csv)?;
    let b = ctx.write("power_map.jsonl", &jsonl)?;
    let mut out = String::new();
    for (p, s) in &map {
        let _ = writeln!(out, "{p} dBm: {}", metrics_line(s));
    }
    let _ = writeln!(out, "wrote {} and {}", a.display(), b.display());
    Ok(out)
}

/// Centre shift over the configured detunings and powers.
pub fn cmd_shift_table(ctx: &Context) -> Result<String, CliError> {
    let c = &ctx.config;
    if c.shift_detunings.is_empty() || c.shift_powers.is_empty() {
        return Err(CliError::Input("shift_table: detunings and powers must both be non-empty".into()));
    }
    let t = shift_vs_power(&c.shift_detunings, &c.shift_powers, &c.spec)?;
    let mut csv = Vec::new();
    write_shift_table_csv(&t, &ctx.provenance.lines(), &mut csv)?;
    let a = ctx.write("shift_table.csv", &csv)?;
    let mut out = format!("reference: {}\n", format_metrics(&t.reference));
    for cell in &t.cells {
        let _ = match (cell.shift, &cell.error) {
            (Some(s), _) => writeln!(out, "mw_detuning={:e} power={} dBm shift={:e}", cell.detuning, cell.power, s),
            (None, e) => writeln!(
                out,
                "mw_detuning={:e} power={} dBm failed: {}",
                cell.detuning,
                cell.power,
                e.as_deref().unwrap_or("unknown")
            ),
        };
    }
    let _ = writeln!(out, "wrote {}", a.display());
    Ok(out)
}

#[derive(Serialize)]
struct FitReport<'a> {
    provenance: &'a Provenance,
    data: String,
    result: &'a FitResult,
}

pub fn read_observed(path: &Path) -> Result<Spectrum, CliError> {
    let f = std::fs::File::open(path).map_err(|e| CliError::Input(format!("cannot open {}: {e}", path.display())))?;
    read_spectrum_csv(BufReader::new(f)).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Fits the configured free parameters to the spectrum at `data`.
/// A fit that does not converge is reported, not raised.
pub fn cmd_fit(ctx: &Context, data: &Path) -> Result<String, CliError> {
    let c = &ctx.config;
    let observed = read_observed(data)?;
    if observed.observable != c.spec.observable {
        return Err(CliError::Input(format!(
            "{}: observable column is {}, the model computes {}",
            data.display(),
            observed.observable.name(),
            c.spec.observable.name()
        )));
    }
    let mut problem = FitProblem::new(observed, c.spec.clone(), c.fit.free.clone());
    if let Some(g) = c.fit.grid_points {
        problem.grid_points = g;
    }
    if let Some(t) = c.fit.rel_tol {
        problem.rel_tol = t;
    }
    if let Some(m) = c.fit.max_iterations {
        problem.max_iterations = m;
    }
    let result = fit(&problem)?;
    let report = FitReport { provenance: &ctx.provenance, data: data.display().to_string(), result: &result };
    let mut json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Numerical(e.to_string()))?;
    json.push('\n');
    let a = ctx.write("fit_report.json", json.as_bytes())?;
    Ok(format!("{}wrote {}\n", result.report(), a.display()))
}

/// Names and main settings of the built-in presets.
pub fn cmd_presets() -> String {
    use deltacpt::constants::TAU;
    use deltacpt::spectra::SweepSpec;
    let mut out = String::new();
    for name in SweepSpec::preset_names() {
        let s = SweepSpec::preset(name).expect("listed preset exists");
        let f = &s.fields;
        let (lo, hi, unit) = match s.parameter {
            deltacpt::spectra::SweptParameter::MwPowerDbm => (s.start, s.stop, "dBm"),
            _ => (s.start / TAU, s.stop / TAU, "Hz"),
        };
        let _ = writeln!(
            out,
            "{name}: {} from {lo:e} to {hi:e} {unit}, {} points, backend {}, observable {}",
            s.parameter.name(),
            s.points,
            s.backend.name(),
            s.observable.name()
        );
        let _ = writeln!(
            out,
            "  omega_p={:e} Hz omega_c={:e} Hz omega_mu={:e} Hz delta_mu={:e} Hz phi_mu={:.4} rad",
            f.omega_p.norm() / TAU,
            f.omega_c.norm() / TAU,
            f.omega_mu / TAU,
            f.delta_mu / TAU,
            f.phi_mu
        );
        let _ = writeln!(
            out,
            "  gamma_ab={:e} Hz gamma_bc={:e} Hz temperature={} K nodes={} atom={} coupling={:?}",
            s.decays.gamma_ab / TAU,
            s.decays.gamma_bc / TAU,
            s.thermal.temperature,
            s.thermal.nodes,
            s.atom.name,
            s.coupling
        );
    }
    out
}
