//! Subcommand implementations. Each returns rendered text so that the binary
//! only decides where it goes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use rayon::prelude::*;
use serde::Serialize;
use twirl_core::{
    closed_form_eigenpairs, eigendecompose, expectation, observable_zbar, schwinger_hamiltonian, single_qubit,
    spectral_deviation, trotter_error, PauliAxis,
};

use crate::manifest::{ExperimentManifest, Overrides};
use crate::report::{render_csv, render_json, render_text, run_experiment, RunReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Text => "txt",
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

pub fn render(report: &RunReport, format: Format) -> String {
    match format {
        Format::Text => render_text(report),
        Format::Csv => render_csv(report),
        Format::Json => render_json(report),
    }
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Writes the text table, CSV and JSON for one report into `dir`.
pub fn write_outputs(report: &RunReport, stem: &str, dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    [Format::Text, Format::Csv, Format::Json]
        .into_iter()
        .map(|f| {
            let path = dir.join(format!("{stem}.{}", f.extension()));
            write_atomic(&path, &render(report, f))?;
            Ok(path)
        })
        .collect()
}

pub fn cmd_run(manifest_path: &Path, overrides: &Overrides) -> anyhow::Result<(ExperimentManifest, RunReport)> {
    let mut manifest = ExperimentManifest::load(manifest_path)?;
    manifest.apply(overrides);
    let exp = manifest.resolve().map_err(|e| anyhow::anyhow!("{}: {e}", manifest_path.display()))?;
    let report = run_experiment(&exp)?;
    Ok((manifest, report))
}

#[derive(Debug, Serialize)]
pub struct BatchEntry {
    pub name: String,
    pub passed: bool,
    pub error: Option<String>,
}

/// Runs every manifest concurrently and writes each one's outputs into `out`.
pub fn cmd_batch(paths: &[PathBuf], overrides: &Overrides, out: &Path) -> anyhow::Result<Vec<BatchEntry>> {
    let manifests = paths
        .iter()
        .map(|p| {
            let mut m = ExperimentManifest::load(p)?;
            m.apply(overrides);
            Ok((p.clone(), m))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut names: Vec<&str> = manifests.iter().map(|(_, m)| m.name.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        bail!("manifest name {:?} appears more than once in the batch", w[0]);
    }
    let entries = manifests
        .par_iter()
        .map(|(path, m)| {
            let outcome = m
                .resolve()
                .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
                .and_then(|exp| run_experiment(&exp))
                .and_then(|report| {
                    write_outputs(&report, m.output_stem(), out)?;
                    Ok(report.passed())
                });
            match outcome {
                Ok(passed) => BatchEntry { name: m.name.clone(), passed, error: None },
                Err(e) => BatchEntry { name: m.name.clone(), passed: false, error: Some(format!("{e:#}")) },
            }
        })
        .collect();
    Ok(entries)
}

/// Manifest files (`*.json`) directly inside `dir`, sorted by name.
pub fn manifests_in(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    Ok(paths)
}

#[derive(Debug, Serialize)]
struct SpectrumRow {
    index: usize,
    label: String,
    eigenvalue: f64,
    closed_form: f64,
    observable: f64,
    eigenvector: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize)]
struct SpectrumReport {
    n_qubits: usize,
    #[serde(rename = "J")]
    j: f64,
    tool_version: &'static str,
    term_order: Vec<String>,
    observable: String,
    max_deviation: f64,
    rows: Vec<SpectrumRow>,
}

fn spectrum_report(n_qubits: usize, j: f64) -> anyhow::Result<SpectrumReport> {
    let h = schwinger_hamiltonian(n_qubits, j)?;
    let numeric = eigendecompose(&h)?;
    let mut closed = closed_form_eigenpairs(n_qubits, j)?;
    closed.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    let (obs_name, obs) = if n_qubits == 3 {
        ("Zbar", observable_zbar())
    } else {
        ("Z0", single_qubit(n_qubits, 0, PauliAxis::Z)?)
    };
    let closed_spec = twirl_core::closed_form_spectrum(n_qubits, j)?;
    let max_deviation = spectral_deviation(&numeric, &closed_spec, 1e-9);
    let rows = closed
        .iter()
        .enumerate()
        .map(|(i, pair)| {
            Ok(SpectrumRow {
                index: i,
                label: pair.label.clone(),
                eigenvalue: numeric.eigenvalues()[i],
                closed_form: pair.energy,
                // The closed-form vector fixes the basis inside degenerate blocks.
                observable: expectation(&pair.vector, &obs)?,
                eigenvector: numeric.eigenvector(i).amplitudes().iter().map(|a| [a.re, a.im]).collect(),
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(SpectrumReport {
        n_qubits,
        j,
        tool_version: twirl_core::VERSION,
        term_order: h.term_order(),
        observable: obs_name.into(),
        max_deviation,
        rows,
    })
}

fn fmt_vector(v: &[[f64; 2]]) -> String {
    v.iter()
        .map(|[re, im]| if im.abs() < 5e-13 { format!("{re:.6}") } else { format!("{re:.6}{im:+.6}i") })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn cmd_spectrum(n_qubits: usize, j: f64, format: Format) -> anyhow::Result<String> {
    let rep = spectrum_report(n_qubits, j)?;
    let mut out = String::new();
    match format {
        Format::Json => {
            out = serde_json::to_string_pretty(&rep)?;
            out.push('\n');
        }
        Format::Csv => {
            let _ = writeln!(out, "# n_qubits: {n_qubits}\n# J: {j}\n# tool_version: {}", rep.tool_version);
            let _ = writeln!(out, "# term_order: {}", rep.term_order.join(" "));
            let _ = writeln!(out, "# max_deviation: {:e}", rep.max_deviation);
            let _ = writeln!(out, "index,label,eigenvalue,closed_form,{}", rep.observable);
            for r in &rep.rows {
                let _ = writeln!(out, "{},{},{:.12e},{:.12e},{:.12e}", r.index, r.label, r.eigenvalue, r.closed_form, r.observable);
            }
        }
        Format::Text => {
            let _ = writeln!(out, "# schwinger-{n_qubits}q J={j} tool_version {}", rep.tool_version);
            let _ = writeln!(out, "# term_order: {}", rep.term_order.join(" "));
            let obs_col = format!("<{}>", rep.observable);
            let _ = writeln!(out, "{:>5}  {:>5}  {:>12}  {:>12}  {:>10}  eigenvector", "index", "label", "numeric", "closed-form", obs_col);
            for r in &rep.rows {
                let _ = writeln!(
                    out,
                    "{:>5}  {:>5}  {:>12.6}  {:>12.6}  {:>10.6}  {}",
                    r.index,
                    r.label,
                    r.eigenvalue,
                    r.closed_form,
                    r.observable,
                    fmt_vector(&r.eigenvector)
                );
            }
            let _ = writeln!(out, "max deviation (eigenvalues and cluster projectors): {:.3e}", rep.max_deviation);
        }
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct TrotterRow {
    pub steps: usize,
    pub error: f64,
    /// `error(previous) / error(this)`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct TrotterScan {
    pub n_qubits: usize,
    #[serde(rename = "J")]
    pub j: f64,
    pub tau: f64,
    pub rows: Vec<TrotterRow>,
    /// Least-squares slope of `-log(error)` against `log(steps)`.
    pub order: Option<f64>,
}

/// Errors at or below this are treated as exact when estimating the order.
const EXACT_ERROR: f64 = 1e-13;

pub fn trotter_scan(n_qubits: usize, j: f64, tau: f64, steps: &[usize]) -> anyhow::Result<TrotterScan> {
    let h = schwinger_hamiltonian(n_qubits, j)?;
    let mut rows: Vec<TrotterRow> = Vec::with_capacity(steps.len());
    for &n in steps {
        let error = trotter_error(&h, tau, n)?;
        let ratio = rows.last().filter(|p| p.error > EXACT_ERROR && error > EXACT_ERROR).map(|p| p.error / error);
        rows.push(TrotterRow { steps: n, error, ratio });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.error > EXACT_ERROR)
        .map(|r| ((r.steps as f64).ln(), -r.error.ln()))
        .collect();
    let order = (pts.len() >= 2).then(|| {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    Ok(TrotterScan { n_qubits, j, tau, rows, order: order.filter(|o| o.is_finite()) })
}

pub fn cmd_trotter_scan(n_qubits: usize, j: f64, tau: f64, steps: &[usize], format: Format) -> anyhow::Result<String> {
    if steps.is_empty() {
        bail!("at least one step count is required");
    }
    let scan = trotter_scan(n_qubits, j, tau, steps)?;
    let mut out = String::new();
    let order = scan.order.map_or("n/a".to_string(), |o| format!("{o:.4}"));
    match format {
        Format::Json => {
            out = serde_json::to_string_pretty(&scan)?;
            out.push('\n');
        }
        Format::Csv => {
            let _ = writeln!(out, "# schwinger-{n_qubits}q J={j} tau={tau}\n# order: {order}");
            let _ = writeln!(out, "steps,error,ratio");
            for r in &scan.rows {
                let ratio = r.ratio.map_or(String::new(), |x| format!("{x:.6}"));
                let _ = writeln!(out, "{},{:.6e},{ratio}", r.steps, r.error);
            }
        }
        Format::Text => {
            let _ = writeln!(out, "# schwinger-{n_qubits}q J={j} tau={tau:.6}");
            let _ = writeln!(out, "{:>8}  {:>14}  {:>8}", "steps", "error", "ratio");
            for r in &scan.rows {
                let ratio = r.ratio.map_or("-".to_string(), |x| format!("{x:.4}"));
                let _ = writeln!(out, "{:>8}  {:>14.6e}  {:>8}", r.steps, r.error, ratio);
            }
            let _ = writeln!(out, "order estimate: {order}");
        }
    }
    Ok(out)
}
