//! Running a resolved experiment and rendering its records.

use std::fmt::Write as _;

use serde::Serialize;
use twirl_core::{adiabatic_prepare, run_protocol_partial, PauliSum, RoundRecord, StateVector};

use crate::manifest::{Experiment, Target};

/// Shot-budget convention, copied into every shots-mode output.
pub const SHOT_BUDGET_NOTE: &str =
    "each Pauli term of each observable is estimated from the full shot count; active counts are nested binomial draws";

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub name: String,
    pub tool_version: String,
    pub seed: u64,
    pub backend: String,
    pub trotter_steps: Option<usize>,
    pub hamiltonian: String,
    #[serde(rename = "J")]
    pub j: f64,
    pub term_order: Vec<String>,
    pub initial: String,
    pub prepare: Option<String>,
    pub shots: Option<u64>,
    pub energy_estimator: String,
    pub shot_budget: Option<String>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TargetCheck {
    pub observable: String,
    pub round: usize,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub metadata: Metadata,
    pub observables: Vec<String>,
    pub records: Vec<RoundRecord>,
    pub targets: Vec<TargetCheck>,
    /// Set when the schedule stopped early; records hold the rounds before it.
    pub halted: Option<String>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.halted.is_none() && self.targets.iter().all(|t| t.pass)
    }
}

fn metadata(exp: &Experiment) -> Metadata {
    let m = &exp.manifest;
    Metadata {
        name: m.name.clone(),
        tool_version: twirl_core::VERSION.to_string(),
        seed: exp.config.seed,
        backend: exp.config.backend.to_string(),
        trotter_steps: exp.config.backend.trotter_steps(),
        hamiltonian: m.hamiltonian.clone(),
        j: m.j,
        term_order: exp.hamiltonian.term_order(),
        initial: m.initial.clone(),
        prepare: exp.prepare.map(|s| s.to_string()),
        shots: exp.config.shots,
        energy_estimator: format!("{:?}", exp.config.energy_estimator).to_lowercase(),
        shot_budget: exp.config.shots.map(|_| SHOT_BUDGET_NOTE.to_string()),
        notes: m.notes.clone(),
    }
}

/// Adiabatic starting Hamiltonian `Z0 - Z1 + Z2 ...` with alternating signs.
pub fn trivial_hamiltonian(n_qubits: usize) -> PauliSum {
    let labels: Vec<(f64, String)> = (0..n_qubits)
        .map(|q| {
            let axes: String = (0..n_qubits).map(|k| if k == q { 'Z' } else { 'I' }).collect();
            (if q % 2 == 0 { 1.0 } else { -1.0 }, axes)
        })
        .collect();
    let borrowed: Vec<(f64, &str)> = labels.iter().map(|(c, s)| (*c, s.as_str())).collect();
    PauliSum::from_labels(n_qubits, &borrowed).expect("labels are well formed")
}

fn prepared_state(exp: &Experiment) -> anyhow::Result<StateVector> {
    match &exp.prepare {
        None => Ok(exp.initial.clone()),
        Some(schedule) => {
            let h0 = trivial_hamiltonian(exp.hamiltonian.n_qubits());
            Ok(adiabatic_prepare(&h0, &exp.hamiltonian, schedule, &exp.initial, exp.config.backend)?)
        }
    }
}

pub fn run_experiment(exp: &Experiment) -> anyhow::Result<RunReport> {
    let start = prepared_state(exp)?;
    let (run, halted) = run_protocol_partial(&start, &exp.hamiltonian, &exp.config)?;
    let targets = check_targets(&exp.manifest.expected, &run.records, exp.manifest.rounds.len());
    Ok(RunReport {
        metadata: metadata(exp),
        observables: exp.config.observables.iter().map(|(n, _)| n.clone()).collect(),
        records: run.records,
        targets,
        halted: halted.map(|e| e.to_string()),
    })
}

fn check_targets(expected: &[Target], records: &[RoundRecord], planned_rounds: usize) -> Vec<TargetCheck> {
    expected
        .iter()
        .map(|t| {
            let round = t.round.unwrap_or(planned_rounds);
            let value = records.get(round).and_then(|r| r.expectation(&t.observable)).unwrap_or(f64::NAN);
            TargetCheck {
                observable: t.observable.clone(),
                round,
                value,
                target: t.value,
                tolerance: t.tolerance,
                pass: (value - t.value).abs() <= t.tolerance,
            }
        })
        .collect()
}

fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), fmt6)
}

fn metadata_lines(meta: &Metadata) -> Vec<String> {
    let mut lines = vec![
        format!("name: {}", meta.name),
        format!("tool_version: {}", meta.tool_version),
        format!("seed: {}", meta.seed),
        format!("backend: {}", meta.backend),
        format!("trotter_steps: {}", meta.trotter_steps.map_or("-".to_string(), |n| n.to_string())),
        format!("hamiltonian: {} J={}", meta.hamiltonian, meta.j),
        format!("term_order: {}", meta.term_order.join(" ")),
        format!("initial: |{}>", meta.initial),
    ];
    if let Some(p) = &meta.prepare {
        lines.push(format!("prepare: {p}"));
    }
    if let Some(n) = meta.shots {
        lines.push(format!("shots: {n}"));
        lines.push(format!("energy_estimator: {}", meta.energy_estimator));
    }
    if let Some(note) = &meta.shot_budget {
        lines.push(format!("shot_budget: {note}"));
    }
    for note in &meta.notes {
        lines.push(format!("note: {note}"));
    }
    lines
}

/// Aligned table: one column per round plus a theoretical column, one row per
/// observable, then survival and active-count rows.
pub fn render_text(report: &RunReport) -> String {
    let mut out = String::new();
    for line in metadata_lines(&report.metadata) {
        let _ = writeln!(out, "# {line}");
    }
    let last_round = report.records.last().map_or(0, |r| r.round_index);
    let theoretical = |name: &str| {
        let mut matching = report.targets.iter().filter(|t| t.observable == name);
        matching.clone().find(|t| t.round == last_round).or_else(|| matching.next()).map(|t| t.target)
    };
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut header = vec![format!("|{}>", report.metadata.initial)];
    header.extend(report.records.iter().map(|r| r.round_index.to_string()));
    header.push("theoretical".into());
    rows.push(header);
    for name in &report.observables {
        let mut row = vec![format!("<{name}>")];
        row.extend(report.records.iter().map(|r| fmt_opt(r.expectation(name))));
        row.push(fmt_opt(theoretical(name)));
        rows.push(row);
        if report.records.iter().any(|r| r.estimates.is_some()) {
            let mut row = vec![format!("<{name}> sampled")];
            row.extend(report.records.iter().map(|r| fmt_opt(r.estimate(name).map(|e| e.value))));
            row.push("-".into());
            rows.push(row);
        }
    }
    let mut e_row = vec!["E used".to_string()];
    e_row.extend(report.records.iter().map(|r| fmt_opt(r.e_used)));
    e_row.push("-".into());
    rows.push(e_row);
    let mut p_row = vec!["p round".to_string()];
    p_row.extend(report.records.iter().map(|r| fmt6(r.p_round)));
    p_row.push("-".into());
    rows.push(p_row);
    let mut c_row = vec!["p cumulative".to_string()];
    c_row.extend(report.records.iter().map(|r| fmt6(r.p_cumulative)));
    c_row.push("-".into());
    rows.push(c_row);
    if report.records.iter().any(|r| r.active_count.is_some()) {
        let mut a_row = vec!["active state".to_string()];
        a_row.extend(report.records.iter().map(|r| r.active_count.map_or("-".into(), |a| a.to_string())));
        a_row.push("-".into());
        rows.push(a_row);
    }

    let widths: Vec<usize> =
        (0..rows[0].len()).map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
    for row in &rows {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (cell, w))| if i == 0 { format!("{cell:<w$}") } else { format!("{cell:>w$}") })
            .collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    for t in &report.targets {
        let _ = writeln!(
            out,
            "target <{}> round {}: {:.6} vs {:.6} +- {:e} {}",
            t.observable,
            t.round,
            t.value,
            t.target,
            t.tolerance,
            if t.pass { "ok" } else { "VIOLATED" }
        );
    }
    if let Some(reason) = &report.halted {
        let _ = writeln!(out, "halted: {reason}");
    }
    out
}

/// `round,E_used,tau,p_round,p_cum,active_count,<obs...>` with `#` metadata
/// lines first. Shot estimates add `<obs>_sampled` and `<obs>_stderr`.
pub fn render_csv(report: &RunReport) -> String {
    let mut out = String::new();
    for line in metadata_lines(&report.metadata) {
        let _ = writeln!(out, "# {line}");
    }
    if let Some(reason) = &report.halted {
        let _ = writeln!(out, "# halted: {reason}");
    }
    let sampled = report.records.iter().any(|r| r.estimates.is_some());
    let mut header = vec!["round", "E_used", "tau", "p_round", "p_cum", "active_count"]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
    header.extend(report.observables.iter().cloned());
    if sampled {
        for name in &report.observables {
            header.push(format!("{name}_sampled"));
            header.push(format!("{name}_stderr"));
        }
    }
    let _ = writeln!(out, "{}", header.join(","));
    let num = |x: Option<f64>| x.map_or_else(String::new, |v| format!("{v:.12e}"));
    for r in &report.records {
        let mut cells = vec![
            r.round_index.to_string(),
            num(r.e_used),
            num(r.tau),
            num(Some(r.p_round)),
            num(Some(r.p_cumulative)),
            r.active_count.map_or_else(String::new, |a| a.to_string()),
        ];
        cells.extend(report.observables.iter().map(|n| num(r.expectation(n))));
        if sampled {
            for n in &report.observables {
                let e = r.estimate(n);
                cells.push(num(e.map(|e| e.value)));
                cells.push(num(e.map(|e| e.std_error)));
            }
        }
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn render_json(report: &RunReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifest::ExperimentManifest;

    fn report(json: &str) -> RunReport {
        let exp = ExperimentManifest::from_json(json).unwrap().resolve().unwrap();
        run_experiment(&exp).unwrap()
    }

    const TABLE1: &str = r#"{"name": "t1", "hamiltonian": "schwinger-1q", "J": 1.0, "initial": "0",
        "rounds": [{"mode": "quarter"}, {"mode": "quarter"}, {"mode": "quarter"}, {"mode": "quarter"}, {"mode": "quarter"}],
        "observables": ["Z", "H"],
        "expected": [{"observable": "H", "value": 1.414214, "tolerance": 1e-3}]}"#;

    #[test]
    fn text_table_has_round_zero_and_theoretical_column() {
        let r = report(TABLE1);
        assert!(r.passed());
        let text = render_text(&r);
        let header = text.lines().find(|l| l.starts_with("|0>")).unwrap();
        assert!(header.contains(" 0 ") && header.ends_with("theoretical"));
        assert!(text.contains("1.414214"));
        assert!(text.contains("# seed: 0"));
        assert!(text.contains("# term_order: X Z"));
    }

    #[test]
    fn csv_columns() {
        let r = report(TABLE1);
        let csv = render_csv(&r);
        let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
        assert_eq!(header, "round,E_used,tau,p_round,p_cum,active_count,Z,H");
        assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 7);
    }

    #[test]
    fn empty_schedule_is_round_zero_only() {
        let r = report(r#"{"name": "e", "hamiltonian": "schwinger-2q", "J": 1.0, "initial": "01", "observables": ["H"]}"#);
        assert_eq!(r.records.len(), 1);
        assert!(r.passed());
    }

    #[test]
    fn violated_target_fails() {
        let r = report(
            r#"{"name": "v", "hamiltonian": "schwinger-1q", "J": 1.0, "initial": "0", "observables": ["H"],
            "expected": [{"observable": "H", "value": 5.0, "tolerance": 1e-3, "round": 0}]}"#,
        );
        assert!(!r.passed());
        assert!(render_text(&r).contains("VIOLATED"));
    }

    #[test]
    fn zero_energy_halt_is_reported() {
        let r = report(
            r#"{"name": "z", "hamiltonian": "schwinger-3q", "J": 1.0, "initial": "111", "observables": ["H"],
            "rounds": [{"mode": "full", "E_override": -0.2}, {"mode": "quarter"}]}"#,
        );
        assert!(!r.passed());
        assert_eq!(r.records.len(), 2);
        assert!(r.halted.as_deref().unwrap().contains("zero energy"));
    }

    #[test]
    fn trivial_hamiltonian_signs() {
        assert_eq!(trivial_hamiltonian(3).to_string(), PauliSum::from_labels(3, &[(1.0, "ZII"), (-1.0, "IZI"), (1.0, "IIZ")]).unwrap().to_string());
    }

    #[test]
    fn outputs_are_deterministic() {
        let json = r#"{"name": "s", "hamiltonian": "schwinger-1q", "J": 1.0, "initial": "0", "shots": 10000, "seed": 5,
            "rounds": [{"mode": "quarter"}, {"mode": "quarter"}], "observables": ["Z", "H"]}"#;
        let a = report(json);
        let b = report(json);
        assert_eq!(render_json(&a), render_json(&b));
        assert_eq!(render_csv(&a), render_csv(&b));
        assert!(render_text(&a).contains("active state"));
        assert!(render_json(&a).contains("shot_budget"));
    }
}
