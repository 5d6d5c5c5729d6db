//! CSV and aligned-text renderings of benchmark results.

use super::harness::CellResult;
use super::models::{Model, Scenario};
use crate::error::{Error, Result};
use crate::estimators::MethodKind;
use crate::textfmt::sig6;

pub const CSV_HEADER: &str = "model,scenario,method,mean_truth,sd_truth,mean_resp,sd_resp,reps,seed";

/// One `cell × method` line of the report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub model: Model,
    pub scenario: Scenario,
    pub method: MethodKind,
    pub mean_truth: f64,
    pub sd_truth: f64,
    pub mean_resp: Option<f64>,
    pub sd_resp: Option<f64>,
    pub reps: usize,
    pub seed: u64,
}

impl ReportRow {
    pub fn from_results(results: &[CellResult]) -> Vec<ReportRow> {
        results
            .iter()
            .flat_map(|c| {
                c.methods.iter().map(move |m| ReportRow {
                    model: c.config.model,
                    scenario: c.config.scenario,
                    method: m.method,
                    mean_truth: m.mean_truth,
                    sd_truth: m.sd_truth,
                    mean_resp: m.mean_resp,
                    sd_resp: m.sd_resp,
                    reps: c.config.reps,
                    seed: c.config.seed,
                })
            })
            .collect()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), sig6)
}

pub fn write_report_csv(results: &[CellResult]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in ReportRow::from_results(results) {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.model,
            r.scenario,
            r.method,
            sig6(r.mean_truth),
            sig6(r.sd_truth),
            opt(r.mean_resp),
            opt(r.sd_resp),
            r.reps,
            r.seed
        ));
    }
    s
}

pub fn read_report_csv(text: &str) -> Result<Vec<ReportRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => return Err(Error::InvalidInput(format!("report must start with header `{CSV_HEADER}`"))),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let bad = |what: &str| Error::InvalidInput(format!("line {lineno}: {what}"));
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 9 {
            return Err(bad(&format!("expected 9 fields, got {}", f.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(&format!("bad number `{s}`")));
        let opt_num = |s: &str| if s == "NA" { Ok(None) } else { num(s).map(Some) };
        rows.push(ReportRow {
            model: f[0].parse().map_err(|e: Error| bad(&e.to_string()))?,
            scenario: f[1].parse().map_err(|e: Error| bad(&e.to_string()))?,
            method: f[2].parse().map_err(|e: Error| bad(&e.to_string()))?,
            mean_truth: num(f[3])?,
            sd_truth: num(f[4])?,
            mean_resp: opt_num(f[5])?,
            sd_resp: opt_num(f[6])?,
            reps: f[7].parse().map_err(|_| bad("bad reps"))?,
            seed: f[8].parse().map_err(|_| bad("bad seed"))?,
        });
    }
    Ok(rows)
}

fn cell_text(mean: Option<f64>, sd: Option<f64>) -> String {
    match (mean, sd) {
        (Some(m), Some(s)) => format!("{m:.2} ({s:.2})"),
        _ => "-".into(),
    }
}

fn render_block(rows: &[&ReportRow], with_resp: bool) -> String {
    let mut methods: Vec<MethodKind> = Vec::new();
    let mut keys: Vec<(Scenario, Model)> = Vec::new();
    for r in rows {
        if !methods.contains(&r.method) {
            methods.push(r.method);
        }
        if !keys.contains(&(r.scenario, r.model)) {
            keys.push((r.scenario, r.model));
        }
    }
    keys.sort();

    let mut header = vec!["X".to_string(), "Y|X".to_string()];
    header.extend(methods.iter().map(|m| format!("{} truth", m.as_str().to_uppercase())));
    if with_resp {
        header.extend(methods.iter().map(|m| format!("{} resp", m.as_str().to_uppercase())));
    }
    let mut table = vec![header];
    let mut last_scenario = None;
    for (s, m) in keys {
        let find = |k: MethodKind| rows.iter().find(|r| r.scenario == s && r.model == m && r.method == k);
        let mut line = vec![
            if last_scenario == Some(s) { String::new() } else { s.to_string() },
            m.to_string(),
        ];
        last_scenario = Some(s);
        line.extend(methods.iter().map(|&k| {
            let r = find(k);
            cell_text(r.map(|r| r.mean_truth), r.map(|r| r.sd_truth))
        }));
        if with_resp {
            line.extend(methods.iter().map(|&k| {
                let r = find(k);
                cell_text(r.and_then(|r| r.mean_resp), r.and_then(|r| r.sd_resp))
            }));
        }
        table.push(line);
    }

    let widths: Vec<usize> = (0..table[0].len())
        .map(|c| table.iter().map(|row| row[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, row) in table.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(c, (v, w))| if c < 2 { format!("{v:<w$}") } else { format!("{v:>w$}") })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
        if i == 0 {
            out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
            out.push('\n');
        }
    }
    out
}

/// Mean-model cells (with the response-correlation block) followed by
/// variance-model cells, each as `mean (sd)` of the absolute Spearman correlation.
pub fn render_text_table(rows: &[ReportRow]) -> String {
    let mean_rows: Vec<&ReportRow> = rows.iter().filter(|r| r.model.is_mean_model()).collect();
    let var_rows: Vec<&ReportRow> = rows.iter().filter(|r| !r.model.is_mean_model()).collect();
    let mut out = String::new();
    if !mean_rows.is_empty() {
        out.push_str("Predictors in the conditional mean: |Spearman| with true predictor and with response\n");
        out.push_str(&render_block(&mean_rows, true));
    }
    if !var_rows.is_empty() {
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str("Predictors in the conditional variance: |Spearman| with true predictor\n");
        out.push_str(&render_block(&var_rows, false));
    }
    if let Some(r) = rows.first() {
        out.push_str(&format!(
            "\nreps={} seed={} rng=ChaCha8 (stream = replication index); noise N(0, 0.25) in all models\n",
            r.reps, r.seed
        ));
    }
    out
}
