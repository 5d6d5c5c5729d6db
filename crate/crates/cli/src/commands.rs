use std::fs;
use std::path::Path;

use nlsdr_core::estimators::{FittedModel, Hyper, Registry};
use nlsdr_core::simbench::{
    parse_cells, read_report_csv, render_text_table, run_cells, write_report_csv, ReportRow, SimConfig, TuningMode,
};
use nlsdr_core::textfmt::{exact, sig6};
use nlsdr_core::tuning::tune as tune_params;

use crate::config::KernelConfig;
use crate::dataset::read_dataset;
use crate::{BenchArgs, CliError, HyperArgs};

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))
}

pub fn tune(data: &Path, out: &Path) -> Result<(), CliError> {
    let ds = read_dataset(data, true)?;
    ds.check_not_constant()?;
    let t = tune_params(&ds.x, ds.require_y()?)?;
    create_dir(out)?;
    let cfg = KernelConfig {
        gamma_x: t.gamma_x,
        eps_x: t.eps_x,
        gamma_y: t.gamma_y,
        eps_y: t.eps_y,
    };
    write(&out.join("config.txt"), &cfg.to_text())?;
    write(&out.join("cv_x.csv"), &t.x_trace.to_csv())?;
    write(&out.join("cv_y.csv"), &t.y_trace.to_csv())?;
    println!(
        "gamma_x={} eps_x={} gamma_y={} eps_y={}",
        sig6(t.gamma_x),
        sig6(t.eps_x),
        sig6(t.gamma_y),
        sig6(t.eps_y)
    );
    Ok(())
}

fn resolve_hyper(args: &HyperArgs, d: usize, data: &crate::dataset::Dataset) -> Result<Hyper, CliError> {
    let b = match (&args.config, args.gamma_x, args.eps_x, args.gamma_y, args.eps_y) {
        (Some(p), ..) => KernelConfig::load(p)?,
        (None, Some(gamma_x), Some(eps_x), Some(gamma_y), Some(eps_y)) => KernelConfig {
            gamma_x,
            eps_x,
            gamma_y,
            eps_y,
        },
        _ => {
            let t = tune_params(&data.x, data.require_y()?)?;
            KernelConfig {
                gamma_x: t.gamma_x,
                eps_x: t.eps_x,
                gamma_y: t.gamma_y,
                eps_y: t.eps_y,
            }
        }
    };
    Ok(Hyper {
        gamma_x: args.gamma_x.unwrap_or(b.gamma_x),
        eps_x: args.eps_x.unwrap_or(b.eps_x),
        gamma_y: args.gamma_y.unwrap_or(b.gamma_y),
        eps_y: args.eps_y.unwrap_or(b.eps_y),
        d,
        slices: args.slices,
        gsave_exponent: args.gsave_exponent,
    })
}

pub fn fit(data: &Path, method: &str, d: usize, args: &HyperArgs, out: &Path) -> Result<(), CliError> {
    let registry = Registry::builtin();
    let estimator = registry.get(method)?;
    let ds = read_dataset(data, true)?;
    let hyper = resolve_hyper(args, d, &ds)?;
    let model = estimator.fit(&ds.x, ds.require_y()?, &hyper)?;
    model
        .save(out)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", out.display())))?;
    let eig: Vec<String> = model.eigvals.iter().map(|v| sig6(*v)).collect();
    println!("{} leading eigenvalues: {}", model.kind, eig.join(" "));
    Ok(())
}

pub fn predict(model_path: &Path, data: &Path, out: &Path) -> Result<(), CliError> {
    let model = FittedModel::load(model_path)?;
    let ds = read_dataset(data, false)?;
    if ds.x.ncols() != model.train_x.ncols() {
        return Err(CliError::Input(format!(
            "model expects {} predictor columns, data has {}",
            model.train_x.ncols(),
            ds.x.ncols()
        )));
    }
    let preds = model.predict(&ds.x)?;
    let mut s = (1..=preds.ncols()).map(|i| format!("pred_{i}")).collect::<Vec<_>>().join(",");
    s.push('\n');
    for row in preds.row_iter() {
        let cells: Vec<String> = row.iter().map(|v| exact(*v)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    write(out, &s)
}

pub fn bench(args: &BenchArgs) -> Result<(), CliError> {
    let cells = parse_cells(&args.cells)?;
    let configs: Vec<SimConfig> = cells
        .into_iter()
        .map(|c| SimConfig {
            n_train: args.n_train,
            n_test: args.n_test,
            p: args.p,
            tuning: if args.tune_once {
                TuningMode::OncePerCell
            } else {
                TuningMode::PerReplication
            },
            gsave_exponent: args.gsave_exponent,
            ..SimConfig::new(c.model, c.scenario, c.methods)
                .with_reps(args.reps)
                .with_seed(args.seed)
        })
        .collect();
    for c in &configs {
        c.validate()?;
    }
    let results = run_cells(&configs, args.threads)?;
    create_dir(&args.out_dir)?;
    let csv = write_report_csv(&results);
    write(&args.out_dir.join("bench.csv"), &csv)?;
    let table = render_text_table(&ReportRow::from_results(&results));
    write(&args.out_dir.join("bench.txt"), &table)?;
    print!("{table}");

    let mut invalid = Vec::new();
    for r in &results {
        eprintln!(
            "{}/{}: {} of {} replications failed, {:.1}s",
            r.config.model, r.config.scenario, r.failures, r.config.reps, r.wall_time_secs
        );
        if !r.valid {
            invalid.push(format!("{}/{}", r.config.model, r.config.scenario));
        }
    }
    if invalid.is_empty() {
        Ok(())
    } else {
        Err(CliError::InvalidCells(format!(
            "invalid cells (more than 5% failed replications): {}",
            invalid.join(", ")
        )))
    }
}

pub fn report(csv: &Path) -> Result<(), CliError> {
    let text = fs::read_to_string(csv).map_err(|e| CliError::Input(format!("cannot read {}: {e}", csv.display())))?;
    let rows = read_report_csv(&text)?;
    print!("{}", render_text_table(&rows));
    Ok(())
}
