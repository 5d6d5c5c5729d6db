use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::models::{gen_response, gen_scenario, Model, Scenario};
use super::spearman::spearman;
use crate::error::{Error, Result};
use crate::estimators::{GsaveExponent, Hyper, MethodKind, Registry};
use crate::tuning::{tune, Tuned};

/// Fraction of failed replications above which a cell is reported invalid.
pub const MAX_FAILURE_RATE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TuningMode {
    /// Cross-validate on every replication's training sample.
    #[default]
    PerReplication,
    /// Cross-validate once on replication 0 and reuse the result.
    OncePerCell,
}

/// One table cell: a model, a predictor scenario and the methods to compare.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub model: Model,
    pub scenario: Scenario,
    pub n_train: usize,
    pub n_test: usize,
    pub reps: usize,
    pub p: usize,
    pub seed: u64,
    pub methods: Vec<MethodKind>,
    pub d: usize,
    pub tuning: TuningMode,
    pub gsave_exponent: GsaveExponent,
}

impl SimConfig {
    pub fn new(model: Model, scenario: Scenario, methods: Vec<MethodKind>) -> Self {
        Self {
            model,
            scenario,
            n_train: 200,
            n_test: 200,
            reps: 200,
            p: 10,
            seed: 0,
            methods,
            d: 1,
            tuning: TuningMode::PerReplication,
            gsave_exponent: GsaveExponent::Derivation,
        }
    }

    pub fn with_reps(mut self, reps: usize) -> Self {
        self.reps = reps;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidInput("reps must be at least 1".into()));
        }
        if self.p < 2 {
            return Err(Error::InvalidInput(format!("p must be at least 2, got {}", self.p)));
        }
        if self.n_train < 3 || self.n_test < 2 {
            return Err(Error::InvalidInput("need n_train >= 3 and n_test >= 2".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidInput("no methods selected".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: MethodKind,
    pub mean_truth: f64,
    pub sd_truth: f64,
    /// Only for models I–III.
    pub mean_resp: Option<f64>,
    pub sd_resp: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub config: SimConfig,
    pub methods: Vec<MethodSummary>,
    pub failures: usize,
    pub valid: bool,
    pub wall_time_secs: f64,
}

impl CellResult {
    pub fn method(&self, kind: MethodKind) -> Option<&MethodSummary> {
        self.methods.iter().find(|m| m.method == kind)
    }
}

/// RNG for replication `rep`: ChaCha8 keyed by the master seed, on stream `rep`.
pub fn replication_rng(seed: u64, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep as u64);
    rng
}

struct RepOutcome {
    truth: Vec<f64>,
    resp: Vec<f64>,
}

fn run_replication(cfg: &SimConfig, rep: usize, shared: Option<&Tuned>) -> Result<RepOutcome> {
    let mut rng = replication_rng(cfg.seed, rep);
    let x = gen_scenario(cfg.scenario, cfg.n_train, cfg.p, &mut rng);
    let (y, _) = gen_response(cfg.model, &x, &mut rng)?;
    let x_test = gen_scenario(cfg.scenario, cfg.n_test, cfg.p, &mut rng);
    let (y_test, truth_test) = gen_response(cfg.model, &x_test, &mut rng)?;

    let tuned = match shared {
        Some(t) => t.clone(),
        None => tune(&x, &y)?,
    };
    let hyper: Hyper = tuned.hyper(cfg.d).with_gsave_exponent(cfg.gsave_exponent);
    let registry = Registry::builtin();
    let y_test = y_test.column(0);
    let mut out = RepOutcome {
        truth: Vec::with_capacity(cfg.methods.len()),
        resp: Vec::with_capacity(cfg.methods.len()),
    };
    for &m in &cfg.methods {
        let model = registry.fit(m.as_str(), &x, &y, &hyper)?;
        let pred: Vec<f64> = model.predict(&x_test)?.column(0).iter().copied().collect();
        out.truth.push(spearman(&pred, &truth_test)?.abs());
        if cfg.model.is_mean_model() {
            out.resp.push(spearman(&pred, &y_test)?.abs());
        }
    }
    Ok(out)
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let sd = if v.len() > 1 {
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, sd)
}

/// Runs every replication of one cell on the current rayon pool.
///
/// Replication `r` draws from [`replication_rng`]`(seed, r)`, so results do not
/// depend on scheduling. A replication that fails anywhere (tuning, fitting or
/// a degenerate correlation) is dropped and counted.
pub fn run_cell(cfg: &SimConfig) -> Result<CellResult> {
    cfg.validate()?;
    let start = Instant::now();
    let shared = match cfg.tuning {
        TuningMode::PerReplication => None,
        TuningMode::OncePerCell => {
            let mut rng = replication_rng(cfg.seed, 0);
            let x = gen_scenario(cfg.scenario, cfg.n_train, cfg.p, &mut rng);
            let (y, _) = gen_response(cfg.model, &x, &mut rng)?;
            Some(tune(&x, &y)?)
        }
    };
    let outcomes: Vec<Result<RepOutcome>> = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| run_replication(cfg, rep, shared.as_ref()))
        .collect();
    let ok: Vec<&RepOutcome> = outcomes.iter().filter_map(|o| o.as_ref().ok()).collect();
    let failures = cfg.reps - ok.len();

    let methods = if ok.is_empty() {
        Vec::new()
    } else {
        cfg.methods
            .iter()
            .enumerate()
            .map(|(k, &method)| {
                let truth: Vec<f64> = ok.iter().map(|o| o.truth[k]).collect();
                let (mean_truth, sd_truth) = mean_sd(&truth);
                let (mean_resp, sd_resp) = if cfg.model.is_mean_model() {
                    let resp: Vec<f64> = ok.iter().map(|o| o.resp[k]).collect();
                    let (m, s) = mean_sd(&resp);
                    (Some(m), Some(s))
                } else {
                    (None, None)
                };
                MethodSummary {
                    method,
                    mean_truth,
                    sd_truth,
                    mean_resp,
                    sd_resp,
                }
            })
            .collect()
    };
    Ok(CellResult {
        config: cfg.clone(),
        methods,
        failures,
        valid: !ok.is_empty() && (failures as f64) <= MAX_FAILURE_RATE * cfg.reps as f64,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// Runs cells in order, with at most `threads` workers (all cores when `None`).
pub fn run_cells(cfgs: &[SimConfig], threads: Option<usize>) -> Result<Vec<CellResult>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
    pool.install(|| cfgs.iter().map(run_cell).collect())
}

/// A benchmark cell as named on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellSpec {
    pub model: Model,
    pub scenario: Scenario,
    pub methods: Vec<MethodKind>,
}

fn default_methods(model: Model) -> Vec<MethodKind> {
    use MethodKind::*;
    if model.is_mean_model() {
        vec![Ksir, Kcca, Gsir]
    } else {
        vec![Gsave, Ksir, Kcca, Gsir]
    }
}

fn preset(models: &[Model]) -> Vec<CellSpec> {
    let mut out = Vec::new();
    for s in Scenario::ALL {
        for &m in models {
            out.push(CellSpec {
                model: m,
                scenario: s,
                methods: default_methods(m),
            });
        }
    }
    out
}

/// Parses `table1`, `table2`, or `MODEL/SCENARIO[/method[,method...]]` items.
///
/// Items naming the same model and scenario are merged, keeping first-seen order.
pub fn parse_cells(items: &[String]) -> Result<Vec<CellSpec>> {
    if items.is_empty() {
        return Err(Error::InvalidInput("no benchmark cells given".into()));
    }
    let mut cells: Vec<CellSpec> = Vec::new();
    for item in items {
        let parsed = match item.to_ascii_lowercase().as_str() {
            "table1" => preset(&[Model::I, Model::II, Model::III]),
            "table2" => preset(&[Model::IV, Model::V, Model::VI]),
            _ => {
                let parts: Vec<&str> = item.split('/').collect();
                if !(2..=3).contains(&parts.len()) {
                    return Err(Error::InvalidInput(format!(
                        "bad cell `{item}`: expected MODEL/SCENARIO[/methods], table1 or table2"
                    )));
                }
                let model: Model = parts[0].parse()?;
                let scenario: Scenario = parts[1].parse()?;
                let methods = match parts.get(2) {
                    None => default_methods(model),
                    Some(&"all") => MethodKind::ALL.to_vec(),
                    Some(list) => list
                        .split(',')
                        .map(str::parse)
                        .collect::<Result<Vec<MethodKind>>>()?,
                };
                vec![CellSpec { model, scenario, methods }]
            }
        };
        for c in parsed {
            match cells.iter_mut().find(|e| e.model == c.model && e.scenario == c.scenario) {
                Some(existing) => {
                    for m in c.methods {
                        if !existing.methods.contains(&m) {
                            existing.methods.push(m);
                        }
                    }
                }
                None => cells.push(c),
            }
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(model: Model, methods: Vec<MethodKind>) -> SimConfig {
        SimConfig {
            n_train: 30,
            n_test: 30,
            p: 3,
            ..SimConfig::new(model, Scenario::A, methods).with_reps(3).with_seed(11)
        }
    }

    #[test]
    fn presets_have_nine_cells() {
        let t2 = parse_cells(&["table2".into()]).unwrap();
        assert_eq!(t2.len(), 9);
        assert!(t2.iter().all(|c| c.methods.len() == 4));
        let t1 = parse_cells(&["table1".into()]).unwrap();
        assert_eq!(t1.len(), 9);
        assert!(t1.iter().all(|c| c.methods == vec![MethodKind::Ksir, MethodKind::Kcca, MethodKind::Gsir]));
    }

    #[test]
    fn explicit_cells_merge() {
        let c = parse_cells(&["II/A/gsir".into(), "ii/a/kcca,gsir".into(), "IV/C".into()]).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].methods, vec![MethodKind::Gsir, MethodKind::Kcca]);
        assert_eq!(c[1].model, Model::IV);
    }

    #[test]
    fn bad_cells_rejected() {
        for bad in ["VII/A", "II/D", "II/A/pca", "II", "table3", "I/A/gsir/x"] {
            assert!(parse_cells(&[bad.into()]).is_err(), "{bad}");
        }
        assert!(parse_cells(&[]).is_err());
    }

    #[test]
    fn replication_streams_differ() {
        use rand::RngCore;
        let a = replication_rng(5, 0).next_u64();
        let b = replication_rng(5, 1).next_u64();
        assert_ne!(a, b);
        assert_eq!(a, replication_rng(5, 0).next_u64());
    }

    #[test]
    fn small_cell_runs_and_is_deterministic() {
        let cfg = tiny(Model::II, vec![MethodKind::Gsir, MethodKind::Ksir]);
        let cfg = SimConfig { reps: 1, ..cfg };
        let a = run_cell(&cfg).unwrap();
        let b = run_cell(&cfg).unwrap();
        assert_eq!(a.methods, b.methods);
        assert!(a.valid);
        for m in &a.methods {
            assert!((0.0..=1.0).contains(&m.mean_truth));
            assert!(m.mean_resp.is_some());
        }
    }

    #[test]
    fn variance_models_have_no_response_column() {
        let r = run_cell(&tiny(Model::IV, vec![MethodKind::Gsave])).unwrap();
        assert!(r.methods[0].mean_resp.is_none());
        assert!(r.methods[0].sd_truth >= 0.0);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let cfgs = vec![tiny(Model::III, vec![MethodKind::Gsir, MethodKind::Kcca])];
        let one = run_cells(&cfgs, Some(1)).unwrap();
        let four = run_cells(&cfgs, Some(4)).unwrap();
        assert_eq!(one[0].methods, four[0].methods);
    }

    #[test]
    fn tune_once_mode_runs() {
        let cfg = SimConfig {
            tuning: TuningMode::OncePerCell,
            ..tiny(Model::I, vec![MethodKind::Gsir])
        };
        assert!(run_cell(&cfg).unwrap().valid);
    }

    #[test]
    fn invalid_config() {
        assert!(run_cell(&SimConfig { reps: 0, ..tiny(Model::I, vec![MethodKind::Gsir]) }).is_err());
        assert!(run_cell(&SimConfig { p: 1, ..tiny(Model::I, vec![MethodKind::Gsir]) }).is_err());
    }
}
