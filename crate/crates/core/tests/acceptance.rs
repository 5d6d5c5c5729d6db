//! Acceptance criteria 1 through 9.
//!
//! Every test writes one `criterion N [PASS|FAIL]` line straight to stderr so
//! the verdicts stay visible even when libtest captures output. The tests
//! share a lock so that the timing criteria do not compete with the Monte
//! Carlo cells for CPU.

mod common;

use std::io::Write;
use std::sync::{Mutex, MutexGuard};
use std::time::Instant;

use nalgebra::DMatrix;
use nlsdr_core::estimators::{gsir_matrix, GsaveExponent, Hyper, MethodKind, Registry};
use nlsdr_core::kernels::{build_gram, centering_matrix, KernelSpec};
use nlsdr_core::linalg::{psd_power, ridge_inv_power, sym_eig};
use nlsdr_core::simbench::{run_cells, spearman, write_report_csv, CellResult, Model, Scenario, SimConfig};
use nlsdr_core::tuning::{cv_criterion, tune};
use nlsdr_core::DataMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const REPS: usize = 100;
const SEED: u64 = 20100;

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn verdict(id: u32, title: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let line = format!("criterion {id} [{tag}] {title}: {detail}\n");
    std::io::stderr().write_all(line.as_bytes()).unwrap();
}

fn cell(model: Model, scenario: Scenario, methods: &[MethodKind]) -> SimConfig {
    SimConfig::new(model, scenario, methods.to_vec()).with_reps(REPS).with_seed(SEED)
}

fn mean_truth(r: &CellResult, kind: MethodKind) -> f64 {
    r.method(kind).expect("method was run").mean_truth
}

#[test]
fn criterion_1_gsir_table_one() {
    let _g = serial();
    let targets = [(Model::II, Scenario::A, 0.91), (Model::III, Scenario::B, 0.97), (Model::III, Scenario::C, 0.96)];
    let cfgs: Vec<SimConfig> = targets.iter().map(|&(m, s, _)| cell(m, s, &[MethodKind::Gsir])).collect();
    let results = run_cells(&cfgs, None).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for ((m, s, want), r) in targets.iter().zip(&results) {
        let got = mean_truth(r, MethodKind::Gsir);
        let hit = r.valid && (got - want).abs() <= 0.06;
        ok &= hit;
        parts.push(format!("{}/{s} {got:.3} (target {want:.2} ± 0.06)", m.as_str()));
    }
    verdict(1, "GSIR table-1 means", ok, &parts.join(", "));
    assert!(ok, "{}", parts.join(", "));
}

#[test]
fn criterion_2_ksir_below_gsir() {
    let _g = serial();
    let r = &run_cells(&[cell(Model::III, Scenario::A, &[MethodKind::Gsir, MethodKind::Ksir])], None).unwrap()[0];
    let (gsir, ksir) = (mean_truth(r, MethodKind::Gsir), mean_truth(r, MethodKind::Ksir));
    let ok = r.valid && ksir < gsir - 0.05;
    let detail = format!("III/A KSIR {ksir:.3} vs GSIR {gsir:.3} (need KSIR < GSIR - 0.05)");
    verdict(2, "table-1 ordering", ok, &detail);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_3_gsave_superiority() {
    let _g = serial();
    let targets = [(Model::IV, Scenario::A, 0.89), (Model::V, Scenario::B, 0.88), (Model::V, Scenario::C, 0.82)];
    let run = |exp: GsaveExponent| {
        let cfgs: Vec<SimConfig> = targets
            .iter()
            .map(|&(m, s, _)| {
                let mut c = cell(m, s, &[MethodKind::Gsave, MethodKind::Gsir]);
                c.gsave_exponent = exp;
                c
            })
            .collect();
        let results = run_cells(&cfgs, None).unwrap();
        let mut ok = true;
        let mut parts = Vec::new();
        for ((m, s, want), r) in targets.iter().zip(&results) {
            let (gsave, gsir) = (mean_truth(r, MethodKind::Gsave), mean_truth(r, MethodKind::Gsir));
            ok &= r.valid && gsave >= gsir + 0.25 && (gsave - want).abs() <= 0.10;
            parts.push(format!(
                "{}/{s} GSAVE {gsave:.3} GSIR {gsir:.3} (target {want:.2} ± 0.10)",
                m.as_str()
            ));
        }
        (ok, parts.join(", "))
    };
    let (ok, detail) = run(GsaveExponent::Derivation);
    let (ok, detail) = if ok {
        (true, format!("derivation exponent: {detail}"))
    } else {
        let (ok_printed, printed) = run(GsaveExponent::Printed);
        let which = if ok_printed { "printed exponent passed" } else { "neither exponent passed" };
        (ok_printed, format!("{which}; derivation: {detail}; printed: {printed}"))
    };
    verdict(3, "GSAVE beats GSIR on variance models", ok, &detail);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_4_response_correlation() {
    let _g = serial();
    let r = &run_cells(&[cell(Model::I, Scenario::A, &[MethodKind::Gsir])], None).unwrap()[0];
    let got = r.method(MethodKind::Gsir).unwrap().mean_resp.unwrap();
    let ok = r.valid && (got - 0.64).abs() <= 0.06;
    let detail = format!("I/A GSIR vs response {got:.3} (target 0.64 ± 0.06)");
    verdict(4, "response-correlation column", ok, &detail);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_5_cv_oracle() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for trial in 0..10 {
        let n = [5, 8, 12][trial % 3];
        let (x, y) = common::random_data(&mut rng, n);
        let gx = rng.random_range(0.1..2.0);
        let gy = rng.random_range(0.1..2.0);
        let want = common::oracle(&x, &y, gx, 0.01, gy);
        let got = cv_criterion(&DataMatrix::from_rows(&x).unwrap(), &DataMatrix::from_rows(&y).unwrap(), gx, 0.01, gy)
            .unwrap();
        worst = worst.max((got - want).abs() / want.abs());
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = worst <= 1e-8 && secs < 10.0;
    let detail = format!("max relative error {worst:.2e} over 10 datasets in {secs:.2}s");
    verdict(5, "CV oracle equivalence", ok, &detail);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_6_linear_algebra_properties() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = Vec::new();
    for inst in 0..20 {
        let n = rng.random_range(5..=100);
        let p = rng.random_range(1..=6);
        let x = DataMatrix::new(DMatrix::from_fn(n, p, |_, _| rng.sample(StandardNormal))).unwrap();
        let y = DataMatrix::new(DMatrix::from_fn(n, 1, |_, _| rng.sample(StandardNormal))).unwrap();
        let spec = KernelSpec::gaussian(rng.random_range(0.05..2.0)).unwrap();
        let bx = build_gram(&x, &spec);
        let by = build_gram(&y, &KernelSpec::gaussian(0.7).unwrap());

        let q = centering_matrix(n);
        if (&q * &q - &q).amax() > 1e-12 {
            failures.push(format!("#{inst} Q not idempotent"));
        }
        let scale = bx.k.amax();
        if sym_eig(&bx.k).unwrap().values.min() < -1e-10 * scale * n as f64 {
            failures.push(format!("#{inst} K not PSD"));
        }
        let half = psd_power(&bx.g, 0.5).unwrap();
        let gnorm = bx.g.norm();
        if (&half * &half - &bx.g).norm() > 1e-8 * gnorm {
            failures.push(format!("#{inst} half power does not square back"));
        }
        let eps = 10f64.powf(rng.random_range(-4.0..0.0));
        let inv = ridge_inv_power(&bx.g, eps, 1.0).unwrap();
        let eye = DMatrix::<f64>::identity(n, n);
        if (&inv * (&bx.g + &eye * eps) - &eye).amax() > 1e-7 {
            failures.push(format!("#{inst} ridge inverse identity"));
        }
        let m = gsir_matrix(&sym_eig(&bx.g).unwrap(), &sym_eig(&by.g).unwrap(), eps, eps).unwrap();
        let ev = sym_eig(&m).unwrap().values;
        if ev.iter().any(|&l| !(-1e-8..=1.0 + 1e-8).contains(&l)) {
            failures.push(format!("#{inst} GSIR spectrum outside [0, 1]"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = failures.is_empty() && secs < 10.0;
    let detail = if failures.is_empty() {
        format!("20 instances in {secs:.2}s")
    } else {
        format!("{} in {secs:.2}s", failures.join("; "))
    };
    verdict(6, "linear-algebra property suite", ok, &detail);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_7_thread_determinism() {
    let _g = serial();
    let cfgs: Vec<SimConfig> = [(Model::I, Scenario::A), (Model::V, Scenario::C)]
        .iter()
        .map(|&(m, s)| {
            let mut c = SimConfig::new(m, s, MethodKind::ALL.to_vec()).with_reps(6).with_seed(7);
            c.n_train = 60;
            c.n_test = 60;
            c
        })
        .collect();
    let one = write_report_csv(&run_cells(&cfgs, Some(1)).unwrap());
    let mut ok = true;
    for threads in [2, 4] {
        ok &= write_report_csv(&run_cells(&cfgs, Some(threads)).unwrap()) == one;
    }
    let detail = format!("report CSV ({} bytes) identical for --threads 1, 2 and 4: {ok}", one.len());
    verdict(7, "determinism across thread counts", ok, &detail);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_8_spearman() {
    let _g = serial();
    let v = [0.3, -1.2, 4.0, 2.2, 0.0];
    let mut ok = spearman(&v, &v).unwrap() == 1.0
        && spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() == -1.0
        && spearman(&[1.0, 2.0, 2.0, 4.0], &[10.0, 20.0, 20.0, 40.0]).unwrap() == 1.0
        && spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap_err().to_string().contains("undefined correlation");
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let u: Vec<f64> = (0..30).map(|_| rng.random_range(-3.0..3.0)).collect();
        let w: Vec<f64> = u.iter().map(|x| x + rng.random_range(-2.0..2.0)).collect();
        let r = spearman(&u, &w).unwrap();
        for f in [f64::exp, |x: f64| x * x * x, |x: f64| 2.5 * x - 7.0] {
            let fu: Vec<f64> = u.iter().map(|&x| f(x)).collect();
            ok &= spearman(&fu, &w).unwrap() == r;
        }
    }
    verdict(8, "Spearman examples and monotone invariance", ok, &format!("exact: {ok}"));
    assert!(ok);
}

#[test]
fn criterion_9_single_fit_time() {
    let _g = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let x = DataMatrix::new(DMatrix::from_fn(200, 10, |_, _| rng.sample(StandardNormal))).unwrap();
    let y: Vec<f64> =
        (0..200).map(|i| x.row(i)[0] / (1.0 + x.row(i)[1].exp()) + 0.5 * rng.sample::<f64, _>(StandardNormal)).collect();
    let y = DataMatrix::from_column(&y).unwrap();
    let start = Instant::now();
    let tuned = tune(&x, &y).unwrap();
    let hyper: Hyper = tuned.hyper(1);
    let model = Registry::builtin().fit("gsir", &x, &y, &hyper).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let ok = secs < 5.0 && model.d() == 1;
    let detail = format!("tuning (2 × 21 CV evaluations) plus GSIR fit at n=200, p=10 took {secs:.2}s");
    verdict(9, "single fit performance", ok, &detail);
    assert!(ok, "{detail}");
}
