//! Command handlers.

use serde::Serialize;

use spectral_clt::centering::centering_value_with_margin;
use spectral_clt::mc_lab::sample_cov_eigenvalues;
use spectral_clt::{
    clt_params_g, closed_form_log, closed_form_lrt_g, closed_form_mean, mp_support,
    null_centering_g, power_from_shift, run_test, CenteringResult, ExperimentReport,
    RepRecord, SpikedModel, TestOutcome,
};

use crate::ingest::{
    build_model, parse_function, read_csv_matrix, validate_config, ExperimentKind, FileConfig,
};
use crate::output::{emit, write_text};
use crate::{CliError, ModelArgs, OutputArgs, SCHEMA_VERSION};

#[derive(Serialize)]
struct ModelEcho {
    p: usize,
    n: usize,
    y_n: f64,
    spikes: Vec<(f64, usize)>,
}

impl ModelEcho {
    fn new(model: &SpikedModel) -> Self {
        ModelEcho {
            p: model.p(),
            n: model.n(),
            y_n: model.aspect_ratio(),
            spikes: model.spikes().iter().map(|s| (s.value, s.mult)).collect(),
        }
    }
}

#[derive(Serialize)]
struct CenteringPayload {
    schema_version: &'static str,
    command: &'static str,
    model: ModelEcho,
    function: String,
    margin: f64,
    result: CenteringResult,
    /// Closed-form value when one exists for the function (x, log, lrt_g).
    oracle: Option<f64>,
    oracle_gap: Option<f64>,
}

pub fn centering(
    model_args: &ModelArgs,
    f_name: &str,
    margin: f64,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let model = build_model(model_args)?;
    let function = parse_function(f_name)?;
    let result = centering_value_with_margin(&function, &model, margin)?;
    let oracle = match function.name() {
        "x" => Some(closed_form_mean(&model)),
        "log" => Some(closed_form_log(&model)?),
        "lrt_g" => Some(closed_form_lrt_g(&model)?),
        _ => None,
    };
    let payload = CenteringPayload {
        schema_version: SCHEMA_VERSION,
        command: "centering",
        model: ModelEcho::new(&model),
        function: function.name().to_string(),
        margin,
        oracle,
        oracle_gap: oracle.map(|o| (result.total - o).abs()),
        result,
    };
    emit(&payload, output)
}

#[derive(Serialize)]
struct TestPayload {
    schema_version: &'static str,
    command: &'static str,
    p: usize,
    n: usize,
    centered_data: bool,
    outcome: TestOutcome,
}

pub fn test(
    csv: &str,
    alpha: f64,
    header: bool,
    center: bool,
    transpose: bool,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let rows = read_csv_matrix(csv, header, transpose)?;
    let n = rows.len();
    let p = rows[0].len();
    let eigenvalues = sample_cov_eigenvalues(&rows, center)?;
    let outcome = run_test(&eigenvalues, p, n, alpha)?;
    let payload = TestPayload {
        schema_version: SCHEMA_VERSION,
        command: "test",
        p,
        n,
        centered_data: center,
        outcome,
    };
    emit(&payload, output)
}

#[derive(Serialize)]
struct PowerRow {
    alpha: f64,
    beta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta_one_spike: Option<f64>,
}

#[derive(Serialize)]
struct PowerPayload {
    schema_version: &'static str,
    command: &'static str,
    model: ModelEcho,
    rows: Vec<PowerRow>,
}

pub fn power(model_args: &ModelArgs, alphas: &str, output: &OutputArgs) -> Result<(), CliError> {
    let model = build_model(model_args)?;
    let mut levels = Vec::new();
    for part in alphas.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let alpha: f64 = part
            .parse()
            .map_err(|_| CliError::input(format!("bad alpha '{part}'")))?;
        levels.push(alpha);
    }
    if levels.is_empty() {
        return Err(CliError::input("no significance levels given"));
    }
    levels.sort_by(f64::total_cmp);
    levels.dedup();

    // one-spike closed-form column when the model has a single simple spike
    let single = model.spike_count() == 1 && model.spikes()[0].mult == 1;
    let y = model.aspect_ratio();
    let mut rows = Vec::with_capacity(levels.len());
    for alpha in levels {
        let beta = spectral_clt::power(&model, alpha)?;
        let beta_one_spike = if single {
            let a = model.spikes()[0].value;
            Some(power_from_shift(a - 1.0 - a.ln(), y, alpha)?)
        } else {
            None
        };
        rows.push(PowerRow { alpha, beta, beta_one_spike });
    }
    let payload = PowerPayload {
        schema_version: SCHEMA_VERSION,
        command: "power",
        model: ModelEcho::new(&model),
        rows,
    };
    emit(&payload, output)
}

#[derive(Serialize)]
struct ExperimentPayload {
    schema_version: &'static str,
    command: &'static str,
    kind: String,
    model: ModelEcho,
    reps: usize,
    seed: u64,
    entry_dist: String,
    function: String,
    alpha: f64,
    report: ExperimentReport,
}

pub fn experiment(
    config_path: &str,
    reps_override: Option<usize>,
    seed_override: Option<u64>,
    alpha_override: Option<f64>,
    dump_reps: Option<&str>,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| CliError::input(format!("cannot read {config_path}: {e}")))?;
    let mut file: FileConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("bad config {config_path}: {e}")))?;
    if let Some(reps) = reps_override {
        file.reps = reps;
    }
    if let Some(seed) = seed_override {
        file.seed = seed;
    }
    if let Some(alpha) = alpha_override {
        file.alpha = alpha;
    }
    let (kind, config) = validate_config(&file)?;

    let (report, records): (ExperimentReport, Vec<RepRecord>) = match kind {
        ExperimentKind::Clt => spectral_clt::run_clt_experiment_detailed(&config)?,
        ExperimentKind::SizePower => spectral_clt::empirical_size_power_detailed(&config)?,
    };

    if let Some(path) = dump_reps {
        let mut csv = String::from("rep,statistic,centered,reject\n");
        for r in &records {
            let reject = r.reject.map(|b| b.to_string()).unwrap_or_default();
            csv.push_str(&format!("{},{},{},{}\n", r.rep, r.statistic, r.centered, reject));
        }
        write_text(path, &csv)?;
    }

    summary_line(&file.kind, &report);
    let payload = ExperimentPayload {
        schema_version: SCHEMA_VERSION,
        command: "experiment",
        kind: file.kind,
        model: ModelEcho::new(&config.model),
        reps: config.reps,
        seed: config.seed,
        entry_dist: match config.entry_dist {
            spectral_clt::EntryDist::Gaussian => "gaussian".into(),
            spectral_clt::EntryDist::Rademacher => "rademacher".into(),
        },
        function: config.test_function.name().to_string(),
        alpha: config.alpha,
        report,
    };
    emit(&payload, output)
}

/// One-line theory-vs-empirical summary on stderr (stdout stays pure JSON).
fn summary_line(kind: &str, report: &ExperimentReport) {
    match (kind, report.reject_rate, report.theory_reject_rate) {
        ("size_power", Some(rate), Some(theory)) => {
            eprintln!(
                "size_power: reject rate {rate:.4} vs theory {theory:.4} \
                 (se {:.4}, {} reps)",
                report.reject_se.unwrap_or(f64::NAN),
                report.reps
            );
        }
        _ => {
            let theory = report
                .theory_mean
                .map(|m| format!("{m:.5}"))
                .unwrap_or_else(|| "n/a".into());
            eprintln!(
                "clt: empirical mean {:.5} vs theory {theory} ({} reps)",
                report.emp_mean, report.reps
            );
        }
    }
}

#[derive(Serialize)]
struct MpInfoPayload {
    schema_version: &'static str,
    command: &'static str,
    p: usize,
    n: usize,
    y_n: f64,
    a_y: f64,
    b_y: f64,
    /// Null CLT constants; present only for y_n < 1 where the corrected
    /// likelihood-ratio test is defined.
    m_g: Option<f64>,
    v_g: Option<f64>,
    null_centering_g: Option<f64>,
}

pub fn mp_info(p: usize, n: usize, output: &OutputArgs) -> Result<(), CliError> {
    if p == 0 || n == 0 {
        return Err(CliError::input(format!("p and n must be positive, got p={p}, n={n}")));
    }
    let y = p as f64 / n as f64;
    let (a_y, b_y) = mp_support(y)?;
    let (m_g, v_g, g0) = if y < 1.0 {
        let (m, v) = clt_params_g(y)?;
        (Some(m), Some(v), Some(null_centering_g(y)?))
    } else {
        (None, None, None)
    };
    let payload = MpInfoPayload {
        schema_version: SCHEMA_VERSION,
        command: "mp-info",
        p,
        n,
        y_n: y,
        a_y,
        b_y,
        m_g,
        v_g,
        null_centering_g: g0,
    };
    emit(&payload, output)
}
