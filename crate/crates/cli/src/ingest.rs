//! Input parsing: spike specs, CSV datasets, and experiment config files.

use serde::Deserialize;

use spectral_clt::{EntryDist, ExperimentConfig, SpectralFunction, SpikedModel};

use crate::{CliError, ModelArgs};

/// Parse `value:multiplicity[,value:multiplicity...]` spike specs.
pub fn parse_spikes(specs: &[String]) -> Result<Vec<(f64, usize)>, CliError> {
    let mut spikes = Vec::new();
    for spec in specs {
        for part in spec.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (value, mult) = part.split_once(':').ok_or_else(|| {
                CliError::input(format!(
                    "bad spike spec '{part}': expected value:multiplicity"
                ))
            })?;
            let value: f64 = value.trim().parse().map_err(|_| {
                CliError::input(format!("bad spike value '{value}' in '{part}'"))
            })?;
            let mult: usize = mult.trim().parse().map_err(|_| {
                CliError::input(format!("bad spike multiplicity '{mult}' in '{part}'"))
            })?;
            spikes.push((value, mult));
        }
    }
    Ok(spikes)
}

pub fn build_model(args: &ModelArgs) -> Result<SpikedModel, CliError> {
    let spikes = parse_spikes(&args.spikes)?;
    Ok(SpikedModel::new(args.p, args.n, &spikes)?)
}

pub fn parse_function(name: &str) -> Result<SpectralFunction, CliError> {
    SpectralFunction::by_name(name).ok_or_else(|| {
        CliError::input(format!(
            "unknown function '{name}': expected x, x2, log, lrt_g, or poly:<c0,c1,...>"
        ))
    })
}

/// Read a CSV of reals into rows, with ragged/NaN cells reported by position.
pub fn read_csv_matrix(
    path: &str,
    header: bool,
    transpose: bool,
) -> Result<Vec<Vec<f64>>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {path}: {e}")))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, line) in text.lines().enumerate() {
        if header && idx == 0 {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (col, cell) in line.split(',').enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| {
                CliError::input(format!(
                    "non-numeric cell '{}' at line {}, column {}",
                    cell.trim(),
                    idx + 1,
                    col + 1
                ))
            })?;
            row.push(value);
        }
        if let Some(w) = width {
            if row.len() != w {
                return Err(CliError::input(format!(
                    "ragged CSV: line {} has {} columns, expected {w}",
                    idx + 1,
                    row.len()
                )));
            }
        } else {
            width = Some(row.len());
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::input(format!("{path} contains no data rows")));
    }
    if transpose {
        let (r, c) = (rows.len(), rows[0].len());
        let mut flipped = vec![vec![0.0; r]; c];
        for i in 0..r {
            for j in 0..c {
                flipped[j][i] = rows[i][j];
            }
        }
        rows = flipped;
    }
    Ok(rows)
}

/// JSON experiment description.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub kind: String,
    pub model: FileModel,
    pub reps: usize,
    pub seed: u64,
    #[serde(default = "default_entry_dist")]
    pub entry_dist: String,
    #[serde(default = "default_function")]
    pub function: String,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileModel {
    pub p: usize,
    pub n: usize,
    #[serde(default)]
    pub spikes: Vec<(f64, usize)>,
}

fn default_entry_dist() -> String {
    "gaussian".into()
}

fn default_function() -> String {
    "lrt_g".into()
}

fn default_alpha() -> f64 {
    0.05
}

pub enum ExperimentKind {
    Clt,
    SizePower,
}

/// Validate a parsed config exhaustively, listing every violation.
pub fn validate_config(
    file: &FileConfig,
) -> Result<(ExperimentKind, ExperimentConfig), CliError> {
    let mut issues: Vec<String> = Vec::new();

    let kind = match file.kind.as_str() {
        "clt" => Some(ExperimentKind::Clt),
        "size_power" => Some(ExperimentKind::SizePower),
        other => {
            issues.push(format!("kind '{other}' is not one of: clt, size_power"));
            None
        }
    };
    let model = match SpikedModel::new(file.model.p, file.model.n, &file.model.spikes) {
        Ok(m) => Some(m),
        Err(e) => {
            issues.push(format!("model: {e}"));
            None
        }
    };
    let entry_dist = match file.entry_dist.as_str() {
        "gaussian" => Some(EntryDist::Gaussian),
        "rademacher" => Some(EntryDist::Rademacher),
        other => {
            issues.push(format!("entry_dist '{other}' is not one of: gaussian, rademacher"));
            None
        }
    };
    let function = match SpectralFunction::by_name(&file.function) {
        Some(f) => Some(f),
        None => {
            issues.push(format!(
                "function '{}' is not one of: x, x2, log, lrt_g, poly:<coeffs>",
                file.function
            ));
            None
        }
    };
    if file.reps == 0 {
        issues.push("reps must be at least 1".into());
    }
    if !file.alpha.is_finite() || file.alpha <= 0.0 || file.alpha >= 1.0 {
        issues.push(format!("alpha {} must lie strictly inside (0, 1)", file.alpha));
    }
    if matches!(kind, Some(ExperimentKind::SizePower)) {
        if let Some(m) = &model {
            if m.aspect_ratio() >= 1.0 {
                issues.push(format!(
                    "size_power experiments need p < n, got y_n = {}",
                    m.aspect_ratio()
                ));
            }
        }
        if entry_dist == Some(EntryDist::Rademacher) {
            issues.push("size_power experiments require gaussian entries".into());
        }
    }

    if !issues.is_empty() {
        return Err(CliError::input(format!(
            "invalid experiment config:\n  - {}",
            issues.join("\n  - ")
        )));
    }
    Ok((
        kind.unwrap(),
        ExperimentConfig {
            model: model.unwrap(),
            reps: file.reps,
            seed: file.seed,
            entry_dist: entry_dist.unwrap(),
            test_function: function.unwrap(),
            alpha: file.alpha,
        },
    ))
}
