use std::fs;

use rdmgeo::ruling::{
    classify as classify_series, read_series_csv, scan_family, write_series_csv, ClassifyConfig, LambdaFamily,
};

use super::{csv_with_header, emit, print_stdout, write_file};
use crate::config::{config_from_header, json_envelope, RunConfig};
use crate::error::CliError;

fn require_family(config: &RunConfig) -> Result<LambdaFamily, CliError> {
    let text = config.family.as_deref().ok_or_else(|| CliError::Config("--family is required".into()))?;
    Ok(LambdaFamily::parse(config.model(), text)?)
}

/// Scans a coupling family over `t` and `ns`, classifies the result and
/// prints the report. With `--output`, also writes `series.csv` and
/// `report.json` there.
pub fn scaling(config: &RunConfig) -> Result<(), CliError> {
    let family = require_family(config)?;
    let series = scan_family(&family, &config.t, &config.ns, &config.scan_options())?;
    let failures: Vec<String> = series
        .cells
        .iter()
        .filter_map(|c| c.outcome.as_ref().err().map(|e| format!("t = {}, N = {}: {e}", c.t, c.n)))
        .collect();
    if let Some(dir) = &config.output {
        write_file(&dir.join("series.csv"), &csv_with_header("scaling", config, |b| write_series_csv(b, &series)))?;
    }
    if !failures.is_empty() {
        return Err(CliError::Numerical(failures.join("; ")));
    }
    let report = classify_series(&series, &ClassifyConfig::default())?;
    let text = json_envelope("scaling", config, &report);
    if let Some(dir) = &config.output {
        write_file(&dir.join("report.json"), &text)?;
    }
    print_stdout(&text)
}

/// Classifies a series written by `scaling`. Model and family come from the
/// file's header unless given explicitly.
pub fn classify(config: &RunConfig) -> Result<(), CliError> {
    let path = config.input.as_deref().ok_or_else(|| CliError::Config("--input is required".into()))?;
    let text = fs::read_to_string(path).map_err(CliError::io("read", path))?;
    let recorded = config_from_header(&text).unwrap_or_default();
    let effective = RunConfig {
        model: config.model.or(recorded.model),
        family: config.family.clone().or(recorded.family),
        ..config.clone()
    };
    let series = read_series_csv(text.as_bytes(), require_family(&effective)?)?;
    if let Some(cell) = series.cells.iter().find(|c| c.outcome.is_err()) {
        return Err(CliError::Numerical(format!("series holds a failed cell at t = {}, N = {}", cell.t, cell.n)));
    }
    let report = classify_series(&series, &ClassifyConfig::default())?;
    emit(config, &json_envelope("classify", &effective, &report))
}
