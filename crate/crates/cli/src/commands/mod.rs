mod geometry;
mod scaling;
mod verify;

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use rdmgeo::eigen::lowest_eigenpairs_with;
use rdmgeo::spinops::{assemble_hamiltonian, build_operator, Model};
use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::config::{header, json_envelope, RunConfig};
use crate::error::CliError;

pub use geometry::{meanfield, project, sweep};
pub use scaling::{classify, scaling};
pub use verify::verify;

/// Writes `text` to `config.output` when set, else to stdout.
fn emit(config: &RunConfig, text: &str) -> Result<(), CliError> {
    match &config.output {
        Some(path) => write_file(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()).map_err(CliError::io("write", "stdout")),
    }
}

fn print_stdout(text: &str) -> Result<(), CliError> {
    io::stdout().lock().write_all(text.as_bytes()).map_err(CliError::io("write", "stdout"))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(CliError::io("create", parent))?;
    }
    fs::write(path, text).map_err(CliError::io("write", path))
}

fn csv_with_header(command: &str, config: &RunConfig, body: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> String {
    let mut buf = header(command, config).into_bytes();
    body(&mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

/// Couplings keyed by their physical names, in model order.
struct NamedLambda {
    model: Model,
    values: [f64; 3],
}

impl Serialize for NamedLambda {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(3))?;
        for (name, value) in self.model.parameter_names().iter().zip(self.values) {
            map.serialize_entry(name, &value)?;
        }
        map.end()
    }
}

#[derive(serde::Serialize)]
struct SpectrumResult {
    model: Model,
    #[serde(rename = "N")]
    n: usize,
    lambda: NamedLambda,
    energies: Vec<f64>,
    gap01: f64,
    gap12: f64,
    degeneracy: usize,
    tol_deg: f64,
}

pub fn spectrum(config: &RunConfig) -> Result<(), CliError> {
    let (model, n, lambda) = (config.model(), config.require_n()?, config.require_lambda()?);
    let h = assemble_hamiltonian(&model.spec(lambda, n)?)?;
    let sol = lowest_eigenpairs_with(&h, config.m, config.tol_residual, &config.eigen_options())?;
    let result = SpectrumResult {
        model,
        n,
        lambda: NamedLambda { model, values: lambda },
        energies: sol.energies,
        gap01: sol.gap01,
        gap12: sol.gap12,
        degeneracy: sol.degeneracy,
        tol_deg: sol.tol_deg,
    };
    emit(config, &json_envelope("spectrum", config, &result))
}

/// Dense `row,col,re,im` listing of a collective operator, or of the model
/// Hamiltonian when no operator is given.
pub fn ops_dump(config: &RunConfig) -> Result<(), CliError> {
    let n = config.require_n()?;
    let matrix = match config.operator {
        Some(kind) => build_operator(kind, n)?,
        None => assemble_hamiltonian(&config.model().spec(config.require_lambda()?, n)?)?,
    };
    let mut text = header("ops-dump", config);
    text.push_str("row,col,re,im\n");
    for i in 0..matrix.dim() {
        for j in 0..matrix.dim() {
            let z = matrix.get(i, j);
            writeln!(text, "{i},{j},{},{}", z.re, z.im).expect("writing to a String cannot fail");
        }
    }
    emit(config, &text)
}
