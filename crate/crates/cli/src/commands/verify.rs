use std::fmt::Write as _;

use rdmgeo::eigen::{lowest_eigenpairs_with, spectrum_full};
use rdmgeo::oracle::{analytic_spectrum, brute_force_ground, FullSpaceModel, SolvableFamily, MAX_ORACLE_N};
use rdmgeo::spinops::{assemble_hamiltonian, Model};
use rdmgeo::sweep::{DirectionGrid, Observables};

use super::emit;
use crate::config::{header, RunConfig};
use crate::error::CliError;

const ENERGY_TOL: f64 = 1e-10;
const COORD_TOL: f64 = 1e-9;
/// Ground states closer than this to the next level have no unique coordinates.
const MIN_COORD_GAP: f64 = 1e-6;
const CLOSED_FORM_TOL: f64 = 1e-9;
const CLOSURE_TOL: f64 = 1e-12;
const DIRECTIONS: usize = 16;

struct Row {
    check: &'static str,
    model: Model,
    n: usize,
    cases: usize,
    max_error: f64,
    tolerance: f64,
}

impl Row {
    fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

fn couplings() -> Result<Vec<[f64; 3]>, CliError> {
    let mut dirs = vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    dirs.extend_from_slice(DirectionGrid::fibonacci(DIRECTIONS)?.directions());
    Ok(dirs)
}

fn oracle_rows(config: &RunConfig, model: Model, n: usize, dirs: &[[f64; 3]]) -> Result<Vec<Row>, CliError> {
    let observables = Observables::new(model, n)?;
    let (mut energy_err, mut coord_err, mut coord_cases) = (0.0f64, 0.0f64, 0);
    for &lambda in dirs {
        let oracle = brute_force_ground(model, lambda, n)?;
        let h = assemble_hamiltonian(&model.spec(lambda, n)?)?;
        let sol = lowest_eigenpairs_with(&h, h.dim().min(3), config.tol_residual, &config.eigen_options())?;
        let e0 = sol.ground_energy();
        energy_err = energy_err.max((e0 - oracle.energy).abs() / e0.abs().max(1.0));
        if sol.degeneracy == 1 && sol.gap01 > MIN_COORD_GAP {
            let coords = observables.coords(sol.ground_state())?;
            let err = coords.iter().zip(oracle.coords).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            coord_err = coord_err.max(err);
            coord_cases += 1;
        }
    }
    let closure = FullSpaceModel::for_model(model, [1.0, 1.0, 1.0], n)?.closure_residual();
    Ok(vec![
        Row { check: "ground_energy", model, n, cases: dirs.len(), max_error: energy_err, tolerance: ENERGY_TOL },
        Row { check: "coordinates", model, n, cases: coord_cases, max_error: coord_err, tolerance: COORD_TOL },
        Row { check: "symmetric_closure", model, n, cases: 1, max_error: closure, tolerance: CLOSURE_TOL },
    ])
}

fn closed_form_rows(n: usize) -> Result<Vec<Row>, CliError> {
    let cases = [
        ("closed_form_zero_field", Model::Ising, [1.0, 0.0, 0.0], SolvableFamily::IsingZeroField { j: 1.0, n }),
        ("closed_form_transverse", Model::Ising, [1.0, 0.0, -0.7], SolvableFamily::IsingBx { j: 1.0, bx: -0.7, n }),
        ("closed_form_isotropic_xy", Model::Xy, [1.0, 1.0, 0.0], SolvableFamily::XyEqual { j1: 1.0, n }),
    ];
    cases
        .into_iter()
        .map(|(check, model, lambda, family)| {
            let numeric = spectrum_full(&assemble_hamiltonian(&model.spec(lambda, n)?)?)?;
            let exact = analytic_spectrum(family)?;
            let scale = exact.iter().fold(1.0f64, |m, e| m.max(e.abs()));
            let max_error = numeric.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
            Ok(Row { check, model, n, cases: exact.len(), max_error, tolerance: CLOSED_FORM_TOL })
        })
        .collect()
}

/// Pass/fail table comparing the pipeline with the full-space oracle and
/// with closed-form spectra for `N = 1..=max_n`.
pub fn verify(config: &RunConfig) -> Result<(), CliError> {
    if !(1..=MAX_ORACLE_N).contains(&config.max_n) {
        return Err(CliError::Config(format!("--max-n must lie in 1..={MAX_ORACLE_N}, got {}", config.max_n)));
    }
    let dirs = couplings()?;
    let mut rows = Vec::new();
    for n in 1..=config.max_n {
        for model in Model::ALL {
            rows.extend(oracle_rows(config, model, n, &dirs)?);
        }
        rows.extend(closed_form_rows(n)?);
    }
    let mut text = header("verify", config);
    text.push_str("check,model,N,cases,max_error,tolerance,status\n");
    for r in &rows {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        writeln!(text, "{},{},{},{},{:e},{:e},{status}", r.check, r.model, r.n, r.cases, r.max_error, r.tolerance)
            .expect("writing to a String cannot fail");
    }
    emit(config, &text)?;
    let failed = rows.iter().filter(|r| !r.passed()).count();
    if failed > 0 {
        return Err(CliError::Numerical(format!("{failed} of {} verification rows failed", rows.len())));
    }
    Ok(())
}
