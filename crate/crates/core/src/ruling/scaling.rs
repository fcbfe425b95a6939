use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use super::RulingError;
use crate::eigen::lowest_eigenpairs_with;
use crate::spinops::{assemble_hamiltonian, Model};
use crate::sweep::{norm3, resolve_face_with, Observables, SweepError, SweepOptions};

/// `lambda(t) = offset + slope * t`, one affine component per model parameter.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaFamily {
    pub model: Model,
    pub offset: [f64; 3],
    pub slope: [f64; 3],
}

fn parse_affine(expr: &str) -> Option<(f64, f64)> {
    let expr: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(rest) = expr.strip_suffix('t') else {
        return expr.parse().ok().filter(|v: &f64| v.is_finite()).map(|v| (v, 0.0));
    };
    let rest = rest.strip_suffix('*').unwrap_or(rest);
    let bytes = rest.as_bytes();
    let split =
        (1..bytes.len()).rev().find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (offset, coef) = match split {
        Some(i) => (rest[..i].parse().ok()?, &rest[i..]),
        None => (0.0, rest),
    };
    let coef = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse().ok()?,
    };
    (f64::is_finite(offset) && f64::is_finite(coef)).then_some((offset, coef))
}

impl LambdaFamily {
    pub fn new(model: Model, offset: [f64; 3], slope: [f64; 3]) -> Self {
        Self { model, offset, slope }
    }

    /// Parses `name=expr` pairs separated by commas, one per model parameter.
    /// Each `expr` is a number, `t`, `-t`, `c*t` or `a+c*t`.
    pub fn parse(model: Model, input: &str) -> Result<Self, RulingError> {
        let fail = |reason: String| RulingError::InvalidFamily { input: input.to_string(), reason };
        let names = model.parameter_names();
        let mut seen = [false; 3];
        let mut family = Self::new(model, [0.0; 3], [0.0; 3]);
        for part in input.split(',').filter(|p| !p.trim().is_empty()) {
            let (name, expr) = part.split_once('=').ok_or_else(|| fail(format!("'{part}' is not name=value")))?;
            let idx = names
                .iter()
                .position(|n| n.eq_ignore_ascii_case(name.trim()))
                .ok_or_else(|| fail(format!("unknown parameter '{}' for model {model}", name.trim())))?;
            if std::mem::replace(&mut seen[idx], true) {
                return Err(fail(format!("parameter '{}' given twice", names[idx])));
            }
            let (a, c) = parse_affine(expr).ok_or_else(|| fail(format!("cannot parse value '{}'", expr.trim())))?;
            family.offset[idx] = a;
            family.slope[idx] = c;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(fail(format!("missing parameter '{}'", names[i])));
        }
        Ok(family)
    }

    pub fn at(&self, t: f64) -> [f64; 3] {
        [0, 1, 2].map(|i| self.offset[i] + self.slope[i] * t)
    }
}

impl fmt::Display for LambdaFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, name) in self.model.parameter_names().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            let (a, c) = (self.offset[i], self.slope[i]);
            if c == 0.0 {
                write!(f, "{name}={a}")?;
            } else if a == 0.0 {
                write!(f, "{name}={c}*t")?;
            } else if c < 0.0 {
                write!(f, "{name}={a}{c}*t")?;
            } else {
                write!(f, "{name}={a}+{c}*t")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    /// Face window is `max(tol_deg, eps_scale / N)` above the ground energy.
    pub eps_scale: f64,
    pub min_levels: usize,
    pub sweep: SweepOptions,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { eps_scale: 1.0, min_levels: 3, sweep: SweepOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellRecord {
    pub lambda: [f64; 3],
    pub ground_energy: f64,
    pub gap01: f64,
    pub gap12: f64,
    /// Spacings between the lowest three multiplets (levels grouped at `tol_deg`).
    pub level_gaps: [f64; 2],
    pub degeneracy: usize,
    pub tol_deg: f64,
    pub epsilon: f64,
    pub face_size: usize,
    pub face_diameter: f64,
    pub coords: [f64; 3],
    pub energies: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub t: f64,
    pub n: usize,
    pub outcome: Result<CellRecord, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingSeries {
    pub family: LambdaFamily,
    pub t_values: Vec<f64>,
    pub n_values: Vec<usize>,
    /// Row-major over `(t, N)`.
    pub cells: Vec<Cell>,
}

impl ScalingSeries {
    pub fn model(&self) -> Model {
        self.family.model
    }

    pub fn cell(&self, t_index: usize, n_index: usize) -> &Cell {
        &self.cells[t_index * self.n_values.len() + n_index]
    }

    /// Copy with every energy difference above the ground level multiplied by `factor`.
    pub fn with_scaled_gaps(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for cell in &mut out.cells {
            if let Ok(r) = &mut cell.outcome {
                r.gap01 *= factor;
                r.gap12 *= factor;
                r.level_gaps = r.level_gaps.map(|g| g * factor);
                let e0 = r.ground_energy;
                for e in &mut r.energies {
                    *e = e0 + factor * (*e - e0);
                }
            }
        }
        out
    }
}

/// Mean energies of consecutive runs closer than `tol`.
fn multiplets(energies: &[f64], tol: f64) -> Vec<f64> {
    let mut levels: Vec<(f64, usize)> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for &e in energies {
        match levels.last_mut() {
            Some((sum, count)) if e - last <= tol => {
                *sum += e;
                *count += 1;
            }
            _ => levels.push((e, 1)),
        }
        last = e;
    }
    levels.into_iter().map(|(sum, count)| sum / count as f64).collect()
}

fn diameter(points: &[[f64; 3]]) -> f64 {
    let mut best: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.max(norm3([p[0] - q[0], p[1] - q[1], p[2] - q[2]]));
        }
    }
    best
}

fn scan_cell(
    observables: &Observables,
    model: Model,
    lambda: [f64; 3],
    options: &ScanOptions,
) -> Result<CellRecord, SweepError> {
    let n = observables.n();
    let h = assemble_hamiltonian(&model.spec(lambda, n)?)?;
    let dim = h.dim();
    let sweep = &options.sweep;
    let mut m = options.min_levels.max(sweep.initial_levels).clamp(1, dim);
    let (sol, epsilon) = loop {
        let sol = lowest_eigenpairs_with(&h, m, sweep.tol_residual, &sweep.eigen)?;
        let e0 = sol.energies[0];
        let epsilon = sol.tol_deg.max(options.eps_scale / n as f64);
        let top = sol.energies[sol.energies.len() - 1];
        if m == dim || (multiplets(&sol.energies, sol.tol_deg).len() >= 3 && top - e0 > epsilon) {
            break (sol, epsilon);
        }
        m = (2 * m).min(dim);
    };
    let e0 = sol.energies[0];
    let levels = multiplets(&sol.energies, sol.tol_deg);
    let level_gap = |i: usize| levels.get(i + 1).map_or(f64::NAN, |e| e - levels[i]);
    let ground = resolve_face_with(observables, sol.ground_space(), sweep.secondary_count)?;
    let count = ground.len() as f64;
    let coords = [0, 1, 2].map(|i| ground.iter().map(|v| v[i]).sum::<f64>() / count);
    let window = sol.energies.iter().filter(|&&e| e - e0 <= epsilon).count();
    let face = if window == sol.degeneracy {
        ground
    } else {
        resolve_face_with(observables, &sol.vectors[..window], sweep.secondary_count)?
    };
    Ok(CellRecord {
        lambda,
        ground_energy: e0,
        gap01: sol.gap01,
        gap12: sol.gap12,
        level_gaps: [level_gap(0), level_gap(1)],
        degeneracy: sol.degeneracy,
        tol_deg: sol.tol_deg,
        epsilon,
        face_size: face.len(),
        face_diameter: diameter(&face),
        coords,
        energies: sol.energies,
    })
}

/// Solves every `(t, N)` cell in parallel. Cell failures are recorded, not propagated.
pub fn scan_family(
    family: &LambdaFamily,
    t_grid: &[f64],
    n_values: &[usize],
    options: &ScanOptions,
) -> Result<ScalingSeries, RulingError> {
    if t_grid.is_empty() {
        return Err(RulingError::EmptyParameterGrid);
    }
    if n_values.is_empty() || n_values[0] < 2 || n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(RulingError::InvalidParticleNumbers);
    }
    let model = family.model;
    let observables = n_values.iter().map(|&n| Observables::new(model, n)).collect::<Result<Vec<_>, _>>();
    let observables = observables.map_err(|e| match e {
        SweepError::Operator(op) => RulingError::Operator(op),
        _ => RulingError::InvalidParticleNumbers,
    })?;
    let jobs: Vec<(f64, usize)> = t_grid.iter().flat_map(|&t| (0..n_values.len()).map(move |j| (t, j))).collect();
    let cells = jobs
        .par_iter()
        .map(|&(t, j)| Cell {
            t,
            n: n_values[j],
            outcome: scan_cell(&observables[j], model, family.at(t), options).map_err(|e| e.to_string()),
        })
        .collect();
    Ok(ScalingSeries { family: family.clone(), t_values: t_grid.to_vec(), n_values: n_values.to_vec(), cells })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Gapless,
    SymmetryBreaking,
    Undetermined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Gapless => "gapless",
            Verdict::SymmetryBreaking => "symmetry_breaking",
            Verdict::Undetermined => "undetermined",
        })
    }
}

/// Thresholds of the classification. Gaps below the floor
/// `max(floor_abs, floor_rel * max(1, |E0|))` count as exact degeneracies.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassifyConfig {
    pub min_n_values: usize,
    pub min_span: f64,
    pub gap_exponent_range: (f64, f64),
    pub max_gap_residual: f64,
    pub max_exponent_mismatch: f64,
    pub min_gap12_slope: f64,
    /// Last log-ratio rate over first; a power law on a doubling ladder gives 0.5.
    pub min_rate_persistence: f64,
    pub floor_abs: f64,
    pub floor_rel: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            min_n_values: 4,
            min_span: 8.0,
            gap_exponent_range: (0.75, 1.25),
            max_gap_residual: 0.05,
            max_exponent_mismatch: 0.5,
            min_gap12_slope: -0.25,
            min_rate_persistence: 0.7,
            floor_abs: 1e-14,
            floor_rel: 1e-12,
        }
    }
}

/// `gap ~ amplitude * N^(-exponent)`; `residual` is SS_res / SS_tot of the log-log fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapFit {
    pub exponent: f64,
    pub amplitude: f64,
    pub residual: f64,
}

/// Linear fit of `ln(gap01 / gap12)` against N over the unsaturated points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioFit {
    pub slope: Option<f64>,
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RulingReport {
    pub verdict: Verdict,
    pub gap_fit: GapFit,
    pub splitting_ratio_fit: RatioFit,
    pub face_growth: Vec<(usize, f64)>,
    pub evidence_notes: String,
}

/// Least squares `y = a + b x`; returns `(a, b, SS_res / SS_tot)`.
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();
    let residual = if ss_tot > 1e-300 { ss_res / ss_tot } else { 0.0 };
    (a, b, residual)
}

fn power_fit(ns: &[f64], gaps: &[f64], floor: f64) -> GapFit {
    let xs: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let ys: Vec<f64> = gaps.iter().map(|g| if g.is_nan() { floor.ln() } else { g.max(floor).ln() }).collect();
    let (a, b, residual) = linear_fit(&xs, &ys);
    GapFit { exponent: -b, amplitude: a.exp(), residual }
}

struct Evidence {
    verdict: Verdict,
    gap_fit: GapFit,
    ratio_fit: RatioFit,
    notes: Vec<String>,
}

fn judge(records: &[(usize, &CellRecord)], config: &ClassifyConfig) -> Evidence {
    let ns: Vec<f64> = records.iter().map(|(n, _)| *n as f64).collect();
    let floors: Vec<f64> =
        records.iter().map(|(_, r)| config.floor_abs.max(config.floor_rel * r.ground_energy.abs().max(1.0))).collect();
    let min_floor = floors.iter().copied().fold(f64::INFINITY, f64::min);
    let mut notes = Vec::new();

    let d1: Vec<f64> = records.iter().map(|(_, r)| r.level_gaps[0]).collect();
    let d2: Vec<f64> = records.iter().map(|(_, r)| r.level_gaps[1]).collect();
    let gap_fit = power_fit(&ns, &d1, min_floor);
    let second = power_fit(&ns, &d2, min_floor);
    let (lo, hi) = config.gap_exponent_range;
    let levels_present = d1.iter().chain(&d2).all(|g| g.is_finite() && *g > 0.0);
    let gapless = levels_present
        && (lo..=hi).contains(&gap_fit.exponent)
        && gap_fit.residual < config.max_gap_residual
        && (second.exponent - gap_fit.exponent).abs() <= config.max_exponent_mismatch;
    notes.push(format!(
        "first level gap ~ N^-{:.4} (residual {:.3e}), second ~ N^-{:.4} (residual {:.3e}); gapless test {}",
        gap_fit.exponent,
        gap_fit.residual,
        second.exponent,
        second.residual,
        if gapless { "passed" } else { "failed" }
    ));

    let saturated: Vec<bool> =
        records.iter().zip(&floors).map(|((_, r), f)| r.gap01.is_nan() || r.gap01 <= *f).collect();
    let unsat = saturated.iter().take_while(|s| !**s).count();
    let monotone_saturation = saturated[unsat..].iter().all(|s| *s);
    let gap12_ok = records.iter().zip(&floors).all(|((_, r), f)| r.gap12 > *f);
    let g12: Vec<f64> = records.iter().map(|(_, r)| r.gap12).collect();
    let gap12_slope = -power_fit(&ns, &g12, min_floor).exponent;
    let log_ratio: Vec<f64> =
        records.iter().zip(&floors).map(|((_, r), f)| (r.gap01.max(*f) / r.gap12.max(*f)).ln()).collect();
    let rates: Vec<f64> = (1..unsat).map(|i| (log_ratio[i] - log_ratio[i - 1]) / (ns[i] - ns[i - 1])).collect();
    let decreasing = rates.iter().all(|r| *r < 0.0);
    let splitting = match unsat {
        0 | 1 => saturated.len() - unsat >= 3,
        2 => decreasing && saturated.len() > 2,
        _ => decreasing && rates[rates.len() - 1].abs() >= config.min_rate_persistence * rates[0].abs(),
    };
    let symmetry_breaking = monotone_saturation && gap12_ok && gap12_slope >= config.min_gap12_slope && splitting;
    let ratio_fit = if unsat >= 2 {
        let (_, b, residual) = linear_fit(&ns[..unsat], &log_ratio[..unsat]);
        RatioFit { slope: Some(b), residual: Some(residual) }
    } else {
        RatioFit { slope: None, residual: None }
    };
    notes.push(format!(
        "splitting above floor at {unsat} of {} sizes, log-ratio rates {:?}, gap12 slope {:.4}{}; symmetry-breaking test {}",
        saturated.len(),
        rates.iter().map(|r| format!("{r:.4e}")).collect::<Vec<_>>(),
        gap12_slope,
        if gap12_ok { "" } else { " (gap12 reaches the floor)" },
        if symmetry_breaking { "passed" } else { "failed" }
    ));
    if !monotone_saturation {
        notes.push("splitting re-emerges above the floor after vanishing".into());
    }

    let verdict = match (gapless, symmetry_breaking) {
        (true, false) => Verdict::Gapless,
        (false, true) => Verdict::SymmetryBreaking,
        (true, true) => {
            notes.push("both tests passed; evidence is contradictory".into());
            Verdict::Undetermined
        }
        (false, false) => Verdict::Undetermined,
    };
    Evidence { verdict, gap_fit, ratio_fit, notes }
}

/// Classifies the mechanism behind a family from its finite-size scaling.
/// With several parameter values the verdict is reported only when all agree.
pub fn classify(series: &ScalingSeries, config: &ClassifyConfig) -> Result<RulingReport, RulingError> {
    let ns = &series.n_values;
    let span = match (ns.first(), ns.last()) {
        (Some(&a), Some(&b)) if a > 0 => b as f64 / a as f64,
        _ => 0.0,
    };
    if ns.len() < config.min_n_values || span < config.min_span {
        return Err(RulingError::InsufficientSpan {
            needed: config.min_n_values,
            span: config.min_span,
            count: ns.len(),
            got: span,
        });
    }
    let mut notes = vec![format!(
        "thresholds: gap exponent in [{}, {}], fit residual < {}, exponent mismatch <= {}, gap12 slope >= {}, rate persistence >= {}, floor max({:e}, {:e}*max(1,|E0|))",
        config.gap_exponent_range.0,
        config.gap_exponent_range.1,
        config.max_gap_residual,
        config.max_exponent_mismatch,
        config.min_gap12_slope,
        config.min_rate_persistence,
        config.floor_abs,
        config.floor_rel
    )];
    let mut verdicts = Vec::new();
    let mut first: Option<Evidence> = None;
    for (ti, &t) in series.t_values.iter().enumerate() {
        let cells: Vec<&Cell> = (0..ns.len()).map(|j| series.cell(ti, j)).collect();
        let failures: Vec<String> =
            cells.iter().filter_map(|c| c.outcome.as_ref().err().map(|e| format!("N={}: {e}", c.n))).collect();
        let evidence = if failures.is_empty() {
            let records: Vec<(usize, &CellRecord)> =
                cells.iter().map(|c| (c.n, c.outcome.as_ref().expect("checked above"))).collect();
            judge(&records, config)
        } else {
            Evidence {
                verdict: Verdict::Undetermined,
                gap_fit: GapFit { exponent: f64::NAN, amplitude: f64::NAN, residual: f64::NAN },
                ratio_fit: RatioFit { slope: None, residual: None },
                notes: vec![format!("solver failures: {}", failures.join("; "))],
            }
        };
        notes.push(format!("t={t}: {} [{}]", evidence.verdict, evidence.notes.join("; ")));
        verdicts.push(evidence.verdict);
        first.get_or_insert(evidence);
    }
    let first = first.ok_or(RulingError::EmptyParameterGrid)?;
    let verdict = if verdicts.iter().all(|v| *v == verdicts[0]) {
        verdicts[0]
    } else {
        notes.push("verdicts differ across the parameter grid".into());
        Verdict::Undetermined
    };
    let face_growth = (0..ns.len())
        .map(|j| {
            let cell = series.cell(0, j);
            (cell.n, cell.outcome.as_ref().map_or(f64::NAN, |r| r.face_diameter))
        })
        .collect();
    Ok(RulingReport {
        verdict,
        gap_fit: first.gap_fit,
        splitting_ratio_fit: first.ratio_fit,
        face_growth,
        evidence_notes: notes.join("\n"),
    })
}
