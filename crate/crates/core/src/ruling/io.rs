use std::io::{self, BufRead, Write};

use super::scaling::{Cell, CellRecord, LambdaFamily, ScalingSeries};
use super::RulingError;

pub const SERIES_COLUMNS: &str = "t,N,lambda0,lambda1,lambda2,ground_energy,gap01,gap12,level_gap1,level_gap2,\
degeneracy,tol_deg,epsilon,face_size,face_diameter,x,y,z,energies,error";

const FIELDS: usize = 20;

/// One row per cell in row-major `(t, N)` order. `energies` is `;`-separated;
/// failed cells carry NaN values and their message in `error`.
pub fn write_series_csv<W: Write>(out: &mut W, series: &ScalingSeries) -> io::Result<()> {
    writeln!(out, "{SERIES_COLUMNS}")?;
    for cell in &series.cells {
        let (t, n) = (cell.t, cell.n);
        match &cell.outcome {
            Ok(r) => {
                let [l0, l1, l2] = r.lambda;
                let [x, y, z] = r.coords;
                let energies: Vec<String> = r.energies.iter().map(f64::to_string).collect();
                writeln!(
                    out,
                    "{t},{n},{l0},{l1},{l2},{},{},{},{},{},{},{},{},{},{},{x},{y},{z},{},",
                    r.ground_energy,
                    r.gap01,
                    r.gap12,
                    r.level_gaps[0],
                    r.level_gaps[1],
                    r.degeneracy,
                    r.tol_deg,
                    r.epsilon,
                    r.face_size,
                    r.face_diameter,
                    energies.join(";"),
                )?;
            }
            Err(message) => {
                let [l0, l1, l2] = series.family.at(t);
                let nan = f64::NAN;
                let message = message.replace([',', '\n', '\r'], " ");
                writeln!(
                    out,
                    "{t},{n},{l0},{l1},{l2},{nan},{nan},{nan},{nan},{nan},0,{nan},{nan},0,{nan},{nan},{nan},{nan},,{message}"
                )?;
            }
        }
    }
    Ok(())
}

/// Parses the output of [`write_series_csv`]. Lines starting with `#` are
/// skipped. Cells must form a complete row-major `(t, N)` grid.
pub fn read_series_csv<R: BufRead>(input: R, family: LambdaFamily) -> Result<ScalingSeries, RulingError> {
    let mut cells = Vec::new();
    let mut header_seen = false;
    for (index, line) in input.lines().enumerate() {
        let line_no = index + 1;
        let fail = |reason: String| RulingError::MalformedSeries { line: line_no, reason };
        let line = line.map_err(|e| fail(e.to_string()))?;
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            if line != SERIES_COLUMNS {
                return Err(fail("expected the series column header".into()));
            }
            header_seen = true;
            continue;
        }
        cells.push(parse_row(line).map_err(fail)?);
    }
    if !header_seen {
        return Err(RulingError::MalformedSeries { line: 0, reason: "missing column header".into() });
    }
    assemble(family, cells)
}

fn parse_row(line: &str) -> Result<Cell, String> {
    let fields: Vec<&str> = line.splitn(FIELDS, ',').collect();
    if fields.len() != FIELDS {
        return Err(format!("expected {FIELDS} fields, got {}", fields.len()));
    }
    let float = |i: usize| fields[i].parse::<f64>().map_err(|_| format!("field {i} '{}' is not a number", fields[i]));
    let count = |i: usize| fields[i].parse::<usize>().map_err(|_| format!("field {i} '{}' is not a count", fields[i]));
    let (t, n) = (float(0)?, count(1)?);
    let error = fields[19];
    if !error.is_empty() {
        return Ok(Cell { t, n, outcome: Err(error.to_string()) });
    }
    let energies = fields[18]
        .split(';')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| format!("energy '{s}' is not a number")))
        .collect::<Result<Vec<_>, _>>()?;
    let record = CellRecord {
        lambda: [float(2)?, float(3)?, float(4)?],
        ground_energy: float(5)?,
        gap01: float(6)?,
        gap12: float(7)?,
        level_gaps: [float(8)?, float(9)?],
        degeneracy: count(10)?,
        tol_deg: float(11)?,
        epsilon: float(12)?,
        face_size: count(13)?,
        face_diameter: float(14)?,
        coords: [float(15)?, float(16)?, float(17)?],
        energies,
    };
    Ok(Cell { t, n, outcome: Ok(record) })
}

fn assemble(family: LambdaFamily, cells: Vec<Cell>) -> Result<ScalingSeries, RulingError> {
    let grid_error = |reason: &str| RulingError::MalformedSeries { line: 0, reason: reason.to_string() };
    let first = cells.first().ok_or_else(|| grid_error("no cells"))?;
    let n_values: Vec<usize> = cells.iter().take_while(|c| c.t.to_bits() == first.t.to_bits()).map(|c| c.n).collect();
    if !cells.len().is_multiple_of(n_values.len()) {
        return Err(grid_error("cell count is not a multiple of the particle-number count"));
    }
    let t_values: Vec<f64> = cells.iter().step_by(n_values.len()).map(|c| c.t).collect();
    let regular = cells
        .iter()
        .enumerate()
        .all(|(i, c)| c.t.to_bits() == t_values[i / n_values.len()].to_bits() && c.n == n_values[i % n_values.len()]);
    if !regular {
        return Err(grid_error("cells do not form a row-major (t, N) grid"));
    }
    Ok(ScalingSeries { family, t_values, n_values, cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ruling::{scan_family, ScanOptions};
    use crate::spinops::Model;

    fn sample() -> ScalingSeries {
        let family = LambdaFamily::parse(Model::Ising, "J=-1,Bz=t,Bx=0").unwrap();
        let mut series = scan_family(&family, &[0.5, 1.0], &[4, 8, 12], &ScanOptions::default()).unwrap();
        series.cells[1].outcome = Err("did not converge, twice".into());
        series
    }

    fn render(series: &ScalingSeries) -> String {
        let mut buf = Vec::new();
        write_series_csv(&mut buf, series).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let series = sample();
        let text = render(&series);
        let back = read_series_csv(text.as_bytes(), series.family.clone()).unwrap();
        assert_eq!(back.t_values, series.t_values);
        assert_eq!(back.n_values, series.n_values);
        for (a, b) in back.cells.iter().zip(&series.cells) {
            match (&a.outcome, &b.outcome) {
                (Ok(x), Ok(y)) => assert_eq!(x, y),
                (Err(x), Err(_)) => assert_eq!(x, "did not converge  twice"),
                _ => panic!("outcome kind changed"),
            }
        }
        assert_eq!(render(&back), text);
    }

    #[test]
    fn comment_lines_are_skipped() {
        let series = sample();
        let text = format!("# generated\n# t = 1\n{}", render(&series));
        assert!(read_series_csv(text.as_bytes(), series.family.clone()).is_ok());
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        let series = sample();
        let family = series.family.clone();
        let text = render(&series);
        assert!(read_series_csv("".as_bytes(), family.clone()).is_err());
        assert!(read_series_csv("t,N\n".as_bytes(), family.clone()).is_err());
        let truncated: String = text.lines().take(6).map(|l| format!("{l}\n")).collect();
        assert!(matches!(
            read_series_csv(truncated.as_bytes(), family.clone()),
            Err(RulingError::MalformedSeries { .. })
        ));
        let garbled = text.replacen("\n0.5,4,", "\nabc,4,", 1);
        assert!(matches!(
            read_series_csv(garbled.as_bytes(), family),
            Err(RulingError::MalformedSeries { line: 2, .. })
        ));
    }
}
