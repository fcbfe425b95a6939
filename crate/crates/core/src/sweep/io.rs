use std::io::{self, Write};

use super::{BoundaryPoint, Jump, SweepError};
use crate::spinops::Model;

pub const BOUNDARY_COLUMNS: &str =
    "model,N,lambda0,lambda1,lambda2,energy_per_particle,x,y,z,gap01,gap12,degeneracy,face_vertex_count";

/// One row per direction. Failed directions keep their row with NaN values
/// and zero counts so row `i` always belongs to direction `i`.
pub fn write_boundary_csv<W: Write>(
    out: &mut W,
    model: Model,
    n: usize,
    lambdas: &[[f64; 3]],
    points: &[Result<BoundaryPoint, SweepError>],
) -> io::Result<()> {
    writeln!(out, "{BOUNDARY_COLUMNS}")?;
    for (lambda, point) in lambdas.iter().zip(points) {
        let [l0, l1, l2] = *lambda;
        match point {
            Ok(p) => {
                let [x, y, z] = p.coords;
                writeln!(
                    out,
                    "{model},{n},{l0},{l1},{l2},{},{x},{y},{z},{},{},{},{}",
                    p.energy_per_particle,
                    p.gap01,
                    p.gap12,
                    p.degeneracy,
                    p.face_vertices.len()
                )?;
            }
            Err(_) => {
                let nan = f64::NAN;
                writeln!(out, "{model},{n},{l0},{l1},{l2},{nan},{nan},{nan},{nan},{nan},{nan},0,0")?;
            }
        }
    }
    Ok(())
}

pub fn write_faces_csv<W: Write>(out: &mut W, points: &[Result<BoundaryPoint, SweepError>]) -> io::Result<()> {
    writeln!(out, "direction_index,vx,vy,vz")?;
    for (i, point) in points.iter().enumerate() {
        if let Ok(p) = point {
            for [vx, vy, vz] in &p.face_vertices {
                writeln!(out, "{i},{vx},{vy},{vz}")?;
            }
        }
    }
    Ok(())
}

pub fn write_jumps_csv<W: Write>(out: &mut W, jumps: &[Jump]) -> io::Result<()> {
    writeln!(out, "from_index,to_index,distance")?;
    for j in jumps {
        writeln!(out, "{},{},{}", j.from, j.to, j.distance)?;
    }
    Ok(())
}
