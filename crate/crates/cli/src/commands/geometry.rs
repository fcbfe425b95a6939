use std::fmt::Write as _;
use std::path::PathBuf;

use rdmgeo::meanfield::{limit_body, limit_outline, mean_field_minimum, MeanFieldMinimum};
use rdmgeo::ruling::{convergence_metric, detect_flat_faces, ClusterKind, FaceCluster};
use rdmgeo::sweep::{
    coordinate_jumps, project_2d, trace_boundary, write_boundary_csv, write_faces_csv, write_jumps_csv, DirectionGrid,
    Scheme,
};
use serde::Serialize;

use super::{csv_with_header, print_stdout, write_file};
use crate::config::{header, json_envelope, RunConfig};
use crate::error::CliError;

fn points_csv(command: &str, config: &RunConfig, points: &[[f64; 2]]) -> String {
    let mut text = header(command, config);
    text.push_str("u,v\n");
    for [u, v] in points {
        writeln!(text, "{u},{v}").expect("writing to a String cannot fail");
    }
    text
}

#[derive(Serialize)]
struct SweepRun {
    #[serde(rename = "N")]
    n: usize,
    directions: usize,
    failed: usize,
    max_jump: f64,
    files: Vec<PathBuf>,
}

/// Boundary, face and jump CSVs per particle number under `DIR/N{n}/`.
pub fn sweep(config: &RunConfig) -> Result<(), CliError> {
    let model = config.model();
    let grid = config.direction_grid()?;
    let closed = matches!(grid.scheme(), Scheme::GreatCircle { .. });
    let options = config.sweep_options();
    let mut runs = Vec::new();
    for &n in &config.ns {
        let points = trace_boundary(model, n, &grid, &options)?;
        let jumps = coordinate_jumps(&points, closed);
        let dir = config.output_dir().join(format!("N{n}"));
        let files = [
            (
                "boundary.csv",
                csv_with_header("sweep", config, |b| write_boundary_csv(b, model, n, grid.directions(), &points)),
            ),
            ("faces.csv", csv_with_header("sweep", config, |b| write_faces_csv(b, &points))),
            ("jumps.csv", csv_with_header("sweep", config, |b| write_jumps_csv(b, &jumps))),
        ];
        let mut written = Vec::new();
        for (name, text) in files {
            let path = dir.join(name);
            write_file(&path, &text)?;
            written.push(path);
        }
        runs.push(SweepRun {
            n,
            directions: grid.count(),
            failed: points.iter().filter(|p| p.is_err()).count(),
            max_jump: jumps.iter().map(|j| j.distance).fold(0.0, f64::max),
            files: written,
        });
    }
    print_stdout(&json_envelope("sweep", config, &runs))?;
    let failed: usize = runs.iter().map(|r| r.failed).sum();
    if failed > 0 {
        return Err(CliError::Numerical(format!("{failed} directions failed; their rows hold NaN")));
    }
    Ok(())
}

#[derive(Serialize)]
struct ProjectionRun {
    #[serde(rename = "N")]
    n: usize,
    points: usize,
    hull_vertices: usize,
    hausdorff_to_limit: f64,
    files: Vec<PathBuf>,
}

/// Projection onto `plane` traced by couplings on the great circle of that
/// plane, with its hull and the large-N outline for comparison.
pub fn project(config: &RunConfig) -> Result<(), CliError> {
    let (model, plane) = (config.model(), config.plane);
    let grid = DirectionGrid::great_circle(plane, config.count)?;
    let options = config.sweep_options();
    let root = config.output_dir();
    let outline = limit_outline(model, plane, config.samples);
    let outline_path = root.join(format!("limit_{plane}.csv"));
    write_file(&outline_path, &points_csv("project", config, &outline))?;
    let mut runs = Vec::new();
    for &n in &config.ns {
        let points = trace_boundary(model, n, &grid, &options)?;
        if let Some(Err(e)) = points.iter().find(|p| p.is_err()) {
            return Err(CliError::Numerical(format!("N = {n}: {e}")));
        }
        let points: Vec<_> = points.into_iter().filter_map(Result::ok).collect();
        let projection = project_2d(&points, plane)?;
        let dir = root.join(format!("N{n}"));
        let files = [
            (dir.join(format!("projection_{plane}.csv")), points_csv("project", config, &projection.points)),
            (dir.join(format!("hull_{plane}.csv")), points_csv("project", config, &projection.hull)),
        ];
        for (path, text) in &files {
            write_file(path, text)?;
        }
        runs.push(ProjectionRun {
            n,
            points: projection.points.len(),
            hull_vertices: projection.hull.len(),
            hausdorff_to_limit: convergence_metric(&projection.hull, &outline)?,
            files: files.into_iter().map(|(p, _)| p).collect(),
        });
    }
    #[derive(Serialize)]
    struct Summary {
        limit_outline: PathBuf,
        runs: Vec<ProjectionRun>,
    }
    print_stdout(&json_envelope("project", config, &Summary { limit_outline: outline_path, runs }))
}

#[derive(Serialize)]
struct ClusterSummary {
    kind: ClusterKind,
    area_fraction: f64,
    normal: [f64; 3],
    ruling_direction: Option<[f64; 3]>,
}

impl From<&FaceCluster> for ClusterSummary {
    fn from(c: &FaceCluster) -> Self {
        Self { kind: c.kind, area_fraction: c.area_fraction, normal: c.normal, ruling_direction: c.ruling_direction }
    }
}

/// Large-N body as OBJ and JSON, plus its detected flat and ruled regions.
pub fn meanfield(config: &RunConfig) -> Result<(), CliError> {
    let model = config.model();
    let body = limit_body(model, config.samples)?;
    let clusters = detect_flat_faces(&body, config.angle_tol)?;
    let root = config.output_dir();
    let mut obj = header("meanfield", config).into_bytes();
    body.write_obj(&mut obj).expect("writing to memory cannot fail");
    let files = [
        (root.join(format!("{model}_limit.obj")), String::from_utf8(obj).expect("OBJ output is UTF-8")),
        (root.join(format!("{model}_limit.json")), json_envelope("meanfield", config, &body)),
        (root.join(format!("{model}_faces.json")), json_envelope("meanfield", config, &clusters)),
    ];
    for (path, text) in &files {
        write_file(path, text)?;
    }
    #[derive(Serialize)]
    struct Summary {
        vertices: usize,
        facets: usize,
        clusters: Vec<ClusterSummary>,
        minimum: Option<MeanFieldMinimum>,
        files: Vec<PathBuf>,
    }
    let summary = Summary {
        vertices: body.vertices.len(),
        facets: body.facets.len(),
        clusters: clusters.iter().map(ClusterSummary::from).collect(),
        minimum: config.lambda.map(|lambda| mean_field_minimum(model, lambda)),
        files: files.into_iter().map(|(p, _)| p).collect(),
    };
    print_stdout(&json_envelope("meanfield", config, &summary))
}
