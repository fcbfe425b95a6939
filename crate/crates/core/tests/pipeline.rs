use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use rdmgeo::meanfield::{limit_body, limit_outline};
use rdmgeo::oracle::brute_force_ground;
use rdmgeo::ruling::{
    classify, convergence_metric, detect_flat_faces, read_series_csv, scan_family, write_series_csv, ClassifyConfig,
    ClusterKind, LambdaFamily, ScanOptions, Verdict,
};
use rdmgeo::spinops::Model;
use rdmgeo::sweep::{boundary_point, project_2d, trace_boundary, DirectionGrid, Plane, SweepOptions};

fn hull_distance(model: Model, plane: Plane, n: usize) -> f64 {
    let grid = DirectionGrid::great_circle(plane, 96).unwrap();
    let points: Vec<_> =
        trace_boundary(model, n, &grid, &SweepOptions::default()).unwrap().into_iter().map(Result::unwrap).collect();
    let projection = project_2d(&points, plane).unwrap();
    convergence_metric(&projection.hull, &limit_outline(model, plane, 2000)).unwrap()
}

#[test]
fn projected_hulls_shrink_toward_the_limit() {
    let distances: Vec<f64> = [8, 32, 128].iter().map(|&n| hull_distance(Model::Xy, Plane::Xy, n)).collect();
    assert!(distances.windows(2).all(|w| w[1] < w[0]), "{distances:?}");
}

#[test]
fn saved_series_classifies_like_the_live_one() {
    let family = LambdaFamily::parse(Model::Ising, "J=-1,Bz=t,Bx=0").unwrap();
    let series = scan_family(&family, &[0.5, 1.0], &[10, 20, 40, 80], &ScanOptions::default()).unwrap();
    let live = classify(&series, &ClassifyConfig::default()).unwrap();
    let mut buf = Vec::new();
    write_series_csv(&mut buf, &series).unwrap();
    let restored = read_series_csv(buf.as_slice(), family).unwrap();
    let saved = classify(&restored, &ClassifyConfig::default()).unwrap();
    assert_eq!(live.verdict, Verdict::SymmetryBreaking);
    assert_eq!(saved, live);
}

#[test]
fn limit_bodies_have_the_expected_ruled_sheets() {
    let ising = detect_flat_faces(&limit_body(Model::Ising, 6000).unwrap(), 0.02).unwrap();
    assert_eq!(ising.iter().filter(|c| c.kind == ClusterKind::Ruled).count(), 2);
    let xy = detect_flat_faces(&limit_body(Model::Xy, 6000).unwrap(), 0.02).unwrap();
    assert_eq!(xy.iter().filter(|c| c.kind == ClusterKind::Planar).count(), 2);
    assert_eq!(xy.iter().filter(|c| c.kind == ClusterKind::Ruled).count(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn boundary_points_agree_with_the_oracle(
        n in 2usize..=9,
        theta in 0.05f64..PI - 0.05,
        phi in 0.0f64..TAU,
        xy in any::<bool>(),
    ) {
        let model = if xy { Model::Xy } else { Model::Ising };
        let lambda = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        let point = boundary_point(model, n, lambda, &SweepOptions::default()).unwrap();
        let oracle = brute_force_ground(model, lambda, n).unwrap();
        prop_assert!((point.energy_per_particle * n as f64 - oracle.energy).abs() < 1e-9);
        if point.degeneracy == 1 && point.gap01 > 1e-6 {
            for (a, b) in point.coords.iter().zip(oracle.coords) {
                prop_assert!((a - b).abs() < 1e-8);
            }
        }
    }
}
