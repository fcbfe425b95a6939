use super::RulingError;

/// Sampling step along each polyline, relative to the joint bounding-box
/// diagonal. The distance function is 1-Lipschitz, so the error is at most
/// half a step.
const SAMPLE_STEP: f64 = 1e-4;

fn segments(points: &[[f64; 2]], closed: bool) -> Vec<([f64; 2], [f64; 2])> {
    let mut segs: Vec<_> = points.windows(2).map(|w| (w[0], w[1])).collect();
    if closed && points.len() > 2 {
        segs.push((points[points.len() - 1], points[0]));
    }
    segs
}

fn point_segment_distance(p: [f64; 2], (a, b): ([f64; 2], [f64; 2])) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 { ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (ap[0] - t * ab[0]).hypot(ap[1] - t * ab[1])
}

fn directed(from: &[([f64; 2], [f64; 2])], to: &[([f64; 2], [f64; 2])], step: f64) -> f64 {
    let dist = |p: [f64; 2]| to.iter().map(|&s| point_segment_distance(p, s)).fold(f64::INFINITY, f64::min);
    let mut worst: f64 = 0.0;
    for &(a, b) in from {
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let pieces = ((len / step).ceil() as usize).max(1);
        for k in 0..=pieces {
            let t = k as f64 / pieces as f64;
            worst = worst.max(dist([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]));
        }
    }
    worst
}

fn distinct_count(points: &[[f64; 2]]) -> usize {
    let mut seen: Vec<[f64; 2]> = Vec::new();
    for p in points {
        if !seen.contains(p) {
            seen.push(*p);
        }
    }
    seen.len()
}

/// Symmetric Hausdorff distance between two polylines.
pub fn hausdorff_distance(a: &[[f64; 2]], b: &[[f64; 2]], closed: bool) -> Result<f64, RulingError> {
    for poly in [a, b] {
        let count = distinct_count(poly);
        if count < 2 || poly.iter().flatten().any(|x| !x.is_finite()) {
            return Err(RulingError::DegeneratePolyline(count));
        }
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in a.iter().chain(b) {
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let step = SAMPLE_STEP * (hi[0] - lo[0]).hypot(hi[1] - lo[1]);
    let (sa, sb) = (segments(a, closed), segments(b, closed));
    Ok(directed(&sa, &sb, step).max(directed(&sb, &sa, step)))
}

/// Hausdorff distance between a finite-N projected hull and a limit outline,
/// both taken as closed polylines.
pub fn convergence_metric(finite: &[[f64; 2]], limit: &[[f64; 2]]) -> Result<f64, RulingError> {
    hausdorff_distance(finite, limit, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const SQUARE: [[f64; 2]; 4] = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];

    #[test]
    fn identical_polylines() {
        assert_eq!(convergence_metric(&SQUARE, &SQUARE).unwrap(), 0.0);
    }

    #[test]
    fn shifted_square() {
        let shifted = SQUARE.map(|[x, y]| [x + 0.1, y]);
        assert_abs_diff_eq!(convergence_metric(&SQUARE, &shifted).unwrap(), 0.1, epsilon = 1e-12);
    }

    #[test]
    fn interior_maximum_is_found() {
        // The farthest point of the bent line from the chord is mid-edge on neither vertex set.
        let chord = [[0.0, 0.0], [2.0, 0.0]];
        let tent = [[0.0, 0.0], [1.0, 1.0], [2.0, 0.0]];
        assert_abs_diff_eq!(hausdorff_distance(&chord, &tent, false).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(convergence_metric(&[], &SQUARE), Err(RulingError::DegeneratePolyline(0))));
        assert!(matches!(
            convergence_metric(&SQUARE, &[[1.0, 1.0], [1.0, 1.0]]),
            Err(RulingError::DegeneratePolyline(1))
        ));
        assert!(convergence_metric(&SQUARE, &[[f64::NAN, 0.0], [1.0, 0.0]]).is_err());
    }

    proptest! {
        #[test]
        fn translated_square_distance_is_shift_length(dx in -1.0f64..1.0, dy in -1.0f64..1.0) {
            // the leading corner of the moved square is outside at distance |(dx, dy)|
            let moved = SQUARE.map(|[x, y]| [x + dx, y + dy]);
            let d1 = convergence_metric(&SQUARE, &moved).unwrap();
            let d2 = convergence_metric(&moved, &SQUARE).unwrap();
            prop_assert!((d1 - d2).abs() < 1e-12);
            prop_assert!((d1 - dx.hypot(dy)).abs() < 1e-12);
        }
    }
}
