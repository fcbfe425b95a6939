use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SweepError;

/// Coordinate plane, named by the two coordinates it keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Plane {
    Xy,
    Xz,
    Yz,
}

impl Plane {
    pub const ALL: [Plane; 3] = [Plane::Xy, Plane::Xz, Plane::Yz];

    /// Indices of the kept coordinates.
    pub fn axes(self) -> [usize; 2] {
        match self {
            Plane::Xy => [0, 1],
            Plane::Xz => [0, 2],
            Plane::Yz => [1, 2],
        }
    }

    /// Index of the dropped coordinate.
    pub fn normal_axis(self) -> usize {
        3 - self.axes()[0] - self.axes()[1]
    }

    pub fn project(self, p: [f64; 3]) -> [f64; 2] {
        let [a, b] = self.axes();
        [p[a], p[b]]
    }
}

impl fmt::Display for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Plane::Xy => "xy",
            Plane::Xz => "xz",
            Plane::Yz => "yz",
        })
    }
}

impl FromStr for Plane {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "xy" => Ok(Plane::Xy),
            "xz" => Ok(Plane::Xz),
            "yz" => Ok(Plane::Yz),
            other => Err(SweepError::InvalidGrid(format!("unknown plane '{other}' (valid: xy, xz, yz)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Scheme {
    Fibonacci,
    LatLong,
    /// Unit circle inside `plane` of coupling space (the third coupling is zero).
    GreatCircle {
        plane: Plane,
    },
    /// Directions supplied by the caller.
    Explicit,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Fibonacci => f.write_str("fibonacci"),
            Scheme::LatLong => f.write_str("latlong"),
            Scheme::GreatCircle { plane } => write!(f, "greatcircle:{plane}"),
            Scheme::Explicit => f.write_str("explicit"),
        }
    }
}

/// Unit coupling directions to sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirectionGrid {
    directions: Vec<[f64; 3]>,
    scheme: Scheme,
}

impl DirectionGrid {
    /// Golden-angle spiral; no two directions coincide and no polar clustering.
    pub fn fibonacci(count: usize) -> Result<Self, SweepError> {
        check_count(count)?;
        let golden = PI * (3.0 - 5f64.sqrt());
        let directions = (0..count)
            .map(|i| {
                let z = 1.0 - (2 * i + 1) as f64 / count as f64;
                let r = (1.0 - z * z).max(0.0).sqrt();
                let phi = golden * i as f64;
                [r * phi.cos(), r * phi.sin(), z]
            })
            .collect();
        Ok(Self { directions, scheme: Scheme::Fibonacci }.normalized())
    }

    /// Cell-centred latitude/longitude grid with about `count` directions.
    pub fn latlong(count: usize) -> Result<Self, SweepError> {
        check_count(count)?;
        let rows = ((count as f64 / 2.0).sqrt().round() as usize).max(1);
        let cols = count.div_ceil(rows);
        let mut directions = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let theta = PI * (r as f64 + 0.5) / rows as f64;
            for c in 0..cols {
                let phi = 2.0 * PI * c as f64 / cols as f64;
                directions.push([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]);
            }
        }
        Ok(Self { directions, scheme: Scheme::LatLong }.normalized())
    }

    /// `count` equally spaced directions on the great circle of `plane`,
    /// starting on its first axis and running counterclockwise.
    pub fn great_circle(plane: Plane, count: usize) -> Result<Self, SweepError> {
        check_count(count)?;
        let [a, b] = plane.axes();
        let directions = (0..count)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / count as f64;
                let mut d = [0.0; 3];
                d[a] = t.cos();
                d[b] = t.sin();
                d
            })
            .collect();
        Ok(Self { directions, scheme: Scheme::GreatCircle { plane } }.normalized())
    }

    /// Caller-supplied directions, normalized; zero or non-finite vectors and
    /// duplicates are rejected.
    pub fn from_directions(directions: Vec<[f64; 3]>) -> Result<Self, SweepError> {
        check_count(directions.len())?;
        for d in &directions {
            let norm = norm3(*d);
            if !norm.is_finite() || norm == 0.0 {
                return Err(SweepError::InvalidGrid(format!("direction {d:?} cannot be normalized")));
            }
        }
        let grid = Self { directions, scheme: Scheme::Explicit }.normalized();
        for (i, a) in grid.directions.iter().enumerate() {
            if grid.directions[..i].iter().any(|b| a == b) {
                return Err(SweepError::InvalidGrid(format!("duplicate direction {a:?}")));
            }
        }
        Ok(grid)
    }

    /// Keeps directions whose `component` has the sign of `sign` (zero included).
    pub fn restrict_hemisphere(mut self, component: usize, sign: f64) -> Result<Self, SweepError> {
        if component > 2 {
            return Err(SweepError::InvalidGrid(format!("component {component} out of range")));
        }
        self.directions.retain(|d| d[component] * sign >= 0.0);
        check_count(self.directions.len())?;
        Ok(self)
    }

    fn normalized(mut self) -> Self {
        for d in &mut self.directions {
            let n = norm3(*d);
            d.iter_mut().for_each(|x| *x /= n);
        }
        self
    }

    pub fn directions(&self) -> &[[f64; 3]] {
        &self.directions
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn count(&self) -> usize {
        self.directions.len()
    }
}

fn check_count(count: usize) -> Result<(), SweepError> {
    if count == 0 {
        Err(SweepError::InvalidGrid("grid has no directions".into()))
    } else {
        Ok(())
    }
}

pub(crate) fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check_grid(grid: &DirectionGrid) {
        for (i, d) in grid.directions().iter().enumerate() {
            assert!((norm3(*d) - 1.0).abs() < 1e-12);
            for e in &grid.directions()[..i] {
                assert!(norm3([d[0] - e[0], d[1] - e[1], d[2] - e[2]]) > 1e-12, "duplicate {d:?}");
            }
        }
    }

    #[test]
    fn schemes_give_distinct_unit_vectors() {
        check_grid(&DirectionGrid::fibonacci(500).unwrap());
        check_grid(&DirectionGrid::latlong(300).unwrap());
        for plane in Plane::ALL {
            let g = DirectionGrid::great_circle(plane, 64).unwrap();
            check_grid(&g);
            assert!(g.directions().iter().all(|d| d[plane.normal_axis()] == 0.0));
        }
    }

    #[test]
    fn single_direction_grid() {
        let g = DirectionGrid::fibonacci(1).unwrap();
        assert_eq!(g.count(), 1);
        assert!(DirectionGrid::fibonacci(0).is_err());
    }

    #[test]
    fn hemisphere_restriction() {
        let g = DirectionGrid::latlong(200).unwrap().restrict_hemisphere(2, -1.0).unwrap();
        assert!(g.count() >= 90);
        assert!(g.directions().iter().all(|d| d[2] <= 0.0));
    }

    #[test]
    fn explicit_directions_validated() {
        assert!(DirectionGrid::from_directions(vec![[0.0; 3]]).is_err());
        assert!(DirectionGrid::from_directions(vec![[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]).is_err());
        let g = DirectionGrid::from_directions(vec![[3.0, 4.0, 0.0]]).unwrap();
        assert_eq!(g.directions()[0], [0.6, 0.8, 0.0]);
    }

    #[test]
    fn plane_parsing() {
        assert_eq!("XZ".parse::<Plane>().unwrap(), Plane::Xz);
        assert!("xw".parse::<Plane>().is_err());
        assert_eq!(Plane::Yz.project([1.0, 2.0, 3.0]), [2.0, 3.0]);
    }

    proptest! {
        #[test]
        fn fibonacci_any_count(count in 1usize..2000) {
            let g = DirectionGrid::fibonacci(count).unwrap();
            prop_assert_eq!(g.count(), count);
            prop_assert!(g.directions().iter().all(|d| (norm3(*d) - 1.0).abs() < 1e-12));
        }
    }
}
