//! Named planar scenes used throughout the examples and tests. All use the
//! maximum norm with the origin as reference point unless stated otherwise.

use crate::geometry::NormSpec;
use crate::sets::{CuspSign, Scene, SetOracle};

fn planar(sets: Vec<SetOracle>) -> Scene {
    Scene::new(NormSpec::Max, vec![0.0, 0.0], sets).expect("built-in scene is valid")
}

/// `{γ^{1/q}ξ2 + |ξ1|^{1/q} ≥ 0}` and `{γ^{1/q}ξ2 − |ξ1|^{1/q} ≤ 0}`.
pub fn cusps(q: f64, gamma: f64) -> Scene {
    planar(vec![
        SetOracle::PowerCusp {
            gamma,
            q,
            sign: CuspSign::Plus,
        },
        SetOracle::PowerCusp {
            gamma,
            q,
            sign: CuspSign::Minus,
        },
    ])
    .with_boundary(true)
}

/// Upper half-plane and the region below the parabola `ξ2 = ξ1²`.
pub fn half_plane_under_parabola() -> Scene {
    planar(vec![
        SetOracle::half_space(vec![0.0, 1.0], 0.0),
        SetOracle::hypograph(vec![0.0, 0.0, 1.0]),
    ])
    .with_boundary(true)
}

/// The curves `ξ2 = ξ1²` and `ξ2 = −ξ1²`, meeting only at the origin.
pub fn opposite_parabolas() -> Scene {
    planar(vec![
        SetOracle::curve(vec![0.0, 0.0, 1.0]),
        SetOracle::curve(vec![0.0, 0.0, -1.0]),
    ])
    .with_intersection(SetOracle::point(vec![0.0, 0.0]))
    .expect("origin is common")
    .with_boundary(true)
}

/// Regions above `ξ1²` and below `−ξ1²`, tangent at the origin.
pub fn tangent_parabolas() -> Scene {
    planar(vec![
        SetOracle::epigraph(vec![0.0, 0.0, 1.0]),
        SetOracle::hypograph(vec![0.0, 0.0, -1.0]),
    ])
    .with_intersection(SetOracle::point(vec![0.0, 0.0]))
    .expect("origin is common")
    .with_boundary(true)
}

/// The two coordinate axes.
pub fn axes() -> Scene {
    planar(vec![
        SetOracle::line(vec![0.0, 0.0], vec![1.0, 0.0]),
        SetOracle::line(vec![0.0, 0.0], vec![0.0, 1.0]),
    ])
    .with_intersection(SetOracle::point(vec![0.0, 0.0]))
    .expect("origin is common")
    .with_boundary(true)
}

/// The horizontal axis and the diagonal `ξ2 = ξ1`.
pub fn crossing_lines() -> Scene {
    planar(vec![
        SetOracle::line(vec![0.0, 0.0], vec![1.0, 0.0]),
        SetOracle::line(vec![0.0, 0.0], vec![1.0, 1.0]),
    ])
    .with_intersection(SetOracle::point(vec![0.0, 0.0]))
    .expect("origin is common")
    .with_boundary(true)
}

/// Two copies of the singleton `{0}`.
pub fn singletons() -> Scene {
    planar(vec![
        SetOracle::point(vec![0.0, 0.0]),
        SetOracle::point(vec![0.0, 0.0]),
    ])
    .with_boundary(true)
}

/// Two copies of the upper half-plane.
pub fn identical_half_planes() -> Scene {
    planar(vec![
        SetOracle::half_space(vec![0.0, 1.0], 0.0),
        SetOracle::half_space(vec![0.0, 1.0], 0.0),
    ])
    .with_boundary(true)
}

/// Two unit balls centred at `(±0.25, 0)`; the origin is interior to both.
pub fn overlapping_balls() -> Scene {
    planar(vec![
        SetOracle::Ball {
            center: vec![0.25, 0.0],
            radius: 1.0,
        },
        SetOracle::Ball {
            center: vec![-0.25, 0.0],
            radius: 1.0,
        },
    ])
    .with_boundary(false)
}

/// The graph of `ξ2 = ξ1³` and the horizontal axis.
pub fn cubic_and_axis() -> Scene {
    planar(vec![
        SetOracle::curve(vec![0.0, 0.0, 0.0, 1.0]),
        SetOracle::line(vec![0.0, 0.0], vec![1.0, 0.0]),
    ])
    .with_intersection(SetOracle::point(vec![0.0, 0.0]))
    .expect("origin is common")
    .with_boundary(true)
}
