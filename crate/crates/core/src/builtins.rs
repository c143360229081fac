//! Canonical fundamental domains used by the CLI and the test suite.

use nalgebra::Vector2;

use crate::error::{Error, Result};
use crate::toric_graph::{CouplingSpec, EdgeData, GraphData, ToricGraph, VertexData};

pub const BUILTIN_NAMES: [&str; 5] = ["square", "hex", "tri", "rect21", "rect-iso"];

/// Looks up a canonical domain by name. `rect-iso` defaults to the
/// half-rhombus angle `pi/3`.
pub fn builtin(name: &str) -> Result<ToricGraph> {
    match name {
        "square" => Ok(square()),
        "hex" => Ok(hex()),
        "tri" => Ok(tri()),
        "rect21" => Ok(rect21()),
        "rect-iso" => Ok(rect_iso(std::f64::consts::FRAC_PI_3)),
        other => Err(Error::UnknownExample(other.to_string())),
    }
}

fn v(name: &str, x: f64, y: f64) -> VertexData {
    VertexData {
        name: name.to_string(),
        position: Vector2::new(x, y),
    }
}

fn e(name: &str, u: usize, vv: usize, d: (i32, i32), j: f64) -> EdgeData {
    EdgeData {
        name: name.to_string(),
        u,
        v: vv,
        displacement: d,
        weight: CouplingSpec::J(j),
    }
}

/// Square lattice: one vertex, two loops wrapping each torus direction.
pub fn square() -> ToricGraph {
    GraphData {
        basis: [Vector2::new(1.0, 0.0), Vector2::new(0.0, 1.0)],
        vertices: vec![v("v", 0.0, 0.0)],
        edges: vec![e("h", 0, 0, (1, 0), 1.0), e("w", 0, 0, (0, 1), 1.0)],
    }
    .build()
    .expect("square domain is valid")
}

/// Hexagonal (honeycomb) lattice: two vertices, three unit edges. The unit
/// edge length makes the single hexagonal face unit-circumradius, so the
/// embedding is isoradial with constant angle pi/3.
pub fn hex() -> ToricGraph {
    let s3 = 3.0_f64.sqrt();
    GraphData {
        basis: [Vector2::new(1.5, s3 / 2.0), Vector2::new(1.5, -s3 / 2.0)],
        vertices: vec![v("u", 0.0, 0.0), v("w", 1.0, 0.0)],
        edges: vec![
            e("a", 0, 1, (0, 0), 1.0),
            e("b", 1, 0, (1, 0), 1.0),
            e("c", 1, 0, (0, 1), 1.0),
        ],
    }
    .build()
    .expect("hexagonal domain is valid")
}

/// Triangular lattice: one vertex, three loops on a rhombic lattice.
pub fn tri() -> ToricGraph {
    let s3 = 3.0_f64.sqrt();
    GraphData {
        basis: [Vector2::new(1.0, 0.0), Vector2::new(0.5, s3 / 2.0)],
        vertices: vec![v("v", 0.0, 0.0)],
        edges: vec![
            e("a", 0, 0, (1, 0), 1.0),
            e("b", 0, 0, (0, 1), 1.0),
            e("c", 0, 0, (1, 1), 1.0),
        ],
    }
    .build()
    .expect("triangular domain is valid")
}

/// The 2x1 square domain with four independent couplings: two horizontal
/// edges between the vertices (one wrapping) and one vertical loop at each.
pub fn rect21() -> ToricGraph {
    rect21_with([1.0; 4])
}

/// `rect21` with explicit couplings `[J1, J2, J3, J4]` for the interior
/// horizontal edge, the wrapping horizontal edge, and the two vertical loops.
pub fn rect21_with(j: [f64; 4]) -> ToricGraph {
    GraphData {
        basis: [Vector2::new(2.0, 0.0), Vector2::new(0.0, 1.0)],
        vertices: vec![v("u", 0.0, 0.0), v("w", 1.0, 0.0)],
        edges: vec![
            e("h1", 0, 1, (0, 0), j[0]),
            e("h2", 1, 0, (1, 0), j[1]),
            e("v1", 0, 0, (0, 1), j[2]),
            e("v2", 1, 1, (0, 1), j[3]),
        ],
    }
    .build()
    .expect("2x1 square domain is valid")
}

/// Rectangular lattice embedded isoradially: faces are `2cos(theta) x
/// 2sin(theta)` rectangles inscribed in unit circles, and the couplings are
/// the isoradial ones, so the critical inverse temperature is 1.
pub fn rect_iso(theta: f64) -> ToricGraph {
    assert!(
        theta > 0.0 && theta < std::f64::consts::FRAC_PI_2,
        "half-rhombus angle must lie in (0, pi/2)"
    );
    let iso = |t: f64| 0.5 * ((1.0 + t.sin()) / t.cos()).ln();
    GraphData {
        basis: [
            Vector2::new(2.0 * theta.cos(), 0.0),
            Vector2::new(0.0, 2.0 * theta.sin()),
        ],
        vertices: vec![v("v", 0.0, 0.0)],
        edges: vec![
            e("h", 0, 0, (1, 0), iso(theta)),
            e("w", 0, 0, (0, 1), iso(std::f64::consts::FRAC_PI_2 - theta)),
        ],
    }
    .build()
    .expect("isoradial rectangular domain is valid")
}
