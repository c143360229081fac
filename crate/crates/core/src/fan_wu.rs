//! The bipartite rectangle graph `C_G`, Kasteleyn orientations, and the
//! Kramers-Wannier duality identities.
//!
//! Each edge `e` of `G` with weight `x_e = tan(theta_e / 2)` is replaced by a
//! rectangle whose sides parallel to `e` weigh `sin(theta_e)` and whose
//! transverse sides weigh `cos(theta_e)`; the two vertices in each corner of
//! each face of `G` are joined by a weight-1 edge. Both vertex classes are a
//! copy of the oriented edges of `G`: the white vertex of `e` sits to its
//! left, the black vertex to its right. With that identification the three
//! neighbors of white `e` are black `e` (transverse), black `e-bar`
//! (parallel), and black `R(e)` (corner).
//!
//! A Kasteleyn orientation is a sign per edge whose product around every face
//! of length `2L` is `(-1)^{L+1}`. One is found by a GF(2) solve over the
//! face equations and then normalized so that the scaled determinant
//! reproduces the Kac-Ward determinant itself, not a half-period twist of it:
//! the solve fixes the orientation only up to a sign cocycle, and the
//! homology class of that cocycle is detected by comparing against the
//! even-subgraph oracle at reference weights.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::homology;
use crate::kac_ward;
use crate::toric_graph::{OrientedEdge, ToricGraph};
use crate::weights::WeightSystem;

/// Role of an edge of `C_G` in the rectangle construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CEdgeKind {
    /// Rectangle side parallel to the original edge; weight `sin(theta_e)`.
    Parallel,
    /// Rectangle side perpendicular to the original edge; weight `cos(theta_e)`.
    Transverse,
    /// Corner edge inside a face of `G`; weight 1.
    Corner,
}

/// An edge of `C_G`, oriented white -> black.
#[derive(Clone, Copy, Debug)]
pub struct CEdge {
    pub white: usize,
    pub black: usize,
    pub kind: CEdgeKind,
    pub weight: f64,
    /// The oriented edge of `G` this edge runs parallel to, when any; it
    /// carries that edge's cocycle phase.
    pub parallel_to: Option<OrientedEdge>,
}

/// The weighted bipartite graph `C_G` together with its faces.
#[derive(Clone, Debug)]
pub struct FanWuGraph {
    parent: ToricGraph,
    x: WeightSystem,
    edges: Vec<CEdge>,
    /// Faces as lists of `C_G` edge indices: one rectangle per edge of `G`,
    /// one face per vertex of `G`, one face per face of `G`.
    faces: Vec<Vec<usize>>,
}

/// Signs `omega: E(C_G) -> {+1, -1}` satisfying the face condition.
#[derive(Clone, Debug)]
pub struct KasteleynOrientation {
    pub signs: Vec<i8>,
}

/// Builds `C_G` from a strictly interior weight system.
pub fn build_fan_wu(g: &ToricGraph, x: &WeightSystem) -> Result<FanWuGraph> {
    assert_eq!(x.len(), g.edge_count(), "one weight per edge");
    if !x.strictly_interior() {
        return Err(Error::InvalidWeight(
            *x.xs()
                .iter()
                .find(|&&v| !(v > 0.0 && v < 1.0))
                .unwrap_or(&f64::NAN),
        ));
    }
    let n = g.oriented_edge_count();
    let mut edges = Vec::with_capacity(3 * n);
    // Transverse block [0, n), parallel block [n, 2n), corner block [2n, 3n).
    for h in g.oriented_edges() {
        edges.push(CEdge {
            white: h.index(),
            black: h.index(),
            kind: CEdgeKind::Transverse,
            weight: x.theta(h.edge()).cos(),
            parallel_to: None,
        });
    }
    for h in g.oriented_edges() {
        edges.push(CEdge {
            white: h.index(),
            black: h.reversed().index(),
            kind: CEdgeKind::Parallel,
            weight: x.theta(h.edge()).sin(),
            parallel_to: Some(h),
        });
    }
    for h in g.oriented_edges() {
        edges.push(CEdge {
            white: h.index(),
            black: g.rotation_next(h).index(),
            kind: CEdgeKind::Corner,
            weight: 1.0,
            parallel_to: None,
        });
    }

    let transverse = |h: OrientedEdge| h.index();
    let parallel = |h: OrientedEdge| n + h.index();
    let corner = |h: OrientedEdge| 2 * n + h.index();

    let mut faces = Vec::with_capacity(g.edge_count() + g.vertex_count() + g.face_count());
    for i in 0..g.edge_count() {
        let e = OrientedEdge::forward(i);
        faces.push(vec![
            transverse(e),
            parallel(e.reversed()),
            transverse(e.reversed()),
            parallel(e),
        ]);
    }
    for v in 0..g.vertex_count() {
        let mut walk = Vec::with_capacity(2 * g.star(v).len());
        for &h in g.star(v) {
            walk.push(transverse(h));
            walk.push(corner(h));
        }
        faces.push(walk);
    }
    for boundary in g.faces() {
        let mut walk = Vec::with_capacity(2 * boundary.len());
        for &h in boundary {
            walk.push(parallel(h));
            walk.push(corner(h));
        }
        faces.push(walk);
    }

    Ok(FanWuGraph {
        parent: g.clone(),
        x: x.clone(),
        edges,
        faces,
    })
}

impl FanWuGraph {
    pub fn parent(&self) -> &ToricGraph {
        &self.parent
    }

    pub fn weights(&self) -> &WeightSystem {
        &self.x
    }

    /// Number of vertices in each class; `|B| = |W| = 2|E(G)|`.
    pub fn class_size(&self) -> usize {
        self.parent.oriented_edge_count()
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.class_size()
    }

    pub fn edges(&self) -> &[CEdge] {
        &self.edges
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    /// Sign required of the face product: `(-1)^{|df|/2 + 1}`.
    pub fn face_target(&self, face: usize) -> i8 {
        if (self.faces[face].len() / 2 + 1).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

/// Solves the GF(2) face system for an admissible orientation and normalizes
/// its sign cocycle against the even-subgraph oracle at reference weights.
pub fn kasteleyn_orientation(c: &FanWuGraph) -> Result<KasteleynOrientation> {
    let ne = c.edges.len();
    // One equation per face: sum of incident edge signs = face target (GF(2)).
    let words = ne.div_ceil(64);
    let mut rows: Vec<(Vec<u64>, bool)> = Vec::with_capacity(c.faces.len());
    for (f, face) in c.faces.iter().enumerate() {
        let mut row = vec![0u64; words];
        for &e in face {
            row[e / 64] ^= 1u64 << (e % 64);
        }
        rows.push((row, c.face_target(f) < 0));
    }
    let solution = solve_gf2(rows, ne).ok_or_else(|| {
        Error::NoOrientation("face equations are infeasible; face tracing is inconsistent".into())
    })?;
    let mut signs: Vec<i8> = solution.iter().map(|&s| if s { -1 } else { 1 }).collect();

    for (f, _) in c.faces.iter().enumerate() {
        debug_assert_eq!(face_product(c, &signs, f), c.face_target(f));
    }

    normalize_orientation(c, &mut signs)?;
    Ok(KasteleynOrientation { signs })
}

fn face_product(c: &FanWuGraph, signs: &[i8], face: usize) -> i8 {
    c.faces[face].iter().map(|&e| signs[e]).product()
}

/// GF(2) Gaussian elimination; returns any solution, `None` if inconsistent.
fn solve_gf2(mut rows: Vec<(Vec<u64>, bool)>, n: usize) -> Option<Vec<bool>> {
    let mut pivot_rows: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut rank = 0usize;
    for col in 0..n {
        let (w, b) = (col / 64, col % 64);
        let Some(p) = (rank..rows.len()).find(|&r| rows[r].0[w] >> b & 1 == 1) else {
            continue;
        };
        rows.swap(rank, p);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot = &head[rank];
        for r in tail.iter_mut() {
            if r.0[w] >> b & 1 == 1 {
                for (a, bb) in r.0.iter_mut().zip(&pivot.0) {
                    *a ^= *bb;
                }
                r.1 ^= pivot.1;
            }
        }
        pivot_rows.push((rank, col));
        rank += 1;
    }
    if rows[rank..].iter().any(|r| r.1) {
        return None;
    }
    // Back substitution with free variables set to zero.
    let mut x = vec![false; n];
    for &(r, c) in pivot_rows.iter().rev() {
        let mut v = rows[r].1;
        for (col, &set) in x.iter().enumerate().skip(c + 1) {
            if rows[r].0[col / 64] >> (col % 64) & 1 == 1 && set {
                v = !v;
            }
        }
        x[c] = v;
    }
    Some(x)
}

/// Fixes the homology class and global sign of an admissible orientation.
///
/// Candidate twists multiply each parallel edge by `(-1)^{s1*d1 + s2*d2}`,
/// which is exactly a relabeling of the half-period the determinant computes.
/// The right class makes the scaled determinant match the oracle-backed
/// `P^{+-1,+-1}` at reference weights up to one global sign, which a single
/// white-vertex flip absorbs.
fn normalize_orientation(c: &FanWuGraph, signs: &mut [i8]) -> Result<()> {
    let g = &c.parent;
    let x_ref = WeightSystem::uniform(g.edge_count(), 0.1).expect("reference weights");
    let c_ref = build_fan_wu(g, &x_ref).expect("reference rectangle graph");
    let targets = kac_ward::half_period_determinants(g, &x_ref);

    for (s1, s2) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
        let mut candidate = signs.to_vec();
        apply_twist(c, &mut candidate, s1, s2);
        let omega = KasteleynOrientation {
            signs: candidate.clone(),
        };
        let ratios: Vec<f64> = kac_ward::HALF_PERIODS
            .iter()
            .zip(&targets)
            .map(|(&(a, b), &p)| {
                let det = scaled_kasteleyn_determinant(
                    &c_ref,
                    &omega,
                    Complex64::new(a, 0.0),
                    Complex64::new(b, 0.0),
                );
                det.re / p
            })
            .collect();
        let all_plus = ratios.iter().all(|r| (r - 1.0).abs() < 1e-6);
        let all_minus = ratios.iter().all(|r| (r + 1.0).abs() < 1e-6);
        if all_plus || all_minus {
            signs.copy_from_slice(&candidate);
            if all_minus {
                // Coboundary flip at white vertex 0 changes det by -1 and
                // keeps every face product intact.
                for (i, e) in c.edges.iter().enumerate() {
                    if e.white == 0 {
                        signs[i] = -signs[i];
                    }
                }
            }
            return Ok(());
        }
    }
    Err(Error::NoOrientation(
        "no sign cocycle class matches the half-period determinants".into(),
    ))
}

fn apply_twist(c: &FanWuGraph, signs: &mut [i8], s1: i32, s2: i32) {
    if s1 == 0 && s2 == 0 {
        return;
    }
    for (i, e) in c.edges.iter().enumerate() {
        if let Some(h) = e.parallel_to {
            let (d1, d2) = c.parent.displacement(h);
            if (s1 * d1 + s2 * d2).rem_euclid(2) == 1 {
                signs[i] = -signs[i];
            }
        }
    }
}

/// The twisted Kasteleyn matrix `K^{z,w}`, rows indexed by white vertices and
/// columns by black vertices. Parallel edges carry the cocycle phase of the
/// original oriented edge; entries sum over parallel `C_G` edges.
pub fn kasteleyn_matrix(
    c: &FanWuGraph,
    omega: &KasteleynOrientation,
    z: Complex64,
    w: Complex64,
) -> DMatrix<Complex64> {
    let n = c.class_size();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for (i, e) in c.edges.iter().enumerate() {
        let phase = match e.parallel_to {
            Some(h) => c.parent.cocycle_phase(h, z, w),
            None => Complex64::new(1.0, 0.0),
        };
        m[(e.white, e.black)] += phase * (omega.signs[i] as f64 * e.weight);
    }
    m
}

/// `det K^{z,w}(C_G, y)`.
pub fn kasteleyn_determinant(
    c: &FanWuGraph,
    omega: &KasteleynOrientation,
    z: Complex64,
    w: Complex64,
) -> Complex64 {
    kasteleyn_matrix(c, omega, z, w).lu().determinant()
}

/// `2^{-|V(G)|} * prod_e (1 + x_e^2) * det K`, the combination that equals
/// the Kac-Ward determinant for a normalized orientation.
pub fn scaled_kasteleyn_determinant(
    c: &FanWuGraph,
    omega: &KasteleynOrientation,
    z: Complex64,
    w: Complex64,
) -> Complex64 {
    kasteleyn_determinant(c, omega, z, w) * correspondence_factor(&c.parent, &c.x)
}

/// The prefactor `2^{-|V(G)|} * prod_e (1 + x_e^2)`.
pub fn correspondence_factor(g: &ToricGraph, x: &WeightSystem) -> f64 {
    let mut f = 0.5f64.powi(g.vertex_count() as i32);
    for e in 0..g.edge_count() {
        f *= 1.0 + x.x(e) * x.x(e);
    }
    f
}

/// Brute-force dimer partition function: the signed sum over all perfect
/// matchings of `omega * phase * y` products with permutation signs. Equals
/// `det K` and is computed without any factorization.
pub fn matching_oracle(
    c: &FanWuGraph,
    omega: &KasteleynOrientation,
    z: Complex64,
    w: Complex64,
) -> Result<Complex64> {
    if c.class_size() > 16 {
        return Err(Error::TooLarge(format!(
            "matching enumeration supports |B| <= 16, got {}",
            c.class_size()
        )));
    }
    Ok(signed_matching_sum(&kasteleyn_matrix(c, omega, z, w)))
}

/// Expands the determinant of a square matrix as the signed sum over systems
/// of distinct representatives (perfect matchings of the bipartite support),
/// by dynamic programming over column subsets.
pub fn signed_matching_sum(m: &DMatrix<Complex64>) -> Complex64 {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    assert!(n <= 16, "subset DP supports dimension <= 16");
    let mut dp = vec![Complex64::new(0.0, 0.0); 1 << n];
    dp[0] = Complex64::new(1.0, 0.0);
    for mask in 1usize..(1 << n) {
        let row = mask.count_ones() as usize - 1;
        let mut acc = Complex64::new(0.0, 0.0);
        // Laplace expansion along the last committed row: the cofactor sign
        // is (-1)^{row + position of the column within the subset}.
        let mut sign = if row.is_multiple_of(2) { 1.0 } else { -1.0 };
        for col in 0..n {
            if mask >> col & 1 == 0 {
                continue;
            }
            let a = m[(row, col)];
            if a.norm_sqr() > 0.0 {
                acc += a * sign * dp[mask ^ (1 << col)];
            }
            sign = -sign;
        }
        dp[mask] = acc;
    }
    dp[(1 << n) - 1]
}

/// Kramers-Wannier dual weights `x* = (1 - x)/(1 + x)`, equivalently
/// `theta* = pi/2 - theta`.
pub fn dual_weights(x: &WeightSystem) -> WeightSystem {
    WeightSystem::from_x(x.xs().iter().map(|&v| (1.0 - v) / (1.0 + v)).collect())
        .expect("dual weights of weights in [0,1] stay in [0,1]")
}

/// Residual of the duality identity
/// `2^{|V|} prod(1+x_e)^{-1} P(G,x) = 2^{|V*|} prod(1+x*_e)^{-1} P(G*,x*)`
/// at one phase point.
pub fn duality_check(g: &ToricGraph, x: &WeightSystem, z: Complex64, w: Complex64) -> Result<f64> {
    let dual = g.dual()?;
    let xd = dual_weights(x);
    let lhs = side_factor(g.vertex_count(), x) * kac_ward::determinant(g, x, z, w).value;
    let rhs = side_factor(dual.vertex_count(), &xd) * kac_ward::determinant(&dual, &xd, z, w).value;
    let scale = lhs
        .norm()
        .max(rhs.norm())
        .max(side_factor(g.vertex_count(), x))
        .max(side_factor(dual.vertex_count(), &xd));
    Ok((lhs - rhs).norm() / scale)
}

fn side_factor(nv: usize, x: &WeightSystem) -> f64 {
    let mut f = 2.0f64.powi(nv as i32);
    for &v in x.xs() {
        f /= 1.0 + v;
    }
    f
}

/// Residuals of the four signed square-root duality identities, with the
/// extra minus sign on the `(1,1)` branch only. Roots come from the
/// even-subgraph oracle on both sides, so both cycle spaces must fit under
/// the cap.
pub fn signed_duality_check(g: &ToricGraph, x: &WeightSystem) -> Result<[f64; 4]> {
    let dual = g.dual()?;
    let xd = dual_weights(x);
    let roots = homology::homology_table(g, x)?.signed_roots();
    let dual_roots = homology::homology_table(&dual, &xd)?.signed_roots();
    let lhs_factor = side_factor(g.vertex_count(), x).sqrt();
    let rhs_factor = side_factor(dual.vertex_count(), &xd).sqrt();
    let mut out = [0.0; 4];
    for i in 0..4 {
        let sign = if i == 0 { -1.0 } else { 1.0 };
        let lhs = lhs_factor * roots[i];
        let rhs = sign * rhs_factor * dual_roots[i];
        out[i] = (lhs - rhs).abs() / (lhs_factor + rhs_factor).max(lhs.abs()).max(rhs.abs());
    }
    Ok(out)
}
