//! The Kac-Ward matrix `I - T` on oriented edges and its determinant.
//!
//! The transition entry from `e` to `e'` exists when `t(e) = o(e')` and `e'`
//! is not the reversal of `e`; it carries the weight `x_e`, the half turning
//! angle phase `exp(i*alpha(e,e')/2)`, and the cocycle phase of `e`. The
//! determinant `P^{z,w}(G, x)` is real on the unit torus for real weights,
//! and at the half-periods `(z, w) = (+-1, +-1)` it is the square of a signed
//! combination of the partial partition functions, which is what ties it to
//! the even-subgraph oracle.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::homology;
use crate::toric_graph::ToricGraph;
use crate::weights::WeightSystem;

/// Dense Kac-Ward matrix `I - T` at a fixed phase point.
#[derive(Clone, Debug)]
pub struct KacWardMatrix {
    matrix: DMatrix<Complex64>,
    pub z: Complex64,
    pub w: Complex64,
}

/// Value of the determinant together with a crude conditioning estimate from
/// the LU factorization (ratio of extreme pivot magnitudes).
#[derive(Clone, Copy, Debug)]
pub struct SpectralValue {
    pub value: Complex64,
    pub z: Complex64,
    pub w: Complex64,
    pub condition_estimate: f64,
}

impl SpectralValue {
    /// Real part, after checking the unit-torus reality bound
    /// `|Im P| <= 1e-9 * (1 + |P|)`.
    pub fn real_checked(&self) -> Result<f64> {
        if self.value.im.abs() > 1e-9 * (1.0 + self.value.norm()) {
            return Err(Error::NonPositiveSample {
                theta: self.z.arg(),
                eta: self.w.arg(),
                value: self.value.im,
            });
        }
        Ok(self.value.re)
    }
}

/// Builds `I - T` for the given weights and phase point.
pub fn build(g: &ToricGraph, x: &WeightSystem, z: Complex64, w: Complex64) -> KacWardMatrix {
    build_with_phase(g, x, |e| g.cocycle_phase(e, z, w), z, w)
}

/// Same, but with an arbitrary phase assignment on oriented edges. Used to
/// check invariance under cohomologous cocycles.
pub(crate) fn build_with_phase(
    g: &ToricGraph,
    x: &WeightSystem,
    phase: impl Fn(crate::toric_graph::OrientedEdge) -> Complex64,
    z: Complex64,
    w: Complex64,
) -> KacWardMatrix {
    assert_eq!(x.len(), g.edge_count(), "one weight per edge");
    let n = g.oriented_edge_count();
    let mut m = DMatrix::<Complex64>::identity(n, n);
    for e in g.oriented_edges() {
        let xe = x.x(e.edge());
        if xe == 0.0 {
            continue;
        }
        let factor = phase(e) * xe;
        let v = g.terminus(e);
        for &e2 in g.star(v) {
            if e2 == e.reversed() {
                continue;
            }
            let alpha = g.angle(e, e2).expect("successors at t(e) are incident");
            m[(e.index(), e2.index())] -= factor * Complex64::from_polar(1.0, 0.5 * alpha);
        }
    }
    KacWardMatrix { matrix: m, z, w }
}

impl KacWardMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    /// `P^{z,w}(G, x)` via dense LU with partial pivoting.
    pub fn determinant(&self) -> SpectralValue {
        let lu = self.matrix.clone().lu();
        let value = lu.determinant();
        let u = lu.u();
        let mut max_p = 0.0f64;
        let mut min_p = f64::INFINITY;
        for i in 0..u.nrows() {
            let p = u[(i, i)].norm();
            max_p = max_p.max(p);
            min_p = min_p.min(p);
        }
        let condition_estimate = if min_p > 0.0 {
            max_p / min_p
        } else {
            f64::INFINITY
        };
        SpectralValue {
            value,
            z: self.z,
            w: self.w,
            condition_estimate,
        }
    }
}

/// Convenience wrapper: determinant at a phase point.
pub fn determinant(g: &ToricGraph, x: &WeightSystem, z: Complex64, w: Complex64) -> SpectralValue {
    build(g, x, z, w).determinant()
}

pub(crate) const HALF_PERIODS: [(f64, f64); 4] =
    [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];

/// Determinants at the four half-periods, in the order
/// `(1,1), (1,-1), (-1,1), (-1,-1)`.
pub fn half_period_determinants(g: &ToricGraph, x: &WeightSystem) -> [f64; 4] {
    HALF_PERIODS.map(|(a, b)| {
        determinant(g, x, Complex64::new(a, 0.0), Complex64::new(b, 0.0))
            .value
            .re
    })
}

/// How the signed square roots were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootMethod {
    Oracle,
    HomotopyTracking,
}

/// The four signed square roots `P^{+-1,+-1}(G,x)^{1/2}`, normalized so each
/// tends to `+1` as `x -> 0`.
#[derive(Clone, Copy, Debug)]
pub struct HalfPeriodRoots {
    /// `(r_{1,1}, r_{1,-1}, r_{-1,1}, r_{-1,-1})`.
    pub roots: [f64; 4],
    pub method: RootMethod,
}

impl HalfPeriodRoots {
    /// The Ising partition function combination
    /// `Z = (-r_{1,1} + r_{1,-1} + r_{-1,1} + r_{-1,-1}) / 2`.
    pub fn partition_function(&self) -> f64 {
        0.5 * (-self.roots[0] + self.roots[1] + self.roots[2] + self.roots[3])
    }
}

/// Computes the signed roots, via the even-subgraph oracle when the cycle
/// space fits under `DEFAULT_CYCLE_CAP`, otherwise by homotopy tracking.
pub fn half_period_roots(g: &ToricGraph, x: &WeightSystem) -> Result<HalfPeriodRoots> {
    half_period_roots_with_cap(g, x, homology::DEFAULT_CYCLE_CAP)
}

pub fn half_period_roots_with_cap(
    g: &ToricGraph,
    x: &WeightSystem,
    cap: usize,
) -> Result<HalfPeriodRoots> {
    if g.cycle_rank() <= cap && g.edge_count() <= 64 {
        let table = homology::homology_table_with_cap(g, x, cap)?;
        return Ok(HalfPeriodRoots {
            roots: table.signed_roots(),
            method: RootMethod::Oracle,
        });
    }
    tracked_roots(g, x, 64)
}

/// Sign assignment by tracking `|P(t*x)|^{1/2}` along `t in [0, 1]`.
///
/// The branch `r_{1,1}` flips sign at each zero of `P^{1,1}(t*x)`; a zero is
/// recognized as a local minimum of the sampled values that refines to below
/// `1e-12` of the sample scale. The other three branches must stay positive;
/// a dip of one of them to zero is reported as `SignAmbiguous`.
fn tracked_roots(g: &ToricGraph, x: &WeightSystem, steps: usize) -> Result<HalfPeriodRoots> {
    let sample = |t: f64| -> [f64; 4] { half_period_determinants(g, &x.scaled(t)) };
    let ts: Vec<f64> = (0..=steps).map(|i| i as f64 / steps as f64).collect();
    let values: Vec<[f64; 4]> = ts.par_iter().map(|&t| sample(t)).collect();

    let mut signs = [1.0f64; 4];
    for branch in 0..4 {
        let series: Vec<f64> = values.iter().map(|v| v[branch]).collect();
        let scale = series.iter().fold(1.0f64, |a, &b| a.max(b.abs()));
        let mut flips = 0usize;
        for i in 1..series.len() {
            let interior_min =
                i + 1 < series.len() && series[i] < series[i - 1] && series[i] < series[i + 1];
            let endpoint_dip = i + 1 == series.len() && series[i] < series[i - 1];
            if !(interior_min || endpoint_dip) {
                continue;
            }
            if series[i] > 1e-4 * scale {
                continue;
            }
            let lo = ts[i - 1];
            let hi = ts[(i + 1).min(series.len() - 1)];
            let min = golden_min(|t| sample(t)[branch], lo, hi, 120);
            if min <= 1e-12 * scale {
                if branch == 0 {
                    if !endpoint_dip {
                        flips += 1;
                    }
                } else {
                    return Err(Error::SignAmbiguous(format!(
                        "half-period branch {branch} reached zero during tracking"
                    )));
                }
            }
        }
        if branch == 0 && flips % 2 == 1 {
            signs[0] = -1.0;
        }
    }

    let p = values[steps];
    Ok(HalfPeriodRoots {
        roots: [
            signs[0] * p[0].max(0.0).sqrt(),
            p[1].max(0.0).sqrt(),
            p[2].max(0.0).sqrt(),
            p[3].max(0.0).sqrt(),
        ],
        method: RootMethod::HomotopyTracking,
    })
}

/// Golden-section minimization of a unimodal scalar function.
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if (b - a).abs() < 1e-15 * (1.0 + a.abs() + b.abs()) {
            break;
        }
    }
    fc.min(fd)
}

/// Grid placement for [`positivity_scan`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridOffset {
    /// Nodes at `theta_j = 2*pi*j/n`; the grid contains `(1, 1)`.
    Aligned,
    /// Midpoint nodes `theta_j = 2*pi*(j + 1/2)/n`; avoids `(1, 1)`.
    Midpoint,
}

#[derive(Clone, Debug)]
pub struct PositivityReport {
    pub grid_n: usize,
    pub offset: GridOffset,
    /// Smallest sampled real value and its grid angles.
    pub min_value: f64,
    pub min_location: (f64, f64),
    /// Largest sampled `|P|`, the scale for the nonnegativity threshold.
    pub scale: f64,
    /// Samples below `-1e-9 * scale`, as `(theta, eta, value)`.
    pub violations: Vec<(f64, f64, f64)>,
    /// Values at `(1,1), (1,-1), (-1,1), (-1,-1)`.
    pub half_period_values: [f64; 4],
}

/// Evaluates `P` on an `n x n` grid of unit phases and reports the minimum
/// together with any value below the nonnegativity tolerance.
pub fn positivity_scan(
    g: &ToricGraph,
    x: &WeightSystem,
    grid_n: usize,
    offset: GridOffset,
) -> PositivityReport {
    assert!(grid_n >= 4, "grid must be at least 4 x 4");
    let shift = match offset {
        GridOffset::Aligned => 0.0,
        GridOffset::Midpoint => 0.5,
    };
    let step = 2.0 * std::f64::consts::PI / grid_n as f64;
    let samples: Vec<(f64, f64, f64)> = (0..grid_n * grid_n)
        .into_par_iter()
        .map(|idx| {
            let theta = step * (((idx / grid_n) as f64) + shift);
            let eta = step * (((idx % grid_n) as f64) + shift);
            let v = determinant(
                g,
                x,
                Complex64::from_polar(1.0, theta),
                Complex64::from_polar(1.0, eta),
            );
            (theta, eta, v.value.re)
        })
        .collect();
    let mut min_value = f64::INFINITY;
    let mut min_location = (0.0, 0.0);
    let mut scale = 0.0f64;
    for &(theta, eta, v) in &samples {
        if v < min_value {
            min_value = v;
            min_location = (theta, eta);
        }
        scale = scale.max(v.abs());
    }
    let violations = samples
        .iter()
        .copied()
        .filter(|&(_, _, v)| v < -1e-9 * scale)
        .collect();
    PositivityReport {
        grid_n,
        offset,
        min_value,
        min_location,
        scale,
        violations,
        half_period_values: half_period_determinants(g, x),
    }
}

/// Relative residual of the cover identity
/// `P^{z,w}(G_{nm}, x) = prod over u^n = z, v^m = w of P^{u,v}(G, x)`.
pub fn enlargement_product_check(
    g: &ToricGraph,
    x: &WeightSystem,
    n: usize,
    m: usize,
    z: Complex64,
    w: Complex64,
) -> f64 {
    let cover = g.enlarge(n, m);
    let x_cover = periodic_weights(x, n * m);
    let lhs = determinant(&cover, &x_cover, z, w).value;

    let us = roots_of(z, n);
    let ws = roots_of(w, m);
    let pairs: Vec<(Complex64, Complex64)> = us
        .iter()
        .flat_map(|&u| ws.iter().map(move |&v| (u, v)))
        .collect();
    let factors: Vec<Complex64> = pairs
        .par_iter()
        .map(|&(u, v)| determinant(g, x, u, v).value)
        .collect();
    let rhs: Complex64 = factors.iter().product();

    let scale = lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE);
    (lhs - rhs).norm() / scale
}

/// Weights of the `n*m`-fold cover, copied periodically in the same edge
/// order that [`ToricGraph::enlarge`] produces.
pub fn periodic_weights(x: &WeightSystem, copies: usize) -> WeightSystem {
    let mut xs = Vec::with_capacity(x.len() * copies);
    for e in 0..x.len() {
        for _ in 0..copies {
            xs.push(x.x(e));
        }
    }
    WeightSystem::from_x(xs).expect("copies of valid weights are valid")
}

/// The `n` complex `n`-th roots of `z`.
fn roots_of(z: Complex64, n: usize) -> Vec<Complex64> {
    let (r, phi) = z.to_polar();
    let rn = r.powf(1.0 / n as f64);
    (0..n)
        .map(|j| {
            Complex64::from_polar(rn, (phi + 2.0 * std::f64::consts::PI * j as f64) / n as f64)
        })
        .collect()
}
