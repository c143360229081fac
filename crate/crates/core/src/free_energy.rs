//! Free energy per fundamental domain by toroidal quadrature.
//!
//! `log Z_x` equals `(1/(8 pi^2))` times the integral of `log P^{z,w}` over
//! the unit torus. The integrand is smooth away from criticality and has an
//! integrable logarithmic singularity at `(1, 1)` exactly at the critical
//! point, so the quadrature uses the midpoint (shifted trapezoidal) rule:
//! spectrally accurate for smooth periodic integrands, and its nodes never
//! touch `(1, 1)`. The error estimate is the difference against the halved
//! grid. Node sums are accumulated pairwise so the result does not depend on
//! the evaluation order.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kac_ward;
use crate::toric_graph::ToricGraph;
use crate::weights::WeightSystem;

/// Floor for `log` of a vanishing determinant sample (double underflow).
const LOG_FLOOR: f64 = -745.0;

#[derive(Clone, Copy, Debug)]
pub struct FreeEnergyResult {
    /// `log Z_x`, the high-temperature free energy per fundamental domain.
    pub value: f64,
    pub grid_n: usize,
    /// `|value(n) - value(n/2)|`.
    pub error_estimate: f64,
    /// Set when a sample sat at the underflow floor, which only happens next
    /// to the critical singularity.
    pub near_singular: bool,
}

/// Midpoint-rule value of `(1/(8 pi^2)) \int log P` on an `n x n` grid.
fn midpoint_sum(g: &ToricGraph, x: &WeightSystem, n: usize) -> Result<(f64, bool)> {
    midpoint_sum_with_offset(g, x, n, 0.5)
}

fn midpoint_sum_with_offset(
    g: &ToricGraph,
    x: &WeightSystem,
    n: usize,
    offset: f64,
) -> Result<(f64, bool)> {
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let samples: Vec<(f64, f64, f64)> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let theta = step * ((idx / n) as f64 + offset);
            let eta = step * ((idx % n) as f64 + offset);
            let p = kac_ward::determinant(
                g,
                x,
                Complex64::from_polar(1.0, theta),
                Complex64::from_polar(1.0, eta),
            );
            (theta, eta, p.value.re)
        })
        .collect();
    let scale = samples
        .iter()
        .fold(0.0f64, |a, &(_, _, v)| a.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let mut flagged = false;
    let mut logs = Vec::with_capacity(samples.len());
    for &(theta, eta, v) in &samples {
        if v <= -1e-9 * scale {
            return Err(Error::NonPositiveSample {
                theta,
                eta,
                value: v,
            });
        }
        if v <= 0.0 || v.ln() < LOG_FLOOR {
            flagged = true;
            logs.push(LOG_FLOOR);
        } else {
            logs.push(v.ln());
        }
    }
    let total = pairwise_sum(&logs);
    Ok((total / (2.0 * (n * n) as f64), flagged))
}

fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => {
            let mid = n / 2;
            pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
        }
    }
}

/// `log Z_x` with a grid-halving error estimate. `grid_n` must be a power of
/// two, at least 8.
pub fn free_energy(g: &ToricGraph, x: &WeightSystem, grid_n: usize) -> Result<FreeEnergyResult> {
    assert!(
        grid_n >= 8 && grid_n.is_power_of_two(),
        "grid size must be a power of two, at least 8"
    );
    let (value, flag_fine) = midpoint_sum(g, x, grid_n)?;
    let (coarse, flag_coarse) = midpoint_sum(g, x, grid_n / 2)?;
    Ok(FreeEnergyResult {
        value,
        grid_n,
        error_estimate: (value - coarse).abs(),
        near_singular: flag_fine || flag_coarse,
    })
}

/// The Ising free energy per fundamental domain,
/// `log Z_x + sum_e log cosh(beta J_e) + |V| log 2`.
pub fn free_energy_ising(
    g: &ToricGraph,
    couplings: &[f64],
    beta: f64,
    grid_n: usize,
) -> Result<FreeEnergyResult> {
    let x = WeightSystem::from_beta_couplings(couplings, beta);
    let base = free_energy(g, &x, grid_n)?;
    let cosh_sum: f64 = couplings.iter().map(|j| (beta * j).cosh().ln()).sum();
    Ok(FreeEnergyResult {
        value: base.value + cosh_sum + g.vertex_count() as f64 * 2.0f64.ln(),
        ..base
    })
}

/// Gap between the finite-cover Riemann sum `(1/n^2) log P^{-1,-1}(G_nn, x)`
/// and the quadrature value on a reference grid. The `n`-th roots of `-1`
/// are exactly the midpoint nodes, so the gap must shrink as `n` grows.
pub fn riemann_sum_check(g: &ToricGraph, x: &WeightSystem, n: usize, grid_n: usize) -> Result<f64> {
    assert!(
        (1..=4).contains(&n),
        "cover index must keep the determinant desk-sized"
    );
    let cover = g.enlarge(n, n);
    let x_cover = kac_ward::periodic_weights(x, n * n);
    let minus = Complex64::new(-1.0, 0.0);
    let p = kac_ward::determinant(&cover, &x_cover, minus, minus)
        .value
        .re;
    if p <= 0.0 {
        return Err(Error::NonPositiveSample {
            theta: std::f64::consts::PI,
            eta: std::f64::consts::PI,
            value: p,
        });
    }
    let finite = p.ln() / (n * n) as f64 / 2.0;
    let reference = free_energy(g, x, grid_n)?.value;
    Ok((finite - reference).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::homology;
    use approx::assert_relative_eq;

    #[test]
    fn zero_weights_give_exactly_zero() {
        let g = builtins::square();
        let x = WeightSystem::uniform(2, 0.0).unwrap();
        let r = free_energy(&g, &x, 16).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.error_estimate, 0.0);
        assert!(!r.near_singular);
    }

    #[test]
    fn subcritical_grids_self_converge() {
        let g = builtins::square();
        let x = WeightSystem::uniform(2, 0.2).unwrap();
        let fine = free_energy(&g, &x, 128).unwrap();
        let coarse = free_energy(&g, &x, 64).unwrap();
        assert!((fine.value - coarse.value).abs() < 1e-8);
        assert!(fine.error_estimate < 1e-8);
        // Away from criticality the doubling error decays at least
        // quadratically (in fact much faster for this smooth integrand).
        let e16 = free_energy(&g, &x, 16).unwrap().error_estimate;
        let e32 = free_energy(&g, &x, 32).unwrap().error_estimate;
        assert!(
            e32 < e16 / 4.0,
            "doubling must gain at least 4x: {e16:e} -> {e32:e}"
        );
    }

    #[test]
    fn relabeling_the_domain_does_not_change_the_value() {
        use crate::toric_graph::{CouplingSpec, EdgeData, GraphData, VertexData};
        use nalgebra::Vector2;
        // The square domain with the two loops listed in the other order.
        let g = GraphData {
            basis: [Vector2::new(1.0, 0.0), Vector2::new(0.0, 1.0)],
            vertices: vec![VertexData {
                name: "v".into(),
                position: Vector2::zeros(),
            }],
            edges: vec![
                EdgeData {
                    name: "w".into(),
                    u: 0,
                    v: 0,
                    displacement: (0, 1),
                    weight: CouplingSpec::J(1.0),
                },
                EdgeData {
                    name: "h".into(),
                    u: 0,
                    v: 0,
                    displacement: (1, 0),
                    weight: CouplingSpec::J(1.0),
                },
            ],
        }
        .build()
        .unwrap();
        let a = free_energy_ising(&builtins::square(), &[1.0, 1.0], 0.3, 32).unwrap();
        let b = free_energy_ising(&g, &[1.0, 1.0], 0.3, 32).unwrap();
        assert_relative_eq!(a.value, b.value, epsilon = 1e-12);
    }

    #[test]
    fn cover_free_energy_matches_per_domain_value() {
        let g = builtins::square();
        let x = WeightSystem::uniform(2, 0.2).unwrap();
        let base = free_energy(&g, &x, 64).unwrap().value;
        let cover = g.enlarge(2, 2);
        let x_cover = kac_ward::periodic_weights(&x, 4);
        let per_domain = free_energy(&cover, &x_cover, 32).unwrap().value / 4.0;
        assert_relative_eq!(base, per_domain, epsilon = 1e-8);
    }

    #[test]
    fn grid_offset_invariance_within_error_estimate() {
        let g = builtins::hex();
        let x = WeightSystem::uniform(3, 0.3).unwrap();
        let a = free_energy(&g, &x, 64).unwrap();
        let b = free_energy(&g, &x, 128).unwrap();
        assert!((a.value - b.value).abs() <= a.error_estimate.max(1e-12));
        // Sliding every node by a fixed offset moves the value by no more
        // than the reported estimate.
        for offset in [0.2, 0.35, 0.75] {
            let (shifted, _) = midpoint_sum_with_offset(&g, &x, 64, offset).unwrap();
            assert!((shifted - a.value).abs() <= a.error_estimate.max(1e-12));
        }
    }

    #[test]
    fn monotone_in_the_weights() {
        let g = builtins::tri();
        let lo = WeightSystem::from_x(vec![0.2, 0.3, 0.25]).unwrap();
        let hi = WeightSystem::from_x(vec![0.25, 0.32, 0.3]).unwrap();
        let a = free_energy(&g, &lo, 32).unwrap().value;
        let b = free_energy(&g, &hi, 32).unwrap().value;
        assert!(b > a);
    }

    #[test]
    fn ising_free_energy_limits_and_finite_size_gap() {
        let g = builtins::square();
        let j = g.couplings();
        let r = free_energy_ising(&g, &j, 1e-12, 16).unwrap();
        assert_relative_eq!(r.value, 2.0f64.ln(), epsilon = 1e-9);

        // Brute-force partition functions on the 2x2 and 3x3 covers bracket
        // the infinite-volume value with a shrinking gap.
        let beta = 0.2;
        let f_inf = free_energy_ising(&g, &j, beta, 64).unwrap().value;
        let mut gaps = Vec::new();
        for n in [2usize, 3] {
            let cover = g.enlarge(n, n);
            let xc = WeightSystem::from_beta(&cover, beta);
            let z = homology::partition_function(&cover, &xc).unwrap();
            let log_z_ising = z.ln()
                + cover
                    .couplings()
                    .iter()
                    .map(|jj| (beta * jj).cosh().ln())
                    .sum::<f64>()
                + cover.vertex_count() as f64 * 2.0f64.ln();
            gaps.push((log_z_ising / (n * n) as f64 - f_inf).abs());
        }
        assert!(gaps[1] < gaps[0], "finite-size gap must shrink: {gaps:?}");
    }

    #[test]
    fn riemann_sums_converge_and_slow_down_near_criticality() {
        let g = builtins::square();
        let x = WeightSystem::uniform(2, 0.2).unwrap();
        let r2 = riemann_sum_check(&g, &x, 2, 64).unwrap();
        let r4 = riemann_sum_check(&g, &x, 4, 64).unwrap();
        assert!(r4 < r2, "residual must decrease: {r2} vs {r4}");

        let near = WeightSystem::uniform(2, 0.41).unwrap();
        let n2 = riemann_sum_check(&g, &near, 2, 128).unwrap();
        let n4 = riemann_sum_check(&g, &near, 4, 128).unwrap();
        assert!(n2.is_finite() && n4.is_finite());
        assert!(n4 < n2);

        let zero = WeightSystem::uniform(2, 0.0).unwrap();
        assert_eq!(riemann_sum_check(&g, &zero, 2, 16).unwrap(), 0.0);
    }

    #[test]
    fn second_differences_grow_toward_criticality() {
        // Finite-difference second derivative of the free energy in beta,
        // bounded away from criticality and growing as the window tightens
        // around it.
        let g = builtins::square();
        let j = g.couplings();
        let beta_c = 0.5 * (1.0 + 2.0f64.sqrt()).ln();
        let d2 = |beta: f64| {
            let h = 1e-3;
            let f = |b: f64| free_energy_ising(&g, &j, b, 64).unwrap().value;
            (f(beta + h) - 2.0 * f(beta) + f(beta - h)) / (h * h)
        };
        let far = d2(0.7 * beta_c).abs();
        let near = d2(0.98 * beta_c).abs();
        assert!(far.is_finite() && near.is_finite());
        assert!(
            near > far,
            "curvature must grow toward beta_c: {far} vs {near}"
        );
    }

    #[test]
    fn critical_grid_stays_finite() {
        let g = builtins::square();
        let xc = WeightSystem::uniform(2, 2.0f64.sqrt() - 1.0).unwrap();
        let r = free_energy(&g, &xc, 64).unwrap();
        assert!(r.value.is_finite());
        // Onsager: the critical square-lattice Ising free energy density is
        // log(2)/2 + (2/pi) * Catalan, per site; with one vertex and our
        // log Z_x normalization the identity reads below.
        let catalan = 0.915_965_594_177_219;
        let beta_c = 0.5 * (1.0 + 2.0f64.sqrt()).ln();
        let expected_ising = 0.5 * (2.0f64.ln()) + 2.0 / std::f64::consts::PI * catalan;
        let ising = free_energy_ising(&g, &g.couplings(), beta_c, 64).unwrap();
        assert_relative_eq!(ising.value, expected_ising, epsilon = 1e-4);
    }
}
