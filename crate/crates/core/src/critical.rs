//! The critical inverse temperature as the unique zero of the signed root
//! `r_{1,1}(x_beta)`, equivalently of `Z_{E0} - Z_{E1}`.
//!
//! When the cycle space fits under the enumeration cap the solver bisects the
//! oracle indicator with Brent's method in `log(beta)`. Otherwise it scans
//! `P^{1,1}(x_beta)` on a coarse logarithmic grid and refines the V-shaped
//! `|r| = sqrt(P)` minimum by golden section.

use crate::error::{Error, Result};
use crate::homology;
use crate::kac_ward;
use crate::toric_graph::ToricGraph;
use crate::weights::WeightSystem;

/// How the critical point was located.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMethod {
    OracleBisection,
    DeterminantMinimization,
}

impl std::fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolveMethod::OracleBisection => write!(f, "oracle-bisection"),
            SolveMethod::DeterminantMinimization => write!(f, "determinant-minimization"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CriticalPoint {
    pub beta_c: f64,
    /// `|r_{1,1}|` at the reported point.
    pub residual: f64,
    pub method: SolveMethod,
    pub bracket: (f64, f64),
}

#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    /// Cycle-space cap below which the oracle indicator drives bisection.
    pub oracle_cap: usize,
    /// Bracket for `beta`.
    pub bracket: (f64, f64),
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            oracle_cap: homology::DEFAULT_CYCLE_CAP,
            bracket: (1e-6, 1e3),
            max_iterations: 400,
        }
    }
}

fn oracle_feasible(g: &ToricGraph, cap: usize) -> bool {
    g.cycle_rank() <= cap && g.edge_count() <= 64
}

/// Sign of the phase: `Z_{E0} - Z_{E1}` via the oracle when feasible,
/// otherwise the tracked signed root `r_{1,1}`. Positive in the disordered
/// phase, negative in the ordered phase.
pub fn phase_indicator(g: &ToricGraph, couplings: &[f64], beta: f64) -> Result<f64> {
    phase_indicator_with(g, couplings, beta, &SolverConfig::default())
}

pub fn phase_indicator_with(
    g: &ToricGraph,
    couplings: &[f64],
    beta: f64,
    config: &SolverConfig,
) -> Result<f64> {
    let x = WeightSystem::from_beta_couplings(couplings, beta);
    if oracle_feasible(g, config.oracle_cap) {
        return Ok(homology::homology_table_with_cap(g, &x, config.oracle_cap)?.indicator());
    }
    Ok(kac_ward::half_period_roots_with_cap(g, &x, config.oracle_cap)?.roots[0])
}

/// Solves `r_{1,1}(x_beta) = 0` for `beta` to absolute tolerance `tol`.
pub fn critical_beta(g: &ToricGraph, couplings: &[f64], tol: f64) -> Result<CriticalPoint> {
    critical_beta_with(g, couplings, tol, &SolverConfig::default())
}

pub fn critical_beta_with(
    g: &ToricGraph,
    couplings: &[f64],
    tol: f64,
    config: &SolverConfig,
) -> Result<CriticalPoint> {
    assert!(tol >= 1e-12, "tolerance below 1e-12 is not resolvable");
    assert!(
        couplings.iter().all(|&j| j > 0.0),
        "couplings must be positive"
    );
    if oracle_feasible(g, config.oracle_cap) {
        critical_beta_oracle(g, couplings, tol, config)
    } else {
        critical_beta_minimize(g, couplings, tol, config)
    }
}

fn indicator_oracle(g: &ToricGraph, couplings: &[f64], beta: f64, cap: usize) -> f64 {
    let x = WeightSystem::from_beta_couplings(couplings, beta);
    homology::homology_table_with_cap(g, &x, cap)
        .expect("oracle feasibility was checked")
        .indicator()
}

fn critical_beta_oracle(
    g: &ToricGraph,
    couplings: &[f64],
    tol: f64,
    config: &SolverConfig,
) -> Result<CriticalPoint> {
    let (lo, hi) = config.bracket;
    let f = |t: f64| indicator_oracle(g, couplings, t.exp(), config.oracle_cap);
    let (ta, tb) = (lo.ln(), hi.ln());
    let (fa, fb) = (f(ta), f(tb));
    if fa <= 0.0 || fb >= 0.0 {
        return Err(Error::BracketFailure(format!(
            "indicator does not change sign on [{lo}, {hi}]: f({lo}) = {fa}, f({hi}) = {fb}"
        )));
    }
    let t_root = brent(f, ta, tb, fa, fb, tol, config.max_iterations)?;
    let beta_c = t_root.exp();
    Ok(CriticalPoint {
        beta_c,
        residual: indicator_oracle(g, couplings, beta_c, config.oracle_cap).abs(),
        method: SolveMethod::OracleBisection,
        bracket: (lo, hi),
    })
}

/// Brent's method on `f(t)` with `t = log(beta)`; converges when the bracket
/// width measured in `beta` drops below `tol`.
fn brent(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    tol: f64,
    max_iterations: usize,
) -> Result<f64> {
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = b - a;
    for _ in 0..max_iterations {
        if fb.abs() > fc.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        // Tolerance in t-units equivalent to `tol` in beta-units near b.
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * (tol / b.exp()).min(1.0);
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Inverse quadratic interpolation, falling back to secant.
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    Err(Error::BracketFailure(
        "root refinement did not converge within the iteration budget".into(),
    ))
}

fn critical_beta_minimize(
    g: &ToricGraph,
    couplings: &[f64],
    tol: f64,
    config: &SolverConfig,
) -> Result<CriticalPoint> {
    let p11 = |beta: f64| -> f64 {
        let x = WeightSystem::from_beta_couplings(couplings, beta);
        kac_ward::determinant(
            g,
            &x,
            num_complex::Complex64::new(1.0, 0.0),
            num_complex::Complex64::new(1.0, 0.0),
        )
        .value
        .re
    };
    let (lo, hi) = config.bracket;
    let (ta, tb) = (lo.ln(), hi.ln());
    let coarse = 200usize;
    let mut best = (f64::INFINITY, ta);
    let mut scale = 0.0f64;
    for i in 0..=coarse {
        let t = ta + (tb - ta) * i as f64 / coarse as f64;
        let v = p11(t.exp());
        scale = scale.max(v.abs());
        if v < best.0 {
            best = (v, t);
        }
    }
    let step = (tb - ta) / coarse as f64;
    let (mut a, mut b) = (best.1 - step, best.1 + step);
    let r = |t: f64| p11(t.exp()).max(0.0).sqrt();
    // Golden-section on the V-shaped |r|.
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = r(c);
    let mut fd = r(d);
    let mut iterations = 0usize;
    while (b.exp() - a.exp()).abs() > tol && iterations < config.max_iterations {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = r(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = r(d);
        }
        iterations += 1;
    }
    let t_min = if fc < fd { c } else { d };
    let beta_c = t_min.exp();
    let final_p = p11(beta_c);
    if final_p > scale.max(1.0) * 1e-12 {
        return Err(Error::BracketFailure(format!(
            "determinant minimum {final_p:.3e} at beta = {beta_c} is not a zero"
        )));
    }
    Ok(CriticalPoint {
        beta_c,
        residual: final_p.max(0.0).sqrt(),
        method: SolveMethod::DeterminantMinimization,
        bracket: (lo, hi),
    })
}

/// `Z_{E0}(x_beta) - Z_{E1}(x_beta)` through the oracle, for verifying
/// printed critical identities.
pub fn critical_identity_residual(g: &ToricGraph, couplings: &[f64], beta: f64) -> Result<f64> {
    let x = WeightSystem::from_beta_couplings(couplings, beta);
    Ok(homology::homology_table(g, &x)?.indicator())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use approx::assert_relative_eq;

    fn beta_c_of(g: &ToricGraph) -> f64 {
        critical_beta(g, &g.couplings(), 1e-10).unwrap().beta_c
    }

    #[test]
    fn known_lattice_critical_points() {
        let square = 0.5 * (1.0 + 2.0f64.sqrt()).ln();
        let hex = 0.5 * (2.0 + 3.0f64.sqrt()).ln();
        let tri = 0.5 * 3.0f64.sqrt().ln();
        assert_relative_eq!(beta_c_of(&builtins::square()), square, epsilon = 1e-9);
        assert_relative_eq!(beta_c_of(&builtins::hex()), hex, epsilon = 1e-9);
        assert_relative_eq!(beta_c_of(&builtins::tri()), tri, epsilon = 1e-9);
    }

    #[test]
    fn phase_indicator_signs() {
        let g = builtins::square();
        let j = g.couplings();
        assert!(phase_indicator(&g, &j, 0.3).unwrap() > 0.0);
        assert!(phase_indicator(&g, &j, 0.6).unwrap() < 0.0);
        assert_relative_eq!(phase_indicator(&g, &j, 1e-9).unwrap(), 1.0, epsilon = 1e-6);
        // The tracked-root fallback agrees in sign.
        let config = SolverConfig {
            oracle_cap: 0,
            ..SolverConfig::default()
        };
        assert!(phase_indicator_with(&g, &j, 0.3, &config).unwrap() > 0.0);
        assert!(phase_indicator_with(&g, &j, 0.6, &config).unwrap() < 0.0);
    }

    #[test]
    fn minimization_path_matches_oracle_path() {
        let g = builtins::square();
        let j = g.couplings();
        let oracle = critical_beta(&g, &j, 1e-10).unwrap();
        assert_eq!(oracle.method, SolveMethod::OracleBisection);
        let config = SolverConfig {
            oracle_cap: 0,
            ..SolverConfig::default()
        };
        let minimized = critical_beta_with(&g, &j, 1e-10, &config).unwrap();
        assert_eq!(minimized.method, SolveMethod::DeterminantMinimization);
        assert_relative_eq!(minimized.beta_c, oracle.beta_c, epsilon = 1e-8);

        let hex = builtins::hex();
        let j = hex.couplings();
        let minimized = critical_beta_with(&hex, &j, 1e-10, &config).unwrap();
        assert_relative_eq!(
            minimized.beta_c,
            0.5 * (2.0 + 3.0f64.sqrt()).ln(),
            epsilon = 1e-8
        );
    }

    #[test]
    fn coupling_scaling_and_domain_invariance() {
        let g = builtins::rect21_with([1.0, 0.7, 1.3, 0.4]);
        let j = g.couplings();
        let base = critical_beta(&g, &j, 1e-11).unwrap().beta_c;
        let scaled: Vec<f64> = j.iter().map(|v| v * 2.5).collect();
        let b2 = critical_beta(&g, &scaled, 1e-11).unwrap().beta_c;
        assert_relative_eq!(b2 * 2.5, base, epsilon = 1e-10);

        // Covers present the same infinite graph.
        for (n, m) in [(2, 1), (1, 2), (2, 2)] {
            let cover = g.enlarge(n, m);
            let bc = critical_beta(&cover, &cover.couplings(), 1e-11)
                .unwrap()
                .beta_c;
            assert_relative_eq!(bc, base, epsilon = 1e-8);
        }

        // Symmetric rect21 reproduces the square-lattice value.
        let sym = builtins::rect21();
        let bc = critical_beta(&sym, &sym.couplings(), 1e-11).unwrap().beta_c;
        assert_relative_eq!(bc, 0.5 * (1.0 + 2.0f64.sqrt()).ln(), epsilon = 1e-9);
    }

    #[test]
    fn isoradial_couplings_are_critical_at_beta_one() {
        for theta in [0.5, std::f64::consts::FRAC_PI_4, 1.1] {
            let g = builtins::rect_iso(theta);
            let bc = critical_beta(&g, &g.couplings(), 1e-10).unwrap().beta_c;
            assert_relative_eq!(bc, 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn self_duality_of_critical_square_weights() {
        let g = builtins::square();
        let bc = beta_c_of(&g);
        let x = WeightSystem::from_beta(&g, bc);
        let xd = crate::fan_wu::dual_weights(&x);
        for e in 0..2 {
            assert_relative_eq!(x.x(e), xd.x(e), epsilon = 1e-10);
        }
    }

    #[test]
    fn indicator_changes_sign_exactly_once_on_log_grid() {
        for g in [
            builtins::square(),
            builtins::hex(),
            builtins::tri(),
            builtins::rect21_with([0.5, 1.2, 2.0, 0.8]),
            builtins::rect_iso(0.9),
        ] {
            let j = g.couplings();
            let mut changes = 0;
            let mut prev = phase_indicator(&g, &j, 1e-4).unwrap().signum();
            for i in 1..200 {
                let beta = 10f64.powf(-4.0 + 6.0 * i as f64 / 199.0);
                let s = phase_indicator(&g, &j, beta).unwrap().signum();
                if s != prev {
                    changes += 1;
                    prev = s;
                }
            }
            assert_eq!(changes, 1, "indicator must change sign exactly once");
        }
    }

    #[test]
    fn out_of_bracket_critical_point_reports_bracket_failure() {
        // J = 1e-6 pushes beta_c to ~4.4e5, outside the default bracket.
        let g = builtins::square();
        assert!(matches!(
            critical_beta(&g, &[1e-6, 1e-6], 1e-10),
            Err(crate::error::Error::BracketFailure(_))
        ));
    }

    #[test]
    fn identity_residual_vanishes_at_the_solution() {
        let g = builtins::rect21_with([1.0, 0.9, 1.1, 0.7]);
        let j = g.couplings();
        let bc = critical_beta(&g, &j, 1e-12).unwrap().beta_c;
        assert!(critical_identity_residual(&g, &j, bc).unwrap().abs() < 1e-12);
    }
}
