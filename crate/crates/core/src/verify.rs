//! The runnable identity suite behind the `verify` subcommand.
//!
//! Each check compares two independently computed quantities and reports a
//! normalized residual with its documented tolerance: the half-period
//! determinants against the even-subgraph oracle, the dimer correspondence at
//! random unit phases, both duality identities, and the cover product
//! formula. Random phase points come from a seeded generator so repeated runs
//! are identical.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fan_wu;
use crate::homology;
use crate::kac_ward;
use crate::toric_graph::ToricGraph;
use crate::weights::WeightSystem;

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.residual.is_finite() && self.residual < self.tolerance
    }
}

fn unit_phase(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(
        1.0,
        rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
    )
}

/// Runs the full identity suite on `(g, tanh(beta * J))`.
pub fn identity_suite(g: &ToricGraph, beta: f64, seed: u64) -> Result<Vec<CheckResult>> {
    let x = WeightSystem::from_beta(g, beta);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    // Half-period determinants against the squared oracle combinations.
    let dets = kac_ward::half_period_determinants(g, &x);
    let roots = homology::homology_table(g, &x)?.signed_roots();
    let mut worst = 0.0f64;
    for i in 0..4 {
        let expected = roots[i] * roots[i];
        worst = worst.max((dets[i] - expected).abs() / (1.0 + expected.abs()));
    }
    out.push(CheckResult {
        name: "half-period-oracle",
        residual: worst,
        tolerance: 1e-10,
    });

    // Dimer correspondence at 25 random unit-torus phases.
    let c = fan_wu::build_fan_wu(g, &x)?;
    let omega = fan_wu::kasteleyn_orientation(&c)?;
    let mut worst = 0.0f64;
    for _ in 0..25 {
        let z = unit_phase(&mut rng);
        let w = unit_phase(&mut rng);
        let det = fan_wu::scaled_kasteleyn_determinant(&c, &omega, z, w);
        let p = kac_ward::determinant(g, &x, z, w).value;
        worst = worst.max((det - p).norm() / (1.0 + p.norm()));
    }
    out.push(CheckResult {
        name: "dimer-correspondence",
        residual: worst,
        tolerance: 1e-10,
    });

    if c.class_size() <= 16 {
        let z = unit_phase(&mut rng);
        let w = unit_phase(&mut rng);
        let by_matchings = fan_wu::matching_oracle(&c, &omega, z, w)?;
        let by_lu = fan_wu::kasteleyn_determinant(&c, &omega, z, w);
        out.push(CheckResult {
            name: "matching-oracle",
            residual: (by_matchings - by_lu).norm() / (1.0 + by_lu.norm()),
            tolerance: 1e-12,
        });
    }

    // Kramers-Wannier duality, unsigned and signed.
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let z = unit_phase(&mut rng);
        let w = unit_phase(&mut rng);
        worst = worst.max(fan_wu::duality_check(g, &x, z, w)?);
    }
    out.push(CheckResult {
        name: "duality",
        residual: worst,
        tolerance: 1e-10,
    });
    let signed = fan_wu::signed_duality_check(g, &x)?;
    out.push(CheckResult {
        name: "signed-duality",
        residual: signed.iter().cloned().fold(0.0, f64::max),
        tolerance: 1e-10,
    });

    // Cover product identity.
    let mut worst = 0.0f64;
    for (n, m) in [(2usize, 2usize), (2, 3)] {
        for _ in 0..2 {
            let z = unit_phase(&mut rng);
            let w = unit_phase(&mut rng);
            worst = worst.max(kac_ward::enlargement_product_check(g, &x, n, m, z, w));
        }
    }
    out.push(CheckResult {
        name: "cover-product",
        residual: worst,
        tolerance: 1e-10,
    });

    Ok(out)
}
