//! Structure of the assembled collision form: the quadrature Gram matrix
//! is symmetric to the bit, positive semidefinite, annihilates the
//! collision invariants, and its diagonal collision frequency obeys the
//! power-law envelope whose measured lower constant feeds the
//! observability weights.
//!
//! Run with: cargo run --release --example collision_form

use kinetic_relax::boltzmann::{
    self, CollisionKernelSpec, InvariantBasis, VelocityQuadrature,
};
use nalgebra::DVector;
use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn main() -> kinetic_relax::Result<()> {
    let quad = Arc::new(VelocityQuadrature::new(4.0, 0.5, 8)?);
    let spec = CollisionKernelSpec::power_law(0.5, 0.5)?;
    println!(
        "kernel |v - v*|^0.5 on {} velocity nodes, {} angles",
        quad.len(),
        quad.omegas().len()
    );

    let op = boltzmann::assemble_dirichlet_form(&spec, Arc::clone(&quad))?;
    let q = op.q();
    let asymmetry = (0..q.nrows())
        .flat_map(|i| (0..i).map(move |j| (i, j)))
        .filter(|&(i, j)| q[(i, j)] != q[(j, i)])
        .count();
    println!("  asymmetric entry pairs   {asymmetry} (exact comparison)");
    println!("  smallest raw eigenvalue  {:.3e}", op.min_eigenvalue());
    println!("  dropped kernel mass      {:.3e}", op.dropped_fraction());

    // Collision invariants against typical directions.
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut typical: Vec<f64> = (0..32)
        .map(|_| {
            let x = DVector::from_fn(quad.len(), |_, _| rng.gen_range(-1.0_f64..1.0));
            op.rayleigh_quotient(&x)
        })
        .collect();
    typical.sort_by(f64::total_cmp);
    let median = typical[typical.len() / 2];
    println!("  typical Rayleigh quotient {median:.4e}");
    let names = ["mass", "momentum_x", "momentum_y", "energy"];
    for (name, profile) in names.iter().zip(InvariantBasis::raw_profiles(&quad)) {
        println!(
            "  invariant {name:<10} quotient {:.3e}",
            op.rayleigh_quotient(&profile)
        );
    }

    // Collision frequency and its envelope constant.
    let nu = op.nu();
    let (lo, hi) = nu
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    println!("  collision frequency      [{lo:.4}, {hi:.4}]");
    println!("  measured envelope floor  {:.4}", op.empirical_m1());
    Ok(())
}
