//! The exact observability identity of the two-speed system: the window
//! integral of the relaxation flux along the free flow equals a closed
//! Fourier expression, split into a dominant part weighted by the rate's
//! mean and a cross term that beats counter-propagating modes against the
//! rate's even harmonics.
//!
//! Run with: cargo run --release --example two_speed_identity

use kinetic_relax::goldstein_taylor::{GtState, GtSystem};
use kinetic_relax::sigma::CrossSection;
use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

fn main() -> kinetic_relax::Result<()> {
    let cutoff = 16;
    let m = 2 * cutoff + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(31);

    // Random positive rates: the identity holds exactly, so the honest
    // time quadrature must reproduce it to near machine precision.
    println!("random rates, identity vs. time quadrature");
    for trial in 0..5 {
        let samples: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..2.0)).collect();
        let system = GtSystem::new(CrossSection::from_samples(1, cutoff, &samples)?)?;
        let u: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let state = GtState::from_samples(cutoff, &u, &v)?;

        let t_final = 1 + trial % 3;
        let identity = system.observability_identity(&state, t_final as u32)?;
        let nt = system.exact_time_subintervals(cutoff, t_final as u32);
        let quadrature = system.observability_lhs(&state, t_final as f64, nt)?;
        println!(
            "  T = {t_final}: identity {:.10}  quadrature {:.10}  gap {:.2e}",
            identity.value,
            quadrature,
            (identity.value - quadrature).abs() / quadrature
        );
    }

    // A rate with a second harmonic activates the cross term.
    println!();
    println!("rate 1 + cos(4 pi x): the cross term is alive");
    let samples: Vec<f64> = (0..m)
        .map(|i| 1.0 + (2.0 * TAU * i as f64 / m as f64).cos())
        .collect();
    let system = GtSystem::new(CrossSection::from_samples(1, cutoff, &samples)?)?;
    let u: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let state = GtState::from_samples(cutoff, &u, &v)?;
    let identity = system.observability_identity(&state, 2)?;
    println!("  dominant {:.6}", identity.dominant);
    println!("  cross    {:+.6}", identity.cross);
    println!("  value    {:.6}", identity.value);
    println!(
        "  data energy (mass-imbalance part excluded) {:.6}",
        GtSystem::observability_rhs(&state)
    );
    Ok(())
}
