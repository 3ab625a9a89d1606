//! Kinetic transport with full velocity relaxation: a strictly positive
//! rate yields exponential relaxation toward the global equilibrium, and
//! the normalized observability window integral of the free flow
//! approaches its predicted long-horizon limit.
//!
//! Run with: cargo run --release --example transport_relaxation

use kinetic_relax::analysis;
use kinetic_relax::sigma::CrossSection;
use kinetic_relax::spectral::{KineticState, TorusSpectrum};
use kinetic_relax::transport::{self, TransportConfig};
use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn random_state(tc: &TransportConfig, seed: u64) -> kinetic_relax::Result<KineticState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = 2 * tc.cutoff() + 1;
    let spectra = (0..tc.grid().len())
        .map(|_| {
            let samples: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            TorusSpectrum::from_samples(1, tc.cutoff(), &samples)
        })
        .collect::<kinetic_relax::Result<Vec<_>>>()?;
    Ok(KineticState::new(Arc::clone(tc.grid()), spectra))
}

fn main() -> kinetic_relax::Result<()> {
    let cutoff = 8;
    let grid = TransportConfig::default_grid(1, 9)?;

    // Exponential relaxation under a random strictly positive rate.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let m = 2 * cutoff + 1;
    let samples: Vec<f64> = (0..m).map(|_| rng.gen_range(0.5..1.5)).collect();
    let tc = TransportConfig::new(Arc::clone(&grid), CrossSection::from_samples(1, cutoff, &samples)?, 0.0)?;
    let f0 = random_state(&tc, 4)?;
    let (_, trace) = tc.evolve_plain(&f0, 16.0, 0.01, 50)?;
    let energy = trace.energy_trace();
    let fit = analysis::fit_exponential(&energy, energy.default_window())?;
    println!("random positive rate on 9 velocity nodes, band 8");
    println!("  energy rate {:.4}  (r^2 = {:.5})", fit.rate, fit.r_squared);

    // Unit rate: the window integral per unit time has a closed limit.
    let tc_unit = TransportConfig::new(grid, CrossSection::constant(1, cutoff, 1.0)?, 0.0)?;
    let g0 = random_state(&tc_unit, 5)?;
    let asymptote = transport::unit_sigma_asymptote(&g0);
    println!();
    println!("unit rate, free-flow window integral / (T * limit):");
    for t_final in [2.0, 4.0, 8.0, 16.0] {
        let nt = (64.0 * t_final) as usize;
        let lhs = tc_unit.observability_lhs_plain(&g0, t_final, nt)?;
        println!("  T = {t_final:>4}: {:.5}", lhs / t_final / asymptote);
    }
    println!("  limit value {asymptote:.6}");
    Ok(())
}
