//! Built-in verification suites: fixed, seeded checks of the structural
//! identities the solvers rely on, printed one PASS/FAIL line each.
//!
//! Every check is deterministic — randomized draws use hard-coded seeds —
//! and the suites run sequentially in a fixed order, so two invocations of
//! the same build produce identical output. A suite passes only if every
//! one of its checks passes.

use std::io::Write;
use std::sync::Arc;

use nalgebra::DVector;
use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;

use crate::boltzmann::{self, CollisionKernelSpec, VelocityQuadrature};
use crate::error::Result;
use crate::flows;
use crate::goldstein_taylor::{GtState, GtSystem};
use crate::sigma::{self, CrossSection};
use crate::spectral::TorusSpectrum;
use crate::transport::{self, TransportConfig};

/// One verification suite name, as accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Exactness of the spectral transform and quadrature layer.
    Parseval,
    /// Abstract damped/free flow machinery: observability, balance, bounds.
    Lemmas,
    /// The exact two-speed observability identity.
    GtIdentity,
    /// Transport observability constants and decay regimes.
    TransportObs,
    /// Structural properties of the assembled collision form.
    BoltzmannStructure,
    /// Everything above, in order.
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = [
        "parseval",
        "lemmas",
        "gt-identity",
        "transport-obs",
        "boltzmann-structure",
        "all",
    ];

    pub fn parse(name: &str) -> Option<Suite> {
        match name {
            "parseval" => Some(Suite::Parseval),
            "lemmas" => Some(Suite::Lemmas),
            "gt-identity" => Some(Suite::GtIdentity),
            "transport-obs" => Some(Suite::TransportObs),
            "boltzmann-structure" => Some(Suite::BoltzmannStructure),
            "all" => Some(Suite::All),
            _ => None,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Suite::Parseval => "parseval",
            Suite::Lemmas => "lemmas",
            Suite::GtIdentity => "gt-identity",
            Suite::TransportObs => "transport-obs",
            Suite::BoltzmannStructure => "boltzmann-structure",
            Suite::All => "all",
        }
    }
}

/// Outcome of a single named check.
#[derive(Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Human-readable measured values behind the verdict.
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome { name, passed, detail }
}

/// Runs `suite`, writing one line per check to `out`; returns whether every
/// check passed. Errors are IO failures or a check that could not even be
/// set up (which counts as failure before it is reached).
pub fn run_suite(suite: Suite, out: &mut dyn Write) -> Result<bool> {
    let mut all = true;
    for (label, outcomes) in collect(suite)? {
        for oc in outcomes {
            all &= oc.passed;
            writeln!(
                out,
                "{} {}/{}: {}",
                if oc.passed { "PASS" } else { "FAIL" },
                label,
                oc.name,
                oc.detail
            )?;
        }
    }
    Ok(all)
}

fn collect(suite: Suite) -> Result<Vec<(&'static str, Vec<CheckOutcome>)>> {
    let singles = |s: Suite| -> Result<Vec<CheckOutcome>> {
        match s {
            Suite::Parseval => parseval_checks(),
            Suite::Lemmas => lemma_checks(),
            Suite::GtIdentity => gt_identity_checks(),
            Suite::TransportObs => transport_obs_checks(),
            Suite::BoltzmannStructure => boltzmann_structure_checks(),
            Suite::All => unreachable!("expanded below"),
        }
    };
    match suite {
        Suite::All => [
            Suite::Parseval,
            Suite::Lemmas,
            Suite::GtIdentity,
            Suite::TransportObs,
            Suite::BoltzmannStructure,
        ]
        .into_iter()
        .map(|s| Ok((s.label(), singles(s)?)))
        .collect(),
        s => Ok(vec![(s.label(), singles(s)?)]),
    }
}

fn random_samples(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn parseval_checks() -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut out = Vec::new();

    // The naive transform must invert exactly on its own grid.
    let mut worst_roundtrip = 0.0f64;
    for (dim, cutoff) in [(1usize, 16usize), (2, 5)] {
        let m = (2 * cutoff + 1).pow(dim as u32);
        let samples = random_samples(&mut rng, m);
        let spectrum = TorusSpectrum::from_samples(dim, cutoff, &samples)?;
        let back = spectrum.to_samples();
        for (a, b) in samples.iter().zip(&back) {
            worst_roundtrip = worst_roundtrip.max((a - b).abs());
        }
    }
    out.push(check(
        "transform-roundtrip",
        worst_roundtrip <= 1e-12,
        format!("max sample error {worst_roundtrip:.3e} (tol 1e-12)"),
    ));

    // Parseval: the mean square of the samples equals the coefficient energy.
    let mut worst_parseval = 0.0f64;
    for (dim, cutoff) in [(1usize, 16usize), (2, 5)] {
        let m = (2 * cutoff + 1).pow(dim as u32);
        let samples = random_samples(&mut rng, m);
        let spectrum = TorusSpectrum::from_samples(dim, cutoff, &samples)?;
        let sample_energy: f64 = samples.iter().map(|s| s * s).sum::<f64>() / m as f64;
        let coeff_energy = spectrum.l2_norm_sq();
        worst_parseval = worst_parseval
            .max((sample_energy - coeff_energy).abs() / coeff_energy.max(1e-300));
    }
    out.push(check(
        "parseval-identity",
        worst_parseval <= 1e-12,
        format!("worst relative gap {worst_parseval:.3e} (tol 1e-12)"),
    ));

    // Weighted quadrature on the padded grid is exact for band-limited
    // integrands: refining the grid must not change the value.
    let cutoff = 6;
    let sig = CrossSection::from_samples(
        1,
        cutoff,
        &random_samples(&mut rng, 2 * cutoff + 1)
            .iter()
            .map(|s| s + 1.5)
            .collect::<Vec<_>>(),
    )?;
    let field = TorusSpectrum::from_samples(1, cutoff, &random_samples(&mut rng, 2 * cutoff + 1))?;
    let m_exact = sigma::exact_quadrature_points(&sig, &field);
    let value = sigma::weighted_l2_sq(&sig, &field, m_exact);
    let refined = sigma::weighted_l2_sq(&sig, &field, 2 * m_exact + 1);
    let quad_gap = (value - refined).abs() / value.max(1e-300);
    out.push(check(
        "weighted-quadrature-exact",
        quad_gap <= 1e-12,
        format!("refinement moved the integral by {quad_gap:.3e} (tol 1e-12)"),
    ));

    // Advection is a phase shift: isometric and additive in time.
    let spectrum = TorusSpectrum::from_samples(1, 8, &random_samples(&mut rng, 17))?;
    let once = spectrum.advect([1.0, 0.0], 0.3).advect([1.0, 0.0], 0.45);
    let joint = spectrum.advect([1.0, 0.0], 0.75);
    let additive_gap: f64 = once
        .coeffs()
        .iter()
        .zip(joint.coeffs())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let iso_gap = (once.l2_norm_sq() - spectrum.l2_norm_sq()).abs() / spectrum.l2_norm_sq();
    let ok = additive_gap <= 1e-12 && iso_gap <= 1e-12;
    out.push(check(
        "advection-phase-shift",
        ok,
        format!("group gap {additive_gap:.3e}, isometry gap {iso_gap:.3e} (tol 1e-12)"),
    ));

    // The smoothing multiplier is a contraction that fixes the mean.
    let smoothed = spectrum.bessel_multiplier(2.0);
    let mean_fixed = (smoothed.mean() - spectrum.mean()).norm() <= 1e-15;
    let contracts = smoothed.l2_norm_sq() <= spectrum.l2_norm_sq() * (1.0 + 1e-15);
    out.push(check(
        "smoothing-multiplier",
        mean_fixed && contracts,
        format!(
            "mean preserved: {mean_fixed}, energy ratio {:.6}",
            smoothed.l2_norm_sq() / spectrum.l2_norm_sq()
        ),
    ));

    Ok(out)
}

fn lemma_checks() -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut out = Vec::new();
    let (t0, dt) = (2.0, 0.01);

    // The Gramian minimum really is a lower bound over random data.
    let mut worst_ratio = f64::INFINITY;
    for _ in 0..10 {
        let pair = flows::random_pair(6, &mut rng);
        let uniform = flows::uniform_observability_constant(&pair, t0, dt)?;
        for _ in 0..5 {
            let f0 = DVector::from_fn(6, |_, _| rng.gen_range(-1.0_f64..1.0));
            let per_datum = flows::observability_constant(&pair, &f0, t0, dt)?;
            if uniform > 0.0 {
                worst_ratio = worst_ratio.min(per_datum / uniform);
            }
        }
    }
    out.push(check(
        "uniform-constant-is-minimal",
        worst_ratio >= 1.0 - 1e-6,
        format!("smallest per-datum/uniform ratio {worst_ratio:.6} (needs >= 1)"),
    ));

    // Exact energy balance along the damped flow; the fine step keeps the
    // trapezoid error of the recorded dissipation below the tolerance.
    let mut worst_balance = 0.0f64;
    for _ in 0..3 {
        let pair = flows::random_pair(7, &mut rng);
        let f0 = DVector::from_fn(7, |_, _| rng.gen_range(-1.0_f64..1.0));
        let trace = flows::evolve_damped(&pair, &f0, 3.0, 5e-4)?;
        let e0 = trace.energies()[0];
        let e_end = *trace.energies().last().expect("nonempty trace");
        // The flow burns energy at twice the recorded damping form.
        let burned = 2.0 * trace.dissipation_integral();
        worst_balance = worst_balance.max((e0 - e_end - burned).abs() / e0);
    }
    out.push(check(
        "energy-balance",
        worst_balance <= 1e-6,
        format!("worst relative defect {worst_balance:.3e} (tol 1e-6)"),
    ));

    // Positive uniform observability forces verified exponential decay.
    let mut checked = 0;
    let mut verified = 0;
    for _ in 0..10 {
        let pair = flows::random_pair(5, &mut rng);
        let uniform = flows::uniform_observability_constant(&pair, t0, dt)?;
        if uniform >= 0.01 {
            checked += 1;
            let f0 = DVector::from_fn(5, |_, _| rng.gen_range(-1.0_f64..1.0));
            let cert = flows::decay_from_observability(&pair, &f0, t0, dt, 12.0)?;
            if cert.delta > 0.0 && cert.verified {
                verified += 1;
            }
        }
    }
    out.push(check(
        "observability-implies-decay",
        checked > 0 && verified == checked,
        format!("{verified}/{checked} observable pairs produced verified certificates"),
    ));

    // The summable-sequence envelope: bounded and monotone in the constant.
    let seq: Vec<f64> = (1..=200).map(|k| 1.0 / (k as f64).powi(2)).collect();
    let loose = flows::ammari_bound(&seq, 0.5, 1.0)?;
    let tight = flows::ammari_bound(&seq, 2.0, 1.0)?;
    let flat = flows::ammari_bound(&seq, 1.0, 0.0)?;
    let ok = loose.is_finite() && tight <= loose && flat.is_finite();
    out.push(check(
        "sequence-envelope",
        ok,
        format!("envelope constants {loose:.4} >= {tight:.4}, zeta=0 gives {flat:.4}"),
    ));

    Ok(out)
}

fn gt_identity_checks() -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut out = Vec::new();
    let cutoff = 12;
    let m = 2 * cutoff + 1;

    // Exact identity versus honest time quadrature, random rates and data.
    let mut worst_gap = 0.0f64;
    for trial in 0..10 {
        let sigma_samples: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..2.0)).collect();
        let section = CrossSection::from_samples(1, cutoff, &sigma_samples)?;
        let system = GtSystem::new(section)?;
        let state = GtState::from_samples(
            cutoff,
            &random_samples(&mut rng, m),
            &random_samples(&mut rng, m),
        )?;
        let t_final = 1 + (trial % 2) as u32;
        let identity = system.observability_identity(&state, t_final)?;
        let nt = system.exact_time_subintervals(cutoff, t_final);
        let quadrature = system.observability_lhs(&state, f64::from(t_final), nt)?;
        worst_gap = worst_gap
            .max((identity.value - quadrature).abs() / quadrature.max(1e-300));
    }
    out.push(check(
        "identity-matches-quadrature",
        worst_gap <= 1e-7,
        format!("worst relative gap {worst_gap:.3e} over 10 draws (tol 1e-7)"),
    ));

    // Constant rates kill the cross term.
    let section = CrossSection::constant(1, cutoff, 1.3)?;
    let system = GtSystem::new(section)?;
    let state = GtState::from_samples(
        cutoff,
        &random_samples(&mut rng, m),
        &random_samples(&mut rng, m),
    )?;
    let identity = system.observability_identity(&state, 2)?;
    let cross_ok = identity.cross.abs() <= 1e-12 * identity.value.abs().max(1.0);
    out.push(check(
        "constant-rate-no-cross-term",
        cross_ok,
        format!("cross term {:.3e} against value {:.3e}", identity.cross, identity.value),
    ));

    // A rate vanishing on half the circle still observes data supported in
    // the dead region: the flow carries everything through the support.
    let section = CrossSection::indicator(cutoff, 0.0, 0.5)?;
    let system = GtSystem::new(section)?;
    let bump: Vec<f64> = (0..m)
        .map(|i| {
            let x = i as f64 / m as f64;
            if x > 0.6 && x < 0.9 {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let state = GtState::from_samples(cutoff, &bump, &bump)?;
    let identity = system.observability_identity(&state, 1)?;
    let rhs = GtSystem::observability_rhs(&state);
    out.push(check(
        "vanishing-rate-still-observes",
        identity.value > 1e-3 * rhs,
        format!("identity value {:.6} vs data energy {:.6}", identity.value, rhs),
    ));

    // The free flow is isometric on the deviation energy.
    let drift = GtSystem::free_solution(&state, 0.37);
    let free_gap = (drift.energy() - state.energy()).abs() / state.energy();
    out.push(check(
        "free-flow-isometry",
        free_gap <= 1e-12,
        format!("relative energy drift {free_gap:.3e} (tol 1e-12)"),
    ));

    Ok(out)
}

fn transport_obs_checks() -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut out = Vec::new();

    // Unit rate: the normalized window integral approaches its predicted
    // long-horizon limit.
    let cutoff = 6;
    let grid = TransportConfig::default_grid(1, 7)?;
    let tc = TransportConfig::new(grid, CrossSection::constant(1, cutoff, 1.0)?, 0.0)?;
    let m = 2 * cutoff + 1;
    let spectra = (0..tc.grid().len())
        .map(|_| TorusSpectrum::from_samples(1, cutoff, &random_samples(&mut rng, m)))
        .collect::<Result<Vec<_>>>()?;
    let f0 = crate::spectral::KineticState::new(Arc::clone(tc.grid()), spectra);
    let t_final = 16.0;
    let lhs = tc.observability_lhs_plain(&f0, t_final, 1024)?;
    let asymptote = transport::unit_sigma_asymptote(&f0);
    let ratio = lhs / t_final / asymptote;
    out.push(check(
        "unit-rate-asymptote",
        (ratio - 1.0).abs() <= 0.1,
        format!("normalized window integral / limit = {ratio:.4} (tol 10%)"),
    ));

    // Strictly positive rates give exponential relaxation.
    let sig_samples: Vec<f64> = (0..m).map(|_| rng.gen_range(0.5..1.5)).collect();
    let tc_pos = TransportConfig::new(
        TransportConfig::default_grid(1, 5)?,
        CrossSection::from_samples(1, cutoff, &sig_samples)?,
        0.0,
    )?;
    let f0p = {
        let spectra = (0..tc_pos.grid().len())
            .map(|_| TorusSpectrum::from_samples(1, cutoff, &random_samples(&mut rng, m)))
            .collect::<Result<Vec<_>>>()?;
        crate::spectral::KineticState::new(Arc::clone(tc_pos.grid()), spectra)
    };
    let (_, trace) = tc_pos.evolve_plain(&f0p, 12.0, 0.01, 10)?;
    let energy = trace.energy_trace();
    let fit = crate::analysis::fit_exponential(&energy, energy.default_window())?;
    out.push(check(
        "positive-rate-exponential-decay",
        fit.rate > 0.0 && fit.r_squared >= 0.95,
        format!("rate {:.4}, r^2 {:.5}", fit.rate, fit.r_squared),
    ));

    // Weak damping: smoothed-norm growth stays essentially linear and the
    // energy tail decays at least like 1/t.
    let cutoff_w = 6;
    let mw = 2 * cutoff_w + 1;
    let tc_weak = TransportConfig::new(
        TransportConfig::default_grid(1, 5)?,
        CrossSection::constant(1, cutoff_w, 1.0)?,
        0.5,
    )?;
    let f0w = {
        let spectra = (0..tc_weak.grid().len())
            .map(|_| TorusSpectrum::from_samples(1, cutoff_w, &random_samples(&mut rng, mw)))
            .collect::<Result<Vec<_>>>()?;
        crate::spectral::KineticState::new(Arc::clone(tc_weak.grid()), spectra)
    };
    let (_, trace_w) = tc_weak.evolve_weak(&f0w, 60.0, 0.05, 20)?;
    let (degree, bounded) = transport::sobolev_growth_check(&trace_w.times, &trace_w.sobolev)?;
    out.push(check(
        "weak-growth-degree",
        bounded,
        format!("smoothed-norm growth degree {degree:.4} (needs <= 1.1)"),
    ));
    let energy_w = trace_w.energy_trace();
    let slope = crate::analysis::tail_log_log_slope(&energy_w, 0.5)?;
    out.push(check(
        "weak-tail-slope",
        slope <= -1.0,
        format!("log-log tail slope {slope:.4} (needs <= -1)"),
    ));

    Ok(out)
}

fn boltzmann_structure_checks() -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    let quad = Arc::new(VelocityQuadrature::new(4.0, 0.5, 8)?);
    let spec = CollisionKernelSpec::power_law(0.5, 0.5)?;
    let op = boltzmann::assemble_dirichlet_form(&spec, Arc::clone(&quad))?;

    // Bit-exact symmetry of the assembled form.
    let q = op.q();
    let mut symmetric = true;
    for i in 0..q.nrows() {
        for j in (i + 1)..q.ncols() {
            if q[(i, j)] != q[(j, i)] {
                symmetric = false;
            }
        }
    }
    out.push(check(
        "gram-symmetry-exact",
        symmetric,
        String::from("Q equals its transpose entry for entry"),
    ));

    out.push(check(
        "gram-positive-semidefinite",
        op.min_eigenvalue() >= -1e-10,
        format!("smallest eigenvalue {:.3e} (tol -1e-10)", op.min_eigenvalue()),
    ));

    // Collision invariants sit in the kernel of the form.
    let profiles = boltzmann::InvariantBasis::raw_profiles(&quad);
    let median = {
        let mut rng = ChaCha8Rng::seed_from_u64(505);
        let mut quotients: Vec<f64> = (0..32)
            .map(|_| {
                let x = DVector::from_fn(quad.len(), |_, _| rng.gen_range(-1.0_f64..1.0));
                op.rayleigh_quotient(&x)
            })
            .collect();
        quotients.sort_by(f64::total_cmp);
        quotients[quotients.len() / 2]
    };
    let worst_invariant = profiles
        .iter()
        .map(|p| op.rayleigh_quotient(p))
        .fold(0.0f64, f64::max);
    out.push(check(
        "invariants-near-kernel",
        worst_invariant <= 1e-2 * median,
        format!("worst invariant quotient {worst_invariant:.3e} vs typical {median:.3e}"),
    ));

    // Constant kernel: the collision frequency collapses to a constant with
    // a closed-form value (full circle of angles times the captured mass).
    let unit = CollisionKernelSpec::power_law(0.0, 0.0)?;
    let (nu, _) = boltzmann::collision_frequency(&unit, &quad);
    let expected = std::f64::consts::TAU * quad.maxwellian_mass();
    let worst_nu = nu
        .iter()
        .map(|v| (v - expected).abs() / expected)
        .fold(0.0f64, f64::max);
    out.push(check(
        "constant-kernel-frequency",
        worst_nu <= 1e-6,
        format!("worst relative gap to 2*pi*mass: {worst_nu:.3e} (tol 1e-6)"),
    ));

    // The near/far split partitions the form exactly.
    let split = boltzmann::epsilon_split(&spec, &quad, 0.5)?;
    let defect = split.partition_defect(q);
    out.push(check(
        "split-partitions-exactly",
        defect <= 1e-12,
        format!("max entrywise partition defect {defect:.3e} (tol 1e-12)"),
    ));

    // Energy balance along the collisional flow.
    let f0 = boltzmann::random_fluctuation(&quad, 1, 606);
    let (_, trace) = op.evolve(&f0, 0.25, 2.5e-4, 1)?;
    let h0 = trace.h_values[0];
    let h_end = *trace.h_values.last().expect("nonempty trace");
    let burned = crate::analysis::integrate_series(
        &trace.times,
        &trace.dissipation,
        trace.times[0],
        *trace.times.last().expect("nonempty trace"),
    );
    let balance = (h0 - h_end - 2.0 * burned).abs() / h0;
    out.push(check(
        "collision-energy-balance",
        balance <= 1e-6,
        format!("relative defect {balance:.3e} (tol 1e-6)"),
    ));

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_name_parses_and_back() {
        for name in Suite::NAMES {
            let suite = Suite::parse(name).expect("listed names parse");
            if suite != Suite::All {
                assert_eq!(suite.label(), name);
            }
        }
        assert!(Suite::parse("spectral").is_none());
    }

    #[test]
    fn fast_suites_pass_and_print_one_line_per_check() {
        for suite in [Suite::Parseval, Suite::GtIdentity] {
            let mut buf = Vec::new();
            let ok = run_suite(suite, &mut buf).unwrap();
            let text = String::from_utf8(buf).unwrap();
            assert!(ok, "suite failed:\n{text}");
            assert!(text.lines().count() >= 4);
            for line in text.lines() {
                assert!(line.starts_with("PASS "), "unexpected line: {line}");
            }
        }
    }

    #[test]
    fn lemma_suite_passes() {
        let mut buf = Vec::new();
        let ok = run_suite(Suite::Lemmas, &mut buf).unwrap();
        assert!(ok, "{}", String::from_utf8_lossy(&buf));
    }
}
