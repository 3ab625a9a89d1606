//! The two-speed relaxation system on the circle.
//!
//! Two counter-propagating densities exchange mass through a nonnegative
//! cross-section `sigma(x)`:
//!
//! ```text
//!     du/dt + du/dx = sigma(x) (v - u)
//!     dv/dt - dv/dx = sigma(x) (u - v)
//! ```
//!
//! The total mass `integral (u + v) dx` is conserved and the pair relaxes
//! towards the flat state `u = v = (1/2) integral (u0 + v0) dx` whenever
//! `sigma` is not identically zero. Steps are Strang splits of exact
//! sub-flows: advection shifts Fourier modes by unit phases, and the
//! relaxation ODE is solved pointwise on the collocation grid (the sum
//! `u + v` is invariant there while the difference is damped by
//! `exp(-2 sigma(x) dt)`), so mass conservation and energy monotonicity
//! hold to roundoff.
//!
//! For the *free* flow (cross-section suppressed) the weighted defect
//! integral over whole periods collapses to a closed form in Fourier
//! coefficients; [`observability_identity`](GtSystem::observability_identity)
//! evaluates it exactly, split into its sigma-mean part and a cross term
//! that couples counter-propagating modes through the even Fourier modes of
//! `sigma`.

use num_complex::Complex64;

use crate::analysis::EnergyTrace;
use crate::error::{Error, Result};
use crate::sigma::{self, CrossSection};
use crate::spectral::TorusSpectrum;

/// State of the two-speed system at one instant.
#[derive(Debug, Clone)]
pub struct GtState {
    pub u: TorusSpectrum,
    pub v: TorusSpectrum,
    pub time: f64,
}

impl GtState {
    pub fn new(u: TorusSpectrum, v: TorusSpectrum) -> Result<Self> {
        if u.dim() != 1 || v.dim() != 1 {
            return Err(Error::InvalidInput(
                "the two-speed system lives on the one-dimensional torus".into(),
            ));
        }
        if u.cutoff() != v.cutoff() {
            return Err(Error::InvalidInput(
                "both densities must share one spectral cutoff".into(),
            ));
        }
        Ok(GtState { u, v, time: 0.0 })
    }

    /// Builds the state from real collocation samples of both densities.
    pub fn from_samples(cutoff: usize, u: &[f64], v: &[f64]) -> Result<Self> {
        Self::new(
            TorusSpectrum::from_samples(1, cutoff, u)?,
            TorusSpectrum::from_samples(1, cutoff, v)?,
        )
    }

    pub fn cutoff(&self) -> usize {
        self.u.cutoff()
    }

    /// Conserved total mass `integral (u + v) dx`.
    pub fn mass(&self) -> f64 {
        (self.u.mean() + self.v.mean()).re
    }

    /// The flat profile value both densities relax towards.
    pub fn asymptotic_profile(&self) -> f64 {
        0.5 * self.mass()
    }

    /// Energy relative to the asymptotic profile:
    /// `||u - p||^2 + ||v - p||^2` with `p` the flat limit.
    pub fn energy(&self) -> f64 {
        let p = Complex64::new(self.asymptotic_profile(), 0.0);
        let center = |s: &TorusSpectrum| {
            s.l2_norm_sq() - s.mean().norm_sqr() + (s.mean() - p).norm_sqr()
        };
        center(&self.u) + center(&self.v)
    }

    /// Worst conjugate-symmetry defect of the two densities.
    pub fn reality_defect(&self) -> f64 {
        self.u.reality_defect().max(self.v.reality_defect())
    }
}

/// Sampled history of one evolution run.
#[derive(Debug, Clone)]
pub struct GtTrace {
    pub times: Vec<f64>,
    pub energies: Vec<f64>,
    pub masses: Vec<f64>,
    /// Instantaneous relaxation flux `integral sigma (u - v)^2 dx`; the
    /// energy dissipates at twice this rate.
    pub relax_flux: Vec<f64>,
}

impl GtTrace {
    pub fn energy_trace(&self) -> EnergyTrace {
        EnergyTrace::new(self.times.clone(), self.energies.clone())
            .expect("simulation samples are ordered")
            .with_dissipation(self.relax_flux.clone())
            .expect("matching series lengths")
    }
}

/// Exact closed form of the free-flow observability integral over whole
/// periods, split into its parts.
#[derive(Debug, Clone, Copy)]
pub struct GtIdentity {
    /// The full value of `integral_0^T integral sigma (phi - psi)^2 dx dt`.
    pub value: f64,
    /// `T * integral(sigma) * (sum_{n != 0} (|a_n|^2 + |b_n|^2) + (a_0 - b_0)^2)`,
    /// the part weighted by the sigma mean alone.
    pub dominant: f64,
    /// `-2T * Re sum_{n != 0} a_n b_n sigma_hat(-2n)`: counter-propagating
    /// modes beat against the even modes of sigma. Vanishes for constant
    /// sigma and whenever `a_n b_n = 0` for every `n != 0`.
    pub cross: f64,
}

/// The two-speed system for one fixed cross-section.
#[derive(Debug, Clone)]
pub struct GtSystem {
    sigma: CrossSection,
}

/// One prepared step size: cached pointwise damping factors.
#[derive(Debug, Clone)]
pub struct GtStepper {
    dt: f64,
    damp: Vec<f64>,
}

impl GtSystem {
    pub fn new(sigma: CrossSection) -> Result<Self> {
        if sigma.dim() != 1 {
            return Err(Error::InvalidInput(
                "the two-speed system needs a one-dimensional cross-section".into(),
            ));
        }
        Ok(GtSystem { sigma })
    }

    pub fn sigma(&self) -> &CrossSection {
        &self.sigma
    }

    fn check_state(&self, state: &GtState) -> Result<()> {
        if state.cutoff() != self.sigma.cutoff() {
            return Err(Error::InvalidInput(format!(
                "state cutoff {} does not match cross-section cutoff {}",
                state.cutoff(),
                self.sigma.cutoff()
            )));
        }
        Ok(())
    }

    /// Prepares a stepper for one step size (`exp(-2 sigma dt)` cached on
    /// the collocation grid).
    pub fn stepper(&self, dt: f64) -> Result<GtStepper> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidInput("step size must be positive".into()));
        }
        let damp = self
            .sigma
            .samples()
            .iter()
            .map(|&s| (-2.0 * s * dt).exp())
            .collect();
        Ok(GtStepper { dt, damp })
    }

    /// Runs the damped system over `[0, t]`, sampling energy, mass and
    /// relaxation flux every `sample_every` steps (and always at the ends).
    pub fn evolve(
        &self,
        state0: &GtState,
        t: f64,
        dt: f64,
        sample_every: usize,
    ) -> Result<(GtState, GtTrace)> {
        self.check_state(state0)?;
        if !(t > 0.0 && t.is_finite() && dt > 0.0 && dt <= t) {
            return Err(Error::InvalidInput("evolution needs 0 < dt <= t".into()));
        }
        let stepper = self.stepper(dt)?;
        let every = sample_every.max(1);
        let steps = (t / dt).round().max(1.0) as usize;
        let mut trace = GtTrace {
            times: Vec::new(),
            energies: Vec::new(),
            masses: Vec::new(),
            relax_flux: Vec::new(),
        };
        let mut state = state0.clone();
        self.record(&state, &mut trace)?;
        for s in 1..=steps {
            state = stepper.step(&state);
            if s % every == 0 || s == steps {
                self.record(&state, &mut trace)?;
            }
        }
        Ok((state, trace))
    }

    fn record(&self, state: &GtState, trace: &mut GtTrace) -> Result<()> {
        let e = state.energy();
        if !e.is_finite() {
            return Err(Error::Numerical(format!(
                "two-speed energy became non-finite at t = {}",
                state.time
            )));
        }
        trace.times.push(state.time);
        trace.energies.push(e);
        trace.masses.push(state.mass());
        let diff = state.u.add_scaled(&state.v, -1.0);
        let m = sigma::exact_quadrature_points(&self.sigma, &diff);
        trace.relax_flux.push(sigma::weighted_l2_sq(&self.sigma, &diff, m));
        Ok(())
    }

    /// The free flow from `state0` evaluated at time `t` (relaxation
    /// suppressed): both densities advect rigidly.
    pub fn free_solution(state0: &GtState, t: f64) -> GtState {
        GtState {
            u: state0.u.advect([1.0, 0.0], t),
            v: state0.v.advect([-1.0, 0.0], t),
            time: state0.time + t,
        }
    }

    /// Time-quadrature of `integral sigma (phi - psi)^2 dx` along the free
    /// flow over `[0, T]`, with `nt` trapezoid subintervals.
    ///
    /// The spatial integral uses a zero-padded grid and is exact; the time
    /// integrand is a trigonometric polynomial of degree `<= 2 N` in `t`
    /// with unit period, so for whole-period horizons any `nt` with
    /// `nt / T >= 2 N + 1` makes the time quadrature exact as well.
    pub fn observability_lhs(&self, state0: &GtState, t_final: f64, nt: usize) -> Result<f64> {
        self.check_state(state0)?;
        if state0.reality_defect() > crate::spectral::REALITY_TOL {
            return Err(Error::InvalidInput(
                "observability integrals expect real densities".into(),
            ));
        }
        if !(t_final > 0.0 && t_final.is_finite()) || nt == 0 {
            return Err(Error::InvalidInput(
                "observability quadrature needs t_final > 0 and nt >= 1".into(),
            ));
        }
        let dt = t_final / nt as f64;
        let mut acc = 0.0;
        for i in 0..=nt {
            let s = Self::free_solution(state0, i as f64 * dt);
            let diff = s.u.add_scaled(&s.v, -1.0);
            let m = sigma::exact_quadrature_points(&self.sigma, &diff);
            let val = sigma::weighted_l2_sq(&self.sigma, &diff, m);
            let w = if i == 0 || i == nt { 0.5 } else { 1.0 };
            acc += w * val;
        }
        Ok(acc * dt)
    }

    /// Trapezoid subinterval count that makes [`observability_lhs`]
    /// (Self::observability_lhs) exact for a whole-period horizon.
    pub fn exact_time_subintervals(&self, cutoff: usize, t_final: u32) -> usize {
        t_final as usize * (2 * cutoff + 2)
    }

    /// Exact closed form of the free-flow observability integral for a
    /// whole-period horizon `T`, from Fourier data alone.
    pub fn observability_identity(&self, state0: &GtState, t_final: u32) -> Result<GtIdentity> {
        self.check_state(state0)?;
        if state0.reality_defect() > crate::spectral::REALITY_TOL {
            return Err(Error::InvalidInput(
                "the closed form expects real densities".into(),
            ));
        }
        if t_final == 0 {
            return Err(Error::InvalidInput("horizon must be a positive integer".into()));
        }
        let t = t_final as f64;
        let sigma_mean = self.sigma.integral();
        let a0 = state0.u.mean().re;
        let b0 = state0.v.mean().re;
        let mut tail = 0.0;
        let mut cross_sum = Complex64::new(0.0, 0.0);
        for (n, a_n) in state0.u.modes() {
            if n[0] == 0 {
                continue;
            }
            let b_n = state0.v.coeff(n);
            tail += a_n.norm_sqr() + b_n.norm_sqr();
            // Counter-propagating phases cancel only pairwise; the leftover
            // carries the spatial factor exp(i 4 pi n x) and picks out the
            // sigma coefficient at mode -2n.
            let b_mirror = state0.v.coeff([-n[0], 0]).conj();
            let a_mirror = state0.u.coeff([-n[0], 0]).conj();
            cross_sum += (a_n * b_mirror + b_n * a_mirror) * self.sigma.fourier([-2 * n[0], 0]);
        }
        let dominant = t * sigma_mean * (tail + (a0 - b0) * (a0 - b0));
        let cross = -t * cross_sum.re;
        Ok(GtIdentity {
            value: dominant + cross,
            dominant,
            cross,
        })
    }

    /// `sum_{n != 0} (|a_n|^2 + |b_n|^2)`: the mean-free Fourier energy of
    /// the data that the free-flow observability integral controls.
    pub fn observability_rhs(state0: &GtState) -> f64 {
        let mut acc = 0.0;
        for (n, a_n) in state0.u.modes() {
            if n[0] != 0 {
                acc += a_n.norm_sqr() + state0.v.coeff(n).norm_sqr();
            }
        }
        acc
    }
}

impl GtStepper {
    /// One Strang step: half advection, exact pointwise relaxation, half
    /// advection.
    pub fn step(&self, state: &GtState) -> GtState {
        let half = self.dt / 2.0;
        let u = state.u.advect([1.0, 0.0], half);
        let v = state.v.advect([-1.0, 0.0], half);

        // Relaxation in collocation space: u + v is pointwise invariant,
        // u - v is damped by exp(-2 sigma dt).
        let us = u.to_complex_samples();
        let vs = v.to_complex_samples();
        let m = us.len();
        let mut next_u = Vec::with_capacity(m);
        let mut next_v = Vec::with_capacity(m);
        for j in 0..m {
            let s = us[j] + vs[j];
            let w = (us[j] - vs[j]) * self.damp[j];
            next_u.push((s + w) * 0.5);
            next_v.push((s - w) * 0.5);
        }
        let cutoff = state.cutoff();
        let u = TorusSpectrum::from_complex_samples(1, cutoff, &next_u)
            .expect("collocation samples stay well-formed");
        let v = TorusSpectrum::from_complex_samples(1, cutoff, &next_v)
            .expect("collocation samples stay well-formed");

        GtState {
            u: u.advect([1.0, 0.0], half),
            v: v.advect([-1.0, 0.0], half),
            time: state.time + self.dt,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng as _, SeedableRng as _};
    use rand_chacha::ChaCha8Rng;

    fn random_state(cutoff: usize, seed: u64) -> GtState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = 2 * cutoff + 1;
        let u: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        GtState::from_samples(cutoff, &u, &v).unwrap()
    }

    fn random_sigma(cutoff: usize, seed: u64) -> CrossSection {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = 2 * cutoff + 1;
        let s: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..2.0)).collect();
        CrossSection::from_samples(1, cutoff, &s).unwrap()
    }

    #[test]
    fn mass_is_conserved_to_roundoff() {
        let system = GtSystem::new(CrossSection::indicator(8, 0.1, 0.6).unwrap()).unwrap();
        let state = random_state(8, 1);
        let mass0 = state.mass();
        let (final_state, trace) = system.evolve(&state, 2.0, 1e-2, 10).unwrap();
        for m in &trace.masses {
            assert!((m - mass0).abs() < 1e-12, "mass drift {}", (m - mass0).abs());
        }
        assert!((final_state.mass() - mass0).abs() < 1e-12);
    }

    #[test]
    fn energy_decreases_monotonically() {
        let system = GtSystem::new(random_sigma(8, 2)).unwrap();
        let state = random_state(8, 3);
        let (_, trace) = system.evolve(&state, 3.0, 5e-3, 5).unwrap();
        for w in trace.energies.windows(2) {
            assert!(w[1] <= w[0] + 1e-10, "energy increased {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn reality_is_preserved_along_the_flow() {
        let system = GtSystem::new(random_sigma(6, 4)).unwrap();
        let state = random_state(6, 5);
        let (final_state, _) = system.evolve(&state, 1.0, 1e-2, 1).unwrap();
        assert!(final_state.reality_defect() < 1e-10);
    }

    #[test]
    fn zero_cross_section_reduces_to_free_transport() {
        let system = GtSystem::new(CrossSection::constant(1, 6, 0.0).unwrap()).unwrap();
        let state = random_state(6, 6);
        let stepper = system.stepper(0.25).unwrap();
        let mut evolved = state.clone();
        for _ in 0..8 {
            evolved = stepper.step(&evolved);
        }
        let free = GtSystem::free_solution(&state, 2.0);
        for (a, b) in evolved.u.coeffs().iter().zip(free.u.coeffs()) {
            assert!((a - b).norm() < 1e-12);
        }
        for (a, b) in evolved.v.coeffs().iter().zip(free.v.coeffs()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn uniform_data_relaxes_with_the_scalar_closed_form() {
        // Spatially flat data: the mean mode obeys w(t) = w(0) exp(-2 c t).
        let c = 0.7;
        let system = GtSystem::new(CrossSection::constant(1, 4, c).unwrap()).unwrap();
        let state = GtState::from_samples(4, &[1.0; 9], &[0.0; 9]).unwrap();
        let (final_state, _) = system.evolve(&state, 1.5, 1e-3, 100).unwrap();
        let w = (-2.0 * c * 1.5_f64).exp();
        let expect_u = 0.5 * (1.0 + w);
        let expect_v = 0.5 * (1.0 - w);
        assert!((final_state.u.mean().re - expect_u).abs() < 1e-9);
        assert!((final_state.v.mean().re - expect_v).abs() < 1e-9);
    }

    #[test]
    fn splitting_converges_at_second_order() {
        let system = GtSystem::new(random_sigma(6, 7)).unwrap();
        let state = random_state(6, 8);
        let distance = |a: &GtState, b: &GtState| -> f64 {
            a.u.coeffs()
                .iter()
                .zip(b.u.coeffs())
                .chain(a.v.coeffs().iter().zip(b.v.coeffs()))
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        let (reference, _) = system.evolve(&state, 1.0, 1e-3 / 16.0, usize::MAX).unwrap();
        let (coarse, _) = system.evolve(&state, 1.0, 1e-3, usize::MAX).unwrap();
        let (halved, _) = system.evolve(&state, 1.0, 5e-4, usize::MAX).unwrap();
        let e1 = distance(&coarse, &reference);
        let e2 = distance(&halved, &reference);
        assert!(e1 < 1e-5, "coarse defect {e1:.3e}");
        let ratio = e1 / e2;
        assert!(
            (3.2..=4.8).contains(&ratio),
            "halving dt should quarter the defect, got ratio {ratio:.2}"
        );
    }

    #[test]
    fn relaxation_drives_both_densities_to_the_profile() {
        let system = GtSystem::new(CrossSection::constant(1, 8, 1.0).unwrap()).unwrap();
        let state = random_state(8, 9);
        let p = state.asymptotic_profile();
        let (final_state, trace) = system.evolve(&state, 60.0, 5e-3, 200).unwrap();
        assert!(trace.energies.last().unwrap() < &1e-8);
        assert!((final_state.u.mean().re - p).abs() < 1e-4);
        assert!((final_state.v.mean().re - p).abs() < 1e-4);
    }

    #[test]
    fn identity_matches_quadrature_for_random_draws() {
        for seed in 0..8 {
            let sigma = random_sigma(8, 100 + seed);
            let system = GtSystem::new(sigma).unwrap();
            let state = random_state(8, 200 + seed);
            for t_final in [1u32, 2] {
                let nt = system.exact_time_subintervals(8, t_final);
                let lhs = system.observability_lhs(&state, t_final as f64, nt).unwrap();
                let identity = system.observability_identity(&state, t_final).unwrap();
                assert!(
                    (lhs - identity.value).abs() <= 1e-9 * (1.0 + identity.value.abs()),
                    "identity defect {:.3e} (lhs {lhs}, value {})",
                    (lhs - identity.value).abs(),
                    identity.value
                );
            }
        }
    }

    #[test]
    fn identity_closed_forms_for_simple_data() {
        // sigma = 1, u0 = cos(2 pi x), v0 = 0, T = 1: the integral is
        // T * (|a_1|^2 + |a_{-1}|^2) = 1/2.
        let system = GtSystem::new(CrossSection::constant(1, 8, 1.0).unwrap()).unwrap();
        let u = TorusSpectrum::from_grid_fn(1, 8, |x| (2.0 * std::f64::consts::PI * x[0]).cos());
        let v = TorusSpectrum::zeros(1, 8);
        let state = GtState::new(u, v).unwrap();
        let id = system.observability_identity(&state, 1).unwrap();
        assert!((id.value - 0.5).abs() < 1e-12);
        assert!((id.dominant - 0.5).abs() < 1e-12);
        assert!(id.cross.abs() < 1e-12);
        assert!((GtSystem::observability_rhs(&state) - 0.5).abs() < 1e-12);

        // Mean-only data with sigma of mean 2, T = 3: value is
        // T * mean(sigma) * (a0 - b0)^2 = 3 * 2 * 1 = 6.
        let system2 = GtSystem::new(CrossSection::constant(1, 4, 2.0).unwrap()).unwrap();
        let state2 = GtState::from_samples(4, &[1.0; 9], &[0.0; 9]).unwrap();
        let id2 = system2.observability_identity(&state2, 3).unwrap();
        assert!((id2.value - 6.0).abs() < 1e-12);
    }

    #[test]
    fn cross_term_appears_for_resonant_sigma() {
        // sigma = 1 + cos(4 pi x) resonates with u0 = v0 = cos(2 pi x):
        // (phi - psi)(t, x) = 2 sin(2 pi x) sin(2 pi t), so the exact value
        // is T/2 while the sigma-mean part alone would give T.
        let sigma = CrossSection::from_samples(
            1,
            8,
            &(0..17)
                .map(|j| 1.0 + (4.0 * std::f64::consts::PI * j as f64 / 17.0).cos())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let system = GtSystem::new(sigma).unwrap();
        let w = TorusSpectrum::from_grid_fn(1, 8, |x| (2.0 * std::f64::consts::PI * x[0]).cos());
        let state = GtState::new(w.clone(), w).unwrap();
        for t_final in [1u32, 2, 4] {
            let id = system.observability_identity(&state, t_final).unwrap();
            let t = t_final as f64;
            assert!((id.dominant - t).abs() < 1e-12);
            assert!((id.cross + t / 2.0).abs() < 1e-12, "cross {}", id.cross);
            assert!((id.value - t / 2.0).abs() < 1e-12);
            let nt = system.exact_time_subintervals(8, t_final);
            let lhs = system.observability_lhs(&state, t, nt).unwrap();
            assert!((lhs - id.value).abs() < 1e-10);
        }
    }

    #[test]
    fn dominant_part_controls_the_mean_free_energy() {
        for seed in 0..30 {
            let sigma = random_sigma(6, 300 + seed);
            let system = GtSystem::new(sigma).unwrap();
            let state = random_state(6, 400 + seed);
            let id = system.observability_identity(&state, 2).unwrap();
            let rhs = GtSystem::observability_rhs(&state);
            let floor = 2.0 * system.sigma().integral() * rhs;
            assert!(
                id.dominant >= floor - 1e-12 * (1.0 + floor.abs()),
                "dominant {} below sigma-mean floor {}",
                id.dominant,
                floor
            );
        }
    }

    #[test]
    fn mismatched_cutoffs_are_rejected() {
        let system = GtSystem::new(CrossSection::constant(1, 4, 1.0).unwrap()).unwrap();
        let state = random_state(6, 10);
        assert!(system.evolve(&state, 1.0, 1e-2, 1).is_err());
        assert!(system.observability_lhs(&state, 1.0, 10).is_err());
    }
}
