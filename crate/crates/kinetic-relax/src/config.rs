//! Experiment configuration: the versioned JSON schema, its validation
//! rules, and the resolution step that fills per-model defaults.
//!
//! A configuration file is parsed into [`RawConfig`] (every field
//! optional, unknown fields rejected) and then resolved into a concrete
//! [`ExperimentConfig`]. Resolution applies model-specific defaults,
//! range-checks every supplied value, and rejects fields that the chosen
//! model does not read, so a typo cannot silently change an experiment.
//! The resolved struct serializes back to JSON and is echoed verbatim
//! into every summary file as an audit trail.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sigma::CrossSection;

/// Version tag expected in the `schema` field of every config file.
pub const SCHEMA_VERSION: u32 = 1;

/// Which experiment the runner executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Two-speed relaxation system on the circle.
    Gt,
    /// Kinetic transport with full velocity-space relaxation.
    Transport,
    /// Transport with the weakened (negative-order smoothed) damping.
    Weak,
    /// Linearized collisional model on a velocity quadrature.
    Boltzmann,
    /// Random skew/damped operator pairs in finite dimension.
    Abstract,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Gt => "gt",
            Model::Transport => "transport",
            Model::Weak => "weak",
            Model::Boltzmann => "boltzmann",
            Model::Abstract => "abstract",
        }
    }
}

/// Named relaxation-rate profile on the torus.
///
/// `indicator` is first-class because rates vanishing on a set of positive
/// measure are the interesting regime for uniform observability; `custom`
/// accepts raw collocation samples for anything else.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SigmaProfile {
    /// `sigma(x) = value` everywhere.
    Constant { value: f64 },
    /// `1 + amplitude * cos(2 pi x)` (times the matching cosine in `y`
    /// for two-dimensional runs); needs `|amplitude| <= 1`.
    CosineBump { amplitude: f64 },
    /// `1` on `[support[0], support[1]]`, `0` elsewhere; one-dimensional.
    Indicator { support: [f64; 2] },
    /// Raw samples on the uniform collocation grid, row-major; the length
    /// must equal the grid size `(2N+1)^d` of the run.
    Custom { samples: Vec<f64> },
}

impl SigmaProfile {
    /// Builds the band-limited cross-section this profile describes on the
    /// `(2 cutoff + 1)^dim` collocation grid.
    pub fn build(&self, dim: usize, cutoff: usize) -> Result<CrossSection> {
        match self {
            SigmaProfile::Constant { value } => CrossSection::constant(dim, cutoff, *value),
            SigmaProfile::CosineBump { amplitude } => {
                CrossSection::cosine_bump(dim, cutoff, *amplitude)
            }
            SigmaProfile::Indicator { support } => {
                if dim != 1 {
                    return Err(Error::validation(
                        "sigma.support",
                        "indicator profile is one-dimensional; set d = 1",
                    ));
                }
                CrossSection::indicator(cutoff, support[0], support[1])
            }
            SigmaProfile::Custom { samples } => CrossSection::from_samples(dim, cutoff, samples),
        }
    }

    /// Validates the profile parameters without building the section.
    fn check(&self, field: &str, dim: usize, cutoff: usize) -> Result<()> {
        match self {
            SigmaProfile::Constant { value } => {
                if !(value.is_finite() && *value > 0.0) {
                    return Err(Error::validation(
                        &format!("{field}.value"),
                        "constant rate must be positive and finite",
                    ));
                }
            }
            SigmaProfile::CosineBump { amplitude } => {
                if !(amplitude.is_finite() && amplitude.abs() <= 1.0) {
                    return Err(Error::validation(
                        &format!("{field}.amplitude"),
                        "bump amplitude must lie in [-1, 1]",
                    ));
                }
            }
            SigmaProfile::Indicator { support } => {
                let [a, b] = *support;
                if !(a.is_finite() && b.is_finite() && (0.0..1.0).contains(&a) && a < b && b <= 1.0)
                {
                    return Err(Error::validation(
                        &format!("{field}.support"),
                        "support must satisfy 0 <= a < b <= 1",
                    ));
                }
                if dim != 1 {
                    return Err(Error::validation(
                        &format!("{field}.support"),
                        "indicator profile is one-dimensional; set d = 1",
                    ));
                }
            }
            SigmaProfile::Custom { samples } => {
                let m = 2 * cutoff + 1;
                let want = m.pow(dim as u32);
                if samples.len() != want {
                    return Err(Error::validation(
                        &format!("{field}.samples"),
                        format!("expected {want} samples for n = {cutoff}, d = {dim}"),
                    ));
                }
                if samples.iter().any(|s| !s.is_finite() || *s < 0.0) {
                    return Err(Error::validation(
                        &format!("{field}.samples"),
                        "samples must be finite and nonnegative",
                    ));
                }
                if samples.iter().all(|s| *s == 0.0) {
                    return Err(Error::validation(
                        &format!("{field}.samples"),
                        "rate must not vanish identically",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Velocity-space quadrature parameters for the collisional model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureParams {
    /// Half-width of the velocity box `[-v_max, v_max]^2`.
    pub v_max: f64,
    /// Cell width; the box is tiled by cells of area `h^2`.
    pub h: f64,
    /// Number of uniform deflection angles.
    pub n_omega: usize,
}

impl Default for QuadratureParams {
    fn default() -> Self {
        QuadratureParams {
            v_max: 6.0,
            h: 0.5,
            n_omega: 16,
        }
    }
}

/// A configuration file exactly as written: every field optional, no
/// defaults applied yet. Unknown keys are a hard parse error.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub schema: Option<u32>,
    pub model: Option<Model>,
    pub sigma: Option<SigmaProfile>,
    /// Spectral cutoff: modes `|n_i| <= n` are retained.
    pub n: Option<usize>,
    /// Spatial dimension of the torus (1 or 2).
    pub d: Option<usize>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    /// Record every this-many steps into the trace (endpoints always kept).
    pub sample_every: Option<usize>,
    /// Damping weakening exponent; `0` is full damping.
    pub epsilon: Option<f64>,
    /// Collision-frequency lower-bound exponent.
    pub alpha: Option<f64>,
    /// Relative-speed exponent of the collision kernel.
    pub beta: Option<f64>,
    /// Use the angle-weighted kernel variant instead of the pure power law.
    pub angular_weight: Option<bool>,
    pub quadrature: Option<QuadratureParams>,
    /// Velocity nodes per axis for the transport models.
    pub nodes_per_axis: Option<usize>,
    /// State dimension for the abstract operator-pair model.
    pub size: Option<usize>,
    /// Window length for windowed decay analysis.
    pub window: Option<f64>,
    /// Exponent triple `(k1, k2, k3)` for polynomial-decay certification.
    pub moment_exponents: Option<[f64; 3]>,
    pub seed: Option<u64>,
    /// Output path prefix; artifacts are `<prefix>_trace.csv` and
    /// `<prefix>_summary.json`.
    pub prefix: Option<String>,
}

/// A fully resolved experiment: defaults filled, every value range-checked.
/// Fields that the chosen model does not read stay `None` and are omitted
/// from the serialized echo.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub model: Model,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<SigmaProfile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    pub dt: f64,
    pub t_final: f64,
    pub sample_every: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angular_weight: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes_per_axis: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moment_exponents: Option<[f64; 3]>,
    pub seed: u64,
    pub prefix: String,
}

impl ExperimentConfig {
    pub fn trace_path(&self) -> String {
        format!("{}_trace.csv", self.prefix)
    }

    pub fn summary_path(&self) -> String {
        format!("{}_summary.json", self.prefix)
    }

    /// Number of time steps the run will take.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round().max(1.0) as usize
    }
}

/// Parses a configuration file, reporting the JSON path of the offending
/// key on failure (unknown fields, wrong types, malformed syntax).
pub fn parse(text: &str) -> Result<RawConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    match serde_path_to_error::deserialize(de) {
        Ok(raw) => Ok(raw),
        Err(err) => {
            let path = err.path().to_string();
            let field = if path == "." { String::from("<root>") } else { path };
            Err(Error::Validation {
                field,
                message: err.inner().to_string(),
            })
        }
    }
}

fn forbid<T>(value: &Option<T>, field: &str, model: Model) -> Result<()> {
    if value.is_some() {
        return Err(Error::validation(
            field,
            format!("not used by model `{}`", model.name()),
        ));
    }
    Ok(())
}

fn require_positive(value: f64, field: &str) -> Result<f64> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::validation(field, "must be positive and finite"));
    }
    Ok(value)
}

/// Largest divisor of `steps` not exceeding `at_most`.
fn aligned_sample_every(steps: usize, at_most: usize) -> usize {
    let cap = at_most.clamp(1, steps);
    (1..=cap).rev().find(|c| steps % c == 0).unwrap_or(1)
}

impl RawConfig {
    /// Fills model defaults and validates every field, producing a concrete
    /// experiment description. All failures are `Validation` errors naming
    /// the offending field.
    pub fn resolve(self) -> Result<ExperimentConfig> {
        match self.schema {
            Some(SCHEMA_VERSION) => {}
            Some(other) => {
                return Err(Error::validation(
                    "schema",
                    format!("unsupported schema version {other}; this build reads version {SCHEMA_VERSION}"),
                ))
            }
            None => {
                return Err(Error::validation(
                    "schema",
                    format!("missing; set \"schema\": {SCHEMA_VERSION}"),
                ))
            }
        }
        let model = self.model.ok_or_else(|| {
            Error::validation(
                "model",
                "missing; one of gt | transport | weak | boltzmann | abstract",
            )
        })?;
        match model {
            Model::Gt => self.resolve_gt(),
            Model::Transport | Model::Weak => self.resolve_transport(model),
            Model::Boltzmann => self.resolve_boltzmann(),
            Model::Abstract => self.resolve_abstract(),
        }
    }

    /// Time-grid fields shared by every model.
    fn time_grid(&self, default_dt: f64, default_t: f64) -> Result<(f64, f64)> {
        let dt = require_positive(self.dt.unwrap_or(default_dt), "dt")?;
        let t_final = require_positive(self.t_final.unwrap_or(default_t), "t_final")?;
        if dt > t_final {
            return Err(Error::validation("dt", "must not exceed t_final"));
        }
        Ok((dt, t_final))
    }

    fn base(&self, model: Model, dt: f64, t_final: f64) -> ExperimentConfig {
        ExperimentConfig {
            schema: SCHEMA_VERSION,
            model,
            sigma: None,
            n: None,
            d: None,
            dt,
            t_final,
            sample_every: 1,
            epsilon: None,
            alpha: None,
            beta: None,
            angular_weight: None,
            quadrature: None,
            nodes_per_axis: None,
            size: None,
            window: None,
            moment_exponents: None,
            seed: self.seed.unwrap_or(0),
            prefix: self.prefix.clone().unwrap_or_else(|| String::from("run")),
        }
    }

    fn default_sample_every(steps: usize, requested: Option<usize>) -> Result<usize> {
        match requested {
            Some(0) => Err(Error::validation("sample_every", "must be at least 1")),
            Some(k) => Ok(k),
            None => Ok((steps / 512).max(1)),
        }
    }

    fn check_dimension(&self, allowed: &[usize], fallback: usize) -> Result<usize> {
        let d = self.d.unwrap_or(fallback);
        if !allowed.contains(&d) {
            return Err(Error::validation(
                "d",
                format!(
                    "must be one of {:?} for model `{}`",
                    allowed,
                    self.model.map_or("?", Model::name)
                ),
            ));
        }
        Ok(d)
    }

    fn check_cutoff(&self, default_n: usize, minimum: usize) -> Result<usize> {
        let n = self.n.unwrap_or(default_n);
        if n < minimum {
            return Err(Error::validation(
                "n",
                format!("spectral cutoff must be at least {minimum}"),
            ));
        }
        if n > 4096 {
            return Err(Error::validation("n", "spectral cutoff above 4096 is not supported"));
        }
        Ok(n)
    }

    fn resolve_gt(self) -> Result<ExperimentConfig> {
        let model = Model::Gt;
        forbid(&self.epsilon, "epsilon", model)?;
        forbid(&self.alpha, "alpha", model)?;
        forbid(&self.beta, "beta", model)?;
        forbid(&self.angular_weight, "angular_weight", model)?;
        forbid(&self.quadrature, "quadrature", model)?;
        forbid(&self.nodes_per_axis, "nodes_per_axis", model)?;
        forbid(&self.size, "size", model)?;
        forbid(&self.window, "window", model)?;
        forbid(&self.moment_exponents, "moment_exponents", model)?;
        let d = self.check_dimension(&[1], 1)?;
        let n = self.check_cutoff(16, 1)?;
        let sigma = self
            .sigma
            .clone()
            .unwrap_or(SigmaProfile::Constant { value: 1.0 });
        sigma.check("sigma", d, n)?;
        let (dt, t_final) = self.time_grid(1e-3, 20.0)?;
        let mut cfg = self.base(model, dt, t_final);
        cfg.sample_every = Self::default_sample_every(cfg.steps(), self.sample_every)?;
        cfg.sigma = Some(sigma);
        cfg.n = Some(n);
        cfg.d = Some(d);
        Ok(cfg)
    }

    fn resolve_transport(self, model: Model) -> Result<ExperimentConfig> {
        forbid(&self.alpha, "alpha", model)?;
        forbid(&self.beta, "beta", model)?;
        forbid(&self.angular_weight, "angular_weight", model)?;
        forbid(&self.quadrature, "quadrature", model)?;
        forbid(&self.size, "size", model)?;
        let epsilon = if model == Model::Transport {
            if self.epsilon.is_some_and(|e| e != 0.0) {
                return Err(Error::validation(
                    "epsilon",
                    "full damping runs with epsilon = 0; use model `weak` for epsilon > 0",
                ));
            }
            0.0
        } else {
            let e = self.epsilon.unwrap_or(0.5);
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::validation("epsilon", "weak damping needs epsilon > 0"));
            }
            e
        };
        if model == Model::Transport {
            forbid(&self.window, "window", model)?;
            forbid(&self.moment_exponents, "moment_exponents", model)?;
        }
        let d = self.check_dimension(&[1, 2], 1)?;
        let n = self.check_cutoff(if model == Model::Weak { 16 } else { 8 }, 1)?;
        let sigma = self
            .sigma
            .clone()
            .unwrap_or(SigmaProfile::Constant { value: 1.0 });
        sigma.check("sigma", d, n)?;
        let nodes = self.nodes_per_axis.unwrap_or(9);
        if nodes < 2 {
            return Err(Error::validation(
                "nodes_per_axis",
                "velocity grid needs at least 2 nodes per axis",
            ));
        }
        let (default_dt, default_t) = if model == Model::Weak {
            (0.02, 40.0)
        } else {
            (0.01, 16.0)
        };
        let (dt, t_final) = self.time_grid(default_dt, default_t)?;
        let mut cfg = self.base(model, dt, t_final);
        cfg.sigma = Some(sigma);
        cfg.n = Some(n);
        cfg.d = Some(d);
        cfg.epsilon = Some(epsilon);
        cfg.nodes_per_axis = Some(nodes);
        // Polynomial certification reads the energy at window boundaries, so
        // the horizon is snapped to a whole number of windows and sampling to
        // a divisor of the per-window step count.
        if model == Model::Weak && (self.window.is_some() || self.moment_exponents.is_some()) {
            let [k1, k2, k3] = self
                .moment_exponents
                .unwrap_or([4.0, 0.8 * epsilon, 11.0]);
            for (value, name) in [(k1, "k1"), (k2, "k2"), (k3, "k3")] {
                if !(value.is_finite() && value > 0.0) {
                    return Err(Error::validation(
                        "moment_exponents",
                        format!("{name} must be positive and finite"),
                    ));
                }
            }
            if k2 >= epsilon {
                return Err(Error::validation(
                    "moment_exponents",
                    format!("k2 = {k2} must stay below epsilon = {epsilon}"),
                ));
            }
            if -2.0 * epsilon * k1 + k2 * k3 <= 0.0 {
                return Err(Error::validation(
                    "moment_exponents",
                    format!(
                        "exponent budget -2*epsilon*k1 + k2*k3 = {} must be positive",
                        -2.0 * epsilon * k1 + k2 * k3
                    ),
                ));
            }
            cfg.moment_exponents = Some([k1, k2, k3]);
            self.snap_windows(&mut cfg)?;
        } else {
            cfg.sample_every = Self::default_sample_every(cfg.steps(), self.sample_every)?;
        }
        Ok(cfg)
    }

    fn resolve_boltzmann(self) -> Result<ExperimentConfig> {
        let model = Model::Boltzmann;
        forbid(&self.sigma, "sigma", model)?;
        forbid(&self.epsilon, "epsilon", model)?;
        forbid(&self.nodes_per_axis, "nodes_per_axis", model)?;
        forbid(&self.size, "size", model)?;
        let d = self.check_dimension(&[2], 2)?;
        let n = self.check_cutoff(2, 0)?;
        let alpha = self.alpha.unwrap_or(0.5);
        let beta = self.beta.unwrap_or(0.5);
        // Reuse the kernel constructor's own range checks so the config
        // rejects exactly what the assembler would.
        let shape_probe = if self.angular_weight.unwrap_or(false) {
            crate::boltzmann::CollisionKernelSpec::angular_weighted(alpha, beta)
        } else {
            crate::boltzmann::CollisionKernelSpec::power_law(alpha, beta)
        };
        let spec = shape_probe?;
        let quad = self.quadrature.clone().unwrap_or_default();
        require_positive(quad.v_max, "quadrature.v_max")?;
        require_positive(quad.h, "quadrature.h")?;
        if quad.v_max / quad.h < 1.5 {
            return Err(Error::validation(
                "quadrature.h",
                "cell width must resolve the box (v_max / h >= 1.5)",
            ));
        }
        if quad.n_omega < 4 {
            return Err(Error::validation(
                "quadrature.n_omega",
                "need at least 4 deflection angles",
            ));
        }
        let (dt, t_final) = self.time_grid(0.02, 6.0)?;
        let mut cfg = self.base(model, dt, t_final);
        cfg.n = Some(n);
        cfg.d = Some(d);
        cfg.alpha = Some(alpha);
        cfg.beta = Some(beta);
        cfg.angular_weight = Some(self.angular_weight.unwrap_or(false));
        cfg.quadrature = Some(quad);
        if spec.is_soft() {
            let [k1, k2, k3] = self.moment_exponents.unwrap_or([3.0, 0.5, 4.0]);
            for (value, name) in [(k1, "k1"), (k2, "k2"), (k3, "k3")] {
                if !(value.is_finite() && value > 0.0) {
                    return Err(Error::validation(
                        "moment_exponents",
                        format!("{name} must be positive and finite"),
                    ));
                }
            }
            if alpha * k1 + k2 * k3 <= 0.0 {
                return Err(Error::validation(
                    "moment_exponents",
                    format!(
                        "exponent budget alpha*k1 + k2*k3 = {} must be positive",
                        alpha * k1 + k2 * k3
                    ),
                ));
            }
            cfg.moment_exponents = Some([k1, k2, k3]);
            self.snap_windows(&mut cfg)?;
        } else {
            if self.moment_exponents.is_some() || self.window.is_some() {
                return Err(Error::validation(
                    if self.window.is_some() { "window" } else { "moment_exponents" },
                    "polynomial-decay certification needs a soft kernel (alpha < 0 and beta < 0)",
                ));
            }
            cfg.sample_every = Self::default_sample_every(cfg.steps(), self.sample_every)?;
        }
        Ok(cfg)
    }

    fn resolve_abstract(self) -> Result<ExperimentConfig> {
        let model = Model::Abstract;
        forbid(&self.sigma, "sigma", model)?;
        forbid(&self.n, "n", model)?;
        forbid(&self.d, "d", model)?;
        forbid(&self.epsilon, "epsilon", model)?;
        forbid(&self.alpha, "alpha", model)?;
        forbid(&self.beta, "beta", model)?;
        forbid(&self.angular_weight, "angular_weight", model)?;
        forbid(&self.quadrature, "quadrature", model)?;
        forbid(&self.nodes_per_axis, "nodes_per_axis", model)?;
        forbid(&self.moment_exponents, "moment_exponents", model)?;
        let size = self.size.unwrap_or(8);
        if !(1..=64).contains(&size) {
            return Err(Error::validation("size", "state dimension must lie in 1..=64"));
        }
        let (dt, t_final) = self.time_grid(0.01, 20.0)?;
        let window = require_positive(self.window.unwrap_or(2.0), "window")?;
        if window > t_final {
            return Err(Error::validation("window", "must not exceed t_final"));
        }
        let mut cfg = self.base(model, dt, t_final);
        cfg.sample_every = Self::default_sample_every(cfg.steps(), self.sample_every)?;
        cfg.size = Some(size);
        cfg.window = Some(window);
        Ok(cfg)
    }

    /// Snaps `t_final`, `window` and `sample_every` to the step grid so that
    /// every window boundary is exactly sampled: the window becomes a whole
    /// number of steps, the horizon a whole number (at least four) of
    /// windows, and the sampling stride a divisor of the per-window steps.
    fn snap_windows(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        let requested_window =
            require_positive(self.window.unwrap_or(cfg.t_final / 8.0), "window")?;
        let steps_total = cfg.steps();
        let spw = (requested_window / cfg.dt).round().max(1.0) as usize;
        let n_windows = steps_total / spw;
        if n_windows < 4 {
            return Err(Error::validation(
                "window",
                "horizon too short: need at least four whole windows",
            ));
        }
        cfg.t_final = (n_windows * spw) as f64 * cfg.dt;
        cfg.window = Some(spw as f64 * cfg.dt);
        let requested = match self.sample_every {
            Some(0) => return Err(Error::validation("sample_every", "must be at least 1")),
            Some(k) => k,
            None => ((n_windows * spw) / 512).max(1),
        };
        cfg.sample_every = aligned_sample_every(spw, requested);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(text: &str) -> Result<ExperimentConfig> {
        parse(text)?.resolve()
    }

    #[test]
    fn gt_defaults_fill_in() {
        let cfg = resolve(r#"{"schema": 1, "model": "gt"}"#).unwrap();
        assert_eq!(cfg.model, Model::Gt);
        assert_eq!(cfg.n, Some(16));
        assert_eq!(cfg.d, Some(1));
        assert_eq!(cfg.sigma, Some(SigmaProfile::Constant { value: 1.0 }));
        assert_eq!(cfg.dt, 1e-3);
        assert_eq!(cfg.t_final, 20.0);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.prefix, "run");
        assert!(cfg.sample_every >= 1);
        assert!(cfg.quadrature.is_none() && cfg.size.is_none());
    }

    #[test]
    fn unknown_top_level_field_is_rejected_with_its_name() {
        let err = resolve(r#"{"schema": 1, "model": "gt", "cutoff": 3}"#).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("cutoff"), "message should name the field: {text}");
    }

    #[test]
    fn unknown_nested_field_reports_a_path() {
        let err = resolve(
            r#"{"schema": 1, "model": "gt", "sigma": {"profile": "constant", "value": 1, "vlaue": 2}}"#,
        )
        .unwrap_err();
        match err {
            Error::Validation { field, message } => {
                assert!(field.contains("sigma"), "path should descend into sigma: {field}");
                assert!(message.contains("vlaue"), "message should name the key: {message}");
            }
            other => panic!("expected a validation error, got {other}"),
        }
    }

    #[test]
    fn schema_version_is_mandatory() {
        assert!(matches!(
            resolve(r#"{"model": "gt"}"#),
            Err(Error::Validation { field, .. }) if field == "schema"
        ));
        assert!(matches!(
            resolve(r#"{"schema": 7, "model": "gt"}"#),
            Err(Error::Validation { field, .. }) if field == "schema"
        ));
    }

    #[test]
    fn fields_foreign_to_the_model_are_rejected() {
        let err = resolve(r#"{"schema": 1, "model": "gt", "alpha": 0.5}"#).unwrap_err();
        assert!(matches!(err, Error::Validation { field, .. } if field == "alpha"));
        let err = resolve(r#"{"schema": 1, "model": "abstract", "n": 4}"#).unwrap_err();
        assert!(matches!(err, Error::Validation { field, .. } if field == "n"));
        let err = resolve(
            r#"{"schema": 1, "model": "boltzmann", "sigma": {"profile": "constant", "value": 1}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation { field, .. } if field == "sigma"));
    }

    #[test]
    fn weak_exponent_budget_is_enforced() {
        // k2 >= epsilon.
        let err = resolve(
            r#"{"schema": 1, "model": "weak", "epsilon": 0.25,
                "moment_exponents": [4.0, 0.4, 11.0]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation { field, .. } if field == "moment_exponents"));
        // Budget -2*eps*k1 + k2*k3 <= 0.
        let err = resolve(
            r#"{"schema": 1, "model": "weak", "epsilon": 0.5,
                "moment_exponents": [4.0, 0.3, 11.0]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation { field, .. } if field == "moment_exponents"));
        // The default triple always satisfies both constraints.
        let cfg = resolve(r#"{"schema": 1, "model": "weak", "epsilon": 0.25, "window": 4.0}"#)
            .unwrap();
        let [k1, k2, k3] = cfg.moment_exponents.unwrap();
        assert!(k2 < 0.25 && -2.0 * 0.25 * k1 + k2 * k3 > 0.0);
    }

    #[test]
    fn windowed_runs_snap_to_the_step_grid() {
        let cfg = resolve(
            r#"{"schema": 1, "model": "weak", "t_final": 41.0, "dt": 0.02,
                "window": 3.99, "moment_exponents": [4.0, 0.4, 11.0]}"#,
        )
        .unwrap();
        let window = cfg.window.unwrap();
        let spw = (window / cfg.dt).round() as usize;
        assert!((window - spw as f64 * cfg.dt).abs() < 1e-12);
        let steps = cfg.steps();
        assert_eq!(steps % spw, 0, "horizon must hold whole windows");
        assert!(steps / spw >= 4);
        assert_eq!(spw % cfg.sample_every, 0, "stride must divide the window");
    }

    #[test]
    fn soft_collision_runs_need_a_viable_budget() {
        // alpha*k1 + k2*k3 = -0.9*3 + 0.5*4 = -0.7 <= 0: rejected.
        let err = resolve(
            r#"{"schema": 1, "model": "boltzmann", "alpha": -0.9, "beta": -0.5}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation { field, .. } if field == "moment_exponents"));
        // The default (3, 0.5, 4) works for moderately soft kernels.
        let cfg = resolve(
            r#"{"schema": 1, "model": "boltzmann", "alpha": -0.5, "beta": -0.5,
                "t_final": 8.0}"#,
        )
        .unwrap();
        assert_eq!(cfg.moment_exponents, Some([3.0, 0.5, 4.0]));
        assert!(cfg.window.is_some());
    }

    #[test]
    fn hard_collision_runs_reject_polynomial_knobs() {
        let err = resolve(
            r#"{"schema": 1, "model": "boltzmann", "window": 1.0}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation { field, .. } if field == "window"));
    }

    #[test]
    fn kernel_exponent_ranges_come_from_the_assembler() {
        let err = resolve(r#"{"schema": 1, "model": "boltzmann", "beta": 2.0}"#).unwrap_err();
        assert!(matches!(err, Error::Validation { field, .. } if field == "beta"));
    }

    #[test]
    fn custom_sigma_length_is_checked_against_the_grid() {
        let err = resolve(
            r#"{"schema": 1, "model": "gt", "n": 2,
                "sigma": {"profile": "custom", "samples": [1, 2, 3]}}"#,
        )
        .unwrap_err();
        match err {
            Error::Validation { field, message } => {
                assert_eq!(field, "sigma.samples");
                assert!(message.contains('5'), "wants (2n+1) = 5 samples: {message}");
            }
            other => panic!("expected a validation error, got {other}"),
        }
    }

    #[test]
    fn indicator_support_is_range_checked() {
        let err = resolve(
            r#"{"schema": 1, "model": "gt",
                "sigma": {"profile": "indicator", "support": [0.5, 0.25]}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation { field, .. } if field == "sigma.support"));
    }

    #[test]
    fn resolved_config_serializes_without_foreign_fields() {
        let cfg = resolve(r#"{"schema": 1, "model": "abstract", "seed": 3}"#).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        assert!(text.contains("\"size\":8"));
        assert!(!text.contains("sigma") && !text.contains("quadrature"));
        assert!(text.contains("\"seed\":3"));
    }

    #[test]
    fn sigma_profiles_build_real_cross_sections() {
        for profile in [
            SigmaProfile::Constant { value: 2.0 },
            SigmaProfile::CosineBump { amplitude: 0.9 },
            SigmaProfile::Indicator { support: [0.0, 0.5] },
        ] {
            let section = profile.build(1, 8).unwrap();
            assert!(section.integral() > 0.0);
        }
    }

    #[test]
    fn transport_model_pins_epsilon_to_zero() {
        let err = resolve(r#"{"schema": 1, "model": "transport", "epsilon": 0.5}"#).unwrap_err();
        assert!(matches!(err, Error::Validation { field, .. } if field == "epsilon"));
        let cfg = resolve(r#"{"schema": 1, "model": "transport"}"#).unwrap();
        assert_eq!(cfg.epsilon, Some(0.0));
    }
}
