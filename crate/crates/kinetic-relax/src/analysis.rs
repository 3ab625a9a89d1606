//! Decay-rate extraction from energy traces.
//!
//! Simulations hand back sampled series `(t_i, E_i)` of squared norms plus
//! optional dissipation samples. The fits here classify the tail as
//! exponential (`E ~ exp(-rate * t)`, least squares on `(t, ln E)`) or
//! polynomial (`E ~ (1 + t)^(-rate)`, least squares on `(ln(1+t), ln E)`).
//! Both report the goodness `r^2`, and both fit the series that was handed
//! in: when that series is a squared norm, the norm itself decays at half
//! the fitted exponential rate ([`RateFit::half_rate`]).

use crate::error::{Error, Result};

/// Which tail model a [`RateFit`] used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    /// `E(t) ~ C exp(-rate t)`.
    Exponential,
    /// `E(t) ~ C (1 + t)^(-rate)`.
    Polynomial,
}

/// A fitted decay law for a sampled nonnegative series.
#[derive(Debug, Clone, Copy)]
pub struct RateFit {
    pub model: FitModel,
    /// Decay rate of the fitted series (positive means decay).
    pub rate: f64,
    /// Fitted value of `ln E` at `t = 0` (exponential) or `ln(1+t) = 0`.
    pub intercept: f64,
    /// Coefficient of determination of the log-space least squares.
    pub r_squared: f64,
    /// The `[lo, hi]` time window that was actually used.
    pub window: (f64, f64),
    /// Number of retained (positive-valued) samples.
    pub samples_used: usize,
}

impl RateFit {
    /// Rate of the square root of the fitted series; the norm decay rate
    /// when the fitted series is an energy.
    pub fn half_rate(&self) -> f64 {
        self.rate / 2.0
    }
}

/// A sampled energy history with optional dissipation samples.
#[derive(Debug, Clone, Default)]
pub struct EnergyTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub dissipation: Option<Vec<f64>>,
}

impl EnergyTrace {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let trace = EnergyTrace {
            times,
            values,
            dissipation: None,
        };
        trace.validate()?;
        Ok(trace)
    }

    pub fn with_dissipation(mut self, dissipation: Vec<f64>) -> Result<Self> {
        if dissipation.len() != self.times.len() {
            return Err(Error::InvalidInput(
                "dissipation series must match the time series length".into(),
            ));
        }
        self.dissipation = Some(dissipation);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.len() != self.values.len() || self.times.len() < 2 {
            return Err(Error::InvalidInput(
                "energy trace needs matching times/values with at least two samples".into(),
            ));
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "energy trace times must be strictly increasing".into(),
            ));
        }
        if self
            .times
            .iter()
            .chain(self.values.iter())
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidInput("energy trace must be finite".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Default fit window: drop the leading 20% of the covered time span to
    /// skip the transient.
    pub fn default_window(&self) -> (f64, f64) {
        let lo = self.times[0];
        let hi = *self.times.last().unwrap();
        (lo + 0.2 * (hi - lo), hi)
    }
}

/// Ordinary least squares of `ys` against `xs`; returns
/// `(slope, intercept, r_squared)`. A perfectly flat series counts as a
/// perfect fit.
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    // A series whose variance is at the roundoff floor of its own mean is
    // flat: report a perfect zero-slope fit rather than a slope fabricated
    // from accumulation noise.
    let flat = syy <= 1e-24 * n * (1.0 + my * my);
    let slope = if sxx > 0.0 && !flat { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r2 = if flat { 1.0 } else { 1.0 - ss_res / syy };
    (slope, intercept, r2)
}

fn windowed_log_samples(
    trace: &EnergyTrace,
    window: (f64, f64),
) -> Result<(Vec<f64>, Vec<f64>)> {
    trace.validate()?;
    if !(window.0 < window.1) {
        return Err(Error::InvalidInput("fit window must satisfy lo < hi".into()));
    }
    let mut ts = Vec::new();
    let mut logs = Vec::new();
    for (&t, &v) in trace.times.iter().zip(&trace.values) {
        // Nonpositive samples carry no log-space information; the window
        // silently shrinks past them (documented behaviour for traces that
        // decay into the floating-point floor).
        if t >= window.0 && t <= window.1 && v > 0.0 {
            ts.push(t);
            logs.push(v.ln());
        }
    }
    if ts.len() < 2 {
        return Err(Error::InvalidInput(
            "fit window retains fewer than two positive samples".into(),
        ));
    }
    Ok((ts, logs))
}

/// Fits `E(t) ~ C exp(-rate t)` on the window by least squares in
/// `(t, ln E)`.
pub fn fit_exponential(trace: &EnergyTrace, window: (f64, f64)) -> Result<RateFit> {
    let (ts, logs) = windowed_log_samples(trace, window)?;
    let (slope, intercept, r2) = linear_fit(&ts, &logs);
    Ok(RateFit {
        model: FitModel::Exponential,
        rate: -slope,
        intercept,
        r_squared: r2,
        window: (ts[0], *ts.last().unwrap()),
        samples_used: ts.len(),
    })
}

/// Fits `E(t) ~ C (1 + t)^(-rate)` on the window by least squares in
/// `(ln(1+t), ln E)`. Times must satisfy `t > -1`.
pub fn fit_polynomial(trace: &EnergyTrace, window: (f64, f64)) -> Result<RateFit> {
    let (ts, logs) = windowed_log_samples(trace, window)?;
    if ts.iter().any(|&t| t <= -1.0) {
        return Err(Error::InvalidInput(
            "polynomial fit needs times > -1".into(),
        ));
    }
    let xs: Vec<f64> = ts.iter().map(|&t| (1.0 + t).ln()).collect();
    let (slope, intercept, r2) = linear_fit(&xs, &logs);
    Ok(RateFit {
        model: FitModel::Polynomial,
        rate: -slope,
        intercept,
        r_squared: r2,
        window: (ts[0], *ts.last().unwrap()),
        samples_used: ts.len(),
    })
}

/// Log-log slope of the trailing `tail_fraction` of the trace; negative
/// values mean decay, and a slope `<= -p` certifies decay at least as fast
/// as `t^(-p)` over that stretch.
pub fn tail_log_log_slope(trace: &EnergyTrace, tail_fraction: f64) -> Result<f64> {
    if !(0.0 < tail_fraction && tail_fraction <= 1.0) {
        return Err(Error::InvalidInput(
            "tail fraction must lie in (0, 1]".into(),
        ));
    }
    let lo = trace.times[0]
        + (1.0 - tail_fraction) * (trace.times.last().unwrap() - trace.times[0]);
    let fit = fit_polynomial(trace, (lo, *trace.times.last().unwrap()))?;
    Ok(-fit.rate)
}

/// Piecewise-linear integral of a sampled series over `[a, b]` (clipped to
/// the sampled range).
pub fn integrate_series(times: &[f64], values: &[f64], a: f64, b: f64) -> f64 {
    assert_eq!(times.len(), values.len());
    let mut acc = 0.0;
    for i in 1..times.len() {
        let (t0, t1) = (times[i - 1], times[i]);
        let lo = t0.max(a);
        let hi = t1.min(b);
        if hi <= lo {
            continue;
        }
        let interp = |t: f64| {
            let w = (t - t0) / (t1 - t0);
            values[i - 1] * (1.0 - w) + values[i] * w
        };
        acc += 0.5 * (interp(lo) + interp(hi)) * (hi - lo);
    }
    acc
}

/// Locates the dissipation window guaranteed by the pigeonhole argument.
///
/// Splits `[0, k * t0]` into `k` windows, integrates the sampled
/// dissipation over each and returns `(p, integral_p)` for the smallest one
/// — by construction at most the mean, i.e. at most `total / k`.
pub fn window_decrement(
    times: &[f64],
    dissipation: &[f64],
    t0: f64,
    k: usize,
) -> Result<(usize, f64)> {
    if times.len() != dissipation.len() || times.len() < 2 {
        return Err(Error::InvalidInput(
            "window decrement needs matching times/dissipation with >= 2 samples".into(),
        ));
    }
    if k == 0 || !t0.is_finite() || t0 <= 0.0 {
        return Err(Error::InvalidInput(
            "window decrement needs k >= 1 and t0 > 0".into(),
        ));
    }
    let horizon = k as f64 * t0;
    if *times.last().unwrap() < horizon - 1e-9 * horizon.max(1.0) {
        return Err(Error::InvalidInput(format!(
            "trace covers [{}, {}] but the window argument needs [0, {horizon}]",
            times[0],
            times.last().unwrap()
        )));
    }
    let mut best = (0usize, f64::INFINITY);
    let mut total = 0.0;
    for p in 0..k {
        let ip = integrate_series(times, dissipation, p as f64 * t0, (p + 1) as f64 * t0);
        total += ip;
        if ip < best.1 {
            best = (p, ip);
        }
    }
    debug_assert!(
        best.1 <= total / k as f64 + 1e-9 * (1.0 + total.abs()),
        "pigeonhole violated: min window {} vs mean {}",
        best.1,
        total / k as f64
    );
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sampled(f: impl Fn(f64) -> f64, t_max: f64, n: usize) -> EnergyTrace {
        let times: Vec<f64> = (0..=n).map(|i| t_max * i as f64 / n as f64).collect();
        let values: Vec<f64> = times.iter().map(|&t| f(t)).collect();
        EnergyTrace::new(times, values).unwrap()
    }

    #[test]
    fn exponential_fit_recovers_exact_rate() {
        let trace = sampled(|t| (-2.0 * t).exp(), 10.0, 400);
        let fit = fit_exponential(&trace, trace.default_window()).unwrap();
        assert!((fit.rate - 2.0).abs() < 1e-9, "rate {}", fit.rate);
        assert!((fit.half_rate() - 1.0).abs() < 1e-9);
        assert!(fit.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn constant_series_fits_rate_zero() {
        let trace = sampled(|_| 3.7, 5.0, 50);
        let fit = fit_exponential(&trace, (0.0, 5.0)).unwrap();
        assert_eq!(fit.rate, 0.0);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn polynomial_fit_recovers_exact_order() {
        let trace = sampled(|t| (1.0 + t).powi(-3), 50.0, 500);
        let fit = fit_polynomial(&trace, (0.0, 50.0)).unwrap();
        assert!((fit.rate - 3.0).abs() < 1e-6, "order {}", fit.rate);
        assert!(fit.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn exponential_data_prefers_the_exponential_model() {
        let trace = sampled(|t| (-1.5 * t).exp(), 12.0, 300);
        let w = trace.default_window();
        let e = fit_exponential(&trace, w).unwrap();
        let p = fit_polynomial(&trace, w).unwrap();
        assert!(e.r_squared > p.r_squared);
        // And the converse on polynomial data.
        let ptrace = sampled(|t| (1.0 + t).powf(-2.0), 40.0, 300);
        let w = ptrace.default_window();
        let e2 = fit_exponential(&ptrace, w).unwrap();
        let p2 = fit_polynomial(&ptrace, w).unwrap();
        assert!(p2.r_squared > e2.r_squared);
    }

    #[test]
    fn nonpositive_samples_shrink_the_window() {
        let times: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1).collect();
        let values: Vec<f64> = times
            .iter()
            .map(|&t| if t < 5.0 { (-t).exp() } else { 0.0 })
            .collect();
        let trace = EnergyTrace::new(times, values).unwrap();
        let fit = fit_exponential(&trace, (0.0, 10.0)).unwrap();
        assert!(fit.window.1 <= 5.0);
        assert!((fit.rate - 1.0).abs() < 1e-9);
        // A trace with no positive samples cannot be fitted.
        let dead = EnergyTrace::new(vec![0.0, 1.0, 2.0], vec![0.0, 0.0, 0.0]).unwrap();
        assert!(fit_exponential(&dead, (0.0, 2.0)).is_err());
    }

    #[test]
    fn degenerate_windows_are_rejected() {
        let trace = sampled(|t| (-t).exp(), 5.0, 20);
        assert!(fit_exponential(&trace, (3.0, 3.0)).is_err());
        assert!(fit_exponential(&trace, (4.9, 4.95)).is_err());
    }

    #[test]
    fn tail_slope_reports_decay_order() {
        let trace = sampled(|t| (1.0 + t).powf(-1.5), 100.0, 800);
        let slope = tail_log_log_slope(&trace, 0.5).unwrap();
        assert!((slope + 1.5).abs() < 1e-6, "slope {slope}");
    }

    #[test]
    fn uniform_dissipation_picks_the_first_window_with_equality() {
        let times: Vec<f64> = (0..=1000).map(|i| i as f64 * 0.01).collect();
        let dissipation = vec![2.0; times.len()];
        let (p, integral) = window_decrement(&times, &dissipation, 1.0, 10).unwrap();
        assert_eq!(p, 0);
        // Mean window integral is exactly 2.0 * 1.0; equality holds.
        assert!((integral - 2.0).abs() < 1e-12);
    }

    #[test]
    fn front_loaded_dissipation_picks_the_last_window() {
        let times: Vec<f64> = (0..=1000).map(|i| i as f64 * 0.01).collect();
        let dissipation: Vec<f64> = times.iter().map(|&t| (-t).exp()).collect();
        let (p, integral) = window_decrement(&times, &dissipation, 1.0, 10).unwrap();
        assert_eq!(p, 9);
        let total = integrate_series(&times, &dissipation, 0.0, 10.0);
        assert!(integral <= total / 10.0 + 1e-12);
    }

    #[test]
    fn window_decrement_needs_full_coverage() {
        let times: Vec<f64> = (0..=100).map(|i| i as f64 * 0.01).collect();
        let dissipation = vec![1.0; times.len()];
        assert!(window_decrement(&times, &dissipation, 1.0, 10).is_err());
    }

    #[test]
    fn series_integration_is_exact_for_piecewise_linear_data() {
        let times = vec![0.0, 1.0, 2.0, 4.0];
        let values = vec![0.0, 2.0, 2.0, 0.0];
        // Triangle + box + triangle: 1 + 2 + 2 = 5.
        assert!((integrate_series(&times, &values, 0.0, 4.0) - 5.0).abs() < 1e-12);
        // Sub-interval straddling a knot.
        assert!((integrate_series(&times, &values, 0.5, 1.5) - 1.75).abs() < 1e-12);
    }
}
