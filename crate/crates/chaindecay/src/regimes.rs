//! Decay-regime analysis: the three-branch piecewise law, the crossover
//! times `t_S` (quadratic -> exponential) and `t_R` (exponential -> power
//! law), the effective decay rate, survival-collapse detection and
//! power-law tail fits.
//!
//! The constants of the closed-form `t_R` estimate are those of the
//! semi-infinite chain with its square-root (`nu = 1/2`) band-edge onset:
//! `a1 = nu + 2 = 5/2`, `a2 = (4 pi)^(1/5)`.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::model::ChainModel;
use crate::propagate::SurvivalSeries;
use crate::spectral::{ldos_1_unperturbed, Resonance};

/// Van Hove exponent of the band-edge LDoS onset.
pub const VAN_HOVE_NU: f64 = 0.5;
/// `a1 = nu + 2`.
pub const RETURN_A1: f64 = VAN_HOVE_NU + 2.0;
/// Bandwidth in units of `V` (normalized chain).
const BANDWIDTH: f64 = 4.0;
/// One period of the band-edge interference modulation, `2 pi / B`.
const MODULATION_PERIOD: f64 = 2.0 * std::f64::consts::PI / BANDWIDTH;
/// `Gamma_eff` is masked (not reported) below this survival probability.
const GAMMA_EFF_UNDERFLOW: f64 = 1e-300;
/// Minimum dip depth, in decades below the envelope, to call a collapse.
const COLLAPSE_MIN_DEPTH: f64 = 0.5;

/// `a2 = (4 pi)^(1/5)`.
pub fn return_a2() -> f64 {
    (4.0 * std::f64::consts::PI).powf(0.2)
}

/// Which branch of the piecewise law produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Quadratic,
    Exponential,
    PowerLaw,
}

/// A piecewise-law evaluation: the probability and the branch it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiecewiseValue {
    pub value: f64,
    pub branch: Branch,
}

/// The two estimates of the short crossover time: exact pole form
/// `t_S = Gamma0 / V~0^2` and the golden-rule form `pi N1(eps0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShortCrossover {
    pub exact: f64,
    pub fgr: f64,
}

/// Crossover from quadratic to exponential decay. The `exact` field is the
/// primary value.
pub fn t_short(res: &Resonance, model: &ChainModel) -> ShortCrossover {
    let second_moment = model.v0() * model.v0();
    ShortCrossover {
        exact: res.gamma0 / second_moment,
        fgr: std::f64::consts::PI * ldos_1_unperturbed(model.eps0(), model.v()),
    }
}

/// Iterates of the exponential/power-law crossover time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnCrossover {
    /// Successive iterates `t_R^(0), t_R^(1), ...`.
    pub iterates: Vec<f64>,
    /// Closed form `a1 (1/Gamma0) ln(a2 B / (4 Gamma0))`; identical to the
    /// first iterate.
    pub closed_form: f64,
    /// Whether the iteration settled before the step budget ran out.
    pub converged: bool,
}

impl ReturnCrossover {
    /// Best available estimate: the last iterate.
    pub fn estimate(&self) -> f64 {
        *self.iterates.last().expect("at least one iterate")
    }
}

/// Iterate the equality between the exponential and the period-averaged
/// power-law branch, in the band-center form that generates the closed-form
/// estimate: `A/C -> 32 pi V^2/Gamma0^2` and `Gamma(eps_r) -> V`, so
///
/// `t^(k+1) = (1/(2 Gamma0)) [ln(32 pi V^2/Gamma0^2) + 3 ln(V t^(k))]`,
///
/// seeded with `1/(2 Gamma0)`. The first application collapses to the
/// closed form with `a1 = 5/2`, `a2 = (4 pi)^(1/5)`; the reported iterates
/// start there.
pub fn t_return(res: &Resonance, model: &ChainModel, iterations: usize) -> ReturnCrossover {
    let v = model.v();
    let gamma0 = res.gamma0;
    let closed_form = RETURN_A1 / gamma0 * (return_a2() * model.bandwidth() / (4.0 * gamma0)).ln();
    let map = |t: f64| {
        (0.5 / gamma0)
            * ((32.0 * std::f64::consts::PI * v * v / (gamma0 * gamma0)).ln() + 3.0 * (v * t).ln())
    };
    let mut iterates = Vec::with_capacity(iterations.max(1));
    let mut t = 0.5 / gamma0;
    let mut converged = false;
    for _ in 0..iterations.max(1) {
        let next = map(t);
        if !next.is_finite() || next <= 0.0 {
            break;
        }
        iterates.push(next);
        if (next - t).abs() <= 1e-12 * next.abs() {
            converged = true;
            break;
        }
        t = next;
    }
    if iterates.is_empty() {
        iterates.push(closed_form);
    }
    ReturnCrossover {
        iterates,
        closed_form,
        converged,
    }
}

/// The three-branch decay law. Quadratic up to `t_S`, the self-consistent
/// golden-rule exponential up to `t_R` (converged iterate), then the
/// modulated power-law tail. The quadratic branch is clamped at zero, where
/// strong coupling would otherwise push it negative.
pub fn piecewise_p00(t: f64, res: &Resonance, model: &ChainModel) -> Result<PiecewiseValue> {
    if t.is_nan() || t < 0.0 {
        return Err(CoreError::InvalidParameter(format!(
            "piecewise law is defined for t >= 0, got {t}"
        )));
    }
    let t_s = t_short(res, model).exact;
    let t_r = t_return(res, model, 64).estimate();
    if t < t_s {
        let v0t = model.v0() * t;
        Ok(PiecewiseValue {
            value: (1.0 - v0t * v0t).max(0.0),
            branch: Branch::Quadratic,
        })
    } else if t < t_r {
        Ok(PiecewiseValue {
            value: res.prefactor_a * (-2.0 * res.gamma0 * t).exp(),
            branch: Branch::Exponential,
        })
    } else {
        let modulation =
            1.0 - 2.0 * res.beta / (1.0 + res.beta * res.beta) * (model.bandwidth() * t).sin();
        let tail = (1.0 / (res.gamma_r * t)).powi(3);
        Ok(PiecewiseValue {
            value: res.prefactor_c * modulation * tail,
            branch: Branch::PowerLaw,
        })
    }
}

/// Smooth bridge between the quadratic and exponential stages:
/// `exp[(1 - sqrt(1 + (t/t_S)^2)) 2 Gamma0 t_S]`. For `t >> t_S` it tends
/// to `exp(2 Gamma0^2/V~0^2) exp(-2 Gamma0 t)`.
pub fn interpolation_p00(t: f64, t_s: f64, gamma0: f64) -> f64 {
    let ratio = t / t_s;
    ((1.0 - (1.0 + ratio * ratio).sqrt()) * 2.0 * gamma0 * t_s).exp()
}

/// Effective decay rate `Gamma_eff(t) = -ln P00(t) / (2 t)` evaluated where
/// it is well defined (`t > 0`, `P00` above the underflow mask).
#[derive(Debug, Clone, PartialEq)]
pub struct RateTrace {
    pub times: Vec<f64>,
    pub rates: Vec<f64>,
}

pub fn effective_rate(series: &SurvivalSeries) -> RateTrace {
    let mut times = Vec::new();
    let mut rates = Vec::new();
    for (&t, &p) in series.times().iter().zip(series.probabilities()) {
        if t > 0.0 && p > GAMMA_EFF_UNDERFLOW {
            times.push(t);
            rates.push(-p.ln() / (2.0 * t));
        }
    }
    RateTrace { times, rates }
}

impl RateTrace {
    /// CSV `t,gamma_eff`.
    pub fn write_csv<W: std::io::Write>(
        &self,
        w: &mut W,
        comments: &[String],
    ) -> std::io::Result<()> {
        for line in comments {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "t,gamma_eff")?;
        for (t, g) in self.times.iter().zip(&self.rates) {
            writeln!(w, "{t:.16e},{g:.16e}")?;
        }
        Ok(())
    }
}

/// A detected survival collapse: dip location and its depth in decades
/// below the local decay envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Collapse {
    pub time: f64,
    pub depth: f64,
}

/// Search the window `[t_R/2, 2 t_R]` (estimate from the closed-form
/// iteration) for local minima of `P00` that fall at least half a decade
/// below `min(A e^(-2 Gamma0 t), period-averaged power law)`. Returns the
/// deepest such dip. Ordinary modulation minima of the tail stay well above
/// the threshold and are not reported.
pub fn detect_collapse(series: &SurvivalSeries, res: &Resonance) -> Option<Collapse> {
    let t_r = return_estimate_from_width(res);
    let (lo, hi) = (0.5 * t_r, 2.0 * t_r);
    let times = series.times();
    let probs = series.probabilities();
    let mut best: Option<Collapse> = None;
    for i in 1..times.len().saturating_sub(1) {
        if times[i] < lo || times[i] > hi {
            continue;
        }
        if !(probs[i] < probs[i - 1] && probs[i] < probs[i + 1]) {
            continue;
        }
        let envelope = decay_envelope(times[i], res);
        let depth = (envelope / probs[i].max(f64::MIN_POSITIVE)).log10();
        if depth >= COLLAPSE_MIN_DEPTH && best.is_none_or(|b| depth > b.depth) {
            best = Some(Collapse {
                time: times[i],
                depth,
            });
        }
    }
    best
}

/// `min` of the exponential branch and the period-averaged power-law branch.
fn decay_envelope(t: f64, res: &Resonance) -> f64 {
    let exponential = res.prefactor_a * (-2.0 * res.gamma0 * t).exp();
    let power = res.prefactor_c * (1.0 / (res.gamma_r * t)).powi(3);
    exponential.min(power)
}

fn return_estimate_from_width(res: &Resonance) -> f64 {
    let gamma0 = res.gamma0;
    let map = |t: f64| {
        (0.5 / gamma0) * ((32.0 * std::f64::consts::PI / (gamma0 * gamma0)).ln() + 3.0 * t.ln())
    };
    let mut t = 0.5 / gamma0;
    for _ in 0..64 {
        let next = map(t);
        if !next.is_finite() || next <= 0.0 {
            break;
        }
        if (next - t).abs() <= 1e-12 * next.abs() {
            return next;
        }
        t = next;
    }
    t
}

/// Result of a long-time tail fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    /// Log-log slope of the period-averaged envelope (expected `-3`).
    pub exponent: f64,
    /// Dominant frequency of the residual oscillation (expected `B`).
    pub modulation_frequency: f64,
}

/// Fit the asymptotic tail of a survival series beyond `t_min`: least
/// squares on the period-averaged envelope in log-log, and a spectral scan
/// of the residual for the modulation frequency.
pub fn fit_power_law(series: &SurvivalSeries, t_min: f64) -> Result<PowerLawFit> {
    let t_end = *series.times().last().expect("series non-empty");
    if t_end - t_min < 3.0 * MODULATION_PERIOD {
        return Err(CoreError::InsufficientData(format!(
            "tail fit needs at least 3 modulation periods past t_min; have {:.3}",
            (t_end - t_min) / MODULATION_PERIOD
        )));
    }
    let avg = sliding_period_average(series, MODULATION_PERIOD);
    let mut ts = Vec::new();
    let mut residual = Vec::new();
    let mut sum = [0.0f64; 5]; // n, x, y, xx, xy over (ln t, ln avg)
    for (i, &t) in series.times().iter().enumerate() {
        let Some(a) = avg[i] else { continue };
        if t < t_min || a <= 0.0 {
            continue;
        }
        let (x, y) = (t.ln(), a.ln());
        sum[0] += 1.0;
        sum[1] += x;
        sum[2] += y;
        sum[3] += x * x;
        sum[4] += x * y;
        ts.push(t);
        residual.push(series.probabilities()[i] / a - 1.0);
    }
    if sum[0] < 8.0 {
        return Err(CoreError::InsufficientData(
            "tail fit needs at least 8 period-averaged samples".into(),
        ));
    }
    let denom = sum[0] * sum[3] - sum[1] * sum[1];
    let exponent = (sum[0] * sum[4] - sum[1] * sum[2]) / denom;

    let modulation_frequency = dominant_frequency(&ts, &residual);
    Ok(PowerLawFit {
        exponent,
        modulation_frequency,
    })
}

/// Sliding one-period average of the probabilities; `None` where the full
/// window does not fit inside the series.
fn sliding_period_average(series: &SurvivalSeries, period: f64) -> Vec<Option<f64>> {
    let times = series.times();
    let probs = series.probabilities();
    let n = times.len();
    // Cumulative trapezoid integral of P.
    let mut cum = vec![0.0f64; n];
    for i in 1..n {
        cum[i] = cum[i - 1] + 0.5 * (probs[i] + probs[i - 1]) * (times[i] - times[i - 1]);
    }
    let integral_to = |x: f64| -> f64 {
        // x is inside [times[0], times[n-1]]; linear interpolation of P.
        let j = times.partition_point(|&t| t < x).min(n - 1).max(1);
        let (t0, t1) = (times[j - 1], times[j]);
        let frac = if t1 > t0 { (x - t0) / (t1 - t0) } else { 0.0 };
        let px = probs[j - 1] + (probs[j] - probs[j - 1]) * frac;
        cum[j - 1] + 0.5 * (probs[j - 1] + px) * (x - t0)
    };
    times
        .iter()
        .map(|&t| {
            let (a, b) = (t - 0.5 * period, t + 0.5 * period);
            if a < times[0] || b > times[n - 1] {
                None
            } else {
                Some((integral_to(b) - integral_to(a)) / period)
            }
        })
        .collect()
}

/// Argmax over omega of `|sum_i r_i exp(-i omega t_i)|`, scanned finely over
/// `[1, 8]` and polished by golden-section search.
fn dominant_frequency(ts: &[f64], residual: &[f64]) -> f64 {
    let span = ts.last().unwrap() - ts.first().unwrap();
    let strength = |omega: f64| -> f64 {
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for (&t, &r) in ts.iter().zip(residual) {
            let phase = omega * t;
            re += r * phase.cos();
            im -= r * phase.sin();
        }
        re.hypot(im)
    };
    let step = (2.0 * std::f64::consts::PI / span / 8.0).min(0.02);
    let mut best = (1.0, strength(1.0));
    let mut omega = 1.0 + step;
    while omega <= 8.0 {
        let s = strength(omega);
        if s > best.1 {
            best = (omega, s);
        }
        omega += step;
    }
    // Golden-section polish inside one scan step.
    let (mut a, mut b) = (best.0 - step, best.0 + step);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (b - phi * (b - a), a + phi * (b - a));
    let (mut f1, mut f2) = (strength(x1), strength(x2));
    for _ in 0..60 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = strength(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = strength(x1);
        }
    }
    0.5 * (a + b)
}

/// Numeric exponential/power-law crossover: the first grid time at which the
/// period-averaged survival exceeds the golden-rule exponential by a factor
/// `e`.
pub fn numeric_return_crossover(series: &SurvivalSeries, res: &Resonance) -> Option<f64> {
    let avg = sliding_period_average(series, MODULATION_PERIOD);
    for (i, &t) in series.times().iter().enumerate() {
        let Some(a) = avg[i] else { continue };
        if t <= 0.0 {
            continue;
        }
        let exponential = res.prefactor_a * (-2.0 * res.gamma0 * t).exp();
        if a > std::f64::consts::E * exponential {
            return Some(t);
        }
    }
    None
}

/// Full regime report for one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    /// Short crossover `t_S` (pole form; primary value).
    pub t_s: f64,
    /// Golden-rule estimate of `t_S`.
    pub t_s_fgr: f64,
    /// Closed-form `t_R^(0)`.
    pub t_r_closed_form: f64,
    /// Crossover iterates starting at the closed form.
    pub t_r_iterates: Vec<f64>,
    pub t_r_converged: bool,
    /// Crossover extracted from the oracle series; `None` if the series
    /// never meets the factor-e rule.
    pub t_r_numeric: Option<f64>,
    pub collapse_time: Option<f64>,
    pub collapse_depth: Option<f64>,
    pub a1: f64,
    pub a2: f64,
    pub nu: f64,
}

/// A complete analysis bundle: resonance parameters, regime report and the
/// oracle series the numeric quantities were extracted from.
#[derive(Debug, Clone)]
pub struct RegimesAnalysis {
    pub resonance: Resonance,
    pub report: RegimeReport,
    pub series: SurvivalSeries,
}

/// Time step of the driver's internal oracle grid; fine enough to resolve
/// collapse dips to well below the reporting threshold.
pub const ANALYSIS_TIME_STEP: f64 = 0.002;

/// Longest horizon the driver will attempt; beyond this the truncated-chain
/// oracle (length ~ 2.5 t) stops being tractable.
pub const ANALYSIS_MAX_HORIZON: f64 = 1500.0;

/// Run the complete regime analysis for a model: closed-form crossovers, a
/// dense eigen-oracle series spanning `[0, ~2.2 t_R]`, the numeric
/// crossover, and collapse detection.
pub fn analyze(model: &ChainModel) -> Result<RegimesAnalysis> {
    use crate::propagate::{Route, SurvivalEvaluator};

    let resonance = crate::spectral::resonance_params(model)?;
    let short = t_short(&resonance, model);
    let ret = t_return(&resonance, model, 64);
    let t_end = (2.15 * ret.estimate()).max(8.0 * short.exact);
    if t_end > ANALYSIS_MAX_HORIZON {
        return Err(CoreError::InvalidParameter(format!(
            "regime analysis needs a horizon of {t_end:.0} (Gamma0 = {:.2e} decays too slowly); \
             the driver caps at {ANALYSIS_MAX_HORIZON:.0}",
            resonance.gamma0
        )));
    }
    // Keep the grid around 1.5e5 points: dips stay resolved (they are
    // detected two decades below threshold already at dt = 0.01).
    let dt = ANALYSIS_TIME_STEP.max(t_end / 1.5e5);
    let steps = (t_end / dt).ceil() as usize;
    let times: Vec<f64> = (0..=steps).map(|i| i as f64 * dt).collect();
    let evaluator = SurvivalEvaluator::new(model, Route::EigenOracle, t_end)?;
    let series = evaluator.series(&times)?;

    let collapse = detect_collapse(&series, &resonance);
    let report = RegimeReport {
        t_s: short.exact,
        t_s_fgr: short.fgr,
        t_r_closed_form: ret.closed_form,
        t_r_iterates: ret.iterates.clone(),
        t_r_converged: ret.converged,
        t_r_numeric: numeric_return_crossover(&series, &resonance),
        collapse_time: collapse.map(|c| c.time),
        collapse_depth: collapse.map(|c| c.depth),
        a1: RETURN_A1,
        a2: return_a2(),
        nu: VAN_HOVE_NU,
    };
    Ok(RegimesAnalysis {
        resonance,
        report,
        series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_chain;
    use crate::propagate::Route;
    use crate::spectral::resonance_params;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn fig3() -> (ChainModel, Resonance) {
        let model = build_chain(1.0, 0.4, 1.0).unwrap();
        let res = resonance_params(&model).unwrap();
        (model, res)
    }

    fn synthetic_series<F: Fn(f64) -> f64>(t0: f64, t1: f64, n: usize, p: F) -> SurvivalSeries {
        let times: Vec<f64> = (0..n)
            .map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64)
            .collect();
        let amps: Vec<Complex64> = times
            .iter()
            .map(|&t| Complex64::new(p(t).max(0.0).sqrt(), 0.0))
            .collect();
        SurvivalSeries::new(times, amps, Route::PiecewiseLaw).unwrap()
    }

    #[test]
    fn short_crossover_reference_values() {
        let (model, res) = fig3();
        let ts = t_short(&res, &model);
        assert_abs_diff_eq!(ts.fgr, 3f64.sqrt() / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ts.exact, res.gamma0 / 0.16, epsilon = 1e-12);
        // Band center: pi * N1(2V) = 1.
        let center = build_chain(2.0, 0.3, 1.0).unwrap();
        let rc = resonance_params(&center).unwrap();
        assert_abs_diff_eq!(t_short(&rc, &center).fgr, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn short_crossover_estimates_agree_at_weak_coupling() {
        for v0 in [0.1, 0.2, 0.4] {
            let model = build_chain(1.0, v0, 1.0).unwrap();
            let res = resonance_params(&model).unwrap();
            let ts = t_short(&res, &model);
            assert!(
                (ts.exact / ts.fgr - 1.0).abs() < 0.15,
                "v0 = {v0}: {} vs {}",
                ts.exact,
                ts.fgr
            );
        }
    }

    #[test]
    fn return_crossover_reproduces_the_reference_chain() {
        let (model, res) = fig3();
        let ret = t_return(&res, &model, 24);
        assert_abs_diff_eq!(ret.closed_form, 41.492, epsilon = 5e-3);
        // First iterate IS the closed form, algebraically.
        assert_abs_diff_eq!(ret.iterates[0], ret.closed_form, epsilon = 1e-10);
        assert_abs_diff_eq!(ret.iterates[1], 67.088, epsilon = 5e-3);
        assert!(ret.converged);
    }

    #[test]
    fn return_iterates_increase_and_contract() {
        for v0 in [0.1, 0.2, 0.3, 0.4] {
            let model = build_chain(1.0, v0, 1.0).unwrap();
            let res = resonance_params(&model).unwrap();
            let ret = t_return(&res, &model, 24);
            let it = &ret.iterates;
            assert!(it.len() >= 3);
            let mut prev_diff = f64::INFINITY;
            for w in it.windows(2) {
                let diff = w[1] - w[0];
                assert!(diff > 0.0, "iterates must increase: {w:?}");
                assert!(diff <= prev_diff / 2.0, "contraction violated: {w:?}");
                prev_diff = diff;
            }
        }
    }

    #[test]
    fn piecewise_branches_and_reference_values() {
        let (model, res) = fig3();
        let at0 = piecewise_p00(0.0, &res, &model).unwrap();
        assert_eq!(at0.branch, Branch::Quadratic);
        assert_abs_diff_eq!(at0.value, 1.0, epsilon = 1e-15);
        let at10 = piecewise_p00(10.0, &res, &model).unwrap();
        assert_eq!(at10.branch, Branch::Exponential);
        assert_abs_diff_eq!(
            at10.value,
            res.prefactor_a * (-2.0 * res.gamma0 * 10.0).exp(),
            epsilon = 1e-15
        );
        let at200 = piecewise_p00(200.0, &res, &model).unwrap();
        assert_eq!(at200.branch, Branch::PowerLaw);
        assert!(at200.value > 0.0);
        assert!(piecewise_p00(-1.0, &res, &model).is_err());
    }

    #[test]
    fn piecewise_quadratic_branch_clamps_at_zero_under_strong_coupling() {
        let model = build_chain(1.8, 0.77, 1.0).unwrap();
        let res = resonance_params(&model).unwrap();
        let t_s = t_short(&res, &model).exact;
        // 1/v0 < t < t_S would be negative without the clamp.
        let t_probe = 0.5 * (1.0 / model.v0() + t_s);
        let v = piecewise_p00(t_probe, &res, &model).unwrap();
        assert_eq!(v.branch, Branch::Quadratic);
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn power_law_modulation_is_never_negative() {
        let (model, res) = fig3();
        for i in 0..2000 {
            let t = 80.0 + 0.05 * i as f64;
            let v = piecewise_p00(t, &res, &model).unwrap();
            assert!(v.value >= 0.0, "negative law value at t = {t}");
        }
    }

    #[test]
    fn interpolation_limits() {
        let (model, res) = fig3();
        let ts = t_short(&res, &model).exact;
        assert_abs_diff_eq!(interpolation_p00(0.0, ts, res.gamma0), 1.0, epsilon = 1e-15);
        // Quadratic limit: matches 1 - V0^2 t^2 at t = t_S/100 to 1e-6.
        let t = ts / 100.0;
        let quadratic = 1.0 - model.v0() * model.v0() * t * t;
        assert_abs_diff_eq!(
            interpolation_p00(t, ts, res.gamma0),
            quadratic,
            epsilon = 1e-6
        );
        // Exponential limit with A = exp(2 Gamma0^2/V~0^2) at t = 50 t_S.
        let t = 50.0 * ts;
        let a_interp = (2.0 * res.gamma0 * res.gamma0 / (model.v0() * model.v0())).exp();
        let ratio =
            interpolation_p00(t, ts, res.gamma0) / (a_interp * (-2.0 * res.gamma0 * t).exp());
        assert!((0.99..=1.01).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn effective_rate_of_pure_exponential_is_flat() {
        let gamma = 0.14;
        let series = synthetic_series(0.1, 40.0, 400, |t| (-2.0 * gamma * t).exp());
        let trace = effective_rate(&series);
        assert_eq!(trace.times.len(), 400);
        for &g in &trace.rates {
            assert_abs_diff_eq!(g, gamma, epsilon = 1e-12);
        }
    }

    #[test]
    fn effective_rate_vanishes_quadratically_at_short_times() {
        let v0sq = 0.16;
        let series = synthetic_series(1e-4, 1e-2, 200, |t| 1.0 - v0sq * t * t);
        let trace = effective_rate(&series);
        for (&t, &g) in trace.times.iter().zip(&trace.rates) {
            assert_abs_diff_eq!(g, v0sq * t / 2.0, epsilon = 1e-5);
        }
    }

    #[test]
    fn effective_rate_masks_underflow_and_t_zero() {
        let series = synthetic_series(0.0, 10.0, 11, |t| if t > 4.0 { 0.0 } else { 1.0 });
        let trace = effective_rate(&series);
        assert!(trace.times.iter().all(|&t| t > 0.0 && t <= 4.0));
    }

    #[test]
    fn effective_rate_of_the_exponential_branch_is_the_algebraic_identity() {
        let (model, res) = fig3();
        let eval =
            crate::propagate::SurvivalEvaluator::new(&model, Route::PiecewiseLaw, 40.0).unwrap();
        let times: Vec<f64> = (0..200).map(|i| 2.0 + 30.0 * i as f64 / 199.0).collect();
        let series = eval.series(&times).unwrap();
        let trace = effective_rate(&series);
        for (&t, &g) in trace.times.iter().zip(&trace.rates) {
            let identity = res.gamma0 - res.prefactor_a.ln() / (2.0 * t);
            assert_abs_diff_eq!(g, identity, epsilon = 1e-12);
        }
    }

    #[test]
    fn collapse_detection_ignores_synthetic_laws() {
        let (_, res) = fig3();
        // Pure exponential: monotone, no local minima.
        let exp_series = synthetic_series(1.0, 160.0, 8000, |t| {
            res.prefactor_a * (-2.0 * res.gamma0 * t).exp()
        });
        assert!(detect_collapse(&exp_series, &res).is_none());
        // Pure modulated power law (the tail branch itself): its periodic
        // minima stay within half a decade of the envelope.
        let m = 2.0 * res.beta / (1.0 + res.beta * res.beta);
        let pow_series = synthetic_series(30.0, 160.0, 20000, |t| {
            res.prefactor_c * (1.0 - m * (4.0 * t).sin()) * (res.gamma_r * t).powi(-3)
        });
        assert!(detect_collapse(&pow_series, &res).is_none());
    }

    #[test]
    fn tail_fit_needs_enough_periods() {
        let (_, res) = fig3();
        let series = synthetic_series(100.0, 102.0, 50, |t| (res.gamma_r * t).powi(-3));
        assert!(matches!(
            fit_power_law(&series, 100.0),
            Err(CoreError::InsufficientData(_))
        ));
    }

    #[test]
    fn tail_fit_recovers_slope_and_frequency_from_a_synthetic_tail() {
        let (_, res) = fig3();
        let m = 2.0 * res.beta / (1.0 + res.beta * res.beta);
        let series = synthetic_series(60.0, 220.0, 16000, |t| {
            res.prefactor_c * (1.0 - m * (4.0 * t).sin()) * (res.gamma_r * t).powi(-3)
        });
        let fit = fit_power_law(&series, 70.0).unwrap();
        // The tail exponent is -(2 nu + 2) with the square-root edge onset.
        assert_abs_diff_eq!(fit.exponent, -(2.0 * VAN_HOVE_NU + 2.0), epsilon = 0.02);
        assert_abs_diff_eq!(fit.modulation_frequency, 4.0, epsilon = 0.02);
    }

    #[test]
    fn report_serializes_to_json_and_back() {
        let report = RegimeReport {
            t_s: 0.91,
            t_s_fgr: 0.87,
            t_r_closed_form: 41.49,
            t_r_iterates: vec![41.49, 67.09],
            t_r_converged: true,
            t_r_numeric: Some(63.4),
            collapse_time: Some(61.6),
            collapse_depth: Some(2.05),
            a1: RETURN_A1,
            a2: return_a2(),
            nu: VAN_HOVE_NU,
        };
        let text = serde_json::to_string_pretty(&report).unwrap();
        let back: RegimeReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
    }
}
