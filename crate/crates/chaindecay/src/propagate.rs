//! Numerical evolution oracles for the survival probability.
//!
//! Two deliberately independent routes compute `P00(t)`:
//!
//! 1. [`evolve_eigen`]: spectral decomposition of a truncated chain,
//!    `amplitude(t) = sum_k <0|k>^2 exp(-i eps_k t)` - exact up to
//!    eigensolver accuracy and finite-size reflections;
//! 2. [`survival_from_ldos`]: Fourier quadrature of the closed-form LDoS,
//!    `amplitude(t) = int N0(eps) exp(-i eps t) deps` over the band, with
//!    square-root substitutions at both edges and oscillation-resolved
//!    Gauss-Legendre panels.
//!
//! A formula error anywhere in [`crate::spectral`] breaks their agreement,
//! which is held to 1e-6 absolute in the acceptance suite.

use std::fmt;
use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::linalg::{eigh_tridiagonal, TridiagEigen};
use crate::model::{truncate, ChainModel, TridiagonalHamiltonian};
use crate::quad::GaussLegendre;
use crate::regimes;
use crate::spectral::{ldos_0_with, resonance_params, Resonance};

/// How a [`SurvivalSeries`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Route {
    EigenOracle,
    LdosQuadrature,
    PiecewiseLaw,
    Interpolation,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Route::EigenOracle => "EigenOracle",
            Route::LdosQuadrature => "LdosQuadrature",
            Route::PiecewiseLaw => "PiecewiseLaw",
            Route::Interpolation => "Interpolation",
        };
        f.write_str(name)
    }
}

/// Survival amplitude and probability on a time grid (`t >= 0` only).
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalSeries {
    times: Vec<f64>,
    amplitudes: Vec<Complex64>,
    probabilities: Vec<f64>,
    route: Route,
}

impl SurvivalSeries {
    /// Assemble a series, enforcing the type invariants: a strictly
    /// increasing non-negative grid, `|amplitude|^2` within `[0, 1 + 1e-9]`,
    /// and unit amplitude at `t = 0` when the grid starts there.
    pub fn new(times: Vec<f64>, amplitudes: Vec<Complex64>, route: Route) -> Result<Self> {
        if times.is_empty() || times.len() != amplitudes.len() {
            return Err(CoreError::InvalidParameter(
                "series needs equally many times and amplitudes (at least one)".into(),
            ));
        }
        if times[0] < 0.0 {
            return Err(CoreError::InvalidParameter(
                "survival series is defined for t >= 0 only".into(),
            ));
        }
        if times
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
        {
            return Err(CoreError::InvalidParameter(
                "time grid must be strictly increasing".into(),
            ));
        }
        let probabilities: Vec<f64> = amplitudes.iter().map(|a| a.norm_sqr()).collect();
        if probabilities
            .iter()
            .any(|&p| !(0.0..=1.0 + 1e-9).contains(&p))
        {
            return Err(CoreError::InvalidParameter(
                "survival probabilities left [0, 1 + 1e-9]".into(),
            ));
        }
        if times[0] == 0.0 && (amplitudes[0] - Complex64::new(1.0, 0.0)).norm() > 1e-9 {
            return Err(CoreError::InvalidParameter(
                "amplitude at t = 0 must be 1".into(),
            ));
        }
        Ok(Self {
            times,
            amplitudes,
            probabilities,
            route,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn route(&self) -> Route {
        self.route
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// CSV `t,re_amp,im_amp,p00` tagged with the producing route.
    pub fn write_csv<W: Write>(&self, w: &mut W, comments: &[String]) -> io::Result<()> {
        for line in comments {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "# route: {}", self.route)?;
        writeln!(w, "t,re_amp,im_amp,p00")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                self.times[i], self.amplitudes[i].re, self.amplitudes[i].im, self.probabilities[i]
            )?;
        }
        Ok(())
    }
}

/// Sites needed so that the wavefront (group velocity `2v`) cannot reach the
/// far end and reflect back before `t_max`: `ceil(margin * 2 v t_max) + 16`.
pub fn choose_chain_length(t_max: f64, v: f64, margin: f64) -> usize {
    let t = t_max.max(0.0);
    let m = margin.max(1.0);
    (m * 2.0 * v * t).ceil() as usize + 16
}

/// Spectral decomposition of a finite chain, reusable across many times.
#[derive(Debug, Clone)]
pub struct EigenPropagator {
    eig: TridiagEigen,
    /// `<0|k>^2` for each eigenstate.
    weights: Vec<f64>,
}

impl EigenPropagator {
    pub fn new(h: &TridiagonalHamiltonian) -> Result<Self> {
        let eig = eigh_tridiagonal(h.diag(), h.offdiag())?;
        let weights = (0..eig.dim())
            .map(|k| eig.component(k, 0) * eig.component(k, 0))
            .collect();
        Ok(Self { eig, weights })
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    /// Survival amplitude `sum_k <0|k>^2 exp(-i eps_k t)`.
    pub fn amplitude(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &w) in self.weights.iter().enumerate() {
            let phase = -self.eig.values()[k] * t;
            acc += w * Complex64::new(phase.cos(), phase.sin());
        }
        acc
    }

    /// Full wavefunction evolved from the surface site; used for norm checks.
    pub fn state_at(&self, t: f64) -> Vec<Complex64> {
        let n = self.dim();
        let mut psi = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            let phase = -self.eig.values()[k] * t;
            let coef = self.eig.component(k, 0) * Complex64::new(phase.cos(), phase.sin());
            let vector = self.eig.vector(k);
            for (p, &v) in psi.iter_mut().zip(vector) {
                *p += coef * v;
            }
        }
        psi
    }

    pub fn series(&self, times: &[f64]) -> Result<SurvivalSeries> {
        let amplitudes = times.iter().map(|&t| self.amplitude(t)).collect();
        SurvivalSeries::new(times.to_vec(), amplitudes, Route::EigenOracle)
    }
}

/// Evolve on a finite chain by full eigendecomposition.
///
/// The chain should be sized via [`choose_chain_length`] for the last grid
/// time (warned otherwise, since reflections then contaminate the tail).
pub fn evolve_eigen(h: &TridiagonalHamiltonian, times: &[f64]) -> Result<SurvivalSeries> {
    if let Some(&t_last) = times.last() {
        let v_max = h.offdiag().iter().fold(0.0f64, |a, &b| a.max(b));
        let needed = choose_chain_length(t_last, v_max, 1.0);
        if h.len() < needed && h.len() > 1 {
            log::warn!(
                "chain of {} sites is shorter than the {} recommended for t_max = {}; \
                 expect finite-size reflections",
                h.len(),
                needed,
                t_last
            );
        }
    }
    EigenPropagator::new(h)?.series(times)
}

/// Default absolute accuracy target per amplitude for the quadrature route.
pub const QUADRATURE_TARGET: f64 = 1e-10;

const PANEL_ORDER: usize = 16;
/// Edge strips integrated under the square-root substitution.
const EDGE_FRACTION: f64 = 0.125;
const MAX_REFINE_DEPTH: usize = 48;

#[derive(Clone, Copy)]
enum Strip {
    /// eps = xi^2
    Lower,
    /// direct coordinate
    Middle,
    /// eps = B - xi^2
    Upper,
}

/// One panelization of the band integral `int N0(eps) e^{-i eps t} deps`,
/// valid for every `0 <= t <= t_max`: panel widths are capped at
/// `pi/(4 t_max)` in energy so the oscillation stays polynomially resolved,
/// and panels are bisected until the (non-oscillatory) LDoS is integrated to
/// the accuracy target.
#[derive(Debug, Clone)]
pub struct BandQuadrature {
    nodes: Vec<f64>,
    coeffs: Vec<f64>,
    target: f64,
    t_max: f64,
}

impl BandQuadrature {
    pub fn build(model: &ChainModel, t_max: f64, target: f64) -> Result<Self> {
        let res = resonance_params(model)?;
        let rule = GaussLegendre::new(PANEL_ORDER)?;
        let b = model.bandwidth();
        let delta = EDGE_FRACTION * b;
        let width_cap = if t_max > 0.0 {
            (std::f64::consts::FRAC_PI_4 / t_max).min(b)
        } else {
            b
        };

        let density = |eps: f64| ldos_0_with(eps, model, &res);
        let mut nodes = Vec::new();
        let mut coeffs = Vec::new();

        let mut strip = |kind: Strip, eps_lo: f64, eps_hi: f64| -> Result<()> {
            // Pre-split in energy so each panel sees at most pi/4 of phase.
            let n_panels = ((eps_hi - eps_lo) / width_cap).ceil().max(1.0) as usize;
            for k in 0..n_panels {
                let a_eps = eps_lo + (eps_hi - eps_lo) * k as f64 / n_panels as f64;
                let b_eps = eps_lo + (eps_hi - eps_lo) * (k + 1) as f64 / n_panels as f64;
                // Panel coordinates: substituted at the edges, direct inside.
                let (a_xi, b_xi) = match kind {
                    Strip::Lower => (a_eps.sqrt(), b_eps.sqrt()),
                    Strip::Middle => (a_eps, b_eps),
                    Strip::Upper => ((b - b_eps).sqrt(), (b - a_eps).sqrt()),
                };
                let g = |xi: f64| match kind {
                    Strip::Lower => 2.0 * xi * density(xi * xi),
                    Strip::Middle => density(xi),
                    Strip::Upper => 2.0 * xi * density(b - xi * xi),
                };
                let share = target * 0.1 * (b_eps - a_eps) / b;
                refine_panel(
                    &rule,
                    kind,
                    b,
                    a_xi,
                    b_xi,
                    &g,
                    share,
                    0,
                    &mut nodes,
                    &mut coeffs,
                )?;
            }
            Ok(())
        };

        strip(Strip::Lower, 0.0, delta)?;
        strip(Strip::Middle, delta, b - delta)?;
        strip(Strip::Upper, b - delta, b)?;

        let quadrature = Self {
            nodes,
            coeffs,
            target,
            t_max,
        };
        // A posteriori sum-rule check: the LDoS integrates to exactly 1 for a
        // well-defined resonance, so any defect bounds the panelization error.
        let defect = (quadrature.total_weight() - 1.0).abs();
        if defect > 10.0 * target {
            return Err(CoreError::QuadratureAccuracy {
                achieved: defect,
                target,
            });
        }
        Ok(quadrature)
    }

    /// `sum_i w_i N0(eps_i)`; equals the amplitude at `t = 0`.
    pub fn total_weight(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn target(&self) -> f64 {
        self.target
    }

    /// Survival amplitude at time `t` (valid up to the build-time `t_max`;
    /// beyond it the panels no longer resolve the oscillation).
    pub fn amplitude(&self, t: f64) -> Complex64 {
        if t > self.t_max * (1.0 + 1e-12) && self.t_max > 0.0 {
            log::warn!(
                "quadrature panelization built for t <= {}, queried at {t};                  the oscillation is undersampled",
                self.t_max
            );
        }
        let mut re = 0.0;
        let mut im = 0.0;
        for (&eps, &c) in self.nodes.iter().zip(&self.coeffs) {
            let phase = -eps * t;
            re += c * phase.cos();
            im += c * phase.sin();
        }
        Complex64::new(re, im)
    }

    pub fn series(&self, times: &[f64]) -> Result<SurvivalSeries> {
        let amplitudes = times.iter().map(|&t| self.amplitude(t)).collect();
        SurvivalSeries::new(times.to_vec(), amplitudes, Route::LdosQuadrature)
    }
}

/// Bisect a panel until the whole-vs-halves estimate meets its share of the
/// accuracy budget, then emit the refined halves' nodes.
#[allow(clippy::too_many_arguments)]
fn refine_panel<F: Fn(f64) -> f64>(
    rule: &GaussLegendre,
    kind: Strip,
    band: f64,
    a: f64,
    b: f64,
    g: &F,
    abs_tol: f64,
    depth: usize,
    nodes: &mut Vec<f64>,
    coeffs: &mut Vec<f64>,
) -> Result<()> {
    let whole = rule.integrate(a, b, g);
    let mid = 0.5 * (a + b);
    let left = rule.integrate(a, mid, g);
    let right = rule.integrate(mid, b, g);
    let err = (whole - (left + right)).abs();
    if err <= abs_tol.max(1e-13 * (left + right).abs()) {
        // Emit the refined halves: g already carries the substitution
        // jacobian, so each node contributes w * half * g(xi) at energy eps(xi).
        for (lo, hi) in [(a, mid), (mid, b)] {
            let half = 0.5 * (hi - lo);
            let center = 0.5 * (hi + lo);
            for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
                let xi = center + half * x;
                let eps = match kind {
                    Strip::Lower => xi * xi,
                    Strip::Middle => xi,
                    Strip::Upper => band - xi * xi,
                };
                nodes.push(eps);
                coeffs.push(w * half * g(xi));
            }
        }
        return Ok(());
    }
    if depth >= MAX_REFINE_DEPTH {
        return Err(CoreError::QuadratureAccuracy {
            achieved: err,
            target: abs_tol,
        });
    }
    refine_panel(
        rule,
        kind,
        band,
        a,
        mid,
        g,
        0.5 * abs_tol,
        depth + 1,
        nodes,
        coeffs,
    )?;
    refine_panel(
        rule,
        kind,
        band,
        mid,
        b,
        g,
        0.5 * abs_tol,
        depth + 1,
        nodes,
        coeffs,
    )
}

/// Survival series by direct Fourier quadrature of the LDoS.
pub fn survival_from_ldos(model: &ChainModel, times: &[f64]) -> Result<SurvivalSeries> {
    let t_max = times.last().copied().unwrap_or(0.0);
    BandQuadrature::build(model, t_max, QUADRATURE_TARGET)?.series(times)
}

/// Pointwise `P00` evaluator for any production route; build once, query at
/// arbitrary times up to the construction `t_max`.
#[derive(Debug, Clone)]
pub struct SurvivalEvaluator {
    inner: EvaluatorInner,
}

#[derive(Debug, Clone)]
enum EvaluatorInner {
    Eigen(EigenPropagator),
    Quadrature(BandQuadrature),
    Piecewise { model: ChainModel, res: Resonance },
    Interpolation { t_s: f64, gamma0: f64 },
}

impl SurvivalEvaluator {
    pub fn new(model: &ChainModel, route: Route, t_max: f64) -> Result<Self> {
        let inner = match route {
            Route::EigenOracle => {
                let n = choose_chain_length(t_max, model.v(), 1.25).max(2);
                EvaluatorInner::Eigen(EigenPropagator::new(&truncate(model, n)?)?)
            }
            Route::LdosQuadrature => {
                EvaluatorInner::Quadrature(BandQuadrature::build(model, t_max, QUADRATURE_TARGET)?)
            }
            Route::PiecewiseLaw => EvaluatorInner::Piecewise {
                model: *model,
                res: resonance_params(model)?,
            },
            Route::Interpolation => {
                let res = resonance_params(model)?;
                EvaluatorInner::Interpolation {
                    t_s: regimes::t_short(&res, model).exact,
                    gamma0: res.gamma0,
                }
            }
        };
        Ok(Self { inner })
    }

    pub fn route(&self) -> Route {
        match &self.inner {
            EvaluatorInner::Eigen(_) => Route::EigenOracle,
            EvaluatorInner::Quadrature(_) => Route::LdosQuadrature,
            EvaluatorInner::Piecewise { .. } => Route::PiecewiseLaw,
            EvaluatorInner::Interpolation { .. } => Route::Interpolation,
        }
    }

    pub fn p00(&self, t: f64) -> Result<f64> {
        match &self.inner {
            EvaluatorInner::Eigen(prop) => Ok(prop.amplitude(t).norm_sqr()),
            EvaluatorInner::Quadrature(q) => Ok(q.amplitude(t).norm_sqr()),
            EvaluatorInner::Piecewise { model, res } => {
                Ok(regimes::piecewise_p00(t, res, model)?.value)
            }
            EvaluatorInner::Interpolation { t_s, gamma0 } => {
                Ok(regimes::interpolation_p00(t, *t_s, *gamma0))
            }
        }
    }

    pub fn series(&self, times: &[f64]) -> Result<SurvivalSeries> {
        match &self.inner {
            EvaluatorInner::Eigen(prop) => prop.series(times),
            EvaluatorInner::Quadrature(q) => q.series(times),
            _ => {
                let route = self.route();
                let amplitudes = times
                    .iter()
                    .map(|&t| self.p00(t).map(|p| Complex64::new(p.max(0.0).sqrt(), 0.0)))
                    .collect::<Result<Vec<_>>>()?;
                SurvivalSeries::new(times.to_vec(), amplitudes, route)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_chain;
    use approx::assert_abs_diff_eq;

    fn fig3() -> ChainModel {
        build_chain(1.0, 0.4, 1.0).unwrap()
    }

    fn linear_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn chain_length_formula() {
        assert_eq!(choose_chain_length(100.0, 1.0, 1.25), 266);
        assert_eq!(choose_chain_length(1.0, 1.0, 1.25), 19);
        // Preconditions saturate instead of erroring.
        assert_eq!(choose_chain_length(-1.0, 1.0, 1.25), 16);
        assert_eq!(
            choose_chain_length(1.0, 1.0, 0.5),
            choose_chain_length(1.0, 1.0, 1.0)
        );
    }

    #[test]
    fn single_site_never_decays() {
        let h = TridiagonalHamiltonian::new(vec![0.8], vec![]).unwrap();
        let s = evolve_eigen(&h, &linear_grid(0.0, 10.0, 21)).unwrap();
        for &p in s.probabilities() {
            assert_abs_diff_eq!(p, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn two_level_rabi_oscillation() {
        let c = 0.35;
        let h = TridiagonalHamiltonian::new(vec![1.1, 1.1], vec![c]).unwrap();
        let times = linear_grid(0.0, 20.0, 101);
        let s = evolve_eigen(&h, &times).unwrap();
        for (&t, &p) in times.iter().zip(s.probabilities()) {
            assert_abs_diff_eq!(p, (c * t).cos().powi(2), epsilon = 1e-12);
        }
    }

    #[test]
    fn eigen_oracle_preserves_the_full_state_norm() {
        let model = fig3();
        let h = truncate(&model, choose_chain_length(30.0, 1.0, 1.25)).unwrap();
        let prop = EigenPropagator::new(&h).unwrap();
        for &t in &[0.0, 1.0, 7.5, 19.0, 30.0] {
            let norm: f64 = prop.state_at(t).iter().map(|c| c.norm_sqr()).sum();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn doubling_the_chain_does_not_move_the_answer() {
        let model = fig3();
        let t_max = 30.0;
        let n = choose_chain_length(t_max, 1.0, 1.25);
        let p1 = EigenPropagator::new(&truncate(&model, n).unwrap()).unwrap();
        let p2 = EigenPropagator::new(&truncate(&model, 2 * n).unwrap()).unwrap();
        let d = (p1.amplitude(t_max).norm_sqr() - p2.amplitude(t_max).norm_sqr()).abs();
        assert!(d < 1e-8, "reflection residue {d}");
    }

    #[test]
    fn quadrature_sum_rule_and_t0_amplitude() {
        let q = BandQuadrature::build(&fig3(), 50.0, QUADRATURE_TARGET).unwrap();
        assert_abs_diff_eq!(q.total_weight(), 1.0, epsilon = 1e-9);
        let a0 = q.amplitude(0.0);
        assert_abs_diff_eq!(a0.re, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(a0.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn quadrature_rejects_models_without_a_well_defined_resonance() {
        let model = build_chain(-3.0, 0.4, 1.0).unwrap();
        assert!(BandQuadrature::build(&model, 10.0, QUADRATURE_TARGET).is_err());
    }

    #[test]
    fn dual_oracles_agree_pointwise() {
        let model = fig3();
        let times = linear_grid(0.0, 25.0, 251);
        let eig = evolve_eigen(
            &truncate(&model, choose_chain_length(25.0, 1.0, 1.25)).unwrap(),
            &times,
        )
        .unwrap();
        let quad = survival_from_ldos(&model, &times).unwrap();
        let mut worst = 0.0f64;
        for i in 0..times.len() {
            worst = worst.max((eig.amplitudes()[i] - quad.amplitudes()[i]).norm());
        }
        assert!(worst < 1e-6, "oracle disagreement {worst:.2e}");
    }

    #[test]
    fn short_time_expansion_recovers_the_local_second_moment() {
        let model = fig3();
        let h = truncate(&model, 40).unwrap();
        let prop = EigenPropagator::new(&h).unwrap();
        let f = |t: f64| (1.0 - prop.amplitude(t).norm_sqr()) / (t * t);
        // Richardson in t^2 over t = 1e-3, 2e-3.
        let extrapolated = (4.0 * f(1e-3) - f(2e-3)) / 3.0;
        assert!(
            (extrapolated / (model.v0() * model.v0()) - 1.0).abs() < 1e-3,
            "got {extrapolated}"
        );
    }

    #[test]
    fn exponential_window_matches_the_golden_rule_pole() {
        // P00 over [5, 25] tracks A exp(-2 Gamma0 t) within 5 percent.
        let model = fig3();
        let res = resonance_params(&model).unwrap();
        let times = linear_grid(5.0, 25.0, 101);
        let s = survival_from_ldos(&model, &times).unwrap();
        for (&t, &p) in times.iter().zip(s.probabilities()) {
            let sc_fgr = res.prefactor_a * (-2.0 * res.gamma0 * t).exp();
            assert!((p / sc_fgr - 1.0).abs() < 0.05, "t = {t}: {p} vs {sc_fgr}");
        }
    }

    #[test]
    fn long_time_tail_decays_as_t_cubed() {
        // Period-averaged envelope slope on [150, 260] from the quadrature route.
        let model = fig3();
        let dt = 0.02;
        let times: Vec<f64> = (0..((260.0 - 140.0) / dt) as usize)
            .map(|i| 140.0 + dt * i as f64)
            .collect();
        let q = BandQuadrature::build(&model, 260.0, QUADRATURE_TARGET).unwrap();
        let series = q.series(&times).unwrap();
        let fit = regimes::fit_power_law(&series, 150.0).unwrap();
        assert!((fit.exponent + 3.0).abs() < 0.1, "slope {}", fit.exponent);
    }

    #[test]
    fn series_invariants_are_enforced() {
        let bad = SurvivalSeries::new(
            vec![0.0, 1.0],
            vec![Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.0)],
            Route::EigenOracle,
        );
        assert!(bad.is_err(), "t=0 amplitude must be 1");
        let bad = SurvivalSeries::new(
            vec![1.0, 1.0],
            vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
            Route::EigenOracle,
        );
        assert!(bad.is_err(), "grid must strictly increase");
        let bad = SurvivalSeries::new(
            vec![0.0, 1.0],
            vec![Complex64::new(1.0, 0.0), Complex64::new(1.2, 0.0)],
            Route::EigenOracle,
        );
        assert!(bad.is_err(), "probability above 1");
        let bad = SurvivalSeries::new(
            vec![-1.0],
            vec![Complex64::new(1.0, 0.0)],
            Route::EigenOracle,
        );
        assert!(bad.is_err(), "negative time");
    }

    #[test]
    fn evaluator_routes_agree_where_they_should() {
        let model = fig3();
        let eig = SurvivalEvaluator::new(&model, Route::EigenOracle, 10.0).unwrap();
        let quad = SurvivalEvaluator::new(&model, Route::LdosQuadrature, 10.0).unwrap();
        for &t in &[0.0, 0.5, 2.0, 10.0] {
            assert_abs_diff_eq!(eig.p00(t).unwrap(), quad.p00(t).unwrap(), epsilon = 1e-8);
        }
        let law = SurvivalEvaluator::new(&model, Route::PiecewiseLaw, 10.0).unwrap();
        let s = law.series(&linear_grid(0.0, 5.0, 11)).unwrap();
        assert_eq!(s.route(), Route::PiecewiseLaw);
        assert_abs_diff_eq!(s.probabilities()[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn csv_export_carries_route_and_comments() {
        let h = TridiagonalHamiltonian::new(vec![1.0, 2.0], vec![0.4]).unwrap();
        let s = evolve_eigen(&h, &[0.0, 1.0]).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf, &["config: {}".into()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# config: {}\n# route: EigenOracle\nt,re_amp,im_amp,p00\n"));
        assert_eq!(text.lines().count(), 5);
    }
}
