//! Stroboscopic projective measurement of the surface site.
//!
//! An ideal von Neumann projection onto `|0>` every `tau` discards the
//! environment memory, so after `n` projections the survival is exactly
//! `P00(tau)^n`. Frequent projections inside the quadratic stage slow the
//! decay (Zeno); projections timed at the survival collapse accelerate it
//! (anti-Zeno). The measured rate `Gamma_meas(tau) = -ln P00(tau) / (2 tau)`
//! is compared against `Gamma0` to classify a period.

use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::model::ChainModel;
use crate::propagate::{Route, SurvivalEvaluator};
use crate::spectral::resonance_params;

/// Periodic projection schedule: `count` projections spaced `period` apart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSchedule {
    period: f64,
    count: usize,
}

impl MeasurementSchedule {
    pub fn new(period: f64, count: usize) -> Result<Self> {
        if !period.is_finite() || period <= 0.0 {
            return Err(CoreError::InvalidParameter(format!(
                "measurement period must be positive, got {period}"
            )));
        }
        if count == 0 {
            return Err(CoreError::InvalidParameter(
                "need at least one projection".into(),
            ));
        }
        Ok(Self { period, count })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn count(&self) -> usize {
        self.count
    }
}

/// Anything that can produce a survival probability at a given time; the
/// production oracles implement it, and plain closures double as synthetic
/// inputs in tests.
pub trait SurvivalProbe {
    fn p00(&self, t: f64) -> Result<f64>;
}

impl SurvivalProbe for SurvivalEvaluator {
    fn p00(&self, t: f64) -> Result<f64> {
        SurvivalEvaluator::p00(self, t)
    }
}

impl<F: Fn(f64) -> f64> SurvivalProbe for F {
    fn p00(&self, t: f64) -> Result<f64> {
        Ok(self(t))
    }
}

/// Survival after a projection schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasuredSurvival {
    pub probability: f64,
    /// The per-period survival vanished exactly (projection at a collapse zero).
    pub collapsed: bool,
}

/// Measured decay rate under period-`tau` projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasuredRate {
    /// `-ln P00(tau) / (2 tau)`; `+inf` when the survival vanished.
    pub rate: f64,
    pub infinite: bool,
}

/// Zeno classification of a measurement period against `Gamma0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZenoClass {
    Zeno,
    AntiZeno,
    Neutral,
}

impl fmt::Display for ZenoClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZenoClass::Zeno => "Zeno",
            ZenoClass::AntiZeno => "AntiZeno",
            ZenoClass::Neutral => "Neutral",
        })
    }
}

/// Relative dead band around `Gamma0` that still counts as Neutral.
pub const CLASSIFICATION_BAND: f64 = 0.05;

/// `P00(tau)^n` for any survival probe.
pub fn survival_after_projections<P: SurvivalProbe>(
    probe: &P,
    schedule: &MeasurementSchedule,
) -> Result<MeasuredSurvival> {
    let per_period = probe.p00(schedule.period())?;
    if per_period == 0.0 {
        return Ok(MeasuredSurvival {
            probability: 0.0,
            collapsed: true,
        });
    }
    Ok(MeasuredSurvival {
        probability: per_period.powi(schedule.count() as i32),
        collapsed: false,
    })
}

/// `Gamma_meas(tau) = -ln P00(tau) / (2 tau)` for any survival probe.
pub fn rate_under_measurement<P: SurvivalProbe>(probe: &P, tau: f64) -> Result<MeasuredRate> {
    if tau.is_nan() || tau <= 0.0 {
        return Err(CoreError::InvalidParameter(format!(
            "measurement period must be positive, got {tau}"
        )));
    }
    let p = probe.p00(tau)?;
    if p == 0.0 {
        return Ok(MeasuredRate {
            rate: f64::INFINITY,
            infinite: true,
        });
    }
    Ok(MeasuredRate {
        rate: -p.ln() / (2.0 * tau),
        infinite: false,
    })
}

/// Compare a measured rate against `Gamma0` with a relative dead band.
pub fn classify_rate(rate: f64, gamma0: f64, delta: f64) -> ZenoClass {
    if rate < (1.0 - delta) * gamma0 {
        ZenoClass::Zeno
    } else if rate > (1.0 + delta) * gamma0 {
        ZenoClass::AntiZeno
    } else {
        ZenoClass::Neutral
    }
}

/// Survival of the chain model under a projection schedule, using the given
/// oracle route.
pub fn survival_under_measurement(
    model: &ChainModel,
    schedule: &MeasurementSchedule,
    route: Route,
) -> Result<MeasuredSurvival> {
    let evaluator = SurvivalEvaluator::new(model, route, schedule.period())?;
    survival_after_projections(&evaluator, schedule)
}

/// Measured decay rate of the chain model at projection period `tau`.
pub fn measured_rate(model: &ChainModel, tau: f64, route: Route) -> Result<MeasuredRate> {
    if tau.is_nan() || tau <= 0.0 {
        return Err(CoreError::InvalidParameter(format!(
            "measurement period must be positive, got {tau}"
        )));
    }
    let evaluator = SurvivalEvaluator::new(model, route, tau)?;
    rate_under_measurement(&evaluator, tau)
}

/// Classify a projection period as Zeno / anti-Zeno / Neutral against the
/// model's `Gamma0` with the default dead band.
pub fn classify(model: &ChainModel, tau: f64, route: Route) -> Result<ZenoClass> {
    let gamma0 = resonance_params(model)?.gamma0;
    let rate = measured_rate(model, tau, route)?;
    Ok(classify_rate(rate.rate, gamma0, CLASSIFICATION_BAND))
}

/// One row of a period sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub tau: f64,
    pub gamma_meas: f64,
    pub class: ZenoClass,
}

/// Measured rates over a grid of projection periods.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub gamma0: f64,
    /// Index of the largest finite measured rate (deepest anti-Zeno point).
    pub peak_index: Option<usize>,
}

impl SweepTable {
    pub fn peak(&self) -> Option<&SweepRow> {
        self.peak_index.map(|i| &self.rows[i])
    }

    /// CSV `tau,gamma_meas,gamma0,class`, with the anti-Zeno peak noted in
    /// the header.
    pub fn write_csv<W: Write>(&self, w: &mut W, comments: &[String]) -> io::Result<()> {
        for line in comments {
            writeln!(w, "# {line}")?;
        }
        if let Some(peak) = self.peak() {
            writeln!(w, "# peak_gamma_meas_at_tau: {:.16e}", peak.tau)?;
        }
        writeln!(w, "tau,gamma_meas,gamma0,class")?;
        for row in &self.rows {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{}",
                row.tau, row.gamma_meas, self.gamma0, row.class
            )?;
        }
        Ok(())
    }
}

/// Sweep the projection period over an increasing positive grid. The oracle
/// is built once, sized for the largest period.
pub fn sweep_tau(model: &ChainModel, taus: &[f64], route: Route) -> Result<SweepTable> {
    if taus.is_empty() {
        return Err(CoreError::InvalidParameter("empty period grid".into()));
    }
    if taus[0] <= 0.0
        || taus
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
    {
        return Err(CoreError::InvalidParameter(
            "period grid must be positive and strictly increasing".into(),
        ));
    }
    let gamma0 = resonance_params(model)?.gamma0;
    let evaluator = SurvivalEvaluator::new(model, route, *taus.last().expect("non-empty"))?;
    let mut rows: Vec<SweepRow> = Vec::with_capacity(taus.len());
    let mut peak_index: Option<usize> = None;
    for (i, &tau) in taus.iter().enumerate() {
        let measured = rate_under_measurement(&evaluator, tau)?;
        let class = classify_rate(measured.rate, gamma0, CLASSIFICATION_BAND);
        if !measured.infinite
            && peak_index.is_none_or(|p: usize| measured.rate > rows[p].gamma_meas)
        {
            peak_index = Some(i);
        }
        rows.push(SweepRow {
            tau,
            gamma_meas: measured.rate,
            class,
        });
    }
    Ok(SweepTable {
        rows,
        gamma0,
        peak_index,
    })
}
