//! Closed-form spectral quantities of the surface-impurity chain: surface
//! self-energy, retarded Green function, local density of states and the
//! resonance parameters of the Lorentzian factorization.
//!
//! Two independent routes to the LDoS coexist on purpose: the factorized
//! closed form [`ldos_0`] and `-Im G00 / pi` through [`green_00`]. They are
//! the same function analytically, and tests hold them to 1e-10 relative.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::model::ChainModel;

/// Character of the pole of the analytically continued Green function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResonanceClass {
    /// `v0 < v` and the resonance sits inside the band: a Lorentzian pole at
    /// `eps_r - i Gamma0` on the second sheet.
    WellDefined,
    /// `v0 < v` but the resonance is pushed beyond a band edge.
    OutOfBand,
    /// Strong surface coupling split off at least one discrete eigenstate
    /// outside the band.
    LocalizedState,
    /// Strong coupling without a discrete state: the second-sheet pole sits
    /// on the real axis outside the band.
    VirtualState,
}

/// Resonance parameters of the semi-infinite chain, in units of `V`
/// (energies) and dimensionless ratios. Valid only for [`ResonanceClass::WellDefined`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    /// Resonance energy `eps_r = eps0 + delta0`.
    pub eps_r: f64,
    /// Level shift from the coupling.
    pub delta0: f64,
    /// Half-width of the Lorentzian pole (exact decay rate).
    pub gamma0: f64,
    /// Width scale `Gamma_c = sqrt(V^2 - V0^2 - ((eps0-2V)/2)^2)`.
    pub gamma_c: f64,
    /// Pre-exponential factor `A = |a|^2` of the self-consistent
    /// golden-rule exponential (`a` is the pole residue).
    pub prefactor_a: f64,
    /// Relative band-edge participation
    /// `beta = [(eps_r - eps_L)^2 + Gamma0^2] / [(eps_U - eps_r)^2 + Gamma0^2]`.
    pub beta: f64,
    /// Amplitude of the long-time power-law branch.
    pub prefactor_c: f64,
    /// `Gamma(eps_r)`, the escape-rate function at the resonance energy.
    pub gamma_r: f64,
}

/// `Gamma(eps) = sqrt(eps) sqrt(B - eps) / 2`, the in-band decay-width
/// function; zero at both edges, maximal (`= V`) at band center.
pub fn gamma_of_eps(eps: f64, v: f64) -> Result<f64> {
    let b = 4.0 * v;
    if !(0.0..=b).contains(&eps) {
        return Err(CoreError::OutsideBand {
            eps,
            lower: 0.0,
            upper: b,
        });
    }
    Ok(eps.sqrt() * (b - eps).sqrt() / 2.0)
}

/// Retarded surface Green function of the homogeneous semi-infinite chain
/// (the environment with the 0th site removed), continued to complex `z`.
///
/// The principal-branch product `sqrt(z) sqrt(z - B)` carries its cut along
/// the band; for `Im z >= 0` this is the physical (retarded) sheet, and for
/// `Im z < 0` the sign of the root is flipped so the function continues the
/// retarded branch *through* the band onto the second sheet, where the
/// resonance pole lives. Either way `G -> 0` as `|z| -> infinity`.
fn bare_surface_green(z: Complex64, v: f64) -> Complex64 {
    let b = 4.0 * v;
    let w = z - 2.0 * v;
    let s = z.sqrt() * (z - b).sqrt();
    if z.im < 0.0 {
        (w + s) / (2.0 * v * v)
    } else {
        (w - s) / (2.0 * v * v)
    }
}

/// Surface self-energy `Sigma(eps) = V0^2 G11(eps)` on the real axis
/// (retarded limit). Inside the band
/// `Sigma = (V0^2/V^2) [(eps - 2V)/2 - i Gamma(eps)]`; outside it is real
/// and decays to zero at large `|eps|`.
pub fn surface_self_energy(eps: f64, v0: f64, v: f64) -> Complex64 {
    surface_self_energy_continued(Complex64::new(eps, 0.0), v0, v)
}

/// Analytic continuation of the surface self-energy (second sheet for
/// `Im z < 0`, matching the retarded branch through the band).
pub fn surface_self_energy_continued(z: Complex64, v0: f64, v: f64) -> Complex64 {
    v0 * v0 * bare_surface_green(z, v)
}

/// Retarded Green function of the surface site,
/// `G00(eps) = 1 / (eps - eps0 - Sigma(eps))`.
pub fn green_00(eps: f64, model: &ChainModel) -> Complex64 {
    green_00_continued(Complex64::new(eps, 0.0), model)
}

/// `G00` at complex argument (second sheet for `Im z < 0`).
pub fn green_00_continued(z: Complex64, model: &ChainModel) -> Complex64 {
    let sigma = surface_self_energy_continued(z, model.v0(), model.v());
    1.0 / (z - model.eps0() - sigma)
}

/// Unperturbed LDoS of the first environment site,
/// `N1(eps) = 16 Gamma(eps) / (pi B^2)` inside the band, zero outside.
/// Normalized to 1.
pub fn ldos_1_unperturbed(eps: f64, v: f64) -> f64 {
    let b = 4.0 * v;
    if eps <= 0.0 || eps >= b {
        return 0.0;
    }
    let gamma = eps.sqrt() * (b - eps).sqrt() / 2.0;
    16.0 * gamma / (std::f64::consts::PI * b * b)
}

/// LDoS at the surface site via the Lorentzian factorization
/// `N0(eps) = (V^2/Gamma_c) Gamma0 / ((eps_r - eps)^2 + Gamma0^2) N1(eps)`.
///
/// Out-of-band energies give 0. Agrees with `-Im`[`green_00`]`/pi`
/// pointwise; the two routes are kept separate as a cross-check.
pub fn ldos_0(eps: f64, model: &ChainModel) -> Result<f64> {
    let res = resonance_params(model)?;
    Ok(ldos_0_with(eps, model, &res))
}

/// Same as [`ldos_0`] with precomputed resonance parameters (hot loops).
pub fn ldos_0_with(eps: f64, model: &ChainModel, res: &Resonance) -> f64 {
    let v = model.v();
    let lorentzian = v * v / res.gamma_c * res.gamma0
        / ((res.eps_r - eps) * (res.eps_r - eps) + res.gamma0 * res.gamma0);
    lorentzian * ldos_1_unperturbed(eps, v)
}

/// Classify the pole of the continued Green function.
pub fn classify_resonance(model: &ChainModel) -> ResonanceClass {
    let v = model.v();
    let v0 = model.v0();
    let half_detuning = (model.eps0() - 2.0 * v) / 2.0;
    let gamma_c_sq = v * v - v0 * v0 - half_detuning * half_detuning;
    if v0 < v {
        if gamma_c_sq > 0.0 {
            ResonanceClass::WellDefined
        } else {
            ResonanceClass::OutOfBand
        }
    } else {
        // A discrete state splits off below (above) the band when the real
        // pole condition eps - eps0 - Sigma(eps) = 0 has a solution there.
        let below = model.eps0() < v0 * v0 / v;
        let above = model.eps0() > 4.0 * v - v0 * v0 / v;
        if below || above {
            ResonanceClass::LocalizedState
        } else {
            ResonanceClass::VirtualState
        }
    }
}

/// All closed-form resonance parameters of the well-defined branch.
pub fn resonance_params(model: &ChainModel) -> Result<Resonance> {
    let class = classify_resonance(model);
    if class != ResonanceClass::WellDefined {
        return Err(CoreError::NotWellDefined(class));
    }
    let v = model.v();
    let v0 = model.v0();
    let b = model.bandwidth();
    let coupling_ratio = v0 * v0 / (v * v - v0 * v0);
    let half_detuning = (model.eps0() - 2.0 * v) / 2.0;
    let delta0 = coupling_ratio * half_detuning;
    let eps_r = model.eps0() + delta0;
    let gamma_c = (v * v - v0 * v0 - half_detuning * half_detuning).sqrt();
    let gamma0 = coupling_ratio * gamma_c;
    let lower_weight = eps_r * eps_r + gamma0 * gamma0;
    let upper_weight = (b - eps_r) * (b - eps_r) + gamma0 * gamma0;
    let beta = lower_weight / upper_weight;
    let prefactor_a = lower_weight.sqrt() * upper_weight.sqrt() / (4.0 * gamma_c * gamma_c);
    let gamma_r = eps_r.sqrt() * (b - eps_r).sqrt() / 2.0;
    let prefactor_c = v0.powi(4) * v * gamma_r.powi(3) * (1.0 + beta * beta)
        / (4.0 * std::f64::consts::PI * (v * v - v0 * v0).powi(2) * lower_weight.powi(2));
    Ok(Resonance {
        eps_r,
        delta0,
        gamma0,
        gamma_c,
        prefactor_a,
        beta,
        prefactor_c,
        gamma_r,
    })
}

/// The LDoS sampled on a cosine-spaced (Chebyshev) grid over the band,
/// clustering points near both edges to resolve the square-root onsets.
#[derive(Debug, Clone, PartialEq)]
pub struct LdosCurve {
    energies: Vec<f64>,
    values: Vec<f64>,
}

/// Default grid size for [`ldos_curve`].
pub const LDOS_GRID_POINTS: usize = 4096;

pub fn ldos_curve(model: &ChainModel, n_points: usize) -> Result<LdosCurve> {
    if n_points < 2 {
        return Err(CoreError::InvalidParameter(
            "LDoS grid needs at least 2 points".into(),
        ));
    }
    let res = resonance_params(model)?;
    let half_band = 0.5 * model.bandwidth();
    let last = (n_points - 1) as f64;
    let mut energies = Vec::with_capacity(n_points);
    let mut values = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let theta = std::f64::consts::PI * i as f64 / last;
        let eps = half_band * (1.0 - theta.cos());
        energies.push(eps);
        values.push(ldos_0_with(eps, model, &res));
    }
    Ok(LdosCurve { energies, values })
}

impl LdosCurve {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Two-column CSV `energy,ldos` with the model recorded as a comment.
    /// Extra comment lines (without the leading `#`) go first.
    pub fn write_csv<W: Write>(
        &self,
        w: &mut W,
        model: &ChainModel,
        comments: &[String],
    ) -> io::Result<()> {
        for line in comments {
            writeln!(w, "# {line}")?;
        }
        writeln!(
            w,
            "# model: eps0={:.16e},v0={:.16e},v={:.16e}",
            model.eps0(),
            model.v0(),
            model.v()
        )?;
        writeln!(w, "energy,ldos")?;
        for (e, n) in self.energies.iter().zip(&self.values) {
            writeln!(w, "{e:.16e},{n:.16e}")?;
        }
        Ok(())
    }
}
