//! Decay dynamics of a local excitation coupled to a semi-infinite
//! tight-binding chain.
//!
//! An excitation prepared on the surface site of the chain
//!
//! ```text
//!   eps0 --V0-- 2V --V-- 2V --V-- 2V --V-- ...
//! ```
//!
//! leaks into the continuous band `[0, 4V]` of the environment. Its survival
//! probability `P00(t) = |<0| exp(-iHt) |0>|^2` passes through three regimes:
//! an early quadratic decay up to a spreading time `t_S`, an exponential
//! stage governed by a self-consistent golden-rule pole (rate `Gamma0`,
//! prefactor `A`), and an asymptotic `t^-3` power law fed by returns from the
//! band edges. Where the exponential hands over to the power law the two
//! amplitudes can interfere destructively and produce a *survival collapse*,
//! a dip of several orders of magnitude in `P00`. Repeated projective
//! measurement slows the decay when timed inside the quadratic stage (Zeno)
//! and accelerates it when timed at the collapse (anti-Zeno).
//!
//! The crate provides:
//!
//! - [`model`]: chain/star Hamiltonians and the recursion-method (Lanczos)
//!   mapping of a star environment onto an equivalent chain;
//! - [`spectral`]: closed-form surface self-energy, retarded Green function,
//!   local density of states and all resonance parameters;
//! - [`propagate`]: two independent numerical oracles for `P00(t)`
//!   (eigendecomposition of a truncated chain, and Fourier quadrature of the
//!   LDoS) plus pointwise evaluators for every route;
//! - [`regimes`]: the piecewise decay law, crossover times `t_S` and `t_R`,
//!   effective decay rate, survival-collapse detection and power-law fits;
//! - [`measurement`]: stroboscopic projective-measurement protocols and
//!   Zeno/anti-Zeno classification.
//!
//! Units: `hbar = 1` and the bulk hopping `V = 1`. Energies are in units of
//! `V`, times in `hbar/V`. [`model::ChainModel::new`] normalizes its inputs
//! accordingly.

pub mod error;
pub mod linalg;
pub mod measurement;
pub mod model;
pub mod propagate;
pub mod quad;
pub mod regimes;
pub mod spectral;

pub use error::{CoreError, Result};
pub use measurement::{MeasurementSchedule, ZenoClass};
pub use model::{ChainModel, StarModel, TridiagonalHamiltonian};
pub use propagate::{Route, SurvivalEvaluator, SurvivalSeries};
pub use regimes::RegimeReport;
pub use spectral::{LdosCurve, Resonance, ResonanceClass};
