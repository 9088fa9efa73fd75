//! Hamiltonians: the semi-infinite surface-impurity chain, finite
//! truncations of it, and star environments together with the recursion
//! method that maps a star onto an equivalent chain.
//!
//! All types are immutable after construction and all operations are pure.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::spectral::{self, ResonanceClass};

/// Semi-infinite tight-binding chain with a surface site:
/// site energies `eps0, 2V, 2V, ...`, hoppings `V0, V, V, ...`.
///
/// Construction normalizes to `V = 1`, so stored energies are in units of
/// `V` and every time produced downstream is in `hbar/V`. The band is
/// `[0, 4]` with bandwidth `B = 4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainModel {
    eps0: f64,
    v0: f64,
    v: f64,
    well_defined: bool,
}

impl ChainModel {
    pub const HBAR: f64 = 1.0;

    /// Build a chain model from the surface energy `eps0`, surface hopping
    /// `v0` and bulk hopping `v` (all in the caller's energy unit; the model
    /// rescales so that `v = 1`).
    pub fn new(eps0: f64, v0: f64, v: f64) -> Result<Self> {
        if !v.is_finite() || v <= 0.0 {
            return Err(CoreError::InvalidParameter(format!(
                "bulk hopping must be positive and finite, got {v}"
            )));
        }
        if !v0.is_finite() || v0 <= 0.0 {
            return Err(CoreError::InvalidParameter(format!(
                "surface hopping must be positive and finite, got {v0} (v0 = 0 decouples the site)"
            )));
        }
        if !eps0.is_finite() {
            return Err(CoreError::InvalidParameter("eps0 must be finite".into()));
        }
        let mut model = Self {
            eps0: eps0 / v,
            v0: v0 / v,
            v: 1.0,
            well_defined: false,
        };
        model.well_defined = spectral::classify_resonance(&model) == ResonanceClass::WellDefined;
        Ok(model)
    }

    /// Surface site energy in units of `V`.
    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    /// Surface hopping in units of `V`.
    pub fn v0(&self) -> f64 {
        self.v0
    }

    /// Bulk hopping; always 1 after normalization.
    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn band_lower(&self) -> f64 {
        0.0
    }

    pub fn band_upper(&self) -> f64 {
        4.0 * self.v
    }

    /// Bandwidth `B = 4V`.
    pub fn bandwidth(&self) -> f64 {
        4.0 * self.v
    }

    /// Whether the pole is a well-defined in-band resonance (`v0 < v` and
    /// the resonance inside the band); fixed at construction.
    pub fn is_well_defined(&self) -> bool {
        self.well_defined
    }
}

/// One environment level of a [`StarModel`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarLevel {
    pub energy: f64,
    pub coupling: f64,
}

/// A single level `eps0` coupled by `V_0j` to `N` environment levels
/// `eps_j`; the input of the recursion method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarModel {
    eps0: f64,
    levels: Vec<StarLevel>,
}

impl StarModel {
    pub fn new(eps0: f64, levels: Vec<StarLevel>) -> Result<Self> {
        if levels.is_empty() {
            return Err(CoreError::InvalidParameter(
                "star model needs at least one environment level".into(),
            ));
        }
        if levels
            .iter()
            .any(|l| !l.energy.is_finite() || !l.coupling.is_finite())
            || !eps0.is_finite()
        {
            return Err(CoreError::InvalidParameter(
                "star model entries must be finite".into(),
            ));
        }
        if levels.iter().all(|l| l.coupling == 0.0) {
            return Err(CoreError::InvalidParameter(
                "all couplings vanish; the level is decoupled".into(),
            ));
        }
        Ok(Self { eps0, levels })
    }

    /// Parse the JSON form `{"eps0": f, "levels": [{"energy": f, "coupling": f}, ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: StarModel = serde_json::from_str(text)
            .map_err(|e| CoreError::InvalidParameter(format!("malformed star JSON: {e}")))?;
        Self::new(raw.eps0, raw.levels)
    }

    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    pub fn levels(&self) -> &[StarLevel] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Unfold the environment of a finite chain into star form: diagonalize
    /// the chain without its 0th site and couple `|0>` to the environment
    /// eigenstates. Inverse of [`tridiagonalize`] up to the recursion's sign
    /// gauge.
    pub fn from_chain(chain: &TridiagonalHamiltonian) -> Result<Self> {
        if chain.len() < 2 {
            return Err(CoreError::InvalidParameter(
                "chain must have an environment (length >= 2)".into(),
            ));
        }
        let env_diag = &chain.diag()[1..];
        let env_off = &chain.offdiag()[1..];
        let eig = crate::linalg::eigh_tridiagonal(env_diag, env_off)?;
        let levels = (0..eig.dim())
            .map(|k| {
                // Inverse-iteration polish: weakly coupled levels live in the
                // tiny first component, which the QL sweep alone leaves with
                // only absolute accuracy.
                let mut vector = eig.vector(k).to_vec();
                crate::linalg::refine_eigenpair(env_diag, env_off, eig.values()[k], &mut vector);
                StarLevel {
                    energy: eig.values()[k],
                    coupling: chain.offdiag()[0] * vector[0],
                }
            })
            .collect();
        Self::new(chain.diag()[0], levels)
    }
}

/// A finite symmetric tridiagonal Hamiltonian: site energies `diag` and
/// strictly positive hoppings `offdiag` (recursion-method magnitudes; the
/// hopping sign gauge does not affect survival probabilities).
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalHamiltonian {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl TridiagonalHamiltonian {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(CoreError::InvalidParameter(
                "tridiagonal Hamiltonian needs at least one site".into(),
            ));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(CoreError::InvalidParameter(format!(
                "offdiag length {} does not match {} sites",
                offdiag.len(),
                diag.len()
            )));
        }
        if diag.iter().chain(offdiag.iter()).any(|x| !x.is_finite()) {
            return Err(CoreError::InvalidParameter(
                "non-finite Hamiltonian entry".into(),
            ));
        }
        if offdiag.iter().any(|&x| x <= 0.0) {
            return Err(CoreError::InvalidParameter(
                "hoppings must be strictly positive magnitudes".into(),
            ));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }
}

/// Build a [`ChainModel`]; the free function mirrors the other operations.
pub fn build_chain(eps0: f64, v0: f64, v: f64) -> Result<ChainModel> {
    ChainModel::new(eps0, v0, v)
}

/// Truncate the semi-infinite chain to `n_sites` sites; the finite oracle
/// for the exact model.
pub fn truncate(model: &ChainModel, n_sites: usize) -> Result<TridiagonalHamiltonian> {
    if n_sites < 2 {
        return Err(CoreError::InvalidParameter(format!(
            "need at least 2 sites to retain an environment, got {n_sites}"
        )));
    }
    let mut diag = vec![2.0 * model.v(); n_sites];
    diag[0] = model.eps0();
    let mut offdiag = vec![model.v(); n_sites - 1];
    offdiag[0] = model.v0();
    TridiagonalHamiltonian::new(diag, offdiag)
}

/// Residual threshold below which the Krylov space is declared exhausted.
const RECURSION_BREAKDOWN: f64 = 1e-12;

/// Map a star environment onto an equivalent chain by the recursion method
/// (Lanczos with full reorthogonalization, started from the central level).
///
/// The first coefficients are `eps~0 = eps0`, `V~0 = sqrt(sum_j V_0j^2)`,
/// `eps~1 = sum_j V_0j^2 eps_j / V~0^2`. The returned chain may be shorter
/// than `depth` when the invariant subspace is exhausted first; its length
/// is the effective depth.
pub fn tridiagonalize(star: &StarModel, depth: usize) -> Result<TridiagonalHamiltonian> {
    let n = star.len();
    if depth == 0 {
        return Err(CoreError::InvalidParameter("depth must be >= 1".into()));
    }
    if depth > n + 1 {
        return Err(CoreError::InvalidParameter(format!(
            "depth {depth} exceeds the {} states of the star",
            n + 1
        )));
    }

    // Vectors live in the basis {|0>, |1>, ..., |N>}.
    let dim = n + 1;
    let apply = |x: &[f64], y: &mut [f64]| {
        y[0] = star.eps0 * x[0];
        for (j, l) in star.levels.iter().enumerate() {
            y[0] += l.coupling * x[j + 1];
            y[j + 1] = l.coupling * x[0] + l.energy * x[j + 1];
        }
    };

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(depth);
    let mut v0 = vec![0.0; dim];
    v0[0] = 1.0;
    basis.push(v0);

    let mut diag = Vec::with_capacity(depth);
    let mut offdiag = Vec::with_capacity(depth.saturating_sub(1));
    let mut w = vec![0.0; dim];

    for step in 0..depth {
        let v = basis.last().expect("basis never empty").clone();
        apply(&v, &mut w);
        let alpha = dot(&w, &v);
        diag.push(alpha);
        if step + 1 == depth {
            break;
        }
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi -= alpha * vi;
        }
        if basis.len() > 1 {
            let prev = &basis[basis.len() - 2];
            let beta_prev = offdiag[offdiag.len() - 1];
            for (wi, pi) in w.iter_mut().zip(prev) {
                *wi -= beta_prev * pi;
            }
        }
        // Full reorthogonalization; two passes keep degenerate stars clean.
        for _ in 0..2 {
            for u in &basis {
                let proj = dot(&w, u);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= proj * ui;
                }
            }
        }
        let beta = dot(&w, &w).sqrt();
        if beta < RECURSION_BREAKDOWN {
            // Invariant subspace exhausted: report the effective depth.
            break;
        }
        offdiag.push(beta);
        basis.push(w.iter().map(|x| x / beta).collect());
    }

    TridiagonalHamiltonian::new(diag, offdiag)
}

/// Local second moment of the star Hamiltonian on the central level,
/// `V~0^2 = sum_j |V_0j|^2`.
pub fn second_moment(star: &StarModel) -> f64 {
    star.levels.iter().map(|l| l.coupling * l.coupling).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn chain_model_normalizes_and_flags() {
        let m = ChainModel::new(1.0, 0.4, 1.0).unwrap();
        assert_eq!(m.bandwidth(), 4.0);
        assert!(m.is_well_defined());
        let m = ChainModel::new(1.8, 0.77, 1.0).unwrap();
        assert_eq!(m.bandwidth(), 4.0);
        assert!(m.is_well_defined());
        // Rescaled inputs land on the same normalized model.
        let a = ChainModel::new(2.0, 0.8, 2.0).unwrap();
        let b = ChainModel::new(1.0, 0.4, 1.0).unwrap();
        assert_abs_diff_eq!(a.eps0(), b.eps0(), epsilon = 1e-15);
        assert_abs_diff_eq!(a.v0(), b.v0(), epsilon = 1e-15);
    }

    #[test]
    fn decoupled_or_bad_parameters_are_rejected() {
        assert!(ChainModel::new(2.0, 0.0, 1.0).is_err());
        assert!(ChainModel::new(2.0, -0.4, 1.0).is_err());
        assert!(ChainModel::new(2.0, 0.4, 0.0).is_err());
        assert!(ChainModel::new(f64::NAN, 0.4, 1.0).is_err());
    }

    #[test]
    fn truncate_builds_the_expected_matrix() {
        let m = ChainModel::new(1.0, 0.4, 1.0).unwrap();
        let h = truncate(&m, 4).unwrap();
        assert_eq!(h.diag(), &[1.0, 2.0, 2.0, 2.0]);
        assert_eq!(h.offdiag(), &[0.4, 1.0, 1.0]);
        let h = truncate(&m, 2).unwrap();
        assert_eq!(h.diag(), &[1.0, 2.0]);
        assert_eq!(h.offdiag(), &[0.4]);
        assert!(truncate(&m, 1).is_err());
    }

    #[test]
    fn one_level_star_is_already_a_chain() {
        let star = StarModel::new(
            0.3,
            vec![StarLevel {
                energy: 1.2,
                coupling: 0.7,
            }],
        )
        .unwrap();
        let h = tridiagonalize(&star, 2).unwrap();
        assert_eq!(h.diag(), &[0.3, 1.2]);
        assert_eq!(h.offdiag(), &[0.7]);
    }

    #[test]
    fn equal_levels_collapse_to_one_effective_site() {
        let star = StarModel::new(
            0.0,
            vec![
                StarLevel {
                    energy: 1.5,
                    coupling: 0.4,
                },
                StarLevel {
                    energy: 1.5,
                    coupling: 0.4,
                },
            ],
        )
        .unwrap();
        let h = tridiagonalize(&star, 3).unwrap();
        // V~0 = c sqrt(2), eps~1 = weighted mean = 1.5; the second hopping
        // vanishes, so the recursion stops at effective depth 2.
        assert_eq!(h.len(), 2);
        assert_abs_diff_eq!(h.offdiag()[0], 0.4 * 2f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(h.diag()[1], 1.5, epsilon = 1e-14);
    }

    #[test]
    fn second_moment_is_sum_of_squares() {
        let star = StarModel::new(
            0.0,
            vec![
                StarLevel {
                    energy: 0.0,
                    coupling: 3.0,
                },
                StarLevel {
                    energy: 1.0,
                    coupling: 4.0,
                },
            ],
        )
        .unwrap();
        assert_abs_diff_eq!(second_moment(&star), 25.0, epsilon = 1e-14);
        let single = StarModel::new(
            0.0,
            vec![StarLevel {
                energy: 0.0,
                coupling: 0.4,
            }],
        )
        .unwrap();
        assert_abs_diff_eq!(second_moment(&single), 0.16, epsilon = 1e-16);
    }

    #[test]
    fn star_validation() {
        assert!(StarModel::new(0.0, vec![]).is_err());
        assert!(StarModel::new(
            0.0,
            vec![StarLevel {
                energy: 1.0,
                coupling: 0.0
            }]
        )
        .is_err());
    }

    #[test]
    fn star_json_round_trip() {
        let text = r#"{"eps0": 1.25, "levels": [{"energy": 0.5, "coupling": 0.1},
                                                  {"energy": 1.5, "coupling": -0.2}]}"#;
        let star = StarModel::from_json(text).unwrap();
        assert_eq!(star.len(), 2);
        assert_abs_diff_eq!(star.eps0(), 1.25, epsilon = 1e-15);
        assert_abs_diff_eq!(star.levels()[1].coupling, -0.2, epsilon = 1e-15);
        assert!(StarModel::from_json("{\"eps0\": 1.0}").is_err());
    }

    #[test]
    fn depth_bounds_are_enforced() {
        let star = StarModel::new(
            0.0,
            vec![StarLevel {
                energy: 1.0,
                coupling: 0.5,
            }],
        )
        .unwrap();
        assert!(tridiagonalize(&star, 0).is_err());
        assert!(tridiagonalize(&star, 3).is_err());
    }

    /// Eigenvalues of the arrowhead (star) matrix by bisection on the secular
    /// function f(x) = x - eps0 - sum_j c_j^2/(x - e_j); an oracle independent
    /// of both the Lanczos recursion and the QL eigensolver.
    fn arrowhead_eigenvalues(star: &StarModel) -> Vec<f64> {
        let mut poles: Vec<f64> = star.levels().iter().map(|l| l.energy).collect();
        poles.sort_by(f64::total_cmp);
        let secular = |x: f64| -> f64 {
            x - star.eps0()
                - star
                    .levels()
                    .iter()
                    .map(|l| l.coupling * l.coupling / (x - l.energy))
                    .sum::<f64>()
        };
        let couplings_norm: f64 = second_moment(star).sqrt();
        let lo = poles[0].min(star.eps0()) - couplings_norm - 1.0;
        let hi = poles[poles.len() - 1].max(star.eps0()) + couplings_norm + 1.0;
        let mut brackets = Vec::new();
        brackets.push((lo, poles[0]));
        for w in poles.windows(2) {
            brackets.push((w[0], w[1]));
        }
        brackets.push((poles[poles.len() - 1], hi));
        let shrink = 1e-11;
        brackets
            .into_iter()
            .map(|(mut a, mut b)| {
                // Secular function rises from -inf to +inf inside each bracket.
                a += shrink * (b - a).abs().max(1e-8);
                b -= shrink * (b - a).abs().max(1e-8);
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    if secular(mid) > 0.0 {
                        b = mid;
                    } else {
                        a = mid;
                    }
                }
                0.5 * (a + b)
            })
            .collect()
    }

    #[test]
    fn full_depth_recursion_preserves_the_star_spectrum() {
        let star = StarModel::new(
            0.7,
            vec![
                StarLevel {
                    energy: -1.0,
                    coupling: 0.3,
                },
                StarLevel {
                    energy: 0.2,
                    coupling: 0.5,
                },
                StarLevel {
                    energy: 1.4,
                    coupling: 0.1,
                },
                StarLevel {
                    energy: 2.9,
                    coupling: 0.8,
                },
            ],
        )
        .unwrap();
        let h = tridiagonalize(&star, star.len() + 1).unwrap();
        assert_eq!(h.len(), star.len() + 1);
        let eig = crate::linalg::eigh_tridiagonal(h.diag(), h.offdiag()).unwrap();
        let oracle = arrowhead_eigenvalues(&star);
        for (got, want) in eig.values().iter().zip(&oracle) {
            assert_abs_diff_eq!(got, want, epsilon = 1e-10);
        }
    }

    fn roundtrip_chain(diag: Vec<f64>, off: Vec<f64>, tol: f64) {
        let chain = TridiagonalHamiltonian::new(diag, off).unwrap();
        let star = StarModel::from_chain(&chain).unwrap();
        let rebuilt = tridiagonalize(&star, chain.len()).unwrap();
        assert_eq!(rebuilt.len(), chain.len());
        for (a, b) in rebuilt.diag().iter().zip(chain.diag()) {
            assert_abs_diff_eq!(a, b, epsilon = tol);
        }
        for (a, b) in rebuilt.offdiag().iter().zip(chain.offdiag()) {
            assert_abs_diff_eq!(a, b, epsilon = tol);
        }
    }

    #[test]
    fn chain_star_chain_round_trip_to_length_50() {
        let n = 50;
        let mut diag = vec![2.0; n];
        diag[0] = 1.0;
        let mut off = vec![1.0; n - 1];
        off[0] = 0.4;
        roundtrip_chain(diag, off, 1e-10);
    }

    #[test]
    fn second_moment_matches_first_recursion_hopping() {
        let star = StarModel::new(
            0.1,
            vec![
                StarLevel {
                    energy: 0.4,
                    coupling: 0.25,
                },
                StarLevel {
                    energy: 2.2,
                    coupling: -0.6,
                },
            ],
        )
        .unwrap();
        let h = tridiagonalize(&star, 2).unwrap();
        // sqrt followed by squaring costs at most one rounding step.
        let ratio = h.offdiag()[0] * h.offdiag()[0] / second_moment(&star);
        assert!((ratio - 1.0).abs() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn random_chains_round_trip(
            len in 2usize..28,
            seed in any::<u64>(),
        ) {
            let mut state = seed | 1;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64
            };
            let diag: Vec<f64> = (0..len).map(|_| 4.0 * next() - 1.0).collect();
            let off: Vec<f64> = (0..len - 1).map(|_| 0.1 + 1.4 * next()).collect();
            roundtrip_chain(diag, off, 1e-9);
        }
    }
}
