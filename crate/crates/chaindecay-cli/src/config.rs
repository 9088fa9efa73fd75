//! Run configuration: command-line flags layered over an optional JSON
//! config file over built-in defaults. The resolved [`RunConfig`] is
//! embedded verbatim in every artifact so a run can be reproduced from its
//! output alone.

use std::fmt;
use std::path::PathBuf;

use chaindecay::propagate::Route;
use chaindecay::CoreError;
use serde::{Deserialize, Serialize};

/// Errors split by exit code: usage problems exit 1, numeric failures 2.
#[derive(Debug)]
pub enum AppError {
    Usage(String),
    Numeric(String),
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Usage(m) => write!(f, "{m}"),
            AppError::Numeric(m) => write!(f, "{m}"),
        }
    }
}

impl From<CoreError> for AppError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::InvalidParameter(_)
            | CoreError::OutsideBand { .. }
            | CoreError::NotWellDefined(_) => AppError::Usage(err.to_string()),
            CoreError::QuadratureAccuracy { .. }
            | CoreError::EigenNonConvergence { .. }
            | CoreError::InsufficientData(_) => AppError::Numeric(err.to_string()),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(err: std::io::Error) -> Self {
        AppError::Numeric(format!("i/o failure: {err}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RouteArg {
    Eigen,
    Quadrature,
    Piecewise,
    Interpolation,
    /// Both numerical oracles (evolve only).
    Both,
}

impl RouteArg {
    pub fn to_route(self) -> Option<Route> {
        match self {
            RouteArg::Eigen => Some(Route::EigenOracle),
            RouteArg::Quadrature => Some(Route::LdosQuadrature),
            RouteArg::Piecewise => Some(Route::PiecewiseLaw),
            RouteArg::Interpolation => Some(Route::Interpolation),
            RouteArg::Both => None,
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// Surface site energy eps0 (units of V)
    #[arg(long)]
    pub eps0: Option<f64>,
    /// Surface hopping V0 (units of V)
    #[arg(long)]
    pub v0: Option<f64>,
    /// Bulk hopping V (sets the energy unit)
    #[arg(long)]
    pub v: Option<f64>,
    /// Star-environment JSON file (conflicts with --eps0/--v0)
    #[arg(long)]
    pub star: Option<PathBuf>,
    /// First grid time (or measurement period)
    #[arg(long)]
    pub t_min: Option<f64>,
    /// Last grid time (or measurement period)
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of grid points
    #[arg(long)]
    pub points: Option<usize>,
    /// Grid spacing
    #[arg(long, value_enum)]
    pub spacing: Option<Spacing>,
    /// Production route for survival probabilities
    #[arg(long, value_enum)]
    pub route: Option<RouteArg>,
    /// Output directory for artifacts
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON config file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Omit the wall-clock line from artifact headers (byte-reproducible output)
    #[arg(long)]
    pub no_timestamp: bool,
    /// Chain sites: truncation length (tridiag on a chain model) or
    /// recursion depth cap (tridiag on a star)
    #[arg(long)]
    pub sites: Option<usize>,
    /// Absolute amplitude accuracy target of the quadrature route
    #[arg(long)]
    pub quad_tol: Option<f64>,
}

/// Subset of [`RunConfig`] accepted from a JSON config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub eps0: Option<f64>,
    pub v0: Option<f64>,
    pub v: Option<f64>,
    pub star: Option<String>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub points: Option<usize>,
    pub spacing: Option<Spacing>,
    pub route: Option<RouteArg>,
    pub out: Option<String>,
    pub no_timestamp: Option<bool>,
    pub sites: Option<usize>,
    pub quad_tol: Option<f64>,
}

/// The fully resolved run configuration; serialized into artifact headers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v0: Option<f64>,
    pub v: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub star: Option<String>,
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub spacing: Spacing,
    pub route: RouteArg,
    pub out: String,
    pub no_timestamp: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sites: Option<usize>,
    pub quad_tol: f64,
}

// Missing fields default on re-parse so older headers stay readable.
impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: String::new(),
            eps0: None,
            v0: None,
            v: 1.0,
            star: None,
            t_min: 0.01,
            t_max: 100.0,
            points: 2000,
            spacing: Spacing::Log,
            route: RouteArg::Eigen,
            out: ".".into(),
            no_timestamp: false,
            sites: None,
            quad_tol: 1e-10,
        }
    }
}

/// Layer flags over the optional config file over defaults, then validate.
pub fn resolve(command: &str, args: &CommonArgs) -> Result<RunConfig, AppError> {
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                AppError::Usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            serde_json::from_str::<FileConfig>(&text)
                .map_err(|e| AppError::Usage(format!("malformed config {}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };

    let defaults = RunConfig::default();
    let config = RunConfig {
        command: command.to_string(),
        eps0: args.eps0.or(file.eps0),
        v0: args.v0.or(file.v0),
        v: args.v.or(file.v).unwrap_or(defaults.v),
        star: args
            .star
            .as_ref()
            .map(|p| p.display().to_string())
            .or(file.star),
        t_min: args.t_min.or(file.t_min).unwrap_or(defaults.t_min),
        t_max: args.t_max.or(file.t_max).unwrap_or(defaults.t_max),
        // The LDoS curve resolves its band-edge onsets with the denser
        // default grid; time grids default to 2000 points.
        points: args.points.or(file.points).unwrap_or(if command == "ldos" {
            chaindecay::spectral::LDOS_GRID_POINTS
        } else {
            defaults.points
        }),
        spacing: args.spacing.or(file.spacing).unwrap_or(defaults.spacing),
        route: args.route.or(file.route).unwrap_or(defaults.route),
        out: args
            .out
            .as_ref()
            .map(|p| p.display().to_string())
            .or(file.out)
            .unwrap_or(defaults.out),
        no_timestamp: args.no_timestamp || file.no_timestamp.unwrap_or(false),
        sites: args.sites.or(file.sites),
        quad_tol: args.quad_tol.or(file.quad_tol).unwrap_or(defaults.quad_tol),
    };
    validate(&config)?;
    Ok(config)
}

fn validate(config: &RunConfig) -> Result<(), AppError> {
    let inline = config.eps0.is_some() || config.v0.is_some();
    if inline && config.star.is_some() {
        return Err(AppError::Usage(
            "conflicting model sources: give either --eps0/--v0 or --star, not both".into(),
        ));
    }
    if !inline && config.star.is_none() {
        return Err(AppError::Usage(
            "no model given: set --eps0 and --v0, or --star <file>".into(),
        ));
    }
    if inline && (config.eps0.is_none() || config.v0.is_none()) {
        return Err(AppError::Usage(
            "an inline model needs both --eps0 and --v0".into(),
        ));
    }
    if config.t_min.partial_cmp(&config.t_max) != Some(std::cmp::Ordering::Less) {
        return Err(AppError::Usage(format!(
            "need t_min < t_max, got {} and {}",
            config.t_min, config.t_max
        )));
    }
    if config.points < 2 {
        return Err(AppError::Usage("need at least 2 grid points".into()));
    }
    if config.spacing == Spacing::Log && config.t_min <= 0.0 {
        return Err(AppError::Usage(
            "log spacing needs t_min > 0 (use --spacing linear to start at 0)".into(),
        ));
    }
    if !config.quad_tol.is_finite() || config.quad_tol <= 0.0 {
        return Err(AppError::Usage("quad_tol must be positive".into()));
    }
    Ok(())
}

/// The time (or measurement-period) grid described by the config.
pub fn build_grid(config: &RunConfig) -> Vec<f64> {
    let n = config.points;
    let last = (n - 1) as f64;
    match config.spacing {
        Spacing::Linear => (0..n)
            .map(|i| config.t_min + (config.t_max - config.t_min) * i as f64 / last)
            .collect(),
        Spacing::Log => {
            let ratio = config.t_max / config.t_min;
            (0..n)
                .map(|i| config.t_min * ratio.powf(i as f64 / last))
                .collect()
        }
    }
}

/// Header comment lines (without the `#`) shared by every CSV artifact.
pub fn header_comments(config: &RunConfig) -> Vec<String> {
    let mut lines = vec![format!(
        "config: {}",
        serde_json::to_string(config).expect("config serializes")
    )];
    if !config.no_timestamp {
        lines.push(format!("generated: {}", chrono::Utc::now().to_rfc3339()));
    }
    lines
}
