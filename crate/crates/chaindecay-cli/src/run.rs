//! Command runners: build the model, dispatch the computation, write
//! plot-ready CSV/JSON artifacts with the resolved config embedded.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chaindecay::measurement::sweep_tau;
use chaindecay::model::{build_chain, tridiagonalize, truncate, StarModel, TridiagonalHamiltonian};
use chaindecay::propagate::{evolve_eigen, BandQuadrature, Route};
use chaindecay::regimes::{analyze, effective_rate};
use chaindecay::spectral::{ldos_curve, Resonance};
use chaindecay::{ChainModel, RegimeReport};
use serde::Serialize;

use crate::config::{build_grid, header_comments, AppError, RouteArg, RunConfig};

/// Largest truncated chain the CLI will diagonalize (full spectral
/// decomposition is cubic in the site count).
const EIGEN_SITE_LIMIT: usize = 6000;

/// Execute the command described by `config`; returns the artifact paths.
pub fn run(config: &RunConfig) -> Result<Vec<PathBuf>, AppError> {
    let out_dir = PathBuf::from(&config.out);
    fs::create_dir_all(&out_dir)?;
    match config.command.as_str() {
        "ldos" => run_ldos(config, &out_dir),
        "evolve" => run_evolve(config, &out_dir),
        "regimes" => run_regimes(config, &out_dir),
        "zeno" => run_zeno(config, &out_dir),
        "tridiag" => run_tridiag(config, &out_dir),
        other => Err(AppError::Usage(format!("unknown command {other}"))),
    }
}

fn inline_model(config: &RunConfig) -> Result<ChainModel, AppError> {
    match (config.eps0, config.v0) {
        (Some(eps0), Some(v0)) => Ok(build_chain(eps0, v0, config.v)?),
        _ => Err(AppError::Usage(format!(
            "the {} command needs an inline chain model (--eps0 and --v0)",
            config.command
        ))),
    }
}

fn load_star(config: &RunConfig) -> Result<StarModel, AppError> {
    let path = config
        .star
        .as_ref()
        .expect("caller checked the star source");
    let text = fs::read_to_string(path)
        .map_err(|e| AppError::Usage(format!("cannot read star file {path}: {e}")))?;
    Ok(StarModel::from_json(&text)?)
}

fn write_artifact(path: &Path, bytes: &[u8]) -> Result<(), AppError> {
    let mut file = fs::File::create(path)?;
    file.write_all(bytes)?;
    Ok(())
}

fn run_ldos(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, AppError> {
    let model = inline_model(config)?;
    let curve = ldos_curve(&model, config.points)?;
    let mut buf = Vec::new();
    curve.write_csv(&mut buf, &model, &header_comments(config))?;
    let path = out_dir.join("ldos.csv");
    write_artifact(&path, &buf)?;
    Ok(vec![path])
}

fn run_evolve(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, AppError> {
    let times = build_grid(config);
    let comments = header_comments(config);

    if config.star.is_some() {
        // A star environment evolves through its equivalent chain.
        if config.route != RouteArg::Eigen {
            return Err(AppError::Usage(
                "star models evolve via --route eigen only".into(),
            ));
        }
        let star = load_star(config)?;
        let chain = tridiagonalize(&star, star.len() + 1)?;
        let series = evolve_eigen(&chain, &times)?;
        let mut buf = Vec::new();
        series.write_csv(&mut buf, &comments)?;
        let path = out_dir.join("survival_eigen.csv");
        write_artifact(&path, &buf)?;
        return Ok(vec![path]);
    }

    let model = inline_model(config)?;
    let routes: Vec<(Route, &str)> = match config.route {
        RouteArg::Both => vec![
            (Route::EigenOracle, "survival_eigen.csv"),
            (Route::LdosQuadrature, "survival_quadrature.csv"),
        ],
        RouteArg::Eigen => vec![(Route::EigenOracle, "survival_eigen.csv")],
        RouteArg::Quadrature => vec![(Route::LdosQuadrature, "survival_quadrature.csv")],
        RouteArg::Piecewise => vec![(Route::PiecewiseLaw, "survival_piecewise.csv")],
        RouteArg::Interpolation => vec![(Route::Interpolation, "survival_interpolation.csv")],
    };
    let t_max = *times.last().expect("non-empty grid");
    let mut paths = Vec::new();
    for (route, name) in routes {
        let series = match route {
            Route::EigenOracle => {
                let n = chaindecay::propagate::choose_chain_length(t_max, model.v(), 1.25);
                if n > EIGEN_SITE_LIMIT {
                    return Err(AppError::Usage(format!(
                        "t_max = {t_max} needs a {n}-site chain for the eigen oracle                          (limit {EIGEN_SITE_LIMIT}); use --route quadrature for long horizons"
                    )));
                }
                evolve_eigen(&truncate(&model, n)?, &times)?
            }
            Route::LdosQuadrature => {
                BandQuadrature::build(&model, t_max, config.quad_tol)?.series(&times)?
            }
            _ => chaindecay::propagate::SurvivalEvaluator::new(&model, route, t_max)?
                .series(&times)?,
        };
        let mut buf = Vec::new();
        series.write_csv(&mut buf, &comments)?;
        let path = out_dir.join(name);
        write_artifact(&path, &buf)?;
        paths.push(path);
    }
    Ok(paths)
}

#[derive(Serialize)]
struct RegimesArtifact<'a> {
    config: &'a RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    generated: Option<String>,
    resonance: &'a Resonance,
    report: &'a RegimeReport,
}

fn run_regimes(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, AppError> {
    let model = inline_model(config)?;
    let analysis = analyze(&model)?;
    let artifact = RegimesArtifact {
        config,
        generated: (!config.no_timestamp).then(|| chrono::Utc::now().to_rfc3339()),
        resonance: &analysis.resonance,
        report: &analysis.report,
    };
    let json_path = out_dir.join("regimes.json");
    let mut text = serde_json::to_string_pretty(&artifact).expect("artifact serializes");
    text.push('\n');
    write_artifact(&json_path, text.as_bytes())?;

    let trace = effective_rate(&analysis.series);
    let mut buf = Vec::new();
    trace.write_csv(&mut buf, &header_comments(config))?;
    let csv_path = out_dir.join("gamma_eff.csv");
    write_artifact(&csv_path, &buf)?;
    Ok(vec![json_path, csv_path])
}

fn run_zeno(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, AppError> {
    let model = inline_model(config)?;
    let route = config.route.to_route().ok_or_else(|| {
        AppError::Usage("--route both applies to evolve only; pick one route".into())
    })?;
    let taus = build_grid(config);
    if taus[0] <= 0.0 {
        return Err(AppError::Usage(
            "measurement periods must be positive; raise --t-min".into(),
        ));
    }
    if route == chaindecay::propagate::Route::EigenOracle {
        let n = chaindecay::propagate::choose_chain_length(config.t_max, 1.0, 1.25);
        if n > EIGEN_SITE_LIMIT {
            return Err(AppError::Usage(format!(
                "t_max = {} needs a {n}-site chain (limit {EIGEN_SITE_LIMIT});                  use --route quadrature or shorten the sweep",
                config.t_max
            )));
        }
    }
    let table = sweep_tau(&model, &taus, route)?;
    let mut buf = Vec::new();
    table.write_csv(&mut buf, &header_comments(config))?;
    let path = out_dir.join("zeno.csv");
    write_artifact(&path, &buf)?;
    Ok(vec![path])
}

fn run_tridiag(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, AppError> {
    let chain: TridiagonalHamiltonian = if config.star.is_some() {
        let star = load_star(config)?;
        let depth = config.sites.unwrap_or(star.len() + 1);
        tridiagonalize(&star, depth)?
    } else {
        let model = inline_model(config)?;
        let sites = config
            .sites
            .ok_or_else(|| AppError::Usage("tridiag on a chain model needs --sites <n>".into()))?;
        truncate(&model, sites)?
    };
    let mut buf = Vec::new();
    for line in header_comments(config) {
        writeln!(buf, "# {line}")?;
    }
    writeln!(buf, "site,eps,v_next")?;
    for i in 0..chain.len() {
        if i + 1 < chain.len() {
            writeln!(
                buf,
                "{i},{:.16e},{:.16e}",
                chain.diag()[i],
                chain.offdiag()[i]
            )?;
        } else {
            writeln!(buf, "{i},{:.16e},", chain.diag()[i])?;
        }
    }
    let path = out_dir.join("chain.csv");
    write_artifact(&path, &buf)?;
    Ok(vec![path])
}
