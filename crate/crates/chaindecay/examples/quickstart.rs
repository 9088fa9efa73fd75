//! Minimal tour: resonance parameters, regime analysis and a pointwise
//! survival oracle for the weak-coupling reference chain.

use chaindecay::model::build_chain;
use chaindecay::propagate::{Route, SurvivalEvaluator};
use chaindecay::regimes::analyze;

fn main() -> chaindecay::Result<()> {
    let model = build_chain(1.0, 0.4, 1.0)?;

    let analysis = analyze(&model)?;
    println!(
        "resonance: eps_r = {:.4}, Gamma0 = {:.4}, A = {:.4}",
        analysis.resonance.eps_r, analysis.resonance.gamma0, analysis.resonance.prefactor_a
    );
    println!(
        "crossovers: t_S = {:.3}, t_R iterates = {:?}",
        analysis.report.t_s,
        &analysis.report.t_r_iterates[..2]
    );
    if let (Some(t), Some(d)) = (
        analysis.report.collapse_time,
        analysis.report.collapse_depth,
    ) {
        println!("survival collapse at t = {t:.2} ({d:.1} decades deep)");
    }

    let oracle = SurvivalEvaluator::new(&model, Route::EigenOracle, 50.0)?;
    println!("P00(10) = {:.6e}", oracle.p00(10.0)?);
    Ok(())
}
