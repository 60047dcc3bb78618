//! Enumerate every night roster of a tiny ward and compare the best one
//! with the integer program solved by CBC.
//!
//! cargo run --example exhaustive_oracle [seed]

use rostra::catalog::evaluate_stage;
use rostra::domain::Stage;
use rostra::solver::{brute_force, find_cbc, solve_exact, ExactOptions};
use rostra::synth;

fn main() -> rostra::Result<()> {
    let first: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    // random wishes are often contradictory; take the first seed that is not
    let (cfg, wishes, best) = (first..first + 50)
        .find_map(|seed| {
            let cfg = synth::random_ward(seed, 3, 5);
            let wishes = synth::random_wishes(&cfg, seed, 0.45);
            match brute_force(Stage::Night, &cfg, &wishes, 2_000_000) {
                Ok(Some(best)) => {
                    println!("seed {seed}: {} nurses, {} target days", cfg.nurses.len(), cfg.calendar.target_len());
                    Some((cfg, wishes, best))
                }
                _ => None,
            }
        })
        .expect("a feasible seed");
    println!("enumeration: optimum {} after {} full rosters", best.objective, best.combinations);
    for line in best.roster.render_rows() {
        println!("  {line}");
    }

    if find_cbc().is_err() {
        println!("cbc not found; skipping the exact solve");
        return Ok(());
    }
    let sol = solve_exact(Stage::Night, &cfg, &wishes, &ExactOptions::with_time(30.0))?;
    let exact = sol.report.objective.expect("feasible");
    let evaluated = evaluate_stage(Stage::Night, sol.roster.as_ref().unwrap(), &cfg)?.objective;
    println!("cbc: {} {exact}, evaluator on its roster {evaluated}", sol.report.status);
    assert_eq!(exact, best.objective);
    Ok(())
}
