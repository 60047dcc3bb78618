//! Fairness variables read straight from the solver's answer, against the
//! largest per-nurse penalty sum recomputed from the member rules.

use rostra::catalog::{epigraph_members, evaluate_soft, ConstraintId, Evaluation, Kind, Penalty};
use rostra::domain::{Roster, Stage, WardConfig};
use rostra::encoder::{encode_stage, VarRole};
use rostra::pipeline::Session;
use rostra::solver::{run_solver, solve_exact, ExactOptions, SolveStatus};
use rostra::synth;

fn to_f64(p: Penalty) -> f64 {
    *p.numer() as f64 / *p.denom() as f64
}

/// max over eligible nurses of Σ member per-nurse values (multipliers
/// included), floored at zero.
fn recompute(id: ConstraintId, cfg: &WardConfig, r: &Roster) -> Penalty {
    let nurses: Vec<usize> = match id.stage {
        Stage::Night => cfg.night_capable(),
        Stage::Day => (0..cfg.nurses.len()).collect(),
    };
    let mut sums = vec![Penalty::from_integer(0); cfg.nurses.len()];
    for &m in epigraph_members(id).unwrap() {
        if let Evaluation::Value(v) = evaluate_soft(ConstraintId::new(id.stage, Kind::Soft, m), r, cfg).unwrap() {
            for (n, x) in v.per_nurse.iter().enumerate() {
                sums[n] += x;
            }
        }
    }
    nurses.iter().map(|&n| sums[n]).max().unwrap_or_default().max(Penalty::from_integer(0))
}

/// (epigraphs checked, how many were positive)
pub fn check(stage: Stage, cfg: &WardConfig, input: &Roster) -> Option<(usize, usize)> {
    let inst = encode_stage(stage, cfg, input, false).unwrap();
    let parsed = run_solver(&inst, &ExactOptions::with_time(60.0)).unwrap();
    if parsed.status != SolveStatus::Optimal {
        return None;
    }
    let x: Vec<f64> = inst.vars.iter().map(|v| parsed.values.get(&v.name).copied().unwrap_or(0.0)).collect();
    let roster = inst.roster_from_values(&x, input).unwrap();
    let (mut seen, mut positive) = (0, 0);
    for (k, v) in inst.vars.iter().enumerate() {
        if let VarRole::Epigraph { constraint } = v.role {
            let want = recompute(constraint, cfg, &roster);
            let direct = match evaluate_soft(constraint, &roster, cfg).unwrap() {
                Evaluation::Value(e) => e.total,
                Evaluation::Disabled => panic!("{constraint} encoded while disabled"),
            };
            assert_eq!(want, direct, "{constraint}: epigraph evaluator against member sums");
            assert!((x[k] - to_f64(want)).abs() < 1e-6, "{constraint}: solver {} recomputed {}", x[k], want);
            seen += 1;
            positive += usize::from(want > Penalty::from_integer(0));
        }
    }
    Some((seen, positive))
}

/// Night and day instances of 16 random wards: (optimal instances,
/// epigraphs checked, epigraphs with a positive value).
pub fn sweep() -> (usize, usize, usize) {
    let (mut solved, mut seen, mut positive) = (0, 0, 0);
    for seed in 0..16 {
        let cfg = synth::random_ward(seed, 4, 7);
        let wishes = synth::random_wishes(&cfg, seed, 0.2);
        let night = solve_exact(Stage::Night, &cfg, &wishes, &ExactOptions::with_time(60.0)).unwrap();
        let mut inputs = vec![(Stage::Night, wishes.clone())];
        if let Some(r) = night.roster.filter(|_| night.report.hard_violations == 0) {
            let mut s = Session::from_edited_night("epi", cfg.clone(), r).unwrap();
            s.post_process_longday().unwrap();
            inputs.push((Stage::Day, s.stage_input(Stage::Day).unwrap()));
        }
        for (stage, input) in inputs {
            if let Some((a, b)) = check(stage, &cfg, &input) {
                solved += 1;
                seen += a;
                positive += b;
            }
        }
    }
    (solved, seen, positive)
}
