//! Long random move sequences through the annealer's incremental state,
//! checked after every move against full recomputation, the compiled terms
//! and (periodically) the direct evaluator.

use rand::Rng;
use rostra::catalog::{compile_stage, evaluate_stage, hard_magnitude, Penalty};
use rostra::domain::{Roster, Stage, WardConfig};
use rostra::encoder::free_mask;
use rostra::pipeline::Session;
use rostra::solver::anneal::initial_cells;
use rostra::solver::AnnealState;
use rostra::synth;

const HW: i64 = 1_000_000;

fn stage_input(stage: Stage, cfg: &WardConfig, seed: u64) -> Roster {
    let w = synth::wishes(cfg, seed, 2);
    match stage {
        Stage::Night => w,
        Stage::Day => {
            let mut s = Session::from_edited_night("inc", cfg.clone(), w).unwrap();
            s.post_process_longday().unwrap();
            s.stage_input(Stage::Day).unwrap()
        }
    }
}

/// Returns the number of moves applied.
pub fn run(stage: Stage, cfg: &WardConfig, seed: u64, moves: usize, direct_every: usize) -> usize {
    let input = stage_input(stage, cfg, seed);
    let compiled = compile_stage(stage, cfg);
    let free = free_mask(stage, &input, cfg);
    let cells = initial_cells(stage, cfg, &input, &free);
    let alphabet = cfg.stage_alphabet(stage).iter().collect();
    let mut st = AnnealState::new(&compiled, cells, free.clone(), alphabet, HW);
    let free_cells: Vec<usize> = (0..free.len()).filter(|&c| free[c]).collect();
    assert!(!free_cells.is_empty());
    let mut rng = synth::rng(seed ^ 0x1ac);
    let mut roster = input.clone();
    let mut applied = 0;
    for step in 0..moves {
        let before = st.cost();
        let m = st.random_move(stage == Stage::Night, &free_cells, &mut rng);
        let ch = st.changes(&m);
        let delta = st.apply(&ch);
        assert_eq!(st.cost(), before + delta, "{stage} seed {seed} step {step}: reported delta");
        applied += 1;
        if rng.random_bool(0.3) {
            st.undo();
            assert_eq!(st.cost(), before, "{stage} seed {seed} step {step}: undo");
        }
        let (soft, hard) = st.recompute_scaled();
        assert_eq!(st.cost(), HW * hard + soft, "{stage} seed {seed} step {step}: {m:?}");
        assert_eq!(st.soft_value(), compiled.objective(st.cells()), "{stage} seed {seed} step {step}");
        assert_eq!(st.hard_value(), compiled.hard_excess(st.cells()), "{stage} seed {seed} step {step}");
        if step % direct_every == 0 {
            for (c, &s) in st.cells().iter().enumerate() {
                roster.set_symbol(c, s);
            }
            let direct = evaluate_stage(stage, &roster, cfg).unwrap().objective;
            assert_eq!(st.soft_value(), direct, "{stage} seed {seed} step {step}: direct evaluator");
            if st.hard_value() == Penalty::from_integer(0) {
                for t in compiled.hard_terms() {
                    assert_eq!(hard_magnitude(t.id, &roster, cfg).unwrap(), Penalty::from_integer(0), "{}", t.id);
                }
            }
        }
    }
    applied
}

/// Six random wards, both stages; returns the number of moves checked.
pub fn random_wards() -> usize {
    let mut total = 0;
    for seed in 0..6 {
        let cfg = synth::random_ward(seed, 5 + seed as usize % 3, 10);
        for stage in [Stage::Night, Stage::Day] {
            total += run(stage, &cfg, seed, 1_200, 150);
        }
    }
    total
}
