//! Pinning cells can only raise the night optimum; pinning them to the
//! optimum's own values leaves it unchanged.

mod common;

#[test]
fn pinned_cells_never_lower_the_optimum() {
    if !common::cbc_available() {
        eprintln!("cbc not found; skipping");
        return;
    }
    let outcomes = common::monotone::run(20);
    assert_eq!(outcomes.len(), 20);
    assert!(outcomes.iter().map(|o| o.perturbed.len()).sum::<usize>() >= 40);
    for o in &outcomes {
        assert!(
            o.holds(),
            "seed {}: optimum {} unperturbed {} pinned {} perturbed {:?}",
            o.seed,
            o.optimum,
            o.unperturbed,
            o.pinned_to_optimum,
            o.perturbed
        );
    }
    // some edit must actually cost something, or the check is vacuous
    assert!(outcomes.iter().any(|o| o.perturbed.iter().any(|&z| z > o.optimum)));
}
