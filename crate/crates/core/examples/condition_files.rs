//! Read a ward condition file, report what it leaves unset, override a few
//! soft weights and write the normalised file back out.
//!
//! cargo run --example condition_files

use std::path::Path;

use rostra::catalog::ConstraintId;
use rostra::io;

fn main() -> rostra::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/ward_a.toml");
    let (mut cfg, warnings) = io::load_condition_file(&io::read_text(&path)?)?;
    println!("{}: {} nurses, {} target days from {}", path.display(), cfg.nurses.len(), cfg.calendar.target_len(), cfg.calendar.target_days()[0]);
    for w in &warnings {
        let ids: Vec<String> = w.constraints.iter().map(|c| c.to_string()).collect();
        println!("warning {}: {} [{}]", w.field, w.message, ids.join(" "));
    }

    // weight tables are TOML keyed by constraint id
    let table = io::load_weight_table("\"Sn-N-26\" = 40\n\"Sd-N-29\" = 2\n")?;
    cfg.weights.alpha.extend(table);
    println!("Sn-N-26 weight is now {}", cfg.weights.alpha("Sn-N-26".parse::<ConstraintId>()?));
    println!("{}", io::weight_table_to_toml(&cfg.weights.alpha).lines().take(4).collect::<Vec<_>>().join("\n"));

    let text = io::condition_to_toml(&cfg)?;
    let (again, _) = io::load_condition_file(&text)?;
    assert_eq!(io::condition_to_toml(&again)?, text);
    println!("round trip stable ({} lines)", text.lines().count());
    Ok(())
}
