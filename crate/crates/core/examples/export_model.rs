//! Write a stage's 0-1 program as LP and MPS text for any external solver,
//! then read both back and check they describe the same model.
//!
//! cargo run --example export_model [out_dir]

use std::path::PathBuf;

use rostra::domain::Stage;
use rostra::encoder::{encode_stage, lp};
use rostra::synth;

fn main() -> rostra::Result<()> {
    let out: PathBuf = std::env::args().nth(1).map(Into::into).unwrap_or_else(std::env::temp_dir).join("rostra-model");
    std::fs::create_dir_all(&out).map_err(|e| rostra::Error::io(&out, e))?;
    let cfg = synth::random_ward(5, 6, 14);
    let wishes = synth::wishes(&cfg, 5, 2);
    let inst = encode_stage(Stage::Night, &cfg, &wishes, false)?;
    println!("night program: {} variables, {} rows, objective offset {}", inst.vars.len(), inst.rows.len(), inst.objective_offset);

    let mut models = Vec::new();
    for format in [lp::ModelFormat::Lp, lp::ModelFormat::Mps] {
        let path = out.join(format!("night.{}", format.extension()));
        lp::write_instance(&inst, format, &path)?;
        let text = rostra::io::read_text(&path)?;
        let model = match format {
            lp::ModelFormat::Lp => lp::parse_lp(&text)?,
            lp::ModelFormat::Mps => lp::parse_mps(&text)?,
        };
        println!("{}: {} bytes, {} rows, {} integer columns", path.display(), text.len(), model.rows.len(), model.integers.len());
        models.push(model);
    }
    assert_eq!(models[0], models[1]);
    assert_eq!(models[0], lp::TextModel::from_instance(&inst));
    println!("LP and MPS read back to the same model");
    Ok(())
}
