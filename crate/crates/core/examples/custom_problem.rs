//! Loads a `.gsip` file, runs every variant and writes the traces as CSV.
//!
//! ```bash
//! cargo run --example custom_problem -- crates/core/problems/ridge.gsip /tmp/traces
//! ```

use std::fs;
use std::path::PathBuf;

use gsip_lab::trace::to_csv_string;
use gsip_lab::{run, AlgorithmConfig, GsipProblem, Variant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("problems/ridge.gsip"));
    let out_dir = args.next().map(PathBuf::from);

    let p = GsipProblem::parse(&fs::read_to_string(&path)?)?;
    println!("{} from {}", p.name, path.display());
    for variant in [Variant::LlpOnly, Variant::AuxLlp, Variant::SipLlp] {
        let mut cfg = AlgorithmConfig::new(variant);
        cfg.max_iter = 30;
        let res = run(&p, &cfg)?;
        println!(
            "  {variant:>8}: {} after {} iterations, bound {:.6}",
            res.status,
            res.trace.len(),
            res.final_lower_bound
        );
        if let Some(dir) = &out_dir {
            fs::create_dir_all(dir)?;
            let file = dir.join(format!("{}-{variant}.csv", p.name));
            fs::write(&file, to_csv_string(&p, &res)?)?;
            println!("            trace in {}", file.display());
        }
    }
    Ok(())
}
