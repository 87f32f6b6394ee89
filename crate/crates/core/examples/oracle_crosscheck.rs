//! Re-solves every subproblem met by all three variants on a grid and
//! reports the largest disagreement.
//!
//! ```bash
//! cargo run --example oracle_crosscheck
//! ```

use gsip_lab::verify::verify_problem;
use gsip_lab::{builtin_problems, AlgorithmConfig, Variant};

fn main() -> gsip_lab::Result<()> {
    let base = AlgorithmConfig::new(Variant::SipLlp);
    for p in builtin_problems() {
        let report = verify_problem(&p, 401, 12, &base)?;
        println!("{report}\n");
    }
    Ok(())
}
