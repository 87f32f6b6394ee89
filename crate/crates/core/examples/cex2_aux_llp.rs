//! The auxiliary lower-level rule on the second counterexample, under each
//! tie-break for the degenerate auxiliary problem at x = 0.
//!
//! ```bash
//! cargo run --example cex2_aux_llp
//! ```

use gsip_lab::gsip::cex2;
use gsip_lab::{run, AlgorithmConfig, TieBreak, Variant};

fn main() -> gsip_lab::Result<()> {
    let p = cex2();
    for tie_break in [TieBreak::SolverDefault, TieBreak::MinFirst, TieBreak::MaxFirst, TieBreak::Center] {
        let mut cfg = AlgorithmConfig::new(Variant::AuxLlp);
        cfg.alpha = 0.95;
        cfg.aux_tie_break = tie_break;
        cfg.max_iter = 20;
        cfg.stop_on_stall = false;
        let res = run(&p, &cfg)?;

        let tilde: Vec<String> = res
            .trace
            .iter()
            .take(3)
            .filter_map(|r| r.aux.as_ref())
            .map(|a| format!("{:.4}", a.y_tilde_k[0]))
            .collect();
        let xs: Vec<f64> = res.trace.iter().map(|r| r.x_k[0]).collect();
        println!(
            "{tie_break:?}: y~ = [{}], x_1 = {}, x_k = 0 for k >= 2: {}, bound {}",
            tilde.join(", "),
            xs[0],
            xs[1..].iter().all(|&x| x.abs() <= 1e-6),
            res.final_lower_bound
        );
    }

    // a nonempty start changes the picture
    let mut cfg = AlgorithmConfig::new(Variant::AuxLlp);
    cfg.initial_yset = vec![vec![-1.0]];
    let res = run(&p, &cfg)?;
    println!("starting from Y = {{-1}}: {} with bound {}", res.status, res.final_lower_bound);
    Ok(())
}
