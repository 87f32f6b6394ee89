//! Populating the discretization with lower-level minimizers only, on the
//! first counterexample. The lower bounds creep up to 0 while the relaxed
//! optimum is 1/2.
//!
//! ```bash
//! cargo run --example cex1_llp_only
//! ```

use gsip_lab::gsip::cex1;
use gsip_lab::{lower_bound_history, run, AlgorithmConfig, Variant};

fn main() -> gsip_lab::Result<()> {
    let p = cex1();
    let mut cfg = AlgorithmConfig::new(Variant::LlpOnly);
    cfg.max_iter = 20;
    let res = run(&p, &cfg)?;

    println!("{:>3} {:>14} {:>14} {:>8}", "k", "x_k", "y_k", "f_Lk");
    for r in &res.trace {
        let y = r.llp.as_ref().and_then(|l| l.y_k.as_ref()).map(|y| y[0]);
        println!("{:>3} {:>14.9} {:>14.9} {:>8.5}", r.k, r.x_k[0], y.unwrap_or(f64::NAN), r.f_lk);
    }
    let last = lower_bound_history(&res).last().copied().unwrap();
    println!(
        "status {}, bound {:.3e} after {} iterations; f_L = {}",
        res.status,
        last.1,
        last.0,
        p.f_l.unwrap()
    );
    Ok(())
}
