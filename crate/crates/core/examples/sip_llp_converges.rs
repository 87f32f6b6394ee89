//! Populating the discretization with minimizers of max(g, hbar) converges
//! on both counterexamples.
//!
//! ```bash
//! cargo run --example sip_llp_converges
//! ```

use gsip_lab::{builtin_problems, run, AlgorithmConfig, Variant};

fn main() -> gsip_lab::Result<()> {
    for p in builtin_problems() {
        let res = run(&p, &AlgorithmConfig::new(Variant::SipLlp))?;
        println!("{}:", p.name);
        for r in &res.trace {
            let sip = r.sip_llp.as_ref().unwrap();
            println!(
                "  k={} x={:?} f_Lk={:?} min max(g,hbar)={:?} at y={:?}",
                r.k, r.x_k, r.f_lk, sip.value, sip.y_k
            );
        }
        println!("  {} with bound {} (f_L = {})", res.status, res.final_lower_bound, p.f_l.unwrap());
    }
    Ok(())
}
