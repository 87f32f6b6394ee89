//! Locating the iterates at which an earlier lower-level point leaves the
//! index set again.
//!
//! ```bash
//! cargo run --example diagnose_failure
//! ```

use gsip_lab::gsip::cex1;
use gsip_lab::{diagnose_trace, run, AlgorithmConfig, Variant};

fn main() -> gsip_lab::Result<()> {
    let p = cex1();
    let mut cfg = AlgorithmConfig::new(Variant::LlpOnly);
    cfg.max_iter = 8;
    let res = run(&p, &cfg)?;
    let violations = diagnose_trace(&p, &res)?;

    println!("hbar(x_l, y_k) > 0 although hbar(x_k, y_k) < 0:");
    for v in &violations {
        println!("  l={} k={} hbar={:.6}", v.l, v.k, v.value);
    }
    let gap = violations.iter().map(|v| v.l - v.k).min().unwrap();
    println!("{} pairs, smallest l - k = {gap}", violations.len());

    // the corrected variant records no lower-level minimizers at all
    let sip = run(&p, &AlgorithmConfig::new(Variant::SipLlp))?;
    if let Err(e) = diagnose_trace(&p, &sip) {
        println!("sip-llp trace: {e}");
    }
    Ok(())
}
