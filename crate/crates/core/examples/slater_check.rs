//! Numerical check of an epsilon-optimal Slater point.
//!
//! ```bash
//! cargo run --example slater_check
//! ```

use gsip_lab::gsip::cex1;
use gsip_lab::{MinimizeOptions, SlaterCertificate};

fn main() -> gsip_lab::Result<()> {
    let p = cex1();
    let f_star = p.f_star.unwrap();
    let opts = MinimizeOptions::default();

    for (x_s, eps, delta) in [(-0.6, 0.2, 0.1), (-0.6, 0.2, 0.3), (-0.8, 0.2, 0.1), (0.0, 1.0, 0.01)] {
        let cert = SlaterCertificate::new(vec![x_s], eps, delta)?;
        let ok = p.verify_slater(&cert, f_star, &opts)?;
        println!("x_s = {x_s:5}, eps = {eps}, delta = {delta:4}: {}", if ok { "accepted" } else { "rejected" });
    }

    let margin = p.build_sip_llp(&[-0.6])?.minimize(&opts)?;
    println!("min over y of max(g, hbar) at x = -0.6: {:?}", margin.value().unwrap());

    match SlaterCertificate::new(vec![-0.6], 0.2, 0.0) {
        Ok(_) => unreachable!(),
        Err(e) => println!("delta = 0: {e}"),
    }
    Ok(())
}
