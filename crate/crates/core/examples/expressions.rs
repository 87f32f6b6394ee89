//! Building expressions, evaluating them at points and over boxes.
//!
//! ```bash
//! cargo run --example expressions
//! ```

use gsip_lab::{BoxDomain, Expr};

fn main() -> gsip_lab::Result<()> {
    let x = Expr::var("x");
    let y = Expr::var("y");

    let g = (x.clone() - y.clone()).powi(2) - 10.0;
    let h = (-2.0 * x.clone() + y.clone()).min(-x.clone());
    println!("g = {g}");
    println!("h = {h}");

    let at = [("x", 1.0), ("y", 0.45)];
    println!("g(1, 0.45) = {}", g.eval(&at)?);
    println!("h(1, 0.45) = {}", h.eval(&at)?);

    let square = BoxDomain::new([("x", -1.0, 1.0), ("y", -1.0, 1.0)])?;
    println!("g over [-1,1]^2 lies in {}", g.interval_eval(&square)?);
    println!("h over [-1,1]^2 lies in {}", h.interval_eval(&square)?);

    // fix x = 1 and keep y free
    let g_at_one = g.substitute(&[("x", 1.0)]);
    println!("g(1, y) = {g_at_one}");

    let ratio = x / (y - 2.0);
    println!("x / (y - 2) over the square: {}", ratio.interval_eval(&square)?);
    match (Expr::var("x") / Expr::var("y")).interval_eval(&square) {
        Ok(iv) => println!("unexpected enclosure {iv}"),
        Err(e) => println!("x / y over the square: {e}"),
    }
    Ok(())
}
