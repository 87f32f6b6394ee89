//! Certified global minimization by interval branch-and-bound, checked
//! against the dense-grid oracle.
//!
//! ```bash
//! cargo run --example global_minimize
//! ```

use gsip_lab::{grid_minimize, minimize, BoxDomain, ConstraintSpec, Expr};

fn main() -> gsip_lab::Result<()> {
    let (x, y) = (Expr::var("x"), Expr::var("y"));
    let domain = BoxDomain::new([("x", -2.0, 2.0), ("y", -2.0, 2.0)])?;

    // a double-well objective restricted to the disk of radius 1.5
    let objective = (x.clone().powi(2) - 1.0).powi(2) + (y.clone() - 0.5).powi(2) + 0.3 * x.clone();
    let disk = ConstraintSpec::le(x.powi(2) + y.powi(2) - 2.25);

    let bb = minimize(objective.clone(), vec![disk.clone()], domain.clone(), 1e-6, 1e-9)?;
    let grid = grid_minimize(objective, vec![disk], domain, 401)?;

    println!("branch-and-bound: {:?} at {:?} ({} nodes)", bb.value_bounds.unwrap(), bb.minimizer.unwrap(), bb.work);
    println!("grid oracle:      {:?} at {:?}", grid.value().unwrap(), grid.minimizer.unwrap());

    let infeasible = minimize(
        Expr::var("y"),
        vec![ConstraintSpec::le(Expr::var("y") + 2.0)],
        BoxDomain::new([("y", -1.0, 1.0)])?,
        1e-6,
        1e-9,
    )?;
    println!("y <= -2 on [-1, 1]: {:?}", infeasible.status);
    Ok(())
}
