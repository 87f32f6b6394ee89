//! Reading and writing `.gsip` documents.
//!
//! ```bash
//! cargo run --example problem_format
//! ```

use gsip_lab::format::{parse_problem, serialize_problem};
use gsip_lab::GsipProblem;

const SOURCE: &str = r#"
# two lower-level constraints, written loosely
problem "band"
outer x in [0, 2]
inner y in [-1, 1]
objective: x^2 - x
g:  x - y^2
h:  y - x      # y <= x
h: -y - 1/2    # y >= -1/2
f_star: 0
"#;

fn main() {
    let doc = parse_problem(SOURCE).expect("valid document");
    println!("parsed `{}` with {} constraints", doc.name, doc.h.len());

    let canonical = serialize_problem(&doc);
    print!("{canonical}");
    assert_eq!(parse_problem(&canonical).unwrap(), doc);

    let problem = GsipProblem::from_document(doc).expect("consistent scopes");
    println!("hbar = {}", problem.hbar().unwrap());

    let broken = "problem \"p\"\nouter x in [0, 1]\ninner y in [0, 1]\nobjective: x + z\ng: y\nh: y\n";
    match parse_problem(broken) {
        Ok(_) => unreachable!(),
        Err(e) => println!("error: {e}"),
    }
}
