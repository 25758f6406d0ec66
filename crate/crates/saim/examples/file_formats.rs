//! The three instance formats: OR-Library MKP text, community QKP text,
//! and the canonical JSON document. Each loader pairs with a writer, and
//! the canonical format preserves every field including known optima.
//!
//! ```bash
//! cargo run --example file_formats
//! ```

use saim::instances::formats::{
    load_canonical, load_mkp_orlib, load_qkp, write_canonical, write_mkp_orlib, write_qkp,
};
use saim::instances::{generate_qkp, Instance};
use saim::oracle::exhaustive_solve;

fn main() {
    // OR-Library MKP: count, then per instance "n m opt", profits,
    // weight rows, capacities
    let orlib_text = "1\n2 1 10\n5 3\n4 2\n6\n";
    let mkp = &load_mkp_orlib(orlib_text).unwrap()[0];
    println!("OR-Library text parsed: {} items, {} constraint(s)", mkp.n, mkp.m);
    println!("  header optimum 10 becomes minimization opt {:?}", mkp.opt);
    let problem = Instance::Mkp(mkp.clone()).to_problem().unwrap();
    let solution = exhaustive_solve(&problem).unwrap();
    println!("  exhaustive check: cost {} at items {:?}", solution.value, solution.state);
    print!("  re-serialized:\n{}", indent(&write_mkp_orlib(std::slice::from_ref(mkp))));

    // community QKP: name, n, linear values, upper-triangular pairwise
    // rows, constraint type, capacity, weights
    let qkp_text = "toy2\n2\n3 1\n4\n0\n4\n2 3\n";
    let qkp = load_qkp(qkp_text).unwrap();
    println!("\ncommunity QKP text parsed: {} ({} items)", qkp.name, qkp.n);
    print!("  re-serialized:\n{}", indent(&write_qkp(&qkp)));

    // canonical JSON: self-describing and versioned; the format the
    // generate command writes
    let generated = Instance::Qkp(generate_qkp(4, 0.8, 9, (1, 20), (1, 9)).unwrap());
    let doc = write_canonical(&generated);
    println!("\ncanonical JSON for a generated instance:");
    print!("{}", indent(&doc));
    let reloaded = load_canonical(&doc).unwrap();
    assert_eq!(reloaded, generated);
    println!("reloaded instance equals the original field for field");
}

fn indent(text: &str) -> String {
    text.lines()
        .map(|l| format!("    {l}\n"))
        .collect()
}
