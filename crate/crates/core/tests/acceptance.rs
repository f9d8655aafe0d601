//! One pass/fail line per acceptance criterion.

use multierg::suite::{run_criterion, CriterionReport};

fn report(r: &CriterionReport) {
    println!(
        "criterion {} [{}] {} ({:.1} s)",
        r.id,
        if r.passed() { "PASS" } else { "FAIL" },
        r.title,
        r.elapsed.as_secs_f64()
    );
    for c in &r.checks {
        println!("    {c}");
    }
}

fn main() {
    let mut failed = Vec::new();
    for id in 1..=9 {
        let r = run_criterion(id).unwrap_or_else(|e| panic!("criterion {id} errored: {e}"));
        report(&r);
        if !r.passed() {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
