//! Two isometric Euclidean planes in l_4 with different projection constants.
//!
//! Run with `cargo run --release --example lp4_counterexample [n] [m_max]`.

use amalgam_lab::lp_experiments::{build_counterexample, norm_comparison_4_3};
use amalgam_lab::symmetry::LambdaOptions;

fn main() -> amalgam_lab::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(2, |s| s.parse().expect("n"));
    let m_max: usize = args.next().map_or(4, |s| s.parse().expect("m_max"));

    let report = build_counterexample(n, m_max, None, &LambdaOptions::default())?;
    println!("p = {}", report.p);
    println!(
        "{:>3} {:>16} {:>16} {:>12}",
        "m", "lambda", "lambda(mu=id)", "c"
    );
    for row in &report.rows {
        println!(
            "{:>3} {:>16.12} {:>16.12} {:>12.6}",
            row.m, row.lambda, row.identity_lambda, row.euclid_c
        );
    }
    println!(
        "all planes Euclidean (hence isometric): {}",
        report.isometric_premise
    );
    println!(
        "some lambda_m < lambda_1: {}",
        report.strict_inequality_found
    );
    if n == 2 {
        let c = norm_comparison_4_3(2)?;
        println!(
            "l_4/3 comparison: a = {:.10} > b = {:.10}: {}",
            c.a, c.b, c.strict
        );
    }
    Ok(())
}
