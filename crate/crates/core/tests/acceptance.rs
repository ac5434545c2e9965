//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero when any
//! criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::oracle;
use vbmo_core::grid_domain::DomainSpec;
use vbmo_core::suites::{run_suite, test_shapes, SuiteOptions};
use vbmo_core::whitney::{whitney_decompose, MaskRegion};
use vbmo_core::build_domain;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

fn whitney_timed() -> Outcome {
    let mut parts = Vec::new();
    let mut bad = Vec::new();
    for (name, shape) in test_shapes() {
        let t = Instant::now();
        let dom = build_domain(&DomainSpec::new(shape, 1.0 / 256.0)).map_err(|e| e.to_string())?;
        let dec = whitney_decompose(&MaskRegion::domain(&dom).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let secs = t.elapsed().as_secs_f64();
        if !dec.certificate.all() {
            bad.push(format!("{name}: certificate {:?}", dec.certificate.violations));
        }
        if secs >= 10.0 {
            bad.push(format!("{name}: {secs:.2}s"));
        }
        parts.push(format!("{name} {} cubes {secs:.2}s", dec.cubes.len()));
    }
    if bad.is_empty() {
        Ok(parts.join(", "))
    } else {
        Err(bad.join("; "))
    }
}

fn oracles() -> Outcome {
    let t = Instant::now();
    oracle::check_bmo()?;
    oracle::check_bmo_variants()?;
    oracle::check_b()?;
    oracle::check_lp_ul()?;
    oracle::check_miyachi()?;
    let secs = t.elapsed().as_secs_f64();
    if secs < 60.0 {
        Ok(format!("all brute-force comparisons agree in {secs:.1}s"))
    } else {
        Err(format!("agreement reached but took {secs:.1}s"))
    }
}

fn suite(name: &'static str) -> impl Fn() -> Outcome {
    move || {
        let r = run_suite(name, &SuiteOptions::default()).map_err(|e| e.to_string())?;
        let summary: Vec<String> = r.checks.iter().map(|c| format!("{}: {}", c.name, c.detail)).collect();
        if r.pass {
            Ok(summary.join("; "))
        } else {
            Err(r.failures().join("; "))
        }
    }
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("whitney certification", Box::new(whitney_timed)),
        ("seminorm oracles", Box::new(oracles)),
        ("zero extension bound", Box::new(suite("ze-bound"))),
        ("zero extension failure", Box::new(suite("ze-failure"))),
        ("jones extension", Box::new(suite("jones"))),
        ("uniform whitney constants", Box::new(suite("uniform-k"))),
        ("frame identity", Box::new(suite("frames"))),
        ("vector field normal component", Box::new(suite("vfg"))),
        ("log counterexample", Box::new(suite("counterexample"))),
        ("trace ratios", Box::new(suite("trace-ratio"))),
        ("norm equivalences", Box::new(suite("equivalence"))),
        ("fully curved domains", Box::new(suite("fully-curved"))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(d) => println!("PASS {:>2} {name} ({secs:.1}s): {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
