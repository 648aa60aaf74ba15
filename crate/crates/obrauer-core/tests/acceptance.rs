//! One PASS/FAIL line per acceptance criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use obrauer_core::diagrams::{BasisBounds, Word};
use obrauer_core::quotients::{Category, Session};
use obrauer_core::scalars::{MonicPoly, Poly};
use obrauer_core::verify::{self, run_check, CheckReport};

struct Criterion {
    title: &'static str,
    budget: Option<Duration>,
    run: fn() -> Vec<CheckReport>,
}

fn fuzz() -> Vec<CheckReport> {
    verify::run_suite("fuzz", &[], 0).unwrap()
}

fn basis() -> Vec<CheckReport> {
    let mut out = verify::cyclotomic_basis_suite(0);
    out.push(run_check("End(^v) at level 2 has 8 basis elements", || {
        let f = MonicPoly::from_roots(&[Poly::m(1), Poly::m(2)]);
        let s = Session::new(Category::Cyclotomic { f, values: None }).map_err(|e| e.to_string())?;
        let a = Word::parse("^v").unwrap();
        let n = s.basis(&a, &a, Some(BasisBounds::dots(1))).map_err(|e| e.to_string())?.len();
        if n != 8 {
            return Err(format!("{n} elements"));
        }
        Ok(())
    }));
    out
}

const CRITERIA: [Criterion; 8] = [
    Criterion {
        title: "defining relations hold in the engine and in the representation",
        budget: Some(Duration::from_secs(60)),
        run: || verify::relation_suite(&[2, 3, 2, 1, 1]),
    },
    Criterion {
        title: "cyclotomic basis ranks at levels 1 and 2",
        budget: None,
        run: basis,
    },
    Criterion {
        title: "affine normal diagrams with at most two dots are independent",
        budget: None,
        run: || verify::affine_independence_suite(0),
    },
    Criterion {
        title: "bubble values, eta coefficients and counterclockwise bubbles",
        budget: None,
        run: verify::parameter_suite,
    },
    Criterion {
        title: "bubble recursion in the cyclotomic quotients",
        budget: None,
        run: verify::cyclotomic_suite,
    },
    Criterion {
        title: "level one isomorphism",
        budget: None,
        run: || verify::level_one_suite(0),
    },
    Criterion {
        title: "oracle fuzzing and mutation detection",
        budget: Some(Duration::from_secs(300)),
        run: fuzz,
    },
    Criterion {
        title: "walled Brauer dimensions, idempotent and stable JSON",
        budget: None,
        run: verify::walled_brauer_suite,
    },
];

fn main() -> ExitCode {
    let mut ok = true;
    for (i, c) in CRITERIA.iter().enumerate() {
        let t = Instant::now();
        let reports = (c.run)();
        let elapsed = t.elapsed();
        let failed: Vec<&CheckReport> = reports.iter().filter(|r| !r.passed).collect();
        let in_budget = c.budget.is_none_or(|b| elapsed <= b);
        let pass = failed.is_empty() && in_budget && !reports.is_empty();
        ok &= pass;
        println!(
            "{} criterion {}: {} ({} checks, {:.2} s)",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            c.title,
            reports.len(),
            elapsed.as_secs_f64()
        );
        for r in failed {
            println!("    {}", r.line());
        }
        if !in_budget {
            println!("    over the time budget of {} s", c.budget.unwrap().as_secs());
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
