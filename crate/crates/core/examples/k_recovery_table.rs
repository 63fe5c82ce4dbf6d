//! A small k-recovery benchmark rendered as a Markdown table. The first
//! argument sets the number of runs per cell (default 5).

use sxmeans::bench::suites::{synthetic_suite, SuiteOptions};
use sxmeans::sxmeans::Method;

fn main() -> sxmeans::Result<()> {
    let runs = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(5);
    let opts = SuiteOptions {
        runs,
        methods: vec![Method::Sx, Method::Fixed { kappa: 10.0 }, Method::Fixed { kappa: 40.0 }],
        ..SuiteOptions::default()
    };
    let report = synthetic_suite("k-recovery", &[2, 3, 4, 5, 6, 8], 500, 100.0, 3, &opts)?;
    print!("{}", report.to_markdown());
    Ok(())
}
