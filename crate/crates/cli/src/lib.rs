//! Scenario language, runner and reports for the varlie command line.

pub mod bind;
pub mod canon;
pub mod report;
pub mod run;
pub mod scenario;

use varlie_core::Result;

/// Parses, binds and runs a scenario source.
pub fn check_source(name: &str, src: &str, opts: &run::RunOptions) -> Result<report::Report> {
    let s = scenario::parse(src)?;
    let p = bind::bind(&s)?;
    Ok(run::run(name, &p, opts))
}
