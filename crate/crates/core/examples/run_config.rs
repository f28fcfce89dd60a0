//! Driving a run from a TOML document, as the `ratfix` binary does.
//!
//! cargo run --example run_config

use ratfix::config::parse_config;
use ratfix::report::Subcommand;
use ratfix::run::run;

const DOC: &str = r#"
seed = 3

[space]
type = "box"
lower = [0.0]
upper = [4.0]
map = { family = "affine", matrix = [[0.5]], offset = [1.0] }

[psi]
kind = "integral"
density = { kind = "linear", k = 2.0 }

[condition]
kind = "integral"
grid_points = 41

[iteration]
x0 = [0.0]
fix_tol = 1e-6
"#;

fn main() -> ratfix::Result<()> {
    let config = parse_config(DOC)?;
    let report = run(&config, Subcommand::Solve)?;
    print!("{}", report.to_text());
    println!("exit status {}", report.exit_code);
    Ok(())
}
