//! Driving the batch front-end from code: parse a config, run two commands.

use std::path::Path;

use gcme::cli::{run, Command, RunConfig};

const CONFIG: &str = "
[grid]
dims = 3
n = 12

[scenario]
generator = perturbed(x=0.3:0.1:0, y=0:0.2:0.1, t=0.1:0:0.3, amplitude=0.05)
seed = 17

[run]
lambda = 0, 1, -1
plane = xt
";

fn main() -> gcme::Result<()> {
    let mut cfg = RunConfig::from_ini_str(CONFIG, Path::new("."))?;
    cfg.out = std::env::temp_dir().join("gcme_batch_run");
    for command in [Command::Check, Command::Lax, Command::Transport] {
        let outcome = run(command, &cfg);
        println!("{:<10} exit {}", command.name(), outcome.exit_code);
        for c in outcome.report.iter().flat_map(|r| &r.checks) {
            println!("    {:<48} {:.2e}  {}", c.name, c.value, if c.passed { "ok" } else { "FAIL" });
        }
    }
    println!("reports in {}", cfg.out.display());
    Ok(())
}
