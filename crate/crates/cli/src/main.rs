//! `tzhu` — scenario runner for the twisted Zhu algebra engine.
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 configuration
//! error (unreadable or invalid scenario, bad flags).

use clap::{Parser, Subcommand};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use twisted_zhu::runner::{self, Engine};
use twisted_zhu::scenario::{self, Scenario, Task};

#[derive(Parser)]
#[command(name = "tzhu", version, about = "Twisted Zhu algebras, bimodules and fusion bounds on the free-boson orbifold")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario file (flat key = value format).
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Override the scenario's weight cap.
    #[arg(long, global = true)]
    weight_cap: Option<i64>,

    /// Override the scenario's sweep seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Also dump product/action tables to <out>.tables.json
    /// (or tables.json when writing to stdout).
    #[arg(long, global = true)]
    dump_tables: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Execute the scenario's own task list.
    Run,
    /// Build the truncated Zhu algebras of the scenario's twists.
    BuildZhu,
    /// Build the truncated bimodule quotient of M¹.
    BuildBimodule,
    /// Compute the fusion-rule upper bound over a cap sweep.
    FusionBound,
    /// Run the full verification battery.
    Verify,
}

fn fail_config(msg: &str) -> ExitCode {
    eprintln!("error: {}", msg);
    ExitCode::from(2)
}

fn load_scenario(cli: &Cli) -> Result<Scenario, String> {
    let path = cli
        .scenario
        .as_ref()
        .ok_or("--scenario <path> is required")?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {}", path.display(), e))?;
    let mut s = scenario::parse_scenario_str(&text).map_err(|e| e.to_string())?;
    if let Some(cap) = cli.weight_cap {
        s.weight_cap = cap;
    }
    if let Some(seed) = cli.seed {
        s.seed = seed;
    }
    match cli.command {
        Command::Run => {}
        Command::BuildZhu => s.tasks = vec![Task::BuildZhu],
        Command::BuildBimodule => s.tasks = vec![Task::BuildBimodule],
        Command::FusionBound => s.tasks = vec![Task::FusionBound],
        Command::Verify => s.tasks = vec![Task::Verify],
    }
    scenario::validate(&s).map_err(|e| e.to_string())?;
    Ok(s)
}

fn dump_tables(cli: &Cli, s: &Scenario) -> Result<(), String> {
    let engine = Engine::new();
    let mut tables: BTreeMap<String, serde_json::Value> = BTreeMap::new();
    let mut twists = vec![s.g2, s.g1.compose(s.g2)];
    twists.sort();
    twists.dedup();
    for g in twists {
        let z = engine.zhu(g, s.weight_cap);
        let table = runner::zhu_product_table(&engine.bk, &z);
        tables.insert(
            format!("zhu-product[g={}]", g),
            serde_json::to_value(table).unwrap(),
        );
    }
    let path = match &cli.out {
        Some(p) => {
            let mut q = p.clone();
            q.set_extension("tables.json");
            q
        }
        None => PathBuf::from("tables.json"),
    };
    let body = serde_json::to_string_pretty(&tables).unwrap();
    std::fs::write(&path, body).map_err(|e| format!("cannot write {}: {}", path.display(), e))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let s = match load_scenario(&cli) {
        Ok(s) => s,
        Err(e) => return fail_config(&e),
    };
    let report = runner::run(&s);
    let body = report.to_json();
    if let Some(out) = &cli.out {
        if let Err(e) = std::fs::write(out, &body) {
            return fail_config(&format!("cannot write {}: {}", out.display(), e));
        }
    } else {
        println!("{}", body);
    }
    if cli.dump_tables {
        if let Err(e) = dump_tables(&cli, &s) {
            return fail_config(&e);
        }
    }
    if report.all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
