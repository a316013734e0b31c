//! `workbench`: check, synthesize, simulate and export from the command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;
use workbench_core::flowltl::DEFAULT_STATE_CAP;
use workbench_core::game::GameOptions;
use workbench_core::net::export_pnml;
use workbench_core::transit::data_flow_forest;
use workbench_core::Control;
use workbench_server::models::{build_model, Model};
use workbench_server::{check_document, prepare_formula, result_document, synthesis_document, ApiError, Config};

#[derive(Parser)]
#[command(name = "workbench", version, about = "Transit nets, Flow-LTL checking and Petri game synthesis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Model check a Flow-LTL formula. Exit 0 if satisfied, 1 if not.
    Check {
        model: PathBuf,
        #[arg(short = 'f', long)]
        formula: String,
        /// Write the result document here.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        state_cap: usize,
    },
    /// Solve a Petri game. Exit 0 if realizable, 1 if not.
    Synthesize {
        model: PathBuf,
        /// Write the strategy net as `.apn` here.
        #[arg(long)]
        strategy: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, default_value_t = GameOptions::default().state_cap)]
        state_cap: usize,
    },
    /// Fire a sequence of transitions and print the markings and data-flow forest.
    Simulate {
        model: PathBuf,
        #[arg(long, value_delimiter = ',')]
        fire: Vec<String>,
    },
    /// Export a net as PNML.
    ExportPnml {
        model: PathBuf,
        /// Output file; standard output if omitted.
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Run the HTTP server.
    Serve {
        /// Overrides WORKBENCH_PORT.
        #[arg(long)]
        port: Option<u16>,
    },
}

/// Exit status 2 with a message on standard error.
struct Failure(String);

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(e.to_string())
    }
}

fn load(path: &Path) -> Result<Model, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    build_model(&text).map_err(|e| match e {
        ApiError::Unprocessable { diagnostics, .. } if !diagnostics.is_empty() => {
            let d = &diagnostics[0];
            Failure(format!("{}:{}:{}: {}", path.display(), d["line"], d["column"], d["message"].as_str().unwrap_or("")))
        }
        e => Failure(format!("{}: {e}", path.display())),
    })
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn names(v: &Value) -> String {
    let items: Vec<&str> = v.as_array().into_iter().flatten().filter_map(Value::as_str).collect();
    format!("{{{}}}", items.join(", "))
}

fn print_steps(label: &str, steps: &Value) {
    println!("{label}:");
    for s in steps.as_array().into_iter().flatten() {
        let fire = s["fire"].as_str().unwrap_or("(stutter)");
        let trackers: Vec<String> = s["trackers"]
            .as_array()
            .into_iter()
            .flatten()
            .map(|t| t.as_str().map_or_else(|| t.to_string(), str::to_string))
            .collect();
        println!("  {fire} -> {} [{}]", names(&s["marking"]), trackers.join(", "));
    }
}

fn check(model: &Path, formula: &str, json: Option<&Path>, state_cap: usize) -> Result<ExitCode, Failure> {
    let m = load(model)?;
    let phi = prepare_formula(&m.transit_net, formula).map_err(|e| Failure(format!("formula: {e}")))?;
    let (doc, satisfied) =
        check_document(&m.transit_net, &phi, state_cap, &Control::new()).map_err(|e| Failure(e.to_string()))?;
    if let Some(path) = json {
        write(path, &result_document(&doc))?;
    }
    println!("{}", doc["verdict"].as_str().unwrap_or_default());
    let cex = &doc["counterexample"];
    if cex.is_object() {
        println!("initial: {}", names(&cex["initial"]["marking"]));
        print_steps("prefix", &cex["prefix"]);
        print_steps("loop", &cex["loop"]);
    }
    Ok(if satisfied { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn synthesize(model: &Path, strategy: Option<&Path>, json: Option<&Path>, state_cap: usize) -> Result<ExitCode, Failure> {
    let m = load(model)?;
    let pg = m
        .game
        .as_ref()
        .ok_or_else(|| Failure(format!("{}: not a Petri game: no environment place", model.display())))?;
    let (doc, net) = synthesis_document(pg, state_cap, &Control::new()).map_err(|e| Failure(e.to_string()))?;
    if let Some(path) = json {
        write(path, &result_document(&doc))?;
    }
    println!("{}", doc["verdict"].as_str().unwrap_or_default());
    let stats = &doc["gameStats"];
    println!("game states: {}, moves: {}", stats["states"], stats["moves"]);
    match (strategy, &net) {
        (Some(path), Some(text)) => {
            write(path, text)?;
            println!("strategy written to {}", path.display());
        }
        (Some(_), None) => eprintln!("no strategy to write"),
        _ => {}
    }
    Ok(if net.is_some() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn simulate(model: &Path, fire: &[String]) -> Result<ExitCode, Failure> {
    let m = load(model)?;
    let tn = &m.transit_net;
    let net = tn.net();
    let mut marking = net.initial_marking();
    let mut run = Vec::new();
    println!("0: {{{}}}", net.marking_names(&marking).join(", "));
    for (k, id) in fire.iter().enumerate() {
        let t = net.transition_index(id).map_err(|e| Failure(e.to_string()))?;
        marking = net
            .fire(&marking, t)
            .map_err(|e| Failure(format!("step {}: {e}", k + 1)))?;
        run.push(t);
        println!("{}: {id} -> {{{}}}", k + 1, net.marking_names(&marking).join(", "));
    }
    let forest = data_flow_forest(tn, &run).map_err(|e| Failure(e.to_string()))?;
    println!("forest:");
    for r in &forest.roots {
        let n = &forest.nodes[r.node];
        println!("  root n{} {}@{} by {}", r.node, net.place(n.place).id, n.position, net.transition(r.transition).id);
    }
    for e in &forest.edges {
        let (a, b) = (&forest.nodes[e.from], &forest.nodes[e.to]);
        println!(
            "  n{} {}@{} -[{}]-> n{} {}@{}",
            e.from,
            net.place(a.place).id,
            a.position,
            net.transition(e.transition).id,
            e.to,
            net.place(b.place).id,
            b.position
        );
    }
    for (i, n) in forest.nodes.iter().enumerate().filter(|(_, n)| n.ended) {
        println!("  n{i} {}@{} ends", net.place(n.place).id, n.position);
    }
    Ok(ExitCode::SUCCESS)
}

fn export(model: &Path, output: Option<&Path>) -> Result<ExitCode, Failure> {
    let m = load(model)?;
    let xml = export_pnml(m.net());
    match output {
        Some(path) => write(path, &xml)?,
        None => print!("{xml}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn serve(port: Option<u16>) -> Result<ExitCode, Failure> {
    let mut config = Config::from_env().map_err(|e| Failure(e.to_string()))?;
    if let Some(p) = port {
        config.port = p;
    }
    tracing_subscriber::fmt().with_target(false).init();
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(workbench_server::serve(config))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Check { model, formula, json, state_cap } => check(model, formula, json.as_deref(), *state_cap),
        Command::Synthesize { model, strategy, json, state_cap } => {
            synthesize(model, strategy.as_deref(), json.as_deref(), *state_cap)
        }
        Command::Simulate { model, fire } => simulate(model, fire),
        Command::ExportPnml { model, output } => export(model, output.as_deref()),
        Command::Serve { port } => serve(*port),
    };
    outcome.unwrap_or_else(|Failure(msg)| {
        eprintln!("error: {msg}");
        ExitCode::from(2)
    })
}
