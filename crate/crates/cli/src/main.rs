mod record;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use upatl::checker::{check, Verdict, Witness};
use upatl::formula::{parse_formula, render_formula};
use upatl::gamespec::{load_game, parse_path, render_game};
use upatl::model::GameStructure;
use upatl::oracle::{generate_random_game, GeneratorParams};
use upatl::trace::{compatible_assignments, indistinguishability_class, outcomes_bounded};

use record::{describe_tree, CheckRecord, TreeRecord};

const USAGE: u8 = 64;
const DATA: u8 = 65;
const INTERNAL: u8 = 70;

#[derive(Parser)]
#[command(name = "upatl", version, about = "Bounded model checking of strategic ability under unknown capacities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report every violation of the structural invariants.
    Validate { game: PathBuf },
    /// Check a formula at a state.
    Check {
        game: PathBuf,
        /// Formula text.
        #[arg(short = 'f', long, required_unless_present = "formula_file", conflicts_with = "formula_file")]
        formula: Option<String>,
        /// Read the formula from a file instead.
        #[arg(long)]
        formula_file: Option<PathBuf>,
        /// Defaults to the game's init state.
        #[arg(short = 's', long)]
        state: Option<String>,
        #[arg(short = 'k', long, default_value_t = 3)]
        horizon: usize,
        /// Print one JSON record instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Print the capacity assignments compatible with a path.
    Compat {
        game: PathBuf,
        #[arg(short = 'p', long)]
        path: String,
    },
    /// Print the paths an agent cannot tell apart from a path.
    Classes {
        game: PathBuf,
        #[arg(short = 'p', long)]
        path: String,
        #[arg(short = 'a', long)]
        agent: String,
    },
    /// Print the bounded outcomes of a strategy tree given as JSON.
    Outcomes {
        game: PathBuf,
        #[arg(short = 'p', long)]
        path: String,
        #[arg(long)]
        strategy: PathBuf,
        #[arg(short = 'k', long, default_value_t = 3)]
        horizon: usize,
    },
    /// Re-render a game, or with -f a formula over its names, canonically.
    Fmt {
        game: PathBuf,
        #[arg(short = 'f', long)]
        formula: Option<String>,
    },
    /// Print a random game.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        agents: usize,
        #[arg(long, default_value_t = 2)]
        capacities: usize,
        #[arg(long, default_value_t = 2)]
        actions: usize,
        #[arg(long, default_value_t = 2)]
        props: usize,
        #[arg(long, default_value_t = 0.4)]
        label_density: f64,
        #[arg(long, default_value_t = 0.3)]
        protocol_density: f64,
        /// Draw every parameter from the seed instead.
        #[arg(long)]
        sampled: bool,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| fail(USAGE, format!("{}: {e}", path.display())))
}

fn game(path: &PathBuf) -> Result<GameStructure, Failure> {
    load_game(&read(path)?).map_err(|e| fail(DATA, format!("{}:\n{e}", path.display())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Validate { game: path } => {
            let text = read(&path)?;
            match load_game(&text) {
                Ok(_) => {
                    println!("valid");
                    Ok(0)
                }
                Err(errors) => {
                    for e in &errors.0 {
                        println!("{}:{e}", path.display());
                    }
                    Ok(DATA)
                }
            }
        }
        Command::Check {
            game: path,
            formula,
            formula_file,
            state,
            horizon,
            json,
        } => {
            let g = game(&path)?;
            let text = match (formula, formula_file) {
                (Some(f), _) => f,
                (None, Some(file)) => read(&file)?.trim().to_string(),
                (None, None) => return Err(fail(USAGE, "no formula given")),
            };
            let phi = parse_formula(&text, &g).map_err(|e| fail(DATA, e.to_string()))?;
            let q = match state {
                Some(s) => g.state_id(&s).ok_or(fail(USAGE, format!("unknown state `{s}`")))?,
                None => g.init().ok_or(fail(USAGE, "the game has no init state; pass -s"))?,
            };
            let start = Instant::now();
            let result = check(&g, q, &phi, horizon).map_err(|e| fail(INTERNAL, e.to_string()))?;
            let elapsed_ms = start.elapsed().as_secs_f64() * 1000.0;
            if json {
                let rec = CheckRecord::new(&g, q, render_formula(&phi, &g), horizon, &result, elapsed_ms);
                let out = serde_json::to_string_pretty(&rec).map_err(|e| fail(INTERNAL, e.to_string()))?;
                println!("{out}");
            } else {
                println!("{}", result.verdict);
                match &result.witness {
                    Some(Witness::Winning(t)) => {
                        println!("winning strategy for {}:", coalition(&g, t.coalition()));
                        print!("{}", describe_tree(&g, t));
                    }
                    Some(Witness::Falsifying { strategy, outcome }) => {
                        println!("first strategy for {}:", coalition(&g, strategy.coalition()));
                        print!("{}", describe_tree(&g, strategy));
                        match outcome {
                            Some(o) => println!("falsified on {}", o.display(&g)),
                            None => println!("it has no outcomes"),
                        }
                    }
                    None => {}
                }
            }
            Ok(match result.verdict {
                Verdict::True => 0,
                Verdict::False => 1,
                Verdict::Unknown => 2,
            })
        }
        Command::Compat { game: path, path: rho } => {
            let g = game(&path)?;
            let rho = parse_path(&rho, &g).map_err(|e| fail(DATA, e.to_string()))?;
            let set = compatible_assignments(&g, &rho);
            if set.is_empty() {
                println!("no compatible assignment");
            }
            for lambda in set {
                println!("{}", lambda.describe(&g));
            }
            Ok(0)
        }
        Command::Classes {
            game: path,
            path: rho,
            agent,
        } => {
            let g = game(&path)?;
            let rho = parse_path(&rho, &g).map_err(|e| fail(DATA, e.to_string()))?;
            let a = g
                .agent_id(&agent)
                .ok_or(fail(USAGE, format!("unknown agent `{agent}`")))?;
            for p in indistinguishability_class(&g, &rho, a) {
                println!("{}", p.display(&g));
            }
            Ok(0)
        }
        Command::Outcomes {
            game: path,
            path: rho,
            strategy,
            horizon,
        } => {
            let g = game(&path)?;
            let rho = parse_path(&rho, &g).map_err(|e| fail(DATA, e.to_string()))?;
            let rec: TreeRecord =
                serde_json::from_str(&read(&strategy)?).map_err(|e| fail(DATA, format!("{}: {e}", strategy.display())))?;
            let tree = rec.to_tree(&g).map_err(|e| fail(DATA, e))?;
            tree.check(&g).map_err(|e| fail(DATA, e.to_string()))?;
            let outs = outcomes_bounded(&g, &rho, &tree, horizon).map_err(|e| fail(DATA, e.to_string()))?;
            if outs.is_empty() {
                println!("no outcomes");
            }
            for o in outs {
                println!("{}", o.display(&g));
            }
            Ok(0)
        }
        Command::Fmt { game: path, formula } => {
            let g = game(&path)?;
            match formula {
                Some(f) => {
                    let phi = parse_formula(&f, &g).map_err(|e| fail(DATA, e.to_string()))?;
                    println!("{}", render_formula(&phi, &g));
                }
                None => print!("{}", render_game(&g)),
            }
            Ok(0)
        }
        Command::Gen {
            seed,
            states,
            agents,
            capacities,
            actions,
            props,
            label_density,
            protocol_density,
            sampled,
        } => {
            let params = if sampled {
                GeneratorParams::sampled(seed)
            } else {
                GeneratorParams {
                    seed,
                    states,
                    agents,
                    capacities_per_agent: capacities,
                    actions_per_capacity: actions,
                    label_density,
                    props,
                    protocol_density,
                }
            };
            print!("{}", render_game(&generate_random_game(&params)));
            Ok(0)
        }
    }
}

fn coalition(g: &GameStructure, agents: &[upatl::model::AgentId]) -> String {
    if agents.is_empty() {
        return "the empty coalition".into();
    }
    agents.iter().map(|a| g.agent_name(*a)).collect::<Vec<_>>().join(", ")
}
