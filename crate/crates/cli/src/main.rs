use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mlst_core::ilp::{emit, write_lp, IlpForm};
use mlst_core::netgen::{GenSpec, GraphModel, Tsm};
use mlst_core::oracle::exact_mlst_with_limit;
use mlst_core::ratio::ratio_table_csv;
use mlst_core::{
    bottom_up, composite_full, composite_on_q, compute_ratio, guaranteed_composite, parse_instance, top_down,
    write_instance, Instance, LevelSubset, MlstError, MlstSolution, RatioMethod, SteinerMode,
};
use mlst_cli::{aggregate, read_csv, run_experiment, write_csv, ExperimentConfig};

#[derive(Parser)]
#[command(name = "mlst", version, about = "Multi-level Steiner tree heuristics, ratios and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen {
        #[arg(long, default_value = "er")]
        model: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        ell: usize,
        #[arg(long, default_value = "linear")]
        tsm: Tsm,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run a heuristic on an instance file ("-" for stdin).
    Solve {
        instance: PathBuf,
        #[arg(long, default_value = "cmp", value_parser = ["bu", "td", "cmpq", "cmp", "cmps"])]
        algo: String,
        /// Level subset for `cmpq`, e.g. 1,3.
        #[arg(long)]
        q: Option<LevelSubset>,
        #[arg(long, default_value = "approx2")]
        mode: SteinerMode,
    },
    /// Solve an instance exactly.
    Oracle {
        instance: PathBuf,
        /// Largest allowed |T_1| - 1.
        #[arg(long, default_value_t = 14)]
        max_terminals: usize,
    },
    /// Approximation ratio of the composite heuristic.
    Ratio {
        #[arg(long)]
        ell: usize,
        #[arg(long, default_value = "colgen")]
        method: RatioMethod,
        /// Print `ell,t_ell` for every level count up to `--ell`.
        #[arg(long)]
        table: bool,
    },
    /// Write an ILP model in LP format.
    EmitIlp {
        instance: PathBuf,
        #[arg(long, default_value = "reduced")]
        form: IlpForm,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run a batch and write one CSV row per instance and algorithm.
    Experiment {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Override a config key, e.g. --set n=10,12.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Summarise the ratio column of an experiment CSV.
    Aggregate {
        csv: PathBuf,
        #[arg(long, default_value = "algo", value_delimiter = ',')]
        by: Vec<String>,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl ToString) -> Self {
        Failure { code: 2, msg: msg.to_string() }
    }

    fn data(msg: impl ToString) -> Self {
        Failure { code: 4, msg: msg.to_string() }
    }
}

impl From<MlstError> for Failure {
    fn from(e: MlstError) -> Self {
        let code = if e.is_guard() { 3 } else { 4 };
        Failure { code, msg: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::data(e)
    }
}

fn read_input(path: &PathBuf) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
    }
}

fn emit_output(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::data(format!("{}: {e}", p.display()))),
        None => Ok(io::stdout().write_all(text.as_bytes())?),
    }
}

fn load(path: &PathBuf) -> Result<Instance, Failure> {
    Ok(parse_instance(&read_input(path)?)?)
}

fn print_solution(instance: &Instance, sol: &MlstSolution) -> String {
    let g = instance.graph();
    let mut out = String::new();
    for (i, set) in sol.edge_sets().iter().enumerate() {
        let edges: Vec<String> = set.iter().map(|&e| format!("{}-{}", g.edge(e).u, g.edge(e).v)).collect();
        out.push_str(&format!("level {} {}\n", i + 1, edges.join(" ")));
    }
    out
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gen { model, n, ell, tsm, seed, out } => {
            let model: GraphModel = model.parse().map_err(Failure::usage)?;
            let instance: Instance = GenSpec { model, n, ell, tsm, seed }.generate()?;
            emit_output(&out, &write_instance(&instance))
        }
        Command::Solve { instance, algo, q, mode } => {
            let inst = load(&instance)?;
            let result = match algo.as_str() {
                "bu" => bottom_up(&inst, mode),
                "td" => top_down(&inst, mode),
                "cmp" => composite_full(&inst, mode),
                "cmps" => guaranteed_composite(&inst, mode),
                _ => {
                    let q = q.ok_or_else(|| Failure::usage("--algo cmpq needs --q"))?;
                    composite_on_q(&inst, &q, mode)
                }
            }?;
            let mut text = format!("cost {}\nstp_calls {}\n", result.cost, result.stp_calls);
            if let Some(q) = &result.subset_used {
                text.push_str(&format!("subset {q}\n"));
            }
            text.push_str(&print_solution(&inst, &result.solution));
            emit_output(&None, &text)
        }
        Command::Oracle { instance, max_terminals } => {
            let inst = load(&instance)?;
            let (cost, sol) = exact_mlst_with_limit(&inst, max_terminals)?;
            emit_output(&None, &format!("cost {cost}\n{}", print_solution(&inst, &sol)))
        }
        Command::Ratio { ell, method, table } => {
            let text = if table {
                ratio_table_csv(1..=ell, method)?
            } else {
                let r = compute_ratio(ell, method)?;
                let y: Vec<String> = r.y.iter().map(|v| format!("{v:.6}")).collect();
                format!("t_ell {:.6}\niterations {}\ny {}\n", r.t_value, r.iterations, y.join(" "))
            };
            emit_output(&None, &text)
        }
        Command::EmitIlp { instance, form, out } => {
            let inst = load(&instance)?;
            emit_output(&out, &write_lp(&emit(form, &inst)?))
        }
        Command::Experiment { config, out, overrides } => {
            let mut cfg = match &config {
                Some(p) => ExperimentConfig::parse(&read_input(p)?).map_err(Failure::usage)?,
                None => ExperimentConfig::default(),
            };
            for o in &overrides {
                let (k, v) = o.split_once('=').ok_or_else(|| Failure::usage(format!("expected KEY=VALUE, got {o:?}")))?;
                cfg.set(k.trim(), v.trim()).map_err(Failure::usage)?;
            }
            cfg.validate().map_err(Failure::usage)?;
            let rows = run_experiment(&cfg);
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf).map_err(Failure::data)?;
            emit_output(&out, &String::from_utf8_lossy(&buf))
        }
        Command::Aggregate { csv, by } => {
            let rows = read_csv(read_input(&csv)?.as_bytes()).map_err(Failure::data)?;
            let keys: Vec<&str> = by.iter().map(String::as_str).collect();
            let summaries = aggregate(&rows, &keys).map_err(Failure::usage)?;
            let mut w = ::csv::Writer::from_writer(Vec::new());
            for s in &summaries {
                w.serialize(s).map_err(Failure::data)?;
            }
            let bytes = w.into_inner().map_err(|e| Failure::data(e.to_string()))?;
            emit_output(&None, &String::from_utf8_lossy(&bytes))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
