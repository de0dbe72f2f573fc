use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use hornclaw::encoder::{EncodingOptions, Mode};
use hornclaw::engines::{check_model, lia::DEFAULT_BUDGET, CheckResult, Strategy};
use hornclaw::frontend;
use hornclaw::horn::HornSystem;
use hornclaw::io::{
    apply_step, emit_smtlib, load_system, parse_model, parse_steps, run_solve, PipelineConfig, PipelineError,
    TransformStep, EXTERNAL_SOLVER_ENV,
};

#[derive(Parser)]
#[command(name = "hornclaw", version, about = "Verify higher-order programs via constrained Horn clauses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Encoding {
    /// Unspecialized encoding with success flags and the generic evaluator.
    #[arg(long, conflicts_with = "specialized")]
    canonical: bool,
    #[arg(long)]
    specialized: bool,
}

impl Encoding {
    fn options(&self) -> EncodingOptions {
        if self.canonical {
            EncodingOptions::canonical()
        } else {
            EncodingOptions::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse and type-check a program, printing each function's type.
    Parse { file: PathBuf },
    /// Encode a program as an SMT-LIB HORN script.
    Encode {
        #[command(flatten)]
        encoding: Encoding,
        #[arg(short, long)]
        output: Option<PathBuf>,
        file: PathBuf,
    },
    /// Apply comma-separated transforms, e.g. `merge:app1:Ev_clo2,tautologies`.
    Transform {
        #[arg(long)]
        steps: String,
        #[command(flatten)]
        encoding: Encoding,
        #[arg(short, long)]
        output: Option<PathBuf>,
        file: PathBuf,
    },
    /// Run the solver portfolio.
    Solve {
        /// `portfolio` or engine names joined by `+`.
        #[arg(long, default_value = "portfolio")]
        strategy: Strategy,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Arity of the quantified abstraction used with `--templates`.
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        templates: Option<PathBuf>,
        /// Transforms applied before solving.
        #[arg(long)]
        steps: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        lia_budget: usize,
        #[arg(long, env = EXTERNAL_SOLVER_ENV)]
        external: Option<String>,
        /// Seconds allowed for the external solver.
        #[arg(long, default_value_t = 60)]
        timeout: u64,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        encoding: Encoding,
        file: PathBuf,
    },
    /// Check a candidate model against a system.
    CheckModel {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        encoding: Encoding,
        file: PathBuf,
    },
}

fn fail(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(3)
}

fn read(path: &Path) -> Result<String, PipelineError> {
    std::fs::read_to_string(path).map_err(|source| PipelineError::File { path: path.to_path_buf(), source })
}

fn write_or_print(text: &str, output: Option<&Path>) -> Result<(), PipelineError> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|source| PipelineError::File { path: p.to_path_buf(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render(s: &HornSystem) -> String {
    if s.has_quantified_atoms() {
        s.to_string()
    } else {
        emit_smtlib(s).unwrap_or_else(|_| s.to_string())
    }
}

fn run(cli: Cli) -> Result<ExitCode, PipelineError> {
    match cli.command {
        Command::Parse { file } => {
            let surface = frontend::parse(&read(&file)?).map_err(hornclaw::encoder::EncodeError::from)?;
            let typed = frontend::infer_types(&surface).map_err(hornclaw::encoder::EncodeError::from)?;
            for b in typed.program.functions() {
                if let Some(t) = typed.function_type(&b.name) {
                    println!("{} : {t}", b.name);
                }
            }
            println!("{} assertion(s)", typed.assertion_sites.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Encode { encoding, output, file } => {
            let s = load_system(&file, &encoding.options())?;
            write_or_print(&emit_smtlib(&s)?, output.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Transform { steps, encoding, output, file } => {
            let steps = parse_steps(&steps).map_err(PipelineError::Config)?;
            let mut s = load_system(&file, &encoding.options())?;
            for step in &steps {
                s = apply_step(&s, step)?;
            }
            write_or_print(&render(&s), output.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve {
            strategy,
            depth,
            k,
            templates,
            steps,
            lia_budget,
            external,
            timeout,
            json,
            encoding,
            file,
        } => {
            let steps: Vec<TransformStep> = match steps {
                Some(spec) => parse_steps(&spec).map_err(PipelineError::Config)?,
                None => Vec::new(),
            };
            let mut cfg = PipelineConfig::new(file);
            cfg.mode = if encoding.canonical { Mode::Canonical } else { Mode::Specialized };
            cfg.steps = steps;
            cfg.strategy = strategy;
            cfg.depth = depth;
            cfg.k = k;
            cfg.templates = templates;
            cfg.lia_budget = lia_budget;
            cfg.external = external.filter(|c| !c.trim().is_empty());
            cfg.timeout = Duration::from_secs(timeout);
            let (_, report) = run_solve(&cfg)?;
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{report}");
            }
            Ok(ExitCode::from(report.exit_code() as u8))
        }
        Command::CheckModel { model, json, encoding, file } => {
            let s = load_system(&file, &encoding.options())?;
            let m = parse_model(&read(&model)?, &s)?;
            let result = check_model(&s, &m).map_err(|e| PipelineError::Config(e.to_string()))?;
            let code = match &result {
                CheckResult::Valid => 0,
                CheckResult::Invalid { .. } => 1,
                CheckResult::Unknown { .. } => 2,
            };
            if json {
                let doc = serde_json::json!({
                    "result": match &result {
                        CheckResult::Valid => "valid",
                        CheckResult::Invalid { .. } => "invalid",
                        CheckResult::Unknown { .. } => "unknown",
                    },
                    "detail": result.to_string(),
                });
                println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
            } else {
                println!("{result}");
            }
            Ok(ExitCode::from(code))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    run(cli).unwrap_or_else(fail)
}
