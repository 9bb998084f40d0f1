use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use unitgroup::structure::DEFAULT_SEED;
use unitgroup::unitary::DEFAULT_BUDGET;
use unitgroup_cli::{
    exit, run, CliError, Command, Format, GroupSource, Mode, RunConfig, WORKERS_ENV,
};

/// Unitary unit groups of F_(2^k) G: enumeration, structure analysis and
/// verification of the F_(2^k) Q_8 results.
#[derive(Parser, Debug)]
#[command(name = "unitgroup", version)]
struct Cli {
    /// Worker threads for enumeration and analysis.
    #[arg(long, global = true, env = WORKERS_ENV)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Field modulus, order and the inverse table.
    FieldInfo {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// List the unitary units V_*(KG), one hex coefficient vector per line.
    EnumerateUnitary {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        enumeration: EnumArgs,
        /// Write elements to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print only the number of elements.
        #[arg(long)]
        count_only: bool,
    },
    /// Center, exponent, order census, Hamiltonian test and decomposition of V_*(KG).
    AnalyzeStructure {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        enumeration: EnumArgs,
        #[command(flatten)]
        fmt: FormatArgs,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Print the RG-matrix of an element given as comma-separated hex coefficients.
    MatrixDump {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        element: String,
        /// Also print the A, B, C circulant blocks (Q_8 only).
        #[arg(long)]
        blocks: bool,
    },
    /// Run every structural check for F_(2^k) Q_8 and print a PASS/FAIL table.
    VerifyPaper {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        fmt: FormatArgs,
    },
}

#[derive(Args, Debug)]
struct FieldArgs {
    /// Extension degree of GF(2^k).
    #[arg(long)]
    k: u32,
    /// Field modulus such as "x^3+x^2+1"; defaults to the smallest irreducible.
    #[arg(long)]
    modulus: Option<String>,
}

#[derive(Args, Debug)]
struct GroupArgs {
    /// Built-in group: q8, q16, q32 or q64.
    #[arg(long, default_value = "q8", conflicts_with = "group_file")]
    group: String,
    /// Cayley table file (`order n`, labels, n rows of indices).
    #[arg(long)]
    group_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EnumArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Brute)]
    mode: ModeArg,
    /// Maximum number of candidate vectors for brute-force search.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args, Debug)]
struct FormatArgs {
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Shorthand for --format json.
    #[arg(long)]
    json: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Brute,
    Structured,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Text,
    Json,
}

impl FormatArgs {
    fn resolve(&self) -> Format {
        match (self.json, self.format) {
            (true, _) | (_, FormatArg::Json) => Format::Json,
            _ => Format::Text,
        }
    }
}

fn base(command: Command, field: &FieldArgs) -> RunConfig {
    let mut c = RunConfig::new(command, field.k);
    c.modulus = field.modulus.clone();
    c
}

fn apply_group(c: &mut RunConfig, g: &GroupArgs) {
    c.group = match &g.group_file {
        Some(p) => GroupSource::File(p.clone()),
        None => GroupSource::Builtin(g.group.clone()),
    };
}

fn apply_enum(c: &mut RunConfig, e: &EnumArgs) {
    c.mode = match e.mode {
        ModeArg::Brute => Mode::Brute,
        ModeArg::Structured => Mode::Structured,
    };
    c.budget = e.budget;
}

fn to_config(sub: &Sub) -> RunConfig {
    match sub {
        Sub::FieldInfo { field, fmt } => {
            let mut c = base(Command::FieldInfo, field);
            c.format = fmt.resolve();
            c
        }
        Sub::EnumerateUnitary {
            field,
            group,
            enumeration,
            out,
            count_only,
        } => {
            let mut c = base(Command::EnumerateUnitary, field);
            apply_group(&mut c, group);
            apply_enum(&mut c, enumeration);
            c.output = out.clone();
            c.count_only = *count_only;
            c
        }
        Sub::AnalyzeStructure {
            field,
            group,
            enumeration,
            fmt,
            seed,
        } => {
            let mut c = base(Command::AnalyzeStructure, field);
            apply_group(&mut c, group);
            apply_enum(&mut c, enumeration);
            c.format = fmt.resolve();
            c.seed = *seed;
            c
        }
        Sub::MatrixDump {
            field,
            group,
            element,
            blocks,
        } => {
            let mut c = base(Command::MatrixDump, field);
            apply_group(&mut c, group);
            c.element = Some(element.clone());
            c.blocks = *blocks;
            c
        }
        Sub::VerifyPaper {
            field,
            budget,
            seed,
            fmt,
        } => {
            let mut c = base(Command::VerifyPaper, field);
            c.budget = *budget;
            c.seed = *seed;
            c.format = fmt.resolve();
            c
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = to_config(&cli.command);

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.workers.filter(|&n| n > 0) {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(exit::USAGE as u8);
        }
    };

    let result = pool.install(|| {
        let mut out = io::stdout().lock();
        let r = run(&config, &mut out);
        let _ = out.flush();
        r
    });
    match result {
        Ok(()) => ExitCode::from(exit::SUCCESS as u8),
        // Reader went away (e.g. `| head`); nothing left to report.
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => {
            ExitCode::from(exit::SUCCESS as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
