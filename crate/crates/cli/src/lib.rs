//! Command pipelines behind the `unitgroup` binary.
//!
//! [`RunConfig`] is the validated form of the command line; [`run`] executes
//! it against a writer so the same code path serves the binary and tests.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

use unitgroup::gmatrix::{q8_block_decompose, rg_matrix};
use unitgroup::structure::{self, DEFAULT_SEED};
use unitgroup::unitary::{
    enumerate_unitary_units, structured_unitary_generation, EnumerationOptions, UnitaryError,
    DEFAULT_BUDGET,
};
use unitgroup::verify::{verify, VerifyOptions};
use unitgroup::{gf2k, FieldSpec, GroupAlgebra, GroupSpec, UnitGroup};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "UNITGROUP_WORKERS";

pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const CLAIM_FAILURE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const BUDGET: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Budget(UnitaryError),
    #[error("{0} claim(s) failed")]
    ClaimFailure(usize),
    #[error("analysis failed: {0}")]
    Analysis(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => exit::USAGE,
            CliError::Budget(_) => exit::BUDGET,
            CliError::ClaimFailure(_) | CliError::Analysis(_) => exit::CLAIM_FAILURE,
        }
    }
}

impl From<UnitaryError> for CliError {
    fn from(e: UnitaryError) -> Self {
        match e {
            UnitaryError::BudgetExceeded { .. } => CliError::Budget(e),
            other => CliError::Analysis(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    FieldInfo,
    EnumerateUnitary,
    AnalyzeStructure,
    MatrixDump,
    VerifyPaper,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSource {
    Builtin(String),
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Brute,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub k: u32,
    pub modulus: Option<String>,
    pub group: GroupSource,
    pub mode: Mode,
    pub budget: u64,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub count_only: bool,
    pub blocks: bool,
    pub element: Option<String>,
}

impl RunConfig {
    pub fn new(command: Command, k: u32) -> Self {
        RunConfig {
            command,
            k,
            modulus: None,
            group: GroupSource::Builtin("q8".into()),
            mode: Mode::Brute,
            budget: DEFAULT_BUDGET,
            output: None,
            format: Format::Text,
            seed: DEFAULT_SEED,
            count_only: false,
            blocks: false,
            element: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.k == 0 {
            return Err(CliError::Config("k must be at least 1".into()));
        }
        if self.mode == Mode::Structured && self.group != GroupSource::Builtin("q8".into()) {
            return Err(CliError::Config(
                "structured mode is only available for --group q8".into(),
            ));
        }
        Ok(())
    }

    fn field(&self) -> Result<FieldSpec, CliError> {
        let modulus = self
            .modulus
            .as_deref()
            .map(gf2k::parse_poly)
            .transpose()
            .map_err(|e| CliError::Config(e.to_string()))?
            .map(|m| {
                u32::try_from(m).map_err(|_| CliError::Config("modulus degree too large".into()))
            })
            .transpose()?;
        FieldSpec::new(self.k, modulus).map_err(|e| CliError::Config(e.to_string()))
    }

    fn group(&self) -> Result<GroupSpec, CliError> {
        match &self.group {
            GroupSource::Builtin(name) => builtin_group(name),
            GroupSource::File(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::Config(format!("cannot read {}: {e}", path.display()))
                })?;
                GroupSpec::parse(&text).map_err(|e| CliError::Config(e.to_string()))
            }
        }
    }

    fn algebra(&self) -> Result<GroupAlgebra, CliError> {
        Ok(GroupAlgebra::new(self.field()?, self.group()?))
    }
}

pub fn builtin_group(name: &str) -> Result<GroupSpec, CliError> {
    let n = match name.to_ascii_lowercase().as_str() {
        "q8" => 2,
        "q16" => 3,
        "q32" => 4,
        "q64" => 5,
        other => {
            return Err(CliError::Config(format!(
                "unknown group {other:?}; expected q8, q16, q32 or q64"
            )))
        }
    };
    GroupSpec::quaternion(n).map_err(|e| CliError::Config(e.to_string()))
}

/// Executes `config`, writing the report to `out` (element listings go to
/// `config.output` when set). Failed claims come back as
/// [`CliError::ClaimFailure`] after the full report has been written.
pub fn run(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    config.validate()?;
    match config.command {
        Command::FieldInfo => field_info(config, out),
        Command::EnumerateUnitary => enumerate(config, out),
        Command::AnalyzeStructure => analyze(config, out),
        Command::MatrixDump => matrix_dump(config, out),
        Command::VerifyPaper => verify_paper(config, out),
    }
}

#[derive(Serialize)]
struct FieldInfo {
    k: u32,
    modulus: String,
    order: u32,
    elements: Vec<FieldEntry>,
}

#[derive(Serialize)]
struct FieldEntry {
    element: String,
    inverse: Option<String>,
}

fn field_info(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let f = config.field()?;
    let elements = f
        .elements()
        .take(256)
        .map(|a| FieldEntry {
            element: a.to_string(),
            inverse: f.inv(a).ok().map(|b| b.to_string()),
        })
        .collect();
    let info = FieldInfo {
        k: f.degree(),
        modulus: f.modulus_string(),
        order: f.order(),
        elements,
    };
    match config.format {
        Format::Json => writeln!(out, "{}", to_json(&info)?)?,
        Format::Text => {
            writeln!(
                out,
                "GF(2^{}) modulus {} order {}",
                info.k, info.modulus, info.order
            )?;
            for e in &info.elements {
                let inv = e.inverse.as_deref().unwrap_or("-");
                writeln!(out, "{}  inverse {}", e.element, inv)?;
            }
            if f.order() > 256 {
                writeln!(out, "... ({} elements not shown)", f.order() - 256)?;
            }
        }
    }
    Ok(())
}

fn unitary_group(config: &RunConfig, alg: &GroupAlgebra) -> Result<UnitGroup, CliError> {
    let opts = EnumerationOptions {
        budget: config.budget,
    };
    Ok(match config.mode {
        Mode::Brute => enumerate_unitary_units(alg, &opts)?,
        Mode::Structured => structured_unitary_generation(alg)?,
    })
}

fn enumerate(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let alg = config.algebra()?;
    let units = unitary_group(config, &alg)?;
    if config.count_only {
        writeln!(out, "{}", units.len())?;
        return Ok(());
    }
    match &config.output {
        Some(path) => {
            let mut file = BufWriter::new(fs::File::create(path)?);
            write_elements(&units, &mut file)?;
            file.flush()?;
            writeln!(out, "wrote {} elements to {}", units.len(), path.display())?;
        }
        None => write_elements(&units, out)?,
    }
    Ok(())
}

fn write_elements(units: &UnitGroup, out: &mut dyn Write) -> io::Result<()> {
    for w in units.elements() {
        writeln!(out, "{}", w.to_hex_list())?;
    }
    Ok(())
}

fn analyze(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let alg = config.algebra()?;
    let units = unitary_group(config, &alg)?;
    let q = alg.is_canonical_q8().then(|| alg.group_basis());
    let report = structure::analyze(&units, q.as_deref(), config.seed)
        .map_err(|e| CliError::Analysis(e.to_string()))?;
    match config.format {
        Format::Json => writeln!(out, "{}", to_json(&report)?)?,
        Format::Text => {
            writeln!(out, "group order                  {}", report.group_order)?;
            writeln!(out, "center order                 {}", report.center_order)?;
            writeln!(
                out,
                "center elementary abelian    {}",
                report.center_is_elementary_abelian
            )?;
            writeln!(out, "exponent                     {}", report.exponent)?;
            let census: Vec<String> = report
                .order_census
                .iter()
                .map(|(o, c)| format!("{o}:{c}"))
                .collect();
            writeln!(out, "order census                 {}", census.join(" "))?;
            writeln!(
                out,
                "commutator subgroup order    {}",
                report.commutator_subgroup_order
            )?;
            writeln!(
                out,
                "hamiltonian                  {} ({:?})",
                report.is_hamiltonian, report.hamiltonian_mode
            )?;
            match &report.decomposition {
                Some(d) => writeln!(out, "decomposition                C_2^{} x Q_8", d.rank)?,
                None => writeln!(out, "decomposition                none")?,
            }
        }
    }
    Ok(())
}

fn matrix_dump(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let alg = config.algebra()?;
    let text = config
        .element
        .as_deref()
        .ok_or_else(|| CliError::Config("matrix-dump needs --element".into()))?;
    let w = alg
        .parse(text)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let m = rg_matrix(&alg, &w);
    writeln!(out, "# sigma({})", alg.pretty(&w))?;
    write!(out, "{}", m.to_hex_rows())?;
    if config.blocks {
        let b = q8_block_decompose(&m).map_err(|e| CliError::Config(e.to_string()))?;
        for (name, blk) in [("A", &b.a), ("B", &b.b), ("C", &b.c)] {
            writeln!(out, "# {name}")?;
            write!(out, "{}", blk.to_hex_rows())?;
        }
    }
    Ok(())
}

fn verify_paper(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let opts = VerifyOptions {
        k: config.k,
        seed: config.seed,
        budget: config.budget,
    };
    if config.k > unitgroup::gf2k::MAX_DEGREE {
        return Err(CliError::Config(format!("k = {} is too large", config.k)));
    }
    // fail early rather than after partial output
    let alg = GroupAlgebra::new(config.field()?, GroupSpec::q8());
    let width = alg.packed_width();
    if width > 63 || (1u64 << width) > config.budget {
        return Err(CliError::Budget(UnitaryError::BudgetExceeded {
            candidates: 1u128 << width.min(127),
            budget: config.budget,
        }));
    }
    let report = verify(&opts);
    match config.format {
        Format::Json => writeln!(out, "{}", to_json(&report)?)?,
        Format::Text => write!(out, "{report}")?,
    }
    let failed = report.failures().count();
    if failed > 0 {
        return Err(CliError::ClaimFailure(failed));
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Analysis(e.to_string()))
}

/// Default worker count from [`WORKERS_ENV`], if set and valid.
pub fn workers_from_env() -> Option<usize> {
    std::env::var(WORKERS_ENV)
        .ok()?
        .parse()
        .ok()
        .filter(|&n| n > 0)
}
