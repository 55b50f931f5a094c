//! Command definitions shared by the flag parser and JSON job files.

use std::path::Path;

use clap::{Args, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

/// Root-system data for the classification commands.
#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecArgs {
    /// Root system type, one of A, B, C, D.
    #[arg(long = "type")]
    #[serde(rename = "type")]
    pub typ: String,
    #[arg(long)]
    pub rank: usize,
    /// Simple roots in Δ, e.g. `a1,a3`.
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub delta: Vec<String>,
    /// Roots of U; `pm-a1` gives both signs.
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub u: Vec<String>,
    /// Parameter values `ROOT=VALUE`; unset parameters stay symbolic.
    #[arg(long = "t", value_delimiter = ',')]
    #[serde(default)]
    pub t: Vec<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    Product,
    Commutator,
    Casimir,
    Associativity,
    Quasiclassical,
    All,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Command {
    /// Build the coefficient family of a classification datum and check it.
    Classify {
        #[command(flatten)]
        #[serde(flatten)]
        spec: SpecArgs,
    },
    /// Check a family, optionally overridden with `ROOT=VALUE`, against the
    /// coefficient conditions and the tensor criterion.
    VerifyRmatrix {
        #[command(flatten)]
        #[serde(flatten)]
        spec: SpecArgs,
        /// Sets `x_α = VALUE` and `x_{-α} = -VALUE`.
        #[arg(long = "set", value_delimiter = ',')]
        #[serde(default)]
        set: Vec<String>,
    },
    /// Lagrangian subalgebra of `g × g` attached to a classification datum.
    Lagrangian {
        #[command(flatten)]
        #[serde(flatten)]
        spec: SpecArgs,
    },
    /// Dynamical twist equation for the ABRR twist of sl(2).
    AbrrCheck {
        /// Double `J_k`, as a control.
        #[arg(long)]
        #[serde(default)]
        perturb: Option<usize>,
    },
    /// Classical limit of the ABRR twist and the CDYBE.
    CdybeCheck {
        /// Multiply `r` by this rational before checking.
        #[arg(long)]
        #[serde(default)]
        scale: Option<String>,
    },
    /// Star-product identities on SL(2)/H.
    Star {
        #[arg(long, value_enum, default_value_t = Identity::All)]
        #[serde(default = "all")]
        identity: Identity,
        /// Compute `f_a ⋆ f_b` for basis names, e.g. `x,y`.
        #[arg(long)]
        #[serde(default)]
        pair: Option<String>,
    },
    /// Intertwiner composition against the twist on finite modules.
    VermaOracle {
        /// Highest weight of V.
        #[arg(long, default_value_t = 2)]
        #[serde(default = "two")]
        v: usize,
        /// Highest weight of W.
        #[arg(long, default_value_t = 2)]
        #[serde(default = "two")]
        w: usize,
        #[arg(long)]
        #[serde(default)]
        depth: Option<usize>,
        #[arg(long)]
        #[serde(default)]
        perturb: Option<usize>,
    },
    /// Projection of the ABRR twist to a non-dynamical twist.
    ProjectTwist {
        /// Conjugation parameter of the Borel complement; 1 is the standard one.
        #[arg(long, default_value_t = 1)]
        #[serde(default = "one")]
        splitting: i64,
        #[arg(long)]
        #[serde(default)]
        perturb: Option<usize>,
    },
}

fn all() -> Identity {
    Identity::All
}

fn two() -> usize {
    2
}

fn one() -> i64 {
    1
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::VerifyRmatrix { .. } => "verify-rmatrix",
            Command::Lagrangian { .. } => "lagrangian",
            Command::AbrrCheck { .. } => "abrr-check",
            Command::CdybeCheck { .. } => "cdybe-check",
            Command::Star { .. } => "star",
            Command::VermaOracle { .. } => "verma-oracle",
            Command::ProjectTwist { .. } => "project-twist",
        }
    }
}

/// A job file: the command fields plus the global options.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct JobFile {
    command: String,
    #[serde(default)]
    args: serde_json::Map<String, serde_json::Value>,
    #[serde(default)]
    order: Option<usize>,
    #[serde(default)]
    hbar_one: Option<bool>,
    #[serde(default)]
    json_out: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Job {
    pub command: Command,
    pub order: Option<usize>,
    pub hbar_one: Option<bool>,
    pub json_out: Option<String>,
}

pub fn parse_job(text: &str) -> Result<Job, String> {
    let f: JobFile = serde_json::from_str(text).map_err(|e| format!("job file: {e}"))?;
    let mut obj = f.args;
    obj.insert("command".into(), serde_json::Value::String(f.command));
    let command = serde_json::from_value(serde_json::Value::Object(obj)).map_err(|e| format!("job file: {e}"))?;
    Ok(Job {
        command,
        order: f.order,
        hbar_one: f.hbar_one,
        json_out: f.json_out,
    })
}

pub fn read_job(path: &Path) -> Result<Job, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_job(&text)
}
