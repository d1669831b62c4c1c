use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "grotto", version, about = "Grothendieck topologies, sheaves and geometric logic on finite sites")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub inputs: Inputs,
}

#[derive(Args, Debug, Default)]
pub struct Inputs {
    /// Category file.
    #[arg(long, global = true)]
    pub site: Option<PathBuf>,
    /// Topology file (generators or covering block); repeat for lattice and transport.
    #[arg(long, global = true)]
    pub generators: Vec<PathBuf>,
    /// Sieve file.
    #[arg(long, global = true)]
    pub sieve: Option<PathBuf>,
    /// Presheaf file; repeat for galois.
    #[arg(long, global = true)]
    pub presheaf: Vec<PathBuf>,
    /// Functor file.
    #[arg(long, global = true)]
    pub functor: Option<PathBuf>,
    /// Theory file.
    #[arg(long, global = true)]
    pub theory: Option<PathBuf>,
    /// Goal file.
    #[arg(long, global = true)]
    pub goal: Option<PathBuf>,
    /// Certificate or result document to re-check.
    #[arg(long, global = true)]
    pub certificate: Option<PathBuf>,
    /// Depth bound for covering trees and proof search.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Variable bound on proof-search contexts.
    #[arg(long, global = true)]
    pub context_bound: Option<usize>,
    /// Enumeration guard; overrides GROTTO_GUARD.
    #[arg(long, global = true, env = "GROTTO_GUARD")]
    pub guard: Option<usize>,
    /// Largest carrier tried by countermodel search.
    #[arg(long, global = true)]
    pub max_carrier: Option<usize>,
    /// Record wall-clock timings in the result (breaks byte-identical output).
    #[arg(long, global = true)]
    pub timings: bool,
    /// Write the result document here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a site, topology, presheaf, functor, theory or certificate.
    Validate,
    /// Decide whether the topology generated by --generators covers --sieve.
    Covers,
    /// List a generated topology, or every topology on the site.
    Enumerate,
    /// Meet, join or implication of topologies.
    Lattice {
        #[arg(value_enum)]
        op: LatticeOp,
    },
    /// Move topologies along a functor.
    Transport {
        #[arg(value_enum)]
        op: TransportOp,
    },
    /// Sheaf condition, plus-construction and sheafification.
    Sheaf {
        #[arg(value_enum, default_value = "check")]
        op: SheafOp,
    },
    /// Closure of a sieve, or of a subpresheaf listed in the presheaf file.
    Closure,
    /// Finest topology for which the given presheaves are sheaves.
    Galois,
    /// Geometric-logic proof search.
    Logic {
        #[arg(value_enum)]
        op: LogicOp,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum LatticeOp {
    Meet,
    Join,
    Implies,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum TransportOp {
    /// Giraud topology on the total category of a fibration.
    Giraud,
    /// Generated by the base topology and the images of source generators.
    Inverse,
    /// Direct image along the functor, with its axiom report.
    Direct,
    /// Extraordinary image on the base of a fibration.
    Extraordinary,
    /// Induced topology on the comma category.
    Comma,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum SheafOp {
    Check,
    Plus,
    Sheafify,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum LogicOp {
    Prove,
    Countermodel,
}

impl Command {
    pub fn name(&self) -> String {
        let sub = |v: &dyn std::fmt::Debug| format!("{v:?}").to_lowercase();
        match self {
            Command::Validate => "validate".into(),
            Command::Covers => "covers".into(),
            Command::Enumerate => "enumerate".into(),
            Command::Lattice { op } => format!("lattice {}", sub(op)),
            Command::Transport { op } => format!("transport {}", sub(op)),
            Command::Sheaf { op } => format!("sheaf {}", sub(op)),
            Command::Closure => "closure".into(),
            Command::Galois => "galois".into(),
            Command::Logic { op } => format!("logic {}", sub(op)),
        }
    }
}
