//! `conwork`: batch front end to the workbench.
//!
//! Exit codes: 0 success (including definitive negative verdicts), 1 usage
//! or input error, 2 an Unknown verdict, 3 a budget or size cap exceeded.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use conwork::constructions::{
    bbb_theta_with, inversion_witness, main_phi_sequence_with, onecon_successor_check_with,
    theta_sequence_with, ttt_tower_with, ClaimReport, ConstructionConfig, ConstructionError,
};
use conwork::enumerator::{EnumeratorConfig, EnumeratorError, EnumeratorState};
use conwork::operators::{
    build_slowcon, build_star, check_monotone, OperatorRegistry, OperatorSpec,
};
use conwork::oracle::{
    letterless_nf, truth_letterless, Answer, Oracle, OracleConfig, OracleError, UnknownReason,
    Verdict,
};
use conwork::ordinal::{Ordinal, OrdinalError};
use conwork::sentence::{parse_sentence, Sentence, SentenceError};

#[derive(Parser)]
#[command(name = "conwork", version, about = "Iterated consistency workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct OracleArgs {
    /// Tableau expansion budget
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    /// Largest countermodel, in worlds
    #[arg(long, default_value_t = 512)]
    model_cap: usize,
}

impl OracleArgs {
    fn oracle(self) -> Oracle {
        Oracle::new(OracleConfig {
            expansion_budget: self.budget,
            model_cap: self.model_cap,
            ..OracleConfig::default()
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a sentence is provable
    Decide {
        sentence: String,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Decide whether S proves T
    Proves {
        s: String,
        t: String,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Decide whether S strictly proves T
    Strict {
        s: String,
        t: String,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Normal form of a letterless sentence
    Nf { sentence: String },
    /// Truth value of a letterless sentence
    Truth { sentence: String },
    /// Ordinal notations
    Ord {
        #[command(subcommand)]
        command: OrdCommand,
    },
    /// Proof constructions and their instance checks
    Construct {
        #[command(subcommand)]
        command: ConstructCommand,
    },
    /// Operator checks
    Op {
        #[command(subcommand)]
        command: OpCommand,
    },
    /// Run the incompatible-sentence enumerator
    Enum {
        /// Stages to run after initialisation
        #[arg(long, default_value_t = 1)]
        stages: u64,
        #[arg(long, default_value_t = 0)]
        closure_depth: u32,
        /// Largest sentence size considered during closure
        #[arg(long, default_value_t = 4)]
        universe_size: usize,
        #[arg(long, default_value_t = 8)]
        stage_cap: u64,
        /// Also search for a gap witness up to this size
        #[arg(long)]
        size_bound: Option<usize>,
        #[command(flatten)]
        oracle: OracleArgs,
    },
}

#[derive(Subcommand)]
enum OrdCommand {
    /// Compare two notations: LT, EQ or GT
    Cmp { a: String, b: String },
    /// ZERO, SUCCESSOR or LIMIT
    Classify { a: String },
    /// Predecessor of a successor
    Pred { a: String },
    /// The n-th element of the fundamental sequence of a limit
    Fund { a: String, n: u64 },
}

#[derive(Args, Clone)]
struct OpArg {
    /// Operator name, e.g. conj_con, conj_con_k2, conj_con_ord:w
    #[arg(long, default_value = "conj_con")]
    op: String,
}

#[derive(Subcommand)]
enum ConstructCommand {
    /// Con-inversion witness for S proving Con(T)
    Inversion {
        sentence: String,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Strictness construction from PSI0
    Bbb {
        psi0: String,
        #[command(flatten)]
        op: OpArg,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Finite tower of height N
    Ttt {
        #[arg(long, default_value = "T")]
        base: String,
        #[arg(long, default_value_t = 1)]
        n: u64,
        #[command(flatten)]
        op: OpArg,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Schematic theta sequence up to ALPHA
    Theta {
        alpha: String,
        #[arg(long, default_value_t = 2)]
        limit_budget: u64,
        #[command(flatten)]
        op: OpArg,
    },
    /// Schematic phi sequence up to ALPHA
    Mainphi {
        alpha: String,
        #[arg(long, default_value_t = 2)]
        limit_budget: u64,
        #[command(flatten)]
        op: OpArg,
    },
    /// Bounded instantiation of the star sentence
    Star {
        sentence: String,
        #[arg(long, default_value_t = 2)]
        bound: u64,
    },
    /// Bounded instantiation of the slow consistency sentence
    Slowcon {
        sentence: String,
        #[arg(long, default_value_t = 2)]
        bound: u64,
    },
    /// 1-consistency successor instance at index K
    OneconCheck {
        sentence: String,
        #[arg(long, default_value_t = 1)]
        k: u64,
        #[command(flatten)]
        oracle: OracleArgs,
    },
}

#[derive(Subcommand)]
enum OpCommand {
    /// Check monotonicity on seeded weakening pairs
    CheckMonotone {
        #[command(flatten)]
        op: OpArg,
        /// Number of pairs
        #[arg(long, default_value_t = 50)]
        corpus: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        oracle: OracleArgs,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn cap(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<SentenceError> for Failure {
    fn from(e: SentenceError) -> Self {
        match e {
            SentenceError::SizeCapExceeded { .. }
            | SentenceError::Ordinal(OrdinalError::SizeCapExceeded { .. }) => {
                Failure::cap(e.to_string())
            }
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<OrdinalError> for Failure {
    fn from(e: OrdinalError) -> Self {
        SentenceError::from(e).into()
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Sentence(e) => e.into(),
            e => Failure::usage(e.to_string()),
        }
    }
}

impl From<ConstructionError> for Failure {
    fn from(e: ConstructionError) -> Self {
        match e {
            ConstructionError::Oracle(e) => e.into(),
            ConstructionError::Sentence(e) => e.into(),
            ConstructionError::TowerCapExceeded { .. } => Failure::cap(e.to_string()),
            ConstructionError::HypothesisNotMet { sentence, model } => Failure::usage(format!(
                "hypothesis not met: {sentence} is refuted by\n{model}"
            )),
            e => Failure::usage(e.to_string()),
        }
    }
}

impl From<EnumeratorError> for Failure {
    fn from(e: EnumeratorError) -> Self {
        match e {
            EnumeratorError::Oracle(e) => e.into(),
            EnumeratorError::StageCapExceeded(_) => Failure::cap(e.to_string()),
            e => Failure::usage(e.to_string()),
        }
    }
}

fn sentence(text: &str) -> Result<Sentence, Failure> {
    Ok(parse_sentence(text)?)
}

fn ordinal(text: &str) -> Result<Ordinal, Failure> {
    Ok(Ordinal::parse(text)?)
}

fn operator(name: &str) -> Result<OperatorSpec, Failure> {
    OperatorRegistry::default()
        .resolve(name)
        .ok_or_else(|| Failure::usage(format!("unknown operator {name}")))
}

fn unknown_code(reason: UnknownReason) -> u8 {
    if reason.is_resource() {
        3
    } else {
        2
    }
}

fn write_verdict(out: &mut String, v: &Verdict) -> u8 {
    match v {
        Verdict::Valid => {
            out.push_str("RESULT: VALID\n");
            0
        }
        Verdict::Invalid(model) => {
            let _ = write!(out, "RESULT: INVALID\n{model}");
            0
        }
        Verdict::Unknown(reason) => {
            let _ = writeln!(out, "RESULT: UNKNOWN {reason}");
            unknown_code(*reason)
        }
    }
}

fn write_report(out: &mut String, report: &ClaimReport) -> u8 {
    let _ = write!(out, "{report}");
    if !out.ends_with('\n') {
        out.push('\n');
    }
    match report.verdict {
        Answer::Unknown => 2,
        _ => 0,
    }
}

fn write_sequence(out: &mut String, seq: &[(Ordinal, Sentence)]) {
    for (a, s) in seq {
        let _ = writeln!(out, "INDEX {a} {s}");
    }
}

fn run(cli: Cli, out: &mut String) -> Result<u8, Failure> {
    match cli.command {
        Command::Decide {
            sentence: s,
            oracle,
        } => {
            let v = oracle.oracle().decide(&sentence(&s)?)?;
            Ok(write_verdict(out, &v))
        }
        Command::Proves { s, t, oracle } => {
            let v = oracle.oracle().proves(&sentence(&s)?, &sentence(&t)?)?;
            Ok(write_verdict(out, &v))
        }
        Command::Strict { s, t, oracle } => {
            let a = oracle
                .oracle()
                .strictly_proves(&sentence(&s)?, &sentence(&t)?)?;
            let _ = writeln!(out, "RESULT: {}", a.to_string().to_uppercase());
            Ok(if a == Answer::Unknown { 2 } else { 0 })
        }
        Command::Nf { sentence: s } => {
            let _ = writeln!(out, "{}", letterless_nf(&sentence(&s)?)?);
            Ok(0)
        }
        Command::Truth { sentence: s } => {
            let t = truth_letterless(&sentence(&s)?)?;
            out.push_str(if t { "TRUE\n" } else { "FALSE\n" });
            Ok(0)
        }
        Command::Ord { command } => run_ord(command, out),
        Command::Construct { command } => run_construct(command, out),
        Command::Op {
            command:
                OpCommand::CheckMonotone {
                    op,
                    corpus,
                    seed,
                    oracle,
                },
        } => {
            let spec = operator(&op.op)?;
            let report = check_monotone(&oracle.oracle(), &spec, corpus, seed)?;
            let _ = write!(out, "{report}");
            Ok(if report.unknown() > 0 { 2 } else { 0 })
        }
        Command::Enum {
            stages,
            closure_depth,
            universe_size,
            stage_cap,
            size_bound,
            oracle,
        } => {
            let oracle = oracle.oracle();
            let config = EnumeratorConfig {
                closure_depth,
                universe_size,
                stage_cap,
            };
            if stages > stage_cap {
                return Err(Failure::cap(format!(
                    "{stages} stages exceed the cap {stage_cap}"
                )));
            }
            let mut state = EnumeratorState::init(&oracle, config)?;
            let _ = write!(out, "{state}");
            for _ in 0..stages {
                state = state.step(&oracle)?;
                let _ = write!(out, "{state}");
            }
            if let Some(bound) = size_bound {
                let _ = writeln!(out, "{}", state.search_gap_witness(&oracle, bound)?);
            }
            Ok(0)
        }
    }
}

fn run_ord(command: OrdCommand, out: &mut String) -> Result<u8, Failure> {
    match command {
        OrdCommand::Cmp { a, b } => {
            let word = match ordinal(&a)?.cmp(&ordinal(&b)?) {
                std::cmp::Ordering::Less => "LT",
                std::cmp::Ordering::Equal => "EQ",
                std::cmp::Ordering::Greater => "GT",
            };
            let _ = writeln!(out, "{word}");
        }
        OrdCommand::Classify { a } => {
            let _ = writeln!(out, "{}", ordinal(&a)?.classify());
        }
        OrdCommand::Pred { a } => {
            let _ = writeln!(out, "{}", ordinal(&a)?.predecessor()?);
        }
        OrdCommand::Fund { a, n } => {
            let _ = writeln!(out, "{}", ordinal(&a)?.fundamental_step(n)?);
        }
    }
    Ok(0)
}

fn run_construct(command: ConstructCommand, out: &mut String) -> Result<u8, Failure> {
    let config = ConstructionConfig::default();
    match command {
        ConstructCommand::Inversion {
            sentence: s,
            oracle,
        } => {
            let (psi, report) = inversion_witness(&oracle.oracle(), &sentence(&s)?)?;
            let _ = writeln!(out, "PSI {psi}");
            Ok(write_report(out, &report))
        }
        ConstructCommand::Bbb { psi0, op, oracle } => {
            let spec = operator(&op.op)?;
            let (theta, report) =
                bbb_theta_with(&oracle.oracle(), &sentence(&psi0)?, &spec, &config)?;
            let _ = writeln!(out, "THETA {theta}");
            Ok(write_report(out, &report))
        }
        ConstructCommand::Ttt {
            base,
            n,
            op,
            oracle,
        } => {
            let spec = operator(&op.op)?;
            let (seq, report) =
                ttt_tower_with(&oracle.oracle(), &sentence(&base)?, &spec, n, &config)?;
            for (i, phi) in seq.iter().enumerate() {
                let _ = writeln!(out, "PHI {} {phi}", i + 1);
            }
            Ok(write_report(out, &report))
        }
        ConstructCommand::Theta {
            alpha,
            limit_budget,
            op,
        } => {
            let spec = operator(&op.op)?;
            let seq = theta_sequence_with(&ordinal(&alpha)?, &spec, limit_budget, &config)?;
            write_sequence(out, &seq);
            Ok(0)
        }
        ConstructCommand::Mainphi {
            alpha,
            limit_budget,
            op,
        } => {
            let spec = operator(&op.op)?;
            let seq = main_phi_sequence_with(&ordinal(&alpha)?, &spec, limit_budget, &config)?;
            write_sequence(out, &seq);
            Ok(0)
        }
        ConstructCommand::Star { sentence: s, bound } => {
            let _ = writeln!(out, "{}", build_star(&sentence(&s)?, bound)?);
            Ok(0)
        }
        ConstructCommand::Slowcon { sentence: s, bound } => {
            let _ = writeln!(out, "{}", build_slowcon(&sentence(&s)?, bound)?);
            Ok(0)
        }
        ConstructCommand::OneconCheck {
            sentence: s,
            k,
            oracle,
        } => {
            let report = onecon_successor_check_with(&oracle.oracle(), &sentence(&s)?, k, &config)?;
            Ok(write_report(out, &report))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(std::env::args_os()) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let mut out = String::new();
    match run(cli, &mut out) {
        Ok(code) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            print!("{out}");
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
