//! Command-line front end. Exit codes: 0 pass, 1 mathematical violation,
//! 2 I/O or format error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::algebra::{catalog, validate_flavor, FiniteAlgebra};
use crate::compare::compare;
use crate::decomposition::{
    assemble_derivation, assemble_diderivation, decompose_derivation, decompose_diderivation,
    reconstruct_check, reconstruct_check_dider, Sidedness,
};
use crate::dialgebra::{kp_window, validate_dialgebra, Dialgebra, Window};
use crate::error::{Error, Result};
use crate::interchange::{
    load_dialgebra, load_operator, read_json, to_json, AlgebraDoc, DerResidualDoc, DialgebraDoc,
    DiderResidualDoc, Family, FamilyDoc, OperatorDoc, SubspaceDoc,
};
use crate::operators::{is_derivation, is_diderivation, DerivationKind};
use crate::report::Report;
use crate::solver::{algebra_derivation_space, derivation_space, diderivation_space, SubspaceBasis};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dialg", version, about = "Exact derivation and diderivation spaces of tensor-product dialgebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Human-readable text instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
}

#[derive(Debug, Args, Clone)]
pub struct Source {
    /// Algebra file; `builtin:NAME` selects a catalog algebra (Q, M2,
    /// poly3, C2, P0[n]).
    #[arg(long, value_name = "PATH")]
    pub algebra: Option<String>,
    /// Dialgebra file.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["algebra", "window"])]
    pub dialgebra: Option<PathBuf>,
    /// Perm window: builds the tensor-product dialgebra over `--algebra`.
    #[arg(long, num_args = 2, value_names = ["N1", "N2"], requires = "algebra")]
    pub window: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OpKind {
    Derivation,
    Diderivation,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    TwoSided,
    Left,
    Right,
}

impl From<KindArg> for DerivationKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::TwoSided => DerivationKind::TwoSided,
            KindArg::Left => DerivationKind::Left,
            KindArg::Right => DerivationKind::Right,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the identities of an algebra or dialgebra.
    Validate(Source),
    /// Derivation space of a dialgebra.
    Derspace(Source),
    /// Diderivation space of a dialgebra.
    Diderspace(Source),
    /// Derivation, left- or right-derivation space of an algebra.
    Algspace {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value = "two-sided")]
        kind: KindArg,
    },
    /// Assemble an operator from a component family.
    Assemble {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_name = "PATH")]
        family: PathBuf,
    },
    /// Extract the component family of a (di)derivation.
    Decompose {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_name = "PATH")]
        operator: PathBuf,
        #[arg(long, value_enum, default_value = "derivation")]
        kind: OpKind,
    },
    /// Solver spaces against assembled spans.
    Compare {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random component families per theorem and variant.
        #[arg(long, default_value_t = 0)]
        trials: usize,
    },
    /// Write a catalog algebra document.
    Catalog { name: String },
    /// Write the dialgebra document of a source.
    Build(Source),
}

struct Output {
    text: String,
    code: i32,
}

fn emit<T: Serialize>(pretty: bool, doc: &T, text: impl FnOnce() -> String, code: i32) -> Result<Output> {
    let text = if pretty {
        let mut t = text();
        if !t.ends_with('\n') {
            t.push('\n');
        }
        t
    } else {
        to_json(doc)?
    };
    Ok(Output { text, code })
}

fn load_algebra_arg(arg: &str) -> Result<FiniteAlgebra> {
    match arg.strip_prefix("builtin:") {
        Some(name) => catalog(name),
        None => crate::interchange::load_algebra(Path::new(arg)),
    }
}

fn window_of(v: &[usize]) -> Window {
    Window::new(v[0], v[1])
}

fn dialgebra_of(src: &Source) -> Result<Dialgebra> {
    if let Some(path) = &src.dialgebra {
        return load_dialgebra(path);
    }
    let Some(alg) = &src.algebra else {
        return Err(Error::Parse("one of --dialgebra or --algebra is required".into()));
    };
    let alg = load_algebra_arg(alg)?;
    match &src.window {
        Some(w) => kp_window(window_of(w), &alg),
        None => Ok(Dialgebra::from_associative(&alg)),
    }
}

fn code_of(pass: bool) -> i32 {
    if pass {
        EXIT_PASS
    } else {
        EXIT_VIOLATION
    }
}

#[derive(Serialize)]
struct ValidationDoc {
    target: String,
    pass: bool,
    checks: Vec<(String, Report)>,
}

fn validate(src: &Source, pretty: bool) -> Result<Output> {
    let mut checks = Vec::new();
    let target;
    if src.dialgebra.is_none() && src.window.is_none() {
        let arg = src
            .algebra
            .as_deref()
            .ok_or_else(|| Error::Parse("one of --dialgebra or --algebra is required".into()))?;
        let alg = load_algebra_arg(arg)?;
        target = alg.name.clone();
        checks.push((format!("{} identities and unit", alg.flavor), validate_flavor(&alg)));
    } else {
        let d = dialgebra_of(src)?;
        target = d.name.clone();
        checks.push(("dialgebra axioms".to_string(), validate_dialgebra(&d)));
    }
    let pass = checks.iter().all(|(_, r)| r.is_pass());
    let doc = ValidationDoc {
        target,
        pass,
        checks,
    };
    emit(
        pretty,
        &doc,
        || {
            let mut t = format!("{}\n", doc.target);
            for (name, r) in &doc.checks {
                let _ = writeln!(t, "{name}: {r}");
            }
            t
        },
        code_of(pass),
    )
}

fn space_text(label: &str, b: &SubspaceBasis) -> String {
    format!("{label} of {} (operators on {} dims): dimension {}", b.tag, b.space_dim, b.dimension())
}

fn assemble(src: &Source, family: &Path, pretty: bool) -> Result<Output> {
    let d = dialgebra_of(src)?;
    let fam: FamilyDoc = read_json(family)?;
    let (op, check) = match fam.to_family()? {
        Family::Der(f) => {
            let op = assemble_derivation(&d, &f)?;
            let r = is_derivation(&d, &op)?;
            (op, r)
        }
        Family::Dider(f, s) => {
            let op = assemble_diderivation(&d, &f, s)?;
            let r = is_diderivation(&d, &op)?;
            (op, r)
        }
    };
    #[derive(Serialize)]
    struct Doc {
        operator: OperatorDoc,
        check: Report,
    }
    let pass = check.is_pass();
    let doc = Doc {
        operator: OperatorDoc::from_op(&op),
        check,
    };
    emit(
        pretty,
        &doc,
        || format!("assembled operator on {} ({} dims)\nchecker: {}", d.name, d.dim(), doc.check),
        code_of(pass),
    )
}

fn decompose(src: &Source, operator: &Path, kind: OpKind, pretty: bool) -> Result<Output> {
    let d = dialgebra_of(src)?;
    let op = load_operator(operator)?;
    match kind {
        OpKind::Derivation => {
            let (fam, res) = decompose_derivation(&d, &op)?;
            let factorization = reconstruct_check(&d, &op)?;
            #[derive(Serialize)]
            struct Doc {
                family: FamilyDoc,
                residual: DerResidualDoc,
                factorization: Report,
            }
            let pass = res.is_clean() && factorization.is_pass();
            let doc = Doc {
                family: FamilyDoc::from_der(&fam),
                residual: DerResidualDoc::from_residual(&res),
                factorization,
            };
            emit(
                pretty,
                &doc,
                || {
                    format!(
                        "perm parts k: {:?}\nalg parts j: {:?}\nphi maps: {} (determined by perm parts: {})\nroundtrip discrepancies: {}\ncomponent violations: {}\nfactorization: {}",
                        fam.perm_parts.keys().collect::<Vec<_>>(),
                        fam.alg_parts.keys().collect::<Vec<_>>(),
                        res.phi.len(),
                        res.phi_determined(),
                        res.roundtrip_total,
                        res.components.len(),
                        doc.factorization
                    )
                },
                code_of(pass),
            )
        }
        OpKind::Diderivation => {
            let (fam, res) = decompose_diderivation(&d, &op)?;
            let factorization = reconstruct_check_dider(&d, &op)?;
            let sidedness = if res.all_left() { Sidedness::Left } else { Sidedness::Right };
            #[derive(Serialize)]
            struct Doc {
                family: FamilyDoc,
                residual: DiderResidualDoc,
                factorization: Report,
            }
            let pass = res.is_clean() && factorization.is_pass();
            let doc = Doc {
                family: FamilyDoc::from_dider(&fam, sidedness),
                residual: DiderResidualDoc::from_residual(&res),
                factorization,
            };
            emit(
                pretty,
                &doc,
                || {
                    let sides: Vec<String> = res
                        .sidedness
                        .iter()
                        .map(|s| format!("k={} left={} right={}", s.k, s.left, s.right))
                        .collect();
                    format!(
                        "alg parts (i1,i2): {:?}\nperm parts: {}\nroundtrip discrepancies: {}\ncomponent violations: {}\nfactorization: {}",
                        fam.alg_parts.keys().collect::<Vec<_>>(),
                        if sides.is_empty() { "none".to_string() } else { sides.join("; ") },
                        res.roundtrip_total,
                        res.components.len(),
                        doc.factorization
                    )
                },
                code_of(pass),
            )
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Output> {
    let pretty = cli.pretty;
    match &cli.command {
        Command::Validate(src) => validate(src, pretty),
        Command::Derspace(src) => {
            let b = derivation_space(&dialgebra_of(src)?);
            emit(pretty, &SubspaceDoc::from_basis(&b), || space_text("Der", &b), EXIT_PASS)
        }
        Command::Diderspace(src) => {
            let b = diderivation_space(&dialgebra_of(src)?);
            emit(pretty, &SubspaceDoc::from_basis(&b), || space_text("Dider", &b), EXIT_PASS)
        }
        Command::Algspace { source, kind } => {
            let arg = source
                .algebra
                .as_deref()
                .ok_or_else(|| Error::Parse("--algebra is required".into()))?;
            let alg = load_algebra_arg(arg)?;
            let b = algebra_derivation_space(&alg, (*kind).into());
            let label = match kind {
                KindArg::TwoSided => "Der",
                KindArg::Left => "LDer",
                KindArg::Right => "RDer",
            };
            emit(pretty, &SubspaceDoc::from_basis(&b), || space_text(label, &b), EXIT_PASS)
        }
        Command::Assemble { source, family } => assemble(source, family, pretty),
        Command::Decompose {
            source,
            operator,
            kind,
        } => decompose(source, operator, *kind, pretty),
        Command::Compare {
            source,
            seed,
            trials,
        } => {
            let report = compare(&dialgebra_of(source)?, *seed, *trials)?;
            let code = code_of(report.pass);
            emit(pretty, &report, || report.to_string(), code)
        }
        Command::Catalog { name } => {
            let alg = catalog(name)?;
            emit(pretty, &AlgebraDoc::from_algebra(&alg), || {
                format!("{} ({} dims, {})", alg.name, alg.dim(), alg.flavor)
            }, EXIT_PASS)
        }
        Command::Build(src) => {
            let d = dialgebra_of(src)?;
            emit(pretty, &DialgebraDoc::from_dialgebra(&d), || {
                format!("{} ({} dims)", d.name, d.dim())
            }, EXIT_PASS)
        }
    }
}

fn write_output(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Parses arguments, runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
        }
    };
    let result = dispatch(&cli).and_then(|out| {
        write_output(&cli, &out.text)?;
        Ok(out.code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("dialg: {e}");
            if let Error::Precondition { report, .. } = &e {
                eprintln!("{report}");
            }
            match e {
                Error::Precondition { .. } => EXIT_VIOLATION,
                _ => EXIT_ERROR,
            }
        }
    }
}

/// Caps rayon's global pool from `DIALG_THREADS`.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("DIALG_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("DIALG_THREADS must be a positive integer, got `{value}`")))?;
    if n == 0 {
        return Err(Error::Parse("DIALG_THREADS must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::contract(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_window_and_flags() {
        let cli = Cli::try_parse_from([
            "dialg", "compare", "--algebra", "builtin:Q", "--window", "1", "1", "--seed", "7", "--pretty",
        ])
        .unwrap();
        assert!(cli.pretty);
        let Command::Compare { source, seed, trials } = cli.command else { panic!() };
        assert_eq!(source.window, Some(vec![1, 1]));
        assert_eq!((seed, trials), (7, 0));
    }

    #[test]
    fn window_requires_algebra() {
        assert!(Cli::try_parse_from(["dialg", "derspace", "--window", "1", "1"]).is_err());
    }

    #[test]
    fn builtin_sources() {
        let src = Source {
            algebra: Some("builtin:poly3".into()),
            dialgebra: None,
            window: Some(vec![1, 1]),
        };
        assert_eq!(dialgebra_of(&src).unwrap().dim(), 12);
        let plain = Source { window: None, ..src };
        assert_eq!(dialgebra_of(&plain).unwrap().name, "Di(k[t]/(t^3))");
    }
}
