//! `gsrep`: run ground state analyses from the command line and emit JSON
//! reports.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gsrep::cache::{IrrepCache, JsonMatrix};
use gsrep::job::{
    diagonal_one_particle, run, Command, DSpec, FactorizationParams, Fixture, FockParams, JobSpec, JobTolerances,
    SweepSpec, TranslationParams,
};
use gsrep::liealg::AlgebraKind;
use gsrep::Error;

#[derive(Parser, Debug)]
#[command(name = "gsrep", version, about = "Ground state representations: analyses, cone tests, Fock models")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Debug)]
struct Common {
    /// Use this value for every tolerance of the job.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for sampled checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Random samples per degenerate eigenspace in cone tests.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Directory of cached irreps.
    #[arg(long, global = true, env = "GSREP_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
}

#[derive(Args, Debug)]
struct Target {
    /// Algebra, e.g. `u(3)`, `su(3)`, `su(1,2)`.
    #[arg(long)]
    group: Option<String>,
    /// Diagonal entries of `d = i·diag(…)`, as `1,0,0` or `[1,0,0]`.
    #[arg(long, allow_hyphen_values = true)]
    d: Option<String>,
    /// Coefficients of `d` in the algebra basis instead of diagonal entries.
    #[arg(long)]
    coefficients: bool,
    /// Highest weight.
    #[arg(long, allow_hyphen_values = true)]
    weight: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Minimal energy space, ground state and strictness verdicts.
    Analyze {
        #[command(flatten)]
        target: Target,
        /// Further summands of a direct sum (repeatable).
        #[arg(long = "summand", allow_hyphen_values = true)]
        summands: Vec<String>,
        /// Built-in fixture instead of an irrep.
        #[arg(long, value_enum)]
        fixture: Option<FixtureArg>,
        /// Spectral translation sets as JSON interval lists, e.g. `[[1,1]]`.
        #[arg(long, requires = "translate_f")]
        translate_e: Option<String>,
        #[arg(long, requires = "translate_e")]
        translate_f: Option<String>,
    },
    /// Lowest weight and antidominance, or the weight box comparison.
    Classify {
        #[command(flatten)]
        target: Target,
        /// Half-width of the weight box.
        #[arg(long)]
        bound: Option<i64>,
    },
    /// Cone test against the coroot test or the su(1,2) predicates.
    ConeCheck {
        #[command(flatten)]
        target: Target,
    },
    /// Truncated Fock space checks.
    Fock {
        #[arg(long, default_value_t = 1)]
        modes: usize,
        #[arg(long, default_value_t = 40)]
        cutoff: usize,
        #[arg(long)]
        sector: Option<usize>,
        /// Complex vector as JSON `[[re, im], …]`.
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        w: Option<String>,
        /// Cutoffs of a residual table, e.g. `10,20,40`.
        #[arg(long)]
        cutoffs: Option<String>,
        /// Diagonal one-particle operator, e.g. `0,1`.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "one_particle")]
        one_particle_diag: Option<String>,
        /// One-particle operator as a JSON matrix `[[[re, im], …], …]`.
        #[arg(long, allow_hyphen_values = true)]
        one_particle: Option<String>,
        /// Run the factorization check with this cross coupling.
        #[arg(long)]
        factorize: Option<f64>,
    },
    /// Direct-limit weight membership and level consistency.
    Dirlim {
        /// Weight as a JSON array.
        #[arg(long, allow_hyphen_values = true)]
        weight: String,
        /// Diagonal sequence as a JSON array.
        #[arg(long, allow_hyphen_values = true)]
        d: String,
    },
    /// Sweep given as JSON, inline or `@file`.
    Sweep { spec: String },
    /// Run a job file.
    Run { job: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FixtureArg {
    HeisCommuting,
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn parse_list<T: serde::de::DeserializeOwned + std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Error> {
    let t = text.trim();
    if t.starts_with('[') {
        return serde_json::from_str(t).map_err(|e| schema(format!("{what}: {e}")));
    }
    t.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<T>().map_err(|_| schema(format!("{what}: cannot parse {p:?}"))))
        .collect()
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, Error> {
    let body = match text.strip_prefix('@') {
        Some(path) => fs::read_to_string(path)?,
        None => text.to_string(),
    };
    serde_json::from_str(&body).map_err(|e| schema(format!("{what}: {e}")))
}

fn parse_group(text: &str) -> Result<AlgebraKind, Error> {
    serde_json::from_value(serde_json::Value::String(text.to_string())).map_err(|e| schema(format!("group: {e}")))
}

fn apply_target(job: &mut JobSpec, t: &Target) -> Result<(), Error> {
    if let Some(g) = &t.group {
        job.group = Some(parse_group(g)?);
    }
    if let Some(d) = &t.d {
        let v = parse_list::<f64>(d, "d")?;
        job.d = Some(if t.coefficients {
            DSpec::Coefficients(v)
        } else {
            DSpec::Diagonal { diag: v }
        });
    }
    if let Some(w) = &t.weight {
        job.weight = Some(parse_list(w, "weight")?);
    }
    Ok(())
}

fn build_job(cmd: &Cmd) -> Result<JobSpec, Error> {
    let job = match cmd {
        Cmd::Analyze {
            target,
            summands,
            fixture,
            translate_e,
            translate_f,
        } => {
            let mut job = JobSpec::new(Command::Analyze);
            apply_target(&mut job, target)?;
            for s in summands {
                job.weights.push(parse_list(s, "summand")?);
            }
            job.fixture = fixture.map(|FixtureArg::HeisCommuting| Fixture::HeisCommuting);
            if let (Some(e), Some(f)) = (translate_e, translate_f) {
                job.translation = Some(TranslationParams {
                    e: parse_json(e, "translate-e")?,
                    f: parse_json(f, "translate-f")?,
                });
            }
            job
        }
        Cmd::Classify { target, bound } => {
            let mut job = JobSpec::new(Command::Classify);
            apply_target(&mut job, target)?;
            job.bound = *bound;
            job
        }
        Cmd::ConeCheck { target } => {
            let mut job = JobSpec::new(Command::ConeCheck);
            apply_target(&mut job, target)?;
            job
        }
        Cmd::Fock {
            modes,
            cutoff,
            sector,
            v,
            w,
            cutoffs,
            one_particle_diag,
            one_particle,
            factorize,
        } => {
            let mut job = JobSpec::new(Command::Fock);
            let one = match (one_particle_diag, one_particle) {
                (Some(d), _) => Some(diagonal_one_particle(&parse_list::<f64>(d, "one-particle-diag")?)),
                (None, Some(m)) => Some(parse_json::<JsonMatrix>(m, "one-particle")?),
                (None, None) => None,
            };
            job.fock = Some(FockParams {
                modes: *modes,
                cutoff: *cutoff,
                sector: *sector,
                v: v.as_deref().map(|s| parse_json(s, "v")).transpose()?,
                w: w.as_deref().map(|s| parse_json(s, "w")).transpose()?,
                cutoffs: cutoffs.as_deref().map(|s| parse_list(s, "cutoffs")).transpose()?,
                one_particle: one,
                factorization: factorize.map(|coupling| FactorizationParams {
                    characters: None,
                    coupling,
                }),
            });
            job
        }
        Cmd::Dirlim { weight, d } => {
            let mut job = JobSpec::new(Command::Dirlim);
            job.weight = Some(parse_list(weight, "weight")?);
            job.d = Some(DSpec::Coefficients(parse_list(d, "d")?));
            job
        }
        Cmd::Sweep { spec } => {
            let mut job = JobSpec::new(Command::Sweep);
            job.sweep = Some(parse_json::<SweepSpec>(spec, "sweep")?);
            job
        }
        Cmd::Run { job } => JobSpec::from_json(&fs::read_to_string(job)?)?,
    };
    Ok(job)
}

fn apply_common(job: &mut JobSpec, c: &Common) {
    if let Some(t) = c.tol {
        job.tolerances = JobTolerances::uniform(t);
    }
    if let Some(s) = c.seed {
        job.seed = s;
    }
    if let Some(n) = c.samples {
        job.samples = n;
    }
    if let Some(dir) = &c.cache_dir {
        job.cache_dir = Some(dir.clone());
    }
    if let Some(out) = &c.output {
        job.output = Some(out.clone());
    }
}

fn execute(cli: &Cli) -> Result<(), Error> {
    let mut job = build_job(&cli.command)?;
    apply_common(&mut job, &cli.common);
    job.validate()?;
    let cache = job.cache_dir.as_ref().map(IrrepCache::new).transpose()?;
    let report = run(&job, cache.as_ref())?;
    let text = match cli.common.format {
        Format::Json => report.to_json()?,
    };
    match &job.output {
        Some(path) => fs::write(path, text + "\n")?,
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                other => other?,
            }
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Schema(_) | Error::Json(_) => 2,
        Error::Io(_) => 3,
        _ => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let body = serde_json::json!({"error": {"code": e.code(), "message": e.to_string()}});
            eprintln!("{body}");
            ExitCode::from(exit_code(&e))
        }
    }
}
