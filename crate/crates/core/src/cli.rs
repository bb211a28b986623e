//! Command-line surface. Exit status: 0 on success, 1 when an input fails
//! validation, 2 when an identity or tolerance check fails.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::One;

use crate::blocks::{check_factorization, Layout, TruncatedBlockMatrix};
use crate::coeffs::{a_row, b_row};
use crate::error::{Error, Result};
use crate::rational::{to_f64, to_pq, Rational};
use crate::state::{KWeight, StateSignature};
use crate::urn::{self, Word};
use crate::walk::{evolve_blocks, evolve_lattice, simulate, ExactDistribution, Mechanism, SimConfig};
use crate::young::{self, YoungState, DEFAULT_GLYPH};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "dualwalk", version, about = "Exact random walks on the k-spherical dual of U(n+1)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Add a decimal column next to every exact value.
    #[arg(long, global = true)]
    pub float: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    /// One JSON object per line.
    Records,
}

#[derive(Args, Debug, Clone)]
pub struct StateArgs {
    /// Fixed weight, comma separated, weakly decreasing.
    #[arg(long, allow_hyphen_values = true)]
    pub k: String,
    /// State, comma separated, interlacing with k.
    #[arg(long, allow_hyphen_values = true)]
    pub m: String,
}

#[derive(Args, Debug, Clone)]
pub struct SimArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Number of composed steps.
    #[arg(long, default_value_t = 1)]
    pub t: usize,
    #[arg(long, default_value_t = 10_000)]
    pub walkers: u64,
    #[arg(long, env = "DUALWALK_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Sampler for the increase substep: direct, urn or young.
    #[arg(long, default_value = "direct")]
    pub mechanism: String,
    /// Worker threads; does not affect results.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the a_sq and b_sq rows at a state.
    Coeffs(StateArgs),
    /// Dump a truncated block matrix as (row, column, value) entries.
    Matrix {
        #[arg(long, allow_hyphen_values = true)]
        k: String,
        #[arg(long, default_value_t = 4)]
        wmax: i64,
        /// M, M1 or M2.
        #[arg(long, default_value = "M")]
        which: String,
    },
    /// Check A = Y R, B = X R' + Y S, C = X S' block by block.
    FactorCheck {
        #[arg(long, allow_hyphen_values = true)]
        k: String,
        /// Number of block levels to check.
        #[arg(long, default_value_t = 10)]
        wmax: i64,
        /// Print one line per identity.
        #[arg(long)]
        verbose: bool,
    },
    /// List every urn word with its class and probability at a state.
    UrnEnum(StateArgs),
    /// Class sizes of the urn sample space.
    UrnCard {
        #[arg(long)]
        n: usize,
    },
    /// Draw the Young diagram of a state.
    YoungRender {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value = DEFAULT_GLYPH)]
        glyph: String,
    },
    /// Monte Carlo run of the composed walk.
    Simulate {
        #[command(flatten)]
        sim: SimArgs,
        /// Write trajectories of the first walkers here.
        #[arg(long)]
        log: Option<PathBuf>,
        /// How many walkers to record in the trajectory log.
        #[arg(long, default_value_t = 16)]
        log_walkers: u64,
    },
    /// Exact distribution after t composed steps.
    Evolve {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 1)]
        t: usize,
        /// Use the truncated block matrix with this cut-off instead of the lattice.
        #[arg(long)]
        wmax: Option<i64>,
    },
    /// Simulate and evolve, report the total-variation distance.
    Compare {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, default_value_t = 0.02)]
        tolerance: f64,
    },
}

/// Parses `"6,3"` or `"6 3"`.
pub fn parse_ints(s: &str) -> Result<Vec<i64>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<i64>()
                .map_err(|_| Error::Parse(format!("{t:?} is not an integer")))
        })
        .collect()
}

fn parse_k(s: &str) -> Result<KWeight> {
    KWeight::new(parse_ints(s)?)
}

fn parse_state(args: &StateArgs) -> Result<StateSignature> {
    let k = parse_k(&args.k)?;
    StateSignature::new(parse_ints(&args.m)?, &k)
}

fn join_m(m: &[i64]) -> String {
    m.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Exact value, plus a decimal in parentheses when asked.
fn show(x: &Rational, float: bool) -> String {
    if float {
        format!("{} ({})", to_pq(x), to_f64(x))
    } else {
        to_pq(x)
    }
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    format: Format,
    float: bool,
}

impl Ctx<'_> {
    fn line(&mut self, s: &str) -> io::Result<()> {
        writeln!(self.out, "{s}")
    }

    /// Writes a CSV header, adding `<col>_float` after each listed exact column.
    fn header(&mut self, cols: &[&str], exact: &[&str]) -> io::Result<()> {
        let mut out = Vec::new();
        for c in cols {
            out.push(c.to_string());
            if self.float && exact.contains(c) {
                out.push(format!("{c}_float"));
            }
        }
        self.line(&out.join(","))
    }

    fn csv_exact(&self, x: &Rational) -> String {
        if self.float {
            format!("{},{}", to_pq(x), to_f64(x))
        } else {
            to_pq(x)
        }
    }

    fn record(&mut self, fields: &[(&str, Field)]) -> io::Result<()> {
        let body: Vec<String> = fields
            .iter()
            .flat_map(|(key, v)| match v {
                Field::Int(i) => vec![format!("\"{key}\":{i}")],
                Field::Float(f) => vec![format!("\"{key}\":{f}")],
                Field::Text(s) => vec![format!("\"{key}\":\"{s}\"")],
                Field::Exact(x) => {
                    let mut v = vec![format!("\"{key}\":\"{}\"", to_pq(x))];
                    if self.float {
                        v.push(format!("\"{key}_float\":{}", to_f64(x)));
                    }
                    v
                }
            })
            .collect();
        self.line(&format!("{{{}}}", body.join(",")))
    }
}

enum Field {
    Int(i64),
    Float(f64),
    Text(String),
    Exact(Rational),
}

enum Failure {
    Invalid(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

/// Runs the CLI on `argv` (program name first), writing normal output to
/// `stdout` unless `--output` is given. Returns the exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return code;
        }
    };
    let mut file;
    let out: &mut dyn Write = match &cli.output {
        Some(path) => match File::create(path) {
            Ok(f) => {
                file = BufWriter::new(f);
                &mut file
            }
            Err(e) => {
                let _ = writeln!(stderr, "error: cannot create {}: {e}", path.display());
                return EXIT_INVALID;
            }
        },
        None => stdout,
    };
    let mut ctx = Ctx {
        out,
        format: cli.format,
        float: cli.float,
    };
    let status = dispatch(&cli.command, &mut ctx, stderr).and_then(|code| {
        ctx.out.flush()?;
        Ok(code)
    });
    match status {
        Ok(code) => code,
        Err(Failure::Invalid(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INVALID
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INVALID
        }
    }
}

fn dispatch(cmd: &Command, ctx: &mut Ctx, stderr: &mut dyn Write) -> std::result::Result<i32, Failure> {
    match cmd {
        Command::Coeffs(args) => coeffs(ctx, &parse_state(args)?),
        Command::Matrix { k, wmax, which } => {
            let layout: Layout = which.parse()?;
            matrix(ctx, &TruncatedBlockMatrix::build(layout, &parse_k(k)?, *wmax)?)
        }
        Command::FactorCheck { k, wmax, verbose } => factor_check(ctx, &parse_k(k)?, *wmax, *verbose),
        Command::UrnEnum(args) => urn_enum(ctx, &parse_state(args)?),
        Command::UrnCard { n } => urn_card(ctx, *n),
        Command::YoungRender { state, glyph } => {
            let d = YoungState::from_signature(&parse_state(state)?)?;
            write!(ctx.out, "{}", young::render(&d, glyph))?;
            Ok(EXIT_OK)
        }
        Command::Simulate { sim, log, log_walkers } => {
            let cfg = sim_config(sim, if log.is_some() { *log_walkers } else { 0 })?;
            let outcome = simulate(&cfg)?;
            if let Some(path) = log {
                let mut f = BufWriter::new(File::create(path)?);
                f.write_all(outcome.log.to_records().as_bytes())?;
                f.flush()?;
            }
            empirical(ctx, &outcome.empirical)?;
            Ok(EXIT_OK)
        }
        Command::Evolve { state, t, wmax } => {
            let start = parse_state(state)?;
            let dist = match wmax {
                None => evolve_lattice(&ExactDistribution::from([(start, Rational::one())]), *t),
                Some(w) => {
                    let (dist, ev) = evolve_blocks(&start, *t, *w)?;
                    if let Some(warn) = &ev.warning {
                        writeln!(
                            stderr,
                            "warning: up to {} of the mass can cross w = {w}; {} was lost",
                            to_pq(&warn.leaked_mass_bound),
                            to_pq(&ev.leaked)
                        )?;
                    }
                    dist
                }
            };
            exact(ctx, &dist)?;
            Ok(EXIT_OK)
        }
        Command::Compare { sim, tolerance } => {
            let cfg = sim_config(sim, 0)?;
            let outcome = simulate(&cfg)?;
            let dist = evolve_lattice(&ExactDistribution::from([(cfg.initial.clone(), Rational::one())]), cfg.steps);
            let tv = outcome.empirical.tv_distance(&dist);
            let pass = tv <= *tolerance;
            match ctx.format {
                Format::Records => ctx.record(&[
                    ("tv", Field::Float(tv)),
                    ("tolerance", Field::Float(*tolerance)),
                    ("walkers", Field::Int(cfg.walkers as i64)),
                    ("pass", Field::Text(pass.to_string())),
                ])?,
                Format::Csv => {
                    ctx.line("tv,tolerance,walkers,pass")?;
                    ctx.line(&format!("{tv},{tolerance},{},{pass}", cfg.walkers))?;
                }
                Format::Table => ctx.line(&format!(
                    "TV distance {tv:.6} over {} walkers, tolerance {tolerance}: {}",
                    cfg.walkers,
                    if pass { "PASS" } else { "FAIL" }
                ))?,
            }
            Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
    }
}

fn sim_config(sim: &SimArgs, log_walkers: u64) -> Result<SimConfig> {
    Ok(SimConfig {
        initial: parse_state(&sim.state)?,
        steps: sim.t,
        walkers: sim.walkers,
        seed: sim.seed,
        mechanism: sim.mechanism.parse::<Mechanism>()?,
        workers: sim.workers,
        log_walkers,
    })
}

fn coeffs(ctx: &mut Ctx, m: &StateSignature) -> std::result::Result<i32, Failure> {
    let a = a_row(m);
    let b = b_row(m);
    match ctx.format {
        Format::Table => {
            let row = |v: &[Rational], float| v.iter().map(|x| show(x, float)).collect::<Vec<_>>().join(" ");
            ctx.line(&format!("a: {}", row(&a, ctx.float)))?;
            ctx.line(&format!("b: {}", row(&b, ctx.float)))?;
        }
        Format::Csv => {
            ctx.header(&["i", "a_sq", "b_sq"], &["a_sq", "b_sq"])?;
            for (i, (x, y)) in a.iter().zip(&b).enumerate() {
                let line = format!("{},{},{}", i + 1, ctx.csv_exact(x), ctx.csv_exact(y));
                ctx.line(&line)?;
            }
        }
        Format::Records => {
            for (i, (x, y)) in a.into_iter().zip(b).enumerate() {
                ctx.record(&[
                    ("i", Field::Int(i as i64 + 1)),
                    ("a_sq", Field::Exact(x)),
                    ("b_sq", Field::Exact(y)),
                ])?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn matrix(ctx: &mut Ctx, mat: &TruncatedBlockMatrix) -> std::result::Result<i32, Failure> {
    match ctx.format {
        Format::Csv => write!(ctx.out, "{}", mat.to_csv(ctx.float))?,
        Format::Table | Format::Records => {
            for w in mat.w_min()..=mat.w_max() {
                for (pos, r) in mat.omega().iter().enumerate() {
                    for (q, v) in mat.row(w, pos) {
                        if ctx.format == Format::Table {
                            let line = format!("({w}; {r}) -> ({}; {}): {}", q.w, q.r, show(&v, ctx.float));
                            ctx.line(&line)?;
                        } else {
                            ctx.record(&[
                                ("w_row", Field::Int(w)),
                                ("r_row", Field::Text(r.to_string())),
                                ("w_col", Field::Int(q.w)),
                                ("r_col", Field::Text(q.r.to_string())),
                                ("value", Field::Exact(v)),
                            ])?;
                        }
                    }
                }
            }
        }
    }
    Ok(EXIT_OK)
}

fn factor_check(ctx: &mut Ctx, k: &KWeight, levels: i64, verbose: bool) -> std::result::Result<i32, Failure> {
    let report = check_factorization(k, levels)?;
    if verbose {
        for l in report.lines() {
            ctx.line(&l)?;
        }
    }
    let total = report.checks.len();
    if report.is_ok() {
        ctx.line(&format!("OK ({total} identities)"))?;
        Ok(EXIT_OK)
    } else {
        if !verbose {
            for l in report.lines().into_iter().filter(|l| !l.ends_with(": OK")) {
                ctx.line(&l)?;
            }
        }
        let bad = report.violations().count();
        ctx.line(&format!("FAILED ({bad} of {total} identities)"))?;
        Ok(EXIT_CHECK_FAILED)
    }
}

fn urn_enum(ctx: &mut Ctx, m: &StateSignature) -> std::result::Result<i32, Failure> {
    let n = m.n();
    let words = urn::enumerate_words(n)?;
    match ctx.format {
        Format::Csv => ctx.header(&["word", "class", "probability"], &["probability"])?,
        Format::Table => ctx.line("word class probability")?,
        Format::Records => {}
    }
    for word in &words {
        let class = urn::classify(word, n)?.0;
        let p = urn::word_probability(word, m)?;
        match ctx.format {
            Format::Csv => {
                let line = format!("\"{word}\",{class},{}", ctx.csv_exact(&p));
                ctx.line(&line)?;
            }
            Format::Table => ctx.line(&format!("{} {class} {}", compact(word), show(&p, ctx.float)))?,
            Format::Records => ctx.record(&[
                ("word", Field::Text(word.to_string())),
                ("class", Field::Int(class as i64)),
                ("probability", Field::Exact(p)),
            ])?,
        }
    }
    Ok(EXIT_OK)
}

fn compact(word: &Word) -> String {
    word.0.iter().map(|l| l.to_string()).collect::<Vec<_>>().join("")
}

fn urn_card(ctx: &mut Ctx, n: usize) -> std::result::Result<i32, Failure> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()).into());
    }
    let sizes = urn::class_cardinality_recursive(n);
    let total = urn::sample_space_size(n);
    // cross-check by enumeration where it is affordable
    let enumerated = if n <= urn::ENUMERATION_CAP {
        Some(urn::class_cardinality_enumerated(n)?)
    } else {
        None
    };
    let agrees = enumerated
        .as_ref()
        .is_none_or(|e| e.iter().zip(&sizes).all(|(a, b)| num_bigint::BigUint::from(*a) == *b));
    match ctx.format {
        Format::Table => {
            let row: Vec<String> = sizes.iter().map(|s| s.to_string()).collect();
            ctx.line(&row.join(" "))?;
            ctx.line(&format!("total {total}"))?;
            if enumerated.is_some() {
                ctx.line(if agrees { "enumeration agrees" } else { "enumeration DISAGREES" })?;
            }
        }
        Format::Csv => {
            ctx.line("j,recursive,enumerated")?;
            for (j, s) in sizes.iter().enumerate() {
                let e = enumerated.as_ref().map(|e| e[j].to_string()).unwrap_or_default();
                ctx.line(&format!("{},{s},{e}", j + 1))?;
            }
        }
        Format::Records => {
            for (j, s) in sizes.iter().enumerate() {
                let mut fields = vec![("j", Field::Int(j as i64 + 1)), ("recursive", Field::Text(s.to_string()))];
                if let Some(e) = &enumerated {
                    fields.push(("enumerated", Field::Text(e[j].to_string())));
                }
                ctx.record(&fields)?;
            }
        }
    }
    Ok(if agrees { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn empirical(ctx: &mut Ctx, emp: &crate::walk::Empirical) -> io::Result<()> {
    match ctx.format {
        Format::Csv => write!(ctx.out, "{}", emp.to_csv()),
        Format::Table => {
            for (s, c) in &emp.counts {
                ctx.line(&format!("{s} {c} {}", emp.frequency(s)))?;
            }
            Ok(())
        }
        Format::Records => {
            for (s, c) in &emp.counts {
                ctx.record(&[
                    ("state", Field::Text(join_m(s.m()))),
                    ("count", Field::Int(*c as i64)),
                    ("frequency", Field::Float(emp.frequency(s))),
                ])?;
            }
            Ok(())
        }
    }
}

fn exact(ctx: &mut Ctx, dist: &ExactDistribution) -> io::Result<()> {
    match ctx.format {
        Format::Csv => {
            ctx.header(&["state", "probability"], &["probability"])?;
            for (s, p) in dist {
                let line = format!("\"{}\",{}", join_m(s.m()), ctx.csv_exact(p));
                ctx.line(&line)?;
            }
        }
        Format::Table => {
            for (s, p) in dist {
                ctx.line(&format!("{s} {}", show(p, ctx.float)))?;
            }
        }
        Format::Records => {
            for (s, p) in dist {
                ctx.record(&[("state", Field::Text(join_m(s.m()))), ("probability", Field::Exact(p.clone()))])?;
            }
        }
    }
    Ok(())
}
