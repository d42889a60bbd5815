use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use mvcycles::compat::{
    is_compatible, is_strongly_compatible_with, is_weakly_compatible, sample, DEFAULT_MAX_DRAWS,
};
use mvcycles::field::{Field, Fp, Q};
use mvcycles::io::{
    flag_point_value, lattice_from_value, lattice_value, picture_from_value, picture_value,
    polytope_value,
};
use mvcycles::kostant::{enumerate_pictures, RootCombination};
use mvcycles::lattice::Lattice;
use mvcycles::polytope::{enumerate_mv_cycles, mv_polytope_with, MvPolytope};
use mvcycles::svg::{render, SvgOptions};
use mvcycles::verify::{self, Budget, Report};
use mvcycles::{Coweight, Error, Exec, KostantPicture};

/// The 12-loop picture on six columns used as the default instance of the
/// polytope sweeps, with its coweight.
const DEFAULT_PICTURE: &str = "[1,2],[1,3],[1,4],[1,5],[2,5],[2,6],[3,4]x2,[3,6],[4,6]x2,[5,6]";
const DEFAULT_LAMBDA: &str = "2,0,1,0,-1,-2";

/// Compatible but not strongly compatible; its orbit polytope is smaller
/// than the MV polytope of its picture.
const DEFAULT_WITNESS: &str = r#"{"n": 6, "generators": [
    "e2+2e3+3e4+2e5+t^-2e6", "t^2e1+t^2e2+te2+2te3+3te4",
    "te5+t^-1e6", "e6", "t^3e2", "t^3e3"]}"#;

#[derive(Parser)]
#[command(name = "mvcycles", version, about = "MV-cycles and MV-polytopes for GL_n in the lattice model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// `modular` runs lattice linear algebra over a 61-bit prime field.
    #[arg(long, global = true, value_enum, default_value_t = Arithmetic::Exact)]
    arithmetic: Arithmetic,
    /// Disable data parallelism.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Arithmetic {
    Exact,
    Modular,
}

#[derive(Subcommand)]
enum Command {
    /// List the Kostant pictures of a weight, or the MV-cycles between two coweights.
    Enumerate {
        #[arg(long)]
        n: Option<usize>,
        /// Simple-root coefficients, e.g. `1,1`.
        #[arg(long, allow_hyphen_values = true)]
        weight: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
    },
    /// The MV-polytope of a picture and a coweight.
    Polytope {
        #[command(flatten)]
        input: PictureArgs,
        /// Also draw the polytope (n = 3 only).
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = 40.0)]
        scale: f64,
        #[arg(long)]
        no_labels: bool,
    },
    /// Lattice tools.
    Lattice {
        #[command(subcommand)]
        command: LatticeCommand,
    },
    /// Draw a strongly compatible lattice for a picture and coweight.
    Sample {
        #[command(flatten)]
        input: PictureArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_DRAWS)]
        max_draws: usize,
    },
    /// Run a verification sweep.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum LatticeCommand {
    /// Depths, picture, coweight, compatibility grades and orbit polytope.
    Analyze { file: PathBuf },
}

#[derive(Args, Clone)]
struct PictureArgs {
    /// `[1,2]x3,[2,3]`, a JSON picture, or a path to one.
    #[arg(long)]
    picture: Option<String>,
    /// Number of columns when the picture does not fix it.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Commutativity,
    Ancestry,
    Kostant,
    StrongMoment,
    Purity,
    Hrep,
    Degeneration,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    which: Which,
    #[arg(long)]
    seed: Option<u64>,
    /// Random instances (collapse sweeps, purity pairs, degeneration lattices).
    #[arg(long)]
    budget: Option<usize>,
    /// Wall-clock cap for the random part of the collapse sweeps.
    #[arg(long)]
    seconds: Option<u64>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Length cap of the exhaustive collapse sweeps, height cap otherwise.
    #[arg(long)]
    len_max: Option<usize>,
    /// Samples per picture for strong-moment and hrep.
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    input: PictureArgs,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Lattice files expected to fail the polytope criterion.
    #[arg(long)]
    witness: Vec<PathBuf>,
    /// Include wall times in the output.
    #[arg(long)]
    timings: bool,
}

/// Failure that is not a usage error.
#[derive(Debug)]
struct Failed(String);

impl std::fmt::Display for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Failed {}

struct Out {
    text: String,
    passed: bool,
}

impl Out {
    fn ok(text: String) -> Self {
        Out { text, passed: true }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let written = match &cli.output {
                Some(path) => fs::write(path, &out.text).with_context(|| format!("writing {}", path.display())),
                None => std::io::stdout().write_all(out.text.as_bytes()).map_err(Into::into),
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<Failed>() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<Out> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    match &cli.command {
        Command::Enumerate { n, weight, alpha, beta } => {
            enumerate(cli.format, *n, weight.as_deref(), alpha.as_deref(), beta.as_deref()).map(Out::ok)
        }
        Command::Polytope { input, svg, scale, no_labels } => {
            let (p, lambda) = input.resolve()?;
            let poly = mv_polytope_with(&p, &lambda, exec)?;
            if let Some(path) = svg {
                let opts = SvgOptions {
                    scale: *scale,
                    labels: !no_labels,
                };
                fs::write(path, render(&poly, &opts)?).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(Out::ok(match cli.format {
                Format::Json => pretty(&polytope_value(&poly)),
                Format::Table => polytope_table(&poly),
            }))
        }
        Command::Lattice {
            command: LatticeCommand::Analyze { file },
        } => {
            let v = read_json(file)?;
            let report = match cli.arithmetic {
                Arithmetic::Exact => analyze::<Q>(&v, exec)?,
                Arithmetic::Modular => analyze::<Fp>(&v, exec)?,
            };
            Ok(Out::ok(match cli.format {
                Format::Json => pretty(&report),
                Format::Table => analysis_table(&report),
            }))
        }
        Command::Sample { input, seed, max_draws } => {
            let (p, lambda) = input.resolve()?;
            let v = match cli.arithmetic {
                Arithmetic::Exact => draw::<Q>(&p, &lambda, *seed, *max_draws)?,
                Arithmetic::Modular => draw::<Fp>(&p, &lambda, *seed, *max_draws)?,
            };
            Ok(Out::ok(pretty(&v)))
        }
        Command::Verify(args) => verify_cmd(cli.format, args, exec),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn coweight(s: &str) -> anyhow::Result<Coweight> {
    Ok(Coweight::parse(s)?)
}

fn parse_picture(text: &str, n: Option<usize>) -> anyhow::Result<KostantPicture> {
    let trimmed = text.trim();
    if trimmed.starts_with("{\"") || trimmed.starts_with("{ ") || trimmed.starts_with("{\n") {
        return Ok(picture_from_value(&serde_json::from_str(trimmed)?)?);
    }
    let path = Path::new(trimmed);
    if path.is_file() {
        return Ok(picture_from_value(&read_json(path)?)?);
    }
    let n = n.ok_or_else(|| anyhow!("--n is required for picture {text:?}"))?;
    Ok(KostantPicture::parse(n, trimmed)?)
}

impl PictureArgs {
    fn lambda(&self) -> anyhow::Result<Option<Coweight>> {
        self.lambda.as_deref().map(coweight).transpose()
    }

    /// Picture and coweight; `n` defaults to the length of the coweight.
    fn resolve(&self) -> anyhow::Result<(KostantPicture, Coweight)> {
        let lambda = self.lambda()?.ok_or_else(|| anyhow!("--lambda is required"))?;
        let text = self.picture.as_deref().ok_or_else(|| anyhow!("--picture is required"))?;
        let p = parse_picture(text, self.n.or(Some(lambda.n())))?;
        if p.n() != lambda.n() {
            bail!("picture has {} columns but lambda has {} entries", p.n(), lambda.n());
        }
        Ok((p, lambda))
    }

    fn resolve_or_default(&self) -> anyhow::Result<(KostantPicture, Coweight)> {
        if self.picture.is_none() && self.lambda.is_none() {
            return Ok((KostantPicture::parse(6, DEFAULT_PICTURE)?, coweight(DEFAULT_LAMBDA)?));
        }
        self.resolve()
    }
}

fn enumerate(
    format: Format,
    n: Option<usize>,
    weight: Option<&str>,
    alpha: Option<&str>,
    beta: Option<&str>,
) -> anyhow::Result<String> {
    let pictures = match (weight, alpha, beta) {
        (Some(w), None, None) => {
            let w = RootCombination(coweight(w)?.0);
            let n = n.unwrap_or(w.0.len() + 1);
            if n != w.0.len() + 1 {
                bail!("--weight needs n - 1 = {} entries", n - 1);
            }
            if !w.is_nonnegative() {
                bail!("weight must be nonnegative");
            }
            enumerate_pictures(n, &w)
        }
        (None, Some(a), Some(b)) => {
            let (a, b) = (coweight(a)?, coweight(b)?);
            if a.n() != b.n() || n.is_some_and(|n| n != a.n()) {
                bail!("alpha and beta must have the same length");
            }
            enumerate_mv_cycles(&a, &b)
        }
        _ => bail!("give either --weight or both --alpha and --beta"),
    };
    Ok(match format {
        Format::Json => pretty(&json!({
            "count": pictures.len(),
            "pictures": pictures.iter().map(picture_value).collect::<Vec<_>>(),
        })),
        Format::Table => {
            let mut s: String = pictures.iter().map(|p| format!("{}\n", p.describe())).collect();
            s.push_str(&format!("count {}\n", pictures.len()));
            s
        }
    })
}

fn polytope_table(poly: &MvPolytope) -> String {
    let mut s = format!("lambda {}\n", poly.lambda);
    for (w, v) in &poly.vertex_by_perm {
        s.push_str(&format!("{}  {v}\n", w.key()));
    }
    s.push_str(&format!("{} distinct vertices\n", poly.vertices.len()));
    for (cols, c) in &poly.facets {
        let cols: Vec<String> = cols.iter().map(|i| i.to_string()).collect();
        s.push_str(&format!("sum x_{{{}}} <= {c}\n", cols.join(",")));
    }
    s
}

fn analyze<F: Field>(v: &Value, exec: Exec) -> anyhow::Result<Value> {
    let y: Lattice<F> = lattice_from_value(v)?;
    let p = y.picture_of()?;
    let lambda = y.lambda_of()?;
    let weak = is_weakly_compatible(&y, &p)?;
    let compatible = weak && is_compatible(&y, &p)?;
    let strong = compatible && is_strongly_compatible_with(&y, &p, exec)?;
    let orbit = y.orbit_polytope(exec)?;
    let mv = mv_polytope_with(&p, &lambda, exec)?;
    Ok(json!({
        "lattice": lattice_value(&y),
        "delta": y.delta().0,
        "relative_dimension": y.relative_dimension(),
        "picture": picture_value(&p),
        "picture_text": p.describe(),
        "lambda": lambda.0,
        "weakly_compatible": weak,
        "compatible": compatible,
        "strongly_compatible": strong,
        "orbit_polytope": polytope_value(&orbit),
        "orbit_polytope_is_mv_polytope": orbit.vertex_by_perm == mv.vertex_by_perm,
    }))
}

fn analysis_table(r: &Value) -> String {
    let mut s = String::new();
    for key in [
        "delta",
        "relative_dimension",
        "picture_text",
        "lambda",
        "weakly_compatible",
        "compatible",
        "strongly_compatible",
        "orbit_polytope_is_mv_polytope",
    ] {
        s.push_str(&format!("{key:<30} {}\n", r[key]));
    }
    s
}

fn draw<F: Field>(p: &KostantPicture, lambda: &Coweight, seed: u64, max_draws: usize) -> anyhow::Result<Value> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match sample::<F, _>(p, lambda, &mut rng, max_draws) {
        Ok(s) => Ok(json!({
            "draws": s.draws,
            "lattice": lattice_value(&s.lattice),
            "point": flag_point_value(&s.point),
        })),
        Err(e @ Error::RetriesExhausted(_)) => Err(Failed(e.to_string()).into()),
        Err(e) => Err(e.into()),
    }
}

fn verify_cmd(format: Format, a: &VerifyArgs, exec: Exec) -> anyhow::Result<Out> {
    let explicit_pair = a.alpha.is_some() && a.beta.is_some();
    let needs_seed = match a.which {
        Which::Kostant => false,
        Which::Purity => !explicit_pair,
        _ => true,
    };
    let seed = match (a.seed, needs_seed) {
        (Some(s), _) => s,
        (None, false) => 0,
        (None, true) => bail!("--seed is required for this sweep"),
    };
    let all = a.which == Which::All;
    let runs = |w: Which| all || a.which == w;
    let mut reports: Vec<Report> = Vec::new();

    if runs(Which::Commutativity) || runs(Which::Ancestry) {
        let budget = Budget {
            random: a.budget.unwrap_or(1000),
            seconds: a.seconds,
        };
        let (c, anc) = verify::sweep_collapse(
            a.n_max.unwrap_or(4),
            a.len_max.unwrap_or(6),
            6,
            12,
            budget,
            seed,
            exec,
        );
        if runs(Which::Commutativity) {
            reports.push(c);
        }
        if runs(Which::Ancestry) {
            reports.push(anc);
        }
    }
    if runs(Which::Kostant) {
        reports.push(verify::sweep_kostant(
            a.n_max.unwrap_or(5),
            a.len_max.unwrap_or(10),
            exec,
        ));
    }
    if runs(Which::StrongMoment) || runs(Which::Hrep) {
        let (p, lambda) = a.input.resolve_or_default()?;
        let mut witnesses: Vec<Lattice> = Vec::new();
        for path in &a.witness {
            witnesses.push(lattice_from_value(&read_json(path)?)?);
        }
        if a.witness.is_empty() && runs(Which::StrongMoment) {
            witnesses.push(lattice_from_value(&serde_json::from_str(DEFAULT_WITNESS)?)?);
        }
        let samples = a.samples.unwrap_or(if runs(Which::StrongMoment) { 20 } else { 5 });
        let cases = [(p.clone(), lambda.clone())];
        let (r, drawn) =
            verify::sweep_strong_moment(&cases, samples, seed, DEFAULT_MAX_DRAWS, &witnesses, exec);
        if runs(Which::StrongMoment) {
            reports.push(r);
        }
        if runs(Which::Hrep) {
            let lattices: Vec<Lattice> = drawn[0].iter().filter_map(|d| d.strong.clone()).collect();
            reports.push(verify::sweep_hrep(&p, &lambda, &lattices, exec));
        }
    }
    if runs(Which::Purity) {
        let pairs = if explicit_pair && !all {
            vec![(
                coweight(a.alpha.as_deref().unwrap())?,
                coweight(a.beta.as_deref().unwrap())?,
            )]
        } else {
            verify::random_pairs(
                a.budget.filter(|_| !all).unwrap_or(20),
                seed,
                a.n_max.unwrap_or(5),
                a.len_max.unwrap_or(8),
            )
        };
        reports.push(verify::sweep_purity(&pairs, exec));
    }
    if runs(Which::Degeneration) {
        let n = a.input.n.unwrap_or(4);
        reports.push(verify::sweep_degeneration(
            a.budget.filter(|_| !all).unwrap_or(50),
            seed,
            n,
            6,
            exec,
        ));
    }

    let passed = reports.iter().all(Report::passed);
    let text = match format {
        Format::Json => pretty(&json!({
            "passed": passed,
            "seed": seed,
            "reports": reports.iter().map(|r| r.to_value(a.timings)).collect::<Vec<_>>(),
        })),
        Format::Table => {
            let mut s: String = reports.iter().map(|r| r.table_row(a.timings) + "\n").collect();
            s.push_str(if passed { "PASS\n" } else { "FAIL\n" });
            s
        }
    };
    Ok(Out { text, passed })
}
