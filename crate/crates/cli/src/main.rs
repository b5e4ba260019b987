use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use layerquad::io::{format_sample, format_weights, read_cloud, read_sample, read_weights, write_text};
use layerquad::pipeline::{
    fixture_queries, fixture_spec, generate_fixture, indicator, integrate, solve, PipelineKind,
    RhsChoice, SolveOptions, Unknowns,
};
use layerquad::study::{run_study, write_csv, StudyConfig};
use layerquad_core::geometry::{Integrand, SurfaceSpec};
use layerquad_core::solver::{NegativeWeightPolicy, Regularization};

#[derive(Parser)]
#[command(name = "layerquad", version, about = "Quadrature weights for point-sampled boundaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a fixture sample (and optionally interior queries).
    Generate(GenerateArgs),
    /// Solve for weights on a sample.
    Weights(WeightsArgs),
    /// Integrate a named function with a weight file.
    Integrate(IntegrateArgs),
    /// Evaluate the discrete indicator at query points, as CSV.
    Indicator(IndicatorArgs),
    /// Sweep sample counts and thicknesses on a fixture, as CSV.
    Study(StudyArgs),
}

#[derive(Args)]
struct FixtureArgs {
    /// sphere, ellipsoid, hemisphere, circle-r3 or s2-cap
    #[arg(long)]
    fixture: String,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Cap angle for s2-cap.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_3)]
    alpha: f64,
}

impl FixtureArgs {
    fn spec(&self) -> Result<SurfaceSpec> {
        fixture_spec(&self.fixture, [self.a, self.b, self.c], self.alpha)
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    fixture: FixtureArgs,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
    /// Also write interior query points here.
    #[arg(long)]
    queries_out: Option<PathBuf>,
    #[arg(long)]
    query_count: Option<usize>,
    /// Thickness used for hemisphere and circle-r3 queries (default 2h).
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PipelineArg {
    Closed,
    Collar,
    Tube,
    S2Cap,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnknownsArg {
    Scalar,
    Vector,
}

#[derive(Clone, Copy, ValueEnum)]
enum RhsArg {
    Interior,
    OnSurface,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Keep,
    Clamp,
    Error,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value = "closed")]
    pipeline: PipelineArg,
    #[arg(long, value_enum, default_value = "scalar")]
    unknowns: UnknownsArg,
    #[arg(long, value_enum, default_value = "interior")]
    rhs: RhsArg,
    /// Kernel softening width w.
    #[arg(long, default_value_t = 0.0)]
    softening: f64,
    /// Absolute Tikhonov parameter.
    #[arg(long, conflicts_with = "lambda_rel")]
    lambda: Option<f64>,
    /// Tikhonov parameter as a multiple of the largest matrix entry.
    #[arg(long)]
    lambda_rel: Option<f64>,
    #[arg(long, value_enum, default_value = "clamp")]
    policy: PolicyArg,
    /// Collar or tube thickness (default 2h).
    #[arg(long)]
    eps: Option<f64>,
    /// Directions per normal sphere for tubes.
    #[arg(long, default_value_t = 16)]
    q: usize,
    #[arg(long)]
    query_count: Option<usize>,
    #[arg(long)]
    exterior_count: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl SolverArgs {
    fn options(&self) -> SolveOptions {
        let mut o = SolveOptions::new(match self.pipeline {
            PipelineArg::Closed => PipelineKind::Closed,
            PipelineArg::Collar => PipelineKind::Collar,
            PipelineArg::Tube => PipelineKind::Tube,
            PipelineArg::S2Cap => PipelineKind::S2Cap,
        });
        o.unknowns = match self.unknowns {
            UnknownsArg::Scalar => Unknowns::Scalar,
            UnknownsArg::Vector => Unknowns::Vector,
        };
        o.rhs = match self.rhs {
            RhsArg::Interior => RhsChoice::Interior,
            RhsArg::OnSurface => RhsChoice::OnSurface,
        };
        o.softening = self.softening;
        o.regularization = match (self.lambda, self.lambda_rel) {
            (Some(l), _) => Some(Regularization::Absolute(l)),
            (None, Some(r)) => Some(Regularization::RelativeToMaxEntry(r)),
            (None, None) => None,
        };
        o.policy = match self.policy {
            PolicyArg::Keep => NegativeWeightPolicy::Keep,
            PolicyArg::Clamp => NegativeWeightPolicy::ClampToZero,
            PolicyArg::Error => NegativeWeightPolicy::Error,
        };
        o.epsilon = self.eps;
        o.directions = self.q;
        o.query_count = self.query_count;
        o.exterior_count = self.exterior_count;
        o.seed = self.seed;
        o
    }
}

#[derive(Args)]
struct WeightsArgs {
    #[arg(long)]
    sample: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    /// Interior query points (default: drawn from the fixture header).
    #[arg(long)]
    queries: Option<PathBuf>,
    /// Exterior query points for s2-cap.
    #[arg(long)]
    exterior_queries: Option<PathBuf>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct IntegrateArgs {
    #[arg(long)]
    sample: PathBuf,
    #[arg(long)]
    weights: PathBuf,
    /// const1, x, y, z, x2, y2, z2, xy, xz, yz
    #[arg(long, default_value = "const1")]
    integrand: String,
}

#[derive(Args)]
struct IndicatorArgs {
    #[arg(long)]
    weights: PathBuf,
    #[arg(long)]
    queries: PathBuf,
    /// CSV destination (default stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct StudyArgs {
    #[command(flatten)]
    fixture: FixtureArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, value_delimiter = ',', default_value = "250,500,1000,2000")]
    counts: Vec<usize>,
    /// Thickness as multiples of the median spacing.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    eps_factors: Vec<f64>,
    #[arg(long, default_value = "const1")]
    integrand: String,
    /// CSV destination (default stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn parse_integrand(name: &str) -> Result<Integrand> {
    match Integrand::parse(name) {
        Some(i) => Ok(i),
        None => bail!("unknown integrand {name}"),
    }
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn generate(args: GenerateArgs) -> Result<()> {
    let spec = args.fixture.spec()?;
    let sample = generate_fixture(&spec, args.count, args.seed)?;
    write_text(&args.output, &format_sample(&sample))?;
    let cloud = sample.cloud();
    println!("points {}", cloud.len());
    println!("median spacing {:.6e}", cloud.median_spacing());
    if let Some(path) = args.queries_out {
        let count = args.query_count.unwrap_or(2 * cloud.len());
        let q = fixture_queries(&spec, &sample, args.eps, count, args.seed)?;
        let file = layerquad::io::SampleFile {
            fixture: None,
            manifold_s2: false,
            data: layerquad::io::SampleData::Cloud(q),
        };
        write_text(&path, &format_sample(&file))?;
        println!("queries {count}");
    }
    Ok(())
}

fn weights(args: WeightsArgs) -> Result<()> {
    let sample = read_sample(&args.sample)?;
    let mut options = args.solver.options();
    if let Some(p) = &args.queries {
        options.queries = Some(read_cloud(p)?);
    }
    if let Some(p) = &args.exterior_queries {
        options.exterior = Some(read_cloud(p)?);
    }
    let r = solve(&sample, &options)?;
    write_text(&args.output, &format_weights(&r.weights))?;
    println!("system {} x {}", r.rows, r.cols);
    println!("lambda {:.6e}", r.weights.lambda);
    println!("residual {:.6e}", r.weights.residual);
    println!("sum tau {:.12e}", r.total);
    println!("negative weights {}", r.negative_weights);
    if let Some(c) = r.weights.offset {
        println!("offset {c:.6e}");
    }
    Ok(())
}

fn integrate_cmd(args: IntegrateArgs) -> Result<()> {
    let sample = read_sample(&args.sample)?;
    let weights = read_weights(&args.weights)?;
    let r = integrate(&sample, &weights, parse_integrand(&args.integrand)?)?;
    println!("integral {:.12e}", r.value);
    if let (Some(reference), Some(err)) = (r.reference, r.error()) {
        println!("reference {reference:.12e}");
        if reference == 0.0 {
            println!("abs error {err:.6e}");
        } else {
            println!("rel error {err:.6e}");
        }
    }
    Ok(())
}

fn indicator_cmd(args: IndicatorArgs) -> Result<()> {
    let weights = read_weights(&args.weights)?;
    let queries = read_cloud(&args.queries)?;
    let chi = indicator(&weights, &queries)?;
    let mut w = csv::Writer::from_writer(sink(&args.output)?);
    let names = ["x", "y", "z"];
    let mut header: Vec<String> = (0..queries.dim())
        .map(|i| names.get(i).map_or_else(|| format!("x{i}"), |s| s.to_string()))
        .collect();
    header.push("chi".into());
    w.write_record(&header)?;
    for (p, c) in queries.iter().zip(&chi) {
        let mut rec: Vec<String> = p.iter().map(f64::to_string).collect();
        rec.push(c.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn study(args: StudyArgs) -> Result<()> {
    let config = StudyConfig {
        fixture: args.fixture.spec()?,
        counts: args.counts,
        eps_factors: args.eps_factors,
        integrand: parse_integrand(&args.integrand)?,
        options: args.solver.options(),
    };
    let rows = run_study(&config)?;
    write_csv(&rows, sink(&args.output)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Weights(a) => weights(a),
        Command::Integrate(a) => integrate_cmd(a),
        Command::Indicator(a) => indicator_cmd(a),
        Command::Study(a) => study(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
