use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use lplab::distributions::{sample_cone, sample_gg_vector, sample_uniform_ball};
use lplab::exponent::PExponent;
use lplab::harness::{
    report_path, run_grid, verify_suite, write_outputs, ExperimentConfig, OutputFormat,
};
use lplab::moments::{
    cone_moment_estimate, gamma_ratio_moment, gk_equiv, lp_ball_volume, MomentQuery,
};
use lplab::polytope::{body_summary, isotropic_constant, SymmetricPolytope};
use lplab::rng::RandomSource;
use lplab::vertex_file::{fmt_f64, read_generators, write_points};

#[derive(Parser)]
#[command(
    name = "lplab",
    about = "Random symmetric polytopes from lp-sphere cone measure: \
             sampling, exact geometry, and verification",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleKind {
    /// Generalized Gaussian vectors, density ∝ exp(-|t|^p) per coordinate
    Gg,
    /// Cone-measure points on the lp unit sphere
    Cone,
    /// Uniform points in the lp unit ball
    Ball,
}

#[derive(Clone, Copy, ValueEnum)]
enum TextFormat {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum RecordFormat {
    Csv,
    Json,
}

impl From<RecordFormat> for OutputFormat {
    fn from(f: RecordFormat) -> Self {
        match f {
            RecordFormat::Csv => OutputFormat::Csv,
            RecordFormat::Json => OutputFormat::Json,
        }
    }
}

#[derive(Args)]
struct OutputArg {
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit seeded draws, one point per line (feedable to `hull`/`isoconst`)
    Sample {
        #[arg(long, value_enum, default_value = "cone")]
        kind: SampleKind,
        /// Ball exponent p in [1, inf)
        #[arg(long)]
        p: f64,
        /// Ambient dimension
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        num_points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Stream index within the seed
        #[arg(long, default_value_t = 0)]
        stream: u64,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Vertex file -> facet and volume report
    Hull {
        /// Generators, one per line (negations implicit)
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: TextFormat,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Vertex file -> isotropic constant
    Isoconst {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: TextFormat,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Closed-form moment oracles for (n, p, q, theta)
    Moments {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        n: usize,
        /// Moment order (integer: the direction estimate indexes coordinates)
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        /// Direction, comma-separated; defaults to e1
        #[arg(long, value_delimiter = ',')]
        theta: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value = "text")]
        format: TextFormat,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Run a full (p, n, N, trial) grid from a JSON config
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's worker count
        #[arg(long)]
        workers: Option<usize>,
        /// Override the config's output path
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config's master seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's output format
        #[arg(long, value_enum)]
        format: Option<RecordFormat>,
    },
    /// Run the verification battery; nonzero exit on any failure
    Verify {
        #[arg(long)]
        seed: Option<u64>,
        /// Two-sided constant for equivalence checks
        #[arg(long)]
        band: Option<f64>,
        #[arg(long)]
        mc_samples: Option<usize>,
        /// Random-polytope count for the inequality checks
        #[arg(long)]
        trials: Option<usize>,
        /// Optional JSON config supplying the remaining fields
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the machine-readable JSON report here
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn open_output(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn read_polytope(file: &PathBuf) -> Result<SymmetricPolytope> {
    let reader = BufReader::new(
        File::open(file).with_context(|| format!("cannot open {}", file.display()))?,
    );
    let generators = read_generators(reader)?;
    Ok(SymmetricPolytope::from_generators(generators)?)
}

fn read_config(path: &PathBuf) -> Result<ExperimentConfig> {
    let mut text = String::new();
    File::open(path)
        .with_context(|| format!("cannot open {}", path.display()))?
        .read_to_string(&mut text)?;
    Ok(ExperimentConfig::from_json(&text)?)
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Sample {
            kind,
            p,
            n,
            num_points,
            seed,
            stream,
            out,
        } => {
            if n == 0 {
                bail!("dimension must be at least 1");
            }
            let pe = PExponent::new(p)?;
            let mut rng = RandomSource::new(seed, stream);
            let points: Vec<Vec<f64>> = (0..num_points)
                .map(|_| match kind {
                    SampleKind::Gg => sample_gg_vector(n, pe, &mut rng),
                    SampleKind::Cone => sample_cone(n, pe, &mut rng).into_coords(),
                    SampleKind::Ball => sample_uniform_ball(n, pe, &mut rng),
                })
                .collect();
            let mut w = open_output(&out.out)?;
            write_points(&mut w, &points)?;
            w.flush()?;
        }
        Command::Hull { file, format, out } => {
            let poly = read_polytope(&file)?;
            let summary = body_summary(&poly)?;
            let mut w = open_output(&out.out)?;
            let vol_radius = summary.volume.powf(1.0 / poly.dim() as f64);
            match format {
                TextFormat::Json => {
                    let facets: Vec<serde_json::Value> = poly
                        .facets()
                        .iter()
                        .map(|f| {
                            serde_json::json!({
                                "normal": f.normal,
                                "offset": f.offset,
                                "vertex_ids": f.vertices,
                            })
                        })
                        .collect();
                    let doc = serde_json::json!({
                        "dim": poly.dim(),
                        "num_generators": poly.num_generators(),
                        "num_vertices": poly.num_vertices(),
                        "num_facets": poly.num_facets(),
                        "volume": summary.volume,
                        "vol_radius": vol_radius,
                        "barycenter": summary.barycenter,
                        "facets": facets,
                    });
                    writeln!(w, "{}", serde_json::to_string_pretty(&doc)?)?;
                }
                TextFormat::Csv => {
                    writeln!(w, "dim,generators,vertices,facets,volume,vol_radius")?;
                    writeln!(
                        w,
                        "{},{},{},{},{},{}",
                        poly.dim(),
                        poly.num_generators(),
                        poly.num_vertices(),
                        poly.num_facets(),
                        fmt_f64(summary.volume),
                        fmt_f64(vol_radius)
                    )?;
                }
                TextFormat::Text => {
                    writeln!(w, "dim           {}", poly.dim())?;
                    writeln!(w, "generators    {}", poly.num_generators())?;
                    writeln!(w, "vertices      {}", poly.num_vertices())?;
                    writeln!(w, "facets        {}", poly.num_facets())?;
                    writeln!(w, "volume        {}", fmt_f64(summary.volume))?;
                    writeln!(w, "vol_radius    {}", fmt_f64(vol_radius))?;
                }
            }
            w.flush()?;
        }
        Command::Isoconst { file, format, out } => {
            let poly = read_polytope(&file)?;
            let summary = body_summary(&poly)?;
            let l = isotropic_constant(&summary, poly.dim())?;
            let mut w = open_output(&out.out)?;
            match format {
                TextFormat::Json => {
                    writeln!(
                        w,
                        "{}",
                        serde_json::json!({
                            "dim": poly.dim(),
                            "volume": summary.volume,
                            "isotropic_constant": l,
                        })
                    )?;
                }
                TextFormat::Csv => {
                    writeln!(w, "dim,volume,isotropic_constant")?;
                    writeln!(
                        w,
                        "{},{},{}",
                        poly.dim(),
                        fmt_f64(summary.volume),
                        fmt_f64(l)
                    )?;
                }
                TextFormat::Text => writeln!(w, "{}", fmt_f64(l))?,
            }
            w.flush()?;
        }
        Command::Moments {
            p,
            n,
            q,
            theta,
            format,
            out,
        } => {
            let pe = PExponent::new(p)?;
            let theta = theta.unwrap_or_else(|| {
                let mut t = vec![0.0; n];
                if n > 0 {
                    t[0] = 1.0;
                }
                t
            });
            let query = MomentQuery::new(n, pe, q, theta.clone())?;
            let radial = gamma_ratio_moment(n, pe, q);
            let direction = cone_moment_estimate(&query)?;
            let gk = gk_equiv(&theta, pe, q as usize)?;
            let ball_vol = lp_ball_volume(n, pe);
            let mut w = open_output(&out.out)?;
            match format {
                TextFormat::Json => {
                    writeln!(
                        w,
                        "{}",
                        serde_json::json!({
                            "n": n,
                            "p": p,
                            "q": q,
                            "theta": theta,
                            "radial_moment": radial,
                            "gk_equiv": gk,
                            "cone_moment_estimate": direction,
                            "ball_volume": ball_vol,
                        })
                    )?;
                }
                TextFormat::Csv => {
                    writeln!(w, "n,p,q,radial_moment,gk_equiv,cone_moment_estimate,ball_volume")?;
                    writeln!(
                        w,
                        "{},{},{},{},{},{},{}",
                        n,
                        fmt_f64(p),
                        fmt_f64(q),
                        fmt_f64(radial),
                        fmt_f64(gk),
                        fmt_f64(direction),
                        fmt_f64(ball_vol)
                    )?;
                }
                TextFormat::Text => {
                    writeln!(w, "radial_moment         {}", fmt_f64(radial))?;
                    writeln!(w, "gk_equiv              {}", fmt_f64(gk))?;
                    writeln!(w, "cone_moment_estimate  {}", fmt_f64(direction))?;
                    writeln!(w, "ball_volume           {}", fmt_f64(ball_vol))?;
                }
            }
            w.flush()?;
        }
        Command::Experiment {
            config,
            workers,
            out,
            seed,
            format,
        } => {
            let mut cfg = read_config(&config)?;
            if let Some(w) = workers {
                cfg.parallel_workers = w;
            }
            if let Some(o) = out {
                cfg.output_path = o;
            }
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if let Some(f) = format {
                cfg.output_format = f.into();
            }
            cfg.validate()?;
            let output = run_grid(&cfg)?;
            write_outputs(&cfg, &output)?;
            let failed = output.records.iter().filter(|r| !r.is_ok()).count();
            eprintln!(
                "wrote {} records ({} failed trials) to {} and report to {}",
                output.records.len(),
                failed,
                cfg.output_path.display(),
                report_path(&cfg.output_path).display()
            );
        }
        Command::Verify {
            seed,
            band,
            mc_samples,
            trials,
            config,
            out,
        } => {
            let mut cfg = match config {
                Some(path) => read_config(&path)?,
                None => ExperimentConfig::default(),
            };
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if let Some(b) = band {
                cfg.band = b;
            }
            if let Some(m) = mc_samples {
                cfg.mc_samples = m;
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            cfg.validate()?;
            let report = verify_suite(&cfg);
            for check in &report.checks {
                println!(
                    "{} {:36} {}",
                    if check.pass { "PASS" } else { "FAIL" },
                    check.name,
                    check.details
                );
            }
            if let Some(path) = out {
                let mut w = BufWriter::new(
                    File::create(&path)
                        .with_context(|| format!("cannot create {}", path.display()))?,
                );
                writeln!(w, "{}", report.to_json())?;
                w.flush()?;
            }
            if !report.all_pass() {
                std::process::exit(1);
            }
        }
    }
    Ok(())
}
