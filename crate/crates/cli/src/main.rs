//! `medgeom`: batch analysis of finite metrics, point sets, wall spaces and kernels.
//!
//! Every command prints one JSON report. Exit codes: 0 computed (the verdict
//! may still be negative), 1 invalid input, 2 cap exceeded, 3 internal
//! verification failure.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use medgeom::kernels::{self, ClassifyOptions, Kernel, KernelError};
use medgeom::l1embed::{self, EmbedError};
use medgeom::lp::LpError;
use medgeom::medianization::{self, Limits, MedianizeError, MedianizedReport};
use medgeom::metric::{self, FiniteMetric, L1Points, MedianSpace, MedianVerdict, MetricError};
use medgeom::rat;
use medgeom::walls::{self, WallError, WallSpace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use report::{load, CliError, CliResult, Report};

#[derive(Parser)]
#[command(name = "medgeom", version, about = "Exact finite median geometry")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Add a decimal rendering with this many digits next to the exact values.
    #[arg(long, global = true, value_name = "K", value_parser = clap::value_parser!(u16).range(0..=200))]
    decimal: Option<u16>,
    /// Largest point count for median checks and wall extraction.
    #[arg(long, global = true, env = "MEDGEOM_POINT_CAP", default_value_t = metric::DEFAULT_POINT_CAP)]
    point_cap: usize,
    /// Largest point count for cut-cone linear programs.
    #[arg(long, global = true, env = "MEDGEOM_LP_CAP", default_value_t = l1embed::DEFAULT_LP_CAP,
          value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..=16))]
    lp_cap: usize,
    /// Largest wall count accepted by medianization.
    #[arg(long, global = true, env = "MEDGEOM_WALL_CAP", default_value_t = medianization::DEFAULT_WALL_CAP,
          value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..=40))]
    wall_cap: usize,
    /// Largest number of admissible sections enumerated by medianization.
    #[arg(long, global = true, env = "MEDGEOM_SECTION_CAP", default_value_t = medianization::DEFAULT_SECTION_CAP)]
    section_cap: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Median spaces and median closures.
    #[command(subcommand)]
    Median(MedianCmd),
    /// Measured walls.
    #[command(subcommand)]
    Walls(WallsCmd),
    /// ℓ¹ embeddings.
    #[command(subcommand)]
    Embed(EmbedCmd),
    /// Kernels in the embedding hierarchy.
    #[command(subcommand)]
    Kernel(KernelCmd),
}

#[derive(Subcommand)]
enum MedianCmd {
    /// Decide whether a finite metric is median.
    Check { metric: PathBuf },
    /// Close a point set of ℚ^d under the coordinatewise median.
    Closure { points: PathBuf },
}

#[derive(Subcommand)]
enum WallsCmd {
    /// Convex walls of a finite median space.
    Extract { metric: PathBuf },
    /// Median space of admissible sections of a wall space.
    Medianize { walls: PathBuf },
    /// Subdivide a geodesic interval along a decomposition of its walls.
    Subdivide { metric: PathBuf, pairs: PathBuf },
}

#[derive(Subcommand)]
enum EmbedCmd {
    /// Cut-cone decomposition or a Farkas certificate of non-embeddability.
    L1 { metric: PathBuf },
    /// Coordinates of a wall space relative to a base point.
    FromWalls {
        walls: PathBuf,
        #[arg(long)]
        base: usize,
    },
}

#[derive(Subcommand)]
enum KernelCmd {
    /// Type 1, hypermetric and CND verdicts.
    Classify {
        #[arg(required_unless_present = "random", conflicts_with = "random")]
        kernel: Option<PathBuf>,
        /// Coefficient bound for the hypermetric search.
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..=16))]
        bound: u32,
        /// Classify this many random kernels instead of a file.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairsFile {
    a: usize,
    b: usize,
    pairs: Vec<(usize, usize)>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(report) => match report.write(cli.global.decimal.map(usize::from), cli.global.output.as_ref()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(e),
        },
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {}", e.message);
    e.exit_code()
}

fn run(cli: &Cli) -> CliResult<Report> {
    let g = &cli.global;
    match &cli.command {
        Command::Median(MedianCmd::Check { metric }) => {
            let input = load::<FiniteMetric>(metric)?;
            timed("median check", vec![input.record], json!({ "point_cap": g.point_cap }), || {
                median_check(&input.value, g.point_cap)
            })
        }
        Command::Median(MedianCmd::Closure { points }) => {
            let input = load::<L1Points>(points)?;
            timed("median closure", vec![input.record], json!({ "point_cap": g.point_cap }), || {
                median_closure(&input.value, g.point_cap)
            })
        }
        Command::Walls(WallsCmd::Extract { metric }) => {
            let input = load::<FiniteMetric>(metric)?;
            timed("walls extract", vec![input.record], json!({ "point_cap": g.point_cap }), || {
                walls_extract(input.value.clone(), g.point_cap)
            })
        }
        Command::Walls(WallsCmd::Medianize { walls }) => {
            let input = load::<WallSpace>(walls)?;
            let limits = Limits {
                max_walls: g.wall_cap,
                max_sections: g.section_cap,
            };
            let options = json!({ "wall_cap": g.wall_cap, "section_cap": g.section_cap, "point_cap": g.point_cap });
            timed("walls medianize", vec![input.record], options, || {
                walls_medianize(&input.value, limits, g.point_cap)
            })
        }
        Command::Walls(WallsCmd::Subdivide { metric, pairs }) => {
            let m = load::<FiniteMetric>(metric)?;
            let p = load::<PairsFile>(pairs)?;
            timed("walls subdivide", vec![m.record, p.record], json!({ "point_cap": g.point_cap }), || {
                walls_subdivide(m.value.clone(), &p.value, g.point_cap)
            })
        }
        Command::Embed(EmbedCmd::L1 { metric }) => {
            let input = load::<FiniteMetric>(metric)?;
            timed("embed l1", vec![input.record], json!({ "lp_cap": g.lp_cap }), || {
                embed_l1(&input.value, g.lp_cap)
            })
        }
        Command::Embed(EmbedCmd::FromWalls { walls, base }) => {
            let input = load::<WallSpace>(walls)?;
            if *base >= input.value.n_points() {
                return Err(CliError::invalid(format!(
                    "base point {base} out of range for {} points",
                    input.value.n_points()
                )));
            }
            timed("embed from-walls", vec![input.record], json!({ "base": base }), || {
                embed_from_walls(&input.value, *base)
            })
        }
        Command::Kernel(KernelCmd::Classify {
            kernel,
            bound,
            random,
            seed,
        }) => {
            let opts = ClassifyOptions {
                bound: *bound,
                lp_cap: g.lp_cap,
                check_sqrt: true,
            };
            match (kernel, random) {
                (Some(path), None) => {
                    let input = load::<Kernel>(path)?;
                    let options = json!({ "bound": bound, "lp_cap": g.lp_cap });
                    timed("kernel classify", vec![input.record], options, || classify(&input.value, opts))
                }
                (None, Some(count)) => {
                    let options = json!({ "bound": bound, "lp_cap": g.lp_cap, "random": count, "seed": seed });
                    timed("kernel classify", Vec::new(), options, || classify_random(*count, *seed, opts))
                }
                _ => Err(CliError::invalid("give either a kernel file or --random N")),
            }
        }
    }
}

fn timed(command: &str, inputs: Vec<Value>, options: Value, f: impl FnOnce() -> CliResult<Value>) -> CliResult<Report> {
    let start = Instant::now();
    let result = f()?;
    Ok(Report {
        command: command.to_string(),
        inputs,
        options,
        result,
        compute_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("library types serialize")
}

fn metric_err(e: MetricError) -> CliError {
    match e {
        MetricError::CapExceeded { .. } => CliError::cap(e.to_string()),
        _ => CliError::invalid(e.to_string()),
    }
}

fn wall_err(e: WallError) -> CliError {
    match e {
        WallError::Metric(m) => metric_err(m),
        WallError::CapExceeded { .. } => CliError::cap(e.to_string()),
        WallError::Verification(_) => CliError::internal(e.to_string()),
        _ => CliError::invalid(e.to_string()),
    }
}

fn medianize_err(e: MedianizeError) -> CliError {
    match e {
        MedianizeError::Metric(m) => metric_err(m),
        MedianizeError::Walls(w) => wall_err(w),
        MedianizeError::WallCap { .. } | MedianizeError::SectionCap { .. } => CliError::cap(e.to_string()),
        MedianizeError::Verification(_) => CliError::internal(e.to_string()),
        _ => CliError::invalid(e.to_string()),
    }
}

fn embed_err(e: EmbedError) -> CliError {
    match e {
        EmbedError::Metric(m) => metric_err(m),
        EmbedError::CapExceeded { .. } => CliError::cap(e.to_string()),
        EmbedError::Verification(_) | EmbedError::Lp(LpError::Verification(_)) => CliError::internal(e.to_string()),
        _ => CliError::invalid(e.to_string()),
    }
}

fn kernel_err(e: KernelError) -> CliError {
    match e {
        KernelError::Embed(inner) => embed_err(inner),
        KernelError::EnumerationCap { .. } => CliError::cap(e.to_string()),
        KernelError::Chain(_) => CliError::internal(e.to_string()),
        _ => CliError::invalid(e.to_string()),
    }
}

fn median_check(m: &FiniteMetric, cap: usize) -> CliResult<Value> {
    Ok(match m.is_median_capped(cap).map_err(metric_err)? {
        MedianVerdict::Median => json!({ "verdict": "median", "points": m.len() }),
        MedianVerdict::NotMedian { witness, medians } => json!({
            "verdict": "not_median",
            "points": m.len(),
            "witness": witness,
            "medians": medians.to_vec(),
        }),
    })
}

fn median_closure(points: &L1Points, cap: usize) -> CliResult<Value> {
    let c = metric::median_closure_capped(points, cap).map_err(metric_err)?;
    MedianSpace::with_cap(c.metric.clone(), cap.max(c.metric.len()))
        .map_err(|e| CliError::internal(format!("median closure is not median: {e}")))?;
    Ok(json!({
        "count": c.points.len(),
        "points": to_json(&c.points),
        "generators": c.generators,
        "metric": to_json(&c.metric),
    }))
}

fn walls_extract(m: FiniteMetric, cap: usize) -> CliResult<Value> {
    let space = MedianSpace::with_cap(m, cap).map_err(metric_err)?;
    let mw = walls::extract_convex_walls(&space).map_err(wall_err)?;
    Ok(json!({
        "walls": to_json(mw.walls()),
        "representatives": mw.representatives(),
        "total_weight": rat::fmt_rat(&walls::total_weight(mw.walls())),
    }))
}

fn walls_medianize(ws: &WallSpace, limits: Limits, point_cap: usize) -> CliResult<Value> {
    let m = medianization::medianize(ws, limits).map_err(medianize_err)?;
    let median_check = if m.len() <= point_cap {
        m.median_quotient(point_cap)
            .map_err(|e| CliError::internal(format!("medianization is not median: {e}")))?;
        json!("median")
    } else {
        json!(format!("skipped: {} sections exceed the point cap of {point_cap}", m.len()))
    };
    let idempotent = if m.len() <= point_cap {
        let ok = m.check_idempotent(limits).map_err(medianize_err)?;
        if !ok {
            return Err(CliError::internal("medianization is not idempotent"));
        }
        json!(true)
    } else {
        json!(null)
    };
    let mut out = to_json(&MedianizedReport::from(&m));
    out["count"] = json!(m.len());
    out["median_check"] = median_check;
    out["idempotent"] = idempotent;
    Ok(out)
}

fn walls_subdivide(m: FiniteMetric, pairs: &PairsFile, cap: usize) -> CliResult<Value> {
    let space = MedianSpace::with_cap(m, cap).map_err(metric_err)?;
    let mw = walls::extract_convex_walls(&space).map_err(wall_err)?;
    let r = mw.subdivide_interval(pairs.a, pairs.b, &pairs.pairs).map_err(wall_err)?;
    let lengths: Vec<String> = r
        .sequence
        .windows(2)
        .map(|w| rat::fmt_rat(space.dist(w[0], w[1])))
        .collect();
    let mut out = to_json(&r);
    out["segment_lengths"] = json!(lengths);
    out["distance"] = json!(rat::fmt_rat(space.dist(pairs.a, pairs.b)));
    Ok(out)
}

fn embed_l1(m: &FiniteMetric, cap: usize) -> CliResult<Value> {
    let outcome = l1embed::cut_cone_decompose(m, cap).map_err(embed_err)?;
    Ok(to_json(&outcome))
}

fn embed_from_walls(ws: &WallSpace, base: usize) -> CliResult<Value> {
    let pts = l1embed::walls_to_embedding(ws, base).map_err(embed_err)?;
    let d = ws.pdist_matrix();
    for (x, row) in d.iter().enumerate() {
        for (y, v) in row.iter().enumerate() {
            if pts.l1_distance(x, y) != *v {
                return Err(CliError::internal(format!("embedding distorts the pair ({x}, {y})")));
            }
        }
    }
    Ok(json!({ "base": base, "points": to_json(&pts) }))
}

fn classify(k: &Kernel, opts: ClassifyOptions) -> CliResult<Value> {
    let v = kernels::classify(k, opts).map_err(kernel_err)?;
    Ok(to_json(&v))
}

fn classify_random(count: usize, seed: u64, opts: ClassifyOptions) -> CliResult<Value> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let batch = medgeom::random::kernel_batch(&mut rng, count);
    let mut instances = Vec::with_capacity(count);
    let (mut type1, mut cnd) = (0usize, 0usize);
    for (index, k) in batch.iter().enumerate() {
        let v = kernels::classify(k, opts).map_err(kernel_err)?;
        type1 += v.type1.is_yes() as usize;
        cnd += v.negative_type.is_cnd as usize;
        instances.push(json!({ "index": index, "kernel": to_json(k), "verdict": to_json(&v) }));
    }
    Ok(json!({
        "count": count,
        "type1_yes": type1,
        "cnd_yes": cnd,
        "inversions": 0,
        "instances": instances,
    }))
}
