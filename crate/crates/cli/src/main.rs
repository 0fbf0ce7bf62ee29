//! `anyangle` command-line tool.
//!
//! Exit codes: 0 success, 1 invalid input, 2 internal error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyangle::bench::{
    compare_report, load_map_file, read_csv, render_path, run_suite, BenchError, BenchSpec,
};
use anyangle::candidate_vertices::CvContext;
use anyangle::grid_map::{
    generate_clustered, generate_maze, generate_random, GridMap, Node, Query,
};
use anyangle::preprocess::{preprocess, VertexMode};
use anyangle::search::{
    astar_grid, astar_visgraph, fa_astar, fa_astar_escalating, theta_star, visgraph_nodes,
    Algorithm, EscalationPolicy, PathResult, PlannerConfig,
};
use anyangle::visibility::VisibilityConfig;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "anyangle", version, about = "Any-angle grid path planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a map and write it as octile text or JSON.
    Generate(GenerateArgs),
    /// Plan one query on one map and print the result as JSON.
    Solve(SolveArgs),
    /// Run a benchmark spec and write the rows as CSV.
    Bench(BenchArgs),
    /// Summarise a benchmark CSV.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MapKind {
    Empty,
    Random,
    Clustered,
    Maze,
}

#[derive(clap::Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: MapKind,
    #[arg(long)]
    width: u32,
    #[arg(long)]
    height: u32,
    /// Obstacle fraction in [0, 1] (random, clustered).
    #[arg(long, default_value_t = 0.2)]
    density: f64,
    /// Number of blobs (clustered).
    #[arg(long, default_value_t = 8)]
    clusters: usize,
    /// Corridor width in cells (maze).
    #[arg(long, default_value_t = 1)]
    corridor: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; `.json` selects JSON, anything else octile.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(clap::Args)]
struct SolveArgs {
    /// Map file (`.json` or octile `.map`).
    #[arg(long)]
    map: PathBuf,
    /// Start node as `x,y`.
    #[arg(long)]
    start: NodeArg,
    /// Target node as `x,y`.
    #[arg(long)]
    target: NodeArg,
    #[arg(long, default_value = "fa_astar")]
    algorithm: Algorithm,
    /// Focal scale factor.
    #[arg(long, default_value_t = 1.0)]
    w: f64,
    /// Grow `w` until the focal path matches the visibility-graph length.
    #[arg(long)]
    escalate: bool,
    #[arg(long, default_value = "hull")]
    vertex_mode: VertexMode,
    /// Forbid diagonal grid moves (and use the touch-blocks visibility rule).
    #[arg(long)]
    no_diagonal: bool,
    /// Override the visibility rule paired with the diagonal setting.
    #[arg(long)]
    vertex_touch_blocks: Option<bool>,
    /// Write the JSON result here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also render the search as SVG.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(clap::Args)]
struct BenchArgs {
    /// JSON spec file.
    spec: PathBuf,
    /// CSV output; metadata goes to the same path with `.meta.json`.
    #[arg(short, long)]
    output: PathBuf,
    /// Override the spec's worker thread count.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(clap::Args)]
struct ReportArgs {
    /// CSV written by `bench`.
    csv: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy)]
struct NodeArg(Node);

impl FromStr for NodeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (x, y) = s
            .split_once(',')
            .ok_or_else(|| format!("expected `x,y`, got `{s}`"))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<i32>()
                .map_err(|e| format!("bad coordinate `{v}`: {e}"))
        };
        Ok(NodeArg(Node::new(parse(x)?, parse(y)?)))
    }
}

enum Failure {
    Input(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Internal(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Internal(m) => m,
        }
    }
}

/// Errors raised while reading inputs count as invalid input.
fn input(e: impl ToString) -> Failure {
    Failure::Input(e.to_string())
}

fn internal(e: impl ToString) -> Failure {
    Failure::Internal(e.to_string())
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| internal(format!("{}: {e}", path.display())))
}

fn generate(args: GenerateArgs) -> Result<(), Failure> {
    let map = match args.kind {
        MapKind::Empty => Ok(GridMap::new(args.width, args.height)),
        MapKind::Random => generate_random(args.width, args.height, args.density, args.seed),
        MapKind::Clustered => generate_clustered(
            args.width,
            args.height,
            args.density,
            args.clusters,
            args.seed,
        ),
        MapKind::Maze => generate_maze(args.width, args.height, args.corridor, args.seed),
    }
    .map_err(input)?;
    let text = if args.output.extension().is_some_and(|e| e == "json") {
        map.to_json()
    } else {
        map.to_octile()
    };
    write_file(&args.output, &text)
}

fn solve(args: SolveArgs) -> Result<(), Failure> {
    let map = load_map_file(&args.map).map_err(input)?;
    let query = Query::new(args.start.0, args.target.0);
    if !query.is_valid_for(&map) {
        return Err(input(format!(
            "query {} -> {} lies outside the {}x{} map",
            query.start,
            query.target,
            map.width(),
            map.height()
        )));
    }
    let mut cfg = PlannerConfig::paired(!args.no_diagonal);
    if let Some(v) = args.vertex_touch_blocks {
        cfg.visibility = VisibilityConfig {
            vertex_touch_blocks: v,
        };
    }
    let visgraph = || {
        astar_visgraph(
            query,
            &map,
            &visgraph_nodes(&map, cfg.diagonal_move_allowed),
            cfg,
        )
    };
    let result: PathResult = match args.algorithm {
        Algorithm::AstarGrid => astar_grid(query, &map, cfg),
        Algorithm::ThetaStar => theta_star(query, &map, cfg),
        Algorithm::AstarVisgraph => visgraph(),
        Algorithm::FaAstar => {
            let pre = preprocess(&map, cfg.diagonal_move_allowed, args.vertex_mode);
            let ctx = CvContext::new(&map, &pre, cfg.visibility, args.w).map_err(input)?;
            if args.escalate {
                let reference = visgraph().map_err(internal)?;
                if !reference.found {
                    fa_astar(query, &ctx)
                } else {
                    fa_astar_escalating(query, &ctx, reference.length, EscalationPolicy::default())
                }
            } else {
                fa_astar(query, &ctx)
            }
        }
    }
    .map_err(input)?;
    let json = serde_json::to_string_pretty(&result).map_err(internal)?;
    match &args.output {
        Some(path) => write_file(path, &(json + "\n"))?,
        None => println!("{json}"),
    }
    if let Some(svg) = &args.svg {
        render_path(&map, &result, svg).map_err(|e| internal(format!("{}: {e}", svg.display())))?;
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&args.spec)
        .map_err(|e| input(format!("{}: {e}", args.spec.display())))?;
    let mut spec = BenchSpec::from_json(&text).map_err(input)?;
    if args.threads.is_some() {
        spec.threads = args.threads;
    }
    let report = run_suite(&spec).map_err(|e| match e {
        BenchError::Spec(_) | BenchError::Map { .. } | BenchError::Io { .. } => input(e),
        BenchError::Csv(_) => internal(e),
    })?;
    write_file(&args.output, &report.to_csv().map_err(internal)?)?;
    let mut meta = report.metadata.clone();
    meta.insert("rows".into(), report.rows.len().to_string());
    meta.insert("preprocess_runs".into(), report.preprocess_runs.to_string());
    let meta_path = args.output.with_extension("meta.json");
    write_file(
        &meta_path,
        &(serde_json::to_string_pretty(&meta).map_err(internal)? + "\n"),
    )?;
    eprintln!(
        "wrote {} rows to {}",
        report.rows.len(),
        args.output.display()
    );
    Ok(())
}

fn report(args: ReportArgs) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&args.csv)
        .map_err(|e| input(format!("{}: {e}", args.csv.display())))?;
    let rows = read_csv(&text).map_err(input)?;
    if rows.is_empty() {
        return Err(input("CSV has no rows"));
    }
    let summary = compare_report(&rows);
    if args.json {
        println!("{}", summary.to_json());
    } else {
        print!("{}", summary.to_text());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve(a),
        Command::Bench(a) => bench(a),
        Command::Report(a) => report(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
