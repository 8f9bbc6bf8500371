use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use crsolve_core::capa::{capa_oracle_opt, capa_to_model, GainDistribution};
use crsolve_core::cuts::{build_class5, build_class6, Cut};
use crsolve_core::experiments::{read_csv, run_experiment, summarize, write_csv, ExperimentConfig, Problem};
use crsolve_core::io::{load_instance, Loaded};
use crsolve_core::solve::{
    branch_and_bound, enumerate_integral_points, face_dimension, oracle_opt, polytope_dimension,
    solve_relaxation, BranchOptions, CutMode, PointGuard, RelaxationLevel, RelaxationOptions,
};
use crsolve_core::{Color, Model, ModelOrigin, Provenance};

#[derive(Parser)]
#[command(name = "crsolve", version, about = "Convex recoloring via a connected-set integer program")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance to optimality and report the root bound.
    Solve {
        file: PathBuf,
        /// Cuts added at the root.
        #[arg(long, default_value = "lp1")]
        level: RelaxationLevel,
        #[arg(long, default_value = "separated")]
        mode: CutMode,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Seconds.
        #[arg(long)]
        time_limit: Option<f64>,
    },
    /// Run the gap experiment and write one CSV row per instance.
    Experiment {
        #[arg(long, default_value = "cr")]
        problem: Problem,
        #[arg(long, value_delimiter = ',', default_value = "10,12,14")]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        alpha: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        per_cell: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "lp0,lp1")]
        levels: Vec<RelaxationLevel>,
        #[arg(long, default_value = "separated")]
        mode: CutMode,
        /// Seconds per instance.
        #[arg(long)]
        time_limit: Option<f64>,
        /// Gains for generated assignment instances: `uniform01` or `int:LO:HI`.
        #[arg(long, default_value = "uniform01")]
        gains: String,
        /// Allow n above the desk-scale limit.
        #[arg(long)]
        paper_scale: bool,
    },
    /// Check solver against the reference optimum and cuts against all integral points.
    Verify {
        file: PathBuf,
        /// Also compute face dimensions of every cut.
        #[arg(long)]
        facets: bool,
    },
    /// Aggregate statistics of a results CSV.
    Summarize { file: PathBuf },
    /// Print the formulation (with the cuts of a relaxation level) in LP format.
    Dump {
        file: PathBuf,
        #[arg(long, default_value = "lp0")]
        level: RelaxationLevel,
    },
}

fn seconds(v: Option<f64>) -> Result<Option<Duration>> {
    v.map(|s| Duration::try_from_secs_f64(s).context("time limit must be a nonnegative number of seconds"))
        .transpose()
}

fn parse_gains(s: &str) -> Result<GainDistribution> {
    if s == "uniform01" {
        return Ok(GainDistribution::Uniform01);
    }
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["int", lo, hi] => Ok(GainDistribution::IntegerRange(lo.parse()?, hi.parse()?)),
        _ => bail!("gain distribution must be 'uniform01' or 'int:LO:HI', got '{s}'"),
    }
}

fn model_of(loaded: &Loaded) -> Result<Model<f64>> {
    Ok(match loaded {
        Loaded::Recoloring(i) => Model::build(i)?,
        Loaded::Capa(c) => capa_to_model(c)?,
    })
}

fn solve(file: PathBuf, level: RelaxationLevel, mode: CutMode, format: Format, time_limit: Option<f64>) -> Result<()> {
    let loaded = load_instance(&file).with_context(|| format!("reading {}", file.display()))?;
    let model = model_of(&loaded)?;
    let options = BranchOptions {
        root_level: level,
        relaxation: RelaxationOptions::with_mode(mode),
        time_limit: seconds(time_limit)?,
        ..BranchOptions::default()
    };
    let report = branch_and_bound(&model, &options)?;
    let summary = report.summary();
    match format {
        Format::Csv => {
            println!("{}", crsolve_core::solve::SolveSummary::CSV_HEADER);
            println!("{}", summary.csv_row());
        }
        Format::Json => println!("{}", serde_json::to_string_pretty(&summary)?),
        Format::Text => {
            println!("optimum          {:.6}", report.opt_value);
            println!("root {:<11} {:.6}", level.name(), report.root_lp_value);
            println!("nodes            {}", report.nodes_explored);
            println!("cuts at root     {}", report.cuts_added);
            println!("time             {:.3}s", report.wall_time.as_secs_f64());
            let coloring = model.decode(&report.incumbent)?;
            if let Loaded::Recoloring(instance) = &loaded {
                println!("recolored weight {:.6}", instance.recolored_weight(&coloring));
            }
            let labels: Vec<String> = coloring.labels().iter().map(u32::to_string).collect();
            println!("coloring         {}", labels.join(" "));
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn experiment(
    problem: Problem,
    n: Vec<usize>,
    alpha: Vec<usize>,
    per_cell: usize,
    seed: u64,
    out: PathBuf,
    levels: Vec<RelaxationLevel>,
    mode: CutMode,
    time_limit: Option<f64>,
    gains: &str,
    paper_scale: bool,
) -> Result<()> {
    let config = ExperimentConfig {
        problem,
        n_values: n,
        alpha_values: alpha,
        instances_per_cell: per_cell,
        seed,
        levels,
        mode,
        time_limit: seconds(time_limit)?,
        capa_gains: parse_gains(gains)?,
        paper_scale,
    };
    let records = run_experiment(&config)?;
    let file = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
    write_csv(BufWriter::new(file), &records)?;
    info!("wrote {} records to {}", records.len(), out.display());
    println!("{}", summarize(&records));
    Ok(())
}

/// Every cut of both families that is known to be valid for the model.
fn all_cuts(model: &Model<f64>) -> Result<Vec<Cut>> {
    let k = model.color_count();
    let mut cuts = Vec::new();
    for set in 0..model.set_count() {
        for c in model.colors() {
            cuts.push(build_class5(model, set, c));
        }
        let size = model.set(set).len();
        for mask in 1u64..(1 << k) {
            let colors: Vec<Color> = (0..k).filter(|c| mask >> c & 1 == 1).map(Color::from_index).collect();
            if colors.len() >= 2 && colors.len() <= size {
                cuts.push(build_class6(model, set, &colors)?);
            }
        }
    }
    Ok(cuts)
}

fn verify(file: PathBuf, facets: bool) -> Result<bool> {
    let loaded = load_instance(&file).with_context(|| format!("reading {}", file.display()))?;
    let model = model_of(&loaded)?;
    let mut ok = true;
    let mut line = |pass: bool, what: String| {
        ok &= pass;
        println!("{} {what}", if pass { "PASS" } else { "FAIL" });
    };

    let solved = branch_and_bound(&model, &BranchOptions::default())?.opt_value;
    let reference = match &loaded {
        Loaded::Recoloring(i) => oracle_opt(i),
        Loaded::Capa(c) => capa_oracle_opt(c),
    };
    match reference {
        Ok(r) => line((solved - r).abs() <= 1e-9, format!("optimum: solver {solved:.6}, reference {r:.6}")),
        Err(e) => println!("SKIP optimum: {e}"),
    }

    if model.color_count() > 16 {
        println!("SKIP cuts: too many colors to list every color subset");
        return Ok(ok);
    }
    let guard = PointGuard::default();
    let points: Vec<Vec<usize>> = match enumerate_integral_points(&model, &guard) {
        Ok(p) => p.collect(),
        Err(e) => {
            println!("SKIP cuts: {e}");
            return Ok(ok);
        }
    };
    let cuts = all_cuts(&model)?;
    let violated: Vec<&Cut> = cuts
        .iter()
        .filter(|c| points.iter().any(|p| c.lhs_on_support(p) > u64::from(c.rhs())))
        .collect();
    line(
        violated.is_empty(),
        format!("validity: {} cuts against {} integral points", cuts.len(), points.len()),
    );
    for c in violated.iter().take(10) {
        println!("  violated: {}", c.provenance().describe(&model));
    }

    if facets {
        let dim = polytope_dimension(&model, &guard)?;
        line(dim == model.var_count() as i64, format!("polytope dimension {dim} of {}", model.var_count()));
        let mut facet_count = 0;
        for cut in &cuts {
            let d = face_dimension(&model, cut, &guard)?;
            if d == dim - 1 {
                facet_count += 1;
            }
            println!("  {:<40} face dimension {d}", cut.provenance().describe(&model));
        }
        println!("{facet_count} of {} cuts define facets", cuts.len());
    }
    Ok(ok)
}

fn summarize_file(file: PathBuf) -> Result<()> {
    let records = read_csv(File::open(&file).with_context(|| format!("opening {}", file.display()))?)?;
    if records.is_empty() {
        bail!("{} has no records", file.display());
    }
    let summary = summarize(&records);
    println!("{summary}");
    Ok(())
}

fn dump(file: PathBuf, level: RelaxationLevel) -> Result<()> {
    let loaded = load_instance(&file).with_context(|| format!("reading {}", file.display()))?;
    let model = model_of(&loaded)?;
    let relaxation = solve_relaxation(&model, level, &RelaxationOptions::with_mode(CutMode::Upfront))?;
    let mut out = io::stdout().lock();
    if model.origin() == ModelOrigin::Capa {
        writeln!(out, "\\ assignment instance on {} positions", model.graph().vertex_count())?;
    }
    // Vertex rows are already part of the model text.
    let extra: Vec<Cut> = relaxation
        .rows
        .into_iter()
        .filter(|c| !matches!(c.provenance(), Provenance::Vertex { .. }))
        .collect();
    write!(out, "{}", model.to_lp_text(&extra))?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { file, level, mode, format, time_limit } => solve(file, level, mode, format, time_limit),
        Command::Experiment { problem, n, alpha, per_cell, seed, out, levels, mode, time_limit, gains, paper_scale } => {
            experiment(problem, n, alpha, per_cell, seed, out, levels, mode, time_limit, &gains, paper_scale)
        }
        Command::Verify { file, facets } => match verify(file, facets) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::FAILURE,
            Err(e) => Err(e),
        },
        Command::Summarize { file } => summarize_file(file),
        Command::Dump { file, level } => dump(file, level),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
