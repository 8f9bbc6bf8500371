//! Gap experiments: seeded instance generation, LP0/LP1 bounds against the
//! integer optimum, CSV output and summary statistics.

use std::io::{Read, Write};
use std::time::{Duration, Instant};

use log::{info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capa::{capa_to_model, generate_capa, GainDistribution};
use crate::error::{Error, Result};
use crate::formulation::Model;
use crate::graph::{Graph, Instance, PartialColoring};
use crate::solve::{
    branch_and_bound, solve_relaxation, BranchOptions, CutMode, RelaxationLevel, RelaxationOptions,
};

/// Largest `n` run without `paper_scale`.
pub const DESK_SCALE_MAX_N: usize = 14;

/// Gaps this close to zero are reported as exactly zero.
const GAP_SNAP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Cr,
    Capa,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Cr => "cr",
            Problem::Capa => "capa",
        }
    }
}

impl std::str::FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cr" => Ok(Problem::Cr),
            "capa" => Ok(Problem::Capa),
            other => Err(Error::Config(format!("unknown problem '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub problem: Problem,
    pub n_values: Vec<usize>,
    pub alpha_values: Vec<usize>,
    pub instances_per_cell: usize,
    pub seed: u64,
    pub levels: Vec<RelaxationLevel>,
    pub mode: CutMode,
    pub time_limit: Option<Duration>,
    /// Gain distribution for generated assignment instances.
    pub capa_gains: GainDistribution,
    /// Allows `n` above [`DESK_SCALE_MAX_N`].
    pub paper_scale: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            problem: Problem::Cr,
            n_values: vec![10, 12, 14],
            alpha_values: vec![1, 2, 3],
            instances_per_cell: 20,
            seed: 1,
            levels: vec![RelaxationLevel::Lp0, RelaxationLevel::Lp1],
            mode: CutMode::Separated,
            time_limit: None,
            capa_gains: GainDistribution::Uniform01,
            paper_scale: false,
        }
    }
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() || self.alpha_values.is_empty() {
            return Err(Error::Config("n and alpha lists must be nonempty".into()));
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n < 3) {
            return Err(Error::Config(format!("n = {n} is below the minimum of 3")));
        }
        if self.alpha_values.contains(&0) {
            return Err(Error::Config("alpha must be at least 1".into()));
        }
        let max_n = self.n_values.iter().copied().max().unwrap_or(0);
        if max_n > DESK_SCALE_MAX_N {
            if !self.paper_scale {
                return Err(Error::Config(format!(
                    "n = {max_n} exceeds the desk-scale limit {DESK_SCALE_MAX_N}; enable paper scale to run it"
                )));
            }
            warn!("paper-scale run up to n = {max_n}; solve times grow exponentially with n");
        }
        Ok(())
    }
}

/// Number of colors for a cell: `alpha * ceil(n / 4)`.
pub fn colors_for(n: usize, alpha: usize) -> usize {
    alpha * n.div_ceil(4)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-instance seed, so cells are independent of each other and of run order.
pub fn instance_seed(base: u64, problem: Problem, n: usize, alpha: usize, index: usize) -> u64 {
    [problem as u64, n as u64, alpha as u64, index as u64]
        .into_iter()
        .fold(splitmix64(base), |h, x| splitmix64(h ^ x))
}

/// Path on `n` vertices, colors uniform in `1..=k` with `k = alpha * ceil(n/4)`,
/// unit weights.
pub fn generate_cr_instance(n: usize, alpha: usize, seed: u64) -> Result<Instance<f64>> {
    if n < 3 || alpha < 1 {
        return Err(Error::Config(format!("need n >= 3 and alpha >= 1 (got n = {n}, alpha = {alpha})")));
    }
    let k = colors_for(n, alpha);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<u32> = (0..n).map(|_| rng.random_range(1..=k as u32)).collect();
    Instance::unit_weights(Graph::path(n)?, PartialColoring::from_labels(k, &labels)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordStatus {
    Ok,
    Timeout,
    /// Optimum 0, so relative gaps are undefined.
    Degenerate,
}

/// One row of the results CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRecord {
    pub problem: Problem,
    pub n: usize,
    pub k: usize,
    pub alpha: usize,
    pub index: usize,
    pub seed: u64,
    pub opt: Option<f64>,
    pub lp0: Option<f64>,
    pub lp1: Option<f64>,
    pub lp1plus: Option<f64>,
    pub pct_g0: Option<f64>,
    pub pct_g1: Option<f64>,
    pub pct_gr: Option<f64>,
    pub lp1_integral: bool,
    pub g0_zero_flag: bool,
    pub status: RecordStatus,
    pub t_opt: Option<f64>,
    pub t_lp0: Option<f64>,
    pub t_lp1: Option<f64>,
}

/// Column names, in output order.
pub const CSV_HEADER: [&str; 19] = [
    "problem", "n", "k", "alpha", "index", "seed", "opt", "lp0", "lp1", "lp1plus", "pct_g0", "pct_g1",
    "pct_gr", "lp1_integral", "g0_zero_flag", "status", "t_opt", "t_lp0", "t_lp1",
];

fn snap(gap: f64) -> f64 {
    if gap.abs() <= GAP_SNAP {
        0.0
    } else {
        gap
    }
}

impl GapRecord {
    fn empty(problem: Problem, n: usize, alpha: usize, index: usize, seed: u64) -> Self {
        GapRecord {
            problem,
            n,
            k: colors_for(n, alpha),
            alpha,
            index,
            seed,
            opt: None,
            lp0: None,
            lp1: None,
            lp1plus: None,
            pct_g0: None,
            pct_g1: None,
            pct_gr: None,
            lp1_integral: false,
            g0_zero_flag: false,
            status: RecordStatus::Ok,
            t_opt: None,
            t_lp0: None,
            t_lp1: None,
        }
    }

    /// Fills the gap columns from `opt`, `lp0` and `lp1`.
    pub fn compute_gaps(&mut self) {
        let Some(opt) = self.opt else { return };
        if opt <= 0.0 {
            self.status = RecordStatus::Degenerate;
            return;
        }
        self.pct_g0 = self.lp0.map(|v| snap((v - opt) / opt));
        self.pct_g1 = self.lp1.map(|v| snap((v - opt) / opt));
        if let (Some(g0), Some(g1)) = (self.pct_g0, self.pct_g1) {
            if g0 > 0.0 {
                self.pct_gr = Some(snap((g0 - g1) / g0));
            } else {
                self.pct_gr = Some(0.0);
                self.g0_zero_flag = true;
            }
        }
    }

    /// `OPT <= LP1 + 1e-6 <= LP0 + 2e-6` on whichever values are present.
    pub fn ordering_holds(&self) -> bool {
        let (Some(opt), Some(lp0), Some(lp1)) = (self.opt, self.lp0, self.lp1) else {
            return true;
        };
        opt <= lp1 + 1e-6 && lp1 + 1e-6 <= lp0 + 2e-6
    }

    pub fn without_timing(&self) -> Self {
        GapRecord { t_opt: None, t_lp0: None, t_lp1: None, ..self.clone() }
    }

    fn csv_fields(&self) -> Vec<String> {
        let f = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        let status = match self.status {
            RecordStatus::Ok => "ok",
            RecordStatus::Timeout => "timeout",
            RecordStatus::Degenerate => "degenerate",
        };
        vec![
            self.problem.name().to_string(),
            self.n.to_string(),
            self.k.to_string(),
            self.alpha.to_string(),
            self.index.to_string(),
            self.seed.to_string(),
            f(self.opt),
            f(self.lp0),
            f(self.lp1),
            f(self.lp1plus),
            f(self.pct_g0),
            f(self.pct_g1),
            f(self.pct_gr),
            self.lp1_integral.to_string(),
            self.g0_zero_flag.to_string(),
            status.to_string(),
            f(self.t_opt),
            f(self.t_lp0),
            f(self.t_lp1),
        ]
    }
}

fn build_model(config: &ExperimentConfig, n: usize, alpha: usize, seed: u64) -> Result<Model<f64>> {
    match config.problem {
        Problem::Cr => Model::build(&generate_cr_instance(n, alpha, seed)?),
        Problem::Capa => capa_to_model(&generate_capa(n, colors_for(n, alpha), seed, config.capa_gains)?),
    }
}

/// Solves one generated instance; time limits become a `Timeout` record.
pub fn run_instance(config: &ExperimentConfig, n: usize, alpha: usize, index: usize) -> Result<GapRecord> {
    let seed = instance_seed(config.seed, config.problem, n, alpha, index);
    let mut record = GapRecord::empty(config.problem, n, alpha, index, seed);
    let model = build_model(config, n, alpha, seed)?;
    let deadline = config.time_limit.map(|d| Instant::now() + d);
    match fill(config, &model, deadline, &mut record) {
        Ok(()) => {}
        Err(Error::TimeLimit) => {
            warn!("{} n={n} alpha={alpha} #{index}: time limit reached", config.problem.name());
            record.status = RecordStatus::Timeout;
            return Ok(record);
        }
        Err(e) => return Err(e),
    }
    record.compute_gaps();
    if !record.ordering_holds() {
        warn!(
            "{} n={n} alpha={alpha} #{index}: bound ordering violated (opt {:?}, lp1 {:?}, lp0 {:?})",
            config.problem.name(),
            record.opt,
            record.lp1,
            record.lp0
        );
    }
    Ok(record)
}

fn fill(
    config: &ExperimentConfig,
    model: &Model<f64>,
    deadline: Option<Instant>,
    record: &mut GapRecord,
) -> Result<()> {
    let relax = RelaxationOptions { mode: config.mode, deadline, ..RelaxationOptions::default() };
    for &level in &config.levels {
        let start = Instant::now();
        let r = solve_relaxation(model, level, &relax)?;
        let t = start.elapsed().as_secs_f64();
        if r.round_limit_hit {
            warn!("{} bound stopped at the separation round limit", level.name());
        }
        match level {
            RelaxationLevel::Lp0 => {
                record.lp0 = Some(r.outcome.value);
                record.t_lp0 = Some(t);
            }
            RelaxationLevel::Lp1 => {
                record.lp1 = Some(r.outcome.value);
                record.lp1_integral = r.is_integral();
                record.t_lp1 = Some(t);
            }
            RelaxationLevel::Lp1Plus => record.lp1plus = Some(r.outcome.value),
        }
    }
    let remaining = deadline.map(|d| d.saturating_duration_since(Instant::now()));
    if remaining.is_some_and(|r| r.is_zero()) {
        return Err(Error::TimeLimit);
    }
    let options = BranchOptions { relaxation: relax, time_limit: remaining, ..BranchOptions::default() };
    let start = Instant::now();
    let report = branch_and_bound(model, &options)?;
    record.opt = Some(report.opt_value);
    record.t_opt = Some(start.elapsed().as_secs_f64());
    Ok(())
}

/// All instances of one `(n, alpha)` cell, in index order.
pub fn run_cell(config: &ExperimentConfig, n: usize, alpha: usize) -> Result<Vec<GapRecord>> {
    config.validate()?;
    let records = (0..config.instances_per_cell)
        .into_par_iter()
        .map(|i| run_instance(config, n, alpha, i))
        .collect::<Result<Vec<_>>>()?;
    info!("{} n={n} alpha={alpha}: {} instances", config.problem.name(), records.len());
    Ok(records)
}

/// Every cell of the configuration, ordered by `(n, alpha, index)`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<GapRecord>> {
    config.validate()?;
    let mut out = Vec::new();
    for &n in &config.n_values {
        for &alpha in &config.alpha_values {
            out.extend(run_cell(config, n, alpha)?);
        }
    }
    Ok(out)
}

pub fn write_csv<W: Write>(writer: W, records: &[GapRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.csv_fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(reader: R) -> Result<Vec<GapRecord>> {
    let mut r = csv::Reader::from_reader(reader);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::Config(format!("unexpected CSV header: {}", header.join(","))));
    }
    Ok(r.deserialize().collect::<std::result::Result<Vec<GapRecord>, _>>()?)
}

/// Aggregate statistics over records with status `ok`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub records: usize,
    pub solved: usize,
    pub timeouts: usize,
    pub degenerate: usize,
    /// Records whose LP0 gap was zero; their reduction is undefined.
    pub g0_zero: usize,
    /// Mean reduction over records where it is defined.
    pub mean_gr_defined: Option<f64>,
    /// Mean reduction counting undefined ones as 0.
    pub mean_gr_zero_imputed: Option<f64>,
    pub improved_fraction: f64,
    pub lp1_integral_fraction: f64,
    pub mean_t_opt: Option<f64>,
    pub mean_t_lp0: Option<f64>,
    pub mean_t_lp1: Option<f64>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

pub fn summarize(records: &[GapRecord]) -> Summary {
    let ok: Vec<&GapRecord> = records.iter().filter(|r| r.status == RecordStatus::Ok).collect();
    let solved = ok.len();
    let frac = |count: usize| if solved == 0 { 0.0 } else { count as f64 / solved as f64 };
    let with_gr: Vec<&&GapRecord> = ok.iter().filter(|r| r.pct_gr.is_some()).collect();
    Summary {
        records: records.len(),
        solved,
        timeouts: records.iter().filter(|r| r.status == RecordStatus::Timeout).count(),
        degenerate: records.iter().filter(|r| r.status == RecordStatus::Degenerate).count(),
        g0_zero: ok.iter().filter(|r| r.g0_zero_flag).count(),
        mean_gr_defined: mean(with_gr.iter().filter(|r| !r.g0_zero_flag).filter_map(|r| r.pct_gr)),
        mean_gr_zero_imputed: mean(with_gr.iter().filter_map(|r| r.pct_gr)),
        improved_fraction: frac(
            ok.iter()
                .filter(|r| matches!((r.pct_g0, r.pct_g1), (Some(g0), Some(g1)) if g1 < g0))
                .count(),
        ),
        lp1_integral_fraction: frac(ok.iter().filter(|r| r.lp1_integral).count()),
        mean_t_opt: mean(ok.iter().filter_map(|r| r.t_opt)),
        mean_t_lp0: mean(ok.iter().filter_map(|r| r.t_lp0)),
        mean_t_lp1: mean(ok.iter().filter_map(|r| r.t_lp1)),
    }
}

impl std::fmt::Display for Summary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let pct = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{:.2}%", 100.0 * x));
        let secs = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.4}s"));
        writeln!(
            f,
            "records {} (solved {}, timeouts {}, degenerate {})",
            self.records, self.solved, self.timeouts, self.degenerate
        )?;
        writeln!(f, "mean %GR (defined only)  {}", pct(self.mean_gr_defined))?;
        writeln!(f, "mean %GR (zero imputed)  {}  [{} with %G0 = 0]", pct(self.mean_gr_zero_imputed), self.g0_zero)?;
        writeln!(f, "improved                 {}", pct(Some(self.improved_fraction)))?;
        writeln!(f, "LP1 integral             {}", pct(Some(self.lp1_integral_fraction)))?;
        write!(
            f,
            "mean times: opt {}, lp0 {}, lp1 {}",
            secs(self.mean_t_opt),
            secs(self.mean_t_lp0),
            secs(self.mean_t_lp1)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(g0: f64, g1: f64) -> GapRecord {
        let mut r = GapRecord::empty(Problem::Cr, 4, 1, 0, 0);
        r.opt = Some(1.0);
        r.lp0 = Some(1.0 + g0);
        r.lp1 = Some(1.0 + g1);
        r.compute_gaps();
        r
    }

    #[test]
    fn color_counts() {
        assert_eq!(colors_for(20, 1), 5);
        assert_eq!(colors_for(20, 3), 15);
        assert_eq!(colors_for(25, 2), 14);
    }

    #[test]
    fn generator_is_reproducible() {
        let a = generate_cr_instance(12, 2, 99).unwrap();
        assert_eq!(a, generate_cr_instance(12, 2, 99).unwrap());
        assert_eq!(a.color_count(), 6);
        assert!(a.weights().iter().all(|&w| w == 1.0));
        assert!(generate_cr_instance(2, 1, 0).is_err());
        assert!(generate_cr_instance(5, 0, 0).is_err());
    }

    #[test]
    fn seeds_differ_across_cells() {
        let s = instance_seed(1, Problem::Cr, 10, 1, 0);
        assert_ne!(s, instance_seed(1, Problem::Cr, 10, 1, 1));
        assert_ne!(s, instance_seed(1, Problem::Cr, 10, 2, 0));
        assert_ne!(s, instance_seed(1, Problem::Capa, 10, 1, 0));
        assert_ne!(s, instance_seed(2, Problem::Cr, 10, 1, 0));
    }

    #[test]
    fn gap_arithmetic() {
        let r = record(0.10, 0.05);
        assert!((r.pct_gr.unwrap() - 0.5).abs() < 1e-12);
        assert!(!r.g0_zero_flag);
        let z = record(0.0, 0.0);
        assert_eq!(z.pct_gr, Some(0.0));
        assert!(z.g0_zero_flag);
        let s = summarize(&[z.clone(), z]);
        assert_eq!(s.mean_gr_zero_imputed, Some(0.0));
        assert_eq!(s.mean_gr_defined, None);
        assert_eq!(s.improved_fraction, 0.0);
        let s = summarize(&[record(0.10, 0.05)]);
        assert!((s.mean_gr_defined.unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(s.improved_fraction, 1.0);
    }

    #[test]
    fn tiny_cell() {
        // Path 1,2,1,2 with unit weights keeps at most 3.
        let inst = Instance::unit_weights(
            Graph::path(4).unwrap(),
            PartialColoring::from_labels(2, &[1, 2, 1, 2]).unwrap(),
        )
        .unwrap();
        let m = Model::build(&inst).unwrap();
        let mut r = GapRecord::empty(Problem::Cr, 4, 1, 0, 0);
        fill(&ExperimentConfig::default(), &m, None, &mut r).unwrap();
        r.compute_gaps();
        assert_eq!(r.opt, Some(3.0));
        assert!(r.pct_g1.unwrap() <= r.pct_g0.unwrap());
        assert!(r.ordering_holds());
    }

    #[test]
    fn csv_round_trip_and_determinism() {
        let config = ExperimentConfig {
            n_values: vec![6],
            alpha_values: vec![1, 2],
            instances_per_cell: 3,
            ..ExperimentConfig::default()
        };
        let a = run_experiment(&config).unwrap();
        let b = run_experiment(&config).unwrap();
        let strip = |v: &[GapRecord]| v.iter().map(GapRecord::without_timing).collect::<Vec<_>>();
        assert_eq!(strip(&a), strip(&b));
        let mut buf = Vec::new();
        write_csv(&mut buf, &a).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(&CSV_HEADER.join(",")));
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), a.len());
        assert_eq!(back[0].n, 6);
        assert_eq!(back[0].opt, a[0].opt);
    }

    #[test]
    fn desk_scale_gate() {
        let config = ExperimentConfig { n_values: vec![20], ..ExperimentConfig::default() };
        assert!(matches!(run_experiment(&config), Err(Error::Config(_))));
    }

    #[test]
    fn timeout_is_recorded() {
        let config = ExperimentConfig {
            n_values: vec![14],
            alpha_values: vec![3],
            instances_per_cell: 1,
            time_limit: Some(Duration::from_nanos(1)),
            ..ExperimentConfig::default()
        };
        let r = run_cell(&config, 14, 3).unwrap();
        assert_eq!(r[0].status, RecordStatus::Timeout);
        assert_eq!(summarize(&r).solved, 0);
    }
}
