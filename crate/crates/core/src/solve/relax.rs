use std::time::Instant;

use log::debug;

use crate::cuts::{
    build_class5, separate_class5, separate_class6, Cut, CutPool, Provenance, SeparationOptions,
};
use crate::error::{Error, Result};
use crate::formulation::Model;
use crate::lp::{solve_lp_from, Basis, LinearProgram, LpOutcome, LpStatus, SolveLimits};
use crate::scalar::Scalar;

/// Default cap on separation rounds.
pub const DEFAULT_MAX_ROUNDS: usize = 50;

/// Which inequalities make up the relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelaxationLevel {
    /// Vertex rows plus the binary-family cuts for `H = V(G)` (a lifting of
    /// the color rows).
    Lp0,
    /// Binary-family cuts for every connected set and color.
    Lp1,
    /// `Lp1` plus separated general-family cuts. Not part of the original
    /// gap protocol.
    Lp1Plus,
}

impl RelaxationLevel {
    pub fn name(self) -> &'static str {
        match self {
            RelaxationLevel::Lp0 => "lp0",
            RelaxationLevel::Lp1 => "lp1",
            RelaxationLevel::Lp1Plus => "lp1plus",
        }
    }
}

impl std::str::FromStr for RelaxationLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lp0" => Ok(RelaxationLevel::Lp0),
            "lp1" => Ok(RelaxationLevel::Lp1),
            "lp1plus" | "lp1+" => Ok(RelaxationLevel::Lp1Plus),
            other => Err(Error::Config(format!("unknown relaxation level '{other}'"))),
        }
    }
}

/// How cut families enter the LP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutMode {
    /// All binary-family rows of the level are added before the first solve.
    Upfront,
    /// Start from the `Lp0` rows and add violated cuts round by round.
    #[default]
    Separated,
}

impl std::str::FromStr for CutMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "upfront" => Ok(CutMode::Upfront),
            "separated" => Ok(CutMode::Separated),
            other => Err(Error::Config(format!("unknown cut mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RelaxationOptions<T> {
    pub mode: CutMode,
    pub separation: SeparationOptions<T>,
    pub max_rounds: usize,
    pub deadline: Option<Instant>,
}

impl<T: Scalar> Default for RelaxationOptions<T> {
    fn default() -> Self {
        RelaxationOptions {
            mode: CutMode::Separated,
            separation: SeparationOptions::default(),
            max_rounds: DEFAULT_MAX_ROUNDS,
            deadline: None,
        }
    }
}

impl<T: Scalar> RelaxationOptions<T> {
    pub fn with_mode(mode: CutMode) -> Self {
        RelaxationOptions { mode, ..Self::default() }
    }
}

#[derive(Debug, Clone)]
pub struct Relaxation<T> {
    pub outcome: LpOutcome<T>,
    /// Final row set of the LP.
    pub rows: Vec<Cut>,
    pub rounds: usize,
    /// Separation stopped at the round cap while cuts were still violated;
    /// the value is then only an upper bound on the level's optimum.
    pub round_limit_hit: bool,
}

impl<T: Scalar> Relaxation<T> {
    pub fn value(&self) -> &T {
        &self.outcome.value
    }

    pub fn is_integral(&self) -> bool {
        self.outcome.primal.iter().all(Scalar::is_binary)
    }

    /// Rows coming from either cut family, excluding the vertex rows.
    pub fn cut_count(&self) -> usize {
        self.rows
            .iter()
            .filter(|c| matches!(c.provenance(), Provenance::Class5 { .. } | Provenance::Class6 { .. }))
            .count()
    }
}

/// LP over the model's variables with the objective and the given rows.
pub fn lp_from_rows<T: Scalar>(model: &Model<T>, rows: &[Cut]) -> LinearProgram<T> {
    let mut lp = LinearProgram::new(model.var_count()).with_objective(model.objective().to_vec());
    for row in rows {
        if row.coefficients().is_empty() {
            continue;
        }
        lp.add_row(
            row.coefficients().iter().map(|&(j, a)| (j, T::of_u32(a))).collect(),
            T::of_u32(row.rhs()),
        );
    }
    lp
}

/// Relaxation of the plain formulation (vertex and color rows).
pub fn base_relaxation<T: Scalar>(model: &Model<T>) -> LinearProgram<T> {
    lp_from_rows(model, model.rows())
}

/// Rows of `Lp0`: the vertex rows and the lifted color rows.
pub fn lp0_rows<T: Scalar>(model: &Model<T>) -> Vec<Cut> {
    let n = model.graph().vertex_count();
    let whole = model.whole_set_index();
    let mut pool = CutPool::new();
    for v in 0..n {
        pool.insert(model.vertex_row(v).clone());
    }
    for c in model.colors() {
        pool.insert(build_class5(model, whole, c));
    }
    pool.into_cuts()
}

/// Every binary-family cut, duplicates removed.
pub fn lp1_rows<T: Scalar>(model: &Model<T>) -> Vec<Cut> {
    let mut pool = CutPool::new();
    for cut in lp0_rows(model) {
        pool.insert(cut);
    }
    for set in 0..model.set_count() {
        for c in model.colors() {
            pool.insert(build_class5(model, set, c));
        }
    }
    pool.into_cuts()
}

fn check(outcome: &LpOutcome<impl Scalar>) -> Result<()> {
    match outcome.status {
        LpStatus::Optimal => Ok(()),
        LpStatus::TimeLimit => Err(Error::TimeLimit),
        other => Err(Error::Lp(format!("{other:?} after {} pivots", outcome.iterations))),
    }
}

/// Optimum of the relaxation at `level`.
pub fn solve_relaxation<T: Scalar>(
    model: &Model<T>,
    level: RelaxationLevel,
    options: &RelaxationOptions<T>,
) -> Result<Relaxation<T>> {
    let mut pool = CutPool::new();
    let initial = match (level, options.mode) {
        (RelaxationLevel::Lp0, _) | (_, CutMode::Separated) => lp0_rows(model),
        (_, CutMode::Upfront) => lp1_rows(model),
    };
    for cut in initial {
        pool.insert(cut);
    }
    let separate5 = level != RelaxationLevel::Lp0 && options.mode == CutMode::Separated;
    let separate6 = level == RelaxationLevel::Lp1Plus;
    let limits = SolveLimits { max_iterations: None, deadline: options.deadline };

    let mut lp = lp_from_rows(model, pool.cuts());
    let mut basis: Option<Basis> = None;
    let mut rounds = 0;
    loop {
        let outcome = solve_lp_from(&lp, basis.as_ref(), limits);
        check(&outcome)?;
        debug!(
            "{} round {rounds}: {} rows, value {}, {} pivots",
            level.name(),
            pool.len(),
            outcome.value,
            outcome.iterations
        );
        let mut added = 0;
        if separate5 || separate6 {
            let mut found = Vec::new();
            if separate5 {
                found.extend(separate_class5(model, &outcome.primal, &options.separation));
            }
            if separate6 {
                found.extend(separate_class6(model, &outcome.primal, &options.separation));
            }
            for v in found {
                if pool.insert(v.cut.clone()) {
                    let cut = v.cut;
                    lp.add_row(
                        cut.coefficients().iter().map(|&(j, a)| (j, T::of_u32(a))).collect(),
                        T::of_u32(cut.rhs()),
                    );
                    added += 1;
                }
            }
        }
        if added == 0 {
            return Ok(Relaxation { outcome, rows: pool.into_cuts(), rounds, round_limit_hit: false });
        }
        rounds += 1;
        if rounds >= options.max_rounds {
            // Report the last solved bound; the freshly added rows are not in it.
            let rows = pool.into_cuts();
            let solved = rows.len() - added;
            let mut rows = rows;
            rows.truncate(solved);
            return Ok(Relaxation { outcome, rows, rounds, round_limit_hit: true });
        }
        basis = outcome.basis;
    }
}
