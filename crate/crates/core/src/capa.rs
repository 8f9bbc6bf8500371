//! Connected assignment of symbols to array positions: every symbol occupies
//! one contiguous block of positions (or none), each position holds at most
//! one symbol, and placing symbol `i` at position `j` earns `gains[i][j]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulation::{Model, ModelOrigin};
use crate::graph::{Graph, Instance, PartialColoring, DEFAULT_ENUMERATION_CAP};
use crate::scalar::Scalar;
use crate::solve::{oracle_opt_with_gains, OracleGuard};

#[derive(Debug, Clone, PartialEq)]
pub struct CapaInstance<T> {
    positions: usize,
    /// `gains[i][j]`: symbol `i` (0-based) at position `j`.
    gains: Vec<Vec<T>>,
}

/// Distribution of generated gains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GainDistribution {
    /// Uniform on `[0, 1)`.
    Uniform01,
    /// Uniform integers in `lo..=hi`.
    IntegerRange(u32, u32),
}

impl<T: Scalar> CapaInstance<T> {
    pub fn new(gains: Vec<Vec<T>>) -> Result<Self> {
        let k = gains.len();
        if k == 0 {
            return Err(Error::InvalidInstance("at least one symbol is required".into()));
        }
        let n = gains[0].len();
        if n == 0 {
            return Err(Error::InvalidInstance("at least one position is required".into()));
        }
        for (i, row) in gains.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInstance(format!(
                    "gain row for symbol {} has {} entries, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
            if let Some(g) = row.iter().find(|g| g.is_negative()) {
                return Err(Error::InvalidInstance(format!(
                    "symbol {} has negative gain {g}",
                    i + 1
                )));
            }
            if !T::EXACT && row.iter().any(|g| !g.to_f64_lossy().is_finite()) {
                return Err(Error::InvalidInstance(format!("symbol {} has a non-finite gain", i + 1)));
            }
        }
        Ok(CapaInstance { positions: n, gains })
    }

    /// Gains that reproduce the recoloring objective of a colored path:
    /// `w(j)` for the position's own color, 0 elsewhere.
    pub fn from_colored_path(instance: &Instance<T>) -> Result<Self> {
        if !instance.graph().is_path() {
            return Err(Error::InvalidInstance("the instance graph is not a path".into()));
        }
        let n = instance.graph().vertex_count();
        let gains = (0..instance.color_count())
            .map(|c| {
                let color = crate::graph::Color::from_index(c);
                (0..n).map(|v| instance.vertex_gain(v, color)).collect()
            })
            .collect();
        Self::new(gains)
    }

    pub fn positions(&self) -> usize {
        self.positions
    }

    pub fn symbols(&self) -> usize {
        self.gains.len()
    }

    pub fn gains(&self) -> &[Vec<T>] {
        &self.gains
    }

    pub fn gain(&self, symbol: usize, position: usize) -> &T {
        &self.gains[symbol][position]
    }

    pub fn is_all_zero(&self) -> bool {
        self.gains.iter().flatten().all(|g| g.is_zero())
    }

    /// Sum over positions of the best gain there; no assignment beats it.
    pub fn upper_bound(&self) -> T {
        (0..self.positions)
            .map(|j| self.gains.iter().map(|r| r[j].clone()).fold(T::zero(), T::max_of))
            .fold(T::zero(), |a, b| a + b)
    }

    /// Best single block for a single symbol; every optimum is at least this.
    pub fn lower_bound(&self) -> T {
        let mut best = T::zero();
        for row in &self.gains {
            // Maximum subarray sum; gains are nonnegative but keep it general.
            let mut run = T::zero();
            for g in row {
                run = T::max_of(run + g.clone(), g.clone());
                best = T::max_of(best, run.clone());
            }
        }
        best
    }

    /// The uncolored path carried by the model.
    pub fn path_instance(&self) -> Result<Instance<T>> {
        let n = self.positions;
        Instance::new(
            Graph::path(n)?,
            PartialColoring::uncolored(self.symbols(), n),
            vec![T::zero(); n],
        )
    }

    pub fn map_gains<U: Scalar>(&self, f: impl Fn(&T) -> U) -> CapaInstance<U> {
        CapaInstance {
            positions: self.positions,
            gains: self.gains.iter().map(|r| r.iter().map(&f).collect()).collect(),
        }
    }
}

/// The connected-set formulation over the positions path, with objective
/// coefficient `sum_{j in H} gains[c][j]` on `(H, c)`.
pub fn capa_to_model<T: Scalar>(capa: &CapaInstance<T>) -> Result<Model<T>> {
    Model::from_vertex_gains(capa.path_instance()?, ModelOrigin::Capa, DEFAULT_ENUMERATION_CAP, |v, c| {
        capa.gain(c.index(), v).clone()
    })
}

/// Optimal total gain, computed without the integer program.
pub fn capa_oracle_opt<T: Scalar>(capa: &CapaInstance<T>) -> Result<T> {
    let graph = Graph::path(capa.positions())?;
    oracle_opt_with_gains(&graph, capa.symbols(), |v, c| capa.gain(c.index(), v).clone(), &OracleGuard::default())
}

/// Seeded gain matrix with `k` symbols over `n` positions.
pub fn generate_capa(n: usize, k: usize, seed: u64, dist: GainDistribution) -> Result<CapaInstance<f64>> {
    if let GainDistribution::IntegerRange(lo, hi) = dist {
        if lo > hi {
            return Err(Error::Config(format!("empty gain range {lo}..={hi}")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gains = (0..k)
        .map(|_| {
            (0..n)
                .map(|_| match dist {
                    GainDistribution::Uniform01 => rng.random::<f64>(),
                    GainDistribution::IntegerRange(lo, hi) => f64::from(rng.random_range(lo..=hi)),
                })
                .collect()
        })
        .collect();
    CapaInstance::new(gains)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solve::{branch_and_bound, BranchOptions};

    fn capa(rows: &[&[f64]]) -> CapaInstance<f64> {
        CapaInstance::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn validation() {
        assert!(CapaInstance::<f64>::new(vec![]).is_err());
        assert!(CapaInstance::<f64>::new(vec![vec![]]).is_err());
        assert!(CapaInstance::new(vec![vec![1.0, 2.0], vec![1.0]]).is_err());
        assert!(CapaInstance::new(vec![vec![-1.0]]).is_err());
        assert!(CapaInstance::new(vec![vec![f64::INFINITY]]).is_err());
    }

    #[test]
    fn tiny_optima() {
        let one = capa(&[&[7.0]]);
        assert_eq!(capa_oracle_opt(&one).unwrap(), 7.0);
        let m = capa_to_model(&one).unwrap();
        assert_eq!(branch_and_bound(&m, &BranchOptions::default()).unwrap().opt_value, 7.0);

        let zero = capa(&[&[0.0, 0.0], &[0.0, 0.0]]);
        assert!(zero.is_all_zero());
        assert_eq!(capa_oracle_opt(&zero).unwrap(), 0.0);

        // Symbol 1 cannot hold positions 1 and 3 without also holding 2.
        let three = capa(&[&[3.0, 0.0, 3.0], &[0.0, 5.0, 0.0]]);
        assert_eq!(capa_oracle_opt(&three).unwrap(), 8.0);
        let m = capa_to_model(&three).unwrap();
        assert_eq!(branch_and_bound(&m, &BranchOptions::default()).unwrap().opt_value, 8.0);
    }

    #[test]
    fn model_objective_sums_gains() {
        let c = capa(&[&[1.0, 2.0, 4.0], &[8.0, 16.0, 32.0]]);
        let m = capa_to_model(&c).unwrap();
        assert_eq!(m.origin(), ModelOrigin::Capa);
        assert_eq!(m.set_count(), 6);
        let whole = m.whole_set_index();
        assert_eq!(m.objective_coefficient(m.flat(whole, crate::graph::Color::new(1))), 7.0);
        assert_eq!(m.objective_coefficient(m.flat(whole, crate::graph::Color::new(2))), 56.0);
        assert_eq!(m.rows().len(), 3 + 2);
    }

    #[test]
    fn bounds_bracket_the_optimum() {
        for seed in 0..10 {
            let c = generate_capa(6, 3, seed, GainDistribution::IntegerRange(0, 9)).unwrap();
            let opt = capa_oracle_opt(&c).unwrap();
            assert!(c.lower_bound() <= opt && opt <= c.upper_bound());
        }
    }

    #[test]
    fn generator_contract() {
        let a = generate_capa(40, 30, 5, GainDistribution::Uniform01).unwrap();
        let b = generate_capa(40, 30, 5, GainDistribution::Uniform01).unwrap();
        assert_eq!(a, b);
        assert!(a.gains().iter().flatten().all(|g| (0.0..1.0).contains(g)));
        assert_ne!(a, generate_capa(40, 30, 6, GainDistribution::Uniform01).unwrap());
        assert!(generate_capa(5, 2, 1, GainDistribution::IntegerRange(0, 0)).unwrap().is_all_zero());
        assert!(generate_capa(5, 2, 1, GainDistribution::IntegerRange(3, 2)).is_err());
    }

    #[test]
    fn colored_path_reproduces_recoloring_objective() {
        let g = Graph::path(5).unwrap();
        let col = PartialColoring::from_labels(3, &[1, 2, 1, 3, 0]).unwrap();
        let inst = Instance::new(g, col, vec![2.0, 1.0, 3.0, 1.5, 0.0]).unwrap();
        let cr = Model::build(&inst).unwrap();
        let cp = capa_to_model(&CapaInstance::from_colored_path(&inst).unwrap()).unwrap();
        assert_eq!(cr.objective(), cp.objective());
        assert_eq!(cr.rows(), cp.rows());
    }
}
