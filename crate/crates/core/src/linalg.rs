use crate::scalar::Scalar;

/// Incrementally built row echelon form, used to measure the rank of a set
/// of vectors. Exact scalar types give an exact rank.
#[derive(Debug, Clone)]
pub(crate) struct Echelon<T> {
    dim: usize,
    /// Reduced rows, each with a unit entry at its pivot column.
    rows: Vec<(usize, Vec<T>)>,
}

impl<T: Scalar> Echelon<T> {
    pub fn new(dim: usize) -> Self {
        Echelon { dim, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.dim
    }

    /// Adds `v` to the span; returns true when the rank grew.
    pub fn insert(&mut self, mut v: Vec<T>) -> bool {
        debug_assert_eq!(v.len(), self.dim);
        let tol = T::pivot_tol();
        for (pivot, row) in &self.rows {
            let f = v[*pivot].clone();
            if f.is_zero() {
                continue;
            }
            for (a, b) in v.iter_mut().zip(row) {
                if !b.is_zero() {
                    *a = a.clone() - f.clone() * b.clone();
                }
            }
        }
        let Some(pivot) = v.iter().position(|a| a.abs() > tol) else {
            return false;
        };
        let p = v[pivot].clone();
        for a in v.iter_mut() {
            *a = a.clone() / p.clone();
        }
        // Keep the stored rows fully reduced against the new pivot.
        for (_, row) in self.rows.iter_mut() {
            let f = row[pivot].clone();
            if f.is_zero() {
                continue;
            }
            for (a, b) in row.iter_mut().zip(&v) {
                if !b.is_zero() {
                    *a = a.clone() - f.clone() * b.clone();
                }
            }
        }
        self.rows.push((pivot, v));
        true
    }
}
