use crate::error::{Error, Result};
use std::io::Write;

/// Entries at or below this magnitude are dropped on construction.
const DROP_TOL: f64 = 1e-300;

/// Symmetric matrix in compressed-row form with both triangles stored.
/// Column indices are sorted within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymMatrix {
    /// Builds the matrix from `(row, col, value)` triplets; duplicates are
    /// summed in input order. Symmetry is not enforced here, see
    /// [`SparseSymMatrix::asymmetry`].
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(Error::DimensionMismatch { expected: n, got: i.max(j) + 1 });
            }
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite matrix entry at ({i}, {j})")));
            }
            sorted.push((i, j, v));
        }
        // stable sort keeps the accumulation order deterministic
        sorted.sort_by_key(|&(i, j, _)| (i, j));

        let mut row_ptr = vec![0; n + 1];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        let mut it = sorted.into_iter().peekable();
        while let Some((i, j, mut v)) = it.next() {
            while let Some(&(i2, j2, v2)) = it.peek() {
                if (i2, j2) != (i, j) {
                    break;
                }
                v += v2;
                it.next();
            }
            if v.abs() > DROP_TOL {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self { n, row_ptr, col_idx, values })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn from_dense(a: &[Vec<f64>]) -> Result<Self> {
        let n = a.len();
        let mut t = Vec::new();
        for (i, row) in a.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
            t.extend(row.iter().enumerate().map(|(j, &v)| (i, j, v)));
        }
        Self::from_triplets(n, &t)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(p) => self.values[r.start + p],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |A_ij - A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Principal submatrix on `keep` (in the given order).
    pub fn submatrix(&self, keep: &[usize]) -> Self {
        let mut map = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut row_ptr = Vec::with_capacity(keep.len() + 1);
        row_ptr.push(0);
        let (mut col_idx, mut values) = (Vec::new(), Vec::new());
        for &old in keep {
            let mut row: Vec<(usize, f64)> =
                self.row(old).filter(|&(j, _)| map[j] != usize::MAX).map(|(j, v)| (map[j], v)).collect();
            row.sort_by_key(|&(j, _)| j);
            for (j, v) in row {
                col_idx.push(j);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Self { n: keep.len(), row_ptr, col_idx, values }
    }

    /// Lower-triangle entries `(row, col, value)` with `row >= col`.
    pub fn lower_triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).filter(move |&(j, _)| j <= i).map(move |(j, v)| (i, j, v)))
    }

    /// Coordinate text dump: one `i j value` line per stored entry.
    pub fn write_coo<W: Write>(&self, mut w: W) -> Result<()> {
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                writeln!(w, "{i} {j} {v:?}")?;
            }
        }
        Ok(())
    }
}

pub fn matvec(a: &SparseSymMatrix, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != a.n {
        return Err(Error::DimensionMismatch { expected: a.n, got: x.len() });
    }
    Ok((0..a.n).map(|i| a.row(i).map(|(j, v)| v * x[j]).sum()).collect())
}

pub fn dot(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    Ok(x.iter().zip(y).map(|(a, b)| a * b).sum())
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: y.len(), got: x.len() });
    }
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
    Ok(())
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.random::<f64>() - 0.5).collect()).collect();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| b[i][k] * b[j][k]).sum::<f64>() + if i == j { n as f64 } else { 0.0 })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn duplicates_summed_and_zeros_dropped() {
        let a = SparseSymMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 0, 2.0), (1, 0, 0.0), (1, 1, 5.0)]).unwrap();
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.get(0, 0), 3.0);
        assert_eq!(a.get(1, 0), 0.0);
        assert!(SparseSymMatrix::from_triplets(2, &[(2, 0, 1.0)]).is_err());
        assert!(SparseSymMatrix::from_triplets(2, &[(0, 0, f64::NAN)]).is_err());
    }

    #[test]
    fn identity_and_zero_products() {
        let i = SparseSymMatrix::identity(4);
        let x = vec![1.0, -2.0, 3.5, 0.25];
        assert_eq!(matvec(&i, &x).unwrap(), x);
        let a = SparseSymMatrix::from_dense(&random_spd(5, 1)).unwrap();
        assert!(matvec(&a, &[0.0; 5]).unwrap().iter().all(|&v| v == 0.0));
        assert!(matvec(&a, &[0.0; 4]).is_err());
    }

    #[test]
    fn matvec_matches_dense() {
        let d = random_spd(20, 3);
        let a = SparseSymMatrix::from_dense(&d).unwrap();
        assert!(a.asymmetry() <= 1e-15);
        let x: Vec<f64> = (0..20).map(|i| (i as f64 * 0.37).sin()).collect();
        let y = matvec(&a, &x).unwrap();
        for i in 0..20 {
            let r: f64 = (0..20).map(|j| d[i][j] * x[j]).sum();
            assert!((y[i] - r).abs() <= 1e-13);
        }
    }

    #[test]
    fn vector_helpers() {
        let mut y = vec![1.0, 2.0];
        axpy(2.0, &[3.0, 4.0], &mut y).unwrap();
        assert_eq!(y, vec![7.0, 10.0]);
        assert_eq!(dot(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 11.0);
        assert_eq!(norm2(&[3.0, 4.0]), 5.0);
        assert!(dot(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn submatrix_and_dump() {
        let a = SparseSymMatrix::from_dense(&[vec![4.0, 1.0, 0.0], vec![1.0, 3.0, 2.0], vec![0.0, 2.0, 5.0]]).unwrap();
        let s = a.submatrix(&[2, 0]);
        assert_eq!(s.get(0, 0), 5.0);
        assert_eq!(s.get(1, 1), 4.0);
        assert_eq!(s.get(0, 1), 0.0);
        let mut buf = Vec::new();
        a.write_coo(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 7);
        assert!(text.starts_with("0 0 4.0\n"));
    }
}
