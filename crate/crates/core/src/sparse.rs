//! Symmetric sparse matrices stored as the upper triangle in compressed rows.

use std::io::{self, Write};

use nalgebra::DMatrix;

/// Symmetric matrix; only entries with `row <= col` are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SymCsr {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SymCsr {
    /// Compresses upper-triangle triplets. Duplicates are summed in input
    /// order, so the result is bitwise reproducible for a fixed input order.
    pub fn from_upper_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        debug_assert!(triplets.iter().all(|&(r, c, _)| r <= c && c < n));
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz_upper(&self) -> usize {
        self.vals.len()
    }

    /// Stored `(row, col, value)` entries with `row <= col`.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let (r, c) = if row <= col { (row, col) } else { (col, row) };
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        y.fill(0.0);
        for r in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[k];
                let v = self.vals[k];
                acc += v * x[c];
                if c != r {
                    y[c] += v * x[r];
                }
            }
            y[r] += acc;
        }
    }

    /// `x^T M y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.matvec(y))
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.bilinear(x, x)
    }

    /// Largest absolute row sum of the full symmetric matrix.
    pub fn inf_norm(&self) -> f64 {
        let mut sums = vec![0.0; self.n];
        for (r, c, v) in self.upper_entries() {
            sums[r] += v.abs();
            if r != c {
                sums[c] += v.abs();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// `self + alpha * other`.
    pub fn add_scaled(&self, other: &SymCsr, alpha: f64) -> SymCsr {
        assert_eq!(self.n, other.n);
        let mut triplets: Vec<(usize, usize, f64)> = self.upper_entries().collect();
        triplets.extend(other.upper_entries().map(|(r, c, v)| (r, c, alpha * v)));
        SymCsr::from_upper_triplets(self.n, triplets)
    }

    /// Principal submatrix on `indices` (in the given order).
    pub fn submatrix(&self, indices: &[usize]) -> SymCsr {
        let mut map = vec![usize::MAX; self.n];
        for (new, &old) in indices.iter().enumerate() {
            map[old] = new;
        }
        let triplets = self
            .upper_entries()
            .filter(|&(r, c, _)| map[r] != usize::MAX && map[c] != usize::MAX)
            .map(|(r, c, v)| {
                let (a, b) = (map[r], map[c]);
                if a <= b {
                    (a, b, v)
                } else {
                    (b, a, v)
                }
            })
            .collect();
        SymCsr::from_upper_triplets(indices.len(), triplets)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (r, c, v) in self.upper_entries() {
            m[(r, c)] = v;
            m[(c, r)] = v;
        }
        m
    }

    /// Writes the matrix in MatrixMarket `coordinate real symmetric` format
    /// (lower triangle, 1-based).
    pub fn write_matrix_market<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
        writeln!(out, "{} {} {}", self.n, self.n, self.nnz_upper())?;
        for (r, c, v) in self.upper_entries() {
            writeln!(out, "{} {} {:.17e}", c + 1, r + 1, v)?;
        }
        Ok(())
    }
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SymCsr {
        SymCsr::from_upper_triplets(
            3,
            vec![(0, 0, 2.0), (0, 2, -1.0), (1, 1, 3.0), (0, 0, 1.0), (2, 2, 4.0), (1, 2, 0.5)],
        )
    }

    #[test]
    fn duplicates_are_summed() {
        let m = sample();
        assert_eq!(m.get(0, 0), 3.0);
        assert_eq!(m.get(2, 0), -1.0);
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.nnz_upper(), 5);
    }

    #[test]
    fn matvec_matches_dense() {
        let m = sample();
        let x = [1.0, -2.0, 0.5];
        let y = m.matvec(&x);
        let d = m.to_dense() * nalgebra::DVector::from_column_slice(&x);
        for i in 0..3 {
            assert!((y[i] - d[i]).abs() < 1e-15);
        }
        assert_eq!(m.inf_norm(), 5.5);
    }

    #[test]
    fn matrix_market_header() {
        let mut buf = Vec::new();
        sample().write_matrix_market(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "%%MatrixMarket matrix coordinate real symmetric");
        assert_eq!(lines.next().unwrap(), "3 3 5");
        assert!(lines.all(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            f[0].parse::<usize>().unwrap() >= f[1].parse::<usize>().unwrap()
        }));
    }

    #[test]
    fn submatrix_and_shift() {
        let m = sample();
        let s = m.submatrix(&[2, 0]);
        assert_eq!(s.get(0, 0), 4.0);
        assert_eq!(s.get(0, 1), -1.0);
        let shifted = m.add_scaled(&m, -1.0);
        assert!(shifted.upper_entries().all(|(_, _, v)| v == 0.0));
    }
}
