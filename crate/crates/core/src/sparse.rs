//! Compressed sparse row matrices assembled from element contributions.

/// Collects `(row, col, value)` entries; duplicates are summed on conversion.
#[derive(Clone, Debug, Default)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, entries: Vec::new() }
    }

    pub fn square(n: usize) -> Self {
        Self::new(n, n)
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.nrows && j < self.ncols);
        self.entries.push((i, j, v));
    }

    /// Scatters a dense row-major `dofs.len() x dofs.len()` block.
    pub fn add_local(&mut self, dofs: &[usize], local: &[f64]) {
        let n = dofs.len();
        debug_assert_eq!(local.len(), n * n);
        for (a, &i) in dofs.iter().enumerate() {
            for (b, &j) in dofs.iter().enumerate() {
                self.add(i, j, local[a * n + b]);
            }
        }
    }

    pub fn extend(&mut self, other: TripletBuilder) {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        self.entries.extend(other.entries);
    }

    /// Sums duplicates in insertion order, so entries `(i, j)` and `(j, i)`
    /// built from symmetric blocks receive bit-identical sums.
    pub fn into_csr(mut self) -> CsrMatrix {
        self.entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in self.entries {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..self.nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix { nrows: self.nrows, ncols: self.ncols, row_ptr, col_idx, values }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, row_ptr: vec![0; nrows + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices (sorted) and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[range.clone()], &self.values[range])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map(|k| vals[k]).unwrap_or(0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `x^T A x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        self.mul_vec(y).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |A_ij - A_ji|` over all stored entries.
    pub fn max_asymmetry(&self) -> f64 {
        self.iter().fold(0.0, |m, (i, j, v)| m.max((v - self.get(j, i)).abs()))
    }

    pub fn is_structurally_symmetric(&self) -> bool {
        self.iter().all(|(i, j, _)| self.row(j).0.binary_search(&i).is_ok())
    }

    /// Largest `|A_ij - B_ij|` over the union of both patterns.
    pub fn max_abs_diff(&self, other: &CsrMatrix) -> f64 {
        let a = self.iter().fold(0.0f64, |m, (i, j, v)| m.max((v - other.get(i, j)).abs()));
        other.iter().fold(a, |m, (i, j, v)| m.max((v - self.get(i, j)).abs()))
    }

    pub fn scaled(&self, s: f64) -> CsrMatrix {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// Entrywise sum; the pattern is the union of both patterns.
    pub fn add(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut row_ptr = Vec::with_capacity(self.nrows + 1);
        let mut col_idx = Vec::with_capacity(self.nnz().max(other.nnz()));
        let mut values = Vec::with_capacity(col_idx.capacity());
        row_ptr.push(0);
        for i in 0..self.nrows {
            let (ca, va) = self.row(i);
            let (cb, vb) = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < cb.len() {
                let take_a = q == cb.len() || (p < ca.len() && ca[p] < cb[q]);
                let take_b = p == ca.len() || (q < cb.len() && cb[q] < ca[p]);
                if take_a {
                    col_idx.push(ca[p]);
                    values.push(va[p]);
                    p += 1;
                } else if take_b {
                    col_idx.push(cb[q]);
                    values.push(vb[q]);
                    q += 1;
                } else {
                    col_idx.push(ca[p]);
                    values.push(va[p] + vb[q]);
                    p += 1;
                    q += 1;
                }
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix { nrows: self.nrows, ncols: self.ncols, row_ptr, col_idx, values }
    }

    /// Principal submatrix on `keep` (row/column `keep[a]` becomes `a`).
    pub fn principal_submatrix(&self, keep: &[usize]) -> CsrMatrix {
        let mut map = vec![usize::MAX; self.ncols];
        for (a, &i) in keep.iter().enumerate() {
            map[i] = a;
        }
        let mut row_ptr = Vec::with_capacity(keep.len() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for &i in keep {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if map[j] != usize::MAX {
                    col_idx.push(map[j]);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix { nrows: keep.len(), ncols: keep.len(), row_ptr, col_idx, values }
    }

    /// Rows with no stored entries or only zeros.
    pub fn is_zero_row(&self, i: usize) -> bool {
        self.row(i).1.iter().all(|&v| v == 0.0)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, j, v) in self.iter() {
            out[i][j] = v;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn duplicates_are_summed() {
        let mut t = TripletBuilder::square(3);
        t.add(0, 0, 1.0);
        t.add(2, 1, 2.0);
        t.add(0, 0, 3.0);
        t.add(1, 2, 2.0);
        let a = t.into_csr();
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.get(0, 0), 4.0);
        assert_eq!(a.get(1, 1), 0.0);
        assert_eq!(a.max_asymmetry(), 0.0);
        assert!(a.is_structurally_symmetric());
    }

    #[test]
    fn submatrix_and_add() {
        let mut t = TripletBuilder::square(3);
        t.add_local(&[0, 2], &[2.0, -1.0, -1.0, 2.0]);
        let a = t.into_csr();
        let mut t = TripletBuilder::square(3);
        t.add(1, 1, 5.0);
        t.add(2, 2, 1.0);
        let b = t.into_csr();
        let c = a.add(&b);
        assert_eq!(c.to_dense(), vec![vec![2.0, 0.0, -1.0], vec![0.0, 5.0, 0.0], vec![-1.0, 0.0, 3.0]]);
        let s = c.principal_submatrix(&[0, 2]);
        assert_eq!(s.to_dense(), vec![vec![2.0, -1.0], vec![-1.0, 3.0]]);
        assert_eq!(c.max_abs_diff(&a), 5.0);
    }

    proptest! {
        #[test]
        fn csr_matches_dense(entries in proptest::collection::vec((0usize..6, 0usize..6, -10.0f64..10.0), 0..40),
                             x in proptest::collection::vec(-1.0f64..1.0, 6)) {
            let mut dense = vec![vec![0.0; 6]; 6];
            let mut t = TripletBuilder::square(6);
            for &(i, j, v) in &entries {
                dense[i][j] += v;
                t.add(i, j, v);
            }
            let a = t.into_csr();
            let y = a.mul_vec(&x);
            for i in 0..6 {
                let expected: f64 = (0..6).map(|j| dense[i][j] * x[j]).sum();
                prop_assert!((y[i] - expected).abs() < 1e-12);
            }
            let doubled = a.add(&a);
            prop_assert!(doubled.max_abs_diff(&a.scaled(2.0)) == 0.0);
        }
    }
}
