//! Profile (skyline) LDL^T factorization without pivoting, on a reverse
//! Cuthill-McKee ordering.

use std::collections::VecDeque;

use crate::error::SolveError;
use crate::sparse::CsrMatrix;

/// Pivots with `|d_i| <= PIVOT_TOL * |a_ii|` are treated as zero.
pub const PIVOT_TOL: f64 = 1e-10;

/// Reverse Cuthill-McKee permutation (new index to old index) of a matrix
/// with symmetric sparsity pattern.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.nrows();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).0.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (degree[i], i));
    for &seed in &by_degree {
        if visited[seed] {
            continue;
        }
        let root = pseudo_peripheral(a, seed, &degree);
        let mut queue = VecDeque::from([root]);
        visited[root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = a.row(v).0.iter().copied().filter(|&u| !visited[u]).collect();
            next.sort_by_key(|&u| (degree[u], u));
            for u in next {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    order.reverse();
    order
}

/// BFS levels from `start`: (last level, eccentricity).
fn level_structure(a: &CsrMatrix, start: usize, degree: &[usize]) -> (Vec<usize>, usize) {
    let mut dist = std::collections::HashMap::from([(start, 0usize)]);
    let mut frontier = vec![start];
    let mut depth = 0;
    loop {
        let mut next = Vec::new();
        for &v in &frontier {
            for &u in a.row(v).0 {
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(u) {
                    e.insert(depth + 1);
                    next.push(u);
                }
            }
        }
        if next.is_empty() {
            frontier.sort_by_key(|&u| (degree[u], u));
            return (frontier, depth);
        }
        frontier = next;
        depth += 1;
    }
}

fn pseudo_peripheral(a: &CsrMatrix, start: usize, degree: &[usize]) -> usize {
    let mut root = start;
    let (mut last, mut ecc) = level_structure(a, root, degree);
    for _ in 0..8 {
        let cand = last[0];
        let (l, e) = level_structure(a, cand, degree);
        if e <= ecc {
            break;
        }
        root = cand;
        last = l;
        ecc = e;
    }
    root
}

/// `A = L D L^T` in the permuted ordering.
#[derive(Clone, Debug)]
pub struct SkylineLdl {
    perm: Vec<usize>,
    first: Vec<usize>,
    offsets: Vec<usize>,
    lower: Vec<f64>,
    diag: Vec<f64>,
}

impl SkylineLdl {
    /// Factorizes `a`. `labels[i]` names row `i` in error messages.
    pub fn factor(a: &CsrMatrix, labels: &[usize]) -> Result<Self, SolveError> {
        let n = a.nrows();
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (old, &new) in inv.iter().enumerate() {
            for &c in a.row(old).0 {
                first[new] = first[new].min(inv[c]);
            }
        }
        let mut offsets = vec![0; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + (i - first[i]);
        }
        let mut lower = vec![0.0; offsets[n]];
        let mut diag = vec![0.0; n];
        let mut scale = vec![0.0f64; n];
        for (old, &i) in inv.iter().enumerate() {
            let (cols, vals) = a.row(old);
            for (&c, &v) in cols.iter().zip(vals) {
                let j = inv[c];
                scale[i] = scale[i].max(v.abs());
                if j < i {
                    lower[offsets[i] + j - first[i]] = v;
                } else if j == i {
                    diag[i] = v;
                }
            }
        }

        for i in 0..n {
            let fi = first[i];
            let (done, rest) = lower.split_at_mut(offsets[i]);
            let row = &mut rest[..i - fi];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let lj = &done[offsets[j]..];
                let mut s = row[j - fi];
                for k in k0..j {
                    s -= row[k - fi] * lj[k - fj];
                }
                row[j - fi] = s;
            }
            let aii = diag[i];
            let mut d = aii;
            for j in fi..i {
                let w = row[j - fi];
                let l = w / diag[j];
                d -= l * w;
                row[j - fi] = l;
            }
            let reference = if aii != 0.0 { aii.abs() } else { scale[i] };
            if !d.is_finite() || d.abs() <= PIVOT_TOL * reference {
                return Err(SolveError::Singular { dof: labels[perm[i]], pivot: d });
            }
            diag[i] = d;
        }
        Ok(Self { perm, first, offsets, lower, diag })
    }

    pub fn negative_pivots(&self) -> usize {
        self.diag.iter().filter(|d| **d < 0.0).count()
    }

    /// Profile storage size.
    pub fn profile(&self) -> usize {
        self.lower.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.lower[self.offsets[i]..self.offsets[i + 1]];
            let s: f64 = row.iter().zip(&y[fi..i]).map(|(l, z)| l * z).sum();
            y[i] -= s;
        }
        for i in 0..n {
            y[i] /= self.diag[i];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let xi = y[i];
            let row = &self.lower[self.offsets[i]..self.offsets[i + 1]];
            for (l, yj) in row.iter().zip(&mut y[fi..i]) {
                *yj -= l * xi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::TripletBuilder;
    use proptest::prelude::*;

    fn laplacian_1d(n: usize) -> CsrMatrix {
        let mut t = TripletBuilder::square(n);
        for i in 0..n {
            t.add(i, i, 2.0);
            if i + 1 < n {
                t.add(i, i + 1, -1.0);
                t.add(i + 1, i, -1.0);
            }
        }
        t.into_csr()
    }

    #[test]
    fn rcm_is_a_permutation() {
        let a = laplacian_1d(17);
        let mut p = reverse_cuthill_mckee(&a);
        p.sort_unstable();
        assert_eq!(p, (0..17).collect::<Vec<_>>());
    }

    #[test]
    fn tridiagonal_profile_stays_banded() {
        let a = laplacian_1d(50);
        let f = SkylineLdl::factor(&a, &(0..50).collect::<Vec<_>>()).unwrap();
        assert_eq!(f.profile(), 49);
        let x = f.solve(&vec![1.0; 50]);
        let r = a.mul_vec(&x);
        assert!(r.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn singular_pivot_is_reported_with_label() {
        let mut t = TripletBuilder::square(3);
        for (i, j, v) in [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0), (2, 2, 3.0)] {
            t.add(i, j, v);
        }
        match SkylineLdl::factor(&t.into_csr(), &[10, 11, 12]) {
            Err(SolveError::Singular { dof, .. }) => assert!(dof == 10 || dof == 11),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn indefinite_systems_factor() {
        let mut t = TripletBuilder::square(2);
        for (i, j, v) in [(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)] {
            t.add(i, j, v);
        }
        let a = t.into_csr();
        let f = SkylineLdl::factor(&a, &[0, 1]).unwrap();
        assert_eq!(f.negative_pivots(), 1);
        let x = f.solve(&[3.0, 3.0]);
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn solves_random_spd(n in 1usize..25, seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut t = TripletBuilder::square(n);
            for i in 0..n {
                t.add(i, i, n as f64 + 1.0);
                for j in 0..i {
                    if rng.gen_bool(0.3) {
                        let v: f64 = rng.gen_range(-1.0..1.0);
                        t.add(i, j, v);
                        t.add(j, i, v);
                    }
                }
            }
            let a = t.into_csr();
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x = SkylineLdl::factor(&a, &(0..n).collect::<Vec<_>>()).unwrap().solve(&b);
            let r = a.mul_vec(&x);
            for (ri, bi) in r.iter().zip(&b) {
                prop_assert!((ri - bi).abs() < 1e-12);
            }
        }
    }
}
