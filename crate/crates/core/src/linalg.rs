//! Small sparse/banded/dense linear algebra used by the implicit solvers.
//!
//! The operators assembled on grids are stencils, so Jacobians are kept as
//! row lists and factorised in band storage. Dense factorisation is only used
//! when a nonlocal kernel couples every cell to every other.

// Triangular sweeps read best with explicit indices.
#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};
use crate::field::FaceField;
use crate::grid::Grid;
use crate::scalar::Real;

/// Matrix of `u ↦ div(w ∇u)` for face weights `w`.
///
/// Neumann boundary faces are dropped, periodic wrap faces counted once, so
/// the matrix is symmetric with zero row sums.
pub fn div_grad_matrix<T: Real>(grid: &Grid<T>, weights: &FaceField<T>) -> SparseMatrix<T> {
    let mut a = SparseMatrix::zeros(grid.cell_count());
    for axis in 0..grid.dim() {
        let n = grid.n(axis);
        let inv_h2 = T::one() / (grid.h(axis) * grid.h(axis));
        for line in 0..grid.lines(axis) {
            for k in 0..n {
                if grid.is_boundary_face(axis, k) {
                    continue;
                }
                let l = grid.cell_on_line(axis, if k == 0 { n - 1 } else { k - 1 }, line);
                let r = grid.cell_on_line(axis, k, line);
                if l == r {
                    continue;
                }
                let c = weights.axis(axis)[grid.face_index(axis, k, line)] * inv_h2;
                a.add(l, l, -c);
                a.add(l, r, c);
                a.add(r, r, -c);
                a.add(r, l, c);
            }
        }
    }
    a
}

/// Row-compressed sparse matrix with sorted, merged column entries.
#[derive(Clone, Debug)]
pub struct SparseMatrix<T> {
    n: usize,
    rows: Vec<Vec<(usize, T)>>,
}

impl<T: Real> SparseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        SparseMatrix { n, rows: vec![Vec::new(); n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![T::one(); n])
    }

    pub fn diagonal(d: &[T]) -> Self {
        SparseMatrix { n: d.len(), rows: d.iter().enumerate().map(|(i, &v)| vec![(i, v)]).collect() }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[(usize, T)] {
        &self.rows[i]
    }

    /// Adds `v` to entry `(i, j)`.
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        let row = &mut self.rows[i];
        match row.binary_search_by_key(&j, |e| e.0) {
            Ok(pos) => row[pos].1 = row[pos].1 + v,
            Err(pos) => row.insert(pos, (j, v)),
        }
    }

    pub fn add_diagonal(&mut self, d: &[T]) {
        for (i, &v) in d.iter().enumerate() {
            self.add(i, i, v);
        }
    }

    pub fn scale(&mut self, s: T) {
        for row in &mut self.rows {
            for e in row.iter_mut() {
                e.1 = e.1 * s;
            }
        }
    }

    /// `self + s·other`.
    pub fn add_scaled(&mut self, other: &SparseMatrix<T>, s: T) {
        for (i, row) in other.rows.iter().enumerate() {
            for &(j, v) in row {
                self.add(i, j, s * v);
            }
        }
    }

    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        for (yi, row) in y.iter_mut().zip(&self.rows) {
            *yi = row.iter().map(|&(j, v)| v * x[j]).sum();
        }
    }

    /// Scales row `i` by `d[i]` (left multiplication by a diagonal).
    pub fn scale_rows(&mut self, d: &[T]) {
        for (row, &s) in self.rows.iter_mut().zip(d) {
            for e in row.iter_mut() {
                e.1 = e.1 * s;
            }
        }
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &SparseMatrix<T>) -> SparseMatrix<T> {
        let mut out = SparseMatrix::zeros(self.n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(k, a) in row {
                for &(j, b) in &other.rows[k] {
                    out.add(i, j, a * b);
                }
            }
        }
        out
    }

    /// Lower and upper bandwidths.
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut kl = 0;
        let mut ku = 0;
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, _) in row {
                if j < i {
                    kl = kl.max(i - j);
                } else {
                    ku = ku.max(j - i);
                }
            }
        }
        (kl, ku)
    }

    pub fn to_dense(&self) -> Vec<T> {
        let mut a = vec![T::zero(); self.n * self.n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                a[i * self.n + j] = a[i * self.n + j] + v;
            }
        }
        a
    }

    /// Factorises the matrix in band storage. Falls back to dense storage when
    /// the band would cover most of the matrix anyway.
    pub fn factor(&self) -> Result<Factorization<T>> {
        let (kl, ku) = self.bandwidths();
        if 2 * kl + ku + 1 >= self.n {
            Ok(Factorization::Dense(DenseLu::factor(self.to_dense(), self.n)?))
        } else {
            Ok(Factorization::Banded(BandedLu::factor(self, kl, ku)?))
        }
    }
}

/// Either factorisation behind one solve interface.
#[derive(Clone, Debug)]
pub enum Factorization<T> {
    Banded(BandedLu<T>),
    Dense(DenseLu<T>),
}

impl<T: Real> Factorization<T> {
    pub fn solve(&self, b: &mut [T]) {
        match self {
            Factorization::Banded(f) => f.solve(b),
            Factorization::Dense(f) => f.solve(b),
        }
    }
}

/// LU factorisation with partial pivoting in band storage.
///
/// Row `i` stores columns `i - kl ..= i + kl + ku`; the extra `kl` upper
/// diagonals absorb fill from row interchanges.
#[derive(Clone, Debug)]
pub struct BandedLu<T> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<T>,
    pivots: Vec<usize>,
}

impl<T: Real> BandedLu<T> {
    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    pub fn factor(a: &SparseMatrix<T>, kl: usize, ku: usize) -> Result<Self> {
        let n = a.dim();
        let width = 2 * kl + ku + 1;
        let mut lu = BandedLu { n, kl, ku, width, data: vec![T::zero(); n * width], pivots: vec![0; n] };
        for i in 0..n {
            for &(j, v) in a.row(i) {
                let idx = lu.at(i, j);
                lu.data[idx] = lu.data[idx] + v;
            }
        }
        let upper = kl + ku;
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = lu.data[lu.at(k, k)].abs();
            for i in k + 1..=last_row {
                let v = lu.data[lu.at(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == T::zero() || !best.is_finite() {
                return Err(Error::SingularMatrix { pivot: k });
            }
            lu.pivots[k] = p;
            let last_col = (k + upper).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let a = lu.at(k, j);
                    let b = lu.at(p, j);
                    lu.data.swap(a, b);
                }
            }
            let pivot = lu.data[lu.at(k, k)];
            for i in k + 1..=last_row {
                let ik = lu.at(i, k);
                let l = lu.data[ik] / pivot;
                lu.data[ik] = l;
                if l == T::zero() {
                    continue;
                }
                for j in k + 1..=last_col {
                    let kj = lu.data[lu.at(k, j)];
                    let ij = lu.at(i, j);
                    lu.data[ij] = lu.data[ij] - l * kj;
                }
            }
        }
        Ok(lu)
    }

    pub fn solve(&self, b: &mut [T]) {
        let n = self.n;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for i in k + 1..=(k + self.kl).min(n - 1) {
                b[i] = b[i] - self.data[self.at(i, k)] * bk;
            }
        }
        let upper = self.kl + self.ku;
        for k in (0..n).rev() {
            let mut s = b[k];
            for j in k + 1..=(k + upper).min(n - 1) {
                s = s - self.data[self.at(k, j)] * b[j];
            }
            b[k] = s / self.data[self.at(k, k)];
        }
    }
}

/// Dense LU with partial pivoting (row-major storage).
#[derive(Clone, Debug)]
pub struct DenseLu<T> {
    n: usize,
    a: Vec<T>,
    pivots: Vec<usize>,
}

impl<T: Real> DenseLu<T> {
    pub fn factor(mut a: Vec<T>, n: usize) -> Result<Self> {
        assert_eq!(a.len(), n * n);
        let mut pivots = vec![0; n];
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].abs();
            for i in k + 1..n {
                let v = a[i * n + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == T::zero() || !best.is_finite() {
                return Err(Error::SingularMatrix { pivot: k });
            }
            pivots[k] = p;
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
            }
            let pivot = a[k * n + k];
            let (head, tail) = a.split_at_mut((k + 1) * n);
            let row_k = &head[k * n..];
            for row_i in tail.chunks_exact_mut(n) {
                let l = row_i[k] / pivot;
                row_i[k] = l;
                if l == T::zero() {
                    continue;
                }
                for j in k + 1..n {
                    row_i[j] = row_i[j] - l * row_k[j];
                }
            }
        }
        Ok(DenseLu { n, a, pivots })
    }

    pub fn solve(&self, b: &mut [T]) {
        let n = self.n;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
        }
        for i in 0..n {
            let mut s = b[i];
            for j in 0..i {
                s = s - self.a[i * n + j] * b[j];
            }
            b[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..n {
                s = s - self.a[i * n + j] * b[j];
            }
            b[i] = s / self.a[i * n + i];
        }
    }
}

/// Outcome of a conjugate-gradient solve.
#[derive(Clone, Debug)]
pub struct CgOutcome<T> {
    pub solution: Vec<T>,
    pub iterations: usize,
    pub relative_residual: T,
}

/// Diagonally preconditioned conjugate gradients for a symmetric positive
/// semi-definite operator. With `project_mean` the iterates are kept
/// mean-free, which makes the singular Neumann Laplacian solvable.
pub fn pcg<T: Real>(
    apply: impl Fn(&[T], &mut [T]),
    diag: &[T],
    b: &[T],
    tol: T,
    max_iter: usize,
    project_mean: bool,
) -> Result<CgOutcome<T>> {
    let n = b.len();
    let project = |v: &mut [T]| {
        if project_mean {
            let m = v.iter().copied().sum::<T>() / T::from_count(v.len());
            v.iter_mut().for_each(|x| *x = *x - m);
        }
    };
    let mut x = vec![T::zero(); n];
    let mut r = b.to_vec();
    project(&mut r);
    let b_norm = crate::field::dot(&r, &r).sqrt();
    if b_norm == T::zero() {
        return Ok(CgOutcome { solution: x, iterations: 0, relative_residual: T::zero() });
    }
    let precond = |r: &[T], z: &mut [T]| {
        for ((zi, &ri), &di) in z.iter_mut().zip(r).zip(diag) {
            *zi = if di > T::zero() { ri / di } else { ri };
        }
    };
    let mut z = vec![T::zero(); n];
    precond(&r, &mut z);
    project(&mut z);
    let mut p = z.clone();
    let mut rz = crate::field::dot(&r, &z);
    let mut ap = vec![T::zero(); n];
    for it in 1..=max_iter {
        apply(&p, &mut ap);
        let pap = crate::field::dot(&p, &ap);
        if pap <= T::zero() {
            return Err(Error::SolverNonConvergence {
                iterations: it,
                residual: (crate::field::dot(&r, &r).sqrt() / b_norm).as_f64(),
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] = x[i] + alpha * p[i];
            r[i] = r[i] - alpha * ap[i];
        }
        project(&mut r);
        let rel = crate::field::dot(&r, &r).sqrt() / b_norm;
        if rel <= tol {
            project(&mut x);
            return Ok(CgOutcome { solution: x, iterations: it, relative_residual: rel });
        }
        precond(&r, &mut z);
        project(&mut z);
        let rz_new = crate::field::dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let rel = crate::field::dot(&r, &r).sqrt() / b_norm;
    Err(Error::SolverNonConvergence { iterations: max_iter, residual: rel.as_f64() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(a: &SparseMatrix<f64>, x: &[f64], b: &[f64]) -> f64 {
        let mut y = vec![0.0; x.len()];
        a.matvec(x, &mut y);
        y.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
    }

    fn test_matrix(n: usize, kl: usize, ku: usize) -> SparseMatrix<f64> {
        // Deterministic nonsymmetric band with small diagonal to force pivoting.
        let mut a = SparseMatrix::zeros(n);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                let v = ((i * 7 + j * 13) % 11) as f64 - 5.3;
                a.add(i, j, if i == j { 0.1 * v } else { v });
            }
        }
        a
    }

    #[test]
    fn banded_matches_dense() {
        for &(n, kl, ku) in &[(10, 1, 1), (25, 3, 2), (40, 2, 5), (7, 6, 6)] {
            let a = test_matrix(n, kl, ku);
            let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
            let mut xb = b.clone();
            BandedLu::factor(&a, kl, ku).unwrap().solve(&mut xb);
            let mut xd = b.clone();
            DenseLu::factor(a.to_dense(), n).unwrap().solve(&mut xd);
            assert!(residual(&a, &xb, &b) < 1e-9, "banded residual n={n}");
            assert!(residual(&a, &xd, &b) < 1e-9, "dense residual n={n}");
        }
    }

    #[test]
    fn stencil_matrix_matches_operator() {
        use crate::field::{face_average, weighted_div_grad, FaceAverage, Field};
        use crate::grid::BoundaryMode;
        for bc in [BoundaryMode::Neumann, BoundaryMode::Periodic] {
            for g in [Grid::<f64>::new_1d(7, 1.3, bc).unwrap(), Grid::new_2d(5, 4, 1.0, 0.7, bc).unwrap()] {
                let u = Field::from_fn(g, |x| (3.0 * x[0]).sin() + x[1] * x[1]);
                let w = face_average(&u.map(|v| 1.5 + v.cos()), FaceAverage::Arithmetic);
                let a = div_grad_matrix(&g, &w);
                let mut y = vec![0.0; u.len()];
                a.matvec(u.values(), &mut y);
                let direct = weighted_div_grad(&u, &w).unwrap();
                for (p, q) in y.iter().zip(direct.values()) {
                    assert!((p - q).abs() < 1e-10, "{bc:?}: {p} vs {q}");
                }
            }
        }
    }

    #[test]
    fn singular_is_reported() {
        let a = SparseMatrix::<f64>::zeros(3);
        assert!(matches!(a.factor(), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn sparse_product() {
        let mut a = SparseMatrix::<f64>::zeros(3);
        a.add(0, 1, 2.0);
        a.add(1, 2, 3.0);
        a.add(2, 0, 1.0);
        let p = a.mul(&a);
        assert_eq!(p.to_dense(), vec![0.0, 0.0, 6.0, 3.0, 0.0, 0.0, 0.0, 2.0, 0.0]);
        assert_eq!(a.bandwidths(), (2, 1));
    }

    #[test]
    fn pcg_solves_spd_system() {
        let n = 20;
        let mut a = SparseMatrix::<f64>::zeros(n);
        for i in 0..n {
            a.add(i, i, 4.0 + i as f64 * 0.1);
            if i + 1 < n {
                a.add(i, i + 1, -1.0);
                a.add(i + 1, i, -1.0);
            }
        }
        let diag: Vec<f64> = (0..n).map(|i| a.row(i).iter().find(|e| e.0 == i).unwrap().1).collect();
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).cos()).collect();
        let out = pcg(|x, y| a.matvec(x, y), &diag, &b, 1e-12, 200, false).unwrap();
        assert!(residual(&a, &out.solution, &b) < 1e-10);
    }
}
