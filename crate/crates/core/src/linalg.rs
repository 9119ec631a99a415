//! Dense row-major matrices and LU factorization with partial pivoting.
//!
//! Circuits here stay below a few hundred nodes, so a straightforward
//! right-looking elimination is fast enough and keeps the solve auditable.

use std::fmt;

#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DenseMatrix({}x{})", self.n, self.n)
    }
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn copy_from(&mut self, other: &DenseMatrix) {
        assert_eq!(self.n, other.n);
        self.data.copy_from_slice(&other.data);
    }

    /// `y = A x`
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = dot(self.row(i), x);
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Factor `P A = L U`. A pivot smaller than `1e-13 * max|A|` is treated
    /// as singular and reported by its (permuted) row index.
    pub fn lu(&self) -> Result<LuFactors, SingularPivot> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let threshold = 1e-13 * self.max_abs().max(f64::MIN_POSITIVE);

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
            if best <= threshold || !best.is_finite() {
                return Err(SingularPivot { row: perm[p] });
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * n + k];
            let (top, bottom) = a.split_at_mut((k + 1) * n);
            let pivot_row = &top[k * n + k + 1..k * n + n];
            for i in 0..n - k - 1 {
                let row = &mut bottom[i * n..(i + 1) * n];
                let l = row[k] / pivot;
                row[k] = l;
                if l != 0.0 {
                    for (r, u) in row[k + 1..].iter_mut().zip(pivot_row) {
                        *r -= l * u;
                    }
                }
            }
        }
        Ok(LuFactors { n, lu: a, perm })
    }
}

/// Dot product with four independent accumulators so the loop vectorizes.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    let tail: f64 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Row at which elimination met a (numerically) zero pivot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingularPivot {
    pub row: usize,
}

#[derive(Clone)]
pub struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl fmt::Debug for LuFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LuFactors({}x{})", self.n, self.n)
    }
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        self.solve_into(b, &mut x);
        x
    }

    pub fn solve_into(&self, b: &[f64], x: &mut [f64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        for (xi, &p) in x.iter_mut().zip(&self.perm) {
            *xi = b[p];
        }
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s = dot(row, &x[..i]);
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n..(i + 1) * n];
            let s = dot(&row[i + 1..], &x[i + 1..]);
            x[i] = (x[i] - s) / row[i];
        }
    }
}

/// Solves a sequence of slowly varying systems `A_k x = b_k`.
///
/// The LU factors of an earlier matrix precondition iterative refinement on
/// the current one; the matrix is refactored whenever refinement needs more
/// than `max_iterations` sweeps to push the normwise backward error
/// `|b - A x| / (|A| |x| + |b|)` (infinity norms) below `tolerance`.
#[derive(Debug, Clone)]
pub struct RefinedSolver {
    factors: Option<LuFactors>,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub factorizations: usize,
    pub refinement_sweeps: usize,
    residual: Vec<f64>,
    correction: Vec<f64>,
}

impl Default for RefinedSolver {
    fn default() -> Self {
        Self::new(1e-13, 3)
    }
}

impl RefinedSolver {
    pub fn new(tolerance: f64, max_iterations: usize) -> Self {
        Self {
            factors: None,
            tolerance,
            max_iterations,
            factorizations: 0,
            refinement_sweeps: 0,
            residual: Vec::new(),
            correction: Vec::new(),
        }
    }

    /// Forget the cached factors.
    pub fn invalidate(&mut self) {
        self.factors = None;
    }

    pub fn solve(&mut self, a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>, SingularPivot> {
        let n = a.dim();
        if self.residual.len() != n {
            self.residual = vec![0.0; n];
            self.correction = vec![0.0; n];
            self.factors = None;
        }
        let b_norm = b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if b_norm == 0.0 {
            return Ok(vec![0.0; n]);
        }
        if let Some(f) = &self.factors {
            let a_norm = (0..n)
                .map(|i| a.row(i).iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0_f64, f64::max);
            let mut x = f.solve(b);
            for sweep in 0..=self.max_iterations {
                a.mul_vec(&x, &mut self.residual);
                let mut r_norm = 0.0_f64;
                for (r, bi) in self.residual.iter_mut().zip(b) {
                    *r = bi - *r;
                    r_norm = r_norm.max(r.abs());
                }
                let x_norm = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                if r_norm <= self.tolerance * (a_norm * x_norm + b_norm) {
                    return Ok(x);
                }
                if sweep == self.max_iterations {
                    break;
                }
                f.solve_into(&self.residual, &mut self.correction);
                for (xi, c) in x.iter_mut().zip(&self.correction) {
                    *xi += c;
                }
                self.refinement_sweeps += 1;
            }
        }
        let f = a.lu()?;
        self.factorizations += 1;
        let mut x = f.solve(b);
        // One sweep of refinement against the fresh factors.
        a.mul_vec(&x, &mut self.residual);
        for (r, bi) in self.residual.iter_mut().zip(b) {
            *r = bi - *r;
        }
        f.solve_into(&self.residual, &mut self.correction);
        for (xi, c) in x.iter_mut().zip(&self.correction) {
            *xi += c;
        }
        self.factors = Some(f);
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_rows(rows: &[&[f64]]) -> DenseMatrix {
        let n = rows.len();
        let mut m = DenseMatrix::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        m
    }

    #[test]
    fn solves_with_pivoting() {
        // Zero leading entry forces a row swap.
        let a = from_rows(&[&[0.0, 2.0, 1.0], &[1.0, 1.0, 0.0], &[3.0, 0.0, 1.0]]);
        let x_true = [1.0, -2.0, 0.5];
        let mut b = [0.0; 3];
        a.mul_vec(&x_true, &mut b);
        let x = a.lu().unwrap().solve(&b);
        for (u, v) in x.iter().zip(x_true) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(a.lu().is_err());
    }

    #[test]
    fn refined_solver_tracks_perturbed_matrix() {
        let mut a = from_rows(&[&[4.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 2.0]]);
        let b = [1.0, 2.0, 3.0];
        let mut s = RefinedSolver::default();
        let x0 = s.solve(&a, &b).unwrap();
        assert_eq!(s.factorizations, 1);
        a.add(0, 0, 1e-4);
        a.add(2, 1, -2e-4);
        let x1 = s.solve(&a, &b).unwrap();
        assert_eq!(s.factorizations, 1, "small change should reuse factors");
        let exact = a.lu().unwrap().solve(&b);
        for (u, v) in x1.iter().zip(&exact) {
            assert!((u - v).abs() < 1e-12);
        }
        assert!(x0 != x1);
    }
}
