//! Tridiagonal matrices and their direct solution.
//!
//! Every operator of the P1 scheme couples a node only with its two
//! neighbours, so the mass, stiffness and convection matrices and every
//! Newton Jacobian are stored as three diagonals.

use crate::error::{check_len, Error, Result};

/// Relative pivot size below which the Thomas sweep gives up.
const PIVOT_RTOL: f64 = 1e-14;

/// `n x n` tridiagonal matrix.
///
/// `lower[i]` is entry `(i + 1, i)` and `upper[i]` is entry `(i, i + 1)`;
/// both have length `n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        let off = n.saturating_sub(1);
        Tridiagonal {
            lower: vec![0.0; off],
            diag: vec![0.0; n],
            upper: vec![0.0; off],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        m.diag.fill(1.0);
        m
    }

    pub fn from_diagonals(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let off = diag.len().saturating_sub(1);
        check_len(off, lower.len())?;
        check_len(off, upper.len())?;
        Ok(Tridiagonal { lower, diag, upper })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if i == j + 1 {
            self.lower[j]
        } else if j == i + 1 {
            self.upper[i]
        } else {
            0.0
        }
    }

    /// Adds `value` to entry `(i, j)`, which must lie inside the band.
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        if i == j {
            self.diag[i] += value;
        } else if i == j + 1 {
            self.lower[j] += value;
        } else if j == i + 1 {
            self.upper[i] += value;
        } else {
            panic!("entry ({i}, {j}) lies outside the tridiagonal band");
        }
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: f64, other: &Tridiagonal) {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        let pairs = [
            (&mut self.lower, &other.lower),
            (&mut self.diag, &other.diag),
            (&mut self.upper, &other.upper),
        ];
        for (dst, src) in pairs {
            dst.iter_mut().zip(src).for_each(|(d, s)| *d += alpha * s);
        }
    }

    pub fn scaled(&self, alpha: f64) -> Tridiagonal {
        let mut out = Tridiagonal::zeros(self.dim());
        out.add_scaled(alpha, self);
        out
    }

    pub fn transpose(&self) -> Tridiagonal {
        Tridiagonal {
            lower: self.upper.clone(),
            diag: self.diag.clone(),
            upper: self.lower.clone(),
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(x.len(), n, "dimension mismatch");
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// `x^T A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.matvec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Solves `A x = rhs` by the Thomas algorithm.
    ///
    /// Falls back to dense Gaussian elimination with partial pivoting when a
    /// pivot is tiny relative to the largest entry of its row.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), rhs.len())?;
        match self.thomas(rhs) {
            Some(x) => Ok(x),
            None => dense_solve(self.to_dense(), rhs.to_vec()),
        }
    }

    fn row_scale(&self, i: usize) -> f64 {
        let mut s = self.diag[i].abs();
        if i > 0 {
            s = s.max(self.lower[i - 1].abs());
        }
        if i + 1 < self.dim() {
            s = s.max(self.upper[i].abs());
        }
        s
    }

    fn thomas(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        let n = self.dim();
        if n == 0 {
            return Some(Vec::new());
        }
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];

        let mut pivot = self.diag[0];
        if pivot.abs() <= PIVOT_RTOL * self.row_scale(0) || pivot == 0.0 {
            return None;
        }
        if n > 1 {
            c[0] = self.upper[0] / pivot;
        }
        d[0] = rhs[0] / pivot;
        for i in 1..n {
            pivot = self.diag[i] - self.lower[i - 1] * c[i - 1];
            if pivot.abs() <= PIVOT_RTOL * self.row_scale(i) || pivot == 0.0 {
                return None;
            }
            if i + 1 < n {
                c[i] = self.upper[i] / pivot;
            }
            d[i] = (rhs[i] - self.lower[i - 1] * d[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Some(d)
    }
}

/// Gaussian elimination with partial pivoting on a dense copy.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    for col in 0..n {
        let (p, best) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= f64::EPSILON * scale || best == 0.0 {
            return Err(Error::SingularSystem { row: col });
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[r][k] -= f * a[col][k];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn identity_returns_rhs() {
        let b = vec![1.0, -2.0, 3.5, 0.25];
        assert_eq!(Tridiagonal::identity(4).solve(&b).unwrap(), b);
    }

    #[test]
    fn hand_solved_three_by_three() {
        let a = Tridiagonal::from_diagonals(vec![-1.0; 2], vec![2.0; 3], vec![-1.0; 2]).unwrap();
        let x = a.solve(&[1.0, 0.0, 1.0]).unwrap();
        for xi in x {
            assert!((xi - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn random_diagonally_dominant_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 3, 10, 257] {
            let lower: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let upper: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(2.1..5.0)).collect();
            let a = Tridiagonal::from_diagonals(lower, diag, upper).unwrap();
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let x = a.solve(&b).unwrap();
            let r: Vec<f64> = a.matvec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
            assert!(norm(&r) <= 1e-12 * norm(&b));
        }
    }

    #[test]
    fn zero_leading_pivot_uses_dense_fallback() {
        // [[0, 1], [1, 1]] x = [1, 3]  ->  x = (2, 1)
        let a = Tridiagonal::from_diagonals(vec![1.0], vec![0.0, 1.0], vec![1.0]).unwrap();
        assert!(a.thomas(&[1.0, 3.0]).is_none());
        let x = a.solve(&[1.0, 3.0]).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_system_reported() {
        let a = Tridiagonal::from_diagonals(vec![1.0], vec![1.0, 1.0], vec![1.0]).unwrap();
        assert!(matches!(a.solve(&[1.0, 1.0]), Err(Error::SingularSystem { .. })));
    }

    #[test]
    fn inconsistent_diagonals_rejected() {
        assert!(Tridiagonal::from_diagonals(vec![1.0; 3], vec![1.0; 3], vec![1.0; 2]).is_err());
        assert!(Tridiagonal::identity(3).solve(&[1.0; 4]).is_err());
    }

    #[test]
    #[should_panic(expected = "outside the tridiagonal band")]
    fn add_outside_band_panics() {
        Tridiagonal::zeros(4).add(0, 2, 1.0);
    }
}
