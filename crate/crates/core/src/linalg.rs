//! Dense complex linear algebra for the small systems that show up here.

use crate::{Error, Result, C64};

/// Pivot ratio above which a solve is flagged as ill-conditioned.
pub const CONDITION_WARNING: f64 = 1e12;

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<C64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("matrix rows must have equal length".into()));
        }
        Ok(Self { n, data: rows.concat() })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> C64 {
        let mut a = self.data.clone();
        let n = self.n;
        let mut det = C64::new(1.0, 0.0);
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].norm().total_cmp(&a[j * n + k].norm()))
                .unwrap();
            if a[p * n + k].norm() == 0.0 {
                return C64::new(0.0, 0.0);
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let piv = a[k * n + k];
            det *= piv;
            for i in k + 1..n {
                let f = a[i * n + k] / piv;
                for j in k..n {
                    let t = a[k * n + j];
                    a[i * n + j] -= f * t;
                }
            }
        }
        det
    }
}

/// Solution of a linear system with its pivot growth diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: Vec<C64>,
    /// Ratio of the largest to the smallest pivot magnitude.
    pub pivot_ratio: f64,
}

impl Solution {
    pub fn ill_conditioned(&self) -> bool {
        self.pivot_ratio > CONDITION_WARNING
    }
}

/// `a + b = s + e` exactly.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let z = s - a;
    (s, (a - (s - z)) + (b - z))
}

/// Real dot product evaluated as if in twice the working precision.
pub fn dot2(pairs: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    let (mut s, mut c) = (0.0, 0.0);
    for (x, y) in pairs {
        let p = x * y;
        let pe = x.mul_add(y, -p);
        let (t, se) = two_sum(s, p);
        s = t;
        c += pe + se;
    }
    s + c
}

/// Complex counterpart of [`dot2`]: `sum x_k y_k`.
pub fn cdot2(pairs: impl IntoIterator<Item = (C64, C64)> + Clone) -> C64 {
    let re = dot2(pairs.clone().into_iter().flat_map(|(x, y)| [(x.re, y.re), (-x.im, y.im)]));
    let im = dot2(pairs.into_iter().flat_map(|(x, y)| [(x.re, y.im), (x.im, y.re)]));
    C64::new(re, im)
}

/// Pivoted LU factors of a square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Lu {
    n: usize,
    /// Unit lower factor below the diagonal, upper factor on and above it.
    lu: Vec<C64>,
    perm: Vec<usize>,
    pub pivot_ratio: f64,
}

impl Lu {
    /// Partial pivoting; a pivot below `1e-14 * max|a|` counts as singular.
    pub fn factor(a: &Matrix) -> Result<Self> {
        let n = a.n;
        let scale = a.max_abs();
        let mut m = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let (mut pmax, mut pmin) = (0.0f64, f64::INFINITY);
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| m[i * n + k].norm().total_cmp(&m[j * n + k].norm()))
                .unwrap();
            let mag = m[p * n + k].norm();
            if mag <= 1e-14 * scale || mag == 0.0 {
                return Err(Error::Singular { size: n });
            }
            pmax = pmax.max(mag);
            pmin = pmin.min(mag);
            if p != k {
                for j in 0..n {
                    m.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let piv = m[k * n + k];
            for i in k + 1..n {
                let f = m[i * n + k] / piv;
                m[i * n + k] = f;
                if f.norm() == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    let t = m[k * n + j];
                    m[i * n + j] -= f * t;
                }
            }
        }
        let pivot_ratio = if n == 0 { 1.0 } else { pmax / pmin };
        Ok(Self { n, lu: m, perm, pivot_ratio })
    }

    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::Invalid("right-hand side has wrong length".into()));
        }
        let mut y: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let t = self.lu[i * n + k] * y[k];
                y[i] -= t;
            }
        }
        for k in (0..n).rev() {
            let mut s = y[k];
            for j in k + 1..n {
                s -= self.lu[k * n + j] * y[j];
            }
            y[k] = s / self.lu[k * n + k];
        }
        Ok(y)
    }
}

/// Solves `a x = b` with partial pivoting.
pub fn solve(a: &Matrix, b: &[C64]) -> Result<Solution> {
    let lu = Lu::factor(a)?;
    Ok(Solution { x: lu.solve(b)?, pivot_ratio: lu.pivot_ratio })
}

/// [`solve`] followed by one step of refinement with the residual
/// `b - a x` accumulated in doubled precision.
pub fn solve_refined(a: &Matrix, b: &[C64]) -> Result<Solution> {
    let lu = Lu::factor(a)?;
    let mut x = lu.solve(b)?;
    let n = a.n;
    let resid: Vec<C64> = (0..n)
        .map(|i| {
            let terms = a.row(i).iter().zip(&x).map(|(&p, &q)| (-p, q));
            cdot2(std::iter::once((b[i], C64::new(1.0, 0.0))).chain(terms))
        })
        .collect();
    for (xi, d) in x.iter_mut().zip(lu.solve(&resid)?) {
        *xi += d;
    }
    Ok(Solution { x, pivot_ratio: lu.pivot_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    #[test]
    fn solves_small_system() {
        let a = Matrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.0, 1.0)],
            vec![c(1.0, -1.0), c(3.0, 0.0)],
        ])
        .unwrap();
        let x = vec![c(1.0, 2.0), c(-0.5, 0.25)];
        let b = a.mul_vec(&x);
        let s = solve(&a, &b).unwrap();
        for (u, v) in s.x.iter().zip(&x) {
            assert!((u - v).norm() < 1e-14);
        }
        assert!(!s.ill_conditioned());
    }

    #[test]
    fn compensated_dot_recovers_cancelled_bits() {
        let big = 1e16;
        assert_eq!(dot2([(big, 1.0), (1.0, 1.0), (-big, 1.0)]), 1.0);
        let z = cdot2([(c(big, 0.0), c(1.0, 0.0)), (c(0.0, 1.0), c(0.0, 1.0)), (c(-big, 0.0), c(1.0, 0.0))]);
        assert_eq!(z, c(-1.0, 0.0));
    }

    #[test]
    fn refinement_does_not_hurt() {
        let h = Matrix::from_rows(
            &(0..6).map(|i| (0..6).map(|j| c(1.0 / (i + j + 1) as f64, 0.0)).collect()).collect::<Vec<_>>(),
        )
        .unwrap();
        let x: Vec<C64> = (0..6).map(|k| c(1.0, k as f64)).collect();
        let b = h.mul_vec(&x);
        let err = |s: Solution| s.x.iter().zip(&x).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
        assert!(err(solve_refined(&h, &b).unwrap()) <= err(solve(&h, &b).unwrap()) * 1.5 + 1e-15);
    }

    #[test]
    fn singular_is_reported() {
        let a = Matrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(2.0, 0.0), c(4.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(solve(&a, &[c(1.0, 0.0), c(0.0, 0.0)]), Err(Error::Singular { size: 2 }));
        assert_eq!(a.det(), c(0.0, 0.0));
    }

    #[test]
    fn determinant_of_permutation() {
        let a = Matrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(a.det(), c(-1.0, 0.0));
    }
}
