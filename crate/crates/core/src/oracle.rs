//! Independent checks of quasi-definiteness for `u = vL` that avoid the
//! matrix recurrence: a determinant built from the zeros of `A`, and for
//! degree one a kernel criterion.

use nalgebra::{DMatrix, Schur};
use serde::Serialize;

use crate::algebra::{ComplexPoly, HermitianLaurent};
use crate::linalg::Matrix;
use crate::opuc::{cd_kernel_terms, mop, SchurSequence};
use crate::{Error, Result, Tolerance, C64};

/// Default zero threshold for the row-scaled determinant.
pub const DETERMINANT_THRESHOLD: f64 = 1e-8;
/// Roots closer than this are treated as one multiple root.
pub const CLUSTER_RADIUS: f64 = 1e-6;

/// Zeros of `A`, with `derivative_orders[i]` counting earlier equal zeros.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootData {
    pub roots: Vec<C64>,
    pub derivative_orders: Vec<usize>,
}

/// Eigenvalues of the companion matrix of a polynomial, Newton-polished.
pub fn polynomial_roots(p: &ComplexPoly) -> Result<Vec<C64>> {
    let d = p.nominal_degree();
    if d < 1 {
        return Err(Error::Invalid("polynomial must have positive degree".into()));
    }
    let d = d as usize;
    let lead = p.leading();
    let mut comp = DMatrix::<C64>::zeros(d, d);
    for i in 1..d {
        comp[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..d {
        comp[(i, d - 1)] = -p.coeff(i) / lead;
    }
    let eig = Schur::new(comp)
        .eigenvalues()
        .ok_or_else(|| Error::Invalid("eigenvalue iteration did not converge".into()))?;
    let dp = p.derivative();
    Ok(eig
        .iter()
        .map(|&z0| {
            let mut z = z0;
            for _ in 0..3 {
                let der = dp.eval(z);
                if der.norm() < 1e-8 * lead.norm() {
                    break;
                }
                let step = p.eval(z) / der;
                if !step.is_finite() || step.norm() > 1e-3 * (1.0 + z.norm()) {
                    break;
                }
                z -= step;
            }
            z
        })
        .collect())
}

/// Zeros of `A` with multiplicity bookkeeping. Members of a cluster are
/// replaced by the cluster mean.
pub fn roots_of_a(l: &HermitianLaurent) -> Result<RootData> {
    let raw = polynomial_roots(l.a())?;
    let n = raw.len();
    let mut group = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if group[i] != usize::MAX {
            continue;
        }
        let g = groups.len();
        let mut members = vec![i];
        group[i] = g;
        for j in i + 1..n {
            if group[j] == usize::MAX && (raw[j] - raw[i]).norm() <= CLUSTER_RADIUS * (1.0 + raw[i].norm()) {
                group[j] = g;
                members.push(j);
            }
        }
        groups.push(members);
    }
    let mut roots = Vec::with_capacity(n);
    let mut orders = Vec::with_capacity(n);
    for members in &groups {
        let mean = members.iter().map(|&i| raw[i]).sum::<C64>() / members.len() as f64;
        for l in 0..members.len() {
            roots.push(mean);
            orders.push(l);
        }
    }
    Ok(RootData { roots, derivative_orders: orders })
}

/// `|det M| / prod(row norms)` after column equilibration.
fn scaled_det(rows: &[Vec<C64>]) -> f64 {
    let n = rows.len();
    let mut rows = rows.to_vec();
    for j in 0..n {
        let norm = rows.iter().map(|r| r[j].norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for r in rows.iter_mut() {
                r[j] /= norm;
            }
        }
    }
    let prod: f64 = rows
        .iter()
        .map(|r| r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .product();
    if prod == 0.0 {
        return 0.0;
    }
    let m = Matrix::from_rows(&rows).expect("square by construction");
    m.det().norm() / prod
}

/// Row-scaled determinants `|det M^(m)|` for `m = 0 ..= n + 1`.
pub fn determinant_profile(b: &SchurSequence, l: &HermitianLaurent, n: usize) -> Result<Vec<f64>> {
    let r = l.degree();
    if b.len() < n + 1 + r {
        return Err(Error::TooShort { needed: n + 1 + r, have: b.len() });
    }
    let rd = roots_of_a(l)?;
    let mut out = Vec::with_capacity(n + 2);
    for m in 0..=n + 1 {
        let pair = mop(&b.params()[..m + r]);
        let rows: Vec<Vec<C64>> = rd
            .roots
            .iter()
            .zip(&rd.derivative_orders)
            .map(|(&zeta, &ord)| {
                let mut row = Vec::with_capacity(2 * r);
                for j in 0..r {
                    row.push(pair.psi.shift(j).nth_derivative(ord).eval(zeta));
                }
                for j in 0..r {
                    row.push(pair.psi_star.shift(j).nth_derivative(ord).eval(zeta));
                }
                row
            })
            .collect();
        out.push(scaled_det(&rows));
    }
    Ok(out)
}

/// First `m` in `0 ..= n + 1` whose determinant vanishes below `threshold`,
/// or `n + 2`. The functional `vL` is quasi-definite in degree `n` exactly
/// when the result exceeds `n + 1`; in general it has `result - 1` MOP.
pub fn determinant_criterion(b: &SchurSequence, l: &HermitianLaurent, n: usize, threshold: f64) -> Result<usize> {
    let prof = determinant_profile(b, l, n)?;
    Ok(prof.iter().position(|&d| d <= threshold).unwrap_or(n + 2))
}

/// Degree one criterion: first `m` in `1 ..= n + 1` with
/// `K_m(zeta_1, 1/conj(zeta_2)) = 0`, or `n + 2`.
pub fn kernel_criterion_r1(
    b: &SchurSequence,
    zeta1: C64,
    zeta2: C64,
    n: usize,
    tol: Tolerance,
) -> Result<usize> {
    if b.len() < n + 1 {
        return Err(Error::TooShort { needed: n + 1, have: b.len() });
    }
    if zeta2.norm() == 0.0 {
        return Err(Error::Pole("zeta_2 = 0".into()));
    }
    let w = C64::new(1.0, 0.0) / zeta2.conj();
    let terms = cd_kernel_terms(b, n + 1, zeta1, w)?;
    let mut sum = terms[0];
    let mut scale = terms[0].norm();
    for (m, t) in terms.iter().enumerate().skip(1) {
        sum += t;
        scale += t.norm();
        if tol.negligible(sum.norm(), scale) {
            return Ok(m);
        }
    }
    Ok(n + 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    #[test]
    fn roots_of_simple_a() {
        // A = (z + 1/2)(z + 2) = z^2 + 5/2 z + 1
        let l = HermitianLaurent::from_alpha_beta(c(1.0, 0.0), 1.25).unwrap();
        let mut rd = roots_of_a(&l).unwrap();
        rd.roots.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((rd.roots[0] - c(-2.0, 0.0)).norm() < 1e-12);
        assert!((rd.roots[1] - c(-0.5, 0.0)).norm() < 1e-12);
        assert_eq!(rd.derivative_orders, vec![0, 0]);
    }

    #[test]
    fn double_root_gets_derivative_order() {
        // A = (z + 1)^2
        let l = HermitianLaurent::from_alpha_beta(c(1.0, 0.0), 1.0).unwrap();
        let rd = roots_of_a(&l).unwrap();
        assert_eq!(rd.derivative_orders, vec![0, 1]);
        assert!((rd.roots[0] + 1.0).norm() < 1e-12);
    }

    #[test]
    fn lebesgue_with_vanishing_mean() {
        // P = i z, A = i (z^2 - 1), v[L] = 0 for the Lebesgue functional.
        let l = HermitianLaurent::from_p(&ComplexPoly::new(vec![c(0.0, 0.0), c(0.0, 1.0)]), Tolerance::DEFAULT).unwrap();
        let b = SchurSequence::new(vec![c(0.0, 0.0); 4]);
        assert_eq!(kernel_criterion_r1(&b, c(1.0, 0.0), c(-1.0, 0.0), 2, Tolerance::DEFAULT).unwrap(), 1);
        assert_eq!(determinant_criterion(&b, &l, 2, DETERMINANT_THRESHOLD).unwrap(), 1);
    }

    #[test]
    fn generic_lebesgue_perturbation_is_quasi_definite() {
        let l = HermitianLaurent::from_alpha_beta(c(1.0, 0.0), 1.25).unwrap();
        let b = SchurSequence::new(vec![c(0.0, 0.0); 6]);
        assert_eq!(determinant_criterion(&b, &l, 4, DETERMINANT_THRESHOLD).unwrap(), 6);
        assert_eq!(kernel_criterion_r1(&b, c(-0.5, 0.0), c(-2.0, 0.0), 4, Tolerance::DEFAULT).unwrap(), 6);
    }
}
