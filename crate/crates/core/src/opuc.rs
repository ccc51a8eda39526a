//! Monic orthogonal polynomials on the unit circle for quasi-definite
//! hermitian functionals: the Szegő recurrence, transfer matrices and the
//! passage between Schur parameters and moments.

use serde::Serialize;

use crate::algebra::{ComplexPoly, HermitianLaurent, PolyMatrix2};
use crate::linalg::{self, Matrix};
use crate::{Error, Result, Tolerance, C64};

/// Schur parameters `b_1, b_2, ...` together with `eps_0 = v[1]`.
///
/// `params[0]` holds `b_1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchurSequence {
    params: Vec<C64>,
    eps0: f64,
}

impl SchurSequence {
    pub fn new(params: Vec<C64>) -> Self {
        Self { params, eps0: 1.0 }
    }

    pub fn with_eps0(params: Vec<C64>, eps0: f64) -> Self {
        Self { params, eps0 }
    }

    pub fn params(&self) -> &[C64] {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    /// `b_j` for `j >= 1`.
    pub fn get(&self, j: usize) -> C64 {
        self.params[j - 1]
    }

    pub fn prefix(&self, n: usize) -> Self {
        Self { params: self.params[..n].to_vec(), eps0: self.eps0 }
    }

    /// `eps_0, ..., eps_n` from `eps_j = eps_{j-1} (1 - |b_j|^2)`.
    pub fn epsilons(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.params.len() + 1);
        out.push(self.eps0);
        for b in &self.params {
            let last = *out.last().unwrap();
            out.push(last * (1.0 - b.norm_sqr()));
        }
        out
    }

    /// First index `j` with `|b_j| = 1` within `tol`.
    pub fn first_unimodular(&self, tol: Tolerance) -> Option<usize> {
        self.params
            .iter()
            .position(|b| tol.negligible(1.0 - b.norm_sqr(), 1.0))
            .map(|i| i + 1)
    }
}

/// `psi_n` and its reversal `psi_n^*`.
#[derive(Debug, Clone, PartialEq)]
pub struct MopPair {
    pub psi: ComplexPoly,
    pub psi_star: ComplexPoly,
    pub degree: usize,
}

impl MopPair {
    pub fn unit() -> Self {
        Self { psi: ComplexPoly::one(), psi_star: ComplexPoly::one(), degree: 0 }
    }

    /// One forward step with parameter `b`.
    pub fn advance(&self, b: C64) -> Self {
        let zpsi = self.psi.shift(1);
        Self {
            psi: &zpsi + &self.psi_star.scale(b),
            psi_star: &zpsi.scale(b.conj()) + &self.psi_star,
            degree: self.degree + 1,
        }
    }

    pub fn as_vector(&self) -> [ComplexPoly; 2] {
        [self.psi.clone(), self.psi_star.clone()]
    }
}

/// The MOP family `psi_0, ..., psi_n` with its norms.
#[derive(Debug, Clone, PartialEq)]
pub struct MopFamily {
    pub pairs: Vec<MopPair>,
    pub eps: Vec<f64>,
}

impl MopFamily {
    pub fn psi(&self, n: usize) -> &ComplexPoly {
        &self.pairs[n].psi
    }

    pub fn psi_star(&self, n: usize) -> &ComplexPoly {
        &self.pairs[n].psi_star
    }
}

/// Runs the Szegő recurrence over all of `b`.
pub fn szego_forward(b: &SchurSequence) -> MopFamily {
    let mut pairs = vec![MopPair::unit()];
    for &bj in b.params() {
        let next = pairs.last().unwrap().advance(bj);
        pairs.push(next);
    }
    MopFamily { pairs, eps: b.epsilons() }
}

/// `psi_n` alone, without keeping the intermediate pairs.
pub fn mop(b: &[C64]) -> MopPair {
    b.iter().fold(MopPair::unit(), |p, &bj| p.advance(bj))
}

/// Recovers the Schur parameters from a monic `psi_n` by running the
/// recurrence backwards.
pub fn schur_from_mop(psi: &ComplexPoly) -> Result<SchurSequence> {
    let n = psi.nominal_degree();
    if n < 0 {
        return Err(Error::ZeroPolynomial);
    }
    let mut cur = psi.clone();
    let mut out = vec![C64::new(0.0, 0.0); n as usize];
    for k in (1..=n as usize).rev() {
        let b = cur.coeff(0);
        let s = 1.0 - b.norm_sqr();
        if s == 0.0 {
            return Err(Error::UnitModulus { index: k });
        }
        out[k - 1] = b;
        let star = cur.reverse(k)?;
        let num = &cur - &star.scale(b);
        let q = ComplexPoly::new(num.coeffs().iter().skip(1).take(k).copied().collect());
        cur = q.scale(C64::new(1.0 / s, 0.0));
    }
    Ok(SchurSequence::new(out))
}

/// Transfer matrix `[[z, b], [z conj(b), 1]]` mapping `(psi, psi*)` at one
/// degree to the next.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub b: C64,
}

impl TransferMatrix {
    pub fn to_matrix(&self) -> PolyMatrix2 {
        let z = ComplexPoly::monomial(1);
        PolyMatrix2::new(
            z.clone(),
            ComplexPoly::constant(self.b),
            z.scale(self.b.conj()),
            ComplexPoly::one(),
        )
    }

    pub fn apply(&self, v: &[ComplexPoly; 2]) -> [ComplexPoly; 2] {
        self.to_matrix().apply(v)
    }
}

/// Moments `m_0, m_1, ...` of a hermitian functional; `m_{-k} = conj(m_k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct MomentSequence {
    moments: Vec<C64>,
}

impl MomentSequence {
    pub fn new(moments: Vec<C64>) -> Self {
        Self { moments }
    }

    pub fn len(&self) -> usize {
        self.moments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moments.is_empty()
    }

    pub fn values(&self) -> &[C64] {
        &self.moments
    }

    /// `m_k` for any `|k| < len`.
    pub fn get(&self, k: isize) -> C64 {
        if k >= 0 {
            self.moments[k as usize]
        } else {
            self.moments[(-k) as usize].conj()
        }
    }

    /// `v[f_* g]` for polynomials inside the moment window.
    pub fn pairing(&self, f: &ComplexPoly, g: &ComplexPoly) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for (p, fp) in f.coeffs().iter().enumerate() {
            for (q, gq) in g.coeffs().iter().enumerate() {
                s += fp.conj() * gq * self.get(q as isize - p as isize);
            }
        }
        s
    }

    /// `v[z^-k p]`.
    pub fn apply_shifted(&self, p: &ComplexPoly, k: usize) -> C64 {
        p.coeffs()
            .iter()
            .enumerate()
            .map(|(j, c)| c * self.get(j as isize - k as isize))
            .sum()
    }
}

/// Moments `m_0 .. m_n` of the functional with Schur parameters `b_1 .. b_n`,
/// from `v[psi_j] = 0` for `j >= 1` and `m_0 = eps_0`.
pub fn schur_to_moments(b: &SchurSequence) -> MomentSequence {
    let fam = szego_forward(b);
    let mut m = vec![C64::new(b.eps0(), 0.0)];
    for j in 1..=b.len() {
        let psi = fam.psi(j);
        let s = linalg::cdot2((0..j).map(|k| (psi.coeff(k), m[k])));
        m.push(-s);
    }
    MomentSequence::new(m)
}

/// Outcome of orthogonalizing against a moment sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Orthogonalization {
    /// Schur parameters `psi_j(0)` for every `psi_j` that exists.
    pub schur: SchurSequence,
    /// `eps_j = v[psi_j z^-j]` for `j < mop_count`, plus the vanishing one if
    /// the run stopped.
    pub eps: Vec<f64>,
    /// Length of the MOP segment with nonzero norms.
    pub mop_count: usize,
    /// The functional stopped being quasi-definite inside the window.
    pub stopped: bool,
}

/// Orthogonalizes `1, z, ..., z^n` under `(f, g) = v[f_* g]` with no use of
/// the Szegő recurrence: each monic `psi_j` solves the Toeplitz system
/// `v[z^-k psi_j] = 0`, `k < j`, by pivoted elimination. A norm `eps_j` with
/// `|eps_j| <= tol |eps_{j-1}|` ends the run.
pub fn moments_to_schur(m: &MomentSequence, tol: Tolerance) -> Result<Orthogonalization> {
    if m.is_empty() {
        return Err(Error::TooShort { needed: 1, have: 0 });
    }
    let m0 = m.get(0);
    if !Tolerance(1e-14).negligible(m0.im, m0.norm()) {
        return Err(Error::NotHermitian("m_0 is not real".into()));
    }
    if m0.re == 0.0 {
        return Err(Error::Invalid("m_0 vanishes".into()));
    }
    let n = m.len() - 1;
    let mut eps = vec![m0.re];
    let mut params = Vec::new();
    let done = |params: Vec<C64>, eps: Vec<f64>, mop_count: usize, stopped: bool| Orthogonalization {
        schur: SchurSequence::with_eps0(params, m0.re),
        eps,
        mop_count,
        stopped,
    };
    for j in 1..=n {
        let mut t = Matrix::zeros(j);
        for k in 0..j {
            for i in 0..j {
                t.set(k, i, m.get(i as isize - k as isize));
            }
        }
        let rhs: Vec<C64> = (0..j).map(|k| -m.get((j - k) as isize)).collect();
        let mut psi = match linalg::solve_refined(&t, &rhs) {
            Ok(sol) => sol.x,
            // Only reachable when a previous norm was tiny but above `tol`.
            Err(Error::Singular { .. }) => return Ok(done(params, eps, j - 1, true)),
            Err(e) => return Err(e),
        };
        psi.push(C64::new(1.0, 0.0));
        params.push(psi[0]);
        let e: C64 = psi.iter().enumerate().map(|(i, c)| c * m.get(i as isize - j as isize)).sum();
        let prev = eps[j - 1];
        eps.push(e.re);
        if tol.negligible(e.re, prev) {
            return Ok(done(params, eps, j, true));
        }
    }
    Ok(done(params, eps, n + 1, false))
}

/// Moments `mu_0 .. mu_n` of `vL`; needs `m` through index `n + r`.
pub fn apply_laurent(m: &MomentSequence, l: &HermitianLaurent, n: usize) -> Result<MomentSequence> {
    let r = l.degree();
    if m.len() < n + r + 1 {
        return Err(Error::TooShort { needed: n + r + 1, have: m.len() });
    }
    let mu = (0..=n as isize)
        .map(|k| {
            (-(r as isize)..=r as isize)
                .map(|j| l.coefficient(j) * m.get(k + j))
                .sum()
        })
        .collect();
    Ok(MomentSequence::new(mu))
}

/// Christoffel–Darboux kernel `sum_{j<=n} psi_j(z) conj(psi_j(w)) / eps_j`.
pub fn cd_kernel(b: &SchurSequence, n: usize, z: C64, w: C64) -> Result<C64> {
    Ok(cd_kernel_terms(b, n, z, w)?.into_iter().sum())
}

/// Individual summands of the kernel, for scale-aware zero tests.
pub fn cd_kernel_terms(b: &SchurSequence, n: usize, z: C64, w: C64) -> Result<Vec<C64>> {
    if b.len() < n {
        return Err(Error::TooShort { needed: n, have: b.len() });
    }
    let eps = b.prefix(n).epsilons();
    let mut pair = MopPair::unit();
    let mut out = Vec::with_capacity(n + 1);
    for j in 0..=n {
        if j > 0 {
            pair = pair.advance(b.get(j));
        }
        if eps[j] == 0.0 {
            return Err(Error::UnitModulus { index: j });
        }
        out.push(pair.psi.eval(z) * pair.psi.eval(w).conj() / eps[j]);
    }
    Ok(out)
}

/// Closed form `(psi_n*(z) conj(psi_n*(w)) - z conj(w) psi_n(z) conj(psi_n(w))) / (eps_n (1 - z conj(w)))`.
pub fn cd_kernel_closed(b: &SchurSequence, n: usize, z: C64, w: C64) -> Result<C64> {
    if b.len() < n {
        return Err(Error::TooShort { needed: n, have: b.len() });
    }
    let zw = z * w.conj();
    let den = 1.0 - zw;
    if den.norm() == 0.0 {
        return Err(Error::Pole("z conj(w) = 1".into()));
    }
    let pair = mop(&b.params()[..n]);
    let eps = *b.prefix(n).epsilons().last().unwrap();
    let num = pair.psi_star.eval(z) * pair.psi_star.eval(w).conj() - zw * pair.psi.eval(z) * pair.psi.eval(w).conj();
    Ok(num / (den * eps))
}
