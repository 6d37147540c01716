//! Finite-dimensional quantitative quantum de Finetti theorem.
//!
//! States of `N` bosons in `ℂ^d` are matrices over the occupation basis
//! `|n⟩ = Π (a†_i)^{n_i}/√(n_i!) |0⟩`, `Σ n_i = N`, listed in lexicographic
//! order. In this basis `u^{⊗N} = Σ_n √(N!/n!) u^n |n⟩`.
//!
//! Conventions used throughout:
//!
//! * `γ^{(k)}` is the partial trace of `Γ` over `N − k` particles, with trace 1.
//! * `γ^{(ℓ)} ⊗_s 𝟙_{k−ℓ}` is `C(k, ℓ) P_s (γ^{(ℓ)} ⊗ 𝟙) P_s` restricted to the
//!   symmetric subspace, i.e. the sum over the `C(k, ℓ)` placements of the
//!   `ℓ` particles. This is the normalization for which
//!   `γ̃^{(k)} = C(N+k+d−1, k)^{-1} Σ_ℓ C(N, ℓ) γ^{(ℓ)} ⊗_s 𝟙_{k−ℓ}` holds;
//!   the sphere quadrature confirms it.
//! * `du` is the uniform probability measure on the unit sphere of `ℂ^d`.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::numerics::quadrature::gauss_legendre;
use crate::numerics::rng::stream_rng;
use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// `dim Sym^N(ℂ^d) = C(N+d−1, d−1)`.
pub fn sym_dim(n: usize, d: usize) -> Result<usize> {
    if d == 0 {
        return Err(Error::domain("one-body dimension must be ≥ 1"));
    }
    let mut acc: u128 = 1;
    for i in 1..d as u128 {
        acc = acc
            .checked_mul(n as u128 + i)
            .ok_or_else(|| Error::domain(format!("dim Sym^{n}(C^{d}) overflows")))?
            / i;
    }
    usize::try_from(acc).map_err(|_| Error::domain(format!("dim Sym^{n}(C^{d}) overflows")))
}

fn binom(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// Occupation vectors of `n` particles in `d` modes, lexicographically.
pub fn occupations(n: usize, d: usize) -> Vec<Vec<u32>> {
    fn rec(left: u32, slots: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=left {
            prefix.push(first);
            rec(left - first, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n as u32, d, &mut Vec::with_capacity(d), &mut out);
    out
}

/// Occupation basis with a reverse index.
#[derive(Debug, Clone)]
struct Basis {
    occ: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl Basis {
    fn new(n: usize, d: usize) -> Self {
        let occ = occupations(n, d);
        let index = occ.iter().enumerate().map(|(i, o)| (o.clone(), i)).collect();
        Self { occ, index }
    }

    fn of(&self, a: &[u32], b: &[u32]) -> usize {
        let v: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.index[&v]
    }
}

/// `Π_i √(C(a_i, c_i) C(a'_i, c_i))`.
fn embedding_weight(a: &[u32], a2: &[u32], c: &[u32]) -> f64 {
    a.iter().zip(a2).zip(c).map(|((&x, &y), &z)| (binom(x, z) * binom(y, z)).sqrt()).product()
}

/// Coefficients of `u^{⊗N}` in the occupation basis.
pub fn product_vector(n: usize, u: &[Complex64]) -> Vec<Complex64> {
    let nf = factorial(n as u32);
    occupations(n, u.len())
        .iter()
        .map(|o| {
            let norm = (nf / o.iter().map(|&k| factorial(k)).product::<f64>()).sqrt();
            o.iter().zip(u).fold(Complex64::new(norm, 0.0), |acc, (&k, &ui)| acc * ui.powu(k))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricState {
    pub n: usize,
    pub d: usize,
    pub matrix: CMatrix,
}

impl SymmetricState {
    /// Checks Hermiticity, positivity and unit trace to 1e-12.
    pub fn new(n: usize, d: usize, matrix: CMatrix) -> Result<Self> {
        let dim = sym_dim(n, d)?;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::invalid(format!("expected a {dim}×{dim} matrix, got {}×{}", matrix.nrows(), matrix.ncols())));
        }
        let herm = (&matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > 1e-12 {
            return Err(Error::invalid(format!("state is not Hermitian (defect {herm:.2e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::invalid(format!("state has trace {tr}")));
        }
        let min_eig = matrix.clone().symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < -1e-12 {
            return Err(Error::invalid(format!("state has eigenvalue {min_eig:.3e} < 0")));
        }
        Ok(Self { n, d, matrix })
    }

    /// `|u^{⊗N}⟩⟨u^{⊗N}|` for a unit vector `u`.
    pub fn product(n: usize, u: &[Complex64]) -> Result<Self> {
        let norm: f64 = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::domain("product state needs a non-zero vector"));
        }
        let u: Vec<Complex64> = u.iter().map(|z| z / norm).collect();
        let v = nalgebra::DVector::from_vec(product_vector(n, &u));
        let m = &v * v.adjoint();
        Self::new(n, u.len(), hermitize(m))
    }

    /// `G G†/Tr(G G†)` with `G` a complex Ginibre matrix (Hilbert-Schmidt measure).
    pub fn random_mixed(n: usize, d: usize, seed: u64) -> Result<Self> {
        let dim = sym_dim(n, d)?;
        let mut rng = stream_rng(seed, 0);
        let g = CMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
        });
        let m = &g * g.adjoint();
        let tr = m.trace().re;
        Self::new(n, d, hermitize(m / Complex64::new(tr, 0.0)))
    }

    /// Convex combination `t Γ_1 + (1 − t) Γ_2`.
    pub fn mix(&self, other: &Self, t: f64) -> Result<Self> {
        if self.n != other.n || self.d != other.d {
            return Err(Error::invalid("mixing states of different shapes"));
        }
        let m = &self.matrix * Complex64::new(t, 0.0) + &other.matrix * Complex64::new(1.0 - t, 0.0);
        Self::new(self.n, self.d, hermitize(m))
    }

    /// `U^{⊗N} Γ U^{†⊗N}`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        let big = sym_power(u, self.n);
        Self::new(self.n, self.d, hermitize(&big * &self.matrix * big.adjoint()))
    }
}

fn hermitize(m: CMatrix) -> CMatrix {
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Matrix of `U^{⊗N}` on the symmetric subspace: `a†_i ↦ Σ_j U_{ji} a†_j`.
pub fn sym_power(u: &CMatrix, n: usize) -> CMatrix {
    let d = u.nrows();
    let basis = Basis::new(n, d);
    let mut out = CMatrix::zeros(basis.occ.len(), basis.occ.len());
    for (col, o) in basis.occ.iter().enumerate() {
        // expand Π_i (Σ_j U_{ji} x_j)^{o_i} as a polynomial in x
        let mut poly: BTreeMap<Vec<u32>, Complex64> = BTreeMap::from([(vec![0; d], Complex64::new(1.0, 0.0))]);
        for (i, &oi) in o.iter().enumerate() {
            for _ in 0..oi {
                let mut next = BTreeMap::new();
                for (mono, c) in &poly {
                    for j in 0..d {
                        let mut m = mono.clone();
                        m[j] += 1;
                        *next.entry(m).or_insert(Complex64::new(0.0, 0.0)) += c * u[(j, i)];
                    }
                }
                poly = next;
            }
        }
        let denom: f64 = o.iter().map(|&k| factorial(k)).product::<f64>().sqrt();
        for (mono, c) in poly {
            let num: f64 = mono.iter().map(|&k| factorial(k)).product::<f64>().sqrt();
            out[(basis.index[&mono], col)] += c * (num / denom);
        }
    }
    out
}

/// `Tr_{N−k} Γ` on `Sym^k`, trace 1.
pub fn reduced_dm(g: &SymmetricState, k: usize) -> Result<SymmetricState> {
    if k > g.n {
        return Err(Error::domain(format!("cannot reduce {} particles to {k}", g.n)));
    }
    let big = Basis::new(g.n, g.d);
    let small = Basis::new(k, g.d);
    let mut out = CMatrix::zeros(small.occ.len(), small.occ.len());
    for l in occupations(g.n - k, g.d) {
        for (i, a) in small.occ.iter().enumerate() {
            let ni = big.of(a, &l);
            for (j, a2) in small.occ.iter().enumerate() {
                let nj = big.of(a2, &l);
                let n_occ = &big.occ[ni];
                let n2_occ = &big.occ[nj];
                out[(i, j)] += g.matrix[(ni, nj)] * embedding_weight(n_occ, n2_occ, &l);
            }
        }
    }
    out /= Complex64::new(binom(g.n as u32, k as u32), 0.0);
    SymmetricState::new(k, g.d, hermitize(out))
}

/// `γ ⊗_s 𝟙_{k−ℓ}` for `γ` on `Sym^ℓ`, with the placement-sum normalization.
pub fn sym_tensor_identity(gamma: &CMatrix, ell: usize, k: usize, d: usize) -> CMatrix {
    let small = Basis::new(ell, d);
    let big = Basis::new(k, d);
    let mut out = CMatrix::zeros(big.occ.len(), big.occ.len());
    for c in occupations(k - ell, d) {
        for (i, b) in small.occ.iter().enumerate() {
            let ai = big.of(b, &c);
            for (j, b2) in small.occ.iter().enumerate() {
                let aj = big.of(b2, &c);
                out[(ai, aj)] += gamma[(i, j)] * embedding_weight(&big.occ[ai], &big.occ[aj], &c);
            }
        }
    }
    out
}

/// Product rule on the unit sphere of `ℂ^d`, exact for `Σ c_{αβ} u^α ū^β`
/// with `|α| = |β| ≤ degree`. Writes `u_i = √s_i e^{iφ_i}` with `s` uniform
/// on the simplex (collapsed Gauss-Legendre) and `φ_1 = 0`, which is exact for
/// integrands invariant under a global phase.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    pub d: usize,
    pub degree: usize,
    pub nodes: Vec<Vec<Complex64>>,
    pub weights: Vec<f64>,
}

impl SphereQuadrature {
    pub fn exact(d: usize, degree: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::domain("one-body dimension must be ≥ 1"));
        }
        // simplex coordinates s_i = t_i Π_{j<i}(1 − t_j); Jacobian Π (1−t_i)^{d−2−i}
        let gl_n = degree + d;
        let (gx, gw) = gauss_legendre(gl_n, 0.0, 1.0);
        let mut simplex: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), 1.0)];
        for i in 0..d.saturating_sub(1) {
            let mut next = Vec::with_capacity(simplex.len() * gl_n);
            for (s, w) in &simplex {
                let rest = 1.0 - s.iter().sum::<f64>();
                for (t, wt) in gx.iter().zip(&gw) {
                    let mut s2 = s.clone();
                    s2.push(rest * t);
                    next.push((s2, w * wt * (1.0 - t).powi((d - 2 - i) as i32)));
                }
            }
            simplex = next;
        }
        let mut norm = 0.0;
        for (s, w) in &mut simplex {
            s.push((1.0 - s.iter().sum::<f64>()).max(0.0));
            norm += *w;
        }
        let m = degree + 1;
        let phases = m.pow(d as u32 - 1);
        let mut nodes = Vec::with_capacity(simplex.len() * phases);
        let mut weights = Vec::with_capacity(simplex.len() * phases);
        for (s, w) in &simplex {
            for p in 0..phases {
                let node: Vec<Complex64> = (0..d)
                    .map(|i| {
                        let phi = if i == 0 { 0.0 } else { 2.0 * PI * ((p / m.pow(i as u32 - 1)) % m) as f64 / m as f64 };
                        Complex64::from_polar(s[i].sqrt(), phi)
                    })
                    .collect();
                nodes.push(node);
                weights.push(w / (norm * phases as f64));
            }
        }
        Ok(Self { d, degree, nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// The lower symbol `dμ_N(u) = dim Sym^N ⟨u^{⊗N}, Γ u^{⊗N}⟩ du`.
#[derive(Debug, Clone)]
pub struct DeFinettiMeasure {
    pub state: SymmetricState,
    pub dim: usize,
    pub quadrature: SphereQuadrature,
    /// Density at each quadrature node.
    pub node_density: Vec<f64>,
}

impl DeFinettiMeasure {
    pub fn density(&self, u: &[Complex64]) -> f64 {
        lower_symbol_density(&self.state, self.dim, u)
    }

    pub fn mass(&self) -> f64 {
        self.node_density.iter().zip(&self.quadrature.weights).map(|(f, w)| f * w).sum()
    }

    /// `∫ |u^{⊗k}⟩⟨u^{⊗k}| dμ_N` by quadrature.
    pub fn moment(&self, k: usize) -> Result<CMatrix> {
        if self.state.n + k > self.quadrature.degree {
            return Err(Error::domain(format!(
                "quadrature of degree {} cannot integrate moments of order {k} against Sym^{}",
                self.quadrature.degree, self.state.n
            )));
        }
        let dim = sym_dim(k, self.state.d)?;
        let mut out = CMatrix::zeros(dim, dim);
        for ((u, f), w) in self.quadrature.nodes.iter().zip(&self.node_density).zip(&self.quadrature.weights) {
            let v = nalgebra::DVector::from_vec(product_vector(k, u));
            out += (&v * v.adjoint()) * Complex64::new(f * w, 0.0);
        }
        Ok(out)
    }
}

fn lower_symbol_density(g: &SymmetricState, dim: usize, u: &[Complex64]) -> f64 {
    let v = nalgebra::DVector::from_vec(product_vector(g.n, u));
    dim as f64 * (v.adjoint() * &g.matrix * &v)[(0, 0)].re
}

/// Lower symbol of `Γ` on the given quadrature; errors if the quadrature
/// mass misses 1 by more than 1e-6.
pub fn lower_symbol(g: &SymmetricState, quad: &SphereQuadrature) -> Result<DeFinettiMeasure> {
    if quad.d != g.d {
        return Err(Error::invalid("quadrature and state have different one-body dimensions"));
    }
    let dim = sym_dim(g.n, g.d)?;
    let node_density = quad.nodes.iter().map(|u| lower_symbol_density(g, dim, u)).collect();
    let mu = DeFinettiMeasure { state: g.clone(), dim, quadrature: quad.clone(), node_density };
    let mass = mu.mass();
    if (mass - 1.0).abs() > 1e-6 {
        return Err(Error::convergence(format!(
            "lower-symbol mass {mass} on {} nodes of degree {} (need ≥ {})",
            quad.len(),
            quad.degree,
            g.n
        )));
    }
    Ok(mu)
}

/// `γ̃^{(k)}` from the closed formula in the reduced density matrices of `Γ`.
pub fn ckmr_formula(g: &SymmetricState, k: usize) -> Result<CMatrix> {
    if k > g.n {
        return Err(Error::domain(format!("k = {k} exceeds N = {}", g.n)));
    }
    let dim = sym_dim(k, g.d)?;
    let mut out = CMatrix::zeros(dim, dim);
    for ell in 0..=k {
        let gamma = reduced_dm(g, ell)?.matrix;
        out += sym_tensor_identity(&gamma, ell, k, g.d) * Complex64::new(binom(g.n as u32, ell as u32), 0.0);
    }
    Ok(out / Complex64::new(binom((g.n + k + g.d - 1) as u32, k as u32), 0.0))
}

/// `γ̃^{(k)}`, checked against exact sphere quadrature of the lower symbol
/// to 1e-6 (Frobenius).
pub fn ckmr_moments(g: &SymmetricState, k: usize) -> Result<CMatrix> {
    let formula = ckmr_formula(g, k)?;
    let quad = SphereQuadrature::exact(g.d, g.n + k)?;
    let direct = lower_symbol(g, &quad)?.moment(k)?;
    let gap = (&formula - &direct).norm();
    if gap > 1e-6 {
        return Err(Error::Consistency(format!("moment formula and quadrature differ by {gap:.3e}: {formula} vs {direct}")));
    }
    Ok(formula)
}

/// `Σ |λ_i|` over the eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &CMatrix) -> f64 {
    hermitize(m.clone()).symmetric_eigenvalues().iter().map(|x| x.abs()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeFinettiError {
    pub trace_distance: f64,
    pub bound: f64,
}

/// `‖γ^{(k)} − γ̃^{(k)}‖₁` and the bound `2k(d+2k)/N`; a violated bound is
/// an error.
pub fn definetti_error(g: &SymmetricState, k: usize) -> Result<DeFinettiError> {
    if k == 0 || k > g.n {
        return Err(Error::domain(format!("need 1 ≤ k ≤ N, got k = {k}, N = {}", g.n)));
    }
    let gamma = reduced_dm(g, k)?.matrix;
    let tilde = ckmr_moments(g, k)?;
    let trace_distance = trace_norm(&(gamma - tilde));
    let bound = 2.0 * k as f64 * (g.d + 2 * k) as f64 / g.n as f64;
    if trace_distance > bound {
        return Err(Error::Consistency(format!("trace distance {trace_distance} exceeds the bound {bound}")));
    }
    Ok(DeFinettiError { trace_distance, bound })
}
