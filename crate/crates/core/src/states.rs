//! State families: Bell-diagonal and Bell-mixture two-qubit states, maximally
//! entangled states, the DiVincenzo two-parameter family, rotationally invariant
//! two-spin states built from total-angular-momentum projectors, and seeded random
//! (separable) states for property testing.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::matrix::{
    c, commutator_fro, hermitian_eig, partial_trace, pauli, trace_product, ComplexMatrix,
    DimSpec, MatrixJson,
};
use crate::{Error, Result};

/// Which subsystem of a bipartite state an operation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::A => 0,
            Side::B => 1,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Side> {
        match s.trim() {
            "A" | "a" => Ok(Side::A),
            "B" | "b" => Ok(Side::B),
            other => Err(Error::Param(format!("side must be A or B, got {other:?}"))),
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::A => write!(f, "A"),
            Side::B => write!(f, "B"),
        }
    }
}

pub const STATE_TOL: f64 = 1e-10;

/// A validated mixed state: Hermitian, unit trace, positive semidefinite
/// (each to within [`STATE_TOL`]), with known tensor-factor structure.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    dims: DimSpec,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix, dims: DimSpec) -> Result<Self> {
        if !mat.is_square() || mat.rows() != dims.total() {
            return Err(Error::Dim(format!(
                "{}x{} matrix does not fit dims {dims}",
                mat.rows(),
                mat.cols()
            )));
        }
        let herm = mat.herm_deviation();
        if herm > STATE_TOL {
            return Err(Error::State(format!(
                "not Hermitian: deviation {herm:.3e}"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::State(format!("trace {tr} is not 1")));
        }
        let lo = crate::matrix::min_eig(&mat)?;
        if lo < -STATE_TOL {
            return Err(Error::State(format!("negative eigenvalue {lo:.3e}")));
        }
        Ok(DensityMatrix { mat, dims })
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dims(&self) -> &DimSpec {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.total()
    }

    /// (dA, dB) of a two-factor state.
    pub fn bipartite_dims(&self) -> Result<(usize, usize)> {
        if self.dims.num_factors() != 2 {
            return Err(Error::Dim(format!(
                "expected a bipartite state, dims are {}",
                self.dims
            )));
        }
        Ok((self.dims.factor(0), self.dims.factor(1)))
    }

    /// Reduced state on one side of a bipartite split.
    pub fn marginal(&self, side: Side) -> Result<ComplexMatrix> {
        self.bipartite_dims()?;
        partial_trace(&self.mat, &self.dims, side.index())
    }

    /// Reduced state on factor `i` of a general split.
    pub fn reduced(&self, i: usize) -> Result<ComplexMatrix> {
        partial_trace(&self.mat, &self.dims, i)
    }

    pub fn purity(&self) -> f64 {
        trace_product(&self.mat, &self.mat).re
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eig(&self.mat)?.values)
    }

    pub fn to_json(&self) -> StateJson {
        let m = MatrixJson::from_matrix(&self.mat);
        StateJson {
            dims: self.dims.factors().to_vec(),
            re: m.re,
            im: m.im,
        }
    }

    pub fn from_json(j: &StateJson) -> Result<Self> {
        let dims = DimSpec::new(j.dims.clone())?;
        let mat = MatrixJson {
            re: j.re.clone(),
            im: j.im.clone(),
        }
        .to_matrix()?;
        DensityMatrix::new(mat, dims)
    }
}

/// On-disk form of a state: factor dimensions plus row-major real/imaginary grids.
/// Round-trips exactly at double precision.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateJson {
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// The four Bell states of two qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

pub const BELL_STATES: [Bell; 4] = [Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus, Bell::PsiMinus];

impl Bell {
    /// Correlation signature (⟨σ1⊗σ1⟩, ⟨σ2⊗σ2⟩, ⟨σ3⊗σ3⟩) of the state.
    pub fn signature(self) -> [f64; 3] {
        match self {
            Bell::PhiPlus => [1.0, -1.0, 1.0],
            Bell::PhiMinus => [-1.0, 1.0, 1.0],
            Bell::PsiPlus => [1.0, 1.0, -1.0],
            Bell::PsiMinus => [-1.0, -1.0, -1.0],
        }
    }

    /// Column vector in the computational basis |00⟩,|01⟩,|10⟩,|11⟩.
    pub fn vector(self) -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = ComplexMatrix::zeros(4, 1);
        match self {
            Bell::PhiPlus => {
                v[(0, 0)] = c(s, 0.0);
                v[(3, 0)] = c(s, 0.0);
            }
            Bell::PhiMinus => {
                v[(0, 0)] = c(s, 0.0);
                v[(3, 0)] = c(-s, 0.0);
            }
            Bell::PsiPlus => {
                v[(1, 0)] = c(s, 0.0);
                v[(2, 0)] = c(s, 0.0);
            }
            Bell::PsiMinus => {
                v[(1, 0)] = c(s, 0.0);
                v[(2, 0)] = c(-s, 0.0);
            }
        }
        v
    }

    pub fn projector(self) -> ComplexMatrix {
        let v = self.vector();
        &v * &v.dagger()
    }
}

const PARAM_TOL: f64 = 1e-12;

/// Bell-diagonal two-qubit state ρ = (1/4)(I + Σᵢ tᵢ σᵢ⊗σᵢ).
///
/// Valid iff (t1,t2,t3) lies in the tetrahedron spanned by the four Bell-state
/// correlation signatures; the mixture weight of each Bell state is (1 + t·sig)/4.
pub fn bell_diagonal(t1: f64, t2: f64, t3: f64) -> Result<DensityMatrix> {
    let t = [t1, t2, t3];
    for bell in BELL_STATES {
        let sig = bell.signature();
        let w = (1.0 + t[0] * sig[0] + t[1] * sig[1] + t[2] * sig[2]) / 4.0;
        if w < -PARAM_TOL {
            return Err(Error::Param(format!(
                "({t1}, {t2}, {t3}) lies outside the Bell tetrahedron"
            )));
        }
    }
    let mut m = ComplexMatrix::identity(4);
    for (i, ti) in t.iter().enumerate() {
        let s = pauli(i + 1);
        m = m.add_scaled(&s.kron(&s), c(*ti, 0.0));
    }
    DensityMatrix::new(m.scaled_re(0.25), DimSpec::bipartite(2, 2))
}

/// Convex Bell mixture p·ψ₊ + q·ψ₋ + r·φ₊ + (1−p−q−r)·φ₋.
pub fn bell_mixture(p: f64, q: f64, r: f64) -> Result<DensityMatrix> {
    let s = 1.0 - p - q - r;
    for (name, w) in [("p", p), ("q", q), ("r", r), ("1-p-q-r", s)] {
        if w < -PARAM_TOL {
            return Err(Error::Param(format!("weight {name} = {w} is negative")));
        }
    }
    let m = Bell::PsiPlus
        .projector()
        .scaled_re(p)
        .add_scaled(&Bell::PsiMinus.projector(), c(q, 0.0))
        .add_scaled(&Bell::PhiPlus.projector(), c(r, 0.0))
        .add_scaled(&Bell::PhiMinus.projector(), c(s, 0.0));
    DensityMatrix::new(m, DimSpec::bipartite(2, 2))
}

/// Maximally entangled state P₊ = (1/d)Σᵢⱼ|ii⟩⟨jj| on d⊗d.
pub fn max_entangled(d: usize) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::Param(format!("local dimension {d} < 2")));
    }
    let n = d * d;
    let mut m = ComplexMatrix::zeros(n, n);
    let w = 1.0 / d as f64;
    for i in 0..d {
        for j in 0..d {
            m[(i * d + i, j * d + j)] = c(w, 0.0);
        }
    }
    DensityMatrix::new(m, DimSpec::bipartite(d, d))
}

/// Two-qubit singlet |ψ₋⟩⟨ψ₋|.
pub fn singlet() -> DensityMatrix {
    DensityMatrix::new(Bell::PsiMinus.projector(), DimSpec::bipartite(2, 2)).expect("valid state")
}

/// Two-parameter family a(|00⟩⟨00| + |11⟩⟨11|) + b·ψ₋ + c·ψ₊ with a = (1−b−c)/2.
/// Both marginals are maximally mixed for every valid (b, c).
pub fn divincenzo(b: f64, cc: f64) -> Result<DensityMatrix> {
    let a = (1.0 - b - cc) / 2.0;
    if b < -PARAM_TOL || cc < -PARAM_TOL || a < -PARAM_TOL {
        return Err(Error::Param(format!(
            "(b, c) = ({b}, {cc}) leaves no valid diagonal weight"
        )));
    }
    let mut diag = ComplexMatrix::zeros(4, 4);
    diag[(0, 0)] = c(a, 0.0);
    diag[(3, 3)] = c(a, 0.0);
    let m = diag
        .add_scaled(&Bell::PsiMinus.projector(), c(b, 0.0))
        .add_scaled(&Bell::PsiPlus.projector(), c(cc, 0.0));
    DensityMatrix::new(m, DimSpec::bipartite(2, 2))
}

// ---------------------------------------------------------------------------
// Angular momentum
// ---------------------------------------------------------------------------

/// f64 factorial; exact for small n, adequate relative accuracy throughout.
fn fact(n: i64) -> f64 {
    debug_assert!(n >= 0);
    (1..=n).map(|k| k as f64).product()
}

/// Convert a half-integer to doubled-integer form, rejecting anything else.
fn doubled(x: f64, what: &str) -> Result<i64> {
    let t = 2.0 * x;
    let r = t.round();
    if (t - r).abs() > 1e-9 || r.abs() > 1e6 {
        return Err(Error::Param(format!("{what} = {x} is not a half-integer")));
    }
    Ok(r as i64)
}

/// Clebsch–Gordan coefficient ⟨j1 m1; j2 m2 | J M⟩ in the Condon–Shortley
/// convention (all coefficients real, ⟨j1 j1; j2 J−j1|J J⟩ > 0).
///
/// Returns 0 when M ≠ m1 + m2 or |M| > J; errors on non-half-integer inputs,
/// |m| > j, or a triangle-rule violation.
pub fn clebsch_gordan(j1: f64, m1: f64, j2: f64, m2: f64, j: f64, m: f64) -> Result<f64> {
    let tj1 = doubled(j1, "j1")?;
    let tm1 = doubled(m1, "m1")?;
    let tj2 = doubled(j2, "j2")?;
    let tm2 = doubled(m2, "m2")?;
    let tj = doubled(j, "J")?;
    let tm = doubled(m, "M")?;

    for (tjx, tmx, name) in [(tj1, tm1, "m1"), (tj2, tm2, "m2"), (tj, tm, "M")] {
        if tjx < 0 {
            return Err(Error::Param(format!("negative angular momentum")));
        }
        if (tjx + tmx) % 2 != 0 {
            return Err(Error::Param(format!(
                "{name} is not compatible with its angular momentum"
            )));
        }
    }
    if tm1.abs() > tj1 || tm2.abs() > tj2 {
        return Err(Error::Param("projection exceeds angular momentum".into()));
    }
    if tj < (tj1 - tj2).abs() || tj > tj1 + tj2 || (tj1 + tj2 + tj) % 2 != 0 {
        return Err(Error::Param(format!(
            "J = {j} violates the triangle rule for {j1} and {j2}"
        )));
    }
    if tm != tm1 + tm2 || tm.abs() > tj {
        return Ok(0.0);
    }

    let g1 = (tj1 + tj2 - tj) / 2;
    let g2 = (tj1 - tj2 + tj) / 2;
    let g3 = (-tj1 + tj2 + tj) / 2;
    let g4 = (tj1 + tj2 + tj) / 2 + 1;
    let a1 = (tj1 + tm1) / 2;
    let a2 = (tj1 - tm1) / 2;
    let b1 = (tj2 + tm2) / 2;
    let b2 = (tj2 - tm2) / 2;
    let c1 = (tj + tm) / 2;
    let c2 = (tj - tm) / 2;

    let pref = ((tj as f64 + 1.0) * fact(g1) * fact(g2) * fact(g3) / fact(g4)
        * fact(a1)
        * fact(a2)
        * fact(b1)
        * fact(b2)
        * fact(c1)
        * fact(c2))
    .sqrt();

    let kmin = 0.max((tj2 - tj - tm1) / 2).max((tj1 - tj + tm2) / 2);
    let kmax = g1.min(a2).min(b1);
    let mut sum = 0.0;
    for k in kmin..=kmax {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let denom = fact(k)
            * fact(g1 - k)
            * fact(a2 - k)
            * fact(b1 - k)
            * fact((tj - tj2 + tm1) / 2 + k)
            * fact((tj - tj1 - tm2) / 2 + k);
        sum += sign / denom;
    }
    Ok(pref * sum)
}

/// Product-basis index for |j1 m1⟩⊗|j2 m2⟩ with m descending within each factor.
fn am_index(tj1: i64, tm1: i64, tj2: i64, tm2: i64) -> usize {
    let i1 = ((tj1 - tm1) / 2) as usize;
    let i2 = ((tj2 - tm2) / 2) as usize;
    i1 * ((tj2 + 1) as usize) + i2
}

/// Unnormalized projector Σ_M |J M⟩⟨J M| onto the total-angular-momentum-J
/// eigenspace of j1 ⊗ j2. Idempotent, rank 2J+1.
pub fn total_spin_projector(j1: f64, j2: f64, j: f64) -> Result<ComplexMatrix> {
    let tj1 = doubled(j1, "j1")?;
    let tj2 = doubled(j2, "j2")?;
    let tj = doubled(j, "J")?;
    if tj < (tj1 - tj2).abs() || tj > tj1 + tj2 || (tj1 + tj2 + tj) % 2 != 0 {
        return Err(Error::Param(format!(
            "J = {j} violates the triangle rule for {j1} and {j2}"
        )));
    }
    let n = ((tj1 + 1) * (tj2 + 1)) as usize;
    let mut p = ComplexMatrix::zeros(n, n);
    let mut tm = -tj;
    while tm <= tj {
        // |J M⟩ as a vector over the product basis
        let mut v = vec![0.0f64; n];
        let mut tm1 = -tj1;
        while tm1 <= tj1 {
            let tm2 = tm - tm1;
            if tm2.abs() <= tj2 {
                let cg = clebsch_gordan(
                    j1,
                    tm1 as f64 / 2.0,
                    j2,
                    tm2 as f64 / 2.0,
                    j,
                    tm as f64 / 2.0,
                )?;
                v[am_index(tj1, tm1, tj2, tm2)] = cg;
            }
            tm1 += 2;
        }
        for (r, &vr) in v.iter().enumerate() {
            if vr == 0.0 {
                continue;
            }
            for (cidx, &vc) in v.iter().enumerate() {
                p[(r, cidx)] += c(vr * vc, 0.0);
            }
        }
        tm += 2;
    }
    Ok(p)
}

/// Total-angular-momentum projector scaled to unit trace: P_J / (2J+1).
pub fn angular_momentum_projector(j1: f64, j2: f64, j: f64) -> Result<ComplexMatrix> {
    let p = total_spin_projector(j1, j2, j)?;
    let tj = doubled(j, "J")?;
    Ok(p.scaled_re(1.0 / (tj as f64 + 1.0)))
}

/// Rotationally invariant state of two spin-3/2 systems (a 4⊗4 state):
/// ρ = p·P̂₀ + q·P̂₁ + r·P̂₂ + (1−p−q−r)·P̂₃ with unit-trace projectors P̂_J.
/// Both marginals are I/4 and ρ commutes with every total-spin rotation.
pub fn so3_invariant_4x4(p: f64, q: f64, r: f64) -> Result<DensityMatrix> {
    let s = 1.0 - p - q - r;
    for (name, w) in [("p", p), ("q", q), ("r", r), ("1-p-q-r", s)] {
        if w < -PARAM_TOL {
            return Err(Error::Param(format!("weight {name} = {w} is negative")));
        }
    }
    let mut m = ComplexMatrix::zeros(16, 16);
    for (j, w) in [(0.0, p), (1.0, q), (2.0, r), (3.0, s)] {
        m = m.add_scaled(&angular_momentum_projector(1.5, 1.5, j)?, c(w, 0.0));
    }
    DensityMatrix::new(m, DimSpec::bipartite(4, 4))
}

// ---------------------------------------------------------------------------
// Random states
// ---------------------------------------------------------------------------

fn gauss(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Full-rank random state GG†/Tr(GG†) with Gaussian entries in G.
pub fn random_density(dims: &DimSpec, rng: &mut impl Rng) -> DensityMatrix {
    let n = dims.total();
    let g = ComplexMatrix::from_fn(n, n, |_, _| c(gauss(rng), gauss(rng)));
    let gg = &g * &g.dagger();
    let m = gg.scaled_re(1.0 / gg.trace().re);
    DensityMatrix::new(m, dims.clone()).expect("Gram matrix is a valid state")
}

/// Dirichlet(1,…,1) weights on the simplex.
pub fn random_simplex_weights(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n)
        .map(|_| -(1.0 - rng.gen::<f64>()).ln())
        .collect();
    let total: f64 = w.iter().sum();
    for x in &mut w {
        *x /= total;
    }
    w
}

/// Convex mixture Σᵢ pᵢ ρᵢ⁽¹⁾⊗…⊗ρᵢ⁽ᵏ⁾ of random product states — separable
/// across every cut by construction. `n_terms` defaults to 4·(total dimension).
pub fn random_separable(
    dims: &DimSpec,
    n_terms: Option<usize>,
    rng: &mut impl Rng,
) -> DensityMatrix {
    let terms = n_terms.unwrap_or(4 * dims.total()).max(1);
    let weights = random_simplex_weights(terms, rng);
    let n = dims.total();
    let mut m = ComplexMatrix::zeros(n, n);
    for w in weights {
        let mut prod = ComplexMatrix::identity(1);
        for &d in dims.factors() {
            let local = random_density(&DimSpec::single(d), rng);
            prod = prod.kron(local.mat());
        }
        m = m.add_scaled(&prod, c(w, 0.0));
    }
    DensityMatrix::new(m, dims.clone()).expect("mixture of valid states")
}

/// ‖[ρ, ρ_A⊗I]‖_F-style helper: Frobenius norm of the commutator of a state
/// with the embedding of its own marginal.
pub fn marginal_commutator(rho: &DensityMatrix, side: Side) -> Result<f64> {
    let (da, db) = rho.bipartite_dims()?;
    let marg = rho.marginal(side)?;
    let embedded = match side {
        Side::A => marg.kron(&ComplexMatrix::identity(db)),
        Side::B => ComplexMatrix::identity(da).kron(&marg),
    };
    Ok(commutator_fro(rho.mat(), &embedded))
}
