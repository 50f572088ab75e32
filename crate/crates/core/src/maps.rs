//! Positive (but not completely positive) maps: time reversal built from an
//! antisymmetric unitary, the reduction map, its two sign-modified strengthenings,
//! per-qubit Bloch-sphere reflections, and a small dual-map algebra used when
//! assembling multi-copy witnesses.

use std::sync::Arc;

use crate::matrix::{c, partial_transpose, pauli, ComplexMatrix, DimSpec};
use crate::states::DensityMatrix;
use crate::{Error, Result};

pub const MAP_TOL: f64 = 1e-10;

/// An even-dimensional unitary U with U^T = −U, the ingredient that turns
/// transposition into a time reversal.
#[derive(Clone, Debug)]
pub struct AntisymmetricUnitary {
    u: ComplexMatrix,
}

impl AntisymmetricUnitary {
    pub fn new(u: ComplexMatrix) -> Result<Self> {
        if !u.is_square() || u.rows() % 2 != 0 || u.rows() == 0 {
            return Err(Error::Dim(format!(
                "antisymmetric unitaries exist only in even dimension, got {}x{}",
                u.rows(),
                u.cols()
            )));
        }
        let anti = (&u.transpose() + &u).fro_norm();
        if anti > MAP_TOL {
            return Err(Error::NotAntisymmetric(anti));
        }
        let gram = &u.dagger() * &u;
        let uni = (&gram - &ComplexMatrix::identity(u.rows())).fro_norm();
        if uni > MAP_TOL {
            return Err(Error::NotUnitary(uni));
        }
        Ok(AntisymmetricUnitary { u })
    }

    /// Anti-diagonal ±1 pattern: +1 in the upper half, −1 in the lower.
    /// For d = 2 this is [[0, 1], [−1, 0]].
    pub fn canonical(d: usize) -> Result<Self> {
        let mut u = ComplexMatrix::zeros(d, d);
        for k in 0..d {
            u[(k, d - 1 - k)] = c(if k < d / 2 { 1.0 } else { -1.0 }, 0.0);
        }
        AntisymmetricUnitary::new(u)
    }

    /// Alternating anti-diagonal: entry (k, d−1−k) is (−1)^{d−1−k}. This is the
    /// unitary part of the physical time reversal for a spin-(d−1)/2 system in
    /// the m-descending basis; for d = 2 it differs from `canonical` only by a
    /// global sign, so both generate the same map.
    pub fn spin_flip(d: usize) -> Result<Self> {
        let mut u = ComplexMatrix::zeros(d, d);
        for k in 0..d {
            let sign = if (d - 1 - k) % 2 == 0 { 1.0 } else { -1.0 };
            u[(k, d - 1 - k)] = c(sign, 0.0);
        }
        AntisymmetricUnitary::new(u)
    }

    pub fn dim(&self) -> usize {
        self.u.rows()
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.u
    }
}

/// Which of the two antisymmetric-unitary constructions to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UKind {
    Canonical,
    SpinFlip,
}

impl UKind {
    pub fn build(self, d: usize) -> Result<AntisymmetricUnitary> {
        match self {
            UKind::Canonical => AntisymmetricUnitary::canonical(d),
            UKind::SpinFlip => AntisymmetricUnitary::spin_flip(d),
        }
    }
}

impl std::str::FromStr for UKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<UKind> {
        match s.trim() {
            "canonical" => Ok(UKind::Canonical),
            "spin_flip" | "spin-flip" => Ok(UKind::SpinFlip),
            other => Err(Error::Param(format!(
                "unknown unitary kind {other:?} (expected canonical or spin_flip)"
            ))),
        }
    }
}

/// τ^U(X) = U X^T U†.
pub fn time_reversal(x: &ComplexMatrix, u: &AntisymmetricUnitary) -> Result<ComplexMatrix> {
    if !x.is_square() || x.rows() != u.dim() {
        return Err(Error::Dim(format!(
            "time reversal of {}x{} with a {}-dim unitary",
            x.rows(),
            x.cols(),
            u.dim()
        )));
    }
    Ok(&(u.mat() * &x.transpose()) * &u.mat().dagger())
}

/// τ^U applied to one tensor factor of a multipartite matrix.
pub fn partial_time_reversal_mat(
    x: &ComplexMatrix,
    dims: &DimSpec,
    subsystem: usize,
    u: &AntisymmetricUnitary,
) -> Result<ComplexMatrix> {
    if subsystem >= dims.num_factors() {
        return Err(Error::Dim(format!("no factor {subsystem} in {dims}")));
    }
    if dims.factor(subsystem) != u.dim() {
        return Err(Error::Dim(format!(
            "factor {subsystem} of {dims} does not match the {}-dim unitary",
            u.dim()
        )));
    }
    let pt = partial_transpose(x, dims, subsystem)?;
    let (left, right) = dims.split_around(subsystem);
    let big_u = ComplexMatrix::identity(left)
        .kron(u.mat())
        .kron(&ComplexMatrix::identity(right));
    Ok(&(&big_u * &pt) * &big_u.dagger())
}

/// τ^U ⊗ I acting on the chosen factor of a state.
pub fn partial_time_reversal(
    rho: &DensityMatrix,
    subsystem: usize,
    u: &AntisymmetricUnitary,
) -> Result<ComplexMatrix> {
    partial_time_reversal_mat(rho.mat(), rho.dims(), subsystem, u)
}

/// Λ_r(A) = (Tr A)·I − A.
pub fn reduction_map(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::Dim("reduction map needs a square input".into()));
    }
    let t = a.trace();
    Ok(ComplexMatrix::identity(a.rows()).scaled(t).add_scaled(a, c(-1.0, 0.0)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapSign {
    Plus,
    Minus,
}

/// Λ_U^(±)(A) = (Tr A)·I − A ± U A^T U†. The minus variant annihilates every
/// qubit projector when d = 2; both are positive on states but not completely
/// positive.
pub fn breuer_hall(
    a: &ComplexMatrix,
    u: &AntisymmetricUnitary,
    sign: MapSign,
) -> Result<ComplexMatrix> {
    if a.rows() != u.dim() {
        return Err(Error::Dim(format!(
            "map input side {} does not match the {}-dim unitary",
            a.rows(),
            u.dim()
        )));
    }
    let tau = time_reversal(a, u)?;
    let s = match sign {
        MapSign::Plus => 1.0,
        MapSign::Minus => -1.0,
    };
    Ok(reduction_map(a)?.add_scaled(&tau, c(s, 0.0)))
}

/// σ_y-conjugated partial transpose applied to each listed factor (0-based).
/// Reflected factors must be qubits; other factors may have any dimension.
/// The per-qubit maps commute, so the order of `reflected` is irrelevant.
pub fn multiqubit_reflection(
    rho: &DensityMatrix,
    reflected: &[usize],
) -> Result<ComplexMatrix> {
    reflection_mat(rho.mat(), rho.dims(), reflected)
}

pub fn reflection_mat(
    x: &ComplexMatrix,
    dims: &DimSpec,
    reflected: &[usize],
) -> Result<ComplexMatrix> {
    let mut out = x.clone();
    let mut seen = vec![false; dims.num_factors()];
    for &i in reflected {
        if i >= dims.num_factors() {
            return Err(Error::Dim(format!("no factor {i} in {dims}")));
        }
        if dims.factor(i) != 2 {
            return Err(Error::Dim(format!(
                "reflection acts on qubits; factor {i} of {dims} has dimension {}",
                dims.factor(i)
            )));
        }
        if seen[i] {
            return Err(Error::Param(format!("factor {i} listed twice")));
        }
        seen[i] = true;
        let pt = partial_transpose(&out, dims, i)?;
        let (left, right) = dims.split_around(i);
        let big = ComplexMatrix::identity(left)
            .kron(&pauli(2))
            .kron(&ComplexMatrix::identity(right));
        // σ_y is Hermitian, so conjugation needs no dagger bookkeeping
        out = &(&big * &pt) * &big;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Dual-map algebra
// ---------------------------------------------------------------------------

pub type MapFn = Arc<dyn Fn(&ComplexMatrix) -> ComplexMatrix + Send + Sync>;

/// A Hermiticity-preserving linear map together with its trace-pairing dual:
/// Tr[X·Θ(Y)] = Tr[Θ†(X)·Y] for all X, Y of matching sizes.
#[derive(Clone)]
pub struct OperatorMap {
    name: String,
    input_dim: usize,
    output_dim: usize,
    fwd: MapFn,
    dual: MapFn,
}

impl std::fmt::Debug for OperatorMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "OperatorMap({}: {} -> {})",
            self.name, self.input_dim, self.output_dim
        )
    }
}

impl OperatorMap {
    /// Wrap a raw action/dual pair. The caller vouches that the two closures
    /// satisfy the trace pairing Tr[X·Θ(Y)] = Tr[Θ†(X)·Y].
    pub fn from_parts(
        name: String,
        input_dim: usize,
        output_dim: usize,
        fwd: MapFn,
        dual: MapFn,
    ) -> OperatorMap {
        OperatorMap {
            name,
            input_dim,
            output_dim,
            fwd,
            dual,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if !x.is_square() || x.rows() != self.input_dim {
            return Err(Error::Dim(format!(
                "map {} expects side {}, got {}x{}",
                self.name,
                self.input_dim,
                x.rows(),
                x.cols()
            )));
        }
        Ok((self.fwd)(x))
    }

    pub fn apply_dual(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if !x.is_square() || x.rows() != self.output_dim {
            return Err(Error::Dim(format!(
                "dual of map {} expects side {}, got {}x{}",
                self.name,
                self.output_dim,
                x.rows(),
                x.cols()
            )));
        }
        Ok((self.dual)(x))
    }

    /// The dual as a map in its own right (input/output sides swapped).
    pub fn adjoint(&self) -> OperatorMap {
        OperatorMap {
            name: format!("dual({})", self.name),
            input_dim: self.output_dim,
            output_dim: self.input_dim,
            fwd: self.dual.clone(),
            dual: self.fwd.clone(),
        }
    }

    pub fn identity(d: usize) -> OperatorMap {
        let f: MapFn = Arc::new(|x: &ComplexMatrix| x.clone());
        OperatorMap {
            name: "id".into(),
            input_dim: d,
            output_dim: d,
            fwd: f.clone(),
            dual: f,
        }
    }

    pub fn transpose(d: usize) -> OperatorMap {
        let f: MapFn = Arc::new(|x: &ComplexMatrix| x.transpose());
        OperatorMap {
            name: "T".into(),
            input_dim: d,
            output_dim: d,
            fwd: f.clone(),
            dual: f,
        }
    }

    /// τ^U as a self-dual map (antisymmetry of U makes the dual coincide).
    pub fn time_reversal(u: &AntisymmetricUnitary) -> OperatorMap {
        let d = u.dim();
        let uu = u.clone();
        let f: MapFn = Arc::new(move |x: &ComplexMatrix| {
            time_reversal(x, &uu).expect("dimension checked at construction")
        });
        OperatorMap {
            name: "tau".into(),
            input_dim: d,
            output_dim: d,
            fwd: f.clone(),
            dual: f,
        }
    }

    /// Trace out every factor of `dims` except `keep`; dual embeds against
    /// identities on the traced factors.
    pub fn partial_trace(dims: &DimSpec, keep: usize) -> Result<OperatorMap> {
        if keep >= dims.num_factors() {
            return Err(Error::Dim(format!("no factor {keep} in {dims}")));
        }
        let d_in = dims.total();
        let d_out = dims.factor(keep);
        let dims_f = dims.clone();
        let fwd: MapFn = Arc::new(move |x: &ComplexMatrix| {
            crate::matrix::partial_trace(x, &dims_f, keep).expect("dims checked")
        });
        let (left, right) = dims.split_around(keep);
        let dual: MapFn = Arc::new(move |x: &ComplexMatrix| {
            ComplexMatrix::identity(left)
                .kron(x)
                .kron(&ComplexMatrix::identity(right))
        });
        Ok(OperatorMap {
            name: format!("Tr[^{keep}]"),
            input_dim: d_in,
            output_dim: d_out,
            fwd,
            dual,
        })
    }

    /// X ↦ I ⊗ X ⊗ I placing X on factor `at` of `dims`; dual is the partial trace.
    pub fn embed(dims: &DimSpec, at: usize) -> Result<OperatorMap> {
        Ok(OperatorMap::partial_trace(dims, at)?.adjoint())
    }

    pub fn reduction(d: usize) -> OperatorMap {
        let f: MapFn = Arc::new(move |x: &ComplexMatrix| {
            reduction_map(x).expect("square by construction")
        });
        OperatorMap {
            name: "red".into(),
            input_dim: d,
            output_dim: d,
            fwd: f.clone(),
            dual: f,
        }
    }

    pub fn breuer_hall(u: &AntisymmetricUnitary, sign: MapSign) -> OperatorMap {
        let uu = u.clone();
        let d = u.dim();
        let f: MapFn = Arc::new(move |x: &ComplexMatrix| {
            breuer_hall(x, &uu, sign).expect("dimension checked at construction")
        });
        let tag = match sign {
            MapSign::Plus => "+",
            MapSign::Minus => "-",
        };
        OperatorMap {
            name: format!("BH{tag}"),
            input_dim: d,
            output_dim: d,
            fwd: f.clone(),
            dual: f,
        }
    }

    /// τ^U on one factor of `dims`, self-dual like its single-system version.
    pub fn partial_time_reversal(
        dims: &DimSpec,
        subsystem: usize,
        u: &AntisymmetricUnitary,
    ) -> Result<OperatorMap> {
        if subsystem >= dims.num_factors() || dims.factor(subsystem) != u.dim() {
            return Err(Error::Dim(format!(
                "factor {subsystem} of {dims} does not match the {}-dim unitary",
                u.dim()
            )));
        }
        let d = dims.total();
        let dims_c = dims.clone();
        let uu = u.clone();
        let f: MapFn = Arc::new(move |x: &ComplexMatrix| {
            partial_time_reversal_mat(x, &dims_c, subsystem, &uu).expect("dims checked")
        });
        Ok(OperatorMap {
            name: format!("tau[{subsystem}]"),
            input_dim: d,
            output_dim: d,
            fwd: f.clone(),
            dual: f,
        })
    }

    pub fn scaled(&self, s: f64) -> OperatorMap {
        let f = self.fwd.clone();
        let g = self.dual.clone();
        OperatorMap {
            name: format!("{s}*{}", self.name),
            input_dim: self.input_dim,
            output_dim: self.output_dim,
            fwd: Arc::new(move |x| f(x).scaled_re(s)),
            dual: Arc::new(move |x| g(x).scaled_re(s)),
        }
    }

    pub fn sum(&self, other: &OperatorMap) -> Result<OperatorMap> {
        if self.input_dim != other.input_dim || self.output_dim != other.output_dim {
            return Err(Error::Dim(format!(
                "cannot sum maps {} and {}: shapes differ",
                self.name, other.name
            )));
        }
        let (f1, f2) = (self.fwd.clone(), other.fwd.clone());
        let (g1, g2) = (self.dual.clone(), other.dual.clone());
        Ok(OperatorMap {
            name: format!("({}+{})", self.name, other.name),
            input_dim: self.input_dim,
            output_dim: self.output_dim,
            fwd: Arc::new(move |x| &f1(x) + &f2(x)),
            dual: Arc::new(move |x| &g1(x) + &g2(x)),
        })
    }

    /// self ∘ inner: apply `inner` first. Duals compose in reverse order.
    pub fn compose(&self, inner: &OperatorMap) -> Result<OperatorMap> {
        if inner.output_dim != self.input_dim {
            return Err(Error::Dim(format!(
                "cannot compose {} after {}: shapes differ",
                self.name, inner.name
            )));
        }
        let (f1, f2) = (self.fwd.clone(), inner.fwd.clone());
        let (g1, g2) = (self.dual.clone(), inner.dual.clone());
        Ok(OperatorMap {
            name: format!("{}.{}", self.name, inner.name),
            input_dim: inner.input_dim,
            output_dim: self.output_dim,
            fwd: Arc::new(move |x| f1(&f2(x))),
            dual: Arc::new(move |x| g2(&g1(x))),
        })
    }
}
