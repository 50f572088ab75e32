//! Multi-copy collective witnesses built from scalar-inequality map tableaux.
//!
//! Every scalar criterion of the form Tr(Σᵢ μᵢ Πⱼ Θᵢⱼ(ρ)) ≥ 0 turns into a
//! single Hermitian observable 𝒲 on α copies via the symmetrized copy-swap:
//! 𝒲 = Σᵢ μᵢ (⊗ⱼ Θᵢⱼ†)(𝒱̃^{(α)}), with Tr(𝒲 ρ^{⊗α}) reproducing the scalar
//! margin exactly. Operator inequalities Σᵢ μᵢ Πⱼ Θᵢⱼ(ρ) ≥ 0 instead yield a
//! witness per probe vector Ψ through the dual of the multiplication map.

use serde::{Deserialize, Serialize};

use crate::maps::{AntisymmetricUnitary, MapFn, OperatorMap};
use crate::matrix::{c, C64, ComplexMatrix, DimSpec, MatrixJson};
use crate::states::{DensityMatrix, Side};
use crate::{Error, Result};
use std::sync::Arc;

/// Witness matrices above this size need [`build_witness_with_cap`]; the
/// default keeps three copies of a 4⊗4 system within a few hundred MB.
pub const MAX_WITNESS_DIM: usize = 4096;

const HERM_TOL: f64 = 1e-9;
const IMAG_TOL: f64 = 1e-9;

/// Hermitian observable on `copies` copies of a system with `per_copy_dims`.
#[derive(Clone, Debug)]
pub struct MultiCopyWitness {
    pub op: ComplexMatrix,
    pub copies: usize,
    pub per_copy_dims: DimSpec,
    pub source: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessJson {
    pub source: String,
    pub copies: usize,
    pub per_copy_dims: Vec<usize>,
    pub matrix: MatrixJson,
}

impl MultiCopyWitness {
    pub fn to_json(&self) -> WitnessJson {
        WitnessJson {
            source: self.source.clone(),
            copies: self.copies,
            per_copy_dims: self.per_copy_dims.factors().to_vec(),
            matrix: MatrixJson::from_matrix(&self.op),
        }
    }

    pub fn from_json(j: &WitnessJson) -> Result<Self> {
        let dims = DimSpec::new(j.per_copy_dims.clone())?;
        let op = j.matrix.to_matrix()?;
        let expect = dims.total().pow(j.copies as u32);
        if !op.is_square() || op.rows() != expect {
            return Err(Error::Dim(format!(
                "witness matrix side {} does not match {} copies of {}",
                op.rows(),
                j.copies,
                dims
            )));
        }
        Ok(MultiCopyWitness {
            op,
            copies: j.copies,
            per_copy_dims: dims,
            source: j.source.clone(),
        })
    }
}

// ---------------------------------------------------------------------------
// Copy-swap operators
// ---------------------------------------------------------------------------

/// Nonzero positions of the cyclic copy-shift V on (ℂ^d)^{⊗n}:
/// V|j₁ j₂…jₙ⟩ = |j₂…jₙ j₁⟩, so row = (col mod d^{n−1})·d + col div d^{n−1}.
/// This orientation is the one contracting to the forward product,
/// Tr(𝒱 A₁⊗…⊗Aₙ) = Tr(A₁A₂⋯Aₙ).
fn shift_row(col: usize, d: usize, dn1: usize) -> usize {
    (col % dn1) * d + col / dn1
}

/// Cyclic copy-shift operator; Tr(𝒱 ρ₁⊗…⊗ρₙ) = Tr(ρ₁⋯ρₙ).
pub fn swap_n(d: usize, n: usize) -> Result<ComplexMatrix> {
    if d < 2 {
        return Err(Error::Dim(format!("copy dimension {d} below 2")));
    }
    if n < 2 {
        return Err(Error::Param(format!("need at least 2 copies, got {n}")));
    }
    let total = d.pow(n as u32);
    let dn1 = total / d;
    let mut v = ComplexMatrix::zeros(total, total);
    for col in 0..total {
        v[(shift_row(col, d, dn1), col)] = c(1.0, 0.0);
    }
    Ok(v)
}

/// Hermitian part ½(𝒱+𝒱†); its mean on ρ^{⊗n} is exactly Tr ρⁿ.
pub fn symmetrized_swap(d: usize, n: usize) -> Result<ComplexMatrix> {
    let v = swap_n(d, n)?;
    Ok((&v + &v.dagger()).scaled_re(0.5))
}

/// Entries of 𝒱̃^{(n)} as (row, col, value) triplets; valid from n = 1
/// (where the shift is the identity).
fn symmetrized_swap_entries(d: usize, n: usize) -> Vec<(usize, usize, C64)> {
    let total = d.pow(n as u32);
    let dn1 = total / d;
    let half = c(0.5, 0.0);
    let mut out = Vec::with_capacity(2 * total);
    for col in 0..total {
        let row = shift_row(col, d, dn1);
        out.push((row, col, half));
        out.push((col, row, half));
    }
    out
}

// ---------------------------------------------------------------------------
// Multiplication map
// ---------------------------------------------------------------------------

/// The contraction Λ^{(n)}: (ℂ^d)^{⊗n} → ℂ^d with
/// Λ(A₁⊗…⊗Aₙ) = A₁A₂⋯Aₙ, as Λ(X)[k,m] = Σ_{i⃗} X[(k,i⃗),(i⃗,m)];
/// its dual scatters X[uₙ,v₁] along the matching index chain.
pub fn multiplication_map(n: usize, d: usize) -> Result<OperatorMap> {
    if n < 1 || d < 1 {
        return Err(Error::Param(format!("bad multiplication map shape {n}/{d}")));
    }
    let total = d.pow(n as u32);
    let chain = total / d; // d^{n−1}
    let fwd: MapFn = Arc::new(move |x: &ComplexMatrix| {
        ComplexMatrix::from_fn(d, d, |k, m| {
            (0..chain).map(|t| x[(k * chain + t, t * d + m)]).sum()
        })
    });
    let dual: MapFn = Arc::new(move |x: &ComplexMatrix| {
        let mut out = ComplexMatrix::zeros(total, total);
        for t in 0..chain {
            for un in 0..d {
                for v1 in 0..d {
                    out[(t * d + un, v1 * chain + t)] = x[(un, v1)];
                }
            }
        }
        out
    });
    Ok(OperatorMap::from_parts(
        format!("mult[{n}]"),
        total,
        d,
        fwd,
        dual,
    ))
}

// ---------------------------------------------------------------------------
// Map tableaux
// ---------------------------------------------------------------------------

/// Coefficients μᵢ and an m×α table of maps encoding
/// Σᵢ μᵢ Πⱼ Θᵢⱼ(ρ) — traced for scalar inequalities, kept as an operator for
/// structural ones. Every map consumes the single-copy space; output
/// dimensions may differ between rows but must agree within a row.
#[derive(Clone, Debug)]
pub struct MapTableau {
    dims: DimSpec,
    mu: Vec<f64>,
    theta: Vec<Vec<OperatorMap>>,
}

impl MapTableau {
    pub fn new(dims: DimSpec, mu: Vec<f64>, theta: Vec<Vec<OperatorMap>>) -> Result<Self> {
        if mu.is_empty() || mu.len() != theta.len() {
            return Err(Error::Tableau(format!(
                "{} coefficients against {} rows",
                mu.len(),
                theta.len()
            )));
        }
        let alpha = theta[0].len();
        if alpha == 0 {
            return Err(Error::Tableau("empty tableau row".into()));
        }
        for row in &theta {
            if row.len() != alpha {
                return Err(Error::Tableau("ragged tableau rows".into()));
            }
            let d_row = row[0].output_dim();
            for m in row {
                if m.input_dim() != dims.total() {
                    return Err(Error::Tableau(format!(
                        "map {} does not consume the {}-dim copy space",
                        m.name(),
                        dims.total()
                    )));
                }
                if m.output_dim() != d_row {
                    return Err(Error::Tableau(format!(
                        "map {} breaks its row's output dimension {}",
                        m.name(),
                        d_row
                    )));
                }
            }
        }
        Ok(MapTableau { dims, mu, theta })
    }

    pub fn alpha(&self) -> usize {
        self.theta[0].len()
    }

    pub fn dims(&self) -> &DimSpec {
        &self.dims
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn rows(&self) -> &[Vec<OperatorMap>] {
        &self.theta
    }

    /// True when every row outputs on the single-copy space itself, as the
    /// operator-inequality form requires.
    pub fn is_uniform(&self) -> bool {
        self.theta
            .iter()
            .all(|row| row[0].output_dim() == self.dims.total())
    }
}

/// Σᵢ μᵢ Tr Πⱼ Θᵢⱼ(ρ): the tableau's own scalar semantics. Each row's trace
/// must come out real; a residue above 1e-9 is reported as a fault.
pub fn tableau_scalar(tableau: &MapTableau, rho: &DensityMatrix) -> Result<f64> {
    let mut acc = 0.0;
    for (mu, row) in tableau.mu.iter().zip(&tableau.theta) {
        let mut prod: Option<ComplexMatrix> = None;
        for map in row {
            let next = map.apply(rho.mat())?;
            prod = Some(match prod {
                None => next,
                Some(p) => &p * &next,
            });
        }
        let t = prod.expect("row nonempty").trace();
        if t.im.abs() > IMAG_TOL {
            return Err(Error::ImagResidue(t.im));
        }
        acc += mu * t.re;
    }
    Ok(acc)
}

/// Σᵢ μᵢ Πⱼ Θᵢⱼ(ρ) as an operator; needs a uniform tableau.
pub fn tableau_operator(tableau: &MapTableau, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    if !tableau.is_uniform() {
        return Err(Error::Tableau(
            "operator form needs every row on the single-copy space".into(),
        ));
    }
    let d = tableau.dims.total();
    let mut acc = ComplexMatrix::zeros(d, d);
    for (mu, row) in tableau.mu.iter().zip(&tableau.theta) {
        let mut prod: Option<ComplexMatrix> = None;
        for map in row {
            let next = map.apply(rho.mat())?;
            prod = Some(match prod {
                None => next,
                Some(p) => &p * &next,
            });
        }
        acc = acc.add_scaled(&prod.expect("row nonempty"), c(*mu, 0.0));
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Witness assembly
// ---------------------------------------------------------------------------

/// Dual images of all matrix units of one slot, kept as sparse triplets:
/// images[a][b] lists the nonzeros of Θ†(|a⟩⟨b|).
fn unit_images(map: &OperatorMap) -> Result<Vec<Vec<Vec<(usize, usize, C64)>>>> {
    let ds = map.output_dim();
    let mut images = Vec::with_capacity(ds);
    for a in 0..ds {
        let mut per_a = Vec::with_capacity(ds);
        for b in 0..ds {
            let mut unit = ComplexMatrix::zeros(ds, ds);
            unit[(a, b)] = c(1.0, 0.0);
            let img = map.apply_dual(&unit)?;
            let mut trips = Vec::new();
            for r in 0..img.rows() {
                for cc in 0..img.cols() {
                    let v = img[(r, cc)];
                    if v.norm_sqr() != 0.0 {
                        trips.push((r, cc, v));
                    }
                }
            }
            per_a.push(trips);
        }
        images.push(per_a);
    }
    Ok(images)
}

/// out += coeff · ⊗ⱼ factors[j], each factor given as sparse triplets on a
/// `d_slot`-dim slot.
fn add_kron_product(
    out: &mut ComplexMatrix,
    factors: &[&[(usize, usize, C64)]],
    d_slot: usize,
    coeff: C64,
) {
    if factors.iter().any(|f| f.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; factors.len()];
    loop {
        let mut r = 0usize;
        let mut col = 0usize;
        let mut v = coeff;
        for (k, f) in factors.iter().enumerate() {
            let (fr, fc, fv) = f[idx[k]];
            r = r * d_slot + fr;
            col = col * d_slot + fc;
            v *= fv;
        }
        out[(r, col)] += v;
        let mut k = factors.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < factors[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn digit(x: usize, pos: usize, base: usize, width: usize) -> usize {
    (x / base.pow((width - 1 - pos) as u32)) % base
}

/// Accumulate μ · (⊗ⱼ Θⱼ†)(source) into `out`, with `source` given as sparse
/// triplets over per-slot dimension `d_src` and `alpha` slots.
fn accumulate_dual_rows(
    out: &mut ComplexMatrix,
    row: &[OperatorMap],
    mu: f64,
    source: &[(usize, usize, C64)],
    d_src: usize,
    d_slot: usize,
) -> Result<()> {
    let alpha = row.len();
    let images: Vec<_> = row.iter().map(unit_images).collect::<Result<_>>()?;
    let coeff_mu = c(mu, 0.0);
    let mut factors: Vec<&[(usize, usize, C64)]> = Vec::with_capacity(alpha);
    for &(vr, vc, vval) in source {
        factors.clear();
        for (j, imgs) in images.iter().enumerate() {
            let a = digit(vr, j, d_src, alpha);
            let b = digit(vc, j, d_src, alpha);
            factors.push(imgs[a][b].as_slice());
        }
        add_kron_product(out, &factors, d_slot, vval * coeff_mu);
    }
    Ok(())
}

/// 𝒲^{(α)} = Σᵢ μᵢ (⊗ⱼ Θᵢⱼ†)(𝒱̃^{(α)}): the collective witness whose mean on
/// ρ^{⊗α} equals the tableau's scalar value whenever each row traces real.
pub fn build_witness(tableau: &MapTableau, source: &str) -> Result<MultiCopyWitness> {
    build_witness_with_cap(tableau, source, MAX_WITNESS_DIM)
}

/// As [`build_witness`] with an explicit size cap for larger assemblies.
pub fn build_witness_with_cap(
    tableau: &MapTableau,
    source: &str,
    cap: usize,
) -> Result<MultiCopyWitness> {
    let alpha = tableau.alpha();
    let d1 = tableau.dims.total();
    let total = d1
        .checked_pow(alpha as u32)
        .filter(|t| *t <= cap)
        .ok_or_else(|| {
            Error::Tableau(format!(
                "witness on {alpha} copies of dimension {d1} exceeds the cap {cap}"
            ))
        })?;
    let mut out = ComplexMatrix::zeros(total, total);
    for (mu, row) in tableau.mu.iter().zip(&tableau.theta) {
        let d_row = row[0].output_dim();
        let entries = symmetrized_swap_entries(d_row, alpha);
        accumulate_dual_rows(&mut out, row, *mu, &entries, d_row, d1)?;
    }
    let dev = out.herm_deviation();
    if dev > HERM_TOL {
        return Err(Error::NotHermitian(dev));
    }
    Ok(MultiCopyWitness {
        op: out,
        copies: alpha,
        per_copy_dims: tableau.dims.clone(),
        source: source.to_string(),
    })
}

/// 𝒲_Ψ = Σᵢ μᵢ (⊗ⱼ Θᵢⱼ†)(Λ†(|Ψ⟩⟨Ψ|)): one witness per probe vector for a
/// uniform tableau read as the operator inequality Σᵢ μᵢ Πⱼ Θᵢⱼ(ρ) ≥ 0.
pub fn witness_from_vector(tableau: &MapTableau, psi: &ComplexMatrix) -> Result<MultiCopyWitness> {
    if !tableau.is_uniform() {
        return Err(Error::Tableau(
            "probe-vector witnesses need every row on the single-copy space".into(),
        ));
    }
    let d1 = tableau.dims.total();
    if psi.rows() != d1 || psi.cols() != 1 {
        return Err(Error::Dim(format!(
            "probe vector must be a {d1}-component column"
        )));
    }
    let norm: f64 = (0..d1).map(|i| psi[(i, 0)].norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Param(format!(
            "probe vector norm {} is not 1",
            norm.sqrt()
        )));
    }
    let alpha = tableau.alpha();
    let total = d1.pow(alpha as u32);
    let chain = total / d1;
    // Λ†(|Ψ⟩⟨Ψ|) as sparse triplets over the α-fold copy space
    let mut source = Vec::with_capacity(chain * d1 * d1);
    for t in 0..chain {
        for un in 0..d1 {
            for v1 in 0..d1 {
                let v = psi[(un, 0)] * psi[(v1, 0)].conj();
                if v.norm_sqr() != 0.0 {
                    source.push((t * d1 + un, v1 * chain + t, v));
                }
            }
        }
    }
    let mut out = ComplexMatrix::zeros(total, total);
    for (mu, row) in tableau.mu.iter().zip(&tableau.theta) {
        accumulate_dual_rows(&mut out, row, *mu, &source, d1, d1)?;
    }
    // The raw dual of a projector is not Hermitian; its pairing with any
    // ρ^{⊗α} is real regardless, so the Hermitian part carries the same
    // expectation values and is the observable actually handed out.
    let out = (&out + &out.dagger()).scaled_re(0.5);
    Ok(MultiCopyWitness {
        op: out,
        copies: alpha,
        per_copy_dims: tableau.dims.clone(),
        source: "probe".to_string(),
    })
}

/// Re Tr(𝒲 ρ^{⊗α}) contracted without materializing ρ^{⊗α}; the imaginary
/// residue must stay below 1e-9.
pub fn evaluate_witness(w: &MultiCopyWitness, rho: &DensityMatrix) -> Result<f64> {
    let d1 = w.per_copy_dims.total();
    if rho.dim() != d1 || rho.dims().factors() != w.per_copy_dims.factors() {
        return Err(Error::Dim(format!(
            "state dims {} do not match witness copies of {}",
            rho.dims(),
            w.per_copy_dims
        )));
    }
    let alpha = w.copies;
    let n = w.op.rows();
    // per-linear-index slot digits, shared by rows and columns
    let digits: Vec<Vec<usize>> = (0..n)
        .map(|x| (0..alpha).map(|j| digit(x, j, d1, alpha)).collect())
        .collect();
    let mut acc = c(0.0, 0.0);
    let r = rho.mat();
    for x in 0..n {
        for y in 0..n {
            let wv = w.op[(x, y)];
            if wv.norm_sqr() == 0.0 {
                continue;
            }
            let mut prod = wv;
            for j in 0..alpha {
                prod *= r[(digits[y][j], digits[x][j])];
            }
            acc += prod;
        }
    }
    if acc.im.abs() > IMAG_TOL {
        return Err(Error::ImagResidue(acc.im));
    }
    Ok(acc.re)
}

// ---------------------------------------------------------------------------
// Tableaux of the implemented inequalities
// ---------------------------------------------------------------------------

fn bipartite_total(dims: &DimSpec) -> Result<usize> {
    if dims.num_factors() != 2 {
        return Err(Error::Dim(format!("need a bipartite split, got {dims}")));
    }
    Ok(dims.total())
}

fn trace_row(dims: &DimSpec, side: Side, alpha: usize) -> Result<Vec<OperatorMap>> {
    let tr = OperatorMap::partial_trace(dims, side.index())?;
    Ok(vec![tr; alpha])
}

fn tau_on(dims: &DimSpec, reversed: Side, u: &AntisymmetricUnitary) -> Result<OperatorMap> {
    OperatorMap::partial_time_reversal(dims, reversed.index(), u)
}

/// Symmetric ±-split bound: Tr ρ_side^α ≥ ½[Tr ρ(ρ+ρ^τ)^{α−1} + Tr ρ(ρ−ρ^τ)^{α−1}]
/// as a three-row tableau (trace row, then identity followed by I±τ slots).
pub fn fact3_tableau(
    dims: &DimSpec,
    alpha: usize,
    side: Side,
    u: &AntisymmetricUnitary,
) -> Result<MapTableau> {
    if alpha < 1 {
        return Err(Error::Param("order must be at least 1".into()));
    }
    let d = bipartite_total(dims)?;
    let id = OperatorMap::identity(d);
    let tau = tau_on(dims, side.opposite(), u)?;
    let plus = id.sum(&tau)?;
    let minus = id.sum(&tau.scaled(-1.0))?;
    let mut row2 = vec![id.clone()];
    let mut row3 = vec![id];
    row2.extend(std::iter::repeat(plus).take(alpha - 1));
    row3.extend(std::iter::repeat(minus).take(alpha - 1));
    MapTableau::new(
        dims.clone(),
        vec![1.0, -0.5, -0.5],
        vec![trace_row(dims, side, alpha)?, row2, row3],
    )
}

/// The qubit-factor specialization of the ±-split bound (marginal on B,
/// reversal on the first, two-dimensional factor).
pub fn fact1_tableau(dims: &DimSpec, alpha: usize) -> Result<MapTableau> {
    bipartite_total(dims)?;
    if dims.factor(0) != 2 {
        return Err(Error::Dim(format!(
            "tableau needs a qubit first factor, dims are {dims}"
        )));
    }
    let v2 = AntisymmetricUnitary::canonical(2)?;
    fact3_tableau(dims, alpha, Side::B, &v2)
}

/// Product bound at order 4k+1: Tr ρ_side^{4k+1} ≥ 2^{4k} Tr ρ^{2k+1}(ρ^τ)^{2k}.
pub fn fact4_tableau(
    dims: &DimSpec,
    k: usize,
    side: Side,
    u: &AntisymmetricUnitary,
) -> Result<MapTableau> {
    let d = bipartite_total(dims)?;
    let alpha = 4 * k + 1;
    let id = OperatorMap::identity(d);
    let tau = tau_on(dims, side.opposite(), u)?;
    let mut row2 = vec![id; 2 * k + 1];
    row2.extend(std::iter::repeat(tau).take(2 * k));
    MapTableau::new(
        dims.clone(),
        vec![1.0, -2f64.powi(4 * k as i32)],
        vec![trace_row(dims, side, alpha)?, row2],
    )
}

/// Entropic comparison Tr ρ_side^α ≥ Tr ρ^α as a two-row tableau.
pub fn entropic_tableau(dims: &DimSpec, alpha: usize, side: Side) -> Result<MapTableau> {
    if alpha < 1 {
        return Err(Error::Param("order must be at least 1".into()));
    }
    let d = bipartite_total(dims)?;
    MapTableau::new(
        dims.clone(),
        vec![1.0, -1.0],
        vec![
            trace_row(dims, side, alpha)?,
            vec![OperatorMap::identity(d); alpha],
        ],
    )
}

/// Tr(ρ ρ^{τ_side}) ≥ 0 as a single two-copy row; `side` names the reversed
/// subsystem directly.
pub fn quadratic_tableau(
    dims: &DimSpec,
    side: Side,
    u: &AntisymmetricUnitary,
) -> Result<MapTableau> {
    let d = bipartite_total(dims)?;
    MapTableau::new(
        dims.clone(),
        vec![1.0],
        vec![vec![OperatorMap::identity(d), tau_on(dims, side, u)?]],
    )
}

/// Operator bound with odd-power trim, in uniform (operator) form:
/// (ρ_side⊗I)^α − ½[(ρ+ρ^τ)^α + (ρ−ρ^τ)^α] ≥ 0.
pub fn oddcut_tableau(
    dims: &DimSpec,
    alpha: usize,
    side: Side,
    u: &AntisymmetricUnitary,
) -> Result<MapTableau> {
    if alpha < 1 {
        return Err(Error::Param("order must be at least 1".into()));
    }
    let d = bipartite_total(dims)?;
    let emb = OperatorMap::embed(dims, side.index())?
        .compose(&OperatorMap::partial_trace(dims, side.index())?)?;
    let id = OperatorMap::identity(d);
    let tau = tau_on(dims, side.opposite(), u)?;
    let plus = id.sum(&tau)?;
    let minus = id.sum(&tau.scaled(-1.0))?;
    MapTableau::new(
        dims.clone(),
        vec![1.0, -0.5, -0.5],
        vec![vec![emb; alpha], vec![plus; alpha], vec![minus; alpha]],
    )
}

/// Plain operator power bound in uniform form:
/// (ρ_side⊗I)^α − (ρ+ρ^τ)^α ≥ 0.
pub fn operator_power_tableau(
    dims: &DimSpec,
    alpha: usize,
    side: Side,
    u: &AntisymmetricUnitary,
) -> Result<MapTableau> {
    if alpha < 1 {
        return Err(Error::Param("order must be at least 1".into()));
    }
    let d = bipartite_total(dims)?;
    let emb = OperatorMap::embed(dims, side.index())?
        .compose(&OperatorMap::partial_trace(dims, side.index())?)?;
    let id = OperatorMap::identity(d);
    let plus = id.sum(&tau_on(dims, side.opposite(), u)?)?;
    MapTableau::new(
        dims.clone(),
        vec![1.0, -1.0],
        vec![vec![emb; alpha], vec![plus; alpha]],
    )
}
