//! Dense complex matrices and the index plumbing for composite quantum systems.
//!
//! Storage is row-major `Vec<C64>`. Tensor factors follow the usual Kronecker
//! convention: factor 0 is the most significant part of a composite index, so for
//! `A ⊗ B` the row index is `a * b_rows + b`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::{Error, Result};

pub type C64 = Complex<f64>;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Tensor-factor dimensions of a composite Hilbert space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DimSpec {
    factors: Vec<usize>,
}

impl DimSpec {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Dim("DimSpec needs at least one factor".into()));
        }
        if factors.iter().any(|&d| d == 0) {
            return Err(Error::Dim("zero-dimensional factor".into()));
        }
        Ok(DimSpec { factors })
    }

    pub fn bipartite(da: usize, db: usize) -> Self {
        DimSpec::new(vec![da, db]).expect("nonzero dims")
    }

    pub fn qubits(n: usize) -> Self {
        DimSpec::new(vec![2; n.max(1)]).expect("nonzero dims")
    }

    pub fn single(d: usize) -> Self {
        DimSpec::new(vec![d]).expect("nonzero dim")
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> usize {
        self.factors[i]
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn total(&self) -> usize {
        self.factors.iter().product()
    }

    /// Product of factor dimensions strictly left / strictly right of `i`.
    pub fn split_around(&self, i: usize) -> (usize, usize) {
        let left = self.factors[..i].iter().product();
        let right = self.factors[i + 1..].iter().product();
        (left, right)
    }
}

impl fmt::Display for DimSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = ComplexMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Row-major construction from real entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        let mut m = ComplexMatrix::zeros(rows, cols);
        for (k, &x) in entries.iter().enumerate() {
            m.data[k] = C64::new(x, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        let mut m = self.clone();
        for z in &mut m.data {
            *z = z.conj();
        }
        m
    }

    pub fn dagger(&self) -> Self {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation from Hermitian symmetry, max |a_ij - conj(a_ji)|.
    pub fn herm_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.herm_deviation() <= tol
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut m = self.clone();
        for z in &mut m.data {
            *z *= s;
        }
        m
    }

    pub fn scaled_re(&self, s: f64) -> Self {
        self.scaled(C64::new(s, 0.0))
    }

    /// self + s * other, in one pass.
    pub fn add_scaled(&self, other: &Self, s: C64) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for (z, w) in m.data.iter_mut().zip(&other.data) {
            *z += s * w;
        }
        m
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut out = ComplexMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..other.rows {
                    let dst = (i * other.rows + k) * out.cols + j * other.cols;
                    let src = k * other.cols;
                    for l in 0..other.cols {
                        out.data[dst + l] = a * other.data[src + l];
                    }
                }
            }
        }
        out
    }

    /// Integer matrix power by binary exponentiation; `pow(0)` is the identity.
    pub fn pow_int(&self, mut k: u32) -> Self {
        debug_assert!(self.is_square());
        let mut result = ComplexMatrix::identity(self.rows);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.add_scaled(rhs, C64::new(1.0, 0.0))
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.add_scaled(rhs, C64::new(-1.0, 0.0))
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let dst = i * rhs.cols;
                let src = k * rhs.cols;
                for j in 0..rhs.cols {
                    out.data[dst + j] += a * rhs.data[src + j];
                }
            }
        }
        out
    }
}

/// Tr(a·b) without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    assert_eq!(a.cols, b.rows);
    assert_eq!(b.cols, a.rows);
    let mut s = C64::new(0.0, 0.0);
    for i in 0..a.rows {
        for j in 0..a.cols {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    s
}

/// ‖ab − ba‖_F.
pub fn commutator_fro(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (&(a * b) - &(b * a)).fro_norm()
}

/// Reduced matrix on factor `keep` of `dims`; all other factors traced out.
pub fn partial_trace(x: &ComplexMatrix, dims: &DimSpec, keep: usize) -> Result<ComplexMatrix> {
    check_square_dims(x, dims)?;
    if keep >= dims.num_factors() {
        return Err(Error::Dim(format!("no factor {keep} in {dims}")));
    }
    let dk = dims.factor(keep);
    let (left, right) = dims.split_around(keep);
    let mut out = ComplexMatrix::zeros(dk, dk);
    for a in 0..dk {
        for b in 0..dk {
            let mut s = C64::new(0.0, 0.0);
            for l in 0..left {
                for r in 0..right {
                    let row = (l * dk + a) * right + r;
                    let col = (l * dk + b) * right + r;
                    s += x[(row, col)];
                }
            }
            out[(a, b)] = s;
        }
    }
    Ok(out)
}

/// Transposition of the indices of factor `sub` only.
pub fn partial_transpose(x: &ComplexMatrix, dims: &DimSpec, sub: usize) -> Result<ComplexMatrix> {
    check_square_dims(x, dims)?;
    if sub >= dims.num_factors() {
        return Err(Error::Dim(format!("no factor {sub} in {dims}")));
    }
    let dk = dims.factor(sub);
    let (left, right) = dims.split_around(sub);
    let n = dims.total();
    let mut out = ComplexMatrix::zeros(n, n);
    for l in 0..left {
        for a in 0..dk {
            for r in 0..right {
                let row = (l * dk + a) * right + r;
                for l2 in 0..left {
                    for b in 0..dk {
                        for r2 in 0..right {
                            let col = (l2 * dk + b) * right + r2;
                            let srow = (l * dk + b) * right + r;
                            let scol = (l2 * dk + a) * right + r2;
                            out[(row, col)] = x[(srow, scol)];
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn check_square_dims(x: &ComplexMatrix, dims: &DimSpec) -> Result<()> {
    if !x.is_square() {
        return Err(Error::Dim(format!("{}x{} matrix is not square", x.rows, x.cols)));
    }
    if x.rows != dims.total() {
        return Err(Error::Dim(format!(
            "matrix side {} does not match dims {dims}",
            x.rows
        )));
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix; `values` ascending, `vectors`
/// holds the matching orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenSystem {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// V·diag(f(λ))·V†.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            let fk = f(self.values[k]);
            if fk == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * fk;
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_fn(|x| x)
    }
}

pub const HERMITICITY_TOL: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver for complex Hermitian matrices.
///
/// Each rotation zeroes one off-diagonal pair (p, q): the phase of a_pq is pulled
/// into a diagonal unitary so that the remaining 2x2 block is real symmetric, then
/// a standard Givens rotation annihilates it. Input must be Hermitian to within
/// [`HERMITICITY_TOL`] (entrywise).
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<EigenSystem> {
    if !h.is_square() {
        return Err(Error::Dim(format!(
            "eigendecomposition of non-square {}x{}",
            h.rows, h.cols
        )));
    }
    let dev = h.herm_deviation();
    if dev > HERMITICITY_TOL {
        return Err(Error::NotHermitian(dev));
    }

    let n = h.rows;
    let mut a = h.clone();
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = h.fro_norm().max(1e-300);
    let target = 1e-14 * scale;

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= target / (n as f64 * n as f64) {
                    continue;
                }
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cth = 1.0 / (1.0 + t * t).sqrt();
                let sth = t * cth;
                // J restricted to (p, q): [[c·e^{iφ}, s·e^{iφ}], [−s, c]]
                let jpp = phase * cth;
                let jpq = phase * sth;
                let jqp = C64::new(-sth, 0.0);
                let jqq = C64::new(cth, 0.0);

                // A ← J† A J: columns first, then rows.
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * jpp + aiq * jqp;
                    a[(i, q)] = aip * jpq + aiq * jqq;
                }
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = jpp.conj() * apj + jqp.conj() * aqj;
                    a[(q, j)] = jpq.conj() * apj + jqq.conj() * aqj;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * jpp + viq * jqp;
                    v[(i, q)] = vip * jpq + viq * jqq;
                }
            }
        }
    }
    if !converged {
        // one last check: the sweeps may have just reached the target
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() > target {
            return Err(Error::NoConverge(JACOBI_MAX_SWEEPS));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(EigenSystem { values, vectors })
}

/// |h| = V·|Λ|·V† for Hermitian h.
pub fn mat_abs(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(h)?.apply_fn(f64::abs))
}

/// Spectral norm max|λ| of a Hermitian matrix.
pub fn operator_norm(h: &ComplexMatrix) -> Result<f64> {
    let eig = hermitian_eig(h)?;
    Ok(eig.min().abs().max(eig.max().abs()))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eig(h: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eig(h)?.min())
}

/// Largest singular value of an arbitrary square matrix, via x†x.
pub fn singular_norm(x: &ComplexMatrix) -> Result<f64> {
    let gram = &x.dagger() * x;
    let top = hermitian_eig(&gram)?.max().max(0.0);
    Ok(top.sqrt())
}

/// Pauli matrices; `pauli(0)` is the identity.
pub fn pauli(k: usize) -> ComplexMatrix {
    let (a, b, c_, d) = match k {
        0 => (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)),
        1 => (c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)),
        2 => (c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)),
        3 => (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)),
        _ => panic!("pauli index {k} out of range"),
    };
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 0)] = a;
    m[(0, 1)] = b;
    m[(1, 0)] = c_;
    m[(1, 1)] = d;
    m
}

/// Row-major JSON form of a complex matrix as separate real / imaginary grids.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let re = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| m[(i, j)].re).collect())
            .collect();
        let im = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| m[(i, j)].im).collect())
            .collect();
        MatrixJson { re, im }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let rows = self.re.len();
        if rows == 0 || self.im.len() != rows {
            return Err(Error::Dim("re/im grids must be nonempty and same shape".into()));
        }
        let cols = self.re[0].len();
        for row in self.re.iter().chain(self.im.iter()) {
            if row.len() != cols {
                return Err(Error::Dim("ragged matrix rows".into()));
            }
        }
        Ok(ComplexMatrix::from_fn(rows, cols, |i, j| {
            C64::new(self.re[i][j], self.im[i][j])
        }))
    }
}
