//! Two-copy interference statistics for multiqubit states.
//!
//! Measuring each qubit of one copy jointly with its partner in a second
//! identical copy projects every pair onto the symmetric (s = 0, coalescence)
//! or antisymmetric (s = 1, anticoalescence) subspace. The signed, reflected
//! sums of the resulting joint probabilities reproduce the quadratic overlaps
//! Tr(ρ ρ^{τ_{I′}}) without tomography.

use rand::distributions::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::Binomial;

use crate::matrix::{c, trace_product, ComplexMatrix, DimSpec};
use crate::states::DensityMatrix;
use crate::witness::MultiCopyWitness;
use crate::{Error, Result};

const PROB_FLOOR: f64 = -1e-12;
const SUM_TOL: f64 = 1e-10;

/// Largest pair count the dense two-copy operators are built for
/// (2n qubits → 4096-dimensional joint space).
pub const MAX_PAIRS: usize = 6;

/// Joint outcome distribution over the 2^n symmetric/antisymmetric strings,
/// indexed with s₁ as the most significant bit.
#[derive(Clone, Debug)]
pub struct OutcomeTable {
    n: usize,
    probs: Vec<f64>,
}

impl OutcomeTable {
    pub fn new(n: usize, probs: Vec<f64>) -> Result<Self> {
        if n == 0 || probs.len() != 1 << n {
            return Err(Error::Param(format!(
                "{} outcomes do not cover {n} qubit pairs",
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| **p < PROB_FLOOR || !p.is_finite()) {
            return Err(Error::Param(format!("negative outcome probability {p}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::Param(format!("outcome probabilities sum to {sum}")));
        }
        Ok(OutcomeTable { n, probs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability of one outcome string, given most-significant-first.
    pub fn prob(&self, s: &[usize]) -> f64 {
        let idx = s.iter().fold(0usize, |acc, b| acc * 2 + (b & 1));
        self.probs[idx]
    }

    /// CSV with header `s1,…,sn,prob`, one row per outcome string.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for j in 1..=self.n {
            out.push_str(&format!("s{j},"));
        }
        out.push_str("prob\n");
        for (idx, p) in self.probs.iter().enumerate() {
            for j in 0..self.n {
                let bit = (idx >> (self.n - 1 - j)) & 1;
                out.push_str(&format!("{bit},"));
            }
            out.push_str(&format!("{p}\n"));
        }
        out
    }
}

/// Strictly increasing set I′ of reflected pair positions (0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReflectionSet {
    indices: Vec<usize>,
}

impl ReflectionSet {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if !indices.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Param(
                "reflected positions must be strictly increasing".into(),
            ));
        }
        Ok(ReflectionSet { indices })
    }

    pub fn empty() -> Self {
        ReflectionSet { indices: vec![] }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    fn check_range(&self, n: usize) -> Result<()> {
        match self.indices.last() {
            Some(&m) if m >= n => Err(Error::Param(format!(
                "reflected position {m} outside the {n} pairs"
            ))),
            _ => Ok(()),
        }
    }
}

/// Projectors onto the symmetric and antisymmetric subspace of one qubit
/// pair: P^{(0/1)} = ½(I ± 𝒱); P^{(1)} is the singlet projector.
pub fn pair_projectors() -> (ComplexMatrix, ComplexMatrix) {
    let v = crate::witness::swap_n(2, 2).expect("qubit pair");
    let id = ComplexMatrix::identity(4);
    (
        id.add_scaled(&v, c(1.0, 0.0)).scaled_re(0.5),
        id.add_scaled(&v, c(-1.0, 0.0)).scaled_re(0.5),
    )
}

/// Per-pair factor of the joint projector ⊗ⱼ P^{(sⱼ)} assembled on the
/// block two-copy layout (A₁…Aₙ, A′₁…A′ₙ): entry [z1, z2] multiplies the
/// pair factors read off the interleaved bit pairs (xⱼ, x′ⱼ) of z = (X, X′).
fn paired_operator(n: usize, per_pair: &[&ComplexMatrix]) -> ComplexMatrix {
    let total = 1usize << (2 * n);
    ComplexMatrix::from_fn(total, total, |z1, z2| {
        let (x1, xp1) = (z1 >> n, z1 & ((1 << n) - 1));
        let (x2, xp2) = (z2 >> n, z2 & ((1 << n) - 1));
        let mut acc = c(1.0, 0.0);
        for j in 0..n {
            let sh = n - 1 - j;
            let r = ((x1 >> sh) & 1) * 2 + ((xp1 >> sh) & 1);
            let col = ((x2 >> sh) & 1) * 2 + ((xp2 >> sh) & 1);
            acc *= per_pair[j][(r, col)];
            if acc.norm_sqr() == 0.0 {
                break;
            }
        }
        acc
    })
}

fn check_pairs(n: usize) -> Result<()> {
    if n == 0 || n > MAX_PAIRS {
        return Err(Error::Param(format!(
            "pair count {n} outside 1..={MAX_PAIRS}"
        )));
    }
    Ok(())
}

/// p(s₁,…,sₙ) = Tr[⊗ⱼ P^{(sⱼ)}_{AⱼA′ⱼ} · ρ⊗ρ] for every outcome string.
pub fn joint_probabilities(rho: &DensityMatrix) -> Result<OutcomeTable> {
    let n = rho.dims().num_factors();
    check_pairs(n)?;
    if rho.dims().factors().iter().any(|&d| d != 2) {
        return Err(Error::Dim(format!(
            "pair statistics need qubit factors, dims are {}",
            rho.dims()
        )));
    }
    let two_copies = rho.mat().kron(rho.mat());
    let (p0, p1) = pair_projectors();
    let mut probs = Vec::with_capacity(1 << n);
    for s in 0..1usize << n {
        let factors: Vec<&ComplexMatrix> = (0..n)
            .map(|j| if (s >> (n - 1 - j)) & 1 == 1 { &p1 } else { &p0 })
            .collect();
        let proj = paired_operator(n, &factors);
        probs.push(trace_product(&proj, &two_copies).re);
    }
    OutcomeTable::new(n, probs)
}

/// The collective two-copy observable whose mean on ρ⊗ρ is Tr(ρ ρ^{τ_{I′}}):
/// the pair swap 𝒱 on unreflected positions and I−𝒱 (twice the antisymmetric
/// projector) on reflected ones.
pub fn two_copy_observable(n: usize, reflected: &ReflectionSet) -> Result<MultiCopyWitness> {
    check_pairs(n)?;
    reflected.check_range(n)?;
    let v = crate::witness::swap_n(2, 2)?;
    let anti = ComplexMatrix::identity(4).add_scaled(&v, c(-1.0, 0.0));
    let factors: Vec<&ComplexMatrix> = (0..n)
        .map(|j| if reflected.contains(j) { &anti } else { &v })
        .collect();
    let op = paired_operator(n, &factors);
    Ok(MultiCopyWitness {
        op,
        copies: 2,
        per_copy_dims: DimSpec::qubits(n),
        source: format!("two-copy reflect {:?}", reflected.indices()),
    })
}

/// Signed reflected sum of the outcome probabilities:
/// 2^{|I′|} Σ_{s: sₖ=1 ∀k∈I′} (−1)^{Σ_{i∉I′} sᵢ} p(s), which reconstructs
/// Tr(ρ ρ^{τ_{I′}}) from measured statistics. The prefactor accounts for the
/// reflected slots carrying I−𝒱 = 2P^{(1)} rather than the bare projector.
pub fn mean_from_probs(table: &OutcomeTable, reflected: &ReflectionSet) -> Result<f64> {
    let n = table.n();
    reflected.check_range(n)?;
    let mut acc = 0.0;
    for (idx, p) in table.probs().iter().enumerate() {
        let mut sign = 1.0;
        let mut keep = true;
        for j in 0..n {
            let bit = (idx >> (n - 1 - j)) & 1;
            if reflected.contains(j) {
                if bit == 0 {
                    keep = false;
                    break;
                }
            } else if bit == 1 {
                sign = -sign;
            }
        }
        if keep {
            acc += sign * p;
        }
    }
    Ok(acc * 2f64.powi(reflected.indices().len() as i32))
}

/// Multinomial resample of the outcome distribution with `shots` repetitions;
/// tiny negative probabilities are clamped to zero first.
pub fn shot_sample(table: &OutcomeTable, shots: u64, seed: u64) -> Result<OutcomeTable> {
    if shots == 0 {
        return Err(Error::Param("need at least one shot".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let clamped: Vec<f64> = table.probs().iter().map(|p| p.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    let mut counts = vec![0u64; clamped.len()];
    let mut remaining = shots;
    let mut mass_left = total;
    for (i, p) in clamped.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i + 1 == clamped.len() || mass_left <= 0.0 {
            counts[i] = remaining;
            remaining = 0;
            break;
        }
        let q = (p / mass_left).clamp(0.0, 1.0);
        let k = Binomial::new(remaining, q)
            .map_err(|e| Error::Param(format!("shot sampling: {e}")))?
            .sample(&mut rng);
        counts[i] = k;
        remaining -= k;
        mass_left -= p;
    }
    if remaining > 0 {
        *counts.last_mut().expect("nonempty") += remaining;
    }
    let probs = counts.iter().map(|k| *k as f64 / shots as f64).collect();
    OutcomeTable::new(table.n(), probs)
}
