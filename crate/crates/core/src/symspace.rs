//! Symmetric-subspace machinery.
//!
//! Dicke basis convention: `|D_N^k>` is the equal-weight superposition of all
//! `C(N, k)` computational states of `N` qubits with `k` ones, normalized by
//! `1/sqrt(C(N, k))`, with all coefficients real and positive. A symmetric
//! `N`-qubit state is stored as an `(N+1) x (N+1)` matrix in this basis.
//!
//! Splitting `N = a + b` qubits into two groups maps `|D_N^k>` to
//! `sum_i sqrt(C(a,i) C(b,k-i) / C(N,k)) |D_a^i> |D_b^(k-i)>`, which is how
//! every bipartition is handled here without leaving the compressed
//! representation. Permutation invariance makes all bipartitions with the same
//! group sizes unitarily equivalent, so one representative split per size
//! class is enough.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    self, eigvalsh, partial_transpose_raw, Basis, ComplexMatrix, DensityMatrix, Spectrum, C64, ONE, ZERO,
};
use crate::tol;

/// `C(n, k)` in exact integer arithmetic.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    binomial(n, k) as f64
}

/// Flip operator `F |i j> = |j i>` on `C^d (x) C^d`.
pub fn flip(d: usize) -> ComplexMatrix {
    let n = d * d;
    let mut f = ComplexMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            f[(j * d + i, i * d + j)] = ONE;
        }
    }
    f
}

/// `P_s = (1 + F) / 2`
pub fn sym_projector(d: usize) -> ComplexMatrix {
    (&ComplexMatrix::identity(d * d) + &flip(d)).scale(0.5)
}

/// `P_a = 1 - P_s`
pub fn antisym_projector(d: usize) -> ComplexMatrix {
    &ComplexMatrix::identity(d * d) - &sym_projector(d)
}

/// Isometry from the `d(d+1)/2`-dimensional symmetric subspace of
/// `C^d (x) C^d` into the full space. Columns: `|kk>` for each `k`, then
/// `(|kl> + |lk>)/sqrt 2` for `k < l`.
pub fn sym_subspace_isometry(d: usize) -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut cols: Vec<Vec<(usize, f64)>> = (0..d).map(|k| vec![(k * d + k, 1.0)]).collect();
    for k in 0..d {
        for l in k + 1..d {
            cols.push(vec![(k * d + l, h), (l * d + k, h)]);
        }
    }
    let mut v = ComplexMatrix::zeros(d * d, cols.len());
    for (c, entries) in cols.iter().enumerate() {
        for &(r, x) in entries {
            v[(r, c)] = C64::new(x, 0.0);
        }
    }
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    /// Supported on the symmetric subspace, `rho F = rho`.
    Symmetric,
    /// Flip invariant, `F rho F = rho`, but not symmetric.
    Invariant,
    Neither,
}

impl Symmetry {
    pub fn is_invariant(self) -> bool {
        self != Symmetry::Neither
    }
}

pub(crate) fn equal_bipartite_dim(rho: &DensityMatrix) -> Result<usize> {
    let (a, b) = rho.bipartite_dims()?;
    if a != b {
        return Err(Error::UnequalDims(a, b));
    }
    Ok(a)
}

pub fn classify(rho: &DensityMatrix) -> Result<Symmetry> {
    let d = equal_bipartite_dim(rho)?;
    let m = rho.matrix();
    let swap = |idx: usize| (idx % d) * d + idx / d;
    let n = d * d;
    let mut right = 0.0f64;
    let mut both = 0.0f64;
    for r in 0..n {
        for c in 0..n {
            right = right.max((m[(r, swap(c))] - m[(r, c)]).norm());
            both = both.max((m[(swap(r), swap(c))] - m[(r, c)]).norm());
        }
    }
    Ok(if right <= tol::CLASSIFY {
        Symmetry::Symmetric
    } else if both <= tol::CLASSIFY {
        Symmetry::Invariant
    } else {
        Symmetry::Neither
    })
}

/// `|D_N^k>` expanded in the `2^N`-dimensional computational basis
/// (qubit 0 is the most significant bit).
pub fn dicke_vector_full(n: usize, k: usize) -> Vec<C64> {
    let norm = 1.0 / binomial_f64(n, k).sqrt();
    (0..1usize << n)
        .map(|x| if x.count_ones() as usize == k { C64::new(norm, 0.0) } else { ZERO })
        .collect()
}

/// `2^N x (N+1)` isometry whose columns are the Dicke vectors.
pub fn dicke_full_isometry(n: usize) -> ComplexMatrix {
    let cols: Vec<Vec<C64>> = (0..=n).map(|k| dicke_vector_full(n, k)).collect();
    ComplexMatrix::from_fn(1 << n, n + 1, |r, c| cols[c][r])
}

/// Symmetric `N`-qubit state in the Dicke basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricState {
    matrix: ComplexMatrix,
    qubits: usize,
}

impl SymmetricState {
    pub fn new(matrix: ComplexMatrix, qubits: usize) -> Result<Self> {
        let dm = DensityMatrix::new(matrix, vec![2; qubits], Basis::Dicke)?;
        Ok(Self { matrix: dm.into_matrix(), qubits })
    }

    /// Wraps an `(N+1) x (N+1)` matrix without checking trace or positivity,
    /// e.g. a candidate extension to audit with `verify_extension`. The
    /// Hermitian part is kept.
    pub fn unchecked(matrix: ComplexMatrix, qubits: usize) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != qubits + 1 {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix for {qubits} qubits",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { matrix: matrix.hermitian_part(), qubits })
    }

    pub(crate) fn from_parts(matrix: ComplexMatrix, qubits: usize) -> Self {
        debug_assert_eq!(matrix.rows(), qubits + 1);
        Self { matrix, qubits }
    }

    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        if rho.basis() != Basis::Dicke {
            return Err(Error::NotApplicable("expected a Dicke-basis state".into()));
        }
        Ok(Self { matrix: rho.matrix().clone(), qubits: rho.dims().len() })
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_parts(self.matrix.clone(), vec![2; self.qubits], Basis::Dicke)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// `|D_N^k><D_N^k|`
    pub fn dicke(qubits: usize, k: usize) -> Self {
        let mut m = ComplexMatrix::zeros(qubits + 1, qubits + 1);
        m[(k, k)] = ONE;
        Self { matrix: m, qubits }
    }

    /// `|0>^(x)N`
    pub fn all_zeros(qubits: usize) -> Self {
        Self::dicke(qubits, 0)
    }

    /// `(|psi><psi|)^(x)N` for a single-qubit vector `psi = (alpha, beta)`.
    pub fn product(psi: [C64; 2], qubits: usize) -> Self {
        let norm = (psi[0].norm_sqr() + psi[1].norm_sqr()).sqrt();
        let (a, b) = (psi[0] / norm, psi[1] / norm);
        let amp: Vec<C64> = (0..=qubits)
            .map(|k| a.powu((qubits - k) as u32) * b.powu(k as u32) * binomial_f64(qubits, k).sqrt())
            .collect();
        Self { matrix: ComplexMatrix::outer(&amp), qubits }
    }

    /// `(1 - w) self + w other`
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        if self.qubits != other.qubits {
            return Err(Error::SizeMismatch(format!("{} vs {} qubits", self.qubits, other.qubits)));
        }
        let m = &self.matrix.scale(1.0 - w) + &other.matrix.scale(w);
        Ok(Self { matrix: m.hermitian_part(), qubits: self.qubits })
    }

    /// The state as a `2^N x 2^N` computational-basis density matrix.
    pub fn expand_full(&self) -> DensityMatrix {
        let v = dicke_full_isometry(self.qubits);
        DensityMatrix::from_parts(self.matrix.conjugate_by(&v), vec![2; self.qubits], Basis::Computational)
    }
}

/// Isometry from the `N`-qubit Dicke basis into `Sym_a (x) Sym_b`.
#[derive(Clone, Debug)]
pub struct DickeEmbedding {
    pub qubits: usize,
    pub split: (usize, usize),
    /// `(a+1)(b+1) x (N+1)`, real-valued.
    pub isometry: ComplexMatrix,
}

/// `sqrt(C(a, i) C(b, k - i) / C(N, k))`
pub(crate) fn split_coefficient(n: usize, a: usize, k: usize, i: usize) -> f64 {
    let b = n - a;
    (binomial_f64(a, i) * binomial_f64(b, k - i) / binomial_f64(n, k)).sqrt()
}

fn check_split(qubits: usize, (a, b): (usize, usize)) -> Result<()> {
    if a + b != qubits || a == 0 || b == 0 {
        return Err(Error::BadSplit { qubits, a, b });
    }
    Ok(())
}

pub fn dicke_embedding(qubits: usize, split: (usize, usize)) -> Result<DickeEmbedding> {
    check_split(qubits, split)?;
    let (a, b) = split;
    let mut v = ComplexMatrix::zeros((a + 1) * (b + 1), qubits + 1);
    for k in 0..=qubits {
        for i in k.saturating_sub(b)..=a.min(k) {
            v[(i * (b + 1) + (k - i), k)] = C64::new(split_coefficient(qubits, a, k, i), 0.0);
        }
    }
    Ok(DickeEmbedding { qubits, split, isometry: v })
}

/// `V sigma V^H` as an `(a+1) x (b+1)` bipartite state.
pub fn to_bipartite(sigma: &SymmetricState, split: (usize, usize)) -> Result<DensityMatrix> {
    let emb = dicke_embedding(sigma.qubits(), split)?;
    let m = sigma.matrix().conjugate_by(&emb.isometry).hermitian_part();
    Ok(DensityMatrix::from_parts(m, vec![split.0 + 1, split.1 + 1], Basis::Computational))
}

/// Partial transpose of the first group of the bipartite map of `m` (an
/// `(N+1) x (N+1)` Dicke-basis matrix, not necessarily a state).
pub fn compressed_pt_raw(m: &ComplexMatrix, emb: &DickeEmbedding) -> ComplexMatrix {
    let (a, b) = emb.split;
    let bip = m.conjugate_by(&emb.isometry);
    partial_transpose_raw(&bip, &[a + 1, b + 1], &[0])
}

pub fn compressed_pt(sigma: &SymmetricState, split: (usize, usize)) -> Result<ComplexMatrix> {
    let emb = dicke_embedding(sigma.qubits(), split)?;
    Ok(compressed_pt_raw(sigma.matrix(), &emb))
}

/// Spectrum of the partial transpose over `a` qubits, computed on the
/// `(a+1)(b+1)`-dimensional compressed space. The full `2^N` spectrum is this
/// one padded with `2^N - (a+1)(b+1)` structural zeros.
pub fn compressed_pt_spectrum(sigma: &SymmetricState, split: (usize, usize)) -> Result<Spectrum> {
    let pt = compressed_pt(sigma, split)?;
    Ok(Spectrum { eigenvalues: eigvalsh(&pt)?, eigenvectors: None })
}

/// One split `(a, N - a)` per size class, `a = 1..=N/2`.
pub fn representative_splits(qubits: usize) -> Vec<(usize, usize)> {
    (1..=qubits / 2).map(|a| (a, qubits - a)).collect()
}

/// Trace out `M - keep` qubits of an `(M+1) x (M+1)` Dicke-basis matrix:
/// `Tr_B |D_M^k><D_M^l| = sum_m c(k,m) c(l,m) |D_N^(k-m)><D_N^(l-m)|`.
pub fn dicke_partial_trace_raw(m: &ComplexMatrix, total: usize, keep: usize) -> ComplexMatrix {
    let traced = total - keep;
    let mut out = ComplexMatrix::zeros(keep + 1, keep + 1);
    for k in 0..=total {
        for l in 0..=total {
            let x = m[(k, l)];
            if x == ZERO {
                continue;
            }
            for mm in 0..=traced {
                if mm > k || mm > l || k - mm > keep || l - mm > keep {
                    continue;
                }
                let ck = split_coefficient(total, keep, k, k - mm);
                let cl = split_coefficient(total, keep, l, l - mm);
                out[(k - mm, l - mm)] += x * (ck * cl);
            }
        }
    }
    out
}

pub fn dicke_partial_trace(sigma: &SymmetricState, keep: usize) -> Result<SymmetricState> {
    let total = sigma.qubits();
    if keep == 0 || keep >= total {
        return Err(Error::BadKeepCount { qubits: total, keep });
    }
    let m = dicke_partial_trace_raw(sigma.matrix(), total, keep).hermitian_part();
    Ok(SymmetricState::from_parts(m, keep))
}

fn structural_cache() -> &'static RwLock<HashMap<(usize, usize), usize>> {
    static CACHE: OnceLock<RwLock<HashMap<(usize, usize), usize>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Rank of the compressed partial transpose of a generic full-rank symmetric
/// state, calibrated once per `(N, a)` from a fixed-seed random sample.
pub fn generic_compressed_pt_rank(qubits: usize, split: (usize, usize)) -> Result<usize> {
    check_split(qubits, split)?;
    if let Some(&r) = structural_cache().read().expect("cache poisoned").get(&(qubits, split.0)) {
        return Ok(r);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + qubits as u64 * 131 + split.0 as u64);
    let sample = SymmetricState::from_parts(linalg::random_hs_matrix(qubits + 1, &mut rng), qubits);
    let ev = compressed_pt_spectrum(&sample, split)?.eigenvalues;
    let scale = ev.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let rank = ev.iter().filter(|l| l.abs() > 1e-9 * scale).count();
    structural_cache().write().expect("cache poisoned").insert((qubits, split.0), rank);
    Ok(rank)
}

/// Number of partial-transpose eigenvalues that vanish for every symmetric
/// state in the full `2^N` space.
pub fn structural_zero_count(qubits: usize, split: (usize, usize)) -> Result<usize> {
    Ok((1usize << qubits) - generic_compressed_pt_rank(qubits, split)?)
}

/// Structural zeros that remain inside the compressed representation.
pub fn compressed_structural_zero_count(qubits: usize, split: (usize, usize)) -> Result<usize> {
    let dim = (split.0 + 1) * (split.1 + 1);
    Ok(dim - generic_compressed_pt_rank(qubits, split)?)
}
