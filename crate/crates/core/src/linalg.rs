//! Dense complex linear algebra on small matrices.
//!
//! Everything here works on [`ComplexMatrix`], a row-major dense matrix of
//! `Complex64`. Eigen- and singular-value problems are delegated to
//! `nalgebra`; tensor index manipulations (partial transpose, partial trace,
//! realignment) are implemented directly on the flat storage.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::tol;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::ShapeMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Ok(Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0)))
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO })
    }

    /// `|v><v|`
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |i, j| v[i] * v[j].conj())
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

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (r2, c2) = (other.rows, other.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |i, j| {
            self[(i / r2, j / c2)] * other[(i % r2, j % c2)]
        })
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `V A V^H`
    pub fn conjugate_by(&self, v: &Self) -> Self {
        v.matmul(self).matmul(&v.adjoint())
    }

    /// `V^H A V`
    pub fn compress_by(&self, v: &Self) -> Self {
        v.adjoint().matmul(self).matmul(v)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius inner product `Tr(A^H B)`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    /// Largest entrywise deviation from Hermiticity, `max |A - A^H|`.
    pub fn hermiticity_violation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(A + A^H) / 2`
    pub fn hermitian_part(&self) -> Self {
        let n = self.rows;
        Self::from_fn(n, n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
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

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
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

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Computational,
    Dicke,
}

/// A validated density matrix together with its tensor-factor layout.
///
/// In the computational basis `dims` lists the local dimensions and their
/// product is the matrix side. In the Dicke basis `dims` is `[2; N]` and the
/// matrix side is `N + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
    basis: Basis,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>, basis: Basis) -> Result<Self> {
        check_layout(&matrix, &dims, basis)?;
        let matrix = hermitize(&matrix)?;
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > tol::TRACE {
            return Err(Error::BadTrace { trace });
        }
        let min = eigvalsh(&matrix)?.last().copied().unwrap_or(0.0);
        if min < -tol::PSD {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        Ok(Self { matrix, dims, basis })
    }

    /// Builds a computational-basis state from a matrix that is PSD and unit
    /// trace by construction. Only the layout is checked.
    pub(crate) fn from_parts(matrix: ComplexMatrix, dims: Vec<usize>, basis: Basis) -> Self {
        debug_assert!(check_layout(&matrix, &dims, basis).is_ok());
        Self { matrix, dims, basis }
    }

    pub fn pure(psi: &[C64], dims: Vec<usize>) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&v), dims, Basis::Computational)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn side(&self) -> usize {
        self.matrix.rows()
    }

    /// `(d_A, d_B)` for a bipartite computational-basis state.
    pub fn bipartite_dims(&self) -> Result<(usize, usize)> {
        match (self.basis, self.dims.as_slice()) {
            (Basis::Computational, &[a, b]) => Ok((a, b)),
            _ => Err(Error::NotBipartite(self.dims.clone())),
        }
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        if self.basis != Basis::Computational || other.basis != Basis::Computational {
            return Err(Error::DickeBasisUnsupported);
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Ok(Self::from_parts(self.matrix.kron(&other.matrix), dims, Basis::Computational))
    }

    /// Convex combination `(1 - w) self + w other`.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        if self.dims != other.dims || self.basis != other.basis {
            return Err(Error::SizeMismatch(format!("{:?} vs {:?}", self.dims, other.dims)));
        }
        let m = &self.matrix.scale(1.0 - w) + &other.matrix.scale(w);
        Ok(Self::from_parts(m, self.dims.clone(), self.basis))
    }
}

fn check_layout(matrix: &ComplexMatrix, dims: &[usize], basis: Basis) -> Result<()> {
    if !matrix.is_square() {
        return Err(Error::NonSquare { rows: matrix.rows(), cols: matrix.cols() });
    }
    let side = matrix.rows();
    let ok = match basis {
        Basis::Computational => dims.iter().product::<usize>() == side,
        Basis::Dicke => dims.iter().all(|&d| d == 2) && dims.len() + 1 == side,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(format!("dims {dims:?} ({basis:?} basis) do not fit a {side}x{side} matrix")))
    }
}

/// Checks Hermiticity against the tolerance (scaled by the entry magnitude) and
/// returns the symmetrized matrix.
fn hermitize(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::NonSquare { rows: a.rows(), cols: a.cols() });
    }
    let violation = a.hermiticity_violation();
    if violation > tol::HERMITIAN * a.max_abs().max(1.0) {
        return Err(Error::NonHermitian { violation });
    }
    Ok(a.hermitian_part())
}

/// Eigenvalues in descending order, optionally with eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<ComplexMatrix>,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(f64::NAN)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NAN)
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

pub fn hermitian_eig(a: &ComplexMatrix) -> Result<Spectrum> {
    let h = hermitize(a)?;
    let eig = h.to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..h.rows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = ComplexMatrix::from_fn(h.rows(), h.rows(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(Spectrum { eigenvalues, eigenvectors: Some(vecs) })
}

/// Eigenvalues only, descending.
pub fn eigvalsh(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let h = hermitize(a)?;
    let mut ev: Vec<f64> = h.to_nalgebra().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    Ok(ev)
}

pub fn min_eigenvalue(a: &ComplexMatrix) -> Result<f64> {
    Ok(eigvalsh(a)?.last().copied().unwrap_or(f64::NAN))
}

/// Singular values of a matrix of any shape, descending.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = a.to_nalgebra().singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::NonSquare { rows: a.rows(), cols: a.cols() });
    }
    Ok(singular_values(a).iter().sum())
}

/// Nearest positive semidefinite matrix in Frobenius norm: negative
/// eigenvalues are clipped to zero.
pub fn project_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spec = hermitian_eig(a)?;
    Ok(reassemble(&spec, |l| l.max(0.0)))
}

/// `V f(Λ) V^H` from a spectrum with eigenvectors.
pub fn reassemble(spec: &Spectrum, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let v = spec.eigenvectors.as_ref().expect("spectrum without eigenvectors");
    let n = v.rows();
    let weights: Vec<f64> = spec.eigenvalues.iter().map(|&l| f(l)).collect();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for i in 0..n {
            let vi = v[(i, k)] * w;
            for j in 0..n {
                out[(i, j)] += vi * v[(j, k)].conj();
            }
        }
    }
    out.hermitian_part()
}

fn validate_subset(subset: &[usize], factors: usize) -> Result<()> {
    let mut seen = vec![false; factors];
    for &s in subset {
        if s >= factors || seen[s] {
            return Err(Error::BadSubset { subset: subset.to_vec(), factors });
        }
        seen[s] = true;
    }
    Ok(())
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for f in (0..dims.len().saturating_sub(1)).rev() {
        s[f] = s[f + 1] * dims[f + 1];
    }
    s
}

/// Partial transpose of a matrix laid out over `dims`, transposing the
/// factors listed in `subset`. No validation beyond shapes.
pub fn partial_transpose_raw(m: &ComplexMatrix, dims: &[usize], subset: &[usize]) -> ComplexMatrix {
    let n = m.rows();
    debug_assert_eq!(dims.iter().product::<usize>(), n);
    let st = strides(dims);
    let digit = |idx: usize, f: usize| (idx / st[f]) % dims[f];
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let (mut nr, mut nc) = (r, c);
            for &f in subset {
                let (dr, dc) = (digit(r, f), digit(c, f));
                nr = nr + dc * st[f] - dr * st[f];
                nc = nc + dr * st[f] - dc * st[f];
            }
            out[(nr, nc)] = m[(r, c)];
        }
    }
    out
}

pub fn partial_transpose(rho: &DensityMatrix, subset: &[usize]) -> Result<ComplexMatrix> {
    if rho.basis() == Basis::Dicke {
        return Err(Error::DickeBasisUnsupported);
    }
    validate_subset(subset, rho.dims().len())?;
    Ok(partial_transpose_raw(rho.matrix(), rho.dims(), subset))
}

/// Trace over the factors in `subset`; returns the reduced matrix and the
/// dims of the kept factors.
pub fn partial_trace_raw(m: &ComplexMatrix, dims: &[usize], subset: &[usize]) -> (ComplexMatrix, Vec<usize>) {
    let n = m.rows();
    let st = strides(dims);
    let kept: Vec<usize> = (0..dims.len()).filter(|f| !subset.contains(f)).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&f| dims[f]).collect();
    let kst = strides(&kept_dims);
    let out_n: usize = kept_dims.iter().product();
    let digit = |idx: usize, f: usize| (idx / st[f]) % dims[f];
    let reduced = |idx: usize| kept.iter().zip(&kst).map(|(&f, &s)| digit(idx, f) * s).sum::<usize>();
    let mut out = ComplexMatrix::zeros(out_n, out_n);
    for r in 0..n {
        for c in 0..n {
            if subset.iter().all(|&f| digit(r, f) == digit(c, f)) {
                out[(reduced(r), reduced(c))] += m[(r, c)];
            }
        }
    }
    (out, kept_dims)
}

pub fn partial_trace(rho: &DensityMatrix, subset: &[usize]) -> Result<DensityMatrix> {
    if rho.basis() == Basis::Dicke {
        return Err(Error::DickeBasisUnsupported);
    }
    validate_subset(subset, rho.dims().len())?;
    let (m, dims) = partial_trace_raw(rho.matrix(), rho.dims(), subset);
    Ok(DensityMatrix::from_parts(m.hermitian_part(), dims, Basis::Computational))
}

/// Reorders tensor factors: factor `f` of the output is factor `order[f]` of
/// the input. Returns the permuted matrix and its dims.
pub fn permute_subsystems(m: &ComplexMatrix, dims: &[usize], order: &[usize]) -> (ComplexMatrix, Vec<usize>) {
    let n = m.rows();
    let st = strides(dims);
    let new_dims: Vec<usize> = order.iter().map(|&f| dims[f]).collect();
    let nst = strides(&new_dims);
    let map = |idx: usize| -> usize {
        order.iter().zip(&nst).map(|(&f, &s)| ((idx / st[f]) % dims[f]) * s).sum()
    };
    let perm: Vec<usize> = (0..n).map(map).collect();
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            out[(perm[r], perm[c])] = m[(r, c)];
        }
    }
    (out, new_dims)
}

/// Realignment `R[(i,j),(k,l)] = <i k| rho |j l>`: rows indexed by the pair
/// of A indices, columns by the pair of B indices.
pub fn realign_raw(m: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(da * da, db * db, |row, col| {
        let (i, j) = (row / da, row % da);
        let (k, l) = (col / db, col % db);
        m[(i * db + k, j * db + l)]
    })
}

pub fn realign(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let (da, db) = rho.bipartite_dims()?;
    Ok(realign_raw(rho.matrix(), da, db))
}

/// Inverse of [`realign_raw`].
pub fn unrealign(r: &ComplexMatrix, da: usize, db: usize) -> Result<ComplexMatrix> {
    if r.rows() != da * da || r.cols() != db * db {
        return Err(Error::ShapeMismatch(format!(
            "realigned matrix is {}x{}, expected {}x{}",
            r.rows(),
            r.cols(),
            da * da,
            db * db
        )));
    }
    let n = da * db;
    Ok(ComplexMatrix::from_fn(n, n, |row, col| {
        let (i, k) = (row / db, row % db);
        let (j, l) = (col / db, col % db);
        r[(i * da + j, k * db + l)]
    }))
}

/// `rows x cols` matrix of independent standard complex Gaussians, real and
/// imaginary parts each N(0, 1/2).
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * s, im * s)
    })
}

/// `G G^H / Tr(G G^H)` for a square Ginibre matrix: a sample from the
/// Hilbert-Schmidt measure, returned as a raw matrix.
pub fn random_hs_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    random_induced_matrix(d, d, rng)
}

/// Sample from the measure induced by partial trace of a Haar-random pure
/// state on `d x ancilla`. `ancilla = d` is the Hilbert-Schmidt measure;
/// larger ancillas concentrate around `I/d`.
pub fn random_induced_matrix<R: Rng + ?Sized>(d: usize, ancilla: usize, rng: &mut R) -> ComplexMatrix {
    if d <= 1 {
        return ComplexMatrix::identity(d);
    }
    let g = ginibre(d, ancilla.max(1), rng);
    let w = g.matmul(&g.adjoint());
    let t = w.trace().re;
    w.scale(1.0 / t).hermitian_part()
}

pub fn random_density_hs<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    DensityMatrix::from_parts(random_hs_matrix(d, rng), vec![d.max(1)], Basis::Computational)
}

/// Haar-ish random unit vector (normalized complex Gaussian).
pub fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<C64> {
    let g = ginibre(d, 1, rng).into_data();
    let n = g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    g.into_iter().map(|z| z / n).collect()
}
