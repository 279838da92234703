//! Explicit states: Breuer's invariant family, the two ancilla embeddings,
//! the tabulated symmetric bound entangled states of four and five qubits,
//! and a bisection search for the PPT threshold of a one-parameter family.

use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, partial_transpose, permute_subsystems, Basis, ComplexMatrix, DensityMatrix, C64};
use crate::symspace::{antisym_projector, classify, equal_bipartite_dim, flip, sym_projector, SymmetricState, Symmetry};

fn check_even(d: usize) -> Result<()> {
    if d < 4 || !d.is_multiple_of(2) {
        return Err(Error::OddDimension(d));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::BadLambda(lambda));
    }
    Ok(())
}

/// `(1/sqrt d) sum_k (-1)^k |k>|d-1-k>`, antisymmetric under the flip for even
/// `d`. For `d = 4` this is `(|03> - |12> + |21> - |30>)/2`.
pub fn singlet(d: usize) -> Result<Vec<C64>> {
    check_even(d)?;
    let amp = 1.0 / (d as f64).sqrt();
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    for k in 0..d {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        v[k * d + (d - 1 - k)] = C64::new(sign * amp, 0.0);
    }
    Ok(v)
}

/// Symmetric projector normalized to unit trace.
pub fn normalized_sym_projector(d: usize) -> ComplexMatrix {
    sym_projector(d).scale(2.0 / (d * (d + 1)) as f64)
}

/// Antisymmetric projector normalized to unit trace.
pub fn normalized_antisym_projector(d: usize) -> ComplexMatrix {
    antisym_projector(d).scale(2.0 / (d * (d - 1)) as f64)
}

/// `lambda |Psi_0><Psi_0| + (1 - lambda) P_s / [d(d+1)/2]`
pub fn breuer(d: usize, lambda: f64) -> Result<DensityMatrix> {
    check_lambda(lambda)?;
    let psi = ComplexMatrix::outer(&singlet(d)?);
    let m = &psi.scale(lambda) + &normalized_sym_projector(d).scale(1.0 - lambda);
    DensityMatrix::new(m, vec![d, d], Basis::Computational)
}

/// Factor order (A', B', A, B) -> (A', A, B', B).
const PARTY_ORDER: [usize; 4] = [0, 2, 1, 3];

/// `1/2 [ |10><10|_{A'B'} (x) rho + |01><01|_{A'B'} (x) F rho F ]`, returned
/// with each party holding (ancilla qubit, original system).
pub fn embed_invariant(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let d = equal_bipartite_dim(rho)?;
    let f = flip(d);
    let swapped = f.matmul(rho.matrix()).matmul(&f);
    let mut p10 = ComplexMatrix::zeros(4, 4);
    p10[(2, 2)] = C64::new(1.0, 0.0);
    let mut p01 = ComplexMatrix::zeros(4, 4);
    p01[(1, 1)] = C64::new(1.0, 0.0);
    let m = (&p10.kron(rho.matrix()) + &p01.kron(&swapped)).scale(0.5);
    let (m, _) = permute_subsystems(&m, &[2, 2, d, d], &PARTY_ORDER);
    DensityMatrix::new(m, vec![2 * d, 2 * d], Basis::Computational)
}

/// Conditional state of the original pair after finding the ancillas of an
/// [`embed_invariant`] state in `|10>`.
pub fn measure_ancillas_10(embedded: &DensityMatrix) -> Result<DensityMatrix> {
    let (two_d, _) = embedded.bipartite_dims()?;
    let d = two_d / 2;
    // A = (a', i) has index a' d + i; keep a' = 1 on A and b' = 0 on B
    let m = ComplexMatrix::from_fn(d * d, d * d, |r, c| {
        let (i, k) = (r / d, r % d);
        let (j, l) = (c / d, c % d);
        embedded.matrix()[((d + i) * two_d + k, (d + j) * two_d + l)]
    });
    let p = m.trace().re;
    DensityMatrix::new(m.scale(1.0 / p), vec![d, d], Basis::Computational)
}

/// `lambda Pi_a^D (x) |Psi_0><Psi_0| + (1 - lambda) Pi_s^D (x) Pi_s^d`,
/// returned with each party holding (D-system, d-system). The result is
/// checked to lie on the symmetric subspace.
pub fn embed_symmetric(big_d: usize, d: usize, lambda: f64) -> Result<DensityMatrix> {
    check_lambda(lambda)?;
    if big_d < 2 {
        return Err(Error::BadParams(format!("ancilla dimension {big_d} < 2")));
    }
    let psi = ComplexMatrix::outer(&singlet(d)?);
    let anti = normalized_antisym_projector(big_d).kron(&psi).scale(lambda);
    let sym = normalized_sym_projector(big_d).kron(&normalized_sym_projector(d)).scale(1.0 - lambda);
    let (m, _) = permute_subsystems(&(&anti + &sym), &[big_d, big_d, d, d], &PARTY_ORDER);
    let rho = DensityMatrix::new(m, vec![big_d * d, big_d * d], Basis::Computational)?;
    if classify(&rho)? != Symmetry::Symmetric {
        return Err(Error::NotApplicable("symmetric embedding left the symmetric subspace".into()));
    }
    Ok(rho)
}

/// Diagonal of the four-qubit state, in thousandths.
pub const BE4_DIAGONAL_MILLI: [i64; 5] = [220, 176, 167, 254, 183];
/// Weight of `|3><0| + |0><3|` in the four-qubit state.
pub const BE4_COHERENCE: f64 = -0.059;
/// Diagonal of the five-qubit state, in thousandths.
pub const BE5_DIAGONAL_MILLI: [i64; 6] = [170, 174, 153, 182, 147, 174];
/// Weight of `|4><0| + |0><4|` in the five-qubit state.
pub const BE5_COHERENCE: f64 = -0.0137;

fn tabulated(diag_milli: &[i64], coherence: f64, far: usize) -> ComplexMatrix {
    let diag: Vec<f64> = diag_milli.iter().map(|&x| x as f64 / 1000.0).collect();
    let mut m = ComplexMatrix::diag(&diag);
    m[(far, 0)] = C64::new(coherence, 0.0);
    m[(0, far)] = C64::new(coherence, 0.0);
    m
}

/// Four-qubit symmetric state, PPT across 2:2 and NPT across 1:3:
/// `diag(0.22, 0.176, 0.167, 0.254, 0.183) - 0.059 (|3><0| + |0><3|)` in the
/// Dicke basis.
pub fn rho_be4() -> SymmetricState {
    SymmetricState::new(tabulated(&BE4_DIAGONAL_MILLI, BE4_COHERENCE, 3), 4).expect("tabulated state is valid")
}

/// Five-qubit symmetric state that is PPT across every bipartition:
/// `diag(0.17, 0.174, 0.153, 0.182, 0.147, 0.174) - 0.0137 (|4><0| + |0><4|)`.
pub fn rho_be5() -> SymmetricState {
    SymmetricState::new(tabulated(&BE5_DIAGONAL_MILLI, BE5_COHERENCE, 4), 5).expect("tabulated state is valid")
}

/// Number of evenly spaced samples used to check monotonicity.
const MONOTONE_SAMPLES: usize = 20;
/// Bisection stops once the bracket is this narrow.
const BISECTION_TOL: f64 = 1e-9;

/// Minimum eigenvalue of the partial transpose over `partition`.
pub fn ppt_margin(rho: &DensityMatrix, partition: &[usize]) -> Result<f64> {
    min_eigenvalue(&partial_transpose(rho, partition)?)
}

/// Largest `lambda` in `range` for which `family(lambda)` is PPT across
/// `partition`. The margin must be nonincreasing in `lambda`; this is checked
/// on a grid before bisecting.
pub fn ppt_threshold<F>(family: F, range: (f64, f64), partition: &[usize]) -> Result<f64>
where
    F: Fn(f64) -> Result<DensityMatrix>,
{
    ppt_threshold_with(family, range, partition, BISECTION_TOL)
}

/// [`ppt_threshold`] with the bisection stopping at bracket width `width`.
pub fn ppt_threshold_with<F>(family: F, range: (f64, f64), partition: &[usize], width: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<DensityMatrix>,
{
    let (lo, hi) = range;
    if !(width > 0.0) {
        return Err(Error::BadParams(format!("bisection width {width}")));
    }
    if !(lo < hi) {
        return Err(Error::BadParams(format!("empty range [{lo}, {hi}]")));
    }
    let margin = |x: f64| -> Result<f64> { ppt_margin(&family(x)?, partition) };
    let mut prev = f64::INFINITY;
    for i in 0..MONOTONE_SAMPLES {
        let x = lo + (hi - lo) * i as f64 / (MONOTONE_SAMPLES - 1) as f64;
        let m = margin(x)?;
        if m > prev + 1e-12 {
            return Err(Error::NotMonotone { at: x });
        }
        prev = m;
    }
    if margin(lo)? < 0.0 || margin(hi)? >= 0.0 {
        return Err(Error::NoSignChange { lo, hi });
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > width {
        let mid = 0.5 * (a + b);
        if margin(mid)? >= 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigvalsh, partial_trace, random_density_hs};
    use crate::symspace::dicke_embedding;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn singlet_forms() {
        let v = singlet(4).unwrap();
        let mut expect = vec![C64::new(0.0, 0.0); 16];
        expect[3] = C64::new(0.5, 0.0);
        expect[6] = C64::new(-0.5, 0.0);
        expect[9] = C64::new(0.5, 0.0);
        expect[12] = C64::new(-0.5, 0.0);
        assert_eq!(v, expect);
        for d in [4, 6, 8] {
            let v = singlet(d).unwrap();
            let f = flip(d);
            let fv: Vec<C64> = (0..d * d).map(|r| (0..d * d).map(|c| f[(r, c)] * v[c]).sum()).collect();
            for (a, b) in fv.iter().zip(&v) {
                assert!((a + b).norm() < 1e-15);
            }
            let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-14);
        }
        assert!(matches!(singlet(5), Err(Error::OddDimension(5))));
        assert!(matches!(singlet(2), Err(Error::OddDimension(2))));
    }

    #[test]
    fn breuer_examples() {
        let b0 = breuer(4, 0.0).unwrap();
        assert!(b0.matrix().max_abs_diff(&normalized_sym_projector(4)) < 1e-15);
        assert!(ppt_margin(&b0, &[0]).unwrap() > 0.0);
        let edge = breuer(4, 1.0 / 6.0).unwrap();
        assert!(ppt_margin(&edge, &[0]).unwrap().abs() < 1e-9);
        assert!(ppt_margin(&breuer(4, 0.2).unwrap(), &[0]).unwrap() < -1e-3);
        assert_eq!(classify(&breuer(6, 0.0).unwrap()).unwrap(), Symmetry::Symmetric);
        for l in [0.3, 1.0] {
            assert_eq!(classify(&breuer(6, l).unwrap()).unwrap(), Symmetry::Invariant);
        }
        assert!(matches!(breuer(4, 1.5), Err(Error::BadLambda(_))));
        assert!(matches!(breuer(5, 0.1), Err(Error::OddDimension(5))));
    }

    #[test]
    fn embed_invariant_examples() {
        let mut zz = ComplexMatrix::zeros(4, 4);
        zz[(0, 0)] = C64::new(1.0, 0.0);
        let zz = DensityMatrix::new(zz, vec![2, 2], Basis::Computational).unwrap();
        let e = embed_invariant(&zz).unwrap();
        assert_eq!(e.dims(), &[4, 4]);
        assert_eq!(classify(&e).unwrap(), Symmetry::Invariant);
        assert!(ppt_margin(&e, &[0]).unwrap() >= -1e-14);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = C64::new(0.0, 0.0);
        let s = DensityMatrix::pure(&[z, C64::new(h, 0.0), C64::new(-h, 0.0), z], vec![2, 2]).unwrap();
        let e = embed_invariant(&s).unwrap();
        assert!(ppt_margin(&e, &[0]).unwrap() < -0.1);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let r = random_density_hs(9, &mut rng);
        let r = DensityMatrix::new(r.into_matrix(), vec![3, 3], Basis::Computational).unwrap();
        let back = measure_ancillas_10(&embed_invariant(&r).unwrap()).unwrap();
        assert!(back.matrix().max_abs_diff(r.matrix()) < 1e-14);
    }

    #[test]
    fn embed_symmetric_examples() {
        assert!(ppt_margin(&embed_symmetric(2, 4, 0.05).unwrap(), &[0]).unwrap() > 0.0);
        assert!(ppt_margin(&embed_symmetric(2, 4, 0.08).unwrap(), &[0]).unwrap() < 0.0);
        let zero = embed_symmetric(3, 4, 0.0).unwrap();
        let rep = crate::criteria::equivalence_report(&zero, 1e-10).unwrap();
        assert!(rep.verdicts.iter().all(|v| v.satisfied));
        for lambda in [0.0, 0.05, 0.4, 1.0] {
            let rho = embed_symmetric(2, 4, lambda).unwrap();
            // trace out the ancillas: reorder to (A', B', A, B) and trace 0, 1
            let (m, dims) = permute_subsystems(rho.matrix(), &[2, 4, 2, 4], &[0, 2, 1, 3]);
            let full = DensityMatrix::new(m, dims, Basis::Computational).unwrap();
            let reduced = partial_trace(&full, &[0, 1]).unwrap();
            assert!(reduced.matrix().max_abs_diff(breuer(4, lambda).unwrap().matrix()) < 1e-12);
        }
    }

    #[test]
    fn tabulated_states() {
        assert_eq!(BE4_DIAGONAL_MILLI.iter().sum::<i64>(), 1000);
        assert_eq!(BE5_DIAGONAL_MILLI.iter().sum::<i64>(), 1000);
        let be4 = rho_be4();
        assert!((be4.matrix().trace().re - 1.0).abs() < 1e-15);
        assert!(eigvalsh(be4.matrix()).unwrap()[4] > 0.0);
        assert_eq!(be4.matrix()[(3, 0)].re, -0.059);
        let be5 = rho_be5();
        assert!((be5.matrix().trace().re - 1.0).abs() < 1e-15);
        assert_eq!(be5.matrix()[(0, 4)].re, -0.0137);
        // the four-qubit state maps to a symmetric 3x3 bipartite state
        let bip = crate::symspace::to_bipartite(&be4, (2, 2)).unwrap();
        assert_eq!(bip.dims(), &[3, 3]);
        assert_eq!(classify(&bip).unwrap(), Symmetry::Symmetric);
        assert_eq!(dicke_embedding(4, (2, 2)).unwrap().isometry.rows(), 9);
    }

    #[test]
    fn threshold_breuer() {
        let t = ppt_threshold(|l| breuer(4, l), (0.0, 1.0), &[0]).unwrap();
        assert!((t - 1.0 / 6.0).abs() < 1e-8);
    }

    #[test]
    fn threshold_errors() {
        let e = ppt_threshold(|l| breuer(4, l), (0.0, 0.1), &[0]);
        assert!(matches!(e, Err(Error::NoSignChange { .. })));
        // increasing margin
        let e = ppt_threshold(|l| breuer(4, 1.0 - l), (0.0, 1.0), &[0]);
        assert!(matches!(e, Err(Error::NotMonotone { .. })));
    }
}
