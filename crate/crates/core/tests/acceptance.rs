//! End-to-end acceptance checks. Runs without the libtest harness and prints
//! one PASS/FAIL line per check; exits nonzero if any check fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symsep::criteria::{
    criterion_ccnr, criterion_corr_psd, criterion_covariance, criterion_eta_psd, criterion_ppt, equivalence_report,
    CriterionId,
};
use symsep::extension::{find_extension, gap_is_stable, verify_extension, ExtensionProblem, ExtensionStatus};
use symsep::linalg::{
    eigvalsh, hermitian_eig, min_eigenvalue, partial_transpose, random_hs_matrix, random_unit_vector, reassemble,
    Basis, ComplexMatrix, DensityMatrix, C64,
};
use symsep::search::{hill_climb, hill_climb_from, SearchConfig};
use symsep::states::{
    breuer, embed_symmetric, ppt_threshold, rho_be4, rho_be5, BE4_DIAGONAL_MILLI, BE5_DIAGONAL_MILLI,
};
use symsep::symspace::{
    compressed_pt_spectrum, flip, structural_zero_count, sym_subspace_isometry, Symmetry, SymmetricState,
};
use symsep::tol;

/// Outcome of one check: pass flag and a one-line summary.
type Outcome = (bool, String);
type Check = (&'static str, fn() -> Outcome);

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn breuer_threshold() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (d, expect) in [(4, 1.0 / 6.0), (6, 1.0 / 8.0)] {
        let t0 = Instant::now();
        let t = ppt_threshold(|l| breuer(d, l), (0.0, 1.0), &[0]).unwrap();
        let el = t0.elapsed();
        ok &= (t - expect).abs() <= 1e-8 && within(el, 5.0);
        parts.push(format!("d={d}: {t:.10} (expect {expect:.10}, tol 1e-8, {:.2}s)", el.as_secs_f64()));
    }
    (ok, parts.join("; "))
}

fn embedded_threshold() -> Outcome {
    let t0 = Instant::now();
    let t = ppt_threshold(|l| embed_symmetric(2, 4, l), (0.0, 1.0), &[0]).unwrap();
    let el = t0.elapsed();
    let ok = (t - 0.062).abs() <= 0.002 && within(el, 10.0);
    (ok, format!("D=2 d=4: {t:.6} (expect 0.062 +- 0.002, {:.2}s)", el.as_secs_f64()))
}

fn split_min(s: &SymmetricState, split: (usize, usize)) -> f64 {
    compressed_pt_spectrum(s, split).unwrap().min()
}

fn be4_certificate() -> Outcome {
    let t0 = Instant::now();
    let s = rho_be4();
    let printed: i64 = BE4_DIAGONAL_MILLI.iter().sum();
    let trace = s.matrix().trace().re;
    let min = min_eigenvalue(s.matrix()).unwrap();
    let pt22 = split_min(&s, (2, 2));
    let pt13 = split_min(&s, (1, 3));
    let el = t0.elapsed();
    let ok = printed == 1000
        && (trace - 1.0).abs() < 1e-15
        && min >= -1e-10
        && pt22 >= -1e-10
        && pt13 < -1e-4
        && within(el, 1.0);
    (
        ok,
        format!(
            "trace {trace} (printed {printed}/1000), min eig {min:.4e}, PT(2,2) min {pt22:.4e} (>= -1e-10), \
             PT(1,3) min {pt13:.4e} (< -1e-4), {:.3}s",
            el.as_secs_f64()
        ),
    )
}

fn be5_certificate() -> Outcome {
    let t0 = Instant::now();
    let s = rho_be5();
    let printed: i64 = BE5_DIAGONAL_MILLI.iter().sum();
    let trace = s.matrix().trace().re;
    let min = min_eigenvalue(s.matrix()).unwrap();
    let pt14 = split_min(&s, (1, 4));
    let pt23 = split_min(&s, (2, 3));
    let mut ok = printed == 1000 && (trace - 1.0).abs() < 1e-15 && min >= -1e-10 && pt14 >= -1e-10 && pt23 >= -1e-10;
    let mut parts = vec![format!(
        "trace {trace} (printed {printed}/1000), min eig {min:.4e}, PT(1,4) {pt14:.4e}, PT(2,3) {pt23:.4e}"
    )];
    let mut found = false;
    for m in [6, 7] {
        let mut problem = ExtensionProblem::new(s.clone(), m);
        problem.max_iter = 50_000;
        let r = find_extension(&problem).unwrap();
        let window = r.final_window();
        let stable = gap_is_stable(window, problem.tol_feas);
        parts.push(format!(
            "M={m}: {:?}, gap {:.4e} (> 1e-6), stable over last {} of {} iterations: {stable}",
            r.status,
            r.residual_gap,
            window.len(),
            r.iterations
        ));
        if r.status == ExtensionStatus::InfeasibleEvidence && r.residual_gap > 1e-6 && stable {
            found = true;
            break;
        }
    }
    let el = t0.elapsed();
    ok &= found && within(el, 300.0);
    parts.push(format!("{:.1}s", el.as_secs_f64()));
    (ok, parts.join("; "))
}

/// Hilbert-Schmidt sample on the symmetric subspace of `C^d (x) C^d`.
fn random_symmetric_bipartite(d: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let v = sym_subspace_isometry(d);
    let sigma = random_hs_matrix(v.cols(), rng);
    DensityMatrix::new(sigma.conjugate_by(&v), vec![d, d], Basis::Computational).unwrap()
}

fn observation_one() -> Outcome {
    let t0 = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for d in [2, 3, 4] {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + d as u64);
        let (mut inconsistent, mut worst_gap, mut ppt_count) = (0, 0.0f64, 0);
        for _ in 0..1000 {
            let rho = random_symmetric_bipartite(d, &mut rng);
            let rep = equivalence_report(&rho, tol::CRITERION).unwrap();
            assert_eq!(rep.symmetry, Symmetry::Symmetric);
            if !rep.consistent() {
                inconsistent += 1;
            }
            if rep.verdict(CriterionId::Ppt).unwrap().satisfied {
                ppt_count += 1;
            }
            worst_gap = worst_gap.max(rep.realignment_gap.abs());
        }
        ok &= inconsistent == 0 && worst_gap < 1e-8;
        parts.push(format!(
            "d={d}: {inconsistent}/1000 inconsistent, {ppt_count} PPT, max |realign - PT norm| {worst_gap:.2e}"
        ));
    }
    let el = t0.elapsed();
    ok &= within(el, 120.0);
    parts.push(format!("dead band {:e}, {:.1}s", tol::DEAD_BAND, el.as_secs_f64()));
    (ok, parts.join("; "))
}

fn random_invariant(d: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let m = random_hs_matrix(d * d, rng);
    let f = flip(d);
    let twirled = (&m + &f.matmul(&m).matmul(&f)).scale(0.5);
    DensityMatrix::new(twirled, vec![d, d], Basis::Computational).unwrap()
}

fn observation_two() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2000);
    let (mut inconsistent, mut eta_vs_corr, mut eta_vs_cov, mut sum_out, mut symmetric, mut sym_sum_off) =
        (0, 0, 0, 0, 0, 0);
    let passes = |m: f64| m >= -tol::DEAD_BAND;
    for _ in 0..1000 {
        let rho = random_invariant(3, &mut rng);
        let rep = equivalence_report(&rho, tol::CRITERION).unwrap();
        let m = |id| rep.verdict(id).unwrap().margin;
        if !rep.consistent() {
            inconsistent += 1;
        }
        if passes(m(CriterionId::EtaPsd)) != passes(m(CriterionId::CorrPsd)) {
            eta_vs_corr += 1;
        }
        if passes(m(CriterionId::EtaPsd)) != passes(m(CriterionId::CovNorm))
            || passes(m(CriterionId::EtaPsd)) != passes(m(CriterionId::CovDiag))
        {
            eta_vs_cov += 1;
        }
        if rep.lambda_sum.abs() > 1.0 + 1e-8 {
            sum_out += 1;
        }
        if rep.symmetry == Symmetry::Symmetric {
            symmetric += 1;
            if (rep.lambda_sum - 1.0).abs() > 1e-8 {
                sym_sum_off += 1;
            }
        }
    }
    let el = t0.elapsed();
    let ok = inconsistent == 0 && sum_out == 0 && sym_sum_off == 0 && within(el, 120.0);
    (
        ok,
        format!(
            "d=3, 1000 samples: {inconsistent} with (i)/(iv)/(v) disagreeing ((i) vs (iv): {eta_vs_corr}, \
             (i) vs (v): {eta_vs_cov}); sum of Lambda outside [-1,1]: {sum_out}; symmetric samples {symmetric} \
             with sum != 1: {sym_sum_off}; {:.1}s",
            el.as_secs_f64()
        ),
    )
}

fn compressed_oracle() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3000);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let s = SymmetricState::new(random_hs_matrix(5, &mut rng), 4).unwrap();
        let full = s.expand_full();
        for (split, subset) in [((1, 3), vec![0]), ((2, 2), vec![0, 1])] {
            let mut ev = eigvalsh(&partial_transpose(&full, &subset).unwrap()).unwrap();
            let structural = structural_zero_count(4, split).unwrap();
            ev.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
            let mut kept = ev[structural..].to_vec();
            kept.sort_by(|a, b| b.total_cmp(a));
            let compressed = compressed_pt_spectrum(&s, split).unwrap().eigenvalues;
            assert_eq!(kept.len(), compressed.len());
            for (a, b) in kept.iter().zip(&compressed) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    let el = t0.elapsed();
    (
        worst < 1e-8 && within(el, 60.0),
        format!("100 states, splits 1:3 and 2:2: max eigenvalue deviation {worst:.2e} (tol 1e-8), {:.2}s", el.as_secs_f64()),
    )
}

fn random_weights(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

fn separability_necessity() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4000);
    let d = 3;
    let mut worst = f64::INFINITY;
    let mut worst_id = CriterionId::Ppt;
    for _ in 0..500 {
        let terms = rng.random_range(1..=10);
        let mut m = ComplexMatrix::zeros(d * d, d * d);
        for w in random_weights(terms, &mut rng) {
            let a = random_unit_vector(d, &mut rng);
            let aa: Vec<C64> = a.iter().flat_map(|x| a.iter().map(move |y| x * y)).collect();
            m = &m + &ComplexMatrix::outer(&aa).scale(w);
        }
        let rho = DensityMatrix::new(m, vec![d, d], Basis::Computational).unwrap();
        let (norm, diag) = criterion_covariance(&rho, tol::CRITERION).unwrap();
        let verdicts = [
            criterion_eta_psd(&rho, tol::CRITERION).unwrap(),
            criterion_ppt(&rho, tol::CRITERION).unwrap(),
            criterion_ccnr(&rho, tol::CRITERION).unwrap(),
            criterion_corr_psd(&rho, tol::CRITERION).unwrap(),
            norm,
            diag,
        ];
        for v in verdicts {
            if v.margin < worst {
                worst = v.margin;
                worst_id = v.criterion;
            }
        }
    }
    let el = t0.elapsed();
    (
        worst >= -1e-8 && within(el, 60.0),
        format!(
            "500 mixtures of up to 10 symmetric products, d=3: smallest margin {worst:.3e} ({}), tol -1e-8, {:.2}s",
            worst_id.name(),
            el.as_secs_f64()
        ),
    )
}

fn qubit(rng: &mut ChaCha8Rng) -> [C64; 2] {
    let v = random_unit_vector(2, rng);
    [v[0], v[1]]
}

fn extension_sanity() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5000);
    let mut parts = Vec::new();

    let n = 3;
    let psi = qubit(&mut rng);
    let product = SymmetricState::product(psi, n);
    let r = find_extension(&ExtensionProblem::new(product.clone(), n + 2)).unwrap();
    let product_ok = r.status == ExtensionStatus::Feasible
        && r.witness.as_ref().is_some_and(|w| verify_extension(w, &product, 1e-7).unwrap().ok);
    parts.push(format!("product N={n} M={}: {:?} after {} iterations", n + 2, r.status, r.iterations));

    let weights = random_weights(3, &mut rng);
    let psis: Vec<[C64; 2]> = (0..3).map(|_| qubit(&mut rng)).collect();
    let mixture = |qubits: usize| -> SymmetricState {
        let m = psis.iter().zip(&weights).fold(ComplexMatrix::zeros(qubits + 1, qubits + 1), |acc, (p, &w)| {
            &acc + &SymmetricState::product(*p, qubits).matrix().scale(w)
        });
        SymmetricState::new(m, qubits).unwrap()
    };
    let target = mixture(n);
    let oracle = mixture(n + 1);
    let oracle_ok = verify_extension(&oracle, &target, 1e-7).unwrap().ok;
    let r = find_extension(&ExtensionProblem::new(target.clone(), n + 1)).unwrap();
    let witness = r.witness.clone();
    let mixture_ok = oracle_ok
        && r.status == ExtensionStatus::Feasible
        && witness.as_ref().is_some_and(|w| verify_extension(w, &target, 1e-7).unwrap().ok);
    parts.push(format!(
        "separable mixture N={n} M={}: {:?}, product-extension oracle verifies: {oracle_ok}",
        n + 1,
        r.status
    ));

    // push the smallest eigenvalue of the oracle extension to -1e-3
    let spec = hermitian_eig(oracle.matrix()).unwrap();
    let last = spec.eigenvalues.len() - 1;
    let bent = reassemble(&spec, |x| if x == spec.eigenvalues[last] { -1e-3 } else { x });
    let bad = SymmetricState::unchecked(bent, n + 1).unwrap();
    let check = verify_extension(&bad, &target, 1e-7).unwrap();
    let rejected = !check.ok && check.min_eigenvalue < -5e-4 && check.violations.iter().any(|v| v.contains("PSD"));
    parts.push(format!("perturbed witness rejected: {rejected} (min eig {:.2e})", check.min_eigenvalue));

    let el = t0.elapsed();
    parts.push(format!("{:.2}s", el.as_secs_f64()));
    (product_ok && mixture_ok && rejected && within(el, 120.0), parts.join("; "))
}

fn search_audit() -> Outcome {
    let t0 = Instant::now();
    let mut config = SearchConfig::new(4, 6000);
    config.epsilon = 0.02;
    config.max_iter = 10_000;
    let r = hill_climb(&config).unwrap();
    let audit = r.audit(&config);
    let seeded = hill_climb_from(&config, rho_be4()).unwrap();
    let immediate = seeded.success && seeded.iterations == 0 && seeded.audit(&config).is_ok();
    let el = t0.elapsed();
    (
        audit.is_ok() && immediate && within(el, 180.0),
        format!(
            "N=4 eps 0.02: {} iterations, {} accepted steps, success {}, final lambda_min {:.3e}, audit {:?}; \
             seeded with the 4-qubit bound entangled state: immediate success {immediate}; {:.2}s",
            r.iterations,
            r.lambda_trace.len() - 1,
            r.success,
            r.final_lambda_min(),
            audit,
            el.as_secs_f64()
        ),
    )
}

fn main() -> ExitCode {
    let checks: [Check; 10] = [
        ("breuer family PPT threshold", breuer_threshold),
        ("embedded family PPT threshold", embedded_threshold),
        ("4-qubit bound entangled state", be4_certificate),
        ("5-qubit PPT state without symmetric extension", be5_certificate),
        ("criteria equivalence on symmetric states", observation_one),
        ("criteria equivalence on invariant states", observation_two),
        ("compressed partial transpose vs full space", compressed_oracle),
        ("criteria hold on separable symmetric states", separability_necessity),
        ("extension solver sanity", extension_sanity),
        ("hill-climb audit", search_audit),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let (ok, detail) = match panic::catch_unwind(AssertUnwindSafe(check)) {
            Ok(o) => o,
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        if !ok {
            failed += 1;
        }
        println!("{} {:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
