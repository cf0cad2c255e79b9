//! The full verification suite, scaled down to `q <= max_q`, runnable in
//! one invocation. Jobs are independent; `threads` caps the worker count
//! and the output order is fixed regardless of schedule.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use gh_scheme_core::cyclotomic::ring_axioms_check;
use gh_scheme_core::field::hyperplane_sum_cover_check;
use gh_scheme_core::gh;
use gh_scheme_core::scheme::{self, SchemeInstance};
use gh_scheme_core::spectral;
use gh_scheme_core::srg;
use gh_scheme_core::{FieldCtx, LinearMap};

type Job = (String, Box<dyn Fn() -> Result<(), String> + Send + Sync>);
type Outcome = (String, Result<(), String>);

/// The `(p, m)` pairs with `q = p^m <= max_q` used throughout.
fn field_params(max_q: u32) -> Vec<(u32, u32)> {
    [
        (2u32, 1u32),
        (3, 1),
        (2, 2),
        (5, 1),
        (7, 1),
        (2, 3),
        (3, 2),
        (2, 4),
        (5, 2),
        (3, 3),
    ]
    .into_iter()
    .filter(|&(p, m)| p.pow(m) <= max_q)
    .collect()
}

fn proper_subfield_orders(p: u32, m: u32) -> Vec<u32> {
    (1..m).filter(|s| m.is_multiple_of(*s)).map(|s| p.pow(s)).collect()
}

fn construction_job(p: u32, m: u32) -> Result<(), String> {
    let ctx = FieldCtx::new(p, m).map_err(|e| e.to_string())?;
    let q = ctx.q();
    let h = gh::multiplication_table(&ctx);
    let l = gh::subtraction_table(&ctx);
    gh::verify_gh(&h, q, 1).map_err(|e| format!("H: {e}"))?;
    let mm = gh::compose(&h, &l).map_err(|e| e.to_string())?;
    gh::verify_gh(&mm, q, q).map_err(|e| format!("M gh: {e}"))?;
    gh::verify_bush(&mm, q).map_err(|e| format!("M bush: {e}"))?;
    let sym = gh::symmetry_condition(&h, &l).map_err(|e| e.to_string())?;
    if !sym.passed() {
        return Err("symmetry condition failed".into());
    }
    for r in proper_subfield_orders(p, m) {
        let phi = LinearMap::subfield_trace(&ctx, r).map_err(|e| e.to_string())?;
        let pm = gh::apply_hom(&mm, &phi).map_err(|e| e.to_string())?;
        gh::verify_gh(&pm, r, q * q / r).map_err(|e| format!("phi(M) gh r={r}: {e}"))?;
        gh::verify_bush(&pm, q).map_err(|e| format!("phi(M) bush r={r}: {e}"))?;
        if r == 2 {
            gh::sign_relabel_orthogonality(&pm).map_err(|e| e.to_string())?;
        }
    }
    Ok(())
}

fn scheme_job(p: u32, m: u32, identity_too: bool) -> Result<(), String> {
    let ctx = FieldCtx::new(p, m).map_err(|e| e.to_string())?;
    let q = ctx.q();
    let mut maps = vec![LinearMap::trace(&ctx)];
    if identity_too && m > 1 {
        maps.push(LinearMap::identity(&ctx));
    }
    for phi in maps {
        let r = phi.target_order();
        let s = SchemeInstance::build(&ctx, &phi);
        let t = s.intersection_numbers().map_err(|e| e.to_string())?;
        scheme::closed_form_check(&t, q, r)
            .map_err(|(i, j)| format!("closed-form value failed at ({i},{j})"))?;
        if q <= 9 {
            let dense = s.intersection_numbers_dense().map_err(|e| e.to_string())?;
            if dense != t {
                return Err("dense tensor differs from fast path".into());
            }
        }
        if r == p {
            match scheme::final_term_reading(&s, &t) {
                Some(scheme::FinalTermReading::ExcludesLastClass)
                | Some(scheme::FinalTermReading::Both) => {}
                other => return Err(format!("unexpected product reading {other:?}")),
            }
        }
    }
    Ok(())
}

fn eigen_job(p: u32, m: u32) -> Result<(), String> {
    let ctx = FieldCtx::new(p, m).map_err(|e| e.to_string())?;
    let q = ctx.q() as i128;
    let phi = LinearMap::trace(&ctx);
    let s = SchemeInstance::build(&ctx, &phi);
    let brute = spectral::eigenmatrix_bruteforce(&s).map_err(|e| e.to_string())?;
    let closed = spectral::kloosterman_eigenmatrix(&ctx, &phi).map_err(|e| e.to_string())?;
    if !spectral::rows_match_up_to_permutation(&brute, &closed) {
        return Err("closed form does not match brute force".into());
    }
    if ctx.q() <= 9 {
        spectral::representative_independence(&ctx, &phi)
            .map_err(|w| format!("representative dependence at row {}", w.row))?;
    }
    if !brute.pq_identity_holds(q * q) {
        return Err("P*Q != q^2 I".into());
    }
    if spectral::self_duality_witness(&brute).is_none() {
        return Err("no self-duality witness".into());
    }
    Ok(())
}

fn fusion_job(q: u32) -> Result<(), String> {
    let (p, m) = match q {
        3 => (3, 1),
        4 => (2, 2),
        5 => (5, 1),
        7 => (7, 1),
        other => return Err(format!("unsupported fusion field {other}")),
    };
    let ctx = FieldCtx::new(p, m).map_err(|e| e.to_string())?;
    let s = SchemeInstance::build(&ctx, &LinearMap::identity(&ctx));
    let n = s.class_count();
    let mut merge_first: Vec<Vec<usize>> = vec![vec![0], vec![1, n - 1]];
    merge_first.extend((2..n - 1).map(|i| vec![i]));
    let fused = s.fuse(&merge_first).map_err(|e| format!("{e}"))?;
    if fused.class_count() != n - 1 {
        return Err("unexpected fused class count".into());
    }
    let hamming = s
        .fuse(&[vec![0], vec![1, n - 1], (2..n - 1).collect()])
        .map_err(|e| format!("{e}"))?;
    let t = hamming.intersection_numbers().map_err(|e| e.to_string())?;
    if t != scheme::hamming_reference(q) {
        return Err("fused tensor differs from the Hamming reference".into());
    }
    Ok(())
}

fn srg_job(m: u32) -> Result<(), String> {
    let ctx = FieldCtx::new(3, m).map_err(|e| e.to_string())?;
    let s = SchemeInstance::build(&ctx, &LinearMap::trace(&ctx));
    let expect = srg::ternary_srg_params(m);
    for i in 1..=3 {
        let a = s.adjacency_matrix(i).map_err(|e| e.to_string())?;
        let params = srg::srg_params(&a).map_err(|e| e.to_string())?;
        if params != expect {
            return Err(format!("class {i} params {params:?} != {expect:?}"));
        }
        let sp = srg::spread_check(&s, i).map_err(|e| e.to_string())?;
        if !sp.cliques_in_union {
            return Err("spread cliques not inside the union".into());
        }
    }
    let a4 = s.adjacency_matrix(4).map_err(|e| e.to_string())?;
    let q = ctx.q() as usize;
    if srg::disjoint_cliques(&a4) != Ok((q, q)) {
        return Err("spread class is not q disjoint cliques".into());
    }
    let cert = srg::swap_automorphism(&s).map_err(|e| e.to_string())?;
    if !cert.is_valid() {
        return Err(format!("swap certificate invalid: {:?}", cert.verdicts));
    }
    Ok(())
}

fn spectra_reports_job(max_q: u32) -> Result<(), String> {
    for m in 1..=3u32 {
        if 3u32.pow(m) <= max_q {
            let ctx = FieldCtx::new(3, m).map_err(|e| e.to_string())?;
            spectral::ternary_fiber_sum_checks(&ctx)?;
            let report = spectral::ternary_twist_report(&ctx).map_err(|e| e.to_string())?;
            if !report.negated_exponent_matches_all() {
                return Err("twist exponent tr(-a) failed".into());
            }
            if (m == 1) != report.published_exponent_matches_all() {
                return Err("published-exponent discrepancy not as expected".into());
            }
            let s = SchemeInstance::build(&ctx, &LinearMap::trace(&ctx));
            let brute = spectral::eigenmatrix_bruteforce(&s).map_err(|e| e.to_string())?;
            let closed = spectral::ternary_closed_eigenmatrix(m).map_err(|e| e.to_string())?;
            if !spectral::rows_match_up_to_permutation(&brute, &closed) {
                return Err(format!("5x5 closed form mismatch at m = {m}"));
            }
        }
        if 2u32.pow(m) <= max_q {
            let report = spectral::binary_trace_eigen_report(m).map_err(|e| e.to_string())?;
            if report.published_rows_sum_zero {
                return Err("published binary matrix unexpectedly satisfies row sums".into());
            }
            if !report.brute_middle_pm || !report.pq_exact {
                return Err(format!("binary brute-force laws failed at m = {m}"));
            }
        }
    }
    Ok(())
}

fn property_job(max_q: u32) -> Result<(), String> {
    for (p, n) in [(2u32, 2u32), (2, 3), (3, 2), (3, 3), (5, 2)] {
        hyperplane_sum_cover_check(p, n)
            .map_err(|w| format!("hyperplane cover failed for p={p}, n={n}: {w:?}"))?;
    }
    for (p, m) in field_params(max_q) {
        let ctx = FieldCtx::new(p, m).map_err(|e| e.to_string())?;
        spectral::kloosterman_product_law(&ctx)
            .map_err(|(a, b)| format!("product law failed at ({}, {})", a.code(), b.code()))?;
        spectral::KloostermanTable::build(&ctx)
            .reality_check()
            .map_err(|c| format!("K({}) not real", c.code()))?;
    }
    for p in [2, 3, 5] {
        ring_axioms_check(p, 10_000, 0x5eed_cafe)?;
    }
    Ok(())
}

/// Assembles the suite for `q <= max_q`.
pub fn jobs(max_q: u32) -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    for (p, m) in field_params(max_q) {
        jobs.push((
            format!("bush composition and images over GF({p}^{m})"),
            Box::new(move || construction_job(p, m)),
        ));
    }
    for (p, m) in field_params(max_q) {
        jobs.push((
            format!("scheme axioms and tensor over GF({p}^{m})"),
            Box::new(move || scheme_job(p, m, p.pow(m) <= 9)),
        ));
    }
    for (p, m) in field_params(max_q) {
        jobs.push((
            format!("eigenmatrices and self-duality over GF({p}^{m})"),
            Box::new(move || eigen_job(p, m)),
        ));
    }
    jobs.push((
        "ternary fiber sums and closed forms".into(),
        Box::new(move || spectra_reports_job(max_q)),
    ));
    for m in 1..=3u32 {
        if 3u32.pow(m) <= max_q {
            jobs.push((
                format!("srg decomposition and swap certificate at m = {m}"),
                Box::new(move || srg_job(m)),
            ));
        }
    }
    for q in [3u32, 4, 5, 7] {
        if q <= max_q {
            jobs.push((
                format!("fusions down to the Hamming scheme H(2,{q})"),
                Box::new(move || fusion_job(q)),
            ));
        }
    }
    jobs.push((
        "property suites (hyperplane cover, product law, ring axioms)".into(),
        Box::new(move || property_job(max_q)),
    ));
    jobs
}

/// Runs the suite on up to `threads` workers; results keep job order.
pub fn run(max_q: u32, threads: usize) -> Vec<Outcome> {
    let jobs = jobs(max_q);
    let threads = threads.clamp(1, jobs.len().max(1));
    let results: Mutex<Vec<Option<Outcome>>> =
        Mutex::new((0..jobs.len()).map(|_| None).collect());
    let cursor = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let idx = cursor.fetch_add(1, Ordering::Relaxed);
                if idx >= jobs.len() {
                    break;
                }
                let (name, job) = &jobs[idx];
                let outcome = job();
                results.lock().expect("no poisoned workers")[idx] =
                    Some((name.clone(), outcome));
            });
        }
    });
    results
        .into_inner()
        .expect("workers joined")
        .into_iter()
        .map(|slot| slot.expect("every job ran"))
        .collect()
}
