//! Command implementations, file formats and the selftest runner behind the
//! `gh-scheme` binary.
//!
//! Every run is fully determined by its [`RunConfig`]; outputs are written
//! with deterministic filenames (`{command}-p{p}m{m}-{phi}.{ext}`) and
//! byte-identical content across repeated runs.

pub mod emit;
pub mod selftest;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gh_scheme_core::field::FieldError;
use gh_scheme_core::gh::{self, GhError};
use gh_scheme_core::scheme::{self, SchemeInstance};
use gh_scheme_core::spectral;
use gh_scheme_core::srg;
use gh_scheme_core::{FieldCtx, LinearMap};

use serde_json::{json, Value};

/// Outcome classification driving the process exit code: usage errors exit
/// 2, failed mathematical verdicts exit 1.
#[derive(Debug)]
pub enum AppError {
    Usage(String),
    Verification(String),
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Usage(s) => write!(f, "error: {s}"),
            AppError::Verification(s) => write!(f, "verification failed: {s}"),
        }
    }
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 2,
            AppError::Verification(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Latex,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "latex" => Ok(Format::Latex),
            other => Err(format!("unknown format '{other}' (json|csv|latex)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiSpec {
    Identity,
    Trace,
    Beta(u32),
    Subfield(u32),
}

impl FromStr for PhiSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "identity" || s == "id" {
            return Ok(PhiSpec::Identity);
        }
        if s == "trace" {
            return Ok(PhiSpec::Trace);
        }
        if let Some(code) = s.strip_prefix("beta:") {
            return code
                .parse()
                .map(PhiSpec::Beta)
                .map_err(|_| format!("bad beta code in '{s}'"));
        }
        if let Some(order) = s.strip_prefix("subfield:") {
            return order
                .parse()
                .map(PhiSpec::Subfield)
                .map_err(|_| format!("bad subfield order in '{s}'"));
        }
        Err(format!(
            "unknown map '{s}' (identity | trace | beta:<code> | subfield:<order>)"
        ))
    }
}

impl PhiSpec {
    pub fn label(&self) -> String {
        match self {
            PhiSpec::Identity => "id".into(),
            PhiSpec::Trace => "trace".into(),
            PhiSpec::Beta(c) => format!("beta{c}"),
            PhiSpec::Subfield(r) => format!("sub{r}"),
        }
    }
}

/// Full description of a run; no hidden state.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub p: u32,
    pub m: u32,
    pub modulus: Option<Vec<u32>>,
    pub phi: PhiSpec,
    pub out_dir: PathBuf,
    pub format: Format,
    pub threads: usize,
    pub verbosity: u8,
    /// `scheme` only: also dump the pair-class CSV.
    pub pairs: bool,
}

impl RunConfig {
    pub fn file_stem(&self, command: &str) -> String {
        format!("{command}-p{}m{}-{}", self.p, self.m, self.phi.label())
    }
}

/// One verdict line plus the files a command wrote.
#[derive(Debug, Default)]
pub struct CommandReport {
    pub verdicts: Vec<(String, bool)>,
    pub files: Vec<PathBuf>,
}

impl CommandReport {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|(_, ok)| *ok)
    }

    fn push(&mut self, name: impl Into<String>, ok: bool) {
        self.verdicts.push((name.into(), ok));
    }
}

pub fn build_ctx(cfg: &RunConfig) -> Result<FieldCtx, AppError> {
    let result = match &cfg.modulus {
        Some(coeffs) => FieldCtx::with_modulus(cfg.p, cfg.m, coeffs),
        None => FieldCtx::new(cfg.p, cfg.m),
    };
    result.map_err(|e| AppError::Usage(e.to_string()))
}

pub fn build_phi(ctx: &FieldCtx, spec: PhiSpec) -> Result<LinearMap, AppError> {
    let map_err = |e: FieldError| AppError::Usage(e.to_string());
    match spec {
        PhiSpec::Identity => Ok(LinearMap::identity(ctx)),
        PhiSpec::Trace => Ok(LinearMap::trace(ctx)),
        PhiSpec::Beta(code) => {
            let beta = ctx.element(code).map_err(map_err)?;
            LinearMap::beta_trace(ctx, beta).map_err(map_err)
        }
        PhiSpec::Subfield(r) => LinearMap::subfield_trace(ctx, r).map_err(map_err),
    }
}

fn write_file(dir: &Path, name: &str, content: &str) -> Result<PathBuf, AppError> {
    fs::create_dir_all(dir)
        .map_err(|e| AppError::Usage(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, content)
        .map_err(|e| AppError::Usage(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn write_json(dir: &Path, name: &str, value: &Value) -> Result<PathBuf, AppError> {
    let mut body = serde_json::to_string_pretty(value).expect("serializable");
    body.push('\n');
    write_file(dir, name, &body)
}

fn gh_verdict(report: &mut CommandReport, name: &str, result: Result<(), GhError>) -> Value {
    match result {
        Ok(()) => {
            report.push(name, true);
            json!({"pass": true})
        }
        Err(e) => {
            report.push(name, false);
            json!({"pass": false, "witness": e.to_string()})
        }
    }
}

/// `construct`: builds `H`, `L`, `M = M(H, L)` and `phi(M)`, verifies the
/// GH / Bush / symmetry properties, and writes the artifacts.
pub fn cmd_construct(cfg: &RunConfig) -> Result<CommandReport, AppError> {
    let ctx = build_ctx(cfg)?;
    let phi = build_phi(&ctx, cfg.phi)?;
    let q = ctx.q();
    let mut report = CommandReport::default();

    let h = gh::multiplication_table(&ctx);
    let l = gh::subtraction_table(&ctx);
    let m = gh::compose(&h, &l).map_err(|e| AppError::Usage(e.to_string()))?;

    let mut verdicts = serde_json::Map::new();
    verdicts.insert(
        "h_is_gh".into(),
        gh_verdict(&mut report, &format!("H is GH({q},1)"), gh::verify_gh(&h, q, 1)),
    );
    verdicts.insert(
        "m_is_gh".into(),
        gh_verdict(
            &mut report,
            &format!("M is GH({q},{q})"),
            gh::verify_gh(&m, q, q),
        ),
    );
    verdicts.insert(
        "m_is_bush".into(),
        gh_verdict(
            &mut report,
            &format!("M is Bush-type with block order {q}"),
            gh::verify_bush(&m, q),
        ),
    );
    let sym = gh::symmetry_condition(&h, &l).map_err(|e| AppError::Usage(e.to_string()))?;
    report.push("M symmetric and symmetry condition agrees", sym.passed());
    verdicts.insert(
        "symmetry".into(),
        json!({
            "identity_holds": sym.identity_holds(),
            "matrix_symmetric": sym.matrix_symmetric(),
            "verdicts_agree": sym.verdicts_agree(),
        }),
    );

    let r = phi.target_order();
    let phi_m = gh::apply_hom(&m, &phi).map_err(|e| AppError::Usage(e.to_string()))?;
    if r != q {
        let lambda = q * q / r;
        verdicts.insert(
            "phi_m_is_gh".into(),
            gh_verdict(
                &mut report,
                &format!("phi(M) is GH({r},{lambda})"),
                gh::verify_gh(&phi_m, r, lambda),
            ),
        );
        verdicts.insert(
            "phi_m_is_bush".into(),
            gh_verdict(
                &mut report,
                &format!("phi(M) is Bush-type with block order {q}"),
                gh::verify_bush(&phi_m, q),
            ),
        );
    }
    if r == 2 {
        verdicts.insert(
            "sign_relabel_orthogonal".into(),
            gh_verdict(
                &mut report,
                "sign-relabeled phi(M) satisfies A*A^T = nI",
                gh::sign_relabel_orthogonality(&phi_m),
            ),
        );
    }

    let stem = cfg.file_stem("construct");
    match cfg.format {
        Format::Json => {
            let doc = json!({
                "field": emit::field_json(&ctx),
                "phi": emit::phi_json(&ctx, &phi),
                "h": emit::matrix_json(&h),
                "l": emit::latin_json(&l),
                "m": emit::matrix_json(&m),
                "phi_m": emit::matrix_json(&phi_m),
                "verdicts": Value::Object(verdicts),
            });
            report.files.push(write_json(&cfg.out_dir, &format!("{stem}.json"), &doc)?);
        }
        Format::Csv => {
            for (suffix, content) in [
                ("h", emit::matrix_csv(&h)),
                ("m", emit::matrix_csv(&m)),
                ("phim", emit::matrix_csv(&phi_m)),
                ("l", emit::latin_csv(&l)),
            ] {
                report
                    .files
                    .push(write_file(&cfg.out_dir, &format!("{stem}-{suffix}.csv"), &content)?);
            }
        }
        Format::Latex => {
            return Err(AppError::Usage(
                "latex output is only supported by the eigen command".into(),
            ))
        }
    }
    Ok(report)
}

/// `scheme`: builds the relation partition, verifies the scheme axioms via
/// exact intersection numbers, and writes the report.
pub fn cmd_scheme(cfg: &RunConfig) -> Result<CommandReport, AppError> {
    let ctx = build_ctx(cfg)?;
    let phi = build_phi(&ctx, cfg.phi)?;
    let q = ctx.q();
    let r = phi.target_order();
    let mut report = CommandReport::default();
    let s = SchemeInstance::build(&ctx, &phi);

    report.push(
        format!("relation partition has {} classes", s.class_count()),
        true,
    );
    report.push("difference classes symmetric", s.differences_symmetric());

    let expected_valencies: Vec<u64> = {
        let mut v = vec![1u64];
        v.extend((0..r).map(|_| (q as u64) * (q as u64 - 1) / r as u64));
        v.push(q as u64 - 1);
        v
    };
    report.push(
        format!("valencies are {:?}", expected_valencies),
        s.valencies() == expected_valencies.as_slice(),
    );

    let tensor = match s.intersection_numbers() {
        Ok(t) => {
            report.push("intersection numbers exact and constant per class", true);
            Some(t)
        }
        Err(e) => {
            report.push(format!("intersection numbers: {e}"), false);
            None
        }
    };
    let mut verdict_obj = serde_json::Map::new();
    if let Some(t) = &tensor {
        let closed = scheme::closed_form_check(t, q, r).is_ok();
        report.push("closed-form structure constants hold", closed);
        verdict_obj.insert("closed_form_values".into(), json!(closed));
        if let Some(reading) = scheme::final_term_reading(&s, t) {
            let label = match reading {
                scheme::FinalTermReading::ExcludesLastClass => "complement_of_last_class",
                scheme::FinalTermReading::ExcludesFirstMiddle => "complement_of_first_middle",
                scheme::FinalTermReading::Both => "both_coincide",
                scheme::FinalTermReading::Neither => "neither",
            };
            let ok = matches!(
                reading,
                scheme::FinalTermReading::ExcludesLastClass | scheme::FinalTermReading::Both
            );
            report.push(format!("product decomposition reading: {label}"), ok);
            verdict_obj.insert("final_term_reading".into(), json!(label));
        }
        if q <= 9 {
            let dense = s.intersection_numbers_dense();
            let ok = dense.as_ref() == Ok(t);
            report.push("dense-product tensor equals fast path", ok);
            verdict_obj.insert("dense_cross_check".into(), json!(ok));
        } else {
            verdict_obj.insert("dense_cross_check".into(), Value::Null);
        }
    }
    verdict_obj.insert("coherent".into(), json!(tensor.is_some()));
    verdict_obj.insert("symmetric".into(), json!(s.differences_symmetric()));

    if cfg.format == Format::Latex {
        return Err(AppError::Usage(
            "latex output is only supported by the eigen command".into(),
        ));
    }
    let stem = cfg.file_stem("scheme");
    let doc = json!({
        "field": emit::field_json(&ctx),
        "phi": emit::phi_json(&ctx, &phi),
        "classes": s.class_count(),
        "valencies": s.valencies(),
        "intersection_numbers": tensor.as_ref().map(emit::tensor_json),
        "verdicts": Value::Object(verdict_obj),
    });
    report.files.push(write_json(&cfg.out_dir, &format!("{stem}.json"), &doc)?);
    if cfg.pairs {
        let dump = emit::pair_class_csv(&s);
        report
            .files
            .push(write_file(&cfg.out_dir, &format!("{stem}-pairs.csv"), &dump)?);
    }
    Ok(report)
}

/// `eigen`: brute-force eigenmatrices, the Kloosterman closed form when the
/// target is prime, self-duality, and the characteristic-2/3 closed-form
/// reports.
pub fn cmd_eigen(cfg: &RunConfig) -> Result<CommandReport, AppError> {
    let ctx = build_ctx(cfg)?;
    let phi = build_phi(&ctx, cfg.phi)?;
    let q = ctx.q();
    let p = ctx.p();
    let mut report = CommandReport::default();
    let s = SchemeInstance::build(&ctx, &phi);
    let brute = spectral::eigenmatrix_bruteforce(&s)
        .map_err(|e| AppError::Verification(e.to_string()))?;
    let order = (q as i128) * (q as i128);
    report.push("P*Q = q^2 I exactly", brute.pq_identity_holds(order));
    let sums = brute.row_sums();
    let row_sums_ok = sums[0].as_int() == Some(order)
        && sums[1..].iter().all(|s| s.is_zero());
    report.push("row-sum law (valency row q^2, others 0)", row_sums_ok);

    let mut doc = serde_json::Map::new();
    doc.insert("field".into(), emit::field_json(&ctx));
    doc.insert("phi".into(), emit::phi_json(&ctx, &phi));
    doc.insert("brute".into(), emit::spectral_json(&brute));

    let closed = if phi.target_order() == p {
        let closed = spectral::kloosterman_eigenmatrix(&ctx, &phi)
            .map_err(|e| AppError::Verification(e.to_string()))?;
        let matches = spectral::rows_match_up_to_permutation(&brute, &closed);
        report.push("Kloosterman closed form equals brute force", matches);
        doc.insert("closed_form".into(), emit::spectral_json(&closed));
        doc.insert("closed_matches_brute".into(), json!(matches));
        if q <= 9 {
            let indep = spectral::representative_independence(&ctx, &phi).is_ok();
            report.push("K-matrix independent of fiber representatives", indep);
            doc.insert("representative_independence".into(), json!(indep));
        } else {
            doc.insert(
                "representative_independence".into(),
                json!("not checked (q > 9)"),
            );
        }
        Some(closed)
    } else {
        doc.insert("closed_form".into(), Value::Null);
        None
    };

    match spectral::self_duality_witness(&brute) {
        Some((rows, cols)) => {
            report.push("self-duality witness found", true);
            doc.insert(
                "self_dual".into(),
                json!({"row_perm": rows, "col_perm": cols}),
            );
        }
        None => {
            report.push("self-duality witness found", false);
            doc.insert("self_dual".into(), Value::Null);
        }
    }

    if p == 3 && phi.target_order() == 3 {
        let ternary = spectral::ternary_closed_eigenmatrix(ctx.m())
            .map_err(|e| AppError::Verification(e.to_string()))?;
        let matches = spectral::rows_match_up_to_permutation(&brute, &ternary);
        report.push("explicit 5x5 closed form equals brute force", matches);
        doc.insert("ternary_closed".into(), emit::spectral_json(&ternary));
        doc.insert("ternary_matches".into(), json!(matches));
    }
    if p == 2 && phi.target_order() == 2 {
        let bin = spectral::binary_trace_eigen_report(ctx.m())
            .map_err(|e| AppError::Verification(e.to_string()))?;
        // the published middle rows are expected NOT to reproduce; the
        // verdict passes when the discrepancy is present and the brute rows
        // satisfy the laws
        report.push(
            "published 4x4 matrix flagged (middle rows fail zero-row-sum)",
            !bin.published_rows_sum_zero,
        );
        report.push(
            "brute middle entries are +-2^{m-1} with exact P*Q",
            bin.brute_middle_pm && bin.pq_exact,
        );
        doc.insert("binary_report".into(), emit::binary_report_json(&bin));
    }

    let stem = cfg.file_stem("eigen");
    match cfg.format {
        Format::Json => {
            report
                .files
                .push(write_json(&cfg.out_dir, &format!("{stem}.json"), &Value::Object(doc))?);
        }
        Format::Csv => {
            let csv = emit::eigen_csv(&brute).ok_or_else(|| {
                AppError::Usage(
                    "eigenmatrix entries are not all rational; use --format json".into(),
                )
            })?;
            report
                .files
                .push(write_file(&cfg.out_dir, &format!("{stem}.csv"), &csv)?);
        }
        Format::Latex => {
            let tex = emit::eigen_latex(&brute, closed.as_ref());
            report
                .files
                .push(write_file(&cfg.out_dir, &format!("{stem}.tex"), &tex)?);
        }
    }
    Ok(report)
}

/// `kloosterman`: the exact table `K(c) = K(1, c)` plus the product-law and
/// reality checks.
pub fn cmd_kloosterman(cfg: &RunConfig) -> Result<CommandReport, AppError> {
    let ctx = build_ctx(cfg)?;
    let mut report = CommandReport::default();
    let table = spectral::KloostermanTable::build(&ctx);
    report.push(
        "K(0) = -1",
        table.get(ctx.zero()).as_int() == Some(-1),
    );
    let product = spectral::kloosterman_product_law(&ctx);
    report.push(
        "K(a,b) depends only on ab".to_string(),
        product.is_ok(),
    );
    let reality = table.reality_check();
    report.push("every K(c) is self-conjugate (real)", reality.is_ok());

    let stem = cfg.file_stem("kloosterman");
    match cfg.format {
        Format::Json => {
            let doc = json!({
                "field": emit::field_json(&ctx),
                "table": emit::kloosterman_json(&ctx, &table),
                "verdicts": {
                    "product_law": product.is_ok(),
                    "reality": reality.is_ok(),
                },
            });
            report.files.push(write_json(&cfg.out_dir, &format!("{stem}.json"), &doc)?);
        }
        Format::Csv => {
            let csv = emit::kloosterman_csv(&table);
            report
                .files
                .push(write_file(&cfg.out_dir, &format!("{stem}.csv"), &csv)?);
        }
        Format::Latex => {
            return Err(AppError::Usage(
                "latex output is only supported by the eigen command".into(),
            ))
        }
    }
    Ok(report)
}

fn require_ternary(cfg: &RunConfig) -> Result<(FieldCtx, LinearMap), AppError> {
    if cfg.p != 3 {
        return Err(AppError::Usage(format!(
            "this command needs characteristic 3, got p = {}",
            cfg.p
        )));
    }
    let ctx = build_ctx(cfg)?;
    let phi = build_phi(&ctx, cfg.phi)?;
    if phi.target_order() != 3 {
        return Err(AppError::Usage(
            "this command needs a map onto F_3 (use --phi trace)".into(),
        ));
    }
    Ok((ctx, phi))
}

/// `srg`: strongly-regular-graph parameters of the classes of the
/// characteristic-3 trace scheme plus the spread checks.
pub fn cmd_srg(cfg: &RunConfig) -> Result<CommandReport, AppError> {
    let (ctx, phi) = require_ternary(cfg)?;
    let mut report = CommandReport::default();
    let s = SchemeInstance::build(&ctx, &phi);
    let expect = srg::ternary_srg_params(ctx.m());
    let mut class_docs = Vec::new();
    for i in 1..=3usize {
        let a = s.adjacency_matrix(i).expect("class in range");
        match srg::srg_params(&a) {
            Ok(params) => {
                report.push(
                    format!(
                        "A_{i} is SRG({}, {}, {}, {}){}",
                        params.v,
                        params.k,
                        params.lambda,
                        params.mu,
                        if params.is_degenerate() { " [degenerate]" } else { "" }
                    ),
                    params == expect,
                );
                class_docs.push(json!({
                    "class": i,
                    "params": emit::srg_json(&params),
                    "degenerate": params.is_degenerate(),
                    "matches_family": params == expect,
                }));
            }
            Err(e) => {
                report.push(format!("A_{i} strongly regular"), false);
                class_docs.push(json!({"class": i, "error": e.to_string()}));
            }
        }
    }
    let a4 = s.adjacency_matrix(4).expect("class in range");
    let cliques = srg::disjoint_cliques(&a4);
    let q = ctx.q();
    report.push(
        format!("A_4 is {q} disjoint cliques K_{q}"),
        cliques == Ok((q as usize, q as usize)),
    );
    let mut spread_docs = Vec::new();
    for i in 1..=3usize {
        match srg::spread_check(&s, i) {
            Ok(sp) => {
                report.push(
                    format!(
                        "A_{i} + A_4 is SRG({}, {}, {}, {}) with spread",
                        sp.union_params.v, sp.union_params.k, sp.union_params.lambda, sp.union_params.mu
                    ),
                    sp.cliques_in_union,
                );
                spread_docs.push(json!({
                    "class": i,
                    "union_params": emit::srg_json(&sp.union_params),
                    "clique_count": sp.clique_count,
                    "clique_size": sp.clique_size,
                    "cliques_in_union": sp.cliques_in_union,
                }));
            }
            Err(e) => {
                report.push(format!("spread check for A_{i} + A_4"), false);
                spread_docs.push(json!({"class": i, "error": e.to_string()}));
            }
        }
    }
    if cfg.format != Format::Json {
        return Err(AppError::Usage("srg only writes json reports".into()));
    }
    let stem = cfg.file_stem("srg");
    let doc = json!({
        "field": emit::field_json(&ctx),
        "phi": emit::phi_json(&ctx, &phi),
        "expected_family": emit::srg_json(&expect),
        "classes": class_docs,
        "spread_checks": spread_docs,
    });
    report.files.push(write_json(&cfg.out_dir, &format!("{stem}.json"), &doc)?);
    Ok(report)
}

/// `leopardi`: the swap-automorphism certificate for `A_2 + A_3`.
pub fn cmd_leopardi(cfg: &RunConfig) -> Result<CommandReport, AppError> {
    let (ctx, phi) = require_ternary(cfg)?;
    let mut report = CommandReport::default();
    let s = SchemeInstance::build(&ctx, &phi);
    let cert = srg::swap_automorphism(&s).map_err(|e| AppError::Usage(e.to_string()))?;
    let v = &cert.verdicts;
    report.push("union A_i + A_j is regular of valency 2k", v.union_regular);
    report.push("first half is strongly regular", v.half_a_srg);
    report.push("second half is strongly regular", v.half_b_srg);
    report.push(
        "(x1,x2) -> (2x1,x2) is an automorphism of the union",
        v.automorphism_of_union,
    );
    report.push("the involution exchanges the two halves", v.swaps_halves);
    report.push("the involution fixes the other classes", v.fixes_other_classes);
    if let Some(params) = &cert.half_params {
        report.push(
            format!(
                "halves are SRG({}, {}, {}, {})",
                params.v, params.k, params.lambda, params.mu
            ),
            *params == srg::ternary_srg_params(ctx.m()),
        );
    }
    report.push("certificate valid", cert.is_valid());

    if cfg.format != Format::Json {
        return Err(AppError::Usage("leopardi only writes json certificates".into()));
    }
    let stem = cfg.file_stem("leopardi");
    let doc = emit::certificate_json(&ctx, &phi, &cert);
    report.files.push(write_json(&cfg.out_dir, &format!("{stem}.json"), &doc)?);
    Ok(report)
}

/// `selftest`: the full verification suite at `q <= max_q`.
pub fn cmd_selftest(cfg: &RunConfig, max_q: u32) -> Result<CommandReport, AppError> {
    let mut report = CommandReport::default();
    let outcomes = selftest::run(max_q, cfg.threads);
    for (name, result) in outcomes {
        match result {
            Ok(()) => report.push(name, true),
            Err(e) => report.push(format!("{name}: {e}"), false),
        }
    }
    Ok(report)
}
