//! JSON / CSV / LaTeX emission for the core types. All JSON objects use
//! sorted keys (serde_json's default map), so output bytes are stable.

use gh_scheme_core::field::PhiKind;
use gh_scheme_core::gh::{GroupMatrix, LatinSquare};
use gh_scheme_core::scheme::{IntersectionTensor, SchemeInstance};
use gh_scheme_core::spectral::{BinaryEigenReport, KloostermanTable, SpectralData};
use gh_scheme_core::srg::{SrgParams, SwapCertificate};
use gh_scheme_core::{CycInt, FieldCtx, LinearMap};

use serde_json::{json, Value};

fn cyc_coeffs_i64(c: &CycInt) -> Vec<i64> {
    c.coeffs_i128()
        .expect("coefficient exceeds the JSON integer range")
        .into_iter()
        .map(|v| i64::try_from(v).expect("coefficient exceeds the JSON integer range"))
        .collect()
}

/// `{"p": .., "coeffs": [..]}` plus `"as_int"` when the value is rational.
pub fn cyc_json(c: &CycInt) -> Value {
    let coeffs = cyc_coeffs_i64(c);
    match c.as_int() {
        Some(n) => json!({"p": c.p(), "coeffs": coeffs, "as_int": n as i64}),
        None => json!({"p": c.p(), "coeffs": coeffs}),
    }
}

pub fn field_json(ctx: &FieldCtx) -> Value {
    json!({"p": ctx.p(), "m": ctx.m(), "modulus": ctx.modulus()})
}

pub fn phi_json(ctx: &FieldCtx, phi: &LinearMap) -> Value {
    let kind = match phi.kind() {
        PhiKind::Identity => "identity",
        PhiKind::Trace => "trace",
        PhiKind::BetaTrace(_) => "beta-trace",
        PhiKind::Subfield(_) => "subfield-trace",
    };
    let _ = ctx;
    json!({
        "kind": kind,
        "beta": phi.beta().code(),
        "target_order": phi.target_order(),
    })
}

pub fn matrix_json(m: &GroupMatrix) -> Value {
    let codes: Vec<u32> = m.entries().iter().map(|e| e.code()).collect();
    json!({
        "group": {
            "field": field_json(m.ctx()),
            "order": m.group_order(),
        },
        "rows": m.rows(),
        "cols": m.cols(),
        "entries": codes,
    })
}

/// CSV form: `# gh-matrix p=.. m=.. rows=..` then one comma-separated line
/// of integer codes per row.
pub fn matrix_csv(m: &GroupMatrix) -> String {
    let mut out = format!(
        "# gh-matrix p={} m={} rows={}\n",
        m.ctx().p(),
        m.ctx().m(),
        m.rows()
    );
    for r in 0..m.rows() {
        let row: Vec<String> = (0..m.cols())
            .map(|c| m.get(r, c).code().to_string())
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn latin_json(l: &LatinSquare) -> Value {
    json!({"n": l.n(), "cells": l.cells()})
}

pub fn latin_csv(l: &LatinSquare) -> String {
    let mut out = format!("# latin-square n={}\n", l.n());
    for r in 0..l.n() {
        let row: Vec<String> = (0..l.n()).map(|c| l.get(r, c).to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn tensor_json(t: &IntersectionTensor) -> Value {
    let c = t.classes();
    let nested: Vec<Vec<Vec<u64>>> = (0..c)
        .map(|i| {
            (0..c)
                .map(|j| (0..c).map(|k| t.get(i, j, k)).collect())
                .collect()
        })
        .collect();
    json!(nested)
}

/// One line per ordered vertex pair: `x,y,class`.
pub fn pair_class_csv(s: &SchemeInstance) -> String {
    let n = s.vertex_count();
    let mut out = String::from("x,y,class\n");
    for x in 0..n {
        for y in 0..n {
            out.push_str(&format!("{x},{y},{}\n", s.pair_class(x, y)));
        }
    }
    out
}

pub fn spectral_json(sd: &SpectralData) -> Value {
    let rows = |m: &[Vec<CycInt>]| -> Vec<Vec<Value>> {
        m.iter().map(|r| r.iter().map(cyc_json).collect()).collect()
    };
    json!({
        "p_matrix": rows(sd.p_matrix()),
        "q_matrix": rows(sd.q_matrix()),
        "multiplicities": sd.multiplicities(),
        "character_classes": sd.character_classes(),
    })
}

/// Integer CSV of the first eigenmatrix; `None` when an entry is
/// irrational.
pub fn eigen_csv(sd: &SpectralData) -> Option<String> {
    let mut out = String::new();
    for row in sd.p_matrix() {
        let cells: Option<Vec<String>> = row
            .iter()
            .map(|e| e.as_int().map(|n| n.to_string()))
            .collect();
        out.push_str(&cells?.join(","));
        out.push('\n');
    }
    Some(out)
}

fn latex_entry(e: &CycInt) -> String {
    match e.as_int() {
        Some(n) => n.to_string(),
        None => format!("{e}").replace('w', "\\omega").replace('*', " "),
    }
}

pub fn eigen_latex(brute: &SpectralData, closed: Option<&SpectralData>) -> String {
    let table = |sd: &SpectralData, caption: &str| -> String {
        let n = sd.size();
        let mut out = format!("% {caption}\n\\begin{{pmatrix}}\n");
        for row in sd.p_matrix() {
            let cells: Vec<String> = row.iter().map(latex_entry).collect();
            out.push_str(&cells.join(" & "));
            out.push_str(" \\\\\n");
        }
        out.push_str("\\end{pmatrix}\n");
        let _ = n;
        out
    };
    let mut out = table(brute, "first eigenmatrix (brute force)");
    if let Some(c) = closed {
        out.push('\n');
        out.push_str(&table(c, "first eigenmatrix (Kloosterman closed form)"));
    }
    out
}

pub fn kloosterman_json(ctx: &FieldCtx, table: &KloostermanTable) -> Value {
    let entries: Vec<Value> = ctx
        .enumerate()
        .iter()
        .map(|&c| {
            json!({
                "code": c.code(),
                "value": cyc_json(table.get(c)),
            })
        })
        .collect();
    json!(entries)
}

/// CSV table: `code,coeffs,as_int` with space-separated coefficients.
pub fn kloosterman_csv(table: &KloostermanTable) -> String {
    let mut out = String::from("code,coeffs,as_int\n");
    for (code, v) in table.values().iter().enumerate() {
        let coeffs: Vec<String> = cyc_coeffs_i64(v).iter().map(|c| c.to_string()).collect();
        let as_int = v.as_int().map(|n| n.to_string()).unwrap_or_default();
        out.push_str(&format!("{code},{},{as_int}\n", coeffs.join(" ")));
    }
    out
}

pub fn srg_json(p: &SrgParams) -> Value {
    json!({"v": p.v, "k": p.k, "lambda": p.lambda, "mu": p.mu})
}

pub fn binary_report_json(r: &BinaryEigenReport) -> Value {
    let published: Vec<Vec<i64>> = r
        .published
        .iter()
        .map(|row| row.iter().map(|&v| v as i64).collect())
        .collect();
    json!({
        "m": r.m,
        "published": published,
        "published_row_sums": r.published_row_sums.iter().map(|&v| v as i64).collect::<Vec<i64>>(),
        "published_row_found_in_brute": r.published_row_found,
        "published_rows_sum_zero": r.published_rows_sum_zero,
        "brute_middle_entries_pm": r.brute_middle_pm,
        "pq_exact": r.pq_exact,
    })
}

/// Self-contained certificate for the swap decomposition.
pub fn certificate_json(ctx: &FieldCtx, phi: &LinearMap, cert: &SwapCertificate) -> Value {
    let params = cert.half_params.as_ref();
    json!({
        "field": field_json(ctx),
        "phi": phi_json(ctx, phi),
        "v": params.map(|p| p.v),
        "k": params.map(|p| p.k),
        "lambda": params.map(|p| p.lambda),
        "mu": params.map(|p| p.mu),
        "swapped_classes": [cert.swapped_classes.0, cert.swapped_classes.1],
        "sigma": cert.sigma,
        "half_edges_a": cert.half_edges.0,
        "half_edges_b": cert.half_edges.1,
        "union_valency": cert.union_valency,
        "verdicts": {
            "union_regular": cert.verdicts.union_regular,
            "half_a_srg": cert.verdicts.half_a_srg,
            "half_b_srg": cert.verdicts.half_b_srg,
            "automorphism_of_union": cert.verdicts.automorphism_of_union,
            "swaps_halves": cert.verdicts.swaps_halves,
            "fixes_other_classes": cert.verdicts.fixes_other_classes,
            "valid": cert.is_valid(),
        },
    })
}
