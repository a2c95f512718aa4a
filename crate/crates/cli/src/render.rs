//! Human-readable and JSON renderings for the subcommands.

use std::fmt::Write as _;

use serde_json::json;

use qrob_core::rational::format_q;
use qrob_core::ring::GradedRing;

use crate::{CliResult, Verdict};

fn matrix_text(out: &mut String, m: &qrob_core::linalg::Matrix) {
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(format_q).collect();
        let _ = writeln!(out, "    [{}]", row.join(", "));
    }
}

pub fn ring_show_text(expr: &str, ring: &GradedRing) -> CliResult<String> {
    let mut out = String::new();
    let _ = writeln!(out, "manifold: {expr}");
    let _ = writeln!(out, "hash: {}", ring.hash());
    let _ = writeln!(out, "top degree: {}", ring.top_degree());
    let _ = writeln!(out, "dims: {:?}", ring.dims());
    for k in 0..=ring.top_degree() {
        let _ = writeln!(out, "H^{k}: [{}]", ring.labels()[k].join(", "));
    }
    for k in 0..=ring.top_degree() {
        if ring.dim(k) == 0 {
            continue;
        }
        let _ = writeln!(out, "pairing H^{k} x H^{}:", ring.top_degree() - k);
        matrix_text(&mut out, &ring.poincare_pairing(k)?);
    }
    Ok(out)
}

pub fn ring_show_json(expr: &str, ring: &GradedRing) -> CliResult<String> {
    let pairings = (0..=ring.top_degree())
        .map(|k| {
            let m = ring.poincare_pairing(k)?;
            Ok((0..m.rows()).map(|i| m.row(i).iter().map(format_q).collect::<Vec<_>>()).collect::<Vec<_>>())
        })
        .collect::<CliResult<Vec<_>>>()?;
    let v = json!({
        "manifold": expr,
        "ring_hash": ring.hash(),
        "ring": ring.to_file(),
        "pairings": pairings,
    });
    Ok(serde_json::to_string_pretty(&v).expect("json"))
}

pub fn kunneth_text(expr: &str, ring: &GradedRing, k: usize) -> CliResult<String> {
    let basis = ring.kunneth_ideal_basis(k)?;
    let mut out = String::new();
    let _ = writeln!(out, "K^{k}({expr}): dim {}", basis.len());
    for b in &basis {
        let _ = writeln!(out, "  {}", ring.format_element(b));
    }
    Ok(out)
}

pub fn kunneth_json(expr: &str, ring: &GradedRing, k: usize) -> CliResult<String> {
    let basis = ring.kunneth_ideal_basis(k)?;
    let v = json!({
        "manifold": expr,
        "ring_hash": ring.hash(),
        "degree": k,
        "dim": basis.len(),
        "basis": basis.iter().map(|b| b.component(k)).collect::<Vec<_>>(),
        "basis_text": basis.iter().map(|b| ring.format_element(b)).collect::<Vec<_>>(),
    });
    Ok(serde_json::to_string_pretty(&v).expect("json"))
}

pub fn verdict_text(v: &Verdict, ring: &GradedRing) -> String {
    let mut out = String::new();
    let verdict = serde_json::to_value(v.verdict).expect("json");
    let _ = writeln!(out, "verdict: {}", verdict.as_str().unwrap_or_default());
    let _ = writeln!(out, "manifold: {}", v.manifold);
    let _ = writeln!(out, "omega: {}   n: {}", v.omega, v.n);
    let p = &v.preconditions;
    let _ = writeln!(
        out,
        "preconditions: n in range {}, ω nonzero {}, ω of degree n {}, ω in K^n {}",
        p.n_in_range, p.omega_nonzero, p.omega_homogeneous_of_degree_n, p.omega_in_kn
    );
    if let Some(c) = &v.certificate {
        let _ = writeln!(out, "certificate: {:?}, {}", c.kind, c.inequality);
        let _ = writeln!(out, "  {}", c.conclusion);
    }
    if let Some(w) = &v.witness {
        let _ = writeln!(out, "witness in Λ*R^{}:", w.ambient_n);
        if let Some(pres) = ring.presentation() {
            for g in &pres.generators {
                if g.degree <= w.images.len() {
                    let _ = writeln!(out, "  Φ({}) = {}", g.name, w.images[g.degree - 1][g.index]);
                }
            }
        }
    }
    for line in &v.search_log {
        let _ = writeln!(out, "  log: {line}");
    }
    out
}
