//! Acceptance gate: one PASS/FAIL line per criterion. All arithmetic is
//! exact, so every comparison is an equality or an integer inequality
//! (tolerance 0); runtime limits are pinned per criterion.

#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use qrob_cli::{build, parse_omega, verify_document, Outcome, Verdict};
use qrob_core::exterior::{blades_of_degree, dim_component, ExtElement};
use qrob_core::homsearch::{enumerate_hom, verify_hom, witness_template, Budget};
use qrob_core::obstruct::{
    slice_pullback, submanifold_bound, verify_certificate, Certificate, CertificateKind, Relation,
};
use qrob_core::rational::{q, Q};
use qrob_core::ring::{BuiltManifold, RingElement};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("{what} took {:.2}s, limit {}s", t.as_secs_f64(), limit.as_secs()))
}

/// Runs `qrob check` and parses the verdict written with `-o`.
fn check(dir: &Path, expr: &str, omega: &str, n: usize) -> Result<(i32, Verdict, String), String> {
    let file = dir.join(format!("{}-{n}.json", expr.replace(['(', ')', ',', ' ', '*'], "_")));
    let out = Command::new(env!("CARGO_BIN_EXE_qrob"))
        .args(["check", expr, "--omega", omega, "--n", &n.to_string(), "-o"])
        .arg(&file)
        .output()
        .map_err(|e| e.to_string())?;
    let code = out.status.code().unwrap_or(-1);
    let text = std::fs::read_to_string(&file).map_err(|e| format!("{expr}: no verdict file ({e}); stderr {}", String::from_utf8_lossy(&out.stderr)))?;
    let v: Verdict = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    Ok((code, v, file.to_string_lossy().into_owned()))
}

fn verify_cli(path: &str) -> Result<i32, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_qrob")).args(["verify", path]).output().map_err(|e| e.to_string())?;
    Ok(out.status.code().unwrap_or(-1))
}

fn criterion_1(dir: &Path) -> Check {
    let limit = Duration::from_secs(5);
    let mut ms = Vec::new();
    for g in 1..=5usize {
        let start = Instant::now();
        let (code, v, file) = check(dir, &format!("surface({g})*cp(2)"), "vol(1)^sym(2)", 4)?;
        within(start, limit, &format!("g = {g}"))?;
        if g == 1 {
            ensure(code == 0 && v.verdict == Outcome::Witness, || format!("g = 1: exit {code}, {:?}", v.verdict))?;
            ensure(verify_cli(&file)? == 0, || "g = 1 witness does not re-verify".into())?;
            continue;
        }
        let cert = v.certificate.as_ref().ok_or_else(|| format!("g = {g}: {:?}, no certificate", v.verdict))?;
        ensure(code == 1 && cert.kind == CertificateKind::H1Annihilator, || format!("g = {g}: exit {code}, {:?}", cert.kind))?;
        ensure(cert.m() == 2 * g as u128 && cert.inequality.rel == Relation::Ge && cert.inequality.rhs == 4, || {
            format!("g = {g}: inequality {}", cert.inequality)
        })?;
        ensure(verify_cli(&file)? == 0, || format!("g = {g} certificate does not re-verify"))?;
        ms.push(cert.inequality.to_string());
    }
    Ok(format!("g=1 WITNESS; g=2..5 H1Annihilator {}", ms.join(", ")))
}

fn criterion_2(dir: &Path) -> Check {
    let limit = Duration::from_secs(30);
    let mut below = Vec::new();
    let mut above = Vec::new();
    for nu in 1..=10usize {
        let start = Instant::now();
        let (code, v, file) = check(dir, &format!("connsum(s2xs2,{nu})*cp(2)"), "vol(1)^sym(2)", 6)?;
        within(start, limit, &format!("nu = {nu}"))?;
        if nu <= 7 {
            ensure(matches!(v.verdict, Outcome::Witness | Outcome::Unknown) && code != 1, || {
                format!("nu = {nu}: {:?} (exit {code})", v.verdict)
            })?;
            below.push(format!("{nu}:{}", if v.verdict == Outcome::Witness { "W" } else { "U" }));
            continue;
        }
        let cert = v.certificate.as_ref().ok_or_else(|| format!("nu = {nu}: {:?}", v.verdict))?;
        ensure(code == 1 && cert.kind == CertificateKind::DualPair, || format!("nu = {nu}: {:?}", cert.kind))?;
        ensure(cert.m() == 2 * nu as u128 && cert.inequality.rel == Relation::Gt && cert.inequality.rhs == 15, || {
            format!("nu = {nu}: {}", cert.inequality)
        })?;
        ensure(verify_cli(&file)? == 0, || format!("nu = {nu} certificate does not re-verify"))?;
        above.push(cert.inequality.to_string());
    }
    Ok(format!("nu<=7 [{}] never OBSTRUCTED; nu=8..10 DualPair {}", below.join(" "), above.join(", ")))
}

fn built(src: &str) -> Result<BuiltManifold, String> {
    build(src).map_err(|e| format!("{src}: {e}"))
}

fn criterion_3() -> Check {
    let limit = Duration::from_secs(1);
    for n in 2..=6 {
        let start = Instant::now();
        let b = built(&format!("sphere({n})"))?;
        ensure(b.ring.kunneth_ideal_dim(n).map_err(|e| e.to_string())? == 0, || format!("K^{n}(S^{n}) != 0"))?;
        within(start, limit, "sphere")?;
    }
    for n in 2..=5 {
        let start = Instant::now();
        let b = built(&format!("torus({n})"))?;
        ensure(b.ring.in_kunneth_ideal(&b.ring.fundamental_class()).map_err(|e| e.to_string())?, || {
            format!("vol not in K^{n}(T^{n})")
        })?;
        within(start, limit, "torus")?;
    }
    for m in 2..=3 {
        let start = Instant::now();
        let b = built(&format!("cp({})", m + 1))?;
        let s = parse_omega("sym", &b).map_err(|e| e.to_string())?;
        let sm = b.ring.multiply_all(&vec![s; m]).map_err(|e| e.to_string())?;
        ensure(!sm.is_zero() && b.ring.in_kunneth_ideal(&sm).map_err(|e| e.to_string())?, || {
            format!("s^{m} not a nonzero member of K^{}", 2 * m)
        })?;
        within(start, limit, "cp")?;
    }
    let start = Instant::now();
    let b = built("surface(2)*surface(2)")?;
    let x = parse_omega("vol(1) + vol(2)", &b).map_err(|e| e.to_string())?;
    ensure(b.ring.in_kunneth_ideal(&x).map_err(|e| e.to_string())?, || "sum of volume classes not in K^2".into())?;
    within(start, limit, "surface product")?;
    Ok("K^n(S^n)=0 (n=2..6); vol in K^n(T^n) (n=2..5); 0 != s^m in K^2m(CP^{m+1}) (m=2,3); vol(1)+vol(2) in K^2".into())
}

fn convolve(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn catalog_rings() -> Vec<String> {
    let mut v: Vec<String> = Vec::new();
    v.extend((2..=6).map(|n| format!("sphere({n})")));
    v.extend((1..=5).map(|n| format!("torus({n})")));
    v.extend((1..=5).map(|g| format!("surface({g})")));
    v.extend((1..=3).map(|m| format!("cp({m})")));
    v.push("s2xs2".into());
    v.extend((1..=5).map(|g| format!("surface({g})*cp(2)")));
    v.extend((1..=10).map(|nu| format!("connsum(s2xs2,{nu})")));
    v.extend((1..=10).map(|nu| format!("connsum(s2xs2,{nu})*cp(2)")));
    v
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let cat = catalog_rings();
    for src in &cat {
        // `build` validates exhaustively: unit, graded commutativity,
        // associativity on all basis triples, Poincaré nondegeneracy.
        let b = built(src)?;
        b.ring.validate().map_err(|e| format!("{src}: {e}"))?;
        if b.factors.len() > 1 {
            let dims = b.factors.iter().map(|f| f.ring.dims().to_vec()).reduce(|a, c| convolve(&a, &c)).unwrap();
            ensure(dims == b.ring.dims(), || format!("{src}: dims {:?} vs convolution {dims:?}", b.ring.dims()))?;
        }
    }
    for nu in 1..=10usize {
        let b = built(&format!("connsum(s2xs2,{nu})"))?;
        ensure(b.ring.dims() == [1, 0, 2 * nu, 0, 1], || format!("connsum dims {:?}", b.ring.dims()))?;
    }
    let mixed = built("connsum(torus(4), cp(2))")?;
    let (t, c) = (built("torus(4)")?, built("cp(2)")?);
    for k in 1..4 {
        ensure(mixed.ring.dim(k) == t.ring.dim(k) + c.ring.dim(k), || format!("mixed connsum degree {k}"))?;
    }
    within(start, Duration::from_secs(10), "ring suite")?;
    Ok(format!("{} catalog rings valid; product dims = convolution; connsum middle dims additive", cat.len()))
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let mut pairs = 0usize;
    for n in 1..=5 {
        let all: Vec<Vec<usize>> = (0..=n).flat_map(|k| oracle::subsets(n, k)).collect();
        for a in &all {
            for b in &all {
                let x = ExtElement::blade(n, a, q(1)).map_err(|e| e.to_string())?;
                let y = ExtElement::blade(n, b, q(1)).map_err(|e| e.to_string())?;
                let got: oracle::Dense = x.wedge(&y).map_err(|e| e.to_string())?.terms().map(|(bl, c)| (bl.axes(), c.clone())).collect();
                let mut want = oracle::Dense::new();
                if let Some((c, s)) = oracle::wedge_blades(a, b) {
                    want.insert(c, q(s));
                }
                ensure(got == want, || format!("e{a:?} ^ e{b:?} in R^{n}"))?;
                pairs += 1;
            }
        }
        for k in 0..=n {
            ensure(dim_component(n, k) == oracle::subsets(n, k).len() as u128, || format!("C({n},{k})"))?;
            ensure(blades_of_degree(n, k).len() == oracle::subsets(n, k).len(), || format!("blades({n},{k})"))?;
        }
    }
    let n = 5;
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce97);
    let mut random = |k: usize| -> ExtElement {
        let terms = blades_of_degree(n, k)
            .into_iter()
            .filter_map(|b| {
                let c: i64 = rng.gen_range(-2..=2);
                (c != 0).then(|| (b, q(c)))
            })
            .collect();
        ExtElement::from_terms(n, terms).expect("valid blades")
    };
    let mut samples = 0usize;
    for p in 0..=n {
        for k in 0..=n {
            for _ in 0..1000 {
                let (x, y) = (random(p), random(k));
                let sign: Q = if p * k % 2 == 0 { q(1) } else { q(-1) };
                ensure(x.wedge(&y).unwrap() == y.wedge(&x).unwrap().scale(&sign), || format!("anticommutativity ({p},{k})"))?;
                samples += 1;
            }
        }
    }
    within(start, Duration::from_secs(10), "exterior oracle")?;
    Ok(format!("{pairs} blade pairs (n<=5) match the permutation-sign oracle; {samples} seeded pairs anticommute"))
}

/// Every rational coefficient in the payload, as a JSON pointer.
fn coefficient_paths(v: &Value, path: String, out: &mut Vec<String>) {
    match v {
        Value::String(s) if qrob_core::rational::parse_q(s).is_ok() && s.contains('/') => out.push(path),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| coefficient_paths(x, format!("{path}/{i}"), out)),
        Value::Object(m) => m.iter().for_each(|(k, x)| coefficient_paths(x, format!("{path}/{}", k.replace('~', "~0").replace('/', "~1")), out)),
        _ => {}
    }
}

fn bump(v: &mut Value) {
    let s = v.as_str().expect("coefficient string");
    let x = qrob_core::rational::parse_q(s).expect("rational");
    // Keep stored coefficients nonzero so the file still parses.
    let x = if x == q(-1) { q(1) } else { x + q(1) };
    *v = Value::String(qrob_core::rational::format_q(&x));
}

fn refresh_digest(doc: &mut Value) {
    let payload = doc.get("certificate").or_else(|| doc.get("witness")).cloned().expect("payload");
    use sha2::Digest as _;
    // Recompute exactly as the writer does: the typed payload, compact JSON.
    let digest = if doc.get("certificate").is_some() {
        let c: Certificate = serde_json::from_value(payload).unwrap();
        sha2::Sha256::digest(serde_json::to_string(&c).unwrap().as_bytes())
    } else {
        let w: qrob_core::homsearch::HomWitness = serde_json::from_value(payload).unwrap();
        sha2::Sha256::digest(serde_json::to_string(&w).unwrap().as_bytes())
    };
    doc["payload_sha256"] = Value::String(format!("sha256:{}", hex::encode(digest)));
}

fn criterion_6(dir: &Path) -> Check {
    let start = Instant::now();
    let cases = [
        ("surface(1)*cp(2)", "vol(1)^sym(2)", 4),
        ("surface(2)*cp(2)", "vol(1)^sym(2)", 4),
        ("connsum(s2xs2,8)*cp(2)", "vol(1)^sym(2)", 6),
        ("connsum(s2xs2,8)", "vol", 4),
        ("torus(4)", "vol", 4),
        ("cp(2)", "sym^sym", 4),
    ];
    let mut tampered = 0usize;
    for (expr, omega, n) in cases {
        let (_, v, file) = check(dir, expr, omega, n)?;
        ensure(verify_cli(&file)? == 0, || format!("{expr}: verify rejects the emitted file"))?;
        let text = std::fs::read_to_string(&file).map_err(|e| e.to_string())?;
        verify_document(&text, None).map_err(|e| format!("{expr}: {e}"))?;
        let doc: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        let key = if v.certificate.is_some() { "certificate" } else { "witness" };
        let mut paths = Vec::new();
        coefficient_paths(&doc[key], format!("/{key}"), &mut paths);
        for p in ["lhs", "rhs"] {
            if v.certificate.is_some() {
                paths.push(format!("/certificate/inequality/{p}"));
            }
        }
        // The embedded ring is covered by its hash; sample it evenly.
        let mut ring_paths = Vec::new();
        coefficient_paths(&doc["ring"], "/ring".into(), &mut ring_paths);
        let step = (ring_paths.len() / 8).max(1);
        paths.extend(ring_paths.into_iter().step_by(step).take(8));
        ensure(!paths.is_empty(), || format!("{expr}: nothing to tamper"))?;
        for p in &paths {
            for refresh in [false, true] {
                let mut t = doc.clone();
                let slot = t.pointer_mut(p).expect("path exists");
                if slot.is_number() {
                    *slot = Value::from(slot.as_u64().unwrap() + 1);
                } else {
                    bump(slot);
                }
                if refresh && !p.starts_with("/ring") {
                    refresh_digest(&mut t);
                }
                let s = serde_json::to_string_pretty(&t).unwrap();
                ensure(verify_document(&s, None).is_err(), || format!("{expr}: tampering {p} (digest refreshed: {refresh}) undetected"))?;
                tampered += 1;
            }
        }
        // One tampered file through the binary: exit code 5.
        let mut t = doc.clone();
        let first = paths.iter().find(|p| !p.starts_with("/ring")).unwrap_or(&paths[0]).clone();
        let slot = t.pointer_mut(&first).unwrap();
        if slot.is_number() {
            *slot = Value::from(slot.as_u64().unwrap() + 1);
        } else {
            bump(slot);
        }
        let bad = dir.join("tampered.json");
        std::fs::write(&bad, serde_json::to_string_pretty(&t).unwrap()).unwrap();
        let code = verify_cli(&bad.to_string_lossy())?;
        ensure(code == 5, || format!("{expr}: tampered file exit {code}"))?;
    }
    within(start, Duration::from_secs(5), "round trip")?;
    Ok(format!("{} files re-verify; {tampered} single-coefficient tamperings rejected", cases.len()))
}

fn catalog_queries() -> Vec<(String, String, usize)> {
    let mut v = Vec::new();
    for n in 2..=5 {
        v.push((format!("torus({n})"), "vol".to_string(), n));
    }
    for g in 1..=5 {
        v.push((format!("surface({g})*cp(2)"), "vol(1)^sym(2)".to_string(), 4));
    }
    for nu in 1..=10 {
        v.push((format!("connsum(s2xs2,{nu})*cp(2)"), "vol(1)^sym(2)".to_string(), 6));
    }
    for m in 2..=3 {
        v.push((format!("cp({m})"), vec!["sym"; m].join("^"), 2 * m));
    }
    v.push(("cp(3)".into(), "sym^sym".into(), 4));
    v
}

fn criterion_7() -> Check {
    let start = Instant::now();
    let (mut obstructed, mut witnessed) = (0, 0);
    for (expr, omega, n) in catalog_queries() {
        let b = built(&expr)?;
        let w: RingElement = parse_omega(&omega, &b).map_err(|e| e.to_string())?;
        let cert = qrob_core::obstruct::search_obstruction(&b.ring, &w, n).map_err(|e| format!("{expr}: {e}"))?;
        let cert_ok = match &cert {
            Some(c) => verify_certificate(&b.ring, c).map(|_| true).map_err(|e| format!("{expr}: {e}"))?,
            None => false,
        };
        let wit = match witness_template(&b, &w, n).map_err(|e| e.to_string())? {
            Some(x) => Some(x),
            None => enumerate_hom(&b.ring, &w, n, &Budget::default()).map_err(|e| e.to_string())?.witness,
        };
        let wit_ok = match &wit {
            Some(x) => verify_hom(&b.ring, x, &w).map_err(|e| e.to_string())?,
            None => false,
        };
        ensure(!(cert_ok && wit_ok), || format!("{expr}, ω = {omega}, n = {n}: both a certificate and a witness verify"))?;
        obstructed += usize::from(cert_ok);
        witnessed += usize::from(wit_ok);
    }
    within(start, Duration::from_secs(60), "soundness sweep")?;
    Ok(format!("{} queries: {obstructed} obstructed, {witnessed} witnessed, none both", catalog_queries().len()))
}

fn criterion_8() -> Check {
    let start = Instant::now();
    let b = built("torus(2)*torus(2)")?;
    let omega = parse_omega("vol(1) + vol(2)", &b).map_err(|e| e.to_string())?;
    let iota = slice_pullback(&b, 0).map_err(|e| e.to_string())?;
    let rep = submanifold_bound(&b.ring, &b.factors[0].ring, &iota, &omega, 2).map_err(|e| e.to_string())?;
    ensure(rep.pullback_of_omega_nonzero && rep.bounds_hold && rep.certificate.is_none(), || {
        format!("torus slice: {rep:?}")
    })?;
    let b = built("surface(2)*torus(2)")?;
    let omega = parse_omega("vol(1) + vol(2)", &b).map_err(|e| e.to_string())?;
    let iota = slice_pullback(&b, 0).map_err(|e| e.to_string())?;
    let rep = submanifold_bound(&b.ring, &b.factors[0].ring, &iota, &omega, 2).map_err(|e| e.to_string())?;
    let cert = rep.certificate.ok_or("no certificate for the genus-two slice")?;
    ensure(cert.kind == CertificateKind::SubmanifoldBound && cert.inequality.to_string() == "4 > 2", || {
        format!("genus-two slice: {}", cert.inequality)
    })?;
    verify_certificate(&b.ring, &cert).map_err(|e| e.to_string())?;
    within(start, Duration::from_secs(5), "submanifold bound")?;
    Ok("T^2 slice of T^2 x T^2: bounds hold, pull-back of ω nonzero; genus-2 slice of Σ_2 x T^2: SubmanifoldBound 4 > 2".into())
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let criteria: Vec<Criterion> = vec![
        ("genus family surface(g)*cp(2), n = 4 (limit 5 s each)", Box::new(|| criterion_1(dir.path()))),
        ("connected sums connsum(s2xs2,ν)*cp(2), n = 6 (limit 30 s each)", Box::new(|| criterion_2(dir.path()))),
        ("Künneth ideal suite (exact, limit 1 s each)", Box::new(criterion_3)),
        ("ring property suite over the catalog (limit 10 s)", Box::new(criterion_4)),
        ("exterior kernel oracle (limit 10 s)", Box::new(criterion_5)),
        ("certificate/witness round trip and tampering (limit 5 s)", Box::new(|| criterion_6(dir.path()))),
        ("soundness exclusion over the catalog (limit 60 s)", Box::new(criterion_7)),
        ("submanifold bound (limit 5 s)", Box::new(criterion_8)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS criterion {}: {name} [{secs:.2}s] {detail}", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL criterion {}: {name} [{secs:.2}s] {e}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
