//! Front end for the obstruction engine: the form-class language, the
//! check pipeline producing self-contained verdict files, and their
//! independent re-verification.

pub mod omega;
pub mod render;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qrob_core::homsearch::{check_hom, enumerate_hom, witness_template, Budget, HomWitness};
use qrob_core::obstruct::{search_obstruction_logged, verify_certificate, Certificate};
use qrob_core::ring::{parse_manifold, BuiltManifold, ClassFile, GradedRing, RingFile};

pub use omega::parse_omega;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qrob_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    /// 3 = precondition failure, 4 = parse/IO/usage error, 5 = verification
    /// failure.
    pub fn exit_code(&self) -> i32 {
        use qrob_core::Error as E;
        match self {
            CliError::Core(E::Precondition(_) | E::IdealUndefined(_) | E::DegreeOutOfRange { .. }) => 3,
            CliError::Core(
                E::CertificateRejected(_) | E::HashMismatch { .. } | E::NotHomomorphism(_) | E::InvalidSystem(_),
            )
            | CliError::Verification(_) => 5,
            _ => 4,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn read_file(path: &str) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

pub fn write_file(path: &str, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.into(), source })
}

pub fn build(expr: &str) -> CliResult<BuiltManifold> {
    Ok(parse_manifold(expr)?.build()?)
}

#[derive(Clone, Debug)]
pub struct Query {
    pub manifold: String,
    pub omega: String,
    pub n: usize,
    pub budget: Budget,
}

impl Query {
    pub fn new(manifold: &str, omega: &str, n: usize) -> Self {
        Query { manifold: manifold.into(), omega: omega.into(), n, budget: Budget::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Witness,
    Obstructed,
    Unknown,
    PreconditionFailed,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Witness => 0,
            Outcome::Obstructed => 1,
            Outcome::Unknown => 2,
            Outcome::PreconditionFailed => 3,
        }
    }
}

/// Hypotheses on `(N, ω, n)` required before any search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Preconditions {
    pub n_in_range: bool,
    pub omega_nonzero: bool,
    pub omega_homogeneous_of_degree_n: bool,
    pub omega_in_kn: bool,
}

impl Preconditions {
    pub fn hold(&self) -> bool {
        self.n_in_range && self.omega_nonzero && self.omega_homogeneous_of_degree_n && self.omega_in_kn
    }
}

/// A self-contained verdict: the query, the ring it was decided on, and the
/// certificate or witness, plus a digest of that payload.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub verdict: Outcome,
    pub manifold: String,
    pub omega: String,
    pub n: usize,
    pub ring_hash: String,
    pub preconditions: Preconditions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_class: Option<ClassFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<HomWitness>,
    pub search_log: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload_sha256: Option<String>,
    pub ring: RingFile,
}

impl Verdict {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serializes")
    }

    pub fn m(&self) -> Option<u128> {
        self.certificate.as_ref().map(Certificate::m)
    }
}

fn sha256_of<T: Serialize>(x: &T) -> String {
    let json = serde_json::to_string(x).expect("payload serializes");
    format!("sha256:{}", hex::encode(Sha256::digest(json.as_bytes())))
}

fn payload_digest(cert: &Option<Certificate>, witness: &Option<HomWitness>) -> Option<String> {
    match (cert, witness) {
        (Some(c), _) => Some(sha256_of(c)),
        (None, Some(w)) => Some(sha256_of(w)),
        (None, None) => None,
    }
}

fn preconditions(ring: &GradedRing, omega: &qrob_core::ring::RingElement, n: usize) -> CliResult<Preconditions> {
    let n_in_range = (2..=ring.top_degree()).contains(&n);
    let homogeneous = omega.homogeneous_degree() == Some(n);
    let in_kn = n_in_range && homogeneous && ring.in_kunneth_ideal(omega)?;
    Ok(Preconditions {
        n_in_range,
        omega_nonzero: !omega.is_zero(),
        omega_homogeneous_of_degree_n: homogeneous,
        omega_in_kn: in_kn,
    })
}

/// Build, check preconditions, search for a certificate, then for a witness
/// (templates first, enumeration second).
pub fn run_query(q: &Query) -> CliResult<Verdict> {
    let built = build(&q.manifold)?;
    let ring = &built.ring;
    let omega = parse_omega(&q.omega, &built)?;
    let pre = preconditions(ring, &omega, q.n)?;
    let mut log = Vec::new();
    let mut verdict = Verdict {
        verdict: Outcome::PreconditionFailed,
        manifold: built.expr.to_string(),
        omega: q.omega.clone(),
        n: q.n,
        ring_hash: ring.hash(),
        preconditions: pre.clone(),
        omega_class: ClassFile::from_element(&omega).filter(|_| pre.omega_homogeneous_of_degree_n),
        certificate: None,
        witness: None,
        search_log: Vec::new(),
        payload_sha256: None,
        ring: ring.to_file(),
    };
    if !pre.hold() {
        if !pre.n_in_range {
            log.push(format!("n = {} is outside 2..={}", q.n, ring.top_degree()));
        }
        if !pre.omega_nonzero {
            log.push("ω is zero".into());
        } else if !pre.omega_homogeneous_of_degree_n {
            log.push(format!("ω is not homogeneous of degree {}", q.n));
        } else if !pre.omega_in_kn {
            log.push(format!("ω is not in the Künneth ideal K^{}(N)", q.n));
        }
        verdict.search_log = log;
        return Ok(verdict);
    }

    let report = search_obstruction_logged(ring, &omega, q.n)?;
    log.extend(report.log);
    if let Some(cert) = report.certificate {
        verdict.verdict = Outcome::Obstructed;
        verdict.certificate = Some(cert);
    } else if let Some(w) = witness_template(&built, &omega, q.n)? {
        log.push("template witness verified".into());
        verdict.verdict = Outcome::Witness;
        verdict.witness = Some(w);
    } else {
        log.push("templates: no verified witness".into());
        if ring.presentation().is_some() {
            let out = enumerate_hom(ring, &omega, q.n, &q.budget)?;
            match out.witness {
                Some(w) => {
                    log.push(format!("enumeration: witness after {} nodes", out.nodes));
                    verdict.verdict = Outcome::Witness;
                    verdict.witness = Some(w);
                }
                None if out.exhausted_budget => {
                    log.push(format!("enumeration: node budget of {} exhausted", q.budget.node_cap));
                    verdict.verdict = Outcome::Unknown;
                }
                None => {
                    log.push(format!(
                        "enumeration: no witness with the given coefficient set ({} nodes, search space exhausted)",
                        out.nodes
                    ));
                    verdict.verdict = Outcome::Unknown;
                }
            }
        } else {
            log.push("enumeration: skipped (no monomial presentation)".into());
            verdict.verdict = Outcome::Unknown;
        }
    }
    verdict.search_log = log;
    verdict.payload_sha256 = payload_digest(&verdict.certificate, &verdict.witness);
    Ok(verdict)
}

/// What a successful `verify` established.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verified {
    Certificate { kind: String, inequality: String },
    Witness,
    NothingToVerify(Outcome),
}

fn fail(msg: impl Into<String>) -> CliError {
    CliError::Verification(msg.into())
}

/// Re-checks a verdict file from its own contents, or a bare certificate
/// against a separately supplied ring file.
pub fn verify_document(doc: &str, ring_file: Option<&str>) -> CliResult<Verified> {
    let value: serde_json::Value = serde_json::from_str(doc).map_err(qrob_core::Error::from)?;
    if value.get("verdict").is_some() {
        let v: Verdict = serde_json::from_value(value).map_err(qrob_core::Error::from)?;
        return verify_verdict(&v);
    }
    if value.get("kind").is_some() {
        let cert: Certificate = serde_json::from_value(value).map_err(qrob_core::Error::from)?;
        let ring = ring_file.ok_or_else(|| CliError::Usage("a bare certificate needs --ring RING.json".into()))?;
        let ring = GradedRing::from_json(ring).map_err(|e| fail(format!("ring file: {e}")))?;
        verify_certificate(&ring, &cert)?;
        return Ok(Verified::Certificate { kind: format!("{:?}", cert.kind), inequality: cert.inequality.to_string() });
    }
    Err(CliError::Usage("not a verdict or certificate file".into()))
}

fn verify_verdict(v: &Verdict) -> CliResult<Verified> {
    let ring = GradedRing::from_file(&v.ring).map_err(|e| fail(format!("embedded ring: {e}")))?;
    let actual = ring.hash();
    if actual != v.ring_hash {
        return Err(qrob_core::Error::HashMismatch { expected: v.ring_hash.clone(), actual }.into());
    }
    let built = build(&v.manifold)?;
    if built.ring.hash() != v.ring_hash {
        return Err(fail(format!("ring does not match the manifold {}", v.manifold)));
    }
    let omega = parse_omega(&v.omega, &built)?;
    let pre = preconditions(&ring, &omega, v.n)?;
    if pre != v.preconditions {
        return Err(fail("recorded preconditions do not match recomputation"));
    }
    let class = ClassFile::from_element(&omega).filter(|_| pre.omega_homogeneous_of_degree_n);
    if class != v.omega_class {
        return Err(fail("recorded ω class does not match the ω expression"));
    }
    let verified = verify_payload(v, &ring, &omega, &pre)?;
    // Checked last so that a tampered payload reports the failing product.
    if payload_digest(&v.certificate, &v.witness) != v.payload_sha256 {
        return Err(fail("payload digest mismatch"));
    }
    Ok(verified)
}

fn verify_payload(
    v: &Verdict,
    ring: &GradedRing,
    omega: &qrob_core::ring::RingElement,
    pre: &Preconditions,
) -> CliResult<Verified> {
    match (v.verdict, &v.certificate, &v.witness) {
        (Outcome::Obstructed, Some(cert), None) => {
            if cert.n != v.n {
                return Err(fail("certificate is for a different n"));
            }
            verify_certificate(ring, cert)?;
            if let Some(cls) = &cert.classes.omega {
                if Some(cls) != v.omega_class.as_ref() {
                    return Err(fail("certificate concerns a different ω"));
                }
            }
            Ok(Verified::Certificate { kind: format!("{:?}", cert.kind), inequality: cert.inequality.to_string() })
        }
        (Outcome::Witness, None, Some(w)) => {
            if w.ambient_n != v.n {
                return Err(fail("witness is for a different n"));
            }
            if w.ring_hash != v.ring_hash {
                return Err(qrob_core::Error::HashMismatch { expected: w.ring_hash.clone(), actual: v.ring_hash.clone() }.into());
            }
            match check_hom(ring, w, omega)? {
                None => Ok(Verified::Witness),
                Some(reason) => Err(fail(reason)),
            }
        }
        (Outcome::Unknown | Outcome::PreconditionFailed, None, None) => {
            if (v.verdict == Outcome::PreconditionFailed) == pre.hold() {
                return Err(fail("verdict disagrees with the preconditions"));
            }
            Ok(Verified::NothingToVerify(v.verdict))
        }
        _ => Err(fail("verdict and payload are inconsistent")),
    }
}
