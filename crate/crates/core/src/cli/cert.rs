//! Certificates for satisfiable equations and their polynomial-time check.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::pipeline::{abelian_solution, SolveError};
use crate::lifter::{lift, verify, Witness};
use crate::qnormal::StandardEquation;
use crate::reducer::{b19_bound, build_reduced, build_system, wbar_radius, WbarTuple};
use crate::wedgesolve::{SymplecticTuple, WedgeInstance};
use crate::zlattice::{reduce_lattice, AbVec, Lattice};

pub const CERT_VERSION: u32 = 1;

/// The conjugator images, a basis of `L` and the wedge solution in the
/// generators of `R = L / Q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: u32,
    pub wbars: WbarTuple,
    pub l_basis: Vec<AbVec>,
    /// `2g` rows: `u_1, …, u_g, v_1, …, v_g`.
    pub t: Vec<Vec<i64>>,
    /// SHA-256 over the equation and the fields above.
    pub transcript: String,
}

#[derive(Serialize)]
struct TranscriptBody<'a> {
    version: u32,
    equation: &'a StandardEquation,
    wbars: &'a WbarTuple,
    l_basis: &'a [AbVec],
    t: &'a [Vec<i64>],
}

fn transcript(eq: &StandardEquation, c: &Certificate) -> String {
    let body = TranscriptBody { version: c.version, equation: eq, wbars: &c.wbars, l_basis: &c.l_basis, t: &c.t };
    let bytes = serde_json::to_vec(&body).expect("transcript serializes");
    hex::encode(Sha256::digest(&bytes))
}

pub(crate) fn emit_certificate(
    eq: &StandardEquation,
    wbars: &WbarTuple,
    l: &Lattice,
    tuple: &SymplecticTuple,
) -> Result<Certificate, SolveError> {
    let l_basis = if l.rank() == 0 {
        Vec::new()
    } else {
        reduce_lattice(l).map_err(|e| SolveError::Internal(e.to_string()))?.vectors_ab()
    };
    let mut t = tuple.us.clone();
    t.extend(tuple.vs.iter().cloned());
    let mut c = Certificate { version: CERT_VERSION, wbars: wbars.clone(), l_basis, t, transcript: String::new() };
    c.transcript = transcript(eq, &c);
    log::debug!("certificate record size {} bytes", serde_json::to_vec(&c).map(|v| v.len()).unwrap_or(0));
    Ok(c)
}

#[derive(Clone, Debug, Serialize)]
pub struct CertCheck {
    pub accepted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

fn reject(reason: impl Into<String>) -> CertCheck {
    CertCheck { accepted: false, reason: Some(reason.into()), witness: None }
}

/// Checks a certificate against the standard equation it was issued for. No
/// search is involved: every step is a normal form computation or a
/// bounded-size linear solve.
pub fn verify_certificate(eq: &StandardEquation, cert: &Certificate) -> CertCheck {
    let n = eq.rank;
    if cert.version != CERT_VERSION {
        return reject(format!("unsupported certificate version {}", cert.version));
    }
    let radius = wbar_radius(eq);
    if cert.wbars.len() != eq.m() || cert.wbars.0.iter().any(|w| w.len() != n) || !cert.wbars.within(radius) {
        return reject("wbar bound");
    }
    let sys = match build_system(eq, &cert.wbars) {
        Ok(s) => s,
        Err(e) => return reject(format!("reduction system: {}", e)),
    };
    if cert.l_basis.len() > n || cert.l_basis.iter().any(|b| b.len() != n) {
        return reject("L basis has the wrong shape");
    }
    let bound = b19_bound(&sys);
    if cert.l_basis.iter().any(|b| (b.l2_sq() as f64).sqrt() > bound) {
        return reject("L-basis bound");
    }
    let l = Lattice::from_generators(n, &cert.l_basis);
    if l.rank() != cert.l_basis.len() {
        return reject("L basis is linearly dependent");
    }
    if !sys.cbars.iter().all(|c| l.contains(c)) {
        return reject("coefficient image outside L");
    }
    if !sys.delta_vanishes(&l) {
        return reject("chain condition fails modulo L");
    }
    let rp = match build_reduced(&sys, &l) {
        Ok(Some(rp)) => rp,
        Ok(None) => return reject("wedge target outside Λ²(L)"),
        Err(e) => return reject(format!("quotient: {}", e)),
    };
    let Some(inst) = WedgeInstance::from_reduced(&rp) else {
        return reject("quotient data exceeds machine integers");
    };
    let g = eq.genus;
    let q = inst.rank();
    if cert.t.len() != 2 * g || cert.t.iter().any(|r| r.len() != q) {
        return reject(format!("T must be {} × {}", 2 * g, q));
    }
    let tuple = SymplecticTuple::new(cert.t[..g].to_vec(), cert.t[g..].to_vec());
    if !inst.wedge_matches(&tuple) {
        return reject("T does not solve the wedge equation");
    }
    if !inst.generates(&tuple) {
        return reject("T does not generate L / Q");
    }
    let witness = match abelian_solution(eq, &sys, &rp, &tuple).and_then(|s| Ok(lift(eq, &s)?)) {
        Ok(w) => w,
        Err(e) => return reject(format!("lifting failed: {}", e)),
    };
    match verify(eq, &witness) {
        Ok(true) => {}
        _ => return reject("lifted witness does not verify"),
    }
    if transcript(eq, cert) != cert.transcript {
        return reject("transcript hash mismatch");
    }
    CertCheck { accepted: true, reason: None, witness: Some(witness) }
}

/// Largest absolute entry, for size reporting.
pub fn certificate_max_entry(c: &Certificate) -> i64 {
    let a = c.wbars.0.iter().chain(&c.l_basis).map(AbVec::linf).max().unwrap_or(0);
    let b = c.t.iter().flatten().map(|x| x.unsigned_abs().to_i64().unwrap_or(i64::MAX)).max().unwrap_or(0);
    a.max(b)
}
