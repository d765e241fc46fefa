//! Exact-arithmetic inductive valuations over discretely valued fields, with
//! applications: ramified approximation inside Galois-invariant disks,
//! semistable models of elliptic curves, and minimal resultants of rational
//! maps on the projective line.
//!
//! Base fields are modeled by dense subfields of their completions (Q inside
//! Q_p, rational function fields inside Laurent series fields), so every
//! comparison the algorithms make is exact.

pub mod basefield;
pub mod diskoid;
pub mod dynres;
pub mod elliptic;
pub mod errors;
pub mod extfield;
pub mod field;
pub mod fq;
pub mod maclane;
pub mod poly;
pub mod request;
pub mod respoly;
pub mod val;
pub mod wtr;

use std::sync::OnceLock;

static LOG_LEVEL: OnceLock<u8> = OnceLock::new();

fn log_level() -> u8 {
    *LOG_LEVEL.get_or_init(|| match std::env::var("MACLANE_LOG").as_deref() {
        Ok("trace") => 2,
        Ok("info") => 1,
        _ => 0,
    })
}

pub(crate) fn log_trace(msg: &str) {
    if log_level() >= 2 {
        eprintln!("[trace] {}", msg);
    }
}

#[allow(dead_code)]
pub fn log_info(msg: &str) {
    if log_level() >= 1 {
        eprintln!("[info] {}", msg);
    }
}
