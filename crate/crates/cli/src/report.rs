use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Why a command produced no result.
#[derive(Debug)]
pub enum Failure {
    /// Malformed or inconsistent input; exit status 2.
    Input(String),
}

impl From<tpd_core::Error> for Failure {
    fn from(e: tpd_core::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

/// What a command computed, before it is wrapped in a [`RunReport`].
pub struct Outcome {
    pub result: Value,
    /// `false` turns into exit status 1.
    pub passed: bool,
    pub input_digest: Option<String>,
    /// Enumeration mode when the command scanned tuples.
    pub mode: Option<&'static str>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub args: Vec<String>,
    pub input_digest: Option<String>,
    pub jobs: usize,
    pub mode: Option<&'static str>,
    pub wall_time_ms: u128,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub result: Value,
}

impl RunReport {
    pub fn success(command: &'static str, args: Vec<String>, jobs: usize, wall_time_ms: u128, out: Outcome) -> Self {
        Self {
            command,
            args,
            input_digest: out.input_digest,
            jobs,
            mode: out.mode,
            wall_time_ms,
            ok: out.passed,
            error: None,
            result: out.result,
        }
    }

    pub fn error(command: &'static str, args: Vec<String>, jobs: usize, wall_time_ms: u128, message: &str) -> Self {
        Self {
            command,
            args,
            input_digest: None,
            jobs,
            mode: None,
            wall_time_ms,
            ok: false,
            error: Some(message.to_string()),
            result: Value::Null,
        }
    }

    pub fn print(&self) {
        println!("{}", serde_json::to_string_pretty(self).expect("reports always serialize"));
    }
}
