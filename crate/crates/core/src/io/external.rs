use std::io::Read;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use super::smtlib::emit_smtlib;
use super::IoError;
use crate::engines::ExternalAnswer;
use crate::horn::HornSystem;

/// Environment variable naming the default external solver command.
pub const EXTERNAL_SOLVER_ENV: &str = "HORNCLAW_EXTERNAL_SOLVER";

/// Writes the emitted script to a temporary file and runs `command FILE`
/// (the command is split on whitespace). Reads the first token of output.
/// A timeout, nonzero exit or unexpected answer gives `Unknown`.
pub fn run_external_solver(s: &HornSystem, command: &str, timeout: Duration) -> Result<ExternalAnswer, IoError> {
    let script = emit_smtlib(s)?;
    let mut file = tempfile::Builder::new().suffix(".smt2").tempfile()?;
    std::io::Write::write_all(&mut file, script.as_bytes())?;
    let mut parts = command.split_whitespace();
    let prog = parts.next().ok_or_else(|| IoError::External("empty solver command".into()))?;
    let mut child = Command::new(prog)
        .args(parts)
        .arg(file.path())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| IoError::External(format!("cannot run {prog}: {e}")))?;
    let pipe = |r: Option<Box<dyn Read + Send>>| {
        std::thread::spawn(move || {
            let mut buf = String::new();
            if let Some(mut r) = r {
                let _ = r.read_to_string(&mut buf);
            }
            buf
        })
    };
    let out_reader = pipe(child.stdout.take().map(|o| Box::new(o) as Box<dyn Read + Send>));
    let err_reader = pipe(child.stderr.take().map(|e| Box::new(e) as Box<dyn Read + Send>));
    let start = Instant::now();
    let status = loop {
        if let Some(st) = child.try_wait()? {
            break st;
        }
        if start.elapsed() > timeout {
            let _ = child.kill();
            let _ = child.wait();
            return Ok(ExternalAnswer::Unknown(format!("timeout after {}s", timeout.as_secs())));
        }
        std::thread::sleep(Duration::from_millis(10));
    };
    let out = out_reader.join().unwrap_or_default();
    let err = err_reader.join().unwrap_or_default();
    let first = out.split_whitespace().next().unwrap_or("");
    Ok(match (status.success(), first) {
        (true, "sat") => ExternalAnswer::Sat,
        (true, "unsat") => ExternalAnswer::Unsat,
        (true, other) => ExternalAnswer::Unknown(format!("solver answered {other:?}")),
        (false, _) => ExternalAnswer::Unknown(format!("solver exited with {status}: {}", err.trim())),
    })
}
