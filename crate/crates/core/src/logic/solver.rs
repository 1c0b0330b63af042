use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverVerdict {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("solver not found: {0}")]
    NotFound(PathBuf),
    #[error("solver i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver timed out after {0:?}")]
    Timeout(Duration),
    #[error("solver exited with {code:?}: {output}")]
    NonZeroExit { code: Option<i32>, output: String },
    #[error("unexpected solver output: {0}")]
    UnexpectedOutput(String),
}

/// Locate a solver: an explicit path, else `z3` on `PATH`.
pub fn find_solver(explicit: Option<&Path>) -> Option<PathBuf> {
    if let Some(p) = explicit {
        return p.exists().then(|| p.to_path_buf());
    }
    let path = std::env::var_os("PATH")?;
    std::env::split_paths(&path).map(|d| d.join("z3")).find(|p| p.is_file())
}

fn first_verdict(stdout: &str) -> Option<SolverVerdict> {
    match stdout.lines().map(str::trim).find(|l| !l.is_empty())? {
        "sat" => Some(SolverVerdict::Sat),
        "unsat" => Some(SolverVerdict::Unsat),
        "unknown" => Some(SolverVerdict::Unknown),
        _ => None,
    }
}

fn drain(mut r: impl Read + Send + 'static) -> thread::JoinHandle<String> {
    thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = r.read_to_end(&mut buf);
        String::from_utf8_lossy(&buf).into_owned()
    })
}

/// Write the script to its own temp file and run `solver <file>`.
pub fn run_solver(script: &str, solver: &Path, timeout: Duration) -> Result<SolverVerdict, SolverError> {
    let mut file = tempfile::Builder::new().prefix("nyaya-").suffix(".smt2").tempfile()?;
    file.write_all(script.as_bytes())?;
    file.flush()?;

    let mut child = match Command::new(solver)
        .arg(file.path())
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
    {
        Ok(c) => c,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(SolverError::NotFound(solver.to_path_buf())),
        Err(e) => return Err(e.into()),
    };
    let out = drain(child.stdout.take().expect("piped stdout"));
    let err = drain(child.stderr.take().expect("piped stderr"));

    let start = Instant::now();
    let status = loop {
        if let Some(s) = child.try_wait()? {
            break s;
        }
        if start.elapsed() >= timeout {
            let _ = child.kill();
            let _ = child.wait();
            return Err(SolverError::Timeout(timeout));
        }
        thread::sleep(Duration::from_millis(5));
    };
    let stdout = out.join().unwrap_or_default();
    let stderr = err.join().unwrap_or_default();

    match first_verdict(&stdout) {
        Some(v) => Ok(v),
        None if !status.success() => Err(SolverError::NonZeroExit {
            code: status.code(),
            output: format!("{stdout}{stderr}").trim().to_string(),
        }),
        None => Err(SolverError::UnexpectedOutput(format!("{stdout}{stderr}").trim().to_string())),
    }
}
