//! One-shot bridge to an external CHC solver.
//!
//! Any executable that accepts an `.smt2` path as its last argument and
//! prints `sat`, `unsat`, or `unknown` on some stdout line is compatible.
//! The subprocess is supervised with a wall-clock timeout and killed as
//! soon as an answer line arrives.

use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::mpsc;
use std::time::{Duration, Instant};

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub path: PathBuf,
    pub extra_args: Vec<String>,
    pub timeout: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverAnswer {
    Sat,
    Unsat,
    Unknown,
}

impl SolverAnswer {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverAnswer::Sat => "sat",
            SolverAnswer::Unsat => "unsat",
            SolverAnswer::Unknown => "unknown",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("failed to launch solver `{path}`: {source}")]
    Launch {
        path: String,
        source: std::io::Error,
    },
    #[error("solver timed out after {0:?}")]
    Timeout(Duration),
    #[error("solver exited without printing sat/unsat/unknown")]
    NoAnswer,
}

/// Run the solver once on the given script file and return the first
/// answer line.
pub fn run_solver(config: &SolverConfig, script: &Path) -> Result<SolverAnswer, SolverError> {
    let mut command = Command::new(&config.path);
    command
        .args(&config.extra_args)
        .arg(script)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null());
    // Own process group, so killing on timeout also reaps any helper
    // processes the solver spawned (they would otherwise keep the stdout
    // pipe open).
    #[cfg(unix)]
    {
        use std::os::unix::process::CommandExt;
        command.process_group(0);
    }
    let mut child = command.spawn().map_err(|source| SolverError::Launch {
        path: config.path.display().to_string(),
        source,
    })?;

    let stdout = child.stdout.take().expect("stdout piped");
    let (sender, receiver) = mpsc::channel::<String>();
    let reader = std::thread::spawn(move || {
        for line in BufReader::new(stdout).lines() {
            match line {
                Ok(line) => {
                    if sender.send(line).is_err() {
                        break;
                    }
                }
                Err(_) => break,
            }
        }
    });

    fn parse_answer(line: &str) -> Option<SolverAnswer> {
        match line.trim() {
            "sat" => Some(SolverAnswer::Sat),
            "unsat" => Some(SolverAnswer::Unsat),
            "unknown" => Some(SolverAnswer::Unknown),
            _ => None,
        }
    }

    enum Outcome {
        Answer(SolverAnswer),
        Exited,
        TimedOut,
    }

    let kill_group = |child: &mut std::process::Child| {
        #[cfg(unix)]
        unsafe {
            libc::kill(-(child.id() as i32), libc::SIGKILL);
        }
        let _ = child.kill();
    };

    let deadline = Instant::now() + config.timeout;
    let outcome = loop {
        if let Some(answer) = receiver.try_iter().find_map(|line| parse_answer(&line)) {
            kill_group(&mut child);
            break Outcome::Answer(answer);
        }
        match child.try_wait() {
            Ok(Some(_)) => break Outcome::Exited,
            Ok(None) => {}
            Err(_) => break Outcome::Exited,
        }
        if Instant::now() >= deadline {
            kill_group(&mut child);
            break Outcome::TimedOut;
        }
        std::thread::sleep(Duration::from_millis(10));
    };
    // Close any stray write ends held by solver helpers, so the reader
    // thread sees EOF; buffered output stays readable.
    kill_group(&mut child);
    let _ = child.wait();
    let _ = reader.join();
    match outcome {
        Outcome::Answer(answer) => Ok(answer),
        Outcome::TimedOut => Err(SolverError::Timeout(config.timeout)),
        // The reader thread has finished, so the channel holds everything
        // the solver printed before exiting.
        Outcome::Exited => receiver
            .try_iter()
            .find_map(|line| parse_answer(&line))
            .ok_or(SolverError::NoAnswer),
    }
}
