//! Acceptance criteria 1 to 9, one line each. Criterion 9 also reruns every
//! sample command through the built binary.

use std::process::{Command, ExitCode};
use std::time::Instant;

use locstat::audit::{self, Report, CRITERIA, DEFAULT_SEED};
use locstat::cli::sample_invocations;

fn binary_reruns() -> Result<usize, String> {
    let dir = std::env::temp_dir().join(format!("locstat-acceptance-{}", std::process::id()));
    let cmds = sample_invocations(&dir).map_err(|e| e.to_string())?;
    let exe = env!("CARGO_BIN_EXE_locstat");
    let run =
        |args: &[String]| Command::new(exe).args(&args[1..]).env("NO_COLOR", "1").output().map_err(|e| e.to_string());
    for c in &cmds {
        let (a, b) = (run(c)?, run(c)?);
        if a.stdout != b.stdout || a.stderr != b.stderr || a.status.code() != b.status.code() {
            return Err(format!("{} differs between runs", c[1..].join(" ")));
        }
        if !a.status.success() {
            return Err(format!("{} exited with {:?}", c[1..].join(" "), a.status.code()));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(cmds.len())
}

fn main() -> ExitCode {
    let mut failed = 0;
    for &(id, _) in &CRITERIA {
        let start = Instant::now();
        let mut report = audit::run(id, DEFAULT_SEED);
        if id == 9 && report.passed {
            match binary_reruns() {
                Ok(n) => report.detail.push_str(&format!("; {n} binary invocations byte-identical")),
                Err(e) => report = Report { passed: false, detail: e, ..report },
            }
        }
        failed += usize::from(!report.passed);
        println!("{report} ({:.1}s)", start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
