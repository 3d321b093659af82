use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, ValueEnum};
use qcost::io::write_atomic;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Directory receiving the JSON report and CSV table. Without it the
    /// report goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// What to print on stdout when `--out` is absent.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Heralding(String),
}

impl From<qcost::Error> for Failure {
    fn from(e: qcost::Error) -> Self {
        match e {
            qcost::Error::HeraldingFailed(_) => Failure::Heralding(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

/// Files and stdout text produced by a command, plus failed checks.
#[derive(Debug, Default)]
pub struct Outcome {
    pub out_dir: Option<PathBuf>,
    pub files: Vec<(String, String)>,
    pub stdout: String,
    pub violations: Vec<String>,
    pub statistical: Vec<String>,
}

impl Outcome {
    /// Standard layout: `<stem>.json` and `<stem>.csv` under `--out`, or one
    /// of them on stdout.
    pub fn report(out: &OutputArgs, stem: &str, json: String, csv: String) -> Self {
        let stdout = match (&out.out, out.format) {
            (Some(_), _) => String::new(),
            (None, Format::Json) => json.clone(),
            (None, Format::Csv) => csv.clone(),
        };
        Self {
            out_dir: out.out.clone(),
            files: vec![(format!("{stem}.json"), json), (format!("{stem}.csv"), csv)],
            stdout,
            ..Self::default()
        }
    }

    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.violations.push(what());
        }
    }
}

pub fn finish(result: Result<Outcome, Failure>) -> ExitCode {
    let outcome = match result {
        Ok(o) => o,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Heralding(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(3);
        }
    };
    if let Some(dir) = &outcome.out_dir {
        for (name, contents) in &outcome.files {
            if let Err(e) = write_atomic(&dir.join(name), contents.as_bytes()) {
                eprintln!("error: writing {}: {e}", dir.join(name).display());
                return ExitCode::from(2);
            }
        }
    }
    print!("{}", outcome.stdout);
    for v in &outcome.violations {
        eprintln!("tolerance violation: {v}");
    }
    for s in &outcome.statistical {
        eprintln!("statistical failure: {s}");
    }
    if !outcome.violations.is_empty() {
        ExitCode::from(1)
    } else if !outcome.statistical.is_empty() {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}

pub fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::Invalid(e.to_string()))?;
    s.push('\n');
    Ok(s)
}
