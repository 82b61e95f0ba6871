use std::io::Write;
use std::process::ExitCode;

use polyagg::Error;
use serde_json::{json, Value as Json};

pub const EXIT_LAW_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// What a command produced. Timing notes only ever go to stderr.
pub struct Output {
    pub json: Json,
    pub text: String,
    pub failed: bool,
    pub notes: Vec<String>,
}

impl Output {
    pub fn new(json: Json, text: impl Into<String>) -> Self {
        Output { json, text: text.into(), failed: false, notes: Vec::new() }
    }

    pub fn emit(self, json: bool) -> ExitCode {
        let mut out = std::io::stdout().lock();
        let body = if json { serde_json::to_string_pretty(&self.json).expect("json output") } else { self.text.trim_end().to_string() };
        let _ = writeln!(out, "{body}");
        let _ = out.flush();
        for n in &self.notes {
            eprintln!("{n}");
        }
        if self.failed {
            ExitCode::from(EXIT_LAW_FAILURE)
        } else {
            ExitCode::SUCCESS
        }
    }
}

pub fn error_json(e: &Error) -> Json {
    json!({
        "error": {
            "code": e.code(),
            "location": e.location().map(|l| l.to_string()),
            "message": e.to_string(),
            "witness": e.witness(),
        }
    })
}

pub fn report_error(e: &Error, json: bool) -> ExitCode {
    if json {
        println!("{}", serde_json::to_string_pretty(&error_json(e)).expect("json output"));
    } else {
        eprintln!("error[{}]: {e}", e.code());
        if let Some(w) = e.witness() {
            eprintln!("  witness: {w}");
        }
    }
    ExitCode::from(if matches!(e, Error::LawViolation { .. }) { EXIT_LAW_FAILURE } else { EXIT_USAGE })
}

/// Left-aligned columns separated by two spaces.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (i, cell) in r.iter().enumerate() {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().enumerate().map(|(i, c)| format!("{c:<w$}", w = widths[i])).collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut s = line(header.to_vec());
    s.push('\n');
    for r in rows {
        s.push_str(&line(r.iter().map(String::as_str).collect()));
        s.push('\n');
    }
    s
}
