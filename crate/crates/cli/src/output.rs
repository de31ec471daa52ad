use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const BUILD_ID: &str = env!("BENTLAB_BUILD_ID");

/// Round-trip float formatting: 17 significant digits, '.' decimal.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV body with a header row and a trailing metadata comment.
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = header.join(",");
        buf.push('\n');
        Csv { buf }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn finish(mut self, seed: Option<u64>) -> String {
        let seed = seed.map_or_else(|| "none".to_owned(), |s| s.to_string());
        let _ = writeln!(self.buf, "# bentlab {VERSION} seed={seed}");
        self.buf
    }
}

/// JSON envelope fields appended to every machine-readable result.
#[derive(Serialize)]
pub struct RunMeta {
    pub command: &'static str,
    pub version: &'static str,
    pub build: &'static str,
    pub seed: Option<u64>,
    pub wall_time_s: f64,
}

#[derive(Serialize)]
pub struct Envelope<T: Serialize> {
    #[serde(flatten)]
    pub result: T,
    pub meta: RunMeta,
}

pub fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes to `path`, or to standard output when no path is given.
pub fn emit(path: Option<&Path>, body: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes()).context("writing to standard output")?;
            out.flush().context("flushing standard output")
        }
    }
}

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}
