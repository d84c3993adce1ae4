//! CSV/JSON emission, report parsing and atomic file output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use deconv_core::risk::RiskCell;
use deconv_core::spectral::FrequencyGrid;
use serde::Serialize;

use crate::error::CliError;

pub const HASH_KEY: &str = "config_sha256";
pub const REPORT_HEADER: &str = "n,m,mean,se,replicates,alpha,delta,mask_fraction";
pub const SPECTRUM_HEADER: &str = "t,re,im,mask";
pub const BIAS_HEADER: &str = "alpha,lhs,rho_sq,rate,ratio";

/// Shortest decimal that parses back to the same `f64`.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn hash_line(hash: &str) -> String {
    format!("# {HASH_KEY}={hash}\n")
}

pub fn report_csv(hash: &str, extra: &str, cells: &[RiskCell]) -> String {
    let mut out = hash_line(hash);
    if !extra.is_empty() {
        let _ = writeln!(out, "# {extra}");
    }
    out.push_str(REPORT_HEADER);
    out.push('\n');
    for c in cells {
        let m = c.m.map_or_else(|| "known".to_string(), |m| m.to_string());
        let _ = writeln!(
            out,
            "{},{m},{},{},{},{},{},{}",
            c.n,
            num(c.mean),
            num(c.se),
            c.replicates,
            num(c.alpha),
            num(c.delta),
            num(c.mask_fraction)
        );
    }
    out
}

/// Data lines of a CSV: `(comment lines, header, rows)`.
pub fn split_csv(text: &str) -> Result<(Vec<&str>, &str, Vec<Vec<&str>>), CliError> {
    let mut comments = Vec::new();
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = loop {
        match lines.next() {
            Some(l) if l.starts_with('#') => comments.push(l),
            Some(l) => break l.trim(),
            None => return Err(CliError::Data("report has no header".into())),
        }
    };
    let width = header.split(',').count();
    let rows: Vec<Vec<&str>> = lines.filter(|l| !l.starts_with('#')).map(|l| l.split(',').map(str::trim).collect()).collect();
    if let Some(bad) = rows.iter().position(|r| r.len() != width) {
        return Err(CliError::Data(format!("row {} has the wrong number of fields", bad + 1)));
    }
    Ok((comments, header, rows))
}

pub fn embedded_hash(comments: &[&str]) -> Option<String> {
    comments.iter().find_map(|c| c.trim_start_matches('#').trim().strip_prefix(HASH_KEY)?.strip_prefix('=').map(str::to_string))
}

fn field<T: std::str::FromStr>(v: &str, name: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| CliError::Data(format!("bad {name} `{v}`")))
}

/// Inverse of [`report_csv`].
pub fn parse_report(text: &str) -> Result<(Option<String>, Vec<RiskCell>), CliError> {
    let (comments, header, rows) = split_csv(text)?;
    if header != REPORT_HEADER {
        return Err(CliError::Data(format!("not a risk report header: `{header}`")));
    }
    let cells = rows
        .iter()
        .map(|r| {
            Ok(RiskCell {
                n: field(r[0], "n")?,
                m: if r[1] == "known" { None } else { Some(field(r[1], "m")?) },
                mean: field(r[2], "mean")?,
                se: field(r[3], "se")?,
                replicates: field(r[4], "replicates")?,
                alpha: field(r[5], "alpha")?,
                delta: field(r[6], "delta")?,
                mask_fraction: field(r[7], "mask_fraction")?,
            })
        })
        .collect::<Result<_, CliError>>()?;
    Ok((embedded_hash(&comments), cells))
}

#[derive(Debug, Clone, Serialize)]
pub struct GridInfo {
    pub t_max: f64,
    pub n_points: usize,
    pub dt: f64,
}

impl From<FrequencyGrid> for GridInfo {
    fn from(g: FrequencyGrid) -> Self {
        Self { t_max: g.t_max(), n_points: g.n_points(), dt: g.dt() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config_sha256: String,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub seed: Option<u64>,
    pub grid: Option<GridInfo>,
    pub threads: usize,
    pub outputs: Vec<String>,
}

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Files staged in memory and written together once everything succeeded.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(String, String)>,
}

impl Outputs {
    pub fn add(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    pub fn names(&self) -> Vec<String> {
        self.files.iter().map(|(n, _)| n.clone()).collect()
    }

    /// Writes each file through a temporary name and a rename.
    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (name, contents) in self.files {
            let path = dir.join(&name);
            let tmp = dir.join(format!(".{name}.partial"));
            fs::write(&tmp, contents)?;
            fs::rename(&tmp, &path)?;
            written.push(path);
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(n: usize, m: Option<usize>, mean: f64) -> RiskCell {
        RiskCell { n, m, mean, se: mean / 7.0, replicates: 3, alpha: 0.1 / 3.0, delta: 1e-300, mask_fraction: 2.0 / 3.0 }
    }

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 123456789.123, f64::MIN_POSITIVE, -0.0] {
            assert_eq!(num(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn report_round_trip() {
        let cells = vec![cell(256, None, 0.123456789), cell(512, Some(100), 1e-17), cell(1024, Some(31623), std::f64::consts::PI)];
        let text = report_csv("abc", "quantity=hs_risk", &cells);
        let (hash, back) = parse_report(&text).unwrap();
        assert_eq!(hash.as_deref(), Some("abc"));
        assert_eq!(back, cells);
    }

    #[test]
    fn malformed_reports() {
        assert!(parse_report("").is_err());
        assert!(parse_report("# only a comment\n").is_err());
        assert!(parse_report("a,b\n1,2\n").is_err());
        assert!(parse_report(&format!("{REPORT_HEADER}\n1,2\n")).is_err());
    }
}
