//! Check records and their bit-stable JSON / CSV serialization.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::fmt17;

/// One residual compared against its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub suite: String,
    pub id: String,
    /// The identity this record verifies.
    pub anchor: String,
    #[serde(with = "float17")]
    pub residual: f64,
    #[serde(with = "float17")]
    pub tol: f64,
    pub pass: bool,
}

impl CheckRecord {
    /// `pass` iff the residual is finite and at most `tol`.
    pub fn new(suite: &str, id: impl Into<String>, anchor: &str, residual: f64, tol: f64) -> Self {
        Self {
            suite: suite.to_string(),
            id: id.into(),
            anchor: anchor.to_string(),
            residual,
            tol,
            pass: residual.is_finite() && residual <= tol,
        }
    }
}

/// Where a report was produced. Holds nothing that varies between two
/// identical runs on the same build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub crate_version: String,
    pub target_os: String,
    pub target_arch: String,
    pub profile: String,
    pub config: BTreeMap<String, String>,
}

impl Environment {
    pub fn capture(config: BTreeMap<String, String>) -> Self {
        Self {
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
            target_os: std::env::consts::OS.to_string(),
            target_arch: std::env::consts::ARCH.to_string(),
            profile: if cfg!(debug_assertions) { "debug" } else { "release" }.to_string(),
            config,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub records: Vec<CheckRecord>,
    pub environment: Environment,
    /// Measured but never serialized, so exports stay byte-identical.
    #[serde(skip)]
    pub wall_time: Option<Duration>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    Json,
    Csv,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ExportFormat::Json),
            "csv" => Ok(ExportFormat::Csv),
            _ => Err(Error::Config(format!("unknown format `{s}` (json or csv)"))),
        }
    }
}

pub const CSV_HEADER: [&str; 6] = ["suite", "id", "anchor", "residual", "tol", "pass"];

impl SuiteReport {
    pub fn new(suite: &str, mut records: Vec<CheckRecord>, environment: Environment) -> Self {
        records.sort_by(|a, b| a.id.cmp(&b.id));
        Self {
            suite: suite.to_string(),
            records,
            environment,
            wall_time: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.records.iter().fold(0.0, |m, r| m.max(r.residual))
    }

    /// Pretty JSON, keys sorted, floats at 17 significant digits.
    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        write_json_value(&serde_json::to_value(self)?, w)
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self> {
        Ok(serde_json::from_reader(r)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_json(&mut buf)?;
        Ok(String::from_utf8(buf).expect("JSON is UTF-8"))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_records_csv(&self.records, w)
    }

    pub fn export(&self, format: ExportFormat, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        match format {
            ExportFormat::Json => self.write_json(&mut w)?,
            ExportFormat::Csv => self.write_csv(&mut w)?,
        }
        w.flush()?;
        Ok(())
    }
}

pub fn write_records_csv<W: Write>(records: &[CheckRecord], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(CSV_HEADER)?;
    for r in records {
        wr.write_record([
            r.suite.as_str(),
            r.id.as_str(),
            r.anchor.as_str(),
            &fmt17(r.residual),
            &fmt17(r.tol),
            if r.pass { "true" } else { "false" },
        ])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_records_csv<R: Read>(r: R) -> Result<Vec<CheckRecord>> {
    let mut rd = csv::Reader::from_reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(String::from).collect();
    if header != CSV_HEADER {
        return Err(Error::Numerical(format!("unexpected CSV header {header:?}")));
    }
    rd.records()
        .map(|row| {
            let row = row?;
            let f = |i: usize| -> Result<f64> {
                row[i]
                    .parse()
                    .map_err(|_| Error::Numerical(format!("bad number `{}` in CSV", &row[i])))
            };
            Ok(CheckRecord {
                suite: row[0].to_string(),
                id: row[1].to_string(),
                anchor: row[2].to_string(),
                residual: f(3)?,
                tol: f(4)?,
                pass: &row[5] == "true",
            })
        })
        .collect()
}

/// `serde_json` formatter that prints every float with 17 significant
/// digits and otherwise behaves like the pretty printer.
struct Fixed17<'a>(serde_json::ser::PrettyFormatter<'a>);

macro_rules! forward {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(fn $name<W: ?Sized + Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> std::io::Result<()> {
            self.0.$name(w $(, $arg)*)
        })*
    };
}

impl serde_json::ser::Formatter for Fixed17<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> std::io::Result<()> {
        w.write_all(fmt17(v).as_bytes())
    }

    forward!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        begin_object_value(),
        end_object_value(),
    );
}

/// Writes any JSON value the way reports are written.
pub fn write_json_value<W: Write>(v: &serde_json::Value, mut w: W) -> Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(&mut w, Fixed17(serde_json::ser::PrettyFormatter::new()));
    v.serialize(&mut ser)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Finite floats as numbers, the rest as the strings `inf`, `-inf`, `NaN`.
mod float17 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&v.to_string())
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Num {
        F(f64),
        S(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Num::deserialize(d)? {
            Num::F(v) => Ok(v),
            Num::S(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SuiteReport {
        let recs = vec![
            CheckRecord::new("s", "b", "second", 1.0 / 3.0, 1e-8),
            CheckRecord::new("s", "a", "first", 2.5e-13, 1e-8),
            CheckRecord::new("s", "c", "third", f64::INFINITY, 1.0),
        ];
        SuiteReport::new("s", recs, Environment::capture(BTreeMap::new()))
    }

    #[test]
    fn records_sorted_and_judged() {
        let r = sample();
        let ids: Vec<&str> = r.records.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c"]);
        assert!(r.records[0].pass);
        assert!(!r.records[1].pass);
        assert!(!r.records[2].pass);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let r = sample();
        let text = r.to_json_string().unwrap();
        assert!(text.contains("3.3333333333333331e-1"));
        let back = SuiteReport::read_json(text.as_bytes()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json_string().unwrap(), text);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let r = sample();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("suite,id,anchor,residual,tol,pass\n"));
        assert_eq!(read_records_csv(buf.as_slice()).unwrap(), r.records);
    }
}
