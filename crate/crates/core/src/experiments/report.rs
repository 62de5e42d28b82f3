use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Result;
use crate::frame::LpFrame;

/// Serializes non-finite numbers as the strings `inf`, `-inf`, `nan`.
pub mod tagged_f64 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Tag(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Tag(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("bad number tag `{other}`"))),
            },
        }
    }
}

/// One numeric row of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub index: usize,
    pub quantity: String,
    #[serde(with = "tagged_f64")]
    pub value: f64,
    /// Short tag naming the formula that produced the value.
    pub formula: String,
}

/// A named pass/fail decision with its evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// A plotted curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

/// Frame parameters as reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameSummary {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub h: u32,
    pub profile: crate::frame::Profile,
}

impl From<&LpFrame> for FrameSummary {
    fn from(f: &LpFrame) -> Self {
        Self {
            r: f.psi().inner(),
            big_r: f.psi().outer(),
            h: f.h(),
            profile: f.psi().profile(),
        }
    }
}

/// Grids, frame and seeds behind a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub dim: usize,
    pub points: Vec<usize>,
    pub frame: FrameSummary,
    pub seeds: Vec<u64>,
    pub version: String,
}

impl Environment {
    pub fn new(dim: usize, points: Vec<usize>, frame: &LpFrame, seeds: Vec<u64>) -> Self {
        Self {
            dim,
            points,
            frame: frame.into(),
            seeds,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// Output of every experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub parameters: serde_json::Value,
    pub rows: Vec<ReportRow>,
    pub verdicts: Vec<Verdict>,
    pub series: Vec<Series>,
    pub environment: Environment,
    /// The resolved run configuration, when run from one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

impl ExperimentReport {
    pub fn new(name: &str, parameters: serde_json::Value, environment: Environment) -> Self {
        Self {
            name: name.to_string(),
            parameters,
            rows: Vec::new(),
            verdicts: Vec::new(),
            series: Vec::new(),
            environment,
            config: None,
        }
    }

    pub fn row(&mut self, quantity: impl Into<String>, value: f64, formula: &str) {
        let index = self.rows.len();
        self.rows.push(ReportRow {
            index,
            quantity: quantity.into(),
            value,
            formula: formula.to_string(),
        });
    }

    pub fn verdict(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn value(&self, quantity: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.quantity == quantity).map(|r| r.value)
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn first_failure(&self) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| !v.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// `index,quantity,value,formula`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,quantity,value,formula\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{}", r.index, csv_field(&r.quantity), r.value, csv_field(&r.formula));
        }
        out
    }

    /// Gnuplot blocks, one per series, separated by two blank lines.
    pub fn to_dat(&self) -> String {
        let mut out = String::new();
        for s in &self.series {
            let _ = writeln!(out, "# {}\n# {} {}", s.name, s.x_label, s.y_label);
            for (x, y) in &s.points {
                let _ = writeln!(out, "{x} {y}");
            }
            out.push_str("\n\n");
        }
        out
    }

    pub fn to_svg(&self) -> String {
        super::plot::line_chart(&self.name, &self.series)
    }

    /// Writes whichever outputs have a path.
    pub fn write_outputs(&self, out: &super::OutputPaths) -> Result<()> {
        let put = |p: &Option<std::path::PathBuf>, body: String| -> Result<()> {
            if let Some(p) = p {
                write_file(p, &body)?;
            }
            Ok(())
        };
        put(&out.report, self.to_json()?)?;
        put(&out.csv, self.to_csv())?;
        put(&out.dat, self.to_dat())?;
        put(&out.svg, self.to_svg())
    }
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, body)?;
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
