//! The JSON result record and CSV plot data.

use std::fmt::Write as _;
use std::path::Path;

use goe_charpoly::estimators::McEstimate;
use goe_charpoly::LogComplex;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub omega_f: Vec<f64>,
    pub omega_b: Vec<f64>,
    pub extra: Map<String, Value>,
}

/// A value in log-polar form, with the linear form when it is finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    /// `None` for an exact zero.
    pub log_mag: Option<f64>,
    pub phase: f64,
    pub linear_re: Option<f64>,
    pub linear_im: Option<f64>,
}

impl From<LogComplex> for Estimate {
    fn from(v: LogComplex) -> Self {
        let z = v.to_complex();
        let ok = z.re.is_finite() && z.im.is_finite();
        Self {
            log_mag: (!v.is_zero()).then_some(v.log_mag()),
            phase: v.phase(),
            linear_re: ok.then_some(z.re),
            linear_im: ok.then_some(z.im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stderr {
    pub re: Option<f64>,
    pub im: Option<f64>,
}

impl From<&McEstimate> for Stderr {
    fn from(m: &McEstimate) -> Self {
        let (re, im) = m.stderr_linear();
        Self {
            re: re.is_finite().then_some(re),
            im: im.is_finite().then_some(im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub tolerance: f64,
}

impl Verdict {
    /// Pass when `measured <= tolerance`.
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            pass: measured <= tolerance,
            measured,
            tolerance,
        }
    }

    /// Pass when `measured >= tolerance`.
    pub fn at_least(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            pass: measured >= tolerance,
            measured,
            tolerance,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Companions {
    pub closed_form: Map<String, Value>,
    pub oracle: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub quantity: String,
    pub params: Params,
    pub estimate: Option<Estimate>,
    pub stderr: Option<Stderr>,
    pub n_samples: Option<u64>,
    pub seed: Option<u64>,
    pub companions: Companions,
    pub verdicts: Vec<Verdict>,
    pub version: String,
    /// Seconds since the Unix epoch; the only field that varies between reruns.
    pub timestamp: u64,
}

impl ResultRecord {
    pub fn new(quantity: impl Into<String>, params: Params) -> Self {
        Self {
            quantity: quantity.into(),
            params,
            estimate: None,
            stderr: None,
            n_samples: None,
            seed: None,
            companions: Companions::default(),
            verdicts: Vec::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn with_mc(mut self, m: &McEstimate) -> Self {
        self.estimate = Some(m.value().into());
        self.stderr = Some(m.into());
        self.n_samples = Some(m.n_samples);
        self.seed = Some(m.seed);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

/// Converts a serializable value into a JSON object map.
pub fn to_map<T: Serialize>(v: &T) -> Map<String, Value> {
    match serde_json::to_value(v) {
        Ok(Value::Object(m)) => m,
        Ok(other) => Map::from_iter([("value".to_string(), other)]),
        Err(_) => Map::new(),
    }
}

/// Named columns sharing one row count.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<(String, Vec<f64>)>,
}

impl Table {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn column(mut self, name: &str, values: Vec<f64>) -> Self {
        self.columns.push((name.to_string(), values));
        self
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.1.len())
    }

    /// Comma-separated, header row, LF endings, 17 significant digits.
    pub fn to_csv(&self) -> Result<String, String> {
        let rows = self.rows();
        if let Some((name, c)) = self.columns.iter().find(|c| c.1.len() != rows) {
            return Err(format!("column {name} has {} rows, expected {rows}", c.len()));
        }
        let mut s = String::new();
        let header: Vec<&str> = self.columns.iter().map(|c| c.0.as_str()).collect();
        s.push_str(&header.join(","));
        s.push('\n');
        for r in 0..rows {
            for (k, (_, c)) in self.columns.iter().enumerate() {
                if k > 0 {
                    s.push(',');
                }
                let _ = write!(s, "{}", fmt17(c[r]));
            }
            s.push('\n');
        }
        Ok(s)
    }
}

pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// Output of one command: the record plus named CSV tables.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub record: ResultRecord,
    pub tables: Vec<(String, Table)>,
}

impl Artifacts {
    pub fn record(record: ResultRecord) -> Self {
        Self {
            record,
            tables: Vec::new(),
        }
    }

    pub fn table(mut self, name: &str, t: Table) -> Self {
        self.tables.push((name.to_string(), t));
        self
    }

    /// With a prefix, writes `prefix.json` and one CSV per table (`prefix.csv`
    /// for a single table, `prefix_<name>.csv` otherwise). Without one,
    /// prints the JSON to stdout.
    pub fn write(&self, prefix: Option<&Path>) -> Result<(), String> {
        let json = serde_json::to_string_pretty(&self.record).map_err(|e| e.to_string())? + "\n";
        let Some(prefix) = prefix else {
            print!("{json}");
            return Ok(());
        };
        if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        }
        let with_ext = |suffix: &str, ext: &str| {
            let mut s = prefix.as_os_str().to_owned();
            s.push(suffix);
            s.push(ext);
            std::path::PathBuf::from(s)
        };
        let path = with_ext("", ".json");
        std::fs::write(&path, json).map_err(|e| format!("{}: {e}", path.display()))?;
        for (name, t) in &self.tables {
            let path = if self.tables.len() == 1 { with_ext("", ".csv") } else { with_ext(&format!("_{name}"), ".csv") };
            std::fs::write(&path, t.to_csv()?).map_err(|e| format!("{}: {e}", path.display()))?;
        }
        Ok(())
    }
}
