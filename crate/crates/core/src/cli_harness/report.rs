use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::inverse_analysis::{GapIndex, GapReport};

/// Column order of every table.
pub const COLUMNS: [&str; 17] = [
    "experiment",
    "model_hash",
    "n",
    "quantity",
    "a",
    "b",
    "u",
    "t",
    "tau",
    "lag",
    "order",
    "omega",
    "re",
    "im",
    "measured",
    "envelope",
    "constant",
];

/// One table row; unset fields are written as empty cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Row {
    pub experiment: String,
    pub model_hash: String,
    pub n: Option<usize>,
    pub quantity: String,
    pub a: Option<usize>,
    pub b: Option<usize>,
    pub u: Option<f64>,
    pub t: Option<i64>,
    pub tau: Option<i64>,
    pub lag: Option<i64>,
    pub order: Option<usize>,
    pub omega: Option<f64>,
    pub re: Option<f64>,
    pub im: Option<f64>,
    pub measured: Option<f64>,
    pub envelope: Option<f64>,
    pub constant: Option<f64>,
}

/// `{:.16e}`: 17 significant digits, round-trip exact.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn optf(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

impl Row {
    pub fn new(quantity: impl Into<String>) -> Self {
        Row {
            quantity: quantity.into(),
            ..Default::default()
        }
    }

    pub fn n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }
    pub fn pair(mut self, a: usize, b: usize) -> Self {
        self.a = Some(a);
        self.b = Some(b);
        self
    }
    pub fn u(mut self, u: f64) -> Self {
        self.u = Some(u);
        self
    }
    pub fn t(mut self, t: i64) -> Self {
        self.t = Some(t);
        self
    }
    pub fn lag(mut self, lag: i64) -> Self {
        self.lag = Some(lag);
        self
    }
    pub fn order(mut self, order: usize) -> Self {
        self.order = Some(order);
        self
    }
    pub fn complex(mut self, omega: f64, re: f64, im: f64) -> Self {
        self.omega = Some(omega);
        self.re = Some(re);
        self.im = Some(im);
        self
    }
    pub fn measured(mut self, m: f64) -> Self {
        self.measured = Some(m);
        self
    }
    pub fn envelope(mut self, e: f64) -> Self {
        self.envelope = Some(e);
        self
    }
    pub fn constant(mut self, c: f64) -> Self {
        self.constant = Some(c);
        self
    }

    pub fn record(&self) -> [String; 17] {
        [
            self.experiment.clone(),
            self.model_hash.clone(),
            opt(self.n),
            self.quantity.clone(),
            opt(self.a),
            opt(self.b),
            optf(self.u),
            opt(self.t),
            opt(self.tau),
            opt(self.lag),
            opt(self.order),
            optf(self.omega),
            optf(self.re),
            optf(self.im),
            optf(self.measured),
            optf(self.envelope),
            optf(self.constant),
        ]
    }

    fn with_index(mut self, idx: &GapIndex) -> Self {
        match *idx {
            GapIndex::Lag { lag } => self.lag = Some(lag),
            GapIndex::Pair { t, tau } => {
                self.t = Some(t);
                self.tau = Some(tau);
                self.lag = Some(t - tau);
            }
            GapIndex::Order { order } => self.order = Some(order),
            GapIndex::OrderLag { order, lag } => {
                self.order = Some(order);
                self.lag = Some(lag as i64);
            }
            GapIndex::Frequency { omega } => self.omega = Some(omega),
        }
        self
    }
}

/// Rows of a gap report; the alternative envelope, if any, follows under
/// `<label>_alt`.
pub fn gap_rows(g: &GapReport, template: &Row) -> Vec<Row> {
    let mut out = Vec::with_capacity(g.len());
    for i in 0..g.len() {
        let mut r = template.clone().with_index(&g.indices[i]);
        r.quantity = g.label.clone();
        out.push(r.measured(g.measured[i]).envelope(g.bound[i]).constant(g.constant_estimate));
    }
    if let (Some(alt), Some(c)) = (&g.alt_bound, g.alt_constant) {
        for i in 0..g.len() {
            let mut r = template.clone().with_index(&g.indices[i]);
            r.quantity = format!("{}_alt", g.label);
            out.push(r.measured(g.measured[i]).envelope(alt[i]).constant(c));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub pass: bool,
    pub measured: BTreeMap<String, f64>,
    pub threshold: String,
    pub detail: String,
}

impl Verdict {
    pub fn new(check: impl Into<String>, pass: bool, threshold: impl Into<String>) -> Self {
        Verdict {
            check: check.into(),
            pass,
            measured: BTreeMap::new(),
            threshold: threshold.into(),
            detail: String::new(),
        }
    }

    pub fn with(mut self, key: &str, v: f64) -> Self {
        self.measured.insert(key.into(), v);
        self
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Metadata {
    pub experiment: String,
    pub config_hash: String,
    pub model_hash: String,
    pub seed: u64,
    pub version: String,
    pub threads: usize,
    pub timestamp_unix: u64,
    pub notes: BTreeMap<String, String>,
    pub timings_s: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub metadata: Metadata,
    pub rows: Vec<Row>,
    pub verdicts: Vec<Verdict>,
    /// Numeric errors that were recorded as failed verdicts.
    pub numeric_failures: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        !self.verdicts.is_empty() && self.verdicts.iter().all(|v| v.pass)
    }

    pub fn push_rows(&mut self, rows: impl IntoIterator<Item = Row>) {
        let exp = self.metadata.experiment.clone();
        let hash = self.metadata.model_hash.clone();
        self.rows.extend(rows.into_iter().map(|mut r| {
            if r.experiment.is_empty() {
                r.experiment = exp.clone();
            }
            if r.model_hash.is_empty() {
                r.model_hash = hash.clone();
            }
            r
        }));
    }

    pub fn tables_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(vec![]);
        w.write_record(COLUMNS).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r.record()).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| std::io::Error::other(e.to_string()).into())
    }

    pub fn verdicts_json(&self) -> Result<Vec<u8>> {
        let mut v = serde_json::to_vec_pretty(&self.verdicts).map_err(std::io::Error::other)?;
        v.push(b'\n');
        Ok(v)
    }

    /// Writes `tables.csv`, `verdicts.json` and `metadata.json` into `dir`,
    /// each through a temporary file and a rename.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut meta = serde_json::to_vec_pretty(&self.metadata).map_err(std::io::Error::other)?;
        meta.push(b'\n');
        write_atomic(&dir.join("tables.csv"), &self.tables_csv()?)?;
        write_atomic(&dir.join("verdicts.json"), &self.verdicts_json()?)?;
        write_atomic(&dir.join("metadata.json"), &meta)?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> crate::error::Error {
    std::io::Error::other(e.to_string()).into()
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 123456.789, -2.5e-17] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_has_fixed_header() {
        let mut r = Report::default();
        r.metadata.experiment = "decay".into();
        r.metadata.model_hash = "abc".into();
        r.push_rows([Row::new("q").n(10).lag(2).measured(0.5)]);
        let text = String::from_utf8(r.tables_csv().unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), COLUMNS.join(","));
        assert_eq!(
            lines.next().unwrap(),
            "decay,abc,10,q,,,,,,2,,,,,5.0000000000000000e-1,,"
        );
    }
}
