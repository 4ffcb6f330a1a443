//! Experiment pipelines comparing exact counts with the asymptotic
//! regimes, and their CSV output.

use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{count_auto, ExactCount};
use crate::exec::Exec;
use crate::painleve::PainleveSolution;
use crate::regimes::{regime_dispatch, theorem1_logf, theorem2_logf};
use crate::regions::RegionSpec;
use crate::weight::Weight;

/// Nearest integer with ties to the even neighbour.
pub fn round_half_even(x: f64) -> i64 {
    x.round_ties_even() as i64
}

/// Floating-point rendering with 15 significant digits, trailing zeros
/// dropped.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.14e}");
        let (mant, e) = s.split_once('e').expect("exponent");
        let mant = if mant.contains('.') {
            mant.trim_end_matches('0').trim_end_matches('.')
        } else {
            mant
        };
        format!("{mant}e{e}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

/// Integer index as a function of `N`: a constant such as `3`, or a
/// multiple such as `0.7N` rounded half to even.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum IndexRule {
    Fixed(i64),
    Fraction(f64),
}

impl IndexRule {
    pub fn resolve(&self, n: u32) -> i64 {
        match *self {
            IndexRule::Fixed(k) => k,
            IndexRule::Fraction(f) => round_half_even(f * n as f64),
        }
    }
}

impl FromStr for IndexRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('{').trim_end_matches('}').trim();
        let bad = || Error::param(format!("cannot parse index rule {s:?}"));
        if let Some(f) = t.strip_suffix('N').or_else(|| t.strip_suffix('n')) {
            let f = f.trim().trim_end_matches('*').trim();
            let v = if f.is_empty() { 1.0 } else { f.parse::<f64>().map_err(|_| bad())? };
            if !v.is_finite() || v <= 0.0 {
                return Err(bad());
            }
            Ok(IndexRule::Fraction(v))
        } else {
            t.parse::<i64>().map(IndexRule::Fixed).map_err(|_| bad())
        }
    }
}

impl TryFrom<String> for IndexRule {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<IndexRule> for String {
    fn from(r: IndexRule) -> String {
        match r {
            IndexRule::Fixed(k) => k.to_string(),
            IndexRule::Fraction(f) => format!("{f}N"),
        }
    }
}

/// Rows that can be written as CSV.
pub trait CsvRow {
    fn header() -> &'static [&'static str];
    fn record(&self) -> Vec<String>;
}

pub fn write_csv<R: CsvRow, W: Write>(rows: &[R], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(R::header()).map_err(io)?;
    for r in rows {
        w.write_record(r.record()).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string<R: CsvRow>(rows: &[R]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Internal(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure3Panel {
    /// Almost-maximal corner, `epsilon = 1`.
    Left,
    /// Almost-maximal corner, `epsilon = 0`.
    Middle,
    /// Large corner, `epsilon = 1`.
    Right,
}

impl FromStr for Figure3Panel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Figure3Panel::Left),
            "middle" => Ok(Figure3Panel::Middle),
            "right" => Ok(Figure3Panel::Right),
            other => Err(Error::param(format!("unknown panel {other:?}"))),
        }
    }
}

impl Figure3Panel {
    pub fn epsilon(self) -> u8 {
        match self {
            Figure3Panel::Middle => 0,
            _ => 1,
        }
    }

    /// Default orders at desk scale.
    pub fn default_orders(self) -> Vec<u32> {
        match self {
            Figure3Panel::Right => vec![16, 24, 32, 40, 48],
            _ => (12..=40).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Figure3Row {
    #[serde(rename = "N")]
    pub n: u32,
    pub m: u32,
    /// Parameter `k` of the asymptotic statement; the region is `k + 1`.
    pub k: u32,
    pub epsilon: u8,
    pub exact_log_f: f64,
    pub predicted_log_f: f64,
    pub residual: f64,
    pub scaled_residual: f64,
}

impl CsvRow for Figure3Row {
    fn header() -> &'static [&'static str] {
        &["N", "m", "k", "epsilon", "exact_logF", "predicted_logF", "residual", "N_residual"]
    }
    fn record(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.m.to_string(),
            self.k.to_string(),
            self.epsilon.to_string(),
            fmt_sig(self.exact_log_f),
            fmt_sig(self.predicted_log_f),
            fmt_sig(self.residual),
            fmt_sig(self.scaled_residual),
        ]
    }
}

/// Exact minus predicted `log F_N^{m,k+1}` with `m = {0.7 N}` and
/// `a = 0.7845`; `k = 3` on the left and middle panels, `k = {0.25 N}`
/// on the right.
pub fn run_figure3(panel: Figure3Panel, orders: &[u32], a: Weight, exec: Exec) -> Result<Vec<Figure3Row>> {
    if orders.is_empty() {
        return Err(Error::param("empty N grid"));
    }
    let eps = panel.epsilon();
    let af = a.to_f64();
    let rows = exec.map(orders, |&n| -> Result<Figure3Row> {
        let m = round_half_even(0.7 * n as f64) as u32;
        let (k, est) = match panel {
            Figure3Panel::Right => {
                let k = round_half_even(0.25 * n as f64) as u32;
                (k, theorem2_logf(n, m, k, eps, af)?)
            }
            _ => (3, theorem1_logf(n, m, 3, eps, af)?),
        };
        let spec = RegionSpec::for_epsilon(n, m as i32, k as i32 + 1, eps)?;
        let exact = count_auto(spec, a, exec)?.log_value;
        let residual = exact - est.log_f;
        Ok(Figure3Row {
            n,
            m,
            k,
            epsilon: eps,
            exact_log_f: exact,
            predicted_log_f: est.log_f,
            residual,
            scaled_residual: n as f64 * residual,
        })
    });
    rows.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    #[serde(rename = "N")]
    pub orders: Vec<u32>,
    /// `None` sweeps every `m` in `1..=N`.
    #[serde(default)]
    pub m_rule: Option<IndexRule>,
    /// `None` sweeps every `k` in `1..=m+1`.
    #[serde(default)]
    pub k_rule: Option<IndexRule>,
    pub a: Weight,
    #[serde(default = "default_eps")]
    pub epsilon: Vec<u8>,
    /// Skip the exact count above this many cells.
    #[serde(default = "default_max_cells")]
    pub max_exact_cells: usize,
}

fn default_eps() -> Vec<u8> {
    vec![1]
}

fn default_max_cells() -> usize {
    2 * 64 * 65
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub n: u32,
    pub m: i64,
    pub k: i64,
    pub epsilon: u8,
    pub exact: Option<String>,
    pub exact_log_f: Option<f64>,
    pub regime: Option<String>,
    pub predicted_log_f: Option<f64>,
    pub residual: Option<f64>,
    pub ambiguous: bool,
    pub alternative_regime: Option<String>,
    pub alternative_log_f: Option<f64>,
    pub error: Option<String>,
}

impl CsvRow for SweepRow {
    fn header() -> &'static [&'static str] {
        &[
            "N",
            "m",
            "k",
            "epsilon",
            "exact",
            "exact_logF",
            "regime",
            "predicted_logF",
            "residual",
            "ambiguous",
            "alternative_regime",
            "alternative_logF",
            "error",
        ]
    }
    fn record(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.m.to_string(),
            self.k.to_string(),
            self.epsilon.to_string(),
            self.exact.clone().unwrap_or_default(),
            fmt_opt(self.exact_log_f),
            self.regime.clone().unwrap_or_default(),
            fmt_opt(self.predicted_log_f),
            fmt_opt(self.residual),
            self.ambiguous.to_string(),
            self.alternative_regime.clone().unwrap_or_default(),
            fmt_opt(self.alternative_log_f),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

fn sweep_point(n: u32, m: i64, k: i64, eps: u8, cfg: &SweepConfig, exec: Exec) -> SweepRow {
    let mut row = SweepRow {
        n,
        m,
        k,
        epsilon: eps,
        exact: None,
        exact_log_f: None,
        regime: None,
        predicted_log_f: None,
        residual: None,
        ambiguous: false,
        alternative_regime: None,
        alternative_log_f: None,
        error: None,
    };
    let mut errors = Vec::new();
    let spec = RegionSpec::for_epsilon(n, m as i32, k as i32, eps);
    let area = 2 * n as usize * (n as usize + 1);
    if area <= cfg.max_exact_cells {
        match spec.and_then(|s| count_auto(s, cfg.a, exec)) {
            Ok(ExactCount { value, log_value, .. }) => {
                row.exact = Some(format!("{}/{}", value.numer(), value.denom()));
                row.exact_log_f = Some(log_value);
            }
            Err(e) => errors.push(e.to_string()),
        }
    }
    if m >= 1 && k >= 1 {
        match regime_dispatch(n, m as u32, k as u32, eps, cfg.a.to_f64(), PainleveSolution::standard()) {
            Ok(d) => {
                row.regime = Some(d.primary.regime.label().into());
                row.predicted_log_f = Some(d.primary.log_f);
                row.ambiguous = d.ambiguous;
                if let Some(alt) = d.alternative {
                    row.alternative_regime = Some(alt.regime.label().into());
                    row.alternative_log_f = Some(alt.log_f);
                }
            }
            Err(e) => errors.push(e.to_string()),
        }
    }
    if let (Some(x), Some(p)) = (row.exact_log_f, row.predicted_log_f) {
        row.residual = Some(x - p);
    }
    if !errors.is_empty() {
        row.error = Some(errors.join("; "));
    }
    row
}

/// Exact counts against the dispatched asymptotic regime on a grid.
/// Failures at individual points are recorded in the row.
pub fn run_sweep(cfg: &SweepConfig, exec: Exec) -> Result<Vec<SweepRow>> {
    if cfg.orders.is_empty() || cfg.epsilon.is_empty() {
        return Err(Error::param("empty sweep grid"));
    }
    if let Some(e) = cfg.epsilon.iter().find(|&&e| e > 1) {
        return Err(Error::param(format!("epsilon {e} must be 0 or 1")));
    }
    let mut points = Vec::new();
    for &n in &cfg.orders {
        if n == 0 {
            return Err(Error::param("N must be positive"));
        }
        let ms: Vec<i64> = match cfg.m_rule {
            Some(r) => vec![r.resolve(n)],
            None => (1..=n as i64).collect(),
        };
        for &m in &ms {
            let ks: Vec<i64> = match cfg.k_rule {
                Some(r) => vec![r.resolve(n)],
                None => (1..=m + 1).collect(),
            };
            for &k in &ks {
                for &eps in &cfg.epsilon {
                    points.push((n, m, k, eps));
                }
            }
        }
    }
    // Points run in parallel; the counts inside each stay sequential.
    Ok(exec.map(&points, |&(n, m, k, eps)| sweep_point(n, m, k, eps, cfg, Exec::Sequential)))
}
