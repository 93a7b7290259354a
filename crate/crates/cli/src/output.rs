//! Float formatting, aligned tables and line-delimited JSON records.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Significant digits of every printed float.
pub const SIG_DIGITS: usize = 12;

/// `%g`-style rendering with [`SIG_DIGITS`] significant digits.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `x` rounded to [`SIG_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap()
}

pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                .collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(&mut out, &self.headers);
        for r in &self.rows {
            line(&mut out, r);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestValue {
    pub forest: String,
    pub value: f64,
}

/// One line of `--format records` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Record {
    /// Unlabeled maps sharing one abstract graph.
    Graph {
        graph: String,
        maps: usize,
        labeled: u64,
    },
    Tree {
        tree: String,
        vertices: usize,
        alpha: u64,
        plane: u64,
        simplex: String,
        identity: bool,
    },
    /// Forest-sum check of one map.
    Map {
        order: usize,
        key: String,
        map: String,
        method: String,
        feynman: f64,
        forest_sum: f64,
        abs_discrepancy: f64,
        rel_discrepancy: f64,
        forests: Vec<ForestValue>,
        pass: bool,
    },
    /// Summary of one perturbative order.
    Order {
        order: usize,
        method: String,
        maps: usize,
        worst_rel_discrepancy: f64,
        stochastic_total: f64,
        moment_reference: f64,
        moment_rel_discrepancy: f64,
        pass: bool,
    },
    Moment {
        monomial: Vec<usize>,
        value: f64,
        std_error: f64,
        n_effective: f64,
        oracle: Option<f64>,
        pass: Option<bool>,
    },
    Check {
        name: String,
        expected: String,
        got: String,
        pass: bool,
    },
}

impl Record {
    /// Rounds every float field to the printed precision.
    pub fn rounded(mut self) -> Self {
        let r = |x: &mut f64| *x = round_sig(*x);
        match &mut self {
            Record::Map {
                feynman,
                forest_sum,
                abs_discrepancy,
                rel_discrepancy,
                forests,
                ..
            } => {
                for x in [feynman, forest_sum, abs_discrepancy, rel_discrepancy] {
                    r(x);
                }
                forests.iter_mut().for_each(|f| r(&mut f.value));
            }
            Record::Order {
                worst_rel_discrepancy,
                stochastic_total,
                moment_reference,
                moment_rel_discrepancy,
                ..
            } => {
                for x in [worst_rel_discrepancy, stochastic_total, moment_reference, moment_rel_discrepancy] {
                    r(x);
                }
            }
            Record::Moment {
                value,
                std_error,
                n_effective,
                oracle,
                ..
            } => {
                for x in [value, std_error, n_effective] {
                    r(x);
                }
                if let Some(o) = oracle {
                    r(o);
                }
            }
            _ => {}
        }
        self
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(&self.clone().rounded()).expect("records serialize")
    }
}
