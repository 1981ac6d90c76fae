//! CSV ingestion of externally computed `(d, A_0, A_1)` records and their
//! tabulation against the predicted `A_1` distribution.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classification::theorem1_enumerate;
use crate::error::{Error, Result};
use crate::heuristics::{predicted_a1_distribution, to_f64};
use crate::shape::Shape;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyRecord {
    pub d: i64,
    pub a0: Shape,
    pub a1: Shape,
    /// Input line the record was read from, or 0 for synthetic records.
    #[serde(default)]
    pub line: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Anomaly {
    pub line: u64,
    pub d: i64,
    pub a0: Shape,
    pub a1: Shape,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Duplicate {
    pub d: i64,
    pub line: u64,
    pub first_line: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IngestReport {
    pub source: String,
    pub p: u64,
    pub records: Vec<SurveyRecord>,
    /// `A_1` outside the list of possible groups for its `A_0`.
    pub anomalies: Vec<Anomaly>,
    pub duplicates: Vec<Duplicate>,
    /// Records whose `A_0` is not cyclic; no list applies to them.
    pub unchecked: usize,
}

/// Reason `a1` cannot occur over a cyclic `a0`, if any.
pub fn check_record(p: u64, a0: &Shape, a1: &Shape) -> Result<Option<String>> {
    if a0.rank() > 1 {
        return Ok(None);
    }
    if a0.is_trivial() {
        return Ok((!a1.is_trivial()).then(|| "A_0 trivial but A_1 is not".to_string()));
    }
    let m = a0.exponents()[0];
    let n = a1.order_exponent();
    if n <= m {
        return Ok(Some(format!("|A_1| = {p}^{n} does not exceed |A_0| = {p}^{m}")));
    }
    let allowed = theorem1_enumerate(p, m, n)?;
    if allowed.iter().any(|e| &e.shape == a1) {
        Ok(None)
    } else {
        Ok(Some(format!("{a1} is not a possible A_1 over A_0 = Z/{p}^{m}")))
    }
}

fn split_fields(line: &str, number: u64) -> Result<Vec<String>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(line.as_bytes());
    let rec = rdr
        .records()
        .next()
        .transpose()
        .map_err(|e| Error::Parse {
            line: number,
            message: e.to_string(),
        })?
        .unwrap_or_default();
    Ok(rec.iter().map(str::to_string).collect())
}

/// Parses CSV text with header `d,a0,a1`; blank lines and `#` comments are skipped.
pub fn ingest_str(text: &str, source: &str, p: u64) -> Result<IngestReport> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i as u64 + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (header_line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header d,a0,a1".into(),
    })?;
    let header = split_fields(header, header_line)?;
    if header != ["d", "a0", "a1"] {
        return Err(Error::Parse {
            line: header_line,
            message: format!("header must be d,a0,a1, found {}", header.join(",")),
        });
    }
    let mut report = IngestReport {
        source: source.to_string(),
        p,
        records: Vec::new(),
        anomalies: Vec::new(),
        duplicates: Vec::new(),
        unchecked: 0,
    };
    let mut seen: HashMap<i64, u64> = HashMap::new();
    for (line, raw) in lines {
        let parse_err = |message: String| Error::Parse { line, message };
        let fields = split_fields(raw, line)?;
        let [d, a0, a1] = fields.as_slice() else {
            return Err(parse_err(format!("expected 3 fields, found {}", fields.len())));
        };
        let d: i64 = d.parse().map_err(|_| parse_err(format!("bad discriminant {d:?}")))?;
        let a0: Shape = a0.parse().map_err(|e| parse_err(format!("a0: {e}")))?;
        let a1: Shape = a1.parse().map_err(|e| parse_err(format!("a1: {e}")))?;
        if let Some(&first_line) = seen.get(&d) {
            report.duplicates.push(Duplicate { d, line, first_line });
            continue;
        }
        seen.insert(d, line);
        if a0.rank() > 1 {
            report.unchecked += 1;
        }
        if let Some(reason) = check_record(p, &a0, &a1)? {
            report.anomalies.push(Anomaly {
                line,
                d,
                a0: a0.clone(),
                a1: a1.clone(),
                reason,
            });
        }
        report.records.push(SurveyRecord { d, a0, a1, line });
    }
    Ok(report)
}

pub fn ingest_csv(path: &Path, p: u64) -> Result<IngestReport> {
    let text = std::fs::read_to_string(path)?;
    ingest_str(&text, &path.display().to_string(), p)
}

/// Inverse of [`ingest_str`] up to line numbers.
pub fn render_csv(records: &[SurveyRecord]) -> String {
    let mut out = String::from("d,a0,a1\n");
    for r in records {
        writeln!(out, "{},{},{}", r.d, r.a0, r.a1).unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub shape: Shape,
    pub label: String,
    pub r: u32,
    pub count: u64,
    pub empirical: f64,
    pub predicted: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tabulation {
    pub p: u64,
    pub m: u32,
    /// Records with `A_0 ≅ Z/p^m`.
    pub number: u64,
    /// Records with a different `A_0`.
    pub excluded: u64,
    /// Records beyond the tabulated orders or outside the possible list.
    pub unlisted: u64,
    pub rows: Vec<TableRow>,
    pub total_abs_deviation: f64,
    /// `Σ (O - E)^2 / E` over rows with `E > 0`; descriptive only.
    pub chi_square: f64,
    pub note: Option<String>,
}

/// Empirical `A_1` fractions over records with `A_0 ≅ Z/p^m`, beside the
/// predicted distribution. Orders up to `p^{m + max_r}` are tabulated.
pub fn tabulate(records: &[SurveyRecord], p: u64, m: u32, max_r: u32) -> Result<Tabulation> {
    let a0 = Shape::cyclic(m);
    let dist = predicted_a1_distribution(p, m, max_r)?;
    let mut counts: BTreeMap<Shape, u64> = BTreeMap::new();
    let (mut number, mut excluded) = (0u64, 0u64);
    for r in records {
        if r.a0 != a0 {
            excluded += 1;
            continue;
        }
        number += 1;
        *counts.entry(r.a1.clone()).or_default() += 1;
    }
    let mut rows = Vec::new();
    let mut listed = 0u64;
    for e in &dist.entries {
        let count = counts.get(&e.shape).copied().unwrap_or(0);
        listed += count;
        let empirical = if number == 0 { 0.0 } else { count as f64 / number as f64 };
        let predicted = to_f64(&e.probability);
        rows.push(TableRow {
            shape: e.shape.clone(),
            label: e.shape.pretty(p),
            r: e.r,
            count,
            empirical,
            predicted,
            deviation: empirical - predicted,
        });
    }
    let total_abs_deviation = rows.iter().map(|r| r.deviation.abs()).sum();
    let chi_square = rows
        .iter()
        .filter(|r| r.predicted > 0.0)
        .map(|r| {
            let expected = r.predicted * number as f64;
            (r.count as f64 - expected).powi(2) / expected
        })
        .sum();
    Ok(Tabulation {
        p,
        m,
        number,
        excluded,
        unlisted: number - listed,
        rows,
        total_abs_deviation,
        chi_square: if number == 0 { 0.0 } else { chi_square },
        note: (number == 0).then(|| format!("no records with A_0 = Z/{p}^{m}")),
    })
}

impl Tabulation {
    /// Aligned text table, fractions to 4 decimal places.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "A_0 = Z/{}^{}: {} records ({} excluded, {} unlisted)",
            self.p, self.m, self.number, self.excluded, self.unlisted
        )
        .unwrap();
        if let Some(note) = &self.note {
            writeln!(out, "note: {note}").unwrap();
        }
        let w = self.rows.iter().map(|r| r.label.chars().count()).max().unwrap_or(5).max(5);
        writeln!(
            out,
            "{:<w$}  {:>3}  {:>8}  {:>9}  {:>9}  {:>9}",
            "A_1", "r", "count", "empirical", "predicted", "deviation"
        )
        .unwrap();
        for r in &self.rows {
            let pad = w + r.label.len() - r.label.chars().count();
            writeln!(
                out,
                "{:<pad$}  {:>3}  {:>8}  {:>9.4}  {:>9.4}  {:>+9.4}",
                r.label, r.r, r.count, r.empirical, r.predicted, r.deviation
            )
            .unwrap();
        }
        writeln!(
            out,
            "total |deviation| {:.4}, chi-square {:.4}",
            self.total_abs_deviation, self.chi_square
        )
        .unwrap();
        out
    }
}

/// Records whose `A_1` frequencies match `weights` exactly, `A_0 = Z/p^m`,
/// with discriminants `-start, -start - 1, ...`.
pub fn synthetic_records(m: u32, weights: &[(Shape, u64)], start: i64) -> Vec<SurveyRecord> {
    let mut out = Vec::new();
    let mut d = -start;
    for (shape, n) in weights {
        for _ in 0..*n {
            out.push(SurveyRecord {
                d,
                a0: Shape::cyclic(m),
                a1: shape.clone(),
                line: 0,
            });
            d -= 1;
        }
    }
    out
}
