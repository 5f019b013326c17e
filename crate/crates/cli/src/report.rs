//! Report rows and their CSV, aligned-text and JSON renderings.

use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Table,
    Json,
}

/// One computed quantity, optionally compared with a published value.
#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub quantity: String,
    /// Value in SI units.
    pub value: f64,
    pub si_unit: String,
    /// Value in the display unit.
    pub display_value: f64,
    pub display_unit: String,
    /// Published value in the display unit.
    pub paper_value: Option<f64>,
    pub relative_deviation: Option<f64>,
    pub pass: Option<bool>,
}

impl ReportRow {
    /// A row whose display unit is `scale` times the SI unit.
    pub fn new(quantity: &str, value: f64, si_unit: &str, scale: f64, display_unit: &str) -> Self {
        ReportRow {
            quantity: quantity.to_string(),
            value,
            si_unit: si_unit.to_string(),
            display_value: value * scale,
            display_unit: display_unit.to_string(),
            paper_value: None,
            relative_deviation: None,
            pass: None,
        }
    }

    pub fn plain(quantity: &str, value: f64) -> Self {
        Self::new(quantity, value, "1", 1.0, "1")
    }

    pub fn compare(mut self, published: f64, pass: bool) -> Self {
        self.paper_value = Some(published);
        self.relative_deviation = Some((self.display_value - published) / published);
        self.pass = Some(pass);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Num(f64),
    Int(i64),
}

impl Cell {
    fn exact(&self) -> String {
        match self {
            Cell::Text(t) => t.clone(),
            Cell::Num(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
        }
    }

    fn short(&self) -> String {
        match self {
            Cell::Text(t) => t.clone(),
            Cell::Num(v) => short(*v),
            Cell::Int(v) => v.to_string(),
        }
    }
}

/// Six significant digits, scientific outside [10⁻³, 10⁶).
pub fn short(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 {
        "0".into()
    } else if (1e-3..1e6).contains(&a) {
        let digits = (5 - a.log10().floor() as i32).max(0) as usize;
        format!("{v:.digits$}")
    } else {
        format!("{v:.5e}")
    }
}

/// Rendered output of one command.
pub enum Report {
    Rows(Vec<ReportRow>),
    Grid {
        headers: Vec<String>,
        rows: Vec<Vec<Cell>>,
    },
    /// A summary for text formats and a full document for JSON.
    Document { summary: Vec<ReportRow>, json: Value },
}

const ROW_HEADERS: [&str; 8] = [
    "quantity",
    "value",
    "si_unit",
    "display_value",
    "display_unit",
    "paper_value",
    "relative_deviation",
    "pass",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

fn status(p: Option<bool>) -> &'static str {
    match p {
        Some(true) => "PASS",
        Some(false) => "FAIL",
        None => "",
    }
}

fn write_csv(out: &mut dyn Write, headers: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(headers)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_aligned(out: &mut dyn Write, headers: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    writeln!(out, "{}", line(headers))?;
    writeln!(out, "{}", widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "))?;
    for r in rows {
        writeln!(out, "{}", line(r))?;
    }
    Ok(())
}

fn rows_csv(rows: &[ReportRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            vec![
                r.quantity.clone(),
                format!("{:?}", r.value),
                r.si_unit.clone(),
                format!("{:?}", r.display_value),
                r.display_unit.clone(),
                opt(r.paper_value),
                opt(r.relative_deviation),
                status(r.pass).to_string(),
            ]
        })
        .collect()
}

fn rows_table(rows: &[ReportRow]) -> (Vec<String>, Vec<Vec<String>>) {
    let headers = ["quantity", "value", "unit", "published", "deviation", "status"].map(String::from).to_vec();
    let body = rows
        .iter()
        .map(|r| {
            vec![
                r.quantity.clone(),
                short(r.display_value),
                r.display_unit.clone(),
                r.paper_value.map(short).unwrap_or_default(),
                r.relative_deviation.map(|d| format!("{:+.2}%", 100.0 * d)).unwrap_or_default(),
                status(r.pass).to_string(),
            ]
        })
        .collect();
    (headers, body)
}

impl Report {
    pub fn render(&self, format: Format, out: &mut dyn Write) -> Result<()> {
        match (self, format) {
            (Report::Rows(rows) | Report::Document { summary: rows, .. }, Format::Csv) => {
                write_csv(out, &ROW_HEADERS.map(String::from), &rows_csv(rows))
            }
            (Report::Rows(rows) | Report::Document { summary: rows, .. }, Format::Table) => {
                let (h, b) = rows_table(rows);
                write_aligned(out, &h, &b)
            }
            (Report::Rows(rows), Format::Json) => json(out, &serde_json::to_value(rows)?),
            (Report::Document { json: v, .. }, Format::Json) => json(out, v),
            (Report::Grid { headers, rows }, Format::Csv) => {
                write_csv(out, headers, &rows.iter().map(|r| r.iter().map(|c| c.exact()).collect()).collect::<Vec<_>>())
            }
            (Report::Grid { headers, rows }, Format::Table) => write_aligned(
                out,
                headers,
                &rows.iter().map(|r| r.iter().map(|c| c.short()).collect()).collect::<Vec<_>>(),
            ),
            (Report::Grid { headers, rows }, Format::Json) => {
                let records: Vec<Value> = rows
                    .iter()
                    .map(|r| {
                        Value::Object(
                            headers
                                .iter()
                                .zip(r)
                                .map(|(h, c)| {
                                    let v = match c {
                                        Cell::Text(t) => serde_json::json!(t),
                                        Cell::Num(x) => serde_json::json!(x),
                                        Cell::Int(i) => serde_json::json!(i),
                                    };
                                    (h.clone(), v)
                                })
                                .collect(),
                        )
                    })
                    .collect();
                json(out, &Value::Array(records))
            }
        }
    }

    /// True unless some compared row failed.
    pub fn all_pass(&self) -> bool {
        match self {
            Report::Rows(rows) | Report::Document { summary: rows, .. } => rows.iter().all(|r| r.pass != Some(false)),
            Report::Grid { .. } => true,
        }
    }
}

fn json(out: &mut dyn Write, v: &Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_keeps_six_digits() {
        assert_eq!(short(0.274215), "0.274215");
        assert_eq!(short(135.6789), "135.679");
        assert_eq!(short(6.35e-4), "6.35000e-4");
        assert_eq!(short(0.0), "0");
    }

    #[test]
    fn deviation_present_iff_paper_value() {
        let r = ReportRow::plain("x", 2.0);
        assert!(r.paper_value.is_none() && r.relative_deviation.is_none());
        let r = r.compare(4.0, false);
        assert_eq!(r.relative_deviation, Some(-0.5));
    }

    #[test]
    fn csv_values_round_trip() {
        let v = 0.1 + 0.2;
        let report = Report::Grid {
            headers: vec!["v".into()],
            rows: vec![vec![Cell::Num(v)]],
        };
        let mut buf = Vec::new();
        report.render(Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let parsed: f64 = text.lines().nth(1).unwrap().parse().unwrap();
        assert_eq!(parsed, v);
    }
}
