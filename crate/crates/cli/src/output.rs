//! Tabular results and their CSV, JSON and SVG renderings.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// 17 significant digits; non-finite values spelled `inf`, `-inf`, `nan`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(x) => json!(fmt_num(*x)),
            Cell::Int(n) => json!(n),
            Cell::Text(s) => json!(s),
        }
    }

    fn num(&self) -> Option<f64> {
        match self {
            Cell::Num(x) if x.is_finite() => Some(*x),
            _ => None,
        }
    }
}

/// SVG description: axis labels and one `(x column, y column)` pair per polyline.
#[derive(Debug, Clone)]
pub struct Plot {
    pub x: &'static str,
    pub y: &'static str,
    pub series: Vec<(&'static str, &'static str)>,
}

#[derive(Debug, Clone)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub plot: Option<Plot>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Table {
            headers: headers.to_vec(),
            rows: Vec::new(),
            plot: None,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| *h == name)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    pub fn to_json(&self, meta: Value) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut rec = Map::new();
                for (h, c) in self.headers.iter().zip(row) {
                    rec.insert((*h).to_string(), c.json());
                }
                Value::Object(rec)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&json!({ "meta": meta, "rows": rows }))
            .expect("json values always serialize");
        s.push('\n');
        s
    }

    /// 800×600 SVG with one polyline per series, or `None` if the table has
    /// no plot description.
    pub fn to_svg(&self) -> Option<String> {
        let plot = self.plot.as_ref()?;
        let mut curves: Vec<(&str, Vec<(f64, f64)>)> = Vec::new();
        for &(xname, yname) in &plot.series {
            let (xi, yi) = (self.column(xname)?, self.column(yname)?);
            let pts = self
                .rows
                .iter()
                .filter_map(|r| Some((r[xi].num()?, r[yi].num()?)))
                .collect();
            curves.push((yname, pts));
        }
        let all = curves.iter().flat_map(|c| c.1.iter());
        let (mut x0, mut x1, mut y0, mut y1) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for &(x, y) in all {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        let pad = |a: f64, b: f64| {
            let w = if b > a { b - a } else { 1.0 };
            (a - 0.05 * w, b + 0.05 * w)
        };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="600" viewBox="{} {} {} {}" preserveAspectRatio="none">"#,
            fmt_num(x0),
            fmt_num(-y1),
            fmt_num(x1 - x0),
            fmt_num(y1 - y0)
        );
        let _ = writeln!(
            s,
            r#"<g class="axes" stroke="gray" fill="none" vector-effect="non-scaling-stroke">"#
        );
        if y0 <= 0.0 && 0.0 <= y1 {
            let _ = writeln!(
                s,
                r#"<line class="axis x-axis" x1="{}" y1="0" x2="{}" y2="0" vector-effect="non-scaling-stroke"/>"#,
                fmt_num(x0),
                fmt_num(x1)
            );
        }
        if x0 <= 0.0 && 0.0 <= x1 {
            let _ = writeln!(
                s,
                r#"<line class="axis y-axis" x1="0" y1="{}" x2="0" y2="{}" vector-effect="non-scaling-stroke"/>"#,
                fmt_num(-y1),
                fmt_num(-y0)
            );
        }
        let _ = writeln!(s, "</g>");
        let _ = writeln!(
            s,
            r#"<text class="label" x="{}" y="{}" font-size="{}">{} vs {}</text>"#,
            fmt_num(x0),
            fmt_num(-y1 + 0.04 * (y1 - y0)),
            fmt_num(0.03 * (y1 - y0)),
            plot.y,
            plot.x
        );
        for (name, pts) in &curves {
            let coords: Vec<String> = pts
                .iter()
                .map(|(x, y)| format!("{},{}", fmt_num(*x), fmt_num(-*y)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline class="curve {name}" fill="none" stroke="black" vector-effect="non-scaling-stroke" points="{}"/>"#,
                coords.join(" ")
            );
        }
        s.push_str("</svg>\n");
        Some(s)
    }
}
