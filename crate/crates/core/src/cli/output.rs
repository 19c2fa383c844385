//! CSV result rows and the JSON run summary.
//!
//! CSV columns, in order: `experiment, point_index, coords, scale_index,
//! radius, quantity, lo, hi, meta`. Coordinates are space separated inside one
//! field; every float is written as `{:.16e}` (17 significant digits); absent
//! values are empty fields.

use std::io::Write;

use serde::Serialize;

use crate::geometry::Point;

pub const CSV_HEADER: [&str; 9] = [
    "experiment",
    "point_index",
    "coords",
    "scale_index",
    "radius",
    "quantity",
    "lo",
    "hi",
    "meta",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub point_index: Option<usize>,
    pub coords: Option<Vec<f64>>,
    pub scale_index: Option<usize>,
    pub radius: Option<f64>,
    pub quantity: String,
    pub lo: f64,
    pub hi: f64,
    pub meta: String,
}

impl ResultRow {
    pub fn new(experiment: &str, quantity: &str, lo: f64, hi: f64) -> Self {
        ResultRow {
            experiment: experiment.into(),
            point_index: None,
            coords: None,
            scale_index: None,
            radius: None,
            quantity: quantity.into(),
            lo,
            hi,
            meta: String::new(),
        }
    }

    pub fn at_point(mut self, index: usize, p: &Point) -> Self {
        self.point_index = Some(index);
        self.coords = Some(p.as_slice().to_vec());
        self
    }

    pub fn at_scale(mut self, index: usize, radius: Option<f64>) -> Self {
        self.scale_index = Some(index);
        self.radius = radius;
        self
    }

    pub fn meta(mut self, meta: impl Into<String>) -> Self {
        self.meta = meta.into();
        self
    }

    fn fields(&self) -> [String; 9] {
        let opt = |v: Option<usize>| v.map(|i| i.to_string()).unwrap_or_default();
        [
            self.experiment.clone(),
            opt(self.point_index),
            self.coords
                .as_ref()
                .map(|c| c.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(" "))
                .unwrap_or_default(),
            opt(self.scale_index),
            self.radius.map(fmt_f64).unwrap_or_default(),
            self.quantity.clone(),
            fmt_f64(self.lo),
            fmt_f64(self.hi),
            self.meta.clone(),
        ]
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

/// JSON summary written next to the CSV.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub experiment: String,
    pub command: String,
    pub seed: u64,
    pub measure: Option<String>,
    /// Named invariant checks performed during the run.
    pub invariants: Vec<(String, bool)>,
    pub details: serde_json::Value,
}

impl Summary {
    pub fn all_hold(&self) -> bool {
        self.invariants.iter().all(|c| c.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_are_quoted_and_precise() {
        let p = Point::new(vec![0.1, 0.25]).unwrap();
        let rows = vec![ResultRow::new("e,1", "ratio", 1.0 / 3.0, 0.5)
            .at_point(0, &p)
            .at_scale(2, Some(0.125))
            .meta("net \"min\"")];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let line = text.lines().nth(1).unwrap();
        assert!(line.starts_with("\"e,1\",0,"));
        assert!(line.contains("3.3333333333333331e-1"));
        assert!(line.ends_with("\"net \"\"min\"\"\""));
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let rec = rdr.records().next().unwrap().unwrap();
        let lo: f64 = rec[6].parse().unwrap();
        assert_eq!(lo, 1.0 / 3.0);
    }
}
