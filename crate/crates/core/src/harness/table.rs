use serde_json::{Map, Value};
use std::fmt::Write;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Empty,
    Int(i64),
    Uint(u64),
    Float(f64),
    Text(String),
}

impl Cell {
    pub fn opt_uint(x: Option<usize>) -> Cell {
        x.map_or(Cell::Empty, |v| Cell::Uint(v as u64))
    }

    pub fn opt_float(x: Option<f64>) -> Cell {
        x.map_or(Cell::Empty, Cell::Float)
    }

    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    fn csv(&self, out: &mut String) {
        match self {
            Cell::Empty => {}
            Cell::Int(v) => write!(out, "{v}").unwrap(),
            Cell::Uint(v) => write!(out, "{v}").unwrap(),
            Cell::Float(v) => out.push_str(&format_float(*v)),
            Cell::Text(s) => out.push_str(s),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Empty => Value::Null,
            Cell::Int(v) => Value::from(*v),
            Cell::Uint(v) => Value::from(*v),
            Cell::Float(v) if v.is_finite() => Value::from(*v),
            Cell::Float(v) => Value::from(v.to_string()),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

/// 17 significant digits in scientific notation; round-trips every f64.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// A rectangular result table that renders as CSV or as a JSON array of
/// row objects.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: vec![],
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, c) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                c.csv(&mut out);
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let m: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(k, c)| (k.to_string(), c.json()))
                    .collect();
                Value::Object(m)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&Value::Array(rows)).expect("serializable");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json_render() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![Cell::Uint(1), Cell::Float(0.5), Cell::Empty]);
        t.push(vec![Cell::text("x"), Cell::Float(-2.0), Cell::Int(-3)]);
        assert_eq!(
            t.to_csv(),
            "a,b,c\n1,5.0000000000000000e-1,\nx,-2.0000000000000000e0,-3\n"
        );
        let j: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(j[0]["b"], 0.5);
        assert!(j[0]["c"].is_null());
        assert_eq!(j[1]["a"], "x");
    }

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 2.0_f64.sqrt(), 1e-300, 123456789.123456789] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
    }
}
