//! Fixed-schema result tables and their CSV/JSON rendering.

use serde_json::{Map, Value};

use super::config::Format;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    /// Floats use the shortest round-trip scientific form (at most 17
    /// significant digits), so equal inputs give byte-identical files.
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) if v.is_finite() => format!("{v:e}"),
            Cell::Float(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map(Value::Number).unwrap_or(Value::Null),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Cell {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Cell {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Cell {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Cell {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Cell {
        Cell::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Cell {
        v.map(Into::into).unwrap_or(Cell::Empty)
    }
}

/// Rows share the column list; the last column is always `error`.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Table {
        let mut columns = columns.to_vec();
        columns.push("error");
        Table { columns, rows: Vec::new() }
    }

    /// Appends a row; `cells` covers every column except `error`.
    pub fn push(&mut self, mut cells: Vec<Cell>) {
        assert_eq!(cells.len() + 1, self.columns.len(), "row width");
        cells.push(Cell::Empty);
        self.rows.push(cells);
    }

    /// Appends an error row that keeps the leading grid cells.
    pub fn push_error(&mut self, lead: Vec<Cell>, message: String) {
        let mut cells = lead;
        cells.resize(self.columns.len() - 1, Cell::Empty);
        cells.push(Cell::Text(message));
        self.rows.push(cells);
    }

    pub fn has_errors(&self) -> bool {
        self.rows.iter().any(|r| r.last().is_some_and(|c| *c != Cell::Empty))
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns).expect("in-memory write");
                for r in &self.rows {
                    w.write_record(r.iter().map(Cell::render)).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let m: Map<String, Value> =
                            self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.to_json())).collect();
                        Value::Object(m)
                    })
                    .collect();
                let mut s = serde_json::to_string_pretty(&rows).expect("serializable");
                s.push('\n');
                s
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_rendering_round_trips() {
        for v in [0.1, 1.0 / 3.0, 1.762747174039086, -5e-300, 0.0] {
            let s = Cell::Float(v).render();
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(Cell::Float(0.5).render(), "5e-1");
    }

    #[test]
    fn csv_and_json() {
        let mut t = Table::new(&["k", "p_k"]);
        t.push(vec![0usize.into(), 0.5.into()]);
        t.push_error(vec![1usize.into()], "boom".into());
        assert!(t.has_errors());
        assert_eq!(t.render(Format::Csv), "k,p_k,error\n0,5e-1,\n1,,boom\n");
        let j: Value = serde_json::from_str(&t.render(Format::Json)).unwrap();
        assert_eq!(j[0]["p_k"], Value::from(0.5));
        assert_eq!(j[1]["error"], Value::from("boom"));
    }
}
