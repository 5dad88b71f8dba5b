//! Tabular output in CSV (12 significant digits, `\n` endings) or JSON.

use serde_json::{Map, Number, Value};

use crate::config::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

pub fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.11e}")
    } else {
        v.to_string()
    }
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Rows of `other` appended; columns must match.
    pub fn extend(&mut self, other: Table) {
        assert_eq!(self.columns, other.columns);
        self.rows.extend(other.rows);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => fmt_num(*v),
                    Cell::Int(v) => v.to_string(),
                    Cell::Text(s) => s.clone(),
                    Cell::Empty => String::new(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (col, cell) in self.columns.iter().zip(row) {
                    let v = match cell {
                        Cell::Num(v) => Number::from_f64(*v).map_or(Value::Null, Value::Number),
                        Cell::Int(v) => Value::from(*v),
                        Cell::Text(s) => Value::String(s.clone()),
                        Cell::Empty => Value::Null,
                    };
                    obj.insert(col.clone(), v);
                }
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("table serialises");
        s.push('\n');
        s
    }
}

/// Reads a table written by [`Table::render`] back into string records.
pub fn read_records(text: &str) -> Result<Vec<Map<String, Value>>, String> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        let rows: Vec<Map<String, Value>> =
            serde_json::from_str(trimmed).map_err(|e| format!("invalid JSON table: {e}"))?;
        return Ok(rows);
    }
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().ok_or("empty table")?.split(',').collect();
    let mut out = Vec::new();
    for (n, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != header.len() {
            return Err(format!("row {} has {} cells, header has {}", n + 2, cells.len(), header.len()));
        }
        let mut obj = Map::new();
        for (h, c) in header.iter().zip(cells) {
            obj.insert(h.to_string(), Value::String(c.to_string()));
        }
        out.push(obj);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_formatting() {
        let mut t = Table::new(&["a", "b", "c", "d"]);
        t.push(vec![1.0.into(), Cell::Empty, "x".into(), 3usize.into()]);
        t.push(vec![(-2.5e-9).into(), 123456789.0123.into(), "y".into(), 0usize.into()]);
        assert_eq!(
            t.to_csv(),
            "a,b,c,d\n1.00000000000e0,,x,3\n-2.50000000000e-9,1.23456789012e8,y,0\n"
        );
    }

    #[test]
    fn json_round_trip() {
        let mut t = Table::new(&["p", "v"]);
        t.push(vec![1e-9.into(), Cell::Empty]);
        let rec = read_records(&t.to_json()).unwrap();
        assert_eq!(rec[0]["p"], Value::from(1e-9));
        assert_eq!(rec[0]["v"], Value::Null);
        let rec = read_records(&t.to_csv()).unwrap();
        assert_eq!(rec[0]["v"], Value::String(String::new()));
    }
}
