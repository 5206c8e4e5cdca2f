//! Tables rendered as CSV or JSON with identical number formatting.

use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i128),
    Text(String),
    Bool(bool),
    Null,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
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

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Null, Cell::Num)
    }
}

/// 17 significant digits; infinities as `inf`.
pub fn number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width for table {}",
            self.name
        );
        self.rows.push(row);
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Num(v) => number(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Text(s) => csv_field(s),
        Cell::Bool(b) => b.to_string(),
        Cell::Null => String::new(),
    }
}

fn json_cell(c: &Cell) -> String {
    match c {
        Cell::Num(v) if v.is_finite() => number(*v),
        Cell::Num(v) => json_string(&number(*v)),
        Cell::Int(v) => v.to_string(),
        Cell::Text(s) => json_string(s),
        Cell::Bool(b) => b.to_string(),
        Cell::Null => "null".into(),
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

/// Renders every table. CSV tables are preceded by a `# name` line and
/// separated by blank lines.
pub fn render(command: &str, tables: &[Table], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            for (i, t) in tables.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                writeln!(out, "# {}", t.name).unwrap();
                let header: Vec<String> = t.columns.iter().map(|c| csv_field(c)).collect();
                writeln!(out, "{}", header.join(",")).unwrap();
                for row in &t.rows {
                    let cells: Vec<String> = row.iter().map(csv_cell).collect();
                    writeln!(out, "{}", cells.join(",")).unwrap();
                }
            }
        }
        Format::Json => {
            write!(out, "{{\"command\":{},\"tables\":[", json_string(command)).unwrap();
            for (i, t) in tables.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{{\"name\":{},\"rows\":[", json_string(&t.name)).unwrap();
                for (j, row) in t.rows.iter().enumerate() {
                    if j > 0 {
                        out.push(',');
                    }
                    out.push('{');
                    for (k, (col, cell)) in t.columns.iter().zip(row).enumerate() {
                        if k > 0 {
                            out.push(',');
                        }
                        write!(out, "{}:{}", json_string(col), json_cell(cell)).unwrap();
                    }
                    out.push('}');
                }
                out.push_str("]}");
            }
            out.push_str("]}\n");
        }
    }
    out
}
