use std::fmt;
use std::path::Path;

use crate::{Error, Result};

/// Version string written into every output header.
pub const TOOL_VERSION: &str = concat!("butterfly ", env!("CARGO_PKG_VERSION"));

/// One scalar cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(v) => Some(*v as f64),
            Value::Float(v) => Some(*v),
            Value::Text(_) => None,
        }
    }
}

impl fmt::Display for Value {
    /// Floats use the shortest representation that round-trips, switching to
    /// exponent form outside `[1e-4, 1e15)`; non-finite values print as
    /// `nan`, `inf`, `-inf`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Text(s) => f.write_str(s),
            Value::Float(v) if v.is_nan() => f.write_str("nan"),
            Value::Float(v) if v.is_infinite() => f.write_str(if *v > 0.0 { "inf" } else { "-inf" }),
            Value::Float(v) => {
                let a = v.abs();
                if a == 0.0 {
                    // collapse −0 so reruns cannot differ by the sign of zero
                    f.write_str("0")
                } else if (1e-4..1e15).contains(&a) {
                    write!(f, "{v}")
                } else {
                    write!(f, "{v:e}")
                }
            }
        }
    }
}

/// A column with its unit (empty for dimensionless quantities).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Self { name: name.into(), unit: unit.into() }
    }
}

/// Rows of named scalar columns plus `key=value` metadata, rendered as CSV
/// with a `#`-prefixed metadata block above the header row.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Value>>,
    pub metadata: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(columns: Vec<Column>) -> Self {
        Self { columns, rows: Vec::new(), metadata: Vec::new() }
    }

    pub fn with_metadata(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.push((key.into(), value.to_string()));
        self
    }

    pub fn push_row(&mut self, row: Vec<Value>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::InvalidArgument(format!(
                "row has {} cells for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Numeric values of one column (`None` for unknown names or text).
    pub fn column_f64(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        self.rows.iter().map(|r| r[i].as_f64()).collect()
    }

    /// CSV text: metadata comments, a units comment, the header row and the
    /// data rows, comma separated with LF line endings.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}={v}\n"));
        }
        let units: Vec<String> = self
            .columns
            .iter()
            .map(|c| format!("{}[{}]", c.name, if c.unit.is_empty() { "1" } else { &c.unit }))
            .collect();
        out.push_str(&format!("# units: {}\n", units.join(" ")));
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        writer.write_record(self.columns.iter().map(|c| c.name.as_str())).map_err(csv_err)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(|v| v.to_string())).map_err(csv_err)?;
        }
        let bytes = writer.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        out.push_str(std::str::from_utf8(&bytes).expect("csv output is utf-8"));
        Ok(out)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.to_csv()?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting() {
        let s = |v: f64| Value::Float(v).to_string();
        assert_eq!(s(0.1), "0.1");
        assert_eq!(s(-1.0), "-1");
        assert_eq!(s(-0.0), "0");
        assert_eq!(s(1.5e-7), "1.5e-7");
        assert_eq!(s(f64::NAN), "nan");
        assert_eq!(Value::from(3usize).to_string(), "3");
    }

    #[test]
    fn csv_layout() {
        let mut t = ResultTable::new(vec![Column::new("t_ns", "ns"), Column::new("value", "")]).with_metadata("seed", 1);
        t.push_row(vec![0.0.into(), 0.5.into()]).unwrap();
        t.push_row(vec![8.0.into(), (-1.0).into()]).unwrap();
        assert!(t.push_row(vec![1.0.into()]).is_err());
        assert_eq!(t.to_csv().unwrap(), "# seed=1\n# units: t_ns[ns] value[1]\nt_ns,value\n0,0.5\n8,-1\n");
        assert_eq!(t.column_f64("value").unwrap(), vec![0.5, -1.0]);
        assert!(t.column_f64("missing").is_none());
    }
}
