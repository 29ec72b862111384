//! Comma-separated tables with a fixed float format and a trailing status
//! line, so that a truncated file is recognizable.

use std::fmt::Write;

/// 17 significant digits, round-trippable and locale independent.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone)]
pub struct CsvTable {
    columns: usize,
    text: String,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self {
            columns: header.len(),
            text,
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.columns);
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    /// Appends a `# key,value` line after the data rows.
    pub fn note(&mut self, key: &str, value: &str) {
        let _ = writeln!(self.text, "# {key},{value}");
    }

    pub fn finish(mut self, status: &str) -> String {
        let _ = writeln!(self.text, "# status,{status}");
        self.text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(-0.25), "-2.5000000000000000e-1");
        let x = 0.1 + 0.2;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        let mut t = CsvTable::new(&["a", "b"]);
        t.row(&["1".into(), fmt_f64(2.0)]);
        let s = t.finish("ok");
        assert_eq!(s, "a,b\n1,2.0000000000000000e0\n# status,ok\n");
    }
}
