use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

/// One numeric column read from a CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSeries {
    pub values: Vec<f64>,
    pub label: String,
    pub source: PathBuf,
}

impl DataSeries {
    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn is_number(s: &str) -> bool {
    s.trim().parse::<f64>().is_ok()
}

/// Reads one column. `column` is a header name or a 1-based index; when it is
/// omitted the file must have exactly one column. A first row with a
/// non-numeric field is taken to be a header.
pub fn ingest_csv(path: &Path, column: Option<&str>) -> Result<DataSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.with_context(|| format!("{}: malformed row {}", path.display(), i + 1))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        rows.push((i + 1, rec));
    }
    let Some((_, first)) = rows.first() else {
        bail!("{}: no data rows", path.display());
    };
    let header: Option<Vec<String>> =
        if first.iter().any(|f| !is_number(f)) { Some(first.iter().map(str::to_string).collect()) } else { None };
    let width = first.len();

    let (index, label) = match column {
        None if width == 1 => (0, header.as_ref().map_or("value".to_string(), |h| h[0].clone())),
        None => bail!("{}: {width} columns, select one with --column", path.display()),
        Some(sel) => match sel.parse::<usize>() {
            Ok(j) if j >= 1 && j <= width => (j - 1, header.as_ref().map_or(format!("column{j}"), |h| h[j - 1].clone())),
            Ok(j) => bail!("{}: column {j} out of range 1..={width}", path.display()),
            Err(_) => {
                let Some(h) = &header else {
                    bail!("{}: no header row, so column '{sel}' must be a 1-based index", path.display());
                };
                let j = h.iter().position(|name| name == sel);
                let Some(j) = j else { bail!("{}: no column named '{sel}' (have {})", path.display(), h.join(", ")) };
                (j, sel.to_string())
            }
        },
    };

    let skip = usize::from(header.is_some());
    let mut values = Vec::with_capacity(rows.len());
    for (line, rec) in &rows[skip..] {
        let field = rec.get(index).unwrap_or("");
        let v: f64 = field
            .parse()
            .map_err(|_| anyhow::anyhow!("{}: row {line}: '{field}' is not a number", path.display()))?;
        if !v.is_finite() {
            bail!("{}: row {line}: non-finite value '{field}'", path.display());
        }
        values.push(v);
    }
    if values.is_empty() {
        bail!("{}: column '{label}' has no values", path.display());
    }
    Ok(DataSeries { values, label, source: path.to_path_buf() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn headerless_single_column() {
        let f = file("1.5\n2\n\n-3e2\n");
        let s = ingest_csv(f.path(), None).unwrap();
        assert_eq!(s.values, vec![1.5, 2.0, -300.0]);
        assert_eq!((s.min(), s.max()), (-300.0, 2.0));
    }

    #[test]
    fn header_by_name_and_index() {
        let f = file("year,flow_cfs\n1895,2.5\n1896,7\n");
        assert_eq!(ingest_csv(f.path(), Some("flow_cfs")).unwrap().values, vec![2.5, 7.0]);
        assert_eq!(ingest_csv(f.path(), Some("1")).unwrap().values, vec![1895.0, 1896.0]);
        assert!(ingest_csv(f.path(), None).is_err());
        assert!(ingest_csv(f.path(), Some("3")).is_err());
        assert!(ingest_csv(f.path(), Some("stage")).is_err());
    }

    #[test]
    fn bad_rows_are_named() {
        let f = file("x\n1\nabc\n3\n");
        let e = ingest_csv(f.path(), None).unwrap_err().to_string();
        assert!(e.contains("row 3") && e.contains("abc"), "{e}");
        let f = file("1\nNaN\n");
        assert!(ingest_csv(f.path(), None).unwrap_err().to_string().contains("row 2"));
        let f = file("1\ninf\n");
        assert!(ingest_csv(f.path(), None).is_err());
    }

    #[test]
    fn round_trip_through_csv() {
        let values = vec![0.1, -2.5e-7, 1e300, 3.0, 123456.789, f64::MIN_POSITIVE];
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["flow_cfs"]).unwrap();
        for v in &values {
            w.write_record([v.to_string()]).unwrap();
        }
        let f = file(std::str::from_utf8(&w.into_inner().unwrap()).unwrap());
        let s = ingest_csv(f.path(), Some("flow_cfs")).unwrap();
        assert_eq!(s, DataSeries { values, label: "flow_cfs".into(), source: f.path().to_path_buf() });
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(ingest_csv(file("").path(), None).is_err());
        assert!(ingest_csv(file("only_header\n").path(), None).is_err());
    }
}
