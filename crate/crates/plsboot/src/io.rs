//! CSV ingestion and long-format output.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::{Array1, Array2};
use plsboot_core::Dataset;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed CSV: {0}")]
    Csv(String),
    /// 1-based line (the header is line 1) and 1-based column.
    #[error("cannot parse {value:?} as a number at row {row}, column {col}")]
    ParseError { row: usize, col: usize, value: String },
    #[error("column {0:?} not found in header")]
    MissingColumn(String),
    #[error("the file has no predictor columns or fewer than two rows")]
    TooSmall,
    #[error(transparent)]
    Core(#[from] plsboot_core::Error),
}

/// A numeric table split into predictors and a response.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub predictor_names: Vec<String>,
    pub response_name: String,
    pub x: Array2<f64>,
    pub y: Array1<f64>,
}

impl Table {
    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn dataset(&self, scale: bool) -> Result<Dataset, IoError> {
        Ok(Dataset::new(self.x.clone(), self.y.clone(), scale)?)
    }

    /// Generated names `x0, x1, …` and response `y`.
    pub fn unnamed(x: Array2<f64>, y: Array1<f64>) -> Self {
        Self {
            predictor_names: (0..x.ncols()).map(|j| format!("x{j}")).collect(),
            response_name: "y".into(),
            x,
            y,
        }
    }
}

/// Reads a CSV file with a header row; `response` names the response column and
/// every other column becomes a predictor, in file order.
pub fn load_csv(path: &Path, response: &str) -> Result<Table, IoError> {
    let file = File::open(path).map_err(|e| IoError::Io { path: path.display().to_string(), message: e.to_string() })?;
    read_csv(file, response)
}

pub fn read_csv<R: Read>(reader: R, response: &str) -> Result<Table, IoError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers().map_err(|e| IoError::Csv(e.to_string()))?.iter().map(String::from).collect();
    let ycol = header.iter().position(|h| h == response).ok_or_else(|| IoError::MissingColumn(response.into()))?;
    let p = header.len() - 1;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| IoError::Csv(e.to_string()))?;
        let row = i + 2;
        for (c, cell) in rec.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| IoError::ParseError { row, col: c + 1, value: cell.into() })?;
            if c == ycol {
                ys.push(v);
            } else {
                xs.push(v);
            }
        }
    }
    let n = ys.len();
    if n < 2 || p == 0 {
        return Err(IoError::TooSmall);
    }
    let x = Array2::from_shape_vec((n, p), xs).map_err(|e| IoError::Csv(e.to_string()))?;
    let mut predictor_names = header;
    let response_name = predictor_names.remove(ycol);
    Ok(Table { predictor_names, response_name, x, y: Array1::from(ys) })
}

/// Writes the table with the response as the last column.
pub fn save_csv(path: &Path, table: &Table) -> Result<(), IoError> {
    let mut header: Vec<&str> = table.predictor_names.iter().map(String::as_str).collect();
    header.push(&table.response_name);
    let rows = (0..table.n()).map(|i| {
        let mut r: Vec<String> = table.x.row(i).iter().map(|&v| fmt_f64(v)).collect();
        r.push(fmt_f64(table.y[i]));
        r
    });
    write_rows(path, &header, rows)
}

/// Shortest text that parses back to the same bits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:?}")
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn write_rows<I, R, S>(path: &Path, header: &[&str], rows: I) -> Result<(), IoError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    let io_err = |e: &dyn std::fmt::Display| IoError::Io { path: path.display().to_string(), message: e.to_string() };
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(&e))?;
    w.write_record(header).map_err(|e| io_err(&e))?;
    for r in rows {
        w.write_record(r).map_err(|e| io_err(&e))?;
    }
    w.flush().map_err(|e| io_err(&e))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let io_err = |e: &dyn std::fmt::Display| IoError::Io { path: path.display().to_string(), message: e.to_string() };
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_err(&e))?;
    text.push('\n');
    File::create(path).and_then(|mut f| f.write_all(text.as_bytes())).map_err(|e| io_err(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_by_two_file() {
        let t = read_csv("a,y\n1,2\n3,4\n5,6\n".as_bytes(), "y").unwrap();
        assert_eq!((t.n(), t.x.ncols()), (3, 1));
        assert_eq!(t.predictor_names, vec!["a"]);
        assert_eq!(t.y.to_vec(), vec![2.0, 4.0, 6.0]);
    }

    #[test]
    fn response_may_sit_anywhere() {
        let t = read_csv("y,a,b\n1,2,3\n4,5,6\n".as_bytes(), "y").unwrap();
        assert_eq!(t.predictor_names, vec!["a", "b"]);
        assert_eq!(t.x.row(1).to_vec(), vec![5.0, 6.0]);
    }

    #[test]
    fn bad_cell_is_located() {
        let err = read_csv("a,b,y\n1,2,3\n4,oops,6\n".as_bytes(), "y").unwrap_err();
        match err {
            IoError::ParseError { row, col, value } => assert_eq!((row, col, value.as_str()), (3, 2, "oops")),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn missing_response() {
        assert!(matches!(read_csv("a,b\n1,2\n3,4\n".as_bytes(), "y"), Err(IoError::MissingColumn(_))));
    }

    #[test]
    fn float_text_round_trips() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 1.7976931348623157e308, 5e-324] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }
}
