//! CSV ingestion: `x*` columns are predictors, `y*` columns are responses.

use std::path::Path;

use nlsdr_core::DataMatrix;

use crate::CliError;

#[derive(Debug, Clone)]
pub struct Dataset {
    pub x: DataMatrix,
    pub y: Option<DataMatrix>,
    pub x_names: Vec<String>,
    pub y_names: Vec<String>,
}

impl Dataset {
    pub fn require_y(&self) -> Result<&DataMatrix, CliError> {
        self.y
            .as_ref()
            .ok_or_else(|| CliError::Input("data has no response columns (headers starting with `y`)".into()))
    }

    /// Rejects columns whose values are all equal.
    pub fn check_not_constant(&self) -> Result<(), CliError> {
        let blocks = [(Some(&self.x), &self.x_names), (self.y.as_ref(), &self.y_names)];
        for (m, names) in blocks {
            let Some(m) = m else { continue };
            for (j, name) in names.iter().enumerate() {
                let col = m.column(j);
                if col.iter().all(|&v| v == col[0]) {
                    return Err(CliError::Input(format!("column `{name}` is constant")));
                }
            }
        }
        Ok(())
    }
}

pub fn read_dataset(path: &Path, need_y: bool) -> Result<Dataset, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::Input(format!("cannot open {}: {e}", path.display())))?;
    parse_dataset(file, need_y)
}

pub fn parse_dataset<R: std::io::Read>(reader: R, need_y: bool) -> Result<Dataset, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| CliError::Input(format!("cannot read header: {e}")))?
        .clone();
    if headers.is_empty() || headers.iter().all(str::is_empty) {
        return Err(CliError::Input("no data rows".into()));
    }
    let mut x_cols = Vec::new();
    let mut y_cols = Vec::new();
    for (i, h) in headers.iter().enumerate() {
        match h.chars().next().map(|c| c.to_ascii_lowercase()) {
            Some('x') => x_cols.push(i),
            Some('y') => y_cols.push(i),
            _ => {}
        }
    }
    if x_cols.is_empty() {
        return Err(CliError::Input("no predictor columns (headers starting with `x`)".into()));
    }
    if need_y && y_cols.is_empty() {
        return Err(CliError::Input("no response columns (headers starting with `y`)".into()));
    }

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        // header is line 1
        let line = k + 2;
        let rec = rec.map_err(|e| CliError::Input(format!("line {line}: {e}")))?;
        if rec.len() != headers.len() {
            return Err(CliError::Input(format!(
                "line {line}: expected {} fields, found {}",
                headers.len(),
                rec.len()
            )));
        }
        let field = |i: usize| -> Result<f64, CliError> {
            let s = &rec[i];
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Input(format!("line {line}: bad number `{s}` in column `{}`", &headers[i])))
        };
        for &i in &x_cols {
            xs.push(field(i)?);
        }
        for &i in &y_cols {
            ys.push(field(i)?);
        }
    }
    let n = xs.len() / x_cols.len();
    if n == 0 {
        return Err(CliError::Input("no data rows".into()));
    }
    let x = DataMatrix::from_row_major(n, x_cols.len(), &xs).map_err(CliError::from)?;
    let y = if y_cols.is_empty() {
        None
    } else {
        Some(DataMatrix::from_row_major(n, y_cols.len(), &ys).map_err(CliError::from)?)
    };
    Ok(Dataset {
        x,
        y,
        x_names: x_cols.iter().map(|&i| headers[i].to_string()).collect(),
        y_names: y_cols.iter().map(|&i| headers[i].to_string()).collect(),
    })
}
