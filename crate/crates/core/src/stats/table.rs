use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::StatsError;

/// Session-indexed columns of reals with missing values.
///
/// Rows are ordered by session. Lags shift by row position, so the index
/// is expected to hold consecutive sessions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeriesTable {
    index: Vec<i64>,
    columns: BTreeMap<String, Vec<Option<f64>>>,
    /// Transformations applied since ingestion, in order.
    pub transforms: Vec<String>,
}

/// Inclusive session range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleWindow {
    pub from: Option<i64>,
    pub to: Option<i64>,
}

impl SampleWindow {
    pub fn from(from: i64) -> Self {
        SampleWindow {
            from: Some(from),
            to: None,
        }
    }

    pub fn contains(&self, s: i64) -> bool {
        self.from.is_none_or(|f| s >= f) && self.to.is_none_or(|t| s <= t)
    }
}

const MISSING: [&str; 5] = ["", "NA", "NaN", "nan", "null"];

impl TimeSeriesTable {
    pub fn new(index: Vec<i64>) -> Result<Self, StatsError> {
        if index.windows(2).any(|w| w[0] >= w[1]) {
            return Err(StatsError::Table("session index must be strictly increasing".into()));
        }
        Ok(TimeSeriesTable {
            index,
            columns: BTreeMap::new(),
            transforms: Vec::new(),
        })
    }

    pub fn with_column(mut self, name: &str, values: Vec<Option<f64>>) -> Result<Self, StatsError> {
        self.insert(name, values)?;
        Ok(self)
    }

    pub fn with_dense(self, name: &str, values: &[f64]) -> Result<Self, StatsError> {
        self.with_column(name, values.iter().map(|&v| Some(v)).collect())
    }

    pub fn insert(&mut self, name: &str, values: Vec<Option<f64>>) -> Result<(), StatsError> {
        if values.len() != self.index.len() {
            return Err(StatsError::LengthMismatch(values.len(), self.index.len()));
        }
        let values = values
            .into_iter()
            .map(|v| v.filter(|x| x.is_finite()))
            .collect();
        self.columns.insert(name.to_string(), values);
        Ok(())
    }

    /// Reads a CSV with a `session` column; every other column is numeric.
    /// Empty cells and `NA`/`NaN` are missing. Rows are sorted by session.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, StatsError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let session_col = headers
            .iter()
            .position(|h| h == "session")
            .ok_or_else(|| StatsError::MissingColumn("session".into()))?;
        let mut rows: Vec<(i64, Vec<Option<f64>>)> = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let bad = |field: &str| StatsError::Table(format!("row {}: cannot parse {field:?}", line + 2));
            let session: f64 = rec[session_col].parse().map_err(|_| bad(&rec[session_col]))?;
            let values = rec
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != session_col)
                .map(|(_, f)| {
                    if MISSING.contains(&f) {
                        Ok(None)
                    } else {
                        f.parse::<f64>().map(Some).map_err(|_| bad(f))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push((session as i64, values));
        }
        rows.sort_by_key(|r| r.0);
        let mut table = TimeSeriesTable::new(rows.iter().map(|r| r.0).collect())?;
        let names: Vec<&str> = headers
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != session_col)
            .map(|(_, h)| h)
            .collect();
        for (k, name) in names.iter().enumerate() {
            table.insert(name, rows.iter().map(|r| r.1[k]).collect())?;
        }
        Ok(table)
    }

    pub fn index(&self) -> &[i64] {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn has(&self, name: &str) -> bool {
        self.columns.contains_key(name)
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.keys().map(String::as_str)
    }

    pub fn column(&self, name: &str) -> Result<&[Option<f64>], StatsError> {
        self.columns
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| StatsError::MissingColumn(name.to_string()))
    }

    /// Value of `name` at row `row − lag`; missing when shifted off the head.
    pub fn lagged(&self, name: &str, row: usize, lag: usize) -> Result<Option<f64>, StatsError> {
        let col = self.column(name)?;
        Ok(row.checked_sub(lag).and_then(|r| col[r]))
    }

    /// Column shifted down by `lag` rows; the vacated head is missing.
    pub fn lag(&self, name: &str, lag: usize) -> Result<Vec<Option<f64>>, StatsError> {
        let col = self.column(name)?;
        Ok((0..col.len()).map(|r| r.checked_sub(lag).and_then(|s| col[s])).collect())
    }

    /// Rows whose session lies in the window.
    pub fn restrict(&self, window: &SampleWindow) -> TimeSeriesTable {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| window.contains(self.index[i])).collect();
        TimeSeriesTable {
            index: keep.iter().map(|&i| self.index[i]).collect(),
            columns: self
                .columns
                .iter()
                .map(|(k, v)| (k.clone(), keep.iter().map(|&i| v[i]).collect()))
                .collect(),
            transforms: self.transforms.clone(),
        }
    }

    /// Natural log in place; non-positive values become missing.
    pub fn log_transform(&mut self, name: &str) -> Result<(), StatsError> {
        let col = self
            .columns
            .get_mut(name)
            .ok_or_else(|| StatsError::MissingColumn(name.to_string()))?;
        for v in col.iter_mut() {
            *v = v.filter(|x| *x > 0.0).map(f64::ln);
        }
        self.transforms.push(format!("log({name})"));
        Ok(())
    }

    /// Centers and scales a column by its mean and sample standard
    /// deviation over present values.
    pub fn standardize(&mut self, name: &str) -> Result<(), StatsError> {
        let col = self
            .columns
            .get_mut(name)
            .ok_or_else(|| StatsError::MissingColumn(name.to_string()))?;
        let present: Vec<f64> = col.iter().flatten().copied().collect();
        if present.len() < 2 {
            return Err(StatsError::InsufficientData {
                needed: 2,
                got: present.len(),
            });
        }
        let m = super::mean(&present);
        let sd = (present.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (present.len() - 1) as f64).sqrt();
        if sd == 0.0 {
            return Err(StatsError::ZeroVariance("standardized column"));
        }
        for v in col.iter_mut() {
            *v = v.map(|x| (x - m) / sd);
        }
        self.transforms.push(format!("z({name})"));
        Ok(())
    }

    /// Writes `session` followed by every column in name order; missing
    /// values are empty cells. `from_csv` reads the output back unchanged.
    pub fn to_csv<W: Write>(&self, writer: W) -> Result<(), StatsError> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["session".to_string()];
        header.extend(self.columns.keys().cloned());
        w.write_record(&header)?;
        for (row, s) in self.index.iter().enumerate() {
            let mut rec = vec![s.to_string()];
            rec.extend(self.columns.values().map(|c| c[row].map_or(String::new(), |v| v.to_string())));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Present (session, value) pairs of a column.
    pub fn dense(&self, name: &str) -> Result<Vec<(i64, f64)>, StatsError> {
        let col = self.column(name)?;
        Ok(self
            .index
            .iter()
            .zip(col)
            .filter_map(|(&s, v)| v.map(|x| (s, x)))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CSV: &str = "session,EMI,Pol\n47,0.2,\n46,0.1,0.5\n48,NA,0.7\n";

    #[test]
    fn csv_sorted_with_missing() {
        let t = TimeSeriesTable::from_csv(CSV.as_bytes()).unwrap();
        assert_eq!(t.index(), [46, 47, 48]);
        assert_eq!(t.column("EMI").unwrap(), [Some(0.1), Some(0.2), None]);
        assert_eq!(t.column("Pol").unwrap(), [Some(0.5), None, Some(0.7)]);
        assert!(matches!(t.column("Ineq"), Err(StatsError::MissingColumn(_))));
    }

    #[test]
    fn csv_round_trip() {
        let t = TimeSeriesTable::from_csv(CSV.as_bytes()).unwrap();
        let mut buf = Vec::new();
        t.to_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "session,EMI,Pol\n46,0.1,0.5\n47,0.2,\n48,,0.7\n");
        assert_eq!(TimeSeriesTable::from_csv(buf.as_slice()).unwrap(), t);
    }

    #[test]
    fn lag_marks_head_missing() {
        let t = TimeSeriesTable::from_csv(CSV.as_bytes()).unwrap();
        assert_eq!(t.lag("EMI", 1).unwrap(), [None, Some(0.1), Some(0.2)]);
        assert_eq!(t.lagged("Pol", 2, 2).unwrap(), Some(0.5));
        assert_eq!(t.lagged("Pol", 1, 2).unwrap(), None);
    }

    #[test]
    fn transforms_are_recorded() {
        let mut t = TimeSeriesTable::new(vec![1, 2, 3])
            .unwrap()
            .with_dense("n", &[1.0, std::f64::consts::E, 0.0])
            .unwrap();
        t.log_transform("n").unwrap();
        assert_eq!(t.column("n").unwrap()[1], Some(1.0));
        assert_eq!(t.column("n").unwrap()[2], None);
        t.standardize("n").unwrap();
        let z: Vec<f64> = t.column("n").unwrap().iter().flatten().copied().collect();
        assert!((z[0] + z[1]).abs() < 1e-12);
        assert_eq!(t.transforms, ["log(n)", "z(n)"]);
    }

    #[test]
    fn restrict_window() {
        let t = TimeSeriesTable::from_csv(CSV.as_bytes()).unwrap();
        let r = t.restrict(&SampleWindow::from(47));
        assert_eq!(r.index(), [47, 48]);
        assert_eq!(r.lag("EMI", 1).unwrap(), [None, Some(0.2)]);
    }

    #[test]
    fn unsorted_index_rejected() {
        assert!(TimeSeriesTable::new(vec![2, 1]).is_err());
    }
}
