//! Dense column-major design matrix and the encoded dataset that pairs it
//! with a response vector.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Dense matrix stored column by column.
///
/// Coordinate descent touches one feature column at a time, so keeping each
/// column contiguous makes the inner loops plain slice iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Matrix {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    /// Builds a matrix from column-major storage.
    pub fn from_column_major(n_rows: usize, n_cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n_rows * n_cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} values for a {}x{} matrix, got {}",
                n_rows * n_cols,
                n_rows,
                n_cols,
                data.len()
            )));
        }
        Ok(Matrix {
            n_rows,
            n_cols,
            data,
        })
    }

    /// Builds a matrix from a list of equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Matrix::zeros(n_rows, n_cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n_cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} values, expected {}",
                    i,
                    row.len(),
                    n_cols
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn from_columns<C: AsRef<[f64]>>(n_rows: usize, columns: &[C]) -> Result<Self> {
        let mut data = Vec::with_capacity(n_rows * columns.len());
        for (j, col) in columns.iter().enumerate() {
            let col = col.as_ref();
            if col.len() != n_rows {
                return Err(Error::DimensionMismatch(format!(
                    "column {} has {} values, expected {}",
                    j,
                    col.len(),
                    n_rows
                )));
            }
            data.extend_from_slice(col);
        }
        Matrix::from_column_major(n_rows, columns.len(), data)
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[col * self.n_rows + row]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[col * self.n_rows + row] = value;
    }

    #[inline]
    pub fn column(&self, col: usize) -> &[f64] {
        &self.data[col * self.n_rows..(col + 1) * self.n_rows]
    }

    #[inline]
    pub fn column_mut(&mut self, col: usize) -> &mut [f64] {
        &mut self.data[col * self.n_rows..(col + 1) * self.n_rows]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.n_cols).map(move |j| self.column(j))
    }

    pub fn row(&self, row: usize) -> Vec<f64> {
        (0..self.n_cols).map(|j| self.get(row, j)).collect()
    }

    /// New matrix holding the given rows, in the given order (repeats allowed).
    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * self.n_cols);
        for col in self.columns() {
            data.extend(rows.iter().map(|&i| col[i]));
        }
        Matrix {
            n_rows: rows.len(),
            n_cols: self.n_cols,
            data,
        }
    }

    /// Computes `intercept + X·coefficients` for every row.
    pub fn affine(&self, intercept: f64, coefficients: &[f64]) -> Result<Vec<f64>> {
        if coefficients.len() != self.n_cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} columns but {} coefficients were given",
                self.n_cols,
                coefficients.len()
            )));
        }
        let mut out = vec![intercept; self.n_rows];
        for (col, &b) in self.columns().zip(coefficients) {
            if b == 0.0 {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(col) {
                *o += x * b;
            }
        }
        Ok(out)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// A numeric design matrix with its response and bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedDataset {
    pub x: Matrix,
    pub y: Vec<f64>,
    pub feature_names: Vec<String>,
    pub row_ids: Vec<String>,
}

impl EncodedDataset {
    /// Validates the container invariants and builds the dataset.
    pub fn new(
        x: Matrix,
        y: Vec<f64>,
        feature_names: Vec<String>,
        row_ids: Vec<String>,
    ) -> Result<Self> {
        if x.n_rows() == 0 {
            return Err(Error::InvalidDataset("dataset has no rows".into()));
        }
        if x.n_cols() == 0 {
            return Err(Error::InvalidDataset(
                "dataset has no feature columns".into(),
            ));
        }
        if y.len() != x.n_rows() {
            return Err(Error::DimensionMismatch(format!(
                "{} responses for {} rows",
                y.len(),
                x.n_rows()
            )));
        }
        if feature_names.len() != x.n_cols() {
            return Err(Error::DimensionMismatch(format!(
                "{} feature names for {} columns",
                feature_names.len(),
                x.n_cols()
            )));
        }
        if row_ids.len() != x.n_rows() {
            return Err(Error::DimensionMismatch(format!(
                "{} row ids for {} rows",
                row_ids.len(),
                x.n_rows()
            )));
        }
        let mut seen = HashSet::with_capacity(feature_names.len());
        for name in &feature_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidDataset(format!(
                    "duplicate feature name '{name}'"
                )));
            }
        }
        if !x.all_finite() {
            return Err(Error::InvalidDataset(
                "design matrix has non-finite entries".into(),
            ));
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "response has a non-finite value at row {i}"
            )));
        }
        Ok(EncodedDataset {
            x,
            y,
            feature_names,
            row_ids,
        })
    }

    /// Dataset with default names `f1..fp` and row ids `0..N`.
    pub fn from_parts(x: Matrix, y: Vec<f64>) -> Result<Self> {
        let names = (1..=x.n_cols()).map(|j| format!("f{j}")).collect();
        let ids = (0..x.n_rows()).map(|i| i.to_string()).collect();
        EncodedDataset::new(x, y, names, ids)
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.x.n_rows()
    }

    #[inline]
    pub fn n_features(&self) -> usize {
        self.x.n_cols()
    }

    /// Checks that every response is 0 or 1.
    pub fn check_binary(&self) -> Result<()> {
        check_binary_labels(&self.y)
    }

    /// Returns (negatives, positives).
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.y.iter().filter(|&&v| v == 1.0).count();
        (self.y.len() - pos, pos)
    }

    /// Rows picked by index, in order; repeated indices duplicate rows.
    pub fn subset(&self, rows: &[usize]) -> EncodedDataset {
        EncodedDataset {
            x: self.x.select_rows(rows),
            y: rows.iter().map(|&i| self.y[i]).collect(),
            feature_names: self.feature_names.clone(),
            row_ids: rows.iter().map(|&i| self.row_ids[i].clone()).collect(),
        }
    }

    /// Same design matrix with a replacement response.
    pub fn with_response(&self, y: Vec<f64>) -> Result<EncodedDataset> {
        EncodedDataset::new(
            self.x.clone(),
            y,
            self.feature_names.clone(),
            self.row_ids.clone(),
        )
    }
}

pub(crate) fn check_binary_labels(y: &[f64]) -> Result<()> {
    match y.iter().position(|&v| v != 0.0 && v != 1.0) {
        Some(i) => Err(Error::InvalidDataset(format!(
            "response at row {i} is {}, expected 0 or 1",
            y[i]
        ))),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_and_columns_agree() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        assert_eq!(m.column(0), &[1.0, 3.0, 5.0]);
        assert_eq!(m.column(1), &[2.0, 4.0, 6.0]);
        assert_eq!(m.row(1), vec![3.0, 4.0]);
        let s = m.select_rows(&[2, 0, 2]);
        assert_eq!(s.column(1), &[6.0, 2.0, 6.0]);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn dataset_invariants() {
        let x = Matrix::from_rows(&[vec![1.0], vec![2.0]]).unwrap();
        assert!(EncodedDataset::from_parts(x.clone(), vec![1.0]).is_err());
        assert!(EncodedDataset::from_parts(x.clone(), vec![1.0, f64::NAN]).is_err());
        assert!(EncodedDataset::new(
            Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap(),
            vec![0.0],
            vec!["a".into(), "a".into()],
            vec!["0".into()]
        )
        .is_err());
        let bad = Matrix::from_rows(&[vec![f64::INFINITY], vec![2.0]]).unwrap();
        assert!(EncodedDataset::from_parts(bad, vec![0.0, 1.0]).is_err());
        let ds = EncodedDataset::from_parts(x, vec![0.0, 1.0]).unwrap();
        assert!(ds.check_binary().is_ok());
        assert_eq!(ds.class_counts(), (1, 1));
    }
}
