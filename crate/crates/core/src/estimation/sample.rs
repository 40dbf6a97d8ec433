use crate::error::{Error, Result};

/// `n × p` matrix of strictly positive observations with cached
/// arithmetic and harmonic column means.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    cols: Vec<Vec<f64>>,
    s_bar: Vec<f64>,
    r_bar: Vec<f64>,
}

impl SampleMatrix {
    /// Builds from rows; every row must have the same length `p ≥ 1`.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::Data(format!(
                "need at least 2 rows, got {}",
                rows.len()
            )));
        }
        let p = rows[0].len();
        if p == 0 {
            return Err(Error::Data("rows have no columns".into()));
        }
        let mut cols = vec![Vec::with_capacity(rows.len()); p];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::Data(format!(
                    "row {} has {} columns, expected {p}",
                    i + 1,
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::Data(format!(
                        "row {}, column {}: value {v} is not strictly positive",
                        i + 1,
                        j + 1
                    )));
                }
                cols[j].push(v);
            }
        }
        Ok(Self::from_validated(cols))
    }

    fn from_validated(cols: Vec<Vec<f64>>) -> Self {
        let n = cols[0].len() as f64;
        let s_bar = cols.iter().map(|c| c.iter().sum::<f64>() / n).collect();
        let r_bar = cols
            .iter()
            .map(|c| n / c.iter().map(|v| 1.0 / v).sum::<f64>())
            .collect();
        Self { cols, s_bar, r_bar }
    }

    pub fn n(&self) -> usize {
        self.cols[0].len()
    }

    pub fn p(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.cols[j]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.cols.iter().map(|c| c[i]).collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n()).map(|i| self.row(i)).collect()
    }

    /// Arithmetic means `s̄_j`.
    pub fn s_bar(&self) -> &[f64] {
        &self.s_bar
    }

    /// Harmonic means `r̄_j`.
    pub fn r_bar(&self) -> &[f64] {
        &self.r_bar
    }

    /// Keeps the listed columns in the given order.
    pub fn select(&self, columns: &[usize]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::Data("no columns selected".into()));
        }
        let mut cols = Vec::with_capacity(columns.len());
        for &j in columns {
            let c = self.cols.get(j).ok_or_else(|| {
                Error::Data(format!("column {} out of range (p = {})", j + 1, self.p()))
            })?;
            cols.push(c.clone());
        }
        Ok(Self::from_validated(cols))
    }

    /// Multiplies column `j` by `k[j]`.
    pub fn scaled(&self, k: &[f64]) -> Result<Self> {
        if k.len() != self.p() || k.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::Data(
                "scale factors must be p positive values".into(),
            ));
        }
        let cols = self
            .cols
            .iter()
            .zip(k)
            .map(|(c, &kj)| c.iter().map(|v| v * kj).collect())
            .collect();
        Ok(Self::from_validated(cols))
    }
}
