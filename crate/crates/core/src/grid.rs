//! Rectangular density grids for the bivariate model.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::model::SmvbsParams;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub t1: Vec<f64>,
    pub t2: Vec<f64>,
    /// `values[i][k]` is the density at `(t1[i], t2[k])`.
    pub values: Vec<Vec<f64>>,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

impl DensityGrid {
    pub fn evaluate<F>(f: F, t1: (f64, f64), t2: (f64, f64), size: usize) -> Result<Self>
    where
        F: Fn(f64, f64) -> Result<f64>,
    {
        if size < 3 {
            return Err(Error::InvalidParams(
                "grid needs at least 3 points per axis".into(),
            ));
        }
        for (lo, hi) in [t1, t2] {
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return Err(Error::InvalidParams(format!("bad grid range [{lo}, {hi}]")));
            }
        }
        let (x, y) = (linspace(t1.0, t1.1, size), linspace(t2.0, t2.1, size));
        let values = x
            .iter()
            .map(|&a| y.iter().map(|&b| f(a, b)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            t1: x,
            t2: y,
            values,
        })
    }

    /// Interior points strictly above their 8 neighbours and at least
    /// `min_rel_height` times the grid maximum.
    pub fn count_local_maxima(&self, min_rel_height: f64) -> usize {
        let top = self.values.iter().flatten().copied().fold(0.0, f64::max);
        let (n1, n2) = (self.t1.len(), self.t2.len());
        let mut count = 0;
        for i in 1..n1 - 1 {
            for k in 1..n2 - 1 {
                let v = self.values[i][k];
                if v < min_rel_height * top {
                    continue;
                }
                let peak = (i - 1..=i + 1)
                    .flat_map(|a| (k - 1..=k + 1).map(move |b| (a, b)))
                    .filter(|&(a, b)| (a, b) != (i, k))
                    .all(|(a, b)| self.values[a][b] < v);
                if peak {
                    count += 1;
                }
            }
        }
        count
    }

    /// `t1,t2,density` rows for external plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t1,t2,density\n");
        for (i, &a) in self.t1.iter().enumerate() {
            for (k, &b) in self.t2.iter().enumerate() {
                writeln!(out, "{a},{b},{:e}", self.values[i][k]).expect("write to string");
            }
        }
        out
    }
}

pub fn smvbs_density_grid(
    theta: &SmvbsParams,
    t1: (f64, f64),
    t2: (f64, f64),
    size: usize,
) -> Result<DensityGrid> {
    if theta.dim() != 2 {
        return Err(Error::InvalidParams("density grids need p = 2".into()));
    }
    DensityGrid::evaluate(|a, b| theta.pdf(&[a, b]), t1, t2, size)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_flip_with_lambda() {
        let a = SmvbsParams::bivariate(0.5, 0.5, 1.0, 1.0, 0.5).unwrap();
        let ga = smvbs_density_grid(&a, (0.05, 4.0), (0.05, 4.0), 200).unwrap();
        assert_eq!(ga.count_local_maxima(1e-3), 1);
        let e = SmvbsParams::bivariate(0.2, 0.2, 1.0, 1.0, 5.0).unwrap();
        let ge = smvbs_density_grid(&e, (0.4, 2.2), (0.4, 2.2), 200).unwrap();
        assert_eq!(ge.count_local_maxima(1e-3), 2);
    }

    #[test]
    fn csv_layout() {
        let a = SmvbsParams::bivariate(0.5, 0.5, 1.0, 1.0, 0.5).unwrap();
        let g = smvbs_density_grid(&a, (0.5, 1.5), (0.5, 1.5), 3).unwrap();
        let csv = g.to_csv();
        assert_eq!(csv.lines().count(), 10);
        assert!(csv.starts_with("t1,t2,density\n0.5,0.5,"));
    }
}
