use serde::{Deserialize, Serialize};

use crate::util::median;

/// Per-column medians learned on a training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Imputer {
    pub fill: Vec<f64>,
}

impl Imputer {
    /// Median of the present values in each column. A column with no
    /// present value is filled with 0 and logged.
    pub fn fit(rows: &[Vec<Option<f64>>], n_cols: usize) -> Self {
        let fill = (0..n_cols)
            .map(|j| {
                let present: Vec<f64> = rows.iter().filter_map(|r| r[j]).collect();
                median(&present).unwrap_or_else(|| {
                    log::warn!("feature column {j} has no values in the training rows; imputing 0");
                    0.0
                })
            })
            .collect();
        Imputer { fill }
    }

    pub fn transform_row(&self, row: &[Option<f64>]) -> Vec<f64> {
        row.iter().zip(&self.fill).map(|(v, f)| v.unwrap_or(*f)).collect()
    }

    pub fn transform(&self, rows: &[Vec<Option<f64>>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.transform_row(r)).collect()
    }
}
