use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::room::{GridIndex, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldLabel {
    Floor,
    Light,
    Support,
    Door,
    Baseline,
    Final,
}

impl FieldLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldLabel::Floor => "floor",
            FieldLabel::Light => "light",
            FieldLabel::Support => "support",
            FieldLabel::Door => "door",
            FieldLabel::Baseline => "baseline",
            FieldLabel::Final => "final",
        }
    }
}

impl fmt::Display for FieldLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Dense grid of multiplicative risk factors, row-major.
///
/// `None` marks an occupied cell (inside furniture or walls); those cells
/// are left out of statistics and render gray.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskField {
    pub label: FieldLabel,
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSummary {
    pub mean: f64,
    pub max: f64,
    pub p95: f64,
    pub cells: usize,
}

impl RiskField {
    pub fn new(label: FieldLabel, rows: usize, cols: usize, values: Vec<Option<f64>>) -> Self {
        assert_eq!(values.len(), rows * cols, "field size mismatch");
        Self {
            label,
            rows,
            cols,
            values,
        }
    }

    pub fn uniform(label: FieldLabel, grid: &GridSpec, value: f64) -> Self {
        Self::new(label, grid.rows, grid.cols, vec![Some(value); grid.len()])
    }

    pub fn get(&self, idx: GridIndex) -> Option<f64> {
        self.values[idx.row * self.cols + idx.col]
    }

    pub fn relabel(mut self, label: FieldLabel) -> Self {
        self.label = label;
        self
    }

    pub fn check_dims(&self, rows: usize, cols: usize) -> Result<()> {
        if self.rows != rows || self.cols != cols {
            return Err(Error::DimensionMismatch {
                expected_rows: rows,
                expected_cols: cols,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    pub fn free_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().flatten().copied()
    }

    /// Mean, max and nearest-rank 95th percentile over unoccupied cells.
    pub fn summary(&self) -> FieldSummary {
        self.summary_where(|_| true)
    }

    /// Summary restricted to cells accepted by `keep`.
    pub fn summary_where(&self, mut keep: impl FnMut(GridIndex) -> bool) -> FieldSummary {
        let mut vals: Vec<f64> = self
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| keep(GridIndex::new(i / self.cols, i % self.cols)))
            .filter_map(|(_, v)| *v)
            .collect();
        if vals.is_empty() {
            return FieldSummary {
                mean: f64::NAN,
                max: f64::NAN,
                p95: f64::NAN,
                cells: 0,
            };
        }
        vals.sort_by(f64::total_cmp);
        let n = vals.len();
        let mean = vals.iter().sum::<f64>() / n as f64;
        let rank = ((0.95 * n as f64).ceil() as usize).clamp(1, n);
        FieldSummary {
            mean,
            max: vals[n - 1],
            p95: vals[rank - 1],
            cells: n,
        }
    }
}
