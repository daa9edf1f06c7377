//! Per-iteration convergence records and their CSV form.

use std::path::Path;

use crate::error::{Error, Result};

use super::cost::CostBreakdown;

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub cost: f64,
    pub data_l1: f64,
    pub data_l2: f64,
    pub reg: f64,
    /// Computation units consumed to produce this iterate.
    pub cu: u64,
    pub psnr: Option<f64>,
    pub ms: f64,
}

#[derive(Debug, Clone, Default)]
pub struct ConvergenceTrace {
    pub rows: Vec<TraceRow>,
    /// ADMM feasibility norms `|F x - z - b'|_2` per iteration (empty for
    /// gradient descent).
    pub feasibility: Vec<f64>,
}

pub const TRACE_HEADER: &str = "iter,cost,data_l1,data_l2,reg,cu,psnr,ms";

impl ConvergenceTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, iter: usize, cost: CostBreakdown, cu: u64, psnr: Option<f64>, ms: f64) {
        if let Some(last) = self.rows.last() {
            debug_assert!(iter > last.iter, "trace rows must be appended in order");
            debug_assert!(cu > last.cu, "CU must be strictly increasing");
        }
        self.rows.push(TraceRow {
            iter,
            cost: cost.total,
            data_l1: cost.data_l1,
            data_l2: cost.data_l2,
            reg: cost.reg_l1,
            cu,
            psnr,
            ms,
        });
    }

    pub fn final_cost(&self) -> Option<f64> {
        self.rows.last().map(|r| r.cost)
    }

    /// Objective of the last iterate produced within the CU budget.
    pub fn cost_at_cu(&self, cu: u64) -> Option<f64> {
        self.rows.iter().rev().find(|r| r.cu <= cu).map(|r| r.cost)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from(TRACE_HEADER);
        out.push('\n');
        for r in &self.rows {
            let psnr = match r.psnr {
                Some(v) if v.is_infinite() => "inf".to_string(),
                Some(v) => format!("{v:.6}"),
                None => String::new(),
            };
            out.push_str(&format!(
                "{},{:.10e},{:.10e},{:.10e},{:.10e},{},{},{:.3}\n",
                r.iter, r.cost, r.data_l1, r.data_l2, r.reg, r.cu, psnr, r.ms
            ));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row_cost(v: f64) -> CostBreakdown {
        CostBreakdown { total: v, data_l1: 0.0, data_l2: 0.0, reg_l1: v }
    }

    #[test]
    fn csv_schema() {
        let mut t = ConvergenceTrace::new();
        t.push(0, row_cost(5.0), 0, None, 0.0);
        t.push(1, row_cost(3.0), 12, Some(31.25), 8.1);
        let csv = t.to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "iter,cost,data_l1,data_l2,reg,cu,psnr,ms");
        assert!(lines.next().unwrap().starts_with("0,"));
        let row1 = lines.next().unwrap();
        assert!(row1.contains("31.250000"));
        assert_eq!(t.cost_at_cu(11), Some(5.0));
        assert_eq!(t.cost_at_cu(12), Some(3.0));
        assert_eq!(t.final_cost(), Some(3.0));
    }
}
