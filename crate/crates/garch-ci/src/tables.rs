//! Embedded reference tables for the reproduction targets.
//!
//! The values ship as a versioned fixture file so the `--check` tolerances
//! stay auditable alongside the numbers they gate.

use serde::{Deserialize, Serialize};

use crate::distributions::InnovationSpec;
use crate::inference::Method;

pub const PAPER_TABLES_JSON: &str = include_str!("../fixtures/paper_tables.json");

#[derive(Debug, Clone, Deserialize)]
pub struct PaperTables {
    pub coverage_tolerance: f64,
    pub length_rel_tolerance: f64,
    pub table1: Table1,
    pub table2: Table2,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Table1 {
    pub innovations: Vec<String>,
    pub sample_sizes: Vec<usize>,
    /// coverage[innovation][sample_size]
    pub coverage: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Table2 {
    pub n: usize,
    pub innovations: Vec<String>,
    pub methods: Vec<String>,
    /// coverage[innovation][method]
    pub coverage: Vec<Vec<f64>>,
    /// length[innovation][method]
    pub length: Vec<Vec<f64>>,
    pub length_excluded_cells: Vec<ExcludedCell>,
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
pub struct ExcludedCell {
    pub innovation: String,
    pub method: String,
}

impl PaperTables {
    pub fn load() -> Self {
        serde_json::from_str(PAPER_TABLES_JSON).expect("embedded fixture parses")
    }
}

impl Table2 {
    pub fn is_length_excluded(&self, innovation: &str, method: &str) -> bool {
        self.length_excluded_cells
            .iter()
            .any(|c| c.innovation == innovation && c.method == method)
    }
}

/// The innovation grid shared by both tables.
pub fn table_innovations() -> Vec<InnovationSpec> {
    vec![
        InnovationSpec::Normal,
        InnovationSpec::student_t(8.0).expect("valid"),
        InnovationSpec::student_t(6.0).expect("valid"),
        InnovationSpec::pareto(8.0, 1.0).expect("valid"),
        InnovationSpec::pareto(6.0, 1.0).expect("valid"),
    ]
}

/// The method grid of the second table.
pub fn table2_methods() -> Vec<Method> {
    vec![
        Method::Asclt,
        Method::StableResample { p: 1.8 },
        Method::StableResample { p: 1.65 },
        Method::StableResample { p: 1.5 },
        Method::StableResample { p: 1.35 },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_parses_and_is_consistent() {
        let t = PaperTables::load();
        assert_eq!(t.table1.innovations.len(), 5);
        assert_eq!(t.table1.sample_sizes, vec![100, 300, 500, 1000, 1500]);
        assert_eq!(t.table1.coverage.len(), 5);
        assert!(t.table1.coverage.iter().all(|row| row.len() == 5));
        assert_eq!(t.table2.methods.len(), 5);
        assert_eq!(t.table2.coverage.len(), 5);
        assert_eq!(t.table2.length.len(), 5);
        assert_eq!(t.table2.n, 600);
        assert!(t.table2.is_length_excluded("pareto(6,1)", "stable(p=1.65)"));
        assert!(!t.table2.is_length_excluded("normal", "asclt"));
        // labels in the fixture match the labels the code generates
        let labels: Vec<String> = table_innovations().iter().map(|s| s.label()).collect();
        assert_eq!(labels, t.table1.innovations);
        assert_eq!(labels, t.table2.innovations);
        let methods: Vec<String> = table2_methods().iter().map(|m| m.label()).collect();
        assert_eq!(methods, t.table2.methods);
    }
}
