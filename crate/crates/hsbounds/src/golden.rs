//! Published reference values for the bound tables, at their printed precision
//! (three significant figures for K⁺ and the ratios).

use crate::bounds::BoundKind;
use crate::error::Result;
use crate::kernels::BoundQuery;
use num_rational::Ratio;

/// Table rows use n = d/2 + gap with these gaps (numerator, denominator).
pub const TABLE1_GAPS: [(i64, i64); 13] = [
    (1, 10_000),
    (1, 100),
    (1, 10),
    (1, 4),
    (1, 2),
    (1, 1),
    (3, 2),
    (3, 1),
    (6, 1),
    (15, 1),
    (30, 1),
    (60, 1),
    (120, 1),
];

/// Display labels of the first three columns; the rest print n itself.
pub const TABLE1_SMALL_GAP_LABELS: [&str; 3] = ["+1e-4", "+1e-2", "+1e-1"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Row {
    pub d: u32,
    pub k_plus: [f64; 13],
    pub ratio: [f64; 13],
    pub tags: [BoundKind; 13],
}

use BoundKind::{LowerBessel as B, LowerBesselBb as BB, LowerFourier as F, LowerFourierFf as FF};

pub const TABLE1: [Table1Row; 4] = [
    Table1Row {
        d: 1,
        k_plus: [56.5, 5.69, 1.90, 1.30, 1.00, 0.852, 0.814, 0.834, 1.07, 3.09, 22.4, 1410.0, 6.63e6],
        ratio: [0.816, 0.818, 0.824, 0.834, 0.842, 0.810, 0.777, 0.766, 0.787, 0.794, 0.794, 0.789, 0.791],
        tags: [BB, BB, BB, B, B, B, B, F, F, F, F, FF, FF],
    },
    Table1Row {
        d: 2,
        k_plus: [39.9, 3.99, 1.27, 0.798, 0.565, 0.428, 0.378, 0.332, 0.361, 0.831, 5.08, 269.0, 1.07e6],
        ratio: [0.816, 0.817, 0.826, 0.844, 0.865, 0.842, 0.811, 0.752, 0.772, 0.788, 0.794, 0.786, 0.789],
        tags: [BB, BB, BB, B, B, B, B, F, F, F, F, FF, FF],
    },
    Table1Row {
        d: 3,
        k_plus: [22.6, 2.25, 0.692, 0.421, 0.283, 0.198, 0.164, 0.128, 0.120, 0.223, 1.15, 51.2, 1.71e5],
        ratio: [0.816, 0.817, 0.826, 0.847, 0.875, 0.858, 0.830, 0.763, 0.759, 0.781, 0.788, 0.782, 0.787],
        tags: [BB, BB, BB, B, B, B, B, B, F, F, F, FF, FF],
    },
    Table1Row {
        d: 4,
        k_plus: [11.3, 1.12, 0.340, 0.202, 0.130, 0.0857, 0.0678, 0.0473, 0.0389, 0.0590, 0.259, 9.72, 2.73e4],
        ratio: [0.816, 0.817, 0.826, 0.849, 0.880, 0.867, 0.842, 0.779, 0.750, 0.775, 0.785, 0.778, 0.785],
        tags: [BB, BB, BB, B, B, B, B, B, F, F, F, FF, FF],
    },
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table2Entry {
    pub d: u32,
    pub z_d: f64,
    pub theta_d: f64,
}

pub const TABLE2: [Table2Entry; 10] = [
    Table2Entry { d: 1, z_d: 0.0, theta_d: 1.041 },
    Table2Entry { d: 2, z_d: 0.00925, theta_d: 1.039 },
    Table2Entry { d: 3, z_d: 0.0458, theta_d: 1.044 },
    Table2Entry { d: 4, z_d: 0.0782, theta_d: 1.044 },
    Table2Entry { d: 5, z_d: 0.105, theta_d: 1.044 },
    Table2Entry { d: 6, z_d: 0.122, theta_d: 1.044 },
    Table2Entry { d: 7, z_d: 0.128, theta_d: 1.049 },
    Table2Entry { d: 8, z_d: 0.125, theta_d: 1.105 },
    Table2Entry { d: 9, z_d: 0.115, theta_d: 1.197 },
    Table2Entry { d: 10, z_d: 0.102, theta_d: 1.363 },
];

pub fn table1_row(d: u32) -> Option<&'static Table1Row> {
    TABLE1.iter().find(|r| r.d == d)
}

pub fn table2_entry(d: u32) -> Option<&'static Table2Entry> {
    TABLE2.iter().find(|r| r.d == d)
}

/// Exact n = d/2 + gap for column `col` of a table row.
pub fn table1_n(d: u32, col: usize) -> Ratio<i64> {
    let (a, b) = TABLE1_GAPS[col];
    Ratio::new(d as i64, 2) + Ratio::new(a, b)
}

pub fn table1_queries(d: u32) -> Result<Vec<BoundQuery>> {
    (0..TABLE1_GAPS.len()).map(|c| BoundQuery::from_ratio(table1_n(d, c), d)).collect()
}

/// Column label as printed: "d/2+1e-4" style for the tiny gaps, n otherwise.
pub fn table1_label(d: u32, col: usize) -> String {
    let half = Ratio::new(d as i64, 2);
    if col < TABLE1_SMALL_GAP_LABELS.len() {
        format!("{half}{}", TABLE1_SMALL_GAP_LABELS[col])
    } else {
        table1_n(d, col).to_string()
    }
}

/// One unit in the third significant figure of `x`.
pub fn third_figure_unit(x: f64) -> f64 {
    10f64.powf(x.abs().log10().floor() - 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_and_queries() {
        assert_eq!(table1_label(2, 0), "1+1e-4");
        assert_eq!(table1_label(1, 12), "241/2");
        assert_eq!(table1_label(3, 3), "7/4");
        let qs = table1_queries(4).unwrap();
        assert_eq!(qs[8].integer_n(), Some(8));
        assert_eq!(qs[4].half_integer_gap(), Some(0));
    }

    #[test]
    fn units() {
        assert!((third_figure_unit(0.428) - 0.001).abs() < 1e-15);
        assert!((third_figure_unit(56.5) - 0.1).abs() < 1e-13);
        assert!((third_figure_unit(6.63e6) - 1e4).abs() < 1e-6);
        assert!((third_figure_unit(0.0857) - 1e-4).abs() < 1e-17);
    }
}
