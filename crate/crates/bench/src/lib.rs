//! Fixtures shared by the benchmarks.

use fkdet_core::catalog;
use fkdet_core::{BigRational, ExactElement, FloatElement};

pub fn free_exact(d: usize) -> ExactElement {
    catalog::free_operator_exact(d).expect("d ≥ 3").element
}

pub fn wirtinger_float(t: f64) -> FloatElement {
    let t = BigRational::from_float(t).expect("finite t");
    let spec = catalog::wirtinger_group().expect("bundled representation");
    catalog::fig8_wirtinger(&t, spec).expect("t > 0").element
}
