//! Float formatting shared by the CSV and JSON writers.

/// `v` with 12 significant digits in scientific notation.
pub fn sig12(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.11e}")
    } else {
        v.to_string()
    }
}
