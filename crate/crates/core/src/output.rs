//! Text formatting shared by the CSV writers.

/// 17 significant digits, scientific notation, `.` decimal separator.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
