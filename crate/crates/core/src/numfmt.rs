//! Fixed-precision real formatting for the JSON writers. Every real in an
//! output file is printed with six decimal places so identical runs produce
//! identical bytes.

/// Format with exactly six decimals; negative zero collapses to zero.
pub(crate) fn fmt_real(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.6}")
}
