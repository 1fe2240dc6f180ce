//! Interval bounds with cited derivations for the thickness index T, the
//! thinness index t, and the averaged indices μ₁/μ₂ of classical Banach
//! spaces, together with finite-dimensional models, witness families, and
//! sphere min-max oracles that reproduce the quantitative behaviour of those
//! indices at finite stage.

pub mod dsl;
pub mod engine;
pub mod experiments;
pub mod models;
pub mod oracle;
pub(crate) mod pnum;

/// Formats a float with 12 significant digits, the precision every numeric
/// report uses.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    format!("{:.*}", decimals, x)
}

#[cfg(test)]
mod format_tests {
    use super::format_sig12;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_sig12(2.0f64.sqrt()), "1.41421356237");
        assert_eq!(format_sig12(65536.0), "65536.0000000");
        assert_eq!(format_sig12(0.001), "0.00100000000000");
        assert_eq!(format_sig12(0.0), "0");
        assert_eq!(format_sig12(-1.5), "-1.50000000000");
    }
}
