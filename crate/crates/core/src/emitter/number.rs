/// `%g`-style formatting with `precision` significant digits: fixed notation
/// for decimal exponents in `[-4, precision)`, otherwise `d.ddde±XX`.
/// Trailing zeros are dropped and negative zero prints as `0`. Infinities
/// print as `inf`/`-inf`.
pub fn format_number(v: f64, precision: u8) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if v.is_nan() {
        return "nan".to_string();
    }
    let p = precision.max(1) as usize;
    let sci = format!("{:.*e}", p - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_and_scientific() {
        assert_eq!(format_number(1.0, 12), "1");
        assert_eq!(format_number(-2.5, 12), "-2.5");
        assert_eq!(format_number(-0.0, 12), "0");
        assert_eq!(format_number(0.1, 12), "0.1");
        assert_eq!(format_number(1.0 / 3.0, 6), "0.333333");
        assert_eq!(format_number(123456789.0, 6), "1.23457e+08");
        assert_eq!(format_number(0.00001234, 6), "1.234e-05");
        assert_eq!(format_number(0.0001234, 6), "0.0001234");
        assert_eq!(format_number(f64::NEG_INFINITY, 12), "-inf");
    }

    #[test]
    fn rounding_carries_into_the_exponent() {
        assert_eq!(format_number(999999.7, 6), "1e+06");
        assert_eq!(format_number(9.9999999, 6), "10");
    }

    #[test]
    fn parses_back_within_precision() {
        let mut x = 0.123_456_789_012_345_67_f64;
        for _ in 0..40 {
            for p in 6..=17u8 {
                let s = format_number(x, p);
                let back: f64 = s.parse().unwrap();
                let tol = 10f64.powi(1 - p as i32) * x.abs();
                assert!((back - x).abs() <= tol, "{x} at {p}: {s}");
            }
            x *= -7.3;
        }
        let s = format_number(std::f64::consts::PI, 17);
        assert_eq!(s.parse::<f64>().unwrap(), std::f64::consts::PI);
    }
}
