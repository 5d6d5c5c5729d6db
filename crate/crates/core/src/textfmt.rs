//! Locale-free number formatting for the text and CSV outputs.

/// Formats `x` with six significant digits, `%g` style.
///
/// Fixed notation is used for decimal exponents in `[-4, 6)`, scientific
/// otherwise; trailing zeros are removed.
pub fn sig6(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // Rounding first fixes the exponent, e.g. 9.999996 -> 1.00000e1.
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

/// Shortest representation that parses back to the identical `f64`.
pub fn exact(x: f64) -> String {
    format!("{x:?}")
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(1.0), "1");
        assert_eq!(sig6(0.912345678), "0.912346");
        assert_eq!(sig6(-123.4567), "-123.457");
        assert_eq!(sig6(9.9999996), "10");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(1234567.0), "1.23457e6");
        assert_eq!(sig6(0.0000123456789), "1.23457e-5");
        assert_eq!(sig6(0.000123456789), "0.000123457");
    }

    #[test]
    fn sig6_is_stable_under_reparse() {
        for v in [0.1, 2.0 / 3.0, -7.25e-9, 3.14159265e12, 0.5] {
            let s = sig6(v);
            assert_eq!(sig6(s.parse().unwrap()), s);
        }
    }

    #[test]
    fn exact_round_trips() {
        for v in [0.1 + 0.2, 1.0 / 3.0, 1e-300, -2.5] {
            assert_eq!(exact(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }
}
