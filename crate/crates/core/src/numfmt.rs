/// Format `x` with 9 significant digits, like C's `%.9g`.
///
/// Used for every number written to PLY (ASCII) and Turtle output so the
/// text artifacts are byte-deterministic.
pub fn sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { format!("{x}") };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();

    let body = if (-7..=15).contains(&exp) {
        let mut s = if exp >= 8 {
            let mut s = digits.clone();
            s.extend(std::iter::repeat_n('0', (exp - 8) as usize));
            s
        } else if exp >= 0 {
            let split = (exp + 1) as usize;
            format!("{}.{}", &digits[..split], &digits[split..])
        } else {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        };
        if s.contains('.') {
            while s.ends_with('0') {
                s.pop();
            }
            if s.ends_with('.') {
                s.pop();
            }
        }
        s
    } else {
        let mut m = format!("{}.{}", &digits[..1], &digits[1..]);
        while m.ends_with('0') {
            m.pop();
        }
        if m.ends_with('.') {
            m.pop();
        }
        format!("{m}e{exp}")
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

/// [`sig9`] when that reads back as exactly `x`, otherwise the shortest
/// representation that does. Graph literals use this so that values with at
/// most nine significant digits look the same as in PLY output while every
/// value survives a write/read cycle unchanged.
pub fn sig9_exact(x: f64) -> String {
    let s = sig9(x);
    if s.parse::<f64>().ok() == Some(x) || !x.is_finite() {
        s
    } else {
        format!("{x:?}")
    }
}

#[cfg(test)]
mod tests {
    use super::{sig9, sig9_exact};
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(sig9(3.0), "3");
        assert_eq!(sig9(0.1), "0.1");
        assert_eq!(sig9(2.064), "2.064");
        assert_eq!(sig9(-0.25), "-0.25");
        assert_eq!(sig9(12345.6789012), "12345.6789");
        assert_eq!(sig9(1e20), "1e20");
        assert_eq!(sig9(1.5e-9), "1.5e-9");
        assert_eq!(sig9(0.000123), "0.000123");
        assert_eq!(sig9(100.0), "100");
        assert_eq!(sig9(123456789012.0), "123456789000");
        assert_eq!(sig9(-0.0), "0");
    }

    #[test]
    fn exact_fallback() {
        assert_eq!(sig9_exact(3.0), "3");
        assert_eq!(sig9_exact(2.064), "2.064");
        assert_eq!(sig9_exact(0.1 + 0.2), "0.30000000000000004");
        assert_eq!(sig9_exact(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    proptest! {
        #[test]
        fn exact_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            prop_assert_eq!(sig9_exact(x).parse::<f64>().unwrap(), x);
        }

        #[test]
        fn nine_digit_precision(x in -1e6f64..1e6) {
            let back: f64 = sig9(x).parse().unwrap();
            prop_assert!((back - x).abs() <= 5e-9 * x.abs().max(1e-300));
        }

        #[test]
        fn idempotent(x in -1e6f64..1e6) {
            let once = sig9(x);
            let twice = sig9(once.parse().unwrap());
            prop_assert_eq!(once, twice);
        }
    }
}
