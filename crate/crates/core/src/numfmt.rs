//! Fixed-precision number formatting for reproducible output files.

use serde_json::Value;

/// Significant digits kept in every emitted floating-point number.
pub const SIGNIFICANT_DIGITS: usize = 9;

/// Rounds `x` to nine significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// JSON number rounded to nine significant digits; non-finite values become
/// the strings `"inf"`, `"-inf"` or `"nan"`.
pub fn num(x: f64) -> Value {
    if x.is_nan() {
        Value::String("nan".into())
    } else if x.is_infinite() {
        Value::String(if x > 0.0 { "inf" } else { "-inf" }.into())
    } else {
        serde_json::Number::from_f64(round_sig(x))
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }
}

/// CSV cell text for a float, rounded to nine significant digits.
pub fn cell(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{}", round_sig(x))
}

/// JSON value to text with a trailing newline.
pub fn to_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_digits() {
        assert_eq!(round_sig(0.468_995_593_589_281_2), 0.468_995_594);
        assert_eq!(round_sig(-1_234.567_891_23), -1_234.567_89);
        assert_eq!(cell(1.0), "1");
        assert_eq!(cell(f64::INFINITY), "inf");
        assert_eq!(num(f64::NEG_INFINITY), Value::String("-inf".into()));
    }
}
