//! Deterministic numeric formatting and a minimal JSON emitter.
//!
//! Results print with 12 significant digits, density matrices and Bloch
//! forms with 16; formatting is locale-independent with `.` as the decimal
//! separator, so identical runs diff clean.

use std::fmt::Write as _;

/// Significant digits for correlation results, audit fields, and CSV data.
pub const RESULT_DIGITS: usize = 12;
/// Significant digits for density matrices and Bloch forms.
pub const STATE_DIGITS: usize = 16;

/// Formats `x` with `sig` significant digits, trimming trailing zeros;
/// switches to scientific notation outside `1e-4 ..= 1e{sig}` the way
/// `%.{sig}g` does.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    debug_assert!(sig >= 1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let formatted = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = formatted
        .split_once('e')
        .expect("exponent formatting always contains 'e'");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();

    if exp < -4 || exp >= sig as i32 {
        let trimmed = trim_trailing_zeros(&digits);
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        out.push_str(&trimmed[..1]);
        if trimmed.len() > 1 {
            out.push('.');
            out.push_str(&trimmed[1..]);
        }
        let _ = write!(out, "e{exp}");
        return out;
    }

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if exp >= 0 {
        let int_len = (exp + 1) as usize;
        out.push_str(&digits[..int_len]);
        let frac = trim_trailing_zeros(&digits[int_len..]);
        if !frac.is_empty() {
            out.push('.');
            out.push_str(&frac);
        }
    } else {
        out.push_str("0.");
        for _ in 0..(-exp - 1) {
            out.push('0');
        }
        out.push_str(&trim_trailing_zeros(&digits));
    }
    out
}

fn trim_trailing_zeros(digits: &str) -> String {
    digits.trim_end_matches('0').to_string()
}

/// A JSON document with deterministic key order and raw pre-formatted
/// numbers (so digit counts stay under our control, not the serializer's).
#[derive(Debug, Clone)]
pub enum Json {
    /// A number already rendered to its final digits.
    Num(String),
    /// Boolean literal.
    Bool(bool),
    /// String value.
    Str(String),
    /// Ordered array.
    Arr(Vec<Json>),
    /// Object with keys emitted in insertion order.
    Obj(Vec<(&'static str, Json)>),
}

impl Json {
    /// Number with [`RESULT_DIGITS`] significant digits.
    pub fn num(x: f64) -> Self {
        Json::Num(fmt_sig(x, RESULT_DIGITS))
    }

    /// Number with [`STATE_DIGITS`] significant digits.
    pub fn state_num(x: f64) -> Self {
        Json::Num(fmt_sig(x, STATE_DIGITS))
    }

    /// Integer value.
    pub fn int(x: usize) -> Self {
        Json::Num(x.to_string())
    }

    /// Array of result-precision numbers.
    pub fn num_array(values: impl IntoIterator<Item = f64>) -> Self {
        Json::Arr(values.into_iter().map(Json::num).collect())
    }

    /// Array of state-precision numbers.
    pub fn state_array(values: impl IntoIterator<Item = f64>) -> Self {
        Json::Arr(values.into_iter().map(Json::state_num).collect())
    }

    /// Renders with two-space indentation and a trailing newline.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Json::Num(s) => out.push_str(s),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Str(s) => {
                out.push('"');
                for c in s.chars() {
                    match c {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        '\t' => out.push_str("\\t"),
                        '\r' => out.push_str("\\r"),
                        c if (c as u32) < 0x20 => {
                            let _ = write!(out, "\\u{:04x}", c as u32);
                        }
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Json::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                // Arrays of scalars stay on one line; nested structures
                // get one element per line.
                let scalar_items = items
                    .iter()
                    .all(|i| !matches!(i, Json::Arr(_) | Json::Obj(_)));
                if scalar_items {
                    out.push('[');
                    for (k, item) in items.iter().enumerate() {
                        if k > 0 {
                            out.push_str(", ");
                        }
                        item.write(out, indent);
                    }
                    out.push(']');
                } else {
                    out.push_str("[\n");
                    for (k, item) in items.iter().enumerate() {
                        push_indent(out, indent + 1);
                        item.write(out, indent + 1);
                        if k + 1 < items.len() {
                            out.push(',');
                        }
                        out.push('\n');
                    }
                    push_indent(out, indent);
                    out.push(']');
                }
            }
            Json::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push_str("{\n");
                for (k, (key, value)) in fields.iter().enumerate() {
                    push_indent(out, indent + 1);
                    let _ = write!(out, "\"{key}\": ");
                    value.write(out, indent + 1);
                    if k + 1 < fields.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                push_indent(out, indent);
                out.push('}');
            }
        }
    }
}

fn push_indent(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}
