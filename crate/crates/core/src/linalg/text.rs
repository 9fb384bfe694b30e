//! Plain-text matrix format.
//!
//! ```text
//! 2 2
//! 1.0+0.0i 0.5-2.0i
//! 0.0+0.0i 1e-300-0.0i
//! ```
//!
//! The header holds `rows cols`; entries follow in row-major order as
//! `re±imi` tokens separated by any whitespace. Writers emit one row per
//! line using the shortest representation that parses back to the same
//! bits, so `parse_matrix(&format_matrix(m))` is bit-identical.

use num_complex::Complex64;

use super::{CMatrix, LinalgError};

pub fn format_scalar(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:?}{}{:?}i", z.re, sign, z.im.abs())
}

pub fn format_matrix(m: &CMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| format_scalar(m.get(i, j))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn parse_err(msg: impl Into<String>) -> LinalgError {
    LinalgError::Parse(msg.into())
}

pub fn parse_scalar(token: &str) -> Result<Complex64, LinalgError> {
    let body = token
        .strip_suffix('i')
        .ok_or_else(|| parse_err(format!("token `{token}` does not end in `i`")))?;
    // The split point is the last sign that is neither leading nor part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'))
        .ok_or_else(|| parse_err(format!("token `{token}` has no imaginary part")))?;
    let re: f64 = body[..split]
        .parse()
        .map_err(|_| parse_err(format!("bad real part in `{token}`")))?;
    let im_str = &body[split..];
    let im: f64 = im_str
        .strip_prefix('+')
        .unwrap_or(im_str)
        .parse()
        .map_err(|_| parse_err(format!("bad imaginary part in `{token}`")))?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(parse_err(format!("non-finite entry `{token}`")));
    }
    Ok(Complex64::new(re, im))
}

pub fn parse_matrix(text: &str) -> Result<CMatrix, LinalgError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| parse_err("missing header"))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(format!("bad header `{header}`"))))
        .collect::<Result<_, _>>()?;
    let [rows, cols] = dims[..] else {
        return Err(parse_err(format!("header must be `rows cols`, got `{header}`")));
    };
    let entries: Vec<Complex64> = lines
        .flat_map(str::split_whitespace)
        .map(parse_scalar)
        .collect::<Result<_, _>>()?;
    CMatrix::new(rows, cols, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_signs_and_exponents() {
        assert_eq!(parse_scalar("1.5-2i").unwrap(), Complex64::new(1.5, -2.0));
        assert_eq!(parse_scalar("-1e-5+3E+2i").unwrap(), Complex64::new(-1e-5, 300.0));
        assert_eq!(parse_scalar("0-0.0i").unwrap().im.to_bits(), (-0.0f64).to_bits());
        assert!(parse_scalar("1.0").is_err());
        assert!(parse_scalar("inf+0i").is_err());
    }

    #[test]
    fn rejects_wrong_entry_count() {
        assert!(matches!(
            parse_matrix("2 2\n1+0i 2+0i 3+0i\n"),
            Err(LinalgError::EntryCount { expected: 4, found: 3 })
        ));
        assert!(parse_matrix("2\n1+0i\n").is_err());
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![
            any::<f64>().prop_filter("finite", |x| x.is_finite()),
            Just(-0.0),
            Just(f64::MIN_POSITIVE / 4.0),
        ]
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_identical(
            rows in 1usize..4,
            cols in 1usize..4,
            parts in proptest::collection::vec((finite(), finite()), 16),
        ) {
            let entries: Vec<Complex64> = parts
                .iter()
                .take(rows * cols)
                .map(|&(re, im)| Complex64::new(re, im))
                .collect();
            let m = CMatrix::new(rows, cols, entries.clone()).unwrap();
            let back = parse_matrix(&format_matrix(&m)).unwrap();
            prop_assert_eq!(back.shape(), (rows, cols));
            for (a, b) in entries.iter().zip(back.entries_row_major()) {
                prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
                prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
            }
        }
    }
}
