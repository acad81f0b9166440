//! Complex literals: `2`, `-1.5`, `i`, `-3i`, `2-i`, `1e-3+2.5i` (`j` is accepted for `i`).

use num_complex::Complex64;

pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    let bad = || format!("invalid complex literal {s:?}");
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split before the last sign that is not leading and not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| {
        (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E')
    });
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re.is_empty() { 0.0 } else { re.parse::<f64>().map_err(|_| bad())? };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(parse_complex("1").unwrap(), c(1.0, 0.0));
        assert_eq!(parse_complex("-2.5").unwrap(), c(-2.5, 0.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("2-i").unwrap(), c(2.0, -1.0));
        assert_eq!(parse_complex("2 - 1i").unwrap(), c(2.0, -1.0));
        assert_eq!(parse_complex("1e-3+2.5j").unwrap(), c(1e-3, 2.5));
        assert_eq!(parse_complex("-3i").unwrap(), c(0.0, -3.0));
        assert_eq!(parse_complex("1.5e+2-2e-1i").unwrap(), c(150.0, -0.2));
        for s in ["", "x", "1+", "2ii", "1+2"] {
            assert!(parse_complex(s).is_err(), "{s}");
        }
    }
}
