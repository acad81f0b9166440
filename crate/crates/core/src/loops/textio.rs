//! Line-oriented coefficient dump: `degree re11 im11 re12 im12 re21 im21 re22 im22`.
//! Lines starting with `#` and blank lines are ignored.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::{LoopMatrix, Mat2};
use crate::error::{Error, Result};

pub fn write_loop<W: Write>(out: &mut W, l: &LoopMatrix) -> Result<()> {
    for (n, c) in l.terms() {
        write!(out, "{n}")?;
        for z in c.entries() {
            // `{:e}` prints the shortest representation that round-trips exactly.
            write!(out, " {:e} {:e}", z.re, z.im)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn read_loop<R: BufRead>(input: R) -> Result<LoopMatrix> {
    let mut terms = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line: idx + 1, message };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 9 {
            return Err(parse_err(format!("expected 9 fields, found {}", fields.len())));
        }
        let deg: i32 = fields[0].parse().map_err(|e| parse_err(format!("degree: {e}")))?;
        let mut vals = [0.0f64; 8];
        for (k, f) in fields[1..].iter().enumerate() {
            vals[k] = f.parse().map_err(|e| parse_err(format!("field {}: {e}", k + 2)))?;
        }
        let z = |k: usize| Complex64::new(vals[2 * k], vals[2 * k + 1]);
        terms.push((deg, Mat2::new(z(0), z(1), z(2), z(3))));
    }
    Ok(LoopMatrix::from_terms(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn dump_round_trip(vals in proptest::collection::vec(-1e3..1e3f64, 8..=8), lo in -5..5i32) {
            let z = |k: usize| Complex64::new(vals[2 * k], vals[2 * k + 1]);
            let l = LoopMatrix::from_terms(&[(lo, Mat2::new(z(0), z(1), z(2), z(3))), (lo + 2, Mat2::identity())]);
            let mut buf = Vec::new();
            write_loop(&mut buf, &l).unwrap();
            let back = read_loop(buf.as_slice()).unwrap();
            prop_assert!(back.max_coeff_distance(&l) <= 1e-15 * (1.0 + l.l1_norm()));
        }
    }

    #[test]
    fn rejects_short_lines() {
        let err = read_loop("# header\n0 1 0 0 0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
