//! Field serialization: CSV (one row per grid row) and a raw binary dump.

use std::io::{Read, Write};

use crate::grid::{Bc, Dim, Field, Grid};
use crate::{Error, Result};

/// Formats like C's `%.17g`: 17 significant digits, fixed or scientific
/// notation by magnitude, trailing zeros trimmed. 17 digits round-trip f64.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }

    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("numeric exponent");

    if exp < -4 || exp >= 17 {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        // %.*g with precision 17: 16 - exp decimals in fixed notation
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x))
    }
}

fn trim_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    let t = s.trim_end_matches('0');
    t.trim_end_matches('.').to_string()
}

/// Writes one CSV row per grid row, `%.17g` values, comma-separated.
pub fn write_field_csv<W: Write>(f: &Field, mut w: W) -> Result<()> {
    let [nx, ny] = f.grid().n();
    for j in 0..ny {
        let mut row = String::new();
        for i in 0..nx {
            if i > 0 {
                row.push(',');
            }
            row.push_str(&fmt_g17(f.get(i, j)));
        }
        row.push('\n');
        w.write_all(row.as_bytes())?;
    }
    Ok(())
}

const MAGIC: &[u8; 8] = b"DGCHFLD\0";

/// Binary layout: magic, u32 dim, then per axis u64 n and f64 length,
/// u8 bc tag (0 periodic, 1 neumann), then row-major little-endian f64
/// values.
pub fn write_field_binary<W: Write>(f: &Field, mut w: W) -> Result<()> {
    let g = f.grid();
    let dim = match g.dim() {
        Dim::One => 1u32,
        Dim::Two => 2u32,
    };
    w.write_all(MAGIC)?;
    w.write_all(&dim.to_le_bytes())?;
    for a in 0..dim as usize {
        w.write_all(&(g.n()[a] as u64).to_le_bytes())?;
    }
    for a in 0..dim as usize {
        w.write_all(&g.length()[a].to_le_bytes())?;
    }
    let bc = match g.bc() {
        Bc::Periodic => 0u8,
        Bc::Neumann => 1u8,
    };
    w.write_all(&[bc])?;
    for v in f.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_field_binary<R: Read>(mut r: R) -> Result<Field> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Config("not a field dump (bad magic)".into()));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let dim = u32::from_le_bytes(b4);
    if dim != 1 && dim != 2 {
        return Err(Error::Config(format!("unsupported dimension {dim}")));
    }
    let mut n = [1usize; 2];
    let mut b8 = [0u8; 8];
    for a in 0..dim as usize {
        r.read_exact(&mut b8)?;
        n[a] = u64::from_le_bytes(b8) as usize;
    }
    let mut length = [1.0f64; 2];
    for a in 0..dim as usize {
        r.read_exact(&mut b8)?;
        length[a] = f64::from_le_bytes(b8);
    }
    let mut b1 = [0u8; 1];
    r.read_exact(&mut b1)?;
    let bc = match b1[0] {
        0 => Bc::Periodic,
        1 => Bc::Neumann,
        t => return Err(Error::Config(format!("unknown bc tag {t}"))),
    };
    let grid = match dim {
        1 => Grid::new_1d(n[0], length[0], bc)?,
        _ => Grid::new_2d(n, length, bc)?,
    };
    let mut values = vec![0.0f64; grid.total_cells()];
    for v in values.iter_mut() {
        r.read_exact(&mut b8)?;
        *v = f64::from_le_bytes(b8);
    }
    Field::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_format() {
        assert_eq!(fmt_g17(0.0), "0");
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(-2.5), "-2.5");
        assert_eq!(fmt_g17(7.62939453125e-6), "7.62939453125e-06");
        assert_eq!(fmt_g17(0.0001), "0.0001");
        assert_eq!(fmt_g17(1e20), "1e+20");
        assert_eq!(fmt_g17(f64::INFINITY), "inf");
    }

    #[test]
    fn g17_round_trips() {
        let vals = [
            std::f64::consts::PI,
            1.0 / 3.0,
            -4.2e-13,
            6.02214076e23,
            f64::MIN_POSITIVE,
            -0.1,
        ];
        for &v in &vals {
            let s = fmt_g17(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, v, "{s}");
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            /// 17 significant digits round-trip any finite double exactly.
            #[test]
            fn g17_round_trips_any_finite(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
                let back: f64 = fmt_g17(x).parse().unwrap();
                prop_assert_eq!(back, x);
            }
        }
    }

    #[test]
    fn binary_round_trip() {
        let g = Grid::new_2d([5, 4], [1.0, 0.5], Bc::Neumann).unwrap();
        let f = Field::from_fn(g, |x| x[0] * 2.0 - x[1]).unwrap();
        let mut buf = Vec::new();
        write_field_binary(&f, &mut buf).unwrap();
        let back = read_field_binary(buf.as_slice()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn csv_shape() {
        let g = Grid::new_2d([4, 6], [1.0, 1.0], Bc::Periodic).unwrap();
        let f = Field::constant(g, 1.5);
        let mut buf = Vec::new();
        write_field_csv(&f, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 6);
        assert!(lines.iter().all(|l| l.split(',').count() == 4));
        assert_eq!(lines[0], "1.5,1.5,1.5,1.5");
    }
}
