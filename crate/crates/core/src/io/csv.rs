use std::io::{self, BufRead, Write};

use crate::diagnostics::{DiagnosticsRecord, CSV_COLUMNS, N_COLUMNS};

/// Schema version of the diagnostics CSV; bump when columns change.
pub const DIAGNOSTICS_SCHEMA_VERSION: u32 = 1;

/// C `%.17g` formatting: 17 significant digits, trailing zeros removed, exponent form
/// outside [1e-4, 1e17).
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
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-4..17).contains(&exp) {
        let fixed = format!("{:.*}", (16 - exp) as usize, x);
        strip_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", strip_zeros(mant), sign, exp.abs())
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn diagnostics_header() -> String {
    CSV_COLUMNS.join(",")
}

pub fn diagnostics_row(r: &DiagnosticsRecord) -> String {
    r.values().iter().map(|v| fmt_g17(*v)).collect::<Vec<_>>().join(",")
}

pub fn write_diagnostics<W: Write + ?Sized>(out: &mut W, records: &[DiagnosticsRecord]) -> io::Result<()> {
    out.write_all(diagnostics_header().as_bytes())?;
    out.write_all(b"\n")?;
    for r in records {
        out.write_all(diagnostics_row(r).as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Parses a diagnostics CSV written by `write_diagnostics`.
pub fn read_diagnostics<R: BufRead>(input: R) -> io::Result<Vec<DiagnosticsRecord>> {
    let bad = |m: String| io::Error::new(io::ErrorKind::InvalidData, m);
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| bad("empty file".into()))??;
    if header != diagnostics_header() {
        return Err(bad(format!("unexpected header: {header}")));
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let vals: Vec<f64> = line
            .split(',')
            .map(|f| f.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(format!("row {}: {e}", i + 1)))?;
        let arr: [f64; N_COLUMNS] = vals.try_into().map_err(|_| bad(format!("row {}: wrong column count", i + 1)))?;
        out.push(DiagnosticsRecord::from_values(&arr));
    }
    Ok(out)
}

pub fn write_symbol<W: Write + ?Sized>(out: &mut W, rows: impl IntoIterator<Item = (f64, f64)>) -> io::Result<()> {
    out.write_all(b"kappa,sigma\n")?;
    for (k, s) in rows {
        writeln!(out, "{},{}", fmt_g17(k), fmt_g17(s))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g17() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (0.1, "0.10000000000000001"),
            (1.0 / 3.0, "0.33333333333333331"),
            (123456.0, "123456"),
            (1e17, "1e+17"),
            (1e16, "10000000000000000"),
            (1.5e-5, "1.5e-05"),
            (1e-4, "0.0001"),
            (std::f64::consts::TAU, "6.2831853071795862"),
            (1e300, "1.0000000000000001e+300"),
            (5e-324, "4.9406564584124654e-324"),
            (f64::INFINITY, "inf"),
            (f64::NAN, "nan"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g17(x), want, "{x:e}");
        }
    }

    #[test]
    fn parse_round_trips_exactly() {
        for &x in &[0.1, 1.0 / 7.0, 2.0f64.sqrt() * 1e-9, 12345.678e20, -3.0e-300] {
            assert_eq!(fmt_g17(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn diagnostics_round_trip() {
        let mut r = DiagnosticsRecord::default();
        r.t = 0.25;
        r.energy_u = 1.0 / 3.0;
        r.lp_j.inf = 7.5e-8;
        r.tail_ratio = 1e-20;
        let mut buf = Vec::new();
        write_diagnostics(&mut buf, &[r, r]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,energy_u,energy_b,diss_u_cum,diss_b_cum,enstrophy,current_sq,grad_j_cum,lp_omega_2,lp_omega_4,lp_omega_8,lp_omega_inf,lp_j_2,"));
        assert!(!text.contains('\r'));
        let back = read_diagnostics(&buf[..]).unwrap();
        assert_eq!(back, vec![r, r]);
    }

    #[test]
    fn header_only() {
        let mut buf = Vec::new();
        write_diagnostics(&mut buf, &[]).unwrap();
        assert_eq!(buf.iter().filter(|&&c| c == b'\n').count(), 1);
        assert!(read_diagnostics(&buf[..]).unwrap().is_empty());
    }
}
