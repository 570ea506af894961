//! Output envelopes and number formatting shared by every subcommand.

use std::io::Write;

use anyhow::Result;
use ndeb_core::C64;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1";
const SIG_DIGITS: i32 = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord<T> {
    pub schema_version: String,
    pub command: String,
    pub payload: T,
}

impl<T: Serialize> OutputRecord<T> {
    pub fn new(command: &str, payload: T) -> Self {
        OutputRecord { schema_version: SCHEMA_VERSION.to_string(), command: command.to_string(), payload }
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)?;
        Ok(())
    }
}

/// `x` with six significant digits, trailing zeros dropped.
pub fn sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    let text = if (-4..SIG_DIGITS).contains(&exp) {
        let decimals = (SIG_DIGITS - 1 - exp).max(0) as usize;
        trim(format!("{x:.decimals$}"))
    } else {
        let s = format!("{:.*e}", (SIG_DIGITS - 1) as usize, x);
        let (mantissa, e) = s.split_once('e').unwrap_or((&s, "0"));
        format!("{}e{e}", trim(mantissa.to_string()))
    };
    if text == "-0" {
        "0".into()
    } else {
        text
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `a+bi` with parts below 1e-12 shown as zero.
pub fn complex(z: C64) -> String {
    let clean = |v: f64| if v.abs() < 1e-12 { 0.0 } else { v };
    let (re, im) = (clean(z.re), clean(z.im));
    let sign = if im < 0.0 { '-' } else { '+' };
    format!("{}{sign}{}i", sig(re), sig(im.abs()))
}

pub fn write_csv<W: Write>(out: W, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig(0.8535533905932737), "0.853553");
        assert_eq!(sig(14.644660940672622), "14.6447");
        assert_eq!(sig(1.0), "1");
        assert_eq!(sig(0.0), "0");
        assert_eq!(sig(-0.0), "0");
        assert_eq!(sig(2.5e-7), "2.5e-7");
        assert_eq!(sig(1234567.0), "1.23457e6");
        assert_eq!(sig(0.00012345678), "0.000123457");
        assert_eq!(sig(-0.5), "-0.5");
    }

    #[test]
    fn complex_format() {
        assert_eq!(complex(C64::new(1.0, 0.0)), "1+0i");
        assert_eq!(complex(C64::new(1.0, -1e-17)), "1+0i");
        assert_eq!(complex(C64::new(0.5, -0.2886751345948129)), "0.5-0.288675i");
    }

    #[test]
    fn record_round_trip() {
        let rec = OutputRecord::new("table", vec![1.5, 2.25]);
        let mut buf = Vec::new();
        rec.write_json(&mut buf).unwrap();
        let back: OutputRecord<Vec<f64>> = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back, rec);
    }
}
