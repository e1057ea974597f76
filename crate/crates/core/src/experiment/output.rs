//! CSV rows and locale-independent number formatting.

use std::io::Write;

use crate::error::Result;

pub const CSV_HEADER: &str =
    "experiment,x_name,x_value,p_max_dbm,method,mean_rate_bits,stderr,trials";

/// One aggregated line of an experiment table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub x_name: String,
    pub x_value: f64,
    pub p_max_dbm: f64,
    pub method: String,
    pub mean_rate_bits: f64,
    pub stderr: f64,
    pub trials: usize,
}

impl ResultRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.experiment,
            self.x_name,
            format_sig(self.x_value),
            format_sig(self.p_max_dbm),
            self.method,
            format_sig(self.mean_rate_bits),
            format_sig(self.stderr),
            self.trials
        )
    }
}

/// Writes the header and rows with `\n` line endings.
pub fn write_csv<W: Write>(mut out: W, rows: &[ResultRow]) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.to_csv_line())?;
    }
    out.flush()?;
    Ok(())
}

pub fn to_csv_string(rows: &[ResultRow]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("ASCII output")
}

/// Formats `x` with 12 significant digits in the style of C's `%.12g`:
/// plain decimals for exponents in `[-5, 12)`, scientific otherwise, trailing
/// zeros removed.
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Mean and standard error of the mean, summed in index order.
pub fn mean_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(256.0), "256");
        assert_eq!(format_sig(0.005), "0.005");
        assert_eq!(format_sig(-100.0), "-100");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig(22.123456789012345), "22.123456789");
        assert_eq!(format_sig(1e-7), "1e-7");
        assert_eq!(format_sig(1.5e13), "1.5e13");
        assert_eq!(format_sig(123456789012.0), "123456789012");
        assert_eq!(format_sig(0.99999999999999), "1");
    }

    #[test]
    fn csv_layout() {
        let row = ResultRow {
            experiment: "rate-vs-n".into(),
            x_name: "N".into(),
            x_value: 16.0,
            p_max_dbm: 30.0,
            method: "ES".into(),
            mean_rate_bits: 12.5,
            stderr: 0.01,
            trials: 500,
        };
        let csv = to_csv_string(&[row]);
        assert_eq!(
            csv,
            format!("{CSV_HEADER}\nrate-vs-n,N,16,30,ES,12.5,0.01,500\n")
        );
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn statistics() {
        assert_eq!(mean_stderr(&[2.0]), (2.0, 0.0));
        let (m, se) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        // sample variance 5/3, n = 4
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }
}
