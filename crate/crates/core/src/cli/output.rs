use std::fmt::Write as _;

use crate::VisibilityCurve;

pub const CURVE_HEADER: &str = "t,visibility,phase,mirror_purity,overlap_re,overlap_im";

/// `%.12g`-style formatting: 12 significant digits, trailing zeros
/// trimmed, exponent notation only outside `1e-5 <= |x| < 1e12`.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn curve_csv(curve: &VisibilityCurve) -> String {
    let mut out = String::with_capacity(64 * (curve.len() + 1));
    out.push_str(CURVE_HEADER);
    out.push('\n');
    for i in 0..curve.len() {
        let fields = [
            curve.times[i],
            curve.visibility[i],
            curve.phase[i],
            curve.mirror_purity[i],
            curve.overlap[i].re,
            curve.overlap[i].im,
        ];
        let row: Vec<String> = fields.iter().map(|v| sig12(*v)).collect();
        writeln!(out, "{}", row.join(",")).expect("write to string");
    }
    out
}

/// Header plus rows, each cell already formatted.
pub fn table_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
