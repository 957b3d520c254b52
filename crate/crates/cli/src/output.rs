//! CSV and scalar formatting. Values carry their significant digits explicitly
//! so a sweep round-trips without loss.

use std::io::Write;

use riesz_core::numerics::format_sci;
use rug::Float;

pub type CsvOut = csv::Writer<Box<dyn Write>>;

pub fn csv(out: Box<dyn Write>, header: &[&str]) -> Result<CsvOut, csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(header)?;
    Ok(w)
}

/// `x` to at most `digits` significant digits, never more than its precision holds.
pub fn float(x: &Float, digits: u32) -> String {
    let held = (f64::from(x.prec()) * std::f64::consts::LOG10_2).floor() as u32;
    format_sci(x, digits.min(held).max(1) as usize)
}

pub fn bound(e: f64) -> String {
    if e.is_finite() {
        format!("{e:.3e}")
    } else {
        "inf".into()
    }
}

/// Shortest decimal that round-trips the `f64`.
pub fn num(x: f64) -> String {
    format!("{x}")
}
