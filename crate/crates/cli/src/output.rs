//! CSV and text formatting shared by the commands.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use basmajian_core::Complex;

use crate::error::CliResult;

pub fn file_csv(path: &Path) -> CliResult<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(BufWriter::new(File::create(path)?)))
}

/// `re+imi` with shortest round-trip digits.
pub fn fmt_complex(z: Complex) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// An optional number as a CSV field; missing values are empty.
pub fn field(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}
