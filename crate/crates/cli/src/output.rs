use std::io::Write;

use serde::Serialize;

use crate::BenchError;

pub const SCHEMA_LINE: &str = "# manitrans-bench v1";

/// Writes the schema comment line, a header row and one row per record.
pub fn write_csv<W: Write, R: Serialize>(mut out: W, rows: &[R]) -> Result<(), BenchError> {
    writeln!(out, "{SCHEMA_LINE}")?;
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
