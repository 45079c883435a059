//! CSV rendering shared by the experiment tables.

use crate::error::{DepthError, Result};

fn csv_error(e: impl std::fmt::Display) -> DepthError {
    DepthError::Domain(format!("csv: {e}"))
}

/// Renders a header and rows as RFC 4180 CSV.
pub(crate) fn csv_string<R>(header: &[&str], rows: impl IntoIterator<Item = R>) -> Result<String>
where
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(row).map_err(csv_error)?;
    }
    String::from_utf8(w.into_inner().map_err(csv_error)?).map_err(csv_error)
}
