use std::io::{Read, Write};

use crate::error::{Error, Result};

/// Reads the named numeric columns of a headed CSV, column-major.
pub(crate) fn read_numeric_columns<R: Read>(source: R, names: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let headers = reader.headers()?.clone();
    let index: Vec<usize> = names
        .iter()
        .map(|name| {
            headers.iter().position(|h| h == *name).ok_or_else(|| Error::Schema { column: (*name).to_string() })
        })
        .collect::<Result<_>>()?;

    let mut columns = vec![Vec::new(); names.len()];
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record?;
        for (col, (&idx, name)) in index.iter().zip(names).enumerate() {
            let cell = record.get(idx).unwrap_or("");
            let value: f64 =
                cell.parse().map_err(|_| Error::Parse { row, column: (*name).to_string(), value: cell.to_string() })?;
            if !value.is_finite() {
                return Err(Error::Parse { row, column: (*name).to_string(), value: cell.to_string() });
            }
            columns[col].push(value);
        }
    }
    Ok(columns)
}

/// Rejects timestamps that fail to increase; rows are 1-based data rows.
pub(crate) fn check_increasing(t: &[f64]) -> Result<()> {
    for (i, w) in t.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::Data(format!(
                "timestamps must strictly increase: row {} has t = {} after {}",
                i + 2,
                w[1],
                w[0]
            )));
        }
    }
    Ok(())
}

/// Writes columns with shortest round-trip float formatting.
pub(crate) fn write_numeric_columns<W: Write>(sink: W, names: &[&str], columns: &[&[f64]]) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    writer.write_record(names)?;
    let n = columns.first().map_or(0, |c| c.len());
    let mut row = Vec::with_capacity(columns.len());
    for i in 0..n {
        row.clear();
        row.extend(columns.iter().map(|c| c[i].to_string()));
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_column_is_named() {
        let err = read_numeric_columns("a,b\n1,2\n".as_bytes(), &["a", "c"]).unwrap_err();
        assert!(matches!(err, Error::Schema { ref column } if column == "c"), "{err}");
    }

    #[test]
    fn bad_cell_is_located() {
        let err = read_numeric_columns("a,b\n1,2\n3,x\n".as_bytes(), &["a", "b"]).unwrap_err();
        match err {
            Error::Parse { row, column, .. } => {
                assert_eq!(row, 2);
                assert_eq!(column, "b");
            }
            other => panic!("{other}"),
        }
    }
}
