use std::io::{Read, Write};
use std::path::Path;

use super::{dataset_name_from_path, Dataset};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Loads a CSV dataset whose last `q` columns are 0/1 labels.
pub fn load_csv(path: &Path, q: usize) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_csv(file, &dataset_name_from_path(path), q)
}

pub fn parse_csv<R: Read>(reader: R, name: &str, q: usize) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_err(0, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let cols = header.len();
    if q >= cols {
        return Err(Error::InvalidDataset(format!(
            "label count {q} leaves no feature columns among {cols}"
        )));
    }
    if q < 2 {
        return Err(Error::InvalidDataset(
            "at least 2 label columns are required".into(),
        ));
    }
    let k = cols - q;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut n = 0;
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| csv_err(row, e))?;
        if rec.len() != cols {
            return Err(Error::Csv {
                row,
                message: format!("expected {cols} cells, found {}", rec.len()),
            });
        }
        for (c, cell) in rec.iter().enumerate() {
            if c < k {
                let v: f64 = cell.parse().map_err(|_| Error::Csv {
                    row,
                    message: format!(
                        "non-numeric feature cell `{cell}` in column `{}`",
                        header[c]
                    ),
                })?;
                features.push(v);
            } else {
                labels.push(match cell {
                    "0" => 0,
                    "1" => 1,
                    _ => {
                        return Err(Error::InvalidLabel {
                            label: header[c].clone(),
                            value: cell.to_string(),
                        })
                    }
                });
            }
        }
        n += 1;
    }
    Dataset::new(
        name,
        Matrix::from_vec(n, k, features),
        Matrix::from_vec(n, q, labels),
        header[..k].to_vec(),
        header[k..].to_vec(),
    )
}

/// Writes `d` in the CSV layout read by [`parse_csv`]. Reals use the shortest
/// representation that parses back to the same value.
pub fn write_csv<W: Write>(d: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let to_err = |e: csv::Error| csv_err(0, e);
    w.write_record(d.feature_names().iter().chain(d.label_names()))
        .map_err(to_err)?;
    for i in 0..d.n_instances() {
        let record: Vec<String> = d
            .features()
            .row(i)
            .iter()
            .map(|v| v.to_string())
            .chain(d.labels().row(i).iter().map(|v| v.to_string()))
            .collect();
        w.write_record(&record).map_err(to_err)?;
    }
    w.flush().map_err(|e| csv_err(0, e.into()))?;
    Ok(())
}

fn csv_err(row: usize, e: csv::Error) -> Error {
    Error::Csv {
        row,
        message: e.to_string(),
    }
}
