//! CSV series files.
//!
//! A file has a header row, then one sample per line: `t,value` for
//! sequences or `t1,t2,value` for grids. Indices are integers; samples that
//! are absent from the file are the ones to recover. Numbers use `.` as the
//! decimal point regardless of locale.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::masks::IndexWindow;
use crate::series::Series;

/// Samples read from a file, placed on their bounding window.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFile<I: Lattice> {
    /// Absent samples are stored as zero.
    pub series: Series<I>,
    /// Window points with no line in the file, in window order.
    pub absent: Vec<I>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadedSeries {
    OneD(SeriesFile<i64>),
    TwoD(SeriesFile<[i64; 2]>),
}

pub fn read_series_csv<R: Read>(input: R) -> Result<LoadedSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let header: Vec<String> = reader
        .headers()?
        .iter()
        .map(str::to_ascii_lowercase)
        .collect();
    let dim = match header
        .iter()
        .map(String::as_str)
        .collect::<Vec<_>>()
        .as_slice()
    {
        ["t", "value"] => 1,
        ["t1", "t2", "value"] => 2,
        other => {
            return Err(Error::parse(format!(
                "expected header t,value or t1,t2,value, found {}",
                other.join(",")
            )))
        }
    };
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let field = |k: usize| record.get(k).unwrap_or("");
        let int = |k: usize| -> Result<i64> {
            field(k).parse::<i64>().map_err(|_| {
                Error::parse(format!(
                    "row {}: index {:?} is not an integer",
                    line + 2,
                    field(k)
                ))
            })
        };
        let value: f64 = field(dim).parse().map_err(|_| {
            Error::parse(format!(
                "row {}: value {:?} is not a number",
                line + 2,
                field(dim)
            ))
        })?;
        if !value.is_finite() {
            return Err(Error::parse(format!(
                "row {}: value is not finite",
                line + 2
            )));
        }
        let coords = if dim == 1 {
            vec![int(0)?]
        } else {
            vec![int(0)?, int(1)?]
        };
        rows.push((coords, value));
    }
    if dim == 1 {
        Ok(LoadedSeries::OneD(place(
            rows.into_iter().map(|(c, v)| (c[0], v)),
        )?))
    } else {
        Ok(LoadedSeries::TwoD(place(
            rows.into_iter().map(|(c, v)| ([c[0], c[1]], v)),
        )?))
    }
}

fn place<I: Lattice>(rows: impl Iterator<Item = (I, f64)>) -> Result<SeriesFile<I>> {
    let mut samples = BTreeMap::new();
    for (p, v) in rows {
        if samples.insert(p, v).is_some() {
            return Err(Error::parse(format!("duplicate index {p:?}")));
        }
    }
    let coords: Vec<Vec<i64>> = samples.keys().map(|p| p.coords()).collect();
    let Some(first) = coords.first() else {
        return Err(Error::parse("series file has no samples"));
    };
    let mut lo = first.clone();
    let mut hi = first.clone();
    for c in &coords {
        for d in 0..c.len() {
            lo[d] = lo[d].min(c[d]);
            hi[d] = hi[d].max(c[d]);
        }
    }
    let corner =
        |c: &[i64]| I::from_coords(c).ok_or_else(|| Error::parse("index has the wrong dimension"));
    let window = IndexWindow::new(corner(&lo)?, corner(&hi)?)?;
    let mut absent = Vec::new();
    let series = Series::from_fn(window, |p| match samples.get(&p) {
        Some(&v) => v,
        None => {
            absent.push(p);
            0.0
        }
    });
    Ok(SeriesFile { series, absent })
}

/// Writes every window sample except those in `skip`.
pub fn write_series_csv<I: Lattice, W: Write>(
    series: &Series<I>,
    skip: &[I],
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = if I::DIM == 1 {
        vec!["t"]
    } else {
        vec!["t1", "t2"]
    };
    header.push("value");
    w.write_record(&header)?;
    for (p, v) in series.iter() {
        if skip.binary_search(&p).is_ok() {
            continue;
        }
        let mut record: Vec<String> = p.coords().iter().map(i64::to_string).collect();
        // Display for f64 is the shortest exact round-trip form
        record.push(v.to_string());
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}
