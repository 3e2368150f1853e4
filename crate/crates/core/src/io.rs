//! Plain-text CSV formats.
//!
//! Points: one point per line, comma-separated decimal coordinates. Lines
//! starting with `#` and blank lines are skipped. The dimension comes from
//! the first data line; any other width is an error naming the line.
//! Labeled sets carry a trailing integer label column; descriptor databases
//! carry a leading image-id column.

use std::fmt::Write as _;
use std::path::Path;

use crate::applications::{DescriptorDatabase, LabeledSet};
use crate::error::{Error, Result};
use crate::points::PointSet;

struct Record<'a> {
    line: usize,
    fields: Vec<&'a str>,
}

fn records(text: &str) -> impl Iterator<Item = Record<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            return None;
        }
        Some(Record {
            line: i + 1,
            fields: trimmed.split(',').map(str::trim).collect(),
        })
    })
}

fn csv_err(line: usize, message: impl Into<String>) -> Error {
    Error::Csv {
        line,
        message: message.into(),
    }
}

fn parse_f64(line: usize, field: &str) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| csv_err(line, format!("invalid number {field:?}")))?;
    if !v.is_finite() {
        return Err(csv_err(line, format!("non-finite value {field:?}")));
    }
    Ok(v)
}

fn parse_int<T: std::str::FromStr>(line: usize, field: &str, what: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| csv_err(line, format!("invalid {what} {field:?}")))
}

/// Rows of a numeric table with `extra` leading or trailing columns kept
/// aside as text.
fn parse_table<'a>(
    text: &'a str,
    lead: usize,
    trail: usize,
) -> Result<(Vec<f64>, usize, Vec<(usize, Vec<&'a str>)>)> {
    let mut data = Vec::new();
    let mut extras = Vec::new();
    let mut width = None;
    for rec in records(text) {
        let w = *width.get_or_insert(rec.fields.len());
        if rec.fields.len() != w {
            return Err(csv_err(
                rec.line,
                format!("expected {w} fields, found {}", rec.fields.len()),
            ));
        }
        if w <= lead + trail {
            return Err(csv_err(rec.line, "row has no coordinates"));
        }
        for f in &rec.fields[lead..w - trail] {
            data.push(parse_f64(rec.line, f)?);
        }
        let mut extra: Vec<&str> = rec.fields[..lead].to_vec();
        extra.extend_from_slice(&rec.fields[w - trail..]);
        extras.push((rec.line, extra));
    }
    let Some(w) = width else {
        return Err(csv_err(0, "no data rows"));
    };
    Ok((data, w - lead - trail, extras))
}

pub fn parse_points(text: &str) -> Result<PointSet> {
    let (data, d, _) = parse_table(text, 0, 0)?;
    PointSet::from_flat(data, d)
}

pub fn parse_labeled(text: &str) -> Result<LabeledSet> {
    let (data, d, extras) = parse_table(text, 0, 1)?;
    let labels = extras
        .iter()
        .map(|(line, f)| parse_int::<i64>(*line, f[0], "label"))
        .collect::<Result<Vec<_>>>()?;
    LabeledSet::new(PointSet::from_flat(data, d)?, labels)
}

pub fn parse_descriptors(text: &str) -> Result<DescriptorDatabase> {
    let (data, d, extras) = parse_table(text, 1, 0)?;
    let ids = extras
        .iter()
        .map(|(line, f)| parse_int::<usize>(*line, f[0], "image id"))
        .collect::<Result<Vec<_>>>()?;
    DescriptorDatabase::from_ids(PointSet::from_flat(data, d)?, ids)
}

/// Square matrix, returned row-major with its size.
pub fn parse_square_matrix(text: &str) -> Result<(Vec<f64>, usize)> {
    let (data, d, _) = parse_table(text, 0, 0)?;
    if data.len() != d * d {
        return Err(Error::InvalidMatrix(format!(
            "expected a square matrix, got {} rows of {d}",
            data.len() / d
        )));
    }
    Ok((data, d))
}

/// Writes one point per line using shortest round-trip decimal formatting,
/// so reading the text back reproduces every coordinate bit for bit.
pub fn format_points(points: &PointSet) -> String {
    let mut out = String::with_capacity(points.len() * points.dim() * 20);
    for row in points.rows() {
        for (c, v) in row.iter().enumerate() {
            if c > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

fn read(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

pub fn read_points(path: impl AsRef<Path>) -> Result<PointSet> {
    parse_points(&read(path.as_ref())?)
}

pub fn read_labeled(path: impl AsRef<Path>) -> Result<LabeledSet> {
    parse_labeled(&read(path.as_ref())?)
}

pub fn read_descriptors(path: impl AsRef<Path>) -> Result<DescriptorDatabase> {
    parse_descriptors(&read(path.as_ref())?)
}

pub fn read_square_matrix(path: impl AsRef<Path>) -> Result<(Vec<f64>, usize)> {
    parse_square_matrix(&read(path.as_ref())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_and_blank_lines() {
        let p = parse_points("# x,y\n1,2\n\n3.5, -4e-3\n").unwrap();
        assert_eq!(p.as_slice(), &[1.0, 2.0, 3.5, -4e-3]);
        assert_eq!(p.dim(), 2);
    }

    #[test]
    fn ragged_row_names_line() {
        let err = parse_points("# header\n1,2\n3,4\n5\n").unwrap_err();
        assert_eq!(err.to_string(), "line 4: expected 2 fields, found 1");
        assert!(err.is_input_format());
    }

    #[test]
    fn bad_numbers() {
        assert!(matches!(
            parse_points("1,x\n"),
            Err(Error::Csv { line: 1, .. })
        ));
        assert!(matches!(
            parse_points("1,NaN\n"),
            Err(Error::Csv { line: 1, .. })
        ));
        assert!(matches!(
            parse_points("# only a header\n"),
            Err(Error::Csv { .. })
        ));
    }

    #[test]
    fn labeled_and_descriptors() {
        let l = parse_labeled("0,0,1\n1,1,-4\n").unwrap();
        assert_eq!(l.labels(), &[1, -4]);
        assert_eq!(l.points().dim(), 2);
        assert!(matches!(
            parse_labeled("0,0,1.5\n"),
            Err(Error::Csv { line: 1, .. })
        ));

        let db = parse_descriptors("1,0.5,0.5\n0,1,1\n1,2,2\n").unwrap();
        assert_eq!(db.image_count(), 2);
        assert_eq!(db.image_of(), &[1, 0, 1]);
        assert_eq!(db.descriptors().row(1), &[1.0, 1.0]);
    }

    #[test]
    fn square_matrix() {
        let (m, d) = parse_square_matrix("2,0\n0,1\n").unwrap();
        assert_eq!((m, d), (vec![2.0, 0.0, 0.0, 1.0], 2));
        assert!(parse_square_matrix("1,0\n").is_err());
    }

    proptest! {
        #[test]
        fn write_read_is_bitwise_stable(
            bits in prop::collection::vec(any::<u64>(), 1..60),
            d in 1usize..4,
        ) {
            let vals: Vec<f64> = bits
                .into_iter()
                .map(f64::from_bits)
                .filter(|v| v.is_finite())
                .collect();
            let usable = vals.len() / d * d;
            prop_assume!(usable > 0);
            let p = PointSet::from_flat(vals[..usable].to_vec(), d).unwrap();
            let back = parse_points(&format_points(&p)).unwrap();
            let a: Vec<u64> = p.as_slice().iter().map(|v| v.to_bits()).collect();
            let b: Vec<u64> = back.as_slice().iter().map(|v| v.to_bits()).collect();
            prop_assert_eq!(a, b);
        }
    }
}
