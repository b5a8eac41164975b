use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Observation, Stream};
use crate::{Error, Result};

/// Writes `f0..f{k-1},y,concept`; floats use Rust's shortest round-trip form
/// and a missing concept is an empty cell.
pub fn write_csv_to<W: Write>(stream: &Stream, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (0..stream.n_features).map(|i| format!("f{i}")).collect();
    header.push("y".into());
    header.push("concept".into());
    w.write_record(&header)?;
    let mut row: Vec<String> = Vec::with_capacity(stream.n_features + 2);
    for o in &stream.observations {
        row.clear();
        row.extend(o.x.iter().map(|v| v.to_string()));
        row.push(o.y.to_string());
        row.push(o.concept.map(|c| c.to_string()).unwrap_or_default());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_stream(stream: &Stream, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path)?;
    write_csv_to(stream, BufWriter::new(file))
}

pub fn load_csv_stream(path: impl AsRef<Path>) -> Result<Stream> {
    let file = File::open(path)?;
    read_csv_stream(BufReader::new(file))
}

/// Parses the dataset CSV format. The `concept` column is optional; the class
/// count is `max(y) + 1`.
pub fn read_csv_stream<R: Read>(reader: R) -> Result<Stream> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = r.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(|e| parse_err(1, e.to_string()))?,
        None => return Err(parse_err(1, "missing header".into())),
    };
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    let has_concept = names.last() == Some(&"concept");
    let label_col = if has_concept { names.len().checked_sub(2) } else { names.len().checked_sub(1) };
    let label_col = match label_col {
        Some(i) if names[i] == "y" => i,
        _ => {
            return Err(parse_err(
                1,
                "header must be f0,...,f{k-1},y[,concept]".into(),
            ))
        }
    };
    for (i, name) in names[..label_col].iter().enumerate() {
        if *name != format!("f{i}") {
            return Err(parse_err(1, format!("expected column `f{i}`, found `{name}`")));
        }
    }
    let n_features = label_col;
    let width = names.len();

    let mut observations = Vec::new();
    let mut n_classes = 0;
    for rec in records {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() == 1 && rec.get(0).is_some_and(|s| s.trim().is_empty()) {
            continue;
        }
        if rec.len() != width {
            return Err(parse_err(
                line,
                format!("expected {width} fields, found {}", rec.len()),
            ));
        }
        let mut x = Vec::with_capacity(n_features);
        for (i, cell) in rec.iter().take(n_features).enumerate() {
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| parse_err(line, format!("column f{i}: `{cell}` is not a number")))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("column f{i}: non-finite value")));
            }
            x.push(v);
        }
        let y_cell = rec[label_col].trim();
        let y: usize = y_cell
            .parse()
            .map_err(|_| parse_err(line, format!("label `{y_cell}` is not a nonnegative integer")))?;
        let concept = if has_concept {
            let c = rec[label_col + 1].trim();
            if c.is_empty() {
                None
            } else {
                Some(c.parse::<u32>().map_err(|_| {
                    parse_err(line, format!("concept `{c}` is not a nonnegative integer"))
                })?)
            }
        } else {
            None
        };
        n_classes = n_classes.max(y + 1);
        observations.push(Observation::new(observations.len() as u64, x, y, concept));
    }
    Ok(Stream::new(observations, n_features, n_classes))
}

fn parse_err(line: u64, msg: String) -> Error {
    Error::Parse { line, msg }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Stream> {
        read_csv_stream(text.as_bytes())
    }

    #[test]
    fn empty_data_section() {
        let s = parse("f0,f1,y,concept\n").unwrap();
        assert!(s.is_empty());
        assert_eq!(s.n_features, 2);
    }

    #[test]
    fn short_row_names_line() {
        let err = parse("f0,f1,f2,f3,y,concept\n1,2,3,4,0,0\n1,2,3,1,0\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn optional_concept_column() {
        let s = parse("f0,y\n0.5,1\n0.25,0\n").unwrap();
        assert_eq!(s.n_classes, 2);
        assert!(!s.has_concepts());
        let s = parse("f0,y,concept\n0.5,1,\n").unwrap();
        assert_eq!(s.observations[0].concept, None);
    }

    #[test]
    fn bad_header() {
        assert!(matches!(parse("a,b\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn canonical_text_round_trips() {
        let text = "f0,f1,y,concept\n0.1,-3,1,0\n1e-7,2.5,0,1\n";
        let s = parse(text).unwrap();
        let mut out = Vec::new();
        write_csv_to(&s, &mut out).unwrap();
        let again = parse(std::str::from_utf8(&out).unwrap()).unwrap();
        assert_eq!(again, s);
        let mut twice = Vec::new();
        write_csv_to(&again, &mut twice).unwrap();
        assert_eq!(out, twice);
    }
}
