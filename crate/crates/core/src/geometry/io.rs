//! Point-set files: CSV with one `x,y` pair per line, or a JSON array of
//! `[x, y]` pairs. Both readers reject NaN/Inf and duplicate points.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Point, PointSet};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn from_path(path: &Path) -> Result<Format> {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase) {
            Some(e) if e == "csv" || e == "txt" => Ok(Format::Csv),
            Some(e) if e == "json" => Ok(Format::Json),
            other => Err(Error::UnsupportedFormat(other.unwrap_or_default())),
        }
    }
}

pub fn read_csv<R: Read>(reader: R) -> Result<PointSet> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(reader);
    let mut points = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|e| Error::Parse {
                line,
                message: format!("{s:?}: {e}"),
            })
        };
        // an optional "x,y" header on the first line
        if points.is_empty() && i == 0 && record[0].parse::<f64>().is_err() && record[0].eq_ignore_ascii_case("x") {
            continue;
        }
        let p = Point::new(parse(&record[0])?, parse(&record[1])?);
        if !p.is_finite() {
            return Err(Error::Parse {
                line,
                message: "non-finite coordinate".into(),
            });
        }
        points.push(p);
    }
    PointSet::new(points)
}

pub fn read_json<R: Read>(reader: R) -> Result<PointSet> {
    // serde_json refuses NaN/Infinity literals, so non-finite values cannot
    // reach PointSet::new from here except through overflowing literals
    let pairs: Vec<[f64; 2]> = serde_json::from_reader(reader)?;
    PointSet::new(pairs.into_iter().map(|[x, y]| Point::new(x, y)).collect())
}

pub fn write_csv<W: Write>(ps: &PointSet, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for p in ps.points() {
        w.write_record([p.x.to_string(), p.y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(ps: &PointSet, writer: W) -> Result<()> {
    let pairs: Vec<[f64; 2]> = ps.points().iter().map(|p| [p.x, p.y]).collect();
    serde_json::to_writer(writer, &pairs)?;
    Ok(())
}

pub fn read_path(path: &Path) -> Result<PointSet> {
    let file = BufReader::new(File::open(path)?);
    match Format::from_path(path)? {
        Format::Csv => read_csv(file),
        Format::Json => read_json(file),
    }
}

pub fn write_path(ps: &PointSet, path: &Path) -> Result<()> {
    let format = Format::from_path(path)?;
    let mut file = BufWriter::new(File::create(path)?);
    match format {
        Format::Csv => write_csv(ps, &mut file)?,
        Format::Json => write_json(ps, &mut file)?,
    }
    file.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_reads_pairs_and_skips_header_and_comments() {
        let src = "x,y\n# comment\n0,0\n 1.5 , -2e-1\n\n3,4\n";
        let ps = read_csv(src.as_bytes()).unwrap();
        assert_eq!(ps.points(), &[Point::new(0.0, 0.0), Point::new(1.5, -0.2), Point::new(3.0, 4.0)]);
    }

    #[test]
    fn csv_rejects_nan_inf_and_duplicates() {
        assert!(read_csv("0,0\nNaN,1\n".as_bytes()).is_err());
        assert!(read_csv("0,0\n1,inf\n".as_bytes()).is_err());
        assert!(matches!(
            read_csv("0,0\n1,1\n0,0\n".as_bytes()),
            Err(Error::DuplicatePoint { index: 2, .. })
        ));
        assert!(matches!(read_csv("1,2,3\n".as_bytes()), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(read_csv("0,0\n1,abc\n".as_bytes()), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn json_reads_pairs_and_rejects_bad_input() {
        let ps = read_json("[[0,0],[3,4]]".as_bytes()).unwrap();
        assert_eq!(ps.len(), 2);
        assert!(read_json("[[0,0],[0,0]]".as_bytes()).is_err());
        assert!(read_json("[[0,NaN]]".as_bytes()).is_err());
        assert!(read_json("[[0,1e999]]".as_bytes()).is_err());
        assert!(read_json("[[0,1,2]]".as_bytes()).is_err());
    }

    #[test]
    fn write_then_read_preserves_points_bitwise() {
        let ps = PointSet::new(vec![Point::new(0.1, 1.0 / 3.0), Point::new(-2.5e-8, 7.0)]).unwrap();
        let mut buf = Vec::new();
        write_csv(&ps, &mut buf).unwrap();
        assert_eq!(read_csv(buf.as_slice()).unwrap().points(), ps.points());
        let mut buf = Vec::new();
        write_json(&ps, &mut buf).unwrap();
        assert_eq!(read_json(buf.as_slice()).unwrap().points(), ps.points());
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(Format::from_path(Path::new("a.CSV")).unwrap(), Format::Csv);
        assert_eq!(Format::from_path(Path::new("a.json")).unwrap(), Format::Json);
        assert!(Format::from_path(Path::new("a.bin")).is_err());
    }
}
