//! CSV formats: input time series, persistence diagrams (plain and
//! labeled), and generated signals.
//!
//! Diagram rows are `birth,death,lifetime,birth_index,death_index` with
//! floats printed to 17 significant digits. The essential class comes last
//! with `death` and `lifetime` set to `inf` and an empty `death_index`; its
//! `birth_index` is empty when it is born at `-inf`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::baselines::Label;
use crate::error::{Error, Result};
use crate::persistence::{PersistenceDiagram, PersistencePair};
use crate::series::TimeSeries;

/// Relative tolerance on the spacing of time stamps.
pub const TIME_JITTER: f64 = 1e-6;

pub const DIAGRAM_HEADER: [&str; 5] = ["birth", "death", "lifetime", "birth_index", "death_index"];

pub(crate) fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
        _ => e.into(),
    })
}

fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v > 0.0 {
        "inf".into()
    } else if v < 0.0 {
        "-inf".into()
    } else {
        "nan".into()
    }
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    let t = s.trim();
    match t.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => return Ok(f64::INFINITY),
        "-inf" | "-infinity" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    t.parse().map_err(|_| Error::Parse { line, msg: format!("'{t}' is not a number") })
}

fn parse_index(s: &str, line: usize) -> Result<Option<usize>> {
    let t = s.trim();
    if t.is_empty() {
        return Ok(None);
    }
    t.parse()
        .map(Some)
        .map_err(|_| Error::Parse { line, msg: format!("'{t}' is not an index") })
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => Error::Parse { line, msg: format!("{kind:?}") },
    }
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(r)
}

/// Reads a uniformly sampled series. Each row holds either `value` or
/// `time,value`; a non-numeric first row is taken as a header. With one
/// column the sample rate is `rate`; with two it is inferred from the time
/// stamps, which must be evenly spaced.
pub fn read_series<R: Read>(r: R, rate: f64) -> Result<TimeSeries> {
    let mut rows = Vec::new();
    let mut width = None;
    for (i, rec) in reader(r).into_records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let w = rec.len();
        if !(1..=2).contains(&w) {
            return Err(Error::Parse { line, msg: format!("expected 1 or 2 columns, got {w}") });
        }
        if rows.is_empty() && width.is_none() && rec.iter().any(|f| parse_f64(f, line).is_err()) {
            width = Some(w);
            continue;
        }
        if *width.get_or_insert(w) != w {
            return Err(Error::Parse { line, msg: format!("expected {} columns, got {w}", width.unwrap()) });
        }
        let vals = rec.iter().map(|f| parse_f64(f, line)).collect::<Result<Vec<_>>>()?;
        if let Some(bad) = vals.iter().find(|v| !v.is_finite()) {
            return Err(Error::Parse { line, msg: format!("non-finite value {bad}") });
        }
        rows.push((line, vals));
    }
    if rows.is_empty() {
        return Err(Error::Parse { line: 1, msg: "no samples".into() });
    }
    if rows[0].1.len() == 1 {
        return TimeSeries::new(rows.into_iter().map(|(_, v)| v[0]).collect(), rate);
    }
    let times: Vec<f64> = rows.iter().map(|(_, v)| v[0]).collect();
    let values: Vec<f64> = rows.iter().map(|(_, v)| v[1]).collect();
    if times.len() < 2 {
        return TimeSeries::with_origin(values, rate, times[0]);
    }
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::Parse { line: rows[1].0, msg: "time stamps must increase".into() });
    }
    for (k, w) in times.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > TIME_JITTER * dt {
            return Err(Error::Parse {
                line: rows[k + 1].0,
                msg: format!("non-uniform sampling: step {} against mean {dt}", w[1] - w[0]),
            });
        }
    }
    TimeSeries::with_origin(values, 1.0 / dt, times[0])
}

pub fn read_series_file(path: &Path, rate: f64) -> Result<TimeSeries> {
    read_series(open(path)?, rate)
}

/// Writes `time,value` rows with a header.
pub fn write_series<W: Write>(w: W, series: &TimeSeries) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["time", "value"]).map_err(csv_err)?;
    for (t, v) in series.times().zip(series.values()) {
        out.write_record([fmt_f64(t), fmt_f64(*v)]).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

fn pair_record(p: &PersistencePair) -> Vec<String> {
    vec![
        fmt_f64(p.birth),
        fmt_f64(p.death),
        fmt_f64(p.lifetime()),
        p.birth_index.to_string(),
        p.death_index.to_string(),
    ]
}

fn essential_record(dgm: &PersistenceDiagram) -> Vec<String> {
    vec![
        fmt_f64(dgm.essential_birth()),
        "inf".into(),
        "inf".into(),
        dgm.essential_index().map_or(String::new(), |i| i.to_string()),
        String::new(),
    ]
}

pub fn write_diagram<W: Write>(w: W, dgm: &PersistenceDiagram) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(DIAGRAM_HEADER).map_err(csv_err)?;
    for p in dgm.pairs() {
        out.write_record(pair_record(p)).map_err(csv_err)?;
    }
    out.write_record(essential_record(dgm)).map_err(csv_err)?;
    out.flush()?;
    Ok(())
}

/// Diagram rows with a trailing `label` column (`signal` or `noise`);
/// the essential class is labeled `essential`.
pub fn write_labeled_diagram<W: Write>(w: W, dgm: &PersistenceDiagram, labels: &[Label]) -> Result<()> {
    if labels.len() != dgm.len() {
        return Err(Error::domain("one label per finite pair required"));
    }
    let mut out = csv::Writer::from_writer(w);
    let mut header = DIAGRAM_HEADER.to_vec();
    header.push("label");
    out.write_record(header).map_err(csv_err)?;
    for (p, l) in dgm.pairs().iter().zip(labels) {
        let mut rec = pair_record(p);
        rec.push(match l {
            Label::Signal => "signal".into(),
            Label::Noise => "noise".into(),
        });
        out.write_record(rec).map_err(csv_err)?;
    }
    let mut rec = essential_record(dgm);
    rec.push("essential".into());
    out.write_record(rec).map_err(csv_err)?;
    out.flush()?;
    Ok(())
}

/// Reads a diagram written by [`write_diagram`] (a trailing label column is
/// ignored). The sample count is not stored in the file and is taken from
/// `n_samples`.
pub fn read_diagram<R: Read>(r: R, n_samples: usize) -> Result<PersistenceDiagram> {
    let mut pairs = Vec::new();
    let mut essential = None;
    for (i, rec) in reader(r).into_records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        if i == 0 && rec.get(0) == Some("birth") {
            continue;
        }
        if rec.len() < 5 {
            return Err(Error::Parse { line, msg: format!("expected at least 5 columns, got {}", rec.len()) });
        }
        let birth = parse_f64(&rec[0], line)?;
        let death = parse_f64(&rec[1], line)?;
        let birth_index = parse_index(&rec[3], line)?;
        let death_index = parse_index(&rec[4], line)?;
        if death == f64::INFINITY {
            if essential.is_some() {
                return Err(Error::Parse { line, msg: "more than one essential class".into() });
            }
            essential = Some((birth, birth_index));
            continue;
        }
        match (birth_index, death_index) {
            (Some(bi), Some(di)) if birth.is_finite() && death.is_finite() && death >= birth => {
                pairs.push(PersistencePair { birth, death, birth_index: bi, death_index: di })
            }
            _ => return Err(Error::Parse { line, msg: "malformed finite pair".into() }),
        }
    }
    let (eb, ei) = essential.unwrap_or((f64::NEG_INFINITY, None));
    Ok(PersistenceDiagram::new(pairs, eb, ei, n_samples))
}

pub fn read_diagram_file(path: &Path, n_samples: usize) -> Result<PersistenceDiagram> {
    read_diagram(open(path)?, n_samples)
}
