//! Point records in JSON-lines and CSV form.

use std::io::{Read, Write};

use anyhow::{bail, Context, Result};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use spectra::treemap::{SpectrumPoint, Word};
use spectra::{AdicPoint, LatticeVec, MatrixParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Jsonl,
    Csv,
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    k: i64,
    word: String,
    lambda: [&'a str; 2],
    kick_position: Option<u64>,
}

pub const CSV_HEADER: [&str; 5] = ["k", "word", "x", "y", "kick_position"];

/// Writes points ordered as given.
pub fn write_points(
    out: &mut impl Write,
    points: &[SpectrumPoint],
    p: &MatrixParams,
    format: Format,
) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for s in points {
                let v = s.lambda(p)?;
                let kp = s.kick_position().map(|k| k.to_string()).unwrap_or_default();
                w.write_record([s.k.to_string(), s.word.to_string(), v.x.to_string(), v.y.to_string(), kp])?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            for s in points {
                let v = s.lambda(p)?;
                let (x, y) = (v.x.to_string(), v.y.to_string());
                let rec = JsonRecord {
                    k: s.k,
                    word: s.word.to_string(),
                    lambda: [&x, &y],
                    kick_position: s.kick_position(),
                };
                serde_json::to_writer(&mut *out, &rec)?;
                out.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

#[derive(Deserialize)]
struct JsonIn {
    k: Option<i64>,
    word: Option<String>,
    lambda: Vec<serde_json::Value>,
}

#[derive(Deserialize)]
struct CsvIn {
    k: Option<i64>,
    word: Option<String>,
    x: String,
    y: String,
}

fn coord(v: &serde_json::Value) -> Result<BigInt> {
    match v {
        serde_json::Value::String(s) => s.trim().parse().with_context(|| format!("bad coordinate {s:?}")),
        serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string().parse()?),
        other => bail!("coordinates must be integers or decimal strings, got {other}"),
    }
}

fn point(k: i64, word: Option<String>, x: BigInt, y: BigInt, p: &MatrixParams) -> Result<SpectrumPoint> {
    let word = match word {
        Some(w) if !w.is_empty() => Word::parse(&w)?,
        _ => Word::empty(),
    };
    Ok(SpectrumPoint {
        k,
        word,
        point: AdicPoint::from_lattice(&LatticeVec { x, y }, p),
    })
}

/// Reads JSON-lines or CSV (detected from the first non-blank character).
pub fn read_points(mut input: impl Read, p: &MatrixParams) -> Result<Vec<SpectrumPoint>> {
    let mut text = String::new();
    input.read_to_string(&mut text).context("reading input")?;
    let first = text.trim_start().chars().next();
    let points = match first {
        None => bail!("input contains no points"),
        Some('{') => text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                let rec: JsonIn = serde_json::from_str(l).with_context(|| format!("line {}", i + 1))?;
                if rec.lambda.len() != 2 {
                    bail!("line {}: lambda must have two coordinates", i + 1);
                }
                let x = coord(&rec.lambda[0]).with_context(|| format!("line {}", i + 1))?;
                let y = coord(&rec.lambda[1]).with_context(|| format!("line {}", i + 1))?;
                point(rec.k.unwrap_or(i as i64), rec.word, x, y, p)
            })
            .collect::<Result<Vec<_>>>()?,
        Some(_) => {
            let mut rdr = csv::Reader::from_reader(text.as_bytes());
            let headers = rdr.headers().context("reading CSV header")?.clone();
            for need in ["x", "y"] {
                if !headers.iter().any(|h| h == need) {
                    bail!("CSV header must contain {:?}, found {:?}", CSV_HEADER.join(","), headers.iter().collect::<Vec<_>>().join(","));
                }
            }
            rdr.deserialize::<CsvIn>()
                .enumerate()
                .map(|(i, rec)| {
                    let rec = rec.with_context(|| format!("CSV row {}", i + 1))?;
                    let x = rec.x.trim().parse().with_context(|| format!("CSV row {}: bad x", i + 1))?;
                    let y = rec.y.trim().parse().with_context(|| format!("CSV row {}: bad y", i + 1))?;
                    point(rec.k.unwrap_or(i as i64), rec.word, x, y, p)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    if points.is_empty() {
        bail!("input contains no points");
    }
    Ok(points)
}
