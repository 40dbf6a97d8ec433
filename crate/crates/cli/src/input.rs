//! Data ingestion for the command-line front end.

use smvbs::data::volle;
use smvbs::estimation::SampleMatrix;

use crate::CliError;

/// Parses numeric columns separated by commas or whitespace. Lines starting
/// with `#` are skipped; a first line that does not parse is taken as a header.
pub fn parse_table(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    let mut seen_line = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = if line.contains(',') {
            line.split(',').map(str::trim).collect()
        } else {
            line.split_whitespace().collect()
        };
        let parsed: Vec<Result<f64, _>> = fields.iter().map(|f| f.parse::<f64>()).collect();
        let first = !seen_line;
        seen_line = true;
        if first && parsed.iter().any(|p| p.is_err()) {
            width = Some(fields.len());
            continue;
        }
        let mut row = Vec::with_capacity(fields.len());
        for (col, (p, f)) in parsed.into_iter().zip(&fields).enumerate() {
            match p {
                Ok(v) if v.is_finite() => row.push(v),
                _ => {
                    return Err(CliError::Input(format!(
                        "line {line_no}, column {}: cannot parse '{f}' as a number",
                        col + 1
                    )))
                }
            }
        }
        match width {
            Some(w) if w != row.len() => {
                return Err(CliError::Input(format!(
                    "line {line_no}: expected {w} fields, found {}",
                    row.len()
                )))
            }
            _ => width = Some(row.len()),
        }
        for (col, &v) in row.iter().enumerate() {
            if v <= 0.0 {
                return Err(CliError::Input(format!(
                    "line {line_no}, column {}: value {v} is not strictly positive",
                    col + 1
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Input("no data rows".into()));
    }
    Ok(rows)
}

/// `"1,3"`, `"2-4"` or a mix; 1-based, returned 0-based.
pub fn parse_columns(spec: &str, available: usize) -> Result<Vec<usize>, CliError> {
    let bad = |m: String| CliError::Input(format!("--columns '{spec}': {m}"));
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim) {
        let (lo, hi) = match part.split_once('-') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (part, part),
        };
        let lo: usize = lo
            .parse()
            .map_err(|_| bad(format!("'{part}' is not a column")))?;
        let hi: usize = hi
            .parse()
            .map_err(|_| bad(format!("'{part}' is not a column")))?;
        if lo == 0 || hi < lo || hi > available {
            return Err(bad(format!("'{part}' outside 1..={available}")));
        }
        out.extend(lo - 1..hi);
    }
    Ok(out)
}

pub fn load_dataset(
    source: &str,
    raw: bool,
    columns: Option<&str>,
) -> Result<SampleMatrix, CliError> {
    let sample = if source == "volle" {
        volle(raw)
    } else {
        let text = std::fs::read_to_string(source)
            .map_err(|e| CliError::Input(format!("cannot read {source}: {e}")))?;
        let rows = parse_table(&text)?;
        if rows[0].len() < 2 {
            return Err(CliError::Input(format!(
                "{source}: need at least 2 numeric columns, found {}",
                rows[0].len()
            )));
        }
        SampleMatrix::new(rows)?
    };
    match columns {
        None => Ok(sample),
        Some(spec) => {
            let cols = parse_columns(spec, sample.p())?;
            Ok(sample.select(&cols)?)
        }
    }
}

pub fn parse_params(spec: &str) -> Result<Vec<f64>, CliError> {
    spec.split(',')
        .map(|f| {
            let f = f.trim();
            f.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Input(format!("--params: '{f}' is not a number")))
        })
        .collect()
}
