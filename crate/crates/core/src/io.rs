//! CSV and JSON formats for profiles, front tracks and field snapshots.
//!
//! Floats are written as `{:.16e}`, 17 significant digits, so every value
//! survives a CSV round trip bit for bit.

use crate::dynamics::Params;
use crate::integrate::Tolerance;
use crate::pde::{FrontTrack, PdeField};
use crate::shooting::{FrontProfile, ProfileKind, ProfileSample};
use num_complex::Complex64;
use serde::Serialize;
use std::io::{Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub const PROFILE_HEADER: [&str; 7] = ["xi", "a", "kappa", "q", "theta", "ReB", "ImB"];
pub const TRACK_HEADER: [&str; 2] = ["t", "position"];
pub const SNAPSHOT_HEADER: [&str; 4] = ["x", "ReA", "ImA", "absA"];

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_rows<W: Write, const N: usize>(
    w: W,
    header: [&str; N],
    rows: impl Iterator<Item = [f64; N]>,
) -> Result<(), IoError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for row in rows {
        out.write_record(row.map(fmt))?;
    }
    out.flush()?;
    Ok(())
}

/// Parses a CSV with exactly `header`, every field a finite float.
fn read_rows<R: Read, const N: usize>(r: R, header: [&str; N]) -> Result<Vec<[f64; N]>, IoError> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let got: Vec<String> = rd.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if got != header {
        return Err(IoError::Malformed(format!("expected header {header:?}, found {got:?}")));
    }
    let mut rows = Vec::new();
    for (line, rec) in rd.records().enumerate() {
        let rec = rec?;
        if rec.len() != N {
            return Err(IoError::Malformed(format!("row {} has {} fields, expected {N}", line + 1, rec.len())));
        }
        let mut row = [0.0; N];
        for (k, field) in rec.iter().enumerate() {
            row[k] = field
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| IoError::Malformed(format!("row {}, column {}: {field:?}", line + 1, header[k])))?;
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_profile_csv<W: Write>(w: W, profile: &FrontProfile) -> Result<(), IoError> {
    write_rows(
        w,
        PROFILE_HEADER,
        profile.samples.iter().map(|s| [s.xi, s.a, s.kappa, s.q, s.theta, s.b.re, s.b.im]),
    )
}

/// Reads a profile CSV. The file carries no parameters, so velocity and
/// kind come from the caller; `ξ` must be strictly increasing.
pub fn read_profile_csv<R: Read>(r: R, v: f64, kind: ProfileKind) -> Result<FrontProfile, IoError> {
    let rows = read_rows(r, PROFILE_HEADER)?;
    if rows.is_empty() {
        return Err(IoError::Malformed("profile has no rows".into()));
    }
    if let Some(k) = rows.windows(2).position(|w| w[1][0] <= w[0][0]) {
        return Err(IoError::Malformed(format!("xi not increasing at row {}", k + 2)));
    }
    let samples = rows
        .into_iter()
        .map(|[xi, a, kappa, q, theta, re, im]| ProfileSample { xi, a, kappa, q, theta, b: Complex64::new(re, im) })
        .collect();
    Ok(FrontProfile { params: Params::normalized(v), kind, tol: Tolerance::default(), samples, trajectory: None })
}

pub fn write_track_csv<W: Write>(w: W, track: &FrontTrack) -> Result<(), IoError> {
    write_rows(w, TRACK_HEADER, track.times.iter().zip(&track.positions).map(|(&t, &x)| [t, x]))
}

pub fn read_track_csv<R: Read>(r: R) -> Result<Vec<(f64, f64)>, IoError> {
    Ok(read_rows(r, TRACK_HEADER)?.into_iter().map(|[t, x]| (t, x)).collect())
}

pub fn write_snapshot_csv<W: Write>(w: W, field: &PdeField) -> Result<(), IoError> {
    write_rows(
        w,
        SNAPSHOT_HEADER,
        field.values.iter().enumerate().map(|(i, z)| [field.x(i), z.re, z.im, z.norm()]),
    )
}

pub fn read_snapshot_csv<R: Read>(r: R) -> Result<Vec<[f64; 4]>, IoError> {
    read_rows(r, SNAPSHOT_HEADER)
}

/// Pretty JSON followed by a newline.
pub fn write_json<W: Write, T: Serialize + ?Sized>(mut w: W, value: &T) -> Result<(), IoError> {
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}
