//! File ingestion and CSV export.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! values always produce identical bytes.

use crate::circuit::{FrequencyResponse, ResponseSample};
use crate::constants::{hz_to_rad, rad_to_hz};
use crate::lambda::Trajectory;
use crate::optical::FieldGrid;
use crate::protocol::{MeritReport, SweepPoint};
use crate::qed::{Pulse, SchemeResult};
use crate::{Error, Result};
use num_complex::Complex64;
use std::io::{Read, Write};

pub const PULSE_HEADER: [&str; 3] = ["t_s", "re", "im"];
pub const RESPONSE_HEADER: [&str; 5] = ["freq_hz", "i_ratio_re", "i_ratio_im", "s11_re", "s11_im"];
pub const GRID_CSV_HEADER: [&str; 5] = ["x_m", "y_m", "z_m", "eps", "e2"];
pub const SCHEME_HEADER: [&str; 9] = [
    "param",
    "probability",
    "fidelity",
    "r_on_re",
    "r_on_im",
    "r_off_re",
    "r_off_im",
    "detuning_rad_s",
    "model_extension",
];
pub const EXTRACTION_HEADER: [&str; 4] = ["omega_r_hz", "delta_i_na", "l_ph", "c_pf"];
pub const TRAJECTORY_HEADER: [&str; 7] = ["t_s", "rho11", "rho22", "rho33", "rho44", "re_rho34", "im_rho34"];
pub const SWEEP_HEADER: [&str; 4] = ["tau_s", "rate_hz", "fidelity", "probability"];
pub const MERIT_HEADER: [&str; 7] = [
    "preset",
    "c_opt",
    "gamma_over_2pi_hz",
    "tau_star_s",
    "rate_star_hz",
    "fidelity_star",
    "probability_star",
];

/// Magic bytes opening a binary field grid.
pub const GRID_MAGIC: [u8; 4] = *b"FGRD";
pub const GRID_VERSION: u32 = 1;
/// Largest accepted number of grid nodes.
pub const MAX_GRID_POINTS: usize = 1 << 24;
/// Upper bound on node-to-point distance evaluations during resampling.
const MAX_RESAMPLE_WORK: usize = 100_000_000;

/// Formats a float deterministically with the shortest round-trip digits.
/// Very small and very large magnitudes use exponent notation.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn read_table<R: Read>(reader: R, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .has_headers(true)
        .from_reader(reader);
    let found = rdr.headers()?.clone();
    if found.is_empty() || (found.len() == 1 && found[0].is_empty()) {
        return Err(Error::input("no samples"));
    }
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::input(format!(
            "expected header `{}`, found `{}`",
            header.join(","),
            found.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(Error::input(format!("row {}: expected {} fields", line + 2, header.len())));
        }
        let row = rec
            .iter()
            .zip(header)
            .map(|(field, name)| {
                field
                    .parse::<f64>()
                    .map_err(|_| Error::input(format!("row {}: bad value `{field}` for {name}", line + 2)))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::input("no samples"));
    }
    Ok(rows)
}

/// Reads a pulse envelope from CSV with header `t_s,re,im`.
pub fn read_pulse_csv<R: Read>(reader: R) -> Result<Pulse> {
    let rows = read_table(reader, &PULSE_HEADER)?;
    Pulse::new(rows.into_iter().map(|r| (r[0], Complex64::new(r[1], r[2]))).collect())
}

/// Reads a frequency response. Frequencies are given in Hz.
pub fn read_response_csv<R: Read>(reader: R) -> Result<FrequencyResponse> {
    let rows = read_table(reader, &RESPONSE_HEADER)?;
    FrequencyResponse::new(
        rows.into_iter()
            .map(|r| ResponseSample {
                omega: hz_to_rad(r[0]),
                current_ratio: Complex64::new(r[1], r[2]),
                s11: Complex64::new(r[3], r[4]),
            })
            .collect(),
    )
}

pub fn write_response_csv<W: Write>(writer: W, fr: &FrequencyResponse) -> Result<()> {
    write_rows(
        writer,
        &RESPONSE_HEADER,
        fr.samples().iter().map(|s| {
            vec![
                fmt_f64(rad_to_hz(s.omega)),
                fmt_f64(s.current_ratio.re),
                fmt_f64(s.current_ratio.im),
                fmt_f64(s.s11.re),
                fmt_f64(s.s11.im),
            ]
        }),
    )
}

/// Writes a header and rows of preformatted fields.
pub fn write_rows<W, I>(writer: W, header: &[&str], rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// `(sweep parameter, result)` rows.
pub fn write_scheme_csv<W: Write>(writer: W, rows: &[(f64, SchemeResult)]) -> Result<()> {
    write_rows(
        writer,
        &SCHEME_HEADER,
        rows.iter().map(|(param, r)| {
            vec![
                fmt_f64(*param),
                fmt_f64(r.success_probability),
                fmt_f64(r.bell_fidelity),
                fmt_f64(r.r_values[0].re),
                fmt_f64(r.r_values[0].im),
                fmt_f64(r.r_values[1].re),
                fmt_f64(r.r_values[1].im),
                r.detuning_used.map(fmt_f64).unwrap_or_default(),
                r.fidelity_model_extension.to_string(),
            ]
        }),
    )
}

/// One row of a circuit extraction report, SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractionRow {
    pub omega_r: f64,
    pub delta_i: f64,
    pub l: f64,
    pub c: f64,
}

/// Writes extraction rows with ω_R/2π in Hz, δI in nA, L in pH and C in pF.
pub fn write_extraction_csv<W: Write>(writer: W, rows: &[ExtractionRow]) -> Result<()> {
    write_rows(
        writer,
        &EXTRACTION_HEADER,
        rows.iter().map(|r| {
            vec![
                fmt_f64(rad_to_hz(r.omega_r)),
                fmt_f64(r.delta_i * 1e9),
                fmt_f64(r.l * 1e12),
                fmt_f64(r.c * 1e12),
            ]
        }),
    )
}

pub fn write_trajectory_csv<W: Write>(writer: W, traj: &Trajectory) -> Result<()> {
    write_rows(
        writer,
        &TRAJECTORY_HEADER,
        traj.times.iter().zip(&traj.states).map(|(t, s)| {
            vec![
                fmt_f64(*t),
                fmt_f64(s.rho11),
                fmt_f64(s.rho22),
                fmt_f64(s.rho33),
                fmt_f64(s.rho44),
                fmt_f64(s.rho34.re),
                fmt_f64(s.rho34.im),
            ]
        }),
    )
}

pub fn write_sweep_csv<W: Write>(writer: W, sweep: &[SweepPoint]) -> Result<()> {
    write_rows(
        writer,
        &SWEEP_HEADER,
        sweep
            .iter()
            .map(|p| vec![fmt_f64(p.tau), fmt_f64(p.rate), fmt_f64(p.fidelity), fmt_f64(p.probability)]),
    )
}

/// One row per named report.
pub fn write_merit_csv<W: Write>(writer: W, rows: &[(String, MeritReport)]) -> Result<()> {
    write_rows(
        writer,
        &MERIT_HEADER,
        rows.iter().map(|(name, m)| {
            vec![
                name.clone(),
                fmt_f64(m.c_opt),
                fmt_f64(rad_to_hz(m.gamma_purcell)),
                fmt_f64(m.tau_star),
                fmt_f64(m.rate_star),
                fmt_f64(m.fidelity_star),
                fmt_f64(m.prob_star),
            ]
        }),
    )
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(|_| Error::input("truncated grid header"))?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64s<R: Read>(r: &mut R, n: usize, what: &str) -> Result<Vec<f64>> {
    // Grows with the data actually present instead of trusting the header.
    let mut buf = Vec::new();
    r.take(n as u64 * 8).read_to_end(&mut buf)?;
    if buf.len() != n * 8 {
        return Err(Error::input(format!("truncated grid body in {what}")));
    }
    Ok(buf.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
}

/// Reads a binary field grid.
///
/// Layout, all little-endian: the magic `FGRD`, `u32` version, `u32` nx, ny,
/// nz, then `f64` arrays x[nx], y[ny], z[nz], eps[nx·ny·nz], e2[nx·ny·nz]
/// with the z index varying fastest.
pub fn read_grid_binary<R: Read>(mut reader: R) -> Result<FieldGrid> {
    let mut magic = [0u8; 4];
    reader.read_exact(&mut magic).map_err(|_| Error::input("truncated grid header"))?;
    if magic != GRID_MAGIC {
        return Err(Error::input("not a field grid (bad magic)"));
    }
    let version = read_u32(&mut reader)?;
    if version != GRID_VERSION {
        return Err(Error::input(format!("unsupported grid version {version}")));
    }
    let nx = read_u32(&mut reader)? as usize;
    let ny = read_u32(&mut reader)? as usize;
    let nz = read_u32(&mut reader)? as usize;
    let n = checked_points(nx, ny, nz)?;
    let x = read_f64s(&mut reader, nx, "x")?;
    let y = read_f64s(&mut reader, ny, "y")?;
    let z = read_f64s(&mut reader, nz, "z")?;
    let eps = read_f64s(&mut reader, n, "eps")?;
    let e2 = read_f64s(&mut reader, n, "e2")?;
    let mut rest = [0u8; 1];
    if reader.read(&mut rest)? != 0 {
        return Err(Error::input("trailing bytes after grid body"));
    }
    FieldGrid::new(x, y, z, eps, e2)
}

fn checked_points(nx: usize, ny: usize, nz: usize) -> Result<usize> {
    nx.checked_mul(ny)
        .and_then(|v| v.checked_mul(nz))
        .filter(|&n| n <= MAX_GRID_POINTS)
        .ok_or_else(|| Error::input(format!("grid {nx}x{ny}x{nz} exceeds {MAX_GRID_POINTS} points")))
}

pub fn write_grid_binary<W: Write>(mut writer: W, grid: &FieldGrid) -> Result<()> {
    writer.write_all(&GRID_MAGIC)?;
    writer.write_all(&GRID_VERSION.to_le_bytes())?;
    for len in grid.shape() {
        let len = u32::try_from(len).map_err(|_| Error::input("grid axis too long"))?;
        writer.write_all(&len.to_le_bytes())?;
    }
    let [x, y, z] = grid.axes();
    for v in x.iter().chain(y).chain(z).chain(grid.eps()).chain(grid.e2()) {
        writer.write_all(&v.to_le_bytes())?;
    }
    writer.flush()?;
    Ok(())
}

fn unique_sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Reads a CSV point cloud with header `x_m,y_m,z_m,eps,e2`.
///
/// Points forming a complete rectilinear lattice are placed directly.
/// Anything else is resampled by nearest neighbour onto a regular grid of
/// `shape` spanning the bounding box; without a shape that is an error.
pub fn read_grid_csv<R: Read>(reader: R, shape: Option<[usize; 3]>) -> Result<FieldGrid> {
    let rows = read_table(reader, &GRID_CSV_HEADER)?;
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::input("grid values must be finite"));
    }
    if let Some(grid) = exact_lattice(&rows)? {
        return Ok(grid);
    }
    let [nx, ny, nz] = shape.ok_or_else(|| Error::input("point cloud is not a regular lattice; a resampling shape is required"))?;
    let n = checked_points(nx, ny, nz)?;
    if n.saturating_mul(rows.len()) > MAX_RESAMPLE_WORK {
        return Err(Error::input("resampling too expensive; reduce the shape or point count"));
    }
    let axis = |c: usize, len: usize| -> Result<Vec<f64>> {
        let lo = rows.iter().map(|r| r[c]).fold(f64::INFINITY, f64::min);
        let hi = rows.iter().map(|r| r[c]).fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) || len < 2 {
            return Err(Error::input("point cloud is degenerate along an axis"));
        }
        Ok(crate::numeric::linspace(lo, hi, len))
    };
    let (x, y, z) = (axis(0, nx)?, axis(1, ny)?, axis(2, nz)?);
    let mut eps = Vec::with_capacity(n);
    let mut e2 = Vec::with_capacity(n);
    for &xi in &x {
        for &yj in &y {
            for &zk in &z {
                let mut best = (f64::INFINITY, 0);
                for (p, r) in rows.iter().enumerate() {
                    let d = (r[0] - xi).powi(2) + (r[1] - yj).powi(2) + (r[2] - zk).powi(2);
                    if d < best.0 {
                        best = (d, p);
                    }
                }
                eps.push(rows[best.1][3]);
                e2.push(rows[best.1][4]);
            }
        }
    }
    FieldGrid::new(x, y, z, eps, e2)
}

fn exact_lattice(rows: &[Vec<f64>]) -> Result<Option<FieldGrid>> {
    let x = unique_sorted(rows.iter().map(|r| r[0]).collect());
    let y = unique_sorted(rows.iter().map(|r| r[1]).collect());
    let z = unique_sorted(rows.iter().map(|r| r[2]).collect());
    let Some(n) = x.len().checked_mul(y.len()).and_then(|v| v.checked_mul(z.len())) else {
        return Ok(None);
    };
    if n != rows.len() || x.len() < 2 || y.len() < 2 || z.len() < 2 {
        return Ok(None);
    }
    let find = |axis: &[f64], v: f64| axis.binary_search_by(|a| a.total_cmp(&v)).expect("coordinate present");
    let mut eps = vec![f64::NAN; n];
    let mut e2 = vec![f64::NAN; n];
    let mut filled = vec![false; n];
    for r in rows {
        let idx = (find(&x, r[0]) * y.len() + find(&y, r[1])) * z.len() + find(&z, r[2]);
        if filled[idx] {
            return Ok(None);
        }
        filled[idx] = true;
        eps[idx] = r[3];
        e2[idx] = r[4];
    }
    FieldGrid::new(x, y, z, eps, e2).map(Some)
}
