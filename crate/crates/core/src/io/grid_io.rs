//! Text and image serialization of time-frequency grids.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use ndarray::Array2;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::grid::TimeFrequencyGrid;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Tab-separated text: a header `nu` followed by the frame times, then one
/// row per channel with its MIDI value and the cell values.
pub fn grid_to_csv(grid: &TimeFrequencyGrid<f64>) -> String {
    let mut out = String::from("nu");
    for t in grid.times() {
        write!(out, "\t{t}").unwrap();
    }
    out.push('\n');
    for (c, nu) in grid.nus.iter().enumerate() {
        write!(out, "{nu}").unwrap();
        for v in grid.values.column(c) {
            write!(out, "\t{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_grid_csv(grid: &TimeFrequencyGrid<f64>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if grid.frames() == 0 || grid.channels() == 0 {
        return Err(invalid("cannot write an empty grid"));
    }
    std::fs::write(path, grid_to_csv(grid)).map_err(io_err(path))
}

/// Parses the output of [`grid_to_csv`].
pub fn parse_grid_csv(text: &str) -> Result<TimeFrequencyGrid<f64>> {
    let bad = |msg: String| Error::Malformed(msg);
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty grid file".into()))?;
    let mut fields = header.split('\t');
    if fields.next() != Some("nu") {
        return Err(bad("grid header must start with 'nu'".into()));
    }
    let times = fields
        .map(|f| {
            f.parse::<f64>()
                .map_err(|e| bad(format!("time '{f}': {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut nus = Vec::new();
    let mut cells = Vec::new();
    for (i, line) in lines.filter(|l| !l.is_empty()).enumerate() {
        let row = line
            .split('\t')
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|e| bad(format!("line {}: '{f}': {e}", i + 2)))
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != times.len() + 1 {
            return Err(bad(format!(
                "line {} has {} fields, expected {}",
                i + 2,
                row.len(),
                times.len() + 1
            )));
        }
        nus.push(row[0]);
        cells.push(row[1..].to_vec());
    }
    let frames = times.len();
    let values = Array2::from_shape_fn((frames, nus.len()), |(j, c)| cells[c][j]);
    Ok(TimeFrequencyGrid {
        values,
        t0: times.first().copied().unwrap_or(0.0),
        frame_step: if frames > 1 { times[1] - times[0] } else { 0.0 },
        warmup: vec![0; nus.len()],
        nus,
    })
}

pub fn read_grid_csv(path: impl AsRef<Path>) -> Result<TimeFrequencyGrid<f64>> {
    let path = path.as_ref();
    parse_grid_csv(&std::fs::read_to_string(path).map_err(io_err(path))?)
}

/// Grey level of `v` on the range `[lo, hi]`, rounding halves up.
pub fn pixel_value(v: f64, lo: f64, hi: f64) -> u8 {
    let x = ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
    (255.0 * x + 0.5).floor() as u8
}

/// Binary PGM image: one column per frame, one row per channel with the
/// highest MIDI value on top.
pub fn grid_to_pgm(grid: &TimeFrequencyGrid<f64>, db_min: f64, db_max: f64) -> Result<Vec<u8>> {
    if !(db_max > db_min) {
        return Err(invalid("image range needs db_max > db_min"));
    }
    if grid.frames() == 0 || grid.channels() == 0 {
        return Err(invalid("cannot write an empty grid"));
    }
    let mut out = format!("P5\n{} {}\n255\n", grid.frames(), grid.channels()).into_bytes();
    for c in (0..grid.channels()).rev() {
        out.extend(
            grid.values
                .column(c)
                .iter()
                .map(|&v| pixel_value(v, db_min, db_max)),
        );
    }
    Ok(out)
}

pub fn write_grid_pgm(
    grid: &TimeFrequencyGrid<f64>,
    path: impl AsRef<Path>,
    db_min: f64,
    db_max: f64,
) -> Result<()> {
    let path = path.as_ref();
    let bytes = grid_to_pgm(grid, db_min, db_max)?;
    std::fs::write(path, bytes).map_err(io_err(path))
}

/// Pretty-printed JSON of any serializable value (curves, estimates, configs).
pub fn write_json<T: Serialize + ?Sized>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut file = std::fs::File::create(path).map_err(io_err(path))?;
    serde_json::to_writer_pretty(&mut file, value)
        .map_err(|e| io_err(path)(std::io::Error::other(e)))?;
    file.write_all(b"\n").map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn small() -> TimeFrequencyGrid<f64> {
        TimeFrequencyGrid {
            values: array![[1.5, -2.25], [0.1, 1e-7]],
            t0: 0.0,
            frame_step: 0.001,
            nus: vec![69.0, 69.25],
            warmup: vec![0, 0],
        }
    }

    #[test]
    fn csv_round_trip() {
        let g = small();
        let text = grid_to_csv(&g);
        assert!(text.starts_with("nu\t0\t0.001\n69\t1.5\t0.1\n"));
        let back = parse_grid_csv(&text).unwrap();
        assert_eq!(back.nus, g.nus);
        for (a, b) in back.values.iter().zip(g.values.iter()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn pixel_endpoints_and_midpoint() {
        assert_eq!(pixel_value(-80.0, -80.0, 0.0), 0);
        assert_eq!(pixel_value(0.0, -80.0, 0.0), 255);
        assert_eq!(pixel_value(-40.0, -80.0, 0.0), 128);
        assert_eq!(pixel_value(5.0, -80.0, 0.0), 255);
    }

    #[test]
    fn pgm_layout_puts_high_nu_on_top() {
        let img = grid_to_pgm(&small(), -3.0, 2.0).unwrap();
        let header = b"P5\n2 2\n255\n";
        assert_eq!(&img[..header.len()], header);
        let px = &img[header.len()..];
        // first row is channel 1 (nu 69.25): frames 0 and 1
        assert_eq!(
            px,
            &[
                pixel_value(-2.25, -3.0, 2.0),
                pixel_value(1e-7, -3.0, 2.0),
                pixel_value(1.5, -3.0, 2.0),
                pixel_value(0.1, -3.0, 2.0)
            ]
        );
    }
}
