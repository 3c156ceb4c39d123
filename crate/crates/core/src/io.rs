//! Plain-text artifact formats: field CSV, step reports, radius functions,
//! traces and gnuplot scripts.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use thiserror::Error;

use crate::diagnostics::ConvergenceTrace;
use crate::grid::{Field, Grid, GridError};
use crate::solver::StepReport;
use crate::support::{RadiusFn, SupportSet};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn parse_err(line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        message: message.into(),
    }
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Serializes a field: a `# N=.. L=.. cells=.. t=..` header, then one
/// `i1,...,iN,value` row per nonzero cell with 17 significant digits.
pub fn field_to_csv(f: &Field) -> String {
    let g = f.grid();
    let mut out = format!(
        "# N={} L={} cells={} t={}\n",
        g.dim(),
        join(g.half_width()),
        join(g.cells()),
        f.time
    );
    for (flat, &v) in f.values().iter().enumerate() {
        if v != 0.0 {
            for j in g.multi_index(flat) {
                let _ = write!(out, "{j},");
            }
            let _ = writeln!(out, "{v:.16e}");
        }
    }
    out
}

fn header_value<'a>(tokens: &[&'a str], key: &str) -> Result<&'a str, IoError> {
    tokens
        .iter()
        .find_map(|t| t.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .ok_or_else(|| parse_err(1, format!("header lacks {key}")))
}

fn parse_list<T: std::str::FromStr>(s: &str, key: &str) -> Result<Vec<T>, IoError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| parse_err(1, format!("bad {key} entry {x:?}")))
        })
        .collect()
}

/// Inverse of [`field_to_csv`].
pub fn field_from_csv(reader: impl Read) -> Result<Field, IoError> {
    let mut lines = BufReader::new(reader).lines();
    let header = lines.next().ok_or_else(|| parse_err(1, "empty input"))??;
    let body = header
        .strip_prefix('#')
        .ok_or_else(|| parse_err(1, "header must start with '#'"))?;
    let tokens: Vec<&str> = body.split_whitespace().collect();
    let dim: usize = header_value(&tokens, "N")?
        .parse()
        .map_err(|_| parse_err(1, "bad N"))?;
    let half: Vec<f64> = parse_list(header_value(&tokens, "L")?, "L")?;
    let cells: Vec<usize> = parse_list(header_value(&tokens, "cells")?, "cells")?;
    let time: f64 = header_value(&tokens, "t")?
        .parse()
        .map_err(|_| parse_err(1, "bad t"))?;
    if half.len() != dim || cells.len() != dim {
        return Err(parse_err(1, "L and cells must have N entries"));
    }
    let grid = Grid::new(half, cells)?.shared();
    let mut values = vec![0.0; grid.len()];
    let mut multi = vec![0usize; dim];
    for (k, line) in lines.enumerate() {
        let line = line?;
        let lineno = k + 2;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != dim + 1 {
            return Err(parse_err(lineno, format!("expected {} columns", dim + 1)));
        }
        for (axis, p) in parts[..dim].iter().enumerate() {
            let j: usize = p
                .trim()
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad index {p:?}")))?;
            if j >= grid.cells()[axis] {
                return Err(parse_err(lineno, format!("index {j} out of range")));
            }
            multi[axis] = j;
        }
        let v: f64 = parts[dim]
            .trim()
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad value {:?}", parts[dim])))?;
        values[grid.flat_index(&multi)] = v;
    }
    Ok(Field::new(grid, values, time)?)
}

pub fn write_field(path: &Path, f: &Field) -> Result<(), IoError> {
    Ok(fs::write(path, field_to_csv(f))?)
}

pub fn read_field(path: &Path) -> Result<Field, IoError> {
    field_from_csv(fs::File::open(path)?)
}

/// Support mask as a field CSV with values in `{0, 1}`.
pub fn mask_to_csv(s: &SupportSet) -> String {
    field_to_csv(&s.to_field())
}

/// Step stream as CSV `t,dt,mass,max,boundary_flux`.
pub fn step_reports_to_csv(reports: &[StepReport]) -> String {
    let mut out = String::from("t,dt,mass,max,boundary_flux\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.time, r.dt_used, r.mass_after, r.max_value, r.boundary_flux
        );
    }
    out
}

/// Radius function as CSV `angle(s),R`.
pub fn radius_to_csv(r: &RadiusFn) -> String {
    let width = r.directions.first().map_or(1, |e| e.len().min(2));
    let mut out = if width == 2 {
        String::from("theta,phi,R\n")
    } else {
        String::from("theta,R\n")
    };
    for (i, radius) in r.radii.iter().enumerate() {
        for a in r.angles(i) {
            let _ = write!(out, "{a:.16e},");
        }
        let _ = writeln!(out, "{radius:.16e}");
    }
    out
}

/// Several traces sharing checkpoints as one CSV `tau,<label>...`.
pub fn traces_to_csv(traces: &[&ConvergenceTrace]) -> String {
    let Some(first) = traces.first() else {
        return String::new();
    };
    let mut out = String::from("tau");
    for t in traces {
        out.push(',');
        out.push_str(&t.label);
    }
    out.push('\n');
    for (k, tau) in first.checkpoints.iter().enumerate() {
        let _ = write!(out, "{tau:.16e}");
        for t in traces {
            let _ = write!(
                out,
                ",{:.16e}",
                t.values.get(k).copied().unwrap_or(f64::NAN)
            );
        }
        out.push('\n');
    }
    out
}

/// Gnuplot script that plots every column of `csv_name` against the first.
pub fn gnuplot_script(csv_name: &str, title: &str, columns: &[&str], log_y: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "set datafile separator ','");
    let _ = writeln!(out, "set key autotitle columnhead");
    let _ = writeln!(out, "set title '{title}'");
    let _ = writeln!(out, "set xlabel '{}'", columns.first().unwrap_or(&"x"));
    if log_y {
        let _ = writeln!(out, "set logscale y");
    }
    let plots: Vec<String> = (2..=columns.len())
        .map(|c| format!("'{csv_name}' using 1:{c} with linespoints"))
        .collect();
    let _ = writeln!(out, "plot {}", plots.join(", \\\n     "));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::box_average;

    #[test]
    fn field_round_trip_is_bit_exact() {
        let g = Grid::new(vec![2.0, 1.5], vec![10, 8]).unwrap().shared();
        let mut f = box_average(g, &[0.1, -0.2], &[0.7, 0.4], 1.0 / 3.0);
        f.time = 0.123456789;
        f.values_mut()[3] = 1e-300;
        let back = field_from_csv(field_to_csv(&f).as_bytes()).unwrap();
        assert_eq!(back.grid().cells(), f.grid().cells());
        assert_eq!(back.grid().half_width(), f.grid().half_width());
        assert_eq!(back.time.to_bits(), f.time.to_bits());
        for (a, b) in back.values().iter().zip(f.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn header_names_missing_key() {
        let err = field_from_csv("# N=1 L=1 t=0\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("cells"));
    }

    #[test]
    fn bad_row_reports_line() {
        let err = field_from_csv("# N=1 L=1 cells=8 t=0\n0,1\n9,1\n".as_bytes()).unwrap_err();
        assert!(err.to_string().starts_with("line 3"));
    }

    #[test]
    fn trace_csv_columns() {
        let mut a = ConvergenceTrace::new("L1");
        let mut b = ConvergenceTrace::new("Linf");
        a.push(0.0, 1.0);
        b.push(0.0, 2.0);
        let csv = traces_to_csv(&[&a, &b]);
        assert!(csv.starts_with("tau,L1,Linf\n"));
        assert_eq!(csv.lines().count(), 2);
    }
}
