//! Point-set files: CSV with one point per row, `d` numeric columns, and an
//! optional first line `# dim=d`.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::Point;

/// Parses a points file. The dimension is taken from the `# dim=d` header
/// when present and cross-checked against the rows; otherwise it is inferred
/// from the first row.
pub fn read_points_csv(path: &Path) -> Result<Vec<Point<f64>>> {
    let text = fs::read_to_string(path)?;
    parse_points_csv(&text)
}

/// Parses CSV text in the points-file format.
pub fn parse_points_csv(text: &str) -> Result<Vec<Point<f64>>> {
    let mut declared_dim: Option<usize> = None;
    let mut points: Vec<Point<f64>> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(value) = comment.strip_prefix("dim=") {
                let d: usize = value.trim().parse().map_err(|_| {
                    Error::Parse(format!("line {}: bad dim header {comment:?}", lineno + 1))
                })?;
                declared_dim = Some(d);
            }
            continue;
        }
        let coords: Vec<f64> = line
            .split(',')
            .map(|cell| {
                cell.trim().parse::<f64>().map_err(|_| {
                    Error::Parse(format!("line {}: not a number: {cell:?}", lineno + 1))
                })
            })
            .collect::<Result<_>>()?;
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Parse(format!("line {}: non-finite coordinate", lineno + 1)));
        }
        let expected = declared_dim.unwrap_or_else(|| {
            points.first().map_or(coords.len(), Point::dim)
        });
        if coords.len() != expected {
            return Err(Error::Parse(format!(
                "line {}: expected {} columns, got {}",
                lineno + 1,
                expected,
                coords.len()
            )));
        }
        points.push(Point::new(coords));
    }
    if points.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(points)
}

/// Writes a points file with the `# dim=d` header. Coordinates use the
/// shortest round-trip decimal form, so writing is deterministic.
pub fn write_points_csv(path: &Path, points: &[Point<f64>]) -> Result<()> {
    fs::write(path, points_to_csv(points)?)?;
    Ok(())
}

/// Renders points in the points-file format.
pub fn points_to_csv(points: &[Point<f64>]) -> Result<String> {
    let dim = points.first().map(Point::dim).ok_or(Error::EmptySet)?;
    let mut out = String::new();
    out.push_str(&format!("# dim={dim}\n"));
    for p in points {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: p.dim() });
        }
        let row: Vec<String> = p.coords.iter().map(|c| format!("{c}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}
