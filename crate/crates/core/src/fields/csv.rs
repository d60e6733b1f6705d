//! Plain CSV with header `x1[,x2[,x3]],component,value`, one row per node
//! and component.

use std::io::{BufRead, BufReader, Read, Write};
use std::sync::Arc;

use super::{Grid, SpatialField};
use crate::error::{Error, Result};

fn header(dim: usize) -> String {
    let mut cols: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    cols.push("component".into());
    cols.push("value".into());
    cols.join(",")
}

impl SpatialField {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let grid = self.grid();
        writeln!(w, "{}", header(grid.dim()))?;
        let mut line = String::new();
        for c in 0..self.components() {
            for idx in 0..grid.len() {
                line.clear();
                for a in 0..grid.dim() {
                    line.push_str(&format!("{},", grid.coord(idx, a)));
                }
                line.push_str(&format!("{},{}\n", c, self.value(idx, c)));
                w.write_all(line.as_bytes())?;
            }
        }
        Ok(())
    }

    /// Reads a field written by [`SpatialField::write_csv`]; rows are matched to
    /// nodes by their nearest grid index.
    pub fn read_csv<R: Read>(grid: &Arc<Grid>, r: R) -> Result<SpatialField> {
        let dim = grid.dim();
        let mut lines = BufReader::new(r).lines();
        let first = lines.next().ok_or_else(|| Error::Csv("empty input".into()))??;
        if first.trim() != header(dim) {
            return Err(Error::Csv(format!("unexpected header `{}`", first.trim())));
        }
        let mut rows: Vec<(usize, usize, f64)> = Vec::new();
        let mut ncomp = 0;
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != dim + 2 {
                return Err(Error::Csv(format!("line {}: expected {} columns", lineno + 2, dim + 2)));
            }
            let bad = |what: &str| Error::Csv(format!("line {}: bad {what}", lineno + 2));
            let x: Vec<f64> = cols[..dim]
                .iter()
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad("coordinate"))?;
            let c: usize = cols[dim].parse().map_err(|_| bad("component"))?;
            let v: f64 = cols[dim + 1].parse().map_err(|_| bad("value"))?;
            ncomp = ncomp.max(c + 1);
            rows.push((grid.nearest_index(&x), c, v));
        }
        if ncomp == 0 {
            return Err(Error::Csv("no data rows".into()));
        }
        let mut data = vec![0.0; ncomp * grid.len()];
        for (idx, c, v) in rows {
            data[c * grid.len() + idx] = v;
        }
        SpatialField::from_values(grid, ncomp, data)
    }
}
