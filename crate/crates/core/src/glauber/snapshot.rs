use std::io::Write;

use serde::Serialize;

use super::SpinConfiguration;
use crate::geometry::{PixelSet, Point};

/// A droplet at one instant, rescaled by `1/scale`.
#[derive(Debug, Clone)]
pub struct DropletSnapshot {
    pub time: f64,
    pub scale: f64,
    pub pixels: PixelSet,
}

/// One horizontal run of "−" cells: row `j`, cells `start .. start + len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Run {
    pub row: i64,
    pub start: i64,
    pub len: usize,
}

impl DropletSnapshot {
    pub fn new(time: f64, config: &SpinConfiguration, scale: f64) -> Self {
        DropletSnapshot { time, scale, pixels: config.to_pixels(scale) }
    }

    pub fn minus_count(&self) -> usize {
        self.pixels.count()
    }

    /// Area of the rescaled droplet.
    pub fn area(&self) -> f64 {
        self.pixels.area()
    }

    /// Boundary loops in rescaled coordinates (outer loops counter-clockwise).
    pub fn boundary_loops(&self) -> Vec<Vec<Point>> {
        let s = self.scale;
        self.pixels
            .boundary_loops()
            .into_iter()
            .map(|lp| lp.into_iter().map(|(i, j)| [i as f64 / s, j as f64 / s]).collect())
            .collect()
    }

    /// Run-length encoding of the "−" cells, row by row.
    pub fn runs(&self) -> Vec<Run> {
        let (o, w, h) = (self.pixels.origin(), self.pixels.width(), self.pixels.height());
        let mut out = Vec::new();
        for dj in 0..h as i64 {
            let j = o.1 + dj;
            let mut di = 0i64;
            while di < w as i64 {
                if self.pixels.get(o.0 + di, j) {
                    let start = di;
                    while di < w as i64 && self.pixels.get(o.0 + di, j) {
                        di += 1;
                    }
                    out.push(Run { row: j, start: o.0 + start, len: (di - start) as usize });
                } else {
                    di += 1;
                }
            }
        }
        out
    }

    /// Writes the runs as CSV with header `row,start,len`.
    pub fn write_runs_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in self.runs() {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}
