use super::{Point, Region};

/// A finite union of closed lattice cells `[i, i+1] x [j, j+1]`, viewed at
/// physical scale `1/scale` (so a droplet on a lattice of size `L` is shown
/// as `(1/L) A_L`).
#[derive(Debug, Clone, PartialEq)]
pub struct PixelSet {
    origin: (i64, i64),
    width: usize,
    height: usize,
    cells: Vec<bool>,
    scale: f64,
}

impl PixelSet {
    pub fn new(origin: (i64, i64), width: usize, height: usize, scale: f64) -> Self {
        PixelSet { origin, width, height, cells: vec![false; width * height], scale }
    }

    /// Builds the tightest rectangle around `cells` (lattice indices).
    pub fn from_cells<I: IntoIterator<Item = (i64, i64)>>(cells: I, scale: f64) -> Self {
        let list: Vec<(i64, i64)> = cells.into_iter().collect();
        if list.is_empty() {
            return PixelSet::new((0, 0), 0, 0, scale);
        }
        let i0 = list.iter().map(|c| c.0).min().unwrap();
        let i1 = list.iter().map(|c| c.0).max().unwrap();
        let j0 = list.iter().map(|c| c.1).min().unwrap();
        let j1 = list.iter().map(|c| c.1).max().unwrap();
        let mut set = PixelSet::new((i0, j0), (i1 - i0 + 1) as usize, (j1 - j0 + 1) as usize, scale);
        for (i, j) in list {
            set.set(i, j, true);
        }
        set
    }

    /// Cells whose centres `(i + 1/2, j + 1/2)` lie in `scale * region`.
    pub fn rasterize<R: Region + ?Sized>(region: &R, scale: f64) -> Self {
        let (lo, hi) = region.bounds();
        let i0 = (lo[0] * scale - 1.0).floor() as i64;
        let i1 = (hi[0] * scale + 1.0).ceil() as i64;
        let j0 = (lo[1] * scale - 1.0).floor() as i64;
        let j1 = (hi[1] * scale + 1.0).ceil() as i64;
        let mut cells = Vec::new();
        for j in j0..=j1 {
            for i in i0..=i1 {
                let c = [(i as f64 + 0.5) / scale, (j as f64 + 0.5) / scale];
                if region.contains(c) {
                    cells.push((i, j));
                }
            }
        }
        PixelSet::from_cells(cells, scale)
    }

    pub fn origin(&self) -> (i64, i64) {
        self.origin
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn get(&self, i: i64, j: i64) -> bool {
        let (di, dj) = (i - self.origin.0, j - self.origin.1);
        if di < 0 || dj < 0 || di >= self.width as i64 || dj >= self.height as i64 {
            return false;
        }
        self.cells[dj as usize * self.width + di as usize]
    }

    /// Sets a cell inside the current rectangle.
    ///
    /// # Panics
    /// If `(i, j)` is outside the rectangle.
    pub fn set(&mut self, i: i64, j: i64, value: bool) {
        let (di, dj) = (i - self.origin.0, j - self.origin.1);
        assert!(di >= 0 && dj >= 0 && (di as usize) < self.width && (dj as usize) < self.height);
        self.cells[dj as usize * self.width + di as usize] = value;
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn area(&self) -> f64 {
        self.count() as f64 / (self.scale * self.scale)
    }

    pub fn cells(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let (w, o) = (self.width, self.origin);
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(move |(k, _)| (o.0 + (k % w) as i64, o.1 + (k / w) as i64))
    }

    /// Membership of a physical point in the closed union of cells.
    pub fn contains_point(&self, p: Point) -> bool {
        let q = [p[0] * self.scale, p[1] * self.scale];
        let fi = q[0].floor() as i64;
        let fj = q[1].floor() as i64;
        let is = if q[0] == q[0].floor() { vec![fi - 1, fi] } else { vec![fi] };
        let js = if q[1] == q[1].floor() { vec![fj - 1, fj] } else { vec![fj] };
        is.iter().any(|&i| js.iter().any(|&j| self.get(i, j)))
    }

    /// Boundary edges in lattice units, oriented with the set on the left.
    pub fn boundary_edges(&self) -> Vec<((i64, i64), (i64, i64))> {
        let mut edges = Vec::new();
        for (i, j) in self.cells() {
            if !self.get(i, j - 1) {
                edges.push(((i, j), (i + 1, j)));
            }
            if !self.get(i + 1, j) {
                edges.push(((i + 1, j), (i + 1, j + 1)));
            }
            if !self.get(i, j + 1) {
                edges.push(((i + 1, j + 1), (i, j + 1)));
            }
            if !self.get(i - 1, j) {
                edges.push(((i, j + 1), (i, j)));
            }
        }
        edges
    }

    /// Boundary chained into closed loops of lattice vertices. Outer
    /// boundaries run counter-clockwise, holes clockwise.
    pub fn boundary_loops(&self) -> Vec<Vec<(i64, i64)>> {
        use std::collections::HashMap;
        let edges = self.boundary_edges();
        let mut outgoing: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (k, e) in edges.iter().enumerate() {
            outgoing.entry(e.0).or_default().push(k);
        }
        let mut used = vec![false; edges.len()];
        let mut loops = Vec::new();
        for start in 0..edges.len() {
            if used[start] {
                continue;
            }
            let mut lp = Vec::new();
            let mut k = start;
            loop {
                used[k] = true;
                let (a, b) = edges[k];
                lp.push(a);
                let dir = (b.0 - a.0, b.1 - a.1);
                let cands = &outgoing[&b];
                // at a pinch vertex prefer the left turn so 4-connected pieces stay separate
                let next = cands
                    .iter()
                    .copied()
                    .filter(|&c| !used[c])
                    .max_by_key(|&c| {
                        let d = (edges[c].1 .0 - b.0, edges[c].1 .1 - b.1);
                        dir.0 * d.1 - dir.1 * d.0
                    });
                match next {
                    Some(c) => k = c,
                    None => break,
                }
            }
            loops.push(lp);
        }
        loops
    }

    /// Boundary segments in physical coordinates.
    pub fn boundary_segments_physical(&self) -> Vec<[Point; 2]> {
        let s = self.scale;
        self.boundary_edges()
            .into_iter()
            .map(|(a, b)| [[a.0 as f64 / s, a.1 as f64 / s], [b.0 as f64 / s, b.1 as f64 / s]])
            .collect()
    }

    /// Number of 4-connected (or 8-connected) components.
    pub fn components(&self, eight: bool) -> usize {
        let mut seen = vec![false; self.cells.len()];
        let (w, h) = (self.width as i64, self.height as i64);
        let mut count = 0;
        let mut stack = Vec::new();
        let nbrs: &[(i64, i64)] = if eight {
            &[(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)]
        } else {
            &[(1, 0), (-1, 0), (0, 1), (0, -1)]
        };
        for start in 0..self.cells.len() {
            if !self.cells[start] || seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(k) = stack.pop() {
                let (x, y) = ((k % self.width) as i64, (k / self.width) as i64);
                for &(dx, dy) in nbrs {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w || ny >= h {
                        continue;
                    }
                    let nk = (ny * w + nx) as usize;
                    if self.cells[nk] && !seen[nk] {
                        seen[nk] = true;
                        stack.push(nk);
                    }
                }
            }
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_of_square_block_is_one_loop() {
        let set = PixelSet::from_cells((0..3).flat_map(|i| (0..2).map(move |j| (i, j))), 1.0);
        let loops = set.boundary_loops();
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].len(), 10);
        let pts: Vec<Point> = loops[0].iter().map(|&(x, y)| [x as f64, y as f64]).collect();
        assert!((super::super::polygon_area(&pts) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_pair_gives_two_loops_and_two_components() {
        let set = PixelSet::from_cells([(0, 0), (1, 1)], 1.0);
        assert_eq!(set.boundary_loops().len(), 2);
        assert_eq!(set.components(false), 2);
        assert_eq!(set.components(true), 1);
    }

    #[test]
    fn ring_has_hole_loop() {
        let cells = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).filter(|&c| c != (1, 1));
        let set = PixelSet::from_cells(cells, 1.0);
        let loops = set.boundary_loops();
        assert_eq!(loops.len(), 2);
        let mut areas: Vec<f64> = loops
            .iter()
            .map(|l| super::super::polygon_area(&l.iter().map(|&(x, y)| [x as f64, y as f64]).collect::<Vec<_>>()))
            .collect();
        areas.sort_by(f64::total_cmp);
        assert_eq!(areas, vec![-1.0, 9.0]);
    }

    #[test]
    fn closed_membership() {
        let set = PixelSet::from_cells([(0, 0)], 2.0);
        assert!(set.contains_point([0.5, 0.25]));
        assert!(set.contains_point([0.0, 0.0]));
        assert!(!set.contains_point([0.51, 0.25]));
    }
}
