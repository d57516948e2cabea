use crate::geometry::{PixelSet, Region};

/// A lattice site `(i + 1/2, j + 1/2)`, stored by its integer corner `(i, j)`.
pub type Site = (i64, i64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Plus,
    Minus,
}

/// The set of "−" sites inside a bounding rectangle, plus frozen sites.
///
/// Cell `(i, j)` is the unit square `[i, i+1] x [j, j+1]` centred at the site
/// `(i + 1/2, j + 1/2)`. Everything outside the rectangle is "+".
#[derive(Debug, Clone)]
pub struct SpinConfiguration {
    origin: Site,
    width: usize,
    height: usize,
    minus: Vec<bool>,
    frozen: Vec<bool>,
}

impl SpinConfiguration {
    /// All-"+" configuration on the given rectangle.
    pub fn empty(origin: Site, width: usize, height: usize) -> Self {
        SpinConfiguration {
            origin,
            width,
            height,
            minus: vec![false; width * height],
            frozen: vec![false; width * height],
        }
    }

    /// Tightest rectangle around the given "−" sites.
    pub fn from_sites<I: IntoIterator<Item = Site>>(sites: I) -> Self {
        let set = PixelSet::from_cells(sites, 1.0);
        Self::from_pixels(&set)
    }

    pub fn from_pixels(set: &PixelSet) -> Self {
        let mut c = SpinConfiguration::empty(set.origin(), set.width(), set.height());
        for (i, j) in set.cells() {
            c.set(i, j, Spin::Minus);
        }
        c
    }

    /// `n x n` block of "−" sites with lower-left cell `corner`.
    pub fn square(corner: Site, n: usize) -> Self {
        let sites = (0..n as i64).flat_map(|dj| (0..n as i64).map(move |di| (corner.0 + di, corner.1 + dj)));
        Self::from_sites(sites)
    }

    /// Sites `x` of `(Z + 1/2)^2` with `x in scale * region`.
    pub fn rasterize<R: Region + ?Sized>(region: &R, scale: f64) -> Self {
        Self::from_pixels(&PixelSet::rasterize(region, scale))
    }

    pub fn origin(&self) -> Site {
        self.origin
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// `(lower-left cell, upper-right cell)` of the bounding rectangle.
    pub fn bbox(&self) -> (Site, Site) {
        (self.origin, (self.origin.0 + self.width as i64 - 1, self.origin.1 + self.height as i64 - 1))
    }

    fn index(&self, i: i64, j: i64) -> Option<usize> {
        let (di, dj) = (i - self.origin.0, j - self.origin.1);
        (di >= 0 && dj >= 0 && (di as usize) < self.width && (dj as usize) < self.height)
            .then(|| dj as usize * self.width + di as usize)
    }

    pub fn spin(&self, i: i64, j: i64) -> Spin {
        match self.index(i, j) {
            Some(k) if self.minus[k] => Spin::Minus,
            _ => Spin::Plus,
        }
    }

    pub fn is_minus(&self, i: i64, j: i64) -> bool {
        self.spin(i, j) == Spin::Minus
    }

    pub fn is_frozen(&self, i: i64, j: i64) -> bool {
        self.index(i, j).map(|k| self.frozen[k]).unwrap_or(false)
    }

    /// Sets a spin, growing the rectangle if a "−" is placed outside it.
    pub fn set(&mut self, i: i64, j: i64, spin: Spin) {
        if self.index(i, j).is_none() {
            if spin == Spin::Plus {
                return;
            }
            self.grow_to_include(i, j);
        }
        let k = self.index(i, j).unwrap();
        self.minus[k] = spin == Spin::Minus;
    }

    fn grow_to_include(&mut self, i: i64, j: i64) {
        let (lo, hi) = if self.width == 0 || self.height == 0 { ((i, j), (i, j)) } else { self.bbox() };
        let (ni0, nj0) = (lo.0.min(i), lo.1.min(j));
        let (ni1, nj1) = (hi.0.max(i), hi.1.max(j));
        let mut out = SpinConfiguration::empty((ni0, nj0), (ni1 - ni0 + 1) as usize, (nj1 - nj0 + 1) as usize);
        for dj in 0..self.height {
            for di in 0..self.width {
                let k = dj * self.width + di;
                let (x, y) = (self.origin.0 + di as i64, self.origin.1 + dj as i64);
                let nk = out.index(x, y).unwrap();
                out.minus[nk] = self.minus[k];
                out.frozen[nk] = self.frozen[k];
            }
        }
        *self = out;
    }

    /// Pins `sites` to `value`: they never update again.
    pub fn freeze<I: IntoIterator<Item = Site>>(&mut self, sites: I, value: Spin) {
        for (i, j) in sites {
            if self.index(i, j).is_none() {
                self.grow_to_include(i, j);
            }
            let k = self.index(i, j).unwrap();
            self.minus[k] = value == Spin::Minus;
            self.frozen[k] = true;
        }
    }

    pub fn frozen_sites(&self) -> impl Iterator<Item = Site> + '_ {
        self.cells_where(&self.frozen)
    }

    fn cells_where<'a>(&'a self, mask: &'a [bool]) -> impl Iterator<Item = Site> + 'a {
        let (w, o) = (self.width, self.origin);
        mask.iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(k, _)| (o.0 + (k % w) as i64, o.1 + (k / w) as i64))
    }

    pub fn minus_sites(&self) -> impl Iterator<Item = Site> + '_ {
        self.cells_where(&self.minus)
    }

    pub fn minus_count(&self) -> usize {
        self.minus.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.minus_count() == 0
    }

    /// `true` when every "−" site of `other` is "−" here.
    pub fn contains_config(&self, other: &SpinConfiguration) -> bool {
        other.minus_sites().all(|(i, j)| self.is_minus(i, j))
    }

    pub fn translated(&self, d: Site) -> Self {
        let mut c = self.clone();
        c.origin = (c.origin.0 + d.0, c.origin.1 + d.1);
        c
    }

    /// The droplet `(1/scale) A` as a pixel set.
    pub fn to_pixels(&self, scale: f64) -> PixelSet {
        let mut set = PixelSet::new(self.origin, self.width, self.height, scale);
        for (i, j) in self.minus_sites() {
            set.set(i, j, true);
        }
        set
    }

    pub(crate) fn from_raw(origin: Site, width: usize, height: usize, minus: Vec<bool>, frozen: Vec<bool>) -> Self {
        debug_assert_eq!(minus.len(), width * height);
        SpinConfiguration { origin, width, height, minus, frozen }
    }
}

/// Two configurations are equal when they have the same "−" sites and the
/// same frozen sites, whatever their bounding rectangles.
impl PartialEq for SpinConfiguration {
    fn eq(&self, other: &Self) -> bool {
        let mut a: Vec<Site> = self.minus_sites().collect();
        let mut b: Vec<Site> = other.minus_sites().collect();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return false;
        }
        let mut fa: Vec<(Site, bool)> = self.frozen_sites().map(|s| (s, self.is_minus(s.0, s.1))).collect();
        let mut fb: Vec<(Site, bool)> = other.frozen_sites().map(|s| (s, other.is_minus(s.0, s.1))).collect();
        fa.sort_unstable();
        fb.sort_unstable();
        fa == fb
    }
}

impl Eq for SpinConfiguration {}
