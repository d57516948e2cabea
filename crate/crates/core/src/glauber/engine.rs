use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::{Connectivity, DropletSnapshot, GlauberError, Site, SpinConfiguration, Variant};
use crate::rng::{rng_from_seed, SimRng};

/// Snapshots `(time, configuration)` of one coupled configuration.
pub type Trajectory = Vec<(f64, SpinConfiguration)>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub time: f64,
    /// Events processed so far (rings of a site that could change value).
    pub events: u64,
    /// `true` when every driven configuration has no "−" site left.
    pub absorbed: bool,
}

const NONE: u32 = u32::MAX;

/// Sites that can change value in at least one layer, with a reference count
/// per site so layers can share the list.
#[derive(Debug, Clone)]
struct ActiveUnion {
    list: Vec<u32>,
    pos: Vec<u32>,
    refs: Vec<u16>,
}

impl ActiveUnion {
    fn new(n: usize) -> Self {
        ActiveUnion { list: Vec::new(), pos: vec![NONE; n], refs: vec![0; n] }
    }

    fn inc(&mut self, q: usize) {
        self.refs[q] += 1;
        if self.refs[q] == 1 {
            self.pos[q] = self.list.len() as u32;
            self.list.push(q as u32);
        }
    }

    fn dec(&mut self, q: usize) {
        self.refs[q] -= 1;
        if self.refs[q] == 0 {
            let p = self.pos[q] as usize;
            let last = *self.list.last().unwrap();
            self.list.swap_remove(p);
            if last as usize != q {
                self.pos[last as usize] = p as u32;
            }
            self.pos[q] = NONE;
        }
    }
}

#[derive(Debug, Clone)]
struct Layer {
    variant: Variant,
    minus: Vec<bool>,
    frozen: Vec<bool>,
    active: Vec<bool>,
    minus_count: usize,
    frozen_minus: usize,
    absorbed_at: Option<f64>,
}

/// Padded grid geometry plus scratch space shared by all layers.
#[derive(Debug, Clone)]
struct Grid {
    pw: usize,
    interior: Vec<bool>,
    connectivity: Connectivity,
    union: ActiveUnion,
    stamp: Vec<u32>,
    generation: u32,
    stack: Vec<usize>,
}

impl Grid {
    fn nbrs(&self, q: usize) -> [usize; 4] {
        [q + self.pw, q + 1, q - self.pw, q - 1]
    }

    fn minus_nbrs(&self, layer: &Layer, q: usize) -> usize {
        self.nbrs(q).iter().filter(|&&n| layer.minus[n]).count()
    }

    fn should_be_active(&self, layer: &Layer, q: usize) -> bool {
        if !self.interior[q] || layer.frozen[q] {
            return false;
        }
        let m = self.minus_nbrs(layer, q);
        if layer.minus[q] {
            m <= 2
        } else {
            m >= 2
        }
    }

    fn refresh(&mut self, layer: &mut Layer, q: usize) {
        let a = self.should_be_active(layer, q);
        if a != layer.active[q] {
            layer.active[q] = a;
            if a {
                self.union.inc(q);
            } else {
                self.union.dec(q);
            }
        }
    }

    fn set_spin(&mut self, layer: &mut Layer, q: usize, minus: bool) {
        layer.minus[q] = minus;
        if minus {
            layer.minus_count += 1;
        } else {
            layer.minus_count -= 1;
        }
        self.refresh(layer, q);
        for n in self.nbrs(q) {
            self.refresh(layer, n);
        }
    }

    /// Applies the heat-bath update at `q` with the shared coin. Returns
    /// whether the spin changed.
    fn update(&mut self, layer: &mut Layer, q: usize, coin_plus: bool) -> bool {
        if layer.frozen[q] || !self.interior[q] {
            return false;
        }
        let m = self.minus_nbrs(layer, q);
        let want_minus = match m {
            0 | 1 => false,
            2 => !coin_plus,
            _ => true,
        };
        if want_minus == layer.minus[q] {
            return false;
        }
        if !want_minus && layer.variant == Variant::ConnectivityPreserving && self.would_split(layer, q) {
            return false;
        }
        self.set_spin(layer, q, want_minus);
        if !want_minus && layer.variant == Variant::EagerFlip {
            let start = self.nbrs(q);
            self.cascade(layer, &start);
        }
        true
    }

    /// Flips to "+" every "−" site with three or more "+" neighbours,
    /// following the consequences until none is left.
    fn cascade(&mut self, layer: &mut Layer, start: &[usize]) {
        let mut todo: Vec<usize> = start.to_vec();
        while let Some(q) = todo.pop() {
            if layer.minus[q] && !layer.frozen[q] && self.minus_nbrs(layer, q) <= 1 {
                self.set_spin(layer, q, false);
                todo.extend(self.nbrs(q));
            }
        }
    }

    fn ring(&self) -> [isize; 8] {
        let w = self.pw as isize;
        [w, w + 1, 1, 1 - w, -w, -w - 1, -1, w - 1]
    }

    /// Would turning `q` to "+" disconnect the "−" cells around it?
    fn would_split(&mut self, layer: &Layer, q: usize) -> bool {
        let ring = self.ring();
        let cells: [usize; 8] = ring.map(|o| (q as isize + o) as usize);
        let r: [bool; 8] = cells.map(|c| layer.minus[c]);
        let mut parent = [0usize, 1, 2, 3, 4, 5, 6, 7];
        fn find(p: &mut [usize; 8], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        fn join(p: &mut [usize; 8], a: usize, b: usize) {
            let (ra, rb) = (find(p, a), find(p, b));
            p[ra] = rb;
        }
        for k in 0..8 {
            if r[k] && r[(k + 1) % 8] {
                join(&mut parent, k, (k + 1) % 8);
            }
        }
        let eight = self.connectivity == Connectivity::Eight;
        if eight {
            for k in (0..8).step_by(2) {
                if r[k] && r[(k + 2) % 8] {
                    join(&mut parent, k, (k + 2) % 8);
                }
            }
        }
        let mut reps: Vec<usize> = Vec::with_capacity(4);
        let mut roots: Vec<usize> = Vec::with_capacity(4);
        for k in 0..8 {
            let relevant = r[k] && (eight || k % 2 == 0);
            if relevant {
                let root = find(&mut parent, k);
                if !roots.contains(&root) {
                    roots.push(root);
                    reps.push(cells[k]);
                }
            }
        }
        if reps.len() <= 1 {
            return false;
        }
        !self.connected_without(layer, q, &reps)
    }

    /// Breadth-first search from `targets[0]` over "−" cells other than
    /// `removed`, stopping once every target is reached.
    fn connected_without(&mut self, layer: &Layer, removed: usize, targets: &[usize]) -> bool {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
        let g = self.generation;
        let w = self.pw as isize;
        let offs: Vec<isize> = match self.connectivity {
            Connectivity::Four => vec![1, -1, w, -w],
            Connectivity::Eight => vec![1, -1, w, -w, w + 1, w - 1, -w + 1, -w - 1],
        };
        let mut remaining = targets.len() - 1;
        self.stack.clear();
        self.stack.push(targets[0]);
        self.stamp[targets[0]] = g;
        self.stamp[removed] = g;
        while let Some(c) = self.stack.pop() {
            for &o in &offs {
                let n = (c as isize + o) as usize;
                if self.stamp[n] == g || !layer.minus[n] {
                    continue;
                }
                self.stamp[n] = g;
                if targets[1..].contains(&n) {
                    remaining -= 1;
                    if remaining == 0 {
                        return true;
                    }
                }
                self.stack.push(n);
            }
        }
        false
    }
}

/// Several configurations driven by one set of clocks and coins.
///
/// Each layer may use its own [`Variant`]; frozen sites are taken from each
/// configuration. All layers live on the union of their bounding rectangles,
/// with one extra "+" cell of padding, which is enough: a "+" site outside
/// the rectangle has at most one "−" neighbour and can never turn "−".
#[derive(Debug, Clone)]
pub struct CoupledGlauber {
    origin: Site,
    width: usize,
    height: usize,
    grid: Grid,
    layers: Vec<Layer>,
    clock: f64,
    pending: Option<f64>,
    rng: SimRng,
    events: u64,
}

impl CoupledGlauber {
    pub fn new(configs: &[(SpinConfiguration, Variant)], seed: u64) -> Result<Self, GlauberError> {
        Self::with_connectivity(configs, Connectivity::Four, seed)
    }

    pub fn with_connectivity(
        configs: &[(SpinConfiguration, Variant)],
        connectivity: Connectivity,
        seed: u64,
    ) -> Result<Self, GlauberError> {
        if configs.is_empty() {
            return Err(GlauberError::NoConfigurations);
        }
        let mut lo = (i64::MAX, i64::MAX);
        let mut hi = (i64::MIN, i64::MIN);
        for (c, _) in configs {
            if c.width() == 0 || c.height() == 0 {
                continue;
            }
            let (a, b) = c.bbox();
            lo = (lo.0.min(a.0), lo.1.min(a.1));
            hi = (hi.0.max(b.0), hi.1.max(b.1));
        }
        if lo.0 > hi.0 {
            lo = (0, 0);
            hi = (-1, -1);
        }
        let width = (hi.0 - lo.0 + 1) as usize;
        let height = (hi.1 - lo.1 + 1) as usize;
        let (pw, ph) = (width + 2, height + 2);
        let n = pw * ph;
        let mut interior = vec![false; n];
        for j in 1..=height {
            for i in 1..=width {
                interior[j * pw + i] = true;
            }
        }
        let mut grid = Grid {
            pw,
            interior,
            connectivity,
            union: ActiveUnion::new(n),
            stamp: vec![0; n],
            generation: 0,
            stack: Vec::new(),
        };
        let mut layers = Vec::with_capacity(configs.len());
        for (c, variant) in configs {
            let mut layer = Layer {
                variant: *variant,
                minus: vec![false; n],
                frozen: vec![false; n],
                active: vec![false; n],
                minus_count: 0,
                frozen_minus: 0,
                absorbed_at: None,
            };
            for (i, j) in c.minus_sites() {
                let q = ((j - lo.1 + 1) as usize) * pw + (i - lo.0 + 1) as usize;
                layer.minus[q] = true;
                layer.minus_count += 1;
            }
            for (i, j) in c.frozen_sites() {
                let q = ((j - lo.1 + 1) as usize) * pw + (i - lo.0 + 1) as usize;
                layer.frozen[q] = true;
                if layer.minus[q] {
                    layer.frozen_minus += 1;
                }
            }
            for q in 0..n {
                grid.refresh(&mut layer, q);
            }
            if *variant == Variant::EagerFlip {
                let start: Vec<usize> = (0..n).filter(|&q| layer.minus[q]).collect();
                grid.cascade(&mut layer, &start);
            }
            if layer.minus_count == 0 {
                layer.absorbed_at = Some(0.0);
            }
            layers.push(layer);
        }
        Ok(CoupledGlauber {
            origin: lo,
            width,
            height,
            grid,
            layers,
            clock: 0.0,
            pending: None,
            rng: rng_from_seed(seed),
            events: 0,
        })
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    pub fn layers(&self) -> usize {
        self.layers.len()
    }

    /// Number of sites currently scheduled (the total event rate).
    pub fn active_sites(&self) -> usize {
        self.grid.union.list.len()
    }

    pub fn minus_count(&self, layer: usize) -> usize {
        self.layers[layer].minus_count
    }

    /// Time at which the layer lost its last "−" site, if it has.
    pub fn absorbed_at(&self, layer: usize) -> Option<f64> {
        self.layers[layer].absorbed_at
    }

    fn report(&self) -> StepReport {
        StepReport {
            time: self.clock,
            events: self.events,
            absorbed: self.layers.iter().all(|l| l.minus_count == 0),
        }
    }

    fn next_event_time(&mut self) -> Option<f64> {
        let rate = self.grid.union.list.len();
        if rate == 0 {
            return None;
        }
        if self.pending.is_none() {
            let e: f64 = Exp1.sample(&mut self.rng);
            self.pending = Some(self.clock + e / rate as f64);
        }
        self.pending
    }

    fn fire(&mut self, t: f64) {
        self.clock = t;
        self.pending = None;
        self.events += 1;
        let k = self.rng.gen_range(0..self.grid.union.list.len());
        let q = self.grid.union.list[k] as usize;
        let coin_plus: bool = self.rng.gen();
        for layer in &mut self.layers {
            if self.grid.update(layer, q, coin_plus) && layer.minus_count == 0 && layer.absorbed_at.is_none() {
                layer.absorbed_at = Some(t);
            }
        }
    }

    /// Processes the next event, whatever its time. Returns its time, or
    /// `None` when no site can change.
    pub fn step_event(&mut self) -> Option<f64> {
        let t = self.next_event_time()?;
        self.fire(t);
        Some(t)
    }

    /// Runs the dynamics up to time `t`.
    pub fn step_to(&mut self, t: f64) -> Result<StepReport, GlauberError> {
        if t < self.clock {
            return Err(GlauberError::TimeReversal { clock: self.clock, target: t });
        }
        while let Some(te) = self.next_event_time() {
            if te > t {
                break;
            }
            self.fire(te);
        }
        self.clock = t;
        Ok(self.report())
    }

    /// Runs until every layer has no "−" site and returns the absorption
    /// time of each layer.
    pub fn run_until_absorbed(&mut self) -> Result<Vec<f64>, GlauberError> {
        for (k, l) in self.layers.iter().enumerate() {
            if l.frozen_minus > 0 {
                return Err(GlauberError::NonAbsorbing(format!("configuration {k} has frozen \"−\" sites")));
            }
        }
        while self.layers.iter().any(|l| l.minus_count > 0) {
            if self.step_event().is_none() {
                return Err(GlauberError::NonAbsorbing("no site can change but \"−\" sites remain".into()));
            }
        }
        Ok(self.layers.iter().map(|l| l.absorbed_at.unwrap()).collect())
    }

    /// The current configuration of one layer.
    pub fn config(&self, layer: usize) -> SpinConfiguration {
        let l = &self.layers[layer];
        let (w, h, pw) = (self.width, self.height, self.grid.pw);
        let mut minus = vec![false; w * h];
        let mut frozen = vec![false; w * h];
        for j in 0..h {
            for i in 0..w {
                let q = (j + 1) * pw + i + 1;
                minus[j * w + i] = l.minus[q];
                frozen[j * w + i] = l.frozen[q];
            }
        }
        SpinConfiguration::from_raw(self.origin, w, h, minus, frozen)
    }

    pub fn snapshot(&self, layer: usize, scale: f64) -> DropletSnapshot {
        DropletSnapshot::new(self.clock, &self.config(layer), scale)
    }
}

/// Single-configuration dynamics.
#[derive(Debug, Clone)]
pub struct Glauber {
    inner: CoupledGlauber,
}

impl Glauber {
    pub fn new(config: SpinConfiguration, seed: u64) -> Self {
        Self::with_variant(config, Variant::Standard, seed)
    }

    pub fn with_variant(config: SpinConfiguration, variant: Variant, seed: u64) -> Self {
        Self::with_options(config, variant, Connectivity::Four, seed)
    }

    pub fn with_options(config: SpinConfiguration, variant: Variant, connectivity: Connectivity, seed: u64) -> Self {
        let inner = CoupledGlauber::with_connectivity(&[(config, variant)], connectivity, seed)
            .expect("one configuration is always present");
        Glauber { inner }
    }

    pub fn clock(&self) -> f64 {
        self.inner.clock()
    }

    pub fn events(&self) -> u64 {
        self.inner.events()
    }

    pub fn minus_count(&self) -> usize {
        self.inner.minus_count(0)
    }

    pub fn is_empty(&self) -> bool {
        self.minus_count() == 0
    }

    pub fn config(&self) -> SpinConfiguration {
        self.inner.config(0)
    }

    pub fn step_event(&mut self) -> Option<f64> {
        self.inner.step_event()
    }

    pub fn step_to(&mut self, t: f64) -> Result<StepReport, GlauberError> {
        self.inner.step_to(t)
    }

    /// Runs until no "−" site is left and returns that time.
    pub fn disappearance_time(&mut self) -> Result<f64, GlauberError> {
        Ok(self.inner.run_until_absorbed()?[0])
    }

    pub fn snapshot(&self, scale: f64) -> DropletSnapshot {
        self.inner.snapshot(0, scale)
    }
}

/// Runs the configurations under shared randomness and records each of them
/// at the requested times (sorted ascending).
pub fn couple(
    configs: &[SpinConfiguration],
    variant: Variant,
    seed: u64,
    times: &[f64],
) -> Result<Vec<Trajectory>, GlauberError> {
    let pairs: Vec<(SpinConfiguration, Variant)> = configs.iter().map(|c| (c.clone(), variant)).collect();
    let mut engine = CoupledGlauber::new(&pairs, seed)?;
    let mut out: Vec<Trajectory> = vec![Vec::with_capacity(times.len()); configs.len()];
    for &t in times {
        engine.step_to(t)?;
        for (k, traj) in out.iter_mut().enumerate() {
            traj.push((t, engine.config(k)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glauber::Spin;
    use proptest::prelude::*;
    use rand::Rng;
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    use std::collections::HashMap;

    fn sorted_sites(c: &SpinConfiguration) -> Vec<Site> {
        let mut v: Vec<Site> = c.minus_sites().collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn single_site_droplet_dies_at_its_first_ring() {
        // An isolated "−" has four "+" neighbours: the first ring kills it.
        let n = 4000;
        let mean: f64 = (0..n)
            .map(|s| Glauber::new(SpinConfiguration::square((0, 0), 1), s).disappearance_time().unwrap())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 1.0).abs() < 4.0 * (1.0 / n as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn empty_configuration_is_absorbed_at_time_zero() {
        let mut g = Glauber::new(SpinConfiguration::empty((0, 0), 0, 0), 1);
        assert_eq!(g.disappearance_time().unwrap(), 0.0);
        assert_eq!(g.step_to(5.0).unwrap().events, 0);
    }

    #[test]
    fn frozen_minus_site_is_rejected_for_disappearance() {
        let mut c = SpinConfiguration::square((0, 0), 3);
        c.freeze([(1, 1)], Spin::Minus);
        let err = Glauber::new(c, 3).disappearance_time().unwrap_err();
        assert!(matches!(err, GlauberError::NonAbsorbing(_)));
    }

    #[test]
    fn frozen_sites_never_change() {
        let mut c = SpinConfiguration::square((0, 0), 6);
        c.freeze([(0, 0), (5, 5)], Spin::Minus);
        c.freeze([(2, 2)], Spin::Plus);
        let mut g = Glauber::new(c, 11);
        for _ in 0..2000 {
            if g.step_event().is_none() {
                break;
            }
            let now = g.config();
            assert!(now.is_minus(0, 0) && now.is_minus(5, 5) && !now.is_minus(2, 2));
        }
    }

    #[test]
    fn stepping_backwards_is_an_error() {
        let mut g = Glauber::new(SpinConfiguration::square((0, 0), 4), 1);
        g.step_to(1.0).unwrap();
        assert!(matches!(g.step_to(0.5), Err(GlauberError::TimeReversal { .. })));
    }

    #[test]
    fn intermediate_snapshots_do_not_perturb_the_path() {
        let c = SpinConfiguration::square((-5, -5), 10);
        let mut a = Glauber::new(c.clone(), 77);
        a.step_to(20.0).unwrap();
        let mut b = Glauber::new(c, 77);
        for k in 1..=40 {
            b.step_to(k as f64 * 0.5).unwrap();
            let _ = b.config();
        }
        assert_eq!(a.config(), b.config());
        assert_eq!(a.events(), b.events());
    }

    #[test]
    fn translation_gives_the_translated_path() {
        let c = SpinConfiguration::square((0, 0), 8);
        let mut a = Glauber::new(c.clone(), 5);
        let mut b = Glauber::new(c.translated((37, -12)), 5);
        a.step_to(15.0).unwrap();
        b.step_to(15.0).unwrap();
        assert_eq!(a.config().translated((37, -12)), b.config());
    }

    /// Mean disappearance time of the 2x2 block against the exact 16-state
    /// chain on those four cells.
    #[test]
    fn two_by_two_disappearance_time_matches_exact_chain() {
        let states: Vec<u16> = (0..16).collect();
        // Cells 0..3 are (0,0),(1,0),(0,1),(1,1); outside cells stay "+"
        // because each has at most one "−" neighbour.
        let pos = [(0i64, 0i64), (1, 0), (0, 1), (1, 1)];
        let is_nbr = |a: usize, b: usize| (pos[a].0 - pos[b].0).abs() + (pos[a].1 - pos[b].1).abs() == 1;
        // Expected hitting time of 0 from each state: solve by value iteration
        // on the embedded rates.
        let mut rates: HashMap<u16, Vec<(u16, f64)>> = HashMap::new();
        for &s in &states {
            let mut out = Vec::new();
            for c in 0..4 {
                let m = (0..4).filter(|&d| is_nbr(c, d) && s & (1 << d) != 0).count();
                let minus_here = s & (1 << c) != 0;
                // P(new value is minus)
                let p_minus = match m {
                    0 | 1 => 0.0,
                    2 => 0.5,
                    _ => 1.0,
                };
                if minus_here && p_minus < 1.0 {
                    out.push((s & !(1 << c), 1.0 - p_minus));
                }
                if !minus_here && p_minus > 0.0 {
                    out.push((s | (1 << c), p_minus));
                }
            }
            rates.insert(s, out);
        }
        let mut t = [0.0f64; 16];
        for _ in 0..20000 {
            let mut nt = [0.0f64; 16];
            for s in 1..16u16 {
                let out = &rates[&s];
                let total: f64 = out.iter().map(|o| o.1).sum();
                nt[s as usize] = (1.0 + out.iter().map(|&(d, r)| r * t[d as usize]).sum::<f64>()) / total;
            }
            t = nt;
        }
        let exact = t[15];
        let n = 20000;
        let times: Vec<f64> = (0..n)
            .map(|s| Glauber::new(SpinConfiguration::square((0, 0), 2), s).disappearance_time().unwrap())
            .collect();
        let mean = times.iter().sum::<f64>() / n as f64;
        let var = times.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        let se = (var / n as f64).sqrt();
        assert!((mean - exact).abs() < 4.0 * se, "mean {mean} exact {exact} se {se}");
    }

    /// Naive reference: every site of a fixed window has its own clock and
    /// the next ring is found by scanning all of them.
    fn naive_run(start: &SpinConfiguration, t_end: f64, rng: &mut SimRng) -> Vec<Site> {
        let (lo, hi) = start.bbox();
        let (i0, j0, i1, j1) = (lo.0 - 1, lo.1 - 1, hi.0 + 1, hi.1 + 1);
        let mut c = start.clone();
        let sites: Vec<Site> = (j0..=j1).flat_map(|j| (i0..=i1).map(move |i| (i, j))).collect();
        let mut t = 0.0;
        loop {
            let e: f64 = Exp1.sample(rng);
            t += e / sites.len() as f64;
            if t > t_end {
                break;
            }
            let (i, j) = sites[rng.gen_range(0..sites.len())];
            let m = [(i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)].iter().filter(|s| c.is_minus(s.0, s.1)).count();
            let minus = match m {
                0 | 1 => false,
                2 => rng.gen::<bool>(),
                _ => true,
            };
            c.set(i, j, if minus { Spin::Minus } else { Spin::Plus });
        }
        sorted_sites(&c)
    }

    #[test]
    fn law_matches_naive_full_clock_simulation_on_3x3() {
        let start = SpinConfiguration::square((0, 0), 3);
        let t_end = 0.5;
        let n = 100_000u64;
        let mut fast: HashMap<Vec<Site>, f64> = HashMap::new();
        let mut slow: HashMap<Vec<Site>, f64> = HashMap::new();
        let mut rng = rng_from_seed(999);
        for s in 0..n {
            let mut g = Glauber::new(start.clone(), s);
            g.step_to(t_end).unwrap();
            *fast.entry(sorted_sites(&g.config())).or_default() += 1.0;
            *slow.entry(naive_run(&start, t_end, &mut rng)).or_default() += 1.0;
        }
        // Two-sample chi-square over states seen at least 20 times in total,
        // pooling the rest.
        let mut keys: Vec<&Vec<Site>> = fast.keys().chain(slow.keys()).collect();
        keys.sort();
        keys.dedup();
        let (mut chi2, mut dof) = (0.0, 0usize);
        let (mut pool_a, mut pool_b) = (0.0, 0.0);
        for k in keys {
            let a = fast.get(k).copied().unwrap_or(0.0);
            let b = slow.get(k).copied().unwrap_or(0.0);
            if a + b < 20.0 {
                pool_a += a;
                pool_b += b;
                continue;
            }
            chi2 += (a - b).powi(2) / (a + b);
            dof += 1;
        }
        if pool_a + pool_b > 0.0 {
            chi2 += (pool_a - pool_b).powi(2) / (pool_a + pool_b);
            dof += 1;
        }
        let dof = dof.saturating_sub(1).max(1) as f64;
        let critical = ChiSquared::new(dof).unwrap().inverse_cdf(0.99);
        assert!(chi2 < critical, "chi2 {chi2} dof {dof} critical {critical}");
    }

    #[test]
    fn eager_flip_initial_cascade_removes_protrusions() {
        // A 3x3 block with a single-cell spike: the spike has three "+"
        // neighbours and goes at once.
        let mut sites: Vec<Site> = (0..3).flat_map(|j| (0..3).map(move |i| (i, j))).collect();
        sites.push((3, 1));
        let g = Glauber::with_variant(SpinConfiguration::from_sites(sites), Variant::EagerFlip, 1);
        assert_eq!(g.minus_count(), 9);
    }

    #[test]
    fn connectivity_preserving_never_splits() {
        // A dumbbell: two blocks joined by a one-cell-wide bar.
        let mut sites: Vec<Site> = Vec::new();
        for j in 0..4 {
            for i in 0..4 {
                sites.push((i, j));
                sites.push((i + 9, j));
            }
        }
        for i in 4..9 {
            sites.push((i, 1));
        }
        let c = SpinConfiguration::from_sites(sites);
        for seed in 0..20 {
            let mut g = Glauber::with_variant(c.clone(), Variant::ConnectivityPreserving, seed);
            while g.step_event().is_some() && !g.is_empty() {
                let set = g.config().to_pixels(1.0);
                assert!(set.components(false) <= 1);
            }
        }
    }

    #[test]
    fn eight_connectivity_allows_diagonal_necks() {
        let sites = vec![(0, 0), (1, 0), (1, 1), (2, 1)];
        let mut g = Glauber::with_options(
            SpinConfiguration::from_sites(sites),
            Variant::ConnectivityPreserving,
            Connectivity::Eight,
            4,
        );
        while g.step_event().is_some() && !g.is_empty() {
            assert!(g.config().to_pixels(1.0).components(true) <= 1);
        }
    }

    #[test]
    fn identical_coupled_configurations_stay_identical() {
        let a = SpinConfiguration::square((0, 0), 7);
        let traj = couple(&[a.clone(), a], Variant::Standard, 8, &[1.0, 3.0, 9.0]).unwrap();
        for k in 0..3 {
            assert_eq!(traj[0][k].1, traj[1][k].1);
        }
    }

    fn arb_droplet() -> impl Strategy<Value = Vec<Site>> {
        prop::collection::vec((0i64..8, 0i64..8), 1..40)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn coupling_preserves_inclusion(big in arb_droplet(), keep in prop::collection::vec(any::<bool>(), 40), seed in 0u64..1000) {
            let small: Vec<Site> = big.iter().zip(keep.iter()).filter(|(_, &k)| k).map(|(s, _)| *s).collect();
            let a = SpinConfiguration::from_sites(big.clone());
            let b = SpinConfiguration::from_sites(small);
            let mut e = CoupledGlauber::new(&[(a, Variant::Standard), (b, Variant::Standard)], seed).unwrap();
            while e.step_event().is_some() {
                prop_assert!(e.config(0).contains_config(&e.config(1)));
                if e.minus_count(0) == 0 { break; }
            }
        }

        #[test]
        fn eager_flip_stays_inside_standard(big in arb_droplet(), seed in 0u64..1000) {
            let a = SpinConfiguration::from_sites(big);
            let mut e = CoupledGlauber::new(&[(a.clone(), Variant::Standard), (a, Variant::EagerFlip)], seed).unwrap();
            prop_assert!(e.config(0).contains_config(&e.config(1)));
            while e.step_event().is_some() {
                prop_assert!(e.config(0).contains_config(&e.config(1)));
                if e.minus_count(0) == 0 { break; }
            }
        }

        #[test]
        fn same_seed_same_path(big in arb_droplet(), seed in 0u64..1000) {
            let a = SpinConfiguration::from_sites(big);
            let mut g1 = Glauber::new(a.clone(), seed);
            let mut g2 = Glauber::new(a, seed);
            let t1 = g1.disappearance_time().unwrap();
            let t2 = g2.disappearance_time().unwrap();
            prop_assert_eq!(t1.to_bits(), t2.to_bits());
        }
    }
}
