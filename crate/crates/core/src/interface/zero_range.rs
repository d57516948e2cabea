use rand::Rng;
use rand_distr::{Distribution, Exp1, Geometric};
use serde::{Deserialize, Serialize};

use super::path::snap;
use super::{HeightProfile, InterfaceError};
use crate::pde::Grid1D;
use crate::rng::{rng_from_seed, SimRng};

/// Integer heights on consecutive sites; the two end sites are fixed
/// boundary values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZeroRangeState {
    first: i64,
    heights: Vec<i64>,
}

/// Which neighbour a column moves towards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// How opposite particles annihilate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Annihilation {
    /// Particles of different type annihilate when they meet on a site (the
    /// plain height dynamics).
    #[default]
    SameSite,
    /// Particles of different type annihilate as soon as they are at
    /// distance one: a column strictly higher than both neighbours drops
    /// instantly to the higher neighbour.
    Adjacent,
}

impl ZeroRangeState {
    pub fn new(first: i64, heights: Vec<i64>) -> Result<Self, InterfaceError> {
        if heights.len() < 2 {
            return Err(InterfaceError::InvalidPath("need at least the two boundary sites".into()));
        }
        Ok(ZeroRangeState { first, heights })
    }

    /// All-zero state on `{-L, ..., L+1}`.
    pub fn flat(len: i64) -> Self {
        ZeroRangeState { first: -len, heights: vec![0; 2 * len as usize + 2] }
    }

    pub fn first(&self) -> i64 {
        self.first
    }

    pub fn last(&self) -> i64 {
        self.first + self.heights.len() as i64 - 1
    }

    pub fn heights(&self) -> &[i64] {
        &self.heights
    }

    pub fn len(&self) -> usize {
        self.heights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heights.is_empty()
    }

    pub fn get(&self, x: i64) -> i64 {
        self.heights[(x - self.first) as usize]
    }

    /// `h_last - h_first`, conserved by the dynamics.
    pub fn total_increment(&self) -> i64 {
        self.heights[self.heights.len() - 1] - self.heights[0]
    }

    /// Vertical translate, boundary values included.
    pub fn shifted(&self, a: i64) -> Self {
        ZeroRangeState { first: self.first, heights: self.heights.iter().map(|h| h + a).collect() }
    }

    pub fn particles(&self) -> ParticleView {
        ParticleView::new(self)
    }

    pub fn profile(&self, time: f64) -> HeightProfile {
        HeightProfile { time, first: self.first, heights: self.heights.clone() }
    }

    pub fn to_grid(&self) -> Grid1D {
        Grid1D::new(self.first, self.heights.iter().map(|&h| h as f64).collect())
    }

    fn same_lattice(&self, other: &Self) -> bool {
        self.first == other.first && self.heights.len() == other.heights.len()
    }

    /// `self_x >= other_x` for every site.
    pub fn dominates(&self, other: &Self) -> bool {
        self.same_lattice(other) && self.heights.iter().zip(&other.heights).all(|(a, b)| a >= b)
    }

    /// Applies one ring of the clock of column `x` on `side`: the column
    /// moves one unit towards that neighbour. Returns whether anything
    /// changed. Boundary columns and out-of-range sites are ignored.
    pub fn apply(&mut self, x: i64, side: Side, rule: Annihilation) -> bool {
        let i = x - self.first;
        if i <= 0 || i >= self.heights.len() as i64 - 1 {
            return false;
        }
        let i = i as usize;
        let j = match side {
            Side::Left => i - 1,
            Side::Right => i + 1,
        };
        let d = (self.heights[j] - self.heights[i]).signum();
        if d == 0 {
            return false;
        }
        self.heights[i] += d;
        if rule == Annihilation::Adjacent {
            self.cascade(&[i.saturating_sub(1), i, i + 1]);
        }
        true
    }

    /// Lowers every interior column strictly above both neighbours to the
    /// higher neighbour, repeatedly, starting from the listed columns.
    fn cascade(&mut self, seeds: &[usize]) {
        let n = self.heights.len();
        let mut stack: Vec<usize> = seeds.to_vec();
        while let Some(k) = stack.pop() {
            if k == 0 || k >= n - 1 {
                continue;
            }
            let top = self.heights[k - 1].max(self.heights[k + 1]);
            if self.heights[k] > top {
                self.heights[k] = top;
                stack.push(k - 1);
                stack.push(k + 1);
            }
        }
    }

    fn cascade_all(&mut self) {
        let all: Vec<usize> = (1..self.heights.len() - 1).collect();
        self.cascade(&all);
    }
}

/// Gradient view: `eta_x = h_{x+1} - h_x` on `first..last-1`; `eta_x > 0`
/// counts A particles at `x`, `eta_x < 0` counts B particles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParticleView {
    pub first: i64,
    pub eta: Vec<i64>,
    pub a_count: i64,
    pub b_count: i64,
}

impl ParticleView {
    fn new(state: &ZeroRangeState) -> Self {
        let eta: Vec<i64> = state.heights.windows(2).map(|w| w[1] - w[0]).collect();
        let a_count = eta.iter().filter(|&&e| e > 0).sum();
        let b_count = -eta.iter().filter(|&&e| e < 0).sum::<i64>();
        ParticleView { first: state.first, eta, a_count, b_count }
    }

    /// Number of sign changes along the lattice, zeros skipped.
    pub fn sign_changes(&self) -> usize {
        let signs: Vec<i64> = self.eta.iter().map(|e| e.signum()).filter(|&s| s != 0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Checks that every A particle lies left of every B particle.
    pub fn check_species_ordering(&self) -> Result<(), InterfaceError> {
        let first_b = self.eta.iter().position(|&e| e < 0);
        let last_a = self.eta.iter().rposition(|&e| e > 0);
        match (first_b, last_a) {
            (Some(b), Some(a)) if b < a => Err(InterfaceError::MixedSpeciesOrdering {
                b: self.first + b as i64,
                a: self.first + a as i64,
            }),
            _ => Ok(()),
        }
    }

    /// `eta_x >= other_x` for every site.
    pub fn dominates(&self, other: &Self) -> bool {
        self.first == other.first
            && self.eta.len() == other.eta.len()
            && self.eta.iter().zip(&other.eta).all(|(a, b)| a >= b)
    }
}

/// `h_x = floor(L phi(x / L))` on `{-L, ..., L+1}`, boundaries set to 0.
/// `phi` lives on `[-1, 1]` and vanishes at both ends.
pub fn zr_initial<F: Fn(f64) -> f64>(phi: F, len: i64) -> ZeroRangeState {
    let grid = Grid1D::from_profile(phi, len);
    let mut heights: Vec<i64> = grid.values.iter().map(|&v| snap(v).floor() as i64).collect();
    let n = heights.len();
    heights[0] = 0;
    heights[n - 1] = 0;
    ZeroRangeState { first: -len, heights }
}

/// Random initial heights with independent gradients: `eta_x` is a
/// geometric variable on `{0, 1, ...}` with mean
/// `m_x = L (phi((x+1)/L) - phi(x/L))` when `m_x >= 0`, and minus one with
/// mean `-m_x` otherwise (`phi((L+1)/L)` is taken as 0). `h_{-L} = 0`; the
/// right boundary value is the random total.
pub fn zr_geometric_initial<F: Fn(f64) -> f64>(phi: F, len: i64, seed: u64) -> ZeroRangeState {
    let mut rng = rng_from_seed(seed);
    let l = len as f64;
    let phi_at = |x: i64| if x > len { 0.0 } else { phi(x as f64 / l) };
    let mut heights = Vec::with_capacity(2 * len as usize + 2);
    let mut h = 0;
    heights.push(h);
    for x in -len..=len {
        let m = l * (phi_at(x + 1) - phi_at(x));
        h += geometric_signed(m, &mut rng);
        heights.push(h);
    }
    ZeroRangeState { first: -len, heights }
}

/// Geometric on `{0, 1, ...}` with mean `|m|`, signed like `m`.
fn geometric_signed(m: f64, rng: &mut SimRng) -> i64 {
    if m == 0.0 {
        return 0;
    }
    let g = Geometric::new(1.0 / (1.0 + m.abs())).expect("p in (0, 1]");
    let k = g.sample(rng) as i64;
    if m > 0.0 {
        k
    } else {
        -k
    }
}

/// Height dynamics. Every interior column carries two rate-1/2 clocks, one
/// per side; a ring moves the column one unit towards that neighbour.
#[derive(Debug, Clone)]
pub struct ZeroRange {
    state: ZeroRangeState,
    rule: Annihilation,
    clock: f64,
    next: f64,
    rng: SimRng,
    moves: u64,
}

impl ZeroRange {
    pub fn new(state: ZeroRangeState, seed: u64) -> Self {
        Self::with_rng(state, Annihilation::SameSite, rng_from_seed(seed)).expect("same-site rule has no precondition")
    }

    /// Engine with an explicit annihilation rule. The adjacent rule needs
    /// every A particle left of every B particle; strictly isolated maxima
    /// in the initial state are removed at time 0.
    pub fn with_rng(mut state: ZeroRangeState, rule: Annihilation, rng: SimRng) -> Result<Self, InterfaceError> {
        if rule == Annihilation::Adjacent {
            state.particles().check_species_ordering()?;
            state.cascade_all();
        }
        let mut e = ZeroRange { state, rule, clock: 0.0, next: 0.0, rng, moves: 0 };
        e.next = e.draw_next(0.0);
        Ok(e)
    }

    fn total_rate(&self) -> f64 {
        self.state.heights.len().saturating_sub(2) as f64
    }

    fn draw_next(&mut self, from: f64) -> f64 {
        let rate = self.total_rate();
        if rate == 0.0 {
            return f64::INFINITY;
        }
        let e: f64 = Exp1.sample(&mut self.rng);
        from + e / rate
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn state(&self) -> &ZeroRangeState {
        &self.state
    }

    pub fn rule(&self) -> Annihilation {
        self.rule
    }

    /// Number of rings that changed the state.
    pub fn moves(&self) -> u64 {
        self.moves
    }

    /// Next ring: `(time, column, side, changed)`.
    pub fn step_event(&mut self) -> Option<(f64, i64, Side, bool)> {
        let (t, x, side) = next_ring(&mut self.rng, &mut self.next, self.state.first, self.state.len())?;
        self.clock = t;
        let changed = self.state.apply(x, side, self.rule);
        self.moves += changed as u64;
        self.next = self.draw_next(t);
        Some((t, x, side, changed))
    }

    pub fn step_to(&mut self, t: f64) -> Result<(), InterfaceError> {
        if t < self.clock {
            return Err(InterfaceError::TimeReversal { clock: self.clock, target: t });
        }
        while self.next <= t {
            self.step_event();
        }
        self.clock = t;
        Ok(())
    }
}

/// Consumes the pending ring time and draws its location.
fn next_ring(rng: &mut SimRng, next: &mut f64, first: i64, len: usize) -> Option<(f64, i64, Side)> {
    if !next.is_finite() {
        return None;
    }
    let k = rng.gen_range(0..2 * (len - 2));
    let x = first + 1 + (k / 2) as i64;
    let side = if k % 2 == 0 { Side::Left } else { Side::Right };
    Some((*next, x, side))
}

/// The state at time `t` of the height dynamics.
pub fn zr_run(state: &ZeroRangeState, t: f64, seed: u64) -> ZeroRangeState {
    let mut e = ZeroRange::new(state.clone(), seed);
    e.step_to(t.max(0.0)).expect("forward in time");
    e.state
}

/// The state at time `t` of the dynamics where opposite particles
/// annihilate at distance one. With one highest column deleted
/// ([`remove_top_column`]) this follows the plain height dynamics.
pub fn zr_variant_annihilate_adjacent(
    state: &ZeroRangeState,
    t: f64,
    seed: u64,
) -> Result<ZeroRangeState, InterfaceError> {
    let mut e = ZeroRange::with_rng(state.clone(), Annihilation::Adjacent, rng_from_seed(seed))?;
    e.step_to(t.max(0.0))?;
    Ok(e.state)
}

/// Deletes the rightmost interior column of maximal height; the sites to its
/// right shift left by one. `None` if the maximum is attained only on the
/// boundary.
pub fn remove_top_column(state: &ZeroRangeState) -> Option<ZeroRangeState> {
    let n = state.heights.len();
    let max = *state.heights.iter().max()?;
    let i = (1..n - 1).rev().find(|&i| state.heights[i] == max)?;
    let mut heights = state.heights.clone();
    heights.remove(i);
    Some(ZeroRangeState { first: state.first, heights })
}

/// Several states driven by one event stream.
#[derive(Debug, Clone)]
pub struct CoupledZeroRange {
    states: Vec<ZeroRangeState>,
    rule: Annihilation,
    clock: f64,
    next: f64,
    rng: SimRng,
}

impl CoupledZeroRange {
    pub fn new(states: Vec<ZeroRangeState>, rule: Annihilation, seed: u64) -> Result<Self, InterfaceError> {
        let Some(head) = states.first() else {
            return Err(InterfaceError::NoStates);
        };
        if states.iter().any(|s| !s.same_lattice(head)) {
            return Err(InterfaceError::LatticeMismatch);
        }
        let rate = head.len().saturating_sub(2) as f64;
        let mut states = states;
        if rule == Annihilation::Adjacent {
            for s in &mut states {
                s.particles().check_species_ordering()?;
                s.cascade_all();
            }
        }
        let mut rng = rng_from_seed(seed);
        let next = if rate == 0.0 { f64::INFINITY } else { Distribution::<f64>::sample(&Exp1, &mut rng) / rate };
        Ok(CoupledZeroRange { states, rule, clock: 0.0, next, rng })
    }

    pub fn states(&self) -> &[ZeroRangeState] {
        &self.states
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn step_event(&mut self) -> Option<(f64, i64, Side)> {
        let (first, len) = (self.states[0].first, self.states[0].len());
        let (t, x, side) = next_ring(&mut self.rng, &mut self.next, first, len)?;
        self.clock = t;
        for s in &mut self.states {
            s.apply(x, side, self.rule);
        }
        let e: f64 = Exp1.sample(&mut self.rng);
        self.next = t + e / (len - 2) as f64;
        Some((t, x, side))
    }

    pub fn step_to(&mut self, t: f64) -> Result<(), InterfaceError> {
        if t < self.clock {
            return Err(InterfaceError::TimeReversal { clock: self.clock, target: t });
        }
        while self.next <= t {
            self.step_event();
        }
        self.clock = t;
        Ok(())
    }
}

/// Result of [`zr_couple`].
#[derive(Debug, Clone, Serialize)]
pub struct ZrCoupling {
    pub times: Vec<f64>,
    /// `states[i][j]`: layer `j` at `times[i]`.
    pub states: Vec<Vec<ZeroRangeState>>,
    /// Whether consecutive layers stayed ordered in height at every sampled
    /// time; `None` when the initial layers are not ordered.
    pub height_order_held: Option<bool>,
    /// Same for the gradients.
    pub gradient_order_held: Option<bool>,
}

/// Direction of the order between consecutive layers, if comparable.
fn chain_order<T, F: Fn(&T, &T) -> bool>(items: &[T], geq: F) -> Option<Vec<bool>> {
    items
        .windows(2)
        .map(|w| {
            if geq(&w[0], &w[1]) {
                Some(true)
            } else if geq(&w[1], &w[0]) {
                Some(false)
            } else {
                None
            }
        })
        .collect()
}

fn chain_holds<T, F: Fn(&T, &T) -> bool>(items: &[T], dirs: &[bool], geq: F) -> bool {
    items.windows(2).zip(dirs).all(|(w, &d)| if d { geq(&w[0], &w[1]) } else { geq(&w[1], &w[0]) })
}

/// Runs the height dynamics from each state with shared clocks and records
/// all layers at the ascending `times`. Order checks are only performed when
/// the input is ordered.
pub fn zr_couple(states: &[ZeroRangeState], times: &[f64], seed: u64) -> Result<ZrCoupling, InterfaceError> {
    let mut engine = CoupledZeroRange::new(states.to_vec(), Annihilation::SameSite, seed)?;
    let h_dirs = chain_order(states, |a, b| a.dominates(b));
    let views: Vec<ParticleView> = states.iter().map(|s| s.particles()).collect();
    let g_dirs = chain_order(&views, |a, b| a.dominates(b));
    let (mut h_ok, mut g_ok) = (true, true);
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        engine.step_to(t)?;
        let layer = engine.states.clone();
        if let Some(d) = &h_dirs {
            h_ok &= chain_holds(&layer, d, |a, b| a.dominates(b));
        }
        if let Some(d) = &g_dirs {
            let v: Vec<ParticleView> = layer.iter().map(|s| s.particles()).collect();
            g_ok &= chain_holds(&v, d, |a, b| a.dominates(b));
        }
        out.push(layer);
    }
    Ok(ZrCoupling {
        times: times.to_vec(),
        states: out,
        height_order_held: h_dirs.map(|_| h_ok),
        gradient_order_held: g_dirs.map(|_| g_ok),
    })
}
