use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use super::{HeightProfile, InterfaceError};
use crate::pde::Grid1D;
use crate::rng::{rng_from_seed, SimRng};

/// A path `h_0, ..., h_n` with `h_0 = 0` and `|h_{x+1} - h_x| = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct LatticePath {
    heights: Vec<i64>,
}

impl LatticePath {
    pub fn new(heights: Vec<i64>) -> Result<Self, InterfaceError> {
        match heights.first() {
            None => return Err(InterfaceError::InvalidPath("empty path".into())),
            Some(&h0) if h0 != 0 => return Err(InterfaceError::InvalidPath(format!("h_0 = {h0}"))),
            _ => {}
        }
        if let Some(x) = heights.windows(2).position(|w| (w[1] - w[0]).abs() != 1) {
            return Err(InterfaceError::NonLipschitz { x, step: heights[x + 1] - heights[x] });
        }
        Ok(LatticePath { heights })
    }

    pub fn heights(&self) -> &[i64] {
        &self.heights
    }

    /// Number of steps `M + N`.
    pub fn len(&self) -> usize {
        self.heights.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of up-steps `M`.
    pub fn ups(&self) -> usize {
        (self.len() as i64 + self.end()) as usize / 2
    }

    /// Number of down-steps `N`.
    pub fn downs(&self) -> usize {
        self.len() - self.ups()
    }

    pub fn end(&self) -> i64 {
        *self.heights.last().unwrap()
    }

    /// Whether `x` is a local extremum (a corner that can flip).
    pub fn is_corner(&self, x: usize) -> bool {
        x > 0 && x < self.len() && self.heights[x - 1] == self.heights[x + 1]
    }

    /// Flips the corner at `x`; returns false if `x` is not a corner.
    pub fn flip(&mut self, x: usize) -> bool {
        if !self.is_corner(x) {
            return false;
        }
        self.heights[x] = 2 * self.heights[x - 1] - self.heights[x];
        true
    }

    pub fn profile(&self, time: f64) -> HeightProfile {
        HeightProfile { time, first: 0, heights: self.heights.clone() }
    }

    pub fn to_grid(&self) -> Grid1D {
        Grid1D::new(0, self.heights.iter().map(|&h| h as f64).collect())
    }
}

/// Discretises a 1-Lipschitz `phi` on `[0, 1]` with `phi(0) = 0` into a
/// path of `len` steps, rounding down to the parity of each site:
/// `2 floor(L phi(x/L) / 2)` at even `x`, `2 floor((L phi(x/L) - 1) / 2) + 1`
/// at odd `x`.
pub fn path_from_profile<F: Fn(f64) -> f64>(phi: F, len: usize) -> Result<LatticePath, InterfaceError> {
    let l = len as f64;
    let heights = (0..=len)
        .map(|x| {
            let v = snap(l * phi(x as f64 / l));
            if x % 2 == 0 {
                2 * (v / 2.0).floor() as i64
            } else {
                2 * ((v - 1.0) / 2.0).floor() as i64 + 1
            }
        })
        .collect();
    LatticePath::new(heights)
}

/// Rounds values within 1e-9 of an integer to it, so that `floor` does not
/// drop a unit on products like `100 * 0.29`.
pub(crate) fn snap(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() < 1e-9 {
        r
    } else {
        v
    }
}

/// Occupation bits: a particle at `x` iff `h_{x+1} - h_x = +1`.
pub fn ssep_view(path: &LatticePath) -> Vec<bool> {
    path.heights.windows(2).map(|w| w[1] > w[0]).collect()
}

/// Inverse of [`ssep_view`].
pub fn ssep_inverse(bits: &[bool]) -> LatticePath {
    let mut heights = Vec::with_capacity(bits.len() + 1);
    heights.push(0);
    let mut h = 0;
    for &b in bits {
        h += if b { 1 } else { -1 };
        heights.push(h);
    }
    LatticePath { heights }
}

/// `F_k(h) = sum_x sin(pi k x / n) (h_x - x (h_n - h_0) / n)`, an eigenfunction
/// of the corner-flip generator with eigenvalue `-lambda_k / 2`,
/// `lambda_k = 2 - 2 cos(pi k / n)`.
pub fn spectral_coordinate(path: &LatticePath, k: usize) -> f64 {
    let n = path.len() as f64;
    let slope = path.end() as f64 / n;
    path.heights
        .iter()
        .enumerate()
        .map(|(x, &h)| (std::f64::consts::PI * (k * x) as f64 / n).sin() * (h as f64 - slope * x as f64))
        .sum()
}

/// `H^k = sum_x sin(pi k x / n) (h_x - Phi_x)` for a reference profile `Phi`
/// on the same sites (typically the expected profile from the discrete heat
/// equation). Deterministically `|H^k| <= 4 n^2 / k`.
pub fn spectral_deviation(path: &LatticePath, reference: &Grid1D, k: usize) -> f64 {
    let n = path.len() as f64;
    path.heights
        .iter()
        .zip(&reference.values)
        .enumerate()
        .map(|(x, (&h, &p))| (std::f64::consts::PI * (k * x) as f64 / n).sin() * (h as f64 - p))
        .sum()
}

/// Corner-flip dynamics. Sites `1..n-1` ring at rate 1/2 each; a ring flips
/// the site if it is a corner.
#[derive(Debug, Clone)]
pub struct CornerFlip {
    path: LatticePath,
    clock: f64,
    next: f64,
    rng: SimRng,
    flips: u64,
}

impl CornerFlip {
    pub fn new(path: LatticePath, seed: u64) -> Self {
        Self::with_rng(path, rng_from_seed(seed))
    }

    pub fn with_rng(path: LatticePath, rng: SimRng) -> Self {
        let mut engine = CornerFlip { path, clock: 0.0, next: 0.0, rng, flips: 0 };
        engine.next = engine.draw_next(0.0);
        engine
    }

    fn total_rate(&self) -> f64 {
        0.5 * self.path.len().saturating_sub(1) as f64
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

    pub fn path(&self) -> &LatticePath {
        &self.path
    }

    /// Number of rings that flipped a corner.
    pub fn flips(&self) -> u64 {
        self.flips
    }

    /// Processes the next ring; returns its time and whether it flipped.
    pub fn step_event(&mut self) -> Option<(f64, bool)> {
        if !self.next.is_finite() {
            return None;
        }
        self.clock = self.next;
        let x = self.rng.gen_range(1..self.path.len());
        let flipped = self.path.flip(x);
        self.flips += flipped as u64;
        self.next = self.draw_next(self.clock);
        Some((self.clock, flipped))
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

/// The path at time `t` of the corner-flip dynamics started from `path`.
pub fn corner_flip_run(path: &LatticePath, t: f64, seed: u64) -> LatticePath {
    let mut e = CornerFlip::new(path.clone(), seed);
    e.step_to(t.max(0.0)).expect("forward in time");
    e.path
}

/// Paths at each of the ascending `times` along one run.
pub fn corner_flip_trajectory(
    path: &LatticePath,
    times: &[f64],
    seed: u64,
) -> Result<Vec<LatticePath>, InterfaceError> {
    let mut e = CornerFlip::new(path.clone(), seed);
    times
        .iter()
        .map(|&t| {
            e.step_to(t)?;
            Ok(e.path.clone())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::{heat_solve_continuous, heat_solve_discrete};
    use crate::rng::stream_rng;
    use proptest::prelude::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    use std::collections::HashMap;

    #[test]
    fn linear_profile_is_all_up() {
        let p = path_from_profile(|x| x, 10).unwrap();
        assert_eq!(p.heights(), &(0..=10).collect::<Vec<i64>>()[..]);
        assert!(ssep_view(&p).iter().all(|&b| b));
    }

    #[test]
    fn flat_profile_is_zig_zag() {
        let p = path_from_profile(|_| 0.0, 10).unwrap();
        let expect: Vec<i64> = (0..=10).map(|x| if x % 2 == 0 { 0 } else { -1 }).collect();
        assert_eq!(p.heights(), &expect[..]);
        let bits = ssep_view(&p);
        assert!(bits.iter().enumerate().all(|(i, &b)| b == (i % 2 == 1)));
    }

    #[test]
    fn tent_profile_counts() {
        let p = path_from_profile(|x| x.min(1.0 - x), 100).unwrap();
        assert_eq!((p.ups(), p.downs()), (50, 50));
        assert_eq!(p.end(), 0);
    }

    #[test]
    fn steep_profile_rejected() {
        assert!(matches!(path_from_profile(|x| 2.0 * x, 10), Err(InterfaceError::NonLipschitz { .. })));
        assert!(LatticePath::new(vec![1, 0]).is_err());
    }

    #[test]
    fn single_corner_spends_half_the_time_in_each_state() {
        // Occupation measured by sampling on a fine time grid.
        let horizon = 10_000.0;
        let mut e = CornerFlip::new(LatticePath::new(vec![0, 1, 0]).unwrap(), 12);
        let mut up = 0usize;
        let samples = 200_000;
        for i in 1..=samples {
            e.step_to(horizon * i as f64 / samples as f64).unwrap();
            up += (e.path().heights()[1] == 1) as usize;
        }
        let frac = up as f64 / samples as f64;
        assert!((frac - 0.5).abs() < 0.02, "{frac}");
    }

    /// All paths with `m` up-steps and `n` down-steps.
    fn enumerate_paths(m: usize, n: usize) -> Vec<LatticePath> {
        let len = m + n;
        (0u32..1 << len)
            .filter(|b| b.count_ones() as usize == m)
            .map(|b| ssep_inverse(&(0..len).map(|i| b >> i & 1 == 1).collect::<Vec<_>>()))
            .collect()
    }

    #[test]
    fn equilibrium_is_uniform_on_three_three_paths() {
        let all = enumerate_paths(3, 3);
        assert_eq!(all.len(), 20);
        let start = path_from_profile(|_| 0.0, 6).unwrap();
        let runs = 20_000;
        let mut counts: HashMap<LatticePath, usize> = HashMap::new();
        for r in 0..runs {
            let mut e = CornerFlip::with_rng(start.clone(), stream_rng(3, r));
            e.step_to(40.0).unwrap();
            *counts.entry(e.path().clone()).or_default() += 1;
        }
        let expected = runs as f64 / 20.0;
        let chi2: f64 = all
            .iter()
            .map(|p| {
                let o = *counts.get(p).unwrap_or(&0) as f64;
                (o - expected).powi(2) / expected
            })
            .sum();
        let crit = ChiSquared::new(19.0).unwrap().inverse_cdf(0.99);
        assert!(chi2 < crit, "chi2 {chi2} >= {crit}");
    }

    #[test]
    fn spectral_coordinates_decay_on_average() {
        let len = 32;
        let start = path_from_profile(|x| x.min(1.0 - x), len).unwrap();
        let t = 60.0;
        let runs = 4000;
        for k in [1usize, 2] {
            let lambda = 2.0 - 2.0 * (std::f64::consts::PI * k as f64 / len as f64).cos();
            let expect = (-lambda * t / 2.0).exp() * spectral_coordinate(&start, k);
            let vals: Vec<f64> = (0..runs)
                .map(|r| {
                    let mut e = CornerFlip::with_rng(start.clone(), stream_rng(17, r));
                    e.step_to(t).unwrap();
                    spectral_coordinate(e.path(), k)
                })
                .collect();
            let mean = vals.iter().sum::<f64>() / runs as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (runs - 1) as f64;
            let se = (var / runs as f64).sqrt();
            assert!((mean - expect).abs() < 3.0 * se, "k={k}: {mean} vs {expect} (se {se})");
        }
    }

    #[test]
    fn spectral_deviation_bound_along_a_trajectory() {
        let len = 64usize;
        let start = path_from_profile(|x| x.min(1.0 - x), len).unwrap();
        let times: Vec<f64> = (1..=20).map(|i| i as f64 * 50.0).collect();
        let traj = corner_flip_trajectory(&start, &times, 5).unwrap();
        for (t, p) in times.iter().zip(&traj) {
            let phi = heat_solve_discrete(&start.to_grid(), *t).unwrap();
            for k in 1..len {
                let h = spectral_deviation(p, &phi, k);
                assert!(h.abs() <= 4.0 * (len * len) as f64 / k as f64);
            }
        }
    }

    #[test]
    fn hydrodynamic_limit_of_tent() {
        let len = 256usize;
        let phi0 = |x: f64| x.min(1.0 - x);
        let start = path_from_profile(phi0, len).unwrap();
        let t = 0.1;
        let p = corner_flip_run(&start, t * (len * len) as f64, 21);
        let xs: Vec<f64> = (0..=len).map(|i| i as f64 / len as f64).collect();
        let limit = heat_solve_continuous(phi0, 0.0, 0.0, t, &xs, 4096).unwrap();
        let err = p
            .heights()
            .iter()
            .zip(&limit.values)
            .map(|(&h, &v)| (h as f64 / len as f64 - v).abs())
            .fold(0.0, f64::max);
        assert!(err <= 0.05, "{err}");
    }

    fn arb_path() -> impl Strategy<Value = LatticePath> {
        prop::collection::vec(any::<bool>(), 1..40).prop_map(|b| ssep_inverse(&b))
    }

    proptest! {
        #[test]
        fn ssep_round_trip(p in arb_path()) {
            prop_assert_eq!(ssep_inverse(&ssep_view(&p)), p);
        }

        #[test]
        fn flips_keep_path_valid(p in arb_path(), seed in 0u64..1000) {
            let mut e = CornerFlip::new(p.clone(), seed);
            for _ in 0..200 {
                if e.step_event().is_none() { break; }
                prop_assert!(LatticePath::new(e.path().heights().to_vec()).is_ok());
                prop_assert_eq!(e.path().ups(), p.ups());
                prop_assert_eq!(e.path().end(), p.end());
            }
        }
    }
}
