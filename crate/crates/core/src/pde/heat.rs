use std::f64::consts::PI;

use serde::Serialize;

use super::{Grid1D, PdeError};

/// `sin(pi m / len)` for `m = 0 .. 2 len`, so that `sin(pi k x / len)` is a
/// table lookup at `(k x) mod 2 len`.
fn sine_table(len: usize) -> Vec<f64> {
    (0..2 * len).map(|m| (PI * m as f64 / len as f64).sin()).collect()
}

/// Sine coefficients `c_k = (2/L) sum_{x=1}^{L-1} u_x sin(pi k x / L)`,
/// `k = 1 .. L-1`, of the interior values `u_1 .. u_{L-1}`.
pub fn sine_transform(interior: &[f64]) -> Vec<f64> {
    let len = interior.len() + 1;
    let table = sine_table(len);
    let period = 2 * len;
    (1..len)
        .map(|k| {
            let s: f64 = interior.iter().enumerate().map(|(i, u)| u * table[(k * (i + 1)) % period]).sum();
            2.0 * s / len as f64
        })
        .collect()
}

/// Inverse of [`sine_transform`]: `u_x = sum_k c_k sin(pi k x / L)`.
pub fn inverse_sine_transform(coeffs: &[f64]) -> Vec<f64> {
    let len = coeffs.len() + 1;
    let table = sine_table(len);
    let period = 2 * len;
    (1..len)
        .map(|x| coeffs.iter().enumerate().map(|(i, c)| c * table[((i + 1) * x) % period]).sum())
        .collect()
}

/// Exact solution at time `t` of `d/dt Phi = 1/2 Delta Phi` on the grid,
/// with the end values held fixed. The data minus the linear interpolant of
/// the boundary values is expanded in the eigenvectors `sin(pi k x / L)`
/// (eigenvalues `-lambda_k = 2 cos(pi k / L) - 2`) and each mode decays by
/// `exp(-lambda_k t / 2)`.
pub fn heat_solve_discrete(phi0: &Grid1D, t: f64) -> Result<Grid1D, PdeError> {
    if phi0.len() < 2 {
        return Err(PdeError::TooSmall);
    }
    if t < 0.0 {
        return Err(PdeError::NegativeTime(t));
    }
    let len = phi0.len() - 1;
    let (l, r) = (phi0.left(), phi0.right());
    let lift = |x: usize| l + (r - l) * x as f64 / len as f64;
    let interior: Vec<f64> = (1..len).map(|x| phi0.values[x] - lift(x)).collect();
    let mut c = sine_transform(&interior);
    for (i, ck) in c.iter_mut().enumerate() {
        let lambda = 2.0 - 2.0 * (PI * (i + 1) as f64 / len as f64).cos();
        *ck *= (-0.5 * lambda * t).exp();
    }
    let u = inverse_sine_transform(&c);
    let mut values = Vec::with_capacity(len + 1);
    values.push(l);
    values.extend(u.iter().enumerate().map(|(i, v)| v + lift(i + 1)));
    values.push(r);
    Ok(Grid1D::new(phi0.first, values))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuousSolution {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    /// Number of sine modes summed.
    pub terms_used: usize,
    /// Bound on the sum of the omitted modes, from `|b_k| <= 2 max |u|`.
    pub tail_bound: f64,
}

/// Solution of `d/dt phi = 1/2 phi''` on `[0, 1]` with `phi(0) = left`,
/// `phi(1) = right`, sampled at `xs`, using at most `max_terms` sine modes.
///
/// The sine coefficients of `phi0` minus its linear lift are computed from
/// `2 max_terms` equally spaced samples; modes whose decay factor makes them
/// smaller than `1e-17` are dropped and counted in the tail bound.
pub fn heat_solve_continuous<F: Fn(f64) -> f64>(
    phi0: F,
    left: f64,
    right: f64,
    t: f64,
    xs: &[f64],
    max_terms: usize,
) -> Result<ContinuousSolution, PdeError> {
    for (x, b) in [(0.0, left), (1.0, right)] {
        let v = phi0(x);
        if (v - b).abs() > 1e-9 * b.abs().max(1.0) {
            return Err(PdeError::IncompatibleBoundary { x, value: v, boundary: b });
        }
    }
    if t < 0.0 {
        return Err(PdeError::NegativeTime(t));
    }
    let lift = |x: f64| left + (right - left) * x;
    if t == 0.0 {
        return Ok(ContinuousSolution { xs: xs.to_vec(), values: xs.iter().map(|&x| phi0(x)).collect(), terms_used: 0, tail_bound: 0.0 });
    }
    let m = 2 * max_terms.max(1);
    let samples: Vec<f64> = (1..m).map(|j| phi0(j as f64 / m as f64) - lift(j as f64 / m as f64)).collect();
    let u_max = samples.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let decay = |k: usize| (-0.5 * PI * PI * (k * k) as f64 * t).exp();
    let mut terms = 0;
    while terms < max_terms && 2.0 * u_max * decay(terms + 1) > 1e-17 {
        terms += 1;
    }
    let tail_bound = 2.0 * u_max * (terms + 1..terms + 200).map(decay).sum::<f64>();
    let table = sine_table(m);
    let period = 2 * m;
    let coeffs: Vec<f64> = (1..=terms)
        .map(|k| {
            let s: f64 = samples.iter().enumerate().map(|(i, u)| u * table[(k * (i + 1)) % period]).sum();
            2.0 * s / m as f64 * decay(k)
        })
        .collect();
    let values = xs
        .iter()
        .map(|&x| lift(x) + coeffs.iter().enumerate().map(|(i, c)| c * (PI * (i + 1) as f64 * x).sin()).sum::<f64>())
        .collect();
    Ok(ContinuousSolution { xs: xs.to_vec(), values, terms_used: terms, tail_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn zero_data_stays_zero() {
        let g = heat_solve_discrete(&Grid1D::zeros(0, 20), 3.0).unwrap();
        assert!(g.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sine_mode_decays_exactly() {
        let len = 40usize;
        for k in [1usize, 3, 17] {
            let g0 = Grid1D::from_fn(0, len as i64, |x| (PI * (k as i64 * x) as f64 / len as f64).sin());
            let t = 2.5;
            let g = heat_solve_discrete(&g0, t).unwrap();
            let lambda = 2.0 - 2.0 * (PI * k as f64 / len as f64).cos();
            let f = (-0.5 * lambda * t).exp();
            for (a, b) in g.values.iter().zip(&g0.values) {
                assert!((a - f * b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn matches_explicit_euler() {
        let mut rng = rng_from_seed(5);
        let mut g0 = Grid1D::new(0, (0..17).map(|_| rng.gen_range(-1.0..1.0)).collect());
        g0.values[0] = 0.3;
        g0.values[16] = -0.4;
        let t = 1.0;
        // Plain Euler at dt = 1e-4 is only first-order accurate (~2e-5 here);
        // Richardson extrapolation with dt / 2 brings it well under 1e-6.
        let euler = |steps: usize| {
            let dt = t / steps as f64;
            let mut u = g0.values.clone();
            for _ in 0..steps {
                let prev = u.clone();
                for x in 1..16 {
                    u[x] += dt * 0.5 * (prev[x + 1] - 2.0 * prev[x] + prev[x - 1]);
                }
            }
            u
        };
        let (coarse, fine) = (euler(10_000), euler(20_000));
        let u: Vec<f64> = fine.iter().zip(&coarse).map(|(f, c)| 2.0 * f - c).collect();
        let exact = heat_solve_discrete(&g0, t).unwrap();
        let err = exact.values.iter().zip(&u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn linear_profile_is_stationary() {
        let s = heat_solve_continuous(|x| 0.2 + 0.5 * x, 0.2, 0.7, 0.3, &[0.0, 0.25, 0.5, 1.0], 4096).unwrap();
        for (x, v) in s.xs.iter().zip(&s.values) {
            assert!((v - (0.2 + 0.5 * x)).abs() < 1e-12);
        }
    }

    #[test]
    fn continuous_sine_mode() {
        let xs: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let t = 0.05;
        let s = heat_solve_continuous(|x| (2.0 * PI * x).sin(), 0.0, 0.0, t, &xs, 4096).unwrap();
        let f = (-0.5 * PI * PI * 4.0 * t).exp();
        for (x, v) in xs.iter().zip(&s.values) {
            assert!((v - f * (2.0 * PI * x).sin()).abs() < 1e-10);
        }
        assert!(s.tail_bound < 1e-15);
    }

    #[test]
    fn incompatible_boundary_is_an_error() {
        assert!(matches!(
            heat_solve_continuous(|x| x, 0.0, 0.5, 0.1, &[0.5], 64),
            Err(PdeError::IncompatibleBoundary { .. })
        ));
    }

    #[test]
    fn discrete_converges_to_continuous() {
        // Tent profile; rescaled discrete solution against the series.
        let tent = |x: f64| x.min(1.0 - x);
        let t = 0.05;
        let mut errs = Vec::new();
        for len in [64i64, 128, 256, 512] {
            let g0 = Grid1D::from_fn(0, len, |x| len as f64 * tent(x as f64 / len as f64));
            let g = heat_solve_discrete(&g0, t * (len * len) as f64).unwrap();
            let xs: Vec<f64> = (0..=len).map(|x| x as f64 / len as f64).collect();
            let c = heat_solve_continuous(tent, 0.0, 0.0, t, &xs, 4096).unwrap();
            let err = g.values.iter().zip(&c.values).map(|(a, b)| (a / len as f64 - b).abs()).fold(0.0, f64::max);
            errs.push(err * len as f64);
        }
        // err <= C / L with a constant that does not grow.
        assert!(errs.iter().all(|&e| e < 1.0), "{errs:?}");
    }

    proptest! {
        #[test]
        fn round_trip(v in prop::collection::vec(-100.0f64..100.0, 1..300)) {
            let back = inverse_sine_transform(&sine_transform(&v));
            let err = back.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            prop_assert!(err < 1e-12 * 100.0_f64.max(1.0));
        }

        #[test]
        fn maximum_principle(v in prop::collection::vec(-5.0f64..5.0, 3..60), t in 0.0f64..50.0) {
            let g0 = Grid1D::new(0, v.clone());
            let g = heat_solve_discrete(&g0, t).unwrap();
            let hi = v.iter().copied().fold(f64::MIN, f64::max);
            let lo = v.iter().copied().fold(f64::MAX, f64::min);
            prop_assert!(g.values.iter().all(|&x| x <= hi + 1e-10 && x >= lo - 1e-10));
        }
    }
}
