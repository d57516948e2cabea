//! Adaptive Gauss–Kronrod (7/15) quadrature.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Upper bound on integrand evaluations for one call of [`integrate`].
const MAX_EVALUATIONS: usize = 2_000_000;

#[derive(Debug, PartialEq)]
struct Piece {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`, always bisecting
/// the piece with the largest error estimate. Pieces whose estimate is at the
/// rounding level of their value are not split further.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Quad {
    if a == b {
        return Quad { value: 0.0, error: 0.0, evaluations: 0 };
    }
    let roundoff = |v: f64, e: f64| e <= 50.0 * f64::EPSILON * v.abs();
    let mut heap = std::collections::BinaryHeap::new();
    let (value, error) = gk15(&f, a, b);
    let mut evaluations = 15;
    let (mut done_value, mut done_error) = (0.0, 0.0);
    let mut open_error = 0.0;
    if roundoff(value, error) {
        done_value = value;
        done_error = error;
    } else {
        open_error = error;
        heap.push(Piece { lo: a, hi: b, value, error });
    }
    while open_error + done_error > tol && evaluations < MAX_EVALUATIONS {
        let Some(p) = heap.pop() else { break };
        open_error -= p.error;
        let mid = 0.5 * (p.lo + p.hi);
        if mid <= p.lo || mid >= p.hi {
            done_value += p.value;
            done_error += p.error;
            continue;
        }
        for (lo, hi) in [(p.lo, mid), (mid, p.hi)] {
            let (v, e) = gk15(&f, lo, hi);
            evaluations += 15;
            if roundoff(v, e) {
                done_value += v;
                done_error += e;
            } else {
                open_error += e;
                heap.push(Piece { lo, hi, value: v, error: e });
            }
        }
    }
    // Re-sum the open pieces to avoid drift from repeated subtraction.
    let open: f64 = heap.iter().map(|p| p.value).sum();
    let open_err: f64 = heap.iter().map(|p| p.error).sum();
    Quad { value: done_value + open, error: done_error + open_err, evaluations }
}

/// Integrates over consecutive pieces `[p_0, p_1], [p_1, p_2], ...`, so that
/// kinks of the integrand can be placed on piece boundaries.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, breakpoints: &[f64], tol: f64) -> Quad {
    let pieces = breakpoints.len().saturating_sub(1).max(1);
    let mut out = Quad { value: 0.0, error: 0.0, evaluations: 0 };
    for w in breakpoints.windows(2) {
        let q = integrate(&f, w[0], w[1], tol / pieces as f64);
        out.value += q.value;
        out.error += q.error;
        out.evaluations += q.evaluations;
    }
    out
}
