use serde::Serialize;

/// `u / (1 + |u|)`.
pub fn sigma(u: f64) -> f64 {
    u / (1.0 + u.abs())
}

/// `1 / (1 + |u|)^2`.
pub fn sigma_prime(u: f64) -> f64 {
    1.0 / (1.0 + u.abs()).powi(2)
}

/// Real values on the integer sites `first, first + 1, ..., first + n - 1`;
/// the two end entries are Dirichlet boundary values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid1D {
    pub first: i64,
    pub values: Vec<f64>,
}

impl Grid1D {
    pub fn new(first: i64, values: Vec<f64>) -> Self {
        Grid1D { first, values }
    }

    /// Samples `f` at the sites `first..=last`.
    pub fn from_fn<F: Fn(i64) -> f64>(first: i64, last: i64, f: F) -> Self {
        Grid1D { first, values: (first..=last).map(f).collect() }
    }

    /// `L * phi(x / L)` on the sites `-L..=L+1`, where `phi` lives on
    /// `[-1, 1]` and vanishes at both ends. The right boundary site is set
    /// to zero.
    pub fn from_profile<F: Fn(f64) -> f64>(phi: F, len: i64) -> Self {
        let l = len as f64;
        Self::from_fn(-len, len + 1, |x| if x == len + 1 { 0.0 } else { l * phi(x as f64 / l) })
    }

    /// Like [`Grid1D::from_profile`] but with the lattice mapped onto
    /// `[-1, 1]` symmetrically, `x -> (2x - 1) / (2L + 1)`, so that both
    /// boundary sites sit at the ends of the interval. Concave `phi` gives
    /// concave grid data.
    pub fn from_profile_centered<F: Fn(f64) -> f64>(phi: F, len: i64) -> Self {
        let l = len as f64;
        let span = 2.0 * l + 1.0;
        Self::from_fn(-len, len + 1, |x| l * phi((2.0 * x as f64 - 1.0) / span))
    }

    pub fn zeros(first: i64, last: i64) -> Self {
        Self::from_fn(first, last, |_| 0.0)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn last(&self) -> i64 {
        self.first + self.values.len() as i64 - 1
    }

    pub fn get(&self, x: i64) -> f64 {
        self.values[(x - self.first) as usize]
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> {
        self.first..=self.last()
    }

    pub fn left(&self) -> f64 {
        self.values[0]
    }

    pub fn right(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn gradient(&self) -> GradientField {
        GradientField { first: self.first, q: self.values.windows(2).map(|w| w[1] - w[0]).collect() }
    }

    pub fn max_abs_diff(&self, other: &Grid1D) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// `true` when all second differences are at most `tol`.
    pub fn is_concave(&self, tol: f64) -> bool {
        self.values.windows(3).all(|w| w[2] - 2.0 * w[1] + w[0] <= tol)
    }
}

/// `q_x = Phi(x + 1) - Phi(x)` for `x = first, ..., last - 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientField {
    pub first: i64,
    pub q: Vec<f64>,
}

impl GradientField {
    pub fn max_abs(&self) -> f64 {
        self.q.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Rebuilds heights from the left boundary value.
    pub fn integrate(&self, left: f64) -> Grid1D {
        let mut values = Vec::with_capacity(self.q.len() + 1);
        let mut acc = left;
        values.push(acc);
        for q in &self.q {
            acc += q;
            values.push(acc);
        }
        Grid1D { first: self.first, values }
    }
}
