//! Radial grids, quadrature, differentiation and interpolation.
//!
//! Every field in this crate is a radially symmetric function on the ball of
//! radius `rmax`, sampled at the grid nodes. Volume integrals over ℝ³ reduce
//! to `4π ∫₀^R r² f(r) dr`; the `r²` Jacobian is applied at evaluation time,
//! so the stored weights are plain trapezoid weights on `[0, R]`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest grid the library accepts.
pub const MIN_NODES: usize = 16;

/// Default stretch for graded grids.
pub const DEFAULT_STRETCH: f64 = 10.0;

/// Node placement rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Spacing {
    Uniform,
    /// Geometric stretching `r(s) = R·expm1(stretch·s)/expm1(stretch)`,
    /// which clusters nodes near the origin.
    Graded { stretch: f64 },
}

impl Spacing {
    pub fn graded() -> Self {
        Spacing::Graded {
            stretch: DEFAULT_STRETCH,
        }
    }
}

impl fmt::Display for Spacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spacing::Uniform => write!(f, "uniform"),
            Spacing::Graded { stretch } => write!(f, "graded:{stretch}"),
        }
    }
}

impl FromStr for Spacing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.split_once(':') {
            None if s == "uniform" => Ok(Spacing::Uniform),
            None if s == "graded" => Ok(Spacing::graded()),
            Some(("graded", stretch)) => {
                let stretch: f64 = stretch.trim().parse().map_err(|_| {
                    Error::InvalidConfiguration(format!("bad graded stretch '{stretch}'"))
                })?;
                if !(stretch > 0.0 && stretch.is_finite()) {
                    return Err(Error::InvalidConfiguration(format!(
                        "graded stretch must be positive, got {stretch}"
                    )));
                }
                Ok(Spacing::Graded { stretch })
            }
            _ => Err(Error::InvalidConfiguration(format!(
                "unknown spacing '{s}' (expected uniform, graded or graded:<stretch>)"
            ))),
        }
    }
}

/// Nodes and trapezoid weights on `[0, rmax]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    rmax: f64,
    spacing: Spacing,
}

/// Builds a grid with `n` nodes on `[0, rmax]`.
pub fn make_grid(n: usize, rmax: f64, spacing: Spacing) -> Result<RadialGrid> {
    if n < MIN_NODES {
        return Err(Error::InvalidConfiguration(format!(
            "grid needs at least {MIN_NODES} nodes, got {n}"
        )));
    }
    if !(rmax > 0.0 && rmax.is_finite()) {
        return Err(Error::InvalidConfiguration(format!(
            "rmax must be positive and finite, got {rmax}"
        )));
    }
    let last = (n - 1) as f64;
    let mut nodes: Vec<f64> = match spacing {
        Spacing::Uniform => (0..n).map(|i| rmax * i as f64 / last).collect(),
        Spacing::Graded { stretch } => {
            if !(stretch > 0.0 && stretch.is_finite()) {
                return Err(Error::InvalidConfiguration(format!(
                    "graded stretch must be positive, got {stretch}"
                )));
            }
            let denom = stretch.exp_m1();
            (0..n)
                .map(|i| rmax * (stretch * i as f64 / last).exp_m1() / denom)
                .collect()
        }
    };
    nodes[0] = 0.0;
    nodes[n - 1] = rmax;
    if nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfiguration(
            "grid nodes are not strictly increasing (stretch too large for n)".into(),
        ));
    }

    let mut weights = vec![0.0; n];
    for (k, w) in nodes.windows(2).enumerate() {
        let h = w[1] - w[0];
        weights[k] += 0.5 * h;
        weights[k + 1] += 0.5 * h;
    }
    if let Spacing::Uniform = spacing {
        // exact h and h/2 so the weights sum to rmax without drift
        let h = rmax / last;
        weights.iter_mut().for_each(|w| *w = h);
        weights[0] = 0.5 * h;
        weights[n - 1] = 0.5 * h;
    }

    Ok(RadialGrid {
        nodes,
        weights,
        rmax,
        spacing,
    })
}

impl RadialGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rmax(&self) -> f64 {
        self.rmax
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    /// Width of interval `k`, i.e. `r_{k+1} - r_k`.
    pub fn step(&self, k: usize) -> f64 {
        self.nodes[k + 1] - self.nodes[k]
    }

    pub fn max_step(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// Width of the interval containing radius `r` (clamped to the grid).
    pub fn local_step(&self, r: f64) -> f64 {
        let k = self.nodes.partition_point(|&x| x <= r).clamp(1, self.len() - 1);
        self.nodes[k] - self.nodes[k - 1]
    }

    /// Volume weights `4π w_i r_i²`, so that `Σ vw_i f_i ≈ ∫_{ℝ³} f dx`.
    pub fn volume_weights(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(r, w)| 4.0 * PI * w * r * r)
            .collect()
    }
}

/// `∫_{ℝ³} f dx = 4π Σ w_i r_i² f_i` for radial samples `f`.
pub fn integrate_radial(samples: &[f64], grid: &RadialGrid) -> Result<f64> {
    check_len(samples.len(), grid.len())?;
    let sum: f64 = grid
        .nodes
        .iter()
        .zip(&grid.weights)
        .zip(samples)
        .map(|((r, w), f)| w * r * r * f)
        .sum();
    Ok(4.0 * PI * sum)
}

pub(crate) fn check_len(actual: usize, expected: usize) -> Result<()> {
    if actual != expected {
        return Err(Error::Shape { expected, actual });
    }
    Ok(())
}

/// A real radial function sampled on a grid, with `u(R) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl RadialField {
    /// Validates length, finiteness and the boundary condition.
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        check_len(values.len(), grid.len())?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!("non-finite value at node {i}")));
        }
        if *values.last().unwrap() != 0.0 {
            return Err(Error::InvalidField(
                "value at the truncation radius must be zero".into(),
            ));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at the nodes and pins the boundary node to zero.
    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mut values: Vec<f64> = grid.nodes().iter().map(|&r| f(r)).collect();
        *values.last_mut().unwrap() = 0.0;
        Self::new(grid, values)
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let values = vec![0.0; grid.len()];
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// `factor · u`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Replaces the samples, keeping the grid. Used by the solvers, which
    /// maintain the invariants themselves.
    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.grid.len());
        Self {
            grid: Arc::clone(&self.grid),
            values,
        }
    }
}

/// `u'(r_i)` by three-point differences; one-sided second-order stencils at
/// both ends.
pub fn radial_derivative(field: &RadialField) -> Vec<f64> {
    let r = field.grid.nodes();
    let u = &field.values;
    let n = u.len();
    let mut du = vec![0.0; n];
    for i in 1..n - 1 {
        let h1 = r[i] - r[i - 1];
        let h2 = r[i + 1] - r[i];
        du[i] = -h2 / (h1 * (h1 + h2)) * u[i - 1]
            + (h2 - h1) / (h1 * h2) * u[i]
            + h1 / (h2 * (h1 + h2)) * u[i + 1];
    }
    let (h1, h2) = (r[1] - r[0], r[2] - r[1]);
    du[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * u[0] + (h1 + h2) / (h1 * h2) * u[1]
        - h1 / (h2 * (h1 + h2)) * u[2];
    let (h1, h2) = (r[n - 2] - r[n - 3], r[n - 1] - r[n - 2]);
    du[n - 1] = h2 / (h1 * (h1 + h2)) * u[n - 3] - (h1 + h2) / (h1 * h2) * u[n - 2]
        + (h1 + 2.0 * h2) / (h2 * (h1 + h2)) * u[n - 1];
    du
}

/// Width and target mass of a Gaussian initializer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    pub sigma: f64,
    pub mass: f64,
}

impl GaussianParams {
    pub fn new(sigma: f64, mass: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidArgument(format!("mass must be positive, got {mass}")));
        }
        Ok(Self { sigma, mass })
    }
}

/// `α·exp(-r²/(2σ²))` with `α` fixed so that the discrete mass equals
/// `params.mass`.
///
/// The width must be resolved: the grid interval containing `r = σ` may be
/// at most `σ/2` wide (on uniform grids this is `σ ≥ 2·spacing`), and
/// `6σ ≤ rmax`.
pub fn gaussian_field(params: GaussianParams, grid: &Arc<RadialGrid>) -> Result<RadialField> {
    let GaussianParams { sigma, mass } = GaussianParams::new(params.sigma, params.mass)?;
    if 6.0 * sigma > grid.rmax() {
        return Err(Error::Resolution {
            sigma,
            reason: format!("6σ exceeds rmax = {}", grid.rmax()),
        });
    }
    let h = grid.local_step(sigma);
    if sigma < 2.0 * h {
        return Err(Error::Resolution {
            sigma,
            reason: format!("local grid spacing {h:e} exceeds σ/2"),
        });
    }
    let shape = RadialField::from_fn(Arc::clone(grid), |r| (-0.5 * r * r / (sigma * sigma)).exp())?;
    let m0 = crate::functionals::mass(&shape);
    Ok(shape.scaled((mass / m0).sqrt()))
}

/// The mass-preserving dilation `r ↦ t^{3/2} u(t r)`, resampled onto the same
/// grid by monotone cubic interpolation and set to zero where `t r > R`.
pub fn resample_scaled(field: &RadialField, t: f64) -> Result<RadialField> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("scale must be positive, got {t}")));
    }
    if t == 1.0 {
        return Ok(field.clone());
    }
    let r = field.grid.nodes();
    let rmax = field.grid.rmax();
    let interp = MonotoneCubic::new(r, &field.values)?;
    let amp = t.powf(1.5);
    let mut values: Vec<f64> = r
        .iter()
        .map(|&ri| {
            let x = t * ri;
            if x >= rmax {
                0.0
            } else {
                amp * interp.eval(x)
            }
        })
        .collect();
    *values.last_mut().unwrap() = 0.0;
    Ok(field.with_values(values))
}

/// Piecewise-cubic Hermite interpolant with Fritsch–Butland slopes; it never
/// overshoots the data between nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        check_len(y.len(), x.len())?;
        let n = x.len();
        if n < 2 {
            return Err(Error::InvalidArgument("interpolation needs two or more points".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("abscissae must be strictly increasing".into()));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = y.windows(2).zip(&h).map(|(w, h)| (w[1] - w[0]) / h).collect();
        let mut slopes = vec![0.0; n];
        if n == 2 {
            slopes[0] = delta[0];
            slopes[1] = delta[0];
        } else {
            for k in 1..n - 1 {
                let (d0, d1) = (delta[k - 1], delta[k]);
                if d0 * d1 <= 0.0 {
                    continue;
                }
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                slopes[k] = (w1 + w2) / (w1 / d0 + w2 / d1);
            }
            slopes[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            slopes[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            slopes,
        })
    }

    /// Evaluates the interpolant; outside the data range the end values are
    /// held constant.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let k = self.x.partition_point(|&v| v <= t) - 1;
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[k] + h10 * h * self.slopes[k] + h01 * self.y[k + 1] + h11 * h * self.slopes[k + 1]
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m.signum() != d0.signum() || d0 == 0.0 {
        0.0
    } else if d0.signum() != d1.signum() && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn uniform(n: usize, rmax: f64) -> Arc<RadialGrid> {
        Arc::new(make_grid(n, rmax, Spacing::Uniform).unwrap())
    }

    #[test]
    fn sixteen_node_trapezoid() {
        let g = make_grid(16, 1.0, Spacing::Uniform).unwrap();
        for (i, r) in g.nodes().iter().enumerate() {
            assert_relative_eq!(*r, i as f64 / 15.0, epsilon = 1e-15);
        }
        assert_relative_eq!(g.weights()[0], 1.0 / 30.0, epsilon = 1e-15);
        assert_relative_eq!(g.weights()[7], 1.0 / 15.0, epsilon = 1e-15);
        assert_relative_eq!(g.weights()[15], 1.0 / 30.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_small_or_empty_grids() {
        assert!(matches!(
            make_grid(3, 1.0, Spacing::Uniform),
            Err(Error::InvalidConfiguration(_))
        ));
        assert!(make_grid(16, 0.0, Spacing::Uniform).is_err());
        assert!(make_grid(16, -1.0, Spacing::graded()).is_err());
    }

    #[test]
    fn weights_sum_to_rmax() {
        for spacing in [Spacing::Uniform, Spacing::graded()] {
            let g = make_grid(2049, 40.0, spacing).unwrap();
            let s: f64 = g.weights().iter().sum();
            assert_relative_eq!(s, 40.0, max_relative = 1e-12);
            assert!(g.weights().iter().all(|&w| w > 0.0));
            assert_eq!(g.nodes()[0], 0.0);
            assert_eq!(*g.nodes().last().unwrap(), 40.0);
        }
    }

    #[test]
    fn uniform_spacing_is_constant() {
        let g = make_grid(2049, 40.0, Spacing::Uniform).unwrap();
        let h = g.step(0);
        for k in 0..g.len() - 1 {
            assert_relative_eq!(g.step(k), h, max_relative = 1e-12);
        }
    }

    #[test]
    fn graded_grid_clusters_near_origin() {
        let g = make_grid(2049, 40.0, Spacing::graded()).unwrap();
        assert!(g.step(0) < 1e-4);
        assert!(g.step(2047) > 0.1);
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn spacing_parses() {
        assert_eq!("uniform".parse::<Spacing>().unwrap(), Spacing::Uniform);
        assert_eq!("graded".parse::<Spacing>().unwrap(), Spacing::graded());
        assert_eq!(
            "graded:6".parse::<Spacing>().unwrap(),
            Spacing::Graded { stretch: 6.0 }
        );
        assert!("graded:-1".parse::<Spacing>().is_err());
        assert!("log".parse::<Spacing>().is_err());
    }

    #[test]
    fn unit_ball_volume() {
        let g = make_grid(2049, 1.0, Spacing::Uniform).unwrap();
        let v = integrate_radial(&vec![1.0; 2049], &g).unwrap();
        assert_relative_eq!(v, 4.0 * PI / 3.0, max_relative = 1e-6);
        assert_eq!(integrate_radial(&vec![0.0; 2049], &g).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_integral() {
        let g = make_grid(2049, 40.0, Spacing::Uniform).unwrap();
        let f: Vec<f64> = g.nodes().iter().map(|r| (-r * r).exp()).collect();
        let v = integrate_radial(&f, &g).unwrap();
        assert_relative_eq!(v, PI.powf(1.5), max_relative = 1e-8);
    }

    #[test]
    fn integrate_rejects_length_mismatch() {
        let g = make_grid(16, 1.0, Spacing::Uniform).unwrap();
        assert!(matches!(
            integrate_radial(&[1.0; 15], &g),
            Err(Error::Shape { expected: 16, actual: 15 })
        ));
    }

    #[test]
    fn linear_moments_match_euler_maclaurin() {
        // ∫₀^R r²(a + b r) dr
        let g = make_grid(257, 3.0, Spacing::Uniform).unwrap();
        let (a, b) = (0.7, -1.3);
        let f: Vec<f64> = g.nodes().iter().map(|r| a + b * r).collect();
        let exact = 4.0 * PI * (a * 27.0 / 3.0 + b * 81.0 / 4.0);
        // trapezoid is exact only up to the h² endpoint term of r²(a+br)
        let h = g.step(0);
        let endpoint = 4.0 * PI * h * h / 12.0 * ((2.0 * a * 3.0 + 3.0 * b * 9.0) - 0.0);
        let v = integrate_radial(&f, &g).unwrap();
        assert_relative_eq!(v - endpoint, exact, max_relative = 1e-12);
    }

    #[test]
    fn quadrature_is_second_order() {
        // truncated integrand with a kink at the boundary has plain h² error
        let err = |n: usize| {
            let g = make_grid(n, 2.0, Spacing::Uniform).unwrap();
            let f: Vec<f64> = g.nodes().iter().map(|r| (-r).exp()).collect();
            let exact = 4.0 * PI * (2.0 - (-2.0f64).exp() * (4.0 + 4.0 + 2.0));
            (integrate_radial(&f, &g).unwrap() - exact).abs()
        };
        let (e1, e2) = (err(129), err(257));
        assert!(e1 / e2 >= 3.5, "ratio {}", e1 / e2);
    }

    #[test]
    fn derivative_of_constant_and_linear() {
        let g = uniform(65, 2.0);
        let c = RadialField::new(Arc::clone(&g), {
            let mut v = vec![3.0; 65];
            v[64] = 0.0;
            v
        })
        .unwrap();
        let d = radial_derivative(&c);
        assert!(d[..62].iter().all(|x| x.abs() < 1e-12));

        let lin = RadialField {
            grid: Arc::clone(&g),
            values: g.nodes().to_vec(),
        };
        let d = radial_derivative(&lin);
        for x in &d[1..64] {
            assert_relative_eq!(*x, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn derivative_of_gaussian() {
        let g = uniform(2049, 40.0);
        let u = RadialField::from_fn(Arc::clone(&g), |r| (-0.5 * r * r).exp()).unwrap();
        let d = radial_derivative(&u);
        let max_err = g
            .nodes()
            .iter()
            .zip(&d)
            .map(|(r, d)| (d + r * (-0.5 * r * r).exp()).abs())
            .fold(0.0, f64::max);
        assert!(max_err <= 1e-3, "max error {max_err}");
    }

    #[test]
    fn gaussian_normalization() {
        let g = uniform(2049, 40.0);
        let u1 = gaussian_field(GaussianParams::new(1.0, 1.0).unwrap(), &g).unwrap();
        assert_relative_eq!(crate::functionals::mass(&u1), 1.0, max_relative = 1e-10);
        let u4 = gaussian_field(GaussianParams::new(1.0, 4.0).unwrap(), &g).unwrap();
        for (a, b) in u1.values().iter().zip(u4.values()) {
            assert_relative_eq!(2.0 * a, *b, max_relative = 1e-12);
        }
    }

    #[test]
    fn gaussian_resolution_error() {
        let g = uniform(2049, 40.0);
        let e = gaussian_field(GaussianParams { sigma: 0.001, mass: 1.0 }, &g);
        assert!(matches!(e, Err(Error::Resolution { .. })));
        let e = gaussian_field(GaussianParams { sigma: 7.0, mass: 1.0 }, &g);
        assert!(matches!(e, Err(Error::Resolution { .. })));
        assert!(GaussianParams::new(-1.0, 1.0).is_err());
    }

    #[test]
    fn resample_identity_and_errors() {
        let g = uniform(257, 10.0);
        let u = RadialField::from_fn(Arc::clone(&g), |r| (-r * r).exp()).unwrap();
        assert_eq!(resample_scaled(&u, 1.0).unwrap().values(), u.values());
        assert!(matches!(resample_scaled(&u, 0.0), Err(Error::InvalidArgument(_))));
        assert!(resample_scaled(&u, -2.0).is_err());
    }

    #[test]
    fn resample_gaussian_halves_width() {
        let g = uniform(2049, 40.0);
        let u = RadialField::from_fn(Arc::clone(&g), |r| (-0.5 * r * r).exp()).unwrap();
        let v = resample_scaled(&u, 2.0).unwrap();
        let amp = 2f64.powf(1.5);
        for (r, x) in g.nodes().iter().zip(v.values()) {
            let exact = amp * (-2.0 * r * r).exp();
            assert!((x - exact).abs() <= 1e-6);
        }
    }

    #[test]
    fn monotone_cubic_does_not_overshoot() {
        let x = [0.0, 1.0, 2.0, 3.0, 4.0];
        let y = [0.0, 0.0, 1.0, 1.0, 1.0];
        let p = MonotoneCubic::new(&x, &y).unwrap();
        for i in 0..=400 {
            let v = p.eval(i as f64 / 100.0);
            assert!((-1e-15..=1.0 + 1e-15).contains(&v));
        }
        assert_relative_eq!(p.eval(2.0), 1.0);
    }

    #[test]
    fn field_invariants() {
        let g = uniform(16, 1.0);
        assert!(RadialField::new(Arc::clone(&g), vec![0.0; 15]).is_err());
        let mut v = vec![0.0; 16];
        v[3] = f64::NAN;
        assert!(RadialField::new(Arc::clone(&g), v).is_err());
        let mut v = vec![0.0; 16];
        v[15] = 1.0;
        assert!(RadialField::new(Arc::clone(&g), v).is_err());
    }
}
