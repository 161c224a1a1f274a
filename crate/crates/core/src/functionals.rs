//! Scalar functionals of a radial field and the L² gradient of the energy.
//!
//! All integrals over ℝ³ use the trapezoid volume weights `4π w_i r_i²`
//! except the Dirichlet term, which is the exact integral of the piecewise
//! linear interpolant of `u`:
//!
//! ```text
//! B(u) = 4π Σ_k (r_{k+1}³ - r_k³)/3 · ((u_{k+1} - u_k)/h_k)²
//! ```
//!
//! That choice makes the energy a smooth function of the nodal values whose
//! gradient is available in closed form, so the discrete Euler–Lagrange
//! residual is exactly zero at a discrete minimizer.
//!
//! The Coulomb term uses the prefix-sum Newton potential
//!
//! ```text
//! φ_i = (1/r_i) Σ_{j≤i} q_j + Σ_{j>i} q_j/r_j,    q_j = 4π w_j r_j² ρ_j
//! ```
//!
//! plus a diagonal correction for the kink of `1/max(r, s)` on the diagonal,
//! which lifts the trapezoid double sum from first to second order. The
//! kernel stays symmetric, so `C = Σ q_i φ_i` and its gradient `4 φ u` agree
//! exactly.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{RadialField, RadialGrid};
use crate::potential::Potential;

/// Scalar functionals of one field. Serialized with the single-letter
/// names used throughout the docs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    /// `∫|u|²`
    #[serde(rename = "D")]
    pub mass: f64,
    /// `∫|∇u|²`
    #[serde(rename = "B")]
    pub dirichlet: f64,
    /// `∬ u(x)²u(y)²/|x-y|`
    #[serde(rename = "C")]
    pub coulomb: f64,
    /// `∫ A|u|^p`
    #[serde(rename = "N")]
    pub nonlinear: f64,
    /// `∫ [(3/2)(p-2)A - ∇A·x]|u|^p`
    #[serde(rename = "N_poho")]
    pub nonlinear_poho: f64,
    /// `B/2 + C/4 - N/p`
    #[serde(rename = "I")]
    pub energy: f64,
    /// `B + C/4 - N_poho/p`
    #[serde(rename = "P")]
    pub pohozaev: f64,
    #[serde(skip)]
    pub exponent: f64,
}

impl EnergyBreakdown {
    fn assemble(p: f64, d: f64, b: f64, c: f64, n: f64, n_poho: f64) -> Self {
        Self {
            mass: d,
            dirichlet: b,
            coulomb: c,
            nonlinear: n,
            nonlinear_poho: n_poho,
            energy: 0.5 * b + 0.25 * c - n / p,
            pohozaev: b + 0.25 * c - n_poho / p,
            exponent: p,
        }
    }

    /// `|P(u)| / (1 + B(u))`.
    pub fn poho_residual(&self) -> f64 {
        self.pohozaev.abs() / (1.0 + self.dirichlet)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplierDiagnostics {
    pub lambda: f64,
    /// `‖I'(u) + λu‖₂ / ‖u‖₂`
    pub residual_h1: f64,
    /// `|(3/2)F_λ - P_λ - P|`
    pub identity_gap: f64,
    pub f_lambda: f64,
    pub p_lambda: f64,
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if !(p > 2.0 && p < 6.0) {
        return Err(Error::InvalidArgument(format!("exponent must lie in (2, 6), got {p}")));
    }
    Ok(())
}

/// Grid-dependent operators, precomputed once per grid and potential.
///
/// Public functions build one per call; the solvers keep one alive for a
/// whole run.
#[derive(Debug, Clone)]
pub(crate) struct Operators {
    grid: Arc<RadialGrid>,
    pub(crate) vw: Vec<f64>,
    /// Stiffness of interval `k`: `4π (r_{k+1}³ - r_k³)/(3 h_k²)`.
    pub(crate) kappa: Vec<f64>,
    corr: Vec<f64>,
    a: Vec<f64>,
    gax: Vec<f64>,
    p: f64,
}

impl Operators {
    pub(crate) fn new(grid: &Arc<RadialGrid>, pot: &Potential, p: f64) -> Self {
        let mut ops = Self::geometry(grid);
        ops.a = grid.nodes().iter().map(|&r| pot.a(r)).collect();
        ops.gax = grid.nodes().iter().map(|&r| pot.grad_dot_x(r)).collect();
        ops.p = p;
        ops
    }

    /// Only the potential-independent parts; `a`, `gax` are left empty.
    fn geometry(grid: &Arc<RadialGrid>) -> Self {
        let r = grid.nodes();
        let n = r.len();
        let vw = grid.volume_weights();
        let kappa = r
            .windows(2)
            .map(|w| {
                let h = w[1] - w[0];
                4.0 * PI * (w[1] * w[1] + w[1] * w[0] + w[0] * w[0]) / (3.0 * h)
            })
            .collect();
        let mut corr = vec![0.0; n];
        for i in 1..n - 1 {
            corr[i] = -4.0 * PI * grid.step(i - 1) * grid.step(i) / 12.0;
        }
        corr[n - 1] = -4.0 * PI * grid.step(n - 2).powi(2) / 12.0;
        corr[0] = 4.0 * PI * grid.step(0).powi(2) / 12.0;
        Self {
            grid: Arc::clone(grid),
            vw,
            kappa,
            corr,
            a: Vec::new(),
            gax: Vec::new(),
            p: 0.0,
        }
    }

    pub(crate) fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub(crate) fn exponent(&self) -> f64 {
        self.p
    }

    pub(crate) fn mass(&self, u: &[f64]) -> f64 {
        self.vw.iter().zip(u).map(|(w, v)| w * v * v).sum()
    }

    pub(crate) fn dirichlet(&self, u: &[f64]) -> f64 {
        self.kappa
            .iter()
            .zip(u.windows(2))
            .map(|(k, w)| k * (w[1] - w[0]).powi(2))
            .sum()
    }

    /// Partial derivatives of `B/2`, i.e. the stiffness matrix applied to `u`.
    pub(crate) fn stiffness_apply(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        for (k, w) in u.windows(2).enumerate() {
            let flux = self.kappa[k] * (w[1] - w[0]);
            out[k] -= flux;
            out[k + 1] += flux;
        }
        out
    }

    pub(crate) fn newton_potential(&self, rho: &[f64]) -> Vec<f64> {
        let r = self.grid.nodes();
        let n = r.len();
        let q: Vec<f64> = self.vw.iter().zip(rho).map(|(w, x)| w * x).collect();
        // outer[i] = Σ_{j>i} q_j / r_j
        let mut outer = vec![0.0; n];
        for i in (0..n - 1).rev() {
            outer[i] = outer[i + 1] + q[i + 1] / r[i + 1];
        }
        let mut phi = vec![0.0; n];
        phi[0] = outer[0];
        let mut inner = q[0];
        for i in 1..n {
            inner += q[i];
            phi[i] = inner / r[i] + outer[i];
        }
        for i in 0..n {
            phi[i] += self.corr[i] * rho[i];
        }
        phi
    }

    fn coulomb_with(&self, rho: &[f64]) -> (f64, Vec<f64>) {
        let phi = self.newton_potential(rho);
        let c = self
            .vw
            .iter()
            .zip(rho)
            .zip(&phi)
            .map(|((w, x), f)| w * x * f)
            .sum();
        (c, phi)
    }

    pub(crate) fn coulomb(&self, u: &[f64]) -> f64 {
        let rho: Vec<f64> = u.iter().map(|v| v * v).collect();
        self.coulomb_with(&rho).0
    }

    fn coulomb_bruteforce(&self, u: &[f64]) -> f64 {
        let r = self.grid.nodes();
        let rho: Vec<f64> = u.iter().map(|v| v * v).collect();
        let q: Vec<f64> = self.vw.iter().zip(&rho).map(|(w, x)| w * x).collect();
        let mut sum = 0.0;
        for i in 1..r.len() {
            for j in 1..r.len() {
                sum += q[i] * q[j] / r[i].max(r[j]);
            }
            sum += q[i] * self.corr[i] * rho[i];
        }
        sum
    }

    /// `(∫ A|u|^p, ∫ ∇A·x |u|^p)`
    fn nonlinear_parts(&self, u: &[f64]) -> (f64, f64) {
        let mut n = 0.0;
        let mut m = 0.0;
        for i in 0..u.len() {
            let up = self.vw[i] * u[i].abs().powf(self.p);
            n += self.a[i] * up;
            m += self.gax[i] * up;
        }
        (n, m)
    }

    pub(crate) fn breakdown(&self, u: &[f64]) -> EnergyBreakdown {
        let p = self.p;
        let d = self.mass(u);
        let b = self.dirichlet(u);
        let c = self.coulomb(u);
        let (n, m) = self.nonlinear_parts(u);
        let n_poho = 1.5 * (p - 2.0) * n - m;
        EnergyBreakdown::assemble(p, d, b, c, n, n_poho)
    }

    /// Partial derivatives `∂I/∂u_i` of the discrete energy.
    pub(crate) fn partials(&self, u: &[f64]) -> Vec<f64> {
        let rho: Vec<f64> = u.iter().map(|v| v * v).collect();
        let phi = self.newton_potential(&rho);
        let mut g = self.stiffness_apply(u);
        for i in 0..u.len() {
            let local = phi[i] * u[i] - self.a[i] * u[i].abs().powf(self.p - 2.0) * u[i];
            g[i] += self.vw[i] * local;
        }
        g
    }

    /// L² gradient samples; see [`energy_gradient`].
    pub(crate) fn l2_gradient(&self, u: &[f64]) -> Vec<f64> {
        let n = u.len();
        let rho: Vec<f64> = u.iter().map(|v| v * v).collect();
        let phi = self.newton_potential(&rho);
        let lu = self.stiffness_apply(u);
        let mut g = vec![0.0; n];
        let local = |i: usize| phi[i] * u[i] - self.a[i] * u[i].abs().powf(self.p - 2.0) * u[i];
        let h0 = self.grid.step(0);
        // even extension: -Δu(0) = -3u''(0), u''(0) ≈ 2(u_1 - u_0)/h²
        g[0] = 6.0 * (u[0] - u[1]) / (h0 * h0) + local(0);
        for i in 1..n - 1 {
            g[i] = lu[i] / self.vw[i] + local(i);
        }
        g
    }

    /// `‖g‖₂` over the interior nodes.
    pub(crate) fn l2_norm(&self, g: &[f64]) -> f64 {
        let n = g.len();
        (0..n - 1)
            .map(|i| self.vw[i] * g[i] * g[i])
            .sum::<f64>()
            .sqrt()
    }

    pub(crate) fn multiplier(&self, u: &[f64]) -> Result<(EnergyBreakdown, MultiplierDiagnostics)> {
        let e = self.breakdown(u);
        if e.mass <= 0.0 {
            return Err(Error::DegenerateField("zero mass"));
        }
        let p = self.p;
        let lambda = (e.nonlinear - e.dirichlet - e.coulomb) / e.mass;
        let g = self.l2_gradient(u);
        let res: Vec<f64> = g.iter().zip(u).map(|(g, v)| g + lambda * v).collect();
        let residual_h1 = self.l2_norm(&res) / e.mass.sqrt();

        let f_lambda = e.dirichlet + lambda * e.mass + e.coulomb - e.nonlinear;
        let virial: f64 = (0..u.len())
            .map(|i| self.vw[i] * (3.0 * self.a[i] + self.gax[i]) * u[i].abs().powf(p))
            .sum();
        let p_lambda =
            0.5 * e.dirichlet + 1.5 * lambda * e.mass + 1.25 * e.coulomb - virial / p;
        let identity_gap = (1.5 * f_lambda - p_lambda - e.pohozaev).abs();
        Ok((
            e,
            MultiplierDiagnostics {
                lambda,
                residual_h1,
                identity_gap,
                f_lambda,
                p_lambda,
            },
        ))
    }
}

/// `D(u) = ∫|u|²`.
pub fn mass(u: &RadialField) -> f64 {
    Operators::geometry(u.grid()).mass(u.values())
}

/// `B(u) = ∫|∇u|²`, exact for the piecewise linear interpolant of `u`.
pub fn dirichlet(u: &RadialField) -> f64 {
    Operators::geometry(u.grid()).dirichlet(u.values())
}

/// Newton potential `φ(r) = ∫ u(y)²/|x - y| dy` at the nodes.
pub fn newton_potential(u: &RadialField) -> Vec<f64> {
    let rho: Vec<f64> = u.values().iter().map(|v| v * v).collect();
    Operators::geometry(u.grid()).newton_potential(&rho)
}

/// `C(u) = ∬ u(x)²u(y)²/|x - y| dx dy` in O(n).
pub fn coulomb(u: &RadialField) -> f64 {
    Operators::geometry(u.grid()).coulomb(u.values())
}

/// The same quadrature as [`coulomb`] written as an explicit O(n²) double
/// sum over the radially reduced kernel `1/max(r, s)`.
pub fn coulomb_bruteforce(u: &RadialField) -> f64 {
    Operators::geometry(u.grid()).coulomb_bruteforce(u.values())
}

/// `∫ A|u|^p` (without the `1/p`).
pub fn weighted_nonlinearity(u: &RadialField, pot: &Potential, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let ops = Operators::new(u.grid(), pot, p);
    Ok(ops.nonlinear_parts(u.values()).0)
}

pub fn energy(u: &RadialField, pot: &Potential, p: f64) -> Result<EnergyBreakdown> {
    check_exponent(p)?;
    Ok(Operators::new(u.grid(), pot, p).breakdown(u.values()))
}

/// L² gradient `-Δu + φ_u u - A|u|^{p-2}u` of the discrete energy.
///
/// At interior nodes this is the exact gradient of the discrete energy
/// with respect to the inner product `Σ 4π w_i r_i² f_i g_i`, so that
/// `d/dh I(u + hv) = ⟨gradient, v⟩` for every `v` vanishing at `R` and at
/// the origin. The origin has zero weight in that inner product; a nonzero
/// `v(0)` adds an `O(h³)` term the pairing cannot see. The
/// Laplacian there is the conservative three-point form
/// `r⁻² (r² u')'`. At the origin `-Δu = -3u''(0)` for the even
/// extension. The boundary node carries no degree of freedom and is 0.
pub fn energy_gradient(u: &RadialField, pot: &Potential, p: f64) -> Result<Vec<f64>> {
    check_exponent(p)?;
    Ok(Operators::new(u.grid(), pot, p).l2_gradient(u.values()))
}

/// Chooses `λ` so that `F_λ(u) = 0` and reports the residual and the
/// Pohozaev bookkeeping identity.
pub fn extract_multiplier(u: &RadialField, pot: &Potential, p: f64) -> Result<MultiplierDiagnostics> {
    check_exponent(p)?;
    Ok(Operators::new(u.grid(), pot, p).multiplier(u.values())?.1)
}

/// `(C(u) + B(u)/16π) / ∫|u|³`.
pub fn coercivity_diagnostic(u: &RadialField) -> Result<f64> {
    let ops = Operators::geometry(u.grid());
    let v = u.values();
    let cubic: f64 = ops.vw.iter().zip(v).map(|(w, x)| w * x.abs().powi(3)).sum();
    if cubic <= 0.0 {
        return Err(Error::DegenerateField("zero cubic norm"));
    }
    Ok((ops.coulomb(v) + ops.dirichlet(v) / (16.0 * PI)) / cubic)
}

/// `N / (B^{3(p-2)/4} D^{(6-p)/4})`, the Gagliardo–Nirenberg quotient.
pub fn gn_diagnostic(u: &RadialField, pot: &Potential, p: f64) -> Result<f64> {
    let e = energy(u, pot, p)?;
    if e.dirichlet <= 0.0 {
        return Err(Error::DegenerateField("zero gradient norm"));
    }
    Ok(e.nonlinear / (e.dirichlet.powf(0.75 * (p - 2.0)) * e.mass.powf(0.25 * (6.0 - p))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{gaussian_field, make_grid, GaussianParams, Spacing};
    use approx::assert_relative_eq;

    fn grid(n: usize, rmax: f64) -> Arc<RadialGrid> {
        Arc::new(make_grid(n, rmax, Spacing::Uniform).unwrap())
    }

    fn unit_gaussian(g: &Arc<RadialGrid>) -> RadialField {
        gaussian_field(GaussianParams::new(1.0, 1.0).unwrap(), g).unwrap()
    }

    // Gaussian closed forms for u = π^{-3/4} e^{-r²/2}
    const B_G: f64 = 1.5;
    fn c_g() -> f64 {
        (2.0 / PI).sqrt()
    }
    fn n4_g() -> f64 {
        PI.powi(-3) * (PI / 2.0).powf(1.5)
    }

    #[test]
    fn zero_field_is_zero_everywhere() {
        let g = grid(64, 10.0);
        let u = RadialField::zeros(g);
        let pot = Potential::exp_bump(1.0, 1.0, 1.0).unwrap();
        assert_eq!(mass(&u), 0.0);
        assert_eq!(dirichlet(&u), 0.0);
        assert_eq!(coulomb(&u), 0.0);
        assert_eq!(coulomb_bruteforce(&u), 0.0);
        let e = energy(&u, &pot, 4.0).unwrap();
        assert_eq!((e.energy, e.pohozaev, e.nonlinear), (0.0, 0.0, 0.0));
        assert!(energy_gradient(&u, &pot, 4.0).unwrap().iter().all(|&v| v == 0.0));
        assert!(matches!(extract_multiplier(&u, &pot, 4.0), Err(Error::DegenerateField(_))));
        assert!(coercivity_diagnostic(&u).is_err());
        assert!(gn_diagnostic(&u, &pot, 4.0).is_err());
    }

    #[test]
    fn gaussian_closed_forms() {
        let g = grid(2049, 40.0);
        let u = unit_gaussian(&g);
        let one = Potential::constant(1.0).unwrap();
        assert_relative_eq!(mass(&u), 1.0, max_relative = 1e-10);
        assert_relative_eq!(dirichlet(&u), B_G, max_relative = 1e-5);
        assert_relative_eq!(coulomb(&u), c_g(), max_relative = 1e-5);
        let n = weighted_nonlinearity(&u, &one, 4.0).unwrap();
        assert_relative_eq!(n, n4_g(), max_relative = 1e-6);

        let e = energy(&u, &one, 4.0).unwrap();
        assert!((e.energy - 0.933600).abs() < 1e-4);
        assert!((e.pohozaev - 1.651851).abs() < 1e-4);
        let m = extract_multiplier(&u, &one, 4.0).unwrap();
        assert!((m.lambda + 2.234391).abs() < 1e-4);
        let gn = gn_diagnostic(&u, &one, 4.0).unwrap();
        assert!((gn - 0.034564).abs() < 1e-4);
    }

    #[test]
    fn prefix_sum_matches_double_sum() {
        let g = grid(300, 12.0);
        let u = RadialField::from_fn(Arc::clone(&g), |r| (1.0 + r) * (-0.4 * r * r).exp()).unwrap();
        assert_relative_eq!(coulomb(&u), coulomb_bruteforce(&u), max_relative = 1e-12);
    }

    #[test]
    fn newton_potential_of_gaussian_at_origin() {
        // φ(0) = 4π ∫ s ρ(s) ds = 4π · π^{-3/2} · 1/2 = 2/√π
        let g = grid(2049, 40.0);
        let phi = newton_potential(&unit_gaussian(&g));
        assert_relative_eq!(phi[0], 2.0 / PI.sqrt(), max_relative = 1e-5);
        // far field is 1/r times the mass
        let k = g.len() - 1;
        assert_relative_eq!(phi[k] * g.nodes()[k], 1.0, max_relative = 1e-6);
    }

    #[test]
    fn gradient_at_origin_matches_closed_form() {
        let g = grid(2049, 40.0);
        let u = unit_gaussian(&g);
        let one = Potential::constant(1.0).unwrap();
        let grad = energy_gradient(&u, &one, 4.0).unwrap();
        let u0 = PI.powf(-0.75);
        // u''(0) = -u0, φ(0) = 2/√π
        let exact = 3.0 * u0 + 2.0 / PI.sqrt() * u0 - u0.powi(3);
        assert!((grad[0] - exact).abs() < 1e-3, "{} vs {exact}", grad[0]);
    }

    #[test]
    fn gradient_matches_directional_difference() {
        let g = grid(513, 20.0);
        let u = RadialField::from_fn(Arc::clone(&g), |r| 0.6 * (-0.3 * r * r).exp()).unwrap();
        let v = RadialField::from_fn(Arc::clone(&g), |r| (0.5 * r).cos() * (-0.1 * r * r).exp()).unwrap();
        let pot = Potential::exp_bump(1.0, 1.0, 1.0).unwrap();
        let grad = energy_gradient(&u, &pot, 3.5).unwrap();
        let vw = g.volume_weights();
        let inner: f64 = (0..g.len()).map(|i| vw[i] * grad[i] * v.values()[i]).sum();
        let h = 1e-5;
        let shifted = |s: f64| {
            let w: Vec<f64> = u.values().iter().zip(v.values()).map(|(a, b)| a + s * b).collect();
            energy(&RadialField::new(Arc::clone(&g), w).unwrap(), &pot, 3.5).unwrap().energy
        };
        let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
        assert_relative_eq!(inner, fd, max_relative = 1e-4);

        // directions vanishing at the origin see the exact gradient
        let v0 = RadialField::from_fn(Arc::clone(&g), |r| r * (-0.1 * r * r).exp()).unwrap();
        let inner: f64 = (0..g.len()).map(|i| vw[i] * grad[i] * v0.values()[i]).sum();
        let shifted = |s: f64| {
            let w: Vec<f64> = u.values().iter().zip(v0.values()).map(|(a, b)| a + s * b).collect();
            energy(&RadialField::new(Arc::clone(&g), w).unwrap(), &pot, 3.5).unwrap().energy
        };
        let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
        assert_relative_eq!(inner, fd, max_relative = 1e-7);
    }

    #[test]
    fn composites_and_identity() {
        let g = grid(257, 15.0);
        let u = RadialField::from_fn(Arc::clone(&g), |r| (2.0 - r.min(2.0)) + (-r).exp()).unwrap();
        for pot in [
            Potential::constant(2.0).unwrap(),
            Potential::exp_bump(1.0, 3.0, 0.7).unwrap(),
            Potential::rational_bump(1.0, 2.0).unwrap(),
        ] {
            for p in [2.5, 3.0, 4.0, 5.0] {
                let e = energy(&u, &pot, p).unwrap();
                let i = e.dirichlet / 2.0 + e.coulomb / 4.0 - e.nonlinear / p;
                assert_relative_eq!(e.energy, i, max_relative = 1e-12);
                let m = extract_multiplier(&u, &pot, p).unwrap();
                assert!(m.f_lambda.abs() <= 1e-12 * (e.dirichlet + e.coulomb + e.nonlinear));
                assert!(m.identity_gap <= 1e-10 * (1.0 + e.pohozaev.abs()));
            }
        }
    }

    #[test]
    fn coercivity_scaling() {
        let g = grid(1025, 20.0);
        let u = unit_gaussian(&g);
        let u2 = u.scaled(2.0);
        let (b, c) = (dirichlet(&u), coulomb(&u));
        let cubic = integrate_cubic(&u);
        let expect = (16.0 * c + 4.0 * b / (16.0 * PI)) / (8.0 * cubic);
        assert_relative_eq!(coercivity_diagnostic(&u2).unwrap(), expect, max_relative = 1e-13);
        for sigma in [0.5, 1.0, 2.0] {
            let v = gaussian_field(GaussianParams::new(sigma, 1.0).unwrap(), &g).unwrap();
            assert!(coercivity_diagnostic(&v).unwrap() > 0.0);
        }
    }

    fn integrate_cubic(u: &RadialField) -> f64 {
        let v: Vec<f64> = u.values().iter().map(|x| x.abs().powi(3)).collect();
        crate::grid::integrate_radial(&v, u.grid()).unwrap()
    }

    #[test]
    fn exponent_range_is_enforced() {
        let g = grid(64, 10.0);
        let u = unit_gaussian(&g);
        let one = Potential::constant(1.0).unwrap();
        assert!(weighted_nonlinearity(&u, &one, 2.0).is_err());
        assert!(energy(&u, &one, 6.0).is_err());
        assert!(energy(&u, &one, 3.0).is_ok());
    }

    #[test]
    fn breakdown_serializes_with_short_names() {
        let e = EnergyBreakdown::assemble(4.0, 1.0, 2.0, 3.0, 4.0, 5.0);
        let json = serde_json::to_value(e).unwrap();
        for key in ["D", "B", "C", "N", "N_poho", "I", "P"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }
}
