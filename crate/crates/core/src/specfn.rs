//! Hermite polynomials, harmonic-oscillator eigenstates and the uniform
//! k-space quadrature shared by every wavepacket integral.

use std::f64::consts::{PI, SQRT_2};

use log::warn;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Default node count of the k-space grid.
pub const DEFAULT_NODES: usize = 2048;
/// Default half-width multiplier of the k-space grid.
pub const DEFAULT_WIDTH_MULT: f64 = 8.0;
/// Default bound |x0| / δ_N below which a warning is logged.
pub const DEFAULT_SEPARATION_MULT: f64 = 6.0;

/// Physicists' Hermite polynomial H_n(x) by upward recurrence.
///
/// Supported for n <= 200; beyond that (or for large |x|) the value may
/// overflow an f64.
pub fn hermite(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for j in 1..n {
        let next = 2.0 * x * cur - 2.0 * j as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// sqrt(2^n n!) evaluated in log space.
fn hermite_norm(n: usize) -> f64 {
    let log = (1..=n).map(|j| (j as f64).ln()).sum::<f64>() + n as f64 * 2f64.ln();
    (0.5 * log).exp()
}

/// (-i)^n
fn minus_i_pow(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Preparation trap and the kick applied on release (ħ = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorBasis {
    pub mass: f64,
    pub omega: f64,
    /// Trap centre.
    pub x0: f64,
    /// Kick wavenumber.
    pub k0: f64,
}

impl OscillatorBasis {
    pub fn new(mass: f64, omega: f64, x0: f64, k0: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(invalid("mass", format!("must be > 0, got {mass}")));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(invalid("omega", format!("must be > 0, got {omega}")));
        }
        if !x0.is_finite() || !k0.is_finite() {
            return Err(invalid("x0", "x0 and k0 must be finite"));
        }
        Ok(Self {
            mass,
            omega,
            x0,
            k0,
        })
    }

    /// Ground-state width δ0 = [1/(2mω)]^{1/2}.
    pub fn delta0(&self) -> f64 {
        (0.5 / (self.mass * self.omega)).sqrt()
    }

    /// Width of the highest of `n_atoms` occupied levels, δ_N = [(N+1/2)/(mω)]^{1/2}.
    pub fn delta_n(&self, n_atoms: usize) -> f64 {
        ((n_atoms as f64 + 0.5) / (self.mass * self.omega)).sqrt()
    }

    /// Whether the trap sits far enough from the first field, |x0| >= mult·δ_N.
    /// Logs a warning when it does not.
    pub fn check_separation(&self, n_atoms: usize, mult: f64) -> bool {
        let need = mult * self.delta_n(n_atoms);
        let ok = self.x0.abs() >= need;
        if !ok {
            warn!(
                "trap centre |x0| = {:.4e} is below {mult}·δ_N = {need:.4e}; the initial cloud overlaps the field region",
                self.x0.abs()
            );
        }
        ok
    }
}

/// Kicked n-th oscillator eigenstate in wavenumber representation, φ̃_n(k).
pub fn ho_momentum_amplitude(n: usize, k: f64, basis: &OscillatorBasis) -> Complex64 {
    let d0 = basis.delta0();
    let u = k - basis.k0;
    let envelope = (2.0 * d0 * d0 / PI).powf(0.25) * (-d0 * d0 * u * u).exp();
    let real = envelope * hermite(n, SQRT_2 * d0 * u) / hermite_norm(n);
    minus_i_pow(n) * Complex64::from_polar(real, -k * basis.x0)
}

/// Kicked, displaced n-th oscillator eigenstate e^{ik0(x-x0)}φ_n(x-x0).
pub fn ho_position_amplitude(n: usize, x: f64, basis: &OscillatorBasis) -> Complex64 {
    let d0 = basis.delta0();
    let y = x - basis.x0;
    let envelope = (2.0 * PI * d0 * d0).powf(-0.25) * (-y * y / (4.0 * d0 * d0)).exp();
    let real = envelope * hermite(n, y / (SQRT_2 * d0)) / hermite_norm(n);
    Complex64::from_polar(real, basis.k0 * y)
}

/// Uniform composite-trapezoid grid.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub center: f64,
    pub halfwidth: f64,
}

impl QuadratureGrid {
    /// Trapezoid grid on [center - halfwidth, center + halfwidth] with `count` nodes.
    pub fn uniform(center: f64, halfwidth: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(invalid("nodes", format!("need at least 2 nodes, got {count}")));
        }
        if !(halfwidth > 0.0 && halfwidth.is_finite()) {
            return Err(invalid("halfwidth", format!("must be > 0, got {halfwidth}")));
        }
        let lo = center - halfwidth;
        let h = 2.0 * halfwidth / (count - 1) as f64;
        let nodes: Vec<f64> = (0..count).map(|i| lo + h * i as f64).collect();
        let mut weights = vec![h; count];
        weights[0] = 0.5 * h;
        weights[count - 1] = 0.5 * h;
        Ok(Self {
            nodes,
            weights,
            center,
            halfwidth,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn k_min(&self) -> f64 {
        self.nodes[0]
    }

    /// Σ w_i f(x_i)
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Same grid with twice the node spacing resolution (2n−1 nodes).
    pub fn refined(&self) -> Self {
        Self::uniform(self.center, self.halfwidth, 2 * self.len() - 1).expect("valid grid")
    }
}

/// k-grid centred on k0 covering the momentum support of all levels n <= nmax.
pub fn build_k_grid(
    basis: &OscillatorBasis,
    nmax: usize,
    nodes: usize,
    width_mult: f64,
) -> Result<QuadratureGrid> {
    if nodes < 64 {
        return Err(invalid("nodes", format!("must be >= 64, got {nodes}")));
    }
    if !(width_mult > 0.0 && width_mult.is_finite()) {
        return Err(invalid("width_mult", format!("must be > 0, got {width_mult}")));
    }
    let halfwidth = width_mult * ((nmax + 1) as f64).sqrt() / basis.delta0();
    let grid = QuadratureGrid::uniform(basis.k0, halfwidth, nodes)?;
    if grid.k_min() <= 0.0 {
        return Err(Error::GridNotRightMoving { k_min: grid.k_min() });
    }
    Ok(grid)
}
