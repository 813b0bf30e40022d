//! Stationary two-channel scattering of a ground-state atom through two
//! separated field regions, plus the single-channel hard-wall-plus-well
//! reflection used for the singlet contact limit.
//!
//! Units: ħ = m = 1. A stationary state has energy E = k²/2 in the ground
//! channel; the excited channel carries the offset −δ everywhere, and inside
//! a field the channels are coupled by Ω/2.

use std::f64::consts::TAU;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Largest condition estimate accepted from the 4×4 matching system.
const MAX_CONDITION: f64 = 1e13;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Field regions [0, l] and [l + L, 2l + L] at Rabi frequency Ω and detuning δ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldGeometry {
    pub l: f64,
    pub gap: f64,
    pub rabi: f64,
    pub detuning: f64,
}

impl FieldGeometry {
    pub fn new(l: f64, gap: f64, rabi: f64, detuning: f64) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(invalid("l", format!("must be > 0, got {l}")));
        }
        if !(gap >= 0.0 && gap.is_finite()) {
            return Err(invalid("L", format!("must be >= 0, got {gap}")));
        }
        if !(rabi >= 0.0 && rabi.is_finite()) {
            return Err(invalid("rabi", format!("must be >= 0, got {rabi}")));
        }
        if !detuning.is_finite() {
            return Err(invalid("detuning", "must be finite"));
        }
        Ok(Self {
            l,
            gap,
            rabi,
            detuning,
        })
    }

    pub fn with_detuning(self, detuning: f64) -> Self {
        Self { detuning, ..self }
    }

    pub fn with_rabi(self, rabi: f64) -> Self {
        Self { rabi, ..self }
    }

    /// Right edge of the second field, 2l + L.
    pub fn right_edge(&self) -> f64 {
        2.0 * self.l + self.gap
    }

    /// Rabi frequency at position x.
    pub fn rabi_at(&self, x: f64) -> f64 {
        let inside = (0.0..=self.l).contains(&x)
            || (self.l + self.gap..=self.right_edge()).contains(&x);
        if inside {
            self.rabi
        } else {
            0.0
        }
    }
}

/// Asymptotic channel wavenumbers at ground-channel wavenumber k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelState {
    pub k: f64,
    /// Excited-channel wavenumber when open, decay constant when closed.
    pub q: f64,
    pub excited_open: bool,
}

pub fn channel_state(k: f64, geometry: &FieldGeometry) -> Result<ChannelState> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(invalid("k", format!("must be > 0, got {k}")));
    }
    let q2 = k * k + 2.0 * geometry.detuning;
    Ok(ChannelState {
        k,
        q: q2.abs().sqrt(),
        excited_open: q2 > 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringAmplitudes {
    pub t_gg: Complex64,
    pub t_ge: Complex64,
    pub r_gg: Complex64,
    pub r_ge: Complex64,
    /// |total outgoing flux − 1|.
    pub flux_defect: f64,
    pub channel: ChannelState,
}

impl ScatteringAmplitudes {
    /// Outgoing excited-state flux per unit incident flux, (q/k)|T_ge|².
    pub fn excitation(&self) -> f64 {
        if self.channel.excited_open {
            self.channel.q / self.channel.k * self.t_ge.norm_sqr()
        } else {
            0.0
        }
    }
}

/// Phase κ·w as (k·w mod 2π) + (κ − k)·w.
fn reduced_phase(k: f64, dk: f64, width: f64) -> f64 {
    (k * width).rem_euclid(TAU) + dk * width
}

/// 2×2 single-channel transfer block for ψ'' = −κ²ψ across `width`, with
/// κ² = k² − 2λ. Returns [[a, b], [c, d]] acting on (ψ, ψ').
fn channel_block(k: f64, lambda: f64, width: f64) -> [[f64; 2]; 2] {
    let kappa2 = k * k - 2.0 * lambda;
    if kappa2 > 0.0 {
        let kappa = kappa2.sqrt();
        // κ − k without cancellation
        let dk = -2.0 * lambda / (kappa + k);
        let (s, c) = reduced_phase(k, dk, width).sin_cos();
        [[c, s / kappa], [-kappa * s, c]]
    } else if kappa2 < 0.0 {
        let g = (-kappa2).sqrt();
        let (s, c) = ((g * width).sinh(), (g * width).cosh());
        [[c, s / g], [g * s, c]]
    } else {
        [[1.0, width], [0.0, 1.0]]
    }
}

/// Eigen-decomposition of the in-field potential [[0, Ω/2], [Ω/2, −δ]]:
/// returns (cos θ, sin θ, λ_+, λ_−) with eigenvectors (c, s) for λ_+ and
/// (−s, c) for λ_−.
fn dressed_basis(rabi: f64, detuning: f64) -> (f64, f64, f64, f64) {
    let op = rabi.hypot(detuning);
    let lam_p = 0.5 * (-detuning + op);
    let lam_m = 0.5 * (-detuning - op);
    if op == 0.0 {
        return (1.0, 0.0, lam_p, lam_m);
    }
    let (c, s) = if detuning >= 0.0 {
        let c = ((op + detuning) / (2.0 * op)).sqrt();
        (c, rabi / (2.0 * op * c))
    } else {
        let s = ((op - detuning) / (2.0 * op)).sqrt();
        (rabi / (2.0 * op * s), s)
    };
    (c, s, lam_p, lam_m)
}

/// Transfer matrix mapping (ψ_g, ψ_e, ψ_g′, ψ_e′) across one region of the
/// given width, with or without the field.
pub fn region_transfer(
    width: f64,
    field_on: bool,
    state: &ChannelState,
    geometry: &FieldGeometry,
) -> Matrix4<Complex64> {
    let k = state.k;
    let rabi = if field_on { geometry.rabi } else { 0.0 };
    let (c, s, lam_a, lam_b) = dressed_basis(rabi, geometry.detuning);
    let a = channel_block(k, lam_a, width);
    let b = channel_block(k, lam_b, width);

    // U = [[c, −s], [s, c]]; M_ψψ-block = U diag(a_ij, b_ij) Uᵀ for each (i, j).
    let rotate = |ai: f64, bi: f64| -> [[f64; 2]; 2] {
        [
            [c * c * ai + s * s * bi, c * s * (ai - bi)],
            [c * s * (ai - bi), s * s * ai + c * c * bi],
        ]
    };
    let mut m = Matrix4::<Complex64>::zeros();
    for bi in 0..2 {
        for bj in 0..2 {
            let blk = rotate(a[bi][bj], b[bi][bj]);
            for r in 0..2 {
                for col in 0..2 {
                    m[(2 * bi + r, 2 * bj + col)] = Complex64::new(blk[r][col], 0.0);
                }
            }
        }
    }
    m
}

/// Transfer matrix across both fields and the gap between them.
pub fn full_transfer(state: &ChannelState, geometry: &FieldGeometry) -> Matrix4<Complex64> {
    let field = region_transfer(geometry.l, true, state, geometry);
    if geometry.gap > 0.0 {
        let free = region_transfer(geometry.gap, false, state, geometry);
        field * free * field
    } else {
        field * field
    }
}

fn plane(k: f64, x: f64) -> Complex64 {
    Complex64::from_polar(1.0, (k * x).rem_euclid(TAU))
}

/// Transmission and reflection amplitudes for unit ground-state incidence
/// from the left. Transmitted waves are referenced to the global origin,
/// ψ_e(x) = T_ge e^{iqx} beyond the second field.
pub fn scattering_amplitudes(k: f64, geometry: &FieldGeometry) -> Result<ScatteringAmplitudes> {
    let state = channel_state(k, geometry)?;
    let m = full_transfer(&state, geometry);
    let x_r = geometry.right_edge();
    let q = state.q;
    let ik = I * k;

    // left edge: (ψ_g, ψ_e, ψ_g′, ψ_e′)(0) = a0 + A_L·(R_gg, R_ge)
    let a0 = Vector4::new(ONE, ZERO, ik, ZERO);
    let l_rgg = Vector4::new(ONE, ZERO, -ik, ZERO);
    let l_rge = if state.excited_open {
        Vector4::new(ZERO, ONE, ZERO, -I * q)
    } else {
        Vector4::new(ZERO, ONE, ZERO, Complex64::new(q, 0.0))
    };
    // right edge: A_R·(T_gg, T_ge)
    let eg = plane(k, x_r);
    let r_tgg = Vector4::new(eg, ZERO, ik * eg, ZERO);
    let r_tge = if state.excited_open {
        let ee = plane(q, x_r);
        Vector4::new(ZERO, ee, ZERO, I * q * ee)
    } else {
        Vector4::new(ZERO, ONE, ZERO, Complex64::new(-q, 0.0))
    };

    let mut sys = Matrix4::<Complex64>::zeros();
    sys.set_column(0, &(m * l_rgg));
    sys.set_column(1, &(m * l_rge));
    sys.set_column(2, &(-r_tgg));
    sys.set_column(3, &(-r_tge));
    let mut rhs = -(m * a0);
    // derivative rows carry a factor ~k
    for row in 2..4 {
        for col in 0..4 {
            sys[(row, col)] /= k;
        }
        rhs[row] /= k;
    }

    let lu = sys.lu();
    let diag: Vec<f64> = (0..4).map(|i| lu.u()[(i, i)].norm()).collect();
    let big = diag.iter().cloned().fold(0.0, f64::max);
    let small = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = if small > 0.0 { big / small } else { f64::INFINITY };
    let sol = match lu.solve(&rhs) {
        Some(sol) if condition < MAX_CONDITION => sol,
        _ => return Err(Error::SingularSystem { k, condition }),
    };

    let (r_gg, r_ge, t_gg, t_ge) = (sol[0], sol[1], sol[2], sol[3]);
    let mut flux = t_gg.norm_sqr() + r_gg.norm_sqr();
    if state.excited_open {
        flux += q / k * (t_ge.norm_sqr() + r_ge.norm_sqr());
    }
    Ok(ScatteringAmplitudes {
        t_gg,
        t_ge,
        r_gg,
        r_ge,
        flux_defect: (flux - 1.0).abs(),
        channel: state,
    })
}

/// Excited-state probability for monochromatic ground-state incidence, (q/k)|T_ge|².
pub fn monochromatic_excitation(k: f64, geometry: &FieldGeometry) -> Result<f64> {
    Ok(scattering_amplitudes(k, geometry)?.excitation())
}

/// Reflection amplitude in the relative coordinate for a hard wall at the
/// origin with an attached square well of depth `depth` and width `width`,
/// at energy `energy` (ħ = m = 1). The outside wave is e^{−ikx} + R e^{ikx}.
pub fn wall_well_reflection(depth: f64, width: f64, energy: f64) -> Result<Complex64> {
    if !(depth >= 0.0 && depth.is_finite()) {
        return Err(invalid("V_w", format!("must be >= 0, got {depth}")));
    }
    if !(width > 0.0 && width.is_finite()) {
        return Err(invalid("L_w", format!("must be > 0, got {width}")));
    }
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(invalid("E", format!("must be > 0, got {energy}")));
    }
    let k = (2.0 * energy).sqrt();
    let kw = (2.0 * (energy + depth)).sqrt();
    let (s, c) = (kw * width).sin_cos();
    // inside ψ = sin(Kx); log-derivative match written without cot
    let num = Complex64::new(kw * c, k * s);
    let den = Complex64::new(kw * c, -k * s);
    Ok(-plane(-2.0 * k, width) * num / den)
}

/// Well depth satisfying (2V_w)^{1/2} L_w = π/2 for the given width.
pub fn limit_well_depth(width: f64) -> f64 {
    let kw = std::f64::consts::FRAC_PI_2 / width;
    0.5 * kw * kw
}
