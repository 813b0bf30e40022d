//! Ramsey fringes: the semiclassical closed form, quantum excitation of
//! kicked oscillator levels through the two fields, the averaged many-body
//! signal, detuning scans and projection-noise estimates.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::scatter::{scattering_amplitudes, FieldGeometry};
use crate::specfn::{ho_momentum_amplitude, OscillatorBasis, QuadratureGrid};

/// Kinematic parameters of a Ramsey run (ħ = m = 1 unless stated).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamseyParams {
    pub v0: f64,
    /// Time spent in each field, l/v0.
    pub tau: f64,
    /// Free-flight time between the fields, L/v0.
    pub flight_time: f64,
    pub n_atoms: usize,
}

impl RamseyParams {
    pub fn new(geometry: &FieldGeometry, basis: &OscillatorBasis, n_atoms: usize) -> Result<Self> {
        let v0 = basis.k0 / basis.mass;
        if !(v0 > 0.0) {
            return Err(invalid("v0", format!("launch speed must be > 0, got {v0}")));
        }
        if n_atoms == 0 {
            return Err(invalid("N", "must be >= 1"));
        }
        Ok(Self {
            v0,
            tau: geometry.l / v0,
            flight_time: geometry.gap / v0,
            n_atoms,
        })
    }

    pub fn nmax(&self) -> usize {
        self.n_atoms - 1
    }

    /// Generalized Rabi frequency Ω′ = (Ω² + Δ²)^{1/2}.
    pub fn omega_prime(rabi: f64, detuning: f64) -> f64 {
        rabi.hypot(detuning)
    }
}

/// Ramsey's semiclassical excitation probability for two pulses of
/// duration `tau` separated by a free evolution of duration `flight_time`.
pub fn semiclassical_fringe(delta: f64, rabi: f64, tau: f64, flight_time: f64) -> f64 {
    let op = rabi.hypot(delta);
    if op == 0.0 {
        return 0.0;
    }
    let (s, c) = (0.5 * op * tau).sin_cos();
    let (sd, cd) = (0.5 * delta * flight_time).sin_cos();
    let bracket = c * cd - delta / op * s * sd;
    let p = 4.0 * rabi * rabi / (op * op) * s * s * bracket * bracket;
    p.clamp(0.0, 1.0)
}

/// Excited-channel data of one geometry sampled on a k-grid.
#[derive(Debug, Clone)]
pub struct TransmissionTable {
    pub grid: QuadratureGrid,
    /// (q/k)|T_ge|² per node; zero where the excited channel is closed.
    pub excitation: Vec<f64>,
    pub t_ge: Vec<Complex64>,
    /// Excited wavenumber per node (meaningful where open).
    pub q: Vec<f64>,
    pub open: Vec<bool>,
}

impl TransmissionTable {
    pub fn new(geometry: &FieldGeometry, grid: &QuadratureGrid) -> Result<Self> {
        if grid.is_empty() || grid.k_min() <= 0.0 {
            return Err(Error::GridNotRightMoving {
                k_min: grid.nodes.first().copied().unwrap_or(0.0),
            });
        }
        let n = grid.len();
        let mut table = Self {
            grid: grid.clone(),
            excitation: Vec::with_capacity(n),
            t_ge: Vec::with_capacity(n),
            q: Vec::with_capacity(n),
            open: Vec::with_capacity(n),
        };
        for &k in &grid.nodes {
            let amp = scattering_amplitudes(k, geometry)?;
            table.excitation.push(amp.excitation());
            table.t_ge.push(amp.t_ge);
            table.q.push(amp.channel.q);
            table.open.push(amp.channel.excited_open);
        }
        Ok(table)
    }

    /// p_n = ∫dk (q/k)|T_ge(k)|² |φ̃_n(k)|².
    pub fn level_excitation(&self, n: usize, basis: &OscillatorBasis) -> f64 {
        let p: f64 = self
            .grid
            .nodes
            .iter()
            .zip(&self.grid.weights)
            .zip(&self.excitation)
            .map(|((&k, &w), &e)| w * e * ho_momentum_amplitude(n, k, basis).norm_sqr())
            .sum();
        p.clamp(0.0, 1.0)
    }

    pub fn level_excitations(&self, n_levels: usize, basis: &OscillatorBasis) -> Vec<f64> {
        (0..n_levels)
            .map(|n| self.level_excitation(n, basis))
            .collect()
    }
}

/// Asymptotic excited-state population of the kicked level-n wavepacket.
pub fn level_excitation(
    n: usize,
    geometry: &FieldGeometry,
    basis: &OscillatorBasis,
    grid: &QuadratureGrid,
) -> Result<f64> {
    Ok(TransmissionTable::new(geometry, grid)?.level_excitation(n, basis))
}

/// Mean excitation over the `n_atoms` lowest levels, P_e = (1/N) Σ p_n.
pub fn total_excitation(
    geometry: &FieldGeometry,
    basis: &OscillatorBasis,
    n_atoms: usize,
    grid: &QuadratureGrid,
) -> Result<f64> {
    if n_atoms == 0 {
        return Err(invalid("N", "must be >= 1"));
    }
    let table = TransmissionTable::new(geometry, grid)?;
    Ok(mean(&table.level_excitations(n_atoms, basis)))
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Excited component of a transmitted level-n wavepacket,
/// φ_n^{(e)}(x, t) = (2π)^{-1/2} ∫dk e^{iqx − ik²t/2} T_ge(k) φ̃_n(k).
#[derive(Debug, Clone)]
pub struct ExcitedWavepacket {
    k: Vec<f64>,
    q: Vec<f64>,
    amplitude: Vec<Complex64>,
}

impl ExcitedWavepacket {
    pub fn new(n: usize, table: &TransmissionTable, basis: &OscillatorBasis) -> Self {
        let mut packet = Self {
            k: Vec::new(),
            q: Vec::new(),
            amplitude: Vec::new(),
        };
        for i in 0..table.grid.len() {
            if !table.open[i] {
                continue;
            }
            let k = table.grid.nodes[i];
            packet.k.push(k);
            packet.q.push(table.q[i]);
            packet
                .amplitude
                .push(table.grid.weights[i] * table.t_ge[i] * ho_momentum_amplitude(n, k, basis));
        }
        packet
    }

    pub fn evaluate(&self, x: f64, t: f64) -> Complex64 {
        let sum: Complex64 = self
            .k
            .iter()
            .zip(&self.q)
            .zip(&self.amplitude)
            .map(|((&k, &q), &a)| a * Complex64::from_polar(1.0, q * x - 0.5 * k * k * t))
            .sum();
        sum / (2.0 * PI).sqrt()
    }
}

pub fn excited_wavepacket(
    n: usize,
    x: f64,
    t: f64,
    geometry: &FieldGeometry,
    basis: &OscillatorBasis,
    grid: &QuadratureGrid,
) -> Result<Complex64> {
    let table = TransmissionTable::new(geometry, grid)?;
    Ok(ExcitedWavepacket::new(n, &table, basis).evaluate(x, t))
}

/// Heuristic time after which a level-n packet has left the field region:
/// (|x0| + 2l + L)/v0 + 10/(v0·σ_k) with σ_k = (2n+1)^{1/2}/(2δ0).
pub fn traversal_time(n: usize, geometry: &FieldGeometry, basis: &OscillatorBasis) -> f64 {
    let v0 = basis.k0 / basis.mass;
    let sigma_k = ((2 * n + 1) as f64).sqrt() / (2.0 * basis.delta0());
    (basis.x0.abs() + geometry.right_edge()) / v0 + 10.0 / (v0 * sigma_k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    Quantum,
    Semiclassical,
}

/// Excitation probabilities over an ordered detuning grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeScan {
    pub detunings: Vec<f64>,
    pub quantum: Option<Vec<f64>>,
    pub semiclassical: Vec<f64>,
    /// p_n^{(e)} for n = 0..N−1 at each detuning.
    pub per_level: Option<Vec<Vec<f64>>>,
}

impl FringeScan {
    pub fn column(&self, column: Column) -> Option<&[f64]> {
        match column {
            Column::Quantum => self.quantum.as_deref(),
            Column::Semiclassical => Some(&self.semiclassical),
        }
    }

    pub fn len(&self) -> usize {
        self.detunings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detunings.is_empty()
    }
}

fn check_grid(deltas: &[f64]) -> Result<()> {
    if deltas.is_empty() {
        return Err(invalid("delta_count", "detuning grid is empty"));
    }
    if deltas.iter().any(|d| !d.is_finite()) {
        return Err(invalid("delta", "detunings must be finite"));
    }
    if deltas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("delta", "detuning grid must be strictly increasing"));
    }
    Ok(())
}

/// Evenly spaced grid of `count` points on [min, max].
pub fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let h = (max - min) / (count - 1) as f64;
            (0..count).map(|i| min + h * i as f64).collect()
        }
    }
}

/// Semiclassical-only scan; also serves pulses separated in time, with
/// `tau` and `flight_time` read as pulse and dark durations.
pub fn semiclassical_scan(deltas: &[f64], rabi: f64, tau: f64, flight_time: f64) -> Result<FringeScan> {
    check_grid(deltas)?;
    Ok(FringeScan {
        detunings: deltas.to_vec(),
        quantum: None,
        semiclassical: deltas
            .iter()
            .map(|&d| semiclassical_fringe(d, rabi, tau, flight_time))
            .collect(),
        per_level: None,
    })
}

/// Quantum and semiclassical excitation over a detuning grid. Points are
/// evaluated in parallel on the current rayon pool and assembled in grid order.
pub fn fringe_scan(
    deltas: &[f64],
    template: &FieldGeometry,
    basis: &OscillatorBasis,
    n_atoms: usize,
    grid: &QuadratureGrid,
    keep_levels: bool,
) -> Result<FringeScan> {
    check_grid(deltas)?;
    let params = RamseyParams::new(template, basis, n_atoms)?;
    let levels: Vec<Vec<f64>> = deltas
        .par_iter()
        .map(|&d| {
            let table = TransmissionTable::new(&template.with_detuning(d), grid)?;
            Ok(table.level_excitations(n_atoms, basis))
        })
        .collect::<Result<_>>()?;
    Ok(FringeScan {
        detunings: deltas.to_vec(),
        quantum: Some(levels.iter().map(|p| mean(p)).collect()),
        semiclassical: deltas
            .iter()
            .map(|&d| semiclassical_fringe(d, template.rabi, params.tau, params.flight_time))
            .collect(),
        per_level: keep_levels.then_some(levels),
    })
}

/// ⟨S_Z⟩ = N(P_e − 1/2).
pub fn spin_z_mean(p: f64, n_atoms: usize) -> f64 {
    n_atoms as f64 * (p - 0.5)
}

/// ΔS_Z = [N P_e (1 − P_e)]^{1/2} for uncorrelated atoms.
pub fn spin_z_spread(p: f64, n_atoms: usize) -> f64 {
    (n_atoms as f64 * p * (1.0 - p)).max(0.0).sqrt()
}

/// Central-difference slope at grid point i (one-sided at the ends).
fn slope_at(x: &[f64], p: &[f64], i: usize) -> f64 {
    let n = x.len();
    let (a, b) = if i == 0 {
        (0, 1)
    } else if i == n - 1 {
        (n - 2, n - 1)
    } else {
        (i - 1, i + 1)
    };
    (p[b] - p[a]) / (x[b] - x[a])
}

/// P and dP/dδ at an arbitrary detuning inside the scan, by linear
/// interpolation between grid points.
fn value_and_slope(x: &[f64], p: &[f64], delta: f64) -> Result<(f64, f64)> {
    let n = x.len();
    if n < 2 {
        return Err(invalid("delta_count", "need at least 2 scan points for a derivative"));
    }
    if delta < x[0] || delta > x[n - 1] {
        return Err(Error::OutOfRange {
            delta,
            min: x[0],
            max: x[n - 1],
        });
    }
    let i = match x.partition_point(|&v| v <= delta) {
        0 => 0,
        j if j >= n => n - 2,
        j => j - 1,
    };
    let f = (delta - x[i]) / (x[i + 1] - x[i]);
    let value = p[i] + f * (p[i + 1] - p[i]);
    let slope = if f == 0.0 {
        slope_at(x, p, i)
    } else {
        (1.0 - f) * slope_at(x, p, i) + f * slope_at(x, p, i + 1)
    };
    Ok((value, slope))
}

/// Frequency-estimation ratio r = ΔS_Z / |∂⟨S_Z⟩/∂δ| at `delta`.
pub fn projection_noise_ratio(
    scan: &FringeScan,
    column: Column,
    delta: f64,
    n_atoms: usize,
) -> Result<f64> {
    if n_atoms == 0 {
        return Err(invalid("N", "must be >= 1"));
    }
    let p = scan
        .column(column)
        .ok_or_else(|| invalid("column", "scan has no quantum column"))?;
    let (value, slope) = value_and_slope(&scan.detunings, p, delta)?;
    let span = scan.detunings[scan.len() - 1] - scan.detunings[0];
    if !(slope.abs() * span > 1e-8) {
        return Err(Error::IllConditioned { delta, slope });
    }
    Ok(spin_z_spread(value, n_atoms) / (n_atoms as f64 * slope.abs()))
}

/// Index of the grid point nearest zero detuning, then uphill to the local maximum.
fn central_max(x: &[f64], p: &[f64]) -> usize {
    let mut i = (0..x.len())
        .min_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs()))
        .unwrap_or(0);
    loop {
        if i + 1 < p.len() && p[i + 1] > p[i] {
            i += 1;
        } else if i > 0 && p[i - 1] > p[i] {
            i -= 1;
        } else {
            return i;
        }
    }
}

/// Bracket [x_{j−1}, x_j] of the first half-height crossing right of the
/// central maximum, with the half-height level.
fn half_height_bracket(scan: &FringeScan, column: Column) -> Result<(usize, f64)> {
    let p = scan
        .column(column)
        .ok_or_else(|| invalid("column", "scan has no quantum column"))?;
    let x = &scan.detunings;
    let top = central_max(x, p);
    let half = 0.5 * p[top];
    if !(half > 0.0) {
        return Err(Error::NoCrossing);
    }
    (top + 1..p.len())
        .find(|&j| p[j] < half)
        .map(|j| (j, half))
        .ok_or(Error::NoCrossing)
}

/// Smallest detuning right of the central maximum where P falls to half the
/// central maximum, by linear interpolation on the scan.
pub fn half_height_point(scan: &FringeScan, column: Column) -> Result<f64> {
    let (j, half) = half_height_bracket(scan, column)?;
    let p = scan.column(column).expect("checked");
    let x = &scan.detunings;
    let f = (p[j - 1] - half) / (p[j - 1] - p[j]);
    Ok(x[j - 1] + f * (x[j] - x[j - 1]))
}

/// Half-height point refined by bisection on `eval` inside the scan bracket.
pub fn refine_half_height<F: Fn(f64) -> f64>(
    scan: &FringeScan,
    column: Column,
    eval: F,
) -> Result<f64> {
    let (j, half) = half_height_bracket(scan, column)?;
    let (mut lo, mut hi) = (scan.detunings[j - 1], scan.detunings[j]);
    let g = |d: f64| eval(d) - half;
    if g(lo) * g(hi) > 0.0 {
        return half_height_point(scan, column);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(lo) * g(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Lieb-Liniger parameter γ = m g_1D / (ħ² n).
pub fn ll_gamma(g1d: f64, density: f64, mass: f64, hbar: f64) -> Result<f64> {
    if !(density > 0.0) {
        return Err(invalid("density", format!("must be > 0, got {density}")));
    }
    Ok(mass * g1d / (hbar * hbar * density))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfn::build_k_grid;

    #[test]
    fn scl_peak_and_zero_coupling() {
        assert!((semiclassical_fringe(0.0, PI / 2.0, 1.0, 10.0) - 1.0).abs() < 1e-15);
        for &d in &[-3.0, 0.0, 0.2, 7.0] {
            assert_eq!(semiclassical_fringe(d, 0.0, 1.0, 10.0), 0.0);
        }
    }

    #[test]
    fn scl_frozen_value() {
        // 40-digit evaluation of the closed form
        let p = semiclassical_fringe(PI / 10.0, PI / 2.0, 1.0, 10.0);
        assert!((p - 0.039_318_533_675_366_03).abs() < 1e-15, "{p}");
    }

    #[test]
    fn scl_even_in_detuning() {
        for i in 0..100 {
            let d = 0.037 * i as f64;
            assert_eq!(
                semiclassical_fringe(d, 1.3, 0.8, 6.0),
                semiclassical_fringe(-d, 1.3, 0.8, 6.0)
            );
        }
    }

    #[test]
    fn ll_gamma_examples() {
        assert_eq!(ll_gamma(1.0, 1.0, 1.0, 1.0).unwrap(), 1.0);
        let a = ll_gamma(2.5, 3.0, 1.7, 1.0).unwrap();
        let b = ll_gamma(2.5, 6.0, 1.7, 1.0).unwrap();
        assert!((a / b - 2.0).abs() < 1e-15);
        assert!(ll_gamma(1.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn ll_gamma_si() {
        // Cs, g_1D = 1e-37 J m, n = 1e6 /m; frozen from a 40-digit evaluation
        let g = ll_gamma(1e-37, 1e6, crate::CS133_MASS, crate::HBAR).unwrap();
        let expect = 2.206_946_50e-25 * 1e-37 / (1.054_571_817e-34f64.powi(2) * 1e6);
        assert!((g / expect - 1.0).abs() < 1e-14);
        assert!((g - 1.984_446_905_267_936_4).abs() < 1e-12, "{g}");
    }

    #[test]
    fn spin_z_definitions() {
        assert_eq!(spin_z_mean(0.5, 7), 0.0);
        assert!((spin_z_spread(0.5, 4) - 1.0).abs() < 1e-15);
    }

    fn toy() -> (FieldGeometry, OscillatorBasis, QuadratureGrid) {
        let basis = OscillatorBasis::new(1.0, 0.5, -30.0, 60.0).unwrap();
        let l = 6.0;
        let tau = l / basis.k0;
        let geometry = FieldGeometry::new(l, 60.0, PI / 2.0 / tau, 0.0).unwrap();
        let grid = build_k_grid(&basis, 3, 512, 8.0).unwrap();
        (geometry, basis, grid)
    }

    #[test]
    fn no_coupling_no_excitation() {
        let (g, b, grid) = toy();
        let g = g.with_rabi(0.0);
        for n in 0..3 {
            assert!(level_excitation(n, &g, &b, &grid).unwrap() < 1e-20);
            assert!(excited_wavepacket(n, 200.0, 5.0, &g, &b, &grid).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn single_atom_average_is_ground_level() {
        let (g, b, grid) = toy();
        let g = g.with_detuning(0.3);
        let p0 = level_excitation(0, &g, &b, &grid).unwrap();
        assert_eq!(total_excitation(&g, &b, 1, &grid).unwrap(), p0);
    }

    #[test]
    fn invalid_grid_rejected() {
        let (g, b, _) = toy();
        let grid = QuadratureGrid::uniform(1.0, 5.0, 64).unwrap();
        assert!(level_excitation(0, &g, &b, &grid).is_err());
    }

    #[test]
    fn scan_rejects_unordered_grid() {
        let (g, b, grid) = toy();
        assert!(fringe_scan(&[0.1, 0.0], &g, &b, 1, &grid, false).is_err());
        assert!(semiclassical_scan(&[0.0, 0.0], 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn scan_single_point_at_resonance() {
        let scan = semiclassical_scan(&[0.0], PI / 2.0, 1.0, 10.0).unwrap();
        assert!((scan.semiclassical[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scan_symmetric_grid_is_even() {
        let d: Vec<f64> = (0..41).map(|i| (i as f64 - 20.0) * 0.05).collect();
        let scan = semiclassical_scan(&d, PI / 2.0, 1.0, 10.0).unwrap();
        for i in 0..41 {
            assert!((scan.semiclassical[i] - scan.semiclassical[40 - i]).abs() < 1e-15);
        }
    }

    #[test]
    fn half_height_of_ideal_fringe() {
        // long dark time relative to the pulses: cos²(ΔT/2) shape, half height at π/(2T)
        let (rabi, tau, t) = (PI / 2.0 * 1000.0, 1e-3, 10.0);
        let d = linspace(-PI / t, PI / t, 401);
        let scan = semiclassical_scan(&d, rabi, tau, t).unwrap();
        let h = refine_half_height(&scan, Column::Semiclassical, |x| {
            semiclassical_fringe(x, rabi, tau, t)
        })
        .unwrap();
        assert!((h / (PI / (2.0 * t)) - 1.0).abs() < 1e-3, "{h}");
    }

    #[test]
    fn half_height_full_formula_frozen() {
        // root of P(Δ) = P(0)/2 with Ωτ = π/2, τ = 1, T = 10 (Brent, 1e-15)
        let d = linspace(-PI / 10.0, PI / 10.0, 201);
        let scan = semiclassical_scan(&d, PI / 2.0, 1.0, 10.0).unwrap();
        let h = refine_half_height(&scan, Column::Semiclassical, |x| {
            semiclassical_fringe(x, PI / 2.0, 1.0, 10.0)
        })
        .unwrap();
        assert!((h - 0.139_344_178_694_303_93).abs() < 1e-12, "{h}");
        let coarse = half_height_point(&scan, Column::Semiclassical).unwrap();
        assert!((coarse - h).abs() < 1e-4);
    }

    #[test]
    fn half_height_requires_crossing() {
        let d = linspace(-0.01, 0.01, 11);
        let scan = semiclassical_scan(&d, PI / 2.0, 1.0, 10.0).unwrap();
        assert_eq!(
            half_height_point(&scan, Column::Semiclassical),
            Err(Error::NoCrossing)
        );
    }

    #[test]
    fn noise_ratio_scales_with_root_n() {
        let d = linspace(-PI / 10.0, PI / 10.0, 201);
        let scan = semiclassical_scan(&d, PI / 2.0, 1.0, 10.0).unwrap();
        let r1 = projection_noise_ratio(&scan, Column::Semiclassical, 0.1, 1).unwrap();
        let r4 = projection_noise_ratio(&scan, Column::Semiclassical, 0.1, 4).unwrap();
        assert!((r1 / r4 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn noise_ratio_flags_flat_points() {
        let d = linspace(-0.1, 0.1, 21);
        let scan = FringeScan {
            semiclassical: vec![0.3; 21],
            detunings: d,
            quantum: None,
            per_level: None,
        };
        assert!(matches!(
            projection_noise_ratio(&scan, Column::Semiclassical, 0.0, 1),
            Err(Error::IllConditioned { .. })
        ));
        assert!(matches!(
            projection_noise_ratio(&scan, Column::Semiclassical, 0.5, 1),
            Err(Error::OutOfRange { .. })
        ));
        assert!(projection_noise_ratio(&scan, Column::Quantum, 0.0, 1).is_err());
    }

    #[test]
    fn params_are_defining_ratios() {
        let (g, b, _) = toy();
        let p = RamseyParams::new(&g, &b, 10).unwrap();
        assert_eq!(p.tau, g.l / b.k0);
        assert_eq!(p.flight_time, g.gap / b.k0);
        assert_eq!(p.nmax(), 9);
        assert_eq!(RamseyParams::omega_prime(3.0, 4.0), 5.0);
    }
}
