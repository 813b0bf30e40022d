//! Scenario implementations. Each writes a CSV (or a text report) to the
//! given sink and returns summary lines for stderr.

use std::io::Write;
use std::sync::Arc;

use ramsey_tg::ramsey::{
    fringe_scan, half_height_point, linspace, projection_noise_ratio, semiclassical_scan, Column,
    RamseyParams,
};
use ramsey_tg::scatter::{limit_well_depth, wall_well_reflection};
use ramsey_tg::specfn::{build_k_grid, OscillatorBasis};
use ramsey_tg::tgmap::{
    collision_plane_wave, contact_limit, density, harmonic_orbitals, singlet_triplet_from_spin,
    singlet_triplet_projectors, spinor_bose_amplitude, spinor_slater, HarmonicOrbital,
    Internal, InternalOperator, ParticleConfiguration, SpinorOrbital,
};
use ramsey_tg::{Error, InternalSetup};

use crate::config::{RunConfig, Scenario};
use crate::error::CliError;

/// Outcome of a scenario run.
#[derive(Debug, Clone, Default)]
pub struct Report {
    /// False when a self-check failed; the binary then exits nonzero.
    pub passed: bool,
    pub summary: Vec<String>,
}

impl Report {
    fn ok(summary: Vec<String>) -> Self {
        Self {
            passed: true,
            summary,
        }
    }
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn row(out: &mut dyn Write, cells: &[f64]) -> std::io::Result<()> {
    let line: Vec<String> = cells.iter().map(|&c| num(c)).collect();
    out.write_all(line.join(",").as_bytes())?;
    out.write_all(b"\n")
}

fn header(out: &mut dyn Write, names: &[String]) -> std::io::Result<()> {
    out.write_all(names.join(",").as_bytes())?;
    out.write_all(b"\n")
}

fn setup(cfg: &RunConfig) -> Result<InternalSetup, CliError> {
    let setup = cfg.physics.to_internal()?;
    setup.basis.check_separation(setup.n_atoms, cfg.x0_guard);
    Ok(setup)
}

pub fn run_scenario(
    cfg: &RunConfig,
    scenario: Scenario,
    out: &mut dyn Write,
) -> Result<Report, CliError> {
    let report = match scenario {
        Scenario::Fringe => fringe(cfg, out)?,
        Scenario::TimeDomain => time_domain(cfg, out)?,
        Scenario::Noise => noise(cfg, out)?,
        Scenario::TgDensity => tg_density(cfg, out)?,
        Scenario::Collision => collision(cfg, out)?,
        Scenario::WellLimit => well_limit(cfg, out)?,
    };
    out.flush()?;
    Ok(report)
}

fn fringe(cfg: &RunConfig, out: &mut dyn Write) -> Result<Report, CliError> {
    let s = setup(cfg)?;
    let params = RamseyParams::new(&s.geometry, &s.basis, s.n_atoms)?;
    let grid = build_k_grid(&s.basis, params.nmax(), cfg.nodes, cfg.width_mult)?;
    let deltas_si = linspace(cfg.delta_min, cfg.delta_max, cfg.delta_count);
    let deltas: Vec<f64> = deltas_si
        .iter()
        .map(|&d| s.units.frequency_to_internal(d))
        .collect();
    let scan = fringe_scan(&deltas, &s.geometry, &s.basis, s.n_atoms, &grid, cfg.per_level)?;

    let mut names = vec![
        "delta_rad_per_s".to_string(),
        "P_quantum".to_string(),
        "P_semiclassical".to_string(),
    ];
    if cfg.per_level {
        names.extend((0..s.n_atoms).map(|n| format!("p_{n}")));
    }
    header(out, &names)?;
    let quantum = scan.column(Column::Quantum).expect("quantum scan");
    let mut worst = 0.0f64;
    for (i, &d) in deltas_si.iter().enumerate() {
        let mut cells = vec![d, quantum[i], scan.semiclassical[i]];
        if let Some(levels) = &scan.per_level {
            cells.extend_from_slice(&levels[i]);
        }
        worst = worst.max((quantum[i] - scan.semiclassical[i]).abs());
        row(out, &cells)?;
    }
    Ok(Report::ok(vec![format!(
        "fringe: {} points, max |P_quantum - P_semiclassical| = {worst:.3e}",
        deltas.len()
    )]))
}

fn time_domain(cfg: &RunConfig, out: &mut dyn Write) -> Result<Report, CliError> {
    let deltas = linspace(cfg.delta_min, cfg.delta_max, cfg.delta_count);
    let scan = semiclassical_scan(&deltas, cfg.physics.rabi, cfg.tau, cfg.dark_time)?;
    header(out, &["delta_rad_per_s".into(), "P_semiclassical".into()])?;
    for (d, p) in deltas.iter().zip(&scan.semiclassical) {
        row(out, &[*d, *p])?;
    }
    Ok(Report::ok(vec![format!(
        "timedomain: {} points, pulse {:.6e} s, dark {:.6e} s",
        deltas.len(),
        cfg.tau,
        cfg.dark_time
    )]))
}

fn noise(cfg: &RunConfig, out: &mut dyn Write) -> Result<Report, CliError> {
    let s = setup(cfg)?;
    let params = RamseyParams::new(&s.geometry, &s.basis, s.n_atoms)?;
    let grid = build_k_grid(&s.basis, params.nmax(), cfg.nodes, cfg.width_mult)?;
    let steps = ((cfg.delta_max - cfg.delta_min) / cfg.noise_step).floor() as usize;
    if steps < 1 {
        return Err(CliError::OutOfRange {
            key: "noise_step",
            value: num(cfg.noise_step),
            expected: "a step no larger than delta_max - delta_min",
        });
    }
    let deltas_si: Vec<f64> = (0..=steps)
        .map(|i| cfg.delta_min + cfg.noise_step * i as f64)
        .collect();
    let deltas: Vec<f64> = deltas_si
        .iter()
        .map(|&d| s.units.frequency_to_internal(d))
        .collect();
    let scan = fringe_scan(&deltas, &s.geometry, &s.basis, s.n_atoms, &grid, false)?;
    let n = s.n_atoms;
    let limit = 1.0 / (params.flight_time * (n as f64).sqrt());
    let limit_si = s.units.frequency_to_si(limit);

    let ratio = |d: f64| match projection_noise_ratio(&scan, Column::Quantum, d, n) {
        Ok(r) => Ok(s.units.frequency_to_si(r)),
        Err(Error::IllConditioned { .. }) => Ok(f64::NAN),
        Err(e) => Err(e),
    };
    header(
        out,
        &["delta_rad_per_s".into(), "r_rad_per_s".into(), "r_limit_rad_per_s".into()],
    )?;
    for (&d_si, &d) in deltas_si.iter().zip(&deltas) {
        row(out, &[d_si, ratio(d)?, limit_si])?;
    }

    let mut summary = Vec::new();
    match half_height_point(&scan, Column::Quantum) {
        Ok(half) => {
            let r = ratio(half)?;
            summary.push(format!(
                "noise: half height at {:.10e} rad/s, r = {:.6e} rad/s, 1/(T sqrt(N)) = {:.6e} rad/s, r/limit = {:.6}",
                s.units.frequency_to_si(half),
                r,
                limit_si,
                r / limit_si
            ));
        }
        Err(Error::NoCrossing) => {
            summary.push("noise: no half-height crossing inside the scan".to_string())
        }
        Err(e) => return Err(e.into()),
    }
    Ok(Report::ok(summary))
}

fn tg_density(cfg: &RunConfig, out: &mut dyn Write) -> Result<Report, CliError> {
    let s = setup(cfg)?;
    let orbitals = harmonic_orbitals(&s.basis, s.n_atoms);
    let xs = linspace(
        cfg.physics.x0 - cfg.density_halfwidth,
        cfg.physics.x0 + cfg.density_halfwidth,
        cfg.density_points,
    );
    header(out, &["x_m".into(), "density_per_m".into()])?;
    let mut integral = 0.0;
    let h = xs[1] - xs[0];
    for (i, &x) in xs.iter().enumerate() {
        let n_si = density(&orbitals, s.units.length_to_internal(x)) / s.units.length;
        let w = if i == 0 || i + 1 == xs.len() { 0.5 } else { 1.0 };
        integral += w * h * n_si;
        row(out, &[x, n_si])?;
    }
    Ok(Report::ok(vec![format!(
        "tg-density: {} atoms, integral over window = {integral:.6}",
        s.n_atoms
    )]))
}

fn well_limit(cfg: &RunConfig, out: &mut dyn Write) -> Result<Report, CliError> {
    // ħ = m = 1, E = 1/2: widths are in units of ħ/(2mE)^{1/2} = 1
    let energy = 0.5;
    header(out, &["L_w".into(), "abs_R_minus_1".into()])?;
    let mut dists = Vec::with_capacity(cfg.well_steps);
    for p in 1..=cfg.well_steps {
        let width = 10f64.powi(-(p as i32));
        let r = wall_well_reflection(limit_well_depth(width), width, energy)?;
        let d = (r - 1.0).norm();
        dists.push(d);
        row(out, &[width, d])?;
    }
    let decreasing = dists.windows(2).all(|w| w[1] < w[0]);
    Ok(Report {
        passed: decreasing,
        summary: vec![format!(
            "wellimit: |R-1| decreasing with width: {decreasing}; narrowest {:.3e}",
            dists[dists.len() - 1]
        )],
    })
}

fn spinors(basis: &OscillatorBasis, count: usize) -> Result<Vec<SpinorOrbital>, CliError> {
    let kicked = OscillatorBasis::new(basis.mass, basis.omega, 0.2, 0.9)?;
    let trap = OscillatorBasis::new(basis.mass, basis.omega, 0.0, 0.0)?;
    (0..count)
        .map(|n| {
            SpinorOrbital::new(
                n,
                Some(Arc::new(HarmonicOrbital { n, basis: trap })),
                Some(Arc::new(HarmonicOrbital { n: n + 2, basis: kicked })),
            )
            .map_err(CliError::from)
        })
        .collect()
}

/// Deterministic self-checks of the Fermi-Bose mapping and the internal-state
/// algebra, written as one PASS/FAIL line each.
fn collision(cfg: &RunConfig, out: &mut dyn Write) -> Result<Report, CliError> {
    let s = setup(cfg)?;
    let eps = cfg.contact_eps;
    let mut checks: Vec<(String, bool, String)> = Vec::new();

    let configs: Vec<Vec<f64>> = vec![
        vec![-1.3, 0.4],
        vec![0.7, -0.2],
        vec![-2.1, 0.3, 1.1],
        vec![1.5, -0.6, 0.2],
    ];
    let states = [Internal::Ground, Internal::Excited];
    let mut worst_sym = 0.0f64;
    let mut worst_anti = 0.0f64;
    let mut worst_contact = 0.0f64;
    let mut min_jump = f64::INFINITY;
    let mut worst_jump_sign = 0.0f64;
    for positions in &configs {
        let n = positions.len();
        let set = spinors(&s.basis, n)?;
        for mask in 0..(1usize << n) {
            let internal: Vec<Internal> = (0..n).map(|i| states[(mask >> i) & 1]).collect();
            let c = ParticleConfiguration::new(positions.clone(), internal)?;
            let bose = spinor_bose_amplitude(&set, &c)?;
            let fermi = spinor_slater(&set, &c)?;
            for i in 0..n {
                for j in i + 1..n {
                    let sw = c.swapped(i, j);
                    worst_sym = worst_sym.max((spinor_bose_amplitude(&set, &sw)? - bose).norm());
                    worst_anti = worst_anti.max((spinor_slater(&set, &sw)? + fermi).norm());
                }
            }
            let above = contact_limit(&set, &c, 1, 0, true, eps)?;
            let below = contact_limit(&set, &c, 1, 0, false, eps)?;
            if c.internal[0] == c.internal[1] {
                worst_contact = worst_contact.max(above.norm()).max(below.norm());
            } else {
                min_jump = min_jump.min((above - below).norm());
                worst_jump_sign = worst_jump_sign.max((above + below).norm());
            }
        }
    }
    let tol = 1e-10;
    checks.push((
        "bose_exchange_symmetry".into(),
        worst_sym < tol,
        format!("max |Psi_B(swap) - Psi_B| = {worst_sym:.3e} (tol {tol:.0e})"),
    ));
    checks.push((
        "fermi_exchange_antisymmetry".into(),
        worst_anti < tol,
        format!("max |Psi_F(swap) + Psi_F| = {worst_anti:.3e} (tol {tol:.0e})"),
    ));
    checks.push((
        "equal_label_contact_vanishes".into(),
        worst_contact < tol,
        format!("max one-sided contact limit = {worst_contact:.3e} (tol {tol:.0e})"),
    ));
    checks.push((
        "unequal_label_contact_jumps".into(),
        min_jump > 1e-6 && worst_jump_sign < 1e-6,
        format!("min jump = {min_jump:.3e} (> 1e-6), max |above + below| = {worst_jump_sign:.3e} (< 1e-6)"),
    ));

    // plane waves: equal internal states vanish at contact, unequal ones do not
    let (k, kp, x1) = (1.3, -0.4, 0.25);
    let same = collision_plane_wave(k, kp, Internal::Ground, Internal::Ground, x1, x1 + eps)?;
    let same_norm = same.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let diff = collision_plane_wave(k, kp, Internal::Ground, Internal::Excited, x1, x1 + eps)?;
    let diff_norm = diff.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    checks.push((
        "plane_wave_contact".into(),
        same_norm < 1e-6 && (diff_norm - 2f64.sqrt()).abs() < 1e-6,
        format!("|same| = {same_norm:.3e}, |different| = {diff_norm:.6}"),
    ));

    let (ps, pt) = singlet_triplet_projectors();
    let (ps_spin, pt_spin) = singlet_triplet_from_spin();
    let id = InternalOperator::identity(4);
    let proj = [
        (&ps + &pt).max_distance(&id),
        (&ps * &ps).max_distance(&ps),
        (&pt * &pt).max_distance(&pt),
        (&ps * &pt).max_distance(&id.scale(0.0.into())),
        ps.max_distance(&ps_spin),
        pt.max_distance(&pt_spin),
        (ps.trace().re - 1.0).abs() + ps.trace().im.abs(),
        (pt.trace().re - 3.0).abs() + pt.trace().im.abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    checks.push((
        "singlet_triplet_projectors".into(),
        proj < 1e-14,
        format!("max identity deviation = {proj:.3e} (tol 1e-14)"),
    ));

    let passed = checks.iter().all(|c| c.1);
    for (name, ok, detail) in &checks {
        writeln!(out, "{} {name}: {detail}", if *ok { "PASS" } else { "FAIL" })?;
    }
    let failed = checks.iter().filter(|c| !c.1).count();
    Ok(Report {
        passed,
        summary: vec![format!(
            "collision: {} checks, {failed} failed",
            checks.len()
        )],
    })
}
