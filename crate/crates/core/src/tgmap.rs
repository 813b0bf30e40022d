//! Generalized Tonks-Girardeau wavefunctions by Fermi-Bose mapping.
//!
//! Spinless and two-component (spinor) Slater determinants, the
//! antisymmetric unit function, internal-state operators for two particles
//! in the ordered basis {gg, ge, eg, ee}, and the exchange-collision plane
//! waves that encode the contact boundary conditions.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::specfn::{ho_position_amplitude, OscillatorBasis};

/// Largest particle number evaluated by direct determinant.
pub const MAX_PARTICLES: usize = 8;

/// Default one-sided offset for probing sector limits at contact.
pub const DEFAULT_CONTACT_EPS: f64 = 1e-8;

/// One-particle function evaluated on demand.
pub trait Orbital: Send + Sync {
    fn eval(&self, x: f64) -> Complex64;
}

impl<T: Orbital + ?Sized> Orbital for Arc<T> {
    fn eval(&self, x: f64) -> Complex64 {
        (**self).eval(x)
    }
}

impl<T: Orbital + ?Sized> Orbital for Box<T> {
    fn eval(&self, x: f64) -> Complex64 {
        (**self).eval(x)
    }
}

impl<T: Orbital + ?Sized> Orbital for &T {
    fn eval(&self, x: f64) -> Complex64 {
        (**self).eval(x)
    }
}

/// Wraps a closure as an [`Orbital`].
pub struct FnOrbital<F>(pub F);

impl<F: Fn(f64) -> Complex64 + Send + Sync> Orbital for FnOrbital<F> {
    fn eval(&self, x: f64) -> Complex64 {
        (self.0)(x)
    }
}

/// n-th eigenstate of the preparation trap (kicked and displaced by the basis).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicOrbital {
    pub n: usize,
    pub basis: OscillatorBasis,
}

impl Orbital for HarmonicOrbital {
    fn eval(&self, x: f64) -> Complex64 {
        ho_position_amplitude(self.n, x, &self.basis)
    }
}

/// The `count` lowest trap eigenstates.
pub fn harmonic_orbitals(basis: &OscillatorBasis, count: usize) -> Vec<HarmonicOrbital> {
    (0..count)
        .map(|n| HarmonicOrbital { n, basis: *basis })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Internal {
    Ground,
    Excited,
}

impl Internal {
    pub const ALL: [Internal; 2] = [Internal::Ground, Internal::Excited];

    pub fn index(self) -> usize {
        match self {
            Internal::Ground => 0,
            Internal::Excited => 1,
        }
    }
}

/// Φ_n(x) = φ_n^{(g)}(x)|g⟩ + φ_n^{(e)}(x)|e⟩; a missing component is identically zero.
#[derive(Clone)]
pub struct SpinorOrbital {
    pub label: usize,
    ground: Option<Arc<dyn Orbital>>,
    excited: Option<Arc<dyn Orbital>>,
}

impl std::fmt::Debug for SpinorOrbital {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpinorOrbital")
            .field("label", &self.label)
            .field("ground", &self.ground.is_some())
            .field("excited", &self.excited.is_some())
            .finish()
    }
}

impl SpinorOrbital {
    pub fn new(
        label: usize,
        ground: Option<Arc<dyn Orbital>>,
        excited: Option<Arc<dyn Orbital>>,
    ) -> Result<Self> {
        if ground.is_none() && excited.is_none() {
            return Err(invalid("spinor", "at least one component must be present"));
        }
        Ok(Self {
            label,
            ground,
            excited,
        })
    }

    /// Spinor with only a ground-state component.
    pub fn ground_only(label: usize, orbital: Arc<dyn Orbital>) -> Self {
        Self {
            label,
            ground: Some(orbital),
            excited: None,
        }
    }

    pub fn component(&self, b: Internal, x: f64) -> Complex64 {
        let c = match b {
            Internal::Ground => &self.ground,
            Internal::Excited => &self.excited,
        };
        c.as_ref().map_or(Complex64::new(0.0, 0.0), |o| o.eval(x))
    }
}

/// Positions x_j with internal labels b_j.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleConfiguration {
    pub positions: Vec<f64>,
    pub internal: Vec<Internal>,
}

impl ParticleConfiguration {
    pub fn new(positions: Vec<f64>, internal: Vec<Internal>) -> Result<Self> {
        if positions.len() != internal.len() {
            return Err(Error::SizeMismatch {
                what: "internal labels per position",
                expected: positions.len(),
                got: internal.len(),
            });
        }
        Ok(Self {
            positions,
            internal,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Simultaneous exchange (x_i, b_i) ↔ (x_j, b_j).
    pub fn swapped(&self, i: usize, j: usize) -> Self {
        let mut out = self.clone();
        out.positions.swap(i, j);
        out.internal.swap(i, j);
        out
    }
}

/// 𝒜 = Π_{j<k} sgn(x_k − x_j); zero when two positions coincide.
pub fn antisymmetric_unit(positions: &[f64]) -> i8 {
    let mut sign = 1i8;
    for (j, &xj) in positions.iter().enumerate() {
        for &xk in &positions[j + 1..] {
            if xk == xj {
                return 0;
            }
            if xk < xj {
                sign = -sign;
            }
        }
    }
    sign
}

/// det(A) by Gaussian elimination with partial pivoting; `a` is row-major n×n.
fn lu_determinant(mut a: Vec<Complex64>, n: usize) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r * n + col].norm().total_cmp(&a[s * n + col].norm()))
            .expect("non-empty");
        let p = a[pivot * n + col];
        if p.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            for c in 0..n {
                a.swap(pivot * n + c, col * n + c);
            }
            det = -det;
        }
        det *= p;
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f.norm() == 0.0 {
                continue;
            }
            for c in col + 1..n {
                let v = a[col * n + c];
                a[r * n + c] -= f * v;
            }
        }
    }
    det
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|j| j as f64).product()
}

fn check_count(orbitals: usize, particles: usize) -> Result<()> {
    if orbitals != particles {
        return Err(Error::SizeMismatch {
            what: "particles per orbital",
            expected: orbitals,
            got: particles,
        });
    }
    if particles > MAX_PARTICLES {
        return Err(invalid(
            "N",
            format!("direct determinants support at most {MAX_PARTICLES} particles"),
        ));
    }
    Ok(())
}

/// (1/√N!) det[entry(n, k)] for an N×N matrix of orbital n at particle k.
fn normalized_det<F: Fn(usize, usize) -> Complex64>(n: usize, entry: F) -> Complex64 {
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut a = Vec::with_capacity(n * n);
    for row in 0..n {
        for col in 0..n {
            a.push(entry(row, col));
        }
    }
    lu_determinant(a, n) / factorial(n).sqrt()
}

/// ψ_F(x_1..x_N) = (1/√N!) det φ_n(x_k).
pub fn slater_determinant<O: Orbital>(orbitals: &[O], positions: &[f64]) -> Result<Complex64> {
    check_count(orbitals.len(), positions.len())?;
    Ok(normalized_det(orbitals.len(), |n, k| {
        orbitals[n].eval(positions[k])
    }))
}

/// ψ_B = 𝒜 ψ_F.
pub fn map_fermi_to_bose(fermi_value: Complex64, positions: &[f64]) -> Complex64 {
    fermi_value * f64::from(antisymmetric_unit(positions))
}

/// Bosonic TG amplitude for spinless orbitals.
pub fn bose_amplitude<O: Orbital>(orbitals: &[O], positions: &[f64]) -> Result<Complex64> {
    Ok(map_fermi_to_bose(
        slater_determinant(orbitals, positions)?,
        positions,
    ))
}

/// ⟨x_1 b_1, …, x_N b_N|Ψ_F⟩ = (1/√N!) det[φ_n^{(b_k)}(x_k)].
pub fn spinor_slater(spinors: &[SpinorOrbital], config: &ParticleConfiguration) -> Result<Complex64> {
    check_count(spinors.len(), config.len())?;
    Ok(normalized_det(spinors.len(), |n, k| {
        spinors[n].component(config.internal[k], config.positions[k])
    }))
}

/// Ψ_B = 𝒜 Ψ_F for spinor orbitals.
pub fn spinor_bose_amplitude(
    spinors: &[SpinorOrbital],
    config: &ParticleConfiguration,
) -> Result<Complex64> {
    Ok(map_fermi_to_bose(
        spinor_slater(spinors, config)?,
        &config.positions,
    ))
}

/// One-sided limit of Ψ_B as particle `moving` approaches particle `fixed`,
/// from above (x_moving > x_fixed) or below. Estimated as 2f(ε) − f(2ε),
/// which removes the linear term of the approach.
pub fn contact_limit(
    spinors: &[SpinorOrbital],
    config: &ParticleConfiguration,
    moving: usize,
    fixed: usize,
    from_above: bool,
    eps: f64,
) -> Result<Complex64> {
    if moving >= config.len() || fixed >= config.len() || moving == fixed {
        return Err(invalid("particle", "need two distinct particle indices"));
    }
    if !(eps > 0.0) {
        return Err(invalid("contact_eps", format!("must be > 0, got {eps}")));
    }
    let sign = if from_above { 1.0 } else { -1.0 };
    let at = |offset: f64| {
        let mut c = config.clone();
        c.positions[moving] = c.positions[fixed] + sign * offset;
        spinor_bose_amplitude(spinors, &c)
    };
    Ok(2.0 * at(eps)? - at(2.0 * eps)?)
}

/// Single-particle density n(x) = Σ_n |φ_n(x)|².
pub fn density<O: Orbital>(orbitals: &[O], x: f64) -> f64 {
    orbitals.iter().map(|o| o.eval(x).norm_sqr()).sum()
}

/// Density summed over internal components, Σ_n Σ_b |φ_n^{(b)}(x)|².
pub fn spinor_density(spinors: &[SpinorOrbital], x: f64) -> f64 {
    spinors
        .iter()
        .flat_map(|s| Internal::ALL.map(|b| s.component(b, x).norm_sqr()))
        .sum()
}

/// Internal-state operator on one particle {g, e} or two particles {gg, ge, eg, ee}.
#[derive(Debug, Clone, PartialEq)]
pub struct InternalOperator(pub DMatrix<Complex64>);

impl InternalOperator {
    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self(&self.0 * c)
    }

    /// A ⊗ B with A acting on particle 1.
    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    pub fn apply(&self, state: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim())
            .map(|r| (0..self.dim()).map(|c| self.0[(r, c)] * state[c]).sum())
            .collect()
    }

    /// Largest entry modulus of self − other.
    pub fn max_distance(&self, other: &Self) -> f64 {
        (&self.0 - &other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Add for &InternalOperator {
    type Output = InternalOperator;
    fn add(self, rhs: Self) -> InternalOperator {
        InternalOperator(&self.0 + &rhs.0)
    }
}

impl Sub for &InternalOperator {
    type Output = InternalOperator;
    fn sub(self, rhs: Self) -> InternalOperator {
        InternalOperator(&self.0 - &rhs.0)
    }
}

impl Mul for &InternalOperator {
    type Output = InternalOperator;
    fn mul(self, rhs: Self) -> InternalOperator {
        InternalOperator(&self.0 * &rhs.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl std::str::FromStr for PauliAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(PauliAxis::X),
            "Y" | "y" => Ok(PauliAxis::Y),
            "Z" | "z" => Ok(PauliAxis::Z),
            other => Err(Error::UnknownOperator(other.to_string())),
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// One-particle Pauli operator in the basis {g, e}:
/// σ_X = |g⟩⟨e| + |e⟩⟨g|, σ_Y = i(|g⟩⟨e| − |e⟩⟨g|), σ_Z = |e⟩⟨e| − |g⟩⟨g|.
pub fn pauli_single(axis: PauliAxis) -> InternalOperator {
    let m = match axis {
        PauliAxis::X => [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        PauliAxis::Y => [c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0)],
        PauliAxis::Z => [c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
    };
    InternalOperator(DMatrix::from_row_slice(2, 2, &m))
}

/// Two-particle embedding of σ_axis acting on particle 1 or 2.
pub fn pauli(name: &str, particle: usize) -> Result<InternalOperator> {
    let sigma = pauli_single(name.parse()?);
    let id = InternalOperator::identity(2);
    match particle {
        1 => Ok(sigma.kron(&id)),
        2 => Ok(id.kron(&sigma)),
        _ => Err(invalid("particle", format!("must be 1 or 2, got {particle}"))),
    }
}

/// Ŝ_1·Ŝ_2 with Ŝ_j = σ_j/2.
pub fn spin_dot() -> InternalOperator {
    [PauliAxis::X, PauliAxis::Y, PauliAxis::Z]
        .iter()
        .map(|&a| pauli_single(a).kron(&pauli_single(a)))
        .fold(InternalOperator(DMatrix::zeros(4, 4)), |acc, op| &acc + &op)
        .scale(c(0.25, 0.0))
}

/// Two-particle basis index of |b_1 b_2⟩.
pub fn pair_index(b1: Internal, b2: Internal) -> usize {
    2 * b1.index() + b2.index()
}

fn ket(entries: &[(usize, f64)]) -> Vec<Complex64> {
    let mut v = vec![c(0.0, 0.0); 4];
    for &(i, a) in entries {
        v[i] = c(a, 0.0);
    }
    v
}

/// |−⟩ = (|eg⟩ − |ge⟩)/√2.
pub fn singlet_state() -> Vec<Complex64> {
    use Internal::*;
    ket(&[
        (pair_index(Excited, Ground), FRAC_1_SQRT_2),
        (pair_index(Ground, Excited), -FRAC_1_SQRT_2),
    ])
}

/// Triplet states |gg⟩, |+⟩ = (|eg⟩ + |ge⟩)/√2, |ee⟩.
pub fn triplet_states() -> [Vec<Complex64>; 3] {
    use Internal::*;
    [
        ket(&[(pair_index(Ground, Ground), 1.0)]),
        ket(&[
            (pair_index(Excited, Ground), FRAC_1_SQRT_2),
            (pair_index(Ground, Excited), FRAC_1_SQRT_2),
        ]),
        ket(&[(pair_index(Excited, Excited), 1.0)]),
    ]
}

fn outer(v: &[Complex64]) -> InternalOperator {
    InternalOperator(DMatrix::from_fn(v.len(), v.len(), |r, s| v[r] * v[s].conj()))
}

/// (P^s, P^t) built from outer products of the singlet and triplet states.
pub fn singlet_triplet_projectors() -> (InternalOperator, InternalOperator) {
    let ps = outer(&singlet_state());
    let pt = triplet_states()
        .iter()
        .map(|v| outer(v))
        .fold(InternalOperator(DMatrix::zeros(4, 4)), |acc, op| &acc + &op);
    (ps, pt)
}

/// (P^s, P^t) from spin algebra: 1/4 − Ŝ_1·Ŝ_2 and 3/4 + Ŝ_1·Ŝ_2.
pub fn singlet_triplet_from_spin() -> (InternalOperator, InternalOperator) {
    let sd = spin_dot();
    let id = InternalOperator::identity(4);
    (
        &id.scale(c(0.25, 0.0)) - &sd,
        &id.scale(c(0.75, 0.0)) + &sd,
    )
}

/// Unitary whose columns are |gg⟩, |+⟩, |ee⟩, |−⟩.
pub fn singlet_triplet_basis() -> InternalOperator {
    let [gg, plus, ee] = triplet_states();
    let cols = [gg, plus, ee, singlet_state()];
    InternalOperator(DMatrix::from_fn(4, 4, |r, s| cols[s][r]))
}

/// Internal part of the contact interaction, v_s P^s + v_t P^t.
pub fn contact_interaction(v_singlet: f64, v_triplet: f64) -> InternalOperator {
    let (ps, pt) = singlet_triplet_projectors();
    &ps.scale(c(v_singlet, 0.0)) + &pt.scale(c(v_triplet, 0.0))
}

/// Exchange collision of plane waves in the sector x1 < x2:
/// e^{ikx1}e^{ik′x2}|bb′⟩ − e^{ik′x1}e^{ikx2}|b′b⟩, over {gg, ge, eg, ee}.
pub fn collision_plane_wave(
    k: f64,
    k_prime: f64,
    b: Internal,
    b_prime: Internal,
    x1: f64,
    x2: f64,
) -> Result<[Complex64; 4]> {
    if !(x1 < x2) {
        return Err(Error::SectorViolation { x1, x2 });
    }
    let mut amp = [c(0.0, 0.0); 4];
    amp[pair_index(b, b_prime)] += Complex64::from_polar(1.0, k * x1 + k_prime * x2);
    amp[pair_index(b_prime, b)] -= Complex64::from_polar(1.0, k_prime * x1 + k * x2);
    Ok(amp)
}
