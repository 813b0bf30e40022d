//! SI parameter set and its mapping onto the internal unit system.
//!
//! Every solver in this crate works with ħ = m = 1 and lengths measured in
//! the ground-state width δ0 = [ħ/(2mω)]^{1/2} of the preparation trap.
//! Conversion happens once, here.

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::scatter::FieldGeometry;
use crate::specfn::OscillatorBasis;

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Mass of a caesium-133 atom (kg).
pub const CS133_MASS: f64 = 2.206_946_50e-25;

/// Width δ_N at N = 10 used to pick the default trap frequency (m).
pub const DEFAULT_DELTA_N: f64 = 50e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    /// SI value of ħ used for the conversion.
    pub hbar: f64,
    /// SI mass (kg); the internal mass unit.
    pub mass: f64,
    /// SI length of one internal length unit (m).
    pub length: f64,
}

impl UnitSystem {
    /// Units anchored on the ground-state width of a trap of angular frequency `omega`.
    pub fn for_trap(mass: f64, omega: f64) -> Self {
        let length = (HBAR / (2.0 * mass * omega)).sqrt();
        Self {
            hbar: HBAR,
            mass,
            length,
        }
    }

    /// SI duration of one internal time unit (s).
    pub fn time(&self) -> f64 {
        self.mass * self.length * self.length / self.hbar
    }

    pub fn length_to_internal(&self, x: f64) -> f64 {
        x / self.length
    }

    pub fn length_to_si(&self, x: f64) -> f64 {
        x * self.length
    }

    pub fn wavenumber_to_internal(&self, k: f64) -> f64 {
        k * self.length
    }

    pub fn time_to_internal(&self, t: f64) -> f64 {
        t / self.time()
    }

    pub fn time_to_si(&self, t: f64) -> f64 {
        t * self.time()
    }

    /// Angular frequency (rad/s) to internal units.
    pub fn frequency_to_internal(&self, w: f64) -> f64 {
        w * self.time()
    }

    pub fn frequency_to_si(&self, w: f64) -> f64 {
        w / self.time()
    }

    pub fn speed_to_internal(&self, v: f64) -> f64 {
        v * self.time() / self.length
    }
}

/// Physical parameters in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicsConfig {
    /// Atomic mass (kg).
    pub mass: f64,
    /// Angular frequency of the preparation trap (rad/s).
    pub trap_omega: f64,
    /// Trap centre (m); must sit left of the first field.
    pub x0: f64,
    /// Launch speed v0 = ħk0/m (m/s).
    pub v0: f64,
    /// Length l of each field region (m).
    pub l: f64,
    /// Free-flight separation L between the fields (m).
    pub gap: f64,
    /// Rabi frequency Ω inside the fields (rad/s).
    pub rabi: f64,
    /// Detuning δ (rad/s).
    pub detuning: f64,
    /// Number of atoms N.
    pub n_atoms: usize,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        let n_atoms = 10;
        let v0 = 0.01;
        let l = 0.01;
        let mass = CS133_MASS;
        Self {
            mass,
            trap_omega: trap_omega_for_width(mass, n_atoms, DEFAULT_DELTA_N),
            x0: -1e-3,
            v0,
            l,
            gap: 0.1,
            rabi: PI / 2.0 * v0 / l,
            detuning: 0.0,
            n_atoms,
        }
    }
}

/// Trap frequency for which δ_N = [(N+1/2)ħ/(mω)]^{1/2} equals `width`.
pub fn trap_omega_for_width(mass: f64, n_atoms: usize, width: f64) -> f64 {
    (n_atoms as f64 + 0.5) * HBAR / (mass * width * width)
}

impl PhysicsConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mass", self.mass),
            ("omega", self.trap_omega),
            ("v0", self.v0),
            ("l", self.l),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(invalid(name, format!("must be > 0, got {value}")));
            }
        }
        if !(self.gap >= 0.0 && self.gap.is_finite()) {
            return Err(invalid("L", format!("must be >= 0, got {}", self.gap)));
        }
        if !(self.rabi >= 0.0 && self.rabi.is_finite()) {
            return Err(invalid("rabi", format!("must be >= 0, got {}", self.rabi)));
        }
        if !self.detuning.is_finite() {
            return Err(invalid("detuning", "must be finite"));
        }
        if !self.x0.is_finite() || self.x0 >= 0.0 {
            return Err(invalid(
                "x0",
                format!("trap centre must lie left of the first field (x0 < 0), got {}", self.x0),
            ));
        }
        if self.n_atoms == 0 {
            return Err(invalid("N", "must be >= 1"));
        }
        Ok(())
    }

    pub fn units(&self) -> UnitSystem {
        UnitSystem::for_trap(self.mass, self.trap_omega)
    }

    /// τ = l/v0 (s).
    pub fn tau(&self) -> f64 {
        self.l / self.v0
    }

    /// T = L/v0 (s).
    pub fn flight_time(&self) -> f64 {
        self.gap / self.v0
    }

    /// Kick wavenumber k0 = m v0/ħ (1/m).
    pub fn k0(&self) -> f64 {
        self.mass * self.v0 / HBAR
    }

    /// Converts to internal units: oscillator basis and field geometry.
    pub fn to_internal(&self) -> Result<InternalSetup> {
        self.validate()?;
        let units = self.units();
        let basis = OscillatorBasis::new(
            1.0,
            units.frequency_to_internal(self.trap_omega),
            units.length_to_internal(self.x0),
            units.wavenumber_to_internal(self.k0()),
        )?;
        let geometry = FieldGeometry::new(
            units.length_to_internal(self.l),
            units.length_to_internal(self.gap),
            units.frequency_to_internal(self.rabi),
            units.frequency_to_internal(self.detuning),
        )?;
        Ok(InternalSetup {
            units,
            basis,
            geometry,
            n_atoms: self.n_atoms,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InternalSetup {
    pub units: UnitSystem,
    pub basis: OscillatorBasis,
    pub geometry: FieldGeometry,
    pub n_atoms: usize,
}
