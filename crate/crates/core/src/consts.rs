//! Physical constants (CODATA 2018, SI).

/// Vacuum permeability, T·m/A.
pub const MU0: f64 = 1.256_637_062_12e-6;

/// Electron gyromagnetic ratio magnitude, rad/(s·T).
pub const GAMMA_E: f64 = 1.760_859_630_23e11;

/// Elementary charge, C.
pub const E_CHARGE: f64 = 1.602_176_634e-19;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;

/// Bohr magneton, J/T.
pub const MU_B: f64 = 9.274_010_078_3e-24;
