//! Physical constants (CODATA 2018, exact where SI defines them).

/// Reduced Planck constant [J·s].
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant [J/K].
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in vacuum [m/s].
pub const C_LIGHT: f64 = 299_792_458.0;
/// Atomic mass unit [kg].
pub const AMU: f64 = 1.660_539_066_60e-27;
/// One microgal [m/s²].
pub const MICRO_GAL: f64 = 1e-8;
/// Standard gravity used by the default parameter blocks [m/s²].
pub const STANDARD_GRAVITY: f64 = 9.8;
