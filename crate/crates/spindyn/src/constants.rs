//! Pinned physical constants and unit conversions.
//!
//! The internal unit system is: energies in cm⁻¹, times in μs, magnetic
//! fields in mT, angular frequencies in rad/μs, temperatures in K. The
//! anchor constants are pinned to the exact values used when validating
//! the simulator, so published reference numbers reproduce bit-stably:
//!
//! * speed of light `c` = 29 979 245 800 cm/s,
//! * `h·c` = 1.9864459e-23 J·cm,
//! * Bohr magneton over Planck constant `μ_B/h` = 13.996245 GHz/T,
//! * Boltzmann constant `k_B` = 1.380649e-23 J/K (SI exact),
//! * atomic mass unit = 1.66053906660e-27 kg (CODATA 2018).
//!
//! Everything else below is derived from these five numbers.

/// Speed of light in cm/s.
pub const C_CM_PER_S: f64 = 29_979_245_800.0;

/// Planck constant times speed of light, J·cm.
pub const HC_J_CM: f64 = 1.986_445_9e-23;

/// Planck constant, J·s (= `HC_J_CM` / `C_CM_PER_S`).
pub const H_J_S: f64 = HC_J_CM / C_CM_PER_S;

/// Reduced Planck constant, J·s.
pub const HBAR_J_S: f64 = H_J_S / (2.0 * core::f64::consts::PI);

/// Boltzmann constant, J/K.
pub const KB_J_PER_K: f64 = 1.380_649e-23;

/// Bohr magneton over Planck constant, GHz/T (equivalently MHz/mT).
pub const MUB_GHZ_PER_T: f64 = 13.996_245;

/// Bohr magneton, J/T (= `MUB_GHZ_PER_T`·1e9 · `H_J_S`).
pub const MUB_J_PER_T: f64 = MUB_GHZ_PER_T * 1e9 * H_J_S;

/// Atomic mass unit (c.a.m.u.), kg.
pub const AMU_KG: f64 = 1.660_539_066_60e-27;

/// Conversion cm⁻¹ → GHz (linear frequency): ν[GHz] = `CM1_TO_GHZ`·ν̃[cm⁻¹].
pub const CM1_TO_GHZ: f64 = C_CM_PER_S * 1e-9;

/// Conversion cm⁻¹ → rad/μs (angular frequency): ω = 2πc·ν̃ scaled to μs.
pub const CM1_TO_RAD_PER_US: f64 = 2.0 * core::f64::consts::PI * C_CM_PER_S * 1e-6;

/// Conversion GHz (linear) → rad/μs (angular).
pub const GHZ_TO_RAD_PER_US: f64 = 2.0 * core::f64::consts::PI * 1e3;

/// Thermal scale: hc/k_B in K per cm⁻¹ (≈ 1.4387769).
pub const CM1_TO_K: f64 = HC_J_CM / KB_J_PER_K;

/// Zeeman scale: μ_B/(hc) in cm⁻¹ per mT (≈ 4.6686448e-4); multiply by the
/// g-factor and the field component in mT to get the Zeeman energy in cm⁻¹.
pub const ZEEMAN_CM1_PER_MT: f64 = MUB_GHZ_PER_T * 1e9 / C_CM_PER_S * 1e-3;

/// Drive-coupling scale: (μ_B/ħ) expressed as rad/μs per (mT·g-factor); the
/// complex Rabi frequency is `RABI_RAD_US_PER_MT`·g_I·Σ_γ B1_γ[mT]·N_γ.
pub const RABI_RAD_US_PER_MT: f64 = 2.0 * core::f64::consts::PI * MUB_GHZ_PER_T;

/// Conversion MHz → cm⁻¹ (used for hyperfine constants given in MHz).
pub const MHZ_TO_CM1: f64 = 1e6 / C_CM_PER_S;

/// Fermi-golden-rule prefactor for phonon rates, in μs⁻¹ per (cm⁻¹)²·cm:
/// `K = 1e-6 · 2π (hc)² / (ħ² c)`. A transition amplitude `A` assembled in
/// cm⁻¹ (zero-point lengths in metres already folded in) together with the
/// Gaussian line shape `G` (argument in cm⁻¹, value in cm) yields
/// Γ[μs⁻¹] = `GOLDEN_RULE_US` · |A|² · G.
pub const GOLDEN_RULE_US: f64 =
    1e-6 * 2.0 * core::f64::consts::PI * HC_J_CM * HC_J_CM / (HBAR_J_S * HBAR_J_S * C_CM_PER_S);

/// Zero-point displacement squared ħ/(2mω) in m² for a mode of reduced mass
/// `mass_amu` (c.a.m.u.) and harmonic frequency `nu_cm` (cm⁻¹).
pub fn zero_point_m2(mass_amu: f64, nu_cm: f64) -> f64 {
    let omega = 2.0 * core::f64::consts::PI * C_CM_PER_S * nu_cm; // rad/s
    HBAR_J_S / (2.0 * mass_amu * AMU_KG * omega)
}
