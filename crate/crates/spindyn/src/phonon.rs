//! Vibration-bath relaxation rates: one-phonon and two-phonon absorption /
//! emission with Gaussian spectral broadening and Bose–Einstein occupation,
//! plus the semi-empirical additive rates and the detailed-balance option.
//!
//! # Units and conventions
//!
//! Mode frequencies, widths and all energies are linear frequencies in cm⁻¹;
//! rates come out in μs⁻¹. Coupling matrix elements are ingested as data
//! (first derivatives per mode, second derivatives per mode pair, and
//! real-process intermediate-state products), expressed in cm⁻¹ per unit
//! normal-coordinate displacement; the zero-point displacement ħ/(2m_iω_i)
//! is evaluated in SI and folded into the transition amplitude, with the
//! single golden-rule conversion constant
//! [`crate::constants::GOLDEN_RULE_US`] unit-tested in isolation.
//!
//! Emission-side processes use the factor-wise complex conjugates of the
//! stored absorption-side elements (conjugation is applied to each stored
//! element before the intermediate-state sum, matching the structure of the
//! underlying second-order matrix elements).

use num_complex::Complex;

use crate::constants::{zero_point_m2, CM1_TO_K, GOLDEN_RULE_US};
use crate::error::RateError;
use crate::scalar::Real;
use crate::spin::QubitFrame;

/// Complex scalar shorthand.
pub type C<R> = Complex<R>;

/// Energy-denominator floor (cm⁻¹) below which a real-process term is
/// dropped (second-order perturbation theory is invalid at exact resonance);
/// dropped terms are counted in the diagnostics of [`TwoPhononRates`].
pub const DENOMINATOR_FLOOR_CM1: f64 = 1e-9;

/// A harmonic vibration normal mode.
#[derive(Debug, Clone, Copy)]
pub struct VibrationMode<R: Real> {
    /// Harmonic linear frequency ν_i, cm⁻¹ (> 0).
    pub nu: R,
    /// Reduced mass μ_i, chemical atomic mass units (> 0).
    pub mass: R,
    /// Gaussian half-width σ_i, cm⁻¹ (> 0).
    pub sigma: R,
}

impl<R: Real> VibrationMode<R> {
    /// Validates positivity of all three fields.
    pub fn new(nu: R, mass: R, sigma: R) -> Result<Self, RateError> {
        if nu <= R::zero() || mass <= R::zero() || sigma <= R::zero() {
            return Err(RateError::Parameter(format!(
                "mode parameters must be positive (nu={}, mass={}, sigma={})",
                nu.as_f64(),
                mass.as_f64(),
                sigma.as_f64()
            )));
        }
        Ok(Self { nu, mass, sigma })
    }
}

/// Spin–phonon coupling matrix elements for one qubit frame and one static
/// field direction.
///
/// * `first_order[i]`: M1_i = ⟨u+|∂Ĥ/∂q_i|u−⟩ per mode.
/// * `virt[i][i′−i]` (i′ ≥ i): symmetric second-derivative element per
///   unordered pair; mirrored on access.
/// * `direct/stokes/spont[i][c_idx][i′]`: real-process numerator for the
///   ordered pair (i, i′) through intermediate state `c` — the product
///   ⟨u+|∂Ĥ/∂q_{i′}|c⟩⟨c|∂Ĥ/∂q_i|u−⟩ — one row per admissible state in
///   the corresponding energy window.
/// * `direct_states/stokes_states/spont_states`: the 1-based indices of
///   those admissible states, in row order (windows: Direct u−≤E_c≤u+,
///   Stokes E_c≥u+, Spont E_c≤u−; the qubit levels are excluded).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CouplingData<R: Real> {
    pub first_order: Vec<C<R>>,
    pub virt: Vec<Vec<C<R>>>,
    pub direct: Vec<Vec<Vec<C<R>>>>,
    pub stokes: Vec<Vec<Vec<C<R>>>>,
    pub spont: Vec<Vec<Vec<C<R>>>>,
    pub direct_states: Vec<usize>,
    pub stokes_states: Vec<usize>,
    pub spont_states: Vec<usize>,
}

impl<R: Real> CouplingData<R> {
    /// Symmetric access to the second-derivative element of pair (i, i′),
    /// 0-based indices in any order.
    pub fn virtual_element(&self, i: usize, ip: usize) -> C<R> {
        let (lo, hi) = if i <= ip { (i, ip) } else { (ip, i) };
        self.virt[lo][hi - lo]
    }

    /// Checks shape consistency against a mode count and the window lists.
    pub fn validate(&self, nm: usize) -> Result<(), RateError> {
        if self.first_order.len() != nm {
            return Err(RateError::Inconsistent(format!(
                "expected {nm} first-order elements, found {}",
                self.first_order.len()
            )));
        }
        if nm > 0 && self.virt.len() != nm {
            return Err(RateError::Inconsistent(format!(
                "expected {nm} virtual-pair rows, found {}",
                self.virt.len()
            )));
        }
        for (i, row) in self.virt.iter().enumerate() {
            if row.len() != nm - i {
                return Err(RateError::Inconsistent(format!(
                    "virtual row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    nm - i
                )));
            }
        }
        for (name, group, states) in [
            ("Direct", &self.direct, &self.direct_states),
            ("Stokes", &self.stokes, &self.stokes_states),
            ("Spont", &self.spont, &self.spont_states),
        ] {
            if nm > 0 && group.len() != nm {
                return Err(RateError::Inconsistent(format!(
                    "{name} group has {} mode blocks, expected {nm}",
                    group.len()
                )));
            }
            for (i, block) in group.iter().enumerate() {
                if block.len() != states.len() {
                    return Err(RateError::Inconsistent(format!(
                        "{name} block for mode {} has {} state rows, expected {}",
                        i + 1,
                        block.len(),
                        states.len()
                    )));
                }
                for row in block {
                    if row.len() != nm {
                        return Err(RateError::Inconsistent(format!(
                            "{name} row in mode {} has {} entries, expected {nm}",
                            i + 1,
                            row.len()
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Partitions the non-qubit levels of a frame into the three real-process
/// energy windows, returning 1-based state indices (Direct, Stokes, Spont).
pub fn intermediate_windows<R: Real>(
    frame: &QubitFrame<R>,
) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let mut direct = Vec::new();
    let mut stokes = Vec::new();
    let mut spont = Vec::new();
    for (c0, &e) in frame.all_energies.iter().enumerate() {
        let c = c0 + 1;
        if c == frame.ig || c == frame.ie {
            continue;
        }
        if e >= frame.u_minus && e <= frame.u_plus {
            direct.push(c);
        }
        if e >= frame.u_plus {
            stokes.push(c);
        }
        if e <= frame.u_minus {
            spont.push(c);
        }
    }
    (direct, stokes, spont)
}

/// The six relaxation rates parameterizing the Lindbladian, μs⁻¹.
#[derive(Debug, Clone, Copy, Default)]
pub struct RateSet<R: Real> {
    /// Computed vibration-bath absorption rate Γab.
    pub gamma_ab: R,
    /// Computed vibration-bath emission rate Γem.
    pub gamma_em: R,
    /// Spin-bath rate Γmag = 1/T_n + 1/T_e.
    pub gamma_mag: R,
    /// Additive semi-empirical absorption rate Γab,add.
    pub gamma_ab_add: R,
    /// Additive semi-empirical emission rate Γem,add.
    pub gamma_em_add: R,
    /// Additive semi-empirical spin-bath rate Γmag,add.
    pub gamma_mag_add: R,
}

impl<R: Real> RateSet<R> {
    /// Effective rates (Γ_a, Γ_e, Γ_m) = (Γab+Γab,add, Γem+Γem,add,
    /// Γmag+Γmag,add).
    pub fn effective(&self) -> (R, R, R) {
        (
            self.gamma_ab + self.gamma_ab_add,
            self.gamma_em + self.gamma_em_add,
            self.gamma_mag + self.gamma_mag_add,
        )
    }

    /// True when every effective rate is zero (the dissipative propagator
    /// rejects this case).
    pub fn all_zero(&self) -> bool {
        let (a, e, m) = self.effective();
        a == R::zero() && e == R::zero() && m == R::zero()
    }
}

/// Bose–Einstein thermal occupation ⟨n⟩ = 1/(exp(hcν/k_BT) − 1).
///
/// # Errors
/// Parameter error when `t_kelvin` ≤ 0 or `nu_cm` ≤ 0.
pub fn bose_occupation<R: Real>(nu_cm: R, t_kelvin: R) -> Result<R, RateError> {
    if t_kelvin <= R::zero() {
        return Err(RateError::Parameter(
            "temperature must be positive".into(),
        ));
    }
    if nu_cm <= R::zero() {
        return Err(RateError::Parameter(
            "mode frequency must be positive".into(),
        ));
    }
    let x = nu_cm * R::of(CM1_TO_K) / t_kelvin;
    Ok(R::one() / (x.exp() - R::one()))
}

/// Gaussian spectral density with the delta-function scaling folded in:
/// G(ν_t; ν_c, σ) = (1/2π)·(1/(σ√2π))·exp(−½((ν_t−ν_c)/σ)²).
///
/// Arguments are linear frequencies in cm⁻¹; the value carries units of cm
/// (per linear frequency, divided by 2π from δ(ω) = δ(2πcν̃)·…).
pub fn gaussian_lineshape<R: Real>(nu_target: R, nu_center: R, sigma: R) -> R {
    let two_pi = R::two_pi();
    let z = (nu_target - nu_center) / sigma;
    let norm = R::one() / (two_pi * sigma * two_pi.sqrt());
    norm * (-z * z / R::of(2.0)).exp()
}

/// One-phonon rates and per-mode contributions.
#[derive(Debug, Clone)]
pub struct OnePhononRates<R: Real> {
    /// Γab^1p, μs⁻¹.
    pub gamma_ab: R,
    /// Γem^1p, μs⁻¹.
    pub gamma_em: R,
    /// Per-mode (absorption, emission) contributions, μs⁻¹, mode order.
    pub per_mode: Vec<(R, R)>,
}

/// One-phonon absorption/emission rates:
/// Γab = Σ_i K · (ħ/2m_iω_i) · ⟨n_i⟩ · |M1_i|² · G(ν₊₋; ν_i, σ_i·sfgw),
/// Γem identical with ⟨n_i⟩+1 and the conjugate element.
///
/// An empty mode list yields (0, 0).
pub fn one_phonon_rates<R: Real>(
    frame: &QubitFrame<R>,
    modes: &[VibrationMode<R>],
    coupling: &CouplingData<R>,
    t_kelvin: R,
    sfgw: R,
) -> Result<OnePhononRates<R>, RateError> {
    if sfgw <= R::zero() {
        return Err(RateError::Parameter(
            "gaussian-width scale factor sfgw must be positive".into(),
        ));
    }
    if coupling.first_order.len() != modes.len() {
        return Err(RateError::Inconsistent(format!(
            "{} first-order elements for {} modes",
            coupling.first_order.len(),
            modes.len()
        )));
    }
    let nu_pm = frame.gap_cm1();
    let k = R::of(GOLDEN_RULE_US);
    let mut gamma_ab = R::zero();
    let mut gamma_em = R::zero();
    let mut per_mode = Vec::with_capacity(modes.len());
    for (mode, m1) in modes.iter().zip(&coupling.first_order) {
        let n = bose_occupation(mode.nu, t_kelvin)?;
        let zp = R::of(zero_point_m2(
            mode.mass.as_f64(),
            mode.nu.as_f64(),
        ));
        let g = gaussian_lineshape(nu_pm, mode.nu, mode.sigma * sfgw);
        let m2 = m1.norm_sqr(); // |M1|² = |M1*|²
        let ab = k * zp * n * m2 * g;
        let em = k * zp * (n + R::one()) * m2 * g;
        gamma_ab += ab;
        gamma_em += em;
        per_mode.push((ab, em));
    }
    Ok(OnePhononRates {
        gamma_ab,
        gamma_em,
        per_mode,
    })
}

/// The six two-phonon process kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoPhononProcess {
    /// Absorption of two phonons through a Direct-window real/virtual path.
    RDirect,
    /// Emission of two phonons (Direct window, conjugate elements).
    LDirect,
    /// Absorption of i, emission of i′ with a high-lying intermediate state.
    Stokes,
    /// Emission of i, absorption of i′ (high-lying intermediate state).
    AntiStokes,
    /// Spontaneous-emission-then-absorption, net absorption.
    RSpont,
    /// Spontaneous-emission-then-absorption, net emission.
    LSpont,
}

impl TwoPhononProcess {
    /// All six processes in canonical order.
    pub const ALL: [TwoPhononProcess; 6] = [
        TwoPhononProcess::RDirect,
        TwoPhononProcess::LDirect,
        TwoPhononProcess::Stokes,
        TwoPhononProcess::AntiStokes,
        TwoPhononProcess::RSpont,
        TwoPhononProcess::LSpont,
    ];

    /// True for the three processes contributing to the global absorption
    /// rate (the others contribute to emission).
    pub fn is_absorption(self) -> bool {
        matches!(
            self,
            TwoPhononProcess::RDirect | TwoPhononProcess::Stokes | TwoPhononProcess::RSpont
        )
    }

    /// True for emission-side processes, which use conjugated elements.
    fn conjugated(self) -> bool {
        matches!(
            self,
            TwoPhononProcess::LDirect | TwoPhononProcess::AntiStokes | TwoPhononProcess::LSpont
        )
    }
}

/// Two-phonon rates, per-process and per-ordered-pair, μs⁻¹.
#[derive(Debug, Clone)]
pub struct TwoPhononRates<R: Real> {
    /// Per-process rates in [`TwoPhononProcess::ALL`] order.
    pub process_rates: [R; 6],
    /// Per ordered pair (i, i′), 1-based, the (absorption, emission)
    /// contributions summed over processes.
    pub per_pair: Vec<((usize, usize), (R, R))>,
    /// Number of real-process terms dropped because the energy denominator
    /// fell below [`DENOMINATOR_FLOOR_CM1`].
    pub skipped_terms: usize,
}

impl<R: Real> TwoPhononRates<R> {
    /// Global two-phonon absorption rate Γab^2p = R-Direct + Stokes + R-Spont.
    pub fn gamma_ab(&self) -> R {
        self.process_rates[0] + self.process_rates[2] + self.process_rates[4]
    }

    /// Global two-phonon emission rate Γem^2p = L-Direct + anti-Stokes + L-Spont.
    pub fn gamma_em(&self) -> R {
        self.process_rates[1] + self.process_rates[3] + self.process_rates[5]
    }
}

struct PairContext<R: Real> {
    nu_i: R,
    nu_ip: R,
    sigma: R,
    /// √(zp_i⟨n_i⟩), √(zp_i(⟨n_i⟩+1)) for the first (mode-i) factor.
    qi_n: R,
    qi_np1: R,
    /// Same for the second (mode-i′) factor.
    qip_n: R,
    qip_np1: R,
}

/// Two-phonon rates for all six processes.
///
/// For each ordered mode pair (i, i′) and process, the transition amplitude
/// is
///
/// A = Q_i · Q_{i′} · ( ½·M2virt(i,i′) + Σ_c P_c(i,i′)/(E-denominator) ),
///
/// where Q are the thermal zero-point factors (√(zp·⟨n⟩) on absorbed-phonon
/// factors, √(zp·(⟨n⟩+1)) on emitted ones), M2virt is the symmetric
/// second-derivative element, and the sum runs over the admissible
/// intermediate states of the process's energy window. Emission-side
/// processes conjugate each stored element factor-wise. The rate
/// contribution is K·|A|²·G(two-phonon resonance mismatch; (σ_i+σ_{i′})·sfgw).
pub fn two_phonon_rates<R: Real>(
    frame: &QubitFrame<R>,
    modes: &[VibrationMode<R>],
    coupling: &CouplingData<R>,
    t_kelvin: R,
    sfgw: R,
) -> Result<TwoPhononRates<R>, RateError> {
    if sfgw <= R::zero() {
        return Err(RateError::Parameter(
            "gaussian-width scale factor sfgw must be positive".into(),
        ));
    }
    coupling.validate(modes.len())?;
    let nm = modes.len();
    let nu_pm = frame.gap_cm1();
    let u_m = frame.u_minus;
    let u_p = frame.u_plus;
    let k = R::of(GOLDEN_RULE_US);
    let floor = R::of(DENOMINATOR_FLOOR_CM1);

    // Precompute per-mode thermal factors.
    let mut n_occ = Vec::with_capacity(nm);
    let mut zp = Vec::with_capacity(nm);
    for mode in modes {
        n_occ.push(bose_occupation(mode.nu, t_kelvin)?);
        zp.push(R::of(zero_point_m2(
            mode.mass.as_f64(),
            mode.nu.as_f64(),
        )));
    }

    let mut process_rates = [R::zero(); 6];
    let mut per_pair = Vec::with_capacity(nm * nm);
    let mut skipped = 0usize;

    for i in 0..nm {
        for ip in 0..nm {
            let ctx = PairContext {
                nu_i: modes[i].nu,
                nu_ip: modes[ip].nu,
                sigma: (modes[i].sigma + modes[ip].sigma) * sfgw,
                qi_n: (zp[i] * n_occ[i]).sqrt(),
                qi_np1: (zp[i] * (n_occ[i] + R::one())).sqrt(),
                qip_n: (zp[ip] * n_occ[ip]).sqrt(),
                qip_np1: (zp[ip] * (n_occ[ip] + R::one())).sqrt(),
            };
            let mut pair_ab = R::zero();
            let mut pair_em = R::zero();
            for (pidx, proc) in TwoPhononProcess::ALL.into_iter().enumerate() {
                // Thermal factors: the first factor tracks mode i, the
                // second mode i′.
                let (qf_i, qf_ip, states, block, mismatch): (
                    R,
                    R,
                    &[usize],
                    &[Vec<C<R>>],
                    R,
                ) = match proc {
                    TwoPhononProcess::RDirect => (
                        ctx.qi_n,
                        ctx.qip_n,
                        &coupling.direct_states,
                        &coupling.direct[i],
                        nu_pm - ctx.nu_i - ctx.nu_ip,
                    ),
                    TwoPhononProcess::LDirect => (
                        ctx.qi_np1,
                        ctx.qip_np1,
                        &coupling.direct_states,
                        &coupling.direct[i],
                        nu_pm - ctx.nu_i - ctx.nu_ip,
                    ),
                    TwoPhononProcess::Stokes => (
                        ctx.qi_n,
                        ctx.qip_np1,
                        &coupling.stokes_states,
                        &coupling.stokes[i],
                        nu_pm - ctx.nu_i + ctx.nu_ip,
                    ),
                    TwoPhononProcess::AntiStokes => (
                        ctx.qi_np1,
                        ctx.qip_n,
                        &coupling.stokes_states,
                        &coupling.stokes[i],
                        nu_pm + ctx.nu_i - ctx.nu_ip,
                    ),
                    TwoPhononProcess::RSpont => (
                        ctx.qi_np1,
                        ctx.qip_n,
                        &coupling.spont_states,
                        &coupling.spont[i],
                        nu_pm + ctx.nu_i - ctx.nu_ip,
                    ),
                    TwoPhononProcess::LSpont => (
                        ctx.qi_np1,
                        ctx.qip_n,
                        &coupling.spont_states,
                        &coupling.spont[i],
                        nu_pm - ctx.nu_i + ctx.nu_ip,
                    ),
                };
                let conj = proc.conjugated();
                let virt_raw = coupling.virtual_element(i, ip);
                let virt = if conj { virt_raw.conj() } else { virt_raw };
                let mut amp = virt * C::new(R::of(0.5), R::zero());
                for (row, &c) in block.iter().zip(states.iter()) {
                    let e_c = frame.all_energies[c - 1];
                    let denom = match proc {
                        TwoPhononProcess::RDirect => u_m - e_c + ctx.nu_i,
                        TwoPhononProcess::LDirect => u_p - e_c - ctx.nu_i,
                        TwoPhononProcess::Stokes => u_m - e_c + ctx.nu_i,
                        TwoPhononProcess::AntiStokes => u_p - e_c + ctx.nu_i,
                        TwoPhononProcess::RSpont => u_m - e_c - ctx.nu_i,
                        TwoPhononProcess::LSpont => u_p - e_c - ctx.nu_i,
                    };
                    if denom.abs() < floor {
                        skipped += 1;
                        continue;
                    }
                    let num_raw = row[ip];
                    let num = if conj { num_raw.conj() } else { num_raw };
                    amp += num / C::new(denom, R::zero());
                }
                let amp = amp * C::new(qf_i * qf_ip, R::zero());
                let g = gaussian_lineshape(mismatch, R::zero(), ctx.sigma);
                let rate = k * amp.norm_sqr() * g;
                process_rates[pidx] += rate;
                if proc.is_absorption() {
                    pair_ab += rate;
                } else {
                    pair_em += rate;
                }
            }
            per_pair.push(((i + 1, ip + 1), (pair_ab, pair_em)));
        }
    }

    Ok(TwoPhononRates {
        process_rates,
        per_pair,
        skipped_terms: skipped,
    })
}

/// How the additive absorption rate is supplied.
#[derive(Debug, Clone, Copy)]
pub enum AbsorptionAdd<R: Real> {
    /// Explicit Γab,add in μs⁻¹ (≥ 0).
    Explicit(R),
    /// Derive Γab,add = Γem,add · exp(−gap·hc/k_BT) (detailed balance).
    DetailedBalance,
}

/// Assembles a [`RateSet`] from computed vibration rates, the per-direction
/// spin-bath rate, and the additive semi-empirical rates, optionally
/// applying the detailed-balance condition to the additive absorption rate.
///
/// # Errors
/// Parameter error on any negative input, or on non-positive temperature
/// when detailed balance is requested.
#[allow(clippy::too_many_arguments)]
pub fn effective_rates<R: Real>(
    gamma_ab: R,
    gamma_em: R,
    gamma_mag: R,
    gamma_ab_add: AbsorptionAdd<R>,
    gamma_em_add: R,
    gamma_mag_add: R,
    gap_cm1: R,
    t_kelvin: R,
) -> Result<RateSet<R>, RateError> {
    let check = |name: &str, v: R| {
        if v < R::zero() {
            Err(RateError::Parameter(format!("{name} must be ≥ 0")))
        } else {
            Ok(())
        }
    };
    check("gamma_ab", gamma_ab)?;
    check("gamma_em", gamma_em)?;
    check("gamma_mag", gamma_mag)?;
    check("gamma_em_add", gamma_em_add)?;
    check("gamma_mag_add", gamma_mag_add)?;
    let gamma_ab_add = match gamma_ab_add {
        AbsorptionAdd::Explicit(v) => {
            check("gamma_ab_add", v)?;
            v
        }
        AbsorptionAdd::DetailedBalance => {
            if t_kelvin <= R::zero() {
                return Err(RateError::Parameter(
                    "detailed balance requires a positive temperature".into(),
                ));
            }
            gamma_em_add * (-gap_cm1 * R::of(CM1_TO_K) / t_kelvin).exp()
        }
    };
    Ok(RateSet {
        gamma_ab,
        gamma_em,
        gamma_mag,
        gamma_ab_add,
        gamma_em_add,
        gamma_mag_add,
    })
}

/// A labeled rate contribution with its percentage share.
#[derive(Debug, Clone)]
pub struct Contribution<L> {
    /// Mode index or mode pair.
    pub label: L,
    /// Absolute contribution, μs⁻¹.
    pub rate: f64,
    /// Percentage of the total.
    pub percent: f64,
}

/// Filters contributions whose percentage of the total exceeds `threshold`
/// (percent), sorted descending by share. A zero total yields an empty list.
pub fn mode_contributions<L: Clone, R: Real>(
    contributions: &[(L, R)],
    threshold_percent: f64,
) -> Vec<Contribution<L>> {
    let total: f64 = contributions
        .iter()
        .map(|(_, r)| r.as_f64())
        .sum();
    if total <= 0.0 {
        return Vec::new();
    }
    let mut out: Vec<Contribution<L>> = contributions
        .iter()
        .filter_map(|(label, r)| {
            let rate = r.as_f64();
            let percent = 100.0 * rate / total;
            (percent > threshold_percent).then(|| Contribution {
                label: label.clone(),
                rate,
                percent,
            })
        })
        .collect();
    out.sort_by(|a, b| b.percent.partial_cmp(&a.percent).unwrap());
    out
}
