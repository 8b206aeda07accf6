//! Long-time and short-time closed-form evaluators.
//!
//! Long-time behaviour of both correlation components comes from the
//! low-frequency expansion of the density: each expansion term
//! `c nu^a logfactor^n` maps to a power law `tau^(-p)` carrying a polynomial
//! in `ln tau`. The map runs through the one-sided transform
//!
//! ```text
//! F(z) = integral_0^inf nu^a (-ln nu)^n exp(-z nu) dnu
//!      = z^(-s0) * sum_k C(n,k) (-1)^k Gamma^(k)(s0) (ln z)^(n-k),   s0 = 1 + a,
//! ```
//!
//! evaluated on the rotated ray `z = -i tau`, where `ln z = ln tau - i pi/2`
//! and `z^(-s0) = tau^(-s0) exp(i pi s0 / 2)`. Expanding the powers of
//! `ln z` and projecting onto the real or imaginary part yields, for each
//! component, a real polynomial in `ln tau` whose coefficients mix Gamma
//! derivatives with powers of `pi/2`. The thermal component replaces the
//! density by its classical limit `2 theta Omega / nu`, which shifts the
//! transform power down by one and scales the law by `2 theta`.
//!
//! Integer powers of the density make individual polynomial coefficients
//! vanish exactly (the rotation lands on a zero of the projecting trig
//! factor). When the whole polynomial vanishes the term contributes nothing
//! and the next expansion term takes over (a cascaded law); when only the
//! top coefficient vanishes the law survives with its log power reduced by
//! one (a resonant law). Powers within 1e-9 of an integer are snapped so
//! these cancellations are exact in floating point as well.
//!
//! Short-time behaviour needs no expansion: the first three moments of the
//! (thermal) density give `xi1 = M0 - M2 tau^2 / 2` and `xi2 = M1 tau`.

use std::f64::consts::{E, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{moment, BcfSample};
use crate::sd::{ExpansionClass, LowFreqExpansion, SdKind, SpectralDensity};
use crate::special::{
    binomial, cos_half_pi_int, digamma, factorial, gamma, gamma_derivs_from, near_integer,
    sin_half_pi_int,
};

/// Which component of the correlation function a law describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    /// Real component at positive temperature.
    C1AtT,
    /// Real component at zero temperature.
    C1AtZero,
    /// Imaginary component (temperature independent).
    C2,
}

impl Part {
    pub fn as_str(self) -> &'static str {
        match self {
            Part::C1AtT => "c1-thermal",
            Part::C1AtZero => "c1-zero",
            Part::C2 => "c2",
        }
    }
}

/// Shape taxonomy of a leading law.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawKind {
    /// Leading expansion term, full log power.
    Generic,
    /// Leading expansion term, top log coefficient cancels; power of the
    /// log drops by exactly one.
    Resonant,
    /// One or more earlier expansion terms vanished identically.
    CascadedGeneric,
    /// Cascade landing on a term whose top log coefficient cancels.
    CascadedResonant,
    /// Real log power: exactly two law terms, no cascade.
    SecondClassTwoTerm,
}

impl LawKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LawKind::Generic => "generic",
            LawKind::Resonant => "resonant",
            LawKind::CascadedGeneric => "cascaded-generic",
            LawKind::CascadedResonant => "cascaded-resonant",
            LawKind::SecondClassTwoTerm => "second-class-two-term",
        }
    }
}

/// Resonance bookkeeping: the integer index m of the cancelling power and
/// the log power of the expansion term the law came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resonance {
    pub m_index: u32,
    pub log_pow: u32,
}

/// One `prefactor * tau^(-power) * ln^log_power(tau)` law term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LawTerm {
    pub power: f64,
    pub log_power: f64,
    pub prefactor: f64,
}

/// Leading long-time law of one component, with enough metadata to
/// reconstruct the value and to report how the law was selected.
#[derive(Debug, Clone)]
pub struct AsymptoticBranch {
    pub part: Part,
    pub law: LawKind,
    /// Index of the expansion term the law descends from (0 unless cascaded).
    pub used_term_index: usize,
    /// Power of nu in that expansion term.
    pub term_power: f64,
    /// Log power of that expansion term (integer n or real beta).
    pub term_log_pow: f64,
    /// Decay exponent p of tau^(-p).
    pub power: f64,
    /// Power m of ln tau in the leading term.
    pub log_power: f64,
    /// Coefficient of tau^(-p) ln^m(tau), excluding the temperature factor.
    pub prefactor: f64,
    /// Second law term (real log powers only).
    pub secondary: Option<LawTerm>,
    pub resonance: Option<Resonance>,
    /// Set when the leading coefficient is small without cancelling
    /// exactly, i.e. the power sits near, but not at, an integer.
    pub conditioning: Option<String>,
    /// Full polynomial in ln tau at this pole, constant term first.
    /// Empty for second-class laws, whose log powers are not integers.
    pub log_poly: Vec<f64>,
    /// theta for the thermal component, 1 otherwise. Multiplies every value.
    pub thermal_factor: f64,
}

impl AsymptoticBranch {
    /// Leading law only: `thermal * prefactor * tau^(-p) * ln^m(tau)`, plus
    /// the secondary term for second-class laws. Wants tau > 1 so real
    /// powers of ln tau stay defined.
    pub fn leading_value(&self, tau: f64) -> f64 {
        let lt = tau.ln();
        let mut v = self.prefactor * tau.powf(-self.power) * powf_log(lt, self.log_power);
        if let Some(sec) = &self.secondary {
            v += sec.prefactor * tau.powf(-sec.power) * powf_log(lt, sec.log_power);
        }
        self.thermal_factor * v
    }

    /// Value of the full log polynomial at this pole (first class), or of
    /// the two-term law (second class).
    pub fn value(&self, tau: f64) -> f64 {
        if self.log_poly.is_empty() {
            return self.leading_value(tau);
        }
        let lt = tau.ln();
        let mut acc = 0.0;
        for &c in self.log_poly.iter().rev() {
            acc = acc * lt + c;
        }
        self.thermal_factor * acc * tau.powf(-self.power)
    }
}

// ln^m(tau) with an integer fast path so m = 0 is exactly 1.
fn powf_log(lt: f64, m: f64) -> f64 {
    if m == 0.0 {
        1.0
    } else if m.fract() == 0.0 && m.abs() < 64.0 {
        lt.powi(m as i32)
    } else {
        lt.powf(m)
    }
}

/// Gamma data of the law formulas at one point.
#[derive(Debug, Clone, Copy)]
pub struct SpecialValue {
    pub gamma: f64,
    pub gamma_prime: f64,
    pub digamma: f64,
}

/// Gamma, Gamma', and digamma at x > 0 in one call.
pub fn gamma_kernel(x: f64) -> Result<SpecialValue> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "gamma kernel wants a positive finite argument, got {x}"
        )));
    }
    let g = exact_gamma(x);
    let psi = digamma(x);
    Ok(SpecialValue { gamma: g, gamma_prime: g * psi, digamma: psi })
}

// Gamma with an exact factorial at snapped positive integers; the law
// coefficients at integer powers then cancel to the last bit.
fn exact_gamma(x: f64) -> f64 {
    match near_integer(x) {
        Some(k) if k >= 1 && k <= 171 => factorial((k - 1) as u32),
        _ => gamma(x),
    }
}

// Rotation factor exp(i pi s0 / 2) expressed through the term power a, so
// the polynomial route and the closed-coefficient route share trig values:
// for s0 = 1 + a the components are (-sin, cos)(pi a / 2), for s0 = a they
// are (cos, sin)(pi a / 2). Snapped integers use the exact quarter table.
fn rotation(part: Part, a: f64) -> Complex64 {
    let (c, s) = match near_integer(a) {
        Some(k) => (cos_half_pi_int(k), sin_half_pi_int(k)),
        None => ((PI * a / 2.0).cos(), (PI * a / 2.0).sin()),
    };
    match part {
        Part::C1AtT => Complex64::new(c, s),
        Part::C1AtZero | Part::C2 => Complex64::new(-s, c),
    }
}

fn transform_power(part: Part, a: f64) -> f64 {
    match part {
        Part::C1AtT => a,
        Part::C1AtZero | Part::C2 => 1.0 + a,
    }
}

// The classical-limit weight contributes a factor 2 (theta is applied at
// evaluation time through `thermal_factor`).
fn part_scale(part: Part) -> f64 {
    match part {
        Part::C1AtT => 2.0,
        _ => 1.0,
    }
}

fn project(part: Part, z: Complex64) -> f64 {
    match part {
        Part::C2 => z.im,
        _ => z.re,
    }
}

/// Real polynomial in ln tau contributed by one expansion term
/// `coeff * nu^a (-ln nu)^n`, constant term first, excluding the
/// temperature factor. All coefficients can be zero, which means the term
/// contributes nothing to this component.
pub(crate) fn pole_log_polynomial(part: Part, a: f64, n: u32, coeff: f64) -> Vec<f64> {
    let s0 = transform_power(part, a);
    let e = rotation(part, a);
    let g0 = exact_gamma(s0);
    let gd = gamma_derivs_from(g0, s0, n as usize);
    let half_pi = Complex64::new(0.0, -PI / 2.0);
    let scale = part_scale(part) * coeff;
    let mut poly = vec![0.0; n as usize + 1];
    for (d, slot) in poly.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..=(n as usize - d) {
            let m = n as usize - k - d;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let w = binomial(n, k as u32) * sign * gd[k] * binomial((n - k as u32) as u32, m as u32);
            acc += half_pi.powu(m as u32) * w;
        }
        *slot = scale * project(part, e * acc);
    }
    poly
}

// Second-class pole: two leading orders of the generalized binomial series,
// primary at ln^beta and secondary at ln^(beta - 1), sharing the power
// tau^(-s0). Returns (primary, secondary) prefactors, temperature excluded.
fn second_class_pair(part: Part, a: f64, beta: f64, coeff: f64) -> (f64, f64) {
    let s0 = transform_power(part, a);
    let e = rotation(part, a);
    let g = exact_gamma(s0);
    let gp = g * digamma(s0);
    let scale = part_scale(part) * coeff;
    let primary = scale * project(part, e * g);
    let sec_c = e * Complex64::new(-beta * gp, -beta * PI / 2.0 * g);
    (primary, scale * project(part, sec_c))
}

fn is_zero_poly(poly: &[f64]) -> bool {
    poly.iter().all(|&c| c == 0.0)
}

fn top_degree(poly: &[f64]) -> usize {
    poly.iter().rposition(|&c| c != 0.0).expect("nonzero polynomial")
}

// Resonance parity: the top coefficient of the log polynomial cancels when
// the projecting trig factor vanishes, which happens for odd integer powers
// of the imaginary and thermal components and even integer powers of the
// zero-temperature real component.
fn resonance_at(part: Part, a: f64) -> Option<u32> {
    let k = near_integer(a)?;
    if k < 1 {
        return None;
    }
    match part {
        Part::C2 | Part::C1AtT => (k % 2 == 1).then(|| ((k - 1) / 2) as u32),
        Part::C1AtZero => (k % 2 == 0).then(|| (k / 2) as u32),
    }
}

// Distance from the trig zero governing the leading coefficient; used only
// for the conditioning warning on nearly-integer powers.
fn trig_factor(part: Part, a: f64) -> f64 {
    match part {
        Part::C2 | Part::C1AtT => (PI * a / 2.0).cos(),
        Part::C1AtZero => (PI * a / 2.0).sin(),
    }
}

fn check_part_theta(part: Part, theta: f64) -> Result<()> {
    if !(theta >= 0.0) || !theta.is_finite() {
        return Err(Error::Domain(format!("theta must be finite and >= 0, got {theta}")));
    }
    match part {
        Part::C1AtT if theta == 0.0 => Err(Error::Domain(
            "the thermal real component needs theta > 0; use the zero-temperature part".into(),
        )),
        Part::C1AtZero if theta > 0.0 => Err(Error::Domain(
            "the zero-temperature real component is only defined at theta = 0".into(),
        )),
        _ => Ok(()),
    }
}

fn thermal_factor(part: Part, theta: f64) -> f64 {
    match part {
        Part::C1AtT => theta,
        _ => 1.0,
    }
}

/// Pick the leading law of one component from a low-frequency expansion.
///
/// First-class expansions walk the pole ladder and skip terms whose log
/// polynomial vanishes identically; second-class expansions always yield
/// the two-term law of their first term.
pub fn select_branch(exp: &LowFreqExpansion, part: Part, theta: f64) -> Result<AsymptoticBranch> {
    check_part_theta(part, theta)?;
    if exp.terms.is_empty() {
        return Err(Error::ExpansionExhausted("empty low-frequency expansion".into()));
    }
    match exp.class {
        ExpansionClass::RealLog => {
            let t0 = exp.terms[0];
            let (primary, secondary) = second_class_pair(part, t0.power, t0.log_pow, t0.coeff);
            let s0 = transform_power(part, t0.power);
            let conditioning = (primary == 0.0).then(|| {
                "leading coefficient cancels at this integer power; the lower log order leads"
                    .to_string()
            });
            Ok(AsymptoticBranch {
                part,
                law: LawKind::SecondClassTwoTerm,
                used_term_index: 0,
                term_power: t0.power,
                term_log_pow: t0.log_pow,
                power: s0,
                log_power: t0.log_pow,
                prefactor: primary,
                secondary: Some(LawTerm {
                    power: s0,
                    log_power: t0.log_pow - 1.0,
                    prefactor: secondary,
                }),
                resonance: None,
                conditioning,
                log_poly: Vec::new(),
                thermal_factor: thermal_factor(part, theta),
            })
        }
        ExpansionClass::IntegerLog => {
            for (j, term) in exp.terms.iter().enumerate() {
                let n = term.log_pow.round() as u32;
                let poly = pole_log_polynomial(part, term.power, n, term.coeff);
                if is_zero_poly(&poly) {
                    continue;
                }
                let top = top_degree(&poly);
                let resonant =
                    n > 0 && top == n as usize - 1 && resonance_at(part, term.power).is_some();
                let law = match (j > 0, resonant) {
                    (false, false) => LawKind::Generic,
                    (false, true) => LawKind::Resonant,
                    (true, false) => LawKind::CascadedGeneric,
                    (true, true) => LawKind::CascadedResonant,
                };
                let resonance = resonant.then(|| Resonance {
                    m_index: resonance_at(part, term.power).unwrap(),
                    log_pow: n,
                });
                let conditioning = if near_integer(term.power).is_none() {
                    let t = trig_factor(part, term.power);
                    (t.abs() < 1e-6).then(|| {
                        format!(
                            "term power {} lies within {:.1e} of a cancelling integer; \
                             the leading coefficient is ill-conditioned",
                            term.power,
                            (term.power - term.power.round()).abs()
                        )
                    })
                } else {
                    None
                };
                return Ok(AsymptoticBranch {
                    part,
                    law,
                    used_term_index: j,
                    term_power: term.power,
                    term_log_pow: term.log_pow,
                    power: transform_power(part, term.power),
                    log_power: top as f64,
                    prefactor: poly[top],
                    secondary: None,
                    resonance,
                    conditioning,
                    log_poly: poly,
                    thermal_factor: thermal_factor(part, theta),
                });
            }
            Err(Error::ExpansionExhausted(format!(
                "all {} expansion terms cancel for the {} component",
                exp.terms.len(),
                part.as_str()
            )))
        }
    }
}

/// Leading-law coefficient by the closed trigonometric formulas, bypassing
/// the polynomial assembly entirely. `term_coeff` is the coefficient of the
/// expansion term behind the law. Kept as an independent route so the two
/// can be checked against each other; do not fold them together.
pub fn branch_coefficient(branch: &AsymptoticBranch, term_coeff: f64) -> Result<f64> {
    let a = branch.term_power;
    let scale = part_scale(branch.part) * term_coeff;
    match branch.law {
        LawKind::Generic | LawKind::CascadedGeneric => {
            let sv = gamma_kernel(transform_power(branch.part, a))?;
            let v = match branch.part {
                Part::C1AtT => (PI * a / 2.0).cos() * sv.gamma,
                Part::C1AtZero => -((PI * a / 2.0).sin()) * sv.gamma,
                Part::C2 => (PI * a / 2.0).cos() * sv.gamma,
            };
            Ok(scale * v)
        }
        LawKind::Resonant | LawKind::CascadedResonant => {
            let res = branch.resonance.ok_or_else(|| {
                Error::Domain("resonant law without resonance metadata".into())
            })?;
            let m = res.m_index;
            let n = res.log_pow as f64;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let v = match branch.part {
                // a = 1 + 2m: pi n (-1)^m (2m)! before the part scale.
                Part::C1AtT => PI / 2.0 * n * sign * factorial(2 * m),
                // a = 2m: pi n (-1)^m (2m)! / 2.
                Part::C1AtZero => PI * n * sign * factorial(2 * m) / 2.0,
                // a = 1 + 2m: pi n (-1)^m (1 + 2m)! / 2.
                Part::C2 => PI * n * sign * factorial(2 * m + 1) / 2.0,
            };
            Ok(scale * v)
        }
        LawKind::SecondClassTwoTerm => {
            let sv = gamma_kernel(transform_power(branch.part, a))?;
            let v = match branch.part {
                Part::C1AtT | Part::C2 => (PI * a / 2.0).cos() * sv.gamma,
                Part::C1AtZero => -((PI * a / 2.0).sin()) * sv.gamma,
            };
            Ok(scale * v)
        }
    }
}

/// Secondary-term coefficient of a second-class law by its closed formula.
pub fn branch_secondary_coefficient(branch: &AsymptoticBranch, term_coeff: f64) -> Result<f64> {
    if branch.law != LawKind::SecondClassTwoTerm {
        return Err(Error::Domain("secondary coefficients exist only for two-term laws".into()));
    }
    let a = branch.term_power;
    let beta = branch.term_log_pow;
    let sv = gamma_kernel(transform_power(branch.part, a))?;
    let (s, c) = ((PI * a / 2.0).sin(), (PI * a / 2.0).cos());
    let v = match branch.part {
        Part::C2 | Part::C1AtT => beta * (PI / 2.0 * s * sv.gamma - c * sv.gamma_prime),
        Part::C1AtZero => beta * (PI / 2.0 * c * sv.gamma + s * sv.gamma_prime),
    };
    Ok(part_scale(branch.part) * term_coeff * v)
}

/// Long-time sample with the branch metadata of both components.
#[derive(Debug, Clone)]
pub struct AsymptoticSample {
    pub sample: BcfSample,
    pub xi1_branch: AsymptoticBranch,
    pub xi2_branch: AsymptoticBranch,
}

// Up to this many non-vanishing poles are summed per component.
const MAX_POLES: usize = 6;

struct PoleSum {
    value: f64,
    // Magnitude of the first omitted pole's law, before thermal scaling.
    omitted: f64,
}

fn eval_first_class_pole(part: Part, power: f64, n: u32, coeff: f64, tau: f64) -> f64 {
    let poly = pole_log_polynomial(part, power, n, coeff);
    let lt = tau.ln();
    let mut acc = 0.0;
    for &c in poly.iter().rev() {
        acc = acc * lt + c;
    }
    acc * tau.powf(-transform_power(part, power))
}

fn eval_second_class_pole(part: Part, power: f64, beta: f64, coeff: f64, tau: f64) -> f64 {
    let (p, s) = second_class_pair(part, power, beta, coeff);
    let lt = tau.ln();
    (p * powf_log(lt, beta) + s * powf_log(lt, beta - 1.0)) * tau.powf(-transform_power(part, power))
}

// Sum the live poles of one component at one time. `l` extends the ladder
// by one synthetic term when every expansion term was consumed, purely for
// the error estimate.
fn pole_sum(exp: &LowFreqExpansion, part: Part, tau: f64, l: f64) -> PoleSum {
    let mut total = 0.0;
    let mut live = 0;
    match exp.class {
        ExpansionClass::RealLog => {
            for term in &exp.terms {
                let v = eval_second_class_pole(part, term.power, term.log_pow, term.coeff, tau);
                if live == MAX_POLES {
                    return PoleSum { value: total, omitted: v.abs() };
                }
                total += v;
                live += 1;
            }
        }
        ExpansionClass::IntegerLog => {
            for term in &exp.terms {
                let n = term.log_pow.round() as u32;
                let poly = pole_log_polynomial(part, term.power, n, term.coeff);
                if is_zero_poly(&poly) {
                    continue;
                }
                let lt = tau.ln();
                let mut acc = 0.0;
                for &c in poly.iter().rev() {
                    acc = acc * lt + c;
                }
                let v = acc * tau.powf(-transform_power(part, term.power));
                if live == MAX_POLES {
                    return PoleSum { value: total, omitted: v.abs() };
                }
                total += v;
                live += 1;
            }
        }
    }
    // The ladder ran out before the pole cap: extrapolate one more term of
    // the carrier's Taylor series for the error estimate.
    let last = exp.terms.last().expect("nonempty expansion");
    let j_next = exp.terms.len() as f64;
    let c_next = last.coeff * (-l) / j_next;
    let omitted = match exp.class {
        ExpansionClass::RealLog => {
            eval_second_class_pole(part, last.power + 1.0, last.log_pow, c_next, tau).abs()
        }
        ExpansionClass::IntegerLog => {
            let n = last.log_pow.round() as u32;
            let v = eval_first_class_pole(part, last.power + 1.0, n, c_next, tau);
            if v == 0.0 {
                // The synthetic term can itself cancel; step one further.
                eval_first_class_pole(part, last.power + 2.0, n, c_next * (-l) / (j_next + 1.0), tau)
                    .abs()
            } else {
                v.abs()
            }
        }
    };
    PoleSum { value: total, omitted }
}

fn canonical_l(sd: &SpectralDensity) -> Result<f64> {
    match &sd.kind {
        SdKind::IntLog { l, .. } | SdKind::RealLog { l, .. } => Ok(*l),
        SdKind::Tabulated(_) => Err(Error::UnsupportedKind(
            "tabulated densities carry no low-frequency expansion; the long-time \
             evaluator needs one of the closed-form kinds"
                .into(),
        )),
    }
}

/// Long-time evaluation of both components on a grid of times, each
/// strictly above e so every law's log powers are positive.
///
/// Values sum every non-vanishing pole of the expansion up to a fixed cap;
/// the error estimate is the magnitude of the first omitted pole's law,
/// plus, for the thermal component, the first correction of the thermal
/// weight beyond its classical limit (a pole two powers up, unscaled by
/// theta).
pub fn bcf_asymptotic(
    sd: &SpectralDensity,
    theta: f64,
    taus: &[f64],
) -> Result<Vec<AsymptoticSample>> {
    let l = canonical_l(sd)?;
    let exp = sd.low_freq_expansion(crate::sd::DEFAULT_EXPANSION_TERMS)?;
    let part1 = if theta > 0.0 { Part::C1AtT } else { Part::C1AtZero };
    let b1 = select_branch(&exp, part1, theta)?;
    let b2 = select_branch(&exp, Part::C2, theta)?;
    let t0 = exp.terms[0];
    let mut out = Vec::with_capacity(taus.len());
    for &tau in taus {
        if !(tau > E) {
            return Err(Error::Precondition(format!(
                "long-time laws need tau > e, got {tau}"
            )));
        }
        let s1 = pole_sum(&exp, part1, tau, l);
        let s2 = pole_sum(&exp, Part::C2, tau, l);
        let tf = thermal_factor(part1, theta);
        let mut err1 = tf * s1.omitted;
        if theta > 0.0 {
            // coth(x) = 1/x + x/3 - ...: the x/3 term adds a zero-
            // temperature-type pole at power a0 + 1 with weight c0 / (6 theta).
            let c_corr = t0.coeff / (6.0 * theta);
            let corr = match exp.class {
                ExpansionClass::RealLog => {
                    eval_second_class_pole(Part::C1AtZero, t0.power + 1.0, t0.log_pow, c_corr, tau)
                }
                ExpansionClass::IntegerLog => eval_first_class_pole(
                    Part::C1AtZero,
                    t0.power + 1.0,
                    t0.log_pow.round() as u32,
                    c_corr,
                    tau,
                ),
            };
            err1 += corr.abs();
        }
        let err2 = s2.omitted;
        out.push(AsymptoticSample {
            sample: BcfSample {
                tau,
                xi1: tf * s1.value,
                xi2: s2.value,
                err1,
                err2,
            },
            xi1_branch: b1.clone(),
            xi2_branch: b2.clone(),
        });
    }
    Ok(out)
}

/// Short-time evaluation `xi1 = M0 - M2 tau^2 / 2`, `xi2 = M1 tau` from the
/// first three (thermal) moments.
///
/// The moments exist when the tail decays fast enough: the quadratic term
/// needs a tail exponent above two. Error fields carry a heuristic for the
/// first omitted order, extrapolated from the M2 / M0 frequency scale; the
/// true truncation term involves moments this routine does not compute.
pub fn short_time(sd: &SpectralDensity, theta: f64, taus: &[f64]) -> Result<Vec<BcfSample>> {
    if !(theta >= 0.0) || !theta.is_finite() {
        return Err(Error::Domain(format!("theta must be finite and >= 0, got {theta}")));
    }
    let chi0 = sd.chi0();
    if !(chi0 > 2.0) {
        return Err(Error::Precondition(format!(
            "short-time evaluation needs tail exponent chi0 > 2 so the second \
             moment exists; declared chi0 = {chi0}"
        )));
    }
    let m0 = moment(sd, 0, theta)?;
    let m1 = moment(sd, 1, theta)?;
    let m2 = moment(sd, 2, theta)?;
    let scale = m2 / m0;
    let mut out = Vec::with_capacity(taus.len());
    for &tau in taus {
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(Error::Domain(format!("tau must be finite and >= 0, got {tau}")));
        }
        let t2 = tau * tau;
        out.push(BcfSample {
            tau,
            xi1: m0 - 0.5 * m2 * t2,
            xi2: m1 * tau,
            err1: 0.5 * m2 * t2 * (scale * t2) / 12.0,
            err2: m1 * tau * (scale * t2) / 6.0,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{bcf_numeric, QuadConfig};
    use crate::special::EULER_GAMMA;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn int_log(q: f64, alpha: f64, l: f64, n: u32) -> SpectralDensity {
        SpectralDensity::int_log(q, alpha, l, n).unwrap()
    }

    fn expansion(sd: &SpectralDensity) -> LowFreqExpansion {
        sd.low_freq_expansion(crate::sd::DEFAULT_EXPANSION_TERMS).unwrap()
    }

    #[test]
    fn gamma_kernel_matches_classic_values() {
        let v = gamma_kernel(1.0).unwrap();
        assert_abs_diff_eq!(v.gamma, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.digamma, -EULER_GAMMA, epsilon = 1e-14);
        assert_abs_diff_eq!(v.gamma_prime, -EULER_GAMMA, epsilon = 1e-14);
        let v = gamma_kernel(3.0).unwrap();
        assert_eq!(v.gamma, 2.0);
        assert_abs_diff_eq!(v.gamma_prime, 2.0 * (1.5 - EULER_GAMMA), epsilon = 1e-13);
        assert!(gamma_kernel(0.0).is_err());
        assert!(gamma_kernel(-1.3).is_err());
    }

    #[test]
    fn exponential_density_imaginary_law_cascades_to_exact_two() {
        // First term (power 1, no log) cancels for the imaginary component;
        // the law comes from the second term and its coefficient is exact.
        let sd = int_log(1.0, 1.0, 1.0, 0);
        let b = select_branch(&expansion(&sd), Part::C2, 0.0).unwrap();
        assert_eq!(b.law, LawKind::CascadedGeneric);
        assert_eq!(b.used_term_index, 1);
        assert_eq!(b.power, 3.0);
        assert_eq!(b.log_power, 0.0);
        assert_eq!(b.prefactor, 2.0);
        assert!(b.resonance.is_none());
        // Closed form: -Im 1/(1 - i tau)^2 asymptotics give 2 tau^-3.
        let tau: f64 = 1.0e3;
        let exact = 2.0 * tau / (1.0 + tau * tau).powi(2);
        assert_relative_eq!(b.leading_value(tau), exact, max_relative = 5e-3);
    }

    #[test]
    fn exponential_density_real_laws_track_the_closed_form() {
        let sd = int_log(1.0, 1.0, 1.0, 0);
        let b = select_branch(&expansion(&sd), Part::C1AtZero, 0.0).unwrap();
        assert_eq!(b.law, LawKind::Generic);
        assert_eq!(b.power, 2.0);
        assert_eq!(b.prefactor, -1.0);
        // Thermal: first term cancels, second leads with prefactor 2 theta.
        let bt = select_branch(&expansion(&sd), Part::C1AtT, 0.7).unwrap();
        assert_eq!(bt.law, LawKind::CascadedGeneric);
        assert_eq!(bt.power, 2.0);
        assert_eq!(bt.prefactor, 2.0);
        assert_eq!(bt.thermal_factor, 0.7);
    }

    #[test]
    fn multi_pole_sum_reproduces_the_closed_form_tail() {
        // (1 - tau^2) / (1 + tau^2)^2 = -tau^-2 + 3 tau^-4 - 5 tau^-6 + ...
        // and 2 tau / (1 + tau^2)^2 = 2 tau^-3 - 4 tau^-5 + ...
        let sd = int_log(1.0, 1.0, 1.0, 0);
        for tau in [20.0, 50.0] {
            let s = &bcf_asymptotic(&sd, 0.0, &[tau]).unwrap()[0];
            let xi1 = (1.0 - tau * tau) / (1.0 + tau * tau).powi(2);
            let xi2 = 2.0 * tau / (1.0 + tau * tau).powi(2);
            assert!((s.sample.xi1 - xi1).abs() <= s.sample.err1 + 1e-14);
            assert!((s.sample.xi2 - xi2).abs() <= s.sample.err2 + 1e-14);
            assert!(s.sample.err1 < 1e-3 * xi1.abs());
        }
    }

    #[test]
    fn resonant_imaginary_coefficient_is_half_pi_exactly() {
        // Power 1 with one log factor: the top coefficient cancels and the
        // surviving constant is pi/2.
        let sd = int_log(1.0, 1.0, 1.0, 1);
        let b = select_branch(&expansion(&sd), Part::C2, 0.0).unwrap();
        assert_eq!(b.law, LawKind::Resonant);
        assert_eq!(b.power, 2.0);
        assert_eq!(b.log_power, 0.0);
        assert_eq!(b.resonance, Some(Resonance { m_index: 0, log_pow: 1 }));
        assert!((b.prefactor - PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn resonant_real_coefficient_is_minus_pi_exactly() {
        // Power 2 with one log factor at zero temperature.
        let sd = int_log(1.0, 2.0, 1.0, 1);
        let b = select_branch(&expansion(&sd), Part::C1AtZero, 0.0).unwrap();
        assert_eq!(b.law, LawKind::Resonant);
        assert_eq!(b.power, 3.0);
        assert_eq!(b.log_power, 0.0);
        assert_eq!(b.resonance, Some(Resonance { m_index: 1, log_pow: 1 }));
        assert!((b.prefactor + PI).abs() < 1e-12);
    }

    #[test]
    fn resonance_reduces_log_power_by_one() {
        // Power 5, six log factors: imaginary component resonates with
        // m = 2 and the log power drops from 6 to 5.
        let sd = int_log(1.0, 5.0, 2.0, 6);
        let b = select_branch(&expansion(&sd), Part::C2, 0.0).unwrap();
        assert_eq!(b.law, LawKind::Resonant);
        assert_eq!(b.log_power, 5.0);
        assert_eq!(b.resonance, Some(Resonance { m_index: 2, log_pow: 6 }));
    }

    #[test]
    fn thermal_law_power_drops_by_one_at_positive_temperature() {
        let sd = int_log(1.0, 0.5, 1.0, 0);
        let exp = expansion(&sd);
        let warm = select_branch(&exp, Part::C1AtT, 1.0).unwrap();
        assert_eq!(warm.power, 0.5);
        let cold = select_branch(&exp, Part::C1AtZero, 0.0).unwrap();
        assert_eq!(cold.power, 1.5);
    }

    #[test]
    fn closed_coefficient_route_matches_the_polynomial_route() {
        // A spread of powers and log powers for all live parts; the two
        // routes are algebraically identical, so agreement is tight.
        let cases = [
            (0.3, 0u32),
            (0.5, 1),
            (1.0, 1),
            (1.0, 3),
            (1.7, 2),
            (2.0, 1),
            (2.0, 4),
            (2.5, 2),
            (3.0, 2),
            (4.4, 5),
            (5.0, 6),
        ];
        for &(alpha, n) in &cases {
            let sd = int_log(0.8, alpha, 1.3, n);
            let exp = expansion(&sd);
            for (part, theta) in
                [(Part::C2, 0.0), (Part::C1AtZero, 0.0), (Part::C1AtT, 0.9)]
            {
                let b = match select_branch(&exp, part, theta) {
                    Ok(b) => b,
                    Err(Error::ExpansionExhausted(_)) => continue,
                    Err(e) => panic!("unexpected error: {e}"),
                };
                let c = exp.terms[b.used_term_index].coeff;
                let closed = branch_coefficient(&b, c).unwrap();
                let tol = 1e-12 * b.prefactor.abs().max(1.0);
                assert!(
                    (b.prefactor - closed).abs() <= tol,
                    "alpha={alpha} n={n} part={:?}: poly {} vs closed {}",
                    part,
                    b.prefactor,
                    closed
                );
            }
        }
    }

    #[test]
    fn nearly_integer_powers_report_conditioning() {
        let sd = int_log(1.0, 1.0 + 1e-7, 1.0, 1);
        let b = select_branch(&expansion(&sd), Part::C2, 0.0).unwrap();
        assert!(b.conditioning.is_some());
        assert_eq!(b.law, LawKind::Generic);
        // Snapped exactly: resonant instead, no warning.
        let sd = int_log(1.0, 1.0 + 1e-11, 1.0, 1);
        let b = select_branch(&expansion(&sd), Part::C2, 0.0).unwrap();
        assert_eq!(b.law, LawKind::Resonant);
        assert!(b.conditioning.is_none());
    }

    #[test]
    fn long_time_values_agree_with_quadrature_at_large_tau() {
        let cfg = QuadConfig::default();
        for (alpha, l, n) in [(0.5, 1.0, 0u32), (0.5, 1.0, 1), (2.5, 1.0, 2)] {
            let sd = int_log(1.0, alpha, l, n);
            let tau = 1.0e3;
            let num = &bcf_numeric(&sd, 0.0, &[tau], &cfg).unwrap()[0];
            let asy = &bcf_asymptotic(&sd, 0.0, &[tau]).unwrap()[0].sample;
            assert_relative_eq!(num.xi1, asy.xi1, max_relative = 0.05);
            assert_relative_eq!(num.xi2, asy.xi2, max_relative = 0.05);
        }
    }

    #[test]
    fn thermal_long_time_values_agree_with_quadrature() {
        // Even log power: odd powers of |ln nu| have a kink at nu = 1 whose
        // oscillatory contribution is not part of the low-frequency laws and
        // can rival them in size at moderate tau.
        let sd = int_log(1.0, 1.5, 1.0, 2);
        let theta = 0.8;
        let tau = 500.0;
        let num = &bcf_numeric(&sd, theta, &[tau], &QuadConfig::default()).unwrap()[0];
        let asy = &bcf_asymptotic(&sd, theta, &[tau]).unwrap()[0].sample;
        assert_relative_eq!(num.xi1, asy.xi1, max_relative = 0.05);
        assert_relative_eq!(num.xi2, asy.xi2, max_relative = 0.05);
    }

    #[test]
    fn second_class_two_term_law_beats_its_one_term_truncation() {
        // Against direct quadrature at large tau, adding the secondary
        // term must shrink the discrepancy; this pins its sign and scale.
        let sd = SpectralDensity::real_log(1.0, 0.5, 1.0, 1.5).unwrap();
        let exp = expansion(&sd);
        let tau = 1.0e4;
        let num = &bcf_numeric(&sd, 0.0, &[tau], &QuadConfig::default()).unwrap()[0];
        for (part, numeric) in [(Part::C1AtZero, num.xi1), (Part::C2, num.xi2)] {
            let b = select_branch(&exp, part, 0.0).unwrap();
            assert_eq!(b.law, LawKind::SecondClassTwoTerm);
            let two = b.leading_value(tau);
            let one = b.thermal_factor * b.prefactor * tau.powf(-b.power) * tau.ln().powf(b.log_power);
            assert!((numeric - two).abs() < (numeric - one).abs());
            assert_relative_eq!(numeric, two, max_relative = 0.05);
        }
    }

    #[test]
    fn second_class_coefficients_match_their_closed_formulas() {
        let sd = SpectralDensity::real_log(0.7, 0.6, 1.2, 2.5).unwrap();
        let exp = expansion(&sd);
        for (part, theta) in [(Part::C2, 0.0), (Part::C1AtZero, 0.0), (Part::C1AtT, 0.4)] {
            let b = select_branch(&exp, part, theta).unwrap();
            let w0 = exp.terms[0].coeff;
            let closed = branch_coefficient(&b, w0).unwrap();
            assert_relative_eq!(b.prefactor, closed, max_relative = 1e-13);
            let sec = b.secondary.unwrap();
            let closed_sec = branch_secondary_coefficient(&b, w0).unwrap();
            assert_relative_eq!(sec.prefactor, closed_sec, max_relative = 1e-13);
            assert_eq!(sec.power, b.power);
            assert_eq!(sec.log_power, b.log_power - 1.0);
        }
    }

    #[test]
    fn real_log_with_zero_exponent_matches_plain_power_branch() {
        // beta = 0 is classified into the integer-log expansion, so the
        // branches must be bitwise identical to the n = 0 density.
        let a = SpectralDensity::real_log(1.0, 1.0, 1.0, 0.0).unwrap();
        let b = SpectralDensity::int_log(1.0, 1.0, 1.0, 0).unwrap();
        let ba = select_branch(&expansion(&a), Part::C2, 0.0).unwrap();
        let bb = select_branch(&expansion(&b), Part::C2, 0.0).unwrap();
        assert_eq!(ba.prefactor, bb.prefactor);
        assert_eq!(ba.power, bb.power);
        assert_eq!(ba.law, bb.law);
    }

    #[test]
    fn long_time_evaluator_rejects_small_tau() {
        let sd = int_log(1.0, 1.0, 1.0, 0);
        assert!(matches!(
            bcf_asymptotic(&sd, 0.0, &[2.0]),
            Err(Error::Precondition(_))
        ));
        assert!(bcf_asymptotic(&sd, 0.0, &[2.8]).is_ok());
    }

    #[test]
    fn short_time_matches_moment_values() {
        let sd = int_log(1.0, 1.0, 1.0, 0);
        // M0 = 1, M1 = 2, M2 = 6 for the exponential density.
        let s = &short_time(&sd, 0.0, &[0.1]).unwrap()[0];
        assert_relative_eq!(s.xi1, 1.0 - 0.5 * 6.0 * 0.01, max_relative = 1e-9);
        assert_relative_eq!(s.xi2, 2.0 * 0.1, max_relative = 1e-9);
    }

    #[test]
    fn short_time_tracks_quadrature_for_small_tau() {
        let sd = int_log(1.0, 1.0, 1.0, 0);
        let taus = [0.002, 0.005, 0.01];
        let short = short_time(&sd, 0.0, &taus).unwrap();
        let num = bcf_numeric(&sd, 0.0, &taus, &QuadConfig::default()).unwrap();
        for (s, n) in short.iter().zip(&num) {
            assert_relative_eq!(s.xi1, n.xi1, max_relative = 1e-3);
            assert_relative_eq!(s.xi2, n.xi2, max_relative = 1e-3);
        }
    }

    #[test]
    fn short_time_requires_a_decaying_tail() {
        let nu: Vec<f64> = (0..80).map(|i| 1e-3 * (1e3f64 / 1e-3).powf(i as f64 / 79.0)).collect();
        let om: Vec<f64> = nu.iter().map(|&v| v / (1.0 + v * v)).collect();
        let sd = SpectralDensity::tabulated(&nu, &om, 1.0, 1.5).unwrap();
        match short_time(&sd, 0.0, &[0.1]) {
            Err(Error::Precondition(msg)) => assert!(msg.contains("chi0")),
            other => panic!("expected a precondition error, got {other:?}"),
        }
    }

    #[test]
    fn branch_reports_are_deterministic() {
        let sd = int_log(1.0, 2.0, 1.3, 4);
        let a = select_branch(&expansion(&sd), Part::C1AtZero, 0.0).unwrap();
        let b = select_branch(&expansion(&sd), Part::C1AtZero, 0.0).unwrap();
        assert_eq!(a.log_poly, b.log_poly);
        assert_eq!(a.prefactor.to_bits(), b.prefactor.to_bits());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        // The leading coefficient is linear in the overall strength; scaling
        // by a power of two must be exact.
        #[test]
        fn prefactor_scales_linearly_with_strength(
            alpha in 0.1f64..4.0,
            n in 0u32..5,
            k in -3i32..4,
        ) {
            let q = (2.0f64).powi(k);
            let base = int_log(1.0, alpha, 1.0, n);
            let scaled = int_log(q, alpha, 1.0, n);
            for part in [Part::C2, Part::C1AtZero] {
                let b0 = select_branch(&expansion(&base), part, 0.0);
                let b1 = select_branch(&expansion(&scaled), part, 0.0);
                match (b0, b1) {
                    (Ok(b0), Ok(b1)) => {
                        prop_assert_eq!(b1.prefactor, q * b0.prefactor);
                        prop_assert_eq!(b1.power, b0.power);
                        prop_assert_eq!(b1.law, b0.law);
                    }
                    (Err(_), Err(_)) => {}
                    _ => prop_assert!(false, "branch existence changed under scaling"),
                }
            }
        }

        // Dual-route agreement over random parameters.
        #[test]
        fn coefficient_routes_agree_everywhere(
            alpha in 0.05f64..6.0,
            l in 0.2f64..3.0,
            n in 0u32..7,
        ) {
            let sd = int_log(1.0, alpha, l, n);
            let exp = expansion(&sd);
            for (part, theta) in [(Part::C2, 0.0), (Part::C1AtZero, 0.0), (Part::C1AtT, 1.0)] {
                if let Ok(b) = select_branch(&exp, part, theta) {
                    let c = exp.terms[b.used_term_index].coeff;
                    let closed = branch_coefficient(&b, c).unwrap();
                    let tol = 1e-11 * b.prefactor.abs().max(1e-3);
                    prop_assert!((b.prefactor - closed).abs() <= tol);
                }
            }
        }
    }
}
