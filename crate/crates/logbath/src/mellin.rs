//! Mellin-transform diagnostics.
//!
//! The Mellin image of a density, `OmegaHat(s) = integral nu^(s-1) Omega dnu`,
//! and of the correlation components,
//!
//! ```text
//! XiHat1(s) = cos(pi s / 2) Gamma(s) OmegaHat_T(1 - s)
//! XiHat2(s) = sin(pi s / 2) Gamma(s) OmegaHat(1 - s)
//! ```
//!
//! turn the time-domain questions into decay questions along vertical
//! lines: how fast a profile falls off as |Im s| grows decides whether the
//! corresponding time-domain manipulation (termwise expansion, contour
//! shifting) was legitimate. This module computes the images numerically
//! for every density kind, in closed form where one exists, and fits decay
//! exponents along lines.
//!
//! The numeric transform reuses the split-domain strategy of the direct
//! quadrature: below nu = 1 the substitution nu = exp(-u) turns the factor
//! nu^s into a uniform oscillation exp(-i Im(s) u) under a real exponential
//! envelope, with the density's log folded into the exponent before a
//! single exp so nothing underflows prematurely. Above nu = 1 the integrand
//! decays and oscillates slowly, which geometric segments absorb.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{adaptive_panels, decaying_series, thermal_weight_u, QuadConfig};
use crate::sd::{SdKind, SpectralDensity};
use crate::special::{complex_gamma, coth, near_integer};

/// Which profile a decay fit ran on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileTarget {
    /// Mellin image of the density itself.
    OmegaHat,
    /// Image of the thermally weighted density.
    OmegaHatThermal,
    /// Image of the real correlation component.
    XiHat1,
    /// Image of the imaginary correlation component.
    XiHat2,
}

impl ProfileTarget {
    pub fn as_str(self) -> &'static str {
        match self {
            ProfileTarget::OmegaHat => "omega-hat",
            ProfileTarget::OmegaHatThermal => "omega-hat-thermal",
            ProfileTarget::XiHat1 => "xi-hat-1",
            ProfileTarget::XiHat2 => "xi-hat-2",
        }
    }
}

/// Decay profile along one vertical line, with the fitted exponent and the
/// verdict against the caller's threshold.
#[derive(Debug, Clone)]
pub struct MellinProfile {
    pub target: ProfileTarget,
    pub line_re: f64,
    pub im_grid: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Fitted decay exponent zeta in |value| ~ |Im s|^(-zeta).
    pub fitted_zeta: f64,
    /// Root-mean-square residual of the log-log fit.
    pub fit_rms: f64,
    pub threshold: f64,
    /// True when the fitted exponent clears the threshold.
    pub pass: bool,
    pub notes: Vec<String>,
}

// Strip bounds of the density image: the lower edge comes from the
// low-frequency power (shifted one down by the thermal weight), the upper
// edge from the tail exponent (only finite for tabulated kinds).
fn strip_check(sd: &SpectralDensity, re_s: f64, thermal: bool) -> Result<()> {
    let shift = if thermal { 1.0 } else { 0.0 };
    let lower = shift - sd.alpha0();
    if !(re_s > lower) {
        return Err(Error::OutOfStrip(format!(
            "Re(s) = {re_s} is at or below the lower strip edge {lower} \
             (low-frequency power {}, thermal shift {shift})",
            sd.alpha0()
        )));
    }
    let chi0 = sd.chi0();
    if chi0.is_finite() && !(re_s < 1.0 + chi0) {
        return Err(Error::OutOfStrip(format!(
            "Re(s) = {re_s} is at or above the upper strip edge {} set by the \
             declared tail exponent",
            1.0 + chi0
        )));
    }
    Ok(())
}

/// Closed-form density image `q Gamma(s + alpha) l^(-(s + alpha))`; exists
/// for the pure power-exponential shape only (no log factor).
///
/// This is the analytic continuation of the integral, valid on the whole
/// plane minus the poles of Gamma; it is deliberately not strip-checked so
/// pole locations and residues can be probed. At a pole the value is
/// non-finite.
pub fn mellin_closed_form(sd: &SpectralDensity, s: Complex64) -> Result<Complex64> {
    let (q, alpha, l) = match &sd.kind {
        SdKind::IntLog { q, alpha, l, n: 0 } => (*q, *alpha, *l),
        SdKind::RealLog { q, alpha, l, beta } if *beta == 0.0 => (*q, *alpha, *l),
        _ => {
            return Err(Error::UnsupportedKind(format!(
                "no closed-form Mellin image for this {} density; use the numeric route",
                sd.kind_name()
            )))
        }
    };
    let w = s + alpha;
    Ok(complex_gamma(w) * (-w * l.ln()).exp() * q)
}

// Shared numeric transform. `theta` Some(t) integrates the thermally
// weighted density.
fn omega_hat_impl(
    sd: &SpectralDensity,
    s: Complex64,
    theta: Option<f64>,
    cfg: &QuadConfig,
) -> Result<Complex64> {
    cfg.validate()?;
    if let Some(t) = theta {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!(
                "the thermal image needs theta > 0, got {t}"
            )));
        }
    }
    strip_check(sd, s.re, theta.is_some())?;
    let abs = cfg.abs_tol * 0.45;
    let rel = cfg.rel_tol * 0.25;

    // Piece below nu = 1: nu = exp(-u) gives
    //   integral_0^umax Omega(exp(-u)) exp(-s u) du
    // and the thermal weight contributes nu coth(nu / 2 theta) against one
    // power of nu removed from the exponent.
    let (re_s, im_s) = (s.re, s.im);
    let envelope: Box<dyn Fn(f64) -> f64 + '_> = match theta {
        None => Box::new(move |u: f64| (sd.ln_omega_at_exp_neg(u) - re_s * u).exp()),
        Some(t) => Box::new(move |u: f64| {
            thermal_weight_u(u, t) * (sd.ln_omega_at_exp_neg(u) + (1.0 - re_s) * u).exp()
        }),
    };
    let u_max = envelope_cutoff(&envelope, abs * 1e-2)?;
    let breaks = phase_breaks(im_s, u_max)?;
    let f_a = |u: f64| Complex64::from_polar(envelope(u), -im_s * u);
    let (a, ea) = adaptive_panels(&f_a, &breaks, abs, rel, 60_000)?;

    // Piece above nu = 1: power-times-density decay, slow oscillation in
    // ln nu; geometric segments with their own adaptivity.
    let f_b = |nu: f64| {
        let om = sd.omega(nu).unwrap_or(f64::NAN);
        let w = match theta {
            None => om,
            Some(t) => om * coth(nu / (2.0 * t)),
        };
        (Complex64::new(re_s - 1.0, im_s) * nu.ln()).exp() * w
    };
    let (b, eb) = decaying_series(&f_b, 1.0, abs, rel, 400)?;

    let total = a + b;
    let err = ea + eb;
    let floor = cfg.abs_tol.max(cfg.rel_tol * total.norm());
    if err > floor {
        return Err(Error::ToleranceNotMet {
            what: format!("Mellin transform at s = {re_s} + {im_s}i"),
            achieved: err,
            requested: floor,
        });
    }
    Ok(total)
}

/// Numeric density image at s, any kind, within the convergence strip.
pub fn mellin_numeric(sd: &SpectralDensity, s: Complex64, cfg: &QuadConfig) -> Result<Complex64> {
    omega_hat_impl(sd, s, None, cfg)
}

/// Numeric image of the thermally weighted density at theta > 0.
pub fn mellin_numeric_thermal(
    sd: &SpectralDensity,
    s: Complex64,
    theta: f64,
    cfg: &QuadConfig,
) -> Result<Complex64> {
    omega_hat_impl(sd, s, Some(theta), cfg)
}

// Density image preferring the closed form when one exists.
fn omega_hat_best(
    sd: &SpectralDensity,
    s: Complex64,
    theta: Option<f64>,
    cfg: &QuadConfig,
) -> Result<Complex64> {
    if theta.is_none() {
        match mellin_closed_form(sd, s) {
            Ok(v) => return Ok(v),
            Err(Error::UnsupportedKind(_)) => {}
            Err(e) => return Err(e),
        }
    }
    omega_hat_impl(sd, s, theta, cfg)
}

/// Oscillatory kernel of the real component, `cos(pi s / 2) Gamma(s)`.
pub fn xi1_kernel(s: Complex64) -> Complex64 {
    (PI * s / 2.0).cos() * complex_gamma(s)
}

/// Oscillatory kernel of the imaginary component, `sin(pi s / 2) Gamma(s)`.
pub fn xi2_kernel(s: Complex64) -> Complex64 {
    (PI * s / 2.0).sin() * complex_gamma(s)
}

/// Large-|Im s| modulus of both kernels:
/// `sqrt(pi/2) |Im s|^(Re s - 1/2)`. The ratio to the true modulus tends to
/// one from below as |Im s| grows.
pub fn kernel_modulus_asymptote(s: Complex64) -> f64 {
    (PI / 2.0).sqrt() * s.im.abs().powf(s.re - 0.5)
}

fn kernel_pole_check(s: Complex64) -> Result<()> {
    if s.im.abs() < 1e-8 {
        if let Some(k) = near_integer(s.re) {
            if k <= 0 {
                return Err(Error::Domain(format!(
                    "the kernel Gamma(s) has a pole at s = {k}"
                )));
            }
        }
    }
    Ok(())
}

/// Mellin image of the real correlation component at s. Uses the thermal
/// density image at theta > 0 and the plain one at theta = 0.
pub fn xi1_hat(sd: &SpectralDensity, s: Complex64, theta: f64, cfg: &QuadConfig) -> Result<Complex64> {
    kernel_pole_check(s)?;
    let t = if theta > 0.0 { Some(theta) } else { None };
    let oh = omega_hat_best(sd, Complex64::new(1.0, 0.0) - s, t, cfg)?;
    Ok(xi1_kernel(s) * oh)
}

/// Mellin image of the imaginary correlation component at s; the plain
/// density image enters regardless of temperature.
pub fn xi2_hat(sd: &SpectralDensity, s: Complex64, cfg: &QuadConfig) -> Result<Complex64> {
    kernel_pole_check(s)?;
    let oh = omega_hat_best(sd, Complex64::new(1.0, 0.0) - s, None, cfg)?;
    Ok(xi2_kernel(s) * oh)
}

// Cutoff search for the piece-below-one envelope; mirrors the low-frequency
// cutoff of the direct quadrature.
fn envelope_cutoff(envelope: &dyn Fn(f64) -> f64, cut: f64) -> Result<f64> {
    let mut u = 10.0;
    let mut hits = 0;
    while u < 2e5 {
        let v = envelope(u);
        if !v.is_finite() {
            return Err(Error::Divergent(format!("Mellin envelope not finite at u = {u}")));
        }
        if v * (10.0 + u) < cut {
            hits += 1;
            if hits >= 2 {
                return Ok(u);
            }
        } else {
            hits = 0;
        }
        u *= 1.35;
    }
    Err(Error::ToleranceNotMet {
        what: "Mellin envelope cutoff (decay too slow inside the declared strip)".into(),
        achieved: envelope(2e5),
        requested: cut,
    })
}

// Half-period breakpoints for the uniform phase exp(-i Im(s) u), geometric
// spacing when the line is real.
fn phase_breaks(im_s: f64, u_max: f64) -> Result<Vec<f64>> {
    let rate = im_s.abs();
    let mut bp = vec![0.0];
    if rate > 1e-12 {
        let h = PI / rate;
        let count = (u_max / h).ceil();
        if count > 2e6 {
            return Err(Error::ToleranceNotMet {
                what: "phase panel count for the Mellin line".into(),
                achieved: count,
                requested: 2e6,
            });
        }
        let mut k = 1u64;
        while (k as f64) * h < u_max {
            bp.push(k as f64 * h);
            k += 1;
        }
    } else {
        let mut step = 0.5;
        let mut g = step;
        while g < u_max {
            bp.push(g);
            step *= 2.0;
            g += step;
        }
    }
    bp.push(u_max);
    Ok(bp)
}

// Ordinary least squares of ln|v| against ln(im); returns (zeta, rms) with
// zeta the negated slope.
pub(crate) fn fit_loglog(im: &[f64], vals: &[Complex64]) -> Result<(f64, f64)> {
    let mut xs = Vec::with_capacity(im.len());
    let mut ys = Vec::with_capacity(im.len());
    for (&t, v) in im.iter().zip(vals) {
        if !(t > 0.0) {
            return Err(Error::Domain(format!(
                "decay fits need strictly positive Im(s) samples, got {t}"
            )));
        }
        let m = v.norm();
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::Divergent(format!(
                "profile modulus {m} at Im(s) = {t} cannot enter a log fit"
            )));
        }
        xs.push(t.ln());
        ys.push(m.ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::Domain("decay fit needs at least two distinct Im(s) values".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        let r = y - (intercept + slope * x);
        ss += r * r;
    }
    Ok((-slope, (ss / n).sqrt()))
}

/// Sample a profile along the vertical line `Re(s) = line_re` and fit its
/// decay exponent.
///
/// At least eight samples are required. `threshold` is the exponent the
/// profile must beat for `pass`; the caller chooses it from the hypothesis
/// being tested (integrability of the profile against the kernel).
pub fn decay_fit(
    sd: &SpectralDensity,
    target: ProfileTarget,
    line_re: f64,
    im_grid: &[f64],
    theta: f64,
    threshold: f64,
    cfg: &QuadConfig,
) -> Result<MellinProfile> {
    const MIN_SAMPLES: usize = 8;
    if im_grid.len() < MIN_SAMPLES {
        return Err(Error::InsufficientSamples { need: MIN_SAMPLES, got: im_grid.len() });
    }
    let mut values = Vec::with_capacity(im_grid.len());
    for &t in im_grid {
        let s = Complex64::new(line_re, t);
        let v = match target {
            ProfileTarget::OmegaHat => omega_hat_best(sd, s, None, cfg)?,
            ProfileTarget::OmegaHatThermal => omega_hat_impl(sd, s, Some(theta), cfg)?,
            ProfileTarget::XiHat1 => xi1_hat(sd, s, theta, cfg)?,
            ProfileTarget::XiHat2 => xi2_hat(sd, s, cfg)?,
        };
        values.push(v);
    }
    let (zeta, rms) = fit_loglog(im_grid, &values)?;
    let mut notes = vec![format!(
        "fit over {} samples on Re(s) = {line_re}, Im(s) in [{}, {}]",
        im_grid.len(),
        im_grid[0],
        im_grid[im_grid.len() - 1]
    )];
    if rms > 0.5 {
        notes.push(format!(
            "log-log residual rms {rms:.2} is large; the profile is far from a pure power"
        ));
    }
    Ok(MellinProfile {
        target,
        line_re,
        im_grid: im_grid.to_vec(),
        values,
        fitted_zeta: zeta,
        fit_rms: rms,
        threshold,
        pass: zeta > threshold,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::polygamma;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn ohmic() -> SpectralDensity {
        SpectralDensity::int_log(1.0, 1.0, 1.0, 0).unwrap()
    }

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn closed_form_values() {
        // q = 1, alpha = 1, l = 2 at s = 1: Gamma(2) / 4.
        let sd = SpectralDensity::int_log(1.0, 1.0, 2.0, 0).unwrap();
        let v = mellin_closed_form(&sd, Complex64::new(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(v.re, 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
        // Ohmic at s = 0.5: Gamma(1.5).
        let v = mellin_closed_form(&ohmic(), Complex64::new(0.5, 0.0)).unwrap();
        assert_relative_eq!(v.re, 0.5 * PI.sqrt(), max_relative = 1e-13);
        // A log factor has no closed form.
        let sd = SpectralDensity::int_log(1.0, 1.0, 1.0, 2).unwrap();
        assert!(matches!(
            mellin_closed_form(&sd, Complex64::new(1.0, 0.0)),
            Err(Error::UnsupportedKind(_))
        ));
    }

    #[test]
    fn numeric_transform_matches_closed_form() {
        for &(alpha, l) in &[(0.6, 0.7), (1.0, 1.0), (1.4, 2.0)] {
            let sd = SpectralDensity::int_log(1.0, alpha, l, 0).unwrap();
            for &s in &[
                Complex64::new(0.3, 0.0),
                Complex64::new(0.7, 5.0),
                Complex64::new(1.2, -5.0),
            ] {
                let num = mellin_numeric(&sd, s, &cfg()).unwrap();
                let exact = mellin_closed_form(&sd, s).unwrap();
                assert!(
                    (num - exact).norm() <= 1e-8 * exact.norm(),
                    "alpha={alpha} l={l} s={s}: {num} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn numeric_transform_handles_log_factors() {
        // Even log powers satisfy |ln nu|^2 = (ln nu)^2 on the whole axis,
        // so the image is an exact parameter derivative of the closed form:
        //   integral nu^(s-1+alpha) e^(-l nu) (ln nu)^2 dnu
        //     = d^2/dalpha^2 [Gamma(s+alpha) l^-(s+alpha)].
        let sd = SpectralDensity::int_log(1.0, 1.0, 1.5, 2).unwrap();
        let s = Complex64::new(0.8, 2.0);
        let num = mellin_numeric(&sd, s, &cfg()).unwrap();
        let h = 1e-4;
        let f = |da: f64| {
            let w = s + 1.0 + da;
            complex_gamma(w) * (-w * 1.5f64.ln()).exp()
        };
        let second = (f(h) - f(0.0) * 2.0 + f(-h)) / (h * h);
        assert!((num - second).norm() <= 1e-5 * second.norm());
    }

    #[test]
    fn thermal_transform_matches_moment_route() {
        // At integer s the thermal image is a thermal moment; the second
        // moment of the exponential density at theta = 1 has the closed
        // value 6 + 2 psi'''(2).
        let theta = 1.0;
        let v = mellin_numeric_thermal(&ohmic(), Complex64::new(3.0, 0.0), theta, &cfg()).unwrap();
        let exact = 6.0 + 2.0 * polygamma(3, 2.0);
        assert_relative_eq!(v.re, exact, max_relative = 1e-9);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn strip_edges_are_enforced() {
        let sd = ohmic();
        assert!(matches!(
            mellin_numeric(&sd, Complex64::new(-1.0, 0.0), &cfg()),
            Err(Error::OutOfStrip(_))
        ));
        // Thermal weight shifts the lower edge up by one.
        assert!(matches!(
            mellin_numeric_thermal(&sd, Complex64::new(-0.5, 0.0), 1.0, &cfg()),
            Err(Error::OutOfStrip(_))
        ));
        assert!(mellin_numeric_thermal(&sd, Complex64::new(0.5, 0.0), 1.0, &cfg()).is_ok());
        // Declared tail exponents cap the upper edge for tabulated kinds.
        let nu: Vec<f64> = (0..80).map(|i| 1e-3 * (1e3f64 / 1e-3).powf(i as f64 / 79.0)).collect();
        let om: Vec<f64> = nu.iter().map(|&v| v / (1.0 + v * v).powf(2.25)).collect();
        let tab = SpectralDensity::tabulated(&nu, &om, 1.0, 3.5).unwrap();
        assert!(matches!(
            mellin_numeric(&tab, Complex64::new(4.6, 0.0), &cfg()),
            Err(Error::OutOfStrip(_))
        ));
        assert!(mellin_numeric(&tab, Complex64::new(2.0, 0.0), &cfg()).is_ok());
    }

    #[test]
    fn component_images_match_classic_values() {
        // Ohmic: OmegaHat(w) = Gamma(1 + w), so
        // XiHat2(1/2) = sin(pi/4) Gamma(1/2) Gamma(3/2) = pi sqrt(2) / 4
        // XiHat1(3/2) = cos(3 pi/4) Gamma(3/2) Gamma(1/2) = -pi sqrt(2) / 4.
        let v = xi2_hat(&ohmic(), Complex64::new(0.5, 0.0), &cfg()).unwrap();
        assert_relative_eq!(v.re, PI * 2.0f64.sqrt() / 4.0, max_relative = 1e-12);
        let v = xi1_hat(&ohmic(), Complex64::new(1.5, 0.0), 0.0, &cfg()).unwrap();
        assert_relative_eq!(v.re, -PI * 2.0f64.sqrt() / 4.0, max_relative = 1e-12);
        // Gamma pole guard.
        assert!(matches!(
            xi2_hat(&ohmic(), Complex64::new(0.0, 0.0), &cfg()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn kernel_modulus_approaches_its_asymptote() {
        let mut prev_ratio = 0.0;
        for &t in &[20.0, 30.0, 40.0, 60.0] {
            let s = Complex64::new(0.7, t);
            let ratio = xi1_kernel(s).norm() / kernel_modulus_asymptote(s);
            assert!((ratio - 1.0).abs() < 0.02, "t={t}: ratio {ratio}");
            assert!(ratio > prev_ratio, "ratio must increase toward 1");
            prev_ratio = ratio;
        }
        // The sine kernel shares the modulus law.
        let s = Complex64::new(0.3, 25.0);
        let ratio = xi2_kernel(s).norm() / kernel_modulus_asymptote(s);
        assert!((ratio - 1.0).abs() < 0.02);
    }

    #[test]
    fn imaginary_component_pole_matches_long_time_law() {
        // XiHat2 for the exponential density has a simple pole at s = 3
        // whose residue, negated by the contour shift, must equal the
        // coefficient of tau^-3 in the long-time law.
        let sd = ohmic();
        let eps = 1e-6;
        let s = Complex64::new(3.0 - eps, 0.0);
        let v = xi2_kernel(s) * mellin_closed_form(&sd, Complex64::new(1.0, 0.0) - s).unwrap();
        let residue = (v * Complex64::new(-eps, 0.0)).re;
        assert_relative_eq!(residue, -2.0, max_relative = 1e-4);
        let exp = sd.low_freq_expansion(4).unwrap();
        let b = crate::asymptotic::select_branch(&exp, crate::asymptotic::Part::C2, 0.0).unwrap();
        assert_eq!(-b.prefactor, -2.0);
        assert_abs_diff_eq!(residue, -b.prefactor, epsilon = 1e-3);
    }

    #[test]
    fn loglog_fit_recovers_synthetic_exponents() {
        let im: Vec<f64> = (0..12).map(|i| 5.0 * 1.4f64.powi(i)).collect();
        let vals: Vec<Complex64> = im
            .iter()
            .map(|&t| Complex64::from_polar(3.0 * t.powf(-1.3), 0.4 * t))
            .collect();
        let (zeta, rms) = fit_loglog(&im, &vals).unwrap();
        assert_relative_eq!(zeta, 1.3, max_relative = 1e-12);
        assert!(rms < 1e-12);
    }

    #[test]
    fn decay_fit_runs_end_to_end() {
        let im: Vec<f64> = (0..10).map(|i| 2.0 + 2.0 * i as f64).collect();
        let p = decay_fit(&ohmic(), ProfileTarget::OmegaHat, 0.5, &im, 0.0, 0.5, &cfg()).unwrap();
        // Gamma decays super-polynomially along vertical lines, so the
        // fitted exponent clears any fixed threshold.
        assert!(p.pass);
        assert!(p.fitted_zeta > 0.5);
        assert_eq!(p.values.len(), 10);
        assert!(matches!(
            decay_fit(&ohmic(), ProfileTarget::OmegaHat, 0.5, &im[..5], 0.0, 0.5, &cfg()),
            Err(Error::InsufficientSamples { need: 8, got: 5 })
        ));
    }

    #[test]
    fn tabulated_image_tracks_the_generating_density() {
        // Table sampled from the exponential density: its numeric image
        // must sit close to Gamma(s + 1) within the grid's fidelity.
        let nu: Vec<f64> = (0..160).map(|i| 1e-4 * (60.0f64 / 1e-4).powf(i as f64 / 159.0)).collect();
        let om: Vec<f64> = nu.iter().map(|&v| v * (-v).exp()).collect();
        let tab = SpectralDensity::tabulated(&nu, &om, 1.0, 40.0).unwrap();
        for &s in &[Complex64::new(0.8, 0.0), Complex64::new(0.5, 3.0)] {
            let v = mellin_numeric(&tab, s, &cfg()).unwrap();
            let exact = complex_gamma(s + 1.0);
            assert!(
                (v - exact).norm() <= 2e-3 * exact.norm(),
                "s={s}: {v} vs {exact}"
            );
        }
    }
}
