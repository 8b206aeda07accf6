//! Direct quadrature of the correlation integrals.
//!
//! The oscillatory integrals
//!
//! ```text
//! xi1(tau) = integral Omega(nu) coth(nu / 2 theta) cos(nu tau) dnu
//! xi2(tau) = integral Omega(nu) sin(nu tau) dnu
//! ```
//!
//! are split at `nu_c = split_point` (default 1). On `(0, nu_c]` the
//! substitution `nu = exp(-u)` linearizes the logarithmic factors; panels are
//! pre-split at the phase half-periods `u_k = ln(tau / k pi)` and refined
//! adaptively with a Gauss-Kronrod 15-point rule. On `[nu_c, inf)` the
//! integral is summed over half-period panels and the partial sums are
//! accelerated with Wynn's epsilon algorithm, which handles both alternating
//! slow-decay tails and plainly absolutely convergent ones.
//!
//! At theta = 0 a single complex pass `integral Omega exp(i nu tau)` yields
//! both components; at theta > 0 the two components carry different weights
//! and are integrated separately.

use crate::error::{Error, Result};
use crate::sd::SpectralDensity;
use crate::special::coth;
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

/// Tolerances and domain-control knobs for the direct evaluators.
#[derive(Debug, Clone)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Largest tau the direct route accepts; beyond it the long-time laws
    /// take over.
    pub tau_max_direct: f64,
    /// Split frequency nu_c in (0, 1] separating the log-linearized piece
    /// from the tail piece.
    pub split_point: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { abs_tol: 1e-10, rel_tol: 1e-8, tau_max_direct: 1e4, split_point: 1.0 }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol >= 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if !(self.split_point > 0.0 && self.split_point <= 1.0) {
            return Err(Error::Config(format!(
                "split_point must lie in (0, 1], got {}",
                self.split_point
            )));
        }
        if !(self.tau_max_direct > 0.0) {
            return Err(Error::Config("tau_max_direct must be positive".into()));
        }
        Ok(())
    }
}

/// One evaluated point of the correlation pair. `xi2` stores the positive
/// sine transform, i.e. minus the imaginary part of the correlation function.
#[derive(Debug, Clone, Copy)]
pub struct BcfSample {
    pub tau: f64,
    pub xi1: f64,
    pub xi2: f64,
    pub err1: f64,
    pub err2: f64,
}

/// Values a quadrature rule can accumulate.
pub trait QuadValue: Copy + Send + Sync {
    fn zero() -> Self;
    fn add(self, o: Self) -> Self;
    fn sub(self, o: Self) -> Self;
    fn scale(self, c: f64) -> Self;
    fn norm(self) -> f64;
    fn inv(self) -> Self;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn scale(self, c: f64) -> Self {
        self * c
    }
    fn norm(self) -> f64 {
        self.abs()
    }
    fn inv(self) -> Self {
        1.0 / self
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn scale(self, c: f64) -> Self {
        self * c
    }
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
    fn inv(self) -> Self {
        Complex64::new(1.0, 0.0) / self
    }
}

// Gauss-Kronrod 15-point nodes and weights on [-1, 1]; the embedded 7-point
// Gauss rule lives on the odd-index nodes plus the center.
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

/// One GK15 panel: returns (integral, error bound, integral of |f|).
fn gk15<T: QuadValue>(f: &dyn Fn(f64) -> T, a: f64, b: f64) -> (T, f64, f64) {
    let hw = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    let fc = f(c);
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    let mut k = fc.scale(WGK[7]);
    let mut g = fc.scale(WG[3]);
    let mut resabs = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = hw * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let pair = f1.add(f2);
        k = k.add(pair.scale(WGK[j]));
        resabs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            g = g.add(pair.scale(WG[j / 2]));
        }
    }
    let k15 = k.scale(hw);
    let g7 = g.scale(hw);
    resabs *= hw.abs();
    let mean = k15.scale(1.0 / (b - a));
    let mut resasc = fc.sub(mean).norm() * WGK[7];
    for j in 0..7 {
        resasc += (fv1[j].sub(mean).norm() + fv2[j].sub(mean).norm()) * WGK[j];
    }
    resasc *= hw.abs();
    let raw = k15.sub(g7).norm();
    let mut err = raw;
    if resasc != 0.0 && raw != 0.0 {
        err = resasc * (200.0 * raw / resasc).powf(1.5).min(1.0);
    }
    err = err.max(50.0 * f64::EPSILON * resabs);
    (k15, err, resabs)
}

struct Panel<T> {
    err: f64,
    a: f64,
    b: f64,
    val: T,
    resabs: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.partial_cmp(&o.err).unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// Globally adaptive integration over a pre-split breakpoint list: the panel
/// with the worst error bound is bisected until the summed bound meets
/// `max(abs_tol, rel_tol * |I|)` or the split budget runs out.
pub(crate) fn adaptive_panels<T: QuadValue>(
    f: &dyn Fn(f64) -> T,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_splits: usize,
) -> Result<(T, f64)> {
    debug_assert!(breaks.len() >= 2);
    let mut heap: BinaryHeap<Panel<T>> = BinaryHeap::with_capacity(breaks.len() + 64);
    let mut total = T::zero();
    let mut err_sum = 0.0;
    let mut resabs_sum = 0.0;
    let mut stuck_err = 0.0;
    for w in breaks.windows(2) {
        if !(w[1] > w[0]) {
            continue;
        }
        let (v, e, ra) = gk15(f, w[0], w[1]);
        if !v.norm().is_finite() {
            return Err(Error::Divergent(format!(
                "integrand not finite on panel [{:.6e}, {:.6e}]",
                w[0], w[1]
            )));
        }
        total = total.add(v);
        err_sum += e;
        resabs_sum += ra;
        heap.push(Panel { err: e, a: w[0], b: w[1], val: v, resabs: ra });
    }
    let mut splits = 0;
    loop {
        // Must match the per-panel error floor in gk15: reported errors never
        // sum below 50 eps resabs, so a tighter acceptance here cannot converge.
        let floor = 50.0 * f64::EPSILON * resabs_sum;
        let target = abs_tol.max(rel_tol * total.norm()).max(floor);
        // err_sum is accumulated incrementally, so when every panel sits on
        // its roundoff floor the two sides can disagree by an ulp.
        if err_sum + stuck_err <= target * (1.0 + 1e-9) {
            return Ok((total, err_sum + stuck_err));
        }
        if splits >= max_splits {
            return Err(Error::ToleranceNotMet {
                what: "adaptive panel refinement".into(),
                achieved: err_sum + stuck_err,
                requested: target,
            });
        }
        let Some(worst) = heap.pop() else {
            // Every panel is stuck at the width floor.
            if stuck_err <= 10.0 * target {
                return Ok((total, stuck_err));
            }
            return Err(Error::ToleranceNotMet {
                what: "adaptive panel refinement".into(),
                achieved: stuck_err,
                requested: target,
            });
        };
        let width_floor = 1e-14 * (1.0 + worst.a.abs().max(worst.b.abs()));
        if worst.b - worst.a <= width_floor {
            stuck_err += worst.err;
            err_sum -= worst.err;
            continue;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1, r1) = gk15(f, worst.a, mid);
        let (v2, e2, r2) = gk15(f, mid, worst.b);
        if !v1.norm().is_finite() || !v2.norm().is_finite() {
            return Err(Error::Divergent(format!(
                "integrand not finite near {:.6e}",
                mid
            )));
        }
        total = total.add(v1).add(v2).sub(worst.val);
        err_sum += e1 + e2 - worst.err;
        resabs_sum += r1 + r2 - worst.resabs;
        heap.push(Panel { err: e1, a: worst.a, b: mid, val: v1, resabs: r1 });
        heap.push(Panel { err: e2, a: mid, b: worst.b, val: v2, resabs: r2 });
        splits += 1;
    }
}

/// In-place Wynn epsilon update. `diag` holds the rising diagonal of the
/// epsilon table; returns the current best (highest even-order) estimate.
fn wynn_update<T: QuadValue>(diag: &mut Vec<T>, s_new: T) -> T {
    let old = diag.clone();
    diag.push(T::zero());
    diag[0] = s_new;
    for j in 1..diag.len() {
        let denom = diag[j - 1].sub(old[j - 1]);
        let jm2 = if j >= 2 { old[j - 2] } else { T::zero() };
        let d = denom.norm();
        diag[j] = if d < 1e-300 || !d.is_finite() {
            jm2
        } else {
            jm2.add(denom.inv())
        };
    }
    let m = diag.len() - 1;
    let j_star = m - (m % 2);
    diag[j_star]
}

/// Sums `integral f` over consecutive panels of fixed `width` starting at
/// `start`, accelerating the partial sums with the epsilon algorithm.
///
/// Converges for alternating half-period contributions with slowly decaying
/// envelopes as well as for absolutely convergent tails, which exit through
/// a plain small-increment test.
pub(crate) fn oscillatory_series<T: QuadValue>(
    f: &dyn Fn(f64) -> T,
    start: f64,
    width: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<(T, f64)> {
    let mut partial = T::zero();
    let mut diag: Vec<T> = Vec::new();
    let mut gk_err = 0.0;
    let mut abs_accum = 0.0;
    let mut small_run = 0;
    let mut prev_est: Option<T> = None;
    let mut prev_diff = f64::INFINITY;
    let share = (abs_tol * 0.02).max(1e-300);
    for m in 0..max_panels {
        let a = start + m as f64 * width;
        let (v, e) = adaptive_panels(f, &[a, a + width], share, 0.0, 60)?;
        partial = partial.add(v);
        gk_err += e;
        abs_accum += v.norm();
        let floor = 4.0 * f64::EPSILON * abs_accum;
        let tol_here = abs_tol.max(rel_tol * partial.norm()).max(floor);
        if v.norm() < 0.02 * tol_here {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 2 && m >= 3 {
            return Ok((partial, gk_err + v.norm()));
        }
        let est = wynn_update(&mut diag, partial);
        let est = if est.norm().is_finite() { est } else { partial };
        if let Some(p) = prev_est {
            let diff = est.sub(p).norm();
            if m >= 10 && diff < 0.5 * tol_here && prev_diff < tol_here {
                return Ok((est, gk_err + diff + 0.5 * prev_diff));
            }
            prev_diff = diff;
        }
        prev_est = Some(est);
    }
    Err(Error::ToleranceNotMet {
        what: "epsilon-accelerated tail".into(),
        achieved: prev_diff,
        requested: abs_tol,
    })
}

/// Integrates a decaying non-oscillatory tail on `[start, inf)` with
/// geometrically widening segments.
pub(crate) fn decaying_series<T: QuadValue>(
    f: &dyn Fn(f64) -> T,
    start: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Result<(T, f64)> {
    let mut a = start;
    let mut w = start.abs().max(1.0);
    let mut total = T::zero();
    let mut err = 0.0;
    let mut small_run = 0;
    for _ in 0..max_segments {
        let b = a + w;
        let (v, e) = adaptive_panels(f, &[a, b], abs_tol * 0.05, rel_tol * 0.1, 400)?;
        total = total.add(v);
        err += e;
        let tol_here = abs_tol.max(rel_tol * total.norm());
        if v.norm() < 0.05 * tol_here {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 2 {
            // Geometric-remainder allowance for slowly decaying power tails.
            return Ok((total, err + 6.0 * v.norm()));
        }
        a = b;
        w *= 3.0;
    }
    Err(Error::ToleranceNotMet {
        what: "decaying tail".into(),
        achieved: err,
        requested: abs_tol,
    })
}

/// Thermal low-frequency weight `exp(-u) coth(exp(-u) / 2 theta)`, the
/// Jacobian-folded form that stays bounded for arbitrarily large u.
pub(crate) fn thermal_weight_u(u: f64, theta: f64) -> f64 {
    let nu = (-u).exp();
    let x = nu / (2.0 * theta);
    if x >= 20.0 {
        nu
    } else if x < 1e-3 {
        // nu coth(x) = 2 theta + nu^2/(6 theta) - nu^4/(360 theta^3)
        let t3 = theta * theta * theta;
        2.0 * theta + nu * nu / (6.0 * theta) - nu.powi(4) / (360.0 * t3)
    } else {
        nu * (1.0 + 2.0 / (2.0 * x).exp_m1())
    }
}

/// Finds a cutoff u beyond which `weight(u) * (10 + u)` stays under `cut`.
fn umax_search(weight: &dyn Fn(f64) -> f64, u_start: f64, cut: f64) -> Result<f64> {
    let mut u = u_start + 10.0;
    let mut hits = 0;
    while u < 2e5 {
        let v = weight(u);
        if !v.is_finite() {
            return Err(Error::Divergent(format!("low-frequency weight not finite at u = {u}")));
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
        what: "low-frequency cutoff search (weight decays too slowly)".into(),
        achieved: weight(2e5),
        requested: cut,
    })
}

/// Breakpoints for the log-substituted piece: phase half-periods while the
/// oscillation is fast, geometric spacing through the smooth remainder.
fn piece_a_breaks(tau: f64, u_start: f64, u_max: f64) -> Vec<f64> {
    let mut bp = vec![u_start];
    let mut top = u_start;
    if tau > 0.0 {
        let phase_start = tau * (-u_start).exp();
        let kmax = (phase_start / PI).floor() as i64;
        for k in (1..=kmax).rev() {
            let u = (tau / (k as f64 * PI)).ln();
            if u > u_start + 1e-12 && u < u_max {
                bp.push(u);
                top = u;
            }
        }
    }
    let mut step = 0.5;
    let mut g = top + step;
    while g < u_max {
        bp.push(g);
        step *= 2.0;
        g = g + step;
    }
    bp.push(u_max);
    bp
}

struct PieceTols {
    abs: f64,
    rel: f64,
}

/// Integrates `f(u)` over `[u_start, u_max]` with `weight` steering the
/// cutoff search, where the integrand oscillates as `cos/sin(tau exp(-u))`.
fn piece_a<T: QuadValue>(
    f: &dyn Fn(f64) -> T,
    weight: &dyn Fn(f64) -> f64,
    tau: f64,
    u_start: f64,
    t: &PieceTols,
) -> Result<(T, f64)> {
    let u_max = umax_search(weight, u_start, t.abs * 1e-2)?;
    let bp = piece_a_breaks(tau, u_start, u_max);
    adaptive_panels(f, &bp, t.abs, t.rel, 60_000)
}

/// Integrates `f(nu)` over `[nu_c, inf)` where the integrand oscillates with
/// angular rate `tau` (or decays monotonically for tau = 0).
fn piece_b<T: QuadValue>(
    f: &dyn Fn(f64) -> T,
    nu_c: f64,
    tau: f64,
    t: &PieceTols,
) -> Result<(T, f64)> {
    if tau == 0.0 {
        decaying_series(f, nu_c, t.abs, t.rel, 400)
    } else {
        let width = (PI / tau).min(1.0);
        oscillatory_series(f, nu_c, width, t.abs, t.rel, 4000)
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta >= 0.0) || !theta.is_finite() {
        return Err(Error::Domain(format!("theta must be non-negative and finite, got {theta}")));
    }
    Ok(())
}

/// p-th spectral moment `integral nu^p Omega dnu`, with the thermal weight
/// `coth(nu / 2 theta)` applied to even orders only: even moments feed the
/// cosine component, odd moments the sine component, which carries no coth.
pub fn moment(sd: &SpectralDensity, p: u32, theta: f64) -> Result<f64> {
    moment_impl(sd, p, theta, 1e-13, 3e-12).map(|(v, _)| v)
}

pub(crate) fn moment_impl(
    sd: &SpectralDensity,
    p: u32,
    theta: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    if p > 12 {
        return Err(Error::Domain(format!("moment order must be at most 12, got {p}")));
    }
    check_theta(theta)?;
    if sd.chi0() <= p as f64 {
        return Err(Error::Precondition(format!(
            "moment of order {p} needs tail exponent chi0 > {p}; declared chi0 = {}",
            sd.chi0()
        )));
    }
    let thermal = theta > 0.0 && p % 2 == 0;
    let pf = p as f64;
    let tols = PieceTols { abs: abs_tol * 0.45, rel: rel_tol * 0.45 };
    let f_a = move |u: f64| -> f64 {
        let w = if thermal {
            sd.omega_at_exp_neg(u) * thermal_weight_u(u, theta)
        } else {
            sd.omega_at_exp_neg(u) * (-u).exp()
        };
        w * (-pf * u).exp()
    };
    let (a_val, a_err) = piece_a(&f_a, &f_a, 0.0, 0.0, &tols)?;
    let f_b = move |nu: f64| -> f64 {
        let w = if thermal {
            coth(nu / (2.0 * theta))
        } else {
            1.0
        };
        nu.powf(pf) * sd.omega(nu).unwrap_or(f64::NAN) * w
    };
    let (b_val, b_err) = decaying_series(&f_b, 1.0, tols.abs, tols.rel, 400)?;
    Ok((a_val + b_val, a_err + b_err))
}

fn compute_one(sd: &SpectralDensity, theta: f64, tau: f64, cfg: &QuadConfig) -> Result<BcfSample> {
    if !tau.is_finite() || tau < 0.0 {
        return Err(Error::Domain(format!("tau must be non-negative and finite, got {tau}")));
    }
    if tau > cfg.tau_max_direct {
        return Err(Error::TauOutOfRange { tau, max: cfg.tau_max_direct });
    }
    if tau == 0.0 {
        let (m0, e0) = moment_impl(sd, 0, theta, cfg.abs_tol * 0.5, cfg.rel_tol * 0.5)?;
        return Ok(BcfSample { tau, xi1: m0, xi2: 0.0, err1: e0, err2: 0.0 });
    }
    let nu_c = cfg.split_point;
    let u_start = -nu_c.ln();
    let tols = PieceTols { abs: cfg.abs_tol * 0.45, rel: cfg.rel_tol * 0.25 };
    if theta == 0.0 {
        let weight = move |u: f64| sd.omega_at_exp_neg(u) * (-u).exp();
        let f_a = move |u: f64| Complex64::from_polar(weight(u), tau * (-u).exp());
        let (a_val, a_err) = piece_a(&f_a, &weight, tau, u_start, &tols)?;
        let f_b = move |nu: f64| Complex64::from_polar(sd.omega(nu).unwrap_or(f64::NAN), tau * nu);
        let (b_val, b_err) = piece_b(&f_b, nu_c, tau, &tols)?;
        let v = a_val + b_val;
        let err = a_err + b_err;
        Ok(BcfSample { tau, xi1: v.re, xi2: v.im, err1: err, err2: err })
    } else {
        let w1 = move |u: f64| sd.omega_at_exp_neg(u) * thermal_weight_u(u, theta);
        let f_a1 = move |u: f64| w1(u) * (tau * (-u).exp()).cos();
        let (a1, ea1) = piece_a(&f_a1, &w1, tau, u_start, &tols)?;
        let f_b1 = move |nu: f64| {
            sd.omega(nu).unwrap_or(f64::NAN) * coth(nu / (2.0 * theta)) * (tau * nu).cos()
        };
        let (b1, eb1) = piece_b(&f_b1, nu_c, tau, &tols)?;
        let w2 = move |u: f64| sd.omega_at_exp_neg(u) * (-u).exp();
        let f_a2 = move |u: f64| w2(u) * (tau * (-u).exp()).sin();
        let (a2, ea2) = piece_a(&f_a2, &w2, tau, u_start, &tols)?;
        let f_b2 = move |nu: f64| sd.omega(nu).unwrap_or(f64::NAN) * (tau * nu).sin();
        let (b2, eb2) = piece_b(&f_b2, nu_c, tau, &tols)?;
        Ok(BcfSample { tau, xi1: a1 + b1, xi2: a2 + b2, err1: ea1 + eb1, err2: ea2 + eb2 })
    }
}

/// Evaluates both correlation components on a tau grid by direct quadrature.
///
/// Errors with `TauOutOfRange` beyond `cfg.tau_max_direct`. Results come
/// back in input order; the grid is evaluated in parallel.
pub fn bcf_numeric(
    sd: &SpectralDensity,
    theta: f64,
    taus: &[f64],
    cfg: &QuadConfig,
) -> Result<Vec<BcfSample>> {
    cfg.validate()?;
    check_theta(theta)?;
    taus.par_iter()
        .map(|&tau| compute_one(sd, theta, tau, cfg))
        .collect()
}

/// Zero-temperature reference route for integer-log densities with even n:
/// rotates the Fourier integral onto the imaginary axis, turning it into a
/// damped non-oscillatory one,
///
/// ```text
/// xi1 + i xi2 = i * integral_0^inf Omega_rot(u) exp(-u tau) du,
/// Omega_rot(u) = q u^alpha e^{i pi alpha / 2} e^{-i l u} (ln u + i pi/2)^n.
/// ```
///
/// Valid for tau > l, where the rotated contour closes. Serves as an
/// independent cross-check of [`bcf_numeric`]; the two share no quadrature
/// path beyond the scalar panel rule.
pub fn fourier_tail_oracle(sd: &SpectralDensity, tau: f64) -> Result<Complex64> {
    let (q, alpha, l, n) = match &sd.kind {
        crate::sd::SdKind::IntLog { q, alpha, l, n } if n % 2 == 0 => (*q, *alpha, *l, *n),
        crate::sd::SdKind::IntLog { .. } => {
            return Err(Error::UnsupportedKind(
                "rotated-contour route needs an even log power".into(),
            ))
        }
        _ => {
            return Err(Error::UnsupportedKind(
                "rotated-contour route is defined for integer-log densities only".into(),
            ))
        }
    };
    if !(tau > l) {
        return Err(Error::Precondition(format!(
            "rotated-contour route needs tau > l (tau = {tau}, l = {l})"
        )));
    }
    let tols = PieceTols { abs: 5e-13, rel: 5e-12 };
    // Piece (0, 1] under u = exp(-v).
    let rot = Complex64::from_polar(1.0, 0.5 * PI * alpha);
    let f_a = move |v: f64| -> Complex64 {
        let u = (-v).exp();
        let amp = q * (-(1.0 + alpha) * v - u * tau).exp();
        let logf = Complex64::new(-v, 0.5 * PI).powu(n);
        Complex64::from_polar(amp, -l * u) * rot * logf
    };
    let weight_a = move |v: f64| {
        q * (-(1.0 + alpha) * v - (-v).exp() * tau).exp() * (v * v + 2.47).powf(0.5 * n as f64)
    };
    let u_max = umax_search(&weight_a, 0.0, tols.abs * 1e-2)?;
    let mut bp = vec![0.0];
    // Phase points of exp(-i l exp(-v)) while l exp(-v) > pi.
    let kmax = (l / PI).floor() as i64;
    for k in (1..=kmax).rev() {
        let v = (l / (k as f64 * PI)).ln();
        if v > 1e-12 && v < u_max {
            bp.push(v);
        }
    }
    // The damping factor exp(-tau exp(-v)) turns on near v = ln tau.
    let vc = tau.max(1.0).ln();
    for d in [-1.0, 0.0, 1.0, 2.0] {
        let v = vc + d;
        if v > 1e-9 && v < u_max {
            bp.push(v);
        }
    }
    bp.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut step = 0.5;
    let mut g = bp.last().unwrap() + step;
    while g < u_max {
        bp.push(g);
        step *= 2.0;
        g += step;
    }
    bp.push(u_max);
    let (a_val, _) = adaptive_panels(&f_a, &bp, tols.abs, tols.rel, 20_000)?;
    // Piece [1, inf): exponential decay at rate tau, phase rate l < tau.
    let f_b = move |u: f64| -> Complex64 {
        let amp = q * u.powf(alpha) * (-u * tau).exp();
        let logf = Complex64::new(u.ln(), 0.5 * PI).powu(n);
        Complex64::from_polar(amp, 0.5 * PI * alpha - l * u) * logf
    };
    let width = (PI / l.max(1.0)).min(1.0);
    let (b_val, _) = oscillatory_series(&f_b, 1.0, width, tols.abs, tols.rel, 2000)?;
    Ok(Complex64::new(0.0, 1.0) * (a_val + b_val))
}
