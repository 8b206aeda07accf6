//! Spectral-density families and their low-frequency structure.
//!
//! Three kinds are supported:
//!
//! * integer-log: `q nu^alpha exp(-l nu) |ln nu|^n` with integer n >= 0,
//! * real-log: `q nu^alpha exp(-l nu) (ln(e + 1/nu))^beta` with real beta,
//! * tabulated: monotone cubic interpolation of `(nu, Omega)` samples in
//!   log-log space with power-law extension beyond the grid on both sides.
//!
//! Every kind vanishes at nu = 0 and requires q > 0, alpha > 0, l > 0.
//! A real-log density with beta = 0 is classified together with the
//! integer-log n = 0 case since the two formulas coincide identically.

use crate::error::{Error, Result};
use crate::special::factorial;

/// Upper bound on the log powers n and |beta|; keeps the factorial and
/// binomial weights in the expansion machinery well inside f64 range.
pub const MAX_LOG_POW: f64 = 12.0;

/// Expansion length used by the evaluators when the caller has no opinion.
pub const DEFAULT_EXPANSION_TERMS: usize = 8;

/// A spectral density together with the sampling frequency used to
/// re-dimensionalize outputs. `omega_s` never enters any computation here;
/// it is echoed as metadata by the CLI layer.
#[derive(Debug, Clone)]
pub struct SpectralDensity {
    pub kind: SdKind,
    pub omega_s: f64,
}

#[derive(Debug, Clone)]
pub enum SdKind {
    IntLog { q: f64, alpha: f64, l: f64, n: u32 },
    RealLog { q: f64, alpha: f64, l: f64, beta: f64 },
    Tabulated(TabulatedSd),
}

/// Log-log interpolated density with declared exponents for both
/// extrapolation directions. The declared values are taken on trust; see
/// [`SpectralDensity::check_conditions`], which flags them as unverified.
#[derive(Debug, Clone)]
pub struct TabulatedSd {
    ln_nu: Vec<f64>,
    ln_omega: Vec<f64>,
    slope: Vec<f64>,
    /// Declared power of nu as nu -> 0; used below the first grid point.
    pub alpha0: f64,
    /// Declared tail exponent: Omega ~ nu^(-1-chi0) above the last grid point.
    pub chi0: f64,
}

/// One term `coeff * nu^power * logfactor^log_pow` of a low-frequency
/// expansion. For the first class the log factor is `(-ln nu)` with integer
/// `log_pow`; for the second class it is `ln(e + 1/nu)` with real `log_pow`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionTerm {
    pub power: f64,
    pub log_pow: f64,
    pub coeff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionClass {
    /// Integer power of |ln nu|; covers integer-log densities and beta = 0.
    IntegerLog,
    /// Real power of ln(e + 1/nu).
    RealLog,
}

#[derive(Debug, Clone)]
pub struct LowFreqExpansion {
    pub class: ExpansionClass,
    pub terms: Vec<ExpansionTerm>,
}

/// Summability facts the evaluators gate on.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    /// Thermal zeroth moment converged; always true for constructible
    /// densities, kept as a field so failures surface as data, not panics.
    pub thermal_finite: bool,
    /// Value of the thermal zeroth moment when finite.
    pub thermal_value: Option<f64>,
    /// Tail of Omega is integrable (guaranteed by construction; tabulated
    /// kinds rely on the declared chi0).
    pub tail_summable: bool,
    /// Second moment exists, so the quadratic short-time term is valid.
    pub short_time_quadratic_ok: bool,
    /// First moment exists, so the linear short-time term is valid.
    pub short_time_linear_ok: bool,
    pub notes: Vec<String>,
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

// Shared carrier q nu^alpha exp(-l nu). Both canonical kinds multiply this
// by their log factor, which makes the n = 0 and beta = 0 cases bit-identical.
fn carrier(q: f64, alpha: f64, l: f64, nu: f64) -> f64 {
    q * nu.powf(alpha) * (-l * nu).exp()
}

fn ln_abs_pow_int(nu: f64, n: u32) -> f64 {
    if n == 0 {
        return 1.0;
    }
    nu.ln().abs().powi(n as i32)
}

fn ln_shift_pow(nu: f64, beta: f64) -> f64 {
    if beta == 0.0 {
        return 1.0;
    }
    (std::f64::consts::E + 1.0 / nu).ln().powf(beta)
}

impl SpectralDensity {
    /// Integer-log density `q nu^alpha exp(-l nu) |ln nu|^n`.
    pub fn int_log(q: f64, alpha: f64, l: f64, n: u32) -> Result<Self> {
        require_positive("q", q)?;
        require_positive("alpha", alpha)?;
        require_positive("l", l)?;
        if n as f64 > MAX_LOG_POW {
            return Err(Error::Domain(format!("log power n = {n} exceeds the supported cap {MAX_LOG_POW}")));
        }
        Ok(SpectralDensity { kind: SdKind::IntLog { q, alpha, l, n }, omega_s: 1.0 })
    }

    /// Real-log density `q nu^alpha exp(-l nu) (ln(e + 1/nu))^beta`.
    pub fn real_log(q: f64, alpha: f64, l: f64, beta: f64) -> Result<Self> {
        require_positive("q", q)?;
        require_positive("alpha", alpha)?;
        require_positive("l", l)?;
        if !beta.is_finite() || beta.abs() > MAX_LOG_POW {
            return Err(Error::Domain(format!("log power beta = {beta} exceeds the supported cap {MAX_LOG_POW}")));
        }
        Ok(SpectralDensity { kind: SdKind::RealLog { q, alpha, l, beta }, omega_s: 1.0 })
    }

    /// Tabulated density from positive samples, with declared low-frequency
    /// power `alpha0` and tail exponent `chi0`.
    pub fn tabulated(nu: &[f64], omega: &[f64], alpha0: f64, chi0: f64) -> Result<Self> {
        Ok(SpectralDensity {
            kind: SdKind::Tabulated(TabulatedSd::new(nu, omega, alpha0, chi0)?),
            omega_s: 1.0,
        })
    }

    pub fn with_omega_s(mut self, omega_s: f64) -> Result<Self> {
        require_positive("omega_s", omega_s)?;
        self.omega_s = omega_s;
        Ok(self)
    }

    /// Density value at nu >= 0. Zero at nu = 0 for every kind.
    pub fn omega(&self, nu: f64) -> Result<f64> {
        if !(nu >= 0.0) {
            return Err(Error::Domain(format!("nu must be non-negative, got {nu}")));
        }
        if nu == 0.0 {
            return Ok(0.0);
        }
        // Reciprocal of a sub-1e-300 nu overflows inside the real-log factor;
        // the exp-scale path is exact there.
        if nu < 1e-300 {
            return Ok(self.omega_at_exp_neg(-nu.ln()));
        }
        Ok(match &self.kind {
            SdKind::IntLog { q, alpha, l, n } => carrier(*q, *alpha, *l, nu) * ln_abs_pow_int(nu, *n),
            SdKind::RealLog { q, alpha, l, beta } => carrier(*q, *alpha, *l, nu) * ln_shift_pow(nu, *beta),
            SdKind::Tabulated(t) => t.eval_ln(nu.ln()),
        })
    }

    /// Density at nu = exp(-u), stable for arbitrarily large u >= 0.
    ///
    /// This is the form the low-frequency quadrature integrates; it stays
    /// finite and smooth long after exp(-u) itself has underflowed.
    pub fn omega_at_exp_neg(&self, u: f64) -> f64 {
        debug_assert!(u >= 0.0);
        match &self.kind {
            SdKind::IntLog { q, alpha, l, n } => {
                let nu = (-u).exp();
                q * u.powi(*n as i32) * (-alpha * u - l * nu).exp()
            }
            SdKind::RealLog { q, alpha, l, beta } => {
                let nu = (-u).exp();
                // ln(e + e^u): switch to the overflow-free expansion once e^u
                // dominates.
                let base = if u > 40.0 {
                    u + (std::f64::consts::E * (-u).exp()).ln_1p()
                } else {
                    (std::f64::consts::E + u.exp()).ln()
                };
                q * (-alpha * u - l * nu).exp() * base.powf(*beta)
            }
            SdKind::Tabulated(t) => t.eval_ln(-u),
        }
    }

    /// ln of the density at nu = exp(-u), never forming the value itself.
    ///
    /// Integrands that fold this against a growing counterweight before a
    /// single exp stay finite where the density alone would underflow.
    /// Minus infinity (the density's zero at u = 0 with a log factor) is a
    /// valid return and exponentiates to the correct limit.
    pub(crate) fn ln_omega_at_exp_neg(&self, u: f64) -> f64 {
        debug_assert!(u >= 0.0);
        match &self.kind {
            SdKind::IntLog { q, alpha, l, n } => {
                let mut v = q.ln() - alpha * u - l * (-u).exp();
                // n = 0 must skip the log term: 0 * ln(0) at u = 0 is NaN,
                // while the true factor is exactly 1.
                if *n > 0 {
                    v += f64::from(*n) * u.ln();
                }
                v
            }
            SdKind::RealLog { q, alpha, l, beta } => {
                let base = if u > 40.0 {
                    u + (std::f64::consts::E * (-u).exp()).ln_1p()
                } else {
                    (std::f64::consts::E + u.exp()).ln()
                };
                q.ln() - alpha * u - l * (-u).exp() + beta * base.ln()
            }
            SdKind::Tabulated(t) => t.ln_eval(-u),
        }
    }

    /// Low-frequency expansion with `j_terms` terms.
    ///
    /// First class: powers alpha + j with the fixed log power n and
    /// coefficients q (-l)^j / j!. Second class: same power ladder with the
    /// fixed real log power beta. Not available for tabulated kinds.
    pub fn low_freq_expansion(&self, j_terms: usize) -> Result<LowFreqExpansion> {
        if j_terms == 0 {
            return Err(Error::Domain("j_terms must be at least 1".into()));
        }
        let (q, alpha, l, class, log_pow) = match &self.kind {
            SdKind::IntLog { q, alpha, l, n } => (*q, *alpha, *l, ExpansionClass::IntegerLog, *n as f64),
            SdKind::RealLog { q, alpha, l, beta } => {
                if *beta == 0.0 {
                    (*q, *alpha, *l, ExpansionClass::IntegerLog, 0.0)
                } else {
                    (*q, *alpha, *l, ExpansionClass::RealLog, *beta)
                }
            }
            SdKind::Tabulated(_) => {
                return Err(Error::UnsupportedKind(
                    "tabulated densities carry no analytic low-frequency expansion".into(),
                ))
            }
        };
        let mut terms = Vec::with_capacity(j_terms);
        let mut coeff = q;
        for j in 0..j_terms {
            if j > 0 {
                coeff *= -l / j as f64;
            }
            terms.push(ExpansionTerm { power: alpha + j as f64, log_pow, coeff });
        }
        Ok(LowFreqExpansion { class, terms })
    }

    /// Leading low-frequency power: alpha for canonical kinds, the declared
    /// value for tabulated ones.
    pub fn alpha0(&self) -> f64 {
        match &self.kind {
            SdKind::IntLog { alpha, .. } | SdKind::RealLog { alpha, .. } => *alpha,
            SdKind::Tabulated(t) => t.alpha0,
        }
    }

    /// Tail decay exponent chi0: infinite for the exponentially cut off
    /// canonical kinds, declared for tabulated ones.
    pub fn chi0(&self) -> f64 {
        match &self.kind {
            SdKind::IntLog { .. } | SdKind::RealLog { .. } => f64::INFINITY,
            SdKind::Tabulated(t) => t.chi0,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            SdKind::IntLog { .. } => "int-log",
            SdKind::RealLog { .. } => "real-log",
            SdKind::Tabulated(_) => "tabulated",
        }
    }

    /// Summability report at reduced temperature `theta >= 0`.
    ///
    /// Computes the thermal zeroth moment numerically and derives the
    /// short-time-validity flags from chi0. For tabulated densities the
    /// exponents are declared, unverified, and the notes say so.
    pub fn check_conditions(&self, theta: f64) -> Result<ConditionReport> {
        if !(theta >= 0.0) {
            return Err(Error::Domain(format!("theta must be non-negative, got {theta}")));
        }
        let chi0 = self.chi0();
        let mut notes = Vec::new();
        if let SdKind::Tabulated(_) = self.kind {
            notes.push("low-frequency exponent alpha0 declared, unverified".into());
            notes.push("tail exponent chi0 declared, unverified".into());
        }
        let (thermal_finite, thermal_value) = match crate::quad::moment(self, 0, theta) {
            Ok(v) => (v.is_finite(), Some(v)),
            Err(e) => {
                notes.push(format!("thermal moment integration failed: {e}"));
                (false, None)
            }
        };
        Ok(ConditionReport {
            thermal_finite,
            thermal_value,
            tail_summable: chi0 > 0.0,
            short_time_quadratic_ok: chi0 > 2.0,
            short_time_linear_ok: chi0 > 1.0,
            notes,
        })
    }
}

impl TabulatedSd {
    pub fn new(nu: &[f64], omega: &[f64], alpha0: f64, chi0: f64) -> Result<Self> {
        if nu.len() != omega.len() {
            return Err(Error::Domain("nu and omega sample arrays differ in length".into()));
        }
        if nu.len() < 2 {
            return Err(Error::Domain("tabulated density needs at least 2 samples".into()));
        }
        require_positive("alpha0", alpha0)?;
        require_positive("chi0", chi0)?;
        for w in nu.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::Domain("nu samples must be strictly increasing".into()));
            }
        }
        for (&x, &y) in nu.iter().zip(omega) {
            require_positive("nu sample", x)?;
            require_positive("omega sample", y)?;
        }
        let ln_nu: Vec<f64> = nu.iter().map(|x| x.ln()).collect();
        let ln_omega: Vec<f64> = omega.iter().map(|y| y.ln()).collect();
        let slope = pchip_slopes(&ln_nu, &ln_omega);
        Ok(TabulatedSd { ln_nu, ln_omega, slope, alpha0, chi0 })
    }

    /// Interpolated density at ln(nu) = t, with power-law extension on both
    /// sides of the grid.
    fn eval_ln(&self, t: f64) -> f64 {
        self.ln_eval(t).exp()
    }

    /// ln of the interpolated density at ln(nu) = t.
    fn ln_eval(&self, t: f64) -> f64 {
        let first = *self.ln_nu.first().unwrap();
        let last = *self.ln_nu.last().unwrap();
        if t < first {
            self.ln_omega[0] + self.alpha0 * (t - first)
        } else if t > last {
            *self.ln_omega.last().unwrap() - (1.0 + self.chi0) * (t - last)
        } else {
            let i = match self.ln_nu.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
                Ok(i) => return self.ln_omega[i],
                Err(i) => i - 1,
            };
            hermite(
                self.ln_nu[i],
                self.ln_nu[i + 1],
                self.ln_omega[i],
                self.ln_omega[i + 1],
                self.slope[i],
                self.slope[i + 1],
                t,
            )
        }
    }
}

// Fritsch-Carlson monotone slopes in one pass: weighted harmonic means
// inside, shape-clamped three-point estimates at the edges.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut d = vec![0.0; n];
    let h: Vec<f64> = (0..n - 1).map(|i| x[i + 1] - x[i]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
        return d;
    }
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    d[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let t = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if t * d0 <= 0.0 {
        0.0
    } else if d0 * d1 < 0.0 && t.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        t
    }
}

fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * d1
}

/// Reads a two-column CSV of (nu, omega) samples; `#` starts a comment.
pub fn load_table_csv(path: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)?;
    let mut nu = Vec::new();
    let mut omega = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',').map(str::trim);
        let parse = |s: Option<&str>| -> Result<f64> {
            s.ok_or_else(|| Error::Config(format!("{path}:{}: expected two comma-separated values", idx + 1)))?
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("{path}:{}: not a number", idx + 1)))
        };
        // Tolerate a header row on the first non-comment line.
        let a = parts.next();
        if idx == 0 || nu.is_empty() {
            if let Some(s) = a {
                if s.parse::<f64>().is_err() {
                    continue;
                }
            }
        }
        nu.push(parse(a)?);
        omega.push(parse(parts.next())?);
        if parts.next().is_some() {
            return Err(Error::Config(format!("{path}:{}: expected exactly two columns", idx + 1)));
        }
    }
    if nu.is_empty() {
        return Err(Error::Config(format!("{path}: no data rows")));
    }
    Ok((nu, omega))
}

/// Builder mirroring the CLI flag and config-file surface for densities.
#[derive(Debug, Clone, Default)]
pub struct SdParams {
    pub kind: Option<String>,
    pub q: Option<f64>,
    pub alpha: Option<f64>,
    pub l: Option<f64>,
    pub n: Option<u32>,
    pub beta: Option<f64>,
    pub omega_s: Option<f64>,
    pub chi0: Option<f64>,
    pub table: Option<String>,
}

impl SdParams {
    /// Resolves the parameter set into a density.
    ///
    /// Kind defaults: an explicit `kind` wins; otherwise `table` implies
    /// tabulated and `beta` implies real-log; the fallback is int-log.
    pub fn build(&self) -> Result<SpectralDensity> {
        let kind = match self.kind.as_deref() {
            Some(k) => k.to_string(),
            None => {
                if self.table.is_some() {
                    "tabulated".into()
                } else if self.beta.is_some() {
                    "real-log".into()
                } else {
                    "int-log".into()
                }
            }
        };
        let q = self.q.unwrap_or(1.0);
        let alpha = self.alpha.unwrap_or(1.0);
        let l = self.l.unwrap_or(1.0);
        let sd = match kind.as_str() {
            "int-log" => {
                if self.beta.is_some() {
                    return Err(Error::Config("beta is not a parameter of the int-log kind".into()));
                }
                SpectralDensity::int_log(q, alpha, l, self.n.unwrap_or(0))?
            }
            "real-log" => {
                if self.n.is_some() {
                    return Err(Error::Config("n is not a parameter of the real-log kind".into()));
                }
                SpectralDensity::real_log(q, alpha, l, self.beta.unwrap_or(0.0))?
            }
            "tabulated" => {
                let path = self.table.as_deref().ok_or_else(|| {
                    Error::Config("tabulated kind requires table = <csv path>".into())
                })?;
                let chi0 = self.chi0.ok_or_else(|| {
                    Error::Config("tabulated kind requires a declared chi0".into())
                })?;
                let (nu, omega) = load_table_csv(path)?;
                SpectralDensity::tabulated(&nu, &omega, alpha, chi0)?
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown density kind '{other}' (expected int-log, real-log, or tabulated)"
                )))
            }
        };
        sd.with_omega_s(self.omega_s.unwrap_or(1.0))
    }
}

impl LowFreqExpansion {
    /// Partial sum of the expansion at nu, using the class's log factor.
    pub fn eval(&self, nu: f64) -> f64 {
        let logf = match self.class {
            ExpansionClass::IntegerLog => -nu.ln(),
            ExpansionClass::RealLog => (std::f64::consts::E + 1.0 / nu).ln(),
        };
        self.terms
            .iter()
            .map(|t| t.coeff * nu.powf(t.power) * logf.powf(t.log_pow))
            .sum()
    }

    /// Magnitude bound on the truncation remainder at nu: the first omitted
    /// ladder coefficient times its monomial.
    pub fn remainder_bound(&self, nu: f64, q: f64, l: f64) -> f64 {
        let j = self.terms.len();
        let t0 = &self.terms[0];
        let logf = match self.class {
            ExpansionClass::IntegerLog => -nu.ln(),
            ExpansionClass::RealLog => (std::f64::consts::E + 1.0 / nu).ln(),
        };
        q * l.powi(j as i32) / factorial(j as u32) * nu.powf(t0.power + j as f64)
            * logf.abs().powf(t0.log_pow)
    }
}
