//! Python bindings: one class wrapping the density, with methods for each
//! evaluation route. All numerical errors surface as ValueError carrying
//! the library's message text.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use logbath::asymptotic::{bcf_asymptotic, select_branch, short_time, Part};
use logbath::quad::{bcf_numeric, moment, BcfSample, QuadConfig};
use logbath::sd::DEFAULT_EXPANSION_TERMS;

fn err(e: logbath::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn tuples(v: Vec<BcfSample>) -> Vec<(f64, f64, f64, f64, f64)> {
    v.into_iter().map(|s| (s.tau, s.xi1, s.xi2, s.err1, s.err2)).collect()
}

fn parse_part(part: &str) -> PyResult<Part> {
    match part {
        "c1-thermal" => Ok(Part::C1AtT),
        "c1-zero" => Ok(Part::C1AtZero),
        "c2" => Ok(Part::C2),
        other => Err(PyValueError::new_err(format!(
            "unknown part '{other}' (expected c1-thermal, c1-zero, or c2)"
        ))),
    }
}

/// A spectral density with power-law, exponential, and logarithmic factors.
#[pyclass(frozen, name = "SpectralDensity")]
struct PySpectralDensity {
    inner: logbath::SpectralDensity,
}

#[pymethods]
impl PySpectralDensity {
    /// Density q nu^alpha exp(-l nu) |ln nu|^n with integer n >= 0.
    #[staticmethod]
    #[pyo3(signature = (q, alpha, l, n=0))]
    fn int_log(q: f64, alpha: f64, l: f64, n: u32) -> PyResult<Self> {
        Ok(Self { inner: logbath::SpectralDensity::int_log(q, alpha, l, n).map_err(err)? })
    }

    /// Density q nu^alpha exp(-l nu) ln(e + 1/nu)^beta with real beta.
    #[staticmethod]
    #[pyo3(signature = (q, alpha, l, beta))]
    fn real_log(q: f64, alpha: f64, l: f64, beta: f64) -> PyResult<Self> {
        Ok(Self { inner: logbath::SpectralDensity::real_log(q, alpha, l, beta).map_err(err)? })
    }

    /// Density value at one frequency.
    fn omega(&self, nu: f64) -> PyResult<f64> {
        self.inner.omega(nu).map_err(err)
    }

    /// p-th spectral moment; even orders carry the thermal weight.
    #[pyo3(signature = (p, theta=0.0))]
    fn moment(&self, p: u32, theta: f64) -> PyResult<f64> {
        moment(&self.inner, p, theta).map_err(err)
    }

    /// Direct quadrature over a time grid. Returns rows
    /// (tau, xi1, xi2, err1, err2).
    #[pyo3(signature = (taus, theta=0.0, abs_tol=None, rel_tol=None))]
    fn bcf(
        &self,
        taus: Vec<f64>,
        theta: f64,
        abs_tol: Option<f64>,
        rel_tol: Option<f64>,
    ) -> PyResult<Vec<(f64, f64, f64, f64, f64)>> {
        let d = QuadConfig::default();
        let cfg = QuadConfig {
            abs_tol: abs_tol.unwrap_or(d.abs_tol),
            rel_tol: rel_tol.unwrap_or(d.rel_tol),
            ..d
        };
        Ok(tuples(bcf_numeric(&self.inner, theta, &taus, &cfg).map_err(err)?))
    }

    /// Long-time law evaluation (tau > e). Same row shape as bcf.
    #[pyo3(signature = (taus, theta=0.0))]
    fn bcf_asymptotic(&self, taus: Vec<f64>, theta: f64) -> PyResult<Vec<(f64, f64, f64, f64, f64)>> {
        let rows = bcf_asymptotic(&self.inner, theta, &taus).map_err(err)?;
        Ok(tuples(rows.into_iter().map(|r| r.sample).collect()))
    }

    /// Short-time expansion. Same row shape as bcf.
    #[pyo3(signature = (taus, theta=0.0))]
    fn short_time(&self, taus: Vec<f64>, theta: f64) -> PyResult<Vec<(f64, f64, f64, f64, f64)>> {
        Ok(tuples(short_time(&self.inner, theta, &taus).map_err(err)?))
    }

    /// Leading long-time law of one component as a dict. Part is one of
    /// "c1-thermal", "c1-zero", "c2".
    #[pyo3(signature = (part, theta=0.0))]
    fn branch<'py>(&self, py: Python<'py>, part: &str, theta: f64) -> PyResult<Bound<'py, PyDict>> {
        let part = parse_part(part)?;
        let exp = self.inner.low_freq_expansion(DEFAULT_EXPANSION_TERMS).map_err(err)?;
        let b = select_branch(&exp, part, theta).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("part", b.part.as_str())?;
        d.set_item("law", b.law.as_str())?;
        d.set_item("power", b.power)?;
        d.set_item("log_power", b.log_power)?;
        d.set_item("prefactor", b.prefactor)?;
        d.set_item("term_index", b.used_term_index)?;
        d.set_item("thermal_factor", b.thermal_factor)?;
        if let Some(c) = &b.conditioning {
            d.set_item("conditioning", c)?;
        }
        Ok(d)
    }

    /// Low-frequency exponent.
    #[getter]
    fn alpha0(&self) -> f64 {
        self.inner.alpha0()
    }

    /// Declared or canonical tail exponent (inf for entire tails).
    #[getter]
    fn chi0(&self) -> f64 {
        self.inner.chi0()
    }

    /// Density family name.
    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind_name()
    }

    fn __repr__(&self) -> String {
        format!("SpectralDensity(kind={}, alpha0={})", self.inner.kind_name(), self.inner.alpha0())
    }
}

#[pymodule]
fn logbath_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpectralDensity>()?;
    Ok(())
}
