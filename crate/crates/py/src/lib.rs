//! Python bindings over the code-chain library. Words cross the boundary as
//! bit-strings with coefficient 0 first; exact rates come back as
//! (numerator, denominator) pairs. Every library error surfaces as
//! ValueError carrying the original message.

use std::str::FromStr;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use bchchain::bandwidth::{
    bandwidth_table as core_bandwidth_table, default_label, format_khz, parse_decimal_ratio,
    LinkBudget, ModulationScheme,
};
use bchchain::binpoly::BinPolynomial;
use bchchain::chain::{embed_bch, project_bch, rate_table as core_rate_table};
use bchchain::codec::ChainDecoder as CoreChainDecoder;
use bchchain::gf2m::PrimitivePolynomial;
use bchchain::interweave::{events_to_csv, run_simulation as core_run_simulation, SimConfig};
use bchchain::{BchCode as CoreBchCode, BitVector, ChainCode as CoreChainCode, CyclicCode, Error};

fn value_error(err: Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn bits(text: &str) -> PyResult<BitVector> {
    BitVector::from_str(text).map_err(value_error)
}

fn prim_from_bits(bits: u64) -> PyResult<PrimitivePolynomial> {
    let exponents: Vec<usize> = (0..64).filter(|i| bits >> i & 1 == 1).collect();
    PrimitivePolynomial::new(BinPolynomial::from_exponents(&exponents)).map_err(value_error)
}

fn build_seed(s: usize, c: usize, delta: usize, prim: Option<u64>) -> PyResult<CoreBchCode> {
    let prim = prim.map(prim_from_bits).transpose()?;
    CoreBchCode::new(s, c, delta, prim).map_err(value_error)
}

/// Seed code with parameters (s, c, delta) and an optional primitive
/// polynomial given as coefficient bits.
#[pyclass(name = "BchCode", module = "bchchain_py", skip_from_py_object)]
#[derive(Clone)]
struct PyBchCode {
    inner: CoreBchCode,
}

#[pymethods]
impl PyBchCode {
    #[new]
    #[pyo3(signature = (s, c, delta, prim=None))]
    fn new(s: usize, c: usize, delta: usize, prim: Option<u64>) -> PyResult<Self> {
        Ok(PyBchCode {
            inner: build_seed(s, c, delta, prim)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn r(&self) -> usize {
        self.inner.r()
    }

    #[getter]
    fn designed_distance(&self) -> usize {
        self.inner.designed_distance()
    }

    fn generator(&self) -> String {
        self.inner.generator().to_string()
    }

    fn rate(&self) -> (u64, u64) {
        (self.inner.k() as u64, self.inner.n() as u64)
    }

    fn encode(&self, message: &str) -> PyResult<String> {
        self.inner
            .encode_systematic(&bits(message)?)
            .map(|word| word.to_string())
            .map_err(value_error)
    }

    fn is_codeword(&self, word: &str) -> PyResult<bool> {
        self.inner.is_codeword(&bits(word)?).map_err(value_error)
    }

    fn extract_message(&self, word: &str) -> PyResult<String> {
        self.inner
            .extract_message(&bits(word)?)
            .map(|message| message.to_string())
            .map_err(value_error)
    }

    fn derive(&self, level: usize) -> PyResult<PyChainCode> {
        self.inner
            .derive(level)
            .map(|chain| PyChainCode { inner: chain })
            .map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!(
            "BchCode(n={}, k={}, delta={})",
            self.inner.n(),
            self.inner.k(),
            self.inner.designed_distance()
        )
    }
}

/// Level-j member of the chain grown from a seed code.
#[pyclass(name = "ChainCode", module = "bchchain_py", skip_from_py_object)]
#[derive(Clone)]
struct PyChainCode {
    inner: CoreChainCode,
}

#[pymethods]
impl PyChainCode {
    #[getter]
    fn level(&self) -> usize {
        self.inner.level()
    }

    #[getter]
    fn length(&self) -> usize {
        self.inner.length()
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn generator(&self) -> String {
        self.inner.generator().to_string()
    }

    fn rate(&self) -> (u64, u64) {
        let rate = self.inner.rate();
        (*rate.numer(), *rate.denom())
    }

    fn seed(&self) -> PyBchCode {
        PyBchCode {
            inner: self.inner.seed().clone(),
        }
    }

    fn embed(&self, word: &str) -> PyResult<String> {
        embed_bch(&bits(word)?, &self.inner)
            .map(|lifted| lifted.to_string())
            .map_err(value_error)
    }

    fn project(&self, word: &str) -> PyResult<String> {
        project_bch(&bits(word)?, &self.inner)
            .map(|projected| projected.to_string())
            .map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!(
            "ChainCode(level={}, length={}, dimension={})",
            self.inner.level(),
            self.inner.length(),
            self.inner.dimension()
        )
    }
}

/// Syndrome decoder over one chain code. With max_weight the coset-leader
/// table is cut off at that pattern weight and unknown syndromes raise.
#[pyclass(name = "ChainDecoder", module = "bchchain_py")]
struct PyChainDecoder {
    inner: CoreChainDecoder,
}

#[pymethods]
impl PyChainDecoder {
    #[new]
    #[pyo3(signature = (chain, max_weight=None))]
    fn new(chain: &PyChainCode, max_weight: Option<usize>) -> PyResult<Self> {
        let inner = match max_weight {
            Some(weight) => CoreChainDecoder::with_max_weight(&chain.inner, weight),
            None => CoreChainDecoder::new(&chain.inner),
        }
        .map_err(value_error)?;
        Ok(PyChainDecoder { inner })
    }

    #[getter]
    fn complete(&self) -> bool {
        self.inner.decoder().table().is_complete()
    }

    #[getter]
    fn table_size(&self) -> usize {
        self.inner.decoder().table().len()
    }

    /// Syndrome of a chain-length word, one bit per check row.
    fn syndrome(&self, word: &str) -> PyResult<String> {
        self.inner
            .decoder()
            .syndrome(&bits(word)?)
            .map(|syndrome| syndrome.to_string())
            .map_err(value_error)
    }

    /// Correct a chain-length word in place of the chain code.
    fn decode_word(&self, word: &str) -> PyResult<String> {
        self.inner
            .decode_word(&bits(word)?)
            .map(|corrected| corrected.to_string())
            .map_err(value_error)
    }

    /// Lift a seed-length word, correct it at this level, project back.
    fn decode_via_chain(&self, received: &str) -> PyResult<String> {
        self.inner
            .decode_via_chain(&bits(received)?)
            .map(|decoded| decoded.to_string())
            .map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!(
            "ChainDecoder(level={}, table_size={}, complete={})",
            self.inner.chain().level(),
            self.inner.decoder().table().len(),
            self.inner.decoder().table().is_complete()
        )
    }
}

/// Exact rates (numerator, denominator) for levels 0..=j_max.
#[pyfunction]
#[pyo3(signature = (s, c, delta, j_max, prim=None))]
fn rate_table(
    s: usize,
    c: usize,
    delta: usize,
    j_max: usize,
    prim: Option<u64>,
) -> PyResult<Vec<(u64, u64)>> {
    let seed = build_seed(s, c, delta, prim)?;
    core_rate_table(&seed, j_max)
        .map(|rates| rates.iter().map(|r| (*r.numer(), *r.denom())).collect())
        .map_err(value_error)
}

/// Occupied bandwidth per level, one dict per level: level, exact rate,
/// formatted kHz per bits-per-symbol entry, and the occupied fraction of
/// the level-0 band.
#[pyfunction]
#[pyo3(signature = (s, c, delta, j_max, ru="64", w="1", m=vec![1], prim=None))]
#[allow(clippy::too_many_arguments)]
fn bandwidth_table(
    py: Python<'_>,
    s: usize,
    c: usize,
    delta: usize,
    j_max: usize,
    ru: &str,
    w: &str,
    m: Vec<u64>,
    prim: Option<u64>,
) -> PyResult<Vec<Py<PyDict>>> {
    let seed = build_seed(s, c, delta, prim)?;
    let budget = LinkBudget::new(
        parse_decimal_ratio(ru).map_err(value_error)?,
        parse_decimal_ratio(w).map_err(value_error)?,
    )
    .map_err(value_error)?;
    let schemes: Vec<ModulationScheme> = m
        .iter()
        .map(|&bits| ModulationScheme::new(bits, default_label(bits)))
        .collect::<Result<_, _>>()
        .map_err(value_error)?;
    let rows = core_bandwidth_table(&seed, j_max, &budget, &schemes).map_err(value_error)?;
    rows.iter()
        .map(|row| {
            let dict = PyDict::new(py);
            dict.set_item("level", row.level)?;
            dict.set_item("rate", (*row.rate.numer(), *row.rate.denom()))?;
            let bands: Vec<String> = row.bands_khz.iter().map(|&band| format_khz(band)).collect();
            dict.set_item("bands_khz", bands)?;
            dict.set_item(
                "occupied_fraction",
                (
                    *row.occupied_fraction.numer(),
                    *row.occupied_fraction.denom(),
                ),
            )?;
            Ok(dict.unbind())
        })
        .collect()
}

/// Run the channel-sharing scenario described by a config text (same flat
/// key = value format the CLI reads; trace paths resolve against the
/// current directory). Returns (metrics as a JSON string, event log CSV).
#[pyfunction]
#[pyo3(signature = (config_text, seed=None))]
fn run_simulation(config_text: &str, seed: Option<u64>) -> PyResult<(String, String)> {
    let mut config = SimConfig::from_text(config_text, None).map_err(value_error)?;
    if let Some(seed) = seed {
        config.rng_seed = seed;
    }
    let (metrics, events) = core_run_simulation(&config).map_err(value_error)?;
    let metrics_json =
        serde_json::to_string(&metrics).map_err(|err| PyValueError::new_err(err.to_string()))?;
    Ok((metrics_json, events_to_csv(&events)))
}

#[pymodule]
fn bchchain_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBchCode>()?;
    m.add_class::<PyChainCode>()?;
    m.add_class::<PyChainDecoder>()?;
    m.add_function(wrap_pyfunction!(rate_table, m)?)?;
    m.add_function(wrap_pyfunction!(bandwidth_table, m)?)?;
    m.add_function(wrap_pyfunction!(run_simulation, m)?)?;
    Ok(())
}
