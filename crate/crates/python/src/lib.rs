//! Python bindings. Vectors and matrices are lists of floats, permutations
//! are lists of 1-based items in rank order.

use lovasz_bregman as lb;
use lovasz_bregman::{LbError, Permutation, ScoreMatrix, TieRule};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(lovasz_bregman, LovaszBregmanError, PyValueError);

trait Lift<T> {
    fn lift(self) -> PyResult<T>;
}

impl<T> Lift<T> for Result<T, LbError> {
    fn lift(self) -> PyResult<T> {
        self.map_err(|e| LovaszBregmanError::new_err(e.to_string()))
    }
}

fn perm(items: Vec<usize>) -> PyResult<Permutation> {
    Permutation::new(items).lift()
}

fn rule(name: &str) -> PyResult<TieRule> {
    name.parse().lift()
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<ScoreMatrix> {
    ScoreMatrix::new(rows).lift()
}

/// A normalised submodular set function on items `1..=n`.
#[pyclass(name = "SetFunction", module = "lovasz_bregman", frozen, from_py_object)]
#[derive(Clone)]
struct PySetFunction {
    inner: lb::SetFunction,
}

fn wrap(f: lb::Result<lb::SetFunction>) -> PyResult<PySetFunction> {
    f.map(|inner| PySetFunction { inner }).lift()
}

#[pymethods]
impl PySetFunction {
    /// `√|X|`.
    #[staticmethod]
    fn sqrt(n: usize) -> PyResult<Self> {
        wrap(lb::SetFunction::sqrt(n))
    }

    /// `ln(1 + |X|)`.
    #[staticmethod]
    fn log(n: usize) -> PyResult<Self> {
        wrap(lb::SetFunction::log(n))
    }

    /// `g(|X|)` from non-increasing gains `g(k) − g(k−1)`.
    #[staticmethod]
    fn cardinality(gains: Vec<f64>) -> PyResult<Self> {
        wrap(lb::SetFunction::cardinality(gains))
    }

    /// `min{g(|X|), g(m)}`.
    #[staticmethod]
    fn truncated(gains: Vec<f64>, m: usize) -> PyResult<Self> {
        wrap(lb::SetFunction::truncated(gains, m))
    }

    /// `min{|X|, m}`.
    #[staticmethod]
    fn top_m(n: usize, m: usize) -> PyResult<Self> {
        wrap(lb::SetFunction::top_m(n, m))
    }

    /// Graph cut with a symmetric, zero-diagonal weight matrix.
    #[staticmethod]
    fn graph_cut(weights: Vec<Vec<f64>>) -> PyResult<Self> {
        wrap(lb::WeightMatrix::new(weights).and_then(lb::SetFunction::graph_cut))
    }

    /// `|X| · |V∖X|`.
    #[staticmethod]
    fn uniform_cut(n: usize) -> PyResult<Self> {
        wrap(lb::SetFunction::uniform_cut(n))
    }

    #[staticmethod]
    fn modular(weights: Vec<f64>) -> PyResult<Self> {
        wrap(lb::SetFunction::modular(weights))
    }

    /// All `2^n` values indexed by bitmask (bit `i − 1` for item `i`).
    #[staticmethod]
    fn explicit_table(n: usize, values: Vec<f64>) -> PyResult<Self> {
        wrap(lb::SetFunction::explicit_table(n, values))
    }

    #[staticmethod]
    fn sum(terms: Vec<PySetFunction>) -> PyResult<Self> {
        wrap(lb::SetFunction::sum(terms.into_iter().map(|t| t.inner).collect()))
    }

    /// Generator descriptor such as `"cardinality:sqrt"` or `"topm:2"`.
    #[staticmethod]
    fn from_spec(spec: &str, n: usize) -> PyResult<Self> {
        wrap(spec.parse::<lb::GeneratorSpec>().and_then(|s| s.build(n)))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        wrap(serde_json::from_str(text).map_err(|e| LbError::Parse(e.to_string())))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("set functions serialise")
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn evaluate(&self, items: Vec<usize>) -> PyResult<f64> {
        let set = lb::Subset::from_items(self.inner.n(), &items).lift()?;
        self.inner.evaluate(&set).lift()
    }

    fn marginal_gain(&self, item: usize, items: Vec<usize>) -> PyResult<f64> {
        let set = lb::Subset::from_items(self.inner.n(), &items).lift()?;
        self.inner.marginal_gain(item, &set).lift()
    }

    fn is_submodular(&self) -> PyResult<bool> {
        self.inner.is_submodular().lift()
    }

    fn is_monotone(&self) -> PyResult<bool> {
        self.inner.is_monotone().lift()
    }

    fn lovasz_extension(&self, x: Vec<f64>) -> PyResult<f64> {
        lb::lovasz_extension(&self.inner, &x).lift()
    }

    fn extreme_subgradient(&self, sigma: Vec<usize>) -> PyResult<Vec<f64>> {
        lb::extreme_subgradient(&self.inner, &perm(sigma)?)
            .map(lb::ExtremeSubgradient::into_values)
            .lift()
    }

    #[pyo3(signature = (y, enumeration_cap = lb::lovasz::DEFAULT_ENUMERATION_CAP, zero_at_origin = false))]
    fn averaged_subgradient(&self, y: Vec<f64>, enumeration_cap: usize, zero_at_origin: bool) -> PyResult<Vec<f64>> {
        let opts = lb::SubgradientOptions { enumeration_cap, zero_at_origin };
        lb::averaged_subgradient(&self.inner, &y, opts).lift()
    }

    fn __repr__(&self) -> String {
        format!("SetFunction({}, n={})", self.inner.descriptor().name(), self.inner.n())
    }
}

#[pyfunction]
#[pyo3(signature = (x, tie_rule = "lowest-index-first"))]
fn induced_ordering(x: Vec<f64>, tie_rule: &str) -> PyResult<Vec<usize>> {
    Ok(lb::induced_ordering(&x, rule(tie_rule)?).lift()?.to_vec())
}

#[pyfunction]
fn kendall_tau(sigma: Vec<usize>, pi: Vec<usize>) -> PyResult<u64> {
    lb::kendall_tau(&perm(sigma)?, &perm(pi)?).lift()
}

#[pyfunction]
fn spearman_footrule(sigma: Vec<usize>, pi: Vec<usize>) -> PyResult<u64> {
    lb::spearman_footrule(&perm(sigma)?, &perm(pi)?).lift()
}

#[pyfunction]
fn rank_correlation(sigma: Vec<usize>, pi: Vec<usize>) -> PyResult<u64> {
    lb::rank_correlation(&perm(sigma)?, &perm(pi)?).lift()
}

#[pyfunction]
#[pyo3(signature = (f, x, sigma, tie_rule = "lowest-index-first"))]
fn lb_divergence(f: &PySetFunction, x: Vec<f64>, sigma: Vec<usize>, tie_rule: &str) -> PyResult<f64> {
    lb::lb_divergence(&f.inner, &x, &perm(sigma)?, rule(tie_rule)?).lift()
}

#[pyfunction]
fn lb_cardinality(gains: Vec<f64>, x: Vec<f64>, sigma: Vec<usize>) -> PyResult<f64> {
    lb::lb_cardinality(&gains, &x, &perm(sigma)?).lift()
}

#[pyfunction]
fn lb_top_m(gains: Vec<f64>, m: usize, x: Vec<f64>, sigma: Vec<usize>) -> PyResult<f64> {
    lb::lb_top_m(&gains, m, &x, &perm(sigma)?).lift()
}

/// `orientation_count` 2 matches the generic divergence, 1 counts each
/// discordant pair once.
#[pyfunction]
#[pyo3(signature = (weights, x, sigma, orientation_count = 2))]
fn lb_cut(weights: Vec<Vec<f64>>, x: Vec<f64>, sigma: Vec<usize>, orientation_count: u8) -> PyResult<f64> {
    let w = lb::WeightMatrix::new(weights).lift()?;
    let orientation = lb::Orientation::try_from(orientation_count).lift()?;
    lb::lb_cut(&w, &x, &perm(sigma)?, orientation).lift()
}

fn discount(values: Option<Vec<f64>>, n: usize, cutoff: Option<usize>) -> PyResult<lb::DiscountProfile> {
    let k = cutoff.unwrap_or(n);
    match values {
        None => lb::DiscountProfile::log2(n, k),
        Some(values) => lb::DiscountProfile::new(values, k),
    }
    .lift()
}

/// NDCG loss; `discount_values` defaults to `1 / log2(i + 1)`.
#[pyfunction]
#[pyo3(signature = (relevance, sigma, discount_values = None, cutoff = None))]
fn ndcg_loss(
    relevance: Vec<f64>,
    sigma: Vec<usize>,
    discount_values: Option<Vec<f64>>,
    cutoff: Option<usize>,
) -> PyResult<f64> {
    let d = discount(discount_values, relevance.len(), cutoff)?;
    lb::ndcg_loss(&relevance, &perm(sigma)?, &d).lift()
}

#[pyfunction]
#[pyo3(signature = (relevance, sigma, discount_values = None, cutoff = None))]
fn dcg_shortfall(
    relevance: Vec<f64>,
    sigma: Vec<usize>,
    discount_values: Option<Vec<f64>>,
    cutoff: Option<usize>,
) -> PyResult<f64> {
    let d = discount(discount_values, relevance.len(), cutoff)?;
    lb::dcg_shortfall(&relevance, &perm(sigma)?, &d).lift()
}

#[pyfunction]
fn auc_loss(good: Vec<usize>, bad: Vec<usize>, sigma: Vec<usize>) -> PyResult<f64> {
    lb::auc_loss(&good, &bad, &perm(sigma)?).lift()
}

/// `constraints` is a list of `(above, below, weight)`.
#[pyfunction]
fn partial_order_distortion(constraints: Vec<(usize, usize, f64)>, x: Vec<f64>) -> PyResult<f64> {
    let order = lb::PartialOrder::new(
        constraints
            .into_iter()
            .map(|(above, below, weight)| lb::OrderConstraint { above, below, weight })
            .collect(),
    )
    .lift()?;
    lb::partial_order_distortion(&order, &x).lift()
}

#[pyfunction]
fn confidence_bound(f: &PySetFunction, x: Vec<f64>) -> PyResult<f64> {
    lb::confidence_bound(&f.inner, &x).lift()
}

/// Returns `(ordering, mean)`.
#[pyfunction]
#[pyo3(signature = (rows, weights = None, tie_rule = "lowest-index-first"))]
fn mean_ordering(rows: Vec<Vec<f64>>, weights: Option<Vec<f64>>, tie_rule: &str) -> PyResult<(Vec<usize>, Vec<f64>)> {
    let (sigma, mean) = lb::mean_ordering(&matrix(rows)?, weights.as_deref(), rule(tie_rule)?).lift()?;
    Ok((sigma.to_vec(), mean))
}

#[pyfunction]
#[pyo3(signature = (rows, f, sigma, weights = None))]
fn aggregation_objective(rows: Vec<Vec<f64>>, f: &PySetFunction, sigma: Vec<usize>, weights: Option<Vec<f64>>) -> PyResult<f64> {
    lb::aggregation_objective(&matrix(rows)?, &f.inner, &perm(sigma)?, weights.as_deref()).lift()
}

#[pyfunction]
#[pyo3(signature = (rows, f, weights = None))]
fn brute_force_mean(rows: Vec<Vec<f64>>, f: &PySetFunction, weights: Option<Vec<f64>>) -> PyResult<Vec<usize>> {
    Ok(lb::brute_force_mean(&matrix(rows)?, &f.inner, weights.as_deref()).lift()?.to_vec())
}

#[pyclass(name = "ClusteringResult", module = "lovasz_bregman", frozen, get_all)]
struct PyClusteringResult {
    /// 0-based cluster index per row.
    assignments: Vec<usize>,
    representatives: Vec<Vec<usize>>,
    objective: f64,
    iterations: usize,
    converged: bool,
    history: Vec<f64>,
}

#[pymethods]
impl PyClusteringResult {
    fn __repr__(&self) -> String {
        format!(
            "ClusteringResult(k={}, objective={}, iterations={}, converged={})",
            self.representatives.len(),
            self.objective,
            self.iterations,
            self.converged
        )
    }
}

#[pyfunction]
#[pyo3(signature = (rows, f, k, max_iter = 100, tol = 1e-9, seed = 0))]
fn lb_kmeans(rows: Vec<Vec<f64>>, f: &PySetFunction, k: usize, max_iter: usize, tol: f64, seed: u64) -> PyResult<PyClusteringResult> {
    let mut config = lb::KMeansConfig::new(k);
    config.max_iter = max_iter;
    config.tol = tol;
    config.seed = seed;
    let r = lb::lb_kmeans(&matrix(rows)?, &f.inner, &config).lift()?;
    Ok(PyClusteringResult {
        assignments: r.assignments,
        representatives: r.representatives.iter().map(Permutation::to_vec).collect(),
        objective: r.objective,
        iterations: r.iterations,
        converged: r.converged,
        history: r.history,
    })
}

/// Density over score vectors in the unit cube, centred at a reference ordering.
#[pyclass(name = "LovaszMallows", module = "lovasz_bregman", frozen)]
struct PyLovaszMallows {
    inner: lb::LovaszMallows,
}

#[pymethods]
impl PyLovaszMallows {
    #[new]
    fn new(f: &PySetFunction, reference: Vec<usize>, theta: f64) -> PyResult<Self> {
        let inner = lb::LovaszMallows::new(f.inner.clone(), perm(reference)?, theta).lift()?;
        Ok(Self { inner })
    }

    fn log_density_unnormalized(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.log_density_unnormalized(&x).lift()
    }

    /// Returns `(log_z, std_error)`.
    #[pyo3(signature = (samples = 100_000, seed = 0))]
    fn estimate_log_z(&self, py: Python<'_>, samples: usize, seed: u64) -> PyResult<(f64, f64)> {
        let est = py.detach(|| self.inner.estimate_log_z(samples, seed)).lift()?;
        Ok((est.log_z, est.std_error))
    }
}

/// Distribution over permutations combining several score vectors.
#[pyclass(name = "ExtendedLovaszMallows", module = "lovasz_bregman", frozen)]
struct PyExtendedLovaszMallows {
    inner: lb::ExtendedLovaszMallows,
}

#[pymethods]
impl PyExtendedLovaszMallows {
    #[new]
    fn new(f: &PySetFunction, rows: Vec<Vec<f64>>, thetas: Vec<f64>) -> PyResult<Self> {
        let inner = lb::ExtendedLovaszMallows::new(f.inner.clone(), matrix(rows)?, thetas).lift()?;
        Ok(Self { inner })
    }

    /// Returns `(log_density, normalized)`.
    fn log_density(&self, sigma: Vec<usize>) -> PyResult<(f64, bool)> {
        let d = self.inner.extended_log_density(&perm(sigma)?).lift()?;
        Ok((d.log_density, d.normalized))
    }

    /// `None` when the model is too large to normalise exactly.
    fn log_partition(&self) -> PyResult<Option<f64>> {
        self.inner.log_partition().lift()
    }

    fn map_permutation(&self) -> PyResult<Vec<usize>> {
        Ok(self.inner.map_permutation().lift()?.to_vec())
    }
}

#[pymodule]
#[pyo3(name = "lovasz_bregman")]
fn lovasz_bregman_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("LovaszBregmanError", m.py().get_type::<LovaszBregmanError>())?;
    m.add_class::<PySetFunction>()?;
    m.add_class::<PyClusteringResult>()?;
    m.add_class::<PyLovaszMallows>()?;
    m.add_class::<PyExtendedLovaszMallows>()?;
    m.add_function(wrap_pyfunction!(induced_ordering, m)?)?;
    m.add_function(wrap_pyfunction!(kendall_tau, m)?)?;
    m.add_function(wrap_pyfunction!(spearman_footrule, m)?)?;
    m.add_function(wrap_pyfunction!(rank_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(lb_divergence, m)?)?;
    m.add_function(wrap_pyfunction!(lb_cardinality, m)?)?;
    m.add_function(wrap_pyfunction!(lb_top_m, m)?)?;
    m.add_function(wrap_pyfunction!(lb_cut, m)?)?;
    m.add_function(wrap_pyfunction!(ndcg_loss, m)?)?;
    m.add_function(wrap_pyfunction!(dcg_shortfall, m)?)?;
    m.add_function(wrap_pyfunction!(auc_loss, m)?)?;
    m.add_function(wrap_pyfunction!(partial_order_distortion, m)?)?;
    m.add_function(wrap_pyfunction!(confidence_bound, m)?)?;
    m.add_function(wrap_pyfunction!(mean_ordering, m)?)?;
    m.add_function(wrap_pyfunction!(aggregation_objective, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_mean, m)?)?;
    m.add_function(wrap_pyfunction!(lb_kmeans, m)?)?;
    Ok(())
}
