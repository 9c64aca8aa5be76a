use std::path::{Path, PathBuf};

use lovasz_bregman::io;
use lovasz_bregman::{
    aggregation_objective, auc_loss, confidence_bound, dcg_shortfall, induced_ordering, kendall_tau,
    lb_divergence, lb_kmeans, mean_ordering, ndcg_loss, spearman_footrule, ExtendedLovaszMallows,
    KMeansConfig, LbError, LovaszMallows, Permutation, ScoreMatrix, SetFunction, TieRule,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::{self, cell, emit, header, round_sig, Format, Report};
use crate::{Cli, CliError, Command, MallowsAction, Metric};

/// User-supplied text that fails to parse or validate is an input error.
fn arg<T>(what: &str, r: Result<T, LbError>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Input(format!("--{what}: {e}")))
}

fn vector(what: &str, s: &str) -> Result<Vec<f64>, CliError> {
    arg(what, io::parse_vector(s))
}

fn permutation(what: &str, s: &str) -> Result<Permutation, CliError> {
    arg(what, io::parse_permutation(s))
}

fn matrix(path: &Path) -> Result<ScoreMatrix, CliError> {
    io::load_score_matrix(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn generator(cli: &Cli, n: usize) -> Result<SetFunction, CliError> {
    Ok(cli.generator.build(n)?)
}

fn thetas(s: &str, rows: usize) -> Result<Vec<f64>, CliError> {
    let theta = vector("theta", s)?;
    match theta.len() {
        1 => Ok(vec![theta[0]; rows]),
        len if len == rows => Ok(theta),
        len => Err(CliError::Input(format!("--theta: expected 1 or {rows} values, got {len}"))),
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let out = cli.output.as_deref();
    match &cli.command {
        Command::Divergence { x, input, sigma } => {
            let sigma = permutation("sigma", sigma)?;
            let f = generator(cli, sigma.len())?;
            let row = |x: Vec<f64>| divergence_row(&f, x, &sigma, cli.tie_rule);
            if let Some(x) = x {
                let report = DivergenceReport {
                    generator: cli.generator.to_string(),
                    tie_rule: cli.tie_rule,
                    sigma: sigma.clone(),
                    row: row(vector("x", x)?)?,
                };
                emit(&report, cli.format, out)
            } else {
                let path = input.as_ref().expect("clap requires --x or --input");
                let scores = matrix(path)?;
                let results = scores.rows().iter().map(|x| row(x.clone())).collect::<Result<_, _>>()?;
                let report = DivergenceBatch {
                    generator: cli.generator.to_string(),
                    tie_rule: cli.tie_rule,
                    sigma: sigma.clone(),
                    input: path.clone(),
                    results,
                };
                emit(&report, cli.format, out)
            }
        }
        Command::Aggregate { input, weights, confidence_threshold } => {
            let scores = matrix(input)?;
            let weights = weights.as_deref().map(|w| vector("weights", w)).transpose()?;
            let f = generator(cli, scores.n())?;
            let (ordering, mean) = mean_ordering(&scores, weights.as_deref(), cli.tie_rule)?;
            let objective = aggregation_objective(&scores, &f, &ordering, weights.as_deref())?;
            let tv = total_variation(&mean);
            let report = AggregateReport {
                generator: cli.generator.to_string(),
                tie_rule: cli.tie_rule,
                input: input.clone(),
                weights,
                mean_vector: mean,
                ordering,
                objective,
                total_variation_of_mean: tv,
                low_confidence: tv < *confidence_threshold,
            };
            emit(&report, cli.format, out)
        }
        Command::Cluster { input, k, max_iter, tol } => {
            let scores = matrix(input)?;
            let f = generator(cli, scores.n())?;
            let mut config = KMeansConfig::new(*k);
            config.max_iter = *max_iter;
            config.tol = *tol;
            config.seed = cli.seed;
            let result = lb_kmeans(&scores, &f, &config)?;
            let report = ClusterReport {
                generator: cli.generator.to_string(),
                input: input.clone(),
                k: *k,
                seed: cli.seed,
                assignments: result.assignments,
                representatives: result.representatives,
                objective: result.objective,
                iterations: result.iterations,
                converged: result.converged,
                history: result.history,
            };
            emit(&report, cli.format, out)
        }
        Command::Eval { metric } => emit(&eval(metric, cli.tie_rule)?, cli.format, out),
        Command::Mallows { action } => mallows(cli, action),
        Command::Grid { sigma, resolution } => {
            let sigma = permutation("sigma", sigma)?;
            if !(2..=3).contains(&sigma.len()) {
                return Err(CliError::Input(format!("--sigma: grid needs 2 or 3 items, got {}", sigma.len())));
            }
            if *resolution < 2 {
                return Err(CliError::Input("--resolution must be at least 2".into()));
            }
            let f = generator(cli, sigma.len())?;
            let points = lattice(sigma.len(), *resolution)
                .into_iter()
                .map(|x| {
                    let value = lb_divergence(&f, &x, &sigma, cli.tie_rule)?;
                    Ok(GridPoint { x, value })
                })
                .collect::<Result<_, CliError>>()?;
            let report = GridReport {
                generator: cli.generator.to_string(),
                sigma,
                resolution: *resolution,
                points,
            };
            emit(&report, cli.format, out)
        }
    }
}

fn divergence_row(f: &SetFunction, x: Vec<f64>, sigma: &Permutation, rule: TieRule) -> Result<DivergenceRow, CliError> {
    let value = lb_divergence(f, &x, sigma, rule)?;
    Ok(DivergenceRow {
        sigma_x: induced_ordering(&x, rule)?,
        confidence_bound: confidence_bound(f, &x)?,
        value,
        x,
    })
}

/// `Σ_i |μ_(i) − μ_(i+1)|` over the sorted vector.
fn total_variation(mean: &[f64]) -> f64 {
    let mut sorted = mean.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted.windows(2).map(|w| (w[0] - w[1]).abs()).sum()
}

/// Points `(i₁, …, i_d) / (r − 1)` with the first coordinate varying slowest.
fn lattice(dims: usize, resolution: usize) -> Vec<Vec<f64>> {
    let step = (resolution - 1) as f64;
    let mut points = vec![Vec::new()];
    for _ in 0..dims {
        points = points
            .into_iter()
            .flat_map(|p: Vec<f64>| {
                (0..resolution).map(move |i| {
                    let mut q = p.clone();
                    q.push(i as f64 / step);
                    q
                })
            })
            .collect();
    }
    points
}

fn eval(metric: &Metric, rule: TieRule) -> Result<EvalReport, CliError> {
    let report = match metric {
        Metric::Ndcg { relevance, sigma, cutoff, discount } => {
            let r = vector("relevance", relevance)?;
            let sigma = permutation("sigma", sigma)?;
            let k = cutoff.unwrap_or(r.len());
            let profile = arg("discount", io::parse_discount_profile(discount, r.len(), k))?;
            let ideal = induced_ordering(&r, rule)?;
            EvalReport {
                metric: "ndcg",
                value: Value::from(round_sig(ndcg_loss(&r, &sigma, &profile)?)),
                numerator: Some(dcg_shortfall(&r, &sigma, &profile)?),
                inputs: json!({
                    "relevance": r, "sigma": sigma, "ideal": ideal, "cutoff": k, "discount": profile.values(),
                }),
            }
        }
        Metric::Auc { good, bad, sigma } => {
            let good = arg("good", io::parse_items(good))?;
            let bad = arg("bad", io::parse_items(bad))?;
            let sigma = permutation("sigma", sigma)?;
            EvalReport {
                metric: "auc",
                value: Value::from(round_sig(auc_loss(&good, &bad, &sigma)?)),
                numerator: None,
                inputs: json!({ "good": good, "bad": bad, "sigma": sigma }),
            }
        }
        Metric::Kendall { sigma, pi } | Metric::Spearman { sigma, pi } => {
            let sigma = permutation("sigma", sigma)?;
            let pi = permutation("pi", pi)?;
            let (name, value) = match metric {
                Metric::Kendall { .. } => ("kendall", kendall_tau(&sigma, &pi)?),
                _ => ("spearman", spearman_footrule(&sigma, &pi)?),
            };
            EvalReport {
                metric: name,
                value: Value::from(value),
                numerator: None,
                inputs: json!({ "sigma": sigma, "pi": pi }),
            }
        }
    };
    Ok(report)
}

fn mallows(cli: &Cli, action: &MallowsAction) -> Result<(), CliError> {
    let out = cli.output.as_deref();
    match action {
        MallowsAction::Density { sigma, theta, x, input } => {
            let sigma = permutation("sigma", sigma)?;
            let f = generator(cli, sigma.len())?;
            let report = if let Some(x) = x {
                let x = vector("x", x)?;
                let theta = arg("theta", theta.trim().parse::<f64>().map_err(|e| LbError::Parse(e.to_string())))?;
                let model = LovaszMallows::new(f, sigma.clone(), theta)?;
                MallowsDensityReport {
                    model: "score",
                    generator: cli.generator.to_string(),
                    sigma,
                    theta: vec![theta],
                    x: Some(x.clone()),
                    input: None,
                    log_density: model.log_density_unnormalized(&x)?,
                    normalized: false,
                }
            } else {
                let path = input.as_ref().expect("clap requires --x or --input");
                let scores = matrix(path)?;
                let theta = thetas(theta, scores.len())?;
                let model = ExtendedLovaszMallows::new(f, scores, theta.clone())?;
                let density = model.extended_log_density(&sigma)?;
                MallowsDensityReport {
                    model: "extended",
                    generator: cli.generator.to_string(),
                    sigma,
                    theta,
                    x: None,
                    input: Some(path.clone()),
                    log_density: density.log_density,
                    normalized: density.normalized,
                }
            };
            emit(&report, cli.format, out)
        }
        MallowsAction::Logz { sigma, theta, samples } => {
            let sigma = permutation("sigma", sigma)?;
            let f = generator(cli, sigma.len())?;
            let model = LovaszMallows::new(f, sigma.clone(), *theta)?;
            let estimate = model.estimate_log_z(*samples, cli.seed)?;
            let report = LogZReport {
                generator: cli.generator.to_string(),
                sigma,
                theta: *theta,
                samples: *samples,
                seed: cli.seed,
                log_z: estimate.log_z,
                std_error: estimate.std_error,
            };
            emit(&report, cli.format, out)
        }
        MallowsAction::Map { input, theta } => {
            let scores = matrix(input)?;
            let theta = thetas(theta, scores.len())?;
            let f = generator(cli, scores.n())?;
            let model = ExtendedLovaszMallows::new(f, scores, theta.clone())?;
            let map = model.map_permutation()?;
            let density = model.extended_log_density(&map)?;
            let report = MapReport {
                generator: cli.generator.to_string(),
                input: input.clone(),
                theta,
                log_density: density.normalized.then_some(density.log_density),
                map,
            };
            emit(&report, cli.format, out)
        }
    }
}

#[derive(Serialize)]
struct DivergenceRow {
    x: Vec<f64>,
    #[serde(serialize_with = "report::sig")]
    value: f64,
    sigma_x: Permutation,
    #[serde(serialize_with = "report::sig")]
    confidence_bound: f64,
}

impl DivergenceRow {
    fn cells(&self) -> Vec<String> {
        vec![cell(self.value), self.sigma_x.to_string(), cell(self.confidence_bound)]
    }
}

#[derive(Serialize)]
struct DivergenceReport {
    generator: String,
    tie_rule: TieRule,
    sigma: Permutation,
    #[serde(flatten)]
    row: DivergenceRow,
}

impl Report for DivergenceReport {
    fn header(&self) -> Vec<String> {
        header(&["value", "sigma_x", "confidence_bound"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        vec![self.row.cells()]
    }
}

#[derive(Serialize)]
struct DivergenceBatch {
    generator: String,
    tie_rule: TieRule,
    sigma: Permutation,
    input: PathBuf,
    results: Vec<DivergenceRow>,
}

impl Report for DivergenceBatch {
    fn header(&self) -> Vec<String> {
        header(&["row", "value", "sigma_x", "confidence_bound"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.results
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut cells = vec![(i + 1).to_string()];
                cells.extend(r.cells());
                cells
            })
            .collect()
    }
}

#[derive(Serialize)]
struct AggregateReport {
    generator: String,
    tie_rule: TieRule,
    input: PathBuf,
    weights: Option<Vec<f64>>,
    #[serde(serialize_with = "report::sig_vec")]
    mean_vector: Vec<f64>,
    ordering: Permutation,
    #[serde(serialize_with = "report::sig")]
    objective: f64,
    #[serde(serialize_with = "report::sig")]
    total_variation_of_mean: f64,
    low_confidence: bool,
}

impl Report for AggregateReport {
    fn header(&self) -> Vec<String> {
        header(&["rank", "item", "mean"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        (1..=self.ordering.len())
            .map(|r| {
                let item = self.ordering.item_at(r);
                vec![r.to_string(), item.to_string(), cell(self.mean_vector[item - 1])]
            })
            .collect()
    }
}

#[derive(Serialize)]
struct ClusterReport {
    generator: String,
    input: PathBuf,
    k: usize,
    seed: u64,
    /// 0-based cluster index per row.
    assignments: Vec<usize>,
    representatives: Vec<Permutation>,
    #[serde(serialize_with = "report::sig")]
    objective: f64,
    iterations: usize,
    converged: bool,
    #[serde(serialize_with = "report::sig_vec")]
    history: Vec<f64>,
}

impl Report for ClusterReport {
    fn header(&self) -> Vec<String> {
        header(&["row", "cluster", "representative"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.assignments
            .iter()
            .enumerate()
            .map(|(i, &c)| vec![(i + 1).to_string(), c.to_string(), self.representatives[c].to_string()])
            .collect()
    }
}

#[derive(Serialize)]
struct EvalReport {
    metric: &'static str,
    value: Value,
    #[serde(serialize_with = "report::sig_opt", skip_serializing_if = "Option::is_none")]
    numerator: Option<f64>,
    inputs: Value,
}

impl Report for EvalReport {
    fn header(&self) -> Vec<String> {
        header(&["metric", "value"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![self.metric.to_string(), self.value.to_string()]]
    }
}

#[derive(Serialize)]
struct MallowsDensityReport {
    model: &'static str,
    generator: String,
    sigma: Permutation,
    theta: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<PathBuf>,
    #[serde(serialize_with = "report::sig")]
    log_density: f64,
    normalized: bool,
}

impl Report for MallowsDensityReport {
    fn header(&self) -> Vec<String> {
        header(&["model", "log_density", "normalized"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![self.model.to_string(), cell(self.log_density), self.normalized.to_string()]]
    }
}

#[derive(Serialize)]
struct LogZReport {
    generator: String,
    sigma: Permutation,
    theta: f64,
    samples: usize,
    seed: u64,
    #[serde(serialize_with = "report::sig")]
    log_z: f64,
    #[serde(serialize_with = "report::sig")]
    std_error: f64,
}

impl Report for LogZReport {
    fn header(&self) -> Vec<String> {
        header(&["log_z", "std_error", "samples", "seed"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![cell(self.log_z), cell(self.std_error), self.samples.to_string(), self.seed.to_string()]]
    }
}

#[derive(Serialize)]
struct MapReport {
    generator: String,
    input: PathBuf,
    theta: Vec<f64>,
    map: Permutation,
    /// Present when the model is small enough to normalise exactly.
    #[serde(serialize_with = "report::sig_opt")]
    log_density: Option<f64>,
}

impl Report for MapReport {
    fn header(&self) -> Vec<String> {
        header(&["rank", "item"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        (1..=self.map.len())
            .map(|r| vec![r.to_string(), self.map.item_at(r).to_string()])
            .collect()
    }
}

#[derive(Serialize)]
struct GridPoint {
    x: Vec<f64>,
    #[serde(serialize_with = "report::sig")]
    value: f64,
}

#[derive(Serialize)]
struct GridReport {
    generator: String,
    sigma: Permutation,
    resolution: usize,
    points: Vec<GridPoint>,
}

impl Report for GridReport {
    fn header(&self) -> Vec<String> {
        let mut names: Vec<String> = (1..=self.sigma.len()).map(|i| format!("x{i}")).collect();
        names.push("value".into());
        names
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.points
            .iter()
            .map(|p| {
                let mut cells: Vec<String> = p.x.iter().map(|v| v.to_string()).collect();
                cells.push(cell(p.value));
                cells
            })
            .collect()
    }

    fn default_format(&self) -> Format {
        Format::Csv
    }
}
