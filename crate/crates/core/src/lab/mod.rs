//! Experiment runner: builds point sets, assembles and solves the configured
//! problem over the n-sweep, evaluates errors, and renders deterministic CSV.

pub mod config;

pub use config::{ExperimentConfig, ProblemKind};

use ndarray::Array1;

use crate::activation::{eval_gradients, eval_values, NeuronSet};
use crate::assembly::{self, chunks};
use crate::collocation::{
    build_pde_system, build_regression_system, tensor_collocation_points, BoundaryCondition,
    CollocationSet,
};
use crate::error::{Error, Result};
use crate::linalg::{condition_number, loglog_slope, singular_values, solve_spd, svd_lstsq};
use crate::points::{
    circle_grid, fibonacci_sphere, petrushev_grid, qmc_sphere, random_box, random_sphere,
    sphere_scheme, HiddenParams, RngSpec, DEFAULT_QMC_EPS, DEFAULT_SOBOL_SKIP,
};
use crate::quadrature::{piecewise_tensor_rule, qmc_rule, BoxDomain, QuadratureRule};
use crate::targets::TargetFunction;

/// One row of a convergence table. `None` errors mean the solve failed or
/// produced non-finite output (reported as "unstable" in CSV).
#[derive(Debug, Clone)]
pub struct Row {
    pub n: usize,
    pub radius: Option<f64>,
    pub l2_error: Option<f64>,
    pub h1_error: Option<f64>,
    pub condition: Option<f64>,
    /// Seconds spent on assembly + solve; kept out of the CSV bytes so reruns
    /// are byte-identical.
    pub wall_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub rows: Vec<Row>,
}

impl ConvergenceTable {
    /// Order between consecutive rows sharing a radius: log(e_prev/e_i)/log(n_i/n_prev).
    pub fn orders(&self, errors: impl Fn(&Row) -> Option<f64>) -> Vec<Option<f64>> {
        let mut out = Vec::with_capacity(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            let prev = self.rows[..i]
                .iter()
                .rev()
                .find(|r| r.radius == row.radius && r.n != row.n);
            let order = match (prev, errors(row)) {
                (Some(p), Some(e)) => match errors(p) {
                    Some(ep) if e > 0.0 && ep > 0.0 => {
                        Some((ep / e).ln() / (row.n as f64 / p.n as f64).ln())
                    }
                    _ => None,
                },
                _ => None,
            };
            out.push(order);
        }
        out
    }

    /// OLS slope of log(l2 error) against log(n) over the stable rows.
    pub fn fitted_l2_slope(&self) -> Result<f64> {
        let mut ns = Vec::new();
        let mut es = Vec::new();
        for r in &self.rows {
            if let Some(e) = r.l2_error {
                if e > 0.0 {
                    ns.push(r.n as f64);
                    es.push(e);
                }
            }
        }
        loglog_slope(&ns, &es)
    }

    /// Smallest stable L² error across all rows.
    pub fn min_l2(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.l2_error).fold(None, |m, e| {
            Some(m.map_or(e, |m: f64| m.min(e)))
        })
    }

    pub fn min_h1(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.h1_error).fold(None, |m, e| {
            Some(m.map_or(e, |m: f64| m.min(e)))
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub name: String,
    pub config_hash: String,
    pub per_seed: Vec<(u64, ConvergenceTable)>,
    /// Geometric mean across seeds; equals the single table when only one
    /// seed is used.
    pub geomean: ConvergenceTable,
}

fn fmt_value(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:.10e}"),
        None => "unstable".to_string(),
    }
}

fn fmt_order(o: Option<f64>) -> String {
    match o {
        Some(o) => format!("{o:.3}"),
        None => "*".to_string(),
    }
}

fn render_table(name: &str, hash: &str, seed_label: &str, table: &ConvergenceTable) -> String {
    let mut out = String::new();
    out.push_str("# schema=1\n");
    out.push_str(&format!("# experiment={name}\n"));
    out.push_str(&format!("# config_hash={hash}\n"));
    out.push_str(&format!("# seed={seed_label}\n"));
    out.push_str("n,radius,l2_error,l2_order,h1_error,h1_order,cond\n");
    let l2_orders = table.orders(|r| r.l2_error);
    let h1_orders = table.orders(|r| r.h1_error);
    for (i, row) in table.rows.iter().enumerate() {
        let radius = row.radius.map(|r| format!("{r}")).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.n,
            radius,
            fmt_value(row.l2_error),
            fmt_order(l2_orders[i]),
            fmt_value(row.h1_error),
            fmt_order(h1_orders[i]),
            fmt_value(row.condition),
        ));
    }
    out
}

impl RunOutput {
    pub fn geomean_csv(&self) -> String {
        render_table(&self.name, &self.config_hash, "geomean", &self.geomean)
    }

    pub fn seed_csv(&self, seed: u64) -> Option<String> {
        self.per_seed
            .iter()
            .find(|(s, _)| *s == seed)
            .map(|(s, t)| render_table(&self.name, &self.config_hash, &s.to_string(), t))
    }
}

/// L² error sqrt(sum_k w_k (u(x_k) - sum_j a_j phi_j(x_k))^2).
pub fn l2_error(
    target: &TargetFunction,
    neurons: &NeuronSet,
    coeffs: &[f64],
    rule: &QuadratureRule,
) -> Result<f64> {
    let a = Array1::from_vec(coeffs.to_vec());
    let mut acc = 0.0;
    for (pts, weights) in chunks(rule) {
        let phi = eval_values(neurons, pts)?.entries;
        let approx = phi.dot(&a);
        for (i, &w) in weights.iter().enumerate() {
            let u = target.value(pts.row(i).as_slice().expect("contiguous"));
            acc += w * (u - approx[i]).powi(2);
        }
    }
    Ok(acc.max(0.0).sqrt())
}

/// H¹-seminorm error: L² norm of the gradient of the error.
pub fn h1_error(
    target: &TargetFunction,
    neurons: &NeuronSet,
    coeffs: &[f64],
    rule: &QuadratureRule,
) -> Result<f64> {
    let a = Array1::from_vec(coeffs.to_vec());
    let d = neurons.dim();
    let mut acc = 0.0;
    for (pts, weights) in chunks(rule) {
        let grads = eval_gradients(neurons, pts)?;
        let approx: Vec<Array1<f64>> = grads.iter().map(|g| g.entries.dot(&a)).collect();
        for (i, &w) in weights.iter().enumerate() {
            let g = target.gradient(pts.row(i).as_slice().expect("contiguous"));
            for axis in 0..d {
                acc += w * (g[axis] - approx[axis][i]).powi(2);
            }
        }
    }
    Ok(acc.max(0.0).sqrt())
}

/// Split a requested neuron count into the Petrushev (n1, n2) grid sizes.
fn petrushev_split(n: usize, d: usize) -> (usize, usize) {
    match d {
        1 => (2, n.div_ceil(2)),
        _ => {
            let n1 = (n as f64).sqrt().ceil() as usize;
            (n1.max(1), n.div_ceil(n1.max(1)))
        }
    }
}

fn build_params(
    cfg: &ExperimentConfig,
    n: usize,
    seed: u64,
    radius: Option<f64>,
) -> Result<HiddenParams> {
    let d = cfg.experiment.dimension;
    let ps = &cfg.pointset;
    match ps.scheme.as_str() {
        "circle_grid" => circle_grid(n),
        "fibonacci_sphere" => fibonacci_sphere(n),
        "random_sphere" => random_sphere(n, d, &RngSpec::new(seed)),
        "qmc_sphere" => qmc_sphere(
            n,
            d,
            ps.eps.unwrap_or(DEFAULT_QMC_EPS),
            ps.skip.unwrap_or(DEFAULT_SOBOL_SKIP),
        ),
        "random_box" => random_box(
            n,
            d,
            ps.half_width.expect("validated"),
            &RngSpec::new(seed),
        ),
        "petrushev_grid" => {
            let (n1, n2) = petrushev_split(n, d);
            petrushev_grid(n1, n2, ps.r1.expect("validated"), ps.r2.expect("validated"), d)
        }
        "sphere_scheme" => {
            let r = radius.ok_or_else(|| Error::Config("sphere_scheme needs a radius".into()))?;
            sphere_scheme(n, d, r)
        }
        other => Err(Error::Unknown {
            kind: "pointset scheme",
            name: other.to_string(),
        }),
    }
}

fn build_rule(
    section: &config::QuadratureSection,
    domain: &BoxDomain,
    paper: Option<&config::PaperScaleSection>,
) -> Result<QuadratureRule> {
    match section.kind.as_str() {
        "tensor" => {
            let cells = paper
                .and_then(|p| p.cells_per_axis)
                .unwrap_or_else(|| section.cells_per_axis.expect("validated"));
            let order = paper
                .and_then(|p| p.order)
                .unwrap_or_else(|| section.order.expect("validated"));
            piecewise_tensor_rule(domain, cells, order)
        }
        "qmc" => {
            let n = paper
                .and_then(|p| p.n)
                .unwrap_or_else(|| section.n.expect("validated"));
            qmc_rule(n, domain, section.skip.unwrap_or(DEFAULT_SOBOL_SKIP))
        }
        other => Err(Error::Config(format!("unknown quadrature kind `{other}`"))),
    }
}

/// The domain is (-1,1)^d in every experiment.
pub fn experiment_domain(d: usize) -> BoxDomain {
    BoxDomain::cube(-1.0, 1.0, d).expect("unit cube")
}

fn error_rule(cfg: &ExperimentConfig, paper_scale: bool) -> Result<QuadratureRule> {
    let domain = experiment_domain(cfg.experiment.dimension);
    let paper = if paper_scale { cfg.paper_scale.as_ref() } else { None };
    if let Some(q) = &cfg.error_quadrature {
        build_rule(q, &domain, None)
    } else if let Some(q) = &cfg.quadrature {
        build_rule(q, &domain, paper)
    } else {
        Err(Error::Config(
            "no [error_quadrature] or [quadrature] section for error evaluation".into(),
        ))
    }
}

struct Solved {
    coefficients: Vec<f64>,
    condition: f64,
}

fn solve_problem(
    cfg: &ExperimentConfig,
    neurons: &NeuronSet,
    target: &TargetFunction,
    paper_scale: bool,
) -> Result<Solved> {
    let domain = experiment_domain(cfg.experiment.dimension);
    let rcond = cfg.solver.rcond;
    let paper = if paper_scale { cfg.paper_scale.as_ref() } else { None };
    match cfg.experiment.problem {
        ProblemKind::L2MinVariational | ProblemKind::EllipticVariational => {
            let q = cfg.quadrature.as_ref().expect("validated");
            let rule = build_rule(q, &domain, paper)?;
            let flavor = if cfg.experiment.problem == ProblemKind::L2MinVariational {
                assembly::Flavor::Mass
            } else {
                assembly::Flavor::EnergyH1
            };
            let f: Box<dyn Fn(&[f64]) -> f64> = match flavor {
                assembly::Flavor::Mass => Box::new(move |x: &[f64]| target.value(x)),
                assembly::Flavor::EnergyH1 => Box::new(move |x: &[f64]| target.elliptic_rhs(x)),
            };
            let sys = assembly::galerkin_system(neurons, &rule, f.as_ref(), flavor)?;
            let report = solve_spd(sys.matrix.view(), sys.rhs.view())?;
            Ok(Solved {
                coefficients: report.coefficients,
                condition: report.condition_number,
            })
        }
        ProblemKind::L2Regression => {
            let c = cfg.collocation.as_ref().expect("validated");
            let colloc = tensor_collocation_points(
                &domain,
                c.per_axis,
                c.include_boundary,
                BoundaryCondition::None,
            )?;
            let sys = build_regression_system(neurons, &colloc, &|x| target.value(x))?;
            let report = svd_lstsq(sys.matrix.view(), sys.rhs.view(), rcond)?;
            Ok(Solved {
                coefficients: report.coefficients,
                condition: report.condition_number,
            })
        }
        ProblemKind::EllipticCollocation => {
            let c = cfg.collocation.as_ref().expect("validated");
            let bc = match c.boundary.as_str() {
                "dirichlet" => BoundaryCondition::Dirichlet,
                _ => BoundaryCondition::None,
            };
            let mut colloc =
                tensor_collocation_points(&domain, c.per_axis, c.include_boundary, bc)?;
            let li = vec![c.lambda_interior; colloc.n_interior()];
            let lb = vec![c.lambda_boundary; colloc.n_boundary()];
            colloc = CollocationSet::with_penalties(colloc.interior, colloc.boundary, li, lb)?;
            let sys = build_pde_system(
                neurons,
                &colloc,
                bc,
                &|x| target.elliptic_rhs(x),
                &|x| target.dirichlet_trace(x),
            )?;
            let report = svd_lstsq(sys.matrix.view(), sys.rhs.view(), rcond)?;
            Ok(Solved {
                coefficients: report.coefficients,
                condition: report.condition_number,
            })
        }
    }
}

fn run_seed(
    cfg: &ExperimentConfig,
    seed: u64,
    target: &TargetFunction,
    err_rule: &QuadratureRule,
    paper_scale: bool,
) -> Result<ConvergenceTable> {
    let activation = cfg.activation()?;
    let mut rows = Vec::new();
    for &n in &cfg.experiment.neuron_counts {
        for radius in cfg.radii() {
            let started = std::time::Instant::now();
            let attempt = (|| -> Result<(usize, f64, f64, f64)> {
                let params = build_params(cfg, n, seed, radius)?;
                let actual_n = params.len();
                let neurons = NeuronSet::new(activation, params)?;
                let solved = solve_problem(cfg, &neurons, target, paper_scale)?;
                let l2 = l2_error(target, &neurons, &solved.coefficients, err_rule)?;
                let h1 = h1_error(target, &neurons, &solved.coefficients, err_rule)?;
                if !l2.is_finite() || !h1.is_finite() {
                    return Err(Error::NonFinite("error evaluation".into()));
                }
                Ok((actual_n, l2, h1, solved.condition))
            })();
            let wall_seconds = started.elapsed().as_secs_f64();
            match attempt {
                Ok((actual_n, l2, h1, cond)) => rows.push(Row {
                    n: actual_n,
                    radius,
                    l2_error: Some(l2),
                    h1_error: Some(h1),
                    condition: cond.is_finite().then_some(cond),
                    wall_seconds,
                }),
                // instability at large n is an expected, reportable outcome
                Err(Error::Config(msg)) => return Err(Error::Config(msg)),
                Err(_) => rows.push(Row {
                    n,
                    radius,
                    l2_error: None,
                    h1_error: None,
                    condition: None,
                    wall_seconds,
                }),
            }
        }
    }
    Ok(ConvergenceTable { rows })
}

fn geomean_tables(tables: &[(u64, ConvergenceTable)]) -> ConvergenceTable {
    let nrows = tables[0].1.rows.len();
    let mut rows = Vec::with_capacity(nrows);
    for i in 0..nrows {
        let template = &tables[0].1.rows[i];
        let geo = |pick: &dyn Fn(&Row) -> Option<f64>| -> Option<f64> {
            let mut log_sum = 0.0;
            for (_, t) in tables {
                match pick(&t.rows[i]) {
                    Some(v) if v > 0.0 => log_sum += v.ln(),
                    _ => return None,
                }
            }
            Some((log_sum / tables.len() as f64).exp())
        };
        rows.push(Row {
            n: template.n,
            radius: template.radius,
            l2_error: geo(&|r| r.l2_error),
            h1_error: geo(&|r| r.h1_error),
            condition: geo(&|r| r.condition),
            wall_seconds: tables.iter().map(|(_, t)| t.rows[i].wall_seconds).sum(),
        });
    }
    ConvergenceTable { rows }
}

/// Run the full experiment: every seed (for random schemes), every n, every
/// radius. Row failures are recorded as unstable, not fatal.
pub fn run(cfg: &ExperimentConfig, paper_scale: bool) -> Result<RunOutput> {
    cfg.validate()?;
    let target = cfg.target()?;
    let err_rule = error_rule(cfg, paper_scale)?;
    let seeds: Vec<u64> = if cfg.is_random_scheme() {
        cfg.experiment.seeds.clone()
    } else {
        cfg.experiment.seeds[..1].to_vec()
    };
    let mut per_seed = Vec::with_capacity(seeds.len());
    for &seed in &seeds {
        let table = run_seed(cfg, seed, &target, &err_rule, paper_scale)?;
        per_seed.push((seed, table));
    }
    let geomean = geomean_tables(&per_seed);
    Ok(RunOutput {
        name: cfg.experiment.name.clone(),
        config_hash: cfg.hash(),
        per_seed,
        geomean,
    })
}

#[derive(Debug, Clone)]
pub struct ConditionRow {
    pub n: usize,
    pub condition: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ConditionStudy {
    pub name: String,
    pub config_hash: String,
    pub rows: Vec<ConditionRow>,
    /// Fitted log-log slope over the finite rows, when at least two exist.
    pub slope: Option<f64>,
}

impl ConditionStudy {
    pub fn csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# schema=1\n");
        out.push_str(&format!("# experiment={}\n", self.name));
        out.push_str(&format!("# config_hash={}\n", self.config_hash));
        match self.slope {
            Some(s) => out.push_str(&format!("# fitted_slope={s:.6}\n")),
            None => out.push_str("# fitted_slope=*\n"),
        }
        out.push_str("n,cond\n");
        for r in &self.rows {
            out.push_str(&format!("{},{}\n", r.n, fmt_value(r.condition)));
        }
        out
    }
}

/// Mass-matrix condition numbers over the n-sweep, geometric mean over seeds
/// for random schemes.
pub fn condition_study(cfg: &ExperimentConfig, paper_scale: bool) -> Result<ConditionStudy> {
    cfg.validate()?;
    let q = cfg
        .quadrature
        .as_ref()
        .ok_or_else(|| Error::Config("condition study requires a [quadrature] section".into()))?;
    let domain = experiment_domain(cfg.experiment.dimension);
    let paper = if paper_scale { cfg.paper_scale.as_ref() } else { None };
    let rule = build_rule(q, &domain, paper)?;
    let activation = cfg.activation()?;
    let seeds: Vec<u64> = if cfg.is_random_scheme() {
        cfg.experiment.seeds.clone()
    } else {
        cfg.experiment.seeds[..1].to_vec()
    };
    let radius = cfg.radii()[0];
    let mut rows = Vec::new();
    for &n in &cfg.experiment.neuron_counts {
        let mut log_sum = 0.0;
        let mut finite = true;
        let mut actual_n = n;
        for &seed in &seeds {
            let params = build_params(cfg, n, seed, radius)?;
            actual_n = params.len();
            let neurons = NeuronSet::new(activation, params)?;
            let m = assembly::mass_matrix(&neurons, &rule)?;
            let k = condition_number(m.view())?;
            if k.is_finite() && k > 0.0 {
                log_sum += k.ln();
            } else {
                finite = false;
            }
        }
        rows.push(ConditionRow {
            n: actual_n,
            condition: finite.then(|| (log_sum / seeds.len() as f64).exp()),
        });
    }
    let mut ns = Vec::new();
    let mut ks = Vec::new();
    for r in &rows {
        if let Some(k) = r.condition {
            ns.push(r.n as f64);
            ks.push(k);
        }
    }
    let slope = if ns.len() >= 2 {
        loglog_slope(&ns, &ks).ok()
    } else {
        None
    };
    Ok(ConditionStudy {
        name: cfg.experiment.name.clone(),
        config_hash: cfg.hash(),
        rows,
        slope,
    })
}

/// Singular spectrum of the configured system at the largest n (first seed,
/// first radius), as "index,sigma" CSV rows.
pub fn spectrum(cfg: &ExperimentConfig, paper_scale: bool) -> Result<String> {
    cfg.validate()?;
    let target = cfg.target()?;
    let activation = cfg.activation()?;
    let n = *cfg.experiment.neuron_counts.last().expect("validated");
    let seed = cfg.experiment.seeds[0];
    let radius = cfg.radii()[0];
    let params = build_params(cfg, n, seed, radius)?;
    let neurons = NeuronSet::new(activation, params)?;
    let domain = experiment_domain(cfg.experiment.dimension);
    let paper = if paper_scale { cfg.paper_scale.as_ref() } else { None };
    let sigma = match cfg.experiment.problem {
        ProblemKind::L2MinVariational | ProblemKind::EllipticVariational => {
            let q = cfg.quadrature.as_ref().expect("validated");
            let rule = build_rule(q, &domain, paper)?;
            let m = if cfg.experiment.problem == ProblemKind::L2MinVariational {
                assembly::mass_matrix(&neurons, &rule)?
            } else {
                assembly::energy_matrix(&neurons, &rule)?
            };
            singular_values(m.view())?
        }
        ProblemKind::L2Regression => {
            let c = cfg.collocation.as_ref().expect("validated");
            let colloc = tensor_collocation_points(
                &domain,
                c.per_axis,
                c.include_boundary,
                BoundaryCondition::None,
            )?;
            let sys = build_regression_system(&neurons, &colloc, &|x| target.value(x))?;
            singular_values(sys.matrix.view())?
        }
        ProblemKind::EllipticCollocation => {
            let c = cfg.collocation.as_ref().expect("validated");
            let bc = match c.boundary.as_str() {
                "dirichlet" => BoundaryCondition::Dirichlet,
                _ => BoundaryCondition::None,
            };
            let colloc =
                tensor_collocation_points(&domain, c.per_axis, c.include_boundary, bc)?;
            let sys = build_pde_system(
                &neurons,
                &colloc,
                bc,
                &|x| target.elliptic_rhs(x),
                &|x| target.dirichlet_trace(x),
            )?;
            singular_values(sys.matrix.view())?
        }
    };
    let mut out = String::new();
    out.push_str("# schema=1\n");
    out.push_str(&format!("# experiment={}\n", cfg.experiment.name));
    out.push_str(&format!("# config_hash={}\n", cfg.hash()));
    out.push_str("index,sigma\n");
    for (i, s) in sigma.iter().enumerate() {
        out.push_str(&format!("{},{s:.10e}\n", i + 1));
    }
    Ok(out)
}

/// Point-set CSV for `lab pointset`: one joint parameter vector per row.
pub fn pointset_csv(spec: &str, n: usize, d: usize, seed: u64) -> Result<String> {
    let params = match spec {
        "circle_grid" => circle_grid(n)?,
        "fibonacci_sphere" => fibonacci_sphere(n)?,
        "random_sphere" => random_sphere(n, d, &RngSpec::new(seed))?,
        "qmc_sphere" => qmc_sphere(n, d, DEFAULT_QMC_EPS, DEFAULT_SOBOL_SKIP)?,
        other => {
            // radius-parameterized forms: "sphere_scheme:r=4" etc.
            let (kind, args) = other.split_once(':').unwrap_or((other, ""));
            let parse_arg = |key: &str| -> Option<f64> {
                args.split(',').find_map(|part| {
                    part.split_once('=')
                        .filter(|(k, _)| *k == key)
                        .and_then(|(_, v)| v.parse().ok())
                })
            };
            match kind {
                "sphere_scheme" => {
                    let r = parse_arg("r").ok_or_else(|| Error::Config("sphere_scheme:r=<radius>".into()))?;
                    sphere_scheme(n, d, r)?
                }
                "random_box" => {
                    let r = parse_arg("r").ok_or_else(|| Error::Config("random_box:r=<half-width>".into()))?;
                    random_box(n, d, r, &RngSpec::new(seed))?
                }
                "petrushev_grid" => {
                    let r1 = parse_arg("r1").ok_or_else(|| Error::Config("petrushev_grid:r1=..,r2=..".into()))?;
                    let r2 = parse_arg("r2").ok_or_else(|| Error::Config("petrushev_grid:r1=..,r2=..".into()))?;
                    let (n1, n2) = petrushev_split(n, d);
                    petrushev_grid(n1, n2, r1, r2, d)?
                }
                _ => {
                    return Err(Error::Unknown {
                        kind: "pointset scheme",
                        name: spec.to_string(),
                    })
                }
            }
        }
    };
    let mut out = String::new();
    out.push_str("# schema=1\n");
    out.push_str(&format!("# scheme={}\n", params.provenance.label()));
    out.push_str(&format!("# n={} d={}\n", params.len(), params.dim()));
    let header: Vec<String> = (0..params.dim()).map(|a| format!("w{a}")).collect();
    out.push_str(&format!("{},b\n", header.join(",")));
    for j in 0..params.len() {
        let ws: Vec<String> = params.weights.row(j).iter().map(|w| format!("{w:.10e}")).collect();
        out.push_str(&format!("{},{:.10e}\n", ws.join(","), params.biases[j]));
    }
    Ok(out)
}
