//! Hidden-parameter generators: quasi-uniform sphere grids, random sampling,
//! QMC-on-sphere, and the two deterministic tanh schemes.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Sobol dimensions beyond this are rejected.
pub const MAX_SOBOL_DIM: usize = 64;

/// Clipping constant for the Gaussian quantile map.
pub const DEFAULT_QMC_EPS: f64 = 1e-10;

/// Default number of leading Sobol elements to drop. The first element of the
/// sequence is the all-zeros point, which the quantile map sends to -inf.
pub const DEFAULT_SOBOL_SKIP: usize = 1;

const ZERO_NORM_GUARD: f64 = 1e-14;

/// A unit-norm direction on the d-sphere, stored as d+1 coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl SpherePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "sphere point has norm {norm}, expected 1"
            )));
        }
        Ok(SpherePoint { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// How a parameter set was generated.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    CircleGrid,
    FibonacciSphere,
    RandomSphere { seed: u64 },
    QmcSphere { eps: f64, skip: usize },
    RandomBox { half_width: f64, seed: u64 },
    PetrushevGrid { r1: f64, r2: f64 },
    SphereScheme { radius: f64 },
}

impl Provenance {
    /// Radius of the sphere the joint parameters (w_j, b_j) live on, when they
    /// do live on one.
    pub fn scheme_radius(&self) -> Option<f64> {
        match self {
            Provenance::CircleGrid
            | Provenance::FibonacciSphere
            | Provenance::RandomSphere { .. }
            | Provenance::QmcSphere { .. } => Some(1.0),
            Provenance::SphereScheme { radius } => Some(*radius),
            Provenance::RandomBox { .. } | Provenance::PetrushevGrid { .. } => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Provenance::CircleGrid => "circle_grid",
            Provenance::FibonacciSphere => "fibonacci_sphere",
            Provenance::RandomSphere { .. } => "random_sphere",
            Provenance::QmcSphere { .. } => "qmc_sphere",
            Provenance::RandomBox { .. } => "random_box",
            Provenance::PetrushevGrid { .. } => "petrushev_grid",
            Provenance::SphereScheme { .. } => "sphere_scheme",
        }
    }
}

/// Fixed hidden-layer parameters {(w_j, b_j)}_{j=1..n} for input dimension d.
/// `weights` is n x d, one row per neuron.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenParams {
    pub weights: Array2<f64>,
    pub biases: Array1<f64>,
    pub provenance: Provenance,
}

impl HiddenParams {
    fn from_joint(joint: Vec<Vec<f64>>, provenance: Provenance) -> Self {
        let n = joint.len();
        let dim = joint[0].len() - 1;
        let mut weights = Array2::zeros((n, dim));
        let mut biases = Array1::zeros(n);
        for (j, p) in joint.iter().enumerate() {
            for a in 0..dim {
                weights[(j, a)] = p[a];
            }
            biases[j] = p[dim];
        }
        HiddenParams {
            weights,
            biases,
            provenance,
        }
    }

    pub fn len(&self) -> usize {
        self.biases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.biases.is_empty()
    }

    /// Input dimension d.
    pub fn dim(&self) -> usize {
        self.weights.ncols()
    }

    /// Euclidean norm of the joint vector (w_j, b_j).
    pub fn joint_norm(&self, j: usize) -> f64 {
        let w2: f64 = self.weights.row(j).iter().map(|w| w * w).sum();
        (w2 + self.biases[j] * self.biases[j]).sqrt()
    }

    /// Scale every joint parameter vector by `c`.
    fn scaled(mut self, c: f64, provenance: Provenance) -> Self {
        self.weights *= c;
        self.biases *= c;
        self.provenance = provenance;
        self
    }
}

/// Seeded RNG configuration. Identical seed and algorithm label reproduce the
/// identical sample stream bit-exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct RngSpec {
    pub seed: u64,
    pub algorithm: String,
}

impl RngSpec {
    pub fn new(seed: u64) -> Self {
        RngSpec {
            seed,
            algorithm: "chacha8".to_string(),
        }
    }

    fn rng(&self) -> Result<rand_chacha::ChaCha8Rng> {
        match self.algorithm.as_str() {
            "chacha8" => Ok(rand_chacha::ChaCha8Rng::seed_from_u64(self.seed)),
            other => Err(Error::Unknown {
                kind: "rng algorithm",
                name: other.to_string(),
            }),
        }
    }
}

fn require_positive(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid(format!("{what} must be at least 1")));
    }
    Ok(())
}

fn unit_circle(n: usize) -> Result<Vec<SpherePoint>> {
    require_positive(n, "point count n")?;
    (0..n)
        .map(|j| {
            // half-step offset keeps kinks off the axis directions
            let alpha = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
            SpherePoint::new(vec![alpha.cos(), alpha.sin()])
        })
        .collect()
}

fn unit_fibonacci(n: usize) -> Result<Vec<SpherePoint>> {
    require_positive(n, "point count n")?;
    (0..n)
        .map(|j| {
            let i = j as f64 + 0.5;
            let phi = (1.0 - 2.0 * i / n as f64).acos();
            let theta = std::f64::consts::PI * (1.0 + 5.0_f64.sqrt()) * i;
            SpherePoint::new(vec![
                phi.sin() * theta.cos(),
                phi.sin() * theta.sin(),
                phi.cos(),
            ])
        })
        .collect()
}

fn params_from_sphere(points: Vec<SpherePoint>, provenance: Provenance) -> HiddenParams {
    HiddenParams::from_joint(
        points.into_iter().map(|p| p.coords).collect(),
        provenance,
    )
}

/// Uniform angular grid on the circle S^1 (d = 1): (w_j, b_j) = (cos a_j, sin a_j)
/// with a_j = 2*pi*(j + 1/2)/n.
pub fn circle_grid(n: usize) -> Result<HiddenParams> {
    Ok(params_from_sphere(unit_circle(n)?, Provenance::CircleGrid))
}

/// Golden-spiral grid on S^2 (d = 2); the bias is the z coordinate.
pub fn fibonacci_sphere(n: usize) -> Result<HiddenParams> {
    Ok(params_from_sphere(
        unit_fibonacci(n)?,
        Provenance::FibonacciSphere,
    ))
}

/// n i.i.d. uniform points on S^d: normalized standard Gaussian vectors.
pub fn random_sphere(n: usize, d: usize, rng_spec: &RngSpec) -> Result<HiddenParams> {
    require_positive(n, "point count n")?;
    require_positive(d, "dimension d")?;
    let mut rng = rng_spec.rng()?;
    let mut joint = Vec::with_capacity(n);
    while joint.len() < n {
        let v: Vec<f64> = (0..d + 1).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm < ZERO_NORM_GUARD {
            // probability-zero draw; resample
            continue;
        }
        joint.push(v.into_iter().map(|c| c / norm).collect());
    }
    Ok(HiddenParams::from_joint(
        joint,
        Provenance::RandomSphere {
            seed: rng_spec.seed,
        },
    ))
}

/// First `n` elements of the Sobol sequence in [0,1)^dim after discarding
/// `skip` initial elements. Joe-Kuo direction numbers, dimensions 1..=64.
pub fn sobol_points(n: usize, dim: usize, skip: usize) -> Result<Array2<f64>> {
    require_positive(n, "point count n")?;
    require_positive(dim, "dimension")?;
    if dim > MAX_SOBOL_DIM {
        return Err(Error::invalid(format!(
            "Sobol dimension {dim} exceeds the direction-number table bound {MAX_SOBOL_DIM}"
        )));
    }
    let params = sobol::params::JoeKuoD6::minimal();
    let seq = sobol::Sobol::<f64>::new(dim, &params);
    let mut out = Array2::zeros((n, dim));
    for (i, p) in seq.skip(skip).take(n).enumerate() {
        for (a, &v) in p.iter().enumerate() {
            out[(i, a)] = v;
        }
    }
    Ok(out)
}

/// Quantile function of the standard Gaussian. |Phi(z) - u| <= 1e-12 on (0,1).
/// Odd by construction: the upper half is reflected through the lower half,
/// where the erfc-based CDF keeps full precision.
pub fn inverse_normal_cdf(u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::invalid(format!(
            "inverse normal CDF requires u in (0,1), got {u}"
        )));
    }
    if u > 0.5 {
        // 1 - u is exact here (both operands in [1/2, 1])
        return Ok(-lower_tail_quantile(1.0 - u));
    }
    Ok(lower_tail_quantile(u))
}

fn lower_tail_quantile(u: f64) -> f64 {
    let mut z = acklam_initial(u);
    // two Halley refinements against an erfc-based CDF
    for _ in 0..2 {
        let e = normal_cdf(z) - u;
        let p = normal_pdf(z);
        let step = e / p;
        z -= step / (1.0 + step * z / 2.0);
    }
    z
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
}

fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

// Acklam's rational approximation, accurate to ~1.15e-9 before refinement.
fn acklam_initial(u: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const U_LOW: f64 = 0.02425;
    if u < U_LOW {
        let q = (-2.0 * u.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if u <= 1.0 - U_LOW {
        let q = u - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - u).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// QMC points on S^d: Sobol in [0,1]^{d+1}, clipped to [eps, 1-eps], mapped
/// through the Gaussian quantile function and normalized. A point whose
/// Gaussian image has near-zero norm is replaced by the next sequence element.
pub fn qmc_sphere(n: usize, d: usize, eps: f64, skip: usize) -> Result<HiddenParams> {
    require_positive(n, "point count n")?;
    require_positive(d, "dimension d")?;
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::invalid(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    let dim = d + 1;
    // oversample to cover degenerate-midpoint replacements
    let mut budget = n + 8;
    loop {
        let cube = sobol_points(budget, dim, skip)?;
        let mut joint: Vec<Vec<f64>> = Vec::with_capacity(n);
        for i in 0..budget {
            let z: Vec<f64> = (0..dim)
                .map(|a| inverse_normal_cdf(cube[(i, a)].clamp(eps, 1.0 - eps)))
                .collect::<Result<_>>()?;
            let norm = z.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm < ZERO_NORM_GUARD {
                continue;
            }
            joint.push(z.into_iter().map(|c| c / norm).collect());
            if joint.len() == n {
                return Ok(HiddenParams::from_joint(
                    joint,
                    Provenance::QmcSphere { eps, skip },
                ));
            }
        }
        budget *= 2;
    }
}

/// n i.i.d. uniform draws from the box [-r, r]^{d+1}.
pub fn random_box(n: usize, d: usize, r: f64, rng_spec: &RngSpec) -> Result<HiddenParams> {
    require_positive(n, "point count n")?;
    require_positive(d, "dimension d")?;
    if r <= 0.0 {
        return Err(Error::invalid(format!("box half-width must be positive, got {r}")));
    }
    let mut rng = rng_spec.rng()?;
    let joint = (0..n)
        .map(|_| (0..d + 1).map(|_| rng.gen_range(-r..=r)).collect())
        .collect();
    Ok(HiddenParams::from_joint(
        joint,
        Provenance::RandomBox {
            half_width: r,
            seed: rng_spec.seed,
        },
    ))
}

/// Tensor product of a quasi-uniform weight grid on r1*S^{d-1} with an
/// endpoint-inclusive uniform bias grid on [-r2, r2]; n = n1 * n2 parameters.
pub fn petrushev_grid(n1: usize, n2: usize, r1: f64, r2: f64, d: usize) -> Result<HiddenParams> {
    require_positive(n1, "weight grid size n1")?;
    require_positive(n2, "bias grid size n2")?;
    if r1 <= 0.0 || r2 <= 0.0 {
        return Err(Error::invalid(format!(
            "radii must be positive, got r1={r1}, r2={r2}"
        )));
    }
    let weight_dirs: Vec<Vec<f64>> = match d {
        1 => match n1 {
            1 => vec![vec![1.0]],
            2 => vec![vec![-1.0], vec![1.0]],
            _ => {
                return Err(Error::invalid(format!(
                    "S^0 holds only two points; n1={n1} is not realizable for d=1"
                )))
            }
        },
        2 => unit_circle(n1)?.into_iter().map(|p| p.coords).collect(),
        3 => unit_fibonacci(n1)?.into_iter().map(|p| p.coords).collect(),
        _ => {
            return Err(Error::invalid(format!(
                "no quasi-uniform S^{}-grid generator for d={d}",
                d.saturating_sub(1)
            )))
        }
    };
    let biases: Vec<f64> = if n2 == 1 {
        vec![0.0]
    } else {
        (0..n2)
            .map(|j| -r2 + 2.0 * r2 * j as f64 / (n2 - 1) as f64)
            .collect()
    };
    let mut joint = Vec::with_capacity(weight_dirs.len() * biases.len());
    for w in &weight_dirs {
        for &b in &biases {
            let mut p: Vec<f64> = w.iter().map(|c| c * r1).collect();
            p.push(b);
            joint.push(p);
        }
    }
    Ok(HiddenParams::from_joint(
        joint,
        Provenance::PetrushevGrid { r1, r2 },
    ))
}

/// Joint parameters (w_j, b_j) on a quasi-uniform grid over r * S^d.
pub fn sphere_scheme(n: usize, d: usize, r: f64) -> Result<HiddenParams> {
    require_positive(n, "point count n")?;
    require_positive(d, "dimension d")?;
    if r <= 0.0 {
        return Err(Error::invalid(format!("sphere radius must be positive, got {r}")));
    }
    let provenance = Provenance::SphereScheme { radius: r };
    let unit = match d {
        1 => circle_grid(n)?,
        2 => fibonacci_sphere(n)?,
        _ => qmc_sphere(n, d, DEFAULT_QMC_EPS, DEFAULT_SOBOL_SKIP)?,
    };
    Ok(unit.scaled(r, provenance))
}
