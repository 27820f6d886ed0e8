//! Stacked interior/boundary least-squares systems: plain pointwise
//! regression and the penalized elliptic collocation formulation.

use ndarray::{s, Array1, Array2};

use crate::activation::{eval_elliptic_op, eval_values, NeuronSet};
use crate::assembly::DesignSystem;
use crate::error::{Error, Result};
use crate::quadrature::BoxDomain;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    Dirichlet,
    /// Natural boundary condition; handled variationally, not by rows here.
    NeumannZero,
    None,
}

/// Interior and boundary point sets with per-row penalty weights.
#[derive(Debug, Clone)]
pub struct CollocationSet {
    pub interior: Array2<f64>,
    pub boundary: Array2<f64>,
    pub lambda_interior: Vec<f64>,
    pub lambda_boundary: Vec<f64>,
}

impl CollocationSet {
    pub fn new(interior: Array2<f64>, boundary: Array2<f64>) -> Result<Self> {
        let li = vec![1.0; interior.nrows()];
        let lb = vec![1.0; boundary.nrows()];
        Self::with_penalties(interior, boundary, li, lb)
    }

    pub fn with_penalties(
        interior: Array2<f64>,
        boundary: Array2<f64>,
        lambda_interior: Vec<f64>,
        lambda_boundary: Vec<f64>,
    ) -> Result<Self> {
        if interior.nrows() == 0 {
            return Err(Error::invalid("at least one interior point required"));
        }
        if boundary.nrows() > 0 && interior.ncols() != boundary.ncols() {
            return Err(Error::DimensionMismatch(
                "interior/boundary dimension mismatch".into(),
            ));
        }
        if lambda_interior.len() != interior.nrows() || lambda_boundary.len() != boundary.nrows() {
            return Err(Error::DimensionMismatch("penalty count mismatch".into()));
        }
        if lambda_interior
            .iter()
            .chain(lambda_boundary.iter())
            .any(|&l| !(l > 0.0) || !l.is_finite())
        {
            return Err(Error::invalid("penalties must be strictly positive"));
        }
        Ok(CollocationSet {
            interior,
            boundary,
            lambda_interior,
            lambda_boundary,
        })
    }

    pub fn n_interior(&self) -> usize {
        self.interior.nrows()
    }

    pub fn n_boundary(&self) -> usize {
        self.boundary.nrows()
    }

    pub fn dim(&self) -> usize {
        self.interior.ncols()
    }

    /// Multiply every penalty by c > 0 (used to test scaling invariance).
    pub fn scale_penalties(&mut self, c: f64) {
        for l in self.lambda_interior.iter_mut().chain(self.lambda_boundary.iter_mut()) {
            *l *= c;
        }
    }
}

/// Uniform tensor grid over the box; points landing on a face go to the
/// boundary set when a boundary condition is active.
pub fn tensor_collocation_points(
    domain: &BoxDomain,
    per_axis: usize,
    include_boundary: bool,
    bc: BoundaryCondition,
) -> Result<CollocationSet> {
    if per_axis == 0 || (include_boundary && per_axis < 2) {
        return Err(Error::invalid("per_axis must be >= 2 when boundary included"));
    }
    let d = domain.dim();
    // 1D axis values; endpoints land exactly on faces by construction
    let mut axes: Vec<Vec<f64>> = Vec::with_capacity(d);
    for a in 0..d {
        let (lo, hi) = (domain.lo[a], domain.hi[a]);
        let vals: Vec<f64> = if include_boundary {
            (0..per_axis)
                .map(|i| {
                    if i == per_axis - 1 {
                        hi
                    } else {
                        lo + (hi - lo) * i as f64 / (per_axis - 1) as f64
                    }
                })
                .collect()
        } else {
            // cell midpoints
            (0..per_axis)
                .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / per_axis as f64)
                .collect()
        };
        axes.push(vals);
    }
    let total = per_axis.checked_pow(d as u32).ok_or_else(|| Error::invalid("grid too large"))?;
    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    let mut idx = vec![0usize; d];
    for _ in 0..total {
        let point: Vec<f64> = (0..d).map(|a| axes[a][idx[a]]).collect();
        let on_face = include_boundary
            && point
                .iter()
                .enumerate()
                .any(|(a, &x)| x == domain.lo[a] || x == domain.hi[a]);
        if on_face && bc != BoundaryCondition::None {
            boundary.extend_from_slice(&point);
        } else {
            interior.extend_from_slice(&point);
        }
        for a in (0..d).rev() {
            idx[a] += 1;
            if idx[a] < per_axis {
                break;
            }
            idx[a] = 0;
        }
    }
    let interior = Array2::from_shape_vec((interior.len() / d, d), interior)
        .expect("interior shape");
    let boundary = Array2::from_shape_vec((boundary.len() / d, d), boundary)
        .expect("boundary shape");
    CollocationSet::new(interior, boundary)
}

/// Pointwise regression: matrix = values at all points (interior then
/// boundary), rhs = u there, unit row weights.
pub fn build_regression_system(
    neurons: &NeuronSet,
    colloc: &CollocationSet,
    u: &dyn Fn(&[f64]) -> f64,
) -> Result<DesignSystem> {
    check_dims(neurons, colloc)?;
    let m = colloc.n_interior() + colloc.n_boundary();
    let n = neurons.len();
    let mut matrix = Array2::zeros((m, n));
    let mut rhs = Array1::zeros(m);
    let mut row = 0;
    for pts in [&colloc.interior, &colloc.boundary] {
        if pts.nrows() == 0 {
            continue;
        }
        let phi = eval_values(neurons, pts.view())?.entries;
        matrix.slice_mut(s![row..row + pts.nrows(), ..]).assign(&phi);
        for i in 0..pts.nrows() {
            let v = u(pts.row(i).as_slice().expect("contiguous"));
            if !v.is_finite() {
                return Err(Error::NonFinite("regression target".into()));
            }
            rhs[row + i] = v;
        }
        row += pts.nrows();
    }
    Ok(DesignSystem {
        matrix,
        rhs,
        row_weights: Array1::ones(m),
    })
}

/// Penalized collocation for -Delta(u) + u = f with Dirichlet data g:
/// stacked rows [sqrt(li) * (L phi)(x_i); sqrt(lb) * phi(x_b)].
pub fn build_pde_system(
    neurons: &NeuronSet,
    colloc: &CollocationSet,
    bc: BoundaryCondition,
    f: &dyn Fn(&[f64]) -> f64,
    g: &dyn Fn(&[f64]) -> f64,
) -> Result<DesignSystem> {
    check_dims(neurons, colloc)?;
    match bc {
        BoundaryCondition::NeumannZero => {
            return Err(Error::invalid(
                "Neumann boundary rows are not supported in collocation; use the variational form",
            ));
        }
        BoundaryCondition::Dirichlet => {
            if colloc.n_boundary() == 0 {
                return Err(Error::invalid("Dirichlet requires boundary points"));
            }
        }
        BoundaryCondition::None => {
            if colloc.n_boundary() != 0 {
                return Err(Error::invalid("boundary points present without a boundary condition"));
            }
        }
    }
    let ni = colloc.n_interior();
    let nb = colloc.n_boundary();
    let n = neurons.len();
    let mut matrix = Array2::zeros((ni + nb, n));
    let mut rhs = Array1::zeros(ni + nb);
    let mut row_weights = Array1::zeros(ni + nb);

    let op = eval_elliptic_op(neurons, colloc.interior.view())?.entries;
    for i in 0..ni {
        let li = colloc.lambda_interior[i];
        let scale = li.sqrt();
        for j in 0..n {
            matrix[(i, j)] = scale * op[(i, j)];
        }
        let v = f(colloc.interior.row(i).as_slice().expect("contiguous"));
        if !v.is_finite() {
            return Err(Error::NonFinite("pde right-hand side".into()));
        }
        rhs[i] = scale * v;
        row_weights[i] = li;
    }
    if nb > 0 {
        let phi = eval_values(neurons, colloc.boundary.view())?.entries;
        for i in 0..nb {
            let lb = colloc.lambda_boundary[i];
            let scale = lb.sqrt();
            for j in 0..n {
                matrix[(ni + i, j)] = scale * phi[(i, j)];
            }
            let v = g(colloc.boundary.row(i).as_slice().expect("contiguous"));
            if !v.is_finite() {
                return Err(Error::NonFinite("boundary data".into()));
            }
            rhs[ni + i] = scale * v;
            row_weights[ni + i] = lb;
        }
    }
    Ok(DesignSystem {
        matrix,
        rhs,
        row_weights,
    })
}

fn check_dims(neurons: &NeuronSet, colloc: &CollocationSet) -> Result<()> {
    if neurons.dim() != colloc.dim() {
        return Err(Error::DimensionMismatch(format!(
            "collocation points have dimension {}, neurons expect {}",
            colloc.dim(),
            neurons.dim()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::Activation;
    use crate::assembly::variational_lstsq_system;
    use crate::linalg::svd_lstsq;
    use crate::points::{circle_grid, sphere_scheme, HiddenParams, Provenance};
    use crate::quadrature::{piecewise_tensor_rule, QuadratureRule};
    use approx::assert_abs_diff_eq;
    use ndarray::arr1;

    fn neurons_1d(act: Activation, ws: &[f64], bs: &[f64]) -> NeuronSet {
        let params = HiddenParams {
            weights: Array2::from_shape_vec((ws.len(), 1), ws.to_vec()).unwrap(),
            biases: arr1(bs),
            provenance: Provenance::CircleGrid,
        };
        NeuronSet::new(act, params).unwrap()
    }

    #[test]
    fn tensor_grid_1d() {
        let domain = BoxDomain::cube(-1.0, 1.0, 1).unwrap();
        let cs = tensor_collocation_points(&domain, 5, true, BoundaryCondition::Dirichlet).unwrap();
        let mut interior: Vec<f64> = cs.interior.iter().copied().collect();
        interior.sort_by(f64::total_cmp);
        assert_eq!(interior, vec![-0.5, 0.0, 0.5]);
        let mut bdry: Vec<f64> = cs.boundary.iter().copied().collect();
        bdry.sort_by(f64::total_cmp);
        assert_eq!(bdry, vec![-1.0, 1.0]);
    }

    #[test]
    fn tensor_grid_2d_counts() {
        let domain = BoxDomain::cube(-1.0, 1.0, 2).unwrap();
        let cs = tensor_collocation_points(&domain, 3, true, BoundaryCondition::Dirichlet).unwrap();
        assert_eq!(cs.n_interior() + cs.n_boundary(), 9);
        assert_eq!(cs.n_boundary(), 8);
    }

    #[test]
    fn tensor_grid_no_bc_folds_boundary() {
        let domain = BoxDomain::cube(-1.0, 1.0, 1).unwrap();
        let cs = tensor_collocation_points(&domain, 2048, true, BoundaryCondition::None).unwrap();
        assert_eq!(cs.n_interior(), 2048);
        assert_eq!(cs.n_boundary(), 0);
    }

    #[test]
    fn regression_consistent_system() {
        let ns = neurons_1d(Activation::ReluPow(1), &[1.0], &[0.0]);
        let pts = Array2::from_shape_vec((2, 1), vec![1.0, 2.0]).unwrap();
        let cs = CollocationSet::new(pts, Array2::zeros((0, 1))).unwrap();
        let sys = build_regression_system(&ns, &cs, &|x| 2.0 * x[0]).unwrap();
        let rep = svd_lstsq(sys.matrix.view(), sys.rhs.view(), -1.0).unwrap();
        assert_abs_diff_eq!(rep.coefficients[0], 2.0, epsilon = 1e-14);
        assert!(rep.residual_norm <= 1e-14);
    }

    #[test]
    fn regression_representable_target() {
        let ns = NeuronSet::new(Activation::ReluPow(2), circle_grid(8).unwrap()).unwrap();
        let domain = BoxDomain::cube(-1.0, 1.0, 1).unwrap();
        let cs = tensor_collocation_points(&domain, 64, true, BoundaryCondition::None).unwrap();
        // target = a known combination of the neurons
        let coeffs: Vec<f64> = (0..8).map(|j| 0.3 + 0.1 * j as f64).collect();
        let ns2 = ns.clone();
        let cref = coeffs.clone();
        let target = move |x: &[f64]| {
            let pts = Array2::from_shape_vec((1, 1), vec![x[0]]).unwrap();
            let phi = eval_values(&ns2, pts.view()).unwrap().entries;
            phi.row(0).iter().zip(&cref).map(|(p, c)| p * c).sum()
        };
        let sys = build_regression_system(&ns, &cs, &target).unwrap();
        let rep = svd_lstsq(sys.matrix.view(), sys.rhs.view(), -1.0).unwrap();
        let unorm = sys.rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(rep.residual_norm <= 1e-10 * unorm.max(1.0));
    }

    #[test]
    fn underdetermined_minimal_norm() {
        let ns = neurons_1d(Activation::Tanh, &[1.0, 1.0], &[0.0, 0.0]);
        let pts = Array2::from_shape_vec((1, 1), vec![0.5]).unwrap();
        let cs = CollocationSet::new(pts, Array2::zeros((0, 1))).unwrap();
        let sys = build_regression_system(&ns, &cs, &|_| 1.0).unwrap();
        let rep = svd_lstsq(sys.matrix.view(), sys.rhs.view(), -1.0).unwrap();
        // identical columns: the minimal-norm solution splits evenly
        assert_abs_diff_eq!(rep.coefficients[0], rep.coefficients[1], epsilon = 1e-13);
    }

    #[test]
    fn constant_neuron_solves_pde() {
        let ns = neurons_1d(Activation::Tanh, &[0.0], &[0.7]);
        let pts = Array2::from_shape_vec((3, 1), vec![-0.5, 0.0, 0.5]).unwrap();
        let cs = CollocationSet::new(pts, Array2::zeros((0, 1))).unwrap();
        let c = 0.7_f64.tanh();
        let sys =
            build_pde_system(&ns, &cs, BoundaryCondition::None, &|_| c, &|_| 0.0).unwrap();
        let rep = svd_lstsq(sys.matrix.view(), sys.rhs.view(), -1.0).unwrap();
        assert_abs_diff_eq!(rep.coefficients[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn relu1_rejected_for_pde() {
        let ns = neurons_1d(Activation::ReluPow(1), &[1.0], &[0.0]);
        let pts = Array2::from_shape_vec((1, 1), vec![0.0]).unwrap();
        let cs = CollocationSet::new(pts, Array2::zeros((0, 1))).unwrap();
        assert!(build_pde_system(&ns, &cs, BoundaryCondition::None, &|_| 0.0, &|_| 0.0).is_err());
    }

    #[test]
    fn neumann_rows_rejected() {
        let ns = neurons_1d(Activation::Tanh, &[1.0], &[0.0]);
        let pts = Array2::from_shape_vec((1, 1), vec![0.0]).unwrap();
        let cs = CollocationSet::new(pts, Array2::zeros((0, 1))).unwrap();
        assert!(
            build_pde_system(&ns, &cs, BoundaryCondition::NeumannZero, &|_| 0.0, &|_| 0.0)
                .is_err()
        );
    }

    #[test]
    fn penalty_rescaling_leaves_solution_unchanged() {
        let ns = NeuronSet::new(Activation::Tanh, sphere_scheme(6, 1, 3.0).unwrap()).unwrap();
        let domain = BoxDomain::cube(-1.0, 1.0, 1).unwrap();
        let mut cs =
            tensor_collocation_points(&domain, 25, true, BoundaryCondition::Dirichlet).unwrap();
        let f = |x: &[f64]| (std::f64::consts::PI * x[0]).sin();
        let g = |x: &[f64]| x[0] * 0.1;
        let sys1 = build_pde_system(&ns, &cs, BoundaryCondition::Dirichlet, &f, &g).unwrap();
        let rep1 = svd_lstsq(sys1.matrix.view(), sys1.rhs.view(), -1.0).unwrap();
        cs.scale_penalties(7.5);
        let sys2 = build_pde_system(&ns, &cs, BoundaryCondition::Dirichlet, &f, &g).unwrap();
        let rep2 = svd_lstsq(sys2.matrix.view(), sys2.rhs.view(), -1.0).unwrap();
        let norm = rep1.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
        let diff = rep1
            .coefficients
            .iter()
            .zip(&rep2.coefficients)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(diff <= 1e-10 * norm, "rel diff {}", diff / norm);
    }

    #[test]
    fn normal_equation_residual_small() {
        let ns = NeuronSet::new(Activation::Tanh, sphere_scheme(8, 1, 2.0).unwrap()).unwrap();
        let domain = BoxDomain::cube(-1.0, 1.0, 1).unwrap();
        let cs =
            tensor_collocation_points(&domain, 33, true, BoundaryCondition::Dirichlet).unwrap();
        let f = |x: &[f64]| x[0].cos();
        let g = |_: &[f64]| 0.5;
        let sys = build_pde_system(&ns, &cs, BoundaryCondition::Dirichlet, &f, &g).unwrap();
        let rep = svd_lstsq(sys.matrix.view(), sys.rhs.view(), -1.0).unwrap();
        let coeffs = Array1::from_vec(rep.coefficients.clone());
        let resid = &sys.matrix.dot(&coeffs) - &sys.rhs;
        let proj = sys.matrix.t().dot(&resid);
        let rhs_proj = sys.matrix.t().dot(&sys.rhs);
        let norm = |v: &Array1<f64>| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(norm(&proj) <= 1e-8 * norm(&rhs_proj).max(1.0));
    }

    #[test]
    fn weighted_regression_matches_variational_lstsq() {
        // quadrature-weight penalties turn pointwise regression into the
        // weighted design system
        let ns = NeuronSet::new(Activation::ReluPow(2), circle_grid(6).unwrap()).unwrap();
        let domain = BoxDomain::cube(-1.0, 1.0, 1).unwrap();
        let rule: QuadratureRule = piecewise_tensor_rule(&domain, 32, 2).unwrap();
        let target = |x: &[f64]| (std::f64::consts::FRAC_PI_2 * x[0]).sin();
        let reference = variational_lstsq_system(&ns, &rule, &target).unwrap();
        let cs = CollocationSet::new(rule.points.clone(), Array2::zeros((0, 1))).unwrap();
        let plain = build_regression_system(&ns, &cs, &target).unwrap();
        for (i, &w) in rule.weights.iter().enumerate() {
            let s = w.sqrt();
            for j in 0..ns.len() {
                assert_abs_diff_eq!(
                    reference.matrix[(i, j)],
                    s * plain.matrix[(i, j)],
                    epsilon = 1e-14
                );
            }
            assert_abs_diff_eq!(reference.rhs[i], s * plain.rhs[i], epsilon = 1e-14);
        }
    }
}
