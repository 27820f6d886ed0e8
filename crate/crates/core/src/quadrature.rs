//! Piecewise tensor-product Gauss-Legendre rules and equal-weight QMC rules on
//! axis-aligned boxes.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::points::sobol_points;

/// Rules beyond this many points are rejected.
pub const POINT_BUDGET: u64 = 200_000_000;

pub const MAX_GAUSS_ORDER: usize = 20;

/// Axis-aligned box [a_1,b_1] x ... x [a_d,b_d].
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::invalid("domain bounds must be non-empty and equal length"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::invalid("domain must satisfy lo < hi on every axis"));
        }
        Ok(BoxDomain { lo, hi })
    }

    /// The cube [lo, hi]^d.
    pub fn cube(lo: f64, hi: f64, d: usize) -> Result<Self> {
        BoxDomain::new(vec![lo; d], vec![hi; d])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(xi, (a, b))| *xi >= *a && *xi <= *b)
    }
}

/// Points and positive weights defining a discrete integral on a box domain.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points: Array2<f64>,
    pub weights: Vec<f64>,
    pub domain: BoxDomain,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1]; exact for polynomials of
/// degree <= 2p - 1. Nodes come from the Golub-Welsch tridiagonal eigenvalue
/// problem, polished by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(p: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if p == 0 || p > MAX_GAUSS_ORDER {
        return Err(Error::invalid(format!(
            "Gauss order must lie in 1..={MAX_GAUSS_ORDER}, got {p}"
        )));
    }
    let mut jacobi = nalgebra::DMatrix::<f64>::zeros(p, p);
    for i in 1..p {
        let b = i as f64 / ((4 * i * i - 1) as f64).sqrt();
        jacobi[(i, i - 1)] = b;
        jacobi[(i - 1, i)] = b;
    }
    let eigen = nalgebra::SymmetricEigen::new(jacobi);
    let mut nodes: Vec<f64> = eigen.eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut weights = vec![0.0; p];
    for (x, w) in nodes.iter_mut().zip(weights.iter_mut()) {
        for _ in 0..3 {
            let (value, deriv) = legendre_with_deriv(p, *x);
            *x -= value / deriv;
        }
        let (_, deriv) = legendre_with_deriv(p, *x);
        *w = 2.0 / ((1.0 - *x * *x) * deriv * deriv);
    }
    Ok((nodes, weights))
}

/// P_p(x) and P_p'(x) via the three-term recurrence.
fn legendre_with_deriv(p: usize, x: f64) -> (f64, f64) {
    let mut prev = 1.0;
    let mut cur = x;
    if p == 0 {
        return (1.0, 0.0);
    }
    for k in 1..p {
        let next = ((2 * k + 1) as f64 * x * cur - k as f64 * prev) / (k + 1) as f64;
        prev = cur;
        cur = next;
    }
    let deriv = p as f64 * (x * cur - prev) / (x * x - 1.0);
    (cur, deriv)
}

fn check_budget(total: u128) -> Result<()> {
    if total > POINT_BUDGET as u128 {
        return Err(Error::MemoryBudget {
            points: total,
            limit: POINT_BUDGET,
        });
    }
    Ok(())
}

/// Gauss rule of order `p` mapped affinely into each of `cells_per_axis`
/// uniform cells per axis, tensorized across axes.
pub fn piecewise_tensor_rule(
    domain: &BoxDomain,
    cells_per_axis: usize,
    p: usize,
) -> Result<QuadratureRule> {
    if cells_per_axis == 0 {
        return Err(Error::invalid("cells_per_axis must be at least 1"));
    }
    let d = domain.dim();
    let per_axis = (cells_per_axis as u128) * (p as u128);
    check_budget(per_axis.pow(d as u32))?;
    let (nodes, node_weights) = gauss_legendre(p)?;

    // per-axis point/weight arrays, cell by cell
    let mut axis_pts: Vec<Vec<(f64, f64)>> = Vec::with_capacity(d);
    for a in 0..d {
        let h = (domain.hi[a] - domain.lo[a]) / cells_per_axis as f64;
        let mut pts = Vec::with_capacity(cells_per_axis * p);
        for c in 0..cells_per_axis {
            let mid = domain.lo[a] + h * (c as f64 + 0.5);
            for (x, w) in nodes.iter().zip(&node_weights) {
                pts.push((mid + 0.5 * h * x, 0.5 * h * w));
            }
        }
        axis_pts.push(pts);
    }

    let total: usize = axis_pts.iter().map(|v| v.len()).product();
    let mut points = Array2::zeros((total, d));
    let mut weights = vec![0.0; total];
    let mut index = vec![0usize; d];
    for i in 0..total {
        let mut w = 1.0;
        for a in 0..d {
            let (x, wa) = axis_pts[a][index[a]];
            points[(i, a)] = x;
            w *= wa;
        }
        weights[i] = w;
        // odometer increment, last axis fastest
        for a in (0..d).rev() {
            index[a] += 1;
            if index[a] < axis_pts[a].len() {
                break;
            }
            index[a] = 0;
        }
    }
    Ok(QuadratureRule {
        points,
        weights,
        domain: domain.clone(),
    })
}

/// Equal-weight rule from a Sobol sequence mapped affinely into the box.
pub fn qmc_rule(n: usize, domain: &BoxDomain, skip: usize) -> Result<QuadratureRule> {
    check_budget(n as u128)?;
    let d = domain.dim();
    let mut points = sobol_points(n, d, skip)?;
    for a in 0..d {
        let (lo, hi) = (domain.lo[a], domain.hi[a]);
        points.column_mut(a).mapv_inplace(|u| lo + (hi - lo) * u);
    }
    let w = domain.volume() / n as f64;
    Ok(QuadratureRule {
        points,
        weights: vec![w; n],
        domain: domain.clone(),
    })
}

/// Sum w_i f(x_i) with compensated summation. A NaN from `f` is an error.
pub fn integrate(f: impl Fn(&[f64]) -> f64, rule: &QuadratureRule) -> Result<f64> {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for (i, w) in rule.weights.iter().enumerate() {
        let x = rule.points.row(i);
        let v = f(x.as_slice().expect("points are contiguous"));
        if !v.is_finite() {
            return Err(Error::NonFinite("integrand".into()));
        }
        let term = w * v - comp;
        let t = sum + term;
        comp = (t - sum) - term;
        sum = t;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gauss_low_orders() {
        let (n, w) = gauss_legendre(1).unwrap();
        assert_eq!(n, vec![0.0]);
        assert_eq!(w, vec![2.0]);

        let (n, w) = gauss_legendre(2).unwrap();
        let r = 1.0 / 3.0_f64.sqrt();
        assert_abs_diff_eq!(n[0], -r, epsilon = 1e-14);
        assert_abs_diff_eq!(n[1], r, epsilon = 1e-14);
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(w[1], 1.0, epsilon = 1e-14);

        assert!(gauss_legendre(0).is_err());
        assert!(gauss_legendre(MAX_GAUSS_ORDER + 1).is_err());
    }

    #[test]
    fn gauss_monomial_exactness() {
        for p in 1..=MAX_GAUSS_ORDER {
            let (nodes, weights) = gauss_legendre(p).unwrap();
            for m in 0..=(2 * p - 1) {
                let got: f64 = nodes
                    .iter()
                    .zip(&weights)
                    .map(|(x, w)| w * x.powi(m as i32))
                    .sum();
                let exact = if m % 2 == 0 { 2.0 / (m as f64 + 1.0) } else { 0.0 };
                assert!(
                    (got - exact).abs() <= 1e-12,
                    "p={p}, m={m}: {got} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn gauss_5_on_x8() {
        let (nodes, weights) = gauss_legendre(5).unwrap();
        let got: f64 = nodes.iter().zip(&weights).map(|(x, w)| w * x.powi(8)).sum();
        assert_abs_diff_eq!(got, 2.0 / 9.0, epsilon = 1e-13);
    }

    #[test]
    fn piecewise_midpoints() {
        let domain = BoxDomain::cube(-1.0, 1.0, 1).unwrap();
        let rule = piecewise_tensor_rule(&domain, 2, 1).unwrap();
        assert_eq!(rule.points.column(0).to_vec(), vec![-0.5, 0.5]);
        assert_eq!(rule.weights, vec![1.0, 1.0]);
    }

    #[test]
    fn piecewise_weight_sum_is_volume() {
        let domain = BoxDomain::cube(-1.0, 1.0, 2).unwrap();
        let rule = piecewise_tensor_rule(&domain, 10, 3).unwrap();
        let sum: f64 = rule.weights.iter().sum();
        assert_abs_diff_eq!(sum, 4.0, epsilon = 1e-12);
        assert!(rule.weights.iter().all(|&w| w > 0.0));
        for i in 0..rule.len() {
            assert!(rule.domain.contains(rule.points.row(i).as_slice().unwrap()));
        }
    }

    #[test]
    fn piecewise_sin_squared() {
        let domain = BoxDomain::cube(-1.0, 1.0, 1).unwrap();
        let rule = piecewise_tensor_rule(&domain, 1024, 5).unwrap();
        let got = integrate(
            |x| (std::f64::consts::FRAC_PI_2 * x[0]).sin().powi(2),
            &rule,
        )
        .unwrap();
        assert_abs_diff_eq!(got, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn piecewise_budget_guard() {
        let domain = BoxDomain::cube(-1.0, 1.0, 6).unwrap();
        assert!(matches!(
            piecewise_tensor_rule(&domain, 400, 5),
            Err(Error::MemoryBudget { .. })
        ));
    }

    #[test]
    fn qmc_weights_and_volume() {
        let domain = BoxDomain::cube(0.0, 1.0, 1).unwrap();
        let rule = qmc_rule(4, &domain, 1).unwrap();
        assert_eq!(rule.weights, vec![0.25; 4]);

        let domain = BoxDomain::cube(-1.0, 1.0, 4).unwrap();
        let rule = qmc_rule(1 << 16, &domain, 1).unwrap();
        let got = integrate(|_| 1.0, &rule).unwrap();
        assert_abs_diff_eq!(got, 16.0, epsilon = 1e-12);
    }

    #[test]
    fn qmc_product_sin_squared_4d() {
        let domain = BoxDomain::cube(-1.0, 1.0, 4).unwrap();
        let rule = qmc_rule(1 << 18, &domain, 1).unwrap();
        let got = integrate(
            |x| {
                x.iter()
                    .map(|xi| (std::f64::consts::FRAC_PI_2 * xi).sin().powi(2))
                    .product()
            },
            &rule,
        )
        .unwrap();
        assert_abs_diff_eq!(got, 1.0, epsilon = 5e-4);
    }

    #[test]
    fn qmc_doubling_does_not_regress() {
        // low-discrepancy sanity: doubling n never inflates the error by more
        // than 1.5x on average over skip offsets
        let domain = BoxDomain::cube(-1.0, 1.0, 2).unwrap();
        let f = |x: &[f64]| -> f64 {
            x.iter()
                .map(|xi| (std::f64::consts::FRAC_PI_2 * xi).sin().powi(2))
                .product()
        };
        let err = |n: usize, skip: usize| {
            let rule = qmc_rule(n, &domain, skip).unwrap();
            (integrate(f, &rule).unwrap() - 1.0).abs()
        };
        for n in [1 << 10, 1 << 11, 1 << 12] {
            let skips = [1, 2, 3, 5, 8];
            let avg: f64 = skips.iter().map(|&s| err(n, s)).sum::<f64>() / skips.len() as f64;
            let avg2: f64 =
                skips.iter().map(|&s| err(2 * n, s)).sum::<f64>() / skips.len() as f64;
            assert!(avg2 <= 1.5 * avg, "n={n}: {avg2} vs {avg}");
        }
    }

    #[test]
    fn integrate_relu_examples() {
        let domain = BoxDomain::cube(-1.0, 1.0, 1).unwrap();
        let rule = piecewise_tensor_rule(&domain, 1024, 5).unwrap();
        let got = integrate(|x| x[0].max(0.0), &rule).unwrap();
        assert_abs_diff_eq!(got, 0.5, epsilon = 1e-10);
        let got = integrate(|x| x[0].max(0.0).powi(2).powi(2), &rule).unwrap();
        assert_abs_diff_eq!(got, 0.2, epsilon = 1e-12);

        let domain3 = BoxDomain::cube(-1.0, 1.0, 3).unwrap();
        let rule3 = piecewise_tensor_rule(&domain3, 4, 2).unwrap();
        assert_abs_diff_eq!(integrate(|_| 1.0, &rule3).unwrap(), 8.0, epsilon = 1e-12);
    }

    #[test]
    fn integrate_rejects_nan() {
        let domain = BoxDomain::cube(-1.0, 1.0, 1).unwrap();
        let rule = piecewise_tensor_rule(&domain, 4, 2).unwrap();
        assert!(integrate(|x| (x[0] - 10.0).ln(), &rule).is_err());
    }

    #[test]
    fn piecewise_exact_for_cell_aligned_kinks() {
        // ReLU^2 squared has its kink at 0, a cell boundary for even cell counts
        let domain = BoxDomain::cube(-1.0, 1.0, 1).unwrap();
        let rule = piecewise_tensor_rule(&domain, 8, 3).unwrap();
        let got = integrate(|x| x[0].max(0.0).powi(2).powi(2), &rule).unwrap();
        assert_abs_diff_eq!(got, 0.2, epsilon = 1e-12);
    }
}
