//! Exact solutions / target functions with closed-form values, gradients,
//! Laplacians, and elliptic right-hand sides.

use crate::error::{Error, Result};

const PI: f64 = std::f64::consts::PI;

/// A closed-form target. All variants are separable products of sines, so the
/// Laplacian is available analytically.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetFunction {
    /// u(x) = prod_i sin(pi x_i / 2) on (-1,1)^d.
    ProdSinHalfPi { d: usize },
    /// u(x) = prod_i sin(m pi x_i).
    SinM { m: f64, d: usize },
    /// u(x) = sum_k prod_i sin(m_k pi x_i).
    SumSinM { ms: Vec<f64>, d: usize },
}

impl TargetFunction {
    pub fn dim(&self) -> usize {
        match self {
            TargetFunction::ProdSinHalfPi { d }
            | TargetFunction::SinM { d, .. }
            | TargetFunction::SumSinM { d, .. } => *d,
        }
    }

    /// Frequencies of the separable terms, each with half-period scaling.
    fn terms(&self) -> Vec<f64> {
        match self {
            TargetFunction::ProdSinHalfPi { .. } => vec![0.5],
            TargetFunction::SinM { m, .. } => vec![*m],
            TargetFunction::SumSinM { ms, .. } => ms.clone(),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.terms()
            .iter()
            .map(|m| x.iter().map(|xi| (m * PI * xi).sin()).product::<f64>())
            .sum()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let mut g = vec![0.0; d];
        for m in self.terms() {
            for (a, ga) in g.iter_mut().enumerate() {
                let mut term = m * PI * (m * PI * x[a]).cos();
                for (i, xi) in x.iter().enumerate() {
                    if i != a {
                        term *= (m * PI * xi).sin();
                    }
                }
                *ga += term;
            }
        }
        g
    }

    pub fn laplacian(&self, x: &[f64]) -> f64 {
        let d = self.dim() as f64;
        self.terms()
            .iter()
            .map(|m| {
                let term: f64 = x.iter().map(|xi| (m * PI * xi).sin()).product();
                -d * (m * PI).powi(2) * term
            })
            .sum()
    }

    /// f = -Delta(u) + u.
    pub fn elliptic_rhs(&self, x: &[f64]) -> f64 {
        -self.laplacian(x) + self.value(x)
    }

    /// Dirichlet boundary data: the trace of the exact solution.
    pub fn dirichlet_trace(&self, x: &[f64]) -> f64 {
        self.value(x)
    }

    /// Exact L2 norm over (-1,1)^d, when known in closed form.
    pub fn l2_norm(&self) -> Option<f64> {
        match self {
            TargetFunction::ProdSinHalfPi { .. } => Some(1.0),
            _ => None,
        }
    }

    /// Exact H1 seminorm over (-1,1)^d, when known in closed form.
    pub fn h1_seminorm(&self) -> Option<f64> {
        match self {
            TargetFunction::ProdSinHalfPi { d } => Some(PI / 2.0 * (*d as f64).sqrt()),
            _ => None,
        }
    }
}

impl std::str::FromStr for TargetFunction {
    type Err = Error;

    /// Keys: `prod_sin_half_pi:d=3`, `sin_m:m=2,d=1`, `sum_sin_m:m=1+2+4,d=1`.
    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::Unknown {
            kind: "target",
            name: s.to_string(),
        };
        let (kind, args) = s.split_once(':').ok_or_else(unknown)?;
        let mut m_arg: Option<&str> = None;
        let mut d_arg: Option<usize> = None;
        for part in args.split(',') {
            match part.split_once('=') {
                Some(("m", v)) => m_arg = Some(v),
                Some(("d", v)) => d_arg = v.parse().ok(),
                _ => return Err(unknown()),
            }
        }
        let d = d_arg.ok_or_else(unknown)?;
        if d == 0 {
            return Err(unknown());
        }
        match kind {
            "prod_sin_half_pi" => Ok(TargetFunction::ProdSinHalfPi { d }),
            "sin_m" => {
                let m = m_arg.and_then(|v| v.parse().ok()).ok_or_else(unknown)?;
                Ok(TargetFunction::SinM { m, d })
            }
            "sum_sin_m" => {
                let ms = m_arg
                    .ok_or_else(unknown)?
                    .split('+')
                    .map(|v| v.parse::<f64>().map_err(|_| unknown()))
                    .collect::<Result<Vec<_>>>()?;
                if ms.is_empty() {
                    return Err(unknown());
                }
                Ok(TargetFunction::SumSinM { ms, d })
            }
            _ => Err(unknown()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, piecewise_tensor_rule, BoxDomain};
    use approx::assert_abs_diff_eq;

    #[test]
    fn values() {
        let t = TargetFunction::ProdSinHalfPi { d: 2 };
        assert_abs_diff_eq!(t.value(&[1.0, 1.0]), 1.0, epsilon = 1e-15);

        let t = TargetFunction::SumSinM {
            ms: vec![1.0, 2.0, 4.0],
            d: 1,
        };
        assert_abs_diff_eq!(t.value(&[0.0]), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn elliptic_rhs_closed_forms() {
        let t = TargetFunction::ProdSinHalfPi { d: 1 };
        let x = [0.37];
        let expect = (PI * PI / 4.0 + 1.0) * (PI / 2.0 * x[0]).sin();
        assert_abs_diff_eq!(t.elliptic_rhs(&x), expect, epsilon = 1e-13);

        for d in 1..=3 {
            let t = TargetFunction::ProdSinHalfPi { d };
            let x: Vec<f64> = (0..d).map(|i| 0.1 + 0.2 * i as f64).collect();
            let expect = (d as f64 * PI * PI / 4.0 + 1.0) * t.value(&x);
            assert_abs_diff_eq!(t.elliptic_rhs(&x), expect, epsilon = 1e-12);
        }

        let t = TargetFunction::SumSinM { ms: vec![1.0], d: 1 };
        let x = [0.21];
        assert_abs_diff_eq!(
            t.elliptic_rhs(&x),
            (PI * PI + 1.0) * (PI * x[0]).sin(),
            epsilon = 1e-13
        );
    }

    #[test]
    fn gradient_and_laplacian_match_finite_differences() {
        let targets = [
            TargetFunction::ProdSinHalfPi { d: 3 },
            TargetFunction::SinM { m: 2.0, d: 2 },
            TargetFunction::SumSinM {
                ms: vec![1.0, 2.0, 4.0],
                d: 2,
            },
        ];
        for t in targets {
            let d = t.dim();
            let x: Vec<f64> = (0..d).map(|i| 0.13 + 0.11 * i as f64).collect();
            let g = t.gradient(&x);
            let h = 1e-6;
            for a in 0..d {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[a] += h;
                xm[a] -= h;
                let fd = (t.value(&xp) - t.value(&xm)) / (2.0 * h);
                assert!((fd - g[a]).abs() <= 1e-7 * g[a].abs().max(1.0), "{t:?} axis {a}");
            }
            let h = 1e-4;
            let mut lap = 0.0;
            for a in 0..d {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[a] += h;
                xm[a] -= h;
                lap += (t.value(&xp) - 2.0 * t.value(&x) + t.value(&xm)) / (h * h);
            }
            assert!((lap - t.laplacian(&x)).abs() <= 1e-5 * t.laplacian(&x).abs().max(1.0));
        }
    }

    #[test]
    fn prod_sin_norms_match_quadrature() {
        for d in 1..=2 {
            let t = TargetFunction::ProdSinHalfPi { d };
            let domain = BoxDomain::cube(-1.0, 1.0, d).unwrap();
            let cells = if d == 1 { 1024 } else { 64 };
            let rule = piecewise_tensor_rule(&domain, cells, 5).unwrap();
            let l2 = integrate(|x| t.value(x).powi(2), &rule).unwrap().sqrt();
            assert_abs_diff_eq!(l2, t.l2_norm().unwrap(), epsilon = 1e-10);
            let h1 = integrate(
                |x| t.gradient(x).iter().map(|g| g * g).sum(),
                &rule,
            )
            .unwrap()
            .sqrt();
            assert_abs_diff_eq!(h1, t.h1_seminorm().unwrap(), epsilon = 1e-8);
        }
    }

    #[test]
    fn parse_keys() {
        assert_eq!(
            "prod_sin_half_pi:d=3".parse::<TargetFunction>().unwrap(),
            TargetFunction::ProdSinHalfPi { d: 3 }
        );
        assert_eq!(
            "sin_m:m=2,d=1".parse::<TargetFunction>().unwrap(),
            TargetFunction::SinM { m: 2.0, d: 1 }
        );
        assert_eq!(
            "sum_sin_m:m=1+2+4,d=2".parse::<TargetFunction>().unwrap(),
            TargetFunction::SumSinM {
                ms: vec![1.0, 2.0, 4.0],
                d: 2
            }
        );
        assert!("bessel:d=1".parse::<TargetFunction>().is_err());
        assert!("sin_m:d=1".parse::<TargetFunction>().is_err());
    }
}
