//! Neuron basis evaluation: values, gradients, and the elliptic operator
//! -Delta(phi) + phi, as dense design matrices.

use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::points::HiddenParams;

/// Activation kind. ReLU^k derivatives at the kink t = 0 are taken to be 0, so
/// collocation at a kink is deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    ReluPow(u32),
    Tanh,
}

impl Activation {
    pub fn value(self, t: f64) -> f64 {
        match self {
            Activation::ReluPow(k) => {
                if t > 0.0 {
                    t.powi(k as i32)
                } else {
                    0.0
                }
            }
            Activation::Tanh => t.tanh(),
        }
    }

    pub fn deriv(self, t: f64) -> f64 {
        match self {
            Activation::ReluPow(k) => {
                if t > 0.0 {
                    k as f64 * t.powi(k as i32 - 1)
                } else {
                    0.0
                }
            }
            Activation::Tanh => {
                let s = t.tanh();
                1.0 - s * s
            }
        }
    }

    pub fn second_deriv(self, t: f64) -> f64 {
        match self {
            Activation::ReluPow(k) => {
                if t > 0.0 && k >= 2 {
                    (k * (k - 1)) as f64 * t.powi(k as i32 - 2)
                } else {
                    0.0
                }
            }
            Activation::Tanh => {
                let s = t.tanh();
                -2.0 * s * (1.0 - s * s)
            }
        }
    }

    fn validate(self) -> Result<()> {
        if let Activation::ReluPow(0) = self {
            return Err(Error::invalid("ReLU^k requires k >= 1"));
        }
        Ok(())
    }
}

impl std::str::FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tanh" => Ok(Activation::Tanh),
            "relu" | "relu1" => Ok(Activation::ReluPow(1)),
            _ => {
                if let Some(k) = s.strip_prefix("relu").and_then(|k| k.parse::<u32>().ok()) {
                    if k >= 1 {
                        return Ok(Activation::ReluPow(k));
                    }
                }
                Err(Error::Unknown {
                    kind: "activation",
                    name: s.to_string(),
                })
            }
        }
    }
}

/// A linearized basis: activation plus fixed hidden parameters.
#[derive(Debug, Clone)]
pub struct NeuronSet {
    pub activation: Activation,
    pub params: HiddenParams,
}

impl NeuronSet {
    pub fn new(activation: Activation, params: HiddenParams) -> Result<Self> {
        activation.validate()?;
        Ok(NeuronSet { activation, params })
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    /// Pre-activation arguments t_{ij} = w_j . x_i + b_j for a block of points.
    fn pre_activations(&self, points: ArrayView2<f64>) -> Result<Array2<f64>> {
        if points.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "points have dimension {}, neurons expect {}",
                points.ncols(),
                self.dim()
            )));
        }
        let mut t = points.dot(&self.params.weights.t());
        for (mut row, _) in t.rows_mut().into_iter().zip(0..) {
            row += &self.params.biases;
        }
        Ok(t)
    }

    fn weight_sqnorms(&self) -> Array1<f64> {
        self.params
            .weights
            .rows()
            .into_iter()
            .map(|w| w.iter().map(|c| c * c).sum())
            .collect()
    }
}

/// Derivative-order tag of a design matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Value,
    Gradient(usize),
    Laplacian,
    EllipticOp,
}

/// Dense evaluation of the basis at a point set: rows are points, columns are
/// neurons.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    pub entries: Array2<f64>,
    pub kind: MatrixKind,
}

/// Entry (i, j) = sigma(w_j . x_i + b_j).
pub fn eval_values(neurons: &NeuronSet, points: ArrayView2<f64>) -> Result<DesignMatrix> {
    let mut t = neurons.pre_activations(points)?;
    t.mapv_inplace(|v| neurons.activation.value(v));
    Ok(DesignMatrix {
        entries: t,
        kind: MatrixKind::Value,
    })
}

/// One matrix per axis a, entry (i, j) = sigma'(w_j . x_i + b_j) * w_{j,a}.
pub fn eval_gradients(neurons: &NeuronSet, points: ArrayView2<f64>) -> Result<Vec<DesignMatrix>> {
    let mut t = neurons.pre_activations(points)?;
    t.mapv_inplace(|v| neurons.activation.deriv(v));
    let mut out = Vec::with_capacity(neurons.dim());
    for axis in 0..neurons.dim() {
        let mut m = t.clone();
        for j in 0..neurons.len() {
            let w = neurons.params.weights[(j, axis)];
            m.column_mut(j).mapv_inplace(|v| v * w);
        }
        out.push(DesignMatrix {
            entries: m,
            kind: MatrixKind::Gradient(axis),
        });
    }
    Ok(out)
}

/// Entry (i, j) = -sigma''(t_{ij}) * |w_j|^2 + sigma(t_{ij}); the operator
/// -Delta + identity applied to each neuron. ReLU^1 has no locally bounded
/// second derivative and is rejected.
pub fn eval_elliptic_op(neurons: &NeuronSet, points: ArrayView2<f64>) -> Result<DesignMatrix> {
    if neurons.activation == Activation::ReluPow(1) {
        return Err(Error::invalid(
            "elliptic operator requires ReLU^k with k >= 2 or tanh",
        ));
    }
    let t = neurons.pre_activations(points)?;
    let sq = neurons.weight_sqnorms();
    let mut m = t;
    for j in 0..neurons.len() {
        let w2 = sq[j];
        let act = neurons.activation;
        m.column_mut(j)
            .mapv_inplace(|v| -act.second_deriv(v) * w2 + act.value(v));
    }
    Ok(DesignMatrix {
        entries: m,
        kind: MatrixKind::EllipticOp,
    })
}
