//! Galerkin assembly (mass, energy, load) and the weighted variational
//! least-squares system. Accumulation streams over fixed-size quadrature
//! blocks in index order, so results do not depend on scheduling.

use ndarray::{s, Array1, Array2, ArrayView2, Axis};

use crate::activation::{eval_gradients, eval_values, NeuronSet};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;

pub(crate) const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Mass,
    EnergyH1,
}

/// Symmetric Galerkin system M a = b (or A a = b for the energy form).
#[derive(Debug, Clone)]
pub struct GalerkinSystem {
    pub matrix: Array2<f64>,
    pub rhs: Array1<f64>,
    pub flavor: Flavor,
}

/// A weighted least-squares problem. `matrix` and `rhs` already carry the
/// sqrt(row_weights) scaling; `row_weights` records the underlying weights.
#[derive(Debug, Clone)]
pub struct DesignSystem {
    pub matrix: Array2<f64>,
    pub rhs: Array1<f64>,
    pub row_weights: Array1<f64>,
}

fn check_rule(neurons: &NeuronSet, rule: &QuadratureRule) -> Result<()> {
    if rule.domain.dim() != neurons.dim() {
        return Err(Error::DimensionMismatch(format!(
            "rule domain has dimension {}, neurons expect {}",
            rule.domain.dim(),
            neurons.dim()
        )));
    }
    Ok(())
}

/// Scale each row of `m` by sqrt of the matching weight.
fn scale_rows_sqrt(m: &mut Array2<f64>, weights: &[f64]) {
    for (mut row, &w) in m.rows_mut().into_iter().zip(weights) {
        row *= w.sqrt();
    }
}

fn symmetrize(mut m: Array2<f64>) -> Array2<f64> {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
    m
}

/// M_ij = sum_k w_k phi_j(x_k) phi_i(x_k).
pub fn mass_matrix(neurons: &NeuronSet, rule: &QuadratureRule) -> Result<Array2<f64>> {
    check_rule(neurons, rule)?;
    let n = neurons.len();
    let mut m = Array2::zeros((n, n));
    for (chunk, weights) in chunks(rule) {
        let mut phi = eval_values(neurons, chunk)?.entries;
        scale_rows_sqrt(&mut phi, weights);
        m = m + phi.t().dot(&phi);
    }
    Ok(symmetrize(m))
}

/// A_ij = sum_k w_k (grad(phi_j) . grad(phi_i) + phi_j phi_i)(x_k).
pub fn energy_matrix(neurons: &NeuronSet, rule: &QuadratureRule) -> Result<Array2<f64>> {
    check_rule(neurons, rule)?;
    let n = neurons.len();
    let mut m = Array2::zeros((n, n));
    for (chunk, weights) in chunks(rule) {
        let mut phi = eval_values(neurons, chunk)?.entries;
        scale_rows_sqrt(&mut phi, weights);
        m = m + phi.t().dot(&phi);
        for grad in eval_gradients(neurons, chunk)? {
            let mut g = grad.entries;
            scale_rows_sqrt(&mut g, weights);
            m = m + g.t().dot(&g);
        }
    }
    Ok(symmetrize(m))
}

/// b_i = sum_k w_k f(x_k) phi_i(x_k).
pub fn load_vector(
    neurons: &NeuronSet,
    rule: &QuadratureRule,
    f: &dyn Fn(&[f64]) -> f64,
) -> Result<Array1<f64>> {
    check_rule(neurons, rule)?;
    let mut b = Array1::zeros(neurons.len());
    for (chunk, weights) in chunks(rule) {
        let phi = eval_values(neurons, chunk)?.entries;
        let mut fw = Array1::zeros(chunk.nrows());
        for (i, w) in weights.iter().enumerate() {
            let v = f(chunk.row(i).as_slice().expect("contiguous"));
            if !v.is_finite() {
                return Err(Error::NonFinite("load integrand".into()));
            }
            fw[i] = w * v;
        }
        b = b + phi.t().dot(&fw);
    }
    Ok(b)
}

/// Assemble the full Galerkin system for the given flavor. The Mass flavor
/// projects the target `f` itself; EnergyH1 expects the PDE right-hand side.
pub fn galerkin_system(
    neurons: &NeuronSet,
    rule: &QuadratureRule,
    f: &dyn Fn(&[f64]) -> f64,
    flavor: Flavor,
) -> Result<GalerkinSystem> {
    let matrix = match flavor {
        Flavor::Mass => mass_matrix(neurons, rule)?,
        Flavor::EnergyH1 => energy_matrix(neurons, rule)?,
    };
    let rhs = load_vector(neurons, rule, f)?;
    Ok(GalerkinSystem { matrix, rhs, flavor })
}

/// min_a ||W^{1/2}(Phi a - u)||_2: rows of Phi scaled by sqrt(w_k), right-hand
/// side entries sqrt(w_k) u(x_k). Its minimizer satisfies the normal equations
/// Phi^T W Phi a = Phi^T W u.
pub fn variational_lstsq_system(
    neurons: &NeuronSet,
    rule: &QuadratureRule,
    u: &dyn Fn(&[f64]) -> f64,
) -> Result<DesignSystem> {
    check_rule(neurons, rule)?;
    let m = rule.len();
    let n = neurons.len();
    if (m as u128) * (n as u128) > 200_000_000 {
        return Err(Error::MemoryBudget {
            points: (m as u128) * (n as u128),
            limit: 200_000_000,
        });
    }
    let mut matrix = Array2::zeros((m, n));
    let mut rhs = Array1::zeros(m);
    let mut offset = 0;
    for (chunk, weights) in chunks(rule) {
        let mut phi = eval_values(neurons, chunk)?.entries;
        scale_rows_sqrt(&mut phi, weights);
        let rows = phi.nrows();
        matrix.slice_mut(s![offset..offset + rows, ..]).assign(&phi);
        for (i, w) in weights.iter().enumerate() {
            let v = u(chunk.row(i).as_slice().expect("contiguous"));
            if !v.is_finite() {
                return Err(Error::NonFinite("target".into()));
            }
            rhs[offset + i] = w.sqrt() * v;
        }
        offset += rows;
    }
    Ok(DesignSystem {
        matrix,
        rhs,
        row_weights: Array1::from_vec(rule.weights.clone()),
    })
}

/// Magic bytes opening the binary matrix container.
pub const MATRIX_MAGIC: &[u8; 8] = b"LINMAT01";

/// Dump a dense matrix: magic, u64 rows, u64 cols, row-major f64 (all LE).
pub fn write_matrix_binary<W: std::io::Write>(mut w: W, m: &Array2<f64>) -> Result<()> {
    w.write_all(MATRIX_MAGIC)?;
    w.write_all(&(m.nrows() as u64).to_le_bytes())?;
    w.write_all(&(m.ncols() as u64).to_le_bytes())?;
    for v in m.iter() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_matrix_binary<R: std::io::Read>(mut r: R) -> Result<Array2<f64>> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MATRIX_MAGIC {
        return Err(Error::invalid("bad matrix file magic"));
    }
    let mut dim = [0u8; 8];
    r.read_exact(&mut dim)?;
    let rows = u64::from_le_bytes(dim) as usize;
    r.read_exact(&mut dim)?;
    let cols = u64::from_le_bytes(dim) as usize;
    let mut data = Vec::with_capacity(rows * cols);
    let mut buf = [0u8; 8];
    for _ in 0..rows * cols {
        r.read_exact(&mut buf)?;
        data.push(f64::from_le_bytes(buf));
    }
    Array2::from_shape_vec((rows, cols), data)
        .map_err(|_| Error::invalid("matrix file shape mismatch"))
}

/// CSV dump for small matrices: one row per line, full precision.
pub fn write_matrix_csv<W: std::io::Write>(mut w: W, m: &Array2<f64>) -> Result<()> {
    writeln!(w, "# rows={} cols={}", m.nrows(), m.ncols())?;
    for row in m.rows() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

/// Iterate a rule in fixed-size blocks of points and weights.
pub(crate) fn chunks<'a>(
    rule: &'a QuadratureRule,
) -> impl Iterator<Item = (ArrayView2<'a, f64>, &'a [f64])> {
    rule.points
        .axis_chunks_iter(Axis(0), CHUNK)
        .zip(rule.weights.chunks(CHUNK))
}
