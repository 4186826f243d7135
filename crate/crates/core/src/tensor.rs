//! Dense row-major matrices, a reverse-mode tape over a closed set of
//! primitives, and the Adam optimizer.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{Graph, NodeId};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Tensor::full(rows, cols, 0.0)
    }

    pub fn full(rows: usize, cols: usize, value: f64) -> Self {
        Tensor { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn scalar(value: f64) -> Self {
        Tensor::full(1, 1, value)
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                op: "from_vec",
                left: (rows, cols),
                right: (data.len(), 1),
            });
        }
        Ok(Tensor { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn matmul(&self, other: &Tensor) -> Result<Tensor> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch { op: "matmul", left: self.shape(), right: other.shape() });
        }
        let mut out = Tensor::zeros(self.rows, other.cols);
        gemm(
            (self.rows, self.cols, other.cols),
            (&self.data, self.cols as isize, 1),
            (&other.data, other.cols as isize, 1),
            &mut out.data,
        );
        Ok(out)
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Tensor {
        Tensor { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    fn zip(&self, other: &Tensor, f: impl Fn(f64, f64) -> f64) -> Tensor {
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Tensor { rows: self.rows, cols: self.cols, data }
    }

    fn add_assign(&mut self, other: &Tensor) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }
}

/// `c += a * b` for an `m x k` by `k x n` product with arbitrary strides on
/// the inputs and a dense row-major `c`.
fn gemm(
    (m, k, n): (usize, usize, usize),
    (a, rsa, csa): (&[f64], isize, isize),
    (b, rsb, csb): (&[f64], isize, isize),
    c: &mut [f64],
) {
    if m == 0 || n == 0 || k == 0 {
        return;
    }
    assert!(c.len() >= m * n);
    // SAFETY: strides and extents describe regions inside the given slices.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa,
            csa,
            b.as_ptr(),
            rsb,
            csb,
            1.0,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// Block-diagonal adjacency of a batch of graphs in CSR form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl Adjacency {
    /// Node `v` of graph `i` becomes row `starts[i] + v`.
    pub fn from_graphs<'a>(graphs: impl IntoIterator<Item = &'a Graph>) -> Self {
        let mut offsets = vec![0];
        let mut targets = Vec::new();
        let mut base = 0;
        for g in graphs {
            for u in g.nodes() {
                targets.extend(g.neighbors(u).iter().map(|&v| v + base));
                offsets.push(targets.len());
            }
            base += g.node_count() as NodeId;
        }
        Adjacency { offsets, targets }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    fn multiply(&self, x: &Tensor) -> Tensor {
        let c = x.cols;
        let mut out = Tensor::zeros(self.node_count(), c);
        for i in 0..self.node_count() {
            let dst = &mut out.data[i * c..(i + 1) * c];
            for &j in &self.targets[self.offsets[i]..self.offsets[i + 1]] {
                for (d, s) in dst.iter_mut().zip(x.row(j as usize)) {
                    *d += s;
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(usize);

#[derive(Clone, Debug)]
enum Op {
    Leaf { param: Option<usize> },
    MatMul(Var, Var),
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    AddBias(Var, Var),
    Relu(Var),
    Abs(Var),
    Scale(Var, f64),
    AddScalar(Var),
    ScalarMul(Var, Var),
    WeightedSum(Vec<Var>, Vec<Var>),
    ConcatCols(Vec<Var>),
    SegmentSum(Var, Vec<usize>),
    Spmm(Arc<Adjacency>, Var),
    GatherRows(Var, Vec<usize>),
    RowSqNorm(Var),
    Sum(Var),
}

#[derive(Clone, Debug)]
struct Node {
    value: Tensor,
    op: Op,
}

/// Records a forward computation for a single reverse sweep.
#[derive(Clone, Debug, Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

fn check(op: &'static str, a: &Tensor, b: &Tensor, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::ShapeMismatch { op, left: a.shape(), right: b.shape() })
    }
}

impl Tape {
    pub fn new() -> Self {
        Tape::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Tensor, op: Op) -> Var {
        self.nodes.push(Node { value, op });
        Var(self.nodes.len() - 1)
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    pub fn constant(&mut self, t: Tensor) -> Var {
        self.push(t, Op::Leaf { param: None })
    }

    /// A leaf whose gradient is reported under parameter slot `index`.
    pub fn param(&mut self, index: usize, t: Tensor) -> Var {
        self.push(t, Op::Leaf { param: Some(index) })
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let out = self.value(a).matmul(self.value(b))?;
        Ok(self.push(out, Op::MatMul(a, b)))
    }

    fn same_shape(&self, op: &'static str, a: Var, b: Var) -> Result<()> {
        let (x, y) = (self.value(a), self.value(b));
        check(op, x, y, x.shape() == y.shape())
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        self.same_shape("add", a, b)?;
        let out = self.value(a).zip(self.value(b), |x, y| x + y);
        Ok(self.push(out, Op::Add(a, b)))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        self.same_shape("sub", a, b)?;
        let out = self.value(a).zip(self.value(b), |x, y| x - y);
        Ok(self.push(out, Op::Sub(a, b)))
    }

    /// Elementwise product.
    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        self.same_shape("mul", a, b)?;
        let out = self.value(a).zip(self.value(b), |x, y| x * y);
        Ok(self.push(out, Op::Mul(a, b)))
    }

    /// Adds the `1 x c` row `bias` to every row of `x`.
    pub fn add_bias(&mut self, x: Var, bias: Var) -> Result<Var> {
        let (xv, bv) = (self.value(x), self.value(bias));
        check("add_bias", xv, bv, bv.rows == 1 && bv.cols == xv.cols)?;
        let mut out = xv.clone();
        for row in out.data.chunks_mut(bv.cols.max(1)) {
            for (o, b) in row.iter_mut().zip(&bv.data) {
                *o += b;
            }
        }
        Ok(self.push(out, Op::AddBias(x, bias)))
    }

    pub fn relu(&mut self, x: Var) -> Var {
        let out = self.value(x).map(|v| if v > 0.0 { v } else { 0.0 });
        self.push(out, Op::Relu(x))
    }

    pub fn abs(&mut self, x: Var) -> Var {
        let out = self.value(x).map(libm::fabs);
        self.push(out, Op::Abs(x))
    }

    pub fn scale(&mut self, x: Var, c: f64) -> Var {
        let out = self.value(x).map(|v| v * c);
        self.push(out, Op::Scale(x, c))
    }

    pub fn add_scalar(&mut self, x: Var, c: f64) -> Var {
        let out = self.value(x).map(|v| v + c);
        self.push(out, Op::AddScalar(x))
    }

    /// `s * x` for a `1 x 1` variable `s`.
    pub fn scalar_mul(&mut self, s: Var, x: Var) -> Result<Var> {
        let sv = self.value(s);
        check("scalar_mul", sv, self.value(x), sv.shape() == (1, 1))?;
        let k = sv.data[0];
        let out = self.value(x).map(|v| v * k);
        Ok(self.push(out, Op::ScalarMul(s, x)))
    }

    /// `sum_i w_i * x_i` for `1 x 1` weights `w_i` and equally shaped `x_i`.
    pub fn weighted_sum(&mut self, weights: &[Var], xs: &[Var]) -> Result<Var> {
        let first = self.value(xs[0]);
        let mut out = Tensor::zeros(first.rows, first.cols);
        if weights.len() != xs.len() {
            return Err(Error::ShapeMismatch { op: "weighted_sum", left: (weights.len(), 1), right: (xs.len(), 1) });
        }
        for (&w, &x) in weights.iter().zip(xs) {
            let (wv, xv) = (self.value(w), self.value(x));
            check("weighted_sum", wv, xv, wv.shape() == (1, 1) && xv.shape() == out.shape())?;
            let k = wv.data[0];
            for (o, v) in out.data.iter_mut().zip(&xv.data) {
                *o += k * v;
            }
        }
        Ok(self.push(out, Op::WeightedSum(weights.to_vec(), xs.to_vec())))
    }

    pub fn concat_cols(&mut self, parts: &[Var]) -> Result<Var> {
        let first = self.value(parts[0]);
        let rows = first.rows;
        for &p in &parts[1..] {
            check("concat_cols", first, self.value(p), self.value(p).rows == rows)?;
        }
        let cols: usize = parts.iter().map(|&p| self.value(p).cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for &p in parts {
                data.extend_from_slice(self.value(p).row(r));
            }
        }
        Ok(self.push(Tensor { rows, cols, data }, Op::ConcatCols(parts.to_vec())))
    }

    /// Sums row blocks `offsets[i]..offsets[i + 1]` into output row `i`.
    pub fn segment_sum(&mut self, x: Var, offsets: &[usize]) -> Result<Var> {
        let xv = self.value(x);
        let ok = offsets.first() == Some(&0)
            && offsets.last() == Some(&xv.rows)
            && offsets.windows(2).all(|w| w[0] <= w[1]);
        check("segment_sum", xv, &Tensor::zeros(*offsets.last().unwrap_or(&0), 0), ok)?;
        let c = xv.cols;
        let mut out = Tensor::zeros(offsets.len() - 1, c);
        for (i, w) in offsets.windows(2).enumerate() {
            let dst = &mut out.data[i * c..(i + 1) * c];
            for r in w[0]..w[1] {
                for (d, s) in dst.iter_mut().zip(xv.row(r)) {
                    *d += s;
                }
            }
        }
        Ok(self.push(out, Op::SegmentSum(x, offsets.to_vec())))
    }

    /// Sum of neighbour rows: `A x`.
    pub fn spmm(&mut self, adj: &Arc<Adjacency>, x: Var) -> Result<Var> {
        let xv = self.value(x);
        check("spmm", xv, &Tensor::zeros(adj.node_count(), 0), xv.rows == adj.node_count())?;
        let out = adj.multiply(xv);
        Ok(self.push(out, Op::Spmm(adj.clone(), x)))
    }

    pub fn gather_rows(&mut self, x: Var, rows: &[usize]) -> Result<Var> {
        let xv = self.value(x);
        if let Some(&bad) = rows.iter().find(|&&r| r >= xv.rows) {
            return Err(Error::ShapeMismatch { op: "gather_rows", left: xv.shape(), right: (bad, 0) });
        }
        let mut data = Vec::with_capacity(rows.len() * xv.cols);
        for &r in rows {
            data.extend_from_slice(xv.row(r));
        }
        let out = Tensor { rows: rows.len(), cols: xv.cols, data };
        Ok(self.push(out, Op::GatherRows(x, rows.to_vec())))
    }

    /// Squared L2 norm of each row, as an `n x 1` column.
    pub fn row_sq_norm(&mut self, x: Var) -> Var {
        let xv = self.value(x);
        let data = (0..xv.rows).map(|r| xv.row(r).iter().map(|v| v * v).sum()).collect();
        self.push(Tensor { rows: xv.rows, cols: 1, data }, Op::RowSqNorm(x))
    }

    pub fn sum(&mut self, x: Var) -> Var {
        let s = self.value(x).data.iter().sum();
        self.push(Tensor::scalar(s), Op::Sum(x))
    }

    pub fn mean(&mut self, x: Var) -> Var {
        let n = self.value(x).data.len().max(1) as f64;
        let s = self.sum(x);
        self.scale(s, 1.0 / n)
    }

    /// Reverse sweep from the scalar `output`.
    pub fn backward(&self, output: Var) -> Gradients {
        let mut grads: Vec<Option<Tensor>> = vec![None; output.0 + 1];
        let (r, c) = self.value(output).shape();
        grads[output.0] = Some(Tensor::full(r, c, 1.0));
        for i in (0..=output.0).rev() {
            let Some(g) = grads[i].take() else { continue };
            let node = &self.nodes[i];
            let mut acc = |v: Var, d: Tensor| match &mut grads[v.0] {
                Some(t) => t.add_assign(&d),
                slot => *slot = Some(d),
            };
            match &node.op {
                Op::Leaf { .. } => {
                    grads[i] = Some(g);
                    continue;
                }
                Op::MatMul(a, b) => {
                    let (av, bv) = (self.value(*a), self.value(*b));
                    let (m, k, n) = (av.rows, av.cols, bv.cols);
                    let mut da = Tensor::zeros(m, k);
                    gemm((m, n, k), (&g.data, n as isize, 1), (&bv.data, 1, n as isize), &mut da.data);
                    let mut db = Tensor::zeros(k, n);
                    gemm((k, m, n), (&av.data, 1, k as isize), (&g.data, n as isize, 1), &mut db.data);
                    acc(*a, da);
                    acc(*b, db);
                }
                Op::Add(a, b) => {
                    acc(*a, g.clone());
                    acc(*b, g);
                }
                Op::Sub(a, b) => {
                    acc(*b, g.map(|v| -v));
                    acc(*a, g);
                }
                Op::Mul(a, b) => {
                    acc(*a, g.zip(self.value(*b), |d, y| d * y));
                    acc(*b, g.zip(self.value(*a), |d, x| d * x));
                }
                Op::AddBias(x, bias) => {
                    let c = g.cols;
                    let mut db = Tensor::zeros(1, c);
                    for row in g.data.chunks(c.max(1)) {
                        for (d, s) in db.data.iter_mut().zip(row) {
                            *d += s;
                        }
                    }
                    acc(*bias, db);
                    acc(*x, g);
                }
                Op::Relu(x) => acc(*x, g.zip(self.value(*x), |d, v| if v > 0.0 { d } else { 0.0 })),
                Op::Abs(x) => acc(
                    *x,
                    g.zip(self.value(*x), |d, v| {
                        if v > 0.0 {
                            d
                        } else if v < 0.0 {
                            -d
                        } else {
                            0.0
                        }
                    }),
                ),
                Op::Scale(x, c) => acc(*x, g.map(|d| d * c)),
                Op::AddScalar(x) => acc(*x, g),
                Op::ScalarMul(s, x) => {
                    let k = self.value(*s).data[0];
                    let ds: f64 = g.data.iter().zip(&self.value(*x).data).map(|(d, v)| d * v).sum();
                    acc(*s, Tensor::scalar(ds));
                    acc(*x, g.map(|d| d * k));
                }
                Op::WeightedSum(weights, xs) => {
                    for (&w, &x) in weights.iter().zip(xs) {
                        let k = self.value(w).data[0];
                        let dw: f64 = g.data.iter().zip(&self.value(x).data).map(|(d, v)| d * v).sum();
                        acc(w, Tensor::scalar(dw));
                        acc(x, g.map(|d| d * k));
                    }
                }
                Op::ConcatCols(parts) => {
                    let mut start = 0;
                    for &p in parts {
                        let pc = self.value(p).cols;
                        let mut d = Tensor::zeros(g.rows, pc);
                        for r in 0..g.rows {
                            d.data[r * pc..(r + 1) * pc].copy_from_slice(&g.row(r)[start..start + pc]);
                        }
                        start += pc;
                        acc(p, d);
                    }
                }
                Op::SegmentSum(x, offsets) => {
                    let c = g.cols;
                    let mut d = Tensor::zeros(self.value(*x).rows, c);
                    for (s, w) in offsets.windows(2).enumerate() {
                        for r in w[0]..w[1] {
                            d.data[r * c..(r + 1) * c].copy_from_slice(g.row(s));
                        }
                    }
                    acc(*x, d);
                }
                Op::Spmm(adj, x) => acc(*x, adj.multiply(&g)),
                Op::GatherRows(x, rows) => {
                    let c = g.cols;
                    let mut d = Tensor::zeros(self.value(*x).rows, c);
                    for (k, &r) in rows.iter().enumerate() {
                        for (a, b) in d.data[r * c..(r + 1) * c].iter_mut().zip(g.row(k)) {
                            *a += b;
                        }
                    }
                    acc(*x, d);
                }
                Op::RowSqNorm(x) => {
                    let xv = self.value(*x);
                    let c = xv.cols;
                    let mut d = xv.clone();
                    for r in 0..xv.rows {
                        let k = 2.0 * g.data[r];
                        d.data[r * c..(r + 1) * c].iter_mut().for_each(|v| *v *= k);
                    }
                    acc(*x, d);
                }
                Op::Sum(x) => {
                    let (r, c) = self.value(*x).shape();
                    acc(*x, Tensor::full(r, c, g.data[0]));
                }
            }
        }
        let mut params = Vec::new();
        for (i, node) in self.nodes.iter().enumerate().take(output.0 + 1) {
            if let (Op::Leaf { param: Some(p) }, Some(g)) = (&node.op, &grads[i]) {
                params.push((*p, g.clone()));
            }
        }
        Gradients { grads, params }
    }
}

/// Gradients produced by [`Tape::backward`].
#[derive(Clone, Debug)]
pub struct Gradients {
    grads: Vec<Option<Tensor>>,
    params: Vec<(usize, Tensor)>,
}

impl Gradients {
    /// Gradient of a leaf variable; `None` if it did not influence the output.
    pub fn get(&self, v: Var) -> Option<&Tensor> {
        self.grads.get(v.0).and_then(|g| g.as_ref())
    }

    /// Per-slot parameter gradients, summed over repeated uses and zero for
    /// slots that did not take part.
    pub fn params(&self, shapes: &[(usize, usize)]) -> Vec<Tensor> {
        let mut out: Vec<Tensor> = shapes.iter().map(|&(r, c)| Tensor::zeros(r, c)).collect();
        for (p, g) in &self.params {
            out[*p].add_assign(g);
        }
        out
    }
}

/// Adam with bias correction.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    /// Decoupled decay: each step also scales parameters by `1 - lr * weight_decay`.
    pub weight_decay: f64,
    step: u64,
    m: Vec<Tensor>,
    v: Vec<Tensor>,
}

impl AdamState {
    pub fn new(shapes: &[(usize, usize)], lr: f64) -> Self {
        AdamState {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay: 0.0,
            step: 0,
            m: shapes.iter().map(|&(r, c)| Tensor::zeros(r, c)).collect(),
            v: shapes.iter().map(|&(r, c)| Tensor::zeros(r, c)).collect(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// One update. Every gradient is checked before any parameter moves.
    pub fn step(&mut self, params: &mut [Tensor], names: &[String], grads: &[Tensor]) -> Result<()> {
        for (i, (p, g)) in params.iter().zip(grads).enumerate() {
            if p.shape() != g.shape() || self.m[i].shape() != p.shape() {
                return Err(Error::ShapeMismatch { op: "adam_step", left: p.shape(), right: g.shape() });
            }
            if !g.is_finite() {
                return Err(Error::NonFiniteGradient(names[i].clone()));
            }
        }
        self.step += 1;
        let t = self.step as f64;
        let c1 = 1.0 - libm::pow(self.beta1, t);
        let c2 = 1.0 - libm::pow(self.beta2, t);
        for ((p, g), (m, v)) in params.iter_mut().zip(grads).zip(self.m.iter_mut().zip(self.v.iter_mut())) {
            for j in 0..p.data.len() {
                let gj = g.data[j];
                m.data[j] = self.beta1 * m.data[j] + (1.0 - self.beta1) * gj;
                v.data[j] = self.beta2 * v.data[j] + (1.0 - self.beta2) * gj * gj;
                let mh = m.data[j] / c1;
                let vh = v.data[j] / c2;
                p.data[j] -= self.lr * (mh / (libm::sqrt(vh) + self.eps) + self.weight_decay * p.data[j]);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;

    fn random(rows: usize, cols: usize, rng: &mut impl Rng) -> Tensor {
        let data = (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect();
        Tensor::from_vec(rows, cols, data).unwrap()
    }

    /// Checks d(sum(w * f(inputs)))/d(inputs) against central differences,
    /// with a fixed random weighting `w` so every output entry matters.
    fn grad_check(inputs: Vec<Tensor>, f: impl Fn(&mut Tape, &[Var]) -> Var, tol: f64) {
        let mut rng = seeded(99);
        let eval = |inputs: &[Tensor], w: Option<&Tensor>| -> (f64, Tape, Vec<Var>, Var) {
            let mut tape = Tape::new();
            let vars: Vec<Var> = inputs.iter().map(|t| tape.constant(t.clone())).collect();
            let out = f(&mut tape, &vars);
            let wv = match w {
                Some(w) => tape.constant(w.clone()),
                None => tape.constant(Tensor::full(tape.value(out).rows, tape.value(out).cols, 1.0)),
            };
            let prod = tape.mul(out, wv).unwrap();
            let s = tape.sum(prod);
            (tape.value(s).data[0], tape, vars, s)
        };
        let shape = {
            let mut tape = Tape::new();
            let vars: Vec<Var> = inputs.iter().map(|t| tape.constant(t.clone())).collect();
            let out = f(&mut tape, &vars);
            tape.value(out).shape()
        };
        let w = random(shape.0, shape.1, &mut rng);
        let (_, tape, vars, s) = eval(&inputs, Some(&w));
        let grads = tape.backward(s);
        let h = 1e-5;
        for (k, input) in inputs.iter().enumerate() {
            let analytic = grads.get(vars[k]).cloned().unwrap_or_else(|| Tensor::zeros(input.rows, input.cols));
            for j in 0..input.data.len() {
                let mut plus = inputs.clone();
                plus[k].data[j] += h;
                let mut minus = inputs.clone();
                minus[k].data[j] -= h;
                let numeric = (eval(&plus, Some(&w)).0 - eval(&minus, Some(&w)).0) / (2.0 * h);
                let a = analytic.data[j];
                let err = (a - numeric).abs() / (1.0f64).max(a.abs()).max(numeric.abs());
                assert!(err < tol, "input {k} entry {j}: analytic {a} numeric {numeric}");
            }
        }
    }

    /// Values kept away from kinks so finite differences are valid.
    fn off_kink(rows: usize, cols: usize, rng: &mut impl Rng) -> Tensor {
        let mut t = random(rows, cols, rng);
        for v in &mut t.data {
            if v.abs() < 0.05 {
                *v += 0.1f64.copysign(*v);
            }
        }
        t
    }

    #[test]
    fn matmul_gradient() {
        let mut rng = seeded(1);
        grad_check(vec![random(5, 4, &mut rng), random(4, 3, &mut rng)], |t, v| t.matmul(v[0], v[1]).unwrap(), 1e-6);
    }

    #[test]
    fn elementwise_gradients() {
        let mut rng = seeded(2);
        let (a, b) = (off_kink(3, 4, &mut rng), off_kink(3, 4, &mut rng));
        grad_check(vec![a.clone(), b.clone()], |t, v| t.add(v[0], v[1]).unwrap(), 1e-5);
        grad_check(vec![a.clone(), b.clone()], |t, v| t.sub(v[0], v[1]).unwrap(), 1e-5);
        grad_check(vec![a.clone(), b.clone()], |t, v| t.mul(v[0], v[1]).unwrap(), 1e-5);
        grad_check(vec![a.clone()], |t, v| t.relu(v[0]), 1e-5);
        grad_check(vec![a.clone()], |t, v| t.abs(v[0]), 1e-5);
        grad_check(vec![a.clone()], |t, v| t.scale(v[0], -2.5), 1e-5);
        grad_check(vec![a.clone()], |t, v| t.add_scalar(v[0], 0.3), 1e-5);
        grad_check(vec![a.clone()], |t, v| t.row_sq_norm(v[0]), 1e-5);
        grad_check(vec![a.clone()], |t, v| t.mean(v[0]), 1e-5);
        grad_check(vec![a, b], |t, v| {
            let d = t.sub(v[0], v[1]).unwrap();
            t.relu(d)
        }, 1e-5);
    }

    #[test]
    fn structural_gradients() {
        let mut rng = seeded(3);
        let x = random(5, 3, &mut rng);
        let bias = random(1, 3, &mut rng);
        grad_check(vec![x.clone(), bias], |t, v| t.add_bias(v[0], v[1]).unwrap(), 1e-5);
        grad_check(vec![random(1, 1, &mut rng), x.clone()], |t, v| t.scalar_mul(v[0], v[1]).unwrap(), 1e-5);
        grad_check(
            vec![random(1, 1, &mut rng), x.clone(), random(1, 1, &mut rng), random(5, 3, &mut rng)],
            |t, v| t.weighted_sum(&[v[0], v[2], v[0]], &[v[1], v[3], v[3]]).unwrap(),
            1e-5,
        );
        grad_check(vec![x.clone(), random(5, 2, &mut rng)], |t, v| t.concat_cols(&[v[0], v[1], v[0]]).unwrap(), 1e-5);
        grad_check(vec![x.clone()], |t, v| t.segment_sum(v[0], &[0, 2, 2, 5]).unwrap(), 1e-5);
        grad_check(vec![x.clone()], |t, v| t.gather_rows(v[0], &[4, 0, 4, 2]).unwrap(), 1e-5);
        let (g, _) = Graph::disjoint_union(&[Graph::path(3), Graph::complete(2)]);
        let adj = Arc::new(Adjacency::from_graphs([&g]));
        grad_check(vec![x], move |t, v| t.spmm(&adj, v[0]).unwrap(), 1e-5);
    }

    #[test]
    fn relu_kink_has_zero_gradient() {
        let mut tape = Tape::new();
        let x = tape.constant(Tensor::from_vec(1, 3, vec![-1.0, 0.0, 2.0]).unwrap());
        let y = tape.relu(x);
        let s = tape.sum(y);
        let g = tape.backward(s);
        assert_eq!(g.get(x).unwrap().data(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn concat_backward_splits_blocks() {
        let mut tape = Tape::new();
        let a = tape.constant(Tensor::zeros(2, 1));
        let b = tape.constant(Tensor::zeros(2, 2));
        let c = tape.concat_cols(&[a, b]).unwrap();
        let w = tape.constant(Tensor::from_vec(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap());
        let p = tape.mul(c, w).unwrap();
        let s = tape.sum(p);
        let g = tape.backward(s);
        assert_eq!(g.get(a).unwrap().data(), &[1.0, 4.0]);
        assert_eq!(g.get(b).unwrap().data(), &[2.0, 3.0, 5.0, 6.0]);
    }

    #[test]
    fn shape_errors_are_typed() {
        let mut tape = Tape::new();
        let a = tape.constant(Tensor::zeros(2, 3));
        let b = tape.constant(Tensor::zeros(2, 3));
        assert!(matches!(tape.matmul(a, b), Err(Error::ShapeMismatch { op: "matmul", .. })));
        let c = tape.constant(Tensor::zeros(3, 3));
        assert!(tape.add(a, c).is_err());
        assert!(Tensor::from_vec(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn shared_parameter_gradients_accumulate() {
        let mut tape = Tape::new();
        let w1 = tape.param(0, Tensor::scalar(3.0));
        let w2 = tape.param(0, Tensor::scalar(3.0));
        let p = tape.mul(w1, w2).unwrap();
        let g = tape.backward(p);
        assert_eq!(g.params(&[(1, 1), (2, 2)]), vec![Tensor::scalar(6.0), Tensor::zeros(2, 2)]);
    }

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| alloc::format!("p{i}")).collect()
    }

    #[test]
    fn adam_zero_gradient_is_a_no_op() {
        let mut params = vec![Tensor::from_vec(1, 2, vec![0.5, -0.5]).unwrap()];
        let mut adam = AdamState::new(&[(1, 2)], 1e-4);
        adam.step(&mut params, &names(1), &[Tensor::zeros(1, 2)]).unwrap();
        assert_eq!(params[0].data(), &[0.5, -0.5]);
    }

    #[test]
    fn adam_first_step_matches_hand_evaluation() {
        let mut params = vec![Tensor::scalar(0.0)];
        let mut adam = AdamState::new(&[(1, 1)], 1e-4);
        adam.step(&mut params, &names(1), &[Tensor::scalar(1.0)]).unwrap();
        // m = 0.1, v = 0.001; bias corrected both give 1.0
        let expected = -1e-4 * 1.0 / (1.0 + 1e-8);
        assert!((params[0].data()[0] - expected).abs() < 1e-18);
        assert_eq!(adam.step_count(), 1);
    }

    #[test]
    fn adam_rejects_non_finite_and_names_parameter() {
        let mut params = vec![Tensor::scalar(0.0), Tensor::scalar(1.0)];
        let mut adam = AdamState::new(&[(1, 1), (1, 1)], 1e-4);
        let err = adam
            .step(&mut params, &names(2), &[Tensor::scalar(1.0), Tensor::scalar(f64::NAN)])
            .unwrap_err();
        assert_eq!(err, Error::NonFiniteGradient("p1".into()));
        assert_eq!(params, vec![Tensor::scalar(0.0), Tensor::scalar(1.0)]);
        assert_eq!(adam.step_count(), 0);
    }

    #[test]
    fn adam_is_deterministic() {
        let run = || {
            let mut rng = seeded(4);
            let mut params = vec![random(3, 3, &mut rng)];
            let mut adam = AdamState::new(&[(3, 3)], 1e-2);
            for _ in 0..100 {
                let g = random(3, 3, &mut rng);
                adam.step(&mut params, &names(1), &[g]).unwrap();
            }
            params
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn adam_minimises_a_quadratic() {
        let mut params = vec![Tensor::from_vec(1, 2, vec![3.0, -2.0]).unwrap()];
        let mut adam = AdamState::new(&[(1, 2)], 0.05);
        for _ in 0..2000 {
            let g = params[0].map(|x| 2.0 * x);
            adam.step(&mut params, &names(1), &[g]).unwrap();
        }
        assert!(params[0].data().iter().all(|x| x.abs() < 1e-2));
    }
}
