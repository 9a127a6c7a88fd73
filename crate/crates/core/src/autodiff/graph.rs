use indexmap::IndexMap;

use super::tensor::Tensor;
use crate::error::{Error, Result};

/// Handle to a node in a [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone)]
enum Op {
    /// Fed at forward time. `None` dimensions accept any extent.
    Input {
        name: String,
        shape: Vec<Option<usize>>,
    },
    Param,
    MatMul(NodeId, NodeId),
    /// `x Wᵀ + b` applied to each row of `x`.
    Affine {
        x: NodeId,
        w: NodeId,
        b: Option<NodeId>,
    },
    Add(NodeId, NodeId),
    Hadamard(NodeId, NodeId),
    Relu(NodeId),
    Scale(NodeId, f64),
    Sum(NodeId),
    Mean(NodeId),
    /// Mean squared error between prediction and target.
    Mse(NodeId, NodeId),
}

/// A static reverse-mode autodiff graph over dense tensors.
///
/// Nodes are appended in construction order, which is a topological order
/// because every builder takes existing handles. Parameters live inside the
/// graph and keep their values across passes.
#[derive(Debug, Clone)]
pub struct Graph {
    ops: Vec<Op>,
    needs_grad: Vec<bool>,
    values: Vec<Tensor>,
    adjoints: Vec<Vec<f64>>,
    params: IndexMap<String, NodeId>,
    inputs: IndexMap<String, NodeId>,
    /// Nodes `0..evaluated` hold values from the latest forward pass.
    evaluated: usize,
    /// Nodes `0..differentiated` hold adjoints from the latest backward pass.
    differentiated: usize,
}

impl Default for Graph {
    fn default() -> Self {
        Self::new()
    }
}

struct Dims {
    r: usize,
    k: usize,
    c: usize,
}

impl Graph {
    pub fn new() -> Self {
        Self {
            ops: Vec::new(),
            needs_grad: Vec::new(),
            values: Vec::new(),
            adjoints: Vec::new(),
            params: IndexMap::new(),
            inputs: IndexMap::new(),
            evaluated: 0,
            differentiated: 0,
        }
    }

    fn push(&mut self, op: Op, needs_grad: bool, value: Tensor) -> NodeId {
        for id in self.operands(&op) {
            assert!(id.0 < self.ops.len(), "node {id:?} does not belong to this graph");
        }
        self.ops.push(op);
        self.needs_grad.push(needs_grad);
        self.values.push(value);
        self.adjoints.push(Vec::new());
        self.evaluated = 0;
        self.differentiated = 0;
        NodeId(self.ops.len() - 1)
    }

    fn operands(&self, op: &Op) -> Vec<NodeId> {
        match *op {
            Op::Input { .. } | Op::Param => vec![],
            Op::MatMul(a, b) | Op::Add(a, b) | Op::Hadamard(a, b) | Op::Mse(a, b) => vec![a, b],
            Op::Affine { x, w, b } => {
                let mut v = vec![x, w];
                v.extend(b);
                v
            }
            Op::Relu(a) | Op::Scale(a, _) | Op::Sum(a) | Op::Mean(a) => vec![a],
        }
    }

    fn grad_of(&self, ids: &[NodeId]) -> bool {
        ids.iter().any(|id| self.needs_grad[id.0])
    }

    /// Declares a fed input. `None` entries in `shape` match any extent.
    pub fn input(&mut self, name: &str, shape: &[Option<usize>]) -> Result<NodeId> {
        if self.inputs.contains_key(name) {
            return Err(Error::Config(format!("duplicate input `{name}`")));
        }
        let op = Op::Input {
            name: name.to_string(),
            shape: shape.to_vec(),
        };
        let id = self.push(op, false, Tensor::zeros(vec![0]));
        self.inputs.insert(name.to_string(), id);
        Ok(id)
    }

    /// Declares a trainable leaf with its initial value.
    pub fn param(&mut self, name: &str, value: Tensor) -> Result<NodeId> {
        if self.params.contains_key(name) {
            return Err(Error::Config(format!("duplicate parameter `{name}`")));
        }
        let id = self.push(Op::Param, true, value);
        self.params.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn matmul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let g = self.grad_of(&[a, b]);
        self.push(Op::MatMul(a, b), g, Tensor::zeros(vec![0]))
    }

    pub fn affine(&mut self, x: NodeId, w: NodeId, b: Option<NodeId>) -> NodeId {
        let mut ids = vec![x, w];
        ids.extend(b);
        let g = self.grad_of(&ids);
        self.push(Op::Affine { x, w, b }, g, Tensor::zeros(vec![0]))
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let g = self.grad_of(&[a, b]);
        self.push(Op::Add(a, b), g, Tensor::zeros(vec![0]))
    }

    pub fn hadamard(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let g = self.grad_of(&[a, b]);
        self.push(Op::Hadamard(a, b), g, Tensor::zeros(vec![0]))
    }

    pub fn relu(&mut self, a: NodeId) -> NodeId {
        let g = self.grad_of(&[a]);
        self.push(Op::Relu(a), g, Tensor::zeros(vec![0]))
    }

    pub fn scale(&mut self, a: NodeId, factor: f64) -> NodeId {
        let g = self.grad_of(&[a]);
        self.push(Op::Scale(a, factor), g, Tensor::zeros(vec![0]))
    }

    pub fn sum(&mut self, a: NodeId) -> NodeId {
        let g = self.grad_of(&[a]);
        self.push(Op::Sum(a), g, Tensor::zeros(vec![0]))
    }

    pub fn mean(&mut self, a: NodeId) -> NodeId {
        let g = self.grad_of(&[a]);
        self.push(Op::Mean(a), g, Tensor::zeros(vec![0]))
    }

    pub fn mse(&mut self, prediction: NodeId, target: NodeId) -> NodeId {
        let g = self.grad_of(&[prediction, target]);
        self.push(Op::Mse(prediction, target), g, Tensor::zeros(vec![0]))
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn input_id(&self, name: &str) -> Option<NodeId> {
        self.inputs.get(name).copied()
    }

    pub fn param_id(&self, name: &str) -> Option<NodeId> {
        self.params.get(name).copied()
    }

    /// Parameter names in declaration order.
    pub fn param_names(&self) -> impl Iterator<Item = &str> {
        self.params.keys().map(String::as_str)
    }

    pub fn param_value(&self, name: &str) -> Option<&Tensor> {
        self.params.get(name).map(|id| &self.values[id.0])
    }

    /// Replaces a parameter value. The shape must be unchanged.
    pub fn set_param(&mut self, name: &str, value: Tensor) -> Result<()> {
        let id = *self
            .params
            .get(name)
            .ok_or_else(|| Error::Config(format!("no parameter named `{name}`")))?;
        if self.values[id.0].shape() != value.shape() {
            return Err(Error::Shape(format!(
                "parameter `{name}` has shape {:?}, got {:?}",
                self.values[id.0].shape(),
                value.shape()
            )));
        }
        self.values[id.0] = value;
        self.evaluated = 0;
        self.differentiated = 0;
        Ok(())
    }

    /// Mutable access to a parameter buffer. Invalidates cached passes.
    pub fn param_data_mut(&mut self, name: &str) -> Option<&mut [f64]> {
        let id = *self.params.get(name)?;
        self.evaluated = 0;
        self.differentiated = 0;
        Some(self.values[id.0].data_mut())
    }

    pub fn param_count(&self) -> usize {
        self.params.values().map(|id| self.values[id.0].len()).sum()
    }

    /// All parameters concatenated in declaration order.
    pub fn flat_params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for id in self.params.values() {
            out.extend_from_slice(self.values[id.0].data());
        }
        out
    }

    pub fn set_flat_params(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.param_count() {
            return Err(Error::Shape(format!(
                "expected {} parameters, got {}",
                self.param_count(),
                flat.len()
            )));
        }
        let mut offset = 0;
        for id in self.params.values() {
            let v = self.values[id.0].data_mut();
            v.copy_from_slice(&flat[offset..offset + v.len()]);
            offset += v.len();
        }
        self.evaluated = 0;
        self.differentiated = 0;
        Ok(())
    }

    /// Value from the latest forward pass.
    pub fn value(&self, id: NodeId) -> Result<&Tensor> {
        if id.0 >= self.evaluated {
            return Err(Error::State(format!("node {} has not been evaluated", id.0)));
        }
        Ok(&self.values[id.0])
    }

    /// Evaluates every node up to and including `output`.
    pub fn forward(&mut self, feeds: &[(&str, &Tensor)], output: NodeId) -> Result<&Tensor> {
        for (name, _) in feeds {
            if !self.inputs.contains_key(*name) {
                return Err(Error::Config(format!("graph has no input named `{name}`")));
            }
        }
        self.evaluated = 0;
        self.differentiated = 0;
        for i in 0..=output.0 {
            let mut out = std::mem::replace(&mut self.values[i], Tensor::zeros(vec![]));
            let res = self.eval_node(i, feeds, &mut out);
            self.values[i] = out;
            res?;
        }
        self.evaluated = output.0 + 1;
        Ok(&self.values[output.0])
    }

    fn eval_node(&self, i: usize, feeds: &[(&str, &Tensor)], out: &mut Tensor) -> Result<()> {
        let v = |id: NodeId| &self.values[id.0];
        match &self.ops[i] {
            Op::Input { name, shape } => {
                let fed = feeds
                    .iter()
                    .find(|(n, _)| n == name)
                    .ok_or_else(|| Error::State(format!("input `{name}` was not fed")))?
                    .1;
                let ok = fed.rank() == shape.len()
                    && fed.shape().iter().zip(shape).all(|(a, b)| b.is_none_or(|b| *a == b));
                if !ok {
                    return Err(Error::Shape(format!(
                        "input `{name}` expects shape {shape:?}, got {:?}",
                        fed.shape()
                    )));
                }
                out.reshape_in_place(fed.shape());
                out.data_mut().copy_from_slice(fed.data());
            }
            Op::Param => {}
            Op::MatMul(a, b) => {
                let (a, b) = (v(*a), v(*b));
                let (dims, shape) = matmul_dims(a.shape(), b.shape())?;
                out.reshape_in_place(&shape);
                // C = A B with A r×k, B k×c, all row-major.
                gemm(dims.r, dims.k, dims.c, a.data(), dims.k, 1, b.data(), dims.c, 1, 0.0, out.data_mut(), dims.c);
            }
            Op::Affine { x, w, b } => {
                let (xv, wv) = (v(*x), v(*w));
                let (rows, fan_in, fan_out, shape) = affine_dims(xv.shape(), wv.shape())?;
                out.reshape_in_place(&shape);
                let data = out.data_mut();
                let beta = if let Some(b) = b {
                    let bv = v(*b);
                    if bv.shape() != [fan_out] {
                        return Err(Error::Shape(format!(
                            "bias of shape {:?} for {fan_out} outputs",
                            bv.shape()
                        )));
                    }
                    for row in data.chunks_exact_mut(fan_out) {
                        row.copy_from_slice(bv.data());
                    }
                    1.0
                } else {
                    0.0
                };
                // Y = X Wᵀ: Wᵀ read with row stride 1 and column stride fan_in.
                gemm(rows, fan_in, fan_out, xv.data(), fan_in, 1, wv.data(), 1, fan_in, beta, data, fan_out);
            }
            Op::Add(a, b) | Op::Hadamard(a, b) => {
                let (av, bv) = (v(*a), v(*b));
                same_shape(av, bv)?;
                out.reshape_in_place(av.shape());
                let mul = matches!(self.ops[i], Op::Hadamard(..));
                for ((o, x), y) in out.data_mut().iter_mut().zip(av.data()).zip(bv.data()) {
                    *o = if mul { x * y } else { x + y };
                }
            }
            Op::Relu(a) => {
                let av = v(*a);
                out.reshape_in_place(av.shape());
                for (o, x) in out.data_mut().iter_mut().zip(av.data()) {
                    *o = x.max(0.0);
                }
            }
            Op::Scale(a, f) => {
                let av = v(*a);
                out.reshape_in_place(av.shape());
                for (o, x) in out.data_mut().iter_mut().zip(av.data()) {
                    *o = f * x;
                }
            }
            Op::Sum(a) | Op::Mean(a) => {
                let av = v(*a);
                let s: f64 = av.data().iter().sum();
                let s = if matches!(self.ops[i], Op::Mean(_)) {
                    s / av.len().max(1) as f64
                } else {
                    s
                };
                out.reshape_in_place(&[]);
                out.data_mut()[0] = s;
            }
            Op::Mse(p, t) => {
                let (pv, tv) = (v(*p), v(*t));
                same_shape(pv, tv)?;
                let s: f64 = pv
                    .data()
                    .iter()
                    .zip(tv.data())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                out.reshape_in_place(&[]);
                out.data_mut()[0] = s / pv.len().max(1) as f64;
            }
        }
        Ok(())
    }

    /// Reverse pass from a scalar node; adjoints are reset first.
    pub fn backward_in_place(&mut self, loss: NodeId) -> Result<()> {
        if loss.0 >= self.evaluated {
            return Err(Error::State("backward called before forward".into()));
        }
        if self.values[loss.0].len() != 1 {
            return Err(Error::Shape(format!(
                "backward needs a scalar output, node has shape {:?}",
                self.values[loss.0].shape()
            )));
        }
        for i in 0..=loss.0 {
            let len = if self.needs_grad[i] { self.values[i].len() } else { 0 };
            let adj = &mut self.adjoints[i];
            adj.clear();
            adj.resize(len, 0.0);
        }
        if self.adjoints[loss.0].is_empty() {
            self.differentiated = loss.0 + 1;
            return Ok(());
        }
        self.adjoints[loss.0][0] = 1.0;
        for i in (0..=loss.0).rev() {
            if !self.needs_grad[i] {
                continue;
            }
            let dc = std::mem::take(&mut self.adjoints[i]);
            self.back_node(i, &dc);
            self.adjoints[i] = dc;
        }
        self.differentiated = loss.0 + 1;
        Ok(())
    }

    fn back_node(&mut self, i: usize, dc: &[f64]) {
        let values = &self.values;
        let needs = &self.needs_grad;
        let adj = &mut self.adjoints;
        match self.ops[i] {
            Op::Input { .. } | Op::Param => {}
            Op::MatMul(a, b) => {
                let (dims, _) = matmul_dims(values[a.0].shape(), values[b.0].shape())
                    .expect("shapes checked in forward");
                let Dims { r, k, c } = dims;
                if needs[a.0] {
                    // dA = dC Bᵀ
                    gemm(r, c, k, dc, c, 1, values[b.0].data(), 1, c, 1.0, &mut adj[a.0], k);
                }
                if needs[b.0] {
                    // dB = Aᵀ dC
                    gemm(k, r, c, values[a.0].data(), 1, k, dc, c, 1, 1.0, &mut adj[b.0], c);
                }
            }
            Op::Affine { x, w, b } => {
                let (rows, fan_in, fan_out, _) =
                    affine_dims(values[x.0].shape(), values[w.0].shape()).expect("checked");
                if needs[x.0] {
                    // dX = dY W
                    gemm(rows, fan_out, fan_in, dc, fan_out, 1, values[w.0].data(), fan_in, 1, 1.0, &mut adj[x.0], fan_in);
                }
                if needs[w.0] {
                    // dW = dYᵀ X
                    gemm(fan_out, rows, fan_in, dc, 1, fan_out, values[x.0].data(), fan_in, 1, 1.0, &mut adj[w.0], fan_in);
                }
                if let Some(b) = b {
                    if needs[b.0] {
                        let db = &mut adj[b.0];
                        for row in dc.chunks_exact(fan_out) {
                            for (d, g) in db.iter_mut().zip(row) {
                                *d += g;
                            }
                        }
                    }
                }
            }
            Op::Add(a, b) => {
                for id in [a, b] {
                    if needs[id.0] {
                        for (d, g) in adj[id.0].iter_mut().zip(dc) {
                            *d += g;
                        }
                    }
                }
            }
            Op::Hadamard(a, b) => {
                for (id, other) in [(a, b), (b, a)] {
                    if needs[id.0] {
                        let o = values[other.0].data();
                        for ((d, g), y) in adj[id.0].iter_mut().zip(dc).zip(o) {
                            *d += g * y;
                        }
                    }
                }
            }
            Op::Relu(a) => {
                let x = values[a.0].data();
                for ((d, g), xv) in adj[a.0].iter_mut().zip(dc).zip(x) {
                    // σ′(0) = 0
                    if *xv > 0.0 {
                        *d += g;
                    }
                }
            }
            Op::Scale(a, f) => {
                for (d, g) in adj[a.0].iter_mut().zip(dc) {
                    *d += f * g;
                }
            }
            Op::Sum(a) | Op::Mean(a) => {
                let g = if matches!(self.ops[i], Op::Mean(_)) {
                    dc[0] / values[a.0].len().max(1) as f64
                } else {
                    dc[0]
                };
                adj[a.0].iter_mut().for_each(|d| *d += g);
            }
            Op::Mse(p, t) => {
                let scale = 2.0 * dc[0] / values[p.0].len().max(1) as f64;
                let (pv, tv) = (values[p.0].data(), values[t.0].data());
                for (id, sign) in [(p, 1.0), (t, -1.0)] {
                    if needs[id.0] {
                        for ((d, x), y) in adj[id.0].iter_mut().zip(pv).zip(tv) {
                            *d += sign * scale * (x - y);
                        }
                    }
                }
            }
        }
    }

    /// Gradient of the latest backward pass with respect to a parameter.
    pub fn param_grad(&self, name: &str) -> Result<&[f64]> {
        let id = self
            .params
            .get(name)
            .ok_or_else(|| Error::Config(format!("no parameter named `{name}`")))?;
        if id.0 >= self.differentiated {
            return Err(Error::State(format!("no gradient available for `{name}`")));
        }
        Ok(&self.adjoints[id.0])
    }

    /// Visits every parameter with its value and the gradient from the latest
    /// backward pass, allowing in-place updates.
    pub fn update_params<F>(&mut self, mut f: F) -> Result<()>
    where
        F: FnMut(&str, &mut [f64], &[f64]),
    {
        if self.params.values().any(|id| id.0 >= self.differentiated) {
            return Err(Error::State("parameter update without a backward pass".into()));
        }
        for (name, id) in &self.params {
            f(name, self.values[id.0].data_mut(), &self.adjoints[id.0]);
        }
        self.evaluated = 0;
        self.differentiated = 0;
        Ok(())
    }

    /// Reverse pass returning `∂loss/∂θ` for every parameter.
    ///
    /// Parameters declared after `loss` do not influence it and get zeros.
    pub fn backward(&mut self, loss: NodeId) -> Result<IndexMap<String, Tensor>> {
        self.backward_in_place(loss)?;
        Ok(self
            .params
            .iter()
            .map(|(name, id)| {
                let shape = self.values[id.0].shape().to_vec();
                let data = if id.0 <= loss.0 {
                    self.adjoints[id.0].clone()
                } else {
                    vec![0.0; self.values[id.0].len()]
                };
                (name.clone(), Tensor::new(shape, data).expect("adjoint matches value"))
            })
            .collect())
    }

    /// Sign pattern of every ReLU input from the latest forward pass.
    ///
    /// Two passes with equal patterns lie on the same linear piece.
    pub fn relu_pattern(&self) -> Vec<bool> {
        let mut out = Vec::new();
        for op in self.ops.iter().take(self.evaluated) {
            if let Op::Relu(a) = op {
                out.extend(self.values[a.0].data().iter().map(|x| *x > 0.0));
            }
        }
        out
    }
}

fn same_shape(a: &Tensor, b: &Tensor) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::Shape(format!(
            "operands have shapes {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(())
}

/// Rank-1 left operands act as a row, rank-1 right operands as a column; the
/// corresponding output axis is dropped.
fn matmul_dims(a: &[usize], b: &[usize]) -> Result<(Dims, Vec<usize>)> {
    let (r, k, a_row) = match *a {
        [k] => (1, k, true),
        [r, k] => (r, k, false),
        _ => return Err(Error::Shape(format!("matmul operand of rank {}", a.len()))),
    };
    let (k2, c, b_col) = match *b {
        [k] => (k, 1, true),
        [k, c] => (k, c, false),
        _ => return Err(Error::Shape(format!("matmul operand of rank {}", b.len()))),
    };
    if k != k2 {
        return Err(Error::Shape(format!("matmul of {a:?} by {b:?}")));
    }
    let mut shape = Vec::new();
    if !a_row {
        shape.push(r);
    }
    if !b_col {
        shape.push(c);
    }
    Ok((Dims { r, k, c }, shape))
}

fn affine_dims(x: &[usize], w: &[usize]) -> Result<(usize, usize, usize, Vec<usize>)> {
    let [fan_out, fan_in] = *w else {
        return Err(Error::Shape(format!("affine weight must be a matrix, got {w:?}")));
    };
    match *x {
        [n] if n == fan_in => Ok((1, fan_in, fan_out, vec![fan_out])),
        [rows, n] if n == fan_in => Ok((rows, fan_in, fan_out, vec![rows, fan_out])),
        _ => Err(Error::Shape(format!(
            "affine input {x:?} does not match weight {w:?}"
        ))),
    }
}

/// `C = A B + beta C` with `A` m×k, `B` k×n, `C` m×n row-major, arbitrary
/// strides on `A` and `B`.
#[allow(clippy::too_many_arguments)]
fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    rsa: usize,
    csa: usize,
    b: &[f64],
    rsb: usize,
    csb: usize,
    beta: f64,
    c: &mut [f64],
    rsc: usize,
) {
    if m == 0 || n == 0 {
        return;
    }
    assert!(m == 0 || k == 0 || (m - 1) * rsa + (k - 1) * csa < a.len());
    assert!(k == 0 || (k - 1) * rsb + (n - 1) * csb < b.len());
    assert!((m - 1) * rsc + n - 1 < c.len());
    if k == 0 {
        c.iter_mut().for_each(|x| *x *= beta);
        return;
    }
    // SAFETY: the asserts above bound every strided access inside the slices.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa as isize,
            csa as isize,
            b.as_ptr(),
            rsb as isize,
            csb as isize,
            beta,
            c.as_mut_ptr(),
            rsc as isize,
            1,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vecn(v: &[f64]) -> Tensor {
        Tensor::vector(v.to_vec())
    }

    #[test]
    fn identity_graph() {
        let mut g = Graph::new();
        let x = g.input("x", &[Some(3)]).unwrap();
        let t = vecn(&[1.0, -2.0, 3.0]);
        assert_eq!(g.forward(&[("x", &t)], x).unwrap(), &t);
    }

    #[test]
    fn hadamard_forward_and_backward() {
        let mut g = Graph::new();
        let a = g.param("a", vecn(&[1.0, 2.0])).unwrap();
        let b = g.param("b", vecn(&[3.0, 4.0])).unwrap();
        let h = g.hadamard(a, b);
        let s = g.sum(h);
        assert_eq!(g.forward(&[], h).unwrap().data(), &[3.0, 8.0]);
        g.forward(&[], s).unwrap();
        let grads = g.backward(s).unwrap();
        assert_eq!(grads["a"].data(), &[3.0, 4.0]);
        assert_eq!(grads["b"].data(), &[1.0, 2.0]);

        let mut g = Graph::new();
        let a = g.param("a", vecn(&[1.0, 2.0, 3.0])).unwrap();
        let b = g.param("b", vecn(&[4.0, 5.0, 6.0])).unwrap();
        let h = g.hadamard(a, b);
        assert_eq!(g.forward(&[], h).unwrap().data(), &[4.0, 10.0, 18.0]);
    }

    #[test]
    fn dot_product_gradient_is_the_other_vector() {
        let mut g = Graph::new();
        let x = g.input("x", &[Some(3)]).unwrap();
        let w = g.param("w", vecn(&[0.5, -1.0, 2.0])).unwrap();
        let l = g.matmul(w, x);
        let xv = vecn(&[1.0, 2.0, -3.0]);
        let out = g.forward(&[("x", &xv)], l).unwrap();
        assert_eq!(out.rank(), 0);
        assert!((out.item() - (0.5 - 2.0 - 6.0)).abs() < 1e-15);
        assert_eq!(g.backward(l).unwrap()["w"].data(), xv.data());
    }

    #[test]
    fn two_layer_relu_by_hand() {
        let mut g = Graph::new();
        let x = g.input("x", &[Some(2)]).unwrap();
        let w1 = g.param("W1", Tensor::matrix(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap()).unwrap();
        let w2 = g.param("W2", Tensor::matrix(1, 2, vec![1.0, 1.0]).unwrap()).unwrap();
        let h = g.affine(x, w1, None);
        let a = g.relu(h);
        let o = g.affine(a, w2, None);
        let y = g.scale(o, (2.0f64 / 2.0).sqrt());
        let out = g.forward(&[("x", &vecn(&[1.0, -1.0]))], y).unwrap();
        assert_eq!(out.data(), &[1.0]);
    }

    #[test]
    fn backward_before_forward_is_a_state_error() {
        let mut g = Graph::new();
        let a = g.param("a", vecn(&[1.0])).unwrap();
        let s = g.sum(a);
        assert!(matches!(g.backward(s), Err(Error::State(_))));
    }

    #[test]
    fn shape_mismatches_are_reported() {
        let mut g = Graph::new();
        let x = g.input("x", &[None, Some(3)]).unwrap();
        let w = g.param("w", Tensor::zeros(vec![2, 4])).unwrap();
        let y = g.affine(x, w, None);
        let bad = Tensor::zeros(vec![5, 2]);
        assert!(matches!(g.forward(&[("x", &bad)], y), Err(Error::Shape(_))));
        let wrong_in = Tensor::zeros(vec![5, 3]);
        assert!(matches!(g.forward(&[("x", &wrong_in)], y), Err(Error::Shape(_))));

        let mut g = Graph::new();
        let a = g.param("a", vecn(&[1.0, 2.0])).unwrap();
        let b = g.param("b", vecn(&[1.0, 2.0, 3.0])).unwrap();
        let c = g.add(a, b);
        assert!(matches!(g.forward(&[], c), Err(Error::Shape(_))));
    }

    #[test]
    fn relu_derivative_at_zero_is_zero() {
        let mut g = Graph::new();
        let a = g.param("a", vecn(&[0.0, 1.0, -1.0])).unwrap();
        let r = g.relu(a);
        let s = g.sum(r);
        g.forward(&[], s).unwrap();
        assert_eq!(g.backward(s).unwrap()["a"].data(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn batched_affine_with_bias_and_mse() {
        // y = x Wᵀ + b on two rows, loss = mean((y - t)²)
        let mut g = Graph::new();
        let x = g.input("x", &[None, Some(2)]).unwrap();
        let t = g.input("t", &[None, Some(1)]).unwrap();
        let w = g.param("W", Tensor::matrix(1, 2, vec![2.0, -1.0]).unwrap()).unwrap();
        let b = g.param("b", vecn(&[0.5])).unwrap();
        let y = g.affine(x, w, Some(b));
        let l = g.mse(y, t);
        let xv = Tensor::matrix(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let tv = Tensor::matrix(2, 1, vec![2.0, 0.0]).unwrap();
        let loss = g.forward(&[("x", &xv), ("t", &tv)], l).unwrap().item();
        // predictions 2.5 and −0.5, errors 0.5 and −0.5
        assert!((loss - 0.25).abs() < 1e-15);
        let gr = g.backward(l).unwrap();
        assert_eq!(gr["W"].data(), &[0.5, -0.5]);
        assert_eq!(gr["b"].data(), &[0.0]);
    }

    #[test]
    fn matrix_matrix_gradients() {
        let mut g = Graph::new();
        let a = g.param("a", Tensor::matrix(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap()).unwrap();
        let b = g.param("b", Tensor::matrix(3, 2, vec![1.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap()).unwrap();
        let c = g.matmul(a, b);
        let s = g.sum(c);
        assert_eq!(g.forward(&[], c).unwrap().data(), &[4.0, 5.0, 10.0, 11.0]);
        g.forward(&[], s).unwrap();
        let gr = g.backward(s).unwrap();
        // d sum(AB)/dA = 1 Bᵀ: row sums of B
        assert_eq!(gr["a"].data(), &[1.0, 1.0, 2.0, 1.0, 1.0, 2.0]);
        // d sum(AB)/dB = Aᵀ 1: column sums of A
        assert_eq!(gr["b"].data(), &[5.0, 5.0, 7.0, 7.0, 9.0, 9.0]);
    }
}
