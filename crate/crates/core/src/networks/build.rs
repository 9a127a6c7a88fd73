use indexmap::IndexMap;

use super::spec::{Activation, ActivationPlacement, Architecture, NetworkSpec};
use crate::autodiff::{Graph, NodeId, Tensor};
use crate::error::{Error, Result};
use crate::rng::{Purpose, SeedStream, Stream};

/// A built network: the autodiff graph plus handles to its input, output,
/// target and mean-squared-error loss nodes.
#[derive(Debug, Clone)]
pub struct Network {
    spec: NetworkSpec,
    graph: Graph,
    output: NodeId,
    loss: NodeId,
}

/// Builds `spec` with parameters drawn from `SeedStream::new(seed)`, run 0,
/// purpose [`Purpose::Init`].
pub fn build(spec: &NetworkSpec, seed: u64) -> Result<Network> {
    let mut stream = SeedStream::new(seed).stream(0, Purpose::Init);
    build_with_stream(spec, &mut stream)
}

fn normal_tensor(stream: &mut Stream, rows: usize, cols: usize, std: f64) -> Tensor {
    let data = (0..rows * cols).map(|_| std * stream.normal()).collect();
    Tensor::matrix(rows, cols, data).expect("sized buffer")
}

fn uniform_bias(stream: &mut Stream, len: usize, fan_in: usize) -> Tensor {
    let bound = 1.0 / (fan_in as f64).sqrt();
    Tensor::vector((0..len).map(|_| bound * (2.0 * stream.uniform() - 1.0)).collect())
}

/// Builds `spec` drawing every initial value from `stream`.
///
/// Two-layer kinds draw `W1, W2[, W3]` i.i.d. standard normal in that order.
/// Deep kinds draw, per layer `ℓ`: `Wℓ` with std `√(2/fan_in)`, then `bℓ`
/// uniform on `±1/√fan_in`, then `Aℓ` with std `√(1/fan_in)` when the layer
/// is multiplicative.
pub fn build_with_stream(spec: &NetworkSpec, stream: &mut Stream) -> Result<Network> {
    spec.validate()?;
    let mut g = Graph::new();
    let x = g.input("x", &[None, Some(spec.input_dim)])?;
    let act = |g: &mut Graph, h: NodeId| match spec.activation {
        Activation::Relu => g.relu(h),
        Activation::None => h,
    };
    let (d, m) = (spec.input_dim, spec.width);
    let output = match spec.kind {
        Architecture::TwoLayerReLU => {
            let w1 = g.param("W1", normal_tensor(stream, m, d, 1.0))?;
            let w2 = g.param("W2", normal_tensor(stream, spec.output_dim, m, 1.0))?;
            let h = g.affine(x, w1, None);
            let h = act(&mut g, h);
            let o = g.affine(h, w2, None);
            g.scale(o, (2.0 / m as f64).sqrt())
        }
        Architecture::TwoLayerPi => {
            let w1 = g.param("W1", normal_tensor(stream, m, d, 1.0))?;
            let w2 = g.param("W2", normal_tensor(stream, m, d, 1.0))?;
            let w3 = g.param("W3", normal_tensor(stream, spec.output_dim, m, 1.0))?;
            let a = g.affine(x, w2, None);
            let a = act(&mut g, a);
            let b = g.affine(x, w1, None);
            let b = act(&mut g, b);
            let h = g.hadamard(a, b);
            let o = g.affine(h, w3, None);
            g.scale(o, (2.0 / m as f64).sqrt())
        }
        Architecture::Mlp | Architecture::PiNcp => deep(spec, &mut g, x, stream)?,
    };
    let target = g.input("y", &[None, Some(spec.output_dim)])?;
    let loss = g.mse(output, target);
    Ok(Network {
        spec: spec.clone(),
        graph: g,
        output,
        loss,
    })
}

fn deep(spec: &NetworkSpec, g: &mut Graph, x: NodeId, stream: &mut Stream) -> Result<NodeId> {
    let l_max = spec.depth;
    let dims: Vec<usize> = (0..=l_max)
        .map(|l| match l {
            0 => spec.input_dim,
            l if l == l_max => spec.output_dim,
            _ => spec.width,
        })
        .collect();
    let relu = spec.activation == Activation::Relu;
    let (mut h, mut z) = (x, x);
    let mut z_dim = dims[0];
    for l in 1..=l_max {
        let (fan_in, fan_out) = (dims[l - 1], dims[l]);
        let w = g.param(
            &format!("W{l}"),
            normal_tensor(stream, fan_out, fan_in, (2.0 / fan_in as f64).sqrt()),
        )?;
        let b = g.param(&format!("b{l}"), uniform_bias(stream, fan_out, fan_in))?;
        let pre = g.affine(h, w, Some(b));
        let last = l == l_max;
        let next = if spec.is_multiplicative(l) {
            let a = g.param(
                &format!("A{l}"),
                normal_tensor(stream, fan_out, z_dim, (1.0 / z_dim as f64).sqrt()),
            )?;
            let inj = g.affine(z, a, None);
            let out = match (last || !relu, spec.placement) {
                (true, _) => g.hadamard(pre, inj),
                (false, ActivationPlacement::Branch) => {
                    let s = g.relu(pre);
                    g.hadamard(s, inj)
                }
                (false, ActivationPlacement::AfterProduct) => {
                    let p = g.hadamard(pre, inj);
                    g.relu(p)
                }
            };
            z = out;
            z_dim = fan_out;
            out
        } else if last {
            pre
        } else {
            let s = if relu { g.relu(pre) } else { pre };
            if spec.additive_skips && l >= 2 {
                g.add(h, s)
            } else {
                s
            }
        };
        h = next;
    }
    Ok(h)
}

impl Network {
    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn graph_mut(&mut self) -> &mut Graph {
        &mut self.graph
    }

    pub fn output_node(&self) -> NodeId {
        self.output
    }

    pub fn loss_node(&self) -> NodeId {
        self.loss
    }

    /// Whether a parameter belongs to a multiplicative branch.
    pub fn is_multiplicative_param(name: &str) -> bool {
        name.starts_with('A')
    }

    /// Outputs for a batch `x` of shape `[n, input_dim]`.
    pub fn predict(&mut self, x: &Tensor) -> Result<Tensor> {
        Ok(self.graph.forward(&[("x", x)], self.output)?.clone())
    }

    /// Prediction for a single input vector.
    pub fn predict_one(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        let t = Tensor::matrix(1, x.len(), x.to_vec())?;
        Ok(self.predict(&t)?.into_data())
    }

    /// Mean squared error on `(x, y)`.
    pub fn loss(&mut self, x: &Tensor, y: &Tensor) -> Result<f64> {
        check_batch(x, y)?;
        Ok(self.graph.forward(&[("x", x), ("y", y)], self.loss)?.item())
    }

    /// Gradient of the loss on `(x, y)` for every parameter.
    pub fn gradients(&mut self, x: &Tensor, y: &Tensor) -> Result<IndexMap<String, Tensor>> {
        self.loss(x, y)?;
        self.graph.backward(self.loss)
    }

    /// Gradient of the (scalar) output at one input with respect to every
    /// parameter, flattened in declaration order.
    pub fn output_gradient(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        if self.spec.output_dim != 1 {
            return Err(Error::Shape("output gradient needs a scalar output".into()));
        }
        let t = Tensor::matrix(1, x.len(), x.to_vec())?;
        self.graph.forward(&[("x", &t)], self.output)?;
        let grads = self.graph.backward(self.output)?;
        Ok(grads.values().flat_map(|t| t.data().to_vec()).collect())
    }
}

pub(crate) fn check_batch(x: &Tensor, y: &Tensor) -> Result<()> {
    if x.rank() != 2 || y.rank() != 2 || x.shape()[0] != y.shape()[0] {
        return Err(Error::Shape(format!(
            "inputs {:?} and targets {:?} must be matrices with equal row counts",
            x.shape(),
            y.shape()
        )));
    }
    Ok(())
}
