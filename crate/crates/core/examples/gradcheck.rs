//! Reverse-mode gradients of a small graph and of a six-layer polynomial
//! network, checked against central differences.

use polyspec::autodiff::{gradcheck, Graph, Tensor};
use polyspec::networks::{build, NetworkSpec};

fn main() -> polyspec::Result<()> {
    // loss = sum((x W) * relu(x Vᵀ))
    let mut g = Graph::new();
    let x = g.input("x", &[None, Some(3)])?;
    let w = g.param("W", Tensor::matrix(3, 2, vec![0.5, -1.0, 0.2, 0.3, 0.8, -0.4])?)?;
    let v = g.param("V", Tensor::matrix(2, 3, vec![1.0, 0.1, -0.3, -0.2, 0.6, 0.9])?)?;
    let a = g.matmul(x, w);
    let b = g.affine(x, v, None);
    let b = g.relu(b);
    let h = g.hadamard(a, b);
    let loss = g.sum(h);
    let xs = Tensor::matrix(2, 3, vec![0.3, -0.7, 1.1, 0.9, 0.2, -0.5])?;
    g.forward(&[("x", &xs)], loss)?;
    for (name, grad) in g.backward(loss)? {
        println!("d loss / d {name} = {:?}", grad.data());
    }
    let r = gradcheck(&mut g, &[("x", &xs)], loss, 1e-5)?;
    println!("small graph: max relative error {:.2e}, passed {}", r.max_rel_error, r.passed);

    let mut net = build(&NetworkSpec::pi_ncp(4, 8, 6, 1, vec![1, 2, 3, 4, 5]), 11)?;
    let xs = Tensor::matrix(5, 4, (0..20).map(|i| ((i * 7 % 11) as f64 - 5.0) / 6.0).collect())?;
    let ys = Tensor::matrix(5, 1, vec![0.1, -0.4, 0.3, 0.8, -0.2])?;
    let loss = net.loss_node();
    let r = gradcheck(net.graph_mut(), &[("x", &xs), ("y", &ys)], loss, 1e-4)?;
    println!(
        "six-layer NCP: {} coordinates checked, {} skipped at ReLU kinks, max relative error {:.2e}",
        r.checked, r.skipped, r.max_rel_error
    );
    Ok(())
}
