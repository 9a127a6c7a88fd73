use super::graph::{Graph, NodeId};
use super::tensor::Tensor;
use crate::error::Result;

/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;

/// Gradients below this magnitude, times `max(1, |loss|)`, are compared in
/// absolute rather than relative terms, since the finite-difference rounding
/// error scales with the loss and does not shrink with them. Scaling by the
/// loss makes the verdict invariant to multiplying the loss by a constant.
pub const RELATIVE_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct GradcheckReport {
    pub max_rel_error: f64,
    /// Parameter and flat index of the worst coordinate.
    pub worst: Option<(String, usize)>,
    pub checked: usize,
    /// Coordinates whose `±h` evaluations crossed a ReLU kink.
    pub skipped: usize,
    pub tolerance: f64,
    pub passed: bool,
}

/// Rescales a tensor to unit root-mean-square. All-zero tensors are returned
/// unchanged.
pub fn scale_to_unit_rms(t: &Tensor) -> Tensor {
    let rms = (t.data().iter().map(|x| x * x).sum::<f64>() / t.len().max(1) as f64).sqrt();
    let mut out = t.clone();
    if rms > 0.0 {
        out.data_mut().iter_mut().for_each(|x| *x /= rms);
    }
    out
}

/// Compares every parameter adjoint of `loss` against central differences.
///
/// Feeds are rescaled to unit RMS first. The graph's parameters are restored
/// before returning.
pub fn gradcheck(
    graph: &mut Graph,
    feeds: &[(&str, &Tensor)],
    loss: NodeId,
    tolerance: f64,
) -> Result<GradcheckReport> {
    let scaled: Vec<Tensor> = feeds.iter().map(|(_, t)| scale_to_unit_rms(t)).collect();
    let feeds: Vec<(&str, &Tensor)> = feeds.iter().zip(&scaled).map(|((n, _), t)| (*n, t)).collect();

    let floor = RELATIVE_FLOOR * graph.forward(&feeds, loss)?.item().abs().max(1.0);
    let pattern = graph.relu_pattern();
    let grads = graph.backward(loss)?;
    let names: Vec<String> = graph.param_names().map(str::to_string).collect();

    let mut report = GradcheckReport {
        max_rel_error: 0.0,
        worst: None,
        checked: 0,
        skipped: 0,
        tolerance,
        passed: true,
    };
    for name in &names {
        let analytic = grads[name.as_str()].data().to_vec();
        for (idx, &a) in analytic.iter().enumerate() {
            let orig = graph.param_value(name).expect("listed parameter").data()[idx];
            let eval = |v: f64, graph: &mut Graph| -> Result<(f64, bool)> {
                graph.param_data_mut(name).expect("listed parameter")[idx] = v;
                let l = graph.forward(&feeds, loss)?.item();
                Ok((l, graph.relu_pattern() == pattern))
            };
            let (plus, same_plus) = eval(orig + FD_STEP, graph)?;
            let (minus, same_minus) = eval(orig - FD_STEP, graph)?;
            graph.param_data_mut(name).expect("listed parameter")[idx] = orig;
            if !(same_plus && same_minus) {
                report.skipped += 1;
                continue;
            }
            let fd = (plus - minus) / (2.0 * FD_STEP);
            let err = (a - fd).abs() / a.abs().max(fd.abs()).max(floor);
            report.checked += 1;
            if err > report.max_rel_error {
                report.max_rel_error = err;
                report.worst = Some((name.clone(), idx));
            }
        }
    }
    report.passed = report.max_rel_error < tolerance;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Purpose, SeedStream};

    fn randn(s: &mut crate::rng::Stream, shape: Vec<usize>) -> Tensor {
        let n = shape.iter().product();
        Tensor::new(shape, s.normal_vec(n)).unwrap()
    }

    #[test]
    fn linear_model_is_exact() {
        let mut s = SeedStream::new(5).stream(0, Purpose::Probe);
        let mut g = Graph::new();
        let x = g.input("x", &[None, Some(4)]).unwrap();
        let t = g.input("t", &[None, Some(2)]).unwrap();
        let w = g.param("W", randn(&mut s, vec![2, 4])).unwrap();
        let b = g.param("b", randn(&mut s, vec![2])).unwrap();
        let y = g.affine(x, w, Some(b));
        let l = g.mse(y, t);
        let (xv, tv) = (randn(&mut s, vec![6, 4]), randn(&mut s, vec![6, 2]));
        let r = gradcheck(&mut g, &[("x", &xv), ("t", &tv)], l, 1e-9).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.checked, 10);
    }

    #[test]
    fn relu_times_identity() {
        // sum(relu(a) * a) has derivative 2a on the positive side.
        let mut g = Graph::new();
        let a = g.param("a", Tensor::vector(vec![0.7, 1.3])).unwrap();
        let r = g.relu(a);
        let h = g.hadamard(r, a);
        let s = g.sum(h);
        let rep = gradcheck(&mut g, &[], s, 1e-8).unwrap();
        assert!(rep.passed, "{rep:?}");
        g.forward(&[], s).unwrap();
        assert_eq!(g.backward(s).unwrap()["a"].data(), &[1.4, 2.6]);
    }

    #[test]
    fn parameters_are_restored() {
        let mut s = SeedStream::new(9).stream(0, Purpose::Probe);
        let mut g = Graph::new();
        let x = g.input("x", &[Some(3)]).unwrap();
        let w = g.param("W", randn(&mut s, vec![3, 3])).unwrap();
        let y = g.affine(x, w, None);
        let r = g.relu(y);
        let l = g.sum(r);
        let before = g.flat_params();
        let xv = randn(&mut s, vec![3]);
        gradcheck(&mut g, &[("x", &xv)], l, 1e-6).unwrap();
        assert_eq!(before, g.flat_params());
    }
}
