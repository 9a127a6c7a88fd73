use super::build::Network;
use crate::error::{Error, Result};
use crate::rng::{Purpose, SeedStream, Stream};

/// `θ ← θ* + δ θ̂` with `θ̂` uniform on the unit sphere of the flattened
/// parameter space, drawn from `SeedStream::new(seed)`, run 0, purpose
/// [`Purpose::Perturbation`].
pub fn perturb_parameters(net: &Network, delta: f64, seed: u64) -> Result<Network> {
    let mut stream = SeedStream::new(seed).stream(0, Purpose::Perturbation);
    perturb_with_stream(net, delta, &mut stream)
}

pub fn perturb_with_stream(net: &Network, delta: f64, stream: &mut Stream) -> Result<Network> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::Domain(format!("perturbation size must be non-negative, got {delta}")));
    }
    let mut out = net.clone();
    let mut theta = net.graph().flat_params();
    let dir = stream.unit_vector(theta.len());
    for (t, u) in theta.iter_mut().zip(&dir) {
        *t += delta * u;
    }
    out.graph_mut().set_flat_params(&theta)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::networks::{build, NetworkSpec};

    #[test]
    fn displacement_has_requested_norm() {
        let net = build(&NetworkSpec::pi_ncp(1, 16, 4, 1, vec![1, 3]), 2).unwrap();
        for delta in [0.0, 0.1, 3.0] {
            let p = perturb_parameters(&net, delta, 9).unwrap();
            let d: f64 = net
                .graph()
                .flat_params()
                .iter()
                .zip(p.graph().flat_params())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!((d - delta).abs() < 1e-10, "{d} vs {delta}");
        }
    }

    #[test]
    fn zero_delta_keeps_outputs() {
        let mut net = build(&NetworkSpec::mlp(2, 8, 3, 1), 5).unwrap();
        let mut p = perturb_parameters(&net, 0.0, 1).unwrap();
        for i in 0..100 {
            let x = [(i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()];
            assert_eq!(net.predict_one(&x).unwrap(), p.predict_one(&x).unwrap());
        }
    }

    #[test]
    fn seeds_give_different_directions() {
        let net = build(&NetworkSpec::mlp(2, 8, 3, 1), 5).unwrap();
        let a = perturb_parameters(&net, 0.5, 1).unwrap();
        let b = perturb_parameters(&net, 0.5, 2).unwrap();
        assert_ne!(a.graph().flat_params(), b.graph().flat_params());
        assert!(perturb_parameters(&net, -1.0, 1).is_err());
    }
}
