//! Building networks, the polynomial degree of activation-free product
//! blocks, perturbation and checkpoints.

use polyspec::networks::{
    build, decode_checkpoint, encode_checkpoint, perturb_parameters, restore_checkpoint, Activation, NetworkSpec,
};

fn main() -> polyspec::Result<()> {
    for spec in [
        NetworkSpec::two_layer_relu(3, 16),
        NetworkSpec::two_layer_pi(3, 16),
        NetworkSpec::mlp(1, 32, 6, 1).with_skips(),
        NetworkSpec::pi_ncp(1, 32, 6, 1, vec![1, 2, 3, 4, 5]),
    ] {
        let net = build(&spec, 0)?;
        let names: Vec<&str> = net.graph().param_names().collect();
        println!("{:<14} {:>6} parameters  {names:?}", spec.kind.name(), net.graph().param_count());
    }

    // Two linear blocks, each with one Hadamard product: degree 2 · 2 = 4
    // along any line. Fourth differences are constant, fifth vanish.
    let spec = NetworkSpec::pi_ncp(2, 6, 4, 1, vec![1, 3]).with_activation(Activation::None);
    let mut net = build(&spec, 5)?;
    let f: Vec<f64> = (0..7)
        .map(|i| {
            let s = i as f64 * 0.5;
            net.predict_one(&[0.2 + s, -0.1 + 0.3 * s]).map(|v| v[0])
        })
        .collect::<polyspec::Result<_>>()?;
    let mut diffs = f.clone();
    for order in 1..=5 {
        diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
        println!("order-{order} differences along a line: {:?}", diffs.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>());
    }

    let moved = perturb_parameters(&net, 0.5, 9)?;
    let shift: f64 = moved
        .graph()
        .flat_params()
        .iter()
        .zip(net.graph().flat_params())
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    println!("perturbation radius {shift:.12}");

    let bytes = encode_checkpoint(&moved);
    let mut copy = build(&spec, 0)?;
    restore_checkpoint(&mut copy, &decode_checkpoint(&bytes)?)?;
    println!("checkpoint of {} bytes restores exactly: {}", bytes.len(), copy.graph().flat_params() == moved.graph().flat_params());
    Ok(())
}
