use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Architecture {
    /// `√(2/m) W₂ σ(W₁ x)`
    TwoLayerReLU,
    /// `√(2/m) W₃ [σ(W₂ x) ∗ σ(W₁ x)]`
    TwoLayerPi,
    /// Feed-forward ReLU network with biases, optionally with identity skips.
    Mlp,
    /// Stack of degree-two polynomial blocks joined by Hadamard products.
    PiNcp,
}

impl Architecture {
    pub fn name(self) -> &'static str {
        match self {
            Architecture::TwoLayerReLU => "two-layer-relu",
            Architecture::TwoLayerPi => "two-layer-pi",
            Architecture::Mlp => "mlp",
            Architecture::PiNcp => "pi-ncp",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "two-layer-relu" | "relu" => Ok(Architecture::TwoLayerReLU),
            "two-layer-pi" | "pi" => Ok(Architecture::TwoLayerPi),
            "mlp" => Ok(Architecture::Mlp),
            "pi-ncp" | "ncp" => Ok(Architecture::PiNcp),
            _ => Err(Error::Config(format!("unknown architecture `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Activation {
    Relu,
    None,
}

/// Where the nonlinearity sits in a multiplicative layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ActivationPlacement {
    /// `σ(S h + b) ∗ (A z)`: only the recurrent affine branch is activated.
    #[default]
    Branch,
    /// `σ((S h + b) ∗ (A z))`
    AfterProduct,
}

/// Architecture description.
///
/// `depth` counts affine layers, so a depth-`L` network has `L − 1` hidden
/// layers of width `width`. Layer indices run from 1 to `L`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NetworkSpec {
    pub kind: Architecture,
    pub input_dim: usize,
    pub width: usize,
    pub depth: usize,
    pub output_dim: usize,
    pub additive_skips: bool,
    pub multiplicative_layers: Vec<usize>,
    pub activation: Activation,
    pub placement: ActivationPlacement,
}

impl NetworkSpec {
    pub fn two_layer_relu(input_dim: usize, width: usize) -> Self {
        Self {
            kind: Architecture::TwoLayerReLU,
            input_dim,
            width,
            depth: 2,
            output_dim: 1,
            additive_skips: false,
            multiplicative_layers: vec![],
            activation: Activation::Relu,
            placement: ActivationPlacement::Branch,
        }
    }

    pub fn two_layer_pi(input_dim: usize, width: usize) -> Self {
        Self {
            kind: Architecture::TwoLayerPi,
            multiplicative_layers: vec![1],
            ..Self::two_layer_relu(input_dim, width)
        }
    }

    pub fn mlp(input_dim: usize, width: usize, depth: usize, output_dim: usize) -> Self {
        Self {
            kind: Architecture::Mlp,
            depth,
            output_dim,
            ..Self::two_layer_relu(input_dim, width)
        }
    }

    pub fn pi_ncp(
        input_dim: usize,
        width: usize,
        depth: usize,
        output_dim: usize,
        multiplicative_layers: Vec<usize>,
    ) -> Self {
        Self {
            kind: Architecture::PiNcp,
            multiplicative_layers,
            ..Self::mlp(input_dim, width, depth, output_dim)
        }
    }

    pub fn with_skips(mut self) -> Self {
        self.additive_skips = true;
        self
    }

    pub fn with_activation(mut self, activation: Activation) -> Self {
        self.activation = activation;
        self
    }

    pub fn with_placement(mut self, placement: ActivationPlacement) -> Self {
        self.placement = placement;
        self
    }

    pub fn is_multiplicative(&self, layer: usize) -> bool {
        self.multiplicative_layers.contains(&layer)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.depth < 1 {
            return bad("depth must be at least 1".into());
        }
        if self.input_dim == 0 || self.width == 0 || self.output_dim == 0 {
            return bad("dimensions must be positive".into());
        }
        let mut sorted = self.multiplicative_layers.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.multiplicative_layers.len() {
            return bad("multiplicative layers must be distinct".into());
        }
        if let Some(l) = sorted.iter().find(|&&l| l < 1 || l > self.depth) {
            return bad(format!("multiplicative layer {l} outside 1..={}", self.depth));
        }
        match self.kind {
            Architecture::TwoLayerReLU | Architecture::TwoLayerPi => {
                if self.depth != 2 || self.additive_skips {
                    return bad(format!("{} has depth 2 and no skips", self.kind.name()));
                }
                let want: &[usize] = if self.kind == Architecture::TwoLayerPi { &[1] } else { &[] };
                if self.multiplicative_layers != want {
                    return bad(format!(
                        "{} needs multiplicative layers {want:?}",
                        self.kind.name()
                    ));
                }
            }
            Architecture::Mlp => {
                if !sorted.is_empty() {
                    return bad("an MLP has no multiplicative layers".into());
                }
            }
            Architecture::PiNcp => {
                if self.additive_skips {
                    return bad("additive skips apply to MLPs only".into());
                }
            }
        }
        Ok(())
    }

    /// Stable text form, used for checkpoint hashing.
    pub fn canonical(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for NetworkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mult: Vec<String> = self.multiplicative_layers.iter().map(|l| l.to_string()).collect();
        write!(
            f,
            "kind={};input_dim={};width={};depth={};output_dim={};skips={};mult=[{}];activation={};placement={}",
            self.kind.name(),
            self.input_dim,
            self.width,
            self.depth,
            self.output_dim,
            self.additive_skips,
            mult.join(","),
            match self.activation {
                Activation::Relu => "relu",
                Activation::None => "none",
            },
            match self.placement {
                ActivationPlacement::Branch => "branch",
                ActivationPlacement::AfterProduct => "after-product",
            }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_validate() {
        assert!(NetworkSpec::two_layer_relu(3, 8).validate().is_ok());
        assert!(NetworkSpec::two_layer_pi(3, 8).validate().is_ok());
        assert!(NetworkSpec::mlp(1, 16, 1, 1).validate().is_ok());
        assert!(NetworkSpec::pi_ncp(1, 16, 6, 1, vec![1, 2, 3, 4, 5]).validate().is_ok());
        assert!(NetworkSpec::mlp(1, 16, 6, 1).with_skips().validate().is_ok());
    }

    #[test]
    fn invalid_specs_are_configuration_errors() {
        let cases = [
            NetworkSpec::mlp(1, 16, 0, 1),
            NetworkSpec::pi_ncp(1, 16, 3, 1, vec![4]),
            NetworkSpec::pi_ncp(1, 16, 3, 1, vec![1, 1]),
            NetworkSpec::pi_ncp(1, 16, 3, 1, vec![1]).with_skips(),
            NetworkSpec { depth: 3, ..NetworkSpec::two_layer_pi(3, 4) },
            NetworkSpec { multiplicative_layers: vec![], ..NetworkSpec::two_layer_pi(3, 4) },
            NetworkSpec { multiplicative_layers: vec![1], ..NetworkSpec::mlp(1, 4, 3, 1) },
        ];
        for spec in cases {
            assert!(matches!(spec.validate(), Err(Error::Config(_))), "{spec}");
        }
    }

    #[test]
    fn canonical_form_distinguishes_specs() {
        let a = NetworkSpec::pi_ncp(1, 16, 6, 1, vec![1, 3, 5]);
        let b = NetworkSpec::pi_ncp(1, 16, 6, 1, vec![1, 2, 3, 4, 5]);
        assert_ne!(a.canonical(), b.canonical());
        assert_eq!(Architecture::parse(a.kind.name()).unwrap(), a.kind);
    }
}
