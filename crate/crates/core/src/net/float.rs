//! Hardware floating-point evaluation for benchmarks and the falsifier.

use super::ReluNetwork;
use crate::scalar::to_f64;
use crate::{Error, Result};

#[derive(Clone, Debug)]
struct FloatLayer {
    cols: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

/// A network converted once to `f64` so repeated evaluation is cheap.
#[derive(Clone, Debug)]
pub struct FloatNetwork {
    input_dim: usize,
    layers: Vec<FloatLayer>,
}

impl FloatNetwork {
    pub fn new(net: &ReluNetwork) -> Self {
        let layers = net
            .layers()
            .iter()
            .map(|l| FloatLayer {
                cols: l.cols(),
                weights: l.weights().iter().flatten().map(to_f64).collect(),
                bias: l.bias().iter().map(to_f64).collect(),
            })
            .collect();
        FloatNetwork {
            input_dim: net.input_dim(),
            layers,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn forward(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.input_dim {
            return Err(Error::Dimension(format!(
                "latent has length {}, network expects {}",
                z.len(),
                self.input_dim
            )));
        }
        let mut cur = z.to_vec();
        for layer in &self.layers {
            cur = layer
                .bias
                .iter()
                .enumerate()
                .map(|(r, b)| {
                    let row = &layer.weights[r * layer.cols..(r + 1) * layer.cols];
                    let pre = row.iter().zip(&cur).fold(*b, |acc, (w, x)| acc + w * x);
                    pre.max(0.0)
                })
                .collect();
        }
        Ok(cur)
    }

    /// `Σ |G(z)_i − x_i|^p` in floating point.
    pub fn distance_pow(&self, z: &[f64], x: &[f64], p: u32) -> Result<f64> {
        let y = self.forward(z)?;
        if y.len() != x.len() {
            return Err(Error::Dimension("target length differs from output".into()));
        }
        Ok(y.iter()
            .zip(x)
            .map(|(a, b)| (a - b).abs().powi(p as i32))
            .sum())
    }
}

pub fn forward_float(net: &ReluNetwork, z: &[f64]) -> Result<Vec<f64>> {
    FloatNetwork::new(net).forward(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::Layer;
    use crate::scalar::int;

    #[test]
    fn identity_and_relu() {
        let id = ReluNetwork::new(
            1,
            vec![Layer::new(1, vec![vec![int(1)]], vec![int(0)]).unwrap()],
        )
        .unwrap();
        assert_eq!(forward_float(&id, &[1.5]).unwrap(), vec![1.5]);
        let neg = ReluNetwork::new(
            1,
            vec![Layer::new(1, vec![vec![int(-1)]], vec![int(0)]).unwrap()],
        )
        .unwrap();
        assert_eq!(forward_float(&neg, &[3.0]).unwrap(), vec![0.0]);
        assert!(forward_float(&neg, &[1.0, 2.0]).is_err());
    }
}
