//! ReLU networks over the rationals.
//!
//! A network is a stack of layers `h_l = ReLU(W_l h_{l-1} + b_l)`, with the
//! ReLU applied after every layer including the last.

mod compiled;
mod float;
mod serial;

pub(crate) use compiled::i128_budget;
pub use compiled::{EvalBuffers, IntegerNetwork};
pub use float::{forward_float, FloatNetwork};
pub use serial::{deserialize, serialize, LayerDoc, NetworkDoc, NETWORK_VERSION};

use num_traits::{Signed, Zero};
use serde_json::Value;

use crate::scalar::{abs_pow, Scalar};
use crate::{Error, Result};

/// One affine map followed by ReLU. `weights` is `rows x cols`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    cols: usize,
    weights: Vec<Vec<Scalar>>,
    bias: Vec<Scalar>,
}

impl Layer {
    pub fn new(cols: usize, weights: Vec<Vec<Scalar>>, bias: Vec<Scalar>) -> Result<Self> {
        if weights.len() != bias.len() {
            return Err(Error::Dimension(format!(
                "bias length {} does not match {} weight rows",
                bias.len(),
                weights.len()
            )));
        }
        if let Some((i, row)) = weights.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "weight row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        Ok(Layer {
            cols,
            weights,
            bias,
        })
    }

    /// Builds a layer from sparse rows `(entries, bias)` where every entry is
    /// `(column, value)`; repeated columns accumulate.
    pub fn from_sparse(cols: usize, rows: Vec<(Vec<(usize, Scalar)>, Scalar)>) -> Result<Self> {
        let mut weights = Vec::with_capacity(rows.len());
        let mut bias = Vec::with_capacity(rows.len());
        for (entries, b) in rows {
            let mut row = vec![Scalar::zero(); cols];
            for (c, v) in entries {
                if c >= cols {
                    return Err(Error::Dimension(format!(
                        "column {c} out of range for fan-in {cols}"
                    )));
                }
                row[c] += v;
            }
            weights.push(row);
            bias.push(b);
        }
        Layer::new(cols, weights, bias)
    }

    pub fn rows(&self) -> usize {
        self.weights.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn weights(&self) -> &[Vec<Scalar>] {
        &self.weights
    }

    pub fn bias(&self) -> &[Scalar] {
        &self.bias
    }

    /// Pre-activation `W h + b`.
    pub fn affine(&self, input: &[Scalar]) -> Vec<Scalar> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(row, b)| {
                row.iter()
                    .zip(input)
                    .filter(|(w, _)| !w.is_zero())
                    .fold(b.clone(), |acc, (w, x)| acc + w * x)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReluNetwork {
    input_dim: usize,
    layers: Vec<Layer>,
    metadata: Value,
}

impl ReluNetwork {
    pub fn new(input_dim: usize, layers: Vec<Layer>) -> Result<Self> {
        Self::with_metadata(input_dim, layers, Value::Object(Default::default()))
    }

    pub fn with_metadata(input_dim: usize, layers: Vec<Layer>, metadata: Value) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::Dimension("input dimension must be positive".into()));
        }
        if layers.is_empty() {
            return Err(Error::Dimension("network needs at least one layer".into()));
        }
        let mut fan_in = input_dim;
        for (l, layer) in layers.iter().enumerate() {
            if layer.cols() != fan_in {
                return Err(Error::Dimension(format!(
                    "layer {} has fan-in {}, previous fan-out is {fan_in}",
                    l + 1,
                    layer.cols()
                )));
            }
            fan_in = layer.rows();
        }
        if !metadata.is_object() {
            return Err(Error::Document("metadata must be an object".into()));
        }
        Ok(ReluNetwork {
            input_dim,
            layers,
            metadata,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(self.input_dim, Layer::rows)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// `max_l m_l`.
    pub fn width(&self) -> usize {
        self.layers.iter().map(Layer::rows).max().unwrap_or(0)
    }

    /// Total number of ReLU units across all layers.
    pub fn hidden_units(&self) -> usize {
        self.layers.iter().map(Layer::rows).sum()
    }

    pub fn metadata(&self) -> &Value {
        &self.metadata
    }

    pub fn set_metadata(&mut self, metadata: Value) -> Result<()> {
        if !metadata.is_object() {
            return Err(Error::Document("metadata must be an object".into()));
        }
        self.metadata = metadata;
        Ok(())
    }

    pub fn into_layers(self) -> Vec<Layer> {
        self.layers
    }
}

fn relu(v: Scalar) -> Scalar {
    if v.is_negative() {
        Scalar::zero()
    } else {
        v
    }
}

/// Exact `G_L(z)`.
pub fn forward(net: &ReluNetwork, z: &[Scalar]) -> Result<Vec<Scalar>> {
    Ok(forward_trace(net, z)?.pop().unwrap_or_default())
}

/// Post-activation outputs of every layer, in order.
pub fn forward_trace(net: &ReluNetwork, z: &[Scalar]) -> Result<Vec<Vec<Scalar>>> {
    if z.len() != net.input_dim {
        return Err(Error::Dimension(format!(
            "latent has length {}, network expects {}",
            z.len(),
            net.input_dim
        )));
    }
    let mut trace: Vec<Vec<Scalar>> = Vec::with_capacity(net.layers.len());
    for layer in &net.layers {
        let input = trace.last().map_or(z, Vec::as_slice);
        let out = layer.affine(input).into_iter().map(relu).collect();
        trace.push(out);
    }
    Ok(trace)
}

/// `‖y − x‖_p^p` kept as an exact rational together with its exponent.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DistancePow {
    value: Scalar,
    p: u32,
}

impl DistancePow {
    pub fn value(&self) -> &Scalar {
        &self.value
    }

    pub fn exponent(&self) -> u32 {
        self.p
    }

    pub fn into_value(self) -> Scalar {
        self.value
    }
}

pub fn distance_pow(y: &[Scalar], x: &[Scalar], p: u32) -> Result<DistancePow> {
    if p == 0 {
        return Err(Error::Invalid("norm exponent p must be positive".into()));
    }
    if y.len() != x.len() {
        return Err(Error::Dimension(format!(
            "cannot compare vectors of length {} and {}",
            y.len(),
            x.len()
        )));
    }
    let value = y
        .iter()
        .zip(x)
        .fold(Scalar::zero(), |acc, (a, b)| acc + abs_pow(&(a - b), p));
    Ok(DistancePow { value, p })
}
