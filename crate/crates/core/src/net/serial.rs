//! `relunet-1` JSON network documents.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Layer, ReluNetwork};
use crate::scalar::{format_scalar, parse_scalar, Scalar};
use crate::{Error, Result};

pub const NETWORK_VERSION: &str = "relunet-1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerDoc {
    pub rows: usize,
    pub cols: usize,
    /// Row-major `num/den` strings.
    pub weights: Vec<String>,
    pub bias: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDoc {
    pub version: String,
    pub input_dim: usize,
    pub layers: Vec<LayerDoc>,
    #[serde(default = "empty_object")]
    pub metadata: Value,
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

fn parse_all(items: &[String], what: &str) -> Result<Vec<Scalar>> {
    items
        .iter()
        .map(|s| parse_scalar(s).map_err(|e| Error::Document(format!("{what}: {e}"))))
        .collect()
}

impl From<&ReluNetwork> for NetworkDoc {
    fn from(net: &ReluNetwork) -> Self {
        NetworkDoc {
            version: NETWORK_VERSION.to_string(),
            input_dim: net.input_dim(),
            layers: net
                .layers()
                .iter()
                .map(|l| LayerDoc {
                    rows: l.rows(),
                    cols: l.cols(),
                    weights: l.weights().iter().flatten().map(format_scalar).collect(),
                    bias: l.bias().iter().map(format_scalar).collect(),
                })
                .collect(),
            metadata: net.metadata().clone(),
        }
    }
}

impl TryFrom<NetworkDoc> for ReluNetwork {
    type Error = Error;

    fn try_from(doc: NetworkDoc) -> Result<Self> {
        if doc.version != NETWORK_VERSION {
            return Err(Error::Document(format!(
                "unsupported network version {:?}",
                doc.version
            )));
        }
        let mut layers = Vec::with_capacity(doc.layers.len());
        for (l, ld) in doc.layers.iter().enumerate() {
            if ld.weights.len() != ld.rows * ld.cols {
                return Err(Error::Dimension(format!(
                    "layer {}: {} weights for a {}x{} matrix",
                    l + 1,
                    ld.weights.len(),
                    ld.rows,
                    ld.cols
                )));
            }
            let flat = parse_all(&ld.weights, "weights")?;
            let weights = if ld.cols == 0 {
                vec![Vec::new(); ld.rows]
            } else {
                flat.chunks(ld.cols).map(<[Scalar]>::to_vec).collect()
            };
            let bias = parse_all(&ld.bias, "bias")?;
            layers.push(Layer::new(ld.cols, weights, bias)?);
        }
        ReluNetwork::with_metadata(doc.input_dim, layers, doc.metadata)
    }
}

pub fn serialize(net: &ReluNetwork) -> Vec<u8> {
    serde_json::to_vec(&NetworkDoc::from(net)).expect("network documents always serialize")
}

pub fn deserialize(bytes: &[u8]) -> Result<ReluNetwork> {
    let doc: NetworkDoc = serde_json::from_slice(bytes)?;
    ReluNetwork::try_from(doc)
}
