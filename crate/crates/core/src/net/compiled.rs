//! Integer-scaled exact evaluation.
//!
//! With a common denominator `D_l` per layer, every activation is an integer
//! numerator over a fixed positive scale `S_l = D_l S_{l-1}`. ReLU commutes
//! with positive scaling, so the whole forward pass runs on integers. A static
//! magnitude bound decides at compile time whether `i128` is wide enough.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ReluNetwork;
use crate::scalar::lcm_of_denominators;

/// Largest magnitude allowed anywhere in the integer pipeline.
pub(crate) fn i128_budget() -> BigInt {
    BigInt::one() << 124
}

#[derive(Clone, Debug)]
struct IntLayer {
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<i128>,
    bias: Vec<i128>,
}

#[derive(Clone, Debug)]
pub struct IntegerNetwork {
    input_dim: usize,
    layers: Vec<IntLayer>,
    out_scale: BigInt,
    out_bound: BigInt,
    max_width: usize,
}

impl IntegerNetwork {
    /// Compiles `net` for integer inputs `z_int` meaning `z = z_int / input_scale`
    /// with `|z_int| <= input_bound`. Returns `None` when some intermediate
    /// value could leave the `i128` budget.
    pub fn compile(net: &ReluNetwork, input_scale: &BigInt, input_bound: &BigInt) -> Option<Self> {
        let budget = i128_budget();
        let mut scale = input_scale.clone();
        let mut bound = input_bound.clone();
        let mut layers = Vec::with_capacity(net.depth());
        for layer in net.layers() {
            let d = lcm_of_denominators(layer.weights().iter().flatten().chain(layer.bias()));
            let mut il = IntLayer {
                row_start: vec![0],
                cols: Vec::new(),
                vals: Vec::new(),
                bias: Vec::with_capacity(layer.rows()),
            };
            let mut next_bound = BigInt::zero();
            for (row, b) in layer.weights().iter().zip(layer.bias()) {
                let mut row_bound = BigInt::zero();
                for (c, w) in row.iter().enumerate() {
                    if w.is_zero() {
                        continue;
                    }
                    let a = (w * &d).to_integer();
                    row_bound += a.abs() * &bound;
                    il.cols.push(c);
                    il.vals.push(a.to_i128()?);
                }
                let bs = (b * &d).to_integer() * &scale;
                row_bound += bs.abs();
                if row_bound > budget {
                    return None;
                }
                il.bias.push(bs.to_i128()?);
                il.row_start.push(il.cols.len());
                next_bound = next_bound.max(row_bound);
            }
            layers.push(il);
            scale *= d;
            bound = next_bound;
        }
        Some(IntegerNetwork {
            input_dim: net.input_dim(),
            layers,
            out_scale: scale,
            out_bound: bound,
            max_width: net.width().max(net.input_dim()),
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    /// Scale of the output numerators: `G(z) = eval(z_int) / out_scale`.
    pub fn out_scale(&self) -> &BigInt {
        &self.out_scale
    }

    /// Upper bound on any output numerator.
    pub fn out_bound(&self) -> &BigInt {
        &self.out_bound
    }

    pub fn buffers(&self) -> EvalBuffers {
        EvalBuffers {
            a: vec![0; self.max_width],
            b: vec![0; self.max_width],
        }
    }

    /// Output numerators for integer input `z_int`.
    pub fn eval<'a>(&self, z_int: &[i128], buf: &'a mut EvalBuffers) -> &'a [i128] {
        debug_assert_eq!(z_int.len(), self.input_dim);
        let EvalBuffers { a, b } = buf;
        a[..z_int.len()].copy_from_slice(z_int);
        let (mut cur, mut next) = (a, b);
        let mut len = z_int.len();
        for layer in &self.layers {
            let rows = layer.bias.len();
            for (r, out) in next[..rows].iter_mut().enumerate() {
                let span = layer.row_start[r]..layer.row_start[r + 1];
                let mut acc = layer.bias[r];
                for (c, v) in layer.cols[span.clone()].iter().zip(&layer.vals[span]) {
                    acc += v * cur[*c];
                }
                *out = acc.max(0);
            }
            std::mem::swap(&mut cur, &mut next);
            len = rows;
        }
        &cur[..len]
    }
}

pub struct EvalBuffers {
    a: Vec<i128>,
    b: Vec<i128>,
}
