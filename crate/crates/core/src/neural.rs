//! Small dense multilayer perceptrons on flat parameter vectors.
//!
//! Parameters live in one `Vec<f64>` in canonical order: layer by layer, each
//! layer's weight matrix row-major (one row per output unit) followed by its
//! biases. The flat layout makes nets trivially serializable, hashable for
//! seeds, and cheap to treat as optimization variables.

use crate::error::{Error, Result};
use crate::seed;
use rand::Rng;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Tanh,
    Sigmoid,
    Linear,
}

impl Activation {
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            Activation::Linear => z,
        }
    }

    /// Derivative expressed in terms of the activation output. The rectifier
    /// uses derivative 0 at exactly 0.
    fn derive_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if a > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - a * a,
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Linear => 1.0,
        }
    }

    fn tag(self) -> u8 {
        match self {
            Activation::Relu => 0,
            Activation::Tanh => 1,
            Activation::Sigmoid => 2,
            Activation::Linear => 3,
        }
    }

    fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(Activation::Relu),
            1 => Ok(Activation::Tanh),
            2 => Ok(Activation::Sigmoid),
            3 => Ok(Activation::Linear),
            other => Err(Error::Parse(format!("unknown activation tag {other}"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
            Activation::Sigmoid => "sigmoid",
            Activation::Linear => "linear",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relu" => Ok(Activation::Relu),
            "tanh" => Ok(Activation::Tanh),
            "sigmoid" => Ok(Activation::Sigmoid),
            "linear" => Ok(Activation::Linear),
            other => Err(Error::Parse(format!("unknown activation {other:?}"))),
        }
    }
}

/// Layer sizes plus one activation per weight layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Architecture {
    sizes: Vec<usize>,
    activations: Vec<Activation>,
}

impl Architecture {
    pub fn new(sizes: Vec<usize>, activations: Vec<Activation>) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::InvalidArgument(
                "architecture needs at least input and output sizes".to_string(),
            ));
        }
        if sizes.iter().any(|&s| s == 0) {
            return Err(Error::InvalidArgument(
                "layer sizes must be positive".to_string(),
            ));
        }
        if activations.len() != sizes.len() - 1 {
            return Err(Error::DimensionMismatch(format!(
                "{} sizes require {} activations, got {}",
                sizes.len(),
                sizes.len() - 1,
                activations.len()
            )));
        }
        Ok(Self { sizes, activations })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn activations(&self) -> &[Activation] {
        &self.activations
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().expect("validated non-empty")
    }

    /// Number of weight layers.
    pub fn layer_count(&self) -> usize {
        self.sizes.len() - 1
    }

    /// Total number of weights and biases.
    pub fn param_count(&self) -> usize {
        self.sizes
            .windows(2)
            .map(|w| w[0] * w[1] + w[1])
            .sum()
    }
}

/// Activations of every layer from one forward pass; `acts[0]` is the input.
pub(crate) struct Trace {
    acts: Vec<Vec<f64>>,
}

impl Trace {
    pub(crate) fn output(&self) -> &[f64] {
        self.acts.last().expect("trace has at least the input")
    }
}

/// A multilayer perceptron: an architecture plus a flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpNet {
    arch: Architecture,
    params: Vec<f64>,
}

impl MlpNet {
    pub fn new(arch: Architecture, params: Vec<f64>) -> Result<Self> {
        if params.len() != arch.param_count() {
            return Err(Error::DimensionMismatch(format!(
                "architecture has {} parameters, got {}",
                arch.param_count(),
                params.len()
            )));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Numerical(
                "network parameters must be finite".to_string(),
            ));
        }
        Ok(Self { arch, params })
    }

    /// Xavier-uniform initialization: each layer's weights are drawn from
    /// `U(-b, b)` with `b = sqrt(6 / (fan_in + fan_out))`, biases start at
    /// zero. Fully determined by `seed`.
    pub fn init_random(arch: &Architecture, seed: u64) -> Self {
        let mut rng = seed::rng(seed);
        let mut params = Vec::with_capacity(arch.param_count());
        for w in arch.sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for _ in 0..fan_in * fan_out {
                params.push(rng.gen_range(-bound..bound));
            }
            params.extend(std::iter::repeat(0.0).take(fan_out));
        }
        Self {
            arch: arch.clone(),
            params,
        }
    }

    pub fn arch(&self) -> &Architecture {
        &self.arch
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub(crate) fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    /// Forward pass.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        Ok(self.trace(input)?.acts.pop().expect("non-empty trace"))
    }

    /// Forward pass keeping every layer's activations for backpropagation.
    pub(crate) fn trace(&self, input: &[f64]) -> Result<Trace> {
        if input.len() != self.arch.input_dim() {
            return Err(Error::DimensionMismatch(format!(
                "input has {} entries but the network takes {}",
                input.len(),
                self.arch.input_dim()
            )));
        }
        let mut acts = Vec::with_capacity(self.arch.sizes.len());
        acts.push(input.to_vec());
        let mut offset = 0;
        for (l, w) in self.arch.sizes.windows(2).enumerate() {
            let (n_in, n_out) = (w[0], w[1]);
            let weights = &self.params[offset..offset + n_in * n_out];
            let biases = &self.params[offset + n_in * n_out..offset + n_in * n_out + n_out];
            offset += n_in * n_out + n_out;
            let act = self.arch.activations[l];
            let prev = acts.last().expect("pushed input");
            let mut next = Vec::with_capacity(n_out);
            for o in 0..n_out {
                let row = &weights[o * n_in..(o + 1) * n_in];
                let z: f64 = row.iter().zip(prev).map(|(&wi, &xi)| wi * xi).sum::<f64>()
                    + biases[o];
                next.push(act.apply(z));
            }
            acts.push(next);
        }
        Ok(Trace { acts })
    }

    /// Gradient of `dot(upstream, forward(input))` with respect to the
    /// parameters (canonical order) and to the input.
    pub fn backward(&self, input: &[f64], upstream: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let trace = self.trace(input)?;
        let (param_grad, input_grad) = self.backward_from_trace(&trace, upstream, true)?;
        Ok((param_grad.expect("param gradient requested"), input_grad))
    }

    /// Backpropagation over a stored trace. With `want_params` false only the
    /// input gradient is computed, which the generator training loop uses to
    /// chain through classifier networks cheaply.
    pub(crate) fn backward_from_trace(
        &self,
        trace: &Trace,
        upstream: &[f64],
        want_params: bool,
    ) -> Result<(Option<Vec<f64>>, Vec<f64>)> {
        if upstream.len() != self.arch.output_dim() {
            return Err(Error::DimensionMismatch(format!(
                "upstream has {} entries but the network outputs {}",
                upstream.len(),
                self.arch.output_dim()
            )));
        }
        let layers = self.arch.layer_count();
        let mut param_grad = if want_params {
            Some(vec![0.0; self.params.len()])
        } else {
            None
        };

        // Delta at the output of layer `layers`.
        let out_act = self.arch.activations[layers - 1];
        let mut delta: Vec<f64> = trace.acts[layers]
            .iter()
            .zip(upstream)
            .map(|(&a, &u)| u * out_act.derive_from_output(a))
            .collect();

        // Walk layers from last to first, maintaining parameter offsets.
        let mut offsets = Vec::with_capacity(layers);
        let mut offset = 0;
        for w in self.arch.sizes.windows(2) {
            offsets.push(offset);
            offset += w[0] * w[1] + w[1];
        }

        for l in (0..layers).rev() {
            let (n_in, n_out) = (self.arch.sizes[l], self.arch.sizes[l + 1]);
            let w_off = offsets[l];
            let weights = &self.params[w_off..w_off + n_in * n_out];
            let inputs = &trace.acts[l];

            if let Some(grad) = param_grad.as_mut() {
                for (o, &d) in delta.iter().enumerate() {
                    if d == 0.0 {
                        continue;
                    }
                    let row = &mut grad[w_off + o * n_in..w_off + (o + 1) * n_in];
                    for (g, &x) in row.iter_mut().zip(inputs) {
                        *g = d * x;
                    }
                }
                let b_off = w_off + n_in * n_out;
                grad[b_off..b_off + n_out].copy_from_slice(&delta);
            }

            let mut prev = vec![0.0; n_in];
            for (o, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                let row = &weights[o * n_in..(o + 1) * n_in];
                for (p, &wi) in prev.iter_mut().zip(row) {
                    *p += d * wi;
                }
            }
            if l > 0 {
                let act = self.arch.activations[l - 1];
                for (p, &a) in prev.iter_mut().zip(&trace.acts[l]) {
                    *p *= act.derive_from_output(a);
                }
            }
            delta = prev;
        }
        Ok((param_grad, delta))
    }

    /// Canonical binary form: magic, version, sizes, activation tags, then
    /// parameters as little-endian 64-bit floats.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 4 * self.arch.sizes.len() + 8 * self.params.len());
        out.extend_from_slice(MAGIC);
        out.push(FORMAT_VERSION);
        out.extend_from_slice(&(self.arch.sizes.len() as u32).to_le_bytes());
        for &s in &self.arch.sizes {
            out.extend_from_slice(&(s as u32).to_le_bytes());
        }
        for &a in &self.arch.activations {
            out.push(a.tag());
        }
        for &p in &self.params {
            out.extend_from_slice(&p.to_le_bytes());
        }
        out
    }

    /// Parses the format written by [`MlpNet::to_bytes`].
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cursor = Cursor { bytes, pos: 0 };
        let magic = cursor.take(MAGIC.len())?;
        if magic != MAGIC {
            return Err(Error::Parse("bad network file magic".to_string()));
        }
        let version = cursor.take(1)?[0];
        if version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported network format version {version}"
            )));
        }
        let n_sizes = cursor.u32()? as usize;
        if n_sizes < 2 || n_sizes > 1024 {
            return Err(Error::Parse(format!("implausible layer count {n_sizes}")));
        }
        let mut sizes = Vec::with_capacity(n_sizes);
        for _ in 0..n_sizes {
            sizes.push(cursor.u32()? as usize);
        }
        let mut activations = Vec::with_capacity(n_sizes - 1);
        for _ in 0..n_sizes - 1 {
            activations.push(Activation::from_tag(cursor.take(1)?[0])?);
        }
        let arch = Architecture::new(sizes, activations)?;
        let mut params = Vec::with_capacity(arch.param_count());
        for _ in 0..arch.param_count() {
            params.push(f64::from_le_bytes(cursor.take(8)?.try_into().expect("8 bytes")));
        }
        if cursor.pos != bytes.len() {
            return Err(Error::Parse(format!(
                "{} trailing bytes after network data",
                bytes.len() - cursor.pos
            )));
        }
        MlpNet::new(arch, params)
    }
}

const MAGIC: &[u8] = b"MLPN";
const FORMAT_VERSION: u8 = 1;

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::Parse("truncated network file".to_string()));
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
}
