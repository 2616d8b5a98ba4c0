use rand::Rng;

use crate::{Error, Real, Result, SimRng};

/// Fully connected network: `tanh` on hidden layers, identity output.
/// Parameters live in one flat vector; layer `l` stores its weights
/// row-major (`out × in`) followed by its biases.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp<T> {
    sizes: Vec<usize>,
    params: Vec<T>,
    offsets: Vec<usize>,
}

/// Layer activations kept for the backward pass.
#[derive(Clone, Debug, Default)]
pub struct Tape<T> {
    acts: Vec<Vec<T>>,
}

impl<T> Tape<T> {
    pub fn output(&self) -> &[T] {
        self.acts.last().map_or(&[], Vec::as_slice)
    }
}

fn layer_offsets(sizes: &[usize]) -> Vec<usize> {
    let mut offsets = vec![0];
    for w in sizes.windows(2) {
        offsets.push(offsets.last().unwrap() + (w[0] + 1) * w[1]);
    }
    offsets
}

impl<T: Real> Mlp<T> {
    /// Glorot-uniform weights, zero biases.
    pub fn new(sizes: &[usize], rng: &mut SimRng) -> Result<Self> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(Error::Shape(format!("layer sizes {sizes:?}")));
        }
        let offsets = layer_offsets(sizes);
        let mut params = vec![T::zero(); *offsets.last().unwrap()];
        for (l, w) in sizes.windows(2).enumerate() {
            let limit = (6.0 / (w[0] + w[1]) as f64).sqrt();
            for p in &mut params[offsets[l]..offsets[l] + w[0] * w[1]] {
                *p = T::lit(rng.random_range(-limit..limit));
            }
        }
        Ok(Self { sizes: sizes.to_vec(), params, offsets })
    }

    pub fn from_params(sizes: &[usize], params: Vec<T>) -> Result<Self> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(Error::Shape(format!("layer sizes {sizes:?}")));
        }
        let offsets = layer_offsets(sizes);
        if params.len() != *offsets.last().unwrap() {
            return Err(Error::Shape(format!(
                "{} parameters for layer sizes {sizes:?} (need {})",
                params.len(),
                offsets.last().unwrap()
            )));
        }
        Ok(Self { sizes: sizes.to_vec(), params, offsets })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [T] {
        &mut self.params
    }

    pub fn num_layers(&self) -> usize {
        self.sizes.len() - 1
    }

    /// Weights (`out × in`, row-major) and biases of layer `l`.
    pub fn layer(&self, l: usize) -> (&[T], &[T]) {
        let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
        let w = self.offsets[l];
        (&self.params[w..w + n_in * n_out], &self.params[w + n_in * n_out..self.offsets[l + 1]])
    }

    pub fn forward(&self, x: &[T]) -> Vec<T> {
        let mut tape = Tape::default();
        self.forward_tape(x, &mut tape);
        tape.acts.pop().unwrap_or_default()
    }

    pub fn forward_tape(&self, x: &[T], tape: &mut Tape<T>) {
        debug_assert_eq!(x.len(), self.input_dim());
        tape.acts.clear();
        tape.acts.push(x.to_vec());
        let last = self.num_layers() - 1;
        for l in 0..self.num_layers() {
            let (w, b) = self.layer(l);
            let input = &tape.acts[l];
            let n_in = self.sizes[l];
            let out: Vec<T> = b
                .iter()
                .enumerate()
                .map(|(j, &bj)| {
                    let z = w[j * n_in..(j + 1) * n_in]
                        .iter()
                        .zip(input)
                        .fold(bj, |acc, (&wij, &xi)| acc + wij * xi);
                    if l == last { z } else { z.tanh() }
                })
                .collect();
            tape.acts.push(out);
        }
    }

    /// Adds `∂(dout · output)/∂params` to `grad`.
    pub fn backward(&self, tape: &Tape<T>, dout: &[T], grad: &mut [T]) {
        let mut delta = dout.to_vec();
        for l in (0..self.num_layers()).rev() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let input = &tape.acts[l];
            let w_off = self.offsets[l];
            let b_off = w_off + n_in * n_out;
            for j in 0..n_out {
                let dj = delta[j];
                if dj == T::zero() {
                    continue;
                }
                grad[b_off + j] += dj;
                for (g, &xi) in grad[w_off + j * n_in..w_off + (j + 1) * n_in].iter_mut().zip(input) {
                    *g += dj * xi;
                }
            }
            if l == 0 {
                break;
            }
            let (w, _) = self.layer(l);
            // Propagate through the tanh of the previous layer.
            delta = (0..n_in)
                .map(|i| {
                    let s: T = (0..n_out).map(|j| w[j * n_in + i] * delta[j]).sum();
                    let a = input[i];
                    s * (T::one() - a * a)
                })
                .collect();
        }
    }
}

/// Adaptive moment estimation.
#[derive(Clone, Debug, PartialEq)]
pub struct Adam<T> {
    pub beta1: T,
    pub beta2: T,
    pub eps: T,
    m: Vec<T>,
    v: Vec<T>,
    t: i32,
}

impl<T: Real> Adam<T> {
    pub fn new(n: usize) -> Self {
        Self {
            beta1: T::lit(0.9),
            beta2: T::lit(0.999),
            eps: T::lit(1e-8),
            m: vec![T::zero(); n],
            v: vec![T::zero(); n],
            t: 0,
        }
    }

    /// Descends along `grad` with step size `lr`.
    pub fn step(&mut self, params: &mut [T], grad: &[T], lr: T) {
        self.t += 1;
        let one = T::one();
        let c1 = one - self.beta1.powi(self.t);
        let c2 = one - self.beta2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (one - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (one - self.beta2) * grad[i] * grad[i];
            let mh = self.m[i] / c1;
            let vh = self.v[i] / c2;
            params[i] -= lr * mh / (vh.sqrt() + self.eps);
        }
    }
}
