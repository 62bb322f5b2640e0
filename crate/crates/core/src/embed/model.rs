//! Model parameters and the negative-sampling objective.
//!
//! The input matrix holds one vector per vocabulary token and becomes the
//! final embedding. Output matrices hold the prediction parameters: one
//! matrix for the classic models, one per signed window offset for the
//! order-aware models.
//!
//! For an example with predicting-side vector `v` and predicted targets
//! `t_0` (the observed token) and `t_1..t_k` (sampled negatives), the loss is
//!
//! ```text
//! L = -log sigmoid(v . u_0) - sum_k log sigmoid(-v . u_k)
//! ```
//!
//! Skip-gram takes `v = input[center]` and `u_j = output[target_j]`
//! (offset-selected output matrix in the order-aware variant). CBOW takes
//! `v` as the mean of the context input vectors and predicts the center;
//! the order-aware CBOW scores each context token through the output matrix
//! of its own offset, averaged, which collapses to classic CBOW when all
//! offset matrices are equal.
//!
//! All updates are synchronous within one example: gradients are computed
//! from the pre-step parameters, then applied.

use std::sync::atomic::{AtomicU64, Ordering};

use super::ModelKind;

/// One (center, context) co-occurrence with its signed window offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainingPair {
    pub center: u32,
    pub context: u32,
    /// Context position minus center position; never zero.
    pub offset: i32,
}

/// Enumerates all training pairs of a sentence under a fixed window: for
/// every position `t` and nonzero offset `r` with `|r| <= window` and `t + r`
/// in range, the pair `(sentence[t], sentence[t + r], r)`. Order: by `t`,
/// then by `r` ascending.
pub fn extract_pairs(sentence: &[u32], window: usize) -> Vec<TrainingPair> {
    let mut pairs = Vec::new();
    let w = window as i32;
    let n = sentence.len() as i32;
    for t in 0..n {
        for r in -w..=w {
            if r == 0 {
                continue;
            }
            let u = t + r;
            if u < 0 || u >= n {
                continue;
            }
            pairs.push(TrainingPair {
                center: sentence[t as usize],
                context: sentence[u as usize],
                offset: r,
            });
        }
    }
    pairs
}

/// One training example. Skip-gram models consume single pairs; CBOW models
/// consume a whole window around one center.
#[derive(Debug, Clone)]
pub enum Example<'a> {
    Pair(TrainingPair),
    Window {
        center: u32,
        /// `(token, offset)` for every context position in the window.
        contexts: &'a [(u32, i32)],
    },
}

/// Dense row-major matrix over atomic f64 bit patterns. Relaxed loads and
/// stores compile to plain moves; concurrent training updates may race, which
/// this algorithm family tolerates.
struct AtomicMatrix {
    dim: usize,
    data: Vec<AtomicU64>,
}

impl AtomicMatrix {
    fn zeros(rows: usize, dim: usize) -> Self {
        let mut data = Vec::with_capacity(rows * dim);
        data.resize_with(rows * dim, || AtomicU64::new(0.0_f64.to_bits()));
        AtomicMatrix { dim, data }
    }

    #[inline]
    fn get(&self, row: usize, col: usize) -> f64 {
        f64::from_bits(self.data[row * self.dim + col].load(Ordering::Relaxed))
    }

    #[inline]
    fn set(&self, row: usize, col: usize, value: f64) {
        self.data[row * self.dim + col].store(value.to_bits(), Ordering::Relaxed);
    }

    #[inline]
    fn read_row(&self, row: usize, buf: &mut [f64]) {
        let base = row * self.dim;
        for (j, slot) in buf.iter_mut().enumerate() {
            *slot = f64::from_bits(self.data[base + j].load(Ordering::Relaxed));
        }
    }

    /// row += coef * src
    #[inline]
    fn add_scaled(&self, row: usize, coef: f64, src: &[f64]) {
        let base = row * self.dim;
        for (j, &s) in src.iter().enumerate() {
            let cell = &self.data[base + j];
            let old = f64::from_bits(cell.load(Ordering::Relaxed));
            cell.store((old + coef * s).to_bits(), Ordering::Relaxed);
        }
    }
}

/// Input and output parameter matrices for one model.
pub struct Matrices {
    model: ModelKind,
    vocab_size: usize,
    dim: usize,
    window: usize,
    input: AtomicMatrix,
    outputs: Vec<AtomicMatrix>,
}

impl Matrices {
    /// Fresh parameters: input rows uniform in `[-0.5/dim, +0.5/dim]` from
    /// the given seed, output matrices zero.
    pub fn new(model: ModelKind, vocab_size: usize, dim: usize, window: usize, seed: u64) -> Self {
        use rand::{Rng, SeedableRng};
        let input = AtomicMatrix::zeros(vocab_size, dim);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for row in 0..vocab_size {
            for col in 0..dim {
                let x: f64 = rng.random();
                input.set(row, col, (x - 0.5) / dim as f64);
            }
        }
        let output_count = if model.is_order_aware() { 2 * window } else { 1 };
        let outputs = (0..output_count)
            .map(|_| AtomicMatrix::zeros(vocab_size, dim))
            .collect();
        Matrices {
            model,
            vocab_size,
            dim,
            window,
            input,
            outputs,
        }
    }

    pub fn model(&self) -> ModelKind {
        self.model
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn output_slots(&self) -> usize {
        self.outputs.len()
    }

    /// Maps a signed offset to its output matrix index: classic models use
    /// slot 0 for every offset; order-aware models map `-window..=-1` to
    /// `0..window` and `1..=window` to `window..2*window`.
    pub fn output_slot(&self, offset: i32) -> usize {
        debug_assert!(offset != 0 && offset.unsigned_abs() as usize <= self.window);
        if !self.model.is_order_aware() {
            return 0;
        }
        if offset < 0 {
            (offset + self.window as i32) as usize
        } else {
            self.window + (offset - 1) as usize
        }
    }

    pub fn input_value(&self, row: usize, col: usize) -> f64 {
        self.input.get(row, col)
    }

    pub fn set_input_value(&self, row: usize, col: usize, value: f64) {
        self.input.set(row, col, value);
    }

    pub fn output_value(&self, slot: usize, row: usize, col: usize) -> f64 {
        self.outputs[slot].get(row, col)
    }

    pub fn set_output_value(&self, slot: usize, row: usize, col: usize, value: f64) {
        self.outputs[slot].set(row, col, value);
    }

    pub fn input_row(&self, row: usize) -> Vec<f64> {
        let mut buf = vec![0.0; self.dim];
        self.input.read_row(row, &mut buf);
        buf
    }

    /// Input matrix rows as f32, the final embedding payload.
    pub fn input_row_f32(&self, row: usize) -> Vec<f32> {
        (0..self.dim)
            .map(|col| self.input.get(row, col) as f32)
            .collect()
    }
}

/// Reusable buffers for example evaluation; sized lazily per call.
#[derive(Default)]
pub struct Scratch {
    /// Predicting-side vector (input row or context mean).
    hidden: Vec<f64>,
    /// Gradient on the predicting side.
    hidden_grad: Vec<f64>,
    /// Context input rows, one per context slot (order-aware CBOW).
    ctx_rows: Vec<f64>,
    /// Output rows captured before the step.
    u_rows: Vec<f64>,
    /// Per-target sigmoid-minus-label coefficients.
    coefs: Vec<f64>,
}

impl Scratch {
    pub fn new() -> Self {
        Scratch::default()
    }
}

/// Gradients of one example for every touched parameter row, accumulated per
/// row. Intended for verification; the training path applies updates without
/// materializing this.
#[derive(Debug, Clone)]
pub struct GradientSet {
    /// `(input row, d loss / d row)`
    pub input: Vec<(u32, Vec<f64>)>,
    /// `(output slot, output row, d loss / d row)`
    pub output: Vec<(usize, u32, Vec<f64>)>,
}

impl GradientSet {
    fn add_input(&mut self, row: u32, grad: &[f64], scale: f64) {
        match self.input.iter_mut().find(|(r, _)| *r == row) {
            Some((_, acc)) => {
                for (a, g) in acc.iter_mut().zip(grad) {
                    *a += scale * g;
                }
            }
            None => self
                .input
                .push((row, grad.iter().map(|g| scale * g).collect())),
        }
    }

    fn add_output(&mut self, slot: usize, row: u32, grad: &[f64], scale: f64) {
        match self
            .output
            .iter_mut()
            .find(|(s, r, _)| *s == slot && *r == row)
        {
            Some((_, _, acc)) => {
                for (a, g) in acc.iter_mut().zip(grad) {
                    *a += scale * g;
                }
            }
            None => self
                .output
                .push((slot, row, grad.iter().map(|g| scale * g).collect())),
        }
    }
}

/// Numerically stable log(1 + exp(x)).
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Numerically stable logistic function.
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

enum Mode<'a> {
    /// Apply SGD updates with the given learning rate.
    Apply(f64),
    /// Materialize gradients without touching parameters.
    Collect(&'a mut GradientSet),
}

/// Trains one example in place and returns its loss.
pub fn train_example(
    m: &Matrices,
    example: &Example,
    negatives: &[u32],
    learning_rate: f64,
    scratch: &mut Scratch,
) -> f64 {
    run_example(m, example, negatives, Mode::Apply(learning_rate), scratch)
}

/// Computes the loss and the gradients of one example without updating
/// parameters. The gradient set contains every touched row exactly once.
pub fn example_loss_and_gradients(
    m: &Matrices,
    example: &Example,
    negatives: &[u32],
) -> (f64, GradientSet) {
    let mut grads = GradientSet {
        input: Vec::new(),
        output: Vec::new(),
    };
    let mut scratch = Scratch::new();
    let loss = run_example(m, example, negatives, Mode::Collect(&mut grads), &mut scratch);
    (loss, grads)
}

/// Loss of one example under the current parameters.
pub fn example_loss(m: &Matrices, example: &Example, negatives: &[u32]) -> f64 {
    example_loss_and_gradients(m, example, negatives).0
}

fn run_example(
    m: &Matrices,
    example: &Example,
    negatives: &[u32],
    mode: Mode,
    scratch: &mut Scratch,
) -> f64 {
    match (m.model.is_skip_gram(), example) {
        (true, Example::Pair(pair)) => sg_example(m, pair, negatives, mode, scratch),
        (false, Example::Window { center, contexts }) => {
            cbow_example(m, *center, contexts, negatives, mode, scratch)
        }
        (true, Example::Window { .. }) => {
            panic!("skip-gram models train on Example::Pair, got Example::Window")
        }
        (false, Example::Pair(_)) => {
            panic!("CBOW models train on Example::Window, got Example::Pair")
        }
    }
}

fn check_id(m: &Matrices, id: u32) {
    assert!(
        (id as usize) < m.vocab_size,
        "token id {id} out of range for vocabulary of {}",
        m.vocab_size
    );
}

fn sg_example(
    m: &Matrices,
    pair: &TrainingPair,
    negatives: &[u32],
    mode: Mode,
    scratch: &mut Scratch,
) -> f64 {
    check_id(m, pair.center);
    check_id(m, pair.context);
    let dim = m.dim;
    let slot = m.output_slot(pair.offset);
    let output = &m.outputs[slot];

    scratch.hidden.resize(dim, 0.0);
    scratch.hidden_grad.clear();
    scratch.hidden_grad.resize(dim, 0.0);
    m.input.read_row(pair.center as usize, &mut scratch.hidden);

    let total_targets = 1 + negatives.len();
    scratch.u_rows.resize(total_targets * dim, 0.0);
    scratch.coefs.resize(total_targets, 0.0);

    let mut loss = 0.0;
    for (j, &target) in std::iter::once(&pair.context).chain(negatives).enumerate() {
        check_id(m, target);
        let positive = j == 0;
        let u = &mut scratch.u_rows[j * dim..(j + 1) * dim];
        output.read_row(target as usize, u);
        let mut score = 0.0;
        for (x, y) in scratch.hidden.iter().zip(u.iter()) {
            score += x * y;
        }
        loss += softplus(if positive { -score } else { score });
        let label = if positive { 1.0 } else { 0.0 };
        let coef = sigmoid(score) - label;
        scratch.coefs[j] = coef;
        for (g, y) in scratch.hidden_grad.iter_mut().zip(u.iter()) {
            *g += coef * y;
        }
    }

    match mode {
        Mode::Apply(lr) => {
            for (j, &target) in std::iter::once(&pair.context).chain(negatives).enumerate() {
                let coef = scratch.coefs[j];
                output.add_scaled(target as usize, -lr * coef, &scratch.hidden);
            }
            m.input
                .add_scaled(pair.center as usize, -lr, &scratch.hidden_grad);
        }
        Mode::Collect(grads) => {
            for (j, &target) in std::iter::once(&pair.context).chain(negatives).enumerate() {
                grads.add_output(slot, target, &scratch.hidden, scratch.coefs[j]);
            }
            grads.add_input(pair.center, &scratch.hidden_grad, 1.0);
        }
    }
    loss
}

fn cbow_example(
    m: &Matrices,
    center: u32,
    contexts: &[(u32, i32)],
    negatives: &[u32],
    mode: Mode,
    scratch: &mut Scratch,
) -> f64 {
    check_id(m, center);
    assert!(!contexts.is_empty(), "CBOW window needs at least one context");
    let dim = m.dim;
    let n_ctx = contexts.len();
    let inv = 1.0 / n_ctx as f64;
    let order_aware = m.model.is_order_aware();

    // Context input rows; the classic hidden vector is their mean.
    scratch.ctx_rows.resize(n_ctx * dim, 0.0);
    scratch.hidden.clear();
    scratch.hidden.resize(dim, 0.0);
    for (c, &(token, _)) in contexts.iter().enumerate() {
        check_id(m, token);
        let row = &mut scratch.ctx_rows[c * dim..(c + 1) * dim];
        m.input.read_row(token as usize, row);
        for (h, x) in scratch.hidden.iter_mut().zip(row.iter()) {
            *h += inv * x;
        }
    }

    let total_targets = 1 + negatives.len();
    scratch.coefs.resize(total_targets, 0.0);

    let mut loss = 0.0;
    if !order_aware {
        // Score the mean context against the single output matrix.
        let output = &m.outputs[0];
        scratch.u_rows.resize(total_targets * dim, 0.0);
        scratch.hidden_grad.clear();
        scratch.hidden_grad.resize(dim, 0.0);
        for (j, &target) in std::iter::once(&center).chain(negatives).enumerate() {
            check_id(m, target);
            let positive = j == 0;
            let u = &mut scratch.u_rows[j * dim..(j + 1) * dim];
            output.read_row(target as usize, u);
            let mut score = 0.0;
            for (x, y) in scratch.hidden.iter().zip(u.iter()) {
                score += x * y;
            }
            loss += softplus(if positive { -score } else { score });
            let coef = sigmoid(score) - if positive { 1.0 } else { 0.0 };
            scratch.coefs[j] = coef;
            for (g, y) in scratch.hidden_grad.iter_mut().zip(u.iter()) {
                *g += coef * y;
            }
        }
        match mode {
            Mode::Apply(lr) => {
                for (j, &target) in std::iter::once(&center).chain(negatives).enumerate() {
                    output.add_scaled(target as usize, -lr * scratch.coefs[j], &scratch.hidden);
                }
                // d hidden / d input[c] = 1/|C| for every context row.
                for &(token, _) in contexts {
                    m.input
                        .add_scaled(token as usize, -lr * inv, &scratch.hidden_grad);
                }
            }
            Mode::Collect(grads) => {
                for (j, &target) in std::iter::once(&center).chain(negatives).enumerate() {
                    grads.add_output(0, target, &scratch.hidden, scratch.coefs[j]);
                }
                for &(token, _) in contexts {
                    grads.add_input(token, &scratch.hidden_grad, inv);
                }
            }
        }
        return loss;
    }

    // Order-aware CBOW: score_j = (1/|C|) sum_c input[ctx_c] . W'_{r_c}[t_j].
    // Capture all per-(context, target) output rows before updating.
    scratch.u_rows.resize(n_ctx * total_targets * dim, 0.0);
    for (c, &(_, offset)) in contexts.iter().enumerate() {
        let slot = m.output_slot(offset);
        for (j, &target) in std::iter::once(&center).chain(negatives).enumerate() {
            check_id(m, target);
            let u = &mut scratch.u_rows[(c * total_targets + j) * dim..][..dim];
            m.outputs[slot].read_row(target as usize, u);
        }
    }
    for (j, _) in std::iter::once(&center).chain(negatives).enumerate() {
        let positive = j == 0;
        let mut score = 0.0;
        for c in 0..n_ctx {
            let x = &scratch.ctx_rows[c * dim..(c + 1) * dim];
            let u = &scratch.u_rows[(c * total_targets + j) * dim..][..dim];
            for (a, b) in x.iter().zip(u.iter()) {
                score += a * b;
            }
        }
        score *= inv;
        loss += softplus(if positive { -score } else { score });
        scratch.coefs[j] = sigmoid(score) - if positive { 1.0 } else { 0.0 };
    }

    match mode {
        Mode::Apply(lr) => {
            scratch.hidden_grad.clear();
            scratch.hidden_grad.resize(dim, 0.0);
            for (c, &(token, offset)) in contexts.iter().enumerate() {
                let slot = m.output_slot(offset);
                let x = &scratch.ctx_rows[c * dim..(c + 1) * dim];
                // Gradient for this context input row across all targets.
                let grad_x = &mut scratch.hidden_grad;
                grad_x.iter_mut().for_each(|g| *g = 0.0);
                for (j, &target) in std::iter::once(&center).chain(negatives).enumerate() {
                    let coef = scratch.coefs[j] * inv;
                    let u = &scratch.u_rows[(c * total_targets + j) * dim..][..dim];
                    for (g, y) in grad_x.iter_mut().zip(u.iter()) {
                        *g += coef * y;
                    }
                    m.outputs[slot].add_scaled(target as usize, -lr * coef, x);
                }
                m.input.add_scaled(token as usize, -lr, grad_x);
            }
        }
        Mode::Collect(grads) => {
            for (c, &(token, offset)) in contexts.iter().enumerate() {
                let slot = m.output_slot(offset);
                let x = &scratch.ctx_rows[c * dim..(c + 1) * dim];
                let mut grad_x = vec![0.0; dim];
                for (j, &target) in std::iter::once(&center).chain(negatives).enumerate() {
                    let coef = scratch.coefs[j] * inv;
                    let u = &scratch.u_rows[(c * total_targets + j) * dim..][..dim];
                    for (g, y) in grad_x.iter_mut().zip(u.iter()) {
                        *g += coef * y;
                    }
                    grads.add_output(slot, target, x, coef);
                }
                grads.add_input(token, &grad_x, 1.0);
            }
        }
    }
    loss
}
