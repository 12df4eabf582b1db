//! Skip-gram training over the walk corpus, producing the feature map
//! `F: X_k -> R^d`.
//!
//! Two training routes share one model:
//! - `negatives = 0`: exact stochastic gradient descent on the full-softmax
//!   objective (the conditional probability over all of X_k). Tractable
//!   only for small vocabularies; kept as the oracle route.
//! - `negatives > 0`: skip-gram with negative sampling from the unigram
//!   distribution of corpus tokens raised to 0.75, the standard surrogate
//!   in the word2vec/node2vec lineage.

use std::io::{BufRead, BufReader, Read, Write};
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::complex::Simplex;
use crate::rng::{master_rng, stream_rng};
use crate::walks::WalkCorpus;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Hyperparams {
    /// Feature dimension d.
    pub dim: usize,
    /// Context radius in walk positions.
    pub window: usize,
    pub epochs: usize,
    pub lr_initial: f64,
    pub lr_final: f64,
    /// Negative samples per positive pair; 0 selects full-softmax training.
    pub negatives: usize,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            dim: 20,
            window: 10,
            epochs: 5,
            // Half the word2vec convention (0.025): these corpora are tiny
            // vocabularies with heavy repetition, and the larger step
            // overshoots into a regime where the leading principal
            // components of F stop tracking co-occurrence structure.
            lr_initial: 0.0125,
            lr_final: 0.0001,
            negatives: 5,
            seed: 0,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 1 || self.window < 1 || self.epochs < 1 {
            return Err(Error::Config(
                "dim, window and epochs must be >= 1".into(),
            ));
        }
        if self.lr_final > self.lr_initial || self.lr_initial <= 0.0 {
            return Err(Error::Config(
                "need 0 < lr_final <= lr_initial".into(),
            ));
        }
        Ok(())
    }
}

/// Sequential mode is bit-reproducible given the seed and is what every
/// acceptance test uses. Parallel mode updates the shared tables from
/// several workers without mutual exclusion; reproducibility is not
/// guaranteed, loss quality is statistically equivalent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainMode {
    Sequential,
    Parallel { workers: usize },
}

/// Input table F (the published embedding) and context table C
/// (training-internal, used only by the negative-sampling route).
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    n: usize,
    dim: usize,
    input: Vec<f64>,
    context: Vec<f64>,
}

impl EmbeddingModel {
    /// Build a model from explicit tables; both must have n*dim entries.
    pub fn from_tables(n: usize, dim: usize, input: Vec<f64>, context: Vec<f64>) -> Result<Self> {
        if input.len() != n * dim || context.len() != n * dim {
            return Err(Error::LengthMismatch(input.len(), n * dim));
        }
        Ok(EmbeddingModel { n, dim, input, context })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Published feature vector of simplex `i`.
    pub fn vector(&self, i: usize) -> &[f64] {
        &self.input[i * self.dim..(i + 1) * self.dim]
    }

    pub fn context_vector(&self, i: usize) -> &[f64] {
        &self.context[i * self.dim..(i + 1) * self.dim]
    }

    /// Rows of F as an n x d matrix (row-major flat).
    pub fn input_table(&self) -> &[f64] {
        &self.input
    }

    pub fn all_finite(&self) -> bool {
        self.input.iter().chain(&self.context).all(|x| x.is_finite())
    }
}

/// F entries i.i.d. uniform on [-0.5/d, 0.5/d], C zero.
pub fn init_model(n: usize, dim: usize, seed: u64) -> EmbeddingModel {
    let mut rng = master_rng(seed);
    let half = 0.5 / dim as f64;
    let input = (0..n * dim).map(|_| rng.gen_range(-half..half)).collect();
    EmbeddingModel {
        n,
        dim,
        input,
        context: vec![0.0; n * dim],
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Pr(tau | F(sigma)): softmax over inner products of F rows with F(sigma).
pub fn softmax_prob(model: &EmbeddingModel, sigma: usize, tau: usize) -> f64 {
    let row = softmax_row(model, sigma);
    row[tau]
}

fn softmax_row(model: &EmbeddingModel, sigma: usize) -> Vec<f64> {
    let fs = model.vector(sigma);
    let scores: Vec<f64> = (0..model.n).map(|nu| dot(model.vector(nu), fs)).collect();
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let z: f64 = exps.iter().sum();
    exps.iter().map(|e| e / z).collect()
}

fn log_partition(model: &EmbeddingModel, sigma: usize) -> f64 {
    let fs = model.vector(sigma);
    let scores: Vec<f64> = (0..model.n).map(|nu| dot(model.vector(nu), fs)).collect();
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln()
}

/// Visit every (center, context) pair of the corpus within the window.
fn for_each_pair(corpus: &WalkCorpus, window: usize, mut f: impl FnMut(usize, usize)) {
    for walk in &corpus.walks {
        for (t, &center) in walk.iter().enumerate() {
            let lo = t.saturating_sub(window);
            let hi = (t + window).min(walk.len() - 1);
            for (c, &ctx) in walk.iter().enumerate().take(hi + 1).skip(lo) {
                if c != t {
                    f(center, ctx);
                }
            }
        }
    }
}

/// Negative log-likelihood of all window pairs under the full softmax:
/// sum over pairs of [log Z(sigma) - <F(tau), F(sigma)>].
pub fn full_softmax_loss(model: &EmbeddingModel, corpus: &WalkCorpus, window: usize) -> f64 {
    let mut log_z = vec![f64::NAN; model.n];
    let mut loss = 0.0;
    for_each_pair(corpus, window, |s, t| {
        if log_z[s].is_nan() {
            log_z[s] = log_partition(model, s);
        }
        loss += log_z[s] - dot(model.vector(t), model.vector(s));
    });
    loss
}

/// Gradient tables of `full_softmax_loss` with respect to F and C. The
/// loss does not involve C, so its C block is zero; it is returned to
/// match the model's shape.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub input: Vec<f64>,
    pub context: Vec<f64>,
}

pub fn loss_gradient(model: &EmbeddingModel, corpus: &WalkCorpus, window: usize) -> Gradients {
    let d = model.dim;
    let mut grad = vec![0.0; model.n * d];
    // cache softmax rows per distinct center
    let mut rows: Vec<Option<Vec<f64>>> = vec![None; model.n];
    for_each_pair(corpus, window, |s, t| {
        let row = rows[s].get_or_insert_with(|| softmax_row(model, s)).clone();
        let fs: Vec<f64> = model.vector(s).to_vec();
        // d/dF(s) log Z = sum_nu p_nu F(nu); d/dF(nu) log Z = p_nu F(s)
        for (nu, &p) in row.iter().enumerate() {
            let fnu = model.vector(nu);
            for j in 0..d {
                grad[s * d + j] += p * fnu[j];
                grad[nu * d + j] += p * fs[j];
            }
        }
        // d/dF of -<F(t), F(s)>
        let ft: Vec<f64> = model.vector(t).to_vec();
        for j in 0..d {
            grad[s * d + j] -= ft[j];
            grad[t * d + j] -= fs[j];
        }
    });
    Gradients {
        input: grad,
        context: vec![0.0; model.n * d],
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainingReport {
    /// Mean loss per pair, one entry per epoch. Negative-sampling runs
    /// report the sampled SGNS loss, full-softmax runs the exact loss.
    pub epoch_losses: Vec<f64>,
    /// Walk positions with a nonempty context window, for one epoch.
    pub token_count: usize,
    pub wall_time: Duration,
}

/// Cumulative unigram^0.75 table for negative sampling.
struct NegativeTable {
    cum: Vec<f64>,
}

impl NegativeTable {
    fn build(corpus: &WalkCorpus, n: usize) -> NegativeTable {
        let mut counts = vec![0.0f64; n];
        for walk in &corpus.walks {
            for &tok in walk {
                counts[tok] += 1.0;
            }
        }
        let mut cum = Vec::with_capacity(n);
        let mut acc = 0.0;
        for c in &counts {
            acc += c.powf(0.75);
            cum.push(acc);
        }
        NegativeTable { cum }
    }

    fn sample(&self, rng: &mut impl Rng) -> usize {
        let total = *self.cum.last().unwrap();
        let u: f64 = rng.gen::<f64>() * total;
        self.cum.partition_point(|&c| c <= u).min(self.cum.len() - 1)
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn count_tokens(corpus: &WalkCorpus) -> usize {
    corpus
        .walks
        .iter()
        .map(|w| if w.len() >= 2 { w.len() } else { 0 })
        .sum()
}

/// Train an embedding on the corpus.
pub fn train(
    corpus: &WalkCorpus,
    hp: &Hyperparams,
    mode: TrainMode,
) -> Result<(EmbeddingModel, TrainingReport)> {
    hp.validate()?;
    if corpus.walks.is_empty() || corpus.walks.iter().all(|w| w.len() <= 1) {
        return Err(Error::DegenerateCorpus);
    }
    let start = Instant::now();
    let mut model = init_model(corpus.n_simplices, hp.dim, hp.seed);
    let token_count = count_tokens(corpus);
    let epoch_losses = if hp.negatives == 0 {
        train_full_softmax(&mut model, corpus, hp)
    } else {
        match mode {
            TrainMode::Sequential => train_sgns_sequential(&mut model, corpus, hp),
            TrainMode::Parallel { workers } => {
                train_sgns_parallel(&mut model, corpus, hp, workers.max(1))
            }
        }
    };
    debug_assert!(model.all_finite());
    let report = TrainingReport {
        epoch_losses,
        token_count,
        wall_time: start.elapsed(),
    };
    Ok((model, report))
}

fn lr_at(hp: &Hyperparams, processed: usize, total: usize) -> f64 {
    let frac = processed as f64 / total.max(1) as f64;
    hp.lr_initial + (hp.lr_final - hp.lr_initial) * frac.min(1.0)
}

/// Exact SGD on the full-softmax objective; F only, C untouched.
fn train_full_softmax(model: &mut EmbeddingModel, corpus: &WalkCorpus, hp: &Hyperparams) -> Vec<f64> {
    let d = hp.dim;
    let total_tokens = count_tokens(corpus) * hp.epochs;
    let mut processed = 0usize;
    let mut losses = Vec::with_capacity(hp.epochs);
    for _epoch in 0..hp.epochs {
        let mut epoch_loss = 0.0;
        let mut pairs = 0usize;
        for walk in &corpus.walks {
            if walk.len() < 2 {
                continue;
            }
            for (t, &center) in walk.iter().enumerate() {
                let lr = lr_at(hp, processed, total_tokens);
                processed += 1;
                let lo = t.saturating_sub(hp.window);
                let hi = (t + hp.window).min(walk.len() - 1);
                for c in lo..=hi {
                    if c == t {
                        continue;
                    }
                    let ctx = walk[c];
                    let row = softmax_row(model, center);
                    let log_z = log_partition(model, center);
                    epoch_loss += log_z - dot(model.vector(ctx), model.vector(center));
                    pairs += 1;
                    let fs: Vec<f64> = model.vector(center).to_vec();
                    // expected context vector under the model
                    let mut expected = vec![0.0; d];
                    for (nu, &p) in row.iter().enumerate() {
                        let fnu = model.vector(nu);
                        for j in 0..d {
                            expected[j] += p * fnu[j];
                        }
                        // partition-side pull on every row
                        for j in 0..d {
                            model.input[nu * d + j] -= lr * p * fs[j];
                        }
                    }
                    let ft: Vec<f64> = model.vector(ctx).to_vec();
                    for j in 0..d {
                        model.input[center * d + j] -= lr * (expected[j] - ft[j]);
                        model.input[ctx * d + j] += lr * fs[j];
                    }
                }
            }
        }
        losses.push(epoch_loss / pairs.max(1) as f64);
    }
    losses
}

/// One SGNS update for the pair (center, ctx): the positive context and
/// `negatives` sampled tokens, accumulated into the center's input row.
#[inline]
fn sgns_pair<R: Rng>(
    input: &mut [f64],
    context: &mut [f64],
    d: usize,
    center: usize,
    ctx: usize,
    negatives: usize,
    table: &NegativeTable,
    rng: &mut R,
    lr: f64,
) -> f64 {
    let mut center_update = vec![0.0; d];
    let mut loss = 0.0;
    for sample in 0..=negatives {
        let (target, label) = if sample == 0 {
            (ctx, 1.0)
        } else {
            let mut neg = table.sample(rng);
            if neg == ctx {
                neg = table.sample(rng);
                if neg == ctx {
                    continue;
                }
            }
            (neg, 0.0)
        };
        let (f_row, c_row) = (center * d, target * d);
        let mut score = 0.0;
        for j in 0..d {
            score += input[f_row + j] * context[c_row + j];
        }
        let pred = sigmoid(score);
        loss -= if label == 1.0 {
            pred.max(1e-12).ln()
        } else {
            (1.0 - pred).max(1e-12).ln()
        };
        let g = (label - pred) * lr;
        for j in 0..d {
            center_update[j] += g * context[c_row + j];
            context[c_row + j] += g * input[f_row + j];
        }
    }
    let f_row = center * d;
    for j in 0..d {
        input[f_row + j] += center_update[j];
    }
    loss
}

fn train_sgns_sequential(
    model: &mut EmbeddingModel,
    corpus: &WalkCorpus,
    hp: &Hyperparams,
) -> Vec<f64> {
    let d = hp.dim;
    let table = NegativeTable::build(corpus, model.n);
    let total_tokens = count_tokens(corpus) * hp.epochs;
    let mut processed = 0usize;
    let mut rng = stream_rng(hp.seed, NEG_STREAM, 0);
    let mut losses = Vec::with_capacity(hp.epochs);
    for _epoch in 0..hp.epochs {
        let mut epoch_loss = 0.0;
        let mut pairs = 0usize;
        for walk in &corpus.walks {
            if walk.len() < 2 {
                continue;
            }
            for (t, &center) in walk.iter().enumerate() {
                let lr = lr_at(hp, processed, total_tokens);
                processed += 1;
                let lo = t.saturating_sub(hp.window);
                let hi = (t + hp.window).min(walk.len() - 1);
                for c in lo..=hi {
                    if c == t {
                        continue;
                    }
                    epoch_loss += sgns_pair(
                        &mut model.input,
                        &mut model.context,
                        d,
                        center,
                        walk[c],
                        hp.negatives,
                        &table,
                        &mut rng,
                        lr,
                    );
                    pairs += 1;
                }
            }
        }
        losses.push(epoch_loss / pairs.max(1) as f64);
    }
    losses
}

// stream id for the sequential negative-sampling RNG
const NEG_STREAM: u64 = 0x6e65_6773;

/// Lock-free parallel SGNS: workers update the shared tables through
/// relaxed atomics (hogwild style). Not bit-reproducible.
fn train_sgns_parallel(
    model: &mut EmbeddingModel,
    corpus: &WalkCorpus,
    hp: &Hyperparams,
    workers: usize,
) -> Vec<f64> {
    let d = hp.dim;
    let n = model.n;
    let table = NegativeTable::build(corpus, n);
    let total_tokens = count_tokens(corpus) * hp.epochs;
    let input: Vec<AtomicU64> = model.input.iter().map(|&x| AtomicU64::new(x.to_bits())).collect();
    let context: Vec<AtomicU64> = model.context.iter().map(|&x| AtomicU64::new(x.to_bits())).collect();
    let processed = AtomicUsize::new(0);
    let mut losses = Vec::with_capacity(hp.epochs);

    let load = |t: &AtomicU64| f64::from_bits(t.load(Ordering::Relaxed));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    for epoch in 0..hp.epochs {
        let epoch_loss: f64 = pool.install(|| {
            use rayon::prelude::*;
            corpus
                .walks
                .par_iter()
                .enumerate()
                .map(|(widx, walk)| {
                    if walk.len() < 2 {
                        return 0.0;
                    }
                    let mut rng = stream_rng(hp.seed, widx as u64, epoch as u64 + 1);
                    let mut local_loss = 0.0;
                    let mut center_update = vec![0.0; d];
                    for (t, &center) in walk.iter().enumerate() {
                        let done = processed.fetch_add(1, Ordering::Relaxed);
                        let lr = lr_at(hp, done, total_tokens);
                        let lo = t.saturating_sub(hp.window);
                        let hi = (t + hp.window).min(walk.len() - 1);
                        for c in lo..=hi {
                            if c == t {
                                continue;
                            }
                            let ctx = walk[c];
                            center_update.iter_mut().for_each(|x| *x = 0.0);
                            for sample in 0..=hp.negatives {
                                let (target, label) = if sample == 0 {
                                    (ctx, 1.0)
                                } else {
                                    let neg = table.sample(&mut rng);
                                    if neg == ctx {
                                        continue;
                                    }
                                    (neg, 0.0)
                                };
                                let (f_row, c_row) = (center * d, target * d);
                                let mut score = 0.0;
                                for j in 0..d {
                                    score += load(&input[f_row + j]) * load(&context[c_row + j]);
                                }
                                let pred = sigmoid(score);
                                local_loss -= if label == 1.0 {
                                    pred.max(1e-12).ln()
                                } else {
                                    (1.0 - pred).max(1e-12).ln()
                                };
                                let g = (label - pred) * lr;
                                for j in 0..d {
                                    let cv = load(&context[c_row + j]);
                                    center_update[j] += g * cv;
                                    let fv = load(&input[f_row + j]);
                                    context[c_row + j]
                                        .store((cv + g * fv).to_bits(), Ordering::Relaxed);
                                }
                            }
                            let f_row = center * d;
                            for j in 0..d {
                                let fv = load(&input[f_row + j]);
                                input[f_row + j]
                                    .store((fv + center_update[j]).to_bits(), Ordering::Relaxed);
                            }
                        }
                    }
                    local_loss
                })
                .sum()
        });
        let pairs: usize = corpus
            .walks
            .iter()
            .map(|w| {
                if w.len() < 2 {
                    return 0;
                }
                (0..w.len())
                    .map(|t| {
                        let lo = t.saturating_sub(hp.window);
                        let hi = (t + hp.window).min(w.len() - 1);
                        hi - lo
                    })
                    .sum()
            })
            .sum();
        losses.push(epoch_loss / pairs.max(1) as f64);
    }
    model.input = input.into_iter().map(|a| f64::from_bits(a.into_inner())).collect();
    model.context = context.into_iter().map(|a| f64::from_bits(a.into_inner())).collect();
    losses
}

/// Embedding file: first line `<count> <dim>`, then one line per simplex:
/// `<v0-v1-...-vk> <d floats>` at 9 significant digits.
pub fn write_embedding(
    model: &EmbeddingModel,
    simplices: &[Simplex],
    mut w: impl Write,
) -> Result<()> {
    assert_eq!(model.n, simplices.len());
    writeln!(w, "{} {}", model.n, model.dim)?;
    for (i, s) in simplices.iter().enumerate() {
        let mut line = s.key();
        for x in model.vector(i) {
            line.push(' ');
            line.push_str(&format!("{x:.8e}"));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Read an embedding file back as (simplex keys, flat row-major matrix).
pub fn read_embedding(reader: impl Read) -> Result<(Vec<String>, Vec<f64>, usize)> {
    let mut lines = BufReader::new(reader).lines();
    let header = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty embedding file".into(),
    })??;
    let mut it = header.split_whitespace();
    let parse_usize = |tok: Option<&str>| -> Result<usize> {
        tok.ok_or(Error::Parse {
            line: 1,
            msg: "expected `<count> <dim>`".into(),
        })?
        .parse()
        .map_err(|e| Error::Parse {
            line: 1,
            msg: format!("{e}"),
        })
    };
    let count = parse_usize(it.next())?;
    let dim = parse_usize(it.next())?;
    let mut keys = Vec::with_capacity(count);
    let mut data = Vec::with_capacity(count * dim);
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        keys.push(
            toks.next()
                .ok_or(Error::Parse {
                    line: lineno + 2,
                    msg: "missing simplex key".into(),
                })?
                .to_string(),
        );
        for tok in toks {
            data.push(tok.parse::<f64>().map_err(|e| Error::Parse {
                line: lineno + 2,
                msg: format!("{e}"),
            })?);
        }
    }
    if keys.len() != count || data.len() != count * dim {
        return Err(Error::Parse {
            line: 1,
            msg: format!(
                "header says {count} x {dim}, found {} rows and {} values",
                keys.len(),
                data.len()
            ),
        });
    }
    Ok((keys, data, dim))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walks::WalkMode;

    fn toy_corpus(walks: Vec<Vec<usize>>, n: usize) -> WalkCorpus {
        WalkCorpus {
            k: 1,
            walks_per_simplex: 1,
            walk_len: walks.first().map_or(0, |w| w.len().saturating_sub(1)),
            mode: WalkMode::Both,
            seed: 0,
            n_simplices: n,
            walks,
        }
    }

    #[test]
    fn init_model_ranges() {
        let m = init_model(3, 2, 42);
        assert!(m.input_table().iter().all(|&x| (-0.25..0.25).contains(&x)));
        assert!(m.context.iter().all(|&x| x == 0.0));
        assert_eq!(m, init_model(3, 2, 42));
        let m1 = init_model(2, 1, 7);
        assert!(m1.input_table().iter().all(|&x| (-0.5..0.5).contains(&x)));
    }

    #[test]
    fn softmax_uniform_for_identical_rows() {
        let mut m = init_model(4, 3, 0);
        let row: Vec<f64> = m.vector(0).to_vec();
        for i in 0..4 {
            m.input[i * 3..(i + 1) * 3].copy_from_slice(&row);
        }
        for s in 0..4 {
            for t in 0..4 {
                assert!((softmax_prob(&m, s, t) - 0.25).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn softmax_known_value() {
        let m = EmbeddingModel {
            n: 2,
            dim: 2,
            input: vec![1.0, 0.0, 0.0, 1.0],
            context: vec![0.0; 4],
        };
        let e = std::f64::consts::E;
        assert!((softmax_prob(&m, 0, 0) - e / (e + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn softmax_rows_sum_to_one() {
        let m = init_model(7, 4, 5);
        for s in 0..7 {
            let total: f64 = (0..7).map(|t| softmax_prob(&m, s, t)).sum();
            assert!((total - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn empty_corpus_loss_zero() {
        let m = init_model(3, 2, 0);
        let corpus = toy_corpus(vec![], 3);
        assert_eq!(full_softmax_loss(&m, &corpus, 2), 0.0);
    }

    #[test]
    fn uniform_loss_is_pairs_times_log_n() {
        let n = 5;
        let mut m = init_model(n, 2, 0);
        m.input = vec![0.1; n * 2]; // all rows identical -> uniform softmax
        let corpus = toy_corpus(vec![vec![0, 1, 2]], n);
        // window 2 covers the whole walk: 3 centers x 2 contexts = 6 pairs
        let loss = full_softmax_loss(&m, &corpus, 2);
        assert!((loss - 6.0 * (n as f64).ln()).abs() < 1e-10);
    }

    fn finite_difference(model: &EmbeddingModel, corpus: &WalkCorpus, window: usize) -> Vec<f64> {
        let h = 1e-5;
        let mut grad = vec![0.0; model.n * model.dim];
        for idx in 0..model.n * model.dim {
            let mut plus = model.clone();
            plus.input[idx] += h;
            let mut minus = model.clone();
            minus.input[idx] -= h;
            grad[idx] = (full_softmax_loss(&plus, corpus, window)
                - full_softmax_loss(&minus, corpus, window))
                / (2.0 * h);
        }
        grad
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = master_rng(13);
        for case in 0..5 {
            let n = 5;
            let d = 3;
            let mut m = init_model(n, d, case);
            // scale up so the loss surface is not flat
            m.input.iter_mut().for_each(|x| *x *= 5.0);
            let walks = vec![
                (0..5).map(|_| rng.gen_range(0..n)).collect::<Vec<_>>(),
                (0..5).map(|_| rng.gen_range(0..n)).collect::<Vec<_>>(),
            ];
            let corpus = toy_corpus(walks, n);
            let analytic = loss_gradient(&m, &corpus, 2);
            let numeric = finite_difference(&m, &corpus, 2);
            let scale = numeric
                .iter()
                .map(|g| g.abs())
                .fold(f64::MIN_POSITIVE, f64::max);
            for (a, b) in analytic.input.iter().zip(&numeric) {
                assert!(
                    (a - b).abs() / scale < 1e-5,
                    "analytic {a} vs numeric {b} (scale {scale})"
                );
            }
            assert!(analytic.context.iter().all(|&g| g == 0.0));
        }
    }

    #[test]
    fn gradient_linear_in_pair_counts() {
        let n = 4;
        let m = init_model(n, 2, 3);
        let corpus1 = toy_corpus(vec![vec![0, 1, 2, 3]], n);
        let corpus2 = toy_corpus(vec![vec![0, 1, 2, 3], vec![0, 1, 2, 3]], n);
        let g1 = loss_gradient(&m, &corpus1, 2);
        let g2 = loss_gradient(&m, &corpus2, 2);
        for (a, b) in g1.input.iter().zip(&g2.input) {
            assert!((2.0 * a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn full_softmax_training_decreases_loss() {
        let corpus = toy_corpus(vec![vec![0, 1, 0, 1], vec![2, 2, 2, 2], vec![0, 1, 1, 0]], 3);
        let hp = Hyperparams {
            dim: 2,
            window: 2,
            epochs: 10,
            lr_initial: 0.05,
            lr_final: 0.01,
            negatives: 0,
            seed: 1,
        };
        let initial = full_softmax_loss(&init_model(3, 2, 1), &corpus, 2);
        let (model, report) = train(&corpus, &hp, TrainMode::Sequential).unwrap();
        let final_loss = full_softmax_loss(&model, &corpus, 2);
        assert!(final_loss < initial, "{final_loss} !< {initial}");
        assert_eq!(report.epoch_losses.len(), 10);
    }

    #[test]
    fn sgns_training_improves_exact_loss() {
        // two 'components' that never co-occur
        let mut walks = Vec::new();
        for _ in 0..30 {
            walks.push(vec![0, 1, 0, 1, 0]);
            walks.push(vec![2, 3, 2, 3, 2]);
        }
        let corpus = toy_corpus(walks, 4);
        let hp = Hyperparams {
            dim: 4,
            window: 2,
            epochs: 5,
            negatives: 3,
            seed: 2,
            ..Hyperparams::default()
        };
        let initial = full_softmax_loss(&init_model(4, 4, 2), &corpus, 2);
        let (model, _) = train(&corpus, &hp, TrainMode::Sequential).unwrap();
        let trained = full_softmax_loss(&model, &corpus, 2);
        assert!(trained < initial, "{trained} !< {initial}");

        // disjoint contexts: intra-pair inner products beat inter-pair ones
        let intra = dot(model.vector(0), model.vector(1));
        let inter = (dot(model.vector(0), model.vector(2))
            + dot(model.vector(0), model.vector(3))
            + dot(model.vector(1), model.vector(2))
            + dot(model.vector(1), model.vector(3)))
            / 4.0;
        assert!(intra > inter, "intra {intra} inter {inter}");
    }

    #[test]
    fn sequential_training_is_reproducible() {
        let corpus = toy_corpus(vec![vec![0, 1, 2, 1, 0], vec![2, 1, 0, 1, 2]], 3);
        let hp = Hyperparams {
            dim: 3,
            window: 2,
            epochs: 2,
            seed: 8,
            ..Hyperparams::default()
        };
        let (m1, _) = train(&corpus, &hp, TrainMode::Sequential).unwrap();
        let (m2, _) = train(&corpus, &hp, TrainMode::Sequential).unwrap();
        assert_eq!(m1, m2);
    }

    #[test]
    fn parallel_training_runs_and_stays_finite() {
        let mut walks = Vec::new();
        for _ in 0..20 {
            walks.push(vec![0, 1, 2, 1, 0]);
        }
        let corpus = toy_corpus(walks, 3);
        let hp = Hyperparams {
            dim: 3,
            window: 2,
            epochs: 2,
            seed: 8,
            ..Hyperparams::default()
        };
        let (m, _) = train(&corpus, &hp, TrainMode::Parallel { workers: 4 }).unwrap();
        assert!(m.all_finite());
    }

    #[test]
    fn degenerate_corpus_is_error() {
        let corpus = toy_corpus(vec![vec![0], vec![1]], 2);
        let hp = Hyperparams::default();
        assert!(matches!(
            train(&corpus, &hp, TrainMode::Sequential),
            Err(Error::DegenerateCorpus)
        ));
    }

    #[test]
    fn token_count_matches_definition() {
        let corpus = toy_corpus(vec![vec![0, 1, 2], vec![1], vec![0, 2]], 3);
        let hp = Hyperparams {
            dim: 2,
            window: 1,
            epochs: 1,
            ..Hyperparams::default()
        };
        let (_, report) = train(&corpus, &hp, TrainMode::Sequential).unwrap();
        assert_eq!(report.token_count, 5); // 3 + 0 + 2
    }

    #[test]
    fn embedding_file_roundtrip() {
        let m = init_model(3, 2, 4);
        let simplices: Vec<Simplex> = [[0usize, 1], [0, 2], [1, 2]]
            .iter()
            .map(|vs| Simplex::new(vs.to_vec()).unwrap())
            .collect();
        let mut buf = Vec::new();
        write_embedding(&m, &simplices, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("3 2\n0-1 "));
        let (keys, data, dim) = read_embedding(buf.as_slice()).unwrap();
        assert_eq!(keys, vec!["0-1", "0-2", "1-2"]);
        assert_eq!(dim, 2);
        for (a, b) in data.iter().zip(m.input_table()) {
            assert!((a - b).abs() < 1e-8 * b.abs().max(1.0));
        }
    }
}
