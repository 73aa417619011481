//! Event-driven M/M/n simulation.
//!
//! Random numbers come from ChaCha8 (`rand_chacha`), seeded with
//! `seed_from_u64(seed)` and one stream per replication (`set_stream`), so a given
//! `(seed, stream)` reproduces the same estimate on every platform. Interarrival
//! and service times are drawn with `rand_distr::Exp`.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

pub const DEFAULT_BATCHES: u32 = 32;

/// Inputs of one simulation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub n: u32,
    pub lambda: f64,
    pub mu: f64,
    pub warmup_arrivals: u64,
    pub measured_arrivals: u64,
    pub seed: u64,
    pub batches: u32,
}

impl SimConfig {
    /// Config with the default warmup `ceil(10 n / (1 - rho))` and 32 batches.
    pub fn new(n: u32, lambda: f64, mu: f64, measured_arrivals: u64, seed: u64) -> Self {
        Self {
            n,
            lambda,
            mu,
            warmup_arrivals: default_warmup(n, lambda, mu),
            measured_arrivals,
            seed,
            batches: DEFAULT_BATCHES,
        }
    }

    /// Offered load `lambda / mu`.
    pub fn offered_load(&self) -> f64 {
        self.lambda / self.mu
    }

    pub fn rho(&self) -> f64 {
        self.lambda / (self.n as f64 * self.mu)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("need at least one server".into()));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite())
            || !(self.mu > 0.0 && self.mu.is_finite())
        {
            return Err(Error::Config(format!(
                "rates must be positive and finite (lambda = {}, mu = {})",
                self.lambda, self.mu
            )));
        }
        if !(self.rho() < 1.0) {
            return Err(Error::Config(format!(
                "unstable system: a = lambda/mu = {} must be below n = {}",
                self.offered_load(),
                self.n
            )));
        }
        if self.batches < 10 {
            return Err(Error::Config(format!(
                "need at least 10 batches, got {}",
                self.batches
            )));
        }
        if self.warmup_arrivals == 0 || self.measured_arrivals < self.batches as u64 {
            return Err(Error::Config(format!(
                "warmup must be positive and measured arrivals at least the batch count \
                 (warmup = {}, measured = {}, batches = {})",
                self.warmup_arrivals, self.measured_arrivals, self.batches
            )));
        }
        Ok(())
    }
}

fn default_warmup(n: u32, lambda: f64, mu: f64) -> u64 {
    let rho = lambda / (n as f64 * mu);
    if rho > 0.0 && rho < 1.0 {
        // The small offset keeps exact quotients such as 250 from rounding up.
        (10.0 * n as f64 / (1.0 - rho) - 1e-9).ceil() as u64
    } else {
        1
    }
}

/// Estimated waiting probability with a 95% batch-means confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub p_wait: f64,
    pub ci_halfwidth: f64,
    pub batches: u32,
}

impl SimEstimate {
    pub fn covers(&self, value: f64) -> bool {
        (self.p_wait - value).abs() <= self.ci_halfwidth
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum EventKind {
    // Declaration order is the tie-break: arrivals first at equal timestamps.
    Arrival,
    Departure,
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    kind: EventKind,
    seq: u64,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.kind.cmp(&other.kind))
            .then(self.seq.cmp(&other.seq))
    }
}

fn run(cfg: &SimConfig, stream: u64) -> Result<SimEstimate> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let interarrival = Exp::new(cfg.lambda).map_err(|e| Error::Config(e.to_string()))?;
    let service = Exp::new(cfg.mu).map_err(|e| Error::Config(e.to_string()))?;

    let total = cfg.warmup_arrivals + cfg.measured_arrivals;
    let batches = cfg.batches as u64;
    let mut waited_in_batch = vec![0u64; cfg.batches as usize];
    let mut size_of_batch = vec![0u64; cfg.batches as usize];

    let mut queue: BinaryHeap<Reverse<Event>> = BinaryHeap::with_capacity(cfg.n as usize + 2);
    let mut seq = 0u64;
    let mut push = |queue: &mut BinaryHeap<Reverse<Event>>, time: f64, kind: EventKind| {
        queue.push(Reverse(Event { time, kind, seq }));
        seq += 1;
    };
    push(&mut queue, rng.sample(interarrival), EventKind::Arrival);

    let mut busy = 0u32;
    let mut waiting = 0u64;
    let mut arrivals = 0u64;
    while let Some(Reverse(event)) = queue.pop() {
        match event.kind {
            EventKind::Arrival => {
                let all_busy = busy == cfg.n;
                if arrivals >= cfg.warmup_arrivals {
                    let idx = arrivals - cfg.warmup_arrivals;
                    let batch = (idx * batches / cfg.measured_arrivals) as usize;
                    size_of_batch[batch] += 1;
                    waited_in_batch[batch] += all_busy as u64;
                }
                arrivals += 1;
                if all_busy {
                    waiting += 1;
                } else {
                    busy += 1;
                    push(
                        &mut queue,
                        event.time + rng.sample(service),
                        EventKind::Departure,
                    );
                }
                if arrivals == total {
                    break;
                }
                push(
                    &mut queue,
                    event.time + rng.sample(interarrival),
                    EventKind::Arrival,
                );
            }
            EventKind::Departure => {
                if waiting > 0 {
                    waiting -= 1;
                    push(
                        &mut queue,
                        event.time + rng.sample(service),
                        EventKind::Departure,
                    );
                } else {
                    busy -= 1;
                }
            }
        }
    }

    let waited: u64 = waited_in_batch.iter().sum();
    let p_wait = waited as f64 / cfg.measured_arrivals as f64;
    let means: Vec<f64> = waited_in_batch
        .iter()
        .zip(&size_of_batch)
        .map(|(&w, &m)| w as f64 / m as f64)
        .collect();
    let k = means.len() as f64;
    let mean = means.iter().sum::<f64>() / k;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (k - 1.0);
    let t = StudentsT::new(0.0, 1.0, k - 1.0)
        .map_err(|e| Error::Config(e.to_string()))?
        .inverse_cdf(0.975);
    Ok(SimEstimate {
        p_wait,
        ci_halfwidth: t * (var / k).sqrt(),
        batches: cfg.batches,
    })
}

/// Runs one replication on stream 0 of `cfg.seed`.
pub fn simulate_mmn(cfg: &SimConfig) -> Result<SimEstimate> {
    run(cfg, 0)
}

/// Runs `count` independent replications on streams `0..count` of `cfg.seed`,
/// in parallel, returned in stream order.
pub fn simulate_replications(cfg: &SimConfig, count: usize) -> Result<Vec<SimEstimate>> {
    cfg.validate()?;
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(count.max(1));
    let mut results: Vec<Option<Result<SimEstimate>>> = (0..count).map(|_| None).collect();
    std::thread::scope(|scope| {
        for (w, chunk) in results
            .chunks_mut(count.div_ceil(workers).max(1))
            .enumerate()
        {
            let base = w * count.div_ceil(workers).max(1);
            scope.spawn(move || {
                for (i, slot) in chunk.iter_mut().enumerate() {
                    *slot = Some(run(cfg, (base + i) as u64));
                }
            });
        }
    });
    results
        .into_iter()
        .map(|r| r.expect("every slot is filled"))
        .collect()
}
