//! Reversibility observables.
//!
//! `P1(T)` evolves `|s><s|` (s the initial site) forward `T/2` steps, applies
//! the approximate inverse `T/2` times and reads back the population of `s`.
//! `T_irr` is the first sampled `T` from which `P1` stays within `delta` of
//! the maximally mixed value `1/N` for three consecutive samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::{AutomatonConfig, Stepper};
use crate::error::{domain, Result};
use crate::sector::SectorState;

/// Default closeness threshold for `T_irr`.
pub const DEFAULT_DELTA: f64 = 1e-4;
/// Default horizon for reproduction runs.
pub const DEFAULT_T_MAX: u64 = 2000;
/// Default spacing of sampled total times.
pub const DEFAULT_STRIDE: u64 = 2;
/// Number of consecutive samples that must sit within `delta` of `1/N`.
pub const PERSISTENCE_WINDOW: usize = 3;
/// Pairs closer than this are skipped by the contraction probe.
pub const MIN_PAIR_DISTANCE: f64 = 1e-8;

/// Outcome of the irreversibility-time search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TIrr {
    At(u64),
    NotReached,
}

impl TIrr {
    pub fn time(self) -> Option<u64> {
        match self {
            TIrr::At(t) => Some(t),
            TIrr::NotReached => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionRecord {
    pub config: AutomatonConfig,
    pub times: Vec<u64>,
    pub p1_values: Vec<f64>,
    pub t_irr: TIrr,
    pub delta: f64,
    pub t_max: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    pub config: AutomatonConfig,
    pub sample_count: usize,
    /// Pairs that were far enough apart to contribute a ratio.
    pub evaluated: usize,
    /// Largest `D(step(a), step(b)) / D(a, b)` seen.
    pub max_ratio: f64,
    pub seed: u64,
}

fn check_even(name: &str, t: u64) -> Result<()> {
    if !t.is_multiple_of(2) {
        return domain(format!("{name} = {t} must be even"));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !delta.is_finite() || delta <= 0.0 {
        return domain(format!("delta = {delta} must be positive"));
    }
    Ok(())
}

/// `P1(T)` for one even total time.
pub fn return_probability(config: &AutomatonConfig, total_time: u64) -> Result<f64> {
    check_even("total time", total_time)?;
    let stepper = Stepper::new(config)?;
    let mut rho = config.initial_state();
    for _ in 0..total_time / 2 {
        stepper.forward_in_place(&mut rho)?;
    }
    for _ in 0..total_time / 2 {
        stepper.inverse_in_place(&mut rho)?;
    }
    rho.fidelity_with_pure(config.initial_site())
}

/// Yields `(T, P1(T))` for `T = 0, stride, 2 stride, ...`.
///
/// The forward half is carried along between samples (it is the same
/// sequence of operations a fresh run performs), the inverse half is
/// always recomputed from scratch.
struct ReturnSweep {
    stepper: Stepper,
    forward: SectorState,
    half: u64,
    half_stride: u64,
    site: usize,
}

impl ReturnSweep {
    fn new(config: &AutomatonConfig, stride: u64) -> Result<Self> {
        Ok(Self {
            stepper: Stepper::new(config)?,
            forward: config.initial_state(),
            half: 0,
            half_stride: stride / 2,
            site: config.initial_site(),
        })
    }

    fn next_point(&mut self) -> Result<(u64, f64)> {
        let mut back = self.forward.clone();
        for _ in 0..self.half {
            self.stepper.inverse_in_place(&mut back)?;
        }
        let point = (2 * self.half, back.fidelity_with_pure(self.site)?);
        for _ in 0..self.half_stride {
            self.stepper.forward_in_place(&mut self.forward)?;
        }
        self.half += self.half_stride;
        Ok(point)
    }
}

/// Index of the first sample opening a run of [`PERSISTENCE_WINDOW`] values
/// within `delta` of `target`. The whole window must be sampled.
pub fn first_persistent(values: &[f64], target: f64, delta: f64) -> Option<usize> {
    values
        .windows(PERSISTENCE_WINDOW)
        .position(|w| w.iter().all(|v| (v - target).abs() <= delta))
}

/// Smallest even `T <= t_max` at which `P1` settles within `delta` of `1/N`.
pub fn irreversibility_time(config: &AutomatonConfig, delta: f64, t_max: u64) -> Result<TIrr> {
    check_delta(delta)?;
    check_even("t_max", t_max)?;
    let target = 1.0 / config.n_sites() as f64;
    let mut sweep = ReturnSweep::new(config, 2)?;
    let mut run = 0usize;
    let mut start = 0u64;
    loop {
        let (t, p1) = sweep.next_point()?;
        if t > t_max {
            return Ok(TIrr::NotReached);
        }
        if (p1 - target).abs() <= delta {
            if run == 0 {
                start = t;
            }
            run += 1;
            if run == PERSISTENCE_WINDOW {
                return Ok(TIrr::At(start));
            }
        } else {
            run = 0;
        }
    }
}

/// `P1` sampled at `0, stride, ..., <= t_max`, with `T_irr` located on the
/// sampled grid using [`DEFAULT_DELTA`].
pub fn reversibility_curve(
    config: &AutomatonConfig,
    t_max: u64,
    stride: u64,
) -> Result<EvolutionRecord> {
    reversibility_curve_with_delta(config, t_max, stride, DEFAULT_DELTA)
}

pub fn reversibility_curve_with_delta(
    config: &AutomatonConfig,
    t_max: u64,
    stride: u64,
    delta: f64,
) -> Result<EvolutionRecord> {
    check_delta(delta)?;
    check_even("t_max", t_max)?;
    if stride < 2 {
        return domain(format!("stride = {stride} must be at least 2"));
    }
    check_even("stride", stride)?;
    let mut sweep = ReturnSweep::new(config, stride)?;
    let count = (t_max / stride + 1) as usize;
    let mut times = Vec::with_capacity(count);
    let mut p1_values = Vec::with_capacity(count);
    for _ in 0..count {
        let (t, p1) = sweep.next_point()?;
        times.push(t);
        p1_values.push(p1);
    }
    let target = 1.0 / config.n_sites() as f64;
    let t_irr = match first_persistent(&p1_values, target, delta) {
        Some(k) => TIrr::At(times[k]),
        None => TIrr::NotReached,
    };
    Ok(EvolutionRecord {
        config: *config,
        times,
        p1_values,
        t_irr,
        delta,
        t_max,
    })
}

/// `D(step(I/N), I/N)`.
pub fn fixed_point_residual(config: &AutomatonConfig) -> Result<f64> {
    let mixed = SectorState::maximally_mixed(config.n_sites())?;
    let mut out = mixed.clone();
    Stepper::new(config)?.forward_in_place(&mut out)?;
    out.trace_distance(&mixed)
}

/// Largest one-step trace-distance ratio over `sample_count` random pairs.
///
/// Pair `k` uses the `2k`-th and `2k+1`-th draws of a ChaCha8 stream seeded
/// by `seed` as the seeds of its two states.
pub fn contraction_probe(
    config: &AutomatonConfig,
    sample_count: usize,
    seed: u64,
) -> Result<ContractionReport> {
    if sample_count == 0 {
        return domain("contraction probe needs at least one sample");
    }
    let n = config.n_sites();
    let stepper = Stepper::new(config)?;
    let mut seeds = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio = 0.0f64;
    let mut evaluated = 0;
    for _ in 0..sample_count {
        let a = SectorState::random(n, seeds.random())?;
        let b = SectorState::random(n, seeds.random())?;
        let before = a.trace_distance(&b)?;
        if before <= MIN_PAIR_DISTANCE {
            continue;
        }
        let (mut fa, mut fb) = (a, b);
        stepper.forward_in_place(&mut fa)?;
        stepper.forward_in_place(&mut fb)?;
        max_ratio = max_ratio.max(fa.trace_distance(&fb)? / before);
        evaluated += 1;
    }
    Ok(ContractionReport {
        config: *config,
        sample_count,
        evaluated,
        max_ratio,
        seed,
    })
}
