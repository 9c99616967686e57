//! Clock-in-a-box Monte Carlo.
//!
//! A clock starts at `t_start` next to an atom whose decay stops it; the box
//! is opened at `t_open`. Three collapse engines sample the outcome in
//! different ways and must agree on every observable statistic.
//!
//! Randomness: each trial owns a ChaCha8 stream seeded with
//! `splitmix64(splitmix64(seed + tag·φ) + trial)`, where `tag` identifies the
//! engine and `φ = 0x9E3779B97F4A7C15`. Trials are therefore independent of
//! scheduling order and reports are bit-reproducible.

pub mod stats;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Smallest accepted `n_trials` for [`compare_engines`].
pub const MIN_TRIALS: usize = 1000;
/// Stop-time bins in the amplitude list kept by the observation engine.
pub const AMPLITUDE_BINS: usize = 60;
/// Equiprobable stop-time categories in the chi-square test.
pub const CHI_SQUARE_BINS: usize = 20;
/// Equal-width bins in reported histograms.
pub const HISTOGRAM_BINS: usize = 20;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayModel {
    half_life: f64,
}

impl DecayModel {
    pub fn new(half_life: f64) -> Result<Self> {
        if !(half_life > 0.0 && half_life.is_finite()) {
            return Err(Error::InvalidParameter(format!("half-life must be positive and finite, got {half_life}")));
        }
        Ok(Self { half_life })
    }

    pub fn half_life(&self) -> f64 {
        self.half_life
    }

    /// Decay rate `ln 2 / half_life`.
    pub fn lambda(&self) -> f64 {
        std::f64::consts::LN_2 / self.half_life
    }
}

/// Clock times are seconds since midnight, so 11:00 is 39600.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentWindow {
    t_start: f64,
    t_open: f64,
}

impl ExperimentWindow {
    pub fn new(t_start: f64, t_open: f64) -> Result<Self> {
        if !(t_start.is_finite() && t_open.is_finite()) {
            return Err(Error::NonFinite("experiment window".into()));
        }
        if !(t_open > t_start) {
            return Err(Error::InvalidParameter(format!(
                "box must open after the clock starts ({t_open} <= {t_start})"
            )));
        }
        Ok(Self { t_start, t_open })
    }

    /// Starts at 11:00 and lasts `duration` seconds.
    pub fn from_eleven(duration: f64) -> Result<Self> {
        Self::new(11.0 * 3600.0, 11.0 * 3600.0 + duration)
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_open(&self) -> f64 {
        self.t_open
    }

    pub fn duration(&self) -> f64 {
        self.t_open - self.t_start
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EngineKind {
    CollapseAtDecay,
    CollapseAtObservation,
    NestedObserver,
}

impl EngineKind {
    pub const ALL: [EngineKind; 3] =
        [EngineKind::CollapseAtDecay, EngineKind::CollapseAtObservation, EngineKind::NestedObserver];

    pub fn name(&self) -> &'static str {
        match self {
            EngineKind::CollapseAtDecay => "CollapseAtDecay",
            EngineKind::CollapseAtObservation => "CollapseAtObservation",
            EngineKind::NestedObserver => "NestedObserver",
        }
    }

    fn tag(&self) -> u64 {
        match self {
            EngineKind::CollapseAtDecay => 1,
            EngineKind::CollapseAtObservation => 2,
            EngineKind::NestedObserver => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub stopped: bool,
    pub stop_time: Option<f64>,
    /// When the engine resolves the superposition. Not observable.
    pub collapse_time_internal: Option<f64>,
}

impl TrialOutcome {
    fn running(collapse: Option<f64>) -> Self {
        Self { stopped: false, stop_time: None, collapse_time_internal: collapse }
    }

    fn stopped(at: f64, collapse: Option<f64>) -> Self {
        Self { stopped: true, stop_time: Some(at), collapse_time_internal: collapse }
    }
}

/// Closed-form law of the observable outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StopDistribution {
    pub p_stopped: f64,
    lambda: f64,
    t_start: f64,
    duration: f64,
}

impl StopDistribution {
    /// Conditional CDF of the stop time given that the clock stopped.
    pub fn cdf(&self, t: f64) -> f64 {
        let s = (t - self.t_start).clamp(0.0, self.duration);
        -(-self.lambda * s).exp_m1() / self.p_stopped
    }

    /// Inverse of [`cdf`](Self::cdf) for `u ∈ [0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let s = -(-u * self.p_stopped).ln_1p() / self.lambda;
        self.t_start + s.clamp(0.0, self.duration)
    }
}

/// `p_stopped = 1 − e^{−λ·duration}` and the truncated-exponential stop-time CDF.
pub fn analytic_stop_distribution(model: &DecayModel, window: &ExperimentWindow) -> StopDistribution {
    let lambda = model.lambda();
    StopDistribution {
        p_stopped: -(-lambda * window.duration()).exp_m1(),
        lambda,
        t_start: window.t_start(),
        duration: window.duration(),
    }
}

/// A sampler of trial outcomes. Implementations must draw all randomness from
/// `rng` so that trials are reproducible.
pub trait Engine: Sync {
    fn name(&self) -> &str;
    /// Distinguishes the engine's random substream.
    fn stream_tag(&self) -> u64;
    fn sample(&self, rng: &mut ChaCha8Rng) -> TrialOutcome;
}

/// Decay time is drawn directly; the wavefunction collapses when it happens.
struct DecayEngine {
    law: StopDistribution,
    window: ExperimentWindow,
}

impl Engine for DecayEngine {
    fn name(&self) -> &str {
        EngineKind::CollapseAtDecay.name()
    }

    fn stream_tag(&self) -> u64 {
        EngineKind::CollapseAtDecay.tag()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> TrialOutcome {
        let u: f64 = rng.random();
        let t = -(-u).ln_1p() / self.law.lambda;
        if t <= self.window.duration() {
            let at = self.window.t_start() + t;
            TrialOutcome::stopped(at, Some(at))
        } else {
            TrialOutcome::running(None)
        }
    }
}

/// Superposition of "stopped in bin k" states plus "running", carried until
/// the box is opened and resolved by the Born rule.
struct ObservationEngine {
    law: StopDistribution,
    window: ExperimentWindow,
    /// Cumulative Born weights of the stop-time bins; the remainder is "running".
    cumulative: Vec<f64>,
}

impl ObservationEngine {
    fn new(law: StopDistribution, window: ExperimentWindow) -> Self {
        let d = window.duration();
        let cumulative =
            (1..=AMPLITUDE_BINS).map(|k| -(-law.lambda * d * k as f64 / AMPLITUDE_BINS as f64).exp_m1()).collect();
        Self { law, window, cumulative }
    }

    /// Stop-time amplitudes `|c_k|²` followed by the surviving weight.
    pub fn born_weights(&self) -> Vec<f64> {
        let mut prev = 0.0;
        let mut w: Vec<f64> = self
            .cumulative
            .iter()
            .map(|&c| {
                let p = c - prev;
                prev = c;
                p
            })
            .collect();
        w.push(1.0 - prev);
        w
    }
}

impl Engine for ObservationEngine {
    fn name(&self) -> &str {
        EngineKind::CollapseAtObservation.name()
    }

    fn stream_tag(&self) -> u64 {
        EngineKind::CollapseAtObservation.tag()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> TrialOutcome {
        let (u1, u2): (f64, f64) = (rng.random(), rng.random());
        let opened = Some(self.window.t_open());
        let k = self.cumulative.partition_point(|&c| c <= u1);
        if k == AMPLITUDE_BINS {
            return TrialOutcome::running(opened);
        }
        // within-bin inverse CDF, expressed through the conditional quantile
        let p = self.law.p_stopped;
        let lo = if k == 0 { 0.0 } else { self.cumulative[k - 1] };
        let hi = self.cumulative[k];
        let at = self.law.quantile((lo + u2 * (hi - lo)) / p);
        TrialOutcome::stopped(at, opened)
    }
}

/// A friend opens the box; the outer observer later asks the friend. The
/// friend's report is drawn as stopped/running first, then the time.
struct NestedEngine {
    law: StopDistribution,
    window: ExperimentWindow,
}

impl Engine for NestedEngine {
    fn name(&self) -> &str {
        EngineKind::NestedObserver.name()
    }

    fn stream_tag(&self) -> u64 {
        EngineKind::NestedObserver.tag()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> TrialOutcome {
        let (u1, u2): (f64, f64) = (rng.random(), rng.random());
        let asked = Some(self.window.t_open());
        if u1 < self.law.p_stopped {
            TrialOutcome::stopped(self.law.quantile(u2), asked)
        } else {
            TrialOutcome::running(asked)
        }
    }
}

fn build_engine(kind: EngineKind, model: &DecayModel, window: &ExperimentWindow) -> Box<dyn Engine> {
    let law = analytic_stop_distribution(model, window);
    match kind {
        EngineKind::CollapseAtDecay => Box::new(DecayEngine { law, window: *window }),
        EngineKind::CollapseAtObservation => Box::new(ObservationEngine::new(law, *window)),
        EngineKind::NestedObserver => Box::new(NestedEngine { law, window: *window }),
    }
}

/// Born weights held by the observation engine: one per stop-time bin, then
/// the surviving weight. They sum to 1.
pub fn amplitude_list(model: &DecayModel, window: &ExperimentWindow) -> Vec<f64> {
    ObservationEngine::new(analytic_stop_distribution(model, window), *window).born_weights()
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index` in substream `tag`.
pub fn trial_seed(seed: u64, tag: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed.wrapping_add(tag.wrapping_mul(GOLDEN))).wrapping_add(index))
}

/// One trial of `engine`; deterministic in `seed`.
pub fn run_trial(engine: EngineKind, model: &DecayModel, window: &ExperimentWindow, seed: u64) -> TrialOutcome {
    build_engine(engine, model, window).sample(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// `n` trials of `engine` on the substream `(seed, engine tag)`.
pub fn run_trials(engine: &dyn Engine, n: usize, seed: u64) -> Vec<TrialOutcome> {
    let tag = engine.stream_tag();
    (0..n as u64)
        .into_par_iter()
        .map(|i| engine.sample(&mut ChaCha8Rng::seed_from_u64(trial_seed(seed, tag, i))))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub lower: f64,
    pub upper: f64,
    pub counts: Vec<u64>,
    /// Samples without a value (e.g. no collapse recorded).
    pub missing: u64,
}

impl Histogram {
    fn build(values: impl Iterator<Item = Option<f64>>, lower: f64, upper: f64, bins: usize) -> Self {
        let mut counts = vec![0u64; bins];
        let mut missing = 0;
        let width = (upper - lower) / bins as f64;
        for v in values {
            match v {
                Some(x) => {
                    let k = (((x - lower) / width).floor().max(0.0) as usize).min(bins - 1);
                    counts[k] += 1;
                }
                None => missing += 1,
            }
        }
        Self { lower, upper, counts, missing }
    }

    pub fn bin_edges(&self) -> Vec<f64> {
        let n = self.counts.len();
        (0..=n).map(|k| self.lower + (self.upper - self.lower) * k as f64 / n as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EngineSummary {
    pub engine: String,
    pub stopped: u64,
    pub p_stopped: f64,
    pub p_stopped_ci: (f64, f64),
    pub chi_square: f64,
    pub chi_square_df: usize,
    pub chi_square_p: f64,
    pub stop_time_histogram: Histogram,
    pub collapse_time_histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsComparison {
    pub a: String,
    pub b: String,
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub n_trials: usize,
    pub seed: u64,
    pub alpha: f64,
    pub half_life: f64,
    pub t_start: f64,
    pub t_open: f64,
    pub analytic_p_stopped: f64,
    /// Analytic expected counts per stop-time histogram bin.
    pub expected_stop_histogram: Vec<f64>,
    pub engines: Vec<EngineSummary>,
    pub ks: Vec<KsComparison>,
    pub pass: bool,
}

impl EquivalenceReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// Runs the three collapse engines and compares their observable statistics
/// with each other and with the analytic law.
pub fn compare_engines(
    n_trials: usize,
    model: &DecayModel,
    window: &ExperimentWindow,
    seed: u64,
    alpha: f64,
) -> Result<EquivalenceReport> {
    let engines: Vec<Box<dyn Engine>> = EngineKind::ALL.iter().map(|&k| build_engine(k, model, window)).collect();
    let refs: Vec<&dyn Engine> = engines.iter().map(|e| e.as_ref()).collect();
    compare_engines_with(&refs, n_trials, model, window, seed, alpha)
}

/// [`compare_engines`] over an arbitrary engine list.
pub fn compare_engines_with(
    engines: &[&dyn Engine],
    n_trials: usize,
    model: &DecayModel,
    window: &ExperimentWindow,
    seed: u64,
    alpha: f64,
) -> Result<EquivalenceReport> {
    if n_trials < MIN_TRIALS {
        return Err(Error::InsufficientTrials { got: n_trials, min: MIN_TRIALS });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let law = analytic_stop_distribution(model, window);
    let (t0, t1) = (window.t_start(), window.t_open());
    let n = n_trials as f64;

    // running + equiprobable conditional stop-time bins
    let mut expected = vec![n * (1.0 - law.p_stopped)];
    expected.extend(std::iter::repeat_n(n * law.p_stopped / CHI_SQUARE_BINS as f64, CHI_SQUARE_BINS));
    let edges: Vec<f64> = (1..CHI_SQUARE_BINS).map(|k| law.quantile(k as f64 / CHI_SQUARE_BINS as f64)).collect();

    let expected_stop_histogram: Vec<f64> = (0..HISTOGRAM_BINS)
        .map(|k| {
            let a = t0 + (t1 - t0) * k as f64 / HISTOGRAM_BINS as f64;
            let b = t0 + (t1 - t0) * (k + 1) as f64 / HISTOGRAM_BINS as f64;
            n * law.p_stopped * (law.cdf(b) - law.cdf(a))
        })
        .collect();

    let mut summaries = Vec::with_capacity(engines.len());
    let mut samples: Vec<Vec<f64>> = Vec::with_capacity(engines.len());
    for engine in engines {
        let outcomes = run_trials(*engine, n_trials, seed);
        let mut times: Vec<f64> = outcomes.iter().filter_map(|o| o.stop_time).collect();
        times.sort_by(f64::total_cmp);
        let stopped = times.len() as u64;

        let mut observed = vec![0u64; CHI_SQUARE_BINS + 1];
        observed[0] = n_trials as u64 - stopped;
        for &t in &times {
            observed[1 + edges.partition_point(|&e| e < t)] += 1;
        }
        let chi = stats::chi_square_statistic(&observed, &expected);
        let df = CHI_SQUARE_BINS;

        summaries.push(EngineSummary {
            engine: engine.name().to_string(),
            stopped,
            p_stopped: stopped as f64 / n,
            p_stopped_ci: stats::wilson_interval(stopped, n_trials as u64, alpha),
            chi_square: chi,
            chi_square_df: df,
            chi_square_p: stats::chi_square_p_value(chi, df),
            stop_time_histogram: Histogram::build(times.iter().map(|&t| Some(t)), t0, t1, HISTOGRAM_BINS),
            collapse_time_histogram: Histogram::build(
                outcomes.iter().map(|o| o.collapse_time_internal),
                t0,
                t1,
                HISTOGRAM_BINS,
            ),
        });
        samples.push(times);
    }

    let mut ks = Vec::new();
    for i in 0..engines.len() {
        for j in i + 1..engines.len() {
            let d = stats::ks_statistic(&samples[i], &samples[j]);
            ks.push(KsComparison {
                a: engines[i].name().to_string(),
                b: engines[j].name().to_string(),
                statistic: d,
                p_value: stats::ks_p_value(d, samples[i].len(), samples[j].len()),
            });
        }
    }

    let pass = summaries.iter().all(|s| s.chi_square_p > alpha) && ks.iter().all(|k| k.p_value > alpha);
    Ok(EquivalenceReport {
        n_trials,
        seed,
        alpha,
        half_life: model.half_life(),
        t_start: t0,
        t_open: t1,
        analytic_p_stopped: law.p_stopped,
        expected_stop_histogram,
        engines: summaries,
        ks,
        pass,
    })
}
