//! Full experiments: which stage each photon is detected at, the resulting
//! joint state, ±1 correlations, CHSH scores and seeded detection sampling.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::angle::Angle;
use crate::optics::{restore_pipeline, stage1_pipeline, stage3_pipeline, StagePipeline};
use crate::state::{make_entangled_source, JointState, Letter, Mode, Side};

/// Events drawn per independently seeded block in [`sample_events`].
pub const SAMPLE_BLOCK: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("sweep grid is empty")]
    EmptyGrid,
    #[error("sample count must be at least 1")]
    NoSamples,
}

/// Where a photon is detected: after the first or the third stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    One,
    Three,
}

impl Stage {
    pub fn number(self) -> u8 {
        match self {
            Stage::One => 1,
            Stage::Three => 3,
        }
    }

    pub fn from_number(n: u64) -> Option<Stage> {
        match n {
            1 => Some(Stage::One),
            3 => Some(Stage::Three),
            _ => None,
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl Serialize for Stage {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.number())
    }
}

/// The experimenters' choices: the two phases on R's `b′` arm and the
/// detection stage of each photon. Only R carries phase shifters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario {
    /// Stage-1 phase φ.
    pub phi1: Angle,
    /// Stage-3 phase ϕ.
    pub phi3: Angle,
    pub detect_l: Stage,
    pub detect_r: Stage,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            phi1: Angle::ZERO,
            phi3: Angle::ZERO,
            detect_l: Stage::One,
            detect_r: Stage::One,
        }
    }
}

impl Scenario {
    pub fn new(phi1: Angle, phi3: Angle, detect_l: Stage, detect_r: Stage) -> Self {
        Scenario {
            phi1,
            phi3,
            detect_l,
            detect_r,
        }
    }

    pub fn detect(&self, side: Side) -> Stage {
        match side {
            Side::L => self.detect_l,
            Side::R => self.detect_r,
        }
    }

    /// Per-photon pipelines up to each photon's detection stage.
    pub fn pipelines(&self) -> (StagePipeline, StagePipeline) {
        let (l1, r1) = stage1_pipeline(self.phi1);
        let (l3, r3) = stage3_pipeline(self.phi3);
        let extend = |first: StagePipeline, side: Side, third: StagePipeline| match self.detect(side) {
            Stage::One => first,
            Stage::Three => first
                .then(&restore_pipeline(side))
                .and_then(|p| p.then(&third))
                .expect("stage pipelines compose"),
        };
        (extend(l1, Side::L, l3), extend(r1, Side::R, r3))
    }
}

/// Joint state at the two detection surfaces chosen by `s`.
pub fn run_scenario(s: &Scenario) -> JointState {
    let (left, right) = s.pipelines();
    left.apply(&make_entangled_source())
        .and_then(|st| right.apply(&st))
        .expect("scenario pipelines match the source layers")
}

/// ±1 value of a detection: `c, e` (and primed) are +1, `d, f` are −1.
pub fn outcome_sign(letter: Letter) -> f64 {
    if letter.index() == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `E = Σ sign(L)·sign(R)·P(L, R)` over the joint distribution of `s`.
pub fn correlation(s: &Scenario) -> f64 {
    run_scenario(s)
        .joint_probabilities()
        .iter()
        .map(|((l, r), p)| outcome_sign(l.letter) * outcome_sign(r.letter) * p)
        .sum()
}

/// `S = E(φ₁,ϕ₁) + E(φ₁,ϕ₂) + E(φ₂,ϕ₁) − E(φ₂,ϕ₂)` with L detected after
/// stage 1 and R after stage 3.
pub fn chsh(phi1_a: Angle, phi1_b: Angle, phi3_a: Angle, phi3_b: Angle) -> f64 {
    let e = |phi1, phi3| correlation(&Scenario::new(phi1, phi3, Stage::One, Stage::Three));
    e(phi1_a, phi3_a) + e(phi1_a, phi3_b) + e(phi1_b, phi3_a) - e(phi1_b, phi3_b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DetectionRecord {
    pub outcome_l: Mode,
    pub outcome_r: Mode,
    pub count: u64,
}

struct Sampler {
    outcomes: Vec<(Mode, Mode)>,
    cumulative: Vec<f64>,
    fallback: usize,
}

impl Sampler {
    fn new(state: &JointState) -> Self {
        let dist = state.joint_probabilities();
        let mut outcomes = Vec::with_capacity(dist.len());
        let mut cumulative = Vec::with_capacity(dist.len());
        let mut acc = 0.0;
        let mut fallback = 0;
        for (i, (&pair, p)) in dist.iter().enumerate() {
            acc += p;
            outcomes.push(pair);
            cumulative.push(acc);
            if p > 0.0 {
                fallback = i;
            }
        }
        Sampler {
            outcomes,
            cumulative,
            fallback,
        }
    }

    fn draw(&self, rng: &mut ChaCha20Rng) -> usize {
        let u: f64 = rng.random();
        self.cumulative.iter().position(|&c| u < c).unwrap_or(self.fallback)
    }

    fn block_rng(seed: u64, block: usize) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(block as u64);
        rng
    }

    fn blocks(n: usize) -> impl IndexedParallelIterator<Item = (usize, usize)> {
        let count = n.div_ceil(SAMPLE_BLOCK);
        (0..count)
            .into_par_iter()
            .map(move |b| (b, SAMPLE_BLOCK.min(n - b * SAMPLE_BLOCK)))
    }
}

/// `n` detection events in draw order.
///
/// Draws use ChaCha20 keyed by `seed`; event block `k` (of
/// [`SAMPLE_BLOCK`] events) runs on stream `k`, so the sequence does not
/// depend on thread count. Each event is chosen by inverse CDF over the
/// joint distribution in (L mode, R mode) order.
pub fn sample_outcomes(s: &Scenario, n: usize, seed: u64) -> Result<Vec<(Mode, Mode)>, ScenarioError> {
    if n == 0 {
        return Err(ScenarioError::NoSamples);
    }
    let sampler = Sampler::new(&run_scenario(s));
    let blocks: Vec<Vec<(Mode, Mode)>> = Sampler::blocks(n)
        .map(|(b, len)| {
            let mut rng = Sampler::block_rng(seed, b);
            (0..len).map(|_| sampler.outcomes[sampler.draw(&mut rng)]).collect()
        })
        .collect();
    Ok(blocks.concat())
}

/// Outcome counts of `n` draws, one record per outcome in the support
/// (zero counts included), in (L mode, R mode) order. Same draws as
/// [`sample_outcomes`].
pub fn sample_events(s: &Scenario, n: usize, seed: u64) -> Result<Vec<DetectionRecord>, ScenarioError> {
    if n == 0 {
        return Err(ScenarioError::NoSamples);
    }
    let sampler = Sampler::new(&run_scenario(s));
    let k = sampler.outcomes.len();
    let counts = Sampler::blocks(n)
        .map(|(b, len)| {
            let mut rng = Sampler::block_rng(seed, b);
            let mut counts = vec![0u64; k];
            for _ in 0..len {
                counts[sampler.draw(&mut rng)] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; k],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(sampler
        .outcomes
        .iter()
        .zip(counts)
        .map(|(&(outcome_l, outcome_r), count)| DetectionRecord {
            outcome_l,
            outcome_r,
            count,
        })
        .collect())
}

/// Which phase a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Phi1,
    Phi3,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Phi1 => "phi1",
            SweepAxis::Phi3 => "phi3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationRow {
    pub phi1: Angle,
    pub phi3: Angle,
    pub e: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationTable {
    pub rows: Vec<CorrelationRow>,
}

/// Correlation at each grid value of `axis`, other settings taken from `template`.
pub fn sweep(axis: SweepAxis, grid: &[Angle], template: &Scenario) -> Result<CorrelationTable, ScenarioError> {
    if grid.is_empty() {
        return Err(ScenarioError::EmptyGrid);
    }
    let rows = grid
        .par_iter()
        .map(|&value| {
            let mut s = *template;
            match axis {
                SweepAxis::Phi1 => s.phi1 = value,
                SweepAxis::Phi3 => s.phi3 = value,
            }
            CorrelationRow {
                phi1: s.phi1,
                phi3: s.phi3,
                e: correlation(&s),
            }
        })
        .collect();
    Ok(CorrelationTable { rows })
}

/// Probability table with the detection-stage letters folded onto
/// first-stage names (`e→c`, `f→d`), handy for comparing stage-1 and
/// stage-3 detection.
pub fn stage_folded_probabilities(state: &JointState) -> BTreeMap<(usize, usize), f64> {
    state
        .joint_probabilities()
        .iter()
        .map(|((l, r), p)| ((l.letter.index(), r.letter.index()), p))
        .collect()
}
