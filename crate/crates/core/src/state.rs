//! Two-photon path states.
//!
//! Each photon occupies one of two spatial modes in the current layer of the
//! interferometer. A [`JointState`] is a sparse amplitude table over
//! (L-mode, R-mode) pairs; the L and R photons may sit in different layers,
//! e.g. when L is detected after the first stage and R after the third.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::angle::Angle;

/// Complex probability amplitude.
pub type ComplexAmp = Complex64;

/// Tolerance on Σ|amp|² for anything handed out as a valid state.
pub const NORM_TOLERANCE: f64 = 1e-9;
/// Tolerance on ‖U·U† − I‖ for matrices accepted by
/// [`JointState::apply_single_side_unitary`].
pub const UNITARITY_TOLERANCE: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::L => Side::R,
            Side::R => Side::L,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::L => "L",
            Side::R => "R",
        })
    }
}

/// Path letter. The R photon's modes are the primed versions of the same letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Letter {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl Letter {
    pub fn layer(self) -> Layer {
        match self {
            Letter::A | Letter::B => Layer::Source,
            Letter::C | Letter::D => Layer::Stage1,
            Letter::E | Letter::F => Layer::Stage3,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
            Letter::C => 'c',
            Letter::D => 'd',
            Letter::E => 'e',
            Letter::F => 'f',
        }
    }

    /// Index within its layer: 0 for a/c/e, 1 for b/d/f.
    pub fn index(self) -> usize {
        match self {
            Letter::A | Letter::C | Letter::E => 0,
            Letter::B | Letter::D | Letter::F => 1,
        }
    }
}

/// A pair of path letters that a photon can occupy at one point of the apparatus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Layer {
    /// `a, b`: source output, also the output of the restore stage.
    Source,
    /// `c, d`: first-stage beam-splitter outputs.
    Stage1,
    /// `e, f`: third-stage beam-splitter outputs.
    Stage3,
}

impl Layer {
    pub fn letters(self) -> [Letter; 2] {
        match self {
            Layer::Source => [Letter::A, Letter::B],
            Layer::Stage1 => [Letter::C, Letter::D],
            Layer::Stage3 => [Letter::E, Letter::F],
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y] = self.letters();
        write!(f, "{{{},{}}}", x.as_char(), y.as_char())
    }
}

/// A labelled spatial mode; R-side modes print primed (`c'`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mode {
    pub letter: Letter,
    pub side: Side,
}

impl Mode {
    pub const fn new(letter: Letter, side: Side) -> Mode {
        Mode { letter, side }
    }
    pub const fn l(letter: Letter) -> Mode {
        Mode::new(letter, Side::L)
    }
    pub const fn r(letter: Letter) -> Mode {
        Mode::new(letter, Side::R)
    }
    pub fn layer(self) -> Layer {
        self.letter.layer()
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter.as_char())?;
        if self.side == Side::R {
            write!(f, "'")?;
        }
        Ok(())
    }
}

impl Serialize for Mode {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for Mode {
    type Err = StateError;

    fn from_str(s: &str) -> Result<Mode, StateError> {
        let mut chars = s.chars();
        let letter = match chars.next() {
            Some('a') => Letter::A,
            Some('b') => Letter::B,
            Some('c') => Letter::C,
            Some('d') => Letter::D,
            Some('e') => Letter::E,
            Some('f') => Letter::F,
            _ => return Err(StateError::UnknownMode(s.to_string())),
        };
        let side = match chars.as_str() {
            "" => Side::L,
            "'" | "′" => Side::R,
            _ => return Err(StateError::UnknownMode(s.to_string())),
        };
        Ok(Mode::new(letter, side))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StateError {
    #[error("mode {mode} is not in the active layer {active} of side {}", mode.side)]
    LayerMismatch { mode: Mode, active: Layer },
    #[error("side {side} is in layer {active}, operation expects {expected}")]
    SideLayerMismatch { side: Side, expected: Layer, active: Layer },
    #[error("matrix is not unitary: max |U·U† − I| = {deviation:e}")]
    NotUnitary { deviation: f64 },
    #[error("state is not normalized: Σ|amp|² = {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },
    #[error("amplitude for ({0}, {1}) is not finite")]
    NonFinite(Mode, Mode),
    #[error("pair ({0}, {1}) must list an L mode then an R mode")]
    WrongSide(Mode, Mode),
    #[error("side {0} mixes modes from different layers")]
    MixedLayers(Side),
    #[error("state has no amplitudes")]
    Empty,
    #[error("states are supported on different layers")]
    SupportMismatch,
    #[error("unknown mode `{0}`")]
    UnknownMode(String),
    #[error("distribution sums to {total}, not 1")]
    DistributionNotNormalized { total: f64 },
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),
}

/// Outcome probabilities; entries in `[0,1]` summing to 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution<K: Ord> {
    probabilities: BTreeMap<K, f64>,
}

impl<K: Ord + Clone> Distribution<K> {
    pub fn new(probabilities: BTreeMap<K, f64>) -> Result<Self, StateError> {
        // rounding can push |amp|² a hair past 1
        const SLACK: f64 = 1e-12;
        for &p in probabilities.values() {
            if !(-SLACK..=1.0 + SLACK).contains(&p) {
                return Err(StateError::ProbabilityOutOfRange(p));
            }
        }
        let total: f64 = probabilities.values().sum();
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(StateError::DistributionNotNormalized { total });
        }
        Ok(Distribution { probabilities })
    }

    /// Probability of `key`; zero for outcomes outside the support.
    pub fn get(&self, key: &K) -> f64 {
        self.probabilities.get(key).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, f64)> + '_ {
        self.probabilities.iter().map(|(k, &p)| (k, p))
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probabilities.values().sum()
    }

    pub fn as_map(&self) -> &BTreeMap<K, f64> {
        &self.probabilities
    }
}

/// A single-side 2×2 linear map between two layers.
///
/// `entries[out][in]` is the amplitude for `input.letters()[in]` to go to
/// `output.letters()[out]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeMatrix {
    pub input: Layer,
    pub output: Layer,
    pub entries: [[Complex64; 2]; 2],
}

impl ModeMatrix {
    pub fn new(input: Layer, output: Layer, entries: [[Complex64; 2]; 2]) -> Self {
        ModeMatrix { input, output, entries }
    }

    /// Max entrywise |U·U† − I|.
    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.entries)
    }

    /// Conjugate transpose, mapping `output` back to `input`.
    pub fn adjoint(&self) -> ModeMatrix {
        ModeMatrix {
            input: self.output,
            output: self.input,
            entries: adjoint(&self.entries),
        }
    }
}

pub type Matrix2 = [[Complex64; 2]; 2];

pub fn mat_mul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn adjoint(m: &Matrix2) -> Matrix2 {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}

pub fn unitarity_deviation(m: &Matrix2) -> f64 {
    let p = mat_mul(m, &adjoint(m));
    let mut dev: f64 = 0.0;
    for (i, row) in p.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let target = if i == j { Complex64::new(1.0, 0.0) } else { ZERO };
            dev = dev.max((v - target).norm());
        }
    }
    if dev.is_nan() {
        f64::INFINITY
    } else {
        dev
    }
}

/// Normalized two-photon amplitude table.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    layer_l: Layer,
    layer_r: Layer,
    amplitudes: BTreeMap<(Mode, Mode), ComplexAmp>,
}

impl JointState {
    /// Builds a state from `(L mode, R mode) → amplitude` entries, checking
    /// sides, layers, finiteness and normalization.
    pub fn new<I>(entries: I) -> Result<Self, StateError>
    where
        I: IntoIterator<Item = ((Mode, Mode), ComplexAmp)>,
    {
        let state = Self::new_unchecked(entries)?;
        state.validate()?;
        Ok(state)
    }

    /// Like [`JointState::new`] but skips the normalization and finiteness
    /// checks. Structural checks (sides and layers) still apply.
    pub fn new_unchecked<I>(entries: I) -> Result<Self, StateError>
    where
        I: IntoIterator<Item = ((Mode, Mode), ComplexAmp)>,
    {
        let mut amplitudes = BTreeMap::new();
        let mut layer_l = None;
        let mut layer_r = None;
        for ((l, r), amp) in entries {
            if l.side != Side::L || r.side != Side::R {
                return Err(StateError::WrongSide(l, r));
            }
            if *layer_l.get_or_insert(l.layer()) != l.layer() {
                return Err(StateError::MixedLayers(Side::L));
            }
            if *layer_r.get_or_insert(r.layer()) != r.layer() {
                return Err(StateError::MixedLayers(Side::R));
            }
            *amplitudes.entry((l, r)).or_insert(ZERO) += amp;
        }
        match (layer_l, layer_r) {
            (Some(layer_l), Some(layer_r)) => Ok(JointState {
                layer_l,
                layer_r,
                amplitudes,
            }),
            _ => Err(StateError::Empty),
        }
    }

    pub fn validate(&self) -> Result<(), StateError> {
        for (&(l, r), amp) in &self.amplitudes {
            if !amp.re.is_finite() || !amp.im.is_finite() {
                return Err(StateError::NonFinite(l, r));
            }
        }
        let norm_sqr = self.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(StateError::NotNormalized { norm_sqr });
        }
        Ok(())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn layer(&self, side: Side) -> Layer {
        match side {
            Side::L => self.layer_l,
            Side::R => self.layer_r,
        }
    }

    /// Amplitude of `(l, r)`; zero when the pair is absent.
    pub fn amplitude(&self, l: Mode, r: Mode) -> ComplexAmp {
        self.amplitudes.get(&(l, r)).copied().unwrap_or(ZERO)
    }

    pub fn amplitudes(&self) -> impl Iterator<Item = ((Mode, Mode), ComplexAmp)> + '_ {
        self.amplitudes.iter().map(|(&k, &v)| (k, v))
    }

    /// Number of stored entries, zeros included.
    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Multiplies every amplitude whose `target.side` entry equals `target` by `e^{i·angle}`.
    pub fn apply_phase(&self, target: Mode, angle: Angle) -> Result<JointState, StateError> {
        let active = self.layer(target.side);
        if target.layer() != active {
            return Err(StateError::LayerMismatch { mode: target, active });
        }
        let factor = angle.cis();
        let amplitudes = self
            .amplitudes
            .iter()
            .map(|(&(l, r), &amp)| {
                let hit = match target.side {
                    Side::L => l == target,
                    Side::R => r == target,
                };
                ((l, r), if hit { amp * factor } else { amp })
            })
            .collect();
        Ok(JointState {
            amplitudes,
            ..self.clone()
        })
    }

    /// Applies a 2×2 unitary to one photon, moving that side to `matrix.output`.
    pub fn apply_single_side_unitary(&self, side: Side, matrix: &ModeMatrix) -> Result<JointState, StateError> {
        let deviation = matrix.unitarity_deviation();
        if deviation > UNITARITY_TOLERANCE {
            return Err(StateError::NotUnitary { deviation });
        }
        let active = self.layer(side);
        if active != matrix.input {
            return Err(StateError::SideLayerMismatch {
                side,
                expected: matrix.input,
                active,
            });
        }
        let outputs = matrix.output.letters();
        let mut amplitudes: BTreeMap<(Mode, Mode), ComplexAmp> = BTreeMap::new();
        for (&(l, r), &amp) in &self.amplitudes {
            let moving = if side == Side::L { l } else { r };
            let col = moving.letter.index();
            for (row, &letter) in outputs.iter().enumerate() {
                let out = Mode::new(letter, side);
                let key = if side == Side::L { (out, r) } else { (l, out) };
                *amplitudes.entry(key).or_insert(ZERO) += matrix.entries[row][col] * amp;
            }
        }
        let (layer_l, layer_r) = match side {
            Side::L => (matrix.output, self.layer_r),
            Side::R => (self.layer_l, matrix.output),
        };
        Ok(JointState {
            layer_l,
            layer_r,
            amplitudes,
        })
    }

    /// Born-rule probabilities of every stored (L, R) pair.
    pub fn joint_probabilities(&self) -> Distribution<(Mode, Mode)> {
        let map = self.amplitudes.iter().map(|(&k, a)| (k, a.norm_sqr())).collect();
        Distribution::new(map).expect("JointState invariant: normalized")
    }

    /// Single-photon outcome probabilities on `side`.
    pub fn marginal(&self, side: Side) -> Distribution<Mode> {
        let mut map: BTreeMap<Mode, f64> = self
            .layer(side)
            .letters()
            .iter()
            .map(|&letter| (Mode::new(letter, side), 0.0))
            .collect();
        for (&(l, r), a) in &self.amplitudes {
            let m = if side == Side::L { l } else { r };
            *map.entry(m).or_insert(0.0) += a.norm_sqr();
        }
        Distribution::new(map).expect("JointState invariant: normalized")
    }

    /// Inner product ⟨self|other⟩.
    pub fn overlap(&self, other: &JointState) -> Result<ComplexAmp, StateError> {
        if self.layer_l != other.layer_l || self.layer_r != other.layer_r {
            return Err(StateError::SupportMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .filter_map(|(k, a)| other.amplitudes.get(k).map(|b| a.conj() * b))
            .sum())
    }

    /// True iff `|⟨self|other⟩| ≥ 1 − tol`. States on different layers are never equal.
    pub fn equal_up_to_global_phase(&self, other: &JointState, tol: f64) -> bool {
        self.overlap(other).map(|o| o.norm() >= 1.0 - tol).unwrap_or(false)
    }

    /// Multiplies every amplitude by `factor` (a global phase when `|factor| = 1`).
    pub fn scaled(&self, factor: Complex64) -> JointState {
        JointState {
            amplitudes: self.amplitudes.iter().map(|(&k, &a)| (k, a * factor)).collect(),
            ..self.clone()
        }
    }

    /// Global phase fixed so the first amplitude with modulus above 1e-12
    /// (in (L mode, R mode) order) is real and positive.
    pub fn canonical(&self) -> JointState {
        match self.amplitudes.values().find(|a| a.norm() > 1e-12) {
            Some(first) => {
                let rotation = first.conj() / first.norm();
                let mut out = self.scaled(rotation);
                // the pivot is real by construction; drop the rounding residue
                if let Some(a) = out.amplitudes.values_mut().find(|a| a.norm() > 1e-12) {
                    a.im = 0.0;
                }
                out
            }
            None => self.clone(),
        }
    }
}

/// `2^{-1/2}(|a⟩|a′⟩ + |b⟩|b′⟩)`.
pub fn make_entangled_source() -> JointState {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    JointState::new([
        ((Mode::l(Letter::A), Mode::r(Letter::A)), h),
        ((Mode::l(Letter::B), Mode::r(Letter::B)), h),
    ])
    .expect("source state is normalized")
}
