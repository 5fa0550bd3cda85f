//! 1+1D Minkowski kinematics (c = 1) for ordering the beam-splitter
//! crossings of the two photons in different inertial frames.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

/// `|Δt'| below this counts as simultaneous.
pub const SIMULTANEITY_TOLERANCE: f64 = 1e-12;

pub const L_AT_BS1: &str = "L@BS1";
pub const R_AT_BS1: &str = "R@BS1'";
pub const R_AT_BS3: &str = "R@BS3'";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RelativityError {
    #[error("boost velocity {0} is not inside the light cone (|v| < 1)")]
    Superluminal(f64),
    #[error("event `{0}` has non-finite coordinates")]
    NonFinite(String),
    #[error("no simultaneity frame: `{0}` and `{1}` are not spacelike separated")]
    NotSpacelike(String, String),
    #[error("geometry lacks event `{0}`")]
    MissingEvent(String),
    #[error("frame construction failed verification: {0}")]
    Verification(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpacetimeEvent {
    pub t: f64,
    pub x: f64,
    pub label: String,
}

impl SpacetimeEvent {
    pub fn new(label: impl Into<String>, t: f64, x: f64) -> Result<Self, RelativityError> {
        let label = label.into();
        if !t.is_finite() || !x.is_finite() {
            return Err(RelativityError::NonFinite(label));
        }
        Ok(SpacetimeEvent { t, x, label })
    }
}

/// Inertial frame moving with velocity `v` (|v| < 1) relative to the lab.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoostFrame {
    v: f64,
}

impl BoostFrame {
    pub const LAB: BoostFrame = BoostFrame { v: 0.0 };

    pub fn new(v: f64) -> Result<Self, RelativityError> {
        // also rejects NaN
        if v.is_nan() || v.abs() >= 1.0 {
            return Err(RelativityError::Superluminal(v));
        }
        Ok(BoostFrame { v })
    }

    pub fn velocity(&self) -> f64 {
        self.v
    }

    pub fn gamma(&self) -> f64 {
        1.0 / (1.0 - self.v * self.v).sqrt()
    }
}

/// `t' = γ(t − v·x)`, `x' = γ(x − v·t)`.
pub fn boost(e: &SpacetimeEvent, f: BoostFrame) -> SpacetimeEvent {
    let g = f.gamma();
    SpacetimeEvent {
        t: g * (e.t - f.v * e.x),
        x: g * (e.x - f.v * e.t),
        label: e.label.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IntervalKind {
    Spacelike,
    Timelike,
    Lightlike,
}

impl fmt::Display for IntervalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IntervalKind::Spacelike => "spacelike",
            IntervalKind::Timelike => "timelike",
            IntervalKind::Lightlike => "lightlike",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalClass {
    pub kind: IntervalKind,
    /// Δt² − Δx².
    pub value: f64,
}

pub fn interval_class(e1: &SpacetimeEvent, e2: &SpacetimeEvent) -> IntervalClass {
    let dt = e2.t - e1.t;
    let dx = e2.x - e1.x;
    let value = dt * dt - dx * dx;
    let kind = if value.abs() < 1e-12 {
        IntervalKind::Lightlike
    } else if value < 0.0 {
        IntervalKind::Spacelike
    } else {
        IntervalKind::Timelike
    };
    IntervalClass { kind, value }
}

/// Velocity of the frame in which `e1` and `e2` happen at the same time.
pub fn simultaneity_velocity(e1: &SpacetimeEvent, e2: &SpacetimeEvent) -> Result<f64, RelativityError> {
    let dt = e2.t - e1.t;
    let dx = e2.x - e1.x;
    if dt == 0.0 && dx == 0.0 {
        return Ok(0.0);
    }
    if interval_class(e1, e2).kind != IntervalKind::Spacelike {
        return Err(RelativityError::NotSpacelike(e1.label.clone(), e2.label.clone()));
    }
    Ok(dt / dx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeOrder {
    Before,
    Simultaneous,
    After,
}

impl fmt::Display for TimeOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TimeOrder::Before => "before",
            TimeOrder::Simultaneous => "simultaneous",
            TimeOrder::After => "after",
        })
    }
}

/// Where `e1` falls relative to `e2` in frame `f`.
pub fn ordering(e1: &SpacetimeEvent, e2: &SpacetimeEvent, f: BoostFrame) -> TimeOrder {
    // Δt' = γ(Δt − vΔx), computed from differences so that a pair at its
    // simultaneity velocity lands on exactly zero
    let dt = f.gamma() * ((e1.t - e2.t) - f.v * (e1.x - e2.x));
    if dt.abs() < SIMULTANEITY_TOLERANCE {
        TimeOrder::Simultaneous
    } else if dt < 0.0 {
        TimeOrder::Before
    } else {
        TimeOrder::After
    }
}

/// Labelled apparatus events. `L@BS1` and `R@BS1'` are always present;
/// `R@BS3'` is present when R can reach the third stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApparatusGeometry {
    events: BTreeMap<String, SpacetimeEvent>,
}

impl ApparatusGeometry {
    pub fn new(events: impl IntoIterator<Item = SpacetimeEvent>) -> Result<Self, RelativityError> {
        let events: BTreeMap<_, _> = events.into_iter().map(|e| (e.label.clone(), e)).collect();
        for required in [L_AT_BS1, R_AT_BS1] {
            if !events.contains_key(required) {
                return Err(RelativityError::MissingEvent(required.to_string()));
            }
        }
        Ok(ApparatusGeometry { events })
    }

    /// The `paper-default` preset: L crosses BS₁ at (0, 0), R crosses BS′₁
    /// at (0, 10) and BS′₃ at (5, 10).
    pub fn paper_default() -> Self {
        ApparatusGeometry::new([
            SpacetimeEvent::new(L_AT_BS1, 0.0, 0.0).unwrap(),
            SpacetimeEvent::new(R_AT_BS1, 0.0, 10.0).unwrap(),
            SpacetimeEvent::new(R_AT_BS3, 5.0, 10.0).unwrap(),
        ])
        .expect("preset has required events")
    }

    /// Looks up a named preset.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "paper-default" => Some(Self::paper_default()),
            _ => None,
        }
    }

    pub fn preset_names() -> &'static [&'static str] {
        &["paper-default"]
    }

    pub fn event(&self, label: &str) -> Option<&SpacetimeEvent> {
        self.events.get(label)
    }

    pub fn require(&self, label: &str) -> Result<&SpacetimeEvent, RelativityError> {
        self.event(label)
            .ok_or_else(|| RelativityError::MissingEvent(label.to_string()))
    }

    pub fn events(&self) -> impl Iterator<Item = &SpacetimeEvent> {
        self.events.values()
    }

    /// The same geometry without `R@BS3'`.
    pub fn without_stage3(&self) -> Self {
        let mut events = self.events.clone();
        events.remove(R_AT_BS3);
        ApparatusGeometry { events }
    }
}

/// The two frames of the ambiguity argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FramePair {
    /// R crosses BS′₁ simultaneously with L crossing BS₁.
    pub i1: BoostFrame,
    /// R has already crossed BS′₃ when L crosses BS₁.
    pub i2: BoostFrame,
}

/// Builds frames I₁ and I₂ for `g` and checks them by direct ordering.
///
/// I₁ is the simultaneity frame of (L@BS1, R@BS1'). I₂ takes the midpoint
/// between the simultaneity velocity of (L@BS1, R@BS3') and the light cone,
/// on the side of R's position.
pub fn find_frames(g: &ApparatusGeometry) -> Result<FramePair, RelativityError> {
    let l1 = g.require(L_AT_BS1)?;
    let r1 = g.require(R_AT_BS1)?;
    let r3 = g.require(R_AT_BS3)?;
    for r in [r1, r3] {
        if interval_class(l1, r).kind != IntervalKind::Spacelike {
            return Err(RelativityError::NotSpacelike(l1.label.clone(), r.label.clone()));
        }
    }
    let v1 = simultaneity_velocity(l1, r1)?;
    let vs = simultaneity_velocity(l1, r3)?;
    let toward = if r3.x >= l1.x { 1.0 } else { -1.0 };
    let v2 = (vs + toward) / 2.0;
    let i1 = BoostFrame::new(v1)?;
    let i2 = BoostFrame::new(v2)?;

    if ordering(r1, l1, i1) != TimeOrder::Simultaneous {
        return Err(RelativityError::Verification(format!(
            "{R_AT_BS1} not simultaneous with {L_AT_BS1} at v = {v1}"
        )));
    }
    if ordering(r3, l1, i1) != TimeOrder::After {
        return Err(RelativityError::Verification(format!(
            "{R_AT_BS3} does not follow {L_AT_BS1} at v = {v1}"
        )));
    }
    if ordering(r3, l1, i2) != TimeOrder::Before {
        return Err(RelativityError::Verification(format!(
            "{R_AT_BS3} does not precede {L_AT_BS1} at v = {v2}"
        )));
    }
    Ok(FramePair { i1, i2 })
}
