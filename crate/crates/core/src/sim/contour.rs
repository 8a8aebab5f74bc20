//! Contour encodings of planar trees.
//!
//! The depth-first contour of a finite planar tree is an excursion from
//! level -1 back to level -1 in ±1 steps. Labeling each vertex with the type
//! of the particle just climbed to (or 0 after a down-step) makes the walk
//! Markov with kernel
//!
//! - `P{(l,i) -> (l+1,j)} = h_ij`, `P{(l,i) -> (l-1,0)} = h_i0`,
//! - `P{(l,0) -> (l+1,j)} = m/(1+m) g_j`, `P{(l,0) -> (l-1,0)} = 1/(1+m)`,
//!
//! with `(-1,0)` absorbing. Collapsing each maximal up-run (one individual's
//! life) gives the jumping contour: a unit-speed descent with iid upward
//! jumps distributed as the life length `L`, started from level -1 with an
//! instantaneous jump.

use rand::Rng;

use crate::cmj::LifeLaw;
use crate::error::{Error, Result};
use crate::model::ModelTriplet;
use crate::sampling;

use super::tree::PlanarTree;
use super::Start;

/// Vertex label: the type just climbed to, or `Down` after a down-step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Down,
    Type(usize),
}

/// One state of the labeled contour walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContourState {
    pub level: i32,
    pub label: Label,
}

/// A labeled contour excursion, including the initial and absorbing
/// `(-1, Down)` states.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourPath {
    pub states: Vec<ContourState>,
    /// Observation horizon of the encoded tree (codec metadata).
    pub horizon: u32,
}

impl ContourPath {
    /// Number of ±1 steps (twice the node count for a full excursion).
    pub fn steps(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    pub fn max_level(&self) -> i32 {
        self.states.iter().map(|s| s.level).max().unwrap_or(-1)
    }
}

/// Depth-first contour of a finite planar tree.
pub fn tree_to_contour(tree: &PlanarTree) -> ContourPath {
    let mut states = Vec::with_capacity(2 * tree.len() + 1);
    states.push(ContourState {
        level: -1,
        label: Label::Down,
    });
    // Stack of (node, next child index).
    let mut stack: Vec<(usize, usize)> = Vec::new();
    states.push(ContourState {
        level: 0,
        label: Label::Type(tree.node(tree.root()).ty),
    });
    stack.push((tree.root(), 0));
    while let Some(&mut (node, ref mut idx)) = stack.last_mut() {
        let children = &tree.node(node).children;
        if *idx < children.len() {
            let child = children[*idx];
            *idx += 1;
            states.push(ContourState {
                level: stack.len() as i32,
                label: Label::Type(tree.node(child).ty),
            });
            stack.push((child, 0));
        } else {
            stack.pop();
            states.push(ContourState {
                level: stack.len() as i32 - 1,
                label: Label::Down,
            });
        }
    }
    ContourPath {
        states,
        horizon: tree.horizon(),
    }
}

/// Rebuilds the tree from a labeled excursion; inverse of
/// [`tree_to_contour`] on valid paths.
pub fn contour_to_tree(path: &ContourPath) -> Result<PlanarTree> {
    let states = &path.states;
    if states.len() < 3 {
        return Err(Error::BadContour("excursion too short".into()));
    }
    let start = states[0];
    if start.level != -1 || start.label != Label::Down {
        return Err(Error::BadContour("must start at (-1, 0)".into()));
    }
    let mut tree: Option<PlanarTree> = None;
    let mut stack: Vec<usize> = Vec::new();
    let mut level = -1i32;
    for (pos, state) in states.iter().enumerate().skip(1) {
        let diff = state.level - level;
        match (diff, state.label) {
            (1, Label::Type(ty)) => {
                match (&mut tree, stack.last()) {
                    (None, _) => {
                        tree = Some(PlanarTree::new(ty, path.horizon));
                        stack.push(0);
                    }
                    (Some(t), Some(&parent)) => {
                        let id = t.add_child(parent, ty);
                        stack.push(id);
                    }
                    (Some(_), None) => {
                        return Err(Error::BadContour(format!(
                            "second excursion starts at step {pos}"
                        )));
                    }
                }
            }
            (-1, Label::Down) => {
                if stack.pop().is_none() {
                    return Err(Error::BadContour(format!(
                        "down-step below the root at step {pos}"
                    )));
                }
                if stack.is_empty() && pos != states.len() - 1 {
                    return Err(Error::BadContour(format!(
                        "absorbed at (-1, 0) before the end (step {pos})"
                    )));
                }
            }
            (1, Label::Down) => {
                return Err(Error::BadContour(format!("up-step without a type at {pos}")));
            }
            (-1, Label::Type(_)) => {
                return Err(Error::BadContour(format!("down-step with a type at {pos}")));
            }
            _ => {
                return Err(Error::BadContour(format!(
                    "level jump {diff} at step {pos}"
                )));
            }
        }
        level = state.level;
    }
    if level != -1 || !stack.is_empty() {
        return Err(Error::BadContour("excursion does not close at -1".into()));
    }
    tree.ok_or_else(|| Error::BadContour("empty excursion".into()))
}

/// The labeled contour chain of a model: exact transition probabilities and
/// step sampling.
pub struct LabeledKernel<'a> {
    t: &'a ModelTriplet,
}

impl<'a> LabeledKernel<'a> {
    pub fn new(t: &'a ModelTriplet) -> Self {
        LabeledKernel { t }
    }

    /// Exact one-step transition probability.
    pub fn transition_probability(&self, from: ContourState, to: ContourState) -> f64 {
        let m = self.t.m();
        if from.level == -1 {
            // Absorbing.
            return if to == from { 1.0 } else { 0.0 };
        }
        match (from.label, to.label, to.level - from.level) {
            (Label::Type(i), Label::Type(j), 1) => self.t.h().get(i, j),
            (Label::Type(i), Label::Down, -1) => self.t.h_row_zero(i),
            (Label::Down, Label::Type(j), 1) => m / (1.0 + m) * self.t.g()[j],
            (Label::Down, Label::Down, -1) => 1.0 / (1.0 + m),
            _ => 0.0,
        }
    }

    /// One step of the chain.
    pub fn step<R: Rng + ?Sized>(&self, state: ContourState, rng: &mut R) -> ContourState {
        let m = self.t.m();
        if state.level == -1 {
            return state;
        }
        match state.label {
            Label::Type(i) => {
                let mut weights = Vec::with_capacity(self.t.dim() + 1);
                weights.push(self.t.h_row_zero(i));
                weights.extend_from_slice(self.t.h().row(i));
                let pick = sampling::categorical(rng, &weights);
                if pick == 0 {
                    ContourState {
                        level: state.level - 1,
                        label: Label::Down,
                    }
                } else {
                    ContourState {
                        level: state.level + 1,
                        label: Label::Type(pick - 1),
                    }
                }
            }
            Label::Down => {
                let mut weights = Vec::with_capacity(self.t.dim() + 1);
                weights.push(1.0 / (1.0 + m));
                for &gj in self.t.g() {
                    weights.push(m / (1.0 + m) * gj);
                }
                let pick = sampling::categorical(rng, &weights);
                if pick == 0 {
                    ContourState {
                        level: state.level - 1,
                        label: Label::Down,
                    }
                } else {
                    ContourState {
                        level: state.level + 1,
                        label: Label::Type(pick - 1),
                    }
                }
            }
        }
    }

    /// Runs the chain from `(0, i)` (the first compulsory move from level -1
    /// is implicit; a `FromG` start draws `i` from `g`) until absorption or
    /// the step cap. Returns the path and whether the cap was hit.
    pub fn sample_excursion<R: Rng + ?Sized>(
        &self,
        start: Start,
        rng: &mut R,
        step_cap: usize,
    ) -> (ContourPath, bool) {
        let root_ty = match start {
            Start::Type(i) => i,
            Start::FromG => sampling::categorical(rng, self.t.g()),
        };
        let mut states = vec![
            ContourState {
                level: -1,
                label: Label::Down,
            },
            ContourState {
                level: 0,
                label: Label::Type(root_ty),
            },
        ];
        let mut state = states[1];
        let mut capped = true;
        for _ in 0..step_cap {
            state = self.step(state, rng);
            states.push(state);
            if state.level == -1 {
                capped = false;
                break;
            }
        }
        (
            ContourPath {
                states,
                horizon: 0,
            },
            capped,
        )
    }
}

/// Events of the jumping contour process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpEvent {
    /// Instantaneous upward jump by a life length.
    Jump(u64),
    /// Unit down-step.
    Down,
}

/// One excursion of the jumping contour process.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpExcursion {
    pub events: Vec<JumpEvent>,
    pub max_level: i64,
    /// False when the step cap ended the walk first.
    pub absorbed: bool,
}

/// Default step cap for jumping-contour excursions (supercritical walks
/// drift upward and need a bound).
pub const DEFAULT_STEP_CAP: usize = 10_000_000;

/// Constant-speed descent with iid upward jumps sized as the life length.
pub struct JumpingContour<'a> {
    life: &'a LifeLaw,
}

impl<'a> JumpingContour<'a> {
    pub fn new(life: &'a LifeLaw) -> Result<Self> {
        if !life.samplable() {
            return Err(Error::NotSamplable(
                "jumping contour needs a tail rule to draw life lengths".into(),
            ));
        }
        Ok(JumpingContour { life })
    }

    /// Mean drift per descend-jump cycle: `λ - 1 - 1/m`; positive exactly in
    /// the supercritical case. `None` when `E(L)` is not certified finite.
    pub fn drift(&self) -> Option<f64> {
        self.life.lambda().map(|l| l - 1.0 - 1.0 / self.life.m())
    }

    /// Starts from level -1 with an instantaneous jump; after each down-step
    /// to a level `>= 0` the walk jumps again with probability `m/(1+m)`.
    /// Reaching level -1 absorbs.
    pub fn sample_excursion<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        step_cap: usize,
    ) -> JumpExcursion {
        let m = self.life.m();
        let d = |n: usize| self.life.d(n).expect("samplable life law");
        let mut level: i64 = -1;
        let mut max_level = -1i64;
        let mut events = Vec::new();
        let first = sampling::life_length(rng, d, step_cap) as u64;
        events.push(JumpEvent::Jump(first));
        level += first as i64;
        max_level = max_level.max(level);
        let mut absorbed = false;
        for _ in 0..step_cap {
            level -= 1;
            events.push(JumpEvent::Down);
            if level == -1 {
                absorbed = true;
                break;
            }
            // Settle with probability 1/(1+m), else jump.
            if rng.gen::<f64>() < m / (1.0 + m) {
                let jump = sampling::life_length(rng, d, step_cap) as u64;
                events.push(JumpEvent::Jump(jump));
                level += jump as i64;
                max_level = max_level.max(level);
            }
        }
        JumpExcursion {
            events,
            max_level,
            absorbed,
        }
    }
}
