//! Forward simulation and individual-based extraction.

use rand::Rng;

use crate::cmj::LifeLaw;
use crate::error::{Error, Result};
use crate::model::ModelTriplet;
use crate::sampling;

use super::tree::{NodeId, PlanarTree};

/// Initial particle of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Start {
    Type(usize),
    /// Draw the root type from `g` (the start under which the total-size
    /// process is the associated individual process).
    FromG,
}

/// Simulation limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub horizon: u32,
    /// Run is flagged truncated once the arena holds this many particles.
    pub node_cap: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            horizon: 10,
            node_cap: 1_000_000,
        }
    }
}

/// One forward run: the planar tree and the per-generation type counts.
#[derive(Debug, Clone, PartialEq)]
pub struct BgwRun {
    pub tree: PlanarTree,
    /// `counts[k][j]`: type-`j` particles in generation `k`.
    pub counts: Vec<Vec<u64>>,
    /// True when the node cap stopped the run early; counts beyond the last
    /// completed generation are unreliable.
    pub truncated: bool,
}

impl BgwRun {
    pub fn totals(&self) -> Vec<u64> {
        self.counts
            .iter()
            .map(|row| row.iter().sum())
            .collect()
    }
}

/// Grows the planar genealogy generation by generation; every particle's
/// offspring is drawn from its row law with the first daughter leftmost.
pub fn simulate_bgw<R: Rng + ?Sized>(
    t: &ModelTriplet,
    start: Start,
    cfg: SimConfig,
    rng: &mut R,
) -> BgwRun {
    let root_ty = match start {
        Start::Type(i) => i,
        Start::FromG => sampling::categorical(rng, t.g()),
    };
    let mut tree = PlanarTree::new(root_ty, cfg.horizon);
    let mut frontier: Vec<NodeId> = vec![tree.root()];
    let mut truncated = false;

    // Weights for the first-draw stage per type: [h_i0, h_i1, ..., h_ia].
    let first_weights: Vec<Vec<f64>> = (0..t.dim())
        .map(|i| {
            let mut w = Vec::with_capacity(t.dim() + 1);
            w.push(t.h_row_zero(i));
            w.extend_from_slice(t.h().row(i));
            w
        })
        .collect();

    'outer: for _gen in 0..cfg.horizon {
        let mut next = Vec::new();
        for &id in &frontier {
            let ty = tree.node(id).ty;
            let pick = sampling::categorical(rng, &first_weights[ty]);
            if pick == 0 {
                continue; // no offspring
            }
            next.push(tree.add_child(id, pick - 1));
            let extra = sampling::geometric(rng, t.m());
            for _ in 0..extra {
                let j = sampling::categorical(rng, t.g());
                next.push(tree.add_child(id, j));
                if tree.len() >= cfg.node_cap {
                    truncated = true;
                    break 'outer;
                }
            }
            if tree.len() >= cfg.node_cap {
                truncated = true;
                break 'outer;
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    let counts = tree.generation_counts(t.dim());
    BgwRun {
        tree,
        counts,
        truncated,
    }
}

/// An individual of the associated overlapping-generation process: a maximal
/// first-daughter chain of particles.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    /// Time its first particle exists.
    pub birth: u32,
    /// Life length; `None` when the chain is still running at the horizon.
    pub life: Option<u32>,
    /// Daughters produced at age `j` = non-first children of the chain's
    /// `j`-th particle (births at the horizon are unobservable and absent).
    pub births_by_age: Vec<u64>,
    /// Chain of particle ids, oldest first.
    pub particles: Vec<NodeId>,
}

impl Individual {
    /// Alive at time `k` iff one of its particles has generation `k`.
    pub fn alive_at(&self, k: u32) -> bool {
        if k < self.birth {
            return false;
        }
        (k - self.birth) < self.particles.len() as u32
    }
}

/// Splits a tree into individuals: chains start at the root and at every
/// non-first child.
pub fn extract_individuals(tree: &PlanarTree) -> Vec<Individual> {
    let mut is_first_child = vec![false; tree.len()];
    for node in tree.nodes() {
        if let Some(&first) = node.children.first() {
            is_first_child[first] = true;
        }
    }
    let mut out = Vec::new();
    for (id, &first) in is_first_child.iter().enumerate() {
        if id != tree.root() && first {
            continue;
        }
        let birth = tree.node(id).birth;
        let mut particles = vec![id];
        let mut births_by_age = Vec::new();
        let mut current = id;
        loop {
            let node = tree.node(current);
            births_by_age.push(node.children.len().saturating_sub(1) as u64);
            match node.children.first() {
                Some(&next) => {
                    particles.push(next);
                    current = next;
                }
                None => break,
            }
        }
        let last_birth = tree.node(current).birth;
        let life = if last_birth >= tree.horizon() {
            None // still alive at the observation time
        } else {
            Some(particles.len() as u32)
        };
        out.push(Individual {
            birth,
            life,
            births_by_age,
            particles,
        });
    }
    out
}

/// One run of the individual-based process.
#[derive(Debug, Clone, PartialEq)]
pub struct CmjRun {
    /// Individuals alive at each time `0..=horizon`.
    pub totals: Vec<u64>,
    pub truncated: bool,
}

/// Simulates the individual process directly from `(d, m)`: each individual
/// draws a life length `L` with `P(L > n) = dₙ` and bears geometric(m)
/// daughters at every age `1, …, L-1`.
pub fn simulate_cmj<R: Rng + ?Sized>(
    life: &LifeLaw,
    horizon: u32,
    cap: usize,
    rng: &mut R,
) -> Result<CmjRun> {
    if !life.samplable() {
        return Err(Error::NotSamplable(
            "simulate_cmj needs a life law with a tail rule".into(),
        ));
    }
    let d = |n: usize| life.d(n).expect("samplable life law");
    let m = life.m();
    let horizon_us = horizon as usize;
    // Births scheduled per time; alive via a +1/-1 difference array.
    let mut births = vec![0u64; horizon_us + 1];
    let mut alive_delta = vec![0i64; horizon_us + 2];
    births[0] = 1;
    let mut spawned: usize = 0;
    let mut truncated = false;
    for t in 0..=horizon_us {
        let count = births[t];
        for _ in 0..count {
            if spawned >= cap {
                truncated = true;
                break;
            }
            spawned += 1;
            // Lives longer than the remaining window behave identically.
            let l = sampling::life_length(rng, d, horizon_us - t + 2);
            alive_delta[t] += 1;
            alive_delta[(t + l).min(horizon_us + 1)] -= 1;
            for age in 1..l {
                let when = t + age;
                if when > horizon_us {
                    break;
                }
                births[when] += sampling::geometric(rng, m);
            }
        }
        if truncated {
            break;
        }
    }
    let mut totals = Vec::with_capacity(horizon_us + 1);
    let mut running = 0i64;
    for delta in alive_delta.iter().take(horizon_us + 1) {
        running += delta;
        totals.push(running.max(0) as u64);
    }
    Ok(CmjRun { totals, truncated })
}

/// Spinal decomposition of a surviving tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Spine {
    /// The leftmost root-to-level-n lineage (n+1 particles).
    pub path: Vec<NodeId>,
    /// Per level `k < n`: subtrees branching off the spine strictly to the
    /// right of the spinal child.
    pub right_counts: Vec<u64>,
}

/// Finds the leftmost lineage reaching level `n`; `None` when the tree died
/// out before `n`.
pub fn spinal_decompose(tree: &PlanarTree, n: u32) -> Option<Spine> {
    // Depth-first, leftmost child first: the first hit at level n is the
    // planar-leftmost surviving lineage.
    let mut stack = vec![tree.root()];
    let mut parent: Vec<Option<NodeId>> = vec![None; tree.len()];
    for (id, node) in tree.nodes().iter().enumerate() {
        for &c in &node.children {
            parent[c] = Some(id);
        }
    }
    let mut found = None;
    while let Some(id) = stack.pop() {
        if tree.node(id).birth == n {
            found = Some(id);
            break;
        }
        // Push children right-to-left so the leftmost pops first.
        for &c in tree.node(id).children.iter().rev() {
            stack.push(c);
        }
    }
    let tip = found?;
    let mut path = vec![tip];
    let mut current = tip;
    while let Some(p) = parent[current] {
        path.push(p);
        current = p;
    }
    path.reverse();
    let right_counts = path
        .windows(2)
        .map(|w| {
            let (node, child) = (w[0], w[1]);
            let children = &tree.node(node).children;
            let pos = children.iter().position(|&c| c == child).unwrap();
            (children.len() - pos - 1) as u64
        })
        .collect();
    Some(Spine { path, right_counts })
}
