//! Strategies, Markov branching plays and cylinder probabilities.

mod sample;

use thiserror::Error;

use crate::arena::{Arena, Owner};
use crate::hash;

pub use sample::{
    best_response_sweep, estimate_value, nature_pick, sample_play, solve_inner, solve_inner_both, EstimateParams,
    LeafKind, Mode, SampleBudget, TruncatedPlay, ValueEstimate,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("malformed tree: {0}")]
    MalformedTree(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    P1,
    P2,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::P1 => Player::P2,
            Player::P2 => Player::P1,
        }
    }
}

/// Hash identifying a finite path of arena states. Strategies are functions
/// of the path through this value.
pub fn path_hash(path: &[usize]) -> u64 {
    hash::path_hash(path)
}

/// A deterministic strategy: a choice of successor for every finite path
/// ending in a state of its owner.
pub trait Strategy: Send + Sync {
    /// Choice at the path identified by `path_hash` whose last state is
    /// `last`. Returns `None` exactly when `last` is terminal.
    fn choose(&self, arena: &Arena, last: usize, path_hash: u64) -> Option<usize>;
}

/// Convenience wrapper that hashes an explicit path.
pub fn choose_on_path(s: &dyn Strategy, arena: &Arena, path: &[usize]) -> Option<usize> {
    let &last = path.last()?;
    s.choose(arena, last, path_hash(path))
}

/// Memoryless strategy following a value labelling: argmax at Player 1
/// states, argmin at Player 2 states, ties going to the first successor.
#[derive(Debug, Clone)]
pub struct GreedyStrategy {
    values: Vec<f64>,
}

impl GreedyStrategy {
    pub fn new(values: Vec<f64>) -> Self {
        GreedyStrategy { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl Strategy for GreedyStrategy {
    fn choose(&self, arena: &Arena, last: usize, _path_hash: u64) -> Option<usize> {
        let edges = arena.edges(last);
        let minimise = arena.owner(last) == Owner::P2;
        let mut best = *edges.first()?;
        for &t in &edges[1..] {
            let (vt, vb) = (self.values[t], self.values[best]);
            if (minimise && vt < vb) || (!minimise && vt > vb) {
                best = t;
            }
        }
        Some(best)
    }
}

/// Choice by hashing the seed with the whole path.
#[derive(Debug, Clone, Copy)]
pub struct SeededStrategy {
    seed: u64,
}

impl SeededStrategy {
    pub fn new(seed: u64) -> Self {
        SeededStrategy { seed }
    }
}

impl Strategy for SeededStrategy {
    fn choose(&self, arena: &Arena, last: usize, path_hash: u64) -> Option<usize> {
        let edges = arena.edges(last);
        if edges.is_empty() {
            return None;
        }
        let h = hash::mix(hash::splitmix(self.seed), path_hash);
        Some(edges[(h % edges.len() as u64) as usize])
    }
}

/// The branching structure induced by two strategies from a start state,
/// with Nature left unresolved.
#[derive(Clone, Copy)]
pub struct MarkovBranchingPlay<'a> {
    pub arena: &'a Arena,
    pub root: usize,
    pub sigma1: &'a dyn Strategy,
    pub sigma2: &'a dyn Strategy,
}

impl<'a> MarkovBranchingPlay<'a> {
    pub fn new(arena: &'a Arena, root: usize, sigma1: &'a dyn Strategy, sigma2: &'a dyn Strategy) -> Self {
        MarkovBranchingPlay {
            arena,
            root,
            sigma1,
            sigma2,
        }
    }

    /// Children of a node: the strategy's choice at player states, every
    /// positive-probability successor at Nature states, every successor at
    /// branching states.
    pub fn children(&self, last: usize, path_hash: u64) -> Vec<usize> {
        let a = self.arena;
        match a.owner(last) {
            Owner::P1 => self.sigma1.choose(a, last, path_hash).into_iter().collect(),
            Owner::P2 => self.sigma2.choose(a, last, path_hash).into_iter().collect(),
            Owner::Nature => a.support(last).map(|(t, _)| t).collect(),
            Owner::Branch1 | Owner::Branch2 => a.edges(last).to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub state: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub depth: usize,
    pub path_hash: u64,
}

/// A finite rooted tree of arena paths; node `i` stands for the path from
/// the root to `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTree {
    nodes: Vec<TreeNode>,
}

impl FiniteTree {
    pub fn new(root: usize) -> Self {
        FiniteTree {
            nodes: vec![TreeNode {
                state: root,
                parent: None,
                children: Vec::new(),
                depth: 0,
                path_hash: hash::root_hash(root),
            }],
        }
    }

    pub fn add_child(&mut self, parent: usize, state: usize) -> usize {
        let id = self.nodes.len();
        let (depth, h) = (self.nodes[parent].depth + 1, self.nodes[parent].path_hash);
        self.nodes.push(TreeNode {
            state,
            parent: Some(parent),
            children: Vec::new(),
            depth,
            path_hash: hash::extend(h, state),
        });
        self.nodes[parent].children.push(id);
        id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &TreeNode {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root_state(&self) -> usize {
        self.nodes[0].state
    }

    /// States along the path from the root to node `i`.
    pub fn path(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = Some(i);
        while let Some(c) = cur {
            out.push(self.nodes[c].state);
            cur = self.nodes[c].parent;
        }
        out.reverse();
        out
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].children.is_empty())
    }

    pub fn max_depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Whether `other` embeds into `self` from the root, matching children by
    /// state.
    pub fn contains(&self, other: &FiniteTree) -> bool {
        fn go(a: &FiniteTree, i: usize, b: &FiniteTree, j: usize) -> bool {
            b.nodes[j].children.iter().all(|&cj| {
                let s = b.nodes[cj].state;
                a.nodes[i]
                    .children
                    .iter()
                    .find(|&&ci| a.nodes[ci].state == s)
                    .is_some_and(|&ci| go(a, ci, b, cj))
            })
        }
        self.root_state() == other.root_state() && go(self, 0, other, 0)
    }
}

/// Probability that a branching play drawn from `m` extends `f`: the product
/// of Nature's weights over the Nature edges inside `f` when `f` is
/// consistent with `m`, and `0` otherwise.
pub fn cylinder_prob(m: &MarkovBranchingPlay<'_>, f: &FiniteTree) -> Result<f64, GameError> {
    let a = m.arena;
    for (i, n) in f.nodes().iter().enumerate() {
        if n.state >= a.num_states() {
            return Err(GameError::MalformedTree(format!("node {i} has unknown state {}", n.state)));
        }
        let mut seen = Vec::new();
        for &c in &n.children {
            let s = f.node(c).state;
            if !a.edges(n.state).contains(&s) {
                return Err(GameError::MalformedTree(format!("no edge {} -> {s}", n.state)));
            }
            if seen.contains(&s) {
                return Err(GameError::MalformedTree(format!("node {i} has a repeated child {s}")));
            }
            seen.push(s);
        }
    }
    if f.root_state() != m.root {
        return Ok(0.0);
    }
    let mut prob = 1.0;
    for n in f.nodes() {
        if n.children.is_empty() {
            continue;
        }
        match a.owner(n.state) {
            Owner::P1 | Owner::P2 => {
                let allowed = m.children(n.state, n.path_hash);
                if n.children.len() > 1 || f.node(n.children[0]).state != allowed[0] {
                    return Ok(0.0);
                }
            }
            Owner::Nature => {
                if n.children.len() > 1 {
                    return Ok(0.0);
                }
                prob *= a.nature_prob(n.state, f.node(n.children[0]).state);
            }
            Owner::Branch1 | Owner::Branch2 => {}
        }
    }
    Ok(prob)
}
