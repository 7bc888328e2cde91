//! Truncated sampling of branching plays and Monte Carlo value estimates.

use std::collections::VecDeque;
use std::fmt;

use rayon::prelude::*;

use super::{FiniteTree, MarkovBranchingPlay, Player, Strategy};
use crate::arena::{Arena, Owner};
use crate::hash;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafKind {
    /// An expanded node.
    Internal,
    /// A terminal arena state.
    Terminal,
    /// Cut by the depth or node budget.
    Frontier,
    /// Not expanded because every continuation has this inner-game winner
    /// (`true` for Player 1).
    Resolved(bool),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleBudget {
    pub depth: usize,
    pub nodes: usize,
    /// Stop at states whose inner-game outcome is already forced.
    pub resolve_forced: bool,
}

impl SampleBudget {
    pub fn new(depth: usize, nodes: usize) -> Self {
        SampleBudget {
            depth,
            nodes,
            resolve_forced: true,
        }
    }
}

/// A finite prefix of a branching play, with Nature resolved at every
/// expanded Nature node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedPlay {
    pub tree: FiniteTree,
    pub kind: Vec<LeafKind>,
    /// Seed used to resolve each expanded Nature node.
    pub nature_seed: Vec<Option<u64>>,
}

impl TruncatedPlay {
    pub fn frontier(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.kind.len()).filter(|&i| self.kind[i] == LeafKind::Frontier)
    }

    pub fn has_frontier(&self) -> bool {
        self.kind.contains(&LeafKind::Frontier)
    }
}

/// Grow a branching play breadth-first from the root of `m`. Nature's
/// choice at a node depends only on `seed` and the node's path, so a larger
/// budget extends the tree drawn with a smaller one.
pub fn sample_play(m: &MarkovBranchingPlay<'_>, budget: SampleBudget, seed: u64) -> TruncatedPlay {
    let a = m.arena;
    let mut tree = FiniteTree::new(m.root);
    let mut kind = vec![LeafKind::Internal];
    let mut nature_seed = vec![None];
    let mut queue = VecDeque::from([0usize]);
    let mut exhausted = false;
    while let Some(i) = queue.pop_front() {
        let node = tree.node(i);
        let (s, depth, h) = (node.state, node.depth, node.path_hash);
        if a.is_terminal(s) {
            kind[i] = LeafKind::Terminal;
            continue;
        }
        if budget.resolve_forced {
            if let Some(o) = a.forced_outcome(s) {
                kind[i] = LeafKind::Resolved(o);
                continue;
            }
        }
        if exhausted || depth >= budget.depth {
            kind[i] = LeafKind::Frontier;
            continue;
        }
        let children = if a.owner(s) == Owner::Nature {
            nature_seed[i] = Some(hash::mix(seed, h));
            vec![nature_pick(a, s, seed, h)]
        } else {
            m.children(s, h)
        };
        if tree.len() + children.len() > budget.nodes {
            exhausted = true;
            kind[i] = LeafKind::Frontier;
            continue;
        }
        for c in children {
            let id = tree.add_child(i, c);
            kind.push(LeafKind::Internal);
            nature_seed.push(None);
            queue.push_back(id);
        }
    }
    TruncatedPlay {
        tree,
        kind,
        nature_seed,
    }
}

/// Nature's move at state `s` reached by the path with hash `path_hash`,
/// drawn from `π(s)` by a uniform value derived from `seed` and the path.
pub fn nature_pick(a: &Arena, s: usize, seed: u64, path_hash: u64) -> usize {
    let u = hash::unit(hash::mix(seed, path_hash));
    let mut acc = 0.0;
    let mut last = None;
    for (t, w) in a.support(s) {
        acc += w;
        last = Some(t);
        if u < acc {
            return t;
        }
    }
    last.expect("Nature state with empty support")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Frontier leaves count as wins for Player 1.
    Optimistic,
    /// Frontier leaves count as wins for Player 2.
    Pessimistic,
}

/// Winner of the inner game on `t` (coproduct nodes chosen by Player 1,
/// product nodes by Player 2) with frontier leaves settled by `mode`.
pub fn solve_inner(t: &TruncatedPlay, a: &Arena, mode: Mode) -> Player {
    let (pess, opt) = solve_inner_both(t, a);
    let p1 = match mode {
        Mode::Pessimistic => pess,
        Mode::Optimistic => opt,
    };
    if p1 {
        Player::P1
    } else {
        Player::P2
    }
}

/// Player 1 wins under (pessimistic, optimistic) frontier settlement.
pub fn solve_inner_both(t: &TruncatedPlay, a: &Arena) -> (bool, bool) {
    let n = t.tree.len();
    let mut win = vec![(false, false); n];
    for i in (0..n).rev() {
        let node = t.tree.node(i);
        win[i] = match t.kind[i] {
            LeafKind::Terminal => {
                let w = a.priority(node.state) % 2 == 1;
                (w, w)
            }
            LeafKind::Frontier => (false, true),
            LeafKind::Resolved(w) => (w, w),
            LeafKind::Internal => {
                let kids = node.children.iter().map(|&c| win[c]);
                match a.owner(node.state) {
                    Owner::Branch1 => kids.fold((false, false), |x, y| (x.0 || y.0, x.1 || y.1)),
                    Owner::Branch2 => kids.fold((true, true), |x, y| (x.0 && y.0, x.1 && y.1)),
                    _ => win[node.children[0]],
                }
            }
        };
    }
    win[0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EstimateParams {
    pub samples: usize,
    pub depth: usize,
    pub nodes: usize,
    pub seed: u64,
}

impl Default for EstimateParams {
    fn default() -> Self {
        EstimateParams {
            samples: 2000,
            depth: 64,
            nodes: 200_000,
            seed: 0,
        }
    }
}

/// Interval estimate of the expected value of a Markov branching play.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueEstimate {
    pub lo: f64,
    pub hi: f64,
    pub stderr_lo: f64,
    pub stderr_hi: f64,
    pub samples: usize,
    pub depth: usize,
    pub nodes: usize,
    pub seed: u64,
}

impl ValueEstimate {
    pub fn to_kv(&self) -> String {
        format!(
            "lo={}\nhi={}\nstderr_lo={}\nstderr_hi={}\nsamples={}\ndepth={}\nnodes={}\nseed={}\n",
            self.lo, self.hi, self.stderr_lo, self.stderr_hi, self.samples, self.depth, self.nodes, self.seed
        )
    }
}

impl fmt::Display for ValueEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "value in [{:.4}, {:.4}] (stderr {:.4}/{:.4}; {} samples, depth {}, nodes {}, seed {})",
            self.lo, self.hi, self.stderr_lo, self.stderr_hi, self.samples, self.depth, self.nodes, self.seed
        )
    }
}

fn stderr(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Monte Carlo estimate of the probability that Player 1 wins the inner
/// game, as an interval: `lo` counts frontier leaves as losses, `hi` as wins.
pub fn estimate_value(
    a: &Arena,
    s0: usize,
    sigma1: &dyn Strategy,
    sigma2: &dyn Strategy,
    params: &EstimateParams,
) -> ValueEstimate {
    let m = MarkovBranchingPlay::new(a, s0, sigma1, sigma2);
    let budget = SampleBudget::new(params.depth, params.nodes);
    let n = params.samples.max(1);
    let (lo, hi) = (0..n)
        .into_par_iter()
        .map(|i| {
            let seed = hash::mix(hash::splitmix(params.seed), i as u64);
            let t = sample_play(&m, budget, seed);
            let (p, o) = solve_inner_both(&t, a);
            (p as usize, o as usize)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    let (lo, hi) = (lo as f64 / n as f64, hi as f64 / n as f64);
    ValueEstimate {
        lo,
        hi,
        stderr_lo: stderr(lo, n),
        stderr_hi: stderr(hi, n),
        samples: n,
        depth: params.depth,
        nodes: params.nodes,
        seed: params.seed,
    }
}

/// Estimate against each seeded adversary and the supplied greedy one, and
/// return the estimate most favourable to the adversary.
pub fn best_response_sweep(
    a: &Arena,
    s0: usize,
    fixed: &dyn Strategy,
    fixed_player: Player,
    seeds: &[u64],
    greedy_adversary: &dyn Strategy,
    params: &EstimateParams,
) -> ValueEstimate {
    let run = |adv: &dyn Strategy| match fixed_player {
        Player::P1 => estimate_value(a, s0, fixed, adv, params),
        Player::P2 => estimate_value(a, s0, adv, fixed, params),
    };
    let mut worst = run(greedy_adversary);
    for &seed in seeds {
        let e = run(&super::SeededStrategy::new(seed));
        let better_for_adversary = match fixed_player {
            Player::P1 => e.lo < worst.lo,
            Player::P2 => e.hi > worst.hi,
        };
        if better_for_adversary {
            worst = e;
        }
    }
    worst
}
