//! Stochastic meta-parity game arenas.
//!
//! An arena is compiled from a formula in normal and product normal form,
//! a model and an interpretation of the free variables. Its states are
//! `⟨p, G⟩` (state of the model, subformula), `⟨d, G⟩` (distribution,
//! subformula) and the two sinks `⊤` and `⊥`.

mod parity;

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::{self, Write};

use indexmap::IndexSet;
use thiserror::Error;

use crate::denotational::Env;
use crate::formula::{FixKind, Formula, VarName};
use crate::plts::Plts;

pub use parity::{
    annotate_arena_values, assign_priorities, omega_wins_finite, omega_wins_lasso,
    value_functional,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArenaError {
    #[error("formula must be in normal form and product normal form")]
    NotNormalForm,
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("value map has {got} entries, arena has {want} states")]
    ValueLength { got: usize, want: usize },
}

/// A position of the game. Subformulas are referred to by their index in
/// [`Arena::subformula`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GameState {
    Pf { state: usize, sub: usize },
    Df { dist: usize, sub: usize },
    Top,
    Bot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Owner {
    P1,
    P2,
    Nature,
    /// Coproduct node; Player 1 moves here in the inner game.
    Branch1,
    /// Product node; Player 2 moves here in the inner game.
    Branch2,
}

impl Owner {
    pub const ALL: [Owner; 5] = [Owner::P1, Owner::P2, Owner::Nature, Owner::Branch1, Owner::Branch2];

    pub fn is_player(self) -> bool {
        matches!(self, Owner::P1 | Owner::P2)
    }

    pub fn is_branch(self) -> bool {
        matches!(self, Owner::Branch1 | Owner::Branch2)
    }

    pub fn name(self) -> &'static str {
        match self {
            Owner::P1 => "P1",
            Owner::P2 => "P2",
            Owner::Nature => "Nature",
            Owner::Branch1 => "Branch1",
            Owner::Branch2 => "Branch2",
        }
    }
}

impl fmt::Display for Owner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct Arena {
    formula: Formula,
    subs: IndexSet<Formula>,
    state_names: Vec<String>,
    states: Vec<GameState>,
    index: HashMap<GameState, usize>,
    edges: Vec<Vec<usize>>,
    owner: Vec<Owner>,
    /// Nature weights aligned with `edges`; `None` for non-Nature states.
    nature: Vec<Option<Vec<f64>>>,
    priority: Vec<u32>,
    var_priorities: BTreeMap<VarName, u32>,
    roots: Vec<usize>,
    forced: Vec<Option<bool>>,
}

pub const TOP: usize = 0;
pub const BOT: usize = 1;

impl Arena {
    /// Materialise every state reachable from `⟨p, f⟩` for all model states
    /// `p`. Free variables are read from `env` (unbound ones as 0).
    pub fn build(f: &Formula, model: &Plts, env: &Env) -> Result<Arena, ArenaError> {
        if !f.is_normal_form() || !f.is_product_normal_form() {
            return Err(ArenaError::NotNormalForm);
        }
        let subs = f.subformulas();
        let var_priorities = assign_priorities(f);
        let mut bound: HashMap<VarName, (FixKind, usize)> = HashMap::new();
        for b in f.binders() {
            let body = subs.get_index_of(&b.body).expect("binder body is a subformula");
            bound.insert(b.variable, (b.kind, body));
        }
        let root_sub = subs.get_index_of(f).expect("formula is its own subformula");

        let mut arena = Arena {
            formula: f.clone(),
            subs,
            state_names: model.state_names().to_vec(),
            states: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
            owner: Vec::new(),
            nature: Vec::new(),
            priority: Vec::new(),
            var_priorities,
            roots: Vec::new(),
            forced: Vec::new(),
        };
        let mut queue = VecDeque::new();
        arena.intern(GameState::Top, &mut queue);
        arena.intern(GameState::Bot, &mut queue);
        for p in 0..model.num_states() {
            let id = arena.intern(GameState::Pf { state: p, sub: root_sub }, &mut queue);
            arena.roots.push(id);
        }
        while let Some(id) = queue.pop_front() {
            let (owner, priority, succ, weights) = arena.expand(arena.states[id], model, env, &bound);
            let succ: Vec<usize> = succ.into_iter().map(|s| arena.intern(s, &mut queue)).collect();
            let priority = match priority {
                Some(pr) => pr,
                None if succ.is_empty() => terminal_priority(owner),
                None => 0,
            };
            arena.owner[id] = owner;
            arena.priority[id] = priority;
            arena.edges[id] = succ;
            arena.nature[id] = weights;
        }
        arena.forced = parity::forced_outcomes(&arena);
        Ok(arena)
    }

    fn intern(&mut self, s: GameState, queue: &mut VecDeque<usize>) -> usize {
        if let Some(&id) = self.index.get(&s) {
            return id;
        }
        let id = self.states.len();
        self.states.push(s);
        self.index.insert(s, id);
        self.edges.push(Vec::new());
        self.owner.push(Owner::P1);
        self.nature.push(None);
        self.priority.push(0);
        queue.push_back(id);
        id
    }

    #[allow(clippy::type_complexity)]
    fn expand(
        &self,
        s: GameState,
        model: &Plts,
        env: &Env,
        bound: &HashMap<VarName, (FixKind, usize)>,
    ) -> (Owner, Option<u32>, Vec<GameState>, Option<Vec<f64>>) {
        let fix_owner = |k: FixKind| match k {
            FixKind::Mu => Owner::P1,
            FixKind::Nu => Owner::P2,
        };
        let sub = |g: &Formula| self.subs.get_index_of(g).expect("subformula closure");
        let (p, g) = match s {
            GameState::Top => return (Owner::P2, Some(1), vec![], None),
            GameState::Bot => return (Owner::P1, Some(0), vec![], None),
            GameState::Df { dist, sub: g } => {
                let d = model.distribution(dist);
                let (succ, w) = d
                    .iter()
                    .map(|(q, w)| (GameState::Pf { state: q, sub: g }, w))
                    .unzip();
                return (Owner::Nature, None, succ, Some(w));
            }
            GameState::Pf { state, sub } => (state, &self.subs[sub]),
        };
        let pf = |h: &Formula| GameState::Pf { state: p, sub: sub(h) };
        match g {
            Formula::Var(x) => match bound.get(x) {
                Some(&(kind, body)) => (
                    fix_owner(kind),
                    Some(self.var_priorities[x]),
                    vec![GameState::Pf { state: p, sub: body }],
                    None,
                ),
                None => {
                    let r = env.value(x, p);
                    (
                        Owner::Nature,
                        None,
                        vec![GameState::Top, GameState::Bot],
                        Some(vec![r, 1.0 - r]),
                    )
                }
            },
            Formula::Mu(_, body) => (Owner::P1, None, vec![pf(body)], None),
            Formula::Nu(_, body) => (Owner::P2, None, vec![pf(body)], None),
            Formula::Diamond(a, h) | Formula::Box(a, h) => {
                let h = sub(h);
                let succ = model
                    .successors(p, a)
                    .iter()
                    .map(|&d| GameState::Df { dist: d, sub: h })
                    .collect();
                let owner = if matches!(g, Formula::Diamond(..)) { Owner::P1 } else { Owner::P2 };
                (owner, None, succ, None)
            }
            Formula::Or(l, r) => (Owner::P1, None, vec![pf(l), pf(r)], None),
            Formula::And(l, r) => (Owner::P2, None, vec![pf(l), pf(r)], None),
            Formula::Coprod(l, r) => (Owner::Branch1, None, vec![pf(l), pf(r)], None),
            Formula::Prod(l, r) => (Owner::Branch2, None, vec![pf(l), pf(r)], None),
        }
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, id: usize) -> GameState {
        self.states[id]
    }

    pub fn states(&self) -> &[GameState] {
        &self.states
    }

    pub fn id(&self, s: &GameState) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Id of `⟨p, g⟩`, if that state is reachable.
    pub fn pf(&self, p: usize, g: &Formula) -> Option<usize> {
        let sub = self.subs.get_index_of(g)?;
        self.id(&GameState::Pf { state: p, sub })
    }

    /// Id of the initial state `⟨p, f⟩`.
    pub fn root(&self, p: usize) -> usize {
        self.roots[p]
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn subformula(&self, idx: usize) -> &Formula {
        &self.subs[idx]
    }

    pub fn subformulas(&self) -> &IndexSet<Formula> {
        &self.subs
    }

    pub fn edges(&self, id: usize) -> &[usize] {
        &self.edges[id]
    }

    pub fn owner(&self, id: usize) -> Owner {
        self.owner[id]
    }

    pub fn priority(&self, id: usize) -> u32 {
        self.priority[id]
    }

    pub fn is_terminal(&self, id: usize) -> bool {
        self.edges[id].is_empty()
    }

    /// Nature's weights on `edges(id)`, aligned by position.
    pub fn nature_weights(&self, id: usize) -> Option<&[f64]> {
        self.nature[id].as_deref()
    }

    /// Successors with positive probability together with their weight.
    pub fn support(&self, id: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let w = self.nature[id].as_deref().unwrap_or(&[]);
        self.edges[id]
            .iter()
            .zip(w)
            .filter(|(_, &w)| w > 0.0)
            .map(|(&t, &w)| (t, w))
    }

    /// `π(s)(t)`; zero for non-Nature states and non-successors.
    pub fn nature_prob(&self, s: usize, t: usize) -> f64 {
        self.support(s).filter(|&(u, _)| u == t).map(|(_, w)| w).sum()
    }

    pub fn variable_priorities(&self) -> &BTreeMap<VarName, u32> {
        &self.var_priorities
    }

    /// Outcome of the inner game from `id` when it does not depend on
    /// strategies or Nature: `Some(true)` if Player 1 wins every play through
    /// `id`, `Some(false)` if Player 2 does.
    pub fn forced_outcome(&self, id: usize) -> Option<bool> {
        self.forced[id]
    }

    pub fn model_state_name(&self, p: usize) -> &str {
        &self.state_names[p]
    }

    pub fn owner_counts(&self) -> BTreeMap<Owner, usize> {
        let mut counts: BTreeMap<Owner, usize> = Owner::ALL.iter().map(|&o| (o, 0)).collect();
        for &o in &self.owner {
            *counts.get_mut(&o).unwrap() += 1;
        }
        counts
    }

    pub fn describe(&self, id: usize) -> String {
        match self.states[id] {
            GameState::Top => "Top".into(),
            GameState::Bot => "Bot".into(),
            GameState::Pf { state, sub } => format!("<{}, {}>", self.state_names[state], self.subs[sub]),
            GameState::Df { dist, sub } => format!("<d{dist}, {}>", self.subs[sub]),
        }
    }

    /// Deterministic text dump: a header with counts and the priority table,
    /// then one line per state.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        writeln!(out, "formula: {}", self.formula).unwrap();
        writeln!(out, "states: {}", self.num_states()).unwrap();
        let counts: Vec<String> = self
            .owner_counts()
            .iter()
            .map(|(o, n)| format!("{o}={n}"))
            .collect();
        writeln!(out, "owners: {}", counts.join(" ")).unwrap();
        writeln!(out, "priorities:").unwrap();
        for (x, pr) in &self.var_priorities {
            let kind = if pr % 2 == 1 { "mu" } else { "nu" };
            writeln!(out, "  {x} {kind} {pr}").unwrap();
        }
        writeln!(out, "id owner priority state -> successors").unwrap();
        for id in 0..self.num_states() {
            write!(out, "{id} {} {} {} ->", self.owner[id], self.priority[id], self.describe(id)).unwrap();
            match &self.nature[id] {
                Some(w) => {
                    for (t, w) in self.edges[id].iter().zip(w) {
                        write!(out, " {t}:{w}").unwrap();
                    }
                }
                None => {
                    for t in &self.edges[id] {
                        write!(out, " {t}").unwrap();
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

fn terminal_priority(owner: Owner) -> u32 {
    match owner {
        Owner::P1 => 0,
        _ => 1,
    }
}
