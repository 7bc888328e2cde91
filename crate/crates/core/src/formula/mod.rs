//! Formulas of the probabilistic modal μ-calculus with independent product.
//!
//! The abstract syntax is positive (no negation node). Negation, `tt`, `ff`
//! and the qualitative threshold modalities are macros that expand into the
//! core connectives at parse time.

mod display;
mod normal;
mod parser;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use indexmap::IndexSet;
use thiserror::Error;

pub use normal::SubsumptionOrder;
pub use parser::parse_formula;

/// Prefix of the variable names generated while desugaring macros.
/// User input may not use it.
pub const RESERVED_PREFIX: &str = "_v";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("negation is only defined on closed formulas (free: {0})")]
    OpenNegation(String),
    #[error("formula is not in normal form")]
    NotNormalForm,
    #[error("invalid identifier `{0}`")]
    InvalidIdent(String),
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

pub(crate) const KEYWORDS: [&str; 4] = ["mu", "nu", "tt", "ff"];

/// A propositional variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarName(Arc<str>);

impl VarName {
    pub fn new(name: &str) -> Result<Self, FormulaError> {
        if !is_identifier(name) || KEYWORDS.contains(&name) {
            return Err(FormulaError::InvalidIdent(name.to_string()));
        }
        Ok(VarName(name.into()))
    }

    /// The `n`-th reserved name, as produced by macro expansion.
    pub fn reserved(n: usize) -> Self {
        VarName(format!("{RESERVED_PREFIX}{n}").into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_reserved(&self) -> bool {
        self.0.starts_with(RESERVED_PREFIX)
    }

    pub(crate) fn reserved_index(&self) -> Option<usize> {
        self.0.strip_prefix(RESERVED_PREFIX)?.parse().ok()
    }
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An action label.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(Arc<str>);

impl Label {
    pub fn new(name: &str) -> Result<Self, FormulaError> {
        if !is_identifier(name) {
            return Err(FormulaError::InvalidIdent(name.to_string()));
        }
        Ok(Label(name.into()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FixKind {
    Mu,
    Nu,
}

impl FixKind {
    pub fn dual(self) -> Self {
        match self {
            FixKind::Mu => FixKind::Nu,
            FixKind::Nu => FixKind::Mu,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            FixKind::Mu => "mu",
            FixKind::Nu => "nu",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Var(VarName),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// Independent product.
    Prod(Box<Formula>, Box<Formula>),
    /// Independent coproduct, the De Morgan dual of `Prod`.
    Coprod(Box<Formula>, Box<Formula>),
    Diamond(Label, Box<Formula>),
    Box(Label, Box<Formula>),
    Mu(VarName, Box<Formula>),
    Nu(VarName, Box<Formula>),
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Information about one fixed-point binder occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinderInfo {
    pub variable: VarName,
    pub kind: FixKind,
    pub body: Formula,
    /// Number of binders strictly enclosing this one.
    pub depth: usize,
}

/// Source of reserved names for macro expansion.
#[derive(Debug, Clone, Default)]
pub struct FreshNames {
    next: usize,
}

impl FreshNames {
    pub fn new() -> Self {
        Self::default()
    }

    /// Continue numbering after every reserved name already used in `f`.
    pub fn after(f: &Formula) -> Self {
        let mut next = 0;
        f.visit(&mut |g| {
            if let Formula::Mu(x, _) | Formula::Nu(x, _) | Formula::Var(x) = g {
                if let Some(i) = x.reserved_index() {
                    next = next.max(i + 1);
                }
            }
        });
        FreshNames { next }
    }

    pub fn fresh(&mut self) -> VarName {
        let v = VarName::reserved(self.next);
        self.next += 1;
        v
    }
}

impl Formula {
    pub fn var(x: &VarName) -> Self {
        Formula::Var(x.clone())
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn prod(l: Formula, r: Formula) -> Self {
        Formula::Prod(Box::new(l), Box::new(r))
    }

    pub fn coprod(l: Formula, r: Formula) -> Self {
        Formula::Coprod(Box::new(l), Box::new(r))
    }

    pub fn diamond(a: &Label, g: Formula) -> Self {
        Formula::Diamond(a.clone(), Box::new(g))
    }

    pub fn boxed(a: &Label, g: Formula) -> Self {
        Formula::Box(a.clone(), Box::new(g))
    }

    pub fn mu(x: &VarName, g: Formula) -> Self {
        Formula::Mu(x.clone(), Box::new(g))
    }

    pub fn nu(x: &VarName, g: Formula) -> Self {
        Formula::Nu(x.clone(), Box::new(g))
    }

    pub fn fix(kind: FixKind, x: &VarName, g: Formula) -> Self {
        match kind {
            FixKind::Mu => Formula::mu(x, g),
            FixKind::Nu => Formula::nu(x, g),
        }
    }

    /// `tt`, i.e. `nu X. X`.
    pub fn tt(fresh: &mut FreshNames) -> Self {
        let x = fresh.fresh();
        Formula::nu(&x, Formula::var(&x))
    }

    /// `ff`, i.e. `mu X. X`.
    pub fn ff(fresh: &mut FreshNames) -> Self {
        let x = fresh.fresh();
        Formula::mu(&x, Formula::var(&x))
    }

    /// `P>0 g`, i.e. `mu X. (g (+) X)` with `X` fresh.
    pub fn positive(fresh: &mut FreshNames, g: Formula) -> Self {
        let x = fresh.fresh();
        Formula::mu(&x, Formula::coprod(g, Formula::var(&x)))
    }

    /// `P=1 g`, i.e. `nu X. (g * X)` with `X` fresh.
    pub fn almost_sure(fresh: &mut FreshNames, g: Formula) -> Self {
        let x = fresh.fresh();
        Formula::nu(&x, Formula::prod(g, Formula::var(&x)))
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Var(_) => vec![],
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Prod(l, r)
            | Formula::Coprod(l, r) => vec![l, r],
            Formula::Diamond(_, g) | Formula::Box(_, g) | Formula::Mu(_, g) | Formula::Nu(_, g) => {
                vec![g]
            }
        }
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    pub fn binder(&self) -> Option<(FixKind, &VarName, &Formula)> {
        match self {
            Formula::Mu(x, g) => Some((FixKind::Mu, x, g)),
            Formula::Nu(x, g) => Some((FixKind::Nu, x, g)),
            _ => None,
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// The subformula set, in pre-order of first occurrence.
    ///
    /// Occurrences are identified structurally, so `Sub(X ∧ X)` has two
    /// elements.
    pub fn subformulas(&self) -> IndexSet<Formula> {
        let mut out = IndexSet::new();
        self.visit(&mut |g| {
            if !out.contains(g) {
                out.insert(g.clone());
            }
        });
        out
    }

    pub fn free_vars(&self) -> BTreeSet<VarName> {
        fn go(f: &Formula, bound: &mut Vec<VarName>, out: &mut BTreeSet<VarName>) {
            match f {
                Formula::Var(x) => {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                }
                Formula::Mu(x, g) | Formula::Nu(x, g) => {
                    bound.push(x.clone());
                    go(g, bound, out);
                    bound.pop();
                }
                _ => {
                    for c in f.children() {
                        go(c, bound, out);
                    }
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn has_free(&self, x: &VarName) -> bool {
        self.free_vars().contains(x)
    }

    /// Every binder occurrence, outermost first (pre-order).
    pub fn binders(&self) -> Vec<BinderInfo> {
        fn go(f: &Formula, depth: usize, out: &mut Vec<BinderInfo>) {
            let inner = match f.binder() {
                Some((kind, x, body)) => {
                    out.push(BinderInfo {
                        variable: x.clone(),
                        kind,
                        body: body.clone(),
                        depth,
                    });
                    depth + 1
                }
                None => depth,
            };
            for c in f.children() {
                go(c, inner, out);
            }
        }
        let mut out = Vec::new();
        go(self, 0, &mut out);
        out
    }

    /// Matches `mu X. (g (+) X)` or `nu X. (g * X)` with `X` not free in `g`,
    /// in either operand order.
    pub fn threshold_shape(&self) -> Option<(FixKind, &Formula)> {
        let (kind, x, body) = self.binder()?;
        let (l, r) = match (kind, body) {
            (FixKind::Mu, Formula::Coprod(l, r)) | (FixKind::Nu, Formula::Prod(l, r)) => (l, r),
            _ => return None,
        };
        let is_x = |g: &Formula| matches!(g, Formula::Var(y) if y == x);
        if is_x(r) && !l.has_free(x) {
            Some((kind, l))
        } else if is_x(l) && !r.has_free(x) {
            Some((kind, r))
        } else {
            None
        }
    }

    /// De Morgan dual of a closed formula: `⟦negate f⟧ = 1 − ⟦f⟧`.
    pub fn negate(&self) -> Result<Formula, FormulaError> {
        let free = self.free_vars();
        if !free.is_empty() {
            let names: Vec<_> = free.iter().map(|x| x.to_string()).collect();
            return Err(FormulaError::OpenNegation(names.join(", ")));
        }
        Ok(self.dualize())
    }

    fn dualize(&self) -> Formula {
        let d = |g: &Formula| Box::new(g.dualize());
        match self {
            Formula::Var(x) => Formula::Var(x.clone()),
            Formula::And(l, r) => Formula::Or(d(l), d(r)),
            Formula::Or(l, r) => Formula::And(d(l), d(r)),
            Formula::Prod(l, r) => Formula::Coprod(d(l), d(r)),
            Formula::Coprod(l, r) => Formula::Prod(d(l), d(r)),
            Formula::Diamond(a, g) => Formula::Box(a.clone(), d(g)),
            Formula::Box(a, g) => Formula::Diamond(a.clone(), d(g)),
            Formula::Mu(x, g) => Formula::Nu(x.clone(), d(g)),
            Formula::Nu(x, g) => Formula::Mu(x.clone(), d(g)),
        }
    }

    /// Renumber reserved binder names in pre-order, starting at `_v0`.
    ///
    /// Two formulas that differ only in the choice of macro-generated names
    /// have the same canonical form.
    pub fn canonical_reserved(&self) -> Formula {
        fn go(f: &Formula, scope: &mut Vec<(VarName, VarName)>, next: &mut usize) -> Formula {
            match f {
                Formula::Var(x) => match scope.iter().rev().find(|(old, _)| old == x) {
                    Some((_, new)) => Formula::Var(new.clone()),
                    None => f.clone(),
                },
                Formula::Mu(x, g) | Formula::Nu(x, g) => {
                    let kind = f.binder().unwrap().0;
                    let new = if x.is_reserved() {
                        let v = VarName::reserved(*next);
                        *next += 1;
                        v
                    } else {
                        x.clone()
                    };
                    scope.push((x.clone(), new.clone()));
                    let body = go(g, scope, next);
                    scope.pop();
                    Formula::fix(kind, &new, body)
                }
                _ => f.map_children(|c| go(c, scope, next)),
            }
        }
        go(self, &mut Vec::new(), &mut 0)
    }

    /// Rebuild this node with each child replaced by `f(child)`.
    pub(crate) fn map_children(&self, mut f: impl FnMut(&Formula) -> Formula) -> Formula {
        let mut b = |g: &Formula| Box::new(f(g));
        match self {
            Formula::Var(_) => self.clone(),
            Formula::And(l, r) => {
                let l = b(l);
                Formula::And(l, b(r))
            }
            Formula::Or(l, r) => {
                let l = b(l);
                Formula::Or(l, b(r))
            }
            Formula::Prod(l, r) => {
                let l = b(l);
                Formula::Prod(l, b(r))
            }
            Formula::Coprod(l, r) => {
                let l = b(l);
                Formula::Coprod(l, b(r))
            }
            Formula::Diamond(a, g) => Formula::Diamond(a.clone(), b(g)),
            Formula::Box(a, g) => Formula::Box(a.clone(), b(g)),
            Formula::Mu(x, g) => Formula::Mu(x.clone(), b(g)),
            Formula::Nu(x, g) => Formula::Nu(x.clone(), b(g)),
        }
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        self.visit(&mut |g| {
            if let Formula::Diamond(a, _) | Formula::Box(a, _) = g {
                out.insert(a.clone());
            }
        });
        out
    }
}

impl std::str::FromStr for Formula {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}
