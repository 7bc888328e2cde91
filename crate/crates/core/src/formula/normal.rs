use std::collections::{BTreeSet, HashSet};

use super::{Formula, FormulaError, FreshNames, VarName};

impl Formula {
    /// Every binder binds a distinct variable and no variable occurs both
    /// free and bound.
    pub fn is_normal_form(&self) -> bool {
        let free = self.free_vars();
        let mut seen = HashSet::new();
        self.binders()
            .iter()
            .all(|b| !free.contains(&b.variable) && seen.insert(b.variable.clone()))
    }

    /// Normal form without self-products `G * G` or self-coproducts `G (+) G`.
    pub fn is_product_normal_form(&self) -> bool {
        if !self.is_normal_form() {
            return false;
        }
        let mut ok = true;
        self.visit(&mut |g| {
            if let Formula::Prod(l, r) | Formula::Coprod(l, r) = g {
                ok &= l != r;
            }
        });
        ok
    }

    /// α-rename bound variables into normal form. The first binder of each
    /// name keeps it unless the name also occurs free.
    pub fn to_normal_form(&self) -> Formula {
        let mut used: BTreeSet<VarName> = self.free_vars();
        let mut all_names = used.clone();
        self.visit(&mut |g| {
            if let Some((_, x, _)) = g.binder() {
                all_names.insert(x.clone());
            }
        });
        let mut renamer = Renamer {
            taken: all_names,
            used: std::mem::take(&mut used),
            fresh: FreshNames::after(self),
        };
        renamer.go(self, &mut Vec::new())
    }

    /// Rewrite every `G ⋆ G` into `G ⋆ (G ∨ G)` bottom-up, then restore
    /// normal form by renaming the duplicated binders.
    pub fn to_product_normal_form(&self) -> Formula {
        fn rewrite(f: &Formula) -> Formula {
            let g = f.map_children(rewrite);
            match g {
                Formula::Prod(l, r) if l == r => {
                    let dup = Formula::Or(l.clone(), r);
                    Formula::Prod(l, Box::new(dup))
                }
                Formula::Coprod(l, r) if l == r => {
                    let dup = Formula::Or(l.clone(), r);
                    Formula::Coprod(l, Box::new(dup))
                }
                g => g,
            }
        }
        rewrite(&self.to_normal_form()).to_normal_form()
    }

    /// The subsumption order between bound variables of a normal-form formula.
    pub fn subsumption_order(&self) -> Result<SubsumptionOrder, FormulaError> {
        if !self.is_normal_form() {
            return Err(FormulaError::NotNormalForm);
        }
        fn go(f: &Formula, enclosing: &mut Vec<VarName>, pairs: &mut BTreeSet<(VarName, VarName)>) {
            if let Some((_, y, body)) = f.binder() {
                for x in enclosing.iter() {
                    pairs.insert((x.clone(), y.clone()));
                }
                enclosing.push(y.clone());
                go(body, enclosing, pairs);
                enclosing.pop();
            } else {
                for c in f.children() {
                    go(c, enclosing, pairs);
                }
            }
        }
        let mut pairs = BTreeSet::new();
        go(self, &mut Vec::new(), &mut pairs);
        let variables = self.binders().into_iter().map(|b| b.variable).collect();
        Ok(SubsumptionOrder { variables, pairs })
    }
}

struct Renamer {
    /// Every name occurring anywhere in the input, plus names introduced.
    taken: BTreeSet<VarName>,
    /// Names already claimed by a binder (or by a free occurrence).
    used: BTreeSet<VarName>,
    fresh: FreshNames,
}

impl Renamer {
    fn claim(&mut self, x: &VarName) -> VarName {
        if self.used.insert(x.clone()) {
            return x.clone();
        }
        let new = if x.is_reserved() {
            loop {
                let v = self.fresh.fresh();
                if !self.taken.contains(&v) {
                    break v;
                }
            }
        } else {
            (1..)
                .map(|k| VarName::new(&format!("{x}{k}")).expect("suffixing keeps identifiers valid"))
                .find(|v| !self.taken.contains(v))
                .unwrap()
        };
        self.taken.insert(new.clone());
        self.used.insert(new.clone());
        new
    }

    fn go(&mut self, f: &Formula, scope: &mut Vec<(VarName, VarName)>) -> Formula {
        match f {
            Formula::Var(x) => match scope.iter().rev().find(|(old, _)| old == x) {
                Some((_, new)) => Formula::Var(new.clone()),
                None => f.clone(),
            },
            Formula::Mu(x, g) | Formula::Nu(x, g) => {
                let kind = f.binder().unwrap().0;
                let new = self.claim(x);
                scope.push((x.clone(), new.clone()));
                let body = self.go(g, scope);
                scope.pop();
                Formula::fix(kind, &new, body)
            }
            _ => f.map_children(|c| self.go(c, scope)),
        }
    }
}

/// `X ≻ Y` iff the binder of `Y` lies inside the body of the binder of `X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsumptionOrder {
    variables: Vec<VarName>,
    pairs: BTreeSet<(VarName, VarName)>,
}

impl SubsumptionOrder {
    pub fn subsumes(&self, x: &VarName, y: &VarName) -> bool {
        self.pairs.contains(&(x.clone(), y.clone()))
    }

    /// Bound variables, outermost binder first.
    pub fn variables(&self) -> &[VarName] {
        &self.variables
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&VarName, &VarName)> {
        self.pairs.iter().map(|(x, y)| (x, y))
    }
}
