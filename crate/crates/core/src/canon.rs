//! Binder-nameless terms: the alpha-quotient.
//!
//! A [`CanonicalTerm`] replaces bound names by de Bruijn indices and keeps
//! free names, so two named terms share a canonical form exactly when they
//! are alpha-equivalent. Reduction-graph nodes are canonical terms, and the
//! one-step relation is also implemented directly on them.

use std::collections::BTreeSet;
use std::fmt;

use crate::reduction::{RedexPosition, Step};
use crate::term::{fresh_name, BinderKind, Name, Term, Type};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CanonicalTerm {
    /// De Bruijn index: 0 is the innermost enclosing binder.
    Bound(u32),
    Free(Name),
    Lam(Option<Type>, Box<CanonicalTerm>),
    Mu(Option<Type>, Box<CanonicalTerm>),
    App(Box<CanonicalTerm>, Box<CanonicalTerm>),
}

use CanonicalTerm as C;

pub fn canonicalize(m: &Term) -> CanonicalTerm {
    fn go(t: &Term, scope: &mut Vec<Name>) -> CanonicalTerm {
        match t {
            Term::Var(x) => match scope.iter().rev().position(|y| y == x) {
                Some(i) => C::Bound(i as u32),
                None => C::Free(x.clone()),
            },
            Term::Lam(x, ann, b) | Term::Mu(x, ann, b) => {
                scope.push(x.clone());
                let body = Box::new(go(b, scope));
                scope.pop();
                if matches!(t, Term::Lam(..)) {
                    C::Lam(ann.clone(), body)
                } else {
                    C::Mu(ann.clone(), body)
                }
            }
            Term::App(f, a) => C::App(Box::new(go(f, scope)), Box::new(go(a, scope))),
        }
    }
    go(m, &mut Vec::new())
}

pub fn alpha_eq(m: &Term, n: &Term) -> bool {
    canonicalize(m) == canonicalize(n)
}

impl CanonicalTerm {
    pub fn app(f: CanonicalTerm, a: CanonicalTerm) -> CanonicalTerm {
        C::App(Box::new(f), Box::new(a))
    }

    pub fn cxty(&self) -> usize {
        match self {
            C::Bound(_) | C::Free(_) => 1,
            C::Lam(_, b) | C::Mu(_, b) => 1 + b.cxty(),
            C::App(f, a) => 1 + f.cxty() + a.cxty(),
        }
    }

    pub fn free_names(&self) -> BTreeSet<Name> {
        fn go(t: &CanonicalTerm, out: &mut BTreeSet<Name>) {
            match t {
                C::Bound(_) => {}
                C::Free(x) => {
                    out.insert(x.clone());
                }
                C::Lam(_, b) | C::Mu(_, b) => go(b, out),
                C::App(f, a) => {
                    go(f, out);
                    go(a, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut out);
        out
    }

    /// A named representative. The binder at depth `k` is called `xk`
    /// (primed if that clashes with a free name).
    pub fn to_term(&self) -> Term {
        let avoid = self.free_names();
        let mut level_names: Vec<Name> = Vec::new();
        self.to_term_inner(&avoid, &mut level_names)
    }

    fn to_term_inner(&self, avoid: &BTreeSet<Name>, scope: &mut Vec<Name>) -> Term {
        match self {
            C::Bound(i) => Term::Var(scope[scope.len() - 1 - *i as usize].clone()),
            C::Free(x) => Term::Var(x.clone()),
            C::Lam(ann, b) | C::Mu(ann, b) => {
                let name = fresh_name(&format!("x{}", scope.len()), avoid);
                scope.push(name.clone());
                let body = b.to_term_inner(avoid, scope);
                scope.pop();
                let kind = if matches!(self, C::Lam(..)) { BinderKind::Lam } else { BinderKind::Mu };
                Term::binder(kind, name, ann.clone(), body)
            }
            C::App(f, a) => Term::app(f.to_term_inner(avoid, scope), a.to_term_inner(avoid, scope)),
        }
    }

    pub fn is_redex(&self) -> bool {
        matches!(self, C::App(f, _) if matches!(**f, C::Lam(..) | C::Mu(..)))
    }

    pub fn is_normal(&self) -> bool {
        match self {
            C::Bound(_) | C::Free(_) => true,
            C::Lam(_, b) | C::Mu(_, b) => b.is_normal(),
            C::App(f, a) => !self.is_redex() && f.is_normal() && a.is_normal(),
        }
    }

    /// Adds `d` to every index `>= cutoff`.
    fn shift(&self, d: u32, cutoff: u32) -> CanonicalTerm {
        if d == 0 {
            return self.clone();
        }
        match self {
            C::Bound(i) if *i >= cutoff => C::Bound(i + d),
            C::Bound(_) | C::Free(_) => self.clone(),
            C::Lam(ann, b) => C::Lam(ann.clone(), Box::new(b.shift(d, cutoff + 1))),
            C::Mu(ann, b) => C::Mu(ann.clone(), Box::new(b.shift(d, cutoff + 1))),
            C::App(f, a) => C::app(f.shift(d, cutoff), a.shift(d, cutoff)),
        }
    }

    /// Replaces index `depth` by `arg` (which lives outside the removed
    /// binder) and lowers the indices above it: the body half of β.
    fn instantiate(&self, depth: u32, arg: &CanonicalTerm) -> CanonicalTerm {
        match self {
            C::Bound(i) if *i == depth => arg.shift(depth, 0),
            C::Bound(i) if *i > depth => C::Bound(i - 1),
            C::Bound(_) | C::Free(_) => self.clone(),
            C::Lam(ann, b) => C::Lam(ann.clone(), Box::new(b.instantiate(depth + 1, arg))),
            C::Mu(ann, b) => C::Mu(ann.clone(), Box::new(b.instantiate(depth + 1, arg))),
            C::App(f, a) => C::app(f.instantiate(depth, arg), a.instantiate(depth, arg)),
        }
    }

    /// Replaces index `depth` by `repl`, which lives in the same scope as the
    /// replaced variable, keeping every other index.
    fn replace(&self, depth: u32, repl: &CanonicalTerm) -> CanonicalTerm {
        match self {
            C::Bound(i) if *i == depth => repl.shift(depth, 0),
            C::Bound(_) | C::Free(_) => self.clone(),
            C::Lam(ann, b) => C::Lam(ann.clone(), Box::new(b.replace(depth + 1, repl))),
            C::Mu(ann, b) => C::Mu(ann.clone(), Box::new(b.replace(depth + 1, repl))),
            C::App(f, a) => C::app(f.replace(depth, repl), a.replace(depth, repl)),
        }
    }

    /// Contracts a redex at the root; `None` if `self` is not a redex.
    pub fn contract(&self) -> Option<CanonicalTerm> {
        let C::App(f, q) = self else { return None };
        match &**f {
            C::Lam(_, p) => Some(p.instantiate(0, q)),
            C::Mu(ann, p) => {
                let (ann_y, ann_z) = mu_annotations(ann.as_ref());
                // λz.(y (z Q)) under the new μy: y = 1, z = 0.
                let wrapper = C::Lam(ann_z, Box::new(C::app(C::Bound(1), C::app(C::Bound(0), q.shift(2, 0)))));
                Some(C::Mu(ann_y, Box::new(p.replace(0, &wrapper))))
            }
            _ => None,
        }
    }

    /// All one-step reducts, sorted and without duplicates.
    pub fn one_step_reducts(&self) -> Vec<CanonicalTerm> {
        let mut out = Vec::new();
        self.push_reducts(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn push_reducts(&self, out: &mut Vec<CanonicalTerm>) {
        match self {
            C::Bound(_) | C::Free(_) => {}
            C::Lam(ann, b) | C::Mu(ann, b) => {
                let start = out.len();
                b.push_reducts(out);
                let lam = matches!(self, C::Lam(..));
                for r in &mut out[start..] {
                    let inner = Box::new(std::mem::replace(r, C::Bound(0)));
                    *r = if lam { C::Lam(ann.clone(), inner) } else { C::Mu(ann.clone(), inner) };
                }
            }
            C::App(f, a) => {
                if let Some(r) = self.contract() {
                    out.push(r);
                }
                let start = out.len();
                f.push_reducts(out);
                for r in &mut out[start..] {
                    let inner = std::mem::replace(r, C::Bound(0));
                    *r = C::app(inner, (**a).clone());
                }
                let start = out.len();
                a.push_reducts(out);
                for r in &mut out[start..] {
                    let inner = std::mem::replace(r, C::Bound(0));
                    *r = C::app((**f).clone(), inner);
                }
            }
        }
    }

    /// Redex positions in leftmost-outermost order.
    pub fn redex_positions(&self) -> Vec<RedexPosition> {
        fn go(t: &CanonicalTerm, path: &mut Vec<Step>, out: &mut Vec<RedexPosition>) {
            match t {
                C::Bound(_) | C::Free(_) => {}
                C::Lam(_, b) => {
                    path.push(Step::LamBody);
                    go(b, path, out);
                    path.pop();
                }
                C::Mu(_, b) => {
                    path.push(Step::MuBody);
                    go(b, path, out);
                    path.pop();
                }
                C::App(f, a) => {
                    if t.is_redex() {
                        out.push(RedexPosition(path.clone()));
                    }
                    path.push(Step::AppFun);
                    go(f, path, out);
                    path.pop();
                    path.push(Step::AppArg);
                    go(a, path, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Contracts the redex at `pos`; `None` if `pos` does not address one.
    pub fn reduce_at(&self, pos: &RedexPosition) -> Option<CanonicalTerm> {
        fn go(t: &CanonicalTerm, steps: &[Step]) -> Option<CanonicalTerm> {
            let Some((first, rest)) = steps.split_first() else { return t.contract() };
            match (first, t) {
                (Step::LamBody, C::Lam(ann, b)) => Some(C::Lam(ann.clone(), Box::new(go(b, rest)?))),
                (Step::MuBody, C::Mu(ann, b)) => Some(C::Mu(ann.clone(), Box::new(go(b, rest)?))),
                (Step::AppFun, C::App(f, a)) => Some(C::app(go(f, rest)?, (**a).clone())),
                (Step::AppArg, C::App(f, a)) => Some(C::app((**f).clone(), go(a, rest)?)),
                _ => None,
            }
        }
        go(self, &pos.0)
    }
}

/// Annotations of the fresh binders `μy` and `λz` created by the μ-rule:
/// for a μ annotated `A -> B`, `y` gets `B` and `z` gets `A -> B`.
pub(crate) fn mu_annotations(ann: Option<&Type>) -> (Option<Type>, Option<Type>) {
    match ann {
        Some(t @ Type::Arrow(_, b)) => (Some((**b).clone()), Some(t.clone())),
        _ => (None, None),
    }
}

impl fmt::Display for CanonicalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_term(), f)
    }
}

impl fmt::Debug for CanonicalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn c(s: &str) -> CanonicalTerm {
        canonicalize(&parse_term(s).unwrap())
    }

    #[test]
    fn alpha_equivalent_terms_share_a_key() {
        assert_eq!(c("\\x. x"), c("\\y. y"));
        assert_eq!(c("\\x. \\y. x y"), c("\\y. \\x. y x"));
        assert_ne!(c("\\x. x"), c("mu x. x"));
        assert_ne!(c("x"), c("y"));
        assert_eq!(c("(\\x. x) z"), c("(\\y. y) z"));
    }

    #[test]
    fn annotations_participate() {
        assert_ne!(c("\\x:bot. x"), c("\\x. x"));
        assert_ne!(c("\\x:bot. x"), c("\\x:bot->bot. x"));
    }

    #[test]
    fn to_term_round_trips_through_canonicalize() {
        for s in ["\\x. \\y. x y z", "mu a. a (\\x0. x0 x1)", "x0 (\\x. x x0)"] {
            let k = c(s);
            assert_eq!(canonicalize(&k.to_term()), k);
        }
    }

    #[test]
    fn names_by_level_avoid_free_names() {
        let k = c("\\a. a x0");
        assert_eq!(k.to_term(), parse_term("\\x0'. x0' x0").unwrap());
    }

    #[test]
    fn nameless_beta_and_mu() {
        assert_eq!(c("(\\x. \\y. x y) y").contract().unwrap(), c("\\z. y z"));
        let got = c("(mu x:(bot->bot). x (\\w:bot. w)) v").contract().unwrap();
        let want = c("mu y:bot. (\\z:(bot->bot). y (z v)) (\\w:bot. w)");
        assert_eq!(got, want);
    }

    #[test]
    fn omega_reduces_to_itself() {
        let omega = c("(\\x. x x) (\\x. x x)");
        assert_eq!(omega.one_step_reducts(), vec![omega.clone()]);
    }
}
