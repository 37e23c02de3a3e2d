//! Terms, types and capture-avoiding substitution.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// Variable identifier. Cheap to clone.
pub type Name = Arc<str>;

/// Simple types over `bot` and `->`.
///
/// Negation is not a constructor: `¬A` is `A -> bot`. The derived ordering
/// puts `Bot` first and compares arrows by domain, then codomain.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Bot,
    Arrow(Arc<Type>, Arc<Type>),
}

impl Type {
    pub fn arrow(domain: Type, codomain: Type) -> Type {
        Type::Arrow(Arc::new(domain), Arc::new(codomain))
    }

    /// `A -> bot`.
    pub fn neg(a: Type) -> Type {
        Type::arrow(a, Type::Bot)
    }

    pub fn as_arrow(&self) -> Option<(&Type, &Type)> {
        match self {
            Type::Bot => None,
            Type::Arrow(a, b) => Some((a, b)),
        }
    }

    /// Number of connectives (arrows).
    pub fn lgt(&self) -> usize {
        match self {
            Type::Bot => 0,
            Type::Arrow(a, b) => 1 + a.lgt() + b.lgt(),
        }
    }
}

impl fmt::Debug for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Which binder introduced a variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinderKind {
    Lam,
    Mu,
}

/// A λμ-term with optional binder annotations.
///
/// A `Mu` annotation records the result type `A` of the μ-abstraction; the
/// bound variable itself has type `A -> bot`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Name),
    Lam(Name, Option<Type>, Box<Term>),
    Mu(Name, Option<Type>, Box<Term>),
    App(Box<Term>, Box<Term>),
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Term {
    pub fn var(name: impl Into<Name>) -> Term {
        Term::Var(name.into())
    }

    pub fn lam(name: impl Into<Name>, annot: Option<Type>, body: Term) -> Term {
        Term::Lam(name.into(), annot, Box::new(body))
    }

    pub fn mu(name: impl Into<Name>, annot: Option<Type>, body: Term) -> Term {
        Term::Mu(name.into(), annot, Box::new(body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    /// Builds `(head a1 ... an)`.
    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn binder(kind: BinderKind, name: Name, annot: Option<Type>, body: Term) -> Term {
        match kind {
            BinderKind::Lam => Term::Lam(name, annot, Box::new(body)),
            BinderKind::Mu => Term::Mu(name, annot, Box::new(body)),
        }
    }

    /// `(λxP Q)` or `(μxP Q)`.
    pub fn is_redex(&self) -> bool {
        matches!(self, Term::App(f, _) if matches!(**f, Term::Lam(..) | Term::Mu(..)))
    }

    /// Number of AST nodes.
    pub fn cxty(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Lam(_, _, b) | Term::Mu(_, _, b) => 1 + b.cxty(),
            Term::App(f, a) => 1 + f.cxty() + a.cxty(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a Name>, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(x) => {
                if !bound.contains(&x) {
                    out.insert(x.clone());
                }
            }
            Term::Lam(x, _, b) | Term::Mu(x, _, b) => {
                bound.push(x);
                b.collect_free(bound, out);
                bound.pop();
            }
            Term::App(f, a) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
            }
        }
    }

    pub fn is_free(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => &**y == x,
            Term::Lam(y, _, b) | Term::Mu(y, _, b) => &**y != x && b.is_free(x),
            Term::App(f, a) => f.is_free(x) || a.is_free(x),
        }
    }

    /// Number of free occurrences of `x`.
    pub fn free_occurrences(&self, x: &str) -> usize {
        match self {
            Term::Var(y) => usize::from(&**y == x),
            Term::Lam(y, _, b) | Term::Mu(y, _, b) => {
                if &**y == x {
                    0
                } else {
                    b.free_occurrences(x)
                }
            }
            Term::App(f, a) => f.free_occurrences(x) + a.free_occurrences(x),
        }
    }

    /// Every binder name occurring anywhere in the term.
    pub fn binder_names(&self) -> BTreeSet<Name> {
        fn go(t: &Term, out: &mut BTreeSet<Name>) {
            match t {
                Term::Var(_) => {}
                Term::Lam(x, _, b) | Term::Mu(x, _, b) => {
                    out.insert(x.clone());
                    go(b, out);
                }
                Term::App(f, a) => {
                    go(f, out);
                    go(a, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut out);
        out
    }

    /// `self[x:=n]`, capture-avoiding. Binders are renamed only when they
    /// would capture a free variable of `n`.
    pub fn substitute(&self, x: &str, n: &Term) -> Term {
        if !self.is_free(x) {
            return self.clone();
        }
        let fv_n = n.free_vars();
        self.subst_inner(x, n, &fv_n)
    }

    fn subst_inner(&self, x: &str, n: &Term, fv_n: &BTreeSet<Name>) -> Term {
        match self {
            Term::Var(y) => {
                if &**y == x {
                    n.clone()
                } else {
                    self.clone()
                }
            }
            Term::App(f, a) => Term::app(f.subst_inner(x, n, fv_n), a.subst_inner(x, n, fv_n)),
            Term::Lam(y, ann, body) | Term::Mu(y, ann, body) => {
                let kind = self.binder_kind().unwrap();
                if &**y == x || !body.is_free(x) {
                    return self.clone();
                }
                if fv_n.contains(y) {
                    let mut avoid = fv_n.clone();
                    avoid.extend(body.free_vars());
                    avoid.insert(x.into());
                    let fresh = fresh_name(y, &avoid);
                    let renamed = body.substitute(y, &Term::Var(fresh.clone()));
                    Term::binder(kind, fresh, ann.clone(), renamed.subst_inner(x, n, fv_n))
                } else {
                    Term::binder(kind, y.clone(), ann.clone(), body.subst_inner(x, n, fv_n))
                }
            }
        }
    }

    /// Simultaneous substitution `self[σ]`.
    pub fn substitute_parallel(&self, sigma: &Substitution) -> Term {
        let relevant: BTreeMap<Name, Term> =
            sigma.0.iter().filter(|(k, _)| self.is_free(k)).map(|(k, v)| (k.clone(), v.clone())).collect();
        if relevant.is_empty() {
            return self.clone();
        }
        self.par_inner(&relevant)
    }

    fn par_inner(&self, sigma: &BTreeMap<Name, Term>) -> Term {
        match self {
            Term::Var(y) => sigma.get(y).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, a) => Term::app(f.par_inner(sigma), a.par_inner(sigma)),
            Term::Lam(y, ann, body) | Term::Mu(y, ann, body) => {
                let kind = self.binder_kind().unwrap();
                let mut inner: BTreeMap<Name, Term> = sigma
                    .iter()
                    .filter(|(k, _)| *k != y && body.is_free(k))
                    .map(|(k, v)| (k.clone(), v.clone()))
                    .collect();
                if inner.is_empty() {
                    return self.clone();
                }
                let captures = inner.values().any(|v| v.is_free(y));
                if captures {
                    let mut avoid = body.free_vars();
                    for (k, v) in &inner {
                        avoid.insert(k.clone());
                        avoid.extend(v.free_vars());
                    }
                    let fresh = fresh_name(y, &avoid);
                    inner.insert(y.clone(), Term::Var(fresh.clone()));
                    Term::binder(kind, fresh, ann.clone(), body.par_inner(&inner))
                } else {
                    Term::binder(kind, y.clone(), ann.clone(), body.par_inner(&inner))
                }
            }
        }
    }

    pub fn binder_kind(&self) -> Option<BinderKind> {
        match self {
            Term::Lam(..) => Some(BinderKind::Lam),
            Term::Mu(..) => Some(BinderKind::Mu),
            _ => None,
        }
    }
}

/// Finite map from variables to terms, applied simultaneously.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution(pub BTreeMap<Name, Term>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(x: &str, n: Term) -> Self {
        let mut s = Self::new();
        s.insert(x, n);
        s
    }

    pub fn insert(&mut self, x: &str, n: Term) -> Option<Term> {
        self.0.insert(x.into(), n)
    }

    pub fn get(&self, x: &str) -> Option<&Term> {
        self.0.get(x)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Term)> {
        self.0.iter()
    }
}

impl FromIterator<(Name, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Name, Term)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

/// Deterministic fresh name: strips trailing primes from `base`, then tries
/// `base`, `base'`, `base''`, ... until one is outside `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<Name>) -> Name {
    let stem = base.trim_end_matches('\'');
    let mut candidate = stem.to_string();
    while avoid.contains(candidate.as_str()) {
        candidate.push('\'');
    }
    candidate.into()
}
