//! Church-style type checking for the four rules `ax`, `->i`, `->e`, `bot_c`.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::canon::{canonicalize, CanonicalTerm};
use crate::reduction::Step;
use crate::syntax::{parse_bindings, ParseError};
use crate::term::{Name, Term, Type};

/// Typing context. Extending with an existing name shadows it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Context(BTreeMap<Name, Type>);

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses `name:Type, ...`. A repeated name keeps its last type.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Ok(parse_bindings(text)?.into_iter().collect())
    }

    pub fn get(&self, x: &str) -> Option<&Type> {
        self.0.get(x)
    }

    pub fn insert(&mut self, x: impl Into<Name>, ty: Type) -> Option<Type> {
        self.0.insert(x.into(), ty)
    }

    pub fn extended(&self, x: impl Into<Name>, ty: Type) -> Self {
        let mut g = self.clone();
        g.insert(x, ty);
        g
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Type)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(Name, Type)> for Context {
    fn from_iter<I: IntoIterator<Item = (Name, Type)>>(iter: I) -> Self {
        Context(iter.into_iter().collect())
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}:{t}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypeErrorKind {
    UnannotatedBinder,
    UnboundVariable,
    NotAnArrow,
    ArgumentMismatch,
    MuBodyNotBot,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{kind:?} at {}: {detail}", crate::reduction::format_path(path))]
pub struct TypeError {
    pub kind: TypeErrorKind,
    /// Path from the root to the offending subterm.
    pub path: Vec<Step>,
    pub detail: String,
}

/// Length (connective count) of a type.
pub fn lgt(a: &Type) -> usize {
    a.lgt()
}

struct Checker<'g> {
    ctx: &'g Context,
    scope: Vec<(&'g Name, Type)>,
    path: Vec<Step>,
}

impl<'g> Checker<'g> {
    fn err<T>(&self, kind: TypeErrorKind, detail: String) -> Result<T, TypeError> {
        Err(TypeError { kind, path: self.path.clone(), detail })
    }

    fn lookup(&self, x: &str) -> Option<&Type> {
        self.scope.iter().rev().find(|(y, _)| &***y == x).map(|(_, t)| t).or_else(|| self.ctx.get(x))
    }

    fn infer(&mut self, m: &'g Term) -> Result<Type, TypeError> {
        match m {
            Term::Var(x) => match self.lookup(x) {
                Some(t) => Ok(t.clone()),
                None => self.err(TypeErrorKind::UnboundVariable, format!("`{x}` is not in the context")),
            },
            Term::Lam(x, ann, body) => {
                let Some(a) = ann else {
                    return self.err(TypeErrorKind::UnannotatedBinder, format!("λ-binder `{x}`"));
                };
                self.scope.push((x, a.clone()));
                self.path.push(Step::LamBody);
                let b = self.infer(body);
                self.path.pop();
                self.scope.pop();
                Ok(Type::arrow(a.clone(), b?))
            }
            Term::Mu(x, ann, body) => {
                let Some(a) = ann else {
                    return self.err(TypeErrorKind::UnannotatedBinder, format!("μ-binder `{x}`"));
                };
                self.scope.push((x, Type::neg(a.clone())));
                self.path.push(Step::MuBody);
                let b = self.infer(body);
                self.path.pop();
                self.scope.pop();
                match b? {
                    Type::Bot => Ok(a.clone()),
                    other => self.err(TypeErrorKind::MuBodyNotBot, format!("body of `mu {x}` has type {other}")),
                }
            }
            Term::App(f, n) => {
                self.path.push(Step::AppFun);
                let tf = self.infer(f);
                self.path.pop();
                let tf = tf?;
                let Some((a, b)) = tf.as_arrow() else {
                    return self.err(TypeErrorKind::NotAnArrow, format!("function part has type {tf}"));
                };
                self.path.push(Step::AppArg);
                let tn = self.infer(n);
                self.path.pop();
                let tn = tn?;
                if &tn != a {
                    return self
                        .err(TypeErrorKind::ArgumentMismatch, format!("expected argument of type {a}, found {tn}"));
                }
                Ok(b.clone())
            }
        }
    }
}

/// The unique type of `m` under `g`, if any.
pub fn infer(g: &Context, m: &Term) -> Result<Type, TypeError> {
    Checker { ctx: g, scope: Vec::new(), path: Vec::new() }.infer(m)
}

/// [`infer`] on the alpha-quotient, without error details.
pub fn infer_canonical(g: &Context, m: &CanonicalTerm) -> Option<Type> {
    fn go(g: &Context, m: &CanonicalTerm, scope: &mut Vec<Type>) -> Option<Type> {
        match m {
            CanonicalTerm::Bound(i) => scope.iter().rev().nth(*i as usize).cloned(),
            CanonicalTerm::Free(x) => g.get(x).cloned(),
            CanonicalTerm::Lam(ann, body) => {
                let a = ann.clone()?;
                scope.push(a.clone());
                let b = go(g, body, scope);
                scope.pop();
                Some(Type::arrow(a, b?))
            }
            CanonicalTerm::Mu(ann, body) => {
                let a = ann.clone()?;
                scope.push(Type::neg(a.clone()));
                let b = go(g, body, scope);
                scope.pop();
                (b? == Type::Bot).then_some(a)
            }
            CanonicalTerm::App(f, n) => {
                let tf = go(g, f, scope)?;
                let (a, b) = tf.as_arrow()?;
                (go(g, n, scope)? == *a).then(|| b.clone())
            }
        }
    }
    go(g, m, &mut Vec::new())
}

/// Rule names as printed by `--explain`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Ax,
    ArrowIntro,
    ArrowElim,
    BotC,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Ax => "ax",
            Rule::ArrowIntro => "->i",
            Rule::ArrowElim => "->e",
            Rule::BotC => "bot_c",
        })
    }
}

/// A typing derivation tree.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub rule: Rule,
    pub term: Term,
    pub ty: Type,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    /// One line per node, premises indented under their conclusion.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        use std::fmt::Write;
        let _ = writeln!(out, "{:indent$}{}  {} : {}", "", self.rule, self.term, self.ty, indent = depth * 2);
        for p in &self.premises {
            p.render_into(depth + 1, out);
        }
    }
}

/// Builds the derivation of `g ⊢ m : A`.
pub fn derive(g: &Context, m: &Term) -> Result<Derivation, TypeError> {
    let ty = infer(g, m)?;
    Ok(build_derivation(g, m, ty))
}

fn build_derivation(g: &Context, m: &Term, ty: Type) -> Derivation {
    // `m` is known to be well-typed here, so every recursive infer succeeds.
    let (rule, premises) = match m {
        Term::Var(_) => (Rule::Ax, vec![]),
        Term::Lam(x, Some(a), body) => {
            let g2 = g.extended(x.clone(), a.clone());
            let tb = infer(&g2, body).expect("premise of ->i");
            (Rule::ArrowIntro, vec![build_derivation(&g2, body, tb)])
        }
        Term::Mu(x, Some(a), body) => {
            let g2 = g.extended(x.clone(), Type::neg(a.clone()));
            (Rule::BotC, vec![build_derivation(&g2, body, Type::Bot)])
        }
        Term::App(f, n) => {
            let tf = infer(g, f).expect("premise of ->e");
            let tn = infer(g, n).expect("premise of ->e");
            (Rule::ArrowElim, vec![build_derivation(g, f, tf), build_derivation(g, n, tn)])
        }
        _ => unreachable!("well-typed terms carry annotations"),
    };
    Derivation { rule, term: m.clone(), ty, premises }
}

/// An edge whose target does not keep the root's type.
#[derive(Clone, Debug)]
pub struct Violation {
    pub from: CanonicalTerm,
    pub to: CanonicalTerm,
    pub found: Result<Type, TypeError>,
}

#[derive(Clone, Debug)]
pub struct SubjectReductionReport {
    pub root_type: Type,
    pub nodes: usize,
    pub edges: usize,
    /// False when the step bound cut exploration short.
    pub complete: bool,
    pub violations: Vec<Violation>,
}

impl SubjectReductionReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Explores reducts of `m` up to `steps` reduction steps (alpha-quotiented)
/// and checks that every reachable term has the root's type.
pub fn check_subject_reduction(g: &Context, m: &Term, steps: usize) -> Result<SubjectReductionReport, TypeError> {
    let root_type = infer(g, m)?;
    let root = canonicalize(m);
    let mut seen: HashSet<CanonicalTerm> = HashSet::from([root.clone()]);
    let mut queue = VecDeque::from([(root, 0usize)]);
    let mut edges = 0;
    let mut complete = true;
    let mut violations = Vec::new();
    while let Some((node, depth)) = queue.pop_front() {
        let reducts = node.one_step_reducts();
        if depth >= steps {
            complete &= reducts.is_empty();
            continue;
        }
        for r in reducts {
            edges += 1;
            let found = infer(g, &r.to_term());
            if found.as_ref() != Ok(&root_type) {
                violations.push(Violation { from: node.clone(), to: r.clone(), found });
            }
            if seen.insert(r.clone()) {
                queue.push_back((r, depth + 1));
            }
        }
    }
    Ok(SubjectReductionReport { root_type, nodes: seen.len(), edges, complete, violations })
}
