//! The two cut-elimination rules, redex addressing, head forms and the
//! `hred`/`arg` analyzers.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::canon::{canonicalize, mu_annotations, CanonicalTerm};
use crate::term::{fresh_name, BinderKind, Name, Term, Type};

/// One step of a path from the root to a subterm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    LamBody,
    MuBody,
    AppFun,
    AppArg,
}

impl Step {
    pub fn as_str(self) -> &'static str {
        match self {
            Step::LamBody => "lam",
            Step::MuBody => "mu",
            Step::AppFun => "fun",
            Step::AppArg => "arg",
        }
    }
}

/// Dot-separated path, `root` when empty.
pub fn format_path(path: &[Step]) -> String {
    if path.is_empty() {
        return "root".into();
    }
    path.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(".")
}

/// Address of a redex: the path to an `App` whose function part is a binder.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RedexPosition(pub Vec<Step>);

impl RedexPosition {
    pub fn root() -> Self {
        RedexPosition(Vec::new())
    }
}

impl fmt::Display for RedexPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_path(&self.0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("not a redex: {0}")]
    NotARedex(Term),
    #[error("no redex at position {0}")]
    InvalidPosition(RedexPosition),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixBinder {
    pub kind: BinderKind,
    pub name: Name,
    pub annot: Option<Type>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Head {
    Var(Name),
    /// `(λxP Q)` or `(μxP Q)`.
    Redex(Term),
}

/// `λμ-prefix (head spine...)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeadForm {
    pub prefix: Vec<PrefixBinder>,
    pub head: Head,
    pub spine: Vec<Term>,
}

impl HeadForm {
    pub fn is_head_normal(&self) -> bool {
        matches!(self.head, Head::Var(_))
    }

    /// Rebuilds the decomposed term.
    pub fn reassemble(&self) -> Term {
        let head = match &self.head {
            Head::Var(x) => Term::Var(x.clone()),
            Head::Redex(r) => r.clone(),
        };
        self.wrap(head)
    }

    /// Puts `head` in place of the head and re-applies spine and prefix.
    fn wrap(&self, head: Term) -> Term {
        let body = Term::apps(head, self.spine.iter().cloned());
        self.prefix.iter().rev().fold(body, |acc, b| Term::binder(b.kind, b.name.clone(), b.annot.clone(), acc))
    }
}

pub fn head_form(m: &Term) -> HeadForm {
    let mut prefix = Vec::new();
    let mut cur = m;
    while let Term::Lam(x, ann, b) | Term::Mu(x, ann, b) = cur {
        prefix.push(PrefixBinder { kind: cur.binder_kind().unwrap(), name: x.clone(), annot: ann.clone() });
        cur = b;
    }
    let mut spine = Vec::new();
    while let Term::App(f, a) = cur {
        spine.push((**a).clone());
        cur = f;
    }
    spine.reverse();
    let head = match cur {
        Term::Var(x) => Head::Var(x.clone()),
        // The body of a maximal prefix is not a binder, so a binder head has
        // at least one argument.
        binder => Head::Redex(Term::app(binder.clone(), spine.remove(0))),
    };
    HeadForm { prefix, head, spine }
}

/// Contracts `(λxP Q)` to `P[x:=Q]` and `(μxP Q)` to `μy P[x:=λz (y (z Q))]`.
pub fn contract_redex(r: &Term) -> Result<Term, ReductionError> {
    contract_avoiding(r, &BTreeSet::new())
}

/// As [`contract_redex`]; the fresh `y`, `z` of the μ-rule also avoid `extra`.
fn contract_avoiding(r: &Term, extra: &BTreeSet<Name>) -> Result<Term, ReductionError> {
    let Term::App(f, q) = r else { return Err(ReductionError::NotARedex(r.clone())) };
    match &**f {
        Term::Lam(x, _, p) => Ok(p.substitute(x, q)),
        Term::Mu(x, ann, p) => {
            let mut avoid = p.free_vars();
            avoid.extend(q.free_vars());
            avoid.extend(extra.iter().cloned());
            let y = fresh_name("y", &avoid);
            avoid.insert(y.clone());
            let z = fresh_name("z", &avoid);
            let (ann_y, ann_z) = mu_annotations(ann.as_ref());
            let wrapper = Term::Lam(
                z.clone(),
                ann_z,
                Box::new(Term::app(Term::Var(y.clone()), Term::app(Term::Var(z), (**q).clone()))),
            );
            Ok(Term::Mu(y, ann_y, Box::new(p.substitute(x, &wrapper))))
        }
        _ => Err(ReductionError::NotARedex(r.clone())),
    }
}

/// All redex positions, leftmost-outermost first.
pub fn redex_positions(m: &Term) -> Vec<RedexPosition> {
    fn go(t: &Term, path: &mut Vec<Step>, out: &mut Vec<RedexPosition>) {
        match t {
            Term::Var(_) => {}
            Term::Lam(_, _, b) | Term::Mu(_, _, b) => {
                path.push(if matches!(t, Term::Lam(..)) { Step::LamBody } else { Step::MuBody });
                go(b, path, out);
                path.pop();
            }
            Term::App(f, a) => {
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
    go(m, &mut Vec::new(), &mut out);
    out
}

/// Contracts the redex at `p`, leaving everything else untouched.
pub fn reduce_at(m: &Term, p: &RedexPosition) -> Result<Term, ReductionError> {
    fn go(t: &Term, steps: &[Step], binders: &mut BTreeSet<Name>) -> Option<Term> {
        let Some((first, rest)) = steps.split_first() else {
            return t.is_redex().then(|| contract_avoiding(t, binders).ok()).flatten();
        };
        match (first, t) {
            (Step::LamBody, Term::Lam(x, ann, b)) | (Step::MuBody, Term::Mu(x, ann, b)) => {
                let added = binders.insert(x.clone());
                let inner = go(b, rest, binders);
                if added {
                    binders.remove(x);
                }
                Some(Term::binder(t.binder_kind().unwrap(), x.clone(), ann.clone(), inner?))
            }
            (Step::AppFun, Term::App(f, a)) => Some(Term::app(go(f, rest, binders)?, (**a).clone())),
            (Step::AppArg, Term::App(f, a)) => Some(Term::app((**f).clone(), go(a, rest, binders)?)),
            _ => None,
        }
    }
    go(m, &p.0, &mut BTreeSet::new()).ok_or_else(|| ReductionError::InvalidPosition(p.clone()))
}

/// One-step reducts as canonical forms, via named contraction at every
/// redex position.
pub fn one_step_reducts(m: &Term) -> BTreeSet<CanonicalTerm> {
    redex_positions(m).iter().map(|p| canonicalize(&reduce_at(m, p).expect("position from redex_positions"))).collect()
}

/// Position of the head redex, if any.
pub fn head_redex_position(m: &Term) -> Option<RedexPosition> {
    let hf = head_form(m);
    if hf.is_head_normal() {
        return None;
    }
    let mut path: Vec<Step> = hf
        .prefix
        .iter()
        .map(|b| match b.kind {
            BinderKind::Lam => Step::LamBody,
            BinderKind::Mu => Step::MuBody,
        })
        .collect();
    path.extend(std::iter::repeat_n(Step::AppFun, hf.spine.len()));
    Some(RedexPosition(path))
}

/// Reduces the head redex; `None` for a head normal form.
pub fn hred(m: &Term) -> Option<Term> {
    let pos = head_redex_position(m)?;
    Some(reduce_at(m, &pos).expect("head redex position is valid"))
}

/// The argument set of the head form.
pub fn arg(m: &Term) -> BTreeSet<CanonicalTerm> {
    arg_terms(m).iter().map(canonicalize).collect()
}

/// [`arg`] before canonicalization, in left-to-right order.
pub fn arg_terms(m: &Term) -> Vec<Term> {
    let hf = head_form(m);
    let mut out = Vec::new();
    if let Head::Redex(Term::App(f, q)) = &hf.head {
        if let Term::Lam(_, _, p) | Term::Mu(_, _, p) = &**f {
            out.push((**p).clone());
        }
        out.push((**q).clone());
    }
    out.extend(hf.spine);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Head,
    LeftmostOutermost,
    Random(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub position: RedexPosition,
    pub term: Term,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceEnd {
    NormalForm,
    HeadNormalForm,
    /// `max_steps` reached with redexes left.
    Truncated,
}

#[derive(Clone, Debug)]
pub struct Trace {
    pub start: Term,
    pub steps: Vec<TraceStep>,
    pub end: TraceEnd,
}

impl Trace {
    pub fn last(&self) -> &Term {
        self.steps.last().map_or(&self.start, |s| &s.term)
    }

    /// `index path term` per step, starting at 1.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.steps.iter().enumerate() {
            out.push_str(&format!("{} {} {}\n", i + 1, s.position, s.term));
        }
        out
    }
}

pub fn reduce_with_strategy(m: &Term, strategy: Strategy, max_steps: usize) -> Trace {
    let mut rng = match strategy {
        Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut steps = Vec::new();
    let mut cur = m.clone();
    let end = loop {
        let pos = match strategy {
            Strategy::Head => match head_redex_position(&cur) {
                Some(p) => p,
                None => break TraceEnd::HeadNormalForm,
            },
            Strategy::LeftmostOutermost | Strategy::Random(_) => {
                let mut all = redex_positions(&cur);
                if all.is_empty() {
                    break TraceEnd::NormalForm;
                }
                match rng.as_mut() {
                    Some(rng) => all.swap_remove(rng.gen_range(0..all.len())),
                    None => all.swap_remove(0),
                }
            }
        };
        if steps.len() == max_steps {
            break TraceEnd::Truncated;
        }
        cur = reduce_at(&cur, &pos).expect("valid position");
        steps.push(TraceStep { position: pos, term: cur.clone() });
    };
    Trace { start: m.clone(), steps, end }
}
