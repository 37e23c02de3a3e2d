//! Executable checks for the individual normalization lemmas.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::enumerate::TypedInstance;
use crate::canon::canonicalize;
use crate::reduction::{arg, arg_terms, head_redex_position};
use crate::sn::{analyze, SnAnalysis, SnStatus};
use crate::term::{fresh_name, Name, Substitution, Term, Type};
use crate::typing::{infer, Context};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails(String),
    /// Some status was not decided within the fuel.
    Undecided(String),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => f.write_str("holds"),
            Verdict::Fails(why) => write!(f, "fails: {why}"),
            Verdict::Undecided(why) => write!(f, "undecided: {why}"),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum LabError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("substituted variables have different types: {0}")]
    MixedTypes(String),
}

/// `[x1 := λu.(x1 (u y)), ...]` with `u` fresh.
pub fn build_mu_substitution(xs: &[Name], y: &str) -> Result<Substitution, LabError> {
    let distinct: BTreeSet<Name> = xs.iter().cloned().collect();
    if distinct.len() != xs.len() {
        return Err(LabError::Precondition("variables are not pairwise distinct".into()));
    }
    if distinct.contains(y) {
        return Err(LabError::Precondition(format!("`{y}` is among the substituted variables")));
    }
    let mut avoid = distinct;
    avoid.insert(Name::from(y));
    let u = fresh_name("u", &avoid);
    Ok(xs
        .iter()
        .map(|x| {
            let image = Term::lam(
                u.clone(),
                None,
                Term::app(Term::var(x.clone()), Term::app(Term::var(u.clone()), Term::var(y))),
            );
            (x.clone(), image)
        })
        .collect())
}

/// Ordered lexicographically, field by field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MeasureQuadruple {
    pub lgt_sigma: usize,
    pub eta_m: usize,
    pub cxty_m: usize,
    pub eta_sigma: usize,
}

impl fmt::Display for MeasureQuadruple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.lgt_sigma, self.eta_m, self.cxty_m, self.eta_sigma)
    }
}

/// The common type of the substituted variables; `None` for an empty `s`.
fn domain_type(g: &Context, s: &Substitution) -> Result<Option<Type>, LabError> {
    let mut common: Option<&Type> = None;
    for (x, _) in s.iter() {
        let t = g.get(x).ok_or_else(|| LabError::Precondition(format!("`{x}` is not in the context")))?;
        match common {
            None => common = Some(t),
            Some(c) if c != t => return Err(LabError::MixedTypes(format!("{c} and {t}"))),
            Some(_) => {}
        }
    }
    Ok(common.cloned())
}

fn status(m: &Term, fuel: usize) -> SnStatus {
    analyze(canonicalize(m), fuel).status
}

/// `Ok(None)` when some η is not decided within `fuel`.
pub fn measure_quadruple(
    g: &Context,
    s: &Substitution,
    m: &Term,
    fuel: usize,
) -> Result<Option<MeasureQuadruple>, LabError> {
    let lgt_sigma = domain_type(g, s)?.map_or(0, |t| t.lgt());
    let mut eta_sigma = 0;
    for (x, n) in s.iter() {
        match status(n, fuel) {
            SnStatus::StronglyNormalizing { eta, .. } => eta_sigma += m.free_occurrences(x) * eta,
            SnStatus::NotSN { .. } => {
                return Err(LabError::Precondition(format!("image of `{x}` is not strongly normalizing")))
            }
            SnStatus::Unknown { .. } => return Ok(None),
        }
    }
    let Some(eta_m) = status(m, fuel).eta() else { return Ok(None) };
    Ok(Some(MeasureQuadruple { lgt_sigma, eta_m, cxty_m: m.cxty(), eta_sigma }))
}

/// Renames every binder of `m` away from `avoid` and from each other.
fn rename_binders_apart(m: &Term, avoid: &BTreeSet<Name>) -> Term {
    fn go(t: &Term, used: &mut BTreeSet<Name>) -> Term {
        match t {
            Term::Var(_) => t.clone(),
            Term::Lam(x, ann, b) | Term::Mu(x, ann, b) => {
                let y = fresh_name(x, used);
                used.insert(y.clone());
                let body = go(&b.substitute(x, &Term::var(y.clone())), used);
                Term::binder(t.binder_kind().expect("binder"), y, ann.clone(), body)
            }
            Term::App(f, a) => Term::app(go(f, used), go(a, used)),
        }
    }
    let mut used = avoid.clone();
    used.extend(m.free_vars());
    go(m, &mut used)
}

/// `arg(M[x:=N]) ⊂ arg(N) ∪ {N} ∪ {Q[x:=N] | Q ∈ arg(M)}`, up to alpha.
///
/// Bound variables of `M` are first renamed apart from `x` and the free
/// variables of `N`, so that the substitution never renames.
pub fn check_arg_substitution_inclusion(m: &Term, x: &str, n: &Term) -> Verdict {
    let mut avoid = n.free_vars();
    avoid.insert(Name::from(x));
    let m = rename_binders_apart(m, &avoid);
    let lhs = arg(&m.substitute(x, n));
    let mut rhs = arg(n);
    rhs.insert(canonicalize(n));
    for q in arg_terms(&m) {
        rhs.insert(canonicalize(&q.substitute(x, n)));
    }
    match lhs.iter().find(|p| !rhs.contains(*p)) {
        None => Verdict::Holds,
        Some(p) => Verdict::Fails(format!("{p} is in the left side only")),
    }
}

/// `M ∈ SN iff arg(M) ⊂ SN and hred(M) ∈ SN`.
pub fn check_sn_decomposition(m: &Term, fuel: usize) -> Verdict {
    check_sn_decomposition_with(m, &analyze(canonicalize(m), fuel), fuel)
}

/// As [`check_sn_decomposition`], reusing an existing analysis of `m`.
pub fn check_sn_decomposition_with(m: &Term, analysis: &SnAnalysis, fuel: usize) -> Verdict {
    let Some(left) = analysis.status.decided() else {
        return Verdict::Undecided(format!("M: {}", analysis.status));
    };
    let mut right = true;
    if let Some(pos) = head_redex_position(m) {
        let h = canonicalize(m).reduce_at(&pos).expect("head redex position is valid");
        let known = analysis.successors[0].iter().find(|&&j| analysis.nodes[j] == h).and_then(|&j| analysis.eta[j]);
        if known.is_none() {
            match analyze(h, fuel).status.decided() {
                Some(sn) => right &= sn,
                None => return Verdict::Undecided("hred(M) undecided".into()),
            }
        }
    }
    for q in arg_terms(m) {
        match analyze(canonicalize(&q), fuel).status.decided() {
            Some(sn) => right &= sn,
            None => return Verdict::Undecided(format!("argument {q} undecided")),
        }
    }
    if left == right {
        Verdict::Holds
    } else {
        Verdict::Fails(format!("M is {}SN but the decomposition says otherwise", if left { "" } else { "not " }))
    }
}

/// Outcome of the application-to-a-variable check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApplicationOutcome {
    pub verdict: Verdict,
    pub eta_m: Option<usize>,
    pub eta_my: Option<usize>,
}

/// For `M ∈ SN`: `(M y) ∈ SN` and `η(M y) >= η(M)`. With `allow_free` unset,
/// `y` must not occur free in `M`.
pub fn check_application_to_variable(
    m: &Term,
    y: &str,
    fuel: usize,
    allow_free: bool,
) -> Result<ApplicationOutcome, LabError> {
    if !allow_free && m.is_free(y) {
        return Err(LabError::Precondition(format!("`{y}` occurs free in M")));
    }
    let eta_m = match status(m, fuel) {
        SnStatus::StronglyNormalizing { eta, .. } => eta,
        SnStatus::NotSN { .. } => return Err(LabError::Precondition("M is not strongly normalizing".into())),
        SnStatus::Unknown { .. } => {
            let verdict = Verdict::Undecided("M undecided".into());
            return Ok(ApplicationOutcome { verdict, eta_m: None, eta_my: None });
        }
    };
    let applied = status(&Term::app(m.clone(), Term::var(y)), fuel);
    let (verdict, eta_my) = match applied {
        SnStatus::StronglyNormalizing { eta, .. } if eta >= eta_m => (Verdict::Holds, Some(eta)),
        SnStatus::StronglyNormalizing { eta, .. } => {
            (Verdict::Fails(format!("η(M y) = {eta} < η(M) = {eta_m}")), Some(eta))
        }
        SnStatus::NotSN { .. } => (Verdict::Fails("(M y) is not strongly normalizing".into()), None),
        SnStatus::Unknown { .. } => (Verdict::Undecided("(M y) undecided".into()), None),
    };
    Ok(ApplicationOutcome { verdict, eta_m: Some(eta_m), eta_my })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionOutcome {
    pub verdict: Verdict,
    pub measure: Option<MeasureQuadruple>,
}

/// For a well-typed `M` and a substitution whose variables share one type
/// and whose images are SN terms of that type: `M[σ] ∈ SN`.
pub fn check_same_type_substitution(
    inst: &TypedInstance,
    s: &Substitution,
    fuel: usize,
) -> Result<SubstitutionOutcome, LabError> {
    let g = &inst.context;
    match infer(g, &inst.term) {
        Ok(t) if t == inst.ty => {}
        _ => return Err(LabError::Precondition(format!("{} is not of type {}", inst.term, inst.ty))),
    }
    if let Some(a) = domain_type(g, s)? {
        for (x, n) in s.iter() {
            if infer(g, n).as_ref() != Ok(&a) {
                return Err(LabError::Precondition(format!("image of `{x}` is not of type {a}")));
            }
        }
    }
    let Some(measure) = measure_quadruple(g, s, &inst.term, fuel)? else {
        let verdict = Verdict::Undecided("some measure is undecided".into());
        return Ok(SubstitutionOutcome { verdict, measure: None });
    };
    let verdict = match status(&inst.term.substitute_parallel(s), fuel) {
        SnStatus::StronglyNormalizing { .. } => Verdict::Holds,
        SnStatus::NotSN { .. } => Verdict::Fails("M[σ] is not strongly normalizing".into()),
        SnStatus::Unknown { .. } => Verdict::Undecided("M[σ] undecided".into()),
    };
    Ok(SubstitutionOutcome { verdict, measure: Some(measure) })
}
