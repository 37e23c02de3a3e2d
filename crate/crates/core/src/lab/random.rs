//! Seeded random terms: goal-directed typed sampling and plain untyped trees.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::enumerate::{enumerate_types, TypedInstance};
use crate::term::{fresh_name, Name, Term, Type};
use crate::typing::Context;

/// Annotation bound used by [`random_typed_term`].
pub const DEFAULT_ANNOTATION_LGT: usize = 2;

const MAX_CALLS: usize = 20_000;

#[derive(Clone, Copy)]
enum Rule {
    Var,
    Lam,
    Mu,
    App,
}

struct Sampler<'r> {
    rng: &'r mut ChaCha8Rng,
    types: Vec<Type>,
    calls: usize,
}

impl Sampler<'_> {
    fn gen(&mut self, scope: &mut Vec<(Name, Type)>, a: &Type, budget: usize) -> Option<Term> {
        self.calls += 1;
        if budget == 0 || self.calls > MAX_CALLS {
            return None;
        }
        let mut rules = vec![Rule::Var];
        if budget >= 2 {
            if a.as_arrow().is_some() {
                rules.push(Rule::Lam);
            }
            rules.push(Rule::Mu);
        }
        if budget >= 3 {
            rules.push(Rule::App);
        }
        rules.shuffle(self.rng);
        for rule in rules {
            let found = match rule {
                Rule::Var => {
                    let mut names: Vec<&Name> = Vec::new();
                    for (i, (x, t)) in scope.iter().enumerate() {
                        let shadowed = scope[i + 1..].iter().any(|(y, _)| y == x);
                        if t == a && !shadowed {
                            names.push(x);
                        }
                    }
                    names.choose(self.rng).map(|x| Term::var((*x).clone()))
                }
                Rule::Lam => {
                    let (dom, cod) = a.as_arrow().expect("arrow checked");
                    let (dom, cod) = (dom.clone(), cod.clone());
                    let x = self.binder(scope);
                    scope.push((x.clone(), dom.clone()));
                    let body = self.gen(scope, &cod, budget - 1);
                    scope.pop();
                    body.map(|b| Term::lam(x, Some(dom), b))
                }
                Rule::Mu => {
                    let x = self.binder(scope);
                    scope.push((x.clone(), Type::neg(a.clone())));
                    let body = self.gen(scope, &Type::Bot, budget - 1);
                    scope.pop();
                    body.map(|b| Term::mu(x, Some(a.clone()), b))
                }
                Rule::App => {
                    let b = self.types.choose(self.rng).expect("nonempty inventory").clone();
                    let fun_budget = self.rng.gen_range(1..=budget - 2);
                    let fun = self.gen(scope, &Type::arrow(b.clone(), a.clone()), fun_budget);
                    match fun {
                        Some(fun) => {
                            let rest = budget - 1 - fun.cxty();
                            self.gen(scope, &b, rest).map(|arg| Term::app(fun, arg))
                        }
                        None => None,
                    }
                }
            };
            if found.is_some() {
                return found;
            }
        }
        None
    }

    fn binder(&mut self, scope: &[(Name, Type)]) -> Name {
        let base = ["a", "b", "c", "d"].choose(self.rng).expect("nonempty");
        if self.rng.gen_bool(0.5) {
            return Name::from(*base);
        }
        let avoid = scope.iter().map(|(x, _)| x.clone()).collect();
        fresh_name(base, &avoid)
    }
}

/// A random `M` with `g ⊢ M : a` and `cxty(M) <= size_budget`, or `None` if
/// sampling finds none.
pub fn random_typed_term(g: &Context, a: &Type, size_budget: usize, seed: u64) -> Option<TypedInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_typed_term_with(g, a, size_budget, DEFAULT_ANNOTATION_LGT, &mut rng)
}

pub fn random_typed_term_with(
    g: &Context,
    a: &Type,
    size_budget: usize,
    annotation_lgt: usize,
    rng: &mut ChaCha8Rng,
) -> Option<TypedInstance> {
    let mut sampler = Sampler { rng, types: enumerate_types(annotation_lgt), calls: 0 };
    for _ in 0..16 {
        sampler.calls = 0;
        let mut scope: Vec<(Name, Type)> = g.iter().map(|(x, t)| (x.clone(), t.clone())).collect();
        if let Some(term) = sampler.gen(&mut scope, a, size_budget) {
            return Some(TypedInstance { context: g.clone(), term, ty: a.clone() });
        }
    }
    None
}

/// An unannotated term with exactly `size` nodes whose free variables are
/// drawn from `free`.
pub fn random_term(size: usize, free: &[Name], rng: &mut ChaCha8Rng) -> Term {
    fn go(size: usize, scope: &mut Vec<Name>, free: &[Name], rng: &mut ChaCha8Rng) -> Term {
        let pick_var = |scope: &[Name], rng: &mut ChaCha8Rng| {
            let k = scope.len() + free.len();
            if k == 0 {
                return Term::var("w");
            }
            let i = rng.gen_range(0..k);
            Term::var(if i < scope.len() { scope[i].clone() } else { free[i - scope.len()].clone() })
        };
        if size <= 1 {
            return pick_var(scope, rng);
        }
        let choice = if size == 2 { rng.gen_range(0..2) } else { rng.gen_range(0..4) };
        match choice {
            0 | 1 => {
                let x = Name::from(format!("b{}", scope.len()));
                scope.push(x.clone());
                let body = go(size - 1, scope, free, rng);
                scope.pop();
                if choice == 0 {
                    Term::lam(x, None, body)
                } else {
                    Term::mu(x, None, body)
                }
            }
            _ => {
                let s1 = rng.gen_range(1..size - 1);
                let f = go(s1, scope, free, rng);
                let a = go(size - 1 - s1, scope, free, rng);
                Term::app(f, a)
            }
        }
    }
    go(size.max(1), &mut Vec::new(), free, rng)
}
