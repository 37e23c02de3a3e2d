//! Exhaustive enumeration of annotated, well-typed terms.
//!
//! Counting tables indexed by (context multiset, size) drive both a streaming
//! generator and random-access unranking; the two produce the same order.
//! Binders are named by depth (`x0`, `x1`, ...), so every alpha-class occurs
//! exactly once.

use rustc_hash::FxHashMap as HashMap;

use crate::term::{fresh_name, Name, Term, Type};
use crate::typing::Context;

/// A term together with its typing judgement `context ⊢ term : ty`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedInstance {
    pub context: Context,
    pub term: Term,
    pub ty: Type,
}

/// All types with at most `max_lgt` arrows, by lgt and then by type order.
pub fn enumerate_types(max_lgt: usize) -> Vec<Type> {
    let mut by_lgt: Vec<Vec<Type>> = vec![vec![Type::Bot]];
    for n in 1..=max_lgt {
        let mut level = Vec::new();
        for k in 0..n {
            for dom in &by_lgt[k] {
                for cod in &by_lgt[n - 1 - k] {
                    level.push(Type::arrow(dom.clone(), cod.clone()));
                }
            }
        }
        level.sort();
        by_lgt.push(level);
    }
    by_lgt.into_iter().flatten().collect()
}

type TypeId = u32;
type CtxId = u32;

/// A productive application shape: `(fun arg)` with `fun : arg_ty -> ty`.
#[derive(Clone, Copy)]
struct Split {
    fun_size: u32,
    arg_ty: TypeId,
    fun_ty: TypeId,
    fun_count: u64,
    arg_count: u64,
}

#[derive(Default)]
struct Table {
    /// Nonzero counts, by type id.
    entries: Vec<(TypeId, u64)>,
    /// Result types that have application shapes, with their range in `splits`.
    ranges: Vec<(TypeId, u32, u32)>,
    /// Application shapes, grouped by result type, then by function size and
    /// argument type.
    splits: Vec<Split>,
}

impl Table {
    fn position(&self, t: TypeId) -> Option<usize> {
        self.entries.binary_search_by_key(&t, |&(u, _)| u).ok()
    }

    fn get(&self, t: TypeId) -> u64 {
        self.position(t).map_or(0, |i| self.entries[i].1)
    }

    fn splits_of(&self, t: TypeId) -> &[Split] {
        match self.ranges.binary_search_by_key(&t, |&(u, _, _)| u) {
            Ok(i) => &self.splits[self.ranges[i].1 as usize..self.ranges[i].2 as usize],
            Err(_) => &[],
        }
    }
}

pub struct TermEnumerator {
    base: Vec<(Name, TypeId)>,
    context: Context,
    max_size: usize,
    arrows: HashMap<(TypeId, TypeId), TypeId>,
    parts: Vec<Option<(TypeId, TypeId)>>,
    bot: TypeId,
    /// (annotation, its negation)
    annotations: Vec<(TypeId, TypeId)>,
    annotation_types: Vec<Type>,
    contexts: HashMap<Vec<TypeId>, CtxId>,
    ctx_members: Vec<Vec<TypeId>>,
    extend: HashMap<(CtxId, TypeId), CtxId>,
    tables: HashMap<(CtxId, usize), Table>,
    binder_names: Vec<Name>,
}

impl TermEnumerator {
    /// Prepares counts for terms up to `max_size` nodes under `context`,
    /// with binder annotations drawn from `enumerate_types(annotation_lgt)`.
    pub fn new(context: &Context, annotation_lgt: usize, max_size: usize) -> Self {
        let mut e = TermEnumerator {
            base: Vec::new(),
            context: context.clone(),
            max_size,
            arrows: HashMap::default(),
            parts: Vec::new(),
            bot: 0,
            annotations: Vec::new(),
            annotation_types: Vec::new(),
            contexts: HashMap::default(),
            ctx_members: Vec::new(),
            extend: HashMap::default(),
            tables: HashMap::default(),
            binder_names: Vec::new(),
        };
        e.bot = e.intern(&Type::Bot);
        for a in enumerate_types(annotation_lgt) {
            let id = e.intern(&a);
            let neg = e.intern(&Type::neg(a.clone()));
            e.annotations.push((id, neg));
            e.annotation_types.push(a);
        }
        e.base = context.iter().map(|(x, t)| (x.clone(), e.intern(t))).collect();
        let avoid = context.iter().map(|(x, _)| x.clone()).collect();
        e.binder_names = (0..max_size).map(|k| fresh_name(&format!("x{k}"), &avoid)).collect();
        let mut members: Vec<TypeId> = e.base.iter().map(|(_, t)| *t).collect();
        members.sort_unstable();
        let root = e.ctx_id(members);
        for size in 1..=max_size {
            e.fill(root, size);
        }
        e
    }

    fn intern(&mut self, t: &Type) -> TypeId {
        match t {
            Type::Bot => match self.parts.iter().position(Option::is_none) {
                Some(id) => id as TypeId,
                None => {
                    self.parts.push(None);
                    (self.parts.len() - 1) as TypeId
                }
            },
            Type::Arrow(a, b) => {
                let (a, b) = (self.intern(a), self.intern(b));
                self.arrow(a, b)
            }
        }
    }

    fn arrow(&mut self, a: TypeId, b: TypeId) -> TypeId {
        if let Some(&id) = self.arrows.get(&(a, b)) {
            return id;
        }
        let id = self.parts.len() as TypeId;
        self.arrows.insert((a, b), id);
        self.parts.push(Some((a, b)));
        id
    }

    fn type_of(&self, t: TypeId) -> Type {
        if let Some(i) = self.annotations.iter().position(|&(a, _)| a == t) {
            return self.annotation_types[i].clone();
        }
        match self.parts[t as usize] {
            None => Type::Bot,
            Some((a, b)) => Type::arrow(self.type_of(a), self.type_of(b)),
        }
    }

    fn lookup(&self, t: &Type) -> Option<TypeId> {
        match t {
            Type::Bot => Some(self.bot),
            Type::Arrow(a, b) => self.arrows.get(&(self.lookup(a)?, self.lookup(b)?)).copied(),
        }
    }

    fn split_arrow(&self, t: TypeId) -> Option<(TypeId, TypeId)> {
        self.parts[t as usize]
    }

    fn ctx_id(&mut self, members: Vec<TypeId>) -> CtxId {
        if let Some(&id) = self.contexts.get(&members) {
            return id;
        }
        let id = self.ctx_members.len() as CtxId;
        self.contexts.insert(members.clone(), id);
        self.ctx_members.push(members);
        id
    }

    fn ctx_extend(&mut self, ctx: CtxId, t: TypeId) -> CtxId {
        if let Some(&id) = self.extend.get(&(ctx, t)) {
            return id;
        }
        let mut members = self.ctx_members[ctx as usize].clone();
        let pos = members.partition_point(|&m| m < t);
        members.insert(pos, t);
        let id = self.ctx_id(members);
        self.extend.insert((ctx, t), id);
        id
    }

    fn fill(&mut self, ctx: CtxId, size: usize) {
        if size == 0 || self.tables.contains_key(&(ctx, size)) {
            return;
        }
        let mut counts: HashMap<TypeId, u64> = HashMap::default();
        let mut splits: HashMap<TypeId, Vec<Split>> = HashMap::default();
        if size == 1 {
            for &t in &self.ctx_members[ctx as usize] {
                *counts.entry(t).or_default() += 1;
            }
        } else {
            for (a, neg_a) in self.annotations.clone() {
                let inner = self.ctx_extend(ctx, a);
                self.fill(inner, size - 1);
                let body: Vec<(TypeId, u64)> = self.tables[&(inner, size - 1)].entries.clone();
                for (c, n) in body {
                    let t = self.arrow(a, c);
                    *counts.entry(t).or_default() += n;
                }
                let inner = self.ctx_extend(ctx, neg_a);
                self.fill(inner, size - 1);
                let n = self.tables[&(inner, size - 1)].get(self.bot);
                if n > 0 {
                    *counts.entry(a).or_default() += n;
                }
            }
            for s1 in 1..size - 1 {
                let s2 = size - 1 - s1;
                self.fill(ctx, s1);
                self.fill(ctx, s2);
                let funs = self.tables[&(ctx, s1)].entries.clone();
                for (ft, n) in funs {
                    if let Some((b, c)) = self.split_arrow(ft) {
                        let m = self.tables[&(ctx, s2)].get(b);
                        if m > 0 {
                            *counts.entry(c).or_default() += n * m;
                            splits.entry(c).or_default().push(Split {
                                fun_size: s1 as u32,
                                arg_ty: b,
                                fun_ty: ft,
                                fun_count: n,
                                arg_count: m,
                            });
                        }
                    }
                }
            }
        }
        let mut entries: Vec<(TypeId, u64)> = counts.into_iter().collect();
        entries.sort_unstable();
        let mut shapes: Vec<(TypeId, Vec<Split>)> = splits.into_iter().collect();
        shapes.sort_unstable_by_key(|(t, _)| *t);
        let mut table = Table { entries, ranges: Vec::with_capacity(shapes.len()), splits: Vec::new() };
        for (t, group) in shapes {
            let start = table.splits.len() as u32;
            table.splits.extend(group);
            table.ranges.push((t, start, table.splits.len() as u32));
        }
        table.splits.shrink_to_fit();
        self.tables.insert((ctx, size), table);
    }

    fn root_ctx(&self) -> CtxId {
        let mut members: Vec<TypeId> = self.base.iter().map(|(_, t)| *t).collect();
        members.sort_unstable();
        self.contexts[&members]
    }

    fn table(&self, ctx: CtxId, size: usize) -> Option<&Table> {
        self.tables.get(&(ctx, size))
    }

    fn count_id(&self, ctx: CtxId, ty: TypeId, size: usize) -> u64 {
        self.table(ctx, size).map_or(0, |t| t.get(ty))
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    pub fn context(&self) -> &Context {
        &self.context
    }

    /// Number of terms of type `ty` with exactly `size` nodes.
    pub fn count(&self, ty: &Type, size: usize) -> u64 {
        match self.lookup(ty) {
            Some(id) if size <= self.max_size => self.count_id(self.root_ctx(), id, size),
            _ => 0,
        }
    }

    /// Inhabited types at `size` with their counts, in [`for_each`](Self::for_each) order.
    pub fn types_at(&self, size: usize) -> Vec<(Type, u64)> {
        self.table(self.root_ctx(), size)
            .map(|t| t.entries.iter().map(|&(id, n)| (self.type_of(id), n)).collect())
            .unwrap_or_default()
    }

    /// Number of terms of any type with at most `max_size` nodes.
    pub fn total(&self) -> u64 {
        let root = self.root_ctx();
        (1..=self.max_size).filter_map(|s| self.table(root, s)).flat_map(|t| &t.entries).map(|&(_, n)| n).sum()
    }

    /// Streams every term, ordered by size and then by a fixed type order.
    pub fn for_each(&self, mut f: impl FnMut(&Type, Term)) {
        let root = self.root_ctx();
        let mut scope: Vec<(Name, TypeId)> = self.base.clone();
        for size in 1..=self.max_size {
            let Some(table) = self.table(root, size) else { continue };
            for &(ty, _) in &table.entries {
                let t = self.type_of(ty);
                self.gen(root, &mut scope, ty, size, &mut |m| f(&t, m));
            }
        }
    }

    /// Streams the terms of type `ty` with exactly `size` nodes.
    pub fn for_each_of_type(&self, ty: &Type, size: usize, mut f: impl FnMut(Term)) {
        let Some(id) = self.lookup(ty) else { return };
        if size > self.max_size {
            return;
        }
        let mut scope = self.base.clone();
        self.gen(self.root_ctx(), &mut scope, id, size, &mut f);
    }

    fn neg_of(&self, a: TypeId) -> Option<TypeId> {
        self.annotations.iter().find(|(t, _)| *t == a).map(|(_, n)| *n)
    }

    fn is_annotation(&self, a: TypeId) -> bool {
        self.annotations.iter().any(|(t, _)| *t == a)
    }

    fn extended(&self, ctx: CtxId, t: TypeId) -> CtxId {
        self.extend[&(ctx, t)]
    }

    fn gen(&self, ctx: CtxId, scope: &mut Vec<(Name, TypeId)>, ty: TypeId, size: usize, f: &mut dyn FnMut(Term)) {
        if self.count_id(ctx, ty, size) == 0 {
            return;
        }
        if size == 1 {
            for (x, t) in scope.iter() {
                if *t == ty {
                    f(Term::Var(x.clone()));
                }
            }
            return;
        }
        let depth = scope.len() - self.base.len();
        let name = &self.binder_names[depth];
        if let Some((a, c)) = self.split_arrow(ty) {
            if self.is_annotation(a) {
                let inner = self.extended(ctx, a);
                scope.push((name.clone(), a));
                let ann = self.type_of(a);
                self.gen(inner, scope, c, size - 1, &mut |body| {
                    f(Term::Lam(name.clone(), Some(ann.clone()), Box::new(body)))
                });
                scope.pop();
            }
        }
        if let Some(neg) = self.neg_of(ty) {
            let inner = self.extended(ctx, neg);
            scope.push((name.clone(), neg));
            let ann = self.type_of(ty);
            self.gen(inner, scope, self.bot, size - 1, &mut |body| {
                f(Term::Mu(name.clone(), Some(ann.clone()), Box::new(body)))
            });
            scope.pop();
        }
        let Some(table) = self.table(ctx, size) else { return };
        for sp in table.splits_of(ty) {
            let mut funs = Vec::with_capacity(sp.fun_count as usize);
            self.gen(ctx, scope, sp.fun_ty, sp.fun_size as usize, &mut |m| funs.push(m));
            for fun in funs {
                self.gen(ctx, scope, sp.arg_ty, size - 1 - (sp.fun_size as usize), &mut |a| {
                    f(Term::app(fun.clone(), a))
                });
            }
        }
    }

    /// The `idx`-th term of type `ty` and size `size` in generation order.
    pub fn unrank(&self, ty: &Type, size: usize, idx: u64) -> Option<Term> {
        let id = self.lookup(ty)?;
        let root = self.root_ctx();
        if idx >= self.count_id(root, id, size) {
            return None;
        }
        let mut scope = self.base.clone();
        Some(self.unrank_in(root, &mut scope, id, size, idx))
    }

    fn unrank_in(&self, ctx: CtxId, scope: &mut Vec<(Name, TypeId)>, ty: TypeId, size: usize, mut idx: u64) -> Term {
        if size == 1 {
            let (x, _) = scope.iter().filter(|(_, t)| *t == ty).nth(idx as usize).expect("rank in range");
            return Term::Var(x.clone());
        }
        let depth = scope.len() - self.base.len();
        let name = self.binder_names[depth].clone();
        if let Some((a, c)) = self.split_arrow(ty) {
            if self.is_annotation(a) {
                let inner = self.extended(ctx, a);
                let n = self.count_id(inner, c, size - 1);
                if idx < n {
                    scope.push((name.clone(), a));
                    let body = self.unrank_in(inner, scope, c, size - 1, idx);
                    scope.pop();
                    return Term::Lam(name, Some(self.type_of(a)), Box::new(body));
                }
                idx -= n;
            }
        }
        if let Some(neg) = self.neg_of(ty) {
            let inner = self.extended(ctx, neg);
            let n = self.count_id(inner, self.bot, size - 1);
            if idx < n {
                scope.push((name.clone(), neg));
                let body = self.unrank_in(inner, scope, self.bot, size - 1, idx);
                scope.pop();
                return Term::Mu(name, Some(self.type_of(ty)), Box::new(body));
            }
            idx -= n;
        }
        let table = self.table(ctx, size).expect("rank within count");
        for sp in table.splits_of(ty) {
            let block = sp.fun_count * sp.arg_count;
            if idx < block {
                let fun = self.unrank_in(ctx, scope, sp.fun_ty, sp.fun_size as usize, idx / sp.arg_count);
                let arg = self.unrank_in(ctx, scope, sp.arg_ty, size - 1 - (sp.fun_size as usize), idx % sp.arg_count);
                return Term::app(fun, arg);
            }
            idx -= block;
        }
        unreachable!("rank within count")
    }

    /// The `idx`-th term in [`for_each`](Self::for_each) order.
    pub fn nth(&self, mut idx: u64) -> Option<TypedInstance> {
        let root = self.root_ctx();
        for size in 1..=self.max_size {
            let Some(table) = self.table(root, size) else { continue };
            for &(id, n) in &table.entries {
                if idx < n {
                    let mut scope = self.base.clone();
                    let term = self.unrank_in(root, &mut scope, id, size, idx);
                    let ty = self.type_of(id);
                    return Some(TypedInstance { context: self.context.clone(), term, ty });
                }
                idx -= n;
            }
        }
        None
    }
}

/// Every term `m` with `g ⊢ m : a` and at most `max_cxty` nodes, binder
/// annotations bounded by `annotation_lgt`.
pub fn enumerate_typed_terms(g: &Context, a: &Type, max_cxty: usize, annotation_lgt: usize) -> Vec<TypedInstance> {
    let e = TermEnumerator::new(g, annotation_lgt, max_cxty);
    let mut out = Vec::new();
    for size in 1..=max_cxty {
        e.for_each_of_type(a, size, |term| out.push(TypedInstance { context: g.clone(), term, ty: a.clone() }));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, parse_type};
    use crate::typing::infer;

    fn ty(s: &str) -> Type {
        parse_type(s).unwrap()
    }

    #[test]
    fn type_inventory() {
        assert_eq!(enumerate_types(0), vec![ty("bot")]);
        assert_eq!(enumerate_types(1), vec![ty("bot"), ty("bot->bot")]);
        assert_eq!(enumerate_types(2), vec![ty("bot"), ty("bot->bot"), ty("bot->(bot->bot)"), ty("(bot->bot)->bot")]);
        assert_eq!(enumerate_types(3).len(), 1 + 1 + 2 + 5);
    }

    #[test]
    fn small_enumerations() {
        let ids = enumerate_typed_terms(&Context::new(), &ty("bot->bot"), 2, 1);
        assert!(ids.iter().any(|i| i.term == parse_term("\\x0:bot. x0").unwrap()));

        let g = Context::parse("y:bot").unwrap();
        let got = enumerate_typed_terms(&g, &ty("bot"), 1, 2);
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].term, parse_term("y").unwrap());
    }

    #[test]
    fn streaming_and_unranking_agree() {
        let g = Context::parse("v:bot").unwrap();
        let e = TermEnumerator::new(&g, 2, 6);
        let mut streamed = Vec::new();
        e.for_each(|t, m| streamed.push((t.clone(), m)));
        assert_eq!(streamed.len() as u64, e.total());
        for (i, (t, m)) in streamed.iter().enumerate() {
            let inst = e.nth(i as u64).unwrap();
            assert_eq!((&inst.ty, &inst.term), (t, m), "index {i}");
        }
        assert!(e.nth(e.total()).is_none());
    }

    #[test]
    fn every_enumerated_term_checks() {
        let g = Context::parse("v:bot").unwrap();
        let e = TermEnumerator::new(&g, 2, 7);
        e.for_each(|t, m| {
            assert_eq!(&infer(&g, &m).unwrap(), t, "{m}");
            assert!(m.cxty() <= 7);
        });
    }

    #[test]
    fn counts_match_streams_per_type() {
        let e = TermEnumerator::new(&Context::new(), 2, 6);
        for size in 1..=6 {
            for (t, n) in e.types_at(size) {
                let mut k = 0;
                e.for_each_of_type(&t, size, |_| k += 1);
                assert_eq!(k, n);
                assert_eq!(e.count(&t, size), n);
            }
        }
    }

    #[test]
    fn binder_names_avoid_context() {
        let g = Context::parse("x0:bot").unwrap();
        let e = TermEnumerator::new(&g, 0, 3);
        let mut names = Vec::new();
        e.for_each(|_, m| names.extend(m.binder_names()));
        assert!(names.iter().all(|n| &**n != "x0"));
    }
}
