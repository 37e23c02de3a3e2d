//! Suite runners producing serializable reports.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::catalog::non_sn_catalog;
use super::checks::{
    check_application_to_variable, check_arg_substitution_inclusion, check_same_type_substitution,
    check_sn_decomposition, check_sn_decomposition_with, Verdict,
};
use super::enumerate::{enumerate_types, TermEnumerator, TypedInstance};
use super::random::{random_term, random_typed_term_with};
use crate::canon::canonicalize;
use crate::sn::{analyze, SnStatus};
use crate::syntax::parse_term;
use crate::term::{fresh_name, Name, Substitution, Term, Type};
use crate::typing::{infer_canonical, Context};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Thm8,
    Sr,
    L3,
    L4,
    L5,
    L7,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::Thm8, Suite::Sr, Suite::L3, Suite::L4, Suite::L5, Suite::L7];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Thm8 => "thm8",
            Suite::Sr => "sr",
            Suite::L3 => "l3",
            Suite::L4 => "l4",
            Suite::L5 => "l5",
            Suite::L7 => "l7",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| format!("unknown suite `{s}` (expected thm8, sr, l3, l4, l5 or l7)"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    pub max_cxty: usize,
    pub lgt_bound: usize,
    pub fuel: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub config: SuiteConfig,
    /// Instances drawn by the sampled suites (l3, l5, l7).
    pub samples: usize,
    /// Contexts of the enumerated corpus.
    pub contexts: Vec<Context>,
}

impl SuiteOptions {
    pub fn new(suite: Suite) -> Self {
        let samples = match suite {
            Suite::L7 => 500,
            _ => 1000,
        };
        SuiteOptions {
            config: SuiteConfig { max_cxty: 7, lgt_bound: 2, fuel: crate::sn::DEFAULT_FUEL, seed: 0 },
            samples,
            contexts: default_contexts(),
        }
    }
}

/// `{}` and `{v:bot}`.
pub fn default_contexts() -> Vec<Context> {
    vec![Context::new(), Context::parse("v:bot").expect("valid context")]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub term: String,
    pub context: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub max_eta: usize,
    pub max_graph_nodes: usize,
    pub wall_ms: u64,
}

/// `passes + failures.len() == instances`; undecided instances are counted
/// apart and excluded from both.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub suite: String,
    pub config: SuiteConfig,
    pub instances: usize,
    pub passes: usize,
    pub failures: Vec<Failure>,
    pub undecided: usize,
    pub stats: Stats,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        format!(
            "{}: {} instances, {} passed, {} failed, {} undecided, max eta {}, max graph {}",
            self.suite,
            self.instances,
            self.passes,
            self.failures.len(),
            self.undecided,
            self.stats.max_eta,
            self.stats.max_graph_nodes
        )
    }
}

struct Tally {
    instances: usize,
    passes: usize,
    failures: Vec<Failure>,
    undecided: usize,
    stats: Stats,
}

impl Tally {
    fn new() -> Self {
        Tally { instances: 0, passes: 0, failures: Vec::new(), undecided: 0, stats: Stats::default() }
    }

    fn record(&mut self, verdict: &Verdict, term: &Term, context: &Context) {
        match verdict {
            Verdict::Holds => {
                self.instances += 1;
                self.passes += 1;
            }
            Verdict::Fails(reason) => {
                self.instances += 1;
                self.failures.push(Failure {
                    term: term.to_string(),
                    context: context.to_string(),
                    reason: reason.clone(),
                });
            }
            Verdict::Undecided(_) => self.undecided += 1,
        }
    }

    fn observe(&mut self, status: &SnStatus, nodes: usize) {
        if let Some(e) = status.eta() {
            self.stats.max_eta = self.stats.max_eta.max(e);
        }
        self.stats.max_graph_nodes = self.stats.max_graph_nodes.max(nodes);
    }

    fn finish(mut self, suite: Suite, config: &SuiteConfig, start: Instant) -> LemmaReport {
        self.failures.sort_by(|a, b| (&a.term, &a.context).cmp(&(&b.term, &b.context)));
        self.stats.wall_ms = start.elapsed().as_millis() as u64;
        LemmaReport {
            suite: suite.as_str().to_string(),
            config: config.clone(),
            instances: self.instances,
            passes: self.passes,
            failures: self.failures,
            undecided: self.undecided,
            stats: self.stats,
        }
    }
}

/// Calls `f` on every typed term of the corpus, context by context.
pub fn for_each_corpus_term(opts: &SuiteOptions, mut f: impl FnMut(&Context, &Type, Term)) {
    for g in &opts.contexts {
        let e = TermEnumerator::new(g, opts.config.lgt_bound, opts.config.max_cxty);
        e.for_each(|ty, m| f(g, ty, m));
    }
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> LemmaReport {
    let start = Instant::now();
    let tally = match suite {
        Suite::Thm8 => run_thm8(opts),
        Suite::Sr => run_sr(opts),
        Suite::L3 => run_l3(opts),
        Suite::L4 => run_l4(opts),
        Suite::L5 => run_l5(opts),
        Suite::L7 => run_l7(opts),
    };
    tally.finish(suite, &opts.config, start)
}

fn run_thm8(opts: &SuiteOptions) -> Tally {
    let mut t = Tally::new();
    for_each_corpus_term(opts, |g, _, m| {
        let a = analyze(canonicalize(&m), opts.config.fuel);
        t.observe(&a.status, a.nodes.len());
        let verdict = match &a.status {
            SnStatus::StronglyNormalizing { .. } => Verdict::Holds,
            other => Verdict::Fails(other.to_string()),
        };
        t.record(&verdict, &m, g);
    });
    t
}

fn run_sr(opts: &SuiteOptions) -> Tally {
    let mut t = Tally::new();
    for_each_corpus_term(opts, |g, ty, m| {
        let a = analyze(canonicalize(&m), opts.config.fuel);
        t.observe(&a.status, a.nodes.len());
        let mut verdict = Verdict::Holds;
        'edges: for succ in &a.successors {
            for &j in succ {
                if infer_canonical(g, &a.nodes[j]).as_ref() != Some(ty) {
                    verdict = Verdict::Fails(format!("reduct {} does not have type {ty}", a.nodes[j]));
                    break 'edges;
                }
            }
        }
        t.record(&verdict, &m, g);
    });
    t
}

/// Terms substituted in the inclusion suite.
pub fn substitution_pool() -> Vec<Term> {
    ["w", "w w", "\\a. a", "\\a. w", "\\a:bot. a a", "(\\a. a) w", "mu a. a w", "mu a:bot. w", "v", "x0"]
        .iter()
        .map(|s| parse_term(s).expect("pool entries parse"))
        .collect()
}

/// The sampled corpus instances, by seeded random access.
fn sample_corpus(opts: &SuiteOptions, rng: &mut ChaCha8Rng, n: usize) -> Vec<TypedInstance> {
    let enums: Vec<TermEnumerator> =
        opts.contexts.iter().map(|g| TermEnumerator::new(g, opts.config.lgt_bound, opts.config.max_cxty)).collect();
    let total: u128 = enums.iter().map(|e| e.total() as u128).sum();
    if total == 0 {
        return Vec::new();
    }
    (0..n)
        .map(|_| {
            let mut idx = rng.gen_range(0..total);
            for e in &enums {
                if idx < e.total() as u128 {
                    return e.nth(idx as u64).expect("index below total");
                }
                idx -= e.total() as u128;
            }
            unreachable!("index below total")
        })
        .collect()
}

/// Seeded `(M, x, N)` triples: `M` from the corpus, `x` a context variable
/// (or a bound-variable name when the context is empty), `N` from the pool.
pub fn inclusion_triples(opts: &SuiteOptions) -> Vec<(TypedInstance, Name, Term)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.config.seed);
    let pool = substitution_pool();
    sample_corpus(opts, &mut rng, opts.samples)
        .into_iter()
        .map(|inst| {
            let names: Vec<Name> = inst.context.iter().map(|(x, _)| x.clone()).collect();
            let x = names.choose(&mut rng).cloned().unwrap_or_else(|| Name::from("x0"));
            let n = pool.choose(&mut rng).expect("nonempty pool").clone();
            (inst, x, n)
        })
        .collect()
}

fn run_l3(opts: &SuiteOptions) -> Tally {
    let mut t = Tally::new();
    for (inst, x, n) in inclusion_triples(opts) {
        let verdict = check_arg_substitution_inclusion(&inst.term, &x, &n);
        let shown = Term::app(Term::lam(x, None, inst.term), n);
        t.record(&verdict, &shown, &inst.context);
    }
    t
}

fn run_l4(opts: &SuiteOptions) -> Tally {
    let mut t = Tally::new();
    let fuel = opts.config.fuel;
    for_each_corpus_term(opts, |g, _, m| {
        let a = analyze(canonicalize(&m), fuel);
        t.observe(&a.status, a.nodes.len());
        t.record(&check_sn_decomposition_with(&m, &a, fuel), &m, g);
    });
    for (_, m) in non_sn_catalog() {
        t.record(&check_sn_decomposition(&m, fuel), &m, &Context::new());
    }
    t
}

/// Fuel for screening candidate instances.
pub const SCREEN_FUEL: usize = 2_000;

/// Seeded SN terms, alternately typed and untyped; candidates that are not
/// decided SN within [`SCREEN_FUEL`] are skipped.
pub fn application_instances(opts: &SuiteOptions) -> Vec<(Context, Term)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.config.seed);
    let types = enumerate_types(opts.config.lgt_bound);
    let contexts = [Context::new(), Context::parse("v:bot, f:bot->bot").expect("valid context")];
    let budget = opts.config.max_cxty.max(1);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < opts.samples && attempts < opts.samples * 50 {
        attempts += 1;
        let candidate = if out.len() % 2 == 0 {
            let g = contexts.choose(&mut rng).expect("nonempty");
            let a = types.choose(&mut rng).expect("nonempty");
            random_typed_term_with(g, a, budget, opts.config.lgt_bound, &mut rng).map(|i| (i.context, i.term))
        } else {
            let size = rng.gen_range(1..=budget);
            Some((Context::new(), random_term(size, &[Name::from("w"), Name::from("y")], &mut rng)))
        };
        let Some((g, m)) = candidate else { continue };
        if analyze(canonicalize(&m), SCREEN_FUEL.min(opts.config.fuel)).status.is_sn() {
            out.push((g, m));
        }
    }
    out
}

fn run_l5(opts: &SuiteOptions) -> Tally {
    let mut t = Tally::new();
    for (g, m) in application_instances(opts) {
        let y = fresh_name("y", &m.free_vars());
        match check_application_to_variable(&m, &y, opts.config.fuel, false) {
            Ok(o) => {
                t.stats.max_eta = t.stats.max_eta.max(o.eta_my.unwrap_or(0));
                t.record(&o.verdict, &m, &g);
            }
            Err(e) => t.record(&Verdict::Fails(e.to_string()), &m, &g),
        }
    }
    t
}

/// Seeded same-type instances. Every fourth substitution maps its variables
/// to μ-abstractions.
pub fn same_type_instances(opts: &SuiteOptions) -> Vec<(TypedInstance, Substitution)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.config.seed);
    let types = enumerate_types(opts.config.lgt_bound);
    let budget = opts.config.max_cxty.max(3);
    let lgt = opts.config.lgt_bound;
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < opts.samples && attempts < opts.samples * 50 {
        attempts += 1;
        let a = types.choose(&mut rng).expect("nonempty").clone();
        let mut g = Context::new();
        g.insert("x1", a.clone());
        g.insert("x2", a.clone());
        g.insert("v", Type::Bot);
        let b = types.choose(&mut rng).expect("nonempty").clone();
        let Some(inst) = random_typed_term_with(&g, &b, budget, lgt, &mut rng) else { continue };
        let domain: Vec<&str> = match rng.gen_range(0..3) {
            0 => vec!["x1"],
            1 => vec!["x2"],
            _ => vec!["x1", "x2"],
        };
        let mu_images = out.len() % 4 == 0;
        let mut s = Substitution::new();
        for x in domain {
            let image = if mu_images {
                let inner = g.extended("a", Type::neg(a.clone()));
                random_typed_term_with(&inner, &Type::Bot, budget - 1, lgt, &mut rng)
                    .map(|i| Term::mu("a", Some(a.clone()), i.term))
            } else {
                random_typed_term_with(&g, &a, budget, lgt, &mut rng).map(|i| i.term)
            };
            if let Some(n) = image {
                s.insert(x, n);
            }
        }
        if s.is_empty() {
            continue;
        }
        out.push((inst, s));
    }
    out
}

fn run_l7(opts: &SuiteOptions) -> Tally {
    let mut t = Tally::new();
    for (inst, s) in same_type_instances(opts) {
        let shown = inst.term.substitute_parallel(&s);
        match check_same_type_substitution(&inst, &s, opts.config.fuel) {
            Ok(o) => {
                if let Some(q) = o.measure {
                    t.stats.max_eta = t.stats.max_eta.max(q.eta_m);
                }
                t.record(&o.verdict, &shown, &inst.context);
            }
            Err(e) => t.record(&Verdict::Fails(e.to_string()), &shown, &inst.context),
        }
    }
    t
}
