//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use lambda_mu::lab::suite::{application_instances, inclusion_triples, same_type_instances, SuiteOptions};
use lambda_mu::lab::{
    catalog_sources, check_application_to_variable, check_arg_substitution_inclusion, check_same_type_substitution,
    check_sn_decomposition, check_sn_decomposition_with, measure_quadruple, random_term, MeasureQuadruple, Suite,
    TermEnumerator, Verdict,
};
use lambda_mu::reduction::{contract_redex, one_step_reducts, redex_positions, reduce_at};
use lambda_mu::sn::{analyze, explore_sn, SnStatus};
use lambda_mu::{canonicalize, infer_canonical, parse_term, parse_type, Context, Name, Term, Type};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MAX_CXTY: usize = 11;
const LGT_BOUND: usize = 2;
const FUEL: usize = 100_000;
const ORACLE_CXTY: usize = 7;
const OMEGA_FUEL: usize = 10;
const L5_SAMPLES: usize = 1000;
const L3_SAMPLES: usize = 1000;
const L7_SAMPLES: usize = 500;
const L7_MIN_MU_IMAGES: usize = 50;
const MU_REDEXES: usize = 100;
const SEED: u64 = 20_240_601;

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, n: usize, name: &str, ok: bool, detail: String) {
        if !ok {
            self.failed += 1;
        }
        println!("criterion {n:>2} {name}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    }
}

/// Longest reduction by explicit enumeration of every path, named route, no memo.
fn brute_force_eta(m: &Term, depth_limit: usize) -> Option<usize> {
    if depth_limit == 0 {
        return None;
    }
    let mut best = 0;
    for p in redex_positions(m) {
        let r = reduce_at(m, &p).expect("listed position");
        best = best.max(1 + brute_force_eta(&r, depth_limit - 1)?);
    }
    Some(best)
}

#[derive(Default)]
struct Sweep {
    terms: u64,
    sn: u64,
    not_sn: u64,
    unknown: u64,
    first_non_sn: Option<String>,
    max_eta: usize,
    max_nodes: usize,
    edges: u64,
    sr_violations: u64,
    first_sr: Option<String>,
    oracle_terms: u64,
    oracle_mismatch: u64,
    first_oracle: Option<String>,
    step_checked: u64,
    step_violations: u64,
    first_step: Option<String>,
    l4_holds: u64,
    l4_fails: u64,
    l4_undecided: u64,
    first_l4: Option<String>,
    roundtrip_fail: u64,
    first_roundtrip: Option<String>,
}

fn note(slot: &mut Option<String>, msg: impl FnOnce() -> String) {
    if slot.is_none() {
        *slot = Some(msg());
    }
}

impl Sweep {
    fn visit(&mut self, g: &Context, ty: &Type, m: Term) {
        self.terms += 1;

        let printed = m.to_string();
        if parse_term(&printed).as_ref() != Ok(&m) {
            self.roundtrip_fail += 1;
            note(&mut self.first_roundtrip, || printed.clone());
        }

        let a = analyze(canonicalize(&m), FUEL);
        self.max_nodes = self.max_nodes.max(a.nodes.len());
        match &a.status {
            SnStatus::StronglyNormalizing { eta, .. } => {
                self.sn += 1;
                self.max_eta = self.max_eta.max(*eta);
            }
            SnStatus::NotSN { .. } => {
                self.not_sn += 1;
                note(&mut self.first_non_sn, || format!("{m}: {}", a.status));
            }
            SnStatus::Unknown { .. } => {
                self.unknown += 1;
                note(&mut self.first_non_sn, || format!("{m}: {}", a.status));
            }
        }

        if a.nodes.len() > 1 {
            let mut typed = vec![None; a.nodes.len()];
            for succ in &a.successors {
                for &j in succ {
                    self.edges += 1;
                    let ok = *typed[j].get_or_insert_with(|| infer_canonical(g, &a.nodes[j]).as_ref() == Some(ty));
                    if !ok {
                        self.sr_violations += 1;
                        note(&mut self.first_sr, || format!("{m} ->* {}", a.nodes[j]));
                    }
                }
            }
        }

        if let Some(eta_m) = a.status.eta() {
            let reducts = one_step_reducts(&m);
            if !reducts.is_empty() {
                self.step_checked += 1;
                let mut max = 0;
                let mut ok = true;
                for n in reducts {
                    match analyze(n, FUEL).status.eta() {
                        Some(e) => {
                            ok &= e < eta_m;
                            max = max.max(e);
                        }
                        None => ok = false,
                    }
                }
                if !ok || max + 1 != eta_m {
                    self.step_violations += 1;
                    note(&mut self.first_step, || format!("{m}: eta {eta_m}, max over reducts {max}"));
                }
            }
            if m.cxty() <= ORACLE_CXTY {
                self.oracle_terms += 1;
                let brute = brute_force_eta(&m, 64);
                if brute != Some(eta_m) {
                    self.oracle_mismatch += 1;
                    note(&mut self.first_oracle, || format!("{m}: memo {eta_m}, brute force {brute:?}"));
                }
            }
        }

        match check_sn_decomposition_with(&m, &a, FUEL) {
            Verdict::Holds => self.l4_holds += 1,
            Verdict::Fails(why) => {
                self.l4_fails += 1;
                note(&mut self.first_l4, || format!("{m}: {why}"));
            }
            Verdict::Undecided(_) => self.l4_undecided += 1,
        }
    }
}

fn corpus_sweep(report: &mut Report) {
    let start = Instant::now();
    let mut s = Sweep::default();
    for g in [Context::new(), Context::parse("v:bot").unwrap()] {
        let e = TermEnumerator::new(&g, LGT_BOUND, MAX_CXTY);
        e.for_each(|ty, m| s.visit(&g, ty, m));
    }
    let secs = start.elapsed().as_secs_f64();

    report.line(
        1,
        "typed terms are strongly normalizing",
        s.not_sn == 0 && s.unknown == 0 && s.sn == s.terms && s.terms > 0,
        format!(
            "{} terms, cxty <= {MAX_CXTY}, annotations lgt <= {LGT_BOUND}, fuel {FUEL}: {} SN, {} NotSN, {} Unknown, max eta {}, max graph {}, {secs:.0}s{}",
            s.terms,
            s.sn,
            s.not_sn,
            s.unknown,
            s.max_eta,
            s.max_nodes,
            s.first_non_sn.map(|x| format!("; first: {x}")).unwrap_or_default()
        ),
    );
    report.line(
        2,
        "subject reduction on every explored edge",
        s.sr_violations == 0 && s.edges > 0,
        format!(
            "{} edges, {} violations{}",
            s.edges,
            s.sr_violations,
            s.first_sr.map(|x| format!("; first: {x}")).unwrap_or_default()
        ),
    );
    report.line(
        3,
        "memoized eta equals brute-force longest path",
        s.oracle_mismatch == 0 && s.oracle_terms > 0,
        format!(
            "{} terms with cxty <= {ORACLE_CXTY}, {} mismatches{}",
            s.oracle_terms,
            s.oracle_mismatch,
            s.first_oracle.map(|x| format!("; first: {x}")).unwrap_or_default()
        ),
    );
    report.line(
        4,
        "eta drops by at least one per step, exactly one on some step",
        s.step_violations == 0 && s.step_checked > 0,
        format!(
            "{} reducible SN terms, {} violations{}",
            s.step_checked,
            s.step_violations,
            s.first_step.map(|x| format!("; first: {x}")).unwrap_or_default()
        ),
    );

    let mut cat = (0u64, 0u64, 0u64);
    let mut first_cat = None;
    let mut catalog_roundtrip_fail = 0;
    for (name, src) in catalog_sources() {
        let m = parse_term(src).expect("catalog parses");
        if parse_term(&m.to_string()).as_ref() != Ok(&m) {
            catalog_roundtrip_fail += 1;
        }
        match check_sn_decomposition(&m, FUEL) {
            Verdict::Holds => cat.0 += 1,
            Verdict::Fails(why) => {
                cat.1 += 1;
                note(&mut first_cat, || format!("{name}: {why}"));
            }
            Verdict::Undecided(_) => cat.2 += 1,
        }
    }
    let omega = parse_term("(\\x. x x) (\\x. x x)").unwrap();
    let omega_status = explore_sn(&omega, OMEGA_FUEL);
    let omega_ok = matches!(&omega_status, SnStatus::NotSN { cycle } if cycle.len() == 1);
    report.line(
        5,
        "SN iff arguments and head reduct are SN",
        s.l4_fails == 0 && cat.1 == 0 && omega_ok && s.l4_holds > 0 && cat.0 > 0,
        format!(
            "corpus {} hold, {} fail, {} undecided; catalog {} hold, {} fail, {} undecided; omega at fuel {OMEGA_FUEL}: {omega_status}{}",
            s.l4_holds,
            s.l4_fails,
            s.l4_undecided,
            cat.0,
            cat.1,
            cat.2,
            s.first_l4.or(first_cat).map(|x| format!("; first: {x}")).unwrap_or_default()
        ),
    );

    report.line(
        10,
        "parse of print is the identity",
        s.roundtrip_fail == 0 && catalog_roundtrip_fail == 0,
        format!(
            "{} corpus terms, {} catalog terms, {} failures{}",
            s.terms,
            catalog_sources().len(),
            s.roundtrip_fail + catalog_roundtrip_fail,
            s.first_roundtrip.map(|x| format!("; first: {x}")).unwrap_or_default()
        ),
    );
}

fn options(suite: Suite, max_cxty: usize, samples: usize) -> SuiteOptions {
    let mut o = SuiteOptions::new(suite);
    o.config.max_cxty = max_cxty;
    o.config.lgt_bound = LGT_BOUND;
    o.config.fuel = FUEL;
    o.config.seed = SEED;
    o.samples = samples;
    o
}

fn application(report: &mut Report) {
    let opts = options(Suite::L5, 12, L5_SAMPLES);
    let instances = application_instances(&opts);
    let (mut holds, mut fails, mut undecided, mut typed) = (0, 0, 0, 0);
    let mut first = None;
    for (g, m) in &instances {
        typed += usize::from(lambda_mu::infer(g, m).is_ok());
        let y = lambda_mu::fresh_name("y", &m.free_vars());
        match check_application_to_variable(m, &y, FUEL, false) {
            Ok(o) => match o.verdict {
                Verdict::Holds if o.eta_my >= o.eta_m && o.eta_m.is_some() => holds += 1,
                Verdict::Undecided(_) => undecided += 1,
                v => {
                    fails += 1;
                    note(&mut first, || format!("{m}: {v}"));
                }
            },
            Err(e) => {
                fails += 1;
                note(&mut first, || format!("{m}: {e}"));
            }
        }
    }
    let untyped = instances.len() - typed;
    report.line(
        6,
        "applying an SN term to a variable stays SN",
        instances.len() == L5_SAMPLES && fails == 0 && undecided == 0 && typed > 0 && untyped > 0,
        format!(
            "{} instances ({typed} typed, {untyped} untyped), {holds} hold, {fails} fail, {undecided} undecided{}",
            instances.len(),
            first.map(|x| format!("; first: {x}")).unwrap_or_default()
        ),
    );
}

fn inclusion(report: &mut Report) {
    let opts = options(Suite::L3, MAX_CXTY, L3_SAMPLES);
    let triples = inclusion_triples(&opts);
    let (mut holds, mut fails, mut free) = (0, 0, 0);
    let mut first = None;
    for (inst, x, n) in &triples {
        free += usize::from(inst.term.is_free(x));
        match check_arg_substitution_inclusion(&inst.term, x, n) {
            Verdict::Holds => holds += 1,
            v => {
                fails += 1;
                note(&mut first, || format!("{}[{x}:={n}]: {v}", inst.term));
            }
        }
    }
    report.line(
        7,
        "argument set of a substitution instance",
        triples.len() == L3_SAMPLES && fails == 0,
        format!(
            "{} triples ({free} with x free), {holds} hold, {fails} fail{}",
            triples.len(),
            first.map(|x| format!("; first: {x}")).unwrap_or_default()
        ),
    );
}

fn same_type(report: &mut Report) {
    let opts = options(Suite::L7, 10, L7_SAMPLES);
    let instances = same_type_instances(&opts);
    let again = same_type_instances(&opts);
    let (mut holds, mut fails, mut mu_images, mut irreproducible) = (0, 0, 0, 0);
    let mut first = None;
    for ((inst, s), (inst2, s2)) in instances.iter().zip(&again) {
        if s.iter().any(|(_, n)| matches!(n, Term::Mu(..))) {
            mu_images += 1;
        }
        let outcome = check_same_type_substitution(inst, s, FUEL);
        let expected = independent_quadruple(&inst.context, s, &inst.term);
        let recomputed = measure_quadruple(&inst2.context, s2, &inst2.term, FUEL).ok().flatten();
        match outcome {
            Ok(o) if o.verdict.holds() => {
                holds += 1;
                if o.measure.is_none() || o.measure != expected || o.measure != recomputed {
                    irreproducible += 1;
                    note(&mut first, || format!("{}: {:?} vs {:?}", inst.term, o.measure, expected));
                }
            }
            Ok(o) => {
                fails += 1;
                note(&mut first, || format!("{}: {}", inst.term, o.verdict));
            }
            Err(e) => {
                fails += 1;
                note(&mut first, || format!("{}: {e}", inst.term));
            }
        }
    }
    report.line(
        8,
        "same-type substitution of SN terms stays SN",
        instances.len() == L7_SAMPLES && fails == 0 && irreproducible == 0 && mu_images >= L7_MIN_MU_IMAGES,
        format!(
            "{} instances ({mu_images} with mu-abstraction images), {holds} hold, {fails} fail, {irreproducible} irreproducible measures{}",
            instances.len(),
            first.map(|x| format!("; first: {x}")).unwrap_or_default()
        ),
    );
}

/// Each component from its own definition: type length, η, size, and the
/// occurrence-weighted η of the images.
fn independent_quadruple(g: &Context, s: &lambda_mu::Substitution, m: &Term) -> Option<MeasureQuadruple> {
    let types: BTreeSet<Type> = s.iter().map(|(x, _)| g.get(x).unwrap().clone()).collect();
    let lgt_sigma = types.iter().next().map_or(0, Type::lgt);
    let eta_m = explore_sn(m, FUEL).eta()?;
    let mut eta_sigma = 0;
    for (x, n) in s.iter() {
        eta_sigma += m.free_occurrences(x) * explore_sn(n, FUEL).eta()?;
    }
    Some(MeasureQuadruple { lgt_sigma, eta_m, cxty_m: m.cxty(), eta_sigma })
}

/// Structural match of a μ-contractum against `μy P[x:=λz (y (z Q))]`.
fn mu_shape_matches(redex: &Term, contractum: &Term) -> Result<(), String> {
    let Term::App(f, q) = redex else { return Err("not an application".into()) };
    let Term::Mu(x, ann, p) = &**f else { return Err("not a mu-redex".into()) };
    let Term::Mu(y, ann_y, body) = contractum else { return Err("contractum is not a mu-abstraction".into()) };
    let mut fv = p.free_vars();
    fv.extend(q.free_vars());
    if fv.contains(y) {
        return Err(format!("{y} is not fresh"));
    }
    let (want_y, want_z) = match ann.as_ref().and_then(Type::as_arrow) {
        Some((_, b)) => (Some(b.clone()), ann.clone()),
        None => (None, None),
    };
    if *ann_y != want_y {
        return Err("annotation of y".into());
    }
    let z = if p.is_free(x) {
        let z = find_wrapper(body, y, q).ok_or("no wrapper λz (y (z Q)) in the body")?;
        if z == *y || fv.contains(&z) {
            return Err(format!("{z} is not fresh or equals y"));
        }
        z
    } else {
        Name::from("z")
    };
    let wrapper =
        Term::Lam(z.clone(), want_z, Box::new(Term::app(Term::var(y.clone()), Term::app(Term::var(z), (**q).clone()))));
    if **body != p.substitute(x, &wrapper) {
        return Err("body differs from the substitution instance".into());
    }
    Ok(())
}

fn find_wrapper(t: &Term, y: &Name, q: &Term) -> Option<Name> {
    match t {
        Term::Lam(z, _, b) => {
            if let Term::App(yv, zq) = &**b {
                if let (Term::Var(yy), Term::App(zv, qq)) = (&**yv, &**zq) {
                    if yy == y && **zv == Term::Var(z.clone()) && **qq == *q {
                        return Some(z.clone());
                    }
                }
            }
            find_wrapper(b, y, q)
        }
        Term::Mu(_, _, b) => find_wrapper(b, y, q),
        Term::App(f, a) => find_wrapper(f, y, q).or_else(|| find_wrapper(a, y, q)),
        Term::Var(_) => None,
    }
}

fn mu_rule(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let free: Vec<Name> = ["x", "y", "z", "y'", "w"].iter().map(|s| Name::from(*s)).collect();
    let anns: Vec<Option<Type>> = vec![
        None,
        Some(Type::Bot),
        Some(parse_type("bot -> bot").unwrap()),
        Some(parse_type("(bot -> bot) -> bot").unwrap()),
    ];
    let (mut ok, mut bad, mut with_x) = (0, 0, 0);
    let mut first = None;
    for _ in 0..MU_REDEXES {
        let p = random_term(rng.gen_range(1..10), &free, &mut rng);
        let q = random_term(rng.gen_range(1..6), &free, &mut rng);
        let ann = anns.choose(&mut rng).unwrap().clone();
        let redex = Term::app(Term::mu("x", ann, p.clone()), q);
        with_x += usize::from(p.is_free("x"));
        let contractum = contract_redex(&redex).expect("mu-redex");
        match mu_shape_matches(&redex, &contractum) {
            Ok(()) => ok += 1,
            Err(why) => {
                bad += 1;
                note(&mut first, || format!("{redex} -> {contractum}: {why}"));
            }
        }
    }
    report.line(
        9,
        "mu-rule contractum has the expected shape",
        bad == 0 && ok == MU_REDEXES,
        format!(
            "{MU_REDEXES} redexes ({with_x} using the bound variable), {bad} mismatches{}",
            first.map(|x| format!("; first: {x}")).unwrap_or_default()
        ),
    );
}

fn main() -> ExitCode {
    let mut report = Report { failed: 0 };
    let start = Instant::now();
    mu_rule(&mut report);
    inclusion(&mut report);
    application(&mut report);
    same_type(&mut report);
    corpus_sweep(&mut report);
    println!("acceptance: {} failed criteria, {:.0}s", report.failed, start.elapsed().as_secs_f64());
    if report.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
