//! Reduction graphs modulo alpha, strong-normalization verdicts and η.
//!
//! Nodes are [`CanonicalTerm`]s, so the fresh names introduced by the μ-rule
//! do not make the state space infinite. Exploration is bounded by `fuel`,
//! the number of distinct nodes visited; running out yields `Unknown`.
//! Divergence that never revisits a node (ever-growing terms) always ends in
//! `Unknown`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write;
use std::rc::Rc;

use crate::canon::{canonicalize, CanonicalTerm};
use crate::term::Term;

pub const DEFAULT_FUEL: usize = 100_000;

#[derive(Clone, Debug)]
pub struct ReductionGraph {
    pub nodes: Vec<CanonicalTerm>,
    /// Indices into `nodes`.
    pub edges: BTreeSet<(usize, usize)>,
    pub root: usize,
    /// Every node's full reduct set is present.
    pub complete: bool,
}

impl ReductionGraph {
    pub fn root_term(&self) -> &CanonicalTerm {
        &self.nodes[self.root]
    }

    /// Graphviz rendering with nodes and edges sorted by printed form.
    pub fn to_dot(&self) -> String {
        let printed: Vec<String> = self.nodes.iter().map(|n| n.to_string()).collect();
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        order.sort_by(|&a, &b| printed[a].cmp(&printed[b]));
        let mut edges: Vec<(&str, &str)> =
            self.edges.iter().map(|&(a, b)| (printed[a].as_str(), printed[b].as_str())).collect();
        edges.sort();

        let mut out = String::from("digraph reductions {\n");
        for i in order {
            let _ = write!(out, "  {}", dot_quote(&printed[i]));
            if i == self.root {
                out.push_str(" [root=true]");
            }
            out.push_str(";\n");
        }
        for (a, b) in edges {
            let _ = writeln!(out, "  {} -> {};", dot_quote(a), dot_quote(b));
        }
        out.push_str("}\n");
        out
    }
}

fn dot_quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// Breadth-first exploration from `m`; incomplete once more than `fuel`
/// nodes would be needed.
pub fn reduction_graph(m: &Term, fuel: usize) -> ReductionGraph {
    let root = canonicalize(m);
    let mut index = HashMap::from([(root.clone(), 0usize)]);
    let mut nodes = vec![root];
    let mut edges = BTreeSet::new();
    let mut queue = VecDeque::from([0usize]);
    let mut complete = true;
    let mut stored = nodes[0].cxty();
    'outer: while let Some(i) = queue.pop_front() {
        for r in nodes[i].one_step_reducts() {
            let j = match index.get(&r) {
                Some(&j) => j,
                None => {
                    stored += r.cxty();
                    if nodes.len() >= fuel || stored > STORED_SIZE_LIMIT {
                        complete = false;
                        break 'outer;
                    }
                    let j = nodes.len();
                    index.insert(r.clone(), j);
                    nodes.push(r);
                    queue.push_back(j);
                    j
                }
            };
            edges.insert((i, j));
        }
    }
    ReductionGraph { nodes, edges, root: 0, complete }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SnStatus {
    StronglyNormalizing {
        eta: usize,
        graph_nodes: usize,
    },
    /// Consecutive elements are one-step reducts; the last reduces to the first.
    NotSN {
        cycle: Vec<CanonicalTerm>,
    },
    Unknown {
        nodes_visited: usize,
    },
}

impl SnStatus {
    pub fn is_sn(&self) -> bool {
        matches!(self, SnStatus::StronglyNormalizing { .. })
    }

    pub fn eta(&self) -> Option<usize> {
        match self {
            SnStatus::StronglyNormalizing { eta, .. } => Some(*eta),
            _ => None,
        }
    }

    /// `Some(true)` for SN, `Some(false)` for NotSN, `None` when undecided.
    pub fn decided(&self) -> Option<bool> {
        match self {
            SnStatus::StronglyNormalizing { .. } => Some(true),
            SnStatus::NotSN { .. } => Some(false),
            SnStatus::Unknown { .. } => None,
        }
    }
}

impl std::fmt::Display for SnStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SnStatus::StronglyNormalizing { eta, graph_nodes } => write!(f, "SN eta={eta} nodes={graph_nodes}"),
            SnStatus::NotSN { cycle } => write!(f, "NotSN cycle_length={}", cycle.len()),
            SnStatus::Unknown { nodes_visited } => write!(f, "Unknown nodes_visited={nodes_visited}"),
        }
    }
}

/// Full result of a depth-first exploration.
#[derive(Clone, Debug)]
pub struct SnAnalysis {
    pub status: SnStatus,
    pub nodes: Vec<CanonicalTerm>,
    /// Reduct indices of each expanded node.
    pub successors: Vec<Vec<usize>>,
    /// η of each node whose exploration finished.
    pub eta: Vec<Option<usize>>,
}

impl SnAnalysis {
    pub fn edge_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    /// The explored graph; complete only for an SN verdict.
    pub fn graph(&self) -> ReductionGraph {
        let edges = self.successors.iter().enumerate().flat_map(|(i, s)| s.iter().map(move |&j| (i, j))).collect();
        ReductionGraph { nodes: self.nodes.clone(), edges, root: 0, complete: self.status.is_sn() }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mark {
    Fresh,
    OnStack(usize),
    Done(usize),
}

struct Frame {
    node: usize,
    next: usize,
    best: usize,
}

/// Bound on the summed size of stored terms; reaching it ends exploration
/// with [`SnStatus::Unknown`], like running out of fuel.
pub const STORED_SIZE_LIMIT: usize = 4_000_000;

struct Dfs {
    fuel: usize,
    stored: usize,
    index: HashMap<Rc<CanonicalTerm>, usize>,
    nodes: Vec<Rc<CanonicalTerm>>,
    successors: Vec<Vec<usize>>,
    marks: Vec<Mark>,
}

impl Dfs {
    fn intern(&mut self, t: CanonicalTerm) -> Option<usize> {
        if let Some(&i) = self.index.get(&t) {
            return Some(i);
        }
        let size = t.cxty();
        if self.nodes.len() >= self.fuel || self.stored + size > STORED_SIZE_LIMIT {
            return None;
        }
        self.stored += size;
        let i = self.nodes.len();
        let t = Rc::new(t);
        self.index.insert(t.clone(), i);
        self.nodes.push(t);
        self.successors.push(Vec::new());
        self.marks.push(Mark::Fresh);
        Some(i)
    }

    /// Computes and interns the reducts of `i`; `false` when out of fuel.
    fn expand(&mut self, i: usize) -> bool {
        let reducts = self.nodes[i].one_step_reducts();
        let mut succ = Vec::with_capacity(reducts.len());
        for r in reducts {
            match self.intern(r) {
                Some(j) => succ.push(j),
                None => return false,
            }
        }
        self.successors[i] = succ;
        true
    }

    fn run(&mut self) -> SnStatus {
        let mut stack: Vec<Frame> = Vec::new();
        if !self.expand(0) {
            return SnStatus::Unknown { nodes_visited: self.nodes.len() };
        }
        self.marks[0] = Mark::OnStack(0);
        stack.push(Frame { node: 0, next: 0, best: 0 });
        while let Some(top) = stack.last_mut() {
            let succ = &self.successors[top.node];
            if top.next < succ.len() {
                let child = succ[top.next];
                top.next += 1;
                match self.marks[child] {
                    Mark::Done(e) => top.best = top.best.max(e + 1),
                    Mark::OnStack(pos) => {
                        let cycle = stack[pos..].iter().map(|f| (*self.nodes[f.node]).clone()).collect();
                        return SnStatus::NotSN { cycle };
                    }
                    Mark::Fresh => {
                        if !self.expand(child) {
                            return SnStatus::Unknown { nodes_visited: self.nodes.len() };
                        }
                        self.marks[child] = Mark::OnStack(stack.len());
                        stack.push(Frame { node: child, next: 0, best: 0 });
                    }
                }
            } else {
                let done = stack.pop().unwrap();
                self.marks[done.node] = Mark::Done(done.best);
                if let Some(parent) = stack.last_mut() {
                    parent.best = parent.best.max(done.best + 1);
                }
            }
        }
        match self.marks[0] {
            Mark::Done(eta) => SnStatus::StronglyNormalizing { eta, graph_nodes: self.nodes.len() },
            _ => unreachable!("root finished"),
        }
    }
}

/// Depth-first exploration keeping the graph and per-node η.
pub fn analyze(root: CanonicalTerm, fuel: usize) -> SnAnalysis {
    if root.is_normal() {
        return SnAnalysis {
            status: SnStatus::StronglyNormalizing { eta: 0, graph_nodes: 1 },
            nodes: vec![root],
            successors: vec![Vec::new()],
            eta: vec![Some(0)],
        };
    }
    let mut dfs = Dfs {
        fuel: fuel.max(1),
        stored: 0,
        index: HashMap::new(),
        nodes: Vec::new(),
        successors: Vec::new(),
        marks: Vec::new(),
    };
    dfs.intern(root);
    let status = dfs.run();
    let eta = dfs
        .marks
        .iter()
        .map(|m| match m {
            Mark::Done(e) => Some(*e),
            _ => None,
        })
        .collect();
    drop(dfs.index);
    let nodes = dfs.nodes.into_iter().map(|t| Rc::try_unwrap(t).unwrap_or_else(|t| (*t).clone())).collect();
    SnAnalysis { status, nodes, successors: dfs.successors, eta }
}

pub fn explore_sn(m: &Term, fuel: usize) -> SnStatus {
    analyze_term(m, fuel).status
}

pub fn analyze_term(m: &Term, fuel: usize) -> SnAnalysis {
    analyze(canonicalize(m), fuel)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EtaOutcome {
    Known(usize),
    NotSN(Vec<CanonicalTerm>),
    Unknown(usize),
}

/// Length of the longest reduction from `m`.
pub fn eta(m: &Term, fuel: usize) -> EtaOutcome {
    match explore_sn(m, fuel) {
        SnStatus::StronglyNormalizing { eta, .. } => EtaOutcome::Known(eta),
        SnStatus::NotSN { cycle } => EtaOutcome::NotSN(cycle),
        SnStatus::Unknown { nodes_visited } => EtaOutcome::Unknown(nodes_visited),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    const OMEGA: &str = "(\\x. x x) (\\x. x x)";

    #[test]
    fn graph_examples() {
        let g = reduction_graph(&t("y"), 10);
        assert_eq!((g.nodes.len(), g.edges.len(), g.complete), (1, 0, true));

        let g = reduction_graph(&t("(\\x. x) ((\\x. x) y)"), 100);
        assert_eq!(g.nodes.len(), 3);
        assert!(g.complete);
        let printed: BTreeSet<String> = g.nodes.iter().map(|n| n.to_string()).collect();
        assert!(printed.contains("(\\x0. x0) y") && printed.contains("y"));

        let g = reduction_graph(&t(OMEGA), 10);
        assert_eq!(g.nodes.len(), 1);
        assert_eq!(g.edges, BTreeSet::from([(0, 0)]));
        assert!(g.complete);
    }

    #[test]
    fn graph_runs_out_of_fuel() {
        let grower = t("(\\x. x x z) (\\x. x x z)");
        let g = reduction_graph(&grower, 20);
        assert!(!g.complete);
        assert!(g.nodes.len() <= 20);
    }

    #[test]
    fn explore_examples() {
        assert_eq!(explore_sn(&t("\\x. x"), 10), SnStatus::StronglyNormalizing { eta: 0, graph_nodes: 1 });
        match explore_sn(&t(OMEGA), 10) {
            SnStatus::NotSN { cycle } => assert_eq!(cycle.len(), 1),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            explore_sn(&t("(\\x:bot. x) ((\\x:bot. x) y)"), 100),
            SnStatus::StronglyNormalizing { eta: 2, graph_nodes: 3 }
        );
    }

    #[test]
    fn grower_is_unknown() {
        let status = explore_sn(&t("(\\x. x x z) (\\x. x x z)"), 50);
        assert_eq!(status, SnStatus::Unknown { nodes_visited: 50 });
    }

    #[test]
    fn longer_cycles_are_witnessed() {
        let w = "(\\y. (\\z. z z) y)";
        let m = t(&format!("{w} {w}"));
        let status = explore_sn(&m, 1000);
        let SnStatus::NotSN { cycle } = status else { panic!("{status:?}") };
        for (i, n) in cycle.iter().enumerate() {
            let next = &cycle[(i + 1) % cycle.len()];
            assert!(n.one_step_reducts().contains(next));
        }
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta(&t("y"), 10), EtaOutcome::Known(0));
        assert_eq!(eta(&t("(\\x. x) y"), 10), EtaOutcome::Known(1));
        assert_eq!(eta(&t("(mu x:(bot->bot). (x (\\w:bot. w))) v"), 100), EtaOutcome::Known(3));
        assert!(matches!(eta(&t(OMEGA), 10), EtaOutcome::NotSN(_)));
    }

    #[test]
    fn dot_is_sorted_and_marks_root() {
        let g = reduction_graph(&t("(\\x. x) ((\\x. x) y)"), 100);
        let dot = g.to_dot();
        let expected = "digraph reductions {\n  \"(\\\\x0. x0) ((\\\\x0. x0) y)\" [root=true];\n  \"(\\\\x0. x0) y\";\n  \"y\";\n  \"(\\\\x0. x0) ((\\\\x0. x0) y)\" -> \"(\\\\x0. x0) y\";\n  \"(\\\\x0. x0) y\" -> \"y\";\n}\n";
        assert_eq!(dot, expected);
    }
}
