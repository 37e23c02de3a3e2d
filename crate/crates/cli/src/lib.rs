//! The `lmu` command line.

use std::fs;
use std::io::{BufRead, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use lambda_mu::lab::suite::{default_contexts, run_suite, Suite, SuiteOptions};
use lambda_mu::lab::{build_mu_substitution, enumerate_types, measure_quadruple, random_typed_term, TermEnumerator};
use lambda_mu::reduction::{
    arg, contract_redex, head_form, hred, one_step_reducts, redex_positions, reduce_at, reduce_with_strategy, Head,
    Strategy, TraceEnd,
};
use lambda_mu::sn::{explore_sn, reduction_graph, DEFAULT_FUEL};
use lambda_mu::typing::{check_subject_reduction, derive};
use lambda_mu::{alpha_eq, canonicalize, infer, parse_term, parse_type, Context, Name, Substitution, Term, Type};

#[derive(Parser)]
#[command(name = "lmu", about = "Typed and untyped lambda-mu terms: typing, reduction, normalization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Input {
    /// Term source text.
    term: Option<String>,
    /// Read the term from a file instead.
    #[arg(long, value_name = "PATH", conflicts_with = "term")]
    file: Option<String>,
    /// Free-variable typings, e.g. "x:bot, f:bot -> bot". When given, the
    /// term must be typable under them.
    #[arg(long)]
    context: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Head,
    Lo,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Infer the type of a term.
    Check {
        #[command(flatten)]
        input: Input,
        /// Print the typing derivation.
        #[arg(long)]
        explain: bool,
        /// Also check that every term within this many steps keeps the type.
        #[arg(long, value_name = "STEPS")]
        subject_reduction: Option<usize>,
    },
    /// Reduce a term with a strategy.
    Reduce {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "lo")]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 1000)]
        max_steps: usize,
        /// Print every step.
        #[arg(long)]
        trace: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Length of the longest reduction.
    Eta {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
    },
    /// Decide strong normalization by exploring the reduction graph.
    Sn {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
    },
    /// Print the reduction graph.
    Graph {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "dot")]
        format: GraphFormat,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
    },
    /// Run a lemma suite.
    Lemmas {
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value_t = 7)]
        max_size: usize,
        #[arg(long, default_value_t = 2)]
        lgt_bound: usize,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Instances for the sampled suites (l3, l5, l7).
        #[arg(long)]
        samples: Option<usize>,
        /// Write the JSON report here ("-" for standard output).
        #[arg(long, value_name = "PATH")]
        json: Option<String>,
    },
    /// List every term of a type up to a size.
    Enumerate {
        #[arg(long = "type")]
        ty: String,
        #[arg(long)]
        max_size: usize,
        #[arg(long, default_value_t = 2)]
        lgt_bound: usize,
        #[arg(long, default_value = "")]
        context: String,
    },
    /// List types up to a length.
    Types {
        #[arg(long, default_value_t = 2)]
        max_lgt: usize,
    },
    /// Draw a random term of a type.
    Sample {
        #[arg(long = "type")]
        ty: String,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "")]
        context: String,
    },
    /// Show the structure of a term: size, free variables, head form, redexes.
    Inspect {
        #[command(flatten)]
        input: Input,
    },
    /// Apply a substitution.
    Subst {
        #[command(flatten)]
        input: Input,
        /// A binding "x := N"; several are applied simultaneously.
        #[arg(long = "with", value_name = "BINDING")]
        bindings: Vec<String>,
        /// Comma-separated variables mapped to \u. (x (u Y)), with Y from --target.
        #[arg(long, value_name = "VARS", requires = "target")]
        mu: Option<String>,
        #[arg(long, value_name = "Y")]
        target: Option<String>,
        /// Print the measure quadruple under this context instead.
        #[arg(long, value_name = "CONTEXT")]
        measure: Option<String>,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
    },
    /// Decide alpha-equivalence of two terms.
    Alpha { left: String, right: String },
    /// Reduce interactively: choose a redex by number on each line.
    Step {
        #[command(flatten)]
        input: Input,
    },
}

struct Io<'a> {
    stdin: &'a mut dyn BufRead,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Exit code with the diagnostic already written.
struct Exit(i32);

type Outcome = Result<i32, Exit>;

impl Io<'_> {
    fn fail(&mut self, code: i32, msg: impl std::fmt::Display) -> Exit {
        let _ = writeln!(self.err, "lmu: {msg}");
        Exit(code)
    }

    fn line(&mut self, s: impl std::fmt::Display) -> Result<(), Exit> {
        writeln!(self.out, "{s}").map_err(|e| Exit(self.fail(1, e).0))
    }
}

/// Runs one invocation; `argv` includes the program name.
pub fn run_cli(argv: &[String], stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{rendered}") } else { write!(stderr, "{rendered}") };
            return code;
        }
    };
    let mut io = Io { stdin, out: stdout, err: stderr };
    match dispatch(cli.command, &mut io) {
        Ok(code) | Err(Exit(code)) => code,
    }
}

fn read_input(input: &Input, io: &mut Io) -> Result<Term, Exit> {
    let text = match (&input.term, &input.file) {
        (Some(t), None) => t.clone(),
        (None, Some(path)) => fs::read_to_string(path).map_err(|e| io.fail(2, format!("{path}: {e}")))?,
        _ => return Err(io.fail(2, "expected a term argument or --file PATH")),
    };
    let m = parse(&text, io)?;
    if let Some(g) = &input.context {
        let g = context(g, io)?;
        if let Err(e) = infer(&g, &m) {
            return Err(io.fail(1, format!("type error: {e}")));
        }
    }
    Ok(m)
}

fn parse(text: &str, io: &mut Io) -> Result<Term, Exit> {
    parse_term(text).map_err(|e| io.fail(2, format!("parse error: {e}")))
}

fn context(text: &str, io: &mut Io) -> Result<Context, Exit> {
    Context::parse(text).map_err(|e| io.fail(2, format!("bad context: {e}")))
}

fn ty(text: &str, io: &mut Io) -> Result<Type, Exit> {
    parse_type(text).map_err(|e| io.fail(2, format!("bad type: {e}")))
}

fn binding(text: &str, io: &mut Io) -> Result<(Name, Term), Exit> {
    let Some((x, n)) = text.split_once(":=") else {
        return Err(io.fail(2, format!("binding `{text}` is not of the form x := N")));
    };
    let x = x.trim();
    if !lambda_mu::syntax::is_valid_identifier(x) {
        return Err(io.fail(2, format!("`{x}` is not a variable")));
    }
    Ok((Name::from(x), parse(n, io)?))
}

fn dispatch(command: Command, io: &mut Io) -> Outcome {
    match command {
        Command::Check { input, explain, subject_reduction } => {
            let m = read_input(&Input { context: None, ..input.clone() }, io)?;
            let g = context(input.context.as_deref().unwrap_or(""), io)?;
            let t = match infer(&g, &m) {
                Ok(t) => t,
                Err(e) => return Err(io.fail(1, format!("type error: {e}"))),
            };
            if explain {
                let d = derive(&g, &m).expect("typable");
                write!(io.out, "{}", d.render()).map_err(|e| io.fail(1, e))?;
            } else {
                io.line(&t)?;
            }
            if let Some(steps) = subject_reduction {
                let r = check_subject_reduction(&g, &m, steps).expect("typable");
                io.line(format_args!(
                    "subject reduction: {} nodes, {} edges, {} violations{}",
                    r.nodes,
                    r.edges,
                    r.violations.len(),
                    if r.complete { "" } else { " (bounded)" }
                ))?;
                if !r.holds() {
                    return Ok(1);
                }
            }
            Ok(0)
        }
        Command::Reduce { input, strategy, max_steps, trace, seed } => {
            let m = read_input(&input, io)?;
            let strategy = match strategy {
                StrategyArg::Head => Strategy::Head,
                StrategyArg::Lo => Strategy::LeftmostOutermost,
                StrategyArg::Random => Strategy::Random(seed),
            };
            let t = reduce_with_strategy(&m, strategy, max_steps);
            if trace {
                write!(io.out, "{}", t.render()).map_err(|e| io.fail(1, e))?;
            }
            io.line(t.last())?;
            if t.end == TraceEnd::Truncated {
                let _ = writeln!(io.err, "lmu: stopped after {max_steps} steps");
            }
            Ok(0)
        }
        Command::Eta { input, fuel } => {
            let m = read_input(&input, io)?;
            let status = explore_sn(&m, fuel.max(1));
            match status.eta() {
                Some(e) => {
                    io.line(e)?;
                    Ok(0)
                }
                None => {
                    io.line(&status)?;
                    Ok(1)
                }
            }
        }
        Command::Sn { input, fuel } => {
            let m = read_input(&input, io)?;
            let status = explore_sn(&m, fuel.max(1));
            io.line(&status)?;
            Ok(if status.is_sn() { 0 } else { 1 })
        }
        Command::Graph { input, format: GraphFormat::Dot, fuel } => {
            let m = read_input(&input, io)?;
            let g = reduction_graph(&m, fuel.max(1));
            write!(io.out, "{}", g.to_dot()).map_err(|e| io.fail(1, e))?;
            if !g.complete {
                let _ = writeln!(io.err, "lmu: graph truncated at {} nodes", g.nodes.len());
            }
            Ok(0)
        }
        Command::Lemmas { suite, max_size, lgt_bound, fuel, seed, samples, json } => {
            let mut opts = SuiteOptions::new(suite);
            opts.config.max_cxty = max_size;
            opts.config.lgt_bound = lgt_bound;
            opts.config.fuel = fuel.max(1);
            opts.config.seed = seed;
            opts.contexts = default_contexts();
            if let Some(n) = samples {
                opts.samples = n;
            }
            let report = run_suite(suite, &opts);
            match json.as_deref() {
                Some("-") => io.line(report.to_json())?,
                Some(path) => {
                    fs::write(path, report.to_json() + "\n").map_err(|e| io.fail(1, format!("{path}: {e}")))?;
                    io.line(report.summary())?;
                }
                None => io.line(report.summary())?,
            }
            for f in &report.failures {
                let _ = writeln!(io.err, "failure: {} [{}] {}", f.term, f.context, f.reason);
            }
            Ok(if report.holds() { 0 } else { 1 })
        }
        Command::Enumerate { ty: t, max_size, lgt_bound, context: g } => {
            let t = ty(&t, io)?;
            let g = context(&g, io)?;
            let e = TermEnumerator::new(&g, lgt_bound, max_size);
            let mut result = Ok(());
            for size in 1..=max_size {
                e.for_each_of_type(&t, size, |m| {
                    if result.is_ok() {
                        result = writeln!(io.out, "{m}");
                    }
                });
            }
            result.map_err(|e| io.fail(1, e))?;
            Ok(0)
        }
        Command::Types { max_lgt } => {
            for t in enumerate_types(max_lgt) {
                io.line(format_args!("{} {t}", t.lgt()))?;
            }
            Ok(0)
        }
        Command::Sample { ty: t, size, seed, context: g } => {
            let t = ty(&t, io)?;
            let g = context(&g, io)?;
            match random_typed_term(&g, &t, size, seed) {
                Some(inst) => {
                    io.line(&inst.term)?;
                    Ok(0)
                }
                None => Err(io.fail(1, format!("no term of type {t} found within size {size}"))),
            }
        }
        Command::Inspect { input } => {
            let m = read_input(&input, io)?;
            inspect(&m, io)?;
            Ok(0)
        }
        Command::Subst { input, bindings, mu, target, measure, fuel } => {
            let m = read_input(&input, io)?;
            let mut s = Substitution::new();
            if let (Some(xs), Some(y)) = (mu, target) {
                let xs: Vec<Name> = xs.split(',').map(|x| Name::from(x.trim())).collect();
                s = build_mu_substitution(&xs, y.trim()).map_err(|e| io.fail(2, e))?;
            }
            for b in &bindings {
                let (x, n) = binding(b, io)?;
                s.insert(&x, n);
            }
            if let Some(g) = measure {
                let g = context(&g, io)?;
                return match measure_quadruple(&g, &s, &m, fuel.max(1)) {
                    Ok(Some(q)) => {
                        io.line(q)?;
                        Ok(0)
                    }
                    Ok(None) => {
                        io.line("Unknown")?;
                        Ok(1)
                    }
                    Err(e) => Err(io.fail(1, e)),
                };
            }
            let result = if s.len() == 1 {
                let (x, n) = s.iter().next().expect("one binding");
                m.substitute(x, n)
            } else {
                m.substitute_parallel(&s)
            };
            io.line(result)?;
            Ok(0)
        }
        Command::Alpha { left, right } => {
            let (a, b) = (parse(&left, io)?, parse(&right, io)?);
            let eq = alpha_eq(&a, &b);
            io.line(eq)?;
            Ok(if eq { 0 } else { 1 })
        }
        Command::Step { input } => {
            let m = read_input(&input, io)?;
            step(m, io)
        }
    }
}

fn inspect(m: &Term, io: &mut Io) -> Result<(), Exit> {
    let fv: Vec<String> = m.free_vars().iter().map(|x| x.to_string()).collect();
    io.line(format_args!("term: {m}"))?;
    io.line(format_args!("canonical: {}", canonicalize(m).to_term()))?;
    io.line(format_args!("cxty: {}", m.cxty()))?;
    io.line(format_args!("free: {}", fv.join(" ")))?;
    let hf = head_form(m);
    let prefix: Vec<String> = hf
        .prefix
        .iter()
        .map(|b| format!("{}{}", if b.kind == lambda_mu::BinderKind::Lam { "\\" } else { "mu " }, b.name))
        .collect();
    io.line(format_args!("prefix: {}", prefix.join(" ")))?;
    match &hf.head {
        Head::Var(x) => io.line(format_args!("head: variable {x}"))?,
        Head::Redex(r) => {
            io.line(format_args!("head: redex {r}"))?;
            let c = contract_redex(r).expect("head redex");
            io.line(format_args!("contractum: {c}"))?;
        }
    }
    io.line(format_args!("spine: {}", hf.spine.len()))?;
    if let Some(h) = hred(m) {
        io.line(format_args!("hred: {h}"))?;
    }
    for a in arg(m) {
        io.line(format_args!("arg: {a}"))?;
    }
    for p in redex_positions(m) {
        io.line(format_args!("redex: {p}"))?;
    }
    for r in one_step_reducts(m) {
        io.line(format_args!("reduct: {r}"))?;
    }
    Ok(())
}

fn step(mut m: Term, io: &mut Io) -> Outcome {
    loop {
        io.line(&m)?;
        let positions = redex_positions(&m);
        if positions.is_empty() {
            io.line("normal form")?;
            return Ok(0);
        }
        for (i, p) in positions.iter().enumerate() {
            io.line(format_args!("  {}: {p}", i + 1))?;
        }
        let mut line = String::new();
        loop {
            write!(io.out, "> ").map_err(|e| io.fail(1, e))?;
            io.out.flush().map_err(|e| io.fail(1, e))?;
            line.clear();
            if io.stdin.read_line(&mut line).map_err(|e| io.fail(1, e))? == 0 {
                return Ok(0);
            }
            match line.trim().parse::<usize>() {
                Ok(k) if (1..=positions.len()).contains(&k) => break,
                _ => io.line(format_args!("choose a number from 1 to {}", positions.len()))?,
            }
        }
        let k: usize = line.trim().parse().expect("validated");
        m = reduce_at(&m, &positions[k - 1]).expect("listed position");
    }
}
