use std::io::{self, BufWriter, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lamvm::audit::Auditor;
use lamvm::convert::{convertible, Verdict};
use lamvm::decode::{decode_config, plug};
use lamvm::kn::{kn_drive, kn_run, KnRule};
use lamvm::knv::{self, PrefixEvent, Rule};
use lamvm::nbe::{nbe_cbn, nbe_cbv};
use lamvm::oracle::{normalize_normal_order, normalize_rrcbv};
use lamvm::{parse, print, Error, Notation, Term};
use serde_json::json;

const EXIT_FUEL: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_PARSE: u8 = 65;
const EXIT_OPEN: u8 = 66;
const EXIT_INTERNAL: u8 = 70;

#[derive(Parser)]
#[command(name = "lamvm", version, about = "Normalize, trace and compare lambda terms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the normal form of a term.
    Normalize {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Engine::Knv)]
        machine: Engine,
        /// The term, or `-` to read it from stdin.
        term: String,
    },
    /// Print every transition of a machine run.
    Trace {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Engine::Knv)]
        machine: Engine,
        /// Also print the term each configuration stands for (knv only).
        #[arg(long)]
        decode: bool,
        term: String,
    },
    /// Decide whether two terms have the same normal form.
    Convert {
        #[command(flatten)]
        common: Common,
        /// Print the partial normal forms that tell the terms apart.
        #[arg(long)]
        show_prefix: bool,
        left: String,
        right: String,
    },
    /// Print how often each transition rule fired.
    Stats {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Engine::Knv)]
        machine: Engine,
        term: String,
    },
    /// Run the strong call-by-value machine checking its invariants at every step.
    Audit {
        #[command(flatten)]
        common: Common,
        term: String,
    },
}

#[derive(Args)]
struct Common {
    /// Transition budget (evaluation steps for the NbE engines, contractions
    /// for the oracles).
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    fuel: u64,
    /// Term notation; guessed from the input when omitted.
    #[arg(long, value_enum)]
    notation: Option<NotationArg>,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum NotationArg {
    Debruijn,
    Named,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Knv,
    Kn,
    NbeCbv,
    NbeCbn,
    OracleRrcbv,
    OracleNo,
}

enum Failure {
    Usage(String),
    Parse(String),
    Open(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Parse(_) => EXIT_PARSE,
            Failure::Open(_) => EXIT_OPEN,
            Failure::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Parse(m) | Failure::Open(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::OpenTerm { .. } => Failure::Open(e.to_string()),
            Error::Parse(_) => Failure::Parse(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::Internal(format!("i/o error: {e}"))
    }
}

/// Named notation is the only one with identifiers.
fn guess_notation(text: &str) -> Notation {
    if text.chars().any(|c| c.is_alphabetic() && c != 'λ') {
        Notation::Named
    } else {
        Notation::DeBruijn
    }
}

struct Input {
    term: Term,
    notation: Notation,
}

fn read_term(arg: &str, notation: Option<NotationArg>) -> Result<Input, Failure> {
    let text = if arg == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        arg.to_string()
    };
    let notation = match notation {
        Some(NotationArg::Debruijn) => Notation::DeBruijn,
        Some(NotationArg::Named) => Notation::Named,
        None => guess_notation(&text),
    };
    let term = parse(text.trim(), notation).map_err(|e| Failure::Parse(format!("parse error: {e}")))?;
    if !term.is_closed() {
        return Err(Error::OpenTerm {
            open: lamvm::term::open_count(&term),
        }
        .into());
    }
    Ok(Input { term, notation })
}

type Out = BufWriter<io::StdoutLock<'static>>;

fn fuel_exhausted(out: &mut Out, json: bool, spent: u64) -> Result<u8, Failure> {
    if json {
        writeln!(out, "{}", json!({ "result": "fuel exhausted", "spent": spent }))?;
    } else {
        writeln!(out, "fuel exhausted")?;
    }
    Ok(EXIT_FUEL)
}

fn normalize(out: &mut Out, common: &Common, engine: Engine, input: &Input) -> Result<u8, Failure> {
    let (t, fuel) = (&input.term, common.fuel);
    let (nf, spent) = match engine {
        Engine::Knv => {
            let r = knv::run(t, fuel)?;
            (r.normal_form().cloned(), r.stats().transitions())
        }
        Engine::Kn => {
            let r = kn_run(t, fuel)?;
            (r.normal_form().cloned(), r.stats().transitions())
        }
        Engine::NbeCbv => {
            let r = nbe_cbv(t, fuel)?;
            (r.normal_form().cloned(), r.spent())
        }
        Engine::NbeCbn => {
            let r = nbe_cbn(t, fuel)?;
            (r.normal_form().cloned(), r.spent())
        }
        Engine::OracleRrcbv => {
            let r = normalize_rrcbv(t, fuel);
            (r.normal_form().cloned(), r.steps())
        }
        Engine::OracleNo => {
            let r = normalize_normal_order(t, fuel);
            (r.normal_form().cloned(), r.steps())
        }
    };
    let Some(nf) = nf else {
        return fuel_exhausted(out, common.json, spent);
    };
    let printed = print(&nf, input.notation);
    if common.json {
        writeln!(out, "{}", json!({ "result": "normal", "normal_form": printed, "spent": spent }))?;
    } else {
        writeln!(out, "{printed}")?;
    }
    Ok(0)
}

fn trace(out: &mut Out, common: &Common, engine: Engine, decode: bool, input: &Input) -> Result<u8, Failure> {
    let mut failure = None;
    let mut record = |out: &mut Out, index: u64, rule: u8, mode: &str, level: usize, depth: usize, decoded: Option<String>| {
        let written = if common.json {
            let mut r = json!({
                "index": index,
                "rule": rule,
                "mode": mode,
                "level": level,
                "stack_depth": depth,
            });
            if let Some(d) = decoded {
                r["decoded_term"] = d.into();
            }
            writeln!(out, "{r}")
        } else {
            let tail = decoded.map_or(String::new(), |d| format!("  {d}"));
            writeln!(out, "{index:>6}  rule {rule:>2}  {mode:<8}  level {level}  depth {depth}{tail}")
        };
        if let Err(e) = written {
            failure.get_or_insert(Failure::from(e));
        }
    };
    let nf = match engine {
        Engine::Knv => {
            let k = knv::inject(&input.term)?;
            let show = |k: &knv::Config| -> Option<String> {
                decode.then(|| match decode_config(k) {
                    Ok(d) => print(&plug(&d), input.notation),
                    Err(e) => format!("<{e}>"),
                })
            };
            record(out, 0, 0, k.mode().as_str(), k.level(), k.stack().len(), show(&k));
            let mut index = 0;
            let r = knv::drive(&input.term, common.fuel, |_, rule, k| {
                index += 1;
                record(out, index, rule.number(), k.mode().as_str(), k.level(), k.stack().len(), show(k));
            })?;
            r.normal_form().cloned().ok_or(r.stats().transitions())
        }
        Engine::Kn => {
            if decode {
                return Err(Failure::Usage("--decode is only available for --machine knv".into()));
            }
            let k = lamvm::kn::kn_inject(&input.term)?;
            record(out, 0, 0, k.mode(), k.level(), k.stack().len(), None);
            let mut index = 0;
            let r = kn_drive(&input.term, common.fuel, |rule, k| {
                index += 1;
                record(out, index, rule.number(), k.mode(), k.level(), k.stack().len(), None);
            })?;
            r.normal_form().cloned().ok_or(r.stats().transitions())
        }
        _ => return Err(Failure::Usage("only the knv and kn machines can be traced".into())),
    };
    if let Some(f) = failure {
        return Err(f);
    }
    match nf {
        Ok(nf) => {
            let printed = print(&nf, input.notation);
            if common.json {
                writeln!(out, "{}", json!({ "result": "normal", "normal_form": printed }))?;
            } else {
                writeln!(out, "normal form: {printed}")?;
            }
            Ok(0)
        }
        Err(spent) => fuel_exhausted(out, common.json, spent),
    }
}

fn event_text(e: &PrefixEvent, notation: Notation) -> String {
    match e {
        PrefixEvent::LamRevealed => "binder".into(),
        PrefixEvent::ArgNfRevealed(t) => format!("argument {}", print(t, notation)),
        PrefixEvent::Done(t) => format!("done {}", print(t, notation)),
    }
}

fn convert(out: &mut Out, common: &Common, show_prefix: bool, left: &Input, right: &Input) -> Result<u8, Failure> {
    let notation = left.notation;
    let verdict = convertible(&left.term, &right.term, common.fuel)?;
    let (name, code) = match &verdict {
        Verdict::Convertible => ("convertible", 0),
        Verdict::NotConvertible { .. } => ("not convertible", 1),
        Verdict::Unknown { .. } => ("unknown", 2),
    };
    let events = |es: &[PrefixEvent]| es.iter().map(|e| event_text(e, notation)).collect::<Vec<_>>();
    if common.json {
        let mut r = json!({ "verdict": name });
        match &verdict {
            Verdict::NotConvertible {
                left_prefix,
                right_prefix,
                diverging_index,
                left_partial,
                right_partial,
            } => {
                r["diverging_index"] = (*diverging_index).into();
                if show_prefix {
                    r["left_prefix"] = events(left_prefix).into();
                    r["right_prefix"] = events(right_prefix).into();
                    r["left_partial"] = left_partial.print(notation).into();
                    r["right_partial"] = right_partial.print(notation).into();
                }
            }
            Verdict::Unknown { budget_spent } => r["budget_spent"] = (*budget_spent).into(),
            Verdict::Convertible => {}
        }
        writeln!(out, "{r}")?;
        return Ok(code);
    }
    writeln!(out, "{name}")?;
    if let (
        true,
        Verdict::NotConvertible {
            left_prefix,
            right_prefix,
            diverging_index,
            left_partial,
            right_partial,
        },
    ) = (show_prefix, &verdict)
    {
        writeln!(out, "streams differ at event {diverging_index}")?;
        writeln!(out, "left:  {}", events(left_prefix).join(", "))?;
        writeln!(out, "right: {}", events(right_prefix).join(", "))?;
        writeln!(out, "left partial normal form:  {}", left_partial.print(notation))?;
        writeln!(out, "right partial normal form: {}", right_partial.print(notation))?;
    }
    Ok(code)
}

fn stats(out: &mut Out, common: &Common, engine: Engine, input: &Input) -> Result<u8, Failure> {
    let (counts, total, contractions, finished): (Vec<(u8, String, u64)>, u64, u64, bool) = match engine {
        Engine::Knv => {
            let r = knv::run(&input.term, common.fuel)?;
            let s = r.stats();
            let counts = Rule::ALL.iter().map(|&rule| (rule.number(), format!("{rule:?}"), s.count(rule)));
            (counts.collect(), s.transitions(), s.contractions(), r.normal_form().is_some())
        }
        Engine::Kn => {
            let r = kn_run(&input.term, common.fuel)?;
            let s = r.stats();
            let counts = KnRule::ALL.iter().map(|&rule| (rule.number(), format!("{rule:?}"), s.count(rule)));
            (counts.collect(), s.transitions(), s.contractions(), r.normal_form().is_some())
        }
        _ => return Err(Failure::Usage("stats are only kept by the knv and kn machines".into())),
    };
    if common.json {
        let rules: Vec<_> = counts
            .iter()
            .map(|(n, name, c)| json!({ "rule": n, "name": name, "count": c }))
            .collect();
        writeln!(
            out,
            "{}",
            json!({ "rules": rules, "transitions": total, "contractions": contractions, "finished": finished })
        )?;
    } else {
        for (n, name, c) in &counts {
            writeln!(out, "rule {n:>2} {name:<11} {c}")?;
        }
        writeln!(out, "transitions {total}")?;
        writeln!(out, "contractions {contractions}")?;
        if !finished {
            writeln!(out, "fuel exhausted")?;
        }
    }
    Ok(if finished { 0 } else { EXIT_FUEL })
}

fn audit(out: &mut Out, common: &Common, input: &Input) -> Result<u8, Failure> {
    let initial = knv::inject(&input.term)?;
    let mut auditor = Auditor::new(&initial)
        .map_err(|v| Failure::Internal(format!("initial configuration: {v}")))?;
    let mut violations = Vec::new();
    let (mut checked, mut unchanged) = (0u64, 0u64);
    let r = knv::drive(&input.term, common.fuel, |before, rule, after| {
        if !violations.is_empty() {
            return;
        }
        checked += 1;
        match auditor.observe(before, rule, after) {
            Err(v) => violations.push(format!("transition {checked} (rule {rule}): {v}")),
            Ok(c) if rule == Rule::Beta => {
                if c.contraction != Some(true) {
                    violations.push(format!("transition {checked}: rule 6 is not one rrCbV step"));
                }
            }
            Ok(c) => {
                if !c.plug_preserved {
                    violations.push(format!("transition {checked} (rule {rule}): plugged term changed"));
                }
                match (rule, c.order) {
                    (Rule::VarSkip, Some(std::cmp::Ordering::Equal)) => unchanged += 1,
                    (_, Some(std::cmp::Ordering::Less)) => {}
                    _ => violations.push(format!(
                        "transition {checked} (rule {rule}): decoding did not increase"
                    )),
                }
            }
        }
    })?;
    let finished = r.normal_form().is_some();
    if common.json {
        writeln!(
            out,
            "{}",
            json!({
                "transitions": checked,
                "unchanged_decodings": unchanged,
                "violations": violations,
                "finished": finished,
            })
        )?;
    } else {
        writeln!(out, "{checked} transitions checked, {unchanged} left the decoding unchanged")?;
        for v in &violations {
            writeln!(out, "violation: {v}")?;
        }
        if violations.is_empty() {
            writeln!(out, "no violations")?;
        }
        if !finished {
            writeln!(out, "fuel exhausted")?;
        }
    }
    Ok(match (violations.is_empty(), finished) {
        (false, _) => EXIT_INTERNAL,
        (true, true) => 0,
        (true, false) => EXIT_FUEL,
    })
}

fn dispatch(cli: Cli) -> Result<u8, Failure> {
    let mut out: Out = BufWriter::new(io::stdout().lock());
    let code = match &cli.command {
        Command::Normalize { common, machine, term } => {
            normalize(&mut out, common, *machine, &read_term(term, common.notation)?)
        }
        Command::Trace {
            common,
            machine,
            decode,
            term,
        } => trace(&mut out, common, *machine, *decode, &read_term(term, common.notation)?),
        Command::Convert {
            common,
            show_prefix,
            left,
            right,
        } => {
            if left == "-" && right == "-" {
                return Err(Failure::Usage("only one term can come from stdin".into()));
            }
            let left = read_term(left, common.notation)?;
            let right = read_term(right, common.notation)?;
            convert(&mut out, common, *show_prefix, &left, &right)
        }
        Command::Stats { common, machine, term } => {
            stats(&mut out, common, *machine, &read_term(term, common.notation)?)
        }
        Command::Audit { common, term } => audit(&mut out, common, &read_term(term, common.notation)?),
    }?;
    out.flush()?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("lamvm: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
