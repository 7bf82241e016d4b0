//! Command-line front end: argument parsing, dispatch, human and JSON output,
//! and JSONL run reports.

use std::ffi::OsString;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use sumsetlab::bounds::{build_extremal, check_extremal_equality, classify_k, BoundReport, KClass};
use sumsetlab::decomposition::{
    decompose, delta, normalize, special_index_m, special_index_n, NormalizationStep,
};
use sumsetlab::search::{
    run_search, verify_lemma, BoundKind, SearchMode, SearchSpec, VerifyParams,
};
use sumsetlab::sets::{add_dilated, parse_set_file, IntSet};
use sumsetlab::{arith, Error};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURES: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// Sets longer than this are elided in human output.
const ELIDE_AT: usize = 200;

pub const WORKERS_ENV: &str = "SUMSETLAB_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "sumsetlab",
    version,
    about = "Dilated sumsets A + k·A: compute, bound, decompose, search, verify"
)]
struct Cli {
    /// Print one JSON object {command, params, result} instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Append a JSONL run record to this file.
    #[arg(long, global = true, value_name = "FILE")]
    report: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct SetSource {
    /// Comma-separated integers, e.g. "0,1,5" or "-3,2".
    #[arg(long, allow_hyphen_values = true)]
    set: Option<String>,

    /// One integer per line; lines starting with '#' are ignored.
    #[arg(long, value_name = "FILE")]
    set_file: Option<PathBuf>,
}

impl SetSource {
    fn load(&self) -> Result<IntSet, CliError> {
        match (&self.set, &self.set_file) {
            (Some(s), _) => Ok(s.parse()?),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
                Ok(parse_set_file(&text)?)
            }
            (None, None) => Err(CliError::Usage(
                "one of --set or --set-file is required".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Min,
    Violations,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// |A + k·A| and its elements.
    Compute {
        #[arg(long)]
        k: i64,
        #[command(flatten)]
        source: SetSource,
    },
    /// Lower bounds for sets of a given size.
    Bound {
        #[arg(long)]
        k: i64,
        #[arg(long)]
        size: i64,
    },
    /// Normalization log and residue-class decomposition.
    Decompose {
        #[arg(long)]
        k: i64,
        #[command(flatten)]
        source: SetSource,
    },
    /// Exhaustive search over 0 ∈ A ⊆ [0, diameter].
    Search {
        #[arg(long)]
        k: i64,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        diameter: i64,
        /// Restrict to gcd(A) = 1 (default on; `--gcd-one false` to disable).
        #[arg(long, action = ArgAction::Set, default_value_t = true, num_args = 0..=1, default_missing_value = "true")]
        gcd_one: bool,
        /// Keep only sets not larger than their mirror image.
        #[arg(long)]
        reflection: bool,
        #[arg(long, value_enum, default_value = "min")]
        mode: ModeArg,
        /// chs, factorial, or an integer.
        #[arg(long, default_value = "chs", allow_hyphen_values = true)]
        bound: String,
        #[arg(long)]
        workers: Option<usize>,
        /// Witnesses kept (lexicographically least).
        #[arg(long, default_value_t = 16)]
        witnesses: usize,
        /// Violations listed; the count is always exact.
        #[arg(long, default_value_t = 1000)]
        max_violations: usize,
    },
    /// Run a lemma checker over exhaustive and sampled slices.
    Verify {
        #[arg(long)]
        lemma: String,
        /// Multiplier or modulus; defaults to the lemma's standard list.
        #[arg(long, visible_alias = "modulus")]
        k: Option<i64>,
        #[arg(long)]
        diameter: Option<i64>,
        #[arg(long)]
        max_size: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Build k·{0,…,n} + {0,…,h−1} and compare with the CHS bound.
    Extremal {
        #[arg(long)]
        k: i64,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        h: i64,
        /// Exit 1 unless equality holds.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Lib(Error::Overflow(_)) => EXIT_RESOURCE,
            CliError::Lib(Error::Invariant(_)) => EXIT_FAILURES,
            CliError::Lib(_) => EXIT_USAGE,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Lib(e) => e.to_string(),
        }
    }
}

/// What a command produced: text lines, warnings, the structured payload and
/// the exit code.
struct Outcome {
    params: Value,
    result: Value,
    text: Vec<String>,
    warnings: Vec<String>,
    code: i32,
}

impl Outcome {
    fn new(params: Value, result: Value) -> Self {
        Outcome {
            params,
            result,
            text: Vec::new(),
            warnings: Vec::new(),
            code: EXIT_OK,
        }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }
}

#[derive(Serialize)]
struct RunRecord<'a> {
    timestamp: String,
    command: &'a str,
    params: &'a Value,
    result: &'a Value,
    elapsed_ms: u128,
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let start = Instant::now();
    let name = command_name(&cli.command);
    let outcome = match dispatch(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            return e.exit_code();
        }
    };
    for w in &outcome.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let printed = if cli.json {
        let doc = json!({
            "command": name,
            "params": outcome.params,
            "result": outcome.result,
        });
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&doc).expect("JSON values serialize")
        )
    } else {
        outcome.text.iter().try_for_each(|l| writeln!(out, "{l}"))
    };
    if let Err(e) = printed {
        let _ = writeln!(err, "error: cannot write output: {e}");
        return EXIT_RESOURCE;
    }
    if let Some(path) = &cli.report {
        let record = RunRecord {
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            command: name,
            params: &outcome.params,
            result: &outcome.result,
            elapsed_ms: start.elapsed().as_millis(),
        };
        if let Err(e) = append_record(path, &record) {
            let _ = writeln!(
                err,
                "error: cannot append report to {}: {e}",
                path.display()
            );
            return EXIT_RESOURCE;
        }
    }
    outcome.code
}

/// Writes the record as one complete line in a single `write` on an
/// append-mode handle.
fn append_record(path: &Path, record: &RunRecord) -> std::io::Result<()> {
    let mut line = serde_json::to_vec(record).map_err(std::io::Error::other)?;
    line.push(b'\n');
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(&line)?;
    f.flush()
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Compute { .. } => "compute",
        Command::Bound { .. } => "bound",
        Command::Decompose { .. } => "decompose",
        Command::Search { .. } => "search",
        Command::Verify { .. } => "verify",
        Command::Extremal { .. } => "extremal",
    }
}

fn dispatch(c: &Command) -> Result<Outcome, CliError> {
    match c {
        Command::Compute { k, source } => compute(*k, &source.load()?),
        Command::Bound { k, size } => bound(*k, *size),
        Command::Decompose { k, source } => decompose_cmd(*k, &source.load()?),
        Command::Search {
            k,
            size,
            diameter,
            gcd_one,
            reflection,
            mode,
            bound,
            workers,
            witnesses,
            max_violations,
        } => {
            let mut spec = SearchSpec::new(*k, *size, *diameter);
            spec.gcd_one = *gcd_one;
            spec.use_reflection = *reflection;
            spec.mode = match mode {
                ModeArg::Min => SearchMode::Minimum,
                ModeArg::Violations => SearchMode::Violations,
            };
            spec.bound = parse_bound(bound)?;
            spec.workers = resolve_workers(*workers)?;
            spec.witness_cap = *witnesses;
            spec.max_violations = *max_violations;
            search(&spec)
        }
        Command::Verify {
            lemma,
            k,
            diameter,
            max_size,
            samples,
            seed,
            budget,
            workers,
        } => {
            let params = VerifyParams {
                k: *k,
                diameter: *diameter,
                max_size: *max_size,
                samples: *samples,
                seed: *seed,
                budget: *budget,
                workers: resolve_workers(*workers)?,
            };
            verify(lemma, &params)
        }
        Command::Extremal { k, n, h, check } => extremal(*k, *n, *h, *check),
    }
}

fn parse_bound(s: &str) -> Result<BoundKind, CliError> {
    match s {
        "chs" => Ok(BoundKind::Chs),
        "factorial" => Ok(BoundKind::Factorial),
        other => other.parse::<i64>().map(BoundKind::Custom).map_err(|_| {
            CliError::Usage(format!(
                "--bound expects chs, factorial or an integer, got `{other}`"
            ))
        }),
    }
}

/// `--workers`, then `SUMSETLAB_WORKERS`, then the available parallelism.
fn resolve_workers(flag: Option<usize>) -> Result<usize, CliError> {
    let n = match flag {
        Some(n) => n,
        None => match std::env::var(WORKERS_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| {
                CliError::Usage(format!("{WORKERS_ENV}={v} is not a positive integer"))
            })?,
            Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
        },
    };
    if n == 0 {
        return Err(CliError::Usage("workers must be positive".into()));
    }
    Ok(n)
}

fn elide(s: &IntSet) -> String {
    if s.len() <= ELIDE_AT {
        return s.to_string();
    }
    let head: Vec<String> = s.iter().take(ELIDE_AT).map(|x| x.to_string()).collect();
    format!(
        "{{{},…}} ({} elements, {} not shown)",
        head.join(","),
        s.len(),
        s.len() - ELIDE_AT
    )
}

fn class_warning(k: i64) -> Result<Option<String>, CliError> {
    Ok((classify_k(k)? == KClass::Other).then(|| {
        format!("k = {k} is neither a prime power nor a product of two distinct primes; no proven bound applies (conjecture probing)")
    }))
}

fn bound_line(r: &BoundReport) -> String {
    let opt = |v: Option<i64>| v.map_or("n/a".to_string(), |x| x.to_string());
    format!(
        "bounds for |A| = {}: chs {}, factorial {}, threshold {}, k_class {}{}",
        r.size,
        r.chs_bound,
        opt(r.factorial_bound),
        opt(r.threshold),
        r.k_class.as_str(),
        if r.proven() {
            " (proven at this size)"
        } else {
            ""
        }
    )
}

fn compute(k: i64, a: &IntSet) -> Result<Outcome, CliError> {
    let s = add_dilated(a, k, a)?;
    let report = BoundReport::new(k, a.len() as i64)?;
    let mut o = Outcome::new(
        json!({ "k": k, "set": a }),
        json!({
            "size": a.len(),
            "sumset_size": s.len(),
            "sumset": s,
            "bounds": report,
        }),
    );
    o.line(format!("A = {} (|A| = {})", elide(a), a.len()));
    o.line(format!("|A + {k}·A| = {}", s.len()));
    o.line(format!("A + {k}·A = {}", elide(&s)));
    o.line(bound_line(&report));
    o.warnings.extend(class_warning(k)?);
    Ok(o)
}

fn bound(k: i64, size: i64) -> Result<Outcome, CliError> {
    let r = BoundReport::new(k, size)?;
    let mut o = Outcome::new(json!({ "k": k, "size": size }), json!(r));
    let opt = |v: Option<i64>| v.map_or("n/a (overflows 64 bits)".to_string(), |x| x.to_string());
    o.line(format!("k = {k}, |A| = {size}"));
    o.line(format!(
        "chs_bound        (k+1)|A| − ⌈k(k+2)/4⌉ = {}",
        r.chs_bound
    ));
    o.line(format!(
        "factorial_bound  (k+1)|A| − k!        = {}",
        opt(r.factorial_bound)
    ));
    o.line(format!(
        "threshold        (k−1)²·k!            = {}",
        opt(r.threshold)
    ));
    o.line(format!("k_class          {}", r.k_class.as_str()));
    o.line(format!(
        "proven at this size: {}",
        if r.proven() { "yes" } else { "no" }
    ));
    o.warnings.extend(class_warning(k)?);
    Ok(o)
}

fn step_text(step: &NormalizationStep) -> String {
    match step {
        NormalizationStep::DivideByGcd { divisor } => format!("divide by gcd {divisor}"),
        NormalizationStep::Translate { shift } => format!("translate by {shift}"),
    }
}

fn decompose_cmd(k: i64, a: &IntSet) -> Result<Outcome, CliError> {
    let norm = normalize(a, k)?;
    let d = decompose(&norm.result, k)?;
    let class = classify_k(k)?;
    let m = match class {
        KClass::Prime | KClass::PrimePower => {
            let p = arith::factorize(k as u64)[0].0 as i64;
            special_index_m(&d, p).ok()
        }
        _ => None,
    };
    let n = match class {
        KClass::Semiprime => special_index_n(&d)?,
        _ => None,
    };
    let mut deltas = Vec::with_capacity(d.j());
    for i in 1..=d.j() {
        deltas.push(delta(&d, i, i)?.delta.len());
    }

    let mut o = Outcome::new(
        json!({ "k": k, "set": a }),
        json!({
            "normalization": norm,
            "j": d.j(),
            "classes": d.classes(),
            "e": d.e_set(),
            "f": d.f_set(),
            "m": m,
            "n": n.map(|(n, _)| n),
            "p1": n.map(|(_, p)| p),
            "delta_sizes": deltas,
        }),
    );
    o.line(format!(
        "input A = {} (|A| = {}, |A + {k}·A| = {})",
        elide(a),
        a.len(),
        norm.input_sumset_size
    ));
    if norm.steps.is_empty() {
        o.line("normalization: already normalized");
    }
    for (i, st) in norm.steps.iter().enumerate() {
        o.line(format!(
            "step {}: {} → {}  [|A + {k}·A| = {}; {}]",
            i + 1,
            step_text(&st.step),
            elide(&st.result),
            st.sumset_size,
            st.step.justification()
        ));
    }
    o.line(format!("normalized A = {}", elide(&norm.result)));
    o.line(format!("j = {}", d.j()));
    for (i, c) in d.classes().iter().enumerate() {
        o.line(format!(
            "  class {}: u = {}, X = {}, |X| = {}, |X̂| = {}, |Δ_{}{}| = {}",
            i + 1,
            c.offset,
            elide(&c.quotient),
            c.size(),
            c.quotient_residues,
            i + 1,
            i + 1,
            deltas[i]
        ));
    }
    o.line(format!("E = {:?}, F = {:?}", d.e_set(), d.f_set()));
    if let Some(m) = m {
        o.line(format!("m = {m}"));
    }
    if let Some((n, p1)) = n {
        o.line(format!("n = {n} (p₁ = {p1})"));
    }
    Ok(o)
}

fn search(spec: &SearchSpec) -> Result<Outcome, CliError> {
    let r = run_search(spec)?;
    let class = classify_k(spec.k)?;
    let mode = match spec.mode {
        SearchMode::Minimum => "min",
        SearchMode::Violations => "violations",
    };
    let bound = match spec.bound {
        BoundKind::Chs => json!("chs"),
        BoundKind::Factorial => json!("factorial"),
        BoundKind::Custom(v) => json!(v),
    };
    let mut result = serde_json::to_value(&r).expect("search result serializes");
    result["k_class"] = json!(class.as_str());
    let mut o = Outcome::new(
        json!({
            "k": spec.k,
            "size": spec.size,
            "diameter": spec.diameter,
            "gcd_one": spec.gcd_one,
            "reflection": spec.use_reflection,
            "mode": mode,
            "bound": bound,
            "witnesses": spec.witness_cap,
            "max_violations": spec.max_violations,
        }),
        result,
    );
    let filters = match (spec.gcd_one, spec.use_reflection) {
        (true, true) => ", gcd 1, reflection-reduced",
        (true, false) => ", gcd 1",
        (false, true) => ", reflection-reduced",
        (false, false) => "",
    };
    o.line(format!(
        "search k = {}, |A| = {}, 0 ∈ A ⊆ [0,{}]{filters}",
        spec.k, spec.size, spec.diameter
    ));
    o.line(format!("sets enumerated: {}", r.sets_enumerated));
    if let Some(min) = r.min_value {
        o.line(format!(
            "min |A + {}·A| over diameter ≤ {}: {min}",
            spec.k, spec.diameter
        ));
        let shown: Vec<String> = r.witnesses.iter().map(elide).collect();
        o.line(format!(
            "witnesses ({}): {}",
            r.witnesses.len(),
            shown.join(" ")
        ));
    }
    if let Some(b) = r.bound {
        o.line(format!("bound: {b}; violations: {}", r.violation_count));
        for v in &r.violations {
            o.line(format!(
                "  {} has |A + {}·A| = {} < {}",
                elide(&v.set),
                spec.k,
                v.sumset_size,
                v.bound
            ));
        }
        if r.violation_count as usize > r.violations.len() {
            o.line(format!(
                "  … {} more not listed",
                r.violation_count as usize - r.violations.len()
            ));
        }
        if r.violation_count > 0 {
            o.code = EXIT_FAILURES;
        }
    }
    o.line(format!(
        "kernel spot checks: {} agreed with pairwise enumeration",
        r.spot_checks
    ));
    if class == KClass::Other {
        o.line("label: conjecture probing");
    }
    o.warnings.extend(class_warning(spec.k)?);
    Ok(o)
}

fn verify(lemma: &str, params: &VerifyParams) -> Result<Outcome, CliError> {
    let r = verify_lemma(lemma, params)?;
    let mut o = Outcome::new(json!({ "lemma": lemma, "verify": params }), json!(r));
    o.line(format!("lemma {} ({:?})", r.lemma, r.mode));
    for s in &r.slices {
        o.line(format!("  {s}"));
    }
    o.line(format!(
        "cases {}, applicable {}, failures {}",
        r.cases_checked, r.applicable_cases, r.failure_count
    ));
    for f in &r.failures {
        o.line(format!("  FAIL {}: {}", f.case, f.detail));
    }
    if let Some(minima) = &r.minima {
        let parts: Vec<String> = minima
            .iter()
            .map(|(s, m)| format!("|A| = {s}: {m}"))
            .collect();
        o.line(format!("minima {}", parts.join(", ")));
    }
    if !r.passed() {
        o.code = EXIT_FAILURES;
    }
    Ok(o)
}

fn extremal(k: i64, n: i64, h: i64, check: bool) -> Result<Outcome, CliError> {
    if !(1..=k).contains(&h) {
        return Err(CliError::Usage(format!("--h must lie in 1..={k}, got {h}")));
    }
    let f = build_extremal(k, n, h)?;
    let size = f.set.len() as i64;
    let lhs = add_dilated(&f.set, k, &f.set)?.len() as i64;
    let report = BoundReport::new(k, size)?;
    let equality = if f.in_interval_regime() {
        Some(check_extremal_equality(&f)?)
    } else {
        None
    };
    let mut o = Outcome::new(
        json!({ "k": k, "n": n, "h": h, "check": check }),
        json!({
            "set": f.set,
            "size": size,
            "sumset_size": lhs,
            "chs_bound": report.chs_bound,
            "interval_regime": f.in_interval_regime(),
            "equality": equality,
        }),
    );
    o.line(format!(
        "A = {k}·{{0,…,{n}}} + {{0,…,{}}} = {}",
        h - 1,
        elide(&f.set)
    ));
    o.line(format!(
        "|A| = {size}, |A + {k}·A| = {lhs}, chs_bound = {}",
        report.chs_bound
    ));
    match &equality {
        Some(e) => {
            let against = if e.rhs_is_chs {
                "chs_bound"
            } else {
                "(k+1)|A| − h(k+1−h)"
            };
            o.line(format!(
                "{}: {} {} {} ({against})",
                if e.equal { "equality" } else { "no equality" },
                e.lhs,
                if e.equal { "=" } else { "≠" },
                e.rhs
            ));
            if check && !e.equal {
                o.code = EXIT_FAILURES;
            }
        }
        None => {
            o.warnings.push(format!(
                "n = {n} < k − h = {}: outside the interval regime, no equality asserted",
                k - h
            ));
            o.line("no equality asserted (n < k − h)");
        }
    }
    Ok(o)
}
