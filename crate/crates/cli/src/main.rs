use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use derange::actions::{GroupAction, DEFAULT_INDEX_CAP};
use derange::alt_comb::{abc_all, cnk_recurrence_bound};
use derange::catalog::{builtin, load_group, GroupSpec};
use derange::chartab::{brute_force_product_counts, BRUTE_FORCE_CAP};
use derange::classes::{ClassOptions, ConjClassTable};
use derange::derangement::{decomposition_tag, derangement_report, width, DerangementReport, Width, DEFAULT_K_MAX};
use derange::families::{crosscheck_family, sweep, CrossCheckStatus};
use derange::genpair::{find_conjugate_derangement_pair, GenerationCertificate, PairSearch, DEFAULT_BUDGET};
use derange::rational::{fmt_decimal, fmt_ratio};
use derange::verify::{run_suite, Ledger, Suite};
use derange::{Error, ExactRational, PermGroup};

/// Exact derangement statistics of transitive permutation groups.
#[derive(Parser, Debug)]
#[command(name = "derange", version)]
struct Cli {
    /// Worker threads for class enumeration and product checks.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Derangement proportion of an action.
    Delta(GroupArgs),
    /// Least k with every element a product of k derangements.
    Width {
        #[command(flatten)]
        args: GroupArgs,
        /// Largest power of the derangement set examined.
        #[arg(long, default_value_t = DEFAULT_K_MAX)]
        k_max: u32,
        /// Largest group order for brute-force class products.
        #[arg(long, default_value_t = BRUTE_FORCE_CAP)]
        product_cap: u64,
    },
    /// Run a verification suite (or `all`) and print its ledger.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Closed-form derangement proportions of the Lie-type families as TSV.
    Families {
        #[arg(long, value_name = "QMAX")]
        sweep: u64,
        /// Compare against brute force where a permutation model exists.
        #[arg(long)]
        crosscheck: bool,
        #[arg(long)]
        float: bool,
    },
    /// Alternating-group k-subset statistics as TSV.
    Alt {
        #[arg(long, default_value_t = 5)]
        n_min: u32,
        #[arg(long)]
        n_max: u32,
        #[arg(long)]
        float: bool,
    },
    /// Search for conjugate derangements generating the group.
    Pair {
        #[command(flatten)]
        args: GroupArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Re-verify a generation certificate written by `pair`.
    Check { certificate: PathBuf },
}

#[derive(Args, Debug)]
struct GroupArgs {
    /// Built-in name (M11, alt:5, L2(7), C2, ...), `file:<path>` or a `.grp` path.
    #[arg(long)]
    group: String,
    /// `natural`, `cosets:<subgroup.grp>` or `ksubsets:<k>`.
    #[arg(long, default_value = "natural")]
    action: String,
    #[arg(long, default_value_t = 1_000_000_000)]
    order_cap: u64,
    #[arg(long, default_value_t = DEFAULT_INDEX_CAP)]
    index_cap: u64,
    #[arg(long, default_value_t = 0)]
    class_seed: u64,
    /// Add decimal approximations.
    #[arg(long)]
    float: bool,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Also write the JSON result to this file.
    #[arg(long)]
    output: Option<PathBuf>,
}

enum Failure {
    /// stdout closed by the reader, e.g. `| head`
    Closed,
    Input(String),
    Cap(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Closed => 0,
            Failure::Input(_) => 1,
            Failure::Cap(_) => 2,
            Failure::Verification(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Closed => "",
            Failure::Input(m) | Failure::Cap(m) | Failure::Verification(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::OrderExceedsCap { .. } | Error::IndexCapExceeded { .. } | Error::BudgetExceeded(_) => Failure::Cap(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return Failure::Closed;
        }
        Failure::Input(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(1);
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().expect("pool configured once");
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Closed) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Delta(args) => cmd_delta(&args),
        Command::Width { args, k_max, product_cap } => cmd_width(&args, k_max, product_cap),
        Command::Verify { suite, seed, json, output } => cmd_verify(&suite, seed, json, output.as_deref()),
        Command::Families { sweep, crosscheck, float } => cmd_families(sweep, crosscheck, float),
        Command::Alt { n_min, n_max, float } => cmd_alt(n_min, n_max, float),
        Command::Pair { args, seed, budget } => cmd_pair(&args, seed, budget),
        Command::Check { certificate } => cmd_check(&certificate),
    }
}

fn resolve_group(source: &str) -> Result<GroupSpec, Error> {
    if let Some(path) = source.strip_prefix("file:") {
        load_group(path)
    } else if source.ends_with(".grp") {
        load_group(source)
    } else {
        builtin(source)
    }
}

fn build_group(args: &GroupArgs) -> Result<(GroupSpec, PermGroup), Error> {
    let spec = resolve_group(&args.group)?;
    let group = PermGroup::new(spec.degree, &spec.generators)?;
    let order = group.order();
    if order > args.order_cap.into() {
        return Err(Error::OrderExceedsCap {
            order: order.to_string(),
            cap: args.order_cap,
        });
    }
    Ok((spec, group))
}

fn build_action(group: &PermGroup, spec: &str, index_cap: u64) -> Result<GroupAction, Error> {
    if spec == "natural" {
        Ok(GroupAction::natural(group))
    } else if let Some(path) = spec.strip_prefix("cosets:") {
        let sub = resolve_group(path)?;
        if sub.degree != group.degree() {
            return Err(Error::DegreeMismatch {
                expected: group.degree(),
                got: sub.degree,
            });
        }
        GroupAction::cosets(group, &sub.generators, index_cap)
    } else if let Some(k) = spec.strip_prefix("ksubsets:") {
        let k = k.parse().map_err(|_| Error::OutOfRange(format!("bad subset size `{k}`")))?;
        GroupAction::ksubsets(group, k, index_cap)
    } else {
        Err(Error::OutOfRange(format!("unknown action `{spec}`")))
    }
}

/// Hex SHA-256 of the degree and generator list, naming the cache file.
fn cache_key(group: &PermGroup) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("degree {}\n", group.degree()));
    for g in group.generators() {
        hasher.update(format!("{g}\n"));
    }
    hex::encode(hasher.finalize())
}

/// Class table, memoised under `DERANGE_CACHE_DIR` when set. A cached table
/// is not indexed, so callers needing `class_of` on every element recompute.
fn class_table(group: &PermGroup, seed: u64) -> Result<ConjClassTable, Failure> {
    let options = ClassOptions { seed, ..ClassOptions::default() };
    let Some(dir) = std::env::var_os("DERANGE_CACHE_DIR") else {
        return Ok(ConjClassTable::compute(group, options)?);
    };
    let path = Path::new(&dir).join(format!("{}.jsonl", cache_key(group)));
    if let Ok(file) = fs::File::open(&path) {
        if let Ok(table) = ConjClassTable::read_jsonl(group, BufReader::new(file)) {
            return Ok(table);
        }
    }
    let table = ConjClassTable::compute(group, options)?;
    fs::create_dir_all(&dir)?;
    let tmp = path.with_extension("tmp");
    table.write_jsonl(fs::File::create(&tmp)?)?;
    fs::rename(&tmp, &path)?;
    Ok(table)
}

fn rational_text(x: &ExactRational, float: bool) -> String {
    if float {
        format!("{} ({})", fmt_ratio(x), fmt_decimal(x, 6))
    } else {
        fmt_ratio(x)
    }
}

fn emit_json(value: &Value, print: bool, output: Option<&Path>) -> Outcome {
    let text = serde_json::to_string_pretty(value).expect("plain data") + "\n";
    if print {
        print!("{text}");
    }
    if let Some(path) = output {
        fs::write(path, text)?;
    }
    Ok(())
}

fn setup(args: &GroupArgs) -> Result<(GroupSpec, ConjClassTable, DerangementReport), Failure> {
    let (spec, group) = build_group(args)?;
    let action = build_action(&group, &args.action, args.index_cap)?;
    let table = class_table(&group, args.class_seed)?;
    let report = derangement_report(&table, &action)?;
    Ok((spec, table, report))
}

fn cmd_delta(args: &GroupArgs) -> Outcome {
    let (spec, table, report) = setup(args)?;
    let mut value = report.to_json(&table);
    value["group"] = json!(spec.name);
    if args.float {
        value["delta_float"] = json!(fmt_decimal(&report.delta, 6));
    }
    if !args.json {
        println!("group = {} (order {}, degree {})", spec.name, report.group_order, spec.degree);
        println!("action = {} on {} points", report.action, report.degree);
        println!("delta = {}", fmt_ratio(&report.delta));
        if args.float {
            println!("delta ~ {}", fmt_decimal(&report.delta, 6));
        }
        println!("derangements = {}", report.derangement_count);
        let names: Vec<&str> = report.derangement_classes.iter().map(|&i| table.get(i).name.as_str()).collect();
        println!("derangement classes = {}", names.join(" "));
        println!("elusive = {}", report.is_elusive());
    }
    emit_json(&value, args.json, args.output.as_deref())
}

fn cmd_width(args: &GroupArgs, k_max: u32, product_cap: u64) -> Outcome {
    let (spec, mut table, mut report) = setup(args)?;
    let small = table.group().order_u64().is_some_and(|o| o <= product_cap);
    let products = if small {
        if !table.is_indexed() {
            let (_, group) = build_group(args)?;
            table = ConjClassTable::compute(&group, ClassOptions { seed: args.class_seed, ..ClassOptions::default() })?;
            report = derangement_report(&table, &build_action(&group, &args.action, args.index_cap)?)?;
        }
        Some(brute_force_product_counts(&table, product_cap)?)
    } else {
        None
    };
    let w = width(&report, products.as_ref(), k_max)?;
    let tag = products.as_ref().and_then(|p| decomposition_tag(&report, p));
    let value = json!({
        "schema": 1,
        "group": spec.name,
        "action": report.action,
        "delta": fmt_ratio(&report.delta),
        "width": w.to_string(),
        "finite": matches!(w, Width::Finite(_)),
        "k_max": k_max,
        "decomposition": tag,
    });
    if !args.json {
        println!("group = {} (order {})", spec.name, report.group_order);
        println!("action = {} on {} points", report.action, report.degree);
        println!("delta = {}", rational_text(&report.delta, args.float));
        println!("width = {w}");
        if let Some(tag) = tag {
            println!("decomposition = {tag}");
        }
    }
    emit_json(&value, args.json, args.output.as_deref())
}

fn ledger_json(ledger: &Ledger) -> Value {
    let checks: Vec<Value> = ledger
        .checks
        .iter()
        .map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail}))
        .collect();
    json!({"suite": ledger.suite.name(), "passed": ledger.passed(), "checks": checks})
}

fn cmd_verify(name: &str, seed: u64, as_json: bool, output: Option<&Path>) -> Outcome {
    let suites: Vec<Suite> = if name == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![name.parse().map_err(|_| Failure::Input(format!("unknown suite `{name}`")))?]
    };
    let mut ledgers = Vec::new();
    for suite in suites {
        let ledger = run_suite(suite, seed);
        if !as_json {
            println!("== {suite} ==");
            print!("{ledger}");
        }
        ledgers.push(ledger);
    }
    let passed = ledgers.iter().all(Ledger::passed);
    let value = json!({
        "schema": 1,
        "seed": seed,
        "passed": passed,
        "suites": ledgers.iter().map(ledger_json).collect::<Vec<_>>(),
    });
    emit_json(&value, as_json, output)?;
    let failed: usize = ledgers.iter().map(|l| l.checks.iter().filter(|c| !c.passed).count()).sum();
    if failed > 0 {
        return Err(Failure::Verification(format!("{failed} check(s) failed")));
    }
    Ok(())
}

fn cmd_families(q_max: u64, crosscheck: bool, float: bool) -> Outcome {
    let mut out = std::io::stdout().lock();
    let mut header = vec!["family", "q", "delta", "kind"];
    if float {
        header.push("delta_float");
    }
    if crosscheck {
        header.extend(["brute_force", "status"]);
    }
    writeln!(out, "{}", header.join("\t"))?;
    let mut discrepancies = 0;
    for (case, form) in sweep(q_max) {
        let mut row = vec![case.family.to_string(), case.q.to_string(), fmt_ratio(form.value()), form.kind().to_string()];
        if float {
            row.push(fmt_decimal(form.value(), 6));
        }
        if crosscheck {
            let c = crosscheck_family(&case);
            row.push(c.brute_force.as_ref().map_or("-".into(), fmt_ratio));
            row.push(match &c.status {
                CrossCheckStatus::Match => "match".into(),
                CrossCheckStatus::Discrepancy => "discrepancy".into(),
                CrossCheckStatus::BoundHolds => "bound_holds".into(),
                CrossCheckStatus::NoModel(_) => "no_model".into(),
            });
            if c.status == CrossCheckStatus::Discrepancy {
                discrepancies += 1;
            }
        }
        writeln!(out, "{}", row.join("\t"))?;
    }
    if discrepancies > 0 {
        return Err(Failure::Verification(format!("{discrepancies} closed form(s) disagree with brute force")));
    }
    Ok(())
}

fn cmd_alt(n_min: u32, n_max: u32, float: bool) -> Outcome {
    if n_min < 2 || n_min > n_max {
        return Err(Failure::Input("need 2 ≤ n-min ≤ n-max".into()));
    }
    let mut out = std::io::stdout().lock();
    let show = |x: &ExactRational| rational_text(x, float);
    writeln!(out, "n\tk\ta\tb\tc\tf\tbound")?;
    for n in n_min..=n_max {
        let rows = abc_all(n);
        for k in 1..n {
            let r = &rows[k as usize];
            let bound = if 2 * k <= n { show(&cnk_recurrence_bound(n, k)) } else { "-".into() };
            writeln!(out, "{n}\t{k}\t{}\t{}\t{}\t{}\t{bound}", show(&r.a), show(&r.b), show(&r.c), show(&r.a))?;
        }
    }
    Ok(())
}

fn cmd_pair(args: &GroupArgs, seed: u64, budget: u64) -> Outcome {
    let (_, group) = build_group(args)?;
    let action = build_action(&group, &args.action, args.index_cap)?;
    match find_conjugate_derangement_pair(&action, budget, seed)? {
        PairSearch::Found(cert) => {
            if !cert.verify()? {
                return Err(Failure::Verification("certificate failed re-verification".into()));
            }
            if !args.json {
                println!("x = {}", cert.x);
                println!("g = {}", cert.g);
                println!("y = {}", cert.y());
                println!("trial = {} (seed {seed})", cert.trial);
            }
            emit_json(&cert.to_json(), args.json, args.output.as_deref())
        }
        PairSearch::NotFound { budget } => Err(Failure::Cap(format!("no generating pair within {budget} trials"))),
    }
}

fn cmd_check(path: &Path) -> Outcome {
    let value: Value = serde_json::from_str(&fs::read_to_string(path)?).map_err(|e| Failure::Input(e.to_string()))?;
    let cert = GenerationCertificate::from_json(&value)?;
    if cert.verify()? {
        println!("certificate ok: order {}", cert.checked_order);
        Ok(())
    } else {
        Err(Failure::Verification("certificate does not verify".into()))
    }
}
