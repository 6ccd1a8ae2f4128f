//! Command-line front end. [`run`] returns the process exit status:
//! 0 on success, 1 when verification fails, 2 on usage or input errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::catalog::{build_entry, check_prime, load_specs, plan, verify_catalog, CatalogEntry, PlannedEntry, VerifyOptions};
use crate::dsl::{emit_cas, Dialect, EmitHeader, FamilySpec};
use crate::invariants::{render_partition, InvariantProfile};
use crate::numtheory::{formula_terms, group_count_terms, is_prime, CountTerms};
use crate::pcgroup::{format_word, DEFAULT_BUDGET};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DialectArg {
    GapStyle,
    MagmaStyle,
}

impl From<DialectArg> for Dialect {
    fn from(d: DialectArg) -> Self {
        match d {
            DialectArg::GapStyle => Dialect::GapStyle,
            DialectArg::MagmaStyle => Dialect::MagmaStyle,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "p6", version, about = "Catalog of the groups of order p^6")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// The prime.
    #[arg(long = "p", global = true)]
    p: Option<u64>,
    /// Directory of .p6 family files.
    #[arg(long, global = true, default_value = "data")]
    data: PathBuf,
    /// Largest group the dense invariant engine may enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Permit p = 5.
    #[arg(long = "allow-p5", global = true)]
    allow_p5: bool,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Output directory for export.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Selector {
    /// Catalog index (1-based).
    #[arg(long)]
    index: Option<usize>,
    /// Family number.
    #[arg(long)]
    family: Option<u32>,
    /// Substring of the entry label.
    #[arg(long)]
    label: Option<String>,
}

impl Selector {
    fn is_empty(&self) -> bool {
        self.index.is_none() && self.family.is_none() && self.label.is_none()
    }

    fn matches(&self, e: &PlannedEntry, spec: &FamilySpec) -> bool {
        self.index.is_none_or(|i| i == e.index)
            && self.family.is_none_or(|f| f == spec.family)
            && self.label.as_ref().is_none_or(|l| e.label.contains(l.as_str()))
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the count formula.
    Count,
    /// Build and check the whole catalog.
    Verify {
        /// Compute invariant profiles (default only at p = 7).
        #[arg(long, conflicts_with = "no_profiles")]
        profiles: bool,
        #[arg(long = "no-profiles")]
        no_profiles: bool,
    },
    /// Print the presentation and invariants of selected entries.
    Inspect {
        #[command(flatten)]
        selector: Selector,
    },
    /// Write a computer algebra script per selected entry.
    Export {
        #[command(flatten)]
        selector: Selector,
        #[arg(long, value_enum, default_value = "gap-style")]
        dialect: DialectArg,
    },
    /// Print the ordered catalog labels.
    List {
        #[arg(long)]
        family: Option<u32>,
    },
}

struct Failure(i32, String);

type Outcome = Result<i32, Failure>;

fn usage(msg: impl ToString) -> Failure {
    Failure(2, msg.to_string())
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Outcome {
    let g = &cli.global;
    let p = g.p.ok_or_else(|| usage("--p is required"))?;
    if g.budget == 0 {
        return Err(usage("--budget must be positive"));
    }
    if g.workers == Some(0) {
        return Err(usage("--workers must be positive"));
    }
    let io = |e: std::io::Error| Failure(2, e.to_string());
    match &cli.command {
        Command::Count => count(p, g, out),
        Command::Verify { profiles, no_profiles } => {
            let specs = load_specs(&g.data).map_err(usage)?;
            let opts = VerifyOptions {
                workers: g.workers,
                profiles: if *profiles { Some(true) } else if *no_profiles { Some(false) } else { None },
                allow_p5: g.allow_p5,
                budget: g.budget,
            };
            let report = verify_catalog(p, &specs, opts).map_err(usage)?;
            let text = match g.format {
                Format::Text => report.to_text(),
                Format::Machine => report.to_machine(),
            };
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Inspect { selector } => {
            if selector.is_empty() {
                return Err(usage("inspect needs --index, --family or --label"));
            }
            for_selected(p, g, selector, |e| {
                let pr = e.profile().map_err(usage)?;
                let text = match g.format {
                    Format::Text => inspect_text(e, pr),
                    Format::Machine => inspect_machine(e, pr),
                };
                out.write_all(text.as_bytes()).map_err(io)
            })?;
            Ok(0)
        }
        Command::Export { selector, dialect } => {
            let dialect = Dialect::from(*dialect);
            if let Some(dir) = &g.out {
                std::fs::create_dir_all(dir).map_err(io)?;
            }
            for_selected(p, g, selector, |e| {
                let header = EmitHeader { family: e.family, label: e.label.clone(), binding: e.binding.to_string() };
                let script = emit_cas(e.group.presentation(), &header, dialect);
                match &g.out {
                    None => out.write_all(script.as_bytes()).map_err(io),
                    Some(dir) => {
                        let path = dir.join(format!("p{}-{:04}.{}", e.p, e.index, dialect.extension()));
                        std::fs::write(&path, script).map_err(io)?;
                        writeln!(out, "{}", path.display()).map_err(io)
                    }
                }
            })?;
            Ok(0)
        }
        Command::List { family } => {
            let specs = load_specs(&g.data).map_err(usage)?;
            let ctx = check_prime(p, g.allow_p5).map_err(usage)?;
            let planned = plan(&specs, &ctx).map_err(usage)?;
            let mut shown = 0;
            for e in &planned {
                let spec = &specs[e.spec];
                if family.is_some_and(|f| f != spec.family) {
                    continue;
                }
                shown += 1;
                match g.format {
                    Format::Text => writeln!(out, "{}\t{}", e.index, e.label),
                    Format::Machine => {
                        writeln!(out, "entry p={p} index={} family={} label={:?}", e.index, spec.family, e.label)
                    }
                }
                .map_err(io)?;
            }
            if shown == 0 {
                return Err(usage("no catalog entries match"));
            }
            Ok(0)
        }
    }
}

fn for_selected(
    p: u64,
    g: &Global,
    selector: &Selector,
    mut f: impl FnMut(&CatalogEntry) -> Result<(), Failure>,
) -> Result<(), Failure> {
    let specs = load_specs(&g.data).map_err(usage)?;
    let ctx = check_prime(p, g.allow_p5).map_err(usage)?;
    let planned = plan(&specs, &ctx).map_err(usage)?;
    let chosen: Vec<&PlannedEntry> = planned.iter().filter(|e| selector.matches(e, &specs[e.spec])).collect();
    if chosen.is_empty() {
        return Err(usage("no catalog entries match the selector"));
    }
    for e in chosen {
        let entry = build_entry(&specs, e, &ctx, g.budget).map_err(|x| Failure(1, x.to_string()))?;
        f(&entry)?;
    }
    Ok(())
}

fn count(p: u64, g: &Global, out: &mut dyn Write) -> Outcome {
    if !is_prime(p) {
        return Err(usage(format!("{p} is not prime")));
    }
    let terms: CountTerms = match group_count_terms(p) {
        Ok(t) => t,
        Err(_) if p == 5 && g.allow_p5 => formula_terms(5),
        Err(e) => return Err(usage(e)),
    };
    let total = terms.total();
    let io = |e: std::io::Error| Failure(2, e.to_string());
    match g.format {
        Format::Text => {
            writeln!(out, "{total}").map_err(io)?;
            writeln!(out, "  3p^2 + 39p + 344 = {}", terms.quadratic).map_err(io)?;
            writeln!(out, "  24 gcd(p-1, 3) = {}", 24 * terms.gcd3).map_err(io)?;
            writeln!(out, "  11 gcd(p-1, 4) = {}", 11 * terms.gcd4).map_err(io)?;
            writeln!(out, "  2 gcd(p-1, 5) = {}", 2 * terms.gcd5).map_err(io)?;
        }
        Format::Machine => {
            writeln!(
                out,
                "count p={p} total={total} quadratic={} gcd3={} gcd4={} gcd5={}",
                terms.quadratic, terms.gcd3, terms.gcd4, terms.gcd5
            )
            .map_err(io)?;
        }
    }
    Ok(0)
}

fn series(orders: &[u32]) -> String {
    let parts: Vec<String> = orders.iter().map(|k| format!("p^{k}")).collect();
    parts.join(" > ")
}

fn ascending(orders: &[u32]) -> String {
    let parts: Vec<String> = orders.iter().map(|k| format!("p^{k}")).collect();
    parts.join(" < ")
}

fn classes_text(pr: &InvariantProfile) -> String {
    match &pr.class_size_multiset {
        None => "not computed".into(),
        Some(m) => {
            let sizes: Vec<String> = m.iter().map(|(size, count)| format!("{count}x{size}")).collect();
            format!("{} ({})", pr.class_count().unwrap_or(0), sizes.join(" "))
        }
    }
}

fn inspect_text(e: &CatalogEntry, pr: &InvariantProfile) -> String {
    let pres = e.group.presentation();
    let names = pres.names();
    let mut rels = Vec::new();
    for i in 1..=pres.n() {
        let r = pres.power_rhs(i);
        if !r.is_identity() {
            rels.push(format!("{}^p = {}", names[i - 1], format_word(&r, names, "*")));
        }
    }
    for j in 1..=pres.n() {
        for i in 1..j {
            let r = pres.comm_rhs(j, i);
            if !r.is_identity() {
                rels.push(format!("[{},{}] = {}", names[j - 1], names[i - 1], format_word(&r, names, "*")));
            }
        }
    }
    let mut s = String::new();
    s += &format!("#{} {} (p = {}, family {}, rank {})\n", e.index, e.label, e.p, e.family, e.rank);
    s += &format!("  generators          {}\n", names.join(" "));
    s += &format!("  relations           {}\n", if rels.is_empty() { "none".into() } else { rels.join(", ") });
    s += &format!("  order type          {}\n", pr.order_type);
    s += &format!("  exponent            p^{}\n", pr.exponent);
    s += &format!("  abelianisation      {}\n", render_partition(&pr.abelian_invariants));
    s += &format!("  centre              p^{}\n", pr.centre_order);
    s += &format!("  derived subgroup    p^{}\n", pr.derived_order);
    s += &format!("  frattini quotient   rank {}\n", pr.frattini_quotient_rank);
    s += &format!("  lower central       {}\n", series(&pr.lcs_orders));
    s += &format!("  upper central       {}\n", ascending(&pr.ucs_orders));
    s += &format!("  nilpotency class    {}\n", pr.nilpotency_class);
    s += &format!("  conjugacy classes   {}\n", classes_text(pr));
    s
}

fn inspect_machine(e: &CatalogEntry, pr: &InvariantProfile) -> String {
    let list = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
    let classes = pr
        .class_size_multiset
        .as_ref()
        .map(|m| m.iter().map(|(s, c)| format!("{s}:{c}")).collect::<Vec<_>>().join(","))
        .unwrap_or_default();
    format!(
        "profile p={} index={} family={} label={:?} order_type={} exponent={} abelian={} centre={} derived={} \
         frattini_rank={} lcs={} ucs={} class={} classes={}\n",
        e.p,
        e.index,
        e.family,
        e.label,
        list(&pr.order_type.w),
        pr.exponent,
        list(&pr.abelian_invariants),
        pr.centre_order,
        pr.derived_order,
        pr.frattini_quotient_rank,
        list(&pr.lcs_orders),
        list(&pr.ucs_orders),
        pr.nilpotency_class,
        classes
    )
}

/// Convenience for the binary: reads the process arguments.
pub fn main_with_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
