//! The ordered catalog of groups of order `p^6` and its verification.
//!
//! Entries are numbered from 1 in family order, then file order of the
//! family blocks, then parameter order (later parameters vary fastest).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use rayon::prelude::*;
use thiserror::Error;

use crate::dsl::{compile, parse, CompileError, EvalError, FamilySpec, ParamBinding, ParseError};
use crate::invariants::{Analysis, InvariantProfile, ProfileOptions};
use crate::numtheory::{formula_terms, group_count, is_prime, NumError, PrimeContext};
use crate::pcgroup::{PcError, PcGroup, DEFAULT_BUDGET};

pub use crate::dsl::expand;

/// Families whose presentations the data does not claim to be right at p = 5.
pub const P5_UNRELIABLE: std::ops::RangeInclusive<u32> = 35..=39;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path}:\n{error}")]
    Parse { path: PathBuf, error: ParseError },
    #[error("no .p6 files in {0}")]
    Empty(PathBuf),
    #[error(transparent)]
    Prime(#[from] NumError),
    #[error("p = 5 is only supported with an explicit override")]
    P5NotAllowed,
    #[error("{label}: cannot expand parameters: {error}")]
    Expand { label: String, error: EvalError },
    #[error("{label}: {error}")]
    Compile { label: String, error: CompileError },
    #[error("{label}: {error}")]
    Group { label: String, error: PcError },
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

/// Reads every `*.p6` file in `dir` (sorted by name) and returns the
/// families sorted by family number; blocks of one family keep file order.
pub fn load_specs(dir: &Path) -> Result<Vec<FamilySpec>, CatalogError> {
    let io = |e: std::io::Error| CatalogError::Io { path: dir.to_path_buf(), message: e.to_string() };
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.extension().is_some_and(|x| x == "p6") {
            files.push(path);
        }
    }
    if files.is_empty() {
        return Err(CatalogError::Empty(dir.to_path_buf()));
    }
    files.sort();
    let mut specs = Vec::new();
    for path in files {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CatalogError::Io { path: path.clone(), message: e.to_string() })?;
        let file = parse(&text).map_err(|error| CatalogError::Parse { path: path.clone(), error })?;
        specs.extend(file.families);
    }
    specs.sort_by_key(|s| s.family);
    Ok(specs)
}

/// Validates `p` for catalog use and builds its context.
pub fn check_prime(p: u64, allow_p5: bool) -> Result<PrimeContext, CatalogError> {
    if !is_prime(p) {
        return Err(NumError::InvalidArgument(format!("{p} is not prime")).into());
    }
    if p == 5 && !allow_p5 {
        return Err(CatalogError::P5NotAllowed);
    }
    if p < 5 {
        return Err(NumError::UnsupportedPrime(p).into());
    }
    Ok(PrimeContext::new(p)?)
}

/// One catalog slot before compilation.
#[derive(Debug, Clone)]
pub struct PlannedEntry {
    pub index: usize,
    /// Position in the spec list.
    pub spec: usize,
    pub binding: ParamBinding,
    pub label: String,
}

fn entry_label(spec: &FamilySpec, binding: &ParamBinding) -> String {
    let params = binding.describe(spec);
    if params.is_empty() {
        spec.label_text()
    } else {
        format!("{} {params}", spec.label_text())
    }
}

/// Expands every family in order and numbers the results.
pub fn plan(specs: &[FamilySpec], ctx: &PrimeContext) -> Result<Vec<PlannedEntry>, CatalogError> {
    let mut out = Vec::new();
    for (k, spec) in specs.iter().enumerate() {
        let bindings =
            expand(spec, ctx).map_err(|error| CatalogError::Expand { label: spec.label_text(), error })?;
        for binding in bindings {
            out.push(PlannedEntry { index: out.len() + 1, spec: k, label: entry_label(spec, &binding), binding });
        }
    }
    Ok(out)
}

pub struct CatalogEntry {
    pub p: u32,
    pub index: usize,
    pub family: u32,
    pub label: String,
    pub binding: ParamBinding,
    pub rank: u32,
    pub betas: u8,
    pub group: PcGroup,
    budget: u64,
    profile: OnceLock<InvariantProfile>,
}

impl std::fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("p", &self.p)
            .field("index", &self.index)
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

impl CatalogEntry {
    pub fn id(&self) -> (u32, usize) {
        (self.p, self.index)
    }

    /// Computed on first use, conjugacy classes included.
    pub fn profile(&self) -> Result<&InvariantProfile, PcError> {
        if let Some(pr) = self.profile.get() {
            return Ok(pr);
        }
        let pr = Analysis::new(&self.group, self.budget)?.profile(ProfileOptions::default());
        Ok(self.profile.get_or_init(|| pr))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    pub allow_p5: bool,
    pub budget: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { allow_p5: false, budget: DEFAULT_BUDGET }
    }
}

/// Compiles one planned entry and checks its consistency.
pub fn build_entry(specs: &[FamilySpec], e: &PlannedEntry, ctx: &PrimeContext, budget: u64) -> Result<CatalogEntry, CatalogError> {
    let spec = &specs[e.spec];
    let pres = compile(spec, &e.binding, ctx).map_err(|error| CatalogError::Compile { label: e.label.clone(), error })?;
    let group = PcGroup::new(pres).map_err(|error| CatalogError::Group { label: e.label.clone(), error })?;
    Ok(CatalogEntry {
        p: ctx.p(),
        index: e.index,
        family: spec.family,
        label: e.label.clone(),
        binding: e.binding.clone(),
        rank: spec.rank,
        betas: spec.betas,
        group,
        budget,
        profile: OnceLock::new(),
    })
}

/// Compiles and checks entries one at a time, so only the entries the
/// caller keeps stay in memory.
pub fn stream_catalog<'a>(
    p: u64,
    specs: &'a [FamilySpec],
    opts: BuildOptions,
) -> Result<impl Iterator<Item = Result<CatalogEntry, CatalogError>> + 'a, CatalogError> {
    let ctx = check_prime(p, opts.allow_p5)?;
    let planned = plan(specs, &ctx)?;
    Ok(planned.into_iter().map(move |e| build_entry(specs, &e, &ctx, opts.budget)))
}

/// The full catalog; stops at the first entry that fails to compile or is
/// inconsistent.
pub fn build_catalog(p: u64, specs: &[FamilySpec], opts: BuildOptions) -> Result<Vec<CatalogEntry>, CatalogError> {
    stream_catalog(p, specs, opts)?.collect()
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// `None` uses the available parallelism.
    pub workers: Option<usize>,
    /// `None` computes profiles at p = 7 only.
    pub profiles: Option<bool>,
    pub allow_p5: bool,
    pub budget: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { workers: None, profiles: None, allow_p5: false, budget: DEFAULT_BUDGET }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryFailure {
    pub index: usize,
    pub label: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub p: u32,
    pub expected_count: u64,
    pub actual_count: usize,
    pub consistency_failures: Vec<EntryFailure>,
    /// Rank-6 entries where `a1` is not central.
    pub centrality_failures: Vec<EntryFailure>,
    /// Families 2 to 10 whose centre is not generated by the `b`s.
    pub centre_failures: Vec<EntryFailure>,
    /// Entries whose centre or derived order differs from the first entry
    /// of their family.
    pub isoclinism_failures: Vec<EntryFailure>,
    /// Class equation, centre size against classes of size 1, and the
    /// order-type partition sums.
    pub invariant_failures: Vec<EntryFailure>,
    pub family_counts: BTreeMap<u32, usize>,
    pub profiles_computed: bool,
    pub profile_collisions: Vec<Vec<usize>>,
    pub labels: Vec<String>,
    pub warnings: Vec<String>,
}

impl VerificationReport {
    pub fn consistent_count(&self) -> usize {
        self.actual_count - self.consistency_failures.len()
    }

    /// Entries in all failure lists together.
    pub fn failure_count(&self) -> usize {
        self.failure_lists().iter().map(|(_, l)| l.len()).sum()
    }

    pub fn passed(&self) -> bool {
        self.expected_count == self.actual_count as u64
            && self.consistency_failures.is_empty()
            && self.centrality_failures.is_empty()
            && self.centre_failures.is_empty()
            && self.isoclinism_failures.is_empty()
            && self.invariant_failures.is_empty()
    }

    fn failure_lists(&self) -> [(&'static str, &Vec<EntryFailure>); 5] {
        [
            ("consistency", &self.consistency_failures),
            ("centrality", &self.centrality_failures),
            ("centre", &self.centre_failures),
            ("isoclinism", &self.isoclinism_failures),
            ("invariant", &self.invariant_failures),
        ]
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "p = {}", self.p).unwrap();
        writeln!(s, "expected {} groups, catalog has {}", self.expected_count, self.actual_count).unwrap();
        writeln!(s, "{}/{} consistent", self.consistent_count(), self.actual_count).unwrap();
        for w in &self.warnings {
            writeln!(s, "warning: {w}").unwrap();
        }
        for (kind, list) in self.failure_lists() {
            writeln!(s, "{kind} failures: {}", list.len()).unwrap();
            for f in list {
                writeln!(s, "  #{} {}: {}", f.index, f.label, f.detail).unwrap();
            }
        }
        let counts: Vec<String> = self.family_counts.iter().map(|(f, c)| format!("{f}:{c}")).collect();
        writeln!(s, "family counts: {}", counts.join(" ")).unwrap();
        if self.profiles_computed {
            let covered: usize = self.profile_collisions.iter().map(Vec::len).sum();
            writeln!(
                s,
                "profile collisions: {} sets covering {} entries (informational)",
                self.profile_collisions.len(),
                covered
            )
            .unwrap();
            for set in &self.profile_collisions {
                let names: Vec<String> = set.iter().map(|&i| format!("#{i} {}", self.labels[i - 1])).collect();
                writeln!(s, "  {}", names.join(", ")).unwrap();
            }
        } else {
            writeln!(s, "profiles not computed").unwrap();
        }
        writeln!(s, "result: {}", if self.passed() { "PASS" } else { "FAIL" }).unwrap();
        s
    }

    /// One `key=value` record per line.
    pub fn to_machine(&self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "report p={} expected={} actual={} consistent={}",
            self.p,
            self.expected_count,
            self.actual_count,
            self.consistent_count()
        )
        .unwrap();
        for w in &self.warnings {
            writeln!(s, "warning message={w:?}").unwrap();
        }
        for (kind, list) in self.failure_lists() {
            for f in list {
                writeln!(s, "failure kind={kind} index={} label={:?} detail={:?}", f.index, f.label, f.detail).unwrap();
            }
        }
        for (f, c) in &self.family_counts {
            writeln!(s, "family id={f} count={c}").unwrap();
        }
        for set in &self.profile_collisions {
            let ids: Vec<String> = set.iter().map(usize::to_string).collect();
            writeln!(s, "collision ids={}", ids.join(",")).unwrap();
        }
        writeln!(s, "result status={}", if self.passed() { "pass" } else { "fail" }).unwrap();
        s
    }
}

// What one worker learns about one entry.
struct EntryResult {
    family: u32,
    consistency: Option<String>,
    centrality: Option<String>,
    centre: Option<String>,
    invariants: Option<String>,
    profile: Option<InvariantProfile>,
}

fn check_entry(specs: &[FamilySpec], e: &PlannedEntry, ctx: &PrimeContext, profiles: bool, budget: u64) -> EntryResult {
    let spec = &specs[e.spec];
    let mut r = EntryResult {
        family: spec.family,
        consistency: None,
        centrality: None,
        centre: None,
        invariants: None,
        profile: None,
    };
    let pres = match compile(spec, &e.binding, ctx) {
        Ok(x) => x,
        Err(err) => {
            r.consistency = Some(err.to_string());
            return r;
        }
    };
    let g = match PcGroup::new(pres) {
        Ok(g) => g,
        Err(err) => {
            r.consistency = Some(err.to_string());
            return r;
        }
    };
    if g.order_log() != 6 {
        r.consistency = Some(format!("order p^{}", g.order_log()));
        return r;
    }
    let commutes_with_all = |k: usize| {
        (1..=g.n()).all(|j| g.commutator(&g.generator(k), &g.generator(j)).is_identity())
    };
    // rank-6 families have no b generators, so a1 keeps position 1
    if spec.rank == 6 && !commutes_with_all(1) {
        r.centrality = Some("a1 is not central".into());
    }
    let betas = spec.betas as usize;
    let beta_family = (2..=10).contains(&spec.family);
    if beta_family {
        if let Some(k) = (1..=betas).find(|&k| !commutes_with_all(k)) {
            r.centre = Some(format!("b{k} is not central"));
        }
    }
    if !profiles {
        return r;
    }
    let analysis = match Analysis::new(&g, budget) {
        Ok(a) => a,
        Err(err) => {
            r.invariants = Some(err.to_string());
            return r;
        }
    };
    let pr = analysis.profile(ProfileOptions::default());
    if beta_family && r.centre.is_none() && pr.centre_order as usize != betas {
        r.centre = Some(format!("centre has order p^{} but there are {betas} b generators", pr.centre_order));
    }
    let order = (ctx.p() as u64).pow(6);
    let mut problems = Vec::new();
    if let Some(classes) = &pr.class_size_multiset {
        let sum: u64 = classes.iter().map(|(size, count)| size * count).sum();
        if sum != order {
            problems.push(format!("class sizes sum to {sum}"));
        }
        let singletons = classes.get(&1).copied().unwrap_or(0);
        if singletons != (ctx.p() as u64).pow(pr.centre_order) {
            problems.push(format!("{singletons} central classes but |Z| = p^{}", pr.centre_order));
        }
    }
    let (w, m) = (&pr.order_type.w, &pr.order_type.m);
    if w.iter().sum::<u32>() != 6 || m.iter().sum::<u32>() != 6 {
        problems.push(format!("order type {} does not sum to 6", pr.order_type));
    }
    if !problems.is_empty() {
        r.invariants = Some(problems.join("; "));
    }
    r.profile = Some(pr);
    r
}

/// Report-mode verification: every failure becomes report data.
pub fn verify_catalog(p: u64, specs: &[FamilySpec], opts: VerifyOptions) -> Result<VerificationReport, CatalogError> {
    let ctx = check_prime(p, opts.allow_p5)?;
    let planned = plan(specs, &ctx)?;
    let profiles = opts.profiles.unwrap_or(p == 7);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = opts.workers {
        pool = pool.num_threads(w.max(1));
    }
    let pool = pool.build().map_err(|e| CatalogError::Pool(e.to_string()))?;
    let results: Vec<EntryResult> =
        pool.install(|| planned.par_iter().map(|e| check_entry(specs, e, &ctx, profiles, opts.budget)).collect());

    let expected_count = match group_count(p) {
        Ok(c) => c,
        Err(_) => formula_terms(p).total(),
    };
    let mut report = VerificationReport {
        p: ctx.p(),
        expected_count,
        actual_count: planned.len(),
        consistency_failures: Vec::new(),
        centrality_failures: Vec::new(),
        centre_failures: Vec::new(),
        isoclinism_failures: Vec::new(),
        invariant_failures: Vec::new(),
        family_counts: BTreeMap::new(),
        profiles_computed: profiles,
        profile_collisions: Vec::new(),
        labels: planned.iter().map(|e| e.label.clone()).collect(),
        warnings: Vec::new(),
    };
    if p == 5 {
        report.warnings.push(format!(
            "p = 5: presentations in families {} to {} are not guaranteed",
            P5_UNRELIABLE.start(),
            P5_UNRELIABLE.end()
        ));
    }
    let mut first_of_family: BTreeMap<u32, (usize, u32, u32)> = BTreeMap::new();
    let mut by_profile: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (e, r) in planned.iter().zip(results) {
        *report.family_counts.entry(r.family).or_insert(0) += 1;
        let fail = |detail: String| EntryFailure { index: e.index, label: e.label.clone(), detail };
        let pairs = [
            (r.consistency, &mut report.consistency_failures),
            (r.centrality, &mut report.centrality_failures),
            (r.centre, &mut report.centre_failures),
            (r.invariants, &mut report.invariant_failures),
        ];
        for (msg, list) in pairs {
            if let Some(m) = msg {
                list.push(fail(m));
            }
        }
        if let Some(pr) = r.profile {
            let (first, z, d) =
                *first_of_family.entry(r.family).or_insert((e.index, pr.centre_order, pr.derived_order));
            if (z, d) != (pr.centre_order, pr.derived_order) {
                report.isoclinism_failures.push(fail(format!(
                    "|Z| = p^{}, |G'| = p^{} but #{first} has p^{z}, p^{d}",
                    pr.centre_order, pr.derived_order
                )));
            }
            by_profile.entry(format!("{pr:?}")).or_default().push(e.index);
        }
    }
    report.profile_collisions = by_profile.into_values().filter(|v| v.len() > 1).collect();
    report.profile_collisions.sort();
    Ok(report)
}
