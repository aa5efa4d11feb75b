mod artifact;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use artifact::{canonical, manifest_path, sha256_hex, Cache, CacheKey, InputDigest, RunManifest};
use tensorbound::bounds::{
    bound_corners, bound_measures, bound_removeanx, bound_removeanx_inner, cw_itilde_lower,
    cw_pipeline, cw_value_f, detect_corners, group_exponent, lp_balanced_distribution,
    omega_lower_from_itilde, BalancedOutcome, BoundReport,
};
use tensorbound::catalog::{self, CwPerms, Named};
use tensorbound::degeneration::{apply_monomial_map, verify_monomial_degeneration, MonomialMap};
use tensorbound::group::{builtin_groups, Group, MAX_BUILTIN_ORDER};
use tensorbound::interval::Interval;
use tensorbound::io::{
    self as tio, parse_rational, tensor_from_any, tensor_to_json, tensor_to_text,
};
use tensorbound::reproduce::{reproduce, CheckStatus, TARGETS};
use tensorbound::search::{
    exact_independence, extract_sumfree, monomial_embedding_search, subtensor_embedding_search,
    sumfree_search, EmbeddingOutcome, MonomialOutcome, SearchOptions, DEFAULT_NODE_BUDGET,
};
use tensorbound::{Error, Partition, Tensor};

const OK: i32 = 0;
const USAGE: i32 = 1;
const FAILED: i32 = 2;
const INCONCLUSIVE: i32 = 3;

/// Exact toolkit for trilinear tensors: catalog, monomial degenerations,
/// independence search and certified bounds.
#[derive(Parser, Debug)]
#[command(name = "tensorbound", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Interval precision in bits.
    #[arg(long, global = true, default_value_t = 128, value_parser = clap::value_parser!(u32).range(16..=4096))]
    precision: u32,
    /// Node budget for exhaustive searches.
    #[arg(long, global = true, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    /// Worker threads for searches (results do not depend on it).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Write the JSON result here (and a manifest next to it) instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Result cache directory [default: $TENSORBOUND_CACHE, else no cache].
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Ignore the result cache.
    #[arg(long, global = true)]
    no_cache: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Named tensor families and builtin groups.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// Monomial degenerations.
    #[command(subcommand)]
    Degen(DegenCmd),
    /// Exhaustive searches.
    #[command(subcommand)]
    Search(SearchCmd),
    /// Certified bounds.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// Run a named reproduction and compare with reference values.
    Reproduce {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(TARGETS))]
        target: String,
    },
    /// Convert a tensor between JSON and the plain-text listing.
    Convert {
        input: PathBuf,
        output: PathBuf,
        /// Output format [default: from the output extension, `.json` or text].
        #[arg(long, value_enum)]
        to: Option<Format>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum CatalogCmd {
    /// List the named tensors and builtin groups.
    List,
    /// Emit a named tensor as JSON, e.g. `emit cw 2` or `emit group Q8`.
    Emit { name: String, params: Vec<String> },
    /// Emit a group multiplication table as JSON.
    Group { name: String },
}

#[derive(Subcommand, Debug)]
enum DegenCmd {
    /// Check that a map degenerates the source to exactly the claimed tensor.
    Verify {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        claimed: PathBuf,
    },
    /// Apply a map: keep the zero-sum terms.
    Apply {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        map: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum SearchCmd {
    /// Exact independence number of a tensor or one of its powers.
    Independence {
        tensor: PathBuf,
        #[arg(long, default_value_t = 1)]
        power: usize,
    },
    /// Look for `a` inside `b` as a sub-tensor, or as a monomial degeneration.
    Embed {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        monomial: bool,
        /// Group whose tensor is `b`, used to fix the symmetry (name or JSON file).
        #[arg(long)]
        group: Option<String>,
    },
    /// Largest tri-colored sum-free set in G^n.
    Sumfree {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 1)]
        power: usize,
    },
}

#[derive(Subcommand, Debug)]
enum BoundCmd {
    /// Upper bound after removing one x-variable: `--q Q --c C`, or `--inner --q Q` for CW_Q.
    Removeanx {
        #[arg(long)]
        q: usize,
        /// Upper bound on Ĩ of the remainder, as a decimal.
        #[arg(long, required_unless_present = "inner")]
        c: Option<String>,
        #[arg(long)]
        inner: bool,
    },
    /// Sum of cube roots of part measures.
    Measures {
        tensor: PathBuf,
        /// Use the three-part CW partition instead of the trivial one.
        #[arg(long)]
        cw: bool,
    },
    /// Corner bound; the tensor must have corner terms.
    Corners { tensor: PathBuf },
    /// Balanced-distribution LP at slack ε.
    Lp {
        tensor: PathBuf,
        #[arg(long, default_value = "0")]
        eps: String,
    },
    /// f(q) and the resulting Ĩ(CW_q) lower bound, or c_|G| with `--group`.
    Cwilb {
        #[arg(long, required_unless_present = "group")]
        q: Option<usize>,
        #[arg(long)]
        group: Option<String>,
    },
    /// ω_g lower bound from r and an upper bound U on Ĩ.
    Omega {
        #[arg(long)]
        r: String,
        #[arg(long)]
        u: String,
    },
    /// Corner, measures and x-removal paths on generalized CW_q.
    Pipeline {
        #[arg(long)]
        q: usize,
        /// 1-based images of σ.
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        sigma: Option<Vec<usize>>,
    },
}

#[derive(Debug)]
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::NotSubtensor(_) | Error::InvalidWitness(_) | Error::HypothesisViolated(_) => {
                FAILED
            }
            Error::Undecided(_) | Error::BudgetExceeded { .. } => INCONCLUSIVE,
            _ => USAGE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

enum Payload {
    Json(Value),
    /// Already canonical text, written as is.
    Raw(String),
}

impl Payload {
    fn bytes(&self) -> Vec<u8> {
        match self {
            Payload::Json(v) => canonical(v),
            Payload::Raw(s) => s.clone().into_bytes(),
        }
    }
}

struct Outcome {
    exit: i32,
    payload: Option<Payload>,
    summary: String,
}

impl Outcome {
    fn json(exit: i32, v: impl Serialize, summary: impl Into<String>) -> Self {
        Outcome {
            exit,
            payload: Some(Payload::Json(
                serde_json::to_value(v).expect("serializable"),
            )),
            summary: summary.into(),
        }
    }
}

struct Runner {
    global: Global,
    inputs: Vec<InputDigest>,
    cache: Cache,
    cache_hit: bool,
}

impl Runner {
    fn read(&mut self, path: &Path) -> CliResult<String> {
        let bytes = fs::read(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        String::from_utf8(bytes)
            .map_err(|_| CliError::usage(format!("{} is not UTF-8", path.display())))
    }

    fn tensor(&mut self, path: &Path) -> CliResult<Tensor> {
        let text = self.read(path)?;
        tensor_from_any(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }

    fn group(&mut self, spec: &str) -> CliResult<Group> {
        let path = Path::new(spec);
        if path.is_file() {
            let text = self.read(path)?;
            return Ok(tio::from_json::<Group>(&text)?);
        }
        Ok(Group::by_name(spec)?)
    }

    fn opts(&self) -> SearchOptions {
        SearchOptions {
            budget: self.global.budget,
            jobs: self.global.jobs,
        }
    }

    fn interval(&self, s: &str) -> CliResult<Interval> {
        let r = parse_rational(s)
            .ok()
            .map(|r| Interval::from_rational(self.global.precision, &r))
            .or_else(|| Interval::from_decimal(self.global.precision, s).ok());
        r.ok_or_else(|| CliError::usage(format!("not a number: `{s}`")))
    }

    /// Runs `f` unless the cache already holds the result for `parts` and the
    /// inputs read so far. Worker count and output path are not part of the key.
    fn cached(
        &mut self,
        parts: &[String],
        f: impl FnOnce(&mut Self) -> CliResult<Outcome>,
    ) -> CliResult<Outcome> {
        let key = CacheKey::new(parts, &self.inputs);
        if let Some((exit, summary, v)) = self.cache.get(&key) {
            self.cache_hit = true;
            return Ok(Outcome {
                exit,
                summary,
                payload: Some(Payload::Json(v)),
            });
        }
        let out = f(self)?;
        if let Some(Payload::Json(v)) = &out.payload {
            self.cache.put(&key, out.exit, &out.summary, v);
        }
        Ok(out)
    }

    fn search_key(&self, name: &str, extra: &[String]) -> Vec<String> {
        let mut v = vec![name.to_string(), format!("budget={}", self.global.budget)];
        v.extend_from_slice(extra);
        v
    }
}

fn bound_outcome(report: BoundReport) -> Outcome {
    let undecided: Vec<&String> = report
        .claims
        .iter()
        .filter(|(_, v)| v.is_none())
        .map(|(k, _)| k)
        .collect();
    let exit = if undecided.is_empty() {
        OK
    } else {
        INCONCLUSIVE
    };
    let value = report.value.to_json();
    let mut summary = format!("{:?} bound: [{}, {}]", report.method, value.lo, value.hi);
    for (k, v) in &report.claims {
        summary.push_str(&format!(
            "\n  {k}: {}",
            v.map_or("undecided".to_string(), |b| b.to_string())
        ));
    }
    Outcome {
        exit,
        payload: Some(Payload::Json(report.to_json())),
        summary,
    }
}

fn catalog_cmd(r: &mut Runner, cmd: &CatalogCmd) -> CliResult<Outcome> {
    match cmd {
        CatalogCmd::List => {
            let mut s = String::from("tensors:\n");
            let mut names = Vec::new();
            for (name, params) in catalog::NAMES {
                s.push_str(&format!("  {name} {params}\n"));
                names.push(json!({ "name": name, "params": params }));
            }
            s.push_str("groups:\n");
            let mut groups = Vec::new();
            for g in builtin_groups(MAX_BUILTIN_ORDER)? {
                s.push_str(&format!(
                    "  {:<8} order {:>2}{}\n",
                    g.name(),
                    g.order(),
                    if g.is_abelian() { "" } else { "  nonabelian" }
                ));
                groups.push(
                    json!({ "name": g.name(), "order": g.order(), "abelian": g.is_abelian() }),
                );
            }
            let payload = r
                .global
                .out
                .is_some()
                .then(|| Payload::Json(json!({ "tensors": names, "groups": groups })));
            Ok(Outcome {
                exit: OK,
                payload,
                summary: s.trim_end().to_string(),
            })
        }
        CatalogCmd::Emit { name, params } => {
            let entry = Named::parse(name, params)?.build()?;
            let rank = entry
                .known_asymptotic_rank
                .as_ref()
                .map_or("unknown".to_string(), tio::rational_to_string);
            Ok(Outcome {
                exit: OK,
                summary: format!(
                    "{}: dims {:?}, {} terms, asymptotic rank {rank}",
                    entry.name,
                    entry.tensor.dims(),
                    entry.tensor.len()
                ),
                payload: Some(Payload::Raw(tensor_to_json(&entry.tensor))),
            })
        }
        CatalogCmd::Group { name } => {
            let g = r.group(name)?;
            Ok(Outcome::json(
                OK,
                &g,
                format!("{}: order {}", g.name(), g.order()),
            ))
        }
    }
}

fn degen_cmd(r: &mut Runner, cmd: &DegenCmd) -> CliResult<Outcome> {
    let read_map = |r: &mut Runner, p: &Path| -> CliResult<MonomialMap> {
        let text = r.read(p)?;
        Ok(tio::from_json::<MonomialMap>(&text)?)
    };
    match cmd {
        DegenCmd::Verify {
            source,
            map,
            claimed,
        } => {
            let s = r.tensor(source)?;
            let m = read_map(r, map)?;
            let c = r.tensor(claimed)?;
            let rep = match verify_monomial_degeneration(&s, &m, &c) {
                Ok(rep) => rep,
                Err(e @ Error::NotSubtensor(_)) => {
                    return Ok(Outcome::json(
                        FAILED,
                        json!({ "valid": false, "error": e.to_string() }),
                        format!("invalid: {e}"),
                    ))
                }
                Err(e) => return Err(e.into()),
            };
            let mut summary = if rep.valid {
                "valid".to_string()
            } else {
                format!("invalid: {} violation(s)", rep.violations.len())
            };
            for v in &rep.violations {
                summary.push_str(&format!("\n  {} sum {} {:?}", v.triple, v.sum, v.kind));
            }
            let exit = if rep.valid { OK } else { FAILED };
            // Violations go to standard output even when the JSON goes to a file.
            Ok(Outcome::json(
                exit,
                json!({ "valid": rep.valid, "violations": rep.violations }),
                summary,
            ))
        }
        DegenCmd::Apply { source, map } => {
            let s = r.tensor(source)?;
            let m = read_map(r, map)?;
            let image = apply_monomial_map(&s, &m)?;
            Ok(Outcome {
                exit: OK,
                summary: format!("{} of {} terms kept", image.len(), s.len()),
                payload: Some(Payload::Raw(tensor_to_json(&image))),
            })
        }
    }
}

fn search_cmd(r: &mut Runner, cmd: &SearchCmd) -> CliResult<Outcome> {
    match cmd {
        SearchCmd::Independence { tensor, power } => {
            let t = r.tensor(tensor)?;
            let key = r.search_key("search-independence", &[format!("power={power}")]);
            r.cached(&key, |r| {
                if *power == 0 {
                    return Err(CliError::usage("power must be at least 1"));
                }
                let p = t.power(*power, tensorbound::tensor::DEFAULT_SUPPORT_BUDGET)?;
                let res = exact_independence(&p, r.opts());
                let exit = if res.exact { OK } else { INCONCLUSIVE };
                let summary = format!(
                    "I = {}{} ({} nodes)",
                    res.witness.size,
                    if res.exact {
                        ""
                    } else {
                        " (lower bound, budget exhausted)"
                    },
                    res.nodes
                );
                Ok(Outcome::json(exit, &res, summary))
            })
        }
        SearchCmd::Embed {
            a,
            b,
            monomial,
            group,
        } => {
            let ta = r.tensor(a)?;
            let tb = r.tensor(b)?;
            let g = group.as_deref().map(|s| r.group(s)).transpose()?;
            let key = r.search_key(
                "search-embed",
                &[
                    format!("monomial={monomial}"),
                    format!(
                        "group={}",
                        g.as_ref()
                            .map_or(String::new(), |g| serde_json::to_string(g).unwrap())
                    ),
                ],
            );
            r.cached(&key, |r| {
                if *monomial {
                    let res = monomial_embedding_search(&ta, &tb, r.opts(), g.as_ref())?;
                    let (exit, s) = match &res.outcome {
                        MonomialOutcome::Found { .. } => {
                            (OK, "found a monomial degeneration".to_string())
                        }
                        MonomialOutcome::NotFound { embeddings } => {
                            (OK, format!("none among {embeddings} sub-tensor embeddings"))
                        }
                        MonomialOutcome::Inconclusive { .. } => {
                            (INCONCLUSIVE, "budget exhausted".to_string())
                        }
                    };
                    Ok(Outcome::json(exit, &res, s))
                } else {
                    let res = subtensor_embedding_search(&ta, &tb, r.opts(), g.as_ref())?;
                    let (exit, s) = match &res.outcome {
                        EmbeddingOutcome::Found { .. } => (OK, "found"),
                        EmbeddingOutcome::NotEmbeddable => (OK, "not embeddable"),
                        EmbeddingOutcome::Inconclusive => (INCONCLUSIVE, "budget exhausted"),
                    };
                    Ok(Outcome::json(
                        exit,
                        &res,
                        format!("{s} ({} nodes)", res.nodes),
                    ))
                }
            })
        }
        SearchCmd::Sumfree { group, power } => {
            let g = r.group(group)?;
            let key = r.search_key(
                "search-sumfree",
                &[serde_json::to_string(&g).unwrap(), format!("power={power}")],
            );
            r.cached(&key, |r| {
                let res = sumfree_search(&g, *power, r.opts())?;
                let set = extract_sumfree(&g, *power, &res.witness)?;
                let exit = if res.exact { OK } else { INCONCLUSIVE };
                let summary = format!(
                    "sum-free set of size {}{} in {}^{power}",
                    set.len(),
                    if res.exact { " (maximum)" } else { " (budget exhausted)" },
                    g.name()
                );
                Ok(Outcome::json(exit, json!({ "set": set, "exact": res.exact, "nodes": res.nodes, "witness": res.witness }), summary))
            })
        }
    }
}

fn bound_cmd(r: &mut Runner, cmd: &BoundCmd) -> CliResult<Outcome> {
    let prec = r.global.precision;
    match cmd {
        BoundCmd::Removeanx { q, c, inner } => {
            if *inner {
                return Ok(bound_outcome(bound_removeanx_inner(*q, prec)?));
            }
            let c = r.interval(c.as_deref().unwrap_or_default())?;
            Ok(bound_outcome(bound_removeanx(*q, &c)?))
        }
        BoundCmd::Measures { tensor, cw } => {
            let t = r.tensor(tensor)?;
            let p = if *cw {
                catalog::cw_three_partition(&t)?
            } else {
                Partition::trivial(&t)
            };
            Ok(bound_outcome(bound_measures(&t, &p, prec)?))
        }
        BoundCmd::Corners { tensor } => {
            let t = r.tensor(tensor)?;
            let corners = detect_corners(&t).ok_or_else(|| CliError {
                code: FAILED,
                message: "no corner terms: the corner bound does not apply".into(),
            })?;
            if !t.is_square() {
                return Err(CliError::usage("the corner bound needs a square tensor"));
            }
            let rep = bound_corners(t.dims()[0], prec)?.param("corners", &corners);
            Ok(bound_outcome(rep))
        }
        BoundCmd::Lp { tensor, eps } => {
            let t = r.tensor(tensor)?;
            let eps = parse_rational(eps).map_err(CliError::usage)?;
            let res = lp_balanced_distribution(&t, &eps)?;
            let s = match &res {
                BalancedOutcome::Feasible { uniform: true, .. } => {
                    "feasible (uniform distribution)"
                }
                BalancedOutcome::Feasible { .. } => "feasible",
                BalancedOutcome::Infeasible { .. } => "infeasible (Farkas certificate verified)",
            };
            Ok(Outcome::json(OK, &res, s))
        }
        BoundCmd::Cwilb { q, group } => {
            if let Some(spec) = group {
                let g = r.group(spec)?;
                let res = group_exponent(&g, 2, r.opts(), prec)?;
                let summary = format!(
                    "c_{} for {}: above 2/3 {}{}",
                    g.order(),
                    g.name(),
                    res.above_two_thirds,
                    if res.cited { " (cited result)" } else { "" }
                );
                return Ok(Outcome::json(OK, &res, summary));
            }
            let q = q.expect("clap requires q without group");
            let f = cw_value_f(q, prec)?;
            let lower = cw_itilde_lower(q, prec)?;
            let exit = if f
                .claims
                .values()
                .chain(lower.claims.values())
                .any(Option::is_none)
            {
                INCONCLUSIVE
            } else {
                OK
            };
            let summary = format!("f({q}) = {}\nĨ(CW_{q}) ≥ {}", f.value, lower.value);
            Ok(Outcome::json(
                exit,
                json!({ "f": f.to_json(), "itilde_lower": lower.to_json() }),
                summary,
            ))
        }
        BoundCmd::Omega { r: rr, u } => {
            let rr = r.interval(rr)?;
            let u = r.interval(u)?;
            Ok(bound_outcome(omega_lower_from_itilde(&rr, &u)?))
        }
        BoundCmd::Pipeline { q, sigma } => {
            let perms = match sigma {
                Some(s) => CwPerms::with_sigma(s.clone()),
                None => CwPerms::identity(*q),
            };
            perms.validate(*q)?;
            let rep = cw_pipeline(*q, &perms, prec)?;
            let mut summary = String::new();
            for p in &rep.paths {
                summary.push_str(&format!("{:<10} {}\n", p.name, p.status));
            }
            let exit = match &rep.best {
                Some(b) => {
                    summary.push_str(&format!("best ω_g lower bound: {}", b.value));
                    OK
                }
                None if rep.paths.iter().any(|p| p.status == "undecided") => INCONCLUSIVE,
                None => {
                    summary.push_str("no path certifies ω_g > 2");
                    OK
                }
            };
            Ok(Outcome::json(exit, &rep, summary.trim_end()))
        }
    }
}

fn reproduce_cmd(r: &mut Runner, target: &str) -> CliResult<Outcome> {
    let key = r.search_key(
        "reproduce",
        &[
            target.to_string(),
            format!("precision={}", r.global.precision),
        ],
    );
    r.cached(&key, |r| {
        let rep = reproduce(target, r.global.precision, r.opts())?;
        let exit = match rep.status {
            CheckStatus::Match => OK,
            CheckStatus::Mismatch => FAILED,
            CheckStatus::Inconclusive => INCONCLUSIVE,
        };
        Ok(Outcome::json(exit, &rep, rep.summary().trim_end()))
    })
}

fn convert_cmd(
    r: &mut Runner,
    input: &Path,
    output: &Path,
    to: Option<Format>,
) -> CliResult<Outcome> {
    let t = r.tensor(input)?;
    let format = to.unwrap_or(if output.extension().is_some_and(|e| e == "json") {
        Format::Json
    } else {
        Format::Text
    });
    let text = match format {
        Format::Json => tensor_to_json(&t),
        Format::Text => tensor_to_text(&t),
    };
    fs::write(output, &text)
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", output.display())))?;
    Ok(Outcome {
        exit: OK,
        payload: None,
        summary: format!("wrote {} terms to {}", t.len(), output.display()),
    })
}

fn run(cli: &Cli, argv: Vec<String>) -> CliResult<i32> {
    let start = Instant::now();
    let cache_dir = if cli.global.no_cache {
        None
    } else {
        cli.global
            .cache_dir
            .clone()
            .or_else(|| std::env::var_os("TENSORBOUND_CACHE").map(PathBuf::from))
    };
    let mut r = Runner {
        global: cli.global.clone(),
        inputs: Vec::new(),
        cache: Cache::new(cache_dir),
        cache_hit: false,
    };
    let outcome = match &cli.command {
        Command::Catalog(c) => catalog_cmd(&mut r, c)?,
        Command::Degen(c) => degen_cmd(&mut r, c)?,
        Command::Search(c) => search_cmd(&mut r, c)?,
        Command::Bound(c) => bound_cmd(&mut r, c)?,
        Command::Reproduce { target } => reproduce_cmd(&mut r, target)?,
        Command::Convert { input, output, to } => convert_cmd(&mut r, input, output, *to)?,
    };
    let mut outcome = outcome;
    let mut nodes = 0;
    if let Some(Payload::Json(v)) = &mut outcome.payload {
        nodes = take_nodes(v);
    }
    match (&outcome.payload, &cli.global.out) {
        (Some(p), Some(out)) => {
            let bytes = p.bytes();
            fs::write(out, &bytes)
                .map_err(|e| CliError::usage(format!("cannot write {}: {e}", out.display())))?;
            let manifest = RunManifest {
                command_line: argv,
                config: json!({
                    "precision": cli.global.precision,
                    "budget": cli.global.budget,
                    "jobs": cli.global.jobs,
                }),
                version: artifact::VERSION.to_string(),
                inputs: r.inputs.clone(),
                wall_time_ms: start.elapsed().as_millis(),
                result_sha256: sha256_hex(&bytes),
                cache_hit: r.cache_hit,
                search_nodes: nodes,
            };
            let m = serde_json::to_value(&manifest).expect("serializable");
            fs::write(manifest_path(out), canonical(&m))
                .map_err(|e| CliError::usage(format!("cannot write manifest: {e}")))?;
            say(&outcome.summary);
        }
        (Some(p), None) => {
            use std::io::Write as _;
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(&p.bytes());
            if outcome.exit == FAILED && !outcome.summary.is_empty() {
                let _ = writeln!(stdout, "{}", outcome.summary);
            }
        }
        (None, _) => say(&outcome.summary),
    }
    Ok(outcome.exit)
}

/// Removes node counts from a result, returning their total. They depend on
/// the worker count, and results must not.
fn take_nodes(v: &mut Value) -> u64 {
    match v {
        Value::Object(m) => {
            let own = m.remove("nodes").and_then(|n| n.as_u64()).unwrap_or(0);
            own + m.values_mut().map(take_nodes).sum::<u64>()
        }
        Value::Array(a) => a.iter_mut().map(take_nodes).sum(),
        _ => 0,
    }
}

/// Writes a line to standard output; a closed pipe is not an error.
fn say(line: &str) {
    use std::io::Write as _;
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                USAGE as u8
            } else {
                OK as u8
            });
        }
    };
    match run(&cli, argv) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
