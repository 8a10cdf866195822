use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde_json::{json, Value};

use relhom::constructions::{self, walk_forest, DEFAULT_FOREST_CAP};
use relhom::dismantling::{decide_main, greedy_dismantle, random_dismantle, DismantleSequence};
use relhom::duality::{self, EnumerationOptions, ObstructionReport};
use relhom::gibbs::{self, Weights, DEFAULT_ASSIGNMENT_CAP};
use relhom::homgraph::{self, View, DEFAULT_VERTEX_CAP};
use relhom::homs::{self, render_map, HomSearch, Map, PartialMap, DEFAULT_HOM_CAP};
use relhom::mixing::{self, MixingQuery, SearchOptions};
use relhom::random::{random_hom, rng};
use relhom::suite::{self, Level};
use relhom::{fixtures, ElemId, Error, RelStructure, Result};

#[derive(Parser)]
#[command(name = "relhom", version, about = "Dismantling, reconfiguration, mixing, Gibbs and duality checks for finite relational structures")]
struct Cli {
    /// Print one JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every randomized choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Override the command's enumeration cap.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Worker threads for the parallel searches.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Include wall-clock timing in JSON output (otherwise `null`).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a derived structure and print it.
    #[command(subcommand)]
    Make(Make),
    /// Fold dominated elements until none is left outside J.
    Dismantle {
        file: String,
        #[arg(long = "J", value_name = "a,b,..")]
        j: Option<String>,
        /// Pick folds at random (seeded) instead of greedily.
        #[arg(long)]
        random: bool,
    },
    /// Run the two-phase decision procedure.
    Decide {
        file: String,
        #[arg(long = "J", value_name = "a,b,..")]
        j: Option<String>,
    },
    /// Enumerate or count homomorphisms G -> H.
    Homs {
        g: String,
        h: String,
        #[arg(long)]
        count_only: bool,
        /// Extend a partial map `x->a,...` instead.
        #[arg(long)]
        extend: Option<String>,
        /// Check label rigidity of H's walk forest at this depth.
        #[arg(long, conflicts_with_all = ["extend", "count_only"])]
        rigidity: Option<usize>,
        #[arg(long = "J", value_name = "a,b,..")]
        j: Option<String>,
    },
    /// Questions about graphs on Hom(G,H).
    #[command(subcommand)]
    Homgraph(Homgraph),
    /// Mixing gaps, TSSM, constructive gluing and the forest check.
    #[command(subcommand)]
    Mixing(Mixing),
    /// Exact finite-volume Gibbs computations.
    #[command(subcommand)]
    Gibbs(Gibbs),
    /// Cores, critical obstructions and duality checks.
    #[command(subcommand)]
    Duality(Duality),
    /// Run the acceptance battery.
    PaperSuite {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum Make {
    /// Print a structure in canonical form (`@name` for built-in fixtures).
    Show { h: String },
    Product { a: String, b: String },
    Square { h: String },
    Diagonal { h: String },
    /// The link of length `len` over the signature of `like`.
    Link { len: usize, like: String },
    Constants { h: String },
    Forest {
        h: String,
        #[arg(long)]
        depth: usize,
    },
}

#[derive(Args)]
struct Pair {
    g: String,
    h: String,
}

#[derive(Subcommand)]
enum Homgraph {
    /// Connected components of Hom(G,H) under the view.
    Components {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value = "c1")]
        view: String,
    },
    /// A shortest J-walk between two homomorphisms.
    Walk {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value = "c1")]
        view: String,
        #[arg(long = "J", value_name = "a,b,..")]
        j: Option<String>,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// The reconfiguration condition on the link of H with its square.
    B3 {
        h: String,
        #[arg(long = "J", value_name = "a,b,..")]
        j: Option<String>,
    },
    /// J-connectivity of the two projections of H².
    B5 {
        h: String,
        #[arg(long = "J", value_name = "a,b,..")]
        j: Option<String>,
    },
    /// Compare link-product homomorphisms with link-graph walks.
    Links {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        ell: usize,
    },
}

#[derive(Subcommand)]
enum Mixing {
    /// Least gap up to `--g-max` with J-mixing on G.
    Gap {
        #[command(flatten)]
        pair: Pair,
        #[arg(long = "J", value_name = "a,b,..")]
        j: Option<String>,
        #[arg(long)]
        g_max: usize,
    },
    /// Topological strong spatial mixing at a fixed gap.
    Tssm {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        gap: usize,
    },
    /// Glue phi on V with psi on W through the square sequence of H.
    Construct {
        #[command(flatten)]
        pair: Pair,
        #[arg(long = "J", value_name = "a,b,..")]
        j: Option<String>,
        #[arg(long = "V", value_name = "x,y,..")]
        v: String,
        #[arg(long = "W", value_name = "x,y,..")]
        w: String,
        /// `x->a,...` or a file; random (seeded) when omitted.
        #[arg(long)]
        phi: Option<String>,
        #[arg(long)]
        psi: Option<String>,
    },
    /// Gluing on the truncated forest of walks of H².
    C2 {
        h: String,
        #[arg(long = "J", value_name = "a,b,..")]
        j: Option<String>,
        #[arg(long)]
        gap: usize,
        #[arg(long)]
        depth: usize,
    },
}

#[derive(Subcommand)]
enum Gibbs {
    /// Partition function Z_{V,phi}.
    Z {
        #[command(flatten)]
        q: GibbsQuery,
    },
    /// Conditional marginal at one element of V.
    Marginal {
        #[command(flatten)]
        q: GibbsQuery,
        #[arg(long)]
        x: String,
    },
    /// Marginal differences against boundary disagreement distance, over
    /// seeded random boundary pairs.
    Jsm {
        #[command(flatten)]
        pair: Pair,
        #[arg(long = "J", value_name = "a,b,..")]
        j: Option<String>,
        #[arg(long = "V", value_name = "x,y,..")]
        v: String,
        #[arg(long, default_value_t = 20)]
        pairs: usize,
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Marginal gap at a non-diagonal root of the stiff square's forest.
    Influence {
        h: String,
        #[arg(long = "J", value_name = "a,b,..")]
        j: Option<String>,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        lambda: Option<String>,
    },
    /// ((Δ-1)/(Δ-2))^Δ, exactly.
    Hardcore {
        #[arg(long)]
        delta: u32,
    },
}

#[derive(Args)]
struct GibbsQuery {
    g: String,
    h: String,
    #[arg(long = "V", value_name = "x,y,..")]
    v: String,
    /// `x->a,...` or a file; random (seeded) when omitted.
    #[arg(long)]
    phi: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
}

#[derive(Subcommand)]
enum Duality {
    Core {
        h: String,
    },
    Critical {
        o: String,
        h: String,
    },
    Enumerate {
        h: String,
        #[arg(long, default_value_t = 4)]
        max_size: usize,
        #[arg(long)]
        trees: bool,
    },
    CheckA1c {
        h: String,
    },
    /// Decide extension of a partial map through the obstructions of the
    /// constants-augmented target.
    Extend {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
    },
}

/// What a command found.
struct Outcome {
    verdict: Option<bool>,
    witness: Value,
    report: Value,
    text: String,
}

impl Outcome {
    fn answered(report: Value, text: String) -> Self {
        Outcome {
            verdict: None,
            witness: Value::Null,
            report,
            text,
        }
    }
}

struct Ctx {
    seed: u64,
    cap: Option<usize>,
    threads: usize,
}

impl Ctx {
    fn cap(&self, default: usize) -> usize {
        self.cap.unwrap_or(default)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        seed: cli.seed,
        cap: cli.cap,
        threads: cli
            .threads
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
            .max(1),
    };
    let start = Instant::now();
    let res = run(&cli.cmd, &ctx);
    let millis = start.elapsed().as_millis() as u64;
    match res {
        Ok(out) => {
            if cli.json {
                let obj = json!({
                    "verdict": out.verdict,
                    "witness": out.witness,
                    "timing": if cli.timing { json!({ "millis": millis }) } else { Value::Null },
                    "report": out.report,
                });
                println!("{}", serde_json::to_string_pretty(&obj).expect("json"));
            } else {
                print!("{}", out.text);
                if !out.text.ends_with('\n') {
                    println!();
                }
                if cli.timing {
                    println!("time: {millis} ms");
                }
            }
            match out.verdict {
                Some(false) => ExitCode::from(1),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            let code = if e.is_cap() { 3 } else { 2 };
            if cli.json {
                let obj = json!({ "verdict": Value::Null, "witness": Value::Null, "timing": Value::Null, "error": e.to_string() });
                println!("{}", serde_json::to_string_pretty(&obj).expect("json"));
            }
            eprintln!("error: {e}");
            ExitCode::from(code)
        }
    }
}

/// A structure from a file, or a built-in fixture written `@name`.
fn load(spec: &str) -> Result<RelStructure> {
    if let Some(name) = spec.strip_prefix('@') {
        return fixtures::by_name(name).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "unknown fixture `{name}` (known: {})",
                fixtures::NAMES.join(", ")
            ))
        });
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| Error::InvalidArgument(format!("cannot read `{spec}`: {e}")))?;
    RelStructure::parse(&text)
}

fn elems(h: &RelStructure, list: Option<&str>) -> Result<Vec<ElemId>> {
    let Some(list) = list else { return Ok(Vec::new()) };
    let names: Vec<&str> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    let mut ids = h.ids_of(&names)?;
    ids.sort_unstable();
    ids.dedup();
    Ok(ids)
}

fn names(h: &RelStructure, ids: &[ElemId]) -> Vec<String> {
    ids.iter().map(|&x| h.name(x).to_string()).collect()
}

/// Inline `x->a,...` text, or the contents of a file of that name.
fn map_text(arg: &str) -> Result<String> {
    if Path::new(arg).is_file() {
        std::fs::read_to_string(arg)
            .map_err(|e| Error::InvalidArgument(format!("cannot read `{arg}`: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

fn map_or_random(
    arg: Option<&str>,
    g: &RelStructure,
    h: &RelStructure,
    r: &mut impl Rng,
    what: &str,
) -> Result<Map> {
    match arg {
        Some(a) => homs::parse_map(g, h, &map_text(a)?),
        None => random_hom(r, g, h)
            .ok_or_else(|| Error::Precondition(format!("no homomorphism to draw {what} from"))),
    }
}

fn map_json(g: &RelStructure, h: &RelStructure, m: &[ElemId]) -> Value {
    let obj: serde_json::Map<String, Value> = m
        .iter()
        .enumerate()
        .map(|(x, &a)| (g.name(x).to_string(), Value::from(h.name(a))))
        .collect();
    Value::Object(obj)
}

fn folds_json(seq: &DismantleSequence) -> Value {
    seq.folds
        .iter()
        .map(|f| json!([f.removed, f.dominator]))
        .collect()
}

fn folds_text(seq: &DismantleSequence) -> String {
    if seq.folds.is_empty() {
        return "(none)".into();
    }
    seq.folds
        .iter()
        .map(|f| format!("{}->{}", f.removed, f.dominator))
        .collect::<Vec<_>>()
        .join(" ")
}

fn lambda(h: &RelStructure, arg: Option<&str>) -> Result<Weights> {
    match arg {
        Some(s) => Weights::parse(h, s),
        None => Ok(Weights::uniform(h.len())),
    }
}

fn rationals(h: &RelStructure, p: &[num_rational::BigRational]) -> Value {
    let obj: serde_json::Map<String, Value> = p
        .iter()
        .enumerate()
        .map(|(a, r)| (h.name(a).to_string(), Value::from(gibbs::rational_string(r))))
        .collect();
    Value::Object(obj)
}

fn run(cmd: &Cmd, ctx: &Ctx) -> Result<Outcome> {
    match cmd {
        Cmd::Make(m) => make(m, ctx),
        Cmd::Dismantle { file, j, random } => {
            let h = load(file)?;
            let j = elems(&h, j.as_deref())?;
            let (end, seq) = if *random {
                random_dismantle(&h, &j, &mut rng(ctx.seed))?
            } else {
                greedy_dismantle(&h, &j)?
            };
            let text = format!("folds: {}\nresult:\n{}", folds_text(&seq), end.render());
            Ok(Outcome::answered(
                json!({ "folds": folds_json(&seq), "result": end.render(), "size": end.len() }),
                text,
            ))
        }
        Cmd::Decide { file, j } => {
            let h = load(file)?;
            let j = elems(&h, j.as_deref())?;
            let rep = decide_main(&h, &j)?;
            let witness = rep.witness();
            let mut text = format!(
                "holds: {}\nphase1: {}\nphase2: {}\n",
                rep.holds,
                folds_text(&rep.phase1),
                folds_text(&rep.phase2)
            );
            match (rep.ell(), &witness) {
                (Some(ell), _) => text.push_str(&format!("ell: {ell}\ngap: {}\n", 2 * ell)),
                (None, Some(w)) => text.push_str(&format!("witness: {w}\n")),
                _ => {}
            }
            let report = json!({
                "holds": rep.holds,
                "j": rep.j,
                "phase1": folds_json(&rep.phase1),
                "i": rep.i.names(),
                "phase2": folds_json(&rep.phase2),
                "k": rep.k.names(),
                "ell": rep.ell(),
                "gap": rep.gap,
            });
            Ok(Outcome {
                verdict: Some(rep.holds),
                witness: json!(witness),
                report,
                text,
            })
        }
        Cmd::Homs {
            g,
            h,
            count_only,
            extend,
            rigidity,
            j,
        } => {
            let h_s = load(h)?;
            if let Some(depth) = rigidity {
                let j = elems(&h_s, j.as_deref())?;
                let rep = homs::label_rigidity(&h_s, &j, *depth)?;
                let witness = json!(rep.witness);
                return Ok(Outcome {
                    verdict: Some(rep.rigid),
                    witness,
                    report: json!({ "rigid": rep.rigid, "forest_size": rep.forest_size, "forced_per_level": rep.forced_per_level }),
                    text: format!("rigid: {} (forest of {} walks)\n", rep.rigid, rep.forest_size),
                });
            }
            let g_s = load(g)?;
            let cap = ctx.cap(DEFAULT_VERTEX_CAP);
            if let Some(p) = extend {
                let p = PartialMap::from_assignments(
                    &g_s,
                    homs::parse_assignments(&g_s, &h_s, &map_text(p)?)?,
                )?;
                let m = homs::extend_partial(&g_s, &h_s, &p)?;
                let text = match &m {
                    Some(m) => render_map(&g_s, &h_s, m),
                    None => "no extension\n".into(),
                };
                return Ok(Outcome {
                    verdict: Some(m.is_some()),
                    witness: m.as_ref().map_or(Value::Null, |m| map_json(&g_s, &h_s, m)),
                    report: json!({ "extends": m.is_some() }),
                    text,
                });
            }
            let s = HomSearch::new(&g_s, &h_s)?;
            if *count_only {
                let n = s.count(cap)?;
                return Ok(Outcome {
                    verdict: Some(n > 0),
                    witness: Value::Null,
                    report: json!({ "count": n }),
                    text: format!("{n}\n"),
                });
            }
            let all = s.collect(cap)?;
            let text = all
                .iter()
                .map(|m| render_map(&g_s, &h_s, m))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Outcome {
                verdict: Some(!all.is_empty()),
                witness: Value::Null,
                report: json!({
                    "count": all.len(),
                    "homs": all.iter().map(|m| map_json(&g_s, &h_s, m)).collect::<Vec<_>>(),
                }),
                text: if all.is_empty() { "none\n".into() } else { text },
            })
        }
        Cmd::Homgraph(c) => homgraph_cmd(c, ctx),
        Cmd::Mixing(c) => mixing_cmd(c, ctx),
        Cmd::Gibbs(c) => gibbs_cmd(c, ctx),
        Cmd::Duality(c) => duality_cmd(c, ctx),
        Cmd::PaperSuite { level, only } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let ids: Vec<usize> = if only.is_empty() {
                (1..=suite::CRITERIA).collect()
            } else {
                only.clone()
            };
            let results: Vec<_> = ids
                .iter()
                .map(|&id| suite::run_criterion(id, ctx.seed, level, ctx.threads))
                .collect();
            let failed: Vec<usize> = results.iter().filter(|c| !c.passed).map(|c| c.id).collect();
            let text = results
                .iter()
                .map(|c| {
                    format!(
                        "[{}] {:>2} {}: {}\n",
                        if c.passed { "PASS" } else { "FAIL" },
                        c.id,
                        c.name,
                        c.detail
                    )
                })
                .collect();
            Ok(Outcome {
                verdict: Some(failed.is_empty()),
                witness: json!(failed),
                report: json!({ "seed": ctx.seed, "level": level, "criteria": results }),
                text,
            })
        }
    }
}

fn make(m: &Make, ctx: &Ctx) -> Result<Outcome> {
    let s = match m {
        Make::Show { h } => load(h)?,
        Make::Product { a, b } => constructions::product(&load(a)?, &load(b)?)?,
        Make::Square { h } => {
            let h = load(h)?;
            constructions::product(&h, &h)?
        }
        Make::Diagonal { h } => constructions::diagonal(&load(h)?)?,
        Make::Link { len, like } => constructions::link(*len, load(like)?.signature())?,
        Make::Constants { h } => constructions::add_constants(&load(h)?)?,
        Make::Forest { h, depth } => {
            walk_forest(&load(h)?, *depth, ctx.cap(DEFAULT_FOREST_CAP))?.structure
        }
    };
    let text = s.render();
    Ok(Outcome::answered(
        json!({ "structure": text, "size": s.len() }),
        text,
    ))
}

fn homgraph_cmd(c: &Homgraph, ctx: &Ctx) -> Result<Outcome> {
    let cap = ctx.cap(DEFAULT_VERTEX_CAP);
    match c {
        Homgraph::Components { pair, view } => {
            let (g, h) = (load(&pair.g)?, load(&pair.h)?);
            let view: View = view.parse()?;
            let comps = homgraph::components(&g, &h, view, cap)?;
            let sizes: Vec<usize> = comps.iter().map(Vec::len).collect();
            Ok(Outcome::answered(
                json!({ "view": view.to_string(), "components": comps.len(), "sizes": sizes }),
                format!("{} components, sizes {:?}\n", comps.len(), sizes),
            ))
        }
        Homgraph::Walk {
            pair,
            view,
            j,
            from,
            to,
        } => {
            let (g, h) = (load(&pair.g)?, load(&pair.h)?);
            let view: View = view.parse()?;
            let j = elems(&h, j.as_deref())?;
            let phi = homs::parse_map(&g, &h, &map_text(from)?)?;
            let psi = homs::parse_map(&g, &h, &map_text(to)?)?;
            let walk = homgraph::j_connected(&g, &h, &j, view, &phi, &psi, cap)?;
            let text = match &walk {
                Some(w) => format!(
                    "connected in {} moves\n{}",
                    w.len(),
                    w.steps
                        .iter()
                        .map(|m| render_map(&g, &h, m))
                        .collect::<Vec<_>>()
                        .join("--\n")
                ),
                None => "not connected\n".into(),
            };
            Ok(Outcome {
                verdict: Some(walk.is_some()),
                witness: walk.as_ref().map_or(Value::Null, |w| {
                    w.steps.iter().map(|m| map_json(&g, &h, m)).collect()
                }),
                report: json!({ "connected": walk.is_some(), "moves": walk.as_ref().map(|w| w.len()) }),
                text,
            })
        }
        Homgraph::B3 { h, j } => {
            let h = load(h)?;
            let j = elems(&h, j.as_deref())?;
            let ce = homgraph::b3_counterexample(&h, &j, cap)?;
            let sq = homgraph::link_square(&h)?;
            let witness = ce
                .as_ref()
                .map_or(Value::Null, |(a, b)| json!([map_json(&sq, &h, a), map_json(&sq, &h, b)]));
            Ok(Outcome {
                verdict: Some(ce.is_none()),
                witness,
                report: json!({ "holds": ce.is_none(), "j": names(&h, &j) }),
                text: format!("holds: {}\n", ce.is_none()),
            })
        }
        Homgraph::B5 { h, j } => {
            let h = load(h)?;
            let j = elems(&h, j.as_deref())?;
            let walk = homgraph::b5_walk(&h, &j, cap)?;
            Ok(Outcome {
                verdict: Some(walk.is_some()),
                witness: json!(walk.as_ref().map(|w| w.len())),
                report: json!({ "holds": walk.is_some(), "moves": walk.as_ref().map(|w| w.len()) }),
                text: format!(
                    "holds: {}{}\n",
                    walk.is_some(),
                    walk.as_ref()
                        .map(|w| format!(" ({} moves)", w.len()))
                        .unwrap_or_default()
                ),
            })
        }
        Homgraph::Links { pair, ell } => {
            let (g, h) = (load(&pair.g)?, load(&pair.h)?);
            let ok = homgraph::link_walk_correspondence(&g, &h, *ell, cap)?;
            Ok(Outcome {
                verdict: Some(ok),
                witness: Value::Null,
                report: json!({ "equal": ok, "ell": ell }),
                text: format!("counts equal: {ok}\n"),
            })
        }
    }
}

fn search_opts(ctx: &Ctx) -> SearchOptions {
    SearchOptions {
        hom_cap: ctx.cap(DEFAULT_HOM_CAP),
        threads: ctx.threads,
    }
}

fn mixing_cmd(c: &Mixing, ctx: &Ctx) -> Result<Outcome> {
    match c {
        Mixing::Gap { pair, j, g_max } => {
            let (g, h) = (load(&pair.g)?, load(&pair.h)?);
            let j = elems(&h, j.as_deref())?;
            let rep = mixing::gap_search(&g, &h, &j, *g_max, &search_opts(ctx))?;
            let ce = rep.counterexample.as_ref().map(|f| f.describe(&g, &h));
            Ok(Outcome {
                verdict: Some(rep.gap.is_some()),
                witness: json!(ce),
                text: format!(
                    "gap: {}\n{}",
                    rep.gap.map_or("none".into(), |g| g.to_string()),
                    ce.map(|c| format!("counterexample: {c}\n")).unwrap_or_default()
                ),
                report: serde_json::to_value(&rep).expect("json"),
            })
        }
        Mixing::Tssm { pair, gap } => {
            let (g, h) = (load(&pair.g)?, load(&pair.h)?);
            let (ok, fail) = mixing::tssm_check(&g, &h, *gap, &search_opts(ctx))?;
            let ce = fail.as_ref().map(|f| f.describe(&g, &h));
            Ok(Outcome {
                verdict: Some(ok),
                witness: json!(ce),
                report: json!({ "holds": ok, "gap": gap }),
                text: format!(
                    "holds: {ok}\n{}",
                    ce.map(|c| format!("counterexample: {c}\n")).unwrap_or_default()
                ),
            })
        }
        Mixing::Construct {
            pair,
            j,
            v,
            w,
            phi,
            psi,
        } => {
            let (g, h) = (load(&pair.g)?, load(&pair.h)?);
            let j = elems(&h, j.as_deref())?;
            let v = elems(&g, Some(v))?;
            let w = elems(&g, Some(w))?;
            let mut r = rng(ctx.seed);
            let phi = map_or_random(phi.as_deref(), &g, &h, &mut r, "phi")?;
            let psi = map_or_random(psi.as_deref(), &g, &h, &mut r, "psi")?;
            let rep = decide_main(&h, &j)?;
            let m = mixing::mix_constructive(&g, &h, &j, &v, &w, &phi, &psi, &rep)?;
            // Independent recheck through the generic gluing search.
            let mut q = MixingQuery::new(&g, &h, phi.clone(), psi.clone());
            q.v = v.clone();
            q.w = w.clone();
            q.j = j.clone();
            let exists = mixing::vw_mixing(&q)?.is_some();
            Ok(Outcome {
                verdict: Some(exists),
                witness: map_json(&g, &h, &m),
                report: json!({
                    "phi": map_json(&g, &h, &phi),
                    "psi": map_json(&g, &h, &psi),
                    "glued": map_json(&g, &h, &m),
                }),
                text: render_map(&g, &h, &m),
            })
        }
        Mixing::C2 { h, j, gap, depth } => {
            let h = load(h)?;
            let j = elems(&h, j.as_deref())?;
            let rep = mixing::check_c2(&h, &j, *gap, *depth, ctx.cap(DEFAULT_FOREST_CAP))?;
            Ok(Outcome {
                verdict: Some(rep.holds),
                witness: json!(rep.failing_root),
                text: format!(
                    "holds: {}\n{}",
                    rep.holds,
                    rep.failing_root
                        .as_ref()
                        .map(|r| format!("failing root: {r}\n"))
                        .unwrap_or_default()
                ),
                report: serde_json::to_value(&rep).expect("json"),
            })
        }
    }
}

fn gibbs_cmd(c: &Gibbs, ctx: &Ctx) -> Result<Outcome> {
    let cap = ctx.cap(DEFAULT_ASSIGNMENT_CAP);
    let setup = |q: &GibbsQuery| -> Result<(RelStructure, RelStructure, Vec<ElemId>, Map, Weights)> {
        let (g, h) = (load(&q.g)?, load(&q.h)?);
        let v = elems(&g, Some(&q.v))?;
        let phi = map_or_random(q.phi.as_deref(), &g, &h, &mut rng(ctx.seed), "phi")?;
        let l = lambda(&h, q.lambda.as_deref())?;
        Ok((g, h, v, phi, l))
    };
    match c {
        Gibbs::Z { q } => {
            let (g, h, v, phi, l) = setup(q)?;
            let z = gibbs::partition_function(&g, &h, &l, &v, &phi)?;
            let s = gibbs::rational_string(&z);
            Ok(Outcome::answered(
                json!({ "z": s, "phi": map_json(&g, &h, &phi) }),
                format!("{s}\n"),
            ))
        }
        Gibbs::Marginal { q, x } => {
            let (g, h, v, phi, l) = setup(q)?;
            let x = g
                .index_of(x)
                .ok_or_else(|| Error::NotInUniverse(x.clone()))?;
            let p = gibbs::conditional_marginal(&g, &h, &l, &v, &phi, x)?;
            let text = p
                .iter()
                .enumerate()
                .map(|(a, r)| format!("{}: {}\n", h.name(a), gibbs::rational_string(r)))
                .collect();
            Ok(Outcome::answered(json!({ "marginal": rationals(&h, &p) }), text))
        }
        Gibbs::Jsm {
            pair,
            j,
            v,
            pairs,
            lambda: lam,
        } => {
            let (g, h) = (load(&pair.g)?, load(&pair.h)?);
            let j = elems(&h, j.as_deref())?;
            let v = elems(&g, Some(v))?;
            let l = lambda(&h, lam.as_deref())?;
            let mut r = rng(ctx.seed);
            let mut ps = Vec::with_capacity(*pairs);
            for _ in 0..*pairs {
                let a = map_or_random(None, &g, &h, &mut r, "a boundary")?;
                let b = map_or_random(None, &g, &h, &mut r, "a boundary")?;
                ps.push((a, b));
            }
            let rep = gibbs::jsm_report(&g, &h, &l, &j, &[v], &ps, cap)?;
            let text = rep
                .buckets
                .iter()
                .map(|b| {
                    format!(
                        "distance {:?}: {} comparisons, max {}\n",
                        b.distance,
                        b.comparisons,
                        gibbs::rational_string(&b.max.gap)
                    )
                })
                .collect::<String>()
                + &format!("violation: {}\n", rep.violation);
            Ok(Outcome {
                verdict: Some(!rep.violation),
                witness: json!(rep.violation_witness),
                report: serde_json::to_value(&rep).expect("json"),
                text,
            })
        }
        Gibbs::Influence {
            h,
            j,
            depth,
            lambda: lam,
        } => {
            let h = load(h)?;
            let j = elems(&h, j.as_deref())?;
            let l = lam.as_deref().map(|s| Weights::parse(&h, s)).transpose()?;
            let b = gibbs::boundary_influence(&h, &j, *depth, l.as_ref(), cap)?;
            Ok(Outcome::answered(
                serde_json::to_value(&b).expect("json"),
                format!(
                    "gap: {} at root {}\n",
                    gibbs::rational_string(&b.gap),
                    b.witness
                ),
            ))
        }
        Gibbs::Hardcore { delta } => {
            let r = gibbs::hardcore_critical_activity(*delta)?;
            let s = gibbs::rational_string(&r);
            Ok(Outcome::answered(json!({ "activity": s }), format!("{s}\n")))
        }
    }
}

fn obstruction_json(r: &ObstructionReport) -> Value {
    serde_json::to_value(r).expect("json")
}

fn duality_cmd(c: &Duality, ctx: &Ctx) -> Result<Outcome> {
    let opts = EnumerationOptions {
        candidate_cap: ctx.cap(duality::DEFAULT_CANDIDATE_CAP),
        threads: ctx.threads,
    };
    match c {
        Duality::Core { h } => {
            let h = load(h)?;
            let m = duality::non_injective_endomorphism(&h)?;
            Ok(Outcome {
                verdict: Some(m.is_none()),
                witness: m.as_ref().map_or(Value::Null, |m| map_json(&h, &h, m)),
                report: json!({ "core": m.is_none() }),
                text: format!(
                    "core: {}\n{}",
                    m.is_none(),
                    m.as_ref().map(|m| render_map(&h, &h, m)).unwrap_or_default()
                ),
            })
        }
        Duality::Critical { o, h } => {
            let (o, h) = (load(o)?, load(h)?);
            let ok = duality::is_critical_obstruction(&o, &h)?;
            Ok(Outcome {
                verdict: Some(ok),
                witness: Value::Null,
                report: json!({ "critical": ok }),
                text: format!("critical: {ok}\n"),
            })
        }
        Duality::Enumerate { h, max_size, trees } => {
            let h = load(h)?;
            let r = duality::enumerate_critical_obstructions(&h, *max_size, *trees, &opts)?;
            let mut text = format!(
                "{} critical obstructions up to {} elements{} (exhausted: {})\n",
                r.found.len(),
                r.max_size,
                if r.trees_only { ", trees only" } else { "" },
                r.exhausted
            );
            for o in &r.found {
                text.push_str("---\n");
                text.push_str(&o.render());
            }
            Ok(Outcome::answered(obstruction_json(&r), text))
        }
        Duality::CheckA1c { h } => {
            let h = load(h)?;
            let ok = duality::finite_duality_via_a1c(&h)?;
            Ok(Outcome {
                verdict: Some(ok),
                witness: Value::Null,
                report: json!({ "holds": ok }),
                text: format!("holds: {ok}\n"),
            })
        }
        Duality::Extend { pair, p, max_size } => {
            let (g, h) = (load(&pair.g)?, load(&pair.h)?);
            let p = PartialMap::from_assignments(&g, homs::parse_assignments(&g, &h, &map_text(p)?)?)?;
            let hc = constructions::add_constants(&h)?;
            let obs = duality::enumerate_critical_obstructions(&hc, *max_size, false, &opts)?;
            let ok = duality::extension_via_obstructions(&g, &h, &p, &obs)?;
            Ok(Outcome {
                verdict: Some(ok),
                witness: Value::Null,
                report: json!({ "extends": ok, "obstructions": obs.found.len() }),
                text: format!("extends: {ok} ({} obstructions checked)\n", obs.found.len()),
            })
        }
    }
}
