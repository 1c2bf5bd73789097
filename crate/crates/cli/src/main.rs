use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use dst_core::analytic::{self, AnalyticError, Budget, Membership, ProductTree};
use dst_core::closedset::{self, Dichotomy};
use dst_core::coding;
use dst_core::format::{self, FormatError};
use dst_core::kb;
use dst_core::ordinal::Ordinal;
use dst_core::rank::{self, DomainBound, RankValue};
use dst_core::suslin::{self, SuslinError};
use dst_core::tree::{Pair, RegularTree, Seq, Tree};

#[derive(Parser)]
#[command(name = "dst", version, about = "Trees, ranks, closed and analytic sets, and operation A")]
struct Cli {
    /// Write the JSON result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TreeArg {
    #[arg(long)]
    tree: PathBuf,
}

#[derive(Args)]
struct BudgetArg {
    #[arg(long, default_value_t = 100_000)]
    max_states: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Rank of the tree, or of one of its nodes.
    Rank {
        #[command(flatten)]
        tree: TreeArg,
        /// A node such as "[0,1]".
        #[arg(long)]
        node: Option<String>,
    },
    /// Well-foundedness, and membership in WF_alpha when --ordinal is given.
    Wf {
        #[command(flatten)]
        tree: TreeArg,
        #[arg(long)]
        ordinal: Option<String>,
    },
    /// Kleene-Brouwer comparison of two sequences: LT, EQ or GT.
    KbCompare { left: String, right: String },
    /// The nodes of a finite tree in increasing Kleene-Brouwer order.
    KbSort {
        #[command(flatten)]
        tree: TreeArg,
    },
    /// An order-preserving map from --tree into --target, if one exists.
    Embed {
        #[command(flatten)]
        tree: TreeArg,
        #[arg(long)]
        target: PathBuf,
        /// Depth of the listed domain when the source tree is infinite.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = 4)]
        width: u32,
    },
    /// The canonical tree of an ordinal.
    Canonical {
        #[arg(long)]
        ordinal: String,
    },
    /// Normal forms, supremum, and fundamental sequence terms of ordinals.
    Ord {
        ordinals: Vec<String>,
        #[arg(long)]
        ordinal: Option<String>,
        /// Number of fundamental sequence terms of --ordinal to list.
        #[arg(long, default_value_t = 0)]
        limit: u64,
    },
    /// The first --limit bits of the characteristic code of a tree.
    Encode {
        #[command(flatten)]
        tree: TreeArg,
        #[arg(long)]
        limit: u64,
    },
    /// The finite tree named by a code file.
    Decode { code: PathBuf },
    /// The linear-order code of the tree on the first --limit sequences.
    Tree2lo {
        #[command(flatten)]
        tree: TreeArg,
        #[arg(long)]
        limit: u64,
        /// Print the reflexive characteristic matrix instead of the pairs.
        #[arg(long)]
        characteristic: bool,
    },
    /// Perfect kernel, derivative count and scattered branches.
    Kernel {
        #[command(flatten)]
        tree: TreeArg,
        #[arg(long, default_value_t = 64)]
        limit: usize,
    },
    /// Countable with its branches, or perfect with its kernel.
    Dichotomy {
        #[command(flatten)]
        tree: TreeArg,
        #[arg(long, default_value_t = 64)]
        limit: usize,
    },
    /// Whether the tree is pruned and every node has a splitting extension.
    Perfect {
        #[command(flatten)]
        tree: TreeArg,
    },
    /// Image of a binary sequence under the Cantor embedding of a perfect tree.
    CantorEmbed {
        #[command(flatten)]
        tree: TreeArg,
        seq: String,
    },
    /// The leftmost branch.
    Leftmost {
        #[command(flatten)]
        tree: TreeArg,
    },
    /// Whether x lies in the projection, with a certificate.
    Member {
        #[command(flatten)]
        tree: TreeArg,
        #[arg(long)]
        word: PathBuf,
    },
    /// The projection of a product tree.
    Project {
        #[command(flatten)]
        tree: TreeArg,
        #[command(flatten)]
        budget: BudgetArg,
    },
    /// The leftmost y with (x, y) a branch.
    Uniformize {
        #[command(flatten)]
        tree: TreeArg,
        #[arg(long)]
        word: PathBuf,
    },
    /// Two extensions of --node with disjoint uncountable projections.
    Split {
        #[command(flatten)]
        tree: TreeArg,
        /// A product node such as "[[0,1],[1,1]]".
        #[arg(long, default_value = "[]")]
        node: String,
        #[arg(long, default_value_t = 64)]
        max_depth: usize,
        #[command(flatten)]
        budget: BudgetArg,
    },
    /// Operation A applied to a scheme.
    SuslinApply {
        #[arg(long)]
        scheme: PathBuf,
    },
    /// Both evaluations of a nested scheme through the paired scheme.
    SuslinIdem {
        #[arg(long)]
        scheme: PathBuf,
        /// Also print the paired scheme itself.
        #[arg(long)]
        materialize: bool,
        #[command(flatten)]
        budget: BudgetArg,
    },
    /// The clopen scheme of a binary product tree and its value under A.
    SuslinBridge {
        #[command(flatten)]
        tree: TreeArg,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        resolution: u32,
        #[command(flatten)]
        budget: BudgetArg,
    },
    /// The retract image of a sequence into a pruned tree.
    Retract {
        #[command(flatten)]
        tree: TreeArg,
        seq: String,
    },
}

enum Failure {
    Negative(Value, String),
    Invalid(String),
    Budget(String),
}

impl Failure {
    fn invalid(e: impl std::fmt::Display) -> Failure {
        Failure::Invalid(e.to_string())
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::invalid(e)
    }
}

impl From<AnalyticError> for Failure {
    fn from(e: AnalyticError) -> Self {
        match e {
            AnalyticError::Budget { .. } => Failure::Budget(e.to_string()),
            other => Failure::invalid(other),
        }
    }
}

impl From<SuslinError> for Failure {
    fn from(e: SuslinError) -> Self {
        match e {
            SuslinError::Budget { .. } | SuslinError::Analytic(AnalyticError::Budget { .. }) => {
                Failure::Budget(e.to_string())
            }
            other => Failure::invalid(other),
        }
    }
}

type Outcome = Result<(Value, String), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn load_tree(path: &Path) -> Result<Tree, Failure> {
    format::parse_tree(&read(path)?).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn load_regular(path: &Path) -> Result<RegularTree<u32>, Failure> {
    match load_tree(path)? {
        Tree::Regular(r) => Ok(r),
        _ => Err(Failure::Invalid(format!("{}: a regular tree is required", path.display()))),
    }
}

fn load_product(path: &Path) -> Result<ProductTree, Failure> {
    format::parse_product_tree(&read(path)?).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn load_word(path: &Path) -> Result<dst_core::tree::UPWord<u32>, Failure> {
    format::parse_word(&read(path)?).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn seq(text: &str) -> Result<Seq, Failure> {
    format::parse_seq(text).map_err(|e| Failure::Invalid(format!("sequence {text:?}: {e}")))
}

fn ordinal(text: &str) -> Result<Ordinal, Failure> {
    Ordinal::parse(text).map_err(|e| Failure::Invalid(format!("ordinal {text:?}: {e}")))
}

fn seq_json(s: &[u32]) -> String {
    serde_json::to_string(s).expect("serializable")
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Rank { tree, node } => {
            let t = load_tree(&tree.tree)?;
            let sigma = node.as_deref().map(seq).transpose()?.unwrap_or_default();
            let r = rank::rank_at(&t, &sigma);
            Ok((json!({ "rank": r }), format!("rank {r}")))
        }
        Command::Wf { tree, ordinal: alpha } => {
            let t = load_tree(&tree.tree)?;
            let r = rank::rank_of(&t);
            let wf = r != RankValue::Infinity;
            let mut out = json!({ "well_founded": wf, "rank": r });
            let mut summary = format!("{} (rank {r})", if wf { "well-founded" } else { "ill-founded" });
            if let Some(a) = alpha {
                let a = ordinal(&a)?;
                let inside = rank::wf_member(&t, &a);
                out["in_wf_alpha"] = json!(inside);
                summary.push_str(&format!("; {} WF_{a}", if inside { "in" } else { "not in" }));
            }
            Ok((out, summary))
        }
        Command::KbCompare { left, right } => {
            let (s, t) = (seq(&left)?, seq(&right)?);
            let answer = match kb::kb_compare(&s, &t) {
                std::cmp::Ordering::Less => "LT",
                std::cmp::Ordering::Equal => "EQ",
                std::cmp::Ordering::Greater => "GT",
            };
            Ok((json!(answer), format!("{} {answer} {}", seq_json(&s), seq_json(&t))))
        }
        Command::KbSort { tree } => {
            let Tree::Finite(t) = load_tree(&tree.tree)? else {
                return Err(Failure::Invalid("kb-sort needs a finite tree".into()));
            };
            let order = kb::kb_sort(&t);
            let n = order.len();
            Ok((json!({ "order": order }), format!("{n} nodes in Kleene-Brouwer order")))
        }
        Command::Embed {
            tree,
            target,
            depth,
            width,
        } => {
            let (s, t) = (load_tree(&tree.tree)?, load_tree(&target)?);
            let bound = depth.map(|depth| DomainBound { depth, width });
            match rank::embed(&s, &t, bound).map_err(Failure::invalid)? {
                Some(e) => {
                    let pairs: Vec<(&Seq, &Seq)> = e.pairs.iter().collect();
                    let n = pairs.len();
                    Ok((json!({ "embedding": pairs }), format!("embedding listed on {n} nodes")))
                }
                None => Ok((
                    json!({ "embedding": null }),
                    format!("no embedding: rank {} > rank {}", rank::rank_of(&s), rank::rank_of(&t)),
                )),
            }
        }
        Command::Canonical { ordinal: alpha } => {
            let a = ordinal(&alpha)?;
            let t = Tree::Symbolic(rank::canonical(&a));
            Ok((format::tree_to_json(&t), format!("canonical tree of rank {a}")))
        }
        Command::Ord {
            ordinals,
            ordinal: alpha,
            limit,
        } => {
            let family = ordinals.iter().map(|s| ordinal(s)).collect::<Result<Vec<_>, _>>()?;
            let sup = Ordinal::sup(&family);
            let mut out = json!({
                "ordinals": family.iter().map(Ordinal::to_string).collect::<Vec<_>>(),
                "sup": sup.to_string(),
            });
            let mut summary = format!("sup {sup}");
            if let Some(a) = alpha {
                let a = ordinal(&a)?;
                let fund = if a.is_limit() {
                    let terms = (0..limit)
                        .map(|n| a.fund_seq(n).map(|o| o.to_string()))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(Failure::invalid)?;
                    json!(terms)
                } else {
                    Value::Null
                };
                out["ordinal"] = json!({
                    "normal_form": a.to_string(),
                    "zero": a.is_zero(),
                    "successor": a.is_successor(),
                    "limit": a.is_limit(),
                    "fund_seq": fund,
                });
                summary.push_str(&format!("; {a} is {}", if a.is_limit() { "a limit" } else if a.is_zero() { "zero" } else { "a successor" }));
            }
            Ok((out, summary))
        }
        Command::Encode { tree, limit } => {
            let t = load_tree(&tree.tree)?;
            let code = coding::tree_to_code(&t, limit);
            let k = code.bits.iter().filter(|&&b| b).count();
            Ok((format::code_to_json(&code), format!("{limit} code bits, {k} set")))
        }
        Command::Decode { code } => {
            let text = read(&code)?;
            let c = format::parse_code(&text)?;
            let t = coding::code_to_tree(&c).map_err(Failure::invalid)?;
            let n = t.len();
            Ok((format::tree_to_json(&Tree::Finite(t)), format!("finite tree with {n} nodes")))
        }
        Command::Tree2lo {
            tree,
            limit,
            characteristic,
        } => {
            let t = load_tree(&tree.tree)?;
            let lo = coding::tree_to_lo(&t, limit);
            let field = lo.field().len();
            let summary = format!("order on {field} of the first {limit} sequences");
            if characteristic {
                let rows: Vec<String> = lo
                    .characteristic()
                    .iter()
                    .map(|row| row.iter().map(|&b| if b { '1' } else { '0' }).collect())
                    .collect();
                Ok((json!({ "size": lo.size(), "rows": rows }), summary))
            } else {
                Ok((format::lo_to_json(&lo), summary))
            }
        }
        Command::Kernel { tree, limit } => {
            let t = load_regular(&tree.tree)?;
            let cb = closedset::cb_decompose(&t, limit);
            let summary = format!(
                "kernel {} after {} derivative steps; {} scattered branches listed",
                if cb.kernel.is_empty() { "empty" } else { "nonempty" },
                cb.iterations,
                cb.scattered_sample.len()
            );
            Ok((
                json!({
                    "kernel": format::regular_to_json(&cb.kernel),
                    "iterations": cb.iterations,
                    "scattered_sample": cb.scattered_sample.iter().map(format::word_to_json).collect::<Vec<_>>(),
                    "sample_complete": cb.sample_complete,
                }),
                summary,
            ))
        }
        Command::Dichotomy { tree, limit } => {
            let t = load_regular(&tree.tree)?;
            match closedset::dichotomy(&t, limit) {
                Dichotomy::Countable { witnesses, complete } => {
                    let n = witnesses.len();
                    Ok((
                        json!({
                            "answer": "COUNTABLE",
                            "witnesses": witnesses.iter().map(format::word_to_json).collect::<Vec<_>>(),
                            "complete": complete,
                        }),
                        format!("countable; {n} branches listed{}", if complete { ", all of them" } else { "" }),
                    ))
                }
                Dichotomy::Perfect(k) => Ok((
                    json!({ "answer": "PERFECT", "kernel": format::regular_to_json(&k) }),
                    format!("contains a perfect subset; kernel has {} states", k.num_states()),
                )),
            }
        }
        Command::Perfect { tree } => {
            let t = load_regular(&tree.tree)?;
            let p = closedset::is_perfect(&t);
            Ok((json!({ "perfect": p }), format!("{}perfect", if p { "" } else { "not " })))
        }
        Command::CantorEmbed { tree, seq: s } => {
            let t = load_regular(&tree.tree)?;
            let s = seq(&s)?;
            let image = closedset::cantor_embed(&t, &s).map_err(Failure::invalid)?;
            let summary = format!("{} maps to {}", seq_json(&s), seq_json(&image));
            Ok((json!({ "node": image }), summary))
        }
        Command::Leftmost { tree } => {
            let t = match load_tree(&tree.tree)? {
                Tree::Regular(r) => r,
                Tree::Finite(_) => return Err(Failure::Negative(Value::Null, "no infinite branch".into())),
                Tree::Symbolic(_) => return Err(Failure::Invalid("leftmost needs a regular or finite tree".into())),
            };
            match closedset::leftmost_branch(&t) {
                Ok(w) => {
                    let summary = format!("leftmost branch {w}");
                    Ok((format::word_to_json(&w), summary))
                }
                Err(closedset::ClosedSetError::WellFounded) => {
                    Err(Failure::Negative(Value::Null, "no infinite branch".into()))
                }
                Err(e) => Err(Failure::invalid(e)),
            }
        }
        Command::Member { tree, word } => {
            let (t, x) = (load_product(&tree.tree)?, load_word(&word)?);
            match analytic::member(&t, &x)? {
                Membership::In { witness } => Ok((
                    json!({ "member": true, "witness": format::word_to_json(&witness) }),
                    format!("in the projection, witness {witness}"),
                )),
                Membership::Out { rank } => Ok((
                    json!({ "member": false, "rank": rank }),
                    format!("not in the projection; section tree has rank {rank}"),
                )),
            }
        }
        Command::Project { tree, budget } => {
            let t = load_product(&tree.tree)?;
            let p = analytic::project_closed(&t, Budget { max_states: budget.max_states })?;
            let n = p.num_states();
            Ok((format::regular_to_json(&p), format!("projection automaton with {n} states")))
        }
        Command::Uniformize { tree, word } => {
            let (t, x) = (load_product(&tree.tree)?, load_word(&word)?);
            match analytic::uniformize(&t, &x) {
                Ok(y) => {
                    let summary = format!("f(x) = {y}");
                    Ok((format::word_to_json(&y), summary))
                }
                Err(AnalyticError::NotInProjection) => {
                    Err(Failure::Negative(Value::Null, "NOT-IN-PROJECTION".into()))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Split {
            tree,
            node,
            max_depth,
            budget,
        } => {
            let t = load_product(&tree.tree)?;
            let sigma: Vec<Pair> = serde_json::from_str(&node).map_err(|e| Failure::Invalid(format!("node {node:?}: {e}")))?;
            let found = analytic::find_perfect_split(&t, &sigma, max_depth, Budget { max_states: budget.max_states })?;
            match found {
                Some((a, b)) => Ok((json!({ "split": [a, b] }), format!("split found at length {}", a.len()))),
                None => Ok((json!({ "split": null }), format!("no split within depth {max_depth}"))),
            }
        }
        Command::SuslinApply { scheme } => {
            let s = format::parse_scheme(&read(&scheme)?)?;
            let a = suslin::apply_a(&s);
            let summary = format!("A(C) has {} of {} cells", a.len(), 1u64 << a.resolution());
            Ok((format::clopen_to_json(&a), summary))
        }
        Command::SuslinIdem {
            scheme,
            materialize,
            budget,
        } => {
            let n = format::parse_nested_scheme(&read(&scheme)?)?;
            let paired = suslin::idempotence_transform(&n);
            let two_stage = n.two_stage();
            let direct = suslin::apply_a(&paired);
            let agree = two_stage == direct;
            let mut out = json!({
                "two_stage": format::clopen_to_json(&two_stage),
                "paired": format::clopen_to_json(&direct),
                "agree": agree,
            });
            if materialize {
                let m = paired.materialize(Budget { max_states: budget.max_states })?;
                out["scheme"] = format::scheme_to_json(&m);
            }
            Ok((out, format!("evaluations {}", if agree { "agree" } else { "DIFFER" })))
        }
        Command::SuslinBridge {
            tree,
            depth,
            resolution,
            budget,
        } => {
            let t = load_product(&tree.tree)?;
            let b = Budget { max_states: budget.max_states };
            let s = suslin::scheme_from_closed(&t, depth, resolution, b)?;
            let a = suslin::apply_a(&s);
            let proj = suslin::projection_cells(&analytic::project_closed(&t, b)?, resolution)?;
            let agree = a == proj;
            Ok((
                json!({
                    "scheme": format::scheme_to_json(&s),
                    "apply": format::clopen_to_json(&a),
                    "projection": format::clopen_to_json(&proj),
                    "agree": agree,
                }),
                format!("A(C) {} the projection cells", if agree { "equals" } else { "DIFFERS from" }),
            ))
        }
        Command::Retract { tree, seq: s } => {
            let t = load_tree(&tree.tree)?;
            let s = seq(&s)?;
            let g = t.retract_node(&s).map_err(Failure::invalid)?;
            let summary = format!("G({}) = {}", seq_json(&s), seq_json(&g));
            Ok((json!({ "image": g }), summary))
        }
    }
}

fn emit(value: &Value, out: Option<&Path>) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).expect("serializable") + "\n";
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.as_deref();
    let (value, summary, code) = match run(cli.command) {
        Ok((v, s)) => (v, s, 0),
        Err(Failure::Negative(v, s)) => (v, s, 1),
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("budget exceeded: {msg}");
            return ExitCode::from(3);
        }
    };
    if let Err(msg) = emit(&value, out) {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    eprintln!("{summary}");
    ExitCode::from(code)
}
