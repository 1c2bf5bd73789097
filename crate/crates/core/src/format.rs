//! JSON file formats for trees, words, codes, chains and schemes.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::analytic::ProductTree;
use crate::coding::{CodingError, LOCode, TreeCode};
use crate::kb::{KBChain, KbError};
use crate::ordinal::{Ordinal, OrdinalError};
use crate::suslin::{ClopenSet, NestedScheme, Scheme, SuslinError};
use crate::tree::{FiniteTree, Label, Pair, RegularTree, Seq, SymbolicTree, Tree, TreeError, UPWord};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error(transparent)]
    Suslin(#[from] SuslinError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Serialize, Deserialize)]
struct EdgeFile<L> {
    from: String,
    label: L,
    to: String,
}

#[derive(Serialize, Deserialize)]
struct RegularFile<L> {
    initial: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    states: Option<Vec<String>>,
    #[serde(default = "Option::default", skip_serializing_if = "Option::is_none")]
    alphabet: Option<Vec<L>>,
    edges: Vec<EdgeFile<L>>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum TreeFile {
    Finite { nodes: Vec<Seq> },
    Regular(RegularFile<u32>),
    Canonical { ordinal: String },
    Symbolic { tree: Value },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ProductFile {
    Regular(RegularFile<Pair>),
}

fn regular_from_file<L: Label>(f: RegularFile<L>) -> Result<RegularTree<L>, FormatError> {
    let Some(initial) = f.initial else {
        if !f.edges.is_empty() {
            return Err(FormatError::Invalid("an empty tree has no edges".into()));
        }
        return Ok(RegularTree::empty(f.alphabet.unwrap_or_default()));
    };
    let mut names: Vec<String> = vec![initial.clone()];
    let mut index: HashMap<String, usize> = HashMap::from([(initial, 0)]);
    let mut intern = |name: &str, names: &mut Vec<String>| {
        *index.entry(name.to_string()).or_insert_with(|| {
            names.push(name.to_string());
            names.len() - 1
        })
    };
    for s in f.states.iter().flatten() {
        intern(s, &mut names);
    }
    let mut table: Vec<BTreeMap<L, usize>> = Vec::new();
    let mut alphabet: BTreeSet<L> = f.alphabet.iter().flatten().copied().collect();
    for e in &f.edges {
        let (a, b) = (intern(&e.from, &mut names), intern(&e.to, &mut names));
        table.resize(names.len(), BTreeMap::new());
        if f.alphabet.is_none() {
            alphabet.insert(e.label);
        }
        if let Some(old) = table[a].insert(e.label, b) {
            if old != b {
                return Err(TreeError::Nondeterministic {
                    state: e.from.clone(),
                    label: format!("{:?}", e.label),
                }
                .into());
            }
        }
    }
    table.resize(names.len(), BTreeMap::new());
    Ok(RegularTree::from_parts(alphabet, names, table, Some(0))?)
}

fn regular_to_file<L: Label>(t: &RegularTree<L>) -> RegularFile<L> {
    let edges = (0..t.num_states())
        .flat_map(|q| {
            t.edges(q).iter().map(move |(&label, &c)| EdgeFile {
                from: t.state_name(q).to_string(),
                label,
                to: t.state_name(c).to_string(),
            })
        })
        .collect();
    RegularFile {
        initial: t.initial().map(|q| t.state_name(q).to_string()),
        states: Some((0..t.num_states()).map(|q| t.state_name(q).to_string()).collect()),
        alphabet: Some(t.alphabet().iter().copied().collect()),
        edges,
    }
}

fn symbolic_from_value(v: &Value) -> Result<SymbolicTree, FormatError> {
    match v {
        Value::String(s) if s == "empty" => Ok(SymbolicTree::Empty),
        Value::String(s) if s == "leaf" => Ok(SymbolicTree::Leaf),
        Value::Object(m) if m.contains_key("limit") => {
            let text = m["limit"].as_str().ok_or_else(|| FormatError::Invalid("limit must be a string".into()))?;
            Ok(SymbolicTree::omega_limit(Ordinal::parse(text)?)?)
        }
        Value::Object(m) if m.contains_key("children") => {
            let kids = m["children"]
                .as_object()
                .ok_or_else(|| FormatError::Invalid("children must be an object".into()))?;
            let mut out = Vec::new();
            for (k, c) in kids {
                let label: u32 = k.parse().map_err(|_| FormatError::Invalid(format!("bad child label {k:?}")))?;
                out.push((label, symbolic_from_value(c)?));
            }
            Ok(SymbolicTree::node(out))
        }
        other => Err(FormatError::Invalid(format!("unrecognized symbolic tree {other}"))),
    }
}

fn symbolic_to_value(t: &SymbolicTree) -> Value {
    match t {
        SymbolicTree::Empty => json!("empty"),
        SymbolicTree::Leaf => json!("leaf"),
        SymbolicTree::Limit(l) => json!({ "limit": l.get().to_string() }),
        SymbolicTree::Node(m) => {
            let kids: serde_json::Map<String, Value> = m.iter().map(|(k, c)| (k.to_string(), symbolic_to_value(c))).collect();
            json!({ "children": kids })
        }
    }
}

pub fn parse_tree(text: &str) -> Result<Tree, FormatError> {
    Ok(match serde_json::from_str::<TreeFile>(text)? {
        TreeFile::Finite { nodes } => Tree::Finite(FiniteTree::new(nodes)?),
        TreeFile::Regular(f) => Tree::Regular(regular_from_file(f)?),
        TreeFile::Canonical { ordinal } => Tree::Symbolic(SymbolicTree::canonical(&Ordinal::parse(&ordinal)?)),
        TreeFile::Symbolic { tree } => Tree::Symbolic(symbolic_from_value(&tree)?),
    })
}

pub fn parse_product_tree(text: &str) -> Result<ProductTree, FormatError> {
    let ProductFile::Regular(f) = serde_json::from_str::<ProductFile>(text)?;
    Ok(ProductTree::new(regular_from_file(f)?))
}

pub fn regular_to_json<L: Label + Serialize>(t: &RegularTree<L>) -> Value {
    let mut v = serde_json::to_value(regular_to_file(t)).expect("serializable");
    v["kind"] = json!("regular");
    v
}

pub fn tree_to_json(t: &Tree) -> Value {
    match t {
        Tree::Finite(f) => json!({ "kind": "finite", "nodes": f.nodes().collect::<Vec<_>>() }),
        Tree::Regular(r) => regular_to_json(r),
        Tree::Symbolic(s) => json!({ "kind": "symbolic", "tree": symbolic_to_value(s) }),
    }
}

pub fn canonical_to_json(alpha: &Ordinal) -> Value {
    json!({ "kind": "canonical", "ordinal": alpha.to_string() })
}

#[derive(Serialize, Deserialize)]
struct WordFile<L> {
    prefix: Vec<L>,
    period: Vec<L>,
}

pub fn parse_word<L: Label + DeserializeOwned>(text: &str) -> Result<UPWord<L>, FormatError> {
    let w: WordFile<L> = serde_json::from_str(text)?;
    Ok(UPWord::new(w.prefix, w.period)?)
}

pub fn word_to_json<L: Label + Serialize>(w: &UPWord<L>) -> Value {
    json!({ "prefix": w.prefix(), "period": w.period() })
}

#[derive(Serialize, Deserialize)]
struct LOFile {
    size: u64,
    pairs: Vec<(u64, u64)>,
}

pub fn parse_lo(text: &str) -> Result<LOCode, FormatError> {
    let f: LOFile = serde_json::from_str(text)?;
    Ok(LOCode::new(f.size, f.pairs)?)
}

pub fn lo_to_json(c: &LOCode) -> Value {
    json!({ "size": c.size(), "pairs": c.pairs().collect::<Vec<_>>() })
}

#[derive(Serialize, Deserialize)]
struct CodeFile {
    bits: String,
}

pub fn parse_code(text: &str) -> Result<TreeCode, FormatError> {
    let f: CodeFile = serde_json::from_str(text)?;
    let bits = f
        .bits
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(FormatError::Invalid(format!("bit {other:?} is not 0 or 1"))),
        })
        .collect::<Result<_, _>>()?;
    Ok(TreeCode { bits })
}

pub fn code_to_json(c: &TreeCode) -> Value {
    let bits: String = c.bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
    json!({ "bits": bits })
}

#[derive(Serialize, Deserialize)]
struct ChainFile<L> {
    nodes: Vec<Vec<L>>,
}

pub fn parse_chain(text: &str) -> Result<KBChain<u32>, FormatError> {
    let f: ChainFile<u32> = serde_json::from_str(text)?;
    Ok(KBChain::new(f.nodes)?)
}

pub fn chain_to_json<L: Label + Serialize>(c: &KBChain<L>) -> Value {
    json!({ "nodes": c.nodes() })
}

pub fn clopen_to_json(c: &ClopenSet) -> Value {
    json!({ "resolution": c.resolution(), "cells": c.cell_strings() })
}

/// Scheme keys: digit strings, or comma-separated labels when `b > 10`.
fn key_to_string(s: &[u32], branching: u32) -> String {
    let parts: Vec<String> = s.iter().map(u32::to_string).collect();
    parts.join(if branching > 10 { "," } else { "" })
}

fn key_from_string(k: &str, branching: u32) -> Result<Seq, FormatError> {
    let bad = || FormatError::Invalid(format!("bad scheme key {k:?}"));
    if k.is_empty() {
        return Ok(Vec::new());
    }
    if branching > 10 {
        k.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect()
    } else {
        k.chars().map(|c| c.to_digit(10).ok_or_else(bad)).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct SchemeFile {
    depth: usize,
    branching: u32,
    resolution: u32,
    entries: BTreeMap<String, Vec<String>>,
}

fn scheme_from_file(f: SchemeFile) -> Result<Scheme, FormatError> {
    let mut entries = BTreeMap::new();
    for (k, cells) in &f.entries {
        let key = key_from_string(k, f.branching)?;
        if entries.insert(key, ClopenSet::from_cells(f.resolution, cells)?).is_some() {
            return Err(FormatError::Invalid(format!("duplicate scheme key {k:?}")));
        }
    }
    Ok(Scheme::new(f.depth, f.branching, entries)?)
}

pub fn parse_scheme(text: &str) -> Result<Scheme, FormatError> {
    scheme_from_file(serde_json::from_str(text)?)
}

pub fn scheme_to_json(s: &Scheme) -> Value {
    use crate::suslin::SchemeView;
    let entries: BTreeMap<String, Vec<String>> = s
        .entries()
        .iter()
        .map(|(k, v)| (key_to_string(k, s.branching()), v.cell_strings()))
        .collect();
    json!({
        "depth": s.depth(),
        "branching": s.branching(),
        "resolution": s.resolution(),
        "entries": entries,
    })
}

#[derive(Deserialize)]
struct NestedFile {
    depth: usize,
    branching: u32,
    entries: BTreeMap<String, SchemeFile>,
}

pub fn parse_nested_scheme(text: &str) -> Result<NestedScheme, FormatError> {
    let f: NestedFile = serde_json::from_str(text)?;
    let mut inner = BTreeMap::new();
    for (k, s) in f.entries {
        let key = key_from_string(&k, f.branching)?;
        if inner.insert(key, scheme_from_file(s)?).is_some() {
            return Err(FormatError::Invalid(format!("duplicate scheme key {k:?}")));
        }
    }
    Ok(NestedScheme::new(f.depth, f.branching, inner)?)
}

pub fn nested_scheme_to_json(n: &NestedScheme) -> Value {
    let entries: serde_json::Map<String, Value> = n
        .inner()
        .iter()
        .map(|(k, s)| (key_to_string(k, n.branching()), scheme_to_json(s)))
        .collect();
    json!({ "depth": n.depth(), "branching": n.branching(), "entries": entries })
}

/// A sequence literal such as `[0,1]`.
pub fn parse_seq(text: &str) -> Result<Seq, FormatError> {
    Ok(serde_json::from_str(text)?)
}
