//! Plain-text forest serialization.
//!
//! Layout:
//! ```text
//! RFQA-FOREST 1
//! layout rfqa-313-v1
//! seed 42
//! n_features 313
//! params n_trees=500 mtry=auto min_leaf=5 max_depth=none bootstrap=true
//! trees 500
//! tree 0 7
//! S 12 0.5
//! L 0.25
//! ...
//! ```
//! Nodes are written pre-order; every `S` line is followed by its left
//! subtree, then its right. Floats use the shortest representation that
//! parses back to the same bits, so a save/load cycle is lossless.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::forest::{ForestParams, RandomForestModel, TreeNode};

const MAGIC: &str = "RFQA-FOREST 1";

fn push_node(out: &mut String, node: &TreeNode) {
    let mut stack = vec![node];
    while let Some(n) = stack.pop() {
        match n {
            TreeNode::Leaf { value } => out.push_str(&format!("L {value}\n")),
            TreeNode::Split { feature, threshold, left, right } => {
                out.push_str(&format!("S {feature} {threshold}\n"));
                stack.push(right);
                stack.push(left);
            }
        }
    }
}

fn node_count(node: &TreeNode) -> usize {
    match node {
        TreeNode::Leaf { .. } => 1,
        TreeNode::Split { left, right, .. } => 1 + node_count(left) + node_count(right),
    }
}

pub fn forest_to_string(model: &RandomForestModel) -> String {
    let p = &model.params;
    let mtry = p.mtry.map_or("auto".to_string(), |m| m.to_string());
    let max_depth = p.max_depth.map_or("none".to_string(), |d| d.to_string());
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    out.push_str(&format!("layout {}\n", model.feature_layout_version));
    out.push_str(&format!("seed {}\n", model.seed));
    out.push_str(&format!("n_features {}\n", model.n_features));
    out.push_str(&format!(
        "params n_trees={} mtry={} min_leaf={} max_depth={} bootstrap={}\n",
        p.n_trees, mtry, p.min_leaf, max_depth, p.bootstrap
    ));
    out.push_str(&format!("trees {}\n", model.trees.len()));
    for (i, tree) in model.trees.iter().enumerate() {
        out.push_str(&format!("tree {} {}\n", i, node_count(tree)));
        push_node(&mut out, tree);
    }
    out
}

fn bad(msg: &str) -> Error {
    Error::ModelFormat(msg.to_string())
}

fn parse_kv<'a>(token: &'a str, key: &str) -> Result<&'a str> {
    token
        .strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| bad(&format!("expected {key}=... in params line")))
}

fn expect_field<'a>(line: Option<&'a str>, key: &str) -> Result<&'a str> {
    let line = line.ok_or_else(|| bad("unexpected end of file"))?;
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix(' '))
        .ok_or_else(|| bad(&format!("expected `{key} ...` line")))
}

fn parse_params(line: &str) -> Result<ForestParams> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() != 5 {
        return Err(bad("params line needs 5 fields"));
    }
    let n_trees = parse_kv(tokens[0], "n_trees")?.parse().map_err(|_| bad("bad n_trees"))?;
    let mtry_raw = parse_kv(tokens[1], "mtry")?;
    let mtry = if mtry_raw == "auto" {
        None
    } else {
        Some(mtry_raw.parse().map_err(|_| bad("bad mtry"))?)
    };
    let min_leaf = parse_kv(tokens[2], "min_leaf")?.parse().map_err(|_| bad("bad min_leaf"))?;
    let depth_raw = parse_kv(tokens[3], "max_depth")?;
    let max_depth = if depth_raw == "none" {
        None
    } else {
        Some(depth_raw.parse().map_err(|_| bad("bad max_depth"))?)
    };
    let bootstrap = match parse_kv(tokens[4], "bootstrap")? {
        "true" => true,
        "false" => false,
        _ => return Err(bad("bad bootstrap")),
    };
    Ok(ForestParams { n_trees, mtry, min_leaf, max_depth, bootstrap })
}

fn parse_node<'a, I: Iterator<Item = &'a str>>(
    lines: &mut I,
    n_features: usize,
    remaining: &mut usize,
) -> Result<TreeNode> {
    if *remaining == 0 {
        return Err(bad("tree has fewer nodes than declared"));
    }
    *remaining -= 1;
    let line = lines.next().ok_or_else(|| bad("unexpected end of file inside tree"))?;
    let mut parts = line.split_whitespace();
    match parts.next() {
        Some("L") => {
            let value: f64 = parts
                .next()
                .ok_or_else(|| bad("leaf without value"))?
                .parse()
                .map_err(|_| bad("bad leaf value"))?;
            if parts.next().is_some() {
                return Err(bad("trailing tokens on leaf line"));
            }
            if !value.is_finite() {
                return Err(bad("non-finite leaf value"));
            }
            Ok(TreeNode::Leaf { value })
        }
        Some("S") => {
            let feature: usize = parts
                .next()
                .ok_or_else(|| bad("split without feature"))?
                .parse()
                .map_err(|_| bad("bad split feature"))?;
            let threshold: f64 = parts
                .next()
                .ok_or_else(|| bad("split without threshold"))?
                .parse()
                .map_err(|_| bad("bad split threshold"))?;
            if parts.next().is_some() {
                return Err(bad("trailing tokens on split line"));
            }
            if feature >= n_features {
                return Err(bad("split feature out of range"));
            }
            if !threshold.is_finite() {
                return Err(bad("non-finite split threshold"));
            }
            let left = parse_node(lines, n_features, remaining)?;
            let right = parse_node(lines, n_features, remaining)?;
            Ok(TreeNode::Split { feature, threshold, left: Box::new(left), right: Box::new(right) })
        }
        _ => Err(bad("node line must start with S or L")),
    }
}

pub fn forest_from_str(text: &str) -> Result<RandomForestModel> {
    let mut lines = text.lines();
    if lines.next() != Some(MAGIC) {
        return Err(bad("missing RFQA-FOREST 1 header"));
    }
    let layout = expect_field(lines.next(), "layout")?.to_string();
    let seed: u64 = expect_field(lines.next(), "seed")?.parse().map_err(|_| bad("bad seed"))?;
    let n_features: usize =
        expect_field(lines.next(), "n_features")?.parse().map_err(|_| bad("bad n_features"))?;
    if n_features == 0 {
        return Err(bad("n_features must be positive"));
    }
    let params = parse_params(expect_field(lines.next(), "params")?)?;
    let n_trees: usize =
        expect_field(lines.next(), "trees")?.parse().map_err(|_| bad("bad tree count"))?;

    let mut trees = Vec::with_capacity(n_trees);
    for i in 0..n_trees {
        let header = expect_field(lines.next(), "tree")?;
        let mut parts = header.split_whitespace();
        let index: usize =
            parts.next().ok_or_else(|| bad("tree header"))?.parse().map_err(|_| bad("bad tree index"))?;
        let declared: usize = parts
            .next()
            .ok_or_else(|| bad("tree header missing node count"))?
            .parse()
            .map_err(|_| bad("bad node count"))?;
        if index != i {
            return Err(bad("tree indices out of order"));
        }
        let mut remaining = declared;
        let tree = parse_node(&mut lines, n_features, &mut remaining)?;
        if remaining != 0 {
            return Err(bad("tree has more nodes than its structure uses"));
        }
        trees.push(tree);
    }
    if lines.next().is_some() {
        return Err(bad("trailing content after last tree"));
    }
    Ok(RandomForestModel { trees, n_features, params, seed, feature_layout_version: layout })
}

pub fn save_forest(path: &Path, model: &RandomForestModel) -> Result<()> {
    fs::write(path, forest_to_string(model))?;
    Ok(())
}

pub fn load_forest(path: &Path) -> Result<RandomForestModel> {
    forest_from_str(&fs::read_to_string(path)?)
}
