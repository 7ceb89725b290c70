//! Disease hierarchy files.
//!
//! Two tab-separated columns per line: disease id and one hierarchy
//! tree number (e.g. `C04.557`); a disease may appear on several lines,
//! one per tree number. Ancestry follows tree-number prefixes truncated
//! at `.`: the parent of `C04.557.337` is whichever disease owns
//! `C04.557`, with a synthetic internal node created when no disease
//! claims a prefix.

use crate::error::{Error, Result};
use crate::sim::DiseaseDag;
use std::collections::HashMap;
use std::fs;
use std::path::Path;

fn parent_prefix(tree: &str) -> Option<&str> {
    tree.rfind('.').map(|i| &tree[..i])
}

/// Load and validate a hierarchy file; the result is checked acyclic.
pub fn load_dag<P: AsRef<Path>>(path: P) -> Result<DiseaseDag> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let display = path.display().to_string();

    let mut rows: Vec<(String, String)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                path: display,
                line: lineno + 1,
                msg: format!("expected 2 tab-separated columns, got {}", fields.len()),
            });
        }
        let disease = fields[0].trim();
        let tree = fields[1].trim().to_uppercase();
        if disease.is_empty() {
            return Err(Error::Parse {
                path: display,
                line: lineno + 1,
                msg: "empty disease id".into(),
            });
        }
        if tree.is_empty() || tree.split('.').any(|seg| seg.is_empty()) {
            return Err(Error::Parse {
                path: display,
                line: lineno + 1,
                msg: format!("malformed tree number '{}'", fields[1].trim()),
            });
        }
        rows.push((disease.to_string(), tree));
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            path: display,
            line: 0,
            msg: "no hierarchy rows".into(),
        });
    }

    let mut dag = DiseaseDag::empty();
    // every tree number resolves to exactly one node; first claim wins
    let mut owner: HashMap<String, usize> = HashMap::new();
    for (disease, tree) in &rows {
        let node = dag.add_node(disease);
        if let Some(&prev) = owner.get(tree) {
            if prev != node {
                log::warn!(
                    "{display}: tree number {tree} claimed by both '{}' and '{disease}'; keeping the first",
                    dag.name(prev)
                );
            }
            continue;
        }
        owner.insert(tree.clone(), node);
    }

    // second pass: link each claimed tree number to its prefix chain,
    // creating synthetic nodes for unclaimed prefixes
    let claims: Vec<(usize, String)> = rows
        .iter()
        .map(|(disease, tree)| (dag.node(disease).unwrap(), tree.clone()))
        .collect();
    for (node, tree) in claims {
        let mut child = node;
        let mut prefix = parent_prefix(&tree).map(str::to_string);
        while let Some(p) = prefix {
            if let Some(&existing) = owner.get(&p) {
                dag.add_parent(child, existing);
                break;
            }
            let synthetic = dag.add_node(&p);
            owner.insert(p.clone(), synthetic);
            dag.add_parent(child, synthetic);
            child = synthetic;
            prefix = parent_prefix(&p).map(str::to_string);
        }
    }

    dag.check_acyclic()?;
    Ok(dag)
}
