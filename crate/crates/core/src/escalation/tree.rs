//! Layer-by-layer construction of escalator trees with JSONL checkpoints.

use std::collections::{BTreeSet, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{dedup_classes, escalation_candidates, truant, TargetSet, Truant};
use crate::error::{Error, Result};
use crate::forms::{validate_gram, QuadraticForm};
use crate::local::{locally_missed_classes, LocalRepresentation, SquareclassProfile};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NodeStatus {
    Truant { t: u64 },
    UniversalUpTo { bound: u64 },
    /// Fails to represent `missed` (the least such member of S) over some Z_p.
    LocallyDeficient { missed: u64, profile: SquareclassProfile },
}

impl NodeStatus {
    pub fn truant(&self) -> Option<u64> {
        match self {
            NodeStatus::Truant { t } => Some(*t),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscalatorNode {
    pub id: usize,
    pub dim: usize,
    pub gram: Vec<Vec<i64>>,
    pub parent: Option<usize>,
    /// Norm of the adjoined vector.
    pub escalated_by: Option<u64>,
    pub auxiliary: bool,
    pub status: NodeStatus,
}

impl EscalatorNode {
    pub fn form(&self) -> Result<QuadraticForm> {
        validate_gram(self.gram.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeConfig {
    pub target: TargetSet,
    pub max_dim: usize,
    /// Truant search bound per node.
    pub node_bound: u64,
    /// Dimension from which locally deficient nodes are detected and replaced by
    /// auxiliary escalations of their parent.
    pub aux_from_dim: usize,
    pub budget: Option<Duration>,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig { target: TargetSet::OddPositive, max_dim: 3, node_bound: 10_000, aux_from_dim: 4, budget: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscalationTree {
    pub nodes: Vec<EscalatorNode>,
    pub complete_layers: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSummary {
    pub dim: usize,
    pub nodes: usize,
    pub truant: usize,
    pub universal: usize,
    pub locally_deficient: usize,
    pub auxiliary: usize,
}

impl EscalationTree {
    pub fn layer(&self, dim: usize) -> impl Iterator<Item = &EscalatorNode> {
        self.nodes.iter().filter(move |n| n.dim == dim)
    }

    /// Number of escalators in a layer, excluding locally deficient nodes.
    pub fn layer_count(&self, dim: usize) -> usize {
        self.layer(dim).filter(|n| !matches!(n.status, NodeStatus::LocallyDeficient { .. })).count()
    }

    pub fn summaries(&self) -> Vec<LayerSummary> {
        let dims: BTreeSet<usize> = self.nodes.iter().map(|n| n.dim).collect();
        dims.into_iter()
            .map(|d| {
                let l: Vec<&EscalatorNode> = self.layer(d).collect();
                LayerSummary {
                    dim: d,
                    nodes: self.layer_count(d),
                    truant: l.iter().filter(|n| matches!(n.status, NodeStatus::Truant { .. })).count(),
                    universal: l.iter().filter(|n| matches!(n.status, NodeStatus::UniversalUpTo { .. })).count(),
                    locally_deficient: l.iter().filter(|n| matches!(n.status, NodeStatus::LocallyDeficient { .. })).count(),
                    auxiliary: l.iter().filter(|n| n.auxiliary).count(),
                }
            })
            .collect()
    }

    pub fn write_layer_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "dim,nodes,truant,universal,locally_deficient,auxiliary")?;
        for s in self.summaries() {
            writeln!(w, "{},{},{},{},{},{}", s.dim, s.nodes, s.truant, s.universal, s.locally_deficient, s.auxiliary)?;
        }
        Ok(())
    }

    /// One JSON object per node.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for n in &self.nodes {
            writeln!(w, "{}", serde_json::to_string(n)?)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Record {
    Node(EscalatorNode),
    LayerComplete { layer_complete: usize },
}

fn load_checkpoint(path: &Path) -> Result<EscalationTree> {
    let mut pending: Vec<EscalatorNode> = Vec::new();
    let mut tree = EscalationTree::default();
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<Record>(&line)? {
            Record::Node(n) => pending.push(n),
            Record::LayerComplete { layer_complete } => {
                tree.nodes.append(&mut pending);
                tree.complete_layers = layer_complete + 1;
            }
        }
    }
    Ok(tree)
}

fn append_layer(path: &Path, nodes: &[EscalatorNode], dim: usize) -> Result<()> {
    let mut w = BufWriter::new(OpenOptions::new().create(true).append(true).open(path)?);
    for n in nodes {
        writeln!(w, "{}", serde_json::to_string(&Record::Node(n.clone()))?)?;
    }
    writeln!(w, "{}", serde_json::to_string(&Record::LayerComplete { layer_complete: dim })?)?;
    w.flush()?;
    Ok(())
}

fn status_of(q: &QuadraticForm, cfg: &TreeConfig, dim: usize) -> Result<NodeStatus> {
    if dim >= cfg.aux_from_dim {
        let lr = LocalRepresentation::new(q);
        if let Some(missed) = cfg.target.up_to(cfg.node_bound).into_iter().find(|&n| !lr.represents(n)) {
            return Ok(NodeStatus::LocallyDeficient { missed, profile: locally_missed_classes(q) });
        }
    }
    Ok(match truant(q, &cfg.target, cfg.node_bound)? {
        Truant::Found { t } => NodeStatus::Truant { t },
        Truant::NoneUpTo { bound } => NodeStatus::UniversalUpTo { bound },
    })
}

struct Candidate {
    form: QuadraticForm,
    parent: usize,
    t: u64,
    auxiliary: bool,
}

fn expand(parents: &[(usize, QuadraticForm, u64)], auxiliary: bool) -> Vec<Candidate> {
    parents
        .iter()
        .flat_map(|(id, q, t)| {
            escalation_candidates(q, *t)
                .into_iter()
                .map(move |form| Candidate { form, parent: *id, t: *t, auxiliary })
        })
        .collect()
}

/// Keeps one candidate per isometry class, skipping classes already in `existing`.
fn dedup_candidates(existing: &[QuadraticForm], cands: Vec<Candidate>) -> Vec<Candidate> {
    let n_existing = existing.len();
    let mut all: Vec<QuadraticForm> = existing.to_vec();
    all.extend(cands.iter().map(|c| c.form.clone()));
    let kept = dedup_classes(all);
    // dedup_classes keeps first representatives in order, so the survivors past the existing
    // prefix are the new classes; match them back to candidates by Gram matrix.
    let mut by_gram: HashMap<Vec<Vec<i64>>, usize> = HashMap::new();
    for (i, c) in cands.iter().enumerate() {
        by_gram.entry(c.form.gram().to_vec()).or_insert(i);
    }
    let mut cands: Vec<Option<Candidate>> = cands.into_iter().map(Some).collect();
    kept[n_existing..]
        .iter()
        .map(|f| cands[by_gram[f.gram()]].take().expect("unique representative"))
        .collect()
}

/// Builds the tree up to `cfg.max_dim`, resuming from and appending to `checkpoint`.
pub fn build_tree(cfg: &TreeConfig, checkpoint: Option<&Path>) -> Result<EscalationTree> {
    let start = Instant::now();
    let mut tree = match checkpoint {
        Some(p) if p.exists() => load_checkpoint(p)?,
        _ => EscalationTree::default(),
    };
    let over_budget = |tree: &EscalationTree| -> Result<()> {
        if let Some(b) = cfg.budget {
            if start.elapsed() > b {
                return Err(Error::BudgetExceeded { certified_through: tree.complete_layers as u64 });
            }
        }
        Ok(())
    };
    if tree.complete_layers == 0 {
        let zero = QuadraticForm::zero();
        let node = EscalatorNode {
            id: 0,
            dim: 0,
            gram: Vec::new(),
            parent: None,
            escalated_by: None,
            auxiliary: false,
            status: status_of(&zero, cfg, 0)?,
        };
        if let Some(p) = checkpoint {
            append_layer(p, std::slice::from_ref(&node), 0)?;
        }
        tree.nodes.push(node);
        tree.complete_layers = 1;
    }
    for dim in tree.complete_layers..=cfg.max_dim {
        over_budget(&tree)?;
        let parents: Vec<(usize, QuadraticForm, u64)> = tree
            .layer(dim - 1)
            .filter_map(|n| n.status.truant().map(|t| (n.id, n.form().expect("stored form"), t)))
            .collect();
        let basic = dedup_candidates(&[], expand(&parents, false));
        over_budget(&tree)?;
        let statuses: Vec<Result<NodeStatus>> = basic.par_iter().map(|c| status_of(&c.form, cfg, dim)).collect();
        let mut layer: Vec<(Candidate, NodeStatus)> = Vec::with_capacity(basic.len());
        for (c, s) in basic.into_iter().zip(statuses) {
            layer.push((c, s?));
        }
        // Auxiliary escalations: the parent of a locally deficient node escalated by the
        // least member of S the node misses locally.
        let mut aux_parents: Vec<(usize, QuadraticForm, u64)> = Vec::new();
        for (c, s) in &layer {
            if let NodeStatus::LocallyDeficient { missed, .. } = s {
                let key = (c.parent, *missed);
                if !aux_parents.iter().any(|(p, _, t)| (*p, *t) == key) {
                    let pf = tree.nodes[c.parent].form()?;
                    aux_parents.push((c.parent, pf, *missed));
                }
            }
        }
        if !aux_parents.is_empty() {
            let existing: Vec<QuadraticForm> = layer.iter().map(|(c, _)| c.form.clone()).collect();
            let aux = dedup_candidates(&existing, expand(&aux_parents, true));
            let statuses: Vec<Result<NodeStatus>> = aux.par_iter().map(|c| status_of(&c.form, cfg, dim)).collect();
            for (c, s) in aux.into_iter().zip(statuses) {
                layer.push((c, s?));
            }
        }
        let base = tree.nodes.len();
        let nodes: Vec<EscalatorNode> = layer
            .into_iter()
            .enumerate()
            .map(|(i, (c, status))| EscalatorNode {
                id: base + i,
                dim,
                gram: c.form.gram().to_vec(),
                parent: Some(c.parent),
                escalated_by: Some(c.t),
                auxiliary: c.auxiliary,
                status,
            })
            .collect();
        if let Some(p) = checkpoint {
            append_layer(p, &nodes, dim)?;
        }
        tree.nodes.extend(nodes);
        tree.complete_layers = dim + 1;
    }
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_layers() {
        let cfg = TreeConfig { max_dim: 2, node_bound: 200, ..Default::default() };
        let tree = build_tree(&cfg, None).unwrap();
        assert_eq!((0..=2).map(|d| tree.layer_count(d)).collect::<Vec<_>>(), vec![1, 1, 4]);
        assert_eq!(super::super::critical_integers(&tree), vec![1, 3, 5, 7]);
        let mut csv = Vec::new();
        tree.write_layer_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().starts_with("dim,nodes"));
    }

    #[test]
    fn checkpoint_resume() {
        let dir = std::env::temp_dir().join(format!("odduniv-tree-{}", std::process::id()));
        let _ = std::fs::remove_file(&dir);
        let cfg = TreeConfig { max_dim: 1, node_bound: 200, ..Default::default() };
        let t1 = build_tree(&cfg, Some(&dir)).unwrap();
        let cfg2 = TreeConfig { max_dim: 2, ..cfg };
        let t2 = build_tree(&cfg2, Some(&dir)).unwrap();
        assert_eq!(&t2.nodes[..t1.nodes.len()], &t1.nodes[..]);
        assert_eq!(t2.layer_count(2), 4);
        let again = load_checkpoint(&dir).unwrap();
        assert_eq!(again, t2);
        std::fs::remove_file(&dir).unwrap();
    }
}
