//! Feature dependency graphs from permutation importance.
//!
//! For every feature a regressor is trained on all other features; an edge
//! `i → x` means shuffling `i` in a held-out set costs the model at least
//! `min_importance` R². The graph's predecessor closure becomes the
//! dependency dictionary that restricts which columns each imputer may see.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{IqaError, Result};
use crate::estimators::{permutation_importance, Design, EstimatorSpec, Regressor};
use crate::imputers::{simple_statistic, SimpleStrategy};
use crate::metrics::{r2, ScorePair};
use crate::seed::derive_seed;
use crate::table::Table;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: String,
    pub to: String,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphParams {
    #[serde(default = "default_top_n")]
    pub top_n: usize,
    #[serde(default = "default_min_importance")]
    pub min_importance: f64,
    #[serde(default = "default_holdout")]
    pub holdout: f64,
    #[serde(default = "default_repeats")]
    pub n_repeats: usize,
    /// Targets with fewer usable rows get no incoming edges.
    #[serde(default = "default_min_rows")]
    pub min_rows: usize,
    #[serde(default = "default_graph_estimator")]
    pub estimator: EstimatorSpec,
    /// Taken from the run seed, never from serialised settings.
    #[serde(skip)]
    pub seed: u64,
}

fn default_top_n() -> usize {
    8
}
fn default_min_importance() -> f64 {
    0.01
}
fn default_holdout() -> f64 {
    0.25
}
fn default_repeats() -> usize {
    5
}
fn default_min_rows() -> usize {
    20
}
fn default_graph_estimator() -> EstimatorSpec {
    EstimatorSpec::random_forest(50)
}

impl Default for GraphParams {
    fn default() -> Self {
        GraphParams {
            top_n: default_top_n(),
            min_importance: default_min_importance(),
            holdout: default_holdout(),
            n_repeats: default_repeats(),
            min_rows: default_min_rows(),
            estimator: default_graph_estimator(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DependencyGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<Edge>,
    pub top_n: usize,
    pub min_importance: f64,
    /// Per-node notes, e.g. why a node received no incoming edges.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub flags: BTreeMap<String, String>,
}

impl DependencyGraph {
    pub fn new(nodes: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        let known: BTreeSet<&str> = nodes.iter().map(String::as_str).collect();
        for e in &edges {
            if e.from == e.to {
                return Err(IqaError::invalid(format!("self-edge on {:?}", e.from)));
            }
            if !known.contains(e.from.as_str()) || !known.contains(e.to.as_str()) {
                return Err(IqaError::invalid(format!(
                    "edge {:?} -> {:?} references an unknown node",
                    e.from, e.to
                )));
            }
        }
        Ok(DependencyGraph {
            nodes,
            edges,
            top_n: usize::MAX,
            min_importance: f64::NEG_INFINITY,
            flags: BTreeMap::new(),
        })
    }

    /// Incoming edges of `node`.
    pub fn predecessors<'a>(&'a self, node: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.to == node)
    }
}

/// Feature → ordered predecessor list, serialised as a plain JSON object of
/// arrays.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DependencyDict(pub BTreeMap<String, Vec<String>>);

impl DependencyDict {
    /// Predecessors of `feature`; empty when absent.
    pub fn get(&self, feature: &str) -> &[String] {
        self.0.get(feature).map_or(&[], Vec::as_slice)
    }

    pub fn validate(&self) -> Result<()> {
        for (k, list) in &self.0 {
            let mut seen = BTreeSet::new();
            for v in list {
                if v == k {
                    return Err(IqaError::invalid(format!("{k:?} depends on itself")));
                }
                if !seen.insert(v) {
                    return Err(IqaError::invalid(format!("{k:?} lists {v:?} twice")));
                }
            }
        }
        Ok(())
    }
}

struct TargetOutcome {
    edges: Vec<Edge>,
    flag: Option<String>,
}

fn mode_filled(t: &Table, name: &str, rows: &[usize]) -> Result<Vec<f64>> {
    let c = t.column(name)?;
    let obs = c.observed();
    let fill = if obs.is_empty() {
        0.0
    } else {
        simple_statistic(&obs, SimpleStrategy::Mode)
    };
    Ok(rows.iter().map(|&r| c.get(r).unwrap_or(fill)).collect())
}

fn target_edges(t: &Table, target_idx: usize, params: &GraphParams) -> Result<TargetOutcome> {
    let names = t.names();
    let target = names[target_idx];
    let none = |flag: &str| {
        Ok(TargetOutcome {
            edges: Vec::new(),
            flag: Some(flag.to_string()),
        })
    };
    let mut rows = t.column(target)?.observed_rows();
    if rows.len() < params.min_rows.max(4) || names.len() < 2 {
        return none("insufficient_rows");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(params.seed, &[target_idx as u64]));
    rows.shuffle(&mut rng);
    let n_test = ((rows.len() as f64 * params.holdout).ceil() as usize).clamp(2, rows.len() - 2);
    let (test_rows, train_rows) = rows.split_at(n_test);

    let predictors: Vec<&str> = names.iter().copied().filter(|&n| n != target).collect();
    let design = |rs: &[usize]| -> Result<Design> {
        let cols = predictors
            .iter()
            .map(|p| mode_filled(t, p, rs))
            .collect::<Result<Vec<_>>>()?;
        Design::with_rows(cols, rs.len())
    };
    let y = t.column(target)?;
    let y_train: Vec<f64> = train_rows.iter().map(|&r| y.values[r]).collect();
    let y_test: Vec<f64> = test_rows.iter().map(|&r| y.values[r]).collect();
    let model = params.estimator.fit(
        &design(train_rows)?,
        &y_train,
        derive_seed(params.seed, &[target_idx as u64, 1]),
    )?;
    let x_test = design(test_rows)?;
    let scorer = |a: &[f64], b: &[f64]| r2(&ScorePair::new(a, b));
    let baseline = match scorer(&y_test, &model.predict(&x_test)?) {
        Ok(s) => s,
        Err(IqaError::DegenerateInput(_)) => return none("constant_target"),
        Err(e) => return Err(e),
    };
    if baseline <= 0.0 {
        return none("uninformative_model");
    }
    let importance = permutation_importance(
        &model,
        &x_test,
        &y_test,
        scorer,
        derive_seed(params.seed, &[target_idx as u64, 2]),
        params.n_repeats,
    )?;
    let mut ranked: Vec<(usize, f64)> = importance.into_iter().enumerate().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let edges = ranked
        .into_iter()
        .filter(|&(_, w)| w >= params.min_importance)
        .take(params.top_n)
        .map(|(i, w)| Edge {
            from: predictors[i].to_string(),
            to: target.to_string(),
            weight: w,
        })
        .collect();
    Ok(TargetOutcome { edges, flag: None })
}

/// Builds the dependency graph of every column of `t`.
pub fn build_dependency_graph(t: &Table, params: &GraphParams) -> Result<DependencyGraph> {
    if !(0.0..1.0).contains(&params.holdout) || params.holdout == 0.0 {
        return Err(IqaError::invalid("holdout fraction must be in (0, 1)"));
    }
    let outcomes: Vec<TargetOutcome> = (0..t.n_cols())
        .into_par_iter()
        .map(|i| target_edges(t, i, params))
        .collect::<Result<_>>()?;
    let nodes: Vec<String> = t.names().iter().map(|s| s.to_string()).collect();
    let mut edges = Vec::new();
    let mut flags = BTreeMap::new();
    for (name, outcome) in nodes.iter().zip(outcomes) {
        edges.extend(outcome.edges);
        if let Some(f) = outcome.flag {
            flags.insert(name.clone(), f);
        }
    }
    Ok(DependencyGraph {
        nodes,
        edges,
        top_n: params.top_n,
        min_importance: params.min_importance,
        flags,
    })
}

/// Breadth-first predecessor closure of every node.
///
/// Direct predecessors come first, by descending edge weight (ties by
/// name); each later BFS layer follows in name order. The node itself is
/// never listed.
pub fn transitive_dependencies(g: &DependencyGraph) -> DependencyDict {
    let mut incoming: BTreeMap<&str, Vec<&Edge>> = BTreeMap::new();
    for e in &g.edges {
        incoming.entry(e.to.as_str()).or_default().push(e);
    }
    let mut dict = BTreeMap::new();
    for node in &g.nodes {
        let mut seen: BTreeSet<&str> = BTreeSet::from([node.as_str()]);
        let mut list: Vec<String> = Vec::new();
        let mut direct: Vec<&Edge> = incoming.get(node.as_str()).cloned().unwrap_or_default();
        direct.sort_by(|a, b| b.weight.total_cmp(&a.weight).then(a.from.cmp(&b.from)));
        let mut layer: Vec<&str> = Vec::new();
        for e in direct {
            if seen.insert(e.from.as_str()) {
                layer.push(e.from.as_str());
            }
        }
        while !layer.is_empty() {
            list.extend(layer.iter().map(|s| s.to_string()));
            let mut next: BTreeSet<&str> = BTreeSet::new();
            for n in &layer {
                for e in incoming.get(n).into_iter().flatten() {
                    if !seen.contains(e.from.as_str()) {
                        next.insert(e.from.as_str());
                    }
                }
            }
            seen.extend(next.iter().copied());
            layer = next.into_iter().collect();
        }
        dict.insert(node.clone(), list);
    }
    DependencyDict(dict)
}

/// Projects `t` onto `Δ[target] ∪ {target}`, predecessors first.
pub fn restrict_training_view(t: &Table, target: &str, dict: &DependencyDict) -> Result<Table> {
    let mut cols: Vec<&str> = dict.get(target).iter().map(String::as_str).collect();
    cols.push(target);
    t.select(&cols)
}
