//! CART regression trees with exact, presorted split search.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_predict_input, Design};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Binary tree stored as a node arena; the root is node 0. Rows with
/// `x[feature] <= threshold` go left.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<Node>,
    pub n_features: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    /// Features drawn per node; `None` uses all of them.
    pub max_features: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: None,
        }
    }
}

impl RegressionTree {
    pub fn predict_row(&self, x: &Design, row: usize) -> f64 {
        let mut idx = 0;
        loop {
            match self.nodes[idx] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    idx = if x.get(row, feature) <= threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    pub fn predict(&self, x: &Design) -> Result<Vec<f64>> {
        check_predict_input(x, self.n_features)?;
        Ok((0..x.n_rows()).map(|r| self.predict_row(x, r)).collect())
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Grows a tree on `sample` (row indices into `x`, repeats allowed).
    ///
    /// Split gains are compared strictly, so among equal gains the lowest
    /// feature index and then the lowest threshold win. `leaf_value` maps the
    /// sample positions reaching a leaf to its output.
    pub fn fit(
        x: &Design,
        y: &[f64],
        sample: &[usize],
        params: &TreeParams,
        rng: &mut ChaCha8Rng,
        leaf_value: &dyn Fn(&[usize]) -> f64,
    ) -> RegressionTree {
        let ys: Vec<f64> = sample.iter().map(|&r| y[r]).collect();
        let sorted: Vec<Vec<usize>> = (0..x.n_cols())
            .map(|j| {
                let col = x.column(j);
                let mut pos: Vec<usize> = (0..sample.len()).collect();
                pos.sort_by(|&a, &b| col[sample[a]].total_cmp(&col[sample[b]]));
                pos
            })
            .collect();
        let mut builder = Builder {
            x,
            sample,
            ys: &ys,
            params,
            rng,
            leaf_value,
            nodes: Vec::new(),
            goes_left: vec![false; sample.len()],
        };
        let all: Vec<usize> = (0..sample.len()).collect();
        builder.grow(all, sorted, 0);
        RegressionTree {
            nodes: builder.nodes,
            n_features: x.n_cols(),
        }
    }
}

struct Builder<'a> {
    x: &'a Design,
    sample: &'a [usize],
    ys: &'a [f64],
    params: &'a TreeParams,
    rng: &'a mut ChaCha8Rng,
    leaf_value: &'a dyn Fn(&[usize]) -> f64,
    nodes: Vec<Node>,
    goes_left: Vec<bool>,
}

struct Candidate {
    feature: usize,
    threshold: f64,
    gain: f64,
}

impl Builder<'_> {
    fn grow(&mut self, positions: Vec<usize>, sorted: Vec<Vec<usize>>, depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { value: 0.0 });

        let n = positions.len();
        let depth_ok = self.params.max_depth.is_none_or(|d| depth < d);
        let split = if depth_ok && n >= self.params.min_samples_split.max(2) && !self.is_pure(&positions) {
            self.best_split(&sorted)
        } else {
            None
        };
        let Some(split) = split else {
            self.nodes[id] = Node::Leaf {
                value: (self.leaf_value)(&positions),
            };
            return id;
        };

        let col = self.x.column(split.feature);
        for &p in &positions {
            self.goes_left[p] = col[self.sample[p]] <= split.threshold;
        }
        let (left_pos, right_pos): (Vec<usize>, Vec<usize>) =
            positions.iter().partition(|&&p| self.goes_left[p]);
        let mut left_sorted = Vec::with_capacity(sorted.len());
        let mut right_sorted = Vec::with_capacity(sorted.len());
        for list in sorted {
            let (l, r): (Vec<usize>, Vec<usize>) = list.into_iter().partition(|&p| self.goes_left[p]);
            left_sorted.push(l);
            right_sorted.push(r);
        }
        let left = self.grow(left_pos, left_sorted, depth + 1);
        let right = self.grow(right_pos, right_sorted, depth + 1);
        self.nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }

    fn is_pure(&self, positions: &[usize]) -> bool {
        let first = self.ys[positions[0]];
        positions.iter().all(|&p| self.ys[p] == first)
    }

    fn best_split(&mut self, sorted: &[Vec<usize>]) -> Option<Candidate> {
        let p = sorted.len();
        let mut order: Vec<usize> = (0..p).collect();
        let draw = self.params.max_features.unwrap_or(p).clamp(1, p.max(1));
        if draw < p {
            order.shuffle(self.rng);
        }
        // The first `draw` features are mandatory; more are inspected only
        // while no valid split has been found.
        let mut best: Option<Candidate> = None;
        let mut start = 0;
        let mut end = draw.min(p);
        while start < p {
            let mut batch: Vec<usize> = order[start..end].to_vec();
            batch.sort_unstable();
            for f in batch {
                if let Some(c) = self.scan_feature(f, &sorted[f]) {
                    let better = match &best {
                        None => true,
                        Some(b) => {
                            c.gain > b.gain
                                || (c.gain == b.gain
                                    && (c.feature, c.threshold) < (b.feature, b.threshold))
                        }
                    };
                    if better {
                        best = Some(c);
                    }
                }
            }
            if best.is_some() {
                break;
            }
            start = end;
            end = (end + 1).min(p);
        }
        best
    }

    fn scan_feature(&self, feature: usize, list: &[usize]) -> Option<Candidate> {
        let n = list.len();
        let min_leaf = self.params.min_samples_leaf.max(1);
        let col = self.x.column(feature);
        let total: f64 = list.iter().map(|&p| self.ys[p]).sum();
        let sq: f64 = list.iter().map(|&p| self.ys[p] * self.ys[p]).sum();
        let parent = total * total / n as f64;
        let node_sse = (sq - parent).max(0.0);
        let tol = 1e-12 * node_sse.max(1e-300).max(1.0);
        let mut left_sum = 0.0;
        let mut best: Option<Candidate> = None;
        for i in 1..n {
            left_sum += self.ys[list[i - 1]];
            let a = col[self.sample[list[i - 1]]];
            let b = col[self.sample[list[i]]];
            if a == b || i < min_leaf || n - i < min_leaf {
                continue;
            }
            let right_sum = total - left_sum;
            let gain = left_sum * left_sum / i as f64 + right_sum * right_sum / (n - i) as f64
                - parent;
            if gain > tol && best.as_ref().is_none_or(|c| gain > c.gain) {
                let mut threshold = a + (b - a) / 2.0;
                if threshold >= b {
                    threshold = a;
                }
                best = Some(Candidate {
                    feature,
                    threshold,
                    gain,
                });
            }
        }
        best
    }
}

pub(crate) fn mean_leaf(ys: &[f64]) -> impl Fn(&[usize]) -> f64 + '_ {
    move |pos: &[usize]| pos.iter().map(|&p| ys[p]).sum::<f64>() / pos.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn fit_full(x: &Design, y: &[f64], params: &TreeParams) -> RegressionTree {
        let sample: Vec<usize> = (0..y.len()).collect();
        let ys: Vec<f64> = y.to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let leaf = mean_leaf(&ys);
        RegressionTree::fit(x, y, &sample, params, &mut rng, &leaf)
    }

    #[test]
    fn step_function_single_split() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = xs.iter().map(|&v| if v < 5.0 { 1.0 } else { 3.0 }).collect();
        let x = Design::new(vec![xs]).unwrap();
        let t = fit_full(&x, &y, &TreeParams::default());
        assert_eq!(t.depth(), 1);
        match t.nodes[0] {
            Node::Split { threshold, .. } => assert_eq!(threshold, 4.5),
            _ => panic!("root should split"),
        }
        assert_eq!(t.predict(&x).unwrap(), y);
    }

    #[test]
    fn tie_prefers_lowest_feature() {
        let a: Vec<f64> = vec![0., 0., 1., 1.];
        let x = Design::new(vec![a.clone(), a.clone()]).unwrap();
        let t = fit_full(&x, &[0., 0., 1., 1.], &TreeParams::default());
        assert!(matches!(t.nodes[0], Node::Split { feature: 0, .. }));
    }

    #[test]
    fn depth_limit_respected() {
        let xs: Vec<f64> = (0..64).map(f64::from).collect();
        let y: Vec<f64> = xs.iter().map(|v| v * v).collect();
        let x = Design::new(vec![xs]).unwrap();
        let t = fit_full(
            &x,
            &y,
            &TreeParams {
                max_depth: Some(3),
                ..TreeParams::default()
            },
        );
        assert_eq!(t.depth(), 3);
    }
}
