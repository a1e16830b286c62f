use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SplitRule {
    /// `value <= threshold` goes left. `bin` is the last bin on the left.
    Threshold { threshold: f64, bin: u16 },
    /// Categories (model dictionary ids, sorted) that go left.
    Categories { left: Vec<u32> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum Node {
    Split {
        feature: usize,
        rule: SplitRule,
        missing_left: bool,
        left: usize,
        right: usize,
        gain: f64,
        depth: usize,
    },
    Leaf {
        /// Already scaled by the learning rate.
        value: f64,
        depth: usize,
        count: usize,
    },
}

/// One regression tree; node 0 is the root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf(value: f64, count: usize) -> Self {
        Tree {
            nodes: vec![Node::Leaf {
                value,
                depth: 0,
                count,
            }],
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn depth(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| match n {
                Node::Split { depth, .. } | Node::Leaf { depth, .. } => *depth,
            })
            .max()
            .unwrap_or(0)
    }

    /// Walks from the root; `goes_left(feature, rule, missing_left)` decides each split.
    #[inline]
    pub(crate) fn leaf_by(&self, mut goes_left: impl FnMut(usize, &SplitRule, bool) -> bool) -> usize {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { .. } => return idx,
                Node::Split {
                    feature,
                    rule,
                    missing_left,
                    left,
                    right,
                    ..
                } => {
                    idx = if goes_left(*feature, rule, *missing_left) {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    pub(crate) fn leaf_value(&self, idx: usize) -> f64 {
        match self.nodes[idx] {
            Node::Leaf { value, .. } => value,
            Node::Split { .. } => unreachable!("not a leaf"),
        }
    }

    /// Leaf index reached by a row of bin codes.
    #[inline]
    pub(crate) fn leaf_for_bins(&self, bins: &[Vec<u16>], missing_bins: &[u16], row: usize) -> usize {
        self.leaf_by(|f, rule, missing_left| {
            let b = bins[f][row];
            if b == missing_bins[f] {
                return missing_left;
            }
            match rule {
                SplitRule::Threshold { bin, .. } => b <= *bin,
                SplitRule::Categories { left } => left.binary_search(&u32::from(b)).is_ok(),
            }
        })
    }

    /// Per-feature split gain summed over this tree.
    pub(crate) fn add_gains(&self, out: &mut [f64]) {
        for n in &self.nodes {
            if let Node::Split { feature, gain, .. } = n {
                out[*feature] += gain;
            }
        }
    }
}
