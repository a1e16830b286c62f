//! Leaf-wise tree growth over gradient histograms.

use super::tree::{Node, SplitRule, Tree};

/// Categorical features with more populated categories than this use
/// one-vs-rest splits instead of the sorted many-vs-many scan.
pub const MAX_SORTED_CATEGORIES: usize = 32;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct GradPair {
    pub g: f64,
    pub h: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Stats {
    pub g: f64,
    pub h: f64,
    pub n: f64,
}

impl Stats {
    #[inline]
    fn add(&mut self, o: &Stats) {
        self.g += o.g;
        self.h += o.h;
        self.n += o.n;
    }

    #[inline]
    fn sub(&self, o: &Stats) -> Stats {
        Stats {
            g: self.g - o.g,
            h: self.h - o.h,
            n: self.n - o.n,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum FeatureKind {
    Numeric,
    Categorical,
}

/// Static description of the binned features a tree is grown on.
pub(crate) struct FeatureLayout<'a> {
    pub bins: &'a [Vec<u16>],
    pub missing_bins: &'a [u16],
    pub kinds: &'a [FeatureKind],
    /// Threshold value for each numeric bin boundary.
    pub upper_bounds: &'a [Vec<f64>],
    offsets: Vec<usize>,
    total_bins: usize,
}

impl<'a> FeatureLayout<'a> {
    pub fn new(
        bins: &'a [Vec<u16>],
        missing_bins: &'a [u16],
        kinds: &'a [FeatureKind],
        upper_bounds: &'a [Vec<f64>],
    ) -> Self {
        let mut offsets = Vec::with_capacity(missing_bins.len());
        let mut total = 0;
        for &m in missing_bins {
            offsets.push(total);
            total += m as usize + 1;
        }
        Self {
            bins,
            missing_bins,
            kinds,
            upper_bounds,
            offsets,
            total_bins: total,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct GrowConfig {
    pub num_leaves: usize,
    pub max_depth: usize,
    pub min_data_in_leaf: usize,
    pub min_sum_hessian: f64,
    pub l2: f64,
    pub learning_rate: f64,
}

#[derive(Clone, Debug)]
enum Partition {
    Threshold(u16),
    /// Sorted bins that go left.
    Categories(Vec<u16>),
}

#[derive(Clone, Debug)]
struct SplitCandidate {
    feature: usize,
    gain: f64,
    partition: Partition,
    missing_left: bool,
    left: Stats,
    right: Stats,
}

struct OpenLeaf {
    node: usize,
    begin: usize,
    end: usize,
    depth: usize,
    hist: Vec<Stats>,
    best: Option<SplitCandidate>,
}

#[inline]
fn score(s: &Stats, l2: f64) -> f64 {
    let d = s.h + l2;
    if d > 0.0 { s.g * s.g / d } else { 0.0 }
}

pub(crate) fn leaf_value(s: &Stats, cfg: &GrowConfig) -> f64 {
    let d = s.h + cfg.l2;
    if d > 0.0 { -s.g / d * cfg.learning_rate } else { 0.0 }
}

fn build_hist(layout: &FeatureLayout, grads: &[GradPair], rows: &[u32], features: &[usize]) -> Vec<Stats> {
    let mut hist = vec![Stats::default(); layout.total_bins];
    for &f in features {
        let col = &layout.bins[f];
        let h = &mut hist[layout.offsets[f]..layout.offsets[f] + layout.missing_bins[f] as usize + 1];
        for &r in rows {
            let gp = grads[r as usize];
            let s = &mut h[col[r as usize] as usize];
            s.g += gp.g;
            s.h += gp.h;
            s.n += 1.0;
        }
    }
    hist
}

fn feasible(s: &Stats, cfg: &GrowConfig) -> bool {
    s.n >= cfg.min_data_in_leaf as f64 && s.h >= cfg.min_sum_hessian
}

/// Best split of one leaf across `features`; ties keep the lowest feature, then threshold.
fn find_best_split(
    layout: &FeatureLayout,
    hist: &[Stats],
    total: &Stats,
    features: &[usize],
    cfg: &GrowConfig,
) -> Option<SplitCandidate> {
    let parent = score(total, cfg.l2);
    let mut best: Option<SplitCandidate> = None;
    let consider = |cand_left: Stats, feature: usize, partition: &dyn Fn() -> Partition, missing_left: bool, best: &mut Option<SplitCandidate>| {
        let right = total.sub(&cand_left);
        if !feasible(&cand_left, cfg) || !feasible(&right, cfg) {
            return;
        }
        let gain = score(&cand_left, cfg.l2) + score(&right, cfg.l2) - parent;
        if gain > 0.0 && best.as_ref().is_none_or(|b| gain > b.gain) {
            *best = Some(SplitCandidate {
                feature,
                gain,
                partition: partition(),
                missing_left,
                left: cand_left,
                right,
            });
        }
    };

    for &f in features {
        let n_bins = layout.missing_bins[f] as usize;
        let h = &hist[layout.offsets[f]..layout.offsets[f] + n_bins + 1];
        let missing = h[n_bins];
        let directions: &[bool] = if missing.n > 0.0 { &[false, true] } else { &[false] };
        match layout.kinds[f] {
            FeatureKind::Numeric => {
                for &missing_left in directions {
                    let mut acc = if missing_left { missing } else { Stats::default() };
                    for (t, bin) in h[..n_bins.saturating_sub(1)].iter().enumerate() {
                        acc.add(bin);
                        consider(acc, f, &|| Partition::Threshold(t as u16), missing_left, &mut best);
                    }
                }
            }
            FeatureKind::Categorical => {
                let mut cats: Vec<u16> = (0..n_bins as u16).filter(|&b| h[b as usize].n > 0.0).collect();
                if cats.len() + usize::from(missing.n > 0.0) < 2 {
                    continue;
                }
                if cats.len() <= MAX_SORTED_CATEGORIES {
                    let ratio = |b: u16| {
                        let s = &h[b as usize];
                        if s.h > 0.0 { s.g / s.h } else { 0.0 }
                    };
                    cats.sort_by(|&a, &b| ratio(a).total_cmp(&ratio(b)).then(a.cmp(&b)));
                    for &missing_left in directions {
                        let mut acc = if missing_left { missing } else { Stats::default() };
                        let upto = if missing.n > 0.0 { cats.len() } else { cats.len() - 1 };
                        for i in 0..upto {
                            acc.add(&h[cats[i] as usize]);
                            let prefix = &cats[..=i];
                            consider(
                                acc,
                                f,
                                &|| {
                                    let mut left = prefix.to_vec();
                                    left.sort_unstable();
                                    Partition::Categories(left)
                                },
                                missing_left,
                                &mut best,
                            );
                        }
                    }
                } else {
                    for &missing_left in directions {
                        for &c in &cats {
                            let mut acc = h[c as usize];
                            if missing_left {
                                acc.add(&missing);
                            }
                            consider(acc, f, &|| Partition::Categories(vec![c]), missing_left, &mut best);
                        }
                    }
                }
            }
        }
    }
    best
}

#[inline]
fn goes_left(layout: &FeatureLayout, cand: &SplitCandidate, row: usize) -> bool {
    let b = layout.bins[cand.feature][row];
    if b == layout.missing_bins[cand.feature] {
        return cand.missing_left;
    }
    match &cand.partition {
        Partition::Threshold(t) => b <= *t,
        Partition::Categories(left) => left.binary_search(&b).is_ok(),
    }
}

/// Grows one tree on `rows` (consumed as scratch and reordered). Returns `None`
/// when the root cannot be split.
pub(crate) fn grow_tree(
    layout: &FeatureLayout,
    grads: &[GradPair],
    rows: &mut [u32],
    features: &[usize],
    cfg: &GrowConfig,
) -> Option<Tree> {
    let root_hist = build_hist(layout, grads, rows, features);
    let mut total = Stats::default();
    for &r in rows.iter() {
        let gp = grads[r as usize];
        total.g += gp.g;
        total.h += gp.h;
        total.n += 1.0;
    }
    let root_best = if cfg.max_depth > 0 {
        find_best_split(layout, &root_hist, &total, features, cfg)
    } else {
        None
    };
    root_best.as_ref()?;

    let mut tree = Tree {
        nodes: vec![Node::Leaf {
            value: leaf_value(&total, cfg),
            depth: 0,
            count: rows.len(),
        }],
    };
    let mut open = vec![OpenLeaf {
        node: 0,
        begin: 0,
        end: rows.len(),
        depth: 0,
        hist: root_hist,
        best: root_best,
    }];
    let mut n_leaves = 1;
    let mut scratch: Vec<u32> = Vec::with_capacity(rows.len());

    while n_leaves < cfg.num_leaves {
        let pick = open
            .iter()
            .enumerate()
            .filter_map(|(i, l)| l.best.as_ref().map(|b| (i, b.gain)))
            .fold(None::<(usize, f64)>, |acc, (i, g)| match acc {
                Some((_, bg)) if bg >= g => acc,
                _ => Some((i, g)),
            });
        let Some((idx, _)) = pick else { break };
        let leaf = open.swap_remove(idx);
        let cand = leaf.best.clone().expect("picked leaf has a split");

        // stable partition of the leaf's rows
        scratch.clear();
        let segment = &mut rows[leaf.begin..leaf.end];
        let mut write = 0;
        for i in 0..segment.len() {
            let r = segment[i];
            if goes_left(layout, &cand, r as usize) {
                segment[write] = r;
                write += 1;
            } else {
                scratch.push(r);
            }
        }
        segment[write..].copy_from_slice(&scratch);
        let mid = leaf.begin + write;

        let left_node = tree.nodes.len();
        let right_node = left_node + 1;
        let depth = leaf.depth + 1;
        tree.nodes.push(Node::Leaf {
            value: leaf_value(&cand.left, cfg),
            depth,
            count: mid - leaf.begin,
        });
        tree.nodes.push(Node::Leaf {
            value: leaf_value(&cand.right, cfg),
            depth,
            count: leaf.end - mid,
        });
        let rule = match &cand.partition {
            Partition::Threshold(t) => SplitRule::Threshold {
                threshold: layout.upper_bounds[cand.feature][*t as usize],
                bin: *t,
            },
            Partition::Categories(bins) => SplitRule::Categories {
                left: bins.iter().map(|&b| u32::from(b)).collect(),
            },
        };
        tree.nodes[leaf.node] = Node::Split {
            feature: cand.feature,
            rule,
            missing_left: cand.missing_left,
            left: left_node,
            right: right_node,
            gain: cand.gain,
            depth: leaf.depth,
        };
        n_leaves += 1;

        let can_split = depth < cfg.max_depth && n_leaves < cfg.num_leaves;
        let (small, large) = if mid - leaf.begin <= leaf.end - mid {
            ((leaf.begin, mid, left_node, cand.left), (mid, leaf.end, right_node, cand.right))
        } else {
            ((mid, leaf.end, right_node, cand.right), (leaf.begin, mid, left_node, cand.left))
        };
        if can_split {
            let small_hist = build_hist(layout, grads, &rows[small.0..small.1], features);
            let large_hist: Vec<Stats> = leaf.hist.iter().zip(&small_hist).map(|(p, s)| p.sub(s)).collect();
            for ((begin, end, node, stats), hist) in [(small, small_hist), (large, large_hist)] {
                let best = find_best_split(layout, &hist, &stats, features, cfg);
                open.push(OpenLeaf {
                    node,
                    begin,
                    end,
                    depth,
                    hist,
                    best,
                });
            }
            // keep creation order stable for tie-breaking
            open.sort_by_key(|l| l.node);
        }
    }
    Some(tree)
}
