//! Multi-level Louvain modularity optimization.
//!
//! Each level runs local moving (nodes visited in a seeded shuffled order,
//! moved to the neighboring community with the largest modularity gain) and
//! then collapses communities into super-nodes. Levels repeat until a level
//! no longer improves modularity by more than the gain threshold.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::KnnGraph;

use super::{modularity, Partition};

/// Minimum modularity improvement per pass / level to keep iterating.
pub const DEFAULT_MIN_GAIN: f64 = 1e-7;

/// Louvain configuration.
#[derive(Debug, Clone)]
pub struct Louvain {
    resolution: f64,
    seed: u64,
    min_gain: f64,
    max_passes: usize,
    max_levels: usize,
}

impl Default for Louvain {
    fn default() -> Self {
        Self {
            resolution: 1.0,
            seed: 0,
            min_gain: DEFAULT_MIN_GAIN,
            max_passes: 1000,
            max_levels: 100,
        }
    }
}

/// Output of [`Louvain::run`].
#[derive(Debug, Clone)]
pub struct LouvainResult {
    pub partition: Partition,
    /// Objective (at the configured resolution) of the singleton start and
    /// after every level; non-decreasing.
    pub level_modularity: Vec<f64>,
    /// Accepted node moves over the whole run.
    pub moves: usize,
}

/// Working graph for one level. Super-nodes keep their internal weight as a
/// self-loop.
struct LevelGraph {
    adjacency: Vec<Vec<(usize, f64)>>,
    loops: Vec<f64>,
    strength: Vec<f64>,
}

impl LevelGraph {
    fn len(&self) -> usize {
        self.adjacency.len()
    }

    fn new(adjacency: Vec<Vec<(usize, f64)>>, loops: Vec<f64>) -> Self {
        let strength = adjacency
            .iter()
            .zip(&loops)
            .map(|(list, l)| list.iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * l)
            .collect();
        Self {
            adjacency,
            loops,
            strength,
        }
    }

    /// Objective of `community` on this level's graph.
    fn objective(&self, community: &[usize], count: usize, m: f64, resolution: f64) -> f64 {
        let mut internal = vec![0.0; count];
        let mut total = vec![0.0; count];
        for u in 0..self.len() {
            let c = community[u];
            total[c] += self.strength[u];
            internal[c] += self.loops[u];
            for &(v, w) in &self.adjacency[u] {
                if u < v && community[v] == c {
                    internal[c] += w;
                }
            }
        }
        internal
            .iter()
            .zip(&total)
            .map(|(l, t)| l / m - resolution * (t / (2.0 * m)).powi(2))
            .sum()
    }

    /// Collapses communities `0..count` into super-nodes.
    fn aggregate(&self, community: &[usize], count: usize) -> LevelGraph {
        let mut loops = vec![0.0; count];
        let mut between = Vec::new();
        for u in 0..self.len() {
            let cu = community[u];
            loops[cu] += self.loops[u];
            for &(v, w) in &self.adjacency[u] {
                if u >= v {
                    continue;
                }
                let cv = community[v];
                if cu == cv {
                    loops[cu] += w;
                } else {
                    between.push((cu.min(cv), cu.max(cv), w));
                }
            }
        }
        // stable sort keeps summation order fixed for identical inputs
        between.sort_by_key(|e| (e.0, e.1));
        let mut adjacency = vec![Vec::new(); count];
        let mut i = 0;
        while i < between.len() {
            let (a, b) = (between[i].0, between[i].1);
            let mut w = 0.0;
            while i < between.len() && (between[i].0, between[i].1) == (a, b) {
                w += between[i].2;
                i += 1;
            }
            adjacency[a].push((b, w));
            adjacency[b].push((a, w));
        }
        LevelGraph::new(adjacency, loops)
    }
}

/// Relabels to `0..count` in order of first appearance.
fn compact(community: &mut [usize]) -> usize {
    let mut remap = vec![usize::MAX; community.len()];
    let mut next = 0;
    for c in community.iter_mut() {
        if remap[*c] == usize::MAX {
            remap[*c] = next;
            next += 1;
        }
        *c = remap[*c];
    }
    next
}

impl Louvain {
    pub fn new() -> Self {
        Self::default()
    }

    /// Resolution `γ`; larger values favor smaller communities.
    pub fn with_resolution(mut self, resolution: f64) -> Self {
        self.resolution = resolution;
        self
    }

    /// Seed for the node visit order.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_min_gain(mut self, min_gain: f64) -> Self {
        self.min_gain = min_gain;
        self
    }

    pub fn run(&self, g: &KnnGraph) -> Result<LouvainResult> {
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "resolution must be positive, got {}",
                self.resolution
            )));
        }
        if g.edge_count() == 0 {
            return Err(Error::EmptyGraph);
        }
        let m = g.total_weight();

        // Isolated nodes take no part; work on the compact index of the rest.
        let active: Vec<usize> = (0..g.node_count())
            .filter(|&u| !g.neighbors(u).is_empty())
            .collect();
        let mut compact_index = vec![usize::MAX; g.node_count()];
        for (i, &u) in active.iter().enumerate() {
            compact_index[u] = i;
        }
        let adjacency = active
            .iter()
            .map(|&u| {
                g.neighbors(u)
                    .iter()
                    .map(|&(v, w)| (compact_index[v], w))
                    .collect()
            })
            .collect();
        let mut level = LevelGraph::new(adjacency, vec![0.0; active.len()]);

        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        // node_community[i] = community of active node i at the current level
        let mut node_community: Vec<usize> = (0..active.len()).collect();
        let singletons: Vec<usize> = (0..level.len()).collect();
        let mut history = vec![level.objective(&singletons, level.len(), m, self.resolution)];
        let mut total_moves = 0;

        for _ in 0..self.max_levels {
            let (mut community, moves) = self.local_moving(&level, m, &mut rng);
            if moves == 0 {
                break;
            }
            total_moves += moves;
            let count = compact(&mut community);
            let q = level.objective(&community, count, m, self.resolution);
            let previous = *history.last().expect("history starts non-empty");
            assert!(
                q >= previous - 1e-12 * previous.abs().max(1.0),
                "modularity decreased across a Louvain level: {previous} -> {q}"
            );
            history.push(q);
            for c in node_community.iter_mut() {
                *c = community[*c];
            }
            level = level.aggregate(&community, count);
            if q - previous <= self.min_gain || count == 1 {
                break;
            }
        }

        let mut full = vec![None; g.node_count()];
        for (i, &u) in active.iter().enumerate() {
            full[u] = Some(node_community[i]);
        }
        let partition = Partition::from_assignment(full);
        let q = modularity(g, &partition)?;
        Ok(LouvainResult {
            partition: partition.with_modularity(q),
            level_modularity: history,
            moves: total_moves,
        })
    }

    /// Greedy local moving on one level. Returns the community of each node
    /// and the number of accepted moves.
    fn local_moving(&self, g: &LevelGraph, m: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, usize) {
        let n = g.len();
        let mut community: Vec<usize> = (0..n).collect();
        let mut total: Vec<f64> = g.strength.clone();
        let mut link = vec![0.0; n];
        let mut seen = vec![false; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut order: Vec<usize> = (0..n).collect();
        let scale = self.resolution / (2.0 * m);
        let mut moves = 0;

        for _ in 0..self.max_passes {
            order.shuffle(rng);
            let mut pass_gain = 0.0;
            let mut pass_moves = 0;
            for &u in &order {
                let own = community[u];
                let k_u = g.strength[u];
                for &(v, w) in &g.adjacency[u] {
                    let c = community[v];
                    if !seen[c] {
                        seen[c] = true;
                        touched.push(c);
                    }
                    link[c] += w;
                }
                total[own] -= k_u;
                // gain of inserting u into c, in units of m·ΔQ
                let gain = |c: usize, link: &[f64]| link[c] - scale * total[c] * k_u;
                let stay = gain(own, &link);
                let mut best = own;
                let mut best_gain = stay;
                for &c in &touched {
                    if c == own {
                        continue;
                    }
                    let candidate = gain(c, &link);
                    if candidate > best_gain || (candidate == best_gain && best != own && c < best) {
                        best = c;
                        best_gain = candidate;
                    }
                }
                total[best] += k_u;
                if best != own {
                    let delta = (best_gain - stay) / m;
                    debug_assert!(delta > 0.0, "accepted Louvain move must raise modularity");
                    community[u] = best;
                    pass_gain += delta;
                    pass_moves += 1;
                }
                for &c in &touched {
                    link[c] = 0.0;
                    seen[c] = false;
                }
                touched.clear();
            }
            moves += pass_moves;
            if pass_moves == 0 || pass_gain <= self.min_gain {
                break;
            }
        }
        (community, moves)
    }
}

/// Louvain with the default gain threshold.
pub fn louvain(g: &KnnGraph, resolution: f64, seed: u64) -> Result<Partition> {
    Ok(Louvain::new()
        .with_resolution(resolution)
        .with_seed(seed)
        .run(g)?
        .partition)
}
