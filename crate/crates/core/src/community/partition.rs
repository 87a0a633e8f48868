use crate::data::LabelVector;
use crate::error::Result;

/// Label written for nodes that belong to no cluster (isolated graph nodes).
pub const UNASSIGNED_LABEL: u32 = u32::MAX;

/// Cluster assignment per node. Isolated nodes carry no cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    assignment: Vec<Option<usize>>,
    cluster_count: usize,
    modularity: Option<f64>,
}

impl Partition {
    /// Relabels clusters to `0..C` in order of first appearance.
    pub fn from_assignment<I>(raw: I) -> Self
    where
        I: IntoIterator<Item = Option<usize>>,
    {
        let mut remap = std::collections::HashMap::new();
        let assignment: Vec<Option<usize>> = raw
            .into_iter()
            .map(|c| {
                c.map(|c| {
                    let next = remap.len();
                    *remap.entry(c).or_insert(next)
                })
            })
            .collect();
        Self {
            assignment,
            cluster_count: remap.len(),
            modularity: None,
        }
    }

    /// Every node assigned.
    pub fn from_labels(labels: &[usize]) -> Self {
        Self::from_assignment(labels.iter().map(|&c| Some(c)))
    }

    pub fn with_modularity(mut self, q: f64) -> Self {
        self.modularity = Some(q);
        self
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn cluster_count(&self) -> usize {
        self.cluster_count
    }

    /// Modularity on the graph this partition was computed for, if any.
    pub fn modularity(&self) -> Option<f64> {
        self.modularity
    }

    pub fn cluster_of(&self, node: usize) -> Option<usize> {
        self.assignment[node]
    }

    pub fn assignment(&self) -> &[Option<usize>] {
        &self.assignment
    }

    /// Node indices grouped by cluster, each group ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.cluster_count];
        for (node, c) in self.assignment.iter().enumerate() {
            if let Some(c) = c {
                groups[*c].push(node);
            }
        }
        groups
    }

    pub fn unassigned(&self) -> Vec<usize> {
        (0..self.len()).filter(|&u| self.assignment[u].is_none()).collect()
    }

    /// Cluster ids as labels, [`UNASSIGNED_LABEL`] for unassigned nodes.
    pub fn to_labels(&self) -> Result<LabelVector> {
        LabelVector::new(
            self.assignment
                .iter()
                .map(|c| c.map_or(UNASSIGNED_LABEL, |c| c as u32))
                .collect(),
        )
    }

    /// True when both partitions group the same nodes together.
    pub fn same_grouping(&self, other: &Partition) -> bool {
        if self.len() != other.len() || self.cluster_count != other.cluster_count {
            return false;
        }
        let mut forward = vec![None; self.cluster_count];
        for (a, b) in self.assignment.iter().zip(&other.assignment) {
            match (a, b) {
                (None, None) => {}
                (Some(a), Some(b)) => match forward[*a] {
                    None => forward[*a] = Some(*b),
                    Some(prev) if prev != *b => return false,
                    _ => {}
                },
                _ => return false,
            }
        }
        true
    }
}
