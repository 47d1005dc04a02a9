use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorize::FactorPartition;
use crate::qstate::QubitSet;
use crate::scalar::Real;

/// Result of the jump into time `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub n: u64,
    pub eigenvalues: Vec<f64>,
    pub outcome_index: Vec<usize>,
    /// Born probability of the outcome, evaluated before the jump.
    pub probability_at_jump: f64,
}

/// Factor blocks of the state at `time`, sorted by first qubit. A block's
/// id is its position in `blocks`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionSnapshot {
    pub time: u64,
    pub blocks: Vec<QubitSet>,
}

/// Block `parent` at `time` overlaps block `child` at `time + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AncestryEdge {
    pub time: u64,
    pub parent: usize,
    pub child: usize,
}

/// Which past entries survive an update.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetentionPolicy {
    #[default]
    Full,
    /// Keep only entries from the most recent `k ≥ 1` time slices.
    KeepLast(usize),
}

/// In-model memory: outcomes, partition snapshots, ancestry edges and
/// unlink declarations.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InformationContent {
    records: Vec<OutcomeRecord>,
    partitions: Vec<PartitionSnapshot>,
    ancestry: Vec<AncestryEdge>,
    unlinked_groups: Vec<QubitSet>,
    latest_time: u64,
}

impl InformationContent {
    /// Empty memory at time 0.
    pub fn new() -> Self {
        Self::default()
    }

    /// Memory at time 0 holding the initial partition.
    pub fn with_initial_partition(blocks: Vec<QubitSet>) -> Self {
        Self {
            partitions: vec![PartitionSnapshot { time: 0, blocks }],
            ..Self::default()
        }
    }

    pub fn records(&self) -> &[OutcomeRecord] {
        &self.records
    }

    pub fn partitions(&self) -> &[PartitionSnapshot] {
        &self.partitions
    }

    pub fn ancestry(&self) -> &[AncestryEdge] {
        &self.ancestry
    }

    pub fn unlinked_groups(&self) -> &[QubitSet] {
        &self.unlinked_groups
    }

    pub fn latest_time(&self) -> u64 {
        self.latest_time
    }

    pub fn latest_partition(&self) -> Option<&PartitionSnapshot> {
        self.partitions.last().filter(|p| p.time == self.latest_time)
    }

    /// Group containing qubit `q`, if any groups are declared.
    pub fn group_of(&self, q: usize) -> Option<usize> {
        self.unlinked_groups.iter().position(|g| g.contains(q))
    }

    /// Declares `groups` mutually isolated. Each group must be a union of
    /// the `current` factor blocks, and there must be at least two groups.
    pub fn unlink(&mut self, mut groups: Vec<QubitSet>, current: &[QubitSet]) -> Result<()> {
        if !self.unlinked_groups.is_empty() {
            return Err(Error::Unlink("groups are already unlinked".into()));
        }
        if current.len() < 2 {
            return Err(Error::Unlink("the state is a single factor".into()));
        }
        if groups.len() < 2 {
            return Err(Error::Unlink(format!("need at least two groups, got {}", groups.len())));
        }
        let num_qubits = current.iter().map(|b| b.len()).sum();
        crate::qstate::check_partition(&groups, num_qubits).map_err(|e| Error::Unlink(e.to_string()))?;
        for block in current {
            if !groups.iter().any(|g| block.is_subset(g)) {
                return Err(Error::Unlink(format!("factor block {block} straddles two groups")));
            }
        }
        groups.sort_by_key(|g| g.first());
        self.unlinked_groups = groups;
        Ok(())
    }
}

/// Appends `outcome` and the new partition snapshot, links every block of
/// the previous snapshot to each overlapping block of the new one, and then
/// applies `policy`. Unlinked groups are never dropped.
pub fn update_information<T: Real>(
    old: &InformationContent,
    outcome: OutcomeRecord,
    new_partition: &FactorPartition<T>,
    policy: RetentionPolicy,
) -> Result<InformationContent> {
    let expected = old.latest_time + 1;
    if outcome.n != expected {
        return Err(Error::TimeMismatch {
            expected,
            found: outcome.n,
        });
    }
    if policy == RetentionPolicy::KeepLast(0) {
        return Err(Error::InvalidArgument("retention window must be at least 1".into()));
    }
    let mut next = old.clone();
    let blocks = new_partition.blocks().to_vec();
    if let Some(prev) = old.latest_partition() {
        for (parent, p) in prev.blocks.iter().enumerate() {
            for (child, c) in blocks.iter().enumerate() {
                if p.intersects(c) {
                    next.ancestry.push(AncestryEdge {
                        time: old.latest_time,
                        parent,
                        child,
                    });
                }
            }
        }
    }
    next.records.push(outcome);
    next.partitions.push(PartitionSnapshot { time: expected, blocks });
    next.latest_time = expected;

    if let RetentionPolicy::KeepLast(k) = policy {
        let oldest = expected.saturating_sub(k as u64 - 1);
        next.records.retain(|r| r.n >= oldest);
        next.partitions.retain(|p| p.time >= oldest);
        next.ancestry.retain(|e| e.time >= oldest);
    }
    Ok(next)
}
