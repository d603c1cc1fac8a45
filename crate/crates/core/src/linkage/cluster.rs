use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{Band, LinkageError, MatchCandidate, MatchDecision, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    /// Smallest member id.
    pub cluster_id: String,
    /// Sorted ascending.
    pub members: Vec<String>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Candidate ids that merge: accepted or auto-band, and rejected by no editor.
///
/// Each editor's latest decision per candidate counts; ties on timestamp go
/// to the later log entry.
pub fn effective_edges(
    candidates: &[MatchCandidate],
    decisions: &[MatchDecision],
) -> Result<BTreeSet<String>, LinkageError> {
    let known: HashMap<&str, &MatchCandidate> = candidates.iter().map(|c| (c.candidate_id.as_str(), c)).collect();
    let unknown: BTreeSet<String> = decisions
        .iter()
        .filter(|d| !known.contains_key(d.candidate_id.as_str()))
        .map(|d| d.candidate_id.clone())
        .collect();
    if !unknown.is_empty() {
        return Err(LinkageError::UnknownCandidates(unknown.into_iter().collect()));
    }

    let mut latest: HashMap<(&str, &str), &MatchDecision> = HashMap::new();
    for d in decisions {
        let key = (d.candidate_id.as_str(), d.editor.as_str());
        match latest.get(&key) {
            Some(prev) if prev.timestamp > d.timestamp => {}
            _ => {
                latest.insert(key, d);
            }
        }
    }
    let mut accepted = BTreeSet::new();
    let mut rejected = BTreeSet::new();
    for ((cid, _), d) in latest {
        match d.verdict {
            Verdict::Accept => accepted.insert(cid),
            Verdict::Reject => rejected.insert(cid),
        };
    }
    Ok(candidates
        .iter()
        .map(|c| c.candidate_id.as_str())
        .filter(|cid| !rejected.contains(cid))
        .filter(|cid| accepted.contains(cid) || known[cid].band == Band::Auto)
        .map(str::to_string)
        .collect())
}

/// Partitions `items` (plus any candidate endpoints) into clusters.
/// Clusters are sorted by id.
pub fn apply_decisions(
    items: &[String],
    candidates: &[MatchCandidate],
    decisions: &[MatchDecision],
) -> Result<Vec<Cluster>, LinkageError> {
    let edges = effective_edges(candidates, decisions)?;

    let mut ids: BTreeSet<&str> = items.iter().map(String::as_str).collect();
    for c in candidates {
        ids.insert(&c.left);
        ids.insert(&c.right);
    }
    let ids: Vec<&str> = ids.into_iter().collect();
    let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (*s, i)).collect();

    let mut uf = UnionFind::new(ids.len());
    for c in candidates.iter().filter(|c| edges.contains(&c.candidate_id)) {
        uf.union(index[c.left.as_str()], index[c.right.as_str()]);
    }
    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (i, id) in ids.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().push(id.to_string());
    }
    // ids are sorted, so each group is sorted and the root is its smallest member
    Ok(groups.into_values().map(|members| Cluster { cluster_id: members[0].clone(), members }).collect())
}
