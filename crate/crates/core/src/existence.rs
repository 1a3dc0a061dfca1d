//! Existence of maps `P^n_p -> P^N_q` and their admissible patterns `(K, sigma)`.
//!
//! A pattern assigns some target slots `k` with `q_k >= 2` to source indices
//! `sigma(k)` with `q_k | p_sigma(k)`; it is admissible when the image of
//! `sigma` covers at least `n - s` source indices. Any admissible `sigma`
//! contains an injective sub-assignment with the same image, so existence is a
//! maximum bipartite matching question on the divisibility graph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::model::{ModelError, ProblemInstance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExistenceError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
}

/// Bipartite graph between target slots `k >= s` (left) and source indices
/// (right), with an edge whenever `q_k | p_i`. Indices are normalized target
/// indices and zero-based source indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisibilityGraph {
    pub left: Vec<usize>,
    pub right: usize,
    /// `adj[a]` lists the source neighbours of `left[a]` in ascending order.
    pub adj: Vec<Vec<usize>>,
}

impl DivisibilityGraph {
    pub fn build(inst: &ProblemInstance) -> Self {
        let q = inst.q();
        let p = inst.p();
        let left: Vec<usize> = (inst.s()..inst.big_n()).collect();
        let adj = left.iter().map(|&k| (0..p.len()).filter(|&i| p[i].is_multiple_of(q[k])).collect()).collect();
        DivisibilityGraph { left, right: p.len(), adj }
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.left.iter().zip(&self.adj).flat_map(|(&k, nb)| nb.iter().map(move |&i| (k, i))).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    /// Maximum matching as `(k, i)` pairs sorted by `k` (Hopcroft–Karp,
    /// deterministic given the ascending adjacency order).
    pub fn max_matching(&self) -> Vec<(usize, usize)> {
        let m = HopcroftKarp::run(self);
        let mut out: Vec<(usize, usize)> =
            m.match_left.iter().enumerate().filter_map(|(a, r)| r.map(|i| (self.left[a], i))).collect();
        out.sort();
        out
    }

    /// Target slots adjacent to some source index in `set`.
    pub fn neighborhood(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        self.left.iter().zip(&self.adj).filter(|(_, nb)| nb.iter().any(|i| set.contains(i))).map(|(&k, _)| k).collect()
    }
}

struct HopcroftKarp {
    match_left: Vec<Option<usize>>,
    match_right: Vec<Option<usize>>,
}

impl HopcroftKarp {
    fn run(g: &DivisibilityGraph) -> Self {
        let nl = g.left.len();
        let mut hk = HopcroftKarp { match_left: vec![None; nl], match_right: vec![None; g.right] };
        let mut dist = vec![usize::MAX; nl];
        while hk.bfs(g, &mut dist) {
            for a in 0..nl {
                if hk.match_left[a].is_none() {
                    hk.dfs(g, a, &mut dist);
                }
            }
        }
        hk
    }

    fn bfs(&self, g: &DivisibilityGraph, dist: &mut [usize]) -> bool {
        let mut queue = VecDeque::new();
        for (a, d) in dist.iter_mut().enumerate() {
            if self.match_left[a].is_none() {
                *d = 0;
                queue.push_back(a);
            } else {
                *d = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(a) = queue.pop_front() {
            for &i in &g.adj[a] {
                match self.match_right[i] {
                    None => found = true,
                    Some(b) if dist[b] == usize::MAX => {
                        dist[b] = dist[a] + 1;
                        queue.push_back(b);
                    }
                    Some(_) => {}
                }
            }
        }
        found
    }

    fn dfs(&mut self, g: &DivisibilityGraph, a: usize, dist: &mut [usize]) -> bool {
        for idx in 0..g.adj[a].len() {
            let i = g.adj[a][idx];
            let ok = match self.match_right[i] {
                None => true,
                Some(b) => dist[b] == dist[a] + 1 && self.dfs(g, b, dist),
            };
            if ok {
                self.match_left[a] = Some(i);
                self.match_right[i] = Some(a);
                return true;
            }
        }
        dist[a] = usize::MAX;
        false
    }
}

/// The pair `(K, sigma)`; `K` is the key set of `sigma`. Target indices are
/// normalized, source indices zero-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AdmissiblePattern {
    pub sigma: BTreeMap<usize, usize>,
}

impl AdmissiblePattern {
    pub fn new(sigma: BTreeMap<usize, usize>) -> Self {
        AdmissiblePattern { sigma }
    }

    pub fn from_pairs(pairs: &[(usize, usize)]) -> Self {
        AdmissiblePattern { sigma: pairs.iter().copied().collect() }
    }

    pub fn k(&self) -> Vec<usize> {
        self.sigma.keys().copied().collect()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.sigma.contains_key(&k)
    }

    pub fn get(&self, k: usize) -> Option<usize> {
        self.sigma.get(&k).copied()
    }

    pub fn image(&self) -> BTreeSet<usize> {
        self.sigma.values().copied().collect()
    }

    pub fn is_injective(&self) -> bool {
        self.image().len() == self.sigma.len()
    }

    /// Source indices outside `sigma(K)`, ascending.
    pub fn uncovered(&self, n: usize) -> Vec<usize> {
        let img = self.image();
        (0..n).filter(|i| !img.contains(i)).collect()
    }

    /// Checks every admissibility condition against the instance.
    pub fn validate(&self, inst: &ProblemInstance) -> Result<(), ExistenceError> {
        let (n, s, big_n) = (inst.n(), inst.s(), inst.big_n());
        for (&k, &i) in &self.sigma {
            if k < s || k >= big_n {
                return Err(ExistenceError::InvalidPattern(format!(
                    "slot {k} is not a weakly pseudoconvex target slot"
                )));
            }
            if i >= n {
                return Err(ExistenceError::InvalidPattern(format!("source index {i} out of range")));
            }
            if !inst.p()[i].is_multiple_of(inst.q()[k]) {
                return Err(ExistenceError::InvalidPattern(format!(
                    "q_{k}={} does not divide p_{i}={}",
                    inst.q()[k],
                    inst.p()[i]
                )));
            }
        }
        if self.image().len() + s < n {
            return Err(ExistenceError::InvalidPattern(format!(
                "image covers {} source indices, need at least {}",
                self.image().len(),
                n - s
            )));
        }
        Ok(())
    }
}

/// Hall-type witness that no admissible pattern exists: a set `S` of source
/// indices whose divisibility neighbourhood satisfies `|N(S)| + s < |S|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfeasibilityCertificate {
    pub hall_set: Vec<usize>,
    pub neighborhood: Vec<usize>,
    pub s: usize,
}

impl InfeasibilityCertificate {
    /// Recomputes the neighbourhood from the instance and checks the bound.
    pub fn verify(&self, inst: &ProblemInstance) -> bool {
        let g = DivisibilityGraph::build(inst);
        let set: BTreeSet<usize> = self.hall_set.iter().copied().collect();
        if set.iter().any(|&i| i >= inst.n()) || self.s != inst.s() {
            return false;
        }
        let nb = g.neighborhood(&set);
        nb.iter().copied().eq(self.neighborhood.iter().copied()) && nb.len() + self.s < set.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Exists(AdmissiblePattern),
    Infeasible(InfeasibilityCertificate),
}

impl Decision {
    pub fn exists(&self) -> bool {
        matches!(self, Decision::Exists(_))
    }
}

/// Decides existence. The witness is the maximum matching itself (an injective
/// pattern); the negative answer carries a König/Hall certificate.
pub fn maps_exist(inst: &ProblemInstance) -> Result<Decision, ExistenceError> {
    inst.require_classifiable()?;
    let g = DivisibilityGraph::build(inst);
    let hk = HopcroftKarp::run(&g);
    let size = hk.match_left.iter().flatten().count();
    let need = inst.n().saturating_sub(inst.s());
    if size >= need {
        let pairs: Vec<(usize, usize)> =
            hk.match_left.iter().enumerate().filter_map(|(a, r)| r.map(|i| (g.left[a], i))).collect();
        return Ok(Decision::Exists(AdmissiblePattern::from_pairs(&pairs)));
    }
    // Alternating search from unmatched source indices: the reached source set S
    // has every neighbour matched back into S, so |S| - |N(S)| = n - |matching|.
    let mut in_set = vec![false; g.right];
    let mut queue: VecDeque<usize> = (0..g.right).filter(|&i| hk.match_right[i].is_none()).collect();
    for &i in &queue {
        in_set[i] = true;
    }
    while let Some(i) = queue.pop_front() {
        for (a, nb) in g.adj.iter().enumerate() {
            if nb.contains(&i) {
                if let Some(j) = hk.match_left[a] {
                    if !in_set[j] {
                        in_set[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    let set: BTreeSet<usize> = (0..g.right).filter(|&i| in_set[i]).collect();
    let neighborhood = g.neighborhood(&set).into_iter().collect();
    Ok(Decision::Infeasible(InfeasibilityCertificate {
        hall_set: set.into_iter().collect(),
        neighborhood,
        s: inst.s(),
    }))
}

/// Default cap on the number of enumerated patterns.
pub const DEFAULT_PATTERN_LIMIT: usize = 1000;

/// Lazily enumerates admissible patterns: by `|K|`, then `K`
/// lexicographically, then injective before non-injective, then by the
/// `sigma` values lexicographically.
pub fn enumerate_patterns(inst: &ProblemInstance, limit: usize) -> Result<PatternIter, ExistenceError> {
    inst.require_classifiable()?;
    Ok(PatternIter::new(inst, limit))
}

pub struct PatternIter {
    graph: DivisibilityGraph,
    need: usize,
    remaining: usize,
    size: usize,
    subset: Option<Vec<usize>>,
    buffer: VecDeque<AdmissiblePattern>,
}

impl PatternIter {
    fn new(inst: &ProblemInstance, limit: usize) -> Self {
        let graph = DivisibilityGraph::build(inst);
        PatternIter {
            need: inst.n().saturating_sub(inst.s()),
            remaining: limit,
            size: 0,
            subset: Some(Vec::new()),
            buffer: VecDeque::new(),
            graph,
        }
    }

    /// Positions (into `graph.left`) of the next subset, in size-then-lex order.
    fn advance_subset(&mut self) {
        let l = self.graph.left.len();
        let Some(cur) = self.subset.take() else { return };
        let k = cur.len();
        let mut next = cur;
        // next combination of the same size
        let mut i = k;
        while i > 0 {
            i -= 1;
            if next[i] < l - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.subset = Some(next);
                return;
            }
        }
        self.size += 1;
        if self.size <= l {
            self.subset = Some((0..self.size).collect());
        }
    }

    fn fill(&mut self) {
        while self.buffer.is_empty() {
            let Some(subset) = self.subset.clone() else { return };
            self.advance_subset();
            if subset.len() < self.need || subset.iter().any(|&a| self.graph.adj[a].is_empty()) {
                continue;
            }
            let mut found = Vec::new();
            let mut choice = vec![0usize; subset.len()];
            loop {
                let sigma: BTreeMap<usize, usize> =
                    subset.iter().zip(&choice).map(|(&a, &c)| (self.graph.left[a], self.graph.adj[a][c])).collect();
                let pat = AdmissiblePattern::new(sigma);
                if pat.image().len() >= self.need {
                    found.push(pat);
                }
                // odometer over neighbour choices
                let mut wrapped = true;
                for d in (0..subset.len()).rev() {
                    choice[d] += 1;
                    if choice[d] < self.graph.adj[subset[d]].len() {
                        wrapped = false;
                        break;
                    }
                    choice[d] = 0;
                }
                if wrapped {
                    break;
                }
            }
            found.sort_by_key(|p| (!p.is_injective(), p.sigma.values().copied().collect::<Vec<_>>()));
            self.buffer.extend(found);
        }
    }
}

impl Iterator for PatternIter {
    type Item = AdmissiblePattern;

    fn next(&mut self) -> Option<AdmissiblePattern> {
        if self.remaining == 0 {
            return None;
        }
        self.fill();
        let p = self.buffer.pop_front()?;
        self.remaining -= 1;
        Some(p)
    }
}
