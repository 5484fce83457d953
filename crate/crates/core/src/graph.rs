//! Graph storage, expansion measures, generators, and edge-list I/O.
//!
//! Graphs are undirected multigraphs in compressed sparse row form. Each
//! endpoint of a non-loop edge occupies one adjacency slot; a self-loop
//! occupies a single slot and contributes one to its node's degree. Loop
//! padding therefore raises degrees uniformly without touching boundaries or
//! cuts, which is exactly what [`Graph::regularize`] relies on: expansion and
//! conductance ignore loops, so the regularized graph keeps the cut structure
//! of the original.

use std::collections::{HashSet, VecDeque};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Hard cap for the exhaustive expansion and conductance searches.
pub const BRUTEFORCE_LIMIT: usize = 22;

const MAX_PAIRING_ATTEMPTS: usize = 1000;

// ---- graph ----

/// Undirected multigraph in compressed sparse row form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    /// Row offsets into `slots`; node `v` owns `slots[offsets[v]..offsets[v+1]]`.
    offsets: Vec<u32>,
    /// Slot endpoints, sorted within each row. A self-loop at `v` is a single
    /// slot holding `v`.
    slots: Vec<u32>,
    /// Number of edge records (parallel edges counted, loops counted once).
    edge_records: u64,
    min_degree: u32,
    max_degree: u32,
}

impl Graph {
    /// Builds a graph from edge records. Records may repeat (parallel edges)
    /// and may be loops `(v, v)`; each loop adds a single slot.
    pub fn from_edges(n: u32, edges: &[(u32, u32)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "graph needs at least one node".into(),
            ));
        }
        let mut degrees = vec![0u32; n as usize];
        for &(u, v) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(Error::NodeRange {
                        node: node as usize,
                        n: n as usize,
                    });
                }
            }
            degrees[u as usize] += 1;
            if u != v {
                degrees[v as usize] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n as usize + 1);
        offsets.push(0u32);
        let mut acc = 0u32;
        for &d in &degrees {
            acc = acc.checked_add(d).ok_or_else(|| {
                Error::InvalidParameter("adjacency slot count overflows u32".into())
            })?;
            offsets.push(acc);
        }
        let mut cursor: Vec<u32> = offsets[..n as usize].to_vec();
        let mut slots = vec![0u32; acc as usize];
        let place = |slots: &mut [u32], at: &mut u32, w: u32| {
            slots[*at as usize] = w;
            *at += 1;
        };
        for &(u, v) in edges {
            place(&mut slots, &mut cursor[u as usize], v);
            if u != v {
                place(&mut slots, &mut cursor[v as usize], u);
            }
        }
        for v in 0..n as usize {
            slots[offsets[v] as usize..offsets[v + 1] as usize].sort_unstable();
        }
        Ok(Self {
            offsets,
            slots,
            edge_records: edges.len() as u64,
            min_degree: degrees.iter().copied().min().unwrap_or(0),
            max_degree: degrees.iter().copied().max().unwrap_or(0),
        })
    }

    /// Complete graph on `n >= 2` nodes.
    pub fn complete(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(
                "complete graph needs at least two nodes".into(),
            ));
        }
        let mut edges = Vec::with_capacity(n as usize * (n as usize - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        Self::from_edges(n, &edges)
    }

    /// Cycle on `n >= 3` nodes.
    pub fn cycle(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(
                "cycle needs at least three nodes".into(),
            ));
        }
        let edges: Vec<(u32, u32)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Degree of `v`: its slot count, so loops count one each.
    pub fn degree(&self, v: u32) -> u32 {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    /// Slot endpoints of `v` in ascending order; `v` appears once per loop.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.slots[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize]
    }

    /// Number of self-loops at `v`.
    pub fn self_loops(&self, v: u32) -> u32 {
        self.neighbors(v).iter().filter(|&&w| w == v).count() as u32
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn is_regular(&self) -> bool {
        self.min_degree == self.max_degree
    }

    /// The uniform degree, if the graph is regular.
    pub fn regular_degree(&self) -> Option<u32> {
        self.is_regular().then_some(self.max_degree)
    }

    /// Sum of all degrees (the total slot count).
    pub fn total_degree(&self) -> u64 {
        self.slots.len() as u64
    }

    /// Number of edge records, loops counted once each.
    pub fn edge_count(&self) -> u64 {
        self.edge_records
    }

    /// Pads every node with self-loops up to the uniform degree `degree`.
    ///
    /// Boundaries and cuts are unchanged, so set expansion is preserved and
    /// conductance is rescaled only through the larger volume.
    pub fn regularize(&self, degree: u32) -> Result<Graph> {
        if degree < self.max_degree {
            return Err(Error::DegreeBound {
                required: self.max_degree as usize,
                given: degree as usize,
            });
        }
        let n = self.node_count();
        if n as u64 * degree as u64 > u32::MAX as u64 {
            return Err(Error::InvalidParameter(
                "regularized slot count overflows u32".into(),
            ));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0u32);
        let mut slots = Vec::with_capacity(n * degree as usize);
        let mut added = 0u64;
        for v in 0..n as u32 {
            let row = self.neighbors(v);
            let pad = degree - row.len() as u32;
            let start = slots.len();
            slots.extend_from_slice(row);
            slots.extend(std::iter::repeat_n(v, pad as usize));
            slots[start..].sort_unstable();
            offsets.push(slots.len() as u32);
            added += pad as u64;
        }
        Ok(Graph {
            offsets,
            slots,
            edge_records: self.edge_records + added,
            min_degree: degree,
            max_degree: degree,
        })
    }

    /// True when every node is reachable from node 0.
    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut visited = 1usize;
        let mut queue = VecDeque::from([0u32]);
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    visited += 1;
                    queue.push_back(w);
                }
            }
        }
        visited == n
    }

    /// FNV-1a hash of the adjacency structure, for tagging experiment records.
    pub fn fingerprint(&self) -> u64 {
        fn eat(mut hash: u64, bytes: &[u8]) -> u64 {
            for &b in bytes {
                hash ^= b as u64;
                hash = hash.wrapping_mul(0x100_0000_01b3);
            }
            hash
        }
        let mut hash = 0xcbf2_9ce4_8422_2325u64;
        hash = eat(hash, &(self.node_count() as u32).to_le_bytes());
        for &x in &self.offsets {
            hash = eat(hash, &x.to_le_bytes());
        }
        for &x in &self.slots {
            hash = eat(hash, &x.to_le_bytes());
        }
        hash
    }
}

// ---- node sets ----

/// A set of nodes with its volume (total degree) cached for the owning graph.
///
/// Members are kept sorted, so membership tests are binary searches and set
/// algebra is a linear merge. The empty set is allowed (the evolving set
/// process can die out); the measures below reject it instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSet {
    members: Vec<u32>,
    volume: u64,
}

impl NodeSet {
    /// Builds a set from arbitrary members (sorted and deduplicated here).
    pub fn new(graph: &Graph, mut members: Vec<u32>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if let Some(&last) = members.last() {
            if last as usize >= graph.node_count() {
                return Err(Error::NodeRange {
                    node: last as usize,
                    n: graph.node_count(),
                });
            }
        }
        let volume = members.iter().map(|&v| graph.degree(v) as u64).sum();
        Ok(Self { members, volume })
    }

    pub fn singleton(graph: &Graph, v: u32) -> Result<Self> {
        Self::new(graph, vec![v])
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    /// Sum of member degrees in the owning graph.
    pub fn volume(&self) -> u64 {
        self.volume
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.members.iter().copied()
    }

    /// Volume of the symmetric difference with `other`.
    pub fn symmetric_difference_volume(&self, graph: &Graph, other: &NodeSet) -> u64 {
        let (a, b) = (self.members(), other.members());
        let (mut i, mut j) = (0usize, 0usize);
        let mut volume = 0u64;
        while i < a.len() || j < b.len() {
            match (a.get(i), b.get(j)) {
                (Some(&x), Some(&y)) if x == y => {
                    i += 1;
                    j += 1;
                }
                (Some(&x), Some(&y)) if x < y => {
                    volume += graph.degree(x) as u64;
                    i += 1;
                }
                (Some(_), Some(&y)) => {
                    volume += graph.degree(y) as u64;
                    j += 1;
                }
                (Some(&x), None) => {
                    volume += graph.degree(x) as u64;
                    i += 1;
                }
                (None, Some(&y)) => {
                    volume += graph.degree(y) as u64;
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        volume
    }
}

// ---- measures ----

/// Nodes outside `set` that share a non-loop edge with it, ascending.
pub fn boundary(graph: &Graph, set: &NodeSet) -> Vec<u32> {
    let mut hit = vec![false; graph.node_count()];
    for v in set.iter() {
        for &w in graph.neighbors(v) {
            if w != v && !set.contains(w) {
                hit[w as usize] = true;
            }
        }
    }
    hit.iter()
        .enumerate()
        .filter_map(|(v, &h)| h.then_some(v as u32))
        .collect()
}

/// Size of the outer boundary of `set`.
pub fn boundary_size(graph: &Graph, set: &NodeSet) -> u64 {
    let mut hit = vec![false; graph.node_count()];
    let mut count = 0u64;
    for v in set.iter() {
        for &w in graph.neighbors(v) {
            if w != v && !set.contains(w) && !hit[w as usize] {
                hit[w as usize] = true;
                count += 1;
            }
        }
    }
    count
}

/// Number of edges leaving `set`, with multiplicity; loops never cross.
pub fn cut_edges(graph: &Graph, set: &NodeSet) -> u64 {
    set.iter()
        .map(|v| {
            graph
                .neighbors(v)
                .iter()
                .filter(|&&w| w != v && !set.contains(w))
                .count() as u64
        })
        .sum()
}

/// Set expansion: boundary size over set size.
pub fn set_expansion(graph: &Graph, set: &NodeSet) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(boundary_size(graph, set) as f64 / set.len() as f64)
}

/// Set conductance: cut edges over volume. Zero for the full node set.
pub fn set_conductance(graph: &Graph, set: &NodeSet) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if set.volume() == 0 {
        return Err(Error::InvalidParameter(
            "conductance needs a set with positive volume".into(),
        ));
    }
    Ok(cut_edges(graph, set) as f64 / set.volume() as f64)
}

/// Exact graph expansion: the minimum set expansion over all node sets of
/// size between 1 and half the nodes. Exponential; guarded by
/// [`BRUTEFORCE_LIMIT`].
pub fn expansion_bruteforce(graph: &Graph) -> Result<f64> {
    let n = graph.node_count();
    if n > BRUTEFORCE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: BRUTEFORCE_LIMIT,
        });
    }
    if n < 2 {
        return Err(Error::InvalidParameter(
            "graph expansion needs at least two nodes".into(),
        ));
    }
    let adjacency: Vec<u32> = (0..n as u32)
        .map(|v| {
            graph
                .neighbors(v)
                .iter()
                .filter(|&&w| w != v)
                .fold(0u32, |acc, &w| acc | 1 << w)
        })
        .collect();
    let mut best = f64::INFINITY;
    for mask in 1u32..1 << n {
        let size = mask.count_ones();
        if size as usize * 2 > n {
            continue;
        }
        let mut reach = 0u32;
        let mut bits = mask;
        while bits != 0 {
            reach |= adjacency[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        let candidate = (reach & !mask).count_ones() as f64 / size as f64;
        if candidate < best {
            best = candidate;
        }
    }
    Ok(best)
}

/// Exact graph conductance: the minimum set conductance over all node sets
/// with volume at most half the total degree. Exponential; guarded by
/// [`BRUTEFORCE_LIMIT`].
pub fn conductance_bruteforce(graph: &Graph) -> Result<f64> {
    let n = graph.node_count();
    if n > BRUTEFORCE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: BRUTEFORCE_LIMIT,
        });
    }
    if n < 2 {
        return Err(Error::InvalidParameter(
            "graph conductance needs at least two nodes".into(),
        ));
    }
    let total = graph.total_degree();
    let mut best = f64::INFINITY;
    for mask in 1u32..1 << n {
        let mut volume = 0u64;
        let mut cut = 0u64;
        let mut bits = mask;
        while bits != 0 {
            let v = bits.trailing_zeros();
            volume += graph.degree(v) as u64;
            cut += graph
                .neighbors(v)
                .iter()
                .filter(|&&w| w != v && mask >> w & 1 == 0)
                .count() as u64;
            bits &= bits - 1;
        }
        if volume == 0 || 2 * volume > total {
            continue;
        }
        let candidate = cut as f64 / volume as f64;
        if candidate < best {
            best = candidate;
        }
    }
    Ok(best)
}

// ---- generators ----

/// Recipe for a test graph; generation is deterministic in the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GraphSpec {
    /// Simple random `d`-regular graph (pairing model, resampled until simple).
    RandomRegular { n: u32, d: u32 },
    /// Two complete graphs on `half` nodes each, joined by `bridges` matched
    /// edges and loop-padded to the uniform degree `d`.
    Dumbbell { half: u32, d: u32, bridges: u32 },
    /// Two independent random `side_degree`-regular halves joined by
    /// `bridges` matched edges, loop-padded to degree `side_degree + 1`.
    DumbbellRegular {
        half: u32,
        side_degree: u32,
        bridges: u32,
    },
    Complete { n: u32 },
    Cycle { n: u32 },
    /// Edge list on disk, loaded as-is.
    File { path: PathBuf },
}

impl GraphSpec {
    pub fn generate(&self, seed: u64) -> Result<Graph> {
        match *self {
            GraphSpec::RandomRegular { n, d } => {
                let edges = random_regular_edges(n, d, &mut rng::stream(seed, &[rng::GEN]))?;
                Graph::from_edges(n, &edges)
            }
            GraphSpec::Dumbbell { half, d, bridges } => clique_dumbbell(half, d, bridges),
            GraphSpec::DumbbellRegular {
                half,
                side_degree,
                bridges,
            } => regular_dumbbell(half, side_degree, bridges, seed),
            GraphSpec::Complete { n } => Graph::complete(n),
            GraphSpec::Cycle { n } => Graph::cycle(n),
            GraphSpec::File { ref path } => read_edge_list(path, None),
        }
    }
}

/// Simple random regular graph via the pairing model: shuffle `n * d` slot
/// points, pair them up, and resample whenever a loop or parallel edge shows.
fn random_regular_edges<R: rand::Rng>(n: u32, d: u32, rng: &mut R) -> Result<Vec<(u32, u32)>> {
    if d == 0 || d >= n {
        return Err(Error::InvalidParameter(format!(
            "random regular graph needs 0 < d < n, got d = {d}, n = {n}"
        )));
    }
    let points = n as u64 * d as u64;
    if points % 2 == 1 {
        return Err(Error::InfeasibleSpec(format!(
            "no {d}-regular graph on {n} nodes: n * d is odd"
        )));
    }
    if points > u32::MAX as u64 {
        return Err(Error::InvalidParameter(
            "pairing model slot count overflows u32".into(),
        ));
    }
    let mut perm: Vec<u32> = (0..points as u32).collect();
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(points as usize / 2);
    let mut seen: HashSet<(u32, u32)> = HashSet::with_capacity(points as usize / 2);
    for _ in 0..MAX_PAIRING_ATTEMPTS {
        perm.shuffle(rng);
        edges.clear();
        seen.clear();
        let mut simple = true;
        for pair in perm.chunks_exact(2) {
            let (u, v) = (pair[0] / d, pair[1] / d);
            if u == v || !seen.insert((u.min(v), u.max(v))) {
                simple = false;
                break;
            }
            edges.push((u, v));
        }
        if simple {
            return Ok(edges);
        }
    }
    Err(Error::GenerationFailed(format!(
        "no simple {d}-regular pairing on {n} nodes after {MAX_PAIRING_ATTEMPTS} attempts"
    )))
}

fn dumbbell_bridges(half: u32, bridges: u32) -> Result<Vec<(u32, u32)>> {
    if bridges > half {
        return Err(Error::InfeasibleSpec(format!(
            "at most one bridge per node pair: {bridges} bridges on halves of {half}"
        )));
    }
    Ok((0..bridges).map(|i| (i, half + i)).collect())
}

fn clique_dumbbell(half: u32, degree: u32, bridges: u32) -> Result<Graph> {
    if half < 2 {
        return Err(Error::InvalidParameter(
            "dumbbell halves need at least two nodes".into(),
        ));
    }
    let mut edges = Vec::with_capacity(half as usize * (half as usize - 1) + bridges as usize);
    for side in [0, half] {
        for i in 0..half {
            for j in (i + 1)..half {
                edges.push((side + i, side + j));
            }
        }
    }
    edges.extend(dumbbell_bridges(half, bridges)?);
    Graph::from_edges(2 * half, &edges)?.regularize(degree)
}

fn regular_dumbbell(half: u32, side_degree: u32, bridges: u32, seed: u64) -> Result<Graph> {
    let mut edges = random_regular_edges(half, side_degree, &mut rng::stream(seed, &[rng::GEN, 0]))?;
    let other = random_regular_edges(half, side_degree, &mut rng::stream(seed, &[rng::GEN, 1]))?;
    edges.extend(other.into_iter().map(|(u, v)| (u + half, v + half)));
    edges.extend(dumbbell_bridges(half, bridges)?);
    Graph::from_edges(2 * half, &edges)?.regularize(side_degree + 1)
}

// ---- edge-list files ----

/// Writes `graph` as a text edge list: a `n m d` header (node count, edge
/// records, max degree), then one `u v` record per line. Loops appear as
/// `v v`, once per loop.
pub fn write_edge_list(graph: &Graph, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(
        out,
        "{} {} {}",
        graph.node_count(),
        graph.edge_count(),
        graph.max_degree()
    )?;
    for v in 0..graph.node_count() as u32 {
        for &w in graph.neighbors(v) {
            if w >= v {
                writeln!(out, "{v} {w}")?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads an edge list written by [`write_edge_list`]. The header counts are
/// validated against the body. `pad_to` regularizes the result to the given
/// degree; without it the graph is returned exactly as stored.
pub fn read_edge_list(path: &Path, pad_to: Option<u32>) -> Result<Graph> {
    let file = File::open(path)?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::MalformedFile("missing `n m d` header line".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(Error::MalformedFile(format!(
            "header must be `n m d`, got '{header}'"
        )));
    }
    let n: u32 = parse_field(fields[0], "node count")?;
    let m: u64 = parse_field(fields[1], "edge count")?;
    let degree_meta: u32 = parse_field(fields[2], "max degree")?;
    let mut edges = Vec::with_capacity(m as usize);
    for (idx, line) in lines.enumerate() {
        let line = line?;
        let record = line.trim();
        if record.is_empty() {
            continue;
        }
        let mut it = record.split_whitespace();
        match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => {
                edges.push((parse_field(a, "node id")?, parse_field(b, "node id")?));
            }
            _ => {
                return Err(Error::MalformedFile(format!(
                    "line {}: expected `u v`, got '{record}'",
                    idx + 2
                )));
            }
        }
    }
    if edges.len() as u64 != m {
        return Err(Error::MalformedFile(format!(
            "header promises {m} edge records, file has {}",
            edges.len()
        )));
    }
    let graph = Graph::from_edges(n, &edges)?;
    if graph.max_degree() != degree_meta {
        return Err(Error::MalformedFile(format!(
            "header records max degree {degree_meta}, graph has {}",
            graph.max_degree()
        )));
    }
    match pad_to {
        Some(degree) => graph.regularize(degree),
        None => Ok(graph),
    }
}

fn parse_field<T: std::str::FromStr>(field: &str, what: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| Error::MalformedFile(format!("cannot parse {what} from '{field}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> Graph {
        Graph::complete(4).unwrap()
    }

    /// Two copies of the complete graph on 8 nodes, one bridge, padded to
    /// uniform degree 8. Nodes 0..8 are the left half.
    fn dumbbell8() -> Graph {
        GraphSpec::Dumbbell {
            half: 8,
            d: 8,
            bridges: 1,
        }
        .generate(0)
        .unwrap()
    }

    fn set(graph: &Graph, members: &[u32]) -> NodeSet {
        NodeSet::new(graph, members.to_vec()).unwrap()
    }

    #[test]
    fn from_edges_builds_sorted_rows_and_counts_loops_once() {
        let graph = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2), (2, 2)]).unwrap();
        assert_eq!(graph.degree(2), 3);
        assert_eq!(graph.neighbors(2), &[0, 1, 2]);
        assert_eq!(graph.self_loops(2), 1);
        assert_eq!(graph.total_degree(), 7);
        assert_eq!(graph.edge_count(), 4);
        assert!(!graph.is_regular());
    }

    #[test]
    fn from_edges_rejects_out_of_range_nodes() {
        assert!(matches!(
            Graph::from_edges(2, &[(0, 2)]),
            Err(Error::NodeRange { node: 2, n: 2 })
        ));
    }

    #[test]
    fn singleton_expansion_on_k4_is_three() {
        let graph = k4();
        let s = set(&graph, &[0]);
        assert_eq!(set_expansion(&graph, &s).unwrap(), 3.0);
        assert_eq!(boundary(&graph, &s), vec![1, 2, 3]);
    }

    #[test]
    fn k4_bruteforce_expansion_is_one() {
        assert_eq!(expansion_bruteforce(&k4()).unwrap(), 1.0);
    }

    #[test]
    fn disjoint_triangles_have_zero_expansion() {
        let graph =
            Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_eq!(expansion_bruteforce(&graph).unwrap(), 0.0);
        assert!(!graph.is_connected());
    }

    #[test]
    fn six_cycle_expansion_is_two_thirds() {
        let graph = Graph::cycle(6).unwrap();
        assert_eq!(expansion_bruteforce(&graph).unwrap(), 2.0 / 3.0);
        assert_eq!(conductance_bruteforce(&graph).unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn dumbbell_side_measures() {
        let graph = dumbbell8();
        assert_eq!(graph.node_count(), 16);
        assert_eq!(graph.regular_degree(), Some(8));
        assert!(graph.is_connected());
        // Every node except the two bridge endpoints gets one padding loop.
        let loops: u32 = (0..16).map(|v| graph.self_loops(v)).sum();
        assert_eq!(loops, 14);
        assert_eq!(graph.edge_count(), 2 * 28 + 1 + 14);

        let side = set(&graph, &(0..8).collect::<Vec<_>>());
        assert_eq!(boundary(&graph, &side), vec![8]);
        assert_eq!(cut_edges(&graph, &side), 1);
        assert_eq!(set_expansion(&graph, &side).unwrap(), 1.0 / 8.0);
        assert_eq!(set_conductance(&graph, &side).unwrap(), 1.0 / 64.0);
    }

    #[test]
    fn expansion_dominates_conductance_on_regular_graphs() {
        // On a d-regular graph, expansion / d <= conductance <= expansion.
        let graph = dumbbell8();
        let d = graph.regular_degree().unwrap() as f64;
        for members in [vec![0], vec![0, 1, 2], (0..8).collect::<Vec<_>>()] {
            let s = set(&graph, &members);
            let expansion = set_expansion(&graph, &s).unwrap();
            let conductance = set_conductance(&graph, &s).unwrap();
            assert!(expansion / d <= conductance + 1e-12);
            assert!(conductance <= expansion + 1e-12);
        }
    }

    #[test]
    fn regularize_preserves_expansion() {
        let cycle = Graph::cycle(6).unwrap();
        let padded = cycle.regularize(4).unwrap();
        assert_eq!(padded.regular_degree(), Some(4));
        assert!((0..6).all(|v| padded.self_loops(v) == 2));
        assert_eq!(
            expansion_bruteforce(&padded).unwrap(),
            expansion_bruteforce(&cycle).unwrap()
        );
    }

    #[test]
    fn regularize_rejects_degree_below_maximum() {
        assert!(matches!(
            k4().regularize(2),
            Err(Error::DegreeBound {
                required: 3,
                given: 2
            })
        ));
    }

    #[test]
    fn bruteforce_is_guarded() {
        let graph = Graph::complete(23).unwrap();
        assert!(matches!(
            expansion_bruteforce(&graph),
            Err(Error::TooLarge { n: 23, limit: 22 })
        ));
    }

    #[test]
    fn random_regular_is_simple_and_deterministic() {
        let spec = GraphSpec::RandomRegular { n: 64, d: 4 };
        let graph = spec.generate(11).unwrap();
        assert_eq!(graph.regular_degree(), Some(4));
        assert_eq!((0..64).map(|v| graph.self_loops(v)).sum::<u32>(), 0);
        assert_eq!(graph.fingerprint(), spec.generate(11).unwrap().fingerprint());
        assert_ne!(graph.fingerprint(), spec.generate(12).unwrap().fingerprint());
    }

    #[test]
    fn regular_dumbbell_measures() {
        let graph = GraphSpec::DumbbellRegular {
            half: 128,
            side_degree: 3,
            bridges: 1,
        }
        .generate(7)
        .unwrap();
        assert_eq!(graph.node_count(), 256);
        assert_eq!(graph.regular_degree(), Some(4));
        assert!(graph.is_connected());
        let side = NodeSet::new(&graph, (0..128).collect()).unwrap();
        assert_eq!(set_expansion(&graph, &side).unwrap(), 1.0 / 128.0);
        assert_eq!(set_conductance(&graph, &side).unwrap(), 1.0 / 512.0);
    }

    #[test]
    fn node_set_algebra() {
        let graph = dumbbell8();
        let a = set(&graph, &[0, 1, 2]);
        let b = set(&graph, &[2, 3]);
        assert_eq!(a.volume(), 24);
        assert!(a.contains(1));
        assert!(!a.contains(3));
        assert_eq!(a.symmetric_difference_volume(&graph, &b), 24);
        assert_eq!(a.symmetric_difference_volume(&graph, &a), 0);
    }

    #[test]
    fn edge_list_roundtrip_and_padding() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dumbbell.edges");
        let graph = dumbbell8();
        write_edge_list(&graph, &path).unwrap();
        let back = read_edge_list(&path, None).unwrap();
        assert_eq!(back.fingerprint(), graph.fingerprint());

        let padded = read_edge_list(&path, Some(16)).unwrap();
        assert_eq!(padded.regular_degree(), Some(16));
    }

    #[test]
    fn malformed_edge_lists_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let bad_header = dir.path().join("bad_header.edges");
        std::fs::write(&bad_header, "3 1\n0 1\n").unwrap();
        assert!(matches!(
            read_edge_list(&bad_header, None),
            Err(Error::MalformedFile(_))
        ));

        let bad_count = dir.path().join("bad_count.edges");
        std::fs::write(&bad_count, "3 2 2\n0 1\n").unwrap();
        assert!(matches!(
            read_edge_list(&bad_count, None),
            Err(Error::MalformedFile(_))
        ));

        let bad_record = dir.path().join("bad_record.edges");
        std::fs::write(&bad_record, "3 1 1\n0 1 2\n").unwrap();
        assert!(matches!(
            read_edge_list(&bad_record, None),
            Err(Error::MalformedFile(_))
        ));
    }
}
