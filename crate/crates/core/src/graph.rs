//! Finite simple graphs, BFS ball construction and export.

use std::collections::VecDeque;
use std::fmt::{Display, Write as _};
use std::hash::Hash;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default vertex cap for a single ball.
pub const DEFAULT_CAPACITY: usize = 5_000_000;

pub const UNREACHED: u32 = u32::MAX;

/// Resource guardrails for enumerations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_vertices: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_vertices: DEFAULT_CAPACITY }
    }
}

impl Limits {
    pub fn new(max_vertices: usize) -> Self {
        Limits { max_vertices }
    }

    pub fn check(&self, projected: u128) -> Result<()> {
        if projected > self.max_vertices as u128 {
            Err(Error::Capacity { projected, limit: self.max_vertices })
        } else {
            Ok(())
        }
    }
}

/// A finite simple graph whose vertices carry values of type `V`.
///
/// Vertex `i` is `vertices()[i]`; adjacency lists hold indices. Graphs
/// built by [`FiniteGraph::ball`] are rooted at index 0 and record the BFS
/// depth of each vertex.
#[derive(Clone, Debug)]
pub struct FiniteGraph<V> {
    vertices: Vec<V>,
    index: FxHashMap<V, u32>,
    adj: Vec<Vec<u32>>,
    depth: Option<Vec<u32>>,
}

impl<V> FiniteGraph<V>
where
    V: Clone + Eq + Hash,
{
    /// Builds a graph from a vertex list and an undirected edge list.
    pub fn from_edges(vertices: Vec<V>, edges: &[(u32, u32)]) -> Result<Self> {
        let n = vertices.len();
        let mut index = FxHashMap::default();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i as u32).is_some() {
                return Err(Error::InvalidArgument(format!("vertex {i} is repeated")));
            }
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::InvalidArgument(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop at {u}")));
            }
            if adj[u as usize].contains(&v) {
                return Err(Error::InvalidArgument(format!("repeated edge ({u}, {v})")));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        Ok(FiniteGraph { vertices, index, adj, depth: None })
    }

    pub fn index_of(&self, v: &V) -> Option<u32> {
        self.index.get(v).copied()
    }

    pub fn contains(&self, v: &V) -> bool {
        self.index.contains_key(v)
    }

    /// The induced ball of radius `radius` around `root`, explored with the
    /// supplied neighbor function.
    ///
    /// Each BFS layer's neighbor lists are computed in parallel and merged in
    /// frontier order, so the vertex numbering does not depend on the thread
    /// schedule. Fails as soon as the vertex count passes the limit.
    pub fn ball<F>(root: V, radius: u32, limits: Limits, neighbors: F) -> Result<Self>
    where
        V: Send + Sync,
        F: Fn(&V) -> Vec<V> + Sync,
    {
        let mut vertices = vec![root.clone()];
        let mut index = FxHashMap::default();
        index.insert(root, 0u32);
        let mut depth = vec![0u32];
        let mut adj: Vec<Vec<u32>> = vec![Vec::new()];
        limits.check(1)?;

        let mut start = 0usize;
        for d in 0..=radius {
            let end = vertices.len();
            if start == end {
                break;
            }
            let lists: Vec<Vec<V>> = vertices[start..end].par_iter().map(&neighbors).collect();
            for (offset, list) in lists.into_iter().enumerate() {
                let u = start + offset;
                let mut out = Vec::with_capacity(list.len());
                for w in list {
                    if let Some(&j) = index.get(&w) {
                        out.push(j);
                    } else if d < radius {
                        let j = vertices.len() as u32;
                        if vertices.len() >= limits.max_vertices {
                            return Err(Error::Capacity {
                                projected: vertices.len() as u128 + 1,
                                limit: limits.max_vertices,
                            });
                        }
                        index.insert(w.clone(), j);
                        vertices.push(w);
                        depth.push(d + 1);
                        adj.push(Vec::new());
                        out.push(j);
                    }
                }
                adj[u] = out;
            }
            start = end;
        }
        Ok(FiniteGraph { vertices, index, adj, depth: Some(depth) })
    }
}

impl<V> FiniteGraph<V> {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[V] {
        &self.vertices
    }

    pub fn vertex(&self, i: u32) -> &V {
        &self.vertices[i as usize]
    }

    pub fn neighbors(&self, i: u32) -> &[u32] {
        &self.adj[i as usize]
    }

    pub fn degree(&self, i: u32) -> usize {
        self.adj[i as usize].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, ordered by `u` then adjacency order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| (u as u32) < v).map(move |&v| (u as u32, v)))
    }

    /// BFS depth from the root, for graphs built as balls.
    pub fn depths(&self) -> Option<&[u32]> {
        self.depth.as_deref()
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].contains(&v)
    }

    /// Distances from `src` inside this graph; [`UNREACHED`] marks other components.
    pub fn bfs_from(&self, src: u32) -> Vec<u32> {
        self.multi_source_bfs(&[src])
    }

    pub fn multi_source_bfs(&self, sources: &[u32]) -> Vec<u32> {
        let mut dist = vec![UNREACHED; self.adj.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s as usize] == UNREACHED {
                dist[s as usize] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            for &w in &self.adj[u as usize] {
                if dist[w as usize] == UNREACHED {
                    dist[w as usize] = du + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.adj.is_empty() || self.bfs_from(0).iter().all(|&d| d != UNREACHED)
    }

    /// Checks symmetry, absence of self-loops and of repeated edges.
    pub fn is_simple(&self) -> bool {
        self.adj.iter().enumerate().all(|(u, list)| {
            let mut seen = list.clone();
            seen.sort_unstable();
            seen.dedup();
            seen.len() == list.len()
                && list.iter().all(|&v| v as usize != u && self.adj[v as usize].contains(&(u as u32)))
        })
    }

    /// Layer sizes `|S_0|, |S_1|, ..` from the root of a ball.
    pub fn layer_sizes(&self) -> Option<Vec<usize>> {
        let depth = self.depth.as_ref()?;
        let max = depth.iter().copied().max().unwrap_or(0) as usize;
        let mut sizes = vec![0usize; max + 1];
        for &d in depth {
            sizes[d as usize] += 1;
        }
        Some(sizes)
    }

    pub fn adjacency(&self) -> &[Vec<u32>] {
        &self.adj
    }
}

#[derive(Serialize)]
struct JsonGraph<'a> {
    vertices: Vec<String>,
    edges: Vec<[u32; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    depth: Option<&'a [u32]>,
}

impl<V: Display + Clone + Eq + Hash> FiniteGraph<V> {
    /// `{"vertices": [..], "edges": [[u, v], ..]}` with vertex text forms.
    pub fn to_json(&self) -> String {
        let g = JsonGraph {
            vertices: self.vertices.iter().map(ToString::to_string).collect(),
            edges: self.edges().map(|(u, v)| [u, v]).collect(),
            depth: self.depth.as_deref(),
        };
        serde_json::to_string(&g).expect("graph serializes")
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph \"{name}\" {{");
        for (i, v) in self.vertices.iter().enumerate() {
            let label = v.to_string().replace('"', "\\\"");
            let _ = writeln!(out, "  {i} [label=\"{label}\"];");
        }
        for (u, v) in self.edges() {
            let _ = writeln!(out, "  {u} -- {v};");
        }
        out.push_str("}\n");
        out
    }
}
