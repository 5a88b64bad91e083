use std::collections::VecDeque;

use crate::element::ElementId;
use crate::error::{Error, Result};

/// Cycle matroid of a multigraph: one element per edge, a set of edges is
/// independent iff it is a forest. Loops are dependent on their own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphicMatroid {
    vertices: usize,
    edges: Vec<(u32, u32)>,
}

impl GraphicMatroid {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut out = Vec::with_capacity(edges.len());
        for (i, (u, v)) in edges.into_iter().enumerate() {
            if u >= vertices || v >= vertices {
                return Err(Error::InvalidInstance(format!(
                    "edge {i} = ({u}, {v}) uses a vertex outside 0..{vertices}"
                )));
            }
            out.push((u as u32, v as u32));
        }
        Ok(GraphicMatroid {
            vertices,
            edges: out,
        })
    }

    pub fn ground_size(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edge(&self, e: ElementId) -> (usize, usize) {
        let (u, v) = self.edges[e.index()];
        (u as usize, v as usize)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().map(|&(u, v)| (u as usize, v as usize))
    }

    pub(crate) fn scratch(&self) -> GraphicScratch<'_> {
        GraphicScratch {
            graph: self,
            parent: (0..self.vertices as u32).collect(),
            members: Vec::new(),
        }
    }
}

/// A forest kept in a disjoint-set forest over the vertices.
#[derive(Debug, Clone)]
pub struct GraphicScratch<'a> {
    graph: &'a GraphicMatroid,
    parent: Vec<u32>,
    members: Vec<ElementId>,
}

impl GraphicScratch<'_> {
    fn find(&self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            x = self.parent[x as usize];
        }
        x
    }

    fn find_halving(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    pub fn push(&mut self, e: ElementId) -> bool {
        let (u, v) = self.graph.edges[e.index()];
        let (ru, rv) = (self.find_halving(u), self.find_halving(v));
        if ru == rv {
            return false;
        }
        self.parent[ru as usize] = rv;
        self.members.push(e);
        true
    }

    pub fn can_push(&self, e: ElementId) -> bool {
        let (u, v) = self.graph.edges[e.index()];
        self.find(u) != self.find(v)
    }

    pub fn circuit_with(&self, e: ElementId) -> Option<Vec<ElementId>> {
        let (u, v) = self.graph.edges[e.index()];
        if u == v {
            return Some(Vec::new());
        }
        if self.find(u) != self.find(v) {
            return None;
        }
        // The circuit is `e` plus the unique forest path between its endpoints.
        let n = self.graph.vertices;
        let mut adjacency: Vec<Vec<(u32, ElementId)>> = vec![Vec::new(); n];
        for &m in &self.members {
            let (a, b) = self.graph.edges[m.index()];
            adjacency[a as usize].push((b, m));
            adjacency[b as usize].push((a, m));
        }
        let mut via: Vec<Option<(u32, ElementId)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([u]);
        seen[u as usize] = true;
        while let Some(x) = queue.pop_front() {
            if x == v {
                break;
            }
            for &(y, edge) in &adjacency[x as usize] {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    via[y as usize] = Some((x, edge));
                    queue.push_back(y);
                }
            }
        }
        let mut path = Vec::new();
        let mut x = v;
        while x != u {
            let (prev, edge) = via[x as usize].expect("endpoints share a tree");
            path.push(edge);
            x = prev;
        }
        Some(path)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }
}
