//! Materialized radius-R balls of Cay(G, S): explicit vertices in normal
//! form, generator-labeled adjacency, and exact distances from the center.

use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec, Letter};
use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

pub type VertexId = u32;

pub const DEFAULT_VERTEX_CAP: usize = 5_000_000;

/// The ball {g : d(center, g) <= radius} as a labeled graph. Vertices are
/// ordered breadth-first with letters expanded in declared order, so the
/// layout is deterministic for a given spec.
#[derive(Debug, Clone)]
pub struct Ball {
    spec: GroupSpec,
    center: Element,
    radius: u32,
    vertices: Vec<Element>,
    index: HashMap<Element, VertexId>,
    adjacency: Vec<Vec<(Letter, VertexId)>>,
    dist: Vec<u32>,
}

impl Ball {
    pub fn build(spec: &GroupSpec, center: Element, radius: u32) -> Result<Ball> {
        Ball::build_capped(spec, center, radius, DEFAULT_VERTEX_CAP)
    }

    pub fn build_capped(
        spec: &GroupSpec,
        center: Element,
        radius: u32,
        cap: usize,
    ) -> Result<Ball> {
        let letters = spec.letters();
        let mut vertices = vec![center.clone()];
        let mut index = HashMap::new();
        index.insert(center.clone(), 0 as VertexId);
        let mut dist = vec![0u32];
        let mut queue = VecDeque::new();
        queue.push_back(0 as VertexId);
        while let Some(v) = queue.pop_front() {
            if dist[v as usize] == radius {
                continue;
            }
            let d = dist[v as usize] + 1;
            let elem = vertices[v as usize].clone();
            for &letter in &letters {
                let w = spec.apply_letter(&elem, letter);
                if index.contains_key(&w) {
                    continue;
                }
                if vertices.len() >= cap {
                    return Err(Error::SizeCap {
                        radius,
                        cap,
                        seen: vertices.len() + 1,
                    });
                }
                let id = vertices.len() as VertexId;
                index.insert(w.clone(), id);
                vertices.push(w);
                dist.push(d);
                queue.push_back(id);
            }
        }
        // Adjacency over the final vertex set, letters in declared order.
        let mut adjacency = Vec::with_capacity(vertices.len());
        for elem in &vertices {
            let mut nbrs = Vec::new();
            for &letter in &letters {
                let w = spec.apply_letter(elem, letter);
                if let Some(&id) = index.get(&w) {
                    nbrs.push((letter, id));
                }
            }
            adjacency.push(nbrs);
        }
        Ok(Ball {
            spec: spec.clone(),
            center,
            radius,
            vertices,
            index,
            adjacency,
            dist,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn center(&self) -> &Element {
        &self.center
    }

    pub fn center_id(&self) -> VertexId {
        0
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn element(&self, v: VertexId) -> &Element {
        &self.vertices[v as usize]
    }

    pub fn vertex_id(&self, e: &Element) -> Option<VertexId> {
        self.index.get(e).copied()
    }

    pub fn require_vertex(&self, e: &Element) -> Result<VertexId> {
        self.vertex_id(e)
            .ok_or_else(|| Error::NotInBall(self.spec.display_element(e)))
    }

    pub fn neighbors(&self, v: VertexId) -> &[(Letter, VertexId)] {
        &self.adjacency[v as usize]
    }

    pub fn dist_from_center(&self, v: VertexId) -> u32 {
        self.dist[v as usize]
    }

    pub fn ids(&self) -> impl Iterator<Item = VertexId> {
        0..self.vertices.len() as VertexId
    }

    pub fn display(&self, v: VertexId) -> String {
        self.spec.display_element(self.element(v))
    }

    /// Graph BFS from `v` using only in-ball edges. Used as the independent
    /// reachability oracle against the algebraic distance.
    pub fn bfs_distances_from(&self, v: VertexId) -> Vec<Option<u32>> {
        let mut out = vec![None; self.vertices.len()];
        out[v as usize] = Some(0);
        let mut queue = VecDeque::new();
        queue.push_back(v);
        while let Some(u) = queue.pop_front() {
            let d = out[u as usize].unwrap() + 1;
            for &(_, w) in self.neighbors(u) {
                if out[w as usize].is_none() {
                    out[w as usize] = Some(d);
                    queue.push_back(w);
                }
            }
        }
        out
    }

    /// DOT rendering: vertices labeled by normal form and distance, one edge
    /// per positive letter.
    pub fn to_dot(&self, highlight: Option<&DotHighlight>) -> String {
        let mut out = String::new();
        out.push_str("graph ball {\n");
        out.push_str("    node [shape=circle fontsize=10];\n");
        for v in self.ids() {
            let mut attrs = format!(
                "label=\"{}\\nd={}\"",
                self.display(v),
                self.dist_from_center(v)
            );
            if let Some(h) = highlight {
                if h.ray.contains(&v) {
                    attrs.push_str(" color=red style=bold");
                } else if h.members.contains(&v) {
                    attrs.push_str(" color=blue style=filled fillcolor=lightblue");
                }
            }
            let _ = writeln!(out, "    v{v} [{attrs}];");
        }
        for v in self.ids() {
            for &(letter, w) in self.neighbors(v) {
                if letter.inverse || (w == v) {
                    continue;
                }
                let _ = writeln!(
                    out,
                    "    v{v} -- v{w} [label=\"{}\"];",
                    self.spec.letter_name(letter)
                );
            }
        }
        out.push_str("}\n");
        out
    }

    /// CSV of the distance table: normal_form,dist.
    pub fn distance_table_csv(&self) -> String {
        let mut out = String::from("normal_form,dist\n");
        for v in self.ids() {
            let _ = writeln!(out, "{},{}", self.display(v), self.dist_from_center(v));
        }
        out
    }
}

/// Vertex classes to color in a DOT export (ray image vs. level-set members).
#[derive(Debug, Default, Clone)]
pub struct DotHighlight {
    pub ray: std::collections::HashSet<VertexId>,
    pub members: std::collections::HashSet<VertexId>,
}
