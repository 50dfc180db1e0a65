//! Breakpoint graph over cell boundaries and its shortest-path search.
//!
//! Minimizing curves of a piecewise-constant factor are linear inside each
//! cell, so their breakpoints live on cell boundaries. The graph samples
//! every interior cut segment and every feature span with `K` evenly spaced
//! nodes (endpoints included) and connects any two nodes that lie on the
//! closed boundary of a common cell. The source and target join the cells
//! that contain them. Edges are never materialized: neighbours and weights
//! are produced on the fly from the per-cell node lists.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::SolverError;
use crate::geometry::{euclid_dist, Point, COORD_EPS};
use crate::metric::{cut_index, Axis, ConformalMetric};

/// Straight segment along which a breakpoint may slide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Host {
    pub start: Point,
    pub end: Point,
}

impl Host {
    #[inline]
    pub fn at(&self, t: f64) -> Point {
        self.start.lerp(self.end, t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphNode {
    pub point: Point,
    /// `None` for the source and target.
    pub host: Option<Host>,
}

#[derive(Debug, Clone, Copy)]
struct CellSet {
    cells: [u32; 4],
    len: u8,
}

impl CellSet {
    fn as_slice(&self) -> &[u32] {
        &self.cells[..self.len as usize]
    }
}

/// Index of the source node.
pub const SOURCE: usize = 0;
/// Index of the target node.
pub const TARGET: usize = 1;

pub struct BreakpointGraph<'m> {
    metric: &'m ConformalMetric,
    nodes: Vec<GraphNode>,
    node_cells: Vec<CellSet>,
    cell_nodes: Vec<Vec<u32>>,
}

impl<'m> BreakpointGraph<'m> {
    /// Build the graph for `p → q` with `k` samples per cut segment and feature span.
    pub fn build(metric: &'m ConformalMetric, p: Point, q: Point, k: usize) -> Result<Self, SolverError> {
        if k < 2 {
            return Err(SolverError::Config(format!(
                "samples per edge must be at least 2, got {k}"
            )));
        }
        let part = metric.partition();
        let (nx, ny) = (part.nx(), part.ny());
        let (xs, ys) = (part.x_cuts(), part.y_cuts());

        let mut hosts: Vec<Host> = Vec::new();
        for &x in &xs[1..nx] {
            for w in ys.windows(2) {
                hosts.push(host_between((x, w[0]), (x, w[1])));
            }
        }
        for &y in &ys[1..ny] {
            for w in xs.windows(2) {
                hosts.push(host_between((w[0], y), (w[1], y)));
            }
        }
        for f in metric.features() {
            let [lo, hi] = f.span;
            hosts.push(match f.axis {
                Axis::Vertical => host_between((f.position, lo), (f.position, hi)),
                Axis::Horizontal => host_between((lo, f.position), (hi, f.position)),
            });
        }

        let mut nodes = Vec::with_capacity(2 + k * hosts.len());
        nodes.push(GraphNode { point: p, host: None });
        nodes.push(GraphNode { point: q, host: None });
        let denom = (k - 1) as f64;
        for host in &hosts {
            for s in 0..k {
                let t = s as f64 / denom;
                nodes.push(GraphNode {
                    point: host.at(t),
                    host: Some(*host),
                });
            }
        }

        let mut cell_nodes = vec![Vec::new(); nx * ny];
        let node_cells: Vec<CellSet> = nodes
            .iter()
            .enumerate()
            .map(|(idx, node)| {
                let set = containing_cells(metric, node.point);
                for &c in set.as_slice() {
                    cell_nodes[c as usize].push(idx as u32);
                }
                set
            })
            .collect();

        Ok(BreakpointGraph {
            metric,
            nodes,
            node_cells,
            cell_nodes,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[GraphNode] {
        &self.nodes
    }

    /// Neighbours of `u` with the weighted length of the connecting segment.
    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.node_cells[u].as_slice().iter().flat_map(move |&c| {
            self.cell_nodes[c as usize]
                .iter()
                .map(|&v| v as usize)
                .filter(move |&v| v != u)
                .map(move |v| (v, self.edge_weight(u, v, c as usize)))
        })
    }

    /// True if an edge between `u` and `v` exists.
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).any(|(w, _)| w == v)
    }

    /// Weighted length of the straight segment between two nodes of cell `c`.
    /// Inside a closed cell the segment is either interior (cell weight) or
    /// runs along one side (that side's effective weight).
    #[inline]
    fn edge_weight(&self, u: usize, v: usize, c: usize) -> f64 {
        let (a, b) = (self.nodes[u].point, self.nodes[v].point);
        let len = euclid_dist(a, b);
        if len == 0.0 {
            return 0.0;
        }
        let part = self.metric.partition();
        let nx = part.nx();
        let (i, j) = (c % nx, c / nx);
        let (xs, ys) = (part.x_cuts(), part.y_cuts());
        let on = |va: f64, vb: f64, line: f64| (va - line).abs() <= COORD_EPS && (vb - line).abs() <= COORD_EPS;
        let w = if on(a.x(), b.x(), xs[i]) {
            self.metric.vertical_edge_weight(i, j)
        } else if on(a.x(), b.x(), xs[i + 1]) {
            self.metric.vertical_edge_weight(i + 1, j)
        } else if on(a.y(), b.y(), ys[j]) {
            self.metric.horizontal_edge_weight(j, i)
        } else if on(a.y(), b.y(), ys[j + 1]) {
            self.metric.horizontal_edge_weight(j + 1, i)
        } else {
            part.weight(i, j)
        };
        w * len
    }

    /// Dijkstra from the source to the target. Ties are broken by
    /// `(distance, node index)`, so paths are reproducible. Zero-weight
    /// edges are allowed.
    pub fn shortest_path(&self) -> (f64, Vec<usize>) {
        let n = self.nodes.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut prev = vec![usize::MAX; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[SOURCE] = 0.0;
        heap.push(HeapEntry { cost: 0.0, node: SOURCE });

        while let Some(HeapEntry { cost, node: u }) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            if u == TARGET {
                break;
            }
            for (v, w) in self.neighbors(u) {
                if done[v] {
                    continue;
                }
                let next = cost + w;
                if next < dist[v] {
                    dist[v] = next;
                    prev[v] = u;
                    heap.push(HeapEntry { cost: next, node: v });
                }
            }
        }

        let mut path = vec![TARGET];
        let mut cur = TARGET;
        while cur != SOURCE {
            cur = prev[cur];
            debug_assert_ne!(cur, usize::MAX, "source and target always connected");
            path.push(cur);
        }
        path.reverse();
        (dist[TARGET], path)
    }
}

fn host_between(a: (f64, f64), b: (f64, f64)) -> Host {
    Host {
        start: Point::new(a.0, a.1).expect("cut coordinates lie in [0,1]"),
        end: Point::new(b.0, b.1).expect("cut coordinates lie in [0,1]"),
    }
}

/// Every cell whose closed rectangle contains `p`.
fn containing_cells(metric: &ConformalMetric, p: Point) -> CellSet {
    let part = metric.partition();
    let span = |cuts: &[f64], v: f64, locate: usize| -> ([usize; 2], usize) {
        match cut_index(cuts, v) {
            Some(0) => ([0, 0], 1),
            Some(k) if k == cuts.len() - 1 => ([k - 1, 0], 1),
            Some(k) => ([k - 1, k], 2),
            None => ([locate, 0], 1),
        }
    };
    let (cols, ncols) = span(part.x_cuts(), p.x(), part.column_of(p.x()));
    let (rows, nrows) = span(part.y_cuts(), p.y(), part.row_of(p.y()));
    let mut set = CellSet { cells: [0; 4], len: 0 };
    for &j in &rows[..nrows] {
        for &i in &cols[..ncols] {
            set.cells[set.len as usize] = (j * part.nx() + i) as u32;
            set.len += 1;
        }
    }
    set
}

#[derive(Debug, Clone, Copy)]
struct HeapEntry {
    cost: f64,
    node: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    // Reversed so the max-heap pops the smallest (cost, node).
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
