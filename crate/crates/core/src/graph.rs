//! Internal directed representation of an undirected CARP instance.
//!
//! The undirected network is stored as an arc list: every edge becomes two
//! opposite arcs sharing the edge id, and a dummy loop arc with cost 0 sits
//! on the depot so that "leaving the depot" is just another arc-to-arc
//! transition. All node-to-node and arc-to-arc shortest path tables are
//! precomputed here; the colony queries them millions of times.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::instance::InstanceFile;
use crate::{ArcId, Cost, Demand, EdgeId, Error, NodeId, Result};

/// Dummy loop arc on the depot (cost 0, demand 0).
pub const DUMMY_ARC: ArcId = 0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub cost: Cost,
    pub demand: Demand,
    pub required: bool,
}

/// One directed orientation of an edge, or the depot dummy loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub tail: NodeId,
    pub head: NodeId,
    pub cost: Cost,
    pub demand: Demand,
    pub edge: EdgeId,
    pub required: bool,
}

#[derive(Debug, Clone)]
pub struct Network {
    pub name: String,
    pub node_count: usize,
    pub depot: NodeId,
    pub capacity: Demand,
    pub edges: Vec<Edge>,
    /// Arc 0 is the dummy loop; edge `e` maps to arcs `2e+1` (u->v) and `2e+2` (v->u).
    pub arcs: Vec<Arc>,
    /// Both orientations of every required edge, ascending by arc id.
    pub required_arcs: Vec<ArcId>,
}

impl Network {
    pub fn arc(&self, id: ArcId) -> &Arc {
        &self.arcs[id]
    }

    /// The opposite orientation of `id` (the dummy loop is its own opposite).
    pub fn opposite(&self, id: ArcId) -> ArcId {
        if id == DUMMY_ARC {
            DUMMY_ARC
        } else if id % 2 == 1 {
            id + 1
        } else {
            id - 1
        }
    }

    pub fn forward_arc(&self, edge: EdgeId) -> ArcId {
        2 * edge + 1
    }

    /// Number of required edges (tasks).
    pub fn task_count(&self) -> usize {
        self.required_arcs.len() / 2
    }

    pub fn total_demand(&self) -> Demand {
        self.edges.iter().filter(|e| e.required).map(|e| e.demand).sum()
    }
}

/// Builds the arc-indexed network. Arc enumeration is deterministic:
/// dummy loop first, then for edge index `e` the forward arc `2e+1`
/// followed by the reverse arc `2e+2`.
pub fn build_network(instance: &InstanceFile) -> Result<Network> {
    for (i, e) in instance.edges.iter().enumerate() {
        if e.cost <= 0 {
            return Err(Error::Infeasible(format!(
                "edge {} ({},{}) has non-positive cost {}",
                i + 1,
                e.u,
                e.v,
                e.cost
            )));
        }
        if e.demand < 0 {
            return Err(Error::Infeasible(format!(
                "edge {} ({},{}) has negative demand {}",
                i + 1,
                e.u,
                e.v,
                e.demand
            )));
        }
        if e.required && e.demand > instance.capacity {
            return Err(Error::Infeasible(format!(
                "edge {} ({},{}) demand {} exceeds capacity {}",
                i + 1,
                e.u,
                e.v,
                e.demand,
                instance.capacity
            )));
        }
    }

    let edges: Vec<Edge> = instance
        .edges
        .iter()
        .map(|e| Edge {
            u: e.u,
            v: e.v,
            cost: e.cost,
            demand: e.demand,
            required: e.required,
        })
        .collect();

    let mut arcs = Vec::with_capacity(2 * edges.len() + 1);
    arcs.push(Arc {
        tail: instance.depot,
        head: instance.depot,
        cost: 0,
        demand: 0,
        edge: usize::MAX,
        required: false,
    });
    for (id, e) in edges.iter().enumerate() {
        arcs.push(Arc {
            tail: e.u,
            head: e.v,
            cost: e.cost,
            demand: e.demand,
            edge: id,
            required: e.required,
        });
        arcs.push(Arc {
            tail: e.v,
            head: e.u,
            cost: e.cost,
            demand: e.demand,
            edge: id,
            required: e.required,
        });
    }
    let required_arcs = (1..arcs.len()).filter(|&a| arcs[a].required).collect();

    Ok(Network {
        name: instance.name.clone(),
        node_count: instance.node_count,
        depot: instance.depot,
        capacity: instance.capacity,
        edges,
        arcs,
        required_arcs,
    })
}

/// Precomputed shortest-path tables.
///
/// `arc_dist[i][j]` is the deadheading cost incurred between servicing arc
/// `i` and then arc `j`: the shortest node path from the head of `i` to the
/// tail of `j`. `max_arc_dist` is the maximum of that quantity over required
/// arcs plus the dummy loop, so depot transitions also have defined savings.
#[derive(Debug, Clone)]
pub struct DistanceTables {
    /// `node_dist[u][v]`, 1-based; row/column 0 unused.
    pub node_dist: Vec<Vec<Cost>>,
    /// Shortest-path parent of `v` in the tree rooted at `u`, for walk reconstruction.
    parent: Vec<Vec<NodeId>>,
    /// `arc_dist[i][j] = node_dist[head(i)][tail(j)]` over all arcs incl. the dummy.
    pub arc_dist: Vec<Vec<Cost>>,
    pub max_arc_dist: Cost,
}

impl DistanceTables {
    #[inline]
    pub fn nodes(&self, u: NodeId, v: NodeId) -> Cost {
        self.node_dist[u][v]
    }

    #[inline]
    pub fn arcs(&self, i: ArcId, j: ArcId) -> Cost {
        self.arc_dist[i][j]
    }

    /// Node sequence of a shortest path from `u` to `v`, endpoints included.
    pub fn path_nodes(&self, u: NodeId, v: NodeId) -> Vec<NodeId> {
        let mut path = vec![v];
        let mut cur = v;
        while cur != u {
            cur = self.parent[u][cur];
            path.push(cur);
        }
        path.reverse();
        path
    }
}

/// Saving measure of chaining arc `j` after arc `i`: `(M_d - w_ij) / M_d`,
/// in [0, 1], antitone in the inter-arc distance.
pub fn saving(dist: &DistanceTables, i: ArcId, j: ArcId) -> Result<f64> {
    if dist.max_arc_dist == 0 {
        return Err(Error::ZeroMaxDistance);
    }
    Ok((dist.max_arc_dist - dist.arc_dist[i][j]) as f64 / dist.max_arc_dist as f64)
}

/// Runs Dijkstra from every node (costs are positive integers, so the
/// labels are exact) and derives the arc-to-arc table and its maximum
/// over required arcs and the dummy loop.
pub fn shortest_paths(net: &Network) -> Result<DistanceTables> {
    let n = net.node_count;
    let mut adj: Vec<Vec<(NodeId, Cost)>> = vec![Vec::new(); n + 1];
    for e in &net.edges {
        adj[e.u].push((e.v, e.cost));
        adj[e.v].push((e.u, e.cost));
    }

    let mut node_dist = vec![vec![Cost::MAX; n + 1]; n + 1];
    let mut parent = vec![vec![0usize; n + 1]; n + 1];
    for src in 1..=n {
        let dist = &mut node_dist[src];
        let par = &mut parent[src];
        dist[src] = 0;
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((0, src)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(v, w) in &adj[u] {
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    par[v] = u;
                    heap.push(Reverse((nd, v)));
                }
            }
        }
    }

    for v in 1..=n {
        if node_dist[net.depot][v] == Cost::MAX {
            return Err(Error::Unreachable(v));
        }
    }

    let a = net.arcs.len();
    let mut arc_dist = vec![vec![0; a]; a];
    for i in 0..a {
        let head = net.arcs[i].head;
        for j in 0..a {
            arc_dist[i][j] = node_dist[head][net.arcs[j].tail];
        }
    }

    let mut max_arc_dist = 0;
    let mut over = net.required_arcs.clone();
    over.push(DUMMY_ARC);
    for &i in &over {
        for &j in &over {
            max_arc_dist = max_arc_dist.max(arc_dist[i][j]);
        }
    }

    Ok(DistanceTables {
        node_dist,
        parent,
        arc_dist,
        max_arc_dist,
    })
}
