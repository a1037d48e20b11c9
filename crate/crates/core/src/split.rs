//! Optimal splitting of giant tours into capacity-feasible trips.
//!
//! A giant tour is an ordered, oriented sequence of all tasks with the
//! capacity constraint relaxed. Splitting is a shortest path in the
//! auxiliary DAG whose node `p` means "first `p` tasks assigned" and whose
//! arc `(p,q)` exists iff tasks `p+1..=q` fit one vehicle, weighted by the
//! cost of the trip serving them in order. The search respects the given
//! task order and orientations.
//!
//! Ties between equal-cost segmentations are broken toward fewer trips,
//! then lexicographically earliest break points, so results are fully
//! deterministic. The DP runs backward over suffixes, which makes the
//! earliest-break tie-break a simple "keep the smallest continuation".

use crate::graph::{DistanceTables, Network};
use crate::{ArcId, Cost, Demand, Error, Result};

/// Ordered sequence of required arcs, one orientation per required edge,
/// no trip delimiters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GiantTour {
    pub tasks: Vec<ArcId>,
}

impl GiantTour {
    pub fn new(tasks: Vec<ArcId>) -> Self {
        GiantTour { tasks }
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    /// Checks the permutation property: every required edge appears exactly
    /// once, in exactly one orientation, and the dummy loop never does.
    pub fn is_valid(&self, net: &Network) -> bool {
        let mut seen = vec![false; net.edges.len()];
        for &a in &self.tasks {
            if a == crate::graph::DUMMY_ARC || a >= net.arcs.len() {
                return false;
            }
            let arc = net.arc(a);
            if !arc.required || seen[arc.edge] {
                return false;
            }
            seen[arc.edge] = true;
        }
        self.tasks.len() == net.task_count()
    }
}

/// One capacity-feasible trip: serviced arcs in order, total load and cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trip {
    pub tasks: Vec<ArcId>,
    pub load: Demand,
    pub cost: Cost,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub trips: Vec<Trip>,
    pub total_cost: Cost,
}

impl Solution {
    pub fn empty() -> Self {
        Solution { trips: Vec::new(), total_cost: 0 }
    }

    /// Feasibility check used by tests and the bench harness: loads within
    /// capacity, exact disjoint coverage of the required edges, and trip
    /// costs that re-derive from scratch.
    pub fn check(&self, net: &Network, dist: &DistanceTables) -> std::result::Result<(), String> {
        let mut seen = vec![false; net.edges.len()];
        let mut total = 0;
        for (i, trip) in self.trips.iter().enumerate() {
            if trip.tasks.is_empty() {
                return Err(format!("trip {} is empty", i + 1));
            }
            let fresh = evaluate_trip(&trip.tasks, net, dist);
            if fresh.load > net.capacity {
                return Err(format!("trip {} load {} exceeds Q", i + 1, fresh.load));
            }
            if fresh.cost != trip.cost || fresh.load != trip.load {
                return Err(format!("trip {} stored cost/load differ from re-evaluation", i + 1));
            }
            for &a in &trip.tasks {
                let arc = net.arc(a);
                if !arc.required {
                    return Err(format!("trip {} services non-required arc {a}", i + 1));
                }
                if seen[arc.edge] {
                    return Err(format!("edge {} serviced twice", arc.edge));
                }
                seen[arc.edge] = true;
            }
            total += trip.cost;
        }
        if let Some(e) = (0..net.edges.len()).find(|&e| net.edges[e].required && !seen[e]) {
            return Err(format!("required edge {e} never serviced"));
        }
        if total != self.total_cost {
            return Err(format!("total {} differs from trip sum {total}", self.total_cost));
        }
        Ok(())
    }
}

/// Trip cost: depot-out deadhead, service costs, inter-task deadheads,
/// depot-back deadhead. Load is the demand sum.
pub fn evaluate_trip(tasks: &[ArcId], net: &Network, dist: &DistanceTables) -> Trip {
    assert!(!tasks.is_empty(), "evaluate_trip needs at least one task");
    let depot = net.depot;
    let mut cost = dist.nodes(depot, net.arc(tasks[0]).tail);
    let mut load = 0;
    for (k, &a) in tasks.iter().enumerate() {
        let arc = net.arc(a);
        cost += arc.cost;
        load += arc.demand;
        if let Some(&b) = tasks.get(k + 1) {
            cost += dist.nodes(arc.head, net.arc(b).tail);
        }
    }
    cost += dist.nodes(net.arc(*tasks.last().unwrap()).head, depot);
    Trip { tasks: tasks.to_vec(), load, cost }
}

/// Splits a giant tour into the minimum-total-cost set of consecutive
/// capacity-feasible trips. Errors when a single task exceeds capacity.
pub fn split(tour: &GiantTour, net: &Network, dist: &DistanceTables) -> Result<Solution> {
    let t = tour.tasks.len();
    if t == 0 {
        return Ok(Solution::empty());
    }
    for &a in &tour.tasks {
        if net.arc(a).demand > net.capacity {
            return Err(Error::Infeasible(format!(
                "task arc {a} demand {} exceeds capacity {}; no feasible segmentation",
                net.arc(a).demand,
                net.capacity
            )));
        }
    }

    let depot = net.depot;
    // best[i]: (cost, trips) over the suffix starting at task i; next[i] is
    // the end of the first trip of that suffix. Scanning q upward and
    // accepting only strict improvements keeps the smallest continuation,
    // i.e. the lexicographically earliest break points.
    let mut best = vec![(Cost::MAX, usize::MAX); t + 1];
    let mut next = vec![0usize; t + 1];
    best[t] = (0, 0);
    for i in (0..t).rev() {
        let first = net.arc(tour.tasks[i]);
        let out = dist.nodes(depot, first.tail);
        let mut body = first.cost;
        let mut load = first.demand;
        let mut prev_head = first.head;
        let mut q = i + 1;
        loop {
            let back = dist.nodes(prev_head, depot);
            let (scost, strips) = best[q];
            if scost != Cost::MAX {
                let cand = (out + body + back + scost, strips + 1);
                if cand < best[i] {
                    best[i] = cand;
                    next[i] = q;
                }
            }
            if q == t {
                break;
            }
            let arc = net.arc(tour.tasks[q]);
            if load + arc.demand > net.capacity {
                break;
            }
            body += dist.nodes(prev_head, arc.tail) + arc.cost;
            load += arc.demand;
            prev_head = arc.head;
            q += 1;
        }
    }

    let mut trips = Vec::new();
    let mut p = 0;
    while p < t {
        let q = next[p];
        trips.push(evaluate_trip(&tour.tasks[p..q], net, dist));
        p = q;
    }
    let total_cost = best[0].0;
    debug_assert_eq!(total_cost, trips.iter().map(|tr| tr.cost).sum::<Cost>());
    Ok(Solution { trips, total_cost })
}

/// Cost of the optimal split without materializing trips. This is the hot
/// path of the local search; it must agree exactly with [`split`].
pub fn split_cost(tasks: &[ArcId], net: &Network, dist: &DistanceTables, dp: &mut Vec<Cost>) -> Cost {
    split_cost_bounded(tasks, net, dist, dp, Cost::MAX)
}

/// Like [`split_cost`], but prunes DP states that already reach `bound`.
/// Block extensions only ever add cost, so a state at or above the bound
/// cannot lead to a final cost below it: the return value is exact
/// whenever it is below `bound`, and `>= bound` otherwise.
pub fn split_cost_bounded(
    tasks: &[ArcId],
    net: &Network,
    dist: &DistanceTables,
    dp: &mut Vec<Cost>,
    bound: Cost,
) -> Cost {
    let t = tasks.len();
    if t == 0 {
        return 0;
    }
    let depot = net.depot;
    dp.clear();
    dp.resize(t + 1, Cost::MAX);
    dp[0] = 0;
    for i in 0..t {
        let base = dp[i];
        if base >= bound {
            continue;
        }
        let first = net.arc(tasks[i]);
        let mut acc = base + dist.nodes(depot, first.tail) + first.cost;
        let mut load = first.demand;
        let mut prev_head = first.head;
        let mut q = i + 1;
        loop {
            let complete = acc + dist.nodes(prev_head, depot);
            if complete < dp[q] {
                dp[q] = complete;
            }
            if q == t {
                break;
            }
            let arc = net.arc(tasks[q]);
            if load + arc.demand > net.capacity {
                break;
            }
            acc += dist.nodes(prev_head, arc.tail) + arc.cost;
            load += arc.demand;
            prev_head = arc.head;
            q += 1;
        }
    }
    dp[t]
}

/// Drops trip delimiters: the concatenation of a solution's task sequences
/// is again a giant tour.
pub fn concatenate(sol: &Solution) -> GiantTour {
    GiantTour::new(sol.trips.iter().flat_map(|t| t.tasks.iter().copied()).collect())
}
