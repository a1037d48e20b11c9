//! Constructive heuristics seeding the initial population.
//!
//! Three classical CARP constructions plus uniformly random giant tours.
//! All tie-breaks are deterministic (lowest arc id), so only the random
//! tours consume randomness.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{DistanceTables, Network, DUMMY_ARC};
use crate::split::{evaluate_trip, split, GiantTour, Solution, Trip};
use crate::{ArcId, Cost, Demand, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanCriterion {
    /// Minimize deadhead distance to the next serviced arc.
    MinDistance,
    /// Maximize demand collected per unit of deadhead.
    MaxProductivity,
}

/// Builds one trip at a time: from the current position, service the most
/// promising required arc that still fits the residual capacity; close the
/// trip when nothing fits.
pub fn path_scanning(net: &Network, dist: &DistanceTables, criterion: ScanCriterion) -> Solution {
    let mut unserviced = vec![false; net.edges.len()];
    let mut remaining = 0;
    for e in 0..net.edges.len() {
        if net.edges[e].required {
            unserviced[e] = true;
            remaining += 1;
        }
    }

    let mut trips: Vec<Trip> = Vec::new();
    while remaining > 0 {
        let mut tasks: Vec<ArcId> = Vec::new();
        let mut load: Demand = 0;
        let mut pos: NodeId = net.depot;
        loop {
            let mut chosen: Option<(ArcId, Cost, Demand)> = None;
            for &a in &net.required_arcs {
                let arc = net.arc(a);
                if !unserviced[arc.edge] || load + arc.demand > net.capacity {
                    continue;
                }
                let d = dist.nodes(pos, arc.tail);
                let better = match chosen {
                    None => true,
                    Some((_, bd, bq)) => match criterion {
                        ScanCriterion::MinDistance => d < bd,
                        // Compare q/d by cross-multiplication; equal ratios
                        // prefer the larger demand, then the lower arc id.
                        ScanCriterion::MaxProductivity => {
                            arc.demand * bd > bq * d
                                || (arc.demand * bd == bq * d && arc.demand > bq)
                        }
                    },
                };
                if better {
                    chosen = Some((a, d, arc.demand));
                }
            }
            match chosen {
                Some((a, _, _)) => {
                    let arc = net.arc(a);
                    unserviced[arc.edge] = false;
                    remaining -= 1;
                    load += arc.demand;
                    pos = arc.head;
                    tasks.push(a);
                }
                None => break,
            }
        }
        trips.push(evaluate_trip(&tasks, net, dist));
    }

    let total_cost = trips.iter().map(|t| t.cost).sum();
    Solution { trips, total_cost }
}

fn reverse_tasks(net: &Network, tasks: &[ArcId]) -> Vec<ArcId> {
    tasks.iter().rev().map(|&a| net.opposite(a)).collect()
}

/// Phase 1 services every required edge by its own trip; Augment absorbs
/// single trips whose edge already lies on a longer trip's deadhead paths;
/// Merge repeatedly applies the feasible trip concatenation with the
/// largest positive saving.
pub fn augment_merge(net: &Network, dist: &DistanceTables) -> Solution {
    // Phase 1: one trip per required edge, cheaper orientation.
    let mut trips: Vec<Option<Trip>> = Vec::new();
    for e in 0..net.edges.len() {
        if !net.edges[e].required {
            continue;
        }
        let fwd = evaluate_trip(&[net.forward_arc(e)], net, dist);
        let rev = evaluate_trip(&[net.forward_arc(e) + 1], net, dist);
        trips.push(Some(if rev.cost < fwd.cost { rev } else { fwd }));
    }

    // Phase 2 (Augment): longest trips first. `singles` maps an edge to the
    // index of the still-single trip servicing it.
    let mut order: Vec<usize> = (0..trips.len()).collect();
    order.sort_by_key(|&i| (-trips[i].as_ref().unwrap().cost, i));
    let mut singles: HashMap<usize, usize> = trips
        .iter()
        .enumerate()
        .map(|(i, t)| (net.arc(t.as_ref().unwrap().tasks[0]).edge, i))
        .collect();
    let edge_by_pair: HashMap<(NodeId, NodeId), usize> = net
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| ((e.u.min(e.v), e.u.max(e.v)), i))
        .collect();

    for &ti in &order {
        let Some(trip) = trips[ti].clone() else { continue };
        let mut load = trip.load;
        let mut new_tasks: Vec<ArcId> = Vec::new();
        let mut absorbed_any = false;
        let mut pos = net.depot;

        let absorb_along = |from: NodeId,
                                to: NodeId,
                                out: &mut Vec<ArcId>,
                                load: &mut Demand,
                                trips: &mut Vec<Option<Trip>>,
                                singles: &mut HashMap<usize, usize>|
         -> bool {
            let mut hit = false;
            for w in dist.path_nodes(from, to).windows(2) {
                let (x, y) = (w[0], w[1]);
                let Some(&e) = edge_by_pair.get(&(x.min(y), x.max(y))) else { continue };
                let Some(&si) = singles.get(&e) else { continue };
                if si == ti || *load + net.edges[e].demand > net.capacity {
                    continue;
                }
                // Service the edge in passing, oriented along the walk.
                let arc = if net.edges[e].u == x {
                    net.forward_arc(e)
                } else {
                    net.forward_arc(e) + 1
                };
                out.push(arc);
                *load += net.edges[e].demand;
                trips[si] = None;
                singles.remove(&e);
                hit = true;
            }
            hit
        };

        for &task in &trip.tasks {
            let tail = net.arc(task).tail;
            absorbed_any |= absorb_along(pos, tail, &mut new_tasks, &mut load, &mut trips, &mut singles);
            new_tasks.push(task);
            pos = net.arc(task).head;
        }
        absorbed_any |=
            absorb_along(pos, net.depot, &mut new_tasks, &mut load, &mut trips, &mut singles);

        if absorbed_any {
            let grown = evaluate_trip(&new_tasks, net, dist);
            // Absorbed edges sat on shortest deadhead paths, so the cost is
            // unchanged while the saving is the absorbed trips' full costs.
            debug_assert_eq!(grown.cost, trip.cost);
            singles.remove(&net.arc(trip.tasks[0]).edge);
            trips[ti] = Some(grown);
        }
    }

    let mut alive: Vec<Trip> = trips.into_iter().flatten().collect();

    // Phase 3 (Merge): best positive-saving concatenation, repeated. Each
    // pair is tried in four orientation combinations; reversal covers the
    // symmetric pair orders.
    loop {
        let mut best: Option<(usize, usize, usize, Cost)> = None;
        for i in 0..alive.len() {
            for j in (i + 1)..alive.len() {
                if alive[i].load + alive[j].load > net.capacity {
                    continue;
                }
                for combo in 0..4 {
                    let a = if combo & 1 == 0 {
                        alive[i].tasks.clone()
                    } else {
                        reverse_tasks(net, &alive[i].tasks)
                    };
                    let b = if combo & 2 == 0 {
                        alive[j].tasks.clone()
                    } else {
                        reverse_tasks(net, &alive[j].tasks)
                    };
                    let joined: Vec<ArcId> = a.into_iter().chain(b).collect();
                    let merged = evaluate_trip(&joined, net, dist);
                    let saving = alive[i].cost + alive[j].cost - merged.cost;
                    if saving > 0 && best.map_or(true, |(_, _, _, s)| saving > s) {
                        best = Some((i, j, combo, saving));
                    }
                }
            }
        }
        let Some((i, j, combo, _)) = best else { break };
        let a = if combo & 1 == 0 {
            alive[i].tasks.clone()
        } else {
            reverse_tasks(net, &alive[i].tasks)
        };
        let b = if combo & 2 == 0 {
            alive[j].tasks.clone()
        } else {
            reverse_tasks(net, &alive[j].tasks)
        };
        let joined: Vec<ArcId> = a.into_iter().chain(b).collect();
        let merged = evaluate_trip(&joined, net, dist);
        alive.remove(j);
        alive[i] = merged;
    }

    let total_cost = alive.iter().map(|t| t.cost).sum();
    Solution { trips: alive, total_cost }
}

/// Route first, split second: a capacity-relaxed giant tour built by
/// nearest-task chaining from the depot, then optimally split.
pub fn ulusoy_heuristic(net: &Network, dist: &DistanceTables) -> Solution {
    let tour = nearest_neighbor_tour(net, dist);
    split(&tour, net, dist).expect("instance validated: every task fits one vehicle")
}

/// The relaxed tour behind [`ulusoy_heuristic`].
pub fn nearest_neighbor_tour(net: &Network, dist: &DistanceTables) -> GiantTour {
    let mut unserviced = vec![false; net.edges.len()];
    for e in net.required_arcs.iter().map(|&a| net.arc(a).edge) {
        unserviced[e] = true;
    }
    let mut tasks = Vec::with_capacity(net.task_count());
    let mut cur: ArcId = DUMMY_ARC;
    for _ in 0..net.task_count() {
        let mut chosen: Option<(ArcId, Cost)> = None;
        for &a in &net.required_arcs {
            if !unserviced[net.arc(a).edge] {
                continue;
            }
            let w = dist.arcs(cur, a);
            if chosen.map_or(true, |(_, bw)| w < bw) {
                chosen = Some((a, w));
            }
        }
        let (a, _) = chosen.expect("tasks remain");
        unserviced[net.arc(a).edge] = false;
        tasks.push(a);
        cur = a;
    }
    GiantTour::new(tasks)
}

/// Uniformly random permutation of the required edges, each in a uniformly
/// random orientation.
pub fn random_giant_tour<R: Rng>(net: &Network, rng: &mut R) -> GiantTour {
    let mut edges: Vec<usize> = (0..net.edges.len()).filter(|&e| net.edges[e].required).collect();
    edges.shuffle(rng);
    let tasks = edges
        .into_iter()
        .map(|e| net.forward_arc(e) + usize::from(rng.gen::<bool>()))
        .collect();
    GiantTour::new(tasks)
}
