//! Shared fixtures and independent oracles for the integration suites.
//!
//! The oracles never call into the implementation paths they check: trip
//! costs are recomputed from the definition and optima come from
//! exhaustive enumeration.

use std::path::PathBuf;

use carp_aco::graph::{build_network, shortest_paths, DistanceTables, Network};
use carp_aco::instance::{EdgeRecord, InstanceFile};
use carp_aco::{ArcId, Cost, Demand};

pub fn triangle_instance() -> InstanceFile {
    InstanceFile {
        name: "triangle".into(),
        node_count: 3,
        depot: 1,
        capacity: 2,
        lower_bound: None,
        vehicles: None,
        edges: vec![
            EdgeRecord { u: 1, v: 2, cost: 1, demand: 1, required: true },
            EdgeRecord { u: 2, v: 3, cost: 1, demand: 1, required: true },
            EdgeRecord { u: 3, v: 1, cost: 1, demand: 1, required: true },
        ],
    }
}

pub fn build(inst: &InstanceFile) -> (Network, DistanceTables) {
    let net = build_network(inst).expect("fixture builds");
    let dist = shortest_paths(&net).expect("fixture is connected");
    (net, dist)
}

/// Root of the bundled instance tree, overridable via CARP_INSTANCE_DIR.
pub fn instance_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances")
}

/// Locates a benchmark file under `$CARP_INSTANCE_DIR` (flat or tree
/// layout) or the bundled tree. `rel` is like "gdb/gdb4.dat".
pub fn locate(rel: &str) -> Option<PathBuf> {
    let mut candidates = Vec::new();
    if let Ok(dir) = std::env::var("CARP_INSTANCE_DIR") {
        let dir = PathBuf::from(dir);
        candidates.push(dir.join(rel));
        if let Some(base) = std::path::Path::new(rel).file_name() {
            candidates.push(dir.join(base));
        }
    }
    candidates.push(instance_root().join(rel));
    candidates.into_iter().find(|p| p.exists())
}

pub fn missing_data_msg(criterion: &str, files: &[&str]) -> String {
    format!(
        "{criterion}: published benchmark file(s) {files:?} are not available. This environment \
         has no network access to the benchmark archive; drop the standard gdb/val/egl files \
         under instances/ (or point CARP_INSTANCE_DIR at them) and re-run to exercise this \
         criterion against real data."
    )
}

/// Trip cost straight from the definition; independent of split/evaluate.
fn oracle_trip_cost(seg: &[ArcId], net: &Network, dist: &DistanceTables) -> Option<Cost> {
    let load: Demand = seg.iter().map(|&a| net.arc(a).demand).sum();
    if load > net.capacity {
        return None;
    }
    let mut c = dist.nodes(net.depot, net.arc(seg[0]).tail);
    for w in 0..seg.len() {
        c += net.arc(seg[w]).cost;
        if w + 1 < seg.len() {
            c += dist.nodes(net.arc(seg[w]).head, net.arc(seg[w + 1]).tail);
        }
    }
    Some(c + dist.nodes(net.arc(seg[seg.len() - 1]).head, net.depot))
}

/// Minimum cost over all 2^(t-1) segmentations of a fixed task order.
pub fn exhaustive_split_cost(tasks: &[ArcId], net: &Network, dist: &DistanceTables) -> Cost {
    let t = tasks.len();
    if t == 0 {
        return 0;
    }
    assert!(t <= 20, "exhaustive segmentation oracle is for small tours");
    let mut best = Cost::MAX;
    for mask in 0..(1u64 << (t - 1)) {
        let mut cost = 0;
        let mut start = 0;
        let mut ok = true;
        for p in 0..t {
            if p == t - 1 || mask & (1 << p) != 0 {
                match oracle_trip_cost(&tasks[start..=p], net, dist) {
                    Some(c) => cost += c,
                    None => {
                        ok = false;
                        break;
                    }
                }
                start = p + 1;
            }
        }
        if ok {
            best = best.min(cost);
        }
    }
    best
}

/// Exhaustive CARP optimum: every permutation of the required edges, every
/// orientation, every segmentation. Only sane for a handful of tasks.
pub fn exhaustive_carp_optimum(net: &Network, dist: &DistanceTables) -> Cost {
    let edges: Vec<usize> = (0..net.edges.len()).filter(|&e| net.edges[e].required).collect();
    let t = edges.len();
    assert!(t <= 7, "exhaustive optimum oracle is for tiny instances");
    let mut perm = edges.clone();
    let mut best = Cost::MAX;
    permute(&mut perm, 0, &mut |order: &[usize]| {
        for orient in 0..(1u32 << t) {
            let tasks: Vec<ArcId> = order
                .iter()
                .enumerate()
                .map(|(i, &e)| 2 * e + 1 + ((orient >> i) & 1) as usize)
                .collect();
            let c = exhaustive_split_cost(&tasks, net, dist);
            if c < best {
                best = c;
            }
        }
    });
    best
}

fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Replaces wall-clock cells of a delimited results table with `T` so that
/// deterministic runs compare byte-identically. Timing is environment
/// noise, not algorithm output; every other byte must match exactly.
pub fn mask_times(table: &str) -> String {
    let mut lines = table.lines();
    let header = match lines.next() {
        Some(h) => h,
        None => return String::new(),
    };
    let cols: Vec<&str> = header.split('\t').collect();
    let timed: Vec<bool> = cols
        .iter()
        .map(|c| c.starts_with("time_best") || c.starts_with("time_total") || *c == "avg_time")
        .collect();
    let mut out = String::from(header);
    out.push('\n');
    for line in lines {
        if line.starts_with('#') {
            out.push_str(line);
            out.push('\n');
            continue;
        }
        let cells: Vec<String> = line
            .split('\t')
            .enumerate()
            .map(|(i, c)| if timed.get(i).copied().unwrap_or(false) { "T".into() } else { c.into() })
            .collect();
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    out
}
