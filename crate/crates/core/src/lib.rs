//! Capacitated Arc Routing Problem (CARP) solver.
//!
//! A CARP instance is an undirected network with a depot, a vehicle
//! capacity Q and a set of required edges. Each required edge must be
//! serviced by exactly one vehicle trip; trips start and end at the depot
//! and the demand carried by a trip may not exceed Q. The objective is
//! the total of service costs plus deadheading (non-service traversal)
//! costs over all trips.
//!
//! The solver is an elitist ant colony: a population of giant tours
//! (capacity-relaxed task sequences) is seeded by classical constructive
//! heuristics, then iteratively rebuilt by ants guided by pheromone
//! trails and a distance-based saving measure. Tours are evaluated by
//! optimally splitting them into capacity-feasible trips, and improved
//! by a first-improvement local search.

pub mod bench;
pub mod colony;
pub mod graph;
pub mod heuristics;
pub mod instance;
pub mod local_search;
pub mod split;

pub use colony::{ColonyParams, RunOutcome};
pub use graph::{DistanceTables, Network};
pub use instance::InstanceFile;
pub use split::{GiantTour, Solution, Trip};

/// Traversal/service costs and solution values. All benchmark instances
/// use integer costs, so solution costs are exact integers.
pub type Cost = i64;
/// Edge demands and vehicle loads.
pub type Demand = i64;
/// 1-based node id, matching the published instance files.
pub type NodeId = usize;
/// Arc index into [`Network::arcs`]: 0 is the depot dummy loop, edge `e`
/// owns the forward arc `2e+1` and the reverse arc `2e+2`.
pub type ArcId = usize;
/// 0-based index into [`Network::edges`].
pub type EdgeId = usize;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid instance: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error("node {0} is unreachable from the depot")]
    Unreachable(NodeId),
    #[error("{0}")]
    Infeasible(String),
    #[error("degenerate instance: maximal inter-task distance is zero")]
    ZeroMaxDistance,
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
