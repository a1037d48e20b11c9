//! Benchmark instance parsing, validation and solution file I/O.
//!
//! Two instance formats are supported:
//!
//! * the classic key-value format of the published gdb/val/egl files
//!   (`NOMBRE`/`VERTICES`/`LISTA_ARISTAS_REQ`/... header keywords with
//!   `( u, v) coste c demanda d` edge lines), see `docs/formats.md`;
//! * a canonical line-oriented format that round-trips byte-identically.
//!
//! Solution files store one trip per line as a depot-to-depot node walk
//! with serviced edges marked, so they can be checked against the
//! instance without trusting the solver.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::graph::{DistanceTables, Network};
use crate::split::Solution;
use crate::{Cost, Demand, Error, NodeId, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRecord {
    pub u: NodeId,
    pub v: NodeId,
    pub cost: Cost,
    pub demand: Demand,
    pub required: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub name: String,
    pub node_count: usize,
    pub depot: NodeId,
    pub capacity: Demand,
    /// Lower bound on the optimal cost, when known. Classic files do not
    /// carry bounds; benchmarks read them from a sidecar table.
    pub lower_bound: Option<Cost>,
    /// Fleet size declared by some files. Parsed but not enforced: trips
    /// are unbounded, the split procedure may open any number of them.
    pub vehicles: Option<i64>,
    pub edges: Vec<EdgeRecord>,
}

impl InstanceFile {
    pub fn required_count(&self) -> usize {
        self.edges.iter().filter(|e| e.required).count()
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_int<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse::<T>()
        .map_err(|_| parse_err(line, format!("expected integer {what}, got `{tok}`")))
}

/// Parses the classic benchmark format. Header keywords are matched
/// case-insensitively; edge lines look like `( 1, 2) coste 13 demanda 1`
/// in the required section and `( 1, 2) coste 13` in the non-required one.
pub fn parse_classic(text: &str) -> Result<InstanceFile> {
    let mut name = None;
    let mut node_count = None;
    let mut req_count = None;
    let mut nonreq_count = None;
    let mut vehicles = None;
    let mut capacity = None;
    let mut total_req_cost: Option<Cost> = None;
    let mut depot = None;
    let mut edges: Vec<EdgeRecord> = Vec::new();
    let mut seen: HashSet<(NodeId, NodeId)> = HashSet::new();

    #[derive(PartialEq)]
    enum Section {
        Header,
        Required,
        NonRequired,
    }
    let mut section = Section::Header;
    let mut any_line = false;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        any_line = true;

        if line.starts_with('(') {
            let required = match section {
                Section::Required => true,
                Section::NonRequired => false,
                Section::Header => {
                    return Err(parse_err(lineno, "edge line outside an edge list section"))
                }
            };
            let e = parse_classic_edge(line, lineno, required)?;
            let n = node_count
                .ok_or_else(|| parse_err(lineno, "edge list before vertex count"))?;
            if e.u < 1 || e.u > n || e.v < 1 || e.v > n {
                return Err(parse_err(
                    lineno,
                    format!("node id out of range [1,{n}] in ({},{})", e.u, e.v),
                ));
            }
            let key = (e.u.min(e.v), e.u.max(e.v));
            if !seen.insert(key) {
                return Err(parse_err(
                    lineno,
                    format!("duplicate edge ({},{})", key.0, key.1),
                ));
            }
            edges.push(e);
            continue;
        }

        let (key, value) = match line.split_once(':') {
            Some((k, v)) => (k.trim().to_ascii_uppercase(), v.trim()),
            None => return Err(parse_err(lineno, format!("expected `key : value`, got `{line}`"))),
        };
        match key.as_str() {
            "NOMBRE" | "NAME" => name = Some(value.to_string()),
            "COMENTARIO" | "COMMENT" => {}
            "VERTICES" => node_count = Some(parse_int(value, lineno, "vertex count")?),
            "ARISTAS_REQ" => req_count = Some(parse_int::<usize>(value, lineno, "required edge count")?),
            "ARISTAS_NOREQ" => {
                nonreq_count = Some(parse_int::<usize>(value, lineno, "non-required edge count")?)
            }
            "VEHICULOS" => vehicles = Some(parse_int(value, lineno, "vehicle count")?),
            "CAPACIDAD" => capacity = Some(parse_int(value, lineno, "capacity")?),
            "TIPO_COSTES_ARISTAS" => {}
            "COSTE_TOTAL_REQ" => {
                total_req_cost = Some(parse_int(value, lineno, "total required cost")?)
            }
            "LISTA_ARISTAS_REQ" => section = Section::Required,
            "LISTA_ARISTAS_NOREQ" => section = Section::NonRequired,
            "DEPOSITO" | "DEPOT" => depot = Some(parse_int(value, lineno, "depot")?),
            other => return Err(parse_err(lineno, format!("unknown keyword `{other}`"))),
        }
    }

    if !any_line {
        return Err(parse_err(1, "empty instance file"));
    }

    let name = name.ok_or_else(|| parse_err(1, "missing NOMBRE"))?;
    let node_count = node_count.ok_or_else(|| parse_err(1, "missing VERTICES"))?;
    let capacity = capacity.ok_or_else(|| parse_err(1, "missing CAPACIDAD"))?;
    let depot = depot.ok_or_else(|| parse_err(1, "missing DEPOSITO"))?;

    let req = edges.iter().filter(|e| e.required).count();
    let nonreq = edges.len() - req;
    if let Some(want) = req_count {
        if want != req {
            return Err(parse_err(
                1,
                format!("ARISTAS_REQ declares {want} edges but {req} were listed"),
            ));
        }
    }
    if let Some(want) = nonreq_count {
        if want != nonreq {
            return Err(parse_err(
                1,
                format!("ARISTAS_NOREQ declares {want} edges but {nonreq} were listed"),
            ));
        }
    }
    if let Some(want) = total_req_cost {
        let got: Cost = edges.iter().filter(|e| e.required).map(|e| e.cost).sum();
        if want != got {
            return Err(parse_err(
                1,
                format!("COSTE_TOTAL_REQ declares {want} but required edges sum to {got}"),
            ));
        }
    }

    Ok(InstanceFile {
        name,
        node_count,
        depot,
        capacity,
        lower_bound: None,
        vehicles,
        edges,
    })
}

fn parse_classic_edge(line: &str, lineno: usize, required: bool) -> Result<EdgeRecord> {
    let close = line
        .find(')')
        .ok_or_else(|| parse_err(lineno, "edge line missing `)`"))?;
    let inside = &line[1..close];
    let (us, vs) = inside
        .split_once(',')
        .ok_or_else(|| parse_err(lineno, "expected `(u,v)`"))?;
    let u = parse_int(us.trim(), lineno, "node id")?;
    let v = parse_int(vs.trim(), lineno, "node id")?;

    let rest: Vec<&str> = line[close + 1..].split_whitespace().collect();
    let mut cost = None;
    let mut demand = None;
    let mut k = 0;
    while k + 1 < rest.len() {
        match rest[k].to_ascii_lowercase().as_str() {
            "coste" | "cost" => cost = Some(parse_int(rest[k + 1], lineno, "cost")?),
            "demanda" | "demand" => demand = Some(parse_int(rest[k + 1], lineno, "demand")?),
            other => return Err(parse_err(lineno, format!("unknown edge field `{other}`"))),
        }
        k += 2;
    }
    let cost = cost.ok_or_else(|| parse_err(lineno, "edge line missing cost"))?;
    if required && demand.is_none() {
        return Err(parse_err(lineno, "required edge missing demand"));
    }
    Ok(EdgeRecord {
        u,
        v,
        cost,
        demand: demand.unwrap_or(0),
        required,
    })
}

/// Canonical format: line-oriented, UTF-8, integer fields, stable field
/// order. `parse_canonical(write_canonical(x)) == x` for valid instances.
pub fn write_canonical(inst: &InstanceFile) -> String {
    let mut out = String::new();
    out.push_str("carp-instance v1\n");
    let _ = writeln!(out, "name {}", inst.name);
    let _ = writeln!(out, "nodes {}", inst.node_count);
    let _ = writeln!(out, "depot {}", inst.depot);
    let _ = writeln!(out, "capacity {}", inst.capacity);
    if let Some(v) = inst.vehicles {
        let _ = writeln!(out, "vehicles {v}");
    }
    if let Some(lb) = inst.lower_bound {
        let _ = writeln!(out, "lb {lb}");
    }
    let _ = writeln!(out, "edges {}", inst.edges.len());
    for e in &inst.edges {
        let _ = writeln!(
            out,
            "e {} {} {} {} {}",
            e.u,
            e.v,
            e.cost,
            e.demand,
            if e.required { 'r' } else { 'n' }
        );
    }
    out.push_str("end\n");
    out
}

pub fn parse_canonical(text: &str) -> Result<InstanceFile> {
    let mut lines = text.lines().enumerate();
    let schema = |line: usize, field: &str| parse_err(line, format!("schema violation at `{field}`"));

    let (_, magic) = lines.next().ok_or_else(|| schema(1, "header"))?;
    if magic.trim() != "carp-instance v1" {
        return Err(schema(1, "header"));
    }

    let mut name = None;
    let mut node_count = None;
    let mut depot = None;
    let mut capacity = None;
    let mut vehicles = None;
    let mut lower_bound = None;
    let mut edge_count = None;
    let mut edges = Vec::new();
    let mut ended = false;

    for (idx, raw) in lines {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if ended {
            return Err(parse_err(lineno, "content after `end`"));
        }
        let mut toks = line.split_whitespace();
        let field = toks.next().unwrap();
        match field {
            "name" => name = Some(toks.next().ok_or_else(|| schema(lineno, "name"))?.to_string()),
            "nodes" => {
                node_count =
                    Some(parse_int(toks.next().ok_or_else(|| schema(lineno, "nodes"))?, lineno, "nodes")?)
            }
            "depot" => {
                depot =
                    Some(parse_int(toks.next().ok_or_else(|| schema(lineno, "depot"))?, lineno, "depot")?)
            }
            "capacity" => {
                capacity = Some(parse_int(
                    toks.next().ok_or_else(|| schema(lineno, "capacity"))?,
                    lineno,
                    "capacity",
                )?)
            }
            "vehicles" => {
                vehicles = Some(parse_int(
                    toks.next().ok_or_else(|| schema(lineno, "vehicles"))?,
                    lineno,
                    "vehicles",
                )?)
            }
            "lb" => {
                lower_bound =
                    Some(parse_int(toks.next().ok_or_else(|| schema(lineno, "lb"))?, lineno, "lb")?)
            }
            "edges" => {
                edge_count = Some(parse_int::<usize>(
                    toks.next().ok_or_else(|| schema(lineno, "edges"))?,
                    lineno,
                    "edges",
                )?)
            }
            "e" => {
                let mut next = |f: &str| -> Result<&str> {
                    toks.next().ok_or_else(|| schema(lineno, f))
                };
                let u = parse_int(next("edge.u")?, lineno, "edge.u")?;
                let v = parse_int(next("edge.v")?, lineno, "edge.v")?;
                let cost = parse_int(next("edge.cost")?, lineno, "edge.cost")?;
                let demand = parse_int(next("edge.demand")?, lineno, "edge.demand")?;
                let required = match next("edge.required")? {
                    "r" => true,
                    "n" => false,
                    other => {
                        return Err(parse_err(
                            lineno,
                            format!("schema violation at `edge.required`: `{other}`"),
                        ))
                    }
                };
                edges.push(EdgeRecord { u, v, cost, demand, required });
            }
            "end" => ended = true,
            other => return Err(parse_err(lineno, format!("schema violation at `{other}`"))),
        }
    }

    if !ended {
        return Err(schema(1, "end"));
    }
    let name = name.ok_or_else(|| schema(1, "name"))?;
    let node_count = node_count.ok_or_else(|| schema(1, "nodes"))?;
    let depot = depot.ok_or_else(|| schema(1, "depot"))?;
    let capacity = capacity.ok_or_else(|| schema(1, "capacity"))?;
    if let Some(c) = edge_count {
        if c != edges.len() {
            return Err(parse_err(
                1,
                format!("edges declares {c} but {} listed", edges.len()),
            ));
        }
    }
    Ok(InstanceFile {
        name,
        node_count,
        depot,
        capacity,
        lower_bound,
        vehicles,
        edges,
    })
}

/// Parses either supported instance format, keyed on the first line.
pub fn parse_any(text: &str) -> Result<InstanceFile> {
    if text.trim_start().starts_with("carp-instance") {
        parse_canonical(text)
    } else {
        parse_classic(text)
    }
}

/// Collects every violation instead of stopping at the first one.
pub fn validate(inst: &InstanceFile) -> std::result::Result<(), Vec<String>> {
    let mut errs = Vec::new();
    if inst.node_count == 0 {
        errs.push("instance has no nodes".into());
    }
    if inst.capacity <= 0 {
        errs.push(format!("capacity {} is not positive", inst.capacity));
    }
    if inst.depot < 1 || inst.depot > inst.node_count {
        errs.push(format!("depot {} outside [1,{}]", inst.depot, inst.node_count));
    }
    if let Some(lb) = inst.lower_bound {
        if lb <= 0 {
            errs.push(format!("lower bound {lb} is not positive"));
        }
    }
    for (i, e) in inst.edges.iter().enumerate() {
        if e.cost <= 0 {
            errs.push(format!("edge {} ({},{}): cost {} not positive", i + 1, e.u, e.v, e.cost));
        }
        if e.demand < 0 {
            errs.push(format!("edge {} ({},{}): negative demand {}", i + 1, e.u, e.v, e.demand));
        }
        if e.required && e.demand > inst.capacity {
            errs.push(format!(
                "edge {} ({},{}): demand {} exceeds capacity {}",
                i + 1,
                e.u,
                e.v,
                e.demand,
                inst.capacity
            ));
        }
    }

    // Connectivity from the depot over the full edge set.
    if inst.depot >= 1 && inst.depot <= inst.node_count && inst.node_count > 0 {
        let mut adj = vec![Vec::new(); inst.node_count + 1];
        for e in &inst.edges {
            if e.u >= 1 && e.u <= inst.node_count && e.v >= 1 && e.v <= inst.node_count {
                adj[e.u].push(e.v);
                adj[e.v].push(e.u);
            }
        }
        let mut seen = vec![false; inst.node_count + 1];
        let mut stack = vec![inst.depot];
        seen[inst.depot] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        if let Some(v) = (1..=inst.node_count).find(|&v| !seen[v]) {
            errs.push(format!("node {v} unreachable from depot"));
        }
    }

    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

/// Lower-bound sidecar: one `name lb` pair per line, `#` comments.
/// Names are matched case-insensitively.
pub fn parse_lb_table(text: &str) -> Result<HashMap<String, Cost>> {
    let mut map = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let name = toks
            .next()
            .ok_or_else(|| parse_err(idx + 1, "missing instance name"))?;
        let lb = parse_int(
            toks.next().ok_or_else(|| parse_err(idx + 1, "missing lower bound"))?,
            idx + 1,
            "lower bound",
        )?;
        map.insert(name.to_ascii_lowercase(), lb);
    }
    Ok(map)
}

/// A solution as stored on disk: per trip, the full depot-to-depot node
/// walk. `serviced` marks steps that service the edge they traverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionFile {
    pub instance: String,
    pub cost: Cost,
    /// Each trip is the walk's node sequence paired with a service flag
    /// for the step *into* that node; the leading depot carries `false`.
    pub trips: Vec<Vec<(NodeId, bool)>>,
}

/// Expands a solution's trips into full node walks (deadheads follow
/// shortest paths) and renders the on-disk format.
pub fn write_solution(net: &Network, dist: &DistanceTables, sol: &Solution) -> String {
    let mut out = String::new();
    out.push_str("carp-solution v1\n");
    let _ = writeln!(out, "instance {}", net.name);
    let _ = writeln!(out, "cost {}", sol.total_cost);
    for trip in &sol.trips {
        out.push_str("trip");
        let mut pos = net.depot;
        let _ = write!(out, " {pos}");
        for &task in &trip.tasks {
            let arc = net.arc(task);
            for w in dist.path_nodes(pos, arc.tail).windows(2) {
                let _ = write!(out, " {}", w[1]);
            }
            let _ = write!(out, " !{}", arc.head);
            pos = arc.head;
        }
        for w in dist.path_nodes(pos, net.depot).windows(2) {
            let _ = write!(out, " {}", w[1]);
        }
        out.push('\n');
    }
    out.push_str("end\n");
    out
}

pub fn parse_solution(text: &str) -> Result<SolutionFile> {
    let mut lines = text.lines().enumerate();
    let (_, magic) = lines.next().ok_or_else(|| parse_err(1, "empty solution file"))?;
    if magic.trim() != "carp-solution v1" {
        return Err(parse_err(1, "expected `carp-solution v1` header"));
    }
    let mut instance = None;
    let mut cost = None;
    let mut trips = Vec::new();
    for (idx, raw) in lines {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line == "end" {
            continue;
        }
        let mut toks = line.split_whitespace();
        match toks.next().unwrap() {
            "instance" => {
                instance = Some(
                    toks.next()
                        .ok_or_else(|| parse_err(lineno, "missing instance name"))?
                        .to_string(),
                )
            }
            "cost" => {
                cost = Some(parse_int(
                    toks.next().ok_or_else(|| parse_err(lineno, "missing cost"))?,
                    lineno,
                    "cost",
                )?)
            }
            "trip" => {
                let mut walk = Vec::new();
                for tok in toks {
                    let (serviced, tok) = match tok.strip_prefix('!') {
                        Some(rest) => (true, rest),
                        None => (false, tok),
                    };
                    let node = parse_int(tok, lineno, "node id")?;
                    walk.push((node, serviced));
                }
                if walk.len() < 2 {
                    return Err(parse_err(lineno, "trip walk needs at least two nodes"));
                }
                if walk[0].1 {
                    return Err(parse_err(lineno, "leading depot cannot be a serviced step"));
                }
                trips.push(walk);
            }
            other => return Err(parse_err(lineno, format!("unknown solution field `{other}`"))),
        }
    }
    Ok(SolutionFile {
        instance: instance.ok_or_else(|| parse_err(1, "missing instance name"))?,
        cost: cost.ok_or_else(|| parse_err(1, "missing cost"))?,
        trips,
    })
}

/// Independent solution checker: walks must follow existing edges between
/// depot endpoints, every required edge must be serviced exactly once,
/// loads must fit the capacity and the declared cost must equal the
/// recomputed walk cost. Collects every violation.
pub fn check_solution(inst: &InstanceFile, sol: &SolutionFile) -> std::result::Result<(), Vec<String>> {
    let mut errs = Vec::new();
    let mut edge_ix: HashMap<(NodeId, NodeId), usize> = HashMap::new();
    for (i, e) in inst.edges.iter().enumerate() {
        edge_ix.insert((e.u.min(e.v), e.u.max(e.v)), i);
    }

    let mut serviced = vec![0usize; inst.edges.len()];
    let mut total = 0;
    for (t, walk) in sol.trips.iter().enumerate() {
        let trip_no = t + 1;
        if walk.first().map(|w| w.0) != Some(inst.depot) || walk.last().map(|w| w.0) != Some(inst.depot)
        {
            errs.push(format!("trip {trip_no}: walk does not start and end at the depot"));
        }
        let mut load = 0;
        for w in walk.windows(2) {
            let (a, (b, svc)) = (w[0].0, w[1]);
            match edge_ix.get(&(a.min(b), a.max(b))) {
                Some(&i) => {
                    let e = &inst.edges[i];
                    total += e.cost;
                    if svc {
                        if !e.required {
                            errs.push(format!(
                                "trip {trip_no}: services non-required edge ({a},{b})"
                            ));
                        }
                        serviced[i] += 1;
                        load += e.demand;
                    }
                }
                None => errs.push(format!("trip {trip_no}: no edge ({a},{b}) in the instance")),
            }
        }
        if load > inst.capacity {
            errs.push(format!(
                "trip {trip_no}: load {load} exceeds capacity {}",
                inst.capacity
            ));
        }
    }

    for (i, e) in inst.edges.iter().enumerate() {
        if e.required && serviced[i] != 1 {
            errs.push(format!(
                "required edge ({},{}) serviced {} times",
                e.u, e.v, serviced[i]
            ));
        }
    }
    if total != sol.cost {
        errs.push(format!("declared cost {} but walks cost {total}", sol.cost));
    }

    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}
