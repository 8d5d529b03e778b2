//! The 4-valent graph of a virtual link diagram.
//!
//! Every classical crossing owns four ports, numbered counterclockwise
//! `0, 1, 2, 3` in its local picture. The understrand runs in at port 0 and
//! out at port 2. The overstrand occupies ports 1 and 3: at a positive
//! crossing it enters at 3 and leaves at 1 (crossing the understrand from
//! left to right), at a negative crossing it enters at 1 and leaves at 3.
//! Port `p` of crossing `c` has global index `4 * c + p`.
//!
//! Edges join the out-port of one visit to the in-port of the next visit
//! along the same component. Virtual crossings never appear: they are
//! artifacts of the planar drawing and carry no data.

use std::collections::HashMap;

use crate::dsu::UnionFind;
use crate::error::{Error, Result};
use crate::gauss::{GaussCode, GaussEntry, Passage, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crossing {
    /// Label from the Gauss code.
    pub id: u32,
    pub sign: Sign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub from: u32,
    pub to: u32,
}

/// Location of an arc for [`connected_sum`]: arc `arc` of component
/// `component` is the edge leaving its `arc`-th visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SpliceSite {
    pub component: usize,
    pub arc: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagram {
    code: GaussCode,
    crossings: Vec<Crossing>,
    edges: Vec<Edge>,
    edge_of_port: Vec<u32>,
    n_plus: usize,
    n_minus: usize,
}

pub fn port(crossing: usize, local: usize) -> u32 {
    (4 * crossing + local) as u32
}

fn in_port(local_crossing: usize, e: &GaussEntry) -> u32 {
    let local = match (e.passage, e.sign) {
        (Passage::Under, _) => 0,
        (Passage::Over, Sign::Positive) => 3,
        (Passage::Over, Sign::Negative) => 1,
    };
    port(local_crossing, local)
}

fn out_port(local_crossing: usize, e: &GaussEntry) -> u32 {
    let local = match (e.passage, e.sign) {
        (Passage::Under, _) => 2,
        (Passage::Over, Sign::Positive) => 1,
        (Passage::Over, Sign::Negative) => 3,
    };
    port(local_crossing, local)
}

impl Diagram {
    pub fn new(code: GaussCode) -> Result<Self> {
        build_diagram(code)
    }

    pub fn code(&self) -> &GaussCode {
        &self.code
    }

    /// Number of classical crossings.
    pub fn n(&self) -> usize {
        self.crossings.len()
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn n_plus(&self) -> usize {
        self.n_plus
    }

    pub fn n_minus(&self) -> usize {
        self.n_minus
    }

    pub fn writhe(&self) -> i64 {
        self.n_plus as i64 - self.n_minus as i64
    }

    pub fn component_count(&self) -> usize {
        self.code.components().len()
    }

    /// Components without classical crossings.
    pub fn free_loops(&self) -> usize {
        self.code
            .components()
            .iter()
            .filter(|c| c.is_empty())
            .count()
    }

    pub fn is_knot(&self) -> bool {
        self.component_count() == 1
    }

    /// The `2n` edges, in traversal order component by component.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_of_port(&self, p: u32) -> u32 {
        self.edge_of_port[p as usize]
    }

    /// The port at the other end of the edge through `p`.
    pub fn edge_pairing(&self, p: u32) -> u32 {
        let e = self.edges[self.edge_of_port[p as usize] as usize];
        if e.from == p {
            e.to
        } else {
            e.from
        }
    }

    /// Index of the crossing labelled `id` in the code.
    pub fn crossing_index(&self, id: u32) -> Option<usize> {
        self.crossings.binary_search_by_key(&id, |c| c.id).ok()
    }

    /// Number of connected pieces: components of the 4-valent graph plus
    /// crossingless circles.
    pub fn connected_pieces(&self) -> usize {
        let n = self.n();
        let graph_components = if n == 0 {
            0
        } else {
            let mut uf = UnionFind::new(n);
            for e in &self.edges {
                uf.union(e.from as usize / 4, e.to as usize / 4);
            }
            uf.set_count()
        };
        graph_components + self.free_loops()
    }

    /// The diagram with every crossing's over/under swapped and its sign
    /// negated.
    pub fn mirror(&self) -> Diagram {
        let components = self
            .code
            .components()
            .iter()
            .map(|comp| {
                comp.iter()
                    .map(|e| GaussEntry::new(e.crossing, e.passage.flip(), e.sign.flip()))
                    .collect()
            })
            .collect();
        let code = GaussCode::new(components).expect("mirror preserves code invariants");
        build_diagram(code).expect("mirror preserves diagram invariants")
    }

    /// Genus of the oriented surface carrying the diagram with the rotation
    /// system given by the local port order. Zero exactly for classical
    /// diagrams.
    pub fn carter_genus(&self) -> usize {
        let n = self.n();
        if n == 0 {
            return 0;
        }
        let darts = 4 * n;
        let mut seen = vec![false; darts];
        let mut faces = 0usize;
        for start in 0..darts {
            if seen[start] {
                continue;
            }
            faces += 1;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                let q = self.edge_pairing(p as u32) as usize;
                p = (q & !3) | ((q + 1) & 3);
            }
        }
        let graph_components = self.connected_pieces() - self.free_loops();
        let chi = n as i64 - 2 * n as i64 + faces as i64;
        let genus2 = 2 * graph_components as i64 - chi;
        debug_assert!(genus2 >= 0 && genus2 % 2 == 0);
        (genus2 / 2) as usize
    }

    /// True when the diagram falls apart into more than one piece. A
    /// connected diagram may still represent a split link; that case is not
    /// detected.
    pub fn is_split(&self) -> bool {
        self.connected_pieces() > 1
    }
}

/// Builds the port structure of a validated Gauss code.
pub fn build_diagram(code: GaussCode) -> Result<Diagram> {
    let ids = code.crossing_ids();
    let index: HashMap<u32, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let n = ids.len();

    let mut crossings: Vec<Crossing> = ids
        .iter()
        .map(|&id| Crossing {
            id,
            sign: Sign::Positive,
        })
        .collect();
    for e in code.components().iter().flatten() {
        let c = *index.get(&e.crossing).ok_or(Error::OccurrenceCount {
            id: e.crossing,
            count: 1,
        })?;
        crossings[c].sign = e.sign;
    }

    let mut edges = Vec::with_capacity(2 * n);
    let mut edge_of_port = vec![u32::MAX; 4 * n];
    for comp in code.components() {
        let len = comp.len();
        for i in 0..len {
            let a = &comp[i];
            let b = &comp[(i + 1) % len];
            let from = out_port(index[&a.crossing], a);
            let to = in_port(index[&b.crossing], b);
            let e = edges.len() as u32;
            for p in [from, to] {
                if edge_of_port[p as usize] != u32::MAX {
                    return Err(Error::Internal(format!("port {p} used twice")));
                }
                edge_of_port[p as usize] = e;
            }
            edges.push(Edge { from, to });
        }
    }
    if edge_of_port.contains(&u32::MAX) {
        return Err(Error::Internal("unpaired port".into()));
    }

    let n_plus = crossings
        .iter()
        .filter(|c| c.sign == Sign::Positive)
        .count();
    let d = Diagram {
        code,
        n_minus: n - n_plus,
        n_plus,
        crossings,
        edges,
        edge_of_port,
    };
    debug_assert_eq!(d.trace_strands(), d.component_count() - d.free_loops());
    Ok(d)
}

impl Diagram {
    /// Counts closed strands by following edges and passing straight
    /// through crossings.
    pub(crate) fn trace_strands(&self) -> usize {
        let mut seen = vec![false; self.edges.len()];
        let mut count = 0;
        for start in 0..self.edges.len() {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut e = start;
            while !seen[e] {
                seen[e] = true;
                let to = self.edges[e].to;
                let through = (to & !3) | ((to + 2) & 3);
                e = self.edge_of_port[through as usize] as usize;
            }
        }
        count
    }
}

/// Splices two knot diagrams together by cutting the chosen arcs.
pub fn connected_sum(
    d1: &Diagram,
    d2: &Diagram,
    s1: SpliceSite,
    s2: SpliceSite,
) -> Result<Diagram> {
    for d in [d1, d2] {
        if !d.is_knot() {
            return Err(Error::NotAKnot(d.component_count()));
        }
    }
    let offset = d1.code.crossing_ids().last().copied().unwrap_or(0);
    let cut = |d: &Diagram, s: SpliceSite, shift: u32| -> Result<Vec<GaussEntry>> {
        let comp = &d.code.components()[0];
        let bad = Error::BadSpliceSite {
            component: s.component,
            arc: s.arc,
        };
        if s.component != 0 {
            return Err(bad);
        }
        if comp.is_empty() {
            return if s.arc == 0 { Ok(Vec::new()) } else { Err(bad) };
        }
        if s.arc >= comp.len() {
            return Err(bad);
        }
        Ok(comp[s.arc + 1..]
            .iter()
            .chain(&comp[..=s.arc])
            .map(|e| GaussEntry::new(e.crossing + shift, e.passage, e.sign))
            .collect())
    };
    let mut joined = cut(d1, s1, 0)?;
    joined.extend(cut(d2, s2, offset)?);
    build_diagram(GaussCode::new(vec![joined])?)
}
