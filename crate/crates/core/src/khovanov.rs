//! Khovanov homology with GF(2) coefficients via the cube of resolutions.
//!
//! A generator is a state together with a label `v+` or `v-` on each of its
//! circles. Gradings:
//!
//! * `i = beta - n_-`
//! * `j = beta + #v+ - #v- + n_+ - 2 n_-`
//!
//! so the crossingless unknot sits at `(0, 1)` and `(0, -1)`. Each cube edge
//! changes one A-smoothing into a B-smoothing and carries the merge map
//! `m`, the split map `Delta`, or, when the circle count does not change
//! (possible only for virtual diagrams), the zero map.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagram::{port, Diagram};
use crate::dsu::UnionFind;
use crate::error::{Error, Result};
use crate::gf2::{self, Reducer, SparseVec};
use crate::poly::LaurentPoly;
use crate::statesum::{Smoothing, SmoothingTable};
use crate::Limits;

/// Circles of one state: `membership[e]` is the circle of edge `e`.
#[derive(Debug, Clone)]
struct StateData {
    /// Circles including crossingless components.
    circles: usize,
    membership: Vec<u8>,
    /// One edge on each circle through crossings.
    representative: Vec<u8>,
    offset: usize,
}

#[derive(Debug, Clone)]
pub struct ChainComplex {
    n: usize,
    n_plus: usize,
    n_minus: usize,
    states: Vec<StateData>,
    /// Column of the differential for each generator: sorted target indices.
    differential: Vec<SparseVec>,
    zero_map_edges: usize,
}

/// Bigrading `(i, j)`.
pub type Bidegree = (i64, i64);

impl ChainComplex {
    pub fn generator_count(&self) -> usize {
        self.differential.len()
    }

    pub fn crossings(&self) -> usize {
        self.n
    }

    /// Cube edges carrying the zero map.
    pub fn zero_map_edges(&self) -> usize {
        self.zero_map_edges
    }

    /// Index of the generator of state `bits` with labels `labels` (bit `k`
    /// set means `v+` on circle `k`).
    pub fn generator(&self, bits: u64, labels: u64) -> usize {
        self.states[bits as usize].offset + labels as usize
    }

    pub fn circles(&self, bits: u64) -> usize {
        self.states[bits as usize].circles
    }

    pub fn bidegree(&self, bits: u64, labels: u64) -> Bidegree {
        let beta = bits.count_ones() as i64;
        let k = self.states[bits as usize].circles as i64;
        let plus = labels.count_ones() as i64;
        let i = beta - self.n_minus as i64;
        let j = beta + plus - (k - plus) + self.n_plus as i64 - 2 * self.n_minus as i64;
        (i, j)
    }

    /// `(state, labels)` of a generator index.
    pub fn locate(&self, g: usize) -> (u64, u64) {
        let s = self
            .states
            .partition_point(|st| st.offset <= g)
            .saturating_sub(1);
        (s as u64, (g - self.states[s].offset) as u64)
    }

    pub fn differential(&self, g: usize) -> &[u32] {
        &self.differential[g]
    }

    fn bidegrees(&self) -> Vec<Bidegree> {
        let mut out = Vec::with_capacity(self.generator_count());
        for (s, st) in self.states.iter().enumerate() {
            for labels in 0..1u64 << st.circles {
                out.push(self.bidegree(s as u64, labels));
            }
        }
        out
    }

    /// `d(d(g))` for every generator; empty when the complex is sound.
    pub fn square_defects(&self) -> Vec<usize> {
        (0..self.generator_count())
            .into_par_iter()
            .filter(|&g| {
                let mut acc = Vec::new();
                for &t in &self.differential[g] {
                    acc.extend_from_slice(&self.differential[t as usize]);
                }
                !gf2::normalize(acc).is_empty()
            })
            .collect()
    }

    /// Chain-level graded Euler characteristic `sum (-1)^i q^j dim C^{i,j}`
    /// as a polynomial in `q`.
    pub fn chain_euler(&self) -> LaurentPoly {
        let mut dims: BTreeMap<Bidegree, usize> = BTreeMap::new();
        for b in self.bidegrees() {
            *dims.entry(b).or_default() += 1;
        }
        euler_of(&dims)
    }
}

fn euler_of(ranks: &BTreeMap<Bidegree, usize>) -> LaurentPoly {
    LaurentPoly::from_terms(ranks.iter().map(|(&(i, j), &r)| {
        let sign = if i.rem_euclid(2) == 0 { 1 } else { -1 };
        (j, sign * r as i64)
    }))
}

fn state_data(table: &SmoothingTable, n: usize, loops: usize, bits: u64) -> StateData {
    let mut uf = UnionFind::new(2 * n);
    table.circles(bits, &mut uf);
    let mut label = vec![u8::MAX; 2 * n];
    let mut membership = vec![0u8; 2 * n];
    let mut representative = Vec::new();
    for (e, slot) in membership.iter_mut().enumerate() {
        let r = uf.find(e);
        if label[r] == u8::MAX {
            label[r] = representative.len() as u8;
            representative.push(e as u8);
        }
        *slot = label[r];
    }
    StateData {
        circles: representative.len() + loops,
        membership,
        representative,
        offset: 0,
    }
}

enum EdgeMap {
    Merge { x: usize, y: usize, z: usize },
    Split { x: usize, z1: usize, z2: usize },
    Zero,
}

/// Builds the cube of resolutions and checks `d^2 = 0`.
pub fn cube(d: &Diagram, limits: &Limits) -> Result<ChainComplex> {
    let n = d.n();
    if n > limits.khovanov {
        return Err(Error::GuardExceeded {
            what: "khovanov",
            n,
            limit: limits.khovanov,
        });
    }
    if 2 * n + d.free_loops() > 62 {
        return Err(Error::GuardExceeded {
            what: "khovanov circles",
            n: 2 * n + d.free_loops(),
            limit: 62,
        });
    }
    let loops = d.free_loops();
    let table = SmoothingTable::new(d);
    let mut states: Vec<StateData> = (0..1u64 << n)
        .into_par_iter()
        .map(|bits| state_data(&table, n, loops, bits))
        .collect();
    let mut offset = 0usize;
    for st in &mut states {
        st.offset = offset;
        offset += 1usize << st.circles;
    }
    if offset > u32::MAX as usize {
        return Err(Error::GuardExceeded {
            what: "khovanov generators",
            n,
            limit: limits.khovanov,
        });
    }

    let edge = |c: usize, local: usize| d.edge_of_port(port(c, local)) as usize;
    let edge_map = |bits: u64, c: usize| -> EdgeMap {
        let src = &states[bits as usize];
        let dst = &states[(bits | 1 << c) as usize];
        let [(p, _), (q, _)] = Smoothing::A.local_pairs();
        let x = src.membership[edge(c, p)] as usize;
        let y = src.membership[edge(c, q)] as usize;
        let [(r, _), (t, _)] = Smoothing::B.local_pairs();
        let z1 = dst.membership[edge(c, r)] as usize;
        let z2 = dst.membership[edge(c, t)] as usize;
        if x != y {
            debug_assert_eq!(z1, z2);
            EdgeMap::Merge { x, y, z: z1 }
        } else if z1 != z2 {
            EdgeMap::Split { x, z1, z2 }
        } else {
            EdgeMap::Zero
        }
    };

    let per_state: Vec<(Vec<SparseVec>, usize)> = (0..1u64 << n)
        .into_par_iter()
        .map(|bits| {
            let src = &states[bits as usize];
            let mut columns = vec![Vec::new(); 1 << src.circles];
            let mut zero_edges = 0;
            for c in (0..n).filter(|&c| bits >> c & 1 == 0) {
                let tbits = bits | 1 << c;
                let dst = &states[tbits as usize];
                let map = edge_map(bits, c);
                if matches!(map, EdgeMap::Zero) {
                    zero_edges += 1;
                    continue;
                }
                // image in the target state of each untouched circle
                let through = src.representative.len();
                let image: Vec<usize> = (0..src.circles)
                    .map(|k| {
                        if k < through {
                            dst.membership[src.representative[k] as usize] as usize
                        } else {
                            k - through + dst.representative.len()
                        }
                    })
                    .collect();
                for (labels, column) in columns.iter_mut().enumerate() {
                    let labels = labels as u64;
                    let carry = |skip: &[usize]| -> u64 {
                        (0..src.circles)
                            .filter(|k| !skip.contains(k) && labels >> k & 1 == 1)
                            .fold(0u64, |acc, k| acc | 1 << image[k])
                    };
                    match map {
                        EdgeMap::Merge { x, y, z } => {
                            let (lx, ly) = (labels >> x & 1, labels >> y & 1);
                            if lx == 0 && ly == 0 {
                                continue;
                            }
                            let base = carry(&[x, y]);
                            let t = if lx == 1 && ly == 1 {
                                base | 1 << z
                            } else {
                                base
                            };
                            column.push((dst.offset + t as usize) as u32);
                        }
                        EdgeMap::Split { x, z1, z2 } => {
                            let base = carry(&[x]);
                            if labels >> x & 1 == 1 {
                                column.push((dst.offset + (base | 1 << z1) as usize) as u32);
                                column.push((dst.offset + (base | 1 << z2) as usize) as u32);
                            } else {
                                column.push((dst.offset + base as usize) as u32);
                            }
                        }
                        EdgeMap::Zero => unreachable!(),
                    }
                }
            }
            let columns = columns.into_iter().map(gf2::normalize).collect();
            (columns, zero_edges)
        })
        .collect();

    let mut differential = Vec::with_capacity(offset);
    let mut zero_map_edges = 0;
    for (cols, z) in per_state {
        differential.extend(cols);
        zero_map_edges += z;
    }
    let complex = ChainComplex {
        n,
        n_plus: d.n_plus(),
        n_minus: d.n_minus(),
        states,
        differential,
        zero_map_edges,
    };
    let defects = complex.square_defects();
    if let Some(&g) = defects.first() {
        let (s, l) = complex.locate(g);
        return Err(Error::Internal(format!(
            "d^2 != 0 at {} generator(s), first at state {s:#b} labels {l:#b}",
            defects.len()
        )));
    }
    Ok(complex)
}

/// GF(2) ranks of Khovanov homology by bidegree.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HomologyTable {
    pub ranks: BTreeMap<Bidegree, usize>,
}

impl HomologyTable {
    pub fn rank(&self, i: i64, j: i64) -> usize {
        self.ranks.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.values().sum()
    }

    /// `sum (-1)^i q^j rank(i, j)` as a polynomial in `q`.
    pub fn euler_characteristic(&self) -> LaurentPoly {
        euler_of(&self.ranks)
    }

    /// The graded Euler characteristic with `q = -A^-2` substituted.
    pub fn euler_in_a(&self) -> LaurentPoly {
        LaurentPoly::from_terms(self.euler_characteristic().terms().map(|(j, c)| {
            let c = if j.rem_euclid(2) == 0 {
                c.clone()
            } else {
                -c.clone()
            };
            (-2 * j, c)
        }))
    }

    /// Rows `i\tj\trank`, sorted by `(i, j)`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("i\tj\trank\n");
        for (&(i, j), &r) in &self.ranks {
            out.push_str(&format!("{i}\t{j}\t{r}\n"));
        }
        out
    }

    /// The same table with every bidegree moved by `(di, dj)`.
    pub fn shifted(&self, di: i64, dj: i64) -> HomologyTable {
        HomologyTable {
            ranks: self
                .ranks
                .iter()
                .map(|(&(i, j), &r)| ((i + di, j + dj), r))
                .collect(),
        }
    }
}

/// `(-A^2 - A^-2) <d> (-A)^(-3w)`, which the graded Euler characteristic
/// equals after substituting `q = -A^-2`.
pub fn expected_euler_in_a(bracket: &LaurentPoly, writhe: i64) -> LaurentPoly {
    let framed = bracket.shift(-3 * writhe);
    let signed = if writhe.rem_euclid(2) == 0 {
        framed
    } else {
        -&framed
    };
    &LaurentPoly::loop_value() * &signed
}

/// Bidegree blocks of the complex: generator indices per `(i, j)`.
fn blocks(c: &ChainComplex) -> BTreeMap<Bidegree, Vec<u32>> {
    let mut out: BTreeMap<Bidegree, Vec<u32>> = BTreeMap::new();
    for (g, b) in c.bidegrees().into_iter().enumerate() {
        out.entry(b).or_default().push(g as u32);
    }
    out
}

pub fn homology(c: &ChainComplex) -> HomologyTable {
    let blocks = blocks(c);
    let slots: Vec<(&Bidegree, &Vec<u32>)> = blocks.iter().collect();
    let image_rank: HashMap<Bidegree, usize> = slots
        .par_iter()
        .map(|(&b, gens)| {
            let r = gf2::rank(gens.iter().map(|&g| c.differential[g as usize].clone()));
            (b, r)
        })
        .collect();
    let mut ranks = BTreeMap::new();
    for (&(i, j), gens) in &blocks {
        let out_rank = image_rank[&(i, j)];
        let in_rank = image_rank.get(&(i - 1, j)).copied().unwrap_or(0);
        let r = gens.len() - out_rank - in_rank;
        if r > 0 {
            ranks.insert((i, j), r);
        }
    }
    HomologyTable { ranks }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThicknessReport {
    /// Occupied values of `j - 2i`, ascending.
    pub diagonals: Vec<i64>,
    /// `(max - min) / 2 + 1`, rounded up when the gap is odd.
    pub thickness: i64,
    /// Two occupied diagonals differ by an odd amount.
    pub odd_gap: bool,
}

pub fn thickness(t: &HomologyTable) -> Result<ThicknessReport> {
    let diagonals: Vec<i64> = t
        .ranks
        .keys()
        .map(|&(i, j)| j - 2 * i)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let (Some(&lo), Some(&hi)) = (diagonals.first(), diagonals.last()) else {
        return Err(Error::Internal("zero Khovanov homology".into()));
    };
    let odd_gap = diagonals.iter().any(|&x| (x - lo) % 2 != 0);
    let spread = hi - lo;
    Ok(ThicknessReport {
        thickness: (spread + 1) / 2 + 1,
        diagonals,
        odd_gap,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    /// The all-`v-` generator of the all-A state has zero differential.
    pub a_extreme_is_cycle: bool,
    /// The all-`v+` generator of the all-B state is not a boundary.
    pub b_extreme_is_nonboundary: bool,
    pub a_bidegree: Bidegree,
    pub b_bidegree: Bidegree,
    /// Diagonals spanned by the two generators: `|delta_b - delta_a| / 2 + 1`.
    pub implied_thickness_lower_bound: i64,
    /// Both checks passed, so homology is nonzero on both diagonals.
    pub implies_bound: bool,
}

pub fn lemma_certificate(d: &Diagram, limits: &Limits) -> Result<LemmaReport> {
    Ok(lemma_from_complex(&cube(d, limits)?))
}

/// Checks the two extreme generators in an already built complex.
pub fn lemma_from_complex(c: &ChainComplex) -> LemmaReport {
    let n = c.crossings();
    let all_b = if n == 0 { 0 } else { (1u64 << n) - 1 };
    let ga = c.generator(0, 0);
    let b_labels = (1u64 << c.circles(all_b)) - 1;
    let gb = c.generator(all_b, b_labels);
    let a_bidegree = c.bidegree(0, 0);
    let b_bidegree = c.bidegree(all_b, b_labels);

    let a_extreme_is_cycle = c.differential(ga).is_empty();

    // the all-B state is the top of the cube, so gb is always a cycle
    let (bi, bj) = b_bidegree;
    let mut image = Reducer::new();
    for (s, st) in c.states.iter().enumerate() {
        if (s as u64).count_ones() as usize + 1 != n {
            continue;
        }
        for labels in 0..1u64 << st.circles {
            if c.bidegree(s as u64, labels) == (bi - 1, bj) {
                image.insert(c.differential(c.generator(s as u64, labels)).to_vec());
            }
        }
    }
    let b_extreme_is_nonboundary = !image.contains(vec![gb as u32]);

    let delta_a = a_bidegree.1 - 2 * a_bidegree.0;
    let delta_b = b_bidegree.1 - 2 * b_bidegree.0;
    LemmaReport {
        a_extreme_is_cycle,
        b_extreme_is_nonboundary,
        a_bidegree,
        b_bidegree,
        implied_thickness_lower_bound: (delta_b - delta_a).abs() / 2 + 1,
        implies_bound: a_extreme_is_cycle && b_extreme_is_nonboundary,
    }
}
