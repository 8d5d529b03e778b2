//! Kauffman bracket state sums and the atom of a diagram.
//!
//! Smoothing table (local port numbering from [`crate::diagram`]):
//!
//! | smoothing | joins ports       |
//! |-----------|-------------------|
//! | A         | (0, 1) and (2, 3) |
//! | B         | (1, 2) and (3, 0) |
//!
//! Since the overstrand always sits on ports 1 and 3, the A-smoothing opens
//! the channel between the two regions swept counterclockwise by the
//! overstrand, independent of the crossing sign.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagram::{port, Diagram};
use crate::dsu::UnionFind;
use crate::error::{Error, Result};
use crate::poly::LaurentPoly;
use crate::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Smoothing {
    A,
    B,
}

impl Smoothing {
    /// Local port pairs joined by this smoothing.
    pub fn local_pairs(self) -> [(usize, usize); 2] {
        match self {
            Smoothing::A => [(0, 1), (2, 3)],
            Smoothing::B => [(1, 2), (3, 0)],
        }
    }
}

/// A choice of smoothing at every crossing. Bit `c` set means B at
/// crossing `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct State {
    bits: u64,
    n: usize,
}

impl State {
    pub fn new(n: usize, bits: u64) -> Self {
        assert!(n <= 64, "states are limited to 64 crossings");
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        State {
            bits: bits & mask,
            n,
        }
    }

    pub fn all_a(n: usize) -> Self {
        Self::new(n, 0)
    }

    pub fn all_b(n: usize) -> Self {
        Self::new(n, u64::MAX)
    }

    pub fn from_choices(choices: &[Smoothing]) -> Self {
        let bits = choices
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == Smoothing::B)
            .fold(0u64, |acc, (i, _)| acc | (1 << i));
        Self::new(choices.len(), bits)
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn choice(&self, crossing: usize) -> Smoothing {
        if self.bits >> crossing & 1 == 1 {
            Smoothing::B
        } else {
            Smoothing::A
        }
    }

    pub fn alpha(&self) -> usize {
        self.n - self.beta()
    }

    pub fn beta(&self) -> usize {
        self.bits.count_ones() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateCircles {
    /// Includes crossingless components.
    pub circle_count: usize,
    /// Circle index of every port. Circles through ports are numbered by
    /// their lowest port; crossingless circles take the last indices.
    pub membership: Vec<u32>,
}

impl StateCircles {
    pub fn same_circle(&self, p: u32, q: u32) -> bool {
        self.membership[p as usize] == self.membership[q as usize]
    }
}

/// Smooths every crossing of `d` as `s` dictates and labels the circles.
pub fn resolve(d: &Diagram, s: &State) -> StateCircles {
    assert_eq!(s.len(), d.n(), "state size must match the diagram");
    resolve_by(d, |c| s.choice(c))
}

/// Resolves every crossing the same way; works for any number of crossings.
pub fn resolve_extreme(d: &Diagram, smoothing: Smoothing) -> StateCircles {
    resolve_by(d, |_| smoothing)
}

fn resolve_by(d: &Diagram, choice: impl Fn(usize) -> Smoothing) -> StateCircles {
    let n = d.n();
    let mut uf = UnionFind::new(4 * n);
    for c in 0..n {
        for (a, b) in choice(c).local_pairs() {
            uf.union(port(c, a) as usize, port(c, b) as usize);
        }
    }
    for e in d.edges() {
        uf.union(e.from as usize, e.to as usize);
    }
    let mut label = vec![u32::MAX; 4 * n];
    let mut membership = vec![0u32; 4 * n];
    let mut next = 0u32;
    for (p, slot) in membership.iter_mut().enumerate() {
        let r = uf.find(p);
        if label[r] == u32::MAX {
            label[r] = next;
            next += 1;
        }
        *slot = label[r];
    }
    StateCircles {
        circle_count: next as usize + d.free_loops(),
        membership,
    }
}

/// Circle count by walking ports, alternating edges and smoothing arcs.
pub fn count_circles_by_walk(d: &Diagram, s: &State) -> usize {
    let n = d.n();
    let mut seen = vec![false; 4 * n];
    let mut count = 0;
    let partner = |p: u32| -> u32 {
        let c = p as usize / 4;
        let local = p as usize % 4;
        let [(a, b), (x, y)] = s.choice(c).local_pairs();
        let other = match local {
            l if l == a => b,
            l if l == b => a,
            l if l == x => y,
            _ => x,
        };
        port(c, other)
    };
    for start in 0..4 * n as u32 {
        if seen[start as usize] {
            continue;
        }
        count += 1;
        let mut p = start;
        loop {
            let q = d.edge_pairing(p);
            seen[p as usize] = true;
            seen[q as usize] = true;
            p = partner(q);
            if p == start {
                break;
            }
        }
    }
    count + d.free_loops()
}

/// Edge-level smoothing data for the hot loop: for every crossing the two
/// edge pairs joined by its A and B smoothings.
pub(crate) struct SmoothingTable {
    pub(crate) a: Vec<[(u32, u32); 2]>,
    pub(crate) b: Vec<[(u32, u32); 2]>,
}

impl SmoothingTable {
    pub(crate) fn new(d: &Diagram) -> Self {
        let edges_for = |c: usize, s: Smoothing| {
            s.local_pairs()
                .map(|(x, y)| (d.edge_of_port(port(c, x)), d.edge_of_port(port(c, y))))
        };
        SmoothingTable {
            a: (0..d.n()).map(|c| edges_for(c, Smoothing::A)).collect(),
            b: (0..d.n()).map(|c| edges_for(c, Smoothing::B)).collect(),
        }
    }

    /// Circles through crossings in state `bits`, using a scratch
    /// union-find over the `2n` edges.
    pub(crate) fn circles(&self, bits: u64, uf: &mut UnionFind) -> usize {
        uf.reset();
        for c in 0..self.a.len() {
            let pairs = if bits >> c & 1 == 1 {
                &self.b[c]
            } else {
                &self.a[c]
            };
            for &(x, y) in pairs {
                uf.union(x as usize, y as usize);
            }
        }
        uf.set_count()
    }
}

fn check_guard(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::GuardExceeded { what, n, limit })
    } else {
        Ok(())
    }
}

/// Number of states with `beta` B-smoothings and `k` circles, as
/// `census[beta][k]`. Circle counts include crossingless components.
pub fn state_census(d: &Diagram, limits: &Limits) -> Result<Vec<Vec<u64>>> {
    let n = d.n();
    check_guard("bracket", n, limits.bracket)?;
    if n > 40 {
        return Err(Error::GuardExceeded {
            what: "bracket",
            n,
            limit: 40,
        });
    }
    let loops = d.free_loops();
    let width = 2 * n + loops + 1;
    if n == 0 {
        let mut census = vec![vec![0u64; width]];
        census[0][loops] = 1;
        return Ok(census);
    }
    let table = SmoothingTable::new(d);
    let total: u64 = 1 << n;
    let chunk: u64 = (total / 256).max(1 << 10);
    let chunks = total.div_ceil(chunk);

    let census = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut local = vec![vec![0u64; width]; n + 1];
            let mut uf = UnionFind::new(2 * n);
            let lo = k * chunk;
            let hi = (lo + chunk).min(total);
            for bits in lo..hi {
                let circles = table.circles(bits, &mut uf) + loops;
                local[bits.count_ones() as usize][circles] += 1;
            }
            local
        })
        .reduce(
            || vec![vec![0u64; width]; n + 1],
            |mut acc, part| {
                for (row, prow) in acc.iter_mut().zip(part) {
                    for (x, y) in row.iter_mut().zip(prow) {
                        *x += y;
                    }
                }
                acc
            },
        );
    Ok(census)
}

/// The Kauffman bracket `sum_s A^(alpha - beta) (-A^2 - A^-2)^(|s| - 1)`.
pub fn bracket(d: &Diagram, limits: &Limits) -> Result<LaurentPoly> {
    let n = d.n() as i64;
    let census = state_census(d, limits)?;
    let max_circles = census.iter().map(Vec::len).max().unwrap_or(1);
    let loop_powers: Vec<LaurentPoly> = {
        let delta = LaurentPoly::loop_value();
        let mut v = vec![LaurentPoly::one()];
        for k in 1..max_circles {
            let next = &v[k - 1] * &delta;
            v.push(next);
        }
        v
    };
    let mut out = LaurentPoly::zero();
    for (beta, row) in census.iter().enumerate() {
        let exp = n - 2 * beta as i64;
        for (circles, &count) in row.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let term = loop_powers[circles - 1]
                .shift(exp)
                .scale(&BigInt::from(count));
            out += &term;
        }
    }
    Ok(out)
}

/// Crossings allowed in [`bracket_oracle`].
pub const ORACLE_LIMIT: usize = 12;

/// The bracket by recursive skein resolution: smooth one crossing both
/// ways, splice its ports out of the strand structure, and count closed
/// loops when no crossings remain.
pub fn bracket_oracle(d: &Diagram) -> Result<LaurentPoly> {
    check_guard("bracket oracle", d.n(), ORACLE_LIMIT)?;
    let mut mate = vec![0u32; 4 * d.n()];
    for e in d.edges() {
        mate[e.from as usize] = e.to;
        mate[e.to as usize] = e.from;
    }
    Ok(skein(&mate, 0, d.n(), d.free_loops()))
}

fn skein(mate: &[u32], next: usize, n: usize, loops: usize) -> LaurentPoly {
    if next == n {
        return LaurentPoly::loop_value().pow(loops as u32 - 1);
    }
    let mut out = LaurentPoly::zero();
    for (s, weight) in [(Smoothing::A, 1), (Smoothing::B, -1)] {
        let mut m = mate.to_vec();
        let mut closed = 0;
        for (a, b) in s.local_pairs() {
            let (pa, pb) = (port(next, a) as usize, port(next, b) as usize);
            let (x, y) = (m[pa] as usize, m[pb] as usize);
            if x == pb {
                closed += 1;
            } else {
                m[x] = y as u32;
                m[y] = x as u32;
            }
        }
        let sub = skein(&m, next + 1, n, loops + closed);
        out += &sub.shift(weight);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomData {
    pub a_circles: usize,
    pub b_circles: usize,
    pub chi: i64,
    /// Orientable genus, summed over connected pieces. For a non-orientable
    /// atom this is the non-orientable genus (number of crosscaps) instead.
    pub genus: usize,
    pub orientable: bool,
}

/// Euler characteristic, genus and orientability of the atom: the surface
/// whose vertices are the crossings, edges the diagram edges, and 2-cells
/// the circles of the all-A and all-B states.
pub fn atom(d: &Diagram) -> AtomData {
    let n = d.n();
    let a = resolve_extreme(d, Smoothing::A);
    let b = resolve_extreme(d, Smoothing::B);
    let chi = a.circle_count as i64 + b.circle_count as i64 - n as i64;
    let pieces = d.connected_pieces() as i64;
    let euler_genus = 2 * pieces - chi;
    debug_assert!(euler_genus >= 0);
    let orientable = atom_orientable(d);
    debug_assert!(!orientable || euler_genus % 2 == 0);
    AtomData {
        a_circles: a.circle_count,
        b_circles: b.circle_count,
        chi,
        genus: if orientable {
            euler_genus / 2
        } else {
            euler_genus
        } as usize,
        orientable,
    }
}

/// Walks every circle of the state and records, per edge, the circle index
/// and whether the circle runs along the edge's own direction.
fn cell_boundaries(d: &Diagram, smoothing: Smoothing) -> (usize, Vec<(usize, bool)>) {
    let n = d.n();
    let mut along = vec![(usize::MAX, false); 2 * n];
    let mut cells = 0;
    for e0 in 0..2 * n {
        if along[e0].0 != usize::MAX {
            continue;
        }
        let mut p = d.edges()[e0].from;
        loop {
            let e = d.edge_of_port(p) as usize;
            if along[e].0 != usize::MAX {
                break;
            }
            along[e] = (cells, d.edges()[e].from == p);
            let q = d.edge_pairing(p);
            let c = q as usize / 4;
            let local = q as usize % 4;
            let [(a, b), (x, y)] = smoothing.local_pairs();
            let other = match local {
                l if l == a => b,
                l if l == b => a,
                l if l == x => y,
                _ => x,
            };
            p = port(c, other);
        }
        cells += 1;
    }
    (cells, along)
}

/// Two-colors cell orientations so that every edge is run in opposite
/// directions by its A-cell and its B-cell.
fn atom_orientable(d: &Diagram) -> bool {
    let n = d.n();
    if n == 0 {
        return true;
    }
    let (na, a) = cell_boundaries(d, Smoothing::A);
    let (nb, b) = cell_boundaries(d, Smoothing::B);
    // cells 0..na are A-cells, na..na+nb are B-cells
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); na + nb];
    for e in 0..2 * n {
        let (ca, fa) = a[e];
        let (cb, fb) = b[e];
        // orient(ca) * dir_a == -orient(cb) * dir_b, so the orientations
        // flip relative to each other iff the walks agree on the edge
        let flip = fa == fb;
        adj[ca].push((na + cb, flip));
        adj[na + cb].push((ca, flip));
    }
    let mut orient: Vec<Option<bool>> = vec![None; na + nb];
    for root in 0..na + nb {
        if orient[root].is_some() {
            continue;
        }
        orient[root] = Some(true);
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let ou = orient[u].unwrap();
            for &(v, flip) in &adj[u] {
                let want = ou ^ flip;
                match orient[v] {
                    None => {
                        orient[v] = Some(want);
                        queue.push_back(v);
                    }
                    Some(ov) if ov != want => return false,
                    _ => {}
                }
            }
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodReport {
    pub good: bool,
    /// Crossing ids where an all-A circle touches itself.
    pub a_violations: Vec<u32>,
    /// Crossing ids where an all-B circle touches itself.
    pub b_violations: Vec<u32>,
}

/// Checks that at every crossing the two smoothing arcs of each extreme
/// state lie on different circles.
pub fn is_good(d: &Diagram) -> GoodReport {
    let n = d.n();
    let mut violations = [Vec::new(), Vec::new()];
    for (k, smoothing) in [Smoothing::A, Smoothing::B].into_iter().enumerate() {
        let circles = resolve_extreme(d, smoothing);
        for c in 0..n {
            let [(p, _), (q, _)] = smoothing.local_pairs();
            if circles.same_circle(port(c, p), port(c, q)) {
                violations[k].push(d.crossings()[c].id);
            }
        }
    }
    let [a_violations, b_violations] = violations;
    GoodReport {
        good: a_violations.is_empty() && b_violations.is_empty(),
        a_violations,
        b_violations,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanReport {
    /// Absent for the zero polynomial.
    pub span: Option<i64>,
    /// `4n + 2(chi - 2)`.
    pub bound: i64,
    pub attained: bool,
    pub max_deg_predicted: i64,
    pub min_deg_predicted: i64,
    #[serde(with = "bigint_string")]
    pub leading_coeff: BigInt,
    #[serde(with = "bigint_string")]
    pub lowest_coeff: BigInt,
}

pub(crate) mod bigint_string {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

pub fn span_report(d: &Diagram, limits: &Limits) -> Result<SpanReport> {
    let poly = bracket(d, limits)?;
    Ok(span_report_from(d, &poly, &atom(d)))
}

pub fn span_report_from(d: &Diagram, poly: &LaurentPoly, atom: &AtomData) -> SpanReport {
    let n = d.n() as i64;
    let max_deg_predicted = n + 2 * (atom.a_circles as i64 - 1);
    let min_deg_predicted = -n - 2 * (atom.b_circles as i64 - 1);
    let bound = 4 * n + 2 * (atom.chi - 2);
    debug_assert_eq!(bound, max_deg_predicted - min_deg_predicted);
    let span = poly.span();
    SpanReport {
        span,
        bound,
        attained: span == Some(bound),
        max_deg_predicted,
        min_deg_predicted,
        leading_coeff: poly.coeff(max_deg_predicted),
        lowest_coeff: poly.coeff(min_deg_predicted),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::build_diagram;
    use crate::gauss::parse_gauss;

    fn diagram(s: &str) -> Diagram {
        build_diagram(parse_gauss(s).unwrap()).unwrap()
    }

    const TREFOIL: &str = "O1+ U2+ O3+ U1+ O2+ U3+";
    const VIRTUAL_TREFOIL: &str = "O1+ O2+ U1+ U2+";

    #[test]
    fn resolve_trefoil() {
        let t = diagram(TREFOIL);
        assert_eq!(resolve(&t, &State::all_a(3)).circle_count, 2);
        assert_eq!(resolve(&t, &State::all_b(3)).circle_count, 3);
    }

    #[test]
    fn resolve_kink() {
        let k = diagram("O1+ U1+");
        let mut counts = [
            resolve(&k, &State::all_a(1)).circle_count,
            resolve(&k, &State::all_b(1)).circle_count,
        ];
        counts.sort();
        assert_eq!(counts, [1, 2]);
    }

    #[test]
    fn membership_is_lowest_port_numbered() {
        let t = diagram(TREFOIL);
        let c = resolve(&t, &State::all_b(3));
        assert_eq!(c.membership[0], 0);
        let mut max_seen = 0;
        for &m in &c.membership {
            assert!(m <= max_seen + 1);
            max_seen = max_seen.max(m);
        }
    }

    #[test]
    fn bracket_small_cases() {
        let limits = Limits::default();
        assert_eq!(bracket(&diagram("o"), &limits).unwrap(), LaurentPoly::one());
        assert_eq!(
            bracket(&diagram("o; o"), &limits).unwrap(),
            LaurentPoly::loop_value()
        );
        assert_eq!(
            bracket(&diagram("O1+ U1+"), &limits).unwrap(),
            LaurentPoly::monomial(-1, 3)
        );
        let t = bracket(&diagram(TREFOIL), &limits).unwrap();
        assert_eq!(t, LaurentPoly::from_terms([(5, -1), (-3, -1), (-7, 1)]));
        assert_eq!(t.span(), Some(12));
    }

    #[test]
    fn guard_is_enforced() {
        let limits = Limits {
            bracket: 2,
            ..Limits::default()
        };
        assert_eq!(
            bracket(&diagram(TREFOIL), &limits),
            Err(Error::GuardExceeded {
                what: "bracket",
                n: 3,
                limit: 2
            })
        );
    }

    #[test]
    fn oracle_matches_on_named_diagrams() {
        let limits = Limits::default();
        for s in [
            TREFOIL,
            VIRTUAL_TREFOIL,
            "O1+ U1+",
            "o",
            "O1- U2- O3- U1- O2- U3- ; o",
        ] {
            let d = diagram(s);
            assert_eq!(
                bracket_oracle(&d).unwrap(),
                bracket(&d, &limits).unwrap(),
                "{s}"
            );
        }
    }

    #[test]
    fn atom_examples() {
        let t = atom(&diagram(TREFOIL));
        assert_eq!(
            t,
            AtomData {
                a_circles: 2,
                b_circles: 3,
                chi: 2,
                genus: 0,
                orientable: true
            }
        );
        // one A-circle and two B-circles: a projective plane
        let v = atom(&diagram(VIRTUAL_TREFOIL));
        assert_eq!((v.a_circles, v.b_circles, v.chi), (1, 2, 1));
        assert!(!v.orientable);
        assert_eq!(v.genus, 1);
        // Klein bottle
        let w = atom(&diagram("O1+ O2- U1+ U2-"));
        assert_eq!((w.chi, w.genus, w.orientable), (0, 2, false));
        let k = atom(&diagram("O1+ U1+"));
        assert_eq!((k.chi, k.genus), (2, 0));
        let u = atom(&diagram("o"));
        assert_eq!((u.chi, u.genus, u.orientable), (2, 0, true));
    }

    #[test]
    fn good_examples() {
        assert!(is_good(&diagram(TREFOIL)).good);
        let k = is_good(&diagram("O1+ U1+"));
        assert!(!k.good);
        assert_eq!(k.a_violations.len() + k.b_violations.len(), 1);
        assert_eq!([k.a_violations, k.b_violations].concat(), vec![1]);
    }

    #[test]
    fn span_examples() {
        let limits = Limits::default();
        let t = span_report(&diagram(TREFOIL), &limits).unwrap();
        assert_eq!((t.span, t.bound, t.attained), (Some(12), 12, true));
        assert_eq!(t.leading_coeff, BigInt::from(-1));
        assert_eq!(t.lowest_coeff, BigInt::from(1));

        let k = span_report(&diagram("O1+ U1+"), &limits).unwrap();
        assert_eq!((k.span, k.bound, k.attained), (Some(0), 4, false));

        let v = span_report(&diagram(VIRTUAL_TREFOIL), &limits).unwrap();
        assert_eq!(v.bound, 4 * 2 + 2 * (1 - 2));
        assert_eq!(v.span, Some(6));
        assert!(v.attained);
    }

    #[test]
    fn zero_polynomial_span_is_absent() {
        let d = diagram("O1+ U1+");
        let r = span_report_from(&d, &LaurentPoly::zero(), &atom(&d));
        assert_eq!(r.span, None);
        assert!(!r.attained);
    }

    #[test]
    fn walk_and_union_find_agree() {
        let d = diagram("O1+ U2- O3+ U1+ ; O2- U3+ O4- U4-");
        for bits in 0..16 {
            let s = State::new(4, bits);
            assert_eq!(resolve(&d, &s).circle_count, count_circles_by_walk(&d, &s));
        }
    }
}
