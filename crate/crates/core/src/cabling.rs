//! Blackboard-framed parallel cables.
//!
//! Copy `r` of a strand runs at offset `r` to the left of the strand's
//! direction of travel. Crossing `id` becomes the `m x m` grid of crossings
//! labelled `(id - 1) * m^2 + r * m + b + 1`, where `r` is the copy index of
//! the understrand and `b` that of the overstrand; every grid crossing keeps
//! the original sign. At a positive crossing understrand copy `r` meets the
//! overstrand copies in order `b = 0, 1, ..`, while overstrand copy `b`
//! meets the understrand copies in order `r = m - 1, .., 0`. Both orders are
//! reversed at a negative crossing.

use serde::{Deserialize, Serialize};

use crate::diagram::{build_diagram, Diagram};
use crate::error::{Error, Result};
use crate::gauss::{GaussCode, GaussEntry, Passage, Sign};
use crate::statesum::atom;

/// Largest cable built, in crossings.
pub const MAX_CABLE_CROSSINGS: usize = 1 << 20;

/// The `m`-cable `D_m` of `d`.
pub fn cable(d: &Diagram, m: usize) -> Result<Diagram> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "cable multiplicity must be positive".into(),
        ));
    }
    let crossings = m
        .checked_mul(m)
        .and_then(|mm| mm.checked_mul(d.n()))
        .filter(|&c| c <= MAX_CABLE_CROSSINGS)
        .ok_or(Error::GuardExceeded {
            what: "cable",
            n: d.n().saturating_mul(m.saturating_mul(m)),
            limit: MAX_CABLE_CROSSINGS,
        })?;
    let max_id = d.code().crossing_ids().last().copied().unwrap_or(0) as u64;
    if max_id * (m * m) as u64 > u32::MAX as u64 {
        return Err(Error::GuardExceeded {
            what: "cable labels",
            n: crossings,
            limit: MAX_CABLE_CROSSINGS,
        });
    }

    let mm = (m * m) as u32;
    let m32 = m as u32;
    let label = |id: u32, r: u32, b: u32| (id - 1) * mm + r * m32 + b + 1;

    let mut components = Vec::with_capacity(d.component_count() * m);
    for comp in d.code().components() {
        for copy in 0..m32 {
            let mut entries = Vec::with_capacity(comp.len() * m);
            for e in comp {
                let forward = e.sign == Sign::Positive;
                for k in 0..m32 {
                    let (r, b) = match (e.passage, forward) {
                        (Passage::Under, true) => (copy, k),
                        (Passage::Under, false) => (copy, m32 - 1 - k),
                        (Passage::Over, true) => (m32 - 1 - k, copy),
                        (Passage::Over, false) => (k, copy),
                    };
                    entries.push(GaussEntry::new(label(e.crossing, r, b), e.passage, e.sign));
                }
            }
            components.push(entries);
        }
    }
    build_diagram(GaussCode::new(components)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CableReport {
    pub m: usize,
    /// Crossings of the cable, always `m^2 * n`.
    pub crossings: usize,
    pub components: usize,
    /// `m * (n + chi)`: the cells the cabled atom has when `d` is good.
    pub predicted_cells: i64,
    /// `|s_A| + |s_B|` of the cable.
    pub actual_cells: i64,
    pub chi_cable: i64,
    pub genus_cable: usize,
    pub cells_agree: bool,
    /// `4 * crossings + 2 * (chi_cable - 2)`.
    pub span_bound: i64,
    /// `2(m^2 + m) n + 2 m chi - 4`, the bound expected from the atom of `d`.
    pub usual_estimate: i64,
}

/// Compares the cell count of the cabled atom with `m * (n + chi)`.
pub fn cable_census(d: &Diagram, m: usize) -> Result<CableReport> {
    let dm = cable(d, m)?;
    let base = atom(d);
    let cabled = atom(&dm);
    let n = d.n() as i64;
    let mi = m as i64;
    let predicted_cells = mi * (n + base.chi);
    let actual_cells = (cabled.a_circles + cabled.b_circles) as i64;
    let crossings = dm.n();
    Ok(CableReport {
        m,
        crossings,
        components: dm.component_count(),
        predicted_cells,
        actual_cells,
        chi_cable: cabled.chi,
        genus_cable: cabled.genus,
        cells_agree: predicted_cells == actual_cells,
        span_bound: 4 * crossings as i64 + 2 * (cabled.chi - 2),
        usual_estimate: 2 * (mi * mi + mi) * n + 2 * mi * base.chi - 4,
    })
}
