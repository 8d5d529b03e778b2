//! Kauffman bracket state sums, atoms, cablings and GF(2) Khovanov homology
//! of virtual link diagrams, plus lower-bound certificates for their
//! number of classical crossings.

pub mod cabling;
pub mod certify;
pub mod diagram;
pub mod dsu;
pub mod error;
pub mod gauss;
pub mod gf2;
pub mod khovanov;
pub mod poly;
pub mod statesum;

pub use cabling::{cable, cable_census, CableReport};
pub use certify::{
    asymptotic_check, good_certificate, kauffman_lower_bound, verify, AsymptoticReport,
    Certificate, CertificateKind,
};
pub use diagram::{build_diagram, connected_sum, Diagram, SpliceSite};
pub use error::{Error, Result};
pub use gauss::{parse_gauss, GaussCode, GaussEntry, Passage, Sign};
pub use khovanov::{cube, homology, lemma_certificate, thickness, ChainComplex, HomologyTable};
pub use poly::LaurentPoly;
pub use statesum::{
    atom, bracket, bracket_oracle, is_good, resolve, resolve_extreme, span_report, AtomData,
    GoodReport, SpanReport, State, StateCircles,
};

/// Crossing guards for the exponential computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest diagram whose bracket is summed over all states.
    pub bracket: usize,
    /// Largest diagram whose Khovanov complex is built.
    pub khovanov: usize,
}

impl Limits {
    pub const DEFAULT_BRACKET: usize = 28;
    pub const DEFAULT_KHOVANOV: usize = 14;

    /// Guards as large as the representation allows.
    pub fn forced() -> Self {
        Limits {
            bracket: 40,
            khovanov: 24,
        }
    }
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            bracket: Self::DEFAULT_BRACKET,
            khovanov: Self::DEFAULT_KHOVANOV,
        }
    }
}

/// Parses `.gauss` text straight into a diagram.
pub fn parse_diagram(text: &str) -> Result<Diagram> {
    build_diagram(parse_gauss(text)?)
}

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
