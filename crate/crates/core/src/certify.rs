//! Lower-bound certificates for the number of classical crossings.
//!
//! Every certificate lists its premises, each either machine-verified from
//! the diagram or an explicit assumption, together with the numbers the
//! bound is derived from. [`verify`] recomputes all verified premises and
//! the bound arithmetic from the diagram alone.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cabling::cable;
use crate::diagram::{connected_sum, Diagram, SpliceSite};
use crate::error::{Error, Result};
use crate::khovanov::{cube, homology, lemma_from_complex, thickness, LemmaReport};
use crate::poly::LaurentPoly;
use crate::statesum::{atom, bracket, is_good, span_report_from, AtomData};
use crate::{Limits, TOOL_VERSION};

pub const NON_SPLIT: &str = "non-split link (no split diagrams)";
pub const CONNECTED: &str = "diagram graph connected";
pub const BRACKET_NONZERO: &str = "Kauffman bracket nonzero";
pub const GOOD: &str = "good";
pub const ORIENTABLE: &str = "atom orientable";
pub const SPAN_ATTAINED: &str = "span attains 4n + 2(chi - 2)";
pub const CLASSICAL: &str = "classical: carter_genus = 0";
pub const KNOT: &str = "knot: one component";
pub const LEMMA: &str = "extreme Khovanov generators survive";
pub const INFINITE_SEQUENCE: &str = "span hypothesis holds for infinitely many m";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    SpanLowerBound,
    GoodVirtual,
    GoodClassicalKnot,
    AsymptoticEvidence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PremiseStatus {
    Verified,
    Assumed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Premise {
    pub name: String,
    pub status: PremiseStatus,
}

impl Premise {
    fn verified(name: &str) -> Self {
        Premise {
            name: name.into(),
            status: PremiseStatus::Verified,
        }
    }

    fn assumed(name: &str) -> Self {
        Premise {
            name: name.into(),
            status: PremiseStatus::Assumed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Evidence {
    /// Classical crossings of the certified diagram.
    pub n: usize,
    /// Which competitor diagrams the bound applies to.
    pub scope: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span_bound: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carter_genus: Option<usize>,
    /// Right-hand side of `span <= 4n' + 2(chi + 2)` at `n' = lower_bound`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub competitor_span_bound: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thickness: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma: Option<LemmaReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asymptotic: Option<AsymptoticReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    /// Minimum number of classical crossings of any equivalent diagram in
    /// the stated scope.
    pub lower_bound: usize,
    pub premises: Vec<Premise>,
    pub evidence: Evidence,
    /// The bound says nothing (it is zero).
    pub vacuous: bool,
    pub tool_version: String,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidArgument(e.to_string()))
    }

    pub fn has_premise(&self, name: &str) -> bool {
        self.premises.iter().any(|p| p.name == name)
    }
}

fn require_connected(d: &Diagram) -> Result<()> {
    if d.is_split() {
        Err(Error::Split)
    } else {
        Ok(())
    }
}

/// `ceil(span / 4)`: any equivalent non-split diagram with `n'` crossings
/// has `span <= 4n' + 2(chi' - 2) <= 4n'`.
pub fn kauffman_lower_bound(d: &Diagram, limits: &Limits) -> Result<Certificate> {
    require_connected(d)?;
    let poly = bracket(d, limits)?;
    kauffman_lower_bound_from(d, &poly)
}

/// As [`kauffman_lower_bound`], with the bracket already computed.
pub fn kauffman_lower_bound_from(d: &Diagram, poly: &LaurentPoly) -> Result<Certificate> {
    require_connected(d)?;
    let span = poly.span().ok_or(Error::ZeroBracket)?;
    let a = atom(d);
    let lower_bound = span.div_euclid(4) + i64::from(span.rem_euclid(4) != 0);
    Ok(Certificate {
        kind: CertificateKind::SpanLowerBound,
        lower_bound: lower_bound as usize,
        premises: vec![
            Premise::assumed(NON_SPLIT),
            Premise::verified(CONNECTED),
            Premise::verified(BRACKET_NONZERO),
        ],
        evidence: Evidence {
            n: d.n(),
            scope: "all virtual diagrams of the link".into(),
            span: Some(span),
            span_bound: Some(4 * d.n() as i64 + 2 * (a.chi - 2)),
            chi: Some(a.chi),
            ..Evidence::default()
        },
        vacuous: lower_bound == 0,
        tool_version: TOOL_VERSION.into(),
    })
}

/// Certificate for a good diagram with an orientable atom. Classical knot
/// diagrams are minimal among classical diagrams; otherwise every
/// equivalent virtual diagram has at least `n - 2` classical crossings.
pub fn good_certificate(d: &Diagram, limits: &Limits) -> Result<Certificate> {
    require_connected(d)?;
    let good = is_good(d);
    if !good.good {
        return Err(Error::NotGood {
            a_violations: good.a_violations,
            b_violations: good.b_violations,
        });
    }
    let a = atom(d);
    if !a.orientable {
        return Err(Error::NonOrientableAtom);
    }
    let poly = bracket(d, limits)?;
    let span = span_report_from(d, &poly, &a);
    if !span.attained {
        return Err(Error::Internal(
            "good diagram whose bracket span is not attained".into(),
        ));
    }
    let n = d.n();
    let carter = d.carter_genus();
    let classical_knot = carter == 0 && d.is_knot();

    let mut premises = vec![
        Premise::assumed(NON_SPLIT),
        Premise::verified(CONNECTED),
        Premise::verified(GOOD),
        Premise::verified(ORIENTABLE),
        Premise::verified(SPAN_ATTAINED),
    ];
    let mut evidence = Evidence {
        n,
        span: span.span,
        span_bound: Some(span.bound),
        chi: Some(a.chi),
        genus: Some(a.genus),
        carter_genus: Some(carter),
        ..Evidence::default()
    };

    if n <= limits.khovanov {
        let complex = cube(d, limits)?;
        let lemma = lemma_from_complex(&complex);
        if !lemma.implies_bound {
            return Err(Error::Internal(
                "extreme Khovanov generators of a good diagram do not survive".into(),
            ));
        }
        evidence.thickness = Some(thickness(&homology(&complex))?.thickness);
        evidence.lemma = Some(lemma);
        premises.push(Premise::verified(LEMMA));
    }

    let (kind, lower_bound) = if classical_knot {
        premises.push(Premise::verified(CLASSICAL));
        premises.push(Premise::verified(KNOT));
        evidence.scope = "classical diagrams of the knot only".into();
        (CertificateKind::GoodClassicalKnot, n)
    } else {
        evidence.scope = "all virtual diagrams of the link".into();
        let lb = n.saturating_sub(2);
        evidence.competitor_span_bound = Some(4 * (n as i64 - 2) + 2 * (a.chi + 2));
        (CertificateKind::GoodVirtual, lb)
    };
    let cert = Certificate {
        kind,
        lower_bound,
        premises,
        evidence,
        vacuous: lower_bound == 0,
        tool_version: TOOL_VERSION.into(),
    };
    check_arithmetic(&cert)?;
    Ok(cert)
}

/// Re-derives the bound from the certificate's own evidence.
pub fn check_arithmetic(cert: &Certificate) -> Result<()> {
    let fail = |m: String| Err(Error::Verification(m));
    let ev = &cert.evidence;
    let n = ev.n as i64;
    let lb = cert.lower_bound as i64;
    if lb > n {
        return fail(format!(
            "lower bound {lb} exceeds the witness's own {n} crossings"
        ));
    }
    if cert.vacuous != (lb == 0) {
        return fail("vacuous flag disagrees with the bound".into());
    }
    match cert.kind {
        CertificateKind::SpanLowerBound => {
            let Some(span) = ev.span else {
                return fail("missing span".into());
            };
            if 4 * lb < span || 4 * (lb - 1) >= span && lb > 0 {
                return fail(format!("{lb} is not ceil({span} / 4)"));
            }
        }
        CertificateKind::GoodClassicalKnot | CertificateKind::GoodVirtual => {
            let (Some(span), Some(chi)) = (ev.span, ev.chi) else {
                return fail("missing span or chi".into());
            };
            if span != 4 * n + 2 * (chi - 2) {
                return fail("span is not 4n + 2(chi - 2)".into());
            }
            if cert.kind == CertificateKind::GoodClassicalKnot {
                if lb != n || ev.carter_genus != Some(0) {
                    return fail("classical bound must equal n on a genus-0 diagram".into());
                }
            } else {
                // any competitor with n' crossings has chi' <= chi + 4, so
                // 4n + 2(chi - 2) = span <= 4n' + 2(chi + 2), i.e. 4(n - n') <= 8
                let competitor = n - 2;
                if ev.competitor_span_bound != Some(4 * competitor + 2 * (chi + 2)) {
                    return fail("competitor span bound mismatch".into());
                }
                if span > 4 * competitor + 2 * (chi + 2) || 4 * (n - competitor) > 8 {
                    return fail("inequality chain 4(n - n') <= 8 broken".into());
                }
                if lb != competitor.max(0) {
                    return fail("virtual bound must be max(n - 2, 0)".into());
                }
            }
        }
        CertificateKind::AsymptoticEvidence => {
            if lb != 0 || !cert.vacuous {
                return fail("finite evidence never bounds crossings".into());
            }
        }
    }
    Ok(())
}

/// Recomputes every verified premise and the evidence from `d`.
pub fn verify(cert: &Certificate, d: &Diagram, limits: &Limits) -> Result<()> {
    let fail = |m: String| Err(Error::Verification(m));
    check_arithmetic(cert)?;
    if cert.evidence.n != d.n() {
        return fail("crossing count differs from the diagram".into());
    }
    let a: AtomData = atom(d);
    let poly = match cert.kind {
        CertificateKind::AsymptoticEvidence => None,
        _ => Some(bracket(d, limits)?),
    };
    let mut lemma = None;
    for p in cert
        .premises
        .iter()
        .filter(|p| p.status == PremiseStatus::Verified)
    {
        let ok = match p.name.as_str() {
            CONNECTED => !d.is_split(),
            BRACKET_NONZERO => poly.as_ref().is_some_and(|b| !b.is_zero()),
            GOOD => is_good(d).good,
            ORIENTABLE => a.orientable,
            SPAN_ATTAINED => poly
                .as_ref()
                .is_some_and(|b| span_report_from(d, b, &a).attained),
            CLASSICAL => d.carter_genus() == 0,
            KNOT => d.is_knot(),
            LEMMA => {
                let l = lemma_from_complex(&cube(d, limits)?);
                let ok = l.implies_bound;
                lemma = Some(l);
                ok
            }
            other => return fail(format!("unknown verified premise '{other}'")),
        };
        if !ok {
            return fail(format!("premise '{}' does not hold", p.name));
        }
    }
    let ev = &cert.evidence;
    if let (Some(span), Some(b)) = (ev.span, poly.as_ref()) {
        if b.span() != Some(span) {
            return fail("span differs from the recomputed bracket".into());
        }
    }
    if ev.chi.is_some_and(|c| c != a.chi) {
        return fail("chi differs from the recomputed atom".into());
    }
    if ev.genus.is_some_and(|g| g != a.genus) {
        return fail("genus differs from the recomputed atom".into());
    }
    if ev.carter_genus.is_some_and(|g| g != d.carter_genus()) {
        return fail("carter genus differs".into());
    }
    if let (Some(claimed), Some(l)) = (&ev.lemma, &lemma) {
        if claimed != l {
            return fail("lemma report differs".into());
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsymptoticEntry {
    pub m: usize,
    pub crossings: usize,
    pub span: Option<i64>,
    /// `2(m^2 + m) N + 2 m chi - 4 - (4 - eps)(m^2 + m)`.
    pub threshold: Ratio<i64>,
    /// `2(m^2 + m) N + 2 m chi - 4`.
    pub usual_estimate: i64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub label: String,
    pub epsilon: Ratio<i64>,
    /// Crossings of `K # mirror(K)`.
    pub sum_crossings: usize,
    pub sum_chi: i64,
    pub entries: Vec<AsymptoticEntry>,
    pub all_pass: bool,
}

pub const FINITE_EVIDENCE: &str =
    "FINITE EVIDENCE: the minimality criterion needs infinitely many m; no bound is claimed";

/// Evaluates the span hypothesis on `D_m(K # mirror(K))` for each `m`.
pub fn asymptotic_check(
    d: &Diagram,
    epsilon: Ratio<i64>,
    ms: &[usize],
    limits: &Limits,
) -> Result<AsymptoticReport> {
    if !d.is_knot() {
        return Err(Error::NotClassicalKnot(format!(
            "{} components; connected sum needs a knot",
            d.component_count()
        )));
    }
    if d.carter_genus() != 0 {
        return Err(Error::NotClassicalKnot(
            "virtual diagram (carter genus > 0); connected sum is not well defined".into(),
        ));
    }
    if epsilon <= Ratio::from_integer(0) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    if ms.is_empty() || ms.contains(&0) {
        return Err(Error::InvalidArgument("m values must be positive".into()));
    }
    let sum = connected_sum(d, &d.mirror(), SpliceSite::default(), SpliceSite::default())?;
    let big_n = sum.n() as i64;
    let chi = atom(&sum).chi;
    for &m in ms {
        let c = m * m * sum.n();
        if c > limits.bracket {
            return Err(Error::GuardExceeded {
                what: "bracket",
                n: c,
                limit: limits.bracket,
            });
        }
    }
    let entries = ms
        .par_iter()
        .map(|&m| -> Result<AsymptoticEntry> {
            let dm = cable(&sum, m)?;
            let span = bracket(&dm, limits)?.span();
            let mi = m as i64;
            let quad = mi * mi + mi;
            let usual_estimate = 2 * quad * big_n + 2 * mi * chi - 4;
            let threshold = Ratio::from_integer(usual_estimate)
                - (Ratio::from_integer(4) - epsilon) * Ratio::from_integer(quad);
            Ok(AsymptoticEntry {
                m,
                crossings: dm.n(),
                span,
                threshold,
                usual_estimate,
                pass: span.is_some_and(|s| Ratio::from_integer(s) >= threshold),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AsymptoticReport {
        label: FINITE_EVIDENCE.into(),
        epsilon,
        sum_crossings: sum.n(),
        sum_chi: chi,
        all_pass: entries.iter().all(|e| e.pass),
        entries,
    })
}

impl AsymptoticReport {
    /// Wraps the report as a vacuous evidence certificate.
    pub fn to_certificate(&self, d: &Diagram) -> Certificate {
        Certificate {
            kind: CertificateKind::AsymptoticEvidence,
            lower_bound: 0,
            premises: vec![
                Premise::verified(CLASSICAL),
                Premise::verified(KNOT),
                Premise::assumed(INFINITE_SEQUENCE),
            ],
            evidence: Evidence {
                n: d.n(),
                scope: "classical diagrams of the knot, only if the hypothesis holds for infinitely many m".into(),
                asymptotic: Some(self.clone()),
                ..Evidence::default()
            },
            vacuous: true,
            tool_version: TOOL_VERSION.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_diagram;

    const TREFOIL: &str = "O1+ U2+ O3+ U1+ O2+ U3+";

    #[test]
    fn trefoil_span_bound() {
        let d = parse_diagram(TREFOIL).unwrap();
        let c = kauffman_lower_bound(&d, &Limits::default()).unwrap();
        assert_eq!(c.kind, CertificateKind::SpanLowerBound);
        assert_eq!(c.lower_bound, 3);
        assert_eq!(c.evidence.span, Some(12));
        verify(&c, &d, &Limits::default()).unwrap();
    }

    #[test]
    fn unknot_span_bound() {
        let d = parse_diagram("o").unwrap();
        let c = kauffman_lower_bound(&d, &Limits::default()).unwrap();
        assert_eq!(c.lower_bound, 0);
        assert!(c.vacuous);
    }

    #[test]
    fn trefoil_good_certificate() {
        let d = parse_diagram(TREFOIL).unwrap();
        let c = good_certificate(&d, &Limits::default()).unwrap();
        assert_eq!(c.kind, CertificateKind::GoodClassicalKnot);
        assert_eq!(c.lower_bound, 3);
        assert!(c.has_premise(CLASSICAL) && c.has_premise(LEMMA));
        assert!(c
            .premises
            .iter()
            .any(|p| p.name == NON_SPLIT && p.status == PremiseStatus::Assumed));
        assert_eq!(c.evidence.thickness, Some(2));
        verify(&c, &d, &Limits::default()).unwrap();
        let back = Certificate::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn kink_is_refused() {
        let d = parse_diagram("O1+ U1+").unwrap();
        match good_certificate(&d, &Limits::default()) {
            Err(Error::NotGood {
                a_violations,
                b_violations,
            }) => assert_eq!([a_violations, b_violations].concat(), vec![1]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn split_and_zero_refused() {
        let d = parse_diagram("O1+ U1+ ; O2+ U2+").unwrap();
        assert_eq!(
            kauffman_lower_bound(&d, &Limits::default()),
            Err(Error::Split)
        );
        let t = parse_diagram(TREFOIL).unwrap();
        assert_eq!(
            kauffman_lower_bound_from(&t, &LaurentPoly::zero()),
            Err(Error::ZeroBracket)
        );
    }

    #[test]
    fn tampered_certificates_fail_verification() {
        let d = parse_diagram(TREFOIL).unwrap();
        let limits = Limits::default();
        let mut c = good_certificate(&d, &limits).unwrap();
        c.lower_bound = 4;
        assert!(verify(&c, &d, &limits).is_err());

        let mut c = kauffman_lower_bound(&d, &limits).unwrap();
        c.evidence.span = Some(16);
        c.lower_bound = 4;
        assert!(verify(&c, &d, &limits).is_err());

        let mut c = good_certificate(&d, &limits).unwrap();
        c.premises.push(Premise::verified("made up"));
        assert!(verify(&c, &d, &limits).is_err());

        let kink = parse_diagram("O1+ U1+").unwrap();
        let mut c = good_certificate(&d, &limits).unwrap();
        c.evidence.n = 1;
        c.lower_bound = 1;
        assert!(verify(&c, &kink, &limits).is_err());
    }

    #[test]
    fn asymptotic_trefoil() {
        let d = parse_diagram(TREFOIL).unwrap();
        let r = asymptotic_check(&d, Ratio::from_integer(1), &[1, 2], &Limits::default()).unwrap();
        assert!(r.label.starts_with("FINITE EVIDENCE"));
        assert_eq!(r.sum_crossings, 6);
        assert_eq!(r.sum_chi, 2);
        assert_eq!(r.entries[0].span, Some(24));
        assert_eq!(r.entries[0].threshold, Ratio::from_integer(18));
        assert_eq!(r.entries[1].span, Some(76));
        assert_eq!(r.entries[1].threshold, Ratio::from_integer(58));
        assert!(r.all_pass);
        let c = r.to_certificate(&d);
        assert_eq!(c.kind, CertificateKind::AsymptoticEvidence);
        verify(&c, &d, &Limits::default()).unwrap();
    }

    #[test]
    fn asymptotic_epsilon_near_four() {
        let d = parse_diagram(TREFOIL).unwrap();
        let eps = Ratio::new(3999, 1000);
        let r = asymptotic_check(&d, eps, &[1], &Limits::default()).unwrap();
        let e = &r.entries[0];
        assert_eq!(e.usual_estimate, 24);
        assert!(e.threshold < Ratio::from_integer(24) && e.threshold > Ratio::from_integer(23));
        assert!(e.pass);
    }

    #[test]
    fn asymptotic_refusals() {
        let v = parse_diagram("O1+ O2+ U1+ U2+").unwrap();
        assert!(matches!(
            asymptotic_check(&v, Ratio::from_integer(1), &[1], &Limits::default()),
            Err(Error::NotClassicalKnot(_))
        ));
        let t = parse_diagram(TREFOIL).unwrap();
        assert!(asymptotic_check(&t, Ratio::from_integer(0), &[1], &Limits::default()).is_err());
        assert!(matches!(
            asymptotic_check(&t, Ratio::from_integer(1), &[3], &Limits::default()),
            Err(Error::GuardExceeded { .. })
        ));
    }
}
