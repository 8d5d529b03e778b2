//! Signed Gauss codes and the `.gauss` text format.
//!
//! A `.gauss` file lists the crossing visits of every component in order.
//! Each visit is a token `O<id><sign>` or `U<id><sign>`, e.g. `O1+ U2+ O3+`.
//! `#` starts a comment, components are separated by `;` or by a blank
//! line, and a component consisting of the single token `o` is a circle
//! without crossings.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Passage {
    Over,
    Under,
}

impl Passage {
    pub fn flip(self) -> Self {
        match self {
            Passage::Over => Passage::Under,
            Passage::Under => Passage::Over,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GaussEntry {
    pub crossing: u32,
    pub passage: Passage,
    pub sign: Sign,
}

impl GaussEntry {
    pub fn new(crossing: u32, passage: Passage, sign: Sign) -> Self {
        GaussEntry {
            crossing,
            passage,
            sign,
        }
    }

    pub fn over(crossing: u32, sign: Sign) -> Self {
        Self::new(crossing, Passage::Over, sign)
    }

    pub fn under(crossing: u32, sign: Sign) -> Self {
        Self::new(crossing, Passage::Under, sign)
    }
}

impl fmt::Display for GaussEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = match self.passage {
            Passage::Over => 'O',
            Passage::Under => 'U',
        };
        let s = match self.sign {
            Sign::Positive => '+',
            Sign::Negative => '-',
        };
        write!(f, "{p}{}{s}", self.crossing)
    }
}

/// A validated signed Gauss code. An empty component is a crossingless
/// circle.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussCode {
    components: Vec<Vec<GaussEntry>>,
}

impl GaussCode {
    pub fn new(components: Vec<Vec<GaussEntry>>) -> Result<Self> {
        let code = GaussCode { components };
        code.validate()?;
        Ok(code)
    }

    pub fn components(&self) -> &[Vec<GaussEntry>] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Vec<GaussEntry>> {
        self.components
    }

    /// Distinct crossing ids in ascending order.
    pub fn crossing_ids(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self
            .components
            .iter()
            .flatten()
            .filter(|e| e.passage == Passage::Over)
            .map(|e| e.crossing)
            .collect();
        ids.sort_unstable();
        ids
    }

    pub fn crossing_count(&self) -> usize {
        self.components.iter().map(Vec::len).sum::<usize>() / 2
    }

    fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::Empty);
        }
        let mut seen: BTreeMap<u32, Vec<&GaussEntry>> = BTreeMap::new();
        for e in self.components.iter().flatten() {
            if e.crossing == 0 {
                return Err(Error::ZeroCrossingId);
            }
            seen.entry(e.crossing).or_default().push(e);
        }
        for (&id, occ) in &seen {
            if occ.len() != 2 {
                return Err(Error::OccurrenceCount {
                    id,
                    count: occ.len(),
                });
            }
            if occ[0].passage == occ[1].passage {
                return Err(Error::DuplicatePassage(id));
            }
            if occ[0].sign != occ[1].sign {
                return Err(Error::SignMismatch(id));
            }
        }
        Ok(())
    }
}

impl fmt::Display for GaussCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, comp) in self.components.iter().enumerate() {
            if k > 0 {
                writeln!(f, ";")?;
            }
            if comp.is_empty() {
                write!(f, "o")?;
            }
            for (i, e) in comp.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{e}")?;
            }
        }
        writeln!(f)
    }
}

impl FromStr for GaussCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_gauss(s)
    }
}

enum Segment {
    Entries(Vec<GaussEntry>),
    Circle,
}

#[derive(Default)]
struct SegmentBuilder {
    entries: Vec<GaussEntry>,
    circle: bool,
}

impl SegmentBuilder {
    fn push_entry(&mut self, e: GaussEntry, line: usize, column: usize) -> Result<()> {
        if self.circle {
            return Err(syntax(line, column, Error::MixedCircleMarker.to_string()));
        }
        self.entries.push(e);
        Ok(())
    }

    fn push_circle(&mut self, line: usize, column: usize) -> Result<()> {
        if self.circle || !self.entries.is_empty() {
            return Err(syntax(line, column, Error::MixedCircleMarker.to_string()));
        }
        self.circle = true;
        Ok(())
    }

    fn finish(&mut self) -> Option<Segment> {
        let b = std::mem::take(self);
        if b.circle {
            Some(Segment::Circle)
        } else if !b.entries.is_empty() {
            Some(Segment::Entries(b.entries))
        } else {
            None
        }
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Parses the `.gauss` text format and validates the code.
pub fn parse_gauss(text: &str) -> Result<GaussCode> {
    let mut segments = Vec::new();
    let mut current = SegmentBuilder::default();

    for (lno, raw) in text.lines().enumerate() {
        let line = lno + 1;
        if raw.trim().is_empty() {
            segments.extend(current.finish());
            continue;
        }
        let body = raw.split('#').next().unwrap_or("");
        let chars: Vec<(usize, char)> = body.char_indices().collect();
        let mut k = 0;
        while k < chars.len() {
            let (col, c) = chars[k];
            let column = col + 1;
            match c {
                c if c.is_whitespace() => k += 1,
                ';' => {
                    segments.extend(current.finish());
                    k += 1;
                }
                'o' => {
                    let next = chars.get(k + 1).map(|&(_, c)| c);
                    if matches!(next, Some(c) if !c.is_whitespace() && c != ';') {
                        return Err(syntax(line, column, "unexpected character after 'o'"));
                    }
                    current.push_circle(line, column)?;
                    k += 1;
                }
                'O' | 'U' => {
                    let passage = if c == 'O' {
                        Passage::Over
                    } else {
                        Passage::Under
                    };
                    let mut j = k + 1;
                    let mut id: u64 = 0;
                    while j < chars.len() && chars[j].1.is_ascii_digit() {
                        id = id * 10 + chars[j].1.to_digit(10).unwrap() as u64;
                        if id > u32::MAX as u64 {
                            return Err(syntax(line, column, "crossing id too large"));
                        }
                        j += 1;
                    }
                    if j == k + 1 {
                        return Err(syntax(line, column, "expected crossing id after passage"));
                    }
                    let sign = match chars.get(j).map(|&(_, c)| c) {
                        Some('+') => Sign::Positive,
                        Some('-') => Sign::Negative,
                        _ => {
                            let col = chars.get(j).map_or(body.len(), |&(c, _)| c) + 1;
                            return Err(syntax(line, col, "expected '+' or '-' after crossing id"));
                        }
                    };
                    j += 1;
                    if let Some(&(col, c)) = chars.get(j) {
                        if !c.is_whitespace() && c != ';' {
                            return Err(syntax(
                                line,
                                col + 1,
                                format!("unexpected character '{c}' after entry"),
                            ));
                        }
                    }
                    if id == 0 {
                        return Err(syntax(line, column, "crossing ids must be positive"));
                    }
                    current.push_entry(GaussEntry::new(id as u32, passage, sign), line, column)?;
                    k = j;
                }
                other => {
                    return Err(syntax(
                        line,
                        column,
                        format!("unexpected character '{other}'"),
                    ));
                }
            }
        }
    }
    segments.extend(current.finish());

    let components = segments
        .into_iter()
        .map(|s| match s {
            Segment::Entries(e) => e,
            Segment::Circle => Vec::new(),
        })
        .collect();
    GaussCode::new(components)
}
