//! Sparse linear algebra over GF(2).
//!
//! A vector is the sorted list of indices of its nonzero entries. Columns
//! are reduced against a table of pivots keyed by their largest index.

use std::collections::HashMap;

pub type SparseVec = Vec<u32>;

/// `a += b` over GF(2); both sorted.
pub fn add_into(a: &mut SparseVec, b: &[u32]) {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    *a = out;
}

/// Sorts and cancels repeated indices in pairs.
pub fn normalize(mut v: Vec<u32>) -> SparseVec {
    v.sort_unstable();
    let mut out: Vec<u32> = Vec::with_capacity(v.len());
    for x in v {
        if out.last() == Some(&x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

/// Incremental column echelon form.
#[derive(Debug, Default, Clone)]
pub struct Reducer {
    pivots: HashMap<u32, SparseVec>,
}

impl Reducer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reduces `v` until its largest index is not a pivot (or it vanishes).
    pub fn reduce(&self, mut v: SparseVec) -> SparseVec {
        while let Some(&low) = v.last() {
            match self.pivots.get(&low) {
                Some(p) => add_into(&mut v, p),
                None => break,
            }
        }
        v
    }

    /// Adds `v` to the spanned space; true if it was independent.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let v = self.reduce(v);
        match v.last() {
            Some(&low) => {
                self.pivots.insert(low, v);
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, v: SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

pub fn rank<I: IntoIterator<Item = SparseVec>>(columns: I) -> usize {
    let mut r = Reducer::new();
    for c in columns {
        r.insert(c);
    }
    r.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense_rank(rows: usize, cols: &[SparseVec]) -> usize {
        let mut m: Vec<Vec<bool>> = cols
            .iter()
            .map(|c| {
                let mut v = vec![false; rows];
                for &i in c {
                    v[i as usize] ^= true;
                }
                v
            })
            .collect();
        let mut rank = 0;
        for row in 0..rows {
            let Some(p) = (rank..m.len()).find(|&k| m[k][row]) else {
                continue;
            };
            m.swap(rank, p);
            for k in 0..m.len() {
                if k != rank && m[k][row] {
                    let pivot = m[rank].clone();
                    for (x, y) in m[k].iter_mut().zip(pivot) {
                        *x ^= y;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn add_cancels() {
        let mut a = vec![1, 3, 5];
        add_into(&mut a, &[3, 4]);
        assert_eq!(a, vec![1, 4, 5]);
        assert_eq!(normalize(vec![5, 1, 5, 2, 1, 1]), vec![1, 2]);
    }

    #[test]
    fn membership() {
        let mut r = Reducer::new();
        assert!(r.insert(vec![0, 1]));
        assert!(r.insert(vec![1, 2]));
        assert!(!r.insert(vec![0, 2]));
        assert!(r.contains(vec![0, 2]));
        assert!(!r.contains(vec![2, 3]));
        assert_eq!(r.rank(), 2);
    }

    proptest! {
        #[test]
        fn rank_matches_dense_elimination(
            cols in proptest::collection::vec(proptest::collection::vec(0u32..12, 0..6), 0..14)
        ) {
            let cols: Vec<SparseVec> = cols.into_iter().map(normalize).collect();
            prop_assert_eq!(rank(cols.clone()), dense_rank(12, &cols));
        }
    }
}
