//! The accordion-diagonal predicate and enumeration of the faces and
//! facets of the accordion complex.

use std::collections::BTreeSet;

use crate::diag::{internal_solid_diagonals, Diagonal};
use crate::dissection::HollowDissection;
use crate::{Error, Result};

/// A face of the accordion complex: pairwise noncrossing internal solid
/// accordion diagonals of a reference hollow dissection.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AccordionDissection {
    pub diagonals: BTreeSet<Diagonal>,
}

impl AccordionDissection {
    pub fn empty() -> Self {
        Self { diagonals: BTreeSet::new() }
    }

    pub fn from_diagonals(diagonals: impl IntoIterator<Item = Diagonal>) -> Self {
        Self { diagonals: diagonals.into_iter().collect() }
    }

    /// Validates this set against its reference dissection: every member
    /// internal, solid, an accordion diagonal, and pairwise noncrossing.
    pub fn validate(&self, d: &HollowDissection) -> Result<()> {
        for delta in &self.diagonals {
            if !delta.is_solid() || !delta.is_internal(d.n) || delta.b > 2 * d.n {
                return Err(Error::Invalid(format!(
                    "({},{}) is not an internal solid diagonal",
                    delta.a, delta.b
                )));
            }
            if !is_accordion_diagonal(delta, d) {
                return Err(Error::Invalid(format!(
                    "({},{}) is not an accordion diagonal of the reference dissection",
                    delta.a, delta.b
                )));
            }
        }
        for d1 in &self.diagonals {
            for d2 in &self.diagonals {
                if d1 < d2 && d1.crosses(d2) {
                    return Err(Error::Invalid(format!(
                        "diagonals ({},{}) and ({},{}) cross",
                        d1.a, d1.b, d2.a, d2.b
                    )));
                }
            }
        }
        Ok(())
    }

    /// True iff no accordion diagonal outside the set is noncrossing with
    /// all members.
    pub fn is_maximal(&self, d: &HollowDissection) -> bool {
        accordion_diagonals(d)
            .iter()
            .all(|c| self.diagonals.contains(c) || self.diagonals.iter().any(|m| m.crosses(c)))
    }

    /// The barred form: the set plus all solid boundary edges.
    pub fn barred(&self, n: u32) -> BTreeSet<Diagonal> {
        let mut out = self.diagonals.clone();
        for i in 1..=n {
            let a = 2 * i;
            let b = if a + 2 > 2 * n { 2 } else { a + 2 };
            out.insert(Diagonal::new(a, b));
        }
        out
    }
}

/// True iff the hollow diagonals crossed by the solid diagonal form an
/// accordion of the reference dissection.
pub fn is_accordion_diagonal(delta: &Diagonal, d: &HollowDissection) -> bool {
    debug_assert!(delta.is_solid());
    if delta.is_external(d.n) {
        return true;
    }
    let crossed = d.crossed_hollow(delta);
    d.is_accordion(&crossed).expect("crossed set is a subset of the barred dissection")
}

/// All internal solid accordion diagonals, sorted.
pub fn accordion_diagonals(d: &HollowDissection) -> Vec<Diagonal> {
    internal_solid_diagonals(d.n)
        .into_iter()
        .filter(|delta| is_accordion_diagonal(delta, d))
        .collect()
}

/// All inclusion-maximal accordion dissections, in deterministic order.
pub fn facets(d: &HollowDissection) -> Vec<AccordionDissection> {
    let cands = accordion_diagonals(d);
    let k = cands.len();
    // pairwise compatibility (noncrossing) bit-matrix
    let compat: Vec<Vec<bool>> = (0..k)
        .map(|i| (0..k).map(|j| !cands[i].crosses(&cands[j])).collect())
        .collect();
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    backtrack(&cands, &compat, 0, &mut chosen, &mut out);
    out
}

fn backtrack(
    cands: &[Diagonal],
    compat: &[Vec<bool>],
    from: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<AccordionDissection>,
) {
    let mut extended = false;
    for i in from..cands.len() {
        if chosen.iter().all(|&j| compat[i][j]) {
            extended = true;
            chosen.push(i);
            backtrack(cands, compat, i + 1, chosen, out);
            chosen.pop();
        }
    }
    if !extended {
        // no candidate above `from` fits; maximal iff none below fits either
        let maximal = (0..cands.len())
            .all(|i| chosen.contains(&i) || !chosen.iter().all(|&j| compat[i][j]));
        if maximal {
            out.push(AccordionDissection::from_diagonals(
                chosen.iter().map(|&i| cands[i]),
            ));
        }
    }
}

/// Every face of the complex: the downward closure of the facets,
/// deduplicated, including the empty face.
pub fn faces(d: &HollowDissection) -> Vec<AccordionDissection> {
    let mut seen: BTreeSet<BTreeSet<Diagonal>> = BTreeSet::new();
    for facet in facets(d) {
        let members: Vec<Diagonal> = facet.diagonals.iter().copied().collect();
        for mask in 0u64..(1 << members.len()) {
            let subset: BTreeSet<Diagonal> = members
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, x)| *x)
                .collect();
            seen.insert(subset);
        }
    }
    seen.into_iter().map(|s| AccordionDissection { diagonals: s }).collect()
}
