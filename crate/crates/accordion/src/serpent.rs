//! Serpents (dual paths whose consecutive edges share a hollow vertex),
//! the four incompatibility conditions, and serpent-nest enumeration.

use std::collections::{BTreeMap, BTreeSet};

use crate::diag::{cyclic_pos, Diagonal};
use crate::dissection::HollowDissection;
use crate::{Error, Result};

/// A serpent: a nonempty undirected dual path whose consecutive edges
/// share a hollow vertex. Stored with its edges in path order, oriented so
/// the first edge is lexicographically at most the last.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Serpent {
    edges: Vec<Diagonal>,
}

impl Serpent {
    /// Builds a serpent from an ordered edge path, canonicalizing the
    /// orientation. Fails if the edges do not form a serpent of `d`.
    pub fn new(edges: Vec<Diagonal>, d: &HollowDissection) -> Result<Self> {
        if !is_serpent(&edges, d) {
            return Err(Error::Invalid(format!("edge list {edges:?} is not a serpent")));
        }
        Ok(Self::canonical(edges))
    }

    fn canonical(mut edges: Vec<Diagonal>) -> Self {
        if edges.first() > edges.last() {
            edges.reverse();
        }
        Self { edges }
    }

    pub fn edges(&self) -> &[Diagonal] {
        &self.edges
    }

    pub fn edge_set(&self) -> BTreeSet<Diagonal> {
        self.edges.iter().copied().collect()
    }

    pub fn contains_edge(&self, d: &Diagonal) -> bool {
        self.edges.contains(d)
    }

    /// The two end edges of the path (equal for a single-edge serpent).
    pub fn final_edges(&self) -> (Diagonal, Diagonal) {
        (*self.edges.first().unwrap(), *self.edges.last().unwrap())
    }

    pub fn is_final_edge(&self, d: &Diagonal) -> bool {
        let (h, t) = self.final_edges();
        h == *d || t == *d
    }

    /// True iff at least two edges of the serpent are incident to `v`.
    pub fn turns_at(&self, v: u32) -> bool {
        self.edges.iter().filter(|e| e.has_endpoint(v)).count() >= 2
    }
}

/// The serpent predicate: nonempty, a simple path in the dual tree, with
/// consecutive edges sharing a hollow vertex.
pub fn is_serpent(edges: &[Diagonal], d: &HollowDissection) -> bool {
    if edges.is_empty() {
        return false;
    }
    if edges.iter().any(|e| !d.diagonals.contains(e)) {
        return false;
    }
    let distinct: BTreeSet<&Diagonal> = edges.iter().collect();
    if distinct.len() != edges.len() {
        return false;
    }
    let mut visited_cells: BTreeSet<usize> = BTreeSet::new();
    for w in edges.windows(2) {
        if w[0].shared_endpoint(&w[1]).is_none() {
            return false;
        }
        let (a0, b0) = d.dual_tree().cells_of(&w[0]);
        let (a1, b1) = d.dual_tree().cells_of(&w[1]);
        let shared_cell = [a0, b0]
            .into_iter()
            .find(|c| *c == a1 || *c == b1);
        match shared_cell {
            None => return false,
            Some(c) => {
                if !visited_cells.insert(c) {
                    // revisits a cell: not a simple dual path
                    return false;
                }
            }
        }
    }
    true
}

/// Reassembles a serpent from an unordered edge set, or fails if the set
/// is not a simple shared-vertex dual path.
pub fn serpent_from_edge_set(
    edges: &BTreeSet<Diagonal>,
    d: &HollowDissection,
) -> Result<Serpent> {
    if edges.is_empty() {
        return Err(Error::Invalid("empty edge set".into()));
    }
    if edges.len() == 1 {
        return Serpent::new(edges.iter().copied().collect(), d);
    }
    // order the edges along the dual tree: cell degrees within the subset
    let mut cell_edges: BTreeMap<usize, Vec<Diagonal>> = BTreeMap::new();
    for e in edges {
        if !d.diagonals.contains(e) {
            return Err(Error::Invalid(format!("({},{}) is not a diagonal", e.a, e.b)));
        }
        let (i, j) = d.dual_tree().cells_of(e);
        cell_edges.entry(i).or_default().push(*e);
        cell_edges.entry(j).or_default().push(*e);
    }
    if cell_edges.values().any(|v| v.len() > 2) {
        return Err(Error::Invalid("edge set branches in the dual tree".into()));
    }
    // walk from the lexicographically-smallest end edge
    let mut end_cells: Vec<usize> = cell_edges
        .iter()
        .filter(|(_, v)| v.len() == 1)
        .map(|(c, _)| *c)
        .collect();
    if end_cells.len() != 2 {
        return Err(Error::Invalid("edge set is not a dual path".into()));
    }
    end_cells.sort();
    let start = *end_cells
        .iter()
        .min_by_key(|c| cell_edges[c][0])
        .unwrap();
    let mut path = Vec::new();
    let mut cell = start;
    let mut last: Option<Diagonal> = None;
    loop {
        let next = cell_edges[&cell].iter().find(|e| Some(**e) != last).copied();
        match next {
            Some(e) => {
                path.push(e);
                cell = d.cell_across(&e, cell);
                last = Some(e);
            }
            None => break,
        }
    }
    if path.len() != edges.len() {
        return Err(Error::Invalid("edge set is not connected in the dual tree".into()));
    }
    Serpent::new(path, d)
}

/// All serpents of the dissection, in deterministic order.
pub fn enumerate_serpents(d: &HollowDissection) -> Vec<Serpent> {
    let mut found: BTreeSet<Serpent> = BTreeSet::new();
    for start in &d.diagonals {
        let (c1, c2) = d.dual_tree().cells_of(start);
        for forward in [c1, c2] {
            extend(d, vec![*start], forward, &mut found);
        }
    }
    found.into_iter().collect()
}

fn extend(d: &HollowDissection, path: Vec<Diagonal>, forward_cell: usize, found: &mut BTreeSet<Serpent>) {
    found.insert(Serpent::canonical(path.clone()));
    let last = *path.last().unwrap();
    for e in d.cells()[forward_cell].edges() {
        if e.is_internal(d.n)
            && e != last
            && d.diagonals.contains(&e)
            && e.shared_endpoint(&last).is_some()
        {
            let mut next = path.clone();
            next.push(e);
            let across = d.cell_across(&e, forward_cell);
            extend(d, next, across, found);
        }
    }
}

/// Common edges of two serpents, reassembled as a serpent (paths in a
/// tree intersect in a path), or `None` when edge-disjoint.
pub fn serpent_intersection(
    s1: &Serpent,
    s2: &Serpent,
    d: &HollowDissection,
) -> Result<Option<Serpent>> {
    let common: BTreeSet<Diagonal> = s1
        .edge_set()
        .intersection(&s2.edge_set())
        .copied()
        .collect();
    if common.is_empty() {
        return Ok(None);
    }
    Ok(Some(serpent_from_edge_set(&common, d)?))
}

fn chain_holds(u_h: u32, v_h: u32, u_t: u32, v_t: u32, n: u32) -> bool {
    let p = |v| cyclic_pos(u_h, v, n);
    0 < p(v_h) && p(v_h) <= p(u_t) && p(u_t) < p(v_t)
}

/// The cell of `e` away from its path neighbor `next`.
fn far_cell(d: &HollowDissection, e: &Diagonal, next: &Diagonal) -> usize {
    let (x, y) = d.dual_tree().cells_of(e);
    if d.cells()[x].has_edge(next) {
        y
    } else {
        x
    }
}

/// The two ends of the intersection path, as (end cell, end edge).
fn intersection_ends(inter: &Serpent, d: &HollowDissection) -> [(usize, Diagonal); 2] {
    let edges = inter.edges();
    let k = edges.len();
    if k == 1 {
        let (c1, c2) = d.dual_tree().cells_of(&edges[0]);
        [(c1, edges[0]), (c2, edges[0])]
    } else {
        [
            (far_cell(d, &edges[0], &edges[1]), edges[0]),
            (far_cell(d, &edges[k - 1], &edges[k - 2]), edges[k - 1]),
        ]
    }
}

/// The edge with which `s` continues past the intersection end
/// `(cell, end_edge)`: the edge of that cell, other than the end edge
/// itself, belonging to `s`. `None` when `s` stops there.
fn extension(s: &Serpent, d: &HollowDissection, cell: usize, end_edge: &Diagonal) -> Option<Diagonal> {
    d.cells()[cell]
        .edges()
        .into_iter()
        .find(|f| f != end_edge && s.contains_edge(f))
}

/// The vertices of the two end edges, paired into the two banks of the
/// strip swept by the intersection path: clockwise from `u_h`, the
/// chain `u_h < v_h <= u_t < v_t` holds, and `{v_h, u_t}` span one
/// bank, `{u_h, v_t}` the other. For a single shared edge the banks
/// are its two endpoints.
fn banks(e_h: &Diagonal, e_t: &Diagonal, n: u32) -> Result<[Vec<u32>; 2]> {
    if e_h == e_t {
        return Ok([vec![e_h.a], vec![e_h.b]]);
    }
    for (f, g) in [(e_h, e_t), (e_t, e_h)] {
        for (u_h, v_h) in [(f.a, f.b), (f.b, f.a)] {
            for (u_t, v_t) in [(g.a, g.b), (g.b, g.a)] {
                if chain_holds(u_h, v_h, u_t, v_t, n) {
                    return Ok([vec![u_h, v_t], vec![v_h, u_t]]);
                }
            }
        }
    }
    Err(Error::Internal(format!(
        "no valid labeling for intersection final edges ({},{}) and ({},{})",
        e_h.a, e_h.b, e_t.a, e_t.b
    )))
}

/// True iff the serpents share an edge and cannot be drawn together:
/// both end in the same cell entering through the same diagonal, or
/// their strands along the shared path are forced onto conflicting
/// sides of it. A serpent continuing past an end of the shared path
/// pivots around one vertex of the end edge and is thereby pressed to
/// the bank holding that vertex (a stopping serpent yields to it); the
/// pair is incompatible when the two ends press the first serpent to
/// opposite banks.
pub fn incompatible(s1: &Serpent, s2: &Serpent, d: &HollowDissection) -> Result<bool> {
    let inter = match serpent_intersection(s1, s2, d)? {
        None => return Ok(false),
        Some(i) => i,
    };
    let [(c_h, e_h), (c_t, e_t)] = intersection_ends(&inter, d);
    let bank = banks(&e_h, &e_t, d.n)?;
    let side_of = |f: &Diagonal, e: &Diagonal| -> Result<usize> {
        let pivot = if f.has_endpoint(e.a) { e.a } else { e.b };
        bank.iter()
            .position(|b| b.contains(&pivot))
            .ok_or_else(|| {
                Error::Internal(format!("pivot {pivot} is on neither bank"))
            })
    };
    let mut s1_side = [None; 2];
    for (slot, (cell, e)) in [(c_h, e_h), (c_t, e_t)].into_iter().enumerate() {
        match (extension(s1, d, cell, &e), extension(s2, d, cell, &e)) {
            (None, None) => return Ok(true),
            (Some(f), _) => s1_side[slot] = Some(side_of(&f, &e)?),
            (None, Some(f)) => s1_side[slot] = Some(1 - side_of(&f, &e)?),
        }
    }
    Ok(s1_side[0] != s1_side[1])
}

/// A set of pairwise compatible serpents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct SerpentNest {
    pub serpents: BTreeSet<Serpent>,
}

impl SerpentNest {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_serpents(serpents: impl IntoIterator<Item = Serpent>) -> Self {
        Self { serpents: serpents.into_iter().collect() }
    }
}

/// True iff no two distinct members are incompatible.
pub fn is_serpent_nest(serpents: &BTreeSet<Serpent>, d: &HollowDissection) -> Result<bool> {
    let v: Vec<&Serpent> = serpents.iter().collect();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if incompatible(v[i], v[j], d)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// All serpent nests of the dissection, including the empty nest,
/// in deterministic order.
pub fn enumerate_serpent_nests(d: &HollowDissection) -> Result<Vec<SerpentNest>> {
    let serpents = enumerate_serpents(d);
    let k = serpents.len();
    let mut compat = vec![vec![false; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let ok = !incompatible(&serpents[i], &serpents[j], d)?;
            compat[i][j] = ok;
            compat[j][i] = ok;
        }
    }
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    nest_backtrack(&serpents, &compat, 0, &mut chosen, &mut out);
    out.sort();
    Ok(out)
}

fn nest_backtrack(
    serpents: &[Serpent],
    compat: &[Vec<bool>],
    from: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<SerpentNest>,
) {
    out.push(SerpentNest::from_serpents(
        chosen.iter().map(|&i| serpents[i].clone()),
    ));
    for i in from..serpents.len() {
        if chosen.iter().all(|&j| compat[i][j]) {
            chosen.push(i);
            nest_backtrack(serpents, compat, i + 1, chosen, out);
            chosen.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diss(n: u32, ds: &[(u32, u32)]) -> HollowDissection {
        HollowDissection::new(n, ds.iter().map(|&(a, b)| Diagonal::new(a, b))).unwrap()
    }

    fn serp(d: &HollowDissection, edges: &[(u32, u32)]) -> Serpent {
        Serpent::new(edges.iter().map(|&(a, b)| Diagonal::new(a, b)).collect(), d).unwrap()
    }

    #[test]
    fn serpent_predicate() {
        let d = diss(5, &[(1, 5), (5, 9)]);
        assert!(is_serpent(&[Diagonal::new(1, 5)], &d));
        assert!(is_serpent(&[Diagonal::new(1, 5), Diagonal::new(5, 9)], &d));
        assert!(!is_serpent(&[], &d));
        // not actually in the dissection
        assert!(!is_serpent(&[Diagonal::new(1, 7)], &d));
        // share no vertex
        let d2 = diss(6, &[(1, 5), (7, 11)]);
        assert!(!is_serpent(&[Diagonal::new(1, 5), Diagonal::new(7, 11)], &d2));
    }

    #[test]
    fn enumerate_serpents_examples() {
        assert!(enumerate_serpents(&diss(4, &[])).is_empty());
        let d = diss(4, &[(1, 5)]);
        assert_eq!(enumerate_serpents(&d), vec![serp(&d, &[(1, 5)])]);
        let d = diss(5, &[(1, 5), (5, 9)]);
        let got = enumerate_serpents(&d);
        assert_eq!(
            got,
            vec![
                serp(&d, &[(1, 5)]),
                serp(&d, &[(1, 5), (5, 9)]),
                serp(&d, &[(5, 9)]),
            ]
        );
    }

    #[test]
    fn intersection_examples() {
        let d = diss(5, &[(1, 5), (5, 9)]);
        let s1 = serp(&d, &[(1, 5)]);
        let s3 = serp(&d, &[(1, 5), (5, 9)]);
        assert_eq!(serpent_intersection(&s1, &s3, &d).unwrap(), Some(s1.clone()));
        assert_eq!(serpent_intersection(&s1, &s1, &d).unwrap(), Some(s1.clone()));
        let s2 = serp(&d, &[(5, 9)]);
        assert_eq!(serpent_intersection(&s1, &s2, &d).unwrap(), None);
    }

    #[test]
    fn turns_at_examples() {
        let d = diss(5, &[(1, 5), (5, 9)]);
        let s = serp(&d, &[(1, 5), (5, 9)]);
        assert!(s.turns_at(5));
        assert!(!s.turns_at(1));
        let single = serp(&d, &[(1, 5)]);
        for v in [1, 3, 5, 7, 9] {
            assert!(!single.turns_at(v));
        }
    }

    #[test]
    fn incompatibility_examples() {
        let d = diss(5, &[(1, 5), (5, 9)]);
        let s1 = serp(&d, &[(1, 5)]);
        let s2 = serp(&d, &[(5, 9)]);
        let s3 = serp(&d, &[(1, 5), (5, 9)]);
        // edge-disjoint: compatible
        assert!(!incompatible(&s1, &s2, &d).unwrap());
        // common final edge (1,5): Condition 1
        assert!(incompatible(&s1, &s3, &d).unwrap());
        assert!(incompatible(&s2, &s3, &d).unwrap());
        // self-incompatible
        assert!(incompatible(&s3, &s3, &d).unwrap());
        // symmetry
        assert_eq!(
            incompatible(&s1, &s3, &d).unwrap(),
            incompatible(&s3, &s1, &d).unwrap()
        );
    }

    #[test]
    fn nest_enumeration_examples() {
        assert_eq!(enumerate_serpent_nests(&diss(4, &[])).unwrap().len(), 1);
        assert_eq!(enumerate_serpent_nests(&diss(4, &[(1, 5)])).unwrap().len(), 2);
        let d = diss(5, &[(1, 5), (5, 9)]);
        let nests = enumerate_serpent_nests(&d).unwrap();
        assert_eq!(nests.len(), 5);
        let s1 = serp(&d, &[(1, 5)]);
        let s2 = serp(&d, &[(5, 9)]);
        assert!(nests.contains(&SerpentNest::empty()));
        assert!(nests.contains(&SerpentNest::from_serpents([s1.clone(), s2.clone()])));
    }

    #[test]
    fn nest_predicate() {
        let d = diss(5, &[(1, 5), (5, 9)]);
        let s1 = serp(&d, &[(1, 5)]);
        let s2 = serp(&d, &[(5, 9)]);
        let s3 = serp(&d, &[(1, 5), (5, 9)]);
        assert!(is_serpent_nest(&BTreeSet::new(), &d).unwrap());
        assert!(is_serpent_nest(&[s3.clone()].into_iter().collect(), &d).unwrap());
        assert!(is_serpent_nest(&[s1.clone(), s2.clone()].into_iter().collect(), &d).unwrap());
        assert!(!is_serpent_nest(&[s1, s3].into_iter().collect(), &d).unwrap());
    }
}
