//! Hollow dissections: cells, dual trees, accordions and zigzags, plus the
//! relabeling and contraction utilities the bijection machinery needs.

use std::collections::{BTreeMap, BTreeSet};

use crate::diag::{hollow_boundary_edges, is_hollow, Diagonal};
use crate::Error;

/// A bounded face of the hollow polygon cut by the dissection.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cell {
    /// Hollow vertices in clockwise order, starting at the smallest label.
    pub vertices: Vec<u32>,
}

impl Cell {
    /// The cell's edges: diagonals between cyclically consecutive vertices.
    pub fn edges(&self) -> Vec<Diagonal> {
        let k = self.vertices.len();
        (0..k)
            .map(|i| Diagonal::new(self.vertices[i], self.vertices[(i + 1) % k]))
            .collect()
    }

    pub fn contains_vertex(&self, v: u32) -> bool {
        self.vertices.contains(&v)
    }

    pub fn has_edge(&self, d: &Diagonal) -> bool {
        self.edges().contains(d)
    }

    pub fn is_triangle(&self) -> bool {
        self.vertices.len() == 3
    }
}

/// Dual tree of a dissection: nodes are cell indices, edges are the
/// internal diagonals, each joining its two incident cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualTree {
    pub edges: BTreeMap<Diagonal, (usize, usize)>,
    pub n_cells: usize,
}

impl DualTree {
    /// The two cells incident to an internal diagonal.
    pub fn cells_of(&self, d: &Diagonal) -> (usize, usize) {
        self.edges[d]
    }

    pub fn is_leaf(&self, cell: usize) -> bool {
        self.degree(cell) <= 1
    }

    pub fn degree(&self, cell: usize) -> usize {
        self.edges
            .values()
            .filter(|(i, j)| *i == cell || *j == cell)
            .count()
    }
}

/// A reference hollow dissection: pairwise noncrossing internal hollow
/// diagonals of the `n`-gon on odd labels, with derived cells and dual tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HollowDissection {
    pub n: u32,
    pub diagonals: BTreeSet<Diagonal>,
    cells: Vec<Cell>,
    dual: DualTree,
}

impl HollowDissection {
    pub fn new(n: u32, diagonals: impl IntoIterator<Item = Diagonal>) -> Result<Self, Error> {
        if n < 3 {
            return Err(Error::Invalid(format!("polygon needs n >= 3, got {n}")));
        }
        let diagonals: BTreeSet<Diagonal> = diagonals.into_iter().collect();
        for d in &diagonals {
            if !d.is_hollow() {
                return Err(Error::Invalid(format!(
                    "diagonal ({},{}) is not hollow",
                    d.a, d.b
                )));
            }
            if d.b > 2 * n {
                return Err(Error::Invalid(format!(
                    "diagonal ({},{}) out of range for n={n}",
                    d.a, d.b
                )));
            }
            if d.is_external(n) {
                return Err(Error::Invalid(format!(
                    "diagonal ({},{}) is a boundary edge",
                    d.a, d.b
                )));
            }
        }
        for d1 in &diagonals {
            for d2 in &diagonals {
                if d1 < d2 && d1.crosses(d2) {
                    return Err(Error::Invalid(format!(
                        "diagonals ({},{}) and ({},{}) cross",
                        d1.a, d1.b, d2.a, d2.b
                    )));
                }
            }
        }
        let cells = compute_cells(n, &diagonals);
        let dual = dual_tree_of(&cells, &diagonals)?;
        Ok(Self { n, diagonals, cells, dual })
    }

    pub fn empty(n: u32) -> Self {
        Self::new(n, []).expect("empty dissection is valid")
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn dual_tree(&self) -> &DualTree {
        &self.dual
    }

    /// The barred form: diagonals plus the hollow boundary edges.
    pub fn barred(&self) -> BTreeSet<Diagonal> {
        let mut out = self.diagonals.clone();
        out.extend(hollow_boundary_edges(self.n));
        out
    }

    pub fn is_triangulation(&self) -> bool {
        self.cells.iter().all(Cell::is_triangle)
    }

    pub fn is_quadrangulation(&self) -> bool {
        self.cells.iter().all(|c| c.vertices.len() == 4)
    }

    /// Index of the cell having `d` as an edge, on the side away from
    /// `other_cell`.
    pub fn cell_across(&self, d: &Diagonal, other_cell: usize) -> usize {
        let (i, j) = self.dual.cells_of(d);
        if i == other_cell {
            j
        } else {
            i
        }
    }

    /// All elements of the barred dissection crossed by the solid diagonal.
    pub fn crossed_hollow(&self, delta: &Diagonal) -> BTreeSet<Diagonal> {
        debug_assert!(delta.is_solid());
        self.barred()
            .into_iter()
            .filter(|e| e.crosses(delta))
            .collect()
    }

    /// The accordion condition: each cell meets `a` in 0 or 2 edges, and
    /// when 2 they share a vertex.
    pub fn is_accordion(&self, a: &BTreeSet<Diagonal>) -> Result<bool, Error> {
        let barred = self.barred();
        if let Some(bad) = a.iter().find(|d| !barred.contains(d)) {
            return Err(Error::Invalid(format!(
                "({},{}) is not in the barred dissection",
                bad.a, bad.b
            )));
        }
        for cell in &self.cells {
            let in_cell: Vec<Diagonal> = cell.edges().into_iter().filter(|e| a.contains(e)).collect();
            match in_cell.len() {
                0 => {}
                2 => {
                    if in_cell[0].shared_endpoint(&in_cell[1]).is_none() {
                        return Ok(false);
                    }
                }
                _ => return Ok(false),
            }
        }
        Ok(true)
    }

    /// Orders a valid accordion along its incidence path.
    ///
    /// Two elements are adjacent iff they are the incident pair of some
    /// cell. Returns the elements in path order, oriented so the first
    /// element is lexicographically at most the last.
    pub fn accordion_path(&self, a: &BTreeSet<Diagonal>) -> Result<Vec<Diagonal>, Error> {
        if !self.is_accordion(a)? {
            return Err(Error::Invalid("not an accordion".into()));
        }
        if a.is_empty() {
            return Ok(vec![]);
        }
        let mut adj: BTreeMap<Diagonal, Vec<Diagonal>> =
            a.iter().map(|d| (*d, Vec::new())).collect();
        for cell in &self.cells {
            let in_cell: Vec<Diagonal> = cell.edges().into_iter().filter(|e| a.contains(e)).collect();
            if in_cell.len() == 2 {
                adj.get_mut(&in_cell[0]).unwrap().push(in_cell[1]);
                adj.get_mut(&in_cell[1]).unwrap().push(in_cell[0]);
            }
        }
        let mut ends: Vec<Diagonal> = adj
            .iter()
            .filter(|(_, nb)| nb.len() <= 1)
            .map(|(d, _)| *d)
            .collect();
        if a.len() == 1 {
            return Ok(vec![*a.iter().next().unwrap()]);
        }
        if ends.len() != 2 {
            return Err(Error::Invalid(
                "accordion incidence structure is not a path".into(),
            ));
        }
        ends.sort();
        let mut path = vec![ends[0]];
        let mut prev: Option<Diagonal> = None;
        loop {
            let cur = *path.last().unwrap();
            let next = adj[&cur].iter().find(|d| Some(**d) != prev).copied();
            match next {
                Some(d) => {
                    prev = Some(cur);
                    path.push(d);
                }
                None => break,
            }
        }
        if path.len() != a.len() {
            return Err(Error::Invalid(
                "accordion incidence structure is not connected".into(),
            ));
        }
        Ok(path)
    }

    /// The zigzag of an accordion: the elements whose removal disconnects
    /// its incidence structure, i.e. the interior of the accordion path.
    pub fn zigzag_of(&self, a: &BTreeSet<Diagonal>) -> Result<Vec<Diagonal>, Error> {
        let path = self.accordion_path(a)?;
        if path.len() <= 2 {
            return Ok(vec![]);
        }
        Ok(path[1..path.len() - 1].to_vec())
    }

    /// Shifts all labels by an even `k` modulo `2n`. Returns the rotated
    /// dissection and the label map.
    pub fn rotate(&self, k: i64) -> Result<(HollowDissection, BTreeMap<u32, u32>), Error> {
        if k.rem_euclid(2) != 0 {
            return Err(Error::Invalid(format!("rotation by odd k={k}")));
        }
        let m = 2 * self.n as i64;
        let map: BTreeMap<u32, u32> = (1..=2 * self.n)
            .map(|v| (v, ((v as i64 - 1 + k).rem_euclid(m) + 1) as u32))
            .collect();
        let diagonals: Vec<Diagonal> = self
            .diagonals
            .iter()
            .map(|d| Diagonal::new(map[&d.a], map[&d.b]))
            .collect();
        Ok((HollowDissection::new(self.n, diagonals)?, map))
    }

    /// Contracts two consecutive external edges `(a,b)`, `(b,c)` of a
    /// nontriangular cell into a single boundary edge, removing the hollow
    /// vertex `b` (which must carry no internal diagonal) and the solid
    /// vertex `b+1`. Labels above the removed pair shift down by 2.
    ///
    /// Returns the contracted dissection together with the label map on
    /// surviving vertices. The solid vertices `b-1` and `b+1` merge: both
    /// map to the new label of `b-1`.
    pub fn contract_boundary_pair(
        &self,
        cell: &Cell,
        gamma: &Diagonal,
        delta: &Diagonal,
    ) -> Result<(HollowDissection, Contraction), Error> {
        if cell.is_triangle() {
            return Err(Error::Invalid("cannot contract inside a triangular cell".into()));
        }
        if !cell.has_edge(gamma) || !cell.has_edge(delta) {
            return Err(Error::Invalid("contraction edges not in cell".into()));
        }
        if gamma.is_internal(self.n) || delta.is_internal(self.n) {
            return Err(Error::Invalid("contraction edges must be external".into()));
        }
        let b = gamma
            .shared_endpoint(delta)
            .ok_or_else(|| Error::Invalid("contraction edges not consecutive".into()))?;
        if self.diagonals.iter().any(|d| d.has_endpoint(b)) {
            return Err(Error::Invalid(format!(
                "vertex {b} carries an internal diagonal"
            )));
        }
        debug_assert!(is_hollow(b));
        let m = 2 * self.n;
        let removed_solid = b + 1;
        let relabel = |v: u32| -> Option<u32> {
            if v == b || v == removed_solid {
                None
            } else if v > removed_solid {
                Some(v - 2)
            } else {
                Some(v)
            }
        };
        let mut map = BTreeMap::new();
        for v in 1..=m {
            if let Some(w) = relabel(v) {
                map.insert(v, w);
            }
        }
        let diagonals: Vec<Diagonal> = self
            .diagonals
            .iter()
            .map(|d| Diagonal::new(map[&d.a], map[&d.b]))
            .collect();
        let contracted = HollowDissection::new(self.n - 1, diagonals)?;
        let merged_old = if b == 1 { m } else { b - 1 };
        let contraction = Contraction {
            removed_hollow: b,
            removed_solid,
            merged_solid_old: merged_old,
            merged_solid_new: map[&merged_old],
            map,
        };
        Ok((contracted, contraction))
    }
}

/// Record of one boundary-pair contraction, with the label maps needed to
/// transport diagonals in both directions.
#[derive(Debug, Clone)]
pub struct Contraction {
    pub removed_hollow: u32,
    pub removed_solid: u32,
    /// The surviving solid neighbor of the removed hollow vertex; the two
    /// solid neighbors merge into its image.
    pub merged_solid_old: u32,
    pub merged_solid_new: u32,
    /// Old label -> new label for surviving vertices. The removed solid
    /// vertex is absent; callers map it through `merged_solid_new`.
    pub map: BTreeMap<u32, u32>,
}

impl Contraction {
    /// Forward image of a vertex, sending both merging solid vertices to
    /// the merged label. The removed hollow vertex has no image.
    pub fn forward(&self, v: u32) -> Option<u32> {
        if v == self.removed_hollow {
            None
        } else if v == self.removed_solid {
            Some(self.merged_solid_new)
        } else {
            self.map.get(&v).copied()
        }
    }

    /// Preimages of a new-label vertex: two candidates for the merged
    /// solid vertex, one otherwise.
    pub fn backward(&self, v: u32) -> Vec<u32> {
        if v == self.merged_solid_new {
            let mut pre = vec![self.merged_solid_old, self.removed_solid];
            pre.sort();
            pre
        } else {
            self.map
                .iter()
                .filter(|(_, w)| **w == v)
                .map(|(u, _)| *u)
                .collect()
        }
    }
}

/// Cells of a dissection, by recursive region splitting.
///
/// Deterministic: sorted by smallest vertex, then lexicographically.
pub fn compute_cells(n: u32, diagonals: &BTreeSet<Diagonal>) -> Vec<Cell> {
    let region: Vec<u32> = (0..n).map(|i| 2 * i + 1).collect();
    let mut cells = Vec::new();
    let diags: Vec<Diagonal> = diagonals.iter().copied().collect();
    split_region(&region, &diags, &mut cells);
    cells.sort();
    cells
}

fn split_region(region: &[u32], diags: &[Diagonal], out: &mut Vec<Cell>) {
    if diags.is_empty() {
        out.push(Cell { vertices: region.to_vec() });
        return;
    }
    let d = diags[0];
    let ia = region.iter().position(|&v| v == d.a).expect("endpoint in region");
    let ib = region.iter().position(|&v| v == d.b).expect("endpoint in region");
    let (lo, hi) = if ia < ib { (ia, ib) } else { (ib, ia) };
    // side 1: region[lo..=hi]; side 2: region[hi..] ++ region[..=lo]
    let side1: Vec<u32> = region[lo..=hi].to_vec();
    let mut side2: Vec<u32> = region[hi..].to_vec();
    side2.extend_from_slice(&region[..=lo]);
    // canonical rotation: start each side list at its smallest vertex
    let rot = |mut v: Vec<u32>| -> Vec<u32> {
        let k = v.iter().enumerate().min_by_key(|(_, x)| **x).unwrap().0;
        v.rotate_left(k);
        v
    };
    let side1 = rot(side1);
    let side2 = rot(side2);
    let in_side1: BTreeSet<u32> = side1.iter().copied().collect();
    let (d1, d2): (Vec<Diagonal>, Vec<Diagonal>) = diags[1..]
        .iter()
        .partition(|e| in_side1.contains(&e.a) && in_side1.contains(&e.b));
    // a remaining diagonal sharing both endpoints with side2 only
    split_region(&side1, &d1, out);
    split_region(&side2, &d2, out);
}

fn dual_tree_of(cells: &[Cell], diagonals: &BTreeSet<Diagonal>) -> Result<DualTree, Error> {
    let mut edges = BTreeMap::new();
    for d in diagonals {
        let incident: Vec<usize> = cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.has_edge(d))
            .map(|(i, _)| i)
            .collect();
        if incident.len() != 2 {
            return Err(Error::Invalid(format!(
                "diagonal ({},{}) is incident to {} cells",
                d.a,
                d.b,
                incident.len()
            )));
        }
        edges.insert(*d, (incident[0], incident[1]));
    }
    Ok(DualTree { edges, n_cells: cells.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diss(n: u32, ds: &[(u32, u32)]) -> HollowDissection {
        HollowDissection::new(n, ds.iter().map(|&(a, b)| Diagonal::new(a, b))).unwrap()
    }

    #[test]
    fn cells_empty_square() {
        let d = diss(4, &[]);
        assert_eq!(d.cells(), &[Cell { vertices: vec![1, 3, 5, 7] }]);
    }

    #[test]
    fn cells_split_square() {
        let d = diss(4, &[(1, 5)]);
        assert_eq!(
            d.cells(),
            &[Cell { vertices: vec![1, 3, 5] }, Cell { vertices: vec![1, 5, 7] }]
        );
    }

    #[test]
    fn cells_pentagon_fan() {
        let d = diss(5, &[(1, 5), (5, 9)]);
        assert_eq!(
            d.cells(),
            &[
                Cell { vertices: vec![1, 3, 5] },
                Cell { vertices: vec![1, 5, 9] },
                Cell { vertices: vec![5, 7, 9] },
            ]
        );
    }

    #[test]
    fn cells_match_region_split_oracle() {
        // independent oracle: a cell is a maximal vertex set such that no
        // diagonal separates two of its members, and consecutive members
        // are joined by a diagonal or boundary edge
        for ds in [vec![(1, 5)], vec![(1, 5), (5, 9)], vec![(1, 7)]] {
            let n = 5;
            let d = diss(n, &ds);
            for cell in d.cells() {
                for &u in &cell.vertices {
                    for &v in &cell.vertices {
                        if u == v {
                            continue;
                        }
                        for diag in &d.diagonals {
                            if !diag.has_endpoint(u) && !diag.has_endpoint(v) {
                                assert!(!diag.separates(u, v).unwrap());
                            }
                        }
                    }
                }
            }
            // area count: sum over cells of (|V| - 2) = n - 2
            let total: usize = d.cells().iter().map(|c| c.vertices.len() - 2).sum();
            assert_eq!(total, n as usize - 2);
        }
    }

    #[test]
    fn dual_tree_shapes() {
        assert_eq!(diss(4, &[]).dual_tree().n_cells, 1);
        let d = diss(4, &[(1, 5)]);
        assert_eq!(d.dual_tree().n_cells, 2);
        assert_eq!(d.dual_tree().edges.len(), 1);
        let d = diss(5, &[(1, 5), (5, 9)]);
        let middle = d.cells().iter().position(|c| c.vertices == [1, 5, 9]).unwrap();
        let (a, b) = d.dual_tree().cells_of(&Diagonal::new(1, 5));
        assert!(a == middle || b == middle);
        let (a, b) = d.dual_tree().cells_of(&Diagonal::new(5, 9));
        assert!(a == middle || b == middle);
    }

    #[test]
    fn crossed_hollow_examples() {
        let d = diss(4, &[(1, 5)]);
        let got = d.crossed_hollow(&Diagonal::new(2, 6));
        let want: BTreeSet<Diagonal> =
            [(1, 3), (1, 5), (5, 7)].iter().map(|&(a, b)| Diagonal::new(a, b)).collect();
        assert_eq!(got, want);
        let got = d.crossed_hollow(&Diagonal::new(4, 8));
        let want: BTreeSet<Diagonal> =
            [(3, 5), (1, 5), (1, 7)].iter().map(|&(a, b)| Diagonal::new(a, b)).collect();
        assert_eq!(got, want);
        let d = diss(5, &[(1, 5), (5, 9)]);
        let got = d.crossed_hollow(&Diagonal::new(2, 8));
        let want: BTreeSet<Diagonal> = [(1, 3), (1, 5), (5, 9), (7, 9)]
            .iter()
            .map(|&(a, b)| Diagonal::new(a, b))
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn crossed_hollow_is_separation() {
        let d = diss(5, &[(1, 5), (5, 9)]);
        for delta in crate::diag::internal_solid_diagonals(5) {
            let crossed = d.crossed_hollow(&delta);
            for e in d.barred() {
                assert_eq!(
                    crossed.contains(&e),
                    e.separates(delta.a, delta.b).unwrap(),
                );
            }
        }
    }

    #[test]
    fn accordion_examples() {
        let d = diss(4, &[(1, 5)]);
        assert!(d.is_accordion(&BTreeSet::new()).unwrap());
        let a: BTreeSet<Diagonal> =
            [(1, 3), (1, 5), (5, 7)].iter().map(|&(x, y)| Diagonal::new(x, y)).collect();
        assert!(d.is_accordion(&a).unwrap());
        let d = diss(5, &[(1, 5), (5, 9)]);
        let a: BTreeSet<Diagonal> =
            [(1, 3), (5, 9)].iter().map(|&(x, y)| Diagonal::new(x, y)).collect();
        assert!(!d.is_accordion(&a).unwrap());
        let not_subset: BTreeSet<Diagonal> = [Diagonal::new(1, 7)].into_iter().collect();
        assert!(d.is_accordion(&not_subset).is_err());
    }

    #[test]
    fn zigzag_examples() {
        let d = diss(5, &[(1, 5), (5, 9)]);
        let a: BTreeSet<Diagonal> = [(1, 3), (1, 5), (5, 9), (7, 9)]
            .iter()
            .map(|&(x, y)| Diagonal::new(x, y))
            .collect();
        assert_eq!(
            d.zigzag_of(&a).unwrap(),
            vec![Diagonal::new(1, 5), Diagonal::new(5, 9)]
        );
        let d = diss(4, &[(1, 5)]);
        let a: BTreeSet<Diagonal> =
            [(1, 3), (1, 5), (5, 7)].iter().map(|&(x, y)| Diagonal::new(x, y)).collect();
        assert_eq!(d.zigzag_of(&a).unwrap(), vec![Diagonal::new(1, 5)]);
        // two-element accordions have empty zigzag
        let a: BTreeSet<Diagonal> =
            [(1, 3), (3, 5)].iter().map(|&(x, y)| Diagonal::new(x, y)).collect();
        assert!(d.zigzag_of(&a).unwrap().is_empty());
    }

    #[test]
    fn zigzag_removal_oracle() {
        // removing a zigzag element disconnects the incidence graph,
        // removing any other element does not
        let d = diss(5, &[(1, 5), (5, 9)]);
        let a: BTreeSet<Diagonal> = [(1, 3), (1, 5), (5, 9), (7, 9)]
            .iter()
            .map(|&(x, y)| Diagonal::new(x, y))
            .collect();
        let path = d.accordion_path(&a).unwrap();
        let zig = d.zigzag_of(&a).unwrap();
        for e in &a {
            let pos = path.iter().position(|x| x == e).unwrap();
            let interior = pos > 0 && pos + 1 < path.len();
            assert_eq!(interior, zig.contains(e));
        }
        // consecutive zigzag elements share an endpoint
        for w in zig.windows(2) {
            assert!(w[0].shared_endpoint(&w[1]).is_some());
        }
    }

    #[test]
    fn rotate_roundtrip() {
        let d = diss(4, &[(1, 5)]);
        let (r, _) = d.rotate(2).unwrap();
        assert_eq!(r.diagonals, [Diagonal::new(3, 7)].into_iter().collect());
        let (back, _) = r.rotate(-2).unwrap();
        assert_eq!(back, d);
        assert!(d.rotate(1).is_err());
        let (same, _) = d.rotate(0).unwrap();
        assert_eq!(same, d);
    }

    #[test]
    fn contraction_basic() {
        // n=5, D={(1,5)}, cell (1,5,7,9), contract (5,7),(7,9) at b=7
        let d = diss(5, &[(1, 5)]);
        let cell = d.cells().iter().find(|c| c.vertices == [1, 5, 7, 9]).unwrap().clone();
        let (c, m) = d
            .contract_boundary_pair(&cell, &Diagonal::new(5, 7), &Diagonal::new(7, 9))
            .unwrap();
        assert_eq!(c.n, 4);
        assert_eq!(c.diagonals, [Diagonal::new(1, 5)].into_iter().collect());
        assert_eq!(m.removed_hollow, 7);
        assert_eq!(m.removed_solid, 8);
        assert_eq!(m.forward(6), Some(6));
        assert_eq!(m.forward(8), Some(6));
        assert_eq!(m.backward(6), vec![6, 8]);
        // injective off the removed pair, surjective onto 1..=2(n-1)
        let imgs: BTreeSet<u32> = m.map.values().copied().collect();
        assert_eq!(imgs, (1..=8).collect());
    }

    #[test]
    fn contraction_errors() {
        let d = diss(4, &[(1, 5)]);
        let tri = d.cells()[0].clone();
        assert!(d
            .contract_boundary_pair(&tri, &Diagonal::new(1, 3), &Diagonal::new(3, 5))
            .is_err());
    }
}
