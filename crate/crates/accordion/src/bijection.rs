//! The constructive bijections between maximal accordion dissections and
//! serpent nests, with the normalization, splitting and unfolding
//! machinery they rely on.

use std::collections::{BTreeMap, BTreeSet};

use crate::complex::{is_accordion_diagonal, AccordionDissection};
use crate::diag::{is_hollow, Diagonal};
use crate::dissection::{Contraction, HollowDissection};
use crate::serpent::{incompatible, is_serpent_nest, serpent_from_edge_set, Serpent, SerpentNest};
use crate::{Error, Result};

/// One step of the leaf normalization.
#[derive(Debug, Clone)]
pub enum NormStep {
    Contract {
        before: HollowDissection,
        contraction: Contraction,
    },
    Rotate {
        map: BTreeMap<u32, u32>,
    },
}

/// A dissection brought into leaf-normal form: the chosen leaf cell is the
/// triangle (1,3,5) with internal diagonal (1,5). Carries the step record
/// needed to transport facets and serpents both ways.
#[derive(Debug, Clone)]
pub struct Normalization {
    pub original: HollowDissection,
    pub result: HollowDissection,
    steps: Vec<NormStep>,
}

/// Normalizes the leaf cell with the smallest vertices: contracts
/// boundary pairs until it is triangular, then rotates its internal
/// diagonal onto (1,5).
pub fn normalize_leaf(d: &HollowDissection) -> Result<Normalization> {
    if d.diagonals.is_empty() {
        return Err(Error::Invalid("cannot normalize the empty dissection".into()));
    }
    let leaf_idx = (0..d.cells().len())
        .find(|&i| d.dual_tree().is_leaf(i))
        .ok_or_else(|| Error::Internal("dissection has no dual leaf".into()))?;
    let leaf = &d.cells()[leaf_idx];
    let mut dd = *leaf
        .edges()
        .iter()
        .find(|e| e.is_internal(d.n))
        .ok_or_else(|| Error::Internal("leaf cell has no internal diagonal".into()))?;
    let mut vertices = leaf.vertices.clone();
    let mut cur = d.clone();
    let mut steps = Vec::new();
    while vertices.len() > 3 {
        let b = *vertices
            .iter()
            .find(|v| !dd.has_endpoint(**v))
            .expect("nontriangular cell has a vertex off its diagonal");
        let pos = vertices.iter().position(|v| *v == b).unwrap();
        let prev = vertices[(pos + vertices.len() - 1) % vertices.len()];
        let next = vertices[(pos + 1) % vertices.len()];
        let cell = cur
            .cells()
            .iter()
            .find(|c| c.vertices == vertices)
            .expect("tracked cell present")
            .clone();
        let gamma = Diagonal::new(prev, b);
        let delta = Diagonal::new(b, next);
        let (contracted, c) = cur.contract_boundary_pair(&cell, &gamma, &delta)?;
        vertices = vertices
            .iter()
            .filter(|v| **v != b)
            .map(|v| c.map[v])
            .collect();
        vertices.sort();
        dd = Diagonal::new(c.map[&dd.a], c.map[&dd.b]);
        steps.push(NormStep::Contract { before: cur, contraction: c });
        cur = contracted;
    }
    let mid = *vertices
        .iter()
        .find(|v| !dd.has_endpoint(**v))
        .expect("triangle has a middle vertex");
    let k = 3i64 - mid as i64;
    if k.rem_euclid(2 * cur.n as i64) != 0 {
        let (rotated, map) = cur.rotate(k)?;
        steps.push(NormStep::Rotate { map });
        cur = rotated;
    }
    if !cur.diagonals.contains(&Diagonal::new(1, 5)) {
        return Err(Error::Internal("normalization did not produce diagonal (1,5)".into()));
    }
    Ok(Normalization { original: d.clone(), result: cur, steps })
}

impl Normalization {
    /// Image of a solid diagonal in the normalized dissection.
    pub fn solid_forward(&self, d: &Diagonal) -> Result<Diagonal> {
        let mut cur = *d;
        for step in &self.steps {
            cur = match step {
                NormStep::Contract { contraction, .. } => {
                    let a = contraction.forward(cur.a).expect("solid vertex survives");
                    let b = contraction.forward(cur.b).expect("solid vertex survives");
                    if a == b {
                        return Err(Error::Invalid(format!(
                            "({},{}) collapses under contraction",
                            d.a, d.b
                        )));
                    }
                    Diagonal::new(a, b)
                }
                NormStep::Rotate { map } => Diagonal::new(map[&cur.a], map[&cur.b]),
            };
        }
        Ok(cur)
    }

    /// Preimage of a solid diagonal of the normalized dissection. At each
    /// contraction the merged solid vertex has two candidate preimages;
    /// exactly one yields an accordion diagonal of the pre-contraction
    /// dissection, which pins the lift.
    pub fn solid_backward(&self, d: &Diagonal) -> Result<Diagonal> {
        let mut cur = *d;
        for step in self.steps.iter().rev() {
            cur = match step {
                NormStep::Rotate { map } => {
                    let inv: BTreeMap<u32, u32> = map.iter().map(|(k, v)| (*v, *k)).collect();
                    Diagonal::new(inv[&cur.a], inv[&cur.b])
                }
                NormStep::Contract { before, contraction } => {
                    let pre_a = contraction.backward(cur.a);
                    let pre_b = contraction.backward(cur.b);
                    let mut lifts = Vec::new();
                    for a in &pre_a {
                        for b in &pre_b {
                            lifts.push(Diagonal::new(*a, *b));
                        }
                    }
                    if lifts.len() == 1 {
                        lifts[0]
                    } else {
                        let valid: Vec<Diagonal> = lifts
                            .into_iter()
                            .filter(|l| {
                                l.is_internal(before.n) && is_accordion_diagonal(l, before)
                            })
                            .collect();
                        if valid.len() != 1 {
                            return Err(Error::Internal(format!(
                                "solid lift of ({},{}) is not unique: {valid:?}",
                                cur.a, cur.b
                            )));
                        }
                        valid[0]
                    }
                }
            };
        }
        Ok(cur)
    }

    pub fn facet_forward(&self, facet: &AccordionDissection) -> Result<AccordionDissection> {
        let mut out = BTreeSet::new();
        for d in &facet.diagonals {
            out.insert(self.solid_forward(d)?);
        }
        Ok(AccordionDissection::from_diagonals(out))
    }

    pub fn facet_backward(&self, facet: &AccordionDissection) -> Result<AccordionDissection> {
        let mut out = BTreeSet::new();
        for d in &facet.diagonals {
            out.insert(self.solid_backward(d)?);
        }
        Ok(AccordionDissection::from_diagonals(out))
    }

    pub fn serpent_forward(&self, s: &Serpent) -> Result<Serpent> {
        let mut edges: Vec<Diagonal> = s.edges().to_vec();
        for step in &self.steps {
            edges = edges
                .iter()
                .map(|e| match step {
                    NormStep::Contract { contraction, .. } => {
                        Diagonal::new(contraction.map[&e.a], contraction.map[&e.b])
                    }
                    NormStep::Rotate { map } => Diagonal::new(map[&e.a], map[&e.b]),
                })
                .collect();
        }
        Serpent::new(edges, &self.result)
    }

    pub fn serpent_backward(&self, s: &Serpent) -> Result<Serpent> {
        let mut edges: Vec<Diagonal> = s.edges().to_vec();
        for step in self.steps.iter().rev() {
            edges = match step {
                NormStep::Rotate { map } => {
                    let inv: BTreeMap<u32, u32> = map.iter().map(|(k, v)| (*v, *k)).collect();
                    edges.iter().map(|e| Diagonal::new(inv[&e.a], inv[&e.b])).collect()
                }
                NormStep::Contract { contraction, .. } => edges
                    .iter()
                    .map(|e| {
                        let a = contraction.backward(e.a);
                        let b = contraction.backward(e.b);
                        debug_assert!(a.len() == 1 && b.len() == 1);
                        Diagonal::new(a[0], b[0])
                    })
                    .collect(),
            };
        }
        Serpent::new(edges, &self.original)
    }

    pub fn nest_forward(&self, nest: &SerpentNest) -> Result<SerpentNest> {
        let mut out = BTreeSet::new();
        for s in &nest.serpents {
            out.insert(self.serpent_forward(s)?);
        }
        Ok(SerpentNest { serpents: out })
    }

    pub fn nest_backward(&self, nest: &SerpentNest) -> Result<SerpentNest> {
        let mut out = BTreeSet::new();
        for s in &nest.serpents {
            out.insert(self.serpent_backward(s)?);
        }
        Ok(SerpentNest { serpents: out })
    }
}

/// The distinguished solid vertex of a maximal accordion dissection on a
/// normalized reference: the smallest x in [6, 2n] with (2,x) in the
/// barred solid dissection; (4,x) is then forced in as well.
pub fn find_x(d: &HollowDissection, facet: &AccordionDissection) -> Result<u32> {
    let n = d.n;
    let x = facet
        .diagonals
        .iter()
        .filter(|s| s.has_endpoint(2))
        .map(|s| s.other_endpoint(2))
        .min()
        .unwrap_or(2 * n);
    if x < 6 {
        return Err(Error::Internal(format!("distinguished vertex {x} < 6")));
    }
    let four_x = Diagonal::new(4, x);
    if !(four_x.is_external(n) || facet.diagonals.contains(&four_x)) {
        return Err(Error::Invalid(format!(
            "(4,{x}) missing from the facet: input is not maximal"
        )));
    }
    Ok(x)
}

/// One side of a split: a quotient dissection in which a hollow interval
/// of the parent collapsed to the `merged` vertex, with label maps.
#[derive(Debug, Clone)]
pub struct SidePart {
    pub dissection: HollowDissection,
    pub merged: u32,
    interval: Vec<u32>,
    hollow_fwd: BTreeMap<u32, u32>,
    hollow_back: BTreeMap<u32, u32>,
    solid_fwd: BTreeMap<u32, u32>,
    solid_back: BTreeMap<u32, u32>,
}

impl SidePart {
    fn build(
        parent: &HollowDissection,
        n_side: u32,
        merged: u32,
        hollow_fwd: BTreeMap<u32, u32>,
        solid_fwd: BTreeMap<u32, u32>,
    ) -> Result<SidePart> {
        let interval: Vec<u32> = hollow_fwd
            .iter()
            .filter(|(_, w)| **w == merged)
            .map(|(v, _)| *v)
            .collect();
        let hollow_back: BTreeMap<u32, u32> = hollow_fwd
            .iter()
            .filter(|(_, w)| **w != merged)
            .map(|(v, w)| (*w, *v))
            .collect();
        let solid_back: BTreeMap<u32, u32> = solid_fwd.iter().map(|(v, w)| (*w, *v)).collect();
        let mut diagonals = BTreeSet::new();
        for d in &parent.diagonals {
            let a = hollow_fwd[&d.a];
            let b = hollow_fwd[&d.b];
            if a == b {
                continue;
            }
            let image = Diagonal::new(a, b);
            if image.is_internal(n_side) {
                diagonals.insert(image);
            }
        }
        let dissection = HollowDissection::new(n_side, diagonals)?;
        Ok(SidePart { dissection, merged, interval, hollow_fwd, hollow_back, solid_fwd, solid_back })
    }

    /// Image of a parent hollow diagonal, or `None` when it collapses or
    /// lands on the boundary.
    pub fn fold_edge(&self, e: &Diagonal) -> Option<Diagonal> {
        let a = self.hollow_fwd[&e.a];
        let b = self.hollow_fwd[&e.b];
        if a == b {
            return None;
        }
        let image = Diagonal::new(a, b);
        if !self.dissection.diagonals.contains(&image) {
            return None;
        }
        Some(image)
    }

    /// Preimage edges of a side diagonal: edges at the merged vertex
    /// expand to the whole fan over the contracted interval.
    pub fn unfold_edge(&self, e: &Diagonal, parent: &HollowDissection) -> Vec<Diagonal> {
        if e.has_endpoint(self.merged) {
            let a = self.hollow_back[&e.other_endpoint(self.merged)];
            self.interval
                .iter()
                .filter_map(|v| {
                    let cand = Diagonal::new(*v, a);
                    parent.diagonals.contains(&cand).then_some(cand)
                })
                .collect()
        } else {
            vec![Diagonal::new(self.hollow_back[&e.a], self.hollow_back[&e.b])]
        }
    }

    /// Extends a serpent of the side dissection to a serpent of the
    /// parent by fanning out its merged-vertex edges.
    pub fn unfold_serpent(&self, s: &Serpent, parent: &HollowDissection) -> Result<Serpent> {
        let mut edges = BTreeSet::new();
        for e in s.edges() {
            for u in self.unfold_edge(e, parent) {
                edges.insert(u);
            }
        }
        serpent_from_edge_set(&edges, parent)
    }

    /// Folds a parent serpent onto this side; succeeds only when every
    /// edge folds, the images form a serpent, and unfolding recovers the
    /// original exactly.
    pub fn fold_serpent(&self, s: &Serpent, parent: &HollowDissection) -> Option<Serpent> {
        let mut edges = BTreeSet::new();
        for e in s.edges() {
            edges.insert(self.fold_edge(e)?);
        }
        let folded = serpent_from_edge_set(&edges, &self.dissection).ok()?;
        let back = self.unfold_serpent(&folded, parent).ok()?;
        (back.edge_set() == s.edge_set()).then_some(folded)
    }

    /// Keeps the facet diagonals with both endpoints on this side and
    /// maps them down, dropping the ones that land on the boundary.
    pub fn restrict_facet(&self, facet: &AccordionDissection) -> AccordionDissection {
        let mut out = BTreeSet::new();
        for d in &facet.diagonals {
            if let (Some(a), Some(b)) = (self.solid_fwd.get(&d.a), self.solid_fwd.get(&d.b)) {
                let image = Diagonal::new(*a, *b);
                if image.is_internal(self.dissection.n) {
                    out.insert(image);
                }
            }
        }
        AccordionDissection::from_diagonals(out)
    }

    pub fn map_facet_back(&self, facet: &AccordionDissection) -> AccordionDissection {
        AccordionDissection::from_diagonals(
            facet
                .diagonals
                .iter()
                .map(|d| Diagonal::new(self.solid_back[&d.a], self.solid_back[&d.b])),
        )
    }
}

/// The split of a normalized dissection at the distinguished vertex x:
/// the two quotient dissections and the zigzag crossed by both (2,x)
/// and (4,x).
#[derive(Debug)]
pub struct SplitContext {
    pub x: u32,
    /// Quotient over the hollow interval [3, x-1], present unless x = 2n.
    pub upper: Option<SidePart>,
    /// Quotient over the hollow interval [x+1, 3], present unless x = 6.
    pub lower: Option<SidePart>,
    /// Zigzag δ^1..δ^ℓ of the accordion crossed by (2,x), with (1,5)
    /// treated as a boundary edge; δ^1 at the leaf-adjacent end. Empty
    /// when x is 6 or 2n.
    pub zigzag: Vec<Diagonal>,
}

pub fn split_dissection(d: &HollowDissection, x: u32) -> Result<SplitContext> {
    let n = d.n;
    let m = 2 * n;
    if x % 2 != 0 || !(6..=m).contains(&x) {
        return Err(Error::Invalid(format!("invalid split vertex {x}")));
    }
    if !d.diagonals.contains(&Diagonal::new(1, 5)) {
        return Err(Error::Invalid("dissection is not normalized".into()));
    }
    let zigzag = if x > 6 && x < m {
        let two_x = Diagonal::new(2, x);
        let crossed = d.crossed_hollow(&two_x);
        let mut path = d.accordion_path(&crossed).map_err(|_| {
            Error::Invalid(format!("(2,{x}) is not an accordion diagonal"))
        })?;
        if path.first() != Some(&Diagonal::new(1, 3)) {
            path.reverse();
        }
        if path.first() != Some(&Diagonal::new(1, 3)) || path.get(1) != Some(&Diagonal::new(1, 5)) {
            return Err(Error::Internal(format!(
                "crossed accordion of (2,{x}) does not start (1,3),(1,5): {path:?}"
            )));
        }
        path[2..path.len() - 1].to_vec()
    } else {
        Vec::new()
    };
    let upper = if x < m {
        let n_up = (m - x) / 2 + 2;
        let mut hollow_fwd = BTreeMap::new();
        let mut solid_fwd = BTreeMap::new();
        hollow_fwd.insert(1, 1);
        for v in (3..=x - 1).step_by(2) {
            hollow_fwd.insert(v, 3);
        }
        for (k, v) in ((x + 1)..=m - 1).step_by(2).enumerate() {
            hollow_fwd.insert(v, 5 + 2 * k as u32);
        }
        solid_fwd.insert(2, 2);
        for (k, v) in (x..=m).step_by(2).enumerate() {
            solid_fwd.insert(v, 4 + 2 * k as u32);
        }
        Some(SidePart::build(d, n_up, 3, hollow_fwd, solid_fwd)?)
    } else {
        None
    };
    let lower = if x > 6 {
        let n_low = (x - 2) / 2;
        let mut hollow_fwd = BTreeMap::new();
        let mut solid_fwd = BTreeMap::new();
        hollow_fwd.insert(1, 1);
        hollow_fwd.insert(3, 1);
        for v in ((x + 1)..=m - 1).step_by(2) {
            hollow_fwd.insert(v, 1);
        }
        for (k, v) in (5..=x - 1).step_by(2).enumerate() {
            hollow_fwd.insert(v, 3 + 2 * k as u32);
        }
        for (k, v) in (4..=x).step_by(2).enumerate() {
            solid_fwd.insert(v, 2 + 2 * k as u32);
        }
        Some(SidePart::build(d, n_low, 1, hollow_fwd, solid_fwd)?)
    } else {
        None
    };
    Ok(SplitContext { x, upper, lower, zigzag })
}

fn leaf_diagonal() -> Diagonal {
    Diagonal::new(1, 5)
}

/// The reflection fixing the leaf cell (1,3,5): v -> 6 - v (mod 2n).
/// Applied when the zigzag leaves the leaf diagonal through vertex 1
/// instead of vertex 5, reducing to the orientation the construction
/// assumes. An involution.
fn reflect_vertex(v: u32, n: u32) -> u32 {
    let m = 2 * n;
    let t = (6 + m - v) % m;
    if t == 0 {
        m
    } else {
        t
    }
}

fn reflect_diagonal(e: &Diagonal, n: u32) -> Diagonal {
    Diagonal::new(reflect_vertex(e.a, n), reflect_vertex(e.b, n))
}

fn reflect_dissection(d: &HollowDissection) -> Result<HollowDissection> {
    HollowDissection::new(
        d.n,
        d.diagonals.iter().map(|e| reflect_diagonal(e, d.n)).collect::<Vec<_>>(),
    )
}

fn reflect_facet(f: &AccordionDissection, n: u32) -> AccordionDissection {
    AccordionDissection::from_diagonals(f.diagonals.iter().map(|e| reflect_diagonal(e, n)))
}

fn reflect_serpent(s: &Serpent, target: &HollowDissection) -> Result<Serpent> {
    Serpent::new(
        s.edges().iter().map(|e| reflect_diagonal(e, target.n)).collect(),
        target,
    )
}

fn reflect_nest(nest: &SerpentNest, target: &HollowDissection) -> Result<SerpentNest> {
    let serpents = nest
        .serpents
        .iter()
        .map(|s| reflect_serpent(s, target))
        .collect::<Result<BTreeSet<Serpent>>>()?;
    Ok(SerpentNest { serpents })
}

/// Facets to serpent nests.
pub fn phi(d: &HollowDissection, facet: &AccordionDissection) -> Result<SerpentNest> {
    let mut trace = Vec::new();
    phi_inner(d, facet, 0, &mut trace)
}

/// Same as [`phi`], also returning the recursion trace.
pub fn phi_with_trace(
    d: &HollowDissection,
    facet: &AccordionDissection,
) -> Result<(SerpentNest, Vec<String>)> {
    let mut trace = Vec::new();
    let nest = phi_inner(d, facet, 0, &mut trace)?;
    Ok((nest, trace))
}

fn phi_inner(
    d: &HollowDissection,
    facet: &AccordionDissection,
    depth: usize,
    trace: &mut Vec<String>,
) -> Result<SerpentNest> {
    facet.validate(d)?;
    if d.diagonals.is_empty() {
        if !facet.diagonals.is_empty() {
            return Err(Error::Invalid(
                "empty dissection admits only the empty facet".into(),
            ));
        }
        return Ok(SerpentNest::empty());
    }
    let norm = normalize_leaf(d)?;
    let facet_n = norm.facet_forward(facet)?;
    let x = find_x(&norm.result, &facet_n)?;
    let probe = split_dissection(&norm.result, x)?;
    let reflected = probe.zigzag.first().is_some_and(|d1| !d1.has_endpoint(5));
    let (work_d, work_facet, ctx) = if reflected {
        let rd = reflect_dissection(&norm.result)?;
        let rf = reflect_facet(&facet_n, norm.result.n);
        let rx = reflect_vertex(x, norm.result.n);
        let ctx = split_dissection(&rd, rx)?;
        (rd, rf, ctx)
    } else {
        (norm.result.clone(), facet_n, probe)
    };
    trace.push(format!(
        "{:indent$}n={} normalized={:?} x={}{}",
        "",
        work_d.n,
        work_d.diagonals,
        ctx.x,
        if reflected { " (reflected)" } else { "" },
        indent = 2 * depth
    ));
    let mut unfolded: Vec<Serpent> = Vec::new();
    for side in [ctx.upper.as_ref(), ctx.lower.as_ref()].into_iter().flatten() {
        let sub_facet = side.restrict_facet(&work_facet);
        let sub_nest = phi_inner(&side.dissection, &sub_facet, depth + 1, trace)?;
        for s in &sub_nest.serpents {
            unfolded.push(side.unfold_serpent(s, &work_d)?);
        }
    }
    let mut serpents: BTreeSet<Serpent> = unfolded.iter().cloned().collect();
    if ctx.x == 6 {
        serpents.insert(Serpent::new(vec![leaf_diagonal()], &work_d)?);
    } else if ctx.x < 2 * work_d.n {
        let ell = ctx.zigzag.len();
        let mut adjoined = false;
        for i in (1..=ell).rev() {
            let mut edges = vec![leaf_diagonal()];
            edges.extend_from_slice(&ctx.zigzag[..i]);
            let cand = Serpent::new(edges, &work_d)?;
            let ok = unfolded
                .iter()
                .map(|t| incompatible(&cand, t, &work_d))
                .collect::<Result<Vec<bool>>>()?
                .into_iter()
                .all(|b| !b)
                // the zigzag prefix must be the one the reverse walk
                // recovers from this nest, or the maps cannot invert
                && walk_to_x(&work_d, &cand, &unfolded).ok() == Some(ctx.x);
            if ok {
                serpents.insert(cand);
                adjoined = true;
                break;
            }
        }
        if !adjoined {
            return Err(Error::Internal(
                "no zigzag serpent is compatible with the unfolded nests".into(),
            ));
        }
    }
    if !is_serpent_nest(&serpents, &work_d)? {
        return Err(Error::Internal("phi produced an invalid serpent nest".into()));
    }
    let nest_work = SerpentNest { serpents };
    let nest_n = if reflected {
        reflect_nest(&nest_work, &norm.result)?
    } else {
        nest_work
    };
    norm.nest_backward(&nest_n)
}

/// Serpent nests to facets.
pub fn psi(d: &HollowDissection, nest: &SerpentNest) -> Result<AccordionDissection> {
    let mut trace = Vec::new();
    psi_inner(d, nest, 0, &mut trace)
}

/// Same as [`psi`], also returning the recursion trace.
pub fn psi_with_trace(
    d: &HollowDissection,
    nest: &SerpentNest,
) -> Result<(AccordionDissection, Vec<String>)> {
    let mut trace = Vec::new();
    let facet = psi_inner(d, nest, 0, &mut trace)?;
    Ok((facet, trace))
}

fn psi_inner(
    d: &HollowDissection,
    nest: &SerpentNest,
    depth: usize,
    trace: &mut Vec<String>,
) -> Result<AccordionDissection> {
    if d.diagonals.is_empty() {
        if !nest.serpents.is_empty() {
            return Err(Error::Invalid(
                "empty dissection admits only the empty serpent nest".into(),
            ));
        }
        return Ok(AccordionDissection::empty());
    }
    let norm = normalize_leaf(d)?;
    let nest_n = norm.nest_forward(nest)?;
    let m = 2 * norm.result.n;
    let leaf = leaf_diagonal();
    let containing: Vec<&Serpent> = nest_n
        .serpents
        .iter()
        .filter(|s| s.contains_edge(&leaf))
        .collect();
    if containing.len() > 1 {
        return Err(Error::Invalid(
            "more than one serpent contains the leaf diagonal".into(),
        ));
    }
    let (x, rest, work_d, reflected): (u32, Vec<Serpent>, HollowDissection, bool) =
        match containing.first() {
            None => (
                m,
                nest_n.serpents.iter().cloned().collect(),
                norm.result.clone(),
                false,
            ),
            Some(s) if s.edges().len() == 1 => (
                6,
                nest_n.serpents.iter().filter(|t| t != s).cloned().collect(),
                norm.result.clone(),
                false,
            ),
            Some(s) => {
                let mut p = s.edges().to_vec();
                if p.last() == Some(&leaf) {
                    p.reverse();
                }
                if p.first() != Some(&leaf) {
                    return Err(Error::Invalid(
                        "the leaf diagonal is not a final edge of its serpent".into(),
                    ));
                }
                if p[1].has_endpoint(5) {
                    let rest: Vec<Serpent> =
                        nest_n.serpents.iter().filter(|t| t != s).cloned().collect();
                    let x = walk_to_x(&norm.result, s, &rest)?;
                    (x, rest, norm.result.clone(), false)
                } else {
                    let rd = reflect_dissection(&norm.result)?;
                    let s_r = reflect_serpent(s, &rd)?;
                    let rest: Vec<Serpent> = nest_n
                        .serpents
                        .iter()
                        .filter(|t| *t != *s)
                        .map(|t| reflect_serpent(t, &rd))
                        .collect::<Result<_>>()?;
                    let x = walk_to_x(&rd, &s_r, &rest)?;
                    (x, rest, rd, true)
                }
            }
        };
    trace.push(format!(
        "{:indent$}n={} normalized={:?} x={x}{}",
        "",
        work_d.n,
        work_d.diagonals,
        if reflected { " (reflected)" } else { "" },
        indent = 2 * depth
    ));
    let ctx = split_dissection(&work_d, x)?;
    let (up_nest, low_nest) = partition_rest(&ctx, &rest, &work_d)?;
    let mut diagonals = BTreeSet::new();
    if let Some(side) = &ctx.upper {
        let sub = psi_inner(&side.dissection, &up_nest, depth + 1, trace)?;
        diagonals.extend(side.map_facet_back(&sub).diagonals);
    }
    if let Some(side) = &ctx.lower {
        let sub = psi_inner(&side.dissection, &low_nest, depth + 1, trace)?;
        diagonals.extend(side.map_facet_back(&sub).diagonals);
    }
    if x < m {
        diagonals.insert(Diagonal::new(2, x));
    }
    if x > 6 {
        diagonals.insert(Diagonal::new(4, x));
    }
    let facet_work = AccordionDissection::from_diagonals(diagonals);
    facet_work.validate(&work_d)?;
    if !facet_work.is_maximal(&work_d) {
        return Err(Error::Internal("psi produced a non-maximal accordion dissection".into()));
    }
    let facet_n = if reflected {
        reflect_facet(&facet_work, norm.result.n)
    } else {
        facet_work
    };
    norm.facet_backward(&facet_n)
}

/// Splits the serpents of a nest (minus the leaf serpent) onto the two
/// sides of the distinguished vertex, requiring each to fold to exactly
/// one side.
fn partition_rest(
    ctx: &SplitContext,
    rest: &[Serpent],
    d: &HollowDissection,
) -> Result<(SerpentNest, SerpentNest)> {
    let mut up = BTreeSet::new();
    let mut low = BTreeSet::new();
    for s in rest {
        let fu = ctx.upper.as_ref().and_then(|side| side.fold_serpent(s, d));
        let fl = ctx.lower.as_ref().and_then(|side| side.fold_serpent(s, d));
        match (fu, fl) {
            (Some(f), None) => {
                up.insert(f);
            }
            (None, Some(f)) => {
                low.insert(f);
            }
            (None, None) => {
                return Err(Error::Invalid(format!(
                    "serpent {:?} folds to neither side of x={}",
                    s.edges(),
                    ctx.x
                )));
            }
            (Some(_), Some(_)) => {
                return Err(Error::Internal(format!(
                    "serpent {:?} folds to both sides of x={}",
                    s.edges(),
                    ctx.x
                )));
            }
        }
    }
    Ok((SerpentNest { serpents: up }, SerpentNest { serpents: low }))
}

/// The value of x encoded by an external hollow edge (x-1, x+1).
fn x_of_external(e: &Diagonal, n: u32) -> u32 {
    if *e == Diagonal::new(1, 2 * n - 1) {
        2 * n
    } else {
        e.a + 1
    }
}

/// The two cell edges incident to vertex `v`.
fn cell_edges_at(cell: &crate::dissection::Cell, v: u32) -> Vec<Diagonal> {
    cell.edges().into_iter().filter(|e| e.has_endpoint(v)).collect()
}

/// Attempts to terminate the walk at the vertex encoded by the external
/// edge `gamma`: the termination is valid when x is in range and every
/// remaining serpent folds cleanly to one side.
fn try_terminate(
    d: &HollowDissection,
    gamma: &Diagonal,
    rest: &[Serpent],
) -> Result<Option<u32>> {
    let x = x_of_external(gamma, d.n);
    if !(8..=2 * d.n - 2).contains(&x) {
        return Ok(None);
    }
    let ctx = match split_dissection(d, x) {
        Ok(ctx) => ctx,
        Err(_) => return Ok(None),
    };
    match partition_rest(&ctx, rest, d) {
        Ok(_) => Ok(Some(x)),
        Err(Error::Internal(msg)) => Err(Error::Internal(msg)),
        Err(_) => Ok(None),
    }
}

/// The walk of the reverse bijection: starting from the serpent S that
/// contains the leaf diagonal, repeatedly extends it straight ahead when
/// the extension stays compatible with the rest of the nest and turns
/// otherwise, until it exits through an external edge (x-1, x+1).
fn walk_to_x(d: &HollowDissection, s: &Serpent, rest: &[Serpent]) -> Result<u32> {
    let leaf = leaf_diagonal();
    let mut path: Vec<Diagonal> = s.edges().to_vec();
    if path.last() == Some(&leaf) {
        path.reverse();
    }
    if path.first() != Some(&leaf) {
        return Err(Error::Invalid(
            "the leaf diagonal is not a final edge of its serpent".into(),
        ));
    }
    let delta = *path.last().unwrap();
    let u1 = [delta.a, delta.b]
        .into_iter()
        .find(|v| !path[..path.len() - 1].iter().any(|e| e.has_endpoint(*v)))
        .ok_or_else(|| {
            Error::Internal("both endpoints of the final edge touch the serpent".into())
        })?;
    debug_assert!(is_hollow(u1));
    let (ca, cb) = d.dual_tree().cells_of(&delta);
    let before_last = path[path.len() - 2];
    let c1 = if d.cells()[ca].has_edge(&before_last) { cb } else { ca };
    let gamma1 = cell_edges_at(&d.cells()[c1], u1)
        .into_iter()
        .find(|e| *e != delta)
        .ok_or_else(|| Error::Internal("no cell edge at the pivot vertex".into()))?;
    if gamma1.is_external(d.n) {
        let x = x_of_external(&gamma1, d.n);
        if !(8..=2 * d.n - 2).contains(&x) {
            return Err(Error::Internal(format!("walk exited at x={x}, out of range")));
        }
        return Ok(x);
    }
    let mut u_prev = u1;
    let mut gamma_prev = gamma1;
    let mut cell_prev = c1;
    path.push(gamma1);
    loop {
        let cell = d.cell_across(&gamma_prev, cell_prev);
        let lambda = cell_edges_at(&d.cells()[cell], u_prev)
            .into_iter()
            .find(|e| *e != gamma_prev)
            .ok_or_else(|| Error::Internal("no straight-ahead edge in the walk cell".into()))?;
        let straight_ok = if lambda.is_internal(d.n) {
            let mut ext = path.clone();
            ext.push(lambda);
            let s_plus = Serpent::new(ext, d)?;
            rest.iter()
                .filter(|t| !t.contains_edge(&lambda))
                .map(|t| incompatible(&s_plus, t, d))
                .collect::<Result<Vec<bool>>>()?
                .into_iter()
                .all(|b| !b)
        } else {
            // the straight continuation exits the polygon; accept it as
            // the terminal edge only if the induced split is consistent
            if let Some(x) = try_terminate(d, &lambda, rest)? {
                return Ok(x);
            }
            false
        };
        if straight_ok {
            path.push(lambda);
            gamma_prev = lambda;
            cell_prev = cell;
        } else {
            let w = gamma_prev.other_endpoint(u_prev);
            let turned = cell_edges_at(&d.cells()[cell], w)
                .into_iter()
                .find(|e| *e != gamma_prev)
                .ok_or_else(|| Error::Internal("no turn edge in the walk cell".into()))?;
            if turned.is_external(d.n) {
                let x = x_of_external(&turned, d.n);
                if !(8..=2 * d.n - 2).contains(&x) {
                    return Err(Error::Internal(format!("walk exited at x={x}, out of range")));
                }
                return Ok(x);
            }
            path.push(turned);
            u_prev = w;
            gamma_prev = turned;
            cell_prev = cell;
        }
        if path.len() > d.diagonals.len() + 2 {
            return Err(Error::Internal("walk failed to terminate".into()));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::facets;
    use crate::serpent::enumerate_serpent_nests;

    fn diss(n: u32, ds: &[(u32, u32)]) -> HollowDissection {
        HollowDissection::new(n, ds.iter().map(|&(a, b)| Diagonal::new(a, b))).unwrap()
    }

    fn facet_of(ds: &[(u32, u32)]) -> AccordionDissection {
        AccordionDissection::from_diagonals(ds.iter().map(|&(a, b)| Diagonal::new(a, b)))
    }

    fn serp(d: &HollowDissection, edges: &[(u32, u32)]) -> Serpent {
        Serpent::new(edges.iter().map(|&(a, b)| Diagonal::new(a, b)).collect(), d).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let d = diss(4, &[(1, 5)]);
        let norm = normalize_leaf(&d).unwrap();
        assert_eq!(norm.result, d);
        let d = diss(4, &[(3, 7)]);
        let norm = normalize_leaf(&d).unwrap();
        assert_eq!(norm.result.diagonals, diss(4, &[(1, 5)]).diagonals);
        let d = diss(5, &[(1, 7)]);
        let norm = normalize_leaf(&d).unwrap();
        assert_eq!(norm.result.n, 4);
        assert!(norm.result.diagonals.contains(&Diagonal::new(1, 5)));
        assert!(normalize_leaf(&HollowDissection::empty(4)).is_err());
    }

    #[test]
    fn normalize_transport_roundtrip() {
        let d = diss(5, &[(1, 7)]);
        let norm = normalize_leaf(&d).unwrap();
        for f in facets(&d) {
            let fwd = norm.facet_forward(&f).unwrap();
            assert_eq!(norm.facet_backward(&fwd).unwrap(), f);
        }
        for s in crate::serpent::enumerate_serpents(&d) {
            let fwd = norm.serpent_forward(&s).unwrap();
            assert_eq!(norm.serpent_backward(&fwd).unwrap(), s);
        }
    }

    #[test]
    fn find_x_examples() {
        let d = diss(4, &[(1, 5)]);
        assert_eq!(find_x(&d, &facet_of(&[(2, 6)])).unwrap(), 6);
        assert_eq!(find_x(&d, &facet_of(&[(4, 8)])).unwrap(), 8);
    }

    #[test]
    fn split_examples() {
        let d = diss(4, &[(1, 5)]);
        let ctx = split_dissection(&d, 6).unwrap();
        assert!(ctx.lower.is_none());
        let up = ctx.upper.unwrap();
        assert_eq!(up.dissection, HollowDissection::empty(3));
        assert!(ctx.zigzag.is_empty());

        let ctx = split_dissection(&d, 8).unwrap();
        assert!(ctx.upper.is_none());
        assert_eq!(ctx.lower.unwrap().dissection, HollowDissection::empty(3));

        let d = diss(5, &[(1, 5), (5, 9)]);
        let ctx = split_dissection(&d, 8).unwrap();
        assert_eq!(ctx.zigzag, vec![Diagonal::new(5, 9)]);
    }

    #[test]
    fn phi_examples() {
        let d = HollowDissection::empty(4);
        assert_eq!(phi(&d, &AccordionDissection::empty()).unwrap(), SerpentNest::empty());
        let d = diss(4, &[(1, 5)]);
        let nest = phi(&d, &facet_of(&[(2, 6)])).unwrap();
        assert_eq!(nest, SerpentNest::from_serpents([serp(&d, &[(1, 5)])]));
        assert_eq!(phi(&d, &facet_of(&[(4, 8)])).unwrap(), SerpentNest::empty());
    }

    #[test]
    fn psi_examples() {
        let d = HollowDissection::empty(4);
        assert_eq!(psi(&d, &SerpentNest::empty()).unwrap(), AccordionDissection::empty());
        let d = diss(4, &[(1, 5)]);
        let nest = SerpentNest::from_serpents([serp(&d, &[(1, 5)])]);
        assert_eq!(psi(&d, &nest).unwrap(), facet_of(&[(2, 6)]));
        assert_eq!(psi(&d, &SerpentNest::empty()).unwrap(), facet_of(&[(4, 8)]));
    }

    #[test]
    fn pentagon_triangulation_roundtrip() {
        let d = diss(5, &[(1, 5), (5, 9)]);
        let fs = facets(&d);
        let ns = enumerate_serpent_nests(&d).unwrap();
        assert_eq!(fs.len(), 5);
        assert_eq!(ns.len(), 5);
        let mut images = BTreeSet::new();
        for f in &fs {
            let nest = phi(&d, f).unwrap();
            assert!(ns.contains(&nest));
            assert_eq!(&psi(&d, &nest).unwrap(), f);
            images.insert(nest);
        }
        assert_eq!(images.len(), fs.len());
        for nest in &ns {
            let f = psi(&d, nest).unwrap();
            assert_eq!(&phi(&d, &f).unwrap(), nest);
        }
    }
}
