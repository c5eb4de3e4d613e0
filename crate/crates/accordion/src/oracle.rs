//! Brute-force generators and cross-checks: exhaustive dissection
//! enumeration, count identities, round trips, and the structural
//! invariants of the accordion complex.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bijection::{phi, psi};
use crate::complex::facets;
use crate::diag::{internal_hollow_diagonals, Diagonal};
use crate::dissection::HollowDissection;
use crate::serpent::enumerate_serpent_nests;
use crate::Result;

/// All dissections of the hollow n-gon: every set of pairwise
/// noncrossing internal hollow diagonals, in deterministic order.
pub fn enumerate_dissections(n: u32) -> Vec<HollowDissection> {
    let candidates = internal_hollow_diagonals(n);
    let mut out = Vec::new();
    let mut chosen: Vec<Diagonal> = Vec::new();
    subsets(n, &candidates, 0, &mut chosen, &mut out);
    out
}

fn subsets(
    n: u32,
    candidates: &[Diagonal],
    from: usize,
    chosen: &mut Vec<Diagonal>,
    out: &mut Vec<HollowDissection>,
) {
    out.push(
        HollowDissection::new(n, chosen.iter().copied())
            .expect("noncrossing subsets are valid dissections"),
    );
    for i in from..candidates.len() {
        if chosen.iter().all(|c| !c.crosses(&candidates[i])) {
            chosen.push(candidates[i]);
            subsets(n, candidates, i + 1, chosen, out);
            chosen.pop();
        }
    }
}

/// A deterministic uniform sample (without replacement when possible)
/// from the dissections of the hollow n-gon.
pub fn sample_dissections(n: u32, count: usize, seed: u64) -> Vec<HollowDissection> {
    let all = enumerate_dissections(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..all.len()).collect();
    indices.shuffle(&mut rng);
    indices
        .into_iter()
        .take(count.min(all.len()))
        .map(|i| all[i].clone())
        .collect()
}

/// The k-th Catalan number, by the product formula.
pub fn catalan(k: u64) -> u64 {
    let mut c: u128 = 1;
    for i in 1..=k as u128 {
        c = c * (k as u128 + i) / i;
    }
    (c / (k as u128 + 1)) as u64
}

/// Number of dissections of a convex n-gon (the super-Catalan / little
/// Schröder numbers 1, 3, 11, 45, 197, ...), via the standard recurrence
/// n·u(n) = 3(2n−3)·u(n−1) − (n−3)·u(n−2). Independent of the generator.
pub fn schroeder_dissection_count(n: u64) -> u64 {
    // dissection count of the n-gon is u(n-1)
    let k = n - 1;
    let mut u = vec![0u128; (k + 1).max(3) as usize];
    u[1] = 1;
    u[2] = 1;
    for i in 3..=k as usize {
        let i = i as u128;
        u[i as usize] = (3 * (2 * i - 3) * u[i as usize - 1] - (i - 3) * u[i as usize - 2]) / i;
    }
    u[k as usize] as u64
}

/// The Stokes-complex predicate, independent of the accordion machinery:
/// a solid diagonal qualifies iff it never crosses two opposite edges of
/// a quadrangular cell.
pub fn stokes_diagonals(d: &HollowDissection) -> Vec<Diagonal> {
    crate::diag::internal_solid_diagonals(d.n)
        .into_iter()
        .filter(|delta| {
            d.cells().iter().all(|cell| {
                if cell.vertices.len() != 4 {
                    return true;
                }
                let e = cell.edges();
                // edges come in cyclic order, so opposite pairs are (0,2), (1,3)
                !(e[0].crosses(delta) && e[2].crosses(delta))
                    && !(e[1].crosses(delta) && e[3].crosses(delta))
            })
        })
        .collect()
}

/// The join decomposition of a dissection at a cell with several
/// boundary edges: one sub-dissection per arc between consecutive
/// boundary edges, each formed by the whole cell together with the
/// cells behind its arc, relabeled to standard hollow labels. Internal
/// cell edges bounding the other arcs become boundary edges of the
/// component.
pub fn join_components(d: &HollowDissection, cell_idx: usize) -> Vec<HollowDissection> {
    let cell = &d.cells()[cell_idx];
    let edges = cell.edges();
    let k = edges.len();
    let external_positions: Vec<usize> =
        (0..k).filter(|&i| edges[i].is_external(d.n)).collect();
    if external_positions.len() < 2 {
        return vec![d.clone()];
    }
    let mut components = Vec::new();
    for (idx, &start) in external_positions.iter().enumerate() {
        let end = external_positions[(idx + 1) % external_positions.len()];
        // internal edges strictly between the two boundary edges
        let mut arc = Vec::new();
        let mut i = (start + 1) % k;
        while i != end {
            arc.push(edges[i]);
            i = (i + 1) % k;
        }
        if arc.is_empty() {
            continue;
        }
        let mut vertices: BTreeSet<u32> = cell.vertices.iter().copied().collect();
        for e in &arc {
            vertices.extend(behind(d, cell, e));
        }
        let relabel: std::collections::BTreeMap<u32, u32> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (*v, 2 * i as u32 + 1))
            .collect();
        let n_sub = vertices.len() as u32;
        let sub = HollowDissection::new(
            n_sub,
            d.diagonals
                .iter()
                .filter(|e| vertices.contains(&e.a) && vertices.contains(&e.b))
                .map(|e| Diagonal::new(relabel[&e.a], relabel[&e.b]))
                .filter(|e| e.is_internal(n_sub)),
        )
        .expect("join component is a valid dissection");
        components.push(sub);
    }
    components
}

/// Hollow vertices strictly behind the cell edge `e`, away from `cell`.
fn behind(d: &HollowDissection, cell: &crate::dissection::Cell, e: &Diagonal) -> Vec<u32> {
    let inside: Vec<u32> = (e.a + 2..e.b).step_by(2).collect();
    let third = cell.vertices.iter().find(|v| !e.has_endpoint(**v)).unwrap();
    if inside.contains(third) {
        // cell lies inside (a,b): behind is the other side
        let mut out: Vec<u32> = (e.b + 2..=2 * d.n - 1).step_by(2).collect();
        out.extend((1..e.a).step_by(2));
        out
    } else {
        inside
    }
}

/// Per-instance verification record.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceRecord {
    pub n: u32,
    pub diagonals: Vec<(u32, u32)>,
    pub facet_count: usize,
    pub nest_count: usize,
    pub round_trip_ok: bool,
    pub facet_sizes: BTreeSet<usize>,
}

/// Aggregate result of [`verify`]. Failures are collected, not thrown;
/// detailed messages are capped at 20.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub n_max: u32,
    pub instances: usize,
    pub failures: usize,
    pub failure_details: Vec<String>,
    pub records: Vec<InstanceRecord>,
}

impl VerificationReport {
    pub fn ok(&self) -> bool {
        self.failures == 0
    }

    fn fail(&mut self, msg: String) {
        self.failures += 1;
        if self.failure_details.len() < 20 {
            self.failure_details.push(msg);
        }
    }

    pub fn summary(&self) -> String {
        format!(
            "{} dissections, {} failures",
            self.instances, self.failures
        )
    }
}

/// Exhaustive verification over all dissections with at most `n_max`
/// hollow vertices: count equality, round trips, Catalan specialization,
/// reduction invariance, and join multiplicativity.
pub fn verify(n_max: u32) -> VerificationReport {
    let mut report = VerificationReport {
        n_max,
        instances: 0,
        failures: 0,
        failure_details: Vec::new(),
        records: Vec::new(),
    };
    for n in 3..=n_max {
        let all = enumerate_dissections(n);
        let expected = schroeder_dissection_count(n as u64);
        if all.len() as u64 != expected {
            report.fail(format!(
                "n={n}: generator produced {} dissections, recurrence gives {expected}",
                all.len()
            ));
        }
        for d in &all {
            report.instances += 1;
            verify_instance(d, &mut report);
        }
    }
    report
}

fn verify_instance(d: &HollowDissection, report: &mut VerificationReport) {
    let label = format!("n={} D={:?}", d.n, d.diagonals);
    let fs = facets(d);
    let nests = match enumerate_serpent_nests(d) {
        Ok(v) => v,
        Err(e) => {
            report.fail(format!("{label}: nest enumeration failed: {e}"));
            return;
        }
    };
    if fs.len() != nests.len() {
        report.fail(format!(
            "{label}: {} facets but {} serpent nests",
            fs.len(),
            nests.len()
        ));
    }
    if d.is_triangulation() {
        let expected = catalan(d.n as u64 - 2) as usize;
        if fs.len() != expected {
            report.fail(format!(
                "{label}: triangulation has {} facets, Catalan gives {expected}",
                fs.len()
            ));
        }
    }
    let mut round_trip_ok = true;
    let nest_set: BTreeSet<_> = nests.iter().cloned().collect();
    for f in &fs {
        match phi(d, f) {
            Ok(nest) => {
                if !nest_set.contains(&nest) {
                    round_trip_ok = false;
                    report.fail(format!("{label}: phi({:?}) is not a nest", f.diagonals));
                } else if psi(d, &nest).ok().as_ref() != Some(f) {
                    round_trip_ok = false;
                    report.fail(format!("{label}: psi(phi({:?})) differs", f.diagonals));
                }
            }
            Err(e) => {
                round_trip_ok = false;
                report.fail(format!("{label}: phi({:?}) failed: {e}", f.diagonals));
            }
        }
    }
    for nest in &nests {
        match psi(d, nest) {
            Ok(f) => {
                if phi(d, &f).ok().as_ref() != Some(nest) {
                    round_trip_ok = false;
                    report.fail(format!("{label}: phi(psi(nest)) differs for {nest:?}"));
                }
            }
            Err(e) => {
                round_trip_ok = false;
                report.fail(format!("{label}: psi failed on a nest: {e}"));
            }
        }
    }
    check_reduction_invariance(d, fs.len(), report, &label);
    check_join_multiplicativity(d, fs.len(), report, &label);
    report.records.push(InstanceRecord {
        n: d.n,
        diagonals: d.diagonals.iter().map(|e| (e.a, e.b)).collect(),
        facet_count: fs.len(),
        nest_count: nests.len(),
        round_trip_ok,
        facet_sizes: fs.iter().map(|f| f.diagonals.len()).collect(),
    });
}

/// Every applicable boundary-pair contraction must preserve the facet
/// count.
fn check_reduction_invariance(
    d: &HollowDissection,
    facet_count: usize,
    report: &mut VerificationReport,
    label: &str,
) {
    if d.n <= 3 {
        return;
    }
    for cell in d.cells() {
        if cell.is_triangle() {
            continue;
        }
        for &b in &cell.vertices {
            if d.diagonals.iter().any(|e| e.has_endpoint(b)) {
                continue;
            }
            let pos = cell.vertices.iter().position(|v| *v == b).unwrap();
            let prev = cell.vertices[(pos + cell.vertices.len() - 1) % cell.vertices.len()];
            let next = cell.vertices[(pos + 1) % cell.vertices.len()];
            let gamma = Diagonal::new(prev, b);
            let delta = Diagonal::new(b, next);
            if gamma.is_internal(d.n) || delta.is_internal(d.n) {
                continue;
            }
            match d.contract_boundary_pair(cell, &gamma, &delta) {
                Ok((contracted, _)) => {
                    let after = facets(&contracted).len();
                    if after != facet_count {
                        report.fail(format!(
                            "{label}: contracting at {b} changes facet count {facet_count} -> {after}"
                        ));
                    }
                }
                Err(e) => report.fail(format!("{label}: contraction at {b} failed: {e}")),
            }
        }
    }
}

/// At every cell with at least two boundary edges, the facet count must
/// equal the product over the join components.
fn check_join_multiplicativity(
    d: &HollowDissection,
    facet_count: usize,
    report: &mut VerificationReport,
    label: &str,
) {
    for (i, cell) in d.cells().iter().enumerate() {
        let externals = cell
            .edges()
            .iter()
            .filter(|e| e.is_external(d.n))
            .count();
        if externals < 2 || cell.edges().len() - externals < 2 {
            continue;
        }
        let product: usize = join_components(d, i)
            .iter()
            .map(|sub| facets(sub).len())
            .product();
        if product != facet_count {
            report.fail(format!(
                "{label}: join product {product} != facet count {facet_count} at cell {:?}",
                cell.vertices
            ));
        }
    }
}

/// Round-trip check on a single dissection; `Ok(())` means every facet
/// and every nest round-trips.
pub fn check_round_trip(d: &HollowDissection) -> Result<()> {
    let fs = facets(d);
    let nests = enumerate_serpent_nests(d)?;
    if fs.len() != nests.len() {
        return Err(crate::Error::Internal(format!(
            "facet/nest count mismatch: {} vs {}",
            fs.len(),
            nests.len()
        )));
    }
    for f in &fs {
        let nest = phi(d, f)?;
        if &psi(d, &nest)? != f {
            return Err(crate::Error::Internal(format!(
                "psi(phi) differs on {:?}",
                f.diagonals
            )));
        }
    }
    for nest in &nests {
        let f = psi(d, nest)?;
        if &phi(d, &f)? != nest {
            return Err(crate::Error::Internal(format!(
                "phi(psi) differs on {nest:?}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::accordion_diagonals;

    #[test]
    fn generator_counts() {
        assert_eq!(enumerate_dissections(3).len(), 1);
        assert_eq!(enumerate_dissections(4).len(), 3);
        assert_eq!(enumerate_dissections(5).len(), 11);
        assert_eq!(enumerate_dissections(6).len(), 45);
        assert_eq!(enumerate_dissections(7).len(), 197);
    }

    #[test]
    fn recurrence_matches() {
        for (n, want) in [(3, 1), (4, 3), (5, 11), (6, 45), (7, 197)] {
            assert_eq!(schroeder_dissection_count(n), want);
        }
    }

    #[test]
    fn catalan_values() {
        assert_eq!(catalan(0), 1);
        assert_eq!(catalan(3), 5);
        assert_eq!(catalan(6), 132);
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_dissections(6, 10, 42);
        let b = sample_dissections(6, 10, 42);
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
    }

    #[test]
    fn stokes_matches_accordion_on_quadrangulation() {
        for d in enumerate_dissections(6) {
            if !d.is_quadrangulation() {
                continue;
            }
            assert_eq!(stokes_diagonals(&d), accordion_diagonals(&d), "D={:?}", d.diagonals);
        }
    }

    #[test]
    fn verify_small() {
        let report = verify(5);
        assert!(report.ok(), "failures: {:?}", report.failure_details);
        assert_eq!(report.instances, 15);
        assert_eq!(report.summary(), "15 dissections, 0 failures");
    }
}
