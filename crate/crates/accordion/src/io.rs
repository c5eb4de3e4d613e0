//! Canonical JSON for dissections, facets, serpents, and nests.
//!
//! Diagonals serialize as `[a, b]` pairs with `a < b`; facets and nests
//! are emitted in their natural sorted order and serpents as ordered
//! edge lists, so equal values always serialize to identical bytes.

use serde::{Deserialize, Serialize};

use crate::complex::AccordionDissection;
use crate::diag::Diagonal;
use crate::dissection::HollowDissection;
use crate::serpent::{Serpent, SerpentNest};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DissectionJson {
    pub n: u32,
    pub diagonals: Vec<[u32; 2]>,
}

/// Input envelope for the forward map: a dissection and one facet.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhiInput {
    pub dissection: DissectionJson,
    pub facet: Vec<[u32; 2]>,
}

/// Input envelope for the reverse map: a dissection and one nest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PsiInput {
    pub dissection: DissectionJson,
    pub nest: Vec<Vec<[u32; 2]>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhiOutput {
    pub nest: Vec<Vec<[u32; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiOutput {
    pub facet: Vec<[u32; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<String>>,
}

pub fn dissection_to_json(d: &HollowDissection) -> DissectionJson {
    DissectionJson {
        n: d.n,
        diagonals: d.diagonals.iter().map(|e| [e.a, e.b]).collect(),
    }
}

pub fn dissection_from_json(j: &DissectionJson) -> Result<HollowDissection> {
    let mut diagonals = Vec::new();
    for &[a, b] in &j.diagonals {
        let e = Diagonal::try_new(a.min(b), a.max(b))
            .map_err(|err| Error::Invalid(format!("diagonal [{a},{b}]: {err}")))?;
        diagonals.push(e);
    }
    HollowDissection::new(j.n, diagonals)
}

pub fn facet_to_json(f: &AccordionDissection) -> Vec<[u32; 2]> {
    f.diagonals.iter().map(|e| [e.a, e.b]).collect()
}

pub fn facet_from_json(pairs: &[[u32; 2]], d: &HollowDissection) -> Result<AccordionDissection> {
    let mut diagonals = std::collections::BTreeSet::new();
    for &[a, b] in pairs {
        let e = Diagonal::try_new(a.min(b), a.max(b))
            .map_err(|err| Error::Invalid(format!("diagonal [{a},{b}]: {err}")))?;
        diagonals.insert(e);
    }
    let facet = AccordionDissection { diagonals };
    facet.validate(d)?;
    Ok(facet)
}

pub fn serpent_to_json(s: &Serpent) -> Vec<[u32; 2]> {
    s.edges().iter().map(|e| [e.a, e.b]).collect()
}

pub fn serpent_from_json(pairs: &[[u32; 2]], d: &HollowDissection) -> Result<Serpent> {
    let mut edges = Vec::new();
    for &[a, b] in pairs {
        let e = Diagonal::try_new(a.min(b), a.max(b))
            .map_err(|err| Error::Invalid(format!("diagonal [{a},{b}]: {err}")))?;
        edges.push(e);
    }
    Serpent::new(edges, d)
}

pub fn nest_to_json(nest: &SerpentNest) -> Vec<Vec<[u32; 2]>> {
    nest.serpents.iter().map(serpent_to_json).collect()
}

pub fn nest_from_json(serpents: &[Vec<[u32; 2]>], d: &HollowDissection) -> Result<SerpentNest> {
    let mut out = std::collections::BTreeSet::new();
    for s in serpents {
        out.insert(serpent_from_json(s, d)?);
    }
    Ok(SerpentNest { serpents: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dissection_round_trip() {
        let d = HollowDissection::new(4, [Diagonal::new(1, 5)]).unwrap();
        let j = dissection_to_json(&d);
        let text = serde_json::to_string(&j).unwrap();
        assert_eq!(text, r#"{"n":4,"diagonals":[[1,5]]}"#);
        let back: DissectionJson = serde_json::from_str(&text).unwrap();
        assert_eq!(dissection_from_json(&back).unwrap(), d);
    }

    #[test]
    fn bad_diagonal_is_named() {
        let j = DissectionJson { n: 4, diagonals: vec![[1, 4]] };
        let err = dissection_from_json(&j).unwrap_err();
        assert!(err.to_string().contains("[1,4]"), "{err}");
    }

    #[test]
    fn nest_round_trip() {
        let d = HollowDissection::new(5, [Diagonal::new(1, 5), Diagonal::new(5, 9)]).unwrap();
        let nests = crate::serpent::enumerate_serpent_nests(&d).unwrap();
        for nest in &nests {
            let j = nest_to_json(nest);
            assert_eq!(&nest_from_json(&j, &d).unwrap(), nest);
        }
    }
}
