//! Vertex and diagonal arithmetic on the `2n` labeled circle points.
//!
//! Points are labeled `1..=2n` clockwise; odd labels are hollow vertices,
//! even labels are solid vertices. A diagonal joins two vertices of the
//! same parity and is stored normalized with `a < b`.

use serde::{Deserialize, Serialize};

use crate::Error;

/// True if the label is a hollow (odd) vertex.
pub fn is_hollow(v: u32) -> bool {
    v % 2 == 1
}

/// True if the label is a solid (even) vertex.
pub fn is_solid(v: u32) -> bool {
    v % 2 == 0
}

/// Position of `v` clockwise from `base`, in `0..2n`.
pub fn cyclic_pos(base: u32, v: u32, n: u32) -> u32 {
    let m = 2 * n;
    (v + m - base) % m
}

/// Cyclic order predicate: `u < v < w` in clockwise order.
pub fn cyclic_ordered(u: u32, v: u32, w: u32, n: u32) -> bool {
    let pv = cyclic_pos(u, v, n);
    let pw = cyclic_pos(u, w, n);
    pv != 0 && pw != 0 && pv < pw
}

/// An unordered pair of same-parity vertices, normalized so `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Diagonal {
    pub a: u32,
    pub b: u32,
}

impl Diagonal {
    /// Builds a diagonal, normalizing endpoint order. Panics on mixed
    /// parity or equal endpoints; use [`Diagonal::try_new`] for inputs
    /// that come from the outside world.
    pub fn new(a: u32, b: u32) -> Self {
        Self::try_new(a, b).expect("invalid diagonal")
    }

    pub fn try_new(a: u32, b: u32) -> Result<Self, Error> {
        if a == b {
            return Err(Error::Invalid(format!("degenerate diagonal ({a},{b})")));
        }
        if a % 2 != b % 2 {
            return Err(Error::Invalid(format!(
                "diagonal ({a},{b}) mixes hollow and solid vertices"
            )));
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        Ok(Self { a, b })
    }

    pub fn is_hollow(&self) -> bool {
        is_hollow(self.a)
    }

    pub fn is_solid(&self) -> bool {
        is_solid(self.a)
    }

    /// Boundary edge of its parity polygon: endpoints at cyclic distance 2.
    pub fn is_external(&self, n: u32) -> bool {
        let wrap = if self.is_hollow() { (1, 2 * n - 1) } else { (2, 2 * n) };
        self.b - self.a == 2 || (self.a, self.b) == wrap
    }

    pub fn is_internal(&self, n: u32) -> bool {
        !self.is_external(n)
    }

    pub fn has_endpoint(&self, v: u32) -> bool {
        self.a == v || self.b == v
    }

    pub fn other_endpoint(&self, v: u32) -> u32 {
        debug_assert!(self.has_endpoint(v));
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }

    pub fn shared_endpoint(&self, other: &Diagonal) -> Option<u32> {
        if other.has_endpoint(self.a) {
            Some(self.a)
        } else if other.has_endpoint(self.b) {
            Some(self.b)
        } else {
            None
        }
    }

    /// Strict interleaving of endpoints on the circle. Shared endpoints
    /// never cross.
    pub fn crosses(&self, other: &Diagonal) -> bool {
        let (a1, b1) = (self.a, self.b);
        let (a2, b2) = (other.a, other.b);
        (a1 < a2 && a2 < b1 && b1 < b2) || (a2 < a1 && a1 < b2 && b2 < b1)
    }

    /// True iff exactly one of `u`, `v` lies strictly between the
    /// endpoints, i.e. the diagonal separates them on the circle.
    pub fn separates(&self, u: u32, v: u32) -> Result<bool, Error> {
        if self.has_endpoint(u) || self.has_endpoint(v) {
            return Err(Error::Invalid(format!(
                "separates: ({u},{v}) touches an endpoint of ({},{})",
                self.a, self.b
            )));
        }
        let inside = |x: u32| self.a < x && x < self.b;
        Ok(inside(u) != inside(v))
    }
}

/// All internal hollow diagonals of the `n`-gon on odd labels, sorted.
pub fn internal_hollow_diagonals(n: u32) -> Vec<Diagonal> {
    let mut out = Vec::new();
    for a in (1..2 * n).step_by(2) {
        for b in ((a + 2)..2 * n).step_by(2) {
            let d = Diagonal::new(a, b);
            if d.is_internal(n) {
                out.push(d);
            }
        }
    }
    out
}

/// All internal solid diagonals of the `n`-gon on even labels, sorted.
pub fn internal_solid_diagonals(n: u32) -> Vec<Diagonal> {
    let mut out = Vec::new();
    for a in (2..=2 * n).step_by(2) {
        for b in ((a + 2)..=2 * n).step_by(2) {
            let d = Diagonal::new(a, b);
            if d.is_internal(n) {
                out.push(d);
            }
        }
    }
    out
}

/// The `n` hollow boundary edges `(1,3), (3,5), ..., (2n-1,1)`.
pub fn hollow_boundary_edges(n: u32) -> Vec<Diagonal> {
    let mut out: Vec<Diagonal> = (0..n)
        .map(|i| {
            let a = 2 * i + 1;
            let b = if a + 2 > 2 * n { 1 } else { a + 2 };
            Diagonal::new(a, b)
        })
        .collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn crossing_examples() {
        assert!(Diagonal::new(1, 5).crosses(&Diagonal::new(3, 7)));
        assert!(!Diagonal::new(1, 5).crosses(&Diagonal::new(5, 9)));
        assert!(Diagonal::new(2, 6).crosses(&Diagonal::new(4, 8)));
    }

    #[test]
    fn separates_examples() {
        let d = Diagonal::new(1, 5);
        assert!(d.separates(3, 7).unwrap());
        assert!(!d.separates(7, 9).unwrap());
        // hollow diagonal separating even labels: both inside
        assert!(!d.separates(2, 4).unwrap());
        assert!(d.separates(2, 6).unwrap());
        assert!(d.separates(5, 7).is_err());
    }

    #[test]
    fn external_classification() {
        let n = 4;
        assert!(Diagonal::new(1, 3).is_external(n));
        assert!(Diagonal::new(1, 7).is_external(n));
        assert!(Diagonal::new(2, 8).is_external(n));
        assert!(Diagonal::new(1, 5).is_internal(n));
        assert!(Diagonal::new(2, 6).is_internal(n));
    }

    #[test]
    fn mixed_parity_rejected() {
        assert!(Diagonal::try_new(1, 4).is_err());
        assert!(Diagonal::try_new(3, 3).is_err());
    }

    fn arb_hollow_diag(n: u32) -> impl Strategy<Value = Diagonal> {
        let verts: Vec<u32> = (0..n).map(|i| 2 * i + 1).collect();
        let v2 = verts.clone();
        (0..verts.len(), 0..v2.len())
            .prop_filter("distinct", |(i, j)| i != j)
            .prop_map(move |(i, j)| Diagonal::new(verts[i], v2[j]))
    }

    proptest! {
        #[test]
        fn crosses_symmetric_irreflexive(d1 in arb_hollow_diag(8), d2 in arb_hollow_diag(8)) {
            prop_assert_eq!(d1.crosses(&d2), d2.crosses(&d1));
            prop_assert!(!d1.crosses(&d1));
            if d1.crosses(&d2) {
                prop_assert!(d1.shared_endpoint(&d2).is_none());
            }
        }

        #[test]
        fn crossing_matches_separation(d1 in arb_hollow_diag(8), d2 in arb_hollow_diag(8)) {
            if d1.shared_endpoint(&d2).is_none() {
                prop_assert_eq!(d1.crosses(&d2), d1.separates(d2.a, d2.b).unwrap());
            }
        }
    }
}
