//! Dihedral polygons and chord combinatorics.
//!
//! A dihedral structure on a finite set is an identification of the set with
//! the edges of a polygon, up to rotation and reflection. Chords of the
//! polygon index the boundary divisors of the associated moduli space, and
//! all the calculus downstream (residues, trivialisations, renormalisation)
//! is driven by the combinatorics implemented here.
//!
//! Conventions, fixed once and used everywhere:
//! * a polygon with `n` edges stores them as `edges[0..n]` in cyclic order;
//! * vertex `i` sits between `edges[i-1]` and `edges[i]` (indices mod `n`),
//!   so vertex `0` lies between the last and the first edge;
//! * a chord is an unordered pair of non-adjacent vertices `{a, b}`, stored
//!   with `a < b`; the two boundary arcs of a chord `{a, b}` are
//!   `edges[a..b]` and its complement.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Edge labels. Outer edges of a standard polygon are `1..=n`; cutting along
/// a chord introduces fresh labels above that range.
pub type EdgeLabel = u32;

/// Errors from polygon-level operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolygonError {
    /// Chord endpoints equal or cyclically adjacent.
    InvalidChord { a: usize, b: usize, n: usize },
    /// A set of chords that was required to be pairwise non-crossing is not.
    CrossingChords(Chord, Chord),
    /// Fewer than three edges.
    TooSmall(usize),
    /// An edge subset for a forgetful map had fewer than three elements.
    TargetTooSmall(usize),
    /// A chord does not belong to the polygon or piece it was used with.
    ChordNotFound(Chord),
}

impl fmt::Display for PolygonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolygonError::InvalidChord { a, b, n } => {
                write!(f, "invalid chord ({a},{b}) in a {n}-gon")
            }
            PolygonError::CrossingChords(c, d) => write!(f, "chords {c} and {d} cross"),
            PolygonError::TooSmall(n) => write!(f, "polygon needs >= 3 edges, got {n}"),
            PolygonError::TargetTooSmall(n) => write!(f, "forgetful target needs >= 3 edges, got {n}"),
            PolygonError::ChordNotFound(c) => write!(f, "chord {c} not found"),
        }
    }
}

impl std::error::Error for PolygonError {}

/// A chord: an unordered pair of non-adjacent vertices, stored with `a < b`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Chord {
    pub a: usize,
    pub b: usize,
}

impl Chord {
    /// Canonicalised chord in an `n`-gon. Rejects adjacent or equal vertices.
    pub fn new(a: usize, b: usize, n: usize) -> Result<Self, PolygonError> {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        if a == b || b >= n || b - a == 1 || (a == 0 && b == n - 1) {
            return Err(PolygonError::InvalidChord { a, b, n });
        }
        Ok(Chord { a, b })
    }

    /// Unchecked constructor for internal use; still canonicalises order.
    pub(crate) fn raw(a: usize, b: usize) -> Self {
        if a <= b {
            Chord { a, b }
        } else {
            Chord { a: b, b: a }
        }
    }

    /// True iff the endpoint pairs strictly interleave in cyclic order.
    /// Chords sharing an endpoint do not cross.
    pub fn crosses(self, other: Chord) -> bool {
        let inside = |x: usize| self.a < x && x < self.b;
        inside(other.a) != inside(other.b)
            && other.a != self.a
            && other.a != self.b
            && other.b != self.a
            && other.b != self.b
    }

    /// True iff `v` is one of the two endpoints.
    pub fn has_endpoint(self, v: usize) -> bool {
        self.a == v || self.b == v
    }

    /// The two vertex runs cut off by the chord: `a..=b` and `b..=a+n` (mod n).
    /// Both runs include the endpoints.
    pub fn vertex_runs(self, n: usize) -> (Vec<usize>, Vec<usize>) {
        let first: Vec<usize> = (self.a..=self.b).collect();
        let second: Vec<usize> = (self.b..=self.a + n).map(|v| v % n).collect();
        (first, second)
    }
}

impl fmt::Display for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

/// A dihedral polygon: a cyclic sequence of distinct edge labels.
///
/// Equality of `Polygon` values is equality of the stored sequences; use
/// [`Polygon::dihedral_eq`] for equality up to rotation and reflection.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Polygon {
    edges: Vec<EdgeLabel>,
}

impl Polygon {
    pub fn new(edges: Vec<EdgeLabel>) -> Result<Self, PolygonError> {
        if edges.len() < 3 {
            return Err(PolygonError::TooSmall(edges.len()));
        }
        let set: BTreeSet<_> = edges.iter().collect();
        assert_eq!(set.len(), edges.len(), "edge labels must be distinct");
        Ok(Polygon { edges })
    }

    /// The standard `n`-gon with edges labelled `1..=n`.
    pub fn standard(n: usize) -> Self {
        assert!(n >= 3);
        Polygon {
            edges: (1..=n as EdgeLabel).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn edges(&self) -> &[EdgeLabel] {
        &self.edges
    }

    /// Edge immediately after vertex `v` in cyclic order.
    pub fn edge_after(&self, v: usize) -> EdgeLabel {
        self.edges[v % self.len()]
    }

    /// Edge immediately before vertex `v` in cyclic order.
    pub fn edge_before(&self, v: usize) -> EdgeLabel {
        let n = self.len();
        self.edges[(v + n - 1) % n]
    }

    /// All chords in lexicographic order on `(a, b)`; there are `n(n-3)/2`.
    pub fn all_chords(&self) -> Vec<Chord> {
        let n = self.len();
        let mut out = Vec::with_capacity(n * (n.saturating_sub(3)) / 2);
        for a in 0..n {
            for b in (a + 2)..n {
                if a == 0 && b == n - 1 {
                    continue;
                }
                out.push(Chord { a, b });
            }
        }
        out
    }

    /// All subsets of pairwise non-crossing chords up to `max_size`
    /// (`None` = unbounded), including the empty set, in a deterministic
    /// order: by the lexicographic order of the chord lists.
    pub fn non_crossing_subsets(&self, max_size: Option<usize>) -> Vec<Vec<Chord>> {
        let chords = self.all_chords();
        let cap = max_size.unwrap_or(usize::MAX);
        let mut out = Vec::new();
        fn rec(
            chords: &[Chord],
            start: usize,
            current: &mut Vec<Chord>,
            cap: usize,
            out: &mut Vec<Vec<Chord>>,
        ) {
            out.push(current.clone());
            if current.len() >= cap {
                return;
            }
            for i in start..chords.len() {
                let c = chords[i];
                if current.iter().all(|&d| !d.crosses(c)) {
                    current.push(c);
                    rec(chords, i + 1, current, cap, out);
                    current.pop();
                }
            }
        }
        let mut current = Vec::new();
        rec(&chords, 0, &mut current, cap, &mut out);
        out
    }

    /// Splits the polygon along `c` into the two pieces; each piece acquires
    /// the cut chord as a new edge. The first piece carries the arc
    /// `edges[a..b]`, the second the complementary arc.
    pub fn split(&self, c: Chord) -> Result<(Polygon, Polygon), PolygonError> {
        let (p, q) = self.split_pieces(c)?;
        Ok((p.poly, q.poly))
    }

    /// Like [`Polygon::split`] but keeps the vertex and gauge tracking.
    /// The first piece carries the arc `edges[a..b]`.
    pub fn split_pieces(&self, c: Chord) -> Result<(CutPiece, CutPiece), PolygonError> {
        let n = self.len();
        Chord::new(c.a, c.b, n)?;
        let whole = CutPiece {
            poly: self.clone(),
            verts: (0..n).collect(),
            gauge: self.edges.clone(),
        };
        Ok(whole.split_at(c, cut_label(n, c)))
    }

    /// Canonical representative under the dihedral group: the least edge
    /// sequence over all rotations and reflections.
    pub fn canonical(&self) -> Polygon {
        let n = self.len();
        let mut best = self.edges.clone();
        let mut reversed = self.edges.clone();
        reversed.reverse();
        for seq in [&self.edges, &reversed] {
            for r in 0..n {
                let cand: Vec<EdgeLabel> = (0..n).map(|i| seq[(i + r) % n]).collect();
                if cand < best {
                    best = cand;
                }
            }
        }
        Polygon { edges: best }
    }

    /// Equality as dihedral structures (up to rotation and reflection).
    pub fn dihedral_eq(&self, other: &Polygon) -> bool {
        self.len() == other.len() && self.canonical() == other.canonical()
    }

    /// The four edges meeting the endpoints of `c`, plus the two extended
    /// sides used by the trivialisation map: the side arcs each grow by the
    /// next edge in the cyclic order.
    ///
    /// Returns `(t_c, t1, t2)` as edge-label lists in cyclic order, where
    /// `t1` extends the arc `edges[a..b]` and `t2` the complementary arc.
    pub fn trivialisation_targets(
        &self,
        c: Chord,
    ) -> (Vec<EdgeLabel>, Vec<EdgeLabel>, Vec<EdgeLabel>) {
        let n = self.len();
        let (a, b) = (c.a, c.b);
        let mut t_c = vec![
            self.edge_before(a),
            self.edge_after(a),
            self.edge_before(b),
            self.edge_after(b),
        ];
        t_c.dedup();
        let t1: Vec<EdgeLabel> = (a..=b).map(|i| self.edges[i % n]).collect();
        let t2: Vec<EdgeLabel> = (b..=a + n).map(|i| self.edges[i % n]).collect();
        (t_c, t1, t2)
    }

    /// Decomposes the polygon by cutting along a pairwise non-crossing set.
    pub fn decompose(&self, cuts: &[Chord]) -> Result<Decomposition, PolygonError> {
        let n = self.len();
        for (i, &c) in cuts.iter().enumerate() {
            Chord::new(c.a, c.b, n)?;
            for &d in &cuts[..i] {
                if c.crosses(d) {
                    return Err(PolygonError::CrossingChords(c, d));
                }
                if c == d {
                    return Err(PolygonError::ChordNotFound(c));
                }
            }
        }
        let mut sorted = cuts.to_vec();
        sorted.sort();

        let mut pieces = vec![CutPiece {
            poly: self.clone(),
            verts: (0..n).collect(),
            gauge: self.edges.clone(),
        }];
        for &c in &sorted {
            let label = cut_label(n, c);
            let idx = pieces
                .iter()
                .position(|p| p.contains_chord_verts(c))
                .ok_or(PolygonError::ChordNotFound(c))?;
            let piece = pieces.swap_remove(idx);
            let (p1, p2) = piece.split_at(c, label);
            pieces.push(p1);
            pieces.push(p2);
        }
        pieces.sort_by(|p, q| {
            let mut a = p.verts.clone();
            let mut b = q.verts.clone();
            a.sort();
            b.sort();
            a.cmp(&b)
        });
        Ok(Decomposition {
            ambient: self.clone(),
            cuts: sorted,
            pieces,
        })
    }

    /// The partially-defined chord map induced by contracting all edges not
    /// in `target`. Returns, for every chord of `self`, the image chord of
    /// the contracted polygon (in the contracted polygon's own numbering)
    /// or `None` when the chord degenerates to an outer edge.
    ///
    /// The contracted polygon is returned alongside the map.
    pub fn forgetful_chord_map(
        &self,
        target: &BTreeSet<EdgeLabel>,
    ) -> Result<(Polygon, Vec<(Chord, Option<Chord>)>), PolygonError> {
        if target.len() < 3 {
            return Err(PolygonError::TargetTooSmall(target.len()));
        }
        for t in target {
            assert!(self.edges.contains(t), "target edge {t} not in polygon");
        }
        let sub: Vec<EdgeLabel> = self
            .edges
            .iter()
            .copied()
            .filter(|e| target.contains(e))
            .collect();
        let subpoly = Polygon::new(sub.clone())?;
        let mut map = Vec::new();
        for c in self.all_chords() {
            map.push((c, self.contract_chord(&sub, c)));
        }
        Ok((subpoly, map))
    }

    /// Image of one chord under the contraction onto the edge subsequence
    /// `sub` (given in induced cyclic order).
    fn contract_chord(&self, sub: &[EdgeLabel], c: Chord) -> Option<Chord> {
        let n = self.len();
        let arc: BTreeSet<EdgeLabel> = (c.a..c.b).map(|i| self.edges[i % n]).collect();
        // Positions (in the contracted polygon) whose edge lies on the first arc.
        let m = sub.len();
        let flags: Vec<bool> = sub.iter().map(|e| arc.contains(e)).collect();
        let count = flags.iter().filter(|&&f| f).count();
        if count < 2 || m - count < 2 {
            return None;
        }
        // The arc is cyclically contiguous in `sub`; find its start.
        let start = (0..m).find(|&i| flags[i] && !flags[(i + m - 1) % m])?;
        // Chord from vertex `start` to vertex `start + count` cuts off
        // exactly the edges sub[start..start+count].
        let a = start;
        let b = (start + count) % m;
        Chord::new(a, b, m).ok()
    }
}

/// Deterministic fresh edge label for cutting an `n`-gon along `c`.
pub(crate) fn cut_label(n: usize, c: Chord) -> EdgeLabel {
    (n + 1 + c.a * n + c.b) as EdgeLabel
}

/// One piece of a cut decomposition.
///
/// `verts[i]` is the ambient vertex sitting at the piece's vertex `i`, and
/// `gauge[i]` is the ambient edge label backing the piece's edge `i`: outer
/// edges back themselves, a cut edge is backed by the next ambient edge in
/// cyclic order after its arc. The gauge realises the bijections used by the
/// trivialisation maps, so the piece's marked points are the ambient marked
/// points `gauge[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutPiece {
    pub poly: Polygon,
    pub verts: Vec<usize>,
    pub gauge: Vec<EdgeLabel>,
}

impl CutPiece {
    /// True iff both endpoints of the ambient chord are vertices of this
    /// piece and are non-adjacent here (so the chord is a chord of the piece).
    pub fn contains_chord_verts(&self, c: Chord) -> bool {
        let pa = self.verts.iter().position(|&v| v == c.a);
        let pb = self.verts.iter().position(|&v| v == c.b);
        match (pa, pb) {
            (Some(i), Some(j)) => Chord::new(i, j, self.verts.len()).is_ok(),
            _ => false,
        }
    }

    /// Piece-local chord corresponding to an ambient chord.
    pub fn local_chord(&self, c: Chord) -> Option<Chord> {
        let i = self.verts.iter().position(|&v| v == c.a)?;
        let j = self.verts.iter().position(|&v| v == c.b)?;
        Chord::new(i, j, self.verts.len()).ok()
    }

    /// Ambient chord corresponding to a piece-local chord.
    pub fn ambient_chord(&self, local: Chord) -> Chord {
        Chord::raw(self.verts[local.a], self.verts[local.b])
    }

    fn split_at(&self, ambient: Chord, label: EdgeLabel) -> (CutPiece, CutPiece) {
        let local = self
            .local_chord(ambient)
            .expect("chord must lie in the piece");
        let m = self.poly.len();
        let (i, j) = (local.a, local.b);
        let mut e1: Vec<EdgeLabel> = (i..j).map(|k| self.poly.edges()[k]).collect();
        let mut g1: Vec<EdgeLabel> = (i..j).map(|k| self.gauge[k]).collect();
        e1.push(label);
        g1.push(self.gauge[j]);
        let v1: Vec<usize> = (i..=j).map(|k| self.verts[k]).collect();

        let mut e2: Vec<EdgeLabel> = (j..j + m - (j - i)).map(|k| self.poly.edges()[k % m]).collect();
        let mut g2: Vec<EdgeLabel> = (j..j + m - (j - i)).map(|k| self.gauge[k % m]).collect();
        e2.push(label);
        g2.push(self.gauge[i]);
        let v2: Vec<usize> = (j..=j + m - (j - i)).map(|k| self.verts[k % m]).collect();

        (
            CutPiece {
                poly: Polygon { edges: e1 },
                verts: v1,
                gauge: g1,
            },
            CutPiece {
                poly: Polygon { edges: e2 },
                verts: v2,
                gauge: g2,
            },
        )
    }
}

/// Result of cutting a polygon along a non-crossing chord set: `k+1` pieces
/// for `k` cuts, in a canonical order (sorted by ambient vertex sets).
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub ambient: Polygon,
    pub cuts: Vec<Chord>,
    pub pieces: Vec<CutPiece>,
}

impl Decomposition {
    /// Locates the piece containing an ambient chord that survives the cut
    /// (not a cut chord, crossing no cut chord). Returns the piece index and
    /// the piece-local chord.
    pub fn piece_of_chord(&self, c: Chord) -> Option<(usize, Chord)> {
        let mut hit = None;
        for (idx, p) in self.pieces.iter().enumerate() {
            if let Some(local) = p.local_chord(c) {
                debug_assert!(hit.is_none(), "chord in two pieces");
                hit = Some((idx, local));
            }
        }
        hit
    }

    /// All surviving ambient chords, with their piece locations:
    /// the relabeling map of the cut.
    pub fn chord_relabeling(&self) -> Vec<(Chord, usize, Chord)> {
        let mut out = Vec::new();
        for c in self.ambient.all_chords() {
            if self.cuts.contains(&c) || self.cuts.iter().any(|&j| j.crosses(c)) {
                continue;
            }
            let (idx, local) = self
                .piece_of_chord(c)
                .expect("surviving chord must land in a piece");
            out.push((c, idx, local));
        }
        out
    }
}
