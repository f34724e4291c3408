//! Logarithmic differential forms on the moduli space in the chord basis.
//!
//! A form of degree `k` is a rational combination of wedge monomials in the
//! `dlog u_c`. Monomials are stored as sorted chord lists with the sign of
//! the sorting permutation absorbed into the coefficient; monomials with a
//! repeated chord vanish. No further relations are imposed: residues,
//! pullbacks and evaluation are all well defined on representatives.
//!
//! Dihedral coordinates are the cross-ratios
//! `u_{a,b} = (p_a - p_{b+1})(p_{a+1} - p_b) / ((p_a - p_b)(p_{a+1} - p_{b+1}))`
//! of the four marked points singled out by a chord `{a, b}`, with marked
//! points `p_1..p_N` in the simplicial gauge `p_{n+1} = 1`, `p_{n+2} = inf`,
//! `p_{n+3} = 0`. The relations `prod_A u + prod_B u = 1` for completely
//! crossing rectangles of chords follow from the three-term Pluecker
//! identity, one for every cyclically ordered quadruple of vertices.

use std::collections::{BTreeMap, BTreeSet};

use crate::polygon::{Chord, CutPiece, EdgeLabel, Polygon, PolygonError};
use crate::scalar::{Field, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormError {
    /// A pair one-form with non-vanishing row sums does not descend to the
    /// moduli space.
    NotWellDefined,
    /// Evaluation hit a vanishing denominator.
    PoleHit,
    Polygon(PolygonError),
}

impl std::fmt::Display for FormError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FormError::NotWellDefined => write!(f, "row sums do not vanish"),
            FormError::PoleHit => write!(f, "evaluation point lies on a pole"),
            FormError::Polygon(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for FormError {}

impl From<PolygonError> for FormError {
    fn from(e: PolygonError) -> Self {
        FormError::Polygon(e)
    }
}

/// Sorts a wedge monomial, returning the sorted chords and the sign of the
/// permutation, or `None` when a chord repeats.
pub fn sort_monomial(mut chords: Vec<Chord>) -> Option<(Vec<Chord>, i32)> {
    let mut sign = 1i32;
    // insertion sort, counting transpositions
    for i in 1..chords.len() {
        let mut j = i;
        while j > 0 && chords[j - 1] > chords[j] {
            chords.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    for w in chords.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some((chords, sign))
}

/// A logarithmic form: rational combination of sorted wedge monomials in the
/// `dlog u_c`. The zero form is the empty combination; scalars are degree-0
/// monomials (the empty chord list).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ChordForm {
    pub terms: BTreeMap<Vec<Chord>, Rat>,
}

impl ChordForm {
    pub fn zero() -> Self {
        ChordForm::default()
    }

    pub fn scalar(c: Rat) -> Self {
        let mut f = ChordForm::default();
        f.add_term(vec![], c);
        f
    }

    pub fn one() -> Self {
        ChordForm::scalar(<Rat as Field>::one())
    }

    pub fn dlog(c: Chord) -> Self {
        let mut f = ChordForm::default();
        f.add_term(vec![c], <Rat as Field>::one());
        f
    }

    /// Degree-1 form from chord coefficients.
    pub fn one_form(coeffs: &BTreeMap<Chord, Rat>) -> Self {
        let mut f = ChordForm::default();
        for (c, v) in coeffs {
            f.add_term(vec![*c], v.clone());
        }
        f
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree when homogeneous, `None` for the zero form.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys();
        let d = it.next()?.len();
        debug_assert!(self.terms.keys().all(|m| m.len() == d));
        Some(d)
    }

    pub fn add_term(&mut self, chords: Vec<Chord>, coeff: Rat) {
        if Field::is_zero(&coeff) {
            return;
        }
        let Some((sorted, sign)) = sort_monomial(chords) else {
            return;
        };
        let signed = if sign < 0 { -coeff } else { coeff };
        let entry = self.terms.entry(sorted.clone()).or_insert_with(<Rat as Field>::zero);
        *entry += signed;
        if Field::is_zero(entry) {
            self.terms.remove(&sorted);
        }
    }

    pub fn add(&self, other: &ChordForm) -> ChordForm {
        let mut out = self.clone();
        for (m, v) in &other.terms {
            out.add_term(m.clone(), v.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> ChordForm {
        if Field::is_zero(c) {
            return ChordForm::zero();
        }
        ChordForm {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v * c))
                .collect(),
        }
    }

    pub fn neg(&self) -> ChordForm {
        self.scale(&-<Rat as Field>::one())
    }

    pub fn sub(&self, other: &ChordForm) -> ChordForm {
        self.add(&other.neg())
    }

    /// Graded wedge product.
    pub fn wedge(&self, other: &ChordForm) -> ChordForm {
        let mut out = ChordForm::default();
        for (m1, v1) in &self.terms {
            for (m2, v2) in &other.terms {
                let mut chords = m1.clone();
                chords.extend_from_slice(m2);
                out.add_term(chords, v1 * v2);
            }
        }
        out
    }

    /// Applies a linear substitution to each degree-1 factor: every chord
    /// `c` is replaced by the one-form `image(c)`, extended multiplicatively
    /// to wedge monomials.
    pub fn substitute(&self, image: &impl Fn(Chord) -> ChordForm) -> ChordForm {
        let mut out = ChordForm::default();
        for (m, v) in &self.terms {
            let mut acc = ChordForm::scalar(v.clone());
            for &c in m {
                acc = acc.wedge(&image(c));
            }
            out = out.add(&acc);
        }
        out
    }
}

/// A one-form written in the `dlog(p_j - p_i)` spanning set: rational
/// coefficients indexed by unordered point pairs `{i, j}`, `1 <= i < j <= N`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PairOneForm {
    pub n: usize,
    pub coeffs: BTreeMap<(usize, usize), Rat>,
}

impl PairOneForm {
    pub fn new(n: usize) -> Self {
        PairOneForm {
            n,
            coeffs: BTreeMap::new(),
        }
    }

    /// Adds `v * dlog(p_x - p_y)`; point labels are taken mod N into `1..=N`.
    pub fn add_pair(&mut self, x: usize, y: usize, v: Rat) {
        let xm = (x + self.n - 1) % self.n + 1;
        let ym = (y + self.n - 1) % self.n + 1;
        assert_ne!(xm, ym);
        let key = if xm < ym { (xm, ym) } else { (ym, xm) };
        let e = self.coeffs.entry(key).or_insert_with(<Rat as Field>::zero);
        *e += v;
        if Field::is_zero(e) {
            self.coeffs.remove(&key);
        }
    }

    /// Row sums vanish iff the form descends to the moduli space.
    pub fn row_sums_vanish(&self) -> bool {
        (1..=self.n).all(|i| {
            let s = self
                .coeffs
                .iter()
                .filter(|((x, y), _)| *x == i || *y == i)
                .fold(<Rat as Field>::zero(), |a, (_, v)| a + v);
            Field::is_zero(&s)
        })
    }

    /// The `dlog` of the cross-ratio attached to a chord of a polygon whose
    /// edge positions carry the marked-point labels `points` (1-based,
    /// cyclic). For the standard polygon `points[i] = i + 1`.
    pub fn cross_ratio_dlog(n: usize, points: &[usize], c: Chord) -> PairOneForm {
        let m = points.len();
        let pt = |v: usize| points[v % m];
        let one = <Rat as Field>::one;
        let mut f = PairOneForm::new(n);
        // u = (p_a - p_{b+1})(p_{a+1} - p_b) / ((p_a - p_b)(p_{a+1} - p_{b+1}))
        f.add_pair(pt(c.a), pt(c.b + 1), one());
        f.add_pair(pt(c.a + 1), pt(c.b), one());
        f.add_pair(pt(c.a), pt(c.b), -one());
        f.add_pair(pt(c.a + 1), pt(c.b + 1), -one());
        f
    }
}

/// Rewrites a momentum-conserving pair one-form in the chord basis
/// (the run-sum linear map).
pub fn pair_to_chord(
    omega: &PairOneForm,
    poly: &Polygon,
) -> Result<BTreeMap<Chord, Rat>, FormError> {
    if !omega.row_sums_vanish() {
        return Err(FormError::NotWellDefined);
    }
    assert_eq!(poly.len(), omega.n);
    let get = |x: usize, y: usize| -> Rat {
        let key = if x < y { (x, y) } else { (y, x) };
        omega
            .coeffs
            .get(&key)
            .cloned()
            .unwrap_or_else(<Rat as Field>::zero)
    };
    Ok(poly
        .all_chords()
        .into_iter()
        .map(|c| (c, crate::mandelstam::chord_sum(&get, c)))
        .filter(|(_, v)| !Field::is_zero(v))
        .collect())
}

/// Residue data along one chord: the two pieces (first piece carries the
/// vertex run `a..=b`) and the resulting combination of monomial pairs in
/// piece-local chords.
#[derive(Clone, Debug)]
pub struct Residue {
    pub left: CutPiece,
    pub right: CutPiece,
    pub terms: BTreeMap<(Vec<Chord>, Vec<Chord>), Rat>,
}

impl Residue {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The residue as a pure tensor when it factors; used by tests.
    pub fn left_form(&self) -> ChordForm {
        let mut f = ChordForm::default();
        for ((l, _), v) in &self.terms {
            f.add_term(l.clone(), v.clone());
        }
        f
    }
    pub fn right_form(&self) -> ChordForm {
        let mut f = ChordForm::default();
        for ((_, r), v) in &self.terms {
            f.add_term(r.clone(), v.clone());
        }
        f
    }
}

/// Residue of one monomial along `c`, in ambient chords: `None` if the
/// residue vanishes (no `dlog u_c` factor, or a factor crossing `c`
/// restricts to zero). Otherwise the side-1 factors, side-2 factors, and
/// the extraction-plus-shuffle sign.
pub fn residue_monomial(
    monomial: &[Chord],
    c: Chord,
) -> Option<(Vec<Chord>, Vec<Chord>, i32)> {
    let pos = monomial.iter().position(|&d| d == c)?;
    if monomial.iter().any(|&d| d.crosses(c)) {
        return None;
    }
    let mut sign = if pos % 2 == 0 { 1 } else { -1 };
    let rest: Vec<Chord> = monomial
        .iter()
        .copied()
        .filter(|&d| d != c)
        .collect();
    let side1 = |d: Chord| c.a <= d.a && d.b <= c.b;
    // shuffle sign: move every side-1 factor in front of the side-2 factors
    // it follows, one transposition of 1-forms each
    let mut seen_side2 = 0usize;
    let mut left = Vec::new();
    let mut right = Vec::new();
    for d in rest {
        if side1(d) {
            if seen_side2 % 2 == 1 {
                sign = -sign;
            }
            left.push(d);
        } else {
            seen_side2 += 1;
            right.push(d);
        }
    }
    Some((left, right, sign))
}

/// Residue map on forms: `Res_{D_c}` into the tensor square of the pieces.
/// Chords crossing `c` restrict to zero; surviving chords are relabeled to
/// the pieces.
pub fn residue(poly: &Polygon, form: &ChordForm, c: Chord) -> Result<Residue, FormError> {
    let (left, right) = poly.split_pieces(c)?;
    let mut terms: BTreeMap<(Vec<Chord>, Vec<Chord>), Rat> = BTreeMap::new();
    for (m, v) in &form.terms {
        let Some((l, r, sign)) = residue_monomial(m, c) else {
            continue;
        };
        let lloc: Vec<Chord> = l
            .iter()
            .map(|&d| left.local_chord(d).expect("side-1 chord in left piece"))
            .collect();
        let rloc: Vec<Chord> = r
            .iter()
            .map(|&d| right.local_chord(d).expect("side-2 chord in right piece"))
            .collect();
        let (lkey, ls) = sort_monomial(lloc).expect("no repeats");
        let (rkey, rs) = sort_monomial(rloc).expect("no repeats");
        let signed = v * Rat::from_integer((sign * ls * rs).into());
        let e = terms
            .entry((lkey, rkey))
            .or_insert_with(<Rat as Field>::zero);
        *e += signed;
        if Field::is_zero(e) {
            terms.retain(|_, v| !Field::is_zero(v));
        }
    }
    Ok(Residue { left, right, terms })
}

/// True iff the form has a nonzero residue along `c` (equivalently, a simple
/// pole along the corresponding divisor).
pub fn has_residue(poly: &Polygon, form: &ChordForm, c: Chord) -> bool {
    residue(poly, form, c).map(|r| !r.is_zero()).unwrap_or(false)
}

/// Pullback along the forgetful map contracting `poly` onto the edge subset
/// `target`: `dlog u_d` maps to the sum of `dlog u_{d'}` over preimages.
pub fn pullback_forgetful(
    poly: &Polygon,
    target: &BTreeSet<EdgeLabel>,
    form_on_target: &ChordForm,
) -> Result<ChordForm, FormError> {
    let (_, map) = poly.forgetful_chord_map(target)?;
    let mut preimages: BTreeMap<Chord, Vec<Chord>> = BTreeMap::new();
    for (c, img) in map {
        if let Some(d) = img {
            preimages.entry(d).or_default().push(c);
        }
    }
    Ok(form_on_target.substitute(&|d| {
        let mut f = ChordForm::default();
        for &c in preimages.get(&d).map(|v| v.as_slice()).unwrap_or(&[]) {
            f = f.add(&ChordForm::dlog(c));
        }
        f
    }))
}

/// The trivialisation pullback along a chord `c`: sends a one-form on the
/// four-edge polygon `T_c`, together with forms on the two pieces of the
/// split, to a form on `poly`. The `T_c` chord `(1,3)` maps to `dlog u_c`,
/// the crossing chord `(0,2)` to `dlog(1 - u_c)`; piece chords are relabeled
/// positionally to the extended targets and pulled back along the forgetful
/// maps.
pub fn pullback_trivialisation(
    poly: &Polygon,
    c: Chord,
    w_c: &ChordForm,
    w_left: &ChordForm,
    w_right: &ChordForm,
) -> Result<ChordForm, FormError> {
    let (_, t1, t2) = poly.trivialisation_targets(c);
    let crossing: Vec<Chord> = poly
        .all_chords()
        .into_iter()
        .filter(|d| d.crosses(c))
        .collect();
    let wc_mapped = w_c.substitute(&|d| {
        if d == Chord::raw(1, 3) {
            ChordForm::dlog(c)
        } else {
            debug_assert_eq!(d, Chord::raw(0, 2));
            crossing
                .iter()
                .fold(ChordForm::zero(), |f, &x| f.add(&ChordForm::dlog(x)))
        }
    });
    // Piece chords transfer to the targets along the natural bijection (cut
    // edge identified with the extending edge); the target sub-polygon is
    // numbered in ambient order, so the wrap side needs a rotation.
    let p1 = pullback_piece_form(poly, &t1, w_left)?;
    let p2 = pullback_piece_form(poly, &t2, w_right)?;
    Ok(wc_mapped.wedge(&p1).wedge(&p2))
}

/// Pulls back a form given on a split piece (in piece-local numbering, cut
/// edge last) along the forgetful map onto the extended target `t_edges`
/// (given in piece cyclic order, extension edge last).
fn pullback_piece_form(
    poly: &Polygon,
    t_edges: &[EdgeLabel],
    w_piece: &ChordForm,
) -> Result<ChordForm, FormError> {
    let tset: BTreeSet<EdgeLabel> = t_edges.iter().copied().collect();
    let sub: Vec<EdgeLabel> = poly
        .edges()
        .iter()
        .copied()
        .filter(|e| tset.contains(e))
        .collect();
    let k = sub.len();
    assert_eq!(t_edges.len(), k);
    let rot = (0..k)
        .find(|&r| (0..k).all(|i| t_edges[(i + r) % k] == sub[i]))
        .expect("target is a cyclic rotation of the filtered order");
    let shift = |v: usize| (v + k - rot) % k;
    let mut rotated = ChordForm::default();
    for (m, v) in &w_piece.terms {
        rotated.add_term(
            m.iter().map(|d| Chord::raw(shift(d.a), shift(d.b))).collect(),
            v.clone(),
        );
    }
    pullback_forgetful(poly, &tset, &rotated)
}

/// The canonical cell form `nu` in the chord basis: the signed wedge of
/// `dlog x_i - dlog(1 - x_i)` over the cubical coordinates, with
/// `1 - x_i` expanded by the complete-crossing relation.
pub fn nu_form(poly: &Polygon) -> ChordForm {
    let n = poly.len() - 3;
    if n == 0 {
        return ChordForm::one();
    }
    let all = poly.all_chords();
    let mut f = ChordForm::scalar(nu_sign(n));
    for i in 1..=n {
        let ci = Chord::raw(i, n + 2);
        let mut factor = ChordForm::dlog(ci);
        for &d in &all {
            if d.crosses(ci) {
                factor = factor.sub(&ChordForm::dlog(d));
            }
        }
        f = f.wedge(&factor);
    }
    f
}

fn nu_sign(n: usize) -> Rat {
    if (n * (n + 1) / 2) % 2 == 0 {
        <Rat as Field>::one()
    } else {
        -<Rat as Field>::one()
    }
}

/// Marked-point values for evaluation: finite or the point at infinity.
#[derive(Clone, Debug, PartialEq)]
pub enum Pt<F> {
    Finite(F),
    Infinity,
}

/// An evaluation chart: values of the marked points `p_1..p_N` together
/// with, for each point, the index of the simplicial variable it carries
/// (`None` for gauge-fixed points). Charts drive both value and covector
/// computation.
#[derive(Clone, Debug)]
pub struct Chart<F: Field> {
    pub pts: Vec<Pt<F>>,
    pub vars: Vec<Option<usize>>,
    pub nvars: usize,
}

impl<F: Field> Chart<F> {
    /// Standard simplicial chart: `p_i = t_i` for `i <= n`, then `1, inf, 0`.
    pub fn simplicial(t: &[F]) -> Chart<F> {
        let n = t.len();
        let mut pts: Vec<Pt<F>> = t.iter().cloned().map(Pt::Finite).collect();
        pts.push(Pt::Finite(F::one()));
        pts.push(Pt::Infinity);
        pts.push(Pt::Finite(F::zero()));
        let mut vars: Vec<Option<usize>> = (0..n).map(Some).collect();
        vars.extend([None, None, None]);
        Chart {
            pts,
            vars,
            nvars: n,
        }
    }

    /// Chart for a sub-polygon: keeps the marked points at the given 0-based
    /// positions, in order.
    pub fn subchart(&self, positions: &[usize]) -> Chart<F> {
        Chart {
            pts: positions.iter().map(|&i| self.pts[i].clone()).collect(),
            vars: positions.iter().map(|&i| self.vars[i]).collect(),
            nvars: self.nvars,
        }
    }

    /// Simplicial point from cubical coordinates `t_i = x_i x_{i+1} ... x_n`.
    pub fn cubical_to_simplicial(x: &[F]) -> Vec<F> {
        let n = x.len();
        let mut t = vec![F::one(); n];
        let mut acc = F::one();
        for i in (0..n).rev() {
            acc = acc.mul(&x[i]);
            t[i] = acc.clone();
        }
        t
    }

    fn var(&self, i: usize) -> Option<usize> {
        let n = self.pts.len();
        self.vars[i % n]
    }

    /// Value of the dihedral coordinate of a chord: the cross-ratio of the
    /// four adjacent marked points, with infinity handled by cancellation.
    /// Point positions are 0-based here (`position i` holds `p_{i+1}`), so
    /// the chord's four points sit at positions `a-1, a, b-1, b`.
    pub fn u_value(&self, c: Chord) -> Result<F, FormError> {
        let n = self.pts.len();
        let p0 = (c.a + n - 1) % n; // p_a
        let p1 = c.a; // p_{a+1}
        let p2 = (c.b + n - 1) % n; // p_b
        let p3 = c.b % n; // p_{b+1}
        // u = (P0 - P3)(P1 - P2) / ((P0 - P2)(P1 - P3)); at most one point is
        // infinite, and its two factors cancel
        let mut num = F::one();
        let mut den = F::one();
        for (x, y, up) in [(p0, p3, true), (p1, p2, true), (p0, p2, false), (p1, p3, false)] {
            if let Some(d) = self.diff(x, y) {
                if up {
                    num = num.mul(&d);
                } else {
                    den = den.mul(&d);
                }
            }
        }
        if den.is_zero() {
            return Err(FormError::PoleHit);
        }
        Ok(num.div(&den))
    }

    /// Difference of two marked points by 0-based position; `None` marks a
    /// factor involving infinity (to be cancelled against another).
    fn diff(&self, i: usize, j: usize) -> Option<F> {
        match (&self.pts[i], &self.pts[j]) {
            (Pt::Finite(a), Pt::Finite(b)) => Some(a.sub(b)),
            _ => None,
        }
    }

    /// Covector of `dlog u_c` at the chart point, as derivatives in the
    /// simplicial variables.
    pub fn dlog_u_covector(&self, c: Chord) -> Result<Vec<F>, FormError> {
        let n = self.pts.len();
        // indices (1-based point labels offset to 0-based positions)
        let pa = (c.a + n - 1) % n;
        let pa1 = c.a;
        let pb = (c.b + n - 1) % n;
        let pb1 = c.b % n;
        let mut cov = vec![F::zero(); self.nvars];
        for (x, y, sgn) in [
            (pa, pb1, 1i32),
            (pa1, pb, 1),
            (pa, pb, -1),
            (pa1, pb1, -1),
        ] {
            self.accumulate_dlog_pair(&mut cov, x, y, sgn)?;
        }
        Ok(cov)
    }

    /// Covector of `dlog(p_x - p_y)` with 0-based positions; factors through
    /// infinity contribute nothing (their differentials cancel in any
    /// well-defined combination).
    fn accumulate_dlog_pair(
        &self,
        cov: &mut [F],
        x: usize,
        y: usize,
        sgn: i32,
    ) -> Result<(), FormError> {
        let (vx, vy) = (self.var(x), self.var(y));
        match self.diff(x, y) {
            Some(d) => {
                if d.is_zero() {
                    return Err(FormError::PoleHit);
                }
                let s = F::from_i64(sgn as i64).div(&d);
                if let Some(k) = vx {
                    cov[k] = cov[k].add(&s);
                }
                if let Some(k) = vy {
                    cov[k] = cov[k].sub(&s);
                }
                Ok(())
            }
            None => Ok(()),
        }
    }

    /// Covector of a pair one-form.
    pub fn pair_covector(&self, omega: &PairOneForm) -> Result<Vec<F>, FormError> {
        let mut cov = vec![F::zero(); self.nvars];
        for (&(x, y), v) in &omega.coeffs {
            let mut part = vec![F::zero(); self.nvars];
            self.accumulate_dlog_pair(&mut part, x - 1, y - 1, 1)?;
            for k in 0..self.nvars {
                cov[k] = cov[k].add(&F::from_rat(v).mul(&part[k]));
            }
        }
        Ok(cov)
    }

    /// Covector of a degree-1 chord form.
    pub fn one_form_covector(&self, form: &ChordForm) -> Result<Vec<F>, FormError> {
        let mut cov = vec![F::zero(); self.nvars];
        for (m, v) in &form.terms {
            assert_eq!(m.len(), 1);
            let part = self.dlog_u_covector(m[0])?;
            for k in 0..self.nvars {
                cov[k] = cov[k].add(&F::from_rat(v).mul(&part[k]));
            }
        }
        Ok(cov)
    }

    /// Evaluates a top-degree form against `dt_1 ^ ... ^ dt_n`.
    pub fn evaluate_top(&self, form: &ChordForm) -> Result<F, FormError> {
        let n = self.nvars;
        let mut total = F::zero();
        let mut cache: BTreeMap<Chord, Vec<F>> = BTreeMap::new();
        for (m, v) in &form.terms {
            assert_eq!(m.len(), n, "form is not top degree");
            let mut rows = Vec::with_capacity(n);
            for &c in m {
                if !cache.contains_key(&c) {
                    cache.insert(c, self.dlog_u_covector(c)?);
                }
                rows.push(cache[&c].clone());
            }
            let det = determinant(rows);
            total = total.add(&F::from_rat(v).mul(&det));
        }
        Ok(total)
    }

    /// Evaluates a form of any degree on a list of tangent vectors (one per
    /// form degree): the alternating sum of products of covector pairings.
    pub fn evaluate_on_vectors(
        &self,
        form: &ChordForm,
        vectors: &[Vec<F>],
    ) -> Result<F, FormError> {
        let k = vectors.len();
        let mut total = F::zero();
        let mut cache: BTreeMap<Chord, Vec<F>> = BTreeMap::new();
        for (m, v) in &form.terms {
            assert_eq!(m.len(), k, "degree mismatch with vector count");
            let mut rows = Vec::with_capacity(k);
            for &c in m {
                if !cache.contains_key(&c) {
                    cache.insert(c, self.dlog_u_covector(c)?);
                }
                let cov = &cache[&c];
                rows.push(
                    vectors
                        .iter()
                        .map(|vec| {
                            cov.iter()
                                .zip(vec)
                                .fold(F::zero(), |a, (x, y)| a.add(&x.mul(y)))
                        })
                        .collect::<Vec<F>>(),
                );
            }
            let det = determinant(rows);
            total = total.add(&F::from_rat(v).mul(&det));
        }
        Ok(total)
    }
}

/// Deterministic interior rational point of the open cell, derived from a
/// seed; coordinates are strictly increasing in `(0, 1)`.
pub fn seeded_cell_point(n: usize, seed: u64) -> Vec<Rat> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut t: Vec<Rat> = (0..n)
            .map(|_| Rat::new(rng.gen_range(1i64..997).into(), 997.into()))
            .collect();
        t.sort();
        t.dedup();
        if t.len() == n {
            return t;
        }
    }
}

fn seeded_vectors(n: usize, k: usize, seed: u64) -> Vec<Vec<Rat>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
    (0..k)
        .map(|_| {
            (0..n)
                .map(|_| Rat::new(rng.gen_range(-50i64..=50).into(), rng.gen_range(1i64..=7).into()))
                .collect()
        })
        .collect()
}

/// Exact equality of two forms as differential forms on the moduli space:
/// the stored monomial combinations may differ by the quadratic relations
/// among the `dlog u_c`, so equality is certified by exact rational
/// evaluation at deterministic generic points.
pub fn forms_equal(poly: &Polygon, f: &ChordForm, g: &ChordForm, trials: u64) -> bool {
    let diff = f.sub(g);
    form_is_zero(poly, &diff, trials)
}

/// Exact vanishing of a form as a differential form.
pub fn form_is_zero(poly: &Polygon, f: &ChordForm, trials: u64) -> bool {
    if f.is_zero() {
        return true;
    }
    let Some(deg) = f.degree() else {
        return true;
    };
    let n = poly.len() - 3;
    if deg > n {
        // degree above the dimension: the form vanishes identically
        return true;
    }
    for trial in 0..trials {
        let t = seeded_cell_point(n, 0xf0a7 + trial);
        let chart = Chart::simplicial(&t);
        let val = if deg == n {
            chart.evaluate_top(f)
        } else {
            chart.evaluate_on_vectors(f, &seeded_vectors(n, deg, 0x51ab + trial))
        };
        match val {
            Ok(v) => {
                if !Field::is_zero(&v) {
                    return false;
                }
            }
            Err(_) => continue,
        }
    }
    true
}

/// Determinant over any field by fraction-free-ish Gaussian elimination with
/// first-nonzero pivoting. Matrices here are tiny (n <= 4).
pub fn determinant<F: Field>(mut m: Vec<Vec<F>>) -> F {
    let n = m.len();
    if n == 0 {
        return F::one();
    }
    let mut det = F::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return F::zero();
        };
        if p != col {
            m.swap(p, col);
            det = det.neg();
        }
        let pivot = m[col][col].clone();
        det = det.mul(&pivot);
        for r in (col + 1)..n {
            let factor = m[r][col].div(&pivot);
            for k in col..n {
                let sub = factor.mul(&m[col][k]);
                m[r][k] = m[r][k].sub(&sub);
            }
        }
    }
    det
}

/// Jacobian `det(dt/dx)` of the cubical chart at a cubical point.
pub fn cubical_jacobian<F: Field>(x: &[F]) -> F {
    let mut j = F::one();
    for (i, xi) in x.iter().enumerate() {
        for _ in 0..i {
            j = j.mul(xi);
        }
    }
    j
}

/// All complete-crossing relation instances for an `n`-gon: for each
/// cyclically ordered quadruple `i < j < k < l` of vertices, the two chord
/// rectangles whose dihedral-coordinate products sum to 1.
pub fn crossing_relations(n: usize) -> Vec<(Vec<Chord>, Vec<Chord>)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                for l in (k + 1)..n {
                    let mut rect1 = Vec::new();
                    for a in i..j {
                        for b in k..l {
                            rect1.push(Chord::raw(a, b));
                        }
                    }
                    let mut rect2 = Vec::new();
                    for a in j..k {
                        for b in l..(i + n) {
                            rect2.push(Chord::raw(a, b % n));
                        }
                    }
                    out.push((rect1, rect2));
                }
            }
        }
    }
    out
}

/// The Parke-Taylor form for a permutation of `{1..n}`: the chord-basis
/// expansion of the cell form of the reordered dihedral structure
/// `(0, t_{sigma(1)}, ..., t_{sigma(n)}, 1, inf)`, with the sign pinned so
/// that evaluation matches `dt_1...dt_n / prod(t_{sigma(k)} - t_{sigma(k-1)})`
/// exactly (with `t_{sigma(0)} = 0`, `t_{sigma(n+1)} = 1`).
pub fn parke_taylor_form(n: usize, sigma: &[usize]) -> Result<ChordForm, FormError> {
    assert_eq!(sigma.len(), n);
    {
        let mut seen = vec![false; n + 1];
        for &s in sigma {
            assert!((1..=n).contains(&s) && !seen[s], "not a permutation");
            seen[s] = true;
        }
    }
    let big_n = n + 3;
    let poly = Polygon::standard(big_n);
    // marked points of the reordered structure, as 1-based labels
    let mut points = vec![big_n]; // 0
    points.extend(sigma.iter().copied());
    points.push(n + 1); // 1
    points.push(n + 2); // inf
    // one-forms of the reordered structure's chords, in the standard basis
    let sigma_chord = |c: Chord| -> Result<ChordForm, FormError> {
        let pf = PairOneForm::cross_ratio_dlog(big_n, &points, c);
        Ok(ChordForm::one_form(&pair_to_chord(&pf, &poly)?))
    };
    let mut form = ChordForm::scalar(nu_sign(n));
    let all = poly.all_chords();
    for i in 1..=n {
        let ci = Chord::raw(i, n + 2);
        let mut factor = sigma_chord(ci)?;
        for &d in &all {
            if d.crosses(ci) {
                factor = factor.sub(&sigma_chord(d)?);
            }
        }
        form = form.wedge(&factor);
    }
    // pin the sign against the rational function at a probe point
    let t: Vec<Rat> = (1..=n)
        .map(|k| Rat::new((k as i64).into(), (n as i64 + 1).into()))
        .collect();
    let chart = Chart::simplicial(&t);
    let got = chart.evaluate_top(&form)?;
    let mut want = <Rat as Field>::one();
    let val = |label: usize| -> Rat {
        if label == 0 {
            <Rat as Field>::zero()
        } else if label == n + 1 {
            <Rat as Field>::one()
        } else {
            t[label - 1].clone()
        }
    };
    let mut chain = vec![0usize];
    chain.extend(sigma.iter().copied());
    chain.push(n + 1);
    for w in chain.windows(2) {
        want = want.div(&val(w[1]).sub(&val(w[0])));
    }
    if got == want {
        Ok(form)
    } else if got == want.neg() {
        Ok(form.neg())
    } else {
        panic!("Parke-Taylor form mismatches its rational function: {got} vs {want}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn named_pentagon_chords() -> [(Chord, &'static str); 5] {
        [
            (Chord::raw(0, 3), "u13"),
            (Chord::raw(1, 4), "u24"),
            (Chord::raw(0, 2), "u35"),
            (Chord::raw(1, 3), "u14"),
            (Chord::raw(2, 4), "u25"),
        ]
    }

    fn pentagon_chart() -> Chart<Rat> {
        // cubical (x, y) = (1/2, 1/3): t = (1/6, 1/3)
        let x = vec![rat(1, 2), rat(1, 3)];
        Chart::simplicial(&Chart::cubical_to_simplicial(&x))
    }

    #[test]
    fn pentagon_table() {
        let chart = pentagon_chart();
        let expect = [
            ("u13", rat(5, 6)),
            ("u24", rat(1, 2)),
            ("u35", rat(3, 5)),
            ("u14", rat(4, 5)),
            ("u25", rat(1, 3)),
        ];
        for (c, name) in named_pentagon_chords() {
            let want = expect.iter().find(|(n, _)| *n == name).unwrap().1.clone();
            assert_eq!(chart.u_value(c).unwrap(), want, "{name}");
        }
    }

    #[test]
    fn pentagon_figure_relation() {
        // u24 = 1 - u13 u35
        let chart = pentagon_chart();
        let u24 = chart.u_value(Chord::raw(1, 4)).unwrap();
        let u13 = chart.u_value(Chord::raw(0, 3)).unwrap();
        let u35 = chart.u_value(Chord::raw(0, 2)).unwrap();
        assert_eq!(u24, <Rat as Field>::one() - u13 * u35);
    }

    #[test]
    fn crossing_relations_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 4..=6 {
            let poly = Polygon::standard(n);
            for _ in 0..5 {
                let t: Vec<Rat> = sorted_random_point(n - 3, &mut rng);
                let chart = Chart::simplicial(&t);
                for (ra, rb) in crossing_relations(poly.len()) {
                    let pa = ra
                        .iter()
                        .map(|&c| chart.u_value(c).unwrap())
                        .fold(<Rat as Field>::one(), |x, y| x * y);
                    let pb = rb
                        .iter()
                        .map(|&c| chart.u_value(c).unwrap())
                        .fold(<Rat as Field>::one(), |x, y| x * y);
                    assert_eq!(pa + pb, <Rat as Field>::one(), "n = {n}");
                }
            }
        }
    }

    pub fn sorted_random_point(n: usize, rng: &mut ChaCha8Rng) -> Vec<Rat> {
        loop {
            let mut t: Vec<Rat> = (0..n)
                .map(|_| rat(rng.gen_range(1..400), 401))
                .collect();
            t.sort();
            t.dedup();
            if t.len() == n {
                return t;
            }
        }
    }

    #[test]
    fn unit_interval_values() {
        // all u_c in (0,1) on the open cell
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 4..=6 {
            let poly = Polygon::standard(n);
            for _ in 0..100 {
                let t = sorted_random_point(n - 3, &mut rng);
                let chart = Chart::simplicial(&t);
                for c in poly.all_chords() {
                    let u = chart.u_value(c).unwrap();
                    assert!(u > <Rat as Field>::zero() && u < <Rat as Field>::one());
                }
            }
        }
    }

    #[test]
    fn wedge_antisymmetry_and_associativity() {
        let c1 = Chord::raw(0, 2);
        let c2 = Chord::raw(1, 3);
        let a = ChordForm::dlog(c1);
        let b = ChordForm::dlog(c2);
        assert_eq!(a.wedge(&a), ChordForm::zero());
        assert_eq!(a.wedge(&b), b.wedge(&a).neg());

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let poly = Polygon::standard(6);
        let rnd = |rng: &mut ChaCha8Rng| {
            let mut f = ChordForm::zero();
            for c in poly.all_chords() {
                if rng.gen_bool(0.5) {
                    f.add_term(vec![c], rat(rng.gen_range(-5..=5), 1 + rng.gen_range(0..4)));
                }
            }
            f
        };
        for _ in 0..10 {
            let (f, g, h) = (rnd(&mut rng), rnd(&mut rng), rnd(&mut rng));
            assert_eq!(f.wedge(&g).wedge(&h), f.wedge(&g.wedge(&h)));
        }
    }

    #[test]
    fn pair_to_chord_four_point() {
        // omega_s for the (s,t) matrix: coefficients over chords must be the
        // (s, t) exponents
        let s = rat(2, 7);
        let t = rat(-3, 5);
        let m = crate::mandelstam::four_point_st(s.clone(), t.clone());
        let mut pf = PairOneForm::new(4);
        for i in 1..=4 {
            for j in (i + 1)..=4 {
                pf.add_pair(i, j, m.get(i, j));
            }
        }
        let poly = Polygon::standard(4);
        let chords = pair_to_chord(&pf, &poly).unwrap();
        assert_eq!(chords[&Chord::raw(1, 3)], s);
        assert_eq!(chords[&Chord::raw(0, 2)], t);
    }

    #[test]
    fn pair_to_chord_matches_covectors() {
        // numeric gradient matching at random points, N = 5
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let poly = Polygon::standard(5);
        for _ in 0..3 {
            let vars: crate::mandelstam::ChordVariables<Rat> = poly
                .all_chords()
                .into_iter()
                .map(|c| (c, rat(rng.gen_range(-9..=9), rng.gen_range(1..=5))))
                .collect();
            let m = crate::mandelstam::from_chord_variables(&vars, &poly);
            let mut pf = PairOneForm::new(5);
            for i in 1..=5 {
                for j in (i + 1)..=5 {
                    pf.add_pair(i, j, m.get(i, j));
                }
            }
            let chords = pair_to_chord(&pf, &poly).unwrap();
            assert_eq!(chords, vars.into_iter().filter(|(_, v)| !Field::is_zero(v)).collect());
            for _ in 0..3 {
                let t = sorted_random_point(2, &mut rng);
                let chart = Chart::simplicial(&t);
                let lhs = chart.pair_covector(&pf).unwrap();
                let rhs = chart
                    .one_form_covector(&ChordForm::one_form(&chords))
                    .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn not_well_defined_rejected() {
        let mut pf = PairOneForm::new(4);
        pf.add_pair(1, 2, rat_int(1));
        assert_eq!(
            pair_to_chord(&pf, &Polygon::standard(4)),
            Err(FormError::NotWellDefined)
        );
    }

    #[test]
    fn residue_simple_cases() {
        let poly = Polygon::standard(5);
        let c13 = Chord::raw(0, 3);
        let c24 = Chord::raw(1, 4);
        // residue of dlog u13 ^ dlog u24 along D_{u13} is zero:
        // u24 crosses u13 and restricts to 1
        let f = ChordForm::dlog(c13).wedge(&ChordForm::dlog(c24));
        let r = residue(&poly, &f, c13).unwrap();
        assert!(r.is_zero());
        // no dlog u_c factor: zero residue
        let g = ChordForm::dlog(c24).wedge(&ChordForm::dlog(Chord::raw(2, 4)));
        assert!(residue(&poly, &g, c13).unwrap().is_zero());
    }

    #[test]
    fn residue_of_trivialisation_pullback() {
        // Res after pullback recovers the inputs; along a crossing chord the
        // residue vanishes
        let poly = Polygon::standard(6);
        for c in poly.all_chords() {
            let (p1, p2) = poly.split_pieces(c).unwrap();
            let w1 = nu_form(&p1.poly);
            let w2 = nu_form(&p2.poly);
            let wc = ChordForm::dlog(Chord::raw(1, 3)); // dx/x on T_c
            let pulled = pullback_trivialisation(&poly, c, &wc, &w1, &w2).unwrap();
            let r = residue(&poly, &pulled, c).unwrap();
            let expect = w1
                .terms
                .iter()
                .flat_map(|(m1, v1)| {
                    w2.terms
                        .iter()
                        .map(move |(m2, v2)| ((m1.clone(), m2.clone()), v1 * v2))
                })
                .collect::<BTreeMap<_, _>>();
            assert_eq!(r.terms, expect, "chord {c}");
            for d in poly.all_chords() {
                if d.crosses(c) {
                    assert!(residue(&poly, &pulled, d).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn trivialisation_commutes_for_noncrossing() {
        // f_{c1}^* f_{c2}^* = f_{c2}^* f_{c1}^* on scalar inputs:
        // check on the full wedge by comparing the two assembled forms
        let poly = Polygon::standard(6);
        let c1 = Chord::raw(0, 2);
        let c2 = Chord::raw(3, 5);
        // both orders must produce the same 2-form factors for these
        // disjoint chords: build dlog u_{c1} ^ dlog u_{c2} both ways via the
        // one-chord pullback of the other's dlog
        let (_p1, p2) = poly.split_pieces(c1).unwrap();
        // c2 lives in piece 2 (vertices 2..=0 wrap)
        let local = p2.local_chord(c2).unwrap();
        let w = pullback_trivialisation(
            &poly,
            c1,
            &ChordForm::dlog(Chord::raw(1, 3)),
            &ChordForm::one(),
            &ChordForm::dlog(local),
        )
        .unwrap();
        let (q1, q2) = poly.split_pieces(c2).unwrap();
        assert!(q1.local_chord(c1).is_none());
        let local1 = q2.local_chord(c1).unwrap();
        let v = pullback_trivialisation(
            &poly,
            c2,
            &ChordForm::dlog(Chord::raw(1, 3)),
            &ChordForm::one(),
            &ChordForm::dlog(local1),
        )
        .unwrap();
        assert_eq!(w, v.neg()); // dlog u_{c1} ^ dlog u_{c2} = - dlog u_{c2} ^ dlog u_{c1}
    }

    #[test]
    fn forgetful_pullback_identity_and_pentagon() {
        let p5 = Polygon::standard(5);
        let full: BTreeSet<EdgeLabel> = p5.edges().iter().copied().collect();
        let f = ChordForm::dlog(Chord::raw(0, 2)).wedge(&ChordForm::dlog(Chord::raw(1, 3)));
        assert_eq!(pullback_forgetful(&p5, &full, &f).unwrap(), f);

        // drop edge 5: one square chord pulls back to a sum of two dlogs,
        // the other to a single dlog; the pullback identity
        // f_T^*(u_d) = prod over preimages holds on the nose
        let target: BTreeSet<EdgeLabel> = [1, 2, 3, 4].into_iter().collect();
        let (sq, map) = p5.forgetful_chord_map(&target).unwrap();
        let chart5 = pentagon_chart();
        let chart4 = chart5.subchart(&[0, 1, 2, 3]);
        let mut preimage_counts = Vec::new();
        for d in sq.all_chords() {
            let pre: Vec<Chord> = map
                .iter()
                .filter(|(_, img)| *img == Some(d))
                .map(|(c, _)| *c)
                .collect();
            assert!(!pre.is_empty());
            preimage_counts.push(pre.len());
            let prod = pre
                .iter()
                .map(|&c| chart5.u_value(c).unwrap())
                .fold(<Rat as Field>::one(), |a, b| a * b);
            assert_eq!(chart4.u_value(d).unwrap(), prod, "square chord {d}");
        }
        preimage_counts.sort();
        assert_eq!(preimage_counts, vec![1, 2]);
    }

    #[test]
    fn nu_four_point() {
        // nu = -(dlog x - dlog(1-x)) at N=4
        let poly = Polygon::standard(4);
        let nu = nu_form(&poly);
        let x = Chord::raw(1, 3);
        let ox = Chord::raw(0, 2);
        let want = ChordForm::dlog(x).sub(&ChordForm::dlog(ox)).neg();
        assert_eq!(nu, want);
    }

    #[test]
    fn nu_matches_simplicial_formula() {
        // numeric cross-check of the two expressions for nu at N = 5, 6
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for n in [5usize, 6] {
            let poly = Polygon::standard(n);
            let nu = nu_form(&poly);
            for _ in 0..4 {
                let t = sorted_random_point(n - 3, &mut rng);
                let chart = Chart::simplicial(&t);
                let got = chart.evaluate_top(&nu).unwrap();
                // (-1)^{n(n+1)/2} prod (t_{i+1} - t_i)^{-1}, t_0 = 0, t_{n+1} = 1
                let m = n - 3;
                let mut want = nu_sign(m);
                let mut pts = vec![<Rat as Field>::zero()];
                pts.extend(t.iter().cloned());
                pts.push(<Rat as Field>::one());
                for w in pts.windows(2) {
                    want = want / (w[1].clone() - w[0].clone());
                }
                assert_eq!(got, want, "n = {n}");
            }
        }
    }

    /// Evaluates a residue tensor at a pair of generic rational points of
    /// the pieces.
    fn eval_residue(r: &Residue, seed: u64) -> Rat {
        let nl = r.left.poly.len() - 3;
        let nr = r.right.poly.len() - 3;
        let cl = Chart::simplicial(&seeded_cell_point(nl, seed));
        let cr = Chart::simplicial(&seeded_cell_point(nr, seed + 1));
        let mut total = <Rat as Field>::zero();
        for ((m1, m2), v) in &r.terms {
            let mut f1 = ChordForm::zero();
            f1.add_term(m1.clone(), <Rat as Field>::one());
            let mut f2 = ChordForm::zero();
            f2.add_term(m2.clone(), <Rat as Field>::one());
            total += v * cl.evaluate_top(&f1).unwrap() * cr.evaluate_top(&f2).unwrap();
        }
        total
    }

    #[test]
    fn nu_residues_factor() {
        // nu has simple poles along every chord, with residue +- nu (x) nu;
        // representations may differ by the quadratic relations, so the
        // comparison is by exact evaluation
        for n in [5usize, 6] {
            let poly = Polygon::standard(n);
            let nu = nu_form(&poly);
            for c in poly.all_chords() {
                let r = residue(&poly, &nu, c).unwrap();
                assert!(!r.is_zero(), "chord {c}");
                let n1 = nu_form(&r.left.poly);
                let n2 = nu_form(&r.right.poly);
                let mut sign = None;
                for seed in [7u64, 19, 31] {
                    let got = eval_residue(&r, seed);
                    let cl = Chart::simplicial(&seeded_cell_point(r.left.poly.len() - 3, seed));
                    let cr =
                        Chart::simplicial(&seeded_cell_point(r.right.poly.len() - 3, seed + 1));
                    let want = cl.evaluate_top(&n1).unwrap() * cr.evaluate_top(&n2).unwrap();
                    assert!(!Field::is_zero(&want));
                    let this = if got == want {
                        1
                    } else if got == -want.clone() {
                        -1
                    } else {
                        panic!("residue of nu is not +-nu(x)nu at chord {c}, n={n}");
                    };
                    match sign {
                        None => sign = Some(this),
                        Some(s) => assert_eq!(s, this, "inconsistent sign at {c}"),
                    }
                }
            }
        }
    }

    #[test]
    fn nu_trivialisation_sign_law() {
        // pullback of (nu_c, nu', nu'') is (-1)^{(|S'|-1)(|S''|-1)} nu
        for n in 4..=6 {
            let poly = Polygon::standard(n);
            let nu = nu_form(&poly);
            for c in poly.all_chords() {
                let (p1, p2) = poly.split_pieces(c).unwrap();
                let nu_c = nu_form(&Polygon::standard(4));
                let pulled = pullback_trivialisation(
                    &poly,
                    c,
                    &nu_c,
                    &nu_form(&p1.poly),
                    &nu_form(&p2.poly),
                )
                .unwrap();
                let exp = (p1.poly.len() - 1) * (p2.poly.len() - 1);
                let want = if exp % 2 == 0 { nu.clone() } else { nu.neg() };
                assert!(forms_equal(&poly, &pulled, &want, 3), "n = {n}, chord {c}");
            }
        }
    }

    /// Transfers a monomial living on a contracted piece (with cut label
    /// `from_cut`) to the matching edge subset of a larger piece whose cut
    /// label is `to_cut`, by aligning the cyclic edge sequences.
    fn transfer_monomial(
        from: &Polygon,
        from_cut: EdgeLabel,
        to_cut: EdgeLabel,
        sub: &[EdgeLabel],
        m: &[Chord],
    ) -> Vec<Chord> {
        let relabeled: Vec<EdgeLabel> = from
            .edges()
            .iter()
            .map(|&e| if e == from_cut { to_cut } else { e })
            .collect();
        let k = sub.len();
        assert_eq!(relabeled.len(), k);
        let rot = (0..k)
            .find(|&r| (0..k).all(|i| relabeled[(i + r) % k] == sub[i]))
            .expect("cyclic alignment exists");
        let shift = |v: usize| (v + k - rot) % k;
        m.iter().map(|c| Chord::raw(shift(c.a), shift(c.b))).collect()
    }

    #[test]
    fn residue_functoriality_square() {
        // pulling back then taking a residue equals taking the residue then
        // pulling back along the induced maps (random forms, N = 6)
        let n_amb = 6usize;
        let poly = Polygon::standard(n_amb);
        let target: BTreeSet<EdgeLabel> = [1, 2, 4, 5, 6].into_iter().collect();
        let (tp, map) = poly.forgetful_chord_map(&target).unwrap();
        let is_cut = |e: EdgeLabel| e as usize > n_amb;
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for (c, img) in map.iter().filter(|(_, i)| i.is_some()) {
            let cp = img.unwrap();
            for _ in 0..2 {
                let mut w = ChordForm::zero();
                let tch = tp.all_chords();
                for (i, &d1) in tch.iter().enumerate() {
                    for &d2 in &tch[i + 1..] {
                        if rng.gen_bool(0.6) {
                            w.add_term(vec![d1, d2], rat(rng.gen_range(-4..=4), 1));
                        }
                    }
                }
                // path 1: pull back to S, residue along c
                let ws = pullback_forgetful(&poly, &target, &w).unwrap();
                let r1 = residue(&poly, &ws, *c).unwrap();
                // path 2: residue along c' in T, then pull the factors back
                // along the induced forgetful maps of the pieces
                let r2 = residue(&tp, &w, cp).unwrap();
                let (s1, s2) = poly.split_pieces(*c).unwrap();
                let s1cut = *s1.poly.edges().iter().find(|&&e| is_cut(e)).unwrap();
                let s2cut = *s2.poly.edges().iter().find(|&&e| is_cut(e)).unwrap();
                // match T-pieces to S-pieces by outer-edge content
                let t_outer =
                    |p: &Polygon| -> BTreeSet<EdgeLabel> {
                        p.edges().iter().copied().filter(|&e| !is_cut(e)).collect()
                    };
                let s1outer: BTreeSet<EdgeLabel> = t_outer(&s1.poly);
                let aligned = t_outer(&r2.left.poly).is_subset(&s1outer);
                let (tl, tr, swap_sign) = if aligned {
                    (&r2.left, &r2.right, 1i64)
                } else {
                    // swap tensor factors: Koszul sign from the piece degrees
                    let dl = r2.left.poly.len() - 3;
                    let dr = r2.right.poly.len() - 3;
                    (&r2.right, &r2.left, if (dl * dr) % 2 == 0 { 1 } else { -1 })
                };
                let tlcut = *tl.poly.edges().iter().find(|&&e| is_cut(e)).unwrap();
                let trcut = *tr.poly.edges().iter().find(|&&e| is_cut(e)).unwrap();
                let tgt1: BTreeSet<EdgeLabel> = s1
                    .poly
                    .edges()
                    .iter()
                    .copied()
                    .filter(|&e| e == s1cut || target.contains(&e))
                    .collect();
                let tgt2: BTreeSet<EdgeLabel> = s2
                    .poly
                    .edges()
                    .iter()
                    .copied()
                    .filter(|&e| e == s2cut || target.contains(&e))
                    .collect();
                let sub1: Vec<EdgeLabel> = s1
                    .poly
                    .edges()
                    .iter()
                    .copied()
                    .filter(|e| tgt1.contains(e))
                    .collect();
                let sub2: Vec<EdgeLabel> = s2
                    .poly
                    .edges()
                    .iter()
                    .copied()
                    .filter(|e| tgt2.contains(e))
                    .collect();
                let mut lhs: BTreeMap<(Vec<Chord>, Vec<Chord>), Rat> = BTreeMap::new();
                for ((ml, mr), v) in &r2.terms {
                    let (ml, mr) = if aligned { (ml, mr) } else { (mr, ml) };
                    let mut f1 = ChordForm::zero();
                    f1.add_term(
                        transfer_monomial(&tl.poly, tlcut, s1cut, &sub1, ml),
                        <Rat as Field>::one(),
                    );
                    let mut f2 = ChordForm::zero();
                    f2.add_term(
                        transfer_monomial(&tr.poly, trcut, s2cut, &sub2, mr),
                        <Rat as Field>::one(),
                    );
                    let a = pullback_forgetful(&s1.poly, &tgt1, &f1).unwrap();
                    let b = pullback_forgetful(&s2.poly, &tgt2, &f2).unwrap();
                    for (ma, va) in &a.terms {
                        for (mb, vb) in &b.terms {
                            let e = lhs
                                .entry((ma.clone(), mb.clone()))
                                .or_insert_with(<Rat as Field>::zero);
                            *e += v * va * vb * rat_int(swap_sign);
                        }
                    }
                }
                lhs.retain(|_, v| !Field::is_zero(v));
                assert_eq!(r1.terms, lhs, "chord {c} over {cp}");
            }
        }
    }

    #[test]
    fn parke_taylor_identity_and_value() {
        // identity permutation gives +- nu
        for n in 1..=3 {
            let sigma: Vec<usize> = (1..=n).collect();
            let pt = parke_taylor_form(n, &sigma).unwrap();
            let nu = nu_form(&Polygon::standard(n + 3));
            assert!(pt == nu || pt == nu.neg(), "n = {n}");
        }
        // n = 2, sigma = (2 1): value at (1/3, 1/5)
        let pt = parke_taylor_form(2, &[2, 1]).unwrap();
        let t = vec![rat(1, 3), rat(1, 5)];
        let chart = Chart::simplicial(&t);
        let got = chart.evaluate_top(&pt).unwrap();
        // 1/((t2 - 0)(t1 - t2)(1 - t1))
        let want = (<Rat as Field>::one()
            / (t[1].clone() * (t[0].clone() - t[1].clone()) * (rat_int(1) - t[0].clone())))
        .clone();
        assert_eq!(got, want);
    }

    #[test]
    fn flat_extraction_anticommutes() {
        // extracting two distinct non-crossing chords in either order flips sign
        let m = vec![
            Chord::raw(0, 2),
            Chord::raw(0, 3),
            Chord::raw(4, 6),
        ];
        let c1 = Chord::raw(0, 2);
        let c2 = Chord::raw(4, 6);
        let ex = |m: &[Chord], c: Chord| -> (Vec<Chord>, i32) {
            let p = m.iter().position(|&d| d == c).unwrap();
            let rest: Vec<Chord> = m.iter().copied().filter(|&d| d != c).collect();
            (rest, if p % 2 == 0 { 1 } else { -1 })
        };
        let (m1, s1) = ex(&m, c1);
        let (_, s2) = ex(&m1, c2);
        let (m3, s3) = ex(&m, c2);
        let (_, s4) = ex(&m3, c1);
        assert_eq!(s1 * s2, -(s3 * s4));
    }
}
