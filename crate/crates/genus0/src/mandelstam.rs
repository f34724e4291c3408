//! Momentum-conserving Mandelstam variables and their chord coordinates.
//!
//! The space of solutions of the momentum conservation equations
//! `sum_j s_ij = 0` is coordinatised by one variable `s_c` per chord of the
//! dihedral polygon. For the chord `{a, b}` (vertex convention of
//! [`crate::polygon`]) the chord variable is the sum of `s_xy` over all pairs
//! of marked points in the run `a+1 ..= b`, and conversely `s_ij` is a signed
//! sum of four chord variables with degenerate chords read as zero.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::polygon::{Chord, Polygon};
use crate::scalar::{rat_distance_to_integer, Field, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MandelstamError {
    ShapeMismatch,
    MomentumViolation,
    TooLarge(usize),
}

impl std::fmt::Display for MandelstamError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MandelstamError::ShapeMismatch => write!(f, "matrix is not square and symmetric"),
            MandelstamError::MomentumViolation => write!(f, "momentum conservation violated"),
            MandelstamError::TooLarge(n) => {
                write!(f, "subset enumeration capped at N <= 10, got {n}")
            }
        }
    }
}

impl std::error::Error for MandelstamError {}

/// Symmetric matrix of Mandelstam variables `s_ij` with zero diagonal,
/// indexed by marked points `1..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct MandelstamMatrix {
    n: usize,
    /// Upper triangle: entry for `(i, j)` with `1 <= i < j <= N`.
    entries: BTreeMap<(usize, usize), Rat>,
}

/// JSON encoding: `{"N": n, "s": [["0", "1/2", ...], ...]}` with exact
/// rationals rendered as strings.
impl Serialize for MandelstamMatrix {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire {
            #[serde(rename = "N")]
            n: usize,
            s: Vec<Vec<String>>,
        }
        let rows = self
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(|v| v.to_string()).collect())
            .collect();
        Wire { n: self.n, s: rows }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for MandelstamMatrix {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            #[serde(rename = "N")]
            n: usize,
            s: Vec<Vec<String>>,
        }
        let w = Wire::deserialize(de)?;
        if w.s.len() != w.n {
            return Err(D::Error::custom("row count does not match N"));
        }
        let rows: Result<Vec<Vec<Rat>>, _> = w
            .s
            .iter()
            .map(|r| r.iter().map(|v| Rat::from_str(v)).collect())
            .collect();
        let rows = rows.map_err(|e| D::Error::custom(format!("bad rational: {e}")))?;
        MandelstamMatrix::from_rows(&rows).map_err(|e| D::Error::custom(e.to_string()))
    }
}

impl MandelstamMatrix {
    pub fn zero(n: usize) -> Self {
        MandelstamMatrix {
            n,
            entries: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Rat {
        if i == j {
            return <Rat as Field>::zero();
        }
        let key = if i < j { (i, j) } else { (j, i) };
        self.entries
            .get(&key)
            .cloned()
            .unwrap_or_else(<Rat as Field>::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        assert!(i != j && i >= 1 && j >= 1 && i <= self.n && j <= self.n);
        let key = if i < j { (i, j) } else { (j, i) };
        if Field::is_zero(&v) {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, v);
        }
    }

    /// Builds a matrix from a dense row-major table; checks symmetry and
    /// zero diagonal.
    pub fn from_rows(rows: &[Vec<Rat>]) -> Result<Self, MandelstamError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(MandelstamError::ShapeMismatch);
        }
        let mut m = MandelstamMatrix::zero(n);
        for i in 0..n {
            if !Field::is_zero(&rows[i][i]) {
                return Err(MandelstamError::ShapeMismatch);
            }
            for j in (i + 1)..n {
                if rows[i][j] != rows[j][i] {
                    return Err(MandelstamError::ShapeMismatch);
                }
                m.set(i + 1, j + 1, rows[i][j].clone());
            }
        }
        Ok(m)
    }

    pub fn to_rows(&self) -> Vec<Vec<Rat>> {
        (1..=self.n)
            .map(|i| (1..=self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Row sums all vanish, exactly.
    pub fn conserves_momentum(&self) -> bool {
        (1..=self.n).all(|i| {
            let sum = (1..=self.n)
                .map(|j| self.get(i, j))
                .fold(<Rat as Field>::zero(), |a, b| a + b);
            Field::is_zero(&sum)
        })
    }

    /// Sum of `s_xy` over unordered pairs inside the point set `set`.
    pub fn subset_sum(&self, set: &[usize]) -> Rat {
        let mut sum = <Rat as Field>::zero();
        for (k, &x) in set.iter().enumerate() {
            for &y in &set[k + 1..] {
                sum += self.get(x, y);
            }
        }
        sum
    }

    /// Genericity test: for every point subset `I` with `|I| >= 2` and
    /// `|complement| >= 2`, the subset sum must stay away from the integers.
    /// `tol = None` demands the exact condition (sum not an integer).
    /// Violating subsets are returned as witnesses.
    pub fn is_generic(
        &self,
        tol: Option<&Rat>,
    ) -> Result<(bool, Vec<Vec<usize>>), MandelstamError> {
        if self.n > 10 {
            return Err(MandelstamError::TooLarge(self.n));
        }
        let mut witnesses = Vec::new();
        // iterate subsets by bitmask; point 1 is always a member so each
        // partition is seen once
        for mask in 0u32..(1 << self.n) {
            if mask & 1 == 0 {
                continue;
            }
            let set: Vec<usize> = (0..self.n)
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| k + 1)
                .collect();
            if set.len() < 2 || self.n - set.len() < 2 {
                continue;
            }
            let d = rat_distance_to_integer(&self.subset_sum(&set));
            let bad = match tol {
                None => Field::is_zero(&d),
                Some(t) => d <= *t,
            };
            if bad {
                witnesses.push(set);
            }
        }
        Ok((witnesses.is_empty(), witnesses))
    }
}

/// `dim V_N = N(N-3)/2`.
pub fn dimension_vn(n: usize) -> usize {
    assert!(n >= 3);
    n * (n - 3) / 2
}

/// Chord coordinates: an assignment `Chord -> value`.
pub type ChordVariables<T> = BTreeMap<Chord, T>;

/// Chord-variable sum for one chord of the standard `n`-gon: the sum of
/// `s_xy` over pairs of points in the run `a+1 ..= b`.
pub fn chord_sum<T: Field>(get: &impl Fn(usize, usize) -> T, c: Chord) -> T {
    let mut sum = T::zero();
    for x in (c.a + 1)..=c.b {
        for y in (x + 1)..=c.b {
            sum = sum.add(&get(x, y));
        }
    }
    sum
}

/// Converts a momentum-conserving matrix to chord variables.
pub fn to_chord_variables(
    m: &MandelstamMatrix,
    poly: &Polygon,
) -> Result<ChordVariables<Rat>, MandelstamError> {
    if poly.len() != m.n() {
        return Err(MandelstamError::ShapeMismatch);
    }
    if !m.conserves_momentum() {
        return Err(MandelstamError::MomentumViolation);
    }
    let get = |x: usize, y: usize| m.get(x, y);
    Ok(poly
        .all_chords()
        .into_iter()
        .map(|c| (c, chord_sum(&get, c)))
        .collect())
}

/// Inverse of [`to_chord_variables`]; degenerate chord symbols (adjacent or
/// equal vertices) are read as zero.
pub fn from_chord_variables(vars: &ChordVariables<Rat>, poly: &Polygon) -> MandelstamMatrix {
    let n = poly.len();
    let chord_val = |x: i64, y: i64| -> Rat {
        let xm = x.rem_euclid(n as i64) as usize;
        let ym = y.rem_euclid(n as i64) as usize;
        match Chord::new(xm, ym, n) {
            Ok(c) => vars.get(&c).cloned().unwrap_or_else(<Rat as Field>::zero),
            Err(_) => <Rat as Field>::zero(),
        }
    };
    let mut m = MandelstamMatrix::zero(n);
    for i in 1..=n {
        for j in (i + 1)..=n {
            let (ii, jj) = (i as i64, j as i64);
            let v = chord_val(ii, jj - 1) + chord_val(ii - 1, jj)
                - chord_val(ii - 1, jj - 1)
                - chord_val(ii, jj);
            m.set(i, j, v);
        }
    }
    m
}

/// `s_{0,i}` is an alias for `s_{i,N}`: the simplicial gauge places the last
/// marked point at 0.
pub fn s0(m: &MandelstamMatrix, i: usize) -> Rat {
    m.get(i, m.n())
}

/// The (s, t) family at N = 4, arranged so the open-string integrand is
/// `x^s (1-x)^t`: chord `(1,3)` carries `s`, chord `(0,2)` carries `t`.
pub fn four_point_st(s: Rat, t: Rat) -> MandelstamMatrix {
    let mut m = MandelstamMatrix::zero(4);
    let u = -(s.clone() + t.clone());
    m.set(1, 4, s.clone());
    m.set(2, 3, s);
    m.set(1, 2, t.clone());
    m.set(3, 4, t);
    m.set(1, 3, u.clone());
    m.set(2, 4, u);
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_chord_vars(n: usize, rng: &mut ChaCha8Rng) -> ChordVariables<Rat> {
        Polygon::standard(n)
            .all_chords()
            .into_iter()
            .map(|c| (c, rat(rng.gen_range(-40..=40), rng.gen_range(1..=9))))
            .collect()
    }

    #[test]
    fn dimension_formula() {
        assert_eq!(dimension_vn(3), 0);
        assert_eq!(dimension_vn(4), 2);
        assert_eq!(dimension_vn(7), 14);
    }

    #[test]
    fn momentum_conservation_check() {
        assert!(MandelstamMatrix::zero(5).conserves_momentum());
        let m = four_point_st(rat(1, 3), rat(1, 7));
        assert!(m.conserves_momentum());
        let mut bad = m.clone();
        bad.set(1, 2, rat_int(5));
        assert!(!bad.conserves_momentum());
    }

    #[test]
    fn four_point_chord_variables() {
        let s = rat(2, 5);
        let t = rat(-1, 3);
        let m = four_point_st(s.clone(), t.clone());
        let poly = Polygon::standard(4);
        let vars = to_chord_variables(&m, &poly).unwrap();
        assert_eq!(vars[&Chord::new(1, 3, 4).unwrap()], s);
        assert_eq!(vars[&Chord::new(0, 2, 4).unwrap()], t);
    }

    #[test]
    fn pentagon_single_entry_chord() {
        // chord meeting edges {1,2} and {3,4} = vertices (1,3): value s_23
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let vars = random_chord_vars(5, &mut rng);
        let m = from_chord_variables(&vars, &Polygon::standard(5));
        assert!(m.conserves_momentum());
        let c = Chord::new(1, 3, 5).unwrap();
        let got = chord_sum(&|x, y| m.get(x, y), c);
        assert_eq!(got, m.get(2, 3));
    }

    #[test]
    fn zero_matrix_maps_to_zero() {
        let poly = Polygon::standard(6);
        let vars = to_chord_variables(&MandelstamMatrix::zero(6), &poly).unwrap();
        assert!(vars.values().all(Field::is_zero));
        let m = from_chord_variables(&vars, &poly);
        assert_eq!(m, MandelstamMatrix::zero(6));
    }

    #[test]
    fn roundtrips_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for n in 4..=8 {
            let poly = Polygon::standard(n);
            for _ in 0..25 {
                let vars = random_chord_vars(n, &mut rng);
                let m = from_chord_variables(&vars, &poly);
                assert!(m.conserves_momentum(), "n = {n}");
                let back = to_chord_variables(&m, &poly).unwrap();
                assert_eq!(back, vars, "n = {n}");
                let m2 = from_chord_variables(&back, &poly);
                assert_eq!(m2, m);
            }
        }
    }

    #[test]
    fn nonzero_maps_to_nonzero() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let vars = random_chord_vars(6, &mut rng);
            if vars.values().all(Field::is_zero) {
                continue;
            }
            let m = from_chord_variables(&vars, &Polygon::standard(6));
            let back = to_chord_variables(&m, &Polygon::standard(6)).unwrap();
            assert!(back.values().any(|v| !Field::is_zero(v)));
        }
    }

    #[test]
    fn genericity() {
        let zero = MandelstamMatrix::zero(4);
        let (ok, wit) = zero.is_generic(None).unwrap();
        assert!(!ok);
        assert!(!wit.is_empty());

        let (ok, _) = four_point_st(rat(1, 3), rat(1, 7)).is_generic(None).unwrap();
        assert!(ok);

        let half = four_point_st(rat(1, 2), rat(1, 2));
        let (ok, wit) = half.is_generic(None).unwrap();
        assert!(!ok);
        assert!(wit
            .iter()
            .any(|set| Field::is_zero(&rat_distance_to_integer(&half.subset_sum(set)))));
    }

    #[test]
    fn s0_alias() {
        let m = four_point_st(rat(3, 7), rat(1, 5));
        assert_eq!(s0(&m, 1), m.get(1, 4));
    }
}
