//! Root systems of the compact simple Lie algebras with exact coordinates.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qnum::{QNum, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E6,
    E7,
    E8,
    F4,
    G2,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::A,
        Family::B,
        Family::C,
        Family::D,
        Family::E6,
        Family::E7,
        Family::E8,
        Family::F4,
        Family::G2,
    ];

    pub fn is_classical(self) -> bool {
        matches!(self, Family::A | Family::B | Family::C | Family::D)
    }

    /// Fixed rank of an exceptional family.
    pub fn fixed_rank(self) -> Option<usize> {
        match self {
            Family::E6 => Some(6),
            Family::E7 => Some(7),
            Family::E8 => Some(8),
            Family::F4 => Some(4),
            Family::G2 => Some(2),
            _ => None,
        }
    }

    /// Smallest rank accepted by [`build_root_system`].
    pub fn min_rank(self) -> usize {
        match self {
            Family::A => 1,
            Family::B => 2,
            Family::C => 3,
            Family::D => 4,
            f => f.fixed_rank().unwrap(),
        }
    }

    pub fn valid_rank(self, rank: usize) -> bool {
        match self.fixed_rank() {
            Some(r) => r == rank,
            None => rank >= self.min_rank(),
        }
    }

    pub fn ambient_dim(self, rank: usize) -> usize {
        match self {
            Family::A => rank + 1,
            _ => rank,
        }
    }

    pub fn label(self, rank: usize) -> String {
        match self.fixed_rank() {
            Some(_) => self.to_string(),
            None => format!("{self}{rank}"),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
            Family::E6 => "E6",
            Family::E7 => "E7",
            Family::E8 => "E8",
            Family::F4 => "F4",
            Family::G2 => "G2",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            "D" => Ok(Family::D),
            "E6" => Ok(Family::E6),
            "E7" => Ok(Family::E7),
            "E8" => Ok(Family::E8),
            "F4" => Ok(Family::F4),
            "G2" => Ok(Family::G2),
            other => Err(Error::UnsupportedRootSystem(format!("unknown family {other:?}"))),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RootVector {
    pub coords: Vec<QNum>,
}

impl RootVector {
    pub fn new(coords: Vec<QNum>) -> Self {
        RootVector { coords }
    }

    pub fn zero(dim: usize) -> Self {
        RootVector { coords: vec![QNum::zero(); dim] }
    }

    /// Unit vector `e_i` (0-based index).
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = RootVector::zero(dim);
        v.coords[i] = QNum::one();
        v
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        RootVector { coords: xs.iter().map(|&x| QNum::int(x)).collect() }
    }

    pub fn from_fracs(xs: &[(i64, i64)]) -> Self {
        RootVector { coords: xs.iter().map(|&(p, q)| QNum::frac(p, q)).collect() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(QNum::is_zero)
    }

    pub fn dot(&self, o: &RootVector) -> QNum {
        self.coords.iter().zip(&o.coords).map(|(x, y)| *x * *y).sum()
    }

    pub fn norm2(&self) -> QNum {
        self.dot(self)
    }

    pub fn scale(&self, k: QNum) -> RootVector {
        RootVector { coords: self.coords.iter().map(|x| *x * k).collect() }
    }

    pub fn scale_rational(&self, k: Rational) -> RootVector {
        RootVector { coords: self.coords.iter().map(|x| *x * k).collect() }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(QNum::to_f64).collect()
    }

    /// First nonzero coordinate is positive.
    pub fn is_lex_positive(&self) -> bool {
        self.coords.iter().find(|x| !x.is_zero()).map_or(false, |x| x.signum() > 0)
    }

    /// Representative of `±self` whose first nonzero coordinate is positive.
    pub fn canonical_sign(&self) -> RootVector {
        if self.is_lex_positive() || self.is_zero() {
            self.clone()
        } else {
            -self.clone()
        }
    }

    /// Projection of an A_n ambient vector onto the sum-zero hyperplane.
    pub fn sum_zero_part(&self) -> RootVector {
        let n = self.coords.len() as i64;
        let mean = self.coords.iter().copied().sum::<QNum>() * Rational::new(1, n as i128);
        RootVector { coords: self.coords.iter().map(|x| *x - mean).collect() }
    }
}

impl fmt::Debug for RootVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for RootVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl Add for &RootVector {
    type Output = RootVector;
    fn add(self, o: &RootVector) -> RootVector {
        RootVector { coords: self.coords.iter().zip(&o.coords).map(|(x, y)| *x + *y).collect() }
    }
}

impl Sub for &RootVector {
    type Output = RootVector;
    fn sub(self, o: &RootVector) -> RootVector {
        RootVector { coords: self.coords.iter().zip(&o.coords).map(|(x, y)| *x - *y).collect() }
    }
}

impl Add for RootVector {
    type Output = RootVector;
    fn add(self, o: RootVector) -> RootVector {
        &self + &o
    }
}

impl Sub for RootVector {
    type Output = RootVector;
    fn sub(self, o: RootVector) -> RootVector {
        &self - &o
    }
}

impl Neg for RootVector {
    type Output = RootVector;
    fn neg(self) -> RootVector {
        RootVector { coords: self.coords.into_iter().map(|x| -x).collect() }
    }
}

impl Neg for &RootVector {
    type Output = RootVector;
    fn neg(self) -> RootVector {
        -self.clone()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RootSystem {
    pub family: Family,
    pub rank: usize,
    pub ambient_dim: usize,
    pub roots: Vec<RootVector>,
    #[serde(skip)]
    index: HashMap<RootVector, usize>,
}

impl PartialEq for RootSystem {
    fn eq(&self, o: &Self) -> bool {
        self.family == o.family && self.rank == o.rank && self.roots == o.roots
    }
}

impl RootSystem {
    fn from_roots(family: Family, rank: usize, ambient_dim: usize, mut roots: Vec<RootVector>) -> Self {
        roots.sort();
        roots.dedup();
        let index = roots.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
        RootSystem { family, rank, ambient_dim, roots, index }
    }

    /// Rebuilds the lookup table after deserialization.
    pub fn reindex(&mut self) {
        self.index = self.roots.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn label(&self) -> String {
        self.family.label(self.rank)
    }

    pub fn index_of(&self, v: &RootVector) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn contains(&self, v: &RootVector) -> bool {
        self.index.contains_key(v)
    }

    pub fn positive_roots(&self) -> Vec<RootVector> {
        self.roots.iter().filter(|r| r.is_lex_positive()).cloned().collect()
    }

    /// Simple roots for the lexicographic positivity.
    pub fn simple_roots(&self) -> Vec<RootVector> {
        let pos = self.positive_roots();
        pos.iter()
            .filter(|r| {
                !pos.iter().any(|a| {
                    let b = *r - a;
                    b.is_lex_positive() && self.contains(&b)
                })
            })
            .cloned()
            .collect()
    }

    pub fn max_norm2(&self) -> QNum {
        self.roots.iter().map(RootVector::norm2).max().unwrap_or_else(QNum::zero)
    }

    pub fn is_long(&self, r: &RootVector) -> bool {
        r.norm2() == self.max_norm2()
    }

    fn check_dim(&self, v: &RootVector) -> Result<()> {
        if v.ambient_dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim, found: v.ambient_dim() });
        }
        Ok(())
    }
}

/// Roots of a compact simple algebra in the standard orthonormal coordinates.
pub fn build_root_system(family: Family, rank: usize) -> Result<RootSystem> {
    if !family.valid_rank(rank) {
        return Err(Error::UnsupportedRootSystem(format!("{family} with rank {rank}")));
    }
    Ok(root_system_unchecked(family, rank))
}

/// Like [`build_root_system`] but also admits the low classical ranks
/// (B1, C1, C2, D2, D3) that appear inside matrix realizations.
pub fn build_root_system_any_rank(family: Family, rank: usize) -> Result<RootSystem> {
    let ok = match family.fixed_rank() {
        Some(r) => r == rank,
        None => match family {
            Family::D => rank >= 2,
            _ => rank >= 1,
        },
    };
    if !ok {
        return Err(Error::UnsupportedRootSystem(format!("{family} with rank {rank}")));
    }
    Ok(root_system_unchecked(family, rank))
}

fn pm_pairs(n: usize, dim: usize) -> Vec<RootVector> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for (si, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let mut v = RootVector::zero(dim);
                v.coords[i] = QNum::int(si);
                v.coords[j] = QNum::int(sj);
                out.push(v);
            }
        }
    }
    out
}

fn root_system_unchecked(family: Family, rank: usize) -> RootSystem {
    let n = rank;
    let dim = family.ambient_dim(rank);
    let mut roots = Vec::new();
    let half = QNum::frac(1, 2);
    match family {
        Family::A => {
            for i in 0..=n {
                for j in 0..=n {
                    if i != j {
                        let mut v = RootVector::zero(dim);
                        v.coords[i] = QNum::one();
                        v.coords[j] = QNum::int(-1);
                        roots.push(v);
                    }
                }
            }
        }
        Family::B | Family::C | Family::F4 => {
            let short = if family == Family::C { 2 } else { 1 };
            for i in 0..n {
                for s in [1, -1] {
                    let mut v = RootVector::zero(dim);
                    v.coords[i] = QNum::int(s * short);
                    roots.push(v);
                }
            }
            roots.extend(pm_pairs(n, dim));
            if family == Family::F4 {
                for mask in 0..16u32 {
                    let coords = (0..4).map(|k| if mask >> k & 1 == 1 { -half } else { half }).collect();
                    roots.push(RootVector::new(coords));
                }
            }
        }
        Family::D => roots.extend(pm_pairs(n, dim)),
        Family::E6 => {
            roots.extend(pm_pairs(5, dim));
            let last = QNum::sqrt3() * half;
            for mask in 0..64u32 {
                if mask.count_ones() % 2 == 1 {
                    // bit k set means a plus sign on coordinate k
                    let coords = (0..6)
                        .map(|k| {
                            let plus = mask >> k & 1 == 1;
                            let x = if k == 5 { last } else { half };
                            if plus {
                                x
                            } else {
                                -x
                            }
                        })
                        .collect();
                    roots.push(RootVector::new(coords));
                }
            }
        }
        Family::E7 => {
            roots.extend(pm_pairs(6, dim));
            for s in [1, -1] {
                let mut v = RootVector::zero(dim);
                v.coords[6] = QNum::sqrt2() * QNum::int(s);
                roots.push(v);
            }
            let last = QNum::sqrt2() * half;
            for mask in 0..128u32 {
                if (mask & 63).count_ones() % 2 == 1 {
                    let coords = (0..7)
                        .map(|k| {
                            let plus = mask >> k & 1 == 1;
                            let x = if k == 6 { last } else { half };
                            if plus {
                                x
                            } else {
                                -x
                            }
                        })
                        .collect();
                    roots.push(RootVector::new(coords));
                }
            }
        }
        Family::E8 => {
            roots.extend(pm_pairs(8, dim));
            for mask in 0..256u32 {
                if mask.count_ones() % 2 == 0 {
                    let coords = (0..8).map(|k| if mask >> k & 1 == 1 { half } else { -half }).collect();
                    roots.push(RootVector::new(coords));
                }
            }
        }
        Family::G2 => {
            let r3 = QNum::sqrt3();
            for s in [1, -1] {
                roots.push(RootVector::new(vec![r3 * QNum::int(s), QNum::zero()]));
                roots.push(RootVector::new(vec![QNum::zero(), QNum::int(s)]));
                for t in [1, -1] {
                    roots.push(RootVector::new(vec![r3 * QNum::frac(s, 2), QNum::frac(3 * t, 2)]));
                    roots.push(RootVector::new(vec![r3 * QNum::frac(s, 2), QNum::frac(t, 2)]));
                }
            }
        }
    }
    RootSystem::from_roots(family, rank, dim, roots)
}

pub fn is_root(rs: &RootSystem, v: &RootVector) -> Result<bool> {
    rs.check_dim(v)?;
    Ok(rs.contains(v))
}

/// Angles that occur between roots, plus a catch-all carrying `cos²` and sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Angle {
    Zero,
    Pi6,
    Pi4,
    Pi3,
    Pi2,
    TwoPi3,
    ThreePi4,
    FivePi6,
    Pi,
    Other,
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Angle::Zero => "0",
            Angle::Pi6 => "π/6",
            Angle::Pi4 => "π/4",
            Angle::Pi3 => "π/3",
            Angle::Pi2 => "π/2",
            Angle::TwoPi3 => "2π/3",
            Angle::ThreePi4 => "3π/4",
            Angle::FivePi6 => "5π/6",
            Angle::Pi => "π",
            Angle::Other => "other",
        };
        f.write_str(s)
    }
}

/// Exact angle between two nonzero vectors, via the sign of the inner product
/// and the rational-or-surd value of `cos²`.
pub fn angle(u: &RootVector, v: &RootVector) -> Result<Angle> {
    if u.ambient_dim() != v.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: u.ambient_dim(), found: v.ambient_dim() });
    }
    if u.is_zero() || v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let d = u.dot(v);
    let cos2 = d * d / (u.norm2() * v.norm2());
    let pos = d.signum() > 0;
    let tag = if cos2 == QNum::zero() {
        Angle::Pi2
    } else if cos2 == QNum::frac(1, 4) {
        if pos {
            Angle::Pi3
        } else {
            Angle::TwoPi3
        }
    } else if cos2 == QNum::frac(1, 2) {
        if pos {
            Angle::Pi4
        } else {
            Angle::ThreePi4
        }
    } else if cos2 == QNum::frac(3, 4) {
        if pos {
            Angle::Pi6
        } else {
            Angle::FivePi6
        }
    } else if cos2 == QNum::one() {
        if pos {
            Angle::Zero
        } else {
            Angle::Pi
        }
    } else {
        Angle::Other
    };
    Ok(tag)
}

/// Reflection of `v` in the hyperplane orthogonal to an arbitrary nonzero vector.
pub fn reflect(alpha: &RootVector, v: &RootVector) -> RootVector {
    let k = QNum::int(2) * v.dot(alpha) / alpha.norm2();
    v - &alpha.scale(k)
}

pub fn weyl_reflect(rs: &RootSystem, alpha: &RootVector, v: &RootVector) -> Result<RootVector> {
    rs.check_dim(alpha)?;
    rs.check_dim(v)?;
    if !rs.contains(alpha) {
        return Err(Error::NotARoot(alpha.to_string()));
    }
    Ok(reflect(alpha, v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootSum {
    Neither,
    PlusOnly,
    MinusOnly,
    Both,
}

pub fn root_sum_status(rs: &RootSystem, alpha: &RootVector, beta: &RootVector) -> Result<RootSum> {
    for x in [alpha, beta] {
        rs.check_dim(x)?;
        if !rs.contains(x) {
            return Err(Error::NotARoot(x.to_string()));
        }
    }
    if alpha == beta || *alpha == -beta {
        return Err(Error::Collinear);
    }
    let plus = rs.contains(&(alpha + beta));
    let minus = rs.contains(&(alpha - beta));
    Ok(match (plus, minus) {
        (false, false) => RootSum::Neither,
        (true, false) => RootSum::PlusOnly,
        (false, true) => RootSum::MinusOnly,
        (true, true) => RootSum::Both,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(dim: usize, terms: &[(usize, i64)]) -> RootVector {
        let mut v = RootVector::zero(dim);
        for &(i, c) in terms {
            v.coords[i - 1] = v.coords[i - 1] + QNum::int(c);
        }
        v
    }

    #[test]
    fn a3_has_twelve_roots() {
        let rs = build_root_system(Family::A, 3).unwrap();
        assert_eq!(rs.len(), 12);
        assert!(rs.roots.iter().all(|r| r.coords.iter().copied().sum::<QNum>().is_zero()));
    }

    #[test]
    fn g2_and_f4_samples() {
        let g2 = build_root_system(Family::G2, 2).unwrap();
        assert!(g2.contains(&RootVector::from_ints(&[0, 1])));
        assert!(g2.contains(&RootVector::from_ints(&[0, -1])));
        let f4 = build_root_system(Family::F4, 4).unwrap();
        assert!(f4.contains(&RootVector::from_fracs(&[(1, 2); 4])));
    }

    #[test]
    fn membership_examples() {
        let b3 = build_root_system(Family::B, 3).unwrap();
        let c3 = build_root_system(Family::C, 3).unwrap();
        assert!(is_root(&b3, &e(3, &[(1, 1), (2, 1)])).unwrap());
        assert!(!is_root(&b3, &e(3, &[(1, 2)])).unwrap());
        assert!(is_root(&c3, &e(3, &[(1, 2)])).unwrap());
        assert!(is_root(&b3, &RootVector::zero(4)).is_err());
    }

    #[test]
    fn rank_gate() {
        assert!(build_root_system(Family::C, 2).is_err());
        assert!(build_root_system(Family::D, 3).is_err());
        assert!(build_root_system(Family::E6, 5).is_err());
        assert!(build_root_system_any_rank(Family::C, 2).is_ok());
        assert!(build_root_system_any_rank(Family::D, 3).is_ok());
    }

    #[test]
    fn angle_examples() {
        let a = angle(&e(4, &[(1, 1), (2, -1)]), &e(4, &[(2, 1), (3, -1)])).unwrap();
        assert_eq!(a, Angle::TwoPi3);
        let b = angle(&e(2, &[(1, 1), (2, 1)]), &e(2, &[(2, 1), (1, -1)])).unwrap();
        assert_eq!(b, Angle::Pi2);
        let long = RootVector::new(vec![QNum::sqrt3(), QNum::zero()]);
        let short = RootVector::new(vec![QNum::sqrt3() * QNum::frac(1, 2), QNum::frac(1, 2)]);
        assert_eq!(angle(&long, &short).unwrap(), Angle::Pi6);
        assert_eq!(angle(&long, &RootVector::zero(2)), Err(Error::ZeroVector));
    }

    #[test]
    fn reflection_examples() {
        let a3 = build_root_system(Family::A, 3).unwrap();
        let alpha = e(4, &[(1, 1), (2, -1)]);
        assert_eq!(weyl_reflect(&a3, &alpha, &e(4, &[(1, 1)])).unwrap(), e(4, &[(2, 1)]));
        assert_eq!(weyl_reflect(&a3, &alpha, &alpha).unwrap(), -&alpha);
        let b3 = build_root_system(Family::B, 3).unwrap();
        let r = weyl_reflect(&b3, &e(3, &[(1, 1)]), &e(3, &[(1, 1), (2, 1)])).unwrap();
        assert_eq!(r, e(3, &[(1, -1), (2, 1)]));
        assert!(weyl_reflect(&b3, &e(3, &[(1, 2)]), &alpha).is_err());
    }

    #[test]
    fn root_sum_examples() {
        let a3 = build_root_system(Family::A, 3).unwrap();
        let b3 = build_root_system(Family::B, 3).unwrap();
        let c3 = build_root_system(Family::C, 3).unwrap();
        let s = root_sum_status(&a3, &e(4, &[(1, 1), (2, -1)]), &e(4, &[(2, 1), (3, -1)])).unwrap();
        assert_eq!(s, RootSum::PlusOnly);
        let s = root_sum_status(&b3, &e(3, &[(1, 1), (2, 1)]), &e(3, &[(1, 1), (2, -1)])).unwrap();
        assert_eq!(s, RootSum::Neither);
        let s = root_sum_status(&c3, &e(3, &[(1, 1), (2, 1)]), &e(3, &[(1, 1), (2, -1)])).unwrap();
        assert_eq!(s, RootSum::Both);
        let x = e(3, &[(1, 1)]);
        assert_eq!(root_sum_status(&b3, &x, &-&x), Err(Error::Collinear));
    }

    #[test]
    fn simple_root_counts() {
        for (f, r) in [(Family::A, 4), (Family::B, 3), (Family::C, 3), (Family::D, 5), (Family::E6, 6), (Family::E7, 7), (Family::E8, 8), (Family::F4, 4), (Family::G2, 2)] {
            let rs = build_root_system(f, r).unwrap();
            assert_eq!(rs.simple_roots().len(), r, "{f}{r}");
        }
    }

    #[test]
    fn json_shape() {
        let rs = build_root_system(Family::G2, 2).unwrap();
        let v: serde_json::Value = serde_json::to_value(&rs).unwrap();
        assert_eq!(v["family"], "G2");
        assert_eq!(v["roots"].as_array().unwrap().len(), 12);
        assert!(v["roots"][0][0]["a"].is_string());
    }
}
