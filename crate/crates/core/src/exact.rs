//! Exact linear algebra on Cartan vectors under a diagonal rational metric.

use crate::qnum::{QNum, Rational};
use crate::rootsys::RootVector;

#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    pub weights: Vec<Rational>,
}

impl Metric {
    pub fn euclidean(dim: usize) -> Self {
        Metric { weights: vec![Rational::from_integer(1); dim] }
    }

    pub fn dot(&self, a: &RootVector, b: &RootVector) -> QNum {
        a.coords.iter().zip(&b.coords).zip(&self.weights).map(|((x, y), w)| *x * *y * *w).sum()
    }

    pub fn norm2(&self, a: &RootVector) -> QNum {
        self.dot(a, a)
    }
}

/// Orthogonal (not normalized) basis of a subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthoBasis {
    pub vecs: Vec<RootVector>,
    norms: Vec<QNum>,
}

impl OrthoBasis {
    pub fn new(metric: &Metric, gens: &[RootVector]) -> Self {
        let mut b = OrthoBasis { vecs: Vec::new(), norms: Vec::new() };
        for g in gens {
            b.push(metric, g);
        }
        b
    }

    /// Adds the component of `v` orthogonal to the current span; returns
    /// whether the span grew.
    pub fn push(&mut self, metric: &Metric, v: &RootVector) -> bool {
        let r = self.residual(metric, v);
        if r.is_zero() {
            return false;
        }
        self.norms.push(metric.norm2(&r));
        self.vecs.push(r);
        true
    }

    pub fn dim(&self) -> usize {
        self.vecs.len()
    }

    pub fn project(&self, metric: &Metric, v: &RootVector) -> RootVector {
        let mut out = RootVector::zero(v.ambient_dim());
        for (b, n) in self.vecs.iter().zip(&self.norms) {
            let c = metric.dot(v, b) / *n;
            if !c.is_zero() {
                out = &out + &b.scale(c);
            }
        }
        out
    }

    pub fn residual(&self, metric: &Metric, v: &RootVector) -> RootVector {
        v - &self.project(metric, v)
    }

    pub fn contains(&self, metric: &Metric, v: &RootVector) -> bool {
        self.residual(metric, v).is_zero()
    }

    /// Orthogonal complement of `self` inside the span of `whole`.
    pub fn complement_in(&self, metric: &Metric, whole: &[RootVector]) -> OrthoBasis {
        let mut out = OrthoBasis { vecs: Vec::new(), norms: Vec::new() };
        for w in whole {
            let r = self.residual(metric, w);
            out.push(metric, &r);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_and_complement() {
        let m = Metric::euclidean(3);
        let sub = OrthoBasis::new(&m, &[RootVector::from_ints(&[1, 1, 0])]);
        let p = sub.project(&m, &RootVector::from_ints(&[1, 0, 0]));
        assert_eq!(p, RootVector::from_fracs(&[(1, 2), (1, 2), (0, 1)]));
        let whole: Vec<_> = (0..3).map(|i| RootVector::unit(3, i)).collect();
        let c = sub.complement_in(&m, &whole);
        assert_eq!(c.dim(), 2);
        for v in &c.vecs {
            assert!(m.dot(v, &sub.vecs[0]).is_zero());
        }
    }

    #[test]
    fn weighted_metric_changes_orthogonality() {
        let m = Metric { weights: vec![Rational::from_integer(1), Rational::from_integer(2)] };
        let sub = OrthoBasis::new(&m, &[RootVector::from_ints(&[1, 1])]);
        let c = sub.complement_in(&m, &[RootVector::unit(2, 0), RootVector::unit(2, 1)]);
        assert_eq!(c.dim(), 1);
        let v = &c.vecs[0];
        assert_eq!(v.coords[0], v.coords[1] * QNum::int(-2));
    }
}
