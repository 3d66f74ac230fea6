use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 0.0, z: 0.0 };
    pub const ONE: Quaternion = Quaternion { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };
    pub const I: Quaternion = Quaternion { w: 0.0, x: 1.0, y: 0.0, z: 0.0 };
    pub const J: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 1.0, z: 0.0 };
    pub const K: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 0.0, z: 1.0 };

    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn conj(self) -> Self {
        Quaternion { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    pub fn norm2(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn scale(self, k: f64) -> Self {
        Quaternion { w: self.w * k, x: self.x * k, y: self.y * k, z: self.z * k }
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion { w: self.w + o.w, x: self.x + o.x, y: self.y + o.y, z: self.z + o.z }
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion { w: self.w - o.w, x: self.x - o.x, y: self.y - o.y, z: self.z - o.z }
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        Quaternion {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
    }
}

/// Square quaternionic matrix, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuatMatrix {
    pub n: usize,
    pub data: Vec<Quaternion>,
}

impl QuatMatrix {
    pub fn zeros(n: usize) -> Self {
        QuatMatrix { n, data: vec![Quaternion::ZERO; n * n] }
    }

    /// `q` in entry (i, j), 0-based.
    pub fn unit(n: usize, i: usize, j: usize, q: Quaternion) -> Self {
        let mut m = QuatMatrix::zeros(n);
        m[(i, j)] = q;
        m
    }

    pub fn mul(&self, o: &QuatMatrix) -> QuatMatrix {
        let n = self.n;
        let mut out = QuatMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Quaternion::ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + a * o[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, o: &QuatMatrix) -> QuatMatrix {
        QuatMatrix { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| *a + *b).collect() }
    }

    pub fn sub(&self, o: &QuatMatrix) -> QuatMatrix {
        QuatMatrix { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| *a - *b).collect() }
    }

    pub fn scale(&self, k: f64) -> QuatMatrix {
        QuatMatrix { n: self.n, data: self.data.iter().map(|a| a.scale(k)).collect() }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> QuatMatrix {
        let mut out = QuatMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn re_trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)].w).sum()
    }

    pub fn norm2(&self) -> f64 {
        self.data.iter().map(|q| q.norm2()).sum()
    }
}

impl std::ops::Index<(usize, usize)> for QuatMatrix {
    type Output = Quaternion;
    fn index(&self, (i, j): (usize, usize)) -> &Quaternion {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QuatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Quaternion {
        &mut self.data[i * self.n + j]
    }
}
