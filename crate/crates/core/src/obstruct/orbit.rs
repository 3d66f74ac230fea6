//! Aut(Δ) orbits of Case III configurations, diagram automorphisms and
//! Cartan types of root subsystems.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exact::{Metric, OrthoBasis};
use crate::qnum::QNum;
use crate::rootsys::{build_root_system_any_rank, Family, RootVector};

/// Case III data up to scale: the line `t∩m` and the key `±α'`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Config {
    pub line: RootVector,
    pub key: RootVector,
}

fn normalize_line(v: &RootVector) -> RootVector {
    let c = v.coords.iter().find(|x| !x.is_zero()).expect("nonzero line");
    v.scale(c.inv().expect("nonzero"))
}

/// Configuration of the pair `(α, β)`: `t∩m = ℝ(α−β)`, key `pr_h(α)`.
pub fn config_of_pair(alpha: &RootVector, beta: &RootVector) -> Config {
    let w = alpha - beta;
    let c = alpha.dot(&w) / w.norm2();
    Config { line: normalize_line(&w), key: (alpha - &w.scale(c)).canonical_sign() }
}

fn invert(m: &[Vec<QNum>]) -> Vec<Vec<QNum>> {
    let n = m.len();
    let mut a: Vec<Vec<QNum>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { QNum::one() } else { QNum::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).expect("nonsingular Gram matrix");
        a.swap(col, piv);
        let inv = a[col][col].inv().expect("pivot");
        for x in a[col].iter_mut() {
            *x = *x * inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for k in 0..2 * n {
                    let t = a[col][k];
                    a[r][k] -= f * t;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Permutations of the simple roots preserving their Gram matrix,
/// identity included.
pub fn diagram_automorphisms(simple: &[RootVector]) -> Vec<Vec<usize>> {
    let n = simple.len();
    let gram: Vec<Vec<QNum>> = simple.iter().map(|a| simple.iter().map(|b| a.dot(b)).collect()).collect();
    let mut out = Vec::new();
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(gram: &[Vec<QNum>], perm: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let i = perm.len();
        let n = gram.len();
        if i == n {
            out.push(perm.clone());
            return;
        }
        for c in 0..n {
            if used[c] || gram[c][c] != gram[i][i] {
                continue;
            }
            if (0..i).any(|j| gram[c][perm[j]] != gram[i][j]) {
                continue;
            }
            used[c] = true;
            perm.push(c);
            rec(gram, perm, used, out);
            perm.pop();
            used[c] = false;
        }
    }
    rec(&gram, &mut perm, &mut used, &mut out);
    out
}

/// Generators of Aut(Δ) acting on one simple factor's ambient space.
#[derive(Clone, Debug)]
pub struct OrbitIndex {
    pub family: Family,
    pub rank: usize,
    simple: Vec<RootVector>,
    gram_inv: Vec<Vec<QNum>>,
    autos: Vec<Vec<usize>>,
}

impl OrbitIndex {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let rs = build_root_system_any_rank(family, rank)?;
        let simple = rs.simple_roots();
        let gram: Vec<Vec<QNum>> = simple.iter().map(|a| simple.iter().map(|b| a.dot(b)).collect()).collect();
        let gram_inv = invert(&gram);
        let autos = diagram_automorphisms(&simple).into_iter().filter(|p| p.iter().enumerate().any(|(i, &j)| i != j)).collect();
        Ok(OrbitIndex { family, rank, simple, gram_inv, autos })
    }

    pub fn simple_roots(&self) -> &[RootVector] {
        &self.simple
    }

    /// Coefficients of the root-span component of `x` in the simple roots.
    pub fn simple_coords(&self, x: &RootVector) -> Vec<QNum> {
        let b: Vec<QNum> = self.simple.iter().map(|s| x.dot(s)).collect();
        self.gram_inv.iter().map(|row| row.iter().zip(&b).map(|(g, y)| *g * *y).sum()).collect()
    }

    /// The vector `v` in the root span with `⟨v, σ_j⟩ = b_j`.
    pub fn dual_vector(&self, b: &[QNum]) -> RootVector {
        let dim = self.simple[0].ambient_dim();
        let mut v = RootVector::zero(dim);
        for (row, s) in self.gram_inv.iter().zip(&self.simple) {
            let c: QNum = row.iter().zip(b).map(|(g, y)| *g * *y).sum();
            v = &v + &s.scale(c);
        }
        v
    }

    fn apply_auto(&self, perm: &[usize], x: &RootVector) -> RootVector {
        let c = self.simple_coords(x);
        let mut span = RootVector::zero(x.ambient_dim());
        let mut image = RootVector::zero(x.ambient_dim());
        for (i, ci) in c.iter().enumerate() {
            span = &span + &self.simple[i].scale(*ci);
            image = &image + &self.simple[perm[i]].scale(*ci);
        }
        &image + &(x - &span)
    }

    fn generators(&self) -> Vec<Box<dyn Fn(&RootVector) -> RootVector + '_>> {
        let mut g: Vec<Box<dyn Fn(&RootVector) -> RootVector + '_>> = Vec::new();
        for s in &self.simple {
            let n2 = s.norm2();
            g.push(Box::new(move |x: &RootVector| x - &s.scale(QNum::int(2) * x.dot(s) / n2)));
        }
        for p in &self.autos {
            g.push(Box::new(move |x: &RootVector| self.apply_auto(p, x)));
        }
        g
    }

    pub fn orbit(&self, c: &Config) -> HashSet<Config> {
        let gens = self.generators();
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(c.clone());
        queue.push_back(c.clone());
        while let Some(cur) = queue.pop_front() {
            for g in &gens {
                let next = Config { line: normalize_line(&g(&cur.line)), key: g(&cur.key).canonical_sign() };
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        seen
    }

    pub fn equivalent(&self, a: &Config, b: &Config) -> bool {
        a == b || self.orbit(a).contains(b)
    }
}

/// Cartan types of the irreducible components of the root subsystem
/// generated by `roots` (closed under negation), sorted. `C1` and `B1` are
/// reported as `A1`, `C2` as `B2`, `D3` as `A3`.
pub fn subsystem_type(roots: &[RootVector]) -> Vec<String> {
    let mut all: Vec<RootVector> = Vec::new();
    for r in roots {
        for x in [r.clone(), -r] {
            if !all.contains(&x) {
                all.push(x);
            }
        }
    }
    let n = all.len();
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(c: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while c[i] != i {
            c[i] = c[c[i]];
            i = c[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if !all[i].dot(&all[j]).is_zero() {
                let (a, b) = (find(&mut comp, i), find(&mut comp, j));
                comp[a] = b;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<RootVector>> = Default::default();
    for i in 0..n {
        let root = find(&mut comp, i);
        groups.entry(root).or_default().push(all[i].clone());
    }
    let mut labels: Vec<String> = groups.values().map(|g| component_type(g)).collect();
    labels.sort();
    labels
}

fn component_type(roots: &[RootVector]) -> String {
    let dim = roots[0].ambient_dim();
    let metric = Metric::euclidean(dim);
    let r = OrthoBasis::new(&metric, roots).dim();
    let n = roots.len();
    let max = roots.iter().map(|x| x.norm2()).max().expect("nonempty");
    let long = roots.iter().filter(|x| x.norm2() == max).count();
    let single = long == n;
    let label = match (single, n) {
        (_, 2) => "A1".to_string(),
        (true, _) if n == r * (r + 1) => format!("A{r}"),
        (true, _) if r >= 4 && n == 2 * r * (r - 1) => format!("D{r}"),
        (true, 72) if r == 6 => "E6".into(),
        (true, 126) if r == 7 => "E7".into(),
        (true, 240) if r == 8 => "E8".into(),
        (false, 12) if r == 2 => "G2".into(),
        (false, 48) if r == 4 => "F4".into(),
        (false, _) if n == 2 * r * r && r == 2 => "B2".into(),
        (false, _) if n == 2 * r * r && long == 2 * r => format!("C{r}"),
        (false, _) if n == 2 * r * r && long == 2 * r * (r - 1) => format!("B{r}"),
        _ => format!("?{n}/{r}"),
    };
    label
}
