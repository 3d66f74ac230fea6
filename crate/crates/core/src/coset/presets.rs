use nalgebra::DMatrix;

use super::{build_coset, CosetSpace, SubalgebraSpec};
use crate::error::{Error, Result};
use crate::liealg::{AlgebraElement, AlgebraSpec, Block, FactorSpec, QuatMatrix, Quaternion};
use crate::qnum::{parse_rational, QNum, Rational};
use crate::rootsys::{build_root_system_any_rank, Family, RootVector};

pub const PRESET_NAMES: &[&str] = &[
    "sphere_so2n",
    "sphere_un",
    "sphere_spn_u1",
    "sphere_spn_sp1",
    "aloff_wallach",
    "berger_sp2",
    "bn_excluded_subcase1",
    "a1a1_diagonal",
    "cn_excluded_subcase1",
];

/// Parses `name(p1,p2,...)` (the `preset:` prefix is optional) and builds it.
pub fn parse_preset(text: &str) -> Result<CosetSpace> {
    let t = text.trim();
    let t = t.strip_prefix("preset:").unwrap_or(t);
    let (name, params) = match t.find('(') {
        Some(i) => {
            let inner = t[i + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced parentheses in {text:?}")))?;
            (&t[..i], inner.split(',').map(str::trim).filter(|s| !s.is_empty()).collect::<Vec<_>>())
        }
        None => (t, Vec::new()),
    };
    preset(name.trim(), &params)
}

fn int_param(params: &[&str], k: usize, name: &str) -> Result<i64> {
    let s = params.get(k).ok_or_else(|| Error::InvalidParameter(format!("{name}: missing parameter {}", k + 1)))?;
    s.parse::<i64>().map_err(|_| Error::InvalidParameter(format!("{name}: expected an integer, got {s:?}")))
}

fn rational_param(params: &[&str], k: usize, name: &str) -> Result<Rational> {
    let s = params.get(k).ok_or_else(|| Error::InvalidParameter(format!("{name}: missing parameter {}", k + 1)))?;
    if let Ok(r) = parse_rational(s) {
        return Ok(r);
    }
    let x: f64 = s.parse().map_err(|_| Error::InvalidParameter(format!("{name}: expected a number, got {s:?}")))?;
    Rational::approximate_float(x).ok_or_else(|| Error::InvalidParameter(format!("{name}: {s} is not representable")))
}

fn expect_arity(params: &[&str], n: usize, name: &str) -> Result<()> {
    if params.len() != n {
        return Err(Error::InvalidParameter(format!("{name} takes {n} parameter(s), got {}", params.len())));
    }
    Ok(())
}

fn min_n(n: i64, min: i64, name: &str) -> Result<usize> {
    if n < min {
        return Err(Error::InvalidParameter(format!("{name}: n must be at least {min}, got {n}")));
    }
    Ok(n as usize)
}

pub fn preset(name: &str, params: &[&str]) -> Result<CosetSpace> {
    let label = if params.is_empty() { name.to_string() } else { format!("{name}({})", params.join(",")) };
    let space = match name {
        "sphere_so2n" => {
            expect_arity(params, 1, name)?;
            let n = min_n(int_param(params, 0, name)?, 2, name)?;
            sphere_so2n(n)?
        }
        "sphere_un" => {
            expect_arity(params, 1, name)?;
            sphere_un(min_n(int_param(params, 0, name)?, 2, name)?)?
        }
        "sphere_spn_u1" => {
            expect_arity(params, 1, name)?;
            sphere_spn_u1(min_n(int_param(params, 0, name)?, 1, name)?)?
        }
        "sphere_spn_sp1" => {
            expect_arity(params, 1, name)?;
            sphere_spn_sp1(min_n(int_param(params, 0, name)?, 1, name)?)?
        }
        "aloff_wallach" => {
            expect_arity(params, 2, name)?;
            aloff_wallach(int_param(params, 0, name)?, int_param(params, 1, name)?)?
        }
        "berger_sp2" => {
            expect_arity(params, 0, name)?;
            berger_sp2()?
        }
        "bn_excluded_subcase1" => {
            expect_arity(params, 1, name)?;
            bn_excluded_subcase1(min_n(int_param(params, 0, name)?, 2, name)?)?
        }
        "a1a1_diagonal" => {
            expect_arity(params, 1, name)?;
            a1a1_diagonal(rational_param(params, 0, name)?)?
        }
        "cn_excluded_subcase1" => {
            expect_arity(params, 1, name)?;
            cn_excluded_subcase1(min_n(int_param(params, 0, name)?, 2, name)?)?
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown preset {other:?}; known presets: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(space.with_name(label))
}

fn unit(total: usize, i: usize) -> RootVector {
    RootVector::unit(total, i)
}

/// Positive roots of a classical family occupying `count` ambient
/// coordinates starting at `first`, padded to `total` coordinates.
fn sub_roots(family: Family, first: usize, count: usize, total: usize) -> Result<Vec<RootVector>> {
    let rank = if family == Family::A { count.saturating_sub(1) } else { count };
    if rank == 0 {
        return Ok(Vec::new());
    }
    let rs = build_root_system_any_rank(family, rank)?;
    Ok(rs
        .positive_roots()
        .into_iter()
        .map(|r| {
            let mut v = RootVector::zero(total);
            v.coords[first..first + count].clone_from_slice(&r.coords);
            v
        })
        .collect())
}

fn real_skew(n: usize, i: usize, j: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    m[(i, j)] = 1.0;
    m[(j, i)] = -1.0;
    m
}

/// `SO(2n)/SO(2n−1)`, with `SO(2n−1)` fixing the second basis vector.
fn sphere_so2n(n: usize) -> Result<CosetSpace> {
    let alg = AlgebraSpec::simple(Family::D, n);
    let cartan_h = (1..n).map(|i| unit(n, i)).collect();
    let h_roots = if n >= 3 { sub_roots(Family::D, 1, n - 1, n)? } else { Vec::new() };
    let size = 2 * n;
    let extra_generators = (2..size)
        .map(|k| AlgebraElement { blocks: vec![Block::Real(real_skew(size, 0, k))], abelian: vec![] })
        .collect();
    let s = build_coset(&alg, &SubalgebraSpec { cartan_h, h_roots, extra_generators })?;
    Ok(s.with_survivor(format!("SO({})/SO({})", 2 * n, 2 * n - 1)))
}

/// `U(n)/U(n−1)` on `su(n) ⊕ ℝ`.
fn sphere_un(n: usize) -> Result<CosetSpace> {
    let alg = AlgebraSpec::simple(Family::A, n - 1).with_abelian(1);
    let total = n + 1;
    let mut cartan_h: Vec<RootVector> = (1..n - 1)
        .map(|i| {
            let mut v = RootVector::zero(total);
            v.coords[i] = 1.into();
            v.coords[i + 1] = (-1).into();
            v
        })
        .collect();
    let mut u = RootVector::zero(total);
    for i in 1..=n {
        u.coords[i] = 1.into();
    }
    cartan_h.push(u);
    let h_roots = sub_roots(Family::A, 1, n - 1, total)?;
    let s = build_coset(&alg, &SubalgebraSpec { cartan_h, h_roots, extra_generators: vec![] })?;
    Ok(s.with_survivor(format!("U({n})/U({})", n - 1)))
}

/// `Sp(n)U(1)/Sp(n−1)U(1)` on `sp(n) ⊕ ℝ`.
fn sphere_spn_u1(n: usize) -> Result<CosetSpace> {
    let alg = AlgebraSpec::simple(Family::C, n).with_abelian(1);
    let total = n + 1;
    let mut cartan_h: Vec<RootVector> = (1..n).map(|i| unit(total, i)).collect();
    let mut u = unit(total, 0);
    u.coords[n] = 1.into();
    cartan_h.push(u);
    let h_roots = if n >= 2 { sub_roots(Family::C, 1, n - 1, total)? } else { Vec::new() };
    let s = build_coset(&alg, &SubalgebraSpec { cartan_h, h_roots, extra_generators: vec![] })?;
    Ok(s.with_survivor(format!("Sp({n})U(1)/Sp({})U(1)", n - 1)))
}

/// `Sp(n)Sp(1)/Sp(n−1)Sp(1)` on `sp(n) ⊕ sp(1)` with the diagonal `sp(1)`.
fn sphere_spn_sp1(n: usize) -> Result<CosetSpace> {
    let alg = AlgebraSpec {
        factors: vec![FactorSpec { family: Family::C, rank: n, scale: 1.0 }, FactorSpec { family: Family::C, rank: 1, scale: 1.0 }],
        abelian_dim: 0,
    };
    let total = n + 1;
    let mut cartan_h: Vec<RootVector> = (1..n).map(|i| unit(total, i)).collect();
    let mut u = unit(total, 0);
    u.coords[n] = 1.into();
    cartan_h.push(u);
    let h_roots = if n >= 2 { sub_roots(Family::C, 1, n - 1, total)? } else { Vec::new() };
    let diag = |q: Quaternion| AlgebraElement {
        blocks: vec![Block::Quaternion(QuatMatrix::unit(n, 0, 0, q)), Block::Quaternion(QuatMatrix::unit(1, 0, 0, q))],
        abelian: vec![],
    };
    let extra_generators = vec![diag(Quaternion::J), diag(Quaternion::K)];
    let s = build_coset(&alg, &SubalgebraSpec { cartan_h, h_roots, extra_generators })?;
    Ok(s.with_survivor(format!("Sp({n})Sp(1)/Sp({})Sp(1)", n - 1)))
}

/// Aloff-Wallach space `U(3)/U_{k,l}` on `su(3) ⊕ ℝ`.
fn aloff_wallach(k: i64, l: i64) -> Result<CosetSpace> {
    if k * l * (k + l) == 0 {
        return Err(Error::InvalidParameter(format!("aloff_wallach requires kl(k+l) != 0, got k={k}, l={l}")));
    }
    let alg = AlgebraSpec::simple(Family::A, 2).with_abelian(1);
    let q = |x: i64| QNum::int(x);
    let circle = RootVector::new(vec![q(k), q(l), q(-k - l), q(0)]);
    let vp = [k + 2 * l, -2 * k - l, k - l];
    let n2: i64 = vp.iter().map(|x| x * x).sum();
    let mut second = RootVector::new(vp.iter().map(|&x| QNum::frac(x, n2)).collect());
    second.coords.push(q(1));
    let s = build_coset(&alg, &SubalgebraSpec { cartan_h: vec![circle, second], h_roots: vec![], extra_generators: vec![] })?;
    Ok(s.with_survivor(format!("U(3)/U_{{{k},{l}}} (Aloff-Wallach)")))
}

/// Traceless symmetric 3x3 matrices, orthonormal for the trace form,
/// ordered so that the rotation about the third axis acts with weight 1 on
/// basis vectors 1, 2 and weight 2 on basis vectors 3, 4.
fn sym2_basis() -> Vec<DMatrix<f64>> {
    let s2 = 0.5f64.sqrt();
    let s6 = 6f64.sqrt().recip();
    let m = |e: &[(usize, usize, f64)]| {
        let mut a = DMatrix::zeros(3, 3);
        for &(i, j, c) in e {
            a[(i, j)] += c;
        }
        a
    };
    vec![
        m(&[(0, 0, -s6), (1, 1, -s6), (2, 2, 2.0 * s6)]),
        m(&[(0, 2, s2), (2, 0, s2)]),
        m(&[(1, 2, s2), (2, 1, s2)]),
        m(&[(0, 0, s2), (1, 1, -s2)]),
        m(&[(0, 1, s2), (1, 0, s2)]),
    ]
}

/// Image of `L ∈ so(3)` under the 5-dimensional irreducible representation.
fn so3_irrep5(l: &DMatrix<f64>) -> DMatrix<f64> {
    let b = sym2_basis();
    DMatrix::from_fn(5, 5, |a, c| {
        let img = l * &b[c] - &b[c] * l;
        img.component_mul(&b[a]).sum()
    })
}

/// Berger space `Sp(2)/SU(2)`, realized as `SO(5)/SO(3)` with the
/// irreducible `so(3)`.
fn berger_sp2() -> Result<CosetSpace> {
    let alg = AlgebraSpec::simple(Family::B, 2);
    let gens: Vec<DMatrix<f64>> = [(2, 1), (0, 2), (1, 0)]
        .iter()
        .map(|&(i, j)| real_skew(3, i, j))
        .map(|l| so3_irrep5(&l))
        .collect();
    // the third generator rotates about the third axis and lands in t
    let r = &gens[2];
    let (a, b) = (r[(1, 2)], r[(3, 4)]);
    let (ai, bi) = (a.round(), b.round());
    if (a - ai).abs() > 1e-12 || (b - bi).abs() > 1e-12 {
        return Err(Error::DegenerateSubalgebra("irreducible so(3) is not torus-aligned".into()));
    }
    let cartan_h = vec![RootVector::from_ints(&[ai as i64, bi as i64])];
    let extra_generators =
        gens.into_iter().map(|g| AlgebraElement { blocks: vec![Block::Real(g)], abelian: vec![] }).collect();
    let s = build_coset(&alg, &SubalgebraSpec { cartan_h, h_roots: vec![], extra_generators })?;
    Ok(s.with_survivor("Sp(2)/SU(2) (Berger)"))
}

/// `SO(2n+1)/SO(2n−1)` with `t∩h = span(e2..en)`; excluded by the
/// analytic argument for this configuration.
fn bn_excluded_subcase1(n: usize) -> Result<CosetSpace> {
    let alg = AlgebraSpec::simple(Family::B, n);
    let cartan_h = (1..n).map(|i| unit(n, i)).collect();
    let h_roots = sub_roots(Family::B, 1, n - 1, n)?;
    build_coset(&alg, &SubalgebraSpec { cartan_h, h_roots, extra_generators: vec![] })
}

/// `SU(2)×SU(2)/S¹` with `t∩h = ℝ(cα − β)`.
fn a1a1_diagonal(c: Rational) -> Result<CosetSpace> {
    if c < Rational::from_integer(1) && c > Rational::from_integer(-1) {
        return Err(Error::InvalidParameter(format!("a1a1_diagonal requires |c| >= 1, got {c}")));
    }
    let alg = AlgebraSpec {
        factors: vec![FactorSpec { family: Family::A, rank: 1, scale: 1.0 }, FactorSpec { family: Family::A, rank: 1, scale: 1.0 }],
        abelian_dim: 0,
    };
    let cq = QNum::rational(c);
    let v = RootVector::new(vec![cq, -cq, QNum::int(-1), QNum::int(1)]);
    build_coset(&alg, &SubalgebraSpec { cartan_h: vec![v], h_roots: vec![], extra_generators: vec![] })
}

/// `Sp(n)` with `h = t∩h + g_{±(e1+e2)} + sp(n−2)` on indices `3..n`.
fn cn_excluded_subcase1(n: usize) -> Result<CosetSpace> {
    let alg = AlgebraSpec::simple(Family::C, n);
    let mut e12 = RootVector::zero(n);
    e12.coords[0] = 1.into();
    e12.coords[1] = 1.into();
    let mut cartan_h = vec![e12.clone()];
    cartan_h.extend((2..n).map(|i| unit(n, i)));
    let mut h_roots = vec![e12];
    if n >= 3 {
        h_roots.extend(sub_roots(Family::C, 2, n - 2, n)?);
    }
    build_coset(&alg, &SubalgebraSpec { cartan_h, h_roots, extra_generators: vec![] })
}
