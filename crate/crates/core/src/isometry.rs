//! Integral isometries of `NS(X^[2])`: the three Beauville involutions, the
//! natural automorphism `g*`, classification by trace and fixed points.
//!
//! Matrices act on column vectors `(x, lam, y)`. Pullback is contravariant,
//! so the composite `ι₀ ∘ ι₁ ∘ ι₂` acts by `ι₂*·ι₁*·ι₀*`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::json_int::JsonInt;
use crate::lattice::{default_polarization, is_ample_surface, pair, HilbClass, GRAM};
use crate::quad_field::{ExactReal, QuadExt};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsometryError {
    #[error("matrix does not preserve the Gram form")]
    NotAnIsometry,
    #[error("isometry has determinant −1")]
    OrientationReversing,
    #[error("isometry swaps the two halves of the positive cone")]
    ConeSwapping,
    #[error("no fixed vector: {0}")]
    NoFixedVector(String),
    #[error("image of e is {0}, which is not of the form (x, λ<0, y) with x·h₁+y·h₂ ample")]
    ShapeViolation(HilbClass),
}

type Mat = [[BigInt; 3]; 3];

fn gram() -> Mat {
    GRAM.map(|r| r.map(BigInt::from))
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| &a[i][k] * &b[k][j]).sum()))
}

fn transpose(a: &Mat) -> Mat {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone()))
}

fn identity() -> Mat {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { BigInt::one() } else { BigInt::zero() }))
}

/// A 3×3 integer matrix `m` with `mᵀ·G·m = G`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeIsometry {
    m: Mat,
}

impl LatticeIsometry {
    pub fn new(m: [[BigInt; 3]; 3]) -> Result<Self, IsometryError> {
        let g = gram();
        if mat_mul(&mat_mul(&transpose(&m), &g), &m) != g {
            return Err(IsometryError::NotAnIsometry);
        }
        Ok(LatticeIsometry { m })
    }

    pub fn from_i64(m: [[i64; 3]; 3]) -> Result<Self, IsometryError> {
        Self::new(m.map(|r| r.map(BigInt::from)))
    }

    pub(crate) fn from_i64_unchecked(m: [[i64; 3]; 3]) -> Self {
        LatticeIsometry { m: m.map(|r| r.map(BigInt::from)) }
    }

    pub fn identity() -> Self {
        LatticeIsometry { m: identity() }
    }

    pub fn matrix(&self) -> &[[BigInt; 3]; 3] {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.m[i][j]
    }

    pub fn is_identity(&self) -> bool {
        self.m == identity()
    }

    /// `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        LatticeIsometry { m: mat_mul(&self.m, &other.m) }
    }

    pub fn apply(&self, v: &HilbClass) -> HilbClass {
        let c = v.coords();
        HilbClass::from_coords(std::array::from_fn(|i| (0..3).map(|j| &self.m[i][j] * &c[j]).sum()))
    }

    pub fn det(&self) -> BigInt {
        let m = &self.m;
        &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
            - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
    }

    pub fn trace(&self) -> BigInt {
        &self.m[0][0] + &self.m[1][1] + &self.m[2][2]
    }

    /// `M⁻¹ = G⁻¹·Mᵀ·G`, computed as the adjugate divided by `det = ±1`.
    pub fn inverse(&self) -> Self {
        let m = &self.m;
        let cof = |i: usize, j: usize| {
            let r: Vec<usize> = (0..3).filter(|&k| k != i).collect();
            let c: Vec<usize> = (0..3).filter(|&k| k != j).collect();
            let minor = &m[r[0]][c[0]] * &m[r[1]][c[1]] - &m[r[0]][c[1]] * &m[r[1]][c[0]];
            if (i + j) % 2 == 0 {
                minor
            } else {
                -minor
            }
        };
        let det = self.det();
        LatticeIsometry { m: std::array::from_fn(|i| std::array::from_fn(|j| cof(j, i) * &det)) }
    }

    pub fn pow(&self, n: i64) -> Self {
        let mut base = if n < 0 { self.inverse() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Whether the positive cone is mapped to itself, tested on `H = h₁ − e`.
    pub fn preserves_cone(&self) -> bool {
        let h = default_polarization();
        pair(&self.apply(&h), &h).is_positive()
    }

    pub fn to_i64(&self) -> Option<[[i64; 3]; 3]> {
        let mut out = [[0i64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = self.m[i][j].to_i64()?;
            }
        }
        Some(out)
    }
}

impl fmt::Display for LatticeIsometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .m
            .iter()
            .map(|r| format!("[{}, {}, {}]", r[0], r[1], r[2]))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    matrix: [[JsonInt; 3]; 3],
}

impl Serialize for LatticeIsometry {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson { matrix: self.m.clone().map(|r| r.map(JsonInt)) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LatticeIsometry {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        LatticeIsometry::new(raw.matrix.map(|r| r.map(|x| x.0))).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// The generators

pub const IOTA0: [[i64; 3]; 3] = [[3, 2, 2], [-4, -3, -2], [0, 0, -1]];
pub const IOTA1: [[i64; 3]; 3] = [[5, 2, -2], [-6, -3, 2], [6, 2, -3]];
pub const IOTA2: [[i64; 3]; 3] = [[27, 4, -16], [-14, -3, 8], [42, 6, -25]];

/// `(ι₀*, ι₁*, ι₂*)`.
pub fn generators() -> [LatticeIsometry; 3] {
    [IOTA0, IOTA1, IOTA2].map(LatticeIsometry::from_i64_unchecked)
}

/// `g* = ι₂*·ι₁*·ι₀*`.
pub fn g_star() -> LatticeIsometry {
    let [i0, i1, i2] = generators();
    i2.mul(&i1).mul(&i0)
}

/// `ι_n*` for `n = 3l + k`, `k ∈ {0,1,2}`, computed as `g*^l·ι_k*·g*^{−l}`.
///
/// With this sign the fixed point of `ι_n*` is `(a_n, −1, b_n)` where
/// `η^{2n} = a_n + b_n·η`; the opposite conjugation would move it to
/// `η^{−2n}` instead.
pub fn iota_n_star(n: i64) -> LatticeIsometry {
    let (l, k) = (n.div_euclid(3), n.rem_euclid(3) as usize);
    let g = g_star();
    g.pow(l).mul(&generators()[k]).mul(&g.pow(-l))
}

// ---------------------------------------------------------------------------
// Classification

#[derive(Debug, Clone, PartialEq)]
pub enum IsometryKind {
    Identity,
    /// Rotation about an interior point; `order` is `None` only if the
    /// predicted order fails to annihilate the matrix.
    Elliptic { order: Option<u32> },
    Parabolic,
    /// Translation along an axis; the eigenvalue `s > 1` on the attracting
    /// null line. `exact` is `None` when the radicand could not be certified.
    Hyperbolic { exact: Option<ExactReal>, approx: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsometryClass {
    pub kind: IsometryKind,
    pub so_trace: BigInt,
}

impl IsometryClass {
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            IsometryKind::Identity => "identity",
            IsometryKind::Elliptic { .. } => "elliptic",
            IsometryKind::Parabolic => "parabolic",
            IsometryKind::Hyperbolic { .. } => "hyperbolic",
        }
    }
}

impl Serialize for IsometryClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            kind: &'a str,
            so_trace: JsonInt,
            #[serde(skip_serializing_if = "Option::is_none")]
            order: Option<u32>,
            #[serde(skip_serializing_if = "Option::is_none")]
            spectral_radius: Option<String>,
            #[serde(skip_serializing_if = "Option::is_none")]
            spectral_radius_approx: Option<f64>,
        }
        let (order, sr, approx) = match &self.kind {
            IsometryKind::Elliptic { order } => (*order, None, None),
            IsometryKind::Hyperbolic { exact, approx } => {
                (None, exact.as_ref().map(|e| e.to_string()), Some(*approx))
            }
            _ => (None, None, None),
        };
        Out {
            kind: self.kind_name(),
            so_trace: JsonInt(self.so_trace.clone()),
            order,
            spectral_radius: sr,
            spectral_radius_approx: approx,
        }
        .serialize(s)
    }
}

/// Checks the preconditions shared by [`classify`] and [`fixed_points`].
pub fn check_orientation(m: &LatticeIsometry) -> Result<(), IsometryError> {
    if m.det() != BigInt::one() {
        return Err(IsometryError::OrientationReversing);
    }
    if !m.preserves_cone() {
        return Err(IsometryError::ConeSwapping);
    }
    Ok(())
}

/// The larger root `s` of `s + 1/s = t − 1`.
fn spectral_radius(t: &BigInt) -> (Option<ExactReal>, f64) {
    let tm1: BigInt = t - 1;
    let disc = BigRational::from_integer(&tm1 * &tm1 - 4);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let exact = ExactReal::sqrt_rational(&disc).ok().and_then(|r| {
        let sum = r.try_add(&ExactReal::Rational(BigRational::from_integer(tm1.clone()))).ok()?;
        sum.try_mul(&ExactReal::Rational(half)).ok()
    });
    let approx = match &exact {
        Some(e) => e.to_f64(),
        None => {
            let t = tm1.to_f64().unwrap_or(f64::INFINITY);
            (t + (t * t - 4.0).sqrt()) / 2.0
        }
    };
    (exact, approx)
}

/// Trace classification inside `SO⁺(2,1)`: elliptic for `−1 ≤ tr < 3`,
/// parabolic for `tr = 3`, hyperbolic for `tr > 3`.
pub fn classify(m: &LatticeIsometry) -> Result<IsometryClass, IsometryError> {
    check_orientation(m)?;
    let t = m.trace();
    let kind = if m.is_identity() {
        IsometryKind::Identity
    } else if t > BigInt::from(3) {
        let (exact, approx) = spectral_radius(&t);
        IsometryKind::Hyperbolic { exact, approx }
    } else if t == BigInt::from(3) {
        IsometryKind::Parabolic
    } else {
        // rotation by θ with 1 + 2cos θ = tr
        let predicted = match t.to_i64() {
            Some(-1) => Some(2),
            Some(0) => Some(3),
            Some(1) => Some(4),
            Some(2) => Some(6),
            _ => None,
        };
        let order = predicted.filter(|&o| m.pow(o as i64).is_identity());
        IsometryKind::Elliptic { order }
    };
    Ok(IsometryClass { kind, so_trace: t })
}

// ---------------------------------------------------------------------------
// Fixed points

/// A point on the boundary of the hyperbolic plane, normalized so that the
/// last nonzero coordinate is 1.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryPoint {
    Exact([ExactReal; 3]),
    Approximate([f64; 3]),
}

impl BoundaryPoint {
    pub fn to_f64(&self) -> [f64; 3] {
        match self {
            BoundaryPoint::Exact(c) => [c[0].to_f64(), c[1].to_f64(), c[2].to_f64()],
            BoundaryPoint::Approximate(c) => *c,
        }
    }
}

impl Serialize for BoundaryPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            exact: Option<[String; 3]>,
            approx: [f64; 3],
        }
        let exact = match self {
            BoundaryPoint::Exact(c) => Some(c.clone().map(|x| x.to_string())),
            BoundaryPoint::Approximate(_) => None,
        };
        Out { exact, approx: self.to_f64() }.serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FixedPoints {
    /// Primitive integral class spanning the `+1`-eigenspace.
    Interior { point: HilbClass },
    Parabolic { point: HilbClass },
    Boundary { attracting: BoundaryPoint, repelling: BoundaryPoint },
}

fn primitive(v: [BigInt; 3]) -> [BigInt; 3] {
    use num_integer::Integer;
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        v
    } else {
        v.map(|x| x / &g)
    }
}

fn cross<T: Clone>(
    a: &[T; 3],
    b: &[T; 3],
    mul: impl Fn(&T, &T) -> T,
    sub: impl Fn(&T, &T) -> T,
) -> [T; 3] {
    [
        sub(&mul(&a[1], &b[2]), &mul(&a[2], &b[1])),
        sub(&mul(&a[2], &b[0]), &mul(&a[0], &b[2])),
        sub(&mul(&a[0], &b[1]), &mul(&a[1], &b[0])),
    ]
}

/// Integral kernel of `M − I`, oriented towards the positive cone.
fn integral_fixed_vector(m: &LatticeIsometry) -> Result<HilbClass, IsometryError> {
    let rows: Vec<[BigInt; 3]> = (0..3)
        .map(|i| std::array::from_fn(|j| if i == j { &m.m[i][j] - 1 } else { m.m[i][j].clone() }))
        .collect();
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        let v = cross(&rows[a], &rows[b], |x, y| x * y, |x, y| x - y);
        if v.iter().all(Zero::is_zero) {
            continue;
        }
        let mut v = HilbClass::from_coords(primitive(v));
        if m.apply(&v) != v {
            continue;
        }
        let h = default_polarization();
        if pair(&v, &h).is_negative() {
            v = v.neg();
        }
        return Ok(v);
    }
    Err(IsometryError::NoFixedVector("M − I has rank below 2".into()))
}

fn quad_eigenvector(m: &LatticeIsometry, s: &QuadExt) -> Option<[ExactReal; 3]> {
    let d = s.d().clone();
    let lift = |x: &BigInt| QuadExt::new(d.clone(), BigRational::from_integer(x.clone()), BigRational::zero()).ok();
    let mut rows = Vec::new();
    for i in 0..3 {
        let mut r = Vec::new();
        for j in 0..3 {
            let e = lift(&m.m[i][j])?;
            r.push(if i == j { e.try_sub(s).ok()? } else { e });
        }
        rows.push([r[0].clone(), r[1].clone(), r[2].clone()]);
    }
    let mul = |x: &QuadExt, y: &QuadExt| x.try_mul(y).expect("same field");
    let sub = |x: &QuadExt, y: &QuadExt| x.try_sub(y).expect("same field");
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        let v = cross(&rows[a], &rows[b], mul, sub);
        let Some(last) = v.iter().rev().find(|x| !x.is_zero()).cloned() else {
            continue;
        };
        let v = v.map(|x| ExactReal::from(x.try_div(&last).expect("nonzero")));
        return Some(v.map(|x| match x {
            ExactReal::Quadratic(q) if q.is_rational() => ExactReal::Rational(q.a().clone()),
            other => other,
        }));
    }
    None
}

fn float_eigenvector(m: &LatticeIsometry, s: f64) -> Option<[f64; 3]> {
    let rows: Vec<[f64; 3]> = (0..3)
        .map(|i| {
            std::array::from_fn(|j| {
                let e = m.m[i][j].to_f64().unwrap_or(f64::NAN);
                if i == j {
                    e - s
                } else {
                    e
                }
            })
        })
        .collect();
    let mut best: Option<[f64; 3]> = None;
    let norm = |v: &[f64; 3]| v.iter().map(|x| x * x).sum::<f64>();
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        let v = cross(&rows[a], &rows[b], |x, y| x * y, |x, y| x - y);
        if best.map_or(true, |bv| norm(&v) > norm(&bv)) {
            best = Some(v);
        }
    }
    let v = best?;
    let scale = v.iter().rev().copied().find(|x| x.abs() > 1e-300 * norm(&v).sqrt())?;
    Some(v.map(|x| x / scale))
}

fn boundary_point(m: &LatticeIsometry, s: &Option<ExactReal>, approx: f64) -> Result<BoundaryPoint, IsometryError> {
    if let Some(ExactReal::Quadratic(q)) = s {
        let v = quad_eigenvector(m, q).ok_or_else(|| IsometryError::NoFixedVector("degenerate eigenspace".into()))?;
        check_null_eigenvector(m, &v, q)?;
        return Ok(BoundaryPoint::Exact(v));
    }
    float_eigenvector(m, approx)
        .map(BoundaryPoint::Approximate)
        .ok_or_else(|| IsometryError::NoFixedVector("degenerate eigenspace".into()))
}

fn check_null_eigenvector(m: &LatticeIsometry, v: &[ExactReal; 3], s: &QuadExt) -> Result<(), IsometryError> {
    let fail = |why: &str| IsometryError::NoFixedVector(why.into());
    let s = ExactReal::Quadratic(s.clone());
    for i in 0..3 {
        let mut mv = ExactReal::zero();
        for j in 0..3 {
            let term = ExactReal::Rational(BigRational::from_integer(m.m[i][j].clone()))
                .try_mul(&v[j])
                .map_err(|_| fail("field mismatch"))?;
            mv = mv.try_add(&term).map_err(|_| fail("field mismatch"))?;
        }
        let sv = s.try_mul(&v[i]).map_err(|_| fail("field mismatch"))?;
        if mv != sv {
            return Err(fail("eigenvector check failed"));
        }
    }
    let mut sq = ExactReal::zero();
    for i in 0..3 {
        for j in 0..3 {
            let t = v[i]
                .try_mul(&v[j])
                .and_then(|p| p.try_mul(&ExactReal::int(GRAM[i][j])))
                .map_err(|_| fail("field mismatch"))?;
            sq = sq.try_add(&t).map_err(|_| fail("field mismatch"))?;
        }
    }
    if sq.sign() != 0 {
        return Err(fail("eigenvector is not isotropic"));
    }
    Ok(())
}

/// Fixed points in `P(𝓛⁺)` and on its boundary.
///
/// For a hyperbolic `M` the attracting point is the eigenline of `s > 1`
/// and the repelling one that of `1/s`; in `Q(√d)` they are Galois
/// conjugate.
pub fn fixed_points(m: &LatticeIsometry) -> Result<FixedPoints, IsometryError> {
    let class = classify(m)?;
    match class.kind {
        IsometryKind::Identity => Err(IsometryError::NoFixedVector("identity fixes everything".into())),
        IsometryKind::Elliptic { .. } => {
            let v = integral_fixed_vector(m)?;
            if !v.square().is_positive() {
                return Err(IsometryError::NoFixedVector(format!("fixed vector {v} is not in the positive cone")));
            }
            Ok(FixedPoints::Interior { point: v })
        }
        IsometryKind::Parabolic => {
            let v = integral_fixed_vector(m)?;
            if !v.square().is_zero() {
                return Err(IsometryError::NoFixedVector(format!("fixed vector {v} is not isotropic")));
            }
            Ok(FixedPoints::Parabolic { point: v })
        }
        IsometryKind::Hyperbolic { exact, approx } => {
            let attracting = boundary_point(m, &exact, approx)?;
            let inv_exact = match &exact {
                Some(ExactReal::Quadratic(q)) => q.inverse().ok().map(ExactReal::Quadratic),
                _ => None,
            };
            let repelling = boundary_point(m, &inv_exact, 1.0 / approx)?;
            Ok(FixedPoints::Boundary { attracting, repelling })
        }
    }
}

// ---------------------------------------------------------------------------
// Natural automorphisms

/// Natural automorphisms are exactly those fixing `e`.
pub fn is_natural(m: &LatticeIsometry) -> bool {
    m.apply(&HilbClass::e()) == HilbClass::e()
}

/// `M·e` for a non-natural `M`, checked to have the shape `(x, λ, y)` with
/// `λ < 0` and `x·h₁ + y·h₂` ample. Returns `None` for natural `M`.
pub fn nonnatural_shape(m: &LatticeIsometry) -> Result<Option<HilbClass>, IsometryError> {
    let v = m.apply(&HilbClass::e());
    if v == HilbClass::e() {
        return Ok(None);
    }
    if !v.lam.is_negative() || !is_ample_surface(&v.surface_part()) {
        return Err(IsometryError::ShapeViolation(v));
    }
    Ok(Some(v))
}

/// Every lattice isometry whose entries lie in `[−bound, bound]`, found by
/// matching columns against the Gram matrix.
pub fn bounded_isometries(bound: i64) -> Vec<LatticeIsometry> {
    let mut by_square: std::collections::HashMap<i64, Vec<[i64; 3]>> = Default::default();
    for x in -bound..=bound {
        for l in -bound..=bound {
            for y in -bound..=bound {
                let sq = 4 * (x * x + x * y - y * y) - 2 * l * l;
                if sq == 4 || sq == -2 || sq == -4 {
                    by_square.entry(sq).or_default().push([x, l, y]);
                }
            }
        }
    }
    let p = |a: &[i64; 3], b: &[i64; 3]| {
        4 * a[0] * b[0] + 2 * (a[0] * b[2] + a[2] * b[0]) - 4 * a[2] * b[2] - 2 * a[1] * b[1]
    };
    let empty = Vec::new();
    let (c0s, c1s, c2s) = (
        by_square.get(&4).unwrap_or(&empty),
        by_square.get(&-2).unwrap_or(&empty),
        by_square.get(&-4).unwrap_or(&empty),
    );
    let mut out = Vec::new();
    for c0 in c0s {
        for c1 in c1s.iter().filter(|c1| p(c0, c1) == 0) {
            for c2 in c2s.iter().filter(|c2| p(c0, c2) == 2 && p(c1, c2) == 0) {
                let m = std::array::from_fn(|i| [c0[i], c1[i], c2[i]]);
                out.push(LatticeIsometry::from_i64_unchecked(m));
            }
        }
    }
    out
}
