//! Hyperbolic geometry of `P(𝓛⁺) ≅ ℍ²`: cosh distances between classes,
//! normalization of a triangle into the upper half-plane, Beardon's `λ` and
//! the resulting Fuchsian signature.

use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;
use thiserror::Error;

use crate::lattice::{default_polarization, pair, HilbClass};
use crate::quad_field::{ExactReal, QuadError};
use crate::words::ReducedWord;

/// Tolerance for floating comparisons.
pub const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HyperbolicError {
    #[error("{0} is not in the positive cone")]
    NotInteriorPoint(HilbClass),
    #[error("degenerate triangle: {0}")]
    DegenerateTriangle(String),
    #[error("signature has s + t = 0; no free-product decomposition is guaranteed")]
    NotBoundaryType,
    #[error("Möbius matrix has non-positive determinant")]
    NotMobius,
    #[error(transparent)]
    Radical(#[from] QuadError),
}

/// A point of `P(𝓛⁺)` represented by an integral class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InteriorPoint(HilbClass);

impl InteriorPoint {
    pub fn new(c: HilbClass) -> Result<Self, HyperbolicError> {
        if !c.square().is_positive() || !pair(&c, &default_polarization()).is_positive() {
            return Err(HyperbolicError::NotInteriorPoint(c));
        }
        Ok(InteriorPoint(c))
    }

    pub fn class(&self) -> &HilbClass {
        &self.0
    }
}

/// The fixed points of `ι₀*, ι₁*, ι₂*`.
pub fn generator_fixed_points() -> [InteriorPoint; 3] {
    [HilbClass::new(1, -1, 0), HilbClass::new(1, -1, 1), HilbClass::new(2, -1, 3)].map(InteriorPoint)
}

fn er(n: impl Into<BigInt>) -> ExactReal {
    ExactReal::Rational(BigRational::from_integer(n.into()))
}

/// `cosh d(A, B) = (A.B)/(‖A‖‖B‖)`, exact.
pub fn distance_cosh(a: &InteriorPoint, b: &InteriorPoint) -> Result<ExactReal, HyperbolicError> {
    let (a, b) = (&a.0, &b.0);
    let norms = ExactReal::sqrt_rational(&BigRational::from_integer(a.square() * b.square()))?;
    Ok(er(pair(a, b)).try_div(&norms)?)
}

// ---------------------------------------------------------------------------
// Upper half-plane

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfPlanePoint {
    pub re: f64,
    pub im: f64,
}

impl HalfPlanePoint {
    /// `cosh d(z, w) = 1 + |z − w|² / (2·Im z·Im w)`.
    pub fn distance_cosh(&self, other: &Self) -> f64 {
        let (dx, dy) = (self.re - other.re, self.im - other.im);
        1.0 + (dx * dx + dy * dy) / (2.0 * self.im * other.im)
    }
}

/// `z ↦ (az + b)/(cz + d)` with `ad − bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MobiusMap {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl MobiusMap {
    /// Scales to determinant 1.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, HyperbolicError> {
        let det = a * d - b * c;
        if !(det > 0.0) || !det.is_finite() {
            return Err(HyperbolicError::NotMobius);
        }
        let s = det.sqrt();
        Ok(MobiusMap { a: a / s, b: b / s, c: c / s, d: d / s })
    }

    pub fn identity() -> Self {
        MobiusMap { a: 1.0, b: 0.0, c: 0.0, d: 1.0 }
    }

    /// Matrix product `self · other`, renormalized.
    pub fn compose(&self, o: &Self) -> Self {
        let m = MobiusMap {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        };
        let det = m.a * m.d - m.b * m.c;
        let s = det.sqrt();
        MobiusMap { a: m.a / s, b: m.b / s, c: m.c / s, d: m.d / s }
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, z: HalfPlanePoint) -> HalfPlanePoint {
        // (a z + b)/(c z + d) with z = x + iy
        let (nr, ni) = (self.a * z.re + self.b, self.a * z.im);
        let (dr, di) = (self.c * z.re + self.d, self.c * z.im);
        let den = dr * dr + di * di;
        HalfPlanePoint { re: (nr * dr + ni * di) / den, im: (ni * dr - nr * di) / den }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MobiusKind {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// Trichotomy by `trace²` against 4, with tolerance [`TOL`].
pub fn mobius_classify(m: &MobiusMap) -> MobiusKind {
    let near_pm_identity = (m.b.abs() < TOL && m.c.abs() < TOL)
        && ((m.a - 1.0).abs() < TOL && (m.d - 1.0).abs() < TOL || (m.a + 1.0).abs() < TOL && (m.d + 1.0).abs() < TOL);
    if near_pm_identity {
        return MobiusKind::Identity;
    }
    let t2 = m.trace() * m.trace();
    if (t2 - 4.0).abs() <= TOL {
        MobiusKind::Parabolic
    } else if t2 < 4.0 {
        MobiusKind::Elliptic
    } else {
        MobiusKind::Hyperbolic
    }
}

/// The order-2 rotation about `x + iy`.
pub fn half_turn(z: HalfPlanePoint) -> MobiusMap {
    let (b, m) = (z.re, z.im);
    MobiusMap { a: b / m, b: -(b * b + m * m) / m, c: 1.0 / m, d: -b / m }
}

// ---------------------------------------------------------------------------
// Triangle normalization

/// Exact normalization constants, available when the three cosh values
/// are rational.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactConstants {
    pub k: ExactReal,
    pub m: ExactReal,
    pub b_sq: ExactReal,
    /// `trace(T·U) = (b² + m² + 1)/m`.
    pub trace_tu: ExactReal,
    /// `trace(T·V·U)² = (b/m)²(k − 1/k)²`.
    pub trace_sq_tvu: ExactReal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Normalization {
    /// `cosh d(P₀,P₁)`, `cosh d(P₁,P₂)`, `cosh d(P₀,P₂)`.
    pub cosh: [ExactReal; 3],
    pub exact: Option<ExactConstants>,
    pub k: f64,
    pub m: f64,
    pub b: f64,
    /// Images of `P₀, P₁, P₂`: `(b, m)`, `(0, 1)`, `(0, k)`.
    pub images: [HalfPlanePoint; 3],
    pub t: MobiusMap,
    pub u: MobiusMap,
    pub v: MobiusMap,
}

impl Normalization {
    /// `T, U, V` indexed by generator letter.
    pub fn letter_maps(&self) -> [MobiusMap; 3] {
        [self.t, self.u, self.v]
    }
}

fn exact_constants(c01: &ExactReal, c12: &ExactReal, c02: &ExactReal) -> Result<ExactConstants, HyperbolicError> {
    let one = er(1);
    let two = er(2);
    let root = ExactReal::sqrt_rational(
        c12.square().try_sub(&one)?.as_rational().expect("rational input"),
    )?;
    let k = c12.try_add(&root)?;
    let ksq_m1 = k.square().try_sub(&one)?;
    let den = two.try_mul(&k.try_mul(c02)?.try_sub(c01)?)?;
    let m = ksq_m1.try_div(&den)?;
    let b_sq = two.try_mul(&m)?.try_mul(c01)?.try_sub(&one)?.try_sub(&m.square())?;
    let trace_tu = b_sq.try_add(&m.square())?.try_add(&one)?.try_div(&m)?;
    let k_minus = k.try_sub(&one.try_div(&k)?)?;
    let trace_sq_tvu = b_sq.try_div(&m.square())?.try_mul(&k_minus.square())?;
    Ok(ExactConstants { k, m, b_sq, trace_tu, trace_sq_tvu })
}

/// Sends `P₁ ↦ i`, `P₂ ↦ ik` (`k > 1`) and `P₀ ↦ b + im` (`b > 0`), and
/// returns the half-turns `T, U, V` about the three images.
///
/// `m` and `b` solve `cosh d(·, i) = (b² + m² + 1)/(2m)` and
/// `cosh d(·, ik) = (b² + m² + k²)/(2mk)`.
pub fn normalize_triple(p0: &InteriorPoint, p1: &InteriorPoint, p2: &InteriorPoint) -> Result<Normalization, HyperbolicError> {
    let c01 = distance_cosh(p0, p1)?;
    let c12 = distance_cosh(p1, p2)?;
    let c02 = distance_cosh(p0, p2)?;
    let one = er(1);
    if c12 == one || c01 == one || c02 == one {
        return Err(HyperbolicError::DegenerateTriangle("two vertices coincide".into()));
    }
    let (f01, f12, f02) = (c01.to_f64(), c12.to_f64(), c02.to_f64());
    let k = f12 + (f12 * f12 - 1.0).sqrt();
    let m = (k * k - 1.0) / (2.0 * (k * f02 - f01));
    let b_sq = 2.0 * m * f01 - 1.0 - m * m;

    let all_rational = [&c01, &c12, &c02].iter().all(|c| c.as_rational().is_some());
    let exact = if all_rational { Some(exact_constants(&c01, &c12, &c02)?) } else { None };
    let degenerate = match &exact {
        Some(e) => e.b_sq.sign() <= 0,
        None => b_sq <= TOL,
    };
    if degenerate {
        return Err(HyperbolicError::DegenerateTriangle("the three points are collinear".into()));
    }
    let b = b_sq.sqrt();
    let images = [
        HalfPlanePoint { re: b, im: m },
        HalfPlanePoint { re: 0.0, im: 1.0 },
        HalfPlanePoint { re: 0.0, im: k },
    ];
    let [t, u, v] = images.map(half_turn);
    Ok(Normalization { cosh: [c01, c12, c02], exact, k, m, b, images, t, u, v })
}

/// Image of a word in `PSL₂(ℝ)`, letters `0, 1, 2 ↦ T, U, V`, composed in
/// the same contravariant order as [`crate::words::evaluate`].
pub fn half_plane_image(w: &ReducedWord, n: &Normalization) -> MobiusMap {
    let maps = n.letter_maps();
    w.letters().iter().fold(MobiusMap::identity(), |acc, &k| maps[k as usize].compose(&acc))
}

// ---------------------------------------------------------------------------
// Triangles

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriangleData {
    pub cosh_sides: [ExactReal; 3],
    /// `α, β, γ`, opposite to the sides `a, b, c`.
    pub angles: [f64; 3],
    /// `λ² = 1 + 2·cosh a·cosh b·cosh c − cosh²a − cosh²b − cosh²c`.
    pub lambda_sq: ExactReal,
    pub lambda: Option<ExactReal>,
    pub lambda_approx: f64,
    /// `sinh a·sinh b·sin γ`, `sinh b·sinh c·sin α`, `sinh c·sinh a·sin β`.
    pub lambda_by_pairing: [f64; 3],
    /// Spread of `sinh a / sin α`, `sinh b / sin β`, `sinh c / sin γ`.
    pub sine_rule_residual: f64,
}

/// Angles from the hyperbolic law of cosines and
/// `λ = sinh a·sinh b·sin γ` from the angle-free identity
/// `λ² = sinh²a·sinh²b − (cosh a·cosh b − cosh c)²`.
pub fn solve_triangle(ca: &ExactReal, cb: &ExactReal, cc: &ExactReal) -> Result<TriangleData, HyperbolicError> {
    let one = er(1);
    for c in [ca, cb, cc] {
        if c.cmp_exact(&one)?.is_le() {
            return Err(HyperbolicError::DegenerateTriangle(format!("side with cosh {c} ≤ 1")));
        }
    }
    let sinh_sq = |c: &ExactReal| c.square().try_sub(&one);
    let lambda_sq = sinh_sq(ca)?.try_mul(&sinh_sq(cb)?)?.try_sub(&ca.try_mul(cb)?.try_sub(cc)?.square())?;
    if lambda_sq.sign() <= 0 {
        return Err(HyperbolicError::DegenerateTriangle("triangle inequality fails or is an equality".into()));
    }
    let lambda = lambda_sq.as_rational().and_then(|q| ExactReal::sqrt_rational(q).ok());
    let lambda_approx = lambda.as_ref().map_or_else(|| lambda_sq.to_f64().sqrt(), ExactReal::to_f64);

    let c = [ca.to_f64(), cb.to_f64(), cc.to_f64()];
    let s = c.map(|x| (x * x - 1.0).sqrt());
    // angle opposite side i, between the other two
    let angle = |i: usize| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        ((c[j] * c[k] - c[i]) / (s[j] * s[k])).clamp(-1.0, 1.0).acos()
    };
    let angles = [angle(0), angle(1), angle(2)];
    let lambda_by_pairing = [
        s[0] * s[1] * angles[2].sin(),
        s[1] * s[2] * angles[0].sin(),
        s[2] * s[0] * angles[1].sin(),
    ];
    let ratios = [0, 1, 2].map(|i| s[i] / angles[i].sin());
    let spread = ratios.iter().cloned().fold(f64::MIN, f64::max) - ratios.iter().cloned().fold(f64::MAX, f64::min);
    Ok(TriangleData {
        cosh_sides: [ca.clone(), cb.clone(), cc.clone()],
        angles,
        lambda_sq,
        lambda,
        lambda_approx,
        lambda_by_pairing,
        sine_rule_residual: spread,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    pub product: String,
    pub trace: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeardonReport {
    pub expected: f64,
    pub entries: Vec<TraceEntry>,
    pub passed: bool,
}

/// `|trace|` of each of the six triple products of the half-turns about the
/// vertices equals `2λ`.
pub fn beardon_trace_check(t: &MobiusMap, u: &MobiusMap, v: &MobiusMap, lambda: f64) -> BeardonReport {
    let named = [("T", t), ("U", u), ("V", v)];
    let mut entries = Vec::new();
    for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)] {
        let p = named[i].1.compose(named[j].1).compose(named[k].1);
        let trace = p.trace();
        entries.push(TraceEntry {
            product: format!("{}{}{}", named[i].0, named[j].0, named[k].0),
            trace,
            residual: (trace.abs() - 2.0 * lambda).abs(),
        });
    }
    let passed = entries.iter().all(|e| e.residual < TOL);
    BeardonReport { expected: 2.0 * lambda, entries, passed }
}

// ---------------------------------------------------------------------------
// Signatures

/// `(g: m₁, …, m_r; s; t)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuchsianSignature {
    pub genus: u32,
    pub elliptic_orders: Vec<u32>,
    pub s: u32,
    pub t: u32,
}

impl fmt::Display for FuchsianSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let orders: Vec<String> = self.elliptic_orders.iter().map(|o| o.to_string()).collect();
        write!(f, "({}: {}; {}; {})", self.genus, orders.join(","), self.s, self.t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExceptionalMatch {
    /// `j` in `cos(jπ/q)`.
    pub multiple: u32,
    pub q: u32,
    pub value: f64,
    pub distance: f64,
    pub candidate_signature: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SignatureVerdict {
    Signature { signature: FuchsianSignature },
    /// `λ < 1`: discreteness is only possible at the listed values; nothing
    /// is claimed about discreteness.
    Exceptional { matches: Vec<ExceptionalMatch>, near_misses: Vec<ExceptionalMatch> },
}

/// Largest `q` scanned for the exceptional values.
pub const EXCEPTIONAL_Q_MAX: u32 = 200;
const NEAR_MISS: f64 = 1e-6;

/// `λ > 1` gives `(0: 2,2,2; 0; 1)` and `λ = 1` gives `(0: 2,2,2; 1; 0)`;
/// for `λ < 1` the candidates `cos(π/q)`, `cos(2π/q)`, `cos(3π/q)` are
/// matched.
pub fn signature_from_lambda(lambda: &ExactReal) -> SignatureVerdict {
    let cmp = lambda.cmp_exact(&er(1)).unwrap_or_else(|_| lambda.to_f64().total_cmp(&1.0));
    match cmp {
        std::cmp::Ordering::Greater => SignatureVerdict::Signature {
            signature: FuchsianSignature { genus: 0, elliptic_orders: vec![2, 2, 2], s: 0, t: 1 },
        },
        std::cmp::Ordering::Equal => SignatureVerdict::Signature {
            signature: FuchsianSignature { genus: 0, elliptic_orders: vec![2, 2, 2], s: 1, t: 0 },
        },
        std::cmp::Ordering::Less => exceptional(lambda.to_f64()),
    }
}

pub fn signature_from_lambda_f64(lambda: f64) -> SignatureVerdict {
    if (lambda - 1.0).abs() <= TOL {
        signature_from_lambda(&er(1))
    } else if lambda > 1.0 {
        signature_from_lambda(&er(2))
    } else {
        exceptional(lambda)
    }
}

fn exceptional(lambda: f64) -> SignatureVerdict {
    let mut matches = Vec::new();
    let mut near_misses = Vec::new();
    for (multiple, q_min, sig) in [(1u32, 3u32, "(0: 2,2,2,{q}; 0; 0)"), (2, 5, "(0: 2,3,{q}; 0; 0)"), (3, 7, "(0: 2,4,{q}; 0; 0)")] {
        for q in q_min..=EXCEPTIONAL_Q_MAX {
            let value = (multiple as f64 * PI / q as f64).cos();
            let distance = (value - lambda).abs();
            let entry = || ExceptionalMatch {
                multiple,
                q,
                value,
                distance,
                candidate_signature: sig.replace("{q}", &q.to_string()),
            };
            if distance <= TOL {
                matches.push(entry());
            } else if distance <= NEAR_MISS {
                near_misses.push(entry());
            }
        }
    }
    SignatureVerdict::Exceptional { matches, near_misses }
}

/// `Z_{m₁} ∗ ⋯ ∗ Z_{m_r} ∗ F_v` with `v = 2g + s + t − 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FreeProduct {
    pub cyclic_factors: Vec<u32>,
    pub free_rank: u32,
}

impl fmt::Display for FreeProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.cyclic_factors.iter().map(|m| format!("Z{m}")).collect();
        if self.free_rank > 0 {
            parts.push(format!("F{}", self.free_rank));
        }
        if parts.is_empty() {
            parts.push("1".into());
        }
        write!(f, "{}", parts.join(" * "))
    }
}

pub fn free_product_structure(sig: &FuchsianSignature) -> Result<FreeProduct, HyperbolicError> {
    if sig.s + sig.t == 0 {
        return Err(HyperbolicError::NotBoundaryType);
    }
    Ok(FreeProduct { cyclic_factors: sig.elliptic_orders.clone(), free_rank: 2 * sig.genus + sig.s + sig.t - 1 })
}

// ---------------------------------------------------------------------------
// Trace families

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TxTraces {
    /// `T(UV)^s`
    pub t_uv: f64,
    /// `T(UV)^s U`
    pub t_uv_u: f64,
    /// `T(VU)^s`
    pub t_vu: f64,
    /// `T(VU)^s V`
    pub t_vu_v: f64,
}

impl TxTraces {
    pub fn as_array(&self) -> [f64; 4] {
        [self.t_uv, self.t_uv_u, self.t_vu, self.t_vu_v]
    }
}

/// Closed forms for the four families, with `UV = −diag(1/k, k)`.
pub fn tx_trace_family(b: f64, m: f64, k: f64, s: i32) -> TxTraces {
    let sign = if s.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let ks = k.powi(s);
    let bm = b / m;
    let r = (b * b + m * m) / m;
    TxTraces {
        t_uv: -sign * bm * (ks - 1.0 / ks),
        t_uv_u: sign * (r * ks + 1.0 / (ks * m)),
        t_vu: sign * bm * (ks - 1.0 / ks),
        t_vu_v: sign * (r / (ks * k) + ks * k / m),
    }
}

fn mobius_pow(m: &MobiusMap, s: i32) -> MobiusMap {
    let base = if s < 0 { MobiusMap { a: m.d, b: -m.b, c: -m.c, d: m.a } } else { *m };
    (0..s.unsigned_abs()).fold(MobiusMap::identity(), |acc, _| acc.compose(&base))
}

/// The same four traces by matrix multiplication.
pub fn tx_trace_family_direct(n: &Normalization, s: i32) -> TxTraces {
    let (t, u, v) = (n.t, n.u, n.v);
    let uv = mobius_pow(&u.compose(&v), s);
    let vu = mobius_pow(&v.compose(&u), s);
    TxTraces {
        t_uv: t.compose(&uv).trace(),
        t_uv_u: t.compose(&uv).compose(&u).trace(),
        t_vu: t.compose(&vu).trace(),
        t_vu_v: t.compose(&vu).compose(&v).trace(),
    }
}

/// Whether every family member with `|s| ≤ s_max` is hyperbolic. The two
/// pure families reduce to `T` itself at `s = 0` and are skipped there.
pub fn tx_families_hyperbolic(b: f64, m: f64, k: f64, s_max: i32) -> bool {
    (-s_max..=s_max).all(|s| {
        let tr = tx_trace_family(b, m, k, s);
        let pure_ok = s == 0 || (tr.t_uv.abs() > 2.0 && tr.t_vu.abs() > 2.0);
        pure_ok && tr.t_uv_u.abs() > 2.0 && tr.t_vu_v.abs() > 2.0
    })
}

/// Two half-turns `A`, `B` generate `Z₂ ∗ Z₂` when `AB ≠ id` and `AB` has
/// real fixed points, i.e. is parabolic or hyperbolic.
pub fn involutions_generate_free_product(a: &MobiusMap, b: &MobiusMap) -> bool {
    let is_half_turn = |m: &MobiusMap| m.trace().abs() < TOL;
    if !is_half_turn(a) || !is_half_turn(b) {
        return false;
    }
    matches!(mobius_classify(&a.compose(b)), MobiusKind::Parabolic | MobiusKind::Hyperbolic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad_field::QuadExt;

    fn pt(x: i64, l: i64, y: i64) -> InteriorPoint {
        InteriorPoint::new(HilbClass::new(x, l, y)).unwrap()
    }

    fn q3(a: (i64, i64), b: (i64, i64)) -> ExactReal {
        ExactReal::Quadratic(
            QuadExt::new(3, BigRational::new(a.0.into(), a.1.into()), BigRational::new(b.0.into(), b.1.into())).unwrap(),
        )
    }

    fn fixed_point_normalization() -> Normalization {
        let [p0, p1, p2] = generator_fixed_points();
        normalize_triple(&p0, &p1, &p2).unwrap()
    }

    #[test]
    fn cosh_distances() {
        let [p0, p1, p2] = generator_fixed_points();
        assert_eq!(distance_cosh(&p1, &p2).unwrap(), er(2));
        assert_eq!(distance_cosh(&p0, &p2).unwrap(), er(6));
        assert_eq!(distance_cosh(&p0, &p1).unwrap(), er(2));
        assert_eq!(distance_cosh(&p0, &p0).unwrap(), er(1));
        // scaling does not change the point
        assert_eq!(distance_cosh(&pt(2, -2, 0), &p0).unwrap(), er(1));
        // an irrational distance: (1,0,0) has square 4
        let d = distance_cosh(&pt(1, 0, 0), &p1).unwrap();
        assert_eq!(d.radicand(), Some(&BigInt::from(2)));
    }

    #[test]
    fn interior_points_validated() {
        assert!(InteriorPoint::new(HilbClass::new(0, 1, 0)).is_err());
        assert!(InteriorPoint::new(HilbClass::new(-1, 1, 0)).is_err());
    }

    #[test]
    fn normalization_constants() {
        let n = fixed_point_normalization();
        let e = n.exact.as_ref().unwrap();
        assert_eq!(e.k, q3((2, 1), (1, 1)));
        assert_eq!(e.m, q3((3, 4), (-1, 4)));
        assert_eq!(e.b_sq, q3((10, 8), (-5, 8)));
        assert_eq!(e.trace_tu, er(4));
        assert_eq!(e.trace_sq_tvu, er(20));
        assert!((n.k - (2.0 + 3f64.sqrt())).abs() < TOL);
        assert!(n.b > 0.0);
        // b²/m² = 5/3 and (k − 1/k)² = 12
        let ratio = e.b_sq.try_div(&e.m.square()).unwrap();
        assert_eq!(ratio, ExactReal::Rational(BigRational::new(5.into(), 3.into())));
    }

    #[test]
    fn normalization_preserves_distances() {
        let n = fixed_point_normalization();
        let [z0, z1, z2] = n.images;
        assert!((z0.distance_cosh(&z1) - 2.0).abs() < TOL);
        assert!((z1.distance_cosh(&z2) - 2.0).abs() < TOL);
        assert!((z0.distance_cosh(&z2) - 6.0).abs() < TOL);
        for (m, z) in [(n.t, z0), (n.u, z1), (n.v, z2)] {
            let w = m.apply(z);
            assert!((w.re - z.re).abs() < TOL && (w.im - z.im).abs() < TOL);
            assert!(m.trace().abs() < TOL);
            assert!((m.det() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn generic_triples_use_float_path() {
        let (a, b, c) = (pt(1, 0, 0), pt(1, -1, 1), pt(3, -1, 2));
        let n = normalize_triple(&a, &b, &c).unwrap();
        assert!(n.exact.is_none());
        let [z0, z1, z2] = n.images;
        assert!((z0.distance_cosh(&z1) - n.cosh[0].to_f64()).abs() < 1e-9);
        assert!((z1.distance_cosh(&z2) - n.cosh[1].to_f64()).abs() < 1e-9);
        assert!((z0.distance_cosh(&z2) - n.cosh[2].to_f64()).abs() < 1e-9);
    }

    #[test]
    fn degenerate_triples() {
        let [p0, p1, _] = generator_fixed_points();
        assert!(matches!(normalize_triple(&p0, &p1, &p1), Err(HyperbolicError::DegenerateTriangle(_))));
        // the axis of g* is the plane e = 0
        let axis = normalize_triple(&pt(1, 0, 0), &pt(1, 0, 1), &pt(2, 0, 1));
        assert!(matches!(axis, Err(HyperbolicError::DegenerateTriangle(_))), "{axis:?}");
    }

    #[test]
    fn mobius_examples() {
        let n = fixed_point_normalization();
        assert_eq!(mobius_classify(&n.u), MobiusKind::Elliptic);
        assert_eq!(mobius_classify(&MobiusMap::new(1.0, 1.0, 0.0, 1.0).unwrap()), MobiusKind::Parabolic);
        assert_eq!(mobius_classify(&MobiusMap::new(4.0, 0.0, 0.0, 1.0).unwrap()), MobiusKind::Hyperbolic);
        assert_eq!(mobius_classify(&MobiusMap::identity()), MobiusKind::Identity);
        assert_eq!(mobius_classify(&n.u.compose(&n.u)), MobiusKind::Identity);
        assert!(MobiusMap::new(0.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn triangle_examples() {
        let t = solve_triangle(&er(2), &er(6), &er(2)).unwrap();
        assert_eq!(t.lambda_sq, er(5));
        assert_eq!(t.lambda, Some(ExactReal::sqrt_rational(&BigRational::from_integer(5.into())).unwrap()));
        for l in t.lambda_by_pairing {
            assert!((l - 5f64.sqrt()).abs() < TOL);
        }
        assert!(t.sine_rule_residual < TOL);
        // the angle between the two sides of cosh 2 is opposite the side of cosh 6
        assert!((t.angles[1].cos() + 2.0 / 3.0).abs() < TOL);

        let eq = solve_triangle(&er(2), &er(2), &er(2)).unwrap();
        for a in eq.angles {
            assert!((a.cos() - 2.0 / 3.0).abs() < TOL);
        }
        let relabeled = solve_triangle(&er(6), &er(2), &er(2)).unwrap();
        assert_eq!(relabeled.lambda, t.lambda);

        assert!(solve_triangle(&er(1), &er(2), &er(2)).is_err());
        // cosh 7 = cosh 2a when cosh a = 2
        assert!(solve_triangle(&er(2), &er(2), &er(7)).is_err());
    }

    #[test]
    fn beardon_traces_for_fixed_point_triple() {
        let n = fixed_point_normalization();
        let report = beardon_trace_check(&n.t, &n.u, &n.v, 5f64.sqrt());
        assert!(report.passed, "{report:?}");
        assert_eq!(report.entries.len(), 6);
        // lattice side: every ordering of the three involutions has trace 19
        let gens = crate::isometry::generators();
        for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)] {
            let p = gens[i].mul(&gens[j]).mul(&gens[k]);
            assert_eq!(p.trace(), BigInt::from(19));
        }
    }

    #[test]
    fn signature_chain() {
        let five = ExactReal::sqrt_rational(&BigRational::from_integer(5.into())).unwrap();
        let SignatureVerdict::Signature { signature } = signature_from_lambda(&five) else { panic!() };
        assert_eq!(signature, FuchsianSignature { genus: 0, elliptic_orders: vec![2, 2, 2], s: 0, t: 1 });
        assert_eq!(signature.to_string(), "(0: 2,2,2; 0; 1)");
        let fp = free_product_structure(&signature).unwrap();
        assert_eq!(fp, FreeProduct { cyclic_factors: vec![2, 2, 2], free_rank: 0 });
        assert_eq!(fp.to_string(), "Z2 * Z2 * Z2");

        let SignatureVerdict::Signature { signature } = signature_from_lambda(&er(1)) else { panic!() };
        assert_eq!((signature.s, signature.t), (1, 0));
    }

    #[test]
    fn exceptional_values() {
        let SignatureVerdict::Exceptional { matches, .. } = signature_from_lambda_f64(0.5) else { panic!() };
        assert!(matches.iter().any(|m| m.multiple == 1 && m.q == 3));
        assert!(matches.iter().any(|m| m.multiple == 2 && m.q == 6));
        assert!(matches.iter().any(|m| m.multiple == 3 && m.q == 9));
        assert!(matches.iter().all(|m| m.distance <= TOL));
        let SignatureVerdict::Exceptional { matches, near_misses } = signature_from_lambda_f64(0.3) else { panic!() };
        assert!(matches.is_empty());
        assert!(near_misses.iter().all(|m| m.distance > TOL));
    }

    #[test]
    fn free_products() {
        let sig = |g, e: Vec<u32>, s, t| FuchsianSignature { genus: g, elliptic_orders: e, s, t };
        assert_eq!(free_product_structure(&sig(0, vec![], 2, 0)).unwrap().to_string(), "F1");
        assert_eq!(free_product_structure(&sig(1, vec![2], 1, 0)).unwrap().to_string(), "Z2 * F2");
        assert_eq!(free_product_structure(&sig(0, vec![2, 3, 7], 0, 0)), Err(HyperbolicError::NotBoundaryType));
    }

    #[test]
    fn tx_families() {
        let n = fixed_point_normalization();
        let tr = tx_trace_family(n.b, n.m, n.k, 0);
        assert!((tr.t_uv_u - 4.0).abs() < TOL);
        let tr1 = tx_trace_family(n.b, n.m, n.k, 1);
        assert!((tr1.t_vu.abs() - 2.0 * 5f64.sqrt()).abs() < TOL);
        for s in -6..=6 {
            let closed = tx_trace_family(n.b, n.m, n.k, s).as_array();
            let direct = tx_trace_family_direct(&n, s).as_array();
            for (c, d) in closed.iter().zip(direct) {
                // PSL₂: traces agree up to sign
                assert!((c.abs() - d.abs()).abs() < 1e-9 * c.abs().max(1.0), "s = {s}: {c} vs {d}");
            }
        }
        assert!(tx_families_hyperbolic(n.b, n.m, n.k, 6));
        // s = 0 in the pure families is T itself
        assert!(tx_trace_family(n.b, n.m, n.k, 0).t_uv.abs() < TOL);
        // TU ↔ ι₀*ι₁* has SO trace 15 = 4² − 1
        let gens = crate::isometry::generators();
        assert_eq!(gens[0].mul(&gens[1]).trace(), BigInt::from(15));
    }

    #[test]
    fn tx_monotonicity() {
        let n = fixed_point_normalization();
        for s in 0..10 {
            let a = n.k.powi(s + 1) - n.k.powi(-s - 1);
            let b = n.k.powi(s) - n.k.powi(-s);
            assert!(a.abs() >= b.abs());
        }
    }

    #[test]
    fn pairs_of_half_turns() {
        let n = fixed_point_normalization();
        assert!(involutions_generate_free_product(&n.t, &n.u));
        assert!(involutions_generate_free_product(&n.u, &n.v));
        assert!(involutions_generate_free_product(&n.t, &n.v));
        // two half-turns about points at distance d compose to a translation by 2d;
        // the same point gives the identity
        assert!(!involutions_generate_free_product(&n.u, &n.u));
        // an order-3 rotation is not a half-turn
        let rot = MobiusMap::new(0.5, -(3f64.sqrt()) / 2.0, 3f64.sqrt() / 2.0, 0.5).unwrap();
        assert!(!involutions_generate_free_product(&rot, &n.u));
    }

    #[test]
    fn adjoint_bridge() {
        let n = fixed_point_normalization();
        for seed in 0..300 {
            let w = crate::words::random_word(seed as usize % 9, seed);
            let m = crate::words::evaluate(&w);
            let h = half_plane_image(&w, &n);
            let so = crate::isometry::classify(&m).unwrap();
            let so_trace = so.so_trace.to_string().parse::<f64>().unwrap();
            let t2 = h.trace() * h.trace();
            assert!((t2 - (so_trace + 1.0)).abs() <= 1e-9 * t2.max(1.0), "{w}: {t2} vs {so_trace}");
            let expect = match so.kind_name() {
                "identity" => MobiusKind::Identity,
                "elliptic" => MobiusKind::Elliptic,
                "parabolic" => MobiusKind::Parabolic,
                _ => MobiusKind::Hyperbolic,
            };
            assert_eq!(mobius_classify(&h), expect, "{w}");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn interior() -> impl Strategy<Value = InteriorPoint> {
            (1i64..40, -20i64..20, -30i64..30)
                .prop_filter_map("interior", |(x, l, y)| InteriorPoint::new(HilbClass::new(x, l, y)).ok())
        }

        proptest! {
            #[test]
            fn distance_symmetric_and_at_least_one(a in interior(), b in interior()) {
                let ab = distance_cosh(&a, &b).unwrap();
                prop_assert_eq!(&ab, &distance_cosh(&b, &a).unwrap());
                prop_assert!(ab.to_f64() >= 1.0 - 1e-12);
            }

            #[test]
            fn cosh_triangle_inequality(a in interior(), b in interior(), c in interior()) {
                let f = |p: &InteriorPoint, q: &InteriorPoint| distance_cosh(p, q).unwrap().to_f64();
                let (ab, bc, ac) = (f(&a, &b), f(&b, &c), f(&a, &c));
                let sh = |x: f64| (x * x - 1.0).max(0.0).sqrt();
                prop_assert!(ac <= (ab * bc + sh(ab) * sh(bc)) * (1.0 + 1e-9));
            }

            #[test]
            fn lambda_independent_of_labeling(a in 2i64..30, b in 2i64..30, c in 2i64..30) {
                let (a, b, c) = (er(a), er(b), er(c));
                if let Ok(t) = solve_triangle(&a, &b, &c) {
                    let u = solve_triangle(&c, &a, &b).unwrap();
                    prop_assert_eq!(&t.lambda_sq, &u.lambda_sq);
                    for l in t.lambda_by_pairing {
                        prop_assert!((l - t.lambda_approx).abs() <= 1e-9 * t.lambda_approx.max(1.0));
                    }
                }
            }
        }
    }
}
