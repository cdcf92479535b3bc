//! Reduced words in the free product `Z₂ ∗ Z₂ ∗ Z₂ = ⟨ι₀, ι₁, ι₂⟩`, their
//! evaluation to lattice isometries, and the inverse problem by descent on
//! the `e`-coordinate.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::isometry::{g_star, generators, iota_n_star, nonnatural_shape, LatticeIsometry};
use crate::lattice::{dn_divisor, pair_surface, HilbClass};
use crate::quad_field::{unit_log, GoldenInt, QuadExt};

pub const DEFAULT_L_MAX: u64 = 64;

/// The word of `g = ι₀ ∘ ι₁ ∘ ι₂`.
pub const G_WORD: [u8; 3] = [0, 1, 2];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum NotInGroupReason {
    DeterminantNotOne,
    ConeSwapping,
    /// `M·e` is not of the form `(x, λ<0, y)` with `x·h₁ + y·h₂` ample.
    Shape { image_of_e: HilbClass },
    /// No conjugated involution strictly raises the `e`-coordinate.
    NoDescent { image_of_e: HilbClass },
    /// The natural tail is not a power of `g*`.
    NotNaturalPower { detail: String },
}

impl fmt::Display for NotInGroupReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotInGroupReason::DeterminantNotOne => write!(f, "determinant is not 1"),
            NotInGroupReason::ConeSwapping => write!(f, "positive cone is not preserved"),
            NotInGroupReason::Shape { image_of_e } => write!(f, "image of e {image_of_e} has the wrong shape"),
            NotInGroupReason::NoDescent { image_of_e } => {
                write!(f, "no involution raises the e-coordinate of {image_of_e}")
            }
            NotInGroupReason::NotNaturalPower { detail } => write!(f, "natural part is not a power of g*: {detail}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("letter {0} is not one of 0, 1, 2")]
    BadLetter(i64),
    #[error("not in the group: {0}")]
    NotInGroup(NotInGroupReason),
    #[error("no descending involution with |l| ≤ {l_max} at step {step}")]
    BoundExceeded { l_max: u64, step: usize },
}

/// A word over `{0, 1, 2}` with no two equal adjacent letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "RawWord")]
pub struct ReducedWord {
    letters: Vec<u8>,
}

#[derive(Deserialize)]
struct RawWord {
    letters: Vec<i64>,
}

impl TryFrom<RawWord> for ReducedWord {
    type Error = WordError;

    fn try_from(raw: RawWord) -> Result<Self, WordError> {
        reduce(&raw.letters)
    }
}

impl ReducedWord {
    pub fn empty() -> Self {
        ReducedWord::default()
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Reduced form of `self ++ other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for &k in &other.letters {
            out.push(k);
        }
        out
    }

    /// Every generator is an involution, so the inverse is the reversal.
    pub fn inverse(&self) -> Self {
        ReducedWord { letters: self.letters.iter().rev().copied().collect() }
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        (0..n.unsigned_abs()).fold(Self::empty(), |acc, _| acc.concat(&base))
    }

    fn push(&mut self, k: u8) {
        if self.letters.last() == Some(&k) {
            self.letters.pop();
        } else {
            self.letters.push(k);
        }
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.letters.iter().map(|k| k.to_string()).collect();
        write!(f, "[{}]", s.join(","))
    }
}

/// Cancels adjacent equal letters until none remain.
pub fn reduce(letters: &[i64]) -> Result<ReducedWord, WordError> {
    let mut w = ReducedWord::empty();
    for &k in letters {
        if !(0..3).contains(&k) {
            return Err(WordError::BadLetter(k));
        }
        w.push(k as u8);
    }
    Ok(w)
}

/// The word `(k₁, …, k_r)` stands for `ι_{k₁} ∘ ⋯ ∘ ι_{k_r}` and evaluates
/// to the pullback `M_{k_r}⋯M_{k₁}`.
pub fn evaluate(w: &ReducedWord) -> LatticeIsometry {
    let gens = generators();
    w.letters
        .iter()
        .fold(LatticeIsometry::identity(), |acc, &k| gens[k as usize].mul(&acc))
}

pub fn g_word() -> ReducedWord {
    ReducedWord { letters: G_WORD.to_vec() }
}

/// Word of `ι_n = g^{−l} ∘ ι_k ∘ g^{l}`, whose pullback is `g*^l·ι_k*·g*^{−l}`.
pub fn iota_n_word(n: i64) -> ReducedWord {
    let (l, k) = (n.div_euclid(3), n.rem_euclid(3) as u8);
    let g = g_word();
    g.pow(-l).concat(&ReducedWord { letters: vec![k] }).concat(&g.pow(l))
}

/// For `M` fixing `e`, returns `n` with `M = g*ⁿ`.
pub fn natural_power_detect(m: &LatticeIsometry) -> Result<i64, WordError> {
    let fail = |detail: String| WordError::NotInGroup(NotInGroupReason::NotNaturalPower { detail });
    let e = HilbClass::e();
    if m.apply(&e) != e {
        return Err(fail("does not fix e".into()));
    }
    let col = m.apply(&HilbClass::new(1, 0, 0));
    let u = GoldenInt::new(col.x.clone(), col.y.clone());
    let (sign, k) = unit_log(&u).map_err(|err| fail(err.to_string()))?;
    if sign != 1 || k % 6 != 0 {
        return Err(fail(format!("action on NS(X) is multiplication by {}η^{k}", if sign < 0 { "−" } else { "" })));
    }
    let n = k / 6;
    if &g_star().pow(n) != m {
        return Err(fail(format!("matches η^{k} on h₁ but differs from g*^{n}")));
    }
    Ok(n)
}

// ---------------------------------------------------------------------------
// Descent

/// One step of the descent: `M ← ι_n*·M` with `n = 3l + k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DescentStep {
    pub image_of_e: HilbClass,
    #[serde(with = "crate::json_int")]
    pub lam_before: BigInt,
    #[serde(with = "crate::json_int")]
    pub lam_after: BigInt,
    pub n: i64,
    pub k: u8,
    pub l: i64,
    /// The indices `j` such that the slope of `g*^{−l}·M·e` lies in the
    /// slope interval guaranteeing that `ι_j*` raises the `e`-coordinate.
    pub slope_intervals: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub word: ReducedWord,
    /// Exponent of the final natural factor `g*^N`.
    pub natural_power: i64,
    pub steps: Vec<DescentStep>,
}

/// `pair(v_s, D_n)` for the surface part of `v`.
fn f_value(v: &HilbClass, n: i64) -> BigInt {
    pair_surface(&v.surface_part(), &dn_divisor(n))
}

/// Order used to break ties: smallest `|l|`, then smallest `k`, then `l < 0`.
fn tie_key(n: i64) -> (u64, i64, bool) {
    let l = n.div_euclid(3);
    (l.unsigned_abs(), n.rem_euclid(3), l >= 0)
}

/// Among `n` with `|l| ≤ l_max`, the minimizers of `f(n) = pair(v_s, η^{2n})`.
///
/// `f(n) = 2(v·η^{−2n} + v̄·η^{2n})` (up to the positive factor from the
/// pairing) is strictly convex in `n` for ample `v_s`, so a walk from `n = 0`
/// reaches the window's minimum.
fn window_argmin(v: &HilbClass, l_max: u64) -> (i64, BigInt) {
    let l_max = l_max.min(i64::MAX as u64 / 8) as i64;
    let (lo, hi) = (-3 * l_max, 3 * l_max + 2);
    let mut n = 0i64;
    let mut cur = f_value(v, n);
    let dir = if n > lo && f_value(v, n - 1) < cur { -1 } else { 1 };
    loop {
        let next = n + dir;
        if next < lo || next > hi {
            break;
        }
        let fv = f_value(v, next);
        if fv < cur || (fv == cur && tie_key(next) < tie_key(n)) {
            n = next;
            cur = fv;
        } else {
            break;
        }
    }
    // the other neighbour can tie
    let other = n - dir;
    if other >= lo && other <= hi && f_value(v, other) == cur && tie_key(other) < tie_key(n) {
        n = other;
    }
    (n, cur)
}

/// Which slope intervals contain the slope `y/x` of `w` (with `x > 0`),
/// decided by exact signs in `Q(√10)`.
pub fn slope_intervals(w: &HilbClass) -> Vec<u8> {
    if !w.x.is_positive() {
        return Vec::new();
    }
    let r = BigRational::new(w.y.clone(), w.x.clone());
    // endpoints (p ∓ q√10)/den
    let ends: [(i64, i64, i64); 3] = [(2, 2, 9), (7, 2, 9), (16, 1, 12)];
    let mut out = Vec::new();
    for (j, (p, q, den)) in ends.iter().enumerate() {
        let lo = QuadExt::from_frac(10, *p, -q, *den);
        let hi = QuadExt::from_frac(10, *p, *q, *den);
        let above = lo.scale(&-BigRational::one()).add_rational(&r);
        let below = hi.add_rational(&-r.clone());
        if above.sign() > 0 && below.sign() > 0 {
            out.push(j as u8);
        }
    }
    out
}

/// Writes a cone-preserving isometry of determinant 1 as a reduced word.
///
/// Each step applies the conjugated involution `ι_n*` that most increases
/// the (negative) `e`-coordinate of `M·e`, scanning `n = 3l + k` with
/// `|l| ≤ l_max`. When `M` fixes `e` the remainder is a power of `g*`.
pub fn decompose(m: &LatticeIsometry, l_max: u64) -> Result<Decomposition, WordError> {
    let not_in = |r| WordError::NotInGroup(r);
    if m.det() != BigInt::one() {
        return Err(not_in(NotInGroupReason::DeterminantNotOne));
    }
    if !m.preserves_cone() {
        return Err(not_in(NotInGroupReason::ConeSwapping));
    }
    let g = g_star();
    let mut cur = m.clone();
    let mut steps = Vec::new();
    let mut chosen = Vec::new();
    loop {
        let v = match nonnatural_shape(&cur) {
            Ok(None) => break,
            Ok(Some(v)) => v,
            Err(_) => return Err(not_in(NotInGroupReason::Shape { image_of_e: cur.apply(&HilbClass::e()) })),
        };
        let lam = v.lam.clone();
        let (n, fmin) = window_argmin(&v, l_max);
        // [ι_n*·v]_e = −3λ − f(n)
        let lam_after = -BigInt::from(3) * &lam - &fmin;
        if lam_after <= lam {
            let (global, gmin) = window_argmin(&v, u64::MAX);
            let global_l = global.div_euclid(3).unsigned_abs();
            if global_l > l_max && -BigInt::from(3) * &lam - gmin > lam {
                return Err(WordError::BoundExceeded { l_max, step: steps.len() });
            }
            return Err(not_in(NotInGroupReason::NoDescent { image_of_e: v }));
        }
        let (l, k) = (n.div_euclid(3), n.rem_euclid(3) as u8);
        let w = g.pow(-l).apply(&v);
        let next = iota_n_star(n).mul(&cur);
        debug_assert_eq!(next.apply(&HilbClass::e()).lam, lam_after);
        steps.push(DescentStep {
            image_of_e: v,
            lam_before: lam,
            lam_after,
            n,
            k,
            l,
            slope_intervals: slope_intervals(&w),
        });
        chosen.push(n);
        cur = next;
    }
    let natural_power = natural_power_detect(&cur)?;
    // M = ι_{n₁}*⋯ι_{n_r}*·g*^N, and evaluate(u ++ v) = evaluate(v)·evaluate(u)
    let mut word = g_word().pow(natural_power);
    for &n in chosen.iter().rev() {
        word = word.concat(&iota_n_word(n));
    }
    Ok(Decomposition { word, natural_power, steps })
}

pub fn is_member(m: &LatticeIsometry) -> bool {
    decompose(m, DEFAULT_L_MAX).is_ok()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RelationCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// `evaluate([0,1,2]) = g*`, `ι_{3l+k}*` equals the evaluated conjugated word,
/// and each `ι_n*` is an involution, for `|l| ≤ l_range`.
pub fn verify_relations(l_range: i64) -> RelationReport {
    let mut checks = vec![RelationCheck { name: "evaluate([0,1,2]) = g*".into(), passed: evaluate(&g_word()) == g_star() }];
    for l in -l_range..=l_range {
        for k in 0..3 {
            let n = 3 * l + k;
            let m = iota_n_star(n);
            checks.push(RelationCheck {
                name: format!("iota_{n}* = evaluate(word of iota_{n})"),
                passed: evaluate(&iota_n_word(n)) == m,
            });
            checks.push(RelationCheck { name: format!("iota_{n}* is an involution"), passed: m.mul(&m).is_identity() });
        }
    }
    RelationReport { checks }
}

/// Uniform reduced word of exactly `length` letters, deterministic in `seed`.
pub fn random_word(length: usize, seed: u64) -> ReducedWord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_word_with(length, &mut rng)
}

pub fn random_word_with<R: Rng>(length: usize, rng: &mut R) -> ReducedWord {
    let mut letters: Vec<u8> = Vec::with_capacity(length);
    for _ in 0..length {
        let k = match letters.last() {
            None => rng.gen_range(0..3),
            Some(&p) => (p + 1 + rng.gen_range(0..2)) % 3,
        };
        letters.push(k);
    }
    ReducedWord { letters }
}
