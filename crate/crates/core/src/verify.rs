//! The reproduction suite: a list of named checks, each tagged with the
//! statement it reproduces.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::hyperbolic::{
    beardon_trace_check, distance_cosh, free_product_structure, generator_fixed_points, normalize_triple,
    signature_from_lambda, solve_triangle, tx_families_hyperbolic, tx_trace_family, SignatureVerdict,
};
use crate::isometry::{
    classify, fixed_points, g_star, iota_n_star, BoundaryPoint, FixedPoints, IsometryKind, LatticeIsometry, IOTA0,
    IOTA1, IOTA2,
};
use crate::lattice::{
    default_polarization, is_ample_hilb, is_k_very_ample, minus_d_classes, no_minus_ten_certificate, HilbClass,
    SurfaceClass, DEFAULT_WALL_BOUND,
};
use crate::quad_field::{eta_power, ExactReal, QuadExt};
use crate::render::{disk_distance_cosh, parse_points, render_svg, DiskScene};
use crate::words::{decompose, evaluate, random_word_with, verify_relations, NotInGroupReason, WordError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyConfig {
    /// Coordinate cap for the brute-force lattice searches.
    pub bound: u64,
    pub l_max: u64,
    pub seed: u64,
    /// Number of random words in the round-trip check.
    pub samples: usize,
    /// Generator matrices the generator checks are run against.
    pub generators: [[[i64; 3]; 3]; 3],
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { bound: 200, l_max: 64, seed: 0, samples: 10_000, generators: [IOTA0, IOTA1, IOTA2] }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub anchor: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn er(n: i64) -> ExactReal {
    ExactReal::int(n)
}

fn sqrt_int(n: i64) -> ExactReal {
    ExactReal::sqrt_rational(&BigRational::from_integer(n.into())).expect("small radicand")
}

fn config_generators(cfg: &VerifyConfig) -> Result<[LatticeIsometry; 3], String> {
    let mut out = Vec::new();
    for (i, g) in cfg.generators.iter().enumerate() {
        out.push(LatticeIsometry::from_i64(*g).map_err(|e| format!("generator {i}: {e}"))?);
    }
    Ok([out[0].clone(), out[1].clone(), out[2].clone()])
}

fn generator_fidelity(cfg: &VerifyConfig) -> Outcome {
    let gens = config_generators(cfg)?;
    for (i, (g, pinned)) in gens.iter().zip([IOTA0, IOTA1, IOTA2]).enumerate() {
        ensure(g.to_i64() == Some(pinned), || format!("generator {i} differs from the pinned matrix"))?;
        ensure(g.mul(g).is_identity(), || format!("generator {i} is not an involution"))?;
    }
    Ok("three involutive Gram isometries".into())
}

fn g_star_identity(cfg: &VerifyConfig) -> Outcome {
    let [i0, i1, i2] = config_generators(cfg)?;
    let g = i2.mul(&i1).mul(&i0);
    ensure(g.to_i64() == Some([[5, 0, 8], [0, 1, 0], [8, 0, 13]]), || format!("product is {g}"))?;
    ensure(g.apply(&HilbClass::e()) == HilbClass::e(), || "g* moves e".into())?;
    let col = g.apply(&HilbClass::new(1, 0, 0));
    let eta6 = eta_power(6);
    ensure(col.x == eta6.a && col.y == eta6.b, || format!("h1 maps to {col}, not η⁶"))?;
    match classify(&g).map_err(|e| e.to_string())?.kind {
        IsometryKind::Hyperbolic { exact: Some(ExactReal::Quadratic(q)), .. } if q == QuadExt::from_ints(5, 9, 4) => {}
        other => return Err(format!("spectral radius {other:?}")),
    }
    Ok("g* = [[5,0,8],[0,1,0],[8,0,13]], restriction η⁶, spectral radius 9+4√5".into())
}

fn interior_fixed_points(cfg: &VerifyConfig) -> Outcome {
    let gens = config_generators(cfg)?;
    let expected = [HilbClass::new(1, -1, 0), HilbClass::new(1, -1, 1), HilbClass::new(2, -1, 3)];
    for (g, p) in gens.iter().zip(&expected) {
        match fixed_points(g).map_err(|e| e.to_string())? {
            FixedPoints::Interior { point } if &point == p => {}
            other => return Err(format!("expected {p}, got {other:?}")),
        }
        ensure(p.square() == BigInt::from(2), || format!("{p} has square {}", p.square()))?;
        let a = is_ample_hilb(p, &default_polarization(), DEFAULT_WALL_BOUND).map_err(|e| e.to_string())?;
        ensure(a.is_ample(), || format!("{p}: {a:?}"))?;
    }
    Ok("(1,−1,0), (1,−1,1), (2,−1,3), each of square 2 and ample".into())
}

fn boundary_fixed_points(_: &VerifyConfig) -> Outcome {
    let FixedPoints::Boundary { attracting, repelling } = fixed_points(&g_star()).map_err(|e| e.to_string())? else {
        return Err("g* has no boundary fixed points".into());
    };
    let plus = ExactReal::Quadratic(QuadExt::from_frac(5, -1, 1, 2));
    let minus = ExactReal::Quadratic(QuadExt::from_frac(5, -1, -1, 2));
    for (bp, first) in [(&attracting, plus), (&repelling, minus)] {
        let BoundaryPoint::Exact(c) = bp else { return Err("inexact boundary point".into()) };
        ensure(c[0] == first && c[1] == er(0) && c[2] == er(1), || format!("got {c:?}"))?;
    }
    Ok("((−1+√5)/2, 0, 1) and (−(1+√5)/2, 0, 1) in Q(√5)".into())
}

fn relations(_: &VerifyConfig) -> Outcome {
    let report = verify_relations(3);
    ensure(report.all_passed(), || format!("{:?}", report.failures().collect::<Vec<_>>()))?;
    match fixed_points(&iota_n_star(3)).map_err(|e| e.to_string())? {
        FixedPoints::Interior { point } if point == HilbClass::new(5, -1, 8) => {}
        other => return Err(format!("ι₃* fixed point {other:?}")),
    }
    Ok(format!("{} relation checks, ι₃* fixes (5,−1,8)", report.checks.len()))
}

fn minus_ten_and_isotropy(cfg: &VerifyConfig) -> Outcome {
    let b10 = cfg.bound.min(100);
    let found = minus_d_classes(-10, b10);
    ensure(found.is_empty(), || format!("square −10 classes: {found:?}"))?;
    ensure(no_minus_ten_certificate().all_inconsistent, || "residue table has a consistent row".into())?;
    let b0 = cfg.bound.min(200);
    let iso = minus_d_classes(0, b0);
    ensure(iso == vec![HilbClass::new(0, 0, 0)], || format!("isotropic classes: {iso:?}"))?;
    Ok(format!("no square −10 up to {b10}, residues inconsistent, no isotropic class up to {b0}"))
}

fn hyperbolic_chain(_: &VerifyConfig) -> Outcome {
    let [p0, p1, p2] = generator_fixed_points();
    let d = |a, b| distance_cosh(a, b).map_err(|e| e.to_string());
    let cosh = [d(&p0, &p1)?, d(&p1, &p2)?, d(&p0, &p2)?];
    ensure(cosh == [er(2), er(2), er(6)], || format!("cosh distances {cosh:?}"))?;
    let n = normalize_triple(&p0, &p1, &p2).map_err(|e| e.to_string())?;
    let e = n.exact.as_ref().ok_or("no exact constants")?;
    let q3 = |a: i64, b: i64, den: i64| ExactReal::Quadratic(QuadExt::from_frac(3, a, b, den));
    ensure(e.k == q3(2, 1, 1), || format!("k = {}", e.k))?;
    ensure(e.m == q3(3, -1, 4), || format!("m = {}", e.m))?;
    ensure(e.b_sq == q3(10, -5, 8), || format!("b² = {}", e.b_sq))?;
    let tri = solve_triangle(&cosh[0], &cosh[1], &cosh[2]).map_err(|e| e.to_string())?;
    ensure(tri.lambda == Some(sqrt_int(5)), || format!("λ = {:?}", tri.lambda))?;
    ensure(e.trace_sq_tvu == er(20), || format!("trace² = {}", e.trace_sq_tvu))?;
    let report = beardon_trace_check(&n.t, &n.u, &n.v, tri.lambda_approx);
    ensure(report.passed, || format!("{report:?}"))?;
    let gens = crate::isometry::generators();
    for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)] {
        let t = gens[i].mul(&gens[j]).mul(&gens[k]).trace();
        ensure(t == BigInt::from(19), || format!("so trace of ({i}{j}{k}) is {t}"))?;
    }
    Ok("cosh (2,2,6), k=2+√3, m=(3−√3)/4, b²=5(2−√3)/8, λ=√5, |traces|=2√5, so traces 19".into())
}

fn signature_chain(_: &VerifyConfig) -> Outcome {
    let SignatureVerdict::Signature { signature } = signature_from_lambda(&sqrt_int(5)) else {
        return Err("λ = √5 gave an exceptional verdict".into());
    };
    ensure(signature.to_string() == "(0: 2,2,2; 0; 1)", || signature.to_string())?;
    let fp = free_product_structure(&signature).map_err(|e| e.to_string())?;
    ensure(fp.cyclic_factors == vec![2, 2, 2] && fp.free_rank == 0, || fp.to_string())?;
    Ok(format!("{signature} ⇒ {fp}"))
}

fn trace_families(_: &VerifyConfig) -> Outcome {
    let [p0, p1, p2] = generator_fixed_points();
    let n = normalize_triple(&p0, &p1, &p2).map_err(|e| e.to_string())?;
    let tol = crate::hyperbolic::TOL;
    let tu = tx_trace_family(n.b, n.m, n.k, 0).t_uv_u;
    ensure((tu - 4.0).abs() < tol, || format!("trace(TU) = {tu}"))?;
    let tvu = tx_trace_family(n.b, n.m, n.k, 1).t_vu;
    ensure((tvu.abs() - 2.0 * 5f64.sqrt()).abs() < tol, || format!("trace(TVU) = {tvu}"))?;
    ensure(tx_families_hyperbolic(n.b, n.m, n.k, 6), || "a family member is not hyperbolic".into())?;
    let gens = crate::isometry::generators();
    let t01 = gens[0].mul(&gens[1]).trace();
    ensure(t01 == BigInt::from(15), || format!("trace(ι₀*ι₁*) = {t01}"))?;
    Ok("trace(TU)=4, |trace(TVU)|=2√5, all families hyperbolic for |s|≤6 (s≠0 for the pure ones)".into())
}

fn word_problem(cfg: &VerifyConfig) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for i in 0..cfg.samples {
        let len = rng.gen_range(0..=12);
        let w = random_word_with(len, &mut rng);
        let m = evaluate(&w);
        let lam0 = m.apply(&HilbClass::e()).lam;
        let d = decompose(&m, cfg.l_max).map_err(|e| format!("sample {i} {w}: {e}"))?;
        ensure(d.word == w, || format!("sample {i}: {w} came back as {}", d.word))?;
        ensure(BigInt::from(d.steps.len()) <= lam0.abs(), || format!("sample {i}: {} steps", d.steps.len()))?;
        for s in &d.steps {
            ensure(s.lam_after > s.lam_before && s.image_of_e.lam.is_negative(), || format!("sample {i}: bad step {s:?}"))?;
        }
    }
    let neg = LatticeIsometry::from_i64([[1, 0, 0], [0, -1, 0], [0, 0, 1]]).map_err(|e| e.to_string())?;
    ensure(
        decompose(&neg, cfg.l_max) == Err(WordError::NotInGroup(NotInGroupReason::DeterminantNotOne)),
        || "det −1 isometry accepted".into(),
    )?;
    let eta2 = LatticeIsometry::from_i64([[1, 0, 1], [0, 1, 0], [1, 0, 2]]).map_err(|e| e.to_string())?;
    ensure(matches!(decompose(&eta2, cfg.l_max), Err(WordError::NotInGroup(_))), || "η² action accepted".into())?;
    Ok(format!("{} random words round-trip; det −1 and η² rejected", cfg.samples))
}

fn ampleness(_: &VerifyConfig) -> Outcome {
    let h = default_polarization();
    let verdict = |c: &HilbClass| is_ample_hilb(c, &h, DEFAULT_WALL_BOUND).map_err(|e| e.to_string());
    for c in [HilbClass::new(1, -1, 0), HilbClass::new(1, -1, 1), HilbClass::new(2, -1, 3)] {
        let v = verdict(&c)?;
        ensure(v.is_ample(), || format!("{c}: {v:?}"))?;
    }
    use crate::lattice::{Ampleness, NotAmpleReason};
    match verdict(&HilbClass::new(1, 0, 0))? {
        Ampleness::NotAmple(NotAmpleReason::Wall { nef_boundary: true, .. }) => {}
        other => return Err(format!("(1,0,0): {other:?}")),
    }
    ensure(matches!(verdict(&HilbClass::e())?, Ampleness::NotAmple(_)), || "(0,1,0) ample".into())?;
    let kva = |x, y, k| is_k_very_ample(&SurfaceClass::new(x, y), k).map(|v| v.holds).map_err(|e| e.to_string());
    ensure(kva(1, 0, 1)? && !kva(1, 0, 2)? && kva(2, 0, 2)?, || "k-very ampleness examples".into())?;
    Ok("three fixed points ample; (1,0,0) on a wall; e not ample; very ampleness examples".into())
}

fn render_check(_: &VerifyConfig) -> Outcome {
    let scene = DiskScene::standard_with_orbit(6);
    let a = render_svg(&scene);
    ensure(a == render_svg(&scene), || "two renders differ".into())?;
    let pts = parse_points(&a);
    let classes = generator_fixed_points();
    ensure(pts.len() == 3, || format!("{} points drawn", pts.len()))?;
    for i in 0..3 {
        for j in (i + 1)..3 {
            let exact = distance_cosh(&classes[i], &classes[j]).map_err(|e| e.to_string())?.to_f64();
            let drawn = disk_distance_cosh((pts[i].1, pts[i].2), (pts[j].1, pts[j].2));
            ensure((exact - drawn).abs() < 1e-6, || format!("pair {i}{j}: {drawn} vs {exact}"))?;
        }
    }
    Ok("drawn distances match to 1e−6; output byte-identical".into())
}

type CheckFn = fn(&VerifyConfig) -> Outcome;

const CHECKS: [(&str, &str, CheckFn); 12] = [
    ("generator_fidelity", "Beauville involution matrices on NS(X^[2])", generator_fidelity),
    ("g_star_identity", "g* = ι₂*ι₁*ι₀* acts as η⁶ and fixes e", g_star_identity),
    ("interior_fixed_points", "fixed points of the involutions are ample of square 2", interior_fixed_points),
    ("boundary_fixed_points", "boundary fixed points of g*", boundary_fixed_points),
    ("relations", "ι_{3l+k} as conjugates of ι_k by powers of g", relations),
    ("minus_ten_and_isotropy", "no classes of square −10 or 0", minus_ten_and_isotropy),
    ("hyperbolic_chain", "triangle of fixed points and Beardon's λ", hyperbolic_chain),
    ("signature_chain", "signature (0: 2,2,2; 0; 1) and free product Z2*Z2*Z2", signature_chain),
    ("trace_families", "traces of T(UV)^s, T(UV)^sU, T(VU)^s, T(VU)^sV", trace_families),
    ("word_problem", "Aut(X^[2]) = ⟨ι₀, ι₁, ι₂⟩ ≅ Z2*Z2*Z2 by descent", word_problem),
    ("ampleness", "ample cone of X^[2] and k-very ampleness on X", ampleness),
    ("render", "Poincaré disk rendering", render_check),
];

/// Runs every check in order.
pub fn run(cfg: &VerifyConfig) -> VerifyReport {
    let checks = CHECKS
        .iter()
        .map(|(name, anchor, f)| {
            let (passed, detail) = match f(cfg) {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            Check { name, anchor, passed, detail }
        })
        .collect();
    VerifyReport { checks }
}
