//! Golden fixtures, random arrangements and the property suites run by `selftest`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hyperchow_core::arrangement::{flip_coorientation, validate, StackyArrangement, ThetaInput};
use hyperchow_core::boxes::RaySystem;
use hyperchow_core::lawrence::lawrence_fan;
use hyperchow_core::multifan::Cone;
use hyperchow_core::orbring::{
    coorientation_matching, hilbert_series_via_inertia, tables_match, ChowRing, Monomial, RingElement, Which,
};
use hyperchow_core::qlinalg::{q, Q};
use hyperchow_core::zlattice::FgAbGroup;

use crate::input::{parse_str, Format};

pub const FIXTURES: [(&str, &str); 12] = [
    ("p12", include_str!("../../../fixtures/p12.toml")),
    ("gerbe", include_str!("../../../fixtures/gerbe.toml")),
    ("p122", include_str!("../../../fixtures/p122.toml")),
    ("crepant2", include_str!("../../../fixtures/crepant2.toml")),
    ("crepant3", include_str!("../../../fixtures/crepant3.toml")),
    ("crepant4", include_str!("../../../fixtures/crepant4.toml")),
    ("crepant5", include_str!("../../../fixtures/crepant5.toml")),
    ("crepant6", include_str!("../../../fixtures/crepant6.toml")),
    ("tp112", include_str!("../../../fixtures/tp112.toml")),
    ("tp113", include_str!("../../../fixtures/tp113.toml")),
    ("aprime", include_str!("../../../fixtures/aprime.toml")),
    ("nongeneric", include_str!("../../../fixtures/nongeneric.toml")),
];

/// The fixtures the property suites run on.
pub const GOLDEN: [&str; 6] = ["p12", "gerbe", "p122", "crepant3", "tp112", "aprime"];

pub fn fixture(name: &str) -> StackyArrangement {
    let text = FIXTURES.iter().find(|(n, _)| *n == name).unwrap_or_else(|| panic!("no fixture {}", name)).1;
    parse_str(text, Format::Toml).expect("fixture parses").arrangement().expect("fixture builds")
}

pub fn golden_arrangements() -> Vec<(String, StackyArrangement)> {
    GOLDEN.iter().map(|n| (n.to_string(), fixture(n))).collect()
}

/// A valid arrangement with d ≤ 3, m ≤ 7, entries of b̄ in [−2, 2] and occasional ℤ/2 or ℤ/3 torsion.
pub fn random_arrangement(rng: &mut ChaCha8Rng) -> StackyArrangement {
    loop {
        let d = rng.gen_range(1..=3usize);
        let m = rng.gen_range(d + 1..=7usize);
        let torsion: Vec<i64> = match rng.gen_range(0..6) {
            0 => vec![2],
            1 => vec![3],
            _ => Vec::new(),
        };
        let group = FgAbGroup::new(d, torsion.iter().map(|&t| BigInt::from(t)).collect()).expect("valid torsion");
        let vectors: Vec<Vec<BigInt>> = (0..m)
            .map(|_| {
                let mut v: Vec<BigInt> = (0..d).map(|_| BigInt::from(rng.gen_range(-2..=2))).collect();
                v.extend(torsion.iter().map(|&t| BigInt::from(rng.gen_range(0..t))));
                v
            })
            .collect();
        let lift: Vec<BigInt> = (0..m).map(|_| BigInt::from(rng.gen_range(-4..=4))).collect();
        let Ok(a) = StackyArrangement::new(group, vectors, ThetaInput::Lift { lift, sign: 1 }) else {
            continue;
        };
        if validate(&a).all_passed() {
            return a;
        }
    }
}

pub fn random_arrangements(seed: u64, count: usize) -> Vec<(String, StackyArrangement)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|k| (format!("random{}", k), random_arrangement(&mut rng))).collect()
}

fn basis_element(r: &ChowRing, m: &Monomial) -> RingElement {
    let i = r.basis().iter().position(|x| x == m).expect("basis monomial");
    r.basis_element(i)
}

fn element_degree(r: &ChowRing, x: &RingElement) -> Option<usize> {
    let mut degs = x.terms().keys().map(|m| r.degree(m));
    let d = degs.next()?;
    degs.all(|e| e == d).then_some(d)
}

/// Exhaustive commutativity, random associativity and degree additivity.
pub fn check_algebra(r: &ChowRing, rng: &mut ChaCha8Rng, triples: usize) -> Result<(), String> {
    let n = r.dimension();
    let elems: Vec<RingElement> = (0..n).map(|i| r.basis_element(i)).collect();
    let one = r.one();
    let mut products = vec![vec![r.zero(); n]; n];
    for i in 0..n {
        if r.multiply(&one, &elems[i]).map_err(|e| e.to_string())? != elems[i] {
            return Err(format!("1 * {} is not {}", elems[i], elems[i]));
        }
        for j in 0..n {
            products[i][j] = r.multiply(&elems[i], &elems[j]).map_err(|e| e.to_string())?;
        }
    }
    for i in 0..n {
        for j in 0..n {
            if products[i][j] != products[j][i] {
                return Err(format!("{} * {} is not commutative", elems[i], elems[j]));
            }
            let p = &products[i][j];
            if !p.is_zero() && element_degree(r, p) != Some(r.degree(&r.basis()[i]) + r.degree(&r.basis()[j])) {
                return Err(format!("{} * {} = {} breaks the grading", elems[i], elems[j], p));
            }
        }
    }
    if n == 0 {
        return Ok(());
    }
    for _ in 0..triples {
        let (i, j, k) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        let left = r.multiply(&products[i][j], &elems[k]).map_err(|e| e.to_string())?;
        let right = r.multiply(&elems[i], &products[j][k]).map_err(|e| e.to_string())?;
        if left != right {
            return Err(format!(
                "({} * {}) * {} != {} * ({} * {})",
                elems[i], elems[j], elems[k], elems[i], elems[j], elems[k]
            ));
        }
    }
    Ok(())
}

/// Random monomials y^{(v + Σ mᵢbᵢ, σ)} with σ ⊇ τ(v) a cone.
fn random_monomial(r: &ChowRing, rng: &mut ChaCha8Rng) -> Monomial {
    let fan = r.rays().fan();
    let k = rng.gen_range(0..r.boxes().len());
    let tau = &r.boxes()[k].sigma;
    let over: Vec<&Cone> = fan.cones().iter().filter(|c| tau.is_subset(c)).collect();
    let sigma = over.choose(rng).expect("tau is a cone");
    let mut exps = vec![0u32; r.rays().m()];
    for &i in sigma.indices() {
        exps[i] = rng.gen_range(0..=2);
    }
    Monomial { box_index: k, exps }
}

/// Both bracketings of raw triple products against ±y^{(c₁+c₂+c₃+ε(c₁,c₂,c₃), σ₁∪σ₂∪σ₃)}.
/// ε(c₁,c₂,c₃) can have a coefficient 2, so the sign is the parity of its coefficient sum
/// rather than of the size of its minimal face.
pub fn check_triple_epsilon(r: &ChowRing, rng: &mut ChaCha8Rng, samples: usize) -> Result<(), String> {
    let rays = r.rays();
    let g = rays.group();
    for _ in 0..samples {
        let ms: Vec<Monomial> = (0..3).map(|_| random_monomial(r, rng)).collect();
        let lifts: Vec<_> = ms.iter().map(|m| r.lift(m)).collect();
        let u = lifts[0].1.union(&lifts[1].1).union(&lifts[2].1);
        let chained = match r.raw_product(&ms[0], &ms[1]).map_err(|e| e.to_string())? {
            None => None,
            Some((s1, p)) => r.raw_product(&p, &ms[2]).map_err(|e| e.to_string())?.map(|(s2, x)| (s1 * s2, x)),
        };
        let other = match r.raw_product(&ms[1], &ms[2]).map_err(|e| e.to_string())? {
            None => None,
            Some((s1, p)) => r.raw_product(&ms[0], &p).map_err(|e| e.to_string())?.map(|(s2, x)| (s1 * s2, x)),
        };
        if chained != other {
            return Err(format!("raw products of {}, {}, {} are not associative", ms[0], ms[1], ms[2]));
        }
        if !rays.fan().contains(&u) {
            if chained.is_some() {
                return Err(format!("product over the non-cone {} is nonzero", u));
            }
            continue;
        }
        let mut ceil_sum = g.zero();
        let mut total = g.zero();
        for (c, s) in &lifts {
            ceil_sum = g.add(&ceil_sum, &rays.ceiling(c, s).map_err(|e| e.to_string())?);
            total = g.add(&total, c);
        }
        let eps = g.sub(&ceil_sum, &rays.ceiling(&total, &u).map_err(|e| e.to_string())?);
        let eps_coeffs = coeffs_over(rays, &eps, &u)?;
        if eps_coeffs.iter().any(|x| x < &BigInt::zero() || x > &BigInt::from(2)) {
            return Err(format!("triple epsilon of {}, {}, {} has coefficients {:?}", ms[0], ms[1], ms[2], eps_coeffs));
        }
        let parity: BigInt = eps_coeffs.iter().sum();
        let c = g.add(&total, &eps);
        let fe = rays.fractional_part(&c, &u).map_err(|e| e.to_string())?;
        let k = r.box_index(&fe.box_part.v, &fe.box_part.sigma).ok_or("fractional part is not a box element")?;
        let mut exps = vec![0u32; rays.m()];
        for (&i, mi) in u.indices().iter().zip(&fe.multiplicities) {
            exps[i] = u32::try_from(mi).map_err(|_| "negative multiplicity")?;
        }
        let sign = if (parity % 2u32).is_zero() { 1 } else { -1 };
        let expected = Some((sign, Monomial { box_index: k, exps }));
        if chained != expected {
            return Err(format!("triple product of {}, {}, {} disagrees with the triple epsilon", ms[0], ms[1], ms[2]));
        }
    }
    Ok(())
}

/// multiply agrees with the I/J case formula on every pair of basis monomials.
pub fn check_case_formula(r: &ChowRing) -> Result<(), String> {
    for m1 in r.basis() {
        for m2 in r.basis() {
            let direct = r.multiply(&basis_element(r, m1), &basis_element(r, m2)).map_err(|e| e.to_string())?;
            let cases = r.multiply_case_check(m1, m2).map_err(|e| e.to_string())?;
            if direct != cases {
                return Err(format!("{} * {}: product {} but case formula {}", m1, m2, direct, cases));
            }
        }
    }
    Ok(())
}

/// Circuit forms annihilate every basis element.
pub fn check_circuit_absorption(r: &ChowRing) -> Result<(), String> {
    let rays = r.rays();
    for row in 0..rays.group().rank() {
        let mut form = r.zero();
        for (i, b) in rays.vectors().iter().enumerate() {
            form = form.add(&r.ray(i).scale(&q(&b.free[row]))).map_err(|e| e.to_string())?;
        }
        if !form.is_zero() {
            return Err(format!("circuit form {} is not zero", row + 1));
        }
        for i in 0..r.dimension() {
            let mut acc = r.zero();
            for (j, b) in rays.vectors().iter().enumerate() {
                let p = r.multiply(&r.ray(j), &r.basis_element(i)).map_err(|e| e.to_string())?;
                acc = acc.add(&p.scale(&q(&b.free[row]))).map_err(|e| e.to_string())?;
            }
            if !acc.is_zero() {
                return Err(format!("circuit form {} times {} is {}", row + 1, r.basis()[i], acc));
            }
        }
    }
    Ok(())
}

pub fn check_decomposition(a: &StackyArrangement, r: &ChowRing) -> Result<(), String> {
    let direct = r.hilbert_series(Which::Orbifold);
    let via = hilbert_series_via_inertia(a).map_err(|e| e.to_string())?;
    if direct != via {
        return Err(format!("direct series {:?} but inertia sum {:?}", direct, via));
    }
    Ok(())
}

pub fn check_lawrence(a: &StackyArrangement) -> Result<(), String> {
    let l = lawrence_fan(a).map_err(|e| e.to_string())?;
    for c in &l.maximal_cones {
        let p = l.project_cone(c).map_err(|e| e.to_string())?;
        if !a.fan().contains(&p) {
            return Err(format!("maximal cone {} projects to the non-cone {}", c, p));
        }
    }
    Ok(())
}

pub fn check_coorientation(a: &StackyArrangement, r: &ChowRing) -> Result<(), String> {
    let table = r.structure_constants(Which::Orbifold).map_err(|e| e.to_string())?;
    for i in 0..a.m() {
        let f = flip_coorientation(a, i).map_err(|e| e.to_string())?;
        let rf = ChowRing::new(&f).map_err(|e| e.to_string())?;
        if rf.hilbert_series(Which::Orbifold) != r.hilbert_series(Which::Orbifold) {
            return Err(format!("flipping b{} changes the Hilbert series", i + 1));
        }
        let matching = coorientation_matching(r, &rf, i).map_err(|e| e.to_string())?;
        let tf = rf.structure_constants(Which::Orbifold).map_err(|e| e.to_string())?;
        if !tables_match(&table, &tf, &matching) {
            return Err(format!("flipping b{} changes the structure constants", i + 1));
        }
    }
    Ok(())
}

fn coeffs_over(rays: &RaySystem, x: &hyperchow_core::zlattice::GroupElement, s: &Cone) -> Result<Vec<BigInt>, String> {
    rays.integer_coefficients(x, s).ok_or_else(|| format!("{} is not an integral combination over {}", x, s))
}

/// ε ∈ {0,1}, shift invariance of ε, box inversion, ages and aᵢ + cᵢ ∈ {2, 3}.
pub fn check_ceiling_calculus(r: &ChowRing, rng: &mut ChaCha8Rng, samples: usize) -> Result<(), String> {
    let rays = r.rays();
    let g = rays.group();
    let fan = rays.fan();
    let boxes = r.boxes();
    for b in boxes {
        let inv = rays.box_inverse(b);
        if rays.box_element(&inv.v, &inv.sigma).as_ref() != Some(&inv) {
            return Err(format!("inverse of {} is not a box element", b.v));
        }
        if &rays.box_inverse(&inv) != b {
            return Err(format!("box inverse is not an involution at {}", b.v));
        }
        let total: Q = b.alphas.iter().chain(&inv.alphas).sum();
        if b.age() != b.sigma.len()
            || inv.age() != b.sigma.len()
            || total != Q::from_integer(BigInt::from(b.sigma.len()))
        {
            return Err(format!("age mismatch at {}", b.v));
        }
    }
    for b1 in boxes {
        for b2 in boxes {
            if !fan.contains(&b1.sigma.union(&b2.sigma)) {
                continue;
            }
            let b3 = rays.third_box(b1, b2).map_err(|e| e.to_string())?;
            let s123 = b1.sigma.union(&b2.sigma).union(&b3.sigma);
            let a = coeffs_over(rays, &g.add(&g.add(&b1.v, &b2.v), &b3.v), &s123)?;
            let invs = [rays.box_inverse(b1), rays.box_inverse(b2), rays.box_inverse(&b3)];
            let c = coeffs_over(rays, &g.add(&g.add(&invs[0].v, &invs[1].v), &invs[2].v), &s123)?;
            for (x, y) in a.iter().zip(&c) {
                let s = x + y;
                if s != BigInt::from(2) && s != BigInt::from(3) {
                    return Err(format!("a + c = {} on a triple over {}", s, s123));
                }
            }
        }
    }
    for _ in 0..samples {
        let m1 = random_monomial(r, rng);
        let m2 = random_monomial(r, rng);
        let (c1, s1) = r.lift(&m1);
        let (c2, s2) = r.lift(&m2);
        let u = s1.union(&s2);
        if !fan.contains(&u) {
            continue;
        }
        let (eps, _) = rays.epsilon(&c1, &s1, &c2, &s2).map_err(|e| e.to_string())?;
        let coeffs = coeffs_over(rays, &eps, &u)?;
        if coeffs.iter().any(|x| !x.is_zero() && !x.is_one()) {
            return Err(format!("epsilon({}, {}) has coefficients {:?}", m1, m2, coeffs));
        }
        let (v1, t1) = (&boxes[m1.box_index].v, &boxes[m1.box_index].sigma);
        let (v2, t2) = (&boxes[m2.box_index].v, &boxes[m2.box_index].sigma);
        let (eps0, _) = rays.epsilon(v1, t1, v2, t2).map_err(|e| e.to_string())?;
        if eps0 != eps {
            return Err(format!("epsilon changes under integral shifts at {}, {}", m1, m2));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl SuiteResult {
    fn from(name: String, r: Result<(), String>) -> Self {
        match r {
            Ok(()) => SuiteResult { name, passed: true, detail: String::new() },
            Err(detail) => SuiteResult { name, passed: false, detail },
        }
    }
}

/// Every property suite on one arrangement.
pub fn property_suites(label: &str, a: &StackyArrangement, rng: &mut ChaCha8Rng, samples: usize) -> Vec<SuiteResult> {
    let r = match ChowRing::new(a) {
        Ok(r) => r,
        Err(e) => return vec![SuiteResult { name: format!("{} ring", label), passed: false, detail: e.to_string() }],
    };
    vec![
        SuiteResult::from(format!("{} algebra", label), check_algebra(&r, rng, samples)),
        SuiteResult::from(format!("{} triple epsilon", label), check_triple_epsilon(&r, rng, samples)),
        SuiteResult::from(format!("{} case formula", label), check_case_formula(&r)),
        SuiteResult::from(format!("{} circuit absorption", label), check_circuit_absorption(&r)),
        SuiteResult::from(format!("{} decomposition", label), check_decomposition(a, &r)),
        SuiteResult::from(format!("{} lawrence", label), check_lawrence(a)),
        SuiteResult::from(format!("{} coorientation", label), check_coorientation(a, &r)),
        SuiteResult::from(format!("{} ceiling calculus", label), check_ceiling_calculus(&r, rng, samples)),
    ]
}

fn series_check(name: &str, which: Which, expected: &[usize]) -> SuiteResult {
    let r = ChowRing::new(&fixture(name)).map_err(|e| e.to_string());
    let got = r.map(|r| r.hilbert_series(which));
    let res = match got {
        Ok(s) if s == expected => Ok(()),
        Ok(s) => Err(format!("series {:?}, expected {:?}", s, expected)),
        Err(e) => Err(e),
    };
    SuiteResult::from(format!("{} {:?} series", name, which).to_lowercase(), res)
}

/// Fixed expectations on the fixtures.
pub fn golden_checks() -> Vec<SuiteResult> {
    let mut out = Vec::new();
    for (name, text) in FIXTURES {
        let res = parse_str(text, Format::Toml).map_err(|e| e.to_string()).and_then(|d| {
            let a = d.arrangement().map_err(|e| e.to_string())?;
            let report = validate(&a);
            match (name == "nongeneric", report.all_passed()) {
                (false, true) => Ok(()),
                (true, false) if !report.get("genericity").is_some_and(|c| c.passed) => Ok(()),
                _ => Err(report.to_string().replace('\n', "; ")),
            }
        });
        out.push(SuiteResult::from(format!("{} validation", name), res));
    }
    out.push(series_check("p12", Which::Orbifold, &[1, 2]));
    out.push(series_check("p12", Which::Coarse, &[1, 1]));
    for n in 2..=6 {
        out.push(series_check(&format!("crepant{}", n), Which::Orbifold, &[1, n - 1]));
    }
    out.push(series_check("tp112", Which::Orbifold, &[1, 1, 2]));
    for (name, _) in FIXTURES.iter().filter(|(n, _)| *n != "nongeneric") {
        let res = ChowRing::new(&fixture(name))
            .map_err(|e| e.to_string())
            .and_then(|r| r.presentation().map_err(|e| e.to_string()))
            .and_then(|p| match p.verify() {
                Ok(true) => Ok(()),
                Ok(false) => Err("relations do not cut out the computed graded dimensions".to_string()),
                Err(e) => Err(e.to_string()),
            });
        out.push(SuiteResult::from(format!("{} presentation", name), res));
    }
    out
}

pub const SELFTEST_SEED: u64 = 20240611;

pub fn selftest(random_count: usize, samples: usize) -> Vec<SuiteResult> {
    let mut out = golden_checks();
    let mut rng = ChaCha8Rng::seed_from_u64(SELFTEST_SEED);
    let instances = golden_arrangements().into_iter().chain(random_arrangements(SELFTEST_SEED, random_count));
    for (label, a) in instances {
        out.extend(property_suites(&label, &a, &mut rng, samples));
    }
    out
}
