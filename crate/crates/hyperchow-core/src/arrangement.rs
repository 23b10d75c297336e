//! Stacky hyperplane arrangements 𝒜 = (N, β, θ).

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::boxes::RaySystem;
use crate::multifan::MultiFan;
use crate::qlinalg::{dot, nullspace, rank, solve_in_span, to_q, Q};
use crate::zlattice::{
    bar, gale_dual, in_image, solve_lift, FgAbGroup, GaleDual, GroupElement, GroupHom, IntMatrix, LatticeError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArrangementError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("bounded region enumeration supports d <= 3, got d = {0}")]
    DimensionTooLarge(usize),
    #[error("index {} out of range", .0 + 1)]
    IndexOutOfRange(usize),
}

/// θ given directly in DG(β) coordinates, or as sign·β^∨(lift).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThetaInput {
    Value(Vec<BigInt>),
    Lift { lift: Vec<BigInt>, sign: i32 },
}

#[derive(Clone, Debug)]
pub struct StackyArrangement {
    rays: RaySystem,
    beta: GroupHom,
    gale: GaleDual,
    theta: GroupElement,
}

impl PartialEq for StackyArrangement {
    fn eq(&self, other: &Self) -> bool {
        self.beta == other.beta && self.theta == other.theta
    }
}

impl Eq for StackyArrangement {}

fn beta_hom(group: &FgAbGroup, vectors: &[Vec<BigInt>]) -> Result<GroupHom, ArrangementError> {
    for (i, v) in vectors.iter().enumerate() {
        if v.len() != group.ngens() {
            return Err(ArrangementError::Shape(format!(
                "b{} has {} coordinates, N needs {}",
                i + 1,
                v.len(),
                group.ngens()
            )));
        }
    }
    let matrix = IntMatrix::from_columns(group.ngens(), vectors);
    Ok(GroupHom::new(FgAbGroup::free(vectors.len()), group.clone(), matrix)?)
}

fn theta_value(gale: &GaleDual, m: usize, theta: &ThetaInput) -> Result<GroupElement, ArrangementError> {
    match theta {
        ThetaInput::Value(c) => Ok(gale.dg.element(c)?),
        ThetaInput::Lift { lift, sign } => {
            if lift.len() != m {
                return Err(ArrangementError::Shape(format!("lift has {} entries, expected {}", lift.len(), m)));
            }
            let t = gale.beta_dual.apply_coords(lift);
            Ok(if *sign < 0 { gale.dg.neg(&t) } else { t })
        }
    }
}

impl StackyArrangement {
    /// Builds 𝒜 from N, the vectors bᵢ in canonical coordinates and θ.
    /// Only structural validity is enforced here; see [`validate`].
    pub fn new(group: FgAbGroup, vectors: Vec<Vec<BigInt>>, theta: ThetaInput) -> Result<Self, ArrangementError> {
        let beta = beta_hom(&group, &vectors)?;
        let gale = gale_dual(&beta)?;
        let theta = theta_value(&gale, vectors.len(), &theta)?;
        let elems = (0..vectors.len()).map(|i| beta.column_image(i)).collect();
        let rays = RaySystem::new(group, elems);
        Ok(StackyArrangement { rays, beta, gale, theta })
    }

    pub fn group(&self) -> &FgAbGroup {
        self.rays.group()
    }

    pub fn vectors(&self) -> &[GroupElement] {
        self.rays.vectors()
    }

    pub fn m(&self) -> usize {
        self.rays.m()
    }

    pub fn d(&self) -> usize {
        self.group().rank()
    }

    pub fn beta(&self) -> &GroupHom {
        &self.beta
    }

    pub fn gale(&self) -> &GaleDual {
        &self.gale
    }

    pub fn dg(&self) -> &FgAbGroup {
        &self.gale.dg
    }

    pub fn beta_dual(&self) -> &GroupHom {
        &self.gale.beta_dual
    }

    pub fn theta(&self) -> &GroupElement {
        &self.theta
    }

    pub fn rays(&self) -> &RaySystem {
        &self.rays
    }

    pub fn fan(&self) -> &MultiFan {
        self.rays.fan()
    }

    pub fn vector_coords(&self) -> Vec<Vec<BigInt>> {
        self.vectors().iter().map(|v| v.coords()).collect()
    }

    /// ψ with β^∨ψ = sign·θ.
    pub fn lift(&self, sign: i32) -> Result<Vec<BigInt>, LatticeError> {
        solve_lift(self.beta_dual(), &self.theta, sign)
    }

    /// Free parts ā of the Gale dual vectors.
    pub fn gale_bars(&self) -> Vec<Vec<BigInt>> {
        (0..self.m()).map(|i| bar(&self.beta_dual().column_image(i))).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &'static str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name, passed, detail: detail.into() });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                writeln!(f, "{}: {}", c.name, status)?;
            } else {
                writeln!(f, "{}: {} ({})", c.name, status, c.detail)?;
            }
        }
        Ok(())
    }
}

pub const CHECK_NAMES: [&str; 5] =
    ["nontorsion", "finite cokernel", "theta in image", "genericity", "positive spanning"];

/// Report on raw data, including data the constructor would refuse.
pub fn validate_input(group: &FgAbGroup, vectors: &[Vec<BigInt>], theta: &ThetaInput) -> ValidationReport {
    let mut report = ValidationReport::default();
    let beta = match beta_hom(group, vectors) {
        Ok(b) => b,
        Err(e) => {
            for name in CHECK_NAMES {
                report.push(name, false, format!("not evaluated: {}", e));
            }
            return report;
        }
    };
    let torsion: Vec<usize> = (0..vectors.len()).filter(|&i| beta.column_image(i).is_torsion()).collect();
    let bars: Vec<Vec<BigInt>> = (0..vectors.len()).map(|i| bar(&beta.column_image(i))).collect();
    let finite = crate::qlinalg::rank_int(&bars, group.rank()) == group.rank();
    if !torsion.is_empty() || !finite {
        let list = torsion.iter().map(|i| format!("b{}", i + 1)).join(", ");
        report.push(
            "nontorsion",
            torsion.is_empty(),
            if torsion.is_empty() { String::new() } else { format!("torsion: {}", list) },
        );
        report.push("finite cokernel", finite, if finite { "" } else { "the b̄ do not span" });
        for name in &CHECK_NAMES[2..] {
            report.push(name, false, "not evaluated: structural checks failed");
        }
        return report;
    }
    match StackyArrangement::new(group.clone(), vectors.to_vec(), theta.clone()) {
        Ok(a) => validate(&a),
        Err(e) => {
            report.push("nontorsion", true, "");
            report.push("finite cokernel", true, "");
            for name in &CHECK_NAMES[2..] {
                report.push(name, false, format!("not evaluated: {}", e));
            }
            report
        }
    }
}

pub fn validate(a: &StackyArrangement) -> ValidationReport {
    let mut report = ValidationReport::default();
    let torsion: Vec<usize> = (0..a.m()).filter(|&i| a.vectors()[i].is_torsion()).collect();
    report.push("nontorsion", torsion.is_empty(), "");
    let bars: Vec<Vec<Q>> = a.vectors().iter().map(|v| to_q(&v.free)).collect();
    report.push("finite cokernel", rank(&bars, a.d()) == a.d(), "");
    report.push("theta in image", in_image(a.beta_dual(), a.theta()), "");
    match nongeneric_witness(a) {
        None => report.push("genericity", true, ""),
        Some(c) => {
            let s = c.iter().map(|i| (i + 1).to_string()).join(",");
            report.push("genericity", false, format!("lambda = 0 on cobasis {{{}}}", s))
        }
    }
    report.push("positive spanning", positively_spans(&bars, a.d()), "");
    report
}

/// A cobasis C whose expansion of θ̄ has a zero coefficient, if any.
pub fn nongeneric_witness(a: &StackyArrangement) -> Option<Vec<usize>> {
    cobasis_solutions(a).into_iter().find(|(_, l)| l.iter().any(|x| x.is_zero())).map(|(c, _)| c)
}

/// For every cobasis C (|C| = m − d, ā_C independent) the λ with Σ ā_{c_j} λ_j = θ̄.
pub fn cobasis_solutions(a: &StackyArrangement) -> Vec<(Vec<usize>, Vec<Q>)> {
    let k = a.dg().rank();
    let abar: Vec<Vec<Q>> = a.gale_bars().iter().map(|v| to_q(v)).collect();
    let t = to_q(&a.theta().free);
    let mut out = Vec::new();
    for c in (0..a.m()).combinations(k) {
        let cols: Vec<Vec<Q>> = c.iter().map(|&i| abar[i].clone()).collect();
        if rank(&cols, k) < k {
            continue;
        }
        let lambda = solve_in_span(&cols, &t).expect("cobasis spans the free part of DG");
        out.push((c, lambda));
    }
    out
}

/// Whether the vectors positively span ℝ^d.
pub fn positively_spans(vectors: &[Vec<Q>], d: usize) -> bool {
    if d == 0 {
        return true;
    }
    if rank(vectors, d) < d {
        return false;
    }
    for s in (0..vectors.len()).combinations(d - 1) {
        let rows: Vec<Vec<Q>> = s.iter().map(|&i| vectors[i].clone()).collect();
        if rank(&rows, d) < d - 1 {
            continue;
        }
        let u = &nullspace(&rows, d)[0];
        let pairs: Vec<Q> = vectors.iter().map(|w| dot(w, u)).collect();
        if pairs.iter().all(|p| !p.is_negative()) || pairs.iter().all(|p| !p.is_positive()) {
            return false;
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperplane {
    pub index: usize,
    pub normal: Vec<BigInt>,
    pub offset: BigInt,
}

impl Hyperplane {
    pub fn eval(&self, v: &[Q]) -> Q {
        dot(&to_q(&self.normal), v) + Q::from_integer(self.offset.clone())
    }
}

pub fn hyperplanes(a: &StackyArrangement, sign: i32) -> Result<Vec<Hyperplane>, ArrangementError> {
    let psi = a.lift(sign)?;
    Ok(a.vectors()
        .iter()
        .zip(psi)
        .enumerate()
        .map(|(index, (b, r))| Hyperplane { index, normal: bar(b), offset: r })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedRegion {
    pub vertices: Vec<Vec<Q>>,
    pub signs: Vec<i8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gamma {
    pub vertices: Vec<Vec<Q>>,
    pub bounded: bool,
    pub full_dimensional: bool,
    pub bounding: Vec<usize>,
    pub extra: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedComplex {
    pub hyperplanes: Vec<Hyperplane>,
    pub vertices: Vec<Vec<Q>>,
    pub regions: Vec<BoundedRegion>,
    pub gamma: Gamma,
}

fn affine_dim(points: &[&Vec<Q>], d: usize) -> Option<usize> {
    let p0 = points.first()?;
    let diffs: Vec<Vec<Q>> =
        points[1..].iter().map(|p| p.iter().zip(p0.iter()).map(|(x, y)| x - y).collect()).collect();
    Some(rank(&diffs, d))
}

/// Exact enumeration of the bounded full-dimensional cells (d ≤ 3).
pub fn bounded_regions(a: &StackyArrangement, sign: i32) -> Result<BoundedComplex, ArrangementError> {
    let d = a.d();
    if d > 3 {
        return Err(ArrangementError::DimensionTooLarge(d));
    }
    let hs = hyperplanes(a, sign)?;
    let m = hs.len();
    let normals: Vec<Vec<Q>> = hs.iter().map(|h| to_q(&h.normal)).collect();
    let mut verts = BTreeSet::new();
    if d == 0 {
        verts.insert(Vec::new());
    }
    for s in (0..m).combinations(d) {
        if d == 0 {
            break;
        }
        let rows: Vec<Vec<Q>> = s.iter().map(|&i| normals[i].clone()).collect();
        if rank(&rows, d) < d {
            continue;
        }
        // columns of the transposed system rows·v = −r
        let cols: Vec<Vec<Q>> = (0..d).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect();
        let rhs: Vec<Q> = s.iter().map(|&i| -Q::from_integer(hs[i].offset.clone())).collect();
        if let Some(v) = solve_in_span(&cols, &rhs) {
            verts.insert(v);
        }
    }
    let vertices: Vec<Vec<Q>> = verts.into_iter().collect();
    let values: Vec<Vec<Q>> = vertices.iter().map(|v| hs.iter().map(|h| h.eval(v)).collect()).collect();

    let mut candidates = BTreeSet::new();
    for vals in &values {
        let zero: Vec<usize> = (0..m).filter(|&i| vals[i].is_zero()).collect();
        let base: Vec<i8> = vals.iter().map(|x| if x.is_negative() { -1 } else { 1 }).collect();
        for mask in 0u32..(1u32 << zero.len()) {
            let mut s = base.clone();
            for (k, &i) in zero.iter().enumerate() {
                s[i] = if mask >> k & 1 == 1 { -1 } else { 1 };
            }
            candidates.insert(s);
        }
    }
    if m == 0 && d == 0 {
        candidates.insert(Vec::new());
    }

    let cell_vertices = |s: &[i8]| -> Vec<usize> {
        (0..vertices.len())
            .filter(|&k| (0..m).all(|i| !(Q::from_integer(BigInt::from(s[i])) * &values[k][i]).is_negative()))
            .collect()
    };

    let mut regions = Vec::new();
    for s in candidates {
        let signed: Vec<Vec<Q>> =
            (0..m).map(|i| normals[i].iter().map(|x| x * Q::from_integer(BigInt::from(s[i]))).collect()).collect();
        if !positively_spans(&signed, d) {
            continue;
        }
        let vs = cell_vertices(&s);
        if vs.is_empty() {
            continue;
        }
        let n = Q::from_integer(BigInt::from(vs.len()));
        let centroid: Vec<Q> =
            (0..d).map(|j| vs.iter().fold(Q::zero(), |acc, &k| acc + &vertices[k][j]) / &n).collect();
        let interior =
            hs.iter().zip(&s).all(|(h, &si)| (h.eval(&centroid) * Q::from_integer(BigInt::from(si))).is_positive());
        if interior {
            regions.push(BoundedRegion { vertices: vs.iter().map(|&k| vertices[k].clone()).collect(), signs: s });
        }
    }
    regions.sort_by(|x, y| x.vertices.cmp(&y.vertices).then_with(|| x.signs.cmp(&y.signs)));

    let plus = vec![1i8; m];
    let gv = cell_vertices(&plus);
    let gpts: Vec<&Vec<Q>> = gv.iter().map(|&k| &vertices[k]).collect();
    let gdim = affine_dim(&gpts, d);
    let bounded = positively_spans(&normals, d);
    let mut bounding = Vec::new();
    if let Some(gd) = gdim {
        for i in 0..m {
            let on: Vec<&Vec<Q>> = gv.iter().filter(|&&k| values[k][i].is_zero()).map(|&k| &vertices[k]).collect();
            if gd > 0 && affine_dim(&on, d) == Some(gd - 1) {
                bounding.push(i);
            }
        }
    }
    let extra = (0..m).filter(|i| !bounding.contains(i)).collect();
    let gamma = Gamma {
        vertices: gpts.into_iter().cloned().collect(),
        bounded,
        full_dimensional: gdim == Some(d) && !gv.is_empty(),
        bounding,
        extra,
    };
    Ok(BoundedComplex { hyperplanes: hs, vertices, regions, gamma })
}

/// 𝒜 with bᵢ replaced by −bᵢ and θ transported along the induced isomorphism of Gale duals.
pub fn flip_coorientation(a: &StackyArrangement, i: usize) -> Result<StackyArrangement, ArrangementError> {
    if i >= a.m() {
        return Err(ArrangementError::IndexOutOfRange(i));
    }
    let mut vectors = a.vector_coords();
    vectors[i] = a.group().neg(&a.vectors()[i]).coords();
    let beta = beta_hom(a.group(), &vectors)?;
    let gale = gale_dual(&beta)?;
    let mut x = a.gale.section.mul_vec(&a.theta.coords());
    x[i] = -&x[i];
    let theta = gale.projection.apply_coords(&x);
    StackyArrangement::new(a.group().clone(), vectors, ThetaInput::Value(theta.coords()))
}
