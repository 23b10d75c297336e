//! The orbifold Chow ring ℚ[Δ_β]/Cir(Δ_β) as a finite-dimensional graded algebra.
//!
//! Each box element (v, τ) contributes the component y^{(v,τ)}·ℚ[y₁..y_m] modulo
//! the monomials y^S with τ ∪ S dependent and the linear forms Σᵢ e(bᵢ)yᵢ. Elements
//! are kept in Gröbner normal form inside their component.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::arrangement::StackyArrangement;
use crate::boxes::{BoxElement, BoxError, RaySystem};
use crate::inertia::{quotient_arrangement, sector_triple, InertiaError};
use crate::multifan::{Cone, MultiFan};
use crate::poly::{
    degrevlex, groebner_basis, leading_monomials, normal_form, standard_monomials, total_degree, weighted_degree, Exps,
    Poly,
};
use crate::qlinalg::{q, Q};
use crate::zlattice::GroupElement;

const BASIS_LIMIT: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("operands belong to different arrangements")]
    ArrangementMismatch,
    #[error("box index {0} out of range")]
    NotABox(usize),
    #[error("exponent vector has length {0}, expected {1}")]
    BadExponents(usize, usize),
    #[error("quotient ring is not finite-dimensional")]
    Infinite,
    #[error("no matching basis element after coorientation flip")]
    NoMatch,
    #[error(transparent)]
    Box(#[from] BoxError),
    #[error(transparent)]
    Inertia(#[from] InertiaError),
}

/// y^{(v + Σ eᵢbᵢ, τ ∪ supp e)} for the box element with index `box_index`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub box_index: usize,
    pub exps: Exps,
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.box_index.cmp(&other.box_index).then_with(|| degrevlex(&self.exps, &other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.box_index > 0 {
            parts.push(format!("u{}", self.box_index));
        }
        for (i, &e) in self.exps.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("y{}", i + 1)),
                _ => parts.push(format!("y{}^{}", i + 1, e)),
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingElement {
    ring_id: u64,
    terms: BTreeMap<Monomial, Q>,
}

impl RingElement {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Q> {
        &self.terms
    }

    pub fn coefficient(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        let v = self.terms.entry(m.clone()).or_insert_with(Q::zero);
        *v += c;
        if v.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &RingElement) -> Result<RingElement, RingError> {
        if self.ring_id != other.ring_id {
            return Err(RingError::ArrangementMismatch);
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, k: &Q) -> RingElement {
        let mut out = RingElement { ring_id: self.ring_id, terms: BTreeMap::new() };
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * k);
        }
        out
    }

    pub fn sub(&self, other: &RingElement) -> Result<RingElement, RingError> {
        self.add(&other.scale(&-Q::one()))
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c < &Q::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            let mono = m.to_string();
            let body = match (abs.is_one(), mono == "1") {
                (true, _) => mono,
                (false, true) => abs.to_string(),
                (false, false) => format!("{}*{}", abs, mono),
            };
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        write!(f, "{}", out)
    }
}

#[derive(Clone, Debug)]
pub struct Component {
    pub box_index: usize,
    pub age: usize,
    pub generators: Vec<Poly>,
    pub groebner: Vec<Poly>,
    pub basis: Vec<Exps>,
}

/// Minimal S disjoint from τ with τ ∪ S dependent.
pub fn annihilator_sets(fan: &MultiFan, tau: &Cone) -> Vec<Vec<usize>> {
    let m = fan.m();
    let link = fan.link(tau).expect("tau is a cone");
    let mut out: Vec<Vec<usize>> =
        (0..m).filter(|&i| !tau.contains(i) && !link.contains(&i)).map(|i| vec![i]).collect();
    let with_tau = |s: &[usize]| -> bool {
        let mut all = tau.indices().to_vec();
        all.extend_from_slice(s);
        fan.is_cone(&all)
    };
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    while let Some(t) = stack.pop() {
        let start = t.last().copied();
        for &i in &link {
            if start.is_some_and(|s| i <= s) {
                continue;
            }
            let mut s = t.clone();
            s.push(i);
            if with_tau(&s) {
                stack.push(s);
            } else if (0..s.len()).all(|k| {
                let mut sub = s.clone();
                sub.remove(k);
                with_tau(&sub)
            }) {
                out.push(s);
            }
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Σᵢ e(bᵢ) yᵢ for e running over the coordinate covectors of N̄.
pub fn circuit_relations(rays: &RaySystem) -> Vec<Poly> {
    let d = rays.group().rank();
    (0..d).map(|k| Poly::linear(&rays.vectors().iter().map(|b| q(&b.free[k])).collect::<Vec<_>>())).collect()
}

/// Minimal non-faces of the matroid as square-free exponent vectors.
pub fn matroid_relations(fan: &MultiFan) -> Vec<Exps> {
    fan.circuits().iter().map(|c| support_exps(fan.m(), c.indices())).collect()
}

fn support_exps(m: usize, s: &[usize]) -> Exps {
    let mut e = vec![0; m];
    for &i in s {
        e[i] = 1;
    }
    e
}

fn component_generators(rays: &RaySystem, tau: &Cone) -> Vec<Poly> {
    let m = rays.m();
    let mut gens: Vec<Poly> =
        annihilator_sets(rays.fan(), tau).iter().map(|s| Poly::monomial(m, support_exps(m, s), Q::one())).collect();
    gens.extend(circuit_relations(rays));
    gens
}

fn component_basis(rays: &RaySystem, tau: &Cone) -> Result<(Vec<Poly>, Vec<Poly>, Vec<Exps>), RingError> {
    let gens = component_generators(rays, tau);
    let gb = groebner_basis(&gens);
    let basis = standard_monomials(rays.m(), &leading_monomials(&gb), BASIS_LIMIT).ok_or(RingError::Infinite)?;
    Ok((gens, gb, basis))
}

/// Graded dimensions of the coarse ring ℚ[M_β]/Cir.
pub fn coarse_series(rays: &RaySystem) -> Result<Vec<usize>, RingError> {
    let (_, _, basis) = component_basis(rays, &Cone::empty())?;
    Ok(series(basis.iter().map(|e| total_degree(e) as usize)))
}

fn series(degrees: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for d in degrees {
        if out.len() <= d {
            out.resize(d + 1, 0);
        }
        out[d] += 1;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Orbifold,
    Coarse,
}

#[derive(Clone, Debug)]
pub struct ChowRing {
    id: u64,
    rays: RaySystem,
    boxes: Vec<BoxElement>,
    lookup: HashMap<(GroupElement, Cone), usize>,
    components: Vec<Component>,
    basis: Vec<Monomial>,
    basis_pos: HashMap<Monomial, usize>,
    /// Rays added by the I/J case analysis, per pair of box indices.
    case_sets: Arc<Mutex<HashMap<(usize, usize), Cone>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureTable {
    pub basis: Vec<Monomial>,
    pub degrees: Vec<usize>,
    /// products[i][j] = coordinates of basis[i]·basis[j].
    pub products: Vec<Vec<Vec<(usize, Q)>>>,
}

impl ChowRing {
    pub fn new(a: &StackyArrangement) -> Result<Self, RingError> {
        Self::from_rays(a.rays().clone())
    }

    pub fn from_rays(rays: RaySystem) -> Result<Self, RingError> {
        let mut h = DefaultHasher::new();
        rays.group().hash(&mut h);
        rays.vectors().hash(&mut h);
        let id = h.finish();
        let boxes = rays.enumerate_box();
        let lookup = boxes.iter().enumerate().map(|(k, b)| ((b.v.clone(), b.sigma.clone()), k)).collect();
        let mut cache: HashMap<Cone, (Vec<Poly>, Vec<Poly>, Vec<Exps>)> = HashMap::new();
        let mut components = Vec::with_capacity(boxes.len());
        for (k, b) in boxes.iter().enumerate() {
            if !cache.contains_key(&b.sigma) {
                cache.insert(b.sigma.clone(), component_basis(&rays, &b.sigma)?);
            }
            let (generators, groebner, basis) = cache[&b.sigma].clone();
            components.push(Component { box_index: k, age: b.age(), generators, groebner, basis });
        }
        let basis: Vec<Monomial> = components
            .iter()
            .flat_map(|c| c.basis.iter().map(move |e| Monomial { box_index: c.box_index, exps: e.clone() }))
            .collect();
        let basis_pos = basis.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        Ok(ChowRing { id, rays, boxes, lookup, components, basis, basis_pos, case_sets: Arc::default() })
    }

    pub fn rays(&self) -> &RaySystem {
        &self.rays
    }

    pub fn boxes(&self) -> &[BoxElement] {
        &self.boxes
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn box_index(&self, v: &GroupElement, sigma: &Cone) -> Option<usize> {
        self.lookup.get(&(v.clone(), sigma.clone())).copied()
    }

    pub fn component_basis(&self, k: usize) -> Result<&[Exps], RingError> {
        self.components.get(k).map(|c| c.basis.as_slice()).ok_or(RingError::NotABox(k))
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self, m: &Monomial) -> usize {
        self.boxes[m.box_index].age() + total_degree(&m.exps) as usize
    }

    pub fn zero(&self) -> RingElement {
        RingElement { ring_id: self.id, terms: BTreeMap::new() }
    }

    fn reduce_in(&self, k: usize, p: &Poly) -> RingElement {
        if let [(e, c)] = p.terms().collect::<Vec<_>>()[..] {
            let m = Monomial { box_index: k, exps: e.clone() };
            if self.basis_pos.contains_key(&m) {
                let mut out = self.zero();
                out.add_term(m, c.clone());
                return out;
            }
        }
        let nf = normal_form(p, &self.components[k].groebner);
        let mut out = self.zero();
        for (e, c) in nf.terms() {
            out.add_term(Monomial { box_index: k, exps: e.clone() }, c.clone());
        }
        out
    }

    /// Normal form of a (possibly non-standard) monomial.
    pub fn monomial(&self, k: usize, exps: &[u32]) -> Result<RingElement, RingError> {
        if k >= self.boxes.len() {
            return Err(RingError::NotABox(k));
        }
        if exps.len() != self.rays.m() {
            return Err(RingError::BadExponents(exps.len(), self.rays.m()));
        }
        Ok(self.reduce_in(k, &Poly::monomial(self.rays.m(), exps.to_vec(), Q::one())))
    }

    pub fn one(&self) -> RingElement {
        self.monomial(0, &vec![0; self.rays.m()]).expect("untwisted box exists")
    }

    /// y^{bᵢ}.
    pub fn ray(&self, i: usize) -> RingElement {
        let mut e = vec![0; self.rays.m()];
        e[i] = 1;
        self.monomial(0, &e).expect("untwisted box exists")
    }

    /// y^{(v,σ)} for box index k.
    pub fn box_generator(&self, k: usize) -> Result<RingElement, RingError> {
        self.monomial(k, &vec![0; self.rays.m()])
    }

    pub fn basis_element(&self, i: usize) -> RingElement {
        let m = &self.basis[i];
        let mut out = self.zero();
        out.add_term(m.clone(), Q::one());
        out
    }

    pub fn coordinates(&self, x: &RingElement) -> Vec<(usize, Q)> {
        x.terms.iter().map(|(m, c)| (self.basis_pos[m], c.clone())).collect()
    }

    pub fn from_coordinates(&self, coords: &[(usize, Q)]) -> RingElement {
        let mut out = self.zero();
        for (i, c) in coords {
            out.add_term(self.basis[*i].clone(), c.clone());
        }
        out
    }

    /// (c, σ) represented by a monomial.
    pub fn lift(&self, m: &Monomial) -> (GroupElement, Cone) {
        let b = &self.boxes[m.box_index];
        let supp: Vec<usize> = (0..m.exps.len()).filter(|&i| m.exps[i] > 0).collect();
        let sigma = b.sigma.union(&Cone::new(supp));
        let coeffs: Vec<BigInt> = m.exps.iter().map(|&e| BigInt::from(e)).collect();
        let idx: Vec<usize> = (0..m.exps.len()).collect();
        let g = self.rays.group();
        (g.add(&b.v, &self.rays.combination(&idx, &coeffs)), sigma)
    }

    fn to_monomial(&self, c: &GroupElement, sigma: &Cone) -> Result<Monomial, RingError> {
        let fe = self.rays.fractional_part(c, sigma)?;
        let k = self.box_index(&fe.box_part.v, &fe.box_part.sigma).expect("fractional parts are box elements");
        let mut exps = vec![0u32; self.rays.m()];
        for (&i, mi) in sigma.indices().iter().zip(&fe.multiplicities) {
            exps[i] = mi.to_u32().expect("exponent fits in u32");
        }
        Ok(Monomial { box_index: k, exps })
    }

    /// The product of two monomials before normal form: sign and result, or None for zero.
    /// On the independent set σ₁ ∪ σ₂ the ceiling acts coordinatewise, so
    /// εᵢ = ⌈γ₁ᵢ⌉ + ⌈γ₂ᵢ⌉ − ⌈γ₁ᵢ + γ₂ᵢ⌉ and σ_ε is the support of ε.
    pub fn raw_product(&self, m1: &Monomial, m2: &Monomial) -> Result<Option<(i32, Monomial)>, RingError> {
        let n = self.rays.m();
        let b1 = &self.boxes[m1.box_index];
        let b2 = &self.boxes[m2.box_index];
        let mut a1: Vec<Option<&Q>> = vec![None; n];
        let mut a2: Vec<Option<&Q>> = vec![None; n];
        for (b, a) in [(b1, &mut a1), (b2, &mut a2)] {
            for (&i, x) in b.sigma.indices().iter().zip(&b.alphas) {
                a[i] = Some(x);
            }
        }
        let support = (0..n).filter(|&i| a1[i].is_some() || a2[i].is_some() || m1.exps[i] + m2.exps[i] > 0).collect();
        // faces of cones are cones, so the union alone decides
        let u = Cone::new(support);
        if !self.rays.fan().contains(&u) {
            return Ok(None);
        }
        // 0 < αᵢ < 1, so ⌈eᵢ + αᵢ⌉ = eᵢ + 1 and εᵢ = 1 exactly when α₁ᵢ + α₂ᵢ ≤ 1
        let mut exps = vec![0u32; n];
        let mut shift = Vec::with_capacity(u.len());
        let mut box_sigma = Vec::new();
        let mut eps_size = 0usize;
        for &i in u.indices() {
            let e = m1.exps[i] + m2.exps[i];
            let (mi, eps) = match (a1[i], a2[i]) {
                (Some(x), Some(y)) => {
                    let s = x + y;
                    let eps = u32::from(s <= Q::one());
                    if !s.is_one() {
                        box_sigma.push(i);
                    }
                    (if s.is_one() { e + 2 } else { e + 1 }, eps)
                }
                (Some(_), None) | (None, Some(_)) => {
                    box_sigma.push(i);
                    (e, 0)
                }
                (None, None) => (e, 0),
            };
            eps_size += eps as usize;
            shift.push(BigInt::from(e + eps) - mi);
            exps[i] = mi;
        }
        let g = self.rays.group();
        let c = g.add(&g.add(&b1.v, &b2.v), &self.rays.combination(u.indices(), &shift));
        let k = self.box_index(&c, &Cone::new(box_sigma)).expect("fractional parts are box elements");
        let sign = if eps_size % 2 == 1 { -1 } else { 1 };
        Ok(Some((sign, Monomial { box_index: k, exps })))
    }

    fn check(&self, x: &RingElement) -> Result<(), RingError> {
        if x.ring_id != self.id {
            return Err(RingError::ArrangementMismatch);
        }
        Ok(())
    }

    fn monomial_product(&self, m1: &Monomial, m2: &Monomial) -> Result<RingElement, RingError> {
        match self.raw_product(m1, m2)? {
            None => Ok(self.zero()),
            Some((sign, m)) => {
                let p = Poly::monomial(self.rays.m(), m.exps.clone(), Q::from_integer(BigInt::from(sign)));
                Ok(self.reduce_in(m.box_index, &p))
            }
        }
    }

    pub fn multiply(&self, x: &RingElement, y: &RingElement) -> Result<RingElement, RingError> {
        self.check(x)?;
        self.check(y)?;
        let mut out = self.zero();
        for (m1, a) in &x.terms {
            for (m2, b) in &y.terms {
                let p = self.monomial_product(m1, m2)?;
                for (m, c) in p.terms {
                    out.add_term(m, c * a * b);
                }
            }
        }
        Ok(out)
    }

    fn case_set(&self, k1: usize, k2: usize) -> Result<Cone, RingError> {
        if let Some(c) = self.case_sets.lock().expect("case cache poisoned").get(&(k1, k2)) {
            return Ok(c.clone());
        }
        let b1 = &self.boxes[k1];
        let b2 = &self.boxes[k2];
        let added = if b1.v.is_torsion() || b2.v.is_torsion() {
            Cone::empty()
        } else {
            let t = sector_triple(&self.rays, b1, b2)?;
            if t.boxes[2].v.is_torsion() {
                t.j_set
            } else {
                t.i_set.union(&t.j_set)
            }
        };
        self.case_sets.lock().expect("case cache poisoned").insert((k1, k2), added.clone());
        Ok(added)
    }

    /// The product of two monomials through the I/J case analysis of 3-twisted sectors.
    pub fn multiply_case_check(&self, m1: &Monomial, m2: &Monomial) -> Result<RingElement, RingError> {
        let (c1, s1) = self.lift(m1);
        let (c2, s2) = self.lift(m2);
        let fan = self.rays.fan();
        let u = s1.union(&s2);
        if !fan.contains(&s1) || !fan.contains(&s2) || !fan.contains(&u) {
            return Ok(self.zero());
        }
        let added = self.case_set(m1.box_index, m2.box_index)?;
        let g = self.rays.group();
        let c = g.add(&g.add(&c1, &c2), &self.rays.sum_of(added.indices()));
        let m = self.to_monomial(&c, &u)?;
        let sign = if added.len() % 2 == 1 { -Q::one() } else { Q::one() };
        Ok(self.reduce_in(m.box_index, &Poly::monomial(self.rays.m(), m.exps, sign)))
    }

    pub fn hilbert_series(&self, which: Which) -> Vec<usize> {
        match which {
            Which::Orbifold => series(self.basis.iter().map(|m| self.degree(m))),
            Which::Coarse => series(self.components[0].basis.iter().map(|e| total_degree(e) as usize)),
        }
    }

    pub fn structure_constants(&self, which: Which) -> Result<StructureTable, RingError> {
        let idx: Vec<usize> = match which {
            Which::Orbifold => (0..self.basis.len()).collect(),
            Which::Coarse => (0..self.basis.len()).filter(|&i| self.basis[i].box_index == 0).collect(),
        };
        let pos: HashMap<usize, usize> = idx.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let n = idx.len();
        let mut products = vec![vec![Vec::new(); n]; n];
        // products repeat, so normal forms are shared
        let mut normal_forms: HashMap<Monomial, Vec<(usize, Q)>> = HashMap::new();
        for a in 0..n {
            for b in a..n {
                let Some((sign, m)) = self.raw_product(&self.basis[idx[a]], &self.basis[idx[b]])? else {
                    continue;
                };
                let nf = match normal_forms.get(&m) {
                    Some(nf) => nf,
                    None => {
                        let p = self.reduce_in(m.box_index, &Poly::monomial(self.rays.m(), m.exps.clone(), Q::one()));
                        let coords = self.coordinates(&p).into_iter().map(|(i, c)| (pos[&i], c)).collect();
                        normal_forms.entry(m).or_insert(coords)
                    }
                };
                let coords: Vec<(usize, Q)> =
                    if sign < 0 { nf.iter().map(|(i, c)| (*i, -c)).collect() } else { nf.clone() };
                products[b][a] = coords.clone();
                products[a][b] = coords;
            }
        }
        let basis: Vec<Monomial> = idx.iter().map(|&i| self.basis[i].clone()).collect();
        let degrees = basis.iter().map(|m| self.degree(m)).collect();
        Ok(StructureTable { basis, degrees, products })
    }

    /// Generator names: y1..ym, then u1..uK for the nonzero box elements.
    pub fn generator_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (1..=self.rays.m()).map(|i| format!("y{}", i)).collect();
        names.extend((1..self.boxes.len()).map(|k| format!("u{}", k)));
        names
    }

    fn element_poly(&self, x: &RingElement) -> Poly {
        let m = self.rays.m();
        let n = m + self.boxes.len() - 1;
        let mut p = Poly::zero(n);
        for (mono, c) in &x.terms {
            let mut e = mono.exps.clone();
            e.resize(n, 0);
            if mono.box_index > 0 {
                e[m + mono.box_index - 1] = 1;
            }
            p.add_term(&e, c.clone());
        }
        p
    }

    /// ℚ[y₁..y_m] modulo matroid monomials and circuit forms.
    pub fn coarse_presentation(&self) -> Presentation {
        let m = self.rays.m();
        let generators =
            (0..m).map(|i| Generator { name: format!("y{}", i + 1), degree: 1, box_index: None }).collect();
        let mut relations: Vec<Relation> = matroid_relations(self.rays.fan())
            .into_iter()
            .map(|c| Relation { kind: RelationKind::Matroid, poly: Poly::monomial(m, c, Q::one()) })
            .collect();
        relations.extend(
            circuit_relations(&self.rays).into_iter().map(|poly| Relation { kind: RelationKind::Circuit, poly }),
        );
        Presentation { generators, relations, graded_dims: self.hilbert_series(Which::Coarse) }
    }

    pub fn presentation(&self) -> Result<Presentation, RingError> {
        let m = self.rays.m();
        let k = self.boxes.len() - 1;
        let n = m + k;
        let names = self.generator_names();
        let mut generators: Vec<Generator> =
            (0..m).map(|i| Generator { name: names[i].clone(), degree: 1, box_index: None }).collect();
        for b in 1..=k {
            generators.push(Generator {
                name: names[m + b - 1].clone(),
                degree: self.boxes[b].age(),
                box_index: Some(b),
            });
        }
        let pad = |e: &Exps| -> Exps {
            let mut f = e.clone();
            f.resize(n, 0);
            f
        };
        let mut relations = Vec::new();
        let circuits = matroid_relations(self.rays.fan());
        for c in &circuits {
            relations.push(Relation { kind: RelationKind::Matroid, poly: Poly::monomial(n, pad(c), Q::one()) });
        }
        for row in 0..self.rays.group().rank() {
            let mut coeffs: Vec<Q> = self.rays.vectors().iter().map(|b| q(&b.free[row])).collect();
            coeffs.resize(n, Q::zero());
            relations.push(Relation { kind: RelationKind::Circuit, poly: Poly::linear(&coeffs) });
        }
        for b in 1..=k {
            for s in annihilator_sets(self.rays.fan(), &self.boxes[b].sigma) {
                let e = support_exps(m, &s);
                if circuits.iter().any(|c| c.iter().zip(&e).all(|(x, y)| x <= y)) {
                    continue;
                }
                let mut f = pad(&e);
                f[m + b - 1] = 1;
                relations.push(Relation { kind: RelationKind::Annihilator, poly: Poly::monomial(n, f, Q::one()) });
            }
        }
        for a in 1..=k {
            for b in a..=k {
                let ua = self.box_generator(a)?;
                let ub = self.box_generator(b)?;
                let prod = self.multiply(&ua, &ub)?;
                let mut e = vec![0; n];
                e[m + a - 1] += 1;
                e[m + b - 1] += 1;
                let lhs = Poly::monomial(n, e, Q::one());
                relations.push(Relation { kind: RelationKind::Product, poly: lhs.sub(&self.element_poly(&prod)) });
            }
        }
        let graded_dims = self.hilbert_series(Which::Orbifold);
        Ok(Presentation { generators, relations, graded_dims })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: usize,
    pub box_index: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelationKind {
    Matroid,
    Circuit,
    Annihilator,
    Product,
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RelationKind::Matroid => "matroid",
            RelationKind::Circuit => "circuit",
            RelationKind::Annihilator => "annihilator",
            RelationKind::Product => "product",
        };
        write!(f, "{}", s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub kind: RelationKind,
    pub poly: Poly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<Generator>,
    pub relations: Vec<Relation>,
    pub graded_dims: Vec<usize>,
}

impl Presentation {
    pub fn names(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.name.clone()).collect()
    }

    pub fn weights(&self) -> Vec<u32> {
        self.generators.iter().map(|g| g.degree as u32).collect()
    }

    /// Graded dimensions of ℚ[generators]/(relations), from a Gröbner basis.
    pub fn quotient_dims(&self) -> Result<Vec<usize>, RingError> {
        let polys: Vec<Poly> = self.relations.iter().map(|r| r.poly.clone()).collect();
        let gb = groebner_basis(&polys);
        let basis = standard_monomials(self.generators.len(), &leading_monomials(&gb), BASIS_LIMIT)
            .ok_or(RingError::Infinite)?;
        let w = self.weights();
        Ok(series(basis.iter().map(|e| weighted_degree(e, &w) as usize)))
    }

    /// Whether the relations cut out exactly the computed graded dimensions.
    pub fn verify(&self) -> Result<bool, RingError> {
        Ok(self.quotient_dims()? == self.graded_dims)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.names();
        writeln!(f, "generators:")?;
        for g in &self.generators {
            writeln!(f, "  {} (degree {})", g.name, g.degree)?;
        }
        writeln!(f, "relations:")?;
        for r in &self.relations {
            writeln!(f, "  [{}] {}", r.kind, r.poly.format(&names))?;
        }
        let dims: Vec<String> = self.graded_dims.iter().map(|d| d.to_string()).collect();
        writeln!(f, "graded dimensions: {}", dims.join(" "))
    }
}

/// Orbifold series as Σ_box t^{|σ|}·(coarse series of the quotient arrangement).
pub fn hilbert_series_via_inertia(a: &StackyArrangement) -> Result<Vec<usize>, RingError> {
    let mut total: Vec<usize> = Vec::new();
    for b in a.rays().enumerate_box() {
        let q = quotient_arrangement(a, &b)?;
        let s = coarse_series(q.arrangement.rays())?;
        for (d, n) in s.iter().enumerate() {
            let deg = d + b.age();
            if total.len() <= deg {
                total.resize(deg + 1, 0);
            }
            total[deg] += n;
        }
    }
    Ok(total)
}

/// Basis matching between 𝒜 and 𝒜 with bⱼ negated: (index in `flipped`, sign) per basis element.
pub fn coorientation_matching(ring: &ChowRing, flipped: &ChowRing, j: usize) -> Result<Vec<(usize, i32)>, RingError> {
    let g = ring.rays.group();
    let bj = &ring.rays.vectors()[j];
    ring.basis
        .iter()
        .map(|mono| {
            let b = &ring.boxes[mono.box_index];
            let v = if b.sigma.contains(j) { g.sub(&b.v, bj) } else { b.v.clone() };
            let k = flipped.box_index(&v, &b.sigma).ok_or(RingError::NoMatch)?;
            let target = Monomial { box_index: k, exps: mono.exps.clone() };
            let idx = *flipped.basis_pos.get(&target).ok_or(RingError::NoMatch)?;
            Ok((idx, if mono.exps[j] % 2 == 1 { -1 } else { 1 }))
        })
        .collect()
}

/// Whether the two tables agree under a signed basis matching.
pub fn tables_match(t: &StructureTable, u: &StructureTable, matching: &[(usize, i32)]) -> bool {
    let n = t.basis.len();
    if u.basis.len() != n || matching.len() != n {
        return false;
    }
    for i in 0..n {
        for j in 0..n {
            let (pi, si) = matching[i];
            let (pj, sj) = matching[j];
            let expected: BTreeMap<usize, Q> = t.products[i][j]
                .iter()
                .map(|(r, c)| {
                    let (pr, sr) = matching[*r];
                    (pr, c * Q::from_integer(BigInt::from(si * sj * sr)))
                })
                .collect();
            let actual: BTreeMap<usize, Q> = u.products[pi][pj].iter().cloned().collect();
            if expected != actual {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::ThetaInput;
    use crate::qlinalg::qi;
    use crate::zlattice::{to_bigints, FgAbGroup};

    fn arr(rank: usize, torsion: &[i64], vecs: &[&[i64]], lift: &[i64]) -> StackyArrangement {
        let g = FgAbGroup::new(rank, to_bigints(torsion)).unwrap();
        StackyArrangement::new(
            g,
            vecs.iter().map(|v| to_bigints(v)).collect(),
            ThetaInput::Lift { lift: to_bigints(lift), sign: 1 },
        )
        .unwrap()
    }

    #[test]
    fn p12_ring() {
        let a = arr(1, &[], &[&[1], &[-2]], &[0, 1]);
        let r = ChowRing::new(&a).unwrap();
        assert_eq!(r.component_basis(0).unwrap(), &[vec![0, 0], vec![0, 1]]);
        assert_eq!(r.component_basis(1).unwrap(), &[vec![0, 0]]);
        assert_eq!(r.hilbert_series(Which::Orbifold), vec![1, 2]);
        assert_eq!(r.hilbert_series(Which::Coarse), vec![1, 1]);
        let v = r.box_generator(1).unwrap();
        let y1 = r.ray(0);
        let y2 = r.ray(1);
        assert!(r.multiply(&v, &v).unwrap().is_zero());
        assert!(r.multiply(&y1, &v).unwrap().is_zero());
        assert!(r.multiply(&y2, &y2).unwrap().is_zero());
        assert_eq!(y1, y2.scale(&qi(2)));
        let raw =
            r.raw_product(&Monomial { box_index: 1, exps: vec![0, 0] }, &Monomial { box_index: 1, exps: vec![0, 0] });
        assert_eq!(raw.unwrap(), Some((-1, Monomial { box_index: 0, exps: vec![0, 2] })));
        assert_eq!(hilbert_series_via_inertia(&a).unwrap(), vec![1, 2]);
        let p = r.presentation().unwrap();
        assert!(p.verify().unwrap());
    }

    #[test]
    fn tp112_ring() {
        let a = arr(2, &[], &[&[1, 0], &[0, 1], &[-1, -2]], &[0, 0, 1]);
        let r = ChowRing::new(&a).unwrap();
        assert_eq!(r.component_basis(0).unwrap(), &[vec![0, 0, 0], vec![0, 0, 1], vec![0, 0, 2]]);
        assert_eq!(r.hilbert_series(Which::Orbifold), vec![1, 1, 2]);
        assert_eq!(hilbert_series_via_inertia(&a).unwrap(), vec![1, 1, 2]);
        assert!(r.presentation().unwrap().verify().unwrap());
    }

    #[test]
    fn relations_lists() {
        let a = arr(1, &[], &[&[1], &[-1], &[1]], &[0, 1, -2]);
        assert_eq!(matroid_relations(a.fan()), vec![vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]);
        let names: Vec<String> = vec!["y1".into(), "y2".into(), "y3".into()];
        assert_eq!(circuit_relations(a.rays())[0].format(&names), "y1 - y2 + y3");
    }

    #[test]
    fn case_check_agrees() {
        let a = arr(2, &[], &[&[1, 0], &[0, 1], &[-1, -3]], &[0, 0, 1]);
        let r = ChowRing::new(&a).unwrap();
        for m1 in r.basis() {
            for m2 in r.basis() {
                let x = r
                    .multiply(
                        &r.from_coordinates(&[(r.basis_pos[m1], qi(1))]),
                        &r.from_coordinates(&[(r.basis_pos[m2], qi(1))]),
                    )
                    .unwrap();
                assert_eq!(x, r.multiply_case_check(m1, m2).unwrap());
            }
        }
    }
}
