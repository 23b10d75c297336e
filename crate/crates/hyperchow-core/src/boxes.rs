//! Box elements and the ceiling calculus of the multi-fan.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::multifan::{Cone, FanError, MultiFan};
use crate::qlinalg::{to_q, Q};
use crate::zlattice::{bar, smith_normal_form, FgAbGroup, GroupElement, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoxError {
    #[error("element is not representable on {0}")]
    NotRepresentable(Cone),
    #[error("{0} is not a cone")]
    NotACone(Cone),
}

impl From<FanError> for BoxError {
    fn from(e: FanError) -> Self {
        match e {
            FanError::NotACone(c) => BoxError::NotACone(c),
            _ => BoxError::NotRepresentable(Cone::empty()),
        }
    }
}

/// (v, σ) with v̄ = Σ_{i∈σ} αᵢ b̄ᵢ and 0 < αᵢ < 1; alphas are aligned with σ.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoxElement {
    pub v: GroupElement,
    pub sigma: Cone,
    pub alphas: Vec<Q>,
}

impl BoxElement {
    pub fn age(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_untwisted(&self) -> bool {
        self.sigma.is_empty() && self.v.is_zero()
    }

    /// α on ray i, zero off σ.
    pub fn alpha(&self, i: usize) -> Q {
        self.sigma.position(i).map_or_else(Q::zero, |p| self.alphas[p].clone())
    }
}

/// c = v + Σ_{i∈σ} mᵢ bᵢ with (v, τ) a box element and τ ⊆ σ; multiplicities aligned with σ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanElement {
    pub c: GroupElement,
    pub sigma: Cone,
    pub box_part: BoxElement,
    pub multiplicities: Vec<BigInt>,
}

impl FanElement {
    pub fn degree(&self) -> BigInt {
        self.multiplicities.iter().fold(BigInt::from(self.box_part.sigma.len()), |a, b| a + b)
    }
}

/// N together with the vectors bᵢ and their multi-fan.
#[derive(Clone, Debug)]
pub struct RaySystem {
    group: FgAbGroup,
    vectors: Vec<GroupElement>,
    fan: MultiFan,
}

fn ceil_q(x: &Q) -> BigInt {
    x.ceil().to_integer()
}

impl RaySystem {
    pub fn new(group: FgAbGroup, vectors: Vec<GroupElement>) -> Self {
        let fan = MultiFan::new(group.rank(), vectors.iter().map(bar).collect());
        RaySystem { group, vectors, fan }
    }

    pub fn group(&self) -> &FgAbGroup {
        &self.group
    }

    pub fn vectors(&self) -> &[GroupElement] {
        &self.vectors
    }

    pub fn m(&self) -> usize {
        self.vectors.len()
    }

    pub fn fan(&self) -> &MultiFan {
        &self.fan
    }

    /// Σ kᵢ b_{idx[i]}.
    pub fn combination(&self, idx: &[usize], coeffs: &[BigInt]) -> GroupElement {
        let mut acc = self.group.zero();
        for (&i, k) in idx.iter().zip(coeffs) {
            if k.is_zero() {
                continue;
            }
            let b = &self.vectors[i];
            for (x, y) in acc.free.iter_mut().zip(&b.free) {
                *x += y * k;
            }
            for (x, y) in acc.residues.iter_mut().zip(&b.residues) {
                *x += y * k;
            }
        }
        self.group.normalize(&mut acc);
        acc
    }

    pub fn sum_of(&self, idx: &[usize]) -> GroupElement {
        self.combination(idx, &vec![BigInt::one(); idx.len()])
    }

    /// The box element over σ with representative v, if v̄ lies strictly inside σ's parallelepiped.
    pub fn box_element(&self, v: &GroupElement, sigma: &Cone) -> Option<BoxElement> {
        let alphas = self.fan.coefficients(sigma, &to_q(&v.free)).ok()?;
        if alphas.iter().all(|a| a.is_positive() && a < &Q::one()) {
            Some(BoxElement { v: v.clone(), sigma: sigma.clone(), alphas })
        } else {
            None
        }
    }

    pub fn enumerate_box(&self) -> Vec<BoxElement> {
        let torsion = self.group.torsion_elements();
        let mut out = Vec::new();
        for sigma in self.fan.cones() {
            let points = self.parallelepiped_points(sigma);
            let mut found = Vec::new();
            for (p, alphas) in points {
                for t in &torsion {
                    let v = GroupElement { free: p.clone(), residues: t.residues.clone() };
                    found.push(BoxElement { v, sigma: sigma.clone(), alphas: alphas.clone() });
                }
            }
            found.sort_by(|a, b| a.v.cmp(&b.v));
            out.extend(found);
        }
        out
    }

    /// Lattice points Σ αᵢ b̄ᵢ with 0 < αᵢ < 1, read off the Smith form of the cone's matrix:
    /// ℤᵈ ∩ span σ modulo ℤσ is U⁻¹(ℤᵏ/D) and the coefficients of U⁻¹(t, 0) are V·(t/D).
    fn parallelepiped_points(&self, sigma: &Cone) -> Vec<(Vec<BigInt>, Vec<Q>)> {
        let d = self.group.rank();
        let idx = sigma.indices();
        let k = idx.len();
        if k == 0 {
            return vec![(vec![BigInt::zero(); d], Vec::new())];
        }
        let rows = (0..d).map(|r| idx.iter().map(|&i| self.vectors[i].free[r].clone()).collect()).collect();
        let s = smith_normal_form(&IntMatrix::from_rows(rows, k).expect("rectangular"));
        let diag = s.d.diagonal();
        let mut out = Vec::new();
        let mut t = vec![BigInt::zero(); k];
        loop {
            let alphas: Vec<Q> = (0..k)
                .map(|i| {
                    let x = (0..k).fold(Q::zero(), |acc, j| acc + Q::new(s.v.get(i, j) * &t[j], diag[j].clone()));
                    &x - x.floor()
                })
                .collect();
            if alphas.iter().all(|a| !a.is_zero()) {
                let p = (0..d)
                    .map(|r| {
                        let x: Q = idx
                            .iter()
                            .zip(&alphas)
                            .map(|(&i, a)| a * Q::from_integer(self.vectors[i].free[r].clone()))
                            .sum();
                        x.to_integer()
                    })
                    .collect();
                out.push((p, alphas));
            }
            let mut j = 0;
            loop {
                if j == k {
                    return out;
                }
                t[j] += 1;
                if t[j] < diag[j] {
                    break;
                }
                t[j] = BigInt::zero();
                j += 1;
            }
        }
    }

    pub fn fractional_part(&self, c: &GroupElement, sigma: &Cone) -> Result<FanElement, BoxError> {
        if !self.fan.contains(sigma) || sigma.indices().iter().any(|&i| i >= self.m()) {
            return Err(BoxError::NotRepresentable(sigma.clone()));
        }
        let a = self.fan.coefficients(sigma, &to_q(&c.free)).map_err(|_| BoxError::NotRepresentable(sigma.clone()))?;
        if a.iter().any(|x| x.is_negative()) {
            return Err(BoxError::NotRepresentable(sigma.clone()));
        }
        let mut mult = Vec::with_capacity(a.len());
        let mut tau = Vec::new();
        let mut alphas = Vec::new();
        for (&i, x) in sigma.indices().iter().zip(&a) {
            if x.is_integer() {
                mult.push(x.to_integer());
            } else {
                let mi: BigInt = ceil_q(x) - 1;
                alphas.push(x - Q::from_integer(mi.clone()));
                mult.push(mi);
                tau.push(i);
            }
        }
        let shift = self.combination(sigma.indices(), &mult);
        let v = self.group.sub(c, &shift);
        Ok(FanElement {
            c: c.clone(),
            sigma: sigma.clone(),
            box_part: BoxElement { v, sigma: Cone::new(tau), alphas },
            multiplicities: mult,
        })
    }

    /// ⌈c⌉_σ = Σ_{i∈τ} bᵢ + Σ_{i∈σ} mᵢ bᵢ.
    pub fn ceiling(&self, c: &GroupElement, sigma: &Cone) -> Result<GroupElement, BoxError> {
        let fe = self.fractional_part(c, sigma)?;
        let up = self.sum_of(fe.box_part.sigma.indices());
        Ok(self.group.add(&up, &self.combination(sigma.indices(), &fe.multiplicities)))
    }

    /// ε(c₁,c₂) = ⌈c₁⌉_{σ₁} + ⌈c₂⌉_{σ₂} − ⌈c₁+c₂⌉_{σ₁∪σ₂} and the minimal face containing it.
    pub fn epsilon(
        &self,
        c1: &GroupElement,
        s1: &Cone,
        c2: &GroupElement,
        s2: &Cone,
    ) -> Result<(GroupElement, Cone), BoxError> {
        let u = s1.union(s2);
        if !self.fan.contains(&u) {
            return Err(BoxError::NotACone(u));
        }
        let a = self.ceiling(c1, s1)?;
        let b = self.ceiling(c2, s2)?;
        let ab = self.ceiling(&self.group.add(c1, c2), &u)?;
        let eps = self.group.sub(&self.group.add(&a, &b), &ab);
        let face = self.fan.minimal_face_containing(&u, &to_q(&eps.free))?;
        Ok((eps, face))
    }

    pub fn box_inverse(&self, b: &BoxElement) -> BoxElement {
        let v = self.group.sub(&self.sum_of(b.sigma.indices()), &b.v);
        BoxElement { v, sigma: b.sigma.clone(), alphas: b.alphas.iter().map(|a| Q::one() - a).collect() }
    }

    /// The unique box element completing (v₁,σ₁)+(v₂,σ₂)+(v₃,σ₃) ≡ 0.
    pub fn third_box(&self, b1: &BoxElement, b2: &BoxElement) -> Result<BoxElement, BoxError> {
        let u = b1.sigma.union(&b2.sigma);
        if !self.fan.contains(&u) {
            return Err(BoxError::NotACone(u));
        }
        let s = self.group.add(&b1.v, &b2.v);
        let v3 = self.group.sub(&self.ceiling(&s, &u)?, &s);
        Ok(self.fractional_part(&v3, &u)?.box_part)
    }

    pub fn degree(&self, c: &GroupElement, sigma: &Cone) -> Result<BigInt, BoxError> {
        Ok(self.fractional_part(c, sigma)?.degree())
    }

    /// Coefficients of x̄ on the rays of σ as integers, when they are integers.
    pub fn integer_coefficients(&self, x: &GroupElement, sigma: &Cone) -> Option<Vec<BigInt>> {
        let a = self.fan.coefficients(sigma, &to_q(&x.free)).ok()?;
        a.iter().map(|q| if q.is_integer() { Some(q.to_integer()) } else { None }).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zlattice::to_bigints;

    fn rays(rank: usize, torsion: &[i64], vecs: &[&[i64]]) -> RaySystem {
        let g = FgAbGroup::new(rank, to_bigints(torsion)).unwrap();
        let v = vecs.iter().map(|x| g.element_i64(x)).collect();
        RaySystem::new(g, v)
    }

    fn half() -> Q {
        Q::new(1.into(), 2.into())
    }

    #[test]
    fn p12_boxes() {
        let r = rays(1, &[], &[&[1], &[-2]]);
        let b = r.enumerate_box();
        assert_eq!(b.len(), 2);
        assert!(b[0].is_untwisted());
        assert_eq!(b[1].v, r.group().element_i64(&[-1]));
        assert_eq!(b[1].sigma, Cone::new(vec![1]));
        assert_eq!(b[1].alphas, vec![half()]);
        let g = r.group();
        let fe = r.fractional_part(&g.element_i64(&[-3]), &Cone::new(vec![1])).unwrap();
        assert_eq!(fe.box_part.v, g.element_i64(&[-1]));
        assert_eq!(fe.multiplicities, to_bigints(&[1]));
        let s2 = Cone::new(vec![1]);
        assert_eq!(r.ceiling(&g.element_i64(&[-1]), &s2).unwrap(), g.element_i64(&[-2]));
        assert_eq!(r.ceiling(&g.element_i64(&[-2]), &s2).unwrap(), g.element_i64(&[-2]));
        let (e, f) = r.epsilon(&g.element_i64(&[-1]), &s2, &g.element_i64(&[-1]), &s2).unwrap();
        assert_eq!(e, g.element_i64(&[-2]));
        assert_eq!(f, s2);
        let (e, f) = r.epsilon(&g.element_i64(&[-1]), &s2, &g.element_i64(&[-2]), &s2).unwrap();
        assert!(e.is_zero() && f.is_empty());
        assert_eq!(r.box_inverse(&b[1]), b[1]);
        assert!(r.third_box(&b[1], &b[1]).unwrap().is_untwisted());
        assert_eq!(r.degree(&b[1].v, &b[1].sigma).unwrap(), BigInt::one());
    }

    #[test]
    fn tp11n_boxes() {
        let r = rays(2, &[], &[&[1, 0], &[0, 1], &[-1, -2]]);
        let b = r.enumerate_box();
        assert_eq!(b.len(), 2);
        assert_eq!(b[1].sigma, Cone::new(vec![0, 2]));
        assert_eq!(b[1].v, r.group().element_i64(&[0, -1]));
        assert_eq!(r.degree(&b[1].v, &b[1].sigma).unwrap(), BigInt::from(2));
        let fe = r.fractional_part(&r.group().element_i64(&[0, -2]), &Cone::new(vec![0, 2])).unwrap();
        assert!(fe.box_part.v.is_zero());
        assert_eq!(fe.multiplicities, to_bigints(&[1, 1]));

        let r3 = rays(2, &[], &[&[1, 0], &[0, 1], &[-1, -3]]);
        let v1 = r3.box_element(&r3.group().element_i64(&[0, -1]), &Cone::new(vec![0, 2])).unwrap();
        assert_eq!(v1.alphas, vec![Q::new(1.into(), 3.into()); 2]);
        let inv = r3.box_inverse(&v1);
        assert_eq!(inv.v, r3.group().element_i64(&[0, -2]));
        let v3 = r3.third_box(&v1, &v1).unwrap();
        assert_eq!(v3, v1);
    }

    #[test]
    fn gerbe_boxes() {
        let r = rays(1, &[2], &[&[1, 0], &[-1, 1], &[1, 0]]);
        let b = r.enumerate_box();
        assert_eq!(b.len(), 2);
        assert!(b.iter().all(|x| x.sigma.is_empty()));
        assert_eq!(b[1].v, r.group().element_i64(&[0, 1]));
        assert_eq!(r.box_inverse(&b[1]), b[1]);
    }
}
