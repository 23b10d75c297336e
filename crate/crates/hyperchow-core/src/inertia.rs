//! Quotient arrangements, the inertia decomposition and 3-twisted sectors.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arrangement::{ArrangementError, StackyArrangement, ThetaInput};
use crate::boxes::{BoxElement, BoxError, RaySystem};
use crate::multifan::Cone;
use crate::zlattice::{
    cokernel, hermite_rows, kernel_basis, reduce_mod_hermite, solve_integer, solve_lift, FgAbGroup, GroupHom,
    IntMatrix, LatticeError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InertiaError {
    #[error("({0}, {1}) is not a box element")]
    NotABox(String, Cone),
    #[error("{0} is not a top-dimensional cone")]
    NotTopDimensional(Cone),
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Box(#[from] BoxError),
}

#[derive(Clone, Debug)]
pub struct QuotientArrangement {
    pub base: BoxElement,
    /// Ray indices of 𝒜 carried by the quotient, in order.
    pub link: Vec<usize>,
    /// N → N(σ).
    pub projection: GroupHom,
    pub arrangement: StackyArrangement,
    /// θ(σ) is the image of k·θ, k the smallest positive integer making the chase integral.
    pub theta_scale: BigInt,
}

/// The map ℤ^σ → N sending eᵢ to bᵢ.
fn cone_map(rays: &RaySystem, sigma: &Cone) -> GroupHom {
    let cols: Vec<Vec<BigInt>> = sigma.indices().iter().map(|&i| rays.vectors()[i].coords()).collect();
    let n = rays.group();
    GroupHom::new(FgAbGroup::free(sigma.len()), n.clone(), IntMatrix::from_columns(n.ngens(), &cols))
        .expect("free source")
}

pub fn quotient_arrangement(a: &StackyArrangement, b: &BoxElement) -> Result<QuotientArrangement, InertiaError> {
    let rays = a.rays();
    if rays.box_element(&b.v, &b.sigma).as_ref() != Some(b) || !rays.group().contains(&b.v) {
        return Err(InertiaError::NotABox(b.v.to_string(), b.sigma.clone()));
    }
    let sigma = &b.sigma;
    let n = rays.group();
    let projection = if sigma.is_empty() {
        GroupHom::new(n.clone(), n.clone(), IntMatrix::identity(n.ngens()))?
    } else {
        cokernel(&cone_map(rays, sigma)).projection
    };
    let link = a.fan().link(sigma).expect("box cones are cones");
    let vectors: Vec<Vec<BigInt>> = link.iter().map(|&i| projection.apply(&rays.vectors()[i]).coords()).collect();

    // order of θ modulo the image of β^∨
    let c = cokernel(a.beta_dual());
    let k0 = c.group.element_order(&c.projection.apply(a.theta())).expect("cokernel of the Gale dual is finite");
    let psi = solve_lift(a.beta_dual(), &a.dg().scale(a.theta(), &k0), 1)?;

    // e ∈ N* with e(b̄_j) = −k ψ_j on σ
    let d = a.d();
    let rows: Vec<Vec<BigInt>> = sigma.indices().iter().map(|&j| rays.vectors()[j].free.clone()).collect();
    let bt = IntMatrix::from_rows(rows, d)?;
    let psi_sigma: Vec<BigInt> = sigma.indices().iter().map(|&j| -&psi[j]).collect();
    let k1 = if sigma.is_empty() {
        BigInt::one()
    } else {
        let f = GroupHom::new(FgAbGroup::free(d), FgAbGroup::free(sigma.len()), bt.clone())?;
        let ck = cokernel(&f);
        ck.group.element_order(&ck.projection.apply_coords(&psi_sigma)).expect("finite index")
    };
    let target: Vec<BigInt> = psi_sigma.iter().map(|x| x * &k1).collect();
    let mut e = if sigma.is_empty() {
        vec![BigInt::zero(); d]
    } else {
        solve_integer(&bt, &target).expect("scaled target lies in the lattice")
    };
    reduce_mod_hermite(&mut e, &hermite_rows(&kernel_basis(&bt), d));
    let k = &k0 * &k1;
    let lift: Vec<BigInt> = link
        .iter()
        .map(|&i| {
            let pair = rays.vectors()[i].free.iter().zip(&e).fold(BigInt::zero(), |acc, (x, y)| acc + x * y);
            &k * &psi[i] + pair
        })
        .collect();
    let target_group = projection.target().clone();
    let arrangement = StackyArrangement::new(target_group, vectors, ThetaInput::Lift { lift, sign: 1 })?;
    Ok(QuotientArrangement { base: b.clone(), link, projection, arrangement, theta_scale: k })
}

#[derive(Clone, Debug)]
pub struct InertiaComponent {
    pub box_element: BoxElement,
    pub quotient: QuotientArrangement,
    pub age: usize,
}

pub fn inertia_components(a: &StackyArrangement) -> Result<Vec<InertiaComponent>, InertiaError> {
    a.rays()
        .enumerate_box()
        .into_iter()
        .map(|b| {
            let quotient = quotient_arrangement(a, &b)?;
            Ok(InertiaComponent { age: b.age(), box_element: b, quotient })
        })
        .collect()
}

/// N / ⟨bᵢ : i ∈ σ⟩ for a top-dimensional cone σ.
pub fn local_group(a: &StackyArrangement, sigma: &Cone) -> Result<FgAbGroup, InertiaError> {
    if sigma.len() != a.d() || !a.fan().contains(sigma) || sigma.indices().iter().any(|&i| i >= a.m()) {
        return Err(InertiaError::NotTopDimensional(sigma.clone()));
    }
    Ok(cokernel(&cone_map(a.rays(), sigma)).group)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectorTriple {
    pub boxes: [BoxElement; 3],
    pub sigma123: Cone,
    /// v̄₁+v̄₂+v̄₃ = Σ aᵢ b̄ᵢ, aligned with sigma123.
    pub a: Vec<BigInt>,
    pub i_set: Cone,
    pub j_set: Cone,
}

impl SectorTriple {
    pub fn coefficient(&self, i: usize) -> BigInt {
        self.sigma123.position(i).map_or_else(BigInt::zero, |p| self.a[p].clone())
    }
}

pub fn sector_triple(rays: &RaySystem, b1: &BoxElement, b2: &BoxElement) -> Result<SectorTriple, BoxError> {
    let b3 = rays.third_box(b1, b2)?;
    let s123 = b1.sigma.union(&b2.sigma).union(&b3.sigma);
    let g = rays.group();
    let total = g.add(&g.add(&b1.v, &b2.v), &b3.v);
    let a = rays.integer_coefficients(&total, &s123).ok_or_else(|| BoxError::NotRepresentable(s123.clone()))?;
    let i_set = Cone::new(
        s123.indices()
            .iter()
            .zip(&a)
            .filter(|(&i, x)| x.is_one() && b1.sigma.contains(i) && b2.sigma.contains(i) && b3.sigma.contains(i))
            .map(|(&i, _)| i)
            .collect(),
    );
    let j_set = s123.difference(&b3.sigma);
    Ok(SectorTriple { boxes: [b1.clone(), b2.clone(), b3], sigma123: s123, a, i_set, j_set })
}

/// Every ordered pair of box elements whose cones span a cone, completed to a triple.
pub fn three_twisted_sectors(a: &StackyArrangement) -> Vec<SectorTriple> {
    let rays = a.rays();
    let boxes = rays.enumerate_box();
    let mut out = Vec::new();
    for b1 in &boxes {
        for b2 in &boxes {
            if a.fan().contains(&b1.sigma.union(&b2.sigma)) {
                out.push(sector_triple(rays, b1, b2).expect("union is a cone"));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionData {
    pub two_set: Cone,
    pub one_set: Cone,
}

impl ObstructionData {
    pub fn rank(&self) -> usize {
        self.two_set.len() + self.one_set.len()
    }
}

pub fn obstruction_euler_data(t: &SectorTriple) -> ObstructionData {
    if t.boxes.iter().any(|b| b.v.is_torsion()) {
        return ObstructionData { two_set: Cone::empty(), one_set: Cone::empty() };
    }
    let two = BigInt::from(2);
    ObstructionData {
        two_set: Cone::new(
            t.sigma123.indices().iter().zip(&t.a).filter(|(_, x)| **x == two).map(|(&i, _)| i).collect(),
        ),
        one_set: t.i_set.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::validate;
    use crate::zlattice::to_bigints;

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
    fn p122_quotient() {
        let a = arr(2, &[], &[&[1, 0], &[0, 1], &[-2, -2], &[0, -1]], &[1, 1, -3, 0]);
        let b = a.rays().box_element(&a.group().element_i64(&[-1, -1]), &Cone::new(vec![2])).unwrap();
        let q = quotient_arrangement(&a, &b).unwrap();
        assert_eq!(q.arrangement.group(), &FgAbGroup::new(1, to_bigints(&[2])).unwrap());
        assert_eq!(q.link, vec![0, 1, 3]);
        assert!(validate(&q.arrangement).all_passed(), "{}", validate(&q.arrangement));
    }

    #[test]
    fn identity_and_point_quotients() {
        let a = arr(1, &[], &[&[1], &[-2]], &[0, 1]);
        let boxes = a.rays().enumerate_box();
        let q0 = quotient_arrangement(&a, &boxes[0]).unwrap();
        assert_eq!(q0.arrangement, a);
        let q1 = quotient_arrangement(&a, &boxes[1]).unwrap();
        assert_eq!(q1.arrangement.m(), 0);
        assert_eq!(q1.arrangement.group(), &FgAbGroup::new(0, to_bigints(&[2])).unwrap());
    }

    #[test]
    fn local_groups() {
        let a = arr(2, &[], &[&[1, 0], &[0, 1], &[-1, -2]], &[0, 0, 1]);
        assert_eq!(local_group(&a, &Cone::new(vec![0, 2])).unwrap(), FgAbGroup::new(0, to_bigints(&[2])).unwrap());
        assert!(local_group(&a, &Cone::new(vec![0, 1])).unwrap().is_trivial());
        assert!(local_group(&a, &Cone::new(vec![0])).is_err());
        let g = arr(1, &[2], &[&[1, 0], &[-1, 1], &[1, 0]], &[1, 1, -3]);
        assert_eq!(local_group(&g, &Cone::new(vec![0])).unwrap(), FgAbGroup::new(0, to_bigints(&[2])).unwrap());
    }

    #[test]
    fn triples() {
        let a = arr(1, &[], &[&[1], &[-2]], &[0, 1]);
        assert_eq!(three_twisted_sectors(&a).len(), 4);
        let t = arr(2, &[], &[&[1, 0], &[0, 1], &[-1, -3]], &[0, 0, 1]);
        let v1 = t.rays().box_element(&t.group().element_i64(&[0, -1]), &Cone::new(vec![0, 2])).unwrap();
        let st = sector_triple(t.rays(), &v1, &v1).unwrap();
        assert_eq!(st.boxes[2], v1);
        assert_eq!(st.a, to_bigints(&[1, 1]));
        assert_eq!(st.i_set, Cone::new(vec![0, 2]));
        assert!(st.j_set.is_empty());
        let ob = obstruction_euler_data(&st);
        assert!(ob.two_set.is_empty());
        assert_eq!(ob.rank(), 2);
    }
}
