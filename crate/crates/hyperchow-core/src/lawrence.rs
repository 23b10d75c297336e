//! Lawrence lifting, the Lawrence fan Σ_θ and the hypertoric ideal.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arrangement::{cobasis_solutions, StackyArrangement};
use crate::boxes::RaySystem;
use crate::multifan::Cone;
use crate::zlattice::{FgAbGroup, GroupElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LawrenceError {
    #[error("theta is not generic: zero coefficient on cobasis {0:?}")]
    NonGeneric(Vec<usize>),
    #[error("cone has no paired structure in the Lawrence fan")]
    NotPaired,
}

/// A Lawrence variable: z_i for b_{L,i}, w_i for b'_{L,i}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LVar {
    Z(usize),
    W(usize),
}

impl fmt::Display for LVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LVar::Z(i) => write!(f, "z{}", i + 1),
            LVar::W(i) => write!(f, "w{}", i + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrrelevantMonomial {
    pub cobasis: Vec<usize>,
    pub vars: Vec<LVar>,
}

impl fmt::Display for IrrelevantMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.vars.is_empty() {
            return write!(f, "1");
        }
        let s: Vec<String> = self.vars.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", s.join("*"))
    }
}

/// Rays 0..m are b_{L,i} and m..2m are b'_{L,i}; free coordinates of N_L are
/// the free coordinates of N followed by e₁..e_m, then the torsion of N.
#[derive(Clone, Debug)]
pub struct LawrenceData {
    pub group: FgAbGroup,
    pub vectors: Vec<GroupElement>,
    pub maximal_cones: Vec<Cone>,
    pub irrelevant: Vec<IrrelevantMonomial>,
}

impl LawrenceData {
    pub fn m(&self) -> usize {
        self.vectors.len() / 2
    }

    /// Paired indices {i : b_{L,i}, b'_{L,i} ∈ σ_L}, checked against the fan.
    pub fn project_cone(&self, cone: &Cone) -> Result<Cone, LawrenceError> {
        let m = self.m();
        if cone.indices().iter().any(|&i| i >= 2 * m) {
            return Err(LawrenceError::NotPaired);
        }
        if !self.maximal_cones.is_empty() && !self.maximal_cones.iter().any(|c| cone.is_subset(c)) {
            return Err(LawrenceError::NotPaired);
        }
        Ok(Cone::new((0..m).filter(|&i| cone.contains(i) && cone.contains(m + i)).collect()))
    }
}

pub fn lawrence_lift(rays: &RaySystem) -> LawrenceData {
    let n = rays.group();
    let m = rays.m();
    let d = n.rank();
    let group = n.with_extra_free(m);
    let mut vectors = Vec::with_capacity(2 * m);
    for i in 0..m {
        let b = &rays.vectors()[i];
        let mut free = b.free.clone();
        free.extend((0..m).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
        vectors.push(GroupElement { free, residues: b.residues.clone() });
    }
    for i in 0..m {
        let mut free = vec![BigInt::zero(); d];
        free.extend((0..m).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
        vectors.push(GroupElement { free, residues: vec![BigInt::zero(); n.torsion().len()] });
    }
    LawrenceData { group, vectors, maximal_cones: Vec::new(), irrelevant: Vec::new() }
}

pub fn lawrence_fan(a: &StackyArrangement) -> Result<LawrenceData, LawrenceError> {
    let mut data = lawrence_lift(a.rays());
    let m = a.m();
    for (c, lambda) in cobasis_solutions(a) {
        if lambda.iter().any(|l| l.is_zero()) {
            return Err(LawrenceError::NonGeneric(c));
        }
        let vars: Vec<LVar> =
            c.iter().zip(&lambda).map(|(&i, l)| if l.is_positive() { LVar::Z(i) } else { LVar::W(i) }).collect();
        let removed: Vec<usize> = vars
            .iter()
            .map(|v| match v {
                LVar::Z(i) => *i,
                LVar::W(i) => m + i,
            })
            .collect();
        data.maximal_cones.push(Cone::new((0..2 * m).filter(|k| !removed.contains(k)).collect()));
        data.irrelevant.push(IrrelevantMonomial { cobasis: c, vars });
    }
    data.maximal_cones.sort();
    Ok(data)
}

/// Σ_i cᵢ zᵢwᵢ, stored as the coefficient vector c.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quadric(pub Vec<BigInt>);

impl fmt::Display for Quadric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (i, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = format!("z{}*w{}", i + 1, i + 1);
            let abs = c.abs();
            let body = if abs.is_one() { term } else { format!("{}*{}", abs, term) };
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        if out.is_empty() {
            out.push('0');
        }
        write!(f, "{}", out)
    }
}

/// One quadric per basis covector of the free part of DG(β).
pub fn hypertoric_ideal(a: &StackyArrangement) -> Vec<Quadric> {
    let bd = a.beta_dual().matrix();
    (0..a.dg().rank()).map(|r| Quadric(bd.row(r))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::ThetaInput;
    use crate::zlattice::to_bigints;

    fn p12(sign: i32) -> StackyArrangement {
        StackyArrangement::new(
            FgAbGroup::free(1),
            vec![to_bigints(&[1]), to_bigints(&[-2])],
            ThetaInput::Lift { lift: to_bigints(&[0, 1]), sign },
        )
        .unwrap()
    }

    #[test]
    fn p12_lift_vectors() {
        let l = lawrence_lift(p12(1).rays());
        assert_eq!(l.group, FgAbGroup::free(3));
        let v: Vec<Vec<BigInt>> = l.vectors.iter().map(|x| x.coords()).collect();
        assert_eq!(
            v,
            vec![to_bigints(&[1, 1, 0]), to_bigints(&[-2, 0, 1]), to_bigints(&[0, 1, 0]), to_bigints(&[0, 0, 1])]
        );
    }

    #[test]
    fn p12_irrelevant_ideal() {
        let a = p12(1);
        let l = lawrence_fan(&a).unwrap();
        let names: Vec<String> = l.irrelevant.iter().map(|x| x.to_string()).collect();
        assert_eq!(names, ["z1", "z2"]);
        assert!(l.maximal_cones.iter().all(|c| c.len() == 3));
        for c in &l.maximal_cones {
            assert!(a.fan().contains(&l.project_cone(c).unwrap()));
        }
        let flipped = lawrence_fan(&p12(-1)).unwrap();
        let names2: Vec<String> = flipped.irrelevant.iter().map(|x| x.to_string()).collect();
        assert_eq!(names2, ["w1", "w2"]);
        assert_eq!(l.project_cone(&Cone::empty()).unwrap(), Cone::empty());
        assert_eq!(l.project_cone(&Cone::new(vec![7])), Err(LawrenceError::NotPaired));
    }
}
