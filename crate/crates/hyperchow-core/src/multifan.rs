//! The simplicial multi-fan as the independence system of the vectors b̄ᵢ.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::qlinalg::{to_q, SpanSolver, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error("{0} is not a cone")]
    NotACone(Cone),
    #[error("vector is not in the cone")]
    NotInCone,
    #[error("ray index {} out of range", .0 + 1)]
    IndexOutOfRange(usize),
}

/// Strictly increasing 0-based ray indices; displayed 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Cone(Vec<usize>);

impl Cone {
    pub fn new(mut idx: Vec<usize>) -> Self {
        idx.sort_unstable();
        idx.dedup();
        Cone(idx)
    }

    pub fn empty() -> Self {
        Cone(Vec::new())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn union(&self, other: &Cone) -> Cone {
        Cone::new(self.0.iter().chain(other.0.iter()).copied().collect())
    }

    pub fn difference(&self, other: &Cone) -> Cone {
        Cone(self.0.iter().copied().filter(|&i| !other.contains(i)).collect())
    }

    pub fn is_subset(&self, other: &Cone) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }

    /// Position of ray i inside the cone.
    pub fn position(&self, i: usize) -> Option<usize> {
        self.0.binary_search(&i).ok()
    }
}

impl Ord for Cone {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Cone {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let s: Vec<String> = self.one_based().iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", s.join(","))
    }
}

#[derive(Clone, Debug)]
pub struct MultiFan {
    d: usize,
    bars: Vec<Vec<BigInt>>,
    cones: Vec<Cone>,
    solvers: HashMap<Vec<usize>, SpanSolver>,
    rank: usize,
}

impl MultiFan {
    pub fn new(d: usize, bars: Vec<Vec<BigInt>>) -> Self {
        let qbars: Vec<Vec<Q>> = bars.iter().map(|b| to_q(b)).collect();
        let mut solvers = HashMap::new();
        solvers.insert(Vec::new(), SpanSolver::new(Vec::new(), d).expect("empty set is independent"));
        let mut cones = vec![Cone::empty()];
        let mut stack = vec![Vec::<usize>::new()];
        while let Some(cur) = stack.pop() {
            let start = cur.last().map_or(0, |&l| l + 1);
            for i in start..bars.len() {
                let mut s = cur.clone();
                s.push(i);
                let cols: Vec<Vec<Q>> = s.iter().map(|&j| qbars[j].clone()).collect();
                if let Some(solver) = SpanSolver::new(cols, d) {
                    solvers.insert(s.clone(), solver);
                    cones.push(Cone(s.clone()));
                    stack.push(s);
                }
            }
        }
        cones.sort();
        let rank = cones.last().map_or(0, |c| c.len());
        MultiFan { d, bars, cones, solvers, rank }
    }

    pub fn m(&self) -> usize {
        self.bars.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn bars(&self) -> &[Vec<BigInt>] {
        &self.bars
    }

    pub fn is_cone(&self, s: &[usize]) -> bool {
        let c = Cone::new(s.to_vec());
        c.0.len() == s.len() && self.solvers.contains_key(&c.0)
    }

    pub fn contains(&self, c: &Cone) -> bool {
        self.solvers.contains_key(&c.0)
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn top_cones(&self) -> Vec<Cone> {
        self.cones.iter().filter(|c| c.len() == self.d).cloned().collect()
    }

    pub fn link(&self, sigma: &Cone) -> Result<Vec<usize>, FanError> {
        self.check(sigma)?;
        Ok((0..self.m())
            .filter(|&i| !sigma.contains(i))
            .filter(|&i| {
                let mut s = sigma.0.clone();
                s.push(i);
                self.is_cone(&s)
            })
            .collect())
    }

    fn check(&self, sigma: &Cone) -> Result<(), FanError> {
        if let Some(&i) = sigma.0.iter().find(|&&i| i >= self.m()) {
            return Err(FanError::IndexOutOfRange(i));
        }
        if !self.contains(sigma) {
            return Err(FanError::NotACone(sigma.clone()));
        }
        Ok(())
    }

    /// The unique λ with x = Σ_{i∈σ} λᵢ b̄ᵢ, aligned with σ's indices.
    pub fn coefficients(&self, sigma: &Cone, x: &[Q]) -> Result<Vec<Q>, FanError> {
        self.check(sigma)?;
        self.solvers[&sigma.0].solve(x).ok_or(FanError::NotInCone)
    }

    pub fn minimal_face_containing(&self, sigma: &Cone, x: &[Q]) -> Result<Cone, FanError> {
        let lambda = self.coefficients(sigma, x)?;
        if lambda.iter().any(|l| l.is_negative()) {
            return Err(FanError::NotInCone);
        }
        Ok(Cone(sigma.0.iter().zip(&lambda).filter(|(_, l)| !l.is_zero()).map(|(&i, _)| i).collect()))
    }

    /// Minimal dependent subsets.
    pub fn circuits(&self) -> Vec<Cone> {
        let mut out = Vec::new();
        for s in &self.cones {
            let start = s.0.last().map_or(0, |&l| l + 1);
            for i in start..self.m() {
                let mut c = s.0.clone();
                c.push(i);
                if self.is_cone(&c) {
                    continue;
                }
                let minimal = (0..c.len()).all(|k| {
                    let mut sub = c.clone();
                    sub.remove(k);
                    self.is_cone(&sub)
                });
                if minimal {
                    out.push(Cone(c));
                }
            }
        }
        out.sort();
        out
    }
}
