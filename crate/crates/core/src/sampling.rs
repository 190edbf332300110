//! Seeded random elements and component families.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Coords, FiniteAlgebra};
use crate::arith::{frac, int, Scalar};
use crate::decomposition::{DerComponentFamily, DiderComponentFamily, Sidedness};
use crate::dialgebra::{Dialgebra, DialgebraElement, Window};
use crate::error::{Error, Result};
use crate::operators::{DerivationKind, LinOp};
use crate::solver::{algebra_derivation_space, SubspaceBasis};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small rationals `p/q` with `|p| ≤ 4`, `1 ≤ q ≤ 3`.
pub fn random_scalar<R: Rng>(rng: &mut R) -> Scalar {
    frac(rng.gen_range(-4..=4), rng.gen_range(1..=3))
}

pub fn random_coords<R: Rng>(rng: &mut R, dim: usize) -> Coords {
    (0..dim).map(|_| random_scalar(rng)).collect()
}

pub fn random_element<R: Rng>(rng: &mut R, d: &Dialgebra) -> DialgebraElement {
    DialgebraElement::new(random_coords(rng, d.dim()))
}

/// A random integer combination of `ops`, or `None` when it comes out zero.
pub fn random_combination<R: Rng>(rng: &mut R, ops: &[LinOp]) -> Option<LinOp> {
    let first = ops.first()?;
    let mut acc = LinOp::endo_zero(&first.domain_tag, first.domain_dim());
    for op in ops {
        let c = int(rng.gen_range(-3..=3));
        if !c.is_zero() {
            acc = acc.add(&op.scale(&c)).expect("same space");
        }
    }
    (!acc.is_zero()).then_some(acc)
}

/// Component spaces of a windowed tensor-product dialgebra, computed once
/// and reused across draws.
#[derive(Clone, Debug)]
pub struct ComponentSpaces {
    pub window: Window,
    pub perm: FiniteAlgebra,
    pub algebra: FiniteAlgebra,
    pub perm_der: SubspaceBasis,
    pub perm_left: SubspaceBasis,
    pub perm_right: SubspaceBasis,
    pub alg_der: SubspaceBasis,
}

impl ComponentSpaces {
    pub fn of(d: &Dialgebra) -> Result<Self> {
        let f = d
            .factors
            .as_ref()
            .ok_or_else(|| Error::contract(format!("`{}` is not a tensor-product dialgebra", d.name)))?;
        let window = f
            .window
            .ok_or_else(|| Error::contract(format!("`{}` has no truncation window", d.name)))?;
        Ok(ComponentSpaces {
            window,
            perm_der: algebra_derivation_space(&f.perm, DerivationKind::TwoSided),
            perm_left: algebra_derivation_space(&f.perm, DerivationKind::Left),
            perm_right: algebra_derivation_space(&f.perm, DerivationKind::Right),
            alg_der: algebra_derivation_space(&f.algebra, DerivationKind::TwoSided),
            perm: f.perm.clone(),
            algebra: f.algebra.clone(),
        })
    }

    /// Basis of the allowed `ḋ` parts. `Both` intersects the two spaces.
    pub fn dot_space(&self, sidedness: Sidedness) -> SubspaceBasis {
        match sidedness {
            Sidedness::Left => self.perm_left.clone(),
            Sidedness::Right => self.perm_right.clone(),
            Sidedness::Both => intersect(&self.perm_left, &self.perm_right),
        }
    }

    /// Each slot is filled with probability 1/2 by a random combination of
    /// the matching component basis.
    pub fn random_der_family<R: Rng>(&self, rng: &mut R) -> DerComponentFamily {
        let mut fam = DerComponentFamily::default();
        let perm_ops = self.perm_der.basis_ops();
        let alg_ops = self.alg_der.basis_ops();
        for k in 0..self.algebra.dim() {
            if rng.gen_bool(0.5) {
                if let Some(op) = random_combination(rng, &perm_ops) {
                    fam.perm_parts.insert(k, op);
                }
            }
        }
        for j in 0..=self.window.slot2() {
            if rng.gen_bool(0.5) {
                if let Some(op) = random_combination(rng, &alg_ops) {
                    fam.alg_parts.insert(j, op);
                }
            }
        }
        fam
    }

    pub fn random_dider_family<R: Rng>(&self, rng: &mut R, sidedness: Sidedness) -> DiderComponentFamily {
        let mut fam = DiderComponentFamily::default();
        let dot_ops = self.dot_space(sidedness).basis_ops();
        let alg_ops = self.alg_der.basis_ops();
        for i1 in 0..=self.window.n1 {
            for i2 in 0..=self.window.slot2() {
                if rng.gen_bool(0.5) {
                    if let Some(op) = random_combination(rng, &alg_ops) {
                        fam.alg_parts.insert((i1, i2), op);
                    }
                }
            }
        }
        for k in 0..self.algebra.dim() {
            if rng.gen_bool(0.5) {
                if let Some(op) = random_combination(rng, &dot_ops) {
                    fam.perm_parts.insert(k, op);
                }
            }
        }
        fam
    }

    /// Single-slot families whose assemblies span every reachable
    /// derivation (assembly is linear in the family).
    pub fn der_generators(&self) -> Vec<DerComponentFamily> {
        let mut out = Vec::new();
        for j in 0..=self.window.slot2() {
            for op in self.alg_der.basis_ops() {
                out.push(DerComponentFamily {
                    alg_parts: BTreeMap::from([(j, op)]),
                    ..Default::default()
                });
            }
        }
        for k in 0..self.algebra.dim() {
            for op in self.perm_der.basis_ops() {
                out.push(DerComponentFamily {
                    perm_parts: BTreeMap::from([(k, op)]),
                    ..Default::default()
                });
            }
        }
        out
    }

    pub fn dider_generators(&self, sidedness: Sidedness) -> Vec<DiderComponentFamily> {
        let mut out = Vec::new();
        for i1 in 0..=self.window.n1 {
            for i2 in 0..=self.window.slot2() {
                for op in self.alg_der.basis_ops() {
                    out.push(DiderComponentFamily {
                        alg_parts: BTreeMap::from([((i1, i2), op)]),
                        ..Default::default()
                    });
                }
            }
        }
        for k in 0..self.algebra.dim() {
            for op in self.dot_space(sidedness).basis_ops() {
                out.push(DiderComponentFamily {
                    perm_parts: BTreeMap::from([(k, op)]),
                    ..Default::default()
                });
            }
        }
        out
    }
}

/// `span(a) ∩ span(b)` from the kernel of `[A | −B]`.
fn intersect(a: &SubspaceBasis, b: &SubspaceBasis) -> SubspaceBasis {
    let a_ops = a.basis_ops();
    let b_ops = b.basis_ops();
    let tag = a.tag.clone();
    let n = a.space_dim;
    if a_ops.is_empty() || b_ops.is_empty() {
        return SubspaceBasis::from_vectors(&tag, n, &[]);
    }
    let unknowns = a_ops.len() + b_ops.len();
    let mut sys = crate::solver::ConstraintSystem::new(unknowns);
    for e in 0..n * n {
        let mut row = Vec::new();
        for (i, op) in a_ops.iter().enumerate() {
            let v = &op.row_major()[e];
            if !v.is_zero() {
                row.push((i, v.clone()));
            }
        }
        for (i, op) in b_ops.iter().enumerate() {
            let v = &op.row_major()[e];
            if !v.is_zero() {
                row.push((a_ops.len() + i, -v.clone()));
            }
        }
        if !row.is_empty() {
            sys.push(row);
        }
    }
    let vectors: Vec<_> = crate::solver::kernel_vectors(&sys)
        .into_iter()
        .map(|k| {
            let mut acc = LinOp::endo_zero(&tag, n);
            for (i, c) in k.iter().filter(|(i, _)| *i < a_ops.len()) {
                acc = acc.add(&a_ops[*i].scale(c)).expect("same space");
            }
            crate::solver::vectorize(&acc)
        })
        .collect();
    SubspaceBasis::from_vectors(&tag, n, &vectors)
}
