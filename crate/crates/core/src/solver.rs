//! Brute-force (di)derivation spaces as exact nullspaces of the linearized
//! Leibniz constraints.
//!
//! An operator on an `n`-dimensional space has `n²` unknown entries; entry
//! `(r, c)` is unknown `r * n + c`. Constraint rows are generated per basis
//! pair and streamed into a fraction-free eliminator that keeps every
//! pivot row as a primitive integer vector with a positive leading entry.
//! Reduced row echelon form is unique, so the resulting bases do not depend
//! on row order or thread count.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{FiniteAlgebra, SparseVec, StructureTensor};
use crate::arith::{primitive_integers, Scalar};
use crate::dialgebra::Dialgebra;
use crate::error::{ensure_dim, Error, Result};
use crate::operators::{
    algebra_identities, derivation_identities, diderivation_identities, DerivationKind,
    LeibnizIdentity, LinOp, Term,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowOrigin {
    pub identity: String,
    pub pair: (usize, usize),
    pub coordinate: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintRow {
    pub origin: Option<RowOrigin>,
    pub coeffs: SparseVec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub unknowns: usize,
    pub rows: Vec<ConstraintRow>,
}

impl ConstraintSystem {
    pub fn new(unknowns: usize) -> Self {
        ConstraintSystem {
            unknowns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, coeffs: SparseVec) {
        self.rows.push(ConstraintRow {
            origin: None,
            coeffs,
        });
    }
}

type IntRow = Vec<(usize, BigInt)>;

/// `a·x − b·y` on sparse integer rows, dropping zeros.
fn combine(a: &BigInt, x: &[(usize, BigInt)], b: &BigInt, y: &[(usize, BigInt)]) -> IntRow {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let ci = x.get(i).map(|e| e.0);
        let cj = y.get(j).map(|e| e.0);
        match (ci, cj) {
            (Some(p), Some(q)) if p == q => {
                let v = a * &x[i].1 - b * &y[j].1;
                if !v.is_zero() {
                    out.push((p, v));
                }
                i += 1;
                j += 1;
            }
            (Some(p), Some(q)) if p < q => {
                out.push((p, a * &x[i].1));
                i += 1;
            }
            (Some(p), None) => {
                out.push((p, a * &x[i].1));
                i += 1;
            }
            (_, Some(q)) => {
                out.push((q, -(b * &y[j].1)));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

fn make_primitive(row: &mut IntRow) {
    let g = row.iter().fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c));
    if !g.is_zero() && !g.is_one() {
        for (_, c) in row.iter_mut() {
            *c /= &g;
        }
    }
    if row.first().is_some_and(|(_, c)| c.is_negative()) {
        for (_, c) in row.iter_mut() {
            *c = -&*c;
        }
    }
}

/// Streaming row reducer. Pivot rows have distinct leading columns; full
/// reduction happens once in [`Eliminator::into_rref`].
#[derive(Debug)]
pub(crate) struct Eliminator {
    unknowns: usize,
    pivots: BTreeMap<usize, IntRow>,
}

impl Eliminator {
    pub fn new(unknowns: usize) -> Self {
        Eliminator {
            unknowns,
            pivots: BTreeMap::new(),
        }
    }

    /// Returns true when the row was independent of the rows seen so far.
    pub fn push(&mut self, mut row: IntRow) -> bool {
        make_primitive(&mut row);
        loop {
            let Some((lead, a)) = row.first().cloned() else {
                return false;
            };
            match self.pivots.get(&lead) {
                Some(p) => {
                    let b = p[0].1.clone();
                    let g = a.gcd(&b);
                    row = combine(&(&b / &g), &row, &(&a / &g), p);
                    make_primitive(&mut row);
                }
                None => {
                    self.pivots.insert(lead, row);
                    return true;
                }
            }
        }
    }

    pub fn push_rational(&mut self, row: &[(usize, Scalar)]) -> bool {
        self.push(primitive_integers(row))
    }

    /// Reduced row echelon form: each row has leading entry 1 and vanishes
    /// at every other pivot column. Rows are ordered by pivot column.
    pub fn into_rref(self) -> Vec<(usize, SparseVec)> {
        let mut reduced: BTreeMap<usize, IntRow> = BTreeMap::new();
        for (&lead, row) in self.pivots.iter().rev() {
            let mut row = row.clone();
            // Entries at later pivot columns are cleared with the already
            // reduced rows, which carry no other pivot columns.
            loop {
                let hit = row
                    .iter()
                    .skip(1)
                    .find(|(c, _)| reduced.contains_key(c))
                    .map(|(c, v)| (*c, v.clone()));
                let Some((col, a)) = hit else { break };
                let p = &reduced[&col];
                let b = p[0].1.clone();
                let g = a.gcd(&b);
                row = combine(&(&b / &g), &row, &(&a / &g), p);
                make_primitive(&mut row);
            }
            reduced.insert(lead, row);
        }
        reduced
            .into_iter()
            .map(|(lead, row)| {
                let b = row[0].1.clone();
                let rat = row
                    .into_iter()
                    .map(|(c, v)| (c, Scalar::new(v, b.clone())))
                    .collect();
                (lead, rat)
            })
            .collect()
    }

    /// Kernel basis: one vector per free column `f`, equal to 1 at `f` and
    /// 0 at every other free column.
    pub fn kernel(self) -> Vec<SparseVec> {
        let unknowns = self.unknowns;
        let rref = self.into_rref();
        let pivot_cols: std::collections::BTreeSet<usize> = rref.iter().map(|(p, _)| *p).collect();
        let mut per_free: BTreeMap<usize, SparseVec> = (0..unknowns)
            .filter(|c| !pivot_cols.contains(c))
            .map(|f| (f, vec![(f, Scalar::one())]))
            .collect();
        for (p, row) in &rref {
            for (c, v) in row.iter().skip(1) {
                if let Some(vec) = per_free.get_mut(c) {
                    vec.push((*p, -v.clone()));
                }
            }
        }
        per_free
            .into_values()
            .map(|mut v| {
                v.sort_by_key(|e| e.0);
                v
            })
            .collect()
    }
}

/// A subspace of operators on one space, stored as the reduced row echelon
/// form of its vectorized (row-major) members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    pub tag: String,
    /// Dimension of the underlying space (operators are `n × n`).
    pub space_dim: usize,
    rows: Vec<(usize, SparseVec)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// `op = Σ c_i · basis_ops[i]`.
    Coefficients(Vec<Scalar>),
    /// A linear functional on vectorized operators that vanishes on the
    /// subspace and not on `op`.
    Separator(SparseVec),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub contained: bool,
    pub certificate: Certificate,
}

impl SubspaceBasis {
    fn from_eliminator(tag: &str, space_dim: usize, elim: Eliminator) -> Self {
        SubspaceBasis {
            tag: tag.to_string(),
            space_dim,
            rows: elim.into_rref(),
        }
    }

    /// The span of vectorized operators.
    pub fn from_vectors(tag: &str, space_dim: usize, vectors: &[SparseVec]) -> Self {
        let mut elim = Eliminator::new(space_dim * space_dim);
        for v in vectors {
            elim.push_rational(v);
        }
        SubspaceBasis::from_eliminator(tag, space_dim, elim)
    }

    pub fn span(tag: &str, space_dim: usize, ops: &[LinOp]) -> Result<Self> {
        let mut vectors = Vec::with_capacity(ops.len());
        for op in ops {
            check_op(tag, space_dim, op)?;
            vectors.push(vectorize(op));
        }
        Ok(SubspaceBasis::from_vectors(tag, space_dim, &vectors))
    }

    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    pub fn basis_vectors(&self) -> impl Iterator<Item = &SparseVec> {
        self.rows.iter().map(|(_, r)| r)
    }

    pub fn basis_ops(&self) -> Vec<LinOp> {
        self.rows
            .iter()
            .map(|(_, r)| devectorize(&self.tag, self.space_dim, r))
            .collect()
    }

    /// Membership test with a certificate either way.
    pub fn contains(&self, op: &LinOp) -> Result<Membership> {
        check_op(&self.tag, self.space_dim, op)?;
        let v = op.row_major();
        let coeffs: Vec<Scalar> = self.rows.iter().map(|(p, _)| v[*p].clone()).collect();
        let mut residual: Vec<Scalar> = v.to_vec();
        for ((_, row), c) in self.rows.iter().zip(&coeffs) {
            if c.is_zero() {
                continue;
            }
            for (k, x) in row {
                residual[*k] -= c * x;
            }
        }
        match residual.iter().position(|x| !x.is_zero()) {
            None => Ok(Membership {
                contained: true,
                certificate: Certificate::Coefficients(coeffs),
            }),
            Some(col) => {
                // f(v) = v[col] − Σ_p R_p[col] · v[p]
                let mut f = vec![(col, Scalar::one())];
                for (p, row) in &self.rows {
                    if let Some((_, x)) = row.iter().find(|(k, _)| *k == col) {
                        f.push((*p, -x.clone()));
                    }
                }
                f.sort_by_key(|e| e.0);
                Ok(Membership {
                    contained: false,
                    certificate: Certificate::Separator(f),
                })
            }
        }
    }

    pub fn contains_subspace(&self, other: &SubspaceBasis) -> Result<bool> {
        for op in other.basis_ops() {
            if !self.contains(&op)?.contained {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Canonical forms are unique, so equal subspaces have equal rows.
    pub fn same_subspace(&self, other: &SubspaceBasis) -> bool {
        self.space_dim == other.space_dim && self.rows == other.rows
    }
}

fn check_op(tag: &str, n: usize, op: &LinOp) -> Result<()> {
    if op.domain_tag != tag || op.codomain_tag != tag {
        return Err(Error::Tag {
            left: tag.to_string(),
            right: format!("{} -> {}", op.domain_tag, op.codomain_tag),
        });
    }
    ensure_dim(n, op.domain_dim())?;
    ensure_dim(n, op.codomain_dim())
}

pub fn vectorize(op: &LinOp) -> SparseVec {
    op.row_major()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.clone()))
        .collect()
}

pub fn devectorize(tag: &str, n: usize, v: &[(usize, Scalar)]) -> LinOp {
    let mut op = LinOp::endo_zero(tag, n);
    for (k, c) in v {
        op.set(k / n, k % n, c.clone());
    }
    op
}

/// Exact kernel of an explicit system, returned in canonical form.
pub fn nullspace(system: &ConstraintSystem, tag: &str, space_dim: usize) -> Result<SubspaceBasis> {
    ensure_dim(space_dim * space_dim, system.unknowns)?;
    let mut elim = Eliminator::new(system.unknowns);
    for row in &system.rows {
        elim.push_rational(&row.coeffs);
    }
    Ok(SubspaceBasis::from_vectors(tag, space_dim, &elim.kernel()))
}

/// Kernel vectors of an explicit system over arbitrary unknowns.
pub fn kernel_vectors(system: &ConstraintSystem) -> Vec<SparseVec> {
    let mut elim = Eliminator::new(system.unknowns);
    for row in &system.rows {
        elim.push_rational(&row.coeffs);
    }
    elim.kernel()
}

/// Linearization of every identity at the basis pair `(i, j)`: one row per
/// (identity, output coordinate).
fn pair_rows(
    n: usize,
    tables: &[&StructureTensor],
    identities: &[LeibnizIdentity],
    i: usize,
    j: usize,
) -> Vec<ConstraintRow> {
    let unknown = |r: usize, c: usize| r * n + c;
    let mut out = Vec::new();
    for id in identities {
        let mut rows: Vec<BTreeMap<usize, Scalar>> = vec![BTreeMap::new(); n];
        let mut bump = |m: usize, u: usize, v: Scalar| {
            *rows[m].entry(u).or_insert_with(Scalar::zero) += v;
        };
        for (sign, term, t) in &id.terms {
            let s = Scalar::from_integer(BigInt::from(*sign));
            let table = tables[*t];
            let (x, y, term) = match term {
                Term::OpFirstSwapped => (j, i, Term::OpFirst),
                Term::OpSecondSwapped => (j, i, Term::OpSecond),
                other => (i, j, *other),
            };
            match term {
                // d(e_x e_y)_m = Σ_k c_k d[m][k]
                Term::Image => {
                    for (k, c) in table.get(x, y) {
                        for m in 0..n {
                            bump(m, unknown(m, *k), &s * c);
                        }
                    }
                }
                // (d(e_x) e_y)_m = Σ_p d[p][x] (e_p e_y)_m
                Term::OpFirst => {
                    for p in 0..n {
                        for (m, c) in table.get(p, y) {
                            bump(*m, unknown(p, x), &s * c);
                        }
                    }
                }
                // (e_x d(e_y))_m = Σ_p d[p][y] (e_x e_p)_m
                Term::OpSecond => {
                    for p in 0..n {
                        for (m, c) in table.get(x, p) {
                            bump(*m, unknown(p, y), &s * c);
                        }
                    }
                }
                Term::OpFirstSwapped | Term::OpSecondSwapped => unreachable!(),
            }
        }
        for (m, row) in rows.into_iter().enumerate() {
            let coeffs: SparseVec = row.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            if !coeffs.is_empty() {
                out.push(ConstraintRow {
                    origin: Some(RowOrigin {
                        identity: id.name.to_string(),
                        pair: (i, j),
                        coordinate: m,
                    }),
                    coeffs,
                });
            }
        }
    }
    out
}

/// Materializes the whole constraint system (for inspection; the space
/// computations stream instead).
pub fn constraint_system(
    n: usize,
    tables: &[&StructureTensor],
    kind: SpaceKind,
) -> ConstraintSystem {
    let identities = kind.identities();
    let mut system = ConstraintSystem::new(n * n);
    for i in 0..n {
        for j in 0..n {
            system.rows.extend(pair_rows(n, tables, &identities, i, j));
        }
    }
    system
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    Derivation,
    Diderivation,
    Algebra(DerivationKind),
}

impl SpaceKind {
    fn identities(self) -> Vec<LeibnizIdentity> {
        match self {
            SpaceKind::Derivation => derivation_identities(),
            SpaceKind::Diderivation => diderivation_identities(),
            SpaceKind::Algebra(kind) => algebra_identities(kind),
        }
    }
}

fn solve_streamed(tag: &str, n: usize, tables: &[&StructureTensor], kind: SpaceKind) -> SubspaceBasis {
    let identities = kind.identities();
    let mut elim = Eliminator::new(n * n);
    for i in 0..n {
        // Rows are generated in parallel but pushed in a fixed order.
        let batch: Vec<Vec<ConstraintRow>> = (0..n)
            .into_par_iter()
            .map(|j| pair_rows(n, tables, &identities, i, j))
            .collect();
        for row in batch.into_iter().flatten() {
            elim.push_rational(&row.coeffs);
        }
    }
    SubspaceBasis::from_vectors(tag, n, &elim.kernel())
}

pub fn derivation_space(d: &Dialgebra) -> SubspaceBasis {
    solve_streamed(&d.name, d.dim(), &[&d.left, &d.right], SpaceKind::Derivation)
}

pub fn diderivation_space(d: &Dialgebra) -> SubspaceBasis {
    solve_streamed(&d.name, d.dim(), &[&d.left, &d.right], SpaceKind::Diderivation)
}

pub fn algebra_derivation_space(alg: &FiniteAlgebra, kind: DerivationKind) -> SubspaceBasis {
    solve_streamed(&alg.name, alg.dim(), &[&alg.structure], SpaceKind::Algebra(kind))
}
