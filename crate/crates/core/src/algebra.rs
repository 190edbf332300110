//! Finite-dimensional algebras given by structure constants, identity
//! validators, and the stock algebras used to build dialgebras.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{Poly, Scalar};
use crate::error::{ensure_dim, Error, Result};
use crate::report::{Entry, Report, Violation};

pub type Coords = Vec<Scalar>;
pub type SparseVec = Vec<(usize, Scalar)>;

/// Bilinear product table: entry `(i, j)` holds the sparse coordinates of
/// `e_i · e_j`, sorted by output index with no stored zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureTensor {
    dim: usize,
    table: Vec<SparseVec>,
}

impl StructureTensor {
    pub fn zero(dim: usize) -> Self {
        StructureTensor {
            dim,
            table: vec![Vec::new(); dim * dim],
        }
    }

    pub fn from_fn<F>(dim: usize, mut f: F) -> Self
    where
        F: FnMut(usize, usize) -> SparseVec,
    {
        let mut t = StructureTensor::zero(dim);
        for i in 0..dim {
            for j in 0..dim {
                t.table[i * dim + j] = normalize(f(i, j));
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &[(usize, Scalar)] {
        &self.table[i * self.dim + j]
    }

    /// Adds `c` to the coefficient of `e_k` in `e_i · e_j`.
    pub fn add_entry(&mut self, i: usize, j: usize, k: usize, c: Scalar) -> Result<()> {
        let n = self.dim;
        if i >= n || j >= n || k >= n {
            return Err(Error::contract(format!(
                "structure index ({i},{j},{k}) out of range for dim {n}"
            )));
        }
        let slot = &mut self.table[i * n + j];
        let mut acc: BTreeMap<usize, Scalar> = slot.drain(..).collect();
        *acc.entry(k).or_insert_with(Scalar::zero) += c;
        *slot = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(())
    }

    /// All nonzero `(i, j, k, c)` with `e_i e_j = ... + c e_k + ...`, in
    /// lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, &Scalar)> + '_ {
        let n = self.dim;
        self.table.iter().enumerate().flat_map(move |(ij, v)| {
            v.iter().map(move |(k, c)| (ij / n, ij % n, *k, c))
        })
    }

    pub fn mul(&self, v: &[Scalar], w: &[Scalar]) -> Result<Coords> {
        ensure_dim(self.dim, v.len())?;
        ensure_dim(self.dim, w.len())?;
        let mut out = vec![Scalar::zero(); self.dim];
        for (i, a) in v.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in w.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                add_scaled(&mut out, &(a * b), self.get(i, j));
            }
        }
        Ok(out)
    }

    /// `(Σ c_k e_k) · e_l` for a sparse left factor.
    pub fn sparse_times_basis(&self, v: &[(usize, Scalar)], l: usize) -> SparseVec {
        let mut acc = BTreeMap::new();
        for (k, c) in v {
            acc_scaled(&mut acc, c, self.get(*k, l));
        }
        finish(acc)
    }

    /// `e_i · (Σ c_k e_k)` for a sparse right factor.
    pub fn basis_times_sparse(&self, i: usize, v: &[(usize, Scalar)]) -> SparseVec {
        let mut acc = BTreeMap::new();
        for (k, c) in v {
            acc_scaled(&mut acc, c, self.get(i, *k));
        }
        finish(acc)
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

pub(crate) fn add_scaled(acc: &mut [Scalar], c: &Scalar, v: &[(usize, Scalar)]) {
    for (k, x) in v {
        acc[*k] += c * x;
    }
}

pub(crate) fn acc_scaled(acc: &mut BTreeMap<usize, Scalar>, c: &Scalar, v: &[(usize, Scalar)]) {
    for (k, x) in v {
        *acc.entry(*k).or_insert_with(Scalar::zero) += c * x;
    }
}

pub(crate) fn finish(acc: BTreeMap<usize, Scalar>) -> SparseVec {
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

fn normalize(v: SparseVec) -> SparseVec {
    let mut acc = BTreeMap::new();
    acc_scaled(&mut acc, &Scalar::one(), &v);
    finish(acc)
}

/// `a - b` for sparse vectors.
pub(crate) fn sparse_diff(a: &[(usize, Scalar)], b: &[(usize, Scalar)]) -> Vec<Entry> {
    let mut acc = BTreeMap::new();
    acc_scaled(&mut acc, &Scalar::one(), a);
    acc_scaled(&mut acc, &-Scalar::one(), b);
    finish(acc).into_iter().map(|(k, c)| Entry(k, c)).collect()
}

pub fn basis_vector(dim: usize, i: usize) -> Coords {
    let mut v = vec![Scalar::zero(); dim];
    v[i] = Scalar::one();
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Associative,
    LeftPerm,
    RightPerm,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Associative => "associative",
            Flavor::LeftPerm => "left_perm",
            Flavor::RightPerm => "right_perm",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    pub name: String,
    pub flavor: Flavor,
    pub basis: Vec<String>,
    pub structure: StructureTensor,
    pub unit: Option<Coords>,
}

impl FiniteAlgebra {
    pub fn new(
        name: impl Into<String>,
        flavor: Flavor,
        basis: Vec<String>,
        structure: StructureTensor,
        unit: Option<Coords>,
    ) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::contract("algebra dimension must be positive"));
        }
        ensure_dim(basis.len(), structure.dim())?;
        if let Some(u) = &unit {
            ensure_dim(basis.len(), u.len())?;
        }
        Ok(FiniteAlgebra {
            name: name.into(),
            flavor,
            basis,
            structure,
            unit,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn mul(&self, v: &[Scalar], w: &[Scalar]) -> Result<Coords> {
        self.structure.mul(v, w)
    }

    pub fn basis_vector(&self, i: usize) -> Coords {
        basis_vector(self.dim(), i)
    }

    /// Checks the declared unit on both sides of every basis element.
    pub fn check_unit(&self) -> Report {
        let Some(unit) = &self.unit else {
            return Report::default();
        };
        let n = self.dim();
        let sparse_unit: SparseVec = unit
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, c.clone()))
            .collect();
        let mut found = Vec::new();
        for j in 0..n {
            let ej = vec![(j, Scalar::one())];
            let left = self.structure.sparse_times_basis(&sparse_unit, j);
            let right = self.structure.basis_times_sparse(j, &sparse_unit);
            for (name, got) in [("unit*e", left), ("e*unit", right)] {
                let diff = sparse_diff(&got, &ej);
                if !diff.is_empty() {
                    found.push(Violation {
                        identity: name.into(),
                        indices: vec![j],
                        labels: vec![self.basis[j].clone()],
                        discrepancy: diff,
                    });
                }
            }
        }
        Report::collect(2 * n, found, None)
    }
}

/// Runs `diff(i, j, l)` over all basis triples and lists every nonzero
/// discrepancy in lexicographic order.
pub(crate) fn check_triples<F>(labels: &[String], identity: &str, diff: F) -> Report
where
    F: Fn(usize, usize, usize) -> Vec<Entry> + Sync,
{
    let n = labels.len();
    let found: Vec<Violation> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let diff = &diff;
            (0..n).flat_map(move |j| {
                (0..n).filter_map(move |l| {
                    let d = diff(i, j, l);
                    (!d.is_empty()).then(|| Violation {
                        identity: identity.to_string(),
                        indices: vec![i, j, l],
                        labels: vec![labels[i].clone(), labels[j].clone(), labels[l].clone()],
                        discrepancy: d,
                    })
                })
            })
        })
        .collect();
    Report::collect(n * n * n, found, None)
}

/// `(e_i A e_j) B e_l`
pub(crate) fn assoc_left(
    a: &StructureTensor,
    b: &StructureTensor,
    i: usize,
    j: usize,
    l: usize,
) -> SparseVec {
    b.sparse_times_basis(a.get(i, j), l)
}

/// `e_i A (e_j B e_l)`
pub(crate) fn assoc_right(
    a: &StructureTensor,
    b: &StructureTensor,
    i: usize,
    j: usize,
    l: usize,
) -> SparseVec {
    a.basis_times_sparse(i, b.get(j, l))
}

pub fn validate_associative(alg: &FiniteAlgebra) -> Report {
    let s = &alg.structure;
    check_triples(&alg.basis, "(xy)z = x(yz)", |i, j, l| {
        sparse_diff(&assoc_left(s, s, i, j, l), &assoc_right(s, s, i, j, l))
    })
}

pub fn validate_perm(alg: &FiniteAlgebra, side: Side) -> Report {
    let s = &alg.structure;
    match side {
        Side::Left => check_triples(&alg.basis, "(xy)z = (yx)z", |i, j, l| {
            sparse_diff(&assoc_left(s, s, i, j, l), &assoc_left(s, s, j, i, l))
        }),
        Side::Right => check_triples(&alg.basis, "x(yz) = x(zy)", |i, j, l| {
            sparse_diff(&assoc_right(s, s, i, j, l), &assoc_right(s, s, i, l, j))
        }),
    }
}

/// Every validator the algebra's flavor requires, plus the unit laws.
pub fn validate_flavor(alg: &FiniteAlgebra) -> Report {
    let mut report = validate_associative(alg);
    match alg.flavor {
        Flavor::Associative => {}
        Flavor::LeftPerm => report = report.merge(validate_perm(alg, Side::Left), None),
        Flavor::RightPerm => report = report.merge(validate_perm(alg, Side::Right), None),
    }
    report.merge(alg.check_unit(), None)
}

fn poly_coords(p: &Poly, dim: usize) -> SparseVec {
    p.terms()
        .filter(|(d, _)| *d < dim)
        .map(|(d, c)| (d, c.clone()))
        .collect()
}

fn power_label(var: &str, d: usize) -> String {
    match d {
        0 => "1".into(),
        1 => var.into(),
        _ => format!("{var}^{d}"),
    }
}

/// The base field as a one-dimensional algebra.
pub fn field() -> FiniteAlgebra {
    let s = StructureTensor::from_fn(1, |_, _| vec![(0, Scalar::one())]);
    FiniteAlgebra::new("Q", Flavor::Associative, vec!["1".into()], s, Some(vec![Scalar::one()]))
        .expect("field is well formed")
}

/// `M_n(k)` on matrix units `E_ij`, ordered row-major.
pub fn matrix_algebra(n: usize) -> Result<FiniteAlgebra> {
    if n == 0 {
        return Err(Error::contract("matrix_algebra needs n >= 1"));
    }
    let idx = |r: usize, c: usize| r * n + c;
    let basis = (0..n * n)
        .map(|k| format!("E{}{}", k / n + 1, k % n + 1))
        .collect();
    let s = StructureTensor::from_fn(n * n, |a, b| {
        let (r1, c1) = (a / n, a % n);
        let (r2, c2) = (b / n, b % n);
        if c1 == r2 {
            vec![(idx(r1, c2), Scalar::one())]
        } else {
            Vec::new()
        }
    });
    let mut unit = vec![Scalar::zero(); n * n];
    for r in 0..n {
        unit[idx(r, r)] = Scalar::one();
    }
    FiniteAlgebra::new(format!("M{n}"), Flavor::Associative, basis, s, Some(unit))
}

pub(crate) fn truncated_poly_in(n: usize, var: &str) -> Result<FiniteAlgebra> {
    if n == 0 {
        return Err(Error::contract("truncated_poly needs n >= 1"));
    }
    let bound = Some(n - 1);
    let s = StructureTensor::from_fn(n, |i, j| {
        let p = Poly::monomial(i, bound)
            .mul(&Poly::monomial(j, bound))
            .expect("shared bound");
        poly_coords(&p, n)
    });
    let basis = (0..n).map(|d| power_label(var, d)).collect();
    let mut unit = vec![Scalar::zero(); n];
    unit[0] = Scalar::one();
    FiniteAlgebra::new(
        format!("k[{var}]/({var}^{n})"),
        Flavor::Associative,
        basis,
        s,
        Some(unit),
    )
}

/// `k[t]/(t^n)`.
pub fn truncated_poly(n: usize) -> Result<FiniteAlgebra> {
    truncated_poly_in(n, "t")
}

/// `k[C_2]` on the basis `{1, g}`.
pub fn group_algebra_c2() -> FiniteAlgebra {
    let s = StructureTensor::from_fn(2, |i, j| vec![((i + j) % 2, Scalar::one())]);
    FiniteAlgebra::new(
        "k[C2]",
        Flavor::Associative,
        vec!["1".into(), "g".into()],
        s,
        Some(vec![Scalar::one(), Scalar::zero()]),
    )
    .expect("group algebra is well formed")
}

/// `k[x]/(x^{N+1})` with the perm product `P ∘ Q = P(0) Q`. The constant 1
/// is only a left unit, so no unit is declared.
pub fn perm_quotient(n: usize) -> FiniteAlgebra {
    let bound = Some(n);
    let s = StructureTensor::from_fn(n + 1, |i, j| {
        let p = Poly::monomial(i, bound)
            .perm_circ(&Poly::monomial(j, bound))
            .expect("shared bound");
        poly_coords(&p, n + 1)
    });
    let basis = (0..=n).map(|d| power_label("x", d)).collect();
    FiniteAlgebra::new(format!("P0[{n}]"), Flavor::LeftPerm, basis, s, None)
        .expect("perm quotient is well formed")
}

/// `A ⊗ B` with `(a⊗f)(b⊗g) = ab ⊗ fg`; basis pair `(i, j)` sits at
/// `i * dim B + j`.
pub fn tensor_algebra(a: &FiniteAlgebra, b: &FiniteAlgebra) -> FiniteAlgebra {
    let (da, db) = (a.dim(), b.dim());
    let s = StructureTensor::from_fn(da * db, |p, q| {
        let (i1, j1) = (p / db, p % db);
        let (i2, j2) = (q / db, q % db);
        let mut out = Vec::new();
        for (k, x) in a.structure.get(i1, i2) {
            for (l, y) in b.structure.get(j1, j2) {
                out.push((k * db + l, x * y));
            }
        }
        out
    });
    let basis = a
        .basis
        .iter()
        .flat_map(|x| b.basis.iter().map(move |y| format!("{x}⊗{y}")))
        .collect();
    let unit = match (&a.unit, &b.unit) {
        (Some(u), Some(v)) => Some(
            u.iter()
                .flat_map(|x| v.iter().map(move |y| x * y))
                .collect(),
        ),
        _ => None,
    };
    let flavor = match (a.flavor, b.flavor) {
        (Flavor::Associative, Flavor::Associative) => Flavor::Associative,
        (Flavor::Associative, f) | (f, _) => f,
    };
    FiniteAlgebra::new(format!("{}⊗{}", a.name, b.name), flavor, basis, s, unit)
        .expect("tensor of well-formed algebras")
}

/// Looks up a stock algebra by name: `Q`, `M<n>`, `k[t]/(t^<n>)` (or
/// `poly<n>`), `k[C2]`, `P0[<n>]`.
pub fn catalog(name: &str) -> Result<FiniteAlgebra> {
    let parse_n = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Parse(format!("unknown catalog algebra `{name}`")))
    };
    if name == "Q" || name == "k" {
        return Ok(field());
    }
    if name == "k[C2]" || name == "C2" {
        return Ok(group_algebra_c2());
    }
    if let Some(n) = name.strip_prefix('M') {
        return matrix_algebra(parse_n(n)?);
    }
    if let Some(n) = name.strip_prefix("poly") {
        return truncated_poly(parse_n(n)?);
    }
    if let Some(rest) = name.strip_prefix("k[t]/(t^") {
        return truncated_poly(parse_n(rest.trim_end_matches(')'))?);
    }
    if let Some(rest) = name.strip_prefix("P0[") {
        return Ok(perm_quotient(parse_n(rest.trim_end_matches(']'))?));
    }
    Err(Error::Parse(format!("unknown catalog algebra `{name}`")))
}
