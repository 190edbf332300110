//! Dialgebras with two structure tensors, the KP tensor-product
//! construction, and the dialgebra axiom validator.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{
    assoc_left, assoc_right, basis_vector, check_triples, perm_quotient, sparse_diff,
    tensor_algebra, truncated_poly_in, validate_associative, validate_perm, Coords, FiniteAlgebra,
    Side, StructureTensor,
};
use crate::arith::Scalar;
use crate::error::{ensure_dim, Error, Result};
use crate::report::Report;

/// Truncation window: `k[x]/(x^{n1+1})`, tensored with `k[x]/(x^{n2+1})`
/// when `n2` is present.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub n1: usize,
    pub n2: Option<usize>,
}

impl Window {
    pub fn new(n1: usize, n2: usize) -> Self {
        Window { n1, n2: Some(n2) }
    }

    pub fn single(n1: usize) -> Self {
        Window { n1, n2: None }
    }

    /// Slot-2 truncation degree; a missing second slot behaves like `k[x]/(x)`.
    pub fn slot2(&self) -> usize {
        self.n2.unwrap_or(0)
    }

    pub fn perm_dim(&self) -> usize {
        (self.n1 + 1) * (self.slot2() + 1)
    }

    /// Index of `x^{i1} ⊗ x^{i2}` in the perm algebra basis.
    pub fn perm_index(&self, i1: usize, i2: usize) -> usize {
        i1 * (self.slot2() + 1) + i2
    }

    pub fn perm_degrees(&self, p: usize) -> (usize, usize) {
        (p / (self.slot2() + 1), p % (self.slot2() + 1))
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.n2 {
            Some(n2) => write!(f, "({}, {})", self.n1, n2),
            None => write!(f, "({})", self.n1),
        }
    }
}

/// The perm algebra of a window: `P0[n1]`, or `P0[n1] ⊗ k[x]/(x^{n2+1})`.
pub fn window_perm_algebra(window: Window) -> FiniteAlgebra {
    let p0 = perm_quotient(window.n1);
    match window.n2 {
        Some(n2) => tensor_algebra(&p0, &truncated_poly_in(n2 + 1, "x").expect("n2 + 1 >= 1")),
        None => p0,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub perm: String,
    pub perm_dim: usize,
    pub algebra: String,
    pub algebra_dim: usize,
    pub window: Option<Window>,
}

/// The factor algebras of a KP-built dialgebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KpFactors {
    pub perm: FiniteAlgebra,
    pub algebra: FiniteAlgebra,
    pub window: Option<Window>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dialgebra {
    pub name: String,
    pub basis: Vec<String>,
    /// `⊢`
    pub left: StructureTensor,
    /// `⊣`
    pub right: StructureTensor,
    pub provenance: Option<Provenance>,
    pub factors: Option<Arc<KpFactors>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Product {
    /// `⊢`
    Left,
    /// `⊣`
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DialgebraElement {
    pub coords: Coords,
}

impl DialgebraElement {
    pub fn new(coords: Coords) -> Self {
        DialgebraElement { coords }
    }

    pub fn zero(dim: usize) -> Self {
        DialgebraElement::new(vec![Scalar::zero(); dim])
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        DialgebraElement::new(basis_vector(dim, i))
    }
}

impl Dialgebra {
    pub fn new(
        name: impl Into<String>,
        basis: Vec<String>,
        left: StructureTensor,
        right: StructureTensor,
    ) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::contract("dialgebra dimension must be positive"));
        }
        ensure_dim(basis.len(), left.dim())?;
        ensure_dim(basis.len(), right.dim())?;
        Ok(Dialgebra {
            name: name.into(),
            basis,
            left,
            right,
            provenance: None,
            factors: None,
        })
    }

    /// `⊢ = ⊣ =` the product of `alg`.
    pub fn from_associative(alg: &FiniteAlgebra) -> Self {
        Dialgebra::new(
            format!("Di({})", alg.name),
            alg.basis.clone(),
            alg.structure.clone(),
            alg.structure.clone(),
        )
        .expect("algebra is well formed")
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn product(&self, which: Product) -> &StructureTensor {
        match which {
            Product::Left => &self.left,
            Product::Right => &self.right,
        }
    }

    pub fn mul(&self, which: Product, a: &DialgebraElement, b: &DialgebraElement) -> Result<DialgebraElement> {
        Ok(DialgebraElement::new(self.product(which).mul(&a.coords, &b.coords)?))
    }

    pub fn check_element(&self, a: &DialgebraElement) -> Result<()> {
        ensure_dim(self.dim(), a.coords.len())
    }
}

/// Builds `P ⊗ A` with `(p⊗a) ⊢ (q⊗b) = p∘q ⊗ ab` and
/// `(p⊗a) ⊣ (q⊗b) = q∘p ⊗ ab`. Basis pair `(p, k)` sits at `p * dim A + k`.
pub fn kp_dialgebra(perm: &FiniteAlgebra, alg: &FiniteAlgebra) -> Result<Dialgebra> {
    let perm_report = validate_associative(perm).merge(validate_perm(perm, Side::Left), None);
    if !perm_report.is_pass() {
        return Err(Error::Precondition {
            what: format!("`{}` is not a left perm algebra", perm.name),
            report: perm_report,
        });
    }
    let alg_report = validate_associative(alg).merge(alg.check_unit(), None);
    if !alg_report.is_pass() {
        return Err(Error::Precondition {
            what: format!("`{}` is not associative with a valid unit", alg.name),
            report: alg_report,
        });
    }
    if alg.unit.is_none() {
        return Err(Error::Precondition {
            what: format!("`{}` has no unit", alg.name),
            report: Report::default(),
        });
    }
    Ok(kp_unchecked(perm, alg, None))
}

fn kp_unchecked(perm: &FiniteAlgebra, alg: &FiniteAlgebra, window: Option<Window>) -> Dialgebra {
    let (dp, da) = (perm.dim(), alg.dim());
    let product = |swap: bool| {
        StructureTensor::from_fn(dp * da, |x, y| {
            let (p, a) = (x / da, x % da);
            let (q, b) = (y / da, y % da);
            let perm_part = if swap {
                perm.structure.get(q, p)
            } else {
                perm.structure.get(p, q)
            };
            let mut out = Vec::new();
            for (r, s) in perm_part {
                for (m, t) in alg.structure.get(a, b) {
                    out.push((r * da + m, s * t));
                }
            }
            out
        })
    };
    let basis = perm
        .basis
        .iter()
        .flat_map(|p| alg.basis.iter().map(move |a| format!("{p}⊗{a}")))
        .collect();
    Dialgebra {
        name: format!("KP({} ; {})", perm.name, alg.name),
        basis,
        left: product(false),
        right: product(true),
        provenance: Some(Provenance {
            perm: perm.name.clone(),
            perm_dim: dp,
            algebra: alg.name.clone(),
            algebra_dim: da,
            window,
        }),
        factors: Some(Arc::new(KpFactors {
            perm: perm.clone(),
            algebra: alg.clone(),
            window,
        })),
    }
}

/// `𝒟₀ = P0[n1] ⊗ A` when `window.n2` is absent, otherwise
/// `𝒟 = (P0[n1] ⊗ k[x]/(x^{n2+1})) ⊗ A`.
pub fn kp_window(window: Window, alg: &FiniteAlgebra) -> Result<Dialgebra> {
    let perm = window_perm_algebra(window);
    let mut d = kp_dialgebra(&perm, alg)?;
    let factors = Arc::new(KpFactors {
        perm,
        algebra: alg.clone(),
        window: Some(window),
    });
    d.factors = Some(factors);
    if let Some(p) = d.provenance.as_mut() {
        p.window = Some(window);
    }
    Ok(d)
}

/// The three compatibility axioms and associativity of each product,
/// checked over all basis triples.
pub fn validate_dialgebra(d: &Dialgebra) -> Report {
    let (l, r) = (&d.left, &d.right);
    let labels = &d.basis;
    check_triples(labels, "x⊣(y⊣z) = x⊣(y⊢z)", |i, j, k| {
        sparse_diff(&assoc_right(r, r, i, j, k), &assoc_right(r, l, i, j, k))
    })
    .merge(
        check_triples(labels, "(x⊣y)⊢z = (x⊢y)⊢z", |i, j, k| {
            sparse_diff(&assoc_left(r, l, i, j, k), &assoc_left(l, l, i, j, k))
        }),
        None,
    )
    .merge(
        check_triples(labels, "x⊢(y⊣z) = (x⊢y)⊣z", |i, j, k| {
            sparse_diff(&assoc_right(l, r, i, j, k), &assoc_left(l, r, i, j, k))
        }),
        None,
    )
    .merge(
        check_triples(labels, "(x⊢y)⊢z = x⊢(y⊢z)", |i, j, k| {
            sparse_diff(&assoc_left(l, l, i, j, k), &assoc_right(l, l, i, j, k))
        }),
        None,
    )
    .merge(
        check_triples(labels, "(x⊣y)⊣z = x⊣(y⊣z)", |i, j, k| {
            sparse_diff(&assoc_left(r, r, i, j, k), &assoc_right(r, r, i, j, k))
        }),
        None,
    )
}

/// True when `e ⊢ v = v` for every basis vector `v`.
pub fn is_left_unit(d: &Dialgebra, e: &DialgebraElement) -> Result<bool> {
    d.check_element(e)?;
    let sparse: Vec<(usize, Scalar)> = e
        .coords
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.clone()))
        .collect();
    Ok((0..d.dim()).all(|v| d.left.sparse_times_basis(&sparse, v) == vec![(v, Scalar::one())]))
}

/// Left units of `⊢` found at basis level, followed (for KP-built
/// dialgebras whose algebra factor has a unit) by `p ⊗ 1_A` for every basis
/// left unit `p` of the perm factor, when that element is not already a
/// basis vector.
pub fn find_bar_units(d: &Dialgebra) -> Vec<DialgebraElement> {
    let n = d.dim();
    let mut found: Vec<DialgebraElement> = (0..n)
        .map(|i| DialgebraElement::basis(n, i))
        .filter(|e| is_left_unit(d, e).unwrap_or(false))
        .collect();
    if let Some(f) = &d.factors {
        if let Some(unit) = &f.algebra.unit {
            let dp = f.perm.dim();
            let da = f.algebra.dim();
            for p in 0..dp {
                let is_perm_left_unit = (0..dp)
                    .all(|q| f.perm.structure.get(p, q) == [(q, Scalar::one())].as_slice());
                if !is_perm_left_unit {
                    continue;
                }
                let mut coords = vec![Scalar::zero(); n];
                for (k, c) in unit.iter().enumerate() {
                    coords[p * da + k] = c.clone();
                }
                let e = DialgebraElement::new(coords);
                if !found.contains(&e) && is_left_unit(d, &e).unwrap_or(false) {
                    found.push(e);
                }
            }
        }
    }
    found
}

/// The left unit `1⊗1⊗1_A` of a KP window dialgebra.
pub fn window_left_unit(d: &Dialgebra) -> Result<DialgebraElement> {
    let f = d
        .factors
        .as_ref()
        .ok_or_else(|| Error::contract("dialgebra has no KP factors"))?;
    let unit = f
        .algebra
        .unit
        .as_ref()
        .ok_or_else(|| Error::contract("algebra factor has no unit"))?;
    let mut coords = vec![Scalar::zero(); d.dim()];
    coords[..unit.len()].clone_from_slice(unit);
    Ok(DialgebraElement::new(coords))
}
