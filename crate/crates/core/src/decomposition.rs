//! Component families for derivations and diderivations of a windowed
//! tensor-product dialgebra `𝒫 ⊗ A`, with assembly, slice extraction and
//! the factorization check through the left unit `1⊗1`.
//!
//! Perm parts are grouped by the algebra basis index `k`: the operator
//! stored under `k` is the whole `u_k`-coordinate of `d(P⊗1_A)`. The
//! individual monomial pieces of that coordinate are generally not
//! derivations of `𝒫`; their sums are.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::{FiniteAlgebra, SparseVec};
use crate::arith::Scalar;
use crate::dialgebra::{Dialgebra, Window};
use crate::error::{Error, Result};
use crate::operators::{
    is_algebra_derivation, is_derivation, is_diderivation, DerivationKind, LinOp,
};
use crate::report::{Entry, Report, Violation, WITNESS_LIMIT};

/// `d = Σ_j id⊗L_{x^j}⊗D_j + Σ_k d_k⊗R_{u_k}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DerComponentFamily {
    /// `k ↦ d_k ∈ Der(𝒫)`.
    pub perm_parts: BTreeMap<usize, LinOp>,
    /// slot-2 degree `j ↦ D_j ∈ Der(A)`.
    pub alg_parts: BTreeMap<usize, LinOp>,
}

/// `δ = Σ_i x^{i1}ev₀⊗L_{x^{i2}}⊗δ_i + Σ_k ḋ_k⊗R_{u_k}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiderComponentFamily {
    /// `(i1, i2) ↦ δ_i ∈ Der(A)`.
    pub alg_parts: BTreeMap<(usize, usize), LinOp>,
    /// `k ↦ ḋ_k`, a one-sided derivation of `𝒫`.
    pub perm_parts: BTreeMap<usize, LinOp>,
}

impl DerComponentFamily {
    pub fn is_empty(&self) -> bool {
        self.perm_parts.is_empty() && self.alg_parts.is_empty()
    }
}

impl DiderComponentFamily {
    pub fn is_empty(&self) -> bool {
        self.perm_parts.is_empty() && self.alg_parts.is_empty()
    }
}

/// Which Leibniz rule the `ḋ` parts of a diderivation family must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sidedness {
    Left,
    Right,
    Both,
}

impl Sidedness {
    pub const ALL: [Sidedness; 3] = [Sidedness::Left, Sidedness::Right, Sidedness::Both];

    pub fn as_str(self) -> &'static str {
        match self {
            Sidedness::Left => "left",
            Sidedness::Right => "right",
            Sidedness::Both => "both",
        }
    }
}

/// One matrix entry where the reassembled operator differs from the input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDiscrepancy {
    pub row: usize,
    pub col: usize,
    #[serde(with = "crate::arith::serde_scalar")]
    pub expected: Scalar,
    #[serde(with = "crate::arith::serde_scalar")]
    pub assembled: Scalar,
    /// Slot-2 degree of the output coordinate.
    pub slot2_degree: usize,
    /// The output coordinate sits at the top slot-2 degree of the window.
    pub boundary: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentViolation {
    pub part: String,
    pub rule: String,
    pub report: Report,
}

/// An extracted `(j1, j2)` coordinate map with `j1 > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiMap {
    pub j1: usize,
    pub j2: usize,
    pub op: LinOp,
    /// Whether `φ(a) = a·c` with `c` the same coordinate of `d(1⊗1_A)`,
    /// which is read off the perm parts.
    pub right_mult_by_unit_image: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DerResidual {
    pub phi: Vec<PhiMap>,
    pub roundtrip: Vec<MatrixDiscrepancy>,
    /// Total number of differing entries (the list above is capped).
    pub roundtrip_total: usize,
    pub components: Vec<ComponentViolation>,
}

impl DerResidual {
    pub fn phi_determined(&self) -> bool {
        self.phi.iter().all(|p| p.right_mult_by_unit_image)
    }

    pub fn is_clean(&self) -> bool {
        self.roundtrip_total == 0 && self.components.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SidednessOutcome {
    pub k: usize,
    pub left: bool,
    pub right: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiderResidual {
    pub roundtrip: Vec<MatrixDiscrepancy>,
    pub roundtrip_total: usize,
    pub components: Vec<ComponentViolation>,
    pub sidedness: Vec<SidednessOutcome>,
}

impl DiderResidual {
    pub fn is_clean(&self) -> bool {
        self.roundtrip_total == 0 && self.components.is_empty()
    }

    pub fn all_left(&self) -> bool {
        self.sidedness.iter().all(|s| s.left)
    }

    pub fn all_right(&self) -> bool {
        self.sidedness.iter().all(|s| s.right)
    }
}

/// Layout of a windowed dialgebra: `index(p, k) = p · dim A + k`.
struct Layout<'a> {
    window: Window,
    perm: &'a FiniteAlgebra,
    alg: &'a FiniteAlgebra,
    da: usize,
    dp: usize,
}

impl<'a> Layout<'a> {
    fn of(d: &'a Dialgebra) -> Result<Self> {
        let f = d
            .factors
            .as_ref()
            .ok_or_else(|| Error::contract(format!("`{}` is not a tensor-product dialgebra", d.name)))?;
        let window = f
            .window
            .ok_or_else(|| Error::contract(format!("`{}` has no truncation window", d.name)))?;
        let layout = Layout {
            window,
            perm: &f.perm,
            alg: &f.algebra,
            da: f.algebra.dim(),
            dp: f.perm.dim(),
        };
        if layout.dp != window.perm_dim() || layout.dp * layout.da != d.dim() {
            return Err(Error::contract("factor dimensions do not match the window"));
        }
        Ok(layout)
    }

    fn idx(&self, p: usize, k: usize) -> usize {
        p * self.da + k
    }

    fn unit(&self) -> Result<&'a [Scalar]> {
        self.alg
            .unit
            .as_deref()
            .ok_or_else(|| Error::contract(format!("`{}` has no unit", self.alg.name)))
    }

    fn n2(&self) -> usize {
        self.window.slot2()
    }

    fn check_perm_key(&self, k: usize) -> Result<()> {
        if k >= self.da {
            return Err(Error::contract(format!(
                "perm part index {k} outside the algebra basis (dim {})",
                self.da
            )));
        }
        Ok(())
    }

    /// `Σ_k d_k(P⊗f) ⊗ a·u_k`, added into `out`.
    fn add_perm_terms(&self, out: &mut LinOp, parts: &BTreeMap<usize, LinOp>) {
        for (&k, dk) in parts {
            for p in 0..self.dp {
                let image = dk.column(p);
                if image.is_empty() {
                    continue;
                }
                for l in 0..self.da {
                    for (m, t) in self.alg.structure.get(l, k) {
                        for (q, c) in &image {
                            out.add_at(self.idx(*q, *m), self.idx(p, l), &(c * t));
                        }
                    }
                }
            }
        }
    }

    /// The operator `a ↦ (coordinate p of op(e_src ⊗ a))` on `A`, with
    /// `e_src` a perm basis element.
    fn slice(&self, op: &LinOp, src: usize, target: usize) -> LinOp {
        let mut out = LinOp::endo_zero(&self.alg.name, self.da);
        for l in 0..self.da {
            for m in 0..self.da {
                let v = op.get(self.idx(target, m), self.idx(src, l));
                if !v.is_zero() {
                    out.set(m, l, v.clone());
                }
            }
        }
        out
    }

    /// `d_k(P) = u_k-coordinate of d(P⊗1_A)`, as operators on `𝒫`.
    fn perm_slices(&self, op: &LinOp) -> Result<BTreeMap<usize, LinOp>> {
        let unit = self.unit()?;
        let mut parts = BTreeMap::new();
        for k in 0..self.da {
            let mut dk = LinOp::endo_zero(&self.perm.name, self.dp);
            for p in 0..self.dp {
                for q in 0..self.dp {
                    let mut v = Scalar::zero();
                    for (l, c) in unit.iter().enumerate() {
                        if !c.is_zero() {
                            v += c * op.get(self.idx(q, k), self.idx(p, l));
                        }
                    }
                    if !v.is_zero() {
                        dk.set(q, p, v);
                    }
                }
            }
            if !dk.is_zero() {
                parts.insert(k, dk);
            }
        }
        Ok(parts)
    }

    fn roundtrip(&self, original: &LinOp, assembled: &LinOp) -> (Vec<MatrixDiscrepancy>, usize) {
        let n = original.domain_dim();
        let mut found = Vec::new();
        let mut total = 0;
        for row in 0..n {
            for col in 0..n {
                let (e, a) = (original.get(row, col), assembled.get(row, col));
                if e != a {
                    total += 1;
                    if found.len() < WITNESS_LIMIT {
                        let (_, deg) = self.window.perm_degrees(row / self.da);
                        found.push(MatrixDiscrepancy {
                            row,
                            col,
                            expected: e.clone(),
                            assembled: a.clone(),
                            slot2_degree: deg,
                            boundary: deg == self.n2(),
                        });
                    }
                }
            }
        }
        (found, total)
    }
}

fn component_check(
    alg: &FiniteAlgebra,
    op: &LinOp,
    kind: DerivationKind,
    part: String,
) -> Result<Option<ComponentViolation>> {
    let report = is_algebra_derivation(alg, op, kind)?;
    Ok((!report.is_pass()).then(|| ComponentViolation {
        part,
        rule: kind_name(kind).to_string(),
        report,
    }))
}

fn kind_name(kind: DerivationKind) -> &'static str {
    match kind {
        DerivationKind::TwoSided => "derivation",
        DerivationKind::Left => "left derivation",
        DerivationKind::Right => "right derivation",
    }
}

fn reject(violation: Option<ComponentViolation>) -> Result<()> {
    match violation {
        None => Ok(()),
        Some(v) => Err(Error::Precondition {
            what: format!("{} is not a {}", v.part, v.rule),
            report: v.report,
        }),
    }
}

fn validate_der_family(l: &Layout, fam: &DerComponentFamily) -> Result<()> {
    for (&k, dk) in &fam.perm_parts {
        l.check_perm_key(k)?;
        reject(component_check(l.perm, dk, DerivationKind::TwoSided, format!("perm part k={k}"))?)?;
    }
    for (&j, dj) in &fam.alg_parts {
        if j > l.n2() {
            return Err(Error::contract(format!(
                "alg part j={j} beyond the slot-2 window (N2 = {})",
                l.n2()
            )));
        }
        reject(component_check(l.alg, dj, DerivationKind::TwoSided, format!("alg part j={j}"))?)?;
    }
    Ok(())
}

fn validate_dider_family(l: &Layout, fam: &DiderComponentFamily, sidedness: Sidedness) -> Result<()> {
    for (&(i1, i2), di) in &fam.alg_parts {
        if i1 > l.window.n1 || i2 > l.n2() {
            return Err(Error::contract(format!(
                "alg part ({i1},{i2}) outside the window {}",
                l.window
            )));
        }
        reject(component_check(l.alg, di, DerivationKind::TwoSided, format!("alg part ({i1},{i2})"))?)?;
    }
    for (&k, dk) in &fam.perm_parts {
        l.check_perm_key(k)?;
        let kinds: &[DerivationKind] = match sidedness {
            Sidedness::Left => &[DerivationKind::Left],
            Sidedness::Right => &[DerivationKind::Right],
            Sidedness::Both => &[DerivationKind::Left, DerivationKind::Right],
        };
        for &kind in kinds {
            reject(component_check(l.perm, dk, kind, format!("perm part k={k}"))?)?;
        }
    }
    Ok(())
}

fn assemble_der_unchecked(d: &Dialgebra, l: &Layout, fam: &DerComponentFamily) -> LinOp {
    let mut out = LinOp::endo_zero(&d.name, d.dim());
    let n2 = l.n2();
    for (&j, dj) in &fam.alg_parts {
        for p in 0..l.dp {
            let (i1, i2) = l.window.perm_degrees(p);
            if i2 + j > n2 {
                continue;
            }
            let target = l.window.perm_index(i1, i2 + j);
            for a in 0..l.da {
                for (m, c) in dj.column(a) {
                    out.add_at(l.idx(target, m), l.idx(p, a), &c);
                }
            }
        }
    }
    l.add_perm_terms(&mut out, &fam.perm_parts);
    out
}

fn assemble_dider_unchecked(d: &Dialgebra, l: &Layout, fam: &DiderComponentFamily) -> LinOp {
    let mut out = LinOp::endo_zero(&d.name, d.dim());
    let n2 = l.n2();
    for (&(i1, i2), di) in &fam.alg_parts {
        // x^{p1}(0) vanishes unless p1 = 0.
        for f in 0..=n2 {
            if f + i2 > n2 {
                continue;
            }
            let src = l.window.perm_index(0, f);
            let target = l.window.perm_index(i1, f + i2);
            for a in 0..l.da {
                for (m, c) in di.column(a) {
                    out.add_at(l.idx(target, m), l.idx(src, a), &c);
                }
            }
        }
    }
    l.add_perm_terms(&mut out, &fam.perm_parts);
    out
}

/// Validates every component, then builds the operator
/// `P⊗f⊗a ↦ Σ P⊗x^j f⊗D_j(a) + Σ d_k(P⊗f)⊗a·u_k`.
pub fn assemble_derivation(d: &Dialgebra, fam: &DerComponentFamily) -> Result<LinOp> {
    let l = Layout::of(d)?;
    validate_der_family(&l, fam)?;
    Ok(assemble_der_unchecked(d, &l, fam))
}

/// Validates every component (perm parts against `sidedness`), then builds
/// `P⊗f⊗a ↦ Σ P(0)x^{i1}⊗x^{i2}f⊗δ_i(a) + Σ ḋ_k(P⊗f)⊗a·u_k`.
pub fn assemble_diderivation(
    d: &Dialgebra,
    fam: &DiderComponentFamily,
    sidedness: Sidedness,
) -> Result<LinOp> {
    let l = Layout::of(d)?;
    validate_dider_family(&l, fam, sidedness)?;
    Ok(assemble_dider_unchecked(d, &l, fam))
}

/// Reads the family off the slices `{P⊗1_A}` and `{1⊗1⊗u_k}`.
pub fn decompose_derivation(d: &Dialgebra, op: &LinOp) -> Result<(DerComponentFamily, DerResidual)> {
    let l = Layout::of(d)?;
    let report = is_derivation(d, op)?;
    if !report.is_pass() {
        return Err(Error::Precondition {
            what: "operator is not a derivation".into(),
            report,
        });
    }
    let unit = l.unit()?;
    let one = l.window.perm_index(0, 0);
    let perm_parts = l.perm_slices(op)?;

    let mut alg_parts = BTreeMap::new();
    for j in 0..=l.n2() {
        let dj = l.slice(op, one, l.window.perm_index(0, j));
        if !dj.is_zero() {
            alg_parts.insert(j, dj);
        }
    }

    let mut phi = Vec::new();
    for j1 in 1..=l.window.n1 {
        for j2 in 0..=l.n2() {
            let target = l.window.perm_index(j1, j2);
            let op_phi = l.slice(op, one, target);
            // c = coordinate `target` of d(1⊗1_A); compare φ with R_c.
            let mut c = vec![Scalar::zero(); l.da];
            for (lu, w) in unit.iter().enumerate() {
                if w.is_zero() {
                    continue;
                }
                for (m, cm) in c.iter_mut().enumerate() {
                    *cm += w * op.get(l.idx(target, m), l.idx(one, lu));
                }
            }
            let r_c = crate::operators::algebra_mult_right(l.alg, &c)?;
            let matches = r_c == op_phi;
            if !op_phi.is_zero() || !matches {
                phi.push(PhiMap {
                    j1,
                    j2,
                    op: op_phi,
                    right_mult_by_unit_image: matches,
                });
            }
        }
    }

    let fam = DerComponentFamily {
        perm_parts,
        alg_parts,
    };
    let mut components = Vec::new();
    for (&k, dk) in &fam.perm_parts {
        components.extend(component_check(l.perm, dk, DerivationKind::TwoSided, format!("perm part k={k}"))?);
    }
    for (&j, dj) in &fam.alg_parts {
        components.extend(component_check(l.alg, dj, DerivationKind::TwoSided, format!("alg part j={j}"))?);
    }
    let (roundtrip, roundtrip_total) = l.roundtrip(op, &assemble_der_unchecked(d, &l, &fam));
    Ok((
        fam,
        DerResidual {
            phi,
            roundtrip,
            roundtrip_total,
            components,
        },
    ))
}

/// Reads the family off the slices `{P⊗1_A}` and `{1⊗1⊗u_k}`, recording
/// which Leibniz rules each `ḋ_k` satisfies on `𝒫`.
pub fn decompose_diderivation(
    d: &Dialgebra,
    op: &LinOp,
) -> Result<(DiderComponentFamily, DiderResidual)> {
    let l = Layout::of(d)?;
    let report = is_diderivation(d, op)?;
    if !report.is_pass() {
        return Err(Error::Precondition {
            what: "operator is not a diderivation".into(),
            report,
        });
    }
    let one = l.window.perm_index(0, 0);
    let perm_parts = l.perm_slices(op)?;
    let mut alg_parts = BTreeMap::new();
    for i1 in 0..=l.window.n1 {
        for i2 in 0..=l.n2() {
            let di = l.slice(op, one, l.window.perm_index(i1, i2));
            if !di.is_zero() {
                alg_parts.insert((i1, i2), di);
            }
        }
    }
    let fam = DiderComponentFamily {
        alg_parts,
        perm_parts,
    };

    let mut components = Vec::new();
    for (&(i1, i2), di) in &fam.alg_parts {
        components.extend(component_check(
            l.alg,
            di,
            DerivationKind::TwoSided,
            format!("alg part ({i1},{i2})"),
        )?);
    }
    let mut sidedness = Vec::new();
    for (&k, dk) in &fam.perm_parts {
        sidedness.push(SidednessOutcome {
            k,
            left: is_algebra_derivation(l.perm, dk, DerivationKind::Left)?.is_pass(),
            right: is_algebra_derivation(l.perm, dk, DerivationKind::Right)?.is_pass(),
        });
    }
    let (roundtrip, roundtrip_total) = l.roundtrip(op, &assemble_dider_unchecked(d, &l, &fam));
    Ok((
        fam,
        DiderResidual {
            roundtrip,
            roundtrip_total,
            components,
            sidedness,
        },
    ))
}

/// Assembles without validating components; for measuring how far an
/// arbitrary family is from the checked contract.
pub fn assemble_derivation_unchecked(d: &Dialgebra, fam: &DerComponentFamily) -> Result<LinOp> {
    let l = Layout::of(d)?;
    Ok(assemble_der_unchecked(d, &l, fam))
}

pub fn assemble_diderivation_unchecked(d: &Dialgebra, fam: &DiderComponentFamily) -> Result<LinOp> {
    let l = Layout::of(d)?;
    Ok(assemble_dider_unchecked(d, &l, fam))
}

const FACTORIZATION: &str = "d(P⊗a) = d(1⊗a)⊢(P⊗1) + (1⊗a)⊢d(P⊗1)";
const DI_FACTORIZATION: &str = "δ(P⊗a) = δ(1⊗a)⊣(P⊗1) + (1⊗a)⊢δ(P⊗1)";

fn factorization_check(d: &Dialgebra, op: &LinOp, first_right: bool, name: &str) -> Result<Report> {
    let l = Layout::of(d)?;
    crate::error::ensure_dim(d.dim(), op.domain_dim())?;
    crate::error::ensure_dim(d.dim(), op.codomain_dim())?;
    let unit = l.unit()?;
    let one = l.window.perm_index(0, 0);
    let first_table = if first_right { &d.right } else { &d.left };
    let n = d.dim();

    let mut found = Vec::new();
    let mut checked = 0;
    for p in 0..l.dp {
        // P⊗1_A and d(P⊗1_A)
        let p_one: SparseVec = unit
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (l.idx(p, k), c.clone()))
            .collect();
        let mut d_p_one = vec![Scalar::zero(); n];
        for (col, c) in &p_one {
            for (r, v) in op.column(*col) {
                d_p_one[r] += c * &v;
            }
        }
        let d_p_one: SparseVec = d_p_one
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        for k in 0..l.da {
            checked += 1;
            let lhs = op.column(l.idx(p, k));
            let one_a = l.idx(one, k);
            let mut rhs = vec![Scalar::zero(); n];
            for (x, c) in op.column(one_a) {
                for (y, w) in &p_one {
                    for (z, t) in first_table.get(x, *y) {
                        rhs[*z] += &c * w * t;
                    }
                }
            }
            for (y, w) in &d_p_one {
                for (z, t) in d.left.get(one_a, *y) {
                    rhs[*z] += w * t;
                }
            }
            let mut diff = rhs;
            for (r, v) in &lhs {
                diff[*r] -= v;
            }
            let discrepancy: Vec<Entry> = diff
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| Entry(i, -c))
                .collect();
            if !discrepancy.is_empty() {
                let idx = l.idx(p, k);
                found.push(Violation {
                    identity: name.to_string(),
                    indices: vec![idx],
                    labels: vec![d.basis[idx].clone()],
                    discrepancy,
                });
            }
        }
    }
    Ok(Report::collect(checked, found, Some(WITNESS_LIMIT)))
}

/// Checks `d(P⊗a) = d(1⊗a)⊢(P⊗1) + (1⊗a)⊢d(P⊗1)` on every basis element
/// `P⊗u_k`. Works for any endomorphism; derivations give an empty report.
pub fn reconstruct_check(d: &Dialgebra, op: &LinOp) -> Result<Report> {
    factorization_check(d, op, false, FACTORIZATION)
}

/// The diderivation analogue, with `⊣` in the first term.
pub fn reconstruct_check_dider(d: &Dialgebra, op: &LinOp) -> Result<Report> {
    factorization_check(d, op, true, DI_FACTORIZATION)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{field, group_algebra_c2, matrix_algebra, truncated_poly};
    use crate::arith::int;
    use crate::dialgebra::{kp_window, window_perm_algebra, DialgebraElement};
    use crate::operators::{
        algebra_inner_derivation, inner_derivation, inner_diderivation, is_left_derivation,
    };
    use crate::solver::{algebra_derivation_space, derivation_space, diderivation_space};

    fn m2_ad_e12() -> LinOp {
        let m2 = matrix_algebra(2).unwrap();
        algebra_inner_derivation(&m2, &m2.basis_vector(1)).unwrap()
    }

    #[test]
    fn empty_families_assemble_to_zero() {
        let d = kp_window(Window::new(1, 1), &truncated_poly(2).unwrap()).unwrap();
        assert!(assemble_derivation(&d, &DerComponentFamily::default()).unwrap().is_zero());
        for s in Sidedness::ALL {
            assert!(assemble_diderivation(&d, &DiderComponentFamily::default(), s)
                .unwrap()
                .is_zero());
        }
    }

    #[test]
    fn single_perm_part_over_q_is_tensor_with_identity() {
        let w = Window::new(2, 2);
        let d = kp_window(w, &field()).unwrap();
        let perm = window_perm_algebra(w);
        for dk in algebra_derivation_space(&perm, DerivationKind::TwoSided).basis_ops() {
            let fam = DerComponentFamily {
                perm_parts: BTreeMap::from([(0, dk.clone())]),
                ..Default::default()
            };
            let op = assemble_derivation(&d, &fam).unwrap();
            // dim A = 1, so d ⊗ id has the same matrix as d.
            assert_eq!(op.row_major(), dk.row_major());
            assert!(is_derivation(&d, &op).unwrap().is_pass());
        }
    }

    #[test]
    fn matrix_alg_part_acts_by_commutator() {
        let w = Window::new(1, 1);
        let d = kp_window(w, &matrix_algebra(2).unwrap()).unwrap();
        let fam = DerComponentFamily {
            alg_parts: BTreeMap::from([(0, m2_ad_e12())]),
            ..Default::default()
        };
        let op = assemble_derivation(&d, &fam).unwrap();
        assert!(is_derivation(&d, &op).unwrap().is_pass());
        // 1⊗1⊗E21 ↦ 1⊗1⊗(E21·E12 − E12·E21) = 1⊗1⊗(E22 − E11)
        let col = op.column(2);
        assert_eq!(col, vec![(0, int(-1)), (3, int(1))]);
    }

    #[test]
    fn ev0_term_kills_positive_slot1_degree() {
        let w = Window::new(1, 1);
        let d = kp_window(w, &matrix_algebra(2).unwrap()).unwrap();
        let fam = DiderComponentFamily {
            alg_parts: BTreeMap::from([((0, 0), m2_ad_e12())]),
            ..Default::default()
        };
        let op = assemble_diderivation(&d, &fam, Sidedness::Left).unwrap();
        assert!(is_diderivation(&d, &op).unwrap().is_pass());
        // x⊗1⊗a has perm index (1,0).
        let p = w.perm_index(1, 0);
        for a in 0..4 {
            assert!(op.column(p * 4 + a).is_empty());
        }
        assert_eq!(op.column(2), vec![(0, int(-1)), (3, int(1))]);
    }

    #[test]
    fn invalid_components_rejected() {
        let w = Window::new(1, 1);
        let alg = truncated_poly(2).unwrap();
        let d = kp_window(w, &alg).unwrap();
        let bad = DerComponentFamily {
            alg_parts: BTreeMap::from([(0, LinOp::identity(&alg.name, 2))]),
            ..Default::default()
        };
        assert!(matches!(assemble_derivation(&d, &bad), Err(Error::Precondition { .. })));
        let zero = LinOp::endo_zero(&alg.name, 2);
        let beyond = DerComponentFamily {
            alg_parts: BTreeMap::from([(2, zero.clone())]),
            ..Default::default()
        };
        assert!(matches!(assemble_derivation(&d, &beyond), Err(Error::Contract(_))));
        let perm = window_perm_algebra(w);
        let bad_perm = DiderComponentFamily {
            perm_parts: BTreeMap::from([(0, LinOp::identity(&perm.name, perm.dim()))]),
            ..Default::default()
        };
        assert!(assemble_diderivation(&d, &bad_perm, Sidedness::Left).is_err());
    }

    #[test]
    fn zero_operator_gives_empty_family() {
        let d = kp_window(Window::new(1, 1), &matrix_algebra(2).unwrap()).unwrap();
        let zero = LinOp::endo_zero(&d.name, d.dim());
        let (fam, res) = decompose_derivation(&d, &zero).unwrap();
        assert!(fam.is_empty());
        assert!(res.is_clean() && res.phi.is_empty());
        let (fam, res) = decompose_diderivation(&d, &zero).unwrap();
        assert!(fam.is_empty() && res.is_clean());
        assert!(reconstruct_check(&d, &zero).unwrap().is_pass());
    }

    #[test]
    fn non_derivations_refused() {
        let d = kp_window(Window::new(1, 1), &field()).unwrap();
        let id = LinOp::identity(&d.name, d.dim());
        assert!(matches!(decompose_derivation(&d, &id), Err(Error::Precondition { .. })));
        assert!(matches!(decompose_diderivation(&d, &id), Err(Error::Precondition { .. })));
    }

    #[test]
    fn identity_fails_factorization() {
        let d = kp_window(Window::new(1, 1), &matrix_algebra(2).unwrap()).unwrap();
        let id = LinOp::identity(&d.name, d.dim());
        let r = reconstruct_check(&d, &id).unwrap();
        // Both sides expand to P⊗a on the right, so lhs − rhs = −P⊗a everywhere.
        assert_eq!(r.total_violations, d.dim());
        assert_eq!(r.violations[0].discrepancy, vec![Entry(0, int(-1))]);
    }

    #[test]
    fn inner_operators_roundtrip() {
        for alg in [matrix_algebra(2).unwrap(), truncated_poly(3).unwrap()] {
            let d = kp_window(Window::new(1, 1), &alg).unwrap();
            for i in 0..d.dim() {
                let a = DialgebraElement::basis(d.dim(), i);
                let ad = inner_derivation(&d, &a).unwrap();
                let (_, res) = decompose_derivation(&d, &ad).unwrap();
                assert!(res.is_clean(), "{res:?}");
                assert!(res.phi_determined());
                assert!(reconstruct_check(&d, &ad).unwrap().is_pass());

                let big = inner_diderivation(&d, &a).unwrap();
                let (_, res) = decompose_diderivation(&d, &big).unwrap();
                assert!(res.is_clean(), "{res:?}");
                assert!(reconstruct_check_dider(&d, &big).unwrap().is_pass());
            }
        }
    }

    #[test]
    fn solver_bases_roundtrip_and_dot_parts_are_left() {
        for alg in [field(), truncated_poly(3).unwrap(), group_algebra_c2()] {
            let d = kp_window(Window::new(2, 1), &alg).unwrap();
            for op in derivation_space(&d).basis_ops() {
                let (_, res) = decompose_derivation(&d, &op).unwrap();
                assert!(res.is_clean());
                assert!(res.phi_determined());
            }
            for op in diderivation_space(&d).basis_ops() {
                let (fam, res) = decompose_diderivation(&d, &op).unwrap();
                assert!(res.is_clean());
                assert!(res.all_left());
                let perm = window_perm_algebra(Window::new(2, 1));
                for dk in fam.perm_parts.values() {
                    assert!(is_left_derivation(&perm, dk).unwrap().is_pass());
                }
            }
        }
    }
}
