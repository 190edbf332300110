//! Exact linear operators, multiplication operators, inner (di)derivations,
//! and the Leibniz-identity checkers.
//!
//! The checkers only look at basis pairs. Both sides of every identity are
//! bilinear in `(x, y)` once the operator is fixed, so agreement on a basis
//! pair set is agreement everywhere.

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::algebra::{add_scaled, Coords, FiniteAlgebra, SparseVec, StructureTensor};
use crate::arith::Scalar;
use crate::dialgebra::{Dialgebra, DialgebraElement, Product};
use crate::error::{ensure_dim, Error, Result};
use crate::report::{Entry, Report, Violation, WITNESS_LIMIT};

/// Dense matrix of a linear map; column `c` is the image of basis vector `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinOp {
    pub domain_tag: String,
    pub codomain_tag: String,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl LinOp {
    pub fn zeros(
        domain_tag: impl Into<String>,
        domain_dim: usize,
        codomain_tag: impl Into<String>,
        codomain_dim: usize,
    ) -> Self {
        LinOp {
            domain_tag: domain_tag.into(),
            codomain_tag: codomain_tag.into(),
            rows: codomain_dim,
            cols: domain_dim,
            data: vec![Scalar::zero(); codomain_dim * domain_dim],
        }
    }

    pub fn endo_zero(tag: impl Into<String>, dim: usize) -> Self {
        let tag = tag.into();
        LinOp::zeros(tag.clone(), dim, tag, dim)
    }

    pub fn identity(tag: impl Into<String>, dim: usize) -> Self {
        let mut op = LinOp::endo_zero(tag, dim);
        for i in 0..dim {
            op.set(i, i, Scalar::one());
        }
        op
    }

    /// Builds an endomorphism from the images of the basis vectors.
    pub fn from_columns(tag: impl Into<String>, columns: &[Coords]) -> Result<Self> {
        let n = columns.len();
        let mut op = LinOp::endo_zero(tag, n);
        for (c, col) in columns.iter().enumerate() {
            ensure_dim(n, col.len())?;
            for (r, v) in col.iter().enumerate() {
                op.set(r, c, v.clone());
            }
        }
        Ok(op)
    }

    /// Row-major entries `(r, c) -> r * domain_dim + c`.
    pub fn from_row_major(
        domain_tag: impl Into<String>,
        domain_dim: usize,
        codomain_tag: impl Into<String>,
        codomain_dim: usize,
        data: Vec<Scalar>,
    ) -> Result<Self> {
        ensure_dim(domain_dim * codomain_dim, data.len())?;
        Ok(LinOp {
            domain_tag: domain_tag.into(),
            codomain_tag: codomain_tag.into(),
            rows: codomain_dim,
            cols: domain_dim,
            data,
        })
    }

    pub fn domain_dim(&self) -> usize {
        self.cols
    }

    pub fn codomain_dim(&self) -> usize {
        self.rows
    }

    pub fn is_endo(&self) -> bool {
        self.rows == self.cols && self.domain_tag == self.codomain_tag
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub(crate) fn add_at(&mut self, r: usize, c: usize, v: &Scalar) {
        self.data[r * self.cols + c] += v;
    }

    pub fn row_major(&self) -> &[Scalar] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn column(&self, c: usize) -> SparseVec {
        (0..self.rows)
            .filter_map(|r| {
                let v = self.get(r, c);
                (!v.is_zero()).then(|| (r, v.clone()))
            })
            .collect()
    }

    pub fn columns(&self) -> Vec<SparseVec> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn apply(&self, v: &[Scalar]) -> Result<Coords> {
        ensure_dim(self.cols, v.len())?;
        let mut out = vec![Scalar::zero(); self.rows];
        for (c, x) in v.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (r, slot) in out.iter_mut().enumerate() {
                let m = self.get(r, c);
                if !m.is_zero() {
                    *slot += m * x;
                }
            }
        }
        Ok(out)
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &LinOp) -> Result<LinOp> {
        if self.domain_tag != rhs.codomain_tag {
            return Err(Error::Tag {
                left: self.domain_tag.clone(),
                right: rhs.codomain_tag.clone(),
            });
        }
        ensure_dim(self.cols, rhs.rows)?;
        let mut out = LinOp::zeros(
            rhs.domain_tag.clone(),
            rhs.cols,
            self.codomain_tag.clone(),
            self.rows,
        );
        for k in 0..self.cols {
            for c in 0..rhs.cols {
                let b = rhs.get(k, c);
                if b.is_zero() {
                    continue;
                }
                for r in 0..self.rows {
                    let a = self.get(r, k);
                    if !a.is_zero() {
                        out.add_at(r, c, &(a * b));
                    }
                }
            }
        }
        Ok(out)
    }

    fn check_same_space(&self, other: &LinOp) -> Result<()> {
        if self.domain_tag != other.domain_tag || self.codomain_tag != other.codomain_tag {
            return Err(Error::Tag {
                left: format!("{} -> {}", self.domain_tag, self.codomain_tag),
                right: format!("{} -> {}", other.domain_tag, other.codomain_tag),
            });
        }
        ensure_dim(self.rows, other.rows)?;
        ensure_dim(self.cols, other.cols)
    }

    pub fn add(&self, other: &LinOp) -> Result<LinOp> {
        self.check_same_space(other)?;
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &LinOp) -> Result<LinOp> {
        self.check_same_space(other)?;
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> LinOp {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn retag(mut self, tag: impl Into<String>) -> LinOp {
        let tag = tag.into();
        self.domain_tag = tag.clone();
        self.codomain_tag = tag;
        self
    }
}

/// `[f, g] = f∘g − g∘f`.
pub fn bracket(f: &LinOp, g: &LinOp) -> Result<LinOp> {
    if !f.is_endo() || !g.is_endo() {
        return Err(Error::contract("bracket needs endomorphisms"));
    }
    f.compose(g)?.sub(&g.compose(f)?)
}

fn sparse(v: &[Scalar]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.clone()))
        .collect()
}

fn mult_op(tag: &str, table: &StructureTensor, a: &[Scalar], a_on_left: bool) -> Result<LinOp> {
    ensure_dim(table.dim(), a.len())?;
    let a = sparse(a);
    let n = table.dim();
    let mut op = LinOp::endo_zero(tag, n);
    for b in 0..n {
        let image = if a_on_left {
            table.sparse_times_basis(&a, b)
        } else {
            table.basis_times_sparse(b, &a)
        };
        for (r, v) in image {
            op.set(r, b, v);
        }
    }
    Ok(op)
}

/// `L_a(b) = a ∘ b` for the chosen product.
pub fn mult_left(d: &Dialgebra, which: Product, a: &DialgebraElement) -> Result<LinOp> {
    d.check_element(a)?;
    mult_op(&d.name, d.product(which), &a.coords, true)
}

/// `R_a(b) = b ∘ a` for the chosen product.
pub fn mult_right(d: &Dialgebra, which: Product, a: &DialgebraElement) -> Result<LinOp> {
    d.check_element(a)?;
    mult_op(&d.name, d.product(which), &a.coords, false)
}

/// `ad_a = R_a^⊣ − L_a^⊢`, i.e. `b ↦ b⊣a − a⊢b`.
pub fn inner_derivation(d: &Dialgebra, a: &DialgebraElement) -> Result<LinOp> {
    mult_right(d, Product::Right, a)?.sub(&mult_left(d, Product::Left, a)?)
}

/// `Ad_a = R_a^⊢ − L_a^⊣`, i.e. `b ↦ b⊢a − a⊣b`.
pub fn inner_diderivation(d: &Dialgebra, a: &DialgebraElement) -> Result<LinOp> {
    mult_right(d, Product::Left, a)?.sub(&mult_left(d, Product::Right, a)?)
}

pub fn algebra_mult_left(alg: &FiniteAlgebra, a: &[Scalar]) -> Result<LinOp> {
    mult_op(&alg.name, &alg.structure, a, true)
}

pub fn algebra_mult_right(alg: &FiniteAlgebra, a: &[Scalar]) -> Result<LinOp> {
    mult_op(&alg.name, &alg.structure, a, false)
}

/// `b ↦ ba − ab`, the same sign convention as `ad_a` on dialgebras.
pub fn algebra_inner_derivation(alg: &FiniteAlgebra, a: &[Scalar]) -> Result<LinOp> {
    algebra_mult_right(alg, a)?.sub(&algebra_mult_left(alg, a)?)
}

/// Which Leibniz rule an algebra operator is tested against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivationKind {
    /// `d(xy) = d(x)y + x d(y)`
    TwoSided,
    /// `d(xy) = x d(y) + y d(x)`
    Left,
    /// `d(xy) = d(x)y + d(y)x`
    Right,
}

/// One bilinear term of a Leibniz-type identity at the basis pair `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Term {
    /// `d(x ∘ y)`
    Image,
    /// `d(x) ∘ y`
    OpFirst,
    /// `x ∘ d(y)`
    OpSecond,
    /// `d(y) ∘ x`
    OpFirstSwapped,
    /// `y ∘ d(x)`
    OpSecondSwapped,
}

/// `Σ sign · term(product) = 0`, with products indexed into a table list.
#[derive(Clone, Debug)]
pub(crate) struct LeibnizIdentity {
    pub name: &'static str,
    pub terms: Vec<(i8, Term, usize)>,
}

/// Table 0 is `⊢`, table 1 is `⊣`.
pub(crate) fn derivation_identities() -> Vec<LeibnizIdentity> {
    vec![
        LeibnizIdentity {
            name: "d(x⊢y) = d(x)⊢y + x⊢d(y)",
            terms: vec![(1, Term::Image, 0), (-1, Term::OpFirst, 0), (-1, Term::OpSecond, 0)],
        },
        LeibnizIdentity {
            name: "d(x⊣y) = d(x)⊣y + x⊣d(y)",
            terms: vec![(1, Term::Image, 1), (-1, Term::OpFirst, 1), (-1, Term::OpSecond, 1)],
        },
    ]
}

pub(crate) fn diderivation_identities() -> Vec<LeibnizIdentity> {
    vec![
        LeibnizIdentity {
            name: "δ(x⊢y) = δ(x⊣y)",
            terms: vec![(1, Term::Image, 0), (-1, Term::Image, 1)],
        },
        LeibnizIdentity {
            name: "δ(x⊢y) = δ(x)⊣y + x⊢δ(y)",
            terms: vec![(1, Term::Image, 0), (-1, Term::OpFirst, 1), (-1, Term::OpSecond, 0)],
        },
    ]
}

pub(crate) fn algebra_identities(kind: DerivationKind) -> Vec<LeibnizIdentity> {
    let (name, terms) = match kind {
        DerivationKind::TwoSided => (
            "d(xy) = d(x)y + xd(y)",
            vec![(1, Term::Image, 0), (-1, Term::OpFirst, 0), (-1, Term::OpSecond, 0)],
        ),
        DerivationKind::Left => (
            "d(xy) = xd(y) + yd(x)",
            vec![(1, Term::Image, 0), (-1, Term::OpSecond, 0), (-1, Term::OpSecondSwapped, 0)],
        ),
        DerivationKind::Right => (
            "d(xy) = d(x)y + d(y)x",
            vec![(1, Term::Image, 0), (-1, Term::OpFirst, 0), (-1, Term::OpFirstSwapped, 0)],
        ),
    };
    vec![LeibnizIdentity { name, terms }]
}

/// Evaluates `term` at `(e_i, e_j)` for the operator with sparse columns
/// `cols`, accumulating `sign · value` into `acc`.
fn eval_term(
    acc: &mut [Scalar],
    sign: &Scalar,
    term: Term,
    table: &StructureTensor,
    cols: &[SparseVec],
    i: usize,
    j: usize,
) {
    match term {
        Term::Image => {
            for (k, c) in table.get(i, j) {
                add_scaled(acc, &(sign * c), &cols[k.to_owned()]);
            }
        }
        Term::OpFirst => {
            for (m, v) in &cols[i] {
                add_scaled(acc, &(sign * v), table.get(*m, j));
            }
        }
        Term::OpSecond => {
            for (m, v) in &cols[j] {
                add_scaled(acc, &(sign * v), table.get(i, *m));
            }
        }
        Term::OpFirstSwapped => eval_term(acc, sign, Term::OpFirst, table, cols, j, i),
        Term::OpSecondSwapped => eval_term(acc, sign, Term::OpSecond, table, cols, j, i),
    }
}

pub(crate) fn check_identities(
    labels: &[String],
    tables: &[&StructureTensor],
    identities: &[LeibnizIdentity],
    op: &LinOp,
) -> Result<Report> {
    let n = labels.len();
    ensure_dim(n, op.domain_dim())?;
    ensure_dim(n, op.codomain_dim())?;
    let cols = op.columns();
    let signs: Vec<Vec<Scalar>> = identities
        .iter()
        .map(|id| id.terms.iter().map(|(s, _, _)| Scalar::from_integer((*s).into())).collect())
        .collect();
    let found: Vec<Violation> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut out = Vec::new();
            for j in 0..n {
                for (id, id_signs) in identities.iter().zip(&signs) {
                    let mut acc = vec![Scalar::zero(); n];
                    for ((_, term, t), sign) in id.terms.iter().zip(id_signs) {
                        eval_term(&mut acc, sign, *term, tables[*t], &cols, i, j);
                    }
                    let disc: Vec<Entry> = acc
                        .into_iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(k, c)| Entry(k, c))
                        .collect();
                    if !disc.is_empty() {
                        out.push(Violation {
                            identity: id.name.to_string(),
                            indices: vec![i, j],
                            labels: vec![labels[i].clone(), labels[j].clone()],
                            discrepancy: disc,
                        });
                    }
                }
            }
            out
        })
        .collect();
    Ok(Report::collect(n * n * identities.len(), found, Some(WITNESS_LIMIT)))
}

fn check_endo_tag(tag: &str, op: &LinOp) -> Result<()> {
    for t in [&op.domain_tag, &op.codomain_tag] {
        if t != tag {
            return Err(Error::Tag {
                left: tag.to_string(),
                right: t.clone(),
            });
        }
    }
    Ok(())
}

/// Both Leibniz rules on every basis pair.
pub fn is_derivation(d: &Dialgebra, op: &LinOp) -> Result<Report> {
    check_endo_tag(&d.name, op)?;
    check_identities(&d.basis, &[&d.left, &d.right], &derivation_identities(), op)
}

/// `δ(x⊢y) = δ(x⊣y)` and `δ(x⊢y) = δ(x)⊣y + x⊢δ(y)` on every basis pair.
pub fn is_diderivation(d: &Dialgebra, op: &LinOp) -> Result<Report> {
    check_endo_tag(&d.name, op)?;
    check_identities(&d.basis, &[&d.left, &d.right], &diderivation_identities(), op)
}

pub fn is_algebra_derivation(alg: &FiniteAlgebra, op: &LinOp, kind: DerivationKind) -> Result<Report> {
    check_endo_tag(&alg.name, op)?;
    check_identities(&alg.basis, &[&alg.structure], &algebra_identities(kind), op)
}

pub fn is_left_derivation(alg: &FiniteAlgebra, op: &LinOp) -> Result<Report> {
    is_algebra_derivation(alg, op, DerivationKind::Left)
}

pub fn is_right_derivation(alg: &FiniteAlgebra, op: &LinOp) -> Result<Report> {
    is_algebra_derivation(alg, op, DerivationKind::Right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{field, matrix_algebra, perm_quotient, truncated_poly, group_algebra_c2};
    use crate::arith::int;
    use crate::dialgebra::{kp_window, window_left_unit, Window};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_element(rng: &mut ChaCha8Rng, n: usize) -> DialgebraElement {
        DialgebraElement::new((0..n).map(|_| int(rng.gen_range(-3..=3))).collect())
    }

    fn m2_flat() -> Dialgebra {
        Dialgebra::from_associative(&matrix_algebra(2).unwrap())
    }

    #[test]
    fn compose_and_tags() {
        let a = LinOp::identity("A", 2);
        let b = LinOp::identity("B", 2);
        assert!(matches!(a.compose(&b), Err(Error::Tag { .. })));
        assert!(matches!(a.sub(&b), Err(Error::Tag { .. })));
        let mut f = LinOp::endo_zero("A", 2);
        f.set(0, 1, int(1));
        assert!(f.compose(&f).unwrap().is_zero());
        assert_eq!(a.compose(&f).unwrap(), f);
        assert!(bracket(&f, &f).unwrap().is_zero());
    }

    #[test]
    fn mult_left_examples() {
        let d = kp_window(Window::new(1, 1), &matrix_algebra(2).unwrap()).unwrap();
        let unit = window_left_unit(&d).unwrap();
        assert_eq!(mult_left(&d, Product::Left, &unit).unwrap(), LinOp::identity(&d.name, d.dim()));
        let zero = DialgebraElement::zero(d.dim());
        assert!(mult_left(&d, Product::Left, &zero).unwrap().is_zero());
        assert!(mult_right(&d, Product::Right, &zero).unwrap().is_zero());

        let d0 = kp_window(Window::single(1), &field()).unwrap();
        let x = DialgebraElement::basis(2, 1);
        assert!(mult_left(&d0, Product::Left, &x).unwrap().is_zero());
        assert!(matches!(
            mult_left(&d0, Product::Left, &DialgebraElement::zero(3)),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn mult_right_examples() {
        let d = kp_window(Window::new(1, 1), &matrix_algebra(2).unwrap()).unwrap();
        let unit = window_left_unit(&d).unwrap();
        // b ⊣ (1⊗1⊗I) = b for every basis b.
        let r = mult_right(&d, Product::Right, &unit).unwrap();
        for b in 0..d.dim() {
            let got = d
                .mul(Product::Right, &DialgebraElement::basis(d.dim(), b), &unit)
                .unwrap();
            assert_eq!(got, DialgebraElement::basis(d.dim(), b));
        }
        assert_eq!(r, LinOp::identity(&d.name, d.dim()));

        let d0 = kp_window(Window::single(1), &field()).unwrap();
        let one = DialgebraElement::basis(2, 0);
        let got = mult_right(&d0, Product::Right, &one).unwrap().apply(&[int(0), int(1)]).unwrap();
        assert_eq!(got, vec![int(0), int(1)]);
    }

    #[test]
    fn inner_ad_matrix_commutator() {
        let d = m2_flat();
        let a = DialgebraElement::basis(4, 1); // E12
        let ad = inner_derivation(&d, &a).unwrap();
        // E21 E12 - E12 E21 = E22 - E11
        let got = ad.apply(&DialgebraElement::basis(4, 2).coords).unwrap();
        assert_eq!(got, vec![int(-1), int(0), int(0), int(1)]);
        assert!(inner_derivation(&d, &DialgebraElement::zero(4)).unwrap().is_zero());
        assert_eq!(inner_diderivation(&d, &a).unwrap(), ad);
    }

    #[test]
    fn inner_operators_are_derivations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for alg in [field(), truncated_poly(3).unwrap(), matrix_algebra(2).unwrap()] {
            let d = kp_window(Window::new(1, 1), &alg).unwrap();
            for _ in 0..20 {
                let a = random_element(&mut rng, d.dim());
                assert!(is_derivation(&d, &inner_derivation(&d, &a).unwrap()).unwrap().is_pass());
                assert!(is_diderivation(&d, &inner_diderivation(&d, &a).unwrap()).unwrap().is_pass());
            }
        }
    }

    #[test]
    fn trivial_checker_cases() {
        let d = kp_window(Window::new(1, 1), &truncated_poly(3).unwrap()).unwrap();
        let zero = LinOp::endo_zero(&d.name, d.dim());
        assert!(is_derivation(&d, &zero).unwrap().is_pass());
        assert!(is_diderivation(&d, &zero).unwrap().is_pass());
        let id = LinOp::identity(&d.name, d.dim());
        let r = is_derivation(&d, &id).unwrap();
        assert!(!r.is_pass());
        assert!(r.violations.len() <= WITNESS_LIMIT);
        assert!(r.total_violations >= r.violations.len());
        // Witnesses come sorted by pair.
        let pairs: Vec<_> = r.violations.iter().map(|v| v.indices.clone()).collect();
        let mut sorted = pairs.clone();
        sorted.sort();
        assert_eq!(pairs, sorted);

        let wrong = LinOp::endo_zero("other", d.dim());
        assert!(matches!(is_derivation(&d, &wrong), Err(Error::Tag { .. })));
    }

    #[test]
    fn coincidence_on_equal_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for alg in [matrix_algebra(2).unwrap(), truncated_poly(3).unwrap(), group_algebra_c2()] {
            let d = Dialgebra::from_associative(&alg);
            let n = d.dim();
            for trial in 0..30 {
                let op = if trial % 3 == 0 {
                    inner_derivation(&d, &random_element(&mut rng, n)).unwrap()
                } else {
                    // sparse random operators, occasionally derivations
                    let mut op = LinOp::endo_zero(&d.name, n);
                    for _ in 0..rng.gen_range(0..3) {
                        op.set(rng.gen_range(0..n), rng.gen_range(0..n), int(rng.gen_range(-2..=2)));
                    }
                    op
                };
                assert_eq!(
                    is_derivation(&d, &op).unwrap().is_pass(),
                    is_diderivation(&d, &op).unwrap().is_pass()
                );
            }
        }
    }

    #[test]
    fn left_right_derivations_on_perm_quotient() {
        let p = perm_quotient(1);
        let zero = LinOp::endo_zero(&p.name, 2);
        assert!(is_left_derivation(&p, &zero).unwrap().is_pass());
        assert!(is_right_derivation(&p, &zero).unwrap().is_pass());
        // d(1) = x, d(x) = 0. Hand expansion on (1, 1):
        //   left:  d(1∘1) = x  vs  1∘d(1) + 1∘d(1) = 2x
        //   right: d(1∘1) = x  vs  d(1)∘1 + d(1)∘1 = 0
        // and it is a two-sided derivation (all four pairs balance).
        let mut d = LinOp::endo_zero(&p.name, 2);
        d.set(1, 0, int(1));
        assert!(!is_left_derivation(&p, &d).unwrap().is_pass());
        assert!(!is_right_derivation(&p, &d).unwrap().is_pass());
        assert!(is_algebra_derivation(&p, &d, DerivationKind::TwoSided).unwrap().is_pass());
    }

    #[test]
    fn left_right_agree_on_commutative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let alg = truncated_poly(3).unwrap();
        for _ in 0..40 {
            let mut op = LinOp::endo_zero(&alg.name, 3);
            for _ in 0..rng.gen_range(0..4) {
                op.set(rng.gen_range(0..3), rng.gen_range(0..3), int(rng.gen_range(-2..=2)));
            }
            assert_eq!(
                is_left_derivation(&alg, &op).unwrap().is_pass(),
                is_right_derivation(&alg, &op).unwrap().is_pass()
            );
        }
    }

    #[test]
    fn brackets_of_inner_derivations() {
        let d = kp_window(Window::new(1, 1), &matrix_algebra(2).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let a = inner_derivation(&d, &random_element(&mut rng, d.dim())).unwrap();
            let b = inner_derivation(&d, &random_element(&mut rng, d.dim())).unwrap();
            let c = inner_diderivation(&d, &random_element(&mut rng, d.dim())).unwrap();
            assert!(is_derivation(&d, &bracket(&a, &b).unwrap()).unwrap().is_pass());
            assert!(is_diderivation(&d, &bracket(&a, &c).unwrap()).unwrap().is_pass());
        }
    }

    #[test]
    fn algebra_inner_derivation_sign() {
        let m2 = matrix_algebra(2).unwrap();
        let ad = algebra_inner_derivation(&m2, &m2.basis_vector(1)).unwrap();
        assert_eq!(ad.apply(&m2.basis_vector(2)).unwrap(), vec![int(-1), int(0), int(0), int(1)]);
        assert!(is_algebra_derivation(&m2, &ad, DerivationKind::TwoSided).unwrap().is_pass());
    }
}
