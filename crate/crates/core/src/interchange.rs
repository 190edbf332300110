//! JSON documents for algebras, dialgebras, operators, subspaces and
//! component families. Scalars are written as `"p/q"` (or `"p"`) strings.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::algebra::{FiniteAlgebra, Flavor, StructureTensor};
use crate::arith::{format_scalar, parse_scalar, Scalar};
use crate::decomposition::{
    ComponentViolation, DerComponentFamily, DerResidual, DiderComponentFamily, DiderResidual,
    MatrixDiscrepancy, Sidedness, SidednessOutcome,
};
use crate::dialgebra::{kp_window, Dialgebra, Provenance, Window};
use crate::error::{Error, Result};
use crate::operators::LinOp;
use crate::solver::SubspaceBasis;

pub type StructureEntry = (usize, usize, usize, String);

fn scalars_out(v: &[Scalar]) -> Vec<String> {
    v.iter().map(format_scalar).collect()
}

fn scalars_in(v: &[String]) -> Result<Vec<Scalar>> {
    v.iter().map(|s| parse_scalar(s)).collect()
}

fn tensor_out(t: &StructureTensor) -> Vec<StructureEntry> {
    t.entries()
        .map(|(i, j, k, c)| (i, j, k, format_scalar(c)))
        .collect()
}

fn tensor_in(dim: usize, entries: &[StructureEntry]) -> Result<StructureTensor> {
    let mut t = StructureTensor::zero(dim);
    for (i, j, k, c) in entries {
        if *i >= dim || *j >= dim || *k >= dim {
            return Err(Error::Parse(format!(
                "structure entry [{i}, {j}, {k}] out of range for dimension {dim}"
            )));
        }
        t.add_entry(*i, *j, *k, parse_scalar(c)?)?;
    }
    Ok(t)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraDoc {
    pub name: String,
    pub flavor: Flavor,
    pub dim: usize,
    pub basis: Vec<String>,
    pub unit: Option<Vec<String>>,
    /// `[i, j, k, c]`: the coefficient of `e_k` in `e_i e_j`.
    pub structure: Vec<StructureEntry>,
}

impl AlgebraDoc {
    pub fn from_algebra(alg: &FiniteAlgebra) -> Self {
        AlgebraDoc {
            name: alg.name.clone(),
            flavor: alg.flavor,
            dim: alg.dim(),
            basis: alg.basis.clone(),
            unit: alg.unit.as_deref().map(scalars_out),
            structure: tensor_out(&alg.structure),
        }
    }

    pub fn to_algebra(&self) -> Result<FiniteAlgebra> {
        if self.basis.len() != self.dim {
            return Err(Error::Parse(format!(
                "basis has {} labels, dim is {}",
                self.basis.len(),
                self.dim
            )));
        }
        let unit = self.unit.as_deref().map(scalars_in).transpose()?;
        FiniteAlgebra::new(
            &self.name,
            self.flavor,
            self.basis.clone(),
            tensor_in(self.dim, &self.structure)?,
            unit,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KpDoc {
    pub window: Window,
    pub algebra: AlgebraDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DialgebraDoc {
    pub name: String,
    pub dim: usize,
    pub basis: Vec<String>,
    /// Entries of `⊢`.
    pub left_prod: Vec<StructureEntry>,
    /// Entries of `⊣`.
    pub right_prod: Vec<StructureEntry>,
    pub provenance: Option<Provenance>,
    /// Present for windowed tensor-product dialgebras; lets the factors be
    /// rebuilt on load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kp: Option<KpDoc>,
}

impl DialgebraDoc {
    pub fn from_dialgebra(d: &Dialgebra) -> Self {
        let kp = d.factors.as_ref().and_then(|f| {
            f.window.map(|window| KpDoc {
                window,
                algebra: AlgebraDoc::from_algebra(&f.algebra),
            })
        });
        DialgebraDoc {
            name: d.name.clone(),
            dim: d.dim(),
            basis: d.basis.clone(),
            left_prod: tensor_out(&d.left),
            right_prod: tensor_out(&d.right),
            provenance: d.provenance.clone(),
            kp,
        }
    }

    pub fn to_dialgebra(&self) -> Result<Dialgebra> {
        if self.basis.len() != self.dim {
            return Err(Error::Parse(format!(
                "basis has {} labels, dim is {}",
                self.basis.len(),
                self.dim
            )));
        }
        let left = tensor_in(self.dim, &self.left_prod)?;
        let right = tensor_in(self.dim, &self.right_prod)?;
        match &self.kp {
            Some(kp) => {
                let d = kp_window(kp.window, &kp.algebra.to_algebra()?)?;
                if d.left != left || d.right != right || d.dim() != self.dim {
                    return Err(Error::Parse(
                        "products disagree with the declared tensor-product construction".into(),
                    ));
                }
                Ok(d)
            }
            None => {
                let mut d = Dialgebra::new(&self.name, self.basis.clone(), left, right)?;
                d.provenance = self.provenance.clone();
                Ok(d)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorDoc {
    pub domain_tag: String,
    pub codomain_tag: String,
    pub domain_dim: usize,
    pub codomain_dim: usize,
    /// Row-major; column `c` is the image of `e_c`.
    pub matrix: Vec<String>,
}

impl OperatorDoc {
    pub fn from_op(op: &LinOp) -> Self {
        OperatorDoc {
            domain_tag: op.domain_tag.clone(),
            codomain_tag: op.codomain_tag.clone(),
            domain_dim: op.domain_dim(),
            codomain_dim: op.codomain_dim(),
            matrix: scalars_out(op.row_major()),
        }
    }

    pub fn to_op(&self) -> Result<LinOp> {
        if self.matrix.len() != self.domain_dim * self.codomain_dim {
            return Err(Error::Parse(format!(
                "matrix has {} entries, expected {}×{}",
                self.matrix.len(),
                self.codomain_dim,
                self.domain_dim
            )));
        }
        LinOp::from_row_major(
            self.domain_tag.clone(),
            self.domain_dim,
            self.codomain_tag.clone(),
            self.codomain_dim,
            scalars_in(&self.matrix)?,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceDoc {
    pub tag: String,
    pub space_dim: usize,
    pub dimension: usize,
    pub basis: Vec<OperatorDoc>,
}

impl SubspaceDoc {
    pub fn from_basis(b: &SubspaceBasis) -> Self {
        SubspaceDoc {
            tag: b.tag.clone(),
            space_dim: b.space_dim,
            dimension: b.dimension(),
            basis: b.basis_ops().iter().map(OperatorDoc::from_op).collect(),
        }
    }

    pub fn to_basis(&self) -> Result<SubspaceBasis> {
        let ops = self.basis.iter().map(OperatorDoc::to_op).collect::<Result<Vec<_>>>()?;
        let b = SubspaceBasis::span(&self.tag, self.space_dim, &ops)?;
        if b.dimension() != self.dimension {
            return Err(Error::Parse(format!(
                "declared dimension {} but the basis spans {}",
                self.dimension,
                b.dimension()
            )));
        }
        Ok(b)
    }
}

fn parse_key(key: &str, parts: usize) -> Result<Vec<usize>> {
    let fields: Vec<&str> = key.split(',').map(str::trim).collect();
    if fields.len() != parts {
        return Err(Error::Parse(format!("bad component key `{key}`")));
    }
    fields
        .iter()
        .map(|f| f.parse().map_err(|_| Error::Parse(format!("bad component key `{key}`"))))
        .collect()
}

fn ops_out<K, F: Fn(&K) -> String>(m: &BTreeMap<K, LinOp>, key: F) -> BTreeMap<String, OperatorDoc> {
    m.iter().map(|(k, op)| (key(k), OperatorDoc::from_op(op))).collect()
}

/// Component family document. Perm parts are keyed by `"k"`, derivation
/// alg parts by `"j"`, diderivation alg parts by `"i1,i2"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyDoc {
    Derivation {
        perm_parts: BTreeMap<String, OperatorDoc>,
        alg_parts: BTreeMap<String, OperatorDoc>,
    },
    Diderivation {
        sidedness: Sidedness,
        alg_parts: BTreeMap<String, OperatorDoc>,
        perm_parts: BTreeMap<String, OperatorDoc>,
    },
}

impl FamilyDoc {
    pub fn from_der(fam: &DerComponentFamily) -> Self {
        FamilyDoc::Derivation {
            perm_parts: ops_out(&fam.perm_parts, |k| k.to_string()),
            alg_parts: ops_out(&fam.alg_parts, |j| j.to_string()),
        }
    }

    pub fn from_dider(fam: &DiderComponentFamily, sidedness: Sidedness) -> Self {
        FamilyDoc::Diderivation {
            sidedness,
            alg_parts: ops_out(&fam.alg_parts, |(a, b)| format!("{a},{b}")),
            perm_parts: ops_out(&fam.perm_parts, |k| k.to_string()),
        }
    }
}

pub enum Family {
    Der(DerComponentFamily),
    Dider(DiderComponentFamily, Sidedness),
}

impl FamilyDoc {
    pub fn to_family(&self) -> Result<Family> {
        fn single(m: &BTreeMap<String, OperatorDoc>) -> Result<BTreeMap<usize, LinOp>> {
            m.iter()
                .map(|(k, doc)| Ok((parse_key(k, 1)?[0], doc.to_op()?)))
                .collect()
        }
        match self {
            FamilyDoc::Derivation {
                perm_parts,
                alg_parts,
            } => Ok(Family::Der(DerComponentFamily {
                perm_parts: single(perm_parts)?,
                alg_parts: single(alg_parts)?,
            })),
            FamilyDoc::Diderivation {
                sidedness,
                alg_parts,
                perm_parts,
            } => {
                let alg = alg_parts
                    .iter()
                    .map(|(k, doc)| {
                        let ij = parse_key(k, 2)?;
                        Ok(((ij[0], ij[1]), doc.to_op()?))
                    })
                    .collect::<Result<_>>()?;
                Ok(Family::Dider(
                    DiderComponentFamily {
                        alg_parts: alg,
                        perm_parts: single(perm_parts)?,
                    },
                    *sidedness,
                ))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiDoc {
    pub j1: usize,
    pub j2: usize,
    pub operator: OperatorDoc,
    pub right_mult_by_unit_image: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerResidualDoc {
    pub clean: bool,
    pub phi_determined: bool,
    pub phi: Vec<PhiDoc>,
    pub roundtrip_total: usize,
    pub roundtrip: Vec<MatrixDiscrepancy>,
    pub components: Vec<ComponentViolation>,
}

impl DerResidualDoc {
    pub fn from_residual(r: &DerResidual) -> Self {
        DerResidualDoc {
            clean: r.is_clean(),
            phi_determined: r.phi_determined(),
            phi: r
                .phi
                .iter()
                .map(|p| PhiDoc {
                    j1: p.j1,
                    j2: p.j2,
                    operator: OperatorDoc::from_op(&p.op),
                    right_mult_by_unit_image: p.right_mult_by_unit_image,
                })
                .collect(),
            roundtrip_total: r.roundtrip_total,
            roundtrip: r.roundtrip.clone(),
            components: r.components.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiderResidualDoc {
    pub clean: bool,
    pub roundtrip_total: usize,
    pub roundtrip: Vec<MatrixDiscrepancy>,
    pub components: Vec<ComponentViolation>,
    pub sidedness: Vec<SidednessOutcome>,
}

impl DiderResidualDoc {
    pub fn from_residual(r: &DiderResidual) -> Self {
        DiderResidualDoc {
            clean: r.is_clean(),
            roundtrip_total: r.roundtrip_total,
            roundtrip: r.roundtrip.clone(),
            components: r.components.clone(),
            sidedness: r.sidedness.clone(),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn load_algebra(path: &Path) -> Result<FiniteAlgebra> {
    read_json::<AlgebraDoc>(path)?.to_algebra()
}

pub fn load_dialgebra(path: &Path) -> Result<Dialgebra> {
    read_json::<DialgebraDoc>(path)?.to_dialgebra()
}

pub fn load_operator(path: &Path) -> Result<LinOp> {
    read_json::<OperatorDoc>(path)?.to_op()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{matrix_algebra, perm_quotient, truncated_poly};
    use crate::arith::frac;
    use crate::dialgebra::kp_window;
    use crate::sampling::{rng_from_seed, ComponentSpaces};
    use crate::solver::derivation_space;

    #[test]
    fn algebra_roundtrip() {
        for alg in [matrix_algebra(2).unwrap(), perm_quotient(3), truncated_poly(3).unwrap()] {
            let doc = AlgebraDoc::from_algebra(&alg);
            let text = to_json(&doc).unwrap();
            let back: AlgebraDoc = serde_json::from_str(&text).unwrap();
            assert_eq!(back.to_algebra().unwrap(), alg);
        }
    }

    #[test]
    fn algebra_doc_shape() {
        let doc = AlgebraDoc::from_algebra(&truncated_poly(2).unwrap());
        let v: serde_json::Value = serde_json::to_value(&doc).unwrap();
        assert_eq!(v["flavor"], "associative");
        assert_eq!(v["unit"], serde_json::json!(["1", "0"]));
        assert_eq!(v["structure"][0], serde_json::json!([0, 0, 0, "1"]));
    }

    #[test]
    fn malformed_documents_rejected() {
        let mut doc = AlgebraDoc::from_algebra(&truncated_poly(2).unwrap());
        doc.structure.push((0, 0, 5, "1".into()));
        assert!(matches!(doc.to_algebra(), Err(Error::Parse(_))));
        let mut doc = AlgebraDoc::from_algebra(&truncated_poly(2).unwrap());
        doc.structure[0].3 = "1/0".into();
        assert!(doc.to_algebra().is_err());
        let op = OperatorDoc {
            domain_tag: "A".into(),
            codomain_tag: "A".into(),
            domain_dim: 2,
            codomain_dim: 2,
            matrix: vec!["1".into()],
        };
        assert!(matches!(op.to_op(), Err(Error::Parse(_))));
    }

    #[test]
    fn dialgebra_roundtrip_rebuilds_factors() {
        let d = kp_window(Window::new(1, 1), &matrix_algebra(2).unwrap()).unwrap();
        let doc = DialgebraDoc::from_dialgebra(&d);
        let back = serde_json::from_str::<DialgebraDoc>(&to_json(&doc).unwrap())
            .unwrap()
            .to_dialgebra()
            .unwrap();
        assert_eq!(back.left, d.left);
        assert_eq!(back.right, d.right);
        assert!(back.factors.is_some());

        let mut tampered = doc.clone();
        tampered.left_prod[0].3 = "2".into();
        assert!(matches!(tampered.to_dialgebra(), Err(Error::Parse(_))));
    }

    #[test]
    fn operator_and_subspace_roundtrip() {
        let mut op = LinOp::endo_zero("T", 2);
        op.set(0, 1, frac(-3, 4));
        let doc = OperatorDoc::from_op(&op);
        assert_eq!(doc.matrix, vec!["0", "-3/4", "0", "0"]);
        assert_eq!(doc.to_op().unwrap(), op);

        let d = kp_window(Window::new(1, 1), &truncated_poly(2).unwrap()).unwrap();
        let b = derivation_space(&d);
        let back = SubspaceDoc::from_basis(&b).to_basis().unwrap();
        assert!(back.same_subspace(&b));
    }

    #[test]
    fn family_roundtrip() {
        let d = kp_window(Window::new(2, 1), &truncated_poly(3).unwrap()).unwrap();
        let spaces = ComponentSpaces::of(&d).unwrap();
        let mut rng = rng_from_seed(5);
        let fam = spaces.random_der_family(&mut rng);
        let doc = FamilyDoc::from_der(&fam);
        let text = to_json(&doc).unwrap();
        let Family::Der(back) = serde_json::from_str::<FamilyDoc>(&text).unwrap().to_family().unwrap() else {
            panic!()
        };
        assert_eq!(back, fam);

        let fam = spaces.random_dider_family(&mut rng, Sidedness::Left);
        let doc = FamilyDoc::from_dider(&fam, Sidedness::Left);
        let text = to_json(&doc).unwrap();
        assert!(text.contains("\"kind\": \"diderivation\""));
        let Family::Dider(back, s) = serde_json::from_str::<FamilyDoc>(&text).unwrap().to_family().unwrap() else {
            panic!()
        };
        assert_eq!((back, s), (fam, Sidedness::Left));
    }
}
