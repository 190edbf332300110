//! Solver spaces against the spans reachable by assembling component
//! families, with roundtrip and sidedness summaries.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::decomposition::{
    assemble_derivation_unchecked, assemble_diderivation_unchecked, decompose_derivation,
    decompose_diderivation, Sidedness,
};
use crate::dialgebra::{Dialgebra, Window};
use crate::error::Result;
use crate::operators::{is_derivation, is_diderivation, LinOp};
use crate::sampling::{rng_from_seed, ComponentSpaces};
use crate::solver::{derivation_space, diderivation_space, vectorize, SubspaceBasis};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceRow {
    pub kind: String,
    pub variant: Option<Sidedness>,
    pub solver_dim: usize,
    pub assembled_dim: Option<usize>,
    pub intersection_dim: Option<usize>,
    /// Solver dimension not reached by assembly.
    pub gap: Option<usize>,
    /// Assembled dimension outside the solver space.
    pub excess: Option<usize>,
}

impl SpaceRow {
    fn exact(&self) -> bool {
        self.gap == Some(0) && self.excess == Some(0)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundtripSummary {
    pub checked: usize,
    pub exact: usize,
    /// Failures whose every discrepancy sits at the top slot-2 degree.
    pub boundary_only: usize,
    pub other: usize,
    pub phi_determined: Option<usize>,
}

impl RoundtripSummary {
    pub fn all_exact(&self) -> bool {
        self.exact == self.checked
    }
}

/// How the extracted `ḋ` parts of the solver's diderivation basis behave.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DotSidedness {
    pub parts: usize,
    pub left_only: usize,
    pub right_only: usize,
    pub both: usize,
    pub neither: usize,
}

impl DotSidedness {
    pub fn verdict(&self) -> &'static str {
        if self.parts == 0 {
            "none extracted"
        } else if self.neither > 0 {
            "neither"
        } else if self.left_only + self.both == self.parts && self.right_only + self.both == self.parts {
            "both"
        } else if self.left_only + self.both == self.parts {
            "left"
        } else if self.right_only + self.both == self.parts {
            "right"
        } else {
            "mixed"
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentDims {
    pub perm_der: usize,
    pub perm_left: usize,
    pub perm_right: usize,
    pub perm_both: usize,
    pub alg_der: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRow {
    pub theorem: String,
    pub variant: Option<Sidedness>,
    pub draws: usize,
    pub passes: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareReport {
    pub dialgebra: String,
    pub dim: usize,
    pub window: Option<Window>,
    pub algebra: Option<String>,
    pub component_dims: Option<ComponentDims>,
    pub rows: Vec<SpaceRow>,
    /// Der and Dider computed by the solver are the same subspace.
    pub der_equals_dider: bool,
    pub der_roundtrip: Option<RoundtripSummary>,
    pub dider_roundtrip: Option<RoundtripSummary>,
    pub dot_sidedness: Option<DotSidedness>,
    pub seed: u64,
    pub trials: Vec<TrialRow>,
    pub pass: bool,
}

fn span_row(
    kind: &str,
    variant: Option<Sidedness>,
    solver: &SubspaceBasis,
    assembled: Option<&SubspaceBasis>,
) -> SpaceRow {
    let Some(assembled) = assembled else {
        return SpaceRow {
            kind: kind.into(),
            variant,
            solver_dim: solver.dimension(),
            assembled_dim: None,
            intersection_dim: None,
            gap: None,
            excess: None,
        };
    };
    let both: Vec<_> = solver.basis_vectors().chain(assembled.basis_vectors()).cloned().collect();
    let sum = SubspaceBasis::from_vectors(&solver.tag, solver.space_dim, &both).dimension();
    let inter = solver.dimension() + assembled.dimension() - sum;
    SpaceRow {
        kind: kind.into(),
        variant,
        solver_dim: solver.dimension(),
        assembled_dim: Some(assembled.dimension()),
        intersection_dim: Some(inter),
        gap: Some(solver.dimension() - inter),
        excess: Some(assembled.dimension() - inter),
    }
}

fn span_of(d: &Dialgebra, ops: &[LinOp]) -> SubspaceBasis {
    let vectors: Vec<_> = ops.iter().map(vectorize).collect();
    SubspaceBasis::from_vectors(&d.name, d.dim(), &vectors)
}

/// Runs the comparison. `trials` random families per theorem (and per
/// sidedness variant) are drawn from `seed`; the rest is seed independent.
pub fn compare(d: &Dialgebra, seed: u64, trials: usize) -> Result<CompareReport> {
    let der = derivation_space(d);
    let dider = diderivation_space(d);
    let der_equals_dider = der.same_subspace(&dider);

    let windowed = d.factors.as_ref().is_some_and(|f| f.window.is_some() && f.algebra.unit.is_some());
    if !windowed {
        return Ok(CompareReport {
            dialgebra: d.name.clone(),
            dim: d.dim(),
            window: None,
            algebra: None,
            component_dims: None,
            rows: vec![
                span_row("derivation", None, &der, None),
                span_row("diderivation", None, &dider, None),
            ],
            der_equals_dider,
            der_roundtrip: None,
            dider_roundtrip: None,
            dot_sidedness: None,
            seed,
            trials: Vec::new(),
            pass: true,
        });
    }

    let spaces = ComponentSpaces::of(d)?;
    let mut rows = Vec::new();

    let der_ops = spaces
        .der_generators()
        .iter()
        .map(|f| assemble_derivation_unchecked(d, f))
        .collect::<Result<Vec<_>>>()?;
    rows.push(span_row("derivation", None, &der, Some(&span_of(d, &der_ops))));
    for s in Sidedness::ALL {
        let ops = spaces
            .dider_generators(s)
            .iter()
            .map(|f| assemble_diderivation_unchecked(d, f))
            .collect::<Result<Vec<_>>>()?;
        rows.push(span_row("diderivation", Some(s), &dider, Some(&span_of(d, &ops))));
    }

    let mut der_rt = RoundtripSummary {
        phi_determined: Some(0),
        ..Default::default()
    };
    for op in der.basis_ops() {
        let (_, res) = decompose_derivation(d, &op)?;
        der_rt.checked += 1;
        if res.roundtrip_total == 0 {
            der_rt.exact += 1;
        } else if res.roundtrip_total == res.roundtrip.len() && res.roundtrip.iter().all(|m| m.boundary) {
            der_rt.boundary_only += 1;
        } else {
            der_rt.other += 1;
        }
        if res.phi_determined() {
            *der_rt.phi_determined.as_mut().expect("set above") += 1;
        }
    }

    let mut dider_rt = RoundtripSummary::default();
    let mut dots = DotSidedness::default();
    for op in dider.basis_ops() {
        let (_, res) = decompose_diderivation(d, &op)?;
        dider_rt.checked += 1;
        if res.roundtrip_total == 0 {
            dider_rt.exact += 1;
        } else if res.roundtrip_total == res.roundtrip.len() && res.roundtrip.iter().all(|m| m.boundary) {
            dider_rt.boundary_only += 1;
        } else {
            dider_rt.other += 1;
        }
        for s in &res.sidedness {
            dots.parts += 1;
            match (s.left, s.right) {
                (true, true) => dots.both += 1,
                (true, false) => dots.left_only += 1,
                (false, true) => dots.right_only += 1,
                (false, false) => dots.neither += 1,
            }
        }
    }

    let mut trial_rows = Vec::new();
    if trials > 0 {
        let mut rng = rng_from_seed(seed);
        let mut passes = 0;
        for _ in 0..trials {
            let fam = spaces.random_der_family(&mut rng);
            let op = assemble_derivation_unchecked(d, &fam)?;
            if is_derivation(d, &op)?.is_pass() {
                passes += 1;
            }
        }
        trial_rows.push(TrialRow {
            theorem: "derivation".into(),
            variant: None,
            draws: trials,
            passes,
        });
        for s in Sidedness::ALL {
            let mut passes = 0;
            for _ in 0..trials {
                let fam = spaces.random_dider_family(&mut rng, s);
                let op = assemble_diderivation_unchecked(d, &fam)?;
                if is_diderivation(d, &op)?.is_pass() {
                    passes += 1;
                }
            }
            trial_rows.push(TrialRow {
                theorem: "diderivation".into(),
                variant: Some(s),
                draws: trials,
                passes,
            });
        }
    }

    let der_trials_ok = trial_rows
        .iter()
        .filter(|t| t.variant.is_none())
        .all(|t| t.passes == t.draws);
    let dider_trials_ok = trial_rows.iter().all(|t| t.variant.is_none())
        || trial_rows
            .iter()
            .filter(|t| t.variant.is_some())
            .any(|t| t.passes == t.draws);
    let pass = der_rt.all_exact()
        && dider_rt.all_exact()
        && rows[0].exact()
        && rows[1..].iter().any(SpaceRow::exact)
        && der_trials_ok
        && dider_trials_ok;

    Ok(CompareReport {
        dialgebra: d.name.clone(),
        dim: d.dim(),
        window: Some(spaces.window),
        algebra: Some(spaces.algebra.name.clone()),
        component_dims: Some(ComponentDims {
            perm_der: spaces.perm_der.dimension(),
            perm_left: spaces.perm_left.dimension(),
            perm_right: spaces.perm_right.dimension(),
            perm_both: spaces.dot_space(Sidedness::Both).dimension(),
            alg_der: spaces.alg_der.dimension(),
        }),
        rows,
        der_equals_dider,
        der_roundtrip: Some(der_rt),
        dider_roundtrip: Some(dider_rt),
        dot_sidedness: Some(dots),
        seed,
        trials: trial_rows,
        pass,
    })
}

fn opt(v: Option<usize>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

impl fmt::Display for CompareReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} (dim {})", self.dialgebra, self.dim)?;
        if let (Some(w), Some(a)) = (&self.window, &self.algebra) {
            writeln!(f, "window {w}, algebra {a}")?;
        }
        if let Some(c) = &self.component_dims {
            writeln!(
                f,
                "components: Der(P)={} LDer(P)={} RDer(P)={} LDer∩RDer={} Der(A)={}",
                c.perm_der, c.perm_left, c.perm_right, c.perm_both, c.alg_der
            )?;
        }
        writeln!(
            f,
            "{:<14} {:<8} {:>7} {:>10} {:>6} {:>4} {:>7}",
            "space", "variant", "solver", "assembled", "common", "gap", "excess"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<14} {:<8} {:>7} {:>10} {:>6} {:>4} {:>7}",
                r.kind,
                r.variant.map_or("-", Sidedness::as_str),
                r.solver_dim,
                opt(r.assembled_dim),
                opt(r.intersection_dim),
                opt(r.gap),
                opt(r.excess)
            )?;
        }
        writeln!(f, "Der = Dider: {}", self.der_equals_dider)?;
        for (name, rt) in [("derivation", &self.der_roundtrip), ("diderivation", &self.dider_roundtrip)] {
            if let Some(rt) = rt {
                write!(
                    f,
                    "{name} roundtrip: {}/{} exact, {} boundary-only, {} other",
                    rt.exact, rt.checked, rt.boundary_only, rt.other
                )?;
                if let Some(p) = rt.phi_determined {
                    write!(f, ", phi determined {p}/{}", rt.checked)?;
                }
                writeln!(f)?;
            }
        }
        if let Some(s) = &self.dot_sidedness {
            writeln!(
                f,
                "extracted ḋ parts: {} (left only {}, right only {}, both {}, neither {}) → {}",
                s.parts,
                s.left_only,
                s.right_only,
                s.both,
                s.neither,
                s.verdict()
            )?;
        }
        for t in &self.trials {
            writeln!(
                f,
                "trials {} {}: {}/{} pass (seed {})",
                t.theorem,
                t.variant.map_or("-", Sidedness::as_str),
                t.passes,
                t.draws,
                self.seed
            )?;
        }
        write!(f, "{}", if self.pass { "PASS" } else { "FAIL" })
    }
}
