//! Subcommand implementations, shared between the binary and the test
//! suites. Every command produces an [`OutputTable`].

use std::path::Path;

use anyhow::{anyhow, bail, Result};
use cursekit_core::discrepancy::{
    discrepancy, BackendChoice, DiscrepancyKind, DiscrepancySettings, Family,
};
use cursekit_core::fooling::{
    certify_thm1, certify_thm3, closed_form_thm1, closed_form_thm3, info_complexity_bound,
    BoundKind, Certificate, ComplexityBound,
};
use cursekit_core::numerics::QuadSettings;
use cursekit_core::points::{generate, GeneratorKind, PointSet};
use cursekit_core::positive::{dp_plus_constants, p2_constants, positive_rule_bound};
use cursekit_core::spaces::{
    inv_alpha_closed_form, worst_case_function, Exponent, SpaceSpec, WcDecomposition,
};
use cursekit_core::weighted::{worst_case_function_weighted, WeightedSpec};
use cursekit_core::Error as CoreError;

use crate::table::{Cell, OutputTable};

/// Reference values being reproduced by the constant tables (rounded to the
/// published precision).
pub const CTILDE_REFERENCE: [(f64, f64); 7] = [
    (2.0, 1.00016),
    (3.0, 1.00098),
    (4.0, 1.00161),
    (5.0, 1.00195),
    (10.0, 1.00204),
    (100.0, 1.00039),
    (1000.0, 1.00004),
];

pub const CP_REFERENCE: [(f64, f64); 5] = [
    (2.0, 1.0198),
    (3.0, 1.01023),
    (4.0, 1.00465),
    (5.0, 1.00208),
    (10.0, 1.00004),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    /// Positive-rule rate constants of the degree-2 polynomial space.
    CtildeQ,
    /// Positive-rule rate constants of the no-anchor space at a = 1/2.
    CpAHalf,
    /// Closed-form curse constants of the anchored space over (r, p).
    CprGrid,
}

/// Which univariate space a command works in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceArgs {
    pub space: SpaceChoice,
    pub r: u32,
    pub q: Exponent,
    pub a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceChoice {
    AnchoredSobolev,
    NoAnchorSobolev,
    Poly2,
    WeightedGauss,
}

impl SpaceArgs {
    fn finite_q(&self) -> Result<f64> {
        match self.q {
            Exponent::Finite(q) => Ok(q),
            Exponent::Infinity => {
                Err(CoreError::Unsupported("this space requires finite q".into()).into())
            }
        }
    }

    fn cube_spec(&self) -> Result<SpaceSpec> {
        Ok(match self.space {
            SpaceChoice::AnchoredSobolev => SpaceSpec::anchored_sobolev(self.r, self.q, self.a)?,
            SpaceChoice::NoAnchorSobolev => SpaceSpec::no_anchor_sobolev(self.finite_q()?, self.a)?,
            SpaceChoice::Poly2 => SpaceSpec::poly_deg2(self.finite_q()?)?,
            SpaceChoice::WeightedGauss => {
                bail!("the weighted space has no cube-domain spec")
            }
        })
    }

    fn decomposition(&self, settings: &QuadSettings) -> Result<WcDecomposition> {
        match self.space {
            SpaceChoice::WeightedGauss => {
                let spec = WeightedSpec::std_normal(self.r, self.q, settings)?;
                Ok(worst_case_function_weighted(&spec, settings)?)
            }
            _ => Ok(worst_case_function(&self.cube_spec()?, settings)?),
        }
    }
}

/// Constant tables with the reference values and their deviations.
pub fn cmd_tables(kind: TableKind, a: f64) -> Result<OutputTable> {
    match kind {
        TableKind::CtildeQ => {
            let mut t = OutputTable::new(&[
                ("q", ""),
                ("computed", ""),
                ("reference", ""),
                ("abs_dev", ""),
            ]);
            for (q, reference) in CTILDE_REFERENCE {
                let c = p2_constants(q)?;
                t.push_row(vec![
                    Cell::Real(q),
                    Cell::Real(c.c_tilde),
                    Cell::Real(reference),
                    Cell::Real((c.c_tilde - reference).abs()),
                ]);
            }
            Ok(t)
        }
        TableKind::CpAHalf => {
            let settings = QuadSettings::default();
            let mut t = OutputTable::new(&[
                ("p", ""),
                ("q", ""),
                ("computed", ""),
                ("reference", ""),
                ("abs_dev", ""),
            ]);
            for (p, reference) in CP_REFERENCE {
                let q = p / (p - 1.0);
                let dec = worst_case_function(&SpaceSpec::no_anchor_sobolev(q, 0.5)?, &settings)?;
                let c = dp_plus_constants(&dec, &settings)?;
                t.push_row(vec![
                    Cell::Real(p),
                    Cell::Real(q),
                    Cell::Real(c.c_tilde),
                    Cell::Real(reference),
                    Cell::Real((c.c_tilde - reference).abs()),
                ]);
            }
            Ok(t)
        }
        TableKind::CprGrid => {
            let mut t = OutputTable::new(&[("r", ""), ("p", ""), ("a", ""), ("c_pr", "")]);
            for r in [1u32, 2, 3] {
                for p in [1.0f64, 2.0, 5.0] {
                    let q = if p == 1.0 {
                        Exponent::Infinity
                    } else {
                        Exponent::Finite(p / (p - 1.0))
                    };
                    let spec = SpaceSpec::anchored_sobolev(r, q, a)?;
                    t.push_row(vec![
                        Cell::Int(r as i64),
                        Cell::Real(p),
                        Cell::Real(a),
                        Cell::Real(inv_alpha_closed_form(&spec)?),
                    ]);
                }
            }
            Ok(t)
        }
    }
}

fn certificate_table(cert: &Certificate) -> OutputTable {
    let mut columns: Vec<(&str, &str)> = vec![
        ("theorem", ""),
        ("d", ""),
        ("n", ""),
        ("bound_absolute", ""),
        ("bound_normalized", ""),
    ];
    for name in cert.constants.keys() {
        columns.push((name, ""));
    }
    let mut t = OutputTable::new(&columns);
    let mut row = vec![
        Cell::Text(cert.theorem.name().to_string()),
        Cell::Int(cert.d as i64),
        Cell::Int(cert.n_nodes as i64),
        Cell::Real(cert.bound_absolute),
        Cell::Real(cert.bound_normalized),
    ];
    for value in cert.constants.values() {
        row.push(Cell::Real(*value));
    }
    t.push_row(row);
    t
}

/// Certified lower bound for the rule nodes in `ps` under the chosen space
/// and theorem. Falls back to the closed forms when the exact subset loops
/// exceed their dimension caps.
pub fn cmd_certify(ps: &PointSet, space: &SpaceArgs, theorem: u8) -> Result<OutputTable> {
    let settings = QuadSettings::default();
    let d = ps.d();
    let n = ps.len();
    let cert = match theorem {
        1 => {
            let dec = space.decomposition(&settings)?;
            if d <= 64 {
                certify_thm1(&dec, ps)?
            } else {
                let alpha = dec.alpha()?;
                let normalized = closed_form_thm1(alpha, n as u64, d as u32)?;
                let mut constants = std::collections::BTreeMap::new();
                constants.insert("alpha", alpha);
                Certificate {
                    bound_absolute: normalized * dec.initial_error(d as u32),
                    bound_normalized: normalized,
                    theorem: BoundKind::Thm1Closed,
                    n_nodes: n,
                    d,
                    constants,
                }
            }
        }
        3 => {
            if space.space != SpaceChoice::NoAnchorSobolev {
                bail!(CoreError::Unsupported(
                    "the decomposable-part certificate applies to the no-anchor space".into()
                ));
            }
            let dec = space.decomposition(&settings)?;
            if d <= 20 {
                certify_thm3(&dec, ps)?
            } else {
                let alpha = dec.alpha()?;
                let alpha3 = dec
                    .alpha3()
                    .ok_or_else(|| anyhow!("decomposition has no smooth part"))?;
                let normalized = closed_form_thm3(alpha, alpha3, n as f64, d as u32)?;
                let mut constants = std::collections::BTreeMap::new();
                constants.insert("alpha", alpha);
                constants.insert("alpha3", alpha3);
                Certificate {
                    bound_absolute: normalized * dec.initial_error(d as u32),
                    bound_normalized: normalized,
                    theorem: BoundKind::Thm3Closed,
                    n_nodes: n,
                    d,
                    constants,
                }
            }
        }
        5 => {
            let consts = match space.space {
                SpaceChoice::Poly2 => p2_constants(space.finite_q()?)?,
                SpaceChoice::NoAnchorSobolev => {
                    let dec = space.decomposition(&settings)?;
                    dp_plus_constants(&dec, &settings)?
                }
                _ => bail!(CoreError::Unsupported(
                    "positive-rule constants are available for the poly2 and \
                     no-anchor-sobolev spaces"
                        .into()
                )),
            };
            positive_rule_bound(&consts, n as u64, d as u32)?
        }
        other => bail!(CoreError::InvalidInput(format!(
            "theorem must be 1, 3 or 5, got {other}"
        ))),
    };
    Ok(certificate_table(&cert))
}

/// Discrepancy of `ps` with the requested family, exponent, anchor, and
/// backend.
pub fn cmd_discrepancy(
    ps: &PointSet,
    family: Family,
    generalized: bool,
    p: f64,
    a: f64,
    backend: BackendChoice,
) -> Result<OutputTable> {
    let kind = DiscrepancyKind::new(family, generalized, p, a)?;
    let result = discrepancy(&kind, ps, &backend, &DiscrepancySettings::default())?;
    let mut t = OutputTable::new(&[
        ("family", ""),
        ("generalized", ""),
        ("p", ""),
        ("a", ""),
        ("d", ""),
        ("n", ""),
        ("value", ""),
        ("backend", ""),
        ("stderr", ""),
        ("n_samples", ""),
    ]);
    t.push_row(vec![
        Cell::Text(
            match family {
                Family::Anchored => "anchored",
                Family::Quadrant => "quadrant",
            }
            .to_string(),
        ),
        Cell::Int(i64::from(generalized)),
        Cell::Real(p),
        Cell::Real(a),
        Cell::Int(ps.d() as i64),
        Cell::Int(ps.len() as i64),
        Cell::Real(result.value),
        Cell::Text(result.backend.name().to_string()),
        Cell::Real(result.stderr),
        Cell::Int(result.n_samples as i64),
    ]);
    Ok(t)
}

/// How the curse-curve constants are obtained.
#[derive(Debug, Clone, Copy)]
pub struct CurseArgs {
    pub theorem: u8,
    pub eps: f64,
    pub d_min: u32,
    pub d_max: u32,
    pub d_step: u32,
    pub log2: bool,
    /// Explicit constants; any missing one is derived from `space`.
    pub alpha: Option<f64>,
    pub alpha3: Option<f64>,
    pub delta: f64,
    pub c_tilde: Option<f64>,
    pub space: Option<SpaceArgs>,
}

fn curse_bound(args: &CurseArgs) -> Result<ComplexityBound> {
    let settings = QuadSettings::default();
    let need_space = || {
        args.space.ok_or_else(|| {
            anyhow!(CoreError::InvalidInput(
                "provide the theorem constants explicitly or name a --space to derive them".into()
            ))
        })
    };
    Ok(match args.theorem {
        1 => {
            let alpha = match args.alpha {
                Some(a) => a,
                None => need_space()?.decomposition(&settings)?.alpha()?,
            };
            ComplexityBound::Thm1 { alpha }
        }
        3 => {
            let (alpha, alpha3) = match (args.alpha, args.alpha3) {
                (Some(a), Some(a3)) => (a, a3),
                _ => {
                    let dec = need_space()?.decomposition(&settings)?;
                    (
                        dec.alpha()?,
                        dec.alpha3()
                            .ok_or_else(|| anyhow!("decomposition has no smooth part"))?,
                    )
                }
            };
            ComplexityBound::Thm3 {
                alpha,
                alpha3,
                delta: args.delta,
            }
        }
        5 => {
            let c_tilde = match args.c_tilde {
                Some(c) => c,
                None => {
                    let space = need_space()?;
                    match space.space {
                        SpaceChoice::Poly2 => p2_constants(space.finite_q()?)?.c_tilde,
                        SpaceChoice::NoAnchorSobolev => {
                            let dec = space.decomposition(&settings)?;
                            dp_plus_constants(&dec, &settings)?.c_tilde
                        }
                        _ => bail!(CoreError::Unsupported(
                            "positive-rule constants are available for the poly2 and \
                             no-anchor-sobolev spaces"
                                .into()
                        )),
                    }
                }
            };
            ComplexityBound::Thm5 { c_tilde }
        }
        other => bail!(CoreError::InvalidInput(format!(
            "theorem must be 1, 3 or 5, got {other}"
        ))),
    })
}

/// Rows of (d, lower bound on the nodes needed to cut the initial error by
/// eps); optionally a log2 column and an SVG polyline plot.
pub fn cmd_curse(args: &CurseArgs, svg: Option<&Path>) -> Result<OutputTable> {
    if args.d_step == 0 {
        bail!(CoreError::InvalidInput("d-step must be >= 1".into()));
    }
    if args.d_min < 1 || args.d_max < args.d_min {
        bail!(CoreError::InvalidInput(
            "need 1 <= d-min <= d-max for the dimension range".into()
        ));
    }
    let bound = curse_bound(args)?;
    let validity = match bound {
        ComplexityBound::Thm3 { .. } => "asymptotic (holds past an eps-dependent dimension)",
        _ => "all d",
    };
    let mut columns = vec![("d", ""), ("n_lower_bound", "nodes")];
    if args.log2 {
        columns.push(("log2_n_lower_bound", ""));
    }
    columns.push(("theorem", ""));
    columns.push(("validity", ""));
    let mut t = OutputTable::new(&columns);
    let mut d = args.d_min;
    while d <= args.d_max {
        let value = info_complexity_bound(&bound, args.eps, d)?;
        let mut row = vec![Cell::Int(d as i64), Cell::Real(value)];
        if args.log2 {
            row.push(Cell::Real(value.log2()));
        }
        row.push(Cell::Text(format!("thm{}", args.theorem)));
        row.push(Cell::Text(validity.to_string()));
        t.push_row(row);
        match d.checked_add(args.d_step) {
            Some(next) => d = next,
            None => break,
        }
    }
    if let Some(path) = svg {
        let y = if args.log2 { 2 } else { 1 };
        t.write_svg(0, &[y], path)?;
    }
    Ok(t)
}

/// Generate a node set, write it to `out`, and report what was written.
pub fn cmd_generate(
    kind: GeneratorKind,
    d: usize,
    n: usize,
    seed: u64,
    out: &Path,
) -> Result<OutputTable> {
    let ps = generate(kind, d, n, seed)?;
    crate::io::write_point_set(&ps, out)?;
    let mut t = OutputTable::new(&[
        ("kind", ""),
        ("d", ""),
        ("n", ""),
        ("seed", ""),
        ("file", ""),
    ]);
    t.push_row(vec![
        Cell::Text(
            match kind {
                GeneratorKind::UniformRandom => "uniform-random",
                GeneratorKind::Grid => "grid",
                GeneratorKind::Rank1Lattice => "rank1-lattice",
                GeneratorKind::VdcProduct => "vdc-product",
            }
            .to_string(),
        ),
        Cell::Int(d as i64),
        Cell::Int(n as i64),
        Cell::Int(seed as i64),
        Cell::Text(out.display().to_string()),
    ]);
    Ok(t)
}
