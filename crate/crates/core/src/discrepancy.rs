//! L_p discrepancies of node sets: anchored and quadrant test boxes, their
//! generalized (all-projections) variants, and the identity tying them to
//! quasi-Monte Carlo worst-case errors.
//!
//! Three backends:
//!
//! - `closed-form-p2` — the exact O(N^2 d) kernel formula for p = 2;
//! - `box-exact` — exact decomposition of the unit cube into boxes on which
//!   the counting term is constant, the innermost dimension integrated in
//!   closed form (which crosses the kink of |count/N - volume|^p exactly)
//!   and the remaining dimensions by adaptive quadrature;
//! - `monte-carlo` — seeded uniform sampling of the local discrepancy with a
//!   delta-method standard error.

use alloc::vec::Vec;
use core::cell::RefCell;

use crate::error::{invalid, unsupported, Error, Result};
use crate::math::{self, KahanSum};
use crate::numerics::{self, QuadSettings};
use crate::points::{anchor_transform, PointSet, SplitMix64};
use crate::spaces::{SpaceKind, SpaceSpec};

/// Test-set family: boxes spanned between t and the anchor, or quadrant
/// boxes switching between [0,t) and [t,1) at the anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Anchored,
    Quadrant,
}

/// Which discrepancy to compute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscrepancyKind {
    pub family: Family,
    /// Sum the p-th powers of all coordinate-projection discrepancies.
    pub generalized: bool,
    /// Integrability exponent, >= 1.
    pub p: f64,
    /// Anchor in (0, 1).
    pub a: f64,
}

impl DiscrepancyKind {
    pub fn new(family: Family, generalized: bool, p: f64, a: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(invalid("discrepancy exponent p must be finite and >= 1"));
        }
        if !(a > 0.0 && a < 1.0) {
            return Err(invalid("anchor a must lie in (0, 1)"));
        }
        Ok(Self {
            family,
            generalized,
            p,
            a,
        })
    }

    fn plain(&self) -> Self {
        Self {
            generalized: false,
            ..*self
        }
    }
}

/// Backend tag carried by results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    ClosedFormP2,
    BoxExact,
    MonteCarlo,
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::ClosedFormP2 => "closed-form-p2",
            Backend::BoxExact => "box-exact",
            Backend::MonteCarlo => "monte-carlo",
        }
    }
}

/// Backend request; Monte Carlo carries its sampling parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendChoice {
    ClosedFormP2,
    BoxExact,
    MonteCarlo { n_samples: u64, seed: u64 },
}

/// A discrepancy value with its backend and error estimate (zero for the
/// exact backends).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscrepancyResult {
    pub value: f64,
    pub backend: Backend,
    pub stderr: f64,
    pub n_samples: u64,
}

/// Budgets for the exact backends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscrepancySettings {
    pub quad: QuadSettings,
    /// Maximum number of boxes per projection for `box-exact`.
    pub box_budget: u64,
    /// Hard cap on d for generalized variants (2^d projections).
    pub d_max_generalized: u32,
}

impl Default for DiscrepancySettings {
    fn default() -> Self {
        Self {
            quad: QuadSettings::default(),
            box_budget: 2_000_000,
            d_max_generalized: 16,
        }
    }
}

fn vol1(family: Family, a: f64, t: f64) -> f64 {
    match family {
        Family::Anchored => math::abs(t - a),
        Family::Quadrant => {
            if t < a {
                t
            } else {
                1.0 - t
            }
        }
    }
}

fn member1(family: Family, a: f64, t: f64, y: f64) -> bool {
    match family {
        Family::Anchored => {
            if t < a {
                t <= y && y < a
            } else {
                a <= y && y < t
            }
        }
        Family::Quadrant => {
            if t < a {
                y < t
            } else {
                t <= y
            }
        }
    }
}

/// Pointwise discrepancy at the test parameter `t`:
/// (fraction of nodes in the test set) - (volume of the test set).
/// An empty node set contributes an empty counting sum.
pub fn local_discrepancy(kind: &DiscrepancyKind, ps: &PointSet, t: &[f64]) -> Result<f64> {
    if kind.generalized {
        return Err(unsupported(
            "local discrepancy is defined for the non-generalized families",
        ));
    }
    if t.len() != ps.d() {
        return Err(invalid("test point dimension mismatch"));
    }
    let mut vol = 1.0;
    for &tj in t {
        vol *= vol1(kind.family, kind.a, tj);
    }
    let n = ps.len();
    if n == 0 {
        return Ok(-vol);
    }
    let mut count = 0usize;
    for node in ps.iter_nodes() {
        if node
            .iter()
            .zip(t.iter())
            .all(|(&y, &tj)| member1(kind.family, kind.a, tj, y))
        {
            count += 1;
        }
    }
    Ok(count as f64 / n as f64 - vol)
}

// 1-D kernels of the p = 2 closed form. Each is the stated defining
// integral in closed form; the quadrature oracle in the tests pins them.

/// Integral over t of vol1(t)^2.
fn kernel_m2(a: f64) -> f64 {
    (a * a * a + (1.0 - a) * (1.0 - a) * (1.0 - a)) / 3.0
}

/// Integral over t of 1{y in test set(t)} * vol1(t).
fn kernel_b(family: Family, a: f64, y: f64) -> f64 {
    match family {
        Family::Anchored => {
            if y < a {
                a * y - 0.5 * y * y
            } else {
                0.5 * ((1.0 - a) * (1.0 - a) - (y - a) * (y - a))
            }
        }
        Family::Quadrant => {
            if y < a {
                0.5 * (a * a - y * y)
            } else {
                (y - a) - 0.5 * (y * y - a * a)
            }
        }
    }
}

/// Integral over t of 1{y in test set(t)} * 1{y' in test set(t)}.
fn kernel_c(family: Family, a: f64, y: f64, yp: f64) -> f64 {
    let (lo, hi) = if y <= yp { (y, yp) } else { (yp, y) };
    match family {
        Family::Anchored => {
            if hi < a {
                lo
            } else if lo >= a {
                1.0 - hi
            } else {
                0.0
            }
        }
        Family::Quadrant => (a - hi).max(0.0) + (lo - a).max(0.0),
    }
}

fn closed_form_p2(family: Family, a: f64, ps: &PointSet) -> f64 {
    let d = ps.d() as i32;
    let m2 = kernel_m2(a);
    let n = ps.len();
    let a_term = math::powi(m2, d);
    if n == 0 {
        return math::sqrt(a_term);
    }
    let nf = n as f64;
    let mut b_sum = KahanSum::new();
    for node in ps.iter_nodes() {
        let mut prod = 1.0;
        for &y in node {
            prod *= kernel_b(family, a, y);
        }
        b_sum.add(prod);
    }
    let mut c_sum = KahanSum::new();
    for k in 0..n {
        for l in 0..n {
            let mut prod = 1.0;
            for (&y, &yp) in ps.node(k).iter().zip(ps.node(l).iter()) {
                prod *= kernel_c(family, a, y, yp);
            }
            c_sum.add(prod);
        }
    }
    let sq = a_term - 2.0 * b_sum.value() / nf + c_sum.value() / (nf * nf);
    math::sqrt(sq.max(0.0))
}

/// L2 discrepancy anchored at 1/2 (component-by-component search objective).
pub(crate) fn anchored_l2_half_value(ps: &PointSet) -> Result<f64> {
    Ok(closed_form_p2(Family::Anchored, 0.5, ps))
}

// --- box-exact backend ---

#[derive(Debug, Clone, Copy)]
struct Seg {
    lo: f64,
    hi: f64,
    sigma: f64,
    offset: f64,
}

impl Seg {
    fn v(&self, t: f64) -> f64 {
        self.sigma * t + self.offset
    }
}

/// Antiderivative helper: d/dw of sign(w)|w|^{p+1}/(p+1) is |w|^p.
fn abs_pow_antideriv(w: f64, p: f64) -> f64 {
    let mag = math::powf(math::abs(w), p + 1.0) / (p + 1.0);
    if w < 0.0 {
        -mag
    } else {
        mag
    }
}

struct BoxIntegrator {
    segs: Vec<Seg>,
    k_over_n: f64,
    p: f64,
    level_settings: Vec<QuadSettings>,
    failure: RefCell<Option<Error>>,
}

impl BoxIntegrator {
    /// Integral over levels `j..` of |K - s_prod * prod v_level(t_level)|^p.
    fn level(&self, j: usize, s_prod: f64) -> f64 {
        let seg = self.segs[j];
        if j + 1 == self.segs.len() {
            // Innermost dimension in closed form: w(t) = K - s_prod v(t).
            let w_lo = self.k_over_n - s_prod * seg.v(seg.lo);
            let w_hi = self.k_over_n - s_prod * seg.v(seg.hi);
            let spread = math::abs(w_lo - w_hi);
            if spread <= 1e-14 * math::abs(w_lo).max(math::abs(w_hi)).max(1e-300) {
                let mid = self.k_over_n - s_prod * seg.v(0.5 * (seg.lo + seg.hi));
                return math::powf(math::abs(mid), self.p) * (seg.hi - seg.lo);
            }
            let dw_dt = -s_prod * seg.sigma;
            return (abs_pow_antideriv(w_hi, self.p) - abs_pow_antideriv(w_lo, self.p)) / dw_dt;
        }
        let inner = numerics::integrate(
            |t| self.level(j + 1, s_prod * seg.v(t)),
            seg.lo,
            seg.hi,
            &self.level_settings[j],
        );
        match inner {
            Ok(v) => v,
            Err(e) => {
                let mut slot = self.failure.borrow_mut();
                if slot.is_none() {
                    *slot = Some(e);
                }
                0.0
            }
        }
    }
}

fn box_exact(
    family: Family,
    a: f64,
    p: f64,
    ps: &PointSet,
    st: &DiscrepancySettings,
) -> Result<f64> {
    let d = ps.d();
    let n = ps.len();

    // Axis breakpoints: box edges where the counting term can change.
    let mut axes: Vec<Vec<f64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut cuts: Vec<f64> = ps.iter_nodes().map(|node| node[j]).collect();
        cuts.push(0.0);
        cuts.push(1.0);
        cuts.push(a);
        let cuts = numerics::sorted_breakpoints(&cuts);
        axes.push(cuts);
    }
    let mut n_boxes = 1u64;
    for cuts in &axes {
        n_boxes = n_boxes.saturating_mul((cuts.len() - 1) as u64);
    }
    if n_boxes > st.box_budget {
        return Err(Error::Budget {
            what: "box decomposition",
            estimate: n_boxes as f64,
            residual: st.box_budget as f64,
        });
    }

    let box_tol = st.quad.abs_tol / n_boxes as f64;
    let mut level_settings = Vec::with_capacity(d.saturating_sub(1));
    for level in 0..d.saturating_sub(1) {
        let depth_below = (d - 2 - level) as i32;
        level_settings.push(
            st.quad
                .with_abs_tol(box_tol / math::powi(50.0, depth_below)),
        );
    }

    let mut total = KahanSum::new();
    let mut index = alloc::vec![0usize; d];
    loop {
        // Current box.
        let mut segs = Vec::with_capacity(d);
        let mut degenerate = false;
        for j in 0..d {
            let lo = axes[j][index[j]];
            let hi = axes[j][index[j] + 1];
            if hi <= lo {
                degenerate = true;
            }
            let mid = 0.5 * (lo + hi);
            let (sigma, offset) = match family {
                Family::Anchored => {
                    if mid < a {
                        (-1.0, a)
                    } else {
                        (1.0, -a)
                    }
                }
                Family::Quadrant => {
                    if mid < a {
                        (1.0, 0.0)
                    } else {
                        (-1.0, 1.0)
                    }
                }
            };
            segs.push(Seg {
                lo,
                hi,
                sigma,
                offset,
            });
        }
        if !degenerate {
            // Counting term, constant inside the box.
            let count = if n == 0 {
                0
            } else {
                ps.iter_nodes()
                    .filter(|node| {
                        node.iter()
                            .zip(segs.iter())
                            .all(|(&y, seg)| member1(family, a, 0.5 * (seg.lo + seg.hi), y))
                    })
                    .count()
            };
            let value = if count == 0 {
                // |0 - Vol|^p factorizes into per-axis closed forms.
                let mut prod = 1.0;
                for seg in &segs {
                    let hi_v = seg.v(seg.hi);
                    let lo_v = seg.v(seg.lo);
                    prod *= (abs_pow_antideriv(hi_v, p) - abs_pow_antideriv(lo_v, p)) / seg.sigma;
                }
                prod
            } else {
                let integ = BoxIntegrator {
                    segs,
                    k_over_n: count as f64 / n as f64,
                    p,
                    level_settings: level_settings.clone(),
                    failure: RefCell::new(None),
                };
                let v = integ.level(0, 1.0);
                if let Some(e) = integ.failure.into_inner() {
                    return Err(e);
                }
                v
            };
            total.add(value);
        }
        // Advance the multi-index, last axis fastest.
        let mut j = d;
        loop {
            if j == 0 {
                return Ok(math::powf(total.value().max(0.0), 1.0 / p));
            }
            j -= 1;
            index[j] += 1;
            if index[j] < axes[j].len() - 1 {
                break;
            }
            index[j] = 0;
        }
    }
}

// --- Monte Carlo backend ---

fn monte_carlo(
    kind: &DiscrepancyKind,
    ps: &PointSet,
    n_samples: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if n_samples < 2 {
        return Err(invalid("monte-carlo needs at least 2 samples"));
    }
    let d = ps.d();
    let p = kind.p;
    let mut rng = SplitMix64::new(seed);
    let mut sum = KahanSum::new();
    let mut sum_sq = KahanSum::new();
    let mut t = alloc::vec![0.0f64; d];
    let plain = kind.plain();
    for _ in 0..n_samples {
        for tj in t.iter_mut() {
            *tj = rng.next_f64();
        }
        let ld = local_discrepancy(&plain, ps, &t)?;
        let powed = math::powf(math::abs(ld), p);
        sum.add(powed);
        sum_sq.add(powed * powed);
    }
    let nf = n_samples as f64;
    let mean = sum.value() / nf;
    let var = ((sum_sq.value() - nf * mean * mean) / (nf - 1.0)).max(0.0);
    let se_mean = math::sqrt(var / nf);
    Ok((mean, se_mean))
}

/// Delta-method push of the mean and its standard error through x^{1/p}.
fn mean_to_value(mean: f64, se_mean: f64, p: f64) -> (f64, f64) {
    if mean <= 0.0 {
        return (0.0, 0.0);
    }
    let value = math::powf(mean, 1.0 / p);
    let deriv = value / (p * mean);
    (value, deriv * se_mean)
}

fn plain_mean_power(
    kind: &DiscrepancyKind,
    ps: &PointSet,
    choice: &BackendChoice,
    st: &DiscrepancySettings,
) -> Result<(f64, f64)> {
    match choice {
        BackendChoice::ClosedFormP2 => {
            let v = closed_form_p2(kind.family, kind.a, ps);
            Ok((v * v, 0.0))
        }
        BackendChoice::BoxExact => {
            let v = box_exact(kind.family, kind.a, kind.p, ps, st)?;
            Ok((math::powf(v, kind.p), 0.0))
        }
        BackendChoice::MonteCarlo { n_samples, seed } => monte_carlo(kind, ps, *n_samples, *seed),
    }
}

/// Evaluate the requested discrepancy of `ps`.
pub fn discrepancy(
    kind: &DiscrepancyKind,
    ps: &PointSet,
    choice: &BackendChoice,
    st: &DiscrepancySettings,
) -> Result<DiscrepancyResult> {
    DiscrepancyKind::new(kind.family, kind.generalized, kind.p, kind.a)?;
    ps.require_unit_cube()?;
    if matches!(choice, BackendChoice::ClosedFormP2) && kind.p != 2.0 {
        return Err(unsupported(
            "the closed-form backend is specific to p = 2; use box-exact or monte-carlo",
        ));
    }
    let (backend, n_samples) = match choice {
        BackendChoice::ClosedFormP2 => (Backend::ClosedFormP2, 0),
        BackendChoice::BoxExact => (Backend::BoxExact, 0),
        BackendChoice::MonteCarlo { n_samples, .. } => (Backend::MonteCarlo, *n_samples),
    };

    if !kind.generalized {
        let (mean, se) = plain_mean_power(kind, ps, choice, st)?;
        let (value, stderr) = match choice {
            BackendChoice::MonteCarlo { .. } => mean_to_value(mean, se, kind.p),
            _ => (math::powf(mean.max(0.0), 1.0 / kind.p), 0.0),
        };
        return Ok(DiscrepancyResult {
            value,
            backend,
            stderr,
            n_samples,
        });
    }

    // Generalized variant: p-th powers summed over all 2^d coordinate
    // projections; the empty projection contributes |1 - 1|^p = 0 for a
    // nonempty set and 1 for the empty set, which reproduces the stated
    // initial value.
    let d = ps.d();
    if d as u32 > st.d_max_generalized {
        return Err(unsupported(alloc::format!(
            "generalized discrepancy is capped at d <= {} (2^d projections)",
            st.d_max_generalized
        )));
    }
    let plain = kind.plain();
    let mut power_sum = KahanSum::new();
    let mut var_sum = KahanSum::new();
    power_sum.add(if ps.is_empty() { 1.0 } else { 0.0 });
    for mask in 1..(1u64 << d) {
        let proj = ps.project(mask);
        let sub_choice = match choice {
            BackendChoice::MonteCarlo { n_samples, seed } => BackendChoice::MonteCarlo {
                n_samples: *n_samples,
                seed: SplitMix64::new(seed ^ mask).next_u64(),
            },
            other => *other,
        };
        let (mean, se) = plain_mean_power(&plain, &proj, &sub_choice, st)?;
        power_sum.add(mean);
        var_sum.add(se * se);
    }
    let (value, stderr) = mean_to_value(power_sum.value(), math::sqrt(var_sum.value()), kind.p);
    Ok(DiscrepancyResult {
        value,
        backend,
        stderr,
        n_samples,
    })
}

/// Initial (empty-set) discrepancy in closed form.
pub fn initial_discrepancy(kind: &DiscrepancyKind, d: u32) -> f64 {
    let p = kind.p;
    let a = kind.a;
    let base = (math::powf(a, p + 1.0) + math::powf(1.0 - a, p + 1.0)) / (p + 1.0);
    let per_axis = if kind.generalized { 1.0 + base } else { base };
    math::powf(per_axis, d as f64 / p)
}

/// Worst-case error of the equal-weight rule on `ps` for the r = 1 spaces,
/// via the discrepancy identity: anchored families evaluate the transformed
/// set (a - x mod 1), quadrant families the set itself; the no-anchor space
/// pairs with the generalized variants.
pub fn qmc_worst_case_error(
    spec: &SpaceSpec,
    family: Family,
    ps: &PointSet,
    choice: &BackendChoice,
    st: &DiscrepancySettings,
) -> Result<DiscrepancyResult> {
    if spec.r != 1 {
        return Err(unsupported(
            "the discrepancy identity for equal-weight rules requires smoothness r = 1",
        ));
    }
    let generalized = match spec.kind {
        SpaceKind::AnchoredSobolev => false,
        SpaceKind::NoAnchorSobolev => true,
        SpaceKind::PolyDeg2 => {
            return Err(unsupported(
                "the polynomial space has no discrepancy identity",
            ))
        }
    };
    let kind = DiscrepancyKind::new(family, generalized, spec.p(), spec.a)?;
    let points = match family {
        Family::Anchored => anchor_transform(ps, spec.a)?,
        Family::Quadrant => ps.clone(),
    };
    discrepancy(&kind, &points, choice, st)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::{generate, GeneratorKind};
    use crate::spaces::Exponent;
    use alloc::vec;

    fn st() -> DiscrepancySettings {
        DiscrepancySettings::default()
    }

    fn kind(family: Family, p: f64, a: f64) -> DiscrepancyKind {
        DiscrepancyKind::new(family, false, p, a).unwrap()
    }

    #[test]
    fn local_discrepancy_examples() {
        let ps = PointSet::new(1, vec![0.25], None).unwrap();
        let v = local_discrepancy(&kind(Family::Anchored, 2.0, 0.5), &ps, &[0.0]).unwrap();
        assert_eq!(v, 0.5);

        let empty = PointSet::empty(1);
        let v = local_discrepancy(&kind(Family::Quadrant, 2.0, 0.5), &empty, &[0.3]).unwrap();
        assert!((v + 0.3).abs() < 1e-15);

        let ps2 = PointSet::new(2, vec![0.25, 0.25], None).unwrap();
        let v = local_discrepancy(&kind(Family::Anchored, 2.0, 0.5), &ps2, &[0.0, 0.0]).unwrap();
        assert_eq!(v, 0.75);
    }

    #[test]
    fn p2_kernels_match_quadrature_oracle() {
        // The closed forms were derived from these defining integrals; the
        // adaptive quadrature is the independent oracle.
        let s = QuadSettings::default();
        for family in [Family::Anchored, Family::Quadrant] {
            for a in [0.3, 0.5, 0.7] {
                let m2 = numerics::integrate(|t| vol1(family, a, t).powi(2), 0.0, 1.0, &s).unwrap();
                assert!((m2 - kernel_m2(a)).abs() < 1e-10, "{family:?} a={a}");
                for y in [0.05, 0.25, a, 0.6, 0.95] {
                    let b = numerics::integrate_piecewise(
                        |t| {
                            if member1(family, a, t, y) {
                                vol1(family, a, t)
                            } else {
                                0.0
                            }
                        },
                        &numerics::sorted_breakpoints(&[0.0, y, a, 1.0]),
                        &s,
                    )
                    .unwrap();
                    assert!(
                        (b - kernel_b(family, a, y)).abs() < 1e-9,
                        "{family:?} a={a} y={y}: {b} vs {}",
                        kernel_b(family, a, y)
                    );
                    for yp in [0.1, 0.45, 0.8] {
                        let c = numerics::integrate_piecewise(
                            |t| {
                                if member1(family, a, t, y) && member1(family, a, t, yp) {
                                    1.0
                                } else {
                                    0.0
                                }
                            },
                            &numerics::sorted_breakpoints(&[0.0, y, yp, a, 1.0]),
                            &s,
                        )
                        .unwrap();
                        assert!(
                            (c - kernel_c(family, a, y, yp)).abs() < 1e-9,
                            "{family:?} a={a} y={y} yp={yp}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn initial_values_match_closed_form() {
        for family in [Family::Anchored, Family::Quadrant] {
            for p in [1.0, 2.0, 3.0] {
                for d in 1..=4usize {
                    let k = kind(family, p, 0.5);
                    let empty = PointSet::empty(d);
                    let expect = initial_discrepancy(&k, d as u32);
                    let got = discrepancy(&k, &empty, &BackendChoice::BoxExact, &st())
                        .unwrap()
                        .value;
                    assert!(
                        (got - expect).abs() < 1e-12,
                        "{family:?} p={p} d={d}: {got} vs {expect}"
                    );
                    if p == 2.0 {
                        let cf = discrepancy(&k, &empty, &BackendChoice::ClosedFormP2, &st())
                            .unwrap()
                            .value;
                        assert!((cf - expect).abs() < 1e-14);
                    }
                }
            }
        }
        // Spec examples: anchored p=2 a=1/2 d=3 and quadrant p=3 a=1/2 d=2.
        let k = kind(Family::Anchored, 2.0, 0.5);
        assert!((initial_discrepancy(&k, 3) - (1.0f64 / 12.0).powf(1.5)).abs() < 1e-15);
        let k = kind(Family::Quadrant, 3.0, 0.5);
        assert!((initial_discrepancy(&k, 2) - (1.0f64 / 32.0).powf(2.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn backends_agree_small() {
        let ps = PointSet::new(1, vec![0.25, 0.75], None).unwrap();
        let k = kind(Family::Anchored, 2.0, 0.5);
        let cf = discrepancy(&k, &ps, &BackendChoice::ClosedFormP2, &st()).unwrap();
        let bx = discrepancy(&k, &ps, &BackendChoice::BoxExact, &st()).unwrap();
        assert!(
            (cf.value - bx.value).abs() < 1e-8,
            "{} vs {}",
            cf.value,
            bx.value
        );
        assert_eq!(bx.stderr, 0.0);
        let mc = discrepancy(
            &k,
            &ps,
            &BackendChoice::MonteCarlo {
                n_samples: 200_000,
                seed: 11,
            },
            &st(),
        )
        .unwrap();
        assert!(
            (mc.value - bx.value).abs() <= 4.0 * mc.stderr,
            "{} vs {} +- {}",
            mc.value,
            bx.value,
            mc.stderr
        );
        assert!(mc.stderr > 0.0);
    }

    #[test]
    fn backends_agree_2d_quadrant() {
        let ps = generate(GeneratorKind::UniformRandom, 2, 7, 99).unwrap();
        let k = kind(Family::Quadrant, 2.0, 0.3);
        let cf = discrepancy(&k, &ps, &BackendChoice::ClosedFormP2, &st()).unwrap();
        let bx = discrepancy(&k, &ps, &BackendChoice::BoxExact, &st()).unwrap();
        assert!(
            (cf.value - bx.value).abs() < 1e-8,
            "{} vs {}",
            cf.value,
            bx.value
        );
    }

    #[test]
    fn closed_form_requires_p2() {
        let k = kind(Family::Anchored, 3.0, 0.5);
        let r = discrepancy(&k, &PointSet::empty(1), &BackendChoice::ClosedFormP2, &st());
        assert!(r.is_err());
    }

    #[test]
    fn monotone_in_p() {
        let ps = generate(GeneratorKind::UniformRandom, 2, 5, 3).unwrap();
        for family in [Family::Anchored, Family::Quadrant] {
            let mut prev = 0.0;
            for p in [1.0, 1.5, 2.0, 3.0] {
                let k = kind(family, p, 0.4);
                let v = discrepancy(&k, &ps, &BackendChoice::BoxExact, &st())
                    .unwrap()
                    .value;
                assert!(prev <= v + 1e-8, "{family:?} p={p}: {prev} vs {v}");
                prev = v;
            }
        }
    }

    #[test]
    fn permutation_invariance() {
        let ps = generate(GeneratorKind::UniformRandom, 3, 6, 17).unwrap();
        let mut permuted = Vec::new();
        for node in ps.iter_nodes() {
            permuted.extend_from_slice(&[node[2], node[0], node[1]]);
        }
        let ps_perm = PointSet::new(3, permuted, None).unwrap();
        for family in [Family::Anchored, Family::Quadrant] {
            let k = kind(family, 2.0, 0.35);
            let v1 = discrepancy(&k, &ps, &BackendChoice::ClosedFormP2, &st())
                .unwrap()
                .value;
            let v2 = discrepancy(&k, &ps_perm, &BackendChoice::ClosedFormP2, &st())
                .unwrap()
                .value;
            assert!((v1 - v2).abs() < 1e-12);
        }
    }

    #[test]
    fn reflection_symmetry() {
        let ps = generate(GeneratorKind::UniformRandom, 2, 8, 5).unwrap();
        let mut reflected = Vec::new();
        for node in ps.iter_nodes() {
            for &y in node {
                reflected.push(1.0 - y);
            }
        }
        let ps_ref = PointSet::new(2, reflected, None).unwrap();
        let a = 0.3;
        let v1 = discrepancy(
            &kind(Family::Anchored, 2.0, a),
            &ps,
            &BackendChoice::ClosedFormP2,
            &st(),
        )
        .unwrap()
        .value;
        let v2 = discrepancy(
            &kind(Family::Anchored, 2.0, 1.0 - a),
            &ps_ref,
            &BackendChoice::ClosedFormP2,
            &st(),
        )
        .unwrap()
        .value;
        assert!((v1 - v2).abs() < 1e-10);
    }

    #[test]
    fn generalized_dominates_plain_and_matches_initial() {
        let ps = generate(GeneratorKind::UniformRandom, 3, 4, 21).unwrap();
        for family in [Family::Anchored, Family::Quadrant] {
            let plain = kind(family, 2.0, 0.5);
            let gen = DiscrepancyKind::new(family, true, 2.0, 0.5).unwrap();
            let vp = discrepancy(&plain, &ps, &BackendChoice::ClosedFormP2, &st())
                .unwrap()
                .value;
            let vg = discrepancy(&gen, &ps, &BackendChoice::ClosedFormP2, &st())
                .unwrap()
                .value;
            assert!(vg >= vp);
            // Empty set reproduces the stated initial value.
            for d in 1..=6u32 {
                let empty = PointSet::empty(d as usize);
                let got = discrepancy(&gen, &empty, &BackendChoice::ClosedFormP2, &st())
                    .unwrap()
                    .value;
                assert!((got - initial_discrepancy(&gen, d)).abs() < 1e-10, "d={d}");
            }
        }
    }

    #[test]
    fn qmc_identity_empty_set_is_initial_error() {
        let s = QuadSettings::default();
        for (spec, family) in [
            (
                SpaceSpec::anchored_sobolev(1, Exponent::Finite(2.0), 0.5).unwrap(),
                Family::Anchored,
            ),
            (
                SpaceSpec::anchored_sobolev(1, Exponent::Finite(1.5), 0.3).unwrap(),
                Family::Quadrant,
            ),
            (
                SpaceSpec::no_anchor_sobolev(2.0, 0.5).unwrap(),
                Family::Anchored,
            ),
        ] {
            for d in [1usize, 2, 3] {
                let e0 = crate::spaces::initial_error(&spec, d as u32, &s).unwrap();
                let got = qmc_worst_case_error(
                    &spec,
                    family,
                    &PointSet::empty(d),
                    &BackendChoice::BoxExact,
                    &st(),
                )
                .unwrap()
                .value;
                assert!((got - e0).abs() < 1e-10, "d={d}: {got} vs {e0}");
            }
        }
    }

    #[test]
    fn qmc_transform_inside_equals_outside() {
        let spec = SpaceSpec::anchored_sobolev(1, Exponent::Finite(2.0), 0.5).unwrap();
        let ps = generate(GeneratorKind::UniformRandom, 2, 6, 77).unwrap();
        let inside = qmc_worst_case_error(
            &spec,
            Family::Anchored,
            &ps,
            &BackendChoice::ClosedFormP2,
            &st(),
        )
        .unwrap()
        .value;
        let transformed = anchor_transform(&ps, 0.5).unwrap();
        let outside = discrepancy(
            &kind(Family::Anchored, 2.0, 0.5),
            &transformed,
            &BackendChoice::ClosedFormP2,
            &st(),
        )
        .unwrap()
        .value;
        assert_eq!(inside, outside);
    }

    #[test]
    fn qmc_single_node_at_anchor_reproduces_initial_error() {
        // A weight-1 rule with its node at the anchor evaluates every
        // integrand to zero, so its worst-case error equals the initial
        // error exactly.
        let spec = SpaceSpec::anchored_sobolev(1, Exponent::Finite(2.0), 0.5).unwrap();
        let ps = PointSet::new(1, vec![0.5], None).unwrap();
        let v = qmc_worst_case_error(
            &spec,
            Family::Anchored,
            &ps,
            &BackendChoice::ClosedFormP2,
            &st(),
        )
        .unwrap()
        .value;
        assert!((v - (1.0f64 / 12.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn qmc_generalized_identity_matches_kernel_oracle() {
        // Independent oracle for the no-anchor space at q = 2 (a Hilbert
        // space): with reproducing kernel 1 + k_a and one node x, the
        // squared rule error is iint K - 2 int K(x,.) + K(x,x). For a = 1/2,
        // x = 1/4 this evaluates to 13/12 - 2(1 + 3/32) + 5/4 = 7/48, which
        // the generalized-discrepancy route (empty projection included)
        // must reproduce.
        let spec = SpaceSpec::no_anchor_sobolev(2.0, 0.5).unwrap();
        let ps = PointSet::new(1, vec![0.25], None).unwrap();
        let got = qmc_worst_case_error(
            &spec,
            Family::Anchored,
            &ps,
            &BackendChoice::ClosedFormP2,
            &st(),
        )
        .unwrap()
        .value;
        assert!(((got * got) - 7.0 / 48.0).abs() < 1e-14, "{got}");
        // The quadrant identity gives the same error for the same rule.
        let quad = qmc_worst_case_error(
            &spec,
            Family::Quadrant,
            &ps,
            &BackendChoice::ClosedFormP2,
            &st(),
        )
        .unwrap()
        .value;
        assert!((got - quad).abs() < 1e-14);
    }

    #[test]
    fn qmc_requires_r1() {
        let spec = SpaceSpec::anchored_sobolev(2, Exponent::Finite(2.0), 0.5).unwrap();
        let r = qmc_worst_case_error(
            &spec,
            Family::Anchored,
            &PointSet::empty(1),
            &BackendChoice::ClosedFormP2,
            &st(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn box_budget_enforced() {
        let mut settings = st();
        settings.box_budget = 10;
        let ps = generate(GeneratorKind::UniformRandom, 3, 5, 1).unwrap();
        let r = discrepancy(
            &kind(Family::Anchored, 2.0, 0.5),
            &ps,
            &BackendChoice::BoxExact,
            &settings,
        );
        assert!(matches!(r, Err(Error::Budget { .. })));
    }

    #[test]
    fn generalized_d_cap() {
        let gen = DiscrepancyKind::new(Family::Anchored, true, 2.0, 0.5).unwrap();
        let empty = PointSet::empty(17);
        let r = discrepancy(&gen, &empty, &BackendChoice::ClosedFormP2, &st());
        assert!(r.is_err());
    }
}
