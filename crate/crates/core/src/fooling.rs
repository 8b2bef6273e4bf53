//! Certified lower bounds on the worst-case integration error of arbitrary
//! rules over fixed node sets, built from decomposable worst-case functions.
//!
//! The idea: a product of left/right parts of h1 vanishes on every node
//! outside its quadrant, so the sum of such products over all quadrants no
//! node occupies is a function every rule integrates to zero while its true
//! integral stays large. `certify_thm1` computes this bound exactly from the
//! set of occupied quadrants (fully decomposable h1), `certify_thm3` from
//! per-projection occupancy (h1 with a decomposable part plus a smooth
//! part); `brute_force_thm1` is the exhaustive oracle, and the closed forms
//! drop the occupancy structure entirely.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::error::{invalid, unsupported, Result};
use crate::math::{self, KahanSum};
use crate::points::PointSet;
use crate::spaces::{Domain, WcDecomposition};

/// Per-coordinate position of a node relative to the decomposition point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordSide {
    /// Strictly below the decomposition point.
    Low,
    /// Strictly above.
    High,
    /// Exactly at it (the node can lie in the support of either part, so
    /// certificates treat both quadrants as occupied).
    Boundary,
}

/// Which quadrants of the domain a node can occupy, coordinate by
/// coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadrantPattern {
    pub sides: Vec<CoordSide>,
}

impl QuadrantPattern {
    pub fn boundary_count(&self) -> usize {
        self.sides
            .iter()
            .filter(|s| **s == CoordSide::Boundary)
            .count()
    }
}

/// Classify each coordinate of `node` against the decomposition point `a`
/// (exact equality marks the boundary).
pub fn pattern_of(node: &[f64], a: f64) -> QuadrantPattern {
    let sides = node
        .iter()
        .map(|&x| {
            if x == a {
                CoordSide::Boundary
            } else if x < a {
                CoordSide::Low
            } else {
                CoordSide::High
            }
        })
        .collect();
    QuadrantPattern { sides }
}

/// Which bound produced a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Thm1Exact,
    Thm1Closed,
    Thm3Exact,
    Thm3Closed,
    Thm5,
}

impl BoundKind {
    pub fn name(&self) -> &'static str {
        match self {
            BoundKind::Thm1Exact => "thm1-exact",
            BoundKind::Thm1Closed => "thm1-closed",
            BoundKind::Thm3Exact => "thm3-exact",
            BoundKind::Thm3Closed => "thm3-closed",
            BoundKind::Thm5 => "thm5",
        }
    }
}

/// A certified lower bound on the worst-case error of every admissible rule
/// using the given nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    /// Lower bound on the worst-case error itself.
    pub bound_absolute: f64,
    /// The bound divided by the initial error; always in [0, 1].
    pub bound_normalized: f64,
    pub theorem: BoundKind,
    pub n_nodes: usize,
    pub d: usize,
    /// Named constants that entered the bound.
    pub constants: BTreeMap<&'static str, f64>,
}

impl Certificate {
    fn new(
        theorem: BoundKind,
        normalized: f64,
        e0d: f64,
        n_nodes: usize,
        d: usize,
        constants: BTreeMap<&'static str, f64>,
    ) -> Self {
        let normalized = normalized.clamp(0.0, 1.0);
        Certificate {
            bound_absolute: normalized * e0d,
            bound_normalized: normalized,
            theorem,
            n_nodes,
            d,
            constants,
        }
    }
}

/// Hard cap for the exhaustive subset loops.
const MAX_SUBSET_DIM: usize = 20;
/// Hard cap on packed-pattern width.
const MAX_PACKED_DIM: usize = 64;
/// Cap on the total number of quadrants boundary nodes may expand to.
const MAX_BOUNDARY_EXPANSION: u64 = 1_000_000;

struct NodeMasks {
    low: u64,
    boundary: u64,
}

fn node_masks(dec: &WcDecomposition, ps: &PointSet) -> Result<Vec<NodeMasks>> {
    let d = ps.d();
    if d > MAX_PACKED_DIM {
        return Err(unsupported(alloc::format!(
            "packed quadrant patterns support d <= {MAX_PACKED_DIM}"
        )));
    }
    if let Domain::UnitInterval = dec.domain {
        for node in ps.iter_nodes() {
            if node.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
                return Err(invalid("node outside the unit cube domain"));
            }
        }
    }
    let a = dec.a;
    let mut expansion: u64 = 0;
    let mut masks = Vec::with_capacity(ps.len());
    for node in ps.iter_nodes() {
        let mut low = 0u64;
        let mut boundary = 0u64;
        for (j, &x) in node.iter().enumerate() {
            if x == a {
                boundary |= 1 << j;
            } else if x < a {
                low |= 1 << j;
            }
        }
        expansion = expansion.saturating_add(1u64 << boundary.count_ones().min(63));
        masks.push(NodeMasks { low, boundary });
    }
    if expansion > MAX_BOUNDARY_EXPANSION {
        return Err(unsupported(alloc::format!(
            "boundary-coordinate expansion of {expansion} quadrants exceeds \
             {MAX_BOUNDARY_EXPANSION}; perturb nodes off the decomposition point"
        )));
    }
    Ok(masks)
}

/// All submasks of `mask`, including 0 and `mask` itself.
fn for_each_submask(mask: u64, mut f: impl FnMut(u64)) {
    let mut s = mask;
    loop {
        f(s);
        if s == 0 {
            break;
        }
        s = (s.wrapping_sub(1)) & mask;
    }
}

fn require_fully_decomposable(dec: &WcDecomposition) -> Result<(f64, f64)> {
    if !dec.is_decomposable() {
        return Err(unsupported(
            "h1 has no decomposable part (both part integrals must be positive)",
        ));
    }
    if dec.i_smooth != 0.0 {
        return Err(unsupported(
            "h1 has a nonzero smooth part; use the decomposable-part certificate",
        ));
    }
    let total = dec.i0 + dec.i1;
    Ok((dec.i0 / total, dec.i1 / total))
}

/// Exact fully-decomposable certificate: 1 minus the normalized mass of the
/// quadrants occupied by at least one node.
pub fn certify_thm1(dec: &WcDecomposition, ps: &PointSet) -> Result<Certificate> {
    let (w0, w1) = require_fully_decomposable(dec)?;
    let d = ps.d();
    let masks = node_masks(dec, ps)?;

    let mut hit: BTreeSet<u64> = BTreeSet::new();
    for m in &masks {
        for_each_submask(m.boundary, |sub| {
            hit.insert(m.low | sub);
        });
    }
    // Within the enumeration cap, sum the surviving quadrants directly (no
    // cancellation, and term-for-term identical to the brute-force oracle);
    // beyond it fall back to one minus the occupied mass.
    let normalized = if d <= MAX_SUBSET_DIM {
        let mut surviving = KahanSum::new();
        for u in 0..(1u64 << d) {
            if !hit.contains(&u) {
                let k = u.count_ones() as i32;
                surviving.add(math::powi(w0, k) * math::powi(w1, d as i32 - k));
            }
        }
        surviving.value()
    } else {
        let mut hit_mass = KahanSum::new();
        for &u in &hit {
            let k = u.count_ones() as i32;
            hit_mass.add(math::powi(w0, k) * math::powi(w1, d as i32 - k));
        }
        (1.0 - hit_mass.value()).max(0.0)
    };
    let mut constants = BTreeMap::new();
    constants.insert("alpha", w0.max(w1));
    constants.insert("i0", dec.i0);
    constants.insert("i1", dec.i1);
    constants.insert("initial_error_1d", dec.initial_error_1d);
    Ok(Certificate::new(
        BoundKind::Thm1Exact,
        normalized,
        dec.initial_error(d as u32),
        ps.len(),
        d,
        constants,
    ))
}

/// Exhaustive oracle for [`certify_thm1`]: enumerates all 2^d quadrants and
/// sums the unoccupied ones directly.
pub fn brute_force_thm1(dec: &WcDecomposition, ps: &PointSet) -> Result<Certificate> {
    let (w0, w1) = require_fully_decomposable(dec)?;
    let d = ps.d();
    if d > MAX_SUBSET_DIM {
        return Err(unsupported(alloc::format!(
            "brute force enumerates 2^d subsets and is capped at d <= {MAX_SUBSET_DIM}"
        )));
    }
    // Same input validation as the fast path; the occupancy test below is
    // deliberately literal, straight from the node coordinates.
    node_masks(dec, ps)?;
    let a = dec.a;
    let mut surviving = KahanSum::new();
    for u in 0..(1u64 << d) {
        let occupied = ps.iter_nodes().any(|node| {
            node.iter()
                .enumerate()
                .all(|(j, &x)| if u >> j & 1 == 1 { x <= a } else { x >= a })
        });
        if !occupied {
            let k = u.count_ones() as i32;
            surviving.add(math::powi(w0, k) * math::powi(w1, d as i32 - k));
        }
    }
    let mut constants = BTreeMap::new();
    constants.insert("alpha", w0.max(w1));
    constants.insert("i0", dec.i0);
    constants.insert("i1", dec.i1);
    constants.insert("initial_error_1d", dec.initial_error_1d);
    Ok(Certificate::new(
        BoundKind::Thm1Exact,
        surviving.value(),
        dec.initial_error(d as u32),
        ps.len(),
        d,
        constants,
    ))
}

/// Closed-form normalized bound (1 - N alpha^d)_+ for fully decomposable h1.
pub fn closed_form_thm1(alpha: f64, n: u64, d: u32) -> Result<f64> {
    if !(0.5..1.0).contains(&alpha) {
        return Err(invalid("alpha must lie in [1/2, 1)"));
    }
    Ok((1.0 - n as f64 * math::powi(alpha, d as i32)).max(0.0))
}

/// Exact decomposable-part certificate: sums, over every coordinate subset,
/// the surviving quadrant mass of the projected node set, weighted by the
/// smooth part's integral on the remaining coordinates.
pub fn certify_thm3(dec: &WcDecomposition, ps: &PointSet) -> Result<Certificate> {
    if !dec.is_decomposable() {
        return Err(unsupported(
            "h1 has no decomposable part (both part integrals must be positive)",
        ));
    }
    if !(dec.i_smooth > 0.0) {
        return Err(unsupported(
            "h1 has no smooth part; use the fully decomposable certificate",
        ));
    }
    let d = ps.d();
    if d > MAX_SUBSET_DIM {
        return Err(unsupported(alloc::format!(
            "the exact decomposable-part certificate enumerates 2^d subsets and is \
             capped at d <= {MAX_SUBSET_DIM}; use the closed form beyond that"
        )));
    }
    let masks = node_masks(dec, ps)?;
    let total = dec.i0 + dec.i1;
    let (w0, w1) = (dec.i0 / total, dec.i1 / total);
    let sigma = dec.i_smooth / (dec.i_smooth + total);
    let rho = total / (dec.i_smooth + total);

    let mut acc = KahanSum::new();
    let mut hit: BTreeSet<u64> = BTreeSet::new();
    for u in 0..(1u64 << d) {
        let du = u.count_ones() as i32;
        hit.clear();
        for m in &masks {
            for_each_submask(m.boundary & u, |sub| {
                hit.insert((m.low & u) | sub);
            });
        }
        let mut hit_mass = KahanSum::new();
        for &v in &hit {
            let k = v.count_ones() as i32;
            hit_mass.add(math::powi(w0, k) * math::powi(w1, du - k));
        }
        let survive = (1.0 - hit_mass.value()).max(0.0);
        acc.add(math::powi(sigma, d as i32 - du) * math::powi(rho, du) * survive);
    }
    let mut constants = BTreeMap::new();
    constants.insert("alpha", w0.max(w1));
    constants.insert("alpha1", dec.alpha1());
    constants.insert("alpha2", dec.alpha2());
    if let Some(a3) = dec.alpha3() {
        constants.insert("alpha3", a3);
    }
    constants.insert("i0", dec.i0);
    constants.insert("i1", dec.i1);
    Ok(Certificate::new(
        BoundKind::Thm3Exact,
        acc.value(),
        dec.initial_error(d as u32),
        ps.len(),
        d,
        constants,
    ))
}

/// Closed-form normalized decomposable-part bound:
/// (1 + alpha3)^{-d} sum_k C(d,k) alpha3^k (1 - n alpha^k)_+.
///
/// `n` is real-valued so rule sizes of order C^d stay representable at
/// large d; beyond f64 range use [`closed_form_thm3_log`] with ln(n).
pub fn closed_form_thm3(alpha: f64, alpha3: f64, n: f64, d: u32) -> Result<f64> {
    if !(n >= 0.0) {
        return Err(invalid("n must be nonnegative"));
    }
    closed_form_thm3_log(alpha, alpha3, math::ln(n), d)
}

/// [`closed_form_thm3`] with the rule size given as ln(n); n = 0 maps to
/// negative infinity.
pub fn closed_form_thm3_log(alpha: f64, alpha3: f64, ln_n: f64, d: u32) -> Result<f64> {
    if !(0.5..1.0).contains(&alpha) {
        return Err(invalid("alpha must lie in [1/2, 1)"));
    }
    if !(alpha3 > 0.0 && alpha3.is_finite()) {
        return Err(invalid("alpha3 must be positive and finite"));
    }
    if ln_n.is_nan() || ln_n == f64::INFINITY {
        return Err(invalid("ln(n) must not be NaN or +inf"));
    }
    let ln_a3 = math::ln(alpha3);
    let ln_1p = math::ln(1.0 + alpha3);
    let ln_alpha = math::ln(alpha);
    let mut acc = KahanSum::new();
    let mut ln_binom = 0.0f64;
    for k in 0..=d {
        let ln_damp = ln_n + k as f64 * ln_alpha;
        if ln_damp < 0.0 {
            let ln_weight = ln_binom + k as f64 * ln_a3 - d as f64 * ln_1p;
            acc.add(math::exp(ln_weight) * (1.0 - math::exp(ln_damp)));
        }
        ln_binom += math::ln((d - k) as f64) - math::ln((k + 1) as f64);
    }
    Ok(acc.value().clamp(0.0, 1.0))
}

/// Fraction of the binomial(alpha3) mass at or below floor(c d); the
/// vanishing remainder term of the decomposable-part asymptotics.
pub fn alpha_tail_ratio(alpha3: f64, c: f64, d: u32) -> Result<f64> {
    if !(alpha3 > 0.0 && alpha3.is_finite()) {
        return Err(invalid("alpha3 must be positive and finite"));
    }
    let limit = alpha3 / (1.0 + alpha3);
    if !(c > 0.0 && c < limit) {
        return Err(invalid(alloc::format!(
            "c must lie in (0, alpha3/(1+alpha3)) = (0, {limit})"
        )));
    }
    if d < 1 {
        return Err(invalid("d must be >= 1"));
    }
    let k_max = math::floor(c * d as f64) as u32;
    let ln_a3 = math::ln(alpha3);
    let ln_1p = math::ln(1.0 + alpha3);
    let mut acc = KahanSum::new();
    let mut ln_binom = 0.0f64;
    for k in 0..=k_max.min(d) {
        acc.add(math::exp(ln_binom + k as f64 * ln_a3 - d as f64 * ln_1p));
        ln_binom += math::ln((d - k) as f64) - math::ln((k + 1) as f64);
    }
    Ok(acc.value())
}

/// Information-complexity lower bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComplexityBound {
    /// Fully decomposable route: (1/alpha)^d (1 - eps), eps in (0, 1).
    Thm1 { alpha: f64 },
    /// Decomposable-part route: floor(C^d) with
    /// C = alpha^{-alpha3/(1+alpha3)} (1 - delta). Asymptotic: valid for all
    /// d past an unquantified threshold depending on eps.
    Thm3 { alpha: f64, alpha3: f64, delta: f64 },
    /// Positive-rule route: C^d (1 - 2 eps), eps in (0, 1/2).
    Thm5 { c_tilde: f64 },
}

/// Lower bound on the number of nodes needed to reduce the initial error by
/// the factor `eps`. Returned as a real (the bounds overflow any integer
/// width at moderate d); integer-valued whenever it is below 2^53.
pub fn info_complexity_bound(bound: &ComplexityBound, eps: f64, d: u32) -> Result<f64> {
    match *bound {
        ComplexityBound::Thm1 { alpha } => {
            if !(0.5..1.0).contains(&alpha) {
                return Err(invalid("alpha must lie in [1/2, 1)"));
            }
            if !(eps > 0.0 && eps < 1.0) {
                return Err(invalid("eps must lie in (0, 1)"));
            }
            Ok(math::ceil(math::powf(1.0 / alpha, d as f64) * (1.0 - eps)))
        }
        ComplexityBound::Thm3 {
            alpha,
            alpha3,
            delta,
        } => {
            if !(0.5..1.0).contains(&alpha) {
                return Err(invalid("alpha must lie in [1/2, 1)"));
            }
            if !(alpha3 > 0.0 && alpha3.is_finite()) {
                return Err(invalid("alpha3 must be positive and finite"));
            }
            if !(0.0..1.0).contains(&delta) {
                return Err(invalid("delta must lie in [0, 1)"));
            }
            if !(eps > 0.0 && eps < 1.0) {
                return Err(invalid("eps must lie in (0, 1)"));
            }
            let c = math::powf(alpha, -alpha3 / (1.0 + alpha3)) * (1.0 - delta);
            Ok(math::floor(math::powf(c, d as f64)))
        }
        ComplexityBound::Thm5 { c_tilde } => {
            if !(c_tilde > 1.0) {
                return Err(invalid("the positive-rule constant must exceed 1"));
            }
            if !(eps > 0.0 && eps < 0.5) {
                return Err(invalid("eps must lie in (0, 1/2) for positive rules"));
            }
            Ok(math::ceil(
                math::powf(c_tilde, d as f64) * (1.0 - 2.0 * eps),
            ))
        }
    }
}
