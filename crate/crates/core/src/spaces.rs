//! Univariate space descriptors over the unit interval, their worst-case
//! functions and decompositions, the closed-form curse constants, and the
//! norm q-property checker.
//!
//! Three spaces are built in:
//!
//! - the anchored Sobolev space of smoothness `r` (all derivatives up to
//!   `r - 1` vanish at the anchor `a`, norm = L_q norm of the r-th
//!   derivative),
//! - the same space at `r = 1` with the anchor condition removed (norm adds
//!   an `|f(a)|^q` term),
//! - polynomials of degree at most two (norm sums the L_q norms of the
//!   function and its first two derivatives).
//!
//! Each produces a [`WcDecomposition`]: the worst-case function h1 split into
//! a smooth part plus parts supported left/right of the decomposition point,
//! together with their integrals, the space norm of h1, and the initial
//! error.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, unsupported, violation, Result};
use crate::math;
use crate::numerics::{self, QuadSettings};

/// Norm exponent q in (1, ∞].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    /// The Hölder conjugate p with 1/p + 1/q = 1 (p = 1 for q = ∞).
    pub fn holder_conjugate(&self) -> f64 {
        match self {
            Exponent::Finite(q) => q / (q - 1.0),
            Exponent::Infinity => 1.0,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    fn validate(&self) -> Result<()> {
        match self {
            Exponent::Finite(q) if !(q.is_finite() && *q > 1.0) => {
                Err(invalid("norm exponent q must lie in (1, inf]"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    /// W^r_{a,q} on [0,1]: derivatives up to r-1 vanish at the anchor.
    AnchoredSobolev,
    /// W^1_q on [0,1] without the anchor condition (norm anchored at a).
    NoAnchorSobolev,
    /// Polynomials of degree <= 2 with the summed-derivative q-norm.
    PolyDeg2,
}

/// Parameters of a univariate function space from which everything else is
/// derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceSpec {
    pub kind: SpaceKind,
    pub r: u32,
    pub q: Exponent,
    pub a: f64,
}

impl SpaceSpec {
    pub fn anchored_sobolev(r: u32, q: Exponent, a: f64) -> Result<Self> {
        q.validate()?;
        if r < 1 {
            return Err(invalid("smoothness r must be >= 1"));
        }
        if !(a > 0.0 && a < 1.0) {
            return Err(invalid("anchor a must lie in (0, 1)"));
        }
        Ok(Self {
            kind: SpaceKind::AnchoredSobolev,
            r,
            q,
            a,
        })
    }

    /// r is fixed to 1; q must be finite (the q = ∞ variant is out of scope
    /// for this space).
    pub fn no_anchor_sobolev(q: f64, a: f64) -> Result<Self> {
        let q = Exponent::Finite(q);
        q.validate()?;
        if !(a > 0.0 && a < 1.0) {
            return Err(invalid("anchor a must lie in (0, 1)"));
        }
        Ok(Self {
            kind: SpaceKind::NoAnchorSobolev,
            r: 1,
            q,
            a,
        })
    }

    /// q must be finite in (1, ∞); the anchor plays no role.
    pub fn poly_deg2(q: f64) -> Result<Self> {
        let q = Exponent::Finite(q);
        q.validate()?;
        Ok(Self {
            kind: SpaceKind::PolyDeg2,
            r: 1,
            q,
            a: 0.5,
        })
    }

    /// Hölder conjugate of the norm exponent.
    pub fn p(&self) -> f64 {
        self.q.holder_conjugate()
    }
}

/// Domain of the univariate problem a decomposition lives on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    UnitInterval,
    RealLine { cutoff: f64 },
}

#[derive(Debug, Clone)]
pub(crate) enum PartsRepr {
    /// Anchored Sobolev worst-case function (piecewise power function).
    AnchoredPoly { r: u32, p: f64 },
    /// 1 + the r = 1 anchored function (no-anchor space).
    WithConstant { p: f64 },
    /// h1 identically 1, no decomposable part (degree-2 polynomials).
    Constant,
    /// Grid-backed even function over the real line (weighted integration).
    SymmetricGrid(crate::weighted::SymmetricWc),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Source {
    Cube(SpaceSpec),
    RealLine { r: u32, p: f64 },
}

/// A worst-case function together with its decomposition into a smooth part
/// and parts supported left/right of the decomposition point `a`, their
/// integrals, the space norm of h1, and the 1-D initial error.
#[derive(Debug, Clone)]
pub struct WcDecomposition {
    pub(crate) parts: PartsRepr,
    pub(crate) source: Source,
    /// Decomposition point.
    pub a: f64,
    /// Integral of the part supported on the left of `a`.
    pub i0: f64,
    /// Integral of the part supported on the right of `a`.
    pub i1: f64,
    /// Integral of the smooth (non-decomposable) part.
    pub i_smooth: f64,
    /// Space norm of h1.
    pub norm_h1: f64,
    /// Initial error of the 1-D problem, (i_smooth + i0 + i1) / norm_h1.
    pub initial_error_1d: f64,
    pub domain: Domain,
}

impl WcDecomposition {
    /// Worst-case function h1 = smooth part + left part + right part.
    pub fn h1(&self, x: f64) -> f64 {
        match &self.parts {
            PartsRepr::AnchoredPoly { r, p } => anchored_wc(x, *r, *p, self.a),
            PartsRepr::WithConstant { p } => 1.0 + anchored_wc(x, 1, *p, self.a),
            PartsRepr::Constant => 1.0,
            PartsRepr::SymmetricGrid(g) => g.h1(x),
        }
    }

    /// Decomposable part supported left of `a`.
    pub fn h1_part0(&self, x: f64) -> f64 {
        match &self.parts {
            PartsRepr::AnchoredPoly { r, p } => {
                if x <= self.a {
                    anchored_wc(x, *r, *p, self.a)
                } else {
                    0.0
                }
            }
            PartsRepr::WithConstant { p } => {
                if x <= self.a {
                    anchored_wc(x, 1, *p, self.a)
                } else {
                    0.0
                }
            }
            PartsRepr::Constant => 0.0,
            PartsRepr::SymmetricGrid(g) => {
                if x <= 0.0 {
                    g.h1(x)
                } else {
                    0.0
                }
            }
        }
    }

    /// Decomposable part supported right of `a`.
    pub fn h1_part1(&self, x: f64) -> f64 {
        match &self.parts {
            PartsRepr::AnchoredPoly { r, p } => {
                if x >= self.a {
                    anchored_wc(x, *r, *p, self.a)
                } else {
                    0.0
                }
            }
            PartsRepr::WithConstant { p } => {
                if x >= self.a {
                    anchored_wc(x, 1, *p, self.a)
                } else {
                    0.0
                }
            }
            PartsRepr::Constant => 0.0,
            PartsRepr::SymmetricGrid(g) => {
                if x >= 0.0 {
                    g.h1(x)
                } else {
                    0.0
                }
            }
        }
    }

    /// Smooth additive part (identically zero for fully decomposable h1).
    pub fn h1_smooth(&self, _x: f64) -> f64 {
        match &self.parts {
            PartsRepr::AnchoredPoly { .. } | PartsRepr::SymmetricGrid(_) => 0.0,
            PartsRepr::WithConstant { .. } | PartsRepr::Constant => 1.0,
        }
    }

    /// Analytic r-th derivative of h1 (the Hölder-equality construction),
    /// used for norm evaluation without numerical differentiation.
    pub fn h1_deriv_r(&self, x: f64) -> f64 {
        match &self.parts {
            PartsRepr::AnchoredPoly { r, p } => anchored_wc_deriv_r(x, *r, *p, self.a),
            PartsRepr::WithConstant { p } => anchored_wc_deriv_r(x, 1, *p, self.a),
            PartsRepr::Constant => 0.0,
            PartsRepr::SymmetricGrid(g) => g.deriv_r(x),
        }
    }

    /// Integral of h1 over the domain.
    pub fn integral(&self) -> f64 {
        self.i_smooth + self.i0 + self.i1
    }

    /// True when both part integrals are positive (a usable decomposition).
    pub fn is_decomposable(&self) -> bool {
        self.i0 > 0.0 && self.i1 > 0.0
    }

    /// max(i0, i1) / (i0 + i1); errors for non-decomposable h1.
    pub fn alpha(&self) -> Result<f64> {
        if !self.is_decomposable() {
            return Err(unsupported(
                "h1 has no decomposable part (both part integrals must be positive)",
            ));
        }
        Ok(self.i0.max(self.i1) / (self.i0 + self.i1))
    }

    /// Integral of the smooth part.
    pub fn alpha1(&self) -> f64 {
        self.i_smooth
    }

    /// i0 + i1.
    pub fn alpha2(&self) -> f64 {
        self.i0 + self.i1
    }

    /// alpha2 / alpha1, defined only when the smooth part has positive
    /// integral.
    pub fn alpha3(&self) -> Option<f64> {
        if self.i_smooth > 0.0 {
            Some(self.alpha2() / self.i_smooth)
        } else {
            None
        }
    }

    /// The space spec this decomposition came from (cube domains only).
    pub fn space(&self) -> Option<&SpaceSpec> {
        match &self.source {
            Source::Cube(s) => Some(s),
            Source::RealLine { .. } => None,
        }
    }

    /// Initial error of the d-fold tensor-product problem.
    pub fn initial_error(&self, d: u32) -> f64 {
        math::powi(self.initial_error_1d, d as i32)
    }
}

/// r! as f64.
pub(crate) fn factorial(r: u32) -> f64 {
    (1..=r as u64).map(|i| i as f64).product()
}

/// Product (rp - from)(rp - from - 1) ... (rp - (r-1)).
fn falling_product(rp: f64, from: u32, r: u32) -> f64 {
    (from..r).map(|i| rp - i as f64).product()
}

/// Worst-case function of the anchored Sobolev space: the function with
/// h1^{(r)} = sign(g) |g|^{p-1} for the Peano kernel g of the integration
/// functional, written as a piecewise power expansion around the anchor.
fn anchored_wc(t: f64, r: u32, p: f64, a: f64) -> f64 {
    let rp = r as f64 * p;
    let sign = if r % 2 == 1 { 1.0 } else { -1.0 };
    let scale = sign / math::powf(factorial(r), p - 1.0);
    let denom0 = falling_product(rp, 0, r);
    let (base, width) = if t < a {
        ((math::powf(a, rp) - math::powf(t.max(0.0), rp)) / denom0, a)
    } else {
        (
            (math::powf(1.0 - a, rp) - math::powf((1.0 - t).max(0.0), rp)) / denom0,
            1.0 - a,
        )
    };
    // On both sides the j-th correction term carries the coefficient
    // (-1)^j |t - a|^j: left of the anchor via the sign of (t - a)^j, right
    // of it via the explicit alternating factor.
    let mut sum = 0.0;
    let mut jfact = 1.0;
    for j in 1..r {
        jfact *= j as f64;
        let term_sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum +=
            term_sign * math::powf(math::abs(t - a), j as f64) * math::powf(width, rp - j as f64)
                / (jfact * falling_product(rp, j, r));
    }
    scale * (base + sum)
}

/// Analytic r-th derivative of the anchored worst-case function:
/// (-1)^r (t^r/r!)^{p-1} left of the anchor, ((1-t)^r/r!)^{p-1} right of it.
fn anchored_wc_deriv_r(t: f64, r: u32, p: f64, a: f64) -> f64 {
    let rf = factorial(r);
    if t < a {
        let mag = math::powf(math::powf(t.max(0.0), r as f64) / rf, p - 1.0);
        if r % 2 == 1 {
            -mag
        } else {
            mag
        }
    } else {
        math::powf(math::powf((1.0 - t).max(0.0), r as f64) / rf, p - 1.0)
    }
}

/// Build the worst-case function and its decomposition for `spec`.
pub fn worst_case_function(spec: &SpaceSpec, settings: &QuadSettings) -> Result<WcDecomposition> {
    settings.validate()?;
    let a = spec.a;
    let p = spec.p();
    match spec.kind {
        SpaceKind::AnchoredSobolev => {
            let r = spec.r;
            let (i0, i1) = if r == 1 {
                (
                    math::powf(a, p + 1.0) / (p + 1.0),
                    math::powf(1.0 - a, p + 1.0) / (p + 1.0),
                )
            } else {
                let f = |t: f64| anchored_wc(t, r, p, a);
                let i0 = numerics::integrate(f, 0.0, a, settings)?;
                let i1 = numerics::integrate(f, a, 1.0, settings)?;
                if i0 <= 0.0 || i1 <= 0.0 {
                    return Err(violation(format!(
                        "part integrals must be positive, got i0={i0:e}, i1={i1:e}"
                    )));
                }
                (i0, i1)
            };
            let norm =
                space_norm_of_deriv(|t| anchored_wc_deriv_r(t, r, p, a), a, &spec.q, settings)?;
            let initial = (i0 + i1) / norm;
            Ok(WcDecomposition {
                parts: PartsRepr::AnchoredPoly { r, p },
                source: Source::Cube(*spec),
                a,
                i0,
                i1,
                i_smooth: 0.0,
                norm_h1: norm,
                initial_error_1d: initial,
                domain: Domain::UnitInterval,
            })
        }
        SpaceKind::NoAnchorSobolev => {
            let i0 = math::powf(a, p + 1.0) / (p + 1.0);
            let i1 = math::powf(1.0 - a, p + 1.0) / (p + 1.0);
            let q = match spec.q {
                Exponent::Finite(q) => q,
                Exponent::Infinity => {
                    return Err(unsupported("the no-anchor space is defined for finite q"))
                }
            };
            // norm^q = |h1(a)|^q + L_q(h1')^q with h1(a) = 1.
            let deriv_norm_q = norm_q_power(|t| anchored_wc_deriv_r(t, 1, p, a), a, q, settings)?;
            let norm = math::powf(1.0 + deriv_norm_q, 1.0 / q);
            let integral = 1.0 + i0 + i1;
            Ok(WcDecomposition {
                parts: PartsRepr::WithConstant { p },
                source: Source::Cube(*spec),
                a,
                i0,
                i1,
                i_smooth: 1.0,
                norm_h1: norm,
                initial_error_1d: integral / norm,
                domain: Domain::UnitInterval,
            })
        }
        SpaceKind::PolyDeg2 => Ok(WcDecomposition {
            parts: PartsRepr::Constant,
            source: Source::Cube(*spec),
            a,
            i0: 0.0,
            i1: 0.0,
            i_smooth: 1.0,
            norm_h1: 1.0,
            initial_error_1d: 1.0,
            domain: Domain::UnitInterval,
        }),
    }
}

/// L_q norm (or sup for q = ∞) of an r-th derivative with a kink at `a`.
fn space_norm_of_deriv<F: Fn(f64) -> f64>(
    deriv: F,
    a: f64,
    q: &Exponent,
    settings: &QuadSettings,
) -> Result<f64> {
    match q {
        Exponent::Finite(q) => {
            let power = norm_q_power(&deriv, a, *q, settings)?;
            Ok(math::powf(power, 1.0 / *q))
        }
        Exponent::Infinity => {
            // Essential supremum: dense grid plus golden-section refinement
            // on each side of the kink.
            let mut best = f64::NEG_INFINITY;
            for (lo, hi) in [(0.0, a), (a, 1.0)] {
                let r = numerics::maximize_1d(|t| math::abs(deriv(t)), lo, hi, 10_001, 1e-12)?;
                best = best.max(r.value);
            }
            Ok(best)
        }
    }
}

/// Integral of |deriv|^q over [0,1], split at the kink.
fn norm_q_power<F: Fn(f64) -> f64>(
    deriv: F,
    a: f64,
    q: f64,
    settings: &QuadSettings,
) -> Result<f64> {
    numerics::integrate_piecewise(
        |t| math::powf(math::abs(deriv(t)), q),
        &[0.0, a, 1.0],
        settings,
    )
}

/// Closed-form curse constant 1/alpha = 1 + (1/max(a, 1-a) - 1)^{rp + 1} of
/// the anchored Sobolev space.
pub fn inv_alpha_closed_form(spec: &SpaceSpec) -> Result<f64> {
    if spec.kind != SpaceKind::AnchoredSobolev {
        return Err(unsupported(
            "closed-form 1/alpha is defined for the anchored Sobolev space",
        ));
    }
    let p = spec.p();
    let exponent = spec.r as f64 * p + 1.0;
    Ok(1.0 + math::powf(1.0 / spec.a.max(1.0 - spec.a) - 1.0, exponent))
}

/// Initial error of the d-fold tensor-product problem, e(0,1)^d.
pub fn initial_error(spec: &SpaceSpec, d: u32, settings: &QuadSettings) -> Result<f64> {
    if d < 1 {
        return Err(invalid("dimension must be >= 1"));
    }
    Ok(worst_case_function(spec, settings)?.initial_error(d))
}

/// Numerical check of the norm q-property for disjointly supported f and g:
/// returns the defect |‖f+g‖^q - ‖f‖^q - ‖g‖^q| (finite q), or
/// |‖f+g‖ - max(‖f‖, ‖g‖)| (q = ∞). Norms are L_q norms of the
/// `deriv_order`-th derivative, computed by divided differences plus
/// quadrature; expected ≈ 0 for norms with the property.
pub fn check_q_property<F, G>(
    f: F,
    g: G,
    supp_f: (f64, f64),
    supp_g: (f64, f64),
    q: Exponent,
    deriv_order: u32,
    settings: &QuadSettings,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    q.validate()?;
    for (lo, hi) in [supp_f, supp_g] {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid("supports must be nonempty finite intervals"));
        }
    }
    let overlap = supp_f.1.min(supp_g.1) - supp_f.0.max(supp_g.0);
    if overlap > 0.0 {
        return Err(invalid(
            "supports overlap on a set of positive measure; the q-property needs disjoint supports",
        ));
    }
    if deriv_order > 2 {
        return Err(unsupported(
            "divided differences are implemented for derivative orders 0..=2",
        ));
    }

    // Pieces of the support hull, split at all four support endpoints; the
    // difference stencil never crosses a piece boundary, so the genuine kink
    // between the two supports cannot pollute neighbouring pieces.
    let cuts = numerics::sorted_breakpoints(&[supp_f.0, supp_f.1, supp_g.0, supp_g.1]);
    let mut pieces: Vec<(f64, f64)> = Vec::new();
    for w in cuts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let in_f = mid > supp_f.0 && mid < supp_f.1;
        let in_g = mid > supp_g.0 && mid < supp_g.1;
        if w[1] > w[0] && (in_f || in_g) {
            pieces.push((w[0], w[1]));
        }
    }

    let sum = |x: f64| f(x) + g(x);
    match q {
        Exponent::Finite(q) => {
            let nf = norm_power_dd(&f, &[supp_f], q, deriv_order, settings)?;
            let ng = norm_power_dd(&g, &[supp_g], q, deriv_order, settings)?;
            let nfg = norm_power_dd(&sum, &pieces, q, deriv_order, settings)?;
            Ok(math::abs(nfg - nf - ng))
        }
        Exponent::Infinity => {
            let nf = sup_norm_dd(&f, &[supp_f], deriv_order)?;
            let ng = sup_norm_dd(&g, &[supp_g], deriv_order)?;
            let nfg = sup_norm_dd(&sum, &pieces, deriv_order)?;
            Ok(math::abs(nfg - nf.max(ng)))
        }
    }
}

fn norm_power_dd<F: Fn(f64) -> f64>(
    u: &F,
    pieces: &[(f64, f64)],
    q: f64,
    order: u32,
    settings: &QuadSettings,
) -> Result<f64> {
    let mut acc = math::KahanSum::new();
    for &(lo, hi) in pieces {
        let v = numerics::integrate(
            |x| math::powf(math::abs(divided_difference(u, x, lo, hi, order)), q),
            lo,
            hi,
            settings,
        )?;
        acc.add(v);
    }
    Ok(acc.value())
}

fn sup_norm_dd<F: Fn(f64) -> f64>(u: &F, pieces: &[(f64, f64)], order: u32) -> Result<f64> {
    let mut best = 0.0f64;
    for &(lo, hi) in pieces {
        let r = numerics::maximize_1d(
            |x| math::abs(divided_difference(u, x, lo, hi, order)),
            lo,
            hi,
            2001,
            1e-10,
        )?;
        best = best.max(r.value);
    }
    Ok(best)
}

/// Five-point divided difference for derivative orders 0..=2, with the
/// stencil confined to [lo, hi] (one-sided near the edges).
fn divided_difference<F: Fn(f64) -> f64>(u: &F, x: f64, lo: f64, hi: f64, order: u32) -> f64 {
    if order == 0 {
        return u(x);
    }
    let h = 1e-4f64.min((hi - lo) / 8.0);
    let mut start = x - 2.0 * h;
    if start < lo {
        start = lo;
    }
    if start + 4.0 * h > hi {
        start = hi - 4.0 * h;
    }
    let nodes = [
        start,
        start + h,
        start + 2.0 * h,
        start + 3.0 * h,
        start + 4.0 * h,
    ];
    let w = fd_weights(x, &nodes, order as usize);
    let mut acc = 0.0;
    for (wi, ni) in w.iter().zip(nodes.iter()) {
        acc += wi * u(*ni);
    }
    acc
}

/// Fornberg finite-difference weights for the m-th derivative at `z` on
/// arbitrary nodes.
fn fd_weights(z: f64, x: &[f64], m: usize) -> Vec<f64> {
    let n = x.len();
    let mut c = alloc::vec![alloc::vec![0.0f64; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c.swap_remove(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    const S: QuadSettings = QuadSettings {
        abs_tol: 1e-10,
        rel_tol: 1e-10,
        max_subdivisions: 10_000,
        tail_cutoff: 12.0,
    };

    fn anchored(r: u32, q: Exponent, a: f64) -> WcDecomposition {
        worst_case_function(&SpaceSpec::anchored_sobolev(r, q, a).unwrap(), &S).unwrap()
    }

    #[test]
    fn example_r1_q2_half_anchor() {
        let dec = anchored(1, Exponent::Finite(2.0), 0.5);
        assert!((dec.i0 - 1.0 / 24.0).abs() < 1e-14);
        assert!((dec.i1 - 1.0 / 24.0).abs() < 1e-14);
        assert!((dec.initial_error_1d - (1.0f64 / 12.0).sqrt()).abs() < 1e-10);
        assert!((dec.norm_h1 - (1.0f64 / 12.0).sqrt()).abs() < 1e-10);
        assert!((dec.alpha().unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn no_anchor_q2_half() {
        let spec = SpaceSpec::no_anchor_sobolev(2.0, 0.5).unwrap();
        let dec = worst_case_function(&spec, &S).unwrap();
        assert!((dec.integral() - (1.0 + 1.0 / 12.0)).abs() < 1e-10);
        assert!((dec.norm_h1 - (13.0f64 / 12.0).sqrt()).abs() < 1e-10);
        assert!((dec.initial_error_1d - (13.0f64 / 12.0).sqrt()).abs() < 1e-10);
        assert_eq!(dec.i_smooth, 1.0);
        assert!((dec.alpha3().unwrap() - 1.0 / 12.0).abs() < 1e-10);
    }

    #[test]
    fn poly_deg2_is_constant_one() {
        let spec = SpaceSpec::poly_deg2(3.0).unwrap();
        let dec = worst_case_function(&spec, &S).unwrap();
        assert_eq!(dec.h1(0.3), 1.0);
        assert_eq!(dec.initial_error_1d, 1.0);
        assert!(dec.alpha().is_err());
        assert!(!dec.is_decomposable());
    }

    #[test]
    fn decomposition_adds_up_pointwise() {
        for (r, q, a) in [
            (1, Exponent::Finite(2.0), 0.5),
            (2, Exponent::Finite(3.0), 0.3),
            (3, Exponent::Infinity, 0.7),
        ] {
            let dec = anchored(r, q, a);
            for i in 0..=100 {
                let x = i as f64 / 100.0;
                let whole = dec.h1(x);
                let sum = dec.h1_smooth(x) + dec.h1_part0(x) + dec.h1_part1(x);
                assert!(
                    (whole - sum).abs() < 1e-12,
                    "r={r} a={a} x={x}: {whole} vs {sum}"
                );
            }
        }
    }

    #[test]
    fn parts_vanish_off_support() {
        let dec = anchored(2, Exponent::Finite(2.0), 0.4);
        assert_eq!(dec.h1_part0(0.7), 0.0);
        assert_eq!(dec.h1_part1(0.2), 0.0);
    }

    #[test]
    fn derivatives_vanish_at_anchor() {
        // h1^{(j)}(a) = 0 for j < r, checked by finite differences taken
        // from each smooth side of the anchor (a centred stencil would see
        // the O(h) kink of the r-th derivative).
        for r in 1..=3u32 {
            for a in [0.3, 0.5, 0.7] {
                let dec = anchored(r, Exponent::Finite(2.0), a);
                for j in 0..r.min(3) {
                    for (lo, hi) in [(0.0, a), (a, 1.0)] {
                        let v = divided_difference(&|x| dec.h1(x), a, lo, hi, j);
                        assert!(v.abs() <= 1e-6, "r={r} a={a} j={j}: {v}");
                    }
                }
            }
        }
    }

    #[test]
    fn holder_equality_consistency() {
        for (r, q) in [
            (1, Exponent::Finite(2.0)),
            (2, Exponent::Finite(5.0)),
            (3, Exponent::Infinity),
        ] {
            let dec = anchored(r, q, 0.35);
            let lhs = dec.integral();
            let rhs = dec.initial_error_1d * dec.norm_h1;
            assert!((lhs - rhs).abs() < 1e-8);
        }
    }

    #[test]
    fn closed_form_alpha_vs_quadrature_grid() {
        for a in [0.3, 0.5, 0.7] {
            for r in [1u32, 2, 3] {
                for p in [1.0, 2.0, 5.0] {
                    let q = if p == 1.0 {
                        Exponent::Infinity
                    } else {
                        Exponent::Finite(p / (p - 1.0))
                    };
                    let spec = SpaceSpec::anchored_sobolev(r, q, a).unwrap();
                    let closed = inv_alpha_closed_form(&spec).unwrap();
                    // Independent quadrature of both parts.
                    let dec = anchored(r, q, a);
                    let i0 = numerics::integrate(|t| dec.h1_part0(t), 0.0, a, &S).unwrap();
                    let i1 = numerics::integrate(|t| dec.h1_part1(t), a, 1.0, &S).unwrap();
                    let inv_alpha = (i0 + i1) / i0.max(i1);
                    assert!(
                        (closed - inv_alpha).abs() < 1e-8,
                        "a={a} r={r} p={p}: {closed} vs {inv_alpha}"
                    );
                }
            }
        }
    }

    #[test]
    fn inv_alpha_examples() {
        let spec = SpaceSpec::anchored_sobolev(1, Exponent::Finite(2.0), 0.5).unwrap();
        assert_eq!(inv_alpha_closed_form(&spec).unwrap(), 2.0);
        let spec = SpaceSpec::anchored_sobolev(3, Exponent::Finite(1.25), 0.5).unwrap();
        assert!((inv_alpha_closed_form(&spec).unwrap() - 2.0).abs() < 1e-15);
        let spec = SpaceSpec::anchored_sobolev(1, Exponent::Finite(2.0), 0.75).unwrap();
        let expect = 1.0 + (1.0f64 / 3.0).powi(3);
        assert!((inv_alpha_closed_form(&spec).unwrap() - expect).abs() < 1e-12);
        assert!(inv_alpha_closed_form(&SpaceSpec::poly_deg2(2.0).unwrap()).is_err());
    }

    #[test]
    fn initial_error_examples() {
        let poly = SpaceSpec::poly_deg2(2.0).unwrap();
        assert_eq!(initial_error(&poly, 20, &S).unwrap(), 1.0);
        let anch = SpaceSpec::anchored_sobolev(1, Exponent::Finite(2.0), 0.5).unwrap();
        assert!((initial_error(&anch, 2, &S).unwrap() - 1.0 / 12.0).abs() < 1e-10);
        let noanch = SpaceSpec::no_anchor_sobolev(2.0, 0.5).unwrap();
        let expect = (13.0f64 / 12.0).powf(1.5);
        assert!((initial_error(&noanch, 3, &S).unwrap() - expect).abs() < 1e-9);
    }

    #[test]
    fn mirror_symmetry_of_part_integrals() {
        for r in [1u32, 2, 3] {
            for a in [0.2, 0.35, 0.45] {
                let d1 = anchored(r, Exponent::Finite(3.0), a);
                let d2 = anchored(r, Exponent::Finite(3.0), 1.0 - a);
                assert!((d1.i0 - d2.i1).abs() < 1e-10, "r={r} a={a}");
                assert!((d1.i1 - d2.i0).abs() < 1e-10, "r={r} a={a}");
            }
        }
    }

    #[test]
    fn alpha_in_valid_range() {
        for r in [1u32, 2, 3] {
            for a in [0.1, 0.3, 0.5, 0.8, 0.9] {
                for q in [
                    Exponent::Finite(1.5),
                    Exponent::Finite(4.0),
                    Exponent::Infinity,
                ] {
                    let alpha = anchored(r, q, a).alpha().unwrap();
                    assert!((0.5..1.0).contains(&alpha), "r={r} a={a}: {alpha}");
                }
            }
        }
    }

    #[test]
    fn q_property_example_r1_parts() {
        for q in [2.0, 3.0] {
            let p = q / (q - 1.0);
            let a = 0.5f64;
            let part0 = move |x: f64| {
                if x <= a {
                    (a.powf(p) - x.powf(p)) / p
                } else {
                    0.0
                }
            };
            let part1 = move |x: f64| {
                if x >= a {
                    ((1.0 - a).powf(p) - (1.0 - x).powf(p)) / p
                } else {
                    0.0
                }
            };
            let defect =
                check_q_property(part0, part1, (0.0, a), (a, 1.0), Exponent::Finite(q), 1, &S)
                    .unwrap();
            assert!(defect <= 1e-8, "q={q}: defect {defect:e}");
        }
    }

    #[test]
    fn q_property_zero_function_exact() {
        let g = |x: f64| {
            if x >= 0.6 {
                (x - 0.6) * (x - 1.0) * (x - 0.8)
            } else {
                0.0
            }
        };
        let defect = check_q_property(
            |_| 0.0,
            g,
            (0.0, 0.4),
            (0.6, 1.0),
            Exponent::Finite(2.0),
            1,
            &S,
        )
        .unwrap();
        assert_eq!(defect, 0.0);
    }

    #[test]
    fn q_property_overlap_rejected() {
        let r = check_q_property(
            |x| x,
            |x| x,
            (0.0, 0.6),
            (0.4, 1.0),
            Exponent::Finite(2.0),
            0,
            &S,
        );
        assert!(r.is_err());
    }

    #[test]
    fn q_property_infinity_variant() {
        let f = |x: f64| if x <= 0.4 { x * (0.4 - x) } else { 0.0 };
        let g = |x: f64| {
            if x >= 0.6 {
                3.0 * (x - 0.6) * (1.0 - x)
            } else {
                0.0
            }
        };
        let defect =
            check_q_property(f, g, (0.0, 0.4), (0.6, 1.0), Exponent::Infinity, 0, &S).unwrap();
        assert!(defect <= 1e-8, "defect {defect:e}");
    }

    #[test]
    fn infinity_norm_of_worst_case_derivative_is_one() {
        for r in [1u32, 2, 3] {
            let dec = anchored(r, Exponent::Infinity, 0.4);
            assert!((dec.norm_h1 - 1.0).abs() < 1e-9, "r={r}: {}", dec.norm_h1);
        }
    }
}
