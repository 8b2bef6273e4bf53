//! Lower bounds for nonnegative-weight quadrature rules from spline
//! majorants: families s_y >= 0 interpolating the worst-case function at y
//! with uniformly smaller norm and integral force every positive rule to
//! keep a constant fraction of the initial error per dimension.
//!
//! Two instances are built in: the quadratic family 1 - c (y - x)^2 for the
//! degree-2 polynomial space, and the side-selection family from the
//! decomposable part of the no-anchor Sobolev space.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;

use crate::error::{invalid, unsupported, violation, Result};
use crate::fooling::{BoundKind, Certificate};
use crate::math;
use crate::numerics::{self, QuadSettings};
use crate::spaces::{SpaceKind, SpaceSpec, WcDecomposition};

type Fn1 = Box<dyn Fn(f64) -> f64 + Send + Sync>;
type Fn2 = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Margin inside which the strict norm/integral inequalities are treated as
/// violated (guards against certifying from round-off).
const STRICT_SLACK: f64 = 1e-10;

/// A family of nonnegative splines s_y matching h1 at y, with evaluators for
/// the space norm and the integral of each member.
pub struct SplineFamily {
    domain: (f64, f64),
    eval: Fn2,
    norm: Fn1,
    integral: Fn1,
    h1: Fn1,
    norm_h1: f64,
    i_h1: f64,
}

impl SplineFamily {
    /// Checks nonnegativity and the interpolation condition s_y(y) = h1(y)
    /// on a coarse grid before accepting the family.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        domain: (f64, f64),
        eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        norm: impl Fn(f64) -> f64 + Send + Sync + 'static,
        integral: impl Fn(f64) -> f64 + Send + Sync + 'static,
        h1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        norm_h1: f64,
        i_h1: f64,
    ) -> Result<Self> {
        if !(domain.0 < domain.1) {
            return Err(invalid("family domain must be a nonempty interval"));
        }
        if !(norm_h1 > 0.0 && i_h1 > 0.0) {
            return Err(invalid("norm and integral of h1 must be positive"));
        }
        let step = (domain.1 - domain.0) / 40.0;
        for i in 0..=40 {
            let y = domain.0 + step * i as f64;
            if math::abs(eval(y, y) - h1(y)) > 1e-10 {
                return Err(violation(alloc::format!(
                    "family does not interpolate h1 at y = {y}"
                )));
            }
            for j in 0..=40 {
                let x = domain.0 + step * j as f64;
                if eval(y, x) < 0.0 {
                    return Err(violation(alloc::format!(
                        "family member s_y is negative at (y, x) = ({y}, {x})"
                    )));
                }
            }
        }
        Ok(Self {
            domain,
            eval: Box::new(eval),
            norm: Box::new(norm),
            integral: Box::new(integral),
            h1: Box::new(h1),
            norm_h1,
            i_h1,
        })
    }

    pub fn evaluate(&self, y: f64, x: f64) -> f64 {
        (self.eval)(y, x)
    }

    pub fn norm_of(&self, y: f64) -> f64 {
        (self.norm)(y)
    }

    pub fn integral_of(&self, y: f64) -> f64 {
        (self.integral)(y)
    }

    pub fn h1_at(&self, y: f64) -> f64 {
        (self.h1)(y)
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn norm_h1(&self) -> f64 {
        self.norm_h1
    }

    pub fn i_h1(&self) -> f64 {
        self.i_h1
    }
}

/// The constants a spline family certifies: the maximal member norm and
/// integral, the corresponding h1 quantities, and the per-dimension rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositiveConstants {
    /// max_y of the member norm; strictly below norm_h1.
    pub alpha: f64,
    /// max_y of the member integral; strictly below i_h1.
    pub beta: f64,
    pub norm_h1: f64,
    pub i_h1: f64,
    /// min(norm_h1/alpha, i_h1/beta) > 1.
    pub c_tilde: f64,
}

impl PositiveConstants {
    fn derive(alpha: f64, beta: f64, norm_h1: f64, i_h1: f64) -> Result<Self> {
        if !(alpha < norm_h1 - STRICT_SLACK) {
            return Err(violation(alloc::format!(
                "not a valid majorant family: max member norm {alpha} does not stay \
                 strictly below the h1 norm {norm_h1}"
            )));
        }
        if !(beta < i_h1 - STRICT_SLACK) {
            return Err(violation(alloc::format!(
                "not a valid majorant family: max member integral {beta} does not \
                 stay strictly below the h1 integral {i_h1}"
            )));
        }
        Ok(Self {
            alpha,
            beta,
            norm_h1,
            i_h1,
            c_tilde: (norm_h1 / alpha).min(i_h1 / beta),
        })
    }
}

/// Maximize the member norm and integral over the family domain and derive
/// the rate constant; errors when either strict inequality fails at the
/// computed maxima.
pub fn constants_from_family(fam: &SplineFamily, grid_points: usize) -> Result<PositiveConstants> {
    let (lo, hi) = fam.domain;
    let tol = numerics::DEFAULT_REFINE_TOL;
    let alpha = numerics::maximize_1d(|y| fam.norm_of(y), lo, hi, grid_points, tol)?.value;
    let beta = numerics::maximize_1d(|y| fam.integral_of(y), lo, hi, grid_points, tol)?.value;
    PositiveConstants::derive(alpha, beta, fam.norm_h1, fam.i_h1)
}

fn validate_finite_q(q: f64) -> Result<f64> {
    if !(q.is_finite() && q > 1.0) {
        return Err(unsupported(
            "positive-rule constants are established for finite q in (1, inf) only",
        ));
    }
    Ok(q)
}

/// Largest admissible curvature for the quadratic family at exponent q.
pub fn p2_curvature_limit(q: f64) -> Result<f64> {
    let q = validate_finite_q(q)?;
    // u_q = (1/(12 2^q) (q+1)/(q+2))^{1/(q-1)}, in logs for large q.
    let ln_u = (-math::ln(12.0) - q * core::f64::consts::LN_2 + math::ln((q + 1.0) / (q + 2.0)))
        / (q - 1.0);
    Ok(math::exp(ln_u))
}

/// Norm-power bound 1 - c/12 + (2c)^q (q+2)/(q+1) for the quadratic family.
fn p2_norm_power_bound(q: f64, c: f64) -> f64 {
    1.0 - c / 12.0 + math::exp(q * math::ln(2.0 * c)) * (q + 2.0) / (q + 1.0)
}

/// Rate achieved by the quadratic family at curvature c (the norm route is
/// always the binding one).
pub fn p2_rate_at(q: f64, c: f64) -> Result<f64> {
    let q = validate_finite_q(q)?;
    let u = p2_curvature_limit(q)?;
    if !(c > 0.0 && c < u) {
        return Err(invalid(alloc::format!(
            "curvature must lie in (0, u_q) = (0, {u})"
        )));
    }
    Ok(math::powf(p2_norm_power_bound(q, c), -1.0 / q))
}

/// Constants for integration of degree-2 polynomials via the family
/// s_y(x) = 1 - c (y - x)^2 at the optimal curvature
/// c* = u_q / q^{1/(q-1)}: alpha is the norm bound at c*, beta = 1 - c*/12.
pub fn p2_constants(q: f64) -> Result<PositiveConstants> {
    let q = validate_finite_q(q)?;
    let u = p2_curvature_limit(q)?;
    let c_star = u * math::exp(-math::ln(q) / (q - 1.0));
    let power = p2_norm_power_bound(q, c_star);
    let alpha = math::powf(power, 1.0 / q);
    let beta = 1.0 - c_star / 12.0;
    PositiveConstants::derive(alpha, beta, 1.0, 1.0)
}

/// The quadratic family itself, with the norm evaluated by direct quadrature
/// (the closed-form route in [`p2_constants`] uses the analytic upper
/// bound; the quadrature norm certifies that the bound dominates).
pub fn p2_family(q: f64, c: f64, settings: &QuadSettings) -> Result<SplineFamily> {
    let q = validate_finite_q(q)?;
    settings.validate()?;
    if !(c > 0.0 && c < 0.5) {
        return Err(invalid("curvature must lie in (0, 1/2) for nonnegativity"));
    }
    let s = *settings;
    let norm = move |y: f64| {
        let v0 = numerics::integrate(|x| math::powf(1.0 - c * (y - x) * (y - x), q), 0.0, 1.0, &s)
            .unwrap_or(f64::NAN);
        let v1 = numerics::integrate(
            |x| math::powf(math::abs(2.0 * c * (y - x)), q),
            0.0,
            1.0,
            &s,
        )
        .unwrap_or(f64::NAN);
        let v2 = math::powf(2.0 * c, q);
        math::powf(v0 + v1 + v2, 1.0 / q)
    };
    let integral = move |y: f64| {
        numerics::integrate(|x| 1.0 - c * (y - x) * (y - x), 0.0, 1.0, &s).unwrap_or(f64::NAN)
    };
    SplineFamily::new(
        (0.0, 1.0),
        move |y, x| 1.0 - c * (y - x) * (y - x),
        norm,
        integral,
        |_| 1.0,
        1.0,
        1.0,
    )
}

fn require_no_anchor(dec: &WcDecomposition) -> Result<(SpaceSpec, f64)> {
    let spec = dec
        .space()
        .copied()
        .ok_or_else(|| unsupported("the decomposable-part route needs a cube-domain space"))?;
    if spec.kind != SpaceKind::NoAnchorSobolev {
        return Err(unsupported(
            "the decomposable-part route is implemented for the no-anchor Sobolev \
             space (the only in-scope space with the required norm machinery)",
        ));
    }
    let q = match spec.q {
        crate::spaces::Exponent::Finite(q) => q,
        crate::spaces::Exponent::Infinity => {
            return Err(unsupported(
                "positive-rule constants are established for finite q only",
            ))
        }
    };
    Ok((spec, q))
}

/// Norm of the smooth part plus one side part:
/// (|1|^q + integral of |h1'|^q over that side)^{1/q}.
fn side_norm(
    dec: &WcDecomposition,
    q: f64,
    side: (f64, f64),
    settings: &QuadSettings,
) -> Result<f64> {
    let power = numerics::integrate(
        |x| math::powf(math::abs(dec.h1_deriv_r(x)), q),
        side.0,
        side.1,
        settings,
    )?;
    Ok(math::powf(1.0 + power, 1.0 / q))
}

/// Constants from the nonnegative decomposable-part route: alpha is the
/// larger of the two smooth-plus-side norms, beta the smooth integral plus
/// the larger part integral.
pub fn dp_plus_constants(
    dec: &WcDecomposition,
    settings: &QuadSettings,
) -> Result<PositiveConstants> {
    settings.validate()?;
    let (spec, q) = require_no_anchor(dec)?;
    if !(dec.i0 > 0.0 && dec.i1 > 0.0) {
        return Err(violation("both part integrals must be positive"));
    }
    // Nonnegativity of the parts on a grid.
    for i in 0..=1000 {
        let x = i as f64 / 1000.0;
        if dec.h1_part0(x) < -1e-14 || dec.h1_part1(x) < -1e-14 || dec.h1_smooth(x) < -1e-14 {
            return Err(violation(alloc::format!(
                "decomposition parts must be nonnegative; violated at x = {x}"
            )));
        }
    }
    let a = spec.a;
    let n0 = side_norm(dec, q, (0.0, a), settings)?;
    let n1 = side_norm(dec, q, (a, 1.0), settings)?;
    let alpha = n0.max(n1);
    if !(alpha < dec.norm_h1 - STRICT_SLACK) {
        return Err(violation(alloc::format!(
            "smooth-plus-side norm {alpha} does not stay strictly below the h1 \
             norm {}",
            dec.norm_h1
        )));
    }
    let beta = dec.alpha1() + dec.i0.max(dec.i1);
    PositiveConstants::derive(alpha, beta, dec.norm_h1, dec.integral())
}

/// Side-selection family realizing the decomposable-part constants: s_y is
/// the smooth part plus the part on y's side of the decomposition point.
pub fn w1_family(dec: &WcDecomposition, settings: &QuadSettings) -> Result<SplineFamily> {
    settings.validate()?;
    let (spec, q) = require_no_anchor(dec)?;
    let a = spec.a;
    let dec0 = dec.clone();
    let dec1 = dec.clone();
    let dec2 = dec.clone();
    let dec3 = dec.clone();
    let s = *settings;
    let member = move |y: f64, x: f64| {
        if y <= a {
            1.0 + dec0.h1_part0(x)
        } else {
            1.0 + dec0.h1_part1(x)
        }
    };
    let norm = move |y: f64| {
        let side = if y <= a { (0.0, a) } else { (a, 1.0) };
        side_norm(&dec1, q, side, &s).unwrap_or(f64::NAN)
    };
    let integral = move |y: f64| {
        let part = if y <= a { dec2.i0 } else { dec2.i1 };
        1.0 + part
    };
    SplineFamily::new(
        (0.0, 1.0),
        member,
        norm,
        integral,
        move |y| dec3.h1(y),
        dec.norm_h1,
        dec.integral(),
    )
}

/// Certified lower bound for any rule with nonnegative weights on n nodes:
/// normalized form (1 - n (beta/I)^d)_+ / (2 max(1, n (alpha/norm)^d)).
pub fn positive_rule_bound(consts: &PositiveConstants, n: u64, d: u32) -> Result<Certificate> {
    if d < 1 {
        return Err(invalid("dimension must be >= 1"));
    }
    let nf = n as f64;
    let x = nf * math::powi(consts.beta / consts.i_h1, d as i32);
    let y = nf * math::powi(consts.alpha / consts.norm_h1, d as i32);
    let normalized = (1.0 - x).max(0.0) / (2.0 * y.max(1.0));
    let e0d = math::powi(consts.i_h1 / consts.norm_h1, d as i32);
    let mut constants = BTreeMap::new();
    constants.insert("alpha", consts.alpha);
    constants.insert("beta", consts.beta);
    constants.insert("norm_h1", consts.norm_h1);
    constants.insert("i_h1", consts.i_h1);
    constants.insert("c_tilde", consts.c_tilde);
    Ok(Certificate {
        bound_absolute: normalized * e0d,
        bound_normalized: normalized,
        theorem: BoundKind::Thm5,
        n_nodes: n as usize,
        d: d as usize,
        constants,
    })
}
