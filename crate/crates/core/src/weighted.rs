//! Density-weighted integration over the real line: symmetric densities, the
//! tail kernel, the worst-case function via nested cumulative integration,
//! and the finiteness check for the defining iterated integral.
//!
//! The r-fold nested integral defining the worst-case function is evaluated
//! as r successive cumulative-integral passes on a fixed grid over
//! `[0, tail_cutoff]` with monotone cubic interpolation between passes; the
//! direct kernel quadrature acts as the independent oracle in tests.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{invalid, violation, Result};
use crate::interp::MonotoneCubic;
use crate::math;
use crate::numerics::{self, QuadSettings};
use crate::spaces::{factorial, Domain, Exponent, PartsRepr, Source, WcDecomposition};

/// Number of grid nodes for the cumulative-integral passes.
const WC_GRID: usize = 4097;
/// Coarser grid for the finiteness check (only needs three digits).
const CONDITION_GRID: usize = 1025;
/// Cutoff ladder length for the finiteness check: T, 2T, 4T, 8T.
const CONDITION_DOUBLINGS: usize = 3;

type Density = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A symmetric probability density together with the smoothness and norm
/// exponent of the function space it is paired with.
pub struct WeightedSpec {
    r: u32,
    q: Exponent,
    density: Density,
    name: String,
}

impl WeightedSpec {
    /// Validates symmetry on a grid and unit mass (the latter over a wide
    /// window so slowly decaying tails are judged fairly).
    pub fn new(
        r: u32,
        q: Exponent,
        density: impl Fn(f64) -> f64 + Send + Sync + 'static,
        name: impl Into<String>,
        settings: &QuadSettings,
    ) -> Result<Self> {
        settings.validate()?;
        if r < 1 {
            return Err(invalid("smoothness r must be >= 1"));
        }
        if let Exponent::Finite(q) = q {
            if !(q.is_finite() && q > 1.0) {
                return Err(invalid("norm exponent q must lie in (1, inf]"));
            }
        }
        let t = settings.tail_cutoff;
        for i in 0..=100 {
            let x = t * i as f64 / 100.0;
            if math::abs(density(x) - density(-x)) > 1e-12 {
                return Err(violation(alloc::format!(
                    "density is not symmetric around 0 at x = {x}"
                )));
            }
        }
        // Mass over a wide window, split at the tail cutoff so compactly
        // supported densities integrate exactly.
        const WIDE: f64 = 1e8;
        let mass =
            numerics::integrate_piecewise(&density, &[-WIDE, -t, -1.0, 1.0, t, WIDE], settings)?;
        if math::abs(mass - 1.0) > 1e-8 {
            return Err(violation(alloc::format!(
                "density mass over [-1e8, 1e8] is {mass}, expected 1"
            )));
        }
        Ok(Self {
            r,
            q,
            density: Box::new(density),
            name: name.into(),
        })
    }

    /// The standard normal density.
    pub fn std_normal(r: u32, q: Exponent, settings: &QuadSettings) -> Result<Self> {
        let two_pi = 2.0 * core::f64::consts::PI;
        Self::new(
            r,
            q,
            move |x| math::exp(-0.5 * x * x) / math::sqrt(two_pi),
            "std-normal",
            settings,
        )
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> Exponent {
        self.q
    }

    /// Hölder conjugate of q.
    pub fn p(&self) -> f64 {
        self.q.holder_conjugate()
    }

    pub fn density(&self, x: f64) -> f64 {
        (self.density)(x)
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl core::fmt::Debug for WeightedSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("WeightedSpec")
            .field("r", &self.r)
            .field("q", &self.q)
            .field("density", &self.name)
            .finish()
    }
}

/// Grid-backed even worst-case function over the real line.
#[derive(Debug, Clone)]
pub(crate) struct SymmetricWc {
    h: MonotoneCubic,
    v0: MonotoneCubic,
    r: u32,
}

impl SymmetricWc {
    /// h1 is even; evaluation clamps beyond the cutoff to the boundary value.
    pub fn h1(&self, t: f64) -> f64 {
        self.h.eval(math::abs(t))
    }

    /// r-th derivative: the kernel power on the right half line, reflected
    /// with sign (-1)^r on the left.
    pub fn deriv_r(&self, t: f64) -> f64 {
        let mag = self.v0.eval(math::abs(t));
        if t < 0.0 && self.r % 2 == 1 {
            -mag
        } else {
            mag
        }
    }
}

/// Tail kernel of the weighted problem: for t >= 0 the integral of
/// (x - t)^{r-1}/(r-1)! against the density over [t, cutoff]; extended to
/// t < 0 by the reflection (-1)^r at -t.
pub fn psi_kernel(spec: &WeightedSpec, t: f64, settings: &QuadSettings) -> Result<f64> {
    if t < 0.0 {
        let v = psi_kernel(spec, -t, settings)?;
        let sign = if spec.r % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(sign * v);
    }
    kernel_nonneg(spec, t, settings.tail_cutoff, settings)
}

fn kernel_nonneg(spec: &WeightedSpec, t: f64, cutoff: f64, settings: &QuadSettings) -> Result<f64> {
    if t >= cutoff {
        return Ok(0.0);
    }
    let rm1 = (spec.r - 1) as i32;
    let rfact = factorial(spec.r - 1);
    numerics::integrate_piecewise(
        |x| math::powi(x - t, rm1) / rfact * spec.density(x),
        &geometric_ladder(t, cutoff),
        settings,
    )
}

/// Breakpoints t, t+1, t+2, t+4, ... capped at `hi`: adaptive quadrature on
/// a single huge interval can overlook integrands concentrated near the left
/// edge, so long tails are fed to it piecewise.
fn geometric_ladder(lo: f64, hi: f64) -> Vec<f64> {
    let mut cuts = alloc::vec![lo];
    let mut width = 1.0;
    let mut x = lo + width;
    while x < hi {
        cuts.push(x);
        x += width;
        width *= 2.0;
    }
    cuts.push(hi);
    cuts
}

/// One cumulative-pass construction of h1 on [0, cutoff]: grid the kernel
/// power, then integrate from 0 r times.
fn build_symmetric_wc(
    spec: &WeightedSpec,
    cutoff: f64,
    grid: usize,
    settings: &QuadSettings,
) -> Result<SymmetricWc> {
    let p = spec.p();
    let h = cutoff / (grid - 1) as f64;
    let mut v0 = Vec::with_capacity(grid);
    for i in 0..grid {
        let t = h * i as f64;
        let k = kernel_nonneg(spec, t, cutoff, settings)?;
        v0.push(math::powf(k.max(0.0), p - 1.0));
    }
    let v0_interp = MonotoneCubic::fit_uniform(0.0, h, v0);
    let mut layer = v0_interp.clone();
    for _ in 0..spec.r {
        layer = MonotoneCubic::fit_uniform(0.0, h, layer.cumulative());
    }
    Ok(SymmetricWc {
        h: layer,
        v0: v0_interp,
        r: spec.r,
    })
}

/// Worst-case function for the weighted problem, as a decomposition over the
/// real line with decomposition point 0: both part integrals equal half the
/// integral of h1 against the density, so alpha is exactly 1/2.
pub fn worst_case_function_weighted(
    spec: &WeightedSpec,
    settings: &QuadSettings,
) -> Result<WcDecomposition> {
    settings.validate()?;
    let check = check_condition(spec, settings)?;
    if !check.stable_within(1e-3) {
        return Err(violation(
            "the truncated iterated integral defining the worst-case function \
             does not stabilize under cutoff doubling; increase tail_cutoff or \
             use a lighter-tailed density",
        ));
    }
    let cutoff = settings.tail_cutoff;
    let wc = build_symmetric_wc(spec, cutoff, WC_GRID, settings)?;

    let i_half = numerics::integrate(|t| wc.h1(t) * spec.density(t), 0.0, cutoff, settings)?;
    if !(i_half > 0.0) {
        return Err(violation(
            "integral of h1 against the density must be positive",
        ));
    }
    let norm = match spec.q {
        Exponent::Finite(q) => {
            let power =
                numerics::integrate(|t| math::powf(wc.v0.eval(t), q), 0.0, cutoff, settings)?;
            math::powf(2.0 * power, 1.0 / q)
        }
        Exponent::Infinity => {
            numerics::maximize_1d(|t| wc.v0.eval(t), 0.0, cutoff, 10_001, 1e-12)?.value
        }
    };
    let p = spec.p();
    Ok(WcDecomposition {
        parts: PartsRepr::SymmetricGrid(wc),
        source: Source::RealLine { r: spec.r, p },
        a: 0.0,
        i0: i_half,
        i1: i_half,
        i_smooth: 0.0,
        norm_h1: norm,
        initial_error_1d: 2.0 * i_half / norm,
        domain: Domain::RealLine { cutoff },
    })
}

/// Truncated evaluations of the iterated integral that must be finite for
/// the weighted problem to be well posed, on the cutoff ladder T, 2T, ...
#[derive(Debug, Clone)]
pub struct ConditionCheck {
    /// Value at the base cutoff T.
    pub value: f64,
    /// (cutoff, value) along the doubling ladder.
    pub evaluations: Vec<(f64, f64)>,
}

impl ConditionCheck {
    /// True when the last two ladder values agree to the given relative
    /// tolerance; callers treat this as the pass condition.
    pub fn stable_within(&self, rtol: f64) -> bool {
        let n = self.evaluations.len();
        if n < 2 {
            return false;
        }
        let (_, a) = self.evaluations[n - 2];
        let (_, b) = self.evaluations[n - 1];
        math::abs(b - a) <= rtol * math::abs(b).max(1e-300)
    }
}

/// Evaluate the defining iterated integral with outer cutoff `tail_cutoff`,
/// then re-evaluate under cutoff doubling. Fails when the value grows more
/// than tenfold along the ladder (divergence); slow growth is reported via
/// [`ConditionCheck::stable_within`].
pub fn check_condition(spec: &WeightedSpec, settings: &QuadSettings) -> Result<ConditionCheck> {
    settings.validate()?;
    let scale = math::powf(factorial(spec.r - 1), spec.p() - 1.0);
    let mut evaluations = Vec::new();
    let mut cutoff = settings.tail_cutoff;
    for k in 0..=CONDITION_DOUBLINGS {
        // Keep the grid spacing fixed while the window doubles, so ladder
        // values differ only through genuine tail mass.
        let grid = (CONDITION_GRID - 1) * (1 << k) + 1;
        let wc = build_symmetric_wc(spec, cutoff, grid, settings)?;
        let v = scale
            * numerics::integrate_piecewise(
                |t| wc.h1(t) * spec.density(t),
                &geometric_ladder(0.0, cutoff),
                settings,
            )?;
        if !v.is_finite() {
            return Err(violation(
                "truncated iterated integral is non-finite; the density does not \
                 satisfy the finiteness condition",
            ));
        }
        evaluations.push((cutoff, v));
        cutoff *= 2.0;
    }
    let first = evaluations[0].1;
    let last = evaluations[evaluations.len() - 1].1;
    for w in evaluations.windows(2) {
        if math::abs(w[1].1) > 10.0 * math::abs(w[0].1).max(1e-300) {
            return Err(violation(alloc::format!(
                "truncated iterated integral grows more than tenfold under cutoff \
                 doubling ({} -> {}); the density does not satisfy the finiteness \
                 condition",
                w[0].1,
                w[1].1
            )));
        }
    }
    if math::abs(last) > 10.0 * math::abs(first).max(1e-300) {
        return Err(violation(alloc::format!(
            "truncated iterated integral grows more than tenfold across the cutoff \
             ladder ({first} at T -> {last} at {}T); the density does not satisfy \
             the finiteness condition",
            1u32 << CONDITION_DOUBLINGS
        )));
    }
    Ok(ConditionCheck {
        value: first,
        evaluations,
    })
}
