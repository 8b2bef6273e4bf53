//! Shared 1-D numerical primitives: adaptive quadrature on finite intervals,
//! tail-truncated quadrature on the real line, and grid-plus-golden-section
//! maximization.
//!
//! The quadrature is an adaptive bisection scheme driven by the embedded
//! 10/21-point Gauss–Kronrod error estimate: the interval with the largest
//! estimated error is split until the global estimate meets the tolerance or
//! the subdivision budget runs out. Integrands with a known kink should go
//! through [`integrate_piecewise`] so each piece is smooth.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{invalid, Error, Result};
use crate::math;

/// Tolerances and budgets for the quadrature routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings {
    /// Absolute tolerance on the integral estimate.
    pub abs_tol: f64,
    /// Relative tolerance on the integral estimate.
    pub rel_tol: f64,
    /// Maximum number of interval bisections per call.
    pub max_subdivisions: u32,
    /// Half-width T of the truncation window used for real-line integrals.
    pub tail_cutoff: f64,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 10_000,
            tail_cutoff: 12.0,
        }
    }
}

impl QuadSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) {
            return Err(invalid("abs_tol must be > 0"));
        }
        if !(self.rel_tol >= 0.0) {
            return Err(invalid("rel_tol must be >= 0"));
        }
        if self.max_subdivisions < 1 {
            return Err(invalid("max_subdivisions must be >= 1"));
        }
        if !(self.tail_cutoff > 0.0) {
            return Err(invalid("tail_cutoff must be > 0"));
        }
        Ok(())
    }

    /// Same settings with a scaled absolute tolerance (floored to keep
    /// nested quadratures from chasing noise below machine precision).
    pub(crate) fn with_abs_tol(&self, abs_tol: f64) -> Self {
        Self {
            abs_tol: abs_tol.max(5e-15),
            ..*self
        }
    }
}

/// Default scan density for [`maximize_1d`]: dense enough that the
/// piecewise-smooth objectives in this crate have their best cell captured.
pub const DEFAULT_GRID_POINTS: usize = 2001;
/// Default bracket tolerance for [`maximize_1d`].
pub const DEFAULT_REFINE_TOL: f64 = 1e-12;

/// Result of a 1-D maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxResult {
    /// Location of the best value found.
    pub argmax: f64,
    /// Objective value at `argmax`.
    pub value: f64,
    /// Width of the final golden-section bracket.
    pub bracket_width: f64,
}

// 10-point Gauss / 21-point Kronrod pair (QUADPACK dqk21 constants).
#[allow(clippy::excessive_precision)]
const XGK21: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG10: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK21: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One Gauss–Kronrod panel: returns (estimate, error estimate).
fn qk21<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let f_center = f(center);

    let mut res_gauss = 0.0;
    let mut res_kronrod = f_center * WGK21[10];
    let mut res_abs = math::abs(res_kronrod);
    let mut fv = [0.0f64; 21];
    fv[20] = f_center;

    for j in 0..10 {
        let x = half * XGK21[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[10 + j] = f2;
        let fsum = f1 + f2;
        if j % 2 == 1 {
            res_gauss += WG10[j / 2] * fsum;
        }
        res_kronrod += WGK21[j] * fsum;
        res_abs += WGK21[j] * (math::abs(f1) + math::abs(f2));
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK21[10] * math::abs(f_center - mean);
    for j in 0..10 {
        res_asc += WGK21[j] * (math::abs(fv[j] - mean) + math::abs(fv[10 + j] - mean));
    }

    let result = res_kronrod * half;
    res_abs *= math::abs(half);
    res_asc *= math::abs(half);

    let mut err = math::abs((res_kronrod - res_gauss) * half);
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (math::powf(200.0 * err / res_asc, 1.5)).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (result, err)
}

struct Panel {
    err: f64,
    seq: u64,
    lo: f64,
    hi: f64,
    val: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal && self.seq == other.seq
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then(self.seq.cmp(&other.seq))
    }
}

/// Adaptive integral of `f` over `[lo, hi]`.
///
/// Deterministic for fixed inputs. Fails with [`Error::Budget`] (carrying the
/// best estimate and its residual) when `max_subdivisions` bisections do not
/// reach `abs_tol + rel_tol * |integral|`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    settings: &QuadSettings,
) -> Result<f64> {
    settings.validate()?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(invalid("integration bounds must be finite"));
    }
    if lo > hi {
        return Err(invalid("integration requires lo <= hi"));
    }
    if lo == hi {
        return Ok(0.0);
    }

    let (val, err) = qk21(&f, lo, hi);
    if !val.is_finite() {
        return Err(invalid("integrand produced a non-finite value"));
    }

    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        err,
        seq: 0,
        lo,
        hi,
        val,
    });
    let mut total_val = val;
    let mut total_err = err;
    let mut seq = 0u64;

    for _ in 0..settings.max_subdivisions {
        if total_err
            <= settings
                .abs_tol
                .max(settings.rel_tol * math::abs(total_val))
        {
            return Ok(total_val);
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Interval at floating-point resolution; nothing left to split.
            heap.push(worst);
            break;
        }
        let (v1, e1) = qk21(&f, worst.lo, mid);
        let (v2, e2) = qk21(&f, mid, worst.hi);
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(invalid("integrand produced a non-finite value"));
        }
        total_val += v1 + v2 - worst.val;
        total_err += e1 + e2 - worst.err;
        seq += 1;
        heap.push(Panel {
            err: e1,
            seq,
            lo: worst.lo,
            hi: mid,
            val: v1,
        });
        seq += 1;
        heap.push(Panel {
            err: e2,
            seq,
            lo: mid,
            hi: worst.hi,
            val: v2,
        });
    }

    if total_err
        <= settings
            .abs_tol
            .max(settings.rel_tol * math::abs(total_val))
    {
        Ok(total_val)
    } else {
        Err(Error::Budget {
            what: "quadrature subdivision",
            estimate: total_val,
            residual: total_err,
        })
    }
}

/// Integral over `[breakpoints[0], breakpoints[last]]`, evaluated piece by
/// piece between consecutive breakpoints so each piece is smooth.
pub fn integrate_piecewise<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    settings: &QuadSettings,
) -> Result<f64> {
    if breakpoints.len() < 2 {
        return Err(invalid(
            "integrate_piecewise needs at least two breakpoints",
        ));
    }
    if breakpoints.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("breakpoints must be sorted ascending"));
    }
    let mut acc = math::KahanSum::new();
    for w in breakpoints.windows(2) {
        acc.add(integrate(&f, w[0], w[1], settings)?);
    }
    Ok(acc.value())
}

/// Integral of `f` over the real line, truncated to
/// `[-tail_cutoff, tail_cutoff]`. The caller is responsible for the tail
/// beyond the cutoff being negligible.
pub fn integrate_real_line<F: Fn(f64) -> f64>(f: F, settings: &QuadSettings) -> Result<f64> {
    let t = settings.tail_cutoff;
    integrate(f, -t, t, settings)
}

/// Maximize `f` on `[lo, hi]`: a scan over `grid_points` equispaced samples
/// followed by golden-section refinement of the best grid cell.
///
/// The returned value is never worse than the best grid sample. The result is
/// the global maximum only when the grid captures the maximizer's cell.
pub fn maximize_1d<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    grid_points: usize,
    refine_tol: f64,
) -> Result<MaxResult> {
    if !(hi > lo) {
        return Err(invalid("maximize_1d requires hi > lo"));
    }
    if grid_points < 3 {
        return Err(invalid("maximize_1d requires grid_points >= 3"));
    }
    if !(refine_tol > 0.0) {
        return Err(invalid("maximize_1d requires refine_tol > 0"));
    }

    let step = (hi - lo) / (grid_points - 1) as f64;
    let mut best_x = lo;
    let mut best_v = f64::NEG_INFINITY;
    let mut best_i = 0usize;
    for i in 0..grid_points {
        let x = if i + 1 == grid_points {
            hi
        } else {
            lo + step * i as f64
        };
        let v = f(x);
        if v > best_v {
            best_v = v;
            best_x = x;
            best_i = i;
        }
    }

    // Bracket around the winning cell and refine.
    let mut a = if best_i == 0 {
        lo
    } else {
        lo + step * (best_i - 1) as f64
    };
    let mut b = if best_i + 1 >= grid_points {
        hi
    } else {
        lo + step * (best_i + 1) as f64
    };
    a = a.max(lo);
    b = b.min(hi);

    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let track = |x: f64, v: f64, bx: &mut f64, bv: &mut f64| {
        if v > *bv {
            *bv = v;
            *bx = x;
        }
    };
    track(c, fc, &mut best_x, &mut best_v);
    track(d, fd, &mut best_x, &mut best_v);

    let mut iters = 0u32;
    while b - a > refine_tol && iters < 200 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            track(c, fc, &mut best_x, &mut best_v);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            track(d, fd, &mut best_x, &mut best_v);
        }
        iters += 1;
    }

    Ok(MaxResult {
        argmax: best_x,
        value: best_v,
        bracket_width: b - a,
    })
}

/// Collects sorted, deduplicated breakpoints for piecewise integration.
pub(crate) fn sorted_breakpoints(endpoints: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = endpoints.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
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

    fn phi(t: f64) -> f64 {
        (-0.5 * t * t).exp() / (2.0 * core::f64::consts::PI).sqrt()
    }

    #[test]
    fn constant_integrand() {
        assert!((integrate(|_| 1.0, 0.0, 1.0, &S).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn monomial() {
        assert!((integrate(|x| x * x, 0.0, 1.0, &S).unwrap() - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn worst_case_function_r1_half_anchor() {
        // h1 for smoothness 1, conjugate exponent 2, anchor 1/2; its integral
        // is (a^{p+1} + (1-a)^{p+1})/(p+1) = 1/12.
        let h1 = |x: f64| {
            if x < 0.5 {
                (0.25 - x * x) / 2.0
            } else {
                (0.25 - (1.0 - x) * (1.0 - x)) / 2.0
            }
        };
        let v = integrate(h1, 0.0, 1.0, &S).unwrap();
        assert!((v - 1.0 / 12.0).abs() < 1e-10);
        let vp = integrate_piecewise(h1, &[0.0, 0.5, 1.0], &S).unwrap();
        assert!((vp - 1.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn real_line_normal_density() {
        let v = integrate_real_line(phi, &S).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn real_line_odd_function() {
        let v = integrate_real_line(|t| t * phi(t), &S).unwrap();
        assert!(v.abs() < 1e-10);
    }

    #[test]
    fn gaussian_second_moment_vs_erf_oracle() {
        // Oracle: antiderivative of t^2 phi(t) is Phi(t) - t phi(t), so the
        // truncated integral is erf(T/sqrt(2)) - 2 T phi(T).
        let t = S.tail_cutoff;
        let expected = libm::erf(t / core::f64::consts::SQRT_2) - 2.0 * t * phi(t);
        let v = integrate_real_line(|t| t * t * phi(t), &S).unwrap();
        assert!((v - expected).abs() < 1e-10);
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn even_function_halves() {
        let full = integrate_real_line(|t| t.cos() * phi(t), &S).unwrap();
        let half = integrate(|t| t.cos() * phi(t), 0.0, S.tail_cutoff, &S).unwrap();
        assert!((full - 2.0 * half).abs() < 2e-10);
    }

    #[test]
    fn additivity_over_split() {
        let f = |x: f64| (3.0 * x).sin() + x * x;
        let whole = integrate(f, 0.0, 2.0, &S).unwrap();
        for m in [0.1, 0.7, 1.3, 1.999] {
            let a = integrate(f, 0.0, m, &S).unwrap();
            let b = integrate(f, m, 2.0, &S).unwrap();
            assert!((whole - a - b).abs() < 2e-10);
        }
    }

    #[test]
    fn linearity() {
        let f = |x: f64| x.exp();
        let g = |x: f64| (5.0 * x).cos();
        let (al, be) = (2.5, -1.25);
        let lhs = integrate(|x| al * f(x) + be * g(x), 0.0, 1.0, &S).unwrap();
        let rhs =
            al * integrate(f, 0.0, 1.0, &S).unwrap() + be * integrate(g, 0.0, 1.0, &S).unwrap();
        assert!((lhs - rhs).abs() < 3e-10);
    }

    #[test]
    fn budget_exhaustion_carries_estimate() {
        let tight = QuadSettings {
            abs_tol: 1e-14,
            rel_tol: 0.0,
            max_subdivisions: 4,
            tail_cutoff: 12.0,
        };
        match integrate(|x: f64| x.abs().powf(-0.9), 1e-300, 1.0, &tight) {
            Err(Error::Budget {
                estimate, residual, ..
            }) => {
                assert!(estimate.is_finite());
                assert!(residual > 0.0);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn invalid_bounds_rejected() {
        assert!(integrate(|_| 1.0, 1.0, 0.0, &S).is_err());
        assert_eq!(integrate(|_| 1.0, 2.0, 2.0, &S).unwrap(), 0.0);
    }

    #[test]
    fn maximize_quadratic_vertex() {
        let r = maximize_1d(|y| 1.0 - (y - 0.3) * (y - 0.3), 0.0, 1.0, 101, 1e-12).unwrap();
        assert!((r.argmax - 0.3).abs() < 1e-6);
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(r.bracket_width <= 1e-10 || r.bracket_width <= 1e-12 * 200.0);
    }

    #[test]
    fn maximize_spline_integral_objective() {
        // max over [0,1] of 1 - c (y^2 - y + 1/3) at c = 0.1 is 1 - c/12.
        let c = 0.1;
        let r = maximize_1d(|y| 1.0 - c * (y * y - y + 1.0 / 3.0), 0.0, 1.0, 2001, 1e-12).unwrap();
        assert!((r.value - (1.0 - c / 12.0)).abs() < 1e-12);
        assert!((r.argmax - 0.5).abs() < 1e-6);
    }

    #[test]
    fn maximize_oscillatory_vs_dense_grid_oracle() {
        let f = |y: f64| (10.0 * y).sin();
        let r = maximize_1d(f, 0.0, 1.0, 101, 1e-12).unwrap();
        let mut grid_best = f64::NEG_INFINITY;
        for i in 0..=1_000_000 {
            grid_best = grid_best.max(f(i as f64 / 1e6));
        }
        assert!((r.value - 1.0).abs() < 1e-8);
        assert!(r.value >= grid_best - 1e-9);
    }

    #[test]
    fn maximize_never_below_grid_scan() {
        let f = |y: f64| (37.0 * y).sin() + 0.3 * (5.0 * y).cos();
        let n = 101;
        let r = maximize_1d(f, 0.0, 1.0, n, 1e-12).unwrap();
        let mut scan_best = f64::NEG_INFINITY;
        for i in 0..n {
            scan_best = scan_best.max(f(i as f64 / (n - 1) as f64));
        }
        assert!(r.value >= scan_best);
    }
}
