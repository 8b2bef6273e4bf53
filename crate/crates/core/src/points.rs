//! Node sets and nonnegative quadrature rules: generation and the anchor
//! transform. File I/O lives in the companion `cursekit` crate.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::math;

/// A finite list of d-dimensional nodes, optionally carrying nonnegative
/// quadrature weights. Cube-domain sets keep every coordinate in `[0, 1)`;
/// sets loaded from files may live on the whole real line.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    d: usize,
    coords: Vec<f64>,
    weights: Option<Vec<f64>>,
}

impl PointSet {
    /// Build from flattened coordinates (node-major) and optional weights.
    pub fn new(d: usize, coords: Vec<f64>, weights: Option<Vec<f64>>) -> Result<Self> {
        if d == 0 {
            return Err(invalid("dimension must be >= 1"));
        }
        if coords.len() % d != 0 {
            return Err(invalid(format!(
                "coordinate count {} is not a multiple of d={d}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(invalid("node coordinates must be finite"));
        }
        if let Some(w) = &weights {
            if w.len() * d != coords.len() {
                return Err(invalid("weight count must equal node count"));
            }
            if w.iter().any(|x| !(*x >= 0.0)) {
                return Err(invalid("weights must be nonnegative"));
            }
        }
        Ok(Self { d, coords, weights })
    }

    /// The empty node set in dimension `d` (models N = 0 queries).
    pub fn empty(d: usize) -> Self {
        Self {
            d,
            coords: Vec::new(),
            weights: None,
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn node(&self, k: usize) -> &[f64] {
        &self.coords[k * self.d..(k + 1) * self.d]
    }

    pub fn iter_nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d)
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// True when every coordinate lies in the half-open unit cube `[0, 1)`.
    pub fn in_unit_cube(&self) -> bool {
        self.coords.iter().all(|&c| (0.0..1.0).contains(&c))
    }

    pub(crate) fn require_unit_cube(&self) -> Result<()> {
        if self.in_unit_cube() {
            Ok(())
        } else {
            Err(invalid("point set has coordinates outside [0, 1)"))
        }
    }

    /// Projection to the coordinates selected by `mask` (bit j = coordinate
    /// j); the mask must select at least one coordinate.
    pub(crate) fn project(&self, mask: u64) -> PointSet {
        debug_assert!(mask != 0, "empty projections are handled by callers");
        let keep: Vec<usize> = (0..self.d).filter(|j| mask >> j & 1 == 1).collect();
        let mut coords = Vec::with_capacity(self.len() * keep.len());
        for node in self.iter_nodes() {
            for &j in &keep {
                coords.push(node[j]);
            }
        }
        PointSet {
            d: keep.len().max(1),
            coords,
            weights: self.weights.clone(),
        }
    }
}

/// SplitMix64: the stable seeded generator used everywhere randomness is
/// needed, chosen so any implementation language reproduces identical
/// streams. State update per draw:
///
/// ```text
/// state += 0x9E3779B97F4A7C15
/// z = state
/// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
/// z = (z ^ (z >> 27)) * 0x94D049BB133111EB
/// output = z ^ (z >> 31)
/// ```
///
/// Uniform doubles take the top 53 bits: `(output >> 11) * 2^-53`.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Node-set constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// I.i.d. uniform draws from the seeded generator.
    UniformRandom,
    /// Midpoints of the ceil(n^{1/d})^d axis-aligned lattice, truncated to n.
    Grid,
    /// Rank-1 lattice {k z / n mod 1} with z from a component-by-component
    /// search minimizing the L2 discrepancy anchored at 1/2.
    Rank1Lattice,
    /// Product of van der Corput sequences, coordinate j in base p_j
    /// (the j-th prime).
    VdcProduct,
}

/// Deterministic node-set generation; `seed` only affects `UniformRandom`.
pub fn generate(kind: GeneratorKind, d: usize, n: usize, seed: u64) -> Result<PointSet> {
    if d == 0 {
        return Err(invalid("dimension must be >= 1"));
    }
    if n == 0 {
        return Ok(PointSet::empty(d));
    }
    match kind {
        GeneratorKind::UniformRandom => {
            let mut rng = SplitMix64::new(seed);
            let coords = (0..n * d).map(|_| rng.next_f64()).collect();
            PointSet::new(d, coords, None)
        }
        GeneratorKind::Grid => grid_midpoints(d, n),
        GeneratorKind::Rank1Lattice => rank1_lattice(d, n),
        GeneratorKind::VdcProduct => {
            let bases = first_primes(d);
            let mut coords = Vec::with_capacity(n * d);
            for k in 0..n {
                for &b in &bases {
                    coords.push(radical_inverse(k as u64, b));
                }
            }
            PointSet::new(d, coords, None)
        }
    }
}

fn grid_midpoints(d: usize, n: usize) -> Result<PointSet> {
    // Smallest m with m^d >= n, then row-major midpoints truncated to n.
    let mut m = math::ceil(math::powf(n as f64, 1.0 / d as f64)) as u128;
    let pow = |m: u128| -> Option<u128> {
        let mut acc: u128 = 1;
        for _ in 0..d {
            acc = acc.checked_mul(m)?;
            if acc > u64::MAX as u128 {
                return None;
            }
        }
        Some(acc)
    };
    while m > 1 && pow(m - 1).map(|p| p >= n as u128).unwrap_or(false) {
        m -= 1;
    }
    while pow(m).map(|p| p < n as u128).unwrap_or(false) {
        m += 1;
    }
    if pow(m).is_none() {
        return Err(invalid(format!("grid side {m}^{d} overflows")));
    }
    let m = m as usize;
    let mut coords = Vec::with_capacity(n * d);
    let mut index = alloc::vec![0usize; d];
    for _ in 0..n {
        for &i in index.iter() {
            coords.push((2 * i + 1) as f64 / (2 * m) as f64);
        }
        // Increment the mixed-radix counter, last coordinate fastest.
        for j in (0..d).rev() {
            index[j] += 1;
            if index[j] < m {
                break;
            }
            index[j] = 0;
        }
    }
    PointSet::new(d, coords, None)
}

fn rank1_lattice(d: usize, n: usize) -> Result<PointSet> {
    let mut z: Vec<u64> = Vec::with_capacity(d);
    z.push(if n == 1 { 0 } else { 1 });
    for _ in 1..d {
        let mut best = (f64::INFINITY, 0u64);
        let mut any = false;
        for cand in 1..n as u64 {
            if gcd(cand, n as u64) != 1 {
                continue;
            }
            any = true;
            z.push(cand);
            let ps = lattice_points(&z, n)?;
            let v = crate::discrepancy::anchored_l2_half_value(&ps)?;
            z.pop();
            if v < best.0 {
                best = (v, cand);
            }
        }
        if !any {
            z.push(if n == 1 { 0 } else { 1 });
        } else {
            z.push(best.1);
        }
    }
    lattice_points(&z, n)
}

fn lattice_points(z: &[u64], n: usize) -> Result<PointSet> {
    let d = z.len();
    let mut coords = Vec::with_capacity(n * d);
    for k in 0..n as u64 {
        for &zj in z {
            coords.push((k * zj % n as u64) as f64 / n as f64);
        }
    }
    PointSet::new(d, coords, None)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn first_primes(count: usize) -> Vec<u32> {
    let mut primes = Vec::with_capacity(count);
    let mut c = 2u32;
    while primes.len() < count {
        if primes.iter().all(|p| c % p != 0) {
            primes.push(c);
        }
        c += 1;
    }
    primes
}

/// Radical inverse of `k` in the given base.
fn radical_inverse(mut k: u64, base: u32) -> f64 {
    let b = base as u64;
    let mut inv = 0.0;
    let mut scale = 1.0 / b as f64;
    while k > 0 {
        inv += (k % b) as f64 * scale;
        k /= b;
        scale /= b as f64;
    }
    inv
}

/// Coordinate-wise map x -> (a - x) mod 1; weights are preserved. The map is
/// an involution on the unit cube.
pub fn anchor_transform(ps: &PointSet, a: f64) -> Result<PointSet> {
    ps.require_unit_cube()?;
    if !(0.0..=1.0).contains(&a) {
        return Err(invalid("anchor must lie in [0, 1]"));
    }
    let coords = ps
        .coords
        .iter()
        .map(|&x| {
            let y = math::rem_euclid(a - x, 1.0);
            if y >= 1.0 {
                0.0
            } else {
                y
            }
        })
        .collect();
    Ok(PointSet {
        d: ps.d,
        coords,
        weights: ps.weights.clone(),
    })
}
