//! The Haar system on [0,1], its Schauder primitives (the little tents),
//! and the level-by-level partial-sum construction of Brownian motion.

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::kernels::PathSample;
use crate::stats::pow2_half;
use crate::stream::{standard_normals, RandomStream};

/// Levels above this would overflow the u32 position range.
const MAX_BASIS_LEVEL: u32 = 30;

/// Index into the Haar system: the constant function f₀ ≡ 1, or the
/// wavelet f^n_k at level n ≥ 1 with odd position 0 < k < 2^n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum HaarIndex {
    Constant,
    Tent { level: u32, position: u32 },
}

impl HaarIndex {
    pub fn validate(&self) -> Result<()> {
        if let HaarIndex::Tent { level, position } = *self {
            if level == 0 || level > MAX_BASIS_LEVEL {
                return Err(Error::invalid(
                    "level",
                    format!("must be in 1..={MAX_BASIS_LEVEL}, got {level}"),
                ));
            }
            if position % 2 == 0 || position >= (1u32 << level) {
                return Err(Error::invalid(
                    "position",
                    format!("must be odd and below 2^{level}, got {position}"),
                ));
            }
        }
        Ok(())
    }
}

/// Which side of the system to evaluate: the step functions themselves or
/// their running integrals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisFamily {
    Haar,
    Schauder,
}

/// Pointwise evaluation of f^n_k (Haar) or h^n_k = ∫₀ᵗ f^n_k (Schauder).
///
/// The tent peak h^n_k(k/2^n) = 2^{-(n+1)/2} is produced bit-exactly: the
/// amplitude and the half-width are both powers of √2 times powers of two.
pub fn basis_eval(index: HaarIndex, family: BasisFamily, t: f64) -> Result<f64> {
    index.validate()?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid("t", format!("must lie in [0,1], got {t}")));
    }
    match index {
        HaarIndex::Constant => Ok(match family {
            BasisFamily::Haar => 1.0,
            BasisFamily::Schauder => t,
        }),
        HaarIndex::Tent { level, position } => {
            let width = (-(level as f64)).exp2();
            let left = (position - 1) as f64 * width;
            let mid = position as f64 * width;
            let right = (position + 1) as f64 * width;
            let amp = pow2_half(level as i32 - 1);
            Ok(match family {
                BasisFamily::Haar => {
                    if t >= left && t < mid {
                        amp
                    } else if (t >= mid && t < right) || (t == right && right == 1.0) {
                        -amp
                    } else {
                        0.0
                    }
                }
                BasisFamily::Schauder => {
                    if t <= left || t >= right {
                        0.0
                    } else if t <= mid {
                        amp * (t - left)
                    } else {
                        amp * (right - t)
                    }
                }
            })
        }
    }
}

/// Cell values of a Haar function on a dyadic grid; exact because wavelets
/// with level ≤ m are constant on cells of width 2^-m.
pub fn haar_cell_values(index: HaarIndex, grid: TimeGrid) -> Result<Vec<f64>> {
    index.validate()?;
    match index {
        HaarIndex::Constant => Ok(vec![1.0; grid.cells()]),
        HaarIndex::Tent { level, position } => {
            if level > grid.levels() {
                return Err(Error::invalid(
                    "level",
                    format!("{level} exceeds the grid resolution {}", grid.levels()),
                ));
            }
            let amp = pow2_half(level as i32 - 1);
            let half = 1usize << (grid.levels() - level);
            let start = (position as usize - 1) * half;
            let mut values = vec![0.0; grid.cells()];
            for v in values.iter_mut().skip(start).take(half) {
                *v = amp;
            }
            for v in values.iter_mut().skip(start + half).take(half) {
                *v = -amp;
            }
            Ok(values)
        }
    }
}

/// The first `count` indices in canonical order: constant, then levels
/// ascending with positions ascending inside each level.
pub fn ordered_haar_indices(count: usize) -> Vec<HaarIndex> {
    let mut indices = Vec::with_capacity(count);
    if count > 0 {
        indices.push(HaarIndex::Constant);
    }
    let mut level = 1u32;
    'outer: while indices.len() < count {
        let mut position = 1u32;
        while position < (1u32 << level) {
            indices.push(HaarIndex::Tent { level, position });
            if indices.len() == count {
                break 'outer;
            }
            position += 2;
        }
        level += 1;
    }
    indices
}

/// Adds Σ_k coeffs[k]·h^n_k for one Schauder level to `buffer`, tabulated on
/// the 2^grid_levels + 1 dyadic nodes (level 0 is the constant tent t).
///
/// Tent node values are (integer rung)·(coeff·unit) with the apex rung an
/// exact power of two, which is what makes per-level sup-norms reproduce
/// 2^{-(n+1)/2}·max|X| bit for bit.
pub(crate) fn accumulate_schauder_level(
    buffer: &mut [f64],
    grid_levels: u32,
    level: u32,
    coeffs: &[f64],
) {
    debug_assert_eq!(buffer.len(), (1usize << grid_levels) + 1);
    let dt = (-(grid_levels as f64)).exp2();
    if level == 0 {
        debug_assert_eq!(coeffs.len(), 1);
        for (i, b) in buffer.iter_mut().enumerate() {
            *b += coeffs[0] * (i as f64 * dt);
        }
        return;
    }
    debug_assert!(level <= grid_levels);
    debug_assert_eq!(coeffs.len(), 1usize << (level - 1));
    let unit = pow2_half(level as i32 - 1) * dt;
    let half = 1usize << (grid_levels - level);
    for (j, &x) in coeffs.iter().enumerate() {
        let base = 2 * j * half;
        for i in 1..2 * half {
            let rungs = i.min(2 * half - i) as f64;
            buffer[base + i] += x * (rungs * unit);
        }
    }
}

/// Output of [`levy_construct`]: the partial-sum path S_L together with the
/// per-level increment sup-norms ‖S_n - S_{n-1}‖_∞ and the per-level largest
/// absolute coefficient max_k |X_{n,k}|.
#[derive(Clone, Debug)]
pub struct LevyConstruction {
    pub path: PathSample,
    pub level_sups: Vec<f64>,
    pub level_max_coeff: Vec<f64>,
}

/// Partial-sum construction S_L = Σ_{n≤L} Σ_k X_{n,k} h^n_k with iid N(0,1)
/// coefficients, tabulated on the grid nodes.
///
/// Level n draws its coefficients from `stream.phase(n)`, so S_L and S_{L'}
/// built from the same stream share every common level bit for bit. Within a
/// level the tents have disjoint interiors, so the increment sup-norm equals
/// 2^{-(n+1)/2}·max_k |X_{n,k}| exactly: tent node values are computed as
/// (integer)·(coefficient·unit) with the apex an exact power-of-two multiple,
/// and rounding is monotone.
pub fn levy_construct(
    levels: u32,
    grid: TimeGrid,
    stream: RandomStream,
) -> Result<LevyConstruction> {
    let m = grid.levels();
    if levels >= m {
        return Err(Error::invalid(
            "levels",
            format!("construction needs levels < {m} on this grid, got {levels}"),
        ));
    }
    let len = grid.len();
    let mut values = vec![0.0; len];
    let mut level_sups = Vec::with_capacity(levels as usize + 1);
    let mut level_max_coeff = Vec::with_capacity(levels as usize + 1);
    let mut buffer = vec![0.0; len];

    for n in 0..=levels {
        buffer.iter_mut().for_each(|b| *b = 0.0);
        let count = if n == 0 { 1 } else { 1usize << (n - 1) };
        let coeffs = standard_normals(stream.phase(n as u64), count)?;
        accumulate_schauder_level(&mut buffer, m, n, &coeffs);
        level_max_coeff.push(coeffs.iter().fold(0.0f64, |a, x| a.max(x.abs())));
        let sup = buffer.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        level_sups.push(sup);
        for (v, b) in values.iter_mut().zip(buffer.iter()) {
            *v += b;
        }
    }

    Ok(LevyConstruction { path: PathSample::new(grid, values)?, level_sups, level_max_coeff })
}
