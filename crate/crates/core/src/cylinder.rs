//! Cylinder-set measure on Cameron-Martin space, the failure of countable
//! additivity, and Monte Carlo probes of measurable norms.

use crate::cm::{cm_inner, CMElement};
use crate::error::{Error, Result};
use crate::haar::{accumulate_schauder_level, HaarIndex};
use crate::parallel::map_replicates;
use crate::stats::{normal_cdf, normal_sf, pow2_half, proportion_se};
use crate::stream::{standard_normals, RandomStream};

/// Tolerance for the direction Gram matrix.
pub const GRAM_TOL: f64 = 1e-10;

/// Largest k accepted by [`additivity_demo`]; n_k overflows u128 beyond it.
pub const MAX_ADDITIVITY_K: u32 = 12;

/// Deepest Schauder level the sup-norm probe will tabulate.
pub const PROBE_MAX_LEVEL: u32 = 20;

/// A cylinder set {h : (⟨h,k₁⟩, …, ⟨h,k_n⟩) ∈ A} with orthonormal directions
/// k_i and A a product of intervals (±∞ endpoints allowed).
#[derive(Clone, Debug)]
pub struct CylinderSetSpec {
    directions: Vec<CMElement>,
    region: Vec<(f64, f64)>,
}

impl CylinderSetSpec {
    pub fn new(directions: Vec<CMElement>, region: Vec<(f64, f64)>) -> Result<Self> {
        if directions.is_empty() {
            return Err(Error::invalid("directions", "need at least one direction"));
        }
        if region.len() != directions.len() {
            return Err(Error::invalid(
                "region",
                format!("{} intervals for {} directions", region.len(), directions.len()),
            ));
        }
        for &(a, b) in &region {
            if a.is_nan() || b.is_nan() || a > b {
                return Err(Error::invalid(
                    "region",
                    format!("interval [{a}, {b}] is not ordered"),
                ));
            }
        }
        for (i, di) in directions.iter().enumerate() {
            for (j, dj) in directions.iter().enumerate().skip(i) {
                let g = cm_inner(di, dj)?;
                let want = if i == j { 1.0 } else { 0.0 };
                if (g - want).abs() > GRAM_TOL {
                    return Err(Error::invalid(
                        "directions",
                        format!("not orthonormal: ⟨k_{i},k_{j}⟩ = {g}"),
                    ));
                }
            }
        }
        Ok(CylinderSetSpec { directions, region })
    }

    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    pub fn directions(&self) -> &[CMElement] {
        &self.directions
    }

    pub fn region(&self) -> &[(f64, f64)] {
        &self.region
    }
}

/// Standard normal mass of [a, b], evaluated from whichever tail is stable.
fn interval_mass(a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mass = if b <= 0.0 {
        normal_cdf(b) - normal_cdf(a)
    } else if a >= 0.0 {
        normal_sf(a) - normal_sf(b)
    } else {
        1.0 - normal_cdf(a) - normal_sf(b)
    };
    mass.clamp(0.0, 1.0)
}

/// μ̃(C) = Π_i (Φ(b_i) - Φ(a_i)): the finite-dimensional Gaussian mass of
/// the region, pushed through the orthonormal coordinates.
pub fn cylinder_measure(spec: &CylinderSetSpec) -> f64 {
    spec.region.iter().map(|&(a, b)| interval_mass(a, b)).product()
}

/// One row of [`additivity_demo`]: the least n_k with μ₁([-k,k])^{n_k} < 2^{-k}
/// and the measure actually attained there.
#[derive(Clone, Copy, Debug)]
pub struct AdditivityRow {
    pub k: u32,
    pub n_k: u128,
    pub measure: f64,
}

/// The countable-additivity failure table: cubes A_{n_k,k} = [-k,k]^{n_k}
/// cover every ball of H, yet their cylinder measures sum below 1.
#[derive(Clone, Debug)]
pub struct AdditivityDemo {
    pub rows: Vec<AdditivityRow>,
    pub partial_sum: f64,
}

pub fn additivity_demo(kmax: u32) -> Result<AdditivityDemo> {
    if kmax == 0 || kmax > MAX_ADDITIVITY_K {
        return Err(Error::invalid(
            "kmax",
            format!("must be in 1..={MAX_ADDITIVITY_K}, got {kmax}"),
        ));
    }
    let mut rows = Vec::with_capacity(kmax as usize);
    let mut partial_sum = 0.0;
    for k in 1..=kmax {
        // p = μ₁([-k,k]); ln p via log1p(-q) keeps accuracy once the
        // two-sided tail q is tiny.
        let q = 2.0 * normal_sf(k as f64);
        let ln_p = (-q).ln_1p();
        let threshold = (-(k as f64)).exp2();
        let mut n = (k as f64 * std::f64::consts::LN_2 / (-ln_p)).floor() as u128 + 1;
        // Enforce the defining inequality on the computed measure itself;
        // the relative-sized bump keeps the loop short for huge n.
        while (n as f64 * ln_p).exp() >= threshold {
            n += (n >> 50).max(1);
        }
        let measure = (n as f64 * ln_p).exp();
        partial_sum += measure;
        rows.push(AdditivityRow { k, n_k: n, measure });
    }
    Ok(AdditivityDemo { rows, partial_sum })
}

/// Norms probed by [`measurable_norm_probe`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeNorm {
    /// ‖h‖_∞ of a Schauder combination over the probe levels.
    SupNorm,
    /// ‖Ah‖ for the diagonal operator Ae_i = e_i/i over the probe slots.
    HilbertSchmidtDiag,
}

/// Monte Carlo estimate of μ̃({h : ‖Ph‖ > ε}) plus its standard error;
/// the Hilbert-Schmidt case also carries the Chebyshev bound.
#[derive(Clone, Copy, Debug)]
pub struct ProbeResult {
    pub estimate: f64,
    pub stderr: f64,
    pub chebyshev_bound: Option<f64>,
}

fn check_probe_args(range: u32, epsilon: f64, count: usize) -> Result<()> {
    if range == 0 {
        return Err(Error::invalid("range", "need at least one probe level"));
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::invalid("epsilon", format!("must be positive, got {epsilon}")));
    }
    if count == 0 {
        return Err(Error::invalid("count", "need at least one replicate"));
    }
    Ok(())
}

/// Estimates the cylinder measure of {‖Ph‖ > ε} where P keeps only the probe
/// window beyond the first `excluded` levels (sup-norm case: Schauder levels
/// `excluded..excluded+range`) or coordinates (HS case: slots j = 1..range
/// mapped to coordinates excluded+j).
///
/// Coefficients are keyed by slot within the window, so at a fixed stream the
/// HS statistic is pathwise decreasing in `excluded` and estimates are
/// non-increasing as the excluded prefix grows.
pub fn measurable_norm_probe(
    norm: ProbeNorm,
    excluded: u32,
    range: u32,
    epsilon: f64,
    count: usize,
    stream: RandomStream,
) -> Result<ProbeResult> {
    check_probe_args(range, epsilon, count)?;
    match norm {
        ProbeNorm::SupNorm => {
            let top = excluded + range - 1;
            if top > PROBE_MAX_LEVEL {
                return Err(Error::invalid(
                    "excluded",
                    format!("probe window reaches level {top} > {PROBE_MAX_LEVEL}"),
                ));
            }
            // Every tent in the window is piecewise linear with breakpoints
            // on the level-`top` dyadic mesh, so that mesh attains the sup.
            let len = (1usize << top) + 1;
            let sups = map_replicates(count, |r| -> Result<f64> {
                let mut buffer = vec![0.0; len];
                for n in excluded..=top {
                    let draws = if n == 0 { 1 } else { 1usize << (n - 1) };
                    let coeffs =
                        standard_normals(stream.replicate(r as u64).phase(n as u64), draws)?;
                    accumulate_schauder_level(&mut buffer, top, n, &coeffs);
                }
                Ok(buffer.iter().fold(0.0f64, |a, b| a.max(b.abs())))
            })
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
            let exceed = sups.iter().filter(|&&s| s > epsilon).count();
            let estimate = exceed as f64 / count as f64;
            Ok(ProbeResult {
                estimate,
                stderr: proportion_se(estimate, count),
                chebyshev_bound: None,
            })
        }
        ProbeNorm::HilbertSchmidtDiag => {
            let eps_sq = epsilon * epsilon;
            let norms_sq = map_replicates(count, |r| -> Result<f64> {
                let mut s = 0.0;
                for j in 1..=range {
                    let xi = standard_normals(stream.replicate(r as u64).phase(j as u64), 1)?[0];
                    let denom = (excluded + j) as f64;
                    s += (xi / denom) * (xi / denom);
                }
                Ok(s)
            })
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
            let exceed = norms_sq.iter().filter(|&&s| s > eps_sq).count();
            let estimate = exceed as f64 / count as f64;
            let second_moment: f64 =
                (1..=range).map(|j| ((excluded + j) as f64).powi(-2)).sum();
            Ok(ProbeResult {
                estimate,
                stderr: proportion_se(estimate, count),
                chebyshev_bound: Some(second_moment / eps_sq),
            })
        }
    }
}

/// Monte Carlo tail of a single-tent projection against its closed form
/// 2(1 - Φ(ε/peak)).
#[derive(Clone, Copy, Debug)]
pub struct TentProbe {
    pub estimate: f64,
    pub stderr: f64,
    pub exact_tail: f64,
}

pub fn single_tent_probe(
    index: HaarIndex,
    epsilon: f64,
    count: usize,
    stream: RandomStream,
) -> Result<TentProbe> {
    index.validate()?;
    check_probe_args(1, epsilon, count)?;
    let peak = match index {
        HaarIndex::Constant => 1.0,
        HaarIndex::Tent { level, .. } => pow2_half(-(level as i32) - 1),
    };
    let draws = map_replicates(count, |r| -> Result<f64> {
        Ok(standard_normals(stream.replicate(r as u64), 1)?[0])
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let exceed = draws.iter().filter(|x| x.abs() * peak > epsilon).count();
    let estimate = exceed as f64 / count as f64;
    Ok(TentProbe {
        estimate,
        stderr: proportion_se(estimate, count),
        exact_tail: 2.0 * normal_sf(epsilon / peak),
    })
}
