//! Covariance kernels and everything sampled from them: grid covariance
//! matrices, path and sheet samplers, the covariance form q, the RKHS map J,
//! and Fernique tail tables.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::cm::{CMElement, CMModel};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::linalg::{chol_psd, CholPsd};
use crate::parallel::map_replicates;
use crate::stats::proportion_se;
use crate::stream::{standard_normals, RandomStream};

/// Admissible Hurst range; conditioning of the covariance matrix degrades
/// outside it.
pub const HURST_MIN: f64 = 0.05;
pub const HURST_MAX: f64 = 0.95;

/// A covariance kernel a(s,t) on [0,1] (planar for the sheet).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelSpec {
    /// a(s,t) = s ∧ t.
    BrownianMotion,
    /// Started at 0: a(s,t) = (σ²/2)(e^{-|t-s|} - e^{-(t+s)}).
    OrnsteinUhlenbeck { sigma: f64 },
    /// a(s,t) = ½(t^{2H} + s^{2H} - |t-s|^{2H}).
    FractionalBrownianMotion { hurst: f64 },
    /// a(s,t) = (s ∧ t)(1 - s ∨ t).
    BrownianBridge,
    /// Planar kernel a((s₁,t₁),(s₂,t₂)) = (s₁ ∧ s₂)(t₁ ∧ t₂).
    BrownianSheet,
}

impl KernelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::BrownianMotion => "brownian-motion",
            KernelSpec::OrnsteinUhlenbeck { .. } => "ornstein-uhlenbeck",
            KernelSpec::FractionalBrownianMotion { .. } => "fractional-brownian-motion",
            KernelSpec::BrownianBridge => "brownian-bridge",
            KernelSpec::BrownianSheet => "brownian-sheet",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::OrnsteinUhlenbeck { sigma } if !(sigma.is_finite() && sigma > 0.0) => {
                Err(Error::invalid("sigma", format!("must be positive, got {sigma}")))
            }
            KernelSpec::FractionalBrownianMotion { hurst }
                if !(HURST_MIN..=HURST_MAX).contains(&hurst) =>
            {
                Err(Error::invalid(
                    "hurst",
                    format!("must lie in [{HURST_MIN}, {HURST_MAX}], got {hurst}"),
                ))
            }
            _ => Ok(()),
        }
    }
}

fn check_time(name: &'static str, t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(name, format!("time {t} outside [0,1]")));
    }
    Ok(())
}

/// Evaluate a scalar kernel at (s,t). The sheet kernel takes planar points
/// and is served by [`sheet_eval`].
pub fn kernel_eval(kernel: KernelSpec, s: f64, t: f64) -> Result<f64> {
    kernel.validate()?;
    check_time("s", s)?;
    check_time("t", t)?;
    match kernel {
        KernelSpec::BrownianMotion => Ok(s.min(t)),
        KernelSpec::OrnsteinUhlenbeck { sigma } => {
            let (lo, hi) = (s.min(t), s.max(t));
            Ok(sigma * sigma / 2.0 * ((-(hi - lo)).exp() - (-(hi + lo)).exp()))
        }
        KernelSpec::FractionalBrownianMotion { hurst } => {
            let p = 2.0 * hurst;
            Ok(0.5 * (t.powf(p) + s.powf(p) - (t - s).abs().powf(p)))
        }
        KernelSpec::BrownianBridge => Ok(s.min(t) * (1.0 - s.max(t))),
        KernelSpec::BrownianSheet => Err(Error::UnsupportedKernel(
            "sheet kernel takes planar points; use sheet_eval".into(),
        )),
    }
}

/// Evaluate the sheet kernel at two planar points.
pub fn sheet_eval(kernel: KernelSpec, p1: (f64, f64), p2: (f64, f64)) -> Result<f64> {
    if kernel != KernelSpec::BrownianSheet {
        return Err(Error::UnsupportedKernel(format!(
            "{} is a scalar kernel; use kernel_eval",
            kernel.name()
        )));
    }
    check_time("s1", p1.0)?;
    check_time("t1", p1.1)?;
    check_time("s2", p2.0)?;
    check_time("t2", p2.1)?;
    Ok(p1.0.min(p2.0) * p1.1.min(p2.1))
}

/// Full covariance matrix of a scalar kernel on the grid nodes.
pub fn covariance_matrix(kernel: KernelSpec, grid: TimeGrid) -> Result<DMatrix<f64>> {
    let n = grid.len();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = kernel_eval(kernel, grid.node(i), grid.node(j))?;
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    Ok(a)
}

/// One realization of a process on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSample {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl PathSample {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(
                "values",
                format!("expected {} node values, got {}", grid.len(), values.len()),
            ));
        }
        Ok(PathSample { grid, values })
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, j: usize) -> f64 {
        self.values[j]
    }

    pub fn terminal(&self) -> f64 {
        *self.values.last().expect("grid has at least one node")
    }

    /// Grid supremum of |ω|.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Grid maximum of ω.
    pub fn max_value(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    /// Running node maximum M_j = max_{i ≤ j} ω(t_i).
    pub fn running_max(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.values.len());
        let mut m = f64::NEG_INFINITY;
        for &v in &self.values {
            m = m.max(v);
            out.push(m);
        }
        out
    }
}

/// Amortized sampler: one Cholesky factorization, many paths.
///
/// Nodes where a(t,t) = 0 (all kernels at t = 0, the bridge at t = 1) are
/// excluded from the factorization and written as exact zeros, which keeps
/// the degenerate-node invariants bit-exact.
#[derive(Debug)]
pub struct PathSampler {
    grid: TimeGrid,
    active: Vec<usize>,
    factor: CholPsd,
}

impl PathSampler {
    pub fn new(kernel: KernelSpec, grid: TimeGrid) -> Result<Self> {
        kernel.validate()?;
        if kernel == KernelSpec::BrownianSheet {
            return Err(Error::UnsupportedKernel(
                "sheet paths live on a planar grid; use SheetSampler".into(),
            ));
        }
        let mut active = Vec::new();
        for j in 0..grid.len() {
            let t = grid.node(j);
            if kernel_eval(kernel, t, t)? != 0.0 {
                active.push(j);
            }
        }
        let mut a = DMatrix::<f64>::zeros(active.len(), active.len());
        for (ai, &i) in active.iter().enumerate() {
            for (aj, &j) in active.iter().enumerate().skip(ai) {
                let v = kernel_eval(kernel, grid.node(i), grid.node(j))?;
                a[(ai, aj)] = v;
                a[(aj, ai)] = v;
            }
        }
        let factor = chol_psd(&a)?;
        Ok(PathSampler { grid, active, factor })
    }

    /// Jitter the factorization needed, if any.
    pub fn jitter(&self) -> f64 {
        self.factor.jitter
    }

    pub fn sample(&self, stream: RandomStream) -> Result<PathSample> {
        let z = standard_normals(stream, self.active.len())?;
        let x = &self.factor.l * DVector::from_vec(z);
        let mut values = vec![0.0; self.grid.len()];
        for (ai, &j) in self.active.iter().enumerate() {
            values[j] = x[ai];
        }
        PathSample::new(self.grid, values)
    }
}

/// Sample `count` paths, one replicate stream per path.
pub fn sample_paths(
    kernel: KernelSpec,
    grid: TimeGrid,
    count: usize,
    stream: RandomStream,
) -> Result<Vec<PathSample>> {
    let sampler = PathSampler::new(kernel, grid)?;
    map_replicates(count, |r| sampler.sample(stream.replicate(r as u64)))
        .into_iter()
        .collect()
}

/// One realization of the Brownian sheet on grid × grid, row-major:
/// `value(i, j)` is X(s_i, t_j).
#[derive(Clone, Debug)]
pub struct SheetSample {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl SheetSample {
    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.len() + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }
}

/// Sheet sampler exploiting the Kronecker structure: X = L Z Lᵀ with L the
/// Brownian-motion factor, instead of factoring the (grid²)×(grid²) matrix.
#[derive(Debug)]
pub struct SheetSampler {
    grid: TimeGrid,
    active: Vec<usize>,
    factor: CholPsd,
}

impl SheetSampler {
    pub fn new(grid: TimeGrid) -> Result<Self> {
        let sampler = PathSampler::new(KernelSpec::BrownianMotion, grid)?;
        Ok(SheetSampler { grid: sampler.grid, active: sampler.active, factor: sampler.factor })
    }

    pub fn sample(&self, stream: RandomStream) -> Result<SheetSample> {
        let k = self.active.len();
        let z = standard_normals(stream, k * k)?;
        let z = DMatrix::from_vec(k, k, z);
        let x = &self.factor.l * z * self.factor.l.transpose();
        let n = self.grid.len();
        let mut values = vec![0.0; n * n];
        for (ai, &i) in self.active.iter().enumerate() {
            for (aj, &j) in self.active.iter().enumerate() {
                values[i * n + j] = x[(ai, aj)];
            }
        }
        Ok(SheetSample { grid: self.grid, values })
    }
}

pub fn sample_sheets(
    grid: TimeGrid,
    count: usize,
    stream: RandomStream,
) -> Result<Vec<SheetSample>> {
    let sampler = SheetSampler::new(grid)?;
    map_replicates(count, |r| sampler.sample(stream.replicate(r as u64)))
        .into_iter()
        .collect()
}

/// A finitely supported signed measure ν = Σ wᵢ δ_{tᵢ}. Atoms are kept
/// sorted by time; duplicate times are merged by summing weights and exact
/// cancellations are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicMeasure {
    atoms: Vec<(f64, f64)>,
}

impl AtomicMeasure {
    pub fn new(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut raw: Vec<(f64, f64)> = Vec::new();
        for (t, w) in atoms {
            check_time("atom time", t)?;
            if !w.is_finite() {
                return Err(Error::invalid("atom weight", format!("must be finite, got {w}")));
            }
            raw.push((t, w));
        }
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (t, w) in raw {
            match merged.last_mut() {
                Some(last) if last.0 == t => last.1 += w,
                _ => merged.push((t, w)),
            }
        }
        merged.retain(|&(_, w)| w != 0.0);
        Ok(AtomicMeasure { atoms: merged })
    }

    pub fn dirac(t: f64) -> Result<Self> {
        AtomicMeasure::new([(t, 1.0)])
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }
}

/// Covariance form q(ν₁,ν₂) = Σᵢⱼ a(sᵢ,tⱼ) w₁ᵢ w₂ⱼ.
pub fn covariance_form(
    nu1: &AtomicMeasure,
    nu2: &AtomicMeasure,
    kernel: KernelSpec,
) -> Result<f64> {
    if kernel == KernelSpec::BrownianSheet {
        return Err(Error::UnsupportedKernel(
            "atomic measures are supported on [0,1], not the plane".into(),
        ));
    }
    let mut q = 0.0;
    for &(s, w1) in nu1.atoms() {
        for &(t, w2) in nu2.atoms() {
            q += kernel_eval(kernel, s, t)? * w1 * w2;
        }
    }
    Ok(q)
}

/// The RKHS map J: tabulates (Jν)(t) = Σᵢ wᵢ a(sᵢ,t) on the grid and wraps
/// it as a Cameron-Martin element of the kernel's model.
pub fn rkhs_embed(nu: &AtomicMeasure, kernel: KernelSpec, grid: TimeGrid) -> Result<CMElement> {
    let model = match kernel {
        KernelSpec::BrownianMotion => CMModel::Classical,
        KernelSpec::OrnsteinUhlenbeck { sigma } => CMModel::OrnsteinUhlenbeck { sigma },
        KernelSpec::BrownianBridge => CMModel::Bridge,
        _ => {
            return Err(Error::UnsupportedKernel(format!(
                "no Cameron-Martin model implemented for {}",
                kernel.name()
            )))
        }
    };
    let mut values = Vec::with_capacity(grid.len());
    for j in 0..grid.len() {
        let t = grid.node(j);
        let mut v = 0.0;
        for &(s, w) in nu.atoms() {
            v += w * kernel_eval(kernel, s, t)?;
        }
        values.push(v);
    }
    CMElement::from_node_values(grid, &values, model)
}

/// One row of a Fernique tail table. `tail` is the two-sided grid-sup
/// estimate; `one_sided_tail` estimates P(sup ω ≥ threshold), exactly in
/// distribution for Brownian motion (cell bridge maxima), from node maxima
/// otherwise.
#[derive(Clone, Debug)]
pub struct FerniqueRow {
    pub threshold: f64,
    pub tail: f64,
    pub stderr: f64,
    pub one_sided_tail: f64,
    pub one_sided_stderr: f64,
}

/// Tail table plus the fitted slope of log(tail) against threshold².
#[derive(Clone, Debug)]
pub struct FerniqueTable {
    pub rows: Vec<FerniqueRow>,
    pub slope: Option<f64>,
    pub count: usize,
}

/// Minimum expected hits for a threshold to enter the slope fit.
pub const SLOPE_MIN_HITS: f64 = 25.0;

/// Continuous supremum of a Brownian path: each cell's maximum is drawn
/// from the exact Brownian-bridge law given the endpoint values.
fn brownian_continuous_sup(path: &PathSample, stream: RandomStream) -> f64 {
    let dt = path.grid().dt();
    let mut rng = stream.rng();
    let mut sup = 0.0f64;
    for j in 0..path.grid().cells() {
        let a = path.value(j);
        let b = path.value(j + 1);
        let u: f64 = 1.0 - rng.random::<f64>();
        let m = 0.5 * (a + b + ((b - a) * (b - a) - 2.0 * dt * u.ln()).sqrt());
        sup = sup.max(m);
    }
    sup
}

/// Monte Carlo tail table for ‖ω‖_∞ under the kernel's measure.
pub fn fernique_tail_table(
    kernel: KernelSpec,
    grid: TimeGrid,
    thresholds: &[f64],
    count: usize,
    stream: RandomStream,
) -> Result<FerniqueTable> {
    if count == 0 {
        return Err(Error::invalid("count", "need at least one path"));
    }
    for &t in thresholds {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::invalid("thresholds", format!("must be ≥ 0, got {t}")));
        }
    }

    let stats: Vec<(f64, f64)> = if kernel == KernelSpec::BrownianSheet {
        let sampler = SheetSampler::new(grid)?;
        map_replicates(count, |r| {
            let sheet = sampler.sample(stream.replicate(r as u64))?;
            Ok((sheet.sup_norm(), sheet.max_value()))
        })
        .into_iter()
        .collect::<Result<_>>()?
    } else {
        let sampler = PathSampler::new(kernel, grid)?;
        map_replicates(count, |r| {
            let path = sampler.sample(stream.replicate(r as u64))?;
            let one_sided = if kernel == KernelSpec::BrownianMotion {
                brownian_continuous_sup(&path, stream.replicate(r as u64).phase(1))
            } else {
                path.max_value()
            };
            Ok((path.sup_norm(), one_sided))
        })
        .into_iter()
        .collect::<Result<_>>()?
    };

    let n = count as f64;
    let rows: Vec<FerniqueRow> = thresholds
        .iter()
        .map(|&th| {
            let hits = stats.iter().filter(|&&(s, _)| s >= th).count();
            let one_hits = stats.iter().filter(|&&(_, m)| m >= th).count();
            let tail = hits as f64 / n;
            let one_sided_tail = one_hits as f64 / n;
            FerniqueRow {
                threshold: th,
                tail,
                stderr: proportion_se(tail, count),
                one_sided_tail,
                one_sided_stderr: proportion_se(one_sided_tail, count),
            }
        })
        .collect();

    // Least squares of log(tail) against threshold² over well-populated bins.
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.tail * n >= SLOPE_MIN_HITS && r.tail > 0.0)
        .map(|r| (r.threshold * r.threshold, r.tail.ln()))
        .collect();
    let slope = fit_slope(&points);

    Ok(FerniqueTable { rows, slope, count })
}

fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cm::cm_inner;
    use approx::assert_abs_diff_eq;

    #[test]
    fn kernel_values_match_closed_forms() {
        assert_eq!(kernel_eval(KernelSpec::BrownianMotion, 0.25, 0.5).unwrap(), 0.25);
        assert_eq!(kernel_eval(KernelSpec::BrownianBridge, 0.25, 0.5).unwrap(), 0.125);
        // Frozen from mpmath: (1/2)(e^{-1/4} - e^{-3/4}).
        assert_abs_diff_eq!(
            kernel_eval(KernelSpec::OrnsteinUhlenbeck { sigma: 1.0 }, 0.25, 0.5).unwrap(),
            0.15321711516519508,
            epsilon = 1e-15
        );
        // Frozen from mpmath: (1/2) * 0.5^1.4.
        assert_abs_diff_eq!(
            kernel_eval(KernelSpec::FractionalBrownianMotion { hurst: 0.7 }, 0.25, 0.5).unwrap(),
            0.18946457081379976,
            epsilon = 1e-15
        );
    }

    #[test]
    fn kernels_are_symmetric() {
        let kernels = [
            KernelSpec::BrownianMotion,
            KernelSpec::OrnsteinUhlenbeck { sigma: 0.8 },
            KernelSpec::FractionalBrownianMotion { hurst: 0.3 },
            KernelSpec::BrownianBridge,
        ];
        let grid = TimeGrid::new(3).unwrap();
        for k in kernels {
            for s in grid.nodes() {
                for t in grid.nodes() {
                    assert_eq!(kernel_eval(k, s, t).unwrap(), kernel_eval(k, t, s).unwrap());
                }
            }
        }
    }

    #[test]
    fn fbm_at_half_reduces_to_brownian_motion() {
        let grid = TimeGrid::new(4).unwrap();
        let fbm = KernelSpec::FractionalBrownianMotion { hurst: 0.5 };
        for s in grid.nodes() {
            for t in grid.nodes() {
                assert_eq!(
                    kernel_eval(fbm, s, t).unwrap(),
                    kernel_eval(KernelSpec::BrownianMotion, s, t).unwrap()
                );
            }
        }
    }

    #[test]
    fn invalid_parameters_and_arguments_are_rejected() {
        assert!(kernel_eval(KernelSpec::OrnsteinUhlenbeck { sigma: 0.0 }, 0.1, 0.2).is_err());
        assert!(kernel_eval(KernelSpec::FractionalBrownianMotion { hurst: 0.99 }, 0.1, 0.2)
            .is_err());
        assert!(kernel_eval(KernelSpec::BrownianMotion, -0.1, 0.5).is_err());
        assert!(kernel_eval(KernelSpec::BrownianMotion, 0.1, 1.5).is_err());
        assert!(matches!(
            kernel_eval(KernelSpec::BrownianSheet, 0.1, 0.5),
            Err(Error::UnsupportedKernel(_))
        ));
    }

    #[test]
    fn sheet_eval_is_a_product_of_minima() {
        let v = sheet_eval(KernelSpec::BrownianSheet, (0.25, 0.75), (0.5, 0.5)).unwrap();
        assert_eq!(v, 0.125);
        assert!(sheet_eval(KernelSpec::BrownianMotion, (0.1, 0.1), (0.2, 0.2)).is_err());
    }

    #[test]
    fn atomic_measures_merge_and_cancel() {
        let nu = AtomicMeasure::new([(0.5, 1.0), (0.5, -1.0)]).unwrap();
        assert!(nu.atoms().is_empty());
        assert_eq!(covariance_form(&nu, &nu, KernelSpec::BrownianMotion).unwrap(), 0.0);

        let merged = AtomicMeasure::new([(0.25, 1.0), (0.25, 2.0), (0.75, 1.0)]).unwrap();
        assert_eq!(merged.atoms(), &[(0.25, 3.0), (0.75, 1.0)]);
    }

    #[test]
    fn covariance_form_matches_hand_expansion() {
        // BM, ν₁ = ν₂ = δ_{0.5} + δ_1: q = 0.5 + 2·0.5 + 1 = 2.5.
        let nu = AtomicMeasure::new([(0.5, 1.0), (1.0, 1.0)]).unwrap();
        assert_eq!(covariance_form(&nu, &nu, KernelSpec::BrownianMotion).unwrap(), 2.5);

        // Diracs reproduce the kernel.
        let d1 = AtomicMeasure::dirac(0.25).unwrap();
        let d2 = AtomicMeasure::dirac(0.5).unwrap();
        assert_eq!(covariance_form(&d1, &d2, KernelSpec::BrownianMotion).unwrap(), 0.25);
    }

    #[test]
    fn rkhs_embed_of_terminal_dirac_has_unit_norm() {
        let grid = TimeGrid::new(6).unwrap();
        let nu = AtomicMeasure::dirac(1.0).unwrap();
        let h = rkhs_embed(&nu, KernelSpec::BrownianMotion, grid).unwrap();
        // Jδ₁(t) = t, so hdot ≡ 1 and ‖h‖² = 1 = q(δ₁,δ₁).
        for &d in h.hdot() {
            assert_abs_diff_eq!(d, 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(cm_inner(&h, &h).unwrap(), 1.0, epsilon = 1e-12);

        let empty = AtomicMeasure::new([]).unwrap();
        let z = rkhs_embed(&empty, KernelSpec::BrownianMotion, grid).unwrap();
        assert!(z.hdot().iter().all(|&d| d == 0.0));
    }

    #[test]
    fn rkhs_embed_rejects_kernels_without_a_model() {
        let grid = TimeGrid::new(3).unwrap();
        let nu = AtomicMeasure::dirac(0.5).unwrap();
        assert!(rkhs_embed(&nu, KernelSpec::FractionalBrownianMotion { hurst: 0.7 }, grid)
            .is_err());
        assert!(rkhs_embed(&nu, KernelSpec::BrownianSheet, grid).is_err());
    }

    #[test]
    fn degenerate_nodes_sample_as_exact_zeros() {
        let grid = TimeGrid::new(4).unwrap();
        let paths =
            sample_paths(KernelSpec::BrownianBridge, grid, 50, RandomStream::new(7, 0)).unwrap();
        assert_eq!(paths.len(), 50);
        for p in &paths {
            assert_eq!(p.value(0), 0.0);
            assert_eq!(p.terminal(), 0.0);
            assert!(p.values().iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn empty_sample_request_yields_empty_list() {
        let grid = TimeGrid::new(2).unwrap();
        let paths =
            sample_paths(KernelSpec::BrownianMotion, grid, 0, RandomStream::new(1, 0)).unwrap();
        assert!(paths.is_empty());
    }

    #[test]
    fn brownian_terminal_variance_is_near_one() {
        let grid = TimeGrid::new(4).unwrap();
        let count = 20_000;
        let paths =
            sample_paths(KernelSpec::BrownianMotion, grid, count, RandomStream::new(11, 0))
                .unwrap();
        let terminal: Vec<f64> = paths.iter().map(|p| p.terminal()).collect();
        let var = crate::stats::variance(&terminal);
        // Variance-of-variance standard error: sqrt(2/N).
        let band = 3.0 * (2.0 / count as f64).sqrt();
        assert!((var - 1.0).abs() <= band, "var = {var}, band = {band}");
    }

    #[test]
    fn sheet_vanishes_on_the_axes() {
        let grid = TimeGrid::new(3).unwrap();
        let sheets = sample_sheets(grid, 10, RandomStream::new(3, 0)).unwrap();
        for sheet in &sheets {
            for j in 0..grid.len() {
                assert_eq!(sheet.value(0, j), 0.0);
                assert_eq!(sheet.value(j, 0), 0.0);
            }
            assert!(sheet.values().iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn fernique_table_has_unit_tail_at_zero_and_negative_slope() {
        let grid = TimeGrid::new(4).unwrap();
        let table = fernique_tail_table(
            KernelSpec::BrownianMotion,
            grid,
            &[0.0, 0.5, 1.0, 1.5],
            4_000,
            RandomStream::new(2024, 0),
        )
        .unwrap();
        assert_eq!(table.rows[0].tail, 1.0);
        assert_eq!(table.rows[0].one_sided_tail, 1.0);
        for w in table.rows.windows(2) {
            assert!(w[0].tail >= w[1].tail);
        }
        let slope = table.slope.expect("all bins well populated");
        assert!(slope < 0.0, "slope = {slope}");
    }

    #[test]
    fn fernique_rejects_bad_inputs() {
        let grid = TimeGrid::new(2).unwrap();
        let s = RandomStream::new(0, 0);
        assert!(fernique_tail_table(KernelSpec::BrownianMotion, grid, &[1.0], 0, s).is_err());
        assert!(fernique_tail_table(KernelSpec::BrownianMotion, grid, &[-1.0], 10, s).is_err());
    }

    #[test]
    fn continuous_sup_dominates_node_max() {
        let grid = TimeGrid::new(5).unwrap();
        let sampler = PathSampler::new(KernelSpec::BrownianMotion, grid).unwrap();
        for r in 0..20 {
            let s = RandomStream::new(5, 0).replicate(r);
            let path = sampler.sample(s).unwrap();
            let sup = brownian_continuous_sup(&path, s.phase(1));
            assert!(sup >= path.max_value());
        }
    }
}
