//! Cameron-Martin space arithmetic: elements, model-specific inner products,
//! the Wiener integral, the change-of-measure density, and the Haar
//! partial-sum diagnostic that shows sampled paths fall outside H.

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::haar::{haar_cell_values, ordered_haar_indices};
use crate::kernels::PathSample;

/// Norm cap for [`cm_density`]; beyond it e^{Th} overflows the tails and
/// the Monte Carlo estimate is meaningless.
pub const DENSITY_NORM_CAP: f64 = 6.0;

/// Which Cameron-Martin inner product an element carries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CMModel {
    /// ⟨h₁,h₂⟩ = ∫ ḣ₁ḣ₂ dt.
    Classical,
    /// ⟨h₁,h₂⟩ = (1/σ²) ∫ (ḣ₁ḣ₂ + h₁h₂) dt.
    OrnsteinUhlenbeck { sigma: f64 },
    /// ⟨h₁,h₂⟩ = ∫ ĥ₁ĥ₂ dt with ĥ = ḣ + h/(1-t).
    Bridge,
}

impl CMModel {
    fn validate(&self) -> Result<()> {
        if let CMModel::OrnsteinUhlenbeck { sigma } = *self {
            if !(sigma.is_finite() && sigma > 0.0) {
                return Err(Error::invalid("sigma", format!("must be positive, got {sigma}")));
            }
        }
        Ok(())
    }
}

/// A Cameron-Martin element stored by its piecewise-constant derivative
/// samples ḣ on grid cells; h itself is the polyline with h(0) = 0.
///
/// Bridge-model elements always carry ḣ = 0 on the final cell: the factor
/// 1/(1-t) is evaluated at cell midpoints, and the final cell is excluded
/// from the inner product, which leaves ∫ ĥ₁ĥ₂ unchanged for admissible
/// elements (those vanishing at t = 1).
#[derive(Clone, Debug, PartialEq)]
pub struct CMElement {
    grid: TimeGrid,
    hdot: Vec<f64>,
    model: CMModel,
}

impl CMElement {
    pub fn new(grid: TimeGrid, mut hdot: Vec<f64>, model: CMModel) -> Result<Self> {
        model.validate()?;
        if hdot.len() != grid.cells() {
            return Err(Error::invalid(
                "hdot",
                format!("expected {} cell values, got {}", grid.cells(), hdot.len()),
            ));
        }
        if let Some(bad) = hdot.iter().find(|d| !d.is_finite()) {
            return Err(Error::invalid("hdot", format!("non-finite derivative sample {bad}")));
        }
        if model == CMModel::Bridge {
            *hdot.last_mut().expect("grid has at least one cell") = 0.0;
        }
        Ok(CMElement { grid, hdot, model })
    }

    /// Zero element of the given model.
    pub fn zero(grid: TimeGrid, model: CMModel) -> Self {
        CMElement { grid, hdot: vec![0.0; grid.cells()], model }
    }

    /// Build from node values of h; requires h(0) = 0.
    pub fn from_node_values(grid: TimeGrid, values: &[f64], model: CMModel) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(
                "values",
                format!("expected {} node values, got {}", grid.len(), values.len()),
            ));
        }
        if values[0] != 0.0 {
            return Err(Error::invalid("values", format!("h(0) must be 0, got {}", values[0])));
        }
        let dt = grid.dt();
        let hdot = values.windows(2).map(|w| (w[1] - w[0]) / dt).collect();
        CMElement::new(grid, hdot, model)
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn model(&self) -> CMModel {
        self.model
    }

    /// Derivative samples, one per grid cell.
    pub fn hdot(&self) -> &[f64] {
        &self.hdot
    }

    /// h tabulated at the grid nodes, h(0) = 0.
    pub fn node_values(&self) -> Vec<f64> {
        let dt = self.grid.dt();
        let mut values = Vec::with_capacity(self.grid.len());
        let mut h = 0.0;
        values.push(h);
        for &d in &self.hdot {
            h += d * dt;
            values.push(h);
        }
        values
    }

    /// ‖h‖_H under the element's model.
    pub fn norm(&self) -> Result<f64> {
        Ok(cm_inner(self, self)?.sqrt())
    }

    /// The translated path ω + h.
    pub fn translate(&self, path: &PathSample) -> Result<PathSample> {
        if path.grid() != self.grid {
            return Err(Error::invalid("path", "grid does not match the element"));
        }
        let h = self.node_values();
        let values = path.values().iter().zip(h.iter()).map(|(w, v)| w + v).collect();
        PathSample::new(self.grid, values)
    }
}

fn check_compatible(h1: &CMElement, h2: &CMElement) -> Result<()> {
    if h1.grid != h2.grid {
        return Err(Error::invalid("h2", "grids do not match"));
    }
    if h1.model != h2.model {
        return Err(Error::invalid(
            "h2",
            format!("models do not match: {:?} vs {:?}", h1.model, h2.model),
        ));
    }
    Ok(())
}

/// Model-specific inner product ⟨h₁,h₂⟩_H.
pub fn cm_inner(h1: &CMElement, h2: &CMElement) -> Result<f64> {
    check_compatible(h1, h2)?;
    let grid = h1.grid;
    let dt = grid.dt();
    match h1.model {
        CMModel::Classical => {
            let mut acc = 0.0;
            for (a, b) in h1.hdot.iter().zip(h2.hdot.iter()) {
                acc += a * b * dt;
            }
            Ok(acc)
        }
        CMModel::OrnsteinUhlenbeck { sigma } => {
            let v1 = h1.node_values();
            let v2 = h2.node_values();
            let mut acc = 0.0;
            for j in 0..grid.cells() {
                let m1 = 0.5 * (v1[j] + v1[j + 1]);
                let m2 = 0.5 * (v2[j] + v2[j + 1]);
                acc += (h1.hdot[j] * h2.hdot[j] + m1 * m2) * dt;
            }
            Ok(acc / (sigma * sigma))
        }
        CMModel::Bridge => {
            // Midpoint evaluation of ĥ = ḣ + h/(1-t); the final cell is
            // excluded (admissible elements vanish at t = 1, where ĥ → 0).
            let v1 = h1.node_values();
            let v2 = h2.node_values();
            let mut acc = 0.0;
            for j in 0..grid.cells().saturating_sub(1) {
                let w = 1.0 - grid.cell_midpoint(j);
                let e1 = h1.hdot[j] + 0.5 * (v1[j] + v1[j + 1]) / w;
                let e2 = h2.hdot[j] + 0.5 * (v2[j] + v2[j + 1]) / w;
                acc += e1 * e2 * dt;
            }
            Ok(acc)
        }
    }
}

/// Wiener integral Th(ω) = Σ_j ḣ(t_j)(ω(t_{j+1}) - ω(t_j)).
///
/// Evaluated by summation by parts: cells where ḣ is constant contribute
/// exact zeros, so integrals of locally constant ḣ telescope bit for bit
/// (ḣ ≡ 1 gives exactly ω(1)).
pub fn wiener_integral(h: &CMElement, path: &PathSample) -> Result<f64> {
    if h.model != CMModel::Classical {
        return Err(Error::UnsupportedModel(format!(
            "the Wiener integral is defined for the classical model, got {:?}",
            h.model
        )));
    }
    if path.grid() != h.grid {
        return Err(Error::invalid("path", "grid does not match the element"));
    }
    Ok(abel_increment_sum(&h.hdot, path.values()))
}

/// Σ_j c_j (w_{j+1} - w_j) by summation by parts; cells where c is constant
/// contribute exact zeros, so locally constant integrands telescope bit for
/// bit (c ≡ 1 gives exactly w_n - w_0).
pub(crate) fn abel_increment_sum(coeffs: &[f64], w: &[f64]) -> f64 {
    let n = coeffs.len();
    debug_assert_eq!(w.len(), n + 1);
    let mut acc = 0.0;
    for j in 1..n {
        let jump = coeffs[j - 1] - coeffs[j];
        if jump != 0.0 {
            acc += jump * w[j];
        }
    }
    acc + coeffs[n - 1] * w[n] - coeffs[0] * w[0]
}

/// Cameron-Martin density dμ_h/dμ(ω) = exp(-½‖h‖² + Th(ω)).
pub fn cm_density(h: &CMElement, path: &PathSample) -> Result<f64> {
    let norm_sq = cm_inner(h, h)?;
    if norm_sq > DENSITY_NORM_CAP * DENSITY_NORM_CAP {
        return Err(Error::invalid(
            "h",
            format!("‖h‖_H = {:.3} exceeds the density cap {DENSITY_NORM_CAP}", norm_sq.sqrt()),
        ));
    }
    let t = wiener_integral(h, path)?;
    Ok((-0.5 * norm_sq + t).exp())
}

fn check_basis_size(grid: TimeGrid, k: usize) -> Result<()> {
    if k > grid.cells() {
        return Err(Error::invalid(
            "basis_size",
            format!("{k} exceeds the exact basis size {} at this grid", grid.cells()),
        ));
    }
    Ok(())
}

/// Partial sums S_k = Σ_{i≤k} e_i(ω)², with e_i the Wiener integrals of the
/// discrete-orthonormal Haar functions in canonical order. For sampled
/// Brownian paths S_k grows linearly (the path is not in H); for elements
/// of H it converges to ‖h‖².
pub fn cm_norm_partial_sums(path: &PathSample, basis_size: usize) -> Result<Vec<f64>> {
    let grid = path.grid();
    check_basis_size(grid, basis_size)?;
    let mut sums = Vec::with_capacity(basis_size);
    let mut acc = 0.0;
    for index in ordered_haar_indices(basis_size) {
        let f = CMElement::new(grid, haar_cell_values(index, grid)?, CMModel::Classical)?;
        let e = wiener_integral(&f, path)?;
        acc += e * e;
        sums.push(acc);
    }
    Ok(sums)
}

/// Element version of [`cm_norm_partial_sums`]: e_i(h) = ⟨Je_i, h⟩_H,
/// computed exactly for the classical model.
pub fn cm_norm_partial_sums_element(h: &CMElement, basis_size: usize) -> Result<Vec<f64>> {
    if h.model != CMModel::Classical {
        return Err(Error::UnsupportedModel(
            "Haar partial sums are defined against the classical model".into(),
        ));
    }
    let grid = h.grid;
    check_basis_size(grid, basis_size)?;
    let dt = grid.dt();
    let mut sums = Vec::with_capacity(basis_size);
    let mut acc = 0.0;
    for index in ordered_haar_indices(basis_size) {
        let f = haar_cell_values(index, grid)?;
        let e: f64 = f.iter().zip(h.hdot.iter()).map(|(a, b)| a * b * dt).sum();
        acc += e * e;
        sums.push(acc);
    }
    Ok(sums)
}
