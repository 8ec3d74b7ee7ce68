//! Malliavin calculus on numeric cylinder functions: the derivative D and
//! its process form D_t, the cylinder Laplacian, the Skorohod integral on
//! G·h terms, and the Itô specialization on simple adapted processes.

use crate::chaos::{hermite_eval, sqrt_factorial, ChaosExpansion, HValuedChaos};
use crate::cm::{cm_inner, wiener_integral, CMElement, CMModel};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::haar::{haar_cell_values, HaarIndex};
use crate::kernels::{covariance_form, AtomicMeasure, KernelSpec, PathSample};

type ValueFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type VectorFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A smooth map φ: R^dim → R with optional gradient and Hessian evaluators
/// (the Hessian is row-major, dim × dim).
pub struct Phi {
    dim: usize,
    value: ValueFn,
    gradient: Option<VectorFn>,
    hessian: Option<VectorFn>,
}

impl Phi {
    pub fn new(dim: usize, value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Phi { dim, value: Box::new(value), gradient: None, hessian: None }
    }

    pub fn with_gradient(
        mut self,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.gradient = Some(Box::new(gradient));
        self
    }

    pub fn with_hessian(
        mut self,
        hessian: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.hessian = Some(Box::new(hessian));
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_args(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::invalid(
                "coords",
                format!("phi takes {} arguments, got {}", self.dim, x.len()),
            ));
        }
        Ok(())
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_args(x)?;
        Ok((self.value)(x))
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_args(x)?;
        let g = self
            .gradient
            .as_ref()
            .ok_or_else(|| Error::invalid("phi", "gradient evaluator required"))?;
        let out = g(x);
        if out.len() != self.dim {
            return Err(Error::invalid(
                "phi",
                format!("gradient returned {} entries for dim {}", out.len(), self.dim),
            ));
        }
        Ok(out)
    }

    pub fn hessian(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_args(x)?;
        let h = self
            .hessian
            .as_ref()
            .ok_or_else(|| Error::invalid("phi", "Hessian evaluator required"))?;
        let out = h(x);
        if out.len() != self.dim * self.dim {
            return Err(Error::invalid(
                "phi",
                format!("Hessian returned {} entries for dim {}", out.len(), self.dim),
            ));
        }
        Ok(out)
    }
}

impl std::fmt::Debug for Phi {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Phi")
            .field("dim", &self.dim)
            .field("gradient", &self.gradient.is_some())
            .field("hessian", &self.hessian.is_some())
            .finish()
    }
}

/// The linear functionals a cylinder function reads from the path: either
/// point evaluations ω(t_i) or the orthonormal Haar functionals e_i.
#[derive(Clone, Debug, PartialEq)]
pub enum FunctionalFamily {
    Terminal(Vec<f64>),
    Haar(Vec<HaarIndex>),
}

impl FunctionalFamily {
    pub fn len(&self) -> usize {
        match self {
            FunctionalFamily::Terminal(times) => times.len(),
            FunctionalFamily::Haar(indices) => indices.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<()> {
        match self {
            FunctionalFamily::Terminal(times) => {
                for &t in times {
                    if !(t.is_finite() && (0.0..=1.0).contains(&t)) {
                        return Err(Error::invalid(
                            "times",
                            format!("evaluation time {t} outside [0,1]"),
                        ));
                    }
                }
                Ok(())
            }
            FunctionalFamily::Haar(indices) => {
                for idx in indices {
                    idx.validate()?;
                }
                let mut sorted = indices.clone();
                sorted.sort_unstable();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::invalid("indices", "repeated Haar functional"));
                }
                Ok(())
            }
        }
    }

    /// The last path time each functional can see; bounds adaptedness.
    fn latest_time(&self) -> f64 {
        match self {
            FunctionalFamily::Terminal(times) => times.iter().copied().fold(0.0, f64::max),
            FunctionalFamily::Haar(indices) => indices
                .iter()
                .map(|idx| match *idx {
                    HaarIndex::Constant => 1.0,
                    HaarIndex::Tent { level, position } => {
                        (position + 1) as f64 * (-(level as f64)).exp2()
                    }
                })
                .fold(0.0, f64::max),
        }
    }

    /// The functional values (f₁(ω), …, f_n(ω)).
    pub fn values(&self, path: &PathSample) -> Result<Vec<f64>> {
        let grid = path.grid();
        match self {
            FunctionalFamily::Terminal(times) => times
                .iter()
                .map(|&t| {
                    let j = grid.node_index(t).ok_or_else(|| {
                        Error::invalid("times", format!("{t} is not a node of the grid"))
                    })?;
                    Ok(path.value(j))
                })
                .collect(),
            FunctionalFamily::Haar(indices) => indices
                .iter()
                .map(|&idx| {
                    let f = CMElement::new(
                        grid,
                        haar_cell_values(idx, grid)?,
                        CMModel::Classical,
                    )?;
                    wiener_integral(&f, path)
                })
                .collect(),
        }
    }

    /// Cell values of ḟ_i: indicator 1_{t ≤ t_i} for point evaluations
    /// (exact when t_i is a grid node), the Haar function itself otherwise.
    fn cell_derivatives(&self, grid: TimeGrid) -> Result<Vec<Vec<f64>>> {
        match self {
            FunctionalFamily::Terminal(times) => times
                .iter()
                .map(|&t| {
                    let j = grid.node_index(t).ok_or_else(|| {
                        Error::invalid("times", format!("{t} is not a node of the grid"))
                    })?;
                    let mut cells = vec![0.0; grid.cells()];
                    for c in cells.iter_mut().take(j) {
                        *c = 1.0;
                    }
                    Ok(cells)
                })
                .collect(),
            FunctionalFamily::Haar(indices) => {
                indices.iter().map(|&idx| haar_cell_values(idx, grid)).collect()
            }
        }
    }
}

/// F(ω) = φ(f₁(ω), …, f_n(ω)): a smooth function of finitely many linear
/// functionals of the path.
#[derive(Debug)]
pub struct CylinderFunction {
    family: FunctionalFamily,
    phi: Phi,
}

impl CylinderFunction {
    pub fn new(family: FunctionalFamily, phi: Phi) -> Result<Self> {
        family.validate()?;
        if phi.dim() != family.len() {
            return Err(Error::invalid(
                "phi",
                format!("phi takes {} arguments, family has {}", phi.dim(), family.len()),
            ));
        }
        Ok(CylinderFunction { family, phi })
    }

    pub fn terminal(times: Vec<f64>, phi: Phi) -> Result<Self> {
        CylinderFunction::new(FunctionalFamily::Terminal(times), phi)
    }

    pub fn haar(indices: Vec<HaarIndex>, phi: Phi) -> Result<Self> {
        CylinderFunction::new(FunctionalFamily::Haar(indices), phi)
    }

    pub fn family(&self) -> &FunctionalFamily {
        &self.family
    }

    pub fn phi(&self) -> &Phi {
        &self.phi
    }

    pub fn eval(&self, path: &PathSample) -> Result<f64> {
        self.phi.value(&self.family.values(path)?)
    }
}

/// D_tF(ω) = Σ_i ∂_iφ(f₁(ω), …)·ḟ_i(t), returned as the classical
/// Cameron-Martin element with that derivative on each grid cell.
pub fn malliavin_deriv(f: &CylinderFunction, path: &PathSample) -> Result<CMElement> {
    let grid = path.grid();
    let coords = f.family.values(path)?;
    let grad = f.phi.gradient(&coords)?;
    let derivs = f.family.cell_derivatives(grid)?;
    let mut hdot = vec![0.0; grid.cells()];
    for (g, cells) in grad.iter().zip(derivs.iter()) {
        for (acc, c) in hdot.iter_mut().zip(cells.iter()) {
            *acc += g * c;
        }
    }
    CMElement::new(grid, hdot, CMModel::Classical)
}

/// ΔF(ω) = Σ_{i,j} ∂_i∂_jφ(f₁(ω), …)·q(f_i, f_j) with q the covariance form
/// of the kernel. Point-evaluation functionals work with every path kernel;
/// Haar functionals are orthonormal under Brownian motion (q = identity) and
/// unsupported elsewhere.
pub fn cylinder_laplacian(
    f: &CylinderFunction,
    path: &PathSample,
    kernel: KernelSpec,
) -> Result<f64> {
    let coords = f.family.values(path)?;
    let hess = f.phi.hessian(&coords)?;
    let n = f.family.len();
    let q: Vec<f64> = match &f.family {
        FunctionalFamily::Terminal(times) => {
            let diracs: Vec<AtomicMeasure> =
                times.iter().map(|&t| AtomicMeasure::dirac(t)).collect::<Result<_>>()?;
            let mut q = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    q[i * n + j] = covariance_form(&diracs[i], &diracs[j], kernel)?;
                }
            }
            q
        }
        FunctionalFamily::Haar(_) => {
            if kernel != KernelSpec::BrownianMotion {
                return Err(Error::UnsupportedKernel(format!(
                    "Haar functionals carry the covariance form only under Brownian \
                     motion, got {}",
                    kernel.name()
                )));
            }
            let mut q = vec![0.0; n * n];
            for i in 0..n {
                q[i * n + i] = 1.0;
            }
            q
        }
    };
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += hess[i * n + j] * q[i * n + j];
        }
    }
    Ok(acc)
}

/// δ(G·h)(ω) = G(ω)·Th(ω) - ⟨DG(ω), h⟩_H for a classical-model h.
pub fn skorohod_gh(g: &CylinderFunction, h: &CMElement, path: &PathSample) -> Result<f64> {
    let th = wiener_integral(h, path)?;
    let g_val = g.eval(path)?;
    let dg = malliavin_deriv(g, path)?;
    Ok(g_val * th - cm_inner(&dg, h)?)
}

/// A simple adapted process: constant cylinder-function values on the
/// intervals (r_j, r_{j+1}] of a grid-aligned partition, each value reading
/// the path only at times ≤ r_j.
#[derive(Debug)]
pub struct SimpleAdaptedProcess {
    grid: TimeGrid,
    nodes: Vec<usize>,
    values: Vec<CylinderFunction>,
}

impl SimpleAdaptedProcess {
    pub fn new(
        grid: TimeGrid,
        breakpoints: &[f64],
        values: Vec<CylinderFunction>,
    ) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::invalid("breakpoints", "need r_0 = 0 and r_K = 1"));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::invalid(
                "breakpoints",
                "partition must start at 0 and end at 1",
            ));
        }
        if values.len() + 1 != breakpoints.len() {
            return Err(Error::invalid(
                "values",
                format!(
                    "{} intervals need {} values, got {}",
                    breakpoints.len() - 1,
                    breakpoints.len() - 1,
                    values.len()
                ),
            ));
        }
        let mut nodes = Vec::with_capacity(breakpoints.len());
        for &r in breakpoints {
            let j = grid.node_index(r).ok_or_else(|| {
                Error::invalid("breakpoints", format!("{r} is not a node of the grid"))
            })?;
            if let Some(&prev) = nodes.last() {
                if j <= prev {
                    return Err(Error::invalid("breakpoints", "must be strictly increasing"));
                }
            }
            nodes.push(j);
        }
        for (j, value) in values.iter().enumerate() {
            let left = grid.node(nodes[j]);
            let latest = value.family.latest_time();
            if latest > left {
                return Err(Error::AdaptednessViolation(format!(
                    "interval ({left}, {}] reads the path at time {latest}",
                    grid.node(nodes[j + 1])
                )));
            }
        }
        Ok(SimpleAdaptedProcess { grid, nodes, values })
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    /// Breakpoints as node indices.
    pub fn breakpoint_nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn values(&self) -> &[CylinderFunction] {
        &self.values
    }
}

/// The Itô sum Σ_j A(r_j, ω)·(ω(r_{j+1}) - ω(r_j)).
pub fn ito_simple(a: &SimpleAdaptedProcess, path: &PathSample) -> Result<f64> {
    if path.grid() != a.grid {
        return Err(Error::invalid("path", "grid does not match the process"));
    }
    let w = path.values();
    let mut acc = 0.0;
    for (j, value) in a.values.iter().enumerate() {
        let g = value.eval(path)?;
        acc += g * (w[a.nodes[j + 1]] - w[a.nodes[j]]);
    }
    Ok(acc)
}

/// Tabulates an H-valued chaos element at fixed coordinates as the classical
/// Cameron-Martin element Σ c_{α,j} F_α(coords)·Je_j.
pub fn derivative_element(
    d: &HValuedChaos,
    coords: &[f64],
    grid: TimeGrid,
) -> Result<CMElement> {
    let mut hdot = vec![0.0; grid.cells()];
    let indices = crate::haar::ordered_haar_indices(grid.cells());
    for (alpha, j, coeff) in d.terms() {
        if j == 0 || j as usize > indices.len() {
            return Err(Error::invalid(
                "direction",
                format!("direction index {j} outside the grid basis"),
            ));
        }
        let weight = coeff * eval_basis_product(alpha, coords)?;
        let cells = haar_cell_values(indices[(j - 1) as usize], grid)?;
        for (acc, c) in hdot.iter_mut().zip(cells.iter()) {
            *acc += weight * c;
        }
    }
    CMElement::new(grid, hdot, CMModel::Classical)
}

fn eval_basis_product(alpha: &crate::chaos::MultiIndex, coords: &[f64]) -> Result<f64> {
    if alpha.max_basis_index() as usize > coords.len() {
        return Err(Error::invalid(
            "coords",
            format!(
                "multi-index reaches basis index {}, got {} coordinates",
                alpha.max_basis_index(),
                coords.len()
            ),
        ));
    }
    let mut prod = 1.0;
    for &(i, n) in alpha.pairs() {
        prod *= sqrt_factorial(n) * hermite_eval(n, coords[(i - 1) as usize]);
    }
    Ok(prod)
}

/// Packages a chaos expansion as a numeric φ of the coordinates e_1..e_d,
/// with exact gradient and Hessian from H_n' = H_{n-1}.
pub fn chaos_phi(f: &ChaosExpansion) -> Phi {
    let dim = f.max_basis_index() as usize;
    let value = f.clone();
    let grad = f.clone();
    let hess = f.clone();
    Phi::new(dim, move |x: &[f64]| value.eval(x).expect("dimension checked by Phi"))
        .with_gradient(move |x: &[f64]| {
            (1..=dim as u32).map(|i| chaos_partial(&grad, i, x)).collect()
        })
        .with_hessian(move |x: &[f64]| {
            let mut out = Vec::with_capacity(dim * dim);
            for i in 1..=dim as u32 {
                for j in 1..=dim as u32 {
                    out.push(chaos_second_partial(&hess, i, j, x));
                }
            }
            out
        })
}

/// ∂_i of Σ c_α Π √(n_k!)H_{n_k}(x_k), using (√(n!)H_n)' = √(n!)H_{n-1}.
fn chaos_partial(f: &ChaosExpansion, i: u32, x: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (alpha, coeff) in f.terms() {
        if alpha.multiplicity(i) == 0 {
            continue;
        }
        let mut prod = coeff;
        for &(k, n) in alpha.pairs() {
            let s = x[(k - 1) as usize];
            let h = if k == i { hermite_eval(n - 1, s) } else { hermite_eval(n, s) };
            prod *= sqrt_factorial(n) * h;
        }
        acc += prod;
    }
    acc
}

fn chaos_second_partial(f: &ChaosExpansion, i: u32, j: u32, x: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (alpha, coeff) in f.terms() {
        let ni = alpha.multiplicity(i);
        let nj = alpha.multiplicity(j);
        if i == j {
            if ni < 2 {
                continue;
            }
        } else if ni == 0 || nj == 0 {
            continue;
        }
        let mut prod = coeff;
        for &(k, n) in alpha.pairs() {
            let s = x[(k - 1) as usize];
            let drop = if i == j {
                if k == i {
                    2
                } else {
                    0
                }
            } else if k == i || k == j {
                1
            } else {
                0
            };
            prod *= sqrt_factorial(n) * hermite_eval(n - drop, s);
        }
        acc += prod;
    }
    acc
}
