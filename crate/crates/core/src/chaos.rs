//! Wiener-chaos algebra: Hermite polynomials in the 1/n! normalization,
//! multi-index basis functions F_α = Π √(n_i!) H_{n_i}(e_i), finite chaos
//! expansions, degree projections, and the chaos-level derivative.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::cm::{wiener_integral, CMElement, CMModel};
use crate::error::{Error, Result};
use crate::haar::{haar_cell_values, ordered_haar_indices};
use crate::kernels::PathSample;

/// Default cap on tracked chaos degree.
pub const DEFAULT_MAX_DEGREE: u32 = 12;

/// H_n(s) with H₀ = 1, H₁ = s and (n+1)H_{n+1} = s·H_n - H_{n-1}; in this
/// normalization H_n' = H_{n-1} and E[H_n(X)H_m(X)] = δ_{nm}/n!.
pub fn hermite_eval(n: u32, s: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = s;
    for k in 1..n {
        let next = (s * cur - prev) / (k + 1) as f64;
        prev = cur;
        cur = next;
    }
    cur
}

/// √(n!); exact for n ≤ 18 where n! is an exact f64 integer.
pub fn sqrt_factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product::<f64>().sqrt()
}

/// Sparse multi-index α: multiplicities n_i ≥ 1 against basis indices i ≥ 1,
/// stored sorted by basis index with no zero entries.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex {
    pairs: Vec<(u32, u32)>,
}

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex { pairs: Vec::new() }
    }

    /// Builds from (basis index, multiplicity) pairs; sorts, rejects zero
    /// entries and repeated indices.
    pub fn new(pairs: &[(u32, u32)]) -> Result<Self> {
        let mut pairs = pairs.to_vec();
        pairs.sort_unstable();
        for &(i, n) in &pairs {
            if i == 0 {
                return Err(Error::invalid("index", "basis indices start at 1"));
            }
            if n == 0 {
                return Err(Error::invalid("multiplicity", format!("zero entry at index {i}")));
            }
        }
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::invalid("index", "repeated basis index"));
        }
        Ok(MultiIndex { pairs })
    }

    pub fn single(index: u32, multiplicity: u32) -> Result<Self> {
        MultiIndex::new(&[(index, multiplicity)])
    }

    pub fn degree(&self) -> u32 {
        self.pairs.iter().map(|&(_, n)| n).sum()
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn multiplicity(&self, index: u32) -> u32 {
        self.pairs
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|p| self.pairs[p].1)
            .unwrap_or(0)
    }

    /// Largest basis index used, 0 for the empty index.
    pub fn max_basis_index(&self) -> u32 {
        self.pairs.last().map_or(0, |&(i, _)| i)
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// α - 1_j, or None when j is not in the support.
    pub fn lowered(&self, index: u32) -> Option<Self> {
        let p = self.pairs.binary_search_by_key(&index, |&(i, _)| i).ok()?;
        let mut pairs = self.pairs.clone();
        if pairs[p].1 == 1 {
            pairs.remove(p);
        } else {
            pairs[p].1 -= 1;
        }
        Some(MultiIndex { pairs })
    }

    /// α + 1_j.
    pub fn raised(&self, index: u32) -> Result<Self> {
        if index == 0 {
            return Err(Error::invalid("index", "basis indices start at 1"));
        }
        let mut pairs = self.pairs.clone();
        match pairs.binary_search_by_key(&index, |&(i, _)| i) {
            Ok(p) => pairs[p].1 += 1,
            Err(p) => pairs.insert(p, (index, 1)),
        }
        Ok(MultiIndex { pairs })
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pairs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.pairs.iter().map(|&(i, n)| format!("{n}@{i}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

fn parse_multi_index(text: &str) -> Result<MultiIndex> {
    let text = text.trim();
    if text == "0" {
        return Ok(MultiIndex::empty());
    }
    let mut pairs = Vec::new();
    for part in text.split(',') {
        let (mult, index) = part
            .trim()
            .split_once('@')
            .ok_or_else(|| Error::Parse(format!("expected n@i, got `{part}`")))?;
        let n: u32 = mult
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad multiplicity `{mult}`")))?;
        let i: u32 = index
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad basis index `{index}`")))?;
        pairs.push((i, n));
    }
    MultiIndex::new(&pairs).map_err(|e| Error::Parse(format!("invalid multi-index: {e}")))
}

/// Finite chaos expansion Σ_α c_α F_α with a hard cap on tracked degree.
#[derive(Clone, Debug, PartialEq)]
pub struct ChaosExpansion {
    terms: BTreeMap<MultiIndex, f64>,
    max_degree: u32,
}

impl ChaosExpansion {
    pub fn new(max_degree: u32) -> Self {
        ChaosExpansion { terms: BTreeMap::new(), max_degree }
    }

    /// The constant expansion c·F_∅ at the default degree cap.
    pub fn constant(c: f64) -> Self {
        let mut f = ChaosExpansion::new(DEFAULT_MAX_DEGREE);
        f.add_term(MultiIndex::empty(), c).expect("degree 0 is always allowed");
        f
    }

    pub fn from_terms(
        max_degree: u32,
        terms: impl IntoIterator<Item = (MultiIndex, f64)>,
    ) -> Result<Self> {
        let mut f = ChaosExpansion::new(max_degree);
        for (index, coeff) in terms {
            f.add_term(index, coeff)?;
        }
        Ok(f)
    }

    /// Adds coeff·F_α, pruning entries that cancel to exactly zero.
    pub fn add_term(&mut self, index: MultiIndex, coeff: f64) -> Result<()> {
        if index.degree() > self.max_degree {
            return Err(Error::DegreeLimit { limit: self.max_degree, got: index.degree() });
        }
        if !coeff.is_finite() {
            return Err(Error::invalid("coeff", format!("non-finite coefficient {coeff}")));
        }
        match self.terms.entry(index) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = o.get() + coeff;
                if v == 0.0 {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                if coeff != 0.0 {
                    v.insert(coeff);
                }
            }
        }
        Ok(())
    }

    pub fn coefficient(&self, index: &MultiIndex) -> f64 {
        self.terms.get(index).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.terms.iter().map(|(k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    /// Largest degree actually present (0 when empty).
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    pub fn max_basis_index(&self) -> u32 {
        self.terms.keys().map(MultiIndex::max_basis_index).max().unwrap_or(0)
    }

    /// E[F] = the empty-index coefficient.
    pub fn mean(&self) -> f64 {
        self.coefficient(&MultiIndex::empty())
    }

    /// ‖F‖²_{L²} = Σ c_α² by Parseval over the orthonormal F_α.
    pub fn l2_norm_sq(&self) -> f64 {
        self.terms.values().map(|c| c * c).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(_, &c)| c * factor != 0.0)
            .map(|(k, &c)| (k.clone(), c * factor))
            .collect();
        ChaosExpansion { terms, max_degree: self.max_degree }
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        let mut out = ChaosExpansion::new(self.max_degree.max(other.max_degree));
        for (k, c) in self.terms() {
            out.add_term(k.clone(), c)?;
        }
        for (k, c) in other.terms() {
            out.add_term(k.clone(), c)?;
        }
        Ok(out)
    }

    /// F evaluated at coordinates (coords[i-1] feeds basis index i).
    pub fn eval(&self, coords: &[f64]) -> Result<f64> {
        let needed = self.max_basis_index() as usize;
        if coords.len() < needed {
            return Err(Error::invalid(
                "coords",
                format!("support reaches index {needed}, got {} coordinates", coords.len()),
            ));
        }
        let mut acc = 0.0;
        for (index, coeff) in self.terms() {
            let mut prod = coeff;
            for &(i, n) in index.pairs() {
                prod *= sqrt_factorial(n) * hermite_eval(n, coords[(i - 1) as usize]);
            }
            acc += prod;
        }
        Ok(acc)
    }
}

/// Free-function form of [`ChaosExpansion::eval`].
pub fn chaos_eval(f: &ChaosExpansion, coords: &[f64]) -> Result<f64> {
    f.eval(coords)
}

/// J_n: keeps exactly the terms of degree n.
pub fn project_degree(f: &ChaosExpansion, n: u32) -> ChaosExpansion {
    let terms = f
        .terms()
        .filter(|(index, _)| index.degree() == n)
        .map(|(index, coeff)| (index.clone(), coeff))
        .collect();
    ChaosExpansion { terms, max_degree: f.max_degree() }
}

/// H-valued chaos Σ c_{α,j} F_α ⊗ Je_j, the codomain of the derivative.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HValuedChaos {
    terms: BTreeMap<(MultiIndex, u32), f64>,
}

impl HValuedChaos {
    pub fn new() -> Self {
        HValuedChaos::default()
    }

    pub fn add_term(&mut self, index: MultiIndex, direction: u32, coeff: f64) {
        match self.terms.entry((index, direction)) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = o.get() + coeff;
                if v == 0.0 {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                if coeff != 0.0 {
                    v.insert(coeff);
                }
            }
        }
    }

    pub fn coefficient(&self, index: &MultiIndex, direction: u32) -> f64 {
        self.terms.get(&(index.clone(), direction)).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, u32, f64)> {
        self.terms.iter().map(|((k, j), &v)| (k, *j, v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// ‖u‖²_{L²(W;H)} = Σ c_{α,j}².
    pub fn l2_norm_sq(&self) -> f64 {
        self.terms.values().map(|c| c * c).sum()
    }

    /// The ChaosExpansion multiplying Je_j.
    pub fn component(&self, direction: u32) -> ChaosExpansion {
        let terms: BTreeMap<MultiIndex, f64> = self
            .terms
            .iter()
            .filter(|((_, j), _)| *j == direction)
            .map(|((k, _), &v)| (k.clone(), v))
            .collect();
        let degree = terms.keys().map(MultiIndex::degree).max().unwrap_or(0);
        ChaosExpansion { terms, max_degree: DEFAULT_MAX_DEGREE.max(degree) }
    }

    /// Direction indices with nonzero coefficients, ascending.
    pub fn directions(&self) -> Vec<u32> {
        let mut dirs: Vec<u32> = self.terms.keys().map(|&(_, j)| j).collect();
        dirs.sort_unstable();
        dirs.dedup();
        dirs
    }
}

/// D F_α = Σ_j √(n_j) F_{α-1_j} ⊗ Je_j, extended linearly.
pub fn chaos_derivative(f: &ChaosExpansion) -> HValuedChaos {
    let mut out = HValuedChaos::new();
    for (index, coeff) in f.terms() {
        for &(j, n) in index.pairs() {
            let lowered = index.lowered(j).expect("support index is present");
            out.add_term(lowered, j, coeff * f64::from(n).sqrt());
        }
    }
    out
}

/// The first `count` coordinates e_i(ω): Wiener integrals of the canonical
/// Haar functions against the path. Exactly iid N(0,1) under Brownian paths
/// on a dyadic grid.
pub fn haar_coordinates(path: &PathSample, count: usize) -> Result<Vec<f64>> {
    let grid = path.grid();
    if count > grid.cells() {
        return Err(Error::invalid(
            "count",
            format!("{count} exceeds the exact basis size {}", grid.cells()),
        ));
    }
    ordered_haar_indices(count)
        .into_iter()
        .map(|idx| {
            let f = CMElement::new(grid, haar_cell_values(idx, grid)?, CMModel::Classical)?;
            wiener_integral(&f, path)
        })
        .collect()
}

impl fmt::Display for ChaosExpansion {
    /// One term per line, `n@i,m@j : coefficient`, empty index spelled `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (index, coeff) in self.terms() {
            writeln!(f, "{index} : {coeff}")?;
        }
        Ok(())
    }
}

impl FromStr for ChaosExpansion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parsed: Vec<(MultiIndex, f64)> = Vec::new();
        for line in s.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (index_part, coeff_part) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected `index : coeff`, got `{line}`")))?;
            let index = parse_multi_index(index_part)?;
            let coeff: f64 = coeff_part
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient `{}`", coeff_part.trim())))?;
            parsed.push((index, coeff));
        }
        let degree = parsed.iter().map(|(i, _)| i.degree()).max().unwrap_or(0);
        ChaosExpansion::from_terms(DEFAULT_MAX_DEGREE.max(degree), parsed)
    }
}
