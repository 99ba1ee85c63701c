//! Quadrature oracle: spherical harmonics sampled on a Gauss–Legendre ×
//! uniform-longitude grid, analytic Poisson brackets, and projection back onto
//! the harmonic basis. This recovers the structure constants numerically and
//! independently of the 3j machinery.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::structure::{g_complex, HarmonicIndex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("degree {degree} exceeds the grid resolution l_max = {l_max}")]
    Resolution { degree: u32, l_max: u32 },
    #[error("Poisson bracket needs derivative fields on both arguments")]
    MissingDerivatives,
    #[error("grid functions come from grids of different size")]
    GridMismatch,
}

/// Tensor grid in `(μ, λ)` with `μ = cos(colatitude)`.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    l_max: u32,
    mu: Vec<f64>,
    mu_weights: Vec<f64>,
    lambda: Vec<f64>,
}

impl QuadratureGrid {
    /// Grid resolving brackets and projections for degrees up to `l_max`:
    /// `2 l_max + 2` Gauss–Legendre nodes and `4 l_max + 4` longitudes.
    pub fn new(l_max: u32) -> Self {
        let n_mu = 2 * l_max as usize + 2;
        let n_lambda = 4 * l_max as usize + 4;
        let rule = GaussLegendre::new(NonZeroUsize::new(n_mu).expect("n_mu >= 2"));
        let mu = rule.nodes().copied().collect();
        let mu_weights = rule.weights().copied().collect();
        let lambda = (0..n_lambda).map(|j| 2.0 * PI * j as f64 / n_lambda as f64).collect();
        Self {
            l_max,
            mu,
            mu_weights,
            lambda,
        }
    }

    pub fn l_max(&self) -> u32 {
        self.l_max
    }

    pub fn mu_nodes(&self) -> &[f64] {
        &self.mu
    }

    pub fn mu_weights(&self) -> &[f64] {
        &self.mu_weights
    }

    pub fn lambda_nodes(&self) -> &[f64] {
        &self.lambda
    }

    pub fn len(&self) -> usize {
        self.mu.len() * self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Quadrature weight of each point, longitude-major within a latitude row.
    fn point_weights(&self) -> impl Iterator<Item = f64> + '_ {
        let dl = 2.0 * PI / self.lambda.len() as f64;
        self.mu_weights
            .iter()
            .flat_map(move |&w| std::iter::repeat_n(w * dl, self.lambda.len()))
    }

    fn check_degree(&self, degree: u32) -> Result<(), OracleError> {
        if degree > self.l_max {
            return Err(OracleError::Resolution {
                degree,
                l_max: self.l_max,
            });
        }
        Ok(())
    }
}

/// Complex samples on a grid, optionally with `∂/∂λ` and `∂/∂μ` samples.
#[derive(Debug, Clone)]
pub struct GridFunction {
    l_max: u32,
    pub values: Vec<Complex64>,
    pub d_lambda: Option<Vec<Complex64>>,
    pub d_mu: Option<Vec<Complex64>>,
}

impl GridFunction {
    pub fn l_max(&self) -> u32 {
        self.l_max
    }

    pub fn has_derivatives(&self) -> bool {
        self.d_lambda.is_some() && self.d_mu.is_some()
    }

    /// `Y_lm` with analytic derivatives.
    pub fn harmonic(grid: &QuadratureGrid, idx: HarmonicIndex) -> Result<Self, OracleError> {
        grid.check_degree(idx.l())?;
        let (l, m) = (idx.l(), idx.m());
        let phase = condon_shortley(m);
        let n = grid.len();
        let mut values = Vec::with_capacity(n);
        let mut d_lambda = Vec::with_capacity(n);
        let mut d_mu = Vec::with_capacity(n);
        let im = Complex64::new(0.0, m as f64);
        for &mu in &grid.mu {
            let (p, dp) = normalized_legendre_with_derivative(l, m.unsigned_abs(), mu);
            for &lambda in &grid.lambda {
                let e = Complex64::from_polar(phase, m as f64 * lambda);
                let v = e * p;
                values.push(v);
                d_lambda.push(im * v);
                d_mu.push(e * dp);
            }
        }
        Ok(Self {
            l_max: grid.l_max,
            values,
            d_lambda: Some(d_lambda),
            d_mu: Some(d_mu),
        })
    }

    /// The coordinate function `μ`.
    pub fn mu(grid: &QuadratureGrid) -> Self {
        let n_lambda = grid.lambda.len();
        let values: Vec<Complex64> = grid
            .mu
            .iter()
            .flat_map(|&mu| std::iter::repeat_n(Complex64::new(mu, 0.0), n_lambda))
            .collect();
        let n = values.len();
        Self {
            l_max: grid.l_max,
            values,
            d_lambda: Some(vec![Complex64::new(0.0, 0.0); n]),
            d_mu: Some(vec![Complex64::new(1.0, 0.0); n]),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Associated Legendre function `P^m_l(μ) = (1-μ²)^{m/2} d^m P_l/dμ^m`,
/// without the Condon–Shortley phase.
pub fn legendre_p(l: u32, m: u32, mu: f64) -> f64 {
    assert!(m <= l, "legendre_p requires m <= l");
    let s = (1.0 - mu * mu).max(0.0).sqrt();
    let mut pmm = 1.0;
    for k in 1..=m {
        pmm *= (2 * k - 1) as f64 * s;
    }
    if l == m {
        return pmm;
    }
    let mut prev = pmm;
    let mut cur = mu * (2 * m + 1) as f64 * pmm;
    for ll in m + 2..=l {
        let next = ((2 * ll - 1) as f64 * mu * cur - (ll + m - 1) as f64 * prev) / (ll - m) as f64;
        prev = cur;
        cur = next;
    }
    cur
}

/// `C^m_l` without its magnitude: `(-1)^m` for `m > 0`, else `1`.
fn condon_shortley(m: i32) -> f64 {
    if m > 0 && m % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// `√((2l+1)/4π · (l-m)!/(l+m)!) P^m_l(μ)` for `l = m..=top`, by the
/// normalized recurrence so that nothing overflows at moderate degree.
fn normalized_legendre_column(m: u32, top: u32, mu: f64) -> Vec<f64> {
    let s = (1.0 - mu * mu).max(0.0).sqrt();
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for k in 1..=m {
        pmm *= ((2 * k + 1) as f64 / (2 * k) as f64).sqrt() * s;
    }
    let mut column = vec![pmm];
    if top > m {
        column.push(mu * ((2 * m + 3) as f64).sqrt() * pmm);
    }
    for l in m + 2..=top {
        let (lf, mf) = (l as f64, m as f64);
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
        let k = (l - m) as usize;
        column.push(a * (mu * column[k - 1] - b * column[k - 2]));
    }
    column
}

/// Normalized `P̃^m_l(μ)` and its `μ`-derivative, for `|μ| < 1`.
fn normalized_legendre_with_derivative(l: u32, m: u32, mu: f64) -> (f64, f64) {
    let column = normalized_legendre_column(m, l + 1, mu);
    let k = (l - m) as usize;
    let (p, p_next) = (column[k], column[k + 1]);
    let (lf, mf) = (l as f64, m as f64);
    let c = ((2.0 * lf + 1.0) * (lf + 1.0 - mf) * (lf + 1.0 + mf) / (2.0 * lf + 3.0)).sqrt();
    let dp = ((lf + 1.0) * mu * p - c * p_next) / (1.0 - mu * mu);
    (p, dp)
}

/// Normalized spherical harmonic `Y_lm(λ, μ) = C^m_l P^{|m|}_l(μ) e^{imλ}`.
pub fn ylm_eval(idx: HarmonicIndex, lambda: f64, mu: f64) -> Complex64 {
    let m = idx.m();
    let column = normalized_legendre_column(m.unsigned_abs(), idx.l(), mu);
    let p = column[(idx.l() - m.unsigned_abs()) as usize];
    Complex64::from_polar(condon_shortley(m), m as f64 * lambda) * p
}

/// `{f, g} = f_λ g_μ - f_μ g_λ`, pointwise.
pub fn poisson_bracket(f: &GridFunction, g: &GridFunction) -> Result<GridFunction, OracleError> {
    if f.values.len() != g.values.len() {
        return Err(OracleError::GridMismatch);
    }
    let (Some(fl), Some(fm), Some(gl), Some(gm)) = (&f.d_lambda, &f.d_mu, &g.d_lambda, &g.d_mu) else {
        return Err(OracleError::MissingDerivatives);
    };
    let values = fl
        .iter()
        .zip(fm)
        .zip(gl.iter().zip(gm))
        .map(|((a_l, a_m), (b_l, b_m))| a_l * b_m - a_m * b_l)
        .collect();
    Ok(GridFunction {
        l_max: f.l_max.max(g.l_max),
        values,
        d_lambda: None,
        d_mu: None,
    })
}

/// `∫ f · conj(g) dS`, the Hermitian inner product.
pub fn pairing_conjugated(grid: &QuadratureGrid, f: &GridFunction, g: &GridFunction) -> Complex64 {
    grid.point_weights()
        .zip(f.values.iter().zip(&g.values))
        .map(|(w, (a, b))| a * b.conj() * w)
        .sum()
}

/// `∫ f · g dS`, the bilinear pairing.
pub fn pairing_unconjugated(grid: &QuadratureGrid, f: &GridFunction, g: &GridFunction) -> Complex64 {
    grid.point_weights()
        .zip(f.values.iter().zip(&g.values))
        .map(|(w, (a, b))| a * b * w)
        .sum()
}

/// Every harmonic of degree `<= l_max` sampled on one shared grid.
#[derive(Debug, Clone)]
pub struct StructureOracle {
    grid: QuadratureGrid,
    harmonics: Vec<(HarmonicIndex, GridFunction)>,
}

/// Worst disagreement between the oracle and the exact constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub l_max: u32,
    pub tuples: u64,
    pub max_deviation: f64,
    pub worst: Option<[HarmonicIndex; 3]>,
}

impl StructureOracle {
    pub fn new(l_max: u32) -> Self {
        let grid = QuadratureGrid::new(l_max);
        let harmonics = HarmonicIndex::all(0, l_max)
            .map(|idx| (idx, GridFunction::harmonic(&grid, idx).expect("degree within grid")))
            .collect();
        Self { grid, harmonics }
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    fn sampled(&self, idx: HarmonicIndex) -> Result<&GridFunction, OracleError> {
        self.grid.check_degree(idx.l())?;
        let l = idx.l() as i32;
        let pos = (l * l + l + idx.m()) as usize;
        Ok(&self.harmonics[pos].1)
    }

    /// Projection of `{Y_{l1 m1}, Y_{l2 m2}}` onto `Y_{l3 m3}`.
    pub fn coefficient(
        &self,
        a: HarmonicIndex,
        b: HarmonicIndex,
        target: HarmonicIndex,
    ) -> Result<Complex64, OracleError> {
        let bracket = poisson_bracket(self.sampled(a)?, self.sampled(b)?)?;
        Ok(pairing_conjugated(&self.grid, &bracket, self.sampled(target)?))
    }

    /// Compare every `(a, b, target)` with degrees `<= l_max` against
    /// [`g_complex`], including targets that should vanish.
    pub fn compare_all(&self) -> OracleReport {
        let pairs: Vec<(HarmonicIndex, HarmonicIndex)> = self
            .harmonics
            .iter()
            .flat_map(|(a, _)| self.harmonics.iter().map(move |(b, _)| (*a, *b)))
            .collect();
        let per_pair: Vec<(u64, f64, Option<[HarmonicIndex; 3]>)> = pairs
            .par_iter()
            .map(|&(a, b)| {
                let bracket = poisson_bracket(self.sampled(a).unwrap(), self.sampled(b).unwrap())
                    .expect("harmonics carry derivatives");
                let mut worst = (0.0, None);
                for (target, y) in &self.harmonics {
                    let got = pairing_conjugated(&self.grid, &bracket, y);
                    let want = g_complex(a.l(), a.m(), b.l(), b.m(), target.l(), target.m()).to_complex();
                    let dev = (got - want).norm();
                    if dev > worst.0 || worst.1.is_none() {
                        worst = (dev, Some([a, b, *target]));
                    }
                }
                (self.harmonics.len() as u64, worst.0, worst.1)
            })
            .collect();
        let mut report = OracleReport {
            l_max: self.grid.l_max,
            tuples: 0,
            max_deviation: 0.0,
            worst: None,
        };
        for (count, dev, at) in per_pair {
            report.tuples += count;
            if dev > report.max_deviation || report.worst.is_none() {
                report.max_deviation = dev;
                report.worst = at;
            }
        }
        report
    }
}

/// Single-shot oracle value of `G^{l3 m3}_{l1 m1 l2 m2}` on the smallest grid
/// that resolves all three degrees.
pub fn oracle_structure_coeff(
    grid: &QuadratureGrid,
    a: HarmonicIndex,
    b: HarmonicIndex,
    target: HarmonicIndex,
) -> Result<Complex64, OracleError> {
    let ya = GridFunction::harmonic(grid, a)?;
    let yb = GridFunction::harmonic(grid, b)?;
    let yt = GridFunction::harmonic(grid, target)?;
    let bracket = poisson_bracket(&ya, &yb)?;
    Ok(pairing_conjugated(grid, &bracket, &yt))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(l: u32, m: i32) -> HarmonicIndex {
        HarmonicIndex::new(l, m).unwrap()
    }

    #[test]
    fn legendre_small_values() {
        assert_eq!(legendre_p(0, 0, 0.3), 1.0);
        assert_eq!(legendre_p(1, 0, 0.5), 0.5);
        assert!((legendre_p(2, 2, 0.0) - 3.0).abs() < 1e-15);
        let mu: f64 = 0.4;
        assert!((legendre_p(2, 2, mu) - 3.0 * (1.0 - mu * mu)).abs() < 1e-14);
        assert!((legendre_p(3, 1, mu) - 1.5 * (5.0 * mu * mu - 1.0) * (1.0 - mu * mu).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn y00_is_constant() {
        let v = ylm_eval(h(0, 0), 1.2, -0.3);
        assert!((v.re - (1.0 / (4.0 * PI)).sqrt()).abs() < 1e-15);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn normalized_column_matches_direct_formula() {
        let mu = -0.37;
        for l in 0..=8u32 {
            for m in 0..=l {
                let direct = ylm_eval(h(l, -(m as i32)), 0.0, mu).re;
                let mut ratio = 1.0;
                for k in l - m + 1..=l + m {
                    ratio /= k as f64;
                }
                let expect = ((2 * l + 1) as f64 / (4.0 * PI) * ratio).sqrt() * legendre_p(l, m, mu);
                assert!((direct - expect).abs() < 1e-13, "l={l} m={m}");
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let step = 1e-6;
        for (l, m) in [(1u32, 0u32), (3, 1), (5, 5), (6, 2)] {
            for mu in [-0.8, 0.1, 0.65] {
                let (_, dp) = normalized_legendre_with_derivative(l, m, mu);
                let hi = normalized_legendre_column(m, l, mu + step)[(l - m) as usize];
                let lo = normalized_legendre_column(m, l, mu - step)[(l - m) as usize];
                assert!((dp - (hi - lo) / (2.0 * step)).abs() < 1e-6, "l={l} m={m} mu={mu}");
            }
        }
    }

    #[test]
    fn conjugation_identity() {
        for (lambda, mu) in [(0.3, 0.2), (4.1, -0.9), (2.2, 0.55)] {
            for idx in HarmonicIndex::all(0, 5) {
                let lhs = ylm_eval(idx, lambda, mu).conj();
                let sign = if idx.m() % 2 == 0 { 1.0 } else { -1.0 };
                let rhs = ylm_eval(idx.negated(), lambda, mu) * sign;
                assert!((lhs - rhs).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn grid_harmonics_match_pointwise_evaluation() {
        let grid = QuadratureGrid::new(3);
        let f = GridFunction::harmonic(&grid, h(3, -2)).unwrap();
        let n_lambda = grid.lambda_nodes().len();
        let (i, j) = (2, 5);
        let expect = ylm_eval(h(3, -2), grid.lambda_nodes()[j], grid.mu_nodes()[i]);
        assert!((f.values[i * n_lambda + j] - expect).norm() < 1e-15);
    }

    #[test]
    fn orthonormality_under_conjugated_pairing() {
        let grid = QuadratureGrid::new(6);
        let ys: Vec<_> = HarmonicIndex::all(0, 6)
            .map(|i| (i, GridFunction::harmonic(&grid, i).unwrap()))
            .collect();
        for (a, ya) in &ys {
            for (b, yb) in &ys {
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((pairing_conjugated(&grid, ya, yb) - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn bracket_is_antisymmetric() {
        let grid = QuadratureGrid::new(4);
        let f = GridFunction::harmonic(&grid, h(4, 1)).unwrap();
        let b = poisson_bracket(&f, &f).unwrap();
        assert!(b.max_abs() < 1e-13);
    }

    #[test]
    fn bracket_with_mu_rotates() {
        let grid = QuadratureGrid::new(5);
        let mu = GridFunction::mu(&grid);
        let y = GridFunction::harmonic(&grid, h(5, 3)).unwrap();
        let b = poisson_bracket(&mu, &y).unwrap();
        for (got, v) in b.values.iter().zip(&y.values) {
            assert!((got - Complex64::new(0.0, -3.0) * v).norm() < 1e-12);
        }
    }

    #[test]
    fn missing_derivatives_and_resolution_are_errors() {
        let grid = QuadratureGrid::new(2);
        let y = GridFunction::harmonic(&grid, h(1, 1)).unwrap();
        let flat = poisson_bracket(&y, &y).unwrap();
        assert_eq!(poisson_bracket(&flat, &y).unwrap_err(), OracleError::MissingDerivatives);
        assert!(matches!(
            GridFunction::harmonic(&grid, h(3, 0)),
            Err(OracleError::Resolution { degree: 3, l_max: 2 })
        ));
    }

    #[test]
    fn y10_bracket_coefficient() {
        let grid = QuadratureGrid::new(3);
        let c = oracle_structure_coeff(&grid, h(1, 0), h(2, 1), h(2, 1)).unwrap();
        let expect = g_complex(1, 0, 2, 1, 2, 1).to_complex();
        assert!((c - expect).norm() < 1e-12);
        assert!((c.norm() - (3.0 / (4.0 * PI)).sqrt()).abs() < 1e-12);
    }
}
