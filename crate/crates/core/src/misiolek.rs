//! Misiolek curvature criterion on the 2-sphere in the harmonic basis
//! `e_lm = ∇^⊥ Y_lm`: the flat form, linear combinations, the Coriolis
//! extension, zonal critical rotation ratios, Rossby–Haurwitz waves and the
//! positivity theorem scan.
//!
//! Squares of structure constants are rational multiples of `1/π`, so flat
//! criterion values are exact [`PiMixed`] values. The Coriolis term carries a
//! bare structure constant and is kept as a separate [`PerSqrtPi`].

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{
    integer, mixed_sign, parity_sign, BigRational, PerSqrtPi, PiMixed, SignedSqrtRational,
};
use crate::structure::{admissible_degree, g_real, HarmonicIndex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MisiolekError {
    #[error("harmonic {0} has degree zero and generates no vector field")]
    ZeroDegree(HarmonicIndex),
    #[error("order {0} appears more than once in the combination")]
    CoincidingOrders(i32),
    #[error("a Rossby-Haurwitz wave needs a nonzero order, got {0}")]
    ZonalWave(HarmonicIndex),
    #[error("threshold needs 2 <= m <= m1 <= l1, got l1={l1} m1={m1} m={m}")]
    ThresholdDomain { l1: u32, m1: i32, m: i32 },
    #[error("{0} must be nonnegative")]
    Negative(&'static str),
    #[error("{0} must be positive and finite")]
    NonPositive(&'static str),
    #[error("critical ratios need 1 <= l1, 1 <= l2 and 1 <= m2, got l1={l1} l2={l2} m2={m2}")]
    RatioDomain { l1: u32, l2: u32, m2: i32 },
}

fn nonzero_degree(idx: HarmonicIndex) -> Result<(), MisiolekError> {
    if idx.l() == 0 {
        return Err(MisiolekError::ZeroDegree(idx));
    }
    Ok(())
}

/// One `l3` contribution `g² · (l1(l1+1) - l3(l3+1))`, with `g²` as a
/// coefficient of `1/π`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summand {
    pub l3: u32,
    pub g_squared: BigRational,
    pub weight: i64,
}

impl Summand {
    pub fn per_pi(&self) -> BigRational {
        &self.g_squared * integer(self.weight)
    }
}

/// A Misiolek-criterion evaluation and its decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct MCReport {
    pub a: HarmonicIndex,
    pub b: HarmonicIndex,
    pub summands: Vec<Summand>,
    /// `-m1² δ^{l1}_{l2} δ^{m1}_{m2}`
    pub delta_term: BigRational,
    pub rotation: BigRational,
    /// `(-1)^{m2} m2 g^{l2 -m2}_{l1 m1 l2 m2}`
    pub coriolis_slope: PerSqrtPi,
    /// `rotation · coriolis_slope`
    pub coriolis_term: PerSqrtPi,
    /// Summands plus the delta term.
    pub value: PiMixed,
    pub value_float: f64,
}

impl MCReport {
    pub fn flat(&self) -> PiMixed {
        PiMixed::per_pi(self.summands.iter().map(Summand::per_pi).sum())
    }

    /// Certified sign of the full value including the Coriolis term.
    pub fn sign(&self) -> Option<Ordering> {
        mixed_sign(&self.value, &self.coriolis_term)
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Some(Ordering::Greater)
    }

    /// `value` equals the sum of its parts, exactly.
    pub fn decomposition_holds(&self) -> bool {
        let rebuilt = self.flat().add(&PiMixed::rational(self.delta_term.clone()));
        rebuilt == self.value && self.coriolis_term == self.coriolis_slope.scale(&self.rotation)
    }

    fn finish(mut self) -> Self {
        self.value_float = self.value.to_f64() + self.coriolis_term.to_f64();
        self
    }
}

/// `MC(e_a, e_b) = Σ_{l3} (g^{l3, -(m1+m2)}_{l1 m1 l2 m2})² (l1(l1+1) - l3(l3+1))`.
pub fn mc_flat(a: HarmonicIndex, b: HarmonicIndex) -> Result<MCReport, MisiolekError> {
    nonzero_degree(a)?;
    nonzero_degree(b)?;
    let m3 = -(a.m() + b.m());
    let summands: Vec<Summand> = (a.l().abs_diff(b.l()) + 1..a.l() + b.l())
        .filter(|&l3| admissible_degree(a.l(), b.l(), l3) && m3.unsigned_abs() <= l3)
        .map(|l3| Summand {
            l3,
            g_squared: g_real(a.l(), a.m(), b.l(), b.m(), l3, m3).square_per_pi(),
            weight: a.eigen() - (l3 as i64) * (l3 as i64 + 1),
        })
        .collect();
    let value = PiMixed::per_pi(summands.iter().map(Summand::per_pi).sum());
    Ok(MCReport {
        a,
        b,
        summands,
        delta_term: BigRational::zero(),
        rotation: BigRational::zero(),
        coriolis_slope: PerSqrtPi::zero(),
        coriolis_term: PerSqrtPi::zero(),
        value,
        value_float: 0.0,
    }
    .finish())
}

/// `MC(e_{l1 m1}, e_{l2 m2}) == MC(e_{l1 -m1}, e_{l2 -m2})`, exactly.
pub fn mc_symmetry_negate(a: HarmonicIndex, b: HarmonicIndex) -> Result<bool, MisiolekError> {
    Ok(mc_flat(a, b)?.value == mc_flat(a.negated(), b.negated())?.value)
}

/// Complex coefficient with exact rational parts.
pub type ExactComplex = Complex<BigRational>;

/// Criterion along `e_a` probed by `e_base + Σ x_j e_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinationReport {
    pub base: MCReport,
    /// `(|x_j|², MC(e_a, e_j))`
    pub perturbations: Vec<(BigRational, MCReport)>,
    pub value: PiMixed,
    pub value_float: f64,
}

/// `MC(e_a, e_base + Σ x_j e_j) = MC(e_a, e_base) + Σ |x_j|² MC(e_a, e_j)`.
/// Only valid when all orders differ, which is enforced.
pub fn mc_combination(
    a: HarmonicIndex,
    base: HarmonicIndex,
    perturbations: &[(ExactComplex, HarmonicIndex)],
) -> Result<CombinationReport, MisiolekError> {
    let mut orders = vec![base.m()];
    for (_, idx) in perturbations {
        if orders.contains(&idx.m()) {
            return Err(MisiolekError::CoincidingOrders(idx.m()));
        }
        orders.push(idx.m());
    }
    let base_report = mc_flat(a, base)?;
    let mut value = base_report.value.clone();
    let mut parts = Vec::with_capacity(perturbations.len());
    for (x, idx) in perturbations {
        let weight = x.norm_sqr();
        let report = mc_flat(a, *idx)?;
        value = value.add(&report.value.scale(&weight));
        parts.push((weight, report));
    }
    let value_float = value.to_f64();
    Ok(CombinationReport {
        base: base_report,
        perturbations: parts,
        value,
        value_float,
    })
}

/// `(-1)^{m2} m2 g^{l2 -m2}_{l1 m1 l2 m2}`, the rotation-rate coefficient.
pub fn coriolis_slope(a: HarmonicIndex, b: HarmonicIndex) -> PerSqrtPi {
    let factor = integer(parity_sign(b.m() as i64) * b.m() as i64);
    g_real(a.l(), a.m(), b.l(), b.m(), b.l(), -b.m()).scale(&factor)
}

/// Criterion with rotation rate `a`:
/// `MC(e_a, e_b) - m1² δ^{l1}_{l2} δ^{m1}_{m2} + a (-1)^{m2} m2 g^{l2 -m2}_{l1 m1 l2 m2}`.
pub fn mc_coriolis(a: HarmonicIndex, b: HarmonicIndex, rotation: &BigRational) -> Result<MCReport, MisiolekError> {
    let mut report = mc_flat(a, b)?;
    if a == b {
        report.delta_term = -integer(a.m() as i64 * a.m() as i64);
        report.value = report.value.add(&PiMixed::rational(report.delta_term.clone()));
    }
    report.rotation = rotation.clone();
    report.coriolis_slope = coriolis_slope(a, b);
    report.coriolis_term = report.coriolis_slope.scale(rotation);
    Ok(report.finish())
}

/// Side of the critical ratio on which the Coriolis criterion is positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// positive for `a > ratio`
    #[serde(rename = ">")]
    Above,
    /// positive for `a < ratio`
    #[serde(rename = "<")]
    Below,
}

impl Direction {
    pub fn symbol(self) -> &'static str {
        match self {
            Direction::Above => ">",
            Direction::Below => "<",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        match s {
            ">" => Some(Direction::Above),
            "<" => Some(Direction::Below),
            _ => None,
        }
    }
}

/// Why a critical ratio has a vanishing denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UndefinedReason {
    /// `l1 + 2 l2` is even
    Parity,
    /// `l3 = l2` lies outside `[|l1-l2|+1, l1+l2-1]`
    Triangle,
    /// the 3j symbol itself vanishes
    VanishingSymbol,
}

impl UndefinedReason {
    pub fn as_str(self) -> &'static str {
        match self {
            UndefinedReason::Parity => "parity",
            UndefinedReason::Triangle => "triangle",
            UndefinedReason::VanishingSymbol => "vanishing-symbol",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CriticalRatio {
    Defined {
        /// The ratio is `-R/(s√π)` for flat value `R/π` and slope `s/√π`,
        /// i.e. a signed square root of a rational over `√π`.
        exact: PerSqrtPi,
        direction: Direction,
    },
    Undefined(UndefinedReason),
    NotApplicable,
}

impl CriticalRatio {
    pub fn value(&self) -> Option<f64> {
        match self {
            CriticalRatio::Defined { exact, .. } => Some(exact.to_f64()),
            _ => None,
        }
    }

    pub fn direction(&self) -> Option<Direction> {
        match self {
            CriticalRatio::Defined { direction, .. } => Some(*direction),
            _ => None,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            CriticalRatio::Defined { .. } => "ok",
            CriticalRatio::Undefined(_) => "undefined",
            CriticalRatio::NotApplicable => "not-applicable",
        }
    }
}

/// Rotation rate at which `mc_coriolis(e_{l1 0}, e_{l2 m2}, a)` changes sign.
pub fn critical_ratio(l1: u32, l2: u32, m2: i32) -> Result<CriticalRatio, MisiolekError> {
    if l1 == 0 || l2 == 0 || m2 < 1 {
        return Err(MisiolekError::RatioDomain { l1, l2, m2 });
    }
    if m2.unsigned_abs() > l2 {
        return Ok(CriticalRatio::NotApplicable);
    }
    let zonal = HarmonicIndex::new(l1, 0).expect("order zero");
    let probe = HarmonicIndex::new(l2, m2).expect("checked order");
    let slope = coriolis_slope(zonal, probe);
    if slope.is_zero() {
        let reason = if (l1 + 2 * l2) % 2 == 0 {
            UndefinedReason::Parity
        } else if !admissible_degree(l1, l2, l2) {
            UndefinedReason::Triangle
        } else {
            UndefinedReason::VanishingSymbol
        };
        return Ok(CriticalRatio::Undefined(reason));
    }
    let flat = mc_flat(zonal, probe)?.value.per_pi;
    // -(R/π)/(s/√π) = -(R/s)/√π with R/s = sign(R)sign(s)√(R²/s²)
    let negative = flat.is_positive() == (slope.0.signum() > 0) && !flat.is_zero();
    let radicand = &flat * &flat / slope.0.square();
    let exact = PerSqrtPi(SignedSqrtRational::new(negative, radicand));
    let direction = if slope.0.signum() > 0 {
        Direction::Above
    } else {
        Direction::Below
    };
    Ok(CriticalRatio::Defined { exact, direction })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalCell {
    pub l2: u32,
    pub m2: i32,
    pub ratio: CriticalRatio,
}

/// Critical ratios for `l2, m2 ∈ 1..=l2_max`, rows ordered by `l2` then `m2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalRatioTable {
    pub l1: u32,
    pub l2_max: u32,
    pub cells: Vec<CriticalCell>,
}

impl CriticalRatioTable {
    pub fn get(&self, l2: u32, m2: i32) -> Option<&CriticalRatio> {
        self.cells.iter().find(|c| c.l2 == l2 && c.m2 == m2).map(|c| &c.ratio)
    }

    pub fn defined(&self) -> usize {
        self.cells
            .iter()
            .filter(|c| matches!(c.ratio, CriticalRatio::Defined { .. }))
            .count()
    }
}

pub fn critical_table(l1: u32, l2_max: u32) -> Result<CriticalRatioTable, MisiolekError> {
    if l1 == 0 || l2_max == 0 {
        return Err(MisiolekError::RatioDomain {
            l1,
            l2: l2_max,
            m2: 1,
        });
    }
    let keys: Vec<(u32, i32)> = (1..=l2_max)
        .flat_map(|l2| (1..=l2_max as i32).map(move |m2| (l2, m2)))
        .collect();
    let cells = keys
        .par_iter()
        .map(|&(l2, m2)| {
            critical_ratio(l1, l2, m2).map(|ratio| CriticalCell { l2, m2, ratio })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CriticalRatioTable { l1, l2_max, cells })
}

/// A cell of the published critical-ratio table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PublishedCell {
    Value(f64),
    /// printed as `0`
    Zero,
    /// printed as `--`
    Blank,
}

/// Published critical ratios for `l1 ∈ {3, 5, 7}`, `m2 = 1..=6`, to four
/// significant figures. Negative entries are the `a < ratio` cases.
pub const PUBLISHED_CRITICAL_RATIOS: &[(u32, u32, [PublishedCell; 6])] = {
    use PublishedCell::{Blank as B, Value as V, Zero as Z};
    &[
        (3, 2, [V(2.983), V(-19.39), B, B, B, B]),
        (3, 3, [V(12.20), V(30.53), V(-20.35), B, B, B]),
        (3, 4, [V(41.51), V(43.87), V(73.68), V(-24.43), B, B]),
        (3, 5, [V(80.5), V(77.62), V(78.54), V(192.4), V(-31.31), B]),
        (5, 2, [Z, Z, B, B, B, B]),
        (5, 3, [V(19.41), V(-71.19), V(170.4), Z, Z, Z]),
        (5, 4, [V(45.64), V(269.0), V(-60.40), V(125.4), Z, Z]),
        (5, 5, [V(101.6), V(226.5), V(-616.9), V(-72.31), V(123.5), Z]),
        (7, 2, [Z, Z, B, B, B, B]),
        (7, 3, [Z, Z, Z, B, B, B]),
        (7, 4, [V(71.66), V(-205.5), V(276.7), V(-1279.0), B, B]),
        (7, 5, [V(127.8), V(4792.0), V(-171.4), V(182.1), V(-713.5), B]),
        (7, 6, [V(234.1), V(881.2), V(-475.7), V(-245.1), V(175.2), V(-569.9)]),
    ]
};

/// Relative tolerance matching four printed significant figures.
pub const TABLE_TOLERANCE: f64 = 5e-3;

/// Outcome of comparing one computed cell with its published value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableComparison {
    pub l1: u32,
    pub l2: u32,
    pub m2: i32,
    pub published: Option<f64>,
    pub computed: Option<f64>,
    pub status: String,
    pub direction: Option<Direction>,
    pub relative_error: Option<f64>,
    pub sign_ok: bool,
    pub magnitude_ok: bool,
}

impl TableComparison {
    pub fn passed(&self) -> bool {
        self.sign_ok && self.magnitude_ok
    }
}

/// Compare every published cell against [`critical_ratio`]. Printed zeros
/// must come out undefined (or not applicable past `m2 = l2`); blanks must be
/// not applicable.
pub fn compare_published_table() -> Vec<TableComparison> {
    PUBLISHED_CRITICAL_RATIOS
        .par_iter()
        .flat_map_iter(|&(l1, l2, row)| {
            row.into_iter().enumerate().map(move |(k, cell)| {
                let m2 = k as i32 + 1;
                let ratio = critical_ratio(l1, l2, m2).expect("published cells are in range");
                let computed = ratio.value();
                let direction = ratio.direction();
                let (published, sign_ok, magnitude_ok, relative_error) = match cell {
                    PublishedCell::Value(v) => {
                        let expect_dir = if v < 0.0 { Direction::Below } else { Direction::Above };
                        match computed {
                            Some(c) => {
                                let rel = (c - v).abs() / v.abs();
                                let sign_ok = (c < 0.0) == (v < 0.0) && direction == Some(expect_dir);
                                (Some(v), sign_ok, rel <= TABLE_TOLERANCE, Some(rel))
                            }
                            None => (Some(v), false, false, None),
                        }
                    }
                    PublishedCell::Zero => {
                        let ok = match ratio {
                            CriticalRatio::Undefined(_) => m2.unsigned_abs() <= l2,
                            CriticalRatio::NotApplicable => m2.unsigned_abs() > l2,
                            CriticalRatio::Defined { .. } => false,
                        };
                        (None, ok, ok, None)
                    }
                    PublishedCell::Blank => {
                        let ok = ratio == CriticalRatio::NotApplicable;
                        (None, ok, ok, None)
                    }
                };
                TableComparison {
                    l1,
                    l2,
                    m2,
                    published,
                    computed,
                    status: ratio.status().to_string(),
                    direction,
                    relative_error,
                    sign_ok,
                    magnitude_ok,
                }
            })
        })
        .collect()
}

/// Rossby–Haurwitz wave `A Y_{l1 m1}(λ - ωt, μ) - C μ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RHWave {
    pub amplitude: ExactComplex,
    pub c: BigRational,
    pub wave: HarmonicIndex,
    pub omega: BigRational,
    pub alpha2: BigRational,
}

impl RHWave {
    /// Wave with `ω = 0` and `α² = 0`; the phase speed does not enter the
    /// criterion.
    pub fn new(amplitude: ExactComplex, c: BigRational, wave: HarmonicIndex) -> Result<Self, MisiolekError> {
        if wave.m() == 0 {
            return Err(MisiolekError::ZonalWave(wave));
        }
        Ok(Self {
            amplitude,
            c,
            wave,
            omega: BigRational::zero(),
            alpha2: BigRational::zero(),
        })
    }

    /// Wave whose phase speed solves
    /// `ω (l1(l1+1) + α²) = l1(l1+1) C - 2C + a`.
    pub fn solution(
        amplitude: ExactComplex,
        c: BigRational,
        wave: HarmonicIndex,
        alpha2: BigRational,
        rotation: &BigRational,
    ) -> Result<Self, MisiolekError> {
        if alpha2.is_negative() {
            return Err(MisiolekError::Negative("alpha^2"));
        }
        let mut w = Self::new(amplitude, c, wave)?;
        let eigen = integer(wave.eigen());
        w.omega = (&eigen * &w.c - integer(2) * &w.c + rotation) / (&eigen + &alpha2);
        w.alpha2 = alpha2;
        Ok(w)
    }

    pub fn satisfies_solution_condition(&self, rotation: &BigRational) -> bool {
        let eigen = integer(self.wave.eigen());
        &self.omega * (&eigen + &self.alpha2) == &eigen * &self.c - integer(2) * &self.c + rotation
    }
}

/// Criterion along a Rossby–Haurwitz wave, term by term.
#[derive(Debug, Clone, PartialEq)]
pub struct RhwReport {
    pub probe: HarmonicIndex,
    pub amplitude_sq: BigRational,
    /// `MC(e_{l1 m1}, e_{l2 m2})`
    pub wave_mc: MCReport,
    /// `C² m2² (2 - l2(l2+1))`
    pub zonal_term: BigRational,
    /// `-|A|² m1² δ^{l1}_{l2} δ^{m1}_{m2}`
    pub delta_term: BigRational,
    /// `-a m2² C`
    pub rotation_term: BigRational,
    pub value: PiMixed,
    pub value_float: f64,
}

impl RhwReport {
    pub fn sign(&self) -> Option<Ordering> {
        self.value.exact_sign()
    }
}

/// `|A|² MC(e_{l1 m1}, e_{l2 m2}) + C² m2² (2 - l2(l2+1)) - |A|² m1² δδ - a m2² C`.
pub fn rhw_mc(wave: &RHWave, probe: HarmonicIndex, rotation: &BigRational) -> Result<RhwReport, MisiolekError> {
    if wave.wave.m() == 0 {
        return Err(MisiolekError::ZonalWave(wave.wave));
    }
    let amplitude_sq = wave.amplitude.norm_sqr();
    let wave_mc = mc_flat(wave.wave, probe)?;
    let m2sq = integer(probe.m() as i64 * probe.m() as i64);
    let zonal_term = &wave.c * &wave.c * &m2sq * integer(2 - probe.eigen());
    let delta_term = if wave.wave == probe {
        -(&amplitude_sq * integer(wave.wave.m() as i64 * wave.wave.m() as i64))
    } else {
        BigRational::zero()
    };
    let rotation_term = -(rotation * &m2sq * &wave.c);
    let value = wave_mc
        .value
        .scale(&amplitude_sq)
        .add(&PiMixed::rational(&zonal_term + &delta_term + &rotation_term));
    let value_float = value.to_f64();
    Ok(RhwReport {
        probe,
        amplitude_sq,
        wave_mc,
        zonal_term,
        delta_term,
        rotation_term,
        value,
        value_float,
    })
}

/// Smallest `|A|²/C²` giving a positive criterion for probe `e_{m -m}` at
/// rotation `a = -K C`, as a rational multiple of `π`.
#[derive(Debug, Clone, PartialEq)]
pub struct Threshold {
    pub pi_coefficient: BigRational,
    pub value: f64,
}

/// `m² (m(m+1) - 2 - K) / MC(e_{l1 m1}, e_{m -m})` for `2 <= m <= m1 <= l1`.
pub fn rhw_threshold(l1: u32, m1: i32, m: i32, k: &BigRational) -> Result<Threshold, MisiolekError> {
    if !(2 <= m && m <= m1 && m1.unsigned_abs() <= l1) {
        return Err(MisiolekError::ThresholdDomain { l1, m1, m });
    }
    if k.is_negative() {
        return Err(MisiolekError::Negative("K"));
    }
    let wave = HarmonicIndex::new(l1, m1).expect("checked order");
    let probe = HarmonicIndex::new(m as u32, -m).expect("checked order");
    let mc = mc_flat(wave, probe)?.value.per_pi;
    let m = m as i64;
    let numerator = integer(m * m) * (integer(m * (m + 1) - 2) - k);
    let pi_coefficient = numerator / mc;
    let value = crate::exact::rational_to_f64(&pi_coefficient).unwrap_or(f64::NAN) * PI;
    Ok(Threshold { pi_coefficient, value })
}

/// `‖e_lm‖ = √(l(l+1))`.
pub fn harmonic_norm(idx: HarmonicIndex) -> f64 {
    (idx.eigen() as f64).sqrt()
}

/// `π / √(κ ‖v‖)`: a conjugate point occurs before this time when
/// `MC > κ ‖v‖³`.
pub fn conjugate_time(kappa: f64, v_norm: f64) -> Result<f64, MisiolekError> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(MisiolekError::NonPositive("kappa"));
    }
    if !(v_norm > 0.0 && v_norm.is_finite()) {
        return Err(MisiolekError::NonPositive("v_norm"));
    }
    Ok(PI / (kappa * v_norm).sqrt())
}

/// Monotone ratio chain from the positivity argument for one `(l1, m1, m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub l1: u32,
    pub m1: i32,
    pub m: i32,
    /// `h` for even `m`, `f` for odd `m`
    pub kind: char,
    pub values: Vec<f64>,
    pub above_one: bool,
    pub increasing: bool,
}

/// Result of [`theorem_scan`].
#[derive(Debug, Clone, Default)]
pub struct TheoremReport {
    pub l_max: u32,
    pub part_i_checked: u64,
    pub part_ii_checked: u64,
    pub falsifications: Vec<MCReport>,
    pub chains: Vec<ChainRecord>,
    pub extended_checked: u64,
    pub extended_nonpositive: Vec<(u32, i32, i32)>,
    pub zonal_checked: u64,
    pub zonal_positive: Vec<(u32, u32, i32)>,
}

impl TheoremReport {
    /// Parts i and ii and the zonal bound hold everywhere scanned.
    pub fn passed(&self) -> bool {
        self.falsifications.is_empty() && self.zonal_positive.is_empty()
    }

    pub fn chains_hold(&self) -> bool {
        self.chains.iter().all(|c| c.above_one && c.increasing)
    }
}

/// `g² w` at `l3` for `MC(e_{l1 m1}, e_{m -m})`, as a coefficient of `1/π`.
fn theorem_term(l1: u32, m1: i32, m: i32, l3: u32) -> BigRational {
    let g = g_real(l1, m1, m as u32, -m, l3, -m1 + m);
    let l1e = (l1 as i64) * (l1 as i64 + 1);
    let l3e = (l3 as i64) * (l3 as i64 + 1);
    g.square_per_pi() * integer((l1e - l3e).abs())
}

fn chain(l1: u32, m1: i32, m: i32) -> Option<ChainRecord> {
    let (kind, ks, offset): (char, Vec<i64>, fn(i64) -> i64) = if m % 2 == 0 {
        ('h', (0..=(m as i64 - 2) / 2).collect(), |k| 2 * k + 1)
    } else {
        ('f', (1..=(m as i64 - 1) / 2).collect(), |k| 2 * k)
    };
    if ks.is_empty() {
        return None;
    }
    let mut exact = Vec::new();
    for k in ks {
        let d = offset(k);
        let lo = l1 as i64 - d;
        if lo < 0 {
            return None;
        }
        let num = theorem_term(l1, m1, m, lo as u32);
        let den = theorem_term(l1, m1, m, (l1 as i64 + d) as u32);
        if den.is_zero() {
            return None;
        }
        exact.push(num / den);
    }
    let one = integer(1);
    let above_one = exact[0] > one;
    let increasing = exact.windows(2).all(|w| w[1] > w[0]);
    let values = exact
        .iter()
        .map(|q| crate::exact::rational_to_f64(q).unwrap_or(f64::INFINITY))
        .collect();
    Some(ChainRecord {
        l1,
        m1,
        m,
        kind,
        values,
        above_one,
        increasing,
    })
}

/// Exact scan of the positivity theorem for degrees `<= l_max`:
///
/// * part i: `MC(e_{l1 m1}, e_{m -m}) > 0` for `1 < m1 <= l1`, `2 <= m <= m1`;
/// * part ii: `MC(e_{l1 1}, e_{l2 1}) > 0` for `2 <= l2 < l1`;
/// * zonal: `MC(e_{l1 0}, e_{l2 m2}) <= 0`.
///
/// The ratio chains and the range `m1 < m <= 2 m1 - 2` are reported only.
pub fn theorem_scan(l_max: u32) -> TheoremReport {
    let mut report = TheoremReport {
        l_max,
        ..Default::default()
    };
    let h = |l: u32, m: i32| HarmonicIndex::new(l, m).expect("valid index");
    for l1 in 2..=l_max {
        for m1 in 2..=l1 as i32 {
            for m in 2..=m1 {
                let r = mc_flat(h(l1, m1), h(m as u32, -m)).expect("nonzero degrees");
                report.part_i_checked += 1;
                if !r.is_positive() {
                    report.falsifications.push(r);
                }
                if let Some(c) = chain(l1, m1, m) {
                    report.chains.push(c);
                }
            }
            for m in m1 + 1..=2 * m1 - 2 {
                if m as u32 > l_max {
                    break;
                }
                report.extended_checked += 1;
                if !mc_flat(h(l1, m1), h(m as u32, -m)).expect("nonzero degrees").is_positive() {
                    report.extended_nonpositive.push((l1, m1, m));
                }
            }
        }
    }
    for l1 in 3..=l_max {
        for l2 in 2..l1 {
            let r = mc_flat(h(l1, 1), h(l2, 1)).expect("nonzero degrees");
            report.part_ii_checked += 1;
            if !r.is_positive() {
                report.falsifications.push(r);
            }
        }
    }
    for l1 in 1..=l_max {
        for probe in HarmonicIndex::all(1, l_max) {
            report.zonal_checked += 1;
            let r = mc_flat(h(l1, 0), probe).expect("nonzero degrees");
            if r.value.exact_sign() == Some(Ordering::Greater) {
                report.zonal_positive.push((l1, probe.l(), probe.m()));
            }
        }
    }
    report
}

/// `K C² m2²`, the gain from rotation `a = -K C` in [`rhw_mc`].
pub fn rotation_gain(k: &BigRational, c: &BigRational, m2: i32) -> BigRational {
    k * c * c * integer(m2 as i64 * m2 as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational;

    fn h(l: u32, m: i32) -> HarmonicIndex {
        HarmonicIndex::new(l, m).unwrap()
    }

    #[test]
    fn known_flat_values() {
        let r = mc_flat(h(1, 0), h(2, 2)).unwrap();
        assert_eq!(r.value, PiMixed::per_pi(integer(-12)));
        assert!((r.value_float + 12.0 / PI).abs() < 1e-14);
        let r = mc_flat(h(3, 2), h(2, -2)).unwrap();
        assert_eq!(r.value, PiMixed::per_pi(integer(10)));
        assert!(r.is_positive());
        assert!(r.decomposition_holds());
    }

    #[test]
    fn degree_one_probe_vanishes() {
        for l1 in 1..=6u32 {
            for m1 in -(l1 as i32)..=l1 as i32 {
                for m2 in -1..=1 {
                    assert!(mc_flat(h(l1, m1), h(1, m2)).unwrap().value.is_zero());
                }
            }
        }
    }

    #[test]
    fn zero_degree_rejected() {
        assert_eq!(
            mc_flat(h(0, 0), h(2, 1)).unwrap_err(),
            MisiolekError::ZeroDegree(h(0, 0))
        );
    }

    #[test]
    fn negation_symmetry_examples() {
        assert!(mc_symmetry_negate(h(3, 2), h(2, -2)).unwrap());
        assert!(mc_symmetry_negate(h(5, 1), h(4, 1)).unwrap());
        assert!(mc_symmetry_negate(h(4, 0), h(2, 0)).unwrap());
    }

    #[test]
    fn combination_reduces_and_rejects() {
        let a = h(3, 2);
        let base = h(2, -2);
        let plain = mc_flat(a, base).unwrap().value;
        assert_eq!(mc_combination(a, base, &[]).unwrap().value, plain);
        let zero = ExactComplex::new(integer(0), integer(0));
        assert_eq!(mc_combination(a, base, &[(zero.clone(), h(3, -1))]).unwrap().value, plain);
        assert_eq!(
            mc_combination(a, base, &[(zero, h(4, -2))]).unwrap_err(),
            MisiolekError::CoincidingOrders(-2)
        );
    }

    #[test]
    fn coriolis_terms() {
        let r = mc_coriolis(h(3, 1), h(2, 1), &integer(5)).unwrap();
        assert!(r.coriolis_term.is_zero());
        let flat = mc_flat(h(3, 1), h(2, 1)).unwrap();
        assert_eq!(r.value, flat.value);
        let same = mc_coriolis(h(2, 1), h(2, 1), &integer(0)).unwrap();
        assert_eq!(same.delta_term, integer(-1));
        assert!(same.decomposition_holds());
    }

    #[test]
    fn first_table_cell() {
        let r = critical_ratio(3, 2, 1).unwrap();
        assert_eq!(r.direction(), Some(Direction::Above));
        assert!((r.value().unwrap() - 2.983).abs() / 2.983 < TABLE_TOLERANCE);
        let just_above = rational_from(r.value().unwrap() * (1.0 + 1e-6));
        let just_below = rational_from(r.value().unwrap() * (1.0 - 1e-6));
        assert!(mc_coriolis(h(3, 0), h(2, 1), &just_above).unwrap().is_positive());
        assert!(!mc_coriolis(h(3, 0), h(2, 1), &just_below).unwrap().is_positive());
    }

    fn rational_from(x: f64) -> BigRational {
        crate::exact::rational_from_f64(x).unwrap()
    }

    #[test]
    fn undefined_and_not_applicable_cells() {
        assert_eq!(
            critical_ratio(5, 2, 1).unwrap(),
            CriticalRatio::Undefined(UndefinedReason::Triangle)
        );
        assert_eq!(
            critical_ratio(4, 3, 1).unwrap(),
            CriticalRatio::Undefined(UndefinedReason::Parity)
        );
        assert_eq!(critical_ratio(5, 3, 4).unwrap(), CriticalRatio::NotApplicable);
        assert!(critical_ratio(3, 2, 0).is_err());
        let t = critical_table(4, 5).unwrap();
        assert!(t
            .cells
            .iter()
            .all(|c| !matches!(c.ratio, CriticalRatio::Defined { .. })));
        assert_eq!(critical_table(3, 5).unwrap().defined(), 14);
    }

    #[test]
    fn rhw_special_cases() {
        let a0 = ExactComplex::new(integer(0), integer(0));
        let w = RHWave::new(a0, integer(1), h(3, 2)).unwrap();
        let r = rhw_mc(&w, h(4, 2), &integer(0)).unwrap();
        assert_eq!(r.value, PiMixed::rational(integer(-72)));
        let a1 = ExactComplex::new(integer(1), integer(0));
        let w = RHWave::new(a1, integer(1), h(3, 2)).unwrap();
        let k = integer(2);
        let r = rhw_mc(&w, h(1, 1), &-(&k * &w.c)).unwrap();
        assert_eq!(r.value, PiMixed::rational(integer(2)));
        assert!(RHWave::new(ExactComplex::new(integer(1), integer(0)), integer(1), h(3, 0)).is_err());
    }

    #[test]
    fn solution_condition() {
        let a = ExactComplex::new(integer(1), integer(1));
        let rot = rational(7, 3);
        let w = RHWave::solution(a, integer(2), h(4, 3), rational(1, 2), &rot).unwrap();
        assert!(w.satisfies_solution_condition(&rot));
        assert!(!w.satisfies_solution_condition(&integer(0)));
    }

    #[test]
    fn threshold_domain_and_zero() {
        assert!(rhw_threshold(3, 2, 3, &integer(0)).is_err());
        assert!(rhw_threshold(3, 1, 1, &integer(0)).is_err());
        let t = rhw_threshold(3, 2, 2, &integer(4)).unwrap();
        assert!(t.pi_coefficient.is_zero());
        let t0 = rhw_threshold(3, 2, 2, &integer(0)).unwrap();
        // 4·4 / (10/π)
        assert_eq!(t0.pi_coefficient, rational(8, 5));
    }

    #[test]
    fn conjugate_time_values() {
        assert!((conjugate_time(PI, PI).unwrap() - 1.0).abs() < 1e-15);
        assert!((conjugate_time(4.0 * PI, PI).unwrap() - 0.5).abs() < 1e-15);
        assert!(conjugate_time(0.0, 1.0).is_err());
        assert!(conjugate_time(1.0, -1.0).is_err());
        assert!((harmonic_norm(h(3, -1)) - 12f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn small_theorem_scan() {
        let r = theorem_scan(5);
        assert!(r.passed(), "{:?}", r.falsifications);
        assert!(r.part_i_checked > 0 && r.part_ii_checked > 0);
    }
}
