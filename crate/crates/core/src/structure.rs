//! Structure constants of the Lie algebra of divergence-free vector fields on
//! the 2-sphere in the spherical-harmonic basis `e_lm = ∇^⊥ Y_lm`.
//!
//! The real constants are
//!
//! ```text
//! g^{l3 m3}_{l1 m1 l2 m2} = -(1/√(4π)) L123 (l1 l2 l3; m1 m2 m3) (l1 l2 l3; 1 -1 0)
//! L123 = √((2l1+1)(2l2+1)(2l3+1) l1(l1+1) l2(l2+1))
//! ```
//!
//! for odd `l1 + l2 + l3` and zero otherwise, and the complex constants are
//! `G^{l3 m3}_{l1 m1 l2 m2} = -i (-1)^{m3} g^{l3 -m3}_{l1 m1 l2 m2}`.
//! Values are stored as [`PerSqrtPi`], i.e. with the `1/√π` kept symbolic.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{integer, parity_sign, rational, PerSqrtPi, SignedSqrtRational};
use crate::wigner::{threej, ThreeJArgs};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("order {m} exceeds degree {l}")]
    OrderOutOfRange { l: u32, m: i32 },
}

/// Degree/order pair `(l, m)` labelling `Y_lm`, with `|m| <= l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HarmonicIndex {
    l: u32,
    m: i32,
}

impl HarmonicIndex {
    pub fn new(l: u32, m: i32) -> Result<Self, StructureError> {
        if m.unsigned_abs() > l {
            return Err(StructureError::OrderOutOfRange { l, m });
        }
        Ok(Self { l, m })
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn m(&self) -> i32 {
        self.m
    }

    /// `l(l+1)`; the Laplacian eigenvalue is its negative.
    pub fn eigen(&self) -> i64 {
        let l = self.l as i64;
        l * (l + 1)
    }

    pub fn negated(&self) -> Self {
        Self { l: self.l, m: -self.m }
    }

    /// All indices with degree in `lo..=hi`.
    pub fn all(lo: u32, hi: u32) -> impl Iterator<Item = HarmonicIndex> {
        (lo..=hi).flat_map(|l| {
            let li = l as i32;
            (-li..=li).map(move |m| HarmonicIndex { l, m })
        })
    }
}

impl fmt::Display for HarmonicIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.l, self.m)
    }
}

/// `L123` as an exact square root.
pub fn l123(l1: u32, l2: u32, l3: u32) -> SignedSqrtRational {
    let (a, b, c) = (l1 as i64, l2 as i64, l3 as i64);
    let radicand = (2 * a + 1) * (2 * b + 1) * (2 * c + 1) * a * (a + 1) * b * (b + 1);
    SignedSqrtRational::new(false, integer(radicand))
}

/// `l3` can carry a nonzero constant only inside `[|l1-l2|+1, l1+l2-1]`
/// with `l1 + l2 + l3` odd.
pub fn admissible_degree(l1: u32, l2: u32, l3: u32) -> bool {
    (l1 + l2 + l3) % 2 == 1 && l1.abs_diff(l2) < l3 && l3 < l1 + l2
}

/// Real structure constant `g^{l3 m3}_{l1 m1 l2 m2}`.
pub fn g_real(l1: u32, m1: i32, l2: u32, m2: i32, l3: u32, m3: i32) -> PerSqrtPi {
    if !admissible_degree(l1, l2, l3) {
        return PerSqrtPi::zero();
    }
    let orders = threej(ThreeJArgs::checked(l1, l2, l3, m1, m2, m3));
    if orders.is_zero() {
        return PerSqrtPi::zero();
    }
    let spin = threej(ThreeJArgs::checked(l1, l2, l3, 1, -1, 0));
    // -1/√(4π) = -(1/2)·(1/√π)
    let root = (&orders * &spin) * l123(l1, l2, l3);
    PerSqrtPi(root.scale(&rational(-1, 2)))
}

/// [`g_real`] on harmonic indices: `g^{upper}_{lower1 lower2}`.
pub fn g_of(upper: HarmonicIndex, lower1: HarmonicIndex, lower2: HarmonicIndex) -> PerSqrtPi {
    g_real(lower1.l, lower1.m, lower2.l, lower2.m, upper.l, upper.m)
}

/// One of the four complex units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    One,
    I,
    MinusOne,
    MinusI,
}

impl Phase {
    pub fn to_complex(self) -> Complex64 {
        match self {
            Phase::One => Complex64::new(1.0, 0.0),
            Phase::I => Complex64::new(0.0, 1.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }

    /// `-i (-1)^m`, the phase linking `G^{l m}` to `g^{l -m}`.
    pub fn of_order(m: i32) -> Phase {
        if parity_sign(m as i64) > 0 {
            Phase::MinusI
        } else {
            Phase::I
        }
    }
}

/// A coefficient `phase · real`, the exact form of a complex structure constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ComplexConstant {
    pub phase: Phase,
    pub real: PerSqrtPi,
}

impl ComplexConstant {
    pub fn to_complex(&self) -> Complex64 {
        self.phase.to_complex() * self.real.to_f64()
    }
}

/// Complex structure constant `G^{l3 m3}_{l1 m1 l2 m2}`.
pub fn g_complex(l1: u32, m1: i32, l2: u32, m2: i32, l3: u32, m3: i32) -> ComplexConstant {
    ComplexConstant {
        phase: Phase::of_order(m3),
        real: g_real(l1, m1, l2, m2, l3, -m3),
    }
}

/// A structure constant together with its indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureConstant {
    pub upper: HarmonicIndex,
    pub lower1: HarmonicIndex,
    pub lower2: HarmonicIndex,
    pub value: PerSqrtPi,
}

impl StructureConstant {
    pub fn new(upper: HarmonicIndex, lower1: HarmonicIndex, lower2: HarmonicIndex) -> Self {
        Self {
            upper,
            lower1,
            lower2,
            value: g_of(upper, lower1, lower2),
        }
    }
}

/// Term of a bracket expansion at output degree `l3`; the output order is
/// always `m1 + m2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketTerm {
    pub l3: u32,
    pub m3: i32,
    pub coefficient: ComplexConstant,
}

/// `{Y_{l1 m1}, Y_{l2 m2}} = Σ_{l3} G^{l3, m1+m2} Y_{l3, m1+m2}`, nonzero terms only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketExpansion {
    pub input1: HarmonicIndex,
    pub input2: HarmonicIndex,
    pub terms: BTreeMap<u32, BracketTerm>,
}

impl BracketExpansion {
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn output_order(&self) -> i32 {
        self.input1.m + self.input2.m
    }
}

/// Poisson bracket of two harmonics expanded in the harmonic basis.
pub fn bracket_expand(a: HarmonicIndex, b: HarmonicIndex) -> BracketExpansion {
    let m3 = a.m + b.m;
    let mut terms = BTreeMap::new();
    if a.l > 0 && b.l > 0 {
        for l3 in a.l.abs_diff(b.l) + 1..a.l + b.l {
            if m3.unsigned_abs() > l3 {
                continue;
            }
            let coefficient = g_complex(a.l, a.m, b.l, b.m, l3, m3);
            if !coefficient.real.is_zero() {
                terms.insert(l3, BracketTerm { l3, m3, coefficient });
            }
        }
    }
    BracketExpansion {
        input1: a,
        input2: b,
        terms,
    }
}

/// Which exact identity a symmetry check exercised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymmetryKind {
    /// `g^{3}_{1 2} = g^{2}_{3 1} = g^{1}_{2 3}`
    Cyclic,
    /// `g^{l3 -m3}_{l1 -m1 l2 -m2} = -g^{l3 m3}_{l1 m1 l2 m2}`
    OrderNegation,
    /// `g^{3}_{1 2} = -g^{3}_{2 1}`
    LowerSwap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryFailure {
    pub kind: SymmetryKind,
    pub upper: HarmonicIndex,
    pub lower1: HarmonicIndex,
    pub lower2: HarmonicIndex,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub checks: u64,
    pub nonzero: u64,
    pub failures: Vec<SymmetryFailure>,
}

impl SymmetryReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn merge(mut self, other: SymmetryReport) -> SymmetryReport {
        self.checks += other.checks;
        self.nonzero += other.nonzero;
        self.failures.extend(other.failures);
        self
    }
}

/// Exhaustively check the three structure-constant identities for every
/// index tuple with degrees `<= l_max` and `m1 + m2 + m3 = 0`.
pub fn validate_symmetries(l_max: u32) -> SymmetryReport {
    let lowers: Vec<(HarmonicIndex, HarmonicIndex)> = HarmonicIndex::all(0, l_max)
        .flat_map(|a| HarmonicIndex::all(0, l_max).map(move |b| (a, b)))
        .collect();
    lowers
        .par_iter()
        .map(|&(h1, h2)| {
            let mut report = SymmetryReport::default();
            for l3 in 0..=l_max {
                let m3 = -(h1.m + h2.m);
                let Ok(h3) = HarmonicIndex::new(l3, m3) else {
                    continue;
                };
                let value = g_of(h3, h1, h2);
                if !value.is_zero() {
                    report.nonzero += 1;
                }
                let mut check = |kind, ok: bool| {
                    report.checks += 1;
                    if !ok {
                        report.failures.push(SymmetryFailure {
                            kind,
                            upper: h3,
                            lower1: h1,
                            lower2: h2,
                        });
                    }
                };
                check(
                    SymmetryKind::Cyclic,
                    value == g_of(h2, h3, h1) && value == g_of(h1, h2, h3),
                );
                check(
                    SymmetryKind::OrderNegation,
                    g_of(h3.negated(), h1.negated(), h2.negated()) == -value.clone(),
                );
                check(SymmetryKind::LowerSwap, g_of(h3, h2, h1) == -value);
            }
            report
        })
        .reduce(SymmetryReport::default, SymmetryReport::merge)
}
