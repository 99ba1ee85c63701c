//! Exact Wigner 3j symbols for integer angular momenta.
//!
//! [`threej`] is the general Racah alternating sum evaluated in exact
//! rationals. The three closed forms below it are independent evaluation
//! paths kept for cross-validation; nothing dispatches to them implicitly.

use std::collections::HashMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{factorial, factorial_ratio, integer, parity_sign, BigRational, SignedSqrtRational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WignerError {
    #[error("order {m} exceeds degree {l}")]
    OrderOutOfRange { l: u32, m: i32 },
    /// The closed form does not cover these arguments; use [`threej`].
    #[error("outside the closed form's domain: {0}")]
    OutsideDomain(&'static str),
}

/// Arguments `(l1 l2 l3; m1 m2 m3)` of a 3j symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThreeJArgs {
    pub l: [u32; 3],
    pub m: [i32; 3],
}

impl ThreeJArgs {
    /// Validated constructor: every `|m_i| <= l_i`.
    pub fn new(l1: u32, l2: u32, l3: u32, m1: i32, m2: i32, m3: i32) -> Result<Self, WignerError> {
        let args = Self::checked(l1, l2, l3, m1, m2, m3);
        for (l, m) in args.l.into_iter().zip(args.m) {
            if m.unsigned_abs() > l {
                return Err(WignerError::OrderOutOfRange { l, m });
            }
        }
        Ok(args)
    }

    /// Unvalidated constructor. Out-of-range orders evaluate to zero.
    pub fn checked(l1: u32, l2: u32, l3: u32, m1: i32, m2: i32, m3: i32) -> Self {
        Self {
            l: [l1, l2, l3],
            m: [m1, m2, m3],
        }
    }

    pub fn orders_in_range(&self) -> bool {
        self.l.iter().zip(self.m).all(|(&l, m)| m.unsigned_abs() <= l)
    }

    /// Selection rules: orders in range, orders sum to zero, triangle.
    pub fn is_allowed(&self) -> bool {
        self.orders_in_range()
            && self.m.iter().map(|&m| m as i64).sum::<i64>() == 0
            && triangle(self.l[0], self.l[1], self.l[2])
    }
}

/// `|a - b| <= c <= a + b`
pub fn triangle(a: u32, b: u32, c: u32) -> bool {
    a.abs_diff(b) <= c && c <= a + b
}

fn nonneg(x: i64) -> u32 {
    debug_assert!(x >= 0, "negative factorial argument {x}");
    x as u32
}

/// The 3j symbol by Racah's formula.
pub fn threej(args: ThreeJArgs) -> SignedSqrtRational {
    if !args.is_allowed() {
        return SignedSqrtRational::zero();
    }
    let [j1, j2, j3] = args.l.map(i64::from);
    let [m1, m2, m3] = args.m.map(i64::from);

    let triangle_coeff = factorial_ratio(
        &[nonneg(j1 + j2 - j3), nonneg(j1 - j2 + j3), nonneg(-j1 + j2 + j3)],
        &[nonneg(j1 + j2 + j3 + 1)],
    );
    let orders = factorial_ratio(
        &[
            nonneg(j1 + m1),
            nonneg(j1 - m1),
            nonneg(j2 + m2),
            nonneg(j2 - m2),
            nonneg(j3 + m3),
            nonneg(j3 - m3),
        ],
        &[],
    );

    let kmin = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let kmax = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let mut sum = BigRational::zero();
    for k in kmin..=kmax {
        let denom = [
            k,
            j3 - j2 + k + m1,
            j3 - j1 + k - m2,
            j1 + j2 - j3 - k,
            j1 - k - m1,
            j2 - k + m2,
        ]
        .into_iter()
        .fold(num_bigint::BigInt::one(), |acc, x| acc * factorial(nonneg(x)));
        let term = BigRational::new(parity_sign(k).into(), denom);
        sum += term;
    }
    let phase = parity_sign(j1 - j2 - m3);
    SignedSqrtRational::from_rational(&(sum * integer(phase))).scale_sqrt(&(triangle_coeff * orders))
}

/// Closed form for `(l1 m l3; m1 -m -m1+m)`, whose second column is
/// stretched (order equal in magnitude to degree).
pub fn threej_closed_stretched(l1: u32, m: u32, l3: u32, m1: i32) -> Result<SignedSqrtRational, WignerError> {
    if m1.unsigned_abs() > l1 {
        return Err(WignerError::OrderOutOfRange { l: l1, m: m1 });
    }
    let stretched = m;
    let (a, c, m1, m) = (l1 as i64, l3 as i64, m1 as i64, m as i64);
    if (m - m1).abs() > c {
        return Err(WignerError::OutsideDomain("third order exceeds l3"));
    }
    if !triangle(l1, stretched, l3) {
        return Err(WignerError::OutsideDomain("triangle condition fails"));
    }
    let radicand = factorial_ratio(
        &[
            nonneg(2 * m),
            nonneg(a + c - m),
            nonneg(c - m1 + m),
            nonneg(a + m1),
        ],
        &[
            nonneg(a + c + m + 1),
            nonneg(a - c + m),
            nonneg(-a + c + m),
            nonneg(c + m1 - m),
            nonneg(a - m1),
        ],
    );
    Ok(SignedSqrtRational::new(parity_sign(a - m1) < 0, radicand))
}

/// Closed form for `(l1 l2 l3; 1 -1 0)` when `l1 + l2 + l3` is odd.
pub fn threej_closed_110(l1: u32, l2: u32, l3: u32) -> Result<SignedSqrtRational, WignerError> {
    if l1 == 0 || l2 == 0 {
        return Err(WignerError::OutsideDomain("l1 and l2 must be at least 1"));
    }
    if !triangle(l1, l2, l3) {
        return Err(WignerError::OutsideDomain("triangle condition fails"));
    }
    if (l1 + l2 + l3) % 2 == 0 {
        return Err(WignerError::OutsideDomain("l1 + l2 + l3 must be odd"));
    }
    let (a, b, c) = (l1 as i64, l2 as i64, l3 as i64);
    let j = a + b + c + 1;
    let h = j / 2;
    let polynomial = BigRational::new(
        ((j + 1) * (j - 2 * c) * (j - 2 * a) * (j - 2 * b - 1)).into(),
        (a * (a + 1) * b * (b + 1)).into(),
    );
    let radicand = polynomial
        * factorial_ratio(
            &[nonneg(j - 2 * c), nonneg(j - 2 * a), nonneg(j - 2 * b - 2)],
            &[nonneg(j + 1)],
        );
    let prefactor = factorial_ratio(
        &[nonneg(h)],
        &[nonneg(h - c), nonneg(h - a), nonneg(h - b - 1)],
    ) * BigRational::new(parity_sign(h).into(), 2.into());
    Ok(SignedSqrtRational::from_rational(&prefactor).scale_sqrt(&radicand))
}

/// `(l1 l2 l3; 1 1 -2)` from `(l1 l3 l2; 1 -1 0)`:
///
/// ```text
/// (l1 l2 l3; 1 1 -2) = (-1)^(l1+l2+l3) (l1-l2)(l1+l2+1) / √(l2(l2+1)(l3(l3+1)-2)) · (l1 l3 l2; 1 -1 0)
/// ```
///
/// Valid when `l1 + l2 + l3` is odd, which is also where the right-hand
/// closed form applies.
pub fn threej_recursive_112(l1: u32, l2: u32, l3: u32) -> Result<SignedSqrtRational, WignerError> {
    if l1 == 0 || l2 == 0 {
        return Err(WignerError::OutsideDomain("l1 and l2 must be at least 1"));
    }
    if l3 < 2 {
        // l3 = 1 zeroes l3(l3+1) - 2; l3 = 0 cannot carry order -2.
        return Err(WignerError::OutsideDomain("l3 must be at least 2"));
    }
    let base = threej_closed_110(l1, l3, l2)?;
    let (a, b, c) = (l1 as i64, l2 as i64, l3 as i64);
    let factor = integer(parity_sign(a + b + c) * (a - b) * (a + b + 1));
    let inverse_root = BigRational::new(1.into(), (b * (b + 1) * (c * (c + 1) - 2)).into());
    Ok(base.scale(&factor).scale_sqrt(&inverse_root))
}

/// Clebsch–Gordan coefficient `C^{l3 m3}_{l1 m1 l2 m2}` via
/// `(l1 l2 l3; m1 m2 m3) = (-1)^(l3+m3) / √(2 l3 + 1) · C^{l3 m3}_{l1 -m1 l2 -m2}`.
pub fn clebsch_gordan(l1: u32, m1: i32, l2: u32, m2: i32, l3: u32, m3: i32) -> SignedSqrtRational {
    let symbol = threej(ThreeJArgs::checked(l1, l2, l3, -m1, -m2, m3));
    let phase = integer(parity_sign(l3 as i64 + m3 as i64));
    symbol.scale(&phase).scale_sqrt(&integer(2 * l3 as i64 + 1))
}

/// Outcome of an exhaustive identity sweep.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub checks: u64,
    pub failures: Vec<(String, ThreeJArgs)>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, identity: &str, args: ThreeJArgs, ok: bool) {
        self.checks += 1;
        if !ok {
            self.failures.push((identity.to_string(), args));
        }
    }

    fn merge(mut self, other: SweepReport) -> SweepReport {
        self.checks += other.checks;
        self.failures.extend(other.failures);
        self
    }
}

/// Every argument set with degrees `<= l_max` passing the selection rules.
pub fn allowed_args(l_max: u32) -> Vec<ThreeJArgs> {
    let mut out = Vec::new();
    for l1 in 0..=l_max {
        for l2 in 0..=l_max {
            for l3 in l1.abs_diff(l2)..=(l1 + l2).min(l_max) {
                let (a, b, c) = (l1 as i32, l2 as i32, l3 as i32);
                for m1 in -a..=a {
                    for m2 in -b..=b {
                        let m3 = -m1 - m2;
                        if m3.abs() <= c {
                            out.push(ThreeJArgs::checked(l1, l2, l3, m1, m2, m3));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Column-swap and order-negation symmetries for degrees `<= l_max`. Both
/// sides come from one table of Racah evaluations, so each identity is an
/// exact comparison of independently computed symbols.
pub fn check_symmetries(l_max: u32) -> SweepReport {
    let args = allowed_args(l_max);
    let table: HashMap<ThreeJArgs, SignedSqrtRational> =
        args.par_iter().map(|&a| (a, threej(a))).collect();
    args.par_iter()
        .fold(SweepReport::default, |mut report, a| {
            let value = &table[a];
            let odd = (a.l[0] + a.l[1] + a.l[2]) % 2 == 1;
            let expect = if odd { -value } else { value.clone() };
            for (i, j) in [(0, 1), (1, 2), (0, 2)] {
                let mut swapped = *a;
                swapped.l.swap(i, j);
                swapped.m.swap(i, j);
                report.record("column-swap", *a, table[&swapped] == expect);
            }
            let negated = ThreeJArgs {
                l: a.l,
                m: [-a.m[0], -a.m[1], -a.m[2]],
            };
            report.record("order-negation", *a, table[&negated] == expect);
            report
        })
        .reduce(SweepReport::default, SweepReport::merge)
}

/// Each closed form against [`threej`] on its whole domain with degrees
/// `<= l_max`.
pub fn check_closed_forms(l_max: u32) -> SweepReport {
    let triples: Vec<(u32, u32, u32)> = (0..=l_max)
        .flat_map(|a| (0..=l_max).flat_map(move |b| (0..=l_max).map(move |c| (a, b, c))))
        .filter(|&(a, b, c)| triangle(a, b, c))
        .collect();
    triples
        .par_iter()
        .fold(SweepReport::default, |mut report, &(l1, l2, l3)| {
            // stretched: (l1 m l3; m1 -m -m1+m) with m = l2
            let m = l2 as i32;
            for m1 in -(l1 as i32)..=l1 as i32 {
                if (m - m1).abs() > l3 as i32 {
                    continue;
                }
                let args = ThreeJArgs::checked(l1, l2, l3, m1, -m, -m1 + m);
                let ok = threej_closed_stretched(l1, l2, l3, m1).is_ok_and(|v| v == threej(args));
                report.record("stretched", args, ok);
            }
            if l1 >= 1 && l2 >= 1 && (l1 + l2 + l3) % 2 == 1 {
                let args = ThreeJArgs::checked(l1, l2, l3, 1, -1, 0);
                let ok = threej_closed_110(l1, l2, l3).is_ok_and(|v| v == threej(args));
                report.record("closed-110", args, ok);
                if l3 >= 2 {
                    let args = ThreeJArgs::checked(l1, l2, l3, 1, 1, -2);
                    let ok = threej_recursive_112(l1, l2, l3).is_ok_and(|v| v == threej(args));
                    report.record("recursive-112", args, ok);
                }
            }
            report
        })
        .reduce(SweepReport::default, SweepReport::merge)
}
