//! The block-size sequence `x_t = ⌊cx·√(n/t)⌋` and its two inequalities,
//! checked with exact integer arithmetic.

use serde::{Deserialize, Serialize};

use crate::ratio::Ratio;

/// The sequence `x_1 ≥ x_2 ≥ … ≥ x_{n0} ≥ 1` together with its prefix sums.
///
/// `n0` is the last index with `x_t ≥ 1`; extending the formula one step
/// further yields 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequencePlan {
    pub n: u64,
    pub cx: Ratio,
    pub xs: Vec<u64>,
    /// `prefix_sums[t-1] = x_1 + … + x_t`.
    pub prefix_sums: Vec<u64>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SeqError {
    #[error("block sizes sum to {sum} which exceeds n = {n}; the partition cannot fit")]
    PlanOverflow { sum: u64, n: u64 },
}

/// Report for the product inequality `4·x_t·(x_1+…+x_t) ≤ n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductReport {
    pub holds: bool,
    /// 1-based index maximizing `x_t·S_t` (0 when the sequence is empty).
    pub worst_t: u64,
    /// The maximal product `x_t·S_t`.
    pub worst_value: u64,
}

/// Report for the sum-of-squares lower bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquaresReport {
    pub sum_sq: u64,
    /// `Σ x_i² ≥ (n/9)·ln n − (4/3)·n`, valid for all n.
    pub intermediate_holds: bool,
    /// `Σ x_i² ≥ n·ln n / 10`, only promised for astronomically large n.
    pub asymptotic_holds: bool,
}

/// Largest integer `k ≥ 0` with `k²·q²·t ≤ p²·n`, i.e. `⌊(p/q)·√(n/t)⌋`.
///
/// Exact: no floating point is involved.
pub fn x_value(n: u64, t: u64, cx: Ratio) -> u64 {
    assert!(n >= 1 && t >= 1);
    let num = (cx.num() as u128) * (cx.num() as u128) * n as u128;
    let den = (cx.den() as u128) * (cx.den() as u128) * t as u128;
    // k² ≤ num/den  ⟺  k² ≤ ⌊num/den⌋ for integer k.
    (num / den).isqrt() as u64
}

pub fn build_sequence_plan(n: u64, cx: Ratio) -> Result<SequencePlan, SeqError> {
    assert!(n >= 1);
    let mut xs = Vec::new();
    let mut prefix_sums = Vec::new();
    let mut sum = 0u64;
    let mut t = 1u64;
    loop {
        let x = x_value(n, t, cx);
        if x == 0 {
            break;
        }
        sum += x;
        xs.push(x);
        prefix_sums.push(sum);
        t += 1;
    }
    // x_t ≥ 1 ⟺ q²·t ≤ p²·n, so n0 = ⌊p²·n/q²⌋.
    let closed_form =
        (cx.num() as u128 * cx.num() as u128 * n as u128) / (cx.den() as u128 * cx.den() as u128);
    debug_assert_eq!(xs.len() as u128, closed_form);
    if sum > n {
        return Err(SeqError::PlanOverflow { sum, n });
    }
    Ok(SequencePlan {
        n,
        cx,
        xs,
        prefix_sums,
    })
}

impl SequencePlan {
    /// Number of nonzero terms.
    pub fn n0(&self) -> usize {
        self.xs.len()
    }

    /// `S_t = x_1 + … + x_t` for 1-based `t`; `S_0 = 0`.
    pub fn prefix_sum(&self, t: usize) -> u64 {
        if t == 0 {
            0
        } else {
            self.prefix_sums[t - 1]
        }
    }

    pub fn sum_of_squares(&self) -> u64 {
        self.xs.iter().map(|&x| x * x).sum()
    }
}

pub fn check_p1(plan: &SequencePlan) -> ProductReport {
    let mut worst_t = 0u64;
    let mut worst_value = 0u64;
    let mut holds = true;
    for (idx, (&x, &s)) in plan.xs.iter().zip(&plan.prefix_sums).enumerate() {
        let v = x * s;
        if idx == 0 || v > worst_value {
            worst_value = v;
            worst_t = idx as u64 + 1;
        }
        if 4u128 * v as u128 > plan.n as u128 {
            holds = false;
        }
    }
    ProductReport {
        holds,
        worst_t,
        worst_value,
    }
}

/// A lower bound on `ln n` a little wider than one ulp of slack, so that a
/// comparison against it never turns a true `≥` into `false`.
fn ln_lower(n: u64) -> f64 {
    let l = (n as f64).ln();
    l - l.abs() * 1e-12 - 1e-12
}

pub fn check_squares(plan: &SequencePlan) -> SquaresReport {
    let sum_sq = plan.sum_of_squares();
    let n = plan.n as f64;
    let ln_lo = ln_lower(plan.n);
    // Lower bounds on both right-hand sides: round the positive term down
    // and the subtracted term up.
    let widen_down = |x: f64| x - x.abs() * 1e-12;
    let widen_up = |x: f64| x + x.abs() * 1e-12;
    let intermediate_rhs = widen_down(n * ln_lo / 9.0) - widen_up(4.0 * n / 3.0);
    let asymptotic_rhs = widen_down(n * ln_lo / 10.0);
    SquaresReport {
        sum_sq,
        intermediate_holds: sum_sq as f64 >= intermediate_rhs,
        asymptotic_holds: sum_sq as f64 >= asymptotic_rhs,
    }
}
