//! Row/column region planning and symbol partitioning, with exact
//! feasibility checks.
//!
//! Rows `1..=n` are split into blocks `R_1..R_{n0}` of sizes `x_1..x_{n0}`
//! plus a star remainder, and columns likewise. A cell's region is one of
//! - `F(i)`: block row × same block column,
//! - `H(i)`: block-i row, column strictly past block i,
//! - `J(i)`: row strictly past block i, block-i column,
//! - `Star`: both past the last block.
//!
//! Symbols are split into classes `N_1..N_{n0}` (sizes `2x_i − 1`), a scarce
//! class `B`, and an unconstrained remainder `A`.

use serde::{Deserialize, Serialize};

use crate::ratio::Ratio;
use crate::seq::{self, SequencePlan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlackMode {
    /// Per-block criterion `4·x_i·S_i ≤ n` (implies the tight one).
    Paper,
    /// Exact capacity needed by the fill: `2·x_i·(n − S_i) ≥ n·(2x_i − 1)`.
    Tight,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BMode {
    /// `|B| = ⌊c_b · ln n⌋`.
    Auto,
    Explicit(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FillMode {
    Balanced,
    SeededArbitrary(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Plain,
    Symmetric,
    BipartiteDeleted,
    Padded(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstructionParams {
    pub n: u32,
    pub cx: Ratio,
    pub slack_mode: SlackMode,
    pub b_mode: BMode,
    pub cb: Ratio,
    pub fill: FillMode,
    pub variant: Variant,
}

impl ConstructionParams {
    pub fn new(n: u32) -> Self {
        ConstructionParams {
            n,
            cx: Ratio::one_third(),
            slack_mode: SlackMode::Paper,
            b_mode: BMode::Auto,
            cb: Ratio::one_twentieth(),
            fill: FillMode::Balanced,
            variant: Variant::Plain,
        }
    }
}

/// Feasibility conditions checked by [`plan_layout`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    /// Block sizes fit: `S_{n0} ≤ n`.
    F1,
    /// Strip capacity per block (paper or tight criterion).
    F2,
    /// Room for the scarce class: `Σ x_i² ≥ n·|B|`.
    F3,
    /// Symbol budget: `|B| + Σ(2x_i − 1) ≤ m`.
    F4,
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LayoutError {
    #[error("infeasible parameters: {condition} fails ({detail}: {lhs} vs {rhs})")]
    Infeasible {
        condition: Condition,
        /// The side that is too large / too small, as stated in `detail`.
        lhs: u128,
        rhs: u128,
        detail: String,
    },
    #[error(transparent)]
    Seq(#[from] seq::SeqError),
}

/// Where a cell falls in the region partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// 1-based block index.
    F(u32),
    H(u32),
    J(u32),
    Star,
}

/// Which class a symbol belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolClass {
    /// 1-based block index.
    N(u32),
    B,
    A,
}

/// The row/column partition. Block membership is expressed through an
/// explicit ordering so that shuffled layouts stay representable: block `i`
/// consists of the rows `row_order[S_{i-1}..S_i]`, and the star rows are the
/// tail past `S_{n0}`. The default ordering is the identity (consecutive
/// blocks).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionLayout {
    pub n: u32,
    pub plan: SequencePlan,
    row_order: Vec<u32>,
    col_order: Vec<u32>,
    /// Inverse permutations: `row_pos[r-1]` is the position of row `r`.
    row_pos: Vec<u32>,
    col_pos: Vec<u32>,
}

/// The symbol partition, in the same ordered style: class `N_i` holds the
/// symbols `symbol_order[offset_i .. offset_i + (2x_i − 1)]`, then `B`, then
/// `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolPartition {
    pub m: u32,
    pub class_sizes: Vec<u32>,
    pub b_size: u32,
    symbol_order: Vec<u32>,
    symbol_pos: Vec<u32>,
    /// Running totals of `class_sizes`, so class lookup is a binary search.
    class_prefix: Vec<u32>,
}

fn running_totals(sizes: &[u32]) -> Vec<u32> {
    let mut acc = 0u32;
    sizes
        .iter()
        .map(|&s| {
            acc += s;
            acc
        })
        .collect()
}

fn invert(order: &[u32]) -> Vec<u32> {
    let mut pos = vec![0u32; order.len()];
    for (p, &v) in order.iter().enumerate() {
        pos[v as usize - 1] = p as u32;
    }
    pos
}

/// True iff `order` is a permutation of `1..=len`.
fn is_permutation(order: &[u32], len: u32) -> bool {
    if order.len() != len as usize {
        return false;
    }
    let mut seen = vec![false; len as usize];
    for &v in order {
        if v == 0 || v > len || seen[v as usize - 1] {
            return false;
        }
        seen[v as usize - 1] = true;
    }
    true
}

impl RegionLayout {
    pub fn identity(n: u32, plan: SequencePlan) -> Self {
        let order: Vec<u32> = (1..=n).collect();
        let pos = invert(&order);
        RegionLayout {
            n,
            plan,
            row_order: order.clone(),
            col_order: order,
            row_pos: pos.clone(),
            col_pos: pos,
        }
    }

    pub fn with_orders(
        n: u32,
        plan: SequencePlan,
        row_order: Vec<u32>,
        col_order: Vec<u32>,
    ) -> Self {
        assert!(is_permutation(&row_order, n) && is_permutation(&col_order, n));
        let row_pos = invert(&row_order);
        let col_pos = invert(&col_order);
        RegionLayout {
            n,
            plan,
            row_order,
            col_order,
            row_pos,
            col_pos,
        }
    }

    pub fn n0(&self) -> usize {
        self.plan.n0()
    }

    pub fn row_order(&self) -> &[u32] {
        &self.row_order
    }

    pub fn col_order(&self) -> &[u32] {
        &self.col_order
    }

    /// Rows of block `i` (1-based).
    pub fn block_rows(&self, i: u32) -> &[u32] {
        let lo = self.plan.prefix_sum(i as usize - 1) as usize;
        let hi = self.plan.prefix_sum(i as usize) as usize;
        &self.row_order[lo..hi]
    }

    pub fn block_cols(&self, i: u32) -> &[u32] {
        let lo = self.plan.prefix_sum(i as usize - 1) as usize;
        let hi = self.plan.prefix_sum(i as usize) as usize;
        &self.col_order[lo..hi]
    }

    /// Rows past block `i` (the star rows plus blocks `j > i`).
    pub fn rows_past_block(&self, i: u32) -> &[u32] {
        let lo = self.plan.prefix_sum(i as usize) as usize;
        &self.row_order[lo..]
    }

    pub fn cols_past_block(&self, i: u32) -> &[u32] {
        let lo = self.plan.prefix_sum(i as usize) as usize;
        &self.col_order[lo..]
    }

    pub fn star_rows(&self) -> &[u32] {
        let lo = self.plan.prefix_sum(self.n0()) as usize;
        &self.row_order[lo..]
    }

    pub fn star_cols(&self) -> &[u32] {
        let lo = self.plan.prefix_sum(self.n0()) as usize;
        &self.col_order[lo..]
    }

    /// Block index (1-based) containing this position in the order, or
    /// `None` for star positions.
    fn block_of_pos(&self, pos: u32) -> Option<u32> {
        let sums = &self.plan.prefix_sums;
        let i = sums.partition_point(|&s| s <= pos as u64);
        if i < sums.len() {
            Some(i as u32 + 1)
        } else {
            None
        }
    }

    /// The unique region containing the cell, in O(log n0).
    pub fn region_of(&self, row: u32, col: u32) -> Region {
        assert!((1..=self.n).contains(&row) && (1..=self.n).contains(&col));
        let rb = self.block_of_pos(self.row_pos[row as usize - 1]);
        let cb = self.block_of_pos(self.col_pos[col as usize - 1]);
        match (rb, cb) {
            (Some(i), Some(j)) => {
                if i == j {
                    Region::F(i)
                } else if i < j {
                    Region::H(i)
                } else {
                    Region::J(j)
                }
            }
            (Some(i), None) => Region::H(i),
            (None, Some(j)) => Region::J(j),
            (None, None) => Region::Star,
        }
    }
}

impl SymbolPartition {
    pub fn identity(m: u32, class_sizes: Vec<u32>, b_size: u32) -> Self {
        let order: Vec<u32> = (1..=m).collect();
        let pos = invert(&order);
        let class_prefix = running_totals(&class_sizes);
        SymbolPartition {
            m,
            class_sizes,
            b_size,
            symbol_order: order,
            symbol_pos: pos,
            class_prefix,
        }
    }

    pub fn with_order(m: u32, class_sizes: Vec<u32>, b_size: u32, symbol_order: Vec<u32>) -> Self {
        assert!(is_permutation(&symbol_order, m));
        let total: u64 = class_sizes.iter().map(|&s| s as u64).sum::<u64>() + b_size as u64;
        assert!(total <= m as u64);
        let symbol_pos = invert(&symbol_order);
        let class_prefix = running_totals(&class_sizes);
        SymbolPartition {
            m,
            class_sizes,
            b_size,
            symbol_order,
            symbol_pos,
            class_prefix,
        }
    }

    pub fn symbol_order(&self) -> &[u32] {
        &self.symbol_order
    }

    fn class_offset(&self, i: u32) -> usize {
        self.class_sizes[..i as usize - 1]
            .iter()
            .map(|&s| s as usize)
            .sum()
    }

    /// Symbols of class `N_i` (1-based `i`).
    pub fn class_symbols(&self, i: u32) -> &[u32] {
        let lo = self.class_offset(i);
        let hi = lo + self.class_sizes[i as usize - 1] as usize;
        &self.symbol_order[lo..hi]
    }

    pub fn b_symbols(&self) -> &[u32] {
        let lo: usize = self.class_sizes.iter().map(|&s| s as usize).sum();
        &self.symbol_order[lo..lo + self.b_size as usize]
    }

    pub fn a_symbols(&self) -> &[u32] {
        let lo: usize =
            self.class_sizes.iter().map(|&s| s as usize).sum::<usize>() + self.b_size as usize;
        &self.symbol_order[lo..]
    }

    pub fn a_size(&self) -> u32 {
        self.a_symbols().len() as u32
    }

    pub fn class_of(&self, symbol: u32) -> SymbolClass {
        assert!((1..=self.m).contains(&symbol));
        let pos = self.symbol_pos[symbol as usize - 1];
        let i = self.class_prefix.partition_point(|&acc| acc <= pos);
        if i < self.class_prefix.len() {
            return SymbolClass::N(i as u32 + 1);
        }
        let classes_total = self.class_prefix.last().copied().unwrap_or(0);
        if pos < classes_total + self.b_size {
            SymbolClass::B
        } else {
            SymbolClass::A
        }
    }
}

/// `⌊c_b · ln n⌋`.
pub fn auto_b_size(n: u32, cb: Ratio) -> u32 {
    ((n as f64).ln() * cb.to_f64()).floor() as u32
}

/// Largest `|B|` that passes F3 and F4 for this plan and symbol count.
pub fn max_feasible_b(plan: &SequencePlan, m: u32) -> u64 {
    let by_room = plan.sum_of_squares() / plan.n;
    let classes: u64 = plan.xs.iter().map(|&x| 2 * x - 1).sum();
    let by_budget = (m as u64).saturating_sub(classes);
    by_room.min(by_budget)
}

/// Symbol count for a variant at order n.
pub fn symbol_count_for(p: &ConstructionParams) -> u32 {
    match p.variant {
        Variant::BipartiteDeleted => p.n - 2,
        _ => p.n,
    }
}

/// Plan the deterministic layout and symbol partition, verifying all four
/// feasibility conditions with exact integers.
pub fn plan_layout(
    p: &ConstructionParams,
) -> Result<(RegionLayout, SymbolPartition), LayoutError> {
    assert!(p.n >= 2);
    let n = p.n as u64;
    let m = symbol_count_for(p);
    let plan = match seq::build_sequence_plan(n, p.cx) {
        Ok(plan) => plan,
        Err(seq::SeqError::PlanOverflow { sum, n }) => {
            return Err(LayoutError::Infeasible {
                condition: Condition::F1,
                lhs: sum as u128,
                rhs: n as u128,
                detail: "sum of block sizes exceeds n".into(),
            })
        }
    };

    // F2: strip capacity per block.
    for t in 1..=plan.n0() {
        let x = plan.xs[t - 1];
        let s = plan.prefix_sum(t);
        match p.slack_mode {
            SlackMode::Paper => {
                let lhs = 4u128 * x as u128 * s as u128;
                if lhs > n as u128 {
                    return Err(LayoutError::Infeasible {
                        condition: Condition::F2,
                        lhs,
                        rhs: n as u128,
                        detail: format!("paper criterion 4·x_{t}·S_{t} ≤ n"),
                    });
                }
            }
            SlackMode::Tight => {
                let lhs = 2u128 * x as u128 * (n - s) as u128;
                let rhs = n as u128 * (2 * x - 1) as u128;
                if lhs < rhs {
                    return Err(LayoutError::Infeasible {
                        condition: Condition::F2,
                        lhs,
                        rhs,
                        detail: format!("tight criterion 2·x_{t}·(n − S_{t}) ≥ n·(2x_{t} − 1)"),
                    });
                }
            }
        }
    }

    let b_size = match p.b_mode {
        BMode::Auto => auto_b_size(p.n, p.cb),
        BMode::Explicit(k) => k,
    };

    // F3: room for B inside the F blocks.
    let sum_sq = plan.sum_of_squares();
    let need = n as u128 * b_size as u128;
    if (sum_sq as u128) < need {
        return Err(LayoutError::Infeasible {
            condition: Condition::F3,
            lhs: need,
            rhs: sum_sq as u128,
            detail: "n·|B| exceeds Σx_i²".into(),
        });
    }

    // F4: the symbol budget.
    let classes: u64 = plan.xs.iter().map(|&x| 2 * x - 1).sum();
    if b_size as u64 + classes > m as u64 {
        return Err(LayoutError::Infeasible {
            condition: Condition::F4,
            lhs: (b_size as u64 + classes) as u128,
            rhs: m as u128,
            detail: "|B| + Σ(2x_i − 1) exceeds the symbol count".into(),
        });
    }

    let class_sizes: Vec<u32> = plan.xs.iter().map(|&x| (2 * x - 1) as u32).collect();
    let layout = RegionLayout::identity(p.n, plan);
    let partition = SymbolPartition::identity(m, class_sizes, b_size);
    Ok((layout, partition))
}

/// Serialized form of a layout + partition pair. All integers, bit-exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutDoc {
    pub n: u32,
    pub m: u32,
    pub cx: Ratio,
    pub xs: Vec<u64>,
    pub slack_mode: SlackMode,
    pub b_size: u32,
    pub class_sizes: Vec<u32>,
    pub row_order: Vec<u32>,
    pub col_order: Vec<u32>,
    pub symbol_order: Vec<u32>,
}

#[derive(Debug, thiserror::Error)]
pub enum LayoutDocError {
    #[error("layout document is inconsistent: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LayoutDoc {
    pub fn from_parts(
        layout: &RegionLayout,
        partition: &SymbolPartition,
        slack_mode: SlackMode,
    ) -> Self {
        LayoutDoc {
            n: layout.n,
            m: partition.m,
            cx: layout.plan.cx,
            xs: layout.plan.xs.clone(),
            slack_mode,
            b_size: partition.b_size,
            class_sizes: partition.class_sizes.clone(),
            row_order: layout.row_order.clone(),
            col_order: layout.col_order.clone(),
            symbol_order: partition.symbol_order.clone(),
        }
    }

    pub fn into_parts(self) -> Result<(RegionLayout, SymbolPartition), LayoutDocError> {
        let bad = |msg: &str| LayoutDocError::Inconsistent(msg.into());
        if !is_permutation(&self.row_order, self.n) || !is_permutation(&self.col_order, self.n) {
            return Err(bad("row/col orders are not permutations of 1..=n"));
        }
        if !is_permutation(&self.symbol_order, self.m) {
            return Err(bad("symbol order is not a permutation of 1..=m"));
        }
        if self.class_sizes.len() != self.xs.len() {
            return Err(bad("class count differs from block count"));
        }
        let mut prefix_sums = Vec::with_capacity(self.xs.len());
        let mut sum = 0u64;
        for &x in &self.xs {
            if x == 0 {
                return Err(bad("zero block size"));
            }
            sum += x;
            prefix_sums.push(sum);
        }
        if sum > self.n as u64 {
            return Err(bad("block sizes exceed n"));
        }
        let budget: u64 = self.class_sizes.iter().map(|&s| s as u64).sum::<u64>()
            + self.b_size as u64;
        if budget > self.m as u64 {
            return Err(bad("class sizes plus |B| exceed m"));
        }
        let plan = SequencePlan {
            n: self.n as u64,
            cx: self.cx,
            xs: self.xs,
            prefix_sums,
        };
        let layout = RegionLayout::with_orders(self.n, plan, self.row_order, self.col_order);
        let partition =
            SymbolPartition::with_order(self.m, self.class_sizes, self.b_size, self.symbol_order);
        Ok((layout, partition))
    }

    /// Canonical JSON used both for files and for certificate digests.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("layout serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self, LayoutDocError> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u32) -> ConstructionParams {
        ConstructionParams::new(n)
    }

    #[test]
    fn explicit_b_infeasible_at_n36() {
        let mut p = params(36);
        p.b_mode = BMode::Explicit(1);
        let err = plan_layout(&p).unwrap_err();
        match err {
            LayoutError::Infeasible {
                condition,
                lhs,
                rhs,
                ..
            } => {
                assert_eq!(condition, Condition::F3);
                assert_eq!(lhs, 36);
                assert_eq!(rhs, 7);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn defaults_feasible_at_n36() {
        let (layout, partition) = plan_layout(&params(36)).unwrap();
        assert_eq!(partition.b_size, 0); // ⌊ln 36 / 20⌋ = 0
        assert_eq!(partition.class_sizes, vec![3, 1, 1, 1]);
        assert_eq!(partition.a_size(), 30);
        assert_eq!(layout.star_rows().len(), 31);
    }

    #[test]
    fn scaled_constants_feasible_at_n10000() {
        // Oracle for the scaled-constant acceptance instance: exact
        // summation over all blocks before trusting it elsewhere.
        let mut p = params(10_000);
        p.cx = Ratio::new(1, 2).unwrap();
        p.slack_mode = SlackMode::Tight;
        p.b_mode = BMode::Explicit(1);
        let plan = seq::build_sequence_plan(10_000, p.cx).unwrap();
        assert!(plan.sum_of_squares() >= 10_000, "F3 oracle");
        for t in 1..=plan.n0() {
            let x = plan.xs[t - 1];
            let s = plan.prefix_sum(t);
            assert!(
                2 * x * (10_000 - s) >= 10_000 * (2 * x - 1),
                "tight F2 fails at t = {t}"
            );
        }
        plan_layout(&p).unwrap();
    }

    #[test]
    fn star_size_at_n900() {
        let (layout, _) = plan_layout(&params(900)).unwrap();
        assert!(layout.star_rows().len() >= 675);
    }

    #[test]
    fn region_of_corners_n36() {
        let (layout, _) = plan_layout(&params(36)).unwrap();
        assert_eq!(layout.region_of(1, 1), Region::F(1));
        assert_eq!(layout.region_of(1, 36), Region::H(1));
        assert_eq!(layout.region_of(36, 36), Region::Star);
    }

    #[test]
    fn region_of_matches_brute_force() {
        for n in [9u32, 36, 100, 200] {
            let (layout, _) = plan_layout(&params(n)).unwrap();
            for row in 1..=n {
                for col in 1..=n {
                    let got = layout.region_of(row, col);
                    let want = brute_region(&layout, row, col);
                    assert_eq!(got, want, "n={n} cell=({row},{col})");
                }
            }
        }
    }

    fn brute_region(layout: &RegionLayout, row: u32, col: u32) -> Region {
        let n0 = layout.n0() as u32;
        for i in 1..=n0 {
            let in_rows = layout.block_rows(i).contains(&row);
            let in_cols = layout.block_cols(i).contains(&col);
            if in_rows && in_cols {
                return Region::F(i);
            }
            if in_rows && layout.cols_past_block(i).contains(&col) {
                return Region::H(i);
            }
            if in_cols && layout.rows_past_block(i).contains(&row) {
                return Region::J(i);
            }
        }
        Region::Star
    }

    #[test]
    fn regions_partition_the_grid() {
        for n in [9u32, 36, 100] {
            let (layout, _) = plan_layout(&params(n)).unwrap();
            let mut f = 0u64;
            let mut h = 0u64;
            let mut j = 0u64;
            let mut star = 0u64;
            for row in 1..=n {
                for col in 1..=n {
                    match layout.region_of(row, col) {
                        Region::F(_) => f += 1,
                        Region::H(_) => h += 1,
                        Region::J(_) => j += 1,
                        Region::Star => star += 1,
                    }
                }
            }
            assert_eq!(f + h + j + star, n as u64 * n as u64);
            assert_eq!(f, layout.plan.sum_of_squares());
            let star_n = layout.star_rows().len() as u64;
            assert_eq!(star, star_n * star_n);
            assert_eq!(h, j);
        }
    }

    #[test]
    fn paper_mode_implies_tight_capacity() {
        for n in (9u32..1000).step_by(7) {
            let plan = seq::build_sequence_plan(n as u64, Ratio::one_third()).unwrap();
            for t in 1..=plan.n0() {
                let x = plan.xs[t - 1];
                let s = plan.prefix_sum(t);
                if 4 * x * s <= n as u64 {
                    assert!(
                        2 * x * (n as u64 - s) >= n as u64 * (2 * x - 1),
                        "n={n} t={t}"
                    );
                }
            }
        }
    }

    #[test]
    fn class_lookup() {
        let (_, partition) = plan_layout(&params(36)).unwrap();
        // class sizes [3,1,1,1], b = 0, rest A
        assert_eq!(partition.class_of(1), SymbolClass::N(1));
        assert_eq!(partition.class_of(3), SymbolClass::N(1));
        assert_eq!(partition.class_of(4), SymbolClass::N(2));
        assert_eq!(partition.class_of(6), SymbolClass::N(4));
        assert_eq!(partition.class_of(7), SymbolClass::A);
        assert_eq!(partition.class_of(36), SymbolClass::A);
    }

    #[test]
    fn layout_doc_round_trip() {
        let (layout, partition) = plan_layout(&params(36)).unwrap();
        let doc = LayoutDoc::from_parts(&layout, &partition, SlackMode::Paper);
        let json = doc.to_json();
        let doc2 = LayoutDoc::from_json(&json).unwrap();
        assert_eq!(doc, doc2);
        let (layout2, partition2) = doc2.into_parts().unwrap();
        assert_eq!(layout, layout2);
        assert_eq!(partition, partition2);
    }

    #[test]
    fn max_feasible_b_values() {
        let plan = seq::build_sequence_plan(36, Ratio::one_third()).unwrap();
        assert_eq!(max_feasible_b(&plan, 36), 0); // 7/36
        let plan = seq::build_sequence_plan(10_000, Ratio::new(1, 2).unwrap()).unwrap();
        assert!(max_feasible_b(&plan, 10_000) >= 1);
    }
}
