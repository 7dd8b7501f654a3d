//! Exact frontier sweeps over a grid.
//!
//! Cells are visited column by column, top to bottom. The state after a
//! cell holds the most recent label of every row (bit `r` set means row
//! `r` is `-1`), so a cell's left neighbour is its own row bit before the
//! update and its upper neighbour is bit `r - 1`. Each cell pairs the two
//! states that differ in bit `r` and updates them in place.

use std::ops::{Add, Neg, Sub};

use crate::graph::GridGraph;

/// Tolerance under which two floating-point scores count as tied.
pub const SCORE_TIE_TOL: f64 = 1e-9;

pub(crate) trait Score: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self> {
    /// Strictly better, beyond tie tolerance.
    fn beats(self, other: Self) -> bool;
}

impl Score for i32 {
    fn beats(self, other: Self) -> bool {
        self > other
    }
}

impl Score for i16 {
    fn beats(self, other: Self) -> bool {
        self > other
    }
}

impl Score for f64 {
    fn beats(self, other: Self) -> bool {
        self > other + SCORE_TIE_TOL
    }
}

/// Per-cell couplings in sweep order.
struct CellTerms<S> {
    row: usize,
    vertex: usize,
    left: S,
    up: S,
    field: S,
}

fn cell_terms<S: Score>(
    grid: &GridGraph,
    edge_weight: impl Fn(usize) -> S,
    node_weight: impl Fn(usize) -> S,
) -> Vec<CellTerms<S>> {
    let mut cells = Vec::with_capacity(grid.n());
    for c in 0..grid.cols() {
        for r in 0..grid.rows() {
            let left = if c > 0 { grid.right_edge(r, c - 1).map(&edge_weight) } else { None };
            let up = if r > 0 { grid.down_edge(r - 1, c).map(&edge_weight) } else { None };
            let vertex = grid.vertex(r, c);
            cells.push(CellTerms {
                row: r,
                vertex,
                left: left.unwrap_or_default(),
                up: up.unwrap_or_default(),
                field: node_weight(vertex),
            });
        }
    }
    cells
}

/// Sequential bit writer over a backpointer slice.
struct Packer<'a> {
    out: &'a mut [u64],
    word: u64,
    fill: u32,
    at: usize,
}

impl<'a> Packer<'a> {
    fn new(out: &'a mut [u64]) -> Self {
        Self { out, word: 0, fill: 0, at: 0 }
    }

    #[inline(always)]
    fn push(&mut self, bit: bool) {
        self.word |= (bit as u64) << self.fill;
        self.fill += 1;
        if self.fill == 64 {
            self.out[self.at] = self.word;
            self.at += 1;
            self.word = 0;
            self.fill = 0;
        }
    }

    fn finish(self) {
        if self.fill > 0 {
            self.out[self.at] = self.word;
        }
    }
}

fn read_bit(words: &[u64], i: usize) -> bool {
    (words[i >> 6] >> (i & 63)) & 1 == 1
}

/// Index of the pair holding `state` once bit `row` is removed.
fn pair_index(state: usize, row: usize) -> usize {
    ((state >> (row + 1)) << row) | (state & ((1 << row) - 1))
}

/// One cell update on pairs of states differing in bit `row`: `lo` holds
/// the states whose row bit is 0, `hi` the partners. `up` is the coupling
/// term for label `+1` when the upper neighbour is `+1`. Writes whether
/// the `-1` predecessor won into `plus_bits` / `minus_bits`.
#[inline(always)]
fn relax_pairs<S: Score>(
    lo: &mut [S],
    hi: &mut [S],
    left: S,
    up: S,
    field: S,
    plus_bits: &mut Packer<'_>,
    minus_bits: &mut Packer<'_>,
) {
    let (c0, c1) = (up + field, -up - field);
    for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
        let (a, b) = (*x, *y);
        let (keep0, from0) = (a + left, b - left);
        let (keep1, from1) = (a - left, b + left);
        let take0 = from0.beats(keep0);
        let take1 = from1.beats(keep1);
        *x = if take0 { from0 } else { keep0 } + c0;
        *y = if take1 { from1 } else { keep1 } + c1;
        plus_bits.push(take0);
        minus_bits.push(take1);
    }
}

/// Maximizes `sum_e w_e y_u y_v + sum_v h_v y_v` exactly. Returns the best
/// score and labels indexed by vertex.
///
/// Ties prefer the `+1` predecessor when backtracking and the smallest
/// final state, so the result is deterministic.
pub(crate) fn argmax<S: Score>(
    grid: &GridGraph,
    edge_weight: impl Fn(usize) -> S,
    node_weight: impl Fn(usize) -> S,
) -> (S, Vec<i8>) {
    let rows = grid.rows();
    let states = 1usize << rows;
    let pairs = states / 2;
    let stream = pairs.div_ceil(64);
    let cells = cell_terms(grid, edge_weight, node_weight);
    let mut score = vec![S::default(); states];
    let mut back = vec![0u64; cells.len() * 2 * stream];

    for (cell, bits) in cells.iter().zip(back.chunks_exact_mut(2 * stream)) {
        let stride = 1usize << cell.row;
        // halves of each block share the upper neighbour's bit
        let part = if cell.row > 0 { stride / 2 } else { stride };
        let (plus, minus) = bits.split_at_mut(stream);
        let (mut plus, mut minus) = (Packer::new(plus), Packer::new(minus));
        for block in score.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (i, (lo, hi)) in lo.chunks_exact_mut(part).zip(hi.chunks_exact_mut(part)).enumerate() {
                let up = if i == 1 { -cell.up } else { cell.up };
                relax_pairs(lo, hi, cell.left, up, cell.field, &mut plus, &mut minus);
            }
        }
        plus.finish();
        minus.finish();
    }

    let mut state = 0;
    for s in 1..states {
        if score[s].beats(score[state]) {
            state = s;
        }
    }
    let best = score[state];
    let mut labels = vec![1i8; grid.n()];
    for (cell, bits) in cells.iter().zip(back.chunks_exact(2 * stream)).rev() {
        let minus = (state >> cell.row) & 1 == 1;
        labels[cell.vertex] = if minus { -1 } else { 1 };
        let words = if minus { &bits[stream..] } else { &bits[..stream] };
        let prev = read_bit(words, pair_index(state, cell.row)) as usize;
        state = (state & !(1 << cell.row)) | (prev << cell.row);
    }
    (best, labels)
}

/// [`argmax`] for objectives without node terms, which are invariant under
/// a global sign flip. Only states whose last-row bit is 0 are stored; the
/// complement of a state carries the same score.
///
/// Instead of backpointers, the score vector at the start of every column
/// is kept and each column is replayed while backtracking, so the update
/// loop is a plain max that vectorizes.
pub(crate) fn argmax_flip_symmetric<S: Score>(
    grid: &GridGraph,
    edge_weight: impl Fn(usize) -> S,
) -> (S, Vec<i8>) {
    let rows = grid.rows();
    if rows < 2 {
        return argmax(grid, edge_weight, |_| S::default());
    }
    let top = rows - 1;
    let states = 1usize << top;
    let mask = states - 1;
    let cells = cell_terms(grid, edge_weight, |_| S::default());
    // rows below `fused` are relaxed together, one chunk at a time
    let fused = if top > NARROW_ROWS { NARROW_ROWS } else { 0 };
    let narrow: Vec<[NarrowCell<S>; NARROW_ROWS]> = if fused > 0 {
        cells
            .chunks_exact(rows)
            .map(|column| std::array::from_fn(|r| NarrowCell::new(&column[r])))
            .collect()
    } else {
        Vec::new()
    };
    let relax_column = |score: &mut [S], c: usize| {
        if fused > 0 {
            relax_narrow_rows(score, &narrow[c]);
        }
        for cell in &cells[c * rows + fused..(c + 1) * rows] {
            relax_wide(score, cell, top);
        }
    };

    let mut score = vec![S::default(); states];
    let mut checkpoints = Vec::with_capacity(grid.cols());
    for c in 0..grid.cols() {
        checkpoints.push(score.clone());
        relax_column(&mut score, c);
    }

    let mut state = 0;
    for s in 1..states {
        if score[s].beats(score[state]) {
            state = s;
        }
    }
    let best = score[state];
    let mut flipped = false;
    let mut labels = vec![1i8; grid.n()];
    // replay[r - fused] holds the scores before the cell in row r >= fused
    let mut replay = vec![vec![S::default(); states]; rows - fused];
    for (c, start) in checkpoints.into_iter().enumerate().rev() {
        let column = &cells[c * rows..(c + 1) * rows];
        replay[0].copy_from_slice(&start);
        if fused > 0 {
            relax_narrow_rows(&mut replay[0], &narrow[c]);
        }
        for i in 1..replay.len() {
            let (done, rest) = replay.split_at_mut(i);
            rest[0].copy_from_slice(&done[i - 1]);
            relax_wide(&mut rest[0], &column[fused + i - 1], top);
        }
        for cell in column.iter().rev() {
            let bit = 1usize << cell.row;
            let minus = state & bit != 0;
            labels[cell.vertex] = if minus != flipped { -1 } else { 1 };
            let chunk: [S; LANES];
            let (before, offset): (&[S], usize) = if cell.row < fused {
                let base = state & !(LANES - 1);
                let mut v: [S; LANES] = start[base..base + LANES].try_into().expect("chunk has LANES entries");
                narrow_steps(&mut v, &narrow[c], cell.row);
                chunk = v;
                (&chunk, base)
            } else {
                (&replay[cell.row - fused], 0)
            };
            let at = |s: usize| before[s - offset];
            if cell.row < top {
                let (a, b) = (at(state & !bit), at(state | bit));
                let take = if minus { (b + cell.left).beats(a - cell.left) } else { (b - cell.left).beats(a + cell.left) };
                state = if take { state | bit } else { state & !bit };
            } else if (at(mask ^ state) - cell.left).beats(at(state) + cell.left) {
                state ^= mask;
                flipped = !flipped;
            }
        }
    }
    (best, labels)
}

#[inline(always)]
fn pick<S: Score>(keep: S, from: S) -> S {
    if from.beats(keep) {
        from
    } else {
        keep
    }
}

const NARROW_ROWS: usize = 5;
const LANES: usize = 1 << NARROW_ROWS;

/// One cell of a row below [`NARROW_ROWS`], whose pair partner lies inside
/// the same aligned chunk of [`LANES`] states.
#[derive(Clone, Copy)]
struct NarrowCell<S> {
    left: S,
    up: [S; LANES],
}

impl<S: Score> NarrowCell<S> {
    fn new(cell: &CellTerms<S>) -> Self {
        let own_bit = 1usize << cell.row;
        let mut up = [S::default(); LANES];
        for (lane, u) in up.iter_mut().enumerate() {
            let own = lane & own_bit != 0;
            let above = cell.row > 0 && lane & (own_bit >> 1) != 0;
            *u = if own != above { -cell.up } else { cell.up };
        }
        Self { left: cell.left, up }
    }
}

#[inline(always)]
fn narrow_step<S: Score, const W: usize>(v: &mut [S; LANES], cell: &NarrowCell<S>) {
    let old = *v;
    for lane in 0..LANES {
        v[lane] = pick(old[lane] + cell.left, old[lane ^ W] - cell.left) + cell.up[lane];
    }
}

/// Applies the first `count` narrow cells of a column to one chunk.
fn narrow_steps<S: Score>(v: &mut [S; LANES], cells: &[NarrowCell<S>], count: usize) {
    if count > 0 {
        narrow_step::<S, 1>(v, &cells[0]);
    }
    if count > 1 {
        narrow_step::<S, 2>(v, &cells[1]);
    }
    if count > 2 {
        narrow_step::<S, 4>(v, &cells[2]);
    }
    if count > 3 {
        narrow_step::<S, 8>(v, &cells[3]);
    }
    if count > 4 {
        narrow_step::<S, 16>(v, &cells[4]);
    }
}

fn relax_narrow_rows<S: Score>(score: &mut [S], cells: &[NarrowCell<S>; NARROW_ROWS]) {
    for chunk in score.chunks_exact_mut(LANES) {
        let chunk: &mut [S; LANES] = chunk.try_into().expect("chunk has LANES entries");
        let mut v = *chunk;
        narrow_step::<S, 1>(&mut v, &cells[0]);
        narrow_step::<S, 2>(&mut v, &cells[1]);
        narrow_step::<S, 4>(&mut v, &cells[2]);
        narrow_step::<S, 8>(&mut v, &cells[3]);
        narrow_step::<S, 16>(&mut v, &cells[4]);
        *chunk = v;
    }
}

fn relax_wide<S: Score>(score: &mut [S], cell: &CellTerms<S>, top: usize) {
    let (xl, xu) = (cell.left, cell.up);
    let stride = 1usize << cell.row;
    if cell.row == top {
        relax_last_row(score, xl, xu);
        return;
    }
    let part = if cell.row > 0 { stride / 2 } else { stride };
    for block in score.chunks_exact_mut(2 * stride) {
        let (lo, hi) = block.split_at_mut(stride);
        for (i, (lo, hi)) in lo.chunks_exact_mut(part).zip(hi.chunks_exact_mut(part)).enumerate() {
            let up = if i == 1 { -xu } else { xu };
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (a, b) = (*x, *y);
                *x = pick(a + xl, b - xl) + up;
                *y = pick(a - xl, b + xl) - up;
            }
        }
    }
}

// Last row: the -1 predecessor of state s is the complement of mask ^ s.
// For s in the lower half the upper neighbour bit is 0, and mask ^ s runs
// backwards through the upper half.
fn relax_last_row<S: Score>(score: &mut [S], xl: S, xu: S) {
    let half = score.len() / 2;
    let (lo, hi) = score.split_at_mut(half);
    if half >= LANES {
        for (x, y) in lo.chunks_exact_mut(LANES).zip(hi.rchunks_exact_mut(LANES)) {
            let mut rev: [S; LANES] = (&*y).try_into().expect("chunk has LANES entries");
            rev.reverse();
            for lane in 0..LANES {
                let (a, b) = (x[lane], rev[lane]);
                x[lane] = pick(a + xl, b - xl) + xu;
                rev[lane] = pick(b + xl, a - xl) - xu;
            }
            rev.reverse();
            y.copy_from_slice(&rev);
        }
    } else {
        for (x, y) in lo.iter_mut().zip(hi.iter_mut().rev()) {
            let (a, b) = (*x, *y);
            *x = pick(a + xl, b - xl) + xu;
            *y = pick(b + xl, a - xl) - xu;
        }
    }
}

fn log_add(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Exact posterior `P(y_v = +1)` for the Gibbs weight
/// `exp(sum_e J_e y_u y_v + sum_v K_v y_v)`, by a backward sweep that
/// stores every message followed by a forward sweep.
pub(crate) fn marginals(
    grid: &GridGraph,
    coupling: impl Fn(usize) -> f64,
    field: impl Fn(usize) -> f64,
) -> Vec<f64> {
    let rows = grid.rows();
    let states = 1usize << rows;
    let cells = cell_terms(grid, coupling, field);
    let n = cells.len();
    // first column cells see no left neighbour: the paired states carry the
    // same value and must not be summed twice
    let first_column = |k: usize| k < rows;

    // backward[k][s]: log-weight of all cells after k given the state after k
    let mut backward = vec![0.0f64; n * states];
    for k in (0..n.saturating_sub(1)).rev() {
        let cell = &cells[k + 1];
        let stride = 1usize << cell.row;
        let up_shift = cell.row.saturating_sub(1);
        let (this, later) = backward.split_at_mut((k + 1) * states);
        let this = &mut this[k * states..];
        let later = &later[..states];
        for base in (0..states).step_by(2 * stride) {
            for i0 in base..base + stride {
                let i1 = i0 + stride;
                let up0 = if cell.row > 0 && (i0 >> up_shift) & 1 == 1 { -cell.up } else { cell.up };
                let plus = up0 + cell.field + later[i0];
                let minus = -up0 - cell.field + later[i1];
                if first_column(k + 1) {
                    let v = log_add(plus, minus);
                    this[i0] = v;
                    this[i1] = v;
                } else {
                    // old bit r is the left neighbour
                    this[i0] = log_add(plus + cell.left, minus - cell.left);
                    this[i1] = log_add(plus - cell.left, minus + cell.left);
                }
            }
        }
    }

    let mut forward = vec![0.0f64; states];
    let mut out = vec![0.5; grid.n()];
    for (k, cell) in cells.iter().enumerate() {
        let stride = 1usize << cell.row;
        let up_shift = cell.row.saturating_sub(1);
        for base in (0..states).step_by(2 * stride) {
            for i0 in base..base + stride {
                let i1 = i0 + stride;
                let (a, b) = (forward[i0], forward[i1]);
                let up0 = if cell.row > 0 && (i0 >> up_shift) & 1 == 1 { -cell.up } else { cell.up };
                let (to_plus, to_minus) = if first_column(k) {
                    (a, a)
                } else {
                    (log_add(a + cell.left, b - cell.left), log_add(a - cell.left, b + cell.left))
                };
                forward[i0] = to_plus + up0 + cell.field;
                forward[i1] = to_minus - up0 - cell.field;
            }
        }
        let beta = &backward[k * states..(k + 1) * states];
        let (mut plus, mut minus) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        let bit = 1usize << cell.row;
        for s in 0..states {
            let w = forward[s] + beta[s];
            if s & bit == 0 {
                plus = log_add(plus, w);
            } else {
                minus = log_add(minus, w);
            }
        }
        out[cell.vertex] = 1.0 / (1.0 + (minus - plus).exp());
    }
    out
}
