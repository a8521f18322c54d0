//! Rate and capacity evaluators for deterministic relay channels.
//!
//! * [`cutset_rate`] and [`theorem1_capacity`]: the max-min cut-set
//!   expression `max_p min{I(X;Y) + R0, I(X;Y,Y1)}`, which is the capacity
//!   when `Y1 = f(X, Y)`.
//! * [`cf_rate`] / [`cf_optimal`]: compress-and-forward with a Wyner-Ziv
//!   description `Yhat1` of the relay output.
//! * [`chf_rate`]: compress-hash-and-forward, which hashes whatever link
//!   budget the description leaves unused.
//! * [`ah_rate`] / [`ah_optimal`]: the rate-limited state-information
//!   expression `max I(X;Y|Shat)` s.t. `I(S;Shat|Y) <= R0`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{DiscreteRelayChannel, StateChannel, AXIS_X, AXIS_Y, AXIS_Y1};
use crate::error::{Error, Result};
use crate::info::{conditional_mutual_information, mutual_information, JointPmf, Pmf, MASS_TOLERANCE};

mod compress;
pub mod simplex;
mod theorem1;

pub use compress::{ah_optimal, cf_optimal};
pub use theorem1::{cutset_upper_bound, theorem1_capacity, theorem1_search};

/// Axis of the relay description in the four-way joint (X, Y, Y1, Yhat1).
pub const AXIS_Y1_HAT: usize = 3;

/// Ties in the cut-set minimum closer than this are reported as [`Branch::Tie`].
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Conditional law p(yhat1 | y1) of the relay description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct TestChannel {
    rows: usize,
    cols: usize,
    probs: Vec<f64>,
}

impl TestChannel {
    pub fn new(rows: usize, cols: usize, probs: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || probs.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "test channel {rows}x{cols} cannot hold {} entries",
                probs.len()
            )));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution(
                "test channel entries must be finite and nonnegative".into(),
            ));
        }
        for r in 0..rows {
            let sum: f64 = probs[r * cols..(r + 1) * cols].iter().sum();
            if (sum - 1.0).abs() > MASS_TOLERANCE {
                return Err(Error::InvalidDistribution(format!(
                    "test channel row {r} sums to {sum}"
                )));
            }
        }
        Ok(Self { rows, cols, probs })
    }

    /// Rows renormalized; used by optimizers whose iterates drift by rounding.
    pub(crate) fn from_rows_unchecked(rows: usize, cols: usize, mut probs: Vec<f64>) -> Self {
        for r in 0..rows {
            let row = &mut probs[r * cols..(r + 1) * cols];
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|p| *p /= s);
        }
        Self { rows, cols, probs }
    }

    /// Yhat1 = Y1 on an alphabet of `size` symbols.
    pub fn identity(size: usize) -> Self {
        Self::erasure(size, 0.0).restrict_cols(size)
    }

    /// Yhat1 constant at column `col`: a description carrying nothing.
    pub fn constant(rows: usize, cols: usize, col: usize) -> Self {
        assert!(col < cols);
        let mut probs = vec![0.0; rows * cols];
        for r in 0..rows {
            probs[r * cols + col] = 1.0;
        }
        Self { rows, cols, probs }
    }

    /// Yhat1 = Y1 with probability 1 - `erase`, otherwise the extra symbol `size`.
    pub fn erasure(size: usize, erase: f64) -> Self {
        let cols = size + 1;
        let mut probs = vec![0.0; size * cols];
        for r in 0..size {
            probs[r * cols + r] = 1.0 - erase;
            probs[r * cols + size] += erase;
        }
        Self {
            rows: size,
            cols,
            probs,
        }
    }

    /// Binary rate-distortion test channel for S ~ Bern(p) with backward
    /// channel S = Shat xor U, U ~ Bern(q); needs 0 <= q <= min(p, 1-p).
    pub fn binary_backward(p: f64, q: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&q) || q > p.min(1.0 - p) {
            return Err(Error::InvalidParameter(format!(
                "backward channel needs 0 <= q <= min(p, 1-p), got p={p}, q={q}"
            )));
        }
        if q == 0.5 {
            return Ok(Self::constant(2, 2, 0));
        }
        // P(Shat = 1) solves r(1-q) + (1-r)q = p
        let r = (p - q) / (1.0 - 2.0 * q);
        let ps = [1.0 - p, p];
        let pshat = [1.0 - r, r];
        let mut probs = vec![0.0; 4];
        for s in 0..2 {
            for sh in 0..2 {
                let back = if s == sh { 1.0 - q } else { q };
                probs[s * 2 + sh] = if ps[s] > 0.0 { pshat[sh] * back / ps[s] } else { 0.5 };
            }
        }
        Self::new(2, 2, probs)
    }

    fn restrict_cols(&self, cols: usize) -> Self {
        let probs = (0..self.rows)
            .flat_map(|r| self.probs[r * self.cols..r * self.cols + cols].to_vec())
            .collect();
        Self {
            rows: self.rows,
            cols,
            probs,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.probs[row * self.cols + col]
    }
}

impl TryFrom<Vec<Vec<f64>>> for TestChannel {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("ragged test channel rows".into()));
        }
        let n = rows.len();
        Self::new(n, cols, rows.into_iter().flatten().collect())
    }
}

impl From<TestChannel> for Vec<Vec<f64>> {
    fn from(t: TestChannel) -> Self {
        t.probs.chunks(t.cols).map(<[f64]>::to_vec).collect()
    }
}

/// Which cut-set term attains the minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// I(X;Y) + R0: the relay link is the bottleneck.
    Link,
    /// I(X;Y,Y1): the broadcast cut is the bottleneck.
    Broadcast,
    Tie,
}

impl Branch {
    pub fn of(link_term: f64, broadcast_term: f64) -> Self {
        if (link_term - broadcast_term).abs() < TIE_TOLERANCE {
            Branch::Tie
        } else if link_term < broadcast_term {
            Branch::Link
        } else {
            Branch::Broadcast
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Link => "link",
            Branch::Broadcast => "broadcast",
            Branch::Tie => "tie",
        }
    }
}

/// One evaluated point of a rate or capacity curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RatePoint {
    pub r0: f64,
    pub rate: f64,
    pub argmax_input: Pmf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<TestChannel>,
    /// Link cost I(Y1;Yhat1|Y) of the witness description.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub link_cost: Option<f64>,
    /// I(X;Y) + R0 at the reported input.
    pub link_term: f64,
    /// I(X;Y,Y1) at the reported input.
    pub broadcast_term: f64,
    pub active_branch: Branch,
    /// Certified upper bound on the optimum, when the search provides one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_bound: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-7,
            max_iterations: 20_000,
            restarts: 8,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn check(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 || self.restarts == 0 {
            return Err(Error::InvalidParameter(
                "maxIterations and restarts must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

fn check_r0(r0: f64) -> Result<()> {
    if !(r0 >= 0.0) || !r0.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "link rate must be finite and nonnegative, got {r0}"
        )));
    }
    Ok(())
}

/// The two cut-set terms (I(X;Y) + R0, I(X;Y,Y1)) at input `px`.
pub fn cutset_terms(px: &Pmf, ch: &DiscreteRelayChannel, r0: f64) -> Result<(f64, f64)> {
    check_r0(r0)?;
    let j = ch.induced_joint(px)?;
    let direct = mutual_information(&j, &[AXIS_X], &[AXIS_Y])?;
    let both = mutual_information(&j, &[AXIS_X], &[AXIS_Y, AXIS_Y1])?;
    Ok((direct + r0, both))
}

/// min{I(X;Y) + R0, I(X;Y,Y1)} at input `px`.
pub fn cutset_rate(px: &Pmf, ch: &DiscreteRelayChannel, r0: f64) -> Result<f64> {
    let (a, b) = cutset_terms(px, ch, r0)?;
    Ok(a.min(b))
}

/// Joint p(x) p(y, y1 | x) p(yhat1 | y1) over (X, Y, Y1, Yhat1).
pub fn description_joint(px: &Pmf, ch: &DiscreteRelayChannel, tc: &TestChannel) -> Result<JointPmf> {
    if tc.rows() != ch.size_y1() {
        return Err(Error::ShapeMismatch(format!(
            "test channel has {} rows, relay alphabet has {} symbols",
            tc.rows(),
            ch.size_y1()
        )));
    }
    if px.len() != ch.size_x() {
        return Err(Error::ShapeMismatch(format!(
            "input distribution has {} entries, channel has |X| = {}",
            px.len(),
            ch.size_x()
        )));
    }
    Ok(description_joint_raw(px.probs(), ch, tc))
}

pub(crate) fn description_joint_raw(px: &[f64], ch: &DiscreteRelayChannel, tc: &TestChannel) -> JointPmf {
    let (sx, sy, sy1, sh) = (ch.size_x(), ch.size_y(), ch.size_y1(), tc.cols());
    let mut probs = vec![0.0; sx * sy * sy1 * sh];
    for x in 0..sx {
        for y in 0..sy {
            for y1 in 0..sy1 {
                let w = px[x] * ch.prob(x, y, y1);
                if w == 0.0 {
                    continue;
                }
                let base = ((x * sy + y) * sy1 + y1) * sh;
                for h in 0..sh {
                    probs[base + h] = w * tc.get(y1, h);
                }
            }
        }
    }
    JointPmf::from_parts(vec![sx, sy, sy1, sh], probs)
}

const X: &[usize] = &[AXIS_X];
const Y: &[usize] = &[AXIS_Y];
const Y1: &[usize] = &[AXIS_Y1];
const YH: &[usize] = &[AXIS_Y1_HAT];
const Y_YH: &[usize] = &[AXIS_Y, AXIS_Y1_HAT];
const NONE: &[usize] = &[];

/// Compress-and-forward: (I(X;Y,Yhat1), I(Y1;Yhat1|Y)).
pub fn cf_rate(px: &Pmf, ch: &DiscreteRelayChannel, tc: &TestChannel) -> Result<(f64, f64)> {
    let j = description_joint(px, ch, tc)?;
    Ok((
        conditional_mutual_information(&j, X, Y_YH, NONE)?,
        conditional_mutual_information(&j, Y1, YH, Y)?,
    ))
}

/// Compress-hash-and-forward rate with link budget `r0`.
///
/// When the description alone exhausts the link, the scheme hashes the
/// description and gets min{I(X;Y) + R0, I(X;Y,Yhat1)}. Otherwise the spare
/// budget `R0 - I(Y1;Yhat1|Y)` hashes Y1 itself on top of the description.
pub fn chf_rate(px: &Pmf, ch: &DiscreteRelayChannel, tc: &TestChannel, r0: f64) -> Result<f64> {
    check_r0(r0)?;
    let j = description_joint(px, ch, tc)?;
    let with_desc = conditional_mutual_information(&j, X, Y_YH, NONE)?;
    let link_cost = conditional_mutual_information(&j, Y1, YH, Y)?;
    if link_cost >= r0 {
        let direct = conditional_mutual_information(&j, X, Y, NONE)?;
        Ok((direct + r0).min(with_desc))
    } else {
        let spare = r0 - link_cost;
        let everything = conditional_mutual_information(&j, X, &[AXIS_Y, AXIS_Y1, AXIS_Y1_HAT], NONE)?;
        Ok((with_desc + spare).min(everything))
    }
}

/// Rate-limited state information: (I(X;Y|Shat), I(S;Shat|Y)).
pub fn ah_rate(px: &Pmf, state_ch: &StateChannel, tc: &TestChannel) -> Result<(f64, f64)> {
    let ch = state_ch.to_relay_channel()?;
    let j = description_joint(px, &ch, tc)?;
    Ok((
        conditional_mutual_information(&j, X, Y, YH)?,
        conditional_mutual_information(&j, Y1, YH, Y)?,
    ))
}

/// Points of a capacity curve, ordered by link rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCurve {
    pub points: Vec<RatePoint>,
}

/// Max-min capacity at every grid point.
///
/// Grid points are solved in parallel on the current rayon pool. Afterwards
/// each point is compared with the previous point's input evaluated at the
/// new link rate; since the cut-set expression is nondecreasing in R0 for a
/// fixed input, that candidate is feasible and the curve stays monotone.
/// Points whose certificate misses the tolerance keep `converged = false`.
pub fn capacity_curve(ch: &DiscreteRelayChannel, r0_grid: &[f64], cfg: &OptimizerConfig) -> Result<RateCurve> {
    cfg.check()?;
    ch.validate()?;
    for &r0 in r0_grid {
        check_r0(r0)?;
    }
    if r0_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("link-rate grid must be sorted".into()));
    }
    let mut points = r0_grid
        .par_iter()
        .map(|&r0| theorem1_search(ch, r0, cfg))
        .collect::<Result<Vec<_>>>()?;
    for i in 1..points.len() {
        let prev_input = points[i - 1].argmax_input.clone();
        let (link, broadcast) = cutset_terms(&prev_input, ch, points[i].r0)?;
        if link.min(broadcast) > points[i].rate {
            let p = &mut points[i];
            p.rate = link.min(broadcast);
            p.argmax_input = prev_input;
            p.link_term = link;
            p.broadcast_term = broadcast;
            p.active_branch = Branch::of(link, broadcast);
            if let Some(ub) = p.upper_bound {
                p.converged = ub - p.rate <= cfg.tolerance;
            }
        }
    }
    Ok(RateCurve { points })
}
