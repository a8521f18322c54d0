//! Alternating ascent over (p(x), p(yhat1 | y1)) for the compress-and-forward
//! and rate-limited state-information expressions.
//!
//! The link constraint I(Y1;Yhat1|Y) <= R0 enters as an exact penalty
//! during ascent. Every reported point is made feasible by mixing the test
//! channel toward the spare "erasure" column (the extra symbol of the
//! |Y1| + 1 alphabet), which only degrades the description and so lowers
//! the link cost monotonically.
//!
//! Both rates are achievable, so the certified cut-set bound from the
//! max-min search caps them; restarts stop early once the best point is
//! within tolerance of that bound, and a single ascent stops once its
//! repaired value stalls.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::simplex::{center, norm, project, random_point};
use super::theorem1::theorem1_search;
use super::{
    check_r0, cutset_terms, description_joint_raw, Branch, OptimizerConfig, RatePoint, TestChannel, AXIS_Y1_HAT,
};
use crate::channel::{DiscreteRelayChannel, StateChannel, AXIS_X, AXIS_Y, AXIS_Y1};
use crate::error::Result;
use crate::info::{conditional_mi_gradient, conditional_mutual_information, JointPmf, Pmf};

const PENALTY: f64 = 4.0;
const LOG_FLOOR: f64 = 1e-12;
const P_STEP: f64 = 0.05;
const T_STEP: f64 = 0.1;
const REPAIR_EVERY: usize = 25;
/// Repair checkpoints without improvement before an ascent gives up.
const PATIENCE: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Objective {
    /// I(X; Y, Yhat1)
    CompressForward,
    /// I(X; Y | Shat)
    StateInformation,
}

struct Problem<'a> {
    ch: &'a DiscreteRelayChannel,
    objective: Objective,
    r0: f64,
    cols: usize,
}

const X: &[usize] = &[AXIS_X];
const Y: &[usize] = &[AXIS_Y];
const Y1: &[usize] = &[AXIS_Y1];
const YH: &[usize] = &[AXIS_Y1_HAT];
const Y_YH: &[usize] = &[AXIS_Y, AXIS_Y1_HAT];
const NONE: &[usize] = &[];

impl Problem<'_> {
    fn objective_axes(&self) -> (&'static [usize], &'static [usize], &'static [usize]) {
        match self.objective {
            Objective::CompressForward => (X, Y_YH, NONE),
            Objective::StateInformation => (X, Y, YH),
        }
    }

    /// (rate, link cost)
    fn evaluate(&self, p: &[f64], tc: &TestChannel) -> (f64, f64) {
        let j = description_joint_raw(p, self.ch, tc);
        self.evaluate_joint(&j)
    }

    fn evaluate_joint(&self, j: &JointPmf) -> (f64, f64) {
        let (a, b, c) = self.objective_axes();
        (
            conditional_mutual_information(j, a, b, c).unwrap_or(0.0),
            conditional_mutual_information(j, Y1, YH, Y).unwrap_or(0.0),
        )
    }

    /// Gradients of rate - PENALTY * max(0, cost - R0) w.r.t. p and the test channel.
    fn gradients(&self, p: &[f64], tc: &TestChannel) -> (Vec<f64>, Vec<f64>, f64, f64) {
        let j = description_joint_raw(p, self.ch, tc);
        let (rate, cost) = self.evaluate_joint(&j);
        let (a, b, c) = self.objective_axes();
        let mut g = conditional_mi_gradient(&j, a, b, c, LOG_FLOOR);
        if cost > self.r0 {
            let gk = conditional_mi_gradient(&j, Y1, YH, Y, LOG_FLOOR);
            g.iter_mut().zip(&gk).for_each(|(v, k)| *v -= PENALTY * k);
        }
        let (sx, sy, sy1, sh) = (self.ch.size_x(), self.ch.size_y(), self.ch.size_y1(), self.cols);
        let mut gp = vec![0.0; sx];
        let mut gt = vec![0.0; sy1 * sh];
        for x in 0..sx {
            for y in 0..sy {
                for y1 in 0..sy1 {
                    let w = self.ch.prob(x, y, y1);
                    if w == 0.0 {
                        continue;
                    }
                    let base = ((x * sy + y) * sy1 + y1) * sh;
                    for h in 0..sh {
                        let gq = g[base + h];
                        gp[x] += w * tc.get(y1, h) * gq;
                        gt[y1 * sh + h] += p[x] * w * gq;
                    }
                }
            }
        }
        (gp, gt, rate, cost)
    }

    /// Mixes `tc` toward the erasure column until the link cost fits.
    fn repair(&self, p: &[f64], tc: &TestChannel) -> (TestChannel, f64, f64) {
        let (rate, cost) = self.evaluate(p, tc);
        if cost <= self.r0 {
            return (tc.clone(), rate, cost);
        }
        let erase = self.cols - 1;
        let mixed = |theta: f64| {
            let probs = (0..tc.rows())
                .flat_map(|r| {
                    (0..self.cols).map(move |h| (1.0 - theta) * tc.get(r, h) + if h == erase { theta } else { 0.0 })
                })
                .collect();
            TestChannel::from_rows_unchecked(tc.rows(), self.cols, probs)
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.evaluate(p, &mixed(mid)).1 <= self.r0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let out = mixed(hi);
        let (rate, cost) = self.evaluate(p, &out);
        (out, rate, cost)
    }
}

struct Best {
    p: Vec<f64>,
    tc: TestChannel,
    rate: f64,
    cost: f64,
}

fn ascend(
    problem: &Problem,
    p0: Vec<f64>,
    t0: TestChannel,
    iterations: usize,
    tolerance: f64,
    best: &mut Option<Best>,
) -> usize {
    let (sy1, sh) = (problem.ch.size_y1(), problem.cols);
    let mut p = p0;
    let mut tc = t0;
    // returns whether the point improved on the best by more than `tolerance`
    let consider = |p: &[f64], tc: &TestChannel, best: &mut Option<Best>| {
        let (fixed, rate, cost) = problem.repair(p, tc);
        let previous = best.as_ref().map_or(f64::NEG_INFINITY, |b| b.rate);
        if rate > previous {
            *best = Some(Best {
                p: p.to_vec(),
                tc: fixed,
                rate,
                cost,
            });
        }
        rate > previous + tolerance
    };
    consider(&p, &tc, best);
    let mut stalled = 0;
    for t in 0..iterations {
        let (mut gp, gt, _, _) = problem.gradients(&p, &tc);
        let decay = ((t + 1) as f64).sqrt();
        // input step
        center(&mut gp);
        let len = norm(&gp).max(1.0);
        let moved: Vec<f64> = p.iter().zip(&gp).map(|(a, g)| a + P_STEP / decay * g / len).collect();
        p = project(&moved);
        // description step, row by row
        let mut probs = Vec::with_capacity(sy1 * sh);
        for r in 0..sy1 {
            let mut g = gt[r * sh..(r + 1) * sh].to_vec();
            center(&mut g);
            let len = norm(&g).max(1.0);
            let row: Vec<f64> = (0..sh).map(|h| tc.get(r, h) + T_STEP / decay * g[h] / len).collect();
            probs.extend(project(&row));
        }
        tc = TestChannel::from_rows_unchecked(sy1, sh, probs);
        if (t + 1) % REPAIR_EVERY == 0 || t + 1 == iterations {
            if consider(&p, &tc, best) {
                stalled = 0;
            } else {
                stalled += 1;
                if stalled >= PATIENCE {
                    return t + 1;
                }
            }
        }
    }
    iterations
}

fn optimize(ch: &DiscreteRelayChannel, objective: Objective, r0: f64, cfg: &OptimizerConfig) -> Result<RatePoint> {
    cfg.check()?;
    check_r0(r0)?;
    let problem = Problem {
        ch,
        objective,
        r0,
        cols: ch.size_y1() + 1,
    };
    let (sx, sy1) = (ch.size_x(), ch.size_y1());
    // the max-min bound needs a deterministic relay; a state that (x, y) does
    // not determine leaves the state-information rate without a bound
    let bounded = objective == Objective::CompressForward || ch.validate().is_ok();
    let upper = if bounded {
        theorem1_search(ch, r0, cfg)?.upper_bound.unwrap_or(f64::INFINITY)
    } else {
        f64::INFINITY
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<Best> = None;
    let mut iterations = 0;
    let mut restart_values = Vec::with_capacity(cfg.restarts);

    for restart in 0..cfg.restarts {
        let (p0, t0) = if restart == 0 {
            (vec![1.0 / sx as f64; sx], TestChannel::erasure(sy1, 0.0))
        } else {
            let p = random_point(sx, &mut rng);
            let probs = (0..sy1).flat_map(|_| random_point(problem.cols, &mut rng)).collect();
            (p, TestChannel::from_rows_unchecked(sy1, problem.cols, probs))
        };
        let mut local = None;
        iterations += ascend(&problem, p0, t0, cfg.max_iterations, cfg.tolerance, &mut local);
        if let Some(l) = local {
            restart_values.push(l.rate);
            if best.as_ref().is_none_or(|b| l.rate > b.rate) {
                best = Some(l);
            }
        }
        if best.as_ref().is_some_and(|b| upper - b.rate <= cfg.tolerance) {
            break;
        }
    }

    let best = best.expect("at least one restart");
    // certified when it meets the cut-set bound; otherwise agreement between
    // independent restarts is the only signal for this nonconvex search
    let certified = upper - best.rate <= cfg.tolerance;
    let agreeing = restart_values.iter().filter(|v| best.rate - **v <= 1e-4).count();
    let pmf = Pmf::from_weights(&best.p)?;
    let (link, broadcast) = cutset_terms(&pmf, ch, r0)?;
    Ok(RatePoint {
        r0,
        rate: best.rate,
        argmax_input: pmf,
        witness: Some(best.tc),
        link_cost: Some(best.cost),
        link_term: link,
        broadcast_term: broadcast,
        active_branch: Branch::of(link, broadcast),
        upper_bound: upper.is_finite().then_some(upper),
        iterations,
        converged: certified || agreeing >= 2 || cfg.restarts == 1,
    })
}

/// Best compress-and-forward rate I(X;Y,Yhat1) with I(Y1;Yhat1|Y) <= R0 over
/// inputs and test channels with |Yhat1| = |Y1| + 1.
pub fn cf_optimal(ch: &DiscreteRelayChannel, r0: f64, cfg: &OptimizerConfig) -> Result<RatePoint> {
    optimize(ch, Objective::CompressForward, r0, cfg)
}

/// Best I(X;Y|Shat) with I(S;Shat|Y) <= R0, |Shat| = |S| + 1.
pub fn ah_optimal(state_ch: &StateChannel, r0: f64, cfg: &OptimizerConfig) -> Result<RatePoint> {
    let ch = state_ch.to_relay_channel()?;
    optimize(&ch, Objective::StateInformation, r0, cfg)
}
