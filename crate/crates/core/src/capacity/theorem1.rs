//! Maximization of min{I(X;Y) + R0, I(X;Y,Y1)} over the input simplex.
//!
//! Both terms are concave in p(x), so the objective is concave. For any
//! input p and weight lambda in [0, 1],
//!
//! ```text
//! C(R0) <= lambda R0 + max_x [lambda D(W_Y(.|x) || p W_Y) + (1 - lambda) D(W(.|x) || p W)]
//! ```
//!
//! which gives a certificate for every candidate. The search runs in three
//! stages: a Blahut-Arimoto style solve of the weighted problem inside a
//! golden-section search over lambda, a line search between the two final
//! bracket solutions, and projected supergradient ascent (step c/sqrt(t))
//! from the best candidate, the uniform input and Dirichlet restarts while
//! the certificate gap exceeds the tolerance.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::simplex::{center, golden_max, norm, project, random_point};
use super::{check_r0, Branch, OptimizerConfig, RatePoint, TIE_TOLERANCE};
use crate::channel::DiscreteRelayChannel;
use crate::error::{Error, Result};
use crate::info::Pmf;

/// Cap on divergences whose reference output has vanished.
const DIVERGENCE_CAP: f64 = 1e3;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Row-stochastic matrix with information helpers.
struct Matrix {
    rows: usize,
    cols: usize,
    w: Vec<f64>,
}

impl Matrix {
    /// Returns (I(X;Out), D(W(.|x) || pW) for every x).
    fn info(&self, p: &[f64]) -> (f64, Vec<f64>) {
        let mut q = vec![0.0; self.cols];
        for x in 0..self.rows {
            for j in 0..self.cols {
                q[j] += p[x] * self.w[x * self.cols + j];
            }
        }
        let d: Vec<f64> = (0..self.rows)
            .map(|x| {
                let mut acc = 0.0;
                for j in 0..self.cols {
                    let w = self.w[x * self.cols + j];
                    if w > 0.0 {
                        if q[j] > 0.0 {
                            acc += w * (w / q[j]).log2();
                        } else {
                            return DIVERGENCE_CAP;
                        }
                    }
                }
                acc.min(DIVERGENCE_CAP)
            })
            .collect();
        let i = p
            .iter()
            .zip(&d)
            .filter(|(pp, _)| **pp > 0.0)
            .map(|(pp, dd)| pp * dd)
            .sum::<f64>();
        (i.max(0.0), d)
    }
}

struct Model {
    direct: Matrix,
    full: Matrix,
    r0: f64,
}

#[derive(Clone)]
struct Eval {
    link: f64,
    broadcast: f64,
    d_direct: Vec<f64>,
    d_full: Vec<f64>,
}

impl Eval {
    fn value(&self) -> f64 {
        self.link.min(self.broadcast)
    }
}

impl Model {
    fn new(ch: &DiscreteRelayChannel, r0: f64) -> Self {
        let sx = ch.size_x();
        Self {
            direct: Matrix {
                rows: sx,
                cols: ch.size_y(),
                w: ch.receiver_matrix(),
            },
            full: Matrix {
                rows: sx,
                cols: ch.size_y() * ch.size_y1(),
                w: ch.transition().to_vec(),
            },
            r0,
        }
    }

    fn eval(&self, p: &[f64]) -> Eval {
        let (i_direct, d_direct) = self.direct.info(p);
        let (i_full, d_full) = self.full.info(p);
        Eval {
            link: i_direct + self.r0,
            broadcast: i_full,
            d_direct,
            d_full,
        }
    }

    /// min over lambda of lambda R0 + max_x [lambda D1_x + (1 - lambda) D2_x].
    fn certificate(&self, e: &Eval) -> f64 {
        let n = e.d_direct.len();
        // line x: a_x + lambda b_x
        let a: Vec<f64> = e.d_full.clone();
        let b: Vec<f64> = (0..n).map(|x| self.r0 + e.d_direct[x] - e.d_full[x]).collect();
        let envelope = |l: f64| (0..n).map(|x| a[x] + l * b[x]).fold(f64::NEG_INFINITY, f64::max);
        let mut best = envelope(0.0).min(envelope(1.0));
        for i in 0..n {
            for k in i + 1..n {
                if (b[i] - b[k]).abs() > 1e-300 {
                    let l = (a[k] - a[i]) / (b[i] - b[k]);
                    if (0.0..=1.0).contains(&l) {
                        best = best.min(envelope(l));
                    }
                }
            }
        }
        best
    }
}

/// Certified upper bound on max_p min{I(X;Y) + R0, I(X;Y,Y1)} from input `px`.
pub fn cutset_upper_bound(px: &Pmf, ch: &DiscreteRelayChannel, r0: f64) -> Result<f64> {
    check_r0(r0)?;
    if px.len() != ch.size_x() {
        return Err(Error::ShapeMismatch("input distribution does not match |X|".into()));
    }
    let model = Model::new(ch, r0);
    Ok(model.certificate(&model.eval(px.probs())))
}

/// Multiplicative-weights solve of max_p lambda I(X;Y) + (1 - lambda) I(X;Y,Y1).
/// Returns the final input and an upper bound on the weighted optimum.
fn weighted_solve(model: &Model, lambda: f64, start: &[f64], tol: f64, max_iter: usize) -> (Vec<f64>, f64, usize) {
    let mut p = start.to_vec();
    let mut upper = f64::INFINITY;
    for it in 0..max_iter {
        let e = model.eval(&p);
        let score: Vec<f64> = (0..p.len())
            .map(|x| lambda * e.d_direct[x] + (1.0 - lambda) * e.d_full[x])
            .collect();
        let value = lambda * (e.link - model.r0) + (1.0 - lambda) * e.broadcast;
        let top = score.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        upper = upper.min(top);
        if top - value <= tol {
            return (p, upper, it + 1);
        }
        // p'(x) proportional to p(x) 2^{score_x}, in the log domain
        let logs: Vec<f64> = p
            .iter()
            .zip(&score)
            .map(|(&px, &s)| {
                if px > 0.0 {
                    px.log2() + (s - top)
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = logs.iter().map(|l| (l - m).exp2()).collect();
        let total: f64 = w.iter().sum();
        p = w.iter().map(|v| v / total).collect();
    }
    (p, upper, max_iter)
}

struct Search<'a> {
    model: &'a Model,
    best_p: Vec<f64>,
    best: Eval,
    upper: f64,
    iterations: usize,
}

impl Search<'_> {
    fn offer(&mut self, p: Vec<f64>) {
        let e = self.model.eval(&p);
        self.upper = self.upper.min(self.model.certificate(&e));
        if e.value() > self.best.value() {
            self.best = e;
            self.best_p = p;
        }
    }

    fn gap(&self) -> f64 {
        self.upper - self.best.value()
    }
}

/// Runs the full search and reports convergence in the returned point rather
/// than as an error.
pub fn theorem1_search(ch: &DiscreteRelayChannel, r0: f64, cfg: &OptimizerConfig) -> Result<RatePoint> {
    cfg.check()?;
    check_r0(r0)?;
    ch.validate()?;
    let model = Model::new(ch, r0);
    let size = ch.size_x();
    let uniform = vec![1.0 / size as f64; size];
    let inner_tol = (cfg.tolerance * 1e-2).max(1e-13);
    let inner_iter = cfg.max_iterations;

    let mut search = Search {
        model: &model,
        best: model.eval(&uniform),
        best_p: uniform.clone(),
        upper: f64::INFINITY,
        iterations: 0,
    };
    search.offer(uniform.clone());

    // Dual: minimize lambda R0 + G(lambda) over lambda by golden section.
    let mut warm = uniform.clone();
    let solve = |lambda: f64, search: &mut Search, warm: &mut Vec<f64>| -> (f64, Vec<f64>) {
        let (p, upper_g, its) = weighted_solve(&model, lambda, warm, inner_tol, inner_iter);
        search.iterations += its;
        search.upper = search.upper.min(lambda * r0 + upper_g);
        search.offer(p.clone());
        *warm = p.clone();
        (lambda * r0 + upper_g, p)
    };
    solve(0.0, &mut search, &mut warm);
    solve(1.0, &mut search, &mut warm);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let (mut hc, mut pc) = solve(c, &mut search, &mut warm);
    let (mut hd, mut pd) = solve(d, &mut search, &mut warm);
    while hi - lo > 1e-10 && search.gap() > cfg.tolerance * 1e-2 {
        if hc <= hd {
            hi = d;
            d = c;
            hd = hc;
            pd = pc;
            c = hi - INV_PHI * (hi - lo);
            (hc, pc) = solve(c, &mut search, &mut warm);
        } else {
            lo = c;
            c = d;
            hc = hd;
            pc = pd;
            d = lo + INV_PHI * (hi - lo);
            (hd, pd) = solve(d, &mut search, &mut warm);
        }
    }

    // Primal recovery at a kink: best mixture of the two bracket solutions.
    if search.gap() > cfg.tolerance {
        let mix = |t: f64| -> Vec<f64> { pc.iter().zip(&pd).map(|(a, b)| t * a + (1.0 - t) * b).collect() };
        let (t, _) = golden_max(0.0, 1.0, 60, |t| model.eval(&mix(t)).value());
        search.offer(mix(t));
    }

    // Projected supergradient polish with restarts.
    if search.gap() > cfg.tolerance {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut starts = vec![search.best_p.clone(), uniform.clone()];
        starts.extend((0..cfg.restarts).map(|_| random_point(size, &mut rng)));
        for start in starts {
            supergradient(&mut search, start, cfg);
            if search.gap() <= cfg.tolerance {
                break;
            }
        }
    }

    let gap = search.gap();
    let Search {
        best,
        best_p,
        upper,
        iterations,
        ..
    } = search;
    Ok(RatePoint {
        r0,
        rate: best.value(),
        argmax_input: Pmf::from_weights(&best_p)?,
        witness: None,
        link_cost: None,
        link_term: best.link,
        broadcast_term: best.broadcast,
        active_branch: Branch::of(best.link, best.broadcast),
        upper_bound: Some(upper),
        iterations,
        converged: gap <= cfg.tolerance,
    })
}

fn supergradient(search: &mut Search, start: Vec<f64>, cfg: &OptimizerConfig) {
    const STEP: f64 = 0.1;
    let mut p = start;
    for t in 0..cfg.max_iterations {
        let e = search.model.eval(&p);
        let diff = e.link - e.broadcast;
        let mut g: Vec<f64> = if diff.abs() < TIE_TOLERANCE {
            e.d_direct.iter().zip(&e.d_full).map(|(a, b)| 0.5 * (a + b)).collect()
        } else if diff < 0.0 {
            e.d_direct.clone()
        } else {
            e.d_full.clone()
        };
        search.iterations += 1;
        search.offer(p.clone());
        if search.gap() <= cfg.tolerance {
            return;
        }
        center(&mut g);
        let len = norm(&g).max(1e-12);
        let step = STEP / ((t + 1) as f64).sqrt();
        let moved: Vec<f64> = p.iter().zip(&g).map(|(a, b)| a + step * b / len).collect();
        p = project(&moved);
    }
}

/// Capacity max_p min{I(X;Y) + R0, I(X;Y,Y1)} of a deterministic relay
/// channel, certified within `cfg.tolerance`.
pub fn theorem1_capacity(ch: &DiscreteRelayChannel, r0: f64, cfg: &OptimizerConfig) -> Result<RatePoint> {
    let point = theorem1_search(ch, r0, cfg)?;
    if !point.converged {
        return Err(Error::NotConverged {
            iterations: point.iterations,
            gap: point.upper_bound.unwrap_or(f64::INFINITY) - point.rate,
            rate: point.rate,
        });
    }
    Ok(point)
}
