//! Finite-alphabet information measures and typicality tests.
//!
//! All quantities are in bits. Joint distributions are stored densely in
//! row-major order (last axis varies fastest); the alphabets handled here
//! are small enough that sparsity buys nothing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on total probability mass.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Probabilities at or below this are treated as exact zeros in entropy sums.
pub const ZERO_PROB: f64 = 1e-15;

/// Tiny negative information values (from cancellation) are clamped to zero.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

/// Symbols of every alphabet in this crate.
pub type Symbol = u8;

/// A probability vector over a finite alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_mass(&probs)?;
        Ok(Self { probs })
    }

    /// Rescales nonnegative weights to unit mass.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if weights.is_empty() || total <= 0.0 {
            return Err(Error::InvalidDistribution("weights have zero mass".into()));
        }
        Ok(Self {
            probs: weights.iter().map(|w| w / total).collect(),
        })
    }

    pub fn uniform(size: usize) -> Self {
        assert!(size > 0, "alphabet must be nonempty");
        Self {
            probs: vec![1.0 / size as f64; size],
        }
    }

    pub fn point_mass(size: usize, at: usize) -> Self {
        assert!(at < size, "point mass outside alphabet");
        let mut probs = vec![0.0; size];
        probs[at] = 1.0;
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }
}

impl TryFrom<Vec<f64>> for Pmf {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Pmf::new(v)
    }
}

impl From<Pmf> for Vec<f64> {
    fn from(p: Pmf) -> Self {
        p.probs
    }
}

fn check_mass(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidDistribution("empty probability vector".into()));
    }
    if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "entry {bad} is negative or not finite"
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::InvalidDistribution(format!("total mass {total} differs from 1")));
    }
    Ok(())
}

/// A joint distribution over several finite alphabets.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    dims: Vec<usize>,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new(dims: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::ShapeMismatch(format!("invalid dimensions {dims:?}")));
        }
        let size: usize = dims.iter().product();
        if size != probs.len() {
            return Err(Error::ShapeMismatch(format!(
                "dimensions {dims:?} need {size} entries, got {}",
                probs.len()
            )));
        }
        check_mass(&probs)?;
        Ok(Self { dims, probs })
    }

    /// Builds a joint without the mass check; callers guarantee validity.
    pub(crate) fn from_parts(dims: Vec<usize>, probs: Vec<f64>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), probs.len());
        Self { dims, probs }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn num_axes(&self) -> usize {
        self.dims.len()
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for a in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * self.dims[a + 1];
        }
        strides
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        let strides = self.strides();
        let flat: usize = index.iter().zip(&strides).map(|(i, s)| i * s).sum();
        self.probs[flat]
    }

    /// For every flat entry, the flat index of its projection onto `axes`.
    fn projection_map(&self, axes: &[usize]) -> (Vec<usize>, usize) {
        let mut proj_stride = vec![0usize; self.dims.len()];
        let mut size = 1usize;
        for &a in axes.iter().rev() {
            proj_stride[a] = size;
            size *= self.dims[a];
        }
        let mut map = Vec::with_capacity(self.probs.len());
        let mut index = vec![0usize; self.dims.len()];
        let mut target = 0usize;
        for _ in 0..self.probs.len() {
            map.push(target);
            // odometer increment
            for a in (0..self.dims.len()).rev() {
                index[a] += 1;
                target += proj_stride[a];
                if index[a] < self.dims[a] {
                    break;
                }
                target -= proj_stride[a] * index[a];
                index[a] = 0;
            }
        }
        (map, size)
    }

    /// Marginal over `axes`, in the order given.
    pub fn marginal(&self, axes: &[usize]) -> Result<JointPmf> {
        self.check_axes(&[axes])?;
        if axes.is_empty() {
            return Err(Error::InvalidAxes("marginal over no axes".into()));
        }
        let (map, size) = self.projection_map(axes);
        let mut probs = vec![0.0; size];
        for (p, &t) in self.probs.iter().zip(&map) {
            probs[t] += p;
        }
        Ok(JointPmf::from_parts(
            axes.iter().map(|&a| self.dims[a]).collect(),
            probs,
        ))
    }

    fn check_axes(&self, sets: &[&[usize]]) -> Result<()> {
        let mut seen = vec![false; self.dims.len()];
        for set in sets {
            for &a in *set {
                if a >= self.dims.len() {
                    return Err(Error::InvalidAxes(format!(
                        "axis {a} out of range for {} axes",
                        self.dims.len()
                    )));
                }
                if seen[a] {
                    return Err(Error::InvalidAxes(format!("axis {a} appears twice")));
                }
                seen[a] = true;
            }
        }
        Ok(())
    }

    /// Entropy of the marginal over `axes` (0 for the empty set).
    pub fn entropy_of(&self, axes: &[usize]) -> f64 {
        if axes.is_empty() {
            return 0.0;
        }
        let (map, size) = self.projection_map(axes);
        let mut probs = vec![0.0; size];
        for (p, &t) in self.probs.iter().zip(&map) {
            probs[t] += p;
        }
        entropy_sum(&probs)
    }

    /// Gradient of `H(axes)` with respect to every joint entry, in bits.
    pub(crate) fn entropy_gradient(&self, axes: &[usize], floor: f64) -> Vec<f64> {
        if axes.is_empty() {
            return vec![0.0; self.probs.len()];
        }
        let (map, size) = self.projection_map(axes);
        let mut marg = vec![0.0; size];
        for (p, &t) in self.probs.iter().zip(&map) {
            marg[t] += p;
        }
        let log_marg: Vec<f64> = marg.iter().map(|m| m.max(floor).log2()).collect();
        map.iter().map(|&t| -(log_marg[t] + std::f64::consts::LOG2_E)).collect()
    }
}

fn entropy_sum(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > ZERO_PROB).map(|&p| -p * p.log2()).sum()
}

/// Shannon entropy in bits.
pub fn entropy(p: &Pmf) -> f64 {
    entropy_sum(p.probs())
}

/// Binary entropy function H(p) in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_sum(&[p, 1.0 - p])
}

fn clamp_info(v: f64) -> f64 {
    if v < 0.0 && v > -CLAMP_TOLERANCE {
        0.0
    } else {
        v
    }
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().chain(b).copied().collect()
}

/// I(A;B) over the given axis sets.
pub fn mutual_information(j: &JointPmf, axes_a: &[usize], axes_b: &[usize]) -> Result<f64> {
    j.check_axes(&[axes_a, axes_b])?;
    let v = j.entropy_of(axes_a) + j.entropy_of(axes_b) - j.entropy_of(&union(axes_a, axes_b));
    Ok(clamp_info(v))
}

/// I(A;B|C) over the given axis sets.
pub fn conditional_mutual_information(
    j: &JointPmf,
    axes_a: &[usize],
    axes_b: &[usize],
    axes_c: &[usize],
) -> Result<f64> {
    j.check_axes(&[axes_a, axes_b, axes_c])?;
    let ac = union(axes_a, axes_c);
    let bc = union(axes_b, axes_c);
    let abc = union(&ac, axes_b);
    let v = j.entropy_of(&ac) + j.entropy_of(&bc) - j.entropy_of(&abc) - j.entropy_of(axes_c);
    Ok(clamp_info(v))
}

/// H(A|B) over the given axis sets.
pub fn conditional_entropy(j: &JointPmf, axes_a: &[usize], axes_b: &[usize]) -> Result<f64> {
    j.check_axes(&[axes_a, axes_b])?;
    Ok(clamp_info(j.entropy_of(&union(axes_a, axes_b)) - j.entropy_of(axes_b)))
}

/// Gradient of I(A;B|C) with respect to every joint entry (bits per unit mass).
pub(crate) fn conditional_mi_gradient(
    j: &JointPmf,
    axes_a: &[usize],
    axes_b: &[usize],
    axes_c: &[usize],
    floor: f64,
) -> Vec<f64> {
    let ac = union(axes_a, axes_c);
    let bc = union(axes_b, axes_c);
    let abc = union(&ac, axes_b);
    let g_ac = j.entropy_gradient(&ac, floor);
    let g_bc = j.entropy_gradient(&bc, floor);
    let g_abc = j.entropy_gradient(&abc, floor);
    let g_c = j.entropy_gradient(axes_c, floor);
    (0..g_ac.len()).map(|i| g_ac[i] + g_bc[i] - g_abc[i] - g_c[i]).collect()
}

/// Flavor of joint typicality used by list decoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Typicality {
    /// Relative-deviation strong typicality on the empirical joint type.
    Strong,
    /// Entropy-rate (weak) joint typicality on x^n, y^n and (x^n, y^n).
    #[default]
    Weak,
}

impl std::str::FromStr for Typicality {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strong" => Ok(Typicality::Strong),
            "weak" => Ok(Typicality::Weak),
            other => Err(Error::InvalidParameter(format!(
                "unknown typicality '{other}' (expected strong or weak)"
            ))),
        }
    }
}

impl std::fmt::Display for Typicality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Typicality::Strong => "strong",
            Typicality::Weak => "weak",
        })
    }
}

/// Precomputed joint typicality test for pairs of sequences under p(x, y).
#[derive(Debug, Clone)]
pub struct TypicalityTest {
    size_x: usize,
    size_y: usize,
    pxy: Vec<f64>,
    log_pxy: Vec<f64>,
    log_px: Vec<f64>,
    log_py: Vec<f64>,
    h_xy: f64,
    h_x: f64,
    h_y: f64,
    eps: f64,
    kind: Typicality,
}

impl TypicalityTest {
    pub fn new(joint: &JointPmf, eps: f64, kind: Typicality) -> Result<Self> {
        if joint.num_axes() != 2 {
            return Err(Error::ShapeMismatch(format!(
                "typicality needs a joint over two axes, got {}",
                joint.num_axes()
            )));
        }
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "typicality eps must be positive, got {eps}"
            )));
        }
        let (size_x, size_y) = (joint.dims()[0], joint.dims()[1]);
        let pxy = joint.probs().to_vec();
        let mut px = vec![0.0; size_x];
        let mut py = vec![0.0; size_y];
        for x in 0..size_x {
            for y in 0..size_y {
                px[x] += pxy[x * size_y + y];
                py[y] += pxy[x * size_y + y];
            }
        }
        let ln = |v: &f64| if *v > 0.0 { v.log2() } else { f64::NEG_INFINITY };
        Ok(Self {
            size_x,
            size_y,
            log_pxy: pxy.iter().map(ln).collect(),
            log_px: px.iter().map(ln).collect(),
            log_py: py.iter().map(ln).collect(),
            h_xy: entropy_sum(&pxy),
            h_x: entropy_sum(&px),
            h_y: entropy_sum(&py),
            pxy,
            eps,
            kind,
        })
    }

    pub fn kind(&self) -> Typicality {
        self.kind
    }

    pub fn check(&self, xs: &[Symbol], ys: &[Symbol]) -> Result<bool> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch {
                left: xs.len(),
                right: ys.len(),
            });
        }
        if xs.is_empty() {
            return Err(Error::InvalidParameter("empty sequences".into()));
        }
        for &x in xs {
            if x as usize >= self.size_x {
                return Err(Error::SymbolOutOfRange {
                    symbol: x as usize,
                    size: self.size_x,
                });
            }
        }
        for &y in ys {
            if y as usize >= self.size_y {
                return Err(Error::SymbolOutOfRange {
                    symbol: y as usize,
                    size: self.size_y,
                });
            }
        }
        Ok(self.check_unchecked(xs, ys))
    }

    /// Typicality test without range checks; symbols must be in range.
    pub(crate) fn check_unchecked(&self, xs: &[Symbol], ys: &[Symbol]) -> bool {
        let n = xs.len() as f64;
        match self.kind {
            Typicality::Strong => {
                let mut counts = vec![0u32; self.pxy.len()];
                for (&x, &y) in xs.iter().zip(ys) {
                    counts[x as usize * self.size_y + y as usize] += 1;
                }
                counts.iter().zip(&self.pxy).all(|(&c, &p)| {
                    let freq = c as f64 / n;
                    if p > 0.0 {
                        (freq - p).abs() <= self.eps * p
                    } else {
                        c == 0
                    }
                })
            }
            Typicality::Weak => {
                let (mut lx, mut ly, mut lxy) = (0.0, 0.0, 0.0);
                for (&x, &y) in xs.iter().zip(ys) {
                    lx += self.log_px[x as usize];
                    ly += self.log_py[y as usize];
                    lxy += self.log_pxy[x as usize * self.size_y + y as usize];
                }
                // -inf log-probabilities fail every comparison below
                (-lx / n - self.h_x).abs() < self.eps
                    && (-ly / n - self.h_y).abs() < self.eps
                    && (-lxy / n - self.h_xy).abs() < self.eps
            }
        }
    }
}

/// Strong joint typicality: every cell of the empirical joint type lies within
/// a relative deviation `eps` of p(a, b), and zero-probability cells are empty.
pub fn is_jointly_typical(xs: &[Symbol], ys: &[Symbol], joint: &JointPmf, eps: f64) -> Result<bool> {
    TypicalityTest::new(joint, eps, Typicality::Strong)?.check(xs, ys)
}

/// Weak joint typicality: the empirical entropy rates of x^n, y^n and
/// (x^n, y^n) are each within `eps` of H(X), H(Y) and H(X,Y).
pub fn is_weakly_jointly_typical(xs: &[Symbol], ys: &[Symbol], joint: &JointPmf, eps: f64) -> Result<bool> {
    TypicalityTest::new(joint, eps, Typicality::Weak)?.check(xs, ys)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&Pmf::new(vec![1.0]).unwrap()), 0.0);
        assert!(close(entropy(&Pmf::new(vec![0.5, 0.5]).unwrap()), 1.0, 1e-15));
        // -0.11 log2 0.11 - 0.89 log2 0.89, evaluated with mpmath at 30 digits
        let h = entropy(&Pmf::new(vec![0.11, 0.89]).unwrap());
        assert!(close(h, 0.499915958164528, 1e-14), "{h}");
    }

    #[test]
    fn pmf_rejects_bad_mass() {
        assert!(Pmf::new(vec![]).is_err());
        assert!(Pmf::new(vec![0.5, 0.6]).is_err());
        assert!(Pmf::new(vec![-0.1, 1.1]).is_err());
        assert!(Pmf::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn mutual_information_examples() {
        // independent product
        let j = JointPmf::new(vec![2, 3], {
            let (a, b) = ([0.3, 0.7], [0.2, 0.5, 0.3]);
            a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
        })
        .unwrap();
        assert!(close(mutual_information(&j, &[0], &[1]).unwrap(), 0.0, 1e-15));

        // uniform input through the identity channel
        let mut probs = vec![0.0; 16];
        for i in 0..4 {
            probs[i * 4 + i] = 0.25;
        }
        let j = JointPmf::new(vec![4, 4], probs).unwrap();
        assert!(close(mutual_information(&j, &[0], &[1]).unwrap(), 2.0, 1e-15));

        // uniform input through BSC(0.11)
        let p = 0.11;
        let j = JointPmf::new(vec![2, 2], vec![0.5 * (1.0 - p), 0.5 * p, 0.5 * p, 0.5 * (1.0 - p)]).unwrap();
        let i = mutual_information(&j, &[0], &[1]).unwrap();
        assert!(close(i, 1.0 - binary_entropy(p), 1e-14));
    }

    #[test]
    fn overlapping_axes_rejected() {
        let j = JointPmf::new(vec![2, 2], vec![0.25; 4]).unwrap();
        assert!(mutual_information(&j, &[0], &[0]).is_err());
        assert!(conditional_mutual_information(&j, &[0], &[1], &[1]).is_err());
        assert!(mutual_information(&j, &[0], &[2]).is_err());
    }

    #[test]
    fn conditional_independence_gives_zero() {
        // A - C - B Markov chain
        let pc = [0.4, 0.6];
        let pa_c = [[0.9, 0.1], [0.2, 0.8]];
        let pb_c = [[0.3, 0.7], [0.6, 0.4]];
        let mut probs = vec![0.0; 8];
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    probs[a * 4 + b * 2 + c] = pc[c] * pa_c[c][a] * pb_c[c][b];
                }
            }
        }
        let j = JointPmf::new(vec![2, 2, 2], probs).unwrap();
        let v = conditional_mutual_information(&j, &[0], &[1], &[2]).unwrap();
        assert!(v.abs() < 1e-14, "{v}");
    }

    #[test]
    fn conditional_mi_matches_direct_sum() {
        let weights = [0.05, 0.1, 0.2, 0.15, 0.08, 0.12, 0.17, 0.13];
        let j = JointPmf::new(vec![2, 2, 2], weights.to_vec()).unwrap();
        // oracle: sum_{abc} p(abc) log p(abc)p(c) / (p(ac)p(bc))
        let p = |a: usize, b: usize, c: usize| weights[a * 4 + b * 2 + c];
        let mut oracle = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    let pc: f64 = (0..2)
                        .flat_map(|i| (0..2).map(move |k| (i, k)))
                        .map(|(i, k)| p(i, k, c))
                        .sum();
                    let pac: f64 = (0..2).map(|k| p(a, k, c)).sum();
                    let pbc: f64 = (0..2).map(|i| p(i, b, c)).sum();
                    oracle += p(a, b, c) * (p(a, b, c) * pc / (pac * pbc)).log2();
                }
            }
        }
        let v = conditional_mutual_information(&j, &[0], &[1], &[2]).unwrap();
        assert!(close(v, oracle, 1e-14), "{v} vs {oracle}");
    }

    #[test]
    fn marginal_preserves_axis_order() {
        let j = JointPmf::new(vec![2, 3], vec![0.1, 0.2, 0.3, 0.05, 0.15, 0.2]).unwrap();
        let m = j.marginal(&[1, 0]).unwrap();
        assert_eq!(m.dims(), &[3, 2]);
        assert!(close(m.get(&[2, 0]), 0.3, 1e-15));
        assert!(close(m.get(&[0, 1]), 0.05, 1e-15));
    }

    #[test]
    fn entropy_gradient_matches_finite_difference() {
        let base = vec![0.05, 0.1, 0.2, 0.15, 0.08, 0.12, 0.17, 0.13];
        let j = JointPmf::from_parts(vec![2, 2, 2], base.clone());
        let g = conditional_mi_gradient(&j, &[0], &[1], &[2], 1e-300);
        let f = |v: &[f64]| {
            let jj = JointPmf::from_parts(vec![2, 2, 2], v.to_vec());
            let (ac, bc, abc, c) = (
                jj.entropy_of(&[0, 2]),
                jj.entropy_of(&[1, 2]),
                jj.entropy_of(&[0, 1, 2]),
                jj.entropy_of(&[2]),
            );
            ac + bc - abc - c
        };
        let h = 1e-7;
        for i in 0..base.len() {
            let mut up = base.clone();
            up[i] += h;
            let mut dn = base.clone();
            dn[i] -= h;
            let fd = (f(&up) - f(&dn)) / (2.0 * h);
            assert!(close(g[i], fd, 1e-6), "entry {i}: {} vs {fd}", g[i]);
        }
    }

    #[test]
    fn typicality_examples() {
        // deterministic joint: Y = X, mode at (1,1)
        let j = JointPmf::new(vec![2, 2], vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        let xs = vec![1u8; 10];
        assert!(is_jointly_typical(&xs, &xs, &j, 0.01).unwrap());
        assert!(is_weakly_jointly_typical(&xs, &xs, &j, 0.01).unwrap());

        // zero-probability pair present
        let j = JointPmf::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let xs = [0u8, 1, 0, 1];
        let ys = [0u8, 1, 1, 1];
        assert!(!is_jointly_typical(&xs, &ys, &j, 10.0).unwrap());
        assert!(!is_weakly_jointly_typical(&xs, &ys, &j, 10.0).unwrap());

        assert!(matches!(
            is_jointly_typical(&xs, &ys[..3], &j, 0.1),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(is_jointly_typical(&xs, &ys, &j, 0.0).is_err());
    }

    #[test]
    fn typicality_parses() {
        assert_eq!("weak".parse::<Typicality>().unwrap(), Typicality::Weak);
        assert_eq!("strong".parse::<Typicality>().unwrap(), Typicality::Strong);
        assert!("robust".parse::<Typicality>().is_err());
    }
}
