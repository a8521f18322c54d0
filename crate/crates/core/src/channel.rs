//! Relay channel models: the discrete channel p(y, y1 | x), its relay map
//! y1 = f(x, y), state-dependent channels viewed as relay channels, and the
//! JSON file formats consumed by the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::info::{JointPmf, Pmf, Symbol, MASS_TOLERANCE};

pub mod gaussian;

pub const AXIS_X: usize = 0;
pub const AXIS_Y: usize = 1;
pub const AXIS_Y1: usize = 2;

/// Largest alphabet representable by [`Symbol`].
pub const MAX_ALPHABET: usize = 256;

/// A relay channel with a noiseless link: transition law p(y, y1 | x).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteRelayChannel {
    size_x: usize,
    size_y: usize,
    size_y1: usize,
    /// Indexed [x][y][y1], flattened row-major.
    transition: Vec<f64>,
}

impl DiscreteRelayChannel {
    pub fn new(size_x: usize, size_y: usize, size_y1: usize, transition: Vec<f64>) -> Result<Self> {
        for (name, s) in [("sizeX", size_x), ("sizeY", size_y), ("sizeY1", size_y1)] {
            if s == 0 || s > MAX_ALPHABET {
                return Err(Error::ShapeMismatch(format!("{name} = {s} outside 1..={MAX_ALPHABET}")));
            }
        }
        let expected = size_x * size_y * size_y1;
        if transition.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "transition needs {expected} entries, got {}",
                transition.len()
            )));
        }
        if let Some(bad) = transition.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "transition entry {bad} is negative or not finite"
            )));
        }
        let row = size_y * size_y1;
        for x in 0..size_x {
            let sum: f64 = transition[x * row..(x + 1) * row].iter().sum();
            if (sum - 1.0).abs() > MASS_TOLERANCE {
                return Err(Error::RowNotNormalized { x, sum });
            }
        }
        Ok(Self {
            size_x,
            size_y,
            size_y1,
            transition,
        })
    }

    pub fn size_x(&self) -> usize {
        self.size_x
    }

    pub fn size_y(&self) -> usize {
        self.size_y
    }

    pub fn size_y1(&self) -> usize {
        self.size_y1
    }

    pub fn transition(&self) -> &[f64] {
        &self.transition
    }

    /// p(y, y1 | x).
    pub fn prob(&self, x: usize, y: usize, y1: usize) -> f64 {
        self.transition[(x * self.size_y + y) * self.size_y1 + y1]
    }

    /// Row p(·, · | x) flattened over (y, y1).
    pub fn row(&self, x: usize) -> &[f64] {
        let len = self.size_y * self.size_y1;
        &self.transition[x * len..(x + 1) * len]
    }

    /// Extracts the relay function, failing if some positive-probability
    /// (x, y) admits two relay outputs.
    pub fn validate(&self) -> Result<RelayFunction> {
        let mut table = vec![None; self.size_x * self.size_y];
        for x in 0..self.size_x {
            for y in 0..self.size_y {
                let mut found: Option<usize> = None;
                for y1 in 0..self.size_y1 {
                    if self.prob(x, y, y1) > 0.0 {
                        if let Some(y1_a) = found {
                            return Err(Error::NotDeterministic { x, y, y1_a, y1_b: y1 });
                        }
                        found = Some(y1);
                    }
                }
                table[x * self.size_y + y] = found.map(|v| v as Symbol);
            }
        }
        Ok(RelayFunction {
            size_x: self.size_x,
            size_y: self.size_y,
            size_y1: self.size_y1,
            table,
        })
    }

    /// Marginal p(y | x) as a row-major |X| x |Y| matrix.
    pub fn receiver_matrix(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.size_x * self.size_y];
        for x in 0..self.size_x {
            for y in 0..self.size_y {
                out[x * self.size_y + y] = (0..self.size_y1).map(|y1| self.prob(x, y, y1)).sum();
            }
        }
        out
    }

    /// p(x) p(y, y1 | x) over axes (X, Y, Y1).
    pub fn induced_joint(&self, px: &Pmf) -> Result<JointPmf> {
        if px.len() != self.size_x {
            return Err(Error::ShapeMismatch(format!(
                "input distribution has {} entries, channel has |X| = {}",
                px.len(),
                self.size_x
            )));
        }
        let row = self.size_y * self.size_y1;
        let mut probs = Vec::with_capacity(self.transition.len());
        for (x, &p) in px.probs().iter().enumerate() {
            probs.extend(self.transition[x * row..(x + 1) * row].iter().map(|w| p * w));
        }
        Ok(JointPmf::from_parts(
            vec![self.size_x, self.size_y, self.size_y1],
            probs,
        ))
    }

    /// Memoryless forward pass; deterministic in `seed`.
    pub fn sample(&self, xs: &[Symbol], seed: u64) -> Result<(Vec<Symbol>, Vec<Symbol>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sampler().sample(xs, &mut rng)
    }

    pub fn sampler(&self) -> ChannelSampler {
        let row = self.size_y * self.size_y1;
        let cumulative = (0..self.size_x)
            .map(|x| {
                let mut acc = 0.0;
                self.transition[x * row..(x + 1) * row]
                    .iter()
                    .map(|p| {
                        acc += p;
                        acc
                    })
                    .collect()
            })
            .collect();
        ChannelSampler {
            size_y1: self.size_y1,
            cumulative,
        }
    }

    /// Channel of the binary example with relay-observed additive noise:
    /// Y = X xor S, Y1 = S, S ~ Bern(p) independent of X.
    pub fn bsc_state(p: f64) -> Result<Self> {
        StateChannel::bsc(p)?.to_relay_channel()
    }
}

/// Precomputed inverse-CDF tables for drawing (y, y1) given x.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    size_y1: usize,
    cumulative: Vec<Vec<f64>>,
}

impl ChannelSampler {
    pub fn sample<R: Rng + ?Sized>(&self, xs: &[Symbol], rng: &mut R) -> Result<(Vec<Symbol>, Vec<Symbol>)> {
        let mut ys = Vec::with_capacity(xs.len());
        let mut y1s = Vec::with_capacity(xs.len());
        for &x in xs {
            let (y, y1) = self.draw(x, rng)?;
            ys.push(y);
            y1s.push(y1);
        }
        Ok((ys, y1s))
    }

    pub fn draw<R: Rng + ?Sized>(&self, x: Symbol, rng: &mut R) -> Result<(Symbol, Symbol)> {
        let cdf = self.cumulative.get(x as usize).ok_or(Error::SymbolOutOfRange {
            symbol: x as usize,
            size: self.cumulative.len(),
        })?;
        let u: f64 = rng.random::<f64>() * cdf[cdf.len() - 1];
        // first cell whose cumulative mass exceeds u; zero-mass cells never win
        let mut cell = cdf.partition_point(|&c| c <= u);
        if cell >= cdf.len() {
            cell = cdf.len() - 1;
            while cell > 0 && cdf[cell] == cdf[cell - 1] {
                cell -= 1;
            }
        }
        Ok(((cell / self.size_y1) as Symbol, (cell % self.size_y1) as Symbol))
    }
}

/// The relay map y1 = f(x, y), defined on positive-probability pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelayFunction {
    size_x: usize,
    size_y: usize,
    size_y1: usize,
    table: Vec<Option<Symbol>>,
}

impl RelayFunction {
    pub fn get(&self, x: Symbol, y: Symbol) -> Option<Symbol> {
        let (x, y) = (x as usize, y as usize);
        if x >= self.size_x || y >= self.size_y {
            return None;
        }
        self.table[x * self.size_y + y]
    }

    pub fn size_x(&self) -> usize {
        self.size_x
    }

    pub fn size_y(&self) -> usize {
        self.size_y
    }

    pub fn size_y1(&self) -> usize {
        self.size_y1
    }

    /// Applies f positionwise; `None` if some pair falls outside the domain.
    pub fn apply(&self, xs: &[Symbol], ys: &[Symbol]) -> Option<Vec<Symbol>> {
        xs.iter().zip(ys).map(|(&x, &y)| self.get(x, y)).collect()
    }

    /// Short closed-form description when f matches a common pattern.
    pub fn describe(&self) -> String {
        let defined: Vec<(usize, usize, usize)> = (0..self.size_x)
            .flat_map(|x| (0..self.size_y).map(move |y| (x, y)))
            .filter_map(|(x, y)| self.table[x * self.size_y + y].map(|v| (x, y, v as usize)))
            .collect();
        if defined.is_empty() {
            return "empty domain".into();
        }
        let all = |pred: &dyn Fn(usize, usize, usize) -> bool| defined.iter().all(|&(x, y, v)| pred(x, y, v));
        let c = defined[0].2;
        if all(&|_, _, v| v == c) {
            return format!("f(x,y)={c}");
        }
        if all(&|x, _, v| v == x) {
            return "f(x,y)=x".into();
        }
        if all(&|_, y, v| v == y) {
            return "f(x,y)=y".into();
        }
        if self.size_x == 2 && self.size_y == 2 && self.size_y1 == 2 && all(&|x, y, v| v == x ^ y) {
            return "f(x,y)=x XOR y".into();
        }
        let k = self.size_y1;
        if all(&|x, y, v| v == (x + y) % k) {
            return format!("f(x,y)=(x+y) mod {k}");
        }
        if all(&|x, y, v| v == (y + k * self.size_x - x) % k) {
            return format!("f(x,y)=(y-x) mod {k}");
        }
        "f given by table".into()
    }

    /// Rows "x y f(x,y)" with "-" where undefined.
    pub fn table_rows(&self) -> Vec<(usize, usize, Option<usize>)> {
        (0..self.size_x)
            .flat_map(|x| (0..self.size_y).map(move |y| (x, y)))
            .map(|(x, y)| (x, y, self.table[x * self.size_y + y].map(|v| v as usize)))
            .collect()
    }
}

/// State-dependent channel p(s) p(y | x, s); the state plays the relay output.
#[derive(Debug, Clone, PartialEq)]
pub struct StateChannel {
    size_x: usize,
    size_y: usize,
    state: Pmf,
    /// Indexed [x][s][y].
    output: Vec<f64>,
}

impl StateChannel {
    pub fn new(size_x: usize, size_y: usize, state: Pmf, output: Vec<f64>) -> Result<Self> {
        let size_s = state.len();
        if size_x == 0 || size_y == 0 || size_x > MAX_ALPHABET || size_y > MAX_ALPHABET || size_s > MAX_ALPHABET {
            return Err(Error::ShapeMismatch("alphabet sizes out of range".into()));
        }
        if output.len() != size_x * size_s * size_y {
            return Err(Error::ShapeMismatch(format!(
                "output law needs {} entries, got {}",
                size_x * size_s * size_y,
                output.len()
            )));
        }
        for x in 0..size_x {
            for s in 0..size_s {
                let row = &output[(x * size_s + s) * size_y..(x * size_s + s + 1) * size_y];
                if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                    return Err(Error::InvalidDistribution(format!(
                        "p(y|x={x},s={s}) has a negative or non-finite entry"
                    )));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > MASS_TOLERANCE {
                    return Err(Error::RowNotNormalized { x, sum });
                }
            }
        }
        Ok(Self {
            size_x,
            size_y,
            state,
            output,
        })
    }

    /// Y = X xor S with S ~ Bern(p).
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "crossover probability {p} outside [0, 1]"
            )));
        }
        let mut output = vec![0.0; 8];
        for x in 0..2 {
            for s in 0..2 {
                output[(x * 2 + s) * 2 + (x ^ s)] = 1.0;
            }
        }
        Self::new(2, 2, Pmf::new(vec![1.0 - p, p])?, output)
    }

    pub fn size_x(&self) -> usize {
        self.size_x
    }

    pub fn size_y(&self) -> usize {
        self.size_y
    }

    pub fn size_s(&self) -> usize {
        self.state.len()
    }

    pub fn state(&self) -> &Pmf {
        &self.state
    }

    pub fn output(&self) -> &[f64] {
        &self.output
    }

    /// Relay channel with p(y, y1 = s | x) = p(s) p(y | x, s).
    pub fn to_relay_channel(&self) -> Result<DiscreteRelayChannel> {
        let size_s = self.size_s();
        let mut transition = vec![0.0; self.size_x * self.size_y * size_s];
        for x in 0..self.size_x {
            for s in 0..size_s {
                for y in 0..self.size_y {
                    transition[(x * self.size_y + y) * size_s + s] =
                        self.state.probs()[s] * self.output[(x * size_s + s) * self.size_y + y];
                }
            }
        }
        DiscreteRelayChannel::new(self.size_x, self.size_y, size_s, transition)
    }
}

/// Probability that serializes as a 17-significant-digit decimal string and
/// parses from either a string or a JSON number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prob(pub f64);

impl Serialize for Prob {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{:.16e}", self.0))
    }
}

impl<'de> Deserialize<'de> for Prob {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Prob(v)),
            Raw::Str(s) => s
                .trim()
                .parse::<f64>()
                .map(Prob)
                .map_err(|e| serde::de::Error::custom(format!("bad probability '{s}': {e}"))),
        }
    }
}

/// On-disk relay channel: transition indexed [x][y][y1].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    #[serde(rename = "sizeX")]
    pub size_x: usize,
    #[serde(rename = "sizeY")]
    pub size_y: usize,
    #[serde(rename = "sizeY1")]
    pub size_y1: usize,
    pub transition: Vec<Vec<Vec<Prob>>>,
}

impl ChannelFile {
    pub fn from_channel(ch: &DiscreteRelayChannel) -> Self {
        let transition = (0..ch.size_x)
            .map(|x| {
                (0..ch.size_y)
                    .map(|y| (0..ch.size_y1).map(|y1| Prob(ch.prob(x, y, y1))).collect())
                    .collect()
            })
            .collect();
        Self {
            size_x: ch.size_x,
            size_y: ch.size_y,
            size_y1: ch.size_y1,
            transition,
        }
    }

    pub fn into_channel(self) -> Result<DiscreteRelayChannel> {
        if self.transition.len() != self.size_x
            || self
                .transition
                .iter()
                .any(|r| r.len() != self.size_y || r.iter().any(|c| c.len() != self.size_y1))
        {
            return Err(Error::ShapeMismatch(
                "transition array does not match sizeX x sizeY x sizeY1".into(),
            ));
        }
        let flat = self.transition.into_iter().flatten().flatten().map(|p| p.0).collect();
        DiscreteRelayChannel::new(self.size_x, self.size_y, self.size_y1, flat)
    }
}

/// On-disk state channel: state law p(s) and output law indexed [x][s][y].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateChannelFile {
    #[serde(rename = "sizeX")]
    pub size_x: usize,
    #[serde(rename = "sizeY")]
    pub size_y: usize,
    #[serde(rename = "sizeS")]
    pub size_s: usize,
    #[serde(rename = "stateProbs")]
    pub state_probs: Vec<Prob>,
    pub output: Vec<Vec<Vec<Prob>>>,
}

impl StateChannelFile {
    pub fn from_channel(ch: &StateChannel) -> Self {
        let size_s = ch.size_s();
        Self {
            size_x: ch.size_x,
            size_y: ch.size_y,
            size_s,
            state_probs: ch.state.probs().iter().map(|&p| Prob(p)).collect(),
            output: (0..ch.size_x)
                .map(|x| {
                    (0..size_s)
                        .map(|s| {
                            (0..ch.size_y)
                                .map(|y| Prob(ch.output[(x * size_s + s) * ch.size_y + y]))
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn into_channel(self) -> Result<StateChannel> {
        if self.state_probs.len() != self.size_s
            || self.output.len() != self.size_x
            || self
                .output
                .iter()
                .any(|r| r.len() != self.size_s || r.iter().any(|c| c.len() != self.size_y))
        {
            return Err(Error::ShapeMismatch(
                "state channel arrays do not match sizeX x sizeS x sizeY".into(),
            ));
        }
        let state = Pmf::new(self.state_probs.iter().map(|p| p.0).collect())?;
        let output = self.output.into_iter().flatten().flatten().map(|p| p.0).collect();
        StateChannel::new(self.size_x, self.size_y, state, output)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::{binary_entropy, conditional_entropy, mutual_information};

    #[test]
    fn bsc_state_relay_function_is_xor() {
        let ch = DiscreteRelayChannel::bsc_state(0.11).unwrap();
        let f = ch.validate().unwrap();
        for x in 0..2u8 {
            for y in 0..2u8 {
                assert_eq!(f.get(x, y), Some(x ^ y));
            }
        }
        assert_eq!(f.describe(), "f(x,y)=x XOR y");
    }

    #[test]
    fn identity_with_constant_relay() {
        let ch = DiscreteRelayChannel::new(2, 2, 1, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let f = ch.validate().unwrap();
        assert_eq!(f.get(0, 0), Some(0));
        assert_eq!(f.get(1, 1), Some(0));
        assert_eq!(f.get(0, 1), None);
        assert_eq!(f.describe(), "f(x,y)=0");
    }

    #[test]
    fn split_relay_output_is_rejected() {
        // p(y=0,y1=0|x=0) = p(y=0,y1=1|x=0) = 0.5
        let ch = DiscreteRelayChannel::new(2, 2, 2, vec![0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        match ch.validate() {
            Err(Error::NotDeterministic { x, y, y1_a, y1_b }) => {
                assert_eq!((x, y, y1_a, y1_b), (0, 0, 0, 1))
            }
            other => panic!("expected NotDeterministic, got {other:?}"),
        }
    }

    #[test]
    fn unnormalized_row_is_rejected() {
        let err = DiscreteRelayChannel::new(2, 1, 1, vec![1.0, 0.9]).unwrap_err();
        assert!(matches!(err, Error::RowNotNormalized { x: 1, .. }));
        assert!(DiscreteRelayChannel::new(2, 2, 2, vec![0.25; 7]).is_err());
    }

    #[test]
    fn bsc_state_parameter_range() {
        assert!(DiscreteRelayChannel::bsc_state(-0.1).is_err());
        assert!(DiscreteRelayChannel::bsc_state(1.5).is_err());
        let ch = DiscreteRelayChannel::bsc_state(0.0).unwrap();
        assert_eq!(ch.prob(0, 0, 0), 1.0);
        assert_eq!(ch.prob(1, 1, 0), 1.0);
    }

    #[test]
    fn pure_noise_has_zero_information() {
        let ch = DiscreteRelayChannel::bsc_state(0.5).unwrap();
        for px in [Pmf::uniform(2), Pmf::new(vec![0.2, 0.8]).unwrap()] {
            let j = ch.induced_joint(&px).unwrap();
            assert!(mutual_information(&j, &[AXIS_X], &[AXIS_Y]).unwrap() < 1e-15);
        }
    }

    #[test]
    fn bsc_state_conditional_entropy() {
        let ch = DiscreteRelayChannel::bsc_state(0.11).unwrap();
        let j = ch.induced_joint(&Pmf::uniform(2)).unwrap();
        let h = conditional_entropy(&j, &[AXIS_Y1], &[AXIS_Y]).unwrap();
        assert!((h - binary_entropy(0.11)).abs() < 1e-14);
    }

    #[test]
    fn induced_joint_from_point_mass() {
        let ch = DiscreteRelayChannel::bsc_state(0.3).unwrap();
        let j = ch.induced_joint(&Pmf::point_mass(2, 1)).unwrap();
        for y in 0..2 {
            for y1 in 0..2 {
                assert_eq!(j.get(&[0, y, y1]), 0.0);
            }
        }
        assert!(ch.induced_joint(&Pmf::uniform(3)).is_err());
    }

    #[test]
    fn uniform_input_gives_bsc_capacity() {
        let ch = DiscreteRelayChannel::bsc_state(0.25).unwrap();
        let j = ch.induced_joint(&Pmf::uniform(2)).unwrap();
        let i = mutual_information(&j, &[AXIS_X], &[AXIS_Y]).unwrap();
        assert!((i - 0.188721875540867).abs() < 1e-14);
    }

    #[test]
    fn sampling_is_deterministic_and_respects_f() {
        let ch = DiscreteRelayChannel::bsc_state(0.3).unwrap();
        let f = ch.validate().unwrap();
        let xs: Vec<Symbol> = (0..500).map(|i| (i % 2) as Symbol).collect();
        let (ys, y1s) = ch.sample(&xs, 42).unwrap();
        let again = ch.sample(&xs, 42).unwrap();
        assert_eq!((ys.clone(), y1s.clone()), again);
        assert_eq!(f.apply(&xs, &ys).unwrap(), y1s);
    }

    #[test]
    fn noiseless_sampling_copies_input() {
        let ch = DiscreteRelayChannel::bsc_state(0.0).unwrap();
        let xs: Vec<Symbol> = (0..64).map(|i| ((i * 7) % 3 % 2) as Symbol).collect();
        let (ys, y1s) = ch.sample(&xs, 9).unwrap();
        assert_eq!(ys, xs);
        assert!(y1s.iter().all(|&s| s == 0));
    }

    #[test]
    fn sample_flip_rate_concentrates() {
        // Bin(10^4, 0.3) has sd 0.0046; 0.02 is > 4 sd
        let ch = DiscreteRelayChannel::bsc_state(0.3).unwrap();
        let xs = vec![0 as Symbol; 10_000];
        let (ys, _) = ch.sample(&xs, 2024).unwrap();
        let rate = ys.iter().filter(|&&y| y == 1).count() as f64 / xs.len() as f64;
        assert!((rate - 0.3).abs() < 0.02, "{rate}");
    }

    #[test]
    fn sample_rejects_out_of_range_symbol() {
        let ch = DiscreteRelayChannel::bsc_state(0.3).unwrap();
        assert!(matches!(
            ch.sample(&[0, 2], 1),
            Err(Error::SymbolOutOfRange { symbol: 2, .. })
        ));
    }

    #[test]
    fn channel_file_round_trip_is_bit_exact() {
        let ch = DiscreteRelayChannel::new(2, 2, 2, vec![0.1, 0.0, 0.0, 0.9, 0.0, 1.0 / 3.0, 2.0 / 3.0, 0.0]).unwrap();
        let text = serde_json::to_string(&ChannelFile::from_channel(&ch)).unwrap();
        assert!(text.contains("\"3.3333333333333331e-1\""));
        let back: ChannelFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_channel().unwrap(), ch);
    }

    #[test]
    fn channel_file_accepts_numbers() {
        let text = r#"{"sizeX":2,"sizeY":2,"sizeY1":1,"transition":[[[1],[0]],[[0],["1.0"]]]}"#;
        let ch: ChannelFile = serde_json::from_str(text).unwrap();
        assert!(ch.into_channel().is_ok());
        let bad = r#"{"sizeX":2,"sizeY":2,"sizeY1":1,"transition":[[[1],[0]]]}"#;
        let ch: ChannelFile = serde_json::from_str(bad).unwrap();
        assert!(ch.into_channel().is_err());
    }

    #[test]
    fn state_channel_round_trip() {
        let sc = StateChannel::bsc(0.2).unwrap();
        let text = serde_json::to_string(&StateChannelFile::from_channel(&sc)).unwrap();
        let back: StateChannelFile = serde_json::from_str(&text).unwrap();
        let back = back.into_channel().unwrap();
        assert_eq!(back, sc);
        assert_eq!(
            back.to_relay_channel().unwrap(),
            DiscreteRelayChannel::bsc_state(0.2).unwrap()
        );
    }
}
