//! Degree distributions: each transmitter independently draws a repetition
//! degree `d` with probability `lambda_d` and sends that many replicas of
//! its packet in distinct slots. Distributions are written as polynomials,
//! e.g. `0.86x3+0.14x8`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;

/// Tolerance on the coefficient sum: distributions must be normalized to
/// within this absolute error.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// A probability distribution over repetition degrees `0..=q`.
///
/// Coefficient `lambda(d)` is the probability of transmitting `d` replicas.
/// Degree 0 is permitted (a silent user), though protocol distributions
/// normally start at degree 2.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    /// `lambda[d]` is the probability of degree `d`; trailing zeros trimmed.
    lambda: Vec<f64>,
    /// Cumulative sums of `lambda`, with the final entry pinned to 1.0 so
    /// inverse-CDF sampling always terminates.
    cdf: Vec<f64>,
}

/// Errors raised when constructing or parsing a [`DegreeDistribution`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistError {
    /// A coefficient was negative or NaN.
    InvalidCoefficient,
    /// Coefficients do not sum to 1 within [`NORMALIZATION_TOL`].
    NotNormalized,
    /// The coefficient list was empty (or all zeros after parsing).
    Empty,
    /// A polynomial term could not be parsed.
    Malformed,
    /// The same degree appeared in two terms.
    DuplicateDegree,
}

impl fmt::Display for DistError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistError::InvalidCoefficient => write!(f, "coefficients must be finite and >= 0"),
            DistError::NotNormalized => {
                write!(f, "coefficients must sum to 1 within {NORMALIZATION_TOL:e}")
            }
            DistError::Empty => write!(f, "distribution has no coefficients"),
            DistError::Malformed => write!(f, "malformed distribution polynomial"),
            DistError::DuplicateDegree => write!(f, "duplicate degree in polynomial"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for DistError {}

impl DegreeDistribution {
    /// Builds a distribution from `coeffs[d] = lambda_d`.
    pub fn new(coeffs: Vec<f64>) -> Result<Self, DistError> {
        if coeffs.is_empty() {
            return Err(DistError::Empty);
        }
        if coeffs.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(DistError::InvalidCoefficient);
        }
        let sum: f64 = coeffs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(DistError::NotNormalized);
        }
        let mut lambda = coeffs;
        while lambda.len() > 1 && *lambda.last().unwrap() == 0.0 {
            lambda.pop();
        }
        let mut cdf = Vec::with_capacity(lambda.len());
        let mut acc = 0.0;
        for &c in &lambda {
            acc += c;
            cdf.push(acc);
        }
        *cdf.last_mut().unwrap() = 1.0;
        Ok(DegreeDistribution { lambda, cdf })
    }

    /// Builds a distribution from (degree, probability) pairs.
    pub fn from_terms(terms: &[(u16, f64)]) -> Result<Self, DistError> {
        if terms.is_empty() {
            return Err(DistError::Empty);
        }
        let q = terms.iter().map(|&(d, _)| d).max().unwrap() as usize;
        let mut coeffs = alloc::vec![0.0; q + 1];
        for &(d, c) in terms {
            if coeffs[d as usize] != 0.0 {
                return Err(DistError::DuplicateDegree);
            }
            coeffs[d as usize] = c;
        }
        Self::new(coeffs)
    }

    /// Probability of degree `d` (0 for degrees above the maximum).
    #[inline]
    pub fn lambda(&self, d: u16) -> f64 {
        self.lambda.get(d as usize).copied().unwrap_or(0.0)
    }

    /// All coefficients, indexed by degree.
    pub fn coeffs(&self) -> &[f64] {
        &self.lambda
    }

    /// Largest degree with a (possibly zero) stored coefficient.
    #[inline]
    pub fn max_degree(&self) -> u16 {
        (self.lambda.len() - 1) as u16
    }

    /// The nonzero terms, ascending by degree.
    pub fn terms(&self) -> impl Iterator<Item = (u16, f64)> + '_ {
        self.lambda
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0.0)
            .map(|(d, &c)| (d as u16, c))
    }

    /// Mean degree, i.e. the average number of replicas per user.
    pub fn mean(&self) -> f64 {
        self.lambda.iter().enumerate().map(|(d, &c)| d as f64 * c).sum()
    }

    /// Draws one degree by inverse-CDF over the cumulative coefficients.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u16 {
        let u: f64 = rng.gen();
        for (d, &cum) in self.cdf.iter().enumerate() {
            if u < cum {
                return d as u16;
            }
        }
        self.max_degree()
    }
}

impl fmt::Display for DegreeDistribution {
    /// Canonical polynomial form: nonzero terms ascending by degree,
    /// e.g. `0.86x3+0.14x8`. Coefficients print in shortest round-trip form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, c) in self.terms() {
            if !first {
                write!(f, "+")?;
            }
            write!(f, "{c}x{d}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for DegreeDistribution {
    type Err = DistError;

    /// Parses the polynomial form accepted by [`fmt::Display`]: `+`-joined
    /// terms `COEFFxDEG`, where `COEFF` defaults to 1 and a bare `COEFF`
    /// means degree 0.
    fn from_str(s: &str) -> Result<Self, DistError> {
        let mut terms: Vec<(u16, f64)> = Vec::new();
        for raw in s.split('+') {
            let term = raw.trim();
            if term.is_empty() {
                return Err(DistError::Malformed);
            }
            let (coeff, degree) = match term.find('x') {
                Some(pos) => {
                    let coeff = if pos == 0 {
                        1.0
                    } else {
                        f64::from_str(term[..pos].trim()).map_err(|_| DistError::Malformed)?
                    };
                    let degree =
                        u16::from_str(term[pos + 1..].trim()).map_err(|_| DistError::Malformed)?;
                    (coeff, degree)
                }
                None => (f64::from_str(term).map_err(|_| DistError::Malformed)?, 0),
            };
            if terms.iter().any(|&(d, _)| d == degree) {
                return Err(DistError::DuplicateDegree);
            }
            terms.push((degree, coeff));
        }
        Self::from_terms(&terms)
    }
}

/// Convenience for the canonical string form (used by CSV output).
pub fn format_dist(dist: &DegreeDistribution) -> String {
    alloc::format!("{dist}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn soft_mix() -> DegreeDistribution {
        DegreeDistribution::from_terms(&[(3, 0.86), (8, 0.14)]).unwrap()
    }

    #[test]
    fn construction_validates_normalization_and_signs() {
        assert!(DegreeDistribution::new(vec![0.0, 0.0, 1.0]).is_ok());
        assert_eq!(
            DegreeDistribution::new(vec![0.5, 0.4]).unwrap_err(),
            DistError::NotNormalized
        );
        assert_eq!(
            DegreeDistribution::new(vec![1.5, -0.5]).unwrap_err(),
            DistError::InvalidCoefficient
        );
        assert_eq!(DegreeDistribution::new(vec![]).unwrap_err(), DistError::Empty);
        // Tolerance boundary: 5e-13 off passes, 5e-12 off fails.
        assert!(DegreeDistribution::new(vec![0.5, 0.5 + 5e-13]).is_ok());
        assert!(DegreeDistribution::new(vec![0.5, 0.5 + 5e-12]).is_err());
    }

    #[test]
    fn means_of_reference_distributions() {
        assert_eq!(DegreeDistribution::from_terms(&[(3, 1.0)]).unwrap().mean(), 3.0);
        assert!((soft_mix().mean() - 3.70).abs() < 1e-12);
        let d315 = DegreeDistribution::from_terms(&[(3, 0.87), (8, 0.13)]).unwrap();
        assert!((d315.mean() - 3.65).abs() < 1e-12);
    }

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0.86x3+0.14x8", "1x2", "0.5x2+0.5x3", "0.25+0.75x4"] {
            let d: DegreeDistribution = s.parse().unwrap();
            let printed = d.to_string();
            let re: DegreeDistribution = printed.parse().unwrap();
            assert_eq!(d, re, "{s} -> {printed}");
        }
        assert_eq!("x3".parse::<DegreeDistribution>().unwrap().lambda(3), 1.0);
        assert!("0.86y3".parse::<DegreeDistribution>().is_err());
        assert!("0.86x3+0.14x3".parse::<DegreeDistribution>().is_err());
        assert!("0.86x3+0.2x8".parse::<DegreeDistribution>().is_err());
        assert!("".parse::<DegreeDistribution>().is_err());
    }

    #[test]
    fn degenerate_distribution_always_samples_its_degree() {
        let d = DegreeDistribution::from_terms(&[(3, 1.0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            assert_eq!(d.sample(&mut rng), 3);
        }
    }

    #[test]
    fn sampling_is_deterministic_for_a_seed() {
        let d = soft_mix();
        let mut a = ChaCha8Rng::seed_from_u64(42);
        let mut b = ChaCha8Rng::seed_from_u64(42);
        let draws_a: Vec<u16> = (0..256).map(|_| d.sample(&mut a)).collect();
        let draws_b: Vec<u16> = (0..256).map(|_| d.sample(&mut b)).collect();
        assert_eq!(draws_a, draws_b);
    }

    #[test]
    fn sampled_frequencies_match_coefficients() {
        let d = soft_mix();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        const N: usize = 1_000_000;
        let mut count3 = 0u64;
        let mut count8 = 0u64;
        for _ in 0..N {
            match d.sample(&mut rng) {
                3 => count3 += 1,
                8 => count8 += 1,
                other => panic!("impossible degree {other}"),
            }
        }
        let f3 = count3 as f64 / N as f64;
        assert!((f3 - 0.86).abs() < 0.002, "f3 = {f3}");
        assert!(((count8 as f64 / N as f64) - 0.14).abs() < 0.002);
    }

    #[test]
    fn sampled_mean_matches_for_two_degree_mix() {
        let d = DegreeDistribution::from_terms(&[(2, 0.5), (3, 0.5)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        const N: usize = 1_000_000;
        let total: u64 = (0..N).map(|_| d.sample(&mut rng) as u64).sum();
        let mean = total as f64 / N as f64;
        assert!((mean - 2.5).abs() < 0.01, "mean = {mean}");
    }

    /// Chi-square upper critical value at significance 0.001 via the
    /// Wilson-Hilferty cube approximation (z_{0.999} = 3.0902).
    fn chi2_crit_p001(df: u32) -> f64 {
        let df = df as f64;
        let z = 3.090232306167814;
        let t = 1.0 - 2.0 / (9.0 * df) + z * (2.0 / (9.0 * df)).sqrt();
        df * t * t * t
    }

    #[test]
    fn chi_square_goodness_of_fit_at_one_million_draws() {
        for (dist, df) in [
            (soft_mix(), 1u32),
            (DegreeDistribution::from_terms(&[(2, 0.25), (3, 0.5), (8, 0.25)]).unwrap(), 2),
        ] {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            const N: u64 = 1_000_000;
            let mut counts = vec![0u64; dist.max_degree() as usize + 1];
            for _ in 0..N {
                counts[dist.sample(&mut rng) as usize] += 1;
            }
            let mut chi2 = 0.0;
            for (d, &c) in counts.iter().enumerate() {
                let expected = dist.lambda(d as u16) * N as f64;
                if expected > 0.0 {
                    chi2 += (c as f64 - expected) * (c as f64 - expected) / expected;
                } else {
                    assert_eq!(c, 0, "degree {d} sampled but has zero probability");
                }
            }
            let crit = chi2_crit_p001(df);
            assert!(chi2 < crit, "chi2 = {chi2:.3} >= {crit:.3} (df = {df})");
        }
    }
}
