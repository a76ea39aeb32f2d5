use std::fmt;
use std::str::FromStr;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::table::ContingencyTable;
use crate::error::{Error, Result};
use crate::ingest::InstitutionRecord;

/// Share of top-10% papers expected of an institution by chance.
pub const EXPECTED_TOP_SHARE: f64 = 0.1;

/// Significance class of a test statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SignificanceLevel {
    NotSignificant,
    P05,
    P01,
    P001,
}

impl SignificanceLevel {
    /// Two-sided critical |z| for this level; `None` for `NotSignificant`.
    pub fn z_threshold(self) -> Option<f64> {
        match self {
            SignificanceLevel::NotSignificant => None,
            SignificanceLevel::P05 => Some(1.96),
            SignificanceLevel::P01 => Some(2.576),
            SignificanceLevel::P001 => Some(3.29),
        }
    }

    pub fn alpha(self) -> Option<f64> {
        match self {
            SignificanceLevel::NotSignificant => None,
            SignificanceLevel::P05 => Some(0.05),
            SignificanceLevel::P01 => Some(0.01),
            SignificanceLevel::P001 => Some(0.001),
        }
    }

    /// Level for an alpha of 0.05, 0.01 or 0.001.
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        [SignificanceLevel::P05, SignificanceLevel::P01, SignificanceLevel::P001]
            .into_iter()
            .find(|l| l.alpha().is_some_and(|a| (a - alpha).abs() < 1e-12))
            .ok_or_else(|| Error::InvalidArgument(format!("alpha must be 0.05, 0.01 or 0.001, got {alpha}")))
    }

    pub fn stars(self) -> &'static str {
        match self {
            SignificanceLevel::NotSignificant => "",
            SignificanceLevel::P05 => "*",
            SignificanceLevel::P01 => "**",
            SignificanceLevel::P001 => "***",
        }
    }
}

impl fmt::Display for SignificanceLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignificanceLevel::NotSignificant => "n.s.",
            SignificanceLevel::P05 => "p < .05",
            SignificanceLevel::P01 => "p < .01",
            SignificanceLevel::P001 => "p < .001",
        })
    }
}

/// Maps |z| onto the 1.96 / 2.576 / 3.29 thresholds, inclusive on the
/// more significant side.
pub fn significance_level(z: f64) -> Result<SignificanceLevel> {
    if z.is_nan() {
        return Err(Error::InvalidStatistic);
    }
    let a = z.abs();
    Ok(if a >= 3.29 {
        SignificanceLevel::P001
    } else if a >= 2.576 {
        SignificanceLevel::P01
    } else if a >= 1.96 {
        SignificanceLevel::P05
    } else {
        SignificanceLevel::NotSignificant
    })
}

/// Significance class of a chi-square statistic with `dof` degrees of freedom,
/// using the upper-tail critical values at .05, .01 and .001.
pub fn chi_square_level(chi2: f64, dof: usize) -> Result<SignificanceLevel> {
    if chi2.is_nan() || chi2 < 0.0 {
        return Err(Error::InvalidStatistic);
    }
    if dof == 0 {
        return Err(Error::InvalidArgument(
            "chi-square needs at least one degree of freedom".into(),
        ));
    }
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut level = SignificanceLevel::NotSignificant;
    for l in [SignificanceLevel::P05, SignificanceLevel::P01, SignificanceLevel::P001] {
        let critical = dist.inverse_cdf(1.0 - l.alpha().unwrap());
        if chi2 >= critical {
            level = l;
        }
    }
    Ok(level)
}

/// Pooled proportion (t1 + t2) / (n1 + n2).
pub fn pooled_proportion(t1: f64, n1: f64, t2: f64, n2: f64) -> Result<f64> {
    let n = n1 + n2;
    if n <= 0.0 {
        return Err(Error::EmptyPool);
    }
    Ok((t1 + t2) / n)
}

/// Whether a pooled proportion leaves no variance for the z-test.
pub fn is_degenerate_pool(pooled: f64) -> bool {
    pooled <= 0.0 || pooled >= 1.0
}

/// Two-proportion z statistic with a pooled variance estimate.
///
/// Equal proportions give exactly 0, even when the pool is degenerate.
pub fn z_two_proportions(p1: f64, n1: f64, p2: f64, n2: f64, pooled: f64) -> Result<f64> {
    if [p1, n1, p2, n2, pooled].iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidStatistic);
    }
    if n1 <= 0.0 || n2 <= 0.0 {
        return Err(Error::EmptyPool);
    }
    if p1 == p2 {
        return Ok(0.0);
    }
    if is_degenerate_pool(pooled) {
        return Err(Error::DegeneratePool(pooled));
    }
    let se = (pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2)).sqrt();
    Ok((p1 - p2) / se)
}

/// z of one institution's top share against an expected share `p0`
/// (both samples of size `p`).
pub fn z_vs_expectation(rec: &InstitutionRecord, p0: f64) -> Result<f64> {
    if rec.p <= 0.0 {
        return Err(Error::EmptyInstitution(rec.name.clone()));
    }
    let pooled = pooled_proportion(rec.t_top10, rec.p, p0 * rec.p, rec.p)?;
    z_two_proportions(rec.pp_top10, rec.p, p0, rec.p, pooled)
}

/// Where the proportions fed to the z-test come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProportionMode {
    /// The stored (usually rounded) `pp_top10` values.
    #[default]
    Stored,
    /// `t_top10 / p` from the counts.
    Exact,
}

impl FromStr for ProportionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stored" => Ok(ProportionMode::Stored),
            "exact" => Ok(ProportionMode::Exact),
            other => Err(Error::InvalidArgument(format!(
                "proportions must be `stored` or `exact`, got `{other}`"
            ))),
        }
    }
}

impl ProportionMode {
    pub fn share(self, rec: &InstitutionRecord) -> f64 {
        match self {
            ProportionMode::Stored => rec.pp_top10,
            ProportionMode::Exact => rec.exact_share(),
        }
    }
}

/// Two-proportion z between two institutions.
pub fn link_z(a: &InstitutionRecord, b: &InstitutionRecord, mode: ProportionMode) -> Result<f64> {
    for r in [a, b] {
        if r.p <= 0.0 {
            return Err(Error::EmptyInstitution(r.name.clone()));
        }
    }
    let pooled = pooled_proportion(a.t_top10, a.p, b.t_top10, b.p)?;
    z_two_proportions(mode.share(a), a.p, mode.share(b), b.p, pooled)
}

/// 2×2 table with one row per institution: (top-10%, non-top).
pub fn two_by_two(a: &InstitutionRecord, b: &InstitutionRecord) -> Result<ContingencyTable> {
    ContingencyTable::new(
        vec![a.name.clone(), b.name.clone()],
        vec!["top-10%", "non-top"],
        vec![vec![a.t_top10, a.p - a.t_top10], vec![b.t_top10, b.p - b.t_top10]],
    )
}

/// Result of comparing two institutions.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseTest {
    pub a: String,
    pub b: String,
    pub z: f64,
    pub chi2: f64,
    pub residuals: [[f64; 2]; 2],
    pub level: SignificanceLevel,
}

/// Runs the chi-square and z-test on the 2×2 table of two institutions.
///
/// Identical count rows give `z = 0`, `chi2 = 0` and zero residuals even when
/// the table has an empty column.
pub fn pairwise_test(a: &InstitutionRecord, b: &InstitutionRecord, mode: ProportionMode) -> Result<PairwiseTest> {
    let z = link_z(a, b, mode)?;
    let table = two_by_two(a, b)?;
    let (chi2, residuals) = match (table.chi_square(), table.standardized_residuals()) {
        (Ok(c), Ok(r)) => (c, [[r[0][0], r[0][1]], [r[1][0], r[1][1]]]),
        (Err(Error::ZeroExpectedCell { .. }), _) if a.t_top10 / a.p == b.t_top10 / b.p => (0.0, [[0.0; 2]; 2]),
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    Ok(PairwiseTest {
        a: a.name.clone(),
        b: b.name.clone(),
        z,
        chi2,
        residuals,
        level: significance_level(z)?,
    })
}
