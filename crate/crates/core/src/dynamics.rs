//! Bootstrap stability intervals and the decomposition of indicator change
//! into data and model effects.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ingest::InstitutionRecord;

/// Percentile stability interval of an institution's top share.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityInterval {
    pub lower: f64,
    pub upper: f64,
    pub point: f64,
    pub draws: usize,
    pub coverage: f64,
    pub seed: u64,
}

impl StabilityInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Random stream for one institution: ChaCha8 keyed by SHA-256 of the seed
/// and the institution name, so results do not depend on evaluation order.
pub fn institution_rng(seed: u64, name: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(name.as_bytes());
    let digest = h.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

/// Nearest-rank percentile index for quantile `q` of `n` sorted values.
fn nearest_rank(q: f64, n: usize) -> usize {
    let pos = (q * n as f64 - 1e-9).ceil();
    (pos.max(1.0) as usize - 1).min(n - 1)
}

/// Bootstraps the top-10% share of one institution.
///
/// The publication set is `n = round(p)` items of which `round(n · pp_top10)`
/// are top-10%; each replicate draws `n` items with replacement (a binomial
/// count) and records the top share. Bounds are nearest-rank percentiles at
/// `(1 − coverage)/2` and `1 − (1 − coverage)/2`.
pub fn bootstrap_interval(
    rec: &InstitutionRecord,
    draws: usize,
    coverage: f64,
    seed: u64,
) -> Result<StabilityInterval> {
    if rec.p < 1.0 {
        return Err(Error::EmptyInstitution(rec.name.clone()));
    }
    if draws == 0 {
        return Err(Error::InvalidArgument("draws must be positive".into()));
    }
    if !(coverage > 0.0 && coverage < 1.0) {
        return Err(Error::InvalidArgument(format!("coverage {coverage} outside (0, 1)")));
    }
    let n = rec.p.round() as u64;
    let top = (n as f64 * rec.pp_top10).round().min(n as f64);
    let share = top / n as f64;
    let dist = Binomial::new(n, share).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = institution_rng(seed, &rec.name);
    let mut replicates: Vec<f64> = (0..draws).map(|_| dist.sample(&mut rng) as f64 / n as f64).collect();
    replicates.sort_by(f64::total_cmp);
    let tail = (1.0 - coverage) / 2.0;
    Ok(StabilityInterval {
        lower: replicates[nearest_rank(tail, draws)],
        upper: replicates[nearest_rank(1.0 - tail, draws)],
        point: rec.pp_top10,
        draws,
        coverage,
        seed,
    })
}

/// [`bootstrap_interval`] for many institutions in parallel; output order
/// follows the input.
pub fn bootstrap_all(
    records: &[InstitutionRecord],
    draws: usize,
    coverage: f64,
    seed: u64,
) -> Result<Vec<StabilityInterval>> {
    records
        .par_iter()
        .map(|r| bootstrap_interval(r, draws, coverage, seed))
        .collect()
}

/// Change of an indicator between an old and a current edition, split into
/// the part due to new data and the part due to a revised model.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangeDecomposition {
    pub reported_old: f64,
    pub reconstructed_old: f64,
    pub current: f64,
    /// Decline from the old report to the current value.
    pub total: f64,
    pub data_effect: f64,
    pub model_effect: f64,
    /// `None` when the total change is zero.
    pub data_share: Option<f64>,
    pub model_share: Option<f64>,
}

/// Splits `reported_old − current` into `reported_old − reconstructed_old`
/// (data) and `reconstructed_old − current` (model). The total is the sum
/// of the two effects, so additivity is exact.
pub fn decompose_change(reported_old: f64, reconstructed_old: f64, current: f64) -> Result<ChangeDecomposition> {
    if ![reported_old, reconstructed_old, current].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidArgument("indicator values must be finite".into()));
    }
    let data_effect = reported_old - reconstructed_old;
    let model_effect = reconstructed_old - current;
    let total = data_effect + model_effect;
    let share = |x: f64| (total != 0.0).then(|| x / total);
    Ok(ChangeDecomposition {
        reported_old,
        reconstructed_old,
        current,
        total,
        data_effect,
        model_effect,
        data_share: share(data_effect),
        model_share: share(model_effect),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesValue {
    P,
    TTop10,
    PpTop10,
}

impl SeriesValue {
    pub fn of(self, rec: &InstitutionRecord) -> f64 {
        match self {
            SeriesValue::P => rec.p,
            SeriesValue::TTop10 => rec.t_top10,
            SeriesValue::PpTop10 => rec.pp_top10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPoint {
    pub period: String,
    pub value: f64,
}

/// Leading four-digit year of a period label such as `2015-2018`.
pub fn period_start_year(label: &str) -> Result<u32> {
    let t = label.trim();
    let digits: String = t.chars().take_while(char::is_ascii_digit).collect();
    if digits.len() != 4 {
        return Err(Error::AmbiguousPeriodLabel(label.to_string()));
    }
    Ok(digits.parse().expect("four ascii digits"))
}

/// One institution's values across periods, ordered by start year.
pub fn series_view(records: &[InstitutionRecord], value: SeriesValue) -> Result<Vec<SeriesPoint>> {
    let first = records
        .first()
        .ok_or_else(|| Error::InvalidArgument("series needs at least one period".into()))?;
    if let Some(other) = records.iter().find(|r| r.name != first.name) {
        return Err(Error::InvalidArgument(format!(
            "series mixes institutions `{}` and `{}`",
            first.name, other.name
        )));
    }
    let mut keyed = records
        .iter()
        .map(|r| Ok((period_start_year(&r.period)?, r)))
        .collect::<Result<Vec<_>>>()?;
    keyed.sort_by_key(|(y, _)| *y);
    Ok(keyed
        .into_iter()
        .map(|(_, r)| SeriesPoint {
            period: r.period.clone(),
            value: value.of(r),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignedRow {
    pub period: String,
    pub left: Option<f64>,
    pub right: Option<f64>,
}

impl AlignedRow {
    pub fn difference(&self) -> Option<f64> {
        Some(self.left? - self.right?)
    }
}

/// Aligns two series (e.g. yearly editions against a reconstruction) on
/// their period labels, ordered by start year.
pub fn align_series(left: &[SeriesPoint], right: &[SeriesPoint]) -> Result<Vec<AlignedRow>> {
    let mut rows: BTreeMap<(u32, String), AlignedRow> = BTreeMap::new();
    for (pts, is_left) in [(left, true), (right, false)] {
        for p in pts {
            let key = (period_start_year(&p.period)?, p.period.clone());
            let row = rows.entry(key).or_insert_with(|| AlignedRow {
                period: p.period.clone(),
                left: None,
                right: None,
            });
            if is_left {
                row.left = Some(p.value);
            } else {
                row.right = Some(p.value);
            }
        }
    }
    Ok(rows.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(p: f64, pp: f64) -> InstitutionRecord {
        let mut r = InstitutionRecord::from_counts("U", p, p * pp);
        r.pp_top10 = pp;
        r
    }

    #[test]
    fn degenerate_shares() {
        let zero = bootstrap_interval(&rec(500.0, 0.0), 200, 0.95, 1).unwrap();
        assert_eq!((zero.lower, zero.upper), (0.0, 0.0));
        let one = bootstrap_interval(&rec(500.0, 1.0), 200, 0.95, 1).unwrap();
        assert_eq!((one.lower, one.upper), (1.0, 1.0));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            bootstrap_interval(&rec(0.0, 0.0), 10, 0.95, 1),
            Err(Error::EmptyInstitution(_))
        ));
        assert!(bootstrap_interval(&rec(10.0, 0.1), 0, 0.95, 1).is_err());
        assert!(bootstrap_interval(&rec(10.0, 0.1), 10, 1.0, 1).is_err());
    }

    #[test]
    fn nearest_rank_indices() {
        assert_eq!(nearest_rank(0.025, 1000), 24);
        assert_eq!(nearest_rank(0.975, 1000), 974);
        assert_eq!(nearest_rank(0.025, 10), 0);
        assert_eq!(nearest_rank(0.975, 10), 9);
        assert_eq!(nearest_rank(0.5, 1), 0);
    }

    #[test]
    fn seeded_and_name_keyed() {
        let a = bootstrap_interval(&rec(2000.0, 0.12), 500, 0.95, 9).unwrap();
        let b = bootstrap_interval(&rec(2000.0, 0.12), 500, 0.95, 9).unwrap();
        assert_eq!(a, b);
        let mut other = rec(2000.0, 0.12);
        other.name = "V".into();
        let c = bootstrap_interval(&other, 500, 0.95, 9).unwrap();
        assert_ne!((a.lower, a.upper), (c.lower, c.upper));
    }

    #[test]
    fn decomposition_examples() {
        let d = decompose_change(9.81, 9.54, 9.03).unwrap();
        assert!((d.total - 0.78).abs() < 1e-9);
        assert!((d.model_effect - 0.51).abs() < 1e-9);
        assert!((d.data_effect - 0.27).abs() < 1e-9);
        assert!((d.model_share.unwrap() - 0.654).abs() < 5e-4);
        assert!((d.data_share.unwrap() - 0.346).abs() < 5e-4);
        assert_eq!(d.data_effect + d.model_effect, d.total);

        let flat = decompose_change(4.2, 4.2, 4.2).unwrap();
        assert_eq!((flat.total, flat.data_effect, flat.model_effect), (0.0, 0.0, 0.0));
        assert_eq!((flat.data_share, flat.model_share), (None, None));

        let opposing = decompose_change(10.0, 9.0, 9.5).unwrap();
        assert!((opposing.total - 0.5).abs() < 1e-12);
        assert!((opposing.data_effect - 1.0).abs() < 1e-12);
        assert!((opposing.model_effect + 0.5).abs() < 1e-12);
        assert!((opposing.data_share.unwrap() - 2.0).abs() < 1e-12);
        assert!((opposing.model_share.unwrap() + 1.0).abs() < 1e-12);

        assert!(decompose_change(f64::NAN, 1.0, 1.0).is_err());
    }

    fn period_rec(period: &str, p: f64, t: f64) -> InstitutionRecord {
        let mut r = InstitutionRecord::from_counts("Fudan", p, t);
        r.period = period.into();
        r
    }

    #[test]
    fn series_ordering() {
        let recs = vec![
            period_rec("2015-2018", 15442.0, 1395.0),
            period_rec("2011-2014", 11000.0, 1080.0),
            period_rec("2013-2016", 13000.0, 1230.0),
            period_rec("2012-2015", 12000.0, 1150.0),
            period_rec("2014-2017", 14300.0, 1320.0),
        ];
        let s = series_view(&recs, SeriesValue::P).unwrap();
        let periods: Vec<_> = s.iter().map(|p| p.period.as_str()).collect();
        assert_eq!(
            periods,
            ["2011-2014", "2012-2015", "2013-2016", "2014-2017", "2015-2018"]
        );
        assert_eq!(series_view(&recs[..1], SeriesValue::TTop10).unwrap().len(), 1);

        let bad = vec![period_rec("recent", 1.0, 0.0)];
        assert!(matches!(
            series_view(&bad, SeriesValue::P),
            Err(Error::AmbiguousPeriodLabel(_))
        ));
    }

    #[test]
    fn aligned_editions() {
        let yearly = vec![
            SeriesPoint {
                period: "2011-2014".into(),
                value: 9.81,
            },
            SeriesPoint {
                period: "2015-2018".into(),
                value: 9.03,
            },
        ];
        let rebuilt = vec![
            SeriesPoint {
                period: "2015-2018".into(),
                value: 9.03,
            },
            SeriesPoint {
                period: "2011-2014".into(),
                value: 9.54,
            },
        ];
        let rows = align_series(&yearly, &rebuilt).unwrap();
        assert_eq!(rows[0].period, "2011-2014");
        assert!((rows[0].difference().unwrap() - 0.27).abs() < 1e-9);
        assert_eq!(rows[1].difference(), Some(0.0));
    }
}
