//! Cross-tabulation of two labelings and association measures between them.

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::ingest::InstitutionRecord;
use crate::stats::{chi_square_level, z_vs_expectation, ContingencyTable, SignificanceLevel, EXPECTED_TOP_SHARE};

/// Institution name → category, in insertion order.
pub type Labeling = IndexMap<String, String>;

/// Integer cross-tabulation of two labelings.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossTab {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl CrossTab {
    pub fn from_counts<R: Into<String>, C: Into<String>>(
        rows: Vec<R>,
        cols: Vec<C>,
        counts: Vec<Vec<u64>>,
    ) -> Result<Self> {
        let rows: Vec<String> = rows.into_iter().map(Into::into).collect();
        let cols: Vec<String> = cols.into_iter().map(Into::into).collect();
        if counts.len() != rows.len() || counts.iter().any(|r| r.len() != cols.len()) {
            return Err(Error::DegenerateTable("count matrix does not match labels".into()));
        }
        Ok(CrossTab { rows, cols, counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn to_table(&self) -> Result<ContingencyTable> {
        ContingencyTable::new(
            self.rows.clone(),
            self.cols.clone(),
            self.counts
                .iter()
                .map(|r| r.iter().map(|&c| c as f64).collect())
                .collect(),
        )
    }

    /// Pearson chi-square of the table.
    pub fn chi_square(&self) -> Result<f64> {
        self.to_table()?.chi_square()
    }
}

/// Tabulates the institutions labelled by both maps. Categories appear in
/// order of first appearance while walking `a` in its own order.
pub fn crosstab(a: &Labeling, b: &Labeling) -> Result<CrossTab> {
    let mut rows: IndexMap<&str, Vec<u64>> = IndexMap::new();
    let mut cols: IndexMap<&str, ()> = IndexMap::new();
    let mut pairs = Vec::new();
    for (name, ca) in a {
        if let Some(cb) = b.get(name) {
            rows.entry(ca.as_str()).or_default();
            cols.entry(cb.as_str()).or_default();
            pairs.push((ca.as_str(), cb.as_str()));
        }
    }
    if pairs.is_empty() {
        return Err(Error::NoOverlap);
    }
    let ncols = cols.len();
    for v in rows.values_mut() {
        v.resize(ncols, 0);
    }
    for (ca, cb) in pairs {
        let j = cols.get_index_of(cb).expect("column registered");
        rows[ca][j] += 1;
    }
    Ok(CrossTab {
        rows: rows.keys().map(|s| s.to_string()).collect(),
        cols: cols.keys().map(|s| s.to_string()).collect(),
        counts: rows.into_values().collect(),
    })
}

pub fn crosstab_chi_square(ct: &CrossTab) -> Result<f64> {
    ct.chi_square()
}

/// Cramér's V = √(χ² / (N · (min(r, c) − 1))).
pub fn cramers_v(ct: &CrossTab) -> Result<f64> {
    let k = ct.rows.len().min(ct.cols.len());
    let n = ct.total() as f64;
    if k < 2 || n == 0.0 {
        return Err(Error::DegenerateTable(format!(
            "Cramér's V needs a non-empty table of at least 2×2, got {}×{}",
            ct.rows.len(),
            ct.cols.len()
        )));
    }
    Ok((ct.chi_square()? / (n * (k - 1) as f64)).sqrt())
}

/// φ = √(χ² / N).
pub fn phi(ct: &CrossTab) -> Result<f64> {
    let n = ct.total() as f64;
    if n == 0.0 {
        return Err(Error::DegenerateTable("empty table".into()));
    }
    Ok((ct.chi_square()? / n).sqrt())
}

/// Average (1-based) ranks; tied values share the mean of their positions.
pub fn midranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ConstantInput);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman rank correlation: Pearson correlation of midranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(Error::InvalidArgument(
            "spearman needs at least two observations".into(),
        ));
    }
    if xs.iter().chain(ys).any(|v| v.is_nan()) {
        return Err(Error::InvalidStatistic);
    }
    pearson(&midranks(xs), &midranks(ys))
}

/// Chi-square based association between two labelings.
#[derive(Debug, Clone, PartialEq)]
pub struct Association {
    pub crosstab: CrossTab,
    pub chi2: f64,
    pub dof: usize,
    pub level: SignificanceLevel,
    pub cramers_v: f64,
    pub phi: f64,
}

pub fn association(ct: CrossTab) -> Result<Association> {
    let table = ct.to_table()?;
    let chi2 = table.chi_square()?;
    let dof = table.dof();
    Ok(Association {
        level: chi_square_level(chi2, dof)?,
        cramers_v: cramers_v(&ct)?,
        phi: phi(&ct)?,
        crosstab: ct,
        chi2,
        dof,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZPoint {
    pub rank: usize,
    pub name: String,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZSeries {
    pub category: String,
    pub points: Vec<ZPoint>,
}

/// Per-category z values sorted in decreasing order (ties by name), with
/// 1-based rank within the category.
pub fn z_distribution_series(groups: &IndexMap<String, Vec<(String, f64)>>) -> Vec<ZSeries> {
    groups
        .iter()
        .map(|(category, members)| {
            let mut sorted = members.clone();
            sorted.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            ZSeries {
                category: category.clone(),
                points: sorted
                    .into_iter()
                    .enumerate()
                    .map(|(i, (name, z))| ZPoint { rank: i + 1, name, z })
                    .collect(),
            }
        })
        .collect()
}

/// Groups records by country (first-appearance order) with their z against
/// the 10% expectation.
pub fn z_by_country(records: &[InstitutionRecord]) -> Result<IndexMap<String, Vec<(String, f64)>>> {
    let mut out: IndexMap<String, Vec<(String, f64)>> = IndexMap::new();
    for r in records {
        let z = z_vs_expectation(r, EXPECTED_TOP_SHARE)?;
        out.entry(r.country.clone()).or_default().push((r.name.clone(), z));
    }
    Ok(out)
}
