//! Small datasets shipped with the crate so that worked examples run
//! without external files.

use crate::compare::Labeling;
use crate::error::Result;
use crate::ingest::{read_link_table, read_node_table, read_records, InstitutionRecord, LinkScore, NodeScore};

/// Records for Tsinghua, Zhejiang, Fudan and Shandong University of Science
/// and Technology (2015-2018, all sciences, fractional counting).
pub const LR2020_SAMPLE: &str = include_str!("../data/lr2020_sample.csv");

/// Node z-values of Peking, Tsinghua and Zhejiang.
pub const TRIO_NODES: &str = include_str!("../data/trio_nodes.csv");

/// Pairwise z-values between Peking, Tsinghua and Zhejiang.
pub const TRIO_LINKS: &str = include_str!("../data/trio_links.csv");

/// z-values of 203 Chinese universities with their published tier
/// (`top`, `middle`, `bottom`) and published overall and within-group ranks.
pub const ANNEX_Z: &str = include_str!("../data/annex_z.csv");

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 4] = ["lr2020-sample", "trio-nodes", "trio-links", "annex"];

/// Contents of a named built-in dataset.
pub fn builtin(name: &str) -> Option<&'static str> {
    match name {
        "lr2020-sample" => Some(LR2020_SAMPLE),
        "trio-nodes" => Some(TRIO_NODES),
        "trio-links" => Some(TRIO_LINKS),
        "annex" => Some(ANNEX_Z),
        _ => None,
    }
}

pub fn sample_records() -> Result<Vec<InstitutionRecord>> {
    read_records(LR2020_SAMPLE.as_bytes())
}

pub fn trio() -> Result<(Vec<NodeScore>, Vec<LinkScore>)> {
    Ok((
        read_node_table(TRIO_NODES.as_bytes())?,
        read_link_table(TRIO_LINKS.as_bytes())?,
    ))
}

pub fn annex() -> Result<Vec<NodeScore>> {
    read_node_table(ANNEX_Z.as_bytes())
}

/// Country and tier labelings reproducing the China/USA cross-tabulation
/// counts `[[116, 67, 21, 1], [36, 60, 99, 2]]` over 402 synthetic names.
pub fn country_tier_labelings() -> (Labeling, Labeling) {
    let counts = [("China", [116, 67, 21, 1]), ("USA", [36, 60, 99, 2])];
    let tiers = ["low", "middle", "high", "isolates"];
    let mut country = Labeling::new();
    let mut tier = Labeling::new();
    for (c, row) in counts {
        for (t, &n) in tiers.iter().zip(row.iter()) {
            for k in 0..n {
                let name = format!("{c}-{t}-{k:03}");
                country.insert(name.clone(), c.to_string());
                tier.insert(name, t.to_string());
            }
        }
    }
    (country, tier)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse() {
        assert_eq!(sample_records().unwrap().len(), 4);
        let (nodes, links) = trio().unwrap();
        assert_eq!((nodes.len(), links.len()), (3, 3));
        let annex = annex().unwrap();
        assert_eq!(annex.len(), 203);
        assert_eq!(annex.iter().filter(|n| n.group.as_deref() == Some("top")).count(), 32);
        assert_eq!(
            annex.iter().filter(|n| n.group.as_deref() == Some("middle")).count(),
            69
        );
        assert_eq!(
            annex.iter().filter(|n| n.group.as_deref() == Some("bottom")).count(),
            102
        );
        for n in BUILTIN_NAMES {
            assert!(builtin(n).is_some());
        }
    }

    #[test]
    fn labelings_cover_402() {
        let (c, t) = country_tier_labelings();
        assert_eq!((c.len(), t.len()), (402, 402));
    }
}
