//! Resolving input arguments: files, stdin and built-in datasets.

use std::io::Read;

use indexmap::IndexMap;

use ranksig_core::compare::Labeling;
use ranksig_core::fixtures;
use ranksig_core::ingest::{parse_records, read_link_table, read_node_table};
use ranksig_core::{DatasetSelector, InstitutionRecord, LinkScore, NodeScore};

use crate::args::Selection;
use crate::failure::{Failure, Outcome};

const LABEL_COLUMNS: [&str; 5] = ["group", "tier", "label", "category", "country"];

/// Text of a file, of stdin (`-`), or of a built-in dataset (`builtin:NAME`).
pub fn load_text(spec: &str) -> Outcome<String> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return fixtures::builtin(name).map(str::to_string).ok_or_else(|| {
            Failure::usage(format!(
                "unknown built-in dataset `{name}` (available: {})",
                fixtures::BUILTIN_NAMES.join(", ")
            ))
        });
    }
    if spec == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::usage(format!("cannot read stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(spec).map_err(|e| Failure::usage(format!("cannot read `{spec}`: {e}")))
}

pub fn selector(sel: &Selection) -> DatasetSelector {
    let s = DatasetSelector::new(sel.period.clone(), sel.field.clone(), sel.counting.into());
    if sel.countries.is_empty() {
        s
    } else {
        s.with_countries(sel.countries.iter().cloned())
    }
}

pub fn records(sel: &Selection) -> Outcome<Vec<InstitutionRecord>> {
    let text = load_text(&sel.input)?;
    Ok(parse_records(text.as_bytes(), &selector(sel))?)
}

pub fn nodes(spec: &str) -> Outcome<Vec<NodeScore>> {
    Ok(read_node_table(load_text(spec)?.as_bytes())?)
}

pub fn links(spec: &str) -> Outcome<Vec<LinkScore>> {
    Ok(read_link_table(load_text(spec)?.as_bytes())?)
}

/// Finds an institution by exact name, else by a unique case-insensitive
/// prefix.
pub fn find<'a>(records: &'a [InstitutionRecord], query: &str) -> Outcome<&'a InstitutionRecord> {
    if let Some(r) = records.iter().find(|r| r.name == query) {
        return Ok(r);
    }
    let q = query.to_lowercase();
    let hits: Vec<_> = records
        .iter()
        .filter(|r| r.name.to_lowercase().starts_with(&q))
        .collect();
    match hits.as_slice() {
        [one] => Ok(one),
        [] => Err(ranksig_core::Error::UnknownInstitution(query.to_string()).into()),
        many => Err(Failure::usage(format!(
            "`{query}` matches several institutions: {}",
            many.iter().map(|r| r.name.as_str()).collect::<Vec<_>>().join(", ")
        ))),
    }
}

/// Institution → label from a CSV with a `name` column, or one side of the
/// built-in country × tier example.
pub fn labeling(spec: &str, column: Option<&str>) -> Outcome<Labeling> {
    match spec {
        "builtin:countries" => return Ok(fixtures::country_tier_labelings().0),
        "builtin:tiers" => return Ok(fixtures::country_tier_labelings().1),
        _ => {}
    }
    let text = load_text(spec)?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| Failure::usage(format!("{spec}: {e}")))?
        .clone();
    let pos = |c: &str| header.iter().position(|h| h == c);
    let name_col = pos("name").ok_or_else(|| Failure::usage(format!("{spec}: no `name` column")))?;
    let label_col = match column {
        Some(c) => pos(c).ok_or_else(|| Failure::usage(format!("{spec}: no `{c}` column")))?,
        None => LABEL_COLUMNS
            .iter()
            .find_map(|c| pos(c))
            .ok_or_else(|| Failure::usage(format!("{spec}: no label column (one of {})", LABEL_COLUMNS.join(", "))))?,
    };
    let mut out: Labeling = IndexMap::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| Failure::usage(format!("{spec}: {e}")))?;
        let (name, label) = (row.get(name_col), row.get(label_col));
        let (Some(name), Some(label)) = (name, label) else {
            return Err(Failure::usage(format!("{spec}: row {} is short", i + 2)));
        };
        if out.insert(name.to_string(), label.to_string()).is_some() {
            return Err(Failure::usage(format!("{spec}: `{name}` is labelled twice")));
        }
    }
    Ok(out)
}
