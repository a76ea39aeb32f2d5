//! Reading and selecting institution indicator records.
//!
//! The record file is comma-separated UTF-8 with a fixed header:
//!
//! ```text
//! name,country,period,field,counting,p,t_top10,pp_top10,ci_lower,ci_upper
//! ```
//!
//! An optional first line `#pp_unit=percent` (or `#pp_unit=fraction`, the
//! default) states the unit of `pp_top10`, `ci_lower` and `ci_upper`. Empty
//! cells mark absent optional values. When `t_top10` is empty it is derived
//! as `pp_top10 * p`; the header may also omit the `t_top10` column entirely.
//!
//! Two smaller schemas carry precomputed z-values: a node table
//! (`name,z[,group][,category]`) and a link table (`a,b,z`).

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::error::{Error, Result};

pub const RECORD_HEADER: [&str; 10] = [
    "name", "country", "period", "field", "counting", "p", "t_top10", "pp_top10", "ci_lower", "ci_upper",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Counting {
    Fractional,
    Full,
}

impl Counting {
    pub fn as_str(self) -> &'static str {
        match self {
            Counting::Fractional => "frac",
            Counting::Full => "full",
        }
    }
}

impl fmt::Display for Counting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Counting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "frac" | "fractional" => Ok(Counting::Fractional),
            "full" => Ok(Counting::Full),
            other => Err(Error::InvalidArgument(format!(
                "counting must be `frac` or `full`, got `{other}`"
            ))),
        }
    }
}

/// Unit of proportion columns in a record file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PpUnit {
    #[default]
    Fraction,
    Percent,
}

/// One institution's indicator row.
#[derive(Debug, Clone, PartialEq)]
pub struct InstitutionRecord {
    pub name: String,
    pub country: String,
    pub period: String,
    pub field: String,
    pub counting: Counting,
    /// Total publications; non-integer under fractional counting.
    pub p: f64,
    /// Publications in the top-10% class.
    pub t_top10: f64,
    /// Share of top-10% publications as a proportion in [0, 1].
    pub pp_top10: f64,
    pub ci_lower: Option<f64>,
    pub ci_upper: Option<f64>,
}

impl InstitutionRecord {
    /// Builds a record from counts, deriving `pp_top10 = t / p` (0 when `p = 0`).
    pub fn from_counts(name: impl Into<String>, p: f64, t_top10: f64) -> Self {
        let pp_top10 = if p > 0.0 { t_top10 / p } else { 0.0 };
        InstitutionRecord {
            name: name.into(),
            country: String::new(),
            period: String::new(),
            field: String::new(),
            counting: Counting::Fractional,
            p,
            t_top10,
            pp_top10,
            ci_lower: None,
            ci_upper: None,
        }
    }

    pub fn with_interval(mut self, lower: f64, upper: f64) -> Self {
        self.ci_lower = Some(lower);
        self.ci_upper = Some(upper);
        self
    }

    /// Top-10% share computed from the counts rather than the stored value.
    pub fn exact_share(&self) -> f64 {
        if self.p > 0.0 {
            self.t_top10 / self.p
        } else {
            0.0
        }
    }

    /// Checks every record invariant. `t_explicit` enables the consistency
    /// check between `t_top10` and `pp_top10 * p`.
    pub fn validate(&self, t_explicit: bool) -> Result<()> {
        let fail = |reason: String| {
            Err(Error::InvariantViolation {
                name: self.name.clone(),
                reason,
            })
        };
        for (label, v) in [("p", self.p), ("t_top10", self.t_top10), ("pp_top10", self.pp_top10)] {
            if !v.is_finite() {
                return fail(format!("{label} is not finite"));
            }
        }
        if self.p < 0.0 {
            return fail(format!("p = {} is negative", self.p));
        }
        if self.t_top10 < 0.0 || self.t_top10 > self.p {
            return fail(format!("t_top10 = {} outside [0, p = {}]", self.t_top10, self.p));
        }
        if !(0.0..=1.0).contains(&self.pp_top10) {
            return fail(format!("pp_top10 = {} outside [0, 1]", self.pp_top10));
        }
        match (self.ci_lower, self.ci_upper) {
            (Some(lo), Some(hi)) => {
                if !(lo.is_finite() && hi.is_finite()) {
                    return fail("interval bound is not finite".into());
                }
                if !(0.0 <= lo && lo <= self.pp_top10 && self.pp_top10 <= hi && hi <= 1.0) {
                    return fail(format!(
                        "interval [{lo}, {hi}] does not bracket pp_top10 = {} within [0, 1]",
                        self.pp_top10
                    ));
                }
            }
            (None, None) => {}
            _ => return fail("only one interval bound given".into()),
        }
        if t_explicit {
            let gap = (self.t_top10 - self.pp_top10 * self.p).abs();
            if gap > 0.5 + 0.005 * self.p {
                return fail(format!(
                    "t_top10 = {} inconsistent with pp_top10 * p = {}",
                    self.t_top10,
                    self.pp_top10 * self.p
                ));
            }
        }
        Ok(())
    }

    fn key(&self) -> (&str, &str, &str, Counting) {
        (&self.name, &self.period, &self.field, self.counting)
    }
}

/// Selects one slice of a ranking export.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSelector {
    pub period: String,
    pub field: String,
    pub counting: Counting,
    pub countries: Option<BTreeSet<String>>,
}

impl DatasetSelector {
    pub fn new(period: impl Into<String>, field: impl Into<String>, counting: Counting) -> Self {
        DatasetSelector {
            period: period.into(),
            field: field.into(),
            counting,
            countries: None,
        }
    }

    pub fn with_countries<I, S>(mut self, countries: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.countries = Some(countries.into_iter().map(Into::into).collect());
        self
    }

    pub fn matches(&self, rec: &InstitutionRecord) -> bool {
        rec.period == self.period
            && rec.field == self.field
            && rec.counting == self.counting
            && self.countries.as_ref().is_none_or(|set| set.contains(&rec.country))
    }
}

impl fmt::Display for DatasetSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "period={}, field={}, counting={}",
            self.period, self.field, self.counting
        )?;
        if let Some(c) = &self.countries {
            let list: Vec<&str> = c.iter().map(String::as_str).collect();
            write!(f, ", countries={}", list.join("|"))?;
        }
        Ok(())
    }
}

/// Splits off an optional `#pp_unit=...` pragma line.
fn split_pragma(text: &str) -> Result<(PpUnit, &str, u64)> {
    let trimmed = text.strip_prefix('\u{feff}').unwrap_or(text);
    if let Some(rest) = trimmed.strip_prefix('#') {
        let (line, body) = match rest.find('\n') {
            Some(i) => (&rest[..i], &rest[i + 1..]),
            None => (rest, ""),
        };
        let unit = match line.trim().strip_prefix("pp_unit=").map(str::trim) {
            Some("percent") => PpUnit::Percent,
            Some("fraction") => PpUnit::Fraction,
            _ => {
                return Err(Error::MalformedRow {
                    line: 1,
                    reason: format!("unrecognised pragma `#{}`", line.trim()),
                })
            }
        };
        Ok((unit, body, 1))
    } else {
        Ok((PpUnit::Fraction, trimmed, 0))
    }
}

fn read_text(mut source: impl Read) -> Result<String> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    String::from_utf8(bytes).map_err(|e| Error::MalformedRow {
        line: 0,
        reason: format!("input is not UTF-8: {e}"),
    })
}

fn csv_reader(body: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes())
}

fn parse_real(cell: &str, column: &str, line: u64) -> Result<f64> {
    let v: f64 = cell.parse().map_err(|_| Error::MalformedRow {
        line,
        reason: format!("{column}: `{cell}` is not a number"),
    })?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::MalformedRow {
            line,
            reason: format!("{column}: `{cell}` is not finite"),
        })
    }
}

fn parse_optional(cell: &str, column: &str, line: u64) -> Result<Option<f64>> {
    if cell.is_empty() {
        Ok(None)
    } else {
        parse_real(cell, column, line).map(Some)
    }
}

/// Reads every row of a record file, validating and deduplicating, in file order.
///
/// Rows sharing `(name, period, field, counting)` are collapsed to the first
/// occurrence when identical; a conflicting duplicate is an error.
pub fn read_records(source: impl Read) -> Result<Vec<InstitutionRecord>> {
    let text = read_text(source)?;
    let (unit, body, offset) = split_pragma(&text)?;
    let scale = match unit {
        PpUnit::Fraction => 1.0,
        PpUnit::Percent => 0.01,
    };

    let mut rdr = csv_reader(body);
    let mut rows = rdr.records();
    let header = match rows.next() {
        Some(h) => h?,
        None => {
            return Err(Error::MalformedRow {
                line: offset + 1,
                reason: "missing header row".into(),
            })
        }
    };
    let cols: Vec<&str> = header.iter().collect();
    let has_t = if cols == RECORD_HEADER {
        true
    } else {
        let without_t: Vec<&str> = RECORD_HEADER.iter().copied().filter(|c| *c != "t_top10").collect();
        if cols == without_t {
            false
        } else {
            return Err(Error::MalformedRow {
                line: offset + 1,
                reason: format!("unexpected header `{}`", cols.join(",")),
            });
        }
    };
    let width = if has_t { 10 } else { 9 };

    let mut out: Vec<InstitutionRecord> = Vec::new();
    let mut seen: HashMap<(String, String, String, Counting), usize> = HashMap::new();
    for row in rows {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line()) + offset;
        if row.len() == 1 && row[0].is_empty() {
            continue;
        }
        if row.len() != width {
            return Err(Error::MalformedRow {
                line,
                reason: format!("expected {width} fields, found {}", row.len()),
            });
        }
        let cell = |i: usize| -> &str { &row[if !has_t && i >= 6 { i - 1 } else { i }] };
        let name = cell(0);
        if name.is_empty() {
            return Err(Error::MalformedRow {
                line,
                reason: "empty institution name".into(),
            });
        }
        let counting: Counting = cell(4).parse().map_err(|e: Error| Error::MalformedRow {
            line,
            reason: e.to_string(),
        })?;
        let p = parse_real(cell(5), "p", line)?;
        let t = if has_t {
            parse_optional(cell(6), "t_top10", line)?
        } else {
            None
        };
        let pp = parse_optional(cell(7), "pp_top10", line)?.map(|v| v * scale);
        let ci_lower = parse_optional(cell(8), "ci_lower", line)?.map(|v| v * scale);
        let ci_upper = parse_optional(cell(9), "ci_upper", line)?.map(|v| v * scale);

        let (t_top10, pp_top10) = match (t, pp) {
            (Some(t), Some(pp)) => (t, pp),
            (None, Some(pp)) => (pp * p, pp),
            (Some(t), None) => (t, if p > 0.0 { t / p } else { 0.0 }),
            (None, None) => {
                return Err(Error::MalformedRow {
                    line,
                    reason: "neither t_top10 nor pp_top10 given".into(),
                })
            }
        };
        let rec = InstitutionRecord {
            name: name.to_string(),
            country: cell(1).to_string(),
            period: cell(2).to_string(),
            field: cell(3).to_string(),
            counting,
            p,
            t_top10,
            pp_top10,
            ci_lower,
            ci_upper,
        };
        rec.validate(t.is_some())?;

        let (n, per, fld, c) = rec.key();
        let key = (n.to_string(), per.to_string(), fld.to_string(), c);
        if let Some(&idx) = seen.get(&key) {
            if out[idx] != rec {
                return Err(Error::DuplicateRecord { name: rec.name, line });
            }
            continue;
        }
        seen.insert(key, out.len());
        out.push(rec);
    }
    Ok(out)
}

/// Reads a record file and keeps the rows matching `selector`.
pub fn parse_records(source: impl Read, selector: &DatasetSelector) -> Result<Vec<InstitutionRecord>> {
    let selected: Vec<_> = read_records(source)?
        .into_iter()
        .filter(|r| selector.matches(r))
        .collect();
    if selected.is_empty() {
        return Err(Error::NoMatch(selector.to_string()));
    }
    Ok(selected)
}

/// Writes records in the record schema, proportions as fractions.
pub fn write_records<'a>(records: impl IntoIterator<Item = &'a InstitutionRecord>, sink: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    w.write_record(RECORD_HEADER)?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in records {
        w.write_record([
            r.name.clone(),
            r.country.clone(),
            r.period.clone(),
            r.field.clone(),
            r.counting.to_string(),
            r.p.to_string(),
            r.t_top10.to_string(),
            r.pp_top10.to_string(),
            opt(r.ci_lower),
            opt(r.ci_upper),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// A precomputed node score, optionally carrying a group and a category label.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeScore {
    pub name: String,
    pub z: f64,
    pub group: Option<String>,
    pub category: Option<String>,
}

/// A precomputed link z-value between two named institutions.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkScore {
    pub a: String,
    pub b: String,
    pub z: f64,
}

fn header_index(header: &csv::StringRecord, col: &str) -> Option<usize> {
    header.iter().position(|h| h == col)
}

/// Reads a node table with columns `name,z` and optional `group`, `category`
/// (any further columns are ignored).
pub fn read_node_table(source: impl Read) -> Result<Vec<NodeScore>> {
    let text = read_text(source)?;
    let mut rdr = csv_reader(&text);
    let mut rows = rdr.records();
    let header = rows.next().ok_or_else(|| Error::MalformedRow {
        line: 1,
        reason: "missing header row".into(),
    })??;
    let missing = |c: &str| Error::MalformedRow {
        line: 1,
        reason: format!("node table lacks a `{c}` column"),
    };
    let name_i = header_index(&header, "name").ok_or_else(|| missing("name"))?;
    let z_i = header_index(&header, "z").ok_or_else(|| missing("z"))?;
    let group_i = header_index(&header, "group");
    let cat_i = header_index(&header, "category");

    let mut out = Vec::new();
    let mut names = BTreeSet::new();
    for row in rows {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() == 1 && row[0].is_empty() {
            continue;
        }
        if row.len() != header.len() {
            return Err(Error::MalformedRow {
                line,
                reason: format!("expected {} fields, found {}", header.len(), row.len()),
            });
        }
        let name = row[name_i].to_string();
        if name.is_empty() {
            return Err(Error::MalformedRow {
                line,
                reason: "empty institution name".into(),
            });
        }
        if !names.insert(name.clone()) {
            return Err(Error::DuplicateRecord { name, line });
        }
        let label = |i: Option<usize>| i.map(|i| row[i].to_string()).filter(|s| !s.is_empty());
        out.push(NodeScore {
            z: parse_real(&row[z_i], "z", line)?,
            group: label(group_i),
            category: label(cat_i),
            name,
        });
    }
    Ok(out)
}

/// Reads a link table with header `a,b,z`.
pub fn read_link_table(source: impl Read) -> Result<Vec<LinkScore>> {
    let text = read_text(source)?;
    let mut rdr = csv_reader(&text);
    let mut rows = rdr.records();
    let header = rows.next().ok_or_else(|| Error::MalformedRow {
        line: 1,
        reason: "missing header row".into(),
    })??;
    if header.iter().collect::<Vec<_>>() != ["a", "b", "z"] {
        return Err(Error::MalformedRow {
            line: 1,
            reason: "link table header must be `a,b,z`".into(),
        });
    }
    let mut out = Vec::new();
    for row in rows {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() == 1 && row[0].is_empty() {
            continue;
        }
        if row.len() != 3 {
            return Err(Error::MalformedRow {
                line,
                reason: format!("expected 3 fields, found {}", row.len()),
            });
        }
        out.push(LinkScore {
            a: row[0].to_string(),
            b: row[1].to_string(),
            z: parse_real(&row[2], "z", line)?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "name,country,period,field,counting,p,t_top10,pp_top10,ci_lower,ci_upper\n";

    fn sel() -> DatasetSelector {
        DatasetSelector::new("2015-2018", "All sciences", Counting::Fractional)
    }

    fn parse(body: &str) -> Result<Vec<InstitutionRecord>> {
        parse_records(format!("{HEADER}{body}").as_bytes(), &sel())
    }

    #[test]
    fn tsinghua_row() {
        let recs = parse("Tsinghua University,CN,2015-2018,All sciences,frac,19902,2738,0.1376,,\n").unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].t_top10, 2738.0);
        assert_eq!(recs[0].p, 19902.0);
        assert_eq!(recs[0].ci_lower, None);
    }

    #[test]
    fn degenerate_institution_is_valid() {
        let recs = parse("Empty U,XX,2015-2018,All sciences,frac,0,0,0,,\n").unwrap();
        assert_eq!(recs[0].p, 0.0);
    }

    #[test]
    fn missing_t_is_derived() {
        let recs = parse("A,XX,2015-2018,All sciences,frac,1000,,0.138,,\n").unwrap();
        assert!((recs[0].t_top10 - 138.0).abs() < 1e-9);
    }

    #[test]
    fn header_without_t_column() {
        let text = "name,country,period,field,counting,p,pp_top10,ci_lower,ci_upper\n\
                    A,XX,2015-2018,All sciences,frac,1000,0.138,0.12,0.15\n";
        let recs = parse_records(text.as_bytes(), &sel()).unwrap();
        assert!((recs[0].t_top10 - 138.0).abs() < 1e-9);
        assert_eq!(recs[0].ci_upper, Some(0.15));
    }

    #[test]
    fn percent_pragma_and_crlf() {
        let text = format!(
            "#pp_unit=percent\r\n{}A,XX,2015-2018,All sciences,frac,1000,,13.8,12.0,15.5\r\n",
            HEADER.replace('\n', "\r\n")
        );
        let recs = parse_records(text.as_bytes(), &sel()).unwrap();
        assert!((recs[0].pp_top10 - 0.138).abs() < 1e-12);
        assert!((recs[0].ci_lower.unwrap() - 0.12).abs() < 1e-12);
    }

    #[test]
    fn bad_pragma() {
        let text = format!("#pp_unit=permille\n{HEADER}");
        assert!(matches!(
            parse_records(text.as_bytes(), &sel()),
            Err(Error::MalformedRow { line: 1, .. })
        ));
    }

    #[test]
    fn malformed_rows_report_line() {
        let err = parse("A,XX,2015-2018,All sciences,frac,1000,,0.1,,\nB,XX,2015-2018,All sciences,frac,abc,,0.1,,\n")
            .unwrap_err();
        assert!(matches!(err, Error::MalformedRow { line: 3, .. }), "{err}");
        let err = parse("A,XX,2015-2018,All sciences,frac,1000\n").unwrap_err();
        assert!(matches!(err, Error::MalformedRow { line: 2, .. }));
        let err = parse("A,XX,2015-2018,All sciences,weird,1000,,0.1,,\n").unwrap_err();
        assert!(matches!(err, Error::MalformedRow { .. }));
    }

    #[test]
    fn wrong_header() {
        let err = parse_records("name,p\nA,1\n".as_bytes(), &sel()).unwrap_err();
        assert!(matches!(err, Error::MalformedRow { line: 1, .. }));
    }

    #[test]
    fn invariant_violations() {
        for row in [
            "A,XX,2015-2018,All sciences,frac,100,120,1.0,,",      // t > p
            "A,XX,2015-2018,All sciences,frac,100,10,1.5,,",       // pp > 1
            "A,XX,2015-2018,All sciences,frac,1000,300,0.1,,",     // inconsistent t
            "A,XX,2015-2018,All sciences,frac,1000,,0.1,0.11,0.2", // ci above pp
            "A,XX,2015-2018,All sciences,frac,1000,,0.1,0.05,",    // half interval
            "A,XX,2015-2018,All sciences,frac,-5,,0.1,,",
        ] {
            let err = parse(&format!("{row}\n")).unwrap_err();
            assert!(matches!(err, Error::InvariantViolation { .. }), "{row}: {err}");
        }
    }

    #[test]
    fn duplicates() {
        let row = "A,XX,2015-2018,All sciences,frac,1000,,0.1,,\n";
        let recs = parse(&format!("{row}{row}")).unwrap();
        assert_eq!(recs.len(), 1);
        let err = parse(&format!("{row}A,XX,2015-2018,All sciences,frac,1000,,0.2,,\n")).unwrap_err();
        assert!(matches!(err, Error::DuplicateRecord { line: 3, .. }));
        // same name, different counting: distinct records
        let all =
            read_records(format!("{HEADER}{row}A,XX,2015-2018,All sciences,full,1200,,0.1,,\n").as_bytes()).unwrap();
        assert_eq!(all.len(), 2);
    }

    #[test]
    fn selection_and_no_match() {
        let body = "A,CN,2015-2018,All sciences,frac,1000,,0.1,,\n\
                    B,US,2015-2018,All sciences,frac,1000,,0.1,,\n\
                    C,US,2014-2017,All sciences,frac,1000,,0.1,,\n";
        let text = format!("{HEADER}{body}");
        let us = parse_records(text.as_bytes(), &sel().with_countries(["US"])).unwrap();
        assert_eq!(us.iter().map(|r| r.name.as_str()).collect::<Vec<_>>(), ["B"]);
        let none = DatasetSelector::new("2000-2003", "All sciences", Counting::Fractional);
        assert!(matches!(parse_records(text.as_bytes(), &none), Err(Error::NoMatch(_))));
    }

    #[test]
    fn node_and_link_tables() {
        let nodes = read_node_table("name,z,group\nA,1.5,top\nB,-0.2,\n".as_bytes()).unwrap();
        assert_eq!(nodes[0].group.as_deref(), Some("top"));
        assert_eq!(nodes[1].group, None);
        assert!(matches!(
            read_node_table("name,z\nA,1\nA,2\n".as_bytes()),
            Err(Error::DuplicateRecord { .. })
        ));
        let links = read_link_table("a,b,z\nA,B,0.638\n".as_bytes()).unwrap();
        assert_eq!(links[0].z, 0.638);
        assert!(read_link_table("x,y\n".as_bytes()).is_err());
    }
}
