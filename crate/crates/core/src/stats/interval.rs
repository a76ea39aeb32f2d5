use crate::error::{Error, Result};
use crate::ingest::InstitutionRecord;

/// Closed interval `[lower, upper]` of proportions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite()) || lower > upper {
            return Err(Error::InvalidInterval { lower, upper });
        }
        Ok(Interval { lower, upper })
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lower <= other.lower && other.upper <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// Stability interval carried by a record.
    pub fn of(rec: &InstitutionRecord) -> Result<Self> {
        match (rec.ci_lower, rec.ci_upper) {
            (Some(lo), Some(hi)) => Interval::new(lo, hi),
            _ => Err(Error::MissingInterval(rec.name.clone())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Containment {
    /// The first interval lies inside the second.
    AinB,
    /// The second interval lies inside the first.
    BinA,
    /// The intervals are identical.
    Mutual,
}

impl Containment {
    pub fn flipped(self) -> Self {
        match self {
            Containment::AinB => Containment::BinA,
            Containment::BinA => Containment::AinB,
            Containment::Mutual => Containment::Mutual,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntervalRelation {
    Disjoint,
    Overlap,
    Containment(Containment),
}

impl IntervalRelation {
    pub fn is_disjoint(self) -> bool {
        self == IntervalRelation::Disjoint
    }

    pub fn flipped(self) -> Self {
        match self {
            IntervalRelation::Containment(c) => IntervalRelation::Containment(c.flipped()),
            other => other,
        }
    }
}

/// Relation between two closed intervals. Touching endpoints overlap.
pub fn ci_relation(a: Interval, b: Interval) -> IntervalRelation {
    if a.upper < b.lower || b.upper < a.lower {
        return IntervalRelation::Disjoint;
    }
    match (b.contains(&a), a.contains(&b)) {
        (true, true) => IntervalRelation::Containment(Containment::Mutual),
        (true, false) => IntervalRelation::Containment(Containment::AinB),
        (false, true) => IntervalRelation::Containment(Containment::BinA),
        (false, false) => IntervalRelation::Overlap,
    }
}

/// [`ci_relation`] on two records' stability intervals.
pub fn record_relation(a: &InstitutionRecord, b: &InstitutionRecord) -> Result<IntervalRelation> {
    Ok(ci_relation(Interval::of(a)?, Interval::of(b)?))
}
