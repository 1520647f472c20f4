//! Antecedent-locality histograms over gold coreference, pronoun tallies,
//! and a binary chi-square goodness-of-fit test.

use std::collections::BTreeMap;

use serde::Serialize;
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::annot::{CdaDocument, ClauseId, ExpType, MentionId, Person};
use crate::segment::SegmentedDiscourse;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("chi-square needs a positive total count")]
    ZeroTotal,
    #[error("mention `{0}` is not covered by the segmentation")]
    Unsegmented(String),
}

pub trait Category: Copy + Ord + Serialize + 'static {
    const ALL: &'static [Self];
    fn label(self) -> &'static str;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum SentenceDistance {
    SameSentence,
    PrevSentence,
    SecondPrevSentence,
    Farther,
}

impl Category for SentenceDistance {
    const ALL: &'static [Self] = &[
        SentenceDistance::SameSentence,
        SentenceDistance::PrevSentence,
        SentenceDistance::SecondPrevSentence,
        SentenceDistance::Farther,
    ];
    fn label(self) -> &'static str {
        match self {
            SentenceDistance::SameSentence => "sameSentence",
            SentenceDistance::PrevSentence => "prevSentence",
            SentenceDistance::SecondPrevSentence => "secondPrevSentence",
            SentenceDistance::Farther => "farther",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum ClauseLocation {
    SameUtterance,
    PrevOrSuperordinateSameSentence,
    PrevUtterancePrevSentence,
    Other,
}

impl Category for ClauseLocation {
    const ALL: &'static [Self] = &[
        ClauseLocation::SameUtterance,
        ClauseLocation::PrevOrSuperordinateSameSentence,
        ClauseLocation::PrevUtterancePrevSentence,
        ClauseLocation::Other,
    ];
    fn label(self) -> &'static str {
        match self {
            ClauseLocation::SameUtterance => "sameUtterance",
            ClauseLocation::PrevOrSuperordinateSameSentence => "prevOrSuperordinateSameSentence",
            ClauseLocation::PrevUtterancePrevSentence => "prevUtterancePrevSentence",
            ClauseLocation::Other => "other",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Histogram<C: Category> {
    counts: BTreeMap<C, usize>,
}

impl<C: Category> Default for Histogram<C> {
    fn default() -> Self {
        Self {
            counts: C::ALL.iter().map(|&c| (c, 0)).collect(),
        }
    }
}

impl<C: Category> Histogram<C> {
    pub fn add(&mut self, c: C) {
        *self.counts.entry(c).or_default() += 1;
    }

    pub fn count(&self, c: C) -> usize {
        self.counts.get(&c).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    /// Share of the total in percent; `None` for an empty histogram.
    pub fn percent(&self, c: C) -> Option<f64> {
        let total = self.total();
        (total > 0).then(|| 100.0 * self.count(c) as f64 / total as f64)
    }

    pub fn merge(&mut self, other: &Histogram<C>) {
        for (&c, &n) in &other.counts {
            *self.counts.entry(c).or_default() += n;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (C, usize)> + '_ {
        C::ALL.iter().map(|&c| (c, self.count(c)))
    }
}

/// One counted pronoun with its antecedent placement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Placement {
    pub mention: MentionId,
    pub antecedent: MentionId,
    pub exp: ExpType,
    pub sentence: SentenceDistance,
    pub clause: ClauseLocation,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LocalityReport {
    pub sentence: Histogram<SentenceDistance>,
    pub clause: Histogram<ClauseLocation>,
    pub placements: Vec<Placement>,
    /// Counted pronouns with no preceding coreferent mention.
    pub discourse_new: Vec<MentionId>,
    /// Third-person overt pronouns without a gold entity.
    pub ungold: usize,
    pub by_type: BTreeMap<ExpType, usize>,
}

impl LocalityReport {
    pub fn merge(&mut self, other: &LocalityReport) {
        self.sentence.merge(&other.sentence);
        self.clause.merge(&other.clause);
        self.placements.extend(other.placements.iter().cloned());
        self.discourse_new.extend(other.discourse_new.iter().cloned());
        self.ungold += other.ungold;
        for (&k, &v) in &other.by_type {
            *self.by_type.entry(k).or_default() += v;
        }
    }

    pub fn intrasentential(&self) -> usize {
        self.sentence.count(SentenceDistance::SameSentence)
    }

    pub fn intersentential(&self) -> usize {
        self.sentence.total() - self.intrasentential()
    }

    /// Fraction of same-utterance cases that are possessive pronouns.
    pub fn possessive_share(&self) -> Option<f64> {
        let same: Vec<_> = self
            .placements
            .iter()
            .filter(|p| p.clause == ClauseLocation::SameUtterance)
            .collect();
        if same.is_empty() {
            return None;
        }
        let poss = same.iter().filter(|p| p.exp == ExpType::PossPronoun).count();
        Some(poss as f64 / same.len() as f64)
    }
}

/// Overt third-person pronouns (not zeros, not pleonastic) are counted.
pub fn is_counted(m: &crate::annot::MentionRecord) -> bool {
    matches!(m.exp, ExpType::Pronoun | ExpType::PossPronoun) && m.person == Person::Third && !m.is_pleonastic()
}

pub fn locality_histogram(doc: &CdaDocument, seg: &SegmentedDiscourse) -> Result<LocalityReport, StatsError> {
    struct Site<'a> {
        record: &'a crate::annot::MentionRecord,
        sentence: usize,
        unit: usize,
    }
    let mut sites = Vec::new();
    for (si, sentence) in doc.sentences.iter().enumerate() {
        for clause in &sentence.clauses {
            let unit = unit_of(seg, &clause.id)?;
            for m in &clause.mentions {
                sites.push(Site {
                    record: m,
                    sentence: si,
                    unit,
                });
            }
        }
    }

    let mut report = LocalityReport::default();
    for (i, site) in sites.iter().enumerate() {
        let m = site.record;
        if !is_counted(m) {
            continue;
        }
        let Some(gold) = &m.gold_entity else {
            report.ungold += 1;
            continue;
        };
        *report.by_type.entry(m.exp).or_default() += 1;
        let Some(ante) = sites[..i]
            .iter()
            .rev()
            .find(|s| s.record.gold_entity.as_ref() == Some(gold))
        else {
            report.discourse_new.push(m.id.clone());
            continue;
        };
        let sentence = match site.sentence - ante.sentence {
            0 => SentenceDistance::SameSentence,
            1 => SentenceDistance::PrevSentence,
            2 => SentenceDistance::SecondPrevSentence,
            _ => SentenceDistance::Farther,
        };
        let unit = &seg.units[site.unit];
        let prev_unit = site.unit.checked_sub(1) == Some(ante.unit);
        let clause = if ante.unit == site.unit {
            ClauseLocation::SameUtterance
        } else if ante.sentence == site.sentence && (prev_unit || unit.superordinate == Some(ante.unit)) {
            ClauseLocation::PrevOrSuperordinateSameSentence
        } else if prev_unit && ante.sentence + 1 == site.sentence {
            ClauseLocation::PrevUtterancePrevSentence
        } else {
            ClauseLocation::Other
        };
        report.sentence.add(sentence);
        report.clause.add(clause);
        report.placements.push(Placement {
            mention: m.id.clone(),
            antecedent: ante.record.id.clone(),
            exp: m.exp,
            sentence,
            clause,
        });
    }
    Ok(report)
}

fn unit_of(seg: &SegmentedDiscourse, clause: &ClauseId) -> Result<usize, StatsError> {
    seg.clauses
        .get(clause)
        .map(|c| c.unit)
        .ok_or_else(|| StatsError::Unsegmented(clause.0.clone()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Band {
    #[serde(rename = "p<.001")]
    P001,
    #[serde(rename = "p<.01")]
    P01,
    #[serde(rename = "p<.05")]
    P05,
    #[serde(rename = ".05<p<.10")]
    P10,
    #[serde(rename = "n.s.")]
    NotSignificant,
}

impl Band {
    pub fn as_str(self) -> &'static str {
        match self {
            Band::P001 => "p<.001",
            Band::P01 => "p<.01",
            Band::P05 => "p<.05",
            Band::P10 => ".05<p<.10",
            Band::NotSignificant => "n.s.",
        }
    }

    /// Critical values of chi-square with one degree of freedom.
    pub fn of(statistic: f64) -> Band {
        if statistic >= 10.828 {
            Band::P001
        } else if statistic >= 6.635 {
            Band::P01
        } else if statistic >= 3.841 {
            Band::P05
        } else if statistic >= 2.706 {
            Band::P10
        } else {
            Band::NotSignificant
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub p_value: f64,
    pub band: Band,
}

/// Goodness of fit of two counts against an even split, df = 1.
pub fn chi_square_binary(a: u64, b: u64) -> Result<ChiSquare, StatsError> {
    let total = a + b;
    if total == 0 {
        return Err(StatsError::ZeroTotal);
    }
    let expected = total as f64 / 2.0;
    let statistic = [a, b]
        .iter()
        .map(|&o| (o as f64 - expected).powi(2) / expected)
        .sum::<f64>();
    Ok(ChiSquare {
        statistic,
        p_value: erfc((statistic / 2.0).sqrt()),
        band: Band::of(statistic),
    })
}
