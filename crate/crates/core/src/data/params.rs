//! Parameter references and their normalization domains.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{DataError, Dataset, DistrictState, TurnPoint, TurnRecord};
use crate::warnings::WarningLog;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GlobalParam {
    Budget,
    Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DistrictField {
    Population,
    Favorability,
    Unregistered,
    Undecided,
    For,
    Against,
}

impl DistrictField {
    pub const ALL: [DistrictField; 6] = [
        DistrictField::Population,
        DistrictField::Favorability,
        DistrictField::Unregistered,
        DistrictField::Undecided,
        DistrictField::For,
        DistrictField::Against,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DistrictField::Population => "population",
            DistrictField::Favorability => "favorability",
            DistrictField::Unregistered => "unregistered",
            DistrictField::Undecided => "undecided",
            DistrictField::For => "for",
            DistrictField::Against => "against",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "population" => DistrictField::Population,
            "favorability" => DistrictField::Favorability,
            "unregistered" => DistrictField::Unregistered,
            "undecided" => DistrictField::Undecided,
            "for" | "for_share" => DistrictField::For,
            "against" | "against_share" => DistrictField::Against,
            _ => return None,
        })
    }

    /// Fraction fields have the fixed domain `[0, 1]`.
    pub fn is_fraction(self) -> bool {
        !matches!(self, DistrictField::Population | DistrictField::Favorability)
    }

    pub fn raw(self, d: &DistrictState) -> f64 {
        match self {
            DistrictField::Population => d.population as f64,
            DistrictField::Favorability => d.favorability,
            DistrictField::Unregistered => d.unregistered,
            DistrictField::Undecided => d.undecided,
            DistrictField::For => d.for_share,
            DistrictField::Against => d.against_share,
        }
    }
}

/// What a layer reads from each data point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParameterRef {
    /// Constant 1 at every point.
    Baseline,
    Global(GlobalParam),
    District { district: u32, field: DistrictField },
    Action { action: String, district: u32 },
}

impl fmt::Display for ParameterRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParameterRef::Baseline => f.write_str("baseline"),
            ParameterRef::Global(GlobalParam::Budget) => f.write_str("budget"),
            ParameterRef::Global(GlobalParam::Duration) => f.write_str("duration"),
            ParameterRef::District { district, field } => {
                write!(f, "district.{district}.{}", field.name())
            }
            ParameterRef::Action { action, district } => {
                write!(f, "action.{action}.district.{district}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid parameter {input:?}: expected baseline, budget, duration, district.<id>.<field> or action.<name>.district.<id>")]
pub struct ParseParameterError {
    pub input: String,
}

impl FromStr for ParameterRef {
    type Err = ParseParameterError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseParameterError { input: s.to_string() };
        let district_id = |id: &str| id.parse::<u32>().ok().filter(|&d| d >= 1);
        match s {
            "baseline" => return Ok(ParameterRef::Baseline),
            "budget" => return Ok(ParameterRef::Global(GlobalParam::Budget)),
            "duration" | "duration_s" => return Ok(ParameterRef::Global(GlobalParam::Duration)),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("district.") {
            let (id, field) = rest.split_once('.').ok_or_else(err)?;
            return Ok(ParameterRef::District {
                district: district_id(id).ok_or_else(err)?,
                field: DistrictField::parse(field).ok_or_else(err)?,
            });
        }
        if let Some(rest) = s.strip_prefix("action.") {
            let (action, id) = rest.rsplit_once(".district.").ok_or_else(err)?;
            if action.is_empty() {
                return Err(err());
            }
            return Ok(ParameterRef::Action {
                action: action.to_string(),
                district: district_id(id).ok_or_else(err)?,
            });
        }
        Err(err())
    }
}

impl Serialize for ParameterRef {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ParameterRef {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Closed interval used to normalize a raw parameter; `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub const UNIT: Domain = Domain { lo: 0.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Option<Self> {
        (lo.is_finite() && hi.is_finite() && lo < hi).then_some(Domain { lo, hi })
    }

    pub fn normalize(&self, raw: f64) -> f64 {
        ((raw - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }
}

/// How a resolvable reference is normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    Constant(f64),
    Range(Domain),
}

impl Serialize for Normalization {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(match self {
            Normalization::Constant(_) => 1,
            Normalization::Range(_) => 2,
        }))?;
        match self {
            Normalization::Constant(v) => m.serialize_entry("constant", v)?,
            Normalization::Range(d) => {
                m.serialize_entry("hi", &d.hi)?;
                m.serialize_entry("lo", &d.lo)?;
            }
        }
        m.end()
    }
}

/// Normalization domains for every parameter a dataset exposes.
///
/// Raw-valued fields (budget, duration, population, favorability) share one
/// domain per field across all districts: the observed min/max unless
/// overridden.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterRegistry {
    budget: Domain,
    duration: Domain,
    population: Domain,
    favorability: Domain,
    district_count: u32,
    action_vocabulary: Vec<String>,
    warnings: Vec<String>,
}

/// Overridable domain keys: `budget`, `duration`, and the district field names.
pub type DomainOverrides = BTreeMap<String, Domain>;

pub fn build_registry(
    dataset: &Dataset,
    overrides: &DomainOverrides,
) -> Result<ParameterRegistry, DataError> {
    let mut warnings = Vec::new();
    let mut budget = MinMax::default();
    let mut duration = MinMax::default();
    let mut population = MinMax::default();
    let mut favorability = MinMax::default();
    for (_, t) in dataset.iter_points() {
        budget.push(t.budget);
        duration.push(t.duration_s);
        for d in &t.districts {
            population.push(d.population as f64);
            favorability.push(d.favorability);
        }
    }

    let mut fraction_overrides = BTreeMap::new();
    for (key, dom) in overrides {
        if Domain::new(dom.lo, dom.hi).is_none() {
            return Err(DataError::Override(format!(
                "{key}: domain [{}, {}] needs finite lo < hi",
                dom.lo, dom.hi
            )));
        }
        match key.as_str() {
            "budget" | "duration" | "population" | "favorability" => {}
            other => match DistrictField::parse(other) {
                Some(f) => {
                    fraction_overrides.insert(f, *dom);
                }
                None => return Err(DataError::Override(format!("unknown parameter {key:?}"))),
            },
        }
    }
    if !fraction_overrides.is_empty() {
        // Fractions are fixed to [0, 1]; an override there is almost
        // certainly a mistake in the caller's key.
        return Err(DataError::Override(format!(
            "fraction fields have the fixed domain [0, 1]: {:?}",
            fraction_overrides.keys().map(|f| f.name()).collect::<Vec<_>>()
        )));
    }

    let mut resolve = |name: &str, mm: MinMax| -> Domain {
        if let Some(d) = overrides.get(name) {
            return *d;
        }
        let (lo, hi) = (mm.min, mm.max);
        match Domain::new(lo, hi) {
            Some(d) => d,
            None => {
                let msg = format!("{name}: every observed value is {lo}; domain widened to [{lo}, {}]", lo + 1.0);
                log::warn!("{msg}");
                warnings.push(msg);
                Domain { lo, hi: lo + 1.0 }
            }
        }
    };
    let budget = resolve("budget", budget);
    let duration = resolve("duration", duration);
    let population = resolve("population", population);
    let favorability = resolve("favorability", favorability);

    Ok(ParameterRegistry {
        budget,
        duration,
        population,
        favorability,
        district_count: dataset.district_count(),
        action_vocabulary: dataset.action_vocabulary().to_vec(),
        warnings,
    })
}

#[derive(Debug, Clone, Copy)]
struct MinMax {
    min: f64,
    max: f64,
}

impl Default for MinMax {
    fn default() -> Self {
        MinMax { min: f64::INFINITY, max: f64::NEG_INFINITY }
    }
}

impl MinMax {
    fn push(&mut self, v: f64) {
        self.min = self.min.min(v);
        self.max = self.max.max(v);
    }
}

impl ParameterRegistry {
    pub fn district_count(&self) -> u32 {
        self.district_count
    }

    pub fn action_vocabulary(&self) -> &[String] {
        &self.action_vocabulary
    }

    /// Degenerate-domain warnings raised while building.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Check that `r` names an existing district and action.
    pub fn check(&self, r: &ParameterRef) -> Result<(), String> {
        let n = self.district_count;
        let district_ok = |d: u32| {
            if (1..=n).contains(&d) {
                Ok(())
            } else {
                Err(format!("parameter {r}: district {d} outside valid range 1..={n}"))
            }
        };
        match r {
            ParameterRef::Baseline | ParameterRef::Global(_) => Ok(()),
            ParameterRef::District { district, .. } => district_ok(*district),
            ParameterRef::Action { action, district } => {
                if self.action_vocabulary.binary_search(action).is_err() {
                    return Err(format!(
                        "parameter {r}: unknown action {action:?}; known actions: [{}]",
                        self.action_vocabulary.join(", ")
                    ));
                }
                district_ok(*district)
            }
        }
    }

    pub fn normalization(&self, r: &ParameterRef) -> Option<Normalization> {
        self.check(r).ok()?;
        Some(match r {
            ParameterRef::Baseline => Normalization::Constant(1.0),
            ParameterRef::Global(GlobalParam::Budget) => Normalization::Range(self.budget),
            ParameterRef::Global(GlobalParam::Duration) => Normalization::Range(self.duration),
            ParameterRef::District { field, .. } => Normalization::Range(match field {
                DistrictField::Population => self.population,
                DistrictField::Favorability => self.favorability,
                _ => Domain::UNIT,
            }),
            ParameterRef::Action { .. } => Normalization::Range(Domain::UNIT),
        })
    }

    /// Every resolvable reference in canonical order: baseline, globals,
    /// district fields by district, then actions by name and district.
    pub fn refs(&self) -> Vec<ParameterRef> {
        let mut out = vec![
            ParameterRef::Baseline,
            ParameterRef::Global(GlobalParam::Budget),
            ParameterRef::Global(GlobalParam::Duration),
        ];
        for district in 1..=self.district_count {
            out.extend(DistrictField::ALL.iter().map(|&field| ParameterRef::District { district, field }));
        }
        for action in &self.action_vocabulary {
            for district in 1..=self.district_count {
                out.push(ParameterRef::Action { action: action.clone(), district });
            }
        }
        out
    }

    pub fn entries(&self) -> Vec<(ParameterRef, Normalization)> {
        self.refs()
            .into_iter()
            .map(|r| {
                let n = self.normalization(&r).expect("listed refs resolve");
                (r, n)
            })
            .collect()
    }

    /// JSON object keyed by reference string.
    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .entries()
            .into_iter()
            .map(|(r, n)| (r.to_string(), serde_json::to_value(n).expect("serializable")))
            .collect();
        serde_json::Value::Object(map)
    }

    /// Normalized value of `r` on `turn`; `None` when the turn lacks the
    /// referenced district or action.
    pub fn value_on(&self, turn: &TurnRecord, r: &ParameterRef) -> Option<f64> {
        match r {
            ParameterRef::Baseline => Some(1.0),
            ParameterRef::Global(GlobalParam::Budget) => Some(self.budget.normalize(turn.budget)),
            ParameterRef::Global(GlobalParam::Duration) => {
                Some(self.duration.normalize(turn.duration_s))
            }
            ParameterRef::District { district, field } => {
                let d = turn.district(*district)?;
                let raw = field.raw(d);
                Some(match field {
                    DistrictField::Population => self.population.normalize(raw),
                    DistrictField::Favorability => self.favorability.normalize(raw),
                    _ => raw.clamp(0.0, 1.0),
                })
            }
            ParameterRef::Action { action, district } => {
                let flag = *turn.district(*district)?.actions.get(action)?;
                Some(if flag == 0 { 0.0 } else { 1.0 })
            }
        }
    }
}

/// Normalized value of `r` at `point`, in `[0, 1]`.
///
/// A point lacking the referenced district or action yields 0, with one
/// warning per distinct reference recorded in `warnings`.
pub fn parameter_value(
    point: TurnPoint,
    r: &ParameterRef,
    dataset: &Dataset,
    registry: &ParameterRegistry,
    warnings: &WarningLog,
) -> f64 {
    let value = dataset.turn(point).and_then(|t| registry.value_on(t, r));
    match value {
        Some(v) => v,
        None => {
            warnings.warn(format!("parameter {r} missing at some points; using 0 there"));
            0.0
        }
    }
}
