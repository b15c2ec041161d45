use serde::{Deserialize, Serialize};

use super::{Bounds, Granularity, GranuleSet, Label, PeriodicRep, RepError};

/// Wire form of a [`Granularity`]. An empty granularity has no labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepJson {
    #[serde(rename = "P")]
    pub period: i64,
    #[serde(rename = "N")]
    pub label_distance: i64,
    pub labels: Vec<LabelJson>,
    pub bounds: Option<BoundsJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelJson {
    pub label: Label,
    pub bottoms: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsJson {
    pub first: Bound,
    pub last: Bound,
}

/// A label or one of the strings `"-inf"` / `"+inf"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bound {
    Finite(Label),
    Infinite(String),
}

impl Bound {
    fn to_label(&self, expected: &str) -> Result<Option<Label>, JsonError> {
        match self {
            Bound::Finite(l) => Ok(Some(*l)),
            Bound::Infinite(s) if s == expected => Ok(None),
            Bound::Infinite(s) => Err(JsonError::BadBound(s.clone())),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum JsonError {
    #[error("invalid bound {0:?}")]
    BadBound(String),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Syntax(#[from] serde_json::Error),
}

impl From<&Granularity> for RepJson {
    fn from(g: &Granularity) -> Self {
        match g {
            Granularity::Empty => RepJson {
                period: 1,
                label_distance: 1,
                labels: Vec::new(),
                bounds: None,
            },
            Granularity::Periodic(rep) => RepJson {
                period: rep.period(),
                label_distance: rep.label_distance(),
                labels: rep
                    .granules()
                    .iter()
                    .map(|(label, set)| LabelJson {
                        label: *label,
                        bottoms: set.as_slice().to_vec(),
                    })
                    .collect(),
                bounds: rep.bounds().map(|b| BoundsJson {
                    first: b.first.map_or(Bound::Infinite("-inf".into()), Bound::Finite),
                    last: b.last.map_or(Bound::Infinite("+inf".into()), Bound::Finite),
                }),
            },
        }
    }
}

impl TryFrom<RepJson> for Granularity {
    type Error = JsonError;

    fn try_from(json: RepJson) -> Result<Self, JsonError> {
        if json.labels.is_empty() {
            return Ok(Granularity::Empty);
        }
        let bounds = json
            .bounds
            .map(|b| -> Result<_, JsonError> {
                Ok(Bounds {
                    first: b.first.to_label("-inf")?,
                    last: b.last.to_label("+inf")?,
                })
            })
            .transpose()?;
        let granules = json
            .labels
            .into_iter()
            .map(|l| (l.label, GranuleSet::new(l.bottoms)));
        let rep = PeriodicRep::new(json.period, json.label_distance, granules)?;
        Ok(Granularity::Periodic(rep.with_bounds(bounds)))
    }
}

impl Granularity {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(RepJson::from(self)).expect("plain integers serialize")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&RepJson::from(self)).expect("plain integers serialize")
    }

    pub fn from_json_str(text: &str) -> Result<Self, JsonError> {
        let json: RepJson = serde_json::from_str(text)?;
        Granularity::try_from(json)
    }
}
