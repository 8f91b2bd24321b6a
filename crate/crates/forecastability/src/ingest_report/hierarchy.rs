//! Hierarchy definitions and level aggregation.
//!
//! Levels are nested groupings from the total (no dimensions) down to
//! individual series; the pseudo-dimension `series_id` selects the
//! finest level.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::{Frequency, TimeSeries};

use super::load::Dataset;

/// Dimension name that groups by the raw series identity.
pub const SERIES_DIM: &str = "series_id";

/// One aggregation level: a name and the dimensions it groups by.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSpec {
    pub name: String,
    #[serde(default)]
    pub dims: Vec<String>,
}

/// Ordered levels from total to finest. Each level's dimensions must
/// contain the previous level's.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierarchySpec {
    pub levels: Vec<LevelSpec>,
}

impl HierarchySpec {
    /// Default hierarchy for a dataset: total, one level per cumulative
    /// dimension prefix in header order, then the per-series level.
    pub fn default_for(dims: &[String]) -> Self {
        let mut levels = vec![LevelSpec {
            name: "L0".into(),
            dims: Vec::new(),
        }];
        let mut acc: Vec<String> = Vec::new();
        for dim in dims {
            acc.push(dim.clone());
            levels.push(LevelSpec {
                name: format!("L{}", levels.len()),
                dims: acc.clone(),
            });
        }
        acc.push(SERIES_DIM.into());
        levels.push(LevelSpec {
            name: format!("L{}", levels.len()),
            dims: acc,
        });
        Self { levels }
    }

    pub fn validate(&self, available_dims: &[String]) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::InvalidHierarchy("no levels defined".into()));
        }
        if !self.levels[0].dims.is_empty() {
            return Err(Error::InvalidHierarchy(
                "level 0 must be the total (no grouping dimensions)".into(),
            ));
        }
        let mut names = BTreeSet::new();
        for level in &self.levels {
            if !names.insert(level.name.as_str()) {
                return Err(Error::InvalidHierarchy(format!(
                    "duplicate level name {:?}",
                    level.name
                )));
            }
            for dim in &level.dims {
                if dim != SERIES_DIM && !available_dims.contains(dim) {
                    return Err(Error::InvalidHierarchy(format!(
                        "level {:?} groups by unknown dimension {:?}",
                        level.name, dim
                    )));
                }
            }
        }
        for pair in self.levels.windows(2) {
            let coarse: BTreeSet<&String> = pair[0].dims.iter().collect();
            let fine: BTreeSet<&String> = pair[1].dims.iter().collect();
            if !coarse.is_subset(&fine) {
                return Err(Error::InvalidHierarchy(format!(
                    "level {:?} does not refine level {:?}",
                    pair[1].name, pair[0].name
                )));
            }
        }
        Ok(())
    }
}

/// All aggregated series of one level, sorted by series id.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSeries {
    pub level: String,
    pub series: Vec<TimeSeries>,
}

/// Aggregates the dataset at every level of the hierarchy: series are
/// grouped by the level's dimension values and summed per timestamp.
/// Aggregate ids join the group's dimension values with `/`; the total
/// is named `total`, and levels grouping by the series dimension keep
/// the raw series ids. Requires all input series to cover the same
/// timestamp range.
pub fn aggregate_levels(
    dataset: &Dataset,
    hierarchy: &HierarchySpec,
    frequency: Frequency,
) -> Result<Vec<LevelSeries>> {
    hierarchy.validate(dataset.dims())?;
    let assembled = dataset.assemble(frequency)?;
    let first = &assembled[0].series;
    for entry in &assembled[1..] {
        let s = &entry.series;
        if s.start_index() != first.start_index() || s.len() != first.len() {
            return Err(Error::MisalignedSeries {
                a: first.id().to_string(),
                b: s.id().to_string(),
            });
        }
    }

    let mut out = Vec::with_capacity(hierarchy.levels.len());
    for level in &hierarchy.levels {
        let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for entry in &assembled {
            let id = group_id(&level.dims, entry.series.id(), &entry.keys)?;
            let acc = groups
                .entry(id)
                .or_insert_with(|| vec![0.0; first.len()]);
            for (a, v) in acc.iter_mut().zip(entry.series.values()) {
                *a += v;
            }
        }
        let series = groups
            .into_iter()
            .map(|(id, values)| TimeSeries::new(id, values, first.start_index(), frequency))
            .collect::<Result<Vec<_>>>()?;
        out.push(LevelSeries {
            level: level.name.clone(),
            series,
        });
    }
    Ok(out)
}

fn group_id(
    dims: &[String],
    series_id: &str,
    keys: &BTreeMap<String, String>,
) -> Result<String> {
    if dims.is_empty() {
        return Ok("total".into());
    }
    // A group keyed by the series dimension is one raw series; keeping
    // its original id lets external error files join at the leaf level.
    if dims.iter().any(|dim| dim == SERIES_DIM) {
        return Ok(series_id.to_string());
    }
    let parts: Vec<&str> = dims
        .iter()
        .map(|dim| {
            keys.get(dim).map(String::as_str).ok_or_else(|| {
                Error::InvalidHierarchy(format!("series {series_id} lacks dimension {dim:?}"))
            })
        })
        .collect::<Result<_>>()?;
    Ok(parts.join("/"))
}
