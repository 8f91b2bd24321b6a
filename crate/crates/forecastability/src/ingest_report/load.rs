//! Long-format CSV ingestion with row-numbered validation.
//!
//! Expected shape: header `series_id,<level dims...>,t,value` where `t`
//! is a non-negative integer ordinal and `value` is finite. Gaps in a
//! series are a load error, never imputed.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::{Frequency, TimeSeries};

/// Column-role mapping. Any header column not claimed by a role is
/// treated as a hierarchy dimension unless `level_dims` names them
/// explicitly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SchemaMapping {
    pub series_id: String,
    pub timestamp: String,
    pub value: String,
    pub level_dims: Option<Vec<String>>,
}

impl Default for SchemaMapping {
    fn default() -> Self {
        Self {
            series_id: "series_id".into(),
            timestamp: "t".into(),
            value: "value".into(),
            level_dims: None,
        }
    }
}

/// One observation of one series, with its hierarchy coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LongRecord {
    pub series_id: String,
    pub level_keys: BTreeMap<String, String>,
    pub timestamp_index: i64,
    pub value: f64,
}

/// Validated records plus the dimension columns found in the header.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<LongRecord>,
    dims: Vec<String>,
}

impl Dataset {
    pub fn records(&self) -> &[LongRecord] {
        &self.records
    }

    /// Hierarchy dimension names in header order.
    pub fn dims(&self) -> &[String] {
        &self.dims
    }

    /// Distinct series ids in sorted order.
    pub fn series_ids(&self) -> Vec<&str> {
        let set: BTreeSet<&str> = self.records.iter().map(|r| r.series_id.as_str()).collect();
        set.into_iter().collect()
    }

    /// Assembles one series per id, sorted by id, validating that
    /// timestamps are contiguous and that each series carries a single
    /// consistent set of dimension values. All series are labeled with
    /// the given frequency.
    pub fn assemble(&self, frequency: Frequency) -> Result<Vec<AssembledSeries>> {
        let mut grouped: BTreeMap<&str, Vec<&LongRecord>> = BTreeMap::new();
        for record in &self.records {
            grouped.entry(&record.series_id).or_default().push(record);
        }
        let mut out = Vec::with_capacity(grouped.len());
        for (id, mut records) in grouped {
            records.sort_by_key(|r| r.timestamp_index);
            for pair in records.windows(2) {
                if pair[1].timestamp_index != pair[0].timestamp_index + 1 {
                    return Err(Error::NonContiguousTimestamps {
                        id: id.to_string(),
                        prev: pair[0].timestamp_index,
                        next: pair[1].timestamp_index,
                    });
                }
            }
            let keys = records[0].level_keys.clone();
            for record in &records {
                if record.level_keys != keys {
                    return Err(Error::InvalidHierarchy(format!(
                        "series {id} carries conflicting dimension values"
                    )));
                }
            }
            let values: Vec<f64> = records.iter().map(|r| r.value).collect();
            let series = TimeSeries::new(id, values, records[0].timestamp_index, frequency)?;
            out.push(AssembledSeries { series, keys });
        }
        Ok(out)
    }
}

/// A per-id series together with its hierarchy coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledSeries {
    pub series: TimeSeries,
    pub keys: BTreeMap<String, String>,
}

/// Loads and validates a long-format CSV. Errors carry 1-based file
/// line numbers (header is line 1).
pub fn load_long_csv(path: impl AsRef<Path>, schema: &SchemaMapping) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(false)
        .from_path(path.as_ref())?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::MalformedCsv {
            line: 1,
            message: e.to_string(),
        })?
        .iter()
        .map(str::to_string)
        .collect();

    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::UnmappedColumn(name.to_string()))
    };
    let id_col = col(&schema.series_id)?;
    let t_col = col(&schema.timestamp)?;
    let value_col = col(&schema.value)?;

    let dims: Vec<String> = match &schema.level_dims {
        Some(named) => {
            for name in named {
                col(name)?;
            }
            named.clone()
        }
        None => headers
            .iter()
            .enumerate()
            .filter(|(i, _)| ![id_col, t_col, value_col].contains(i))
            .map(|(_, h)| h.clone())
            .collect(),
    };
    let dim_cols: Vec<usize> = dims.iter().map(|d| col(d)).collect::<Result<_>>()?;

    let mut records = Vec::new();
    let mut seen: BTreeSet<(String, i64)> = BTreeSet::new();
    for (idx, row) in reader.records().enumerate() {
        let line = idx as u64 + 2;
        let row = row.map_err(|e| Error::MalformedCsv {
            line,
            message: e.to_string(),
        })?;
        let field = |i: usize| -> Result<&str> {
            row.get(i).ok_or_else(|| Error::MalformedCsv {
                line,
                message: format!("missing column {i}"),
            })
        };
        let series_id = field(id_col)?.to_string();
        if series_id.is_empty() {
            return Err(Error::MalformedCsv {
                line,
                message: "empty series id".into(),
            });
        }
        let timestamp_index: i64 = field(t_col)?.trim().parse().map_err(|_| Error::MalformedCsv {
            line,
            message: format!("timestamp {:?} is not an integer", field(t_col).unwrap_or("")),
        })?;
        if timestamp_index < 0 {
            return Err(Error::MalformedCsv {
                line,
                message: format!("timestamp ordinal {timestamp_index} is negative"),
            });
        }
        let raw_value = field(value_col)?.trim();
        let value: f64 = raw_value.parse().map_err(|_| Error::MalformedCsv {
            line,
            message: format!("value {raw_value:?} is not a number"),
        })?;
        if !value.is_finite() {
            return Err(Error::MalformedCsv {
                line,
                message: format!("value {raw_value:?} is not finite"),
            });
        }
        if !seen.insert((series_id.clone(), timestamp_index)) {
            return Err(Error::DuplicateKey {
                id: series_id,
                timestamp: timestamp_index,
            });
        }
        let mut level_keys = BTreeMap::new();
        for (dim, &c) in dims.iter().zip(&dim_cols) {
            level_keys.insert(dim.clone(), field(c)?.to_string());
        }
        records.push(LongRecord {
            series_id,
            level_keys,
            timestamp_index,
            value,
        });
    }
    if records.is_empty() {
        return Err(Error::DegenerateInput("dataset has no rows".into()));
    }
    Ok(Dataset { records, dims })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(content: &str) -> tempfile::NamedTempFile {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(content.as_bytes()).unwrap();
        file
    }

    #[test]
    fn toy_file_loads_and_assembles() {
        let file = write_csv(
            "series_id,category,t,value\n\
             a,x,0,1.0\na,x,1,2.0\na,x,2,3.0\na,x,3,4.0\n\
             b,y,0,5.0\nb,y,1,6.0\nb,y,2,7.0\nb,y,3,8.0\n",
        );
        let dataset = load_long_csv(file.path(), &SchemaMapping::default()).unwrap();
        assert_eq!(dataset.records().len(), 8);
        assert_eq!(dataset.dims(), ["category".to_string()]);
        assert_eq!(dataset.series_ids(), ["a", "b"]);

        let assembled = dataset.assemble(Frequency::Daily).unwrap();
        assert_eq!(assembled.len(), 2);
        assert_eq!(assembled[0].series.len(), 4);
        assert_eq!(assembled[0].series.values(), [1.0, 2.0, 3.0, 4.0]);
        assert_eq!(assembled[1].keys["category"], "y");
    }

    #[test]
    fn nan_value_is_rejected_with_line_number() {
        let file = write_csv("series_id,t,value\na,0,1.0\na,1,NaN\n");
        let err = load_long_csv(file.path(), &SchemaMapping::default()).unwrap_err();
        match err {
            Error::MalformedCsv { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let file = write_csv("series_id,t,value\na,0,1.0\na,0,2.0\n");
        let err = load_long_csv(file.path(), &SchemaMapping::default()).unwrap_err();
        assert!(matches!(err, Error::DuplicateKey { timestamp: 0, .. }));
    }

    #[test]
    fn timestamp_gaps_are_rejected_at_assembly() {
        let file = write_csv("series_id,t,value\na,0,1.0\na,2,2.0\n");
        let dataset = load_long_csv(file.path(), &SchemaMapping::default()).unwrap();
        let err = dataset.assemble(Frequency::Daily).unwrap_err();
        assert!(matches!(
            err,
            Error::NonContiguousTimestamps { prev: 0, next: 2, .. }
        ));
    }

    #[test]
    fn missing_required_column_is_reported() {
        let file = write_csv("series_id,day,value\na,0,1.0\n");
        let err = load_long_csv(file.path(), &SchemaMapping::default()).unwrap_err();
        match err {
            Error::UnmappedColumn(name) => assert_eq!(name, "t"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn custom_schema_mapping_renames_roles() {
        let file = write_csv("item,day,sales,store\nitem1,0,4.5,s1\n");
        let schema = SchemaMapping {
            series_id: "item".into(),
            timestamp: "day".into(),
            value: "sales".into(),
            level_dims: None,
        };
        let dataset = load_long_csv(file.path(), &schema).unwrap();
        assert_eq!(dataset.dims(), ["store".to_string()]);
        assert_eq!(dataset.records()[0].level_keys["store"], "s1");
    }

    #[test]
    fn conflicting_dimension_values_are_rejected() {
        let file = write_csv("series_id,category,t,value\na,x,0,1.0\na,y,1,2.0\n");
        let dataset = load_long_csv(file.path(), &SchemaMapping::default()).unwrap();
        assert!(matches!(
            dataset.assemble(Frequency::Daily),
            Err(Error::InvalidHierarchy(_))
        ));
    }
}
