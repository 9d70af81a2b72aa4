use crate::error::{Error, Result};
use crate::features::{FeatureVector, FEATURE_NAMES};
use crate::scalar::Real;
use crate::signal::{AgeGroup, WritingTask};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

/// Missing values in feature CSVs.
pub const MISSING: &str = "NA";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TableKind {
    #[serde(rename = "D_T")]
    Text,
    #[serde(rename = "D_L")]
    List,
    #[serde(rename = "D_TL")]
    TextList,
}

impl TableKind {
    pub const ALL: [TableKind; 3] = [TableKind::Text, TableKind::List, TableKind::TextList];

    pub fn as_str(self) -> &'static str {
        match self {
            TableKind::Text => "D_T",
            TableKind::List => "D_L",
            TableKind::TextList => "D_TL",
        }
    }

    pub fn feature_names(self) -> Vec<String> {
        match self {
            TableKind::Text | TableKind::List => FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
            TableKind::TextList => ["text", "list"]
                .iter()
                .flat_map(|suffix| FEATURE_NAMES.iter().map(move |n| format!("{n}_{suffix}")))
                .collect(),
        }
    }
}

impl fmt::Display for TableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TableKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "D_T" => Ok(TableKind::Text),
            "D_L" => Ok(TableKind::List),
            "D_TL" => Ok(TableKind::TextList),
            other => Err(Error::ConfigInvalid(format!("unknown table {other:?}"))),
        }
    }
}

/// One subject's indicators for one writing task.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectFeatures<T> {
    pub subject_id: String,
    pub group: AgeGroup,
    pub task: WritingTask,
    pub features: FeatureVector<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord<T> {
    pub subject_id: String,
    pub group: AgeGroup,
    pub values: Vec<Option<T>>,
}

/// Rows are sorted by subject id.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable<T> {
    pub kind: TableKind,
    pub feature_names: Vec<String>,
    pub rows: Vec<FeatureRecord<T>>,
}

#[derive(Debug, Clone)]
pub struct Tables<T> {
    pub text: FeatureTable<T>,
    pub list: FeatureTable<T>,
    pub text_list: FeatureTable<T>,
    /// Subjects left out of the merged table.
    pub warnings: Vec<String>,
}

impl<T> Tables<T> {
    pub fn get(&self, kind: TableKind) -> &FeatureTable<T> {
        match kind {
            TableKind::Text => &self.text,
            TableKind::List => &self.list,
            TableKind::TextList => &self.text_list,
        }
    }
}

pub fn build_tables<T: Real>(items: &[SubjectFeatures<T>]) -> Result<Tables<T>> {
    let mut by_subject: BTreeMap<&str, (AgeGroup, [Option<&FeatureVector<T>>; 2])> = BTreeMap::new();
    for item in items {
        let entry = by_subject.entry(&item.subject_id).or_insert((item.group, [None, None]));
        if entry.0 != item.group {
            return Err(Error::MalformedInput(format!(
                "subject {} listed in groups {} and {}",
                item.subject_id, entry.0, item.group
            )));
        }
        let slot = &mut entry.1[item.task as usize];
        if slot.is_some() {
            return Err(Error::DuplicateSubject(format!("{} ({})", item.subject_id, item.task)));
        }
        *slot = Some(&item.features);
    }
    let empty = |kind: TableKind| FeatureTable { kind, feature_names: kind.feature_names(), rows: Vec::new() };
    let mut tables = Tables {
        text: empty(TableKind::Text),
        list: empty(TableKind::List),
        text_list: empty(TableKind::TextList),
        warnings: Vec::new(),
    };
    for (id, (group, [text, list])) in by_subject {
        let record = |v: &FeatureVector<T>| FeatureRecord { subject_id: id.to_string(), group, values: v.values.to_vec() };
        if let Some(t) = text {
            tables.text.rows.push(record(t));
        }
        if let Some(l) = list {
            tables.list.rows.push(record(l));
        }
        match (text, list) {
            (Some(t), Some(l)) => {
                let mut values = t.values.to_vec();
                values.extend_from_slice(&l.values);
                tables.text_list.rows.push(FeatureRecord { subject_id: id.to_string(), group, values });
            }
            (Some(_), None) | (None, Some(_)) => {
                let missing = if text.is_none() { WritingTask::Text } else { WritingTask::List };
                let err = Error::MissingTask { subject: id.to_string(), task: missing.to_string() };
                log::warn!("{err}; excluded from D_TL");
                tables.warnings.push(err.to_string());
            }
            (None, None) => {}
        }
    }
    Ok(tables)
}

impl<T: Real> FeatureTable<T> {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["subject_id".to_string(), "age_group".to_string()];
        header.extend(self.feature_names.iter().cloned());
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![row.subject_id.clone(), row.group.to_string()];
            rec.extend(row.values.iter().map(|v| v.map_or_else(|| MISSING.to_string(), |x| x.to_string())));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(kind: TableKind, input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let expected = kind.feature_names();
        let header = r.headers()?.clone();
        let names: Vec<&str> = header.iter().collect();
        if names.len() != expected.len() + 2
            || names[0] != "subject_id"
            || names[1] != "age_group"
            || names[2..].iter().zip(&expected).any(|(a, b)| a != b)
        {
            return Err(Error::MalformedInput(format!("unexpected {kind} header: {}", names.join(","))));
        }
        let mut rows: Vec<FeatureRecord<T>> = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let group: AgeGroup = rec[1].parse()?;
            let values = rec
                .iter()
                .skip(2)
                .map(|s| {
                    if s == MISSING {
                        Ok(None)
                    } else {
                        s.parse::<f64>()
                            .map(|v| Some(T::lit(v)))
                            .map_err(|_| Error::MalformedInput(format!("bad value {s:?}")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(FeatureRecord { subject_id: rec[0].to_string(), group, values });
        }
        rows.sort_by(|a, b| a.subject_id.cmp(&b.subject_id));
        if let Some(w) = rows.windows(2).find(|w| w[0].subject_id == w[1].subject_id) {
            return Err(Error::DuplicateSubject(w[0].subject_id.clone()));
        }
        Ok(FeatureTable { kind, feature_names: expected, rows })
    }
}
