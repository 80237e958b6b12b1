//! On-disk forms of an energy series: a versioned JSON document, a two-column
//! CSV table, and a directory cache keyed by family and state.

use crate::error::DocumentError;
use crate::exact::{parse_fraction, to_fraction_string};
use crate::potential::{PotentialFamily, QuantumState};
use crate::series::{energy_series, EnergySeries};
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: &str = "k,coefficient";

/// Whether `coefficients[k]` holds `ε(k)` or `4^k ε(k)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    #[default]
    None,
    PowersOfFour,
}

impl Scaling {
    fn is_none(&self) -> bool {
        *self == Scaling::None
    }
}

/// Run information that does not affect the coefficients. Kept apart so
/// that two documents of the same series differ only here.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp_unix: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine_version: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

impl Metadata {
    fn is_empty(&self) -> bool {
        *self == Metadata::default()
    }

    /// Current time and crate version, with the given wall time.
    pub fn now(wall_time_seconds: Option<f64>) -> Self {
        let timestamp_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
        Metadata {
            timestamp_unix,
            engine_version: Some(env!("CARGO_PKG_VERSION").to_owned()),
            wall_time_seconds,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesDocument {
    pub schema_version: u32,
    pub family: PotentialFamily,
    pub state: QuantumState,
    pub r0: usize,
    #[serde(default, skip_serializing_if = "Scaling::is_none")]
    pub scaling: Scaling,
    pub coefficients: Vec<String>,
    #[serde(default, skip_serializing_if = "Metadata::is_empty")]
    pub metadata: Metadata,
}

impl SeriesDocument {
    pub fn from_series(series: &EnergySeries) -> Self {
        Self::with_scaling(series, Scaling::None)
    }

    pub fn with_scaling(series: &EnergySeries, scaling: Scaling) -> Self {
        let values = match scaling {
            Scaling::None => series.coefficients().to_vec(),
            Scaling::PowersOfFour => series.scaled_by_powers_of_four(),
        };
        SeriesDocument {
            schema_version: SCHEMA_VERSION,
            family: series.family(),
            state: series.state(),
            r0: series.order(),
            scaling,
            coefficients: values.iter().map(to_fraction_string).collect(),
            metadata: Metadata::default(),
        }
    }

    /// Parses and checks the coefficients, undoing any output scaling.
    pub fn to_series(&self) -> Result<EnergySeries, DocumentError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(DocumentError::SchemaVersion(self.schema_version));
        }
        if self.coefficients.len() != self.r0 + 1 {
            return Err(DocumentError::CountMismatch {
                r0: self.r0,
                count: self.coefficients.len(),
            });
        }
        let mut values = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(index, text)| {
                parse_fraction(text).map_err(|source| DocumentError::Coefficient { index, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if self.scaling == Scaling::PowersOfFour {
            let mut scale = Integer::from(1);
            for v in &mut values {
                *v /= &scale;
                scale <<= 2;
            }
        }
        Ok(EnergySeries::new(self.family, self.state, values))
    }

    pub fn to_json(&self) -> Result<String, DocumentError> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        // Checked first so that a future layout reports its version rather
        // than a field error.
        if let Some(v) = value.get("schema_version").and_then(serde_json::Value::as_u64) {
            if v != u64::from(SCHEMA_VERSION) {
                return Err(DocumentError::SchemaVersion(v.try_into().unwrap_or(u32::MAX)));
            }
        }
        Ok(serde_json::from_value(value)?)
    }

    pub fn read(path: &Path) -> Result<Self, DocumentError> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), DocumentError> {
        write_atomically(path, self.to_json()?.as_bytes())
    }

    /// `k,coefficient` rows, as stored (scaled if the document is).
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(["k", "coefficient"])
            .and_then(|_| {
                self.coefficients
                    .iter()
                    .enumerate()
                    .try_for_each(|(k, c)| writer.write_record([k.to_string().as_str(), c]))
            })
            .expect("writing to memory");
        let bytes = writer.into_inner().expect("writing to memory");
        String::from_utf8(bytes).expect("ascii fields")
    }
}

/// Reads the CSV form back; the table carries no family or state.
pub fn series_from_csv(
    text: &str,
    family: PotentialFamily,
    state: QuantumState,
) -> Result<EnergySeries, DocumentError> {
    let csv_error = |e: csv::Error| DocumentError::Csv(e.to_string());
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_error)?;
    if header.iter().collect::<Vec<_>>() != ["k", "coefficient"] {
        return Err(DocumentError::Csv(format!("expected header {CSV_HEADER:?}")));
    }
    let mut values: Vec<Rational> = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let index = values.len();
        if record[0].trim().parse::<usize>().ok() != Some(index) {
            return Err(DocumentError::Csv(format!(
                "row {row}: expected k = {index}, found {:?}",
                &record[0]
            )));
        }
        values.push(
            parse_fraction(&record[1]).map_err(|source| DocumentError::Coefficient { index, source })?,
        );
    }
    if values.is_empty() {
        return Err(DocumentError::Csv("no coefficient rows".into()));
    }
    Ok(EnergySeries::new(family, state, values))
}

fn write_atomically(path: &Path, bytes: &[u8]) -> Result<(), DocumentError> {
    let mut staging = path.as_os_str().to_owned();
    staging.push(".partial");
    let staging = PathBuf::from(staging);
    fs::write(&staging, bytes)?;
    fs::rename(&staging, path)?;
    Ok(())
}

/// How [`SeriesCache::get_or_compute`] obtained its result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheOutcome {
    /// Nothing cached; computed and stored.
    Computed,
    /// A cached series of at least the requested order was found.
    Hit { cached_order: usize },
    /// A shorter cached series was found; the recomputed series agreed with
    /// it on every cached order and replaced it.
    Extended { cached_order: usize },
}

/// Directory of [`SeriesDocument`] files named `{kind}-p{p}-n{n}-l{l}.json`.
#[derive(Clone, Debug)]
pub struct SeriesCache {
    dir: PathBuf,
}

impl SeriesCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        SeriesCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, family: PotentialFamily, state: QuantumState) -> PathBuf {
        self.dir.join(format!(
            "{}-p{}-n{}-l{}.json",
            family.kind(),
            family.power(),
            state.n,
            state.l
        ))
    }

    pub fn load(
        &self,
        family: PotentialFamily,
        state: QuantumState,
    ) -> Result<Option<EnergySeries>, DocumentError> {
        let path = self.path_for(family, state);
        if !path.exists() {
            return Ok(None);
        }
        let series = SeriesDocument::read(&path)?.to_series()?;
        if series.family() != family || series.state() != state {
            return Err(DocumentError::CacheIdentity);
        }
        Ok(Some(series))
    }

    pub fn store(&self, series: &EnergySeries, metadata: Metadata) -> Result<PathBuf, DocumentError> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(series.family(), series.state());
        let mut document = SeriesDocument::from_series(series);
        document.metadata = metadata;
        document.write(&path)?;
        Ok(path)
    }

    /// Series of order `r0`, from the cache when possible. A shorter cached
    /// series is extended by recomputing from scratch and checking that the
    /// cached orders are reproduced exactly.
    pub fn get_or_compute(
        &self,
        family: PotentialFamily,
        state: QuantumState,
        r0: usize,
    ) -> Result<(EnergySeries, CacheOutcome), DocumentError> {
        let cached = self.load(family, state)?;
        if let Some(cached) = &cached {
            if cached.order() >= r0 {
                let outcome = CacheOutcome::Hit {
                    cached_order: cached.order(),
                };
                return Ok((cached.truncated(r0), outcome));
            }
        }
        let start = std::time::Instant::now();
        let fresh = energy_series(family, state, r0)?;
        let elapsed = start.elapsed().as_secs_f64();
        let outcome = match &cached {
            Some(cached) => {
                if let Some(k) = cached
                    .coefficients()
                    .iter()
                    .zip(fresh.coefficients())
                    .position(|(a, b)| a != b)
                {
                    return Err(DocumentError::CachePrefixMismatch { k });
                }
                CacheOutcome::Extended {
                    cached_order: cached.order(),
                }
            }
            None => CacheOutcome::Computed,
        };
        self.store(&fresh, Metadata::now(Some(elapsed)))?;
        Ok((fresh, outcome))
    }
}
