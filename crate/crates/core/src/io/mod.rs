//! File formats. Every artifact is a JSON document carrying
//! `"version": 1` and rejecting unknown fields; experiment rows are a
//! comma-separated table.

mod certificate;
mod game_file;
mod grid_files;
mod values;

use std::fmt;

pub use certificate::{
    CertificateEntry, CertificateFile, CheckEntry, PlayEntry, PlayFile, PunishmentEntry,
    PunishmentMove, PlayerAction,
};
pub use game_file::{emit_game, parse_game, EdgeEntry, GameFile, MoveEntry, VertexEntry};
pub use grid_files::{
    read_metrics_csv, write_metrics_csv, BillReportEntry, GridNeFile, HouseEntry,
    HouseTasks, InstanceFile, MetricsFile, PricesEntry, ScheduleFile, SlotBillEntry, SlotEntry,
    TaskEntry,
};
pub use values::{ValueEntry, ValueMapFile};

use crate::game::{GameError, Violation};
use crate::microgrid::GridError;

pub const VERSION: u32 = 1;

/// A violation with the line of the vertex it names, when found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub violation: Violation,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.violation),
            None => write!(f, "{}", self.violation),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("syntax error at byte {offset} (line {line}, column {column}): {message}")]
    Syntax {
        offset: usize,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at byte {offset} (line {line}, column {column}): {message}")]
    Schema {
        offset: usize,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported version {0}, expected {VERSION}")]
    Version(u32),
    #[error("invalid game:\n{}", list(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown player `{0}`")]
    UnknownPlayer(String),
    #[error("unknown action `{action}` of player `{player}`")]
    UnknownAction { player: String, action: String },
    #[error("{0}")]
    Value(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn list(d: &[Diagnostic]) -> String {
    d.iter().map(|x| format!("  {x}")).collect::<Vec<_>>().join("\n")
}

/// Byte offset of a 1-based line and column.
fn offset_of(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    (start + column.saturating_sub(1)).min(text.len())
}

/// Parses a versioned document.
pub(crate) fn from_json<T: serde::de::DeserializeOwned + Versioned>(text: &str) -> Result<T, IoError> {
    let value: T = serde_json::from_str(text).map_err(|e| {
        let (line, column) = (e.line(), e.column());
        let offset = offset_of(text, line, column);
        let message = e.to_string();
        match e.classify() {
            serde_json::error::Category::Data => IoError::Schema {
                offset,
                line,
                column,
                message,
            },
            _ => IoError::Syntax {
                offset,
                line,
                column,
                message,
            },
        }
    })?;
    if value.version() != VERSION {
        return Err(IoError::Version(value.version()));
    }
    Ok(value)
}

/// Pretty JSON with a trailing newline.
pub(crate) fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub(crate) trait Versioned {
    fn version(&self) -> u32;
}

macro_rules! versioned {
    ($($t:ty),*) => {
        $(impl Versioned for $t {
            fn version(&self) -> u32 {
                self.version
            }
        })*
    };
}
versioned!(
    GameFile,
    PlayFile,
    CertificateFile,
    InstanceFile,
    ScheduleFile,
    MetricsFile,
    GridNeFile,
    ValueMapFile
);

/// Exact rationals as `[numerator, denominator]`.
pub(crate) mod ratio {
    use num_rational::Rational64;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        [*r.numer(), *r.denom()].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        let [n, den] = <[i64; 2]>::deserialize(d)?;
        if den <= 0 {
            return Err(D::Error::custom("denominator must be positive"));
        }
        Ok(Rational64::new(n, den))
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Rational64], s: S) -> Result<S::Ok, S::Error> {
            v.iter()
                .map(|r| [*r.numer(), *r.denom()])
                .collect::<Vec<_>>()
                .serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational64>, D::Error> {
            let raw = Vec::<[i64; 2]>::deserialize(d)?;
            raw.into_iter()
                .map(|[n, den]| {
                    if den <= 0 {
                        Err(D::Error::custom("denominator must be positive"))
                    } else {
                        Ok(Rational64::new(n, den))
                    }
                })
                .collect()
        }
    }
}
