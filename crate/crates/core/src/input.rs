//! Matrix input documents: `{"rank": r, "entries": [["p/q", ...], ...]}`,
//! row-major, with `f b_j = Σ_i entries[i][j] b_i`.

use serde_json::Value;
use thiserror::Error;

use crate::cayley::Endomorphism;
use crate::exterior::HARD_MAX_RANK;
use crate::matrix::Matrix;
use crate::scalar::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("malformed JSON: {0}")]
    Malformed(String),
    #[error("invalid matrix document: {0}")]
    Schema(String),
    #[error("rank {rank} out of range 1..={max}")]
    RankOutOfRange { rank: u64, max: usize },
    #[error("matrix is not square of size {rank}: {detail}")]
    NonSquare { rank: usize, detail: String },
    #[error("bad rational literal at [{row}][{col}]: {literal}")]
    BadLiteral {
        row: usize,
        col: usize,
        literal: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixInput {
    pub rank: usize,
    pub entries: Matrix,
}

impl MatrixInput {
    pub fn endomorphism(&self) -> Endomorphism {
        Endomorphism::with_max_rank(self.entries.clone(), HARD_MAX_RANK)
            .expect("validated at parse time")
    }
}

pub fn parse_matrix(text: &str, max_rank: usize) -> Result<MatrixInput, InputError> {
    let max_rank = max_rank.min(HARD_MAX_RANK);
    let doc: Value =
        serde_json::from_str(text).map_err(|e| InputError::Malformed(e.to_string()))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| InputError::Schema("top level must be an object".into()))?;
    if let Some(key) = obj.keys().find(|k| *k != "rank" && *k != "entries") {
        return Err(InputError::Schema(format!("unknown field {key:?}")));
    }
    let rank = obj
        .get("rank")
        .ok_or_else(|| InputError::Schema("missing field \"rank\"".into()))?
        .as_u64()
        .ok_or_else(|| InputError::Schema("\"rank\" must be a non-negative integer".into()))?;
    if rank == 0 || rank > max_rank as u64 {
        return Err(InputError::RankOutOfRange {
            rank,
            max: max_rank,
        });
    }
    let rank = rank as usize;
    let rows = obj
        .get("entries")
        .ok_or_else(|| InputError::Schema("missing field \"entries\"".into()))?
        .as_array()
        .ok_or_else(|| InputError::Schema("\"entries\" must be an array of rows".into()))?;
    if rows.len() != rank {
        return Err(InputError::NonSquare {
            rank,
            detail: format!("{} rows", rows.len()),
        });
    }
    let mut parsed = Vec::with_capacity(rank);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| InputError::Schema(format!("row {i} must be an array")))?;
        if row.len() != rank {
            return Err(InputError::NonSquare {
                rank,
                detail: format!("row {i} has {} entries", row.len()),
            });
        }
        let values = row
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let bad = || InputError::BadLiteral {
                    row: i,
                    col: j,
                    literal: v.to_string(),
                };
                v.as_str()
                    .ok_or_else(bad)?
                    .parse::<Rational>()
                    .map_err(|_| bad())
            })
            .collect::<Result<Vec<_>, _>>()?;
        parsed.push(values);
    }
    let entries = Matrix::from_rows(parsed).expect("rows checked");
    Ok(MatrixInput { rank, entries })
}
