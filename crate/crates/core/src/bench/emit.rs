use std::io::{Read, Write};

use super::{SweepResult, SweepRow};
use crate::error::Result;

/// JSON Schema (draft 2020-12) of the document written by [`write_json`].
pub const SWEEP_JSON_SCHEMA: &str = r#"{
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "fpmusic sweep result",
  "type": "object",
  "required": ["config", "rows", "audited_calls", "audit_mismatches"],
  "properties": {
    "config": {
      "type": "object",
      "required": ["sensors", "sources", "snapshots", "rank", "grid_points", "snr_db",
                   "trials", "doa_range_deg", "min_separation_deg", "schemes", "methods",
                   "master_seed", "audit"],
      "properties": {
        "sensors": {"type": "integer", "minimum": 2},
        "sources": {"type": "integer", "minimum": 1},
        "snapshots": {"type": "integer", "minimum": 1},
        "rank": {"type": "integer", "minimum": 1},
        "grid_points": {"type": "integer", "minimum": 3},
        "snr_db": {"type": "array", "items": {"type": "number"}},
        "trials": {"type": "integer", "minimum": 1},
        "doa_range_deg": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        "min_separation_deg": {"type": "number", "minimum": 0},
        "schemes": {"type": "array", "items": {"type": "string"}},
        "methods": {"type": "array", "items": {"enum": ["music", "u_music", "ru_music"]}},
        "master_seed": {"type": "integer", "minimum": 0},
        "audit": {"type": "boolean"}
      }
    },
    "rows": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["snr_db", "method", "scheme", "rmse_deg", "failures",
                     "weighted_adds", "weighted_muls", "overhead"],
        "additionalProperties": false,
        "properties": {
          "snr_db": {"type": "number"},
          "method": {"enum": ["music", "u_music", "ru_music"]},
          "scheme": {"type": "string"},
          "rmse_deg": {"type": ["number", "null"], "minimum": 0},
          "failures": {"type": "integer", "minimum": 0},
          "weighted_adds": {"type": "number", "minimum": 0},
          "weighted_muls": {"type": "number", "minimum": 0},
          "overhead": {"type": "number", "minimum": 0}
        }
      }
    },
    "audited_calls": {"type": "integer", "minimum": 0},
    "audit_mismatches": {"type": "integer", "minimum": 0}
  }
}"#;

/// Header `snr_db,method,scheme,rmse_deg,failures,weighted_adds,weighted_muls,overhead`;
/// an undefined RMSE is an empty field.
pub fn write_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record([
        "snr_db",
        "method",
        "scheme",
        "rmse_deg",
        "failures",
        "weighted_adds",
        "weighted_muls",
        "overhead",
    ])?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        rows.push(rec?);
    }
    Ok(rows)
}

pub fn write_json<W: Write>(out: W, result: &SweepResult) -> Result<()> {
    serde_json::to_writer_pretty(out, result)?;
    Ok(())
}

pub fn read_json<R: Read>(input: R) -> Result<SweepResult> {
    Ok(serde_json::from_reader(input)?)
}
