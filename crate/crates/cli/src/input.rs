//! Reading any file the tool writes, recognized by its top-level keys.

use std::fs;
use std::path::Path;

use mpf_core::atlas::FrameField;
use mpf_core::bundle::{ComplementField, HolonomyReport};
use mpf_core::{DilationPair, Frame};
use serde_json::Value;

use crate::report::{DemoReport, DimcheckReport, VerifyReport};
use crate::CliError;

pub enum Document {
    Frame(Frame),
    Pair(DilationPair),
    Field(FrameField),
    Complement(ComplementField),
    Holonomy(Box<HolonomyReport>),
    Verify(VerifyReport),
    Dimcheck(DimcheckReport),
    Demo(Box<DemoReport>),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Frame(_) => "frame",
            Document::Pair(_) => "dilationPair",
            Document::Field(_) => "field",
            Document::Complement(_) => "complementField",
            Document::Holonomy(_) => "holonomy",
            Document::Verify(_) => "verifyReport",
            Document::Dimcheck(_) => "dimcheckReport",
            Document::Demo(_) => "demoReport",
        }
    }
}

pub fn load(path: &Path, surface: &str) -> Result<Document, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if text.trim_start().starts_with('{') {
        parse_json(&text)
    } else {
        parse_csv(&text, surface)
    }
}

fn parse_json(text: &str) -> Result<Document, CliError> {
    let value: Value = serde_json::from_str(text)?;
    let Some(obj) = value.as_object() else {
        return Err(CliError::Input("expected a JSON object".into()));
    };
    let has = |key: &str| obj.contains_key(key);
    let doc = if has("holonomy") && has("loopLength") {
        Document::Holonomy(serde_json::from_value(value)?)
    } else if has("checks") {
        Document::Demo(serde_json::from_value(value)?)
    } else if has("rows") && has("seed") {
        Document::Dimcheck(serde_json::from_value(value)?)
    } else if has("rows") {
        Document::Verify(serde_json::from_value(value)?)
    } else if has("samples") {
        let complement = obj["samples"]
            .as_array()
            .and_then(|s| s.first())
            .is_some_and(|s| s.get("complement").is_some());
        if complement {
            Document::Complement(ComplementField::from_json(text)?)
        } else {
            Document::Field(FrameField::from_json(text)?)
        }
    } else if has("complement") {
        Document::Pair(serde_json::from_value(value)?)
    } else if has("columns") {
        Document::Frame(serde_json::from_value(value)?)
    } else {
        return Err(CliError::Input("unrecognized JSON document".into()));
    };
    Ok(doc)
}

/// Frame size of a field CSV: the number of leading rows sharing the first
/// row's parameter pair.
fn csv_frame_size(text: &str) -> Result<usize, CliError> {
    let mut rows = text.lines().skip(1).filter(|l| !l.trim().is_empty());
    let key = |line: &str| line.splitn(3, ',').take(2).collect::<Vec<_>>().join(",");
    let first = rows.next().ok_or_else(|| CliError::Input("CSV has no data rows".into()))?;
    let first = key(first);
    Ok(1 + rows.take_while(|l| key(l) == first).count())
}

fn parse_csv(text: &str, surface: &str) -> Result<Document, CliError> {
    let frame_size = csv_frame_size(text)?;
    Ok(Document::Field(FrameField::read_csv(text.as_bytes(), surface, frame_size)?))
}
