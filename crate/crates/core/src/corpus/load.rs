use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde_json::{Map, Value};

use super::{Corpus, Label, Review, UserMeta, DEFAULT_MAX_RATING, SECONDS_PER_DAY};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Jsonl,
    Csv,
}

impl InputFormat {
    /// Guess from the file extension, defaulting to JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => InputFormat::Csv,
            _ => InputFormat::Jsonl,
        }
    }
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "json" => Ok(InputFormat::Jsonl),
            "csv" => Ok(InputFormat::Csv),
            other => Err(format!("unknown corpus format \"{other}\"")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LoadOptions {
    pub max_rating: u8,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            max_rating: DEFAULT_MAX_RATING,
        }
    }
}

pub fn load_corpus(path: &Path, format: InputFormat, options: LoadOptions) -> Result<Corpus> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reviews = match format {
        InputFormat::Jsonl => read_jsonl(BufReader::new(file), path, options)?,
        InputFormat::Csv => read_csv(BufReader::new(file), options)?,
    };
    Corpus::new(reviews, options.max_rating)
}

fn read_jsonl<R: BufRead>(reader: R, path: &Path, options: LoadOptions) -> Result<Vec<Review>> {
    let mut reviews = Vec::new();
    let mut ids = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&line)
            .map_err(|e| Error::record(line_no, "<record>", e.to_string()))?;
        let Value::Object(obj) = value else {
            return Err(Error::record(line_no, "<record>", "expected a JSON object"));
        };
        let review = JsonFields { obj: &obj, line: line_no }.review(options)?;
        if !ids.insert(review.review_id.clone()) {
            return Err(Error::DuplicateReview {
                line: line_no,
                review_id: review.review_id,
            });
        }
        reviews.push(review);
    }
    Ok(reviews)
}

struct JsonFields<'a> {
    obj: &'a Map<String, Value>,
    line: usize,
}

impl JsonFields<'_> {
    fn get(&self, field: &str) -> Option<&Value> {
        self.obj.get(field).filter(|v| !v.is_null())
    }

    fn required(&self, field: &str) -> Result<&Value> {
        self.get(field)
            .ok_or_else(|| Error::record(self.line, field, "missing"))
    }

    fn string(&self, field: &str) -> Result<String> {
        match self.required(field)? {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            _ => Err(Error::record(self.line, field, "expected a string")),
        }
    }

    fn integer(&self, field: &str) -> Result<Option<i64>> {
        let Some(value) = self.get(field) else {
            return Ok(None);
        };
        let parsed = match value {
            Value::Number(n) => n
                .as_i64()
                .or_else(|| n.as_f64().filter(|f| f.fract() == 0.0).map(|f| f as i64)),
            Value::String(s) => s.trim().parse::<i64>().ok(),
            _ => None,
        };
        parsed
            .map(Some)
            .ok_or_else(|| Error::record(self.line, field, format!("expected an integer, got {value}")))
    }

    fn boolean(&self, field: &str) -> Result<Option<bool>> {
        match self.get(field) {
            None => Ok(None),
            Some(Value::Bool(b)) => Ok(Some(*b)),
            Some(Value::Number(n)) if n.as_i64() == Some(0) => Ok(Some(false)),
            Some(Value::Number(n)) if n.as_i64() == Some(1) => Ok(Some(true)),
            Some(Value::String(s)) => parse_bool(s)
                .map(Some)
                .ok_or_else(|| Error::record(self.line, field, format!("expected a boolean, got \"{s}\""))),
            Some(other) => Err(Error::record(self.line, field, format!("expected a boolean, got {other}"))),
        }
    }

    fn review(&self, options: LoadOptions) -> Result<Review> {
        let timestamp = match self.required("timestamp")? {
            Value::Number(n) => n
                .as_f64()
                .map(|secs| secs / SECONDS_PER_DAY)
                .ok_or_else(|| Error::record(self.line, "timestamp", "not representable"))?,
            Value::String(s) => parse_timestamp(s)
                .ok_or_else(|| Error::record(self.line, "timestamp", format!("unparseable \"{s}\"")))?,
            _ => return Err(Error::record(self.line, "timestamp", "expected a number or string")),
        };
        let rating = self
            .integer("rating")?
            .ok_or_else(|| Error::record(self.line, "rating", "missing"))?;
        let label = match self.get("label") {
            None => None,
            Some(Value::String(s)) => Some(
                s.parse::<Label>()
                    .map_err(|e| Error::record(self.line, "label", e))?,
            ),
            Some(Value::Number(n)) => Some(
                n.to_string()
                    .parse::<Label>()
                    .map_err(|e| Error::record(self.line, "label", e))?,
            ),
            Some(_) => return Err(Error::record(self.line, "label", "expected a string")),
        };
        let text = match self.required("text")? {
            Value::String(s) => decode_entities(s),
            _ => return Err(Error::record(self.line, "text", "expected a string")),
        };
        build_review(
            self.line,
            options,
            RawFields {
                review_id: self.string("review_id")?,
                user_id: self.string("user_id")?,
                item_id: self.string("item_id")?,
                timestamp,
                rating,
                text,
                label,
                helpful_votes: self.integer("helpful_votes")?,
                friends_count: self.integer("friends_count")?,
                checked_in: self.boolean("checked_in")?,
                elite: self.boolean("elite")?,
            },
        )
    }
}

struct RawFields {
    review_id: String,
    user_id: String,
    item_id: String,
    timestamp: f64,
    rating: i64,
    text: String,
    label: Option<Label>,
    helpful_votes: Option<i64>,
    friends_count: Option<i64>,
    checked_in: Option<bool>,
    elite: Option<bool>,
}

fn build_review(line: usize, options: LoadOptions, raw: RawFields) -> Result<Review> {
    if raw.review_id.is_empty() {
        return Err(Error::record(line, "review_id", "empty"));
    }
    if !raw.timestamp.is_finite() {
        return Err(Error::record(line, "timestamp", "not finite"));
    }
    if raw.rating < 1 || raw.rating > i64::from(options.max_rating) {
        return Err(Error::record(
            line,
            "rating",
            format!("{} outside 1..={}", raw.rating, options.max_rating),
        ));
    }
    let non_negative = |value: Option<i64>, field: &str| -> Result<Option<u32>> {
        value
            .map(|v| u32::try_from(v).map_err(|_| Error::record(line, field, format!("{v} is not a non-negative count"))))
            .transpose()
    };
    Ok(Review {
        review_id: raw.review_id,
        user_id: raw.user_id,
        item_id: raw.item_id,
        timestamp: raw.timestamp,
        rating: raw.rating as u8,
        text: raw.text,
        label: raw.label,
        helpful_votes: non_negative(raw.helpful_votes, "helpful_votes")?,
        user_meta: UserMeta {
            friends_count: non_negative(raw.friends_count, "friends_count")?,
            checked_in: raw.checked_in,
            elite: raw.elite,
        },
    })
}

fn read_csv<R: std::io::Read>(reader: R, options: LoadOptions) -> Result<Vec<Review>> {
    let mut rdr = csv::ReaderBuilder::new().flexible(false).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::record(1, "<header>", e.to_string()))?
        .clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let required = ["review_id", "user_id", "item_id", "timestamp", "rating", "text"];
    for name in required {
        if column(name).is_none() {
            return Err(Error::record(1, name, "missing column"));
        }
    }
    let col = |name: &str| column(name);
    let (c_id, c_user, c_item, c_ts, c_rating, c_text) = (
        col("review_id").unwrap(),
        col("user_id").unwrap(),
        col("item_id").unwrap(),
        col("timestamp").unwrap(),
        col("rating").unwrap(),
        col("text").unwrap(),
    );
    let (c_label, c_helpful, c_friends, c_checkin, c_elite) = (
        col("label"),
        col("helpful_votes"),
        col("friends_count"),
        col("checked_in"),
        col("elite"),
    );

    let mut reviews = Vec::new();
    let mut ids = HashSet::new();
    for result in rdr.records() {
        let record = result.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::record(line, "<record>", e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let field = |c: usize| record.get(c).unwrap_or("");
        let optional = |c: Option<usize>| c.map(|c| field(c).trim()).filter(|s| !s.is_empty());
        let integer = |c: Option<usize>, name: &str| -> Result<Option<i64>> {
            optional(c)
                .map(|s| {
                    s.parse::<i64>()
                        .map_err(|_| Error::record(line, name, format!("expected an integer, got \"{s}\"")))
                })
                .transpose()
        };
        let boolean = |c: Option<usize>, name: &str| -> Result<Option<bool>> {
            optional(c)
                .map(|s| {
                    parse_bool(s).ok_or_else(|| Error::record(line, name, format!("expected a boolean, got \"{s}\"")))
                })
                .transpose()
        };
        let ts_raw = field(c_ts);
        let timestamp = parse_timestamp(ts_raw)
            .ok_or_else(|| Error::record(line, "timestamp", format!("unparseable \"{ts_raw}\"")))?;
        let rating = integer(Some(c_rating), "rating")?
            .ok_or_else(|| Error::record(line, "rating", "missing"))?;
        let label = optional(c_label)
            .map(|s| s.parse::<Label>().map_err(|e| Error::record(line, "label", e)))
            .transpose()?;
        let review = build_review(
            line,
            options,
            RawFields {
                review_id: field(c_id).to_string(),
                user_id: field(c_user).to_string(),
                item_id: field(c_item).to_string(),
                timestamp,
                rating,
                text: decode_entities(field(c_text)),
                label,
                helpful_votes: integer(c_helpful, "helpful_votes")?,
                friends_count: integer(c_friends, "friends_count")?,
                checked_in: boolean(c_checkin, "checked_in")?,
                elite: boolean(c_elite, "elite")?,
            },
        )?;
        if !ids.insert(review.review_id.clone()) {
            return Err(Error::DuplicateReview {
                line,
                review_id: review.review_id,
            });
        }
        reviews.push(review);
    }
    Ok(reviews)
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" => Some(false),
        _ => None,
    }
}

/// Parse epoch seconds, RFC 3339, `YYYY-MM-DD HH:MM:SS` (UTC) or a bare date
/// into days since the Unix epoch.
pub fn parse_timestamp(raw: &str) -> Option<f64> {
    let s = raw.trim();
    if s.is_empty() {
        return None;
    }
    if let Ok(secs) = s.parse::<f64>() {
        return secs.is_finite().then_some(secs / SECONDS_PER_DAY);
    }
    let secs = if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        dt.timestamp() as f64 + f64::from(dt.timestamp_subsec_nanos()) * 1e-9
    } else if let Ok(dt) = NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S") {
        dt.and_utc().timestamp() as f64
    } else if let Ok(dt) = NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S") {
        dt.and_utc().timestamp() as f64
    } else if let Ok(date) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        date.and_hms_opt(0, 0, 0)?.and_utc().timestamp() as f64
    } else {
        return None;
    };
    Some(secs / SECONDS_PER_DAY)
}

/// Decode the common named HTML entities and numeric character references.
pub fn decode_entities(text: &str) -> String {
    if !text.contains('&') {
        return text.to_string();
    }
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        let tail = &rest[amp..];
        let decoded = tail.find(';').filter(|&end| end <= 10).and_then(|end| {
            let entity = &tail[1..end];
            let ch = match entity {
                "amp" => Some('&'),
                "lt" => Some('<'),
                "gt" => Some('>'),
                "quot" => Some('"'),
                "apos" => Some('\''),
                "nbsp" => Some(' '),
                _ => {
                    if let Some(hex) = entity.strip_prefix("#x").or_else(|| entity.strip_prefix("#X")) {
                        u32::from_str_radix(hex, 16).ok().and_then(char::from_u32)
                    } else if let Some(dec) = entity.strip_prefix('#') {
                        dec.parse::<u32>().ok().and_then(char::from_u32)
                    } else {
                        None
                    }
                }
            };
            ch.map(|c| (c, end))
        });
        match decoded {
            Some((c, end)) => {
                out.push(c);
                rest = &tail[end + 1..];
            }
            None => {
                out.push('&');
                rest = &tail[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

/// Write reviews in the JSONL ingestion format. Timestamps are written as
/// epoch seconds.
pub fn write_jsonl(corpus: &Corpus, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for review in corpus.reviews() {
        let line = review_to_json(review, review.timestamp * SECONDS_PER_DAY);
        writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn review_to_json(review: &Review, timestamp: impl Into<Value>) -> Value {
    let mut obj = Map::new();
    obj.insert("review_id".into(), review.review_id.clone().into());
    obj.insert("user_id".into(), review.user_id.clone().into());
    obj.insert("item_id".into(), review.item_id.clone().into());
    obj.insert("timestamp".into(), timestamp.into());
    obj.insert("rating".into(), review.rating.into());
    obj.insert("text".into(), review.text.clone().into());
    if let Some(label) = review.label {
        obj.insert("label".into(), label.as_str().into());
    }
    if let Some(votes) = review.helpful_votes {
        obj.insert("helpful_votes".into(), votes.into());
    }
    if let Some(friends) = review.user_meta.friends_count {
        obj.insert("friends_count".into(), friends.into());
    }
    if let Some(checked_in) = review.user_meta.checked_in {
        obj.insert("checked_in".into(), checked_in.into());
    }
    if let Some(elite) = review.user_meta.elite {
        obj.insert("elite".into(), elite.into());
    }
    Value::Object(obj)
}
