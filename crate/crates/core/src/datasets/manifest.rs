//! Corpus manifests.
//!
//! A manifest is a TOML file. Paths inside it are relative to `root`, which
//! is itself relative to the manifest's directory (default: that directory).
//!
//! ```toml
//! layout = "class_dirs"            # or "idx_pair", "csv_flat"
//! root = "digits"
//! classes = ["0", "1"]             # optional explicit order
//! filename_pattern = "{subject}_{repetition}"
//!
//! [features]
//! preprocess = "pipeline"          # "resize_binarize", "grayscale"
//! kind = "hog"                     # "raw_pixels"
//! hog = { cell_size = 3, num_bins = 9 }
//!
//! # class_dirs only: list samples explicitly instead of scanning
//! [[records]]
//! path = "0/s01_1.png"
//! class = "0"
//! subject = "s01"
//! repetition = 1
//!
//! [idx]                            # idx_pair layout
//! images = "train-images-idx3-ubyte.gz"
//! labels = "train-labels-idx1-ubyte.gz"
//!
//! [csv]                            # csv_flat layout
//! file = "zip.train.gz"
//! delimiter = "whitespace"         # or a single character, default ","
//! width = 16
//! height = 16
//! label_column = 0                 # negative counts from the end
//! value_range = [-1.0, 1.0]        # mapped onto 0..=255
//! invert = false                   # true when high values are ink
//! header = false
//! ```
//!
//! With `features.kind = "precomputed"`, csv_flat rows are read as feature
//! vectors of length `width · height` and used unchanged.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use regex::Regex;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::features::{FeatureConfig, FeatureKind};
use crate::preprocess::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// One subdirectory per class holding PNG/PGM files.
    ClassDirs,
    /// An idx3 image file with a matching idx1 label file.
    IdxPair,
    /// One sample per text row: a label column and pixel columns.
    CsvFlat,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    path: PathBuf,
    class: String,
    subject: Option<String>,
    repetition: Option<u32>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIdx {
    images: PathBuf,
    labels: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCsv {
    file: PathBuf,
    #[serde(default = "default_delimiter")]
    delimiter: String,
    width: usize,
    height: usize,
    #[serde(default)]
    label_column: i64,
    subject_column: Option<i64>,
    #[serde(default = "default_range")]
    value_range: [f64; 2],
    #[serde(default)]
    invert: bool,
    #[serde(default)]
    header: bool,
}

fn default_delimiter() -> String {
    ",".into()
}

fn default_range() -> [f64; 2] {
    [0.0, 255.0]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    layout: Layout,
    root: Option<PathBuf>,
    classes: Option<Vec<String>>,
    filename_pattern: Option<String>,
    #[serde(default)]
    features: FeatureConfig,
    records: Option<Vec<RawRecord>>,
    idx: Option<RawIdx>,
    csv: Option<RawCsv>,
}

/// Where a record's pixels come from.
#[derive(Debug, Clone, PartialEq)]
pub enum RecordSource {
    File(PathBuf),
    /// Decoded from a container file at the given offset (sample index).
    Inline { offset: usize, image: GrayImage },
    /// A precomputed feature vector read from a container file.
    Vector { offset: usize, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub source: RecordSource,
    /// 0-based class index into [`CorpusManifest::class_names`].
    pub class: usize,
    pub subject: Option<String>,
    pub repetition: Option<u32>,
}

impl SampleRecord {
    /// File path or `container#offset`, for error messages.
    pub fn id(&self, manifest: &CorpusManifest) -> String {
        match &self.source {
            RecordSource::File(p) => p.display().to_string(),
            RecordSource::Inline { offset, .. } | RecordSource::Vector { offset, .. } => {
                format!("{}#{offset}", manifest.container_name())
            }
        }
    }
}

/// Resolved manifest: ordered classes and one record per sample, in
/// manifest order.
#[derive(Debug, Clone)]
pub struct CorpusManifest {
    pub root: PathBuf,
    pub layout: Layout,
    pub class_names: Vec<String>,
    pub records: Vec<SampleRecord>,
    pub features: FeatureConfig,
    container: Option<PathBuf>,
}

impl CorpusManifest {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base).map_err(|e| match e {
            Error::Manifest(m) => Error::Manifest(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Parse manifest text; relative paths resolve against `base`.
    pub fn from_toml(text: &str, base: &Path) -> Result<Self> {
        let raw: RawManifest = toml::from_str(text).map_err(|e| Error::Manifest(e.to_string()))?;
        raw.features.validate()?;
        let root = match &raw.root {
            Some(r) => base.join(r),
            None => base.to_path_buf(),
        };
        let pattern = match raw.filename_pattern.as_deref() {
            None => Some(pattern_regex("{subject}_{repetition}")?),
            Some("") => None,
            Some(p) => Some(pattern_regex(p)?),
        };
        let (class_names, records, container) = match raw.layout {
            Layout::ClassDirs => {
                let (c, r) = class_dirs(&root, raw.classes.as_deref(), raw.records.as_deref(), pattern.as_ref())?;
                (c, r, None)
            }
            Layout::IdxPair => {
                let idx = raw.idx.as_ref().ok_or_else(|| Error::Manifest("idx_pair layout needs an [idx] table".into()))?;
                let (c, r) = idx_pair(&root, idx, raw.classes.as_deref())?;
                (c, r, Some(idx.images.clone()))
            }
            Layout::CsvFlat => {
                let csv = raw.csv.as_ref().ok_or_else(|| Error::Manifest("csv_flat layout needs a [csv] table".into()))?;
                let precomputed = raw.features.kind == FeatureKind::Precomputed;
                let (c, r) = csv_flat(&root, csv, raw.classes.as_deref(), precomputed)?;
                (c, r, Some(csv.file.clone()))
            }
        };
        Ok(CorpusManifest {
            root,
            layout: raw.layout,
            class_names,
            records,
            features: raw.features,
            container,
        })
    }

    fn container_name(&self) -> String {
        self.container
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_default()
    }
}

/// Turn `{subject}` / `{repetition}` placeholders into an anchored regex
/// over file stems.
fn pattern_regex(pattern: &str) -> Result<Regex> {
    let mut re = String::from("^");
    let mut rest = pattern;
    while let Some(start) = rest.find('{') {
        re.push_str(&regex::escape(&rest[..start]));
        let end = rest[start..]
            .find('}')
            .ok_or_else(|| Error::Manifest(format!("unclosed placeholder in pattern {pattern:?}")))?
            + start;
        match &rest[start + 1..end] {
            "subject" => re.push_str("(?P<subject>.+?)"),
            "repetition" => re.push_str("(?P<repetition>\\d+)"),
            "any" => re.push_str(".*?"),
            other => {
                return Err(Error::Manifest(format!(
                    "unknown placeholder {{{other}}} in pattern {pattern:?}"
                )))
            }
        }
        rest = &rest[end + 1..];
    }
    re.push_str(&regex::escape(rest));
    re.push('$');
    Regex::new(&re).map_err(|e| Error::Manifest(format!("pattern {pattern:?}: {e}")))
}

fn parse_stem(re: Option<&Regex>, path: &Path) -> (Option<String>, Option<u32>) {
    let (Some(re), Some(stem)) = (re, path.file_stem().and_then(|s| s.to_str())) else {
        return (None, None);
    };
    match re.captures(stem) {
        Some(c) => (
            c.name("subject").map(|m| m.as_str().to_string()),
            c.name("repetition").and_then(|m| m.as_str().parse().ok()),
        ),
        None => (None, None),
    }
}

fn is_image(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(),
        Some("png" | "pgm" | "pbm" | "ppm" | "pnm")
    )
}

fn class_index(names: &[String], class: &str, context: &str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == class)
        .ok_or_else(|| Error::Manifest(format!("{context}: class {class:?} is not in the class list")))
}

fn class_dirs(
    root: &Path,
    classes: Option<&[String]>,
    explicit: Option<&[RawRecord]>,
    pattern: Option<&Regex>,
) -> Result<(Vec<String>, Vec<SampleRecord>)> {
    if let Some(recs) = explicit {
        let names: Vec<String> = match classes {
            Some(c) => c.to_vec(),
            None => {
                let mut seen: Vec<String> = Vec::new();
                for r in recs {
                    if !seen.contains(&r.class) {
                        seen.push(r.class.clone());
                    }
                }
                seen
            }
        };
        let records = recs
            .iter()
            .map(|r| {
                let full = root.join(&r.path);
                let (s, rep) = parse_stem(pattern, &r.path);
                Ok(SampleRecord {
                    class: class_index(&names, &r.class, &r.path.display().to_string())?,
                    subject: r.subject.clone().or(s),
                    repetition: r.repetition.or(rep),
                    source: RecordSource::File(full),
                })
            })
            .collect::<Result<_>>()?;
        return Ok((names, records));
    }

    let names: Vec<String> = match classes {
        Some(c) => c.to_vec(),
        None => {
            let entries = fs::read_dir(root).map_err(|e| Error::io(root, e))?;
            let mut dirs = Vec::new();
            for e in entries {
                let e = e.map_err(|e| Error::io(root, e))?;
                if e.path().is_dir() {
                    dirs.push(e.file_name().to_string_lossy().into_owned());
                }
            }
            dirs.sort();
            dirs
        }
    };
    if names.is_empty() {
        return Err(Error::Manifest(format!("no class directories under {}", root.display())));
    }
    let mut records = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let dir = root.join(name);
        let entries = fs::read_dir(&dir).map_err(|e| Error::Manifest(format!("class {name:?}: {}: {e}", dir.display())))?;
        let mut files: Vec<PathBuf> = Vec::new();
        for e in entries {
            let p = e.map_err(|e| Error::io(&dir, e))?.path();
            if p.is_file() && is_image(&p) {
                files.push(p);
            }
        }
        files.sort();
        for p in files {
            let (subject, repetition) = parse_stem(pattern, &p);
            records.push(SampleRecord {
                source: RecordSource::File(p),
                class: i,
                subject,
                repetition,
            });
        }
    }
    Ok((names, records))
}

/// Label text to class name: numeric labels lose trailing zeros so that
/// "6.0000" and "6" name the same class.
fn normalize_label(raw: &str) -> String {
    let t = raw.trim().trim_matches('"');
    match t.parse::<f64>() {
        Ok(v) if v.fract() == 0.0 && v.abs() < 1e15 => format!("{}", v as i64),
        _ => t.to_string(),
    }
}

/// Class names in explicit order, or sorted numerically when every label
/// is a number and lexically otherwise.
fn class_order(labels: &[String], explicit: Option<&[String]>) -> Vec<String> {
    if let Some(c) = explicit {
        return c.to_vec();
    }
    let mut uniq: Vec<String> = labels.to_vec();
    uniq.sort();
    uniq.dedup();
    if uniq.iter().all(|l| l.parse::<f64>().is_ok()) {
        uniq.sort_by(|a, b| a.parse::<f64>().unwrap().total_cmp(&b.parse::<f64>().unwrap()));
    }
    uniq
}

fn read_maybe_gz(path: &Path) -> Result<Vec<u8>> {
    let bytes = fs::read(path).map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
    if bytes.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        flate2::read::MultiGzDecoder::new(bytes.as_slice())
            .read_to_end(&mut out)
            .map_err(|e| Error::Decode {
                path: path.to_path_buf(),
                reason: format!("gzip: {e}"),
            })?;
        Ok(out)
    } else {
        Ok(bytes)
    }
}

/// Parse an idx header: returns dimensions and the payload offset.
fn idx_header(bytes: &[u8], path: &Path, dims_expected: usize) -> Result<(Vec<usize>, usize)> {
    let bad = |reason: String| Error::Decode {
        path: path.to_path_buf(),
        reason,
    };
    if bytes.len() < 4 || bytes[0] != 0 || bytes[1] != 0 {
        return Err(bad("not an idx file".into()));
    }
    if bytes[2] != 0x08 {
        return Err(bad(format!("unsupported idx element type 0x{:02x}", bytes[2])));
    }
    let nd = bytes[3] as usize;
    if nd != dims_expected {
        return Err(bad(format!("expected {dims_expected} dimensions, found {nd}")));
    }
    let head = 4 + 4 * nd;
    if bytes.len() < head {
        return Err(bad("truncated header".into()));
    }
    let dims: Vec<usize> = (0..nd)
        .map(|d| u32::from_be_bytes(bytes[4 + 4 * d..8 + 4 * d].try_into().unwrap()) as usize)
        .collect();
    let payload: usize = dims.iter().product();
    if bytes.len() - head != payload {
        return Err(bad(format!(
            "payload of {} bytes does not match dimensions {dims:?}",
            bytes.len() - head
        )));
    }
    Ok((dims, head))
}

fn idx_pair(root: &Path, idx: &RawIdx, classes: Option<&[String]>) -> Result<(Vec<String>, Vec<SampleRecord>)> {
    let img_path = root.join(&idx.images);
    let lbl_path = root.join(&idx.labels);
    let img = read_maybe_gz(&img_path)?;
    let lbl = read_maybe_gz(&lbl_path)?;
    let (idims, ihead) = idx_header(&img, &img_path, 3)?;
    let (ldims, lhead) = idx_header(&lbl, &lbl_path, 1)?;
    if idims[0] != ldims[0] {
        return Err(Error::Manifest(format!(
            "{} holds {} images but {} holds {} labels",
            img_path.display(),
            idims[0],
            lbl_path.display(),
            ldims[0]
        )));
    }
    let (h, w) = (idims[1], idims[2]);
    let labels: Vec<String> = lbl[lhead..].iter().map(|b| b.to_string()).collect();
    let names = class_order(&labels, classes);
    let mut records = Vec::with_capacity(labels.len());
    for (k, label) in labels.iter().enumerate() {
        let start = ihead + k * h * w;
        let image = GrayImage::new(w, h, img[start..start + h * w].to_vec())?;
        records.push(SampleRecord {
            source: RecordSource::Inline { offset: k, image },
            class: class_index(&names, label, &format!("{}#{k}", img_path.display()))?,
            subject: None,
            repetition: None,
        });
    }
    Ok((names, records))
}

fn resolve_column(col: i64, width: usize, what: &str) -> Result<usize> {
    let idx = if col < 0 { width as i64 + col } else { col };
    if idx < 0 || idx as usize >= width {
        return Err(Error::Manifest(format!("{what} {col} out of range for {width} columns")));
    }
    Ok(idx as usize)
}

/// With `precomputed`, each row's values are kept as a feature vector of
/// length `width·height` instead of being mapped to pixels.
fn csv_flat(
    root: &Path,
    csv: &RawCsv,
    classes: Option<&[String]>,
    precomputed: bool,
) -> Result<(Vec<String>, Vec<SampleRecord>)> {
    let path = root.join(&csv.file);
    let bytes = read_maybe_gz(&path)?;
    let text = String::from_utf8(bytes).map_err(|e| Error::Decode {
        path: path.clone(),
        reason: format!("not UTF-8 text: {e}"),
    })?;
    let [lo, hi] = csv.value_range;
    if !(hi > lo) {
        return Err(Error::Manifest(format!("value_range [{lo}, {hi}] is empty")));
    }
    let whitespace = csv.delimiter == "whitespace";
    let delim = if whitespace {
        ' '
    } else {
        let mut chars = csv.delimiter.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => c,
            _ => return Err(Error::Manifest(format!("delimiter {:?} is not one character", csv.delimiter))),
        }
    };
    let pixels = csv.width * csv.height;
    let mut rows: Vec<(String, Option<String>, Vec<f64>)> = Vec::new();
    let lines = text.lines().enumerate().skip(usize::from(csv.header));
    for (line_no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = if whitespace {
            line.split_whitespace().collect()
        } else {
            line.split(delim).map(str::trim).collect()
        };
        let at = |what: &str| format!("{} line {}: {what}", path.display(), line_no + 1);
        let label_col = resolve_column(csv.label_column, fields.len(), "label_column").map_err(|_| Error::Manifest(at("label column out of range")))?;
        let subject_col = csv
            .subject_column
            .map(|c| resolve_column(c, fields.len(), "subject_column"))
            .transpose()
            .map_err(|_| Error::Manifest(at("subject column out of range")))?;
        let mut values = Vec::with_capacity(pixels);
        for (c, f) in fields.iter().enumerate() {
            if c == label_col || Some(c) == subject_col {
                continue;
            }
            let v: f64 = f.parse().map_err(|_| Error::Decode {
                path: path.clone(),
                reason: at(&format!("field {f:?} is not a number")),
            })?;
            if !v.is_finite() {
                return Err(Error::Decode {
                    path: path.clone(),
                    reason: at(&format!("field {f:?} is not finite")),
                });
            }
            values.push(v);
        }
        if values.len() != pixels {
            return Err(Error::Decode {
                path: path.clone(),
                reason: at(&format!("{} pixel values, expected {pixels}", values.len())),
            });
        }
        let subject = subject_col.map(|c| fields[c].trim_matches('"').to_string());
        rows.push((normalize_label(fields[label_col]), subject, values));
    }
    let labels: Vec<String> = rows.iter().map(|r| r.0.clone()).collect();
    let names = class_order(&labels, classes);
    let mut records = Vec::with_capacity(rows.len());
    for (k, (label, subject, values)) in rows.into_iter().enumerate() {
        let source = if precomputed {
            RecordSource::Vector { offset: k, values }
        } else {
            let pixels = values
                .iter()
                .map(|&v| {
                    let mut t = ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
                    if csv.invert {
                        t = 1.0 - t;
                    }
                    (t * 255.0).round() as u8
                })
                .collect();
            RecordSource::Inline {
                offset: k,
                image: GrayImage::new(csv.width, csv.height, pixels)?,
            }
        };
        records.push(SampleRecord {
            class: class_index(&names, &label, &format!("{}#{k}", path.display()))?,
            source,
            subject,
            repetition: None,
        });
    }
    Ok((names, records))
}

/// Record count per class, in class order.
pub fn class_counts(manifest: &CorpusManifest) -> Vec<(String, usize)> {
    let mut counts = vec![0usize; manifest.class_names.len()];
    for r in &manifest.records {
        counts[r.class] += 1;
    }
    manifest.class_names.iter().cloned().zip(counts).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_extracts_subject_and_repetition() {
        let re = pattern_regex("{subject}_{repetition}").unwrap();
        assert_eq!(
            parse_stem(Some(&re), Path::new("x/writer_07_3.png")),
            (Some("writer_07".into()), Some(3))
        );
        assert_eq!(parse_stem(Some(&re), Path::new("plain.png")), (None, None));
        let re = pattern_regex("s{subject}-r{repetition}-{any}").unwrap();
        assert_eq!(
            parse_stem(Some(&re), Path::new("s12-r4-foo.pgm")),
            (Some("12".into()), Some(4))
        );
        assert!(pattern_regex("{who}").is_err());
    }

    #[test]
    fn labels_normalize_and_order() {
        assert_eq!(normalize_label("6.0000"), "6");
        assert_eq!(normalize_label(" 10 "), "10");
        assert_eq!(normalize_label("ten"), "ten");
        let order = class_order(&["10".into(), "2".into(), "1".into(), "2".into()], None);
        assert_eq!(order, vec!["1", "2", "10"]);
    }

    #[test]
    fn csv_whitespace_with_range() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("z.txt"), "1 -1 1 0 1\n0 1 -1 -1 -1\n").unwrap();
        let m = CorpusManifest::from_toml(
            r#"
layout = "csv_flat"
[csv]
file = "z.txt"
delimiter = "whitespace"
width = 2
height = 2
value_range = [-1.0, 1.0]
invert = true
"#,
            dir.path(),
        )
        .unwrap();
        assert_eq!(m.class_names, vec!["0", "1"]);
        assert_eq!(m.records.len(), 2);
        assert_eq!(m.records[0].class, 1);
        match &m.records[0].source {
            RecordSource::Inline { image, .. } => assert_eq!(image.data(), &[255, 0, 128, 0]),
            other => panic!("unexpected source {other:?}"),
        }
    }

    #[test]
    fn csv_label_last_with_header() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("d.csv"), "p0,p1,label\n0,255,a\n255,0,b\n").unwrap();
        let m = CorpusManifest::from_toml(
            "layout = \"csv_flat\"\n[csv]\nfile = \"d.csv\"\nwidth = 2\nheight = 1\nlabel_column = -1\nheader = true\n",
            dir.path(),
        )
        .unwrap();
        assert_eq!(m.class_names, vec!["a", "b"]);
        assert_eq!(m.records[1].id(&m), "d.csv#1");
    }

    #[test]
    fn csv_wrong_width_is_decode_error() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("d.csv"), "1,2,3\n").unwrap();
        let err = CorpusManifest::from_toml(
            "layout = \"csv_flat\"\n[csv]\nfile = \"d.csv\"\nwidth = 3\nheight = 1\n",
            dir.path(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Decode { .. }), "{err}");
    }

    #[test]
    fn csv_precomputed_vectors() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("v.csv"), "a,0.5,-2\nb,1e3,0\n").unwrap();
        let m = CorpusManifest::from_toml(
            "layout = \"csv_flat\"\n[features]\nkind = \"precomputed\"\n[csv]\nfile = \"v.csv\"\nwidth = 2\nheight = 1\n",
            dir.path(),
        )
        .unwrap();
        assert_eq!(m.records[1].source, RecordSource::Vector { offset: 1, values: vec![1e3, 0.0] });
    }

    #[test]
    fn idx_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut img = vec![0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0, 2];
        img.extend([10, 20, 30, 40]);
        let lbl = vec![0, 0, 8, 1, 0, 0, 0, 2, 7, 3];
        fs::write(dir.path().join("i"), img).unwrap();
        fs::write(dir.path().join("l"), lbl).unwrap();
        let m = CorpusManifest::from_toml(
            "layout = \"idx_pair\"\n[idx]\nimages = \"i\"\nlabels = \"l\"\n",
            dir.path(),
        )
        .unwrap();
        assert_eq!(m.class_names, vec!["3", "7"]);
        assert_eq!(m.records[0].class, 1);
        match &m.records[1].source {
            RecordSource::Inline { image, offset } => {
                assert_eq!(*offset, 1);
                assert_eq!(image.data(), &[30, 40]);
            }
            other => panic!("unexpected source {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = CorpusManifest::from_toml("layout = \"class_dirs\"\nbogus = 1\n", Path::new(".")).unwrap_err();
        assert!(matches!(err, Error::Manifest(_)));
    }

    #[test]
    fn explicit_record_with_unknown_class() {
        let err = CorpusManifest::from_toml(
            "layout = \"class_dirs\"\nclasses = [\"a\"]\n[[records]]\npath = \"x.png\"\nclass = \"b\"\n",
            Path::new("."),
        )
        .unwrap_err();
        assert!(err.to_string().contains("x.png"), "{err}");
    }
}
