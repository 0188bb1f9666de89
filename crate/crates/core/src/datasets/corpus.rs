use std::path::Path;
use std::time::Instant;

use ndarray::Array2;
use rayon::prelude::*;

use crate::dpl::ClassPartitionedDataset;
use crate::error::{Error, Result};
use crate::features::{FeatureConfig, FeatureKind};
use crate::preprocess::GrayImage;

use super::manifest::{CorpusManifest, RecordSource, SampleRecord};

/// A loaded corpus plus the samples dropped for having no foreground.
#[derive(Debug, Clone)]
pub struct LoadedCorpus {
    pub dataset: ClassPartitionedDataset,
    /// Record ids rejected as empty glyphs, in manifest order.
    pub rejects: Vec<String>,
}

/// Decode an image file to 8-bit grayscale.
pub fn decode_image(path: &Path) -> Result<GrayImage> {
    if !path.is_file() {
        return Err(Error::Manifest(format!("record {} does not exist", path.display())));
    }
    let img = image::open(path).map_err(|e| Error::Decode {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let luma = img.to_luma8();
    let (w, h) = luma.dimensions();
    GrayImage::new(w as usize, h as usize, luma.into_raw())
}

fn featurize(record: &SampleRecord, features: &FeatureConfig) -> Result<Option<(Vec<f64>, f64)>> {
    let img = match (&record.source, features.kind) {
        (RecordSource::Vector { values, .. }, FeatureKind::Precomputed) => return Ok(Some((values.clone(), 0.0))),
        (RecordSource::Vector { .. }, _) => {
            return Err(Error::InvalidConfig("precomputed vectors cannot go through image features".into()))
        }
        (_, FeatureKind::Precomputed) => {
            return Err(Error::InvalidConfig("image records need an image feature kind".into()))
        }
        (RecordSource::File(p), _) => decode_image(p)?,
        (RecordSource::Inline { image, .. }, _) => image.clone(),
    };
    let started = Instant::now();
    match features.extract(&img) {
        Ok(v) => Ok(Some((v, started.elapsed().as_secs_f64() * 1e3))),
        Err(Error::EmptyGlyph(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Decode and featurize every record with the manifest's feature config.
pub fn load_corpus(manifest: &CorpusManifest) -> Result<LoadedCorpus> {
    load_corpus_with(manifest, &manifest.features)
}

/// As [`load_corpus`] with a different feature config.
///
/// Columns follow manifest record order. Records whose glyph is empty are
/// skipped and listed in `rejects`; any other failure aborts the load.
pub fn load_corpus_with(manifest: &CorpusManifest, features: &FeatureConfig) -> Result<LoadedCorpus> {
    features.validate()?;
    let outcomes: Vec<Result<Option<(Vec<f64>, f64)>>> =
        manifest.records.par_iter().map(|r| featurize(r, features)).collect();

    let mut columns = Vec::new();
    let mut labels = Vec::new();
    let mut subjects = Vec::new();
    let mut repetitions = Vec::new();
    let mut rejects = Vec::new();
    let mut ms_total = 0.0;
    for (r, outcome) in manifest.records.iter().zip(outcomes) {
        match outcome.map_err(|e| annotate(e, r, manifest))? {
            Some((v, ms)) => {
                columns.push(v);
                labels.push(r.class);
                subjects.push(r.subject.clone());
                repetitions.push(r.repetition);
                ms_total += ms;
            }
            None => {
                log::warn!("skipping {}: glyph has no foreground pixels", r.id(manifest));
                rejects.push(r.id(manifest));
            }
        }
    }
    let count = columns.len();
    if count == 0 {
        return Err(Error::Manifest("corpus has no usable samples".into()));
    }
    let n = columns[0].len();
    if let Some(c) = columns.iter().find(|c| c.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: c.len(),
            context: "feature vector length",
        });
    }
    let mut x = Array2::zeros((n, count));
    for (j, col) in columns.into_iter().enumerate() {
        x.column_mut(j).assign(&ndarray::Array1::from(col));
    }
    let dataset = ClassPartitionedDataset::new(x, labels, manifest.class_names.clone())?
        .with_subjects(subjects)?
        .with_repetitions(repetitions)?
        .with_feature_config(*features)
        .with_extraction_ms((features.kind != FeatureKind::Precomputed).then(|| ms_total / count as f64));
    Ok(LoadedCorpus { dataset, rejects })
}

fn annotate(e: Error, r: &SampleRecord, manifest: &CorpusManifest) -> Error {
    match e {
        Error::EmptyGlyph(None) => Error::EmptyGlyph(Some(r.id(manifest))),
        Error::InvalidConfig(msg) => Error::InvalidConfig(format!("{}: {msg}", r.id(manifest))),
        other => other,
    }
}
