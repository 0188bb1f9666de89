//! Binary model container.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic       8 bytes  "LPDPLMDL"
//! version     u32      1
//! features    u8 preprocess, u8 kind, u32 cell_size, u32 num_bins,
//!             u8 signed, u8 binning, u8 normalization
//! hyper       u64 m, f64 lambda1, f64 lambda2, f64 lambda3, f64 gamma,
//!             f64 rho, u64 outer_iters, u64 admm_iters, f64 admm_tol,
//!             f64 tol, u8 code_update
//! shape       u64 n, u64 m, u64 q
//! classes     q × (u32 byte length, UTF-8 name)
//! per class   P, D, W, each as u64 rows, u64 cols, rows·cols f64 row-major
//! checksum    32 bytes SHA-256 of everything above
//! ```

use std::fs;
use std::io::{Cursor, Read};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use ndarray::Array2;
use sha2::{Digest, Sha256};

use crate::dpl::{ClassModel, CodeUpdate, Hyperparameters};
use crate::error::{Error, Result};
use crate::features::{FeatureConfig, FeatureKind, PreprocessMode};
use crate::hog::{Binning, HogConfig, Normalization};
use crate::model::TrainedModel;

pub const MAGIC: &[u8; 8] = b"LPDPLMDL";
pub const FORMAT_VERSION: u32 = 1;
const CHECKSUM_LEN: usize = 32;

fn preprocess_code(p: PreprocessMode) -> u8 {
    match p {
        PreprocessMode::Pipeline => 0,
        PreprocessMode::ResizeBinarize => 1,
        PreprocessMode::Grayscale => 2,
    }
}

fn kind_code(k: FeatureKind) -> u8 {
    match k {
        FeatureKind::Hog => 0,
        FeatureKind::RawPixels => 1,
        FeatureKind::Precomputed => 2,
    }
}

fn write_matrix(buf: &mut Vec<u8>, m: &Array2<f64>) {
    buf.write_u64::<LE>(m.nrows() as u64).unwrap();
    buf.write_u64::<LE>(m.ncols() as u64).unwrap();
    for &v in m.iter() {
        buf.write_f64::<LE>(v).unwrap();
    }
}

/// Serialized bytes of `model`, checksum included.
pub fn encode_model(model: &TrainedModel) -> Vec<u8> {
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.write_u32::<LE>(FORMAT_VERSION).unwrap();

    let f = model.features();
    buf.push(preprocess_code(f.preprocess));
    buf.push(kind_code(f.kind));
    buf.write_u32::<LE>(f.hog.cell_size as u32).unwrap();
    buf.write_u32::<LE>(f.hog.num_bins as u32).unwrap();
    buf.push(u8::from(f.hog.signed));
    buf.push(match f.hog.binning {
        Binning::Interpolated => 0,
        Binning::Hard => 1,
    });
    buf.push(match f.hog.normalization {
        Normalization::Global => 0,
        Normalization::PerCell => 1,
    });

    let hp = model.hyperparameters();
    buf.write_u64::<LE>(hp.m as u64).unwrap();
    for v in [hp.lambda1, hp.lambda2, hp.lambda3, hp.gamma, hp.rho] {
        buf.write_f64::<LE>(v).unwrap();
    }
    buf.write_u64::<LE>(hp.outer_iters as u64).unwrap();
    buf.write_u64::<LE>(hp.admm_iters as u64).unwrap();
    buf.write_f64::<LE>(hp.admm_tol).unwrap();
    buf.write_f64::<LE>(hp.tol).unwrap();
    buf.push(match hp.code_update {
        CodeUpdate::Corrected => 0,
        CodeUpdate::Printed => 1,
    });

    buf.write_u64::<LE>(model.feature_len() as u64).unwrap();
    buf.write_u64::<LE>(model.atoms() as u64).unwrap();
    buf.write_u64::<LE>(model.num_classes() as u64).unwrap();
    for name in model.class_names() {
        buf.write_u32::<LE>(name.len() as u32).unwrap();
        buf.extend_from_slice(name.as_bytes());
    }
    for c in model.classes() {
        write_matrix(&mut buf, &c.p);
        write_matrix(&mut buf, &c.d);
        write_matrix(&mut buf, &c.w);
    }
    let digest = Sha256::digest(&buf);
    buf.extend_from_slice(&digest);
    buf
}

pub fn save_model(model: &TrainedModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_model(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TrainedModel> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_model(&bytes)
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptModel(msg.into())
}

fn truncated(_: std::io::Error) -> Error {
    corrupt("truncated")
}

/// Dimension read from the file, capped so a corrupt header cannot ask for
/// absurd allocations.
fn read_dim(r: &mut Cursor<&[u8]>, remaining: usize) -> Result<usize> {
    let v = r.read_u64::<LE>().map_err(truncated)?;
    if v > remaining as u64 {
        return Err(corrupt(format!("dimension {v} exceeds file size")));
    }
    Ok(v as usize)
}

fn read_matrix(r: &mut Cursor<&[u8]>, len: usize, expect: (usize, usize), what: &str) -> Result<Array2<f64>> {
    let rows = read_dim(r, len)?;
    let cols = read_dim(r, len)?;
    if (rows, cols) != expect {
        return Err(corrupt(format!(
            "{what} is {rows}×{cols}, header implies {}×{}",
            expect.0, expect.1
        )));
    }
    let count = rows.checked_mul(cols).ok_or_else(|| corrupt("matrix size overflow"))?;
    if count.saturating_mul(8) > len.saturating_sub(r.position() as usize) {
        return Err(corrupt("truncated"));
    }
    let mut data = vec![0.0; count];
    r.read_f64_into::<LE>(&mut data).map_err(truncated)?;
    Ok(Array2::from_shape_vec((rows, cols), data).expect("length checked"))
}

fn read_flag(r: &mut Cursor<&[u8]>, max: u8, what: &str) -> Result<u8> {
    let v = r.read_u8().map_err(truncated)?;
    if v > max {
        return Err(corrupt(format!("invalid {what} code {v}")));
    }
    Ok(v)
}

/// Parse bytes produced by [`encode_model`].
pub fn decode_model(bytes: &[u8]) -> Result<TrainedModel> {
    if bytes.len() < MAGIC.len() + 4 + CHECKSUM_LEN {
        return Err(corrupt("truncated"));
    }
    if &bytes[..MAGIC.len()] != MAGIC {
        return Err(corrupt("not a model file (bad magic)"));
    }
    let (body, stored) = bytes.split_at(bytes.len() - CHECKSUM_LEN);
    if Sha256::digest(body).as_slice() != stored {
        return Err(corrupt("checksum mismatch"));
    }
    let len = body.len();
    let mut r = Cursor::new(body);
    r.set_position(MAGIC.len() as u64);
    let version = r.read_u32::<LE>().map_err(truncated)?;
    if version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            found: version,
            expected: FORMAT_VERSION,
        });
    }

    let preprocess = match read_flag(&mut r, 2, "preprocess")? {
        0 => PreprocessMode::Pipeline,
        1 => PreprocessMode::ResizeBinarize,
        _ => PreprocessMode::Grayscale,
    };
    let kind = match read_flag(&mut r, 2, "feature kind")? {
        0 => FeatureKind::Hog,
        1 => FeatureKind::RawPixels,
        _ => FeatureKind::Precomputed,
    };
    let cell_size = r.read_u32::<LE>().map_err(truncated)? as usize;
    let num_bins = r.read_u32::<LE>().map_err(truncated)? as usize;
    let signed = read_flag(&mut r, 1, "signed")? == 1;
    let binning = if read_flag(&mut r, 1, "binning")? == 0 { Binning::Interpolated } else { Binning::Hard };
    let normalization = if read_flag(&mut r, 1, "normalization")? == 0 { Normalization::Global } else { Normalization::PerCell };
    let features = FeatureConfig {
        preprocess,
        kind,
        hog: HogConfig {
            cell_size,
            num_bins,
            signed,
            binning,
            normalization,
        },
    };
    features.validate().map_err(|e| corrupt(format!("feature config: {e}")))?;

    let m = read_dim(&mut r, len)?;
    let mut f = [0.0; 5];
    for v in &mut f {
        *v = r.read_f64::<LE>().map_err(truncated)?;
    }
    let outer_iters = r.read_u64::<LE>().map_err(truncated)? as usize;
    let admm_iters = r.read_u64::<LE>().map_err(truncated)? as usize;
    let admm_tol = r.read_f64::<LE>().map_err(truncated)?;
    let tol = r.read_f64::<LE>().map_err(truncated)?;
    let code_update = if read_flag(&mut r, 1, "code update")? == 0 { CodeUpdate::Corrected } else { CodeUpdate::Printed };
    let hp = Hyperparameters {
        m,
        lambda1: f[0],
        lambda2: f[1],
        lambda3: f[2],
        gamma: f[3],
        rho: f[4],
        outer_iters,
        admm_iters,
        admm_tol,
        tol,
        code_update,
    };

    let n = read_dim(&mut r, len)?;
    let atoms = read_dim(&mut r, len)?;
    let q = read_dim(&mut r, len)?;
    if atoms != m {
        return Err(corrupt(format!("header m = {m} but shape says {atoms} atoms")));
    }
    let mut names = Vec::with_capacity(q);
    for _ in 0..q {
        let l = r.read_u32::<LE>().map_err(truncated)? as usize;
        if l > len {
            return Err(corrupt("class name longer than file"));
        }
        let mut raw = vec![0u8; l];
        r.read_exact(&mut raw).map_err(truncated)?;
        names.push(String::from_utf8(raw).map_err(|_| corrupt("class name is not UTF-8"))?);
    }
    let mut classes = Vec::with_capacity(q);
    for _ in 0..q {
        let p = read_matrix(&mut r, len, (m, n), "P")?;
        let d = read_matrix(&mut r, len, (n, m), "D")?;
        let w = read_matrix(&mut r, len, (q, m), "W")?;
        classes.push(ClassModel { p, d, w });
    }
    if r.position() as usize != len {
        return Err(corrupt("trailing bytes after class matrices"));
    }
    TrainedModel::new(names, hp, features, classes).map_err(|e| corrupt(e.to_string()))
}
