//! Binary parameter checkpoints with a JSON sidecar.
//!
//! Layout (little-endian): magic `MFCK`, `u32` version, `u32` tensor count,
//! then per tensor `u32` name length, UTF-8 name, `u64` rows, `u64` cols and
//! `rows * cols` `f64` values. The sidecar `<file>.json` holds the encoder
//! configuration, threshold and training parameters.

use std::path::{Path, PathBuf};

use motif_forge_core::encoder::{EncoderConfig, EncoderModel, TrainConfig};
use motif_forge_core::tensor::Tensor;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::write_file;

pub const MAGIC: &[u8; 4] = b"MFCK";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub format_version: u32,
    pub encoder: EncoderConfig,
    pub threshold: f64,
    pub train: Option<TrainConfig>,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn encode_tensors<'a>(tensors: impl ExactSizeIterator<Item = (&'a str, &'a Tensor)>) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(tensors.len() as u32).to_le_bytes());
    for (name, t) in tensors {
        out.extend_from_slice(&(name.len() as u32).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
        out.extend_from_slice(&(t.rows() as u64).to_le_bytes());
        out.extend_from_slice(&(t.cols() as u64).to_le_bytes());
        for x in t.data() {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> std::result::Result<&[u8], String> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or("truncated file")?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> std::result::Result<u32, String> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> std::result::Result<u64, String> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn decode_tensors(bytes: &[u8]) -> std::result::Result<Vec<(String, Tensor)>, String> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err("bad magic".into());
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(format!("unsupported version {version}"));
    }
    let count = r.u32()?;
    let mut out = Vec::new();
    for _ in 0..count {
        let len = r.u32()? as usize;
        let name = String::from_utf8(r.take(len)?.to_vec()).map_err(|_| "tensor name is not UTF-8")?;
        let rows = r.u64()? as usize;
        let cols = r.u64()? as usize;
        let n = rows.checked_mul(cols).ok_or("tensor too large")?;
        let raw = r.take(n.checked_mul(8).ok_or("tensor too large")?)?;
        let data = raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        out.push((name, Tensor::from_vec(rows, cols, data).map_err(|e| e.to_string())?));
    }
    if r.pos != bytes.len() {
        return Err("trailing bytes".into());
    }
    Ok(out)
}

pub fn save(path: &Path, model: &EncoderModel, train: Option<&TrainConfig>) -> Result<()> {
    write_file(path, encode_tensors(model.named_params().collect::<Vec<_>>().into_iter()))?;
    let sidecar = Sidecar { format_version: VERSION, encoder: *model.config(), threshold: model.threshold, train: train.cloned() };
    let json = serde_json::to_string_pretty(&sidecar).expect("serialisable");
    write_file(&sidecar_path(path), json + "\n")
}

pub fn load(path: &Path) -> Result<(EncoderModel, Sidecar)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let bad = |message: String| Error::Checkpoint { path: path.to_path_buf(), message };
    let tensors = decode_tensors(&bytes).map_err(bad)?;
    let side_path = sidecar_path(path);
    let text = std::fs::read_to_string(&side_path).map_err(|e| Error::io(&side_path, e))?;
    let sidecar: Sidecar = serde_json::from_str(&text).map_err(|source| Error::Json { path: side_path, source })?;
    let model = EncoderModel::from_parts(sidecar.encoder, tensors, sidecar.threshold).map_err(|e| bad(e.to_string()))?;
    Ok((model, sidecar))
}
