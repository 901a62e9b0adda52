//! TVSEQ: little-endian binary container for generated sequences.
//!
//! ```text
//! magic   "TVSQ"                 4 bytes
//! version u16 = 1
//! H       u16   frames
//! P       u16   views
//! D       u32   entries per view
//! P × (u8 length, UTF-8 view label)
//! u16 length, UTF-8 task id
//! H·P·D × f32, frame-major, views in declared order, components innermost
//! ```
//!
//! There is no padding. Values are stored as `f32`; a loaded sequence
//! re-saves to the identical bytes.

use std::path::Path;

use super::GeneratedSequence;
use crate::error::{Error, Result};
use crate::latent::{LatentVector, MultiViewLatent, ViewSet};

pub const MAGIC: &[u8; 4] = b"TVSQ";
pub const VERSION: u16 = 1;

pub fn encode_bytes(seq: &GeneratedSequence) -> Result<Vec<u8>> {
    let first = seq.frame(0);
    let dims = first.dims();
    let d = dims[0];
    if dims.iter().any(|&x| x != d) {
        return Err(Error::usage("TVSEQ needs every view to share one dimension"));
    }
    let views = seq.views();
    if views.len() > u16::MAX as usize || d > u32::MAX as usize {
        return Err(Error::usage("sequence shape does not fit the TVSEQ header"));
    }
    let task = seq.task_id().as_bytes();
    if task.len() > u16::MAX as usize {
        return Err(Error::usage("task id longer than 65535 bytes"));
    }

    let mut out = Vec::with_capacity(16 + seq.horizon() * views.len() * d * 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(seq.horizon() as u16).to_le_bytes());
    out.extend_from_slice(&(views.len() as u16).to_le_bytes());
    out.extend_from_slice(&(d as u32).to_le_bytes());
    for v in views.iter() {
        let label = v.as_str().as_bytes();
        if label.len() > u8::MAX as usize {
            return Err(Error::usage(format!("view label {v} longer than 255 bytes")));
        }
        out.push(label.len() as u8);
        out.extend_from_slice(label);
    }
    out.extend_from_slice(&(task.len() as u16).to_le_bytes());
    out.extend_from_slice(task);
    for frame in seq.frames() {
        for v in frame.vectors() {
            for &x in v.as_slice() {
                out.extend_from_slice(&(x as f32).to_le_bytes());
            }
        }
    }
    Ok(out)
}

pub fn save(seq: &GeneratedSequence, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_bytes(seq)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn load(path: impl AsRef<Path>) -> Result<GeneratedSequence> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::format(
                self.pos,
                format!(
                    "truncated {what}: need {n} bytes, {} left",
                    self.buf.len() - self.pos
                ),
            ));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn utf8(&mut self, len: usize, what: &str) -> Result<String> {
        let at = self.pos;
        let raw = self.take(len, what)?;
        String::from_utf8(raw.to_vec()).map_err(|_| Error::format(at, format!("{what} is not UTF-8")))
    }
}

pub fn decode(bytes: &[u8]) -> Result<GeneratedSequence> {
    let mut c = Cursor { buf: bytes, pos: 0 };
    if c.take(4, "magic")? != MAGIC {
        return Err(Error::format(0, "bad magic, expected \"TVSQ\""));
    }
    let version = c.u16("version")?;
    if version != VERSION {
        return Err(Error::format(4, format!("unsupported version {version}")));
    }
    let h = c.u16("frame count")? as usize;
    if h < 2 {
        return Err(Error::format(6, format!("frame count {h} below 2")));
    }
    let p = c.u16("view count")? as usize;
    if p == 0 {
        return Err(Error::format(8, "view count is zero"));
    }
    let d = c.u32("dimension")? as usize;
    if d == 0 {
        return Err(Error::format(10, "dimension is zero"));
    }

    let mut labels = Vec::with_capacity(p);
    for _ in 0..p {
        let at = c.pos;
        let len = c.u8("view label length")? as usize;
        if len == 0 {
            return Err(Error::format(at, "empty view label"));
        }
        labels.push(c.utf8(len, "view label")?);
    }
    let labels_at = c.pos;
    let views = ViewSet::new(labels).map_err(|e| Error::format(labels_at, e.to_string()))?;
    let task_len = c.u16("task id length")? as usize;
    let task_id = c.utf8(task_len, "task id")?;

    let payload_at = c.pos;
    let expected = h
        .checked_mul(p)
        .and_then(|x| x.checked_mul(d))
        .and_then(|x| x.checked_mul(4))
        .ok_or_else(|| Error::format(6, "header shape overflows"))?;
    let remaining = bytes.len() - payload_at;
    if remaining != expected {
        return Err(Error::format(
            payload_at,
            format!("payload has {remaining} bytes, header H={h} P={p} D={d} needs {expected}"),
        ));
    }

    let mut frames = Vec::with_capacity(h);
    for _ in 0..h {
        let mut vectors = Vec::with_capacity(p);
        for _ in 0..p {
            let mut values = Vec::with_capacity(d);
            for _ in 0..d {
                let at = c.pos;
                let x = f32::from_le_bytes(c.take(4, "payload")?.try_into().unwrap());
                if !x.is_finite() {
                    return Err(Error::format(at, format!("non-finite value {x}")));
                }
                values.push(x as f64);
            }
            vectors.push(LatentVector::new(values).expect("checked finite"));
        }
        frames.push(MultiViewLatent::new(views.clone(), vectors).expect("P vectors"));
    }
    GeneratedSequence::new(task_id, frames).map_err(|e| Error::format(payload_at, e.to_string()))
}
