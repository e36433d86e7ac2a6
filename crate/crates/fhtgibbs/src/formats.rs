//! Binary sample (`GLS1`) and model (`FHT1`) files. All integers are u64 and
//! all reals f64, little-endian.
//!
//! Samples: magic, `d`, `count`, `flags`, then `count * d` values row-major,
//! then `count` weights when bit 0 of `flags` is set.
//!
//! Models: magic, `d`, tree levels, basis size `n`, half-width, site-order
//! tag; the ranks of the `2d - 2` tree edges in level order; then every core
//! in the same node order (root first) as a shape triple and its row-major
//! values.

use fhtgibbs_core::fht::{build_tree, Core, FhtModel, FourierBasis, SiteOrder};
use fhtgibbs_core::ParticleEnsemble;

pub const SAMPLE_MAGIC: &[u8; 4] = b"GLS1";
pub const MODEL_MAGIC: &[u8; 4] = b"FHT1";
pub const FLAG_WEIGHTS: u64 = 1;
pub const SAMPLE_HEADER_LEN: usize = 4 + 3 * 8;
pub const MODEL_HEADER_LEN: usize = 4 + 5 * 8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormatError {
    #[error("bad magic {found:?}, expected {expected:?}")]
    BadMagic { found: [u8; 4], expected: [u8; 4] },
    #[error("truncated at byte {offset}: need {needed} more bytes for {field}")]
    Truncated {
        offset: usize,
        needed: usize,
        field: &'static str,
    },
    #[error("{0} trailing bytes after the last field")]
    Trailing(usize),
    #[error("invalid {field} at byte {offset}: {reason}")]
    Invalid {
        field: &'static str,
        offset: usize,
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub samples: ParticleEnsemble,
    pub weights: Option<Vec<f64>>,
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize, field: &'static str) -> Result<&'a [u8], FormatError> {
        let rest = self.bytes.len() - self.pos;
        if rest < len {
            return Err(FormatError::Truncated {
                offset: self.pos,
                needed: len - rest,
                field,
            });
        }
        let s = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn magic(&mut self, expected: &[u8; 4]) -> Result<(), FormatError> {
        let m = self.take(4, "magic")?;
        if m != expected {
            return Err(FormatError::BadMagic {
                found: m.try_into().unwrap(),
                expected: *expected,
            });
        }
        Ok(())
    }

    fn u64(&mut self, field: &'static str) -> Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.take(8, field)?.try_into().unwrap()))
    }

    fn usize(&mut self, field: &'static str) -> Result<usize, FormatError> {
        let offset = self.pos;
        let v = self.u64(field)?;
        usize::try_from(v).map_err(|_| FormatError::Invalid {
            field,
            offset,
            reason: format!("{v} too large"),
        })
    }

    fn f64(&mut self, field: &'static str) -> Result<f64, FormatError> {
        Ok(f64::from_le_bytes(self.take(8, field)?.try_into().unwrap()))
    }

    fn f64s(&mut self, count: usize, field: &'static str) -> Result<Vec<f64>, FormatError> {
        let len = count.checked_mul(8).ok_or(FormatError::Invalid {
            field,
            offset: self.pos,
            reason: format!("{count} values overflow"),
        })?;
        let raw = self.take(len, field)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn finish(self) -> Result<(), FormatError> {
        match self.bytes.len() - self.pos {
            0 => Ok(()),
            n => Err(FormatError::Trailing(n)),
        }
    }
}

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_f64s(out: &mut Vec<u8>, v: &[f64]) {
    for x in v {
        out.extend_from_slice(&x.to_le_bytes());
    }
}

pub fn encode_samples(samples: &ParticleEnsemble, weights: Option<&[f64]>) -> Vec<u8> {
    let mut out = Vec::with_capacity(SAMPLE_HEADER_LEN + 8 * samples.as_flat().len());
    out.extend_from_slice(SAMPLE_MAGIC);
    put_u64(&mut out, samples.dim() as u64);
    put_u64(&mut out, samples.len() as u64);
    put_u64(&mut out, if weights.is_some() { FLAG_WEIGHTS } else { 0 });
    put_f64s(&mut out, samples.as_flat());
    if let Some(w) = weights {
        put_f64s(&mut out, w);
    }
    out
}

pub fn decode_samples(bytes: &[u8]) -> Result<SampleSet, FormatError> {
    let mut r = Reader { bytes, pos: 0 };
    r.magic(SAMPLE_MAGIC)?;
    let d_at = r.pos;
    let d = r.usize("dimension")?;
    if d == 0 {
        return Err(FormatError::Invalid {
            field: "dimension",
            offset: d_at,
            reason: "zero".into(),
        });
    }
    let count = r.usize("count")?;
    let flags_at = r.pos;
    let flags = r.u64("flags")?;
    if flags & !FLAG_WEIGHTS != 0 {
        return Err(FormatError::Invalid {
            field: "flags",
            offset: flags_at,
            reason: format!("unknown bits {flags:#x}"),
        });
    }
    let total = count.checked_mul(d).ok_or(FormatError::Invalid {
        field: "count",
        offset: d_at,
        reason: "count * dimension overflows".into(),
    })?;
    let data = r.f64s(total, "samples")?;
    let weights = if flags & FLAG_WEIGHTS != 0 {
        Some(r.f64s(count, "weights")?)
    } else {
        None
    };
    r.finish()?;
    let samples = ParticleEnsemble::from_flat(d, data).expect("length checked");
    Ok(SampleSet { samples, weights })
}

pub fn encode_model(model: &FhtModel) -> Vec<u8> {
    let mut out = Vec::new();
    let tree = model.tree();
    let basis = model.basis();
    out.extend_from_slice(MODEL_MAGIC);
    put_u64(&mut out, tree.dim() as u64);
    put_u64(&mut out, tree.levels() as u64);
    put_u64(&mut out, basis.len() as u64);
    out.extend_from_slice(&basis.half_width().to_le_bytes());
    put_u64(&mut out, tree.site_order().tag());
    for r in model.ranks() {
        put_u64(&mut out, r as u64);
    }
    for c in model.cores() {
        for s in c.shape() {
            put_u64(&mut out, s as u64);
        }
        put_f64s(&mut out, c.data());
    }
    out
}

pub fn decode_model(bytes: &[u8]) -> Result<FhtModel, FormatError> {
    let mut r = Reader { bytes, pos: 0 };
    r.magic(MODEL_MAGIC)?;
    let d_at = r.pos;
    let d = r.usize("dimension")?;
    let levels_at = r.pos;
    let levels = r.usize("levels")?;
    let n_at = r.pos;
    let n = r.usize("basis size")?;
    let w_at = r.pos;
    let half_width = r.f64("half-width")?;
    let order_at = r.pos;
    let tag = r.u64("site order")?;
    let order = SiteOrder::from_tag(tag).ok_or(FormatError::Invalid {
        field: "site order",
        offset: order_at,
        reason: format!("unknown tag {tag}"),
    })?;
    if levels >= usize::BITS as usize || d != 1usize << levels {
        return Err(FormatError::Invalid {
            field: "levels",
            offset: levels_at,
            reason: format!("dimension {d} is not 2^{levels}"),
        });
    }
    let tree = build_tree(d, order).map_err(|e| FormatError::Invalid {
        field: "dimension",
        offset: d_at,
        reason: e.to_string(),
    })?;
    if n % 2 == 0 {
        return Err(FormatError::Invalid {
            field: "basis size",
            offset: n_at,
            reason: format!("{n} is even"),
        });
    }
    let basis = FourierBasis::new(n / 2, half_width).map_err(|e| FormatError::Invalid {
        field: "half-width",
        offset: w_at,
        reason: e.to_string(),
    })?;
    let ranks_at = r.pos;
    let mut ranks = Vec::with_capacity(2 * d - 2);
    for _ in 0..2 * d - 2 {
        ranks.push(r.usize("ranks")?);
    }
    let mut cores = Vec::with_capacity(2 * d - 1);
    for q in 0..2 * d - 1 {
        let at = r.pos;
        let shape = [
            r.usize("core shape")?,
            r.usize("core shape")?,
            r.usize("core shape")?,
        ];
        let len = shape
            .iter()
            .try_fold(1usize, |a, &s| a.checked_mul(s))
            .ok_or(FormatError::Invalid {
                field: "core shape",
                offset: at,
                reason: format!("{shape:?} overflows"),
            })?;
        let data = r.f64s(len, "core values")?;
        cores.push(Core::new(shape, data).map_err(|e| FormatError::Invalid {
            field: "core shape",
            offset: at,
            reason: format!("node {q}: {e}"),
        })?);
    }
    r.finish()?;
    let model = FhtModel::new(tree, basis, cores).map_err(|e| FormatError::Invalid {
        field: "cores",
        offset: ranks_at,
        reason: e.to_string(),
    })?;
    if model.ranks() != ranks {
        return Err(FormatError::Invalid {
            field: "ranks",
            offset: ranks_at,
            reason: format!(
                "header ranks {ranks:?} disagree with core shapes {:?}",
                model.ranks()
            ),
        });
    }
    Ok(model)
}
