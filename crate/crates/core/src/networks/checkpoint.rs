//! Flat binary parameter checkpoints.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic "PSCK" | version u32 | sha256(spec) [32 bytes] | count u32
//! count × ( name_len u32 | name utf-8 | rank u32 | dims u64 × rank | f64 × Π dims )
//! ```

use std::path::Path;

use indexmap::IndexMap;
use sha2::{Digest, Sha256};

use super::build::Network;
use super::spec::NetworkSpec;
use crate::autodiff::Tensor;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"PSCK";
pub const VERSION: u32 = 1;

pub fn spec_hash(spec: &NetworkSpec) -> [u8; 32] {
    Sha256::digest(spec.canonical().as_bytes()).into()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub spec_hash: [u8; 32],
    pub tensors: IndexMap<String, Tensor>,
}

pub fn encode_checkpoint(net: &Network) -> Vec<u8> {
    let g = net.graph();
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&spec_hash(net.spec()));
    let names: Vec<&str> = g.param_names().collect();
    out.extend_from_slice(&(names.len() as u32).to_le_bytes());
    for name in names {
        let t = g.param_value(name).expect("listed parameter");
        out.extend_from_slice(&(name.len() as u32).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
        out.extend_from_slice(&(t.rank() as u32).to_le_bytes());
        for &d in t.shape() {
            out.extend_from_slice(&(d as u64).to_le_bytes());
        }
        for v in t.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Format("checkpoint is truncated".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

pub fn decode_checkpoint(bytes: &[u8]) -> Result<Checkpoint> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::Format("not a checkpoint file".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported checkpoint version {version}")));
    }
    let spec_hash: [u8; 32] = r.take(32)?.try_into().expect("32 bytes");
    let count = r.u32()?;
    let mut tensors = IndexMap::new();
    for _ in 0..count {
        let len = r.u32()? as usize;
        let name = std::str::from_utf8(r.take(len)?)
            .map_err(|_| Error::Format("parameter name is not utf-8".into()))?
            .to_string();
        let rank = r.u32()? as usize;
        let shape = (0..rank)
            .map(|_| r.u64().map(|d| d as usize))
            .collect::<Result<Vec<_>>>()?;
        let n = shape.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
        let n = n.ok_or_else(|| Error::Format("tensor size overflows".into()))?;
        let raw = r.take(n.checked_mul(8).ok_or_else(|| Error::Format("tensor size overflows".into()))?)?;
        let data = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        let t = Tensor::new(shape, data).map_err(|e| Error::Format(e.to_string()))?;
        tensors.insert(name, t);
    }
    if r.pos != bytes.len() {
        return Err(Error::Format("trailing bytes after checkpoint".into()));
    }
    Ok(Checkpoint { spec_hash, tensors })
}

/// Loads decoded tensors into `net`, which must have been built from the
/// same spec.
pub fn restore_checkpoint(net: &mut Network, ck: &Checkpoint) -> Result<()> {
    if ck.spec_hash != spec_hash(net.spec()) {
        return Err(Error::Format("checkpoint was written for a different network".into()));
    }
    let names: Vec<String> = net.graph().param_names().map(str::to_string).collect();
    if names.len() != ck.tensors.len() || names.iter().any(|n| !ck.tensors.contains_key(n)) {
        return Err(Error::Format("checkpoint parameters do not match the network".into()));
    }
    for name in names {
        net.graph_mut().set_param(&name, ck.tensors[&name].clone())?;
    }
    Ok(())
}

pub fn save_checkpoint(net: &Network, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_checkpoint(net)).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(net: &mut Network, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    restore_checkpoint(net, &decode_checkpoint(&bytes)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::networks::build;

    #[test]
    fn round_trip_is_exact() {
        let spec = NetworkSpec::pi_ncp(2, 8, 3, 1, vec![1, 2]);
        let a = build(&spec, 1).unwrap();
        let mut b = build(&spec, 2).unwrap();
        assert_ne!(a.graph().flat_params(), b.graph().flat_params());
        let bytes = encode_checkpoint(&a);
        restore_checkpoint(&mut b, &decode_checkpoint(&bytes).unwrap()).unwrap();
        assert_eq!(a.graph().flat_params(), b.graph().flat_params());
        assert_eq!(encode_checkpoint(&b), bytes);
    }

    #[test]
    fn header_layout() {
        let net = build(&NetworkSpec::mlp(1, 2, 1, 1), 0).unwrap();
        let bytes = encode_checkpoint(&net);
        assert_eq!(&bytes[..4], MAGIC);
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), VERSION);
        assert_eq!(&bytes[8..40], &spec_hash(net.spec()));
        assert_eq!(u32::from_le_bytes(bytes[40..44].try_into().unwrap()), 2);
        // W1 [1,1] and b1 [1]: 4+2+4+16+8 and 4+2+4+8+8 bytes
        assert_eq!(bytes.len(), 44 + 34 + 26);
    }

    #[test]
    fn mismatches_and_corruption_are_format_errors() {
        let a = build(&NetworkSpec::mlp(1, 4, 2, 1), 0).unwrap();
        let mut other = build(&NetworkSpec::mlp(1, 4, 3, 1), 0).unwrap();
        let bytes = encode_checkpoint(&a);
        let ck = decode_checkpoint(&bytes).unwrap();
        assert!(matches!(restore_checkpoint(&mut other, &ck), Err(Error::Format(_))));
        assert!(matches!(decode_checkpoint(&bytes[..bytes.len() - 1]), Err(Error::Format(_))));
        assert!(matches!(decode_checkpoint(b"nope"), Err(Error::Format(_))));
    }
}
