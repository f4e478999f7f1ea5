//! Length-prefixed binary proof frames: one-byte kind tag, little-endian
//! u32 payload length, payload. The verifier processes one frame at a time
//! and never retains it.

use num_bigint::{BigInt, BigUint, Sign};
use thiserror::Error;

#[derive(Debug, Error)]
#[error("frame decode error: {0}")]
pub struct FrameError(pub String);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Frame {
    /// Opening claim: is the graph k-connected?
    Claim { connected: bool },
    /// Cut disclosure for the negative branch. `cut_vertices` is used in
    /// vertex mode, `cut_edges` in edge mode; `side` is one side S of the
    /// resulting cut.
    CutDeclare { cut_vertices: Vec<u32>, cut_edges: Vec<(u32, u32)>, side: Vec<u32> },
    /// A chunk of the upfront support disclosure: (edge slot, signed
    /// multiplicity), positive block first, each block ascending by slot.
    Disclose { entries: Vec<(u64, BigInt)> },
    /// End of the upfront disclosure.
    DiscloseEnd,
    /// Seed from which both parties derive the layer sets.
    LayerSeed { seed: u64 },
    /// Start of one terminal's layered proof.
    TerminalStart { terminal: u32 },
    /// Start of one terminal-set proof (gap scheme), sets in fixed order.
    SetStart { index: u8 },
    /// Start of one vertex group: the vertex, its layer, and the sorted
    /// disjointness disclosure (vertex ids in vertex mode, edge slots in
    /// edge mode).
    VertexStart { vertex: u32, layer: u32, disclosure: Vec<u64> },
    /// One path, as its vertex sequence plus one claimed frequency sign per
    /// edge (false = positive).
    Path { vertices: Vec<u32>, negative: Vec<bool> },
    /// End of the current terminal or set proof.
    TerminalEnd,
    /// Residual multiplicities left in the scaled sign samplers:
    /// (slot, is_negative, count).
    Residual { entries: Vec<(u64, bool, BigUint)> },
    /// End of the proof.
    End,
}

impl Frame {
    fn kind(&self) -> u8 {
        match self {
            Frame::Claim { .. } => 0x01,
            Frame::CutDeclare { .. } => 0x02,
            Frame::Disclose { .. } => 0x03,
            Frame::DiscloseEnd => 0x04,
            Frame::LayerSeed { .. } => 0x05,
            Frame::TerminalStart { .. } => 0x06,
            Frame::SetStart { .. } => 0x07,
            Frame::VertexStart { .. } => 0x08,
            Frame::Path { .. } => 0x09,
            Frame::TerminalEnd => 0x0a,
            Frame::Residual { .. } => 0x0b,
            Frame::End => 0x0c,
        }
    }

    /// Disclosure-side frames, for the hcost breakdown.
    pub fn is_disclosure(&self) -> bool {
        matches!(self, Frame::Disclose { .. } | Frame::DiscloseEnd | Frame::Residual { .. })
    }

    pub fn encode(&self, out: &mut Vec<u8>) {
        out.push(self.kind());
        let len_pos = out.len();
        out.extend_from_slice(&0u32.to_le_bytes());
        let start = out.len();
        match self {
            Frame::Claim { connected } => out.push(*connected as u8),
            Frame::CutDeclare { cut_vertices, cut_edges, side } => {
                put_u32_list(out, cut_vertices);
                out.extend_from_slice(&(cut_edges.len() as u32).to_le_bytes());
                for &(u, v) in cut_edges {
                    out.extend_from_slice(&u.to_le_bytes());
                    out.extend_from_slice(&v.to_le_bytes());
                }
                put_u32_list(out, side);
            }
            Frame::Disclose { entries } => {
                out.extend_from_slice(&(entries.len() as u32).to_le_bytes());
                for (slot, mult) in entries {
                    out.extend_from_slice(&slot.to_le_bytes());
                    put_bigint(out, mult);
                }
            }
            Frame::DiscloseEnd | Frame::TerminalEnd | Frame::End => {}
            Frame::LayerSeed { seed } => out.extend_from_slice(&seed.to_le_bytes()),
            Frame::TerminalStart { terminal } => {
                out.extend_from_slice(&terminal.to_le_bytes())
            }
            Frame::SetStart { index } => out.push(*index),
            Frame::VertexStart { vertex, layer, disclosure } => {
                out.extend_from_slice(&vertex.to_le_bytes());
                out.extend_from_slice(&layer.to_le_bytes());
                out.extend_from_slice(&(disclosure.len() as u32).to_le_bytes());
                for d in disclosure {
                    out.extend_from_slice(&d.to_le_bytes());
                }
            }
            Frame::Path { vertices, negative } => {
                put_u32_list(out, vertices);
                out.extend_from_slice(&(negative.len() as u32).to_le_bytes());
                for &b in negative {
                    out.push(b as u8);
                }
            }
            Frame::Residual { entries } => {
                out.extend_from_slice(&(entries.len() as u32).to_le_bytes());
                for (slot, neg, count) in entries {
                    out.extend_from_slice(&slot.to_le_bytes());
                    out.push(*neg as u8);
                    put_biguint(out, count);
                }
            }
        }
        let len = (out.len() - start) as u32;
        out[len_pos..len_pos + 4].copy_from_slice(&len.to_le_bytes());
    }

    pub fn encoded_len(&self) -> usize {
        let mut buf = Vec::new();
        self.encode(&mut buf);
        buf.len()
    }

    pub fn decode(bytes: &[u8], pos: &mut usize) -> Result<Frame, FrameError> {
        let err = |m: &str| FrameError(m.to_string());
        if *pos + 5 > bytes.len() {
            return Err(err("truncated header"));
        }
        let kind = bytes[*pos];
        let len =
            u32::from_le_bytes(bytes[*pos + 1..*pos + 5].try_into().unwrap()) as usize;
        *pos += 5;
        if len > 1 << 26 || *pos + len > bytes.len() {
            return Err(err("bad payload length"));
        }
        let payload = &bytes[*pos..*pos + len];
        *pos += len;
        let mut cur = Cursor { data: payload, pos: 0 };
        let frame = match kind {
            0x01 => Frame::Claim { connected: cur.u8()? != 0 },
            0x02 => {
                let cut_vertices = cur.u32_list()?;
                let m = cur.u32()? as usize;
                let mut cut_edges = Vec::with_capacity(m.min(1024));
                for _ in 0..m {
                    cut_edges.push((cur.u32()?, cur.u32()?));
                }
                let side = cur.u32_list()?;
                Frame::CutDeclare { cut_vertices, cut_edges, side }
            }
            0x03 => {
                let m = cur.u32()? as usize;
                let mut entries = Vec::with_capacity(m.min(4096));
                for _ in 0..m {
                    let slot = cur.u64()?;
                    let mult = cur.bigint()?;
                    entries.push((slot, mult));
                }
                Frame::Disclose { entries }
            }
            0x04 => Frame::DiscloseEnd,
            0x05 => Frame::LayerSeed { seed: cur.u64()? },
            0x06 => Frame::TerminalStart { terminal: cur.u32()? },
            0x07 => Frame::SetStart { index: cur.u8()? },
            0x08 => {
                let vertex = cur.u32()?;
                let layer = cur.u32()?;
                let m = cur.u32()? as usize;
                let mut disclosure = Vec::with_capacity(m.min(4096));
                for _ in 0..m {
                    disclosure.push(cur.u64()?);
                }
                Frame::VertexStart { vertex, layer, disclosure }
            }
            0x09 => {
                let vertices = cur.u32_list()?;
                let m = cur.u32()? as usize;
                let mut negative = Vec::with_capacity(m.min(4096));
                for _ in 0..m {
                    negative.push(cur.u8()? != 0);
                }
                Frame::Path { vertices, negative }
            }
            0x0a => Frame::TerminalEnd,
            0x0b => {
                let m = cur.u32()? as usize;
                let mut entries = Vec::with_capacity(m.min(4096));
                for _ in 0..m {
                    let slot = cur.u64()?;
                    let neg = cur.u8()? != 0;
                    let count = cur.biguint()?;
                    entries.push((slot, neg, count));
                }
                Frame::Residual { entries }
            }
            0x0c => Frame::End,
            other => return Err(err(&format!("unknown frame kind {other:#x}"))),
        };
        if cur.pos != payload.len() {
            return Err(err("trailing payload bytes"));
        }
        Ok(frame)
    }
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8], FrameError> {
        if self.pos + len > self.data.len() {
            return Err(FrameError("truncated payload".into()));
        }
        let s = &self.data[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, FrameError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, FrameError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, FrameError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn u32_list(&mut self) -> Result<Vec<u32>, FrameError> {
        let m = self.u32()? as usize;
        let mut out = Vec::with_capacity(m.min(4096));
        for _ in 0..m {
            out.push(self.u32()?);
        }
        Ok(out)
    }

    fn biguint(&mut self) -> Result<BigUint, FrameError> {
        let len = self.u32()? as usize;
        Ok(BigUint::from_bytes_le(self.take(len)?))
    }

    fn bigint(&mut self) -> Result<BigInt, FrameError> {
        let sign = self.u8()?;
        let mag = self.biguint()?;
        match sign {
            0 => Ok(BigInt::from_biguint(Sign::Plus, mag)),
            1 => Ok(BigInt::from_biguint(Sign::Minus, mag)),
            _ => Err(FrameError("bad sign byte".into())),
        }
    }
}

fn put_u32_list(out: &mut Vec<u8>, list: &[u32]) {
    out.extend_from_slice(&(list.len() as u32).to_le_bytes());
    for v in list {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

fn put_biguint(out: &mut Vec<u8>, v: &BigUint) {
    let bytes = v.to_bytes_le();
    out.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
    out.extend_from_slice(&bytes);
}

fn put_bigint(out: &mut Vec<u8>, v: &BigInt) {
    out.push(u8::from(v.sign() == Sign::Minus));
    put_biguint(out, v.magnitude());
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn frames_round_trip() {
        let frames = vec![
            Frame::Claim { connected: true },
            Frame::CutDeclare {
                cut_vertices: vec![1, 5],
                cut_edges: vec![(0, 3)],
                side: vec![0, 2],
            },
            Frame::Disclose {
                entries: vec![(3, BigInt::one() << 100), (9, -BigInt::from(2))],
            },
            Frame::DiscloseEnd,
            Frame::LayerSeed { seed: 0xdeadbeef },
            Frame::TerminalStart { terminal: 7 },
            Frame::SetStart { index: 1 },
            Frame::VertexStart { vertex: 4, layer: 2, disclosure: vec![1, 8, 11] },
            Frame::Path { vertices: vec![4, 2, 9], negative: vec![false, true] },
            Frame::TerminalEnd,
            Frame::Residual { entries: vec![(3, false, BigUint::from(12u32))] },
            Frame::End,
        ];
        let mut bytes = Vec::new();
        for f in &frames {
            f.encode(&mut bytes);
        }
        let mut pos = 0;
        let mut decoded = Vec::new();
        while pos < bytes.len() {
            decoded.push(Frame::decode(&bytes, &mut pos).unwrap());
        }
        assert_eq!(decoded, frames);
    }

    #[test]
    fn truncated_frames_rejected() {
        let mut bytes = Vec::new();
        Frame::LayerSeed { seed: 9 }.encode(&mut bytes);
        let mut pos = 0;
        assert!(Frame::decode(&bytes[..bytes.len() - 1], &mut pos).is_err());
        let mut pos = 0;
        assert!(Frame::decode(&[0x7f, 0, 0, 0, 0], &mut pos).is_err());
    }
}
