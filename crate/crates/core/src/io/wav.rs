//! Minimal RIFF/WAVE reader for PCM integer and IEEE float data.

use std::path::Path;

use crate::error::{Error, Result};

const FORMAT_PCM: u16 = 0x0001;
const FORMAT_FLOAT: u16 = 0x0003;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

/// Mono audio with its sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    /// Samples scaled to `[-1, 1]`.
    pub samples: Vec<f64>,
    /// Sample rate in Hz.
    pub sample_rate: f64,
}

impl AudioBuffer {
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }
}

#[derive(Debug, Clone, Copy)]
struct Format {
    tag: u16,
    channels: u16,
    sample_rate: u32,
    block_align: u16,
    bits: u16,
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::Truncated {
                offset: self.bytes.len() as u64,
                what: what.to_string(),
            });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        let b = self.take(2, what)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }
}

/// Reads a WAV file and mixes all channels down to mono by their mean.
pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_wav(&bytes)
}

/// Parses WAV data held in memory; see [`read_wav`].
pub fn parse_wav(bytes: &[u8]) -> Result<AudioBuffer> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4, "RIFF header")? != b"RIFF" {
        return Err(Error::Malformed("missing RIFF header in wav file".into()));
    }
    r.u32("RIFF size")?;
    if r.take(4, "WAVE tag")? != b"WAVE" {
        return Err(Error::Malformed("missing WAVE tag".into()));
    }
    let mut format = None;
    loop {
        let id: [u8; 4] = r.take(4, "chunk header")?.try_into().expect("four bytes");
        let size = r.u32("chunk size")? as usize;
        let start = r.pos;
        match &id {
            b"fmt " => {
                let body = r.take(size, "fmt chunk")?;
                format = Some(parse_format(body, start)?);
            }
            b"data" => {
                let fmt =
                    format.ok_or_else(|| Error::Malformed("data chunk before fmt chunk".into()))?;
                let available = bytes.len() - start;
                if available < size {
                    return Err(Error::Truncated {
                        offset: bytes.len() as u64,
                        what: format!(
                            "data chunk at byte {start} declares {size} bytes, {available} present"
                        ),
                    });
                }
                if size % fmt.block_align as usize != 0 {
                    return Err(Error::Truncated {
                        offset: (start + size) as u64,
                        what: "partial sample frame at end of data".into(),
                    });
                }
                return Ok(AudioBuffer {
                    samples: decode(&bytes[start..start + size], &fmt),
                    sample_rate: fmt.sample_rate as f64,
                });
            }
            _ => {
                r.take(size, "chunk body")?;
            }
        }
        // chunks are padded to even length
        if size % 2 == 1 && r.pos < bytes.len() {
            r.pos += 1;
        }
    }
}

fn parse_format(body: &[u8], offset: usize) -> Result<Format> {
    let mut r = Reader {
        bytes: body,
        pos: 0,
    };
    let short = |e: Error| match e {
        Error::Truncated { .. } => Error::Truncated {
            offset: (offset + body.len()) as u64,
            what: "fmt chunk too short".into(),
        },
        other => other,
    };
    let mut tag = r.u16("format tag").map_err(short)?;
    let channels = r.u16("channels").map_err(short)?;
    let sample_rate = r.u32("sample rate").map_err(short)?;
    r.u32("byte rate").map_err(short)?;
    let block_align = r.u16("block align").map_err(short)?;
    let bits = r.u16("bits per sample").map_err(short)?;
    if tag == FORMAT_EXTENSIBLE {
        r.u16("extension size").map_err(short)?;
        r.u16("valid bits").map_err(short)?;
        r.u32("channel mask").map_err(short)?;
        tag = r.u16("sub-format").map_err(short)?;
    }
    match (tag, bits) {
        (FORMAT_PCM, 16 | 24 | 32) | (FORMAT_FLOAT, 32) => {}
        (FORMAT_PCM | FORMAT_FLOAT, _) => return Err(Error::UnsupportedBitDepth(bits)),
        _ => return Err(Error::UnsupportedFormat(tag)),
    }
    if channels == 0 || sample_rate == 0 {
        return Err(Error::Malformed("zero channels or sample rate".into()));
    }
    if block_align as usize != channels as usize * bits as usize / 8 {
        return Err(Error::Malformed(format!(
            "block align {block_align} does not match {channels} x {bits} bits"
        )));
    }
    Ok(Format {
        tag,
        channels,
        sample_rate,
        block_align,
        bits,
    })
}

fn decode(data: &[u8], fmt: &Format) -> Vec<f64> {
    let width = fmt.bits as usize / 8;
    let channels = fmt.channels as usize;
    let sample = |b: &[u8]| -> f64 {
        match (fmt.tag, fmt.bits) {
            (FORMAT_FLOAT, _) => f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            (_, 16) => i16::from_le_bytes([b[0], b[1]]) as f64 / 32768.0,
            (_, 24) => (i32::from_le_bytes([0, b[0], b[1], b[2]]) >> 8) as f64 / 8_388_608.0,
            _ => i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64 / 2_147_483_648.0,
        }
    };
    data.chunks_exact(fmt.block_align as usize)
        .map(|frame| frame.chunks_exact(width).map(sample).sum::<f64>() / channels as f64)
        .collect()
}
