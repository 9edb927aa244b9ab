//! Text and binary encodings for event streams and frame tensors.
//!
//! Binary layouts are little-endian:
//!
//! ```text
//! stream: "EVST" u16 version=1, u16 width, u16 height, u16 reserved=0, u64 N
//!         N x { u64 t, u16 x, u16 y, i8 p, 3 zero bytes }
//! frame:  "EVFR" u16 version=1, u32 T, u32 C=2, u32 H, u32 W
//!         T*C*H*W x u32 counts, slice-major then channel, row, column
//! ```

use crate::error::{Error, Result};
use crate::event::{Event, EventStream, FrameTensor, Polarity, PolarityEncoding, CHANNELS};

pub const STREAM_MAGIC: [u8; 4] = *b"EVST";
pub const FRAME_MAGIC: [u8; 4] = *b"EVFR";
pub const FORMAT_VERSION: u16 = 1;
pub const STREAM_HEADER_LEN: usize = 20;
pub const STREAM_RECORD_LEN: usize = 16;
pub const FRAME_HEADER_LEN: usize = 22;

/// Parses the `# <width> <height>` text format. The leading `#` on the
/// header is optional; later lines starting with `#` and blank lines are
/// skipped.
pub fn parse_text_stream(bytes: &[u8], encoding: PolarityEncoding) -> Result<EventStream> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
        Error::text(line, "invalid UTF-8")
    })?;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (width, height) = loop {
        let Some((line_no, line)) = lines.next() else {
            return Err(Error::text(1, "missing header"));
        };
        if line.trim().is_empty() {
            continue;
        }
        break parse_header(line_no, line)?;
    };

    let mut events = Vec::new();
    for (line_no, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let mut next = |name: &str| {
            fields
                .next()
                .ok_or_else(|| Error::text(line_no, format!("missing field `{name}`")))
        };
        let t: u64 = parse_num(line_no, "t", next("t")?)?;
        let x: u16 = parse_num(line_no, "x", next("x")?)?;
        let y: u16 = parse_num(line_no, "y", next("y")?)?;
        let raw_p: i64 = parse_num(line_no, "p", next("p")?)?;
        if fields.next().is_some() {
            return Err(Error::text(line_no, "trailing fields"));
        }
        let p = encoding
            .decode(raw_p)
            .ok_or_else(|| Error::text(line_no, "invalid polarity"))?;
        if x >= width || y >= height {
            return Err(Error::text(
                line_no,
                format!("coordinate ({x}, {y}) outside {width}x{height} sensor"),
            ));
        }
        events.push(Event::new(t, x, y, p));
    }
    EventStream::new(width, height, events)
}

fn parse_header(line_no: usize, line: &str) -> Result<(u16, u16)> {
    let body = line.trim().strip_prefix('#').unwrap_or(line);
    let mut fields = body.split_whitespace();
    let (Some(w), Some(h), None) = (fields.next(), fields.next(), fields.next()) else {
        return Err(Error::text(line_no, "malformed header, expected `# <width> <height>`"));
    };
    let width: u16 = parse_num(line_no, "width", w)?;
    let height: u16 = parse_num(line_no, "height", h)?;
    if width == 0 || height == 0 {
        return Err(Error::text(line_no, "sensor geometry must be non-zero"));
    }
    Ok((width, height))
}

fn parse_num<T: std::str::FromStr>(line_no: usize, name: &str, raw: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::text(line_no, format!("non-numeric {name} `{raw}`")))
}

/// Canonical text form: `# W H` then `t x y p` per line with p as -1/1.
pub fn write_text_stream(stream: &EventStream) -> Vec<u8> {
    use std::fmt::Write;
    let mut out = String::with_capacity(16 + stream.len() * 24);
    let _ = writeln!(out, "# {} {}", stream.width(), stream.height());
    for e in stream.events() {
        let _ = writeln!(out, "{} {} {} {}", e.t, e.x, e.y, e.p.as_i8());
    }
    out.into_bytes()
}

/// On-disk stream encodings, chosen by file extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamFormat {
    Text,
    Binary,
}

impl StreamFormat {
    /// `.evt`/`.txt` are text, `.evst` is binary; anything else is `None`.
    pub fn from_path(path: &std::path::Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "evt" | "txt" => Some(StreamFormat::Text),
            "evst" => Some(StreamFormat::Binary),
            _ => None,
        }
    }

    pub fn decode(self, bytes: &[u8], encoding: PolarityEncoding) -> Result<EventStream> {
        match self {
            StreamFormat::Text => parse_text_stream(bytes, encoding),
            StreamFormat::Binary => parse_binary_stream(bytes),
        }
    }

    pub fn encode(self, stream: &EventStream) -> Vec<u8> {
        match self {
            StreamFormat::Text => write_text_stream(stream),
            StreamFormat::Binary => write_binary_stream(stream),
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8]> {
        if self.buf.len() < n {
            return Err(Error::Truncated(what));
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    fn array<const N: usize>(&mut self, what: &'static str) -> Result<[u8; N]> {
        Ok(self.take(N, what)?.try_into().expect("length checked"))
    }

    fn u16(&mut self, what: &'static str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.array(what)?))
    }

    fn u32(&mut self, what: &'static str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array(what)?))
    }

    fn u64(&mut self, what: &'static str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array(what)?))
    }
}

fn check_magic(found: [u8; 4], expected: [u8; 4]) -> Result<()> {
    if found != expected {
        return Err(Error::BadMagic { expected, found });
    }
    Ok(())
}

pub fn parse_binary_stream(bytes: &[u8]) -> Result<EventStream> {
    let mut r = Reader { buf: bytes };
    check_magic(r.array("stream header")?, STREAM_MAGIC)?;
    let version = r.u16("stream header")?;
    if version != FORMAT_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let width = r.u16("stream header")?;
    let height = r.u16("stream header")?;
    if r.u16("stream header")? != 0 {
        return Err(Error::Malformed("reserved header field must be zero"));
    }
    let declared = r.u64("stream header")?;

    let payload = r.buf;
    let actual = (payload.len() / STREAM_RECORD_LEN) as u64;
    if !payload.len().is_multiple_of(STREAM_RECORD_LEN) && actual < declared {
        return Err(Error::Truncated("event record"));
    }
    if actual != declared || !payload.len().is_multiple_of(STREAM_RECORD_LEN) {
        return Err(Error::CountMismatch { declared, actual });
    }

    let events = payload
        .chunks_exact(STREAM_RECORD_LEN)
        .map(|rec| {
            let t = u64::from_le_bytes(rec[0..8].try_into().unwrap());
            let x = u16::from_le_bytes(rec[8..10].try_into().unwrap());
            let y = u16::from_le_bytes(rec[10..12].try_into().unwrap());
            let p = Polarity::from_i8(rec[12] as i8)
                .ok_or(Error::Malformed("polarity must be -1 or 1"))?;
            if rec[13..16] != [0, 0, 0] {
                return Err(Error::Malformed("record padding must be zero"));
            }
            Ok(Event::new(t, x, y, p))
        })
        .collect::<Result<Vec<_>>>()?;
    EventStream::new(width, height, events)
}

pub fn write_binary_stream(stream: &EventStream) -> Vec<u8> {
    let mut out = Vec::with_capacity(STREAM_HEADER_LEN + stream.len() * STREAM_RECORD_LEN);
    out.extend_from_slice(&STREAM_MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&stream.width().to_le_bytes());
    out.extend_from_slice(&stream.height().to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes());
    out.extend_from_slice(&(stream.len() as u64).to_le_bytes());
    for e in stream.events() {
        out.extend_from_slice(&e.t.to_le_bytes());
        out.extend_from_slice(&e.x.to_le_bytes());
        out.extend_from_slice(&e.y.to_le_bytes());
        out.push(e.p.as_i8() as u8);
        out.extend_from_slice(&[0; 3]);
    }
    out
}

pub fn write_frame_tensor(frames: &FrameTensor) -> Vec<u8> {
    let mut out = Vec::with_capacity(FRAME_HEADER_LEN + frames.counts().len() * 4);
    out.extend_from_slice(&FRAME_MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    // Dimensions are bounded to u32 at construction.
    for dim in [frames.num_slices(), CHANNELS, frames.height(), frames.width()] {
        out.extend_from_slice(&(dim as u32).to_le_bytes());
    }
    for c in frames.counts() {
        out.extend_from_slice(&c.to_le_bytes());
    }
    out
}

pub fn read_frame_tensor(bytes: &[u8]) -> Result<FrameTensor> {
    let mut r = Reader { buf: bytes };
    check_magic(r.array("frame header")?, FRAME_MAGIC)?;
    let version = r.u16("frame header")?;
    if version != FORMAT_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let slices = r.u32("frame header")? as usize;
    let channels = r.u32("frame header")?;
    if channels as usize != CHANNELS {
        return Err(Error::Malformed("channel count must be 2"));
    }
    let height = r.u32("frame header")? as usize;
    let width = r.u32("frame header")? as usize;

    let len = slices
        .checked_mul(CHANNELS)
        .and_then(|v| v.checked_mul(height))
        .and_then(|v| v.checked_mul(width))
        .filter(|v| v.checked_mul(4).is_some())
        .ok_or_else(|| {
            Error::DimensionOverflow(format!("{slices}x{CHANNELS}x{height}x{width} elements"))
        })?;
    let payload = r.buf;
    if payload.len() < len * 4 {
        return Err(Error::Truncated("frame payload"));
    }
    if payload.len() > len * 4 {
        return Err(Error::Malformed("trailing bytes after frame payload"));
    }
    let counts = payload
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(FrameTensor::from_raw(slices, height, width, counts))
}
