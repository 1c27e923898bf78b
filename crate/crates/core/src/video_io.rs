//! Raw video ingestion and the pixel-level primitives shared by every
//! feature extractor.
//!
//! Only luma is kept. Samples are normalized to `[0, 1]` at ingest by
//! dividing by `2^bit_depth - 1`, so downstream code never sees bit depth.

use std::io::Read;

use crate::error::{Error, Result};

/// One luma plane, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    width: usize,
    height: usize,
    samples: Vec<f64>,
}

impl Frame {
    pub fn new(width: usize, height: usize, samples: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidFrame(format!("empty frame {width}x{height}")));
        }
        if samples.len() != width * height {
            return Err(Error::InvalidFrame(format!(
                "{} samples for a {width}x{height} frame",
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidFrame(format!(
                "non-finite sample at index {i}"
            )));
        }
        Ok(Frame {
            width,
            height,
            samples,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Frame {
            width,
            height,
            samples: vec![value; width * height],
        }
    }

    /// Builds a frame by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut samples = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                samples.push(f(x, y));
            }
        }
        Frame {
            width,
            height,
            samples,
        }
    }

    pub(crate) fn from_parts(width: usize, height: usize, samples: Vec<f64>) -> Self {
        debug_assert_eq!(samples.len(), width * height);
        Frame {
            width,
            height,
            samples,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.samples[y * self.width + x]
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn same_dims(&self, other: &Frame) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Applies `f` to every sample.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Frame {
        Frame::from_parts(
            self.width,
            self.height,
            self.samples.iter().map(|&v| f(v)).collect(),
        )
    }

    /// Combines two equally sized frames sample by sample.
    pub fn zip_map(&self, other: &Frame, f: impl Fn(f64, f64) -> f64) -> Result<Frame> {
        check_dims(self, other)?;
        Ok(Frame::from_parts(
            self.width,
            self.height,
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }
}

fn check_dims(a: &Frame, b: &Frame) -> Result<()> {
    if a.same_dims(b) {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.width, a.height, b.width, b.height
        )))
    }
}

/// Ordered luma frames plus the metadata needed to interpret them.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoSequence {
    frames: Vec<Frame>,
    frame_rate: f64,
    bit_depth: u8,
}

impl VideoSequence {
    /// Requires at least two frames of identical dimensions.
    pub fn new(frames: Vec<Frame>, frame_rate: f64, bit_depth: u8) -> Result<Self> {
        if frames.len() < 2 {
            return Err(Error::TooFewFrames {
                needed: 2,
                got: frames.len(),
            });
        }
        let first = &frames[0];
        for f in &frames[1..] {
            check_dims(first, f)?;
        }
        Ok(VideoSequence {
            frames,
            frame_rate,
            bit_depth,
        })
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    /// Number of frames (K).
    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    pub fn width(&self) -> usize {
        self.frames[0].width
    }

    pub fn height(&self) -> usize {
        self.frames[0].height
    }

    pub fn frame_rate(&self) -> f64 {
        self.frame_rate
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    /// Applies a fallible per-frame transform, keeping metadata.
    pub fn try_map_frames(&self, f: impl Fn(&Frame) -> Result<Frame>) -> Result<VideoSequence> {
        let frames = self.frames.iter().map(f).collect::<Result<Vec<_>>>()?;
        VideoSequence::new(frames, self.frame_rate, self.bit_depth)
    }

    pub(crate) fn check_aligned(&self, other: &VideoSequence) -> Result<()> {
        if self.frame_count() != other.frame_count() {
            return Err(Error::DimensionMismatch(format!(
                "frame counts differ: {} vs {}",
                self.frame_count(),
                other.frame_count()
            )));
        }
        check_dims(&self.frames[0], &other.frames[0])
    }
}

/// Chroma layout of a planar YUV stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chroma {
    /// 4:2:0, two quarter-size chroma planes after luma.
    Yuv420,
    /// 4:0:0, luma only.
    Mono,
}

impl Chroma {
    fn chroma_samples(self, width: usize, height: usize) -> usize {
        match self {
            Chroma::Yuv420 => 2 * width.div_ceil(2) * height.div_ceil(2),
            Chroma::Mono => 0,
        }
    }
}

impl std::str::FromStr for Chroma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "420" | "yuv420" | "i420" => Ok(Chroma::Yuv420),
            "400" | "mono" => Ok(Chroma::Mono),
            other => Err(Error::UnsupportedFormat(format!("chroma '{other}'"))),
        }
    }
}

fn bytes_per_sample(bit_depth: u8) -> Result<usize> {
    match bit_depth {
        8 => Ok(1),
        10 => Ok(2),
        other => Err(Error::UnsupportedFormat(format!("{other}-bit samples"))),
    }
}

fn frame_bytes(width: usize, height: usize, bit_depth: u8, chroma: Chroma) -> Result<usize> {
    Ok((width * height + chroma.chroma_samples(width, height)) * bytes_per_sample(bit_depth)?)
}

/// Decodes a luma plane from the start of `payload`.
fn decode_luma(payload: &[u8], width: usize, height: usize, bit_depth: u8) -> Frame {
    let n = width * height;
    let samples = if bit_depth == 8 {
        payload[..n].iter().map(|&b| f64::from(b) / 255.0).collect()
    } else {
        payload[..2 * n]
            .chunks_exact(2)
            .map(|c| f64::from(u16::from_le_bytes([c[0], c[1]]) & 0x03ff) / 1023.0)
            .collect()
    };
    Frame::from_parts(width, height, samples)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Y4mHeader {
    width: usize,
    height: usize,
    frame_rate: f64,
    bit_depth: u8,
    chroma: Chroma,
}

fn parse_y4m_header(line: &str) -> Result<Y4mHeader> {
    let mut tokens = line.split(' ').filter(|t| !t.is_empty());
    if tokens.next() != Some("YUV4MPEG2") {
        return Err(Error::MalformedHeader("missing YUV4MPEG2 magic".into()));
    }
    let mut width = None;
    let mut height = None;
    let mut frame_rate = 25.0;
    let mut bit_depth = 8;
    let mut chroma = Chroma::Yuv420;
    for tok in tokens {
        let (tag, value) = tok.split_at(1);
        match tag {
            "W" => {
                width = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| Error::MalformedHeader(format!("bad width '{value}'")))?,
                )
            }
            "H" => {
                height = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| Error::MalformedHeader(format!("bad height '{value}'")))?,
                )
            }
            "F" => {
                let (num, den) = value
                    .split_once(':')
                    .ok_or_else(|| Error::MalformedHeader(format!("bad frame rate '{value}'")))?;
                let num: f64 = num
                    .parse()
                    .map_err(|_| Error::MalformedHeader(format!("bad frame rate '{value}'")))?;
                let den: f64 = den
                    .parse()
                    .map_err(|_| Error::MalformedHeader(format!("bad frame rate '{value}'")))?;
                if den == 0.0 {
                    return Err(Error::MalformedHeader(format!("bad frame rate '{value}'")));
                }
                frame_rate = num / den;
            }
            "C" => {
                (chroma, bit_depth) = match value {
                    "420" | "420jpeg" | "420paldv" | "420mpeg2" => (Chroma::Yuv420, 8),
                    "420p10" => (Chroma::Yuv420, 10),
                    "mono" => (Chroma::Mono, 8),
                    other => {
                        return Err(Error::UnsupportedFormat(format!("Y4M colorspace C{other}")))
                    }
                }
            }
            // interlacing, aspect ratio, extensions: irrelevant for luma analysis
            "I" | "A" | "X" => {}
            _ => return Err(Error::MalformedHeader(format!("unknown tag '{tok}'"))),
        }
    }
    let width = width.ok_or_else(|| Error::MalformedHeader("missing W".into()))?;
    let height = height.ok_or_else(|| Error::MalformedHeader("missing H".into()))?;
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader(format!(
            "zero dimension {width}x{height}"
        )));
    }
    Ok(Y4mHeader {
        width,
        height,
        frame_rate,
        bit_depth,
        chroma,
    })
}

fn read_all(mut stream: impl Read) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    stream.read_to_end(&mut buf).map_err(|cause| Error::Io {
        path: "<stream>".into(),
        cause,
    })?;
    Ok(buf)
}

/// Decodes a YUV4MPEG2 stream into a luma-only sequence.
pub fn read_y4m(stream: impl Read) -> Result<VideoSequence> {
    let buf = read_all(stream)?;
    let header_end = buf
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::MalformedHeader("no header terminator".into()))?;
    let header = std::str::from_utf8(&buf[..header_end])
        .map_err(|_| Error::MalformedHeader("header is not ASCII".into()))?;
    let hdr = parse_y4m_header(header)?;
    let size = frame_bytes(hdr.width, hdr.height, hdr.bit_depth, hdr.chroma)?;

    let mut pos = header_end + 1;
    let mut frames = Vec::new();
    while pos < buf.len() {
        let rest = &buf[pos..];
        if !rest.starts_with(b"FRAME") {
            return Err(Error::MalformedHeader(format!(
                "expected FRAME marker at byte {pos}"
            )));
        }
        let nl = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or(Error::TruncatedFrame {
                frame: frames.len(),
                expected: size,
                got: 0,
            })?;
        let payload = &rest[nl + 1..];
        if payload.len() < size {
            return Err(Error::TruncatedFrame {
                frame: frames.len(),
                expected: size,
                got: payload.len(),
            });
        }
        frames.push(decode_luma(payload, hdr.width, hdr.height, hdr.bit_depth));
        pos += nl + 1 + size;
    }
    VideoSequence::new(frames, hdr.frame_rate, hdr.bit_depth)
}

/// Decodes headerless planar YUV (I420 or I420-10LE) with caller-supplied geometry.
///
/// 10-bit input is little-endian, two bytes per sample, value in the low 10 bits.
pub fn read_raw_yuv(
    stream: impl Read,
    width: usize,
    height: usize,
    bit_depth: u8,
    chroma: Chroma,
    frame_rate: f64,
) -> Result<VideoSequence> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidParameter(format!(
            "zero dimension {width}x{height}"
        )));
    }
    let size = frame_bytes(width, height, bit_depth, chroma)?;
    let buf = read_all(stream)?;
    if buf.len() % size != 0 {
        return Err(Error::SizeMismatch {
            len: buf.len(),
            frame_size: size,
        });
    }
    let frames = buf
        .chunks_exact(size)
        .map(|c| decode_luma(c, width, height, bit_depth))
        .collect();
    VideoSequence::new(frames, frame_rate, bit_depth)
}

fn encode_frame(out: &mut Vec<u8>, frame: &Frame, bit_depth: u8, chroma: Chroma) {
    let max = ((1u32 << bit_depth) - 1) as f64;
    let quantize = |v: f64| (v * max).round().clamp(0.0, max) as u16;
    let neutral = 1u16 << (bit_depth - 1);
    let n_chroma = chroma.chroma_samples(frame.width, frame.height);
    if bit_depth == 8 {
        out.extend(frame.samples.iter().map(|&v| quantize(v) as u8));
        out.extend(std::iter::repeat_n(neutral as u8, n_chroma));
    } else {
        for &v in &frame.samples {
            out.extend_from_slice(&quantize(v).to_le_bytes());
        }
        for _ in 0..n_chroma {
            out.extend_from_slice(&neutral.to_le_bytes());
        }
    }
}

/// Encodes luma back to planar bytes; chroma planes are written as neutral gray.
pub fn write_raw_yuv(seq: &VideoSequence, bit_depth: u8, chroma: Chroma) -> Result<Vec<u8>> {
    bytes_per_sample(bit_depth)?;
    let mut out = Vec::new();
    for f in &seq.frames {
        encode_frame(&mut out, f, bit_depth, chroma);
    }
    Ok(out)
}

/// Encodes a sequence as YUV4MPEG2 with neutral chroma.
pub fn write_y4m(seq: &VideoSequence, bit_depth: u8, chroma: Chroma) -> Result<Vec<u8>> {
    bytes_per_sample(bit_depth)?;
    let tag = match (chroma, bit_depth) {
        (Chroma::Yuv420, 8) => "420",
        (Chroma::Yuv420, _) => "420p10",
        (Chroma::Mono, 8) => "mono",
        (Chroma::Mono, _) => {
            return Err(Error::UnsupportedFormat("10-bit mono Y4M".into()));
        }
    };
    // frame rate written as a rational with a fixed 1000 denominator
    let fps_num = (seq.frame_rate * 1000.0).round() as u64;
    let mut out = format!(
        "YUV4MPEG2 W{} H{} F{}:1000 Ip C{}\n",
        seq.width(),
        seq.height(),
        fps_num,
        tag
    )
    .into_bytes();
    for f in &seq.frames {
        out.extend_from_slice(b"FRAME\n");
        encode_frame(&mut out, f, bit_depth, chroma);
    }
    Ok(out)
}

/// Element-wise `a - b`. The result may hold negative samples.
pub fn frame_diff(a: &Frame, b: &Frame) -> Result<Frame> {
    a.zip_map(b, |x, y| x - y)
}

/// Maps any integer index onto `[0, n)` by half-sample symmetric reflection
/// (`d c b a | a b c d | d c b a`), valid for arbitrarily far overhang.
#[inline]
pub(crate) fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let m = i.rem_euclid(period);
    (if m >= n { period - 1 - m } else { m }) as usize
}

/// Normalized 1-D Gaussian taps for the given radius.
pub fn gaussian_kernel(sigma: f64, radius: usize) -> Vec<f64> {
    let r = radius as isize;
    let taps: Vec<f64> = (-r..=r)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / sum).collect()
}

/// Separable convolution with an odd-length symmetric kernel, reflect boundaries.
pub(crate) fn convolve_separable(f: &Frame, kernel: &[f64]) -> Frame {
    debug_assert!(kernel.len() % 2 == 1);
    let (w, h) = (f.width, f.height);
    let r = (kernel.len() / 2) as isize;
    let src = &f.samples;

    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &t) in kernel.iter().enumerate() {
                acc += t * row[reflect(x as isize + k as isize - r, w)];
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for (k, &t) in kernel.iter().enumerate() {
            let sy = reflect(y as isize + k as isize - r, h);
            let src_row = &tmp[sy * w..(sy + 1) * w];
            let dst_row = &mut out[y * w..(y + 1) * w];
            for (d, &s) in dst_row.iter_mut().zip(src_row) {
                *d += t * s;
            }
        }
    }
    Frame::from_parts(w, h, out)
}

/// Separable Gaussian blur, radius `ceil(3 sigma)`.
pub fn gaussian_blur(f: &Frame, sigma: f64) -> Result<Frame> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::NonPositiveSigma(sigma));
    }
    let radius = (3.0 * sigma).ceil() as usize;
    Ok(convolve_separable(f, &gaussian_kernel(sigma, radius)))
}

/// 5-tap binomial low-pass used before every 2x decimation.
pub const DOWNSAMPLE_KERNEL: [f64; 5] =
    [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

/// Low-pass then keep even rows and columns; output is `floor(dim / 2)`.
pub fn downsample_2x(f: &Frame) -> Result<Frame> {
    if f.width < 2 || f.height < 2 {
        return Err(Error::FrameTooSmall(format!(
            "cannot downsample {}x{}",
            f.width, f.height
        )));
    }
    let smooth = convolve_separable(f, &DOWNSAMPLE_KERNEL);
    let (w2, h2) = (f.width / 2, f.height / 2);
    Ok(Frame::from_fn(w2, h2, |x, y| smooth.get(2 * x, 2 * y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_frame(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Frame {
        Frame::from_fn(w, h, |_, _| rng.gen::<f64>())
    }

    fn y4m_bytes(header: &str, frames: &[Vec<u8>]) -> Vec<u8> {
        let mut out = format!("{header}\n").into_bytes();
        for f in frames {
            out.extend_from_slice(b"FRAME\n");
            out.extend_from_slice(f);
        }
        out
    }

    #[test]
    fn minimal_y4m() {
        let bytes = y4m_bytes("YUV4MPEG2 W4 H4 F25:1 C420", &[vec![16; 24], vec![235; 24]]);
        let seq = read_y4m(&bytes[..]).unwrap();
        assert_eq!(seq.frame_count(), 2);
        assert_eq!((seq.width(), seq.height()), (4, 4));
        assert_eq!(seq.frame_rate(), 25.0);
        assert_eq!(seq.frames()[0].get(0, 0), 16.0 / 255.0);
    }

    #[test]
    fn all_255_is_one() {
        let bytes = y4m_bytes(
            "YUV4MPEG2 W4 H4 F25:1 C420",
            &[vec![255; 24], vec![255; 24]],
        );
        let seq = read_y4m(&bytes[..]).unwrap();
        assert!(seq.frames()[0].samples().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn y4m_errors() {
        let bad_magic = y4m_bytes("YUV4MPEG W4 H4", &[vec![0; 24], vec![0; 24]]);
        assert!(matches!(
            read_y4m(&bad_magic[..]),
            Err(Error::MalformedHeader(_))
        ));
        let no_w = y4m_bytes("YUV4MPEG2 H4 C420", &[vec![0; 24], vec![0; 24]]);
        assert!(matches!(
            read_y4m(&no_w[..]),
            Err(Error::MalformedHeader(_))
        ));
        let c444 = y4m_bytes("YUV4MPEG2 W4 H4 C444", &[vec![0; 48], vec![0; 48]]);
        assert!(matches!(
            read_y4m(&c444[..]),
            Err(Error::UnsupportedFormat(_))
        ));
        let p12 = y4m_bytes("YUV4MPEG2 W4 H4 C420p12", &[vec![0; 48], vec![0; 48]]);
        assert!(matches!(
            read_y4m(&p12[..]),
            Err(Error::UnsupportedFormat(_))
        ));
        let short = y4m_bytes("YUV4MPEG2 W4 H4 C420", &[vec![0; 24], vec![0; 20]]);
        assert!(matches!(
            read_y4m(&short[..]),
            Err(Error::TruncatedFrame {
                frame: 1,
                expected: 24,
                got: 20
            })
        ));
    }

    #[test]
    fn y4m_mono_and_10bit() {
        let mono = y4m_bytes(
            "YUV4MPEG2 W4 H2 F30000:1001 Cmono",
            &[vec![51; 8], vec![102; 8]],
        );
        let seq = read_y4m(&mono[..]).unwrap();
        assert_eq!(seq.frames()[1].get(3, 1), 102.0 / 255.0);
        assert!((seq.frame_rate() - 29.97).abs() < 1e-2);

        let mut payload = Vec::new();
        for _ in 0..(16 + 8) {
            payload.extend_from_slice(&1023u16.to_le_bytes());
        }
        let ten = y4m_bytes("YUV4MPEG2 W4 H4 F25:1 C420p10", &[payload.clone(), payload]);
        let seq = read_y4m(&ten[..]).unwrap();
        assert_eq!(seq.bit_depth(), 10);
        assert!(seq.frames()[0].samples().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn raw_yuv_sizes() {
        let seq = read_raw_yuv(&[0u8; 48][..], 4, 4, 8, Chroma::Yuv420, 25.0).unwrap();
        assert_eq!(seq.frame_count(), 2);
        assert!(matches!(
            read_raw_yuv(&[0u8; 50][..], 4, 4, 8, Chroma::Yuv420, 25.0),
            Err(Error::SizeMismatch {
                len: 50,
                frame_size: 24
            })
        ));
    }

    #[test]
    fn raw_round_trip_neutral_chroma() {
        let mut bytes = Vec::new();
        for k in 0..3u8 {
            bytes.extend((0..16u8).map(|i| i * 10 + k));
            bytes.extend(std::iter::repeat_n(128u8, 8));
        }
        let seq = read_raw_yuv(&bytes[..], 4, 4, 8, Chroma::Yuv420, 25.0).unwrap();
        assert_eq!(write_raw_yuv(&seq, 8, Chroma::Yuv420).unwrap(), bytes);

        let mut ten = Vec::new();
        for k in 0..2u16 {
            for i in 0..16u16 {
                ten.extend_from_slice(&(i * 60 + k).to_le_bytes());
            }
            for _ in 0..8 {
                ten.extend_from_slice(&512u16.to_le_bytes());
            }
        }
        let seq = read_raw_yuv(&ten[..], 4, 4, 10, Chroma::Yuv420, 25.0).unwrap();
        assert_eq!(write_raw_yuv(&seq, 10, Chroma::Yuv420).unwrap(), ten);
    }

    #[test]
    fn y4m_writer_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let frames = (0..3)
            .map(|_| Frame::from_fn(6, 4, |_, _| f64::from(rng.gen::<u8>()) / 255.0))
            .collect();
        let seq = VideoSequence::new(frames, 25.0, 8).unwrap();
        let bytes = write_y4m(&seq, 8, Chroma::Yuv420).unwrap();
        assert_eq!(read_y4m(&bytes[..]).unwrap(), seq);
    }

    #[test]
    fn frame_diff_cases() {
        let a = Frame::filled(4, 4, 0.5);
        let b = Frame::filled(4, 4, 0.25);
        assert!(frame_diff(&a, &a)
            .unwrap()
            .samples()
            .iter()
            .all(|&v| v == 0.0));
        assert!(frame_diff(&a, &b)
            .unwrap()
            .samples()
            .iter()
            .all(|&v| v == 0.25));
        let c = Frame::filled(4, 5, 0.0);
        assert!(matches!(
            frame_diff(&a, &c),
            Err(Error::DimensionMismatch(_))
        ));

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (x, y) = (random_frame(&mut rng, 8, 8), random_frame(&mut rng, 8, 8));
        let d = frame_diff(&x, &y).unwrap();
        for j in 0..8 {
            for i in 0..8 {
                assert_eq!(d.get(i, j), x.get(i, j) - y.get(i, j));
            }
        }
        let nd = frame_diff(&y, &x).unwrap();
        assert!(d.samples().iter().zip(nd.samples()).all(|(a, b)| *a == -*b));
    }

    #[test]
    fn blur_constant_and_errors() {
        let f = Frame::filled(10, 7, 0.3);
        let b = gaussian_blur(&f, 1.7).unwrap();
        assert!(b.samples().iter().all(|&v| (v - 0.3).abs() < 1e-9));
        assert!(matches!(
            gaussian_blur(&f, 0.0),
            Err(Error::NonPositiveSigma(_))
        ));
        assert!(matches!(
            gaussian_blur(&f, -1.0),
            Err(Error::NonPositiveSigma(_))
        ));
    }

    #[test]
    fn blur_impulse_matches_direct_2d_convolution() {
        let mut f = Frame::filled(9, 9, 0.0);
        f.samples[4 * 9 + 4] = 1.0;
        let out = gaussian_blur(&f, 1.0).unwrap();
        // direct 2-D oracle with an independently built kernel
        let g: Vec<f64> = (-3i32..=3).map(|i| (-(i * i) as f64 / 2.0).exp()).collect();
        let s: f64 = g.iter().sum();
        for y in 0..9i32 {
            for x in 0..9i32 {
                let (dx, dy) = (x - 4, y - 4);
                let expected = if dx.abs() <= 3 && dy.abs() <= 3 {
                    g[(dx + 3) as usize] * g[(dy + 3) as usize] / (s * s)
                } else {
                    0.0
                };
                assert!((out.get(x as usize, y as usize) - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn blur_preserves_mean_and_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for sigma in [0.5, 1.0, 2.5, 6.0] {
            let f = random_frame(&mut rng, 13, 9);
            let g = random_frame(&mut rng, 13, 9);
            let bf = gaussian_blur(&f, sigma).unwrap();
            assert!((bf.mean() - f.mean()).abs() < 1e-6, "sigma {sigma}");

            let (a, c) = (0.7, -1.3);
            let combo = f.zip_map(&g, |x, y| a * x + c * y).unwrap();
            let lhs = gaussian_blur(&combo, sigma).unwrap();
            let bg = gaussian_blur(&g, sigma).unwrap();
            for i in 0..lhs.len() {
                let rhs = a * bf.samples()[i] + c * bg.samples()[i];
                assert!((lhs.samples()[i] - rhs).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn reflect_indices() {
        let idx: Vec<usize> = (-5..9).map(|i| reflect(i, 4)).collect();
        assert_eq!(idx, vec![3, 3, 2, 1, 0, 0, 1, 2, 3, 3, 2, 1, 0, 0]);
    }

    #[test]
    fn downsample_shapes() {
        let f = Frame::filled(5, 5, 0.4);
        let d = downsample_2x(&f).unwrap();
        assert_eq!((d.width(), d.height()), (2, 2));
        assert!(d.samples().iter().all(|&v| (v - 0.4).abs() < 1e-12));

        let n = 13;
        let twice = downsample_2x(&downsample_2x(&Frame::filled(n, n, 0.8)).unwrap()).unwrap();
        assert_eq!((twice.width(), twice.height()), (n / 2 / 2, n / 2 / 2));
        assert!(twice.samples().iter().all(|&v| (v - 0.8).abs() < 1e-12));

        assert!(matches!(
            downsample_2x(&Frame::filled(1, 4, 0.0)),
            Err(Error::FrameTooSmall(_))
        ));
    }

    #[test]
    fn downsample_checkerboard_matches_oracle() {
        let f = Frame::from_fn(8, 8, |x, y| ((x + y) % 2) as f64);
        let d = downsample_2x(&f).unwrap();
        let k = [1.0, 4.0, 6.0, 4.0, 1.0];
        for oy in 0..4 {
            for ox in 0..4 {
                let (cx, cy) = (2 * ox as isize, 2 * oy as isize);
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    for (i, ki) in k.iter().enumerate() {
                        let sx = reflect(cx + i as isize - 2, 8);
                        let sy = reflect(cy + j as isize - 2, 8);
                        acc += ki * kj * f.get(sx, sy);
                    }
                }
                let expected = acc / 256.0;
                assert!((d.get(ox, oy) - expected).abs() < 1e-12);
                assert!((d.get(ox, oy) - 0.5).abs() < 0.15);
            }
        }
    }
}
