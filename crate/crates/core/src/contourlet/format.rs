//! Binary container for coefficient files.
//!
//! Layout, all integers little endian:
//!
//! ```text
//! "CRG1"  magic
//! u16     version, currently 1
//! u32     image height
//! u32     image width
//! u32     level count L
//! u8 * L  wedge order per level, coarse to fine (each 1..=8)
//! grids   base grid, then every level's bands coarse to fine, each band
//!         a grid: u32 rows, u32 cols, rows*cols f64 samples row-major
//! ```
//!
//! Grid sizes are redundant with the header; the reader checks them against
//! the ceil-halving chain instead of trusting them, and rejects anything it
//! would not itself have written: unknown versions, out-of-range orders,
//! non-finite samples, short files, trailing bytes.

use std::fs;
use std::path::Path;

use super::dfb::{DirectionalSubbands, MAX_DFB_ORDER};
use super::ContourletCoefficients;
use crate::error::{Error, Result};
use crate::tensor::ImageTensor;

const MAGIC: &[u8; 4] = b"CRG1";
const VERSION: u16 = 1;

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::CoeffFormat(format!(
                "truncated reading {what} at byte {}",
                self.pos
            )));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }
}

fn write_grid(out: &mut Vec<u8>, g: &ImageTensor) {
    let (h, w, _) = g.dims();
    out.extend_from_slice(&(h as u32).to_le_bytes());
    out.extend_from_slice(&(w as u32).to_le_bytes());
    for &v in g.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

fn read_grid(c: &mut Cursor, eh: usize, ew: usize, what: &str) -> Result<ImageTensor> {
    let gh = c.u32(what)? as usize;
    let gw = c.u32(what)? as usize;
    if (gh, gw) != (eh, ew) {
        return Err(Error::CoeffFormat(format!("{what} is {gh}x{gw}, expected {eh}x{ew}")));
    }
    let n = gh * gw;
    let raw = c.take(n * 8, what)?;
    let mut data = Vec::with_capacity(n);
    for (i, chunk) in raw.chunks_exact(8).enumerate() {
        let v = f64::from_le_bytes(chunk.try_into().unwrap());
        if !v.is_finite() {
            return Err(Error::CoeffFormat(format!("non-finite sample {i} in {what}")));
        }
        data.push(v);
    }
    ImageTensor::new(gh, gw, 1, data)
}

impl ContourletCoefficients {
    /// Serialize. Fails if the container is internally inconsistent, so a
    /// written file always parses back.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        if self.directional.is_empty() {
            return Err(Error::InvalidArgument("coefficients hold no levels".into()));
        }
        let h = u32::try_from(self.height)
            .map_err(|_| Error::InvalidArgument("height exceeds format range".into()))?;
        let w = u32::try_from(self.width)
            .map_err(|_| Error::InvalidArgument("width exceeds format range".into()))?;
        let levels = self.directional.len();
        let (level_dims, base_dims) =
            ContourletCoefficients::expected_dims(self.height, self.width, levels);
        let (bh, bw, bc) = self.base.dims();
        if (bh, bw, bc) != (base_dims.0, base_dims.1, 1) {
            return Err(Error::Shape(format!("base is {bh}x{bw}x{bc}, chain expects {base_dims:?}")));
        }
        for (j, (d, &(eh, ew))) in self.directional.iter().zip(&level_dims).enumerate() {
            if d.order == 0 || d.order > MAX_DFB_ORDER {
                return Err(Error::InvalidArgument(format!("level {j} order {} out of range", d.order)));
            }
            if d.bands.len() != 1 << d.order {
                return Err(Error::Shape(format!(
                    "level {j} has {} bands for order {}",
                    d.bands.len(),
                    d.order
                )));
            }
            for b in &d.bands {
                if b.dims() != (eh, ew, 1) {
                    return Err(Error::Shape(format!("level {j} band dims {:?}", b.dims())));
                }
            }
        }

        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&h.to_le_bytes());
        out.extend_from_slice(&w.to_le_bytes());
        out.extend_from_slice(&(levels as u32).to_le_bytes());
        for d in &self.directional {
            out.push(d.order as u8);
        }
        write_grid(&mut out, &self.base);
        for d in &self.directional {
            for b in &d.bands {
                write_grid(&mut out, b);
            }
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut c = Cursor { bytes, pos: 0 };
        let magic = c.take(4, "magic")?;
        if magic != MAGIC {
            return Err(Error::CoeffFormat(format!("bad magic {magic:02x?}")));
        }
        let version = c.u16("version")?;
        if version != VERSION {
            return Err(Error::CoeffFormat(format!("unsupported version {version}")));
        }
        let height = c.u32("height")? as usize;
        let width = c.u32("width")? as usize;
        let levels = c.u32("level count")? as usize;
        if height == 0 || width == 0 {
            return Err(Error::CoeffFormat(format!("zero image dimension {height}x{width}")));
        }
        if levels == 0 {
            return Err(Error::CoeffFormat("zero levels".into()));
        }
        if levels >= 32 || (1usize << levels) > height.min(width) {
            return Err(Error::CoeffFormat(format!(
                "{levels} levels cannot come from a {height}x{width} image"
            )));
        }
        let mut orders = Vec::with_capacity(levels);
        for j in 0..levels {
            let d = c.take(1, "level orders")?[0] as usize;
            if d == 0 || d > MAX_DFB_ORDER {
                return Err(Error::CoeffFormat(format!("level {j} order {d} out of range")));
            }
            orders.push(d);
        }
        let (level_dims, base_dims) =
            ContourletCoefficients::expected_dims(height, width, levels);
        let base = read_grid(&mut c, base_dims.0, base_dims.1, "base grid")?;
        let mut directional = Vec::with_capacity(levels);
        for (j, (&order, &(eh, ew))) in orders.iter().zip(&level_dims).enumerate() {
            let mut bands = Vec::with_capacity(1 << order);
            for k in 0..1usize << order {
                bands.push(read_grid(&mut c, eh, ew, &format!("level {j} band {k}"))?);
            }
            directional.push(DirectionalSubbands { order, bands });
        }
        if c.pos != bytes.len() {
            return Err(Error::CoeffFormat(format!(
                "{} trailing bytes after coefficients",
                bytes.len() - c.pos
            )));
        }
        Ok(ContourletCoefficients { height, width, base, directional })
    }
}

pub fn read_coefficients(path: impl AsRef<Path>) -> Result<ContourletCoefficients> {
    let path = path.as_ref();
    let bytes =
        fs::read(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    ContourletCoefficients::from_bytes(&bytes)
}

pub fn write_coefficients(path: impl AsRef<Path>, c: &ContourletCoefficients) -> Result<()> {
    let path = path.as_ref();
    let bytes = c.to_bytes()?;
    fs::write(path, bytes).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}
