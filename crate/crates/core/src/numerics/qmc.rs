//! Two-dimensional Sobol points mapped to pairs of standard normals.
//!
//! The first coordinate is the base-2 van der Corput sequence, the second
//! uses the primitive polynomial x + 1. Optional scrambling applies a random
//! lower-triangular binary matrix and a random digital shift to each
//! coordinate (Matoušek's linear scramble), keyed by the seed.

use rand::Rng;

use super::normal::norm_quantile;
use crate::error::{CoverError, Result};
use crate::rng::RngState;

const BITS: usize = 32;
const SCALE: f64 = 1.0 / 4_294_967_296.0;

/// Parameters of a QMC point stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QmcSpec {
    pub point_count: u64,
    pub seed: u64,
    pub scramble: bool,
}

impl QmcSpec {
    pub fn new(point_count: u64, seed: u64, scramble: bool) -> Result<Self> {
        let spec = QmcSpec {
            point_count,
            seed,
            scramble,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.point_count == 0 {
            return Err(CoverError::domain(
                "QmcSpec",
                "point_count must be at least 1",
            ));
        }
        if self.point_count >= 1 << BITS {
            return Err(CoverError::domain(
                "QmcSpec",
                format!("point_count must be below 2^{BITS}"),
            ));
        }
        Ok(())
    }
}

/// Direction numbers (possibly scrambled) plus digital shift for both coordinates.
#[derive(Debug, Clone)]
pub struct Sobol2 {
    dirs: [[u32; BITS]; 2],
    shift: [u32; 2],
}

impl Sobol2 {
    pub fn unscrambled() -> Self {
        let mut dirs = [[0u32; BITS]; 2];
        for (k, v) in dirs[0].iter_mut().enumerate() {
            *v = 1u32 << (BITS - 1 - k);
        }
        dirs[1][0] = 1u32 << (BITS - 1);
        for k in 1..BITS {
            let prev = dirs[1][k - 1];
            dirs[1][k] = prev ^ (prev >> 1);
        }
        Sobol2 {
            dirs,
            shift: [0; 2],
        }
    }

    pub fn scrambled(seed: u64) -> Self {
        let mut base = Self::unscrambled();
        let mut rng = RngState::new(seed).derive(0x5ca3_b1e5).rng();
        for dim in 0..2 {
            // Row j of the lower-triangular matrix, digit 0 = most significant bit.
            let mut rows = [0u32; BITS];
            for (j, row) in rows.iter_mut().enumerate() {
                let diag = 1u32 << (BITS - 1 - j);
                let upper_mask = if j == 0 {
                    0
                } else {
                    !((1u32 << (BITS - j)) - 1)
                };
                *row = (rng.random::<u32>() & upper_mask) | diag;
            }
            for v in base.dirs[dim].iter_mut() {
                let mut out = 0u32;
                for (j, row) in rows.iter().enumerate() {
                    if (row & *v).count_ones() % 2 == 1 {
                        out |= 1u32 << (BITS - 1 - j);
                    }
                }
                *v = out;
            }
            base.shift[dim] = rng.random::<u32>();
        }
        base
    }

    pub fn from_spec(spec: &QmcSpec) -> Self {
        if spec.scramble {
            Self::scrambled(spec.seed)
        } else {
            Self::unscrambled()
        }
    }

    /// Raw integer point at `index` in Gray-code order.
    pub fn point_bits(&self, index: u64) -> [u32; 2] {
        let gray = index ^ (index >> 1);
        let mut out = self.shift;
        for k in 0..BITS {
            if (gray >> k) & 1 == 1 {
                out[0] ^= self.dirs[0][k];
                out[1] ^= self.dirs[1][k];
            }
        }
        out
    }

    /// Point in the open unit square.
    pub fn point(&self, index: u64) -> [f64; 2] {
        let b = self.point_bits(index);
        [to_unit(b[0]), to_unit(b[1])]
    }

    /// Iterator over points `start..end` using Gray-code updates.
    pub fn range(&self, start: u64, end: u64) -> SobolRange<'_> {
        SobolRange {
            gen: self,
            next: start,
            end,
            state: self.point_bits(start),
        }
    }
}

#[inline]
fn to_unit(bits: u32) -> f64 {
    (bits as f64 + 0.5) * SCALE
}

pub struct SobolRange<'a> {
    gen: &'a Sobol2,
    next: u64,
    end: u64,
    state: [u32; 2],
}

impl Iterator for SobolRange<'_> {
    type Item = [f64; 2];

    fn next(&mut self) -> Option<[f64; 2]> {
        if self.next >= self.end {
            return None;
        }
        let out = [to_unit(self.state[0]), to_unit(self.state[1])];
        self.next += 1;
        let k = self.next.trailing_zeros() as usize;
        if k < BITS {
            self.state[0] ^= self.gen.dirs[0][k];
            self.state[1] ^= self.gen.dirs[1][k];
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for SobolRange<'_> {}

/// Standard-normal pairs for indices `1..=point_count` (index 0 is skipped).
pub fn qmc_normal_pairs(spec: &QmcSpec) -> impl Iterator<Item = (f64, f64)> {
    let gen = Sobol2::from_spec(spec);
    let n = spec.point_count;
    (1..=n).map(move |i| {
        let [u, v] = gen.point(i);
        (norm_quantile(u), norm_quantile(v))
    })
}

/// Normal pairs for the index block `start..end`, for workers that split a stream.
pub fn normal_pairs_block(
    gen: &Sobol2,
    start: u64,
    end: u64,
) -> impl Iterator<Item = (f64, f64)> + '_ {
    gen.range(start, end)
        .map(|[u, v]| (norm_quantile(u), norm_quantile(v)))
}
