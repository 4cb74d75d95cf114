//! Gray code and the angle transform used by uniformly controlled rotations.

use std::fmt;

use crate::error::{QfinError, Result};

/// Fixed-width binary word; bit `width-1` is printed first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BitWord {
    value: u64,
    width: u32,
}

impl BitWord {
    pub fn new(value: u64, width: u32) -> Result<Self> {
        if width == 0 || width > 63 || value >> width != 0 {
            return Err(QfinError::InvalidArgument(format!("{value} does not fit in {width} bits")));
        }
        Ok(Self { value, width })
    }

    pub fn parse(bits: &str) -> Result<Self> {
        let value = bits.chars().try_fold(0u64, |acc, ch| match ch {
            '0' => Ok(acc << 1),
            '1' => Ok(acc << 1 | 1),
            _ => Err(QfinError::Parse(format!("invalid bit in `{bits}`"))),
        })?;
        Self::new(value, bits.len() as u32)
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn width(&self) -> u32 {
        self.width
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.value, width = self.width as usize)
    }
}

/// A word in reflected binary (Gray) code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GrayWord(BitWord);

impl GrayWord {
    pub fn bits(&self) -> BitWord {
        self.0
    }

    pub fn value(&self) -> u64 {
        self.0.value
    }
}

impl fmt::Display for GrayWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `g = b XOR (b >> 1)`: the top bit is copied, every other bit is the XOR
/// of itself and its higher neighbour.
pub fn to_gray(b: BitWord) -> GrayWord {
    GrayWord(BitWord { value: b.value ^ (b.value >> 1), width: b.width })
}

/// Inverse of [`to_gray`]: `b_top = g_top`, then `b_k = b_{k+1} XOR g_k`.
pub fn from_gray(g: GrayWord) -> BitWord {
    let mut b = g.0.value;
    let mut shift = 1;
    while shift < 64 {
        b ^= b >> shift;
        shift <<= 1;
    }
    BitWord { value: b, width: g.0.width }
}

/// Parity of the bitwise AND of two equal-width words.
pub fn gray_dot(b: BitWord, g: GrayWord) -> Result<u8> {
    if b.width != g.0.width {
        return Err(QfinError::LengthMismatch { expected: b.width as usize, got: g.0.width as usize });
    }
    Ok(((b.value & g.0.value).count_ones() & 1) as u8)
}

/// Row-major `2^n × 2^n` matrix `M_ij = 2^{-n} (-1)^{b(j)·g(i)}`.
pub fn angle_transform_matrix(n: u32) -> Vec<Vec<f64>> {
    let dim = 1u64 << n;
    let scale = 1.0 / dim as f64;
    (0..dim)
        .map(|i| {
            let g = i ^ (i >> 1);
            (0..dim).map(|j| if (j & g).count_ones() % 2 == 0 { scale } else { -scale }).collect()
        })
        .collect()
}

/// `θ = M·α` for a power-of-two number of angles.
pub fn transform_angles(alphas: &[f64]) -> Result<Vec<f64>> {
    let len = alphas.len();
    if len == 0 || !len.is_power_of_two() {
        return Err(QfinError::NotPowerOfTwo(len));
    }
    if len == 1 {
        return Ok(alphas.to_vec());
    }
    let m = angle_transform_matrix(len.trailing_zeros());
    Ok(m.iter().map(|row| row.iter().zip(alphas).map(|(a, b)| a * b).sum()).collect())
}
