use std::cmp::Ordering;
use std::fmt;

use crate::error::{structural_err, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 12;

/// A subset of the coordinate axes `{0, .., d-1}` of a `d`-dimensional model.
///
/// Axes are zero-based in code; `Display` and [`IndexSet::parse`] use the
/// one-based convention `{1,2}`.
///
/// Sets order by cardinality first, then by bitmask, which is the order
/// every lattice traversal in this crate follows.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexSet {
    bits: u16,
    dim: u8,
}

impl IndexSet {
    pub fn empty(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { bits: 0, dim: dim as u8 })
    }

    pub fn full(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { bits: ((1u32 << dim) - 1) as u16, dim: dim as u8 })
    }

    pub fn from_bits(dim: usize, bits: u16) -> Result<Self> {
        check_dim(dim)?;
        if u32::from(bits) >> dim != 0 {
            return Err(structural_err!("bitmask {bits:#b} has axes beyond dimension {dim}"));
        }
        Ok(Self { bits, dim: dim as u8 })
    }

    /// Builds a set from zero-based axes.
    pub fn from_axes(dim: usize, axes: &[usize]) -> Result<Self> {
        check_dim(dim)?;
        let mut bits = 0u16;
        for &a in axes {
            if a >= dim {
                return Err(structural_err!("axis {} outside 1..={dim}", a + 1));
            }
            bits |= 1 << a;
        }
        Ok(Self { bits, dim: dim as u8 })
    }

    pub fn singleton(dim: usize, axis: usize) -> Result<Self> {
        Self::from_axes(dim, &[axis])
    }

    /// Parses one-based comma separated indices such as `"1,2"` or `"{1,3}"`.
    pub fn parse(dim: usize, text: &str) -> Result<Self> {
        let trimmed = text.trim().trim_start_matches('{').trim_end_matches('}');
        let mut axes = Vec::new();
        for part in trimmed.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let idx: usize = part.parse().map_err(|_| structural_err!("cannot parse index `{part}` in `{text}`"))?;
            if idx == 0 {
                return Err(structural_err!("indices are one-based, got 0 in `{text}`"));
            }
            axes.push(idx - 1);
        }
        Self::from_axes(dim, &axes)
    }

    pub fn bits(self) -> u16 {
        self.bits
    }

    pub fn dim(self) -> usize {
        usize::from(self.dim)
    }

    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn contains(self, axis: usize) -> bool {
        axis < self.dim() && self.bits & (1 << axis) != 0
    }

    pub fn is_subset_of(self, other: IndexSet) -> bool {
        self.bits & !other.bits == 0
    }

    /// Zero-based axes in increasing order.
    pub fn axes(self) -> impl Iterator<Item = usize> {
        let bits = self.bits;
        (0..MAX_DIM).filter(move |a| bits & (1 << a) != 0)
    }

    pub fn to_axes(self) -> Vec<usize> {
        self.axes().collect()
    }

    /// Position of `axis` among the members of the set.
    pub fn rank_of(self, axis: usize) -> Option<usize> {
        if !self.contains(axis) {
            return None;
        }
        Some((self.bits & ((1u16 << axis) - 1)).count_ones() as usize)
    }

    /// Every nonempty subset, ordered by cardinality and then bitmask.
    pub fn nonempty_subsets(self) -> Vec<IndexSet> {
        let mut out = Vec::with_capacity((1usize << self.len()) - 1);
        // enumerate submasks, then sort into lattice order
        let mut sub = self.bits;
        while sub != 0 {
            out.push(IndexSet { bits: sub, dim: self.dim });
            sub = (sub - 1) & self.bits;
        }
        out.sort();
        out
    }

    pub fn ensure_nonempty(self) -> Result<Self> {
        if self.is_empty() {
            Err(structural_err!("the empty index set is not allowed here"))
        } else {
            Ok(self)
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        Err(structural_err!("dimension {dim} outside 1..={MAX_DIM}"))
    } else {
        Ok(())
    }
}

impl Ord for IndexSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then(self.bits.cmp(&other.bits)).then(self.dim.cmp(&other.dim))
    }
}

impl PartialOrd for IndexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, a) in self.axes().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", a + 1)?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IndexSet{self}/d{}", self.dim)
    }
}
