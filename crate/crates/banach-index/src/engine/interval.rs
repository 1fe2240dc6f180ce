//! Index quantities and closed sub-intervals of [0,2] with endpoint
//! strictness flags.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The four indices tracked per space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantity {
    /// Thickness index T.
    #[serde(rename = "T")]
    BigT,
    /// Thinness index t.
    #[serde(rename = "t")]
    SmallT,
    /// Averaged thinness-type index μ₁.
    #[serde(rename = "mu1")]
    Mu1,
    /// Averaged thickness-type index μ₂.
    #[serde(rename = "mu2")]
    Mu2,
}

impl Quantity {
    pub const ALL: [Quantity; 4] = [Quantity::BigT, Quantity::SmallT, Quantity::Mu1, Quantity::Mu2];

    pub fn label(self) -> &'static str {
        match self {
            Quantity::BigT => "T",
            Quantity::SmallT => "t",
            Quantity::Mu1 => "mu1",
            Quantity::Mu2 => "mu2",
        }
    }

    pub(crate) fn idx(self) -> usize {
        match self {
            Quantity::BigT => 0,
            Quantity::SmallT => 1,
            Quantity::Mu1 => 2,
            Quantity::Mu2 => 3,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A closed sub-interval of [0,2]; a strict flag marks an endpoint that is
/// known to be unattained (an open end in disguise, kept closed so endpoints
/// stay computable).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_strict: bool,
    pub hi_strict: bool,
}

impl IndexInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!((0.0..=2.0).contains(&lo) && lo <= hi && hi <= 2.0);
        IndexInterval {
            lo,
            hi,
            lo_strict: false,
            hi_strict: false,
        }
    }

    pub fn exact(v: f64) -> Self {
        Self::new(v, v)
    }

    /// The uninformative range for an infinite-dimensional space.
    pub fn full() -> Self {
        Self::new(1.0, 2.0)
    }

    pub fn is_exact(&self, v: f64) -> bool {
        self.lo == v && self.hi == v
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Raise the lower endpoint; returns whether the interval changed.
    /// Equal-value calls can still upgrade the strictness flag.
    pub(crate) fn tighten_lo(&mut self, v: f64, strict: bool) -> Result<bool, String> {
        let improves = v > self.lo || (v == self.lo && strict && !self.lo_strict);
        if !improves {
            return Ok(false);
        }
        if v > self.hi {
            return Err(format!(
                "lower bound {v} exceeds upper bound {}",
                self.hi
            ));
        }
        if v > self.lo {
            self.lo = v;
            self.lo_strict = strict;
        } else {
            self.lo_strict = true;
        }
        self.check_degenerate()?;
        Ok(true)
    }

    /// Lower the upper endpoint; returns whether the interval changed.
    pub(crate) fn tighten_hi(&mut self, v: f64, strict: bool) -> Result<bool, String> {
        let improves = v < self.hi || (v == self.hi && strict && !self.hi_strict);
        if !improves {
            return Ok(false);
        }
        if v < self.lo {
            return Err(format!(
                "upper bound {v} undercuts lower bound {}",
                self.lo
            ));
        }
        if v < self.hi {
            self.hi = v;
            self.hi_strict = strict;
        } else {
            self.hi_strict = true;
        }
        self.check_degenerate()?;
        Ok(true)
    }

    fn check_degenerate(&self) -> Result<(), String> {
        if self.lo == self.hi && (self.lo_strict || self.hi_strict) {
            Err(format!(
                "point interval at {} with a strict endpoint is empty",
                self.lo
            ))
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for IndexInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo_strict { '(' } else { '[' };
        let close = if self.hi_strict { ')' } else { ']' };
        write!(f, "{open}{}, {}{close}", self.lo, self.hi)
    }
}

/// One interval per quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intervals([IndexInterval; 4]);

impl Intervals {
    pub fn all_full() -> Self {
        Intervals([IndexInterval::full(); 4])
    }

    /// T = 1, t = 2 (the convention for finite-dimensional spaces), μ's free.
    pub fn finite_dim() -> Self {
        let mut iv = Self::all_full();
        iv[Quantity::BigT] = IndexInterval::exact(1.0);
        iv[Quantity::SmallT] = IndexInterval::exact(2.0);
        iv
    }
}

impl Index<Quantity> for Intervals {
    type Output = IndexInterval;
    fn index(&self, q: Quantity) -> &IndexInterval {
        &self.0[q.idx()]
    }
}

impl IndexMut<Quantity> for Intervals {
    fn index_mut(&mut self, q: Quantity) -> &mut IndexInterval {
        &mut self.0[q.idx()]
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalsWire {
    #[serde(rename = "T")]
    big_t: IndexInterval,
    t: IndexInterval,
    mu1: IndexInterval,
    mu2: IndexInterval,
}

impl Serialize for Intervals {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        IntervalsWire {
            big_t: self[Quantity::BigT],
            t: self[Quantity::SmallT],
            mu1: self[Quantity::Mu1],
            mu2: self[Quantity::Mu2],
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Intervals {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = IntervalsWire::deserialize(d)?;
        let mut iv = Intervals::all_full();
        iv[Quantity::BigT] = w.big_t;
        iv[Quantity::SmallT] = w.t;
        iv[Quantity::Mu1] = w.mu1;
        iv[Quantity::Mu2] = w.mu2;
        Ok(iv)
    }
}

/// A rule application tried to empty an interval. This signals an inconsistent
/// rule catalog, not bad user input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("contradictory bounds for {quantity} of {expr}: {detail}")]
pub struct ContradictionError {
    pub expr: String,
    pub quantity: Quantity,
    pub detail: String,
}
