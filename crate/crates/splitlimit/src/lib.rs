//! Enumeration, random generation and scaling-limit checks for
//! distance-hereditary graphs and two of their subclasses (2-connected
//! distance-hereditary graphs and 3-leaf powers), all driven by the
//! split-decomposition tree of the graph.
//!
//! Series algebra is exact over big rationals; numeric constants are
//! generic over [`scalar::Real`] so they can be computed both in `f64` and in
//! a software float of configurable width.

pub mod asymptotics;
pub mod crt;
pub mod enumeration;
pub mod sampler;
pub mod scalar;
pub mod series;
pub mod stats;
pub mod treecodec;

use std::fmt;
use std::str::FromStr;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

/// Exact truncated series, the workhorse of counting.
pub type RationalSeries = series::Series<BigRational>;
/// Exact bivariate series in (z, u).
pub type RationalBiSeries = series::BiSeries<BigRational>;
/// Floating truncated series.
pub type FloatSeries = series::Series<f64>;
/// Family constants in double precision.
pub type Constants = asymptotics::FamilyConstants<f64>;
/// Family constants in the software float.
pub type ConstantsMp = asymptotics::FamilyConstants<scalar::MpFloat>;

/// The three graph families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Distance-hereditary graphs.
    Dh,
    /// 2-connected distance-hereditary graphs.
    Dh2c,
    /// 3-leaf power graphs.
    Leaf3,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Dh, Family::Dh2c, Family::Leaf3];

    pub fn tag(self) -> &'static str {
        match self {
            Family::Dh => "dh",
            Family::Dh2c => "dh2c",
            Family::Leaf3 => "leaf3",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "dh" => Ok(Family::Dh),
            "dh2c" | "2c" => Ok(Family::Dh2c),
            "leaf3" | "3l" => Ok(Family::Leaf3),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("exp of unit series: constant term {0} is not zero")]
    ExpOfUnitSeries(String),
    #[error("reciprocal of a series with zero constant term")]
    NotInvertible,
    #[error("ill-founded specification: pass {pass} made no progress (agreement stuck at degree {degree})")]
    IllFounded { pass: usize, degree: usize },
    #[error("malformed specification system: {0}")]
    BadSystem(String),
    #[error("tail bound {bound:e} exceeds tolerance {tolerance:e}")]
    TailBound { bound: f64, tolerance: f64 },
    #[error("requested degree {requested} exceeds available order {order}")]
    OrderTooLow { requested: usize, order: usize },
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("root bracketing failed on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },
    #[error("graphs need at least 3 vertices, got {0}")]
    TooSmall(usize),
    #[error("not distance-hereditary")]
    NotDistanceHereditary,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("invalid tree: {}", .0.join("; "))]
    InvalidTree(Vec<String>),
    #[error("leaf {0} not found")]
    LeafNotFound(u32),
    #[error("Boltzmann rejection exceeded {attempts} attempts; retune the parameter or widen the window")]
    RetryCap { attempts: u64 },
    #[error("{0}")]
    Invalid(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("too few samples: {0}")]
    TooFewSamples(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
