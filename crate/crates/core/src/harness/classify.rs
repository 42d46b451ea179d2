//! Three-level labels for throughput, memory and scaling.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpeedClass {
    Fast,
    Moderate,
    Slow,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MemoryClass {
    Low,
    Moderate,
    High,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalingClass {
    Good,
    Moderate,
    Poor,
}

macro_rules! tagged {
    ($t:ty { $($v:ident => $s:literal),* }) => {
        impl $t {
            pub fn tag(self) -> &'static str {
                match self { $(Self::$v => $s),* }
            }

            pub fn from_tag(s: &str) -> Option<Self> {
                match s { $($s => Some(Self::$v),)* _ => None }
            }
        }

        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.tag())
            }
        }
    };
}

tagged!(SpeedClass { Fast => "fast", Moderate => "moderate", Slow => "slow" });
tagged!(MemoryClass { Low => "low", Moderate => "moderate", High => "high" });
tagged!(ScalingClass { Good => "good", Moderate => "moderate", Poor => "poor" });

/// Labels each throughput relative to the best in the set: fast within a
/// factor of 10, moderate within 100, slow beyond.
pub fn classify_throughput(values: &[f64]) -> Result<Vec<SpeedClass>> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::InvalidConfig {
            field: "throughput",
            reason: format!("{v} is not a finite non-negative rate"),
        });
    }
    let best = values.iter().copied().fold(0.0, f64::max);
    Ok(values
        .iter()
        .map(|&v| {
            if v >= best / 10.0 {
                SpeedClass::Fast
            } else if v >= best / 100.0 {
                SpeedClass::Moderate
            } else {
                SpeedClass::Slow
            }
        })
        .collect())
}

/// Index memory over raw data size: low up to 2x, moderate below 5x.
pub fn classify_memory(mem: f64, raw: f64) -> MemoryClass {
    assert!(raw > 0.0, "raw data size must be positive, got {raw}");
    let ratio = mem / raw;
    if ratio <= 2.0 {
        MemoryClass::Low
    } else if ratio < 5.0 {
        MemoryClass::Moderate
    } else {
        MemoryClass::High
    }
}

fn check_growth(g: f64) -> Result<()> {
    if g.is_nan() || g <= 1.0 {
        Err(Error::NoGrowth(g))
    } else {
        Ok(())
    }
}

/// `f` is large-run throughput over small-run throughput for data grown by
/// `g`. Good when `f >= 1/log2(g)`, moderate down to half that.
pub fn strong_throughput_class(f: f64, g: f64) -> Result<ScalingClass> {
    check_growth(g)?;
    let good = 1.0 / g.log2();
    Ok(if f >= good {
        ScalingClass::Good
    } else if f >= good / 2.0 {
        ScalingClass::Moderate
    } else {
        ScalingClass::Poor
    })
}

/// `h` is large-run memory over small-run memory. Good strictly below `g`,
/// moderate up to `1.5 g`.
pub fn strong_memory_class(h: f64, g: f64) -> Result<ScalingClass> {
    check_growth(g)?;
    Ok(if h < g {
        ScalingClass::Good
    } else if h <= 1.5 * g {
        ScalingClass::Moderate
    } else {
        ScalingClass::Poor
    })
}

/// `change` is the relative change in time per operation (0.1 = 10% slower).
pub fn weak_class(change: f64) -> ScalingClass {
    if change <= 0.10 {
        ScalingClass::Good
    } else if change <= 0.25 {
        ScalingClass::Moderate
    } else {
        ScalingClass::Poor
    }
}
