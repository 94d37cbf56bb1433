//! Parameter policies for the big-step solver and the exponent functions
//! behind them.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::ToPrimitive;

/// How the dominion-size parameter `h` is chosen at each recursion level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Policy {
    /// `h = ⌈√(2n′)⌉ − 2` with the current vertex count `n′`.
    Sqrt,
    /// `h = n′` for three priorities, otherwise
    /// `min(⌈2·∛c·n₀^β(c−1)⌉, n′)` with the top-level vertex count `n₀`.
    Gamma,
    Fixed(u32),
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::Sqrt => f.write_str("sqrt"),
            Policy::Gamma => f.write_str("gamma"),
            Policy::Fixed(h) => write!(f, "fixed:{h}"),
        }
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Policy, String> {
        match s {
            "sqrt" => Ok(Policy::Sqrt),
            "gamma" => Ok(Policy::Gamma),
            _ => s
                .strip_prefix("fixed:")
                .and_then(|h| h.parse().ok())
                .map(Policy::Fixed)
                .ok_or_else(|| format!("unknown policy {s:?} (expected sqrt, gamma or fixed:<h>)")),
        }
    }
}

/// `γ(c) = c/3 + 1/2 − 4/(c²−1)` for odd `c`, and
/// `c/3 + 1/2 − 1/(3c) − 4/c²` for even `c`.
pub fn gamma(c: u32) -> Rational64 {
    assert!(c >= 2, "gamma needs at least two priorities");
    let c = c as i64;
    let base = Rational64::new(c, 3) + Rational64::new(1, 2);
    if c % 2 == 1 {
        base - Rational64::new(4, c * c - 1)
    } else {
        base - Rational64::new(1, 3 * c) - Rational64::new(4, c * c)
    }
}

/// `β(c) = γ(c) / (⌊c/2⌋ + 1)`.
pub fn beta(c: u32) -> Rational64 {
    assert!(c >= 3, "beta needs at least three priorities");
    gamma(c) / Rational64::from_integer((c / 2) as i64 + 1)
}

/// Smallest `s` with `s² ≥ x`.
fn ceil_sqrt(x: u64) -> u64 {
    let mut s = (x as f64).sqrt() as u64;
    while s * s < x {
        s += 1;
    }
    while s > 0 && (s - 1) * (s - 1) >= x {
        s -= 1;
    }
    s
}

/// The parameter for a level with `c` priorities and `n_current` vertices,
/// clamped into `0..=n_current`.
pub fn choose_h(policy: Policy, n0: usize, n_current: usize, c: u32) -> u32 {
    let cap = n_current as u64;
    let h = match policy {
        Policy::Sqrt => ceil_sqrt(2 * cap).saturating_sub(2),
        Policy::Fixed(h) => h as u64,
        Policy::Gamma if c <= 3 => cap,
        Policy::Gamma => {
            let exponent = beta(c - 1).to_f64().expect("small rational");
            let raw = 2.0 * (c as f64).cbrt() * (n0 as f64).powf(exponent);
            (raw - 1e-9).ceil().max(0.0) as u64
        }
    };
    h.min(cap) as u32
}
