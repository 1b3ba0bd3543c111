use std::str::FromStr;

use crate::error::{Error, Result};

/// Upper limits on exhaustive enumerations. Exceeding one is an error, never a
/// silent truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest `n` for loops over all `n!` sequences (or comparable tree/matching
    /// enumerations).
    pub factorial: usize,
    /// Largest `n` for loops over all `2^n` subsets or assignments.
    pub exponential: usize,
    /// Largest `n` for the exhaustive monotonicity check.
    pub monotone: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            factorial: 10,
            exponential: 20,
            monotone: 6,
        }
    }
}

impl Caps {
    pub fn check_factorial(&self, what: &'static str, n: usize) -> Result<()> {
        check(what, n, self.factorial)
    }

    pub fn check_exponential(&self, what: &'static str, n: usize) -> Result<()> {
        check(what, n, self.exponential)
    }

    pub fn check_monotone(&self, n: usize) -> Result<()> {
        check("monotonicity check", n, self.monotone)
    }
}

fn check(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::CapExceeded { what, n, cap })
    } else {
        Ok(())
    }
}

/// Parses `factorial=10,exponential=20,monotone=6`; omitted keys keep their
/// defaults.
impl FromStr for Caps {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut caps = Caps::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, val) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value in caps, got {part:?}")))?;
            let val: usize = val
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad cap value {val:?}")))?;
            match key.trim() {
                "factorial" => caps.factorial = val,
                "exponential" => caps.exponential = val,
                "monotone" => caps.monotone = val,
                other => return Err(Error::Parse(format!("unknown cap {other:?}"))),
            }
        }
        Ok(caps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_partial_overrides() {
        let caps: Caps = "factorial=8, monotone=5".parse().unwrap();
        assert_eq!(caps.factorial, 8);
        assert_eq!(caps.exponential, 20);
        assert_eq!(caps.monotone, 5);
        assert!("bogus=1".parse::<Caps>().is_err());
        assert!("factorial".parse::<Caps>().is_err());
    }

    #[test]
    fn cap_errors_name_the_limit() {
        let caps = Caps::default();
        assert!(caps.check_factorial("x", 10).is_ok());
        assert_eq!(
            caps.check_factorial("x", 11),
            Err(Error::CapExceeded { what: "x", n: 11, cap: 10 })
        );
    }
}
