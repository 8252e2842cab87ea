use core::fmt;
use core::num::NonZeroU32;
use core::str::FromStr;

/// Identity of a base or multi-word token.
///
/// `0` is the unknown token, base tokens occupy `1..=|vocab|` and multi-word
/// tokens follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TokenId(pub u32);

impl TokenId {
    pub const UNKNOWN: TokenId = TokenId(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u32> for TokenId {
    fn from(value: u32) -> Self {
        TokenId(value)
    }
}

/// Maximum number of base tokens a phrase may span.
///
/// Used both as the training window (cap on dictionary entries) and the
/// testing window (cap on inference matches).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Window {
    /// No cap; the sample length is the only limit.
    Max,
    Words(NonZeroU32),
}

impl Window {
    /// Window of `n` words. Returns `None` for `n == 0`.
    pub fn words(n: u32) -> Option<Window> {
        NonZeroU32::new(n).map(Window::Words)
    }

    pub fn limit(self) -> Option<usize> {
        match self {
            Window::Max => None,
            Window::Words(n) => Some(n.get() as usize),
        }
    }

    /// Whether a phrase of `length` base tokens fits.
    #[inline]
    pub fn allows(self, length: usize) -> bool {
        match self {
            Window::Max => true,
            Window::Words(n) => length <= n.get() as usize,
        }
    }

    /// The tighter of two windows.
    pub fn min(self, other: Window) -> Window {
        match (self, other) {
            (Window::Max, w) | (w, Window::Max) => w,
            (Window::Words(a), Window::Words(b)) => Window::Words(a.min(b)),
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Window::Max => f.write_str("max"),
            Window::Words(n) => n.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid window {0:?}: expected `max` or an integer >= 1")]
pub struct ParseWindowError(pub alloc::string::String);

impl FromStr for Window {
    type Err = ParseWindowError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("max") {
            return Ok(Window::Max);
        }
        s.parse::<u32>()
            .ok()
            .and_then(Window::words)
            .ok_or_else(|| ParseWindowError(s.into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_parsing() {
        assert_eq!("max".parse::<Window>().unwrap(), Window::Max);
        assert_eq!("MAX".parse::<Window>().unwrap(), Window::Max);
        assert_eq!("2".parse::<Window>().unwrap(), Window::words(2).unwrap());
        assert!("0".parse::<Window>().is_err());
        assert!("-1".parse::<Window>().is_err());
        assert!("two".parse::<Window>().is_err());
    }

    #[test]
    fn window_min_and_allows() {
        let two = Window::words(2).unwrap();
        let three = Window::words(3).unwrap();
        assert_eq!(Window::Max.min(two), two);
        assert_eq!(three.min(two), two);
        assert_eq!(Window::Max.min(Window::Max), Window::Max);
        assert!(two.allows(2));
        assert!(!two.allows(3));
        assert!(Window::Max.allows(usize::MAX));
    }
}
