use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A single access right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Right {
    R,
    W,
    X,
    I,
}

impl Right {
    pub const ALL: [Right; 4] = [Right::R, Right::W, Right::X, Right::I];

    pub fn letter(self) -> char {
        match self {
            Right::R => 'R',
            Right::W => 'W',
            Right::X => 'X',
            Right::I => 'I',
        }
    }

    pub fn from_letter(c: char) -> Option<Right> {
        Some(match c {
            'R' => Right::R,
            'W' => Right::W,
            'X' => Right::X,
            'I' => Right::I,
            _ => return None,
        })
    }
}

impl fmt::Display for Right {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A set of rights on one path.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode {
    pub r: bool,
    pub w: bool,
    pub x: bool,
    pub i: bool,
}

impl Mode {
    pub const NONE: Mode = Mode {
        r: false,
        w: false,
        x: false,
        i: false,
    };
    pub const RWX: Mode = Mode {
        r: true,
        w: true,
        x: true,
        i: false,
    };

    pub fn of(rights: &[Right]) -> Mode {
        let mut m = Mode::NONE;
        for r in rights {
            m.set(*r, true);
        }
        m
    }

    pub fn has(&self, right: Right) -> bool {
        match right {
            Right::R => self.r,
            Right::W => self.w,
            Right::X => self.x,
            Right::I => self.i,
        }
    }

    pub fn set(&mut self, right: Right, on: bool) {
        match right {
            Right::R => self.r = on,
            Right::W => self.w = on,
            Right::X => self.x = on,
            Right::I => self.i = on,
        }
    }

    pub fn with(mut self, right: Right) -> Mode {
        self.set(right, true);
        self
    }

    pub fn without(mut self, right: Right) -> Mode {
        self.set(right, false);
        self
    }

    pub fn union(self, other: Mode) -> Mode {
        Mode {
            r: self.r || other.r,
            w: self.w || other.w,
            x: self.x || other.x,
            i: self.i || other.i,
        }
    }

    pub fn is_empty(&self) -> bool {
        *self == Mode::NONE
    }

    pub fn rights(&self) -> impl Iterator<Item = Right> + '_ {
        Right::ALL.into_iter().filter(|r| self.has(*r))
    }
}

/// Canonical letter order R, W, X, I.
impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.rights() {
            write!(f, "{}", r.letter())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid mode letter {0:?}")]
pub struct BadModeLetter(pub char);

impl FromStr for Mode {
    type Err = BadModeLetter;

    fn from_str(s: &str) -> Result<Mode, BadModeLetter> {
        let mut m = Mode::NONE;
        for c in s.chars() {
            m.set(Right::from_letter(c).ok_or(BadModeLetter(c))?, true);
        }
        Ok(m)
    }
}
