use std::fmt;

use thiserror::Error;

/// Where inside a nested mean evaluation a range violation occurred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    /// Inner mean over `Y` on the left-hand side.
    InnerY,
    /// Outer mean over `X` on the left-hand side.
    OuterX,
    /// Inner mean over `X` on the right-hand side.
    InnerX,
    /// Outer mean over `Y` on the right-hand side.
    OuterY,
    /// Inside `phi = f o g^-1`.
    Phi,
    /// Inside `phi^-1 = g o f^-1`.
    PhiInverse,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::InnerY => "inner-Y",
            Stage::OuterX => "outer-X",
            Stage::InnerX => "inner-X",
            Stage::OuterY => "outer-Y",
            Stage::Phi => "phi",
            Stage::PhiInverse => "phi-inverse",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed or inconsistent arguments.
    #[error("invalid input: {0}")]
    Input(String),
    /// A generator was evaluated outside its domain interval.
    #[error("value {value} lies outside the generator domain {domain}")]
    Domain { value: f64, domain: String },
    /// A generator was inverted at a point outside its range. This is the
    /// well-posedness failure of a mean.
    #[error("value {value} lies outside the generator range {range}{}", stage_suffix(.stage))]
    Range {
        value: f64,
        range: String,
        stage: Option<Stage>,
    },
    /// Evaluation overflowed or produced NaN.
    #[error("non-finite result while evaluating at {at}")]
    NonFinite { at: f64 },
}

fn stage_suffix(stage: &Option<Stage>) -> String {
    match stage {
        Some(s) => format!(" (stage {s})"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    /// Tags a range error with the stage it happened in. A stage that is
    /// already set is kept, so the innermost tag wins.
    pub fn at_stage(self, stage: Stage) -> Self {
        match self {
            Error::Range {
                value,
                range,
                stage: None,
            } => Error::Range {
                value,
                range,
                stage: Some(stage),
            },
            other => other,
        }
    }

    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Range { stage, .. } => *stage,
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
