//! Blind assignment of number keys to actions.

use std::collections::BTreeMap;

use miniverse_core::rng::RngStream;
use rand::seq::index;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Digits a subject can press.
pub const DIGITS: std::ops::RangeInclusive<u8> = 1..=9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KeyError {
    #[error("{0} actions cannot be mapped onto 9 digit keys")]
    TooManyActions(usize),
    #[error("at least one action is required")]
    NoActions,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyMapping {
    entries: BTreeMap<u8, usize>,
    n_actions: usize,
}

impl KeyMapping {
    /// Builds a mapping from explicit digits, one per action in action order.
    pub fn from_digits(digits: &[u8]) -> Result<Self, KeyError> {
        if digits.is_empty() {
            return Err(KeyError::NoActions);
        }
        if digits.len() > 9 {
            return Err(KeyError::TooManyActions(digits.len()));
        }
        let entries: BTreeMap<u8, usize> = digits.iter().enumerate().map(|(a, &d)| (d, a)).collect();
        assert!(
            entries.len() == digits.len() && entries.keys().all(|d| DIGITS.contains(d)),
            "digits must be distinct and within 1..=9"
        );
        Ok(Self { entries, n_actions: digits.len() })
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    /// Action bound to `digit`, if any.
    pub fn action(&self, digit: u8) -> Option<usize> {
        self.entries.get(&digit).copied()
    }

    /// Digit bound to `action`.
    pub fn digit(&self, action: usize) -> Option<u8> {
        self.entries.iter().find(|(_, &a)| a == action).map(|(&d, _)| d)
    }

    pub fn entries(&self) -> &BTreeMap<u8, usize> {
        &self.entries
    }
}

/// Draws `n_actions` distinct digits uniformly at random and binds them to
/// the actions in order.
pub fn assign_keys(rng: &mut RngStream, n_actions: usize) -> Result<KeyMapping, KeyError> {
    if n_actions == 0 {
        return Err(KeyError::NoActions);
    }
    if n_actions > 9 {
        return Err(KeyError::TooManyActions(n_actions));
    }
    let digits: Vec<u8> = index::sample(rng, 9, n_actions).into_iter().map(|i| i as u8 + 1).collect();
    KeyMapping::from_digits(&digits)
}
