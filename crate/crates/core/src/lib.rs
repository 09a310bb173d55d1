//! Toolkit for measuring how much dated, labeled news headlines tell us about
//! future market returns.
//!
//! The pipeline runs headlines through a classifier ([`classify`]), counts
//! good and bad news per period ([`corpus`]), and evaluates the resulting news
//! ratios with in-sample predictive regressions ([`econo`]), recursive
//! out-of-sample forecasts and combinations ([`oos`]), and a mean-variance
//! backtest ([`alloc`]). [`novelty`] turns headline embeddings into a news
//! novelty series, and [`simgen`] generates synthetic markets and corpora plus
//! the brute-force oracles used to check every statistic.

pub mod alloc;
pub mod classify;
pub mod cli;
pub mod corpus;
pub mod econo;
pub mod error;
pub mod novelty;
pub mod oos;
pub mod simgen;
pub mod table;
pub mod timeseries;

pub use error::{Error, Result};
