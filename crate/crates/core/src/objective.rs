//! Value-representable objectives and their prefix contexts.
//!
//! A preference over outcome distributions is represented by one exact value
//! per distribution: P1 prefers larger values, P2 smaller ones. Comparing sets
//! of achievable distributions then reduces to comparing best values.
//! The shifted preference after a finite color word `w` is captured by a
//! [`Context`] that summarizes `w`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arena::{Color, Player};
use crate::rational::{self, Rational};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Objective {
    /// Win iff the largest color seen is even.
    WeakParity,
    /// Win iff the color is eventually seen.
    Reach(Color),
    /// Expected λ-discounted sum of colors.
    DiscExpect(Rational),
    /// Probability that the λ-discounted sum is at least the threshold.
    DiscThreshold { lambda: Rational, threshold: Rational },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    WeakParity,
    Reach,
    DiscExpect,
    DiscThreshold,
}

/// Summary of a finite color prefix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Context {
    /// Running maximum; `None` for the empty prefix.
    WeakParity(Option<Color>),
    /// Whether the target color was already seen.
    Reach(bool),
    /// Discounted sum so far and `λ^|w|`.
    Disc { offset: Rational, scale: Rational },
}

/// An objective value tagged with the family that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Value {
    pub family: Family,
    pub amount: Rational,
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rational::format(&self.amount))
    }
}

impl Objective {
    pub fn disc_expect(lambda: Rational) -> Result<Objective, Error> {
        check_lambda(&lambda)?;
        Ok(Objective::DiscExpect(lambda))
    }

    pub fn disc_threshold(lambda: Rational, threshold: Rational) -> Result<Objective, Error> {
        check_lambda(&lambda)?;
        Ok(Objective::DiscThreshold { lambda, threshold })
    }

    pub fn family(&self) -> Family {
        match self {
            Objective::WeakParity => Family::WeakParity,
            Objective::Reach(_) => Family::Reach,
            Objective::DiscExpect(_) => Family::DiscExpect,
            Objective::DiscThreshold { .. } => Family::DiscThreshold,
        }
    }

    pub fn value(&self, amount: Rational) -> Value {
        Value { family: self.family(), amount }
    }

    pub fn initial_context(&self) -> Context {
        match self {
            Objective::WeakParity => Context::WeakParity(None),
            Objective::Reach(_) => Context::Reach(false),
            Objective::DiscExpect(_) | Objective::DiscThreshold { .. } => {
                Context::Disc { offset: Rational::zero(), scale: Rational::one() }
            }
        }
    }

    /// Context after reading one more color.
    pub fn step(&self, ctx: &Context, color: &Color) -> Context {
        match (self, ctx) {
            (Objective::WeakParity, Context::WeakParity(m)) => {
                Context::WeakParity(Some(match m {
                    Some(m) if m >= color => m.clone(),
                    _ => color.clone(),
                }))
            }
            (Objective::Reach(target), Context::Reach(seen)) => Context::Reach(*seen || color == target),
            (
                Objective::DiscExpect(lambda) | Objective::DiscThreshold { lambda, .. },
                Context::Disc { offset, scale },
            ) => Context::Disc { offset: offset + scale * color, scale: scale * lambda },
            _ => panic!("context {ctx:?} does not belong to objective {self}"),
        }
    }

    /// `ctx` shifted by the word `w`.
    pub fn shift(&self, ctx: &Context, word: &[Color]) -> Context {
        word.iter().fold(ctx.clone(), |c, color| self.step(&c, color))
    }

    pub fn context_matches(&self, ctx: &Context) -> bool {
        matches!(
            (self, ctx),
            (Objective::WeakParity, Context::WeakParity(_))
                | (Objective::Reach(_), Context::Reach(_))
                | (Objective::DiscExpect(_) | Objective::DiscThreshold { .. }, Context::Disc { .. })
        )
    }

    /// Checks that the arena colors fit the family.
    pub fn check_colors(&self, colors: &[Color]) -> Result<(), Error> {
        if let Objective::WeakParity = self {
            if let Some(bad) = colors.iter().find(|c| rational::as_natural(c).is_none()) {
                return Err(Error::NonIntegerColor(bad.clone()));
            }
        }
        Ok(())
    }

    /// The finitely many prefix classes reachable over `colors`, each with a
    /// shortest witnessing word, or `Unbounded` for the discounted families.
    pub fn context_classes(&self, colors: &[Color]) -> ContextClasses {
        let mut colors = colors.to_vec();
        colors.sort();
        colors.dedup();
        match self {
            Objective::WeakParity => {
                let mut out = vec![(Context::WeakParity(None), Vec::new())];
                out.extend(colors.iter().map(|c| (Context::WeakParity(Some(c.clone())), vec![c.clone()])));
                ContextClasses::Finite(out)
            }
            Objective::Reach(target) => {
                let mut out = vec![(Context::Reach(false), Vec::new())];
                if colors.contains(target) {
                    out.push((Context::Reach(true), vec![target.clone()]));
                }
                ContextClasses::Finite(out)
            }
            Objective::DiscExpect(_) | Objective::DiscThreshold { .. } => ContextClasses::Unbounded,
        }
    }
}

fn check_lambda(lambda: &Rational) -> Result<(), Error> {
    if !lambda.is_positive() || *lambda >= Rational::one() {
        return Err(Error::InvalidObjective(format!(
            "discount factor must lie in (0,1), got {}",
            rational::format(lambda)
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContextClasses {
    Finite(Vec<(Context, Vec<Color>)>),
    Unbounded,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::WeakParity => f.write_str("weak-parity"),
            Objective::Reach(c) => write!(f, "reach:{}", rational::format(c)),
            Objective::DiscExpect(l) => write!(f, "disc-expect:{}", rational::format(l)),
            Objective::DiscThreshold { lambda, threshold } => {
                write!(f, "disc-threshold:{}:{}", rational::format(lambda), rational::format(threshold))
            }
        }
    }
}

impl FromStr for Objective {
    type Err = Error;

    /// `weak-parity | reach:<color> | disc-expect:<λ> | disc-threshold:<λ>[:<θ>]`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |msg: String| Error::InvalidObjective(msg);
        let rat = |t: &str| rational::parse(t).map_err(|e| bad(e.to_string()));
        let mut parts = s.trim().split(':');
        let head = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        match (head, args.as_slice()) {
            ("weak-parity", []) => Ok(Objective::WeakParity),
            ("reach", [c]) => Ok(Objective::Reach(rat(c)?)),
            ("disc-expect", [l]) => Objective::disc_expect(rat(l)?),
            ("disc-threshold", [l]) => Objective::disc_threshold(rat(l)?, Rational::zero()),
            ("disc-threshold", [l, t]) => Objective::disc_threshold(rat(l)?, rat(t)?),
            _ => Err(bad(format!("unrecognized objective {s:?}"))),
        }
    }
}

/// Exact comparison of two values of the same family.
pub fn compare(v1: &Value, v2: &Value) -> Result<Ordering, Error> {
    if v1.family != v2.family {
        return Err(Error::FamilyMismatch);
    }
    Ok(v1.amount.cmp(&v2.amount))
}

/// Ordering from `player`'s point of view: `Greater` means `a` is strictly preferred.
pub fn preference(player: Player, a: &Rational, b: &Rational) -> Ordering {
    match player {
        Player::One => a.cmp(b),
        Player::Two => b.cmp(a),
    }
}

/// Whether `a` is strictly better than `b` for `player`.
pub fn improves(player: Player, a: &Rational, b: &Rational) -> bool {
    preference(player, a, b) == Ordering::Greater
}
