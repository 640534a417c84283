//! The continued logarithm algorithm on rational pairs: single step, full
//! expansion, evaluation (the inverse), the step traces the audit consumes,
//! and the two complexity measures L (term count) and T (term sum).
//!
//! A state (p, q) with p >= q >= 1 either terminates — p = 2^k q emits the
//! final term k — or steps to (2^k q, p - 2^k q) where k is the floor
//! exponent of p/q. Every non-terminal successor again satisfies
//! p' > q' >= 1, and the potential p^2 + q^2 strictly decreases, which is
//! asserted on every step and guarantees termination.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::nat::{floor_log2_ratio, pow2_multiple_exponent, reduce_pow2, Natural, RationalPair};

/// A finite expansion ⟨k0, k1, ..., kn⟩; always at least one term.
///
/// Canonical form — what the algorithm produces — is a single term of any
/// value, or a multi-term sequence whose final term is at least 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Expansion {
    terms: Vec<u64>,
}

impl Expansion {
    pub fn new(terms: Vec<u64>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyExpansion);
        }
        Ok(Expansion { terms })
    }

    pub fn terms(&self) -> &[u64] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Sum of the terms (the measure T of the value expanded).
    pub fn term_sum(&self) -> u64 {
        self.terms.iter().copied().sum()
    }

    pub fn is_canonical(&self) -> bool {
        self.terms.len() == 1 || *self.terms.last().expect("non-empty") >= 1
    }
}

/// Serializes as comma-separated terms in angle brackets: `<3,0,1,2>`.
impl fmt::Display for Expansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ">")
    }
}

/// Accepts `<3,0,1,2>` and the bare form `3,0,1,2`.
impl FromStr for Expansion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let inner = s
            .strip_prefix('<')
            .and_then(|r| r.strip_suffix('>'))
            .unwrap_or(s);
        if inner.trim().is_empty() {
            return Err(Error::EmptyExpansion);
        }
        let terms = inner
            .split(',')
            .map(|t| {
                t.trim().parse::<u64>().map_err(|e| Error::InvalidParameter {
                    name: "expansion term",
                    detail: format!("{t:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Expansion::new(terms)
    }
}

/// What a single step produced besides its term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome<N> {
    /// p was exactly 2^k q; the algorithm stops.
    Terminal,
    Next(RationalPair<N>),
}

/// One step: for p >= q >= 1 returns the emitted term and either the next
/// state (2^k q, p - 2^k q) or the terminal marker.
pub fn step<N: Natural>(state: &RationalPair<N>) -> Result<(u64, StepOutcome<N>)> {
    let p = &state.p;
    let q = &state.q;
    let k = floor_log2_ratio(p, q)?;
    let shifted = q.shift_left(k);
    if shifted == *p {
        return Ok((k, StepOutcome::Terminal));
    }
    let next_p = shifted;
    let next_q = p.clone() - next_p.clone();
    // p < 2^(k+1) q gives 2^k q > p - 2^k q, so the successor is again a
    // proper state.
    assert!(
        next_p > next_q && !next_q.is_zero(),
        "step must yield p' > q' >= 1"
    );
    Ok((k, StepOutcome::Next(RationalPair { p: next_p, q: next_q })))
}

fn potential_of<N: Natural>(p: &N, q: &N) -> N {
    p.clone() * p.clone() + q.clone() * q.clone()
}

/// Full expansion of p/q >= 1.
///
/// With `reduce` set, common powers of two are divided out of every
/// intermediate state; the resulting expansion is identical either way, and
/// the reduced run keeps intermediate bit growth down. The potential
/// p^2 + q^2 is asserted to drop strictly at every step.
pub fn expand<N: Natural>(p: &N, q: &N, reduce: bool) -> Result<Expansion> {
    let mut state = RationalPair::new(p.clone(), q.clone())?;
    let mut terms = Vec::new();
    let mut f = potential_of(&state.p, &state.q);
    loop {
        let (k, outcome) = step(&state)?;
        terms.push(k);
        match outcome {
            StepOutcome::Terminal => break,
            StepOutcome::Next(next) => {
                state = if reduce { next.reduced_pow2() } else { next };
                let f_next = potential_of(&state.p, &state.q);
                assert!(f_next < f, "potential must strictly decrease");
                f = f_next;
            }
        }
    }
    let e = Expansion::new(terms)?;
    debug_assert!(e.is_canonical());
    Ok(e)
}

/// Number of terms L of the expansion of p/q.
pub fn measure_l<N: Natural>(p: &N, q: &N) -> Result<u64> {
    Ok(expand(p, q, true)?.len() as u64)
}

/// Sum of terms T of the expansion of p/q.
pub fn measure_t<N: Natural>(p: &N, q: &N) -> Result<u64> {
    Ok(expand(p, q, true)?.term_sum())
}

/// Evaluates an expansion back to a rational pair in lowest terms.
///
/// Folds right to left: the innermost term k_n starts as (2^k_n, 1) and each
/// enclosing term k maps (a, b) to (2^k (a + b), a). The pair is then
/// reduced by powers of two and a full gcd so round trips compare as plain
/// pair equality.
pub fn evaluate<N: Natural>(e: &Expansion) -> Result<RationalPair<N>> {
    let mut terms = e.terms().iter().rev();
    let k_last = *terms.next().ok_or(Error::EmptyExpansion)?;
    let mut a = N::one().shift_left(k_last);
    let mut b = N::one();
    for &k in terms {
        let next_a = (a.clone() + b).shift_left(k);
        b = a;
        a = next_a;
    }
    let pair = RationalPair::new(a, b)?;
    let (p, q) = reduce_pow2(&pair.p, &pair.q)?;
    Ok(RationalPair { p, q }.reduced_full())
}

/// Per-step record of one expansion run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord<N> {
    /// Term emitted by this step.
    pub k: u64,
    /// State the step consumed.
    pub before: RationalPair<N>,
    /// Successor state, after the optional power-of-two reduction; `None`
    /// marks the terminal emission.
    pub after: Option<RationalPair<N>>,
    /// Whether reduce_pow2 changed the successor.
    pub reduced: bool,
}

/// Materialized run of the algorithm; `steps` and `expansion` agree term by
/// term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepTrace<N> {
    pub input: RationalPair<N>,
    pub steps: Vec<StepRecord<N>>,
    pub expansion: Expansion,
}

impl<N: Natural> StepTrace<N> {
    /// Line-oriented wire form: one record `step k p q p' q'` per step, with
    /// the terminal emission rendered as p' = p and q' = 0.
    pub fn render_lines(&self) -> String {
        let mut out = String::new();
        for rec in &self.steps {
            let (ap, aq) = match &rec.after {
                Some(pair) => (pair.p.to_string(), pair.q.to_string()),
                None => (rec.before.p.to_string(), "0".to_string()),
            };
            out.push_str(&format!(
                "step {} {} {} {} {}\n",
                rec.k, rec.before.p, rec.before.q, ap, aq
            ));
        }
        out
    }
}

/// Runs the algorithm and records every step.
pub fn trace<N: Natural>(p: &N, q: &N, reduce: bool) -> Result<StepTrace<N>> {
    let input = RationalPair::new(p.clone(), q.clone())?;
    let mut state = input.clone();
    let mut steps = Vec::new();
    let mut terms = Vec::new();
    loop {
        let (k, outcome) = step(&state)?;
        terms.push(k);
        match outcome {
            StepOutcome::Terminal => {
                steps.push(StepRecord {
                    k,
                    before: state,
                    after: None,
                    reduced: false,
                });
                break;
            }
            StepOutcome::Next(next) => {
                let stored = if reduce { next.reduced_pow2() } else { next.clone() };
                let reduced = stored != next;
                steps.push(StepRecord {
                    k,
                    before: state,
                    after: Some(stored.clone()),
                    reduced,
                });
                state = stored;
            }
        }
    }
    Ok(StepTrace {
        input,
        steps,
        expansion: Expansion::new(terms)?,
    })
}
