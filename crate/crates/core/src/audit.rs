//! Potential-function instrumentation for expansion traces.
//!
//! The potential of a state is f(p, q) = p^2 + q^2. Over a raw (unreduced)
//! trace the auditor checks, with exact integer comparisons only:
//!
//! * f strictly decreases across every step, including into the terminal
//!   state, which is taken as (p, 0);
//! * grouping the term sequence left to right, a lone 0 term halves f
//!   (non-strictly), and a term k >= 1 paired with its successor cuts f to
//!   below a quarter — using the raw pair when the successor term is 0, and
//!   the pair halved when the successor term is also >= 1, in which case
//!   both entries must first be even;
//! * the expansion length is at most floor(log2 f) + 1.
//!
//! The factor checks follow the strict/non-strict distinctions of the
//! underlying inequalities literally: halving is checked as 2 f' <= f,
//! quartering as 4 f'' < f.

use std::fmt;

use crate::clog::StepTrace;
use crate::error::{Error, Result};
use crate::nat::{floor_log2_ratio, Natural, RationalPair};

/// f(p, q) = p^2 + q^2, exactly.
pub fn potential<N: Natural>(p: &N, q: &N) -> N {
    p.clone() * p.clone() + q.clone() * q.clone()
}

/// Integer-safe over-approximation of the expansion length bound for
/// p/q >= 1: 2 bitlen(p) + 2. The exact power-comparison form of the bound
/// lives in the bounds module.
pub fn length_upper_bound<N: Natural>(p: &N, q: &N) -> Result<u64> {
    if q.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    if p < q {
        return Err(Error::ImproperRatio {
            p: p.to_string(),
            q: q.to_string(),
        });
    }
    Ok(2 * p.bit_length() + 2)
}

/// How a run of one or two steps was grouped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    /// A lone 0 term; f must at least halve.
    SingleZero,
    /// k >= 1 followed by a 0 term; raw f must drop below a quarter.
    PairThenZero,
    /// k >= 1 followed by k' >= 1; the pair is even and its halved form
    /// must drop below a quarter.
    PairThenPos,
    /// The terminal emission reached as a group opener; no factor applies.
    TrailingUngrouped,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GroupKind::SingleZero => "single-zero",
            GroupKind::PairThenZero => "pair-k-then-zero",
            GroupKind::PairThenPos => "pair-k-then-k",
            GroupKind::TrailingUngrouped => "trailing-ungrouped",
        };
        f.write_str(s)
    }
}

/// One group of the left-to-right partition, with the potential values the
/// factor check compared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupedStep<N> {
    pub kind: GroupKind,
    /// Index of the first step covered.
    pub start: usize,
    /// 1 or 2 steps.
    pub span: usize,
    pub f_before: N,
    /// The value the factor bound is checked against: raw f after the group
    /// for single-zero and pair-k-then-zero, f of the halved pair for
    /// pair-k-then-k, raw terminal f for the trailing marker.
    pub f_after: N,
    pub ok: bool,
}

/// Audit outcome for one trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport<N> {
    pub input: RationalPair<N>,
    /// f of the input state.
    pub potential_start: N,
    /// Expansion length L.
    pub length: u64,
    pub groups: Vec<GroupedStep<N>>,
    /// Every step strictly decreased f.
    pub strict_decrease_ok: bool,
    /// Every lone 0 group satisfied 2 f' <= f.
    pub halving_ok: bool,
    /// Every k-then-0 group satisfied 4 f'' < f.
    pub quarter_after_zero_ok: bool,
    /// Every k-then-k' group had an even pair and satisfied the quarter
    /// bound after halving.
    pub quarter_after_pos_ok: bool,
    /// L <= floor(log2 f) + 1.
    pub length_bound_ok: bool,
    /// floor(log2 f) + 1 for the input state.
    pub step_bound: u64,
}

impl<N: Natural> AuditReport<N> {
    pub fn all_ok(&self) -> bool {
        self.strict_decrease_ok
            && self.halving_ok
            && self.quarter_after_zero_ok
            && self.quarter_after_pos_ok
            && self.length_bound_ok
    }

    /// Text report: header lines, one structured record per group, then one
    /// line per check.
    pub fn render(&self) -> String {
        fn flag(ok: bool) -> &'static str {
            if ok {
                "ok"
            } else {
                "FAIL"
            }
        }
        let mut out = String::new();
        out.push_str(&format!("input {}\n", self.input));
        out.push_str(&format!("potential {}\n", self.potential_start));
        out.push_str(&format!("length {}\n", self.length));
        out.push_str(&format!("step-bound {}\n", self.step_bound));
        for g in &self.groups {
            out.push_str(&format!(
                "group {} at {} span {} f_before {} f_after {} {}\n",
                g.kind,
                g.start,
                g.span,
                g.f_before,
                g.f_after,
                flag(g.ok)
            ));
        }
        out.push_str(&format!("strict-decrease {}\n", flag(self.strict_decrease_ok)));
        out.push_str(&format!("halving {}\n", flag(self.halving_ok)));
        out.push_str(&format!(
            "quarter-after-zero {}\n",
            flag(self.quarter_after_zero_ok)
        ));
        out.push_str(&format!(
            "quarter-after-pos {}\n",
            flag(self.quarter_after_pos_ok)
        ));
        out.push_str(&format!("length-bound {}\n", flag(self.length_bound_ok)));
        out
    }
}

fn malformed(index: usize, detail: impl Into<String>) -> Error {
    Error::MalformedTrace {
        index,
        detail: detail.into(),
    }
}

/// Replays the step recurrence through the trace and errors (with the
/// offending index) on any inconsistency. The auditor applies the
/// division-by-2 of the paired-positive case itself, so traces recorded with
/// intermediate reduction are rejected.
fn validate_raw_trace<N: Natural>(t: &StepTrace<N>) -> Result<()> {
    if t.steps.is_empty() {
        return Err(malformed(0, "trace has no steps"));
    }
    if t.steps.len() != t.expansion.len() {
        return Err(malformed(0, "step count differs from expansion length"));
    }
    if t.steps[0].before != t.input {
        return Err(malformed(0, "first state differs from the input"));
    }
    let last = t.steps.len() - 1;
    for (i, rec) in t.steps.iter().enumerate() {
        if rec.reduced {
            return Err(malformed(i, "trace was recorded with reduction enabled"));
        }
        if rec.k != t.expansion.terms()[i] {
            return Err(malformed(i, "term differs from the expansion"));
        }
        let k = floor_log2_ratio(&rec.before.p, &rec.before.q)
            .map_err(|e| malformed(i, format!("invalid state: {e}")))?;
        if k != rec.k {
            return Err(malformed(i, "term differs from the floor exponent"));
        }
        let shifted = rec.before.q.shift_left(k);
        let terminal = shifted == rec.before.p;
        match (&rec.after, terminal) {
            (None, true) => {
                if i != last {
                    return Err(malformed(i, "terminal emission before the last step"));
                }
            }
            (None, false) => return Err(malformed(i, "marked terminal but p != 2^k q")),
            (Some(_), true) => return Err(malformed(i, "p = 2^k q must be terminal")),
            (Some(after), false) => {
                if i == last {
                    return Err(malformed(i, "last step must be the terminal emission"));
                }
                let expect_q = rec.before.p.clone() - shifted.clone();
                if after.p != shifted || after.q != expect_q {
                    return Err(malformed(i, "successor differs from the step recurrence"));
                }
                if t.steps[i + 1].before != *after {
                    return Err(malformed(i + 1, "state differs from predecessor successor"));
                }
            }
        }
    }
    Ok(())
}

/// Audits one raw trace: validates it, checks the strict decrease of f at
/// every step, partitions the terms left to right and checks each group's
/// contraction factor, and compares L against floor(log2 f) + 1.
pub fn audit_trace<N: Natural>(t: &StepTrace<N>) -> Result<AuditReport<N>> {
    validate_raw_trace(t)?;

    let len = t.steps.len();
    // f over the state sequence, with the state after the terminal emission
    // taken as (p, 0).
    let mut f = Vec::with_capacity(len + 1);
    for rec in &t.steps {
        f.push(potential(&rec.before.p, &rec.before.q));
    }
    let terminal_p = &t.steps[len - 1].before.p;
    f.push(terminal_p.clone() * terminal_p.clone());

    let strict_decrease_ok = f.windows(2).all(|w| w[1] < w[0]);

    // The raw pair the algorithm holds after step i (virtual (p, 0) for the
    // terminal emission).
    let pair_after = |i: usize| -> (N, N) {
        match &t.steps[i].after {
            Some(pair) => (pair.p.clone(), pair.q.clone()),
            None => (t.steps[i].before.p.clone(), N::zero()),
        }
    };

    let mut groups = Vec::new();
    let mut halving_ok = true;
    let mut quarter_after_zero_ok = true;
    let mut quarter_after_pos_ok = true;

    let mut i = 0;
    while i < len {
        let terminal = t.steps[i].after.is_none();
        if terminal {
            groups.push(GroupedStep {
                kind: GroupKind::TrailingUngrouped,
                start: i,
                span: 1,
                f_before: f[i].clone(),
                f_after: f[i + 1].clone(),
                ok: true,
            });
            i += 1;
        } else if t.steps[i].k == 0 {
            let ok = f[i + 1].shift_left(1) <= f[i];
            halving_ok &= ok;
            groups.push(GroupedStep {
                kind: GroupKind::SingleZero,
                start: i,
                span: 1,
                f_before: f[i].clone(),
                f_after: f[i + 1].clone(),
                ok,
            });
            i += 1;
        } else {
            // k >= 1: group with the following step, which exists because a
            // non-terminal step always has a successor.
            let (pp, qq) = pair_after(i + 1);
            let (kind, f_after, ok) = if t.steps[i + 1].k == 0 {
                let fa = potential(&pp, &qq);
                let ok = fa.shift_left(2) < f[i];
                quarter_after_zero_ok &= ok;
                (GroupKind::PairThenZero, fa, ok)
            } else {
                let even = pp.is_even() && qq.is_even();
                let fa = potential(&pp.shift_right(1), &qq.shift_right(1));
                let ok = even && fa.shift_left(2) < f[i];
                quarter_after_pos_ok &= ok;
                (GroupKind::PairThenPos, fa, ok)
            };
            groups.push(GroupedStep {
                kind,
                start: i,
                span: 2,
                f_before: f[i].clone(),
                f_after,
                ok,
            });
            i += 2;
        }
    }

    let potential_start = f[0].clone();
    let step_bound = potential_start.bit_length();
    let length = len as u64;
    let length_bound_ok = length <= step_bound;

    Ok(AuditReport {
        input: t.input.clone(),
        potential_start,
        length,
        groups,
        strict_decrease_ok,
        halving_ok,
        quarter_after_zero_ok,
        quarter_after_pos_ok,
        length_bound_ok,
        step_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clog::trace;

    #[test]
    fn potential_examples() {
        assert_eq!(potential(&96u64, &7), 9265);
        assert_eq!(potential(&1u64, &1), 2);
        assert_eq!(potential(&56u64, &40), 4736);
    }

    #[test]
    fn length_upper_bound_examples() {
        assert_eq!(length_upper_bound(&96u64, &7).unwrap(), 16);
        assert_eq!(length_upper_bound(&1u64, &1).unwrap(), 4);
        assert_eq!(length_upper_bound(&31u64, &1).unwrap(), 12);
        assert!(length_upper_bound(&3u64, &5).is_err());
    }

    #[test]
    fn audit_of_the_worked_example() {
        let t = trace(&96u64, &7, false).unwrap();
        let r = audit_trace(&t).unwrap();
        assert!(r.all_ok());
        assert_eq!(r.potential_start, 9265);
        assert_eq!(r.step_bound, 14);
        assert_eq!(r.length, 4);
        assert_eq!(r.groups.len(), 2);

        assert_eq!(r.groups[0].kind, GroupKind::PairThenZero);
        assert_eq!(r.groups[0].f_before, 9265);
        assert_eq!(r.groups[0].f_after, 1856);

        // Second group pairs with the terminal emission: raw (32, 0) halves
        // to (16, 0), and 4 * 256 = 1024 < 1856.
        assert_eq!(r.groups[1].kind, GroupKind::PairThenPos);
        assert_eq!(r.groups[1].f_before, 1856);
        assert_eq!(r.groups[1].f_after, 256);
    }

    #[test]
    fn audit_of_the_trivial_input() {
        let t = trace(&1u64, &1, false).unwrap();
        let r = audit_trace(&t).unwrap();
        assert!(r.all_ok());
        // No lemma-checked groups, only the trailing marker.
        assert_eq!(r.groups.len(), 1);
        assert_eq!(r.groups[0].kind, GroupKind::TrailingUngrouped);
        assert_eq!(r.step_bound, 2);
    }

    #[test]
    fn audit_of_seven() {
        let t = trace(&7u64, &1, false).unwrap();
        let r = audit_trace(&t).unwrap();
        assert!(r.all_ok());
        assert_eq!(r.groups.len(), 2);
        assert_eq!(r.groups[0].kind, GroupKind::PairThenZero);
        assert_eq!(r.groups[0].f_before, 50);
        assert_eq!(r.groups[0].f_after, 10);
        // (3,1) ->1 (2,1) ->1 terminal: raw (2, 0) halves to (1, 0).
        assert_eq!(r.groups[1].kind, GroupKind::PairThenPos);
        assert_eq!(r.groups[1].f_before, 10);
        assert_eq!(r.groups[1].f_after, 1);
    }

    #[test]
    fn audit_covers_a_single_zero_group() {
        // 3/2 = <0,1>: a lone zero group, then the trailing terminal term.
        let t = trace(&3u64, &2, false).unwrap();
        let r = audit_trace(&t).unwrap();
        assert!(r.all_ok());
        assert_eq!(r.groups.len(), 2);
        assert_eq!(r.groups[0].kind, GroupKind::SingleZero);
        assert_eq!(r.groups[0].f_before, 13);
        assert_eq!(r.groups[0].f_after, 5);
        assert_eq!(r.groups[1].kind, GroupKind::TrailingUngrouped);
    }

    #[test]
    fn audit_range_all_flags_hold() {
        for p in 1u64..=150 {
            for q in 1..=p {
                let t = trace(&p, &q, false).unwrap();
                let r = audit_trace(&t).unwrap();
                assert!(r.all_ok(), "audit failed at p={p} q={q}:\n{}", r.render());
            }
        }
    }

    #[test]
    fn consecutive_positive_terms_leave_an_even_pair() {
        for p in 1u64..=200 {
            for q in 1..=p {
                let t = trace(&p, &q, false).unwrap();
                for w in t.steps.windows(2) {
                    if w[0].k >= 1 && w[1].k >= 1 {
                        let (pp, qq) = match &w[1].after {
                            Some(pair) => (pair.p, pair.q),
                            None => (w[1].before.p, 0),
                        };
                        assert!(pp % 2 == 0 && qq % 2 == 0, "p={p} q={q}");
                    }
                }
            }
        }
    }

    #[test]
    fn audit_rejects_reduced_traces() {
        let t = trace(&96u64, &7, true).unwrap();
        assert!(matches!(
            audit_trace(&t),
            Err(Error::MalformedTrace { index: 0, .. })
        ));
    }

    #[test]
    fn audit_rejects_tampered_traces() {
        let mut t = trace(&96u64, &7, false).unwrap();
        if let Some(pair) = &mut t.steps[2].after {
            pair.q += 1;
        }
        let err = audit_trace(&t).unwrap_err();
        assert!(matches!(err, Error::MalformedTrace { index: 2, .. }), "{err}");
    }

    #[test]
    fn audit_report_renders_group_records() {
        let t = trace(&96u64, &7, false).unwrap();
        let r = audit_trace(&t).unwrap();
        let text = r.render();
        assert!(text.contains("input 96/7"));
        assert!(text.contains("potential 9265"));
        assert!(text.contains("group pair-k-then-zero at 0 span 2 f_before 9265 f_after 1856 ok"));
        assert!(text.contains("group pair-k-then-k at 2 span 2 f_before 1856 f_after 256 ok"));
        assert!(text.contains("length-bound ok"));
    }

    #[test]
    fn potential_matches_brute_force_on_random_wide_values() {
        use num_bigint::BigUint;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..10_000 {
            let len = rng.gen_range(1..=32);
            let p_bytes: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            let q_bytes: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            let p = BigUint::from_bytes_le(&p_bytes);
            let q = BigUint::from_bytes_le(&q_bytes);
            let brute = &p * &p + &q * &q;
            assert_eq!(potential(&p, &q), brute);
        }
    }
}
