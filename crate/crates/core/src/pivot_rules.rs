//! Pivot selection: MinorP and MajorP, their reversal-avoiding provisos, the
//! pre-pivot row adjustment policies, and the lookahead procedure used when a
//! reversal of an earlier MajorP choice cannot be avoided.
//!
//! MinorP runs when `q_(p+1) = 0`: among rows with negative `q` whose
//! non-basic pair column has a nonzero last-row entry, it picks the row with
//! the smallest `|q|` (ties by the strongest MajorP setup, then the smallest
//! index) and pivots that row on its non-basic pair column. MajorP runs when
//! `q_(p+1) > 0`: it picks the column with the largest positive last-row
//! entry (ties to the smallest index) and pivots in that column's pair row,
//! preferring columns that do not evict an earlier MinorP selection.
//! Columns chosen by MajorP are candidate solution-basis columns; a pivot
//! that would evict one of them from the basis is a reversal and is only
//! executed when the lookahead shows the algorithm then stops.

use std::fmt;

use crate::arith::Scalar;
use crate::tableau::{Tableau, TableauError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    MinorP,
    MajorP,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::MinorP => write!(f, "MinorP"),
            Phase::MajorP => write!(f, "MajorP"),
        }
    }
}

/// Pre-pivot row adjustment policy. `Direct` pivots on nonzero entries of
/// either sign and only adds a multiple of the last row when the pivot entry
/// is exactly zero; `Positivize` follows the literal "add a suitable
/// multiple" reading and makes the relevant entries strictly positive before
/// every pivot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdjustPolicy {
    #[default]
    Direct,
    Positivize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProvisoNote {
    None,
    AvoidedReversal,
    LookaheadStop,
}

impl ProvisoNote {
    pub fn as_str(&self) -> Option<&'static str> {
        match self {
            ProvisoNote::None => None,
            ProvisoNote::AvoidedReversal => Some("avoided-reversal"),
            ProvisoNote::LookaheadStop => Some("lookahead-stop"),
        }
    }
}

/// One MinorP or MajorP decision: the pair row to pivot in, the chosen pair
/// column (always the non-basic member at selection time), an optional row
/// adjustment applied before the pivot, and how the proviso resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct PivotSelection<N> {
    pub phase: Phase,
    pub pair: usize,
    pub column: usize,
    pub adjustment: Option<N>,
    pub proviso: ProvisoNote,
}

/// Columns pivoted into the basis so far, by phase. MajorP selections are
/// the candidate solution-basis columns both provisos protect outright;
/// MinorP selections are protected only against MajorP displacement, and
/// only for as long as a displacement-free alternative exists.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MajorHistory {
    selected: Vec<usize>,
    minor_selected: Vec<usize>,
}

impl MajorHistory {
    pub fn new() -> Self {
        MajorHistory::default()
    }

    /// Is this column a protected MajorP selection?
    pub fn contains(&self, column: usize) -> bool {
        self.selected.contains(&column)
    }

    pub fn minor_contains(&self, column: usize) -> bool {
        self.minor_selected.contains(&column)
    }

    pub fn record(&mut self, column: usize) {
        if !self.contains(column) {
            self.selected.push(column);
        }
    }

    pub fn record_minor(&mut self, column: usize) {
        if !self.minor_contains(column) {
            self.minor_selected.push(column);
        }
    }

    /// Drops a column evicted from the basis, whichever phase chose it.
    /// Returns whether a protected MajorP selection was evicted.
    pub fn remove(&mut self, column: usize) -> bool {
        let before = self.selected.len();
        self.selected.retain(|&c| c != column);
        self.minor_selected.retain(|&c| c != column);
        before != self.selected.len()
    }

    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn minor_selected(&self) -> &[usize] {
        &self.minor_selected
    }
}

/// How a candidate interacts with the protected column sets: `Hard` evicts a
/// MajorP selection (requires the stopping lookahead), `Soft` evicts a
/// MinorP selection (avoided when possible), `Free` evicts neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Blocking {
    Free,
    Soft,
    Hard,
}

fn classify_blocking<N: Scalar>(
    tableau: &Tableau<N>,
    history: &MajorHistory,
    candidate: &Candidate,
) -> Result<Blocking, SelectionError> {
    let basic = tableau.basic_column(candidate.pair)?;
    Ok(if history.contains(basic) {
        Blocking::Hard
    } else if history.minor_contains(basic) {
        Blocking::Soft
    } else {
        Blocking::Free
    })
}

/// A pivot candidate: the pair row and the (non-basic) pair column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    pub pair: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SelectionError {
    #[error("no admissible {phase} candidate")]
    NoCandidate { phase: Phase },
    #[error(
        "lookahead over {phase} candidates found no stopping pivot \
         (all candidates reverse an earlier MajorP selection and none stops)"
    )]
    LookaheadFailed { phase: Phase },
    #[error(transparent)]
    Tableau(#[from] TableauError),
}

/// MinorP selection. Requires `q_(p+1) = 0` with at least one negative
/// `q_j`; candidate rows must also carry a nonzero last-row entry at their
/// non-basic pair column so that the pivot hands control to a MajorP.
///
/// Rows are taken by increasing `|q|`. An exact `|q|` tie goes to the row
/// whose pivot sets up the strongest following MajorP (the largest positive
/// entry left in the last row), then to the smaller row index; the reference
/// runs demand this one-step look at the setup strength, and it matches the
/// role of MinorP as preparation for the MajorP that follows.
pub fn select_minorp<N: Scalar>(
    tableau: &Tableau<N>,
    history: &MajorHistory,
    policy: AdjustPolicy,
) -> Result<PivotSelection<N>, SelectionError> {
    debug_assert!(tableau.is_zero(tableau.q_last()));
    let p = tableau.pairs();
    let mut scored: Vec<(N, Candidate)> = Vec::new();
    for pair in 1..=p {
        if !tableau.is_negative(tableau.q(pair)) {
            continue;
        }
        let column = tableau.nonbasic_column(pair)?;
        if tableau.is_zero(tableau.at(p + 1, column)) {
            continue;
        }
        scored.push((tableau.q(pair).abs_value(), Candidate { pair, column }));
    }
    scored.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("tableau entries are finite")
            .then(a.1.pair.cmp(&b.1.pair))
    });
    stabilize_near_ties(tableau.epsilon(), &mut scored, |c| c.pair);
    let ordered = break_minor_ties(tableau, scored, policy);
    if ordered.is_empty() {
        return Err(SelectionError::NoCandidate {
            phase: Phase::MinorP,
        });
    }
    apply_proviso(tableau, Phase::MinorP, &ordered, history, policy)
}

/// Reorders groups of candidates with exactly equal `|q|` by decreasing
/// setup strength (candidates whose simulation fails sort last), keeping the
/// index order within remaining ties.
fn break_minor_ties<N: Scalar>(
    tableau: &Tableau<N>,
    scored: Vec<(N, Candidate)>,
    policy: AdjustPolicy,
) -> Vec<Candidate> {
    let mut ordered = Vec::with_capacity(scored.len());
    let mut group_start = 0;
    while group_start < scored.len() {
        let mut group_end = group_start + 1;
        while group_end < scored.len()
            && (scored[group_end].0.clone() - scored[group_start].0.clone()).abs_value()
                <= *tableau.epsilon()
        {
            group_end += 1;
        }
        if group_end - group_start == 1 {
            ordered.push(scored[group_start].1);
        } else {
            let mut group: Vec<(Option<N>, Candidate)> = scored[group_start..group_end]
                .iter()
                .map(|(_, c)| (setup_strength(tableau, c, policy), *c))
                .collect();
            group.sort_by(|a, b| match (&a.0, &b.0) {
                (Some(x), Some(y)) => y
                    .partial_cmp(x)
                    .expect("tableau entries are finite")
                    .then(a.1.pair.cmp(&b.1.pair)),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => a.1.pair.cmp(&b.1.pair),
            });
            // Near-equal strengths are ties too; keep them in index order.
            let mut keyed: Vec<(N, Candidate)> = group
                .iter()
                .take_while(|(strength, _)| strength.is_some())
                .map(|(strength, c)| (strength.clone().unwrap(), *c))
                .collect();
            stabilize_near_ties(tableau.epsilon(), &mut keyed, |c| c.pair);
            for (slot, (_, candidate)) in group.iter_mut().zip(&keyed) {
                slot.1 = *candidate;
            }
            ordered.extend(group.into_iter().map(|(_, c)| c));
        }
        group_start = group_end;
    }
    ordered
}

/// The largest positive last-row entry available to the MajorP that would
/// follow this MinorP pivot; `None` when the pivot fails or leaves no
/// positive entry.
fn setup_strength<N: Scalar>(
    tableau: &Tableau<N>,
    candidate: &Candidate,
    policy: AdjustPolicy,
) -> Option<N> {
    let mut sim = tableau.clone();
    let adjustment = compute_adjustment(&sim, candidate, Phase::MinorP, policy).ok()?;
    if let Some(alpha) = adjustment {
        sim.add_row_multiple(candidate.pair, &alpha);
    }
    sim.gj_pivot(candidate.pair, candidate.column).ok()?;
    if sim.is_negative(sim.q_last()) {
        sim.negate_last_row();
    }
    let p = sim.pairs();
    let mut best: Option<N> = None;
    for k in 1..=2 * p {
        let v = sim.at(p + 1, k);
        if sim.is_positive(v) && best.as_ref().is_none_or(|b| *v > *b) {
            best = Some(v.clone());
        }
    }
    best
}

/// MajorP selection. Requires `q_(p+1) > 0` (the caller normalizes the sign
/// first); candidates are the columns with a positive last-row entry, taken
/// by decreasing entry and increasing index, subject to the proviso tiers.
pub fn select_majorp<N: Scalar>(
    tableau: &Tableau<N>,
    history: &MajorHistory,
    policy: AdjustPolicy,
) -> Result<PivotSelection<N>, SelectionError> {
    debug_assert!(tableau.is_positive(tableau.q_last()));
    let ordered = majorp_candidates(tableau);
    if ordered.is_empty() {
        return Err(SelectionError::NoCandidate {
            phase: Phase::MajorP,
        });
    }
    apply_proviso(tableau, Phase::MajorP, &ordered, history, policy)
}

fn majorp_candidates<N: Scalar>(tableau: &Tableau<N>) -> Vec<Candidate> {
    let p = tableau.pairs();
    let mut scored: Vec<(N, Candidate)> = Vec::new();
    for column in 1..=2 * p {
        let value = tableau.at(p + 1, column);
        if !tableau.is_positive(value) {
            continue;
        }
        let pair = if column <= p { column } else { column - p };
        scored.push((value.clone(), Candidate { pair, column }));
    }
    scored.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .expect("tableau entries are finite")
            .then(a.1.column.cmp(&b.1.column))
    });
    stabilize_near_ties(tableau.epsilon(), &mut scored, |c| c.column);
    scored.into_iter().map(|(_, c)| c).collect()
}

/// Scans candidates in rule order under the proviso. MinorP must not evict a
/// MajorP selection; MajorP additionally prefers candidates that do not
/// evict a MinorP selection, falling back to the best such candidate when no
/// fully free one exists. When every candidate would evict a MajorP
/// selection, the lookahead must certify that the chosen reversal stops the
/// algorithm.
fn apply_proviso<N: Scalar>(
    tableau: &Tableau<N>,
    phase: Phase,
    ordered: &[Candidate],
    history: &MajorHistory,
    policy: AdjustPolicy,
) -> Result<PivotSelection<N>, SelectionError> {
    let mut blockings = Vec::with_capacity(ordered.len());
    for candidate in ordered {
        blockings.push(classify_blocking(tableau, history, candidate)?);
    }
    let finish = |rank: usize| -> Result<PivotSelection<N>, SelectionError> {
        let candidate = &ordered[rank];
        let adjustment = compute_adjustment(tableau, candidate, phase, policy)?;
        Ok(PivotSelection {
            phase,
            pair: candidate.pair,
            column: candidate.column,
            adjustment,
            proviso: if rank == 0 {
                ProvisoNote::None
            } else {
                ProvisoNote::AvoidedReversal
            },
        })
    };
    let admissible = |b: Blocking| match phase {
        // MinorP evicting another MinorP selection is ordinary play.
        Phase::MinorP => b != Blocking::Hard,
        Phase::MajorP => b == Blocking::Free,
    };
    if let Some(rank) = (0..ordered.len()).find(|&i| admissible(blockings[i])) {
        return finish(rank);
    }
    if phase == Phase::MajorP {
        // No free column: displace a MinorP selection rather than a MajorP
        // one, in rule order.
        if let Some(rank) = (0..ordered.len()).find(|&i| blockings[i] == Blocking::Soft) {
            return finish(rank);
        }
    }
    let chosen = lookahead_stop(tableau, ordered, phase, history, policy)?;
    let adjustment = compute_adjustment(tableau, &chosen, phase, policy)?;
    Ok(PivotSelection {
        phase,
        pair: chosen.pair,
        column: chosen.column,
        adjustment,
        proviso: ProvisoNote::LookaheadStop,
    })
}

/// Examines candidates in rule order and returns the first whose pivot stops
/// the algorithm: for MajorP-phase candidates the stop must show immediately
/// after the pivot; for MinorP-phase candidates the simulation also runs the
/// MajorP that follows (plain selection, no nested proviso). Candidates whose
/// simulation hits a zero pivot are disqualified.
pub fn lookahead_stop<N: Scalar>(
    tableau: &Tableau<N>,
    candidates: &[Candidate],
    phase: Phase,
    history: &MajorHistory,
    policy: AdjustPolicy,
) -> Result<Candidate, SelectionError> {
    for candidate in candidates {
        if simulation_stops(tableau, candidate, phase, history, policy) {
            return Ok(*candidate);
        }
    }
    Err(SelectionError::LookaheadFailed { phase })
}

fn simulation_stops<N: Scalar>(
    tableau: &Tableau<N>,
    candidate: &Candidate,
    phase: Phase,
    history: &MajorHistory,
    policy: AdjustPolicy,
) -> bool {
    let mut sim = tableau.clone();
    let adjustment = match compute_adjustment(&sim, candidate, phase, policy) {
        Ok(a) => a,
        Err(_) => return false,
    };
    if let Some(alpha) = adjustment {
        sim.add_row_multiple(candidate.pair, &alpha);
    }
    if sim.gj_pivot(candidate.pair, candidate.column).is_err() {
        return false;
    }
    if sim.is_solution_state() || sim.is_no_solution_state() {
        return true;
    }
    match phase {
        Phase::MajorP => false,
        Phase::MinorP => {
            if sim.is_negative(sim.q_last()) {
                sim.negate_last_row();
            }
            if !sim.is_positive(sim.q_last()) {
                return false;
            }
            let ordered = majorp_candidates(&sim);
            if ordered.is_empty() {
                return false;
            }
            // Mirror the real continuation: prefer a non-evicting column,
            // then one evicting only a MinorP selection, else rule order
            // (no nested lookahead).
            let mut next = None;
            let mut soft = None;
            for candidate in &ordered {
                match classify_blocking(&sim, history, candidate) {
                    Ok(Blocking::Free) => {
                        next = Some(*candidate);
                        break;
                    }
                    Ok(Blocking::Soft) if soft.is_none() => soft = Some(*candidate),
                    _ => {}
                }
            }
            let next = match next.or(soft).or_else(|| ordered.first().copied()) {
                Some(c) => c,
                None => return false,
            };
            let adjustment =
                match compute_adjustment(&sim, &next, Phase::MajorP, policy) {
                    Ok(a) => a,
                    Err(_) => return false,
                };
            if let Some(alpha) = adjustment {
                sim.add_row_multiple(next.pair, &alpha);
            }
            if sim.gj_pivot(next.pair, next.column).is_err() {
                return false;
            }
            sim.is_solution_state() || sim.is_no_solution_state()
        }
    }
}

/// Reorders runs of near-equal keys (within the zero tolerance) by `index`
/// so float noise cannot flip an exact tie; the slice must already be sorted
/// by key. Exact mode has tolerance zero, where this repeats the sort's own
/// index tiebreak.
fn stabilize_near_ties<N: Scalar>(
    epsilon: &N,
    scored: &mut [(N, Candidate)],
    index: impl Fn(&Candidate) -> usize,
) {
    let mut start = 0;
    for i in 1..=scored.len() {
        let in_run = i < scored.len()
            && (scored[i].0.clone() - scored[start].0.clone()).abs_value() <= *epsilon;
        if !in_run {
            if i - start > 1 {
                scored[start..i].sort_by_key(|(_, c)| index(c));
            }
            start = i;
        }
    }
}

/// Smallest integer strictly greater than `bound`.
fn next_int_above<N: Scalar>(bound: &N) -> N {
    bound.floor_value() + N::one()
}

/// Largest integer strictly less than `bound`.
fn next_int_below<N: Scalar>(bound: &N) -> N {
    -next_int_above(&-bound.clone())
}

/// Computes the optional `alpha` for `row_pair += alpha * row_(p+1)` before
/// the pivot. Under `Direct` an adjustment happens only for an exactly-zero
/// pivot entry; under `Positivize` it enforces a positive pivot entry (and,
/// for MajorP, a positive `q` in the pivot row). The smallest integer
/// satisfying the strict constraints is chosen.
fn compute_adjustment<N: Scalar>(
    tableau: &Tableau<N>,
    candidate: &Candidate,
    phase: Phase,
    policy: AdjustPolicy,
) -> Result<Option<N>, SelectionError> {
    let p = tableau.pairs();
    let entry = tableau.at(candidate.pair, candidate.column).clone();
    let last_entry = tableau.at(p + 1, candidate.column).clone();
    let needs_adjustment = match (phase, policy) {
        (_, AdjustPolicy::Direct) => tableau.is_zero(&entry),
        (Phase::MinorP, AdjustPolicy::Positivize) => !tableau.is_positive(&entry),
        (Phase::MajorP, AdjustPolicy::Positivize) => {
            !tableau.is_positive(&entry) || !tableau.is_positive(tableau.q(candidate.pair))
        }
    };
    if !needs_adjustment {
        return Ok(None);
    }
    let zero_pivot = || {
        SelectionError::Tableau(TableauError::ZeroPivot {
            row: candidate.pair,
            column: candidate.column,
        })
    };
    // The adjusted entries must clear the zero tolerance strictly, so the
    // bounds target epsilon rather than zero (identical in exact mode).
    let eps = tableau.epsilon().clone();
    match phase {
        Phase::MinorP => {
            // q_(p+1) = 0, so alpha moves matrix entries only. Solvable iff
            // the last-row entry at the pivot column is nonzero.
            if tableau.is_zero(&last_entry) {
                return Err(zero_pivot());
            }
            let bound = (eps - entry) / last_entry.clone();
            let alpha = if tableau.is_positive(&last_entry) {
                next_int_above(&bound)
            } else {
                next_int_below(&bound)
            };
            Ok(Some(alpha))
        }
        Phase::MajorP => {
            // Both q_(p+1) and the last-row entry are positive in a genuine
            // MajorP state, so a large enough alpha fixes both signs.
            let q_last = tableau.q_last().clone();
            if !tableau.is_positive(&q_last) || !tableau.is_positive(&last_entry) {
                return Err(zero_pivot());
            }
            let q_row = tableau.q(candidate.pair).clone();
            let entry_bound = (eps.clone() - entry) / last_entry;
            let q_bound = (eps - q_row) / q_last;
            let bound = if entry_bound > q_bound {
                entry_bound
            } else {
                q_bound
            };
            Ok(Some(next_int_above(&bound)))
        }
    }
}
