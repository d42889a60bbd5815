//! Collapsing Kostant pictures along columns.
//!
//! Collapsing along column `i` ranks the loops through `i` by level of
//! encirclement, joins left-to-right neighbours within each level, drops the
//! rest of them and deletes the column. Sequences of collapses are addressed by
//! original column labels; the renumbering offsets are tracked for the caller.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::kostant::{KostantPicture, Loop};
use crate::par::Exec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Join {
    /// The new loop, in the renumbered picture.
    pub joined: Loop,
    pub left: Loop,
    pub right: Loop,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapseResult {
    /// Collapsed column, in the numbering of the input picture.
    pub column: usize,
    pub picture: KostantPicture,
    /// `N`: the number of levels, which is also the number of loops lost.
    pub removed: usize,
    pub joins: Vec<Join>,
    /// Untouched loops and their renumbered images.
    pub survivors: Vec<(Loop, Loop)>,
    /// For each loop of `picture` (same order), its one or two parents.
    pub parents: Vec<Vec<Loop>>,
}

impl CollapseResult {
    pub fn parents_of(&self, l: &Loop) -> &[Loop] {
        let k = self
            .picture
            .loops()
            .binary_search(l)
            .expect("loop of the collapsed picture");
        &self.parents[k]
    }
}

fn renumber(left: usize, right: usize, column: usize) -> (usize, usize) {
    if right < column {
        (left, right)
    } else if left > column {
        (left - 1, right - 1)
    } else {
        (left, right - 1)
    }
}

pub fn collapse_column(p: &KostantPicture, column: usize) -> Result<CollapseResult> {
    if p.n() < 2 {
        return Err(Error::TooFewColumns { n: p.n(), min: 2 });
    }
    collapse_any(p, column)
}

/// As [`collapse_column`], but also accepts the (necessarily empty) one-column
/// picture so that sequences may run over every column.
fn collapse_any(p: &KostantPicture, column: usize) -> Result<CollapseResult> {
    let n = p.n();
    let levels = p.levels_through_column(column)?;

    // (new interval, parents); survivors first, then joins level by level
    let mut pending: Vec<((usize, usize), Vec<Loop>)> = Vec::new();
    for l in p.loops() {
        if !l.passes_through(column) {
            pending.push((renumber(l.left, l.right, column), vec![*l]));
        }
    }
    let n_survivors = pending.len();
    for level in &levels {
        for pair in level.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            debug_assert!(a.left < column && column < b.right);
            pending.push((renumber(a.left, b.right, column), vec![a, b]));
        }
    }

    let mut copies: HashMap<(usize, usize), usize> = HashMap::new();
    let mut tagged: Vec<(Loop, Vec<Loop>)> = pending
        .into_iter()
        .map(|((l, r), parents)| {
            let c = copies.entry((l, r)).or_insert(0);
            let lp = Loop::new(l, r, *c);
            *c += 1;
            (lp, parents)
        })
        .collect();

    let survivors = tagged[..n_survivors]
        .iter()
        .map(|(new, parents)| (parents[0], *new))
        .collect();
    let joins = tagged[n_survivors..]
        .iter()
        .map(|(new, parents)| Join {
            joined: *new,
            left: parents[0],
            right: parents[1],
        })
        .collect();

    tagged.sort_by_key(|(l, _)| *l);
    let (loops, parents): (Vec<Loop>, Vec<Vec<Loop>>) = tagged.into_iter().unzip();
    let picture = KostantPicture::from_loops(n - 1, loops)?;
    debug_assert_eq!(picture.num_loops() + levels.len(), p.num_loops());

    Ok(CollapseResult {
        column,
        picture,
        removed: levels.len(),
        joins,
        survivors,
        parents,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapseTrace {
    pub initial: KostantPicture,
    /// The collapse order in original column labels.
    pub order: Vec<usize>,
    /// `h(m)`: earlier collapsed columns to the left of the m-th one.
    pub offsets: Vec<usize>,
    pub steps: Vec<CollapseResult>,
}

impl CollapseTrace {
    pub fn picture(&self) -> &KostantPicture {
        self.steps.last().map_or(&self.initial, |s| &s.picture)
    }

    /// Per-step removed counts `N_m`.
    pub fn removed(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.removed).collect()
    }
}

fn validate_order(n: usize, order: &[usize]) -> Result<()> {
    let mut seen = vec![false; n + 1];
    for &c in order {
        if c < 1 || c > n {
            return Err(Error::ColumnOutOfRange { column: c, n });
        }
        if seen[c] {
            return Err(Error::DuplicateColumn(c));
        }
        seen[c] = true;
    }
    Ok(())
}

pub fn collapse_sequence(p: &KostantPicture, order: &[usize]) -> Result<CollapseTrace> {
    validate_order(p.n(), order)?;
    let mut offsets = Vec::with_capacity(order.len());
    let mut steps: Vec<CollapseResult> = Vec::with_capacity(order.len());
    for (m, &c) in order.iter().enumerate() {
        let h = order[..m].iter().filter(|&&j| j < c).count();
        offsets.push(h);
        let current = steps.last().map_or(p, |s| &s.picture);
        steps.push(collapse_any(current, c - h)?);
    }
    Ok(CollapseTrace {
        initial: p.clone(),
        order: order.to_vec(),
        offsets,
        steps,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopAncestry {
    /// Loop of the fully collapsed picture.
    pub target: Loop,
    /// Loops of the input picture used to produce `target`, sorted.
    pub ancestry: Vec<Loop>,
    /// Top loops of the ancestry (encircled by no other ancestor), left to
    /// right.
    pub components: Vec<Loop>,
}

/// Collapse state tracking original column labels and loop ancestries.
#[derive(Clone, Debug)]
pub(crate) struct AncestryState {
    pub picture: KostantPicture,
    /// Original label of each remaining column.
    pub columns: Vec<usize>,
    /// Ancestry of each loop, as indices into the original picture's loops.
    pub ancestry: Vec<BTreeSet<usize>>,
}

impl AncestryState {
    pub fn new(p: &KostantPicture) -> Self {
        AncestryState {
            picture: p.clone(),
            columns: (1..=p.n()).collect(),
            ancestry: (0..p.num_loops()).map(|k| BTreeSet::from([k])).collect(),
        }
    }

    /// Collapses the column with original label `label`; returns the new
    /// state and `N`.
    pub fn step(&self, label: usize) -> Result<(AncestryState, usize)> {
        let pos = self
            .columns
            .iter()
            .position(|&c| c == label)
            .ok_or(Error::ColumnOutOfRange {
                column: label,
                n: self.columns.len(),
            })?;
        let res = collapse_any(&self.picture, pos + 1)?;
        let index_of = |l: &Loop| {
            self.picture
                .loops()
                .binary_search(l)
                .expect("parent is a loop of the previous picture")
        };
        let ancestry = res
            .parents
            .iter()
            .map(|ps| {
                ps.iter()
                    .flat_map(|l| self.ancestry[index_of(l)].iter().copied())
                    .collect()
            })
            .collect();
        let mut columns = self.columns.clone();
        columns.remove(pos);
        Ok((
            AncestryState {
                picture: res.picture,
                columns,
                ancestry,
            },
            res.removed,
        ))
    }

    pub fn describe(&self, original: &KostantPicture) -> Vec<LoopAncestry> {
        self.picture
            .loops()
            .iter()
            .zip(&self.ancestry)
            .map(|(t, a)| {
                let ancestry: Vec<Loop> = a.iter().map(|&k| original.loops()[k]).collect();
                let mut components: Vec<Loop> = ancestry
                    .iter()
                    .copied()
                    .filter(|l| !ancestry.iter().any(|m| m.encircles(l)))
                    .collect();
                components.sort_by_key(|l| (l.left, l.right));
                LoopAncestry {
                    target: *t,
                    ancestry,
                    components,
                }
            })
            .collect()
    }
}

/// Ancestry of every loop of the picture collapsed along `order`.
pub fn ancestry(p: &KostantPicture, order: &[usize]) -> Result<Vec<LoopAncestry>> {
    validate_order(p.n(), order)?;
    let mut state = AncestryState::new(p);
    for &c in order {
        state = state.step(c)?.0;
    }
    Ok(state.describe(p))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AncestryFailure {
    pub order: Vec<usize>,
    pub target: Loop,
    pub components: Vec<Loop>,
    /// Columns of the order passed through by some component.
    pub passed: Vec<usize>,
    pub reason: String,
}

fn check_ancestry(order: &[usize], info: &LoopAncestry) -> Option<AncestryFailure> {
    let s = info.components.len();
    let passed: Vec<usize> = {
        let mut v: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&c| info.components.iter().any(|l| l.passes_through(c)))
            .collect();
        v.sort_unstable();
        v
    };
    let fail = |reason: String| {
        Some(AncestryFailure {
            order: order.to_vec(),
            target: info.target,
            components: info.components.clone(),
            passed: passed.clone(),
            reason,
        })
    };
    let ordered = info
        .components
        .windows(2)
        .all(|w| w[0].left < w[1].left && w[0].right < w[1].right);
    if !ordered {
        return fail("join components are nested or not left-to-right".into());
    }
    if passed.len() + 1 != s {
        return fail(format!("|J| = {} but s = {s}", passed.len()));
    }
    for (m, l) in info.components.iter().enumerate() {
        let before = m.checked_sub(1).map(|k| passed[k]);
        let after = passed.get(m).copied();
        for c in before.into_iter().chain(after) {
            if !l.passes_through(c) {
                return fail(format!("component {l} misses column {c}"));
            }
        }
    }
    None
}

/// Checks `|J| = s - 1` and the endpoint condition for every loop of the
/// picture collapsed along `order`.
pub fn verify_ancestry_claims(p: &KostantPicture, order: &[usize]) -> Result<Vec<AncestryFailure>> {
    Ok(ancestry(p, order)?
        .iter()
        .filter_map(|info| check_ancestry(order, info))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderMismatch {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    pub first_picture: KostantPicture,
    pub second_picture: KostantPicture,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OrderSweep {
    /// Number of ordered column sequences visited.
    pub orders: usize,
    pub mismatches: Vec<OrderMismatch>,
    pub ancestry_failures: Vec<AncestryFailure>,
}

impl OrderSweep {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.ancestry_failures.is_empty()
    }

    pub fn merge(&mut self, other: OrderSweep) {
        self.orders += other.orders;
        self.mismatches.extend(other.mismatches);
        self.ancestry_failures.extend(other.ancestry_failures);
    }
}

/// Collapses `p` along every ordering of every column subset, sharing work
/// across common prefixes. Checks that the result depends only on the subset
/// and checks the ancestry claims at every node.
pub fn sweep_orders(p: &KostantPicture) -> OrderSweep {
    let n = p.n();
    let mut out = OrderSweep::default();
    if n < 2 {
        return out;
    }
    let mut seen: HashMap<u64, (Vec<usize>, KostantPicture)> = HashMap::new();
    let mut prefix = Vec::new();
    walk_orders(p, &AncestryState::new(p), 0, &mut prefix, &mut seen, &mut out);
    out
}

fn walk_orders(
    original: &KostantPicture,
    state: &AncestryState,
    mask: u64,
    prefix: &mut Vec<usize>,
    seen: &mut HashMap<u64, (Vec<usize>, KostantPicture)>,
    out: &mut OrderSweep,
) {
    // a one-column picture has nothing left to collapse
    if state.columns.len() < 2 {
        return;
    }
    for c in state.columns.clone() {
        let (next, _) = state.step(c).expect("column is present");
        prefix.push(c);
        let m = mask | (1 << c);
        out.orders += 1;
        match seen.get(&m) {
            Some((first, pic)) if *pic != next.picture => out.mismatches.push(OrderMismatch {
                first: first.clone(),
                second: prefix.clone(),
                first_picture: pic.clone(),
                second_picture: next.picture.clone(),
            }),
            Some(_) => {}
            None => {
                seen.insert(m, (prefix.clone(), next.picture.clone()));
            }
        }
        for info in next.describe(original) {
            if let Some(f) = check_ancestry(prefix, &info) {
                out.ancestry_failures.push(f);
            }
        }
        walk_orders(original, &next, m, prefix, seen, out);
        prefix.pop();
    }
}

/// [`sweep_orders`] over many pictures, merged in input order.
pub fn sweep_orders_many(pictures: &[KostantPicture], exec: Exec) -> OrderSweep {
    let mut total = OrderSweep::default();
    for r in exec.map(pictures, sweep_orders) {
        total.merge(r);
    }
    total
}

/// Checks order independence of the collapse for every column pair and every
/// longer column sequence.
pub fn verify_commutativity(p: &KostantPicture) -> Vec<OrderMismatch> {
    sweep_orders(p).mismatches
}
