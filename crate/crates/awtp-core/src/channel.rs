//! Adversarial channel: an adaptive intruder reads up to a read budget of
//! codeword symbols and adds errors to up to a write budget of symbols.
//!
//! Interaction is a request/grant protocol.  The adversary repeatedly issues
//! read, write, or done actions; each request may depend on everything
//! granted so far, and a read returns the current symbol including any error
//! already written.  Budgets are enforced by the channel, not trusted:
//! over-budget requests are refused, logged, and the strategy continues.  In
//! restricted mode reading and writing draw on one shared pool of positions.
//!
//! The module also houses the secrecy auditors (an algebraic rank
//! certificate and an exhaustive statistical-distance computation) and a
//! Monte Carlo reliability estimator.

use crate::awtp::{AwtpError, AwtpParams, DecodeOutcome};
use crate::fields::PrimeField;
use crate::frs::{FrsCodeword, ReceivedWord};
use crate::linalg::Mat;
use crate::report::{join_csv, Record};
use itertools::Itertools;
use num_bigint::BigUint;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::collections::{BTreeSet, VecDeque};
use thiserror::Error;

/// Hard ceiling on adversary actions per transmission, counting refusals.
const ACTION_CAP_BASE: usize = 10_000;
const ACTION_CAP_PER_SYMBOL: usize = 100;

/// Read-set families larger than this are sampled instead of enumerated.
const RANK_AUDIT_EXHAUSTIVE_LIMIT: u128 = 100_000;
const RANK_AUDIT_SAMPLES: usize = 10_000;

/// Exhaustive view enumeration refuses beyond this many filler vectors.
const VIEW_ENUMERATION_LIMIT: u128 = 1_000_000;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("bad channel spec: {0}")]
    BadSpec(String),
    #[error("codeword shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid strategy sets: {0}")]
    InvalidSets(String),
    #[error("enumeration over {states} filler vectors exceeds the limit")]
    TooLarge { states: u128 },
    #[error(transparent)]
    Pipeline(#[from] AwtpError),
}

/// Channel geometry and adversary budgets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelSpec {
    field: PrimeField,
    n_sym: usize,
    u: usize,
    read_budget: usize,
    write_budget: usize,
    restricted: bool,
}

impl ChannelSpec {
    pub fn new(
        field: PrimeField,
        n_sym: usize,
        u: usize,
        read_budget: usize,
        write_budget: usize,
        restricted: bool,
    ) -> Result<Self, ChannelError> {
        if n_sym == 0 || u == 0 {
            return Err(ChannelError::BadSpec("need at least one symbol".into()));
        }
        if read_budget > n_sym || write_budget > n_sym {
            return Err(ChannelError::BadSpec(format!(
                "budgets {read_budget}/{write_budget} exceed {n_sym} symbols"
            )));
        }
        if restricted && read_budget != write_budget {
            return Err(ChannelError::BadSpec(format!(
                "restricted mode shares one pool, budgets {read_budget} and {write_budget} differ"
            )));
        }
        Ok(ChannelSpec {
            field,
            n_sym,
            u,
            read_budget,
            write_budget,
            restricted,
        })
    }

    pub fn from_params(p: &AwtpParams, restricted: bool) -> Result<Self, ChannelError> {
        ChannelSpec::new(
            p.field(),
            p.config().n_sym,
            p.config().u,
            p.read_budget(),
            p.write_budget(),
            restricted,
        )
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn symbols(&self) -> usize {
        self.n_sym
    }

    pub fn folding(&self) -> usize {
        self.u
    }

    pub fn read_budget(&self) -> usize {
        self.read_budget
    }

    pub fn write_budget(&self) -> usize {
        self.write_budget
    }

    pub fn restricted(&self) -> bool {
        self.restricted
    }

    fn check_codeword(&self, c: &FrsCodeword) -> Result<(), ChannelError> {
        let q = self.field.order();
        if c.symbols.len() != self.n_sym
            || c.symbols.iter().any(|s| s.len() != self.u)
            || c.symbols.iter().flatten().any(|&x| x >= q)
        {
            return Err(ChannelError::ShapeMismatch(format!(
                "expected {} symbols of {} coordinates below {q}",
                self.n_sym, self.u
            )));
        }
        Ok(())
    }

    /// Run one transmission against an adversary.  The returned transcript
    /// holds the ordered event log, the granted read/write sets, the error
    /// vector, and the delivered word y = c + e.
    pub fn transmit(
        &self,
        c: &FrsCodeword,
        adversary: &mut dyn Adversary,
    ) -> Result<Transcript, ChannelError> {
        self.check_codeword(c)?;
        let f = self.field;
        let mut error = vec![vec![0u64; self.u]; self.n_sym];
        let mut events = Vec::new();
        let mut read_set = BTreeSet::new();
        let mut write_set = BTreeSet::new();
        let mut refusals = 0usize;
        let mut capped = true;
        let mut view = View {
            field: f,
            n_sym: self.n_sym,
            u: self.u,
            read_budget: self.read_budget,
            write_budget: self.write_budget,
            restricted: self.restricted,
            reads: Vec::new(),
            writes: Vec::new(),
            refusals: 0,
        };
        let cap = ACTION_CAP_BASE + ACTION_CAP_PER_SYMBOL * self.n_sym;
        for _ in 0..cap {
            let action = adversary.act(&view);
            let refusal = match &action {
                Action::Done => {
                    events.push(Event::Done);
                    capped = false;
                    break;
                }
                Action::Read(pos) => {
                    let pos = *pos;
                    if pos >= self.n_sym {
                        Some(RefusalReason::OutOfRange)
                    } else if let Some(reason) =
                        self.budget_refusal(pos, &read_set, &write_set, true)
                    {
                        Some(reason)
                    } else {
                        read_set.insert(pos);
                        let value: Vec<u64> = (0..self.u)
                            .map(|s| f.add(c.symbols[pos][s], error[pos][s]))
                            .collect();
                        view.reads.push((pos, value.clone()));
                        events.push(Event::Read { pos, value });
                        None
                    }
                }
                Action::Write { pos, delta } => {
                    let pos = *pos;
                    if pos >= self.n_sym {
                        Some(RefusalReason::OutOfRange)
                    } else if delta.len() != self.u || delta.iter().any(|&x| x >= f.order()) {
                        Some(RefusalReason::BadDelta)
                    } else if let Some(reason) =
                        self.budget_refusal(pos, &read_set, &write_set, false)
                    {
                        Some(reason)
                    } else {
                        write_set.insert(pos);
                        for (slot, &d) in error[pos].iter_mut().zip(delta) {
                            *slot = f.add(*slot, d);
                        }
                        view.writes.push((pos, delta.clone()));
                        events.push(Event::Write {
                            pos,
                            delta: delta.clone(),
                        });
                        None
                    }
                }
            };
            if let Some(reason) = refusal {
                refusals += 1;
                view.refusals += 1;
                events.push(Event::Refused { action, reason });
            }
        }
        let delivered = ReceivedWord {
            symbols: (0..self.n_sym)
                .map(|j| {
                    (0..self.u)
                        .map(|s| f.add(c.symbols[j][s], error[j][s]))
                        .collect()
                })
                .collect(),
        };
        Ok(Transcript {
            seed: None,
            events,
            read_set,
            write_set,
            refusals,
            capped,
            error,
            delivered,
        })
    }

    /// Spawn the strategy with the given seed and transmit; the seed is
    /// recorded in the transcript for replay.
    pub fn run(
        &self,
        c: &FrsCodeword,
        strategy: &StrategyKind,
        seed: u64,
    ) -> Result<Transcript, ChannelError> {
        let mut adversary = strategy.spawn(self, seed)?;
        let mut transcript = self.transmit(c, adversary.as_mut())?;
        transcript.seed = Some(seed);
        Ok(transcript)
    }

    fn budget_refusal(
        &self,
        pos: usize,
        read_set: &BTreeSet<usize>,
        write_set: &BTreeSet<usize>,
        is_read: bool,
    ) -> Option<RefusalReason> {
        if self.restricted {
            let in_pool = read_set.contains(&pos) || write_set.contains(&pos);
            let pool_size = read_set.union(write_set).count();
            if in_pool || pool_size < self.read_budget {
                None
            } else {
                Some(RefusalReason::PoolBudget)
            }
        } else if is_read {
            if read_set.contains(&pos) || read_set.len() < self.read_budget {
                None
            } else {
                Some(RefusalReason::ReadBudget)
            }
        } else if write_set.contains(&pos) || write_set.len() < self.write_budget {
            None
        } else {
            Some(RefusalReason::WriteBudget)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    Read(usize),
    Write { pos: usize, delta: Vec<u64> },
    Done,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefusalReason {
    OutOfRange,
    ReadBudget,
    WriteBudget,
    /// Restricted mode: the shared read/write pool is full.
    PoolBudget,
    BadDelta,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    Read { pos: usize, value: Vec<u64> },
    Write { pos: usize, delta: Vec<u64> },
    Refused { action: Action, reason: RefusalReason },
    Done,
}

/// Everything the adversary knows: the public spec plus its own granted
/// actions, in order.  Read values include errors written so far.
#[derive(Debug, Clone)]
pub struct View {
    pub field: PrimeField,
    pub n_sym: usize,
    pub u: usize,
    pub read_budget: usize,
    pub write_budget: usize,
    pub restricted: bool,
    pub reads: Vec<(usize, Vec<u64>)>,
    pub writes: Vec<(usize, Vec<u64>)>,
    pub refusals: usize,
}

pub trait Adversary {
    fn act(&mut self, view: &View) -> Action;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub seed: Option<u64>,
    pub events: Vec<Event>,
    pub read_set: BTreeSet<usize>,
    pub write_set: BTreeSet<usize>,
    pub refusals: usize,
    /// True when the action cap stopped the adversary before it said done.
    pub capped: bool,
    /// Additive error per symbol, componentwise over the base field.
    pub error: Vec<Vec<u64>>,
    /// y = c + e.
    pub delivered: ReceivedWord,
}

impl Transcript {
    /// Symbols carrying a nonzero error.
    pub fn error_weight(&self) -> usize {
        self.error
            .iter()
            .filter(|sym| sym.iter().any(|&x| x != 0))
            .count()
    }

    /// Positions the adversary touched at all (the pool in restricted mode).
    pub fn capability_set(&self) -> BTreeSet<usize> {
        self.read_set.union(&self.write_set).copied().collect()
    }

    /// Structured text form for replay and logging.
    pub fn records(&self) -> Vec<Record> {
        let mut out = Vec::new();
        let mut summary = Record::new("transcript");
        match self.seed {
            Some(s) => summary.push("seed", s),
            None => summary.push("seed", "none"),
        }
        summary.push("reads", join_csv(self.read_set.iter()));
        summary.push("writes", join_csv(self.write_set.iter()));
        summary.push("refusals", self.refusals);
        summary.push("error_weight", self.error_weight());
        summary.push("capped", self.capped);
        out.push(summary);
        for (i, event) in self.events.iter().enumerate() {
            let mut rec = Record::new("event").with("step", i);
            match event {
                Event::Read { pos, value } => {
                    rec.push("kind", "read");
                    rec.push("pos", pos);
                    rec.push("value", join_csv(value.iter()));
                }
                Event::Write { pos, delta } => {
                    rec.push("kind", "write");
                    rec.push("pos", pos);
                    rec.push("delta", join_csv(delta.iter()));
                }
                Event::Refused { action, reason } => {
                    rec.push("kind", "refused");
                    match action {
                        Action::Read(pos) => {
                            rec.push("action", "read");
                            rec.push("pos", pos);
                        }
                        Action::Write { pos, .. } => {
                            rec.push("action", "write");
                            rec.push("pos", pos);
                        }
                        Action::Done => rec.push("action", "done"),
                    }
                    rec.push("reason", format!("{reason:?}"));
                }
                Event::Done => rec.push("kind", "done"),
            }
            out.push(rec);
        }
        out
    }
}

/// Built-in strategies, spawnable by name for campaigns and the CLI.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategyKind {
    /// Immediately done: the channel is noiseless.
    Null,
    /// Saturates the write budget with uniform nonzero symbol errors.
    RandomWriter,
    /// Flips a fair coin between two (read set, write set) pairs.
    TwoPair {
        pair1: (Vec<usize>, Vec<usize>),
        pair2: (Vec<usize>, Vec<usize>),
    },
    /// Reads one symbol, then writes a delta derived from the value read.
    AdaptiveProbe,
    /// Attempts one more write than the budget allows.
    OverBudget,
}

impl StrategyKind {
    pub fn spawn(&self, spec: &ChannelSpec, seed: u64) -> Result<Box<dyn Adversary>, ChannelError> {
        Ok(match self {
            StrategyKind::Null => Box::new(NullAdversary),
            StrategyKind::RandomWriter => Box::new(RandomWriter::new(seed)),
            StrategyKind::TwoPair { pair1, pair2 } => Box::new(TwoPairStrategy::new(
                spec,
                pair1.clone(),
                pair2.clone(),
                seed,
            )?),
            StrategyKind::AdaptiveProbe => Box::new(AdaptiveProbe::default()),
            StrategyKind::OverBudget => Box::new(OverBudget::default()),
        })
    }
}

pub struct NullAdversary;

impl Adversary for NullAdversary {
    fn act(&mut self, _view: &View) -> Action {
        Action::Done
    }
}

/// Writes uniform nonzero deltas on a uniform set of exactly write-budget
/// distinct positions, so the error weight saturates the budget.
pub struct RandomWriter {
    rng: ChaCha12Rng,
    plan: Option<VecDeque<Action>>,
}

impl RandomWriter {
    pub fn new(seed: u64) -> Self {
        RandomWriter {
            rng: ChaCha12Rng::seed_from_u64(seed),
            plan: None,
        }
    }
}

impl Adversary for RandomWriter {
    fn act(&mut self, view: &View) -> Action {
        if self.plan.is_none() {
            let f = view.field;
            let mut plan = VecDeque::new();
            let count = view.write_budget.min(view.n_sym);
            for pos in rand::seq::index::sample(&mut self.rng, view.n_sym, count) {
                let delta = loop {
                    let d: Vec<u64> = (0..view.u).map(|_| f.uniform(&mut self.rng)).collect();
                    if d.iter().any(|&x| x != 0) {
                        break d;
                    }
                };
                plan.push_back(Action::Write { pos, delta });
            }
            self.plan = Some(plan);
        }
        self.plan
            .as_mut()
            .unwrap()
            .pop_front()
            .unwrap_or(Action::Done)
    }
}

/// The two-pair strategy: pick pair i with probability 1/2, read all of
/// its read set, then add a uniform error vector (zero included) on its
/// write set.
pub struct TwoPairStrategy {
    rng: ChaCha12Rng,
    pairs: [(Vec<usize>, Vec<usize>); 2],
    chosen: Option<usize>,
    queue: VecDeque<Action>,
}

fn check_set(name: &str, set: &[usize], size: usize, n_sym: usize) -> Result<(), ChannelError> {
    let distinct: BTreeSet<usize> = set.iter().copied().collect();
    if distinct.len() != set.len() {
        return Err(ChannelError::InvalidSets(format!("{name} has duplicates")));
    }
    if set.len() != size {
        return Err(ChannelError::InvalidSets(format!(
            "{name} has {} positions, the budget requires exactly {size}",
            set.len()
        )));
    }
    if set.iter().any(|&p| p >= n_sym) {
        return Err(ChannelError::InvalidSets(format!(
            "{name} has positions outside 0..{n_sym}"
        )));
    }
    Ok(())
}

impl TwoPairStrategy {
    pub fn new(
        spec: &ChannelSpec,
        pair1: (Vec<usize>, Vec<usize>),
        pair2: (Vec<usize>, Vec<usize>),
        seed: u64,
    ) -> Result<Self, ChannelError> {
        for (i, pair) in [&pair1, &pair2].into_iter().enumerate() {
            check_set(
                &format!("read set {}", i + 1),
                &pair.0,
                spec.read_budget(),
                spec.symbols(),
            )?;
            check_set(
                &format!("write set {}", i + 1),
                &pair.1,
                spec.write_budget(),
                spec.symbols(),
            )?;
        }
        if pair1.0.iter().any(|p| pair2.1.contains(p)) {
            return Err(ChannelError::InvalidSets(
                "read set 1 must avoid write set 2".into(),
            ));
        }
        Ok(TwoPairStrategy {
            rng: ChaCha12Rng::seed_from_u64(seed),
            pairs: [pair1, pair2],
            chosen: None,
            queue: VecDeque::new(),
        })
    }

    /// 1 or 2 once the coin is flipped.
    pub fn chosen(&self) -> Option<usize> {
        self.chosen
    }
}

impl Adversary for TwoPairStrategy {
    fn act(&mut self, view: &View) -> Action {
        if self.chosen.is_none() {
            let i = self.rng.random_range(0..2usize);
            self.chosen = Some(i + 1);
            let (reads, writes) = self.pairs[i].clone();
            for pos in reads {
                self.queue.push_back(Action::Read(pos));
            }
            let f = view.field;
            for pos in writes {
                let delta: Vec<u64> = (0..view.u).map(|_| f.uniform(&mut self.rng)).collect();
                self.queue.push_back(Action::Write { pos, delta });
            }
        }
        self.queue.pop_front().unwrap_or(Action::Done)
    }
}

/// Reads symbol 0, then writes a delta computed from the value it saw.
/// Exists to pin transcript ordering: the read precedes the dependent write.
#[derive(Default)]
pub struct AdaptiveProbe {
    step: usize,
}

impl Adversary for AdaptiveProbe {
    fn act(&mut self, view: &View) -> Action {
        self.step += 1;
        match self.step {
            1 => Action::Read(0),
            2 => {
                let (_, value) = &view.reads[0];
                let f = view.field;
                let target = (value[0] as usize + 1) % view.n_sym;
                let delta: Vec<u64> = value.iter().map(|&x| f.add(x, 1)).collect();
                Action::Write { pos: target, delta }
            }
            _ => Action::Done,
        }
    }
}

/// Writes unit deltas at write-budget + 1 distinct positions; the channel
/// must refuse the last one.
#[derive(Default)]
pub struct OverBudget {
    step: usize,
}

impl Adversary for OverBudget {
    fn act(&mut self, view: &View) -> Action {
        let attempts = (view.write_budget + 1).min(view.n_sym);
        if self.step < attempts {
            let pos = self.step;
            self.step += 1;
            let mut delta = vec![0u64; view.u];
            delta[0] = 1;
            Action::Write { pos, delta }
        } else {
            Action::Done
        }
    }
}

/// Where the filler coefficients sit inside the coefficient vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FillerPlacement {
    /// Secret first, filler last (the deployed layout).
    Trailing,
    /// Filler first, secret last.
    Leading,
}

/// How codeword symbols map to evaluation exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalWindows {
    /// Symbol j evaluates at gamma^(j u + s): all points distinct.
    Disjoint,
    /// Symbol j evaluates at gamma^(j (u-1) + s): adjacent symbols share a
    /// point.  A deliberately broken layout used as an audit control.
    Overlapping,
}

/// The secrecy side of an instance: which coefficients are secret, which are
/// filler, and what an adversary reading a set of symbols evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SecrecyInstance {
    field: PrimeField,
    u: usize,
    n_sym: usize,
    secret_len: usize,
    filler_len: usize,
    read_budget: usize,
    placement: FillerPlacement,
    windows: EvalWindows,
    gamma: u64,
}

impl SecrecyInstance {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        field: PrimeField,
        u: usize,
        n_sym: usize,
        secret_len: usize,
        filler_len: usize,
        read_budget: usize,
        placement: FillerPlacement,
        windows: EvalWindows,
    ) -> Result<Self, ChannelError> {
        if u == 0 || n_sym == 0 || secret_len == 0 {
            return Err(ChannelError::BadSpec(
                "need at least one symbol and one secret coefficient".into(),
            ));
        }
        if read_budget > n_sym {
            return Err(ChannelError::BadSpec(format!(
                "read budget {read_budget} exceeds {n_sym} symbols"
            )));
        }
        Ok(SecrecyInstance {
            field,
            u,
            n_sym,
            secret_len,
            filler_len,
            read_budget,
            placement,
            windows,
            gamma: field.generator(),
        })
    }

    /// The deployed layout of a full parameter set: trailing filler of
    /// length u * read budget, disjoint windows.
    pub fn from_params(p: &AwtpParams) -> Self {
        SecrecyInstance::new(
            p.field(),
            p.config().u,
            p.config().n_sym,
            p.secret_len(),
            p.filler_len(),
            p.read_budget(),
            FillerPlacement::Trailing,
            EvalWindows::Disjoint,
        )
        .expect("validated params yield a valid secrecy instance")
    }

    pub fn coefficients(&self) -> usize {
        self.secret_len + self.filler_len
    }

    pub fn secret_len(&self) -> usize {
        self.secret_len
    }

    pub fn filler_len(&self) -> usize {
        self.filler_len
    }

    pub fn read_budget(&self) -> usize {
        self.read_budget
    }

    fn exponent(&self, j: usize, s: usize) -> u128 {
        match self.windows {
            EvalWindows::Disjoint => (j * self.u + s) as u128,
            EvalWindows::Overlapping => (j * (self.u - 1) + s) as u128,
        }
    }

    fn coeff_index(&self, filler_slot: usize) -> usize {
        match self.placement {
            FillerPlacement::Trailing => self.secret_len + filler_slot,
            FillerPlacement::Leading => filler_slot,
        }
    }

    fn assemble(&self, secret: &[u64], filler: &[u64]) -> Vec<u64> {
        let mut coeffs = vec![0u64; self.coefficients()];
        match self.placement {
            FillerPlacement::Trailing => {
                coeffs[..self.secret_len].copy_from_slice(secret);
                coeffs[self.secret_len..].copy_from_slice(filler);
            }
            FillerPlacement::Leading => {
                coeffs[..self.filler_len].copy_from_slice(filler);
                coeffs[self.filler_len..].copy_from_slice(secret);
            }
        }
        coeffs
    }

    /// What an adversary reading `read_set` sees: u evaluations per
    /// position, in position order.
    fn view_values(&self, coeffs: &[u64], read_set: &[usize]) -> Vec<u64> {
        let f = self.field;
        let mut out = Vec::with_capacity(read_set.len() * self.u);
        for &j in read_set {
            for s in 0..self.u {
                let alpha = f.pow(self.gamma, self.exponent(j, s));
                let mut acc = 0u64;
                for &c in coeffs.iter().rev() {
                    acc = f.add(f.mul(acc, alpha), c);
                }
                out.push(acc);
            }
        }
        out
    }

    /// The linear map from filler vectors to the view of one read set.
    fn filler_matrix(&self, read_set: &[usize]) -> Mat {
        let f = self.field;
        let mut m = Mat::zeros(f, read_set.len() * self.u, self.filler_len);
        for (row, (&j, s)) in read_set
            .iter()
            .flat_map(|j| (0..self.u).map(move |s| (j, s)))
            .enumerate()
        {
            let e = self.exponent(j, s);
            for c in 0..self.filler_len {
                m[(row, c)] = f.pow(self.gamma, e * self.coeff_index(c) as u128);
            }
        }
        m
    }

    /// Certify perfect secrecy algebraically: for every read set of budget
    /// size, the filler-to-view map must be surjective (full row rank), so
    /// the view is uniform whatever the secret.  Enumerates all read sets
    /// when feasible, otherwise samples.
    pub fn rank_audit(&self, seed: u64) -> RankAuditReport {
        let expected_rank = self.u * self.read_budget;
        let total = binomial(self.n_sym, self.read_budget);
        let mut failures = Vec::new();
        let mut sets_checked = 0usize;
        let exhaustive = total <= RANK_AUDIT_EXHAUSTIVE_LIMIT;
        let mut check = |set: Vec<usize>| {
            sets_checked += 1;
            let rank = self.filler_matrix(&set).rank();
            if rank != expected_rank && failures.len() < 16 {
                failures.push(set);
            }
        };
        if exhaustive {
            for set in (0..self.n_sym).combinations(self.read_budget) {
                check(set);
            }
        } else {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            for _ in 0..RANK_AUDIT_SAMPLES {
                let mut set: Vec<usize> =
                    rand::seq::index::sample(&mut rng, self.n_sym, self.read_budget).into_vec();
                set.sort_unstable();
                check(set);
            }
        }
        let certified = failures.is_empty();
        RankAuditReport {
            sets_checked,
            exhaustive,
            expected_rank,
            certified,
            failures,
        }
    }

    /// Exact statistical distance between the views of two secrets on one
    /// read set, by enumerating every filler vector.
    pub fn view_distance_exhaustive(
        &self,
        secret_a: &[u64],
        secret_b: &[u64],
        read_set: &[usize],
    ) -> Result<Ratio<BigUint>, ChannelError> {
        let q = self.field.order();
        for secret in [secret_a, secret_b] {
            if secret.len() != self.secret_len || secret.iter().any(|&x| x >= q) {
                return Err(ChannelError::BadSpec(format!(
                    "secrets must be {} coordinates below {q}",
                    self.secret_len
                )));
            }
        }
        if read_set.iter().any(|&j| j >= self.n_sym) {
            return Err(ChannelError::BadSpec(format!(
                "read set has positions outside 0..{}",
                self.n_sym
            )));
        }
        let states = (q as u128)
            .checked_pow(self.filler_len as u32)
            .filter(|&s| s <= VIEW_ENUMERATION_LIMIT)
            .ok_or(ChannelError::TooLarge { states: u128::MAX })?;
        if states > VIEW_ENUMERATION_LIMIT {
            return Err(ChannelError::TooLarge { states });
        }
        let mut tallies = [
            std::collections::BTreeMap::<Vec<u64>, u64>::new(),
            std::collections::BTreeMap::new(),
        ];
        for (secret, tally) in [secret_a, secret_b].into_iter().zip(tallies.iter_mut()) {
            let mut filler = vec![0u64; self.filler_len];
            loop {
                let coeffs = self.assemble(secret, &filler);
                *tally.entry(self.view_values(&coeffs, read_set)).or_insert(0) += 1;
                // odometer over F_q^filler_len
                let mut i = 0;
                while i < self.filler_len {
                    filler[i] += 1;
                    if filler[i] < q {
                        break;
                    }
                    filler[i] = 0;
                    i += 1;
                }
                if i == self.filler_len {
                    break;
                }
            }
        }
        let [ta, tb] = tallies;
        let mut diff_sum = BigUint::ZERO;
        for key in ta.keys().chain(tb.keys()).unique() {
            let a = ta.get(key).copied().unwrap_or(0);
            let b = tb.get(key).copied().unwrap_or(0);
            diff_sum += BigUint::from(a.abs_diff(b));
        }
        Ok(Ratio::new(
            diff_sum,
            BigUint::from(2u8) * BigUint::from(states),
        ))
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u128::MAX;
        }
    }
    acc
}

#[derive(Debug, Clone)]
pub struct RankAuditReport {
    pub sets_checked: usize,
    /// False when the read-set family was sampled rather than enumerated.
    pub exhaustive: bool,
    pub expected_rank: usize,
    pub certified: bool,
    /// Failing read sets, capped at 16.
    pub failures: Vec<Vec<usize>>,
}

/// One decode outcome class per trial.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReliabilityReport {
    pub trials: usize,
    pub ok: usize,
    pub wrong: usize,
    pub ambiguous: usize,
    pub no_candidate: usize,
    pub refusals: usize,
    /// Largest evasive-set hit count seen in any decode.
    pub max_set_hits: usize,
    pub max_valid: usize,
}

impl ReliabilityReport {
    pub fn failures(&self) -> usize {
        self.trials - self.ok
    }

    pub fn failure_rate(&self) -> f64 {
        self.failures() as f64 / self.trials as f64
    }

    pub fn wilson_upper(&self) -> f64 {
        wilson_upper(self.failures(), self.trials)
    }
}

/// Wilson 95% upper confidence bound on a binomial proportion.
pub fn wilson_upper(events: usize, trials: usize) -> f64 {
    assert!(trials > 0 && events <= trials);
    let z = 1.96f64;
    let n = trials as f64;
    let p = events as f64 / n;
    let z2 = z * z;
    let center = p + z2 / (2.0 * n);
    let spread = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center + spread) / (1.0 + z2 / n)).min(1.0)
}

/// Monte Carlo decode-failure estimate: encode a fresh uniform message,
/// run the adversary, decode, and classify the outcome.
pub fn reliability_estimate(
    params: &AwtpParams,
    spec: &ChannelSpec,
    strategy: &StrategyKind,
    trials: usize,
    seed: u64,
) -> Result<ReliabilityReport, ChannelError> {
    if trials == 0 {
        return Err(ChannelError::BadSpec("need at least one trial".into()));
    }
    let mut master = ChaCha12Rng::seed_from_u64(seed);
    let mut report = ReliabilityReport {
        trials,
        ..ReliabilityReport::default()
    };
    let d = params.config().d;
    for _ in 0..trials {
        let message: Vec<_> = (0..d).map(|_| params.ext().uniform(&mut master)).collect();
        let codeword = params.encode(&message, &mut master)?;
        let adversary_seed: u64 = master.random();
        let transcript = spec.run(&codeword, strategy, adversary_seed)?;
        report.refusals += transcript.refusals;
        let (outcome, stats) = params.decode_traced(&transcript.delivered)?;
        report.max_set_hits = report.max_set_hits.max(stats.set_hits);
        report.max_valid = report.max_valid.max(stats.valid);
        match outcome {
            DecodeOutcome::Message(m) if m == message => report.ok += 1,
            DecodeOutcome::Message(_) => report.wrong += 1,
            DecodeOutcome::Ambiguous { .. } => report.ambiguous += 1,
            DecodeOutcome::NoCandidate => report.no_candidate += 1,
        }
    }
    Ok(report)
}
