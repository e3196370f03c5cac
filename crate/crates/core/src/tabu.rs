//! Tabu search over the simplified machine-reassignment neighborhood:
//! operations on a random critical path may switch to another eligible
//! machine while keeping their position in the OS string.

use rand::Rng;

use crate::instance::{Instance, MachineId, OpId, OperationRef, Time};
use crate::schedule::{critical_path, Decoder, Schedule, Solution};

/// How candidate moves are scored during screening. The applied move is
/// always re-decoded exactly, so the returned makespan is authoritative in
/// both modes; estimation only changes which candidate gets picked first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalMode {
    Exact,
    Estimate,
}

/// Expiry-indexed tabu memory over (operation, machine) pairs.
#[derive(Debug, Clone)]
pub struct TabuList {
    expiry: Vec<u64>,
    machine_count: usize,
    current_iteration: u64,
}

impl TabuList {
    pub fn new(inst: &Instance) -> Self {
        Self {
            expiry: vec![0; inst.total_ops() * inst.machine_count()],
            machine_count: inst.machine_count(),
            current_iteration: 0,
        }
    }

    pub fn is_tabu(&self, op: OpId, machine: MachineId) -> bool {
        self.current_iteration < self.expiry[op * self.machine_count + machine]
    }

    pub fn expiry(&self, op: OpId, machine: MachineId) -> u64 {
        self.expiry[op * self.machine_count + machine]
    }

    /// Marks the entry tabu until `threshold` iterations past the current one.
    pub fn forbid(&mut self, op: OpId, machine: MachineId, threshold: u64) {
        self.expiry[op * self.machine_count + machine] = self.current_iteration + threshold;
    }

    pub fn advance(&mut self) {
        self.current_iteration += 1;
    }

    pub fn current_iteration(&self) -> u64 {
        self.current_iteration
    }
}

/// Tabu tenure: length of the random critical path plus the number of
/// machines able to process the operation.
pub fn tabu_threshold(q: usize, op: OperationRef, inst: &Instance) -> u64 {
    debug_assert!(q >= 1);
    (q + inst.eligible(op.linear).len()) as u64
}

/// Earliest starts and downstream slack lengths for makespan estimation.
///
/// `head` is the start time from the decoded schedule. `tail` is the
/// operation's duration plus the larger tail of its job successor and
/// machine successor, zero when absent. `head + tail <= makespan`
/// everywhere, with equality along critical paths.
#[derive(Debug, Clone)]
pub struct HeadsTails {
    pub head: Vec<Time>,
    pub tail: Vec<Time>,
}

pub fn heads_and_tails(inst: &Instance, sched: &Schedule) -> HeadsTails {
    let total = inst.total_ops();
    let mut machine_succ: Vec<Option<OpId>> = vec![None; total];
    for seq in &sched.machine_sequence {
        for pair in seq.windows(2) {
            machine_succ[pair[0]] = Some(pair[1]);
        }
    }
    // Successors always start strictly later, so descending start order is a
    // valid reverse-topological order.
    let mut order: Vec<OpId> = (0..total).collect();
    order.sort_unstable_by(|&a, &b| sched.start[b].cmp(&sched.start[a]));
    let mut tail = vec![0; total];
    for &op in &order {
        let r = inst.op_ref(op);
        let job_succ_tail = (r.step + 1 < inst.ops_per_job(r.job))
            .then(|| tail[inst.linear_of(r.job, r.step + 1)])
            .unwrap_or(0);
        let machine_succ_tail = machine_succ[op].map_or(0, |s| tail[s]);
        let dur = sched.completion[op] - sched.start[op];
        tail[op] = dur + job_succ_tail.max(machine_succ_tail);
    }
    HeadsTails { head: sched.start.clone(), tail }
}

/// Per-machine OS positions of the operations currently assigned to it,
/// sorted, for locating a move's OS-order machine neighbors.
struct MachineOsIndex {
    /// (os position, op) pairs per machine, ascending by position.
    by_machine: Vec<Vec<(usize, OpId)>>,
}

impl MachineOsIndex {
    fn build(inst: &Instance, sol: &Solution) -> (Self, Vec<usize>) {
        let mut os_pos = vec![0usize; inst.total_ops()];
        let mut next = vec![0usize; inst.job_count()];
        let mut by_machine = vec![Vec::new(); inst.machine_count()];
        for (pos, &job) in sol.os.iter().enumerate() {
            let op = inst.linear_of(job, next[job]);
            next[job] += 1;
            os_pos[op] = pos;
            by_machine[sol.ms[op]].push((pos, op));
        }
        (Self { by_machine }, os_pos)
    }

    /// Last operation on `machine` sequenced before `pos`, and first after.
    /// The queried operation is never in the list: moves always target a
    /// machine other than the current assignment.
    fn neighbors(&self, machine: MachineId, pos: usize) -> (Option<OpId>, Option<OpId>) {
        let list = &self.by_machine[machine];
        let idx = list.partition_point(|&(p, _)| p < pos);
        let pred = (idx > 0).then(|| list[idx - 1].1);
        let succ = list.get(idx).map(|&(_, op)| op);
        (pred, succ)
    }
}

/// Makespan of the solution after reassigning `op` to `new_machine`.
///
/// Exact mode re-decodes the modified solution. Estimate mode combines the
/// current schedule's completions with tails around the operation's OS
/// position on the new machine; it is a fast screening proxy only.
pub fn evaluate_reassignment(
    inst: &Instance,
    sol: &Solution,
    sched: &Schedule,
    ht: &HeadsTails,
    op: OperationRef,
    new_machine: MachineId,
    mode: EvalMode,
) -> Time {
    assert!(inst.is_eligible(op.linear, new_machine), "move to infeasible machine");
    assert_ne!(sol.ms[op.linear], new_machine, "move must change the machine");
    match mode {
        EvalMode::Exact => {
            let mut modified = sol.clone();
            modified.ms[op.linear] = new_machine;
            Decoder::new().makespan(inst, &modified)
        }
        EvalMode::Estimate => {
            let (index, os_pos) = MachineOsIndex::build(inst, sol);
            estimate_move(inst, sched, ht, &index, &os_pos, op, new_machine)
        }
    }
}

fn estimate_move(
    inst: &Instance,
    sched: &Schedule,
    ht: &HeadsTails,
    index: &MachineOsIndex,
    os_pos: &[usize],
    op: OperationRef,
    new_machine: MachineId,
) -> Time {
    let pos = os_pos[op.linear];
    let (machine_pred, machine_succ) = index.neighbors(new_machine, pos);
    let job_pred_completion = (op.step > 0)
        .then(|| sched.completion[inst.linear_of(op.job, op.step - 1)])
        .unwrap_or(0);
    let machine_pred_completion = machine_pred.map_or(0, |p| sched.completion[p]);
    let job_succ_tail = (op.step + 1 < inst.ops_per_job(op.job))
        .then(|| ht.tail[inst.linear_of(op.job, op.step + 1)])
        .unwrap_or(0);
    let machine_succ_tail = machine_succ.map_or(0, |s| ht.tail[s]);
    job_pred_completion.max(machine_pred_completion)
        + inst.proc_time(op.linear, new_machine)
        + job_succ_tail.max(machine_succ_tail)
}

/// One applied move, for discipline checks and diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct AppliedMove {
    pub iteration: u64,
    pub op: OpId,
    pub machine: MachineId,
    pub was_tabu: bool,
    pub aspired: bool,
    /// True when no admissible move existed and the oldest tabu entry was
    /// taken instead.
    pub fallback: bool,
    pub exact_makespan: Time,
    pub expiry_set: u64,
}

/// Runs the tabu search for `iterations` steps and returns the best solution
/// found, never worse than the input.
pub fn tabu_search<R: Rng + ?Sized>(
    inst: &Instance,
    cell: &Solution,
    iterations: u64,
    rng: &mut R,
    mode: EvalMode,
) -> Solution {
    tabu_search_traced(inst, cell, iterations, rng, mode).0
}

/// [`tabu_search`] plus the exact makespan of the returned solution and the
/// applied-move log.
pub fn tabu_search_traced<R: Rng + ?Sized>(
    inst: &Instance,
    cell: &Solution,
    iterations: u64,
    rng: &mut R,
    mode: EvalMode,
) -> (Solution, Time, Vec<AppliedMove>) {
    let mut decoder = Decoder::new();
    let mut tabu = TabuList::new(inst);
    let mut current = cell.clone();
    let mut current_sched = decoder.schedule(inst, &current);
    let mut best = cell.clone();
    let mut best_makespan = current_sched.makespan;
    let mut log = Vec::new();

    for _ in 0..iterations {
        let path = critical_path(inst, &current_sched, rng);
        let q = path.len();

        // Candidate moves: every alternative machine of every path operation.
        let mut moves: Vec<(OpId, MachineId)> = Vec::new();
        for &op in &path.ops {
            for &(machine, _) in inst.eligible(op) {
                if machine != current.ms[op] {
                    moves.push((op, machine));
                }
            }
        }
        if moves.is_empty() {
            tabu.advance();
            continue;
        }

        let ht;
        let scores: Vec<Time> = match mode {
            EvalMode::Exact => moves
                .iter()
                .map(|&(op, machine)| {
                    let prev = current.ms[op];
                    current.ms[op] = machine;
                    let makespan = decoder.makespan(inst, &current);
                    current.ms[op] = prev;
                    makespan
                })
                .collect(),
            EvalMode::Estimate => {
                ht = heads_and_tails(inst, &current_sched);
                let (index, os_pos) = MachineOsIndex::build(inst, &current);
                moves
                    .iter()
                    .map(|&(op, machine)| {
                        estimate_move(inst, &current_sched, &ht, &index, &os_pos, inst.op_ref(op), machine)
                    })
                    .collect()
            }
        };

        let mut order: Vec<usize> = (0..moves.len()).collect();
        order.sort_by_key(|&i| scores[i]);

        // Best-scoring admissible move: not tabu, or tabu but beating the
        // incumbent best once re-decoded exactly (aspiration by objective).
        let mut selected: Option<(usize, Time, bool, bool)> = None;
        for &i in &order {
            let (op, machine) = moves[i];
            let exact_of = |current: &mut Solution, decoder: &mut Decoder| {
                let prev = current.ms[op];
                current.ms[op] = machine;
                let makespan = decoder.makespan(inst, current);
                current.ms[op] = prev;
                makespan
            };
            if !tabu.is_tabu(op, machine) {
                let exact = match mode {
                    EvalMode::Exact => scores[i],
                    EvalMode::Estimate => exact_of(&mut current, &mut decoder),
                };
                selected = Some((i, exact, false, false));
                break;
            }
            let exact = match mode {
                EvalMode::Exact => scores[i],
                EvalMode::Estimate => exact_of(&mut current, &mut decoder),
            };
            if exact < best_makespan {
                selected = Some((i, exact, true, true));
                break;
            }
        }
        // All moves tabu and none aspiring: take the oldest entry.
        let (chosen, exact, was_tabu, aspired, fallback) = match selected {
            Some((i, exact, tabu_flag, aspired)) => (i, exact, tabu_flag, aspired, false),
            None => {
                let oldest_expiry = moves
                    .iter()
                    .map(|&(op, machine)| tabu.expiry(op, machine))
                    .min()
                    .expect("move set is non-empty");
                let oldest: Vec<usize> = (0..moves.len())
                    .filter(|&i| tabu.expiry(moves[i].0, moves[i].1) == oldest_expiry)
                    .collect();
                let i = oldest[rng.random_range(0..oldest.len())];
                let (op, machine) = moves[i];
                let prev = current.ms[op];
                current.ms[op] = machine;
                let exact = decoder.makespan(inst, &current);
                current.ms[op] = prev;
                (i, exact, true, false, true)
            }
        };

        let (op, machine) = moves[chosen];
        current.ms[op] = machine;
        current_sched = decoder.schedule(inst, &current);
        debug_assert_eq!(current_sched.makespan, exact);
        if exact < best_makespan {
            best_makespan = exact;
            best = current.clone();
        }
        let threshold = tabu_threshold(q, inst.op_ref(op), inst);
        tabu.forbid(op, machine, threshold);
        let expiry_set = tabu.expiry(op, machine);
        log.push(AppliedMove {
            iteration: tabu.current_iteration(),
            op,
            machine,
            was_tabu,
            aspired,
            fallback,
            exact_makespan: exact,
            expiry_set,
        });
        tabu.advance();
    }
    (best, best_makespan, log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_instance;
    use crate::schedule::decode_active;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn d1_variant() -> Instance {
        // J1 = O11{M1:4}, O12{M2:1}; J2 = O21{M1:2, M2:2}.
        parse_instance("2 2\n2 1 1 4 1 2 1\n1 2 1 2 2 2\n", "d1v").unwrap()
    }

    #[test]
    fn threshold_is_path_length_plus_eligible() {
        let inst = d1_variant();
        assert_eq!(tabu_threshold(3, inst.op_ref(2), &inst), 5);
        assert_eq!(tabu_threshold(1, inst.op_ref(0), &inst), 2);
        // D1 path [O11, O12] with one eligible machine on O12.
        assert_eq!(tabu_threshold(2, inst.op_ref(1), &inst), 3);
    }

    #[test]
    fn heads_tails_on_d1() {
        let inst = parse_instance("2 2\n2 1 1 4 1 2 1\n1 1 2 2\n", "d1").unwrap();
        let sol = Solution { os: vec![0, 0, 1], ms: vec![0, 1, 1] };
        let sched = decode_active(&inst, &sol);
        let ht = heads_and_tails(&inst, &sched);
        assert_eq!(ht.head, vec![0, 4, 0]);
        assert_eq!(ht.tail, vec![5, 1, 3]);
        for op in 0..3 {
            assert!(ht.head[op] + ht.tail[op] <= sched.makespan);
        }
        assert_eq!(ht.head[0] + ht.tail[0], 5);
        assert_eq!(ht.head[1] + ht.tail[1], 5);
    }

    #[test]
    fn single_op_heads_tails() {
        let inst = parse_instance("1 1\n1 1 1 3\n", "one").unwrap();
        let sched = decode_active(&inst, &Solution { os: vec![0], ms: vec![0] });
        let ht = heads_and_tails(&inst, &sched);
        assert_eq!((ht.head[0], ht.tail[0]), (0, 3));
    }

    #[test]
    fn reassignment_exact_and_estimate_agree_on_d1_variant() {
        let inst = d1_variant();
        let sol = Solution { os: vec![0, 0, 1], ms: vec![0, 1, 1] };
        let sched = decode_active(&inst, &sol);
        assert_eq!(sched.makespan, 5);
        let ht = heads_and_tails(&inst, &sched);
        let op = inst.op_ref(2);
        let exact = evaluate_reassignment(&inst, &sol, &sched, &ht, op, 0, EvalMode::Exact);
        assert_eq!(exact, 6);
        let est = evaluate_reassignment(&inst, &sol, &sched, &ht, op, 0, EvalMode::Estimate);
        assert_eq!(est, 6);
    }

    #[test]
    fn single_op_reassignment_is_exact() {
        let inst = parse_instance("1 2\n1 2 1 5 2 2\n", "one").unwrap();
        let sol = Solution { os: vec![0], ms: vec![0] };
        let sched = decode_active(&inst, &sol);
        let ht = heads_and_tails(&inst, &sched);
        let op = inst.op_ref(0);
        assert_eq!(evaluate_reassignment(&inst, &sol, &sched, &ht, op, 1, EvalMode::Exact), 2);
    }

    #[test]
    fn tabu_takes_forced_improving_move() {
        let inst = parse_instance("1 2\n1 2 1 5 2 2\n", "one").unwrap();
        let start = Solution { os: vec![0], ms: vec![0] };
        for mode in [EvalMode::Exact, EvalMode::Estimate] {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let best = tabu_search(&inst, &start, 1, &mut rng, mode);
            assert_eq!(decode_active(&inst, &best).makespan, 2);
        }
    }

    #[test]
    fn tabu_no_moves_returns_input() {
        let inst = parse_instance("2 2\n2 1 1 4 1 2 1\n1 1 2 2\n", "d1").unwrap();
        let start = Solution { os: vec![0, 0, 1], ms: vec![0, 1, 1] };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (best, makespan, log) = tabu_search_traced(&inst, &start, 8, &mut rng, EvalMode::Exact);
        assert_eq!(best, start);
        assert_eq!(makespan, 5);
        assert!(log.is_empty());
    }

    #[test]
    fn tabu_fixes_bad_assignment_on_d1_variant() {
        let inst = d1_variant();
        let start = Solution { os: vec![0, 0, 1], ms: vec![0, 1, 0] };
        assert_eq!(decode_active(&inst, &start).makespan, 6);
        for mode in [EvalMode::Exact, EvalMode::Estimate] {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            let (best, makespan, _) = tabu_search_traced(&inst, &start, 1, &mut rng, mode);
            assert_eq!(makespan, 5);
            assert_eq!(decode_active(&inst, &best).makespan, 5);
        }
    }

    #[test]
    fn zero_budget_returns_input() {
        let inst = d1_variant();
        let start = Solution { os: vec![0, 0, 1], ms: vec![0, 1, 0] };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(tabu_search(&inst, &start, 0, &mut rng, EvalMode::Exact), start);
    }
}
