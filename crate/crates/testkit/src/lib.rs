//! Test-only oracles and generators shared by the test suites.
//!
//! Everything here re-derives its answers from first principles on purpose:
//! none of the checks reuse the decoder's gap-search logic, so they stay
//! meaningful as independent verification of it.

use rand::Rng;

use glnsa_core::instance::{Instance, Time};
use glnsa_core::schedule::{Schedule, Solution};

/// Size bounds for random instance generation.
#[derive(Debug, Clone, Copy)]
pub struct GenBounds {
    pub max_jobs: usize,
    pub max_ops_per_job: usize,
    pub max_machines: usize,
    pub max_duration: Time,
}

impl GenBounds {
    /// Small instances for high-volume fuzzing.
    pub fn small() -> Self {
        Self { max_jobs: 4, max_ops_per_job: 4, max_machines: 4, max_duration: 9 }
    }

    /// Bounds used by the tiny-oracle comparison runs.
    pub fn tiny() -> Self {
        Self { max_jobs: 3, max_ops_per_job: 2, max_machines: 3, max_duration: 9 }
    }

    /// Mid-size instances for heavier end-to-end fuzz.
    pub fn medium() -> Self {
        Self { max_jobs: 6, max_ops_per_job: 5, max_machines: 5, max_duration: 20 }
    }
}

/// Draws a random valid instance within the bounds: every dimension at least
/// one, every eligible set a non-empty uniform subset of the machines.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, bounds: GenBounds) -> Instance {
    let jobs = rng.random_range(1..=bounds.max_jobs);
    let machines = rng.random_range(1..=bounds.max_machines);
    let mut spec = Vec::with_capacity(jobs);
    for _ in 0..jobs {
        let ops = rng.random_range(1..=bounds.max_ops_per_job);
        let mut job = Vec::with_capacity(ops);
        for _ in 0..ops {
            let size = rng.random_range(1..=machines);
            let mut pool: Vec<usize> = (1..=machines).collect();
            let mut set = Vec::with_capacity(size);
            for _ in 0..size {
                let pick = rng.random_range(0..pool.len());
                let machine = pool.swap_remove(pick);
                set.push((machine, rng.random_range(1..=bounds.max_duration)));
            }
            job.push(set);
        }
        spec.push(job);
    }
    Instance::new("fuzz", machines, spec).expect("generator produced an invalid instance")
}

/// Verifies every schedule invariant directly from the instance and the
/// solution: durations, job precedence, machine exclusivity, sequence
/// consistency and the makespan identities.
pub fn validate_schedule(inst: &Instance, sol: &Solution, sched: &Schedule) -> Result<(), String> {
    let total = inst.total_ops();
    if sched.start.len() != total || sched.completion.len() != total {
        return Err("start/completion length mismatch".into());
    }
    for op in 0..total {
        let dur = inst.proc_time(op, sol.ms[op]);
        if sched.completion[op] != sched.start[op] + dur {
            return Err(format!("op {op}: completion != start + duration"));
        }
    }
    for r in inst.ops() {
        if r.step > 0 {
            let prev = inst.linear_of(r.job, r.step - 1);
            if sched.start[r.linear] < sched.completion[prev] {
                return Err(format!("op {} starts before its job predecessor ends", r.linear));
            }
        }
    }
    if sched.machine_sequence.len() != inst.machine_count() {
        return Err("machine_sequence length mismatch".into());
    }
    let mut seen = vec![false; total];
    for (machine, seq) in sched.machine_sequence.iter().enumerate() {
        let mut prev_end = 0;
        for (pos, &op) in seq.iter().enumerate() {
            if sol.ms[op] != machine {
                return Err(format!("op {op} listed on machine {machine} but assigned elsewhere"));
            }
            if seen[op] {
                return Err(format!("op {op} appears twice in machine sequences"));
            }
            seen[op] = true;
            if pos > 0 && sched.start[op] < prev_end {
                return Err(format!("overlap before op {op} on machine {machine}"));
            }
            prev_end = sched.completion[op];
        }
    }
    if seen.iter().any(|&s| !s) {
        return Err("some operation missing from machine sequences".into());
    }
    let max_completion = (0..total).map(|o| sched.completion[o]).max().unwrap_or(0);
    if sched.makespan != max_completion {
        return Err("makespan != max completion".into());
    }
    for job in 0..inst.job_count() {
        let last = inst.linear_of(job, inst.ops_per_job(job) - 1);
        if sched.job_completion[job] != sched.completion[last] {
            return Err(format!("job {job} completion mismatch"));
        }
    }
    if sched.job_completion.iter().copied().max().unwrap_or(0) != sched.makespan {
        return Err("makespan != max job completion".into());
    }
    Ok(())
}

/// Post-hoc activeness check: given the final placement of all other
/// operations, no operation could start strictly earlier on its machine
/// while respecting its job predecessor.
pub fn check_active_property(
    inst: &Instance,
    sol: &Solution,
    sched: &Schedule,
) -> Result<(), String> {
    for r in inst.ops() {
        let op = r.linear;
        let machine = sol.ms[op];
        let dur = inst.proc_time(op, machine);
        let job_ready = if r.step > 0 {
            sched.completion[inst.linear_of(r.job, r.step - 1)]
        } else {
            0
        };
        let mut others: Vec<(Time, Time)> = (0..inst.total_ops())
            .filter(|&o| o != op && sol.ms[o] == machine)
            .map(|o| (sched.start[o], sched.completion[o]))
            .collect();
        others.sort_unstable();
        let mut gap_start = 0;
        let mut earliest = None;
        for &(s, e) in &others {
            let candidate = gap_start.max(job_ready);
            if candidate + dur <= s {
                earliest = Some(candidate);
                break;
            }
            gap_start = e;
        }
        let earliest = earliest.unwrap_or_else(|| gap_start.max(job_ready));
        if sched.start[op] != earliest {
            return Err(format!(
                "op {op} starts at {} but {} is feasible",
                sched.start[op], earliest
            ));
        }
    }
    Ok(())
}

/// Append-only reference decoding: every operation starts at
/// max(job ready, machine last end), never filling gaps.
pub fn semi_active_makespan(inst: &Instance, sol: &Solution) -> Time {
    let mut job_next = vec![0usize; inst.job_count()];
    let mut job_ready = vec![0; inst.job_count()];
    let mut machine_ready = vec![0; inst.machine_count()];
    let mut makespan = 0;
    for &job in &sol.os {
        let step = job_next[job];
        job_next[job] = step + 1;
        let op = inst.linear_of(job, step);
        let machine = sol.ms[op];
        let start = job_ready[job].max(machine_ready[machine]);
        let end = start + inst.proc_time(op, machine);
        job_ready[job] = end;
        machine_ready[machine] = end;
        makespan = makespan.max(end);
    }
    makespan
}

/// Verifies the critical path invariants against an independently recomputed
/// machine order: zero-slack links between consecutive operations via job or
/// immediate machine precedence, start 0 at the front, makespan at the back.
pub fn check_critical_path(
    inst: &Instance,
    sol: &Solution,
    sched: &Schedule,
    path: &[usize],
) -> Result<(), String> {
    if path.is_empty() {
        return Err("critical path is empty".into());
    }
    if sched.start[path[0]] != 0 {
        return Err("first path operation does not start at 0".into());
    }
    if sched.completion[*path.last().unwrap()] != sched.makespan {
        return Err("last path operation does not reach the makespan".into());
    }
    for pair in path.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if sched.completion[a] != sched.start[b] {
            return Err(format!("slack between path operations {a} and {b}"));
        }
        let rb = inst.op_ref(b);
        let is_job_pred = rb.step > 0 && inst.linear_of(rb.job, rb.step - 1) == a;
        let mut on_machine: Vec<usize> = (0..inst.total_ops())
            .filter(|&o| sol.ms[o] == sol.ms[b])
            .collect();
        on_machine.sort_by_key(|&o| sched.start[o]);
        let idx = on_machine.iter().position(|&o| o == b).unwrap();
        let is_machine_pred = idx > 0 && on_machine[idx - 1] == a;
        if !is_job_pred && !is_machine_pred {
            return Err(format!("{a} is neither job nor machine predecessor of {b}"));
        }
    }
    Ok(())
}

/// Multiset equality of two sequences.
pub fn same_multiset<T: Ord + Clone>(a: &[T], b: &[T]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort();
    b.sort();
    a == b
}

/// Positional Hamming distance.
pub fn hamming<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}
