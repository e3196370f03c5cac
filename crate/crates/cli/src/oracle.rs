//! Exhaustive optimum for tiny instances: every OS permutation with
//! repetition crossed with every machine assignment, decoded actively.

use thiserror::Error;

use glnsa_core::instance::{Instance, JobId, Time};
use glnsa_core::schedule::{Decoder, Solution};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("enumeration of {combinations} (OS x MS) pairs exceeds the cap of {cap}")]
    TooLarge { combinations: u128, cap: u128 },
    #[error("enumeration size overflows a u128")]
    Overflow,
}

/// Number of (OS permutation, MS assignment) pairs:
/// T! / prod(n_i!) * prod(|eligible|).
pub fn enumeration_count(inst: &Instance) -> Result<u128, OracleError> {
    let factorial = |n: usize| -> Option<u128> {
        (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
    };
    let mut count = factorial(inst.total_ops()).ok_or(OracleError::Overflow)?;
    for job in 0..inst.job_count() {
        count /= factorial(inst.ops_per_job(job)).ok_or(OracleError::Overflow)?;
    }
    for op in 0..inst.total_ops() {
        count = count
            .checked_mul(inst.eligible(op).len() as u128)
            .ok_or(OracleError::Overflow)?;
    }
    Ok(count)
}

/// Minimum makespan over the full solution space, or a size report when the
/// enumeration would exceed `cap`.
pub fn brute_force_optimal(inst: &Instance, cap: u128) -> Result<Time, OracleError> {
    let combinations = enumeration_count(inst)?;
    if combinations > cap {
        return Err(OracleError::TooLarge { combinations, cap });
    }

    let total = inst.total_ops();
    let mut decoder = Decoder::new();
    let mut sol = Solution {
        os: Vec::with_capacity(total),
        ms: (0..total).map(|op| inst.eligible(op)[0].0).collect(),
    };
    let mut remaining: Vec<usize> = (0..inst.job_count()).map(|i| inst.ops_per_job(i)).collect();
    let mut best = Time::MAX;
    enumerate_os(inst, &mut sol, &mut remaining, &mut decoder, &mut best);
    Ok(best)
}

fn enumerate_os(
    inst: &Instance,
    sol: &mut Solution,
    remaining: &mut [usize],
    decoder: &mut Decoder,
    best: &mut Time,
) {
    if sol.os.len() == inst.total_ops() {
        enumerate_ms(inst, sol, 0, decoder, best);
        return;
    }
    for job in 0..remaining.len() {
        if remaining[job] == 0 {
            continue;
        }
        remaining[job] -= 1;
        sol.os.push(job as JobId);
        enumerate_os(inst, sol, remaining, decoder, best);
        sol.os.pop();
        remaining[job] += 1;
    }
}

fn enumerate_ms(
    inst: &Instance,
    sol: &mut Solution,
    op: usize,
    decoder: &mut Decoder,
    best: &mut Time,
) {
    if op == inst.total_ops() {
        *best = (*best).min(decoder.makespan(inst, sol));
        return;
    }
    for &(machine, _) in inst.eligible(op) {
        sol.ms[op] = machine;
        enumerate_ms(inst, sol, op + 1, decoder, best);
    }
}
