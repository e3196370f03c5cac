//! FJSP problem data: jobs, operations, eligible machine sets and processing
//! times, plus the standard benchmark file format parser.

use std::fmt::Write as _;

use thiserror::Error;

/// Job index, 0-based internally.
pub type JobId = usize;
/// Machine index, 0-based internally (1-based in files and labels).
pub type MachineId = usize;
/// Linear operation id in job-major order.
pub type OpId = usize;
/// Processing times and schedule times share one integral unit.
pub type Time = u32;

/// One operation identified three ways: by job, by step within the job, and
/// by its position in the fixed job-major enumeration of all operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OperationRef {
    pub job: JobId,
    pub step: usize,
    pub linear: OpId,
}

/// Immutable FJSP instance.
///
/// Machine ids and job ids are normalized to 0-based on construction; the
/// file format and display labels stay 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    name: String,
    job_count: usize,
    machine_count: usize,
    ops_per_job: Vec<usize>,
    /// Linear id of each job's first operation (prefix sums of ops_per_job).
    job_first_op: Vec<OpId>,
    /// Per operation: eligible machines with their processing times, sorted
    /// by machine id.
    eligible: Vec<Vec<(MachineId, Time)>>,
    /// Dense (op, machine) -> time lookup; 0 marks an infeasible pair.
    ptime_dense: Vec<Time>,
    total_ops: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("instance must have at least one job")]
    NoJobs,
    #[error("instance must have at least one machine")]
    NoMachines,
    #[error("job {job} has no operations")]
    EmptyJob { job: usize },
    #[error("operation ({job},{step}) has an empty eligible machine set")]
    EmptyEligibleSet { job: usize, step: usize },
    #[error("operation ({job},{step}) names machine {machine} outside 1..={machine_count}")]
    MachineOutOfRange {
        job: usize,
        step: usize,
        machine: usize,
        machine_count: usize,
    },
    #[error("operation ({job},{step}) lists machine {machine} twice")]
    DuplicateMachine {
        job: usize,
        step: usize,
        machine: usize,
    },
    #[error("operation ({job},{step}) has processing time 0 on machine {machine}")]
    ZeroDuration {
        job: usize,
        step: usize,
        machine: usize,
    },
}

impl Instance {
    /// Builds an instance from per-job operation lists. `jobs[i][j]` is the
    /// eligible set of operation (i,j) as `(machine, time)` pairs with
    /// 1-based machine ids, matching the file format.
    pub fn new(
        name: impl Into<String>,
        machine_count: usize,
        jobs: Vec<Vec<Vec<(usize, Time)>>>,
    ) -> Result<Self, InstanceError> {
        if jobs.is_empty() {
            return Err(InstanceError::NoJobs);
        }
        if machine_count == 0 {
            return Err(InstanceError::NoMachines);
        }
        let job_count = jobs.len();
        let mut ops_per_job = Vec::with_capacity(job_count);
        let mut job_first_op = Vec::with_capacity(job_count);
        let mut eligible: Vec<Vec<(MachineId, Time)>> = Vec::new();
        for (i, job) in jobs.iter().enumerate() {
            if job.is_empty() {
                return Err(InstanceError::EmptyJob { job: i + 1 });
            }
            job_first_op.push(eligible.len());
            ops_per_job.push(job.len());
            for (j, raw_set) in job.iter().enumerate() {
                if raw_set.is_empty() {
                    return Err(InstanceError::EmptyEligibleSet {
                        job: i + 1,
                        step: j + 1,
                    });
                }
                let mut set: Vec<(MachineId, Time)> = Vec::with_capacity(raw_set.len());
                for &(machine, time) in raw_set {
                    if machine == 0 || machine > machine_count {
                        return Err(InstanceError::MachineOutOfRange {
                            job: i + 1,
                            step: j + 1,
                            machine,
                            machine_count,
                        });
                    }
                    if time == 0 {
                        return Err(InstanceError::ZeroDuration {
                            job: i + 1,
                            step: j + 1,
                            machine,
                        });
                    }
                    if set.iter().any(|&(k, _)| k == machine - 1) {
                        return Err(InstanceError::DuplicateMachine {
                            job: i + 1,
                            step: j + 1,
                            machine,
                        });
                    }
                    set.push((machine - 1, time));
                }
                set.sort_unstable_by_key(|&(k, _)| k);
                eligible.push(set);
            }
        }
        let total_ops = eligible.len();
        let mut ptime_dense = vec![0; total_ops * machine_count];
        for (op, set) in eligible.iter().enumerate() {
            for &(k, t) in set {
                ptime_dense[op * machine_count + k] = t;
            }
        }
        Ok(Self {
            name: name.into(),
            job_count,
            machine_count,
            ops_per_job,
            job_first_op,
            eligible,
            ptime_dense,
            total_ops,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn job_count(&self) -> usize {
        self.job_count
    }

    pub fn machine_count(&self) -> usize {
        self.machine_count
    }

    /// Total operation count T.
    pub fn total_ops(&self) -> usize {
        self.total_ops
    }

    pub fn ops_per_job(&self, job: JobId) -> usize {
        self.ops_per_job[job]
    }

    pub fn linear_of(&self, job: JobId, step: usize) -> OpId {
        debug_assert!(step < self.ops_per_job[job]);
        self.job_first_op[job] + step
    }

    pub fn op_ref(&self, op: OpId) -> OperationRef {
        let job = match self.job_first_op.binary_search(&op) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        OperationRef {
            job,
            step: op - self.job_first_op[job],
            linear: op,
        }
    }

    /// Eligible machines of an operation with processing times, sorted by
    /// machine id.
    pub fn eligible(&self, op: OpId) -> &[(MachineId, Time)] {
        &self.eligible[op]
    }

    /// Processing time of `op` on `machine`; panics if the pair is infeasible.
    pub fn proc_time(&self, op: OpId, machine: MachineId) -> Time {
        let t = self.ptime_dense[op * self.machine_count + machine];
        assert!(t > 0, "machine {} cannot process operation {}", machine + 1, op);
        t
    }

    pub fn is_eligible(&self, op: OpId, machine: MachineId) -> bool {
        self.ptime_dense[op * self.machine_count + machine] > 0
    }

    pub fn ops(&self) -> impl Iterator<Item = OperationRef> + '_ {
        (0..self.total_ops).map(|op| self.op_ref(op))
    }

    /// Job-major multiset of job ids, the canonical OS template.
    pub fn os_template(&self) -> Vec<JobId> {
        let mut os = Vec::with_capacity(self.total_ops);
        for job in 0..self.job_count {
            os.extend(std::iter::repeat(job).take(self.ops_per_job[job]));
        }
        os
    }

    /// Writes the instance back out in the standard benchmark format.
    pub fn to_standard_format(&self) -> String {
        let mean_flex =
            self.eligible.iter().map(|s| s.len()).sum::<usize>() as f64 / self.total_ops as f64;
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {}", self.job_count, self.machine_count, mean_flex);
        for job in 0..self.job_count {
            let _ = write!(out, "{}", self.ops_per_job[job]);
            for step in 0..self.ops_per_job[job] {
                let set = &self.eligible[self.linear_of(job, step)];
                let _ = write!(out, " {}", set.len());
                for &(k, t) in set {
                    let _ = write!(out, " {} {}", k + 1, t);
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Mean eligible-set size over all operations divided by the machine count.
pub fn flexibility_rate(inst: &Instance) -> f64 {
    let total: usize = (0..inst.total_ops()).map(|op| inst.eligible(op).len()).sum();
    total as f64 / (inst.total_ops() as f64 * inst.machine_count() as f64)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("token {position}: expected {expected}, found end of input")]
    UnexpectedEnd { position: usize, expected: &'static str },
    #[error("token {position}: expected {expected}, found {found:?}")]
    InvalidToken {
        position: usize,
        expected: &'static str,
        found: String,
    },
    #[error("token {position}: machine id {machine} exceeds m={machine_count}")]
    MachineOutOfRange {
        position: usize,
        machine: usize,
        machine_count: usize,
    },
    #[error("token {position}: machine id must be at least 1")]
    MachineZero { position: usize },
    #[error("token {position}: processing time must be at least 1")]
    NonPositiveDuration { position: usize },
    #[error("token {position}: {what} must be at least 1")]
    NonPositiveCount { position: usize, what: &'static str },
    #[error("token {position}: machine {machine} listed twice for one operation")]
    DuplicateMachine { position: usize, machine: usize },
    #[error("token {position}: unexpected trailing token {found:?}")]
    TrailingToken { position: usize, found: String },
    #[error("first line must hold `n m` with at most one extra flexibility value")]
    MalformedHeader,
    #[error(transparent)]
    Invalid(#[from] InstanceError),
}

struct Tokens<'a> {
    iter: std::str::SplitAsciiWhitespace<'a>,
    /// 1-based index of the last token handed out.
    position: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str, consumed: usize) -> Self {
        Self {
            iter: text.split_ascii_whitespace(),
            position: consumed,
        }
    }

    fn next_usize(&mut self, expected: &'static str) -> Result<usize, ParseError> {
        let position = self.position + 1;
        match self.iter.next() {
            None => Err(ParseError::UnexpectedEnd { position, expected }),
            Some(tok) => {
                self.position = position;
                tok.parse().map_err(|_| ParseError::InvalidToken {
                    position,
                    expected,
                    found: tok.to_string(),
                })
            }
        }
    }

    fn next_raw(&mut self) -> Option<(usize, String)> {
        self.iter.next().map(|tok| {
            self.position += 1;
            (self.position, tok.to_string())
        })
    }
}

/// Parses the standard FJSP benchmark format.
///
/// First line: `n m [avg_flexibility]` (the trailing value is ignored).
/// Then one entry per job: `n_i` followed, per operation, by the eligible
/// machine count `k` and `k` pairs `machine_id proc_time`. After the first
/// line, line breaks count as ordinary whitespace; benchmark files wrap
/// lines inconsistently.
pub fn parse_instance(text: &str, name: &str) -> Result<Instance, ParseError> {
    let (header, body) = match text.find('\n') {
        Some(idx) => (&text[..idx], &text[idx + 1..]),
        None => (text, ""),
    };
    let mut head = Tokens::new(header, 0);
    let job_count = head.next_usize("job count n")?;
    if job_count == 0 {
        return Err(ParseError::NonPositiveCount {
            position: 1,
            what: "job count n",
        });
    }
    let machine_count = head.next_usize("machine count m")?;
    if machine_count == 0 {
        return Err(ParseError::NonPositiveCount {
            position: 2,
            what: "machine count m",
        });
    }
    // Optional mean-flexibility value; any real is accepted and discarded.
    if let Some((position, tok)) = head.next_raw() {
        if tok.parse::<f64>().is_err() {
            return Err(ParseError::InvalidToken {
                position,
                expected: "flexibility value",
                found: tok,
            });
        }
        if head.next_raw().is_some() {
            return Err(ParseError::MalformedHeader);
        }
    }

    let mut toks = Tokens::new(body, head.position);
    let mut jobs: Vec<Vec<Vec<(usize, Time)>>> = Vec::with_capacity(job_count);
    for _ in 0..job_count {
        let n_i = toks.next_usize("operation count n_i")?;
        if n_i == 0 {
            return Err(ParseError::NonPositiveCount {
                position: toks.position,
                what: "operation count n_i",
            });
        }
        let mut ops = Vec::with_capacity(n_i);
        for _ in 0..n_i {
            let k = toks.next_usize("eligible machine count")?;
            if k == 0 {
                return Err(ParseError::NonPositiveCount {
                    position: toks.position,
                    what: "eligible machine count",
                });
            }
            let mut set: Vec<(usize, Time)> = Vec::with_capacity(k);
            for _ in 0..k {
                let machine = toks.next_usize("machine id")?;
                let machine_pos = toks.position;
                if machine == 0 {
                    return Err(ParseError::MachineZero { position: machine_pos });
                }
                if machine > machine_count {
                    return Err(ParseError::MachineOutOfRange {
                        position: machine_pos,
                        machine,
                        machine_count,
                    });
                }
                if set.iter().any(|&(prev, _)| prev == machine) {
                    return Err(ParseError::DuplicateMachine {
                        position: machine_pos,
                        machine,
                    });
                }
                let time = toks.next_usize("processing time")?;
                if time == 0 {
                    return Err(ParseError::NonPositiveDuration { position: toks.position });
                }
                set.push((machine, time as Time));
            }
            ops.push(set);
        }
        jobs.push(ops);
    }
    if let Some((position, found)) = toks.next_raw() {
        return Err(ParseError::TrailingToken { position, found });
    }
    Ok(Instance::new(name, machine_count, jobs)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_parses() {
        let inst = parse_instance("1 1\n1 1 1 3\n", "tiny").unwrap();
        assert_eq!(inst.job_count(), 1);
        assert_eq!(inst.machine_count(), 1);
        assert_eq!(inst.total_ops(), 1);
        assert_eq!(inst.eligible(0), &[(0, 3)]);
        assert_eq!(inst.proc_time(0, 0), 3);
    }

    #[test]
    fn header_flexibility_value_is_ignored() {
        let a = parse_instance("1 2 1.5\n1 1 2 4\n", "a").unwrap();
        let b = parse_instance("1 2\n1 1 2 4\n", "a").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn machine_out_of_range_names_token() {
        let err = parse_instance("1 2\n1 1 3 5\n", "bad").unwrap_err();
        assert_eq!(
            err,
            ParseError::MachineOutOfRange {
                position: 5,
                machine: 3,
                machine_count: 2
            }
        );
        assert!(err.to_string().contains("machine id 3 exceeds m=2"));
    }

    #[test]
    fn truncated_stream_reports_position() {
        let err = parse_instance("2 2\n1 1 1 3\n", "bad").unwrap_err();
        assert!(matches!(err, ParseError::UnexpectedEnd { position: 7, .. }));
    }

    #[test]
    fn zero_duration_rejected() {
        let err = parse_instance("1 1\n1 1 1 0\n", "bad").unwrap_err();
        assert_eq!(err, ParseError::NonPositiveDuration { position: 6 });
    }

    #[test]
    fn zero_counts_rejected() {
        assert!(matches!(
            parse_instance("1 1\n0\n", "bad").unwrap_err(),
            ParseError::NonPositiveCount { what: "operation count n_i", .. }
        ));
        assert!(matches!(
            parse_instance("1 1\n1 0\n", "bad").unwrap_err(),
            ParseError::NonPositiveCount { what: "eligible machine count", .. }
        ));
    }

    #[test]
    fn trailing_tokens_rejected() {
        let err = parse_instance("1 1\n1 1 1 3 9\n", "bad").unwrap_err();
        assert!(matches!(err, ParseError::TrailingToken { .. }));
    }

    #[test]
    fn line_breaks_are_plain_whitespace_in_body() {
        let wrapped = parse_instance("2 2\n2 1 1 3\n1 2 4\n1 1 1 2\n", "w").unwrap();
        let flat = parse_instance("2 2\n2 1 1 3 1 2 4 1 1 1 2\n", "w").unwrap();
        assert_eq!(wrapped, flat);
    }

    #[test]
    fn full_flexibility_rate_is_one() {
        let inst = parse_instance("1 3\n2 3 1 5 2 6 3 7 3 1 1 2 2 3 3\n", "full").unwrap();
        assert!((flexibility_rate(&inst) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flexibility_matches_brute_sum() {
        let inst = parse_instance("2 4\n2 2 1 3 2 4 1 4 9\n1 3 1 2 3 5 4 8\n", "f").unwrap();
        let brute: usize = (0..inst.total_ops()).map(|o| inst.eligible(o).len()).sum();
        let expect = brute as f64 / (inst.total_ops() as f64 * 4.0);
        assert!((flexibility_rate(&inst) - expect).abs() < 1e-9);
    }

    #[test]
    fn linear_ids_are_job_major() {
        let inst = parse_instance("2 2\n2 1 1 3 1 2 4 1 1 1 2\n", "ids").unwrap();
        assert_eq!(inst.linear_of(0, 0), 0);
        assert_eq!(inst.linear_of(0, 1), 1);
        assert_eq!(inst.linear_of(1, 0), 2);
        let r = inst.op_ref(1);
        assert_eq!((r.job, r.step, r.linear), (0, 1, 1));
    }

    #[test]
    fn roundtrip_through_standard_format() {
        let text = "2 3 1.5\n2 2 1 3 2 4 1 2 9\n1 3 1 2 2 5 3 8\n";
        let inst = parse_instance(text, "rt").unwrap();
        let again = parse_instance(&inst.to_standard_format(), "rt").unwrap();
        assert_eq!(inst, again);
    }
}
