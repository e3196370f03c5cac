//! Exploration neighborhood: OS-string operators (insertion, swapping, path
//! relinking), machine-string mutation, and best-neighbor selection for one
//! smart cell.

use rand::Rng;

use crate::engine::GlnsaConfig;
use crate::instance::{Instance, JobId, MachineId};
use crate::schedule::{Decoder, Solution};

/// Which OS operator produced a neighbor, and whether machine mutation fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OsOperator {
    Insertion,
    Swapping,
    PathRelinking,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperatorTag {
    pub os_op: OsOperator,
    pub mutated: bool,
}

/// The `l` neighbors generated for one cell, with provenance tags.
#[derive(Debug, Clone)]
pub struct NeighborhoodSample {
    pub neighbors: Vec<Solution>,
    pub tags: Vec<OperatorTag>,
}

/// Removes the element at `k1` and re-inserts it so it lands at index `k2`;
/// everything in between shifts by one toward the vacated slot.
pub fn insertion(os: &[JobId], k1: usize, k2: usize) -> Vec<JobId> {
    assert!(k1 < os.len() && k2 < os.len() && k1 != k2, "insertion positions out of contract");
    let mut out = os.to_vec();
    let moved = out.remove(k1);
    out.insert(k2, moved);
    out
}

/// Exchanges the elements at `k1` and `k2`.
pub fn swapping(os: &[JobId], k1: usize, k2: usize) -> Vec<JobId> {
    assert!(k1 < os.len() && k2 < os.len() && k1 != k2, "swapping positions out of contract");
    let mut out = os.to_vec();
    out.swap(k1, k2);
    out
}

/// Walks a route from `os` toward `guide` by repeatedly fixing the first
/// mismatched position with a swap, then returns one intermediate string
/// chosen uniformly. Endpoints are excluded; when the route has no strict
/// intermediate the input comes back unchanged.
///
/// Swap partners are taken from positions that do not already agree with the
/// guide, so every step settles at least one position for good.
pub fn path_relinking<R: Rng + ?Sized>(os: &[JobId], guide: &[JobId], rng: &mut R) -> Vec<JobId> {
    assert_eq!(os.len(), guide.len(), "path relinking endpoints differ in length");
    let mut current = os.to_vec();
    let mut route: Vec<Vec<JobId>> = Vec::new();
    loop {
        let Some(k) = (0..current.len()).find(|&i| current[i] != guide[i]) else {
            break;
        };
        let p = (k + 1..current.len())
            .find(|&i| current[i] == guide[k] && current[i] != guide[i])
            .expect("endpoints are not permutations of the same multiset");
        current.swap(k, p);
        if current != guide {
            route.push(current.clone());
        }
    }
    match route.len() {
        0 => os.to_vec(),
        n => route.swap_remove(rng.random_range(0..n)),
    }
}

/// Reassigns exactly floor(T/2) distinct random positions of the machine
/// string; positions with a single eligible machine stay put, the rest move
/// to a uniformly chosen different eligible machine.
pub fn mutate_machines<R: Rng + ?Sized>(
    inst: &Instance,
    ms: &[MachineId],
    rng: &mut R,
) -> Vec<MachineId> {
    mutate_machines_traced(inst, ms, rng).0
}

/// Same as [`mutate_machines`] but also reports which positions were drawn,
/// so tests can check the exact selection count.
pub fn mutate_machines_traced<R: Rng + ?Sized>(
    inst: &Instance,
    ms: &[MachineId],
    rng: &mut R,
) -> (Vec<MachineId>, Vec<usize>) {
    let total = inst.total_ops();
    debug_assert_eq!(ms.len(), total);
    let chosen = rand::seq::index::sample(rng, total, total / 2).into_vec();
    let mut out = ms.to_vec();
    for &op in &chosen {
        let set = inst.eligible(op);
        if set.len() < 2 {
            continue;
        }
        let current = out[op];
        // Uniform over the eligible set minus the current machine.
        let pick = rng.random_range(0..set.len() - 1);
        let mut idx = 0;
        for &(machine, _) in set {
            if machine == current {
                continue;
            }
            if idx == pick {
                out[op] = machine;
                break;
            }
            idx += 1;
        }
    }
    (out, chosen)
}

fn os_variant<R: Rng + ?Sized>(
    cell: &Solution,
    population: &[Solution],
    cell_index: usize,
    cfg: &GlnsaConfig,
    rng: &mut R,
) -> (Vec<JobId>, OsOperator) {
    let len = cell.os.len();
    let draw: f64 = rng.random();
    let op = if draw < cfg.alpha_i {
        OsOperator::Insertion
    } else if draw < cfg.alpha_i + cfg.alpha_s {
        OsOperator::Swapping
    } else {
        OsOperator::PathRelinking
    };
    let os = match op {
        OsOperator::Insertion | OsOperator::Swapping => {
            if len < 2 {
                // Degenerate strings have no two distinct positions.
                cell.os.clone()
            } else {
                let k1 = rng.random_range(0..len);
                let mut k2 = rng.random_range(0..len - 1);
                if k2 >= k1 {
                    k2 += 1;
                }
                match op {
                    OsOperator::Insertion => insertion(&cell.os, k1, k2),
                    _ => swapping(&cell.os, k1, k2),
                }
            }
        }
        OsOperator::PathRelinking => {
            let mut guide = rng.random_range(0..population.len() - 1);
            if guide >= cell_index {
                guide += 1;
            }
            path_relinking(&cell.os, &population[guide].os, rng)
        }
    };
    (os, op)
}

/// Generates the `l` tagged neighbors of `population[cell_index]`.
pub fn sample_neighborhood<R: Rng + ?Sized>(
    inst: &Instance,
    population: &[Solution],
    cell_index: usize,
    cfg: &GlnsaConfig,
    rng: &mut R,
) -> NeighborhoodSample {
    assert!(!population.is_empty() && cell_index < population.len());
    let cell = &population[cell_index];
    let mut neighbors = Vec::with_capacity(cfg.l);
    let mut tags = Vec::with_capacity(cfg.l);
    for _ in 0..cfg.l {
        let (os, os_op) = os_variant(cell, population, cell_index, cfg, rng);
        let mutated = rng.random_bool(cfg.alpha_m);
        let ms = if mutated {
            mutate_machines(inst, &cell.ms, rng)
        } else {
            cell.ms.clone()
        };
        neighbors.push(Solution { os, ms });
        tags.push(OperatorTag { os_op, mutated });
    }
    NeighborhoodSample { neighbors, tags }
}

/// Generates `l` neighbors of the cell and returns the one with the lowest
/// decoded makespan, ties going to the earliest generated.
pub fn explore_neighborhood<R: Rng + ?Sized>(
    inst: &Instance,
    population: &[Solution],
    cell_index: usize,
    cfg: &GlnsaConfig,
    rng: &mut R,
) -> Solution {
    let sample = sample_neighborhood(inst, population, cell_index, cfg, rng);
    let mut decoder = Decoder::new();
    let mut best = 0;
    let mut best_makespan = u32::MAX;
    for (idx, neighbor) in sample.neighbors.iter().enumerate() {
        let makespan = decoder.makespan(inst, neighbor);
        if makespan < best_makespan {
            best_makespan = makespan;
            best = idx;
        }
    }
    sample.neighbors.into_iter().nth(best).expect("l >= 1 neighbors")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_instance;
    use crate::schedule::decode_active;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn insertion_matches_both_directions() {
        // 1-based positions 4 -> 2 and 1 -> 4 from the operator definition.
        assert_eq!(insertion(&[10, 11, 12, 13], 3, 1), vec![10, 13, 11, 12]);
        assert_eq!(insertion(&[10, 11, 12, 13], 0, 3), vec![11, 12, 13, 10]);
    }

    #[test]
    fn swapping_is_an_involution() {
        let os = vec![10, 11, 12, 13];
        let once = swapping(&os, 0, 2);
        assert_eq!(once, vec![12, 11, 10, 13]);
        assert_eq!(swapping(&once, 0, 2), os);
    }

    #[test]
    #[should_panic]
    fn equal_positions_violate_contract() {
        insertion(&[1, 2, 3], 1, 1);
    }

    #[test]
    fn path_relinking_single_intermediate() {
        let os = vec![1, 2, 1, 2];
        let guide = vec![2, 1, 2, 1];
        for seed in 0..8 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            assert_eq!(path_relinking(&os, &guide, &mut rng), vec![2, 1, 1, 2]);
        }
    }

    #[test]
    fn path_relinking_identical_endpoints() {
        let os = vec![3, 1, 2];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(path_relinking(&os, &os.clone(), &mut rng), os);
    }

    #[test]
    fn path_relinking_adjacent_endpoints() {
        // One swap apart: the route has no strict intermediate.
        let os = vec![1, 2, 2, 1];
        let guide = vec![2, 1, 2, 1];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(path_relinking(&os, &guide, &mut rng), os);
    }

    #[test]
    fn mutation_leaves_single_machine_instances_alone() {
        let inst = parse_instance("2 2\n2 1 1 4 1 2 1\n1 1 2 2\n", "d1").unwrap();
        let ms = vec![0, 1, 1];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(mutate_machines(&inst, &ms, &mut rng), ms);
    }

    #[test]
    fn mutation_changes_exactly_half_when_fully_flexible() {
        let inst = parse_instance(
            "2 2\n2 2 1 3 2 4 2 1 5 2 6\n2 2 1 2 2 3 2 1 4 2 5\n",
            "flex",
        )
        .unwrap();
        let ms = vec![0, 0, 0, 0];
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (out, chosen) = mutate_machines_traced(&inst, &ms, &mut rng);
            assert_eq!(chosen.len(), 2);
            let changed = out.iter().zip(&ms).filter(|(a, b)| a != b).count();
            assert_eq!(changed, 2);
            assert!(out.iter().enumerate().all(|(op, &k)| inst.is_eligible(op, k)));
        }
    }

    #[test]
    fn explore_on_d1_always_returns_five() {
        let inst = parse_instance("2 2\n2 1 1 4 1 2 1\n1 1 2 2\n", "d1").unwrap();
        let cfg = GlnsaConfig::default();
        let population = vec![
            Solution { os: vec![0, 0, 1], ms: vec![0, 1, 1] },
            Solution { os: vec![1, 0, 0], ms: vec![0, 1, 1] },
        ];
        for seed in 0..32 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let best = explore_neighborhood(&inst, &population, 0, &cfg, &mut rng);
            assert_eq!(decode_active(&inst, &best).makespan, 5);
        }
    }

    #[test]
    fn swap_only_config_produces_transpositions() {
        let inst = parse_instance("2 2\n2 1 1 4 1 2 1\n1 1 2 2\n", "d1").unwrap();
        let cfg = GlnsaConfig {
            alpha_i: 0.0,
            alpha_s: 1.0,
            alpha_p: 0.0,
            alpha_m: 0.0,
            ..GlnsaConfig::default()
        };
        let population = vec![
            Solution { os: vec![0, 0, 1], ms: vec![0, 1, 1] },
            Solution { os: vec![1, 0, 0], ms: vec![0, 1, 1] },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sample = sample_neighborhood(&inst, &population, 0, &cfg, &mut rng);
        for (neighbor, tag) in sample.neighbors.iter().zip(&sample.tags) {
            assert_eq!(tag.os_op, OsOperator::Swapping);
            assert!(!tag.mutated);
            assert_eq!(neighbor.ms, population[0].ms);
            let diff = neighbor
                .os
                .iter()
                .zip(&population[0].os)
                .filter(|(a, b)| a != b)
                .count();
            // A transposition differs in 0 or 2 places (0 when equal jobs swap).
            assert!(diff == 0 || diff == 2);
        }
    }

    #[test]
    fn explored_cell_equals_sample_minimum() {
        let inst = parse_instance(
            "2 2\n2 2 1 4 2 5 1 2 1\n1 2 1 2 2 3\n",
            "mix",
        )
        .unwrap();
        let cfg = GlnsaConfig { l: 4, ..GlnsaConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let population = vec![
            crate::schedule::random_solution(&inst, &mut rng),
            crate::schedule::random_solution(&inst, &mut rng),
            crate::schedule::random_solution(&inst, &mut rng),
        ];
        for seed in 0..20 {
            let sample = sample_neighborhood(
                &inst, &population, 1, &cfg, &mut ChaCha8Rng::seed_from_u64(seed),
            );
            let best = explore_neighborhood(
                &inst, &population, 1, &cfg, &mut ChaCha8Rng::seed_from_u64(seed),
            );
            let sample_min = sample
                .neighbors
                .iter()
                .map(|n| decode_active(&inst, n).makespan)
                .min()
                .unwrap();
            assert_eq!(decode_active(&inst, &best).makespan, sample_min);
        }
    }

    #[test]
    fn single_op_instance_neighbors_stay_valid() {
        let inst = parse_instance("1 2\n1 2 1 5 2 2\n", "one").unwrap();
        let cfg = GlnsaConfig { alpha_m: 1.0, ..GlnsaConfig::default() };
        let population = vec![
            Solution { os: vec![0], ms: vec![0] },
            Solution { os: vec![0], ms: vec![1] },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sample = sample_neighborhood(&inst, &population, 0, &cfg, &mut rng);
        for neighbor in &sample.neighbors {
            assert_eq!(neighbor.os, vec![0]);
            assert!(neighbor.is_valid_for(&inst));
        }
    }
}
