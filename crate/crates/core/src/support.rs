//! Support detection: locating argmax_t |(A^T r)_t| without enumerating the
//! index space. The residual tables make the objective a sum of per-pair
//! terms, so on a nearest-neighbor chain the maximizer follows from transfer
//! -matrix dynamic programming in O(M N^2); general pair graphs fall back to
//! simulated annealing, and an exhaustive scan serves as the oracle.

use crate::error::{Error, Result};
use crate::measurement::ResidualTables;
use crate::shape::OccupationPattern;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Winner of a support-detection query. `value` is the signed adjoint entry
/// at `index`; `sign` records which of the +/- branches produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArgmaxResult {
    pub index: u64,
    pub value: f64,
    pub sign: i8,
}

/// Exact maximizer of the signed chain objective
/// F(n) = sum_m T_(m,m+1)[n_m, n_(m+1)], via suffix dynamic programming with
/// recorded choices. Ties resolve to the lowest flat index. O(M N^2) time,
/// O(M N) memory.
pub fn chain_argmax(tables: &ResidualTables) -> Result<(u64, f64)> {
    let shape = tables.shape();
    if !shape.is_chain() {
        return Err(Error::NotAChain);
    }
    let modes = shape.modes();
    let levels = shape.levels();
    if modes == 1 {
        return Ok((0, 0.0));
    }

    // Chain pairs may be listed in any order; map link position to table.
    let mut table_of = vec![0usize; modes - 1];
    for (p, pair) in shape.pairs().iter().enumerate() {
        table_of[pair.first] = p;
    }

    // suffix[l][u]: best score over modes l.. with digit u at mode l.
    // choice[l][u]: the smallest digit at mode l+1 attaining it.
    let mut suffix = vec![vec![0.0f64; levels]; modes];
    let mut choice = vec![vec![0usize; levels]; modes - 1];
    for l in (0..modes - 1).rev() {
        let table = tables.table(table_of[l]);
        for u in 0..levels {
            let mut best = f64::NEG_INFINITY;
            let mut best_v = 0;
            for v in 0..levels {
                let cand = table[u * levels + v] + suffix[l + 1][v];
                if cand > best {
                    best = cand;
                    best_v = v;
                }
            }
            suffix[l][u] = best;
            choice[l][u] = best_v;
        }
    }

    let mut first = 0;
    for u in 1..levels {
        if suffix[0][u] > suffix[0][first] {
            first = u;
        }
    }
    let mut digits = vec![0usize; modes];
    digits[0] = first;
    for l in 0..modes - 1 {
        digits[l + 1] = choice[l][digits[l]];
    }
    let value = suffix[0][first];
    let flat = shape.encode(&OccupationPattern::new(digits))?;
    Ok((flat, value))
}

/// Maximizer of |(A^T r)_t| on a chain: runs the signed DP on the tables and
/// on their negation, keeps the larger branch (positive branch on ties), and
/// reports the signed adjoint value at the winner.
pub fn abs_argmax(tables: &ResidualTables) -> Result<ArgmaxResult> {
    let (pos_index, pos_value) = chain_argmax(tables)?;
    let (neg_index, neg_value) = chain_argmax(&tables.negated())?;
    let (index, sign) = if pos_value >= neg_value { (pos_index, 1) } else { (neg_index, -1) };
    let value = tables.adjoint_entry(index)?;
    Ok(ArgmaxResult { index, value, sign })
}

/// Cooling plan for [`anneal_argmax`]: a geometric temperature ladder from an
/// initial temperature (largest absolute table entry unless overridden) down
/// to `cooling_ratio` times it, over `sweeps_per_mode * modes` sweeps of one
/// proposed move per mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub sweeps_per_mode: usize,
    pub cooling_ratio: f64,
    pub initial_temperature: Option<f64>,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self { sweeps_per_mode: 100, cooling_ratio: 1e-3, initial_temperature: None }
    }
}

impl AnnealSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.sweeps_per_mode == 0 {
            return Err(Error::InvalidSchedule("sweep count must be positive".into()));
        }
        if !(self.cooling_ratio > 0.0 && self.cooling_ratio <= 1.0) {
            return Err(Error::InvalidSchedule(
                "cooling ratio must lie in (0, 1] for a monotone ladder".into(),
            ));
        }
        if let Some(t0) = self.initial_temperature {
            if !(t0 > 0.0) || !t0.is_finite() {
                return Err(Error::InvalidSchedule(
                    "initial temperature must be positive and finite".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Best configuration found by single-move Metropolis annealing of the same
/// per-pair objective, for arbitrary pair graphs. Heuristic: no optimality
/// guarantee. Runs the +/- branches like [`abs_argmax`]; deterministic for a
/// fixed seed.
pub fn anneal_argmax(
    tables: &ResidualTables,
    schedule: &AnnealSchedule,
    seed: u64,
) -> Result<ArgmaxResult> {
    schedule.validate()?;
    let negated = tables.negated();
    let (pos_index, pos_value) = anneal_branch(tables, schedule, crate::derive_seed(seed, 0));
    let (neg_index, neg_value) = anneal_branch(&negated, schedule, crate::derive_seed(seed, 1));
    let (index, sign) = if pos_value >= neg_value { (pos_index, 1) } else { (neg_index, -1) };
    let value = tables.adjoint_entry(index)?;
    Ok(ArgmaxResult { index, value, sign })
}

fn anneal_branch(tables: &ResidualTables, schedule: &AnnealSchedule, seed: u64) -> (u64, f64) {
    let shape = tables.shape();
    let modes = shape.modes();
    let levels = shape.levels();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Pairs touching each mode, with the mode's role in the pair.
    let mut adjacency: Vec<Vec<(usize, bool)>> = vec![Vec::new(); modes];
    for (p, pair) in shape.pairs().iter().enumerate() {
        adjacency[pair.first].push((p, true));
        adjacency[pair.second].push((p, false));
    }

    let score_of = |config: &[usize]| -> f64 {
        shape
            .pairs()
            .iter()
            .enumerate()
            .map(|(p, pair)| tables.entry(p, config[pair.first], config[pair.second]))
            .sum()
    };

    let mut config: Vec<usize> = (0..modes).map(|_| rng.gen_range(0..levels)).collect();
    let mut current = score_of(&config);
    let mut best_config = config.clone();
    let mut best = current;

    let t0 = schedule.initial_temperature.unwrap_or_else(|| tables.max_abs_entry());
    let total_sweeps = schedule.sweeps_per_mode * modes;
    let factor = if total_sweeps > 1 {
        schedule.cooling_ratio.powf(1.0 / (total_sweeps as f64 - 1.0))
    } else {
        1.0
    };
    let mut temperature = t0;

    for _ in 0..total_sweeps {
        for _ in 0..modes {
            let mode = rng.gen_range(0..modes);
            let mut proposal = rng.gen_range(0..levels - 1);
            if proposal >= config[mode] {
                proposal += 1;
            }
            let mut delta = 0.0;
            for &(p, is_first) in &adjacency[mode] {
                let pair = shape.pairs()[p];
                let (old_u, old_v) = (config[pair.first], config[pair.second]);
                let (new_u, new_v) =
                    if is_first { (proposal, old_v) } else { (old_u, proposal) };
                delta += tables.entry(p, new_u, new_v) - tables.entry(p, old_u, old_v);
            }
            let accept = delta >= 0.0 || rng.gen::<f64>() < (delta / temperature).exp();
            if accept {
                config[mode] = proposal;
                current += delta;
                if current > best {
                    best = current;
                    best_config = config.clone();
                }
            }
        }
        temperature *= factor;
    }

    // Re-score the winner from scratch; the incremental deltas drift.
    let best = score_of(&best_config);
    let flat = shape
        .encode(&OccupationPattern::new(best_config))
        .expect("annealer configurations stay in range");
    (flat, best)
}

/// Exhaustive scan of every adjoint entry; the exact oracle for the fast
/// detectors. Refused above the dimension cap. Ties break to the lowest
/// flat index.
pub fn brute_argmax(tables: &ResidualTables) -> Result<ArgmaxResult> {
    let shape = tables.shape();
    let dimension = shape.dimension();
    let cap = crate::dimension_cap();
    if dimension > cap {
        return Err(Error::DimensionCap { dimension, cap });
    }
    let mut best = ArgmaxResult { index: 0, value: tables.adjoint_entry(0)?, sign: 1 };
    for t in 1..dimension as u64 {
        let value = tables.adjoint_entry(t)?;
        if value.abs() > best.value.abs() {
            best = ArgmaxResult { index: t, value, sign: 1 };
        }
    }
    best.sign = if best.value >= 0.0 { 1 } else { -1 };
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::ResidualTables;
    use crate::shape::{ModePair, ProblemShape};

    fn random_tables(shape: &ProblemShape, rng: &mut ChaCha8Rng) -> ResidualTables {
        let values: Vec<f64> =
            (0..shape.measurement_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        ResidualTables::from_slice(shape, &values).unwrap()
    }

    /// Signed (no absolute value) exhaustive maximizer, lowest index on ties.
    fn brute_signed(tables: &ResidualTables) -> (u64, f64) {
        let d = tables.shape().dimension() as u64;
        let mut best = (0u64, tables.adjoint_entry(0).unwrap());
        for t in 1..d {
            let v = tables.adjoint_entry(t).unwrap();
            if v > best.1 {
                best = (t, v);
            }
        }
        best
    }

    #[test]
    fn chain_argmax_two_mode_table() {
        let shape = ProblemShape::chain(2, 2).unwrap();
        let tables = ResidualTables::from_slice(&shape, &[0.1, 0.5, 0.2, 0.3]).unwrap();
        let (index, value) = chain_argmax(&tables).unwrap();
        assert_eq!(index, 1); // pattern (0, 1)
        assert_eq!(value, 0.5);
    }

    #[test]
    fn chain_argmax_zero_tables_ties_to_zero() {
        let shape = ProblemShape::chain(5, 3).unwrap();
        let tables =
            ResidualTables::from_slice(&shape, &vec![0.0; shape.measurement_count()]).unwrap();
        let (index, value) = chain_argmax(&tables).unwrap();
        assert_eq!(index, 0);
        assert_eq!(value, 0.0);
    }

    #[test]
    fn chain_argmax_requires_chain() {
        let shape =
            ProblemShape::new(3, 2, vec![ModePair::new(0, 2).unwrap()]).unwrap();
        let tables =
            ResidualTables::from_slice(&shape, &vec![0.0; shape.measurement_count()]).unwrap();
        assert!(matches!(chain_argmax(&tables), Err(Error::NotAChain)));
    }

    #[test]
    fn chain_argmax_matches_brute_on_random_instances() {
        let shape = ProblemShape::chain(6, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..1000 {
            let tables = random_tables(&shape, &mut rng);
            let (index, value) = chain_argmax(&tables).unwrap();
            let (oracle_index, oracle_value) = brute_signed(&tables);
            assert_eq!(index, oracle_index);
            assert!((value - oracle_value).abs() < 1e-12);
        }
    }

    #[test]
    fn abs_argmax_prefers_strong_negative_entry() {
        // One strongly negative entry against mildly positive tables.
        let shape = ProblemShape::chain(3, 2).unwrap();
        let mut values = vec![0.05; shape.measurement_count()];
        values[0] = -0.9; // pair (0,1), bin (0,0)
        values[4] = -0.9; // pair (1,2), bin (0,0)
        let tables = ResidualTables::from_slice(&shape, &values).unwrap();
        let result = abs_argmax(&tables).unwrap();
        assert_eq!(result.sign, -1);
        assert_eq!(result.index, 0);
        assert!((result.value - (-1.8)).abs() < 1e-12);
        let oracle = brute_argmax(&tables).unwrap();
        assert_eq!(result.index, oracle.index);
        assert_eq!(result.value, oracle.value);
    }

    #[test]
    fn abs_argmax_equals_chain_argmax_for_nonnegative_tables() {
        let shape = ProblemShape::chain(4, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for _ in 0..100 {
            let values: Vec<f64> =
                (0..shape.measurement_count()).map(|_| rng.gen_range(0.0..1.0)).collect();
            let tables = ResidualTables::from_slice(&shape, &values).unwrap();
            let (index, _) = chain_argmax(&tables).unwrap();
            let result = abs_argmax(&tables).unwrap();
            assert_eq!(result.index, index);
            assert_eq!(result.sign, 1);
        }
    }

    #[test]
    fn abs_argmax_matches_brute_exhaustively() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for modes in 2..=6 {
            for levels in 2..=4 {
                let shape = ProblemShape::chain(modes, levels).unwrap();
                for _ in 0..50 {
                    let tables = random_tables(&shape, &mut rng);
                    let fast = abs_argmax(&tables).unwrap();
                    let oracle = brute_argmax(&tables).unwrap();
                    assert_eq!(fast.index, oracle.index);
                    assert_eq!(fast.value, oracle.value);
                    assert!((fast.value.abs()
                        - tables.adjoint_entry(oracle.index).unwrap().abs())
                    .abs()
                        < 1e-12);
                }
            }
        }
    }

    #[test]
    fn shift_covariance_of_one_table() {
        // Adding a constant to every entry of one pair table shifts the
        // optimum value by that constant and keeps the argmax index.
        let shape = ProblemShape::chain(5, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let tables = random_tables(&shape, &mut rng);
            let (index, value) = chain_argmax(&tables).unwrap();
            let shift = 0.75;
            let mut shifted = tables.flatten().to_vec();
            for entry in shifted.iter_mut().take(9) {
                *entry += shift; // every entry of pair 0's table
            }
            let shifted_tables = ResidualTables::from_slice(&shape, &shifted).unwrap();
            let (shifted_index, shifted_value) = chain_argmax(&shifted_tables).unwrap();
            assert_eq!(shifted_index, index);
            assert!((shifted_value - (value + shift)).abs() < 1e-12);
        }
    }

    #[test]
    fn anneal_matches_dp_on_chain_instances() {
        let shape = ProblemShape::chain(6, 2).unwrap();
        let schedule = AnnealSchedule::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut hits = 0;
        for trial in 0..200u64 {
            let tables = random_tables(&shape, &mut rng);
            let exact = abs_argmax(&tables).unwrap();
            let found = anneal_argmax(&tables, &schedule, trial).unwrap();
            if found.index == exact.index {
                hits += 1;
            }
        }
        assert!(hits >= 190, "annealer matched DP on only {hits}/200 chain instances");
    }

    #[test]
    fn anneal_exact_on_single_pair_graph() {
        let shape =
            ProblemShape::new(4, 3, vec![ModePair::new(0, 3).unwrap()]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for trial in 0..20u64 {
            let tables = random_tables(&shape, &mut rng);
            let found = anneal_argmax(&tables, &AnnealSchedule::default(), trial).unwrap();
            let oracle = brute_argmax(&tables).unwrap();
            assert_eq!(found.value, oracle.value);
        }
    }

    #[test]
    fn anneal_zero_tables() {
        let shape = ProblemShape::chain(4, 2).unwrap();
        let tables =
            ResidualTables::from_slice(&shape, &vec![0.0; shape.measurement_count()]).unwrap();
        let result = anneal_argmax(&tables, &AnnealSchedule::default(), 9).unwrap();
        assert_eq!(result.value, 0.0);
    }

    #[test]
    fn anneal_is_deterministic_given_seed() {
        let shape = ProblemShape::chain(5, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let tables = random_tables(&shape, &mut rng);
        let a = anneal_argmax(&tables, &AnnealSchedule::default(), 42).unwrap();
        let b = anneal_argmax(&tables, &AnnealSchedule::default(), 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn anneal_rejects_bad_schedule() {
        let shape = ProblemShape::chain(3, 2).unwrap();
        let tables =
            ResidualTables::from_slice(&shape, &vec![0.0; shape.measurement_count()]).unwrap();
        let bad = AnnealSchedule { sweeps_per_mode: 0, ..Default::default() };
        assert!(matches!(
            anneal_argmax(&tables, &bad, 0),
            Err(Error::InvalidSchedule(_))
        ));
        let bad = AnnealSchedule { cooling_ratio: 1.5, ..Default::default() };
        assert!(anneal_argmax(&tables, &bad, 0).is_err());
    }

    #[test]
    fn brute_point_indicator() {
        let shape = ProblemShape::chain(4, 2).unwrap();
        let target = 11u64;
        let op = crate::measurement::MeasurementOperator::new(shape.clone());
        let y = op.forward(&crate::vectors::SparseVector::point_mass(target)).unwrap();
        let tables = ResidualTables::from_measurement(&shape, &y).unwrap();
        let result = brute_argmax(&tables).unwrap();
        assert_eq!(result.index, target);
        assert_eq!(result.value, shape.pairs().len() as f64);
    }

    #[test]
    fn brute_ties_break_to_lowest_index() {
        let shape = ProblemShape::chain(3, 2).unwrap();
        let tables =
            ResidualTables::from_slice(&shape, &vec![0.25; shape.measurement_count()]).unwrap();
        let result = brute_argmax(&tables).unwrap();
        assert_eq!(result.index, 0);
    }

    #[test]
    fn brute_refuses_above_cap() {
        let shape = ProblemShape::chain(24, 2).unwrap();
        let tables =
            ResidualTables::from_slice(&shape, &vec![0.0; shape.measurement_count()]).unwrap();
        assert!(matches!(brute_argmax(&tables), Err(Error::DimensionCap { .. })));
    }
}
