//! Path sampling for one level, parallel over fixed chunks of path indices.

use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::stats::LevelStats;
use crate::noise::NoiseStream;
use crate::payoffs::PayoffSpec;
use crate::scalar::Scalar;
use crate::schemes::{check_refinement, coupled_terminal, level_terminal, SchemeKind};
use crate::sde::SdeModel;

/// Paths per reduction chunk. Chunk boundaries sit at multiples of this
/// value in absolute path index, and chunk results are merged in index
/// order, so sums do not depend on the number of worker threads.
pub const CHUNK_SIZE: u64 = 4096;

pub(crate) fn chunk_ranges(paths: Range<u64>) -> Vec<Range<u64>> {
    let mut out = Vec::new();
    let mut start = paths.start;
    while start < paths.end {
        let boundary = (start / CHUNK_SIZE + 1) * CHUNK_SIZE;
        let end = boundary.min(paths.end);
        out.push(start..end);
        start = end;
    }
    out
}

/// Runs `per_chunk` over the chunks of `paths` in parallel and folds the
/// results in chunk order.
pub(crate) fn reduce_chunks<A, F, M>(paths: Range<u64>, init: A, per_chunk: F, merge: M) -> Result<A>
where
    A: Send,
    F: Fn(Range<u64>) -> Result<A> + Sync + Send,
    M: Fn(&mut A, A) -> Result<()>,
{
    let parts: Vec<Result<A>> = chunk_ranges(paths).into_par_iter().map(per_chunk).collect();
    let mut acc = init;
    for part in parts {
        merge(&mut acc, part?)?;
    }
    Ok(acc)
}

fn tag_overflow(err: Error, level: u32, path: u64) -> Error {
    match err {
        Error::NonFinite { step } => Error::PathOverflow { level, path, step },
        other => other,
    }
}

/// Everything a level needs besides the level index and path range.
pub struct LevelSampler<'a, T, S: ?Sized> {
    pub model: &'a S,
    pub payoff: &'a PayoffSpec<T>,
    pub scheme: SchemeKind,
    pub refinement_factor: u32,
    pub seed: u64,
}

impl<'a, T: Scalar, S: SdeModel<T> + ?Sized> LevelSampler<'a, T, S> {
    pub fn new(
        model: &'a S,
        payoff: &'a PayoffSpec<T>,
        scheme: SchemeKind,
        refinement_factor: u32,
        seed: u64,
    ) -> Result<Self> {
        check_refinement(refinement_factor)?;
        scheme.check_admissible(model)?;
        Ok(Self { model, payoff, scheme, refinement_factor, seed })
    }

    fn stream(&self, level: u32, path: u64) -> NoiseStream {
        NoiseStream::new(self.seed, level, path)
    }

    /// MLMC level samples: `P_0` at level 0, `P_l − P_{l−1}` above.
    pub fn sample(&self, level: u32, paths: Range<u64>) -> Result<LevelStats<T>> {
        reduce_chunks(
            paths,
            LevelStats::empty(level),
            |chunk| {
                let mut stats = LevelStats::empty(level);
                for path in chunk {
                    let stream = self.stream(level, path);
                    if level == 0 {
                        let x = level_terminal(self.model, self.scheme, 0, self.refinement_factor, &stream)
                            .map_err(|e| tag_overflow(e, level, path))?;
                        stats.push(self.payoff.evaluate(x)?, 1);
                    } else {
                        let pair =
                            coupled_terminal(self.model, self.scheme, level, self.refinement_factor, &stream)
                                .map_err(|e| tag_overflow(e, level, path))?;
                        let y = self.payoff.evaluate(pair.fine)? - self.payoff.evaluate(pair.coarse)?;
                        stats.push(y, pair.cost);
                    }
                }
                Ok(stats)
            },
            |acc, part| acc.merge(&part),
        )
    }

    /// Plain payoffs `P_l` at a single resolution, plus the coupled
    /// differences `P_l − P_{l−1}` on the same paths when `level >= 1`.
    /// The cost charged to the first accumulator covers both integrations.
    pub fn sample_single(
        &self,
        level: u32,
        paths: Range<u64>,
    ) -> Result<(LevelStats<T>, LevelStats<T>)> {
        reduce_chunks(
            paths,
            (LevelStats::empty(level), LevelStats::empty(level)),
            |chunk| {
                let mut payoffs = LevelStats::empty(level);
                let mut diffs = LevelStats::empty(level);
                for path in chunk {
                    let stream = self.stream(level, path);
                    if level == 0 {
                        let x = level_terminal(self.model, self.scheme, 0, self.refinement_factor, &stream)
                            .map_err(|e| tag_overflow(e, level, path))?;
                        payoffs.push(self.payoff.evaluate(x)?, 1);
                    } else {
                        let pair =
                            coupled_terminal(self.model, self.scheme, level, self.refinement_factor, &stream)
                                .map_err(|e| tag_overflow(e, level, path))?;
                        let fine = self.payoff.evaluate(pair.fine)?;
                        payoffs.push(fine, pair.cost);
                        diffs.push(fine - self.payoff.evaluate(pair.coarse)?, 0);
                    }
                }
                Ok((payoffs, diffs))
            },
            |acc, part| {
                acc.0.merge(&part.0)?;
                acc.1.merge(&part.1)
            },
        )
    }
}

/// Level statistics over paths `0..n` of `level`, keyed by `(seed, level, path)`.
#[allow(clippy::too_many_arguments)]
pub fn level_estimator<T: Scalar, S: SdeModel<T> + ?Sized>(
    model: &S,
    payoff: &PayoffSpec<T>,
    scheme: SchemeKind,
    level: u32,
    n: u64,
    refinement_factor: u32,
    seed: u64,
) -> Result<LevelStats<T>> {
    if n == 0 {
        return Err(Error::invalid("n", "need at least one sample"));
    }
    LevelSampler::new(model, payoff, scheme, refinement_factor, seed)?.sample(level, 0..n)
}
