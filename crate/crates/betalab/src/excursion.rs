//! Samplers for step-weight-conditioned excursions (nonnegative lattice
//! paths returning to zero) and the path statistics used by the
//! homogeneity, marginal-law, area, and tail experiments.
//!
//! Two exact samplers target the same law P[path] ∝ Π p(step) over
//! excursions. [`sample_excursion`] draws i.i.d. step sequences, conditions
//! on total sum −1 by rejection, and applies the cycle-lemma rotation; its
//! cost grows like σ√(2πM) rejections per path. [`BridgeSampler`]
//! precomputes the backward dynamic-programming table of suffix weights and
//! then draws paths sequentially in O(M) per path, the practical choice for
//! long paths and large batches. The table also yields exact expectations
//! ([`BridgeSampler::exact_stats`]) and exact lattice marginals, which the
//! tests use as oracles for both samplers.

use rand::Rng;

use crate::error::StochasticsError;
use crate::mc::{stream_rng, McEstimate, RunningStats};
use crate::stepdist::StepDistribution;
use crate::walks::{for_each_excursion, LukasiewiczWalk};

/// Summary statistics of one excursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathStats {
    /// Sum of the heights h₀..h_M (discrete area under the path).
    pub area: i64,
    /// Maximal height.
    pub max: i64,
    /// Height after ⌊M/2⌋ steps.
    pub midpoint: i64,
    /// Number of −1 steps.
    pub downs: u32,
}

impl PathStats {
    /// Area of the diffusively rescaled path, area/(σ·M^{3/2}): an
    /// estimator of the limiting excursion area ∫₀¹𝔈.
    pub fn rescaled_area(&self, sigma: f64, m: usize) -> f64 {
        self.area as f64 / (sigma * (m as f64).powf(1.5))
    }

    /// Midpoint of the diffusively rescaled path, h_{⌊M/2⌋}/(σ·√M).
    pub fn rescaled_midpoint(&self, sigma: f64, m: usize) -> f64 {
        self.midpoint as f64 / (sigma * (m as f64).sqrt())
    }
}

/// Statistics of an already-materialized walk.
pub fn walk_stats(walk: &LukasiewiczWalk) -> PathStats {
    let heights = walk.heights();
    let area: i64 = heights.iter().sum();
    let max: i64 = heights.iter().copied().max().unwrap_or(0);
    let midpoint = heights[walk.len() as usize / 2];
    let downs = walk.steps().iter().filter(|&&x| x == -1).count() as u32;
    PathStats {
        area,
        max,
        midpoint,
        downs,
    }
}

/// Exact excursion sampler via the cycle lemma: draw M+1 i.i.d. steps,
/// reject until they sum to −1, rotate so the path first hits −1 at its
/// final step, and drop that step. Expected rejection count ≈ σ√(2πM).
pub fn sample_excursion<R: Rng + ?Sized>(
    dist: &StepDistribution,
    m: usize,
    rng: &mut R,
) -> LukasiewiczWalk {
    assert!(m >= 1);
    let mut steps: Vec<i64> = Vec::with_capacity(m + 1);
    loop {
        steps.clear();
        let mut sum = 0i64;
        for _ in 0..=m {
            let x = dist.sample(rng);
            steps.push(x);
            sum += x;
        }
        if sum == -1 {
            break;
        }
    }
    // The unique admissible rotation starts immediately after the first
    // prefix-sum minimum; it first hits −1 at its final step, which must
    // therefore be a −1 step from height 0 and is dropped.
    let mut prefix = 0i64;
    let mut best = i64::MAX;
    let mut cut = 0usize;
    for (i, &x) in steps.iter().enumerate() {
        prefix += x;
        if prefix < best {
            best = prefix;
            cut = i + 1;
        }
    }
    let n = m + 1;
    let rotated: Vec<i32> = (0..m).map(|k| steps[(cut + k) % n] as i32).collect();
    LukasiewiczWalk::new(rotated).expect("cycle-lemma rotation yields an excursion")
}

/// Fraction of −1 steps among step indices in ⟦t1·M, t2·M⟧ (1-based).
pub fn downstep_fraction(walk: &LukasiewiczWalk, t1: f64, t2: f64) -> f64 {
    assert!(0.0 < t1 && t1 < t2 && t2 < 1.0);
    let m = walk.len() as f64;
    let lo = ((t1 * m).ceil() as usize).max(1);
    let hi = ((t2 * m).floor() as usize).min(walk.len() as usize);
    assert!(lo <= hi, "window contains no steps");
    let downs = walk.steps()[lo - 1..hi].iter().filter(|&&x| x == -1).count();
    downs as f64 / (hi - lo + 1) as f64
}

/// Monte Carlo estimate of the probability that the sign-reversed free
/// walk (i.i.d. steps −X) stays ≥ 0 for `l` steps. Scaled by √l this
/// approaches σ/(P₋₁√(2π)).
pub fn free_survival_mc(
    dist: &StepDistribution,
    l: usize,
    n_paths: usize,
    seed: u64,
) -> McEstimate {
    let mut stats = RunningStats::new();
    for path in 0..n_paths {
        let mut rng = stream_rng(seed, path as u64);
        let mut s = 0i64;
        let mut survived = true;
        for _ in 0..l {
            s += dist.sample(&mut rng);
            if s > 0 {
                survived = false;
                break;
            }
        }
        stats.push(if survived { 1.0 } else { 0.0 });
    }
    stats.estimate(seed)
}

/// Table of (h, empirical P[max > h·√M]) over `n_samples` bridge-sampled
/// excursions; the tail-shape test fits log P against h² on the entries
/// with nonextreme probabilities.
pub fn max_tail_curve(
    dist: &StepDistribution,
    m: usize,
    n_samples: usize,
    hs: &[f64],
    seed: u64,
) -> Result<Vec<(f64, f64)>, StochasticsError> {
    let sampler = BridgeSampler::new(dist, m)?;
    let scale = (m as f64).sqrt();
    let mut counts = vec![0usize; hs.len()];
    for path in 0..n_samples {
        let mut rng = stream_rng(seed, path as u64);
        let stats = sampler.sample_stats(&mut rng);
        for (c, &h) in counts.iter_mut().zip(hs) {
            if stats.max as f64 > h * scale {
                *c += 1;
            }
        }
    }
    Ok(hs
        .iter()
        .zip(counts)
        .map(|(&h, c)| (h, c as f64 / n_samples as f64))
        .collect())
}

/// Exact conditional law of length-`m` excursions under `dist` (requires
/// `m` small enough to enumerate, ≤ 14): entries are (steps, probability).
pub fn enumerate_excursion_distribution(
    dist: &StepDistribution,
    m: usize,
) -> Vec<(Vec<i32>, f64)> {
    let mut entries: Vec<(Vec<i32>, f64)> = Vec::new();
    let mut total = 0.0;
    for_each_excursion(m as u32, &mut |walk: &LukasiewiczWalk| {
        let p: f64 = walk
            .steps()
            .iter()
            .map(|&x| dist.probability(x as i64))
            .product();
        if p > 0.0 {
            total += p;
            entries.push((walk.steps().to_vec(), p));
        }
    })
    .expect("enumeration cap exceeded");
    for (_, p) in &mut entries {
        *p /= total;
    }
    entries
}

/// Exact expectations under the conditioned-excursion law, computed from
/// the bridge table without sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactBridgeStats {
    /// Total weight of all length-M excursions (the conditioning event's
    /// probability under the free walk).
    pub partition: f64,
    /// E[Σ h_t] over the conditioned law.
    pub mean_area: f64,
    /// E[#(−1 steps)] over the conditioned law.
    pub mean_downs: f64,
}

/// Sequential excursion sampler backed by the backward dynamic-programming
/// table B(r, y) = weight of r-step nonnegative walks from height y to 0.
///
/// Heights are capped at ⌈8σ√M⌉; paths exceeding the cap carry total
/// weight far below f64 resolution, so the truncation is exact in
/// practice. Memory is (M+1)·(cap+1) floats.
pub struct BridgeSampler {
    m: usize,
    y_cap: usize,
    support: Vec<(i64, f64)>,
    sigma: f64,
    p_down: f64,
    table: Vec<f64>,
}

impl std::fmt::Debug for BridgeSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BridgeSampler")
            .field("m", &self.m)
            .field("y_cap", &self.y_cap)
            .field("partition", &self.partition())
            .finish_non_exhaustive()
    }
}

impl BridgeSampler {
    pub fn new(dist: &StepDistribution, m: usize) -> Result<Self, StochasticsError> {
        assert!(m >= 1);
        let sigma = dist.variance().sqrt();
        let y_cap = ((8.0 * sigma * (m as f64).sqrt()).ceil() as usize)
            .max(dist.max_step() as usize + 1)
            .max(8);
        let support: Vec<(i64, f64)> = dist.support().collect();
        let cols = y_cap + 1;
        let mut table = vec![0.0f64; (m + 1) * cols];
        table[0] = 1.0;
        for r in 1..=m {
            let (prev, cur) = table.split_at_mut(r * cols);
            let prev_row = &prev[(r - 1) * cols..];
            for (y, slot) in cur[..cols].iter_mut().enumerate() {
                let mut acc = 0.0;
                for &(x, p) in &support {
                    let ny = y as i64 + x;
                    if (0..=y_cap as i64).contains(&ny) {
                        acc += p * prev_row[ny as usize];
                    }
                }
                *slot = acc;
            }
        }
        let sampler = BridgeSampler {
            m,
            y_cap,
            support,
            sigma,
            p_down: dist.p_down(),
            table,
        };
        if sampler.partition() <= 0.0 {
            return Err(StochasticsError::DegenerateBridge { m: m as u32 });
        }
        Ok(sampler)
    }

    /// Number of steps in each sampled path.
    pub fn path_len(&self) -> usize {
        self.m
    }

    /// Height cap of the dynamic-programming table.
    pub fn height_cap(&self) -> usize {
        self.y_cap
    }

    /// Standard deviation of the underlying step law.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Total weight of all admissible excursions.
    pub fn partition(&self) -> f64 {
        self.table[self.m * (self.y_cap + 1)]
    }

    fn row(&self, r: usize) -> &[f64] {
        let cols = self.y_cap + 1;
        &self.table[r * cols..(r + 1) * cols]
    }

    /// Draw the next step given `r` remaining steps at height `y`.
    fn draw_step<R: Rng + ?Sized>(&self, r: usize, y: i64, rng: &mut R) -> i64 {
        let suffix = self.row(r - 1);
        let total = self.row(r)[y as usize];
        let u: f64 = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut last_feasible = None;
        for &(x, p) in &self.support {
            let ny = y + x;
            if ny < 0 || ny > self.y_cap as i64 {
                continue;
            }
            let w = p * suffix[ny as usize];
            if w <= 0.0 {
                continue;
            }
            acc += w;
            last_feasible = Some(x);
            if u < acc {
                return x;
            }
        }
        // Rounding can leave u marginally above the accumulated total.
        last_feasible.expect("positive suffix weight guarantees a feasible step")
    }

    /// Sample a full excursion.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> LukasiewiczWalk {
        let mut steps = Vec::with_capacity(self.m);
        let mut y = 0i64;
        for t in 0..self.m {
            let x = self.draw_step(self.m - t, y, rng);
            y += x;
            steps.push(x as i32);
        }
        LukasiewiczWalk::new(steps).expect("bridge table only permits valid excursions")
    }

    /// Sample a path and return only its summary statistics.
    pub fn sample_stats<R: Rng + ?Sized>(&self, rng: &mut R) -> PathStats {
        let mid = self.m / 2;
        let mut y = 0i64;
        let mut stats = PathStats {
            area: 0,
            max: 0,
            midpoint: 0,
            downs: 0,
        };
        for t in 0..self.m {
            let x = self.draw_step(self.m - t, y, rng);
            y += x;
            stats.area += y;
            stats.max = stats.max.max(y);
            if x == -1 {
                stats.downs += 1;
            }
            if t + 1 == mid {
                stats.midpoint = y;
            }
        }
        stats
    }

    /// Sample only the height after `t` steps (the prefix marginal); the
    /// unsampled suffix is already integrated out by the table.
    pub fn sample_height_at<R: Rng + ?Sized>(&self, t: usize, rng: &mut R) -> i64 {
        assert!(t <= self.m);
        let mut y = 0i64;
        for s in 0..t {
            y += self.draw_step(self.m - s, y, rng);
        }
        y
    }

    /// Run the forward recursion, visiting the prefix-weight row at every
    /// time 0..=M.
    // The height index feeds both the row lookup and the step arithmetic,
    // so a plain counted loop reads better than enumerate here.
    #[allow(clippy::needless_range_loop)]
    fn forward_rows(&self, mut visit: impl FnMut(usize, &[f64])) {
        let cols = self.y_cap + 1;
        let mut w = vec![0.0f64; cols];
        let mut next = vec![0.0f64; cols];
        w[0] = 1.0;
        for t in 0..=self.m {
            visit(t, &w);
            if t == self.m {
                break;
            }
            next.iter_mut().for_each(|v| *v = 0.0);
            for y in 0..=self.y_cap {
                let wy = w[y];
                if wy == 0.0 {
                    continue;
                }
                for &(x, p) in &self.support {
                    let ny = y as i64 + x;
                    if (0..=self.y_cap as i64).contains(&ny) {
                        next[ny as usize] += wy * p;
                    }
                }
            }
            std::mem::swap(&mut w, &mut next);
        }
    }

    /// Exact mean area and down-step count of the conditioned law.
    pub fn exact_stats(&self) -> ExactBridgeStats {
        let z = self.partition();
        let mut area = 0.0;
        let mut downs = 0.0;
        self.forward_rows(|t, w| {
            let back = self.row(self.m - t);
            for y in 1..=self.y_cap {
                area += y as f64 * w[y] * back[y];
            }
            if t < self.m {
                let back1 = self.row(self.m - t - 1);
                for y in 1..=self.y_cap {
                    downs += w[y] * self.p_down * back1[y - 1];
                }
            }
        });
        ExactBridgeStats {
            partition: z,
            mean_area: area / z,
            mean_downs: downs / z,
        }
    }

    /// Exact expected fraction of −1 steps among step indices lo..=hi
    /// (1-based).
    pub fn exact_downstep_window(&self, lo: usize, hi: usize) -> f64 {
        assert!(1 <= lo && lo <= hi && hi <= self.m);
        let z = self.partition();
        let mut downs = 0.0;
        self.forward_rows(|t, w| {
            if t + 1 < lo || t + 1 > hi {
                return;
            }
            let back1 = self.row(self.m - t - 1);
            for y in 1..=self.y_cap {
                downs += w[y] * self.p_down * back1[y - 1];
            }
        });
        downs / (z * (hi - lo + 1) as f64)
    }

    /// Exact lattice marginal P[h_t = y], indexed by y.
    pub fn height_marginal(&self, t: usize) -> Vec<f64> {
        assert!(t <= self.m);
        let z = self.partition();
        let mut out = vec![0.0; self.y_cap + 1];
        self.forward_rows(|s, w| {
            if s == t {
                let back = self.row(self.m - t);
                for (o, (&wy, &by)) in out.iter_mut().zip(w.iter().zip(back)) {
                    *o = wy * by / z;
                }
            }
        });
        out
    }

    /// Exact marginal of the midpoint height h_{⌊M/2⌋}.
    pub fn midpoint_marginal(&self) -> Vec<f64> {
        self.height_marginal(self.m / 2)
    }
}
