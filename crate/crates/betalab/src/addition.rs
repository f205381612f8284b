//! Dense matrix models for classical additions at β = 1 (real symmetric)
//! and β = 2 (complex Hermitian): √δ·H + Σᵢ αᵢ·Wᵢ with an invariant
//! Gaussian block H and independent Wishart blocks Wᵢ of aspect
//! Lᵢ = ⌈γᵢN⌉, in the scaling where the spectral edge sits at μ₊·N.
//!
//! Eigensolve: Householder reduction to tridiagonal form followed by the
//! implicit-shift QL core from the tridiagonal module; Hermitian matrices
//! go through the standard 2N×2N real symmetric embedding, whose spectrum
//! is the Hermitian spectrum doubled.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::ensemble::{Centering, EnsembleSpec};
use crate::error::StochasticsError;
use crate::exact::rational_to_f64;
use crate::tridiag::ql_implicit;

/// The two classical symmetry classes with a matrix realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicalBeta {
    /// β = 1: real symmetric matrices.
    Orthogonal,
    /// β = 2: complex Hermitian matrices.
    Unitary,
}

impl ClassicalBeta {
    pub fn beta(self) -> f64 {
        match self {
            ClassicalBeta::Orthogonal => 1.0,
            ClassicalBeta::Unitary => 2.0,
        }
    }

    pub fn from_beta(beta: f64) -> Option<Self> {
        if beta == 1.0 {
            Some(ClassicalBeta::Orthogonal)
        } else if beta == 2.0 {
            Some(ClassicalBeta::Unitary)
        } else {
            None
        }
    }
}

/// Dense real symmetric matrix in full row-major storage; only the lower
/// triangle is kept authoritative during reduction.
#[derive(Debug, Clone)]
pub struct DenseSym {
    n: usize,
    a: Vec<f64>,
}

const DENSE_CAP: usize = 1024;

impl DenseSym {
    pub fn zero(n: usize) -> Result<Self, StochasticsError> {
        if n == 0 || n > DENSE_CAP {
            return Err(StochasticsError::Dimension(format!(
                "dense solver handles 1 ≤ n ≤ {DENSE_CAP}, got {n}"
            )));
        }
        Ok(DenseSym {
            n,
            a: vec![0.0; n * n],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[self.idx(i, j)]
    }

    /// Add `v` to entries (i, j) and (j, i).
    pub fn add_sym(&mut self, i: usize, j: usize, v: f64) {
        let ij = self.idx(i, j);
        self.a[ij] += v;
        if i != j {
            let ji = self.idx(j, i);
            self.a[ji] += v;
        }
    }

    /// All eigenvalues, sorted descending.
    pub fn eigenvalues(mut self) -> Result<Vec<f64>, StochasticsError> {
        let (mut d, mut e) = self.tridiagonalize();
        // Shift the couplings into QL layout: e[i] couples i and i+1.
        e.rotate_left(1);
        *e.last_mut().expect("n ≥ 1") = 0.0;
        ql_implicit(&mut d, &mut e)?;
        d.sort_by(|a, b| b.partial_cmp(a).expect("eigenvalues are finite"));
        Ok(d)
    }

    /// Householder reduction; returns (diagonal, couplings) with the
    /// coupling between rows i−1 and i stored at index i.
    // Index loops mirror the textbook formulation; iterator adapters would
    // obscure the simultaneous row/column sweeps.
    #[allow(clippy::needless_range_loop)]
    fn tridiagonalize(&mut self) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let mut e = vec![0.0; n];
        for i in (1..n).rev() {
            let mut h = 0.0;
            if i > 1 {
                let scale: f64 = (0..i).map(|k| self.get(i, k).abs()).sum();
                if scale == 0.0 {
                    e[i] = self.get(i, i - 1);
                } else {
                    for k in 0..i {
                        let ik = self.idx(i, k);
                        self.a[ik] /= scale;
                        h += self.a[ik] * self.a[ik];
                    }
                    let f = self.get(i, i - 1);
                    let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                    e[i] = scale * g;
                    h -= f * g;
                    let il = self.idx(i, i - 1);
                    self.a[il] = f - g;
                    let mut f_acc = 0.0;
                    for j in 0..i {
                        let mut g_acc = 0.0;
                        for k in 0..=j {
                            g_acc += self.get(j, k) * self.get(i, k);
                        }
                        for k in (j + 1)..i {
                            g_acc += self.get(k, j) * self.get(i, k);
                        }
                        e[j] = g_acc / h;
                        f_acc += e[j] * self.get(i, j);
                    }
                    let hh = f_acc / (h + h);
                    for j in 0..i {
                        let f = self.get(i, j);
                        let g = e[j] - hh * f;
                        e[j] = g;
                        for k in 0..=j {
                            let jk = self.idx(j, k);
                            self.a[jk] -= f * e[k] + g * self.get(i, k);
                        }
                    }
                }
            } else {
                e[i] = self.get(i, i - 1);
            }
        }
        let d: Vec<f64> = (0..n).map(|i| self.get(i, i)).collect();
        (d, e)
    }
}

/// Dense complex Hermitian matrix, stored as real and imaginary parts.
#[derive(Debug, Clone)]
pub struct DenseHerm {
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl DenseHerm {
    pub fn zero(n: usize) -> Result<Self, StochasticsError> {
        if n == 0 || 2 * n > DENSE_CAP {
            return Err(StochasticsError::Dimension(format!(
                "Hermitian solver handles 1 ≤ n ≤ {}, got {n}",
                DENSE_CAP / 2
            )));
        }
        Ok(DenseHerm {
            n,
            re: vec![0.0; n * n],
            im: vec![0.0; n * n],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Add v_re + i·v_im to entry (i, j) and its conjugate to (j, i); the
    /// imaginary part of a diagonal addition must be zero.
    pub fn add_herm(&mut self, i: usize, j: usize, v_re: f64, v_im: f64) {
        let n = self.n;
        self.re[i * n + j] += v_re;
        self.im[i * n + j] += v_im;
        if i != j {
            self.re[j * n + i] += v_re;
            self.im[j * n + i] -= v_im;
        } else {
            debug_assert_eq!(v_im, 0.0, "diagonal entries are real");
        }
    }

    /// Eigenvalues via the symmetric embedding [[X, −Y], [Y, X]], whose
    /// 2n real eigenvalues are the n Hermitian ones, each twice.
    pub fn eigenvalues(&self) -> Result<Vec<f64>, StochasticsError> {
        let n = self.n;
        let mut big = DenseSym::zero(2 * n)?;
        for i in 0..n {
            for j in 0..n {
                let x = self.re[i * n + j];
                let y = self.im[i * n + j];
                big.a[i * 2 * n + j] = x;
                big.a[(i + n) * 2 * n + (j + n)] = x;
                big.a[i * 2 * n + (j + n)] = -y;
                big.a[(i + n) * 2 * n + j] = y;
            }
        }
        let doubled = big.eigenvalues()?;
        // Sorted descending, pairs are adjacent: keep every other entry.
        Ok(doubled.into_iter().step_by(2).collect())
    }
}

fn normal<R: Rng + ?Sized>(sd: f64, rng: &mut R) -> f64 {
    let g: f64 = StandardNormal.sample(rng);
    g * sd
}

/// One draw of the dense addition √δ·H + Σᵢ αᵢ·Wᵢ at matrix size `n`;
/// returns eigenvalues sorted descending. Centered specs subtract the
/// deterministic trace-mean shift Σᵢ αᵢLᵢ from every eigenvalue.
pub fn sample_classical_addition<R: Rng + ?Sized>(
    spec: &EnsembleSpec,
    n: usize,
    beta: ClassicalBeta,
    rng: &mut R,
) -> Result<Vec<f64>, StochasticsError> {
    if n == 0 || n > DENSE_CAP / 2 {
        return Err(StochasticsError::Dimension(format!(
            "classical addition handles 1 ≤ n ≤ {}, got {n}",
            DENSE_CAP / 2
        )));
    }
    let delta = rational_to_f64(spec.delta());
    let dims: Vec<usize> = spec
        .component_dims(n as u32)
        .iter()
        .map(|l| rational_to_f64(l) as usize)
        .collect();
    let alphas: Vec<f64> = spec
        .components()
        .iter()
        .map(|c| rational_to_f64(&c.alpha))
        .collect();

    let mut eig = match beta {
        ClassicalBeta::Orthogonal => {
            let mut m = DenseSym::zero(n)?;
            if delta > 0.0 {
                // Gaussian block: diagonal N(0, 2N), off-diagonal N(0, N),
                // scaled by √δ.
                let sd_off = (n as f64).sqrt() * delta.sqrt();
                for i in 0..n {
                    m.add_sym(i, i, normal(sd_off * std::f64::consts::SQRT_2, rng));
                    for j in 0..i {
                        m.add_sym(i, j, normal(sd_off, rng));
                    }
                }
            }
            for (&alpha, &l) in alphas.iter().zip(&dims) {
                // Wishart block AAᵀ with standard normal entries.
                let a: Vec<f64> = (0..n * l).map(|_| normal(1.0, rng)).collect();
                for i in 0..n {
                    for j in 0..=i {
                        let dot: f64 =
                            (0..l).map(|k| a[i * l + k] * a[j * l + k]).sum();
                        m.add_sym(i, j, alpha * dot);
                    }
                }
            }
            m.eigenvalues()?
        }
        ClassicalBeta::Unitary => {
            let mut m = DenseHerm::zero(n)?;
            if delta > 0.0 {
                // Gaussian block: real diagonal N(0, N), off-diagonal with
                // independent N(0, N/2) parts, scaled by √δ.
                let sd = (n as f64 / 2.0).sqrt() * delta.sqrt();
                for i in 0..n {
                    m.add_herm(i, i, normal(sd * std::f64::consts::SQRT_2, rng), 0.0);
                    for j in 0..i {
                        m.add_herm(i, j, normal(sd, rng), normal(sd, rng));
                    }
                }
            }
            let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
            for (&alpha, &l) in alphas.iter().zip(&dims) {
                // Complex Wishart AA* with standard complex normal entries.
                let a_re: Vec<f64> =
                    (0..n * l).map(|_| normal(inv_sqrt2, rng)).collect();
                let a_im: Vec<f64> =
                    (0..n * l).map(|_| normal(inv_sqrt2, rng)).collect();
                for i in 0..n {
                    for j in 0..=i {
                        let mut dot_re = 0.0;
                        let mut dot_im = 0.0;
                        for k in 0..l {
                            let (xr, xi) = (a_re[i * l + k], a_im[i * l + k]);
                            let (yr, yi) = (a_re[j * l + k], a_im[j * l + k]);
                            dot_re += xr * yr + xi * yi;
                            dot_im += xi * yr - xr * yi;
                        }
                        if i == j {
                            m.add_herm(i, i, alpha * dot_re, 0.0);
                        } else {
                            m.add_herm(i, j, alpha * dot_re, alpha * dot_im);
                        }
                    }
                }
            }
            m.eigenvalues()?
        }
    };

    if spec.centering() == Centering::Centered {
        // The uncentered mean eigenvalue Σᵢ αᵢLᵢ (the centered cumulant
        // sequence itself reports κ₁ = 0, so it cannot supply this).
        let shift: f64 = alphas
            .iter()
            .zip(&dims)
            .map(|(&alpha, &l)| alpha * l as f64)
            .sum();
        for lambda in &mut eig {
            *lambda -= shift;
        }
    }
    Ok(eig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cumulants::CumulantSequence;
    use crate::dunkl::{dunkl_joint_moment, dunkl_moment, LowerConvention};
    use crate::ensemble::{Centering, Component, EnsembleSpec};
    use crate::exact::{int, ratio, rational_to_f64 as to_f64};
    use crate::mc::{stream_rng, RunningStats};

    #[test]
    fn householder_ql_matches_trace_identities() {
        let mut rng = stream_rng(31, 0);
        let n = 12;
        let mut m = DenseSym::zero(n).unwrap();
        let mut full = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = rng.gen_range(-1.0..1.0);
                m.add_sym(i, j, v);
                full[i * n + j] = v;
                full[j * n + i] = v;
            }
        }
        let tr: f64 = (0..n).map(|i| full[i * n + i]).sum();
        let tr2: f64 = full.iter().map(|x| x * x).sum();
        let mut tr3 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    tr3 += full[i * n + j] * full[j * n + k] * full[k * n + i];
                }
            }
        }
        let eig = m.eigenvalues().unwrap();
        assert_eq!(eig.len(), n);
        let (s1, s2, s3) = eig.iter().fold((0.0, 0.0, 0.0), |(a, b, c), &x| {
            (a + x, b + x * x, c + x * x * x)
        });
        assert!((s1 - tr).abs() < 1e-9 * (1.0 + tr.abs()));
        assert!((s2 - tr2).abs() < 1e-9 * (1.0 + tr2.abs()));
        assert!((s3 - tr3).abs() < 1e-8 * (1.0 + tr3.abs()));
    }

    #[test]
    fn hermitian_two_by_two_closed_form() {
        let mut m = DenseHerm::zero(2).unwrap();
        // [[1, 2−i], [2+i, −3]]: eigenvalues −1 ± √(4 + 5).
        m.add_herm(0, 0, 1.0, 0.0);
        m.add_herm(1, 1, -3.0, 0.0);
        m.add_herm(0, 1, 2.0, -1.0);
        let eig = m.eigenvalues().unwrap();
        assert_eq!(eig.len(), 2);
        assert!((eig[0] - 2.0).abs() < 1e-12);
        assert!((eig[1] + 4.0).abs() < 1e-12);
    }

    #[test]
    fn hermitian_embedding_matches_trace_identities() {
        let mut rng = stream_rng(37, 0);
        let n = 6;
        let mut m = DenseHerm::zero(n).unwrap();
        let mut tr = 0.0;
        let mut tr2 = 0.0;
        for i in 0..n {
            let d = rng.gen_range(-1.0..1.0);
            m.add_herm(i, i, d, 0.0);
            tr += d;
            tr2 += d * d;
            for j in 0..i {
                let (x, y) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m.add_herm(i, j, x, y);
                tr2 += 2.0 * (x * x + y * y);
            }
        }
        let eig = m.eigenvalues().unwrap();
        assert_eq!(eig.len(), n);
        let s1: f64 = eig.iter().sum();
        let s2: f64 = eig.iter().map(|x| x * x).sum();
        assert!((s1 - tr).abs() < 1e-9);
        assert!((s2 - tr2).abs() < 1e-9);
    }

    fn mp1() -> EnsembleSpec {
        EnsembleSpec::marchenko_pastur(int(1)).unwrap()
    }

    #[test]
    fn gaussian_only_addition_matches_the_operator_engine() {
        // δ-only spec at N = 2: E[p₂] from the symbolic expansion, both
        // symmetry classes.
        let spec = EnsembleSpec::new(int(1), vec![], Centering::Uncentered).unwrap();
        for (beta, theta, seed) in [
            (ClassicalBeta::Orthogonal, ratio(1, 2), 41u64),
            (ClassicalBeta::Unitary, int(1), 43u64),
        ] {
            let truth = to_f64(
                &dunkl_moment(&spec, 2, &theta, 2, LowerConvention::Exact)
                    .unwrap()
                    .moment(),
            );
            let mut rng = stream_rng(seed, 0);
            let mut stats = RunningStats::new();
            for _ in 0..50_000 {
                let eig = sample_classical_addition(&spec, 2, beta, &mut rng).unwrap();
                stats.push(eig.iter().map(|x| x * x).sum());
            }
            let z = stats.estimate(seed).z_against(truth);
            assert!(z.abs() < 4.0, "beta {:?}: z = {z}", beta);
        }
    }

    #[test]
    fn wishart_addition_matches_the_operator_engine() {
        let spec = mp1();
        for (beta, theta, seed) in [
            (ClassicalBeta::Orthogonal, ratio(1, 2), 47u64),
            (ClassicalBeta::Unitary, int(1), 53u64),
        ] {
            let p1_truth = to_f64(&dunkl_joint_moment(&spec, 2, &theta, &[1]).unwrap());
            let p2_truth = to_f64(&dunkl_joint_moment(&spec, 2, &theta, &[2]).unwrap());
            let mut rng = stream_rng(seed, 0);
            let mut p1 = RunningStats::new();
            let mut p2 = RunningStats::new();
            for _ in 0..50_000 {
                let eig = sample_classical_addition(&spec, 2, beta, &mut rng).unwrap();
                p1.push(eig.iter().sum());
                p2.push(eig.iter().map(|x| x * x).sum());
            }
            assert!(p1.estimate(seed).z_against(p1_truth).abs() < 4.0, "{beta:?} p₁");
            assert!(p2.estimate(seed).z_against(p2_truth).abs() < 4.0, "{beta:?} p₂");
        }
    }

    #[test]
    fn mixed_spec_with_negative_component_has_the_right_trace() {
        let spec = EnsembleSpec::new(
            ratio(1, 2),
            vec![
                Component::new(int(1), int(1)),
                Component::new(ratio(-1, 2), int(2)),
            ],
            Centering::Uncentered,
        )
        .unwrap();
        let n = 3;
        let kappas = CumulantSequence::finite_n(&spec, n as u32, 1).unwrap();
        let truth = (n * n) as f64 * to_f64(kappas.kappa(1));
        let mut rng = stream_rng(59, 0);
        let mut stats = RunningStats::new();
        for _ in 0..30_000 {
            let eig =
                sample_classical_addition(&spec, n, ClassicalBeta::Unitary, &mut rng)
                    .unwrap();
            stats.push(eig.iter().sum());
        }
        assert!(stats.estimate(59).z_against(truth).abs() < 4.0);
    }

    #[test]
    fn centered_spec_has_zero_mean_trace() {
        let spec = EnsembleSpec::new(
            int(0),
            vec![Component::new(int(1), int(1))],
            Centering::Centered,
        )
        .unwrap();
        let mut rng = stream_rng(61, 0);
        let mut stats = RunningStats::new();
        for _ in 0..30_000 {
            let eig =
                sample_classical_addition(&spec, 2, ClassicalBeta::Orthogonal, &mut rng)
                    .unwrap();
            stats.push(eig.iter().sum());
        }
        assert!(stats.estimate(61).z_against(0.0).abs() < 4.0);
    }
}
