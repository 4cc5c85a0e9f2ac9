use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::params;
use crate::report::{gate, Oracle, VerificationReport};
use crate::rng::stream;

/// Largest dimension enumerated over all of `Sym(d)`.
pub const EXHAUSTIVE_MAX_DIM: usize = 8;

/// Index sets and weights for the two permutation bounds. `I` and `J` are
/// subsets of `{1, …, d}`; `u[j-1]` is the weight `u_j`.
#[derive(Clone, Debug)]
pub struct PermutationCase {
    pub d: usize,
    pub i: Vec<usize>,
    pub j: Vec<usize>,
    pub u: Vec<f64>,
    pub delta0: f64,
    pub delta1: f64,
}

/// Sums over permutations: how many have `|σ(I) ∩ J| <= r|I|/(5d)`, and the
/// sum and sum of squares of `exp(-Σ_{j ∈ σ(I) ∩ J} u_j)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct Tally {
    n: u64,
    small: u64,
    sum: f64,
    sum_sq: f64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            n: self.n + o.n,
            small: self.small + o.small,
            sum: self.sum + o.sum,
            sum_sq: self.sum_sq + o.sum_sq,
        }
    }
}

impl PermutationCase {
    pub fn new(d: usize, i: Vec<usize>, j: Vec<usize>, u: Vec<f64>, delta0: f64, delta1: f64) -> Result<Self> {
        if d == 0 || d > 64 {
            return Err(invalid("d", format!("need 1 <= d <= 64, got {d}")));
        }
        let valid = |s: &[usize]| {
            s.iter().all(|&k| (1..=d).contains(&k)) && s.windows(2).all(|w| w[0] < w[1])
        };
        if !valid(&i) || !valid(&j) {
            return Err(invalid("I, J", "index sets must be strictly increasing subsets of 1..=d"));
        }
        if u.len() != d || u.iter().any(|v| !v.is_finite()) {
            return Err(invalid("u", format!("need {d} finite weights")));
        }
        Ok(Self { d, i, j, u, delta0, delta1 })
    }

    fn threshold(&self) -> f64 {
        (self.j.len() * self.i.len()) as f64 / (5 * self.d) as f64
    }

    fn j_mask(&self) -> u64 {
        self.j.iter().fold(0, |m, &k| m | 1 << (k - 1))
    }

    /// Adds the permutation `perm` (0-based images) to `t`.
    fn record(&self, perm: &[usize], jm: u64, thr: f64, t: &mut Tally) {
        let mut hit = 0usize;
        let mut s = 0.0;
        for &k in &self.i {
            let img = perm[k - 1];
            if jm >> img & 1 == 1 {
                hit += 1;
                s += self.u[img];
            }
        }
        let e = (-s).exp();
        t.n += 1;
        t.small += (hit as f64 <= thr) as u64;
        t.sum += e;
        t.sum_sq += e * e;
    }

    /// Every permutation of `Sym(d)`, split in parallel by `σ(1)`.
    fn exhaustive_tally(&self) -> Tally {
        let (jm, thr, d) = (self.j_mask(), self.threshold(), self.d);
        let parts: Vec<Tally> = (0..d)
            .into_par_iter()
            .map(|first| {
                let mut rest: Vec<usize> = (0..d).filter(|&k| k != first).collect();
                let mut t = Tally::default();
                let mut perm = vec![0; d];
                perm[0] = first;
                // Heap's algorithm over the remaining d - 1 images.
                let m = rest.len();
                let mut c = vec![0usize; m];
                perm[1..].copy_from_slice(&rest);
                self.record(&perm, jm, thr, &mut t);
                let mut k = 0;
                while k < m {
                    if c[k] < k {
                        if k % 2 == 0 {
                            rest.swap(0, k);
                        } else {
                            rest.swap(c[k], k);
                        }
                        perm[1..].copy_from_slice(&rest);
                        self.record(&perm, jm, thr, &mut t);
                        c[k] += 1;
                        k = 0;
                    } else {
                        c[k] = 0;
                        k += 1;
                    }
                }
                t
            })
            .collect();
        parts.into_iter().fold(Tally::default(), Tally::merge)
    }

    /// `trials` uniform permutations; trial `k` is drawn from stream `k`.
    fn sampled_tally(&self, trials: u64, seed: u64) -> Tally {
        const CHUNK: u64 = 4096;
        let (jm, thr) = (self.j_mask(), self.threshold());
        let chunks = trials.div_ceil(CHUNK);
        let parts: Vec<Tally> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut t = Tally::default();
                let mut perm: Vec<usize> = (0..self.d).collect();
                for k in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                    perm.iter_mut().enumerate().for_each(|(i, p)| *p = i);
                    perm.shuffle(&mut stream(seed, k));
                    self.record(&perm, jm, thr, &mut t);
                }
                t
            })
            .collect();
        // Fixed-order merge keeps sums independent of the thread count.
        parts.into_iter().fold(Tally::default(), Tally::merge)
    }

    fn moment_gates(&self) -> Vec<crate::report::Gate> {
        let d = self.d;
        let u = &self.u;
        let monotone = u.windows(2).all(|w| w[0] >= w[1]) && u[d - 1] >= 0.0;
        let suffix = self.j.iter().enumerate().all(|(k, &v)| v == d - self.j.len() + 1 + k);
        let ni = self.i.len() as f64;
        vec![
            gate("0 < delta0 < 1", self.delta0 > 0.0 && self.delta0 < 1.0),
            gate(
                "0 <= u_d <= ... <= u_1 <= (1 - delta0)/2",
                monotone && u[0] <= (1.0 - self.delta0) / 2.0,
            ),
            gate(
                "0 < delta1 <= 1 and delta1 d <= |I| <= d",
                self.delta1 > 0.0 && self.delta1 <= 1.0 && self.delta1 * d as f64 <= ni,
            ),
            gate("J = (d0, d]", suffix),
        ]
    }

    fn reports(&self, t: Tally, oracle: impl Fn(f64) -> Oracle) -> Vec<VerificationReport> {
        let n = t.n as f64;
        let p = t.small as f64 / n;
        let mean = t.sum / n;
        let var = (t.sum_sq / n - mean * mean).max(0.0);
        let (r, ni, d) = (self.j.len() as f64, self.i.len() as f64, self.d as f64);
        let params = || {
            params! {
                "d" => self.d, "I" => self.i, "J" => self.j, "u" => self.u,
                "delta0" => self.delta0, "delta1" => self.delta1,
            }
        };
        let overlap = VerificationReport::inequality(
            "permutation_overlap_tail",
            params(),
            vec![],
            p,
            (-r * ni / (10.0 * d)).exp(),
            0.0,
            oracle((p * (1.0 - p) / n).sqrt()),
        )
        .with_detail(format!("threshold r|I|/(5d) = {}", self.threshold()));
        let u_sum: f64 = self.j.iter().map(|&k| self.u[k - 1]).sum();
        let moment = VerificationReport::inequality(
            "permutation_exponential_moment",
            params(),
            self.moment_gates(),
            mean,
            3.0 * (-self.delta0 * self.delta1 / 20.0 * u_sum).exp(),
            0.0,
            oracle((var / n).sqrt()),
        );
        vec![overlap, moment]
    }

    /// Exact evaluation over all `d!` permutations.
    pub fn exhaustive(&self) -> Result<Vec<VerificationReport>> {
        if self.d > EXHAUSTIVE_MAX_DIM {
            return Err(invalid("d", format!("exhaustive evaluation needs d <= {EXHAUSTIVE_MAX_DIM}")));
        }
        Ok(self.reports(self.exhaustive_tally(), |_| Oracle::Exact))
    }

    /// Estimates from `trials` seeded uniform permutations.
    pub fn monte_carlo(&self, trials: u64, seed: u64) -> Result<Vec<VerificationReport>> {
        if trials == 0 {
            return Err(invalid("trials", "need at least one trial"));
        }
        let t = self.sampled_tally(trials, seed);
        Ok(self.reports(t, |stderr| Oracle::MonteCarlo { trials, seed, stderr }))
    }
}

/// `P[|σ(I) ∩ J| <= r|I|/(5d)] <= e^{-r|I|/(10d)}` with `r = |J|`, and
/// `E[exp(-Σ_{j ∈ σ(I) ∩ J} u_j)] <= 3 exp(-(δ₀δ₁/20) Σ_{j ∈ J} u_j)`, for
/// `σ` uniform on `Sym(d)`. Exhaustive for `d <= 8`, sampled otherwise.
pub fn monte_carlo_permutations(case: &PermutationCase, trials: u64, seed: u64) -> Result<Vec<VerificationReport>> {
    if case.d <= EXHAUSTIVE_MAX_DIM {
        case.exhaustive()
    } else {
        case.monte_carlo(trials, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Verdict;

    fn binom(n: u64, k: u64) -> f64 {
        if k > n {
            return 0.0;
        }
        (0..k).fold(1.0, |c, i| c * (n - i) as f64 / (i + 1) as f64)
    }

    /// `σ(I)` is a uniform `|I|`-subset, so the overlap is hypergeometric.
    fn hypergeometric_cdf(d: u64, ni: u64, r: u64, upto: f64) -> f64 {
        (0..=ni.min(r))
            .filter(|&k| k as f64 <= upto)
            .map(|k| binom(r, k) * binom(d - r, ni - k) / binom(d, ni))
            .sum()
    }

    #[test]
    fn full_sets_never_fall_short() {
        let all: Vec<usize> = (1..=6).collect();
        let c = PermutationCase::new(6, all.clone(), all, vec![0.0; 6], 0.5, 1.0).unwrap();
        let rs = c.exhaustive().unwrap();
        assert_eq!(rs[0].lhs, 0.0);
        assert_eq!(rs[1].lhs, 1.0);
        assert_eq!(rs[1].rhs, 3.0);
        assert!(rs.iter().all(|r| r.verdict == Verdict::Pass));
    }

    #[test]
    fn exhaustive_matches_hypergeometric() {
        for (d, ni, jlo) in [(8usize, 6usize, 5usize), (7, 3, 2), (5, 5, 1), (8, 2, 7)] {
            let i: Vec<usize> = (1..=ni).collect();
            let j: Vec<usize> = (jlo..=d).collect();
            let c = PermutationCase::new(d, i, j.clone(), vec![0.1; d], 0.5, 0.2).unwrap();
            let rs = c.exhaustive().unwrap();
            let want = hypergeometric_cdf(d as u64, ni as u64, j.len() as u64, c.threshold());
            assert!((rs[0].lhs - want).abs() < 1e-14, "{d} {ni} {jlo}");
            // Weighted moment: Σ_k P[overlap = k] e^{-0.1 k}.
            let m: f64 = (0..=ni.min(j.len()))
                .map(|k| {
                    binom(j.len() as u64, k as u64) * binom((d - j.len()) as u64, (ni - k) as u64)
                        / binom(d as u64, ni as u64)
                        * (-0.1 * k as f64).exp()
                })
                .sum();
            assert!((rs[1].lhs - m).abs() < 1e-13);
            assert!(rs.iter().all(|r| r.ok()));
        }
    }

    #[test]
    fn heap_enumeration_visits_every_permutation_once() {
        let c = PermutationCase::new(5, vec![1], vec![5], vec![0.0; 5], 0.5, 0.2).unwrap();
        assert_eq!(c.exhaustive_tally().n, 120);
    }

    #[test]
    fn gates() {
        let u = vec![0.3, 0.2, 0.2, 0.1];
        let c = PermutationCase::new(4, vec![1, 2], vec![3, 4], u.clone(), 0.2, 0.5).unwrap();
        assert!(c.exhaustive().unwrap()[1].hypothesis_regime);
        let not_suffix = PermutationCase::new(4, vec![1, 2], vec![2, 3], u.clone(), 0.2, 0.5).unwrap();
        assert_eq!(not_suffix.exhaustive().unwrap()[1].verdict, Verdict::ReportOnly);
        let increasing = PermutationCase::new(4, vec![1, 2], vec![3, 4], vec![0.1, 0.2, 0.2, 0.3], 0.2, 0.5).unwrap();
        assert_eq!(increasing.exhaustive().unwrap()[1].verdict, Verdict::ReportOnly);
        assert!(PermutationCase::new(4, vec![0], vec![], u, 0.2, 0.5).is_err());
    }

    #[test]
    fn sampling_agrees_with_enumeration() {
        let u: Vec<f64> = (0..7).map(|k| 0.4 - 0.05 * k as f64).collect();
        let c = PermutationCase::new(7, vec![1, 3, 4, 6], vec![4, 5, 6, 7], u, 0.2, 0.5).unwrap();
        let exact = c.exhaustive().unwrap();
        let mut agree = 0;
        for seed in 0..40 {
            let mc = c.monte_carlo(2000, seed).unwrap();
            let ok = exact.iter().zip(&mc).all(|(e, m)| {
                let Oracle::MonteCarlo { stderr, .. } = m.oracle else { unreachable!() };
                (e.lhs - m.lhs).abs() <= 3.0 * stderr + 1e-12
            });
            agree += ok as u32;
        }
        assert!(agree >= 38, "{agree}");
        assert_eq!(c.monte_carlo(3000, 5).unwrap(), c.monte_carlo(3000, 5).unwrap());
    }
}
