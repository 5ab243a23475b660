//! Symmetric banded matrices stored by lower band.

pub(crate) struct BandMatrix {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub(crate) fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.bw + 1) + (j + self.bw - i)
    }

    /// Adds `v` at `(i, j)` for `j ≤ i`.
    pub(crate) fn add_lower(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(j <= i && i - j <= self.bw);
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub(crate) fn max_diagonal(&self) -> f64 {
        (0..self.n).map(|i| self.data[self.idx(i, i)].abs()).fold(0.0, f64::max)
    }

    /// Solves `(A + shift·I) x = b` by Cholesky; `None` if the shifted
    /// matrix is not numerically positive definite.
    pub(crate) fn solve_shifted(&self, shift: f64, b: &[f64]) -> Option<Vec<f64>> {
        let (n, bw) = (self.n, self.bw);
        let mut l = self.data.clone();
        for i in 0..n {
            let k = self.idx(i, i);
            l[k] += shift;
        }
        let tiny = f64::EPSILON * self.max_diagonal().max(shift);
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let mut s = l[self.idx(i, j)];
                for k in j0.max(j.saturating_sub(bw))..j {
                    s -= l[self.idx(i, k)] * l[self.idx(j, k)];
                }
                if i == j {
                    if !(s > tiny) || !s.is_finite() {
                        return None;
                    }
                    l[self.idx(i, i)] = s.sqrt();
                } else {
                    l[self.idx(i, j)] = s / l[self.idx(j, j)];
                }
            }
        }
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in i.saturating_sub(bw)..i {
                s -= l[self.idx(i, k)] * y[k];
            }
            y[i] = s / l[self.idx(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..(i + bw + 1).min(n) {
                s -= l[self.idx(k, i)] * y[k];
            }
            y[i] = s / l[self.idx(i, i)];
        }
        Some(y)
    }
}
