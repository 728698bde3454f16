use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::state::{pair_count, row_offset, OneExcitationState, PairAmplitudes, TwoExcitationState};
use crate::integrate::ComplexOde;
use crate::model::CavityModel;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Above this many pairs the two-excitation right-hand side runs on the rayon pool.
const PARALLEL_PAIRS: usize = 1 << 18;

/// `(B, C_1..C_N)` with `i dB = -sum g_n C_n`, `i dC_n = Delta_n C_n - g_n B`.
pub struct OneExcitationOde {
    detunings: Vec<f64>,
    couplings: Vec<f64>,
}

impl OneExcitationOde {
    pub fn new(model: &CavityModel) -> Self {
        Self { detunings: model.detunings().to_vec(), couplings: model.couplings().to_vec() }
    }

    pub fn pack(&self, s: &OneExcitationState) -> Vec<C64> {
        let mut x = Vec::with_capacity(1 + s.field.len());
        x.push(s.atom);
        x.extend_from_slice(&s.field);
        x
    }

    pub fn unpack(&self, time: f64, x: &[C64]) -> OneExcitationState {
        OneExcitationState { time, atom: x[0], field: x[1..].to_vec() }
    }
}

impl ComplexOde for OneExcitationOde {
    fn dim(&self) -> usize {
        1 + self.detunings.len()
    }

    fn derivative(&self, _t: f64, x: &[C64], dx: &mut [C64]) {
        let b = x[0];
        let mut sum = C64::new(0.0, 0.0);
        for (n, (&d, &g)) in self.detunings.iter().zip(&self.couplings).enumerate() {
            let c = x[1 + n];
            sum += g * c;
            dx[1 + n] = I * (g * b - d * c);
        }
        dx[0] = I * sum;
    }
}

/// Flat layout `[D_0..D_N | E_0..E_N | F packed]` with
///
/// ```text
/// i dD_n  = Delta_n D_n - sum_{m!=n} g_m F_nm - sqrt2 g_n E_n
/// i dE_n  = 2 Delta_n E_n - sqrt2 g_n D_n
/// i dF_nm = (Delta_n + Delta_m) F_nm - g_n D_m - g_m D_n
/// ```
pub struct TwoExcitationOde {
    modes: usize,
    detunings: Vec<f64>,
    couplings: Vec<f64>,
    parallel: bool,
}

impl TwoExcitationOde {
    pub fn new(model: &CavityModel) -> Self {
        Self {
            parallel: pair_count(model.modes()) >= PARALLEL_PAIRS,
            modes: model.modes(),
            detunings: model.detunings().to_vec(),
            couplings: model.couplings().to_vec(),
        }
    }

    pub fn pack(&self, s: &TwoExcitationState) -> Vec<C64> {
        let mut x = Vec::with_capacity(self.dim());
        x.extend_from_slice(&s.excited);
        x.extend_from_slice(&s.doubled);
        x.extend_from_slice(s.pairs.packed());
        x
    }

    pub fn unpack(&self, time: f64, x: &[C64]) -> TwoExcitationState {
        let n = self.modes;
        TwoExcitationState {
            time,
            excited: x[..n].to_vec(),
            doubled: x[n..2 * n].to_vec(),
            pairs: PairAmplitudes::from_packed(n, x[2 * n..].to_vec()),
        }
    }

    /// Writes `dF` for row `n` and adds its share of `sum_m g_m F_nm` into `acc`.
    #[inline]
    fn pair_row(&self, n: usize, d: &[C64], f_row: &[C64], df_row: &mut [C64], acc: &mut [C64]) {
        let (dn, gn, big_dn) = (self.detunings[n], self.couplings[n], d[n]);
        let mut own = C64::new(0.0, 0.0);
        for (j, (f, df)) in f_row.iter().zip(df_row.iter_mut()).enumerate() {
            let m = n + 1 + j;
            let gm = self.couplings[m];
            *df = I * (gn * d[m] + gm * big_dn - (dn + self.detunings[m]) * f);
            own += gm * f;
            acc[m] += gn * f;
        }
        acc[n] += own;
    }
}

impl ComplexOde for TwoExcitationOde {
    fn dim(&self) -> usize {
        2 * self.modes + pair_count(self.modes)
    }

    fn derivative(&self, _t: f64, x: &[C64], dx: &mut [C64]) {
        let n = self.modes;
        let (d, rest) = x.split_at(n);
        let (e, f) = rest.split_at(n);
        let (dd, drest) = dx.split_at_mut(n);
        let (de, df) = drest.split_at_mut(n);

        // acc[n] = sum_{m != n} g_m F_nm
        let acc = if self.parallel {
            // fixed blocks summed in order keep the result independent of scheduling
            let partial: Vec<Vec<C64>> = row_blocks(n, df)
                .into_par_iter()
                .map(|block| {
                    let mut acc = vec![C64::new(0.0, 0.0); n];
                    for (row, df_row) in block {
                        let lo = row_offset(n, row);
                        let f_row = &f[lo..lo + df_row.len()];
                        self.pair_row(row, d, f_row, df_row, &mut acc);
                    }
                    acc
                })
                .collect();
            let mut acc = vec![C64::new(0.0, 0.0); n];
            for p in partial {
                acc.iter_mut().zip(p).for_each(|(x, y)| *x += y);
            }
            acc
        } else {
            let mut acc = vec![C64::new(0.0, 0.0); n];
            for row in 0..n {
                let lo = row_offset(n, row);
                let len = n - row - 1;
                self.pair_row(row, d, &f[lo..lo + len], &mut df[lo..lo + len], &mut acc);
            }
            acc
        };

        let s2 = std::f64::consts::SQRT_2;
        for k in 0..n {
            let (dk, gk) = (self.detunings[k], self.couplings[k]);
            dd[k] = I * (acc[k] + s2 * gk * e[k] - dk * d[k]);
            de[k] = I * (s2 * gk * d[k] - 2.0 * dk * e[k]);
        }
    }
}

/// Number of row blocks the parallel right-hand side is cut into.
const BLOCKS: usize = 64;

/// Consecutive rows grouped into blocks of roughly equal pair count.
fn row_blocks(modes: usize, mut df: &mut [C64]) -> Vec<Vec<(usize, &mut [C64])>> {
    let target = pair_count(modes).div_ceil(BLOCKS).max(1);
    let mut blocks = Vec::with_capacity(BLOCKS + 1);
    let mut current = Vec::new();
    let mut filled = 0;
    for row in 0..modes {
        let len = modes - row - 1;
        let (head, tail) = df.split_at_mut(len);
        current.push((row, head));
        df = tail;
        filled += len;
        if filled >= target {
            blocks.push(std::mem::take(&mut current));
            filled = 0;
        }
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_model, CavityParams};

    /// Hermitian generator: `Re <x, -i H x> = 0`, so `Re <x, dx> = 0` for any x.
    fn anti_hermitian_check<O: ComplexOde>(ode: &O, seed: u64) {
        let dim = ode.dim();
        let mut s = seed;
        let mut rnd = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let x: Vec<C64> = (0..dim).map(|_| C64::new(rnd(), rnd())).collect();
        let mut dx = vec![C64::new(0.0, 0.0); dim];
        ode.derivative(0.0, &x, &mut dx);
        let re: f64 = x.iter().zip(&dx).map(|(a, b)| (a.conj() * b).re).sum();
        let scale: f64 = dx.iter().map(|v| v.norm()).sum();
        assert!(re.abs() < 1e-12 * scale.max(1.0), "Re<x,dx> = {re}");
    }

    #[test]
    fn generators_preserve_norm() {
        let m = build_model(&CavityParams { modes: 30, ..Default::default() }).unwrap();
        for seed in 1..5 {
            anti_hermitian_check(&OneExcitationOde::new(&m), seed);
            anti_hermitian_check(&TwoExcitationOde::new(&m), seed);
        }
    }

    #[test]
    fn parallel_rows_match_sequential() {
        let m = build_model(&CavityParams { modes: 40, ..Default::default() }).unwrap();
        let seq = TwoExcitationOde::new(&m);
        let par = TwoExcitationOde { parallel: true, ..TwoExcitationOde::new(&m) };
        let x: Vec<C64> =
            (0..seq.dim()).map(|k| C64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos())).collect();
        let mut a = vec![C64::new(0.0, 0.0); seq.dim()];
        let mut b = a.clone();
        seq.derivative(0.0, &x, &mut a);
        par.derivative(0.0, &x, &mut b);
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).norm() < 1e-13);
        }
    }
}
