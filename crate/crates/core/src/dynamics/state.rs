use num_complex::Complex64 as C64;

/// Symmetric pair amplitudes `F_nm` (n != m), stored once per unordered pair.
///
/// Entries are packed row by row over the strict upper triangle, so
/// `F_nm = F_mn` holds by construction and the diagonal does not exist.
#[derive(Clone, Debug, PartialEq)]
pub struct PairAmplitudes {
    modes: usize,
    values: Vec<C64>,
}

/// Number of unordered pairs among `modes` modes.
pub fn pair_count(modes: usize) -> usize {
    modes * modes.saturating_sub(1) / 2
}

#[inline]
pub(crate) fn row_offset(modes: usize, n: usize) -> usize {
    n * modes - n * (n + 1) / 2
}

impl PairAmplitudes {
    pub fn zeros(modes: usize) -> Self {
        Self { modes, values: vec![C64::new(0.0, 0.0); pair_count(modes)] }
    }

    /// Builds from a generator called once per pair with `n < m`.
    pub fn from_fn(modes: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut values = Vec::with_capacity(pair_count(modes));
        for n in 0..modes {
            for m in n + 1..modes {
                values.push(f(n, m));
            }
        }
        Self { modes, values }
    }

    pub(crate) fn from_packed(modes: usize, values: Vec<C64>) -> Self {
        debug_assert_eq!(values.len(), pair_count(modes));
        Self { modes, values }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    #[inline]
    pub fn index(&self, n: usize, m: usize) -> usize {
        debug_assert!(n < m && m < self.modes);
        row_offset(self.modes, n) + (m - n - 1)
    }

    /// `F_nm`; zero on the diagonal.
    #[inline]
    pub fn get(&self, n: usize, m: usize) -> C64 {
        match n.cmp(&m) {
            std::cmp::Ordering::Less => self.values[self.index(n, m)],
            std::cmp::Ordering::Greater => self.values[self.index(m, n)],
            std::cmp::Ordering::Equal => C64::new(0.0, 0.0),
        }
    }

    pub fn packed(&self) -> &[C64] {
        &self.values
    }

    pub(crate) fn packed_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    /// Full `N x N` row-major matrix with a zero diagonal.
    pub fn to_dense(&self) -> Vec<C64> {
        let n = self.modes;
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = self.values[self.index(i, j)];
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        out
    }

    /// `sum_{n<m} |F_nm|^2`, equal to `1/2 sum_{n!=m} |F_nm|^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Row `n` of the symmetric matrix with `F_nn` treated as zero.
    pub fn row(&self, n: usize) -> Vec<C64> {
        (0..self.modes).map(|m| self.get(n, m)).collect()
    }
}

/// Field-only single-photon state (no atom).
#[derive(Clone, Debug, PartialEq)]
pub struct FieldOnlyState {
    pub time: f64,
    /// `A_n`
    pub amplitudes: Vec<C64>,
}

/// One excitation shared between atom and field: `B |e,0> + sum C_n |g,1_n>`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneExcitationState {
    pub time: f64,
    /// `B`
    pub atom: C64,
    /// `C_n`
    pub field: Vec<C64>,
}

/// Two excitations: `sum D_n |e,1_n> + sum E_n |g,2_n> + sum_{n<m} F_nm |g,1_n,1_m>`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoExcitationState {
    pub time: f64,
    /// `D_n`
    pub excited: Vec<C64>,
    /// `E_n`
    pub doubled: Vec<C64>,
    /// `F_nm`
    pub pairs: PairAmplitudes,
}

impl FieldOnlyState {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

impl OneExcitationState {
    pub fn norm_sqr(&self) -> f64 {
        self.atom.norm_sqr() + self.field.iter().map(|a| a.norm_sqr()).sum::<f64>()
    }

    pub fn modes(&self) -> usize {
        self.field.len()
    }
}

impl TwoExcitationState {
    pub fn vacuum_like(modes: usize) -> Self {
        Self {
            time: 0.0,
            excited: vec![C64::new(0.0, 0.0); modes],
            doubled: vec![C64::new(0.0, 0.0); modes],
            pairs: PairAmplitudes::zeros(modes),
        }
    }

    pub fn modes(&self) -> usize {
        self.excited.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.excited.iter().map(|a| a.norm_sqr()).sum::<f64>()
            + self.doubled.iter().map(|a| a.norm_sqr()).sum::<f64>()
            + self.pairs.norm_sqr()
    }

    pub(crate) fn scale(&mut self, factor: f64) {
        for v in self.excited.iter_mut().chain(self.doubled.iter_mut()) {
            *v *= factor;
        }
        for v in self.pairs.packed_mut() {
            *v *= factor;
        }
    }
}
