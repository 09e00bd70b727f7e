//! Bit-packed ±1 sequences and their aperiodic autocorrelations.
//!
//! A sequence of length `n` over {+1, -1} is stored one bit per element:
//! bit `j` of word `j / 64` holds element `j`, with bit value 0 meaning +1
//! and bit value 1 meaning -1 (sign = 1 - 2*bit). Unused bits above `n`
//! are always zero. All comparisons and the canonical orbit representative
//! use the packed value, i.e. the integer `sum_j bit_j * 2^j`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use realfft::num_complex::Complex;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use thiserror::Error;

/// Largest supported sequence length for single-sequence operations.
pub const MAX_SEQUENCE_LEN: usize = 1 << 20;

/// Lengths at or above this use the FFT kernel for PSL evaluation;
/// below it the shifted-popcount kernel is faster (measured crossover
/// between 512 and 1024 on x86-64).
pub const TRANSFORM_MIN_LEN: usize = 1024;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeqError {
    #[error("sequence length must be in 1..={max}, got {len}", max = MAX_SEQUENCE_LEN)]
    LengthOutOfRange { len: usize },
    #[error("element at index {index} is {value}, expected +1 or -1")]
    InvalidElement { index: usize, value: i8 },
    #[error("invalid character {found:?} at column {column}, expected '+' or '-'")]
    Parse { column: usize, found: char },
    #[error("shift {shift} out of range for length {len}")]
    ShiftOutOfRange { shift: usize, len: usize },
    #[error("peak sidelobe level requires length >= 2, got {len}")]
    TooShort { len: usize },
    #[error("transform residual {residual} at lag {lag} is too large to round safely")]
    Precision { lag: usize, residual: f64 },
}

/// A binary sequence: `n` elements from {+1, -1}, bit-packed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinarySequence {
    len: usize,
    words: Vec<u64>,
}

impl BinarySequence {
    /// Builds a sequence from explicit ±1 elements.
    pub fn from_elements(elements: &[i8]) -> Result<Self, SeqError> {
        check_len(elements.len())?;
        let mut words = vec![0u64; words_for(elements.len())];
        for (j, &e) in elements.iter().enumerate() {
            match e {
                1 => {}
                -1 => words[j >> 6] |= 1u64 << (j & 63),
                other => return Err(SeqError::InvalidElement { index: j, value: other }),
            }
        }
        Ok(Self { len: elements.len(), words })
    }

    /// Parses the `{+,-}` text form, e.g. `"+++++--++-+-+"`.
    /// Columns in errors are 1-based.
    pub fn parse(text: &str) -> Result<Self, SeqError> {
        check_len(text.chars().count())?;
        let mut words = vec![0u64; words_for(text.chars().count())];
        let mut len = 0usize;
        for (idx, ch) in text.chars().enumerate() {
            match ch {
                '+' => {}
                '-' => words[idx >> 6] |= 1u64 << (idx & 63),
                found => return Err(SeqError::Parse { column: idx + 1, found }),
            }
            len += 1;
        }
        Ok(Self { len, words })
    }

    /// Assembles a sequence directly from packed words (tail bits are masked off).
    pub(crate) fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        debug_assert!((1..=MAX_SEQUENCE_LEN).contains(&len));
        debug_assert_eq!(words.len(), words_for(len));
        let tail = len & 63;
        if tail != 0 {
            let last = words.len() - 1;
            words[last] &= (1u64 << tail) - 1;
        }
        Self { len, words }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false // length >= 1 by construction
    }

    /// Element at position `j` as +1 or -1. Panics if `j >= len`.
    pub fn element(&self, j: usize) -> i8 {
        assert!(j < self.len, "index {j} out of range for length {}", self.len);
        1 - 2 * ((self.words[j >> 6] >> (j & 63)) & 1) as i8
    }

    pub fn elements(&self) -> Vec<i8> {
        (0..self.len).map(|j| self.element(j)).collect()
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    /// The aperiodic autocorrelation `c_k = sum_j a_j a_{j+k}`, exact.
    pub fn autocorrelation(&self, shift: usize) -> Result<i64, SeqError> {
        if shift >= self.len {
            return Err(SeqError::ShiftOutOfRange { shift, len: self.len });
        }
        let overlap = self.len - shift;
        Ok(overlap as i64 - 2 * self.disagreements(shift) as i64)
    }

    /// Number of positions `j < n-k` where `a_j != a_{j+k}`, via word-level
    /// shifted XOR and popcount. `c_k = (n-k) - 2 * disagreements(k)`.
    fn disagreements(&self, shift: usize) -> u64 {
        let overlap = self.len - shift;
        let word_shift = shift >> 6;
        let bit_shift = (shift & 63) as u32;
        let mut diff = 0u64;
        for w in 0..((overlap + 63) >> 6) {
            let src = w + word_shift;
            let lo = self.words[src] >> bit_shift;
            let hi = if bit_shift == 0 {
                0
            } else {
                self.words.get(src + 1).copied().unwrap_or(0) << (64 - bit_shift)
            };
            let mut x = self.words[w] ^ (lo | hi);
            let remaining = overlap - (w << 6);
            if remaining < 64 {
                x &= (1u64 << remaining) - 1;
            }
            diff += u64::from(x.count_ones());
        }
        diff
    }

    /// Full spectrum `(c_0, ..., c_{n-1})` by the shifted-popcount kernel.
    /// This is the source of truth; `spectrum_transform` must agree exactly.
    pub fn spectrum_direct(&self) -> AutocorrelationSpectrum {
        let values = (0..self.len)
            .map(|k| self.len as i64 - k as i64 - 2 * self.disagreements(k) as i64)
            .collect();
        AutocorrelationSpectrum { values }
    }

    /// Full spectrum by zero-padded fast convolution of the sequence with its
    /// reversal. Every bin is rounded to the nearest integer; a pre-rounding
    /// residual of 0.5 or more fails with [`SeqError::Precision`].
    pub fn spectrum_transform(&self) -> Result<AutocorrelationSpectrum, SeqError> {
        TransformKernel::new(self.len).spectrum(self)
    }

    /// Peak sidelobe level `mu(A) = max_{1<=k<=n-1} |c_k|`.
    ///
    /// Uses the popcount kernel for short sequences and the FFT kernel
    /// (falling back to popcount on a rounding failure) for long ones.
    pub fn psl(&self) -> Result<u64, SeqError> {
        if self.len < 2 {
            return Err(SeqError::TooShort { len: self.len });
        }
        Ok(PslKernel::new(self.len).psl(self))
    }

    /// Negation: every element flips sign.
    pub fn negated(&self) -> Self {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        let tail = self.len & 63;
        if tail != 0 {
            let last = words.len() - 1;
            words[last] &= (1u64 << tail) - 1;
        }
        Self { len: self.len, words }
    }

    /// Reversal: element `j` becomes element `n-1-j`.
    pub fn reversed(&self) -> Self {
        let mut words = vec![0u64; self.words.len()];
        for j in 0..self.len {
            let src = self.len - 1 - j;
            let bit = (self.words[src >> 6] >> (src & 63)) & 1;
            words[j >> 6] |= bit << (j & 63);
        }
        Self { len: self.len, words }
    }

    /// Alternation: element `j` is multiplied by `(-1)^j`, i.e. every odd
    /// position flips sign. Maps `c_k` to `(-1)^k c_k`, so |c_k| is preserved.
    pub fn alternated(&self) -> Self {
        const ODD_BITS: u64 = 0xaaaa_aaaa_aaaa_aaaa;
        let mut words: Vec<u64> = self.words.iter().map(|w| w ^ ODD_BITS).collect();
        let tail = self.len & 63;
        if tail != 0 {
            let last = words.len() - 1;
            words[last] &= (1u64 << tail) - 1;
        }
        Self { len: self.len, words }
    }

    /// Orbit of this sequence under the order-8 group generated by negation,
    /// reversal, and alternation. Every member has the same PSL. The result
    /// is sorted by packed value and deduplicated; its size divides 8.
    pub fn symmetry_orbit(&self) -> Vec<BinarySequence> {
        let mut orbit: Vec<BinarySequence> = Vec::with_capacity(8);
        for bits in 0u8..8 {
            let mut s = self.clone();
            if bits & 1 != 0 {
                s = s.alternated();
            }
            if bits & 2 != 0 {
                s = s.reversed();
            }
            if bits & 4 != 0 {
                s = s.negated();
            }
            orbit.push(s);
        }
        orbit.sort();
        orbit.dedup();
        orbit
    }

    /// Canonical orbit representative: the member with the smallest packed value.
    pub fn canonical(&self) -> BinarySequence {
        self.symmetry_orbit().into_iter().next().expect("orbit is never empty")
    }
}

fn check_len(len: usize) -> Result<(), SeqError> {
    if len == 0 || len > MAX_SEQUENCE_LEN {
        return Err(SeqError::LengthOutOfRange { len });
    }
    Ok(())
}

fn words_for(len: usize) -> usize {
    (len + 63) >> 6
}

impl fmt::Display for BinarySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.len {
            f.write_str(if self.element(j) == 1 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl FromStr for BinarySequence {
    type Err = SeqError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl PartialOrd for BinarySequence {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BinarySequence {
    /// Orders by length, then by packed value (most significant word first).
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

/// The integer autocorrelation vector `(c_0, ..., c_{n-1})` of one sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutocorrelationSpectrum {
    values: Vec<i64>,
}

impl AutocorrelationSpectrum {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn value(&self, k: usize) -> i64 {
        self.values[k]
    }

    /// `max_{1<=k<=n-1} |c_k|`; requires n >= 2.
    pub fn psl(&self) -> Result<u64, SeqError> {
        if self.values.len() < 2 {
            return Err(SeqError::TooShort { len: self.values.len() });
        }
        Ok(self.values[1..].iter().map(|c| c.unsigned_abs()).max().unwrap())
    }
}

/// Reusable FFT state for computing spectra of many sequences of one length.
///
/// The autocorrelation is recovered as the inverse transform of the power
/// spectrum of the zero-padded signal, which equals the aperiodic
/// autocorrelation because the padded length is at least `2n - 1`.
pub struct TransformKernel {
    n: usize,
    fft_len: usize,
    forward: Arc<dyn RealToComplex<f64>>,
    inverse: Arc<dyn ComplexToReal<f64>>,
    time: Vec<f64>,
    freq: Vec<Complex<f64>>,
    out: Vec<f64>,
}

impl TransformKernel {
    pub fn new(n: usize) -> Self {
        let fft_len = (2 * n.max(2) - 1).next_power_of_two();
        let mut planner = RealFftPlanner::<f64>::new();
        let forward = planner.plan_fft_forward(fft_len);
        let inverse = planner.plan_fft_inverse(fft_len);
        let time = forward.make_input_vec();
        let freq = forward.make_output_vec();
        let out = inverse.make_output_vec();
        Self { n, fft_len, forward, inverse, time, freq, out }
    }

    pub fn spectrum(&mut self, seq: &BinarySequence) -> Result<AutocorrelationSpectrum, SeqError> {
        assert_eq!(seq.len(), self.n, "kernel planned for length {}, got {}", self.n, seq.len());
        if self.n == 1 {
            return Ok(seq.spectrum_direct());
        }
        self.time.fill(0.0);
        for j in 0..self.n {
            self.time[j] = f64::from(seq.element(j));
        }
        self.forward
            .process(&mut self.time, &mut self.freq)
            .expect("forward FFT with matching buffer sizes");
        for bin in self.freq.iter_mut() {
            *bin = Complex::new(bin.norm_sqr(), 0.0);
        }
        self.inverse
            .process(&mut self.freq, &mut self.out)
            .expect("inverse FFT with matching buffer sizes");
        let scale = self.fft_len as f64;
        let mut values = Vec::with_capacity(self.n);
        for (lag, &raw) in self.out[..self.n].iter().enumerate() {
            let v = raw / scale;
            let rounded = v.round();
            let residual = (v - rounded).abs();
            if residual >= 0.5 || !rounded.is_finite() {
                return Err(SeqError::Precision { lag, residual });
            }
            values.push(rounded as i64);
        }
        Ok(AutocorrelationSpectrum { values })
    }
}

/// PSL evaluator that picks the faster kernel for the given length and falls
/// back to the exact popcount kernel if the transform cannot round safely.
pub struct PslKernel {
    transform: Option<TransformKernel>,
}

impl PslKernel {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "peak sidelobe level requires length >= 2");
        let transform = (n >= TRANSFORM_MIN_LEN).then(|| TransformKernel::new(n));
        Self { transform }
    }

    pub fn psl(&mut self, seq: &BinarySequence) -> u64 {
        if let Some(kernel) = self.transform.as_mut() {
            if let Ok(spectrum) = kernel.spectrum(seq) {
                return spectrum.psl().expect("kernel requires n >= 2");
            }
        }
        seq.spectrum_direct().psl().expect("kernel requires n >= 2")
    }
}
